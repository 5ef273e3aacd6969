//! CSV serialization of grid fields.
//!
//! Format: header line `# grid nx ny dx dy x0 y0 time`, optionally a second
//! line `# frame k` for time-series members, then one row per cell,
//! `i,j,x,y,value` for scalars or `i,j,x,y,vx,vy` for vectors, j-major.
//! All floats are printed with 12 significant digits, which keeps artifacts
//! byte-identical across runs. The excluded disk is not part of the format.

use crate::error::{Error, Result};
use crate::field::{ScalarField2, VectorField2};
use crate::grid::Grid2;
use std::io::{BufRead, Write};

/// 12-significant-digit float formatting used by every text artifact.
pub fn fmt_g12(v: f64) -> String {
    format!("{v:.11e}")
}

/// Round to 12 significant digits; applied to values destined for JSON so
/// artifacts stay deterministic and human-diffable.
pub fn round_g12(v: f64) -> f64 {
    if v.is_finite() {
        fmt_g12(v).parse().unwrap_or(v)
    } else {
        v
    }
}

fn write_header(w: &mut impl Write, grid: &Grid2, time: f64, frame: Option<usize>) -> Result<()> {
    writeln!(
        w,
        "# grid {} {} {} {} {} {} {}",
        grid.nx,
        grid.ny,
        fmt_g12(grid.dx),
        fmt_g12(grid.dy),
        fmt_g12(grid.x0),
        fmt_g12(grid.y0),
        fmt_g12(time)
    )
    .map_err(io_err)?;
    if let Some(k) = frame {
        writeln!(w, "# frame {k}").map_err(io_err)?;
    }
    Ok(())
}

fn io_err(e: std::io::Error) -> Error {
    Error::Invalid(format!("io error: {e}"))
}

pub fn write_scalar_csv(field: &ScalarField2, w: &mut impl Write) -> Result<()> {
    write_scalar_csv_frame(field, w, None)
}

pub fn write_scalar_csv_frame(
    field: &ScalarField2,
    w: &mut impl Write,
    frame: Option<usize>,
) -> Result<()> {
    let g = &field.grid;
    write_header(w, g, field.time, frame)?;
    for j in 0..g.ny {
        for i in 0..g.nx {
            writeln!(
                w,
                "{i},{j},{},{},{}",
                fmt_g12(g.x(i)),
                fmt_g12(g.y(j)),
                fmt_g12(field.values[g.idx(i, j)])
            )
            .map_err(io_err)?;
        }
    }
    Ok(())
}

pub fn write_vector_csv(field: &VectorField2, w: &mut impl Write) -> Result<()> {
    write_vector_csv_frame(field, w, None)
}

pub fn write_vector_csv_frame(
    field: &VectorField2,
    w: &mut impl Write,
    frame: Option<usize>,
) -> Result<()> {
    let g = &field.grid;
    write_header(w, g, field.time, frame)?;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let k = g.idx(i, j);
            writeln!(
                w,
                "{i},{j},{},{},{},{}",
                fmt_g12(g.x(i)),
                fmt_g12(g.y(j)),
                fmt_g12(field.x[k]),
                fmt_g12(field.y[k])
            )
            .map_err(io_err)?;
        }
    }
    Ok(())
}

struct Header {
    grid: Grid2,
    time: f64,
}

fn parse_header(line: &str) -> Result<Header> {
    let body = line
        .strip_prefix("# grid ")
        .ok_or_else(|| Error::Invalid(format!("bad CSV header: {line:?}")))?;
    let parts: Vec<&str> = body.split_whitespace().collect();
    if parts.len() != 7 {
        return Err(Error::Invalid(format!(
            "CSV header needs 7 fields, got {}",
            parts.len()
        )));
    }
    let nx: usize = parts[0].parse().map_err(|_| bad_num(parts[0]))?;
    let ny: usize = parts[1].parse().map_err(|_| bad_num(parts[1]))?;
    let nums: Vec<f64> = parts[2..]
        .iter()
        .map(|s| s.parse().map_err(|_| bad_num(s)))
        .collect::<Result<_>>()?;
    Ok(Header {
        grid: Grid2::new(nx, ny, nums[0], nums[1], nums[2], nums[3])?,
        time: nums[4],
    })
}

fn bad_num(s: &str) -> Error {
    Error::Invalid(format!("CSV header contains a bad number: {s:?}"))
}

pub fn read_scalar_csv(r: impl BufRead) -> Result<ScalarField2> {
    let mut lines = r.lines();
    let header = parse_header(
        &lines
            .next()
            .ok_or_else(|| Error::Invalid("empty CSV".into()))?
            .map_err(io_err)?,
    )?;
    let mut values = vec![0.0; header.grid.len()];
    for line in lines {
        let line = line.map_err(io_err)?;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(Error::Invalid(format!("scalar CSV row needs 5 columns: {line:?}")));
        }
        let i: usize = cols[0].parse().map_err(|_| bad_num(cols[0]))?;
        let j: usize = cols[1].parse().map_err(|_| bad_num(cols[1]))?;
        values[header.grid.idx(i, j)] = cols[4].parse().map_err(|_| bad_num(cols[4]))?;
    }
    ScalarField2::new(header.grid, values, header.time)
}

pub fn read_vector_csv(r: impl BufRead) -> Result<VectorField2> {
    let mut lines = r.lines();
    let header = parse_header(
        &lines
            .next()
            .ok_or_else(|| Error::Invalid("empty CSV".into()))?
            .map_err(io_err)?,
    )?;
    let mut x = vec![0.0; header.grid.len()];
    let mut y = vec![0.0; header.grid.len()];
    for line in lines {
        let line = line.map_err(io_err)?;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(Error::Invalid(format!("vector CSV row needs 6 columns: {line:?}")));
        }
        let i: usize = cols[0].parse().map_err(|_| bad_num(cols[0]))?;
        let j: usize = cols[1].parse().map_err(|_| bad_num(cols[1]))?;
        let k = header.grid.idx(i, j);
        x[k] = cols[4].parse().map_err(|_| bad_num(cols[4]))?;
        y[k] = cols[5].parse().map_err(|_| bad_num(cols[5]))?;
    }
    VectorField2::new(header.grid, x, y, header.time)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scalar_round_trip_within_print_precision() {
        let g = Grid2::centered_square(16, 1.0).unwrap();
        let f = ScalarField2::sample(&g, 0.25, |x, y| (x * 3.1).sin() + y);
        let mut buf = Vec::new();
        write_scalar_csv(&f, &mut buf).unwrap();
        let back = read_scalar_csv(std::io::BufReader::new(&buf[..])).unwrap();
        assert_eq!(back.grid.nx, 16);
        for (a, b) in f.values.iter().zip(&back.values) {
            assert!((a - b).abs() <= 1e-11 * a.abs().max(1.0));
        }
    }

    #[test]
    fn writes_are_deterministic() {
        let g = Grid2::centered_square(12, 2.0).unwrap();
        let f = VectorField2::sample(&g, 1.0, |x, y| [x * y, x - y]);
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_vector_csv_frame(&f, &mut a, Some(3)).unwrap();
        write_vector_csv_frame(&f, &mut b, Some(3)).unwrap();
        assert_eq!(a, b);
        assert!(String::from_utf8(a).unwrap().contains("# frame 3"));
    }

    proptest! {
        #[test]
        fn g12_round_trip_is_idempotent(v in -1e12f64..1e12) {
            let once = round_g12(v);
            prop_assert_eq!(once, round_g12(once));
        }
    }
}
