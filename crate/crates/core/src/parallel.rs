//! Slab parallelism for the spatial update loops.
//!
//! The domain is split into contiguous row slabs; each worker writes its
//! own disjoint output slice while reading the shared previous levels.
//! Every cell's arithmetic is identical to the serial order, so results are
//! bit-identical for any thread count. `GAUGE_LAB_THREADS` caps the worker
//! count.

/// Worker count: `GAUGE_LAB_THREADS` if set, else available parallelism,
/// capped at 8 (the kernels saturate memory bandwidth well before that).
pub fn thread_count() -> usize {
    if let Ok(v) = std::env::var("GAUGE_LAB_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(8)
}

/// Run `kernel(j0, rows, out_slab)` over disjoint row slabs of `out`.
/// `rows_total` is the number of rows of width `row_len` in `out`.
pub fn for_row_slabs<F>(out: &mut [f64], row_len: usize, rows_total: usize, threads: usize, kernel: F)
where
    F: Fn(usize, usize, &mut [f64]) + Sync,
{
    debug_assert_eq!(out.len(), row_len * rows_total);
    let workers = threads.max(1).min(rows_total.max(1));
    if workers <= 1 {
        kernel(0, rows_total, out);
        return;
    }
    let rows_per = rows_total.div_ceil(workers);
    std::thread::scope(|scope| {
        let mut rest = out;
        let mut j0 = 0;
        while j0 < rows_total {
            let take = rows_per.min(rows_total - j0);
            let (slab, tail) = rest.split_at_mut(take * row_len);
            rest = tail;
            let kernel = &kernel;
            let start = j0;
            scope.spawn(move || kernel(start, take, slab));
            j0 += take;
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slab_split_is_bit_identical_to_serial() {
        let row_len = 37;
        let rows = 53;
        let src: Vec<f64> = (0..row_len * rows).map(|k| (k as f64 * 0.37).sin()).collect();
        let kernel = |j0: usize, nrows: usize, out: &mut [f64]| {
            for j in 0..nrows {
                for i in 0..row_len {
                    let k = (j0 + j) * row_len + i;
                    out[j * row_len + i] = src[k] * 3.0 + (k as f64).cos();
                }
            }
        };
        let mut serial = vec![0.0; row_len * rows];
        for_row_slabs(&mut serial, row_len, rows, 1, kernel);
        for threads in [2, 3, 5, 8] {
            let mut par = vec![0.0; row_len * rows];
            for_row_slabs(&mut par, row_len, rows, threads, kernel);
            assert_eq!(serial, par, "threads = {threads}");
        }
    }
}
