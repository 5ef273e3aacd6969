use gaugelab::*;
use gaugelab::analytic::Ramp;
use gaugelab::gauge::lorenz_residual;
use gaugelab::grid::Disk;
use gaugelab::ops::derive_fields;

fn main() {
    // 256^2 grid, R = 10 cells, mirrors the acceptance geometry
    let n = 256;
    let half = 12.8; // h = 0.1003..., R = 10 h ~ 1.0
    let grid = Grid2::centered_square(n, half).unwrap()
        .with_excluded_disk(Disk { cx: 0.0, cy: 0.0, radius: 1.0 }).unwrap();
    let h = grid.dx;
    let dt = 0.33 * h;
    let r_sol = 10.0 * h;
    let source = SolenoidSpec::new([0.0,0.0], r_sol, 1.0, Ramp { t1: 5.0*dt, tau: 8.0*dt }).unwrap();
    let mut cfg = SwitchOnConfig::new(grid.clone(), 1.0, dt, source, 10.0);
    cfg.sponge_cells = 16;
    cfg.probe_radii = (0..8).map(|k| 2.0 + 0.9 * k as f64).collect();
    cfg.frame_interval = 32;
    cfg.allow_sponge_contact = false;
    let t0 = std::time::Instant::now();
    let run = switch_on_scenario(cfg).unwrap();
    println!("run: {} frames, {} probe samples, truncated={}, elapsed {:?}",
        run.frames.len(), run.probes.times.len(), run.truncated, t0.elapsed());

    // confinement ratio per frame
    let g = &run.config.grid;
    let r_in = r_sol + 2.0 * h;
    let mut worst_ratio: f64 = 0.0;
    let ramp_end = run.config.source.ramp.end();
    for f in &run.frames {
        if f.state.time() <= ramp_end { continue; }
        let (_e, bz) = derive_fields(&f.state).unwrap();
        let mut max_in: f64 = 0.0;
        let mut max_out: f64 = 0.0;
        for j in 2..g.ny-2 {
            for i in 2..g.nx-2 {
                let k = g.idx(i, j);
                let r = (g.x(i).powi(2) + g.y(j).powi(2)).sqrt();
                if r < r_sol { max_in = max_in.max(bz.values[k].abs()); }
                else if r > r_in { max_out = max_out.max(bz.values[k].abs()); }
            }
        }
        let ratio = max_out / max_in.max(1e-300);
        worst_ratio = worst_ratio.max(ratio);
        if f.step % 96 == 0 {
            println!("t={:6.2} max_in={:9.3e} max_out={:9.3e} ratio={:9.3e}", f.state.time(), max_in, max_out, ratio);
        }
    }
    println!("WORST confinement ratio: {worst_ratio:.3e}  (criterion wants < 1e-3)");

    // lorenz residual growth
    let mask = run.vacuum_mask();
    let mut first = None;
    let mut worst = 0.0f64;
    for f in &run.frames {
        if f.state.time() <= ramp_end { continue; }
        let r = lorenz_residual(&f.state, 1.0).unwrap().max_abs_masked(&mask);
        if first.is_none() { first = Some(r); }
        worst = worst.max(r);
    }
    println!("lorenz residual: first post-ramp {:?}, worst {:.3e}, growth {:.2}x",
        first, worst, worst / first.unwrap().max(1e-300));

    // front speeds
    for (name, ch) in [("A", ProbeChannel::VectorPotential), ("E", ProbeChannel::ElectricField)] {
        let rep = signal_locality_report(&run, ch, 0.01).unwrap();
        println!("front speed ({name}): {:?} +- {:?}", rep.fitted_speed, rep.stderr);
    }
}
