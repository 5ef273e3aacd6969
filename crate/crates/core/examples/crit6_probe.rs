use gaugelab::*;
use gaugelab::analytic::Ramp;
use gaugelab::grid::Disk;

fn main() {
    let n = 128;
    let half = 8.0;
    let grid = Grid2::centered_square(n, half).unwrap()
        .with_excluded_disk(Disk { cx: 0.0, cy: 0.0, radius: 0.5 }).unwrap();
    let h = grid.dx;
    let dt = 0.33 * h;
    let r_sol = 6.0 * h;
    let tau = 8.0 * dt;
    let t1 = 5.0 * dt;
    let source = SolenoidSpec::new([0.0,0.0], r_sol, 1.0, Ramp { t1, tau }).unwrap();
    // run long enough to know the late-time peak at the witness probe
    let mut cfg = SwitchOnConfig::new(grid.clone(), 1.0, dt, source, 14.0);
    cfg.sponge_cells = 16;
    cfg.frame_interval = 4;
    cfg.allow_sponge_contact = true;
    cfg.probe_radii = vec![5.5];
    let run = switch_on_scenario(cfg).unwrap();
    println!("frames: {}, dt={dt:.4}, t1={t1:.3}, tau={tau:.3}", run.frames.len());

    let probe = [5.5, 0.0];
    // witness frame: just after ramp end; causal bound t1 + (r - R)/c - 3 tau
    let t_witness_max = t1 + (probe[0] - r_sol) - 3.0 * tau;
    println!("witness must be before t = {t_witness_max:.3}");
    let peak_lorenz: f64 = run.probes.a_mag.iter().map(|row| row[0]).fold(0.0, f64::max);
    let floor = 1e-9 * peak_lorenz;
    println!("lorenz peak |A| at probe = {peak_lorenz:.4e}; floor = {floor:.3e}");

    for f in &run.frames {
        let t = f.state.time();
        if t < t1 || t > t_witness_max { continue; }
        let a_lor = f.state.a.interp(probe);
        let lor_mag = (a_lor[0].powi(2) + a_lor[1].powi(2)).sqrt();
        let proj = gaugelab::gauge::coulomb_project(&f.state).unwrap();
        let a_cou = proj.state.a.interp(probe);
        let cou_mag = (a_cou[0].powi(2) + a_cou[1].powi(2)).sqrt();
        println!("t={t:7.3}  |A_lorenz|={lor_mag:10.3e}  |A_coulomb|={cou_mag:10.3e}  (floor {floor:.2e}) cg_iters={}",
            proj.stats.iterations);
    }
}
