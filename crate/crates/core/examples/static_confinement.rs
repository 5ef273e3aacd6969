use gaugelab::*;
use gaugelab::analytic::Ramp;
use gaugelab::grid::Disk;
use gaugelab::ops::{curl_z, derive_fields};

fn main() {
    // long run to steady state at 256^2, then measure confinement of the
    // steady (static) field, plus the same from the finite-solenoid closed form
    let n = 256;
    let half = 12.8;
    let grid = Grid2::centered_square(n, half).unwrap()
        .with_excluded_disk(Disk { cx: 0.0, cy: 0.0, radius: 1.0 }).unwrap();
    let h = grid.dx;
    let dt = 0.33 * h;
    let r_sol = 10.0 * h;
    let source = SolenoidSpec::new([0.0,0.0], r_sol, 1.0, Ramp { t1: 5.0*dt, tau: 8.0*dt }).unwrap();
    let mut cfg = SwitchOnConfig::new(grid.clone(), 1.0, dt, source, 120.0);
    cfg.sponge_cells = 24;
    cfg.sponge_strength = 4.0;
    cfg.frame_interval = 100000;
    cfg.allow_sponge_contact = true;
    let run = switch_on_scenario(cfg).unwrap();
    let last = &run.frames.last().unwrap().state;
    let (_e, bz) = derive_fields(last).unwrap();
    let g = &grid;
    let r_in = r_sol + 2.0 * h;
    let sponge_pad = 26;
    let mut max_in: f64 = 0.0;
    let mut max_out: f64 = 0.0;
    for j in sponge_pad..g.ny-sponge_pad {
        for i in sponge_pad..g.nx-sponge_pad {
            let k = g.idx(i, j);
            let r = (g.x(i).powi(2) + g.y(j).powi(2)).sqrt();
            if r < r_sol { max_in = max_in.max(bz.values[k].abs()); }
            else if r > r_in { max_out = max_out.max(bz.values[k].abs()); }
        }
    }
    println!("steady-state confinement (t=120): in={max_in:.4e} out={max_out:.4e} ratio={:.3e}", max_out/max_in);

    // sampled closed-form finite solenoid on the same grid
    let a = VectorField2::sample(&grid, 0.0, |x, y| gaugelab::analytic::finite_solenoid([x,y], &source).0);
    let c = curl_z(&a);
    let mut max_in2: f64 = 0.0;
    let mut max_out2: f64 = 0.0;
    for j in 2..g.ny-2 {
        for i in 2..g.nx-2 {
            let k = g.idx(i, j);
            let r = (g.x(i).powi(2) + g.y(j).powi(2)).sqrt();
            if r < r_sol { max_in2 = max_in2.max(c.values[k].abs()); }
            else if r > r_in { max_out2 = max_out2.max(c.values[k].abs()); }
        }
    }
    println!("closed-form sampled confinement: in={max_in2:.4e} out={max_out2:.4e} ratio={:.3e}", max_out2/max_in2);
}
