use gaugelab::*;
use gaugelab::analytic::Ramp;
use gaugelab::grid::Disk;
use gaugelab::interferometry::line_integral_a;

fn main() {
    let n = 96;
    let half = 8.0;
    let grid = Grid2::centered_square(n, half).unwrap()
        .with_excluded_disk(Disk { cx: 0.0, cy: 0.0, radius: 0.6 }).unwrap();
    let dx = grid.dx;
    let dt = 0.33 * dx;
    let source = SolenoidSpec::new([0.0,0.0], 0.5, 1.0, Ramp { t1: 2.0*dt, tau: 8.0*dt }).unwrap();
    for (cells, strength, t_end) in [(16usize, 6.0, 60.0), (16, 6.0, 120.0), (24, 4.0, 60.0), (24, 4.0, 120.0)] {
        let mut cfg = SwitchOnConfig::new(grid.clone(), 1.0, dt, source, t_end);
        cfg.sponge_cells = cells;
        cfg.sponge_strength = strength;
        cfg.allow_sponge_contact = true;
        cfg.frame_interval = 100000;
        let clearance = cfg.sponge_clearance();
        let r_cal = 0.5 * (source.radius + clearance);
        let run = switch_on_scenario(cfg).unwrap();
        let last = &run.frames.last().unwrap().state;
        let l = LoopPath::circle([0.0,0.0], r_cal, 256, 1).unwrap();
        let flux = line_integral_a(&last.a, l.as_open()).unwrap();
        println!("cells={cells} strength={strength} t_end={t_end}: flux at r_cal={r_cal:.2} -> {flux:.4}");
    }
}
