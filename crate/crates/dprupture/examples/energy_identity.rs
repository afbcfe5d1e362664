//! Shear pulse through a linear-strength fault: the discrete energy rate
//! matches the boundary, fault and forcing terms at every step.

use dprupture::scenarios::build_parity_probe_with;
use dprupture::sbp::Family;
use dprupture::time_driver::Simulation;

fn main() -> dprupture::Result<()> {
    let mut cfg = build_parity_probe_with(Family::DpUpwind, 4, 10.0)?;
    cfg.output.energy_log = true;
    let sim = Simulation::new(&cfg)?;
    let (_, out) = sim.run()?;
    println!("{:>8} {:>12} {:>12} {:>12} {:>12} {:>10}", "t", "E", "dE/dt", "interface", "exterior", "residual");
    let stride = (out.energy.len() / 20).max(1);
    for r in out.energy.iter().step_by(stride) {
        println!(
            "{:8.4} {:12.5e} {:12.4e} {:12.4e} {:12.4e} {:10.2e}",
            r.t, r.energy, r.rate, r.interface, r.exterior, r.residual
        );
    }
    println!("largest residual {:.3e}", out.summary.max_energy_residual);
    Ok(())
}
