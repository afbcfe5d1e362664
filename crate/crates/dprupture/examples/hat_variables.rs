//! Solve the fault interface problem at a single node for a few loading
//! levels and show the identities the hat variables satisfy.

use dprupture::friction::{hat_variables, identity_residuals, FaultNodeInputs, FrictionModel, NodeState};

fn main() -> dprupture::Result<()> {
    let model = FrictionModel::SlipWeakening {
        static_friction: 0.677,
        dynamic_friction: 0.525,
        critical_slip: 0.4,
        cohesion: 0.0,
    };
    // Impedances of a granite-like rock: ρ cs and ρ cp in MPa·s/m.
    let z = [2.67 * 6.0, 2.67 * 3.464, 2.67 * 3.464];
    let normal = -120.0;
    println!("{:>8} {:>8} {:>10} {:>10} {:>10} {:>10}", "shear", "slip", "V", "T_m", "dissip", "residual");
    for shear in [60.0, 70.0, 81.24, 90.0] {
        for slip in [0.0, 0.2, 0.5] {
            let inputs = FaultNodeInputs::from_traces([0.0; 3], [0.0; 3], [0.0; 3], [0.0; 3], z, z)
                .with_prestress([normal, shear, 0.0]);
            let hat = hat_variables(&inputs, &model, NodeState { slip, psi: 0.0 })?;
            let res = identity_residuals(&inputs, &hat);
            println!(
                "{shear:8.2} {slip:8.2} {:10.4} {:10.4} {:10.4} {:10.2e}",
                hat.slip_rate,
                hat.total_traction[1],
                hat.dissipation(),
                res.max()
            );
        }
    }
    Ok(())
}
