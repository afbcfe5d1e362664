//! Scaled TPV10 run: `cargo run --example tpv10_scaled -- [family] [order] [h] [scale] [output-dir]`.

use dprupture::scenarios::tpv10::Tpv10Config;
use dprupture::scenarios::high_frequency_fraction;
use dprupture::time_driver::Simulation;

fn main() -> dprupture::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let family = args.get(1).map_or("dp", String::as_str).parse()?;
    let order = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(4);
    let h = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0.125);
    let scale = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(0.2);
    let scenario = Tpv10Config::scaled(h, scale);
    let mut cfg = scenario.to_run_config(family, order)?;
    if let Some(dir) = args.get(5) {
        cfg.output.dir = Some(dir.into());
        cfg.output.snapshot_stride = 50;
    }
    let sim = Simulation::new(&cfg)?;
    println!("{}: {} steps of {:.4e} s, {} fault nodes", cfg.name, sim.steps(), sim.dt(), sim.system().fault_len());
    let (_, out) = sim.run()?;
    let s = &out.summary;
    println!(
        "max V {:.3} m/s at t = {:.3} s, final slip max {:.3} m, wall {:.1} s",
        s.max_slip_rate, s.max_slip_rate_time, s.final_slip_max, s.wall_time
    );
    let f_max = scenario.material.cs / (2.0 * h);
    for seis in &out.seismograms {
        let v = seis.column(3);
        let peak = v.iter().copied().fold(0.0, f64::max);
        println!(
            "  {:<18} peak V {:.3} m/s, final slip {:.3} m, top-octave fraction {:.3e}",
            seis.name,
            peak,
            seis.samples.last().map_or(0.0, |r| r[7]),
            high_frequency_fraction(&v, sim.dt(), f_max)
        );
    }
    let dc = scenario.critical_slip;
    let (mut hit, mut area) = (0.0, 0.0);
    for ((c, w), slip) in out.fault_coords.iter().zip(&out.fault_weights).zip(&out.final_slip) {
        if scenario.rupture.contains(c[0], c[1]) {
            area += w;
            if *slip > dc {
                hit += w;
            }
        }
    }
    println!("slip > d_c over {:.1}% of the rupture area", 100.0 * hit / area);
    let e_tot: Vec<f64> = out.energy.iter().map(|r| r.total_energy).collect();
    println!("total energy: start {:.4e}, end {:.4e} TJ", e_tot[0], e_tot[e_tot.len() - 1]);
    Ok(())
}
