//! Write the built-in scenarios as TOML run configs.
//!
//! cargo run --example emit_configs -- configs

use std::path::PathBuf;

use dprupture::scenarios::{build_mms_linear, build_parity_probe, build_tpv10};
use dprupture::sbp::Family;

fn main() -> dprupture::Result<()> {
    let dir = std::env::args().nth(1).map_or_else(|| PathBuf::from("configs"), PathBuf::from);
    std::fs::create_dir_all(&dir)?;
    let mut mms = build_mms_linear(Family::Traditional, 4, 1.0 / 12.0, 1.0)?;
    if let Some(m) = mms.manufactured.as_mut() {
        m.levels = vec![12, 24, 48];
    }
    let configs = [
        ("tpv10_scaled.toml", build_tpv10(0.125, 0.2)?),
        ("mms_traditional4.toml", mms),
        ("parity_dp5.toml", build_parity_probe(Family::DpUpwind, 5)?),
    ];
    for (file, cfg) in configs {
        let path = dir.join(file);
        std::fs::write(&path, cfg.to_toml()?)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
