//! Convergence of the coupled two-block solver against a manufactured
//! solution, with a frozen linear fault.
//!
//! cargo run --release --example mms_convergence -- traditional 4

use dprupture::scenarios::{build_mms_linear, run_mms};
use dprupture::sbp::Family;

fn main() -> dprupture::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let family: Family = args.first().map_or(Ok(Family::Traditional), |s| s.parse())?;
    let order = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let cfg = build_mms_linear(family, order, 1.0 / 12.0, 1.0)?;
    println!("{:>10} {:>12} {:>6}", "h", "error", "rate");
    for row in run_mms(&cfg, &[12, 24, 48])? {
        println!("{:10.5} {:12.4e} {:6.2}", row.h, row.error, row.rate);
    }
    Ok(())
}
