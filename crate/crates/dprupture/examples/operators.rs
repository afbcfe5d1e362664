//! Build one operator pair, check it, and print it in the text format.
//!
//! cargo run --example operators -- drp 5 32

use dprupture::sbp::{verify_operator, Family, SbpOperatorSet};

fn main() -> dprupture::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let family: Family = args.first().map_or(Ok(Family::DpUpwind), |s| s.parse())?;
    let order = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let n = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(32);

    let ops = SbpOperatorSet::build(family, order, n, None)?;
    let report = verify_operator(&ops);
    let (smin, smax) = ops.dissipation_extremes();
    eprintln!("{family} order {order}, n = {n}: interior order {}, boundary order {}", ops.interior_order(), ops.boundary_order());
    eprintln!("dissipation eigenvalues in [{smin:.3e}, {smax:.3e}]");
    eprintln!("{report:#?}");
    print!("{}", ops.to_text());
    Ok(())
}
