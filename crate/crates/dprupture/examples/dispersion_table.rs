//! Modified wavenumber of the interior stencils of several operators,
//! written as CSV for plotting.
//!
//! cargo run --example dispersion_table > dispersion.csv

use dprupture::dispersion::{dispersion_errors, dispersion_table};
use dprupture::sbp::{Family, SbpOperatorSet};

fn main() -> dprupture::Result<()> {
    let cases = [
        (Family::Traditional, 4),
        (Family::Traditional, 6),
        (Family::DpUpwind, 4),
        (Family::DpUpwind, 6),
        (Family::Drp, 4),
        (Family::Drp, 6),
    ];
    println!("operator,kh,re,im,relative_error");
    for (family, order) in cases {
        let ops = SbpOperatorSet::build(family, order, 64, None)?;
        let e = dispersion_errors(&ops)?;
        eprintln!("{family:>12}{order}: L2 {:6.3}%  max {:6.3}%", 100.0 * e.l2_relative, 100.0 * e.max_relative);
        for [kh, re, im, err] in dispersion_table(&ops, 128)? {
            println!("{family}{order},{kh},{re},{im},{err}");
        }
    }
    Ok(())
}
