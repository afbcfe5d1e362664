//! Plain-text operator format.
//!
//! ```text
//! family dp-upwind
//! interior_order 5
//! boundary_order 2
//! n 32
//! alpha_tol none
//! norm <n+1 values>
//! plus interior <offset> <coefs...>
//! plus left <row> <start> <coefs...>
//! plus right <row> <start> <coefs...>
//! minus ...
//! ```
//!
//! Floating-point values are written with 17 significant digits.

use std::fmt::Write as _;

use super::{BandedOperator, Family, Row, SbpOperatorSet, Stencil, Which};
use crate::error::{Error, Result};

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(" ")
}

pub(super) fn write(ops: &SbpOperatorSet) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "family {}", ops.family());
    let _ = writeln!(s, "interior_order {}", ops.interior_order());
    let _ = writeln!(s, "boundary_order {}", ops.boundary_order());
    let _ = writeln!(s, "n {}", ops.n());
    match ops.alpha_tol() {
        Some(a) => {
            let _ = writeln!(s, "alpha_tol {}", num(a));
        }
        None => {
            let _ = writeln!(s, "alpha_tol none");
        }
    }
    let _ = writeln!(s, "norm {}", join(ops.norm()));
    for (name, which) in [("plus", Which::Plus), ("minus", Which::Minus)] {
        let op = ops.op(which);
        let st = op.interior();
        let _ = writeln!(s, "{name} interior {} {}", st.offset, join(&st.coefs));
        for (i, r) in op.left_rows().iter().enumerate() {
            let _ = writeln!(s, "{name} left {i} {} {}", r.start, join(&r.coefs));
        }
        let first_right = op.len() - op.right_rows().len();
        for (i, r) in op.right_rows().iter().enumerate() {
            let _ = writeln!(s, "{name} right {} {} {}", first_right + i, r.start, join(&r.coefs));
        }
    }
    s
}

#[derive(Default)]
struct Parts {
    interior: Option<Stencil>,
    left: Vec<Row>,
    right: Vec<Row>,
}

fn bad(line: usize, what: &str) -> Error {
    Error::Malformed(format!("line {}: {what}", line + 1))
}

pub(super) fn read(text: &str) -> Result<SbpOperatorSet> {
    let mut family = None;
    let mut interior_order = None;
    let mut boundary_order = None;
    let mut n = None;
    let mut alpha = None;
    let mut norm = None;
    let mut plus = Parts::default();
    let mut minus = Parts::default();
    for (ln, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        let Some(key) = it.next() else { continue };
        let rest: Vec<&str> = it.collect();
        let floats = |xs: &[&str]| -> Result<Vec<f64>> {
            xs.iter().map(|x| x.parse::<f64>().map_err(|_| bad(ln, "bad number"))).collect()
        };
        let int = |x: Option<&&str>| -> Result<usize> {
            x.ok_or_else(|| bad(ln, "missing integer"))?.parse().map_err(|_| bad(ln, "bad integer"))
        };
        match key {
            "family" => family = Some(rest.first().ok_or_else(|| bad(ln, "missing family"))?.parse::<Family>()?),
            "interior_order" => interior_order = Some(int(rest.first())?),
            "boundary_order" => boundary_order = Some(int(rest.first())?),
            "n" => n = Some(int(rest.first())?),
            "alpha_tol" => {
                alpha = match rest.first() {
                    Some(&"none") => None,
                    Some(x) => Some(x.parse::<f64>().map_err(|_| bad(ln, "bad tolerance"))?),
                    None => return Err(bad(ln, "missing tolerance")),
                }
            }
            "norm" => norm = Some(floats(&rest)?),
            "plus" | "minus" => {
                let parts = if key == "plus" { &mut plus } else { &mut minus };
                match rest.first() {
                    Some(&"interior") => {
                        let offset: isize = rest
                            .get(1)
                            .ok_or_else(|| bad(ln, "missing offset"))?
                            .parse()
                            .map_err(|_| bad(ln, "bad offset"))?;
                        parts.interior = Some(Stencil { offset, coefs: floats(&rest[2..])? });
                    }
                    Some(&side @ ("left" | "right")) => {
                        if rest.len() < 3 {
                            return Err(bad(ln, "short row"));
                        }
                        let start = int(rest.get(2))?;
                        let row = Row { start, coefs: floats(&rest[3..])? };
                        if side == "left" {
                            parts.left.push(row);
                        } else {
                            parts.right.push(row);
                        }
                    }
                    _ => return Err(bad(ln, "unknown row kind")),
                }
            }
            _ => return Err(bad(ln, "unknown key")),
        }
    }
    let n = n.ok_or_else(|| Error::Malformed("missing n".into()))?;
    let norm = norm.ok_or_else(|| Error::Malformed("missing norm".into()))?;
    if norm.len() != n + 1 {
        return Err(Error::Malformed("norm length does not match n".into()));
    }
    let assemble = |p: Parts| -> Result<BandedOperator> {
        let interior = p.interior.ok_or_else(|| Error::Malformed("missing interior stencil".into()))?;
        BandedOperator::from_parts(n + 1, p.left, interior, p.right)
    };
    Ok(SbpOperatorSet::from_parts(
        family.ok_or_else(|| Error::Malformed("missing family".into()))?,
        n,
        norm,
        assemble(minus)?,
        assemble(plus)?,
        interior_order.ok_or_else(|| Error::Malformed("missing interior_order".into()))?,
        boundary_order.ok_or_else(|| Error::Malformed("missing boundary_order".into()))?,
        alpha,
    ))
}
