//! Diagonal-norm dual-pairing SBP first-derivative operators.
//!
//! An operator set is the triple `(H, D-, D+)` on `n + 1` equispaced nodes of
//! `[0, 1]` satisfying
//!
//! ```text
//! (D+ f)^T H g + f^T H (D- g) = f_n g_n - f_0 g_0
//! ```
//!
//! with `Q+ + Q+^T` negative semidefinite, `Q± = H D± - B/2`. All families are
//! built as `D± = Dc ∓ H⁻¹ Σ d_l Δ_lᵀ Δ_l`, where `Dc` is a central SBP operator
//! and `Δ_l` the `l`-th undivided forward difference. This makes the identity,
//! the semidefiniteness of `Q+ + Q+ᵀ = -2 Σ d_l Δ_lᵀ Δ_l` and the reflection
//! relation `D- = -P D+ P` hold by construction.

mod banded;
pub mod closure;
mod grid;
pub mod interior;
mod text;
mod verify;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

pub use banded::{AxisLayout, BandedOperator, Row, Stencil};
pub use closure::CentralClosure;
pub use grid::{apply_axis, Axis, GridFunction3D};
pub use interior::InteriorDesign;
pub use verify::{verify_operator, VerificationReport};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Traditional,
    DpUpwind,
    Drp,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Traditional => "traditional",
            Family::DpUpwind => "dp-upwind",
            Family::Drp => "drp",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "traditional" | "trad" | "central" => Ok(Family::Traditional),
            "dp-upwind" | "dp" | "upwind" => Ok(Family::DpUpwind),
            "drp" => Ok(Family::Drp),
            other => Err(Error::Unsupported(format!("operator family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Minus,
    Plus,
}

/// Default maximum relative dispersion error for the optimized family.
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Every family and order the library builds.
pub const SHIPPED: [(Family, usize); 11] = [
    (Family::Traditional, 2),
    (Family::Traditional, 4),
    (Family::Traditional, 6),
    (Family::DpUpwind, 4),
    (Family::DpUpwind, 5),
    (Family::DpUpwind, 6),
    (Family::DpUpwind, 7),
    (Family::Drp, 4),
    (Family::Drp, 5),
    (Family::Drp, 6),
    (Family::Drp, 7),
];

#[derive(Debug, Clone, PartialEq)]
pub struct SbpOperatorSet {
    family: Family,
    n: usize,
    h: f64,
    norm: Vec<f64>,
    minus: BandedOperator,
    plus: BandedOperator,
    interior_order: usize,
    boundary_order: usize,
    alpha_tol: Option<f64>,
}

struct Recipe {
    closure: CentralClosure,
    dissipation: Vec<(usize, f64)>,
    interior_order: usize,
    boundary_order: usize,
}

fn forward_difference_gram(l: usize, size: usize) -> DMatrix<f64> {
    let mut binom = vec![1.0f64; l + 1];
    for k in 1..=l {
        binom[k] = binom[k - 1] * (l + 1 - k) as f64 / k as f64;
    }
    let coef: Vec<f64> = (0..=l).map(|k| if (l - k) % 2 == 0 { binom[k] } else { -binom[k] }).collect();
    let mut m = DMatrix::zeros(size, size);
    for i in 0..size.saturating_sub(l) {
        for a in 0..=l {
            for b in 0..=l {
                m[(i + a, i + b)] += coef[a] * coef[b];
            }
        }
    }
    m
}

impl SbpOperatorSet {
    /// Classical central operator of order 2, 4 or 6 (`D+ = D-`).
    pub fn build_traditional(order: usize, n: usize) -> Result<Self> {
        let closure = closure::traditional_closure(order)
            .ok_or_else(|| Error::Unsupported(format!("traditional order {order}; expected 2, 4 or 6")))?;
        let boundary_order = closure.boundary_order;
        Self::from_recipe(
            Family::Traditional,
            Recipe { closure, dissipation: Vec::new(), interior_order: order, boundary_order },
            n,
            None,
        )
    }

    /// Upwind dual-pairing operator with interior order 4..=7.
    pub fn build_dp_upwind(order: usize, n: usize) -> Result<Self> {
        let design = interior::dp_interior(order)?;
        let recipe = Self::recipe_for(design, order)?;
        Self::from_recipe(Family::DpUpwind, recipe, n, None)
    }

    /// Dispersion-optimized dual-pairing operator with interior order 4..=7
    /// whose paired frequency stays within `alpha_tol` relative error.
    pub fn build_drp(order: usize, alpha_tol: f64, n: usize) -> Result<Self> {
        let design = interior::drp_interior(order, alpha_tol)?;
        let recipe = Self::recipe_for(design, order)?;
        Self::from_recipe(Family::Drp, recipe, n, Some(alpha_tol))
    }

    pub fn build(family: Family, order: usize, n: usize, alpha_tol: Option<f64>) -> Result<Self> {
        match family {
            Family::Traditional => Self::build_traditional(order, n),
            Family::DpUpwind => Self::build_dp_upwind(order, n),
            Family::Drp => Self::build_drp(order, alpha_tol.unwrap_or(DEFAULT_ALPHA), n),
        }
    }

    /// Smallest `n` accepted by [`SbpOperatorSet::build`].
    pub fn min_intervals(family: Family, order: usize) -> usize {
        let half_width = match family {
            Family::Traditional => order / 2,
            Family::DpUpwind => match order {
                4 => 3,
                5 => 3,
                _ => 4,
            },
            Family::Drp => interior::DRP_HALF_WIDTH,
        };
        4 * half_width - 1
    }

    fn recipe_for(design: InteriorDesign, order: usize) -> Result<Recipe> {
        let boundary_order = order / 2;
        let closure = if order == 5 && design.half_stencil == closure::central_half_stencil(6).unwrap() {
            closure::traditional_closure(6).unwrap()
        } else {
            closure::solve_central(&design.half_stencil, boundary_order)?
        };
        Ok(Recipe { closure, dissipation: design.dissipation, interior_order: order, boundary_order })
    }

    fn from_recipe(family: Family, recipe: Recipe, n: usize, alpha_tol: Option<f64>) -> Result<Self> {
        let size = n + 1;
        let needed = 2 * recipe.closure.block_size();
        if size < needed {
            return Err(Error::GridTooSmall { needed, got: size });
        }
        let (unit_norm, central) = recipe.closure.assemble(n)?;
        let mut gram = DMatrix::zeros(size, size);
        for &(l, d) in &recipe.dissipation {
            gram += forward_difference_gram(l, size) * d;
        }
        for i in 0..size {
            let w = unit_norm[i];
            for j in 0..size {
                gram[(i, j)] /= w;
            }
        }
        let plus = &central - &gram;
        let minus = &central + &gram;
        let h = 1.0 / n as f64;
        let ops = Self {
            family,
            n,
            h,
            norm: unit_norm.iter().map(|w| w * h).collect(),
            minus: BandedOperator::from_dense(&minus, 1.0 / h)?,
            plus: BandedOperator::from_dense(&plus, 1.0 / h)?,
            interior_order: recipe.interior_order,
            boundary_order: recipe.boundary_order,
            alpha_tol,
        };
        let (s_plus_max, s_minus_min) = ops.dissipation_extremes();
        if s_plus_max > 1e-10 || s_minus_min < -1e-10 {
            return Err(Error::Construction(format!(
                "semidefiniteness violated: max eig S+ = {s_plus_max:.3e}, min eig S- = {s_minus_min:.3e}"
            )));
        }
        Ok(ops)
    }

    /// Assemble from explicit parts without any checks.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        family: Family,
        n: usize,
        norm: Vec<f64>,
        minus: BandedOperator,
        plus: BandedOperator,
        interior_order: usize,
        boundary_order: usize,
        alpha_tol: Option<f64>,
    ) -> Self {
        Self { family, n, h: 1.0 / n as f64, norm, minus, plus, interior_order, boundary_order, alpha_tol }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> usize {
        self.n + 1
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Diagonal of `H` (includes the spacing).
    pub fn norm(&self) -> &[f64] {
        &self.norm
    }

    pub fn interior_order(&self) -> usize {
        self.interior_order
    }

    pub fn boundary_order(&self) -> usize {
        self.boundary_order
    }

    pub fn alpha_tol(&self) -> Option<f64> {
        self.alpha_tol
    }

    pub fn op(&self, which: Which) -> &BandedOperator {
        match which {
            Which::Minus => &self.minus,
            Which::Plus => &self.plus,
        }
    }

    pub fn minus(&self) -> &BandedOperator {
        &self.minus
    }

    pub fn plus(&self) -> &BandedOperator {
        &self.plus
    }

    /// `Q = H D - B/2` as a dense matrix.
    pub fn q_matrix(&self, which: Which) -> DMatrix<f64> {
        let mut q = self.op(which).to_dense();
        for i in 0..q.nrows() {
            let w = self.norm[i];
            for j in 0..q.ncols() {
                q[(i, j)] *= w;
            }
        }
        let last = q.nrows() - 1;
        q[(0, 0)] += 0.5;
        q[(last, last)] -= 0.5;
        q
    }

    /// `(max eigenvalue of S+, min eigenvalue of S-)`.
    pub fn dissipation_extremes(&self) -> (f64, f64) {
        let sym = |which| {
            let q = self.q_matrix(which);
            let s = &q + q.transpose();
            SymmetricEigen::new(s).eigenvalues
        };
        let plus = sym(Which::Plus).iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let minus = sym(Which::Minus).iter().copied().fold(f64::INFINITY, f64::min);
        (plus, minus)
    }

    /// Plain-text serialization with 17 significant digits.
    pub fn to_text(&self) -> String {
        text::write(self)
    }

    pub fn from_text(s: &str) -> Result<Self> {
        text::read(s)
    }
}
