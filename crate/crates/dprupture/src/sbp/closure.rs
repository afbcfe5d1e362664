//! Boundary closures for central diagonal-norm SBP first-derivative operators.
//!
//! A closure is stored in unit spacing as the leading `r` norm weights and the
//! leading `r x r` block of the skew-symmetric matrix `Q = H D - B/2`. Entries
//! of `Q` outside the block follow the interior stencil, and the right boundary
//! is the mirror image of the left one.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CentralClosure {
    /// Interior antisymmetric coefficients `a_1..a_w`: `(Df)_j = sum_k a_k (f_{j+k} - f_{j-k})`.
    pub half_stencil: Vec<f64>,
    /// Leading norm weights `H_0..H_{r-1}` for unit spacing.
    pub norm_block: Vec<f64>,
    /// Leading `r x r` block of `Q`, skew-symmetric.
    pub q_block: DMatrix<f64>,
    /// Monomial degree reproduced exactly on boundary rows.
    pub boundary_order: usize,
}

impl CentralClosure {
    pub fn block_size(&self) -> usize {
        self.norm_block.len()
    }

    pub fn half_width(&self) -> usize {
        self.half_stencil.len()
    }

    /// Closure from boundary rows of `D` and the leading norm weights.
    fn from_rows(half_stencil: &[f64], norm_block: &[f64], rows: &[&[f64]], boundary_order: usize) -> Self {
        let r = norm_block.len();
        let mut q = DMatrix::zeros(r, r);
        for (i, row) in rows.iter().enumerate() {
            for (j, &d) in row.iter().enumerate().take(r) {
                q[(i, j)] = norm_block[i] * d;
            }
        }
        q[(0, 0)] += 0.5;
        // Symmetrize away round-off in the rational data.
        let q = (&q - q.transpose()) * 0.5;
        Self {
            half_stencil: half_stencil.to_vec(),
            norm_block: norm_block.to_vec(),
            q_block: q,
            boundary_order,
        }
    }

    /// Dense `(H, D)` of the central operator for `n + 1` nodes, unit spacing.
    pub fn assemble(&self, n: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let size = n + 1;
        let r = self.block_size();
        if size < 2 * r {
            return Err(Error::GridTooSmall { needed: 2 * r, got: size });
        }
        let mut q = DMatrix::zeros(size, size);
        for i in 0..size {
            for (k, &a) in self.half_stencil.iter().enumerate() {
                let j = i + k + 1;
                if j < size {
                    q[(i, j)] = a;
                    q[(j, i)] = -a;
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                q[(i, j)] = self.q_block[(i, j)];
                // Q = -P Q P on the mirrored block.
                q[(size - 1 - i, size - 1 - j)] = -self.q_block[(i, j)];
            }
        }
        let mut norm = vec![1.0; size];
        for (i, &w) in self.norm_block.iter().enumerate() {
            norm[i] = w;
            norm[size - 1 - i] = w;
        }
        q[(0, 0)] -= 0.5;
        q[(size - 1, size - 1)] += 0.5;
        for i in 0..size {
            let w = norm[i];
            for j in 0..size {
                q[(i, j)] /= w;
            }
        }
        Ok((norm, q))
    }
}

/// Standard central interior coefficients of order 2, 4, 6 and 8.
pub fn central_half_stencil(order: usize) -> Option<Vec<f64>> {
    match order {
        2 => Some(vec![0.5]),
        4 => Some(vec![2.0 / 3.0, -1.0 / 12.0]),
        6 => Some(vec![3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0]),
        8 => Some(vec![4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0]),
        _ => None,
    }
}

/// Classical diagonal-norm closures of order 2, 4 and 6 with exact rational entries.
pub fn traditional_closure(order: usize) -> Option<CentralClosure> {
    match order {
        2 => Some(CentralClosure::from_rows(&[0.5], &[0.5, 1.0], &[&[-1.0, 1.0], &[-0.5, 0.0, 0.5]], 1)),
        4 => {
            let norm = [17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0];
            let rows: [&[f64]; 4] = [
                &[-24.0 / 17.0, 59.0 / 34.0, -4.0 / 17.0, -3.0 / 34.0],
                &[-0.5, 0.0, 0.5],
                &[4.0 / 43.0, -59.0 / 86.0, 0.0, 59.0 / 86.0, -4.0 / 43.0],
                &[3.0 / 98.0, 0.0, -59.0 / 98.0, 0.0, 32.0 / 49.0, -4.0 / 49.0],
            ];
            Some(CentralClosure::from_rows(&central_half_stencil(4)?, &norm, &rows, 2))
        }
        6 => {
            let norm = [
                13649.0 / 43200.0,
                12013.0 / 8640.0,
                2711.0 / 4320.0,
                5359.0 / 4320.0,
                7877.0 / 8640.0,
                43801.0 / 43200.0,
            ];
            let rows: [&[f64]; 6] = [
                &[
                    -21600.0 / 13649.0,
                    104009.0 / 54596.0,
                    30443.0 / 81894.0,
                    -33311.0 / 27298.0,
                    16863.0 / 27298.0,
                    -15025.0 / 163788.0,
                ],
                &[
                    -104009.0 / 240260.0,
                    0.0,
                    -311.0 / 72078.0,
                    20229.0 / 24026.0,
                    -24337.0 / 48052.0,
                    36661.0 / 360390.0,
                ],
                &[
                    -30443.0 / 162660.0,
                    311.0 / 32532.0,
                    0.0,
                    -11155.0 / 16266.0,
                    41287.0 / 32532.0,
                    -21999.0 / 54220.0,
                ],
                &[
                    33311.0 / 107180.0,
                    -20229.0 / 21436.0,
                    485.0 / 1398.0,
                    0.0,
                    4147.0 / 21436.0,
                    25427.0 / 321540.0,
                    72.0 / 5359.0,
                ],
                &[
                    -16863.0 / 78770.0,
                    24337.0 / 31508.0,
                    -41287.0 / 47262.0,
                    -4147.0 / 15754.0,
                    0.0,
                    342523.0 / 472620.0,
                    -1296.0 / 7877.0,
                    144.0 / 7877.0,
                ],
                &[
                    15025.0 / 525612.0,
                    -36661.0 / 262806.0,
                    21999.0 / 87602.0,
                    -25427.0 / 262806.0,
                    -342523.0 / 525612.0,
                    0.0,
                    32400.0 / 43801.0,
                    -6480.0 / 43801.0,
                    720.0 / 43801.0,
                ],
            ];
            Some(CentralClosure::from_rows(&central_half_stencil(6)?, &norm, &rows, 3))
        }
        _ => None,
    }
}

/// Solve for a closure of the given boundary order around an arbitrary
/// central interior stencil.
///
/// Unknowns are the `r = 2w` leading norm weights and the strictly upper part
/// of the skew block. The accuracy conditions on the boundary rows are linear
/// in these unknowns; the minimum-norm least-squares solution is taken and
/// accepted only if it is exact and yields a positive norm.
pub fn solve_central(half_stencil: &[f64], boundary_order: usize) -> Result<CentralClosure> {
    let w = half_stencil.len();
    if w == 0 {
        return Err(Error::Construction("empty interior stencil".into()));
    }
    let r = 2 * w;
    let pairs: Vec<(usize, usize)> = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).collect();
    let unknowns = r + pairs.len();
    let equations = r * (boundary_order + 1);
    let mut m = DMatrix::<f64>::zeros(equations, unknowns);
    let mut rhs = DVector::<f64>::zeros(equations);
    let mono = |x: usize, k: usize| if k == 0 { 1.0 } else { (x as f64).powi(k as i32) };
    for i in 0..r {
        for k in 0..=boundary_order {
            let e = i * (boundary_order + 1) + k;
            let mut b = 0.0;
            for j in r..=i + w {
                b -= half_stencil[j - i - 1] * mono(j, k);
            }
            if i == 0 {
                b += 0.5 * mono(0, k);
            }
            for (p, &(a, c)) in pairs.iter().enumerate() {
                if a == i {
                    m[(e, r + p)] += mono(c, k);
                }
                if c == i {
                    m[(e, r + p)] -= mono(a, k);
                }
            }
            if k >= 1 {
                m[(e, i)] -= k as f64 * mono(i, k - 1);
            }
            rhs[e] = b;
        }
    }
    let svd = m.clone().svd(true, true);
    let sol = svd
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::Construction(format!("closure solve: {e}")))?;
    let residual = (&m * &sol - &rhs).amax();
    if residual > 1e-10 {
        return Err(Error::Construction(format!(
            "accuracy conditions of order {boundary_order} cannot be met by a {r}-row closure (residual {residual:.2e})"
        )));
    }
    let norm_block: Vec<f64> = sol.iter().take(r).copied().collect();
    if let Some((i, &h)) = norm_block.iter().enumerate().find(|(_, &h)| h <= 0.0) {
        return Err(Error::Construction(format!("closure norm weight {i} is not positive ({h})")));
    }
    let mut q = DMatrix::zeros(r, r);
    for (p, &(a, c)) in pairs.iter().enumerate() {
        q[(a, c)] = sol[r + p];
        q[(c, a)] = -sol[r + p];
    }
    Ok(CentralClosure {
        half_stencil: half_stencil.to_vec(),
        norm_block,
        q_block: q,
        boundary_order,
    })
}
