//! Banded derivative matrices with dense boundary blocks.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// One stored row: coefficients for columns `start..start + coefs.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub start: usize,
    pub coefs: Vec<f64>,
}

/// Translation-invariant interior stencil: `(Df)_j = sum_c coefs[c] f_{j + offset + c}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    pub offset: isize,
    pub coefs: Vec<f64>,
}

/// Derivative operator on `len` nodes: explicit leading and trailing rows, a
/// shared interior stencil in between.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedOperator {
    len: usize,
    left: Vec<Row>,
    right: Vec<Row>,
    interior: Stencil,
}

/// Operations along one axis of a row-major 3D array are reduced to
/// `outer x len x inner` with the differentiated axis in the middle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxisLayout {
    pub outer: usize,
    pub len: usize,
    pub inner: usize,
}

impl AxisLayout {
    pub fn new(dims: [usize; 3], axis: usize) -> Self {
        match axis {
            0 => Self { outer: 1, len: dims[0], inner: dims[1] * dims[2] },
            1 => Self { outer: dims[0], len: dims[1], inner: dims[2] },
            _ => Self { outer: dims[0] * dims[1], len: dims[2], inner: 1 },
        }
    }
}

fn trimmed(row: &[f64]) -> Row {
    let first = row.iter().position(|&c| c != 0.0);
    match first {
        None => Row { start: 0, coefs: Vec::new() },
        Some(f) => {
            let last = row.iter().rposition(|&c| c != 0.0).unwrap_or(f);
            Row { start: f, coefs: row[f..=last].to_vec() }
        }
    }
}

impl BandedOperator {
    /// Compress a dense matrix, scaling every entry by `scale`.
    ///
    /// The interior stencil is read from the middle row; boundary rows are all
    /// rows outside the longest run around the middle that repeats it exactly.
    pub fn from_dense(dense: &DMatrix<f64>, scale: f64) -> Result<Self> {
        let len = dense.nrows();
        if dense.ncols() != len || len < 3 {
            return Err(Error::Malformed("derivative matrix must be square with at least 3 rows".into()));
        }
        let rows: Vec<Row> = (0..len)
            .map(|i| {
                let r: Vec<f64> = dense.row(i).iter().map(|&c| c * scale).collect();
                trimmed(&r)
            })
            .collect();
        let mid = len / 2;
        let interior = Stencil {
            offset: rows[mid].start as isize - mid as isize,
            coefs: rows[mid].coefs.clone(),
        };
        let matches = |i: usize| {
            let r = &rows[i];
            r.start as isize - i as isize == interior.offset && r.coefs == interior.coefs
        };
        let mut lo = mid;
        while lo > 0 && matches(lo - 1) {
            lo -= 1;
        }
        let mut hi = mid;
        while hi + 1 < len && matches(hi + 1) {
            hi += 1;
        }
        let left = rows[..lo].to_vec();
        let right = rows[hi + 1..].to_vec();
        let op = Self { len, left, right, interior };
        op.check_bounds()?;
        Ok(op)
    }

    pub fn from_parts(len: usize, left: Vec<Row>, interior: Stencil, right: Vec<Row>) -> Result<Self> {
        let op = Self { len, left, right, interior };
        op.check_bounds()?;
        Ok(op)
    }

    fn check_bounds(&self) -> Result<()> {
        if self.left.len() + self.right.len() > self.len {
            return Err(Error::Malformed("boundary blocks overlap".into()));
        }
        for i in 0..self.len {
            let (start, coefs) = self.row(i);
            if start + coefs.len() > self.len {
                return Err(Error::Malformed(format!("row {i} reaches past the last node")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn left_rows(&self) -> &[Row] {
        &self.left
    }

    pub fn right_rows(&self) -> &[Row] {
        &self.right
    }

    pub fn interior(&self) -> &Stencil {
        &self.interior
    }

    /// Start column and coefficients of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (usize, &[f64]) {
        if i < self.left.len() {
            let r = &self.left[i];
            (r.start, &r.coefs)
        } else if i >= self.len - self.right.len() {
            let r = &self.right[i + self.right.len() - self.len];
            (r.start, &r.coefs)
        } else {
            ((i as isize + self.interior.offset) as usize, &self.interior.coefs)
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.len, self.len);
        for i in 0..self.len {
            let (start, coefs) = self.row(i);
            for (c, &w) in coefs.iter().enumerate() {
                m[(i, start + c)] = w;
            }
        }
        m
    }

    /// `out = D f` for contiguous vectors.
    pub fn apply(&self, f: &[f64], out: &mut [f64]) {
        debug_assert_eq!(f.len(), self.len);
        for (i, o) in out.iter_mut().enumerate().take(self.len) {
            let (start, coefs) = self.row(i);
            *o = coefs.iter().zip(&f[start..]).map(|(w, x)| w * x).sum();
        }
    }

    /// `out (+)= D f` along the middle axis of an `outer x len x inner` array.
    pub fn apply_layout(&self, layout: AxisLayout, f: &[f64], out: &mut [f64], accumulate: bool) {
        let AxisLayout { outer, len, inner } = layout;
        debug_assert_eq!(len, self.len);
        let block = len * inner;
        if inner == 1 {
            for o in 0..outer {
                let src = &f[o * block..(o + 1) * block];
                let dst = &mut out[o * block..(o + 1) * block];
                for (i, d) in dst.iter_mut().enumerate() {
                    let (start, coefs) = self.row(i);
                    let v: f64 = coefs.iter().zip(&src[start..]).map(|(w, x)| w * x).sum();
                    if accumulate {
                        *d += v;
                    } else {
                        *d = v;
                    }
                }
            }
            return;
        }
        for o in 0..outer {
            let base = o * block;
            for i in 0..len {
                let (start, coefs) = self.row(i);
                let dst = &mut out[base + i * inner..base + (i + 1) * inner];
                if !accumulate {
                    dst.fill(0.0);
                }
                for (c, &w) in coefs.iter().enumerate() {
                    let s0 = base + (start + c) * inner;
                    let src = &f[s0..s0 + inner];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += w * s;
                    }
                }
            }
        }
    }
}
