//! Small dense linear algebra over plain values and jets.
//!
//! Matrices are row-major `Vec`s. Pivoting always uses the value part, so a
//! jet-valued elimination differentiates the value-level algorithm exactly.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{GeomError, Result};
use crate::jet::Jet;

/// Scalar coefficient usable in forms and matrices: `f64` or [`Jet`].
pub trait Coeff: Clone + core::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn constant_like(&self, v: f64) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn scaled(&self, s: f64) -> Self;
    fn val(&self) -> f64;
    fn inverse(&self) -> Result<Self>;
    fn root(&self) -> Result<Self>;
    fn accumulate(&mut self, o: &Self);
    fn is_zero(&self) -> bool;
}

impl Coeff for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn constant_like(&self, v: f64) -> Self {
        v
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn scaled(&self, s: f64) -> Self {
        self * s
    }
    fn val(&self) -> f64 {
        *self
    }
    fn inverse(&self) -> Result<Self> {
        if *self == 0.0 {
            return Err(GeomError::Domain {
                op: "div",
                value: 0.0,
                point: Vec::new(),
            });
        }
        Ok(1.0 / self)
    }
    fn root(&self) -> Result<Self> {
        if *self <= 0.0 {
            return Err(GeomError::Domain {
                op: "sqrt",
                value: *self,
                point: Vec::new(),
            });
        }
        Ok(libm::sqrt(*self))
    }
    fn accumulate(&mut self, o: &Self) {
        *self += o;
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Coeff for Jet {
    fn zero_like(&self) -> Self {
        Jet::constant(self.nvars(), self.order(), 0.0)
    }
    fn constant_like(&self, v: f64) -> Self {
        Jet::constant(self.nvars(), self.order(), v)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self.mul_jet(o)
    }
    fn scaled(&self, s: f64) -> Self {
        self.scale(s)
    }
    fn val(&self) -> f64 {
        self.value()
    }
    fn inverse(&self) -> Result<Self> {
        self.recip()
    }
    fn root(&self) -> Result<Self> {
        self.sqrt()
    }
    fn accumulate(&mut self, o: &Self) {
        *self += o;
    }
    fn is_zero(&self) -> bool {
        Jet::is_zero(self)
    }
}

/// Determinant of a small square matrix by cofactor expansion over column
/// subsets (`O(2^k k)` products). Exact for jets whose values are singular,
/// unlike elimination.
pub fn small_determinant<T: Coeff>(m: &[T], k: usize) -> T {
    assert_eq!(m.len(), k * k);
    assert!((1..=16).contains(&k));
    let full = (1usize << k) - 1;
    let mut table: Vec<Option<T>> = vec![None; 1 << k];
    table[0] = Some(m[0].constant_like(1.0));
    for mask in 1..=full {
        let r = mask.count_ones() as usize - 1;
        let mut acc = m[0].zero_like();
        for c in 0..k {
            if mask & (1 << c) == 0 {
                continue;
            }
            let entry = &m[r * k + c];
            if entry.is_zero() {
                continue;
            }
            let rest = table[mask & !(1 << c)].as_ref().unwrap();
            let greater = (mask >> (c + 1)).count_ones();
            let t = entry.times(rest);
            if greater % 2 == 0 {
                acc.accumulate(&t);
            } else {
                acc = acc.minus(&t);
            }
        }
        table[mask] = Some(acc);
    }
    table[full].take().unwrap()
}

/// Relative pivot threshold below which a matrix is declared singular.
pub const SINGULAR_PIVOT: f64 = 1e-13;

/// Gauss–Jordan inverse with partial pivoting on values.
pub fn inverse<T: Coeff>(m: &[T], n: usize) -> Result<Vec<T>> {
    assert_eq!(m.len(), n * n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let scale = m.iter().map(|v| libm::fabs(v.val())).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(GeomError::SingularMetric { point: Vec::new() });
    }
    let mut a: Vec<T> = m.to_vec();
    let zero = m[0].zero_like();
    let one = m[0].constant_like(1.0);
    let mut inv: Vec<T> = (0..n * n)
        .map(|i| if i / n == i % n { one.clone() } else { zero.clone() })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&r, &s| {
                libm::fabs(a[r * n + col].val()).total_cmp(&libm::fabs(a[s * n + col].val()))
            })
            .unwrap();
        if libm::fabs(a[piv * n + col].val()) <= SINGULAR_PIVOT * scale {
            return Err(GeomError::SingularMetric { point: Vec::new() });
        }
        if piv != col {
            for j in 0..n {
                a.swap(piv * n + j, col * n + j);
                inv.swap(piv * n + j, col * n + j);
            }
        }
        let p = a[col * n + col].inverse()?;
        for j in 0..n {
            a[col * n + j] = a[col * n + j].times(&p);
            inv[col * n + j] = inv[col * n + j].times(&p);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r * n + col].clone();
            for j in 0..n {
                let t = f.times(&a[col * n + j]);
                a[r * n + j] = a[r * n + j].minus(&t);
                let t = f.times(&inv[col * n + j]);
                inv[r * n + j] = inv[r * n + j].minus(&t);
            }
        }
    }
    Ok(inv)
}

/// Determinant by elimination with partial pivoting on values. A column with
/// vanishing values is reported as singular.
pub fn determinant<T: Coeff>(m: &[T], n: usize) -> Result<T> {
    assert_eq!(m.len(), n * n);
    if n == 0 {
        return Err(GeomError::InvalidParameter("empty matrix".into()));
    }
    let mut a = m.to_vec();
    let mut det = m[0].constant_like(1.0);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&r, &s| {
                libm::fabs(a[r * n + col].val()).total_cmp(&libm::fabs(a[s * n + col].val()))
            })
            .unwrap();
        if a[piv * n + col].val() == 0.0 {
            return Err(GeomError::SingularMetric { point: Vec::new() });
        }
        if piv != col {
            for j in 0..n {
                a.swap(piv * n + j, col * n + j);
            }
            det = det.scaled(-1.0);
        }
        det = det.times(&a[col * n + col]);
        let p = a[col * n + col].inverse()?;
        for r in col + 1..n {
            let f = a[r * n + col].times(&p);
            for j in col..n {
                let t = f.times(&a[col * n + j]);
                a[r * n + j] = a[r * n + j].minus(&t);
            }
        }
    }
    Ok(det)
}

/// Solve `m x = rhs` (square, pivoting on values).
pub fn solve<T: Coeff>(m: &[T], n: usize, rhs: &[T]) -> Result<Vec<T>> {
    let inv = inverse(m, n)?;
    Ok((0..n)
        .map(|i| {
            let mut s = rhs[0].zero_like();
            for j in 0..n {
                s.accumulate(&inv[i * n + j].times(&rhs[j]));
            }
            s
        })
        .collect())
}

pub fn mat_values(m: &[Jet]) -> Vec<f64> {
    m.iter().map(Jet::value).collect()
}

pub fn to_dmatrix(m: &[f64], rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(rows, cols, m)
}

/// Columns of the returned matrix form a `g`-orthonormal basis obtained by
/// Gram–Schmidt on the coordinate basis.
pub fn orthonormal_frame(g: &[f64], n: usize) -> Result<DMatrix<f64>> {
    let mut frame = DMatrix::<f64>::zeros(n, n);
    let ip = |a: &[f64], b: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += a[i] * g[i * n + j] * b[j];
            }
        }
        s
    };
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    for c in 0..n {
        let mut v = vec![0.0; n];
        v[c] = 1.0;
        // two passes for stability
        for _ in 0..2 {
            for b in &basis {
                let p = ip(&v, b);
                for i in 0..n {
                    v[i] -= p * b[i];
                }
            }
        }
        let nrm2 = ip(&v, &v);
        if !(nrm2 > 0.0) {
            return Err(GeomError::SingularMetric { point: Vec::new() });
        }
        let nrm = libm::sqrt(nrm2);
        for x in v.iter_mut() {
            *x /= nrm;
        }
        basis.push(v);
    }
    for (c, b) in basis.iter().enumerate() {
        for r in 0..n {
            frame[(r, c)] = b[r];
        }
    }
    Ok(frame)
}

pub fn symmetric_eigenvalues(m: &[f64], n: usize) -> Vec<f64> {
    let mut dm = to_dmatrix(m, n, n);
    // symmetrise against rounding
    let t = dm.transpose();
    dm = (dm + t) * 0.5;
    let mut ev: Vec<f64> = dm.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Numerical rank: singular values at or below `rel_tol * largest` count as
/// zero, and a matrix whose largest singular value is below `abs_floor` has
/// rank zero.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64, abs_floor: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let largest = sv.iter().copied().fold(0.0, f64::max);
    if largest < abs_floor {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * largest).count()
}

/// Orthonormal basis (as columns) of the approximate null space of `m`:
/// right singular vectors whose singular value is at most `threshold`.
pub fn null_space(m: &DMatrix<f64>, threshold: f64) -> DMatrix<f64> {
    let cols = m.ncols();
    // pad to at least `cols` rows so that every right singular vector is returned
    let padded = if m.nrows() < cols {
        let mut p = DMatrix::<f64>::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= threshold)
        .collect();
    let mut out = DMatrix::<f64>::zeros(cols, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        for r in 0..cols {
            out[(r, c)] = vt[(i, r)];
        }
    }
    out
}
