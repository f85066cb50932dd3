//! The G₂ 3-form on ℝ⁷ and its cross product.

use alloc::vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::forms::{multi_index_rank, FormValue};

/// `φ = e123 + e145 + e167 + e246 − e257 − e347 − e356` (zero-based indices).
pub const PHI_TERMS: [(usize, usize, usize, f64); 7] = [
    (0, 1, 2, 1.0),
    (0, 3, 4, 1.0),
    (0, 5, 6, 1.0),
    (1, 3, 5, 1.0),
    (1, 4, 6, -1.0),
    (2, 3, 6, -1.0),
    (2, 4, 5, -1.0),
];

pub fn phi() -> FormValue {
    let mut comps = vec![0.0; 35];
    for &(i, j, k, s) in &PHI_TERMS {
        comps[multi_index_rank(7, &[i, j, k])] = s;
    }
    FormValue {
        dim: 7,
        degree: 3,
        comps,
    }
}

/// `(x × y)_k = φ(x, y, e_k)`.
pub fn cross(x: &[f64; 7], y: &[f64; 7]) -> [f64; 7] {
    let mut out = [0.0; 7];
    for &(i, j, k, s) in &PHI_TERMS {
        // all six orderings of (i, j, k) with their signs
        for &(a, b, c, p) in &[
            (i, j, k, 1.0),
            (j, k, i, 1.0),
            (k, i, j, 1.0),
            (j, i, k, -1.0),
            (i, k, j, -1.0),
            (k, j, i, -1.0),
        ] {
            out[c] += s * p * x[a] * y[b];
        }
    }
    out
}

/// Largest violation of `|x×y|² = |x|²|y|² − ⟨x,y⟩²` over random pairs.
pub fn cross_product_residual(samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let dot = |a: &[f64; 7], b: &[f64; 7]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    for _ in 0..samples {
        let mut x = [0.0; 7];
        let mut y = [0.0; 7];
        for i in 0..7 {
            x[i] = rng.gen_range(-1.0..1.0);
            y[i] = rng.gen_range(-1.0..1.0);
        }
        let c = cross(&x, &y);
        let lhs = dot(&c, &c);
        let rhs = dot(&x, &x) * dot(&y, &y) - dot(&x, &y) * dot(&x, &y);
        worst = worst.max(libm::fabs(lhs - rhs));
    }
    worst
}

/// Unit vectors `e_i` for tests and tables.
pub fn basis(i: usize) -> [f64; 7] {
    let mut e = [0.0; 7];
    e[i] = 1.0;
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_product_is_normed() {
        assert!(cross_product_residual(200, 11) < 1e-12);
    }

    #[test]
    fn e1_cross_e2_is_e3() {
        assert_eq!(cross(&basis(0), &basis(1)), basis(2));
        let c = cross(&basis(1), &basis(0));
        assert_eq!(c[2], -1.0);
    }

    #[test]
    fn phi_evaluates_on_frames() {
        let p = phi();
        let v = p
            .eval(&[&basis(1)[..], &basis(4)[..], &basis(6)[..]])
            .unwrap();
        assert_eq!(v, -1.0);
    }
}
