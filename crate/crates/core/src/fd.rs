//! Central finite-difference oracle for jet derivatives.

use alloc::vec::Vec;

use crate::error::Result;
use crate::jet::Jet;
use crate::residual::{ResidualAccumulator, ResidualSummary};

/// Default central-difference step.
pub const DEFAULT_STEP: f64 = 1e-4;

/// Relative errors of first and second jet derivatives against central
/// differences. Each entry is `|jet - fd| / max(|jet|, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdReport {
    pub d1: ResidualSummary,
    pub d2: ResidualSummary,
}

impl FdReport {
    pub fn combined(&self) -> ResidualSummary {
        self.d1.merge(&self.d2)
    }
}

fn rel(jet: f64, fd: f64) -> f64 {
    libm::fabs(jet - fd) / libm::fabs(jet).max(1.0)
}

/// Compare the order-2 jet of `f` at `x0` with central differences of step
/// `h`. `f` receives coordinate jets and must return a scalar jet.
pub fn finite_difference_check<F>(f: F, x0: &[f64], h: f64) -> Result<FdReport>
where
    F: Fn(&[Jet]) -> Result<Jet>,
{
    let n = x0.len();
    let jet = f(&Jet::coordinates(x0, 2))?;
    let value_at = |x: &[f64]| -> Result<f64> { Ok(f(&Jet::coordinates(x, 0))?.value()) };
    let f0 = value_at(x0)?;
    let shifted = |steps: &[(usize, f64)]| -> Result<f64> {
        let mut x: Vec<f64> = x0.to_vec();
        for &(i, s) in steps {
            x[i] += s;
        }
        value_at(&x)
    };
    let mut d1 = ResidualAccumulator::default();
    let mut d2 = ResidualAccumulator::default();
    for i in 0..n {
        let fp = shifted(&[(i, h)])?;
        let fm = shifted(&[(i, -h)])?;
        d1.push(rel(jet.d1(i), (fp - fm) / (2.0 * h)));
        d2.push(rel(jet.d2(i, i), (fp - 2.0 * f0 + fm) / (h * h)));
        for j in i + 1..n {
            let fpp = shifted(&[(i, h), (j, h)])?;
            let fpm = shifted(&[(i, h), (j, -h)])?;
            let fmp = shifted(&[(i, -h), (j, h)])?;
            let fmm = shifted(&[(i, -h), (j, -h)])?;
            d2.push(rel(jet.d2(i, j), (fpp - fpm - fmp + fmm) / (4.0 * h * h)));
        }
    }
    Ok(FdReport {
        d1: d1.finish(),
        d2: d2.finish(),
    })
}
