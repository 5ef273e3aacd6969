//! Composite Gauss-Legendre quadrature for line integrals along polylines.

use crate::error::{Error, Result};

/// Order-8 Gauss-Legendre nodes and weights on [-1, 1].
pub const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];

pub const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// GL8 on a scalar function over [a, b].
pub fn gl8<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Adaptive bisection on top of GL8: refine until consecutive refinements
/// agree to `tol` (absolute, callers scale it), up to `max_depth` levels.
pub fn adaptive_gl8<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
    segment: usize,
) -> Result<f64> {
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: usize,
        segment: usize,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let left = gl8(f, a, m);
        let right = gl8(f, m, b);
        let refined = left + right;
        if (refined - whole).abs() <= tol {
            return Ok(refined);
        }
        if depth == 0 {
            return Err(Error::QuadratureDivergence {
                segment,
                delta: (refined - whole).abs(),
            });
        }
        let half_tol = 0.5 * tol;
        Ok(recurse(f, a, m, left, half_tol, depth - 1, segment)?
            + recurse(f, m, b, right, half_tol, depth - 1, segment)?)
    }
    let whole = gl8(f, a, b);
    recurse(f, a, b, whole, tol, max_depth, segment)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl8_exact_on_degree_15() {
        // order-8 Gauss quadrature integrates polynomials of degree <= 15 exactly
        let f = |x: f64| x.powi(15) + 3.0 * x.powi(7) - x * x + 2.0;
        let got = gl8(&f, -1.0, 2.0);
        let exact = |x: f64| x.powi(16) / 16.0 + 3.0 * x.powi(8) / 8.0 - x.powi(3) / 3.0 + 2.0 * x;
        assert!((got - (exact(2.0) - exact(-1.0))).abs() < 1e-11);
    }

    #[test]
    fn adaptive_handles_sharp_features() {
        let f = |x: f64| 1.0 / (1e-3 + x * x);
        let got = adaptive_gl8(&f, -1.0, 1.0, 1e-10, 30, 0).unwrap();
        let s = 1e-3f64.sqrt();
        let exact = 2.0 * (1.0 / s) * (1.0 / s).atan();
        assert!((got - exact).abs() < 1e-7, "{got} vs {exact}");
    }

    #[test]
    fn adaptive_reports_divergence() {
        // integrable but horrendous: 1/sqrt(|x|) with a tight budget
        let f = |x: f64| 1.0 / x.abs().sqrt().max(1e-300);
        let err = adaptive_gl8(&f, -1.0, 1.0, 1e-14, 3, 7);
        assert!(matches!(err, Err(Error::QuadratureDivergence { segment: 7, .. })));
    }
}
