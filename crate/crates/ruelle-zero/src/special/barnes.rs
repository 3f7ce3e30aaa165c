use num_complex::Complex64;

use super::{log_gamma, CompensatedSum, BERNOULLI_EVEN};
use crate::{Error, Result};

/// ζ'(−1) = 1/12 − log A (Glaisher–Kinkelin).
const ZETA_PRIME_MINUS_ONE: f64 = -0.165_421_143_700_450_93;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const SHIFT: f64 = 14.0;

/// log G(s) for the Barnes G-function, continued analytically along
/// G(s+1) = Γ(s)G(s) from the right half-plane. G is entire with zeros at
/// the non-positive integers; those are reported as [`Error::ZeroOfBarnesG`].
pub fn log_barnes_g(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(z, "non-finite argument".into()));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::ZeroOfBarnesG(z));
    }
    let mut w = z;
    let mut shift = CompensatedSum::default();
    while w.re < SHIFT {
        shift.add(log_gamma(w)?);
        w += 1.0;
    }
    Ok(asymptotic(w - 1.0) - shift.value())
}

/// log G(u + 1) for large u.
fn asymptotic(u: Complex64) -> Complex64 {
    let lu = u.ln();
    let u2 = u * u;
    let inv2 = u2.inv();
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv2;
    for k in 1..=10usize {
        let b = BERNOULLI_EVEN[k];
        series += pow * (b / (4.0 * (k * (k + 1)) as f64));
        pow *= inv2;
    }
    (u2 * 0.5 - 1.0 / 12.0) * lu - u2 * 0.75 + u * HALF_LN_2PI + ZETA_PRIME_MINUS_ONE + series
}

#[cfg(test)]
mod tests {
    use super::super::EULER_GAMMA;
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// log G(s+1) from the Weierstrass product with a tail correction; slow.
    fn product_oracle(s: f64) -> f64 {
        let terms = 200_000u32;
        let mut acc = 0.0;
        for n in 1..=terms {
            let n = n as f64;
            acc += n * (s / n).ln_1p() - s + s * s / (2.0 * n);
        }
        // Tail Σ_{n>M} [s³/(3n²) − s⁴/(4n³) + s⁵/(5n⁴)], integrals with midpoint shift.
        let m = terms as f64 + 0.5;
        acc += s.powi(3) / (3.0 * m) - s.powi(4) / (8.0 * m * m) + s.powi(5) / (15.0 * m.powi(3));
        0.5 * s * (2.0 * PI).ln() - 0.5 * s * (s + 1.0) - 0.5 * EULER_GAMMA * s * s + acc
    }

    #[test]
    fn integer_values() {
        for (n, v) in [(1.0, 0.0), (2.0, 0.0), (3.0, 0.0), (4.0, 2f64.ln()), (5.0, 12f64.ln()), (6.0, 288f64.ln())] {
            let g = log_barnes_g(c(n, 0.0)).unwrap();
            assert!((g - c(v, 0.0)).norm() < 1e-13, "G({n}) = {g}");
        }
        assert!(matches!(log_barnes_g(c(0.0, 0.0)), Err(Error::ZeroOfBarnesG(_))));
        assert!(matches!(log_barnes_g(c(-2.0, 0.0)), Err(Error::ZeroOfBarnesG(_))));
    }

    #[test]
    fn half_matches_product_definition() {
        // G(1/2) = G(3/2) / Γ(1/2)
        let oracle = product_oracle(0.5) - 0.5 * PI.ln();
        let g = log_barnes_g(c(0.5, 0.0)).unwrap();
        assert!((g.re - oracle).abs() < 1e-10, "{} vs {}", g.re, oracle);
        assert!(g.im.abs() < 1e-15);
        // Known closed value: log G(1/2) = (1/24) log 2 + 3ζ'(−1)/2 − (1/4) log π
        let closed = 2f64.ln() / 24.0 + 1.5 * ZETA_PRIME_MINUS_ONE - 0.25 * PI.ln();
        assert!((g.re - closed).abs() < 1e-13);
    }

    #[test]
    fn product_oracle_at_other_points() {
        for s in [0.25, 1.3, 2.7] {
            let g = log_barnes_g(c(s + 1.0, 0.0)).unwrap();
            assert!((g.re - product_oracle(s)).abs() < 1e-9, "s={s}");
        }
    }

    proptest! {
        #[test]
        fn recursion(re in -15.0f64..15.0, im in 0.02f64..8.0, flip in proptest::bool::ANY) {
            let s = c(re, if flip { -im } else { im });
            let d = log_barnes_g(s + 1.0).unwrap() - log_barnes_g(s).unwrap() - log_gamma(s).unwrap();
            let k = (d.im / (2.0 * PI)).round();
            let scale = 1.0 + log_barnes_g(s).unwrap().norm();
            prop_assert!(d.re.abs() < 1e-10 * scale);
            prop_assert!((d.im - 2.0 * PI * k).abs() < 1e-10 * scale);
        }

        #[test]
        fn conjugation_symmetry(re in -10.0f64..10.0, im in 0.02f64..8.0) {
            let s = c(re, im);
            let a = log_barnes_g(s).unwrap();
            let b = log_barnes_g(s.conj()).unwrap();
            prop_assert!((a - b.conj()).norm() < 1e-10 * (1.0 + a.norm()));
        }
    }
}
