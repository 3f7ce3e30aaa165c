use num_complex::Complex64;

use super::{log_gamma, CompensatedSum, BERNOULLI_EVEN};
use crate::{Error, Result};

/// Hurwitz zeta ζ(s, a) for real s > 1 and a ∈ (0, 1].
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    if !(s > 1.0) || !(a > 0.0 && a <= 1.0) {
        return Err(Error::Domain(
            Complex64::new(s, 0.0),
            format!("hurwitz_zeta needs s > 1 and a in (0,1], got a = {a}"),
        ));
    }
    Ok(euler_maclaurin(Complex64::new(s, 0.0), a).re)
}

/// Hurwitz zeta ζ(s, a) for complex s ≠ 1 and real a > 0, via Euler–Maclaurin.
pub fn hurwitz_zeta_complex(s: Complex64, a: f64) -> Result<Complex64> {
    if !(a > 0.0) {
        return Err(Error::Domain(s, format!("hurwitz_zeta needs a > 0, got {a}")));
    }
    if (s - 1.0).norm() < 1e-12 {
        return Err(Error::PoleAt(s));
    }
    Ok(euler_maclaurin(s, a))
}

/// Riemann zeta ζ(s) for complex s ≠ 1. The left half-plane goes through the
/// functional equation, which avoids the cancellation in the direct sum.
pub fn riemann_zeta_complex(s: Complex64) -> Result<Complex64> {
    if s.re >= 0.0 {
        return hurwitz_zeta_complex(s, 1.0);
    }
    let one_minus = Complex64::new(1.0, 0.0) - s;
    let z = hurwitz_zeta_complex(one_minus, 1.0)?;
    let pi = std::f64::consts::PI;
    let factor = (s * 2f64.ln() + (s - 1.0) * pi.ln() + log_gamma(one_minus)?).exp()
        * (s * (pi / 2.0)).sin();
    Ok(factor * z)
}

fn euler_maclaurin(s: Complex64, a: f64) -> Complex64 {
    let n = (20.0 + s.norm()).ceil();
    let mut sum = CompensatedSum::default();
    let mut j = 0.0;
    while j < n {
        sum.add((-s * (j + a).ln()).exp());
        j += 1.0;
    }
    let x = n + a;
    let lx = x.ln();
    let x_s = (-s * lx).exp();
    sum.add(x_s * x / (s - 1.0));
    sum.add(x_s * 0.5);
    // Σ B_{2k}/(2k)! · s(s+1)…(s+2k−2) · x^{−s−2k+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut pow = x_s / x;
    for (i, b) in BERNOULLI_EVEN.iter().enumerate() {
        let k = (i + 1) as f64;
        let term = rising * pow * (b / fact);
        sum.add(term);
        rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
        fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
        pow /= x * x;
    }
    sum.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn classical_values() {
        assert!((hurwitz_zeta(2.0, 1.0).unwrap() - PI * PI / 6.0).abs() < 1e-15);
        assert!((hurwitz_zeta(2.0, 0.5).unwrap() - PI * PI / 2.0).abs() < 1e-14);
        assert!((hurwitz_zeta(4.0, 1.0).unwrap() - PI.powi(4) / 90.0).abs() < 1e-15);
        // ζ(2, 1/4) = π² + 8G (Catalan)
        let catalan = 0.915_965_594_177_219_0;
        assert!((hurwitz_zeta(2.0, 0.25).unwrap() - (PI * PI + 8.0 * catalan)).abs() < 1e-13);
        assert!(hurwitz_zeta(1.0, 0.5).is_err());
    }

    #[test]
    fn direct_series_oracle() {
        // Σ (n+a)^{-2} with an integral tail estimate.
        for a in [0.1, 0.37, 0.9] {
            let m = 100_000;
            let mut acc = 0.0;
            for n in (0..m).rev() {
                acc += 1.0 / ((n as f64 + a) * (n as f64 + a));
            }
            let x = m as f64 + a;
            acc += 1.0 / x + 0.5 / (x * x) + 1.0 / (6.0 * x * x * x);
            assert!((hurwitz_zeta(2.0, a).unwrap() - acc).abs() < 1e-13);
        }
    }

    #[test]
    fn complex_values() {
        // ζ(0) = −1/2, ζ(−1) = −1/12, ζ(−2k) = 0
        let z0 = riemann_zeta_complex(Complex64::new(0.0, 0.0)).unwrap();
        assert!((z0 - Complex64::new(-0.5, 0.0)).norm() < 1e-14);
        let zm1 = riemann_zeta_complex(Complex64::new(-1.0, 0.0)).unwrap();
        assert!((zm1 + 1.0 / 12.0).norm() < 1e-12);
        let z4 = riemann_zeta_complex(Complex64::new(-4.0, 0.0)).unwrap();
        assert!(z4.norm() < 1e-10, "{z4}");
        // First nontrivial zero.
        let rho = Complex64::new(0.5, 14.134_725_141_734_694);
        assert!(riemann_zeta_complex(rho).unwrap().norm() < 1e-12);
        // ζ(s, 1/2) = (2^s − 1) ζ(s)
        let s = Complex64::new(-1.3, 2.2);
        let lhs = hurwitz_zeta_complex(s, 0.5).unwrap();
        let rhs = (s * 2f64.ln()).exp() - 1.0;
        assert!((lhs - rhs * riemann_zeta_complex(s).unwrap()).norm() < 1e-12);
    }
}
