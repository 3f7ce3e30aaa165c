use num_complex::Complex64;

use super::{CompensatedSum, BERNOULLI_EVEN};
use crate::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const SHIFT: f64 = 14.0;

/// Analytic log Γ on ℂ \ (−∞, 0], continued to the negative real axis from
/// above. Agrees with the principal branch of log Γ on the positive axis.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(z, "non-finite argument".into()));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::PoleAt(z));
    }
    let mut w = z;
    let mut shift = CompensatedSum::default();
    while w.re < SHIFT {
        shift.add(w.ln());
        w += 1.0;
    }
    Ok(stirling(w) - shift.value())
}

fn stirling(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for (i, b) in BERNOULLI_EVEN.iter().take(10).enumerate() {
        let k = (i + 1) as f64;
        series += pow * (b / (2.0 * k * (2.0 * k - 1.0)));
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + HALF_LN_2PI + series
}

/// Digamma ψ(x) for real x > 0.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(Complex64::new(x, 0.0), "digamma needs x > 0".into()));
    }
    let mut w = x;
    let mut shift = 0.0;
    let mut comp = 0.0;
    while w < SHIFT {
        let t = shift - 1.0 / w;
        comp += if shift.abs() >= (1.0 / w) { (shift - t) - 1.0 / w } else { (-1.0 / w - t) + shift };
        shift = t;
        w += 1.0;
    }
    let inv2 = 1.0 / (w * w);
    let mut series = 0.0;
    let mut pow = inv2;
    for (i, b) in BERNOULLI_EVEN.iter().take(10).enumerate() {
        let k = (i + 1) as f64;
        series += b / (2.0 * k) * pow;
        pow *= inv2;
    }
    Ok(w.ln() - 0.5 / w - series + shift + comp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn known_values() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-14);
        assert!((log_gamma(c(0.5, 0.0)).unwrap() - c(0.5 * PI.ln(), 0.0)).norm() < 1e-14);
        assert!((log_gamma(c(5.0, 0.0)).unwrap().re - 24f64.ln()).abs() < 1e-14 * 24f64.ln());
        assert!((log_gamma(c(101.0, 0.0)).unwrap().re - 363.739_375_555_563_5).abs() < 1e-11);
        assert!(matches!(log_gamma(c(-3.0, 0.0)), Err(Error::PoleAt(_))));
    }

    #[test]
    fn digamma_values() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-14);
        let half = -EULER_GAMMA - 2.0 * 2f64.ln();
        assert!((digamma(0.5).unwrap() - half).abs() < 1e-14);
        // ψ(x+1) = ψ(x) + 1/x
        assert!((digamma(3.7).unwrap() - digamma(2.7).unwrap() - 1.0 / 2.7).abs() < 1e-14);
    }

    #[test]
    fn imaginary_axis_modulus() {
        // |Γ(iy)|² = π / (y sinh πy)
        for y in [0.3, 1.0, 4.5, 20.0] {
            let lg = log_gamma(c(0.0, y)).unwrap();
            let expect = 0.5 * (PI / (y * (PI * y).sinh())).ln();
            assert!((lg.re - expect).abs() < 1e-12, "y={y}");
        }
    }

    proptest! {
        #[test]
        fn multiplication_formula(re in 0.05f64..30.0, im in -30.0f64..30.0, n in 2u32..=8) {
            let s = c(re, im);
            let nf = n as f64;
            let lhs = log_gamma(s).unwrap();
            let mut rhs = (1.0 - nf) / 2.0 * (2.0 * PI).ln() + (s - 0.5) * nf.ln();
            for l in 0..n {
                rhs += log_gamma((s + l as f64) / nf).unwrap();
            }
            let d = lhs - rhs;
            let k = (d.im / (2.0 * PI)).round();
            prop_assert!(d.re.abs() < 1e-10 * (1.0 + lhs.norm()));
            prop_assert!((d.im - 2.0 * PI * k).abs() < 1e-10 * (1.0 + lhs.norm()));
        }

        #[test]
        fn reflection(re in -6.0f64..6.0, im in 0.05f64..6.0, sign in proptest::bool::ANY) {
            let s = c(re, if sign { im } else { -im });
            let d = log_gamma(s).unwrap() + log_gamma(1.0 - s).unwrap() - (PI / (s * PI).sin()).ln();
            let k = (d.im / (2.0 * PI)).round();
            prop_assert!(d.re.abs() < 1e-11);
            prop_assert!((d.im - 2.0 * PI * k).abs() < 1e-11);
        }

        #[test]
        fn recurrence_is_exact_on_the_cut_plane(re in -20.0f64..20.0, im in 0.01f64..10.0) {
            let s = c(re, im);
            let d = log_gamma(s + 1.0).unwrap() - log_gamma(s).unwrap() - s.ln();
            prop_assert!(d.norm() < 1e-11 * (1.0 + log_gamma(s).unwrap().norm()));
        }
    }
}
