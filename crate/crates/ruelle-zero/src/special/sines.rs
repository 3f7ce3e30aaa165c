use std::f64::consts::PI;

use super::magnitude::FactoredMagnitude;
use crate::{Error, Result};

/// ∏_{ℓ=1}^{ν} sin((ℓ − x)π/ν), evaluated directly.
pub fn sine_product(nu: u32, x: f64) -> Result<f64> {
    if nu < 2 {
        return Err(Error::InvalidInput(format!("sine product needs ν ≥ 2, got {nu}")));
    }
    let nf = nu as f64;
    Ok((1..=nu).map(|l| sin_pi_over(l as f64, x, nf)).product())
}

/// The closed form 2^{1−ν} sin(πx) of the same product.
pub fn sine_product_closed(nu: u32, x: f64) -> f64 {
    (1.0 - nu as f64).exp2() * sin_pi(x)
}

/// sin πx with the argument reduced to |r| ≤ 1/2 first, so the result keeps
/// relative accuracy near integers.
fn sin_pi(x: f64) -> f64 {
    -sin_pi_over(0.0, x, 1.0)
}

/// sin(π(l − x)/ν), reduced modulo ν with the integer shift taken off l
/// before x is subtracted, so no rounding happens near a zero.
fn sin_pi_over(l: f64, x: f64, nu: f64) -> f64 {
    let n = ((l - x) / nu).round();
    let sign = if n.rem_euclid(2.0) == 0.0 { 1.0 } else { -1.0 };
    sign * (PI * (((l - n * nu) - x) / nu)).sin()
}

/// ∏_{ℓ≠n} sin((ℓ − n)π/ν) = (−1)^{n−1} ν 2^{1−ν}, returned as (sign, magnitude).
pub fn sine_product_integer(nu: u32, n: u32) -> Result<(i8, FactoredMagnitude)> {
    if nu < 2 || n < 1 || n > nu {
        return Err(Error::InvalidInput(format!("need 1 ≤ n ≤ ν with ν ≥ 2, got n={n}, ν={nu}")));
    }
    let sign = if n % 2 == 1 { 1 } else { -1 };
    let mag = FactoredMagnitude::integer(nu as u64)? * FactoredMagnitude::integer(2)?.powi(1 - nu as i64);
    Ok((sign, mag))
}

/// Direct numeric product ∏_{ℓ≠n} sin((ℓ − n)π/ν).
pub fn sine_product_integer_direct(nu: u32, n: u32) -> f64 {
    let nf = nu as f64;
    (1..=nu).filter(|&l| l != n).map(|l| sin_pi_over(l as f64, n as f64, nf)).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_values() {
        assert!((sine_product(2, 0.5).unwrap() - 0.5).abs() < 1e-15);
        let v = sine_product(3, 0.25).unwrap();
        assert!((v - 0.25 * (PI / 4.0).sin()).abs() < 1e-15);
        assert!((sine_product(5, 0.3).unwrap() - (0.3 * PI).sin() / 16.0).abs() < 1e-15);
        let (s, m) = sine_product_integer(3, 1).unwrap();
        assert_eq!(s, 1);
        assert_eq!(m, FactoredMagnitude::rational(3, 4).unwrap());
        let (s, m) = sine_product_integer(2, 2).unwrap();
        assert_eq!((s, m.eval()), (-1, 1.0));
        let (s, m) = sine_product_integer(4, 1).unwrap();
        assert_eq!(s, 1);
        assert!((m.eval() - 0.5).abs() < 1e-15);
        assert!(sine_product_integer(4, 5).is_err());
    }

    proptest! {
        #[test]
        fn continuity_at_integers(nu in 2u32..40, n_off in 0u32..40, h in 1e-9f64..1e-7) {
            let n = 1 + n_off % nu;
            let x = n as f64 + h;
            let ratio = sine_product(nu, x).unwrap() / ((n as f64 - x) * PI / nu as f64).sin();
            let (sign, mag) = sine_product_integer(nu, n).unwrap();
            let exact = sign as f64 * mag.eval();
            prop_assert!((ratio / exact - 1.0).abs() < 1e-4);
            prop_assert!((sine_product_integer_direct(nu, n) / exact - 1.0).abs() < 1e-12);
        }
    }
}
