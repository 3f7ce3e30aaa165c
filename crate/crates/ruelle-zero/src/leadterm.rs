//! Order and lead coefficient of R(s; χ) at s = 0.
//!
//! The squared limit is c(χ,Γ)^{−2} a_{n₀}^{−2} times the lead coefficient of
//! H₁ at 0, which is what [`h1_limit`] returns. For k = 0 a second, signed
//! evaluation goes through κ directly ([`lead_term_k0`]).

use std::f64::consts::PI;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::funceq::{beta_sine_product, c_chi_gamma, ScatteringData, TwistedSurface};
use crate::model::{Angle, MultiplierSystem, OrbifoldSignature};
use crate::special::{FactoredMagnitude, SignedMagnitude};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeadTermResult {
    /// ord_R(0).
    pub order: i64,
    /// |lim s^{−ord} R(s)|.
    pub magnitude: FactoredMagnitude,
    pub sign_known: bool,
    pub sign: Option<i8>,
}

impl LeadTermResult {
    pub fn value(&self) -> f64 {
        self.sign.unwrap_or(1) as f64 * self.magnitude.eval()
    }
}

/// m(2g−2+ρ+τ) − τ₀, the exponent of sin π(s+k) sin π(−s+k) in H₁.
fn h1_sine_exponent(t: &TwistedSurface) -> i64 {
    t.sine_exponent() - t.profile.tau0 as i64
}

/// ord_{H₁}(0): zero off the integers, 2(m(2g−2+ρ+τ) − τ₀ − τ̃₀) on them.
pub fn ord_h1_at_zero(t: &TwistedSurface) -> i64 {
    if t.profile.k_integral() {
        2 * (h1_sine_exponent(t) - t.profile.tilde_tau0 as i64)
    } else {
        0
    }
}

pub fn ord_r_at_zero(t: &TwistedSurface) -> i64 {
    -t.data.n0 + ord_h1_at_zero(t) / 2
}

/// lim_{s→0} s^{−ord_{H₁}(0)} H₁(s), exactly.
///
/// Off the integers every factor tends to a square of a real sine, so the
/// limit is positive. On the integers the vanishing factors contribute
/// (−π²s²)^{…}, which leaves the sign (−1)^{ord_{H₁}(0)/2}.
pub fn h1_limit(t: &TwistedSurface) -> Result<SignedMagnitude> {
    let k = t.ms.weight();
    let e1 = h1_sine_exponent(t);
    let tau0 = t.profile.tau0 as i64;
    let mut mag = FactoredMagnitude::pi().powi(tau0);
    let sign;
    match &t.profile.k_residues {
        None => {
            mag = mag * FactoredMagnitude::sin_pi(k)?.powi(2 * e1);
            for (j, &nu) in t.sig.elliptic_orders().iter().enumerate() {
                for l in 1..=nu as i64 {
                    let r = t.profile.r(j, l) as i64;
                    if r != 0 {
                        let q = (Rational64::from_integer(l) - k) / Rational64::from_integer(nu as i64);
                        mag = mag * FactoredMagnitude::sin_pi(q)?.powi(-2 * r);
                    }
                }
            }
            sign = 1;
        }
        Some(kj) => {
            let ord = ord_h1_at_zero(t);
            mag = mag * FactoredMagnitude::pi().powi(ord);
            for (j, (&nu, &kj)) in t.sig.elliptic_orders().iter().zip(kj).enumerate() {
                let rk = t.profile.r(j, kj as i64) as i64;
                mag = mag * FactoredMagnitude::integer(nu as u64)?.powi(2 * rk);
                for l in (1..=nu as i64).filter(|&l| l != kj as i64) {
                    let r = t.profile.r(j, l) as i64;
                    if r != 0 {
                        let q = (Rational64::from_integer(l) - k) / Rational64::from_integer(nu as i64);
                        mag = mag * FactoredMagnitude::sin_pi(q)?.powi(-2 * r);
                    }
                }
            }
            sign = if (ord / 2) % 2 == 0 { 1 } else { -1 };
        }
    }
    Ok(SignedMagnitude { sign: Some(sign), magnitude: mag })
}

/// (−1)^{ord_R(0)+n₀} times the sign of c^{−2}·lim s^{−ord}H₁; the squared
/// lead coefficient of R is positive exactly when this is +1.
pub fn squared_limit_sign(t: &TwistedSurface) -> Result<i8> {
    let parity = if (ord_r_at_zero(t) + t.data.n0).rem_euclid(2) == 0 { 1 } else { -1 };
    Ok(parity * h1_limit(t)?.sign.unwrap_or(1))
}

/// Lead term of R at s = 0 from the squared limit. The sign is left open.
pub fn lead_term(t: &TwistedSurface) -> Result<LeadTermResult> {
    if squared_limit_sign(t)? != 1 {
        return Err(Error::InvalidInput("sign bookkeeping of the squared limit is inconsistent".into()));
    }
    let c = c_chi_gamma(t)?.magnitude;
    let a = t.data.a_n0.magnitude.clone();
    let squared = (a * c).powi(-2) * h1_limit(t)?.magnitude;
    Ok(LeadTermResult { order: ord_r_at_zero(t), magnitude: squared.sqrt(), sign_known: false, sign: None })
}

/// Signed lead term for weight zero, evaluated through κ at s = 0.
pub fn lead_term_k0(t: &TwistedSurface) -> Result<LeadTermResult> {
    if !t.ms.weight().is_zero() {
        return Err(Error::InvalidInput(format!("weight-zero evaluation needs k = 0, got {}", t.ms.weight())));
    }
    let m = t.ms.dim() as i64;
    let g2 = 2 * t.sig.genus() as i64 - 2;
    let tau0 = t.profile.tau0 as i64;
    let tilde = t.profile.tilde_tau0 as i64;
    let da = t.data.d1.clone() * t.data.a_n0.clone();
    let pi_exp = Rational64::from_integer(t.sine_exponent() - tilde) - Rational64::new(tau0, 2);
    let mut mag = da.magnitude.inv() * FactoredMagnitude::integer(2)?.powi(m * g2) * FactoredMagnitude::pi().pow(pi_exp);
    for (j, &nu) in t.sig.elliptic_orders().iter().enumerate() {
        let r0 = t.profile.r(j, nu as i64) as i64;
        mag = mag * FactoredMagnitude::integer(nu as u64)?.powi(r0);
        for l in 1..nu as i64 {
            let r = t.profile.r(j, l) as i64;
            if r != 0 {
                mag = mag * FactoredMagnitude::sin_pi(Rational64::new(l, nu as i64))?.powi(-r);
            }
        }
    }
    mag = mag * beta_sine_product(t)?.inv();
    let sign = match (t.data.half_trace_exponent, da.sign) {
        (Some(h), Some(s)) => Some(if (h + tau0 + 1).rem_euclid(2) == 0 { s } else { -s }),
        _ => None,
    };
    Ok(LeadTermResult { order: ord_r_at_zero(t), magnitude: mag, sign_known: sign.is_some(), sign })
}

// ---------------------------------------------------------------------------
// Numerical certification of the orders on the real axis.

/// log|H₁(s)| for small real s > 0, summed factor by factor so that no
/// intermediate under- or overflows. Rational shifts are reduced mod 1
/// before s is added.
pub fn log_abs_h1_real(t: &TwistedSurface, s: f64) -> f64 {
    let k = t.ms.weight();
    let sp = |q: Rational64, d: f64| {
        let f = q - q.floor();
        (PI * (*f.numer() as f64 / *f.denom() as f64 + d)).sin().abs().ln()
    };
    let mut acc = h1_sine_exponent(t) as f64 * (sp(k, s) + sp(k, -s));
    for (j, &nu) in t.sig.elliptic_orders().iter().enumerate() {
        let nf = nu as f64;
        for l in 1..=nu as i64 {
            let r = t.profile.r(j, l) as f64;
            if r != 0.0 {
                let q = (Rational64::from_integer(l) - k) / Rational64::from_integer(nu as i64);
                acc -= r * (sp(q, -s / nf) + sp(q, s / nf));
            }
        }
    }
    let tau0 = t.profile.tau0 as f64;
    if tau0 != 0.0 {
        acc += tau0 * ((PI * s).sin() * (PI * s).cos() / s).abs().ln();
    }
    acc
}

/// Least-squares slope of log|H₁(s)| against log s.
pub fn observed_h1_order(t: &TwistedSurface, samples: &[f64]) -> f64 {
    let xs: Vec<f64> = samples.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|&s| log_abs_h1_real(t, s)).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

// ---------------------------------------------------------------------------
// k → 0 continuity.

/// A family χ_k of multiplier systems with fixed residues and angles.
#[derive(Clone, Debug)]
pub struct WeightFamily {
    pub sig: OrbifoldSignature,
    pub dim: u32,
    pub elliptic_residues: Vec<Vec<u32>>,
    pub parabolic_angles: Vec<Vec<Angle>>,
    pub data: ScatteringData,
}

impl WeightFamily {
    pub fn at(&self, k: Rational64) -> Result<TwistedSurface> {
        let ms = MultiplierSystem::new_continuous_weight(
            &self.sig,
            self.dim,
            k,
            self.elliptic_residues.clone(),
            self.parabolic_angles.clone(),
        )?;
        TwistedSurface::new(self.sig.clone(), ms, self.data.clone())
    }

    /// m(2g−2+ρ+τ) − τ₀ − Σ_j r_j(0), the power of k removed before k → 0.
    pub fn continuity_exponent(&self) -> Result<i64> {
        let t = self.at(Rational64::zero())?;
        Ok(h1_sine_exponent(&t) - t.profile.tilde_tau0 as i64)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KLimitReport {
    pub ks: Vec<f64>,
    /// k^{−E}|lim s^{n₀} R(s; χ_k)| at each k.
    pub scaled: Vec<f64>,
    /// |lim s^{−ord} R(s; χ₀)|.
    pub target: f64,
    /// Relative deviation from the target at each k.
    pub deviations: Vec<f64>,
    /// log₂ of successive deviation ratios (k halves between samples).
    pub observed_orders: Vec<f64>,
    /// Richardson extrapolation of the scaled values to k = 0.
    pub extrapolated: f64,
    pub extrapolated_deviation: f64,
    pub converged: bool,
}

/// Default sample points k ∈ {1/100, 1/200, 1/400}.
pub fn default_ks() -> Vec<Rational64> {
    vec![Rational64::new(1, 100), Rational64::new(1, 200), Rational64::new(1, 400)]
}

pub fn k_limit_check(family: &WeightFamily, ks: &[Rational64], tol: f64) -> Result<KLimitReport> {
    k_limit_check_with_exponent(family, ks, family.continuity_exponent()?, tol)
}

/// As [`k_limit_check`] with the scaling exponent supplied by the caller.
/// The samples must halve successively.
pub fn k_limit_check_with_exponent(family: &WeightFamily, ks: &[Rational64], exponent: i64, tol: f64) -> Result<KLimitReport> {
    if ks.len() < 2 || ks.iter().any(|k| !k.is_positive() || *k >= Rational64::one()) {
        return Err(Error::InvalidInput("need at least two weights k in (0,1)".into()));
    }
    if ks.windows(2).any(|w| w[1] * 2 != w[0]) {
        return Err(Error::InvalidInput("weights must halve between samples".into()));
    }
    let target = lead_term(&family.at(Rational64::zero())?)?.magnitude.ln_eval();
    let mut kf = Vec::new();
    let mut scaled = Vec::new();
    let mut deviations = Vec::new();
    for &k in ks {
        let t = family.at(k)?;
        let kv = *k.numer() as f64 / *k.denom() as f64;
        let ln = lead_term(&t)?.magnitude.ln_eval() - exponent as f64 * kv.ln();
        kf.push(kv);
        scaled.push(ln.exp());
        deviations.push((ln - target).exp_m1().abs());
    }
    let observed_orders: Vec<f64> = deviations.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    // Richardson tableau with error terms k, k², … for halving steps.
    let mut row = scaled.clone();
    let mut factor = 2.0;
    while row.len() > 1 {
        row = row.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        factor *= 2.0;
    }
    let extrapolated = row[0];
    let target_value = target.exp();
    let extrapolated_deviation = (extrapolated / target_value - 1.0).abs();
    let decreasing = deviations.windows(2).all(|w| w[1] <= w[0] || w[0] < tol);
    Ok(KLimitReport {
        ks: kf,
        scaled,
        target: target_value,
        deviations,
        observed_orders,
        extrapolated,
        extrapolated_deviation,
        converged: decreasing && extrapolated_deviation < tol.max(1e-6),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MultiplierSystem;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn modular_data() -> TwistedSurface {
        // Γ₀(1): g = 0, one cusp, elliptic orders 2 and 3, trivial χ.
        let sig = OrbifoldSignature::new(0, 1, vec![2, 3]).unwrap();
        let ms = MultiplierSystem::new(&sig, 1, q(0, 1), vec![vec![0], vec![0]], vec![vec![Angle::Exact(q(0, 1))]]).unwrap();
        let ad = PI.sqrt() / 6.0;
        TwistedSurface::new(sig, ms, ScatteringData::from_reals(0, -ad, 1.0, 0.0, Some(0)).unwrap()).unwrap()
    }

    #[test]
    fn orders_of_hand_cases() {
        let sig = OrbifoldSignature::new(2, 0, vec![]).unwrap();
        let ms = MultiplierSystem::new(&sig, 1, q(1, 2), vec![], vec![]).unwrap();
        assert_eq!(ord_r_at_zero(&TwistedSurface::compact(sig, ms).unwrap()), 0);

        let sig = OrbifoldSignature::new(1, 1, vec![]).unwrap();
        let ms = MultiplierSystem::new(&sig, 1, q(1, 3), vec![], vec![vec![Angle::Exact(q(0, 1))]]).unwrap();
        let data = ScatteringData::from_reals(2, 1.0, 1.0, 0.0, None).unwrap();
        assert_eq!(ord_r_at_zero(&TwistedSurface::new(sig, ms, data).unwrap()), -2);

        assert_eq!(ord_r_at_zero(&modular_data()), -2);
    }

    #[test]
    fn hand_value_half_weight() {
        let sig = OrbifoldSignature::new(1, 0, vec![2]).unwrap();
        let ms = MultiplierSystem::new(&sig, 2, q(1, 2), vec![vec![0, 1]], vec![]).unwrap();
        let t = TwistedSurface::compact(sig, ms).unwrap();
        let lead = lead_term(&t).unwrap();
        assert_eq!(lead.order, 0);
        assert_eq!(lead.magnitude, FactoredMagnitude::integer(2).unwrap());
        assert!(!lead.sign_known);
    }

    #[test]
    fn modular_group_lead() {
        let t = modular_data();
        let a = lead_term(&t).unwrap();
        let b = lead_term_k0(&t).unwrap();
        let expect = 9.0 / (PI * PI);
        assert_eq!(a.order, -2);
        assert!((a.magnitude.eval() / expect - 1.0).abs() < 1e-12);
        assert!((b.magnitude.eval() / expect - 1.0).abs() < 1e-12);
        // (−1)^{0+1+1} · sign(a d) with a d < 0
        assert_eq!(b.sign, Some(-1));
    }

    #[test]
    fn compact_genus_two_trivial() {
        let sig = OrbifoldSignature::new(2, 0, vec![]).unwrap();
        let ms = MultiplierSystem::new(&sig, 1, q(0, 1), vec![], vec![]).unwrap();
        let t = TwistedSurface::compact(sig, ms).unwrap();
        let expect = FactoredMagnitude::integer(4).unwrap() * FactoredMagnitude::pi().powi(2);
        assert_eq!(lead_term(&t).unwrap().magnitude, expect);
        let k0 = lead_term_k0(&t).unwrap();
        assert_eq!(k0.magnitude, expect);
        assert_eq!((k0.order, k0.sign), (2, Some(-1)));
    }

    #[test]
    fn trivial_character_reduction() {
        // m = 1, χ trivial: |lead| = (2π)^{2g−2} π^{τ/2} ∏ν_j / |a d|.
        for (g, tau, nus) in [(0u32, 1u32, vec![2u32, 3]), (1, 2, vec![2]), (2, 0, vec![3, 5, 7])] {
            let sig = OrbifoldSignature::new(g, tau, nus.clone()).unwrap();
            let ms = MultiplierSystem::new_continuous_weight(
                &sig,
                1,
                q(0, 1),
                vec![vec![0]; nus.len()],
                vec![vec![Angle::Exact(q(0, 1))]; tau as usize],
            )
            .unwrap();
            let data = if tau == 0 {
                ScatteringData::compact()
            } else {
                ScatteringData::from_reals(if tau == 1 { 0 } else { 3 }, 0.7, 1.3, 0.0, Some(0)).unwrap()
            };
            let ad = if tau == 0 { 1.0 } else { 0.7 * 1.3 };
            let t = TwistedSurface::new(sig, ms, data).unwrap();
            let lead = lead_term_k0(&t).unwrap();
            let nprod: u32 = nus.iter().product();
            let expect = (2.0 * PI).powi(2 * g as i32 - 2) * PI.powf(tau as f64 / 2.0) * nprod as f64 / ad;
            assert!((lead.magnitude.eval() / expect - 1.0).abs() < 1e-12);
            assert_eq!(lead.order, 2 * g as i64 - 2 - t.data.n0);
        }
    }

    #[test]
    fn k0_requires_weight_zero() {
        let sig = OrbifoldSignature::new(2, 0, vec![]).unwrap();
        let ms = MultiplierSystem::new(&sig, 1, q(1, 2), vec![], vec![]).unwrap();
        assert!(lead_term_k0(&TwistedSurface::compact(sig, ms).unwrap()).is_err());
    }

    fn compact_family() -> WeightFamily {
        WeightFamily {
            sig: OrbifoldSignature::new(1, 0, vec![2, 3]).unwrap(),
            dim: 2,
            elliptic_residues: vec![vec![0, 1], vec![2, 0]],
            parabolic_angles: vec![],
            data: ScatteringData::compact(),
        }
    }

    #[test]
    fn k_limit_linear_with_elliptic_data() {
        let rep = k_limit_check(&compact_family(), &default_ks(), 1e-6).unwrap();
        assert!(rep.converged, "{rep:?}");
        for o in &rep.observed_orders {
            assert!((o - 1.0).abs() < 0.05, "{rep:?}");
        }
    }

    #[test]
    fn k_limit_pure_sine_scaling() {
        let fam = WeightFamily {
            sig: OrbifoldSignature::new(3, 0, vec![]).unwrap(),
            dim: 2,
            elliptic_residues: vec![],
            parabolic_angles: vec![],
            data: ScatteringData::compact(),
        };
        let rep = k_limit_check(&fam, &default_ks(), 1e-8).unwrap();
        let e = fam.continuity_exponent().unwrap() as f64;
        for (k, d) in rep.ks.iter().zip(&rep.deviations) {
            let closed = ((PI * k).sin() / (PI * k)).powf(e) - 1.0;
            assert!((d - closed.abs()).abs() < 1e-12);
        }
        assert!(rep.converged);
    }

    #[test]
    fn k_limit_negative_control() {
        let fam = compact_family();
        let e = fam.continuity_exponent().unwrap();
        let rep = k_limit_check_with_exponent(&fam, &default_ks(), e + 1, 1e-6).unwrap();
        assert!(!rep.converged);
        assert!(rep.extrapolated_deviation > 1.0);
    }

    #[test]
    fn h1_numeric_lead_on_hand_cases() {
        let t = modular_data();
        let lim = h1_limit(&t).unwrap();
        let s = 1e-6;
        let numeric = log_abs_h1_real(&t, s) - ord_h1_at_zero(&t) as f64 * s.ln();
        assert!((numeric - lim.magnitude.ln_eval()).abs() < 1e-9);
        assert_eq!(lim.sign, Some(1));
    }

    fn arb_surface() -> impl Strategy<Value = TwistedSurface> {
        (
            0u32..3,
            prop::collection::vec(2u32..7, 0..3),
            1u32..3,
            prop::bool::ANY,
            0i64..12,
            any::<u64>(),
        )
            .prop_filter_map("hyperbolic", |(g, nus, m, integral, knum, seed)| {
                let sig = OrbifoldSignature::new(g, 0, nus.clone()).ok()?;
                let lcm = sig.lcm_orders() as i64;
                let area = sig.area_over_2pi() * Rational64::from_integer(m as i64 * lcm);
                let step = Rational64::one() / area;
                let k = if integral { Rational64::from_integer(knum % 4) } else { step * knum };
                let mut x = seed;
                let residues = nus
                    .iter()
                    .map(|&nu| {
                        (0..m)
                            .map(|_| {
                                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                                ((x >> 33) % nu as u64) as u32
                            })
                            .collect()
                    })
                    .collect();
                let ms = MultiplierSystem::new(&sig, m, k, residues, vec![]).ok()?;
                TwistedSurface::compact(sig, ms).ok()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn dual_path_weight_zero(t in arb_surface()) {
            let w = Rational64::zero();
            let ms = MultiplierSystem::new(&t.sig, t.ms.dim(), w, t.ms.elliptic_residues().to_vec(), vec![]).unwrap();
            let t0 = TwistedSurface::compact(t.sig.clone(), ms).unwrap();
            let a = lead_term(&t0).unwrap();
            let b = lead_term_k0(&t0).unwrap();
            prop_assert_eq!(a.order, b.order);
            prop_assert!((a.magnitude.ln_eval() - b.magnitude.ln_eval()).abs() < 1e-10);
            prop_assert!(b.sign_known);
        }

        #[test]
        fn squared_limit_is_positive(t in arb_surface()) {
            prop_assert_eq!(squared_limit_sign(&t).unwrap(), 1);
            prop_assert!(lead_term(&t).unwrap().magnitude.eval() > 0.0);
        }

        #[test]
        fn h1_order_matches_slope(t in arb_surface()) {
            let slope = observed_h1_order(&t, &[1e-3, 1e-4, 1e-5]);
            prop_assert!((slope - ord_h1_at_zero(&t) as f64).abs() < 0.05, "slope {}", slope);
            // H₁ is even, so one Richardson step in s² removes the curvature.
            let f = |s: f64| log_abs_h1_real(&t, s) - ord_h1_at_zero(&t) as f64 * s.ln();
            let numeric = (4.0 * f(5e-6) - f(1e-5)) / 3.0;
            let exact = h1_limit(&t).unwrap().magnitude.ln_eval();
            prop_assert!((numeric - exact).abs() < 1e-8, "{} vs {}", numeric, exact);
        }
    }
}
