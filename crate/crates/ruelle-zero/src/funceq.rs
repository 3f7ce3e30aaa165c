//! The Selberg factor κ(s), the Ruelle factors H(s) and H₁(s), and the
//! combinations behind them, each available along two independent paths.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use crate::model::{residue_profile, Angle, CombinatorialProfile, MultiplierSystem, OrbifoldSignature};
use crate::special::{log_barnes_g, log_gamma, FactoredMagnitude, SignedMagnitude};
use crate::{Error, Result};

/// Scattering determinant s ↦ φ(s; χ).
pub type Phi = Arc<dyn Fn(Complex64) -> Result<Complex64> + Send + Sync>;

const POLE_EPS: f64 = 1e-8;

/// Lead data of the scattering determinant at s = 0 and its normalization.
#[derive(Clone)]
pub struct ScatteringData {
    pub n0: i64,
    pub a_n0: SignedMagnitude,
    pub d1: SignedMagnitude,
    pub c1: f64,
    /// ½ tr(I − Φ(½)); `None` when unknown.
    pub half_trace_exponent: Option<i64>,
    pub phi: Option<Phi>,
}

impl fmt::Debug for ScatteringData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScatteringData")
            .field("n0", &self.n0)
            .field("a_n0", &self.a_n0)
            .field("d1", &self.d1)
            .field("c1", &self.c1)
            .field("half_trace_exponent", &self.half_trace_exponent)
            .field("phi", &self.phi.as_ref().map(|_| "<fn>"))
            .finish()
    }
}

impl ScatteringData {
    /// The co-compact data: n₀ = 0, a = d(1) = 1, c₁ = 0, φ ≡ 1.
    pub fn compact() -> Self {
        Self {
            n0: 0,
            a_n0: SignedMagnitude::one(),
            d1: SignedMagnitude::one(),
            c1: 0.0,
            half_trace_exponent: Some(0),
            phi: None,
        }
    }

    pub fn from_reals(n0: i64, a_n0: f64, d1: f64, c1: f64, half_trace_exponent: Option<i64>) -> Result<Self> {
        Ok(Self {
            n0,
            a_n0: SignedMagnitude::from_real(a_n0)?,
            d1: SignedMagnitude::from_real(d1)?,
            c1,
            half_trace_exponent,
            phi: None,
        })
    }

    pub fn with_phi(mut self, phi: Phi) -> Self {
        self.phi = Some(phi);
        self
    }

    fn is_trivial(&self) -> bool {
        self.n0 == 0
            && self.a_n0 == SignedMagnitude::one()
            && self.d1 == SignedMagnitude::one()
            && self.c1 == 0.0
            && self.half_trace_exponent.unwrap_or(0) == 0
    }
}

/// A signature, a multiplier system on it, its combinatorial profile and
/// scattering data, validated together.
#[derive(Clone, Debug)]
pub struct TwistedSurface {
    pub sig: OrbifoldSignature,
    pub ms: MultiplierSystem,
    pub profile: CombinatorialProfile,
    pub data: ScatteringData,
}

impl TwistedSurface {
    pub fn new(sig: OrbifoldSignature, ms: MultiplierSystem, data: ScatteringData) -> Result<Self> {
        let profile = residue_profile(&sig, &ms)?;
        if sig.is_compact() && !data.is_trivial() {
            return Err(Error::InvalidInput("compact signature requires trivial scattering data".into()));
        }
        if profile.tau0 == 1 {
            let k = ms.weight();
            let expect = if k.is_zero() {
                0
            } else if k.is_integer() {
                1
            } else {
                2
            };
            if data.n0 != expect {
                return Err(Error::InvalidInput(format!("τ₀ = 1 and k = {k} force n₀ = {expect}, got {}", data.n0)));
            }
        }
        Ok(Self { sig, ms, profile, data })
    }

    /// Compact surface with trivial scattering data.
    pub fn compact(sig: OrbifoldSignature, ms: MultiplierSystem) -> Result<Self> {
        Self::new(sig, ms, ScatteringData::compact())
    }

    pub fn k(&self) -> f64 {
        self.ms.weight().to_f64().unwrap_or(f64::NAN)
    }

    pub fn m(&self) -> f64 {
        self.ms.dim() as f64
    }

    /// c = mω/2π.
    pub fn identity_exponent(&self) -> Rational64 {
        self.sig.area_over_2pi() * Rational64::from_integer(self.ms.dim() as i64)
    }

    /// m(2g − 2 + ρ + τ), the exponent of sin π(s+k) sin π(−s+k) in H.
    pub fn sine_exponent(&self) -> i64 {
        self.ms.dim() as i64 * self.sig.euler_like()
    }

    /// The nonzero parabolic angles β_{jp}, p > m_j, over all cusps.
    pub fn nonzero_angles(&self) -> impl Iterator<Item = &Angle> {
        self.ms.parabolic_angles().iter().flat_map(|a| a.iter().filter(|b| !b.is_zero()))
    }

    fn sum_betas(&self) -> f64 {
        self.profile.beta_sums.iter().map(Angle::value).sum()
    }

    fn phi(&self, s: Complex64) -> Result<Complex64> {
        match &self.data.phi {
            Some(f) => f(s),
            None if self.profile.tau0 == 0 => Ok(Complex64::new(1.0, 0.0)),
            None => Err(Error::MissingPhi),
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sin_pi(z: Complex64) -> Complex64 {
    (z * PI).sin()
}

/// base^e with the principal logarithm; a near-zero base under a negative
/// exponent is a pole at `s`.
fn cpow(base: Complex64, e: f64, s: Complex64) -> Result<Complex64> {
    if e == 0.0 {
        return Ok(c(1.0, 0.0));
    }
    if base.norm() < POLE_EPS {
        return if e < 0.0 { Err(Error::PoleAt(s)) } else { Ok(c(0.0, 0.0)) };
    }
    Ok((base.ln() * e).exp())
}

fn cpowi(base: Complex64, e: i64, s: Complex64) -> Result<Complex64> {
    if e == 0 {
        return Ok(c(1.0, 0.0));
    }
    if base.norm() < POLE_EPS {
        return if e < 0 { Err(Error::PoleAt(s)) } else { Ok(c(0.0, 0.0)) };
    }
    Ok(base.powi(e as i32))
}

fn check_cut_plane(t: &TwistedSurface, s: Complex64) -> Result<()> {
    let k = t.k().abs();
    if s.im == 0.0 && (s.re <= k || s.re >= 1.0 - k) {
        return Err(Error::Domain(s, "s must avoid (−∞,|k|] ∪ [1−|k|,∞)".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Definition path: log Z_I, log Z_ell, log Z_par as analytic functions.

/// The bracket of log Z_I(s) without the factor mω/2π.
pub fn log_zi_bracket(t: &TwistedSurface, s: Complex64) -> Result<Complex64> {
    let k = t.k();
    Ok(s * (2.0 * PI).ln() + s * (1.0 - s) + log_gamma(s + k)? * (0.5 + k) + log_gamma(s - k)? * (0.5 - k)
        - log_barnes_g(s + k + 1.0)?
        - log_barnes_g(s - k + 1.0)?)
}

pub fn log_zi_def(t: &TwistedSurface, s: Complex64) -> Result<Complex64> {
    Ok(log_zi_bracket(t, s)? * t.identity_exponent().to_f64().unwrap_or(f64::NAN))
}

pub fn log_zell_def(t: &TwistedSurface, s: Complex64) -> Result<Complex64> {
    let k = t.k();
    let m = t.m();
    let mut acc = c(0.0, 0.0);
    for (j, &nu) in t.sig.elliptic_orders().iter().enumerate() {
        let nf = nu as f64;
        let w = m * (1.0 - 1.0 / nf);
        acc += s * (w * nf.ln()) - (log_gamma(s - k)? + log_gamma(s + k)?) * (0.5 * w);
        for l in 0..nu as i64 {
            let a = t.profile.alpha_sum(j, l) as f64 / nf;
            let at = t.profile.alpha_tilde_sum(j, l) as f64 / nf;
            if a != 0.0 {
                acc += log_gamma((s - k + l as f64) / nf)? * a;
            }
            if at != 0.0 {
                acc += log_gamma((s + k + l as f64) / nf)? * at;
            }
        }
    }
    Ok(acc)
}

pub fn log_zpar_def(t: &TwistedSurface, s: Complex64) -> Result<Complex64> {
    if t.sig.cusps() == 0 {
        return Ok(c(0.0, 0.0));
    }
    let k = t.k();
    let m = t.m();
    let tau = t.sig.cusps() as f64;
    let mut acc = -s * (m * tau * 2f64.ln());
    let gamma_ratio = log_gamma(s + k)? - log_gamma(s - k)?;
    acc += gamma_ratio * (m * tau / 2.0 - t.sum_betas());
    for b in t.nonzero_angles() {
        acc -= s * (PI * b.value()).sin().ln();
    }
    let h = t.data.half_trace_exponent.unwrap_or(0);
    if h != 0 {
        acc += (s - 0.5).ln() * h as f64;
    }
    let tau0 = t.profile.tau0 as f64;
    if tau0 != 0.0 {
        acc += (log_gamma(s - k)? - log_gamma(s)? - log_gamma(s + 0.5)?) * tau0;
    }
    Ok(acc)
}

/// log(Z_I Z_ell Z_par)(s) along the definition path.
pub fn log_gamma_factor(t: &TwistedSurface, s: Complex64) -> Result<Complex64> {
    Ok(log_zi_def(t, s)? + log_zell_def(t, s)? + log_zpar_def(t, s)?)
}

/// κ(s) assembled from the Gamma/Barnes-G definitions.
pub fn kappa_def(t: &TwistedSurface, s: Complex64) -> Result<Complex64> {
    check_cut_plane(t, s)?;
    Ok((log_gamma_factor(t, s)? - log_gamma_factor(t, 1.0 - s)?).exp() * t.phi(s)?)
}

// ---------------------------------------------------------------------------
// Closed forms of the ratios.

/// Z_I(s)/Z_I(1−s) in its sine/Gamma/Barnes-G closed form.
pub fn zi_ratio(t: &TwistedSurface, s: Complex64) -> Result<Complex64> {
    check_cut_plane(t, s)?;
    let k = t.k();
    let cexp = t.identity_exponent().to_f64().unwrap_or(f64::NAN);
    let sines = sin_pi(s - k) / sin_pi(s + k);
    let gammas = (log_gamma(s + k)? + log_gamma(s - k)? - log_gamma(1.0 - s + k)? - log_gamma(1.0 - s - k)?).exp();
    let gs = (log_barnes_g(s + k)? + log_barnes_g(s - k)? - log_barnes_g(1.0 - s + k)? - log_barnes_g(1.0 - s - k)?).exp();
    let inner = (2.0 * s - 1.0) * (2.0 * PI).ln() + sines.ln() * k - gammas.ln() * 0.5 - gs.ln();
    Ok((inner * cexp).exp())
}

/// Z_ell(s)/Z_ell(1−s) in closed form.
pub fn zell_ratio(t: &TwistedSurface, s: Complex64) -> Result<Complex64> {
    check_cut_plane(t, s)?;
    if t.sig.rho() == 0 {
        return Ok(c(1.0, 0.0));
    }
    let k = t.k();
    let m = t.m();
    let sum_w: f64 = t.sig.elliptic_orders().iter().map(|&nu| 1.0 - 1.0 / nu as f64).sum();
    let sum_inv: f64 = t.sig.elliptic_orders().iter().map(|&nu| 1.0 / nu as f64).sum();
    let mut val = c((m * sum_w).exp2(), 0.0);
    val *= cpow(sin_pi(s + k), -m * sum_inv, s)?;
    val *= cpow(sin_pi(s - k) / sin_pi(s + k), 0.5 * m * sum_w, s)?;
    for (j, &nu) in t.sig.elliptic_orders().iter().enumerate() {
        let nf = nu as f64;
        for l in 1..=nu as i64 {
            let e = t.profile.alpha_sum(j, l) as f64 / nf + t.profile.r(j, l) as f64;
            val *= cpow(sin_pi((-s - k + l as f64) / nf), e, s)?;
        }
        for l in 0..nu as i64 {
            let e = t.profile.alpha_sum(j, l) as f64 / nf;
            val *= cpow(sin_pi((s - k + l as f64) / nf), -e, s)?;
        }
    }
    Ok(val)
}

/// Z_par(s)/Z_par(1−s) in closed form.
pub fn zpar_ratio(t: &TwistedSurface, s: Complex64) -> Result<Complex64> {
    check_cut_plane(t, s)?;
    if t.sig.cusps() == 0 {
        return Ok(c(1.0, 0.0));
    }
    let k = t.k();
    let m = t.m();
    let tau = t.sig.cusps() as f64;
    let mut val = (-(2.0 * s - 1.0) * (m * tau * 2f64.ln())).exp();
    val *= cpow(sin_pi(s - k) / sin_pi(s + k), m * tau / 2.0 - t.sum_betas(), s)?;
    for b in t.nonzero_angles() {
        val *= ((1.0 - 2.0 * s) * (PI * b.value()).sin().ln()).exp();
    }
    if t.data.half_trace_exponent.unwrap_or(0) % 2 != 0 {
        val = -val;
    }
    let tau0 = t.profile.tau0 as i64;
    if tau0 != 0 {
        let g = (log_gamma(s - k)? - log_gamma(1.0 - s - k)? + log_gamma(1.0 - s)? + log_gamma(1.5 - s)?
            - log_gamma(s)?
            - log_gamma(s + 0.5)?)
            .exp();
        val *= cpowi(g, tau0, s)?;
    }
    Ok(val)
}

/// κ(s) = zI·zEll·zPar·φ(s) from the closed forms.
pub fn kappa(t: &TwistedSurface, s: Complex64) -> Result<Complex64> {
    Ok(zi_ratio(t, s)? * zell_ratio(t, s)? * zpar_ratio(t, s)? * t.phi(s)?)
}

// ---------------------------------------------------------------------------
// Ruelle factors.

/// H(s), the factor in R(s)φ(s) = (R(−s)φ(−s))^{−1} H(s). Integer exponents only.
pub fn h(t: &TwistedSurface, s: Complex64) -> Result<Complex64> {
    let k = t.k();
    let m = t.ms.dim() as i64;
    let g2 = 2 * t.sig.genus() as i64 - 2;
    let mut val = c(((2 * m * g2) as f64).exp2(), 0.0);
    val *= cpowi(sin_pi(s + k) * sin_pi(-s + k), t.sine_exponent(), s)?;
    val *= elliptic_pairs(t, s)?;
    let beta_prod: f64 = t.nonzero_angles().map(|b| (PI * b.value()).sin()).product();
    val /= beta_prod * beta_prod;
    let tau0 = t.profile.tau0 as i64;
    if tau0 != 0 {
        let num = (-s - k) * (s - k);
        let den = s * (-s) * (s + 0.5) * (-s + 0.5);
        if den.norm() < POLE_EPS {
            return Err(Error::PoleAt(s));
        }
        val *= cpowi(num / den, tau0, s)?;
    }
    Ok(val)
}

/// ∏_j ∏_{ℓ=1}^{ν_j} (sin(π(−s−k+ℓ)/ν_j) sin(π(s−k+ℓ)/ν_j))^{−r_j(ℓ)}.
fn elliptic_pairs(t: &TwistedSurface, s: Complex64) -> Result<Complex64> {
    let k = t.k();
    let mut val = c(1.0, 0.0);
    for (j, &nu) in t.sig.elliptic_orders().iter().enumerate() {
        let nf = nu as f64;
        for l in 1..=nu as i64 {
            let r = t.profile.r(j, l) as i64;
            if r != 0 {
                let pair = sin_pi((-s - k + l as f64) / nf) * sin_pi((s - k + l as f64) / nf);
                val *= cpowi(pair, -r, s)?;
            }
        }
    }
    Ok(val)
}

/// H(s) through κ: (κ(s+1)/κ(s))·φ(s)φ(−s), with κ from the definitions.
pub fn h_via_kappa(t: &TwistedSurface, s: Complex64) -> Result<Complex64> {
    check_cut_plane(t, s)?;
    check_cut_plane(t, s + 1.0)?;
    let lf = |z: Complex64| log_gamma_factor(t, z);
    let log_ratio = lf(s + 1.0)? - lf(-s)? - lf(s)? + lf(1.0 - s)?;
    Ok(log_ratio.exp() * (t.phi(s + 1.0)? / t.phi(s)?) * t.phi(s)? * t.phi(-s)?)
}

/// Order of the root of unity by which the principal-branch closed form of
/// κ can differ from the definition path, or `None` when a real parabolic
/// angle makes the offset irrational.
pub fn kappa_branch_denominator(t: &TwistedSurface) -> Option<u64> {
    use num_integer::Integer;
    let c = t.identity_exponent();
    let half = Rational64::new(1, 2);
    let mut d = 1u64;
    for x in [c, c * t.ms.weight(), c * half] {
        d = d.lcm(&(*x.denom() as u64));
    }
    for &nu in t.sig.elliptic_orders() {
        d = d.lcm(&(2 * nu as u64));
    }
    if t.sig.cusps() > 0 {
        let mut e = Rational64::new(t.ms.dim() as i64 * t.sig.cusps() as i64, 2);
        for b in &t.profile.beta_sums {
            match b {
                Angle::Exact(q) => e -= *q,
                Angle::Real(_) => return None,
            }
        }
        d = d.lcm(&(*e.denom() as u64));
    }
    Some(d)
}

/// H₁(s) = c² H(s) / (L(s)L(−s)), in closed form.
pub fn h1(t: &TwistedSurface, s: Complex64) -> Result<Complex64> {
    let k = t.k();
    let tau0 = t.profile.tau0 as i64;
    let mut val = cpowi(sin_pi(s + k) * sin_pi(-s + k), t.sine_exponent() - tau0, s)?;
    val *= elliptic_pairs(t, s)?;
    if tau0 != 0 {
        if s.norm() < POLE_EPS {
            return Err(Error::PoleAt(s));
        }
        val *= cpowi(sin_pi(s) * (s * PI).cos() / s, tau0, s)?;
    }
    Ok(val)
}

/// H₁(s) through H(s) and the Gamma factors of L(s)L(−s).
pub fn h1_via_h(t: &TwistedSurface, s: Complex64) -> Result<Complex64> {
    let k = t.k();
    let m = t.ms.dim() as i64;
    let g2 = 2 * t.sig.genus() as i64 - 2;
    let beta_prod: f64 = t.nonzero_angles().map(|b| (PI * b.value()).sin()).product();
    let c2 = (-2.0 * (m * g2) as f64).exp2() * beta_prod * beta_prod;
    let mut val = h(t, s)? * c2;
    let tau0 = t.profile.tau0 as f64;
    if tau0 != 0.0 {
        let ll = log_gamma(s)? + log_gamma(s - 0.5)? + log_gamma(-s)? + log_gamma(-s - 0.5)?
            - log_gamma(s - k)?
            - log_gamma(s + k)?
            - log_gamma(-s - k)?
            - log_gamma(-s + k)?;
        val *= (-ll * tau0).exp();
    }
    Ok(val)
}

/// c(χ, Γ) = 2^{−m(2g−2)} d(1) ∏_{j,p>m_j} sin(πβ_{jp}).
pub fn c_chi_gamma(t: &TwistedSurface) -> Result<SignedMagnitude> {
    let m = t.ms.dim() as i64;
    let g2 = 2 * t.sig.genus() as i64 - 2;
    let mut mag = FactoredMagnitude::integer(2)?.powi(-m * g2);
    mag = mag * beta_sine_product(t)?;
    Ok(SignedMagnitude { sign: Some(1), magnitude: mag } * t.data.d1.clone())
}

/// ∏_{j,p>m_j} sin(πβ_{jp}) as a magnitude (each factor is positive).
pub fn beta_sine_product(t: &TwistedSurface) -> Result<FactoredMagnitude> {
    t.nonzero_angles()
        .map(|b| match b {
            Angle::Exact(q) => FactoredMagnitude::sin_pi(*q),
            Angle::Real(x) => FactoredMagnitude::residue((PI * x).sin()),
        })
        .product()
}

// ---------------------------------------------------------------------------
// Duality combinations f(1+s)f(1−s)/(f(s)f(−s)).

/// Deviation between two logarithms of the same quantity whose branches may
/// differ by a multiple of 2πi/denominator: |exp(lhs − rhs − 2πin/D) − 1|.
pub fn branch_deviation(lhs: Complex64, rhs: Complex64, denominator: u64) -> f64 {
    let period = 2.0 * PI / denominator as f64;
    let d = lhs - rhs;
    let n = (d.im / period).round();
    ((d - c(0.0, n * period)).exp() - 1.0).norm()
}

fn combo(f: impl Fn(Complex64) -> Result<Complex64>, s: Complex64) -> Result<Complex64> {
    Ok(f(1.0 + s)? + f(1.0 - s)? - f(s)? - f(-s)?)
}

/// Identity contribution: (log lhs, log rhs, branch denominator) for
/// Z_I(1+s)Z_I(1−s)/(Z_I(s)Z_I(−s)) = (4 sin π(s+k) sin π(−s+k))^{mω/2π},
/// compared on the bracket before scaling by mω/2π.
pub fn identity_combination(t: &TwistedSurface, s: Complex64) -> Result<(Complex64, Complex64, u64)> {
    let k = t.k();
    let lhs = combo(|z| log_zi_bracket(t, z), s)?;
    let rhs = (sin_pi(s + k) * sin_pi(-s + k) * 4.0).ln();
    Ok((lhs, rhs, 2 * *t.ms.weight().denom() as u64))
}

/// Elliptic contribution against its sine closed form.
pub fn elliptic_combination(t: &TwistedSurface, s: Complex64) -> Result<(Complex64, Complex64, u64)> {
    let k = t.k();
    let m = t.m();
    let lhs = combo(|z| log_zell_def(t, z), s)?;
    let sum_w: f64 = t.sig.elliptic_orders().iter().map(|&nu| 1.0 - 1.0 / nu as f64).sum();
    let sum_inv: f64 = t.sig.elliptic_orders().iter().map(|&nu| 1.0 / nu as f64).sum();
    let mut rhs = c(-2.0 * m * sum_w * 2f64.ln(), 0.0) + (sin_pi(s + k) * sin_pi(-s + k)).ln() * (m * sum_inv);
    for (j, &nu) in t.sig.elliptic_orders().iter().enumerate() {
        let nf = nu as f64;
        for l in 1..=nu as i64 {
            let r = t.profile.r(j, l) as f64;
            if r != 0.0 {
                let pair = sin_pi((-s - k + l as f64) / nf) * sin_pi((s - k + l as f64) / nf);
                rhs -= pair.ln() * r;
            }
        }
    }
    Ok((lhs, rhs, 2 * t.sig.lcm_orders()))
}

/// Parabolic contribution against its closed form.
pub fn parabolic_combination(t: &TwistedSurface, s: Complex64) -> Result<(Complex64, Complex64, u64)> {
    let k = t.k();
    let m = t.m();
    let tau = t.sig.cusps() as f64;
    let lhs = combo(|z| log_zpar_def(t, z), s)?;
    let mut rhs = c(-2.0 * m * tau * 2f64.ln(), 0.0);
    for b in t.nonzero_angles() {
        rhs -= c(2.0 * (PI * b.value()).sin().ln(), 0.0);
    }
    let tau0 = t.profile.tau0 as f64;
    if tau0 != 0.0 {
        let q = (-s - k) * (s - k) / (s * (-s) * (s + 0.5) * (-s + 0.5));
        rhs += q.ln() * tau0;
    }
    Ok((lhs, rhs, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Angle;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn compact(g: u32, nus: Vec<u32>, m: u32, k: Rational64, res: Vec<Vec<u32>>) -> TwistedSurface {
        let sig = OrbifoldSignature::new(g, 0, nus).unwrap();
        let ms = MultiplierSystem::new_continuous_weight(&sig, m, k, res, vec![]).unwrap();
        TwistedSurface::compact(sig, ms).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn hand_value_of_h() {
        let t = compact(1, vec![2], 2, q(1, 2), vec![vec![0, 1]]);
        let v = h(&t, c(0.0, 0.0)).unwrap();
        assert!((v - c(4.0, 0.0)).norm() < 1e-12, "{v}");
    }

    #[test]
    fn empty_products() {
        let t = compact(2, vec![], 1, q(0, 1), vec![]);
        let s = c(0.3, 0.8);
        assert_eq!(zell_ratio(&t, s).unwrap(), c(1.0, 0.0));
        assert_eq!(zpar_ratio(&t, s).unwrap(), c(1.0, 0.0));
        let cc = c_chi_gamma(&t).unwrap();
        assert_eq!(cc.magnitude, FactoredMagnitude::rational(1, 4).unwrap());
    }

    #[test]
    fn identity_ratio_dual_paths() {
        let t = compact(2, vec![], 1, q(0, 1), vec![]);
        let s = c(0.5, 2.0);
        let closed = zi_ratio(&t, s).unwrap();
        let def = (log_zi_def(&t, s).unwrap() - log_zi_def(&t, 1.0 - s).unwrap()).exp();
        assert!(rel(closed, def) < 1e-9);
        let t = compact(2, vec![3, 4], 2, q(1, 2), vec![vec![0, 2], vec![1, 3]]);
        let s = c(0.3, 1.7);
        let closed = zi_ratio(&t, s).unwrap();
        let def = log_zi_def(&t, s).unwrap() - log_zi_def(&t, 1.0 - s).unwrap();
        // Principal branches: equal up to a root of unity, here e^{πi c}.
        let d = kappa_branch_denominator(&t).unwrap();
        assert!(branch_deviation(closed.ln(), def, d) < 1e-9);
        assert!((closed.norm() / def.exp().norm() - 1.0).abs() < 1e-9);
        // f(s)·f(1−s) = 1
        assert!(rel(closed * zi_ratio(&t, 1.0 - s).unwrap(), c(1.0, 0.0)) < 1e-10);
    }

    #[test]
    fn elliptic_ratio_dual_path() {
        let t = compact(2, vec![2], 1, q(0, 1), vec![vec![0]]);
        let s = c(0.4, 1.0);
        let closed = zell_ratio(&t, s).unwrap();
        let def = (log_zell_def(&t, s).unwrap() - log_zell_def(&t, 1.0 - s).unwrap()).exp();
        assert!(rel(closed, def) < 1e-9, "{closed} vs {def}");
    }

    #[test]
    fn domain_is_enforced() {
        let t = compact(2, vec![], 1, q(0, 1), vec![]);
        assert!(matches!(zi_ratio(&t, c(0.0, 0.0)), Err(Error::Domain(..))));
        assert!(matches!(kappa(&t, c(2.0, 0.0)), Err(Error::Domain(..))));
    }

    #[test]
    fn poles_are_reported() {
        let t = compact(1, vec![2], 1, q(0, 1), vec![vec![0]]);
        // H has sin(π(s−k+ℓ)/ν) with ℓ = ν = 2, k = 0 at s = 0: the pair vanishes.
        assert!(matches!(h(&t, c(0.0, 0.0)), Err(Error::PoleAt(_))));
    }

    #[test]
    fn parabolic_ratio_dual_path() {
        let sig = OrbifoldSignature::new(0, 2, vec![2, 3]).unwrap();
        let ms = MultiplierSystem::new(
            &sig,
            2,
            q(1, 3),
            vec![vec![0, 1], vec![2, 2]],
            vec![vec![Angle::Exact(q(0, 1)), Angle::Exact(q(1, 5))], vec![Angle::Real(0.37), Angle::Real(0.81)]],
        )
        .unwrap();
        let data = ScatteringData::from_reals(2, 1.5, -0.7, 0.2, Some(1)).unwrap();
        let t = TwistedSurface::new(sig, ms, data).unwrap();
        let s = c(0.2, 0.9);
        let closed = zpar_ratio(&t, s).unwrap();
        let def = (log_zpar_def(&t, s).unwrap() - log_zpar_def(&t, 1.0 - s).unwrap()).exp();
        assert!(rel(closed, def) < 1e-9, "{closed} vs {def}");
    }

    fn random_surface() -> impl Strategy<Value = TwistedSurface> {
        (0u32..3, proptest::collection::vec(2u32..7, 0..3), 1u32..4, 0u32..3, -3i64..4, 1i64..5)
            .prop_flat_map(|(g, nus, m, tau, kn, kd)| {
                let res = nus.iter().map(|&nu| proptest::collection::vec(0..nu, m as usize)).collect::<Vec<_>>();
                let angles = proptest::collection::vec(proptest::collection::vec(0u32..6, m as usize), tau as usize);
                (Just((g, nus, m, tau, kn, kd)), res, angles)
            })
            .prop_filter_map("hyperbolic", |((g, nus, m, tau, kn, kd), res, angles)| {
                let sig = OrbifoldSignature::new(g, tau, nus).ok()?;
                let k = q(kn, kd * 2);
                let angles = angles
                    .into_iter()
                    .map(|a| a.into_iter().map(|x| Angle::Exact(q(x as i64, 6))).collect())
                    .collect();
                let ms = MultiplierSystem::new_continuous_weight(&sig, m, k, res, angles).ok()?;
                let profile = residue_profile(&sig, &ms).ok()?;
                let n0 = if profile.tau0 == 1 {
                    if k.is_zero() { 0 } else if k.is_integer() { 1 } else { 2 }
                } else {
                    0
                };
                let data = if tau == 0 {
                    ScatteringData::compact()
                } else {
                    ScatteringData::from_reals(n0, 0.8, 1.3, 0.1, Some(1)).ok()?.with_phi(Arc::new(|s: Complex64| {
                        // φ(s) = ((1−s)/s)·e^{(1−2s)/3} satisfies φ(s)φ(1−s) = 1.
                        Ok((1.0 - s) / s * ((1.0 - 2.0 * s) / 3.0).exp())
                    }))
                };
                TwistedSurface::new(sig, ms, data).ok()
            })
    }

    fn sample_s() -> impl Strategy<Value = Complex64> {
        (-2.0f64..2.0, 0.1f64..5.0, proptest::bool::ANY).prop_map(|(re, im, f)| c(re, if f { im } else { -im }))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn duality_combinations(t in random_surface(), s in sample_s()) {
            let (l, r, d) = identity_combination(&t, s).unwrap();
            prop_assert!(branch_deviation(l, r, d) < 1e-9, "identity {}", branch_deviation(l, r, d));
            let (l, r, d) = elliptic_combination(&t, s).unwrap();
            prop_assert!(branch_deviation(l, r, d) < 1e-9, "elliptic {}", branch_deviation(l, r, d));
            let (l, r, d) = parabolic_combination(&t, s).unwrap();
            prop_assert!(branch_deviation(l, r, d) < 1e-9, "parabolic {}", branch_deviation(l, r, d));
        }

        #[test]
        fn h_is_even_and_matches_kappa(t in random_surface(), s in sample_s()) {
            let a = h(&t, s).unwrap();
            let b = h(&t, -s).unwrap();
            prop_assert!(rel(a, b) < 1e-10);
            let via = h_via_kappa(&t, s).unwrap();
            prop_assert!(rel(via, a) < 1e-9, "H {} vs κ path {}", a, via);
        }

        #[test]
        fn h1_matches_h(t in random_surface(), s in sample_s()) {
            let a = h1(&t, s).unwrap();
            let b = h1_via_h(&t, s).unwrap();
            prop_assert!(rel(b, a) < 1e-9, "{} vs {}", a, b);
        }

        #[test]
        fn kappa_involution_and_dual_path(t in random_surface(), s in sample_s()) {
            let a = kappa(&t, s).unwrap();
            let b = kappa(&t, 1.0 - s).unwrap();
            let den = kappa_branch_denominator(&t).unwrap();
            prop_assert!(branch_deviation((a * b).ln(), c(0.0, 0.0), den) < 1e-9);
            let d = kappa_def(&t, s).unwrap();
            // The definition path is single-valued: the involution is exact there.
            prop_assert!(rel(d * kappa_def(&t, 1.0 - s).unwrap(), c(1.0, 0.0)) < 1e-9);
            prop_assert!(branch_deviation(a.ln(), d.ln(), den) < 1e-9, "closed {} vs def {}", a, d);
        }

        #[test]
        fn weight_conjugation(t in random_surface(), s in sample_s()) {
            let conj = TwistedSurface::new(t.sig.clone(), t.ms.conjugate(&t.sig), t.data.clone()).unwrap();
            prop_assert!(rel(h(&conj, s).unwrap(), h(&t, s).unwrap()) < 1e-10);
        }
    }
}
