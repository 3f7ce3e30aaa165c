//! Scattering sets F, F₀, G_{N,q}, the scattering determinant φ(s; χ) and
//! its Laurent data (n₀, |a_{n₀}d(1)|) at s = 0.

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

use super::characters::{euler_phi, DirichletCharacter};
use super::level::divisors;
use super::lvalues::{l_function, l_value_atom};
use crate::special::{factorize, log_gamma, FactoredMagnitude};
use crate::{Error, Result};

/// A member (m, ξ₁, ξ₂) of F with ξ₁, ξ₂ primitive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScatteringTriple {
    pub m: u64,
    pub xi1: DirichletCharacter,
    pub xi2: DirichletCharacter,
}

impl ScatteringTriple {
    pub fn q1(&self) -> u64 {
        self.xi1.modulus()
    }

    pub fn q2(&self) -> u64 {
        self.xi2.modulus()
    }

    /// ψ = (ξ₁ξ₂)_*.
    pub fn psi(&self) -> DirichletCharacter {
        self.xi1.mul(&self.xi2).primitive()
    }

    pub fn in_f0(&self) -> bool {
        self.psi().modulus() == 1
    }

    /// Primes dividing m·q₁.
    pub fn primes(&self) -> Vec<u64> {
        factorize(self.m * self.q1()).into_iter().map(|(p, _)| p).collect()
    }

    /// #{p | mq₁ : ψ(p) = 1}.
    pub fn unit_prime_count(&self) -> u64 {
        let psi = self.psi();
        self.primes().into_iter().filter(|&p| psi.is_one_at(p as i64)).count() as u64
    }

    /// ξ₁ξ₂ω_m as a character mod mq₁.
    pub fn imprimitive_psi(&self) -> DirichletCharacter {
        self.psi().induce(self.m * self.q1()).expect("cond(ψ) divides mq₁")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScatteringSets {
    pub level: u64,
    pub f: Vec<ScatteringTriple>,
    pub f0: Vec<ScatteringTriple>,
    /// G_{N,q} = {m | N : q | N/gcd(m, N/m)}.
    pub g: Vec<u64>,
}

/// Primitive characters of conductor dividing m, ordered by the exponent
/// vectors of the characters mod m inducing them.
fn primitive_dividing(m: u64) -> Result<Vec<DirichletCharacter>> {
    let mut out: Vec<DirichletCharacter> = Vec::new();
    for c in DirichletCharacter::all(m)? {
        let p = c.primitive();
        if !out.contains(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Exhaustive enumeration: for each m | N and each primitive ξ₂ with q₂ | m,
/// the condition cond(χξ₂ξ̄₁) = 1 forces ξ₁ = (χξ₂)_*; the triple is kept
/// when mq₁ | N and ξ₁(−1) = ξ₂(−1).
pub fn scattering_sets(chi: &DirichletCharacter) -> Result<ScatteringSets> {
    let n = chi.modulus();
    let q = chi.conductor();
    let mut f = Vec::new();
    for m in divisors(n) {
        for xi2 in primitive_dividing(m)? {
            let xi1 = chi.mul(&xi2).primitive();
            if n % (m * xi1.modulus()) != 0 || xi1.parity() != xi2.parity() {
                continue;
            }
            f.push(ScatteringTriple { m, xi1, xi2 });
        }
    }
    let f0 = f.iter().filter(|t| t.in_f0()).cloned().collect();
    let g = divisors(n).into_iter().filter(|m| (n / m.gcd(&(n / m))) % q == 0).collect();
    Ok(ScatteringSets { level: n, f, f0, g })
}

impl ScatteringSets {
    /// ∏_{m ∈ G} (N/gcd(m, N/m))^{φ(gcd(m, N/m))}.
    pub fn g_product(&self) -> Result<FactoredMagnitude> {
        let n = self.level;
        let mut out = FactoredMagnitude::one();
        for &m in &self.g {
            let g = m.gcd(&(n / m));
            out = out * FactoredMagnitude::integer(n / g)?.powi(euler_phi(g) as i64);
        }
        Ok(out)
    }

    pub fn unit_prime_total(&self) -> u64 {
        self.f.iter().map(|t| t.unit_prime_count()).sum()
    }
}

/// Laurent data of φ̃ at s = 0.
#[derive(Clone, Debug, Serialize)]
pub struct ScatteringLead {
    pub n0: i64,
    pub a_n0_d1_abs: FactoredMagnitude,
    pub f_count: u64,
    pub f0_count: u64,
    /// Σ_F #{p | mq₁ : ψ(p) = 1}.
    pub unit_prime_total: u64,
}

fn require_even(chi: &DirichletCharacter) -> Result<()> {
    if !chi.is_even() {
        return Err(Error::InvalidInput(format!(
            "{chi} is odd; Γ₀(N) contains −I, so weight-zero data needs χ(−1) = 1"
        )));
    }
    Ok(())
}

/// |1 − ψ(p)p^{−2}|.
fn euler_numerator(psi: &DirichletCharacter, p: u64) -> Result<FactoredMagnitude> {
    let p2 = (p * p) as i64;
    match psi.angle(p as i64) {
        None => Ok(FactoredMagnitude::one()),
        Some(t) if t.is_zero() => FactoredMagnitude::rational(p2 - 1, p2),
        Some(t) if t == Rational64::new(1, 2) => FactoredMagnitude::rational(p2 + 1, p2),
        Some(t) => {
            let z = Complex64::from_polar(1.0 / p2 as f64, 2.0 * std::f64::consts::PI * (*t.numer() as f64 / *t.denom() as f64));
            FactoredMagnitude::residue((Complex64::new(1.0, 0.0) - z).norm())
        }
    }
}

/// |1 − ψ(p)| if ψ(p) ≠ 1, else 2 log p.
fn euler_denominator(psi: &DirichletCharacter, p: u64) -> Result<FactoredMagnitude> {
    match psi.angle(p as i64) {
        None => Ok(FactoredMagnitude::one()),
        Some(t) if t.is_zero() => Ok(FactoredMagnitude::integer(2)? * FactoredMagnitude::log_int(p)?),
        Some(t) => Ok(FactoredMagnitude::integer(2)? * FactoredMagnitude::sin_pi(t)?),
    }
}

/// n₀ = −(#F − #F₀) − Σ_F #{p | mq₁ : ψ(p) = 1} and
///
/// |a_{n₀}d(1)| = (2π^{3/2})^{−#F} (π²/3)^{#F₀} ∏_G (N/gcd)^{φ(gcd)}
///   × ∏_F cond(ξ₁) cond(ψ)^{−1/2} ∏_{p|mq₁} |1 − ψ(p)p^{−2}| / (∏_{ψ(p)≠1} |1 − ψ(p)| ∏_{ψ(p)=1} 2 log p)
///   × ∏_{F∖F₀} |L(2, ψ)| / |L(1, ψ̄)|.
pub fn scattering_lead(chi: &DirichletCharacter) -> Result<ScatteringLead> {
    require_even(chi)?;
    let sets = scattering_sets(chi)?;
    let nf = sets.f.len() as i64;
    let nf0 = sets.f0.len() as i64;
    let total = sets.unit_prime_total();
    let n0 = -(nf - nf0) - total as i64;

    let two = FactoredMagnitude::integer(2)?;
    let pi = FactoredMagnitude::pi();
    let mut mag = (two * pi.pow(Rational64::new(3, 2))).powi(-nf)
        * (pi.powi(2) / FactoredMagnitude::integer(3)?).powi(nf0)
        * sets.g_product()?;
    for t in &sets.f {
        let psi = t.psi();
        mag = mag * FactoredMagnitude::integer(t.q1())? * FactoredMagnitude::integer(psi.modulus())?.pow(Rational64::new(-1, 2));
        for p in t.primes() {
            mag = mag * euler_numerator(&psi, p)? / euler_denominator(&psi, p)?;
        }
        if !t.in_f0() {
            mag = mag * l_value_atom(2, &psi)? / l_value_atom(1, &psi.conj())?;
        }
    }
    Ok(ScatteringLead { n0, a_n0_d1_abs: mag, f_count: nf as u64, f0_count: nf0 as u64, unit_prime_total: total })
}

/// φ(s; χ) = (−1)^{(#F−#F₀)/2} (∏_G (N/gcd)^{φ(gcd)})^{1−2s} (π^{2s−1}Γ(1−s)/Γ(s))^{#F}
///   × ∏_F q₁^{1−2s} L(2−2s, ξ₁ξ₂ω_m)/L(2s, ξ₁ξ₂ω_m),
/// with the sign read as e^{iπ(#F−#F₀)/2}.
pub fn scattering_determinant(chi: &DirichletCharacter, s: Complex64) -> Result<Complex64> {
    let sets = scattering_sets(chi)?;
    scattering_determinant_from_sets(&sets, s)
}

fn scattering_determinant_from_sets(sets: &ScatteringSets, s: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let nf = sets.f.len() as f64;
    let diff = (sets.f.len() - sets.f0.len()) as f64;
    let mut log = Complex64::new(0.0, std::f64::consts::FRAC_PI_2 * diff);
    log += (one - 2.0 * s) * sets.g_product()?.ln_eval();
    let pi = std::f64::consts::PI;
    log += nf * ((2.0 * s - 1.0) * pi.ln() + log_gamma(one - s)? - log_gamma(s)?);
    let mut acc = Complex64::new(1.0, 0.0);
    for t in &sets.f {
        log += (one - 2.0 * s) * (t.q1() as f64).ln();
        acc *= imprimitive_l(2.0 - 2.0 * s, t)? / imprimitive_l(2.0 * s, t)?;
    }
    Ok(log.exp() * acc)
}

/// 1 − e^{w} without cancellation for small |w|.
fn one_minus_exp(w: Complex64) -> Complex64 {
    if w.norm() < 1e-3 {
        -(w + w * w / 2.0 + w * w * w / 6.0 + w * w * w * w / 24.0)
    } else {
        Complex64::new(1.0, 0.0) - w.exp()
    }
}

/// L(s, ξ₁ξ₂ω_m) = L(s, ψ) ∏_{p | mq₁, p ∤ cond ψ} (1 − ψ(p)p^{−s}). The
/// Euler factors are kept apart so that zeros at s = 0 carry full relative
/// precision.
fn imprimitive_l(s: Complex64, t: &ScatteringTriple) -> Result<Complex64> {
    let psi = t.psi();
    let mut v = l_function(s, &psi)?;
    for p in t.primes() {
        if let Some(theta) = psi.angle(p as i64) {
            let arg = 2.0 * std::f64::consts::PI * (*theta.numer() as f64 / *theta.denom() as f64);
            v *= one_minus_exp(Complex64::new(0.0, arg) - s * (p as f64).ln());
        }
    }
    Ok(v)
}

/// |lim_{s→0} s^{−n₀} φ(s)(Γ(s)/Γ(s−½))^{τ₀}| evaluated on s = h, h/2, h/4, …
/// with Richardson extrapolation. This is |a_{n₀}d(1)| computed from φ
/// directly, independent of the closed form.
pub fn numeric_scattering_lead(chi: &DirichletCharacter, n0: i64, h: f64, levels: usize) -> Result<f64> {
    let sets = scattering_sets(chi)?;
    let tau0 = sets.f.len() as f64;
    let g = |s: f64| -> Result<Complex64> {
        let z = Complex64::new(s, 0.0);
        let phi = scattering_determinant_from_sets(&sets, z)?;
        let gam = (log_gamma(z)? - log_gamma(z - 0.5)?) * tau0;
        Ok(phi * gam.exp() * s.powi(-n0 as i32))
    };
    let mut table: Vec<Complex64> = (0..levels).map(|j| g(h / 2f64.powi(j as i32))).collect::<Result<_>>()?;
    for order in 1..levels {
        let fac = 2f64.powi(order as i32);
        table = table.windows(2).map(|w| (w[1] * fac - w[0]) / (fac - 1.0)).collect();
    }
    Ok(table[0].norm())
}
