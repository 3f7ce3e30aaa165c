//! Levels N = ℓ² for a prime ℓ ≥ 5, with closed forms specialized from the
//! explicit scattering lists for conductor ℓ^b, b ∈ {0, 1, 2}.
//!
//! For b = 0 the unit-prime count Σ_F #{p | mq₁ : ψ(p) = 1} is 3, and for
//! b = 1 it is 2: (ℓ,1,1), (ℓ,(·/ℓ),(·/ℓ)) and (ℓ²,1,1) each contribute ℓ
//! when b = 0, and the two members of F₀ contribute when b = 1. With τ = ℓ + 1
//! this gives ord_R(0) = 2g − 2 + ρ − τ̃₀ + ℓ + [b ≥ 1]. The older closed
//! form, with Σ = 2 − b and no τ term, is kept as [`Variant::Printed`] for
//! comparison only.

use num_integer::Integer;
use num_rational::Rational64;
use serde::Serialize;

use super::characters::DirichletCharacter;
use super::level::elliptic_action;
use super::lvalues::l_value_atom;
use crate::leadterm::LeadTermResult;
use crate::special::FactoredMagnitude;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Variant {
    /// Specialization consistent with the general formula.
    Corrected,
    /// ord = −2 + b − τ̃₀ + (ℓ−6)(ℓ+1)/6 + {5/3, 1, 2/3, 0}, π-exponent
    /// τ₀ − 3(2−b) + ord and A₂(1) = ℓ^{3/2+(ℓ−5)/2}(…).
    Printed,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeSquareCase {
    pub ell: u64,
    pub b: u32,
    pub variant: Variant,
    pub rho: u64,
    pub tau0: u64,
    /// c₁(ℓ) = 2g − 2.
    pub c1: i64,
    pub tilde_tau0: u64,
    pub f0_count: u64,
    pub unit_prime_total: u64,
    pub a1: FactoredMagnitude,
    pub a2: FactoredMagnitude,
    pub a3: FactoredMagnitude,
    pub e_factor: FactoredMagnitude,
    pub p_factor: FactoredMagnitude,
    pub lead: LeadTermResult,
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// (ρ, offset of 2g − 2 below (ℓ−6)(ℓ+1)/6, printed order offset) by ℓ mod 12.
fn mod12_table(ell: u64) -> (u64, Rational64, Rational64) {
    let r = |n, d| Rational64::new(n, d);
    match ell % 12 {
        1 => (4, r(7, 3), r(5, 3)),
        5 => (2, r(1, 1), r(1, 1)),
        7 => (2, r(4, 3), r(2, 3)),
        _ => (0, r(0, 1), r(0, 1)),
    }
}

fn l_ratio(psi: &DirichletCharacter) -> Result<FactoredMagnitude> {
    Ok(l_value_atom(2, psi)? / l_value_atom(1, psi)?)
}

pub fn prime_square_details(ell: u64, b: u32, chi: &DirichletCharacter, variant: Variant) -> Result<PrimeSquareCase> {
    if ell < 5 || !is_prime(ell) {
        return Err(Error::InvalidInput(format!("ℓ = {ell} must be a prime ≥ 5")));
    }
    if b > 2 {
        return Err(Error::InvalidInput(format!("b = {b} not in {{0, 1, 2}}")));
    }
    let n = ell * ell;
    if chi.modulus() != n || chi.conductor() != ell.pow(b) {
        return Err(Error::InvalidInput(format!("{chi} is not a character mod {n} of conductor {ell}^{b}")));
    }
    if !chi.is_even() {
        return Err(Error::InvalidInput(format!("{chi} is odd")));
    }
    let lf = ell as i64;
    let (rho, c1_offset, printed_offset) = mod12_table(ell);
    let base = Rational64::new((lf - 6) * (lf + 1), 6);
    let c1 = base - c1_offset;
    debug_assert!(c1.is_integer());
    let c1 = c1.to_integer();
    let tau0: u64 = if b == 2 { 2 } else { ell + 1 };
    let f0_count: u64 = [4, 2, 0][b as usize];
    let unit_prime_total: u64 = match variant {
        Variant::Corrected => [3, 2, 0][b as usize],
        Variant::Printed => 2 - b as u64,
    };

    let ea = elliptic_action(chi)?;
    let tilde = ea.tilde_tau0 as i64;

    let order = match variant {
        Variant::Corrected => c1 + rho as i64 - tilde + lf + i64::from(b >= 1),
        Variant::Printed => {
            let o = Rational64::from_integer(-2 + b as i64 - tilde) + base + printed_offset;
            debug_assert!(o.is_integer());
            o.to_integer()
        }
    };

    let ellm = FactoredMagnitude::integer(ell)?;
    let a1 = if b == 2 { ellm.powi(4) } else { ellm.powi(4 + lf - 1) };
    let euler = FactoredMagnitude::rational(lf * lf - 1, lf * lf)? / (FactoredMagnitude::integer(2)? * FactoredMagnitude::log_int(ell)?);
    let a2 = match (b, variant) {
        (0, _) => ellm.pow(Rational64::new(1, 1) + Rational64::new(lf - 3, 2)) * euler.powi(3),
        (1, Variant::Corrected) => ellm.pow(Rational64::new(3, 2) + Rational64::new(lf - 4, 2)) * euler.powi(2),
        (1, Variant::Printed) => ellm.pow(Rational64::new(3, 2) + Rational64::new(lf - 5, 2)) * euler.powi(2),
        _ => FactoredMagnitude::one(),
    };

    let mut a3 = FactoredMagnitude::one();
    match b {
        0 => {
            for xi in DirichletCharacter::all(ell)? {
                let psi = xi.mul(&xi);
                if !psi.is_trivial() {
                    a3 = a3 * l_ratio(&psi)?;
                }
            }
        }
        1 => {
            let chi_p = chi.primitive();
            a3 = l_ratio(&chi_p)?.powi(2);
            for xi in DirichletCharacter::all(ell)? {
                let psi = chi_p.mul(&xi).mul(&xi);
                if !psi.is_trivial() {
                    a3 = a3 * l_ratio(&psi)?;
                }
            }
        }
        _ => a3 = l_ratio(chi)?.powi(2),
    }

    let mut p_factor = FactoredMagnitude::one();
    if b == 2 {
        for a in 1..ell {
            let theta = chi.angle(1 - (a * ell) as i64).expect("1 − aℓ is a unit");
            // 2|1 − e^{2πiθ}|^{−1} = 1/|sin πθ|
            p_factor = p_factor / FactoredMagnitude::sin_pi(theta)?;
        }
    }

    let three_exp = match variant {
        Variant::Corrected => f0_count as i64,
        Variant::Printed => 4 - 2 * b as i64,
    };
    let pi_exp = match variant {
        Variant::Corrected => tau0 as i64 + order - f0_count as i64 - unit_prime_total as i64,
        Variant::Printed => tau0 as i64 - 3 * (2 - b as i64) + order,
    };
    let magnitude = FactoredMagnitude::integer(2)?.powi(tau0 as i64 + c1)
        * FactoredMagnitude::integer(3)?.powi(three_exp)
        * FactoredMagnitude::pi().powi(pi_exp)
        / (a1.clone() * a2.clone() * a3.clone())
        * ea.e_factor.clone()
        * p_factor.clone();

    Ok(PrimeSquareCase {
        ell,
        b,
        variant,
        rho,
        tau0,
        c1,
        tilde_tau0: ea.tilde_tau0,
        f0_count,
        unit_prime_total,
        a1,
        a2,
        a3,
        e_factor: ea.e_factor,
        p_factor,
        lead: LeadTermResult { order, magnitude, sign_known: false, sign: None },
    })
}

pub fn prime_square_case(ell: u64, b: u32, chi: &DirichletCharacter) -> Result<LeadTermResult> {
    Ok(prime_square_details(ell, b, chi, Variant::Corrected)?.lead)
}

/// Even characters mod ℓ² grouped by b with cond = ℓ^b.
pub fn prime_square_characters(ell: u64) -> Result<Vec<(u32, DirichletCharacter)>> {
    let n = ell * ell;
    let mut out = Vec::new();
    for chi in DirichletCharacter::all(n)? {
        if !chi.is_even() {
            continue;
        }
        let q = chi.conductor();
        let b = if q == 1 {
            0
        } else if q == ell {
            1
        } else {
            2
        };
        debug_assert_eq!(q.gcd(&n), q);
        out.push((b, chi));
    }
    Ok(out)
}

/// Magnitude-only difference ln|x| − ln|y|; zero when the factorizations agree.
pub fn log_deviation(x: &FactoredMagnitude, y: &FactoredMagnitude) -> f64 {
    let q = x.clone() / y.clone();
    if q.is_one() {
        0.0
    } else {
        q.ln_eval()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::lead::{congruence_report, parabolic_product};
    use crate::congruence::level::level_invariants;
    use crate::congruence::scattering::scattering_sets;
    use crate::special::Atom;

    #[test]
    fn rejects_bad_input() {
        let chi = DirichletCharacter::trivial(9).unwrap();
        assert!(prime_square_case(3, 0, &chi).is_err());
        let chi = DirichletCharacter::trivial(81).unwrap();
        assert!(prime_square_case(9, 0, &chi).is_err());
        let chi = DirichletCharacter::trivial(25).unwrap();
        assert!(prime_square_case(5, 1, &chi).is_err());
        assert!(prime_square_case(7, 0, &chi).is_err());
    }

    #[test]
    fn table_matches_level_invariants() {
        for ell in [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            let inv = level_invariants(ell * ell).unwrap();
            let d = prime_square_details(ell, 0, &DirichletCharacter::trivial(ell * ell).unwrap(), Variant::Corrected).unwrap();
            assert_eq!(d.rho, inv.rho, "ℓ={ell}");
            assert_eq!(d.c1, 2 * inv.genus as i64 - 2, "ℓ={ell}");
            assert_eq!(d.tau0, ell + 1);
        }
        let d = prime_square_details(5, 0, &DirichletCharacter::trivial(25).unwrap(), Variant::Corrected).unwrap();
        assert_eq!(d.tau0, 6);
    }

    #[test]
    fn counts_match_explicit_sets() {
        for ell in [5u64, 7, 11, 13] {
            for (b, chi) in prime_square_characters(ell).unwrap() {
                let d = prime_square_details(ell, b, &chi, Variant::Corrected).unwrap();
                let sets = scattering_sets(&chi).unwrap();
                assert_eq!(d.f0_count, sets.f0.len() as u64, "ℓ={ell} {chi}");
                assert_eq!(d.unit_prime_total, sets.unit_prime_total(), "ℓ={ell} {chi}");
                assert_eq!(d.tau0, sets.f.len() as u64);
            }
        }
    }

    #[test]
    fn dual_path_with_general_formula() {
        for ell in [5u64, 7, 11, 13] {
            for (b, chi) in prime_square_characters(ell).unwrap() {
                let special = prime_square_details(ell, b, &chi, Variant::Corrected).unwrap();
                let general = congruence_report(&chi).unwrap();
                assert_eq!(special.lead.order, general.lead.order, "ℓ={ell} b={b} {chi}");
                let dev = log_deviation(&special.lead.magnitude, &general.lead.magnitude);
                assert!(dev.abs() < 1e-9, "ℓ={ell} b={b} {chi}: {dev}");
                // L-value atoms cancel exactly between the two paths
                let q = special.lead.magnitude.clone() / general.lead.magnitude.clone();
                assert!(q.atoms().all(|(a, _)| !matches!(a, Atom::LValue(_))), "ℓ={ell} {chi}: {q}");
            }
        }
    }

    #[test]
    fn primitive_mod_prime_square_parabolic_product() {
        for ell in [5u64, 7, 11] {
            for (b, chi) in prime_square_characters(ell).unwrap() {
                if b != 2 {
                    continue;
                }
                let d = prime_square_details(ell, b, &chi, Variant::Corrected).unwrap();
                assert_eq!(d.p_factor, parabolic_product(&chi).unwrap());
                let closed = 2f64.powi(ell as i32 - 1) / ell as f64;
                assert!((d.p_factor.eval() / closed - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn printed_variant_differs_in_order() {
        for ell in [5u64, 7, 11, 13] {
            for (b, chi) in prime_square_characters(ell).unwrap() {
                let c = prime_square_details(ell, b, &chi, Variant::Corrected).unwrap();
                let p = prime_square_details(ell, b, &chi, Variant::Printed).unwrap();
                let gap = c.lead.order - p.lead.order;
                assert_eq!(gap, ell as i64 + if b == 2 { 1 } else { 2 }, "ℓ={ell} b={b}");
            }
        }
    }
}
