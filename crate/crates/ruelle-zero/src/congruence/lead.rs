//! Order and lead coefficient of R(s; χ) at s = 0 for Γ₀(N).

use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

use super::characters::DirichletCharacter;
use super::level::{chi_on_parabolic, cusp_set, elliptic_action, level_invariants, LevelInvariants};
use super::scattering::{scattering_lead, ScatteringLead};
use crate::funceq::{ScatteringData, TwistedSurface};
use crate::leadterm::{lead_term, LeadTermResult};
use crate::model::{Angle, MultiplierSystem, OrbifoldSignature};
use crate::special::{FactoredMagnitude, SignedMagnitude};
use crate::Result;

/// P(N; χ) = ∏ over nonsingular cusps of 2|1 − χ(S_{a/c})|^{−1} = ∏ 1/|sin πβ|.
pub fn parabolic_product(chi: &DirichletCharacter) -> Result<FactoredMagnitude> {
    let mut out = FactoredMagnitude::one();
    for c in cusp_set(chi.modulus()) {
        let beta = chi_on_parabolic(&c, chi);
        if !beta.is_zero() {
            out = out / FactoredMagnitude::sin_pi(beta)?;
        }
    }
    Ok(out)
}

/// Everything that enters the congruence lead term, for reporting.
#[derive(Clone, Debug, Serialize)]
pub struct CongruenceReport {
    pub invariants: LevelInvariants,
    pub character: DirichletCharacter,
    pub tau0: u64,
    pub tilde_tau0: u64,
    pub c1: u64,
    pub c2: u64,
    pub c3: u64,
    pub scattering: ScatteringLead,
    pub e_factor: FactoredMagnitude,
    pub p_factor: FactoredMagnitude,
    pub lead: LeadTermResult,
}

/// ord_R(0) = (τ₀ − #F₀) + Σ_F #{p | mq₁ : ψ(p) = 1} + 2g − 2 + ρ + τ − τ₀ − τ̃₀ and
/// |lead| = |d(1)a_{n₀}|^{−1} 2^{2g−2} π^{(2g−2+ρ+τ) − τ₀/2 − τ̃₀} E(N; χ) P(N; χ).
pub fn congruence_report(chi: &DirichletCharacter) -> Result<CongruenceReport> {
    let inv = level_invariants(chi.modulus())?;
    let ea = elliptic_action(chi)?;
    let sc = scattering_lead(chi)?;
    let p_factor = parabolic_product(chi)?;
    let tau0 = sc.f_count as i64;
    let g2 = 2 * inv.genus as i64 - 2;
    let euler = g2 + inv.rho as i64 + inv.tau as i64;
    let tilde = ea.tilde_tau0 as i64;
    let order = (tau0 - sc.f0_count as i64) + sc.unit_prime_total as i64 + euler - tau0 - tilde;
    let pi_exp = Rational64::from_integer(euler - tilde) - Rational64::new(tau0, 2);
    let magnitude = sc.a_n0_d1_abs.inv()
        * FactoredMagnitude::integer(2)?.powi(g2)
        * FactoredMagnitude::pi().pow(pi_exp)
        * ea.e_factor.clone()
        * p_factor.clone();
    Ok(CongruenceReport {
        invariants: inv,
        character: chi.clone(),
        tau0: tau0 as u64,
        tilde_tau0: ea.tilde_tau0,
        c1: ea.c1,
        c2: ea.c2,
        c3: ea.c3,
        scattering: sc,
        e_factor: ea.e_factor,
        p_factor,
        lead: LeadTermResult { order, magnitude, sign_known: false, sign: None },
    })
}

pub fn ruelle_lead_congruence(chi: &DirichletCharacter) -> Result<LeadTermResult> {
    Ok(congruence_report(chi)?.lead)
}

/// Γ₀(N) with χ as a general twisted orbifold: signature from the level
/// invariants, elliptic residues and parabolic angles from the character
/// action, scattering data (n₀, |a_{n₀}d(1)|) with d(1) = 1 and unknown signs.
pub fn congruence_surface(chi: &DirichletCharacter) -> Result<TwistedSurface> {
    let inv = level_invariants(chi.modulus())?;
    let ea = elliptic_action(chi)?;
    let sc = scattering_lead(chi)?;
    let sig = OrbifoldSignature::new(inv.genus as u32, inv.tau as u32, ea.classes.iter().map(|c| c.order).collect())?;
    let residues = ea.classes.iter().map(|c| vec![c.residue()]).collect();
    let angles = cusp_set(chi.modulus()).iter().map(|c| vec![Angle::Exact(chi_on_parabolic(c, chi))]).collect();
    let ms = MultiplierSystem::new(&sig, 1, Rational64::zero(), residues, angles)?;
    let data = ScatteringData {
        n0: sc.n0,
        a_n0: SignedMagnitude { sign: None, magnitude: sc.a_n0_d1_abs },
        d1: SignedMagnitude::one(),
        c1: 0.0,
        half_trace_exponent: None,
        phi: None,
    };
    TwistedSurface::new(sig, ms, data)
}

/// The lead term through the general squared-limit formula on
/// [`congruence_surface`]; an independent path to [`ruelle_lead_congruence`].
pub fn ruelle_lead_orbifold(chi: &DirichletCharacter) -> Result<LeadTermResult> {
    lead_term(&congruence_surface(chi)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leadterm::lead_term_k0;
    use std::f64::consts::PI;

    #[test]
    fn level_one_value() {
        let chi = DirichletCharacter::trivial(1).unwrap();
        let lead = ruelle_lead_congruence(&chi).unwrap();
        assert_eq!(lead.order, -2);
        assert!((lead.magnitude.eval() - 9.0 / (PI * PI)).abs() < 1e-12);
        let expect = FactoredMagnitude::integer(9).unwrap() / FactoredMagnitude::pi().powi(2);
        assert_eq!(lead.magnitude, expect);
        let orb = ruelle_lead_orbifold(&chi).unwrap();
        assert_eq!(orb.order, -2);
        assert_eq!(orb.magnitude, expect);
    }

    #[test]
    fn squarefree_trivial_actions() {
        for n in [2u64, 3, 5, 6, 10, 15, 30] {
            let chi = DirichletCharacter::trivial(n).unwrap();
            let rep = congruence_report(&chi).unwrap();
            assert!(rep.p_factor.is_one());
            assert_eq!(rep.tilde_tau0, rep.invariants.rho);
        }
    }

    #[test]
    fn three_paths_agree_on_even_characters() {
        for n in 1..=60u64 {
            for chi in DirichletCharacter::all(n).unwrap().into_iter().filter(|c| c.is_even()) {
                let a = ruelle_lead_congruence(&chi).unwrap();
                let surf = congruence_surface(&chi).unwrap();
                let b = lead_term(&surf).unwrap();
                let c = lead_term_k0(&surf).unwrap();
                assert_eq!(a.order, b.order, "{chi}");
                assert_eq!(a.order, c.order, "{chi}");
                let (la, lb, lc) = (a.magnitude.ln_eval(), b.magnitude.ln_eval(), c.magnitude.ln_eval());
                assert!((la - lb).abs() < 1e-10 && (la - lc).abs() < 1e-10, "{chi}: {la} {lb} {lc}");
                assert_eq!(surf.profile.tau0 as u64, congruence_report(&chi).unwrap().tau0);
            }
        }
    }

    #[test]
    fn prime_level_trivial_order() {
        // N = 11: g = 1, ρ = 0, τ = τ₀ = #F₀ = 2, one unit prime, τ̃₀ = 0
        let chi = DirichletCharacter::trivial(11).unwrap();
        let rep = congruence_report(&chi).unwrap();
        assert_eq!(rep.scattering.n0, -1);
        assert_eq!(rep.lead.order, (2 - 2) + 1 + (0 + 0 + 2) - 2 - 0);
    }
}
