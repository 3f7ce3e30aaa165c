//! Orbifold signatures, multiplier-system eigenvalue data and the
//! combinatorial profile every later formula consumes.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Genus, number of cusps and orders of the elliptic classes of a Fuchsian
/// group of the first kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbifoldSignature {
    genus: u32,
    cusps: u32,
    elliptic_orders: Vec<u32>,
}

impl OrbifoldSignature {
    pub fn new(genus: u32, cusps: u32, elliptic_orders: Vec<u32>) -> Result<Self> {
        if let Some(nu) = elliptic_orders.iter().find(|&&nu| nu < 2) {
            return Err(Error::InvalidInput(format!("elliptic order {nu} < 2")));
        }
        let sig = Self { genus, cusps, elliptic_orders };
        let a = sig.area_over_2pi();
        if !a.is_positive() {
            return Err(Error::NonHyperbolic(a.to_string()));
        }
        Ok(sig)
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    /// τ, the number of inequivalent cusps.
    pub fn cusps(&self) -> u32 {
        self.cusps
    }

    pub fn elliptic_orders(&self) -> &[u32] {
        &self.elliptic_orders
    }

    /// ρ, the number of elliptic classes.
    pub fn rho(&self) -> u32 {
        self.elliptic_orders.len() as u32
    }

    pub fn is_compact(&self) -> bool {
        self.cusps == 0
    }

    /// ω/2π = 2g − 2 + Σ(1 − 1/ν_j) + τ, exactly.
    pub fn area_over_2pi(&self) -> Rational64 {
        let mut a = Rational64::from_integer(2 * self.genus as i64 - 2 + self.cusps as i64);
        for &nu in &self.elliptic_orders {
            a += Rational64::one() - Rational64::new(1, nu as i64);
        }
        a
    }

    /// 2g − 2 + ρ + τ.
    pub fn euler_like(&self) -> i64 {
        2 * self.genus as i64 - 2 + self.rho() as i64 + self.cusps as i64
    }

    pub fn lcm_orders(&self) -> u64 {
        self.elliptic_orders.iter().fold(1u64, |acc, &nu| acc.lcm(&(nu as u64)))
    }
}

/// The hyperbolic area 2π(2g − 2 + Σ(1 − 1/ν_j) + τ).
pub fn hyperbolic_area(sig: &OrbifoldSignature) -> f64 {
    2.0 * std::f64::consts::PI * sig.area_over_2pi().to_f64().unwrap_or(f64::NAN)
}

/// A parabolic eigenangle β ∈ [0, 1), exact when possible.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Angle {
    Exact(Rational64),
    Real(f64),
}

impl Angle {
    pub fn value(&self) -> f64 {
        match self {
            Angle::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Angle::Real(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Angle::Exact(q) => q.is_zero(),
            Angle::Real(x) => *x == 0.0,
        }
    }

    fn in_unit_interval(&self) -> bool {
        match self {
            Angle::Exact(q) => !q.is_negative() && *q < Rational64::one(),
            Angle::Real(x) => (0.0..1.0).contains(x),
        }
    }

    fn add(self, other: Angle) -> Angle {
        match (self, other) {
            (Angle::Exact(a), Angle::Exact(b)) => Angle::Exact(a + b),
            (a, b) => Angle::Real(a.value() + b.value()),
        }
    }
}

/// Eigenvalue data of a multiplier system of weight 2k and dimension m:
/// the eigenvalues of χ(R_j) are exp(−2πi(k + α_{jp})/ν_j) and those of
/// χ(S_j) are exp(2πiβ_{jp}).
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierSystem {
    dim: u32,
    weight: Rational64,
    elliptic_residues: Vec<Vec<u32>>,
    parabolic_angles: Vec<Vec<Angle>>,
}

impl MultiplierSystem {
    /// Validates the data against `sig`. For compact signatures the weight
    /// must lie in the admissibility lattice. Parabolic angles are reordered
    /// so that the zero angles come first.
    pub fn new(
        sig: &OrbifoldSignature,
        dim: u32,
        weight: Rational64,
        elliptic_residues: Vec<Vec<u32>>,
        parabolic_angles: Vec<Vec<Angle>>,
    ) -> Result<Self> {
        if !admissibility_check(sig, dim.max(1), weight) {
            return Err(Error::NotAdmissible(weight.to_string()));
        }
        Self::new_continuous_weight(sig, dim, weight, elliptic_residues, parabolic_angles)
    }

    /// Like [`MultiplierSystem::new`] without the lattice condition on k.
    /// Used when k is treated as a continuous parameter of a family.
    pub fn new_continuous_weight(
        sig: &OrbifoldSignature,
        dim: u32,
        weight: Rational64,
        elliptic_residues: Vec<Vec<u32>>,
        mut parabolic_angles: Vec<Vec<Angle>>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension m must be ≥ 1".into()));
        }
        if elliptic_residues.len() != sig.elliptic_orders.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} elliptic residue lists for ρ = {}",
                elliptic_residues.len(),
                sig.rho()
            )));
        }
        if parabolic_angles.len() != sig.cusps as usize {
            return Err(Error::DimensionMismatch(format!(
                "{} parabolic angle lists for τ = {}",
                parabolic_angles.len(),
                sig.cusps
            )));
        }
        for (j, (res, &nu)) in elliptic_residues.iter().zip(&sig.elliptic_orders).enumerate() {
            if res.len() != dim as usize {
                return Err(Error::DimensionMismatch(format!(
                    "elliptic class {j} has {} residues, expected m = {dim}",
                    res.len()
                )));
            }
            if let Some(a) = res.iter().find(|&&a| a >= nu) {
                return Err(Error::InvalidInput(format!("residue {a} of class {j} not in 0..{nu}")));
            }
        }
        for (j, angles) in parabolic_angles.iter_mut().enumerate() {
            if angles.len() != dim as usize {
                return Err(Error::DimensionMismatch(format!(
                    "cusp {j} has {} angles, expected m = {dim}",
                    angles.len()
                )));
            }
            if let Some(b) = angles.iter().find(|b| !b.in_unit_interval()) {
                return Err(Error::InvalidInput(format!("angle {b:?} of cusp {j} not in [0,1)")));
            }
            let (zeros, rest): (Vec<Angle>, Vec<Angle>) = angles.iter().partition(|b| b.is_zero());
            *angles = zeros.into_iter().chain(rest).collect();
        }
        Ok(Self { dim, weight, elliptic_residues, parabolic_angles })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// k, half the weight.
    pub fn weight(&self) -> Rational64 {
        self.weight
    }

    pub fn elliptic_residues(&self) -> &[Vec<u32>] {
        &self.elliptic_residues
    }

    pub fn parabolic_angles(&self) -> &[Vec<Angle>] {
        &self.parabolic_angles
    }

    /// The system of weight −k with residues α ↦ (ν − α) mod ν.
    pub fn conjugate(&self, sig: &OrbifoldSignature) -> Self {
        let residues = self
            .elliptic_residues
            .iter()
            .zip(sig.elliptic_orders())
            .map(|(res, &nu)| res.iter().map(|&a| (nu - a) % nu).collect())
            .collect();
        Self { weight: -self.weight, elliptic_residues: residues, ..self.clone() }
    }
}

/// True iff k ∈ (1/m)(2π/ω)(1/lcm ν)ℤ; always true with cusps.
pub fn admissibility_check(sig: &OrbifoldSignature, m: u32, k: Rational64) -> bool {
    if !sig.is_compact() {
        return true;
    }
    let scaled = k * Rational64::from_integer(m as i64) * sig.area_over_2pi() * Rational64::from_integer(sig.lcm_orders() as i64);
    scaled.is_integer()
}

/// r_j(ℓ), α_j(ℓ), α̃_j(ℓ), τ₀ and τ̃₀ for a multiplier system.
#[derive(Clone, Debug, PartialEq)]
pub struct CombinatorialProfile {
    pub tau0: u32,
    pub tilde_tau0: u32,
    /// m_j, the number of zero angles at cusp j.
    pub zero_angles: Vec<u32>,
    pub beta_sums: Vec<Angle>,
    /// r[j][ℓ mod ν_j].
    r: Vec<Vec<u32>>,
    alpha_sums: Vec<Vec<u64>>,
    alpha_tilde_sums: Vec<Vec<u64>>,
    /// k_j ∈ {1, …, ν_j} with k_j ≡ k, present when k ∈ ℤ.
    pub k_residues: Option<Vec<u32>>,
    orders: Vec<u32>,
}

impl CombinatorialProfile {
    fn idx(&self, j: usize, l: i64) -> usize {
        l.rem_euclid(self.orders[j] as i64) as usize
    }

    /// r_j(ℓ) = #{p : α_{jp} + ℓ ≡ 0 mod ν_j}, ν_j-periodic in ℓ.
    pub fn r(&self, j: usize, l: i64) -> u32 {
        self.r[j][self.idx(j, l)]
    }

    /// α_j(ℓ) = Σ_p ((α_{jp} + ℓ) mod ν_j).
    pub fn alpha_sum(&self, j: usize, l: i64) -> u64 {
        self.alpha_sums[j][self.idx(j, l)]
    }

    /// α̃_j(ℓ) = Σ_p ((−α_{jp} + ℓ) mod ν_j).
    pub fn alpha_tilde_sum(&self, j: usize, l: i64) -> u64 {
        self.alpha_tilde_sums[j][self.idx(j, l)]
    }

    pub fn k_integral(&self) -> bool {
        self.k_residues.is_some()
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }
}

/// Builds the combinatorial profile of `ms` on `sig`.
pub fn residue_profile(sig: &OrbifoldSignature, ms: &MultiplierSystem) -> Result<CombinatorialProfile> {
    if ms.elliptic_residues.len() != sig.elliptic_orders.len() || ms.parabolic_angles.len() != sig.cusps as usize {
        return Err(Error::DimensionMismatch("multiplier system does not match signature".into()));
    }
    let k = ms.weight;
    let mut r = Vec::new();
    let mut alpha_sums = Vec::new();
    let mut alpha_tilde_sums = Vec::new();
    for (res, &nu) in ms.elliptic_residues.iter().zip(&sig.elliptic_orders) {
        let nu = nu as i64;
        let mut rj = vec![0u32; nu as usize];
        let mut aj = vec![0u64; nu as usize];
        let mut atj = vec![0u64; nu as usize];
        for l in 0..nu {
            for &a in res {
                let a = a as i64;
                if (a + l).rem_euclid(nu) == 0 {
                    rj[l as usize] += 1;
                }
                aj[l as usize] += (a + l).rem_euclid(nu) as u64;
                atj[l as usize] += (-a + l).rem_euclid(nu) as u64;
            }
        }
        r.push(rj);
        alpha_sums.push(aj);
        alpha_tilde_sums.push(atj);
    }
    let zero_angles: Vec<u32> =
        ms.parabolic_angles.iter().map(|a| a.iter().filter(|b| b.is_zero()).count() as u32).collect();
    let beta_sums = ms
        .parabolic_angles
        .iter()
        .map(|a| a.iter().fold(Angle::Exact(Rational64::zero()), |acc, b| acc.add(*b)))
        .collect();
    let k_residues = k.is_integer().then(|| {
        let k = k.to_integer();
        sig.elliptic_orders.iter().map(|&nu| ((k - 1).rem_euclid(nu as i64) + 1) as u32).collect::<Vec<_>>()
    });
    let mut profile = CombinatorialProfile {
        tau0: zero_angles.iter().sum(),
        tilde_tau0: 0,
        zero_angles,
        beta_sums,
        r,
        alpha_sums,
        alpha_tilde_sums,
        k_residues: None,
        orders: sig.elliptic_orders.clone(),
    };
    if let Some(kj) = &k_residues {
        profile.tilde_tau0 = kj.iter().enumerate().map(|(j, &kj)| profile.r(j, kj as i64)).sum();
    }
    profile.k_residues = k_residues;
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn areas() {
        let modular = OrbifoldSignature::new(0, 1, vec![2, 3]).unwrap();
        assert!((hyperbolic_area(&modular) - PI / 3.0).abs() < 1e-15);
        let g2 = OrbifoldSignature::new(2, 0, vec![]).unwrap();
        assert!((hyperbolic_area(&g2) - 4.0 * PI).abs() < 1e-15);
        assert!(matches!(OrbifoldSignature::new(0, 0, vec![]), Err(Error::NonHyperbolic(_))));
        assert!(matches!(OrbifoldSignature::new(0, 0, vec![2, 3, 6]), Err(Error::NonHyperbolic(_))));
        assert!(OrbifoldSignature::new(0, 0, vec![2, 3, 7]).is_ok());
    }

    #[test]
    fn profile_examples() {
        let sig = OrbifoldSignature::new(2, 0, vec![3]).unwrap();
        let ms = MultiplierSystem::new_continuous_weight(&sig, 3, q(0, 1), vec![vec![0, 1, 2]], vec![]).unwrap();
        let p = residue_profile(&sig, &ms).unwrap();
        assert_eq!((p.r(0, 1), p.r(0, 2), p.r(0, 3)), (1, 1, 1));

        let sig = OrbifoldSignature::new(2, 0, vec![4]).unwrap();
        let ms = MultiplierSystem::new_continuous_weight(&sig, 3, q(0, 1), vec![vec![1, 1, 3]], vec![]).unwrap();
        let p = residue_profile(&sig, &ms).unwrap();
        assert_eq!([p.r(0, 1), p.r(0, 2), p.r(0, 3), p.r(0, 4)], [1, 0, 2, 0]);

        let sig = OrbifoldSignature::new(1, 0, vec![2]).unwrap();
        let ms = MultiplierSystem::new(&sig, 2, q(1, 2), vec![vec![0, 1]], vec![]).unwrap();
        let p = residue_profile(&sig, &ms).unwrap();
        assert_eq!(p.tilde_tau0, 0);
        assert!(!p.k_integral());
    }

    #[test]
    fn admissibility() {
        let cusped = OrbifoldSignature::new(0, 1, vec![2, 3]).unwrap();
        assert!(admissibility_check(&cusped, 1, q(1, 7)));
        let g2 = OrbifoldSignature::new(2, 0, vec![]).unwrap();
        assert!(admissibility_check(&g2, 3, q(2, 3)));
        assert!(admissibility_check(&g2, 1, q(1, 2)));
        assert!(!admissibility_check(&g2, 1, q(1, 3)));
        assert!(matches!(
            MultiplierSystem::new(&g2, 1, q(1, 3), vec![], vec![]),
            Err(Error::NotAdmissible(_))
        ));
    }

    #[test]
    fn validation() {
        let sig = OrbifoldSignature::new(0, 1, vec![2, 3]).unwrap();
        let bad = MultiplierSystem::new(&sig, 1, q(0, 1), vec![vec![0]], vec![vec![Angle::Exact(q(0, 1))]]);
        assert!(matches!(bad, Err(Error::DimensionMismatch(_))));
        let bad = MultiplierSystem::new(&sig, 1, q(0, 1), vec![vec![0], vec![3]], vec![vec![Angle::Real(0.0)]]);
        assert!(matches!(bad, Err(Error::InvalidInput(_))));
        let bad = MultiplierSystem::new(&sig, 1, q(0, 1), vec![vec![0], vec![0]], vec![vec![Angle::Real(1.0)]]);
        assert!(matches!(bad, Err(Error::InvalidInput(_))));
        let ms = MultiplierSystem::new(
            &sig,
            2,
            q(0, 1),
            vec![vec![0, 1], vec![0, 2]],
            vec![vec![Angle::Exact(q(1, 3)), Angle::Exact(q(0, 1))]],
        )
        .unwrap();
        assert!(ms.parabolic_angles()[0][0].is_zero());
        let p = residue_profile(&sig, &ms).unwrap();
        assert_eq!(p.tau0, 1);
        assert_eq!(p.beta_sums[0], Angle::Exact(q(1, 3)));
        // k = 0: k_j = ν_j, r_j(ν_j) counts α = 0.
        assert_eq!(p.k_residues, Some(vec![2, 3]));
        assert_eq!(p.tilde_tau0, 2);
    }

    fn residues_strategy() -> impl Strategy<Value = (u32, Vec<u32>, i64)> {
        (2u32..12, 1usize..8, -30i64..30).prop_flat_map(|(nu, m, k)| {
            (Just(nu), proptest::collection::vec(0..nu, m), Just(k))
        })
    }

    proptest! {
        #[test]
        fn residue_identities((nu, res, k) in residues_strategy()) {
            let m = res.len() as u32;
            let sig = OrbifoldSignature::new(2, 0, vec![nu]).unwrap();
            let ms = MultiplierSystem::new_continuous_weight(&sig, m, q(k, 1), vec![res.clone()], vec![]).unwrap();
            let p = residue_profile(&sig, &ms).unwrap();
            let n = nu as i64;
            prop_assert_eq!((1..=n).map(|l| p.r(0, l)).sum::<u32>(), m);
            for l in -2 * n..2 * n {
                prop_assert_eq!(p.r(0, l), p.r(0, l + n));
                // ν(α(ℓ) − α(ℓ−1)) relation in integers: α(ℓ) − α(ℓ−1) = m − ν r(ℓ)
                let lhs = p.alpha_sum(0, l) as i64 - p.alpha_sum(0, l - 1) as i64;
                prop_assert_eq!(lhs, m as i64 - n * p.r(0, l) as i64);
            }
            let brute = res.iter().filter(|&&a| (a as i64 + k).rem_euclid(n) == 0).count() as u32;
            prop_assert_eq!(p.tilde_tau0, brute);
            // Conjugation maps r(ℓ) to r(ν − ℓ).
            let conj = ms.conjugate(&sig);
            let pc = residue_profile(&sig, &conj).unwrap();
            for l in 0..n {
                prop_assert_eq!(pc.r(0, l), p.r(0, n - l));
            }
        }
    }
}
