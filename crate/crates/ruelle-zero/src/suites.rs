//! Seeded identity suites and random instance generators.
//!
//! Every draw comes from a ChaCha8 stream, so a (family, samples, seed)
//! triple reproduces the same deviations bit for bit.

use std::sync::Arc;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::funceq::{
    branch_deviation, elliptic_combination, h, h_via_kappa, identity_combination, parabolic_combination,
    ScatteringData, TwistedSurface,
};
use crate::model::{residue_profile, Angle, MultiplierSystem, OrbifoldSignature};
use crate::special::{sine_product, sine_product_closed, sine_product_integer, sine_product_integer_direct, FactoredMagnitude};
use crate::torsion::{kitano_multiplier, verify_fried_kitano, verify_fried_yamaguchi, KitanoRep, SeifertIndex, YamaguchiRep};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    /// ∏ sin((ℓ−x)π/ν) = 2^{1−ν} sin πx and its integer-point companion.
    SineProducts,
    /// Z_I, Z_ell, Z_par combinations against their sine closed forms.
    FactorDuality,
    /// H(s) = H(−s), H under residue conjugation, and H against κ and φ.
    HSymmetry,
    /// Fiberwise sine partition identity, exactly in factored form.
    Partition,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::SineProducts, Family::FactorDuality, Family::HSymmetry, Family::Partition];

    pub fn name(self) -> &'static str {
        match self {
            Family::SineProducts => "sine-products",
            Family::FactorDuality => "factor-duality",
            Family::HSymmetry => "h-symmetry",
            Family::Partition => "partition",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown identity family '{s}'")))
    }

    pub fn default_samples(self) -> usize {
        match self {
            Family::SineProducts => 100,
            Family::FactorDuality => 200,
            Family::HSymmetry => 100,
            Family::Partition => 200,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub family: &'static str,
    pub seed: u64,
    pub samples: usize,
    pub checks: usize,
    pub failures: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

struct Tally {
    checks: usize,
    failures: usize,
    max: f64,
    tol: f64,
}

impl Tally {
    fn new(tol: f64) -> Self {
        Tally { checks: 0, failures: 0, max: 0.0, tol }
    }

    fn add(&mut self, dev: f64) {
        self.checks += 1;
        // NaN counts as a failure
        if !(dev <= self.tol) {
            self.failures += 1;
        }
        if dev.is_nan() || dev > self.max {
            self.max = if dev.is_nan() { f64::INFINITY } else { dev };
        }
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random s with 0.1 ≤ |Im s| ≤ 5 and |Re s| ≤ 2.
pub fn random_s(rng: &mut ChaCha8Rng) -> Complex64 {
    let im = rng.gen_range(0.1..5.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    Complex64::new(rng.gen_range(-2.0..2.0), im)
}

/// Random hyperbolic surface with a weight k ∈ ½ℚ, elliptic residues,
/// parabolic angles in (1/6)ℤ, and a scattering determinant satisfying
/// φ(s)φ(1−s) = 1 when there are cusps.
pub fn random_surface(rng: &mut ChaCha8Rng) -> TwistedSurface {
    loop {
        let g = rng.gen_range(0..3u32);
        let nus: Vec<u32> = (0..rng.gen_range(0..3)).map(|_| rng.gen_range(2..7)).collect();
        let m = rng.gen_range(1..4u32);
        let tau = rng.gen_range(0..3u32);
        let k = Rational64::new(rng.gen_range(-3..4), 2 * rng.gen_range(1..5));
        let res = nus.iter().map(|&nu| (0..m).map(|_| rng.gen_range(0..nu)).collect()).collect();
        let angles = (0..tau)
            .map(|_| (0..m).map(|_| Angle::Exact(Rational64::new(rng.gen_range(0..6), 6))).collect())
            .collect();
        let Ok(sig) = OrbifoldSignature::new(g, tau, nus) else { continue };
        let Ok(ms) = MultiplierSystem::new_continuous_weight(&sig, m, k, res, angles) else { continue };
        let Ok(profile) = residue_profile(&sig, &ms) else { continue };
        let n0 = if profile.tau0 == 1 {
            if k.is_zero() {
                0
            } else if k.is_integer() {
                1
            } else {
                2
            }
        } else {
            0
        };
        let data = if tau == 0 {
            ScatteringData::compact()
        } else {
            let Ok(d) = ScatteringData::from_reals(n0, 0.8, 1.3, 0.1, Some(1)) else { continue };
            d.with_phi(Arc::new(|s: Complex64| Ok((1.0 - s) / s * ((1.0 - 2.0 * s) / 3.0).exp())))
        };
        if let Ok(t) = TwistedSurface::new(sig, ms, data) {
            return t;
        }
    }
}

/// g ≤ 4, 1..=4 fibers of order ≤ 9, m ≤ 5, a coprime to m.
pub fn random_kitano(rng: &mut ChaCha8Rng) -> (SeifertIndex, KitanoRep) {
    loop {
        let g = rng.gen_range(1..=4u32);
        let m = rng.gen_range(2..=5u32);
        let units: Vec<i64> = (1..m as i64).filter(|a| a.gcd(&(m as i64)) == 1).collect();
        let a = units[rng.gen_range(0..units.len())];
        let fibers: Vec<(u32, i64)> = (0..rng.gen_range(1..=4))
            .map(|_| {
                let nu = rng.gen_range(2..=9u32);
                let us: Vec<i64> = (1..nu as i64).filter(|b| b.gcd(&(nu as i64)) == 1).collect();
                (nu, us[rng.gen_range(0..us.len())])
            })
            .collect();
        let residues = fibers.iter().map(|&(nu, _)| (0..m).map(|_| rng.gen_range(0..nu)).collect()).collect();
        if let (Ok(idx), Ok(rep)) = (SeifertIndex::new(0, g, &fibers), KitanoRep::new(m, a, residues)) {
            return (idx, rep);
        }
    }
}

/// g ≤ 4, 1..=4 standard fibers with odd η_j coprime to ν_j, N ≤ 4.
pub fn random_yamaguchi(rng: &mut ChaCha8Rng) -> (SeifertIndex, YamaguchiRep) {
    loop {
        let g = rng.gen_range(1..=4u32);
        let n = rng.gen_range(1..=4u32);
        let orders: Vec<u32> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(2..=9)).collect();
        let eta: Vec<i64> = orders.iter().map(|_| 2 * rng.gen_range(-40..40i64) + 1).collect();
        if orders.iter().zip(&eta).any(|(&nu, e)| e.gcd(&(nu as i64)) != 1) {
            continue;
        }
        if let (Ok(idx), Ok(rep)) = (SeifertIndex::with_standard_fibers(g, &orders), YamaguchiRep::new(n, eta)) {
            return (idx, rep);
        }
    }
}

fn sine_products(samples: usize, rng: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for nu in 2..=60u32 {
        for _ in 0..samples {
            let x = rng.gen_range(-3.0..3.0);
            let direct = sine_product(nu, x)?;
            let closed = sine_product_closed(nu, x);
            t.add((direct - closed).abs() / closed.abs().max(1e-300));
        }
        for n in 1..=nu {
            let (sign, mag) = sine_product_integer(nu, n)?;
            let closed = sign as f64 * mag.eval();
            t.add((sine_product_integer_direct(nu, n) - closed).abs() / closed.abs());
        }
    }
    Ok(())
}

/// Instances per factor-duality run; `samples` points s are drawn for each.
pub const DUALITY_INSTANCES: usize = 10;

fn factor_duality(samples: usize, rng: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for _ in 0..DUALITY_INSTANCES {
        let surface = random_surface(rng);
        for _ in 0..samples {
            let s = random_s(rng);
            for combo in [identity_combination, elliptic_combination, parabolic_combination] {
                let (l, r, d) = combo(&surface, s)?;
                t.add(branch_deviation(l, r, d));
            }
        }
    }
    Ok(())
}

fn h_symmetry(samples: usize, rng: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for _ in 0..samples {
        let surface = random_surface(rng);
        let conj = TwistedSurface::new(surface.sig.clone(), surface.ms.conjugate(&surface.sig), surface.data.clone())?;
        let s = random_s(rng);
        let a = h(&surface, s)?;
        t.add(rel(h(&surface, -s)?, a));
        t.add(rel(h(&conj, s)?, a));
        t.add(rel(h_via_kappa(&surface, s)?, a));
    }
    Ok(())
}

fn partition(samples: usize, rng: &mut ChaCha8Rng, t: &mut Tally) -> Result<()> {
    for _ in 0..samples {
        let (idx, rep) = random_kitano(rng);
        let (sig, ms) = kitano_multiplier(&idx, &rep)?;
        let prof = residue_profile(&sig, &ms)?;
        let k = rep.k();
        for (j, f) in idx.fibers.iter().enumerate() {
            let nu = f.nu as i64;
            let mut by_class = FactoredMagnitude::one();
            for l in 1..=nu {
                by_class = by_class * FactoredMagnitude::sin_pi((Rational64::from_integer(l) - k) / nu)?.powi(-(prof.r(j, l) as i64));
            }
            let mut by_eigen = FactoredMagnitude::one();
            for &a in &rep.residues[j] {
                by_eigen = by_eigen / FactoredMagnitude::sin_pi((k + a as i64) / nu)?;
            }
            // exact equality of factorizations, then the numeric gap
            t.add(if by_class == by_eigen { 0.0 } else { (by_class.ln_eval() - by_eigen.ln_eval()).abs().max(f64::MIN_POSITIVE) });
        }
    }
    Ok(())
}

pub fn run_family(family: Family, samples: usize, seed: u64, tolerance: f64) -> Result<SuiteReport> {
    let mut r = rng(seed);
    let mut t = Tally::new(tolerance);
    match family {
        Family::SineProducts => sine_products(samples, &mut r, &mut t)?,
        Family::FactorDuality => factor_duality(samples, &mut r, &mut t)?,
        Family::HSymmetry => h_symmetry(samples, &mut r, &mut t)?,
        Family::Partition => partition(samples, &mut r, &mut t)?,
    }
    Ok(SuiteReport {
        family: family.name(),
        seed,
        samples,
        checks: t.checks,
        failures: t.failures,
        max_deviation: t.max,
        tolerance,
        pass: t.failures == 0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzReport {
    pub kind: &'static str,
    pub seed: u64,
    pub draws: usize,
    pub failures: usize,
    pub max_deviation: f64,
    pub exact_matches: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// Random Fried comparisons; `kind` is "kitano" or "yamaguchi".
pub fn fried_fuzz(kind: &str, draws: usize, seed: u64, tolerance: f64) -> Result<FuzzReport> {
    let mut r = rng(seed);
    let (mut failures, mut exact, mut max) = (0, 0, 0f64);
    let kind: &'static str = match kind {
        "kitano" => "kitano",
        "yamaguchi" => "yamaguchi",
        other => return Err(Error::InvalidInput(format!("unknown Fried family '{other}'"))),
    };
    for _ in 0..draws {
        let rep = if kind == "kitano" {
            let (i, p) = random_kitano(&mut r);
            verify_fried_kitano(&i, &p)?
        } else {
            let (i, p) = random_yamaguchi(&mut r);
            verify_fried_yamaguchi(&i, &p)?
        };
        max = max.max(rep.relative_deviation);
        exact += rep.exact_match as usize;
        if rep.order_at_zero != 0 || !(rep.relative_deviation <= tolerance) {
            failures += 1;
        }
    }
    Ok(FuzzReport { kind, seed, draws, failures, max_deviation: max, exact_matches: exact, tolerance, pass: failures == 0 })
}
