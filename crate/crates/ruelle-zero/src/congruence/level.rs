//! Invariants of Γ₀(N), its cusps and elliptic classes, and the action of a
//! Dirichlet character on their stabilizer generators.

use std::collections::HashMap;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

use super::characters::{euler_phi, DirichletCharacter};
use crate::special::{factorize, FactoredMagnitude};
use crate::{Error, Result};

/// Kronecker symbol (−4/p) for a prime p.
fn kron_minus4(p: u64) -> i64 {
    match p % 4 {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

/// Kronecker symbol (−3/p) for a prime p.
fn kron_minus3(p: u64) -> i64 {
    match p % 3 {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelInvariants {
    pub level: u64,
    /// [SL₂(ℤ) : Γ₀(N)] = N∏(1 + 1/p).
    pub index: u64,
    pub nu2: u64,
    pub nu3: u64,
    pub rho: u64,
    pub tau: u64,
    /// ω/2π = index/6.
    #[serde(serialize_with = "ser_rational")]
    pub area_over_2pi: Rational64,
    pub genus: u64,
}

fn ser_rational<S: serde::Serializer>(q: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

impl LevelInvariants {
    /// Elliptic orders, all ν = 2 classes first.
    pub fn elliptic_orders(&self) -> Vec<u32> {
        let mut v = vec![2u32; self.nu2 as usize];
        v.extend(std::iter::repeat(3).take(self.nu3 as usize));
        v
    }

    /// ω = 2π·index/6.
    pub fn volume(&self) -> f64 {
        2.0 * std::f64::consts::PI * (*self.area_over_2pi.numer() as f64 / *self.area_over_2pi.denom() as f64)
    }
}

/// τ(N) = Σ_{d|N} φ(gcd(d, N/d)).
pub fn cusp_count(n: u64) -> u64 {
    divisors(n).into_iter().map(|d| euler_phi(d.gcd(&(n / d)))).sum()
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..).take_while(|d| d * d <= n).filter(|d| n % d == 0).flat_map(|d| [d, n / d]).collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn level_invariants(n: u64) -> Result<LevelInvariants> {
    if n == 0 {
        return Err(Error::InvalidInput("level N must be ≥ 1".into()));
    }
    let fac = factorize(n);
    let index: u64 = fac.iter().fold(n, |acc, &(p, _)| acc / p * (p + 1));
    let (nu2, nu3) = if n == 1 {
        (1, 1)
    } else {
        let nu2 = if n % 4 == 0 { 0 } else { fac.iter().map(|&(p, _)| 1 + kron_minus4(p)).product::<i64>() as u64 };
        let nu3 = if n % 9 == 0 { 0 } else { fac.iter().map(|&(p, _)| 1 + kron_minus3(p)).product::<i64>() as u64 };
        (nu2, nu3)
    };
    let tau = cusp_count(n);
    let area = Rational64::new(index as i64, 6);
    // 2g − 2 = ω/2π − Σ(1 − 1/ν) − τ
    let two_g_minus_2 = area - Rational64::new(nu2 as i64, 2) - Rational64::new(2 * nu3 as i64, 3) - Rational64::from_integer(tau as i64);
    if !two_g_minus_2.is_integer() || (two_g_minus_2.to_integer() + 2) % 2 != 0 || two_g_minus_2.to_integer() < -2 {
        return Err(Error::InvalidInput(format!("N={n}: 2g−2 = {two_g_minus_2} is not an even integer ≥ −2")));
    }
    let genus = ((two_g_minus_2.to_integer() + 2) / 2) as u64;
    Ok(LevelInvariants { level: n, index, nu2, nu3, rho: nu2 + nu3, tau, area_over_2pi: area, genus })
}

/// A cusp a/c of Γ₀(N) with c | N and a taken mod gcd(c, N/c).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CuspRep {
    pub c: u64,
    pub a: u64,
    /// gcd(c, N/c).
    pub g: u64,
}

/// One representative a/c for every cusp: c | N ascending, then a ascending.
pub fn cusp_set(n: u64) -> Vec<CuspRep> {
    let mut out = Vec::new();
    for c in divisors(n) {
        let g = c.gcd(&(n / c));
        for a0 in 0..g.max(1) {
            if a0.gcd(&g) != 1 {
                continue;
            }
            let a = (0..)
                .map(|t| a0 + t * g)
                .find(|a| *a >= 1 && a.gcd(&c) == 1)
                .expect("a unit lift exists");
            out.push(CuspRep { c, a, g });
        }
    }
    out
}

/// χ(S_{a/c}) = χ(1 − aN/gcd(c, N/c)) as an angle in [0, 1).
pub fn chi_on_parabolic(cusp: &CuspRep, chi: &DirichletCharacter) -> Rational64 {
    let n = chi.modulus();
    let l = n / cusp.g;
    let x = (1i128 - (cusp.a as i128) * (l as i128)).rem_euclid(n as i128) as i64;
    chi.angle(x).expect("1 − aN/g is a unit mod N")
}

/// Cusp singular for χ iff q | N/gcd(c, N/c).
pub fn is_singular(cusp: &CuspRep, chi: &DirichletCharacter) -> bool {
    (chi.modulus() / cusp.g) % chi.conductor() == 0
}

fn check_q(n: u64, q: u64) -> Result<()> {
    if n == 0 || q == 0 || n % q != 0 {
        return Err(Error::InvalidInput(format!("conductor {q} does not divide N = {n}")));
    }
    Ok(())
}

/// τ₀ = Σ_{c|N, q | N/gcd(c,N/c)} φ(gcd(c, N/c)).
pub fn tau0_divisor_sum(n: u64, q: u64) -> Result<u64> {
    check_q(n, q)?;
    Ok(divisors(n)
        .into_iter()
        .map(|c| c.gcd(&(n / c)))
        .filter(|g| (n / g) % q == 0)
        .map(euler_phi)
        .sum())
}

/// Per-prime product form of τ₀: for p^e ∥ N and p^f ∥ q the local factor
/// is 2p^{e−f} if e < 2f, and p^{⌊e/2⌋} + p^{⌊(e−1)/2⌋} otherwise.
pub fn tau0_product(n: u64, q: u64) -> Result<u64> {
    check_q(n, q)?;
    Ok(factorize(n)
        .into_iter()
        .map(|(p, e)| {
            let mut f = 0;
            let mut r = q;
            while r % p == 0 {
                r /= p;
                f += 1;
            }
            if e < 2 * f {
                2 * p.pow(e - f)
            } else {
                p.pow(e / 2) + p.pow((e - 1) / 2)
            }
        })
        .product())
}

/// Both closed forms of τ₀; an error if they disagree.
pub fn tau0_closed_form(n: u64, q: u64) -> Result<u64> {
    let a = tau0_divisor_sum(n, q)?;
    let b = tau0_product(n, q)?;
    if a != b {
        return Err(Error::InvalidInput(format!("τ₀ forms disagree at N={n}, q={q}: {a} vs {b}")));
    }
    Ok(a)
}

/// Number of cusps with χ(S_{a/c}) = 1, by direct evaluation.
pub fn tau0_enumerated(chi: &DirichletCharacter) -> u64 {
    cusp_set(chi.modulus()).iter().filter(|c| chi_on_parabolic(c, chi).is_zero()).count() as u64
}

/// An elliptic class of Γ₀(N) with the character value on its generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EllipticClass {
    pub order: u32,
    /// Root x of x² + 1 (order 2) or x² + x + 1 (order 3) mod N.
    pub x: u64,
    /// χ(R) = e^{2πi·angle}.
    #[serde(serialize_with = "ser_rational")]
    pub angle: Rational64,
}

impl EllipticClass {
    /// Residue α ∈ {0, …, ν−1} with χ(R) = e^{−2πiα/ν}.
    pub fn residue(&self) -> u32 {
        let a = -self.angle * Rational64::from_integer(self.order as i64);
        debug_assert!(a.is_integer());
        a.to_integer().rem_euclid(self.order as i64) as u32
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EllipticAction {
    pub classes: Vec<EllipticClass>,
    pub tilde_tau0: u64,
    /// #{ν = 2, χ(R) = 1}.
    pub c1: u64,
    /// #{ν = 3, χ(R) = 1}.
    pub c2: u64,
    /// #{ν = 3, χ(R) ≠ 1}.
    pub c3: u64,
    /// 2^{C₁}·3^{C₂}·(√3/2)^{−C₃}.
    pub e_factor: FactoredMagnitude,
}

/// Elliptic classes from x² + 1 ≡ 0 and x² + x + 1 ≡ 0 mod N. The root x
/// gives R = [[x, −(x²+1)/N], [N, −x]] (order 2) or
/// R = [[x, −(x²+x+1)/N], [N, −x−1]] (order 3), so χ(R) = χ(−x) or χ(−x−1).
pub fn elliptic_action(chi: &DirichletCharacter) -> Result<EllipticAction> {
    let n = chi.modulus();
    let mut classes = Vec::new();
    for x in 0..n {
        let x2 = x as u128 * x as u128;
        if (x2 + 1) % n as u128 == 0 {
            classes.push(EllipticClass { order: 2, x, angle: chi.angle(-(x as i64)).expect("−x is a unit") });
        }
    }
    for x in 0..n {
        let x2 = x as u128 * x as u128;
        if (x2 + x as u128 + 1) % n as u128 == 0 {
            classes.push(EllipticClass { order: 3, x, angle: chi.angle(-(x as i64) - 1).expect("−x−1 is a unit") });
        }
    }
    let c1 = classes.iter().filter(|c| c.order == 2 && c.angle.is_zero()).count() as u64;
    let c2 = classes.iter().filter(|c| c.order == 3 && c.angle.is_zero()).count() as u64;
    let c3 = classes.iter().filter(|c| c.order == 3 && !c.angle.is_zero()).count() as u64;
    let two = FactoredMagnitude::integer(2)?;
    let three = FactoredMagnitude::integer(3)?;
    let root3_over_2 = three.pow(Rational64::new(1, 2)) / two.clone();
    let e_factor = two.powi(c1 as i64) * three.powi(c2 as i64) * root3_over_2.powi(-(c3 as i64));
    Ok(EllipticAction { classes, tilde_tau0: c1 + c2, c1, c2, c3, e_factor })
}

/// Finite model of Γ₀(N)\SL₂(ℤ) as P¹(ℤ/N), used as an independent oracle
/// for the index, cusps, elliptic classes and genus.
pub struct ProjectiveLine {
    n: u64,
    points: Vec<(u64, u64)>,
    index_of: HashMap<(u64, u64), usize>,
}

impl ProjectiveLine {
    pub fn new(n: u64) -> Self {
        let units: Vec<u64> = (1..=n).filter(|u| u.gcd(&n) == 1).map(|u| u % n).collect();
        let mut points = Vec::new();
        let mut index_of = HashMap::new();
        for c in 0..n {
            for d in 0..n {
                if c.gcd(&d).gcd(&n) != 1 && n != 1 {
                    continue;
                }
                let canon = units.iter().map(|u| (u * c % n, u * d % n)).min().unwrap();
                if canon == (c, d) {
                    index_of.insert(canon, points.len());
                    points.push(canon);
                }
            }
        }
        if n == 1 {
            points = vec![(0, 0)];
            index_of = HashMap::from([((0, 0), 0)]);
        }
        Self { n, points, index_of }
    }

    fn canon(&self, c: i128, d: i128) -> usize {
        let n = self.n as i128;
        let (c, d) = (c.rem_euclid(n) as u64, d.rem_euclid(n) as u64);
        let best = (1..=self.n)
            .filter(|u| u.gcd(&self.n) == 1)
            .map(|u| (u * c % self.n, u * d % self.n))
            .min()
            .unwrap();
        self.index_of[&best]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Right action of [[a, b], [c, d]] on the bottom row.
    fn act(&self, i: usize, m: [[i64; 2]; 2]) -> usize {
        let (c, d) = (self.points[i].0 as i128, self.points[i].1 as i128);
        self.canon(c * m[0][0] as i128 + d * m[1][0] as i128, c * m[0][1] as i128 + d * m[1][1] as i128)
    }

    /// Orbits of ⟨T⟩: the cusps.
    pub fn cusp_orbits(&self) -> usize {
        let mut seen = vec![false; self.len()];
        let mut count = 0;
        for i in 0..self.len() {
            if seen[i] {
                continue;
            }
            count += 1;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = self.act(j, [[1, 1], [0, 1]]);
            }
        }
        count
    }

    fn fixed_points(&self, m: [[i64; 2]; 2]) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.act(i, m) == i).collect()
    }

    /// Genus from 1 + μ/12 − ν₂/4 − ν₃/3 − ν∞/2 with every term counted on P¹(ℤ/N).
    pub fn genus(&self) -> Rational64 {
        let mu = self.len() as i64;
        let nu2 = self.fixed_points(S).len() as i64;
        let nu3 = self.fixed_points(U).len() as i64;
        let cusps = self.cusp_orbits() as i64;
        Rational64::from_integer(1) + Rational64::new(mu, 12) - Rational64::new(nu2, 4) - Rational64::new(nu3, 3) - Rational64::new(cusps, 2)
    }

    /// Character angles on the elliptic elements γMγ⁻¹ ∈ Γ₀(N) attached to the
    /// fixed cosets of M ∈ {S, U}.
    pub fn elliptic_angles(&self, chi: &DirichletCharacter, order: u32) -> Vec<Rational64> {
        // U has order 6 in SL₂(ℤ); U² has trace −1 like the order-3 generators.
        let (m, fix) = if order == 2 { (S, S) } else { (U2, U) };
        self.fixed_points(fix)
            .into_iter()
            .map(|i| {
                let g = lift_to_sl2(self.points[i], self.n);
                let e = conj(g, m);
                debug_assert_eq!(e[1][0].rem_euclid(self.n as i128), 0);
                chi.angle(e[1][1].rem_euclid(self.n as i128) as i64).expect("unit entry")
            })
            .collect()
    }
}

const S: [[i64; 2]; 2] = [[0, -1], [1, 0]];
const U: [[i64; 2]; 2] = [[0, -1], [1, 1]];
const U2: [[i64; 2]; 2] = [[-1, -1], [1, 0]];

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// γ ∈ SL₂(ℤ) whose bottom row reduces to (c, d) mod N.
fn lift_to_sl2((c, d): (u64, u64), n: u64) -> [[i128; 2]; 2] {
    let c0 = if c == 0 { n as i128 } else { c as i128 };
    let d0 = (0..)
        .map(|t| d as i128 + t * n as i128)
        .find(|x| c0.gcd(x) == 1)
        .expect("coprime lift exists");
    let (_, x, y) = ext_gcd(d0, c0);
    // x·d0 + y·c0 = 1 → [[x, −y], [c0, d0]]
    [[x, -y], [c0, d0]]
}

/// γMγ⁻¹.
fn conj(g: [[i128; 2]; 2], m: [[i64; 2]; 2]) -> [[i128; 2]; 2] {
    let mul = |a: [[i128; 2]; 2], b: [[i128; 2]; 2]| {
        let mut r = [[0i128; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        r
    };
    let inv = [[g[1][1], -g[0][1]], [-g[1][0], g[0][0]]];
    let mm = [[m[0][0] as i128, m[0][1] as i128], [m[1][0] as i128, m[1][1] as i128]];
    mul(mul(g, mm), inv)
}
