//! Dirichlet characters as exact angle vectors on a fixed generating set.
//!
//! For an odd prime power p^e the generator is the least primitive root g
//! mod p², which generates (ℤ/p^e)^× for every e. For 2^e the generators are
//! −1 (present for e ≥ 2) and 5 (present for e ≥ 3). Generators are ordered by
//! ascending prime, and at p = 2 as (−1, 5). A character is stored by the
//! angles θ_i ∈ [0, 1) with χ(gen_i) = e^{2πiθ_i}; the exponent vector is
//! x_i = θ_i·ord(gen_i).
//!
//! Because the same generator elements serve every exponent e, induction and
//! restriction between moduli only pad or truncate the angle lists.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::special::factorize;
use crate::{Error, Result};

pub(crate) fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u128;
    let mut base = (b % m) as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    acc as u64
}

pub(crate) fn euler_phi(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

fn reduce_angle(q: Rational64) -> Rational64 {
    q - q.floor()
}

/// Orders of the canonical generators of (ℤ/p^e)^×.
fn gen_orders(p: u64, e: u32) -> Vec<u64> {
    if e == 0 {
        return Vec::new();
    }
    if p == 2 {
        return match e {
            1 => Vec::new(),
            2 => vec![2],
            _ => vec![2, 1 << (e - 2)],
        };
    }
    vec![p.pow(e - 1) * (p - 1)]
}

/// Least primitive root mod p² for an odd prime p.
pub fn least_primitive_root(p: u64) -> u64 {
    let m = p * p;
    let phi = p * (p - 1);
    let qs: Vec<u64> = factorize(phi).into_iter().map(|(q, _)| q).collect();
    (2..m)
        .find(|&g| g % p != 0 && qs.iter().all(|&q| pow_mod(g, phi / q, m) != 1))
        .expect("a primitive root exists mod p²")
}

/// Generator residues of (ℤ/p^e)^× before CRT lifting.
fn local_generators(p: u64, e: u32) -> Vec<u64> {
    let pe = p.pow(e);
    if p == 2 {
        return match e {
            0 | 1 => Vec::new(),
            2 => vec![pe - 1],
            _ => vec![pe - 1, 5],
        };
    }
    if e == 0 {
        return Vec::new();
    }
    vec![least_primitive_root(p) % pe]
}

type LogTable = Arc<Vec<Option<Vec<u64>>>>;

/// Discrete-log table of (ℤ/p^e)^× on the canonical generators, cached.
fn log_table(p: u64, e: u32) -> LogTable {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), LogTable>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&(p, e)) {
        return t.clone();
    }
    let pe = p.pow(e);
    let gens = local_generators(p, e);
    let orders = gen_orders(p, e);
    let mut table = vec![None; pe as usize];
    match gens.len() {
        0 => table[(1 % pe) as usize] = Some(Vec::new()),
        1 => {
            let mut x = 1 % pe;
            for i in 0..orders[0] {
                table[x as usize] = Some(vec![i]);
                x = x * gens[0] % pe;
            }
        }
        _ => {
            let mut x = 1u64;
            for i in 0..orders[0] {
                let mut y = x;
                for j in 0..orders[1] {
                    table[y as usize] = Some(vec![i, j]);
                    y = y * gens[1] % pe;
                }
                x = x * gens[0] % pe;
            }
        }
    }
    let table = Arc::new(table);
    cache.lock().unwrap().insert((p, e), table.clone());
    table
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Component {
    p: u64,
    e: u32,
    angles: Vec<Rational64>,
}

impl Component {
    fn orders(&self) -> Vec<u64> {
        gen_orders(self.p, self.e)
    }

    fn exponent_of_conductor(&self) -> u32 {
        if self.p == 2 {
            let w = match self.angles.get(1) {
                Some(t) if !t.is_zero() => t.denom().trailing_zeros(),
                _ => 0,
            };
            if w > 0 {
                w + 2
            } else if self.angles.first().is_some_and(|t| !t.is_zero()) {
                2
            } else {
                0
            }
        } else {
            let o = *self.angles[0].denom() as u64;
            if o == 1 {
                return 0;
            }
            let mut v = 0;
            let mut r = o;
            while r % self.p == 0 {
                r /= self.p;
                v += 1;
            }
            v + 1
        }
    }

    /// The same character viewed mod p^f; angles are padded or truncated.
    fn at_exponent(&self, f: u32) -> Component {
        let len = gen_orders(self.p, f).len();
        let mut angles = self.angles.clone();
        angles.resize(len, Rational64::zero());
        Component { p: self.p, e: f, angles }
    }
}

/// A Dirichlet character modulo N.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirichletCharacter {
    modulus: u64,
    comps: Vec<Component>,
}

impl DirichletCharacter {
    pub fn trivial(modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidInput("modulus must be ≥ 1".into()));
        }
        let comps = factorize(modulus)
            .into_iter()
            .map(|(p, e)| Component { p, e, angles: vec![Rational64::zero(); gen_orders(p, e).len()] })
            .collect();
        Ok(Self { modulus, comps })
    }

    /// Orders of the canonical generators mod N, in canonical order.
    pub fn generator_orders(modulus: u64) -> Vec<u64> {
        factorize(modulus).into_iter().flat_map(|(p, e)| gen_orders(p, e)).collect()
    }

    /// CRT lifts of the canonical generators to residues mod N.
    pub fn generators(modulus: u64) -> Vec<u64> {
        let mut out = Vec::new();
        for (p, e) in factorize(modulus) {
            let pe = p.pow(e);
            let rest = modulus / pe;
            for g in local_generators(p, e) {
                // x ≡ g mod p^e, x ≡ 1 mod rest
                let x = (0..pe)
                    .map(|t| 1 + t * rest)
                    .find(|x| x % pe == g % pe)
                    .expect("CRT solution");
                out.push(x % modulus);
            }
        }
        out
    }

    pub fn from_exponents(modulus: u64, exponents: &[u64]) -> Result<Self> {
        let mut chi = Self::trivial(modulus)?;
        let total: usize = chi.comps.iter().map(|c| c.angles.len()).sum();
        if exponents.len() != total {
            return Err(Error::InvalidInput(format!(
                "character mod {modulus} needs {total} exponents, got {}",
                exponents.len()
            )));
        }
        let mut it = exponents.iter();
        for c in &mut chi.comps {
            let orders = c.orders();
            for (a, o) in c.angles.iter_mut().zip(orders) {
                let x = *it.next().unwrap();
                *a = reduce_angle(Rational64::new(x as i64, o as i64));
            }
        }
        Ok(chi)
    }

    /// Every character mod N, in lexicographic order of exponent vectors.
    pub fn all(modulus: u64) -> Result<Vec<Self>> {
        let orders = Self::generator_orders(modulus);
        let mut vecs: Vec<Vec<u64>> = vec![Vec::new()];
        for &o in &orders {
            vecs = vecs
                .into_iter()
                .flat_map(|v| {
                    (0..o).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        vecs.iter().map(|v| Self::from_exponents(modulus, v)).collect()
    }

    /// Primitive characters of conductor exactly q.
    pub fn primitive_of_conductor(q: u64) -> Result<Vec<Self>> {
        Ok(Self::all(q)?.into_iter().filter(|c| c.is_primitive()).collect())
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn exponents(&self) -> Vec<u64> {
        self.comps
            .iter()
            .flat_map(|c| {
                c.angles
                    .iter()
                    .zip(c.orders())
                    .map(|(a, o)| (*a * Rational64::from_integer(o as i64)).to_integer() as u64)
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    /// χ(a) = e^{2πiθ} as θ ∈ [0, 1), or None if gcd(a, N) > 1.
    pub fn angle(&self, a: i64) -> Option<Rational64> {
        let n = self.modulus as i64;
        let r = a.rem_euclid(n) as u64;
        if r.gcd(&self.modulus) != 1 {
            return None;
        }
        let mut theta = Rational64::zero();
        for c in &self.comps {
            let pe = c.p.pow(c.e);
            let table = log_table(c.p, c.e);
            let logs = table[(r % pe) as usize].as_ref().expect("unit has a logarithm");
            for (t, x) in c.angles.iter().zip(logs) {
                theta += *t * Rational64::from_integer(*x as i64);
            }
        }
        Some(reduce_angle(theta))
    }

    pub fn value(&self, a: i64) -> Complex64 {
        match self.angle(a) {
            None => Complex64::zero(),
            Some(t) => Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (*t.numer() as f64 / *t.denom() as f64)),
        }
    }

    /// χ(a) == 1 exactly.
    pub fn is_one_at(&self, a: i64) -> bool {
        self.angle(a).is_some_and(|t| t.is_zero())
    }

    pub fn conductor(&self) -> u64 {
        self.comps.iter().map(|c| c.p.pow(c.exponent_of_conductor())).product()
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// True for the principal character mod N.
    pub fn is_trivial(&self) -> bool {
        self.comps.iter().all(|c| c.angles.iter().all(|a| a.is_zero()))
    }

    /// The primitive character χ_* mod q inducing χ.
    pub fn primitive(&self) -> Self {
        let comps: Vec<Component> = self
            .comps
            .iter()
            .filter_map(|c| {
                let f = c.exponent_of_conductor();
                (f > 0).then(|| c.at_exponent(f))
            })
            .collect();
        let modulus = comps.iter().map(|c| c.p.pow(c.e)).product();
        Self { modulus, comps }
    }

    /// The character mod M induced from χ; requires N | M.
    pub fn induce(&self, m: u64) -> Result<Self> {
        if m == 0 || m % self.modulus != 0 {
            return Err(Error::InvalidInput(format!("cannot induce mod {} to mod {m}", self.modulus)));
        }
        let comps = factorize(m)
            .into_iter()
            .map(|(p, e)| match self.comps.iter().find(|c| c.p == p) {
                Some(c) => c.at_exponent(e),
                None => Component { p, e, angles: vec![Rational64::zero(); gen_orders(p, e).len()] },
            })
            .collect();
        Ok(Self { modulus: m, comps })
    }

    /// Restriction to a divisor M of N; requires cond(χ) | M.
    pub fn restrict(&self, m: u64) -> Result<Self> {
        if m == 0 || self.modulus % m != 0 || m % self.conductor() != 0 {
            return Err(Error::InvalidInput(format!(
                "character mod {} of conductor {} does not live mod {m}",
                self.modulus,
                self.conductor()
            )));
        }
        self.primitive().induce(m)
    }

    /// Product character modulo lcm of the moduli.
    pub fn mul(&self, other: &Self) -> Self {
        let m = self.modulus.lcm(&other.modulus);
        let a = self.induce(m).expect("lcm is a multiple");
        let b = other.induce(m).expect("lcm is a multiple");
        let comps = a
            .comps
            .into_iter()
            .zip(b.comps)
            .map(|(x, y)| Component {
                p: x.p,
                e: x.e,
                angles: x.angles.iter().zip(&y.angles).map(|(s, t)| reduce_angle(*s + *t)).collect(),
            })
            .collect();
        Self { modulus: m, comps }
    }

    pub fn conj(&self) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|c| Component { p: c.p, e: c.e, angles: c.angles.iter().map(|a| reduce_angle(-*a)).collect() })
            .collect();
        Self { modulus: self.modulus, comps }
    }

    /// χ(−1) ∈ {+1, −1}.
    pub fn parity(&self) -> i8 {
        match self.angle(-1) {
            Some(t) if t.is_zero() => 1,
            _ => -1,
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == 1
    }

    /// Multiplicative order of χ.
    pub fn order(&self) -> u64 {
        self.comps
            .iter()
            .flat_map(|c| c.angles.iter().map(|a| *a.denom() as u64))
            .fold(1, |acc, d| acc.lcm(&d))
    }

    /// Among χ and χ̄, the one with the lexicographically smaller primitive
    /// exponent vector. |L(s, χ)| = |L(s, χ̄)| for real s, so both map to one atom.
    pub fn conjugation_representative(&self) -> Self {
        let a = self.primitive();
        let b = a.conj();
        if b.exponents() < a.exponents() {
            b
        } else {
            a
        }
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.exponents().iter().map(|x| x.to_string()).collect();
        write!(f, "χ[{};{}]", self.modulus, e.join(","))
    }
}

impl Serialize for DirichletCharacter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DirichletCharacter", 4)?;
        st.serialize_field("modulus", &self.modulus)?;
        st.serialize_field("exponents", &self.exponents())?;
        st.serialize_field("conductor", &self.conductor())?;
        st.serialize_field("parity", &self.parity())?;
        st.end()
    }
}
