//! Dirichlet L-values at s = 1, 2 and general L(s, χ) through Hurwitz zeta.

use num_complex::Complex64;

use super::characters::DirichletCharacter;
use crate::special::{digamma, hurwitz_zeta, hurwitz_zeta_complex, FactoredMagnitude, LValueKey};
use crate::{Error, Result};

/// L(s, χ) for primitive χ and s ∈ {1, 2}.
///
/// L(2, χ) = f⁻² Σ_a χ(a) ζ(2, a/f) and L(1, χ) = −f⁻¹ Σ_a χ(a) ψ(a/f), the
/// latter valid because Σ_a χ(a) = 0 for χ nontrivial.
pub fn l_value(s: u8, chi: &DirichletCharacter) -> Result<Complex64> {
    if !chi.is_primitive() {
        return Err(Error::InvalidInput(format!("{chi} is not primitive")));
    }
    let f = chi.modulus();
    match s {
        2 => {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 1..=f {
                let v = chi.value(a as i64);
                if v.norm() > 0.0 {
                    acc += v * hurwitz_zeta(2.0, a as f64 / f as f64)?;
                }
            }
            Ok(acc / (f * f) as f64)
        }
        1 => {
            if chi.is_trivial() {
                return Err(Error::PoleAtOne);
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 1..=f {
                let v = chi.value(a as i64);
                if v.norm() > 0.0 {
                    acc += v * digamma(a as f64 / f as f64)?;
                }
            }
            Ok(-acc / f as f64)
        }
        _ => Err(Error::InvalidInput(format!("L-values are provided at s ∈ {{1, 2}}, not {s}"))),
    }
}

/// |L(s, χ)| as a magnitude atom keyed by the primitive character. χ and χ̄
/// share one key. L(2, 1) = π²/6 is returned in closed form.
pub fn l_value_atom(s: u8, chi: &DirichletCharacter) -> Result<FactoredMagnitude> {
    let rep = chi.conjugation_representative();
    if s == 2 && rep.modulus() == 1 {
        return Ok(FactoredMagnitude::pi().powi(2) / FactoredMagnitude::integer(6)?);
    }
    let value = l_value(s, &rep)?.norm();
    FactoredMagnitude::lvalue(LValueKey { s, conductor: rep.modulus(), exponents: rep.exponents(), value })
}

/// L(s, χ) = M^{−s} Σ_{a=1}^{M} χ(a) ζ(s, a/M) for any character mod M and s ≠ 1.
pub fn l_function(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    let m = chi.modulus();
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 1..=m {
        let v = chi.value(a as i64);
        if v.norm() > 0.0 {
            acc += v * hurwitz_zeta_complex(s, a as f64 / m as f64)?;
        }
    }
    Ok(acc * (-s * (m as f64).ln()).exp())
}

/// Partial sums Σ_{n ≤ fK} χ(n) n^{−s} extrapolated in 1/K. Blocks of length
/// f make the truncation error a power series in 1/K, which Richardson
/// extrapolation over K, 2K, 4K, … removes term by term. Returns the value
/// and the last tableau correction as an error estimate.
pub fn l_value_series(s: u8, chi: &DirichletCharacter, k0: u64, levels: usize) -> (Complex64, f64) {
    let f = chi.modulus().max(1);
    let period: Vec<Complex64> = (0..f).map(|a| chi.value(a as i64)).collect();
    let mut sums = Vec::with_capacity(levels);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut n = 0u64;
    for j in 0..levels {
        let target = f * k0 << j;
        while n < target {
            n += 1;
            let v = period[(n % f) as usize];
            if v.re != 0.0 || v.im != 0.0 {
                acc += v / (n as f64).powi(s as i32);
            }
        }
        sums.push(acc);
    }
    let mut table = sums;
    let mut last = f64::INFINITY;
    for order in 1..levels {
        let fac = 2f64.powi(order as i32);
        let next: Vec<Complex64> =
            table.windows(2).map(|w| (w[1] * fac - w[0]) / (fac - 1.0)).collect();
        last = (next[next.len() - 1] - table[table.len() - 1]).norm();
        table = next;
    }
    (table[table.len() - 1], last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zeta_two() {
        let one = DirichletCharacter::trivial(1).unwrap();
        let v = l_value(2, &one).unwrap();
        assert!((v.re - PI * PI / 6.0).abs() < 1e-12);
        assert!((l_value_atom(2, &one).unwrap().eval() - PI * PI / 6.0).abs() < 1e-12);
        assert_eq!(l_value(1, &one), Err(Error::PoleAtOne));
    }

    #[test]
    fn quadratic_mod_five_class_number_formula() {
        let chi = DirichletCharacter::all(5).unwrap().into_iter().find(|c| c.order() == 2).unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let expect = 2.0 / 5f64.sqrt() * golden.ln();
        let v = l_value(1, &chi).unwrap();
        assert!((v.re - expect).abs() < 1e-12 && v.im.abs() < 1e-14, "{v}");
    }

    #[test]
    fn odd_quadratic_mod_four() {
        // L(1, χ₋₄) = π/4, L(2, χ₋₄) = Catalan's constant
        let chi = DirichletCharacter::all(4).unwrap().into_iter().find(|c| !c.is_trivial()).unwrap();
        assert!((l_value(1, &chi).unwrap().re - PI / 4.0).abs() < 1e-12);
        assert!((l_value(2, &chi).unwrap().re - 0.915_965_594_177_219_015).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_match_direct_series_up_to_fifty() {
        for q in 1..=50u64 {
            for chi in DirichletCharacter::primitive_of_conductor(q).unwrap() {
                for s in [1u8, 2] {
                    if s == 1 && chi.is_trivial() {
                        continue;
                    }
                    let exact = l_value(s, &chi).unwrap();
                    let (series, est) = l_value_series(s, &chi, 400, 6);
                    assert!((exact - series).norm() < 1e-8, "q={q} {chi} s={s}: {exact} vs {series} (est {est})");
                }
            }
        }
    }

    #[test]
    fn imprimitive_l_function_matches_euler_factor() {
        // L(s, χω_p) = (1 − χ(p)p^{−s}) L(s, χ)
        let chi = DirichletCharacter::all(5).unwrap().into_iter().find(|c| c.order() == 4).unwrap();
        let omega3 = DirichletCharacter::trivial(3).unwrap();
        let lifted = chi.mul(&omega3);
        for s in [Complex64::new(2.0, 0.0), Complex64::new(0.3, 1.5), Complex64::new(0.02, 0.0)] {
            let lhs = l_function(s, &lifted).unwrap();
            let rhs = (Complex64::new(1.0, 0.0) - chi.value(3) * (-s * 3f64.ln()).exp()) * l_function(s, &chi).unwrap();
            assert!((lhs - rhs).norm() < 1e-11 * rhs.norm().max(1.0), "{s}");
        }
        let quad = DirichletCharacter::all(5).unwrap().into_iter().find(|c| c.order() == 2).unwrap();
        let l1 = l_function(Complex64::new(2.0, 0.0), &quad).unwrap();
        assert!((l1 - l_value(2, &quad).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn conjugate_characters_share_atoms() {
        let chars = DirichletCharacter::primitive_of_conductor(13).unwrap();
        for chi in &chars {
            let a = l_value_atom(2, chi).unwrap();
            let b = l_value_atom(2, &chi.conj()).unwrap();
            assert_eq!(a, b);
            assert!((a.eval() - l_value(2, chi).unwrap().norm()).abs() < 1e-13);
        }
    }
}
