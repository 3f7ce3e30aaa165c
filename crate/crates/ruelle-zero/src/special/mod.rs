//! Special functions and the exact magnitude algebra.

mod barnes;
mod gamma;
mod magnitude;
mod sines;
mod zeta;

pub use barnes::log_barnes_g;
pub use gamma::{digamma, log_gamma, EULER_GAMMA};
pub use magnitude::{Atom, FactoredMagnitude, LValueKey, SignedMagnitude};
pub(crate) use magnitude::factorize;
pub use sines::{sine_product, sine_product_closed, sine_product_integer, sine_product_integer_direct};
pub use zeta::{hurwitz_zeta, hurwitz_zeta_complex, riemann_zeta_complex};

/// Even-index Bernoulli numbers B_2, B_4, …, B_30.
pub(crate) const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// Kahan–Babuška summation for complex terms.
#[derive(Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: num_complex::Complex64,
    comp: num_complex::Complex64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: num_complex::Complex64) {
        self.sum.re = neumaier(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = neumaier(self.sum.im, x.im, &mut self.comp.im);
    }

    pub(crate) fn value(&self) -> num_complex::Complex64 {
        self.sum + self.comp
    }
}

fn neumaier(sum: f64, x: f64, comp: &mut f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}
