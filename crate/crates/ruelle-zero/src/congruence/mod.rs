//! `Γ₀(N)` with a Dirichlet character: invariants, cusp and elliptic actions,
//! scattering sets, L-values and the lead term of the Ruelle zeta function
//! at zero.

pub mod characters;
pub mod lead;
pub mod level;
pub mod lvalues;
pub mod prime_square;
pub mod scattering;

pub use characters::DirichletCharacter;
pub use level::{
    chi_on_parabolic, cusp_set, elliptic_action, level_invariants, tau0_closed_form, CuspRep, EllipticAction,
    LevelInvariants,
};
pub use lvalues::{l_function, l_value, l_value_atom};
pub use scattering::{scattering_lead, scattering_sets, ScatteringLead, ScatteringSets, ScatteringTriple};
pub use lead::{congruence_report, congruence_surface, parabolic_product, ruelle_lead_congruence, ruelle_lead_orbifold, CongruenceReport};
pub use prime_square::{prime_square_case, prime_square_details, PrimeSquareCase, Variant};
