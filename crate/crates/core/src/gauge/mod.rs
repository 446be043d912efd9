//! Gauge transformations of `gl_n`-type dynamical R-matrices.

mod forms;
mod moves;
mod two_form;

pub use forms::{
    closedness_defect, d_gamma, delta_s, exactness_defect, form_deviation, index_tuples, is_closed, is_exact_witness,
    MultiplicativeForm, ScalarFn,
};
pub use moves::{
    conjugated_rmatrix, gauge_reparam, gauge_scale, gauge_twist, twist_equivalence, twist_matrix, SpectralScalar,
};
pub use two_form::{
    exactness_witness, exactness_witness_scaled, explicit_two_form, rho, sigma, witness_eta, witness_xi, witness_zeta,
    TwoFormParams,
};
