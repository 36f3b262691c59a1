//! Cone programs for channel interpolation: problem data, atoms and oracles.

pub mod atom;
pub mod dual;
pub mod lmo;
pub mod membership;
pub mod program;
pub mod witness;

pub use atom::{realize_sum, Atom, AtomPayload};
pub use dual::{gamma_dual, DualParams, GammaDual};
pub use lmo::{lmo, min_product_vector, min_unitary_vector, LmoOutput, ProductSearch};
pub use membership::{classify_ebt, membership_decompose, ConicDecomposition, EbtClass, MembershipFailure};
pub use program::{
    objective, ConeKind, ConeSpec, InterpolationProblem, ObjectiveValue, ProgramSpec, Residual,
    TpMode, DEFAULT_LMO_RESTARTS,
};
pub use witness::{projection_pair_search, pt_witness, ProjectionPair, PtWitness};
