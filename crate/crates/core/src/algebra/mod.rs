//! Explicit representations and residual checks for the algebras behind
//! the matrix-product solution: the boundary Askey-Wilson algebra on
//! `U_q(su(2))` modules, the bulk tridiagonal and q-Serre relations, the
//! Dolan-Grady relations of the symmetric process and the `q = 0` family.

mod bulk;
mod constants;
mod relations;
mod rep;

pub use crate::linalg::q_commutator;
pub use bulk::{bulk_pair, shift_generators, ssep_bulk_pair, tasep_algebra_data, tasep_bidiagonal, TasepAlgebraData};
pub use constants::{
    bulk_scalars, fit_structure_constants, structure_constants, ConstantFit, ConstantSource, TriPairScalars,
};
pub use relations::{
    check_relations, check_relations_form, has_printed_variant, RelationForm, RelationKind, RelationReport,
    RelationResidual,
};
pub use rep::{
    build_boundary_ops_pasep, build_boundary_ops_ssep, build_uq_su2_rep, ssep_boundary_operators, BoundaryPair,
    Provenance, Rates, UqSu2Rep,
};
