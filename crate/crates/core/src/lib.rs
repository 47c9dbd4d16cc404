//! Exact conjugacy decisions for isometries of bilinear spaces over
//! algebraically closed fields of positive characteristic.
//!
//! The crate simulates an algebraic closure of GF(p) as a lazily grown tower
//! of finite-field levels, and on top of that provides exact linear algebra,
//! polynomial factorization, bilinear-form normalization, Jordan and sl2
//! machinery, and the top-level decision procedure: given two isometries of
//! the same non-degenerate symmetric or alternating space, decide whether
//! some isometry conjugates one to the other, and if so construct it.

pub mod conjugacy;
pub mod decomp;
pub mod error;
pub mod field;
pub mod forms;
pub mod linalg;
pub mod oracle;
mod polyvec;
pub mod poly;
pub mod problem;
pub mod sl2;

pub use conjugacy::{
    case1_witness, case2_witness, case3_reduce, isometry_conjugacy, CaseTag, ConjugacyVerdict,
    TraceEntry,
};
pub use decomp::{
    multiplicative_jordan, primary_decomposition, JordanPair, PrimaryComponent,
    PrimaryDecomposition, StandardComponent,
};
pub use error::{Error, Result};
pub use field::{common_superlevel, embed_anywhere, sqrt_or_extend, FieldElement, Level};
pub use forms::{
    canonical_gram, classify_form, normal_basis, standard_pair_basis, BilinearSpace, FormKind,
    StandardPairBasis,
};
pub use linalg::{
    apply_polynomial, characteristic_polynomial, elementary_divisors, generalized_eigenspace,
    gl_conjugacy_witness, jordan_form, kernel, least_solution, minimal_polynomial,
    operator_matrix, solve, ElementaryDivisorSet, JordanForm, Matrix, Subspace,
};
pub use oracle::{brute_force_conjugate, enumerate_isometries};
pub use poly::{crt, factorize, self_dual_split, splitting_field};
pub use poly::{Factorization, Polynomial, SelfDualSplit};
pub use problem::{
    divisors_to_json, element_to_json, level_to_json, matrix_to_json, parse_element,
    parse_matrix, parse_problem, poly_to_json, problem_to_json, ProblemFile,
};
pub use sl2::{
    bracket, classify_restriction, exp_nilpotent, log_unipotent, sl2_irreducible_decomposition,
    sl2_triple, sym_power_form, unipotent_orthogonal_decomposition, IrreducibleSummand,
    RestrictionClass, Sl2Triple, UnipotentOrthogonalDecomposition,
};
