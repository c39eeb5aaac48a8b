//! Larmour decomposition `h = h0 + h1` of diagonal eps-hermitian forms over
//! quaternion division algebras over `k((t))`, with isometry witnesses, and
//! the residue maps `d0`, `d1` into Witt groups over the residue algebra.

pub mod base_fields;
pub mod error;
pub mod hermitian;
pub mod involutions;
pub mod quad_forms;
pub mod quaternion;
pub mod residue_maps;
pub mod sample;
pub mod selftest;
pub mod valued_field;

pub use base_fields::{ResElem, ResidueField};
pub use error::{Error, ErrorKind, Result};
pub use hermitian::{larmour_decompose, HermitianForm, IsometryWitness, LarmourSplit};
pub use involutions::{classify_case, CaseLabel, CaseRecord, Involution};
pub use quaternion::{division_algebra, normalize_presentation, QuatAlgebra, QuatElem};
pub use residue_maps::{boundary, d0, d1, witt_equal, BoundaryClass};
pub use valued_field::{Laurent, ValuedField};
