//! Lower central series, enveloping-algebra filtrations and Lie dimension
//! subrings of finitely presented Lie rings over the integers.
//!
//! Everything is exact: Lie rings are handled in Hall coordinates of a
//! truncated free Lie ring, enveloping algebras as truncated free associative
//! rings, and every subgroup (ideals, series terms, dimension subrings) as an
//! integer lattice in Hermite normal form.

pub mod assoc;
pub mod dimsub;
pub mod fplie;
pub mod hall;
pub mod intlat;
pub mod random;

pub use assoc::{AssocContext, AssocError, AssocVec, Word};
pub use fplie::{
    associated_graded, graded_invariants, preabelianize, FpLieError, NilpotentQuotient,
    PreabelianData, Presentation,
};
pub use hall::{witt_rank, FreeLieContext, Generator, HallElement, HallError, LieVec, Shape};
pub use intlat::{AbelianInvariants, IntMat, Lattice, LatticeError, QuotientMap, SparseVec};
