//! Fermionic operator algebra, the generalized excitation pool, and the
//! Jordan-Wigner map to Pauli sums.

mod fermion;
mod pauli;
mod pool;

pub use fermion::{FermionOperator, Ladder, Term, PRUNE};
pub use pauli::{jordan_wigner, PauliString, PauliSum};
pub use pool::{build_pool, pool_generators, LabelKind, OperatorPool, PoolElement, PoolKind, PoolLabel};
