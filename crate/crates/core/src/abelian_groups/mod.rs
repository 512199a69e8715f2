//! Isomorphism classes of finite abelian groups and the counts the
//! Cohen-Lenstra weights are built from.

mod counting;
mod group;
mod invariant;
mod partition;

pub use counting::{
    aut_order, cyclic_quotient_witness, enumerate_p_groups, hom_count, sur_count,
    surjection_exists,
};
pub use group::AbelianGroup;
pub use invariant::InvariantFactors;
pub use partition::Partition;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cyclic order 0 encodes a free factor, not a finite group")]
    ZeroOrder,
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("could not factor invariant factor {0}")]
    Unfactored(String),
    #[error("malformed integer {0:?}")]
    Parse(String),
}
