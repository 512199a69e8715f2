//! Exact Smith normal form and cokernels of integer matrices.

mod cokernel;
mod matrix;
pub mod modular;
mod smith;

pub use cokernel::{cokernel, cokernel_integral, cokernel_mod_multiple, Cokernel};
pub use matrix::IntMatrix;
pub use modular::{cokernel_mod, cokernel_prime_power, determinant_multimodular};
pub use smith::{determinant, smith_mod, smith_normal_form, SmithDecomposition, SmithReport};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SmithError {
    #[error("rows have different lengths")]
    Ragged,
    #[error("determinant of a non-square {rows}x{cols} matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("prime power modulus does not fit in 63 bits")]
    ModulusTooLarge,
    #[error("malformed integer {0:?}")]
    Parse(String),
}
