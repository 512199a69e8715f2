//! Total sandpile groups of directed multigraphs, exact Smith normal form
//! over the integers, and Monte Carlo comparison of random sandpile groups
//! against their Cohen-Lenstra limit law.

pub mod abelian_groups;
pub mod primes;
pub mod integer_smith;
pub mod random_digraph;
pub mod sandpile;
pub mod cohen_lenstra;
pub mod oracle;
pub mod experiment;
