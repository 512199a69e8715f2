//! Hom, surjection and automorphism counts between finite abelian groups.
//!
//! All counts factor over primes, so each is computed per Sylow part and
//! multiplied. For p-groups `H` of type `μ` and `G` of type `λ`:
//!
//! * `|Hom(H, G)| = p^{Σ_{i,j} min(μ_j, λ_i)}`.
//! * A hom `H → G` is onto iff its reduction `H/pH → G/pG` is onto. Row `i`
//!   of that reduction (an `F_p` matrix) may be nonzero exactly in the
//!   columns `j` with `μ_j ≥ λ_i`; call that count `d_i`. With `λ` sorted
//!   descending the admissible row spaces are nested, giving
//!   `|Sur(H, G)| = p^{Σ min − Σ d_i} · Π_i (p^{d_i} − p^{i−1})`.
//! * `Aut(G) = Sur(G, G)` since `G` is finite.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{AbelianGroup, GroupError, Partition};
use crate::primes::is_prime;

fn pow(p: u64, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

fn min_sum(h: &Partition, g: &Partition) -> u32 {
    h.parts()
        .iter()
        .flat_map(|&a| g.parts().iter().map(move |&b| a.min(b)))
        .sum()
}

fn hom_count_p(p: u64, h: &Partition, g: &Partition) -> BigUint {
    pow(p, min_sum(h, g))
}

fn sur_count_p(p: u64, h: &Partition, g: &Partition) -> BigUint {
    if !h.dominates(g) {
        return BigUint::zero();
    }
    let mut support = 0;
    let mut count = BigUint::one();
    for (i, &lambda) in g.parts().iter().enumerate() {
        let d = h.parts().iter().filter(|&&mu| mu >= lambda).count() as u32;
        support += d;
        let term = pow(p, d) - pow(p, i as u32);
        if term.is_zero() {
            return term;
        }
        count *= term;
    }
    count * pow(p, min_sum(h, g) - support)
}

fn over_primes(
    h: &AbelianGroup,
    g: &AbelianGroup,
    per_prime: impl Fn(u64, &Partition, &Partition) -> BigUint,
) -> BigUint {
    let primes: BTreeSet<u64> = h.primes().chain(g.primes()).collect();
    primes
        .into_iter()
        .map(|p| per_prime(p, &h.sylow_at(p), &g.sylow_at(p)))
        .fold(BigUint::one(), |acc, x| acc * x)
}

/// `|Hom(H, G)|`.
pub fn hom_count(h: &AbelianGroup, g: &AbelianGroup) -> BigUint {
    over_primes(h, g, hom_count_p)
}

/// `|Sur(H, G)|`, zero when no surjection exists.
pub fn sur_count(h: &AbelianGroup, g: &AbelianGroup) -> BigUint {
    over_primes(h, g, sur_count_p)
}

/// `|Aut(G)|`.
pub fn aut_order(g: &AbelianGroup) -> BigUint {
    sur_count(g, g)
}

/// Per-prime partition domination.
pub fn surjection_exists(h: &AbelianGroup, g: &AbelianGroup) -> bool {
    g.sylow_parts().iter().all(|(&p, gp)| h.sylow_at(p).dominates(gp))
}

/// Whether `H` has a cyclic subgroup with quotient isomorphic to `G`.
///
/// Per prime the partitions must interlace: `λ_k ≥ μ_k ≥ λ_{k+1}` where
/// `λ` is the type of `H` and `μ` the type of `G`.
pub fn cyclic_quotient_witness(h: &AbelianGroup, g: &AbelianGroup) -> bool {
    let primes: BTreeSet<u64> = h.primes().chain(g.primes()).collect();
    primes.into_iter().all(|p| {
        let (lam, mu) = (h.sylow_at(p), g.sylow_at(p));
        mu.len() <= lam.len()
            && (0..lam.len()).all(|k| lam.part(k) >= mu.part(k) && mu.part(k) >= lam.part(k + 1))
    })
}

/// Every p-group type of order at most `p^max_exponent`, each once, by
/// increasing order.
pub fn enumerate_p_groups(p: u64, max_exponent: u32) -> Result<Vec<Partition>, GroupError> {
    if !is_prime(p) {
        return Err(GroupError::NotPrime(p));
    }
    Ok((0..=max_exponent).flat_map(Partition::all_of_size).collect())
}
