use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{AbelianGroup, GroupError, Partition};
use crate::primes::{factorize_big, factorize_u64, is_prime, valuation};

/// Invariant-factor form `Z/d_1 ⊕ … ⊕ Z/d_r` with `d_r | … | d_1` and every
/// `d_i > 1`.
///
/// This is the form produced by Smith normal form. Unlike [`AbelianGroup`] it
/// needs no factorization, so it can carry sandpile groups whose order has
/// hundreds of digits. The structural predicates below work directly on the
/// divisibility chain.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<String>", try_from = "Vec<String>")]
pub struct InvariantFactors {
    // largest first
    factors: Vec<BigUint>,
}

impl InvariantFactors {
    pub fn trivial() -> Self {
        Self::default()
    }

    /// Normalizes arbitrary positive cyclic orders into a divisibility chain.
    pub fn from_orders<I: IntoIterator<Item = BigUint>>(orders: I) -> Result<Self, GroupError> {
        let mut xs: Vec<BigUint> = Vec::new();
        for d in orders {
            if d.is_zero() {
                return Err(GroupError::ZeroOrder);
            }
            if !d.is_one() {
                xs.push(d);
            }
        }
        // Z/a ⊕ Z/b ≅ Z/gcd ⊕ Z/lcm; after sweep i, xs[i] divides every later entry.
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                if !xs[j].is_multiple_of(&xs[i]) {
                    let g = xs[i].gcd(&xs[j]);
                    let l = &xs[i] / &g * &xs[j];
                    xs[i] = g;
                    xs[j] = l;
                }
            }
        }
        xs.retain(|d| !d.is_one());
        xs.reverse();
        Ok(InvariantFactors { factors: xs })
    }

    pub(crate) fn from_descending_unchecked(factors: Vec<BigUint>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].is_multiple_of(&w[1])));
        InvariantFactors {
            factors: factors.into_iter().filter(|d| !d.is_one()).collect(),
        }
    }

    /// Factors, largest first.
    pub fn descending(&self) -> &[BigUint] {
        &self.factors
    }

    /// Minimal number of generators.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> BigUint {
        self.factors.iter().fold(BigUint::one(), |acc, d| acc * d)
    }

    pub fn exponent(&self) -> BigUint {
        self.factors.first().cloned().unwrap_or_else(BigUint::one)
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.factors.len() <= 1
    }

    fn factor(&self, k: usize) -> BigUint {
        self.factors.get(k).cloned().unwrap_or_else(BigUint::one)
    }

    /// Whether some surjection `self ↠ target` exists.
    pub fn surjects_onto(&self, target: &InvariantFactors) -> bool {
        target.rank() <= self.rank()
            && target.factors.iter().zip(&self.factors).all(|(g, h)| h.is_multiple_of(g))
    }

    /// Whether `self` has a cyclic subgroup `C` with `self / C ≅ target`.
    pub fn has_cyclic_quotient(&self, target: &InvariantFactors) -> bool {
        if target.rank() > self.rank() {
            return false;
        }
        (0..self.rank()).all(|k| {
            let g = target.factor(k);
            self.factors[k].is_multiple_of(&g) && g.is_multiple_of(&self.factor(k + 1))
        })
    }

    /// Sylow parts at the given primes, read off by valuations.
    pub fn sylow_restrict(&self, primes: &BTreeSet<u64>) -> Result<AbelianGroup, GroupError> {
        let mut sylow = BTreeMap::new();
        for &p in primes {
            if !is_prime(p) {
                return Err(GroupError::NotPrime(p));
            }
            let parts = self.factors.iter().map(|d| valuation(d, p)).collect();
            sylow.insert(p, Partition::new(parts));
        }
        Ok(AbelianGroup::from_sylow_unchecked(sylow))
    }

    /// `G ⊗ Z/aZ`, which is always small enough to factor.
    pub fn tensor_mod(&self, a: u64) -> Result<AbelianGroup, GroupError> {
        if a == 0 {
            return Err(GroupError::ZeroModulus);
        }
        let mut sylow = BTreeMap::new();
        for (p, v) in factorize_u64(a) {
            let parts = self.factors.iter().map(|d| valuation(d, p).min(v)).collect();
            sylow.insert(p, Partition::new(parts));
        }
        Ok(AbelianGroup::from_sylow_unchecked(sylow))
    }

    /// Full prime-partition form. Fails when a factor cannot be factored.
    pub fn to_group(&self) -> Result<AbelianGroup, GroupError> {
        let mut sylow: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for d in &self.factors {
            let f = factorize_big(d).ok_or_else(|| GroupError::Unfactored(d.to_string()))?;
            for (p, e) in f {
                sylow.entry(p).or_default().push(e);
            }
        }
        Ok(AbelianGroup::from_sylow_unchecked(
            sylow.into_iter().map(|(p, parts)| (p, Partition::new(parts))).collect(),
        ))
    }
}

impl From<InvariantFactors> for Vec<String> {
    fn from(inv: InvariantFactors) -> Self {
        inv.factors.iter().map(|d| d.to_str_radix(10)).collect()
    }
}

impl TryFrom<Vec<String>> for InvariantFactors {
    type Error = GroupError;

    fn try_from(raw: Vec<String>) -> Result<Self, Self::Error> {
        let parsed = raw
            .iter()
            .map(|s| s.parse::<BigUint>().map_err(|_| GroupError::Parse(s.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        InvariantFactors::from_orders(parsed)
    }
}

impl fmt::Display for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "1");
        }
        for (i, d) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "Z/{d}")?;
        }
        Ok(())
    }
}
