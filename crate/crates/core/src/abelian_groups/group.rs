use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{GroupError, InvariantFactors, Partition};
use crate::primes::{factorize_u64, is_prime};

/// Isomorphism class of a finite abelian group, stored one Sylow part per
/// prime. Primes with trivial Sylow part are absent, so structural equality
/// is group isomorphism.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawGroup", into = "RawGroup")]
pub struct AbelianGroup {
    sylow: BTreeMap<u64, Partition>,
}

#[derive(Serialize, Deserialize)]
struct RawGroup {
    sylow: BTreeMap<u64, Partition>,
}

impl TryFrom<RawGroup> for AbelianGroup {
    type Error = GroupError;

    fn try_from(raw: RawGroup) -> Result<Self, Self::Error> {
        AbelianGroup::from_sylow(raw.sylow)
    }
}

impl From<AbelianGroup> for RawGroup {
    fn from(g: AbelianGroup) -> Self {
        RawGroup { sylow: g.sylow }
    }
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    /// Builds a group from per-prime partitions, checking primality.
    pub fn from_sylow(sylow: BTreeMap<u64, Partition>) -> Result<Self, GroupError> {
        let mut out = BTreeMap::new();
        for (p, part) in sylow {
            if !is_prime(p) {
                return Err(GroupError::NotPrime(p));
            }
            if !part.is_empty() {
                out.insert(p, part);
            }
        }
        Ok(AbelianGroup { sylow: out })
    }

    /// The p-group with the given exponent partition.
    pub fn p_group(p: u64, parts: Vec<u32>) -> Result<Self, GroupError> {
        Self::from_sylow(BTreeMap::from([(p, Partition::new(parts))]))
    }

    /// `⊕ Z/dZ` over the given cyclic orders, in canonical form.
    pub fn from_cyclic_orders(orders: &[u64]) -> Result<Self, GroupError> {
        let mut sylow: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &d in orders {
            if d == 0 {
                return Err(GroupError::ZeroOrder);
            }
            for (p, e) in factorize_u64(d) {
                sylow.entry(p).or_default().push(e);
            }
        }
        Ok(AbelianGroup {
            sylow: sylow.into_iter().map(|(p, parts)| (p, Partition::new(parts))).collect(),
        })
    }

    pub(crate) fn from_sylow_unchecked(sylow: BTreeMap<u64, Partition>) -> Self {
        AbelianGroup {
            sylow: sylow.into_iter().filter(|(_, part)| !part.is_empty()).collect(),
        }
    }

    pub fn sylow_parts(&self) -> &BTreeMap<u64, Partition> {
        &self.sylow
    }

    /// Partition at `p`; empty when `p` does not divide the order.
    pub fn sylow_at(&self, p: u64) -> Partition {
        self.sylow.get(&p).cloned().unwrap_or_default()
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.sylow.keys().copied()
    }

    pub fn is_trivial(&self) -> bool {
        self.sylow.is_empty()
    }

    pub fn order(&self) -> BigUint {
        self.sylow
            .iter()
            .map(|(&p, part)| BigUint::from(p).pow(part.size()))
            .fold(BigUint::one(), |acc, x| acc * x)
    }

    /// Keeps exactly the Sylow parts at the given primes.
    pub fn sylow_restrict(&self, primes: &BTreeSet<u64>) -> Result<Self, GroupError> {
        if let Some(&p) = primes.iter().find(|&&p| !is_prime(p)) {
            return Err(GroupError::NotPrime(p));
        }
        Ok(AbelianGroup {
            sylow: self
                .sylow
                .iter()
                .filter(|(p, _)| primes.contains(p))
                .map(|(&p, part)| (p, part.clone()))
                .collect(),
        })
    }

    /// `G ⊗ Z/aZ`.
    pub fn tensor_mod(&self, a: u64) -> Result<Self, GroupError> {
        if a == 0 {
            return Err(GroupError::ZeroModulus);
        }
        let mut sylow = BTreeMap::new();
        for (p, v) in factorize_u64(a) {
            if let Some(part) = self.sylow.get(&p) {
                sylow.insert(p, part.truncate_exponents(v));
            }
        }
        Ok(AbelianGroup::from_sylow_unchecked(sylow))
    }

    pub fn is_cyclic(&self) -> bool {
        self.sylow.values().all(|part| part.len() <= 1)
    }

    /// Smallest `e` with `eG = 0`.
    pub fn exponent(&self) -> BigUint {
        self.sylow
            .iter()
            .map(|(&p, part)| BigUint::from(p).pow(part.largest()))
            .fold(BigUint::one(), |acc, x| acc * x)
    }

    /// Direct sum.
    pub fn direct_sum(&self, other: &AbelianGroup) -> AbelianGroup {
        let mut sylow = self.sylow.clone();
        for (&p, part) in &other.sylow {
            let entry = sylow.entry(p).or_default();
            let mut parts = entry.parts().to_vec();
            parts.extend_from_slice(part.parts());
            *entry = Partition::new(parts);
        }
        AbelianGroup { sylow }
    }

    pub fn invariant_factors(&self) -> InvariantFactors {
        let rank = self.sylow.values().map(Partition::len).max().unwrap_or(0);
        // Descending: the k-th largest factor collects the k-th part at every prime.
        let factors = (0..rank)
            .map(|k| {
                self.sylow
                    .iter()
                    .map(|(&p, part)| BigUint::from(p).pow(part.part(k)))
                    .fold(BigUint::one(), |acc, x| acc * x)
            })
            .collect();
        InvariantFactors::from_descending_unchecked(factors)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "1");
        }
        let mut first = true;
        for (p, part) in &self.sylow {
            for e in part.parts() {
                if !first {
                    write!(f, "+")?;
                }
                first = false;
                if *e == 1 {
                    write!(f, "Z/{p}")?;
                } else {
                    write!(f, "Z/{p}^{e}")?;
                }
            }
        }
        Ok(())
    }
}
