//! Small prime utilities shared by the group, modular and constant code.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_prime::nt_funcs;
use num_prime::FactorizationConfig;
use num_traits::{One, ToPrimitive, Zero};

pub fn is_prime(n: u64) -> bool {
    nt_funcs::is_prime64(n)
}

/// Primes `<= limit`, ascending.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    nt_funcs::primes(limit + 1).into_iter().filter(|&p| p <= limit).collect()
}

pub fn factorize_u64(n: u64) -> BTreeMap<u64, u32> {
    nt_funcs::factorize64(n).into_iter().map(|(p, e)| (p, e as u32)).collect()
}

/// Factors `n` completely into primes that fit in `u64`.
///
/// Returns `None` when the factorization routine gives up or a prime factor
/// exceeds `u64`. Zero has no factorization.
pub fn factorize_big(n: &BigUint) -> Option<BTreeMap<u64, u32>> {
    if n.is_zero() {
        return None;
    }
    if n.is_one() {
        return Some(BTreeMap::new());
    }
    if let Some(small) = n.to_u64() {
        return Some(factorize_u64(small));
    }
    let mut config = FactorizationConfig::default();
    config.rho_trials = 64;
    let (found, rest) = nt_funcs::factors(n.clone(), Some(config));
    if rest.is_some_and(|r| !r.is_empty()) {
        return None;
    }
    let mut out = BTreeMap::new();
    for (p, e) in found {
        out.insert(p.to_u64()?, e as u32);
    }
    Some(out)
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigUint, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let p = BigUint::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&n, &p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

pub fn valuation_u64(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Descending primes just below `2^62`, used as moduli for multimodular work.
pub fn large_moduli(count: usize) -> Vec<u64> {
    static CACHE: OnceLock<Vec<u64>> = OnceLock::new();
    let cached = CACHE.get_or_init(|| primes_below(1 << 62, 64));
    if count <= cached.len() {
        cached[..count].to_vec()
    } else {
        primes_below(1 << 62, count)
    }
}

fn primes_below(bound: u64, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut candidate = bound - 1;
    while out.len() < count {
        if is_prime(candidate) {
            out.push(candidate);
        }
        candidate -= 2;
    }
    out
}
