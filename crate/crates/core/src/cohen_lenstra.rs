//! High-precision evaluation of the Cohen-Lenstra constants and weights.
//!
//! Every constant comes back as a [`TruncatedConstant`]: a value and a
//! rigorous bound on its distance to the true constant. Arithmetic is carried
//! at [`PRECISION`] significant digits, so rounding is far below any tail
//! bound that can be requested; [`ROUNDING_SLACK`] is added to every bound to
//! cover it anyway.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use bigdecimal::{BigDecimal, ToPrimitive};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::abelian_groups::{aut_order, enumerate_p_groups, sur_count, AbelianGroup, Partition};
use crate::primes::{is_prime, primes_up_to};

pub const PRECISION: u64 = 60;
pub const ROUNDING_SLACK: &str = "1e-45";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CohenLenstraError {
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} divides the group order but is not in the prime set")]
    PrimeOutsideSet(u64),
}

/// A constant known to within `tail_bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedConstant {
    pub value: BigDecimal,
    pub tail_bound: BigDecimal,
    pub truncation_params: BTreeMap<String, u64>,
}

impl TruncatedConstant {
    pub fn lower(&self) -> BigDecimal {
        &self.value - &self.tail_bound
    }

    pub fn upper(&self) -> BigDecimal {
        &self.value + &self.tail_bound
    }

    pub fn value_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }

    pub fn tail_f64(&self) -> f64 {
        self.tail_bound.to_f64().unwrap_or(f64::NAN)
    }

    /// Whether `x` lies in `value ± tail_bound`.
    pub fn brackets(&self, x: &BigDecimal) -> bool {
        self.lower() <= *x && *x <= self.upper()
    }

    /// Decimal string of the value with 30 significant digits.
    pub fn value_string(&self) -> String {
        self.value.with_prec(30).to_plain_string()
    }

    pub fn tail_string(&self) -> String {
        self.tail_bound.with_prec(3).to_scientific_notation()
    }
}

impl Serialize for TruncatedConstant {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw<'a> {
            value: String,
            tail_bound: String,
            truncation_params: &'a BTreeMap<String, u64>,
        }
        Raw {
            value: self.value_string(),
            tail_bound: self.tail_string(),
            truncation_params: &self.truncation_params,
        }
        .serialize(s)
    }
}

fn round(x: BigDecimal) -> BigDecimal {
    x.with_prec(PRECISION)
}

fn slack() -> BigDecimal {
    BigDecimal::from_str(ROUNDING_SLACK).expect("literal")
}

fn dec(x: impl Into<BigInt>) -> BigDecimal {
    BigDecimal::from(x.into())
}

fn dec_u(x: &BigUint) -> BigDecimal {
    BigDecimal::from(BigInt::from(x.clone()))
}

fn dec_f64(x: f64) -> BigDecimal {
    BigDecimal::from_str(&format!("{x:e}")).expect("finite float")
}

fn check_tol(tol: f64) -> Result<(), CohenLenstraError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(CohenLenstraError::BadTolerance(tol))
    }
}

fn check_prime(p: u64) -> Result<(), CohenLenstraError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(CohenLenstraError::NotPrime(p))
    }
}

/// `1 / p^k`
fn inverse_power(p: u64, k: u32) -> BigDecimal {
    round(BigDecimal::one() / dec(BigInt::from(p).pow(k)))
}

/// `Q_p = ∏_{k≥2} (1 - p^{-k})`, stopped at the first `K` with
/// `p^{-K}/(p-1) ≤ tol`; the discarded factors lie in `[1 - p^{-K}/(p-1), 1]`.
pub fn q_p(p: u64, tol: f64) -> Result<TruncatedConstant, CohenLenstraError> {
    check_tol(tol)?;
    check_prime(p)?;
    let mut k = 2u32;
    while (p as f64).powi(k as i32) * (p - 1) as f64 * tol < 1.0 {
        k += 1;
    }
    let mut value = BigDecimal::one();
    for j in 2..=k {
        value = round(value * (BigDecimal::one() - inverse_power(p, j)));
    }
    let tail = round(inverse_power(p, k) / dec(p - 1)) + slack();
    Ok(TruncatedConstant { value, tail_bound: tail, truncation_params: params(&[("k_max", k as u64)]) })
}

fn params(pairs: &[(&str, u64)]) -> BTreeMap<String, u64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

/// `ζ(k)` for `k ≥ 2` from `terms` summands; the integral test puts the rest
/// in `[1/((k-1)(N+1)^{k-1}), 1/((k-1)N^{k-1})]`, and the midpoint is
/// returned with half the width as the bound.
fn zeta_with_terms(k: u32, terms: u64) -> TruncatedConstant {
    let mut sum = BigDecimal::zero();
    for n in 1..=terms {
        sum += inverse_power(n, k);
    }
    let km1 = dec(k - 1);
    let hi = round(BigDecimal::one() / (&km1 * dec(BigInt::from(terms).pow(k - 1))));
    let lo = round(BigDecimal::one() / (&km1 * dec(BigInt::from(terms + 1).pow(k - 1))));
    let value = round(sum + (&hi + &lo).half());
    let tail = round((hi - lo).half()) + slack();
    TruncatedConstant { value, tail_bound: tail, truncation_params: params(&[("terms", terms)]) }
}

/// Terms needed for the bracket half-width `≈ N^{-k}/2` to drop below `budget`.
fn zeta_terms(k: u32, budget: f64) -> u64 {
    ((0.5 / budget).powf(1.0 / k as f64).ceil() as u64).max(1)
}

/// `ζ(k)`, `k ≥ 2`, to within `tol`.
pub fn zeta(k: u32, tol: f64) -> Result<TruncatedConstant, CohenLenstraError> {
    check_tol(tol)?;
    assert!(k >= 2, "zeta needs k >= 2");
    let mut terms = zeta_terms(k, tol);
    loop {
        let z = zeta_with_terms(k, terms);
        if z.tail_bound <= dec_f64(tol) {
            return Ok(z);
        }
        terms += terms / 8 + 1;
    }
}

/// `∏_{k≥from} ζ(k)^{-1}` for `from ≥ 3`, or `from = 2` for `Q`.
///
/// Stops at the first `K` with `2^{1-K} ≤ tol/2`: for `k ≥ 3`,
/// `ζ(k) - 1 ≤ 2^{-k} + 2^{1-k}/(k-1) ≤ 2^{1-k}`, so the discarded factors
/// lie in `[1 - 2^{1-K}, 1]`. Each kept `ζ(k)` gets an equal share of the
/// other `tol/2`; since every factor is in `(0, 1]`, errors add.
fn inverse_zeta_product(from: u32, tol: f64) -> TruncatedConstant {
    let mut k_max = from.max(3);
    while 2f64.powi(1 - k_max as i32) > tol / 2.0 {
        k_max += 1;
    }
    let budget = tol / 2.0 / (k_max - from + 1) as f64;
    let mut value = BigDecimal::one();
    let mut tail = round(BigDecimal::one() / dec(BigInt::from(2u32).pow(k_max - 1)));
    let mut first_terms = 0;
    for k in from..=k_max {
        let z = zeta(k, budget).expect("positive budget");
        if k == from {
            first_terms = z.truncation_params["terms"];
        }
        value = round(value / &z.value);
        tail += &z.tail_bound;
    }
    TruncatedConstant {
        value,
        tail_bound: tail + slack(),
        truncation_params: params(&[("k_max", k_max as u64), ("zeta_terms_first", first_terms)]),
    }
}

/// `Q = ∏_{k≥2} ζ(k)^{-1}`.
pub fn q_total(tol: f64) -> Result<TruncatedConstant, CohenLenstraError> {
    check_tol(tol)?;
    Ok(inverse_zeta_product(2, tol))
}

/// `Q` as `∏_{p ≤ cutoff} Q_p`. The primes above the cutoff contribute a
/// factor in `[1 - 1/cutoff, 1]`, because `Σ_{k≥2} p^{-k} = 1/(p(p-1))`
/// and `Σ_{n>X} 1/(n(n-1)) = 1/X`; that term is included in the bound.
pub fn q_total_via_primes(cutoff: u64, tol: f64) -> Result<TruncatedConstant, CohenLenstraError> {
    check_tol(tol)?;
    let primes = primes_up_to(cutoff);
    let share = tol / primes.len().max(1) as f64;
    let mut value = BigDecimal::one();
    let mut tail = round(BigDecimal::one() / dec(cutoff.max(1)));
    for &p in &primes {
        let q = q_p(p, share)?;
        value = round(value * q.value);
        tail += q.tail_bound;
    }
    Ok(TruncatedConstant {
        value,
        tail_bound: tail + slack(),
        truncation_params: params(&[("prime_cutoff", cutoff), ("primes", primes.len() as u64)]),
    })
}

fn check_support(g: &AbelianGroup, primes: &BTreeSet<u64>) -> Result<(), CohenLenstraError> {
    for &p in primes {
        check_prime(p)?;
    }
    match g.primes().find(|p| !primes.contains(p)) {
        Some(p) => Err(CohenLenstraError::PrimeOutsideSet(p)),
        None => Ok(()),
    }
}

/// `P(Y_P ≅ G) = ∏_{p∈P} Q_p / (|G|·|Aut G|)`.
pub fn prob_y(g: &AbelianGroup, primes: &BTreeSet<u64>, tol: f64) -> Result<TruncatedConstant, CohenLenstraError> {
    check_tol(tol)?;
    check_support(g, primes)?;
    let share = tol / primes.len().max(1) as f64;
    let mut value = BigDecimal::one();
    let mut tail = BigDecimal::zero();
    let mut truncation_params = BTreeMap::new();
    for &p in primes {
        let q = q_p(p, share)?;
        value = round(value * q.value);
        tail += q.tail_bound;
        truncation_params.insert(format!("k_max_{p}"), q.truncation_params["k_max"]);
    }
    let weight = dec_u(&(g.order() * aut_order(g)));
    Ok(TruncatedConstant {
        value: round(value / &weight),
        tail_bound: round(tail / weight) + slack(),
        truncation_params,
    })
}

/// `1 + p/((p-1)(p²-1))`, the sum of `1/(|C|·|Aut C|)` over cyclic p-groups.
fn cyclic_factor(p: u64) -> BigDecimal {
    let p_dec = dec(p);
    let den = dec(BigInt::from(p - 1) * (BigInt::from(p) * p - 1u32));
    round(BigDecimal::one() + p_dec / den)
}

/// Probability that `Y_p` is cyclic: `Q_p·(1 + p/((p-1)(p²-1)))`.
pub fn prob_cyclic_p(p: u64, tol: f64) -> Result<TruncatedConstant, CohenLenstraError> {
    let q = q_p(p, tol / 2.0)?;
    let f = cyclic_factor(p);
    Ok(TruncatedConstant {
        value: round(&q.value * &f),
        tail_bound: round(q.tail_bound * f) + slack(),
        truncation_params: q.truncation_params,
    })
}

/// The same probability summed directly over `Z/p^k`, `k ≤ max_exponent`,
/// with `|Aut|` from the group-counting formulas. The omitted terms are at
/// most `Σ_{k>e} p^{1-2k}/(p-1) = p^{-1-2e}/((p-1)(1-p^{-2}))`.
pub fn prob_cyclic_p_series(p: u64, max_exponent: u32, tol: f64) -> Result<TruncatedConstant, CohenLenstraError> {
    let q = q_p(p, tol / 2.0)?;
    let mut sum = BigDecimal::zero();
    for k in 0..=max_exponent {
        let g = AbelianGroup::p_group(p, vec![k]).map_err(|_| CohenLenstraError::NotPrime(p))?;
        sum += round(BigDecimal::one() / dec_u(&(g.order() * aut_order(&g))));
    }
    let p_sq = BigInt::from(p) * p;
    let omitted = round(
        dec(p_sq.clone())
            / (dec(BigInt::from(p).pow(2 * max_exponent + 1) * (p - 1)) * dec(p_sq - 1u32)),
    );
    let f_upper = cyclic_factor(p);
    Ok(TruncatedConstant {
        value: round(&q.value * sum),
        tail_bound: round(q.tail_bound * f_upper + omitted) + slack(),
        truncation_params: params(&[("k_max", q.truncation_params["k_max"]), ("max_exponent", max_exponent as u64)]),
    })
}

/// `Q·∏_p (1 + p/((p-1)(p²-1)))`.
///
/// Evaluated through `Q_p·(1 + p/((p-1)(p²-1))) = ∏_{k≥3}(1-p^{-k})·(1 + 1/(p²(p-1)))`,
/// which gives `∏_{k≥3} ζ(k)^{-1} · ∏_p (1 + 1/(p²(p-1)))`. The prime product
/// converges like `Σ p^{-3}`: the factors beyond `X` multiply it by at most
/// `e^t` with `t = Σ_{n>X} 1/(n²(n-1)) ≤ 1/(2(X-1)²)`, and `e^t ≤ 1 + 2t`.
pub fn cyclic_constant(tol: f64) -> Result<TruncatedConstant, CohenLenstraError> {
    check_tol(tol)?;
    let zeta_part = inverse_zeta_product(3, tol / 3.0);
    // t ≤ tol/12 keeps the prime tail contribution under tol/4.
    let cutoff = ((6.0 / tol).sqrt().ceil() as u64 + 1).max(3);
    let mut prime_part = BigDecimal::one();
    for p in primes_up_to(cutoff) {
        let den = dec(BigInt::from(p) * p * (p - 1));
        prime_part = round(prime_part * (BigDecimal::one() + BigDecimal::one() / den));
    }
    let t = round(BigDecimal::one() / (dec(2u32) * dec(BigInt::from(cutoff - 1).pow(2))));
    let growth = BigDecimal::one() + t.double();
    let value = round(&zeta_part.value * &prime_part);
    let tail = round(&zeta_part.tail_bound * &prime_part * &growth)
        + round(&zeta_part.value * &prime_part * t.double());
    let mut truncation_params = zeta_part.truncation_params;
    truncation_params.insert("prime_cutoff".into(), cutoff);
    Ok(TruncatedConstant { value, tail_bound: tail + slack(), truncation_params })
}

/// `Σ_{|λ| ≤ e} Q_p / (p^{|λ|}·|Aut|)`, the mass of `Y_p` on groups of order
/// at most `p^e`.
pub fn check_normalization(p: u64, max_order_exponent: u32) -> Result<f64, CohenLenstraError> {
    let total = weighted_p_sum(p, max_order_exponent, |_| BigUint::one())?;
    Ok(total.to_f64().unwrap_or(f64::NAN))
}

/// `Σ_λ Q_p·w(λ) / (p^{|λ|}·|Aut|)` over `|λ| ≤ e`.
fn weighted_p_sum(
    p: u64,
    e: u32,
    weight: impl Fn(&Partition) -> BigUint,
) -> Result<BigDecimal, CohenLenstraError> {
    check_prime(p)?;
    let q = q_p(p, 1e-40)?;
    let mut sum = BigDecimal::zero();
    for lambda in enumerate_p_groups(p, e).map_err(|_| CohenLenstraError::NotPrime(p))? {
        let w = weight(&lambda);
        if w.is_zero() {
            continue;
        }
        let h = AbelianGroup::p_group(p, lambda.parts().to_vec()).expect("prime checked");
        sum += round(dec_u(&w) / dec_u(&(h.order() * aut_order(&h))));
    }
    Ok(round(q.value * sum))
}

/// `Σ_H P(Y_P ≅ H)·#Sur(H, G)` over `H` whose Sylow subgroups have order at
/// most `p^e`; tends to `1/|G|` as `e` grows. Both factors are multiplicative
/// over primes, so the sum is a product of one-prime sums.
pub fn moment_identity_check(
    g: &AbelianGroup,
    primes: &BTreeSet<u64>,
    max_order_exponent: u32,
) -> Result<f64, CohenLenstraError> {
    check_support(g, primes)?;
    let mut total = BigDecimal::one();
    for &p in primes {
        let target = AbelianGroup::p_group(p, g.sylow_at(p).parts().to_vec()).expect("prime checked");
        let s = weighted_p_sum(p, max_order_exponent, |lambda| {
            let h = AbelianGroup::p_group(p, lambda.parts().to_vec()).expect("prime checked");
            sur_count(&h, &target)
        })?;
        total = round(total * s);
    }
    Ok(total.to_f64().unwrap_or(f64::NAN))
}

/// The table printed by the `constants` subcommand.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantsTable {
    #[serde(rename = "Q")]
    pub q: TruncatedConstant,
    #[serde(rename = "Q_p")]
    pub q_p: BTreeMap<String, TruncatedConstant>,
    #[serde(rename = "prob_cyclic_p")]
    pub prob_cyclic_p: BTreeMap<String, TruncatedConstant>,
    pub cyclic_constant: TruncatedConstant,
}

pub fn constants_table(tol: f64, primes: &[u64]) -> Result<ConstantsTable, CohenLenstraError> {
    let mut q_ps = BTreeMap::new();
    let mut cyc = BTreeMap::new();
    for &p in primes {
        q_ps.insert(p.to_string(), q_p(p, tol)?);
        cyc.insert(p.to_string(), prob_cyclic_p(p, tol)?);
    }
    Ok(ConstantsTable {
        q: q_total(tol)?,
        q_p: q_ps,
        prob_cyclic_p: cyc,
        cyclic_constant: cyclic_constant(tol)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ps: &[u64]) -> BTreeSet<u64> {
        ps.iter().copied().collect()
    }

    fn close(c: &TruncatedConstant, x: f64, tol: f64) -> bool {
        (c.value_f64() - x).abs() <= tol
    }

    #[test]
    fn q_p_values() {
        let q2 = q_p(2, 1e-10).unwrap();
        assert!(close(&q2, 0.5775761901732, 1e-9));
        assert!(q2.tail_f64() <= 1e-10);
        let big = q_p(1009, 1e-12).unwrap().value_f64();
        let inv = 1.0 / (1009.0f64 * 1009.0);
        assert!(big > 1.0 - 2.0 * inv && big < 1.0 - 0.99 * inv);
        assert!(q_p(3, 1e-9).unwrap().value > q2.value);
        assert_eq!(q_p(4, 1e-3), Err(CohenLenstraError::NotPrime(4)));
        assert_eq!(q_p(2, 0.0), Err(CohenLenstraError::BadTolerance(0.0)));
    }

    #[test]
    fn zeta_two_is_pi_squared_over_six() {
        let z = zeta(2, 1e-9).unwrap();
        let exact = std::f64::consts::PI * std::f64::consts::PI / 6.0;
        assert!((z.value_f64() - exact).abs() < 1e-8);
        assert!((z.value_f64() - exact).abs() <= z.tail_f64() + 1e-15);
    }

    #[test]
    fn q_total_matches_quoted_digits() {
        let q = q_total(1e-6).unwrap();
        assert!(q.tail_f64() <= 1e-6);
        assert!(close(&q, 0.4357571, 1e-6));
    }

    #[test]
    fn q_total_cross_method() {
        let a = q_total(1e-7).unwrap();
        let b = q_total_via_primes(10_000, 1e-9).unwrap();
        let gap = (&a.value - &b.value).abs();
        assert!(gap <= &a.tail_bound + &b.tail_bound);
    }

    #[test]
    fn bracketing_under_refinement() {
        let coarse = q_total(1e-5).unwrap();
        let fine = q_total(1e-6).unwrap();
        assert!(coarse.brackets(&fine.value));
        let coarse = q_p(5, 1e-6).unwrap();
        assert!(coarse.brackets(&q_p(5, 1e-7).unwrap().value));
        let coarse = cyclic_constant(1e-4).unwrap();
        assert!(coarse.brackets(&cyclic_constant(1e-5).unwrap().value));
    }

    #[test]
    fn prob_y_values() {
        let trivial = prob_y(&AbelianGroup::trivial(), &set(&[2]), 1e-9).unwrap();
        assert!(close(&trivial, 0.5775762, 1e-7));
        let z2 = AbelianGroup::from_cyclic_orders(&[2]).unwrap();
        assert!(close(&prob_y(&z2, &set(&[2]), 1e-9).unwrap(), 0.2887881, 1e-7));
        let v4 = AbelianGroup::from_cyclic_orders(&[2, 2]).unwrap();
        assert!(close(&prob_y(&v4, &set(&[2]), 1e-9).unwrap(), 0.0240657, 1e-7));
        let z3 = AbelianGroup::from_cyclic_orders(&[3]).unwrap();
        assert_eq!(prob_y(&z3, &set(&[2]), 1e-6), Err(CohenLenstraError::PrimeOutsideSet(3)));
    }

    #[test]
    fn cyclic_probabilities() {
        let c2 = prob_cyclic_p(2, 1e-9).unwrap();
        assert!(close(&c2, 0.9626270, 1e-7));
        let series = prob_cyclic_p_series(2, 20, 1e-9).unwrap();
        assert!((c2.value_f64() - series.value_f64()).abs() < 1e-5);
        assert!(prob_cyclic_p(997, 1e-9).unwrap().value_f64() > 0.999);
        // 1 - O(p^-6): below 1, but not in f64.
        assert!(prob_cyclic_p(997, 1e-24).unwrap().upper() < BigDecimal::one());
    }

    #[test]
    fn cyclic_constant_value() {
        let c = cyclic_constant(1e-6).unwrap();
        assert!(c.tail_f64() <= 1e-6);
        assert!(close(&c, 0.9603461, 1e-6));
        assert!(c.value > q_total(1e-6).unwrap().value);
        let mut partial = BigDecimal::one();
        for p in primes_up_to(100) {
            partial *= prob_cyclic_p(p, 1e-12).unwrap().value;
        }
        assert!(c.lower() < partial);
    }

    #[test]
    fn normalization() {
        assert!((check_normalization(2, 0).unwrap() - 0.5775762).abs() < 1e-7);
        assert!(check_normalization(2, 6).unwrap() >= 0.999);
        for p in [2, 3, 5] {
            let mut last = 0.0;
            for e in 0..=8 {
                let s = check_normalization(p, e).unwrap();
                assert!(s >= last && s <= 1.0 + 1e-12);
                last = s;
            }
        }
    }

    #[test]
    fn moment_identity() {
        let trivial = AbelianGroup::trivial();
        let z2 = AbelianGroup::from_cyclic_orders(&[2]).unwrap();
        let v4 = AbelianGroup::from_cyclic_orders(&[2, 2]).unwrap();
        let z3 = AbelianGroup::from_cyclic_orders(&[3]).unwrap();
        assert_eq!(
            moment_identity_check(&trivial, &set(&[2]), 5).unwrap(),
            check_normalization(2, 5).unwrap()
        );
        assert!((moment_identity_check(&z2, &set(&[2]), 8).unwrap() - 0.5).abs() < 1e-3);
        assert!((moment_identity_check(&v4, &set(&[2]), 8).unwrap() - 0.25).abs() < 1e-2);
        for (g, p, target) in [(&z2, 2, 0.5), (&z3, 3, 1.0 / 3.0), (&v4, 2, 0.25)] {
            let mut last = f64::INFINITY;
            for e in 1..=8 {
                let err = (moment_identity_check(g, &set(&[p]), e).unwrap() - target).abs();
                assert!(err <= last, "{g} e={e}");
                last = err;
            }
        }
    }

    #[test]
    fn constants_json_shape() {
        let table = constants_table(1e-6, &[2]).unwrap();
        let json = serde_json::to_value(&table).unwrap();
        let q: f64 = json["Q"]["value"].as_str().unwrap().parse().unwrap();
        assert!((q - 0.4357571).abs() < 1e-6);
        assert!(json["Q_p"]["2"]["tail_bound"].is_string());
        assert!(json["cyclic_constant"]["value"].as_str().unwrap().starts_with("0.96034"));
    }
}
