//! Word-sized modular elimination: elementary divisors over `Z/p^k`,
//! determinants and linear solves over `F_p`, and CRT reconstruction.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{IntMatrix, SmithError};
use crate::abelian_groups::{AbelianGroup, Partition};
use crate::primes::{factorize_u64, large_moduli};

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + (m - b)
    }
}

fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    let ext = (a as i128).extended_gcd(&(m as i128));
    if ext.gcd != 1 {
        return None;
    }
    Some(ext.x.rem_euclid(m as i128) as u64)
}

fn residues(m: &IntMatrix, modulus: u64) -> Vec<u64> {
    let big = BigInt::from(modulus);
    m.entries()
        .iter()
        .map(|x| match x.to_i64() {
            Some(s) if modulus <= i64::MAX as u64 => s.rem_euclid(modulus as i64) as u64,
            _ => x.mod_floor(&big).to_u64().unwrap(),
        })
        .collect()
}

/// Elementary-divisor exponents of `M ⊗ Z/p^k`: the partition of
/// `coker(M) ⊗ Z/p^k`. Parts equal to `k` are indistinguishable from larger
/// exponents in the integral cokernel.
pub fn cokernel_prime_power(m: &IntMatrix, p: u64, k: u32) -> Result<Partition, SmithError> {
    let q = p
        .checked_pow(k)
        .filter(|&q| q < (1 << 63))
        .ok_or(SmithError::ModulusTooLarge)?;
    if k == 0 {
        return Ok(Partition::empty());
    }
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = residues(m, q);
    let valuation = |x: u64| -> u32 {
        if x == 0 {
            k
        } else {
            let mut v = 0;
            let mut x = x;
            while x % p == 0 {
                x /= p;
                v += 1;
            }
            v
        }
    };
    let mut parts = Vec::with_capacity(rows);
    let steps = rows.min(cols);
    let mut t = 0;
    while t < steps {
        // Pivot of least valuation; ties to lowest row then lowest column.
        let mut best: Option<(u32, usize, usize)> = None;
        'search: for i in t..rows {
            for j in t..cols {
                let v = valuation(a[i * cols + j]);
                if v < k && best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                    if v == 0 {
                        break 'search;
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        if pi != t {
            for j in 0..cols {
                a.swap(pi * cols + j, t * cols + j);
            }
        }
        if pj != t {
            for i in 0..rows {
                a.swap(i * cols + pj, i * cols + t);
            }
        }
        let pv = p.pow(v);
        let unit_inv = inverse_mod(a[t * cols + t] / pv, q).expect("pivot unit part invertible");
        for i in t + 1..rows {
            let x = a[i * cols + t];
            if x == 0 {
                continue;
            }
            let f = mul_mod(x / pv, unit_inv, q);
            for j in t..cols {
                let y = mul_mod(f, a[t * cols + j], q);
                a[i * cols + j] = sub_mod(a[i * cols + j], y, q);
            }
        }
        // Column clearing only touches row t once column t is zero below.
        parts.push(v);
        t += 1;
    }
    parts.extend(std::iter::repeat_n(k, rows - t));
    Ok(Partition::new(parts))
}

/// `coker(M) ⊗ Z/a`, computed one prime power at a time.
pub fn cokernel_mod(m: &IntMatrix, a: u64) -> Result<AbelianGroup, SmithError> {
    if a == 0 {
        return Err(SmithError::ZeroModulus);
    }
    let mut sylow = BTreeMap::new();
    for (p, k) in factorize_u64(a) {
        sylow.insert(p, cokernel_prime_power(m, p, k)?);
    }
    Ok(AbelianGroup::from_sylow(sylow).expect("keys come from factorization"))
}

/// Rank of `M` over `F_p`.
pub fn rank_mod_p(m: &IntMatrix, p: u64) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = residues(m, p);
    let mut rank = 0;
    for c in 0..cols {
        let Some(r) = (rank..rows).find(|&r| a[r * cols + c] != 0) else { continue };
        if r != rank {
            for j in 0..cols {
                a.swap(r * cols + j, rank * cols + j);
            }
        }
        let inv = inverse_mod(a[rank * cols + c], p).unwrap();
        for i in rank + 1..rows {
            let x = a[i * cols + c];
            if x == 0 {
                continue;
            }
            let f = mul_mod(x, inv, p);
            for j in c..cols {
                let y = mul_mod(f, a[rank * cols + j], p);
                a[i * cols + j] = sub_mod(a[i * cols + j], y, p);
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Pivot columns of a row echelon form of `M` over `F_p`.
pub fn pivot_columns_mod_p(m: &IntMatrix, p: u64) -> Vec<usize> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = residues(m, p);
    let mut pivots = Vec::new();
    for c in 0..cols {
        let rank = pivots.len();
        if rank == rows {
            break;
        }
        let Some(r) = (rank..rows).find(|&r| a[r * cols + c] != 0) else { continue };
        if r != rank {
            for j in 0..cols {
                a.swap(r * cols + j, rank * cols + j);
            }
        }
        let inv = inverse_mod(a[rank * cols + c], p).unwrap();
        for i in rank + 1..rows {
            let x = a[i * cols + c];
            if x == 0 {
                continue;
            }
            let f = mul_mod(x, inv, p);
            for j in c..cols {
                let y = mul_mod(f, a[rank * cols + j], p);
                a[i * cols + j] = sub_mod(a[i * cols + j], y, p);
            }
        }
        pivots.push(c);
    }
    pivots
}

/// `det(A) mod p` and, when `det(A) ≢ 0`, the solution of `A x = b` mod `p`.
pub fn det_and_solve_mod_p(a: &IntMatrix, b: &[BigInt], p: u64) -> (u64, Option<Vec<u64>>) {
    assert!(a.is_square() && b.len() == a.rows());
    let n = a.rows();
    let w = n + 1;
    let ra = residues(a, p);
    let big = BigInt::from(p);
    let mut m = vec![0u64; n * w];
    for i in 0..n {
        m[i * w..i * w + n].copy_from_slice(&ra[i * n..(i + 1) * n]);
        m[i * w + n] = b[i].mod_floor(&big).to_u64().unwrap();
    }
    let mut det = 1u64;
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| m[r * w + c] != 0) else {
            return (0, None);
        };
        if r != c {
            for j in 0..w {
                m.swap(r * w + j, c * w + j);
            }
            det = p - det;
        }
        let pivot = m[c * w + c];
        det = mul_mod(det, pivot, p);
        let inv = inverse_mod(pivot, p).unwrap();
        for j in c..w {
            m[c * w + j] = mul_mod(m[c * w + j], inv, p);
        }
        let (upper, lower) = m.split_at_mut((c + 1) * w);
        let pivot_row = &upper[c * w..];
        for row in lower.chunks_exact_mut(w) {
            let f = row[c];
            if f == 0 {
                continue;
            }
            for j in c..w {
                row[j] = sub_mod(row[j], mul_mod(f, pivot_row[j], p), p);
            }
        }
    }
    // Back substitution on the unit upper-triangular system.
    let mut x = vec![0u64; n];
    for i in (0..n).rev() {
        let mut acc = m[i * w + n];
        for j in i + 1..n {
            acc = sub_mod(acc, mul_mod(m[i * w + j], x[j], p), p);
        }
        x[i] = acc;
    }
    (det, Some(x))
}

pub fn det_mod_p(a: &IntMatrix, p: u64) -> u64 {
    let zeros = vec![BigInt::zero(); a.rows()];
    det_and_solve_mod_p(a, &zeros, p).0
}

/// Bound on `|det|` of any square submatrix built from rows of `m`:
/// the product of the row norms, each at least 1.
pub fn hadamard_bound(m: &IntMatrix) -> BigUint {
    let prod: BigInt = m
        .row_norms_squared()
        .into_iter()
        .map(|x| if x.is_zero() { BigInt::one() } else { x })
        .product();
    prod.magnitude().sqrt() + BigUint::one()
}

/// Incremental CRT with symmetric representatives.
#[derive(Clone, Debug)]
pub struct Crt {
    value: BigInt,
    modulus: BigInt,
}

impl Default for Crt {
    fn default() -> Self {
        Crt { value: BigInt::zero(), modulus: BigInt::one() }
    }
}

impl Crt {
    pub fn add(&mut self, residue: u64, p: u64) {
        let pb = BigInt::from(p);
        let cur = self.value.mod_floor(&pb).to_u64().unwrap();
        let m_mod_p = self.modulus.mod_floor(&pb).to_u64().unwrap();
        let inv = inverse_mod(m_mod_p, p).expect("moduli must be coprime");
        let t = mul_mod(sub_mod(residue % p, cur, p), inv, p);
        self.value += &self.modulus * BigInt::from(t);
        self.modulus *= pb;
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    /// Representative in `(-M/2, M/2]`.
    pub fn symmetric(&self) -> BigInt {
        let v = self.value.mod_floor(&self.modulus);
        if &v + &v > self.modulus {
            v - &self.modulus
        } else {
            v
        }
    }
}

/// Number of word-sized moduli whose product exceeds `2·bound`.
pub fn moduli_for_bound(bound: &BigUint) -> usize {
    (bound.bits() as usize + 1) / 61 + 1
}

/// Exact determinant from residues modulo enough word-sized primes.
pub fn determinant_multimodular(m: &IntMatrix) -> Result<BigInt, SmithError> {
    if !m.is_square() {
        return Err(SmithError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let count = moduli_for_bound(&hadamard_bound(m));
    let mut crt = Crt::default();
    for p in large_moduli(count) {
        crt.add(det_mod_p(m, p), p);
    }
    let d = crt.symmetric();
    debug_assert!(d.abs().magnitude() <= &hadamard_bound(m));
    Ok(d)
}
