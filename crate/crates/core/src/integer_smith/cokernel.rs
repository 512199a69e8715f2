use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::modular::{
    det_mod_p, hadamard_bound, moduli_for_bound, pivot_columns_mod_p, rank_mod_p, Crt,
};
use super::{smith_mod, smith_normal_form, IntMatrix};
use crate::abelian_groups::InvariantFactors;
use crate::primes::large_moduli;

/// `Z^rows / M·Z^cols` as torsion plus free rank.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cokernel {
    pub torsion: InvariantFactors,
    pub free_rank: usize,
}

impl Cokernel {
    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_trivial()
    }
}

// Below this many entries plain integral elimination is cheapest.
const SMALL_ENTRIES: usize = 100;
// Extra maximal minors folded into the gcd before reducing modulo it.
const EXTRA_MINORS: usize = 2;

/// Exact cokernel.
///
/// Full-row-rank inputs are reduced modulo a multiple `g` of the torsion
/// order (a gcd of nonzero maximal minors, found by multimodular
/// determinants); `coker(M) ≅ coker(M ⊗ Z/g)` then holds exactly and keeps
/// entries bounded. Everything else goes through integral elimination.
pub fn cokernel(m: &IntMatrix) -> Cokernel {
    let rows = m.rows();
    if rows == 0 {
        return Cokernel::default();
    }
    if rows * m.cols() > SMALL_ENTRIES && rows <= m.cols() {
        let probe = large_moduli(1)[0];
        if rank_mod_p(m, probe) == rows {
            let g = maximal_minor_gcd(m, probe);
            return cokernel_mod_multiple(m, &g);
        }
    }
    cokernel_integral(m)
}

/// Cokernel by plain integral Smith normal form.
pub fn cokernel_integral(m: &IntMatrix) -> Cokernel {
    let snf = smith_normal_form(m, false);
    let torsion = InvariantFactors::from_orders(
        snf.nonzero_diagonal().iter().map(|d| d.magnitude().clone()),
    )
    .expect("nonzero diagonal");
    Cokernel { torsion, free_rank: m.rows() - snf.rank }
}

/// Cokernel of a full-row-rank `m`, given a positive multiple of its torsion
/// order (equivalently of its exponent).
pub fn cokernel_mod_multiple(m: &IntMatrix, multiple: &BigUint) -> Cokernel {
    debug_assert!(!multiple.is_zero());
    if multiple.is_one() {
        return Cokernel::default();
    }
    let diag = smith_mod(m, &BigInt::from(multiple.clone()));
    let torsion = InvariantFactors::from_orders(diag.into_iter().map(|d| d.magnitude().clone()))
        .expect("positive gcds");
    Cokernel { torsion, free_rank: 0 }
}

/// Gcd of a few nonzero maximal minors of a full-row-rank matrix; the
/// pivot columns modulo `probe` give the first one.
fn maximal_minor_gcd(m: &IntMatrix, probe: u64) -> BigUint {
    let rows: Vec<usize> = (0..m.rows()).collect();
    let pivots = pivot_columns_mod_p(m, probe);
    debug_assert_eq!(pivots.len(), m.rows());
    let mut g = minor(m, &rows, &pivots).magnitude().clone();
    let others: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    let mut tried = 0;
    'outer: for &extra in &others {
        for k in (0..pivots.len()).rev() {
            if g.is_one() || tried >= EXTRA_MINORS {
                break 'outer;
            }
            let mut cols = pivots.clone();
            cols[k] = extra;
            cols.sort_unstable();
            let d = minor(m, &rows, &cols);
            if !d.is_zero() {
                g = g.gcd(d.magnitude());
                tried += 1;
                break;
            }
        }
    }
    g
}

fn minor(m: &IntMatrix, rows: &[usize], cols: &[usize]) -> BigInt {
    let sub = m.select(rows, cols);
    let count = moduli_for_bound(&hadamard_bound(&sub));
    let mut crt = Crt::default();
    for p in large_moduli(count) {
        crt.add(det_mod_p(&sub, p), p);
    }
    crt.symmetric()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    fn inv(orders: &[u64]) -> InvariantFactors {
        InvariantFactors::from_orders(orders.iter().map(|&d| BigUint::from(d))).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(cokernel(&IntMatrix::zeros(2, 2)), Cokernel { torsion: inv(&[]), free_rank: 2 });
        assert_eq!(cokernel(&mat(&[vec![2, 0], vec![0, 3]])), Cokernel { torsion: inv(&[6]), free_rank: 0 });
        assert_eq!(cokernel(&mat(&[vec![1, -1], vec![-1, 1]])), Cokernel { torsion: inv(&[]), free_rank: 1 });
        assert_eq!(cokernel(&IntMatrix::zeros(0, 4)), Cokernel::default());
        assert_eq!(cokernel(&IntMatrix::zeros(3, 0)).free_rank, 3);
    }

    #[test]
    fn modular_route_matches_integral_on_wide_matrix() {
        // 10x12, structured so the torsion is nontrivial.
        let m = IntMatrix::from_fn(10, 12, |i, j| {
            let x = ((i * 7 + j * 13 + i * j * 3) % 11) as i64 - 5;
            BigInt::from(if i == j { 6 * x + 12 } else { 6 * x })
        });
        assert!(m.rows() * m.cols() > SMALL_ENTRIES);
        let fast = cokernel(&m);
        assert_eq!(fast, cokernel_integral(&m));
        assert!(!fast.torsion.is_trivial());
    }
}
