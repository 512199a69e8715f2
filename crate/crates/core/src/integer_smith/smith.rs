use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{IntMatrix, SmithError};

/// Result of diagonalizing an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    /// `min(rows, cols)` entries; nonzero ones form a divisibility chain and
    /// come first.
    pub diagonal: Vec<BigInt>,
    pub rank: usize,
    /// `(U, V)` with `U · M · V = D`, when requested.
    pub transforms: Option<(IntMatrix, IntMatrix)>,
}

/// JSON form of an SNF report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmithReport {
    pub diagonal: Vec<String>,
    pub free_rank: usize,
}

impl SmithDecomposition {
    pub fn nonzero_diagonal(&self) -> &[BigInt] {
        &self.diagonal[..self.rank]
    }

    /// Report for a matrix with `rows` rows.
    pub fn report(&self, rows: usize) -> SmithReport {
        SmithReport {
            diagonal: self.diagonal.iter().map(|d| d.to_str_radix(10)).collect(),
            free_rank: rows - self.rank,
        }
    }
}

struct Eliminator {
    a: IntMatrix,
    u: Option<IntMatrix>,
    v: Option<IntMatrix>,
    modulus: Option<BigInt>,
}

impl Eliminator {
    fn reduce(&self, x: &mut BigInt) {
        if let Some(m) = &self.modulus {
            let mut r = x.mod_floor(m);
            if &r + &r > *m {
                r -= m;
            }
            *x = r;
        }
    }

    fn reduce_row(&mut self, i: usize) {
        if self.modulus.is_some() {
            for j in 0..self.a.cols() {
                let mut x = std::mem::take(&mut self.a[(i, j)]);
                self.reduce(&mut x);
                self.a[(i, j)] = x;
            }
        }
    }

    fn reduce_col(&mut self, j: usize) {
        if self.modulus.is_some() {
            for i in 0..self.a.rows() {
                let mut x = std::mem::take(&mut self.a[(i, j)]);
                self.reduce(&mut x);
                self.a[(i, j)] = x;
            }
        }
    }

    fn swap_rows(&mut self, x: usize, y: usize) {
        self.a.swap_rows(x, y);
        if let Some(u) = &mut self.u {
            u.swap_rows(x, y);
        }
    }

    fn swap_cols(&mut self, x: usize, y: usize) {
        self.a.swap_cols(x, y);
        if let Some(v) = &mut self.v {
            v.swap_cols(x, y);
        }
    }

    fn sub_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        self.a.sub_row_multiple(dst, src, q);
        self.reduce_row(dst);
        if let Some(u) = &mut self.u {
            u.sub_row_multiple(dst, src, q);
        }
    }

    fn sub_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        self.a.sub_col_multiple(dst, src, q);
        self.reduce_col(dst);
        if let Some(v) = &mut self.v {
            v.sub_col_multiple(dst, src, q);
        }
    }

    /// Nonzero entry of least absolute value in the trailing block; ties go to
    /// the lowest row, then the lowest column.
    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = &self.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some(b) => x.magnitude() < self.a[b].magnitude(),
                };
                if better {
                    if x.magnitude().is_one() {
                        return Some((i, j));
                    }
                    best = Some((i, j));
                }
            }
        }
        best
    }

    /// Nearest-integer quotient, keeping remainders small.
    fn quotient(x: &BigInt, pivot: &BigInt) -> BigInt {
        let (q, r) = x.div_mod_floor(pivot);
        // r shares the sign of pivot, so r - pivot is the other candidate.
        if (&r + &r).magnitude() > pivot.magnitude() {
            q + 1
        } else {
            q
        }
    }

    fn run(&mut self) -> Vec<BigInt> {
        let (rows, cols) = (self.a.rows(), self.a.cols());
        let steps = rows.min(cols);
        let mut diagonal = vec![BigInt::zero(); steps];
        for t in 0..steps {
            let Some((pi, pj)) = self.find_pivot(t) else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let pivot = self.a[(t, t)].clone();
                let mut dirty = false;
                for i in t + 1..rows {
                    if !self.a[(i, t)].is_zero() {
                        let q = Self::quotient(&self.a[(i, t)], &pivot);
                        self.sub_row(i, t, &q);
                        dirty |= !self.a[(i, t)].is_zero();
                    }
                }
                for j in t + 1..cols {
                    if !self.a[(t, j)].is_zero() {
                        let q = Self::quotient(&self.a[(t, j)], &pivot);
                        self.sub_col(j, t, &q);
                        dirty |= !self.a[(t, j)].is_zero();
                    }
                }
                if dirty {
                    // A smaller remainder sits in row t or column t.
                    let (mut bi, mut bj) = (t, t);
                    for i in t + 1..rows {
                        let x = &self.a[(i, t)];
                        if !x.is_zero() && x.magnitude() < self.a[(bi, bj)].magnitude() {
                            (bi, bj) = (i, t);
                        }
                    }
                    for j in t + 1..cols {
                        let x = &self.a[(t, j)];
                        if !x.is_zero() && x.magnitude() < self.a[(bi, bj)].magnitude() {
                            (bi, bj) = (t, j);
                        }
                    }
                    self.swap_rows(t, bi);
                    self.swap_cols(t, bj);
                    continue;
                }
                // Row and column cleared; enforce divisibility of the block.
                let offender = (t + 1..rows).find(|&i| {
                    (t + 1..cols).any(|j| !self.a[(i, j)].is_multiple_of(&pivot))
                });
                match offender {
                    Some(i) => {
                        let minus_one = -BigInt::one();
                        self.sub_row(t, i, &minus_one);
                    }
                    None => break,
                }
            }
            if self.a[(t, t)].is_negative() {
                self.a.negate_row(t);
                if let Some(u) = &mut self.u {
                    u.negate_row(t);
                }
            }
            diagonal[t] = self.a[(t, t)].clone();
        }
        diagonal
    }
}

/// Smith normal form by gcd-pivot elimination over the integers.
pub fn smith_normal_form(m: &IntMatrix, want_transforms: bool) -> SmithDecomposition {
    let mut e = Eliminator {
        a: m.clone(),
        u: want_transforms.then(|| IntMatrix::identity(m.rows())),
        v: want_transforms.then(|| IntMatrix::identity(m.cols())),
        modulus: None,
    };
    let diagonal = e.run();
    let rank = diagonal.iter().take_while(|d| !d.is_zero()).count();
    SmithDecomposition { diagonal, rank, transforms: e.u.zip(e.v) }
}

/// Diagonal of `M` over `Z/modulus`: returns `gcd(d_i, modulus)` for each
/// row, with rows lacking a pivot contributing `modulus`. The cokernel of
/// `M ⊗ Z/modulus` is the direct sum of the corresponding cyclic groups.
pub fn smith_mod(m: &IntMatrix, modulus: &BigInt) -> Vec<BigInt> {
    assert!(modulus.is_positive());
    let mut e = Eliminator { a: m.clone(), u: None, v: None, modulus: Some(modulus.clone()) };
    for i in 0..m.rows() {
        e.reduce_row(i);
    }
    let diagonal = e.run();
    let mut out: Vec<BigInt> = diagonal.iter().map(|d| d.gcd(modulus)).collect();
    out.resize(m.rows(), modulus.clone());
    out
}

/// Exact determinant by Bareiss fraction-free elimination.
pub fn determinant(m: &IntMatrix) -> Result<BigInt, SmithError> {
    if !m.is_square() {
        return Err(SmithError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[(k, k)].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[(r, k)].is_zero()) else {
                return Ok(BigInt::zero());
            };
            a.swap_rows(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let x = &a[(k, k)] * &a[(i, j)] - &a[(i, k)] * &a[(k, j)];
                a[(i, j)] = x / &prev;
            }
        }
        prev = a[(k, k)].clone();
    }
    Ok(if n == 0 { BigInt::one() } else { sign * prev })
}
