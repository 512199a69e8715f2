//! Directed multigraphs, ε-balanced edge models, and their laplacians.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::integer_smith::IntMatrix;
use crate::primes::primes_up_to;

/// Slack for floating comparisons on probability masses.
const MASS_TOLERANCE: f64 = 1e-12;
/// Largest vertex count accepted by the arborescence enumeration.
pub const MAX_BRUTE_FORCE_VERTICES: usize = 7;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DigraphError {
    #[error("multiplicity matrix must be {n}x{n}")]
    Shape { n: usize },
    #[error("digraph needs at least one vertex")]
    Empty,
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge model has empty support")]
    EmptySupport,
    #[error("edge model probabilities must be positive and sum to 1 (sum = {0})")]
    BadMass(f64),
    #[error("declared epsilon {0} must lie in (0, 1)")]
    BadEpsilon(f64),
    #[error("edge model is not {0}-balanced")]
    NotBalanced(f64),
    #[error("{n} vertices exceeds the brute-force range")]
    OverBruteForceRange { n: usize },
}

/// Directed multigraph on vertices `0..n`; `mult[i][j]` edges run `i → j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDigraph", into = "RawDigraph")]
pub struct Digraph {
    n: usize,
    mult: Vec<Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
struct RawDigraph {
    n: usize,
    mult: Vec<Vec<u64>>,
}

impl TryFrom<RawDigraph> for Digraph {
    type Error = DigraphError;

    fn try_from(raw: RawDigraph) -> Result<Self, Self::Error> {
        let g = Digraph::from_multiplicities(raw.mult)?;
        if g.n != raw.n {
            return Err(DigraphError::Shape { n: raw.n });
        }
        Ok(g)
    }
}

impl From<Digraph> for RawDigraph {
    fn from(g: Digraph) -> Self {
        RawDigraph { n: g.n, mult: g.mult }
    }
}

impl Digraph {
    pub fn from_multiplicities(mult: Vec<Vec<u64>>) -> Result<Self, DigraphError> {
        let n = mult.len();
        if n == 0 {
            return Err(DigraphError::Empty);
        }
        if mult.iter().any(|r| r.len() != n) {
            return Err(DigraphError::Shape { n });
        }
        Ok(Digraph { n, mult })
    }

    /// Graph with one edge per listed pair.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, DigraphError> {
        if n == 0 {
            return Err(DigraphError::Empty);
        }
        let mut mult = vec![vec![0; n]; n];
        for &(i, j) in edges {
            for v in [i, j] {
                if v >= n {
                    return Err(DigraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            mult[i][j] += 1;
        }
        Ok(Digraph { n, mult })
    }

    /// Every ordered pair of distinct vertices joined once in each direction.
    pub fn complete_bidirected(n: usize) -> Self {
        let mult = (0..n).map(|i| (0..n).map(|j| u64::from(i != j)).collect()).collect();
        Digraph { n, mult }
    }

    /// The cycle `0 → 1 → … → n-1 → 0`.
    pub fn directed_cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Digraph::from_edges(n, &edges).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn multiplicity(&self, i: usize, j: usize) -> u64 {
        self.mult[i][j]
    }

    pub fn multiplicities(&self) -> &[Vec<u64>] {
        &self.mult
    }

    pub fn set_multiplicity(&mut self, i: usize, j: usize, m: u64) {
        self.mult[i][j] = m;
    }

    /// Edges leaving `i`, loops excluded.
    pub fn outdeg(&self, i: usize) -> u64 {
        (0..self.n).filter(|&j| j != i).map(|j| self.mult[i][j]).sum()
    }

    /// Edges entering `i`, loops excluded.
    pub fn indeg(&self, i: usize) -> u64 {
        (0..self.n).filter(|&j| j != i).map(|j| self.mult[j][i]).sum()
    }

    pub fn is_balanced(&self) -> bool {
        (0..self.n).all(|v| self.indeg(v) == self.outdeg(v))
    }

    fn check_vertex(&self, v: usize) -> Result<(), DigraphError> {
        if v >= self.n {
            Err(DigraphError::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Laplacian with column `j` the firing vector of vertex `j`:
    /// `L[j][j] = outdeg(j)` and `L[i][j] = -deg(j, i)`. Columns sum to zero
    /// and loops do not appear.
    pub fn laplacian(&self) -> IntMatrix {
        IntMatrix::from_fn(self.n, self.n, |i, j| {
            if i == j {
                BigInt::from(self.outdeg(j))
            } else {
                -BigInt::from(self.mult[j][i])
            }
        })
    }

    /// Laplacian with row and column `v` removed.
    pub fn reduced_laplacian(&self, v: usize) -> Result<IntMatrix, DigraphError> {
        self.check_vertex(v)?;
        Ok(self.laplacian().without_row_col(v, v))
    }

    /// Laplacian with row `drop_row` removed: `L` written in the basis
    /// `{e_j - e_drop}` of the sum-zero lattice.
    pub fn restricted_laplacian(&self, drop_row: usize) -> Result<IntMatrix, DigraphError> {
        self.check_vertex(drop_row)?;
        Ok(self.laplacian().without_row(drop_row))
    }

    fn reaches_all(&self, forward: bool) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for w in 0..self.n {
                let m = if forward { self.mult[u][w] } else { self.mult[w][u] };
                if m > 0 && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.reaches_all(true) && self.reaches_all(false)
    }

    /// Weighted count of spanning trees oriented toward `root`, by
    /// enumerating every choice of one outgoing edge per non-root vertex.
    pub fn spanning_trees_toward(&self, root: usize) -> Result<u64, DigraphError> {
        self.check_vertex(root)?;
        if self.n > MAX_BRUTE_FORCE_VERTICES {
            return Err(DigraphError::OverBruteForceRange { n: self.n });
        }
        let others: Vec<usize> = (0..self.n).filter(|&v| v != root).collect();
        let mut parent = vec![usize::MAX; self.n];
        Ok(self.count_parent_maps(root, &others, 0, &mut parent))
    }

    fn count_parent_maps(&self, root: usize, others: &[usize], k: usize, parent: &mut [usize]) -> u64 {
        if k == others.len() {
            return u64::from(self.all_reach(root, parent));
        }
        let v = others[k];
        let mut total = 0;
        for w in 0..self.n {
            if w == v || self.mult[v][w] == 0 {
                continue;
            }
            parent[v] = w;
            total += self.mult[v][w] * self.count_parent_maps(root, others, k + 1, parent);
        }
        parent[v] = usize::MAX;
        total
    }

    fn all_reach(&self, root: usize, parent: &[usize]) -> bool {
        (0..self.n).all(|start| {
            let mut v = start;
            for _ in 0..self.n {
                if v == root {
                    return true;
                }
                v = parent[v];
            }
            v == root
        })
    }
}

/// Distribution of a single edge multiplicity, with finite support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeModel {
    pmf: BTreeMap<u64, f64>,
    epsilon: f64,
}

impl EdgeModel {
    /// Validates mass and ε-balance at the declared `epsilon`.
    pub fn new(pmf: BTreeMap<u64, f64>, epsilon: f64) -> Result<Self, DigraphError> {
        let model = EdgeModel::new_unchecked(pmf, epsilon);
        model.validate()?;
        Ok(model)
    }

    /// Skips every check. Deterministic test models (point masses) need it.
    pub fn new_unchecked(pmf: BTreeMap<u64, f64>, epsilon: f64) -> Self {
        EdgeModel { pmf, epsilon }
    }

    pub fn validate(&self) -> Result<(), DigraphError> {
        if self.pmf.is_empty() {
            return Err(DigraphError::EmptySupport);
        }
        let total: f64 = self.pmf.values().sum();
        if self.pmf.values().any(|&w| !(w > 0.0)) || (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(DigraphError::BadMass(total));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(DigraphError::BadEpsilon(self.epsilon));
        }
        if !check_epsilon_balanced(self, self.epsilon)? {
            return Err(DigraphError::NotBalanced(self.epsilon));
        }
        Ok(())
    }

    /// Erdős–Rényi edges: one edge with probability `q`.
    pub fn bernoulli(q: f64) -> Result<Self, DigraphError> {
        if !(q > 0.0 && q < 1.0) {
            return Err(DigraphError::BadMass(q));
        }
        Self::new(BTreeMap::from([(0, 1.0 - q), (1, q)]), q.min(1.0 - q))
    }

    /// Uniform multiplicity on `0..=k`.
    pub fn uniform(k: u64) -> Result<Self, DigraphError> {
        if k == 0 {
            return Err(DigraphError::NotBalanced(0.0));
        }
        let w = 1.0 / (k + 1) as f64;
        let pmf: BTreeMap<u64, f64> = (0..=k).map(|v| (v, w)).collect();
        // Worst residue class is the evens mod 2.
        let worst = pmf.keys().filter(|v| *v % 2 == 0).count() as f64 * w;
        Self::new(pmf, 1.0 - worst)
    }

    pub fn pmf(&self) -> &BTreeMap<u64, f64> {
        &self.pmf
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn mean(&self) -> f64 {
        self.pmf.iter().map(|(&v, &w)| v as f64 * w).sum()
    }

    pub fn sampler(&self) -> EdgeSampler {
        let values: Vec<u64> = self.pmf.keys().copied().collect();
        let weights = WeightedIndex::new(self.pmf.values().copied()).expect("positive weights");
        EdgeSampler { values, weights }
    }

    /// Samples a digraph; off-diagonal multiplicities are drawn in row-major
    /// order, the diagonal is zero.
    pub fn sample_digraph<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Digraph {
        self.sampler().sample_digraph(n, rng)
    }
}

/// Prepared sampler for one [`EdgeModel`].
#[derive(Clone, Debug)]
pub struct EdgeSampler {
    values: Vec<u64>,
    weights: WeightedIndex<f64>,
}

impl EdgeSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.values[self.weights.sample(rng)]
    }

    pub fn sample_digraph<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Digraph {
        assert!(n >= 1);
        let mut mult = vec![vec![0; n]; n];
        for (i, row) in mult.iter_mut().enumerate() {
            for (j, m) in row.iter_mut().enumerate() {
                if i != j {
                    *m = self.sample(rng);
                }
            }
        }
        Digraph { n, mult }
    }
}

/// Whether no residue class modulo any prime carries more than `1 - ε` of
/// the mass.
///
/// Only primes up to the support's span can put two support points in one
/// class; for larger primes the classes are singletons, so bounding the
/// largest point mass settles them.
pub fn check_epsilon_balanced(model: &EdgeModel, epsilon: f64) -> Result<bool, DigraphError> {
    let (Some((&lo, _)), Some((&hi, _))) = (model.pmf.first_key_value(), model.pmf.last_key_value())
    else {
        return Err(DigraphError::EmptySupport);
    };
    let cap = 1.0 - epsilon + MASS_TOLERANCE;
    if model.pmf.values().any(|&w| w > cap) {
        return Ok(false);
    }
    for p in primes_up_to(hi - lo) {
        let mut classes: BTreeMap<u64, f64> = BTreeMap::new();
        for (&v, &w) in &model.pmf {
            *classes.entry(v % p).or_default() += w;
        }
        if classes.values().any(|&w| w > cap) {
            return Ok(false);
        }
    }
    Ok(true)
}
