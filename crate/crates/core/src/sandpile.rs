//! Total and vertex sandpile groups of a digraph and the structural checks
//! relating them.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::abelian_groups::{AbelianGroup, InvariantFactors};
use crate::integer_smith::modular::{det_and_solve_mod_p, det_mod_p, hadamard_bound, moduli_for_bound, Crt};
use crate::integer_smith::{
    cokernel, cokernel_integral, cokernel_mod, cokernel_mod_multiple, Cokernel, IntMatrix,
};
use crate::primes::large_moduli;
use crate::random_digraph::{Digraph, DigraphError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SandpileError {
    #[error(transparent)]
    Digraph(#[from] DigraphError),
    #[error("sandpile groups need at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("digraph is not strongly connected")]
    NotStronglyConnected,
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

/// A cokernel that may have a free part.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SandpileGroup {
    Finite(InvariantFactors),
    Infinite { free_rank: usize, torsion: InvariantFactors },
}

impl From<Cokernel> for SandpileGroup {
    fn from(c: Cokernel) -> Self {
        if c.free_rank == 0 {
            SandpileGroup::Finite(c.torsion)
        } else {
            SandpileGroup::Infinite { free_rank: c.free_rank, torsion: c.torsion }
        }
    }
}

impl SandpileGroup {
    pub fn finite(&self) -> Option<&InvariantFactors> {
        match self {
            SandpileGroup::Finite(g) => Some(g),
            SandpileGroup::Infinite { .. } => None,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.finite().is_some_and(InvariantFactors::is_trivial)
    }

    pub fn is_cyclic(&self) -> bool {
        self.finite().is_some_and(InvariantFactors::is_cyclic)
    }

    /// Order, or `None` for an infinite group.
    pub fn order(&self) -> Option<BigUint> {
        self.finite().map(InvariantFactors::order)
    }

    /// `G ⊗ Z/a`; a free part contributes one `Z/a` per rank.
    pub fn tensor_mod(&self, a: u64) -> AbelianGroup {
        match self {
            SandpileGroup::Finite(g) => g.tensor_mod(a).expect("a > 0"),
            SandpileGroup::Infinite { free_rank, torsion } => {
                let free = AbelianGroup::from_cyclic_orders(&vec![a; *free_rank]).expect("a > 0");
                torsion.tensor_mod(a).expect("a > 0").direct_sum(&free)
            }
        }
    }
}

#[derive(Serialize)]
struct GroupJson<'a> {
    infinite: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    free_rank: Option<usize>,
    invariant_factors: &'a InvariantFactors,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    group: Option<AbelianGroup>,
}

impl Serialize for SandpileGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let json = match self {
            SandpileGroup::Finite(g) => GroupJson {
                infinite: false,
                free_rank: None,
                invariant_factors: g,
                group: g.to_group().ok(),
            },
            SandpileGroup::Infinite { free_rank, torsion } => GroupJson {
                infinite: true,
                free_rank: Some(*free_rank),
                invariant_factors: torsion,
                group: None,
            },
        };
        json.serialize(s)
    }
}

fn check_size(g: &Digraph) -> Result<(), SandpileError> {
    if g.n() < 2 {
        Err(SandpileError::TooFewVertices(g.n()))
    } else {
        Ok(())
    }
}

/// `det(L_v)` for every vertex `v`, exactly.
///
/// When `L` has rank `n-1` its adjugate is `κ·1ᵀ` with `κ_v = det(L_v)`, and
/// `κ` spans the kernel of `L`. So one solve `L_r x = -L[·, r]` per modulus,
/// scaled by `det(L_r)`, yields every minor at the cost of a single
/// determinant. Returns `None` when no root with `det(L_r) ≠ 0` modulo the
/// probe prime is found; callers fall back to integral elimination.
pub fn vertex_determinants(g: &Digraph) -> Option<Vec<BigInt>> {
    let n = g.n();
    let l = g.laplacian();
    let probe = large_moduli(1)[0];
    let root = (0..n).rev().find(|&r| det_mod_p(&l.without_row_col(r, r), probe) != 0)?;
    let reduced = l.without_row_col(root, root);
    let column: Vec<BigInt> = (0..n).filter(|&i| i != root).map(|i| l[(i, root)].clone()).collect();
    let needed = moduli_for_bound(&hadamard_bound(&l));
    let mut crts = vec![Crt::default(); n];
    let mut used = 0;
    for p in large_moduli(needed + 16) {
        let (det, Some(x)) = det_and_solve_mod_p(&reduced, &column, p) else { continue };
        crts[root].add(det, p);
        let others = (0..n).filter(|&i| i != root);
        for (i, xi) in others.zip(x) {
            let kappa = ((det as u128 * xi as u128) % p as u128) as u64;
            crts[i].add((p - kappa) % p, p);
        }
        used += 1;
        if used == needed {
            return Some(crts.iter().map(Crt::symmetric).collect());
        }
    }
    None
}

/// Total sandpile group `Z_0^n / L·Z^n`.
///
/// Its order is `gcd_v |det(L_v)|`, so reducing the restricted laplacian
/// modulo that gcd gives the group exactly with word-sized work for the
/// minors.
pub fn total_sandpile(g: &Digraph) -> Result<SandpileGroup, SandpileError> {
    check_size(g)?;
    if let Some(kappa) = vertex_determinants(g) {
        let order = kappa.iter().fold(BigInt::zero(), |acc, k| acc.gcd(k));
        if !order.is_zero() {
            let restricted = g.restricted_laplacian(g.n() - 1)?;
            // S ⊗ Z/|S| = S, and a word-sized modulus allows u64 elimination.
            if let Some(small) = order.magnitude().to_u64().filter(|&a| a < 1 << 62) {
                let group = cokernel_mod(&restricted, small).expect("positive modulus below 2^63");
                return Ok(SandpileGroup::Finite(group.invariant_factors()));
            }
            return Ok(cokernel_mod_multiple(&restricted, order.magnitude()).into());
        }
    }
    total_sandpile_via_row(g, g.n() - 1)
}

/// Total sandpile group from the restricted laplacian with `drop_row`
/// removed, by generic cokernel computation.
pub fn total_sandpile_via_row(g: &Digraph, drop_row: usize) -> Result<SandpileGroup, SandpileError> {
    check_size(g)?;
    Ok(cokernel(&g.restricted_laplacian(drop_row)?).into())
}

/// Sandpile group at vertex `v`: the cokernel of the reduced laplacian.
pub fn vertex_sandpile(g: &Digraph, v: usize) -> Result<SandpileGroup, SandpileError> {
    check_size(g)?;
    Ok(cokernel(&g.reduced_laplacian(v)?).into())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SandpileProfile {
    pub total: SandpileGroup,
    pub vertex_groups: Vec<SandpileGroup>,
    pub strongly_connected: bool,
    pub eulerian: bool,
    pub coeulerian: bool,
}

/// Every sandpile group of `g` plus its classification flags.
///
/// On strongly connected input the gcd identity and the surjections
/// `S_v ↠ S` are verified before returning; a violation is a bug, reported
/// as [`SandpileError::Consistency`].
pub fn profile(g: &Digraph) -> Result<SandpileProfile, SandpileError> {
    check_size(g)?;
    let total = total_sandpile(g)?;
    let vertex_groups = (0..g.n()).map(|v| vertex_sandpile(g, v)).collect::<Result<Vec<_>, _>>()?;
    let strongly_connected = g.is_strongly_connected();
    if strongly_connected {
        verify_vertex_structure(&total, &vertex_groups)?;
    }
    Ok(SandpileProfile {
        coeulerian: total.is_trivial(),
        total,
        vertex_groups,
        strongly_connected,
        eulerian: g.is_balanced(),
    })
}

fn verify_vertex_structure(total: &SandpileGroup, vertex: &[SandpileGroup]) -> Result<(), SandpileError> {
    let fail = |msg: String| Err(SandpileError::Consistency(msg));
    let Some(s) = total.finite() else {
        return fail("strongly connected digraph with infinite total group".into());
    };
    let mut gcd = BigUint::zero();
    for (v, sv) in vertex.iter().enumerate() {
        let Some(sv) = sv.finite() else {
            return fail(format!("S_{v} infinite on a strongly connected digraph"));
        };
        if !sv.surjects_onto(s) {
            return fail(format!("no surjection S_{v} = {sv} onto S = {s}"));
        }
        gcd = gcd.gcd(&sv.order());
    }
    if gcd != s.order() {
        return fail(format!("|S| = {} but gcd |S_v| = {gcd}", s.order()));
    }
    Ok(())
}

fn require_strongly_connected(g: &Digraph) -> Result<(), SandpileError> {
    check_size(g)?;
    if g.is_strongly_connected() {
        Ok(())
    } else {
        Err(SandpileError::NotStronglyConnected)
    }
}

/// Evaluates the three eulerian characterizations and reports whether they
/// agree:
/// (a) `ker L` over `Q` is spanned by the all-ones vector (so the integral
///     kernel is `Z·1`, the vector being primitive),
/// (b) `indeg = outdeg` everywhere,
/// (c) `S ≅ S_v` for every vertex.
pub fn check_eulerian_equivalences(g: &Digraph) -> Result<bool, SandpileError> {
    require_strongly_connected(g)?;
    let l = g.laplacian();
    let ones_in_kernel = (0..g.n()).all(|i| (0..g.n()).map(|j| &l[(i, j)]).sum::<BigInt>().is_zero());
    let corank_one = cokernel_integral(&l).free_rank == 1;
    let kernel_is_ones = ones_in_kernel && corank_one;
    let balanced = g.is_balanced();
    let total = total_sandpile(g)?;
    let mut all_isomorphic = true;
    for v in 0..g.n() {
        all_isomorphic &= vertex_sandpile(g, v)? == total;
    }
    Ok(kernel_is_ones == balanced && balanced == all_isomorphic)
}

/// Checks that `S` trivial agrees with `Im L = Z_0^n` (restricted laplacian
/// with all-one Smith diagonal), and that a trivial `S` forces every `S_v`
/// to be cyclic.
pub fn check_coeulerian_equivalences(g: &Digraph) -> Result<bool, SandpileError> {
    require_strongly_connected(g)?;
    let trivial = total_sandpile(g)?.is_trivial();
    let restricted: IntMatrix = g.restricted_laplacian(g.n() - 1)?;
    let image_is_full = cokernel_integral(&restricted).is_trivial();
    let mut cyclic_vertices = true;
    if trivial {
        for v in 0..g.n() {
            cyclic_vertices &= vertex_sandpile(g, v)?.is_cyclic();
        }
    }
    Ok(trivial == image_is_full && cyclic_vertices)
}

/// `|S_v|` as a signed determinant magnitude, for tests comparing with
/// arborescence counts.
pub fn vertex_group_order(g: &Digraph, v: usize) -> Result<BigUint, SandpileError> {
    let det = crate::integer_smith::determinant(&g.reduced_laplacian(v)?).expect("square");
    Ok(det.abs().magnitude().clone())
}
