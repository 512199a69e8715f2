//! Brute-force references for small instances.
//!
//! Everything here enumerates: group elements, generator images, subgroups,
//! minors, arborescences. The fast code elsewhere in the crate is checked
//! against these, both by the test suite and by the `verify` subcommand.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::abelian_groups::{
    aut_order, cyclic_quotient_witness, hom_count, sur_count, surjection_exists, AbelianGroup, Partition,
};
use crate::integer_smith::{determinant, smith_normal_form, IntMatrix};
use crate::primes::factorize_u64;
use crate::random_digraph::{Digraph, EdgeModel};
use crate::sandpile::{total_sandpile, total_sandpile_via_row, vertex_group_order, vertex_sandpile};

/// Largest group handled; subgroups are stored as 64-bit masks.
pub const MAX_ORDER: usize = 64;

/// A finite abelian group `⊕ Z/a_i` with elements as mixed-radix indices.
#[derive(Clone, Debug)]
pub struct ElementGroup {
    orders: Vec<u64>,
    size: usize,
}

impl ElementGroup {
    pub fn new(g: &AbelianGroup) -> Self {
        let orders: Vec<u64> = g
            .invariant_factors()
            .descending()
            .iter()
            .map(|d| d.to_u64().expect("small group"))
            .collect();
        let size = orders.iter().product::<u64>() as usize;
        assert!(size <= MAX_ORDER, "group of order {size} is too large to enumerate");
        ElementGroup { orders, size }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Cyclic orders of the standard generators.
    pub fn generator_orders(&self) -> &[u64] {
        &self.orders
    }

    fn digits(&self, mut x: usize) -> Vec<u64> {
        self.orders
            .iter()
            .map(|&a| {
                let d = x as u64 % a;
                x /= a as usize;
                d
            })
            .collect()
    }

    fn index(&self, digits: &[u64]) -> usize {
        let mut x = 0usize;
        for (d, &a) in digits.iter().zip(&self.orders).rev() {
            x = x * a as usize + (*d % a) as usize;
        }
        x
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        let s: Vec<u64> = self.digits(x).iter().zip(self.digits(y)).map(|(a, b)| a + b).collect();
        self.index(&s)
    }

    pub fn scale(&self, k: u64, x: usize) -> usize {
        let s: Vec<u64> = self.digits(x).iter().zip(&self.orders).map(|(d, &a)| (d * (k % a)) % a).collect();
        self.index(&s)
    }

    /// Smallest subgroup containing `mask` and `x`.
    pub fn extend(&self, mask: u64, x: usize) -> u64 {
        // Adds cosets S + kx until kx lands in one already present.
        let mut out = mask;
        let subgroup = members(mask);
        let mut multiple = x;
        while out & (1 << multiple) == 0 {
            for &s in &subgroup {
                out |= 1 << self.add(s, multiple);
            }
            multiple = self.add(multiple, x);
        }
        out
    }

    pub fn full_mask(&self) -> u64 {
        if self.size == 64 {
            u64::MAX
        } else {
            (1u64 << self.size) - 1
        }
    }

    /// Every subgroup, as masks.
    pub fn subgroups(&self) -> BTreeSet<u64> {
        let mut seen = BTreeSet::from([1u64]);
        let mut stack = vec![1u64];
        while let Some(s) = stack.pop() {
            for x in 0..self.size {
                let t = self.extend(s, x);
                if seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Isomorphism type of `G / C`, read off from `|(G/C)[p^k]|` for each
    /// prime: these sizes are `p^{λ'_1 + … + λ'_k}` with `λ'` the conjugate
    /// of the quotient's type.
    pub fn quotient_type(&self, c: u64) -> AbelianGroup {
        let index = self.size / members(c).len();
        let mut sylow = BTreeMap::new();
        for (p, e) in factorize_u64(index as u64) {
            let mut conj = Vec::new();
            let mut prev = 1usize;
            let mut k = 1;
            while prev < p.pow(e) as usize {
                let pk = p.pow(k);
                let killed = (0..self.size).filter(|&x| c & (1 << self.scale(pk, x)) != 0).count();
                let cosets = killed / members(c).len();
                let cosets_p = p_part(cosets, p);
                conj.push(log_p(cosets_p / prev, p));
                prev = cosets_p;
                k += 1;
            }
            sylow.insert(p, Partition::new(conj).conjugate());
        }
        AbelianGroup::from_sylow(sylow).expect("primes from factorization")
    }
}

fn p_part(mut n: usize, p: u64) -> usize {
    let mut out = 1;
    while n % p as usize == 0 {
        n /= p as usize;
        out *= p as usize;
    }
    out
}

fn log_p(mut n: usize, p: u64) -> u32 {
    let mut e = 0;
    while n > 1 {
        n /= p as usize;
        e += 1;
    }
    e
}

fn members(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Homomorphisms `H → G`, grouped by the subgroup their image generates.
/// A hom is a choice of image `x_i` with `a_i·x_i = 0` for each generator
/// of order `a_i`.
fn image_census(h: &AbelianGroup, g: &AbelianGroup) -> HashMap<u64, BigUint> {
    let (h, g) = (ElementGroup::new(h), ElementGroup::new(g));
    let mut states: HashMap<u64, BigUint> = HashMap::from([(1u64, BigUint::from(1u32))]);
    for &a in h.generator_orders() {
        let images: Vec<usize> = (0..g.size()).filter(|&x| g.scale(a, x) == 0).collect();
        let mut next: HashMap<u64, BigUint> = HashMap::new();
        let mut cache: HashMap<(u64, usize), u64> = HashMap::new();
        for (mask, count) in &states {
            for &x in &images {
                let t = *cache.entry((*mask, x)).or_insert_with(|| g.extend(*mask, x));
                *next.entry(t).or_default() += count;
            }
        }
        states = next;
    }
    states
}

pub fn brute_hom_count(h: &AbelianGroup, g: &AbelianGroup) -> BigUint {
    image_census(h, g).into_values().sum()
}

pub fn brute_sur_count(h: &AbelianGroup, g: &AbelianGroup) -> BigUint {
    let full = ElementGroup::new(g).full_mask();
    image_census(h, g).remove(&full).unwrap_or_default()
}

/// Surjective endomorphisms of a finite group are its automorphisms.
pub fn brute_aut_order(g: &AbelianGroup) -> BigUint {
    brute_sur_count(g, g)
}

/// Whether some cyclic subgroup `C ≤ H` has `H/C ≅ G`.
pub fn brute_cyclic_quotient(h: &AbelianGroup, g: &AbelianGroup) -> bool {
    let eh = ElementGroup::new(h);
    let cyclic: BTreeSet<u64> = (0..eh.size()).map(|x| eh.extend(1, x)).collect();
    cyclic.into_iter().any(|c| eh.quotient_type(c) == *g)
}

/// Every abelian group of order at most `max_order`, by increasing order.
pub fn all_groups_up_to(max_order: u64) -> Vec<AbelianGroup> {
    let mut out = Vec::new();
    for n in 1..=max_order {
        let mut partial: Vec<BTreeMap<u64, Partition>> = vec![BTreeMap::new()];
        for (p, e) in factorize_u64(n) {
            partial = partial
                .into_iter()
                .flat_map(|m| {
                    Partition::all_of_size(e).into_iter().map(move |lam| {
                        let mut m = m.clone();
                        m.insert(p, lam);
                        m
                    })
                })
                .collect();
        }
        out.extend(partial.into_iter().map(|m| AbelianGroup::from_sylow(m).expect("prime keys")));
    }
    out
}

/// Nonzero Smith diagonal from determinantal divisors: `d_k` is the gcd of
/// all `k×k` minors and the `k`-th invariant factor is `d_k / d_{k-1}`.
pub fn minor_gcd_diagonal(m: &IntMatrix) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut prev = BigInt::from(1);
    for k in 1..=m.rows().min(m.cols()) {
        let mut d = BigInt::zero();
        for rows in subsets(m.rows(), k) {
            for cols in subsets(m.cols(), k) {
                d = d.gcd(&determinant(&m.select(&rows, &cols)).expect("square"));
            }
        }
        if d.is_zero() {
            break;
        }
        out.push(&d / &prev);
        prev = d;
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut with_last = subsets(n - 1, k - 1);
    for s in &mut with_last {
        s.push(n - 1);
    }
    let mut out = subsets(n - 1, k);
    out.extend(with_last);
    out
}

/// Outcome of one oracle suite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        SuiteResult { name: name.into(), cases: 0, failures: 0, first_failure: None }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Hom, Sur and Aut counts against enumeration for every pair of groups of
/// order at most `max_order`.
pub fn group_count_suite(max_order: u64) -> SuiteResult {
    let mut r = SuiteResult::new("group_counts");
    let groups = all_groups_up_to(max_order);
    for h in &groups {
        r.check(aut_order(h) == brute_aut_order(h), || format!("aut {h}"));
        for g in &groups {
            let census = image_census(h, g);
            let full = ElementGroup::new(g).full_mask();
            let homs: BigUint = census.values().sum();
            let surs = census.get(&full).cloned().unwrap_or_default();
            r.check(hom_count(h, g) == homs, || format!("hom {h} -> {g}"));
            r.check(sur_count(h, g) == surs, || format!("sur {h} -> {g}"));
            r.check(surjection_exists(h, g) == !surs.is_zero(), || format!("exists {h} -> {g}"));
        }
    }
    r
}

/// Cyclic-quotient criterion against subgroup enumeration for `|H| ≤ max_order`.
pub fn cyclic_quotient_suite(max_order: u64) -> SuiteResult {
    let mut r = SuiteResult::new("cyclic_quotients");
    let groups = all_groups_up_to(max_order);
    for h in &groups {
        let eh = ElementGroup::new(h);
        let cyclic: BTreeSet<u64> = (0..eh.size()).map(|x| eh.extend(1, x)).collect();
        let quotients: BTreeSet<AbelianGroup> = cyclic.into_iter().map(|c| eh.quotient_type(c)).collect();
        for g in groups.iter().filter(|g| h.order() % g.order() == BigUint::zero()) {
            r.check(cyclic_quotient_witness(h, g) == quotients.contains(g), || format!("{h} / cyclic = {g}"));
        }
    }
    r
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    IntMatrix::from_fn(rows, cols, |_, _| BigInt::from(rng.gen_range(-bound..=bound)))
}

/// Smith diagonals against determinantal divisors on random matrices of
/// shape at most 4×5 with entries in `[-9, 9]`.
pub fn smith_suite(cases: u64, seed: u64) -> SuiteResult {
    let mut r = SuiteResult::new("smith_vs_minors");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let rows = rng.gen_range(1..=4);
        let cols = rng.gen_range(1..=5);
        let m = random_matrix(&mut rng, rows, cols, 9);
        let snf = smith_normal_form(&m, false);
        let oracle = minor_gcd_diagonal(&m);
        r.check(snf.nonzero_diagonal() == oracle.as_slice(), || format!("{m}"));
    }
    r
}

/// `|det(L_v)|` against arborescence enumeration on random digraphs with
/// `2..=max_n` vertices and multiplicities in `0..=max_mult`.
pub fn matrix_tree_suite(cases: u64, max_n: usize, max_mult: u64, seed: u64) -> SuiteResult {
    let mut r = SuiteResult::new("matrix_tree");
    let model = EdgeModel::uniform(max_mult).expect("valid model");
    let sampler = model.sampler();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let n = rng.gen_range(2..=max_n);
        let g = sampler.sample_digraph(n, &mut rng);
        for v in 0..n {
            let det = vertex_group_order(&g, v).expect("n >= 2");
            let trees = g.spanning_trees_toward(v).expect("small n");
            r.check(det == BigUint::from(trees), || format!("vertex {v} of {}", serde_json::to_string(&g).unwrap()));
        }
    }
    r
}

/// A strongly connected digraph: either independent multiplicities from
/// `{0, 1, 2}`, or a union of random directed cycles (always balanced).
fn random_connected_digraph(rng: &mut ChaCha8Rng, max_n: usize) -> Digraph {
    let model = EdgeModel::new(BTreeMap::from([(0, 0.5), (1, 0.35), (2, 0.15)]), 0.35).expect("valid model");
    let sampler = model.sampler();
    loop {
        let n = rng.gen_range(2..=max_n);
        let g = if rng.gen_bool(0.25) {
            let mut g = Digraph::from_multiplicities(vec![vec![0; n]; n]).expect("square");
            for _ in 0..rng.gen_range(1..=3) {
                let mut order: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    order.swap(i, rng.gen_range(0..=i));
                }
                let len = rng.gen_range(2..=n);
                for k in 0..len {
                    let (a, b) = (order[k], order[(k + 1) % len]);
                    let m = g.multiplicity(a, b);
                    g.set_multiplicity(a, b, m + 1);
                }
            }
            g
        } else {
            sampler.sample_digraph(n, rng)
        };
        if g.is_strongly_connected() {
            return g;
        }
    }
}

/// Structural identities between total and vertex sandpile groups on random
/// strongly connected digraphs with at most `max_n` vertices: the gcd
/// identity, independence of the deleted row, surjections `S_v ↠ S`, cyclic
/// kernels, and `S ≅ S_v` on balanced digraphs.
pub fn structure_suite(cases: u64, max_n: usize, seed: u64) -> Vec<SuiteResult> {
    let mut gcd = SuiteResult::new("gcd_identity");
    let mut rows = SuiteResult::new("row_drop_invariance");
    let mut surj = SuiteResult::new("vertex_surjects_onto_total");
    let mut cyc = SuiteResult::new("cyclic_kernel");
    let mut eul = SuiteResult::new("eulerian_isomorphism");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let g = random_connected_digraph(&mut rng, max_n);
        let describe = || serde_json::to_string(&g).unwrap();
        let total = total_sandpile(&g).expect("n >= 2");
        let s = total.finite().expect("strongly connected").clone();
        let s_group = s.to_group().expect("small orders factor");
        let mut order_gcd = BigUint::zero();
        for v in 0..g.n() {
            let sv = vertex_sandpile(&g, v).expect("n >= 2");
            let sv = sv.finite().expect("strongly connected").clone();
            order_gcd = order_gcd.gcd(&sv.order());
            let sv_group = sv.to_group().expect("small orders factor");
            surj.check(surjection_exists(&sv_group, &s_group) && sv.surjects_onto(&s), describe);
            cyc.check(cyclic_quotient_witness(&sv_group, &s_group) && sv.has_cyclic_quotient(&s), describe);
            if g.is_balanced() {
                eul.check(sv == s, describe);
            }
            let via_row = total_sandpile_via_row(&g, v).expect("n >= 2");
            rows.check(via_row == total, describe);
        }
        gcd.check(order_gcd == s.order(), describe);
    }
    vec![gcd, rows, surj, cyc, eul]
}

/// All suites at the sizes used by the `verify` subcommand.
pub fn run_all(seed: u64) -> Vec<SuiteResult> {
    let mut out = vec![
        group_count_suite(32),
        cyclic_quotient_suite(64),
        smith_suite(1000, seed),
        matrix_tree_suite(2000, 4, 2, seed),
    ];
    out.extend(structure_suite(300, 8, seed));
    out
}
