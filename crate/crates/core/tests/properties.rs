use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use sandpile_lab::abelian_groups::{aut_order, cyclic_quotient_witness, hom_count, sur_count, surjection_exists, AbelianGroup};
use sandpile_lab::integer_smith::{
    cokernel, cokernel_integral, cokernel_mod, determinant, smith_normal_form, IntMatrix,
};
use sandpile_lab::oracle::{brute_cyclic_quotient, minor_gcd_diagonal, ElementGroup};
use sandpile_lab::random_digraph::Digraph;
use sandpile_lab::sandpile::{total_sandpile, total_sandpile_via_row, vertex_sandpile};

fn group(max_order: u64) -> impl Strategy<Value = AbelianGroup> {
    prop::collection::vec(1..=12u64, 0..4)
        .prop_filter("bounded order", move |v| v.iter().product::<u64>() <= max_order)
        .prop_map(|v| AbelianGroup::from_cyclic_orders(&v).unwrap())
}

fn matrix(max_rows: usize, max_cols: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (0..=max_rows, 0..=max_cols).prop_flat_map(move |(r, c)| {
        prop::collection::vec(prop::collection::vec(-bound..=bound, c), r)
            .prop_map(move |rows| if r == 0 { IntMatrix::zeros(0, c) } else { IntMatrix::from_rows(&rows).unwrap() })
    })
}

fn digraph(max_n: usize, max_mult: u64) -> impl Strategy<Value = Digraph> {
    (2..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(prop::collection::vec(0..=max_mult, n), n)
            .prop_map(|mult| Digraph::from_multiplicities(mult).unwrap())
    })
}

fn diag(m: &IntMatrix) -> Vec<BigInt> {
    smith_normal_form(m, false).diagonal
}

fn permuted(m: &IntMatrix, rows: &[usize], cols: &[usize]) -> IntMatrix {
    m.select(rows, cols)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn counts_are_multiplicative(h1 in group(64), h2 in group(64), g in group(64)) {
        prop_assert_eq!(hom_count(&h1.direct_sum(&h2), &g), hom_count(&h1, &g) * hom_count(&h2, &g));
        prop_assert_eq!(hom_count(&g, &h1.direct_sum(&h2)), hom_count(&g, &h1) * hom_count(&g, &h2));
        let mut aut = BigUint::one();
        let mut sur = BigUint::one();
        for p in g.primes() {
            let part = g.sylow_restrict(&[p].into_iter().collect()).unwrap();
            let hp = h1.sylow_restrict(&[p].into_iter().collect()).unwrap();
            aut *= aut_order(&part);
            sur *= sur_count(&hp, &part);
        }
        prop_assert_eq!(aut_order(&g), aut);
        prop_assert_eq!(sur_count(&h1, &g), sur);
    }

    #[test]
    fn homs_split_over_quotients(h in group(64), g in group(64)) {
        // Subgroups and quotients of G have the same isomorphism types, so
        // summing surjections onto quotients recovers Hom(H, G).
        let eg = ElementGroup::new(&g);
        let total: BigUint = eg.subgroups().into_iter().map(|k| sur_count(&h, &eg.quotient_type(k))).sum();
        prop_assert_eq!(total, hom_count(&h, &g));
    }

    #[test]
    fn surjection_predicates(h in group(64), g in group(64)) {
        prop_assert_eq!(surjection_exists(&h, &g), !sur_count(&h, &g).is_zero());
        prop_assert_eq!(cyclic_quotient_witness(&h, &g), brute_cyclic_quotient(&h, &g));
        if surjection_exists(&h, &g) {
            prop_assert!(h.order().is_multiple_of(&g.order()));
        }
    }

    #[test]
    fn tensor_is_idempotent(g in group(1 << 12), a in 1..=48u64, b in 1..=48u64) {
        let once = g.tensor_mod(a).unwrap();
        prop_assert_eq!(once.tensor_mod(a).unwrap(), once.clone());
        prop_assert_eq!(once.tensor_mod(b).unwrap(), g.tensor_mod(a.gcd(&b)).unwrap());
        prop_assert!(once.exponent() <= BigUint::from(a) && (BigUint::from(a) % once.exponent()).is_zero());
    }

    #[test]
    fn snf_matches_minor_gcds(m in matrix(4, 5, 9)) {
        prop_assert_eq!(smith_normal_form(&m, false).nonzero_diagonal().to_vec(), minor_gcd_diagonal(&m));
    }

    #[test]
    fn snf_transforms_are_sound(m in matrix(5, 6, 20)) {
        let snf = smith_normal_form(&m, true);
        let (u, v) = snf.transforms.clone().expect("transforms requested");
        let d = IntMatrix::diagonal(m.rows(), m.cols(), &snf.diagonal);
        prop_assert_eq!(&(&u * &m) * &v, d);
        prop_assert!(determinant(&u).unwrap().abs().is_one());
        prop_assert!(determinant(&v).unwrap().abs().is_one());
        for w in snf.nonzero_diagonal().windows(2) {
            prop_assert!(w[0].is_positive() && (&w[1] % &w[0]).is_zero());
        }
        prop_assert!(snf.diagonal[snf.rank..].iter().all(Zero::is_zero));
    }

    #[test]
    fn snf_ignores_permutations(
        m in matrix(5, 5, 15),
        row_keys in prop::collection::vec(any::<u32>(), 5),
        col_keys in prop::collection::vec(any::<u32>(), 5),
    ) {
        let mut rows: Vec<usize> = (0..m.rows()).collect();
        let mut cols: Vec<usize> = (0..m.cols()).collect();
        rows.sort_by_key(|&i| row_keys[i]);
        cols.sort_by_key(|&j| col_keys[j]);
        prop_assert_eq!(diag(&permuted(&m, &rows, &cols)), diag(&m));
    }

    #[test]
    fn snf_scales(m in matrix(4, 4, 15), c in 1..=12i64) {
        let c = BigInt::from(c);
        let scaled: Vec<BigInt> = diag(&m).iter().map(|d| d * &c).collect();
        prop_assert_eq!(diag(&m.scaled(&c)), scaled);
    }

    #[test]
    fn cokernel_mod_matches_integral(m in matrix(6, 6, 12), a in 1..=72u64) {
        let integral = cokernel_integral(&m);
        let mut expected = integral.torsion.tensor_mod(a).unwrap();
        for _ in 0..integral.free_rank {
            expected = expected.direct_sum(&AbelianGroup::from_cyclic_orders(&[a]).unwrap());
        }
        prop_assert_eq!(cokernel_mod(&m, a).unwrap(), expected);
    }

    #[test]
    fn cokernel_paths_agree(m in matrix(12, 14, 3)) {
        prop_assert_eq!(cokernel(&m), cokernel_integral(&m));
    }

    #[test]
    fn laplacian_columns_sum_to_zero(g in digraph(9, 4)) {
        let l = g.laplacian();
        for j in 0..g.n() {
            let sum: BigInt = (0..g.n()).map(|i| l.row(i)[j].clone()).sum();
            prop_assert!(sum.is_zero());
        }
    }

    #[test]
    fn loops_do_not_matter(g in digraph(7, 3), loops in prop::collection::vec(1..=5u64, 7)) {
        let mut looped = g.clone();
        for v in 0..g.n() {
            looped.set_multiplicity(v, v, loops[v]);
        }
        prop_assert_eq!(looped.laplacian(), g.laplacian());
        prop_assert_eq!(total_sandpile(&looped).unwrap(), total_sandpile(&g).unwrap());
    }

    #[test]
    fn total_group_ignores_dropped_row(g in digraph(7, 3)) {
        let s = total_sandpile(&g).unwrap();
        for r in 0..g.n() {
            prop_assert_eq!(total_sandpile_via_row(&g, r).unwrap(), s.clone());
        }
    }

    #[test]
    fn vertex_group_orders_count_trees(g in digraph(5, 2)) {
        for v in 0..g.n() {
            let trees = g.spanning_trees_toward(v).unwrap();
            let order = vertex_sandpile(&g, v).unwrap().order().unwrap_or_default();
            prop_assert_eq!(order, BigUint::from(trees));
        }
    }
}
