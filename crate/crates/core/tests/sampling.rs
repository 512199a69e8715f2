use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sandpile_lab::abelian_groups::AbelianGroup;
use sandpile_lab::experiment::{trial_digraph, ExperimentConfig};
use sandpile_lab::random_digraph::{Digraph, EdgeModel};
use sandpile_lab::sandpile::{profile, total_sandpile, SandpileGroup};

fn models() -> Vec<EdgeModel> {
    vec![
        EdgeModel::bernoulli(0.5).unwrap(),
        EdgeModel::bernoulli(0.2).unwrap(),
        EdgeModel::uniform(1).unwrap(),
        EdgeModel::uniform(3).unwrap(),
        EdgeModel::new(BTreeMap::from([(0, 0.5), (1, 0.35), (2, 0.15)]), 0.35).unwrap(),
    ]
}

#[test]
fn laplacian_columns_vanish_for_every_model() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for model in models() {
        for k in 0..100 {
            let g = model.sample_digraph(2 + k % 12, &mut rng);
            let l = g.laplacian();
            for j in 0..g.n() {
                let sum: BigInt = (0..g.n()).map(|i| l.row(i)[j].clone()).sum();
                assert!(sum.is_zero());
            }
        }
    }
}

#[test]
fn dense_digraphs_are_strongly_connected() {
    let cfg = ExperimentConfig::new(30, 2000, EdgeModel::bernoulli(0.5).unwrap(), 11);
    let connected = (0..cfg.trials).filter(|&i| trial_digraph(&cfg, i).is_strongly_connected()).count();
    assert!(connected as f64 / cfg.trials as f64 >= 0.999, "{connected} of {}", cfg.trials);
}

#[test]
fn edge_mean_matches_model() {
    let model = EdgeModel::bernoulli(0.3).unwrap();
    let sampler = model.sampler();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let samples = 100_000;
    let hits: u64 = (0..samples).map(|_| sampler.sample(&mut rng)).sum();
    let mean = hits as f64 / samples as f64;
    let sigma = (0.3f64 * 0.7 / samples as f64).sqrt();
    assert!((mean - 0.3).abs() <= 3.0 * sigma, "mean {mean}");
}

#[test]
fn trial_streams_are_independent_of_order() {
    let cfg = ExperimentConfig::new(12, 50, EdgeModel::uniform(2).unwrap(), 99);
    let forward: Vec<Digraph> = (0..50).map(|i| trial_digraph(&cfg, i)).collect();
    let backward: Vec<Digraph> = (0..50).rev().map(|i| trial_digraph(&cfg, i)).collect();
    assert!(forward.iter().eq(backward.iter().rev()));
    assert_ne!(forward[0], forward[1]);
}

#[test]
fn complete_bidirected_groups() {
    // Kirchhoff: the sandpile group of K_n is (Z/n)^(n-2); K_n is eulerian,
    // so the total group agrees with it.
    for n in 3..=9u64 {
        let g = Digraph::complete_bidirected(n as usize);
        let expected = AbelianGroup::from_cyclic_orders(&vec![n; n as usize - 2]).unwrap();
        let total = total_sandpile(&g).unwrap();
        assert_eq!(total.finite().unwrap().to_group().unwrap(), expected, "n = {n}");
        let p = profile(&g).unwrap();
        assert!(p.eulerian && !p.coeulerian);
        assert!(p.vertex_groups.iter().all(|s| *s == total));
    }
}

#[test]
fn directed_cycles_are_coeulerian() {
    for n in 2..=12 {
        let p = profile(&Digraph::directed_cycle(n)).unwrap();
        assert!(p.eulerian && p.coeulerian);
        assert!(p.vertex_groups.iter().all(SandpileGroup::is_trivial));
    }
}

#[test]
fn eulerian_digraphs_are_rare() {
    let cfg = ExperimentConfig::new(10, 500, EdgeModel::bernoulli(0.5).unwrap(), 2);
    assert!((0..cfg.trials).all(|i| !trial_digraph(&cfg, i).is_balanced()));
}
