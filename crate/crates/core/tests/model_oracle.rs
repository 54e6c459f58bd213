mod oracles;

use hnd_core::model::{
    adam_step, backward, check_against, forward, grad_check, load_checkpoint, move_off_kinks,
    network_loss, predict, save_checkpoint, AdamConfig, CheckpointMeta, ModelParams,
    OptimizerState, Readout, Scaling, DEFAULT_TOLERANCE,
};
use hnd_core::{betweenness, build_samples, Hypernetwork};
use oracles::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn g0() -> Hypernetwork {
    Hypernetwork::new(4, vec![vec![0, 1, 2], vec![2, 3]]).unwrap()
}

fn connected_instance(r: &mut rand_chacha::ChaCha8Rng) -> Hypernetwork {
    let n = r.random_range(4..=12);
    let m = r.random_range(2..=8);
    random_hypernetwork(n, m, 4, r)
}

#[test]
fn forward_matches_dense_reimplementation_on_fixture() {
    for scaling in [Scaling::Rms, Scaling::None] {
        for readout in [Readout::Identity, Readout::Rectifier] {
            let mut p = ModelParams::init(2, 4, readout, 7).with_scaling(scaling);
            p.bias = 0.3;
            let got = predict(&g0(), &p).unwrap();
            let want = dense_forward(&g0(), &p);
            for (a, b) in got.iter().zip(&want) {
                assert!((a - b).abs() < 1e-12, "{scaling:?} {readout:?}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn forward_matches_dense_reimplementation_on_random_instances() {
    let mut r = rng(31);
    for k in 0..30 {
        let g = connected_instance(&mut r);
        let p = ModelParams::init(1 + k % 3, 5, Readout::Identity, k as u64);
        let got = predict(&g, &p).unwrap();
        let want = dense_forward(&g, &p);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
        }
    }
}

#[test]
fn gradients_match_central_differences() {
    let mut r = rng(32);
    for k in 0..20 {
        let g = connected_instance(&mut r);
        let count = (g.num_nodes() * 2).min(g.num_nodes() * (g.num_nodes() - 1) / 2);
        let samples = random_samples(g.num_nodes(), count, &mut r);
        let readout = if k % 2 == 0 { Readout::Identity } else { Readout::Rectifier };
        let scaling = if k % 4 < 2 { Scaling::Rms } else { Scaling::None };
        let mut p = ModelParams::init(2, 4, readout, 100 + k as u64).with_scaling(scaling);
        p.bias = 0.5;
        let report = grad_check(&g, &p, &samples, 1e-5).unwrap();
        assert!(report.passed(), "instance {k}: {:?}", report.tensors);
        assert!(report.max_rel_error() < 1e-4);
    }
}

#[test]
fn injected_gradient_fault_is_detected() {
    let mut r = rng(33);
    let g = connected_instance(&mut r);
    let samples = random_samples(g.num_nodes(), 10, &mut r);
    let (p, _) = move_off_kinks(&g, &ModelParams::init(2, 4, Readout::Identity, 5)).unwrap();
    let trace = forward(&g, &p).unwrap();
    let clean = backward(&g, &p, &trace, &samples).unwrap();
    let names = p.tensor_names();
    for t in 0..names.len() {
        let mut faulty = clean.clone();
        let len = faulty.tensors()[t].len();
        faulty.tensors_mut()[t][len / 2] += 0.01;
        let report = check_against(&g, &p, &samples, &faulty, 1e-5, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(report.flagged(), vec![names[t].as_str()]);
    }
}

#[test]
fn scores_follow_node_and_hyperedge_relabeling() {
    let mut r = rng(34);
    for k in 0..10 {
        let g = connected_instance(&mut r);
        let n = g.num_nodes();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        let mut edges: Vec<Vec<usize>> = g
            .hyperedges()
            .iter()
            .map(|e| e.iter().map(|&v| perm[v]).collect())
            .collect();
        edges.shuffle(&mut r);
        let h = Hypernetwork::new(n, edges).unwrap();
        let p = ModelParams::init(3, 6, Readout::Identity, k);
        let (sg, sh) = (predict(&g, &p).unwrap(), predict(&h, &p).unwrap());
        for v in 0..n {
            assert!((sg[v] - sh[perm[v]]).abs() <= 1e-9 * sg[v].abs().max(1.0));
        }
    }
}

#[test]
fn loss_matches_direct_formula() {
    let mut r = rng(35);
    let scores: Vec<f64> = (0..15).map(|_| r.random_range(-5.0..5.0)).collect();
    let samples = random_samples(15, 40, &mut r);
    let (loss, _) = network_loss(&scores, &samples).unwrap();
    assert!((loss - reference_loss(&scores, &samples)).abs() < 1e-12);
}

#[test]
fn small_network_can_be_overfit() {
    let g = Hypernetwork::new(
        9,
        vec![vec![0, 1, 2], vec![2, 3], vec![3, 4, 5], vec![5, 6], vec![6, 7, 8], vec![1, 7]],
    )
    .unwrap();
    let bc = betweenness(&g.two_section());
    let samples = build_samples(&g, &bc, 2.0, 1).unwrap();
    let mut p = ModelParams::init(2, 8, Readout::Identity, 3);
    let mut state = OptimizerState::new(&p, AdamConfig { learning_rate: 0.02, ..AdamConfig::default() });
    let initial = network_loss(&predict(&g, &p).unwrap(), &samples).unwrap().0;
    for _ in 0..50 {
        let trace = forward(&g, &p).unwrap();
        let grads = backward(&g, &p, &trace, &samples).unwrap();
        adam_step(&mut state, &mut p, &grads).unwrap();
    }
    let last = network_loss(&predict(&g, &p).unwrap(), &samples).unwrap().0;
    assert!(last < 0.1 * initial, "{initial} -> {last}");
}

#[test]
fn checkpoint_reproduces_predictions_bit_for_bit() {
    let mut r = rng(36);
    let g = connected_instance(&mut r);
    let mut p = ModelParams::init(3, 5, Readout::Rectifier, 9).with_scaling(Scaling::None);
    p.bias = 0.25;
    let bytes = save_checkpoint(&p, &CheckpointMeta::for_params(&p, "abc", 4));
    let (q, meta) = load_checkpoint(&bytes).unwrap();
    assert_eq!(meta.scaling, Scaling::None);
    assert_eq!(q, p);
    let (a, b) = (predict(&g, &p).unwrap(), predict(&g, &q).unwrap());
    assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
}
