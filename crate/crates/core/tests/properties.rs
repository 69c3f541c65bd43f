use ndarray::{Array1, Array2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qrc_core::encoding::{
    perturbation_first_order, state_encoding_coefficients, verify_encoding_equivalence, SpectralData,
};
use qrc_core::experiment::ExperimentConfig;
use qrc_core::learner::{delay_embed, nmse, predict, ridge_fit, vpts, ReadoutWeights};
use qrc_core::linalg::{adjoint, eigh, hermiticity_defect, CMatrix, CVector, C64};
use qrc_core::ops::lindblad::density_distance;
use qrc_core::ops::state::trace;
use qrc_core::ops::{
    build_hamiltonian, dissipative_evolve, expectation_values, lindblad_generator, site_operator, unitary_evolve,
    Propagator, QuantumState, SiteOperator,
};
use qrc_core::reservoir::{
    build_jump_ops, featurize, featurize_batch, sample_parameters, DissipationMode, LindbladBackend, ObservableSet,
    ReservoirConfig,
};
use qrc_core::tasks::{SweepAxis, SweepMetric, SweepSpec, TaskSpec};

fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    let a = Array2::from_shape_fn((d, d), |_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    (&a + &adjoint(&a)).mapv(|z| z * 0.5)
}

fn random_state(rng: &mut ChaCha8Rng, d: usize) -> CVector {
    let v = Array1::from_shape_fn(d, |_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.mapv(|z| z / n)
}

fn config(n: usize, gamma: f64, seed: u64) -> ReservoirConfig {
    ReservoirConfig { n_qubits: n, gamma, seed, ..Default::default() }
}

fn loss(w: &Array2<f64>, r: &Array2<f64>, y: &Array2<f64>, lambda: f64) -> f64 {
    let res = y - &w.dot(r);
    res.iter().map(|v| v * v).sum::<f64>() + lambda * w.iter().map(|v| v * v).sum::<f64>()
}

fn pauli_strings(n: usize) -> Vec<CMatrix> {
    let mut out = Vec::new();
    for kind in [SiteOperator::SigmaX, SiteOperator::SigmaY, SiteOperator::SigmaZ] {
        for j in 0..n {
            out.push(site_operator(kind, j, n).unwrap());
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hamiltonian_is_hermitian(n in 1usize..=4, seed in any::<u64>(), x in -5.0f64..5.0, s in 0.0f64..2.0) {
        let p = sample_parameters(&ReservoirConfig { scale_s: s, ..config(n, 0.0, seed) }).unwrap();
        prop_assert!(hermiticity_defect(&build_hamiltonian(&p, x)) <= 1e-12);
    }

    #[test]
    fn unitary_evolution_preserves_norm(n in 1usize..=3, seed in any::<u64>(), x in -3.0f64..3.0, tau in 0.0f64..100.0) {
        let p = sample_parameters(&config(n, 0.0, seed)).unwrap();
        let out = unitary_evolve(&p.initial_state, &build_hamiltonian(&p, x), tau).unwrap();
        let norm = out.as_pure().unwrap().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn dissipative_evolution_is_a_state(
        n in 1usize..=3, seed in any::<u64>(), gamma in 0.0f64..1.0, tau in 0.0f64..10.0, lowering in any::<bool>()
    ) {
        let mode = if lowering { DissipationMode::Lowering } else { DissipationMode::Projector };
        let p = sample_parameters(&config(n, gamma, seed)).unwrap();
        let gen = lindblad_generator(&build_hamiltonian(&p, 0.3), &build_jump_ops(mode, gamma, n).unwrap()).unwrap();
        let rho0 = QuantumState::Density(p.initial_state.to_density());
        let out = dissipative_evolve(&rho0, &gen, tau).unwrap();
        let rho = out.as_density().unwrap();
        prop_assert!((trace(rho) - C64::new(1.0, 0.0)).norm() <= 1e-9);
        prop_assert!(hermiticity_defect(rho) <= 1e-9);
        prop_assert!(eigh(rho).unwrap().0[0] >= -1e-8);
    }

    #[test]
    fn closed_limit_of_lindblad_is_unitary(n in 1usize..=3, seed in any::<u64>(), tau in 0.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 1 << n;
        let h = random_hermitian(&mut rng, d);
        let psi = QuantumState::pure(random_state(&mut rng, d)).unwrap();
        let pure = unitary_evolve(&psi, &h, tau).unwrap().to_density();
        let gen = lindblad_generator(&h, &[]).unwrap();
        let mixed = dissipative_evolve(&QuantumState::Density(psi.to_density()), &gen, tau).unwrap();
        prop_assert!(density_distance(&pure, mixed.as_density().unwrap()) <= 1e-9);
    }

    #[test]
    fn pauli_expectations_bounded(n in 1usize..=3, seed in any::<u64>(), gamma in 0.0f64..0.5) {
        let p = sample_parameters(&config(n, gamma, seed)).unwrap();
        let gen = lindblad_generator(&build_hamiltonian(&p, -0.4), &p.jump_ops).unwrap();
        let rho = dissipative_evolve(&QuantumState::Density(p.initial_state.to_density()), &gen, p.tau).unwrap();
        for v in expectation_values(&rho, &pauli_strings(n)).unwrap() {
            prop_assert!(v.abs() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn propagators_compose(n in 1usize..=3, seed in any::<u64>(), t1 in 0.0f64..5.0, t2 in 0.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(&mut rng, 1 << n);
        let a = Propagator::new(&h, t1).unwrap().matrix();
        let b = Propagator::new(&h, t2).unwrap().matrix();
        let ab = Propagator::new(&h, t1 + t2).unwrap().matrix();
        let diff = &a.dot(&b) - &ab;
        prop_assert!(diff.iter().map(|z| z.norm()).fold(0.0, f64::max) <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn featurization_is_memoryless(seed in any::<u64>(), xs in prop::collection::vec(-1.0f64..1.0, 2..8), rot in 0usize..8) {
        let p = sample_parameters(&config(3, 1.5e-2, seed)).unwrap();
        let mut perm: Vec<usize> = (0..xs.len()).collect();
        perm.rotate_left(rot % xs.len());
        perm.swap(0, xs.len() - 1);
        let permuted: Vec<f64> = perm.iter().map(|&i| xs[i]).collect();
        let a = featurize_batch(&p, &xs).unwrap();
        let b = featurize_batch(&p, &permuted).unwrap();
        for (col, &i) in perm.iter().enumerate() {
            prop_assert_eq!(b.column(col), a.column(i));
        }
    }

    #[test]
    fn features_reproducible_from_config(seed in any::<u64>(), xs in prop::collection::vec(-2.0f64..2.0, 1..6)) {
        let cfg = config(3, 1.5e-2, seed);
        let a = featurize_batch(&sample_parameters(&cfg).unwrap(), &xs).unwrap();
        let b = featurize_batch(&sample_parameters(&cfg).unwrap(), &xs).unwrap();
        let bits = |m: &Array2<f64>| m.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn pauli_features_bounded(seed in any::<u64>(), x in -5.0f64..5.0, xyz in any::<bool>(), gamma in 0.0f64..0.1) {
        let set = if xyz { ObservableSet::Xyz } else { ObservableSet::ZOnly };
        let p = sample_parameters(&ReservoirConfig { observable_set: set, ..config(3, gamma, seed) }).unwrap();
        for v in featurize(&p, x).unwrap() {
            prop_assert!(v.abs() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn features_are_continuous(seed in any::<u64>(), x in -1.0f64..1.0, dense in any::<bool>()) {
        let backend = if dense { LindbladBackend::Dense } else { LindbladBackend::Krylov };
        let p = sample_parameters(&ReservoirConfig { backend, ..config(2, 1.5e-2, seed) }).unwrap();
        let f = |x: f64| featurize(&p, x).unwrap();
        let (f0, fh) = (f(x), f(x + 1e-6));
        let (fp, fm) = (f(x + 1e-4), f(x - 1e-4));
        let fwd: Vec<f64> = fh.iter().zip(&f0).map(|(a, b)| (a - b) / 1e-6).collect();
        let central: Vec<f64> = fp.iter().zip(&fm).map(|(a, b)| (a - b) / 2e-4).collect();
        let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let gap: Vec<f64> = fwd.iter().zip(&central).map(|(a, b)| a - b).collect();
        prop_assert!(fh.iter().zip(&f0).all(|(a, b)| (a - b).abs() < 1e-4));
        prop_assert!(norm(&gap) <= 1e-2 * norm(&central).max(1e-3), "{:?} vs {:?}", fwd, central);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ridge_solution_is_optimal(seed in any::<u64>(), k in 2usize..8, t in 5usize..40, log_lambda in -6.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = Array2::from_shape_fn((k, t), |_| rng.random_range(-1.0..1.0));
        let y = Array2::from_shape_fn((2, t), |_| rng.random_range(-1.0..1.0));
        let lambda = 10f64.powf(log_lambda);
        let w = ridge_fit(r.view(), y.view(), lambda).unwrap().weights;
        let best = loss(&w, &r, &y, lambda);
        for _ in 0..50 {
            let dir = Array2::from_shape_fn(w.dim(), |_| rng.random_range(-1.0..1.0));
            let moved = &w + &dir.mapv(|v| v * 1e-3);
            prop_assert!(loss(&moved, &r, &y, lambda) >= best);
        }
    }

    #[test]
    fn ridge_norm_shrinks_with_lambda(seed in any::<u64>(), log_l1 in -6.0f64..1.0, ratio in 1.1f64..100.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = Array2::from_shape_fn((5, 30), |_| rng.random_range(-1.0..1.0));
        let y = Array2::from_shape_fn((1, 30), |_| rng.random_range(-1.0..1.0));
        let l1 = 10f64.powf(log_l1);
        let norm = |l: f64| ridge_fit(r.view(), y.view(), l).unwrap().weights.iter().map(|v| v * v).sum::<f64>();
        prop_assert!(norm(l1) >= norm(l1 * ratio));
    }

    #[test]
    fn zero_delay_weights_reproduce_undelayed_predictions(seed in any::<u64>(), delta in 0usize..6, bias in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (k, t) = (3, 40);
        let r = Array2::from_shape_fn((k, t), |_| rng.random_range(-1.0..1.0));
        let w0: Vec<f64> = (0..k + usize::from(bias)).map(|_| rng.random_range(-2.0..2.0)).collect();
        let base = delay_embed(r.view(), 0, bias).unwrap();
        let plain = ReadoutWeights { weights: Array2::from_shape_vec((1, w0.len()), w0.clone()).unwrap(), lambda: 1.0, bias };
        let want = predict(&plain, base.values.view()).unwrap();

        let emb = delay_embed(r.view(), delta, bias).unwrap();
        let mut wd = vec![0.0; emb.rows()];
        wd[..k].copy_from_slice(&w0[..k]);
        if bias {
            wd[emb.rows() - 1] = w0[k];
        }
        let delayed = ReadoutWeights { weights: Array2::from_shape_vec((1, wd.len()), wd).unwrap(), lambda: 1.0, bias };
        let got = predict(&delayed, emb.values.view()).unwrap();
        for c in 0..emb.cols() {
            prop_assert_eq!(got[[0, c]].to_bits(), want[[0, emb.sample_index(c)]].to_bits());
        }

        // Fitting planted targets recovers zero weight on the delayed blocks.
        let y = Array2::from_shape_fn((1, emb.cols()), |(_, c)| want[[0, emb.sample_index(c)]]);
        let fit = ridge_fit(emb.values.view(), y.view(), 1e-12).unwrap();
        let pred = predict(&fit, emb.values.view()).unwrap();
        for c in 0..emb.cols() {
            prop_assert!((pred[[0, c]] - y[[0, c]]).abs() <= 1e-6);
        }
    }

    #[test]
    fn nmse_is_affine_invariant(seed in any::<u64>(), a in prop_oneof![-10.0f64..-0.1, 0.1f64..10.0], b in -10.0f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<f64> = (0..50).map(|_| rng.random_range(-1.0..1.0)).collect();
        let p: Vec<f64> = y.iter().map(|v| v + rng.random_range(-0.3..0.3)).collect();
        let base = nmse(&y, &p).unwrap();
        let ty: Vec<f64> = y.iter().map(|v| a * v + b).collect();
        let tp: Vec<f64> = p.iter().map(|v| a * v + b).collect();
        prop_assert!((nmse(&ty, &tp).unwrap() - base).abs() <= 1e-12 * base.max(1.0));
    }

    #[test]
    fn perfect_prediction_is_valid_throughout(y in prop::collection::vec(-5.0f64..5.0, 2..60), theta in 1e-6f64..10.0) {
        prop_assume!(y.iter().any(|&v| v != y[0]));
        prop_assert_eq!(vpts(&y, &y, theta).unwrap(), y.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn equivalence_error_does_not_grow_with_input(seed in any::<u64>()) {
        let p = sample_parameters(&config(2, 0.0, seed)).unwrap();
        let small = verify_encoding_equivalence(&p, &[0.01, -0.01]).unwrap();
        let large = verify_encoding_equivalence(&p, &[1.0, -1.0]).unwrap();
        // Both sit at the rounding floor; compare against that floor.
        prop_assert!(large <= 10.0 * small.max(1e-14), "{large:e} vs {small:e}");
    }

    #[test]
    fn first_order_eigenvalue_error_is_quadratic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h0 = random_hermitian(&mut rng, 4);
        let hx = random_hermitian(&mut rng, 4);
        prop_assume!(SpectralData::new(&h0).unwrap().min_gap > 0.05);
        let xs = [1e-4, 1e-3, 1e-2];
        let errs: Vec<f64> = xs.iter().map(|&x| {
            let est = perturbation_first_order(&h0, &hx, x).unwrap().eigenvalues;
            let exact = eigh(&(&h0 + &hx.mapv(|z| z * x))).unwrap().0;
            est.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        }).collect();
        let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let le: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        let mx = lx.iter().sum::<f64>() / 3.0;
        let me = le.iter().sum::<f64>() / 3.0;
        let slope = lx.iter().zip(&le).map(|(a, b)| (a - mx) * (b - me)).sum::<f64>()
            / lx.iter().map(|a| (a - mx).powi(2)).sum::<f64>();
        prop_assert!((slope - 2.0).abs() <= 0.1, "slope {slope}, errors {errs:?}");
    }

    #[test]
    fn commuting_pair_preserves_amplitudes(seed in any::<u64>(), x in -3.0f64..3.0, tau in 0.0f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e0: Vec<f64> = (0..4).map(|j| j as f64 + rng.random_range(0.0..0.5)).collect();
        let h0 = Array2::from_diag(&Array1::from_iter(e0.iter().map(|&e| C64::from(e))));
        let hx = Array2::from_diag(&Array1::from_shape_fn(4, |_| C64::from(rng.random_range(-1.0..1.0))));
        let c0 = random_state(&mut rng, 4);
        let c = state_encoding_coefficients(&h0, &hx, x, tau, &c0).unwrap();
        for (a, b) in c.iter().zip(&c0) {
            prop_assert!((a.norm() - b.norm()).abs() <= 1e-10);
        }
    }

    #[test]
    fn experiment_config_round_trips(
        n in 1usize..=6, gamma in 0.0f64..1.0, s in 0.0f64..2.0, delta in 0usize..200, seed in any::<u64>(),
        sweep in any::<bool>(), xyz in any::<bool>()
    ) {
        let cfg = ExperimentConfig {
            reservoir: ReservoirConfig {
                n_qubits: n,
                gamma,
                scale_s: s,
                seed,
                observable_set: if xyz { ObservableSet::Xyz } else { ObservableSet::ZOnly },
                tau: Some(1.25),
                ..Default::default()
            },
            task: TaskSpec { delta, seed: seed ^ 1, ..TaskSpec::regression(&["group1"]) },
            sweep: sweep.then(|| SweepSpec {
                axis: SweepAxis::ScaleS,
                values: vec![0.5, s],
                seeds: vec![seed, 3],
                metric: SweepMetric::Anmse,
            }),
            ..Default::default()
        };
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
