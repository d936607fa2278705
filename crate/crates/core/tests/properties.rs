use ndarray::{Array1, Array2};
use proptest::prelude::*;

use reid_crf::evaluation::{baseline_params, evaluate_method, max_f_score, precision_recall_curve, ProtocolOptions};
use reid_crf::inference::{exact_joint_enumeration, infer_marginals, Backend, InferenceSettings};
use reid_crf::learning::{kkt_residual, learn_kernel_weights, train, weight_objective, TrainConfig};
use reid_crf::potentials::{unary_cost, CrfProblem, ResolvedKernel};
use reid_crf::synth::{synth_generate, SyntheticSpec};

fn problem_strategy(max_n: usize) -> impl Strategy<Value = CrfProblem> {
    (1..=max_n, 1..=3usize).prop_flat_map(|(n, d)| {
        (
            prop::collection::vec(0.0..3.0f64, n),
            prop::collection::vec(-2.0..2.0f64, n * d),
            0.2..3.0f64,
            0.0..4.0f64,
        )
            .prop_map(move |(u, pts, sigma, alpha)| {
                let points = Array2::from_shape_vec((n, d), pts).unwrap();
                let kernel = ResolvedKernel::new("k", points, sigma, 1.0).unwrap();
                CrfProblem::new(Array1::from(u), vec![kernel], alpha).unwrap()
            })
    })
}

/// Marginals `P(x_i = 1)` under `exp(-E)` with
/// `E(x) = sum_i u_i x_i + alpha sum_{i<j} k_ij [x_i != x_j]`, by listing
/// every labeling.
fn naive_marginals(problem: &CrfProblem) -> Vec<f64> {
    let n = problem.len();
    let energies: Vec<f64> = (0..1u32 << n)
        .map(|x| {
            let bit = |i: usize| (x >> i) & 1;
            let mut e = 0.0;
            for i in 0..n {
                e += problem.unary_cost[i] * bit(i) as f64;
                for j in i + 1..n {
                    if bit(i) != bit(j) {
                        e += problem.alpha * problem.pairwise_similarity(i, j).unwrap();
                    }
                }
            }
            e
        })
        .collect();
    let min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = energies.iter().map(|e| (min - e).exp()).collect();
    let z: f64 = weights.iter().sum();
    (0..n)
        .map(|i| {
            weights
                .iter()
                .enumerate()
                .filter(|(x, _)| (x >> i) & 1 == 1)
                .map(|(_, w)| w)
                .sum::<f64>()
                / z
        })
        .collect()
}

fn permute(problem: &CrfProblem, order: &[usize]) -> CrfProblem {
    let unary: Array1<f64> = order.iter().map(|&i| problem.unary_cost[i]).collect();
    let kernels = problem
        .kernels
        .iter()
        .map(|k| {
            let points = k.points.select(ndarray::Axis(0), order);
            ResolvedKernel::new(k.channel.clone(), points, k.sigma, k.weight).unwrap()
        })
        .collect();
    CrfProblem::new(unary, kernels, problem.alpha).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn enumeration_matches_naive_sum(problem in problem_strategy(8)) {
        let fast = exact_joint_enumeration(&problem).unwrap();
        for (a, b) in fast.iter().zip(naive_marginals(&problem)) {
            prop_assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn marginals_stay_in_lower_half(problem in problem_strategy(12)) {
        let q = infer_marginals(&problem, &InferenceSettings::default()).unwrap().marginals.q;
        prop_assert!(q.iter().all(|&x| x > 0.0 && x <= 0.5));
    }

    #[test]
    fn mean_field_is_permutation_equivariant(
        problem in problem_strategy(12),
        seed in any::<u64>(),
        filtered in any::<bool>(),
    ) {
        let n = problem.len();
        let mut order: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let settings = InferenceSettings {
            backend: if filtered { Backend::Filtered } else { Backend::Exact },
            convergence_tol: 1e-12,
            max_iterations: 1000,
            damping: 0.3,
            ..InferenceSettings::default()
        };
        let q = infer_marginals(&problem, &settings).unwrap().marginals.q;
        let qp = infer_marginals(&permute(&problem, &order), &settings).unwrap().marginals.q;
        // The lattice depends on absolute position only, so both backends are
        // equivariant up to summation order.
        for (r, &i) in order.iter().enumerate() {
            prop_assert!((qp[r] - q[i]).abs() < 1e-9, "{} vs {}", qp[r], q[i]);
        }
    }

    #[test]
    fn learned_weights_are_feasible_and_optimal(
        rows in 3..40usize,
        cols in 1..6usize,
        seed in prop::collection::vec(0.0..1.0f64, 40 * 6 + 40),
        probe in prop::collection::vec(0.0..1.0f64, 6),
    ) {
        let design = Array2::from_shape_fn((rows, cols), |(r, c)| seed[r * 6 + c]);
        let gt: Vec<f64> = (0..rows).map(|r| seed[240 + r]).collect();
        let w = learn_kernel_weights(design.view(), &gt).unwrap();
        prop_assert_eq!(w.len(), cols);
        prop_assert!(w.iter().all(|&x| x >= 0.0));
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(kkt_residual(design.view(), &gt, &w) < 1e-6);
        let total: f64 = probe[..cols].iter().sum::<f64>() + 1e-12;
        let other: Vec<f64> = probe[..cols].iter().map(|x| (x + 1e-12 / cols as f64) / total).collect();
        prop_assert!(
            weight_objective(design.view(), &gt, &w) <= weight_objective(design.view(), &gt, &other) + 1e-9
        );
    }

    #[test]
    fn ranking_invariant_under_increasing_transform(
        levels in prop::collection::vec(0..12i32, 1..25),
        flags in prop::collection::vec(any::<bool>(), 25),
    ) {
        let n = levels.len();
        let mut relevant: Vec<usize> = (0..n).filter(|&i| flags[i]).collect();
        if relevant.is_empty() {
            relevant.push(0);
        }
        let scores: Vec<f64> = levels.iter().map(|&l| l as f64).collect();
        let moved: Vec<f64> = scores.iter().map(|&s| 2.0 * s * s * s + s + 5.0).collect();
        let a = precision_recall_curve(&scores, &relevant).unwrap();
        let b = precision_recall_curve(&moved, &relevant).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(max_f_score(&a), max_f_score(&b));
    }

    #[test]
    fn recall_is_monotone_and_f_bounded(
        scores in prop::collection::vec(0.0..1.0f64, 1..30),
        flags in prop::collection::vec(any::<bool>(), 30),
    ) {
        let n = scores.len();
        let mut relevant: Vec<usize> = (0..n).filter(|&i| flags[i]).collect();
        if relevant.is_empty() {
            relevant.push(n - 1);
        }
        let curve = precision_recall_curve(&scores, &relevant).unwrap();
        prop_assert_eq!(curve.points.len(), n);
        for pair in curve.points.windows(2) {
            prop_assert!(pair[1].recall >= pair[0].recall);
        }
        prop_assert_eq!(curve.points[n - 1].recall, 1.0);
        let f = max_f_score(&curve);
        prop_assert!((0.0..=1.0).contains(&f));
        // F reaches 1 exactly when the top |R| items are the relevant ones.
        let k = relevant.len();
        let mut top: Vec<usize> = (0..n).collect();
        top.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        let mut head = top[..k].to_vec();
        head.sort_unstable();
        prop_assert_eq!(f == 1.0, head == relevant);
    }
}

#[test]
fn zero_alpha_evaluation_is_unary_ranking() {
    let dataset = synth_generate(&SyntheticSpec::benchmark(12)).unwrap();
    let persons = dataset.persons();
    let params = baseline_params(
        &train(&dataset, &persons[..32], &TrainConfig::for_dataset(&dataset, 12))
            .unwrap()
            .params,
    );
    let protocol = ProtocolOptions::new(3, 12);
    let evaluation = evaluate_method(&dataset, &params, &InferenceSettings::default(), &protocol).unwrap();
    let splits = protocol.splits(&dataset).unwrap();
    let mut k = 0;
    for (run, split) in splits.iter().enumerate() {
        for trial in protocol.trials(&dataset, split, run).unwrap() {
            let probe = dataset.probe_from_image(trial.probe).unwrap();
            let scores: Vec<f64> = trial
                .gallery
                .iter()
                .map(|&g| -unary_cost(&probe, &dataset, &params.unary(), g).unwrap())
                .collect();
            let expected = max_f_score(&precision_recall_curve(&scores, &trial.relevant).unwrap());
            assert_eq!(evaluation.report.per_probe[k].max_f, expected);
            k += 1;
        }
    }
    assert_eq!(k, evaluation.report.per_probe.len());
}
