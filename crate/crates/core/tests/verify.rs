use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shiftlab::blockmethod::{validate_compatible_sequence, GammaConfig};
use shiftlab::dynamics::Resolution;
use shiftlab::funcspace::{random_function, BlockPart, BlockSpace, Fiber};
use shiftlab::shiftop::*;
use shiftlab::verify::*;
use shiftlab::ScalarField;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn block(p: Vec<usize>, degree: usize) -> BlockMethodShift {
    build_block_method(BlockMethodParams::torus(p, 1, degree, ScalarField::Real, 0).unwrap()).unwrap()
}

fn degenerate(degree: usize) -> BlockMethodShift {
    let seq = validate_compatible_sequence(vec![2]).unwrap();
    let gamma = GammaConfig::unchecked(vec![re(0.5), Complex64::new(0.0, 0.5)], ScalarField::Complex);
    build_block_method(BlockMethodParams::torus_with(seq, gamma, 1, degree)).unwrap()
}

#[test]
fn block_kernel_verdicts() {
    for p in [vec![2], vec![2, 4]] {
        let bm = block(p.clone(), 8);
        let r = block_kernel_check(&bm, BlockTruncation::default_for(&bm), DEFAULT_GAP).unwrap();
        assert_eq!(r.verdict, Verdict::TrivialKernel, "{p:?}: {}", r.ratio);
        assert!(r.ratio >= 1e-6);
    }
}

#[test]
fn degenerate_weights_leave_a_kernel() {
    let bm = degenerate(4);
    let trunc = BlockTruncation::default_for(&bm);
    let sys = block_constraint_system(&bm, trunc).unwrap();
    let r = sys.certify(DEFAULT_GAP);
    assert_eq!(r.verdict, Verdict::Nontrivial);
    assert_eq!(r.kernel_dim, 9);
    let v = r.kernel_vector.unwrap();
    // second block is i times the first, sequence and limit vanish
    let modes = 9;
    let lay = &sys.layout;
    for j in 0..modes {
        let a = v[lay.block_coeff(0, 0, 0, j)];
        let b = v[lay.block_coeff(1, 0, 0, j)];
        assert!((b - Complex64::new(0.0, 1.0) * a).norm() < 1e-9);
    }
    assert!(v[lay.limit(0)].norm() < 1e-9);
}

#[test]
fn verdict_stable_under_larger_truncation() {
    let bm = block(vec![2, 4], 6);
    let mut t = BlockTruncation::default_for(&bm);
    for extra in [0, 8, 16] {
        t.n_window += extra;
        t.k_window += extra;
        let r = block_kernel_check(&bm, t, DEFAULT_GAP).unwrap();
        assert_eq!(r.verdict, Verdict::TrivialKernel);
    }
}

#[test]
fn empty_window_is_rejected() {
    let bm = block(vec![2], 4);
    let mut t = BlockTruncation::default_for(&bm);
    t.n_window = 0;
    assert!(block_kernel_check(&bm, t, DEFAULT_GAP).is_err());
}

#[test]
fn inverse_orbit_identity_on_random_functions() {
    let bm = block(vec![2, 4], 8);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let f = random_function(bm.op.space(), &mut rng);
        for k in 0..=32 {
            for (l, r) in inverse_orbit_identity(&bm, &f, k).unwrap() {
                assert!((l - r).norm() < 1e-10, "k = {k}: {l} vs {r}");
            }
        }
    }
}

#[test]
fn finite_depth_rows_vanish_on_images() {
    let mut params = BlockMethodParams::torus(vec![2, 4], 1, 6, ScalarField::Real, 0).unwrap();
    params.sequence_len = 4;
    let bm = build_block_method(params).unwrap();
    let sys = block_constraint_system(&bm, BlockTruncation::default_for(&bm)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let g = random_function(bm.op.space(), &mut rng);
    let mut f = g.clone();
    for n in 1..=8 {
        f = bm.op.apply(&f).unwrap();
        assert!(sys.residual_at_depth(&f, n).unwrap() <= 1e-9);
    }
    // the depth-8 rows do not hold for a function only in the range of T once
    let once = bm.op.apply(&g).unwrap();
    assert!(sys.residual_at_depth(&once, 8).unwrap() > 1e-6);
}

#[test]
fn golden_arc_kernels() {
    for m in 1..=32 {
        let r = golden_arc_kernel_phi(m, DEFAULT_GAP);
        assert_eq!(r.decay.verdict, Verdict::TrivialKernel, "M = {m}");
        assert!(r.min_phase_gap > 1e-3);
    }
    let one = golden_arc_kernel_phi(1, DEFAULT_GAP);
    let direct = 2.0 * (std::f64::consts::PI * shiftlab::PHI).sin();
    assert!((one.min_phase_gap - direct).abs() < 1e-12 && (direct - 1.86406).abs() < 1e-4);
    let half = golden_arc_kernel(4, 0.5, DEFAULT_GAP);
    assert_eq!(half.decay.verdict, Verdict::Nontrivial);
    assert_eq!(half.worst_mode, 2);
}

#[test]
fn fibonacci_mechanism() {
    assert_eq!((0..8).map(fibonacci).collect::<Vec<_>>(), vec![0, 1, 1, 2, 3, 5, 8, 13]);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let alphas: Vec<f64> = (0..5).map(|i| 0.7 * i as f64).collect();
    for _ in 0..20 {
        let f = random_trig_poly(6, &mut rng);
        let r = fibonacci_recursion_check(&f, 10, &alphas, 1 << 10);
        assert!(r.golden_identity <= 1e-15);
        assert!(r.additivity_residual <= 1e-9);
        assert!(r.base_case_residual <= 1e-12);
        assert!(r.implication_holds, "{:?}", r.arc_defects);
    }
}

#[test]
fn composition_kernels() {
    let c = build_composition(CompositionParams::new(re(0.25), re(0.25), 2, 8)).unwrap();
    let r = composition_kernel_check(&c, CompositionTruncation::default_for(&c), DEFAULT_GAP).unwrap();
    assert_eq!(r.decay.verdict, Verdict::TrivialKernel, "{}", r.decay.ratio);
    assert!(r.limits_annihilated && (r.scaling_factor - 0.75).abs() < 1e-15);
    let c = build_composition(CompositionParams::new(re(0.5), re(-0.5), 1, 6)).unwrap();
    let r = composition_kernel_check(&c, CompositionTruncation::default_for(&c), DEFAULT_GAP).unwrap();
    assert!(r.equal_modulus);
    assert_eq!(r.decay.verdict, Verdict::TrivialKernel, "{}", r.decay.ratio);
}

#[test]
fn composition_rows_vanish_on_images() {
    let mut params = CompositionParams::new(re(0.25), re(0.25), 2, 8);
    params.sequence_len = 4;
    let c = build_composition(params).unwrap();
    let sys = composition_constraint_system(&c, CompositionTruncation::default_for(&c)).unwrap();
    let space: &std::sync::Arc<BlockSpace> = c.op.space();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let values: Vec<Complex64> = (0..4).map(|i| re(0.3 * i as f64 - 0.4)).collect();
    let limits: Vec<Complex64> = (0..2)
        .map(|k| {
            let z = c.chi.iterate(&c.zero, k);
            values[z.cantor.as_ref().unwrap().prefix_index(2)]
        })
        .collect();
    let _ = &mut rng;
    let g = shiftlab::funcspace::assemble_block_function(
        space,
        vec![BlockPart::Cylinders { depth: 2, values }],
        vec![re(0.1), re(-0.2)],
        limits,
    )
    .unwrap();
    let mut f = g;
    for n in 1..=3 {
        f = c.op.apply(&f).unwrap();
        assert!(sys.residual_at_depth(&f, n).unwrap() <= 1e-9, "n = {n}");
    }
}

#[test]
fn counterexamples_verify() {
    for which in Counterexample::ALL {
        let r = counterexample_suite(which).unwrap();
        assert!(r.verified, "{which:?}: {r:?}");
        assert_eq!(r.verdict, WITNESS_VERDICT);
    }
    let r = check_fixed_point(re(0.0), re(0.5)).unwrap();
    assert!(r.verified && r.residual == 0.0);
    let r = check_component_pair([1.0, 1.0, 1.0], [0.25, 0.25, 0.25]).unwrap();
    assert_eq!(r.pair, Some((1, 2)));
    assert!(r.verified);
}

#[test]
fn generator_counts() {
    for (p, expect) in [(vec![2], 1), (vec![2, 4], 2)] {
        let bm = block(p, 4);
        let cands: Vec<(usize, Fiber)> = bm
            .index
            .run(1)
            .into_iter()
            .chain(if bm.index.families() > 1 { bm.index.run(2) } else { vec![] })
            .map(|m| (bm.block_of(m), bm.families[bm.index.family(m).unwrap() - 1].base.clone()))
            .collect();
        let g = estimate_generators(&bm.op, &cands, 0.05, 100_000).unwrap();
        assert!(g.complete);
        assert_eq!((g.lower, g.upper), (expect, expect));
    }
    let c = build_composition(CompositionParams::new(re(0.25), re(0.25), 2, 8)).unwrap();
    let g = estimate_generators(&c.op, &[(0, c.one.clone())], 0.05, 100_000).unwrap();
    assert!(g.complete, "{g:?}");
    assert_eq!((g.lower, g.upper), (1, 1));
    let _ = Resolution::from_eps(0.05, 2);
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn rows_vanish_on_iterated_images(seed in any::<u64>(), n in 1usize..6) {
            let mut params = BlockMethodParams::torus(vec![2, 4], 1, 4, ScalarField::Complex, 0).unwrap();
            params.sequence_len = 4;
            let bm = build_block_method(params).unwrap();
            let sys = block_constraint_system(&bm, BlockTruncation::default_for(&bm)).unwrap();
            let g = random_function(bm.op.space(), &mut ChaCha8Rng::seed_from_u64(seed));
            let f = bm.op.apply_n(&g, n).unwrap();
            prop_assert!(sys.residual_at_depth(&f, n).unwrap() <= 1e-9);
        }

        #[test]
        fn rank_verdict_respects_the_gap(entries in prop::collection::vec(-1.0..1.0f64, 9), gap in 1e-8..1e-2f64) {
            let rows: Vec<Vec<Complex64>> = entries.chunks(3).map(|r| r.iter().map(|x| re(*x)).collect()).collect();
            let r = rank_certificate(&rows, 3, gap, Default::default());
            match r.verdict {
                Verdict::TrivialKernel => prop_assert!(r.kernel_dim == 0 && r.ratio >= gap),
                Verdict::Nontrivial => prop_assert!(r.kernel_dim > 0),
                Verdict::Inconclusive => prop_assert!(r.kernel_dim == 0 && r.ratio < gap),
            }
            prop_assert!(r.singular_values.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
