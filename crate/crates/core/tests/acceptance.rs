//! End-to-end acceptance checks. Runs without the libtest harness so the
//! PASS/FAIL line of every criterion is always printed.

use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shiftlab::blockmethod::validate_compatible_sequence;
use shiftlab::dynamics::*;
use shiftlab::funcspace::*;
use shiftlab::shiftop::*;
use shiftlab::verify::*;
use shiftlab::{ScalarField, PHI};

const TRIALS: usize = 1000;
const RESOLUTION: usize = 1 << 12;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Per-variant statistics over the same random functions.
#[derive(Default)]
struct VariantStats {
    isometry: f64,
    image_defect: f64,
    witness_defect: f64,
    round_trip: f64,
}

fn coeff_gap(f: &BlockFunction, g: &BlockFunction) -> f64 {
    let d = f.sub(g).unwrap();
    let mut m = d.head().iter().chain(d.limit_values()).map(|z| z.norm()).fold(0.0, f64::max);
    for b in 0..f.space().blocks.len() {
        m = m.max(d.table(b).coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    m
}

fn run_variant(op: &ShiftOperator, seed: u64) -> VariantStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = VariantStats::default();
    for _ in 0..TRIALS {
        let f = random_function(op.space(), &mut rng);
        let tf = op.apply(&f).unwrap();
        s.isometry = s.isometry.max((sup_norm(&tf, RESOLUTION) - sup_norm(&f, RESOLUTION)).abs());
        s.image_defect = s.image_defect.max(op.range_membership(&tf).unwrap().defect.norm());
        let back = op.apply_inverse(&tf, InverseMode::Strict).unwrap();
        s.round_trip = s.round_trip.max(coeff_gap(&back, &f));
    }
    let one = BlockFunction::point_indicator(op.space(), 1).unwrap();
    s.witness_defect = op.range_membership(&one).unwrap().defect.norm();
    s
}

fn variant_suite() -> (Vec<(&'static str, VariantStats)>, f64) {
    let start = Instant::now();
    let variants = standard_variants(1).unwrap();
    let stats = std::thread::scope(|scope| {
        let handles: Vec<_> = variants
            .iter()
            .enumerate()
            .map(|(i, (name, op))| scope.spawn(move || (*name, run_variant(op, 100 + i as u64))))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    (stats, start.elapsed().as_secs_f64())
}

fn criterion_1(stats: &[(&str, VariantStats)], secs: f64) -> Outcome {
    let worst = stats.iter().map(|(_, s)| s.isometry).fold(0.0, f64::max);
    let names: Vec<&str> = stats.iter().map(|(n, _)| *n).collect();
    outcome(
        stats.len() == 5 && worst <= 1e-9 && secs <= 60.0,
        format!("{} variants {:?}, {TRIALS} functions each, max |‖Tf‖−‖f‖| = {worst:.2e}, {secs:.1} s", stats.len(), names),
    )
}

fn criterion_2(stats: &[(&str, VariantStats)]) -> Outcome {
    let image = stats.iter().map(|(_, s)| s.image_defect).fold(0.0, f64::max);
    let witness = stats.iter().map(|(_, s)| s.witness_defect).fold(f64::INFINITY, f64::min);
    outcome(
        image <= 1e-12 && witness >= 1e-3,
        format!("max defect on images {image:.2e}, min defect of the indicator of 1 {witness:.3}"),
    )
}

fn criterion_3() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for p in [vec![2], vec![2, 4]] {
        let bm = build_block_method(BlockMethodParams::torus(p.clone(), 1, 8, ScalarField::Real, 0).unwrap()).unwrap();
        let r = block_kernel_check(&bm, BlockTruncation::default_for(&bm), DEFAULT_GAP).unwrap();
        pass &= r.verdict == Verdict::TrivialKernel && r.ratio >= DEFAULT_GAP;
        lines.push(format!("p={p:?} {} (ratio {:.2e})", r.verdict, r.ratio));
    }
    let seq = validate_compatible_sequence(vec![2]).unwrap();
    let gamma = shiftlab::blockmethod::GammaConfig::unchecked(vec![re(0.5), Complex64::new(0.0, 0.5)], ScalarField::Complex);
    let bm = build_block_method(BlockMethodParams::torus_with(seq, gamma, 1, 8)).unwrap();
    let r = block_kernel_check(&bm, BlockTruncation::default_for(&bm), DEFAULT_GAP).unwrap();
    pass &= r.verdict == Verdict::Nontrivial && r.kernel_vector.is_some();
    lines.push(format!("degenerate γ {} (kernel dim {})", r.verdict, r.kernel_dim));
    outcome(pass, lines.join("; "))
}

fn criterion_4() -> Outcome {
    let mut pass = true;
    let mut min_gap = f64::INFINITY;
    for m in 1..=32 {
        let r = golden_arc_kernel_phi(m, DEFAULT_GAP);
        pass &= r.decay.verdict == Verdict::TrivialKernel;
        min_gap = min_gap.min(r.min_phase_gap);
    }
    pass &= min_gap > 1e-3;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let alphas: Vec<f64> = (0..7).map(|i| 0.9 * i as f64).collect();
    let mut additivity: f64 = 0.0;
    let mut base: f64 = 0.0;
    let mut implication = true;
    for _ in 0..100 {
        let f = random_trig_poly(8, &mut rng);
        let r = fibonacci_recursion_check(&f, 10, &alphas, 1 << 10);
        additivity = additivity.max(r.additivity_residual);
        base = base.max(r.base_case_residual);
        implication &= r.implication_holds;
    }
    let identity = (PHI + PHI * PHI - 1.0).abs();
    pass &= additivity <= 1e-9 && identity <= 1e-15 && base <= 1e-12 && implication;
    outcome(
        pass,
        format!(
            "M ≤ 32 trivial, min phase gap {min_gap:.4}; additivity {additivity:.2e} on 100 polys; |Φ+Φ²−1| = {identity:.1e}"
        ),
    )
}

fn criterion_5() -> Outcome {
    let c = build_composition(CompositionParams::new(re(0.25), re(0.25), 2, 8)).unwrap();
    let r = composition_kernel_check(&c, CompositionTruncation::default_for(&c), DEFAULT_GAP).unwrap();
    outcome(
        r.decay.verdict == Verdict::TrivialKernel && r.limits_annihilated,
        format!(
            "{} (ratio {:.2e}), scaling factor 1−(δ₁+δ₂)^N = {}, limits annihilated: {}",
            r.decay.verdict, r.decay.ratio, r.scaling_factor, r.limits_annihilated
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    for which in [Counterexample::FixedPoint, Counterexample::ComponentPair, Counterexample::Parity] {
        let r = counterexample_suite(which).unwrap();
        pass &= r.verified && r.residual <= 1e-12 && r.verdict == WITNESS_VERDICT;
        if which == Counterexample::ComponentPair {
            pass &= r.pair.is_some();
        }
        let pair = r.pair.map(|(i, j)| format!(" pair ({i},{j})")).unwrap_or_default();
        lines.push(format!("{} {}: {:.1e}{pair}, {}", which.name(), r.identity, r.residual, r.verdict));
    }
    outcome(pass, lines.join("; "))
}

fn criterion_7() -> Outcome {
    let golden = make_rotation_flow(&[PHI]).unwrap();
    let orbit = orbit_density(&golden, &Fiber::angles(vec![0.0]), Resolution::angle(0.01), 10_000, 1);
    let (_, seed) = make_bilateral_shift(2, 6, 1 << 24).unwrap();
    let family: Vec<TransitiveSeed> = default_phases(2)
        .into_iter()
        .map(|p| TransitiveSeed::uncertified(make_rotation_flow(&[p]).unwrap(), Fiber::angles(vec![0.0])))
        .collect();
    let lt = certify_l_transitivity(&family, &[2, 4], Resolution::angle(0.05), 100_000, 8);
    let parity = parity_fixture(2).unwrap();
    let spec = &parity.families[0];
    let swapped = TransitiveSeed::uncertified(spec.flow.clone(), spec.base.clone());
    let blocked = certify_l_transitivity(&[swapped], &[2], Resolution::angle(0.05), 100_000, 1);
    outcome(
        orbit.certified && seed.certified && lt.passed && !blocked.passed,
        format!(
            "Φ-rotation covered after {} steps; bilateral seed covers depth-6 cylinders in {} steps; L={{2,4}} passed: {}; parity fixture passed: {}",
            orbit.iterations_used, seed.budget, lt.passed, blocked.passed
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    for (p, expect) in [(vec![2], 1), (vec![2, 4], 2)] {
        let bm = build_block_method(BlockMethodParams::torus(p.clone(), 1, 4, ScalarField::Real, 0).unwrap()).unwrap();
        let cands: Vec<(usize, Fiber)> = (1..=bm.index.families())
            .flat_map(|n| bm.index.run(n))
            .map(|m| (bm.block_of(m), bm.families[bm.index.family(m).unwrap() - 1].base.clone()))
            .collect();
        let g = estimate_generators(&bm.op, &cands, 0.05, 100_000).unwrap();
        pass &= g.complete && g.lower == expect && g.upper == expect;
        lines.push(format!("p={p:?}: {}..={}", g.lower, g.upper));
    }
    outcome(pass, lines.join("; "))
}

fn criterion_9(stats: &[(&str, VariantStats)]) -> Outcome {
    let round_trip = stats.iter().map(|(_, s)| s.round_trip).fold(0.0, f64::max);
    let bm = build_block_method(BlockMethodParams::torus(vec![2, 4], 1, 8, ScalarField::Real, 0).unwrap()).unwrap();
    let k_max = 4 * 2 * bm.seq.max_p();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let f = random_function(bm.op.space(), &mut rng);
        for k in 0..=k_max {
            for (l, r) in inverse_orbit_identity(&bm, &f, k).unwrap() {
                worst = worst.max((l - r).norm());
            }
        }
    }
    outcome(
        round_trip <= 1e-10 && worst <= 1e-10,
        format!("max round-trip error {round_trip:.2e}; inverse-orbit identity for k ≤ {k_max}: {worst:.2e}"),
    )
}

fn main() {
    let (stats, secs) = variant_suite();
    let results = [
        ("isometry", criterion_1(&stats, secs)),
        ("codimension one", criterion_2(&stats)),
        ("block-method kernel", criterion_3()),
        ("golden arc", criterion_4()),
        ("composition kernel", criterion_5()),
        ("counterexamples", criterion_6()),
        ("transitivity", criterion_7()),
        ("generators", criterion_8()),
        ("inverse and orbit identity", criterion_9(&stats)),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        println!("{} {} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
