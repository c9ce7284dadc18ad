//! Builds the configured construction and runs its checks.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use shiftlab::blockmethod::{build_block_index, validate_compatible_sequence, GammaConfig};
use shiftlab::dynamics::{certify_l_transitivity, orbit_density, Resolution, TransitiveSeed};
use shiftlab::funcspace::{random_function, BlockFunction, Fiber};
use shiftlab::shiftop::*;
use shiftlab::verify::*;
use shiftlab::PHI;

use crate::config::{Construction, ExperimentConfig};
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub construction: String,
    pub verdict: String,
    pub passed: bool,
    pub metric: f64,
    pub tolerance: f64,
    pub elapsed_ms: f64,
    pub details: Value,
}

/// Two-column series written by `--emit-plots`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotSeries {
    pub name: String,
    pub columns: [&'static str; 2],
    pub rows: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Default)]
pub struct CheckOutput {
    pub verdict: String,
    pub passed: bool,
    pub metric: f64,
    pub tolerance: f64,
    pub details: Value,
    pub plots: Vec<PlotSeries>,
}

fn pass_fail(passed: bool) -> String {
    if passed { "PASS" } else { "FAIL" }.into()
}

/// `metric ≤ tolerance` check.
fn bounded(metric: f64, tolerance: f64, details: Value) -> CheckOutput {
    let passed = metric <= tolerance;
    CheckOutput { verdict: pass_fail(passed), passed, metric, tolerance, details, plots: Vec::new() }
}

type CheckFn<'a> = Box<dyn FnOnce(&mut ChaCha8Rng) -> Result<CheckOutput, CliError> + Send + 'a>;

struct Check<'a> {
    id: &'static str,
    run: CheckFn<'a>,
}

fn check<'a>(id: &'static str, run: impl FnOnce(&mut ChaCha8Rng) -> Result<CheckOutput, CliError> + Send + 'a) -> Check<'a> {
    Check { id, run: Box::new(run) }
}

fn lib(e: shiftlab::Error) -> CliError {
    CliError::Check(e.to_string())
}

fn coeff_gap(f: &BlockFunction, g: &BlockFunction) -> Result<f64, CliError> {
    let d = f.sub(g).map_err(lib)?;
    let mut m = d.head().iter().chain(d.limit_values()).map(|z| z.norm()).fold(0.0, f64::max);
    for b in 0..f.space().blocks.len() {
        m = m.max(d.table(b).coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    Ok(m)
}

fn spectrum_plot(name: &str, report: &DecayReport) -> PlotSeries {
    PlotSeries {
        name: name.into(),
        columns: ["index", "singular_value"],
        rows: report.singular_values.iter().enumerate().map(|(i, s)| (i as f64, *s)).collect(),
    }
}

fn decay_output(report: &DecayReport, extra: Value) -> CheckOutput {
    let passed = report.verdict == Verdict::TrivialKernel;
    let mut details = json!({
        "kernel_dim": report.kernel_dim,
        "rows": report.rows,
        "cols": report.cols,
        "truncation": report.truncation,
    });
    if let (Value::Object(d), Value::Object(e)) = (&mut details, extra) {
        d.extend(e);
    }
    CheckOutput {
        verdict: report.verdict.to_string(),
        passed,
        metric: report.ratio,
        tolerance: report.gap,
        details,
        plots: vec![spectrum_plot("spectrum", report)],
    }
}

/// Checks shared by every operator construction.
fn operator_checks<'a>(op: &'a ShiftOperator, cfg: &'a ExperimentConfig) -> Vec<Check<'a>> {
    let s = &cfg.checks;
    vec![
        check("isometry", move |rng| {
            let r = op.check_isometry(s.trials, s.resolution, s.isometry_tolerance, rng).map_err(lib)?;
            Ok(bounded(r.max_deviation, s.isometry_tolerance, json!({ "trials": r.trials, "resolution": r.resolution })))
        }),
        check("range_images", move |rng| {
            let mut worst: f64 = 0.0;
            for _ in 0..s.trials {
                let g = random_function(op.space(), rng);
                let tg = op.apply(&g).map_err(lib)?;
                worst = worst.max(op.range_membership(&tg).map_err(lib)?.defect.norm());
            }
            Ok(bounded(worst, s.defect_tolerance, json!({ "trials": s.trials })))
        }),
        check("range_witness", move |_| {
            let one = BlockFunction::point_indicator(op.space(), 1).map_err(lib)?;
            let defect = op.range_membership(&one).map_err(lib)?.defect.norm();
            let passed = defect >= s.witness_threshold;
            Ok(CheckOutput {
                verdict: pass_fail(passed),
                passed,
                metric: defect,
                tolerance: s.witness_threshold,
                details: json!({ "witness": "indicator of the isolated point" }),
                plots: Vec::new(),
            })
        }),
        check("round_trip", move |rng| {
            let mut worst: f64 = 0.0;
            for _ in 0..s.trials {
                let f = random_function(op.space(), rng);
                let back = op.apply_inverse(&op.apply(&f).map_err(lib)?, InverseMode::Strict).map_err(lib)?;
                worst = worst.max(coeff_gap(&back, &f)?);
            }
            Ok(bounded(worst, s.round_trip_tolerance, json!({ "trials": s.trials })))
        }),
    ]
}

fn orbit_check<'a>(seeds: Vec<TransitiveSeed>, res: Resolution, budget: u64) -> Check<'a> {
    check("orbit_density", move |_| {
        let mut plots = Vec::new();
        let mut coverage = Vec::new();
        let mut all = true;
        for (i, s) in seeds.iter().enumerate() {
            let r = orbit_density(&s.flow, &s.base, res, budget, 1);
            all &= r.certified;
            coverage.push(json!({ "coverage": r.coverage, "iterations": r.iterations_used, "probes": r.probes }));
            plots.push(PlotSeries {
                name: format!("orbit_{}", i + 1),
                columns: ["iterations", "coverage"],
                rows: r.curve.iter().map(|(j, c)| (*j as f64, *c)).collect(),
            });
        }
        let worst = coverage.iter().filter_map(|c| c["coverage"].as_f64()).fold(1.0, f64::min);
        Ok(CheckOutput {
            verdict: if all { "CERTIFIED".into() } else { "NOT_CERTIFIED".into() },
            passed: all,
            metric: worst,
            tolerance: 1.0,
            details: json!({ "budget": budget, "eps": res.eps, "depth": res.depth, "flows": coverage }),
            plots,
        })
    })
}

fn generator_check<'a>(op: &'a ShiftOperator, candidates: Vec<(usize, Fiber)>, expect: usize, eps: f64, budget: u64) -> Check<'a> {
    check("generators", move |_| {
        let g = estimate_generators(op, &candidates, eps, budget).map_err(lib)?;
        let passed = g.complete && g.lower == expect && g.upper == expect;
        Ok(CheckOutput {
            verdict: if g.lower == g.upper { format!("{}_GENERATED", g.upper) } else { format!("{}..{}", g.lower, g.upper) },
            passed,
            metric: g.upper as f64,
            tolerance: expect as f64,
            details: json!({ "lower": g.lower, "upper": g.upper, "probes": g.probes, "covered": g.covered }),
            plots: Vec::new(),
        })
    })
}

fn scalars(v: &[crate::config::ScalarInput]) -> Vec<Complex64> {
    v.iter().map(|s| s.value()).collect()
}

/// The built construction; owns everything the checks borrow.
enum Built {
    Block(BlockMethodShift),
    Composition(CompositionShift),
    Golden(GoldenShift),
    Complex(ComplexFamilyShift),
    Counterexample(Counterexample),
}

fn build(cfg: &ExperimentConfig) -> Result<Built, CliError> {
    let guard = |e: shiftlab::Error| CliError::Config(e.to_string());
    Ok(match &cfg.construction {
        Construction::BlockMethod { p, circles, degree, field, gamma, gamma_seed } => {
            let mut params = BlockMethodParams::torus(p.clone(), *circles, *degree, *field, *gamma_seed).map_err(guard)?;
            if let Some(g) = gamma {
                let seq = validate_compatible_sequence(p.clone()).map_err(guard)?;
                let gamma = GammaConfig::new(scalars(g), *field, &build_block_index(&seq)).map_err(guard)?;
                params = BlockMethodParams::torus_with(seq, gamma, *circles, *degree);
            }
            Built::Block(build_block_method(params).map_err(guard)?)
        }
        Construction::Composition { delta, period, depth, alphabet } => {
            let mut params = CompositionParams::new(delta[0].value(), delta[1].value(), *period, *depth);
            params.alphabet = *alphabet;
            Built::Composition(build_composition(params).map_err(guard)?)
        }
        Construction::CantorSet { delta, depth, alphabet, l0, m0 } => {
            let mut params = CompositionParams::new(delta[0].value(), delta[1].value(), 1, *depth);
            params.alphabet = *alphabet;
            let (dl, dm) = default_cantor_points(*depth);
            let l0 = l0.clone().unwrap_or(dl);
            let m0 = m0.clone().unwrap_or(dm);
            Built::Composition(build_cantor_set(params, &l0, &m0).map_err(guard)?)
        }
        Construction::GoldenArcModel { form, degree } => {
            Built::Golden(build_golden_arc(GoldenParams::new(*form, *degree)).map_err(guard)?)
        }
        Construction::ComplexFamily { n, degree, z } => {
            let mut params = ComplexFamilyParams::new(*n, *degree);
            if let Some(z) = z {
                params.z = scalars(z);
            }
            Built::Complex(build_complex_family(params).map_err(guard)?)
        }
        Construction::Counterexample { which } => Built::Counterexample(*which),
    })
}

fn checks_for<'a>(built: &'a Built, cfg: &'a ExperimentConfig) -> Vec<Check<'a>> {
    let s = &cfg.checks;
    match built {
        Built::Block(bm) => {
            let mut out = operator_checks(&bm.op, cfg);
            out.push(check("kernel", move |_| {
                let r = block_kernel_check(bm, BlockTruncation::default_for(bm), s.gap).map_err(lib)?;
                Ok(decay_output(&r, json!({})))
            }));
            out.push(check("orbit_identity", move |rng| {
                let k_max = 4 * 2 * bm.seq.max_p();
                let mut worst: f64 = 0.0;
                for _ in 0..s.trials.min(10) {
                    let f = random_function(bm.op.space(), rng);
                    for k in 0..=k_max {
                        for (l, r) in inverse_orbit_identity(bm, &f, k).map_err(lib)? {
                            worst = worst.max((l - r).norm());
                        }
                    }
                }
                Ok(bounded(worst, s.round_trip_tolerance, json!({ "k_max": k_max })))
            }));
            out.push(orbit_check(bm.seeds(), Resolution::angle(s.eps), s.budget));
            let candidates = (1..=bm.index.total())
                .map(|m| (bm.block_of(m), bm.families[bm.index.family(m).unwrap_or(1) - 1].base.clone()))
                .collect();
            out.push(generator_check(&bm.op, candidates, bm.index.families(), s.eps, s.budget));
            out
        }
        Built::Composition(c) => {
            let mut out = operator_checks(&c.op, cfg);
            out.push(check("kernel", move |_| {
                let r = composition_kernel_check(c, CompositionTruncation::default_for(c), s.gap).map_err(lib)?;
                let extra = json!({
                    "scaling_factor": r.scaling_factor,
                    "limits_annihilated": r.limits_annihilated,
                    "equal_modulus": r.equal_modulus,
                });
                Ok(decay_output(&r.decay, extra))
            }));
            let seed = TransitiveSeed::uncertified(c.chi.clone(), c.one.clone());
            let res = Resolution::cylinders(c.params.seed_depth);
            out.push(orbit_check(vec![seed], res, s.budget));
            out.push(generator_check(&c.op, vec![(0, c.one.clone())], 1, s.eps, s.budget));
            out
        }
        Built::Golden(g) => {
            let mut out = operator_checks(&g.op, cfg);
            let degree = g.params.degree;
            out.push(check("kernel", move |_| {
                let r = golden_arc_kernel_phi(degree, s.gap);
                let extra = json!({ "min_phase_gap": r.min_phase_gap, "worst_mode": r.worst_mode });
                Ok(decay_output(&r.decay, extra))
            }));
            out.push(check("fibonacci", move |rng| {
                let alphas: Vec<f64> = (0..8).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
                let (mut additivity, mut base, mut implication): (f64, f64, bool) = (0.0, 0.0, true);
                for _ in 0..s.trials.min(100) {
                    let f = random_trig_poly(degree.min(8), rng);
                    let r = fibonacci_recursion_check(&f, 10, &alphas, 1 << 10);
                    additivity = additivity.max(r.additivity_residual);
                    base = base.max(r.base_case_residual);
                    implication &= r.implication_holds;
                }
                let mut out = bounded(additivity, 1e-9, json!({
                    "base_case_residual": base,
                    "implication_holds": implication,
                    "golden_identity": (PHI + PHI * PHI - 1.0).abs(),
                }));
                out.passed &= implication && base <= 1e-12;
                out.verdict = pass_fail(out.passed);
                Ok(out)
            }));
            out
        }
        Built::Complex(cf) => {
            let mut out = operator_checks(&cf.op, cfg);
            out.push(orbit_check(cf.seeds.clone(), Resolution::angle(s.eps), s.budget));
            let seeds = cf.seeds.clone();
            out.push(check("l_transitivity", move |_| {
                let r = certify_l_transitivity(&seeds, &[2, 4], Resolution::angle(s.eps), s.budget, 8);
                let open = r.entries.iter().filter(|e| e.first_hit.is_none()).count();
                Ok(CheckOutput {
                    verdict: if r.passed { "CERTIFIED".into() } else { "NOT_CERTIFIED".into() },
                    passed: r.passed,
                    metric: open as f64,
                    tolerance: 0.0,
                    details: json!({ "L": [2, 4], "horizon": r.horizon, "budget": r.budget }),
                    plots: Vec::new(),
                })
            }));
            out
        }
        Built::Counterexample(which) => {
            let which = *which;
            vec![check("witness", move |_| {
                let r = counterexample_suite(which).map_err(lib)?;
                let mut details = json!({ "identity": r.identity, "witness_norm": r.witness_norm });
                if let Some((i, j)) = r.pair {
                    details["pair"] = json!([i, j]);
                }
                Ok(CheckOutput {
                    verdict: r.verdict.clone(),
                    passed: r.verified,
                    metric: r.residual,
                    tolerance: WITNESS_TOL,
                    details,
                    plots: Vec::new(),
                })
            })]
        }
    }
}

/// Finished checks with their plot data.
pub struct CheckRun {
    pub reports: Vec<CheckReport>,
    pub plots: Vec<(String, PlotSeries)>,
}

/// Runs every check of the construction. Each check draws its own RNG seed
/// from one generator seeded with `cfg.seed`, so the outcome does not
/// depend on `parallel`.
pub fn run_checks(cfg: &ExperimentConfig, parallel: bool) -> Result<CheckRun, CliError> {
    let built = build(cfg)?;
    let checks = checks_for(&built, cfg);
    let mut master = ChaCha8Rng::seed_from_u64(cfg.seed);
    let seeded: Vec<(u64, Check)> = checks.into_iter().map(|c| (master.next_u64(), c)).collect();
    let run_one = |(seed, c): (u64, Check)| {
        let start = Instant::now();
        let out = (c.run)(&mut ChaCha8Rng::seed_from_u64(seed));
        (c.id, out, start.elapsed().as_secs_f64() * 1e3)
    };
    let results: Vec<_> = if parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = seeded.into_iter().map(|item| scope.spawn(move || run_one(item))).collect();
            handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
        })
    } else {
        seeded.into_iter().map(run_one).collect()
    };
    let tag = match cfg.construction {
        Construction::Counterexample { which } => format!("COUNTEREXAMPLE:{}", which.name()),
        ref c => c.tag().to_string(),
    };
    let mut reports = Vec::new();
    let mut plots = Vec::new();
    for (id, out, ms) in results {
        let out = out?;
        for p in out.plots {
            plots.push((id.to_string(), p));
        }
        reports.push(CheckReport {
            check_id: id.into(),
            construction: tag.clone(),
            verdict: out.verdict,
            passed: out.passed,
            metric: out.metric,
            tolerance: out.tolerance,
            elapsed_ms: ms,
            details: out.details,
        });
    }
    Ok(CheckRun { reports, plots })
}

