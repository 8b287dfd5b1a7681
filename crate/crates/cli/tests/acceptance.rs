//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Expected values are closed forms of the constructed curves.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use helixlab_cli::cmd_verify;
use helixlab_core::corpus::{builtin_corpus, CorpusEntry, CorpusRun, CorpusSource, ORDER_CHECK_STEPS};
use helixlab_core::sampled::curvature_round_trip_error;
use helixlab_core::synthesis::{negative_family, slant_family, NegativeKind, SlantParams};
use helixlab_core::{
    analyze, analyze_sampled, integrate_frenet, Analysis, Config, CurvatureSpec, CurveSpec, MetricSignature,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, summary: String) -> Outcome {
    Outcome {
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            summary
        } else {
            failures.join("; ")
        },
    }
}

fn require(failures: &mut Vec<String>, ok: bool, what: impl FnOnce() -> String) {
    if !ok {
        failures.push(what());
    }
}

fn max_abs<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    xs.into_iter().map(f64::abs).fold(0.0, f64::max)
}

fn synthesize(spec: &CurvatureSpec, cfg: &Config) -> helixlab_core::Result<Analysis> {
    let curve = integrate_frenet(spec, &spec.initial_frame()?, cfg)?;
    analyze_sampled(&curve, cfg)
}

fn circular_helix(runtime_limit: Duration) -> Outcome {
    let cfg = Config::default();
    let start = Instant::now();
    let spec = CurveSpec::new(
        MetricSignature::euclidean(3).unwrap(),
        &["2*cos(s/sqrt(5))", "2*sin(s/sqrt(5))", "s/sqrt(5)"],
        (0.0, 4.0 * PI),
        400,
    )
    .unwrap();
    let a = match analyze(&spec, &cfg) {
        Ok(a) => a,
        Err(e) => return outcome(vec![e.to_string()], String::new()),
    };
    let elapsed = start.elapsed();
    let r = &a.report;
    let p = &a.series.profiles;
    let k1 = max_abs(p.iter().map(|p| p.curvatures[0].value() - 0.4));
    let k2 = max_abs(p.iter().map(|p| p.curvatures[1].value() - 0.2));
    let h1 = max_abs(p.iter().map(|p| p.value(1) - 0.5));
    let lemma = max_abs(p.iter().map(|p| p.lemma_sum() - 0.25));
    let want = [0.0, 0.0, 5f64.sqrt() / 2.0];
    let axis = max_abs(
        r.axis
            .iter()
            .flat_map(|x| x.iter().zip(want).map(|(a, b)| a - b).collect::<Vec<_>>()),
    );

    let mut f = Vec::new();
    require(&mut f, r.samples == 400, || format!("{} samples", r.samples));
    require(&mut f, k1 < 1e-10, || format!("k_1 error {k1:e}"));
    require(&mut f, k2 < 1e-10, || format!("k_2 error {k2:e}"));
    require(&mut f, h1 < 1e-10, || format!("H*_1 error {h1:e}"));
    require(&mut f, lemma < 1e-10, || format!("lemma sum error {lemma:e}"));
    require(&mut f, r.lemma_sum_stats.relative_variation < 1e-10, || {
        format!("lemma sum variation {:e}", r.lemma_sum_stats.relative_variation)
    });
    require(&mut f, r.verdict_theorem && r.verdict_corollary, || {
        format!("verdicts {:?}", r.reasons)
    });
    require(&mut f, axis < 1e-9, || format!("axis error {axis:e}"));
    require(&mut f, r.axis_parallel_residual < 1e-8, || {
        format!("axis parallel residual {:e}", r.axis_parallel_residual)
    });
    require(&mut f, elapsed < runtime_limit, || format!("runtime {elapsed:?}"));
    outcome(
        f,
        format!(
            "k err {:.1e}/{:.1e}, H*_1 err {h1:.1e}, lemma var {:.1e}, axis err {axis:.1e}, parallel {:.1e}, {elapsed:.2?}",
            k1, k2, r.lemma_sum_stats.relative_variation, r.axis_parallel_residual
        ),
    )
}

fn sine_family(runtime_limit: Duration) -> Outcome {
    let cfg = Config::default();
    let start = Instant::now();
    let spec = slant_family(4, &SlantParams::default()).unwrap();
    let a = match synthesize(&spec, &cfg) {
        Ok(a) => a,
        Err(e) => return outcome(vec![e.to_string()], String::new()),
    };
    let elapsed = start.elapsed();
    let r = &a.report;
    let amp = 0.8;
    let grid = &a.series.grid;
    let p = &a.series.profiles;
    let h1 = max_abs(grid.iter().zip(p).map(|(s, p)| p.value(1) - amp * s.sin()));
    let h2 = max_abs(grid.iter().zip(p).map(|(s, p)| p.value(2) + amp * s.cos()));
    let lemma = max_abs(p.iter().map(|p| p.lemma_sum() - amp * amp));
    let inner = r.prop31_residuals.iter().copied().fold(r.vn1_residual, f64::max);

    let mut f = Vec::new();
    require(
        &mut f,
        (spec.domain().0 - 0.2).abs() < 1e-15 && (spec.domain().1 - (PI - 0.2)).abs() < 1e-15,
        || format!("domain {:?}", spec.domain()),
    );
    require(&mut f, h1 < 1e-6, || format!("H*_1 error {h1:e}"));
    require(&mut f, h2 < 1e-6, || format!("H*_2 error {h2:e}"));
    require(&mut f, lemma < 1e-6, || format!("lemma sum error {lemma:e}"));
    require(&mut f, r.verdict_theorem && r.verdict_corollary, || {
        format!("verdicts {:?}", r.reasons)
    });
    require(&mut f, r.axis_parallel_residual < 1e-6, || {
        format!("axis parallel residual {:e}", r.axis_parallel_residual)
    });
    require(&mut f, inner < 1e-6, || {
        format!("axis inner-product residual {inner:e}")
    });
    require(&mut f, r.axis_norm_residual < 1e-6, || {
        format!("axis norm residual {:e}", r.axis_norm_residual)
    });
    require(&mut f, elapsed < runtime_limit, || format!("runtime {elapsed:?}"));
    outcome(
        f,
        format!(
            "H* err {h1:.1e}/{h2:.1e}, lemma err {lemma:.1e}, parallel {:.1e}, inner {inner:.1e}, norm {:.1e}, {elapsed:.2?}",
            r.axis_parallel_residual, r.axis_norm_residual
        ),
    )
}

fn negative_controls() -> Outcome {
    let cfg = Config::default();
    let mut f = Vec::new();
    let ratio = synthesize(&negative_family(3, NegativeKind::RatioLinear).unwrap(), &cfg);
    let w = synthesize(&negative_family(4, NegativeKind::WCurve).unwrap(), &cfg);
    let (ratio, w) = match (ratio, w) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return outcome(vec![e.to_string()], String::new()),
    };
    for (name, a) in [("ratio_linear", &ratio), ("w_curve", &w)] {
        let r = &a.report;
        require(&mut f, !r.verdict_theorem && !r.verdict_corollary, || {
            format!("{name}: verdicts {} / {}", r.verdict_theorem, r.verdict_corollary)
        });
    }
    let variation = ratio.report.lemma_sum_stats.relative_variation;
    let h2 = max_abs(w.series.profiles.iter().map(|p| p.value(2)));
    require(&mut f, variation > 0.1, || {
        format!("ratio_linear lemma variation {variation:e}")
    });
    require(&mut f, h2 < 1e-9, || format!("w_curve max |H*_2| {h2:e}"));
    outcome(
        f,
        format!("ratio_linear lemma variation {variation:.3}, w_curve max |H*_2| {h2:.1e}"),
    )
}

struct CorpusResult {
    entry: CorpusEntry,
    run: helixlab_core::Result<CorpusRun>,
    elapsed: Duration,
}

fn run_corpus(cfg: &Config) -> Vec<CorpusResult> {
    builtin_corpus()
        .into_iter()
        .map(|entry| {
            let start = Instant::now();
            let run = entry.run(cfg);
            CorpusResult {
                elapsed: start.elapsed(),
                entry,
                run,
            }
        })
        .collect()
}

fn equivalence_sweep(corpus: &[CorpusResult]) -> Outcome {
    let mut f = Vec::new();
    let positives = corpus.iter().filter(|c| c.entry.expect_helix).count();
    let negatives = corpus.len() - positives;
    require(&mut f, positives >= 6 && negatives >= 4, || {
        format!("{positives} positive, {negatives} negative instances")
    });
    let minkowski = MetricSignature::minkowski(3).unwrap();
    let has_minkowski = corpus.iter().any(|c| {
        c.entry.expect_helix && c.entry.metric() == &minkowski && matches!(c.entry.source, CorpusSource::Curve(_))
    });
    require(&mut f, has_minkowski, || "no closed-form diag(-1,1,1) helix".into());
    for c in corpus {
        match &c.run {
            Ok(run) => {
                let r = &run.analysis.report;
                require(&mut f, r.verdict_theorem == r.verdict_corollary, || {
                    format!("{}: detectors disagree ({:?})", c.entry.name, r.reasons)
                });
                require(&mut f, r.verdict_theorem == c.entry.expect_helix, || {
                    format!(
                        "{}: verdict {} expected {}",
                        c.entry.name, r.verdict_theorem, c.entry.expect_helix
                    )
                });
            }
            Err(e) => f.push(format!("{}: {e}", c.entry.name)),
        }
    }
    outcome(
        f,
        format!("{positives} positive and {negatives} negative instances, detectors agree on all"),
    )
}

fn unconditional_identities(corpus: &[CorpusResult]) -> Outcome {
    let mut f = Vec::new();
    let (mut recursion, mut frame) = (0.0f64, 0.0f64);
    for c in corpus {
        let Ok(run) = &c.run else {
            f.push(format!("{}: failed to run", c.entry.name));
            continue;
        };
        let d = &run.analysis.report.diagnostics;
        recursion = recursion.max(d.recursion_residual);
        frame = frame.max(d.frame_defect);
        require(&mut f, d.recursion_residual < 1e-8, || {
            format!("{}: recursion residual {:e}", c.entry.name, d.recursion_residual)
        });
        require(&mut f, d.frame_defect < 1e-9, || {
            format!("{}: frame defect {:e}", c.entry.name, d.frame_defect)
        });
    }
    outcome(
        f,
        format!("max recursion residual {recursion:.1e}, max frame defect {frame:.1e}"),
    )
}

fn synthesis_round_trip(corpus: &[CorpusResult], runtime_limit: Duration) -> Outcome {
    let mut f = Vec::new();
    let cfg = Config::default();
    let (mut worst, mut min_ratio, mut slowest, mut count) = (0.0f64, f64::INFINITY, Duration::ZERO, 0);
    for c in corpus {
        let CorpusSource::Synthesized(spec) = &c.entry.source else {
            continue;
        };
        count += 1;
        let Ok(run) = &c.run else {
            f.push(format!("{}: failed to run", c.entry.name));
            continue;
        };
        let s = run.synthesis.expect("synthesized entry");
        require(&mut f, (spec.step() - 1e-3).abs() < 1e-15, || {
            format!("{}: step {}", c.entry.name, spec.step())
        });
        // independent recomputation of the round trip at the stated step
        let err = curvature_round_trip_error(spec, &run.analysis.series).unwrap_or(f64::INFINITY);
        let ratio = s.order_check_errors[0] / s.order_check_errors[1];
        worst = worst.max(err);
        min_ratio = min_ratio.min(ratio);
        slowest = slowest.max(c.elapsed);
        require(&mut f, err < 1e-5, || {
            format!("{}: round-trip error {err:e}", c.entry.name)
        });
        require(&mut f, ratio >= 8.0, || {
            format!(
                "{}: error ratio {ratio:.2} between h = {} and {}",
                c.entry.name, ORDER_CHECK_STEPS.0, ORDER_CHECK_STEPS.1
            )
        });
        require(&mut f, c.elapsed < runtime_limit, || {
            format!("{}: runtime {:?}", c.entry.name, c.elapsed)
        });
    }
    // the halving check at h = 1e-3 itself, reported for reference
    let helix = slant_family(3, &SlantParams::default()).unwrap();
    let fine = |h: f64| -> f64 {
        let spec = helix.clone().with_step(h).unwrap();
        synthesize(&spec, &cfg)
            .and_then(|a| curvature_round_trip_error(&spec, &a.series))
            .unwrap_or(f64::NAN)
    };
    let (e1, e2) = (fine(1e-3), fine(5e-4));
    outcome(
        f,
        format!(
            "{count} instances, max error {worst:.1e} at h = 1e-3, min error ratio {min_ratio:.1} halving h = {} -> {} \
             (h = 1e-3 -> 5e-4 on the helix: {e1:.1e} -> {e2:.1e}, roundoff floor), slowest {slowest:.2?}",
            ORDER_CHECK_STEPS.0, ORDER_CHECK_STEPS.1
        ),
    )
}

fn jet_correctness(corpus: &[CorpusResult]) -> Outcome {
    let mut f = Vec::new();
    let mut worst = 0.0f64;
    for c in corpus {
        let Ok(run) = &c.run else {
            f.push(format!("{}: failed to run", c.entry.name));
            continue;
        };
        let d = &run.analysis.report.diagnostics;
        worst = worst.max(d.jet_fd_residual);
        require(&mut f, d.jet_fd_residual < 1e-6, || {
            format!(
                "{}: jet vs difference {:e} (h = {})",
                c.entry.name, d.jet_fd_residual, d.fd_step
            )
        });
    }
    outcome(f, format!("max |H*' - central difference| {worst:.1e}"))
}

fn determinism() -> Outcome {
    let cfg = Config::default();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut f = Vec::new();
    for dir in [a.path(), b.path()] {
        if let Err(e) = cmd_verify(&cfg, Some(dir)) {
            f.push(e.to_string());
        }
    }
    let x = std::fs::read(a.path().join("verify.json")).unwrap_or_default();
    let y = std::fs::read(b.path().join("verify.json")).unwrap_or_default();
    require(&mut f, !x.is_empty() && x == y, || {
        "verify.json differs between runs".into()
    });
    outcome(f, format!("verify.json identical across two runs ({} bytes)", x.len()))
}

fn main() {
    let cfg = Config::default();
    let start = Instant::now();
    let corpus = run_corpus(&cfg);
    println!("corpus of {} instances run in {:.2?}", corpus.len(), start.elapsed());

    let results = [
        ("1 circular helix ground truth", circular_helix(Duration::from_secs(1))),
        ("2 sine family", sine_family(Duration::from_secs(5))),
        ("3 negative controls", negative_controls()),
        ("4 detector equivalence sweep", equivalence_sweep(&corpus)),
        ("5 unconditional identities", unconditional_identities(&corpus)),
        (
            "6 synthesis round trip",
            synthesis_round_trip(&corpus, Duration::from_secs(10)),
        ),
        ("7 jet correctness", jet_correctness(&corpus)),
        ("8 determinism", determinism()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!(
            "{} criterion {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
