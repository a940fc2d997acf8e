//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.

use std::f64::consts::LN_2;
use std::time::Instant;

use besov_tree::boundary_space::BoundaryFn;
use besov_tree::experiments::{emit_report, run_suite, ExperimentConfig, Suite, SuiteResult};
use besov_tree::extension_ops::whitney_extend;
use besov_tree::families::sample_case;
use besov_tree::io::{read_boundary, read_tree, write_boundary, write_tree};
use besov_tree::measures::weight_integral;
use besov_tree::tree_functions::trace;
use besov_tree::SpaceParams;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn params(beta: f64, lambda: f64, p: f64, depth: usize) -> SpaceParams {
    SpaceParams::new(2, LN_2, beta, lambda, p, depth).unwrap()
}

fn suite(s: Suite, p: SpaceParams, seed: u64, samples: usize) -> SuiteResult {
    let mut cfg = ExperimentConfig::new(s, p);
    cfg.seed = seed;
    cfg.samples = samples;
    run_suite(&cfg).unwrap()
}

fn failed_checks(r: &SuiteResult) -> String {
    let bad: Vec<String> = r
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{}={} vs {}", c.name, c.value, c.threshold))
        .collect();
    if bad.is_empty() {
        String::new()
    } else {
        format!(" failing: {}", bad.join(", "))
    }
}

fn check_value(r: &SuiteResult, name: &str) -> (bool, f64) {
    let c = r.check(name).unwrap_or_else(|| panic!("missing check {name}"));
    (c.pass, c.value)
}

fn round_trip() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let (_, f) = sample_case(101, case, 2, 12, 12).unwrap();
        let u = whitney_extend(&f, &params(2.0 * LN_2, 0.0, 1.0, 12));
        let t = trace(&u);
        for (a, b) in t.values().iter().zip(f.values()) {
            worst = worst.max((a - b).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-12 && secs < 10.0,
        format!("200 functions at N=12, max error {worst:e}, {secs:.2}s"),
    )
}

fn exam_identities() -> Outcome {
    let r = suite(Suite::ExamStrict, params(2.0 * LN_2, 1.0, 1.0, 16), 7, 1);
    // H_16 = 2436559/720720
    let h16 = 2436559.0 / 720720.0;
    let b1 = r.summary_value("b1_energy").unwrap();
    let names = [
        "level_identity_error",
        "b1_energy_error",
        "b1_growth_margin",
        "block_cauchy_schwarz_excess",
        "alpha_term_excess",
        "alpha_energy",
    ];
    let all = names.iter().all(|n| check_value(&r, n).0);
    let ok = all && (b1 - h16).abs() <= 1e-9;
    outcome(
        ok,
        format!(
            "B1 energy {b1} vs H_16 {h16}, level error {:e}, alpha energy {}{}",
            check_value(&r, "level_identity_error").1,
            r.summary_value("alpha_energy").unwrap(),
            failed_checks(&r)
        ),
    )
}

fn block_inequality() -> Outcome {
    let r = suite(Suite::ExamStrict, params(2.0 * LN_2, 1.0, 1.0, 16), 8, 200);
    let (ok, v) = check_value(&r, "block_inequality_violation");
    outcome(
        ok && r.rows.len() == 200,
        format!("200 functions, largest left-minus-right {v:e}"),
    )
}

fn energy_comparability() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (beta, p) in [(2.0 * LN_2, 1.0), (1.5 * LN_2, 2.0)] {
        for lambda in [0.0, 1.0] {
            let r = suite(Suite::TraceExt, params(beta, lambda, p, 12), 11, 200);
            ok &= r.passed();
            parts.push(format!(
                "p={p} lambda={lambda}: C*={:.4} drift={:.4}{}",
                check_value(&r, "energy_ratio_constant").1,
                check_value(&r, "energy_ratio_stability").1,
                failed_checks(&r)
            ));
        }
    }
    outcome(ok, parts.join("; "))
}

fn norm_equivalence() -> Outcome {
    let mut ok = true;
    let mut worst_c: f64 = 0.0;
    let mut worst_drift: f64 = 0.0;
    let mut notes = String::new();
    for theta in [0.3, 0.5, 0.7] {
        for p in [1.0, 2.0] {
            // depth 12 compares with 10, depth 10 with 8
            for depth in [12, 10] {
                let pr = params(2.0 * LN_2, 0.0, p, depth).with_theta(theta).unwrap();
                let r = suite(Suite::NormEquiv, pr, 12, 100);
                ok &= r.passed();
                worst_c = worst_c.max(check_value(&r, "energy_ratio_constant").1);
                worst_drift = worst_drift.max(check_value(&r, "energy_ratio_stability").1);
                notes.push_str(&failed_checks(&r));
            }
        }
    }
    outcome(ok, format!("largest C*={worst_c:.4}, largest drift={worst_drift:.4}{notes}"))
}

fn doubling_ahlfors() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for lambda in [0.0, 1.0] {
        let r = suite(Suite::Doubling, params(2.0 * LN_2, lambda, 1.0, 12), 0, 500);
        ok &= r.passed() && r.rows.len() >= 500;
        notes.push(format!(
            "lambda={lambda}: D={:.4} (prev {:.4}){}",
            r.summary_value("doubling_max").unwrap(),
            r.summary_value("doubling_prev_max").unwrap(),
            failed_checks(&r)
        ));
    }
    let r = suite(Suite::Ahlfors, params(2.0 * LN_2, 0.0, 1.0, 12), 0, 500);
    ok &= r.passed() && r.check("q").map(|c| c.pass).unwrap_or(false);
    notes.push(format!(
        "Q={} ratios in [{:.4}, {:.4}]{}",
        r.summary_value("q").unwrap(),
        r.summary_value("ahlfors_min").unwrap(),
        r.summary_value("ahlfors_max").unwrap(),
        failed_checks(&r)
    ));
    outcome(ok, notes.join("; "))
}

fn log_divergence() -> Outcome {
    let beta = LN_2 + 2.0 * LN_2;
    let r = suite(Suite::LogExample, params(beta, 0.75, 2.0, 12), 0, 0);
    outcome(
        r.passed(),
        format!(
            "tail {:.4} vs 1.2 x {:.4}, trace {:.4}{}",
            r.summary_value("gradient_tail").unwrap(),
            r.summary_value("zeta_tail").unwrap(),
            r.summary_value("trace_value").unwrap(),
            failed_checks(&r)
        ),
    )
}

fn layered_extension() -> Outcome {
    let r = suite(Suite::Borderline, params(2.0 * LN_2, 0.0, 1.0, 16), 13, 100);
    outcome(
        r.passed() && r.rows.len() == 100,
        format!(
            "ratio in [{:.4}, {:.4}], nonlinearity gap {:.4}{}",
            r.summary_value("extension_ratio_min").unwrap(),
            r.summary_value("extension_ratio_max").unwrap(),
            check_value(&r, "nonlinearity_gap").1,
            failed_checks(&r)
        ),
    )
}

fn alpha_extension() -> Outcome {
    let r = suite(Suite::Alpha, params(2.0 * LN_2, 1.0, 1.0, 12), 14, 100);
    outcome(
        r.passed(),
        format!(
            "C*={:.4} drift={:.4}, 2^n vs 3^n constant {:.4}{}",
            check_value(&r, "extension_ratio_constant").1,
            check_value(&r, "extension_ratio_stability").1,
            check_value(&r, "alpha_energy_constant").1,
            failed_checks(&r)
        ),
    )
}

fn infrastructure() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(Suite::TraceExt, params(2.0 * LN_2, 1.0, 1.0, 10));
    cfg.seed = 42;
    cfg.samples = 50;
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    emit_report(&run_suite(&cfg).unwrap(), &a).unwrap();
    emit_report(&run_suite(&cfg).unwrap(), &b).unwrap();
    let identical = std::fs::read(&a).unwrap() == std::fs::read(&b).unwrap();

    let mut lossless = true;
    for case in 0..10 {
        let (_, f) = sample_case(5, case, 2, 10, 10).unwrap();
        let fp = dir.path().join("f.txt");
        write_boundary(&fp, &f).unwrap();
        let back: BoundaryFn = read_boundary(&fp).unwrap();
        lossless &= back == f;
        let u = whitney_extend(&f, &cfg.params);
        let up = dir.path().join("u.txt");
        write_tree(&up, &u).unwrap();
        lossless &= read_tree(&up).unwrap() == u;
    }

    let mut worst: f64 = 0.0;
    for beta in [1.0, 2.0 * LN_2, 3.0] {
        let pr = params(beta, 0.0, 1.0, 4);
        for (lo, hi) in [(0.0, 1.0), (2.5, 7.0), (0.0, 40.0), (3.0, f64::INFINITY)] {
            let got = weight_integral(lo, hi, &pr).unwrap();
            let want = ((-beta * lo).exp() - (-beta * hi).exp()) / beta;
            worst = worst.max(((got - want) / want).abs());
        }
    }
    outcome(
        identical && lossless && worst <= 1e-12,
        format!("byte-identical reruns {identical}, lossless files {lossless}, quadrature rel error {worst:e}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("round-trip exactness", round_trip),
        ("sign-series identities", exam_identities),
        ("block inequality", block_inequality),
        ("extension energy comparability", energy_comparability),
        ("double-integral comparability", norm_equivalence),
        ("doubling and Ahlfors regularity", doubling_ahlfors),
        ("logarithmic example", log_divergence),
        ("layered extension", layered_extension),
        ("alpha extension", alpha_extension),
        ("infrastructure", infrastructure),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        if !o.pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {}: {} ({:.1}s) {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            name,
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
