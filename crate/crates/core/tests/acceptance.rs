use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::Zero;

use wills_core::arrangement::{c_relation, catalog, del_contr_residual};
use wills_core::concentration::{
    levy_csv, levy_demo, samples_csv, theorem_main_experiment, uniform_csv,
    uniform_matroid_experiment, ExperimentConfig, MainReport, Thresholds,
};
use wills_core::convexbody::{
    default_grid, estimate_intrinsic_volumes_mc, kappa, Discotope, Disk, WillsPoly, Zonotope,
};
use wills_core::exactnum::{is_log_concave, is_log_concave_f64, Poly};
use wills_core::extensions::{flex_limit_probe, verify_large_product, verify_semiflexible};
use wills_core::limits::Limits;
use wills_core::matroid::{self, Matroid};

struct Line {
    id: usize,
    name: &'static str,
    pass: bool,
    elapsed: Duration,
    limit: Option<Duration>,
    detail: String,
}

struct Run {
    limits: Limits,
    thresholds: Thresholds,
    /// Wills sequences produced along the way, for the log-concavity suite.
    wills: Vec<(String, Vec<f64>)>,
    lines: Vec<Line>,
}

impl Run {
    fn check(
        &mut self,
        id: usize,
        name: &'static str,
        limit: Option<u64>,
        f: impl FnOnce(&mut Self) -> (bool, String),
    ) {
        let t = Instant::now();
        let (ok, detail) = f(self);
        let elapsed = t.elapsed();
        let limit = limit.map(Duration::from_secs);
        let pass = ok && limit.is_none_or(|l| elapsed < l);
        self.lines.push(Line {
            id,
            name,
            pass,
            elapsed,
            limit,
            detail,
        });
    }

    fn record(&mut self, label: String, w: &WillsPoly) {
        self.wills.push((label, w.nu.clone()));
    }
}

fn binomial_power(d: usize) -> Poly {
    Poly::from_ints(&[1, 1]).pow(d as u32)
}

fn cube_identity(run: &mut Run) -> (bool, String) {
    let mut bad = Vec::new();
    for d in 1..=8 {
        let psi = catalog::coordinate(d)
            .psi(&run.limits)
            .expect("coordinate psi");
        let w = Zonotope::cube(d).intrinsic_volumes();
        let wills = w.wills_exact().expect("exact cube volumes");
        if psi != binomial_power(d) || wills != binomial_power(d) {
            bad.push(d);
        }
        run.record(format!("cube {d}"), &w);
    }
    (bad.is_empty(), format!("d = 1..8, mismatches {bad:?}"))
}

fn del_contr(run: &mut Run) -> (bool, String) {
    let mut arrs = Vec::new();
    for d in 1..=6 {
        arrs.push((format!("coordinate({d})"), catalog::coordinate(d)));
    }
    for d in 1..=4 {
        for n in 1..=6 {
            arrs.push((format!("generic({n},{d})"), catalog::generic(n, d)));
        }
    }
    arrs.push(("braid(4)".into(), catalog::braid(4)));
    let mut checked = 0;
    let mut bad = Vec::new();
    for (name, a) in &arrs {
        for h in 0..a.len() {
            checked += 1;
            match del_contr_residual(a, h, &run.limits) {
                Ok(r) if r.is_zero() => {}
                _ => bad.push(format!("{name}/{h}")),
            }
        }
    }
    (
        bad.is_empty(),
        format!(
            "{} arrangements, {checked} elements, failures {bad:?}",
            arrs.len()
        ),
    )
}

fn c_relation_check(run: &mut Run) -> (bool, String) {
    let a = catalog::transverse_planes_r4();
    let rel = c_relation(&a, 2, &run.limits).expect("c-relation");
    let u23 = Matroid::uniform(2, 3)
        .and_then(|m| m.char_poly(&run.limits))
        .expect("U(2,3)");
    let direct = rel.absolute.lhs == u23.psi.substitute_power(2)
        && rel.signed.lhs == u23.chi.substitute_power(2);
    (
        rel.holds() && direct,
        format!(
            "psi = {}, chi = {}, residual with shift λ^(d-r) = {}",
            rel.absolute.lhs, rel.signed.lhs, rel.absolute_rank_shift.residual
        ),
    )
}

const LEMMA_SEEDS: u64 = 20;

fn lemma_grid() -> Vec<(usize, usize, usize, usize)> {
    let mut g = Vec::new();
    for d in [2, 3] {
        for n in 1..=3 {
            for k in 1..=2 {
                for h in 1..=4 {
                    g.push((n, d, k, h));
                }
            }
        }
    }
    g
}

fn large_product(run: &mut Run) -> (bool, String) {
    let mut cases = 0;
    let mut bad = Vec::new();
    for (n, d, k, h) in lemma_grid() {
        let a = catalog::generic(n, d);
        for seed in 0..LEMMA_SEEDS {
            cases += 1;
            match verify_large_product(&a, k, h, seed, &run.limits) {
                Ok(r) if r.is_zero() => {}
                _ => bad.push((n, d, k, h, seed)),
            }
        }
    }
    (bad.is_empty(), format!("{cases} cases, nonzero {bad:?}"))
}

fn semiflexible(run: &mut Run) -> (bool, String) {
    let mut cases = 0;
    let mut derived_bad = 0;
    let mut open = Vec::new();
    for (n, d, k, h) in lemma_grid() {
        let a = catalog::generic(n, d);
        for e in 0..n {
            for seed in 0..LEMMA_SEEDS {
                cases += 1;
                let r = verify_semiflexible(&a, e, k, h, seed, &run.limits).expect("semiflexible");
                if !r.derived.is_zero() {
                    derived_bad += 1;
                }
                if !r.three_term.is_zero() {
                    open.push((n, d, k, h, e, r.three_term.residual.to_string()));
                }
            }
        }
    }
    let k1 = open.iter().filter(|o| o.2 == 1).count();
    let mut shapes: Vec<String> = open
        .iter()
        .map(|(n, d, k, h, _, res)| format!("generic({n},{d}) k={k} h={h}: {res}"))
        .collect();
    shapes.dedup();
    shapes.truncate(4);
    (
        open.is_empty() && derived_bad == 0,
        format!(
            "{cases} cases; three-term recurrence nonzero in {} (k=1: {k1}), e.g. [{}]; \
             contraction-sum identity nonzero in {derived_bad}",
            open.len(),
            shapes.join("; ")
        ),
    )
}

fn flex_limit(run: &mut Run) -> (bool, String) {
    let a = catalog::generic(2, 2);
    let mut ok = true;
    let mut detail = Vec::new();
    for e in 0..a.len() {
        let rows = flex_limit_probe(&a, e, 1, &[4, 16, 64], 0, &run.limits).expect("probe");
        for i in 0..rows[0].deviation.len() {
            let devs: Vec<_> = rows.iter().map(|r| r.deviation[i].clone()).collect();
            let decreasing = devs.windows(2).all(|w| w[1] < w[0]);
            let vanishing = devs.iter().all(|x| x.is_zero());
            ok &= decreasing || vanishing;
        }
        let max: Vec<_> = rows
            .iter()
            .map(|r| r.deviation.iter().max().cloned().unwrap_or_default())
            .collect();
        ok &= max.windows(2).all(|w| w[1] < w[0]);
        if e == 0 {
            for r in &rows {
                let dev: Vec<String> = r.deviation.iter().map(|x| x.to_string()).collect();
                detail.push(format!("h={} dev=[{}]", r.h, dev.join(",")));
            }
        }
    }
    (ok, detail.join("; "))
}

fn relative_error(est: &[f64], truth: &[f64]) -> f64 {
    est.iter()
        .zip(truth)
        .map(|(a, b)| (a / b - 1.0).abs())
        .fold(0.0, f64::max)
}

fn unit_ball(d: usize) -> Discotope {
    let basis = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    Discotope::new(d, vec![Disk { basis, radius: 1.0 }]).expect("ball")
}

fn ball_nu(d: usize) -> Vec<f64> {
    (0..=d)
        .map(|i| {
            let binom = (0..i).fold(1.0, |acc, t| acc * (d - t) as f64 / (t + 1) as f64);
            binom * kappa(d) / kappa(d - i)
        })
        .collect()
}

fn mc_validation(run: &mut Run) -> (bool, String) {
    let tol = run.thresholds.mc_relative;
    let cube = Discotope::from_zonotope(&Zonotope::cube(3));
    let est = estimate_intrinsic_volumes_mc(&cube, &default_grid(&cube), 100_000, 7).expect("cube");
    let cube_err = relative_error(&est.nu, &[1.0, 3.0, 3.0, 1.0]);
    run.record("mc cube 3".into(), &est.wills());
    let mut ok = cube_err <= tol;
    let mut detail = vec![format!("cube d=3 max rel err {cube_err:.4}")];
    for d in 1..=4 {
        let ball = unit_ball(d);
        let est =
            estimate_intrinsic_volumes_mc(&ball, &default_grid(&ball), 400_000, 11 + d as u64)
                .expect("ball");
        let err = relative_error(&est.nu, &ball_nu(d));
        ok &= err <= tol;
        detail.push(format!("ball d={d} {err:.4}"));
        run.record(format!("mc ball {d}"), &est.wills());
    }
    (ok, detail.join(", "))
}

fn log_concavity_suite(run: &mut Run) -> (bool, String) {
    let mut names = Vec::new();
    for n in 1..=8 {
        for r in 0..=n.min(5) {
            names.push(format!("uniform({r},{n})"));
        }
        names.push(format!("boolean({n})"));
    }
    names.extend(["graphic-complete(4)", "fano", "vamos"].map(String::from));
    let mut bad = Vec::new();
    for name in &names {
        let gamma = matroid::catalog(name)
            .and_then(|m| m.char_poly(&run.limits))
            .map(|c| c.gamma)
            .expect("catalog matroid");
        if !is_log_concave(&gamma).is_ok_and(|r| r.holds()) {
            bad.push(name.clone());
        }
    }
    let slack = run.thresholds.wills_slack;
    for (label, nu) in &run.wills {
        let steiner: Vec<f64> = (0..nu.len())
            .map(|i| nu[i] * kappa(nu.len() - 1 - i))
            .collect();
        let holds = |s: &[f64]| is_log_concave_f64(s, slack).is_ok_and(|r| r.holds());
        if !holds(nu) || !holds(&steiner) {
            bad.push(label.clone());
        }
    }
    (
        bad.is_empty(),
        format!(
            "{} matroids, {} Wills sequences, failures {bad:?}",
            names.len(),
            run.wills.len()
        ),
    )
}

fn ingleton(run: &mut Run) -> (bool, String) {
    let vamos = matroid::vamos()
        .and_then(|m| m.ingleton_check(&run.limits, 0, 0))
        .expect("vamos");
    let mut ok = vamos.is_violated();
    let mut detail = vec![format!("vamos {}", serde_json::to_string(&vamos).unwrap())];
    for name in ["uniform(2,4)", "boolean(4)", "graphic-complete(4)"] {
        let r = matroid::catalog(name)
            .and_then(|m| m.ingleton_check(&run.limits, 0, 0))
            .expect("catalog");
        let exhaustive = serde_json::to_value(&r).unwrap()["exhaustive"] == true;
        ok &= !r.is_violated() && exhaustive;
        detail.push(format!(
            "{name} satisfied={} exhaustive={exhaustive}",
            !r.is_violated()
        ));
    }
    (ok, detail.join(", "))
}

fn uniform_concentration(run: &mut Run) -> (bool, String) {
    let rows = uniform_matroid_experiment(4, &[16, 64], 40, 3).expect("uniform");
    for r in &rows {
        for (s, nu) in r.samples.iter().enumerate() {
            run.wills
                .push((format!("uniform d={} #{s}", r.d), nu.clone()));
        }
    }
    let (small, large) = (&rows[0].stats, &rows[1].stats);
    let mean = large.mean[2];
    let ratio = large.std[2] / small.std[2];
    let t = &run.thresholds;
    (
        (mean - 6.0).abs() <= t.uniform_mean_abs && ratio < t.uniform_std_ratio,
        format!("mean ν_2(d=64) = {mean:.4}, std ratio 64/16 = {ratio:.4}"),
    )
}

fn main_config(k: usize) -> ExperimentConfig {
    let a = catalog::generic(2, 2);
    let mut cfg = ExperimentConfig::for_arrangement(&a, k, 40, 5);
    cfg.h = 3;
    cfg.l = 8;
    cfg
}

fn main_probe(run: &mut Run) -> (bool, String) {
    let a = catalog::generic(2, 2);
    let reports: Vec<MainReport> = (1..=2)
        .map(|k| theorem_main_experiment(&a, &main_config(k), &run.limits).expect("main"))
        .collect();
    for r in &reports {
        for (s, nu) in r.samples.iter().enumerate() {
            run.wills
                .push((format!("main k={} #{s}", r.config.k), nu.clone()));
        }
    }
    let devs: Vec<f64> = reports.iter().map(|r| r.max_deviation).collect();
    let means: Vec<String> = reports
        .iter()
        .map(|r| {
            let m: Vec<String> = r
                .normalized
                .mean
                .iter()
                .map(|x| format!("{x:.3}"))
                .collect();
            format!("k={} mean=[{}]", r.config.k, m.join(","))
        })
        .collect();
    (
        devs[1] < devs[0],
        format!(
            "max deviation k=1 {:.4}, k=2 {:.4}; {}",
            devs[0],
            devs[1],
            means.join("; ")
        ),
    )
}

const LEVY_EPS: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];

fn levy(run: &mut Run) -> (bool, String) {
    let rows = levy_demo(50, &LEVY_EPS, 100_000, 9).expect("levy");
    let sigmas = run.thresholds.levy_sigmas;
    let margins: Vec<String> = rows
        .iter()
        .map(|r| format!("{:.1}:{:+.2e}", r.eps, r.empirical - r.bound))
        .collect();
    (
        rows.iter().all(|r| r.passes(sigmas)),
        format!("empirical − bound per ε [{}]", margins.join(", ")),
    )
}

fn seeded_outputs() -> Vec<(&'static str, String)> {
    let uniform = uniform_matroid_experiment(3, &[8], 10, 21).expect("uniform");
    let levy = levy_demo(20, &LEVY_EPS, 20_000, 22).expect("levy");
    let cube = Discotope::from_zonotope(&Zonotope::cube(2));
    let mc = estimate_intrinsic_volumes_mc(&cube, &default_grid(&cube), 5_000, 23).expect("mc");
    let mut cfg = main_config(1);
    cfg.num_samples = 8;
    let main =
        theorem_main_experiment(&catalog::generic(2, 2), &cfg, &Limits::default()).expect("main");
    vec![
        ("uniform", uniform_csv(&uniform)),
        ("levy", levy_csv(&levy)),
        ("mc volumes", mc.volumes_csv()),
        ("mc nu", mc.nu_csv()),
        ("main summary", main.csv()),
        (
            "main samples",
            samples_csv(&main.config_hash, &main.samples),
        ),
    ]
}

fn determinism(_: &mut Run) -> (bool, String) {
    let base = seeded_outputs();
    let mut runs = vec![("repeat", seeded_outputs())];
    for threads in [1, 2] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("pool");
        runs.push((
            if threads == 1 {
                "1 thread"
            } else {
                "2 threads"
            },
            pool.install(seeded_outputs),
        ));
    }
    let mut bad = Vec::new();
    for (label, out) in &runs {
        for ((name, a), (_, b)) in base.iter().zip(out) {
            if a != b {
                bad.push(format!("{name} ({label})"));
            }
        }
    }
    (
        bad.is_empty(),
        format!(
            "{} CSV outputs × {} reruns, differing {bad:?}",
            base.len(),
            runs.len()
        ),
    )
}

fn main() -> ExitCode {
    let mut run = Run {
        limits: Limits::default(),
        thresholds: Thresholds::default(),
        wills: Vec::new(),
        lines: Vec::new(),
    };
    run.check(1, "cube identity", Some(1), cube_identity);
    run.check(2, "deletion-contraction", Some(5), del_contr);
    run.check(3, "c-relation", None, c_relation_check);
    run.check(4, "large product lemma", Some(60), large_product);
    run.check(5, "semiflexible lemma", None, semiflexible);
    run.check(6, "flexible limit", Some(120), flex_limit);
    run.check(7, "Monte Carlo validation", Some(300), mc_validation);
    run.check(9, "Ingleton", Some(60), ingleton);
    run.check(
        10,
        "uniform concentration",
        Some(120),
        uniform_concentration,
    );
    run.check(11, "main theorem probe", Some(600), main_probe);
    run.check(12, "Lévy demo", Some(60), levy);
    run.check(13, "determinism", None, determinism);
    run.check(8, "log-concavity", None, log_concavity_suite);
    run.lines.sort_by_key(|l| l.id);
    let mut failed = 0;
    for l in &run.lines {
        let limit = l
            .limit
            .map(|d| format!(" < {}s", d.as_secs()))
            .unwrap_or_default();
        println!(
            "criterion {:>2} {:<24} {} [{:.2}s{limit}] {}",
            l.id,
            l.name,
            if l.pass { "PASS" } else { "FAIL" },
            l.elapsed.as_secs_f64(),
            l.detail
        );
        failed += usize::from(!l.pass);
    }
    println!("{} passed, {failed} failed", run.lines.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
