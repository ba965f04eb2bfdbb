//! The ten acceptance criteria, one test each. Every test prints a
//! `PASS`/`FAIL` line with its measurements (visible with `--nocapture`).

use std::process::Command;
use std::time::{Duration, Instant};

use asreg_core::certify::{first_hit_index, run_certification, run_picard, CertConfig, CertReport, Hit, Suite};
use asreg_core::instances::{builtin_corpus, Instance};
use asreg_core::rates::{BoundFn, RateContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

struct Outcome {
    ok: bool,
    note: String,
}

fn outcome(ok: bool, note: impl Into<String>) -> Outcome {
    Outcome { ok, note: note.into() }
}

fn certify(corpus: &[Instance], suites: &[Suite], tweak: impl FnOnce(&mut CertConfig)) -> (Vec<CertReport>, Duration) {
    let mut config = CertConfig {
        seed: 20_240_101,
        suites: suites.to_vec(),
        ..CertConfig::default()
    };
    tweak(&mut config);
    let start = Instant::now();
    let reports = run_certification(corpus, &config).expect("certification runs");
    (reports, start.elapsed())
}

fn totals(reports: &[CertReport]) -> (u64, u64, u64) {
    reports.iter().fold((0, 0, 0), |(c, i, v), r| {
        (c + r.conclusive, i + r.inconclusive, v + r.violation_count)
    })
}

fn all_pass(reports: &[CertReport]) -> bool {
    !reports.is_empty() && reports.iter().all(|r| r.pass && r.error.is_none())
}

fn rate_soundness() -> Outcome {
    let corpus = builtin_corpus();
    let (reports, t) = certify(&corpus, &[Suite::Rate], |c| c.eps_grid = Some(vec![1.0, 0.1, 0.01]));
    let (conclusive, inconclusive, violations) = totals(&reports);
    outcome(
        corpus.len() >= 20 && all_pass(&reports) && violations == 0 && t < Duration::from_secs(60),
        format!(
            "{} instances, {conclusive} conclusive, {inconclusive} inconclusive, {violations} violations, {:.2?}",
            corpus.len(),
            t
        ),
    )
}

fn regression_pins() -> Outcome {
    let ctx = RateContext::new(256).unwrap();
    let one = BoundFn::constant(1.0).unwrap();
    let theta = ctx.theta(1.0, 1.0, 1.0, 1.0).unwrap();
    let ten = Float::with_val(256, 10);
    let mut up = ten.clone();
    up.next_up();
    let ulp = Float::with_val(256, &up - &ten);
    let theta_ok = Float::with_val(256, theta.upper() - &ten).abs() <= ulp && *theta.lower() <= 10;
    let phi = ctx.phi(0.5, 0.5, &one, 4.0).unwrap().upper_f64();
    let b = ctx.b_bound(0.5, &one, 4.0).unwrap().upper_f64();
    outcome(
        theta_ok && (61.9550..=61.9570).contains(&phi) && (5.4750..=5.4755).contains(&b),
        format!("theta {} phi {phi:.6} b_bound {b:.6}", theta.upper().to_f64()),
    )
}

fn catalogue_suite(suite: Suite, budget: Option<Duration>) -> Outcome {
    let (reports, t) = certify(&[], &[suite], |c| {
        c.samples = 10_000;
        c.norm_cap = 1e3;
    });
    let (conclusive, _, violations) = totals(&reports);
    let full = reports.len() == 5 && reports.iter().all(|r| r.samples == 10_000);
    let fast = budget.is_none_or(|b| t < b);
    outcome(
        all_pass(&reports) && full && violations == 0 && fast,
        format!("{} sources, {conclusive} checks, {violations} violations, {t:.2?}", reports.len()),
    )
}

fn modulus() -> Outcome {
    let corpus = builtin_corpus();
    let (reports, t) = certify(&corpus, &[Suite::SneModulus], |c| c.samples = 10_000);
    let (conclusive, _, violations) = totals(&reports);
    let vacuous: Vec<&str> = reports.iter().filter(|r| r.conclusive == 0).map(|r| r.instance.as_str()).collect();
    let family = reports.iter().any(|r| r.instance == "scaled-rotation-family");
    outcome(
        all_pass(&reports) && vacuous.is_empty() && family && reports.len() == corpus.len() + 1 && t < Duration::from_secs(10),
        format!(
            "{} targets, {conclusive} filtered pairs, {violations} violations, vacuous {vacuous:?}, {t:.2?}",
            reports.len()
        ),
    )
}

fn uc_lemma() -> Outcome {
    let (reports, t) = certify(&[], &[Suite::UcLemma], |c| {
        c.uc_draws = 100_000;
        c.uc_dims = vec![2, 8, 32];
    });
    let (conclusive, _, violations) = totals(&reports);
    let draws: u64 = reports.iter().map(|r| r.samples).sum();
    outcome(
        all_pass(&reports) && draws == 100_000 && violations == 0,
        format!("{draws} draws, {conclusive} satisfy the hypothesis, {violations} violations, {t:.2?}"),
    )
}

fn witness() -> Outcome {
    let corpus: Vec<Instance> = builtin_corpus().into_iter().filter(|i| i.common_fixed_point().is_some()).collect();
    let (reports, t) = certify(&corpus, &[Suite::Witness], |c| {
        c.witness_deltas = vec![4.0, 1.0];
        c.witness_budget = 10_000;
    });
    let (conclusive, inconclusive, violations) = totals(&reports);
    outcome(
        !corpus.is_empty() && all_pass(&reports) && inconclusive == 0 && conclusive == 2 * corpus.len() as u64,
        format!(
            "{} instances, {conclusive} witnesses, {inconclusive} inconclusive, {violations} violations, {t:.2?}",
            corpus.len()
        ),
    )
}

fn closed_form() -> Outcome {
    let rot = builtin_corpus().into_iter().find(|i| i.id() == "rot2-quarter").unwrap();
    let hit = first_hit_index(rot.map(), rot.x0(), 0.1, 1_000).unwrap();
    let traj = run_picard(rot.map(), rot.x0(), 21, None).unwrap();
    let worst = traj
        .displacements
        .iter()
        .enumerate()
        .map(|(n, d)| (d - 2f64.powf(-(n as f64 + 1.0) / 2.0)).abs())
        .fold(0.0, f64::max);
    outcome(
        hit == Hit::Hit(6) && traj.displacements.len() == 21 && worst <= 1e-12,
        format!("first hit {hit:?}, max trajectory error {worst:.3e} over n = 0..=20"),
    )
}

// Straight-line evaluation of the rate formulas at 1024 bits, rounding to
// nearest throughout.
mod reference {
    use rug::ops::Pow;
    use rug::Float;

    pub const PREC: u32 = 1024;

    pub fn f(v: f64) -> Float {
        Float::with_val(PREC, v)
    }

    pub fn theta(beta: &Float, l1: &Float, l2: &Float, l3: &Float) -> Float {
        let disc = Float::with_val(PREC, l1.pow(2u32))
            + Float::with_val(PREC, l2.pow(2u32))
            + Float::with_val(PREC, 2 * Float::with_val(PREC, l1 * l2))
            + Float::with_val(PREC, 8 * Float::with_val(PREC, beta * Float::with_val(PREC, l1 * l3)))
            + Float::with_val(PREC, 4 * Float::with_val(PREC, beta * Float::with_val(PREC, l2 * l3)));
        let sum = Float::with_val(PREC, l1 + l2);
        let two_beta = Float::with_val(PREC, 2 * beta);
        let rho = (Float::with_val(PREC, &sum + Float::with_val(PREC, &two_beta * l3)) + disc.sqrt()) / &two_beta;
        sum * (rho + l3)
    }

    /// `(B, L)`.
    pub fn b(alpha2: f64, k: &dyn Fn(&Float) -> Float, delta: &Float) -> (Float, Float) {
        let quarter = Float::with_val(PREC, delta / 4);
        let eighth = Float::with_val(PREC, delta / 8);
        let l = k(&quarter) + &eighth;
        let a = f(alpha2);
        let beta = Float::with_val(PREC, 1 - &a) / &a;
        let th = theta(&beta, &l, &l, &eighth);
        let b = (Float::with_val(PREC, l.square_ref()) + Float::with_val(PREC, 2 * th)).sqrt();
        (b, l)
    }

    pub fn phi_rat(alpha1: &Float, alpha2: f64, k: &dyn Fn(&Float) -> Float, delta: &Float) -> Float {
        let (b, l) = b(alpha2, k, delta);
        let branch = Float::with_val(PREC, 2).sqrt().max(&(Float::with_val(PREC, 4 * &b) / delta));
        let one_minus = Float::with_val(PREC, 1 - alpha1);
        let odds = Float::with_val(PREC, alpha1 / &one_minus);
        b * branch / one_minus + odds * l + Float::with_val(PREC, delta / 8)
    }

    pub fn phi(alpha1: f64, alpha2: f64, k: &dyn Fn(&Float) -> Float, delta: &Float) -> Float {
        phi_rat(&f(alpha1), alpha2, k, delta)
    }

    pub fn psi3(alphas: [f64; 3], c: f64, delta: &Float) -> Float {
        let odds = |a: f64| f(a) / Float::with_val(PREC, 1 - f(a));
        let s = odds(alphas[0]) + odds(alphas[1]);
        let composed = Float::with_val(PREC, &s / Float::with_val(PREC, &s + 1));
        let k = move |_: &Float| f(c);
        let inner = move |rho: &Float| phi(alphas[0], alphas[1], &k, rho).max(&f(c));
        phi_rat(&composed, alphas[2], &inner, delta)
    }

    pub fn omega(alpha: f64, b: f64, eps: f64) -> Float {
        let a = f(alpha);
        let spread = Float::with_val(PREC, &a * Float::with_val(PREC, 1 - &a));
        spread * f(eps).pow(2u32) / (4 * f(b))
    }
}

// Values from the independent oracle script, 80 digits.
const PHI_HALF_4: &str = "61.955844122715710878430397035774565414254093756785065317180235283833184612317927";
const PSI3_HALF_4: &str = "318231.55713520361326821492783630347337952026406514074147323088344852532117693772";

fn reference_agrees(value: Float, oracle: &str) -> bool {
    let o = Float::with_val(reference::PREC, Float::parse(oracle).unwrap());
    (value - &o).abs() / o < 1e-70
}

fn upper_bound_arithmetic() -> Outcome {
    let one = |_: &Float| reference::f(1.0);
    let four = reference::f(4.0);
    if !reference_agrees(reference::phi(0.5, 0.5, &one, &four), PHI_HALF_4)
        || !reference_agrees(reference::psi3([0.5; 3], 1.0, &four), PSI3_HALF_4)
    {
        return outcome(false, "reference evaluation disagrees with the pinned oracle values");
    }
    let ctx = RateContext::new(256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let log_uniform = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| (rng.random_range(lo.ln()..hi.ln())).exp();
    let mut undershoots = Vec::new();
    let mut checked = 0u32;
    let mut check = |what: String, upper: &Float, reference: Float| {
        checked += 1;
        if !reference.is_finite() || *upper < reference {
            undershoots.push(what);
        }
    };
    for i in 0..10_000 {
        match i % 5 {
            0 => {
                let beta = log_uniform(&mut rng, 1e-3, 1e3);
                let l = [0; 3].map(|_| log_uniform(&mut rng, 1e-3, 1e3));
                let got = ctx.theta(beta, l[0], l[1], l[2]).unwrap();
                let [l1, l2, l3] = l.map(reference::f);
                check(format!("theta({beta}, {l:?})"), got.upper(), reference::theta(&reference::f(beta), &l1, &l2, &l3));
            }
            1 => {
                let (a2, c, delta) = (rng.random_range(0.01..0.99), log_uniform(&mut rng, 0.1, 10.0), log_uniform(&mut rng, 1e-3, 1e2));
                let got = ctx.b_bound(a2, &BoundFn::constant(c).unwrap(), delta).unwrap();
                let k = |_: &Float| reference::f(c);
                check(format!("b_bound({a2}, {c}, {delta})"), got.upper(), reference::b(a2, &k, &reference::f(delta)).0);
            }
            2 => {
                let (a1, a2) = (rng.random_range(0.01..0.99), rng.random_range(0.01..0.99));
                let (c, delta) = (log_uniform(&mut rng, 0.1, 10.0), log_uniform(&mut rng, 1e-3, 1e2));
                let got = ctx.phi(a1, a2, &BoundFn::constant(c).unwrap(), delta).unwrap();
                let k = |_: &Float| reference::f(c);
                check(format!("phi({a1}, {a2}, {c}, {delta})"), got.upper(), reference::phi(a1, a2, &k, &reference::f(delta)));
            }
            3 => {
                let alphas = [0; 3].map(|_| rng.random_range(0.01..0.99));
                let (c, delta) = (log_uniform(&mut rng, 0.1, 10.0), log_uniform(&mut rng, 1e-2, 1e2));
                let got = ctx.psi(3, &alphas, &BoundFn::constant(c).unwrap(), delta).unwrap();
                check(format!("psi({alphas:?}, {c}, {delta})"), got.upper(), reference::psi3(alphas, c, &reference::f(delta)));
            }
            _ => {
                let a = rng.random_range(0.001..0.999);
                let (b, eps) = (log_uniform(&mut rng, 1e-3, 1e3), log_uniform(&mut rng, 1e-3, 1e2));
                let got = ctx.omega(a, b, eps).unwrap();
                check(format!("omega({a}, {b}, {eps})"), got.upper(), reference::omega(a, b, eps));
            }
        }
    }
    outcome(
        undershoots.is_empty() && checked == 10_000,
        format!("{checked} tuples, {} undershoots {:?}", undershoots.len(), undershoots.iter().take(3).collect::<Vec<_>>()),
    )
}

fn asreg(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_asreg")).args(args).output().expect("asreg runs")
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    let (a, b, f) = (path("a.json"), path("b.json"), path("f.json"));
    let common = ["certify", "--corpus", "builtin", "--seed", "42", "--samples", "2000", "--report"];
    let run_a = asreg(&[&common[..], &[a.as_str()]].concat());
    let run_b = asreg(&[&common[..], &[b.as_str()]].concat());
    let same = std::fs::read(&a).ok().zip(std::fs::read(&b).ok()).is_some_and(|(x, y)| x == y && !x.is_empty());
    let falsified = asreg(&[&common[..], &[f.as_str(), "--falsify"]].concat());
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&f).unwrap_or_default()).unwrap_or_default();
    let violations: u64 = report["reports"]
        .as_array()
        .map(|rs| rs.iter().filter_map(|r| r["violation_count"].as_u64()).sum())
        .unwrap_or(0);
    let falsified_code = falsified.status.code();
    outcome(
        run_a.status.success() && run_b.status.success() && same && falsified_code.is_some_and(|c| c != 0) && violations > 0,
        format!("identical reports: {same}; falsified exit {falsified_code:?} with {violations} violations"),
    )
}

fn report(name: &str, o: Outcome) {
    println!("{} {name}: {}", if o.ok { "PASS" } else { "FAIL" }, o.note);
    assert!(o.ok, "FAIL {name}: {}", o.note);
}

#[test]
fn criterion_01_rate_soundness() {
    report("1 rate soundness", rate_soundness());
}

#[test]
fn criterion_02_regression_pins() {
    report("2 regression pins", regression_pins());
}

#[test]
fn criterion_03_rectangularity() {
    report("3 rectangularity", catalogue_suite(Suite::Rectangularity, Some(Duration::from_secs(10))));
}

#[test]
fn criterion_04_modulus() {
    report("4 modulus", modulus());
}

#[test]
fn criterion_05_correspondence() {
    report("5 correspondence", catalogue_suite(Suite::AveragedCorrespondence, None));
}

#[test]
fn criterion_06_uniform_convexity() {
    report("6 uniform convexity", uc_lemma());
}

#[test]
fn criterion_07_witness() {
    report("7 witness", witness());
}

#[test]
fn criterion_08_closed_form() {
    report("8 closed form", closed_form());
}

#[test]
fn criterion_09_upper_bound_arithmetic() {
    report("9 upper-bound arithmetic", upper_bound_arithmetic());
}

#[test]
fn criterion_10_determinism() {
    report("10 determinism", determinism());
}
