use std::f64::consts::FRAC_PI_2;

use asreg_core::certify::{
    check_averaged_correspondence, check_rate, check_rate_with, check_rectangularity, check_sne_modulus,
    check_sne_rotation_family, check_uc_lemma, check_witness, first_hit_index, run_picard, Hit, Sampler, Status,
    SuiteOptions,
};
use asreg_core::instances::{builtin_corpus, Instance};
use asreg_core::operators::{compose, AveragedMap, ConvexSet, MonotoneSource, NonexpansiveMap, Vector};
use asreg_core::rates::{RateContext, RateIndex};
use nalgebra::DMatrix;

fn v(e: &[f64]) -> Vector {
    Vector::new(e.to_vec()).unwrap()
}

fn ctx() -> RateContext {
    RateContext::default()
}

fn instance(id: &str) -> Instance {
    builtin_corpus().into_iter().find(|i| i.id() == id).unwrap()
}

fn sampler(count: usize, norm_cap: f64, seed: u64) -> Sampler {
    Sampler::new(count, norm_cap, seed).unwrap()
}

#[test]
fn rot2_first_hit_matches_closed_form() {
    let rot = instance("rot2-quarter");
    assert_eq!(first_hit_index(rot.map(), rot.x0(), 0.1, 1000).unwrap(), Hit::Hit(6));
    let t = run_picard(rot.map(), rot.x0(), 21, None).unwrap();
    for (n, d) in t.displacements.iter().enumerate() {
        assert!((d - 2f64.powf(-(n as f64 + 1.0) / 2.0)).abs() < 1e-12);
    }
}

#[test]
fn rate_passes_on_rotation_and_identity() {
    let opts = SuiteOptions::default();
    let rot = instance("rot2-quarter");
    let r = check_rate(&rot, &[0.1], 1_000, &ctx(), &opts).unwrap();
    assert_eq!(r.status, Status::Pass);
    assert_eq!(r.details[0]["first_hit"], 6);

    let id = instance("identity-composition");
    let r = check_rate(&id, &[1.0, 0.1, 0.01], 1_000, &ctx(), &opts).unwrap();
    assert_eq!(r.status, Status::Pass);
    assert!(r.details.iter().all(|d| d["first_hit"] == 0));
}

#[test]
fn rate_with_zero_stub_is_violated() {
    let rot = instance("rot2-quarter");
    let zero = |_: f64| Ok(RateIndex::zero());
    let r = check_rate_with(&rot, &[0.1], 1_000, &zero, &SuiteOptions::default()).unwrap();
    assert_eq!(r.status, Status::Fail);
    assert!(r.violation_count >= 1);
    assert!(!r.pass);
}

#[test]
fn rate_beyond_cap_is_inconclusive() {
    let rot = instance("rot2-quarter");
    let huge = |_: f64| RateIndex::new(rug::Integer::from(1_000_000u32));
    let r = check_rate_with(&rot, &[1e-300], 50, &huge, &SuiteOptions::default()).unwrap();
    assert_eq!(r.inconclusive, 1);
    assert_eq!(r.violation_count, 0);
}

#[test]
fn rectangularity_identity_and_diag() {
    let opts = SuiteOptions::default();
    let id = MonotoneSource::linear(DMatrix::identity(2, 2)).unwrap();
    let b = v(&[1.0, 0.0]);
    let r = check_rectangularity(&id, 1.0, &b, &b, &sampler(2_000, 10.0, 1), &ctx(), &opts).unwrap();
    assert_eq!(r.status, Status::Pass);
    assert_eq!(r.details[0]["theta"], 10.0);

    let diag = MonotoneSource::linear(DMatrix::from_diagonal(&nalgebra::dvector![1.0, 2.0])).unwrap();
    let r = check_rectangularity(&diag, 0.5, &v(&[0.3, -1.2]), &v(&[2.0, 0.5]), &sampler(10_000, 1e3, 7), &ctx(), &opts)
        .unwrap();
    assert_eq!(r.status, Status::Pass);
    assert_eq!(r.samples, 10_000);

    let falsified = check_rectangularity(&id, 1.0, &b, &b, &sampler(10, 10.0, 1), &ctx(), &SuiteOptions::falsified())
        .unwrap();
    assert_eq!(falsified.status, Status::Fail);
}

#[test]
fn rectangularity_rejects_bad_sampler_and_beta() {
    assert!(Sampler::new(0, 1.0, 0).is_err());
    assert!(Sampler::new(10, -1.0, 0).is_err());
    let diag = MonotoneSource::linear(DMatrix::from_diagonal(&nalgebra::dvector![1.0, 2.0])).unwrap();
    let b = v(&[1.0, 0.0]);
    assert!(check_rectangularity(&diag, 1.0, &b, &b, &sampler(10, 1.0, 0), &ctx(), &SuiteOptions::default()).is_err());
}

#[test]
fn sne_modulus_examples() {
    let opts = SuiteOptions::default();
    let id = AveragedMap::new(0.5, NonexpansiveMap::identity(3)).unwrap();
    let r = check_sne_modulus(&id, 1.0, 0.5, &sampler(2_000, 5.0, 3), &ctx(), &opts).unwrap();
    assert_eq!(r.status, Status::Pass);
    assert_eq!(r.conclusive, r.samples);

    let fam = check_sne_rotation_family(1.0, 0.1, &sampler(4_000, 10.0, 5), &ctx(), &opts).unwrap();
    assert_eq!(fam.status, Status::Pass);
    assert!(fam.conclusive > 1_000);

    let p1 = AveragedMap::projection(ConvexSet::halfspace(v(&[1.0, 0.0]), 0.0).unwrap()).unwrap();
    let p2 = AveragedMap::projection(ConvexSet::ball(v(&[0.0, 1.0]), 1.5).unwrap()).unwrap();
    let both = compose(&[p1, p2]).unwrap();
    assert!((both.alpha() - 2.0 / 3.0).abs() < 1e-15);
    let r = check_sne_modulus(&both, 2.0, 0.5, &sampler(10_000, 2.0, 11), &ctx(), &opts).unwrap();
    assert_eq!(r.status, Status::Pass);
    assert!(r.conclusive > 0);

    let f = check_sne_modulus(&id, 1.0, 0.5, &sampler(10, 5.0, 3), &ctx(), &SuiteOptions::falsified()).unwrap();
    assert_eq!(f.status, Status::Fail);
}

#[test]
fn correspondence_examples() {
    let opts = SuiteOptions::default();
    let id = MonotoneSource::linear(DMatrix::identity(2, 2)).unwrap();
    assert_eq!(check_averaged_correspondence(&id, 1.0, &sampler(1_000, 10.0, 1), &opts).unwrap().status, Status::Pass);
    let zero = MonotoneSource::linear(DMatrix::zeros(2, 2)).unwrap();
    let cap = zero.cocoercivity_constant().unwrap();
    assert_eq!(check_averaged_correspondence(&zero, cap, &sampler(1_000, 10.0, 1), &opts).unwrap().status, Status::Pass);
    let diag = MonotoneSource::linear(DMatrix::from_diagonal(&nalgebra::dvector![1.0, 2.0])).unwrap();
    let r = check_averaged_correspondence(&diag, 0.5, &sampler(10_000, 1e3, 9), &opts).unwrap();
    assert_eq!((r.status, r.samples), (Status::Pass, 10_000));
    let f = check_averaged_correspondence(&diag, 0.5, &sampler(10, 1.0, 9), &SuiteOptions::falsified()).unwrap();
    assert_eq!(f.status, Status::Fail);
}

#[test]
fn witness_examples() {
    let opts = SuiteOptions::default();
    let rot = instance("rot2-quarter");
    let r = check_witness(&rot, &[4.0, 1.0], 10_000, &ctx(), &opts).unwrap();
    assert_eq!(r.status, Status::Pass);
    assert_eq!(r.details[0]["step"], 0);
    assert!(r.details[0]["psi"].as_f64().unwrap() > 61.9);

    let proj = instance("proj3-halfspaces-dim8");
    let r = check_witness(&proj, &[4.0, 1.0], 10_000, &ctx(), &opts).unwrap();
    assert_eq!((r.status, r.inconclusive), (Status::Pass, 0));

    assert!(check_witness(&rot, &[1.0], 0, &ctx(), &opts).is_err());
    let f = check_witness(&rot, &[1.0], 10, &ctx(), &SuiteOptions::falsified()).unwrap();
    assert_eq!(f.status, Status::Fail);
}

#[test]
fn uc_lemma_draws() {
    let r = check_uc_lemma(&sampler(20_000, 1e3, 4), &[2, 8, 32], &SuiteOptions::default()).unwrap();
    assert_eq!(r.status, Status::Pass);
    assert!(r.conclusive > 1_000);
    assert!(check_uc_lemma(&sampler(10, 1.0, 4), &[1], &SuiteOptions::default()).is_err());
    let f = check_uc_lemma(&sampler(100, 1e3, 4), &[2], &SuiteOptions::falsified()).unwrap();
    assert_eq!(f.status, Status::Fail);
}

#[test]
fn uc_lemma_hypothesis_cases() {
    // x = y on the sphere: hypothesis holds, conclusion 0 < εd
    let d = 2.0;
    let x = v(&[d, 0.0]);
    assert!(x.lincomb(0.5, &x, 0.5).norm() > (1.0 - 2.0 * 0.25 * 0.01 / 8.0) * d);
    // x = −y: the midpoint vanishes, hypothesis fails
    let y = v(&[-d, 0.0]);
    assert!(x.lincomb(0.5, &y, 0.5).norm() <= (1.0 - 2.0 * 0.25 * 0.01 / 8.0) * d);
}

#[test]
fn rate_checks_rotation_quarter_map_directly() {
    let quarter = AveragedMap::new(0.5, NonexpansiveMap::rotation(2, FRAC_PI_2, 1.0).unwrap()).unwrap();
    assert_eq!(first_hit_index(&quarter, &v(&[1.0, 0.0]), 0.1, 10).unwrap(), Hit::Hit(6));
}
