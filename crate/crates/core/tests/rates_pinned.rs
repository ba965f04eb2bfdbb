//! Rate formulas against values frozen from an independent 80-digit
//! straight-line evaluation of the same expressions.

use std::sync::Arc;

use asreg_core::rates::{BoundFn, Modulus, RateContext};
use rug::{Float, Integer, Rational};

fn ctx() -> RateContext {
    RateContext::default()
}

fn one() -> BoundFn {
    BoundFn::constant(1.0).unwrap()
}

fn float(s: &str) -> Float {
    Float::with_val(512, Float::parse(s).unwrap())
}

/// `upper` dominates the oracle value and exceeds it by at most `rel`.
fn assert_tight(upper: &Float, oracle: &str, rel: f64) {
    let o = float(oracle);
    assert!(*upper >= o, "upper {upper} below oracle {oracle}");
    let gap = Float::with_val(512, upper - &o) / &o;
    assert!(gap.to_f64() <= rel, "relative overestimate {gap} too large for {oracle}");
}

const THETA_HALF_111: &str = "14.324555320336758663997787088865437067439110278650433653715009705585188877278476";
const THETA_1_15_15_05: &str = "13.863961030678927719607599258943641353563523439196266329295058820958296153079482";
const THETA_1_1125_1125_0125: &str = "6.0165857377724804328275657012911596192159838658050173098441742778251369660336001";
const B_HALF_4: &str = "5.4752097732742492100439186121278105519048960380464801712140531226615633966060309";
const B_HALF_1: &str = "3.6467514962696540814118607657054684052853007511701111599806721330410103541471095";
const PHI_HALF: [(f64, &str); 4] = [
    (1.0, "107.6403718043596869252410512206585539074557418528802769575067884452021914565376"),
    (2.0, "74.372776601683793319988935444327185337195551393252168268575048527925944386392382"),
    (4.0, "61.955844122715710878430397035774565414254093756785065317180235283833184612317927"),
    (8.0, "64.298221281347034655991148355461748269756441114601734614860038822340755509113906"),
];
const PSI3_HALF_4: &str = "318231.55713520361326821492783630347337952026406514074147323088344852532117693772";
const PSI4_HALF_4: &str = "4507294727099950.0675472563011242823115146089785124543212882014310164663710579885";
const PSI3_HALF_1: &str = "11189397.235044426471475399305491013701276593172605442732183854721796047940026481";

// 2^-248, the tightness contract at 256 bits.
const TIGHT: f64 = 2.2e-75;

#[test]
fn theta_values() {
    let t = ctx().theta(1.0, 1.0, 1.0, 1.0).unwrap();
    assert_eq!(*t.upper(), 10);
    assert_eq!(*t.lower(), 10);
    assert_tight(ctx().theta(0.5, 1.0, 1.0, 1.0).unwrap().upper(), THETA_HALF_111, TIGHT);
    assert_tight(ctx().theta(1.0, 1.5, 1.5, 0.5).unwrap().upper(), THETA_1_15_15_05, TIGHT);
    assert_tight(
        ctx().theta(1.0, 1.125, 1.125, 0.125).unwrap().upper(),
        THETA_1_1125_1125_0125,
        TIGHT,
    );
}

#[test]
fn theta_rejects_nonpositive() {
    assert!(ctx().theta(0.0, 1.0, 1.0, 1.0).is_err());
    assert!(ctx().theta(1.0, -1.0, 1.0, 1.0).is_err());
    assert!(ctx().theta(1.0, 1.0, f64::NAN, 1.0).is_err());
}

#[test]
fn b_bound_values() {
    assert_tight(ctx().b_bound(0.5, &one(), 4.0).unwrap().upper(), B_HALF_4, TIGHT);
    assert_tight(ctx().b_bound(0.5, &one(), 1.0).unwrap().upper(), B_HALF_1, TIGHT);
}

#[test]
fn b_bound_monotone_in_k() {
    let k = BoundFn::inverse_power(0.5, 1.0, 1.0).unwrap();
    let k2 = BoundFn::inverse_power(1.0, 2.0, 1.0).unwrap();
    for delta in [0.25, 1.0, 4.0, 16.0] {
        let a = ctx().b_bound(0.3, &k, delta).unwrap();
        let b = ctx().b_bound(0.3, &k2, delta).unwrap();
        assert!(b.upper() >= a.upper());
    }
}

#[test]
fn b_bound_propagates_table_domain_error() {
    let table = BoundFn::step_table(vec![(0.5, 2.0)]).unwrap();
    // δ/4 = 0.25 lies below the table
    assert!(ctx().b_bound(0.5, &table, 1.0).is_err());
    assert!(ctx().b_bound(0.5, &table, 2.0).is_ok());
}

#[test]
fn phi_values() {
    for (delta, oracle) in PHI_HALF {
        assert_tight(ctx().phi(0.5, 0.5, &one(), delta).unwrap().upper(), oracle, TIGHT);
    }
    let phi4 = ctx().phi(0.5, 0.5, &one(), 4.0).unwrap().upper_f64();
    assert!((61.9550..=61.9570).contains(&phi4));
}

#[test]
fn phi_delta_sweep() {
    // Nonincreasing on {1, 2, 4}; the δ/8 term makes Φ grow again at δ = 8.
    let vals: Vec<f64> = [1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|d| ctx().phi(0.5, 0.5, &one(), *d).unwrap().upper_f64())
        .collect();
    assert!(vals[0] >= vals[1] && vals[1] >= vals[2]);
    assert!(vals[3] > vals[2]);
}

#[test]
fn psi_values() {
    let base = ctx().psi(2, &[0.5, 0.5], &one(), 4.0).unwrap();
    let phi = ctx().phi(0.5, 0.5, &one(), 4.0).unwrap();
    assert_eq!(base, phi);
    assert_tight(ctx().psi(3, &[0.5; 3], &one(), 4.0).unwrap().upper(), PSI3_HALF_4, TIGHT);
    assert_tight(ctx().psi(4, &[0.5; 4], &one(), 4.0).unwrap().upper(), PSI4_HALF_4, TIGHT);
    assert_tight(ctx().psi(3, &[0.5; 3], &one(), 1.0).unwrap().upper(), PSI3_HALF_1, TIGHT);
}

#[test]
fn psi_nondecreasing_in_m() {
    let v: Vec<Float> = (2..=4)
        .map(|m| ctx().psi(m, &vec![0.5; m], &one(), 4.0).unwrap().upper().clone())
        .collect();
    assert!(v[0] <= v[1] && v[1] <= v[2]);
}

#[test]
fn psi_mixed_parameters() {
    // alphas (1/3, 1/2, 2/3) as machine floats, K(ε) = 2 + 1/ε.
    let k = BoundFn::inverse_power(2.0, 1.0, 1.0).unwrap();
    let v = ctx().psi(3, &[1.0 / 3.0, 0.5, 2.0 / 3.0], &k, 1.0).unwrap();
    let oracle = 843_161_548_589.042_8_f64;
    assert!((v.upper_f64() / oracle - 1.0).abs() < 1e-9);
}

#[test]
fn psi_argument_errors() {
    assert!(ctx().psi(1, &[0.5], &one(), 1.0).is_err());
    assert!(ctx().psi(3, &[0.5, 0.5], &one(), 1.0).is_err());
    assert!(ctx().psi(2, &[0.5, 1.0], &one(), 1.0).is_err());
}

#[test]
fn omega_values() {
    assert_eq!(*ctx().omega(0.5, 1.0, 2.0).unwrap().upper(), 0.25);
    assert_eq!(*ctx().omega(0.5, 2.0, 2.0).unwrap().upper(), 0.125);
    for (a, b, e) in [(0.1, 1.0, 0.3), (0.25, 3.0, 2.0), (0.9, 0.5, 1.5)] {
        let x = ctx().omega(a, b, e).unwrap();
        let y = ctx().omega(1.0 - a, b, e).unwrap();
        // 1 − a is exact for these inputs' rational images up to one rounding
        assert!((x.upper_f64() / y.upper_f64() - 1.0).abs() < 1e-15);
    }
    assert!(ctx().omega(0.5, 0.0, 1.0).is_err());
    assert!(ctx().omega(0.5, 1.0, -1.0).is_err());
}

fn identity_modulus() -> Modulus {
    Modulus::Custom(Arc::new(|_b: &Rational, e: &Rational| Ok(e.clone())))
}

#[test]
fn varphi_values() {
    let c = ctx();
    assert_eq!(*c.varphi(6.0, 1.0, 1.0, &one(), &identity_modulus()).unwrap().value(), 8);
    let w = Modulus::averaged(0.5).unwrap();
    assert_eq!(*c.varphi(6.0, 1.0, 1.0, &one(), &w).unwrap().value(), 100);
    assert_eq!(*c.varphi(30.0, 1.0, 1.0, &one(), &identity_modulus()).unwrap().value(), 0);
    assert!(c.varphi(0.0, 1.0, 1.0, &one(), &w).is_err());
}

#[test]
fn sigma_values() {
    let c = ctx();
    let pins: [(f64, &str); 4] = [
        (6.0, "11685454"),
        (3.0, "1673625647"),
        (1.0, "7124287075659"),
        (0.5, "1625589056628314"),
    ];
    let mut prev = Integer::new();
    for (eps, expected) in pins {
        let s = c.sigma(2, &[0.5, 0.5], &one(), 1.0, 1.0, eps).unwrap();
        assert_eq!(s.to_string(), expected, "eps = {eps}");
        assert!(*s.value() >= prev);
        prev = s.value().clone();
    }
    assert_eq!(c.sigma(2, &[0.5, 0.5], &one(), 1.0, 1.0, 6.0).unwrap().sci_preview(), "1.17e7");
    assert_eq!(
        c.sigma(2, &[0.5, 0.5], &one(), 2.0, 0.5, 1.0).unwrap().to_string(),
        "1798292073270"
    );
    assert_eq!(
        c.sigma(3, &[0.5; 3], &one(), 1.0, 1.0, 1.0).unwrap().to_string(),
        "673412951866790737719574870037076"
    );
    // Ψ(δ) ≥ 0.6875·δ keeps the first factor at 1 or more, even for huge ε
    assert_eq!(*c.sigma(2, &[0.01, 0.01], &one(), 1.0, 1.0, 1e30).unwrap().value(), 1);
    assert_eq!(*c.sigma(2, &[0.01, 0.01], &one(), 1.0, 1.0, 1e3).unwrap().value(), 1);
}
