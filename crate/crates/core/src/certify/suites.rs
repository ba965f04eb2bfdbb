use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::picard::run_picard;
use super::{Sampler, SuiteOptions, Tally, Witness};
use crate::error::{Error, Result};
use crate::instances::Instance;
use crate::operators::sampling::{log_uniform, random_direction};
use crate::operators::{averaged_from_cocoercive, AveragedMap, MonotoneSource, NonexpansiveMap, Vector};
use crate::rates::{RateContext, RateIndex};

use super::CertReport;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random direction with a log-uniform norm in `[lo, hi]`.
fn vector_in(rng: &mut ChaCha8Rng, dim: usize, lo: f64, hi: f64) -> Vector {
    random_direction(rng, dim).scale(log_uniform(rng, lo, hi))
}

/// Unit vector orthogonal to the unit vector `u` (needs `dim ≥ 2`).
fn orthogonal_unit(rng: &mut ChaCha8Rng, u: &Vector) -> Vector {
    loop {
        let w = random_direction(rng, u.dim());
        let w = w.lincomb(1.0, u, -w.dot(u));
        let n = w.norm();
        if n > 1e-6 {
            return w.scale(1.0 / n);
        }
    }
}

fn check_rate_inputs(inst: &Instance, eps_grid: &[f64], cap: u64) -> Result<()> {
    if cap == 0 {
        return Err(Error::invalid("cap must be at least 1"));
    }
    if eps_grid.is_empty() || eps_grid.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::invalid("eps grid must be a nonempty list of positive numbers"));
    }
    let x0 = inst.x0();
    if inst.b() < x0.norm() {
        return Err(Error::invalid(format!("b = {} is below ‖x0‖ = {}", inst.b(), x0.norm())));
    }
    let disp = x0.distance(&inst.map().eval(x0)?);
    if inst.d() < disp {
        return Err(Error::invalid(format!("d = {} is below ‖x0 − R x0‖ = {disp}", inst.d())));
    }
    Ok(())
}

/// First-hit indices against `Σ(ε)` for every `ε` in the grid.
pub fn check_rate(
    inst: &Instance,
    eps_grid: &[f64],
    cap: u64,
    ctx: &RateContext,
    opts: &SuiteOptions,
) -> Result<CertReport> {
    let alphas = inst.alphas();
    let sigma = |eps: f64| -> Result<RateIndex> {
        match opts.mode {
            super::BoundMode::Genuine => ctx.sigma(inst.m(), &alphas, inst.k(), inst.b(), inst.d(), eps),
            super::BoundMode::Falsified => Ok(RateIndex::zero()),
        }
    };
    check_rate_with(inst, eps_grid, cap, &sigma, opts)
}

/// [`check_rate`] against an arbitrary rate function.
pub fn check_rate_with(
    inst: &Instance,
    eps_grid: &[f64],
    cap: u64,
    sigma: &dyn Fn(f64) -> Result<RateIndex>,
    opts: &SuiteOptions,
) -> Result<CertReport> {
    opts.validate()?;
    check_rate_inputs(inst, eps_grid, cap)?;
    let mut tally = Tally::new(opts);

    let rates = eps_grid.iter().map(|e| sigma(*e)).collect::<Result<Vec<_>>>()?;
    // scanning [0, Σ] decides the check; beyond `cap` it is left open
    let caps: Vec<u64> = rates
        .iter()
        .map(|s| match s.value().to_u64() {
            Some(v) if v < cap => v + 1,
            _ => cap,
        })
        .collect();
    let steps = *caps.iter().max().expect("nonempty grid");
    let min_eps = eps_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let traj = run_picard(inst.map(), inst.x0(), steps as usize, Some(min_eps))?;

    for ((eps, rate), cap) in eps_grid.iter().zip(&rates).zip(&caps) {
        tally.sample();
        let hit = traj.first_hit(*eps).map(|n| n as u64).filter(|n| n < cap);
        let sigma_str = rate.to_string();
        match hit {
            Some(n) => {
                let ok = *rate.value() >= n;
                tally.record(ok, n as f64, rate.value().to_f64(), || {
                    json!({ "eps": eps, "first_hit": n, "sigma": sigma_str })
                });
            }
            None if *rate.value() < *cap => {
                tally.record(false, *cap as f64, rate.value().to_f64(), || {
                    json!({ "eps": eps, "exceeded": cap, "sigma": sigma_str })
                });
            }
            None => tally.inconclusive(),
        }
        tally.detail(json!({
            "eps": eps,
            "first_hit": hit,
            "cap": cap,
            "sigma": rate.to_string(),
            "sigma_preview": rate.sci_preview(),
        }));
    }

    // displacements of an averaged map never increase
    tally.sample();
    let rise = traj.max_increase();
    tally.check_le(rise, 0.0, || json!({ "check": "displacement_monotone", "steps": traj.displacements.len() }));

    Ok(tally.finish("rate", inst.id(), 0))
}

/// `⟨a − c, Ab − Aa⟩ ≤ Θ(β, ‖b‖, ‖c‖, ‖Ab‖)` over sampled `a`.
pub fn check_rectangularity(
    src: &MonotoneSource,
    beta: f64,
    b_pt: &Vector,
    c_pt: &Vector,
    sampler: &Sampler,
    ctx: &RateContext,
    opts: &SuiteOptions,
) -> Result<CertReport> {
    opts.validate()?;
    sampler.validate()?;
    let dim = src.dim();
    b_pt.check_dim(dim)?;
    c_pt.check_dim(dim)?;
    let src = src.clone().with_beta(beta)?;
    let ab = src.apply(b_pt)?;
    let positive = |v: f64| v.max(f64::MIN_POSITIVE);
    let (l1, l2, l3) = (positive(b_pt.norm()), positive(c_pt.norm()), positive(ab.norm()));
    let theta = ctx.theta(beta, l1, l2, l3)?.upper_f64();
    let bound = opts.bound(theta);

    let mut tally = Tally::new(opts);
    tally.detail(json!({ "beta": beta, "L1": l1, "L2": l2, "L3": l3, "theta": theta }));
    let mut rng = rng(sampler.seed);
    let mid = b_pt.lincomb(0.5, c_pt, 0.5);
    for i in 0..sampler.count {
        let a = match i {
            0 => b_pt.clone(),
            1 => c_pt.clone(),
            2 => mid.clone(),
            // around the maximiser (b + c)/2 of the linear symmetric case
            _ if i % 4 == 3 => mid.lincomb(1.0, &vector_in(&mut rng, dim, 1e-6, 1.0), 1.0),
            _ => vector_in(&mut rng, dim, sampler.norm_cap * 1e-6, sampler.norm_cap),
        };
        tally.sample();
        let lhs = (&a - c_pt).dot(&(&ab - &src.apply(&a)?));
        tally.check_le(lhs, bound, || json!({ "a": a }));
    }
    Ok(tally.finish("rectangularity", "", sampler.seed))
}

fn pair_within(rng: &mut ChaCha8Rng, dim: usize, b: f64, norm_cap: f64) -> (Vector, Vector) {
    let x = vector_in(rng, dim, norm_cap * 1e-6, norm_cap);
    let s = log_uniform(rng, b * 1e-9, b * (1.0 - 1e-12));
    let y = x.lincomb(1.0, &random_direction(rng, dim), s);
    (x, y)
}

/// One strong-nonexpansiveness check: if the gap is below `omega`, the
/// displacement difference must be below `eps`.
fn sne_check(
    tally: &mut Tally,
    map: &AveragedMap,
    x: &Vector,
    y: &Vector,
    b: f64,
    omega: f64,
    eps_bound: f64,
) -> Result<bool> {
    let sep = x.distance(y);
    if sep > b {
        return Ok(false);
    }
    let (rx, ry) = (map.eval(x)?, map.eval(y)?);
    let u = x - y;
    let ru = &rx - &ry;
    let gap = sep - ru.norm();
    if gap >= omega {
        return Ok(false);
    }
    let diff = (&u - &ru).norm();
    tally.check_lt(diff, eps_bound, || json!({ "x": x, "y": y, "gap": gap, "omega": omega }));
    Ok(true)
}

/// Sampled check of the modulus `ω_α(b, ε)` for an `α`-averaged map.
pub fn check_sne_modulus(
    map: &AveragedMap,
    b: f64,
    eps: f64,
    sampler: &Sampler,
    ctx: &RateContext,
    opts: &SuiteOptions,
) -> Result<CertReport> {
    opts.validate()?;
    sampler.validate()?;
    let omega = ctx.omega(map.alpha(), b, eps)?.enclosure().lower_f64();
    let eps_bound = opts.bound(eps);
    let dim = map.dim();
    let mut tally = Tally::new(opts);
    let mut rng = rng(sampler.seed);
    let mut filtered = 0u64;
    let mut i = 0;
    while i < sampler.count {
        let pairs: Vec<(Vector, Vector)> = match i % 4 {
            0 | 1 => vec![pair_within(&mut rng, dim, b, sampler.norm_cap)],
            2 => {
                // consecutive iterates far along an orbit: small gaps
                let mut x = vector_in(&mut rng, dim, 1e-3, sampler.norm_cap.min(b));
                for _ in 0..rng.random_range(1..64) {
                    x = map.eval(&x)?;
                }
                let y = map.eval(&x)?;
                vec![(x, y)]
            }
            _ => {
                // equal norms, small angle
                let x = vector_in(&mut rng, dim, 1e-3, sampler.norm_cap);
                let s = log_uniform(&mut rng, b * 1e-9, b * (1.0 - 1e-12));
                let y = if dim >= 2 {
                    let w = orthogonal_unit(&mut rng, &x.scale(1.0 / x.norm()));
                    let phi = 2.0 * (s / (2.0 * x.norm())).min(1.0).asin();
                    x.lincomb(phi.cos(), &w, phi.sin() * x.norm())
                } else {
                    x.lincomb(1.0, &Vector::basis(1, 0, 1.0), s)
                };
                vec![(x, y)]
            }
        };
        for (x, y) in pairs {
            tally.sample();
            if sne_check(&mut tally, map, &x, &y, b, omega, eps_bound)? {
                filtered += 1;
            }
            i += 1;
        }
    }
    tally.detail(json!({ "alpha": map.alpha(), "b": b, "eps": eps, "omega": omega, "filtered": filtered }));
    Ok(tally.finish("sne_modulus", "", sampler.seed))
}

/// Maps `½(id + rot_θ)` with `θ` chosen per pair so the gap sits just below
/// `ω_{1/2}(b, ε)`; the hardest case for the modulus.
pub fn check_sne_rotation_family(
    b: f64,
    eps: f64,
    sampler: &Sampler,
    ctx: &RateContext,
    opts: &SuiteOptions,
) -> Result<CertReport> {
    opts.validate()?;
    sampler.validate()?;
    let omega = ctx.omega(0.5, b, eps)?.enclosure().lower_f64();
    let eps_bound = opts.bound(eps);
    let mut tally = Tally::new(opts);
    let mut rng = rng(sampler.seed);
    let mut filtered = 0u64;
    let mut worst: f64 = 0.0;
    for i in 0..sampler.count {
        let dim = if i % 2 == 0 { 2 } else { 8 };
        let s = log_uniform(&mut rng, b * 1e-6, b * (1.0 - 1e-12));
        // gap of a pair at distance s is s(1 − cos(θ/2)) when it spans a rotation plane
        let ratio = omega / s;
        let half = if ratio >= 1.0 {
            std::f64::consts::FRAC_PI_2
        } else {
            (1.0 - ratio).acos() * (1.0 - 1e-6)
        };
        let map = AveragedMap::new(0.5, NonexpansiveMap::rotation(dim, 2.0 * half, 1.0)?)?;
        let x = vector_in(&mut rng, dim, 1e-3, sampler.norm_cap);
        let mut dir = Vector::basis(dim, 0, 1.0);
        if dim > 2 {
            // stay in one rotation plane so the closed form applies
            let t: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            dir = dir.lincomb(t.cos(), &Vector::basis(dim, 1, 1.0), t.sin());
        }
        let y = x.lincomb(1.0, &dir, s);
        tally.sample();
        if sne_check(&mut tally, &map, &x, &y, b, omega, eps_bound)? {
            filtered += 1;
            worst = worst.max(s * half.sin());
        }
    }
    tally.detail(json!({ "b": b, "eps": eps, "omega": omega, "filtered": filtered, "largest_difference": worst }));
    Ok(tally.finish("sne_modulus", "scaled-rotation-family", sampler.seed))
}

/// The nonexpansive part of `R_A` for a `β`-cocoercive `A`.
pub fn check_averaged_correspondence(
    src: &MonotoneSource,
    beta: f64,
    sampler: &Sampler,
    opts: &SuiteOptions,
) -> Result<CertReport> {
    opts.validate()?;
    sampler.validate()?;
    let r = averaged_from_cocoercive(src.clone(), beta)?;
    let t = r.nonexpansive_part();
    let dim = src.dim();
    let mut tally = Tally::new(opts);
    tally.detail(json!({ "beta": beta, "alpha": r.alpha() }));
    let mut rng = rng(sampler.seed);
    for i in 0..sampler.count {
        let x = vector_in(&mut rng, dim, sampler.norm_cap * 1e-6, sampler.norm_cap);
        let y = if i % 2 == 0 {
            vector_in(&mut rng, dim, sampler.norm_cap * 1e-6, sampler.norm_cap)
        } else {
            x.lincomb(1.0, &vector_in(&mut rng, dim, 1e-6, 1.0), 1.0)
        };
        tally.sample();
        let lhs = t.eval(&x)?.distance(&t.eval(&y)?);
        let rhs = opts.bound(x.distance(&y));
        tally.check_le(lhs, rhs, || json!({ "x": x, "y": y }));
    }
    Ok(tally.finish("averaged_correspondence", "", sampler.seed))
}

/// Finds `p` with `‖p − Rp‖ ≤ δ` by iterating from the origin and checks
/// `‖p‖ ≤ Ψ(m, {αᵢ}, K, δ)`.
pub fn check_witness(
    inst: &Instance,
    deltas: &[f64],
    budget: usize,
    ctx: &RateContext,
    opts: &SuiteOptions,
) -> Result<CertReport> {
    opts.validate()?;
    if budget == 0 {
        return Err(Error::invalid("witness budget must be at least 1"));
    }
    if deltas.is_empty() || deltas.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(Error::invalid("deltas must be a nonempty list of positive numbers"));
    }
    let alphas = inst.alphas();
    let map = inst.map();
    let mut tally = Tally::new(opts);
    for &delta in deltas {
        tally.sample();
        let psi = ctx.psi(inst.m(), &alphas, inst.k(), delta)?.upper_f64();
        let bound = opts.bound(psi);
        let mut x = Vector::zeros(inst.dim());
        let mut found = None;
        for step in 0..=budget {
            let rx = map.eval(&x)?;
            if !rx.is_finite() {
                return Err(Error::NonFinite { step });
            }
            let disp = x.distance(&rx);
            if disp <= delta {
                found = Some((step, disp));
                break;
            }
            x = rx;
        }
        match found {
            Some((step, disp)) => {
                let norm = x.norm();
                let w = Witness { p: x, delta: disp, norm };
                tally.check_le(norm, bound, || json!({ "delta": delta, "witness": &w }));
                tally.detail(json!({ "target_delta": delta, "step": step, "witness": w, "psi": psi }));
            }
            None => {
                tally.inconclusive();
                tally.detail(json!({ "target_delta": delta, "step": null, "psi": psi }));
            }
        }
    }
    Ok(tally.finish("witness", inst.id(), 0))
}

/// Hilbert-space uniform convexity: if `‖x‖, ‖y‖ ≤ d` and
/// `‖(1−α)x + αy‖ > (1 − 2α(1−α)ε²/8)·d` then `‖x − y‖ < ε·d`.
pub fn check_uc_lemma(sampler: &Sampler, dims: &[usize], opts: &SuiteOptions) -> Result<CertReport> {
    opts.validate()?;
    sampler.validate()?;
    if dims.is_empty() || dims.iter().any(|d| *d < 2 || *d > crate::operators::MAX_DIM) {
        return Err(Error::invalid("dimensions must lie in 2..=MAX_DIM"));
    }
    let mut tally = Tally::new(opts);
    let mut rng = rng(sampler.seed);
    for i in 0..sampler.count {
        let dim = dims[i % dims.len()];
        let eps = log_uniform(&mut rng, 1e-3, 2.0);
        let d = log_uniform(&mut rng, 1e-3, sampler.norm_cap);
        let alpha = rng.random_range(1e-3..1.0 - 1e-3);
        let u = random_direction(&mut rng, dim);
        let (x, y) = match (i / dims.len()) % 4 {
            0 => {
                let x = u.scale(d * rng.random::<f64>());
                let y = random_direction(&mut rng, dim).scale(d * rng.random::<f64>());
                (x, y)
            }
            1 => {
                // on the sphere, chord close to ε·d
                let w = orthogonal_unit(&mut rng, &u);
                let chord = eps * rng.random_range(0.98..1.02);
                let phi = 2.0 * (chord / 2.0).min(1.0).asin();
                (u.scale(d), u.lincomb(phi.cos() * d, &w, phi.sin() * d))
            }
            2 => {
                let x = u.scale(d);
                let y = x.lincomb(1.0, &random_direction(&mut rng, dim), d * log_uniform(&mut rng, 1e-12, 1e-3));
                (x, y)
            }
            _ => (u.scale(d), u.scale(-d * rng.random::<f64>())),
        };
        // rounding may push a constructed point just past d
        let d = d.max(x.norm()).max(y.norm());
        tally.sample();
        let mid = x.lincomb(1.0 - alpha, &y, alpha).norm();
        let threshold = (1.0 - 2.0 * alpha * (1.0 - alpha) * eps * eps / 8.0) * d;
        if mid > threshold {
            let rhs = opts.bound(eps * d);
            tally.check_lt(x.distance(&y), rhs, || {
                json!({ "x": x, "y": y, "alpha": alpha, "eps": eps, "d": d })
            });
        }
    }
    tally.detail(json!({ "dims": dims }));
    Ok(tally.finish("uc_lemma", "hilbert", sampler.seed))
}
