use std::time::Instant;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::suites::{
    check_averaged_correspondence, check_rate, check_rectangularity, check_sne_modulus, check_sne_rotation_family,
    check_uc_lemma, check_witness,
};
use super::{BoundMode, CertReport, Sampler, SuiteOptions, DEFAULT_SLACK};
use crate::error::Result;
use crate::instances::Instance;
use crate::operators::sampling::{log_uniform, random_direction};
use crate::operators::{MonotoneSource, Vector};
use crate::rates::{RateContext, DEFAULT_PRECISION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Rate,
    Rectangularity,
    SneModulus,
    AveragedCorrespondence,
    Witness,
    UcLemma,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Rate,
        Suite::Rectangularity,
        Suite::SneModulus,
        Suite::AveragedCorrespondence,
        Suite::Witness,
        Suite::UcLemma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Rate => "rate",
            Suite::Rectangularity => "rectangularity",
            Suite::SneModulus => "sne_modulus",
            Suite::AveragedCorrespondence => "averaged_correspondence",
            Suite::Witness => "witness",
            Suite::UcLemma => "uc_lemma",
        }
    }

    pub fn from_name(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertConfig {
    pub seed: u64,
    pub suites: Vec<Suite>,
    /// Points or pairs per sampled suite and target.
    pub samples: usize,
    /// Draws for the uniform convexity suite.
    pub uc_draws: usize,
    pub uc_dims: Vec<usize>,
    pub norm_cap: f64,
    /// Largest Picard step count spent on a single rate check.
    pub rate_cap: u64,
    pub witness_budget: usize,
    pub witness_deltas: Vec<f64>,
    /// Overrides each instance's own grid when set.
    pub eps_grid: Option<Vec<f64>>,
    pub precision_bits: u32,
    pub slack: f64,
    pub mode: BoundMode,
    pub record_runtime: bool,
}

impl Default for CertConfig {
    fn default() -> Self {
        CertConfig {
            seed: 0,
            suites: Suite::ALL.to_vec(),
            samples: 10_000,
            uc_draws: 100_000,
            uc_dims: vec![2, 8, 32],
            norm_cap: 1e3,
            rate_cap: 200_000,
            witness_budget: 10_000,
            witness_deltas: vec![4.0, 1.0],
            eps_grid: None,
            precision_bits: DEFAULT_PRECISION,
            slack: DEFAULT_SLACK,
            mode: BoundMode::Genuine,
            record_runtime: false,
        }
    }
}

/// A cocoercive source with its constant.
#[derive(Clone, Debug)]
pub struct CatalogueEntry {
    pub name: &'static str,
    pub source: MonotoneSource,
    pub beta: f64,
}

/// Five cocoercive sources: `I`, `diag(1, 2)`, `2I`, a tridiagonal SPD
/// matrix in dimension 8 and a rank-deficient quadratic gradient in
/// dimension 16.
pub fn standard_sources() -> Vec<CatalogueEntry> {
    let entry = |name, src: MonotoneSource| {
        let beta = src.cocoercivity_constant().expect("symmetric catalogue source");
        CatalogueEntry {
            name,
            source: src.with_beta(beta).expect("exact constant"),
            beta,
        }
    };
    let lap = DMatrix::from_fn(8, 8, |i, j| match i.abs_diff(j) {
        0 => 2.0,
        1 => -1.0,
        _ => 0.0,
    });
    // rank 8: B Bᵀ with B the first 8 columns of a scaled Hadamard-like pattern
    let b = DMatrix::from_fn(16, 8, |i, j| if (i * j).count_ones() % 2 == 0 { 0.25 } else { -0.25 });
    let hessian = &b * b.transpose();
    let shift = Vector::new((0..16).map(|i| (i as f64 - 7.5) / 8.0).collect()).expect("finite");
    vec![
        entry("identity-2", MonotoneSource::linear(DMatrix::identity(2, 2)).expect("psd")),
        entry("diag-1-2", MonotoneSource::linear(DMatrix::from_diagonal(&nalgebra::dvector![1.0, 2.0])).expect("psd")),
        entry("twice-identity-3", MonotoneSource::linear(DMatrix::identity(3, 3) * 2.0).expect("psd")),
        entry("laplacian-8", MonotoneSource::linear(lap).expect("psd")),
        entry("quadratic-rankdef-16", MonotoneSource::quadratic_gradient(hessian, shift).expect("psd")),
    ]
}

/// FNV-1a over the run seed, suite and target names.
pub fn derive_seed(seed: u64, suite: &str, target: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in seed.to_le_bytes().iter().chain(suite.as_bytes()).chain([0u8].iter()).chain(target.as_bytes()) {
        h ^= u64::from(*byte);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

type Task<'a> = (Suite, String, Box<dyn Fn(u64) -> Result<CertReport> + Send + Sync + 'a>);

/// Runs the selected suites over `corpus` and the standard source catalogue.
/// Reports come back in a fixed order: by suite, then by target.
pub fn run_certification(corpus: &[Instance], config: &CertConfig) -> Result<Vec<CertReport>> {
    let ctx = RateContext::new(config.precision_bits)?;
    let opts = SuiteOptions {
        slack: config.slack,
        mode: config.mode,
    };
    let sources = standard_sources();
    let mut suites = config.suites.clone();
    suites.sort();
    suites.dedup();

    let mut tasks: Vec<Task<'_>> = Vec::new();
    for suite in suites {
        match suite {
            Suite::Rate => {
                for inst in corpus {
                    let grid = config.eps_grid.clone().unwrap_or_else(|| inst.eps_grid().to_vec());
                    let (ctx, cap) = (&ctx, config.rate_cap);
                    tasks.push((suite, inst.id().into(), Box::new(move |_| check_rate(inst, &grid, cap, ctx, &opts))));
                }
            }
            Suite::Rectangularity => {
                for src in &sources {
                    let ctx = &ctx;
                    tasks.push((
                        suite,
                        src.name.into(),
                        Box::new(move |seed| {
                            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0b0c);
                            let dim = src.source.dim();
                            let b_pt = random_direction(&mut rng, dim).scale(log_uniform(&mut rng, 0.1, 10.0));
                            let c_pt = random_direction(&mut rng, dim).scale(log_uniform(&mut rng, 0.1, 10.0));
                            let sampler = Sampler::new(config.samples, config.norm_cap, seed)?;
                            check_rectangularity(&src.source, src.beta, &b_pt, &c_pt, &sampler, ctx, &opts)
                        }),
                    ));
                }
            }
            Suite::SneModulus => {
                for inst in corpus {
                    let ctx = &ctx;
                    tasks.push((
                        suite,
                        inst.id().into(),
                        Box::new(move |seed| {
                            let b = inst.b().max(1.0);
                            let sampler = Sampler::new(config.samples, b, seed)?;
                            check_sne_modulus(inst.map(), b, b / 4.0, &sampler, ctx, &opts)
                        }),
                    ));
                }
                let ctx = &ctx;
                tasks.push((
                    suite,
                    "scaled-rotation-family".into(),
                    Box::new(move |seed| {
                        let sampler = Sampler::new(config.samples, 10.0, seed)?;
                        check_sne_rotation_family(1.0, 0.1, &sampler, ctx, &opts)
                    }),
                ));
            }
            Suite::AveragedCorrespondence => {
                for src in &sources {
                    tasks.push((
                        suite,
                        src.name.into(),
                        Box::new(move |seed| {
                            let sampler = Sampler::new(config.samples, config.norm_cap, seed)?;
                            check_averaged_correspondence(&src.source, src.beta, &sampler, &opts)
                        }),
                    ));
                }
            }
            Suite::Witness => {
                for inst in corpus {
                    let ctx = &ctx;
                    let deltas = &config.witness_deltas;
                    let budget = config.witness_budget;
                    tasks.push((
                        suite,
                        inst.id().into(),
                        Box::new(move |_| check_witness(inst, deltas, budget, ctx, &opts)),
                    ));
                }
            }
            Suite::UcLemma => {
                tasks.push((
                    suite,
                    "hilbert".into(),
                    Box::new(move |seed| {
                        let sampler = Sampler::new(config.uc_draws, config.norm_cap, seed)?;
                        check_uc_lemma(&sampler, &config.uc_dims, &opts)
                    }),
                ));
            }
        }
    }

    Ok(tasks
        .par_iter()
        .map(|(suite, target, run)| {
            let seed = derive_seed(config.seed, suite.name(), target);
            let start = Instant::now();
            let mut report = match run(seed) {
                Ok(r) => r,
                Err(e) => CertReport::crashed(suite.name(), target, seed, &e),
            };
            report.suite = suite.name().into();
            report.instance = target.clone();
            report.seed = seed;
            if config.record_runtime {
                report.runtime_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            report
        })
        .collect())
}
