use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use asreg_core::certify::{run_certification, BoundMode, CertConfig, CertReport, Status, Suite};
use asreg_core::instances::{builtin_corpus, parse_instance, Instance};
use asreg_core::operators::Vector;
use asreg_core::rates::{RateContext, RateIndex};
use serde_json::json;

use crate::plot::{render_svg, Marker};
use crate::{CertifyArgs, CliResult, CorpusArgs, Failure, PlotArgs, RateArgs, RunArgs, Source};

fn io_err(path: &Path, e: io::Error) -> Failure {
    Failure::usage(format!("{}: {e}", path.display()))
}

fn load(source: &Source) -> CliResult<Vec<Instance>> {
    if let Some(path) = &source.instance {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let inst = parse_instance(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        return Ok(vec![inst]);
    }
    match source.corpus.as_deref() {
        Some("builtin") => {
            let corpus = builtin_corpus();
            match &source.id {
                None => Ok(corpus),
                Some(id) => corpus
                    .into_iter()
                    .find(|i| i.id() == id)
                    .map(|i| vec![i])
                    .ok_or_else(|| Failure::usage(format!("no builtin instance with id `{id}`"))),
            }
        }
        Some(other) => Err(Failure::usage(format!("unknown corpus `{other}`; only `builtin` exists"))),
        None => Err(Failure::usage("one of --instance PATH or --corpus builtin is required")),
    }
}

fn load_one(source: &Source) -> CliResult<Instance> {
    let mut all = load(source)?;
    if all.len() != 1 {
        return Err(Failure::usage("select a single instance with --id"));
    }
    Ok(all.remove(0))
}

fn check_eps(eps: &[f64]) -> CliResult {
    match eps.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        Some(bad) => Err(Failure::usage(format!("--eps values must be positive, got {bad}"))),
        None => Ok(()),
    }
}

fn context(bits: u32) -> CliResult<RateContext> {
    RateContext::new(bits).map_err(|e| Failure::usage(format!("--precision: {e}")))
}

fn sigma(ctx: &RateContext, inst: &Instance, eps: f64) -> CliResult<RateIndex> {
    Ok(ctx.sigma(inst.m(), &inst.alphas(), inst.k(), inst.b(), inst.d(), eps)?)
}

fn create(path: &Path) -> CliResult<BufWriter<fs::File>> {
    fs::File::create(path).map(BufWriter::new).map_err(|e| io_err(path, e))
}

/// One row per `ε`: the `Ψ` bound at `δ = ε/6` and `Σ(ε)`.
pub fn cmd_rate(args: &RateArgs) -> CliResult {
    let corpus = load(&args.source)?;
    check_eps(&args.eps)?;
    let ctx = context(args.precision)?;
    let mut file = args.out.as_deref().map(create).transpose()?;
    if let Some(f) = file.as_mut() {
        writeln!(f, "id,eps,delta,psi_upper,sigma").map_err(|e| io_err(args.out.as_deref().unwrap(), e))?;
    }
    println!("{:<30} {:>10} {:>10} {:>12} {:>10} {:>7}", "id", "eps", "delta", "psi(delta)", "sigma", "digits");
    for inst in &corpus {
        let grid = if args.eps.is_empty() { inst.eps_grid().to_vec() } else { args.eps.clone() };
        for eps in grid {
            let delta = eps / 6.0;
            let psi = ctx.psi(inst.m(), &inst.alphas(), inst.k(), delta)?.upper_f64();
            let s = sigma(&ctx, inst, eps)?;
            println!(
                "{:<30} {:>10} {:>10.3e} {:>12.3e} {:>10} {:>7}",
                inst.id(),
                eps,
                delta,
                psi,
                s.sci_preview(),
                s.digits()
            );
            if let Some(f) = file.as_mut() {
                writeln!(f, "{},{eps:e},{delta:e},{psi:e},{s}", inst.id())
                    .map_err(|e| io_err(args.out.as_deref().unwrap(), e))?;
            }
        }
    }
    if let (Some(mut f), Some(path)) = (file, args.out.as_deref()) {
        f.flush().map_err(|e| io_err(path, e))?;
    }
    Ok(())
}

/// Writes `n,displacement` rows. A non-finite iterate stops the run after
/// the rows already written.
pub fn cmd_run(args: &RunArgs) -> CliResult {
    if args.steps == 0 {
        return Err(Failure::usage("--steps must be at least 1"));
    }
    let inst = load_one(&args.source)?;
    let mut out: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let wr = |e: io::Error| Failure::usage(format!("write failed: {e}"));
    writeln!(out, "n,displacement").map_err(wr)?;
    let map = inst.map();
    let mut x: Vector = inst.x0().clone();
    for n in 0..args.steps {
        let next = map.eval(&x)?;
        if !next.is_finite() {
            out.flush().map_err(wr)?;
            return Err(Failure::violations(format!(
                "non-finite iterate at step {}; {n} rows written",
                n + 1
            )));
        }
        writeln!(out, "{n},{:.16e}", x.distance(&next)).map_err(wr)?;
        x = next;
    }
    out.flush().map_err(wr)?;
    Ok(())
}

fn parse_suites(names: &[String]) -> CliResult<Vec<Suite>> {
    if names.is_empty() {
        return Ok(Suite::ALL.to_vec());
    }
    names
        .iter()
        .map(|n| {
            Suite::from_name(n.trim()).ok_or_else(|| {
                let known: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                Failure::usage(format!("unknown suite `{n}`; known: {}", known.join(", ")))
            })
        })
        .collect()
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Inconclusive => "INCONCLUSIVE",
        Status::Error => "ERROR",
    }
}

/// Runs the suites and writes the JSON report; fails when any report has
/// violations or crashed.
pub fn cmd_certify(args: &CertifyArgs) -> CliResult {
    if args.samples == 0 || args.steps == 0 {
        return Err(Failure::usage("--samples and --steps must be at least 1"));
    }
    check_eps(&args.eps)?;
    let corpus = load(&args.source)?;
    let config = CertConfig {
        seed: args.seed,
        suites: parse_suites(&args.suites)?,
        samples: args.samples,
        uc_draws: args.samples.saturating_mul(10),
        rate_cap: args.steps,
        eps_grid: (!args.eps.is_empty()).then(|| args.eps.clone()),
        precision_bits: context(args.precision)?.precision_bits(),
        mode: if args.falsify { BoundMode::Falsified } else { BoundMode::Genuine },
        record_runtime: args.runtime,
        ..CertConfig::default()
    };
    let reports = run_certification(&corpus, &config)?;
    let text = report_json(&config, &reports);
    match &args.report {
        Some(p) => fs::write(p, &text).map_err(|e| io_err(p, e))?,
        None => print!("{text}"),
    }
    for r in &reports {
        eprintln!(
            "{:<12} {:<24} {:<30} checks {:>7}  inconclusive {:>3}  violations {}",
            status_word(r.status),
            r.suite,
            r.instance,
            r.conclusive,
            r.inconclusive,
            r.violation_count
        );
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(Failure::violations(format!("{failed} of {} reports failed", reports.len())));
    }
    Ok(())
}

/// The documented report document: run settings, a summary and the reports.
pub fn report_json(config: &CertConfig, reports: &[CertReport]) -> String {
    let count = |s: Status| reports.iter().filter(|r| r.status == s).count();
    let doc = json!({
        "seed": config.seed,
        "precision_bits": config.precision_bits,
        "mode": config.mode,
        "samples": config.samples,
        "summary": {
            "reports": reports.len(),
            "pass": count(Status::Pass),
            "fail": count(Status::Fail),
            "inconclusive": count(Status::Inconclusive),
            "error": count(Status::Error),
        },
        "reports": reports,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
    s.push('\n');
    s
}

fn read_csv(path: &Path) -> CliResult<Vec<(u64, f64)>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let bad = |line: usize, what: &str| Failure::usage(format!("{}:{line}: {what}", path.display()));
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == "n,displacement" => {}
        _ => return Err(bad(1, "expected the header `n,displacement`")),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let (n, d) = line.split_once(',').ok_or_else(|| bad(i + 1, "expected two fields"))?;
        let n: u64 = n.trim().parse().map_err(|_| bad(i + 1, "step is not an integer"))?;
        let d: f64 = d.trim().parse().map_err(|_| bad(i + 1, "displacement is not a number"))?;
        if !(d.is_finite() && d >= 0.0) {
            return Err(bad(i + 1, "displacement must be finite and nonnegative"));
        }
        rows.push((n, d));
    }
    if rows.is_empty() {
        return Err(Failure::usage(format!("{}: no data rows", path.display())));
    }
    Ok(rows)
}

pub fn cmd_plot(args: &PlotArgs) -> CliResult {
    let rows = read_csv(&args.csv)?;
    check_eps(&args.eps)?;
    let mut markers = Vec::new();
    if args.source.instance.is_some() || args.source.corpus.is_some() {
        let inst = load_one(&args.source)?;
        let ctx = context(args.precision)?;
        let grid = if args.eps.is_empty() { inst.eps_grid().to_vec() } else { args.eps.clone() };
        for eps in grid {
            markers.push(Marker {
                eps,
                sigma: sigma(&ctx, &inst, eps)?,
            });
        }
    }
    let svg = render_svg(&rows, &markers);
    fs::write(&args.out, svg).map_err(|e| io_err(&args.out, e))
}

pub fn cmd_corpus(args: &CorpusArgs) -> CliResult {
    let corpus = builtin_corpus();
    match &args.export {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
            for inst in &corpus {
                let path = dir.join(format!("{}.json", inst.id()));
                fs::write(&path, inst.to_canonical_json()).map_err(|e| io_err(&path, e))?;
            }
            eprintln!("wrote {} instances to {}", corpus.len(), dir.display());
        }
        None => {
            let mut out = io::stdout().lock();
            for inst in &corpus {
                let alphas: Vec<String> = inst.alphas().iter().map(|a| format!("{a:.4}")).collect();
                let line = writeln!(out, "{:<30} dim {:>2}  m {}  alphas [{}]", inst.id(), inst.dim(), inst.m(), alphas.join(", "));
                // a closed pipe (`| head`) is not an error worth reporting
                if line.is_err() {
                    break;
                }
            }
        }
    }
    Ok(())
}
