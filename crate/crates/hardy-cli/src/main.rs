//! Command-line runner: loads a scenario file, dispatches to the
//! verifier, and writes deterministic reports.
//!
//! Exit codes: 0 when everything passes (or the theorem does not apply),
//! 2 on a certified violation, 3 when the only failures are
//! inconclusive or errored checks, 1 on configuration or I/O errors.

mod scenario;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use hardy_core::error::{Error, Result};
use hardy_core::report::{render_csv, render_json};
use hardy_core::verifier::{
    extremal_search, verify, Scenario, SearchConfig, Verdict, VerificationReport,
};
use scenario::{apply_sweep, ScenarioFile};

#[derive(Parser)]
#[command(
    name = "hardy",
    version,
    about = "Numerical verification of Hardy-type inequalities on homogeneous groups"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check every corpus function against the scenario's inequality.
    Verify(RunArgs),
    /// Re-run the verification across the swept parameter values.
    Sweep(RunArgs),
    /// Evaluate gates and constants only, skipping the corpus.
    Constants(RunArgs),
    /// Search for ratio-maximizing profiles in the candidate family.
    Search(SearchArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario description file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Directory for report files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Replaces the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Replaces the evaluation budget (0 = unlimited).
    #[arg(long)]
    budget: Option<u64>,
    /// Report formats to write (json, csv); replaces the scenario list.
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<String>>,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Independent optimizer restarts.
    #[arg(long, default_value_t = 2)]
    restarts: usize,
    /// Cap on objective evaluations per restart.
    #[arg(long, default_value_t = 60)]
    evals: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let outcome = match &cli.cmd {
        Cmd::Verify(args) => run_verify(args),
        Cmd::Sweep(args) => run_sweep(args),
        Cmd::Constants(args) => run_constants(args),
        Cmd::Search(args) => run_search(args),
    };
    eprintln!("elapsed: {:.3}s", started.elapsed().as_secs_f64());
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn load(args: &RunArgs) -> Result<(ScenarioFile, Scenario)> {
    let text = fs::read_to_string(&args.scenario).map_err(|e| {
        Error::config(format!("cannot read scenario {}: {e}", args.scenario.display()))
    })?;
    let file = ScenarioFile::parse(&text)?;
    let sc = file.resolve(args.seed, args.budget)?;
    Ok((file, sc))
}

fn formats(file: &ScenarioFile, args: &RunArgs) -> Result<Vec<String>> {
    match &args.format {
        None => file.output_formats(),
        Some(fs) => {
            for f in fs {
                if f != "json" && f != "csv" {
                    return Err(Error::config(format!(
                        "unknown report format '{f}'; expected json or csv"
                    )));
                }
            }
            Ok(fs.clone())
        }
    }
}

fn write_reports(
    out_dir: &Path,
    stem: &str,
    formats: &[String],
    sc: &Scenario,
    rep: &VerificationReport,
) -> Result<()> {
    fs::create_dir_all(out_dir)
        .map_err(|e| Error::config(format!("cannot create {}: {e}", out_dir.display())))?;
    for format in formats {
        let path = out_dir.join(format!("{stem}.{format}"));
        let body = match format.as_str() {
            "json" => render_json(sc, rep),
            _ => render_csv(rep),
        };
        fs::write(&path, body)
            .map_err(|e| Error::config(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Human summary on stdout; layout is fixed so runs stay comparable.
fn summarize(rep: &VerificationReport) {
    println!("theorem: {}", rep.theorem.name());
    println!("applicable: {}", rep.applicable);
    for g in &rep.gates {
        println!(
            "gate {} = {:.6e} required={} pass={}",
            g.name, g.value, g.required, g.pass
        );
    }
    for c in &rep.constants {
        println!("constant {} = {:.6e}", c.name, c.value);
    }
    for r in rep.results.iter().chain(rep.substeps.iter()) {
        if r.verdict == Verdict::Error {
            println!("result {}: error ({})", r.id, r.note);
        } else {
            println!(
                "result {}: {} ratio={:.6e} margin={:.6e}",
                r.id,
                r.verdict.name(),
                r.ratio,
                r.margin
            );
        }
    }
    if let Some(s) = &rep.search {
        println!(
            "search best={:.6e} params={:?} evaluations={} converged={}",
            s.best_value, s.best_params, s.evaluations, s.converged
        );
    }
    println!("evaluations: {}", rep.evaluations);
    println!("verdict: {}", rep.worst_verdict().name());
}

/// Worst verdict across reports, mapped onto the exit-code contract.
fn exit_for(reports: &[&VerificationReport]) -> ExitCode {
    let mut code = 0u8;
    for rep in reports {
        let this = match rep.worst_verdict() {
            Verdict::Pass | Verdict::NotApplicable => 0,
            Verdict::Inconclusive | Verdict::Error => 3,
            Verdict::Violation => 2,
        };
        // Violations dominate; inconclusive outranks a clean pass.
        code = match (code, this) {
            (2, _) | (_, 2) => 2,
            (3, _) | (_, 3) => 3,
            _ => 0,
        };
    }
    ExitCode::from(code)
}

fn run_verify(args: &RunArgs) -> Result<ExitCode> {
    let (file, sc) = load(args)?;
    let rep = verify(&sc)?;
    summarize(&rep);
    write_reports(&args.out, file.output_stem(), &formats(&file, args)?, &sc, &rep)?;
    Ok(exit_for(&[&rep]))
}

fn run_sweep(args: &RunArgs) -> Result<ExitCode> {
    let (file, base) = load(args)?;
    let sweep = file.sweep.as_ref().ok_or_else(|| {
        Error::config("the sweep command needs a [sweep] section in the scenario".to_string())
    })?;
    if sweep.values.is_empty() {
        return Err(Error::config("sweep values must not be empty".to_string()));
    }
    let stem = file.output_stem();
    let fmts = formats(&file, args)?;
    let mut reports = Vec::with_capacity(sweep.values.len());
    let mut scenarios = Vec::with_capacity(sweep.values.len());
    for (i, value) in sweep.values.iter().enumerate() {
        let sc = apply_sweep(&base, &sweep.parameter, *value)?;
        let rep = verify(&sc)?;
        println!("--- sweep {} = {:.6e} ---", sweep.parameter, value);
        summarize(&rep);
        write_reports(&args.out, &format!("{stem}-{i:02}"), &fmts, &sc, &rep)?;
        scenarios.push(sc);
        reports.push(rep);
    }
    Ok(exit_for(&reports.iter().collect::<Vec<_>>()))
}

fn run_constants(args: &RunArgs) -> Result<ExitCode> {
    let (file, mut sc) = load(args)?;
    sc.corpus.clear();
    let rep = verify(&sc)?;
    summarize(&rep);
    write_reports(&args.out, file.output_stem(), &formats(&file, args)?, &sc, &rep)?;
    Ok(exit_for(&[&rep]))
}

fn run_search(args: &SearchArgs) -> Result<ExitCode> {
    let (file, sc) = load(&args.run)?;
    let cfg = SearchConfig { restarts: args.restarts, max_evals: args.evals };
    let rep = extremal_search(&sc, &cfg)?;
    summarize(&rep);
    write_reports(&args.run.out, file.output_stem(), &formats(&file, &args.run)?, &sc, &rep)?;
    Ok(exit_for(&[&rep]))
}
