//! Command-line surface for the one-shot entanglement-distillation toolkit.
//!
//! Subcommands: measure, smooth, distill-pure, distill-ensemble, eoa,
//! spectrum, verify. Reports are JSON (default) or CSV, echo every derived
//! ε parameter, and carry a determinism hash that excludes timing, so
//! re-running a command with the same inputs and seed reproduces the hash
//! exactly. Exit codes: 0 success, 1 verification found violations,
//! 2 input error, 3 infeasible request.


use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use entdist::decomposition::SearchOptions;
use entdist::distillation::{
    ed_ensemble_lower, ed_ensemble_upper, ed_pure_bounds, ed_pure_upper_lemma_variant, eoa_one_shot, f_min, hashing_bound_pure, BoundWitness, EoaOptions,
};
use entdist::oracles::{state_diagnostics, verify_lemma_suite, OracleConfig};
use entdist::smoothing::{
    op_smoothed_i0, smooth_min_entropy, state_smoothed_i0, OpSmoothingOptions, SmoothingWitness,
};
use entdist::spectrum::{
    asymptotic_reference, entropic_eoa, inf_divergence_rate_estimate_with_cap, GammaGrid,
};

use entdist_cli::formats::{
    density_to_file, ensemble_to_file, finite_or_none, parse_ensemble_file, parse_state_file, CliError, CliResult, ParsedState, ReportRow, RunReport,
};

#[derive(Parser)]
#[command(
    name = "entdist",
    about = "One-shot entanglement-distillation bounds on explicit states",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Write the full report here (witnesses are placed next to it).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form entropies and information measures of one state.
    Measure {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Smoothed min-entropy and smoothed zero-coherent information.
    Smooth {
        #[arg(long)]
        state: PathBuf,
        /// Protocol-level ε (repeatable).
        #[arg(long, required = true)]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Pure-state one-shot distillation sandwich plus the hashing bound.
    DistillPure {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, required = true)]
        eps: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Ensemble distillation bounds under the average-fidelity budget.
    DistillEnsemble {
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long, required = true)]
        eps: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// One-shot and entropic entanglement of assistance.
    Eoa {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, required = true)]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Decomposition-search restarts.
        #[arg(long, default_value_t = 200)]
        restarts: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Finite-n information-spectrum diagnostics for a state pair.
    Spectrum {
        #[arg(long)]
        state: PathBuf,
        /// Reference state σ.
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
        /// γ grid as start:stop:step.
        #[arg(long, default_value = "-6:2:0.01", allow_hyphen_values = true)]
        grid: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the randomized lemma-inequality suite.
    Verify {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    let started = Instant::now();
    match run(cli, argv, started) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}

fn run(cli: Cli, argv: Vec<String>, started: Instant) -> CliResult<i32> {
    let (mut report, output, exit_code) = match cli.command {
        Command::Measure { state, output } => {
            (measure_report(&state, &argv)?, output, 0)
        }
        Command::Smooth {
            state,
            eps,
            seed,
            output,
        } => (smooth_report(&state, &eps, seed, &output, &argv)?, output, 0),
        Command::DistillPure { state, eps, output } => {
            (distill_pure_report(&state, &eps, &argv)?, output, 0)
        }
        Command::DistillEnsemble {
            ensemble,
            eps,
            output,
        } => (
            distill_ensemble_report(&ensemble, &eps, &output, &argv)?,
            output,
            0,
        ),
        Command::Eoa {
            state,
            eps,
            seed,
            restarts,
            output,
        } => (
            eoa_report(&state, &eps, seed, restarts, &output, &argv)?,
            output,
            0,
        ),
        Command::Spectrum {
            state,
            sigma,
            n_max,
            tol,
            grid,
            output,
        } => (
            spectrum_report(&state, &sigma, n_max, tol, &grid, &argv)?,
            output,
            0,
        ),
        Command::Verify {
            trials,
            seed,
            output,
        } => {
            let (report, violations) = verify_report(trials, seed, &argv)?;
            let code = if violations == 0 { 0 } else { 1 };
            (report, output, code)
        }
    };

    report.finalize(started.elapsed().as_millis());
    print_summary(&report);
    if let Some(path) = &output.out {
        let body = match output.format {
            Format::Json => report.to_json(),
            Format::Csv => report.to_csv(),
        };
        std::fs::write(path, body).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(exit_code)
}

fn print_summary(report: &RunReport) {
    println!(
        "{}  (hash {})",
        report.command,
        &report.determinism_hash[..16]
    );
    println!("{:<34} {:>8} {:>14} {:>14}", "quantity", "eps", "lower", "upper");
    for row in &report.rows {
        let fmt = |v: Option<f64>| match v {
            Some(x) => format!("{x:.9}"),
            None => "-".into(),
        };
        println!(
            "{:<34} {:>8} {:>14} {:>14}{}",
            row.quantity,
            row.eps.map(|e| e.to_string()).unwrap_or_else(|| "-".into()),
            fmt(row.lower),
            fmt(row.upper),
            row.warning
                .as_deref()
                .map(|w| format!("   ! {w}"))
                .unwrap_or_default(),
        );
    }
}

fn witness_path(output: &OutputArgs, tag: &str) -> Option<PathBuf> {
    output.out.as_ref().map(|out| {
        let stem = out
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "report".into());
        out.with_file_name(format!("{stem}.witness-{tag}.json"))
    })
}

fn write_witness_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let body = serde_json::to_string_pretty(value).expect("witness serializes");
    std::fs::write(path, body).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn measure_report(state_path: &Path, argv: &[String]) -> CliResult<RunReport> {
    let state = parse_state_file(state_path)?;
    let rho = state.to_density();
    let diag = state_diagnostics(&rho)?;
    let mut report = RunReport::new("measure", argv.to_vec(), None);
    report.rows.push(ReportRow::value("von_neumann_entropy", diag.entropy));
    report.rows.push(ReportRow::value("min_entropy", diag.min_entropy));
    if let Some(v) = diag.coherent_information {
        report.rows.push(ReportRow::value("coherent_information", v));
    }
    if let Some(v) = diag.zero_coherent_information {
        report
            .rows
            .push(ReportRow::value("zero_coherent_information", v));
    }
    Ok(report)
}

fn smooth_report(
    state_path: &Path,
    eps_list: &[f64],
    seed: u64,
    output: &OutputArgs,
    argv: &[String],
) -> CliResult<RunReport> {
    let state = parse_state_file(state_path)?;
    let rho = state.to_density();
    let bipartite = rho.dims().len() == 2;
    let opts = OpSmoothingOptions {
        seed,
        ..OpSmoothingOptions::default()
    };
    let mut report = RunReport::new("smooth", argv.to_vec(), Some(seed));
    for &eps in eps_list {
        let smin = smooth_min_entropy(&rho, eps)?;
        let mut row = ReportRow::new("smooth_min_entropy");
        row.eps = Some(eps);
        row.lower = finite_or_none(smin.value.bits());
        row.upper = row.lower;
        if let (Some(SmoothingWitness::State(w)), Some(path)) = (
            &smin.witness,
            witness_path(output, &format!("smin-eps{eps}")),
        ) {
            write_witness_json(&path, &density_to_file(w, Some("smoothing witness".into())))?;
            row.witness_path = Some(path.display().to_string());
        }
        report.rows.push(row);

        if bipartite {
            let smoothed = state_smoothed_i0(&rho, eps)?;
            let mut row = ReportRow::new("state_smoothed_i0");
            row.eps = Some(eps);
            row.lower = finite_or_none(smoothed.value.bits());
            if smoothed.kind == entdist::smoothing::BoundKind::Exact {
                row.upper = row.lower;
            }
            report.rows.push(row);

            let (lower, upper) = op_smoothed_i0(&rho, eps, &opts)?;
            let mut row = ReportRow::new("op_smoothed_i0");
            row.eps = Some(eps);
            row.eps_derived
                .insert("upper_smoothing".into(), (2.0 * eps.sqrt()).min(1.0));
            row.lower = finite_or_none(lower.value.bits());
            row.upper = upper.and_then(|u| finite_or_none(u.value.bits()));
            if row.upper.is_none() {
                row.warning = Some("upper side not computed for mixed inputs".into());
            }
            report.rows.push(row);
        }
    }
    Ok(report)
}

fn distill_pure_report(
    state_path: &Path,
    eps_list: &[f64],
    argv: &[String],
) -> CliResult<RunReport> {
    let state = parse_state_file(state_path)?;
    let phi = match state {
        ParsedState::Pure(phi) if phi.is_bipartite() => phi,
        ParsedState::Pure(_) => {
            return Err(CliError::Field {
                path: state_path.display().to_string(),
                field: "dims",
                message: "distill-pure expects a bipartite pure state".into(),
            })
        }
        ParsedState::Mixed(_) => {
            return Err(CliError::Field {
                path: state_path.display().to_string(),
                field: "kind",
                message: "distill-pure expects a pure state".into(),
            })
        }
    };
    let mut report = RunReport::new("distill-pure", argv.to_vec(), None);
    for &eps in eps_list {
        let bounds = ed_pure_bounds(&phi, eps)?;
        let mut row = ReportRow::new("pure_sandwich");
        row.eps = Some(eps);
        row.eps_derived = bounds.eps_derived.clone();
        if let Some(unfloored) = bounds.lower_unfloored {
            row.eps_derived.insert("lower_unfloored".into(), unfloored);
        }
        row.lower = finite_or_none(bounds.lower);
        row.upper = finite_or_none(bounds.upper);
        row.warning = bounds.warning.clone();
        report.rows.push(row);

        let mut row = ReportRow::new("upper_lemma_variant");
        row.eps = Some(eps);
        row.upper = finite_or_none(ed_pure_upper_lemma_variant(&phi, eps)?);
        report.rows.push(row);

        let mut row = ReportRow::new("hashing_bound");
        row.eps = Some(eps);
        row.lower = finite_or_none(hashing_bound_pure(&phi, eps)?);
        report.rows.push(row);
    }
    Ok(report)
}

fn distill_ensemble_report(
    ensemble_path: &Path,
    eps_list: &[f64],
    output: &OutputArgs,
    argv: &[String],
) -> CliResult<RunReport> {
    let ensemble = parse_ensemble_file(ensemble_path)?;
    let mut report = RunReport::new("distill-ensemble", argv.to_vec(), None);
    report
        .rows
        .push(ReportRow::value("f_min", f_min(&ensemble)?));
    for &eps in eps_list {
        let lower = ed_ensemble_lower(&ensemble, eps)?;
        let upper = ed_ensemble_upper(&ensemble, eps)?;
        let mut row = ReportRow::new("ensemble_sandwich");
        row.eps = Some(eps);
        row.eps_derived = lower.eps_derived.clone();
        row.eps_derived.extend(upper.eps_derived.clone());
        if let Some(unfloored) = lower.lower_unfloored {
            row.eps_derived.insert("lower_unfloored".into(), unfloored);
        }
        row.lower = finite_or_none(lower.lower);
        row.upper = finite_or_none(upper.upper);
        row.warning = lower.warning.clone().or(upper.warning.clone());
        if let (Some(BoundWitness::Ensemble(e)), Some(path)) = (
            &lower.witness,
            witness_path(output, &format!("ensemble-eps{eps}")),
        ) {
            write_witness_json(&path, &ensemble_to_file(e, Some("lower-bound witness".into())))?;
            row.witness_path = Some(path.display().to_string());
        }
        report.rows.push(row);
    }
    Ok(report)
}

fn eoa_report(
    state_path: &Path,
    eps_list: &[f64],
    seed: u64,
    restarts: usize,
    output: &OutputArgs,
    argv: &[String],
) -> CliResult<RunReport> {
    let state = parse_state_file(state_path)?;
    let rho = state.to_density();
    let rho = if rho.dims().len() == 2 {
        rho
    } else {
        return Err(CliError::Field {
            path: state_path.display().to_string(),
            field: "dims",
            message: "eoa expects a bipartite state".into(),
        });
    };
    let search = SearchOptions {
        budget: restarts,
        seed,
        ..SearchOptions::default()
    };
    let mut report = RunReport::new("eoa", argv.to_vec(), Some(seed));
    for &eps in eps_list {
        let bounds = eoa_one_shot(&rho, eps, &EoaOptions { search })?;
        let mut row = ReportRow::new("eoa_one_shot");
        row.eps = Some(eps);
        row.eps_derived = bounds.eps_derived.clone();
        if let Some(unfloored) = bounds.lower_unfloored {
            row.eps_derived.insert("lower_unfloored".into(), unfloored);
        }
        row.lower = finite_or_none(bounds.lower);
        row.upper = finite_or_none(bounds.upper);
        row.warning = bounds.warning.clone();
        if let (Some(BoundWitness::Ensemble(e)), Some(path)) = (
            &bounds.witness,
            witness_path(output, &format!("eoa-eps{eps}")),
        ) {
            write_witness_json(&path, &ensemble_to_file(e, Some("assistance witness".into())))?;
            row.witness_path = Some(path.display().to_string());
        }
        report.rows.push(row);
    }
    let (entropic, _) = entropic_eoa(&rho, &search)?;
    let mut row = ReportRow::new("entropic_eoa");
    row.lower = finite_or_none(entropic);
    report.rows.push(row);
    report.rows.push(ReportRow::value(
        "asymptotic_reference",
        asymptotic_reference(&rho)?,
    ));
    Ok(report)
}

fn parse_grid(spec: &str, path_hint: &str) -> CliResult<GammaGrid> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Field {
            path: path_hint.into(),
            field: "--grid",
            message: format!("expected start:stop:step, found \"{spec}\""),
        });
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Field {
            path: path_hint.into(),
            field: "--grid",
            message: e.to_string(),
        })?;
    Ok(GammaGrid {
        start: nums[0],
        stop: nums[1],
        step: nums[2],
    })
}

fn dimension_cap_from_env() -> usize {
    std::env::var("ENTDIST_DIM_CAP")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(entdist::spectrum::DEFAULT_DIMENSION_CAP)
}

fn spectrum_report(
    state_path: &Path,
    sigma_path: &Path,
    n_max: usize,
    tol: f64,
    grid_spec: &str,
    argv: &[String],
) -> CliResult<RunReport> {
    let rho = parse_state_file(state_path)?.to_density();
    let sigma = parse_state_file(sigma_path)?.to_density();
    let grid = parse_grid(grid_spec, "spectrum")?;
    let cap = dimension_cap_from_env();
    let estimate = inf_divergence_rate_estimate_with_cap(&rho, &sigma, n_max, tol, &grid, cap)?;
    let mut report = RunReport::new("spectrum", argv.to_vec(), None);
    for (idx, &n) in estimate.n_values.iter().enumerate() {
        let mut row = ReportRow::new(&format!("rate_estimate_n{n}"));
        row.lower = finite_or_none(estimate.rate_estimate[idx]);
        row.upper = row.lower;
        report.rows.push(row);
    }
    report.extra = serde_json::json!({
        "tol": estimate.tol,
        "note": "multi-copy ensembles are restricted to products of single-copy decompositions",
        "curves": estimate
            .gamma_curve
            .iter()
            .zip(&estimate.n_values)
            .map(|(curve, n)| {
                serde_json::json!({
                    "n": n,
                    "points": curve.iter().map(|(g, v)| vec![*g, *v]).collect::<Vec<_>>(),
                })
            })
            .collect::<Vec<_>>(),
    });
    Ok(report)
}

fn verify_report(trials: usize, seed: u64, argv: &[String]) -> CliResult<(RunReport, usize)> {
    let suite = verify_lemma_suite(trials, seed, &OracleConfig::default())?;
    let violations = suite.violations_above(1e-9);
    let mut report = RunReport::new("verify", argv.to_vec(), Some(seed));
    for check in &suite.checks {
        let mut row = ReportRow::new(check.name);
        row.lower = finite_or_none(check.max_violation);
        row.upper = finite_or_none(check.min_slack);
        if check.max_violation > 1e-9 {
            row.warning = Some("violation above 1e-9".into());
        }
        report.rows.push(row);
    }
    report.extra = serde_json::json!({
        "trials": suite.trials,
        "violations_above_1e-9": violations,
        "checks": suite
            .checks
            .iter()
            .map(|c| {
                serde_json::json!({
                    "name": c.name,
                    "trials": c.trials,
                    "max_violation": c.max_violation,
                    "min_slack": c.min_slack,
                    "mean_slack": c.mean_slack,
                })
            })
            .collect::<Vec<_>>(),
    });
    Ok((report, violations))
}
