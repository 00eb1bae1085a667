use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kirchfrac::cli_io::{
    exit_code, run_selftest, write_sweep_csv, ResultFile, SpecFile, EXIT_CONVERGENCE, EXIT_VERDICT,
};
use kirchfrac::constants::ConstantsReport;
use kirchfrac::grid_frac::LANCZOS_COEFFS;
use kirchfrac::verify::Verdict;
use kirchfrac::{
    check_decay, compute_lambdas, solve, sweep, Error, MountainPassConfig, ProblemSpec, Result,
};

#[derive(Parser)]
#[command(
    name = "kirchfrac",
    version,
    about = "Mountain-pass solver and explicit thresholds for Kirchhoff-type fractional p-Laplacian systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every explicit constant and the threshold lambda*.
    Constants {
        spec: PathBuf,
        /// Emit the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Compute a mountain-pass solution and verify the a priori bounds on it.
    Solve {
        spec: PathBuf,
        /// log10 of lambda; defaults to `lambda_log10` in the problem file.
        #[arg(long, allow_negative_numbers = true)]
        lambda_log10: Option<f64>,
        /// Number of grid cells.
        #[arg(long)]
        grid: Option<usize>,
        /// Result file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Independent solves over a list of lambdas, written as CSV.
    Sweep {
        spec: PathBuf,
        /// Comma-separated log10 lambdas, e.g. `55,57,59`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        lambda_log10_list: Vec<f64>,
        #[arg(long)]
        grid: Option<usize>,
        /// CSV file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the built-in oracle suites.
    Selftest {
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Constants { spec, json } => cmd_constants(&spec, json),
        Command::Solve {
            spec,
            lambda_log10,
            grid,
            out,
            seed,
        } => cmd_solve(&spec, lambda_log10, grid, out.as_deref(), seed),
        Command::Sweep {
            spec,
            lambda_log10_list,
            grid,
            out,
            seed,
        } => cmd_sweep(&spec, &lambda_log10_list, grid, out.as_deref(), seed),
        Command::Selftest { json } => cmd_selftest(json),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

fn load(
    path: &Path,
    grid: Option<usize>,
    seed: Option<u64>,
) -> Result<(SpecFile, ProblemSpec, MountainPassConfig)> {
    let file = SpecFile::load(path)?;
    let spec = file.problem()?;
    let mut cfg = file.solver_config();
    if let Some(m) = grid {
        cfg.grid_m = m;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok((file, spec, cfg))
}

fn print_constants(rep: &ConstantsReport) -> std::io::Result<()> {
    let mut out = std::io::stdout().lock();
    let rows = [
        ("D", rep.d),
        ("G", rep.g),
        ("G0", rep.g0),
        ("C*", rep.c_star),
        ("Lambda1", rep.lambda1),
        ("Lambda2", rep.lambda2),
        ("Lambda3", rep.lambda3),
        ("lambda*", rep.lambda_star),
    ];
    for (name, v) in rows {
        writeln!(
            out,
            "{name:<8} = {:<20} log10 = {:.12}",
            v.to_decimal_string(12),
            v.log10_abs()
        )?;
    }
    writeln!(out, "lambda* = Lambda{}", rep.lambda_star_index)?;
    writeln!(out, "theta   = {}", rep.theta)
}

fn cmd_constants(path: &Path, json: bool) -> Result<i32> {
    let (_, spec, _) = load(path, None, None)?;
    let rep = compute_lambdas(&spec)?;
    if json {
        let json = serde_json::to_string_pretty(&rep).expect("report serialization");
        writeln!(std::io::stdout().lock(), "{json}")?;
    } else {
        print_constants(&rep)?;
    }
    Ok(0)
}

fn cmd_solve(
    path: &Path,
    lambda_log10: Option<f64>,
    grid: Option<usize>,
    out: Option<&Path>,
    seed: Option<u64>,
) -> Result<i32> {
    let (mut file, spec, cfg) = load(path, grid, seed)?;
    let l = lambda_log10.or(file.lambda_log10).ok_or_else(|| {
        Error::Parse(
            "no lambda: pass --lambda-log10 or set lambda_log10 in the problem file".into(),
        )
    })?;
    if !(l.is_finite() && l.abs() <= 300.0) {
        return Err(Error::Domain(format!(
            "log10 lambda must lie in [-300, 300], got {l}"
        )));
    }
    let rep = compute_lambdas(&spec)?;
    file.lambda_log10 = Some(l);
    file.grid_m = None;
    file.solver = cfg.clone();
    let (result, converged) = match solve(&spec, 10f64.powf(l), &cfg) {
        Ok(r) => (r, true),
        Err(Error::MaxItersExceeded {
            iterations,
            residual,
            best,
        }) => {
            eprintln!("no convergence after {iterations} iterations (relative residual {residual:e}); writing best iterate");
            (*best, false)
        }
        Err(e) => return Err(e),
    };
    eprintln!(
        "log10 lambda = {l}: c_lambda = {:e}, relative residual = {:e}, ||u||_V = {:e}, ||u||_inf = {:e}, iterations = {}",
        result.c_lambda, result.residual, result.norms.v_norm, result.norms.sup_norm, result.iterations
    );
    let verdicts_ok = result.bounds.as_ref().is_some_and(|b| b.all_ok());
    if let Some(b) = &result.bounds {
        for (name, c) in [
            ("vnorm", &b.vnorm),
            ("sup <= delta/2", &b.sup_half_delta),
            ("sup a priori", &b.sup_a_priori),
            ("sup embedding", &b.sup_embedding),
            ("c upper", &b.c_upper),
            ("c lower", &b.c_lower),
        ] {
            eprintln!(
                "  {name:<15} {:?}: value {:e}, bound {:e}, margin {:.4}",
                c.verdict, c.value, c.bound, c.margin
            );
        }
        if b.trivial {
            eprintln!("  trivial solution");
        }
    }
    ResultFile::new(file, rep, result, converged).write(out)?;
    Ok(if !converged {
        EXIT_CONVERGENCE
    } else if !verdicts_ok {
        EXIT_VERDICT
    } else {
        0
    })
}

fn cmd_sweep(
    path: &Path,
    list: &[f64],
    grid: Option<usize>,
    out: Option<&Path>,
    seed: Option<u64>,
) -> Result<i32> {
    let (_, spec, cfg) = load(path, grid, seed)?;
    if list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parse(
            "--lambda-log10-list must be strictly ascending".into(),
        ));
    }
    let table = sweep(&spec, list, &cfg)?;
    match out {
        Some(p) => write_sweep_csv(std::fs::File::create(p)?, &table)?,
        None => write_sweep_csv(std::io::stdout().lock(), &table)?,
    }
    let decay = check_decay(&table);
    eprintln!("decay: {:?} ({})", decay.verdict, decay.reason);
    Ok(if decay.verdict == Verdict::Fail {
        EXIT_VERDICT
    } else {
        0
    })
}

fn cmd_selftest(json: bool) -> Result<i32> {
    let reports = run_selftest(&LANCZOS_COEFFS);
    let pass = reports.iter().all(|r| r.pass);
    if json {
        let summary = serde_json::json!({ "pass": pass, "suites": reports });
        let text = serde_json::to_string_pretty(&summary).expect("summary serialization");
        writeln!(std::io::stdout().lock(), "{text}")?;
    } else {
        let mut stdout = std::io::stdout().lock();
        for r in &reports {
            writeln!(
                stdout,
                "{} {:<10} {}",
                if r.pass { "PASS" } else { "FAIL" },
                r.name,
                r.detail
            )?;
        }
    }
    Ok(if pass { 0 } else { 1 })
}
