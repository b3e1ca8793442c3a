//! Command-line front end: exponent tables, rate sweeps from JSON configs,
//! single solves with certificates, and the verification suites.
//!
//! Exit codes: 0 success / theory check passed, 1 scientific failure
//! (slope verdict failed, suite violations, solver non-convergence),
//! 2 usage or configuration errors.

mod config;

use bregman_rates::harness::{run_sweep, theoretical_exponents, RatePoint, RateReport, Regime};
use bregman_rates::source::{add_noise, default_omega, preset_operator, synthesize};
use bregman_rates::{verify, OperatorKind, RegulariserSpec, SolveOptions, SpectralOperator};
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::exit;

#[derive(Parser)]
#[command(
    name = "bregman-rates",
    version,
    about = "Convergence-rate laboratory for convex Tikhonov regularisation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the parameter-choice exponent θ and rate r for a regime.
    Exponents {
        /// Regime: basic, pconvex, or qco.
        #[arg(long)]
        regime: String,
        /// Source-condition smoothness ν.
        #[arg(long)]
        nu: f64,
        /// Convexity exponent (pconvex regime only).
        #[arg(long)]
        p: Option<f64>,
        /// Coconvexity exponent (qco regime only).
        #[arg(long)]
        q: Option<f64>,
    },
    /// Run a δ sweep from a JSON config; writes CSV and a JSON report.
    Sweep {
        /// Path to the JSON experiment config.
        #[arg(long)]
        config: PathBuf,
        /// Output directory (created if missing; default current dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master noise seed; overrides BREGMAN_RATES_SEED and the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for the sweep (default: rayon's choice).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run a verification suite: interpolation, prox, kkt, coconvexity,
    /// tv-witness, or all.
    Verify {
        suite: String,
        /// Batch seed (fixed default keeps runs reproducible).
        #[arg(long, default_value_t = 424242)]
        seed: u64,
    },
    /// Solve one Tikhonov problem and write the solution with its dual
    /// certificate as JSON.
    Solve {
        /// Operator: identity, diagonal_decay, integration, random_gaussian.
        #[arg(long)]
        operator: String,
        /// Column count (and row count for square presets).
        #[arg(long)]
        n: Option<usize>,
        /// Row count (random_gaussian only).
        #[arg(long)]
        m: Option<usize>,
        /// Decay exponent (diagonal_decay only).
        #[arg(long)]
        a: Option<f64>,
        /// Operator seed (random_gaussian only).
        #[arg(long)]
        op_seed: Option<u64>,
        /// Regulariser: quadratic, power_sum, power_sum_high,
        /// total_variation_1d, huber.
        #[arg(long)]
        reg: String,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        weight: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        /// Regularisation parameter α > 0.
        #[arg(long)]
        alpha: f64,
        /// JSON file with the data vector v (an array of numbers).
        #[arg(long)]
        data: Option<PathBuf>,
        /// Synthesize data from a source condition with this ν instead.
        #[arg(long)]
        nu: Option<f64>,
        /// Noise level for synthetic data.
        #[arg(long)]
        delta: Option<f64>,
        /// Noise seed for synthetic data.
        #[arg(long, default_value_t = 424242)]
        seed: u64,
        #[arg(long, default_value_t = 20000)]
        max_iterations: usize,
        #[arg(long, default_value_t = 1e-9)]
        kkt_tolerance: f64,
        /// Output JSON path (default: print to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn usage_error(msg: &str) -> ! {
    eprintln!("error: {msg}");
    exit(2);
}

fn main() {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Exponents { regime, nu, p, q } => cmd_exponents(&regime, nu, p, q),
        Cmd::Sweep { config, out, seed, jobs } => cmd_sweep(&config, out.as_deref(), seed, jobs),
        Cmd::Verify { suite, seed } => cmd_verify(&suite, seed),
        Cmd::Solve {
            operator,
            n,
            m,
            a,
            op_seed,
            reg,
            p,
            weight,
            gamma,
            alpha,
            data,
            nu,
            delta,
            seed,
            max_iterations,
            kkt_tolerance,
            out,
        } => cmd_solve(SolveArgs {
            operator,
            n,
            m,
            a,
            op_seed,
            reg,
            p,
            weight,
            gamma,
            alpha,
            data,
            nu,
            delta,
            seed,
            max_iterations,
            kkt_tolerance,
            out,
        }),
    }
}

fn cmd_exponents(regime: &str, nu: f64, p: Option<f64>, q: Option<f64>) {
    let regime = match regime {
        "basic" => {
            if p.is_some() || q.is_some() {
                usage_error("--p/--q do not apply to the basic regime");
            }
            Regime::Basic
        }
        "pconvex" => {
            if q.is_some() {
                usage_error("--q does not apply to the pconvex regime");
            }
            match p {
                Some(p) => Regime::PConvex { p },
                None => usage_error("the pconvex regime needs --p"),
            }
        }
        "qco" => {
            if p.is_some() {
                usage_error("--p does not apply to the qco regime");
            }
            match q {
                Some(q) => Regime::QCoconvex { q },
                None => usage_error("the qco regime needs --q"),
            }
        }
        other => usage_error(&format!("unknown regime '{other}' (expected basic, pconvex, qco)")),
    };
    match theoretical_exponents(&regime, nu) {
        Ok(pair) => {
            match regime {
                Regime::Basic => println!("regime = basic"),
                Regime::PConvex { p } => println!("regime = pconvex (p = {p})"),
                Regime::QCoconvex { q } => println!("regime = qco (q = {q})"),
            }
            println!("nu = {nu}");
            println!("theta_alpha = {}", pair.theta_alpha);
            println!("rate = {}", pair.rate);
            println!("measure = {}", measure_name(pair.measure));
            if let Regime::PConvex { p } = regime {
                println!("norm_rate = {}", pair.rate / p);
            }
        }
        Err(e) => usage_error(&e.to_string()),
    }
}

fn measure_name(m: bregman_rates::harness::ErrorMeasure) -> &'static str {
    use bregman_rates::harness::ErrorMeasure::*;
    match m {
        Bregman => "bregman",
        SymBregman => "sym_bregman",
        Norm => "norm",
        Residual => "residual",
    }
}

/// Full double precision, 17 significant digits, '.' decimal: bit-exact
/// regression format.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_row(p: &RatePoint) -> String {
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{}",
        fmt_f64(p.delta),
        fmt_f64(p.alpha),
        p.iterations,
        opt(p.bregman),
        opt(p.sym_bregman),
        opt(p.norm_err),
        opt(p.residual)
    )
}

fn render_csv(report: &RateReport) -> String {
    let mut out = String::from("delta,alpha,iterations,bregman,sym_bregman,norm_err,residual\n");
    for p in &report.points {
        out.push_str(&csv_row(p));
        out.push('\n');
    }
    out
}

fn cmd_sweep(config_path: &Path, out_dir: Option<&Path>, seed: Option<u64>, jobs: Option<usize>) {
    let seed = match seed {
        Some(s) => Some(s),
        None => match std::env::var("BREGMAN_RATES_SEED") {
            Ok(v) => match v.parse::<u64>() {
                Ok(s) => Some(s),
                Err(_) => usage_error(&format!("BREGMAN_RATES_SEED is not an integer: '{v}'")),
            },
            Err(_) => None,
        },
    };
    if jobs == Some(0) {
        usage_error("--jobs must be at least 1");
    }
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => usage_error(&format!("cannot read config {}: {e}", config_path.display())),
    };
    let file: config::RunConfigFile = match serde_json::from_str(&text) {
        Ok(f) => f,
        Err(e) => usage_error(&format!("invalid config {}: {e}", config_path.display())),
    };
    let experiment = match file.to_experiment(seed) {
        Ok(c) => c,
        Err(e) => usage_error(&e),
    };

    let run = || run_sweep(&experiment);
    let result = match jobs {
        Some(j) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
                Ok(p) => p,
                Err(e) => usage_error(&format!("cannot build a {j}-thread pool: {e}")),
            };
            pool.install(run)
        }
        None => run(),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => usage_error(&e.to_string()),
    };

    let dir = out_dir.unwrap_or_else(|| Path::new("."));
    if let Err(e) = std::fs::create_dir_all(dir) {
        usage_error(&format!("cannot create {}: {e}", dir.display()));
    }
    let output = file.output.clone().unwrap_or(config::OutputBlock { csv: None, json: None });
    let csv_path = dir.join(output.csv.as_deref().unwrap_or("results.csv"));
    let json_path = dir.join(output.json.as_deref().unwrap_or("report.json"));
    let json = serde_json::to_string_pretty(&report).expect("report serialization");
    if let Err(e) = std::fs::write(&csv_path, render_csv(&report)) {
        usage_error(&format!("cannot write {}: {e}", csv_path.display()));
    }
    if let Err(e) = std::fs::write(&json_path, json + "\n") {
        usage_error(&format!("cannot write {}: {e}", json_path.display()));
    }

    println!(
        "theory: theta_alpha = {}, rate = {} ({})",
        report.theory.theta_alpha,
        report.theory.rate,
        measure_name(report.theory.measure)
    );
    for f in &report.fitted {
        println!(
            "fit {}: slope = {:.4}, r^2 = {:.4} ({} points)",
            measure_name(f.measure),
            f.slope,
            f.r_squared,
            f.points_used
        );
    }
    for v in &report.verdicts {
        let status = if v.pass { "pass" } else { "FAIL" };
        match v.slope {
            Some(s) => println!(
                "check {}: slope {:.4} vs target {:.4} ({}sided tol {}) -> {status}",
                measure_name(v.measure),
                s,
                v.target,
                if v.two_sided { "two-" } else { "one-" },
                v.tolerance
            ),
            None => println!("check {}: no usable fit -> {status}", measure_name(v.measure)),
        }
    }
    for note in &report.notes {
        println!("note: {note}");
    }
    println!("wrote {}", csv_path.display());
    println!("wrote {}", json_path.display());
    if report.passed() {
        println!("result: PASS");
        exit(0);
    } else {
        println!("result: FAIL");
        exit(1);
    }
}

fn cmd_verify(suite: &str, seed: u64) {
    match verify::run(suite, seed) {
        Ok(outcomes) => {
            let mut all_ok = true;
            for o in &outcomes {
                let clean = o.cases - o.failures;
                println!(
                    "{}: {}/{} pass, worst margin {:.2e} ({})",
                    o.name, clean, o.cases, o.worst, o.detail
                );
                all_ok &= o.failures == 0;
            }
            exit(if all_ok { 0 } else { 1 });
        }
        Err(e) => usage_error(&e.to_string()),
    }
}

struct SolveArgs {
    operator: String,
    n: Option<usize>,
    m: Option<usize>,
    a: Option<f64>,
    op_seed: Option<u64>,
    reg: String,
    p: Option<f64>,
    weight: Option<f64>,
    gamma: Option<f64>,
    alpha: f64,
    data: Option<PathBuf>,
    nu: Option<f64>,
    delta: Option<f64>,
    seed: u64,
    max_iterations: usize,
    kkt_tolerance: f64,
    out: Option<PathBuf>,
}

fn cmd_solve(args: SolveArgs) {
    if !(args.alpha > 0.0 && args.alpha.is_finite()) {
        usage_error(&format!("--alpha must be positive and finite, got {}", args.alpha));
    }
    let op = build_operator(&args);
    let spec = build_spec(&args, op.ncols());

    let v = match (&args.data, args.nu, args.delta) {
        (Some(path), None, None) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => usage_error(&format!("cannot read data {}: {e}", path.display())),
            };
            let values: Vec<f64> = match serde_json::from_str(&text) {
                Ok(v) => v,
                Err(e) => usage_error(&format!("data file must be a JSON number array: {e}")),
            };
            if values.len() != op.nrows() {
                usage_error(&format!(
                    "data length {} does not match operator rows {}",
                    values.len(),
                    op.nrows()
                ));
            }
            ndarray::Array1::from_vec(values)
        }
        (None, Some(nu), Some(delta)) => {
            let inst = match synthesize(&op, &spec, nu, default_omega(op.ncols())) {
                Ok(i) => i,
                Err(e) => usage_error(&e.to_string()),
            };
            match add_noise(&inst.v_dagger, delta, args.seed) {
                Ok(noisy) => noisy.v_delta,
                Err(e) => usage_error(&e.to_string()),
            }
        }
        _ => usage_error("provide either --data PATH or both --nu and --delta"),
    };

    let opts = SolveOptions {
        max_iterations: args.max_iterations,
        kkt_tolerance: args.kkt_tolerance,
        step_scale: 1.0,
    };
    let result = match bregman_rates::solver::solve(&op, &v, args.alpha, &spec, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("solver error: {e}");
            exit(1);
        }
    };
    let payload = serde_json::json!({
        "u": result.u.to_vec(),
        "omega": result.omega.to_vec(),
        "xi": result.xi.to_vec(),
        "iterations": result.iterations,
        "kkt_residual": result.kkt_residual,
        "objective": result.objective,
        "converged": result.converged,
    });
    let text = serde_json::to_string_pretty(&payload).expect("solve serialization") + "\n";
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                usage_error(&format!("cannot write {}: {e}", path.display()));
            }
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    if result.converged {
        exit(0);
    } else {
        eprintln!("solver hit the iteration limit before reaching the KKT tolerance");
        exit(1);
    }
}

fn build_operator(args: &SolveArgs) -> SpectralOperator {
    let need_n = || match args.n {
        Some(n) if n >= 1 => n,
        _ => usage_error("this operator needs --n >= 1"),
    };
    match args.operator.as_str() {
        "identity" => {
            let n = need_n();
            SpectralOperator::factorize(ndarray::Array2::eye(n)).unwrap_or_else(|e| {
                usage_error(&e.to_string());
            })
        }
        "diagonal_decay" => {
            let kind = OperatorKind::DiagonalDecay {
                n: need_n(),
                a: args.a.unwrap_or_else(|| usage_error("diagonal_decay needs --a")),
            };
            preset_operator(&kind).unwrap_or_else(|e| usage_error(&e.to_string()))
        }
        "integration" => {
            let kind = OperatorKind::Integration { n: need_n() };
            preset_operator(&kind).unwrap_or_else(|e| usage_error(&e.to_string()))
        }
        "random_gaussian" => {
            let kind = OperatorKind::RandomGaussian {
                m: args.m.unwrap_or_else(|| usage_error("random_gaussian needs --m")),
                n: need_n(),
                seed: args.op_seed.unwrap_or(0),
            };
            preset_operator(&kind).unwrap_or_else(|e| usage_error(&e.to_string()))
        }
        other => usage_error(&format!(
            "unknown operator '{other}' (expected identity, diagonal_decay, integration, random_gaussian)"
        )),
    }
}

fn build_spec(args: &SolveArgs, ncols: usize) -> RegulariserSpec {
    let block = config::RegulariserBlock {
        kind: args.reg.clone(),
        p: args.p,
        weight: args.weight,
        gamma: args.gamma,
    };
    match block.to_spec(ncols) {
        Ok(spec) => match spec.validate() {
            Ok(()) => spec,
            Err(e) => usage_error(&e.to_string()),
        },
        Err(e) => usage_error(&e),
    }
}
