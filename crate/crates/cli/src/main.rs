//! torbif: spectral Galerkin continuation for nonlocal periodic waves.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 configuration error.

mod config;
mod diagram;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{build_config, Overrides, OutputFormat, RunConfig};
use torbif_core::bounds;
use torbif_core::continuation::{
    branch_switch, constant_solution, continue_branch, make_point, Branch, BranchOrigin,
};
use torbif_core::evolve::{self, ComplexField};
use torbif_core::field::{norms, CosineField, TWO_PI};
use torbif_core::operator::newton_solve;
use torbif_core::oracle_bo::{bo_negative, bo_positive, BranchSign};
use torbif_core::spectrum::{bifurcation_direction, trivial_spectrum};

#[derive(Parser)]
#[command(name = "torbif", version, about = "Spectral continuation solver for the periodic nonlocal equation Lu = lambda*u + |u|^p")]
struct Cli {
    /// TOML configuration file; flags override its entries
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Dispersion exponent s (>= 1/2)
    #[arg(long, global = true)]
    s: Option<f64>,
    /// Nonlinearity power p (>= 2)
    #[arg(long, global = true)]
    p: Option<f64>,
    /// Multiplier kind: fractional | ilw | table
    #[arg(long, global = true)]
    multiplier: Option<String>,
    /// ILW depth
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Cosine truncation order N
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Highest bifurcating mode traced by `diagram`
    #[arg(long, global = true)]
    kmax: Option<usize>,
    #[arg(long = "lambda-min", global = true, allow_negative_numbers = true)]
    lambda_min: Option<f64>,
    #[arg(long = "lambda-max", global = true, allow_negative_numbers = true)]
    lambda_max: Option<f64>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format: csv | json
    #[arg(long, global = true)]
    format: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the trivial-branch spectrum (CSV: k, sigma, and lambda_ddot when p = 2)
    Spectrum,
    /// Newton-solve at a fixed lambda
    Solve {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        /// Seed on branch k: the second-order local model with the amplitude
        /// matched to lambda (p = 2), or amplitude*cos(kx) otherwise
        #[arg(long)]
        k: Option<usize>,
        /// Explicit seed amplitude (overrides the matched one)
        #[arg(long, allow_negative_numbers = true)]
        amplitude: Option<f64>,
        /// Seed with the constant solution at lambda
        #[arg(long, default_value_t = false)]
        constant: bool,
    },
    /// Switch onto branch k (or the constant branch) and continue in lambda
    Branch {
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
        amplitude: f64,
        /// Target lambda (defaults to lambda-max)
        #[arg(long, allow_negative_numbers = true)]
        to: Option<f64>,
        /// Trace the constant branch instead of a bifurcating mode
        #[arg(long, default_value_t = false)]
        constant: bool,
    },
    /// Trace the whole bifurcation diagram and write branch files + CSV
    Diagram,
    /// Emit a closed-form Benjamin-Ono profile (s = 1/2, fractional, p = 2)
    Oracle {
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        /// plus | minus
        #[arg(long, default_value = "minus")]
        sign: String,
    },
    /// Evaluate the a-priori bounds on every point of a stored branch file
    BoundsCheck {
        #[arg(long)]
        branch: PathBuf,
    },
    /// Integrate the dispersive model and report the traveling-wave deviation
    Evolve {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long = "t-end", default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, default_value_t = 5e-4)]
        dt: f64,
        /// Write a snapshot CSV every this many steps (0 = none)
        #[arg(long = "snap-every", default_value_t = 0)]
        snap_every: usize,
    },
    /// Run the acceptance suite; exit 0 iff every criterion passes
    Verify,
}

fn parse_sign(s: &str) -> Result<BranchSign, String> {
    match s {
        "plus" => Ok(BranchSign::Plus),
        "minus" => Ok(BranchSign::Minus),
        other => Err(format!("sign must be plus or minus (got {other})")),
    }
}

fn write_field(
    cfg: &RunConfig,
    stem: &str,
    u: &CosineField,
) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let path = match cfg.format {
        OutputFormat::Json => {
            let path = cfg.out_dir.join(format!("{stem}.json"));
            std::fs::write(&path, serde_json::to_string_pretty(u).expect("field serialises"))?;
            path
        }
        OutputFormat::Csv => {
            let path = cfg.out_dir.join(format!("{stem}.csv"));
            let mut text = String::from("n,a\n");
            for (i, a) in u.coeffs().iter().enumerate() {
                text.push_str(&format!("{i},{a}\n"));
            }
            std::fs::write(&path, text)?;
            path
        }
    };
    Ok(path)
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<(), torbif_core::Error> {
    let eig = trivial_spectrum(&cfg.problem.multiplier, cfg.kmax.max(1))?;
    if cfg.problem.p == 2.0 {
        println!("k,sigma,lambda_ddot");
        for e in &eig {
            if e.k == 0 {
                println!("{},{},", e.k, e.sigma);
            } else {
                let dir = bifurcation_direction(&cfg.problem, e.k)?;
                println!("{},{},{}", e.k, e.sigma, dir.lambda_ddot);
            }
        }
    } else {
        println!("k,sigma");
        for e in &eig {
            println!("{},{}", e.k, e.sigma);
        }
    }
    Ok(())
}

fn cmd_solve(
    cfg: &RunConfig,
    lambda: f64,
    k: Option<usize>,
    amplitude: Option<f64>,
    constant: bool,
) -> Result<(), Box<dyn std::error::Error>> {
    let ps = &cfg.problem;
    let seed = if constant {
        constant_solution(ps.p, lambda, ps.n)?
    } else if let Some(k) = k {
        match amplitude {
            Some(a) => CosineField::mode(k, ps.n).scale(a),
            None if ps.p == 2.0 => {
                // amplitude of the local model matched to the requested lambda
                let dir = bifurcation_direction(ps, k)?;
                let sigma = ps.multiplier.operator_symbol(k as i64)?;
                let a = (2.0 * (lambda - sigma).max(0.0) / dir.lambda_ddot).sqrt();
                torbif_core::spectrum::local_predictor(ps, k, a)?.1
            }
            None => CosineField::mode(k, ps.n).scale(0.2),
        }
    } else {
        CosineField::zeros(ps.n)
    };
    let out = newton_solve(ps, lambda, &seed, cfg.continuation.newton_tol, 50)?;
    let point = make_point(ps, lambda, &out.u, 0.0)?;
    let path = write_field(cfg, "solution", &out.u)?;
    println!(
        "solved at lambda = {lambda}: {} Newton iterations, residual {:.3e}",
        out.iterations, point.residual_l2
    );
    println!(
        "norms: l2 {:.6e}, h2s {:.6e}, linf {:.6e}; min_sv {:.3e}; tail ratio {:.3e}",
        point.norms.l2,
        point.norms.h_2s,
        point.norms.linf,
        point.min_sv,
        out.u.tail_ratio()
    );
    if cfg.bound_constants.is_placeholder() {
        eprintln!(
            "note: bound constants are user-supplied; with the placeholder 1.0 the \
             Phi/Psi bounds are indicative only"
        );
    }
    let report = bounds::check_point(ps, Some(&cfg.bound_constants), &point);
    for e in &report.entries {
        println!(
            "bound {:<13} measured {:>13.6e}  limit {:>13.6e}  {}",
            e.name,
            e.measured,
            e.bound,
            if e.passes { "pass" } else { "FAIL" }
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_branch(
    cfg: &RunConfig,
    k: usize,
    amplitude: f64,
    to: Option<f64>,
    constant: bool,
) -> Result<(), Box<dyn std::error::Error>> {
    let ps = &cfg.problem;
    let target = to.unwrap_or(cfg.lambda_max);
    let mut ccfg = cfg.continuation.clone();
    ccfg.target_lambda = Some(target);
    let (branch, name) = if constant {
        let from = if cfg.lambda_min == 0.0 { 0.05 } else { cfg.lambda_min };
        let start = make_point(ps, from, &constant_solution(ps.p, from, ps.n)?, 0.0)?;
        let dir = if target >= from { 1.0 } else { -1.0 };
        (
            continue_branch(ps, &start, dir, &ccfg, BranchOrigin::Constant)?,
            "constant".to_string(),
        )
    } else {
        let start = branch_switch(ps, k, amplitude, &ccfg)?;
        let dir = if target >= start.lambda { 1.0 } else { -1.0 };
        (
            continue_branch(ps, &start, dir, &ccfg, BranchOrigin::TrivialMode(k))?,
            format!("c{k}"),
        )
    };
    std::fs::create_dir_all(&cfg.out_dir)?;
    let json_path = cfg.out_dir.join(format!("branch_{name}.json"));
    std::fs::write(&json_path, serde_json::to_string_pretty(&branch)?)?;
    let csv_path = cfg.out_dir.join(format!("branch_{name}.csv"));
    std::fs::write(&csv_path, branch.to_csv())?;
    let last = branch.points.last().expect("branch never empty");
    println!(
        "traced {} points to lambda = {}; wrote {} and {}",
        branch.points.len(),
        last.lambda,
        json_path.display(),
        csv_path.display()
    );
    Ok(())
}

fn cmd_oracle(
    cfg: &RunConfig,
    k: usize,
    lambda: f64,
    sign: BranchSign,
) -> Result<(), Box<dyn std::error::Error>> {
    let n = cfg.problem.n;
    let u = if lambda < -1.0 {
        if k != 1 {
            return Err(Box::new(torbif_core::Error::InvalidParameter(
                "the negative family exists for k = 1 only".into(),
            )));
        }
        bo_negative(lambda, sign, n)?
    } else {
        bo_positive(k, lambda, sign, n)?
    };
    let b = norms(&u, 0.5);
    let path = write_field(cfg, &format!("oracle_k{k}_lambda{lambda}"), &u)?;
    println!(
        "oracle (k = {k}, lambda = {lambda}): l2 {:.6e}, h2s {:.6e}, linf {:.6e}; wrote {}",
        b.l2,
        b.h_2s,
        b.linf,
        path.display()
    );
    Ok(())
}

fn cmd_bounds_check(cfg: &RunConfig, path: &PathBuf) -> Result<bool, Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(path)?;
    let branch: Branch = serde_json::from_str(&text)?;
    let ps = branch.problem.clone();
    if cfg.bound_constants.is_placeholder() {
        eprintln!(
            "note: bound constants are user-supplied; with the placeholder 1.0 the \
             Phi/Psi bounds are indicative only"
        );
    }
    let mut all = true;
    let mut out = String::from("index,lambda,bound,measured,limit,pass\n");
    for (i, p) in branch.points.iter().enumerate() {
        let report = bounds::check_point(&ps, Some(&cfg.bound_constants), p);
        for e in &report.entries {
            all &= e.passes;
            out.push_str(&format!(
                "{i},{},{},{},{},{}\n",
                p.lambda, e.name, e.measured, e.bound, e.passes
            ));
        }
    }
    std::fs::create_dir_all(&cfg.out_dir)?;
    let out_path = cfg.out_dir.join("bounds_check.csv");
    std::fs::write(&out_path, out)?;
    println!(
        "checked {} points; all bounds pass: {all}; wrote {}",
        branch.points.len(),
        out_path.display()
    );
    Ok(all)
}

fn cmd_evolve(
    cfg: &RunConfig,
    lambda: f64,
    k: usize,
    t_end: f64,
    dt: f64,
    snap_every: usize,
) -> Result<(), Box<dyn std::error::Error>> {
    let ps = &cfg.problem;
    let profile = bo_positive(k, lambda, BranchSign::Minus, ps.n)?;
    std::fs::create_dir_all(&cfg.out_dir)?;

    if snap_every > 0 {
        let mut state = ComplexField::from_cosine(&profile);
        let span = snap_every as f64 * dt;
        let mut t = 0.0;
        let mut idx = 0usize;
        while t < t_end - 1e-12 {
            let seg = span.min(t_end - t);
            state = evolve::evolve(&ps.multiplier, &state, dt, seg)?;
            t += seg;
            idx += 1;
            let grid = torbif_core::field::next_fast_size(1024.max(2 * ps.n + 1));
            let vals = state.to_values(grid)?;
            let mut text = String::from("x,u\n");
            for (j, v) in vals.iter().enumerate() {
                text.push_str(&format!("{},{v}\n", TWO_PI * j as f64 / grid as f64));
            }
            std::fs::write(cfg.out_dir.join(format!("snap_{idx:04}.csv")), text)?;
        }
        println!("wrote {idx} snapshots");
    }

    let deviation = evolve::traveling_wave_check(&ps.multiplier, &profile, lambda, t_end, dt)?;
    let u0 = ComplexField::from_cosine(&profile);
    let u1 = evolve::evolve(&ps.multiplier, &u0, dt, t_end)?;
    let q0 = evolve::conserved_quantities(&u0);
    let q1 = evolve::conserved_quantities(&u1);
    println!(
        "traveling-wave check at lambda = {lambda} (speed c = {}): linf deviation {deviation:.6e} after t = {t_end}",
        -lambda
    );
    println!(
        "mass drift {:.3e}, momentum drift {:.3e}",
        (q1.mass - q0.mass).abs(),
        (q1.momentum - q0.momentum).abs() / q0.momentum.abs().max(1e-300)
    );
    Ok(())
}

fn cmd_verify(cfg: &RunConfig) -> Result<bool, Box<dyn std::error::Error>> {
    let results = torbif_core::acceptance::run_all(cfg.problem.n);
    let mut all = true;
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("[{status}] criterion {}: {} — {}", r.id, r.name, r.detail);
        all &= r.passed;
    }
    std::fs::create_dir_all(&cfg.out_dir)?;
    let report_path = cfg.out_dir.join("verify.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&results)?)?;
    println!(
        "{} of {} criteria passed; report at {}",
        results.iter().filter(|r| r.passed).count(),
        results.len(),
        report_path.display()
    );
    Ok(all)
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let overrides = Overrides {
        multiplier: cli.multiplier.clone(),
        s: cli.s,
        p: cli.p,
        n: cli.n,
        delta: cli.delta,
        kmax: cli.kmax,
        lambda_min: cli.lambda_min,
        lambda_max: cli.lambda_max,
        out: cli.out.clone(),
        format: cli.format.clone(),
    };
    let cfg = match build_config(cli.config.as_deref(), &overrides) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{e}");
            return Ok(ExitCode::from(2));
        }
    };

    let ok = match &cli.command {
        Command::Spectrum => {
            cmd_spectrum(&cfg)?;
            true
        }
        Command::Solve {
            lambda,
            k,
            amplitude,
            constant,
        } => {
            cmd_solve(&cfg, *lambda, *k, *amplitude, *constant)?;
            true
        }
        Command::Branch {
            k,
            amplitude,
            to,
            constant,
        } => {
            cmd_branch(&cfg, *k, *amplitude, *to, *constant)?;
            true
        }
        Command::Diagram => {
            let summary = diagram::run_diagram(&cfg)?;
            let failed: Vec<&str> = summary
                .branches
                .iter()
                .filter(|b| b.status != "ok")
                .map(|b| b.name.as_str())
                .collect();
            println!(
                "diagram: {} events, {} branches ({} failed); outputs in {}",
                summary.events.len(),
                summary.branches.len(),
                failed.len(),
                cfg.out_dir.display()
            );
            failed.is_empty()
        }
        Command::Oracle { k, lambda, sign } => {
            let sign = parse_sign(sign).map_err(torbif_core::Error::InvalidParameter)?;
            cmd_oracle(&cfg, *k, *lambda, sign)?;
            true
        }
        Command::BoundsCheck { branch } => cmd_bounds_check(&cfg, branch)?,
        Command::Evolve {
            lambda,
            k,
            t_end,
            dt,
            snap_every,
        } => {
            cmd_evolve(&cfg, *lambda, *k, *t_end, *dt, *snap_every)?;
            true
        }
        Command::Verify => cmd_verify(&cfg)?,
    };
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
