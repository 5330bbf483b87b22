//! Command-line front-end over the interval, bound and harness APIs.
//!
//! Exit codes: 0 success, 2 flag/domain/config errors, 3 data-file parse
//! errors. Output files are written only after a run fully succeeds.

mod config;
mod fmt;

use clap::{Parser, Subcommand, ValueEnum};
use fmt::{int_or_sig6, sig6};
use klci_core::bounds::NonparamFamily;
use klci_core::harness::{self, BoundTarget, ResultRow};
use klci_core::policies::{self, SidedRequest};
use klci_core::{EmpiricalDist, ExpFamilyModel, HeavyFamilySpec, Method};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "klci", version, about = "Mean confidence intervals by divergence inversion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Bernoulli,
    Gaussian,
    Poisson,
    Gamma,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Lower,
    Upper,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Bounded,
    Heavy,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one confidence interval from a single-column data file
    Ci {
        /// pi1 | pi1hat | pi1b | pi1h | hoeffding | bernstein | mpeb
        #[arg(long)]
        method: String,
        /// Miscoverage level in (0,1)
        #[arg(long)]
        delta: f64,
        /// CSV file with one numeric value per line (optional header 'x')
        #[arg(long)]
        data: PathBuf,
        /// Exponential family for pi1/pi1hat
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
        /// Known sigma (gaussian model, or the bernstein baseline)
        #[arg(long)]
        sigma: Option<f64>,
        /// Known shape (gamma model)
        #[arg(long)]
        shape: Option<f64>,
        /// Heavy-family eps (pi1h)
        #[arg(long)]
        eps: Option<f64>,
        /// Heavy-family moment bound (pi1h)
        #[arg(long)]
        gamma_bound: Option<f64>,
        /// Report a one-sided interval (pi1 only)
        #[arg(long, value_enum)]
        one_sided: Option<SideArg>,
    },
    /// Run a Monte Carlo benchmark described by a key=value config file
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Tabulate limiting-width lower bounds over a grid of scaling constants
    Bounds {
        /// Exponential family target (alternative to --nu-file)
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
        /// Known sigma (gaussian model)
        #[arg(long)]
        sigma: Option<f64>,
        /// Known shape (gamma model)
        #[arg(long)]
        shape: Option<f64>,
        /// True mean (with --model)
        #[arg(long)]
        mu: Option<f64>,
        /// Finitely-supported truth: data file defining the distribution
        #[arg(long)]
        nu_file: Option<PathBuf>,
        /// Nonparametric family for --nu-file targets
        #[arg(long, value_enum, default_value_t = FamilyArg::Bounded)]
        family: FamilyArg,
        /// Heavy-family eps (--family heavy)
        #[arg(long)]
        eps: Option<f64>,
        /// Heavy-family moment bound (--family heavy)
        #[arg(long)]
        gamma_bound: Option<f64>,
        /// Grid lo:hi:points
        #[arg(long)]
        k_grid: String,
        /// Space the grid geometrically instead of linearly
        #[arg(long, default_value_t = false)]
        geometric: bool,
        /// Mean sampling cost
        #[arg(long, default_value_t = 1.0)]
        cbar: f64,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
}

enum CliError {
    /// Flag, domain or config problems: exit 2.
    Usage(String),
    /// Data-file parse problems: exit 3.
    Data(String),
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Ci { method, delta, data, model, sigma, shape, eps, gamma_bound, one_sided } => {
            cmd_ci(method, delta, data, model, sigma, shape, eps, gamma_bound, one_sided)
        }
        Command::Bench { config, out, seed } => cmd_bench(config, out, seed),
        Command::Bounds { model, sigma, shape, mu, nu_file, family, eps, gamma_bound, k_grid, geometric, cbar, out } => {
            cmd_bounds(model, sigma, shape, mu, nu_file, family, eps, gamma_bound, k_grid, geometric, cbar, out)
        }
    };
    match outcome {
        Ok(()) => {}
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(3);
        }
    }
}

/// One numeric value per line; a single optional leading header 'x'.
fn read_data_file(path: &PathBuf) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if i == 0 && line == "x" {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| CliError::Data(format!("{}:{}: not a number: '{line}'", path.display(), i + 1)))?;
        values.push(v);
    }
    Ok(values)
}

fn build_model(
    model: Option<ModelArg>,
    sigma: Option<f64>,
    shape: Option<f64>,
) -> Result<ExpFamilyModel, CliError> {
    match model {
        None => Err(CliError::Usage("--model is required for this method".into())),
        Some(ModelArg::Bernoulli) => Ok(ExpFamilyModel::Bernoulli),
        Some(ModelArg::Poisson) => Ok(ExpFamilyModel::Poisson),
        Some(ModelArg::Gaussian) => {
            let sigma = sigma.ok_or_else(|| CliError::Usage("--sigma is required for a gaussian model".into()))?;
            ExpFamilyModel::gaussian(sigma).map_err(usage)
        }
        Some(ModelArg::Gamma) => {
            let shape = shape.ok_or_else(|| CliError::Usage("--shape is required for a gamma model".into()))?;
            ExpFamilyModel::gamma(shape).map_err(usage)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_ci(
    method: String,
    delta: f64,
    data: PathBuf,
    model: Option<ModelArg>,
    sigma: Option<f64>,
    shape: Option<f64>,
    eps: Option<f64>,
    gamma_bound: Option<f64>,
    one_sided: Option<SideArg>,
) -> Result<(), CliError> {
    let method: Method = method.parse().map_err(usage)?;
    let samples = read_data_file(&data)?;
    if one_sided.is_some() && method != Method::Pi1 {
        return Err(CliError::Usage("--one-sided is only available with --method pi1".into()));
    }
    let ci = match method {
        Method::Pi1 => {
            let model = build_model(model, sigma, shape)?;
            match one_sided {
                None => policies::ci_pi1(&model, &samples, delta).map_err(usage)?,
                Some(SideArg::Lower) => {
                    policies::ci_one_sided(&model, &samples, delta, SidedRequest::LowerOnly).map_err(usage)?
                }
                Some(SideArg::Upper) => {
                    policies::ci_one_sided(&model, &samples, delta, SidedRequest::UpperOnly).map_err(usage)?
                }
            }
        }
        Method::Pi1Hat => {
            let model = build_model(model, sigma, shape)?;
            policies::ci_pi1_hat(&model, &samples, delta).map_err(usage)?
        }
        Method::Pi1B => {
            let dist = EmpiricalDist::from_samples(&samples).map_err(usage)?;
            policies::ci_pi1_b(&dist, delta).map_err(usage)?
        }
        Method::Pi1H => {
            let eps = eps.ok_or_else(|| CliError::Usage("--eps is required for pi1h".into()))?;
            let bound =
                gamma_bound.ok_or_else(|| CliError::Usage("--gamma-bound is required for pi1h".into()))?;
            let spec = HeavyFamilySpec::new(eps, bound).map_err(usage)?;
            let dist = EmpiricalDist::from_samples(&samples).map_err(usage)?;
            policies::ci_pi1_h(&dist, delta, &spec).map_err(usage)?
        }
        Method::Hoeffding => policies::ci_hoeffding(&samples, delta).map_err(usage)?,
        Method::Bernstein => {
            let sigma = sigma.ok_or_else(|| CliError::Usage("--sigma is required for bernstein".into()))?;
            policies::ci_bernstein(&samples, sigma, delta).map_err(usage)?
        }
        Method::MpEb => policies::ci_mp_eb(&samples, delta).map_err(usage)?,
    };
    println!("method,lower,upper,width,point_estimate,n,beta_used");
    println!(
        "{},{},{},{},{},{},{}",
        ci.method,
        sig6(ci.lower),
        sig6(ci.upper),
        sig6(ci.width()),
        sig6(ci.point_estimate),
        ci.n_used,
        sig6(ci.beta_used)
    );
    Ok(())
}

fn bench_csv(rows: &[ResultRow]) -> String {
    let mut out =
        String::from("method,dist,n_or_C,delta,reps,avg_width,width_stderr,coverage,avg_samples,excluded,wall_ms\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.method,
            r.dist,
            int_or_sig6(r.n_or_c),
            sig6(r.delta),
            r.replications,
            sig6(r.avg_width),
            sig6(r.width_stderr),
            sig6(r.coverage),
            sig6(r.avg_samples),
            r.excluded,
            r.wall_ms
        ));
    }
    out
}

fn cmd_bench(config: PathBuf, out: PathBuf, seed: u64) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&config)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", config.display())))?;
    let parsed = config::ParsedConfig::parse(&text).map_err(CliError::Usage)?;
    let experiment = parsed.experiment(seed).map_err(CliError::Usage)?;
    let rows = harness::run(&experiment).map_err(usage)?;
    std::fs::write(&out, bench_csv(&rows))
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", out.display())))?;
    Ok(())
}

fn parse_k_grid(text: &str, geometric: bool) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!("--k-grid expects lo:hi:points, got '{text}'")));
    }
    let lo: f64 = parts[0].parse().map_err(|_| CliError::Usage(format!("bad k-grid lo '{}'", parts[0])))?;
    let hi: f64 = parts[1].parse().map_err(|_| CliError::Usage(format!("bad k-grid hi '{}'", parts[1])))?;
    let points: usize =
        parts[2].parse().map_err(|_| CliError::Usage(format!("bad k-grid points '{}'", parts[2])))?;
    if !(lo > 0.0) || !(hi > lo) || points < 2 {
        return Err(CliError::Usage("--k-grid needs 0 < lo < hi and at least 2 points".into()));
    }
    let n = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let t = i as f64 / n;
            if geometric {
                lo * (hi / lo).powf(t)
            } else {
                lo + (hi - lo) * t
            }
        })
        .collect())
}

#[allow(clippy::too_many_arguments)]
fn cmd_bounds(
    model: Option<ModelArg>,
    sigma: Option<f64>,
    shape: Option<f64>,
    mu: Option<f64>,
    nu_file: Option<PathBuf>,
    family: FamilyArg,
    eps: Option<f64>,
    gamma_bound: Option<f64>,
    k_grid: String,
    geometric: bool,
    cbar: f64,
    out: PathBuf,
) -> Result<(), CliError> {
    let grid = parse_k_grid(&k_grid, geometric)?;
    let target = match (model, nu_file) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("--model and --nu-file are mutually exclusive".into()))
        }
        (Some(m), None) => {
            let model = build_model(Some(m), sigma, shape)?;
            let mu = mu.ok_or_else(|| CliError::Usage("--mu is required with --model".into()))?;
            BoundTarget::Param { model, mu }
        }
        (None, Some(path)) => {
            let samples = read_data_file(&path)?;
            let nu = EmpiricalDist::from_samples(&samples).map_err(usage)?;
            let family = match family {
                FamilyArg::Bounded => NonparamFamily::Bounded,
                FamilyArg::Heavy => {
                    let eps =
                        eps.ok_or_else(|| CliError::Usage("--eps is required with --family heavy".into()))?;
                    let bound = gamma_bound
                        .ok_or_else(|| CliError::Usage("--gamma-bound is required with --family heavy".into()))?;
                    NonparamFamily::Heavy(HeavyFamilySpec::new(eps, bound).map_err(usage)?)
                }
            };
            BoundTarget::Nonparam { nu, family }
        }
        (None, None) => return Err(CliError::Usage("one of --model or --nu-file is required".into())),
    };
    let rows = harness::lower_bound_curve(&target, &grid, cbar).map_err(usage)?;
    let mut csv = String::from("k,mu_star_L,mu_star_R,our_width,comparator_width\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            sig6(r.k),
            sig6(r.limits.mu_star_l),
            sig6(r.limits.mu_star_r),
            sig6(r.limits.width),
            r.comparator.map(sig6).unwrap_or_default()
        ));
    }
    std::fs::write(&out, csv).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", out.display())))?;
    Ok(())
}
