//! siglab command-line front end.
//!
//! Every experiment and calculator of the library is reachable through a
//! subcommand; outputs are CSV/JSON files written atomically into
//! `--out-dir` together with a `manifest.json` whose seed and config echo
//! reproduce the outputs bit for bit.

mod config;
mod io;
mod manifest;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use config::*;
use manifest::ManifestBuilder;
use serde_json::json;
use siglab::consistency as lab;
use siglab::lasso;
use siglab::moments;
use siglab::pricing;
use siglab::sig::{enumerate_words, signature, Convention, SignatureWord};
use siglab::sim::{self, SeededStream};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "siglab", version, about = "Signature-transform laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Master seed override (defaults to the config's seed, else 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker thread count (or set SIGLAB_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Repetition-count override where the command repeats experiments.
    #[arg(long, global = true)]
    reps: Option<u64>,
    /// Restrict emitted result files to one format.
    #[arg(long, global = true, value_parser = ["csv", "json", "both"], default_value = "both")]
    format: String,
}

impl Common {
    fn want_csv(&self) -> bool {
        self.format != "json"
    }

    fn want_json(&self) -> bool {
        self.format != "csv"
    }
}

#[derive(Subcommand)]
enum Command {
    /// Signatures of paths read from a CSV file.
    Signature {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        convention: String,
        #[arg(long, value_name = "K")]
        order: usize,
        /// Prepend the time coordinate before transforming.
        #[arg(long)]
        augment: bool,
    },
    /// Simulate seeded process paths to CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Moment/correlation matrices of signature components.
    Corr {
        #[arg(long)]
        config: PathBuf,
    },
    /// Irrepresentable-condition report for an active set.
    Irrep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Finite-sample consistency bound calculators.
    Bounds {
        #[arg(long)]
        config: PathBuf,
    },
    /// Separation bound between two linear combinations of components.
    Uniqueness {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sign-consistency rate experiment.
    Consistency {
        #[arg(long)]
        config: PathBuf,
    },
    /// Out-of-sample MSE experiment with cross-validated penalties.
    Mse {
        #[arg(long)]
        config: PathBuf,
    },
    /// Consistency-rate sweeps over a named axis.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Payoff-learning R2 tables per predictor family.
    Payoff {
        #[arg(long)]
        config: PathBuf,
    },
    /// Source/target option pricing through signature coefficients.
    Price {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let threads = cli
        .common
        .threads
        .or_else(|| std::env::var("SIGLAB_THREADS").ok().and_then(|v| v.parse().ok()));
    if let Some(threads) = threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    if let Err(err) = run(&cli) {
        let payload = json!({
            "error": format!("{:#}", err),
            "command": std::env::args().collect::<Vec<_>>().join(" "),
        });
        eprintln!("{}", payload);
        std::process::exit(1);
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Signature {
            input,
            convention,
            order,
            augment,
        } => cmd_signature(&cli.common, input, convention, *order, *augment),
        Command::Simulate { config } => cmd_simulate(&cli.common, config),
        Command::Corr { config } => cmd_corr(&cli.common, config),
        Command::Irrep { config } => cmd_irrep(&cli.common, config),
        Command::Bounds { config } => cmd_bounds(&cli.common, config),
        Command::Uniqueness { config } => cmd_uniqueness(&cli.common, config),
        Command::Consistency { config } => cmd_consistency(&cli.common, config),
        Command::Mse { config } => cmd_mse(&cli.common, config),
        Command::Sweep { config } => cmd_sweep(&cli.common, config),
        Command::Payoff { config } => cmd_payoff(&cli.common, config),
        Command::Price { config } => cmd_price(&cli.common, config),
    }
}

fn cmd_signature(
    common: &Common,
    input: &PathBuf,
    convention: &str,
    order: usize,
    augment: bool,
) -> Result<()> {
    let convention: Convention = convention.parse()?;
    let paths = io::read_paths_csv(input)?;
    if paths.is_empty() {
        bail!("no paths found in {}", input.display());
    }
    let mut manifest = ManifestBuilder::new(
        "signature",
        None,
        json!({"input": input, "convention": convention.label(), "order": order, "augment": augment}),
    );
    let d_eff = paths[0].1.dim() + augment as usize;
    let indexing = enumerate_words(d_eff as u32, order)?;
    let mut out = String::from("path");
    for label in indexing.labels() {
        out.push_str(&format!(",\"{}\"", label));
    }
    out.push('\n');
    for (id, path) in &paths {
        let path = if augment { path.time_augment() } else { path.clone() };
        if path.dim() != d_eff {
            bail!("path '{}' has dimension {}, expected {}", id, path.dim(), d_eff);
        }
        let sig = signature(&path, order, convention)?;
        out.push_str(id);
        for v in &sig.values {
            out.push_str(&format!(",{:e}", v));
        }
        out.push('\n');
    }
    let file = io::out_file(&common.out_dir, "signature.csv");
    io::write_atomic(&file, &out)?;
    manifest.add_output(&file);
    manifest.write(&common.out_dir)?;
    println!("wrote {} ({} paths)", file.display(), paths.len());
    Ok(())
}

fn cmd_simulate(common: &Common, config: &PathBuf) -> Result<()> {
    let cfg: SimulateConfig = load(config)?;
    let seed = common.seed.unwrap_or(0);
    let mut manifest = ManifestBuilder::new("simulate", Some(seed), serde_json::to_value(&cfg)?);
    let spec = cfg.process.spec()?;
    let stream = SeededStream::new(seed, 0);
    let mut out = String::from("path,t");
    for i in 1..=spec.d() {
        out.push_str(&format!(",x{}", i));
    }
    out.push('\n');
    for p in 0..cfg.n_paths {
        let path = sim::simulate(&spec, stream.substream(p as u64))?;
        for j in 0..path.len() {
            out.push_str(&format!("{},{:e}", p, path.times()[j]));
            for i in 0..path.dim() {
                out.push_str(&format!(",{:e}", path.value(j, i)));
            }
            out.push('\n');
        }
    }
    let file = io::out_file(&common.out_dir, "paths.csv");
    io::write_atomic(&file, &out)?;
    manifest.add_output(&file);
    manifest.write(&common.out_dir)?;
    println!("wrote {} ({} paths)", file.display(), cfg.n_paths);
    Ok(())
}

fn corr_matrix(cfg: &CorrConfig, seed: u64) -> Result<moments::MomentMatrix> {
    let spec = cfg.process.spec()?;
    if cfg.normalize {
        // The normalized Ito matrix has an exact Kronecker construction.
        if let (CorrMethod::Analytic, sim::ProcessKind::Brownian, Convention::Ito) =
            (cfg.method, &cfg.process.kind, cfg.convention)
        {
            return Ok(moments::ito_bm_correlation(&spec.correlation, cfg.max_order)?);
        }
    }
    let raw = match cfg.method {
        CorrMethod::Analytic => match (&cfg.process.kind, cfg.convention) {
            (sim::ProcessKind::Brownian, Convention::Ito) => {
                moments::ito_bm_moments(&spec.correlation, cfg.max_order, cfg.process.t_end)?
            }
            (sim::ProcessKind::Brownian, Convention::Stratonovich) => {
                moments::strat_bm_moments(&spec.correlation, cfg.max_order, cfg.process.t_end)?
            }
            _ => bail!(
                "analytic moments cover the Brownian motion under ito/stratonovich; use method = \"mc\""
            ),
        },
        CorrMethod::Mc => moments::mc_signature_moments(
            &spec,
            cfg.max_order,
            cfg.convention,
            cfg.trials,
            SeededStream::new(seed, 0),
        )?,
    };
    if cfg.normalize {
        Ok(raw.correlation()?)
    } else {
        Ok(raw)
    }
}

fn cmd_corr(common: &Common, config: &PathBuf) -> Result<()> {
    let cfg: CorrConfig = load(config)?;
    let seed = common.seed.unwrap_or(0);
    let mut manifest = ManifestBuilder::new("corr", Some(seed), serde_json::to_value(&cfg)?);
    let matrix = corr_matrix(&cfg, seed)?;
    if common.want_csv() {
        let square = io::out_file(&common.out_dir, "corr.csv");
        io::write_atomic(&square, &matrix.to_csv())?;
        manifest.add_output(&square);
        let long = io::out_file(&common.out_dir, "corr_long.csv");
        io::write_atomic(&long, &matrix.to_long_csv())?;
        manifest.add_output(&long);
        println!("wrote {} and companion long format", square.display());
    }
    if common.want_json() {
        let p = matrix.dim();
        let values: Vec<Vec<f64>> = (0..p)
            .map(|i| (0..p).map(|j| matrix.value(i, j)).collect())
            .collect();
        let file = io::out_file(&common.out_dir, "corr.json");
        io::write_atomic(
            &file,
            &serde_json::to_string_pretty(&json!({
                "labels": matrix.indexing.labels(),
                "first_moments": matrix.first_moments,
                "values": values,
            }))?,
        )?;
        manifest.add_output(&file);
    }
    manifest.write(&common.out_dir)?;
    Ok(())
}

fn cmd_irrep(common: &Common, config: &PathBuf) -> Result<()> {
    let cfg: IrrepConfig = load(config)?;
    validate_signs(&cfg.active, &cfg.signs)?;
    let seed = common.seed.unwrap_or(0);
    let mut manifest = ManifestBuilder::new("irrep", Some(seed), serde_json::to_value(&cfg)?);
    let matrix = corr_matrix(&cfg.corr, seed)?.correlation()?;
    let words: Vec<SignatureWord> = cfg
        .active
        .iter()
        .map(|letters| SignatureWord::new(letters.clone(), matrix.indexing.d()))
        .collect::<siglab::Result<_>>()?;
    let report = lasso::irrepresentable_for_words(&matrix, &words, &cfg.signs)?;
    let verdict = if report.holds() { "HOLDS" } else { "FAIL" };
    let inactive_labels: Vec<String> = report
        .inactive
        .iter()
        .map(|&j| matrix.indexing.word(j).label())
        .collect();
    let payload = json!({
        "condition_i_norm": report.norm_i,
        "condition_ii_norm": report.norm_ii,
        "gamma_i": report.gamma_i,
        "gamma_ii": report.gamma_ii,
        "verdict": verdict,
        "condition_i_vector": report.condition_i_vector,
        "inactive_words": inactive_labels,
    });
    let file = io::out_file(&common.out_dir, "irrep.json");
    io::write_atomic(&file, &serde_json::to_string_pretty(&payload)?)?;
    manifest.add_output(&file);
    manifest.write(&common.out_dir)?;
    println!(
        "condition I norm {:.6}, condition II norm {:.6}: {}",
        report.norm_i, report.norm_ii, verdict
    );
    Ok(())
}

fn cmd_bounds(common: &Common, config: &PathBuf) -> Result<()> {
    let cfg: BoundsConfig = load(config)?;
    let mut manifest = ManifestBuilder::new("bounds", None, serde_json::to_value(&cfg)?);
    let payload = match &cfg {
        BoundsConfig::Ito(c) => {
            let out = lasso::finite_sample_ito_bounds(&lasso::ItoBoundParams {
                rho: c.rho,
                sigma_noise: c.sigma_noise,
                q_max: c.q_max,
                p: c.p,
                n_samples: c.n_samples,
                lambda_n: c.lambda_n,
                sigma_min: c.sigma_min,
                sigma_max: c.sigma_max,
                c1: c.c1,
                c2: c.c2,
            })?;
            json!({
                "theorem": "ito",
                "sufficient_bound": lasso::sufficient_bound(c.q_max)?,
                "p_min": out.p_min,
                "h_lambda": out.h_lambda,
                "lambda_threshold": out.lambda_threshold,
                "xi": out.xi,
            })
        }
        BoundsConfig::General(c) => {
            let out = lasso::finite_sample_general_bounds(&lasso::GeneralBoundParams {
                alpha: c.alpha,
                zeta: c.zeta,
                c_min: c.c_min,
                gamma: c.gamma,
                sigma_noise: c.sigma_noise,
                p: c.p,
                n_samples: c.n_samples,
                lambda_n: c.lambda_n,
                sigma_min: c.sigma_min,
                sigma_max: c.sigma_max,
                rho: c.rho,
                c1: c.c1,
                c2: c.c2,
            })?;
            json!({
                "theorem": "general",
                "p_min": out.p_min,
                "h_lambda": out.h_lambda,
                "lambda_threshold": out.lambda_threshold,
                "xi": out.xi,
            })
        }
    };
    let file = io::out_file(&common.out_dir, "bounds.json");
    io::write_atomic(&file, &serde_json::to_string_pretty(&payload)?)?;
    manifest.add_output(&file);
    manifest.write(&common.out_dir)?;
    println!("{}", payload);
    Ok(())
}

fn cmd_uniqueness(common: &Common, config: &PathBuf) -> Result<()> {
    let cfg: UniquenessConfig = load(config)?;
    let seed = common.seed.unwrap_or(0);
    let mut manifest =
        ManifestBuilder::new("uniqueness", Some(seed), serde_json::to_value(&cfg)?);
    let spec = cfg.process.spec()?;
    let stream = SeededStream::new(seed, 0);
    let p = siglab::sig::word_count(spec.d() as u32, cfg.max_order);
    let mut draws = nalgebra::DMatrix::zeros(cfg.trials as usize, p);
    for t in 0..cfg.trials {
        let path = sim::simulate(&spec, stream.substream(t))?;
        let sig = signature(&path, cfg.max_order, cfg.convention)?;
        for j in 0..p {
            draws[(t as usize, j)] = sig.values[j];
        }
    }
    let sigma = draws.transpose() * &draws / cfg.trials as f64;
    let out = lasso::uniqueness_bound(&sigma, &draws, &cfg.a, &cfg.b, cfg.theta, cfg.eta)?;
    let payload = json!({
        "p_star": out.p_star,
        "eta_bar": out.eta_bar,
        "conditional_second_moment": out.conditional_second_moment,
        "kept_fraction": out.kept_fraction,
        "ball_radius": out.ball_radius,
    });
    let file = io::out_file(&common.out_dir, "uniqueness.json");
    io::write_atomic(&file, &serde_json::to_string_pretty(&payload)?)?;
    manifest.add_output(&file);
    manifest.write(&common.out_dir)?;
    println!("{}", payload);
    Ok(())
}

fn apply_overrides(cfg: &mut lab::ExperimentConfig, common: &Common) {
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(reps) = common.reps {
        cfg.reps = reps;
    }
}

fn cmd_consistency(common: &Common, config: &PathBuf) -> Result<()> {
    let mut cfg: lab::ExperimentConfig = load(config)?;
    apply_overrides(&mut cfg, common);
    let mut manifest =
        ManifestBuilder::new("consistency", Some(cfg.seed), serde_json::to_value(&cfg)?);
    let summary = lab::consistency_rate(&cfg)?;
    if common.want_json() {
        let file = io::out_file(&common.out_dir, "consistency.json");
        io::write_atomic(
            &file,
            &serde_json::to_string_pretty(&json!({
                "config": cfg,
                "summary": summary,
            }))?,
        )?;
        manifest.add_output(&file);
    }
    if common.want_csv() {
        let mut csv = String::from("rate,ci_half,reps,failed\n");
        csv.push_str(&format!(
            "{:e},{},{},{}\n",
            summary.rate,
            summary.ci_half.map(|c| format!("{:e}", c)).unwrap_or_default(),
            summary.reps,
            summary.failed
        ));
        let file = io::out_file(&common.out_dir, "consistency.csv");
        io::write_atomic(&file, &csv)?;
        manifest.add_output(&file);
    }
    manifest.write(&common.out_dir)?;
    println!(
        "consistency rate {:.6} over {} trials ({} failed)",
        summary.rate, summary.reps, summary.failed
    );
    Ok(())
}

fn cmd_mse(common: &Common, config: &PathBuf) -> Result<()> {
    let mut cfg: lab::ExperimentConfig = load(config)?;
    if cfg.n_test == 0 {
        cfg.n_test = cfg.n_train;
    }
    apply_overrides(&mut cfg, common);
    let mut manifest = ManifestBuilder::new("mse", Some(cfg.seed), serde_json::to_value(&cfg)?);
    let summary = lab::oos_mse(&cfg)?;
    let file = io::out_file(&common.out_dir, "mse.json");
    io::write_atomic(
        &file,
        &serde_json::to_string_pretty(&json!({"config": cfg, "summary": summary}))?,
    )?;
    manifest.add_output(&file);
    manifest.write(&common.out_dir)?;
    println!(
        "out-of-sample MSE {:.6e} (sd {:.3e}) over {} trials",
        summary.mean_mse, summary.sd_mse, summary.reps
    );
    Ok(())
}

fn cmd_sweep(common: &Common, config: &PathBuf) -> Result<()> {
    let mut cfg: SweepConfig = load(config)?;
    apply_overrides(&mut cfg.base, common);
    let mut manifest =
        ManifestBuilder::new("sweep", Some(cfg.base.seed), serde_json::to_value(&cfg)?);
    let result = match cfg.axis {
        SweepAxis::Rho => {
            let qs = if cfg.qs.is_empty() { vec![cfg.base.q] } else { cfg.qs.clone() };
            lab::rho_q_sweep(&cfg.base, &cfg.grid, &qs, &cfg.conventions)?
        }
        SweepAxis::Kappa => {
            let mut base = cfg.base.clone();
            base.kind = sim::ProcessKind::Ou { kappas: vec![0.0] };
            let grid = if cfg.grid.is_empty() { default_kappa_grid() } else { cfg.grid.clone() };
            lab::mean_reversion_sweep(&base, &grid, &cfg.conventions)?
        }
        SweepAxis::OneMinusPhi => {
            let mut base = cfg.base.clone();
            base.kind = sim::ProcessKind::Ar1 { phis: vec![1.0] };
            let grid = if cfg.grid.is_empty() { default_kappa_grid() } else { cfg.grid.clone() };
            lab::mean_reversion_sweep(&base, &grid, &cfg.conventions)?
        }
        SweepAxis::Dimension => {
            let dims: Vec<usize> = cfg.grid.iter().map(|&v| v as usize).collect();
            lab::dimension_sweep(&cfg.base, &dims, &cfg.conventions)?
        }
        SweepAxis::Samples => {
            let ns: Vec<usize> = cfg.grid.iter().map(|&v| v as usize).collect();
            lab::sample_sweep(&cfg.base, &ns, &cfg.conventions)?
        }
        SweepAxis::Arima => {
            let axes = cfg
                .arima
                .clone()
                .context("field 'arima': required for the arima axis")?;
            lab::arima_sweep(
                &cfg.base,
                &axes.i_orders,
                &axes.ar_lags,
                &axes.ma_lags,
                &cfg.conventions,
            )?
        }
        SweepAxis::Augment => lab::augmentation_compare(&cfg.base, &cfg.conventions)?,
    };
    if common.want_csv() {
        let file = io::out_file(&common.out_dir, "sweep.csv");
        io::write_atomic(&file, &result.to_csv())?;
        manifest.add_output(&file);
    }
    if common.want_json() {
        let file = io::out_file(&common.out_dir, "sweep.json");
        io::write_atomic(&file, &serde_json::to_string_pretty(&result)?)?;
        manifest.add_output(&file);
    }
    manifest.write(&common.out_dir)?;
    println!("{}: {} points", result.label, result.points.len());
    Ok(())
}

fn cmd_payoff(common: &Common, config: &PathBuf) -> Result<()> {
    let mut cfg: PayoffConfig = load(config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(reps) = common.reps {
        cfg.reps = reps;
    }
    let mut manifest =
        ManifestBuilder::new("payoff", Some(cfg.seed), serde_json::to_value(&cfg)?);
    let tables = pricing::payoff_learning(&cfg)?;
    if common.want_csv() {
        let mut long = String::from("payoff,predictor,lambda,r2_in,r2_out\n");
        for t in &tables {
            for ((l, a), b) in t.lambdas.iter().zip(&t.r2_in).zip(&t.r2_out) {
                long.push_str(&format!(
                    "\"{}\",\"{}\",{:e},{:e},{:e}\n",
                    t.payoff, t.predictor, l, a, b
                ));
            }
        }
        let file = io::out_file(&common.out_dir, "payoff_r2.csv");
        io::write_atomic(&file, &long)?;
        manifest.add_output(&file);
        // Coefficient paths of the signature predictors, largest first.
        let mut coef = String::from("payoff,lambda,word,coefficient\n");
        for t in &tables {
            for (k, lam) in t.lambdas.iter().enumerate() {
                for (w, word) in t.coef_words.iter().enumerate() {
                    coef.push_str(&format!(
                        "\"{}\",{:e},\"{}\",{:e}\n",
                        t.payoff, lam, word, t.coef_curves[k][w]
                    ));
                }
            }
        }
        let file = io::out_file(&common.out_dir, "payoff_coefficients.csv");
        io::write_atomic(&file, &coef)?;
        manifest.add_output(&file);
    }
    if common.want_json() {
        let file = io::out_file(&common.out_dir, "payoff.json");
        io::write_atomic(
            &file,
            &serde_json::to_string_pretty(&json!({"config": cfg, "tables": tables}))?,
        )?;
        manifest.add_output(&file);
    }
    manifest.write(&common.out_dir)?;
    for t in &tables {
        println!(
            "{} / {}: best out-of-sample R2 {:.4} at lambda {:.3e}",
            t.payoff, t.predictor, t.best_r2_out, t.best_lambda
        );
    }
    Ok(())
}

fn cmd_price(common: &Common, config: &PathBuf) -> Result<()> {
    let mut cfg: PriceConfig = load(config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(reps) = common.reps {
        cfg.reps = reps;
    }
    let mut manifest = ManifestBuilder::new("price", Some(cfg.seed), serde_json::to_value(&cfg)?);
    let book = cfg.book.build()?;
    let outcomes = pricing::price_targets_repeated(
        &book,
        &cfg.pipeline,
        cfg.reps,
        SeededStream::new(cfg.seed, 0),
    )?;
    let mean_err =
        outcomes.iter().map(|o| o.mean_relative_error).sum::<f64>() / outcomes.len() as f64;
    if common.want_csv() {
        let file = io::out_file(&common.out_dir, "price_targets.csv");
        io::write_atomic(&file, &outcomes[0].to_csv())?;
        manifest.add_output(&file);
        let mut reps_csv = String::from("rep,mean_relative_error\n");
        for (r, o) in outcomes.iter().enumerate() {
            reps_csv.push_str(&format!("{},{:e}\n", r, o.mean_relative_error));
        }
        let file = io::out_file(&common.out_dir, "price_reps.csv");
        io::write_atomic(&file, &reps_csv)?;
        manifest.add_output(&file);
    }
    if common.want_json() {
        let file = io::out_file(&common.out_dir, "price.json");
        io::write_atomic(
            &file,
            &serde_json::to_string_pretty(&json!({
                "config": cfg,
                "mean_relative_error": mean_err,
                "first_repetition": outcomes[0],
            }))?,
        )?;
        manifest.add_output(&file);
    }
    manifest.write(&common.out_dir)?;
    println!(
        "mean relative pricing error {:.4}% over {} repetitions",
        100.0 * mean_err,
        outcomes.len()
    );
    Ok(())
}
