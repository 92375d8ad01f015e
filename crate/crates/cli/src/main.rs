mod grid;
mod output;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use zfdmt::acceptance::{Harness, Settings, CHECKS};
use zfdmt::bounds::{
    asymptotic_allocation, lower_bound_thm2, naive_upper_bound, optimize_lower, optimize_upper, upper_bound_thm1,
    Allocation,
};
use zfdmt::channel::{estimate_array_gain, secrecy_rate, RateSchedule};
use zfdmt::diversity::{
    asymptotic_dmt, diversity_lower_estimate, diversity_upper_estimate, highsnr_upper_dmt, max_diversity_estimates,
};
use zfdmt::gaussian::{diversity_gaussian_estimate, mutual_info_moments, outage_from_moments};
use zfdmt::montecarlo::{empirical_diversity_from, SpectrumSample, DEFAULT_REL_STEP, MIN_TRIALS};
use zfdmt::{db_to_linear, AllocationKind, AsymptoticRegime, MomentMethod, RunManifest, WiretapConfig};

use grid::parse_grid;
use output::{plot_script, CurvePoint, PlotLayout, Table};

const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Parser)]
#[command(name = "zfdmt", version, about = "Secrecy outage and diversity curves for zero-forcing wiretap channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the array gain g.
    Gain(GainArgs),
    /// Outage probability versus SNR: simulation, bounds and Gaussian approximation.
    OutageCurve(CurveArgs),
    /// Finite-SNR diversity versus multiplexing gain.
    DmtCurve(CurveArgs),
    /// Print the limiting tradeoff curves and small-rate maxima.
    Asymptote(AsymptoteArgs),
    /// Run the acceptance checks.
    Check(CheckArgs),
}

#[derive(Args)]
struct GainArgs {
    /// Antenna counts as Nt,Nm,Ne.
    #[arg(long)]
    config: String,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Write the run manifest into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    config: String,
    /// Multiplexing gains: a list or start:step:stop.
    #[arg(long)]
    rs: String,
    /// SNR in dB: a single value, a list or start:step:stop.
    #[arg(long = "snr-db")]
    snr_db: String,
    /// Monte-Carlo channel draws.
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = AllocMode::Optimized)]
    alloc: AllocMode,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Moments::Quadrature)]
    moments: Moments,
    /// Draws for the array-gain estimate.
    #[arg(long = "gain-trials", default_value_t = 1_000_000)]
    gain_trials: u64,
}

#[derive(Args)]
struct AsymptoteArgs {
    #[arg(long)]
    config: String,
    /// Defaults to 0:0.25:m.
    #[arg(long)]
    rs: Option<String>,
    /// Also tabulate the small-rate maxima at these SNRs.
    #[arg(long = "snr-db")]
    snr_db: Option<String>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long = "gain-trials", default_value_t = 1_000_000)]
    gain_trials: u64,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long = "gain-trials", default_value_t = 1_000_000)]
    gain_trials: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Run only these checks (repeatable).
    #[arg(long)]
    only: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AllocMode {
    Optimized,
    Equal,
    Asymptotic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Moments {
    Quadrature,
    Mc,
}

impl fmt::Display for AllocMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AllocMode::Optimized => "optimized",
            AllocMode::Equal => "equal",
            AllocMode::Asymptotic => "asymptotic",
        })
    }
}

impl fmt::Display for Moments {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Moments::Quadrature => "quadrature",
            Moments::Mc => "mc",
        })
    }
}

/// Bad flag values that clap itself cannot see.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<zfdmt::Error>() {
        Some(zfdmt::Error::InvalidConfig(_) | zfdmt::Error::Domain { .. }) => 2,
        Some(zfdmt::Error::Infeasible { .. }) => 3,
        Some(zfdmt::Error::OptimizerFailed { .. } | zfdmt::Error::QuadratureFailed { .. }) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gain(a) => gain(a),
        Command::OutageCurve(a) => outage_curve(a),
        Command::DmtCurve(a) => dmt_curve(a),
        Command::Asymptote(a) => asymptote(a),
        Command::Check(a) => check(a),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn parse_config(text: &str) -> Result<WiretapConfig> {
    let cfg: WiretapConfig = text.parse()?;
    cfg.require_feasible()?;
    Ok(cfg)
}

fn parse_rates(text: &str, cfg: &WiretapConfig) -> Result<Vec<f64>> {
    let rs = parse_grid(text).map_err(|e| usage(format!("--rs: {e:#}")))?;
    let m = cfg.m() as f64;
    if let Some(bad) = rs.iter().find(|r| !(**r >= 0.0 && **r <= m)) {
        return Err(usage(format!("--rs: {bad} outside [0, {m}]")));
    }
    Ok(rs)
}

fn parse_snr(text: &str) -> Result<Vec<f64>> {
    parse_grid(text).map_err(|e| usage(format!("--snr-db: {e:#}")))
}

/// Reads the manifest in `dir` if it describes the same gain run; otherwise
/// estimates g and writes a fresh one.
fn resolve_gain(cfg: &WiretapConfig, trials: u64, seed: u64, dir: Option<&Path>) -> Result<RunManifest> {
    if let Some(dir) = dir {
        let path = dir.join(MANIFEST_FILE);
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(old) = text.parse::<RunManifest>() {
                if old.config().ok().as_ref() == Some(cfg) && old.g_trials == trials && old.seed == seed {
                    return Ok(old);
                }
            }
        }
    }
    let gain = estimate_array_gain::<f64>(cfg, trials, seed)?;
    let manifest = RunManifest::new(cfg, &gain);
    if let Some(dir) = dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(MANIFEST_FILE);
        fs::write(&path, manifest.to_string()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(manifest)
}

fn gain(a: GainArgs) -> Result<ExitCode> {
    let cfg = parse_config(&a.config)?;
    let manifest = resolve_gain(&cfg, a.trials, a.seed, a.out.as_deref())?;
    println!("config = {cfg}");
    println!("g = {}", manifest.g);
    println!("std_err = {}", manifest.g_std_err);
    println!("trials = {}", manifest.g_trials);
    println!("seed = {}", manifest.seed);
    Ok(ExitCode::SUCCESS)
}

struct Curve {
    cfg: WiretapConfig,
    rs: Vec<f64>,
    snr_db: Vec<f64>,
    manifest: RunManifest,
    scheds: Vec<RateSchedule<f64>>,
}

impl Curve {
    fn prepare(a: &CurveArgs) -> Result<Self> {
        let cfg = parse_config(&a.config)?;
        let rs = parse_rates(&a.rs, &cfg)?;
        let snr_db = parse_snr(&a.snr_db)?;
        if a.trials < MIN_TRIALS {
            return Err(usage(format!("--trials must be at least {MIN_TRIALS}")));
        }
        fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
        let manifest = resolve_gain(&cfg, a.gain_trials, a.seed, Some(&a.out))?;
        let scheds = rs
            .iter()
            .map(|&r| RateSchedule::new(&cfg, r, manifest.g))
            .collect::<zfdmt::Result<Vec<_>>>()?;
        Ok(Self {
            cfg,
            rs,
            snr_db,
            manifest,
            scheds,
        })
    }

    fn comments(&self, command: &str, a: &CurveArgs) -> Vec<String> {
        let mut c = self.manifest.lines();
        c.push(format!("command = {command}"));
        c.push(format!("trials = {}", a.trials));
        c.push(format!("alloc = {}", a.alloc));
        c.push(format!("moments = {}", a.moments));
        c
    }

    fn upper_allocation(&self, sched: &RateSchedule<f64>, eta: f64, mode: AllocMode) -> Result<Allocation<f64>> {
        let r = sched.r_s();
        Ok(match mode {
            AllocMode::Optimized => optimize_upper(&self.cfg, sched, eta)?.allocation,
            AllocMode::Equal => Allocation::equal_split(&self.cfg, r, AllocationKind::Upper),
            AllocMode::Asymptotic if r == 0.0 => Allocation::equal_split(&self.cfg, r, AllocationKind::Upper),
            AllocMode::Asymptotic => asymptotic_allocation(&self.cfg, r, AsymptoticRegime::for_rate(r))?,
        })
    }

    // No closed-form split exists for the lower bound, so asymptotic mode optimizes it.
    fn lower_allocation(&self, sched: &RateSchedule<f64>, eta: f64, mode: AllocMode) -> Result<Allocation<f64>> {
        Ok(match mode {
            AllocMode::Equal => Allocation::equal_split(&self.cfg, sched.r_s(), AllocationKind::Lower),
            AllocMode::Optimized | AllocMode::Asymptotic => optimize_lower(&self.cfg, sched, eta)?.allocation,
        })
    }
}

fn moment_method(a: &CurveArgs) -> MomentMethod {
    match a.moments {
        Moments::Quadrature => MomentMethod::Quadrature,
        Moments::Mc => MomentMethod::MonteCarlo {
            trials: a.trials,
            seed: a.seed,
        },
    }
}

fn write_outputs(a: &CurveArgs, name: &str, table: &Table, layout: PlotLayout<'_>) -> Result<()> {
    let csv = a.out.join(format!("{name}.csv"));
    table.write(&csv)?;
    let gp = a.out.join(format!("{name}.gp"));
    fs::write(&gp, plot_script(&layout, table.preamble_lines())).with_context(|| format!("writing {}", gp.display()))?;
    println!("wrote {} ({} rows), {}, {}", csv.display(), table.len(), gp.display(), a.out.join(MANIFEST_FILE).display());
    Ok(())
}

fn outage_curve(a: CurveArgs) -> Result<ExitCode> {
    let curve = Curve::prepare(&a)?;
    let cfg = &curve.cfg;
    let sample = SpectrumSample::<f64>::draw(cfg, a.trials, a.seed)?;
    let method = moment_method(&a);
    let mut table = Table::new(curve.comments("outage-curve", &a));

    for &db in &curve.snr_db {
        let eta = db_to_linear(db);
        let mc = sample.outage_for_rates(&curve.scheds, eta);
        let moments = mutual_info_moments(cfg, eta, method)?;
        for (sched, est) in curve.scheds.iter().zip(&mc) {
            let r = sched.r_s();
            table.push(CurvePoint::new(db, r, "mc", est.probability).with_err(est.std_err));
            let up = upper_bound_thm1(cfg, sched, eta, &curve.upper_allocation(sched, eta, a.alloc)?)?;
            table.push(CurvePoint::new(db, r, "upper", up.probability));
            let lo = lower_bound_thm2(cfg, sched, eta, &curve.lower_allocation(sched, eta, a.alloc)?)?;
            table.push(CurvePoint::new(db, r, "lower", lo.probability));
            table.push(CurvePoint::new(db, r, "naive", naive_upper_bound(cfg, sched, eta)?));
            let gauss = outage_from_moments(&moments, secrecy_rate(sched, eta));
            table.push(CurvePoint::new(db, r, "gauss", gauss));
        }
    }

    let title = format!("Secrecy outage, config {cfg}");
    let layout = PlotLayout {
        csv: "outage.csv",
        title: &title,
        x_label: "SNR (dB)",
        y_label: "outage probability",
        x_col: 1,
        key_col: 2,
        key_name: "r_s",
        keys: &curve.rs,
        series: &["mc", "upper", "lower", "naive", "gauss"],
        log_y: true,
    };
    write_outputs(&a, "outage", &table, layout)?;
    Ok(ExitCode::SUCCESS)
}

fn dmt_curve(a: CurveArgs) -> Result<ExitCode> {
    let curve = Curve::prepare(&a)?;
    let cfg = &curve.cfg;
    let sample = SpectrumSample::<f64>::draw(cfg, a.trials, a.seed)?;
    let mut table = Table::new(curve.comments("dmt-curve", &a));
    let rel_step = DEFAULT_REL_STEP;

    for &db in &curve.snr_db {
        let eta = db_to_linear(db);
        for sched in &curve.scheds {
            let r = sched.r_s();
            // The finite-SNR estimators are slopes of bounds that vanish at r_s = 0.
            if r > 0.0 {
                let up = diversity_upper_estimate(cfg, sched, eta, &curve.upper_allocation(sched, eta, a.alloc)?)?;
                table.push(CurvePoint::new(db, r, "d_upper", up.value));
                let lo = diversity_lower_estimate(cfg, sched, eta, &curve.lower_allocation(sched, eta, a.alloc)?)?;
                table.push(CurvePoint::new(db, r, "d_lower", lo.value));
                let gauss = diversity_gaussian_estimate(cfg, sched, eta)?;
                table.push(CurvePoint::new(db, r, "d_gauss", gauss.value));
                match empirical_diversity_from(&sample, sched, eta, rel_step) {
                    Ok(emp) => table.push(CurvePoint::new(db, r, "d_empirical", emp.point.value).with_err(emp.std_err)),
                    Err(e @ zfdmt::Error::InsufficientFailures { .. }) => {
                        eprintln!("skipping d_empirical at {db} dB, r_s = {r}: {e}");
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            table.push(CurvePoint::new(db, r, "d_asymptotic", asymptotic_dmt(cfg, r)?));
            table.push(CurvePoint::new(db, r, "d_highsnr_upper", highsnr_upper_dmt(cfg, r)?));
        }
    }

    let title = format!("Secrecy diversity, config {cfg}");
    let layout = PlotLayout {
        csv: "dmt.csv",
        title: &title,
        x_label: "multiplexing gain r_s",
        y_label: "diversity",
        x_col: 2,
        key_col: 1,
        key_name: "dB",
        keys: &curve.snr_db,
        series: &["d_upper", "d_lower", "d_gauss", "d_empirical", "d_asymptotic", "d_highsnr_upper"],
        log_y: false,
    };
    write_outputs(&a, "dmt", &table, layout)?;
    Ok(ExitCode::SUCCESS)
}

fn asymptote(a: AsymptoteArgs) -> Result<ExitCode> {
    let cfg = parse_config(&a.config)?;
    let rs_text = a.rs.clone().unwrap_or_else(|| format!("0:0.25:{}", cfg.m()));
    let rs = parse_rates(&rs_text, &cfg)?;
    let (m, k) = (cfg.m(), cfg.k());

    println!("config {cfg}: m = {m}, k = {k}");
    println!("{:>8} {:>14} {:>16}", "r_s", "d_asymptotic", "d_highsnr_upper");
    for &r in &rs {
        println!("{:>8} {:>14.6} {:>16.6}", r, asymptotic_dmt::<f64>(&cfg, r)?, highsnr_upper_dmt::<f64>(&cfg, r)?);
    }

    let (mf, kf) = (m as f64, k as f64);
    println!();
    println!(
        "small-rate anchors as SNR grows: upper {:.6}, lower {:.6}",
        mf * kf * (1.0 - (mf - 1.0) / (2.0 * kf)),
        mf * kf
    );

    if let Some(text) = &a.snr_db {
        let snr = parse_snr(text)?;
        let manifest = resolve_gain(&cfg, a.gain_trials, a.seed, None)?;
        let sched = RateSchedule::new(&cfg, 0.0, manifest.g)?;
        println!("g = {} (std_err {})", manifest.g, manifest.g_std_err);
        println!("{:>8} {:>12} {:>12}", "eta_db", "max_upper", "max_lower");
        for db in snr {
            let (up, lo) = max_diversity_estimates(&cfg, &sched, db_to_linear(db))?;
            println!("{db:>8} {up:>12.6} {lo:>12.6}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn check(a: CheckArgs) -> Result<ExitCode> {
    if let Some(bad) = a.only.iter().find(|id| !CHECKS.contains(&id.as_str())) {
        return Err(usage(format!("unknown check {bad:?}; known: {}", CHECKS.join(", "))));
    }
    let harness = Harness::new(Settings {
        trials: a.trials,
        gain_trials: a.gain_trials,
        seed: a.seed,
    });
    let reports = if a.only.is_empty() {
        harness.run_all()
    } else {
        a.only.iter().map(|id| harness.run(id)).collect()
    };
    let failed = reports.iter().filter(|r| !r.passed).count();
    for r in &reports {
        println!("{r}");
    }
    println!("{} passed, {failed} failed", reports.len() - failed);
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        let infeasible = anyhow::Error::from(zfdmt::Error::Infeasible { n_t: 2, n_e: 2 });
        assert_eq!(exit_code(&infeasible), 3);
        let opt = anyhow::Error::from(zfdmt::Error::OptimizerFailed {
            residual: 1.0,
            iterations: 10,
        })
        .context("upper bound");
        assert_eq!(exit_code(&opt), 4);
        let quad = anyhow::Error::from(zfdmt::Error::QuadratureFailed { relative: 1e-3 });
        assert_eq!(exit_code(&quad), 4);
        assert!(quad.to_string().contains("gaussian-approx"));
        assert!(opt.root_cause().to_string().contains("bounds"));
        assert_eq!(exit_code(&usage("bad")), 2);
        assert_eq!(exit_code(&anyhow::anyhow!("io")), 1);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
