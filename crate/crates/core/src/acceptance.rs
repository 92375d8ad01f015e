//! End-to-end cross-checks of the whole pipeline.
//!
//! Each check returns a [`Report`] with a verdict and a one-line summary of the
//! worst case it saw. The integration test target and the `check` subcommand
//! of the CLI both drive this module.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{
    asymptotic_allocation, lower_bound_thm2, naive_upper_bound, optimize_lower, optimize_upper, upper_bound_thm1,
    Allocation, AllocationKind, AsymptoticRegime,
};
use crate::channel::{estimate_array_gain, make_config, RateSchedule, WiretapConfig};
use crate::diversity::{
    asymptotic_dmt, diversity_lower_estimate, diversity_upper_estimate, highsnr_upper_dmt, max_diversity_estimates,
};
use crate::gaussian::{diversity_gaussian_estimate, mutual_info_moments, outage_from_moments, MomentMethod};
use crate::montecarlo::{empirical_diversity_from, SpectrumSample};
use crate::quadrature::integrate_interval;
use crate::special::{exp_integral_en, gauss_q, laguerre, reg_lower_inc_gamma, upper_inc_gamma_int};
use crate::{db_to_linear, Result};

/// Run sizes and seed for the Monte-Carlo parts of the checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Settings {
    pub trials: u64,
    pub gain_trials: u64,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            trials: 1_000_000,
            gain_trials: 1_000_000,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub id: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {}", self.id, self.detail)
    }
}

/// Identifiers of all checks, in run order.
pub const CHECKS: [&str; 10] = [
    "sandwich",
    "single-stream-exactness",
    "log-slope-identities",
    "high-snr-convergence",
    "small-rate-limits",
    "infinite-snr-anchors",
    "gaussian-low-snr",
    "optimizer-soundness",
    "array-gain-and-determinism",
    "special-functions",
];

const OUTAGE_SNR_DB: [f64; 7] = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0];
const OUTAGE_RATES: [f64; 2] = [0.5, 1.0];
const SLOPE_RATES: [f64; 4] = [0.3, 0.7, 1.0, 1.5];
const SLOPE_SNR: [f64; 3] = [2.0, 10.0, 100.0];
const HIGH_SNR_RATES: [f64; 5] = [0.25, 0.5, 0.75, 1.25, 1.5];
/// Relative step in `ln η` for finite-difference log-slopes.
const SLOPE_STEP: f64 = 1e-4;

/// Caches array gains and channel samples across checks.
pub struct Harness {
    settings: Settings,
    gains: Mutex<HashMap<WiretapConfig, f64>>,
    samples: Mutex<HashMap<WiretapConfig, Arc<SpectrumSample<f64>>>>,
}

fn cfg(n_t: usize, n_m: usize, n_e: usize) -> WiretapConfig {
    make_config(n_t, n_m, n_e).expect("valid built-in configuration")
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

/// `−η d/dη` of `f` by central differences in `ln η`, extrapolated once.
fn log_slope(eta: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let d = |h: f64| -> Result<f64> { Ok((f(eta * h.exp())? - f(eta * (-h).exp())?) / (2.0 * h)) };
    let (coarse, fine) = (d(SLOPE_STEP)?, d(SLOPE_STEP / 2.0)?);
    Ok(-(4.0 * fine - coarse) / 3.0)
}

fn report(id: &'static str, passed: bool, detail: String) -> Report {
    Report { id, passed, detail }
}

impl Harness {
    pub fn new(settings: Settings) -> Self {
        Self {
            settings,
            gains: Mutex::new(HashMap::new()),
            samples: Mutex::new(HashMap::new()),
        }
    }

    pub fn settings(&self) -> Settings {
        self.settings
    }

    /// Array gain of `cfg`, estimated once per harness.
    pub fn gain(&self, cfg: &WiretapConfig) -> Result<f64> {
        let mut gains = self.gains.lock().unwrap();
        if let Some(g) = gains.get(cfg) {
            return Ok(*g);
        }
        let g = estimate_array_gain::<f64>(cfg, self.settings.gain_trials, self.settings.seed)?.g;
        gains.insert(*cfg, g);
        Ok(g)
    }

    fn sample(&self, cfg: &WiretapConfig) -> Result<Arc<SpectrumSample<f64>>> {
        let mut samples = self.samples.lock().unwrap();
        if let Some(s) = samples.get(cfg) {
            return Ok(Arc::clone(s));
        }
        let s = Arc::new(SpectrumSample::draw(cfg, self.settings.trials, self.settings.seed)?);
        samples.insert(*cfg, Arc::clone(&s));
        Ok(s)
    }

    fn schedule(&self, cfg: &WiretapConfig, r_s: f64) -> Result<RateSchedule<f64>> {
        RateSchedule::new(cfg, r_s, self.gain(cfg)?)
    }

    /// Runs one check by identifier; errors become failing reports.
    pub fn run(&self, id: &str) -> Report {
        let id = CHECKS.iter().copied().find(|c| *c == id).unwrap_or("unknown");
        let outcome = match id {
            "sandwich" => self.sandwich(),
            "single-stream-exactness" => self.single_stream_exactness(),
            "log-slope-identities" => self.log_slope_identities(),
            "high-snr-convergence" => self.high_snr_convergence(),
            "small-rate-limits" => self.small_rate_limits(),
            "infinite-snr-anchors" => self.infinite_snr_anchors(),
            "gaussian-low-snr" => self.gaussian_low_snr(),
            "optimizer-soundness" => self.optimizer_soundness(),
            "array-gain-and-determinism" => self.array_gain_and_determinism(),
            "special-functions" => Ok(special_functions()),
            _ => return report("unknown", false, "no such check".into()),
        };
        outcome.unwrap_or_else(|e| report(id, false, format!("error: {e}")))
    }

    pub fn run_all(&self) -> Vec<Report> {
        CHECKS.iter().map(|id| self.run(id)).collect()
    }

    /// Simulated outage lies within 3 standard errors of the optimized bounds.
    fn sandwich(&self) -> Result<Report> {
        let mut violations = Vec::new();
        let mut min_margin = f64::INFINITY;
        for c in [cfg(3, 2, 1), cfg(4, 2, 1)] {
            let sample = self.sample(&c)?;
            for &r in &OUTAGE_RATES {
                let s = self.schedule(&c, r)?;
                for &db in &OUTAGE_SNR_DB {
                    let eta = db_to_linear(db);
                    let mc = sample.outage(&s, eta);
                    let lo = optimize_lower(&c, &s, eta)?.probability;
                    let up = optimize_upper(&c, &s, eta)?.probability;
                    let below = mc.probability + 3.0 * mc.std_err - lo;
                    let above = up + 3.0 * mc.std_err - mc.probability;
                    min_margin = min_margin.min(below).min(above);
                    if below < 0.0 || above < 0.0 {
                        violations.push(format!(
                            "{c} r_s={r} {db}dB: lower={lo:.3e} mc={:.3e}±{:.1e} ({} failures) upper={up:.3e}",
                            mc.probability, mc.std_err, mc.failures
                        ));
                    }
                }
            }
        }
        let detail = if violations.is_empty() {
            format!("28 grid points inside, smallest margin {min_margin:.3e}")
        } else {
            format!("{} violations: {}", violations.len(), violations.join("; "))
        };
        Ok(report("sandwich", violations.is_empty(), detail))
    }

    /// Upper and lower bounds coincide for a single stream.
    fn single_stream_exactness(&self) -> Result<Report> {
        let c = cfg(2, 1, 1);
        let g = self.gain(&c)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.settings.seed);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let r: f64 = rng.random_range(0.01..1.0);
            let eta = db_to_linear(rng.random_range(-10.0..40.0));
            let s = RateSchedule::new(&c, r, g)?;
            let up = upper_bound_thm1(&c, &s, eta, &Allocation::new(vec![r], AllocationKind::Upper, r)?)?;
            let lo = lower_bound_thm2(&c, &s, eta, &Allocation::new(vec![r], AllocationKind::Lower, r)?)?;
            worst = worst.max(rel(up.probability, lo.probability));
        }
        Ok(report(
            "single-stream-exactness",
            worst <= 1e-12,
            format!("worst relative gap {worst:.2e} over 20 points (tol 1e-12)"),
        ))
    }

    /// Each analytic diversity estimate is the log-slope of its bound.
    fn log_slope_identities(&self) -> Result<Report> {
        let (mut wu, mut wl, mut wg) = (0.0f64, 0.0f64, 0.0f64);
        for c in [cfg(3, 2, 1), cfg(4, 2, 1)] {
            for &r in &SLOPE_RATES {
                let s = self.schedule(&c, r)?;
                for &eta in &SLOPE_SNR {
                    let up = optimize_upper(&c, &s, eta)?.allocation;
                    let lo = optimize_lower(&c, &s, eta)?.allocation;
                    let du = diversity_upper_estimate(&c, &s, eta, &up)?.value;
                    let dl = diversity_lower_estimate(&c, &s, eta, &lo)?.value;
                    let dg = diversity_gaussian_estimate(&c, &s, eta)?.value;
                    let fu = log_slope(eta, |e| Ok(upper_bound_thm1(&c, &s, e, &up)?.ln_probability))?;
                    let fl = log_slope(eta, |e| Ok(lower_bound_thm2(&c, &s, e, &lo)?.ln_probability))?;
                    let fg = log_slope(eta, |e| {
                        let m = mutual_info_moments(&c, e, MomentMethod::Quadrature)?;
                        let rate = crate::channel::secrecy_rate(&s, e);
                        Ok(crate::special::ln_gauss_q((m.mean - rate) / m.variance.sqrt()))
                    })?;
                    wu = wu.max(rel(du, fu));
                    wl = wl.max(rel(dl, fl));
                    wg = wg.max(rel(dg, fg));
                }
            }
        }
        Ok(report(
            "log-slope-identities",
            wu <= 1e-5 && wl <= 1e-5 && wg <= 1e-4,
            format!("worst relative error upper {wu:.2e}, lower {wl:.2e} (tol 1e-5), gaussian {wg:.2e} (tol 1e-4)"),
        ))
    }

    /// At 60 dB the estimates sit near their infinite-SNR curves.
    fn high_snr_convergence(&self) -> Result<Report> {
        let c = cfg(4, 2, 1);
        let eta = db_to_linear(60.0);
        let (mut wl, mut wu) = (0.0f64, 0.0f64);
        for &r in &HIGH_SNR_RATES {
            let s = self.schedule(&c, r)?;
            let up = optimize_upper(&c, &s, eta)?.allocation;
            let lo = optimize_lower(&c, &s, eta)?.allocation;
            let dl = diversity_lower_estimate(&c, &s, eta, &lo)?.value;
            let du = diversity_upper_estimate(&c, &s, eta, &up)?.value;
            wl = wl.max((dl - asymptotic_dmt(&c, r)?).abs());
            wu = wu.max((du - highsnr_upper_dmt(&c, r)?).abs());
        }
        Ok(report(
            "high-snr-convergence",
            wl <= 0.15 && wu <= 0.15,
            format!("max deviation lower {wl:.4}, upper {wu:.4} (tol 0.15)"),
        ))
    }

    /// Near-zero rate estimates approach their closed-form maxima.
    fn small_rate_limits(&self) -> Result<Report> {
        let eta = db_to_linear(10.0);
        let (mut wu, mut wl) = (0.0f64, 0.0f64);
        for c in [cfg(3, 2, 1), cfg(4, 2, 1)] {
            let s = self.schedule(&c, 1e-3)?;
            let (mu, ml) = max_diversity_estimates(&c, &s, eta)?;
            let up = optimize_upper(&c, &s, eta)?.allocation;
            let lo = optimize_lower(&c, &s, eta)?.allocation;
            wu = wu.max(rel(diversity_upper_estimate(&c, &s, eta, &up)?.value, mu));
            wl = wl.max(rel(diversity_lower_estimate(&c, &s, eta, &lo)?.value, ml));
        }
        Ok(report(
            "small-rate-limits",
            wu <= 0.01 && wl <= 0.01,
            format!("worst relative gap upper {wu:.2e}, lower {wl:.2e} (tol 1e-2)"),
        ))
    }

    /// The closed-form maxima at 80 dB are within 2% of `(5, 6)` for `(4,2,1)`.
    fn infinite_snr_anchors(&self) -> Result<Report> {
        let c = cfg(4, 2, 1);
        let s = self.schedule(&c, 1e-3)?;
        let (u, l) = max_diversity_estimates(&c, &s, db_to_linear(80.0))?;
        let (eu, el) = (rel(u, 5.0), rel(l, 6.0));
        Ok(report(
            "infinite-snr-anchors",
            eu <= 0.02 && el <= 0.02,
            format!("upper {u:.4} vs 5 ({:.2}%), lower {l:.4} vs 6 ({:.2}%), tol 2%", 100.0 * eu, 100.0 * el),
        ))
    }

    /// Gaussian approximation within half a decade of simulation at low SNR,
    /// and quadrature moments consistent with sampled ones.
    fn gaussian_low_snr(&self) -> Result<Report> {
        let c = cfg(4, 2, 1);
        let s = self.schedule(&c, 0.5)?;
        let sample = self.sample(&c)?;
        let (mut worst_log, mut moments_ok) = (0.0f64, true);
        let mut notes = Vec::new();
        for &db in &[0.0, 5.0, 10.0] {
            let eta = db_to_linear(db);
            let q = mutual_info_moments(&c, eta, MomentMethod::Quadrature)?;
            let approx = outage_from_moments(&q, crate::channel::secrecy_rate(&s, eta));
            let mc = sample.outage(&s, eta);
            worst_log = worst_log.max((approx.log10() - mc.probability.log10()).abs());
            let sampled = mutual_info_moments(
                &c,
                eta,
                MomentMethod::MonteCarlo {
                    trials: self.settings.trials.max(crate::gaussian::MIN_MOMENT_TRIALS),
                    seed: self.settings.seed,
                },
            )?;
            let mean_ok = (q.mean - sampled.mean).abs() <= (0.01 * q.mean).max(3.0 * sampled.mean_std_err);
            let var_ok =
                (q.variance - sampled.variance).abs() <= (0.01 * q.variance).max(3.0 * sampled.variance_std_err);
            if !(mean_ok && var_ok) {
                moments_ok = false;
                notes.push(format!(
                    "{db}dB moments quad ({:.5}, {:.5}) vs mc ({:.5}, {:.5})",
                    q.mean, q.variance, sampled.mean, sampled.variance
                ));
            }
        }
        let passed = worst_log <= 0.5 && moments_ok;
        let mut detail = format!("worst |log10 gap| {worst_log:.3} (tol 0.5), moments agree: {moments_ok}");
        if !notes.is_empty() {
            detail.push_str(&format!(" [{}]", notes.join("; ")));
        }
        Ok(report("gaussian-low-snr", passed, detail))
    }

    /// Optimized splits beat the equal split and the naive bound, match a
    /// brute-force grid, and recover the closed-form high-SNR split.
    fn optimizer_soundness(&self) -> Result<Report> {
        let mut problems = Vec::new();
        for c in [cfg(3, 2, 1), cfg(4, 2, 1)] {
            for &r in &OUTAGE_RATES {
                let s = self.schedule(&c, r)?;
                for &db in &OUTAGE_SNR_DB {
                    let eta = db_to_linear(db);
                    let opt = optimize_upper(&c, &s, eta)?.probability;
                    let eq = Allocation::equal_split(&c, r, AllocationKind::Upper);
                    let eq = upper_bound_thm1(&c, &s, eta, &eq)?.probability;
                    let naive = naive_upper_bound(&c, &s, eta)?;
                    if opt > eq * (1.0 + 1e-12) || opt > naive * (1.0 + 1e-12) {
                        problems.push(format!("{c} r_s={r} {db}dB: opt {opt:.3e} eq {eq:.3e} naive {naive:.3e}"));
                    }
                }
            }
        }

        let spots = [
            (cfg(3, 2, 1), 1.0, 5.0),
            (cfg(3, 2, 1), 1.0, 10.0),
            (cfg(3, 2, 1), 1.0, 20.0),
            (cfg(4, 2, 1), 1.0, 5.0),
            (cfg(4, 2, 1), 1.0, 10.0),
            (cfg(4, 2, 1), 1.0, 20.0),
        ];
        let mut worst_grid = 0.0f64;
        for (c, r, db) in spots {
            let s = self.schedule(&c, r)?;
            let eta = db_to_linear(db);
            let (grid_up, grid_lo) = grid_extrema(&c, &s, eta)?;
            let up = optimize_upper(&c, &s, eta)?.probability;
            let lo = optimize_lower(&c, &s, eta)?.probability;
            if up > grid_up * (1.0 + 1e-12) || lo < grid_lo * (1.0 - 1e-12) {
                problems.push(format!("{c} r_s={r} {db}dB: optimizer worse than grid"));
            }
            worst_grid = worst_grid.max((up - grid_up).abs()).max((lo - grid_lo).abs());
        }
        if worst_grid > 1e-6 {
            problems.push(format!("grid-search gap {worst_grid:.2e}"));
        }

        let c = cfg(4, 2, 1);
        let s = self.schedule(&c, 0.5)?;
        let numeric = optimize_upper(&c, &s, db_to_linear(60.0))?.allocation;
        let closed = asymptotic_allocation(&c, 0.5, AsymptoticRegime::BelowOne)?;
        let worst_alloc = numeric
            .values()
            .iter()
            .zip(closed.values())
            .map(|(a, b)| rel(*a, *b))
            .fold(0.0, f64::max);
        if worst_alloc > 0.05 {
            problems.push(format!(
                "high-SNR split {:?} vs closed form {:?}",
                numeric.values(),
                closed.values()
            ));
        }
        let detail = format!(
            "grid-search gap {worst_grid:.2e} (tol 1e-6), high-SNR split {:.4?} vs {:.4?} ({:.2}%){}",
            numeric.values(),
            closed.values(),
            100.0 * worst_alloc,
            if problems.is_empty() { String::new() } else { format!("; problems: {}", problems.join("; ")) }
        );
        Ok(report("optimizer-soundness", problems.is_empty(), detail))
    }

    /// Scalar array gain is 1/2; every simulation is identical for 1 and 4 workers.
    fn array_gain_and_determinism(&self) -> Result<Report> {
        let scalar = estimate_array_gain::<f64>(&cfg(1, 1, 1), 1_000_000, self.settings.seed)?;
        let gain_ok = (scalar.g - 0.5).abs() <= 0.01;

        let seed = self.settings.seed;
        let c = cfg(4, 2, 1);
        let fingerprint = || -> Result<Vec<u64>> {
            let g = estimate_array_gain::<f64>(&cfg(3, 2, 1), 50_000, seed)?;
            let s = RateSchedule::new(&c, 1.0, 2.0)?;
            let sample = SpectrumSample::<f64>::draw(&c, 50_000, seed)?;
            let out = sample.outage(&s, 10.0);
            let emp = empirical_diversity_from(&sample, &s, 10.0, 0.12)?;
            let mom = mutual_info_moments(&c, 10.0, MomentMethod::MonteCarlo { trials: 1_000_000, seed })?;
            Ok([g.g, g.std_err, out.probability, out.std_err, emp.point.value, emp.std_err, mom.mean, mom.variance]
                .iter()
                .map(|v| v.to_bits())
                .collect())
        };
        let in_pool = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("thread pool")
                .install(fingerprint)
        };
        let (one, four) = (in_pool(1)?, in_pool(4)?);
        let same = one == four;
        Ok(report(
            "array-gain-and-determinism",
            gain_ok && same,
            format!(
                "(1,1,1) g = {:.5} ± {:.5} (want 0.5 ± 0.01); 1- vs 4-worker outputs bit-identical: {same}",
                scalar.g, scalar.std_err
            ),
        ))
    }
}

/// Brute-force extrema of both bounds over two-stream splits on a 1e-3 grid.
fn grid_extrema(c: &WiretapConfig, s: &RateSchedule<f64>, eta: f64) -> Result<(f64, f64)> {
    let r = s.r_s();
    let steps = ((r / 2.0) / 1e-3).round() as usize;
    let (mut best_up, mut best_lo) = (f64::INFINITY, 0.0f64);
    for i in 0..=steps {
        let b1 = (r / 2.0 + i as f64 * 1e-3).min(r);
        let split = vec![b1, r - b1];
        let up = upper_bound_thm1(c, s, eta, &Allocation::new(split.clone(), AllocationKind::Upper, r)?)?;
        let lo = lower_bound_thm2(c, s, eta, &Allocation::new(split, AllocationKind::Lower, r)?)?;
        best_up = best_up.min(up.probability);
        best_lo = best_lo.max(lo.probability);
    }
    Ok((best_up, best_lo))
}

/// Special functions against independent quadrature and series oracles.
fn special_functions() -> Report {
    let mut fails = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            fails.push(name.to_string());
        }
    };
    let gl = |a: f64, b: f64, f: &dyn Fn(f64) -> f64| integrate_interval(a, b, 400, f);

    check("Γ_inc(0, 5) = 0", reg_lower_inc_gamma(0.0f64, 5).ok() == Some(0.0));
    check(
        "Γ_inc(ln 2, 1) = 1/2",
        reg_lower_inc_gamma(2f64.ln(), 1).is_ok_and(|v| (v - 0.5).abs() < 1e-15),
    );
    let oracle = gl(0.0, 2.0, &|t| t * t * (-t).exp()) / 2.0;
    check(
        "Γ_inc(2, 3) vs quadrature",
        reg_lower_inc_gamma(2.0f64, 3).is_ok_and(|v| (v - oracle).abs() <= 1e-12),
    );
    check("Γ_inc(−1, 2) rejected", reg_lower_inc_gamma(-1.0f64, 2).is_err());

    check("Q(0) = 1/2", gauss_q(0.0f64) == 0.5);
    check(
        "Q symmetry",
        [0.5f64, 1.0, 2.0].iter().all(|&x| (gauss_q(x) + gauss_q(-x) - 1.0).abs() < 1e-15),
    );
    let tail = gl(1.644_853_6, 40.0, &|t| (-t * t / 2.0).exp() / std::f64::consts::TAU.sqrt());
    check(
        "Q(1.6448536) = 0.05",
        (gauss_q(1.644_853_6f64) - 0.05).abs() <= 1e-7 && (tail - 0.05).abs() <= 1e-7,
    );

    check(
        "E₀(1) = e^{−1}",
        exp_integral_en(0, 1.0f64).is_ok_and(|v| (v - (-1.0f64).exp()).abs() < 1e-15),
    );
    let mut recurrence = true;
    for &x in &[0.1f64, 1.0, 10.0] {
        for n in 0..=10u32 {
            let (a, b) = (exp_integral_en(n, x).unwrap(), exp_integral_en(n + 1, x).unwrap());
            let lhs = if n == 0 { 0.0 } else { n as f64 * b };
            if n > 0 && (lhs - (-x).exp() + x * a).abs() > 1e-14 {
                recurrence = false;
            }
        }
    }
    check("E_n recurrence residual", recurrence);
    // E₁(1) = ∫₀¹ e^{−1/u}/u du after t = 1/u
    let e1 = gl(0.0, 1.0, &|u| if u == 0.0 { 0.0 } else { (-1.0 / u).exp() / u });
    check(
        "E₁(1) vs quadrature",
        exp_integral_en(1, 1.0f64).is_ok_and(|v| (v - e1).abs() <= 1e-10 && (v - 0.219_383_9).abs() < 1e-7),
    );
    check("E_n(0) rejected", exp_integral_en(1, 0.0f64).is_err());

    check(
        "Γ(1, 2) = e^{−2}",
        upper_inc_gamma_int(1, 2.0f64).is_ok_and(|v| (v - (-2.0f64).exp()).abs() < 1e-15),
    );
    check(
        "Γ(3, 0⁺) = 2",
        upper_inc_gamma_int(3, 1e-12f64).is_ok_and(|v| (v - 2.0).abs() < 1e-10),
    );
    // Γ(−1, 1) = ∫₀¹ e^{−1/u} du after t = 1/u
    let g_m1 = gl(0.0, 1.0, &|u| if u == 0.0 { 0.0 } else { (-1.0 / u).exp() });
    check(
        "Γ(−1, 1) vs quadrature",
        upper_inc_gamma_int(-1, 1.0f64).is_ok_and(|v| (v - g_m1).abs() <= 1e-10 && (v - 0.148_495_5).abs() < 1e-7),
    );
    check("Γ(a, 0) rejected", upper_inc_gamma_int(2, 0.0f64).is_err());

    check("L₀ = 1", laguerre(0, 3, 7.5f64) == 1.0);
    check("L₁²(1) = 2", (laguerre(1, 2, 1.0f64) - 2.0).abs() < 1e-15);
    // L_n^α(x) = Σ_i (−1)^i C(n+α, n−i) x^i / i!
    let series = |n: u32, a: u32, x: f64| {
        let binom = |n: u32, k: u32| (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
        (0..=n)
            .map(|i| {
                let fact = (1..=i).fold(1.0, |acc, j| acc * j as f64);
                (-1f64).powi(i as i32) * binom(n + a, n - i) * x.powi(i as i32) / fact
            })
            .sum::<f64>()
    };
    check("L₃¹(2.5) vs series", (laguerre(3, 1, 2.5f64) - series(3, 1, 2.5)).abs() <= 1e-12);

    let passed = fails.is_empty();
    let detail = if passed {
        "all special-function oracles within tolerance".to_string()
    } else {
        format!("failed: {}", fails.join(", "))
    };
    report("special-functions", passed, detail)
}
