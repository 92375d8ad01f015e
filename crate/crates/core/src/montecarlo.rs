//! Monte-Carlo ground truth for the zero-forcing secrecy outage probability.
//!
//! Trial `i` always draws `(H_m, H_e)` from the stream `(seed, i)`, so a sample
//! of equivalent-channel spectra is a pure function of `(cfg, trials, seed)`.
//! One sample serves every `(η, r_s)` point of a grid.

use crate::channel::{equivalent_channel, sample_channels, secrecy_rate, RateSchedule, WiretapConfig};
use crate::diversity::{DiversityPoint, Estimator};
use crate::linalg::{gram_eigenvalues, log_det_from_eigenvalues};
use crate::rng::{chunked_map, trial_rng, Domain};
use crate::{Error, Real, Result};

pub const MIN_TRIALS: u64 = 1_000;
/// Failures required at each endpoint of an empirical slope.
pub const MIN_FAILURES: u64 = 100;
pub const DEFAULT_REL_STEP: f64 = 0.12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate<T> {
    pub probability: T,
    pub trials: u64,
    pub failures: u64,
    pub std_err: T,
    pub seed: u64,
    pub eta: T,
    pub r_s: T,
}

impl<T: Real> OutageEstimate<T> {
    fn from_counts(failures: u64, trials: u64, seed: u64, eta: T, r_s: T) -> Self {
        let n = T::from_u64(trials).unwrap();
        let p = T::from_u64(failures).unwrap() / n;
        Self {
            probability: p,
            trials,
            failures,
            std_err: (p * (T::one() - p) / n).sqrt(),
            seed,
            eta,
            r_s,
        }
    }
}

/// Eigenvalues of `H_eq H_eq†` for trial `index`.
pub fn equivalent_spectrum<T: Real>(cfg: &WiretapConfig, seed: u64, index: u64) -> Result<Vec<T>> {
    let mut rng = trial_rng(seed, Domain::Channel, index);
    let (h_m, h_e) = sample_channels::<T, _>(cfg, &mut rng);
    let h_eq = equivalent_channel(&h_m, h_e.as_ref())?;
    Ok(gram_eigenvalues(&h_eq))
}

/// Equivalent-channel spectra of `trials` seeded channel draws, stored flat.
#[derive(Debug, Clone)]
pub struct SpectrumSample<T> {
    cfg: WiretapConfig,
    seed: u64,
    trials: u64,
    eigenvalues: Vec<T>,
}

impl<T: Real> SpectrumSample<T> {
    pub fn draw(cfg: &WiretapConfig, trials: u64, seed: u64) -> Result<Self> {
        cfg.require_feasible()?;
        if trials < MIN_TRIALS {
            return Err(Error::domain(
                "simulate_outage",
                format!("need at least {MIN_TRIALS} trials, got {trials}"),
            ));
        }
        let chunks = chunked_map(trials, |range| -> Result<Vec<T>> {
            let mut out = Vec::with_capacity((range.end - range.start) as usize * cfg.m());
            for i in range {
                out.extend(equivalent_spectrum::<T>(cfg, seed, i)?);
            }
            Ok(out)
        });
        let mut eigenvalues = Vec::with_capacity(trials as usize * cfg.m());
        for c in chunks {
            eigenvalues.extend(c?);
        }
        Ok(Self {
            cfg: *cfg,
            seed,
            trials,
            eigenvalues,
        })
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn config(&self) -> &WiretapConfig {
        &self.cfg
    }

    /// `Ψ` of every trial at SNR `eta`.
    pub fn mutual_information(&self, eta: T) -> Vec<T> {
        let rho = eta / self.cfg.free_dims_real::<T>();
        self.eigenvalues
            .chunks(self.cfg.m())
            .map(|eig| log_det_from_eigenvalues(eig, rho))
            .collect()
    }

    /// Fraction of trials with `Ψ < rate` (rate in nats).
    pub fn outage_at_rate(&self, eta: T, rate: T, r_s: T) -> OutageEstimate<T> {
        let failures = self.mutual_information(eta).into_iter().filter(|&psi| psi < rate).count() as u64;
        OutageEstimate::from_counts(failures, self.trials, self.seed, eta, r_s)
    }

    pub fn outage(&self, sched: &RateSchedule<T>, eta: T) -> OutageEstimate<T> {
        self.outage_at_rate(eta, secrecy_rate(sched, eta), sched.r_s())
    }

    /// Outage for every rate in `scheds` at one SNR; `Ψ` is computed once.
    pub fn outage_for_rates(&self, scheds: &[RateSchedule<T>], eta: T) -> Vec<OutageEstimate<T>> {
        let psi = self.mutual_information(eta);
        scheds
            .iter()
            .map(|s| {
                let rate = secrecy_rate(s, eta);
                let failures = psi.iter().filter(|&&v| v < rate).count() as u64;
                OutageEstimate::from_counts(failures, self.trials, self.seed, eta, s.r_s())
            })
            .collect()
    }
}

/// `P[Ψ(H_eq) < R_s]` from `trials` seeded channel draws.
pub fn simulate_outage<T: Real>(
    cfg: &WiretapConfig,
    sched: &RateSchedule<T>,
    eta: T,
    trials: u64,
    seed: u64,
) -> Result<OutageEstimate<T>> {
    Ok(SpectrumSample::draw(cfg, trials, seed)?.outage(sched, eta))
}

/// As [`simulate_outage`] but with the target rate given directly in nats.
pub fn simulate_outage_at_rate<T: Real>(
    cfg: &WiretapConfig,
    rate: T,
    eta: T,
    trials: u64,
    seed: u64,
) -> Result<OutageEstimate<T>> {
    Ok(SpectrumSample::draw(cfg, trials, seed)?.outage_at_rate(eta, rate, T::nan()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalDiversity<T> {
    pub point: DiversityPoint<T>,
    pub std_err: T,
    pub low: OutageEstimate<T>,
    pub high: OutageEstimate<T>,
}

/// Two-point log-log slope of the simulated outage at `η(1 ± rel_step)`.
pub fn empirical_diversity<T: Real>(
    cfg: &WiretapConfig,
    sched: &RateSchedule<T>,
    eta: T,
    trials: u64,
    seed: u64,
    rel_step: T,
) -> Result<EmpiricalDiversity<T>> {
    let sample = SpectrumSample::draw(cfg, trials, seed)?;
    empirical_diversity_from(&sample, sched, eta, rel_step)
}

/// [`empirical_diversity`] on an existing sample.
///
/// Both endpoints share the sample; the standard error accounts for the
/// resulting correlation of the two indicator counts.
pub fn empirical_diversity_from<T: Real>(
    sample: &SpectrumSample<T>,
    sched: &RateSchedule<T>,
    eta: T,
    rel_step: T,
) -> Result<EmpiricalDiversity<T>> {
    if !(rel_step >= T::lit(0.01) && rel_step <= T::lit(0.5)) {
        return Err(Error::domain("empirical_diversity", format!("rel_step = {rel_step} not in [0.01, 0.5]")));
    }
    let (eta_lo, eta_hi) = (eta * (T::one() - rel_step), eta * (T::one() + rel_step));
    let (rate_lo, rate_hi) = (secrecy_rate(sched, eta_lo), secrecy_rate(sched, eta_hi));
    let (psi_lo, psi_hi) = (sample.mutual_information(eta_lo), sample.mutual_information(eta_hi));
    let (mut n_lo, mut n_hi, mut n_both) = (0u64, 0u64, 0u64);
    for (a, b) in psi_lo.iter().zip(&psi_hi) {
        let (x, y) = (*a < rate_lo, *b < rate_hi);
        n_lo += x as u64;
        n_hi += y as u64;
        n_both += (x && y) as u64;
    }
    let worst = n_lo.min(n_hi);
    if worst < MIN_FAILURES {
        let per_failure = sample.trials as f64 / (worst.max(1) as f64);
        return Err(Error::InsufficientFailures {
            failures: worst,
            required: MIN_FAILURES,
            suggested_trials: (per_failure * MIN_FAILURES as f64 * 1.2).ceil() as u64,
        });
    }
    let n = T::from_u64(sample.trials).unwrap();
    let (p_lo, p_hi, p_both) = (
        T::from_u64(n_lo).unwrap() / n,
        T::from_u64(n_hi).unwrap() / n,
        T::from_u64(n_both).unwrap() / n,
    );
    let span = eta_hi.ln() - eta_lo.ln();
    let slope = -(p_hi.ln() - p_lo.ln()) / span;
    // Delta method on (ln p̂_hi − ln p̂_lo) with shared trials.
    let var = (p_lo.recip() + p_hi.recip() - T::lit(2.0) * p_both / (p_lo * p_hi)).max(T::zero()) / n;
    let low = OutageEstimate::from_counts(n_lo, sample.trials, sample.seed, eta_lo, sched.r_s());
    let high = OutageEstimate::from_counts(n_hi, sample.trials, sample.seed, eta_hi, sched.r_s());
    Ok(EmpiricalDiversity {
        point: DiversityPoint::new(sched.r_s(), eta, slope, Estimator::Empirical),
        std_err: var.sqrt() / span,
        low,
        high,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{optimize_lower, optimize_upper};
    use crate::channel::make_config;
    use crate::db_to_linear;
    use crate::diversity::diversity_lower_estimate;
    use crate::linalg::log_det_mutual_info;

    fn pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
    }

    #[test]
    fn spectrum_matches_log_det_of_equivalent_channel() {
        let cfg = make_config(4, 2, 1).unwrap();
        for i in 0..20 {
            let mut rng = trial_rng(5, Domain::Channel, i);
            let (h_m, h_e) = sample_channels::<f64, _>(&cfg, &mut rng);
            let h_eq = equivalent_channel(&h_m, h_e.as_ref()).unwrap();
            let eig = equivalent_spectrum::<f64>(&cfg, 5, i).unwrap();
            assert_eq!(log_det_from_eigenvalues(&eig, 3.0), log_det_mutual_info(&h_eq, 3.0));
        }
    }

    #[test]
    fn trivial_rates() {
        let cfg = make_config(4, 2, 1).unwrap();
        let s = RateSchedule::new(&cfg, 0.0, 1.0).unwrap();
        assert_eq!(simulate_outage(&cfg, &s, 10.0f64, 5_000, 1).unwrap().probability, 0.0);
        let p = simulate_outage_at_rate(&cfg, 1e6, 10.0f64, 5_000, 1).unwrap();
        assert_eq!(p.probability, 1.0);
        assert_eq!(p.std_err, 0.0);
    }

    #[test]
    fn rejects_infeasible_and_tiny_runs() {
        let s = RateSchedule::new(&make_config(4, 2, 1).unwrap(), 0.5, 1.0).unwrap();
        let bad = make_config(2, 2, 2).unwrap();
        assert!(matches!(simulate_outage(&bad, &s, 10.0f64, 5_000, 1), Err(Error::Infeasible { .. })));
        assert!(simulate_outage(&make_config(4, 2, 1).unwrap(), &s, 10.0f64, 10, 1).is_err());
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let cfg = make_config(3, 2, 1).unwrap();
        let s = RateSchedule::new(&cfg, 1.0, 1.5).unwrap();
        let a = pool(1, || simulate_outage(&cfg, &s, 10.0f64, 20_000, 9).unwrap());
        let b = pool(4, || simulate_outage(&cfg, &s, 10.0f64, 20_000, 9).unwrap());
        assert_eq!(a, b);
        let c = simulate_outage(&cfg, &s, 10.0f64, 20_000, 10).unwrap();
        assert_ne!(a.failures, c.failures);
    }

    #[test]
    fn outage_decreases_with_snr() {
        let cfg = make_config(4, 2, 1).unwrap();
        let s = RateSchedule::new(&cfg, 1.0, 2.0).unwrap();
        let sample = SpectrumSample::<f64>::draw(&cfg, 100_000, 4).unwrap();
        let mut prev: Option<OutageEstimate<f64>> = None;
        for db in (0..=30).step_by(5) {
            let est = sample.outage(&s, db_to_linear(db as f64));
            if let Some(p) = prev {
                assert!(est.probability <= p.probability + 3.0 * (est.std_err + p.std_err));
            }
            prev = Some(est);
        }
    }

    #[test]
    fn sandwiched_by_bounds() {
        let cfg = make_config(4, 2, 1).unwrap();
        let s = RateSchedule::new(&cfg, 0.5, 2.0).unwrap();
        let eta = db_to_linear(10.0);
        let est = simulate_outage(&cfg, &s, eta, 200_000, 7).unwrap();
        let lo = optimize_lower(&cfg, &s, eta).unwrap().probability;
        let up = optimize_upper(&cfg, &s, eta).unwrap().probability;
        assert!(lo - 3.0 * est.std_err <= est.probability && est.probability <= up + 3.0 * est.std_err);
    }

    #[test]
    fn empirical_slope_std_err_scales_as_root_n() {
        let cfg = make_config(3, 2, 1).unwrap();
        let s = RateSchedule::new(&cfg, 1.0, 1.5).unwrap();
        let eta = db_to_linear(10.0);
        let a = empirical_diversity(&cfg, &s, eta, 50_000, 2, 0.12).unwrap();
        let b = empirical_diversity(&cfg, &s, eta, 100_000, 2, 0.12).unwrap();
        let c = empirical_diversity(&cfg, &s, eta, 200_000, 2, 0.12).unwrap();
        let ratio = b.std_err / a.std_err;
        assert!((ratio / std::f64::consts::FRAC_1_SQRT_2 - 1.0).abs() < 0.2, "{ratio}");
        let ratio = c.std_err / a.std_err;
        assert!((ratio / 0.5 - 1.0).abs() < 0.2, "{ratio}");
        assert!(a.point.value > 0.0 && b.point.value > 0.0);
    }

    #[test]
    fn insufficient_failures_reports_required_trials() {
        let cfg = make_config(3, 2, 1).unwrap();
        let s = RateSchedule::new(&cfg, 0.05, 1.5).unwrap();
        match empirical_diversity(&cfg, &s, db_to_linear(10.0), 2_000, 1, 0.12) {
            Err(Error::InsufficientFailures { required, suggested_trials, .. }) => {
                assert_eq!(required, MIN_FAILURES);
                assert!(suggested_trials > 2_000);
            }
            other => panic!("expected InsufficientFailures, got {other:?}"),
        }
        assert!(empirical_diversity(&cfg, &s, 10.0, 2_000, 1, 0.9).is_err());
    }

    #[test]
    fn empirical_slope_tracks_lower_estimate_at_high_rate_gap() {
        // Mid-range rate where failures are plentiful.
        let cfg = make_config(3, 2, 1).unwrap();
        let s = RateSchedule::new(&cfg, 1.5f64, 1.5).unwrap();
        let eta = db_to_linear(10.0);
        let emp = empirical_diversity(&cfg, &s, eta, 200_000, 3, 0.12).unwrap();
        let lo = optimize_lower(&cfg, &s, eta).unwrap();
        let d_lo = diversity_lower_estimate(&cfg, &s, eta, &lo.allocation).unwrap().value;
        assert!(emp.point.value > 0.0 && d_lo > 0.0);
        assert!((emp.point.value - d_lo).abs() < 1.0, "{} vs {d_lo}", emp.point.value);
    }

    /// Slow on a single core: needs roughly 10⁸ trials.
    #[test]
    #[ignore]
    fn small_rate_slope_matches_lower_estimate() {
        let cfg = make_config(3, 2, 1).unwrap();
        let g = crate::channel::estimate_array_gain::<f64>(&cfg, 1_000_000, 7).unwrap().g;
        let s = RateSchedule::new(&cfg, 0.05, g).unwrap();
        let eta = db_to_linear(10.0);
        let mut trials = 1_000_000;
        let emp = loop {
            match empirical_diversity(&cfg, &s, eta, trials, 7, 0.12) {
                Ok(e) => break e,
                Err(Error::InsufficientFailures { suggested_trials, .. }) => trials = suggested_trials,
                Err(e) => panic!("{e}"),
            }
        };
        let lo = optimize_lower(&cfg, &s, eta).unwrap();
        let d_lo = diversity_lower_estimate(&cfg, &s, eta, &lo.allocation).unwrap().value;
        assert!((emp.point.value - d_lo).abs() <= 3.0 * emp.std_err, "{} ± {} vs {d_lo}", emp.point.value, emp.std_err);
    }
}
