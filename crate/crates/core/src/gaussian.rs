//! Gaussian approximation of `Ψ = ln det(I + ρ H_eq H_eq†)`, `ρ = η/(N_t−N_e)`.
//!
//! The eigenvalues of `H_eq H_eq†` form an `m`-point Laguerre ensemble with
//! parameter `α = k − m`. Its correlation kernel is
//! `K(x, y) = Σ_{i<m} ψ_i(x) ψ_i(y)` with orthonormal Laguerre functions
//! `ψ_i(x) = √(i!/(i+α)!) L_i^α(x) x^{α/2} e^{−x/2}`, which turns both moments
//! of the linear statistic `Ψ = Σ φ(λ_i)`, `φ = ln(1+ρλ)`, into 1-D integrals:
//!
//! * `E Ψ = ∫ φ K(x, x)`
//! * `Var Ψ = ∫ φ² K(x, x) − Σ_{i,j} (∫ φ ψ_i ψ_j)²`

use crate::channel::{secrecy_rate, RateSchedule, WiretapConfig};
use crate::diversity::{DiversityPoint, Estimator};
use crate::linalg::{gram_eigenvalues, log_det_from_eigenvalues, sample_complex_gaussian};
use crate::quadrature::HalfLineRule;
use crate::rng::{chunked_map, trial_rng, Domain};
use crate::special::{gauss_hazard, gauss_q, laguerre, ln_factorial};
use crate::{Error, Real, Result};

/// Gauss–Legendre order per panel of the main rule.
const FINE_ORDER: usize = 20;
/// Order of the refinement check.
const COARSE_ORDER: usize = 14;
/// Largest relative disagreement between the two rules.
pub const QUADRATURE_TOL: f64 = 1e-6;
/// Fewest trials accepted by the Monte-Carlo moment estimator.
pub const MIN_MOMENT_TRIALS: u64 = 1_000_000;
/// Step in `ln η` for the moment derivatives.
pub const DERIVATIVE_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMethod {
    Quadrature,
    MonteCarlo { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentPair<T> {
    pub mean: T,
    pub variance: T,
    pub method: MomentMethod,
    /// Standard errors; zero for quadrature.
    pub mean_std_err: T,
    pub variance_std_err: T,
}

fn laguerre_alpha(cfg: &WiretapConfig) -> u32 {
    (cfg.k() - cfg.m()) as u32
}

/// `ψ_0(x), …, ψ_{m−1}(x)`.
fn laguerre_functions<T: Real>(m: usize, alpha: u32, x: T) -> Vec<T> {
    let half_alpha_ln_x = if alpha == 0 {
        T::zero()
    } else {
        T::from_u32(alpha).unwrap() / T::lit(2.0) * x.ln()
    };
    (0..m as u32)
        .map(|i| {
            let ln_norm = (ln_factorial::<T>(i) - ln_factorial::<T>(i + alpha)) / T::lit(2.0);
            laguerre(i, alpha, x) * (ln_norm + half_alpha_ln_x - x / T::lit(2.0)).exp()
        })
        .collect()
}

/// Marginal density of one unordered eigenvalue of `H_eq H_eq†`, `K(λ, λ)/m`.
pub fn eigen_density_marginal<T: Real>(cfg: &WiretapConfig, lambda: T) -> Result<T> {
    cfg.require_feasible()?;
    if !(lambda >= T::zero()) {
        return Err(Error::domain("eigen_density_marginal", format!("lambda = {lambda} must be nonnegative")));
    }
    let m = cfg.m();
    let k_xx: T = laguerre_functions(m, laguerre_alpha(cfg), lambda)
        .into_iter()
        .map(|p| p * p)
        .sum();
    Ok(k_xx / T::from_usize_lossy(m))
}

fn kernel_moments<T: Real>(cfg: &WiretapConfig, rho: T, order: usize) -> (T, T) {
    let m = cfg.m();
    let alpha = laguerre_alpha(cfg);
    let rule = HalfLineRule::<T>::new(order);
    let mut first = T::zero();
    let mut second = T::zero();
    let mut cross = vec![T::zero(); m * m];
    for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
        let psi = laguerre_functions(m, alpha, x);
        let phi = (rho * x).ln_1p();
        let k_xx: T = psi.iter().map(|p| *p * *p).sum();
        first += w * phi * k_xx;
        second += w * phi * phi * k_xx;
        for i in 0..m {
            for j in 0..m {
                cross[i * m + j] += w * phi * psi[i] * psi[j];
            }
        }
    }
    let off: T = cross.iter().map(|c| *c * *c).sum();
    (first, (second - off).max(T::zero()))
}

fn relative_gap<T: Real>(a: T, b: T) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == T::zero() {
        0.0
    } else {
        ((a - b).abs() / scale).to_f64_lossy()
    }
}

fn quadrature_moments<T: Real>(cfg: &WiretapConfig, rho: T) -> Result<MomentPair<T>> {
    let (mean, variance) = kernel_moments(cfg, rho, FINE_ORDER);
    let (mean_c, variance_c) = kernel_moments(cfg, rho, COARSE_ORDER);
    let gap = relative_gap(mean, mean_c).max(relative_gap(variance, variance_c));
    if gap > QUADRATURE_TOL || gap.is_nan() {
        return Err(Error::QuadratureFailed { relative: gap });
    }
    Ok(MomentPair {
        mean,
        variance,
        method: MomentMethod::Quadrature,
        mean_std_err: T::zero(),
        variance_std_err: T::zero(),
    })
}

/// Eigenvalues of `H H†` for an i.i.d. `N_m × (N_t−N_e)` Gaussian `H`.
pub fn sample_equivalent_eigenvalues<T: Real, R: rand::Rng + ?Sized>(cfg: &WiretapConfig, rng: &mut R) -> Vec<T> {
    let h = sample_complex_gaussian::<T, R>(cfg.n_m(), cfg.free_dims(), rng);
    gram_eigenvalues(&h)
}

fn monte_carlo_moments<T: Real>(cfg: &WiretapConfig, rho: T, trials: u64, seed: u64) -> Result<MomentPair<T>> {
    if trials < MIN_MOMENT_TRIALS {
        return Err(Error::domain(
            "mutual_info_moments",
            format!("need at least {MIN_MOMENT_TRIALS} trials, got {trials}"),
        ));
    }
    let samples: Vec<T> = chunked_map(trials, |range| {
        range
            .map(|i| {
                let mut rng = trial_rng(seed, Domain::Wishart, i);
                log_det_from_eigenvalues(&sample_equivalent_eigenvalues::<T, _>(cfg, &mut rng), rho)
            })
            .collect::<Vec<T>>()
    })
    .into_iter()
    .flatten()
    .collect();
    let n = T::from_u64(trials).unwrap();
    let mean = samples.iter().copied().sum::<T>() / n;
    let (mut m2, mut m4) = (T::zero(), T::zero());
    for &s in &samples {
        let d2 = (s - mean) * (s - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    let variance = m2 / (n - T::one());
    let mu4 = m4 / n;
    let pop_var = m2 / n;
    Ok(MomentPair {
        mean,
        variance,
        method: MomentMethod::MonteCarlo { trials, seed },
        mean_std_err: (variance / n).sqrt(),
        variance_std_err: ((mu4 - pop_var * pop_var).max(T::zero()) / n).sqrt(),
    })
}

/// Mean and variance of `Ψ(H_eq)` at SNR `eta`.
pub fn mutual_info_moments<T: Real>(cfg: &WiretapConfig, eta: T, method: MomentMethod) -> Result<MomentPair<T>> {
    cfg.require_feasible()?;
    if !(eta > T::zero() && eta.is_finite()) {
        return Err(Error::domain("mutual_info_moments", format!("eta = {eta} must be positive")));
    }
    let rho = eta / cfg.free_dims_real::<T>();
    match method {
        MomentMethod::Quadrature => quadrature_moments(cfg, rho),
        MomentMethod::MonteCarlo { trials, seed } => monte_carlo_moments(cfg, rho, trials, seed),
    }
}

fn standardized_margin<T: Real>(moments: &MomentPair<T>, rate: T) -> T {
    let sd = moments.variance.sqrt();
    let gap = moments.mean - rate;
    if sd > T::zero() {
        gap / sd
    } else if gap == T::zero() {
        T::zero()
    } else {
        gap.signum() * T::infinity()
    }
}

/// `Q((μ − R_s)/σ)` for given moments and target rate (nats).
pub fn outage_from_moments<T: Real>(moments: &MomentPair<T>, rate: T) -> T {
    gauss_q(standardized_margin(moments, rate))
}

/// Gaussian outage approximation with quadrature moments.
pub fn outage_gaussian_approx<T: Real>(cfg: &WiretapConfig, sched: &RateSchedule<T>, eta: T) -> Result<T> {
    outage_gaussian_approx_with(cfg, sched, eta, MomentMethod::Quadrature)
}

pub fn outage_gaussian_approx_with<T: Real>(
    cfg: &WiretapConfig,
    sched: &RateSchedule<T>,
    eta: T,
    method: MomentMethod,
) -> Result<T> {
    let moments = mutual_info_moments(cfg, eta, method)?;
    Ok(outage_from_moments(&moments, secrecy_rate(sched, eta)))
}

/// `(dμ/dη, dσ²/dη)` from quadrature moments.
pub fn moment_derivatives<T: Real>(cfg: &WiretapConfig, eta: T) -> Result<(T, T)> {
    moment_derivatives_with_step(cfg, eta, T::lit(DERIVATIVE_STEP))
}

/// Central differences in `ln η` with step `h`, extrapolated once.
pub fn moment_derivatives_with_step<T: Real>(cfg: &WiretapConfig, eta: T, h: T) -> Result<(T, T)> {
    let at = |s: T| mutual_info_moments(cfg, eta * s.exp(), MomentMethod::Quadrature);
    let diff = |h: T| -> Result<(T, T)> {
        let (p, q) = (at(h)?, at(-h)?);
        let two_h = T::lit(2.0) * h;
        Ok(((p.mean - q.mean) / two_h, (p.variance - q.variance) / two_h))
    };
    let (m1, v1) = diff(h)?;
    let (m2, v2) = diff(h / T::lit(2.0))?;
    let rich = |coarse: T, fine: T| (T::lit(4.0) * fine - coarse) / T::lit(3.0) / eta;
    Ok((rich(m1, m2), rich(v1, v2)))
}

/// Log-slope of the Gaussian outage approximation:
/// `η · φ(u)/Q(u) · u′` with `u = (μ − R_s)/σ`.
pub fn diversity_gaussian_estimate<T: Real>(
    cfg: &WiretapConfig,
    sched: &RateSchedule<T>,
    eta: T,
) -> Result<DiversityPoint<T>> {
    if !(sched.r_s() > T::zero()) {
        return Err(Error::domain("diversity_gaussian_estimate", "r_s must be positive"));
    }
    let moments = mutual_info_moments(cfg, eta, MomentMethod::Quadrature)?;
    let (d_mean, d_var) = moment_derivatives(cfg, eta)?;
    let rate = secrecy_rate(sched, eta);
    let d_rate = sched.r_s() * sched.g() / (T::one() + sched.g() * eta);
    let sd = moments.variance.sqrt();
    let gap = moments.mean - rate;
    let u = gap / sd;
    let du = (d_mean - d_rate) / sd - gap * d_var / (T::lit(2.0) * moments.variance * sd);
    let value = eta * gauss_hazard(u) * du;
    Ok(DiversityPoint::new(sched.r_s(), eta, value, Estimator::Gaussian))
}
