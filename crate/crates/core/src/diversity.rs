//! Finite-SNR diversity estimates `d = −η ∂ ln P/∂η` derived from the analytic
//! bounds, together with their small-rate and high-SNR limits.
//!
//! Every estimator holds its rate split fixed while differentiating, so each one
//! is exactly the log-slope of the bound it comes from.

use std::fmt;

use crate::bounds::{harmonic_weight, lower_shapes, upper_shapes, xi, Allocation, AllocationKind};
use crate::channel::{RateSchedule, WiretapConfig};
use crate::special::{gamma_density_ratio, ln_reg_lower_inc_gamma};
use crate::{Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    Upper,
    Lower,
    ExactM1,
    Asymptotic,
    Gaussian,
    Empirical,
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Upper => "upper",
            Self::Lower => "lower",
            Self::ExactM1 => "exact-m1",
            Self::Asymptotic => "asymptotic",
            Self::Gaussian => "gaussian",
            Self::Empirical => "empirical",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiversityPoint<T> {
    pub r_s: T,
    pub eta: T,
    pub value: T,
    pub estimator: Estimator,
}

impl<T: Real> DiversityPoint<T> {
    pub(crate) fn new(r_s: T, eta: T, value: T, estimator: Estimator) -> Self {
        Self {
            r_s,
            eta,
            // Rounding can leave tiny negatives where the slope is ~0.
            value: value.max(T::zero()),
            estimator,
        }
    }
}

/// `1 − gη / ((1+gη) ln(1+gη))`, the SNR penalty shared by the small-rate limits.
pub fn snr_factor<T: Real>(g: T, eta: T) -> T {
    let ge = g * eta;
    let l = ge.ln_1p();
    if ge < T::lit(1e-4) {
        // Series: ge/2 − 5ge²/12 + …
        return ge / T::lit(2.0) - T::lit(5.0 / 12.0) * ge * ge;
    }
    T::one() - ge / ((T::one() + ge) * l)
}

/// `f_j(x) = A(x) · ξ(x)^{k−j} e^{−ξ(x)} / (k−j)! / Γ_inc(ξ(x), k−j+1)` with
/// `A(x) = (1+gη)^x − x gη (1+gη)^{x−1} − 1`.
///
/// The index may be zero or negative. At `x = 0` the continuous limit
/// `(η/c)·(k−j+1)·(1 − gη/((1+gη) ln(1+gη)))` is returned, `c = N_t − N_e`.
pub fn f_factor<T: Real>(j: i32, x: T, eta: T, sched: &RateSchedule<T>, cfg: &WiretapConfig) -> Result<T> {
    let shape = cfg.k() as i64 - j as i64 + 1;
    if shape < 1 {
        return Err(Error::domain("f_factor", format!("k − j = {} is negative", shape - 1)));
    }
    if !(x >= T::zero()) {
        return Err(Error::domain("f_factor", format!("x = {x} must be nonnegative")));
    }
    let shape_t = T::from_i64(shape).unwrap();
    let c: T = cfg.free_dims_real();
    if x == T::zero() {
        return Ok(eta / c * shape_t * snr_factor(sched.g(), eta));
    }
    let ge = sched.g() * eta;
    let l = sched.log_gain(eta);
    let a = (x * l).exp_m1() - x * ge * ((x - T::one()) * l).exp();
    Ok(a * gamma_density_ratio(xi(x, eta, sched, cfg), shape as u32))
}

fn require_positive_rate<T: Real>(sched: &RateSchedule<T>, eta: T, func: &'static str) -> Result<()> {
    if !(sched.r_s() > T::zero()) {
        return Err(Error::domain(func, "r_s must be positive"));
    }
    if !(eta > T::zero() && eta.is_finite()) {
        return Err(Error::domain(func, format!("eta = {eta} must be positive")));
    }
    Ok(())
}

fn check_allocation<T: Real>(cfg: &WiretapConfig, alloc: &Allocation<T>, kind: AllocationKind, func: &'static str) -> Result<()> {
    if alloc.kind() != kind || alloc.values().len() != cfg.m() {
        return Err(Error::domain(func, "allocation does not match the configuration"));
    }
    Ok(())
}

/// Log-slope of the rate-split upper bound at a fixed allocation `b`.
pub fn diversity_upper_estimate<T: Real>(
    cfg: &WiretapConfig,
    sched: &RateSchedule<T>,
    eta: T,
    alloc: &Allocation<T>,
) -> Result<DiversityPoint<T>> {
    cfg.require_feasible()?;
    require_positive_rate(sched, eta, "diversity_upper_estimate")?;
    check_allocation(cfg, alloc, AllocationKind::Upper, "diversity_upper_estimate")?;
    let c: T = cfg.free_dims_real();
    let r = sched.r_s();
    let x_r = xi(r, eta, sched, cfg);
    let shapes = upper_shapes(cfg);
    let b = alloc.values();

    let mut u = Vec::with_capacity(b.len());
    let mut f_r = Vec::with_capacity(b.len());
    let mut f_b = Vec::with_capacity(b.len());
    for (l, (&bl, &a)) in b.iter().zip(&shapes).enumerate() {
        let ln_beta = ln_reg_lower_inc_gamma(xi(bl, eta, sched, cfg), a);
        u.push((ln_beta - ln_reg_lower_inc_gamma(x_r, a)).exp().min(T::one()));
        let j = l as i32 + 1;
        f_r.push(f_factor(j, r, eta, sched, cfg)?);
        f_b.push(f_factor(j, bl, eta, sched, cfg)?);
    }
    let one_minus_p = -u.iter().map(|&v| (-v).ln_1p()).sum::<T>().exp_m1();

    let mut total = T::zero();
    for l in 0..b.len() {
        let others = (0..b.len())
            .filter(|&i| i != l)
            .fold(T::one(), |acc, i| acc * (T::one() - u[i]));
        let correction = if u[l] == T::zero() {
            T::zero()
        } else {
            u[l] * (f_b[l] - f_r[l]) * others / one_minus_p
        };
        total += f_r[l] + correction;
    }
    Ok(DiversityPoint::new(r, eta, c / eta * total, Estimator::Upper))
}

/// Log-slope of the product-form lower bound at a fixed allocation `a`:
/// `(c/η) Σ_l f_{2l−m}(a_l)`.
pub fn diversity_lower_estimate<T: Real>(
    cfg: &WiretapConfig,
    sched: &RateSchedule<T>,
    eta: T,
    alloc: &Allocation<T>,
) -> Result<DiversityPoint<T>> {
    cfg.require_feasible()?;
    require_positive_rate(sched, eta, "diversity_lower_estimate")?;
    check_allocation(cfg, alloc, AllocationKind::Lower, "diversity_lower_estimate")?;
    let c: T = cfg.free_dims_real();
    let m = cfg.m() as i32;
    debug_assert_eq!(lower_shapes(cfg).len(), alloc.values().len());
    let mut total = T::zero();
    for (l, &al) in alloc.values().iter().enumerate() {
        let j = 2 * (l as i32 + 1) - m;
        total += f_factor(j, al, eta, sched, cfg)?;
    }
    Ok(DiversityPoint::new(sched.r_s(), eta, c / eta * total, Estimator::Lower))
}

/// Single-stream diversity `(c/η) f₁(r_s)`, exact because both bounds coincide.
pub fn diversity_exact_m1<T: Real>(cfg: &WiretapConfig, sched: &RateSchedule<T>, eta: T) -> Result<DiversityPoint<T>> {
    cfg.require_feasible()?;
    if cfg.m() != 1 {
        return Err(Error::domain("diversity_exact_m1", format!("m = {} but the closed form needs m = 1", cfg.m())));
    }
    require_positive_rate(sched, eta, "diversity_exact_m1")?;
    let c: T = cfg.free_dims_real();
    let f = f_factor(1, sched.r_s(), eta, sched, cfg)?;
    Ok(DiversityPoint::new(sched.r_s(), eta, c / eta * f, Estimator::ExactM1))
}

/// Infinite-SNR tradeoff: piecewise linear through `(l, (N_t−N_e−l)(N_m−l))`.
pub fn asymptotic_dmt<T: Real>(cfg: &WiretapConfig, r_s: T) -> Result<T> {
    if !cfg.is_feasible() {
        return Ok(T::zero());
    }
    let m = cfg.m();
    if !(r_s >= T::zero() && r_s <= T::from_usize_lossy(m)) {
        return Err(Error::domain("asymptotic_dmt", format!("r_s = {r_s} outside [0, {m}]")));
    }
    let anchor = |l: usize| T::from_usize_lossy((cfg.free_dims() - l) * (cfg.n_m() - l));
    let lo = r_s.floor().to_usize().unwrap().min(m.saturating_sub(1));
    let t = r_s - T::from_usize_lossy(lo);
    Ok(anchor(lo) + t * (anchor(lo + 1) - anchor(lo)))
}

/// Small-rate maxima of the upper- and lower-bound estimates:
/// `(m k (1 − (m−1)/(2k))·F, m k·F)` with `F` = [`snr_factor`].
pub fn max_diversity_estimates<T: Real>(cfg: &WiretapConfig, sched: &RateSchedule<T>, eta: T) -> Result<(T, T)> {
    cfg.require_feasible()?;
    let (m, k) = (T::from_usize_lossy(cfg.m()), T::from_usize_lossy(cfg.k()));
    let f = snr_factor(sched.g(), eta);
    let upper = m * k * (T::one() - (m - T::one()) / (T::lit(2.0) * k));
    Ok((upper * f, m * k * f))
}

/// High-SNR limit of the upper-bound estimate under the optimal split.
///
/// On `[0, 1)`: `(1 − r_s)·Σ_l (k−l+1) + δ` with `δ = (m−1) r_s / Σ_l 1/(k−l+1)`;
/// on `[1, m]`: `(m − r_s) / Σ_l 1/(k−l+1)`.
pub fn highsnr_upper_dmt<T: Real>(cfg: &WiretapConfig, r_s: T) -> Result<T> {
    cfg.require_feasible()?;
    let m = T::from_usize_lossy(cfg.m());
    if !(r_s >= T::zero() && r_s <= m) {
        return Err(Error::domain("highsnr_upper_dmt", format!("r_s = {r_s} outside [0, {m}]")));
    }
    let h: T = harmonic_weight(cfg);
    if r_s < T::one() {
        let full: T = upper_shapes(cfg).into_iter().map(|a| T::from_u32(a).unwrap()).sum();
        Ok((T::one() - r_s) * full + (m - T::one()) * r_s / h)
    } else {
        Ok((m - r_s) / h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{lower_bound_thm2, optimize_lower, optimize_upper, upper_bound_thm1};
    use crate::channel::make_config;
    use crate::db_to_linear;

    fn sched(cfg: &WiretapConfig, r: f64, g: f64) -> RateSchedule<f64> {
        RateSchedule::new(cfg, r, g).unwrap()
    }

    /// `−η d/dη` of `log_fn` by central differences in `ln η`, step `h`, one
    /// Richardson extrapolation.
    fn log_slope(eta: f64, h: f64, log_fn: impl Fn(f64) -> f64) -> f64 {
        let d = |h: f64| (log_fn(eta * h.exp()) - log_fn(eta * (-h).exp())) / (2.0 * h);
        -(4.0 * d(h / 2.0) - d(h)) / 3.0
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn f_factor_small_argument_limit() {
        let cfg = make_config(4, 2, 1).unwrap();
        let s = sched(&cfg, 1.0, 1.0);
        let limit = f_factor(1, 0.0, 1.0, &s, &cfg).unwrap();
        let c_over_eta = 3.0;
        let hand = (1.0 - 1.0 / (2.0 * 2f64.ln())) * 3.0;
        assert!((c_over_eta * limit - hand).abs() < 1e-12);
        assert!((c_over_eta * limit - 0.83596).abs() < 1e-5);
        let near = f_factor(1, 1e-9, 1.0, &s, &cfg).unwrap();
        assert!(rel(near, limit) < 1e-6, "{near} vs {limit}");
        for &eta in &[0.1, 10.0, 1e4] {
            let l = f_factor(0, 0.0, eta, &s, &cfg).unwrap();
            assert!(rel(f_factor(0, 1e-9, eta, &s, &cfg).unwrap(), l) < 1e-6);
        }
        assert!(f_factor(3, 0.3, 1.0, &s, &cfg).is_ok());
        assert!(f_factor(4, 0.3, 1.0, &s, &cfg).is_err());
    }

    #[test]
    fn f_factor_is_log_slope_of_incomplete_gamma() {
        let cfg = make_config(4, 2, 1).unwrap();
        let s = sched(&cfg, 1.0, 2.5);
        let c = 3.0;
        for &j in &[0, 1, 2] {
            for &x in &[0.3, 0.7] {
                for &eta in &[2.0, 10.0] {
                    let a = (cfg.k() as i32 - j + 1) as u32;
                    let fd = log_slope(eta, 1e-4, |e| ln_reg_lower_inc_gamma(xi(x, e, &s, &cfg), a));
                    let an = c / eta * f_factor(j, x, eta, &s, &cfg).unwrap();
                    assert!(rel(an, fd) < 1e-6, "j={j} x={x} eta={eta}: {an} vs {fd}");
                }
            }
        }
    }

    #[test]
    fn estimators_match_finite_differences() {
        for cfg in [make_config(3, 2, 1).unwrap(), make_config(4, 2, 1).unwrap()] {
            for &r in &[0.3, 0.7, 1.0, 1.5] {
                for &eta in &[2.0, 10.0, 100.0] {
                    let s = sched(&cfg, r, 3.0);
                    let up = optimize_upper(&cfg, &s, eta).unwrap().allocation;
                    let lo = optimize_lower(&cfg, &s, eta).unwrap().allocation;
                    let du = diversity_upper_estimate(&cfg, &s, eta, &up).unwrap().value;
                    let dl = diversity_lower_estimate(&cfg, &s, eta, &lo).unwrap().value;
                    let fu = log_slope(eta, 1e-4, |e| upper_bound_thm1(&cfg, &s, e, &up).unwrap().ln_probability);
                    let fl = log_slope(eta, 1e-4, |e| lower_bound_thm2(&cfg, &s, e, &lo).unwrap().ln_probability);
                    assert!(rel(du, fu) < 1e-5, "{cfg} r={r} eta={eta}: upper {du} vs {fu}");
                    assert!(rel(dl, fl) < 1e-5, "{cfg} r={r} eta={eta}: lower {dl} vs {fl}");
                }
            }
        }
    }

    #[test]
    fn single_stream_collapse() {
        let cfg = make_config(2, 1, 1).unwrap();
        let s = sched(&cfg, 0.5, 0.5);
        let eta = 10.0;
        let up = Allocation::new(vec![0.5], AllocationKind::Upper, 0.5).unwrap();
        let lo = Allocation::new(vec![0.5], AllocationKind::Lower, 0.5).unwrap();
        let exact = diversity_exact_m1(&cfg, &s, eta).unwrap().value;
        assert_eq!(diversity_upper_estimate(&cfg, &s, eta, &up).unwrap().value, exact);
        assert_eq!(diversity_lower_estimate(&cfg, &s, eta, &lo).unwrap().value, exact);
        let far = diversity_exact_m1(&cfg, &s, 1e12).unwrap().value;
        assert!((far - 0.5).abs() < 0.03, "{far}");
        assert!(diversity_exact_m1(&make_config(4, 2, 1).unwrap(), &s, eta).is_err());
    }

    #[test]
    fn small_rate_limits() {
        for cfg in [make_config(3, 2, 1).unwrap(), make_config(4, 2, 1).unwrap()] {
            let r = 1e-3;
            let eta = db_to_linear(10.0);
            let s = sched(&cfg, r, 2.0);
            let (mu, ml) = max_diversity_estimates(&cfg, &s, eta).unwrap();
            let up = optimize_upper(&cfg, &s, eta).unwrap().allocation;
            let lo = optimize_lower(&cfg, &s, eta).unwrap().allocation;
            let du = diversity_upper_estimate(&cfg, &s, eta, &up).unwrap().value;
            let dl = diversity_lower_estimate(&cfg, &s, eta, &lo).unwrap().value;
            assert!(rel(du, mu) < 0.01, "{cfg}: {du} vs {mu}");
            assert!(rel(dl, ml) < 0.01, "{cfg}: {dl} vs {ml}");
        }
    }

    #[test]
    fn maxima_limits_and_ordering() {
        let cfg = make_config(4, 2, 1).unwrap();
        let s = sched(&cfg, 1.0, 1.0);
        let (u, l) = max_diversity_estimates(&cfg, &s, 1e300).unwrap();
        assert!((u - 5.0).abs() < 0.01 && (l - 6.0).abs() < 0.01);
        let (u, l) = max_diversity_estimates(&cfg, &s, 1e-12).unwrap();
        assert!(u < 1e-9 && l < 1e-9);
        for &db in &[-20.0, 0.0, 20.0, 60.0] {
            let (u, l) = max_diversity_estimates(&cfg, &s, db_to_linear(db)).unwrap();
            assert!(u <= l);
        }
    }

    #[test]
    fn asymptotic_tradeoff_anchors() {
        let cfg = make_config(4, 2, 1).unwrap();
        assert_eq!(asymptotic_dmt(&cfg, 0.0).unwrap(), 6.0);
        assert_eq!(asymptotic_dmt(&cfg, 1.0).unwrap(), 2.0);
        assert_eq!(asymptotic_dmt(&cfg, 2.0).unwrap(), 0.0);
        assert_eq!(asymptotic_dmt(&cfg, 1.5).unwrap(), 1.0);
        assert!(asymptotic_dmt(&cfg, 2.5).is_err());
        let cfg = make_config(3, 2, 1).unwrap();
        assert_eq!(asymptotic_dmt(&cfg, 0.0).unwrap(), 4.0);
        assert_eq!(asymptotic_dmt(&cfg, 1.0).unwrap(), 1.0);
        assert_eq!(asymptotic_dmt(&cfg, 2.0).unwrap(), 0.0);
        let cfg = make_config(2, 2, 2).unwrap();
        assert_eq!(asymptotic_dmt(&cfg, 0.7).unwrap(), 0.0);
    }

    #[test]
    fn high_snr_upper_curve() {
        let cfg = make_config(4, 2, 1).unwrap();
        assert!((highsnr_upper_dmt(&cfg, 0.0f64).unwrap() - 5.0).abs() < 1e-14);
        assert!((highsnr_upper_dmt(&cfg, 1.0f64).unwrap() - 1.2).abs() < 1e-14);
        assert!((highsnr_upper_dmt(&cfg, 1.0f64 - 1e-12).unwrap() - 1.2).abs() < 1e-10);
        assert_eq!(highsnr_upper_dmt(&cfg, 2.0).unwrap(), 0.0);
        // first branch written as a line through (0, P) with slope −(P − (m−1)/H)
        for &r in &[0.1f64, 0.4, 0.9] {
            let p = 5.0;
            let alt = p - (p - 1.0 / (1.0 / 3.0 + 0.5)) * r;
            assert!((highsnr_upper_dmt(&cfg, r).unwrap() - alt).abs() < 1e-12);
        }
    }

    #[test]
    fn estimates_are_nonnegative() {
        let cfg = make_config(3, 2, 1).unwrap();
        for &r in &[0.05, 0.5, 1.0, 1.5, 1.95] {
            for &db in &[0.0, 10.0, 30.0] {
                let eta = db_to_linear(db);
                let s = sched(&cfg, r, 1.5);
                let up = optimize_upper(&cfg, &s, eta).unwrap().allocation;
                let lo = optimize_lower(&cfg, &s, eta).unwrap().allocation;
                assert!(diversity_upper_estimate(&cfg, &s, eta, &up).unwrap().value >= 0.0);
                assert!(diversity_lower_estimate(&cfg, &s, eta, &lo).unwrap().value >= 0.0);
            }
        }
    }
}
