//! Analytic bounds on the zero-forcing secrecy outage probability.
//!
//! Both bounds come from the QR factor of the `k × m` equivalent channel:
//! `|R_ll|²` is Gamma(k−l+1) and the row energies `Δ_l` of `R` are independent
//! Gamma(k+m−2l+1). The upper bound splits the target rate into per-stream
//! shares `b_l`, the lower bound into shares `a_l`; both are refined by
//! optimizing the split over the ordered simplex.
//!
//! Evaluation happens in log space so that probabilities far below `f64::MIN_POSITIVE`
//! keep their logarithms (and gradients) intact.

use crate::channel::{RateSchedule, WiretapConfig};
use crate::simplex::OrderedSimplex;
use crate::special::{gamma_density_ratio, ln_gamma_density, ln_reg_lower_inc_gamma};
use crate::{Error, Real, Result};

/// Tolerance on `Σ values = r_s`.
pub const ALLOCATION_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AllocationKind {
    Upper,
    Lower,
}

/// Ordered nonnegative split of the multiplexing gain across the `m` streams.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation<T> {
    values: Vec<T>,
    kind: AllocationKind,
}

impl<T: Real> Allocation<T> {
    /// Checks `values[0] ≥ … ≥ values[m−1] ≥ 0` and `Σ values = r_s`.
    pub fn new(values: Vec<T>, kind: AllocationKind, r_s: T) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("Allocation::new", "empty allocation"));
        }
        if values.iter().any(|v| !(*v >= T::zero())) {
            return Err(Error::domain("Allocation::new", "entries must be nonnegative"));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::domain("Allocation::new", "entries must be nonincreasing"));
        }
        let sum: T = values.iter().copied().sum();
        if (sum - r_s).abs() > T::lit(ALLOCATION_SUM_TOL) * r_s.max(T::one()) {
            return Err(Error::domain(
                "Allocation::new",
                format!("entries sum to {sum}, expected {r_s}"),
            ));
        }
        Ok(Self { values, kind })
    }

    pub fn equal_split(cfg: &WiretapConfig, r_s: T, kind: AllocationKind) -> Self {
        let m = cfg.m().max(1);
        Self {
            values: vec![r_s / T::from_usize_lossy(m); m],
            kind,
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn kind(&self) -> AllocationKind {
        self.kind
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundValue<T> {
    pub probability: T,
    /// Natural log of `probability` (`−∞` when it is zero); finite even when
    /// `probability` underflows.
    pub ln_probability: T,
    pub allocation: Allocation<T>,
    pub eta: T,
    pub r_s: T,
}

/// `ξ(x) = (N_t−N_e)/η · ((1+gη)^x − 1)`
pub fn xi<T: Real>(x: T, eta: T, sched: &RateSchedule<T>, cfg: &WiretapConfig) -> T {
    let c: T = cfg.free_dims_real();
    c / eta * (x * sched.log_gain(eta)).exp_m1()
}

/// `dξ/dx`
pub fn xi_slope<T: Real>(x: T, eta: T, sched: &RateSchedule<T>, cfg: &WiretapConfig) -> T {
    let c: T = cfg.free_dims_real();
    let l = sched.log_gain(eta);
    c / eta * l * (x * l).exp()
}

/// Gamma shapes `k−l+1`, `l = 1..m`, of the diagonal of `R`.
pub fn upper_shapes(cfg: &WiretapConfig) -> Vec<u32> {
    let (m, k) = (cfg.m(), cfg.k());
    (1..=m).map(|l| (k - l + 1) as u32).collect()
}

/// Gamma shapes `k+m−2l+1`, `l = 1..m`, of the row energies of `R`.
pub fn lower_shapes(cfg: &WiretapConfig) -> Vec<u32> {
    let (m, k) = (cfg.m(), cfg.k());
    (1..=m).map(|l| (k + m + 1 - 2 * l) as u32).collect()
}

fn check_inputs<T: Real>(
    cfg: &WiretapConfig,
    sched: &RateSchedule<T>,
    eta: T,
    alloc: Option<(&Allocation<T>, AllocationKind)>,
) -> Result<()> {
    cfg.require_feasible()?;
    if !(eta > T::zero() && eta.is_finite()) {
        return Err(Error::domain("bounds", format!("eta = {eta} must be positive")));
    }
    if let Some((alloc, kind)) = alloc {
        if alloc.kind != kind {
            return Err(Error::domain("bounds", "allocation kind does not match the bound"));
        }
        if alloc.values.len() != cfg.m() {
            return Err(Error::domain(
                "bounds",
                format!("allocation has {} entries, expected m = {}", alloc.values.len(), cfg.m()),
            ));
        }
        let sum: T = alloc.values.iter().copied().sum();
        if (sum - sched.r_s()).abs() > T::lit(ALLOCATION_SUM_TOL) * sched.r_s().max(T::one()) {
            return Err(Error::domain("bounds", "allocation does not sum to r_s"));
        }
    }
    Ok(())
}

/// `ln Π_l Γ_inc(ξ(r_s), k−l+1)`
fn ln_naive<T: Real>(cfg: &WiretapConfig, sched: &RateSchedule<T>, eta: T) -> T {
    let x = xi(sched.r_s(), eta, sched, cfg);
    upper_shapes(cfg)
        .into_iter()
        .map(|a| ln_reg_lower_inc_gamma(x, a))
        .sum()
}

/// Log of the rate-split upper bound and its gradient in the split.
///
/// With `α_l = Γ_inc(ξ(r_s), k−l+1)`, `β_l = Γ_inc(ξ(b_l), k−l+1)`, `u_l = β_l/α_l`:
/// `ln U = Σ ln α_l + ln(1 − Π(1 − u_l))`.
pub(crate) fn ln_upper_with_gradient<T: Real>(
    cfg: &WiretapConfig,
    sched: &RateSchedule<T>,
    eta: T,
    b: &[T],
) -> (T, Vec<T>) {
    let shapes = upper_shapes(cfg);
    let x_r = xi(sched.r_s(), eta, sched, cfg);
    let ln_alpha: Vec<T> = shapes.iter().map(|&a| ln_reg_lower_inc_gamma(x_r, a)).collect();
    let u: Vec<T> = b
        .iter()
        .zip(&shapes)
        .zip(&ln_alpha)
        .map(|((&bl, &a), &la)| {
            let ln_beta = ln_reg_lower_inc_gamma(xi(bl, eta, sched, cfg), a);
            (ln_beta - la).exp().min(T::one())
        })
        .collect();
    let s: T = u.iter().map(|&ul| (-ul).ln_1p()).sum();
    let one_minus_p = -s.exp_m1();
    let value = ln_alpha.iter().copied().sum::<T>() + one_minus_p.ln();

    let grad = (0..b.len())
        .map(|l| {
            let others: T = (0..b.len())
                .filter(|&j| j != l)
                .map(|j| T::one() - u[j])
                .fold(T::one(), |a, v| a * v);
            let x_b = xi(b[l], eta, sched, cfg);
            let du = (ln_gamma_density(x_b, shapes[l]) - ln_alpha[l]).exp() * xi_slope(b[l], eta, sched, cfg);
            others * du / one_minus_p
        })
        .collect();
    (value, grad)
}

/// Log of the lower bound `Σ ln Γ_inc(ξ(a_l), k+m−2l+1)` and its gradient.
pub(crate) fn ln_lower_with_gradient<T: Real>(
    cfg: &WiretapConfig,
    sched: &RateSchedule<T>,
    eta: T,
    a: &[T],
) -> (T, Vec<T>) {
    let shapes = lower_shapes(cfg);
    let mut value = T::zero();
    let grad = a
        .iter()
        .zip(&shapes)
        .map(|(&al, &s)| {
            let x = xi(al, eta, sched, cfg);
            value += ln_reg_lower_inc_gamma(x, s);
            gamma_density_ratio(x, s) * xi_slope(al, eta, sched, cfg)
        })
        .collect();
    (value, grad)
}

fn bound_value<T: Real>(ln_p: T, allocation: Allocation<T>, eta: T, r_s: T) -> BoundValue<T> {
    BoundValue {
        probability: ln_p.exp().min(T::one()),
        ln_probability: ln_p.min(T::zero()),
        allocation,
        eta,
        r_s,
    }
}

fn zero_rate_value<T: Real>(cfg: &WiretapConfig, kind: AllocationKind, eta: T) -> BoundValue<T> {
    BoundValue {
        probability: T::zero(),
        ln_probability: T::neg_infinity(),
        allocation: Allocation::equal_split(cfg, T::zero(), kind),
        eta,
        r_s: T::zero(),
    }
}

/// Rate-split upper bound on the outage probability for a fixed allocation `b`.
///
/// Zero at `r_s = 0`, where the mutual information can never fall short.
pub fn upper_bound_thm1<T: Real>(
    cfg: &WiretapConfig,
    sched: &RateSchedule<T>,
    eta: T,
    alloc: &Allocation<T>,
) -> Result<BoundValue<T>> {
    check_inputs(cfg, sched, eta, Some((alloc, AllocationKind::Upper)))?;
    if sched.r_s() == T::zero() {
        return Ok(zero_rate_value(cfg, AllocationKind::Upper, eta));
    }
    let (ln_p, _) = ln_upper_with_gradient(cfg, sched, eta, &alloc.values);
    Ok(bound_value(ln_p, alloc.clone(), eta, sched.r_s()))
}

/// Product-form lower bound for a fixed allocation `a`.
pub fn lower_bound_thm2<T: Real>(
    cfg: &WiretapConfig,
    sched: &RateSchedule<T>,
    eta: T,
    alloc: &Allocation<T>,
) -> Result<BoundValue<T>> {
    check_inputs(cfg, sched, eta, Some((alloc, AllocationKind::Lower)))?;
    if sched.r_s() == T::zero() {
        return Ok(zero_rate_value(cfg, AllocationKind::Lower, eta));
    }
    let (ln_p, _) = ln_lower_with_gradient(cfg, sched, eta, &alloc.values);
    Ok(bound_value(ln_p, alloc.clone(), eta, sched.r_s()))
}

/// `Π_l Γ_inc(ξ(r_s), k−l+1)`, the upper bound without the rate-split correction.
pub fn naive_upper_bound<T: Real>(cfg: &WiretapConfig, sched: &RateSchedule<T>, eta: T) -> Result<T> {
    check_inputs(cfg, sched, eta, None)?;
    Ok(ln_naive(cfg, sched, eta).exp())
}

fn starting_points<T: Real>(simplex: &OrderedSimplex<T>) -> Vec<Vec<T>> {
    let eq = simplex.equal_split();
    let mut starts = vec![eq.clone()];
    for j in 0..simplex.dim() {
        let v = simplex.vertex(j);
        if v != eq {
            starts.push(v.iter().zip(&eq).map(|(a, b)| (*a + *b) / T::lit(2.0)).collect());
        }
    }
    starts
}

/// Runs the simplex solver from the equal split and from midpoints towards
/// each vertex; keeps the best stationary point.
fn optimize_split<T: Real, F>(simplex: &OrderedSimplex<T>, objective: F) -> Result<Vec<T>>
where
    F: Fn(&[T]) -> (T, Vec<T>),
{
    let mut best: Option<(T, Vec<T>)> = None;
    let mut first_err = None;
    for start in starting_points(simplex) {
        match simplex.minimize(&objective, &start) {
            Ok(min) => {
                if best.as_ref().is_none_or(|(v, _)| min.value < *v) {
                    best = Some((min.value, min.point));
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match (best, first_err) {
        (Some((_, x)), _) => Ok(x),
        (None, Some(e)) => Err(e),
        (None, None) => unreachable!("at least one start"),
    }
}

fn clean_allocation<T: Real>(mut x: Vec<T>, kind: AllocationKind, r_s: T) -> Result<Allocation<T>> {
    // Enforce exact ordering/nonnegativity lost to rounding in the solver.
    for v in x.iter_mut() {
        *v = v.max(T::zero());
    }
    for j in 1..x.len() {
        if x[j] > x[j - 1] {
            x[j] = x[j - 1];
        }
    }
    let sum: T = x.iter().copied().sum();
    let last = x.len() - 1;
    x[last] += r_s - sum;
    Allocation::new(x, kind, r_s)
}

/// Allocation minimizing the upper bound over the ordered simplex.
pub fn optimize_upper<T: Real>(cfg: &WiretapConfig, sched: &RateSchedule<T>, eta: T) -> Result<BoundValue<T>> {
    check_inputs(cfg, sched, eta, None)?;
    let r_s = sched.r_s();
    if r_s == T::zero() {
        return Ok(zero_rate_value(cfg, AllocationKind::Upper, eta));
    }
    let values = if cfg.m() == 1 {
        vec![r_s]
    } else {
        let simplex = OrderedSimplex::new(cfg.m(), r_s);
        optimize_split(&simplex, |b| ln_upper_with_gradient(cfg, sched, eta, b))?
    };
    let alloc = clean_allocation(values, AllocationKind::Upper, r_s)?;
    upper_bound_thm1(cfg, sched, eta, &alloc)
}

/// Allocation maximizing the lower bound over the ordered simplex.
pub fn optimize_lower<T: Real>(cfg: &WiretapConfig, sched: &RateSchedule<T>, eta: T) -> Result<BoundValue<T>> {
    check_inputs(cfg, sched, eta, None)?;
    let r_s = sched.r_s();
    if r_s == T::zero() {
        return Ok(zero_rate_value(cfg, AllocationKind::Lower, eta));
    }
    let values = if cfg.m() == 1 {
        vec![r_s]
    } else {
        let simplex = OrderedSimplex::new(cfg.m(), r_s);
        optimize_split(&simplex, |a| {
            let (v, g) = ln_lower_with_gradient(cfg, sched, eta, a);
            (-v, g.into_iter().map(|x| -x).collect())
        })?
    };
    let alloc = clean_allocation(values, AllocationKind::Lower, r_s)?;
    lower_bound_thm2(cfg, sched, eta, &alloc)
}

/// Which closed-form high-SNR split to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticRegime {
    /// `r_s ∈ (0, 1)`: `b_l = r_s − δ/(k−l+1)`, `δ = (m−1)·r_s / Σ_l 1/(k−l+1)`.
    BelowOne,
    /// `r_s ∈ [1, m]`: `b_l = 1 − γ/(k−l+1)`, `γ = (m−r_s) / Σ_l 1/(k−l+1)`.
    AboveOne,
}

impl AsymptoticRegime {
    pub fn for_rate<T: Real>(r_s: T) -> Self {
        if r_s < T::one() {
            Self::BelowOne
        } else {
            Self::AboveOne
        }
    }
}

/// `Σ_{l=1}^{m} 1/(k−l+1)`
pub fn harmonic_weight<T: Real>(cfg: &WiretapConfig) -> T {
    upper_shapes(cfg)
        .into_iter()
        .map(|a| T::from_u32(a).unwrap().recip())
        .sum()
}

/// Closed-form high-SNR minimizer of the upper bound.
pub fn asymptotic_allocation<T: Real>(
    cfg: &WiretapConfig,
    r_s: T,
    regime: AsymptoticRegime,
) -> Result<Allocation<T>> {
    cfg.require_feasible()?;
    let m = T::from_usize_lossy(cfg.m());
    let h = harmonic_weight::<T>(cfg);
    let shapes = upper_shapes(cfg);
    let values: Vec<T> = match regime {
        AsymptoticRegime::BelowOne => {
            if !(r_s > T::zero() && r_s < T::one()) {
                return Err(Error::domain("asymptotic_allocation", format!("r_s = {r_s} not in (0, 1)")));
            }
            let delta = (m - T::one()) * r_s / h;
            shapes
                .iter()
                .map(|&a| r_s - delta / T::from_u32(a).unwrap())
                .collect()
        }
        AsymptoticRegime::AboveOne => {
            if !(r_s >= T::one() && r_s <= m) {
                return Err(Error::domain("asymptotic_allocation", format!("r_s = {r_s} not in [1, {m}]")));
            }
            let gamma = (m - r_s) / h;
            shapes
                .iter()
                .map(|&a| T::one() - gamma / T::from_u32(a).unwrap())
                .collect()
        }
    };
    if values.iter().any(|v| *v < -T::lit(ALLOCATION_SUM_TOL)) {
        return Err(Error::domain(
            "asymptotic_allocation",
            format!("closed form leaves the simplex for {cfg} at r_s = {r_s}"),
        ));
    }
    let values = values.into_iter().map(|v| v.max(T::zero())).collect();
    Allocation::new(values, AllocationKind::Upper, r_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::make_config;
    use crate::special::reg_lower_inc_gamma;
    use crate::db_to_linear;

    fn sched(cfg: &WiretapConfig, r: f64, g: f64) -> RateSchedule<f64> {
        RateSchedule::new(cfg, r, g).unwrap()
    }

    /// Direct transcription of the upper bound, linear space, no log tricks.
    fn upper_oracle(cfg: &WiretapConfig, s: &RateSchedule<f64>, eta: f64, b: &[f64]) -> f64 {
        let (m, k) = (cfg.m(), cfg.k());
        let c = cfg.free_dims() as f64;
        let xi = |x: f64| c / eta * ((1.0 + s.g() * eta).powf(x) - 1.0);
        let mut prod_alpha = 1.0;
        let mut prod_diff = 1.0;
        for l in 1..=m {
            let a = (k - l + 1) as u32;
            let alpha = reg_lower_inc_gamma(xi(s.r_s()), a).unwrap();
            let beta = reg_lower_inc_gamma(xi(b[l - 1]), a).unwrap();
            prod_alpha *= alpha;
            prod_diff *= 1.0 - beta / alpha;
        }
        prod_alpha * (1.0 - prod_diff)
    }

    #[test]
    fn xi_values() {
        let cfg = make_config(4, 2, 1).unwrap();
        let s = sched(&cfg, 1.0, 1.0);
        assert_eq!(xi(0.0, 1.0, &s, &cfg), 0.0);
        assert!((xi(1.0, 1.0, &s, &cfg) - 3.0).abs() < 1e-14);
        assert!(xi(0.5, 7.0, &s, &cfg) < xi(1.0, 7.0, &s, &cfg));
    }

    #[test]
    fn zero_rate_bounds_vanish() {
        let cfg = make_config(4, 2, 1).unwrap();
        let s = sched(&cfg, 0.0, 3.0);
        let up = Allocation::new(vec![0.0, 0.0], AllocationKind::Upper, 0.0).unwrap();
        let lo = Allocation::new(vec![0.0, 0.0], AllocationKind::Lower, 0.0).unwrap();
        assert_eq!(upper_bound_thm1(&cfg, &s, 10.0, &up).unwrap().probability, 0.0);
        assert_eq!(lower_bound_thm2(&cfg, &s, 10.0, &lo).unwrap().probability, 0.0);
        assert_eq!(naive_upper_bound(&cfg, &s, 10.0).unwrap(), 0.0);
        assert_eq!(optimize_upper(&cfg, &s, 10.0).unwrap().probability, 0.0);
    }

    #[test]
    fn single_stream_collapse() {
        let cfg = make_config(2, 1, 1).unwrap();
        let s = sched(&cfg, 0.7, 0.8);
        let eta = 6.0;
        let up = Allocation::new(vec![0.7], AllocationKind::Upper, 0.7).unwrap();
        let lo = Allocation::new(vec![0.7], AllocationKind::Lower, 0.7).unwrap();
        let u = upper_bound_thm1(&cfg, &s, eta, &up).unwrap().probability;
        let l = lower_bound_thm2(&cfg, &s, eta, &lo).unwrap().probability;
        let closed = 1.0 - (-xi(0.7, eta, &s, &cfg)).exp();
        assert!((u - closed).abs() < 1e-14);
        assert_eq!(u, l);
    }

    #[test]
    fn upper_matches_direct_transcription() {
        let cfg = make_config(4, 2, 1).unwrap();
        let s = sched(&cfg, 0.5, 4.0);
        let eta = db_to_linear(10.0);
        let b = [0.25, 0.25];
        let alloc = Allocation::new(b.to_vec(), AllocationKind::Upper, 0.5).unwrap();
        let v = upper_bound_thm1(&cfg, &s, eta, &alloc).unwrap().probability;
        let o = upper_oracle(&cfg, &s, eta, &b);
        assert!((v - o).abs() < 1e-12 * o.max(1e-300) || (v - o).abs() < 1e-12, "{v} vs {o}");
    }

    #[test]
    fn naive_matches_direct_product() {
        let cfg = make_config(3, 2, 1).unwrap();
        let s = sched(&cfg, 1.0, 3.0);
        let eta = db_to_linear(20.0);
        let x = 2.0 / eta * ((1.0 + 3.0 * eta) - 1.0);
        let o = reg_lower_inc_gamma(x, 2).unwrap() * reg_lower_inc_gamma(x, 1).unwrap();
        assert!((naive_upper_bound(&cfg, &s, eta).unwrap() - o).abs() < 1e-12);
    }

    #[test]
    fn naive_dominates_rate_split_bound() {
        let cfg = make_config(4, 2, 1).unwrap();
        for &(r, b2) in &[(0.5, 0.1), (1.0, 0.5), (1.5, 0.2), (1.9, 0.0)] {
            let s = sched(&cfg, r, 4.0);
            let alloc = Allocation::new(vec![r - b2, b2], AllocationKind::Upper, r).unwrap();
            for &eta in &[1.0, 10.0, 100.0] {
                let u = upper_bound_thm1(&cfg, &s, eta, &alloc).unwrap().probability;
                assert!(naive_upper_bound(&cfg, &s, eta).unwrap() >= u);
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let cfg = make_config(4, 2, 1).unwrap();
        let s = sched(&cfg, 1.0, 4.0);
        let eta = 10.0;
        let b = [0.65, 0.35];
        let h = 1e-6;
        let (_, g) = ln_upper_with_gradient(&cfg, &s, eta, &b);
        let (_, gl) = ln_lower_with_gradient(&cfg, &s, eta, &b);
        for l in 0..2 {
            let mut p = b;
            let mut q = b;
            p[l] += h;
            q[l] -= h;
            let fd = (ln_upper_with_gradient(&cfg, &s, eta, &p).0 - ln_upper_with_gradient(&cfg, &s, eta, &q).0)
                / (2.0 * h);
            assert!((fd - g[l]).abs() < 1e-6 * fd.abs().max(1.0), "upper l={l}: {fd} vs {}", g[l]);
            let fd = (ln_lower_with_gradient(&cfg, &s, eta, &p).0 - ln_lower_with_gradient(&cfg, &s, eta, &q).0)
                / (2.0 * h);
            assert!((fd - gl[l]).abs() < 1e-6 * fd.abs().max(1.0), "lower l={l}");
        }
    }

    #[test]
    fn optimizers_beat_equal_split() {
        let cfg = make_config(4, 2, 1).unwrap();
        for &r in &[0.5, 1.0, 1.5] {
            for &db in &[5.0, 10.0, 20.0] {
                let eta = db_to_linear(db);
                let s = sched(&cfg, r, 4.0);
                let up = optimize_upper(&cfg, &s, eta).unwrap();
                let eq = Allocation::equal_split(&cfg, r, AllocationKind::Upper);
                assert!(up.probability <= upper_bound_thm1(&cfg, &s, eta, &eq).unwrap().probability * (1.0 + 1e-12));
                let lo = optimize_lower(&cfg, &s, eta).unwrap();
                let eq = Allocation::equal_split(&cfg, r, AllocationKind::Lower);
                assert!(lo.probability >= lower_bound_thm2(&cfg, &s, eta, &eq).unwrap().probability * (1.0 - 1e-12));
                assert!(lo.probability <= up.probability);
            }
        }
    }

    #[test]
    fn single_stream_optimizers_are_trivial() {
        let cfg = make_config(2, 1, 1).unwrap();
        let s = sched(&cfg, 0.6, 1.0);
        let up = optimize_upper(&cfg, &s, 10.0).unwrap();
        assert_eq!(up.allocation.values(), &[0.6]);
        let lo = optimize_lower(&cfg, &s, 10.0).unwrap();
        assert_eq!(lo.allocation.values(), &[0.6]);
    }

    #[test]
    fn asymptotic_allocation_closed_forms() {
        let cfg = make_config(4, 2, 1).unwrap();
        let a = asymptotic_allocation(&cfg, 0.5f64, AsymptoticRegime::BelowOne).unwrap();
        assert!((a.values()[0] - 0.3).abs() < 1e-14 && (a.values()[1] - 0.2).abs() < 1e-14);
        let a = asymptotic_allocation(&cfg, 2.0f64, AsymptoticRegime::AboveOne).unwrap();
        assert_eq!(a.values(), &[1.0, 1.0]);
        let a = asymptotic_allocation(&cfg, 1.5f64, AsymptoticRegime::AboveOne).unwrap();
        assert!((a.values()[0] - 0.8).abs() < 1e-14 && (a.values()[1] - 0.7).abs() < 1e-14);
        assert!(asymptotic_allocation(&cfg, 1.5f64, AsymptoticRegime::BelowOne).is_err());
        assert!(asymptotic_allocation(&cfg, 0.5f64, AsymptoticRegime::AboveOne).is_err());
        // k = m = 3 at r_s = 1 pushes b₃ below zero
        let cfg = make_config(3, 3, 0).unwrap();
        assert!(asymptotic_allocation(&cfg, 1.0f64, AsymptoticRegime::AboveOne).is_err());
    }

    #[test]
    fn allocation_validation() {
        assert!(Allocation::new(vec![0.2, 0.3], AllocationKind::Upper, 0.5f64).is_err());
        assert!(Allocation::new(vec![0.6, -0.1], AllocationKind::Upper, 0.5f64).is_err());
        assert!(Allocation::new(vec![0.3, 0.1], AllocationKind::Upper, 0.5f64).is_err());
        let cfg = make_config(4, 2, 1).unwrap();
        let s = sched(&cfg, 0.5, 1.0);
        let lo = Allocation::new(vec![0.3, 0.2], AllocationKind::Lower, 0.5).unwrap();
        assert!(upper_bound_thm1(&cfg, &s, 10.0, &lo).is_err());
        let bad = make_config(2, 2, 2).unwrap();
        assert!(matches!(naive_upper_bound(&bad, &s, 10.0), Err(Error::Infeasible { .. })));
    }
}
