//! Scalar special functions with integer shape parameters.

use crate::{Error, Real, Result};

const MAX_SERIES_TERMS: usize = 10_000;

/// `ln n!`
pub fn ln_factorial<T: Real>(n: u32) -> T {
    (2..=n).map(|j| T::from_u32(j).unwrap().ln()).sum()
}

/// `n!`
pub fn factorial<T: Real>(n: u32) -> T {
    (2..=n).map(|j| T::from_u32(j).unwrap()).fold(T::one(), |a, b| a * b)
}

/// Natural log of the unit-scale gamma density with integer shape `a` at `x`.
pub fn ln_gamma_density<T: Real>(x: T, a: u32) -> T {
    if a == 1 {
        return -x;
    }
    let am1 = T::from_u32(a - 1).unwrap();
    am1 * x.ln() - x - ln_factorial::<T>(a - 1)
}

/// `Σ_{i≥0} x^i a!/(a+i)!`, the scaled tail of the exponential series.
fn tail_series<T: Real>(x: T, a: u32) -> T {
    let mut term = T::one();
    let mut sum = T::one();
    let af = T::from_u32(a).unwrap();
    for i in 1..MAX_SERIES_TERMS {
        term *= x / (af + T::from_usize_lossy(i));
        sum += term;
        if term <= T::epsilon() * sum {
            break;
        }
    }
    sum
}

/// `e^{-x} Σ_{j<a} x^j/j!`, the regularized upper incomplete gamma.
fn upper_regularized<T: Real>(x: T, a: u32) -> T {
    if x > T::lit(700.0) {
        return (0..a)
            .map(|j| (T::from_u32(j).unwrap() * x.ln() - x - ln_factorial::<T>(j)).exp())
            .sum();
    }
    let mut term = (-x).exp();
    let mut sum = term;
    for j in 1..a {
        term *= x / T::from_u32(j).unwrap();
        sum += term;
    }
    sum
}

/// Regularized lower incomplete gamma `Γ_inc(x, a) = 1 − e^{-x} Σ_{j<a} x^j/j!`.
///
/// Below `x = a` the same quantity is summed as its tail `e^{-x} Σ_{j≥a} x^j/j!`,
/// which avoids cancellation for tiny arguments.
pub fn reg_lower_inc_gamma<T: Real>(x: T, a: u32) -> Result<T> {
    if !(x >= T::zero()) {
        return Err(Error::domain("reg_lower_inc_gamma", "x must be nonnegative"));
    }
    if a == 0 {
        return Err(Error::domain("reg_lower_inc_gamma", "shape must be at least 1"));
    }
    Ok(ln_reg_lower_inc_gamma(x, a).exp())
}

/// `ln Γ_inc(x, a)`; `−∞` at `x = 0`. Caller guarantees `x ≥ 0`, `a ≥ 1`.
pub fn ln_reg_lower_inc_gamma<T: Real>(x: T, a: u32) -> T {
    if x == T::zero() {
        return T::neg_infinity();
    }
    if x.is_infinite() {
        return T::zero();
    }
    let af = T::from_u32(a).unwrap();
    if x < af {
        -x + af * x.ln() - ln_factorial::<T>(a) + tail_series(x, a).ln()
    } else {
        (-upper_regularized(x, a)).ln_1p()
    }
}

/// Ratio of the gamma density to the gamma CDF, `x^{a−1}e^{−x}/(a−1)! / Γ_inc(x, a)`.
pub fn gamma_density_ratio<T: Real>(x: T, a: u32) -> T {
    if x == T::zero() {
        return T::infinity();
    }
    let af = T::from_u32(a).unwrap();
    if x <= af + T::lit(30.0) {
        // 1 / Σ_{i≥1} x^i (a−1)!/(a−1+i)!
        let first = x / af;
        first.recip() / tail_series(x, a)
    } else {
        (ln_gamma_density(x, a) - ln_reg_lower_inc_gamma(x, a)).exp()
    }
}

/// Gaussian tail probability `Q(x)`.
pub fn gauss_q<T: Real>(x: T) -> T {
    T::lit(0.5) * (x / T::SQRT_2()).erfc()
}

/// `ln Q(x)`, using the asymptotic tail series once `Q` underflows.
pub fn ln_gauss_q<T: Real>(x: T) -> T {
    let q = gauss_q(x);
    if q > T::min_positive_value() * T::lit(1e6) {
        return q.ln();
    }
    let x2 = x * x;
    let inv = x2.recip();
    let series = T::one() - inv + T::lit(3.0) * inv * inv - T::lit(15.0) * inv * inv * inv;
    -x2 / T::lit(2.0) - x.ln() - T::lit(0.5) * (T::TAU()).ln() + series.ln()
}

/// Inverse Mills ratio `φ(x)/Q(x)`.
pub fn gauss_hazard<T: Real>(x: T) -> T {
    let ln_phi = -x * x / T::lit(2.0) - T::lit(0.5) * T::TAU().ln();
    (ln_phi - ln_gauss_q(x)).exp()
}

fn exp_integral_e1<T: Real>(x: T) -> T {
    if x < T::one() {
        // −γ − ln x − Σ_{k≥1} (−x)^k/(k·k!)
        let euler = T::lit(0.577_215_664_901_532_9);
        let mut term = T::one();
        let mut sum = T::zero();
        for k in 1..MAX_SERIES_TERMS {
            let kf = T::from_usize_lossy(k);
            term *= -x / kf;
            let add = term / kf;
            sum += add;
            if add.abs() <= T::epsilon() * sum.abs() {
                break;
            }
        }
        -euler - x.ln() - sum
    } else {
        continued_fraction_en(1, x)
    }
}

/// Modified Lentz evaluation of the continued fraction for `E_n(x)`, `x ≥ 1`.
fn continued_fraction_en<T: Real>(n: u32, x: T) -> T {
    let tiny = T::min_positive_value() / T::epsilon();
    let nf = T::from_u32(n).unwrap();
    let mut b = x + nf;
    let mut c = tiny.recip();
    let mut d = b.recip();
    let mut h = d;
    for i in 1..MAX_SERIES_TERMS {
        let i_f = T::from_usize_lossy(i);
        let an = -i_f * (nf - T::one() + i_f);
        b += T::lit(2.0);
        d = (an * d + b).recip();
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    h * (-x).exp()
}

/// Exponential integral `E_n(x) = ∫₁^∞ e^{−xt}/tⁿ dt`.
///
/// Upward recurrence from `E₁` below `x = 1`, continued fraction above.
pub fn exp_integral_en<T: Real>(n: u32, x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::domain("exp_integral_en", "x must be positive"));
    }
    if n == 0 {
        return Ok((-x).exp() / x);
    }
    if x >= T::one() {
        return Ok(continued_fraction_en(n, x));
    }
    let ex = (-x).exp();
    let mut e = exp_integral_e1(x);
    for j in 1..n {
        e = (ex - x * e) / T::from_u32(j).unwrap();
    }
    Ok(e)
}

/// Upper incomplete gamma `Γ(a, z)` for integer `a` (any sign).
pub fn upper_inc_gamma_int<T: Real>(a: i32, z: T) -> Result<T> {
    if !(z > T::zero()) {
        return Err(Error::domain("upper_inc_gamma_int", "z must be positive"));
    }
    if a >= 1 {
        let a = a as u32;
        return Ok(factorial::<T>(a - 1) * upper_regularized(z, a));
    }
    // Γ(a, z) = (Γ(a+1, z) − z^a e^{−z}) / a, stepping down from Γ(0, z) = E₁(z).
    let mut g = exp_integral_e1(z);
    let ez = (-z).exp();
    for s in (a..0).rev() {
        let sf = T::from_i32(s).unwrap();
        g = (g - z.powi(s) * ez) / sf;
    }
    Ok(g)
}

/// Generalized Laguerre polynomial `L_n^α(x)` by three-term recurrence.
pub fn laguerre<T: Real>(n: u32, alpha: u32, x: T) -> T {
    let al = T::from_u32(alpha).unwrap();
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = T::one() + al - x;
    for k in 1..n {
        let kf = T::from_u32(k).unwrap();
        let next = ((T::lit(2.0) * kf + T::one() + al - x) * cur - (kf + al) * prev) / (kf + T::one());
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_interval, HalfLineRule};
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn lower_gamma_trivial_values() {
        assert_eq!(reg_lower_inc_gamma(0.0f64, 5).unwrap(), 0.0);
        let v = reg_lower_inc_gamma(2f64.ln(), 1).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert!(reg_lower_inc_gamma(-1.0f64, 2).is_err());
    }

    #[test]
    fn lower_gamma_against_quadrature() {
        let oracle = integrate_interval(0.0f64, 2.0, 8, |t| t * t * (-t).exp()) / 2.0;
        let v = reg_lower_inc_gamma(2.0f64, 3).unwrap();
        assert!((v - oracle).abs() < 1e-12, "{v} vs {oracle}");
    }

    #[test]
    fn lower_gamma_tiny_argument_has_no_cancellation() {
        // Γ_inc(x, 3) ≈ x³/6 for small x
        let x = 1e-6f64;
        let v = reg_lower_inc_gamma(x, 3).unwrap();
        let approx = x.powi(3) / 6.0 * (1.0 - 3.0 * x / 4.0);
        assert!(rel(v, approx) < 1e-10);
    }

    #[test]
    fn density_ratio_matches_direct_formula() {
        for &(x, a) in &[(0.3f64, 1u32), (2.0, 3), (10.0, 4), (45.0, 2), (80.0, 5)] {
            let p = reg_lower_inc_gamma(x, a).unwrap();
            let dens = ln_gamma_density(x, a).exp();
            assert!(rel(gamma_density_ratio(x, a), dens / p) < 1e-12);
        }
        // small-x limit a/x
        assert!(rel(gamma_density_ratio(1e-9f64, 3), 3e9) < 1e-8);
    }

    #[test]
    fn gauss_q_values() {
        assert!((gauss_q(0.0f64) - 0.5).abs() < 1e-16);
        for &x in &[0.5f64, 1.0, 2.0] {
            assert!((gauss_q(x) + gauss_q(-x) - 1.0).abs() < 1e-15);
        }
        // oracle: 1/2 − ∫₀^x φ
        let x = 1.644_853_6f64;
        let oracle =
            0.5 - integrate_interval(0.0, x, 8, |t| (-t * t / 2.0).exp()) / (2.0 * std::f64::consts::PI).sqrt();
        assert!((gauss_q(x) - oracle).abs() < 1e-14);
        assert!((gauss_q(x) - 0.05).abs() < 1e-7);
    }

    #[test]
    fn ln_gauss_q_tail_is_continuous() {
        for &x in &[20.0f64, 30.0, 37.0] {
            let direct = gauss_q(x).ln();
            let x2 = x * x;
            let inv = 1.0 / x2;
            let series = 1.0 - inv + 3.0 * inv * inv - 15.0 * inv.powi(3);
            let asym = -x2 / 2.0 - x.ln() - 0.5 * std::f64::consts::TAU.ln() + series.ln();
            assert!((direct - asym).abs() < 1e-8 * direct.abs());
        }
        assert!(ln_gauss_q(60.0f64).is_finite());
    }

    #[test]
    fn en_closed_form_and_recurrence() {
        assert!((exp_integral_en(0, 1.0f64).unwrap() - (-1.0f64).exp()).abs() < 1e-16);
        for &x in &[0.1f64, 1.0, 10.0] {
            for n in 1..=10u32 {
                let en = exp_integral_en(n, x).unwrap();
                let en1 = exp_integral_en(n + 1, x).unwrap();
                let resid = (n as f64 * en1 - (-x).exp() + x * en).abs();
                assert!(resid <= 1e-14, "n={n} x={x} resid={resid}");
            }
        }
        assert!(exp_integral_en(1, 0.0f64).is_err());
    }

    #[test]
    fn e1_against_quadrature() {
        let rule = HalfLineRule::<f64>::new(20);
        // ∫₁^∞ e^{−t}/t dt = ∫₀^∞ e^{−(1+s)}/(1+s) ds
        let oracle = rule.integrate(|s| (-(1.0 + s)).exp() / (1.0 + s));
        let v = exp_integral_en(1, 1.0f64).unwrap();
        assert!((v - oracle).abs() < 1e-10);
        assert!((v - 0.219_383_934_395_520_3).abs() < 1e-14);
        // series branch as well
        let x = 0.3;
        let oracle = rule.integrate(|s| (-x * (1.0 + s)).exp() / (1.0 + s));
        assert!((exp_integral_en(1, x).unwrap() - oracle).abs() < 1e-10);
    }

    #[test]
    fn upper_gamma_values() {
        assert!((upper_inc_gamma_int(1, 2.0f64).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        assert!((upper_inc_gamma_int(3, 1e-12f64).unwrap() - 2.0).abs() < 1e-10);
        let rule = HalfLineRule::<f64>::new(20);
        let oracle = rule.integrate(|s| (-(1.0 + s)).exp() / (1.0 + s).powi(2));
        let v = upper_inc_gamma_int(-1, 1.0f64).unwrap();
        assert!((v - oracle).abs() < 1e-10);
        assert!((v - 0.148_495_506_775_922).abs() < 1e-12);
        assert!(upper_inc_gamma_int(2, 0.0f64).is_err());
    }

    #[test]
    fn laguerre_values() {
        assert_eq!(laguerre(0, 4, 3.3f64), 1.0);
        assert!((laguerre(1, 2, 1.0f64) - 2.0).abs() < 1e-15);
        // series: L_n^α(x) = Σ_i (−1)^i C(n+α, n−i) x^i / i!
        let (n, alpha, x) = (3u32, 1u32, 2.5f64);
        let binom = |a: u32, b: u32| factorial::<f64>(a) / (factorial::<f64>(b) * factorial::<f64>(a - b));
        let series: f64 = (0..=n)
            .map(|i| (-1f64).powi(i as i32) * binom(n + alpha, n - i) * x.powi(i as i32) / factorial::<f64>(i))
            .sum();
        assert!((laguerre(n, alpha, x) - series).abs() < 1e-12);
    }

    #[test]
    fn single_precision_paths() {
        let v = reg_lower_inc_gamma(2.0f32, 3).unwrap();
        assert!((v - 0.323_323_6).abs() < 1e-6);
        assert!((gauss_q(0.0f32) - 0.5).abs() < 1e-7);
    }

    proptest! {
        #[test]
        fn lower_gamma_monotone(x in 0.01f64..40.0, dx in 0.01f64..5.0, a in 1u32..12) {
            let lo = reg_lower_inc_gamma(x, a).unwrap();
            let hi = reg_lower_inc_gamma(x + dx, a).unwrap();
            prop_assert!(hi > lo || hi == 1.0);
            let next_shape = reg_lower_inc_gamma(x, a + 1).unwrap();
            prop_assert!(next_shape < lo || lo == 1.0);
            prop_assert!((0.0..=1.0).contains(&lo));
        }

        #[test]
        fn gauss_q_decreasing(x in -8.0f64..8.0, dx in 1e-3f64..2.0) {
            let a = gauss_q(x);
            let b = gauss_q(x + dx);
            prop_assert!(b < a);
            prop_assert!(a > 0.0 && a < 1.0);
        }
    }
}
