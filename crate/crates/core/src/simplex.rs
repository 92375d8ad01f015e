//! Optimization over the ordered simplex `{x₁ ≥ x₂ ≥ … ≥ x_m ≥ 0, Σ x = total}`.
//!
//! Points are handled in increment coordinates `z_j = x_j − x_{j+1}` (`z_m = x_m`),
//! where the feasible set becomes the weighted simplex `{z ≥ 0, Σ (j+1)·z_j = total}`
//! and Euclidean projection has an exact sort-based solution. The solver is a
//! spectral projected gradient method with a nonmonotone Armijo search.

use crate::{Error, Real, Result};

/// Stationarity tolerance `‖P(z − ∇F) − z‖_∞`.
pub const STATIONARITY_TOL: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 10_000;

const ARMIJO: f64 = 1e-4;
const NONMONOTONE_MEMORY: usize = 10;
const STEP_MIN: f64 = 1e-12;
const STEP_MAX: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderedSimplex<T> {
    dim: usize,
    total: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum<T> {
    pub point: Vec<T>,
    pub value: T,
    pub residual: T,
    pub iterations: usize,
}

impl<T: Real> OrderedSimplex<T> {
    pub fn new(dim: usize, total: T) -> Self {
        assert!(dim >= 1, "simplex dimension must be positive");
        Self { dim, total }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn total(&self) -> T {
        self.total
    }

    pub fn equal_split(&self) -> Vec<T> {
        vec![self.total / T::from_usize_lossy(self.dim); self.dim]
    }

    /// Vertex `j` (0-based): the first `j+1` coordinates equal `total/(j+1)`.
    pub fn vertex(&self, j: usize) -> Vec<T> {
        let v = self.total / T::from_usize_lossy(j + 1);
        (0..self.dim).map(|l| if l <= j { v } else { T::zero() }).collect()
    }

    pub fn contains(&self, x: &[T], tol: T) -> bool {
        if x.len() != self.dim {
            return false;
        }
        let ordered = x.windows(2).all(|w| w[0] >= w[1] - tol);
        let nonneg = x.iter().all(|&v| v >= -tol);
        let sum: T = x.iter().copied().sum();
        ordered && nonneg && (sum - self.total).abs() <= tol * self.total.max(T::one())
    }

    pub fn to_increments(&self, x: &[T]) -> Vec<T> {
        (0..self.dim)
            .map(|j| if j + 1 < self.dim { x[j] - x[j + 1] } else { x[j] })
            .collect()
    }

    pub fn from_increments(&self, z: &[T]) -> Vec<T> {
        let mut x = vec![T::zero(); self.dim];
        let mut acc = T::zero();
        for j in (0..self.dim).rev() {
            acc += z[j];
            x[j] = acc;
        }
        // Restore the exact total lost to rounding.
        let sum: T = x.iter().copied().sum();
        if sum > T::zero() {
            let scale = self.total / sum;
            x.iter_mut().for_each(|v| *v *= scale);
        }
        x
    }

    /// Euclidean projection onto `{z ≥ 0, Σ (j+1) z_j = total}`.
    pub fn project_increments(&self, y: &[T]) -> Vec<T> {
        let w: Vec<T> = (1..=self.dim).map(T::from_usize_lossy).collect();
        // z_j = max(0, y_j − τ w_j); breakpoints τ_j = y_j / w_j.
        let mut order: Vec<usize> = (0..self.dim).collect();
        order.sort_by(|&a, &b| {
            (y[b] / w[b])
                .partial_cmp(&(y[a] / w[a]))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut wy = T::zero();
        let mut ww = T::zero();
        let mut tau = T::zero();
        for (pos, &j) in order.iter().enumerate() {
            wy += w[j] * y[j];
            ww += w[j] * w[j];
            let candidate = (wy - self.total) / ww;
            let next = order.get(pos + 1).map(|&n| y[n] / w[n]);
            tau = candidate;
            if next.is_none_or(|b| candidate >= b) {
                break;
            }
        }
        (0..self.dim).map(|j| (y[j] - tau * w[j]).max(T::zero())).collect()
    }

    /// Minimizes `objective` (value and gradient in `x` coordinates) from `start`.
    ///
    /// Infinite or NaN objective values are treated as infeasible during the
    /// line search; the starting point must have a finite value.
    pub fn minimize<F>(&self, objective: F, start: &[T]) -> Result<Minimum<T>>
    where
        F: Fn(&[T]) -> (T, Vec<T>),
    {
        let eval = |z: &[T]| {
            let x = self.from_increments(z);
            let (f, gx) = objective(&x);
            let f = if f.is_nan() { T::infinity() } else { f };
            (x, f, self.increment_gradient(&gx))
        };
        let tol = T::lit(STATIONARITY_TOL);
        let mut z = self.project_increments(&self.to_increments(start));
        let (mut x, mut f, mut g) = eval(&z);
        if !f.is_finite() {
            return Err(Error::domain("OrderedSimplex::minimize", "objective not finite at start"));
        }
        let mut history = vec![f];
        let mut alpha = T::one();
        let mut residual = self.residual(&z, &g);

        for it in 0..MAX_ITERATIONS {
            if residual <= tol {
                return Ok(Minimum {
                    point: x,
                    value: f,
                    residual,
                    iterations: it,
                });
            }
            let trial: Vec<T> = z.iter().zip(&g).map(|(&zi, &gi)| zi - alpha * gi).collect();
            let d: Vec<T> = self
                .project_increments(&trial)
                .iter()
                .zip(&z)
                .map(|(p, zi)| *p - *zi)
                .collect();
            let slope: T = g.iter().zip(&d).map(|(a, b)| *a * *b).sum();
            let f_ref = history.iter().copied().fold(T::neg_infinity(), T::max);

            let mut lambda = T::one();
            let accepted = loop {
                let cand: Vec<T> = z.iter().zip(&d).map(|(zi, di)| *zi + lambda * *di).collect();
                let (cx, cf, cg) = eval(&cand);
                if cf.is_finite() && cf <= f_ref + T::lit(ARMIJO) * lambda * slope {
                    break Some((cand, cx, cf, cg));
                }
                lambda *= T::lit(0.5);
                if lambda < T::lit(1e-30) {
                    break None;
                }
            };
            let Some((z_new, x_new, f_new, g_new)) = accepted else {
                return Err(Error::OptimizerFailed {
                    residual: residual.to_f64_lossy(),
                    iterations: it,
                });
            };

            let s: Vec<T> = z_new.iter().zip(&z).map(|(a, b)| *a - *b).collect();
            let yv: Vec<T> = g_new.iter().zip(&g).map(|(a, b)| *a - *b).collect();
            let ss: T = s.iter().map(|v| *v * *v).sum();
            let sy: T = s.iter().zip(&yv).map(|(a, b)| *a * *b).sum();
            alpha = if sy > T::zero() {
                (ss / sy).max(T::lit(STEP_MIN)).min(T::lit(STEP_MAX))
            } else {
                T::lit(STEP_MAX)
            };

            z = z_new;
            x = x_new;
            f = f_new;
            g = g_new;
            residual = self.residual(&z, &g);
            history.push(f);
            if history.len() > NONMONOTONE_MEMORY {
                history.remove(0);
            }
        }
        if residual <= tol {
            return Ok(Minimum {
                point: x,
                value: f,
                residual,
                iterations: MAX_ITERATIONS,
            });
        }
        Err(Error::OptimizerFailed {
            residual: residual.to_f64_lossy(),
            iterations: MAX_ITERATIONS,
        })
    }

    /// Chain rule `∂F/∂z_j = Σ_{l ≤ j} ∂F/∂x_l`.
    fn increment_gradient(&self, gx: &[T]) -> Vec<T> {
        let mut acc = T::zero();
        gx.iter()
            .map(|&g| {
                acc += g;
                acc
            })
            .collect()
    }

    fn residual(&self, z: &[T], g: &[T]) -> T {
        let trial: Vec<T> = z.iter().zip(g).map(|(a, b)| *a - *b).collect();
        self.project_increments(&trial)
            .iter()
            .zip(z)
            .map(|(p, zi)| (*p - *zi).abs())
            .fold(T::zero(), T::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn vertices_and_equal_split_are_feasible() {
        let s = OrderedSimplex::new(3, 1.5f64);
        assert!(s.contains(&s.equal_split(), 1e-12));
        for j in 0..3 {
            assert!(s.contains(&s.vertex(j), 1e-12));
        }
        assert!(!s.contains(&[0.2, 0.5, 0.8], 1e-12));
    }

    #[test]
    fn quadratic_with_interior_minimum() {
        // min Σ (x − c)² with c feasible → c
        let s = OrderedSimplex::new(3, 1.0f64);
        let c = [0.5, 0.3, 0.2];
        let m = s
            .minimize(
                |x| {
                    let v = x.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum();
                    (v, x.iter().zip(&c).map(|(a, b)| 2.0 * (a - b)).collect())
                },
                &s.equal_split(),
            )
            .unwrap();
        for (a, b) in m.point.iter().zip(&c) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn linear_objective_lands_on_vertex() {
        // min −x₁ → (1, 0)
        let s = OrderedSimplex::new(2, 1.0f64);
        let m = s.minimize(|x| (-x[0], vec![-1.0, 0.0]), &s.equal_split()).unwrap();
        assert!((m.point[0] - 1.0).abs() < 1e-12 && m.point[1].abs() < 1e-12);
        // min +x₁ → equal split (the ordering constraint binds)
        let m = s.minimize(|x| (x[0], vec![1.0, 0.0]), &s.vertex(0)).unwrap();
        assert!((m.point[0] - 0.5).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn projection_is_feasible_and_idempotent(
            y in proptest::collection::vec(-3.0f64..3.0, 1..5),
            total in 0.1f64..3.0,
        ) {
            let s = OrderedSimplex::new(y.len(), total);
            let z = s.project_increments(&y);
            prop_assert!(z.iter().all(|v| *v >= 0.0));
            let weighted: f64 = z.iter().enumerate().map(|(j, v)| (j + 1) as f64 * v).sum();
            prop_assert!((weighted - total).abs() < 1e-12);
            let z2 = s.project_increments(&z);
            for (a, b) in z.iter().zip(&z2) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            prop_assert!(s.contains(&s.from_increments(&z), 1e-12));
        }
    }
}
