//! Dense complex matrix kernel.
//!
//! Dimensions in this crate never exceed 16, so everything is a plain
//! row-major `Vec` with O(n³) algorithms: Householder QR with an explicit
//! unitary factor and cyclic Jacobi for Hermitian eigenvalues.

use std::ops::{Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Real, Result};

/// Factorization tolerance (reconstruction, orthonormality, null-space residual).
pub const FACTOR_TOL: f64 = 1e-10;
/// Tolerance on entries below the diagonal of `r`.
pub const TRIANGULAR_TOL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting empty shapes and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::domain("ComplexMatrix::from_vec", "empty dimension"));
        }
        if data.len() != rows * cols {
            return Err(Error::domain(
                "ComplexMatrix::from_vec",
                format!("expected {} entries, got {}", rows * cols, data.len()),
            ));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("ComplexMatrix::from_vec", "non-finite entry"));
        }
        Ok(Self { rows, cols, data })
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(diag[i], T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// `self · self†`.
    pub fn gram(&self) -> Self {
        let n = self.rows;
        let mut g = Self::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex::new(T::zero(), T::zero());
                for c in 0..self.cols {
                    acc += self[(i, c)] * self[(j, c)].conj();
                }
                g[(i, j)] = acc;
                g[(j, i)] = acc.conj();
            }
            g[(i, i)].im = T::zero();
        }
        g
    }

    /// Columns `from..` as a new matrix.
    pub fn columns_from(&self, from: usize) -> Self {
        Self::from_fn(self.rows, self.cols - from, |i, j| self[(i, from + j)])
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shapes differ");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

/// Unitary/upper-triangular factor pair with `q · r = m`.
#[derive(Debug, Clone)]
pub struct QrPair<T> {
    pub q: ComplexMatrix<T>,
    pub r: ComplexMatrix<T>,
}

/// Matrix of i.i.d. circularly-symmetric unit-variance complex Gaussians.
///
/// Real and imaginary parts are independent `N(0, 1/2)`; entries are drawn
/// row by row, real part first.
pub fn sample_complex_gaussian<T: Real, R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> ComplexMatrix<T> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(T::lit(re * scale), T::lit(im * scale))
    })
}

/// Householder QR with a full unitary `q` and a real nonnegative diagonal on `r`.
pub fn qr_decompose<T: Real>(m: &ComplexMatrix<T>) -> Result<QrPair<T>> {
    let (rows, cols) = (m.rows, m.cols);
    let mut r = m.clone();
    let mut q = ComplexMatrix::identity(rows);
    let steps = rows.min(cols);
    let zero = Complex::new(T::zero(), T::zero());

    for j in 0..steps {
        let norm = (j..rows).map(|i| r[(i, j)].norm_sqr()).sum::<T>().sqrt();
        if !(norm > T::min_positive_value()) {
            return Err(Error::Degenerate { column: j });
        }
        let below = (j + 1..rows).map(|i| r[(i, j)].norm_sqr()).sum::<T>();
        if below > T::zero() {
            // Reflector H = I − 2vv†/(v†v) mapping r[j.., j] onto −e^{iθ}‖x‖ e₁.
            let x0 = r[(j, j)];
            let phase = if x0.norm() > T::zero() {
                x0 / x0.norm()
            } else {
                Complex::new(T::one(), T::zero())
            };
            let alpha = -phase * norm;
            let mut v: Vec<Complex<T>> = (j..rows).map(|i| r[(i, j)]).collect();
            v[0] -= alpha;
            let vnorm2: T = v.iter().map(|z| z.norm_sqr()).sum();
            let two = T::lit(2.0) / vnorm2;

            for c in j..cols {
                let mut dot = zero;
                for (t, vi) in v.iter().enumerate() {
                    dot += vi.conj() * r[(j + t, c)];
                }
                let dot = dot * two;
                for (t, vi) in v.iter().enumerate() {
                    r[(j + t, c)] -= *vi * dot;
                }
            }
            for row in 0..rows {
                let mut dot = zero;
                for (t, vi) in v.iter().enumerate() {
                    dot += q[(row, j + t)] * *vi;
                }
                let dot = dot * two;
                for (t, vi) in v.iter().enumerate() {
                    q[(row, j + t)] -= dot * vi.conj();
                }
            }
            r[(j, j)] = alpha;
            for i in j + 1..rows {
                r[(i, j)] = zero;
            }
        }
    }

    // Absorb diagonal phases into q's columns so diag(r) is real nonnegative.
    for j in 0..steps {
        let d = r[(j, j)];
        let mag = d.norm();
        if mag == T::zero() {
            continue;
        }
        let p = d / mag;
        for c in j..cols {
            r[(j, c)] = p.conj() * r[(j, c)];
        }
        r[(j, j)] = Complex::new(mag, T::zero());
        for row in 0..rows {
            q[(row, j)] *= p;
        }
    }
    Ok(QrPair { q, r })
}

/// Orthonormal basis of the null space of a wide, full-row-rank `h`.
///
/// Returns `A` (`cols × (cols − rows)`) with `h · A = 0` and `A†A = I`,
/// taken from the trailing columns of the unitary factor of `h†`.
pub fn null_space_basis<T: Real>(h: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let (rows, cols) = (h.rows, h.cols);
    if rows >= cols {
        return Err(Error::RankDeficient {
            rank: cols,
            expected: rows,
        });
    }
    let qr = match qr_decompose(&h.adjoint()) {
        Ok(qr) => qr,
        Err(Error::Degenerate { column }) => {
            return Err(Error::RankDeficient {
                rank: column,
                expected: rows,
            })
        }
        Err(e) => return Err(e),
    };
    let scale = h.frobenius_norm();
    let tol = T::lit(FACTOR_TOL) * scale;
    let rank = (0..rows).filter(|&j| qr.r[(j, j)].re > tol).count();
    if rank < rows {
        return Err(Error::RankDeficient {
            rank,
            expected: rows,
        });
    }
    Ok(qr.q.columns_from(rows))
}

fn hermitian_asymmetry<T: Real>(m: &ComplexMatrix<T>) -> T {
    let n = m.rows;
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            acc += (m[(i, j)] - m[(j, i)].conj()).norm_sqr();
        }
    }
    acc.sqrt()
}

/// Eigenvalues of a Hermitian matrix in ascending order (cyclic Jacobi).
pub fn hermitian_eigenvalues<T: Real>(m: &ComplexMatrix<T>) -> Result<Vec<T>> {
    if m.rows != m.cols {
        return Err(Error::NotHermitian {
            asymmetry: f64::INFINITY,
        });
    }
    let asym = hermitian_asymmetry(m);
    let scale = m.frobenius_norm().max(T::one());
    if asym > T::lit(FACTOR_TOL) * scale {
        return Err(Error::NotHermitian {
            asymmetry: asym.to_f64_lossy(),
        });
    }
    let n = m.rows;
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)].im = T::zero();
    }
    let eps = T::epsilon();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                off += a[(i, j)].norm_sqr();
            }
        }
        let diag: T = (0..n).map(|i| a[(i, i)].re * a[(i, i)].re).sum();
        if off.sqrt() <= eps * (diag + off + off).sqrt() || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut a, p, q);
            }
        }
    }

    let mut ev: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(ev)
}

/// One two-sided rotation `a ← U† a U` that annihilates `a[p][q]`.
fn jacobi_rotate<T: Real>(a: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == T::zero() {
        return;
    }
    let n = a.rows;
    let phase = apq / mag; // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (T::lit(2.0) * mag);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    // U = D·G with D = diag(1, e^{−iφ}) on (p, q), G the real rotation.
    let cz = Complex::new(c, T::zero());
    let u_pp = cz;
    let u_pq = Complex::new(s, T::zero());
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * u_pp + aiq * u_qp;
        a[(i, q)] = aip * u_pq + aiq * u_qq;
    }
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = u_pp.conj() * apj + u_qp.conj() * aqj;
        a[(q, j)] = u_pq.conj() * apj + u_qq.conj() * aqj;
    }
    let zero = Complex::new(T::zero(), T::zero());
    a[(p, q)] = zero;
    a[(q, p)] = zero;
    a[(p, p)].im = T::zero();
    a[(q, q)].im = T::zero();
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn max_eigenvalue_hermitian<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    let ev = hermitian_eigenvalues(m)?;
    Ok(*ev.last().expect("non-empty spectrum"))
}

/// Eigenvalues of the smaller Gram matrix of `h` (`h h†` or `h† h`), clamped at zero.
pub fn gram_eigenvalues<T: Real>(h: &ComplexMatrix<T>) -> Vec<T> {
    let gram = if h.rows <= h.cols {
        h.gram()
    } else {
        h.adjoint().gram()
    };
    hermitian_eigenvalues(&gram)
        .expect("Gram matrix is Hermitian by construction")
        .into_iter()
        .map(|l| l.max(T::zero()))
        .collect()
}

/// `Σ ln(1 + rho·λᵢ)` over nonnegative eigenvalues.
pub fn log_det_from_eigenvalues<T: Real>(eigenvalues: &[T], rho: T) -> T {
    eigenvalues.iter().map(|&l| (rho * l).ln_1p()).sum()
}

/// `ln det(I + rho · h h†)` in nats.
pub fn log_det_mutual_info<T: Real>(h: &ComplexMatrix<T>, rho: T) -> T {
    log_det_from_eigenvalues(&gram_eigenvalues(h), rho)
}
