//! Problem instances: antenna configuration, array gain, rate schedule and
//! the zero-forcing equivalent channel.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::linalg::{self, ComplexMatrix};
use crate::rng::{chunked_map, trial_rng, Domain};
use crate::{Error, Real, Result};

/// Largest antenna count accepted by [`make_config`].
pub const MAX_ANTENNAS: usize = 16;
/// Minimum trial count for the array-gain estimator.
pub const MIN_GAIN_TRIALS: u64 = 10_000;
/// Reference trial count used when a run estimates `g` itself.
pub const DEFAULT_GAIN_TRIALS: u64 = 1_000_000;

/// Antenna triple `(N_t, N_m, N_e)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WiretapConfig {
    n_t: usize,
    n_m: usize,
    n_e: usize,
}

/// Validates the antenna counts. Infeasible (`n_e ≥ n_t`) triples are allowed
/// here; operations that need zero-forcing reject them.
pub fn make_config(n_t: usize, n_m: usize, n_e: usize) -> Result<WiretapConfig> {
    if n_t < 1 || n_m < 1 {
        return Err(Error::InvalidConfig(format!(
            "n_t and n_m must be at least 1 (got {n_t}, {n_m})"
        )));
    }
    if n_t > MAX_ANTENNAS || n_m > MAX_ANTENNAS || n_e > MAX_ANTENNAS {
        return Err(Error::InvalidConfig(format!(
            "antenna counts must not exceed {MAX_ANTENNAS}"
        )));
    }
    Ok(WiretapConfig { n_t, n_m, n_e })
}

impl WiretapConfig {
    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_m(&self) -> usize {
        self.n_m
    }

    pub fn n_e(&self) -> usize {
        self.n_e
    }

    /// Zero-forcing is possible iff the eavesdropper has fewer antennas than the transmitter.
    pub fn is_feasible(&self) -> bool {
        self.n_e < self.n_t
    }

    /// Transmit dimensions left after nulling the eavesdropper, `N_t − N_e` (0 if infeasible).
    pub fn free_dims(&self) -> usize {
        self.n_t.saturating_sub(self.n_e)
    }

    /// `min(N_t − N_e, N_m)`
    pub fn m(&self) -> usize {
        self.free_dims().min(self.n_m)
    }

    /// `max(N_t − N_e, N_m)`
    pub fn k(&self) -> usize {
        self.free_dims().max(self.n_m)
    }

    pub fn require_feasible(&self) -> Result<()> {
        if self.is_feasible() {
            Ok(())
        } else {
            Err(Error::Infeasible {
                n_t: self.n_t,
                n_e: self.n_e,
            })
        }
    }

    /// `N_t − N_e` as a scalar.
    pub fn free_dims_real<T: Real>(&self) -> T {
        T::from_usize_lossy(self.free_dims())
    }
}

impl fmt::Display for WiretapConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n_t, self.n_m, self.n_e)
    }
}

impl FromStr for WiretapConfig {
    type Err = Error;

    /// Parses `"Nt,Nm,Ne"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::InvalidConfig(format!("expected Nt,Nm,Ne, got {s:?}")));
        }
        let mut n = [0usize; 3];
        for (slot, p) in n.iter_mut().zip(&parts) {
            *slot = p
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad antenna count {p:?}")))?;
        }
        make_config(n[0], n[1], n[2])
    }
}

/// Secrecy multiplexing gain together with the array gain that normalizes it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSchedule<T> {
    r_s: T,
    g: T,
}

impl<T: Real> RateSchedule<T> {
    pub fn new(cfg: &WiretapConfig, r_s: T, g: T) -> Result<Self> {
        let m = T::from_usize_lossy(cfg.m());
        if !(r_s >= T::zero() && r_s <= m) {
            return Err(Error::domain(
                "RateSchedule::new",
                format!("r_s = {r_s} outside [0, {m}]"),
            ));
        }
        if !(g > T::zero() && g.is_finite()) {
            return Err(Error::domain("RateSchedule::new", format!("array gain {g} must be positive")));
        }
        Ok(Self { r_s, g })
    }

    pub fn r_s(&self) -> T {
        self.r_s
    }

    pub fn g(&self) -> T {
        self.g
    }

    pub fn with_rate(&self, r_s: T) -> Self {
        Self { r_s, g: self.g }
    }

    /// `ln(1 + g·eta)`
    pub fn log_gain(&self, eta: T) -> T {
        (self.g * eta).ln_1p()
    }
}

/// Target secrecy rate `R_s = r_s · ln(1 + g·η)` in nats per channel use.
pub fn secrecy_rate<T: Real>(sched: &RateSchedule<T>, eta: T) -> T {
    sched.r_s * sched.log_gain(eta)
}

/// Monte-Carlo estimate of the array gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainEstimate<T> {
    pub g: T,
    pub std_err: T,
    pub trials: u64,
    pub seed: u64,
}

/// Draws `(H_m, H_e)`; `H_e` is `None` when the eavesdropper has no antennas.
pub fn sample_channels<T: Real, R: Rng + ?Sized>(
    cfg: &WiretapConfig,
    rng: &mut R,
) -> (ComplexMatrix<T>, Option<ComplexMatrix<T>>) {
    let h_m = linalg::sample_complex_gaussian(cfg.n_m, cfg.n_t, rng);
    let h_e = (cfg.n_e > 0).then(|| linalg::sample_complex_gaussian(cfg.n_e, cfg.n_t, rng));
    (h_m, h_e)
}

/// `[λ_max(H_m†H_m − H_e†H_e)]⁺` for one channel pair.
pub fn secrecy_eigen_gain<T: Real>(h_m: &ComplexMatrix<T>, h_e: Option<&ComplexMatrix<T>>) -> T {
    let main = h_m.adjoint().gram();
    let diff = match h_e {
        Some(h_e) => &main - &h_e.adjoint().gram(),
        None => main,
    };
    linalg::max_eigenvalue_hermitian(&diff)
        .expect("difference of Gram matrices is Hermitian")
        .max(T::zero())
}

/// Mean of `[λ_max(H_m†H_m − H_e†H_e)]⁺` over `trials` independent channel pairs.
pub fn estimate_array_gain<T: Real>(cfg: &WiretapConfig, trials: u64, seed: u64) -> Result<GainEstimate<T>> {
    if trials < MIN_GAIN_TRIALS {
        return Err(Error::domain(
            "estimate_array_gain",
            format!("need at least {MIN_GAIN_TRIALS} trials, got {trials}"),
        ));
    }
    let partial = chunked_map(trials, |range| {
        let mut sum = T::zero();
        let mut sum_sq = T::zero();
        for i in range {
            let mut rng = trial_rng(seed, Domain::ArrayGain, i);
            let (h_m, h_e) = sample_channels::<T, _>(cfg, &mut rng);
            let v = secrecy_eigen_gain(&h_m, h_e.as_ref());
            sum += v;
            sum_sq += v * v;
        }
        (sum, sum_sq)
    });
    let (sum, sum_sq) = partial
        .into_iter()
        .fold((T::zero(), T::zero()), |(a, b), (c, d)| (a + c, b + d));
    let n = T::from_u64(trials).unwrap();
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - T::one())).max(T::zero());
    Ok(GainEstimate {
        g: mean,
        std_err: (var / n).sqrt(),
        trials,
        seed,
    })
}

/// `H_eq = H_m · A` with `A` an orthonormal basis of null(`H_e`); `H_m` itself when there is no eavesdropper.
pub fn equivalent_channel<T: Real>(
    h_m: &ComplexMatrix<T>,
    h_e: Option<&ComplexMatrix<T>>,
) -> Result<ComplexMatrix<T>> {
    match h_e {
        None => Ok(h_m.clone()),
        Some(h_e) => {
            if h_e.cols() != h_m.cols() {
                return Err(Error::domain(
                    "equivalent_channel",
                    "H_m and H_e must share the transmit dimension",
                ));
            }
            let a = linalg::null_space_basis(h_e)?;
            Ok(h_m * &a)
        }
    }
}

/// Plain-text `key = value` record of the configuration and its array gain.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub n_t: usize,
    pub n_m: usize,
    pub n_e: usize,
    pub g: f64,
    pub g_std_err: f64,
    pub g_trials: u64,
    pub seed: u64,
}

impl RunManifest {
    pub fn new(cfg: &WiretapConfig, gain: &GainEstimate<f64>) -> Self {
        Self {
            n_t: cfg.n_t,
            n_m: cfg.n_m,
            n_e: cfg.n_e,
            g: gain.g,
            g_std_err: gain.std_err,
            g_trials: gain.trials,
            seed: gain.seed,
        }
    }

    pub fn config(&self) -> Result<WiretapConfig> {
        make_config(self.n_t, self.n_m, self.n_e)
    }

    pub fn lines(&self) -> Vec<String> {
        vec![
            format!("n_t = {}", self.n_t),
            format!("n_m = {}", self.n_m),
            format!("n_e = {}", self.n_e),
            format!("g = {}", self.g),
            format!("g_std_err = {}", self.g_std_err),
            format!("g_trials = {}", self.g_trials),
            format!("seed = {}", self.seed),
        ]
    }
}

impl fmt::Display for RunManifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

impl FromStr for RunManifest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut fields: std::collections::HashMap<&str, &str> = Default::default();
        for line in s.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Manifest(format!("malformed line {line:?}")))?;
            fields.insert(k.trim(), v.trim());
        }
        fn get<V: FromStr>(fields: &std::collections::HashMap<&str, &str>, key: &str) -> Result<V> {
            let raw = fields
                .get(key)
                .ok_or_else(|| Error::Manifest(format!("missing key {key}")))?;
            raw.parse()
                .map_err(|_| Error::Manifest(format!("bad value for {key}: {raw:?}")))
        }
        Ok(Self {
            n_t: get(&fields, "n_t")?,
            n_m: get(&fields, "n_m")?,
            n_e: get(&fields, "n_e")?,
            g: get(&fields, "g")?,
            g_std_err: get(&fields, "g_std_err")?,
            g_trials: get(&fields, "g_trials")?,
            seed: get(&fields, "seed")?,
        })
    }
}
