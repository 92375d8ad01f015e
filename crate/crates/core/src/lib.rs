//! Finite-SNR secrecy diversity-multiplexing tradeoff of the zero-forcing
//! transmit scheme over the Rayleigh MIMO wiretap channel.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`]: small dense complex matrices: Gaussian sampling, QR,
//!   eavesdropper null space, Hermitian eigenvalues, log-det mutual information.
//! * [`special`]: incomplete gamma, Gaussian Q, exponential integrals, Laguerre.
//! * [`channel`]: antenna configuration, array gain, rate schedule, run manifest.
//! * [`bounds`]: analytic upper/lower outage bounds and their optimized rate splits.
//! * [`diversity`]: diversity-gain estimators and their asymptotic limits.
//! * [`gaussian`]: Gaussian approximation of the equivalent-channel mutual information.
//! * [`montecarlo`]: seeded, worker-count-invariant outage simulation.
//! * [`acceptance`]: end-to-end cross-validation checks shared by tests and the CLI.
//!
//! All numerical code is generic over [`Real`]; `f64` aliases are exported at the
//! crate root for the common case.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

pub mod acceptance;
pub mod bounds;
pub mod channel;
pub mod diversity;
mod error;
pub mod gaussian;
pub mod linalg;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;
pub mod simplex;
pub mod special;

pub use error::{Error, Result};

/// Real scalar used throughout the crate.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Complementary error function.
    fn erfc(self) -> Self;

    /// Lossless-enough conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }
}

impl Real for f64 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfc(self)
    }
}

pub type ComplexMatrix64 = linalg::ComplexMatrix<f64>;
pub type QrPair64 = linalg::QrPair<f64>;
pub type RateSchedule64 = channel::RateSchedule<f64>;
pub type GainEstimate64 = channel::GainEstimate<f64>;
pub type Allocation64 = bounds::Allocation<f64>;
pub type BoundValue64 = bounds::BoundValue<f64>;
pub type DiversityPoint64 = diversity::DiversityPoint<f64>;
pub type MomentPair64 = gaussian::MomentPair<f64>;
pub type OutageEstimate64 = montecarlo::OutageEstimate<f64>;

pub use bounds::{AllocationKind, AsymptoticRegime};
pub use channel::{RunManifest, WiretapConfig};
pub use diversity::Estimator;
pub use gaussian::MomentMethod;

/// Converts decibels to a linear power ratio.
pub fn db_to_linear<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

/// Converts a linear power ratio to decibels.
pub fn linear_to_db<T: Real>(x: T) -> T {
    T::lit(10.0) * x.log10()
}
