//! Training sequences, observation synthesis under load switching, and the
//! reduction of raw observations to sufficient statistics.

use num_complex::Complex;
use rand::Rng;
use thiserror::Error;

use crate::fading::{sample_h, ChannelSpec};
use crate::numerics::ComplexMat;
use crate::scalar::{complex_gaussian, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("infeasible training: N = {n}, T = {t} ({reason})")]
    InfeasibleTraining { n: usize, t: usize, reason: &'static str },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
}

/// Orthogonal training blocks sent before and after the load switch.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSpec<T> {
    pub n: usize,
    pub t: usize,
    /// Switch point, `T / 2`.
    pub k: usize,
    pub p: T,
    /// N×K, sent while the load is `Z1`.
    pub x1: ComplexMat<T>,
    /// N×(T−K), sent while the load is `Z2`.
    pub x2: ComplexMat<T>,
}

impl<T: Real> TrainingSpec<T> {
    /// `PT / 2N`, the Gram scale of each block.
    pub fn gram_scale(&self) -> T {
        self.p * T::count(self.t) / (T::lit(2.0) * T::count(self.n))
    }
}

/// Rows of a `T/2`-point DFT matrix scaled to per-symbol power `p`.
///
/// The first block uses rows `0..N` and the second rows `N..2N`, wrapping
/// modulo `T/2` when fewer than `2N` rows exist.
pub fn dft_training<T: Real>(n: usize, t: usize, p: T) -> Result<TrainingSpec<T>, SignalError> {
    if n == 0 {
        return Err(SignalError::InfeasibleTraining { n, t, reason: "N must be positive" });
    }
    if t == 0 || !t.is_multiple_of(2) {
        return Err(SignalError::InfeasibleTraining { n, t, reason: "T must be even and positive" });
    }
    let k = t / 2;
    if k < n {
        return Err(SignalError::InfeasibleTraining { n, t, reason: "T/2 must be at least N" });
    }
    if !(p > T::zero()) || !p.is_finite() {
        return Err(SignalError::InvalidParameter { name: "P", value: p.as_f64() });
    }
    let amp = (p / T::count(n)).sqrt();
    let kf = T::count(k);
    let entry = |row: usize, col: usize| {
        let phase = -T::TAU() * T::count((row * col) % k) / kf;
        Complex::from_polar(amp, phase)
    };
    let x1 = ComplexMat::from_fn(n, k, &entry);
    let x2 = ComplexMat::from_fn(n, t - k, |r, c| entry((n + r) % k, c));
    Ok(TrainingSpec { n, t, k, p, x1, x2 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Truth<T> {
    pub f: Complex<T>,
    pub h: ComplexMat<T>,
    pub sigma_h2: T,
}

/// Received samples before (`u1`, L×K) and after (`u2`, L×(T−K)) the switch.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations<T> {
    pub u1: ComplexMat<T>,
    pub u2: ComplexMat<T>,
    pub truth: Option<Truth<T>>,
}

/// Matched-filter outputs `Y1 ≈ H`, `Y2 ≈ F H`, each L×N, with i.i.d.
/// `CN(0, sigma2)` noise.
#[derive(Debug, Clone, PartialEq)]
pub struct SufficientStats<T> {
    y1: ComplexMat<T>,
    y2: ComplexMat<T>,
    sigma2: T,
}

impl<T: Real> SufficientStats<T> {
    pub fn new(y1: ComplexMat<T>, y2: ComplexMat<T>, sigma2: T) -> Result<Self, SignalError> {
        if y1.rows() != y2.rows() || y1.cols() != y2.cols() {
            return Err(SignalError::ShapeMismatch(format!(
                "Y1 is {}x{} but Y2 is {}x{}",
                y1.rows(),
                y1.cols(),
                y2.rows(),
                y2.cols()
            )));
        }
        if !(sigma2 >= T::zero()) || !sigma2.is_finite() {
            return Err(SignalError::InvalidParameter { name: "sigma2", value: sigma2.as_f64() });
        }
        let finite = |m: &ComplexMat<T>| m.as_slice().iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite(&y1) || !finite(&y2) {
            return Err(SignalError::InvalidParameter { name: "Y", value: f64::NAN });
        }
        Ok(Self { y1, y2, sigma2 })
    }

    pub fn y1(&self) -> &ComplexMat<T> {
        &self.y1
    }

    pub fn y2(&self) -> &ComplexMat<T> {
        &self.y2
    }

    pub fn sigma2(&self) -> T {
        self.sigma2
    }

    /// Number of packets.
    pub fn l(&self) -> usize {
        self.y1.rows()
    }

    /// Number of transmit antennas.
    pub fn n(&self) -> usize {
        self.y1.cols()
    }
}

fn noise<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, sigma_n2: T, rng: &mut R) -> ComplexMat<T> {
    ComplexMat::from_fn(rows, cols, |_, _| complex_gaussian(rng, sigma_n2))
}

/// Draws a channel and produces `U1 = H X1 + N1`, `U2 = F H X2 + N2`.
pub fn synthesize<T: Real, R: Rng + ?Sized>(
    spec: &ChannelSpec<T>,
    train: &TrainingSpec<T>,
    f: Complex<T>,
    sigma_n2: T,
    rng: &mut R,
) -> Result<Observations<T>, SignalError> {
    if spec.n() != train.n {
        return Err(SignalError::ShapeMismatch(format!(
            "channel has N = {} but training has N = {}",
            spec.n(),
            train.n
        )));
    }
    if !(sigma_n2 >= T::zero()) || !sigma_n2.is_finite() {
        return Err(SignalError::InvalidParameter { name: "sigma_n2", value: sigma_n2.as_f64() });
    }
    let h = sample_h(spec, rng).h;
    let l = spec.l();
    let u1 = &h.matmul(&train.x1) + &noise(l, train.k, sigma_n2, rng);
    let u2 = &h.matmul(&train.x2).scale(f) + &noise(l, train.t - train.k, sigma_n2, rng);
    Ok(Observations {
        u1,
        u2,
        truth: Some(Truth {
            f,
            h,
            sigma_h2: spec.sigma_h2(),
        }),
    })
}

/// `Y_i = (2N / PT) U_i X_i^H`, with noise variance `2N σ_n² / (PT)`.
pub fn sufficient_stats<T: Real>(
    obs: &Observations<T>,
    train: &TrainingSpec<T>,
    sigma_n2: T,
) -> Result<SufficientStats<T>, SignalError> {
    if obs.u1.cols() != train.x1.cols() || obs.u2.cols() != train.x2.cols() || obs.u1.rows() != obs.u2.rows() {
        return Err(SignalError::ShapeMismatch(format!(
            "observations {}x{} / {}x{} do not fit training blocks of length {} / {}",
            obs.u1.rows(),
            obs.u1.cols(),
            obs.u2.rows(),
            obs.u2.cols(),
            train.x1.cols(),
            train.x2.cols()
        )));
    }
    let inv = T::one() / train.gram_scale();
    let y1 = obs.u1.mul_adjoint(&train.x1).scale_real(inv);
    let y2 = obs.u2.mul_adjoint(&train.x2).scale_real(inv);
    SufficientStats::new(y1, y2, sigma_n2 * inv)
}
