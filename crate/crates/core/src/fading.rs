//! Temporal correlation models and correlated Rayleigh block fading.

use num_complex::Complex;
use rand::Rng;
use thiserror::Error;

use crate::numerics::{bessel_j0, herm_eig_n, ComplexMat, HermEig, NumericsError};
use crate::scalar::{complex_gaussian, Real};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const DEFAULT_SOS_SINUSOIDS: usize = 16;
pub const MIN_SOS_SINUSOIDS: usize = 8;
const UNIT_DIAGONAL_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FadingError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("correlation matrix diagonal entry {index} is {value}, expected 1")]
    NonUnitDiagonal { index: usize, value: f64 },
    #[error("invalid {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
}

/// Maximum Doppler shift in Hz for a terminal moving at `v_kmh`.
pub fn doppler_hz<T: Real>(v_kmh: T, f_c_hz: T) -> T {
    v_kmh / T::lit(3.6) * f_c_hz / T::lit(SPEED_OF_LIGHT)
}

/// Clarke's model: `[C]_kl = J0(2π f_d T_s |k − l|)`.
pub fn clarke_correlation<T: Real>(l: usize, f_d: T, t_s: T) -> ComplexMat<T> {
    let w = T::TAU() * f_d * t_s;
    let row: Vec<T> = (0..l).map(|k| bessel_j0(w * T::count(k))).collect();
    ComplexMat::from_fn(l, l, |i, j| Complex::new(row[i.abs_diff(j)], T::zero()))
}

/// Statistics of the path-coefficient matrix `H` (L packets by N antennas).
#[derive(Debug, Clone)]
pub struct ChannelSpec<T: Real> {
    n: usize,
    sigma_h2: T,
    c_h: ComplexMat<T>,
    eig: HermEig<T>,
    // V^H diag(sqrt λ)
    factor: ComplexMat<T>,
}

impl<T: Real> ChannelSpec<T> {
    pub fn new(n: usize, sigma_h2: T, c_h: ComplexMat<T>) -> Result<Self, FadingError> {
        if n == 0 {
            return Err(FadingError::InvalidParameter { name: "N", value: 0.0 });
        }
        if !(sigma_h2 >= T::zero()) || !sigma_h2.is_finite() {
            return Err(FadingError::InvalidParameter { name: "sigma_h2", value: sigma_h2.as_f64() });
        }
        let eig = herm_eig_n(&c_h)?;
        for i in 0..c_h.rows() {
            let d = c_h[(i, i)];
            if (d.re - T::one()).abs() > T::tol(UNIT_DIAGONAL_TOL) || d.im != T::zero() {
                return Err(FadingError::NonUnitDiagonal { index: i, value: d.re.as_f64() });
            }
        }
        let l = c_h.rows();
        let factor = ComplexMat::from_fn(l, l, |i, k| eig.v[(k, i)].conj() * eig.lambdas[k].sqrt());
        Ok(Self {
            n,
            sigma_h2,
            c_h,
            eig,
            factor,
        })
    }

    /// Independent packets: `C_H = I`.
    pub fn iid(n: usize, l: usize, sigma_h2: T) -> Result<Self, FadingError> {
        Self::new(n, sigma_h2, ComplexMat::identity(l))
    }

    pub fn clarke(n: usize, l: usize, sigma_h2: T, f_d: T, t_s: T) -> Result<Self, FadingError> {
        if !(f_d >= T::zero()) || !f_d.is_finite() {
            return Err(FadingError::InvalidParameter { name: "f_d", value: f_d.as_f64() });
        }
        if !(t_s > T::zero()) || !t_s.is_finite() {
            return Err(FadingError::InvalidParameter { name: "T_s", value: t_s.as_f64() });
        }
        Self::new(n, sigma_h2, clarke_correlation(l, f_d, t_s))
    }

    /// Same correlation with a different path-coefficient variance.
    pub fn with_sigma_h2(&self, sigma_h2: T) -> Result<Self, FadingError> {
        if !(sigma_h2 >= T::zero()) || !sigma_h2.is_finite() {
            return Err(FadingError::InvalidParameter { name: "sigma_h2", value: sigma_h2.as_f64() });
        }
        Ok(Self { sigma_h2, ..self.clone() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.c_h.rows()
    }

    pub fn sigma_h2(&self) -> T {
        self.sigma_h2
    }

    pub fn correlation(&self) -> &ComplexMat<T> {
        &self.c_h
    }

    pub fn eig(&self) -> &HermEig<T> {
        &self.eig
    }

    pub fn lambdas(&self) -> &[T] {
        &self.eig.lambdas
    }
}

/// One realisation of the path coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingDraw<T> {
    /// L×N, one row per packet.
    pub h: ComplexMat<T>,
}

/// Draws `H` with i.i.d. columns distributed as `CN(0, σ_h² C_H)`.
pub fn sample_h<T: Real, R: Rng + ?Sized>(spec: &ChannelSpec<T>, rng: &mut R) -> FadingDraw<T> {
    let l = spec.l();
    let g = ComplexMat::from_fn(l, spec.n, |_, _| complex_gaussian(rng, T::one()));
    FadingDraw {
        h: spec.factor.matmul(&g).scale_real(spec.sigma_h2.sqrt()),
    }
}

/// One unit-power fading sequence sampled every `t_s` seconds from the
/// randomised sum-of-sinusoids model of Zheng and Xiao.
pub fn sos_sequence<T: Real, R: Rng + ?Sized>(
    l: usize,
    f_d: T,
    t_s: T,
    m_sin: usize,
    rng: &mut R,
) -> Result<Vec<Complex<T>>, FadingError> {
    if m_sin < MIN_SOS_SINUSOIDS {
        return Err(FadingError::InvalidParameter { name: "M_sin", value: m_sin as f64 });
    }
    let mut uniform_angle = || T::PI() * (T::lit(2.0) * T::unit_uniform(rng) - T::one());
    let theta = uniform_angle();
    let phi = uniform_angle();
    let psi: Vec<T> = (0..m_sin).map(|_| uniform_angle()).collect();
    let m = T::count(m_sin);
    let alpha: Vec<T> = (1..=m_sin)
        .map(|n| (T::TAU() * T::count(n) - T::PI() + theta) / (T::lit(4.0) * m))
        .collect();
    let w = T::TAU() * f_d;
    let amp = (T::lit(2.0) / m).sqrt();
    Ok((0..l)
        .map(|k| {
            let wt = w * t_s * T::count(k);
            let (mut xc, mut xs) = (T::zero(), T::zero());
            for (a, p) in alpha.iter().zip(&psi) {
                xc += p.cos() * (wt * a.cos() + phi).cos();
                xs += p.sin() * (wt * a.sin() + phi).cos();
            }
            Complex::new(amp * xc, amp * xs)
        })
        .collect())
}
