//! Antenna and load impedance algebra.
//!
//! The receiver sees the path gain through a voltage divider formed by the
//! antenna impedance `Z_A` and the load `Z_L`. Switching the load between
//! `Z1` and `Z2` scales the received sample by the complex ratio `F`.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Real;

const SINGULAR_TOL: f64 = 1e-12;
const BISECTION_STEPS: usize = 400;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrontendError {
    #[error("singular circuit: |Z2 + Z_A| = {0:.3e}")]
    SingularCircuit(f64),
    #[error("singular inversion: |1 - sqrt(R1/R2) F| = {0:.3e}")]
    SingularInversion(f64),
    #[error("{name} is not passive (real part {re})")]
    NonPassive { name: &'static str, re: f64 },
    #[error("load impedances Z1 and Z2 must differ")]
    IdenticalLoads,
    #[error("invalid {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
}

fn check_passive<T: Real>(name: &'static str, z: Complex<T>) -> Result<(), FrontendError> {
    if z.re > T::zero() && z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(FrontendError::NonPassive { name, re: z.re.as_f64() })
    }
}

/// Antenna impedance together with the two switched load impedances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpedanceSet<T: Real> {
    z_a: Complex<T>,
    z1: Complex<T>,
    z2: Complex<T>,
}

impl<T: Real> ImpedanceSet<T> {
    pub fn new(z_a: Complex<T>, z1: Complex<T>, z2: Complex<T>) -> Result<Self, FrontendError> {
        check_passive("Z_A", z_a)?;
        check_passive("Z1", z1)?;
        check_passive("Z2", z2)?;
        if z1 == z2 {
            return Err(FrontendError::IdenticalLoads);
        }
        Ok(Self { z_a, z1, z2 })
    }

    pub fn z_a(&self) -> Complex<T> {
        self.z_a
    }

    pub fn z1(&self) -> Complex<T> {
        self.z1
    }

    pub fn z2(&self) -> Complex<T> {
        self.z2
    }

    pub fn r_a(&self) -> T {
        self.z_a.re
    }

    pub fn r1(&self) -> T {
        self.z1.re
    }

    pub fn r2(&self) -> T {
        self.z2.re
    }

    pub fn f(&self) -> Result<Complex<T>, FrontendError> {
        compute_f(self.z_a, self.z1, self.z2)
    }
}

/// Power and noise levels of one training configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget<T: Real> {
    pub sigma_g2: T,
    pub sigma_h2: T,
    pub sigma_n2: T,
    pub p: T,
    /// Post-detection SNR `P σ_h² / σ_n²`.
    pub gamma: T,
    /// Per-entry noise variance of the sufficient statistics.
    pub sigma2: T,
}

impl<T: Real> LinkBudget<T> {
    pub fn new(sigma_g2: T, imp: &ImpedanceSet<T>, p: T, sigma_n2: T, n: usize, t: usize) -> Result<Self, FrontendError> {
        for (name, v) in [("sigma_g2", sigma_g2), ("sigma_n2", sigma_n2)] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(FrontendError::InvalidParameter { name, value: v.as_f64() });
            }
        }
        if !(p > T::zero()) || !p.is_finite() {
            return Err(FrontendError::InvalidParameter { name: "P", value: p.as_f64() });
        }
        let sigma_h2 = sigma_h2_from_gain(sigma_g2, imp.z_a, imp.z1)?;
        let gamma = if sigma_n2 > T::zero() {
            p * sigma_h2 / sigma_n2
        } else {
            T::infinity()
        };
        Ok(Self {
            sigma_g2,
            sigma_h2,
            sigma_n2,
            p,
            gamma,
            sigma2: effective_sigma2(sigma_n2, n, p, t),
        })
    }
}

/// `F = sqrt(R2)(Z1 + Z_A) / (sqrt(R1)(Z2 + Z_A))`.
pub fn compute_f<T: Real>(z_a: Complex<T>, z1: Complex<T>, z2: Complex<T>) -> Result<Complex<T>, FrontendError> {
    check_passive("Z1", z1)?;
    check_passive("Z2", z2)?;
    let den = z2 + z_a;
    if den.norm() < T::lit(SINGULAR_TOL) {
        return Err(FrontendError::SingularCircuit(den.norm().as_f64()));
    }
    Ok((z1 + z_a) / den * (z2.re / z1.re).sqrt())
}

/// Inverts [`compute_f`] for the antenna impedance.
pub fn recover_za<T: Real>(f: Complex<T>, z1: Complex<T>, z2: Complex<T>) -> Result<Complex<T>, FrontendError> {
    check_passive("Z1", z1)?;
    check_passive("Z2", z2)?;
    let g = f * (z1.re / z2.re).sqrt();
    let den = Complex::new(T::one(), T::zero()) - g;
    if den.norm() < T::lit(SINGULAR_TOL) {
        return Err(FrontendError::SingularInversion(den.norm().as_f64()));
    }
    Ok((z2 * g - z1) / den)
}

pub fn conjugate_match<T: Real>(z_a: Complex<T>) -> Result<Complex<T>, FrontendError> {
    check_passive("Z_A", z_a)?;
    Ok(z_a.conj())
}

/// Fraction of the available power delivered to `z_l`: `4 R_A R_L / |Z_A + Z_L|²`.
pub fn mismatch_loss<T: Real>(z_a: Complex<T>, z_l: Complex<T>) -> Result<T, FrontendError> {
    check_passive("Z_A", z_a)?;
    check_passive("Z_L", z_l)?;
    Ok(T::lit(4.0) * z_a.re * z_l.re / (z_a + z_l).norm_sqr())
}

/// Finds a passive load losing `loss_db` relative to the conjugate match.
///
/// The search runs along the ray `Z_A* + t e^{jθ}`, `t ≥ 0`, on which the
/// delivered power falls monotonically while the load stays passive.
pub fn find_mismatched_load<T: Real>(z_a: Complex<T>, loss_db: T, angle_rad: T) -> Result<Complex<T>, FrontendError> {
    let start = conjugate_match(z_a)?;
    if !(loss_db >= T::zero()) || !loss_db.is_finite() {
        return Err(FrontendError::InvalidParameter { name: "loss_db", value: loss_db.as_f64() });
    }
    if !angle_rad.is_finite() {
        return Err(FrontendError::InvalidParameter { name: "load_angle", value: angle_rad.as_f64() });
    }
    if loss_db == T::zero() {
        return Ok(start);
    }
    let target = T::lit(10.0).powf(-loss_db / T::lit(10.0));
    let dir = Complex::new(angle_rad.cos(), angle_rad.sin());
    let load = |t: T| start + dir * t;
    let excess = |t: T| T::lit(4.0) * z_a.re * load(t).re / (z_a + load(t)).norm_sqr() - target;

    let mut lo = T::zero();
    let mut hi = if dir.re < T::zero() {
        z_a.re / -dir.re
    } else {
        z_a.re
    };
    if dir.re >= T::zero() {
        while excess(hi) > T::zero() {
            lo = hi;
            hi *= T::lit(2.0);
            if !hi.is_finite() {
                return Err(FrontendError::InvalidParameter { name: "loss_db", value: loss_db.as_f64() });
            }
        }
    }
    for _ in 0..BISECTION_STEPS {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = (lo + hi) / T::lit(2.0);
    let z_l = load(t);
    check_passive("Z_L", z_l)?;
    Ok(z_l)
}

/// `σ_h² = R1 σ_g² / |Z_A + Z1|²`.
pub fn sigma_h2_from_gain<T: Real>(sigma_g2: T, z_a: Complex<T>, z1: Complex<T>) -> Result<T, FrontendError> {
    check_passive("Z_A", z_a)?;
    check_passive("Z1", z1)?;
    if !(sigma_g2 >= T::zero()) {
        return Err(FrontendError::InvalidParameter { name: "sigma_g2", value: sigma_g2.as_f64() });
    }
    Ok(z1.re * sigma_g2 / (z_a + z1).norm_sqr())
}

/// Per-entry noise variance of the sufficient statistics, `2 N σ_n² / (P T)`.
pub fn effective_sigma2<T: Real>(sigma_n2: T, n: usize, p: T, t: usize) -> T {
    T::lit(2.0) * T::count(n) * sigma_n2 / (p * T::count(t))
}
