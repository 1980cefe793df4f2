//! Estimators of the bilinear ratio `F`, the path variance `σ_h²` and the
//! channel matrix `H` from switched-load training statistics.
//!
//! All likelihood-based estimators reduce to the leading eigenvector
//! `(E₁, E₂)` of a 2×2 Hermitian sample matrix: `F̂ = E₂/E₁`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fading::ChannelSpec;
use crate::frontend::{recover_za, FrontendError};
use crate::numerics::{herm_eig2_entries, maximize_scalar, ComplexMat, NumericsError};
use crate::scalar::Real;
use crate::signalpath::SufficientStats;

/// `|S₁₂| ≤ DEGENERACY_RATIO · (S₁₁ + S₂₂)` means `E₁ = 0` to working precision.
pub const DEGENERACY_RATIO: f64 = 1e-14;
/// Upper end of the `μ` search as a multiple of `T₁₁ + T₂₂`.
pub const MU_BRACKET_FACTOR: f64 = 10.0;
pub const MU_TOLERANCE: f64 = 1e-12;
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    /// Single-packet maximum likelihood.
    #[serde(rename = "ML1")]
    Ml1,
    /// Multi-packet maximum likelihood for a known temporal correlation.
    #[serde(rename = "ML_MP")]
    MlMp,
    /// Multi-packet maximum likelihood assuming independent packets.
    #[serde(rename = "ML_FF")]
    MlFf,
    /// Method of moments (ratio only).
    #[serde(rename = "MM")]
    Mm,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Ml1, Method::MlMp, Method::MlFf, Method::Mm];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Ml1 => "ML1",
            Method::MlMp => "ML_MP",
            Method::MlFf => "ML_FF",
            Method::Mm => "MM",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = EstimateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| EstimateError::UnknownMethod(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("{method}: degenerate statistics (|off-diagonal| = {off_diagonal:.3e}, trace = {trace:.3e}); F is not identifiable")]
    Degenerate { method: Method, off_diagonal: f64, trace: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("{0} requires a single packet (L = 1), got L = {1}")]
    RequiresSinglePacket(Method, usize),
    #[error("{0} requires the channel correlation")]
    MissingCorrelation(Method),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("singular MMSE system (condition number {condition:.3e})")]
    SingularSystem { condition: f64 },
    #[error("unknown estimator '{0}' (expected ML1, ML_MP, ML_FF or MM)")]
    UnknownMethod(String),
    #[error("scalar search failed: {0}")]
    OptimizerFailure(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport<T: Real> {
    pub f_hat: Complex<T>,
    /// Absent for the method of moments.
    pub sigma_h2_hat: Option<T>,
    /// `σ̂_h² (1 + |F̂|²)`.
    pub mu_hat: Option<T>,
    pub z_a_hat: Option<Complex<T>>,
    pub method: Method,
    /// Set when the variance estimate was clamped to zero, leaving `F̂`
    /// without likelihood support.
    pub degenerate: bool,
}

impl<T: Real> EstimateReport<T> {
    /// Adds the antenna impedance implied by `F̂` for the given loads.
    pub fn with_impedances(mut self, z1: Complex<T>, z2: Complex<T>) -> Result<Self, FrontendError> {
        self.z_a_hat = Some(recover_za(self.f_hat, z1, z2)?);
        Ok(self)
    }
}

/// Hermitian 2×2 matrix stored as `(s11, s22, s12)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Herm2<T> {
    pub s11: T,
    pub s22: T,
    pub s12: Complex<T>,
}

impl<T: Real> Herm2<T> {
    pub fn zero() -> Self {
        Self {
            s11: T::zero(),
            s22: T::zero(),
            s12: Complex::new(T::zero(), T::zero()),
        }
    }

    pub fn to_mat(self) -> ComplexMat<T> {
        let z = |x: T| Complex::new(x, T::zero());
        ComplexMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => z(self.s11),
            (1, 1) => z(self.s22),
            (0, 1) => self.s12,
            _ => self.s12.conj(),
        })
    }

    fn add_scaled(&mut self, w: T, o: &Self) {
        self.s11 += w * o.s11;
        self.s22 += w * o.s22;
        self.s12 += o.s12 * w;
    }

    /// `u^H S u`.
    pub fn quadratic_form(&self, u: [Complex<T>; 2]) -> T {
        self.s11 * u[0].norm_sqr() + self.s22 * u[1].norm_sqr() + T::lit(2.0) * (u[0].conj() * self.s12 * u[1]).re
    }

    fn check_identifiable(&self, method: Method) -> Result<(), EstimateError> {
        let trace = self.s11 + self.s22;
        let off = self.s12.norm();
        if !(off > T::lit(DEGENERACY_RATIO) * trace) {
            return Err(EstimateError::Degenerate {
                method,
                off_diagonal: off.as_f64(),
                trace: trace.as_f64(),
            });
        }
        Ok(())
    }

    /// Leading eigenvalue and the ratio `E₂/E₁` of its eigenvector.
    fn leading(&self) -> (T, Complex<T>) {
        let es = herm_eig2_entries(self.s11, self.s22, self.s12);
        (es.eta1, es.e1[1] / es.e1[0])
    }
}

/// Single-packet sample covariance of `(y1, y2)`; `s12 = y2^H y1 / N`.
pub fn sample_covariance<T: Real>(y1: &[Complex<T>], y2: &[Complex<T>]) -> Result<Herm2<T>, EstimateError> {
    if y1.len() != y2.len() || y1.is_empty() {
        return Err(EstimateError::ShapeMismatch(format!(
            "y1 has {} entries, y2 has {}",
            y1.len(),
            y2.len()
        )));
    }
    let n = T::count(y1.len());
    let s11 = y1.iter().map(|z| z.norm_sqr()).sum::<T>() / n;
    let s22 = y2.iter().map(|z| z.norm_sqr()).sum::<T>() / n;
    let s12 = y1
        .iter()
        .zip(y2)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + b.conj() * a)
        / n;
    Ok(Herm2 { s11, s22, s12 })
}

/// `T_ij = Tr[Y_i Y_j^H] / N`.
pub fn build_t<T: Real>(stats: &SufficientStats<T>) -> ComplexMat<T> {
    t_entries(stats).to_mat()
}

fn t_entries<T: Real>(stats: &SufficientStats<T>) -> Herm2<T> {
    let n = T::count(stats.n());
    Herm2 {
        s11: stats.y1().frobenius_sqr() / n,
        s22: stats.y2().frobenius_sqr() / n,
        s12: stats.y1().trace_mul_adjoint(stats.y2()) / n,
    }
}

/// Closed form shared by the single-packet and independent-packet
/// estimators: `μ̂ = max(η₁/L − σ², 0)`, `σ̂_h² = μ̂ / (1 + |F̂|²)`.
fn closed_form<T: Real>(s: &Herm2<T>, sigma2: T, l: usize, method: Method) -> Result<EstimateReport<T>, EstimateError> {
    s.check_identifiable(method)?;
    let (eta1, f_hat) = s.leading();
    let mu = (eta1 / T::count(l) - sigma2).max(T::zero());
    Ok(EstimateReport {
        f_hat,
        sigma_h2_hat: Some(mu / (T::one() + f_hat.norm_sqr())),
        mu_hat: Some(mu),
        z_a_hat: None,
        method,
        degenerate: mu == T::zero(),
    })
}

fn check_sigma2<T: Real>(sigma2: T) -> Result<(), EstimateError> {
    if sigma2 >= T::zero() && sigma2.is_finite() {
        Ok(())
    } else {
        Err(EstimateError::InvalidInput(format!("noise variance must be >= 0, got {sigma2}")))
    }
}

/// Maximum-likelihood `(F, σ_h²)` from one packet.
pub fn ml_single_packet<T: Real>(
    y1: &[Complex<T>],
    y2: &[Complex<T>],
    sigma2: T,
) -> Result<EstimateReport<T>, EstimateError> {
    check_sigma2(sigma2)?;
    closed_form(&sample_covariance(y1, y2)?, sigma2, 1, Method::Ml1)
}

/// Maximum likelihood when packets fade independently (`C_H = I`).
pub fn ml_fast_fading<T: Real>(stats: &SufficientStats<T>) -> Result<EstimateReport<T>, EstimateError> {
    closed_form(&t_entries(stats), stats.sigma2(), stats.l(), Method::MlFf)
}

/// Method-of-moments ratio estimate; valid for any temporal correlation.
pub fn mm_estimator<T: Real>(stats: &SufficientStats<T>) -> Result<EstimateReport<T>, EstimateError> {
    let t = t_entries(stats);
    t.check_identifiable(Method::Mm)?;
    let (_, f_hat) = t.leading();
    Ok(EstimateReport {
        f_hat,
        sigma_h2_hat: None,
        mu_hat: None,
        z_a_hat: None,
        method: Method::Mm,
        degenerate: false,
    })
}

/// Moment estimate of `σ_h²` given a ratio estimate: since `Tr C_H = L`,
/// `E[η₁(T)] ≈ L μ + σ²` holds for every correlation.
pub fn moment_sigma_h2<T: Real>(stats: &SufficientStats<T>, f_hat: Complex<T>) -> T {
    let (eta1, _) = t_entries(stats).leading();
    (eta1 / T::count(stats.l()) - stats.sigma2()).max(T::zero()) / (T::one() + f_hat.norm_sqr())
}

/// Sufficient statistics projected on the eigenmodes of `C_H`.
#[derive(Debug, Clone)]
pub struct ModeStats<T> {
    pub lambdas: Vec<T>,
    /// `S_k(i, j) = [V Y_i Y_j^H V^H]_kk / N`.
    pub modes: Vec<Herm2<T>>,
    pub sigma2: T,
}

impl<T: Real> ModeStats<T> {
    pub fn new(stats: &SufficientStats<T>, spec: &ChannelSpec<T>) -> Result<Self, EstimateError> {
        if spec.l() != stats.l() {
            return Err(EstimateError::ShapeMismatch(format!(
                "correlation is {}x{} but statistics have L = {}",
                spec.l(),
                spec.l(),
                stats.l()
            )));
        }
        let v = &spec.eig().v;
        let w1 = v.matmul(stats.y1());
        let w2 = v.matmul(stats.y2());
        let n = T::count(stats.n());
        let modes = (0..stats.l())
            .map(|k| {
                let (a, b) = (w1.row(k), w2.row(k));
                Herm2 {
                    s11: a.iter().map(|z| z.norm_sqr()).sum::<T>() / n,
                    s22: b.iter().map(|z| z.norm_sqr()).sum::<T>() / n,
                    s12: a
                        .iter()
                        .zip(b)
                        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x * y.conj())
                        / n,
                }
            })
            .collect();
        Ok(Self {
            lambdas: spec.lambdas().to_vec(),
            modes,
            sigma2: stats.sigma2(),
        })
    }

    /// `Σ_k w_k S_k`.
    pub fn weighted(&self, weight: impl Fn(T) -> T) -> Herm2<T> {
        let mut s = Herm2::zero();
        for (lam, m) in self.lambdas.iter().zip(&self.modes) {
            s.add_scaled(weight(*lam), m);
        }
        s
    }

    /// `S(μ) = Σ_k μλ_k/(μλ_k + σ²) S_k`.
    pub fn s_of_mu(&self, mu: T) -> Herm2<T> {
        let s2 = self.sigma2;
        self.weighted(|lam| {
            let num = mu * lam;
            if num == T::zero() {
                T::zero()
            } else {
                num / (num + s2)
            }
        })
    }

    fn log_penalty(&self, mu: T) -> T {
        self.sigma2 * self.lambdas.iter().map(|&lam| (mu * lam + self.sigma2).ln()).sum::<T>()
    }

    /// Scaled log-likelihood (constants dropped) at `μ` and unit vector `u`:
    /// `u^H S(μ) u − σ² Σ_k ln(μλ_k + σ²)`.
    pub fn objective(&self, mu: T, u: [Complex<T>; 2]) -> T {
        self.s_of_mu(mu).quadratic_form(u) - self.log_penalty(mu)
    }

    /// The objective maximised over `u`: `η₁(S(μ)) − σ² Σ_k ln(μλ_k + σ²)`.
    pub fn profile(&self, mu: T) -> T {
        self.s_of_mu(mu).leading().0 - self.log_penalty(mu)
    }
}

/// Maximum likelihood for a known temporal correlation `C_H`.
pub fn ml_multi_packet<T: Real>(
    stats: &SufficientStats<T>,
    spec: &ChannelSpec<T>,
) -> Result<EstimateReport<T>, EstimateError> {
    let method = Method::MlMp;
    let t = t_entries(stats);
    t.check_identifiable(method)?;
    let ms = ModeStats::new(stats, spec)?;
    let (s, mu) = if ms.sigma2 == T::zero() {
        noiseless_multi_packet(&ms)
    } else {
        let hi = T::lit(MU_BRACKET_FACTOR) * (t.s11 + t.s22);
        let (mu, _) = maximize_scalar(|mu| ms.profile(mu), T::zero(), hi, T::tol(MU_TOLERANCE))?;
        if mu > T::zero() {
            (ms.s_of_mu(mu), mu)
        } else {
            // direction of S(μ)/μ as μ → 0⁺
            (ms.weighted(|lam| lam), T::zero())
        }
    };
    s.check_identifiable(method)?;
    let (_, f_hat) = s.leading();
    Ok(EstimateReport {
        f_hat,
        sigma_h2_hat: Some(mu / (T::one() + f_hat.norm_sqr())),
        mu_hat: Some(mu),
        z_a_hat: None,
        method,
        degenerate: mu == T::zero(),
    })
}

fn noiseless_multi_packet<T: Real>(ms: &ModeStats<T>) -> (Herm2<T>, T) {
    let s = ms.weighted(|lam| if lam > T::zero() { T::one() } else { T::zero() });
    let es = herm_eig2_entries(s.s11, s.s22, s.s12);
    let (sum, count) = ms
        .lambdas
        .iter()
        .zip(&ms.modes)
        .filter(|(lam, _)| **lam > T::zero())
        .fold((T::zero(), 0usize), |(acc, c), (lam, m)| (acc + m.quadratic_form(es.e1) / *lam, c + 1));
    let mu = if count > 0 { sum / T::count(count) } else { T::zero() };
    (s, mu)
}

/// Runs `method`; `spec` is required for [`Method::MlMp`].
pub fn estimate<T: Real>(
    stats: &SufficientStats<T>,
    method: Method,
    spec: Option<&ChannelSpec<T>>,
) -> Result<EstimateReport<T>, EstimateError> {
    match method {
        Method::Ml1 => {
            if stats.l() != 1 {
                return Err(EstimateError::RequiresSinglePacket(method, stats.l()));
            }
            ml_single_packet(stats.y1().row(0), stats.y2().row(0), stats.sigma2())
        }
        Method::MlFf => ml_fast_fading(stats),
        Method::Mm => mm_estimator(stats),
        Method::MlMp => ml_multi_packet(stats, spec.ok_or(EstimateError::MissingCorrelation(method))?),
    }
}

/// Linear MMSE estimate of `H` given `F` and `σ_h²`:
/// `[(1 + |F|²) C_H + (σ²/σ_h²) I]⁻¹ C_H (Y1 + F* Y2)`.
pub fn mmse_channel<T: Real>(
    stats: &SufficientStats<T>,
    f: Complex<T>,
    sigma_h2: T,
    spec: &ChannelSpec<T>,
) -> Result<ComplexMat<T>, EstimateError> {
    if spec.l() != stats.l() {
        return Err(EstimateError::ShapeMismatch(format!(
            "correlation is {}x{} but statistics have L = {}",
            spec.l(),
            spec.l(),
            stats.l()
        )));
    }
    if !(sigma_h2 >= T::zero()) || !sigma_h2.is_finite() {
        return Err(EstimateError::InvalidInput(format!("sigma_h2 must be >= 0, got {sigma_h2}")));
    }
    let (l, n) = (stats.l(), stats.n());
    if sigma_h2 == T::zero() {
        return Ok(ComplexMat::zeros(l, n));
    }
    let a = T::one() + f.norm_sqr();
    let r = stats.sigma2() / sigma_h2;
    let lambdas = spec.lambdas();
    let lo = a * lambdas[l - 1] + r;
    let hi = a * lambdas[0] + r;
    let condition = hi / lo;
    if !(condition <= T::lit(MAX_CONDITION)) {
        return Err(EstimateError::SingularSystem {
            condition: condition.as_f64(),
        });
    }
    let z = stats.y1() + &stats.y2().scale(f.conj());
    let v = &spec.eig().v;
    let mut w = v.matmul(&z);
    for (k, &lam) in lambdas.iter().enumerate() {
        let g = lam / (a * lam + r);
        for x in w.row_mut(k) {
            *x *= g;
        }
    }
    Ok(v.adjoint().matmul(&w))
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    #[test]
    fn method_tags_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.tag().parse::<Method>().unwrap(), m);
        }
        assert_eq!("ml_mp".parse::<Method>().unwrap(), Method::MlMp);
        assert!("MAP".parse::<Method>().is_err());
    }

    #[test]
    fn rank_one_exact() {
        let f = C::new(0.9646, -0.1032);
        let y1 = [C::new(0.3, -1.2), C::new(-0.7, 0.1), C::new(1.1, 0.4), C::new(0.05, 0.9)];
        let y2: Vec<C> = y1.iter().map(|y| f * y).collect();
        let r = ml_single_packet(&y1, &y2, 0.0).unwrap();
        assert!((r.f_hat - f).norm() < 1e-12);
        let h2: f64 = y1.iter().map(|z| z.norm_sqr()).sum::<f64>() / 4.0;
        assert!((r.sigma_h2_hat.unwrap() - h2).abs() < 1e-12);
    }

    #[test]
    fn low_power_clamps_to_zero() {
        let y1 = [C::new(1e-3, 0.0), C::new(0.0, 2e-3)];
        let y2 = [C::new(0.0, 1e-3), C::new(1e-3, 1e-3)];
        let r = ml_single_packet(&y1, &y2, 1.0).unwrap();
        assert_eq!(r.sigma_h2_hat, Some(0.0));
        assert!(r.degenerate);
    }

    #[test]
    fn orthogonal_blocks_are_degenerate() {
        let y1 = [C::new(1.0, 0.0), C::new(0.0, 0.0)];
        let y2 = [C::new(0.0, 0.0), C::new(1.0, 0.0)];
        assert!(matches!(ml_single_packet(&y1, &y2, 0.1), Err(EstimateError::Degenerate { .. })));
        assert!(matches!(ml_single_packet(&[C::new(0.0, 0.0)], &[C::new(0.0, 0.0)], 0.1), Err(EstimateError::Degenerate { .. })));
    }

    #[test]
    fn t_matrix_basics() {
        let y = ComplexMat::from_fn(3, 2, |i, j| C::new(i as f64 - 1.0, j as f64 + 0.5));
        let st = SufficientStats::new(y.clone(), y, 0.1).unwrap();
        let t = build_t(&st);
        assert_eq!(t[(0, 0)], t[(1, 1)]);
        assert_eq!(t[(0, 1)], t[(0, 0)]);
        let zero = SufficientStats::new(ComplexMat::<f64>::zeros(2, 2), ComplexMat::zeros(2, 2), 0.1).unwrap();
        assert_eq!(build_t(&zero).max_abs(), 0.0);
    }

    #[test]
    fn single_packet_t_equals_sample_covariance() {
        let y1 = vec![C::new(0.3, -1.2), C::new(-0.7, 0.1)];
        let y2 = vec![C::new(0.2, 0.5), C::new(1.7, -0.3)];
        let s = sample_covariance(&y1, &y2).unwrap();
        let st = SufficientStats::new(
            ComplexMat::from_rows(std::slice::from_ref(&y1)).unwrap(),
            ComplexMat::from_rows(std::slice::from_ref(&y2)).unwrap(),
            0.2,
        )
        .unwrap();
        let t = build_t(&st);
        assert_eq!(t[(0, 1)], s.s12);
        let a = ml_single_packet(&y1, &y2, 0.2).unwrap();
        let b = ml_fast_fading(&st).unwrap();
        assert_eq!(a.f_hat, b.f_hat);
        assert_eq!(a.sigma_h2_hat, b.sigma_h2_hat);
    }

    #[test]
    fn impedance_attached() {
        let r = EstimateReport {
            f_hat: C::new(0.964_571_501_75, -0.103_227_830_61),
            sigma_h2_hat: None,
            mu_hat: None,
            z_a_hat: None,
            method: Method::Mm,
            degenerate: false,
        }
        .with_impedances(C::new(50.0, 0.0), C::new(60.0, 20.0))
        .unwrap();
        assert!((r.z_a_hat.unwrap() - C::new(73.0, 42.5)).norm() < 1e-6);
    }

    #[test]
    fn ml1_needs_one_packet() {
        let st = SufficientStats::new(ComplexMat::<f64>::identity(2), ComplexMat::identity(2), 0.1).unwrap();
        assert!(matches!(estimate(&st, Method::Ml1, None), Err(EstimateError::RequiresSinglePacket(..))));
        assert!(matches!(estimate(&st, Method::MlMp, None), Err(EstimateError::MissingCorrelation(_))));
    }
}
