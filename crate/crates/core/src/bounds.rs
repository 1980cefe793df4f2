//! Fisher information, Cramér-Rao bounds, effective SNR and the ergodic
//! capacity lower bound under imperfect channel knowledge.

use num_complex::Complex;
use thiserror::Error;

use crate::fading::ChannelSpec;
use crate::numerics::{expint_scaled_all, ComplexMat, NumericsError};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("Fisher information is singular")]
    SingularFim,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

fn positive<T: Real>(name: &str, v: T) -> Result<(), BoundError> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(BoundError::Domain(format!("{name} must be positive, got {v}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<T> {
    /// Bound on `E|F̂ − F|²`.
    pub crb_f: T,
    pub crb_sigma_h2: T,
    pub fim: ComplexMat<T>,
}

impl<T: Real> BoundReport<T> {
    /// `sqrt(crb_F) / |F|`.
    pub fn crb_f_rel(&self, f: Complex<T>) -> T {
        self.crb_f.sqrt() / f.norm()
    }

    /// `sqrt(crb_σh²) / σ_h²`.
    pub fn crb_sigma_h2_rel(&self, sigma_h2: T) -> T {
        self.crb_sigma_h2.sqrt() / sigma_h2
    }
}

/// Fisher information for `θ = [F, σ_h²]` from `N` antennas observed over
/// packets whose correlation has eigenvalues `lambdas`.
pub fn fim_multi<T: Real>(
    f: Complex<T>,
    sigma_h2: T,
    sigma2: T,
    n: usize,
    lambdas: &[T],
) -> Result<ComplexMat<T>, BoundError> {
    if !(sigma_h2 >= T::zero()) || !sigma_h2.is_finite() {
        return Err(BoundError::Domain(format!("sigma_h2 must be >= 0, got {sigma_h2}")));
    }
    positive("sigma2", sigma2)?;
    if n == 0 || lambdas.is_empty() {
        return Err(BoundError::Domain("need at least one antenna and one packet".into()));
    }
    let a = T::one() + f.norm_sqr();
    let s4 = sigma_h2 * sigma_h2;
    let mut m11 = T::zero();
    let mut scale = T::zero();
    for &lam in lambdas {
        if lam < T::zero() {
            return Err(BoundError::Domain(format!("negative eigenvalue {lam}")));
        }
        let d = lam * sigma_h2 * a + sigma2;
        let w = lam * lam / (d * d);
        m11 += w * s4 * (lam * sigma_h2 / sigma2 + T::one());
        scale += w;
    }
    let pre = T::count(n) * a;
    let z = |x: T| Complex::new(x, T::zero());
    Ok(ComplexMat::from_rows(&[
        vec![z(pre * m11), f * (pre * scale * sigma_h2)],
        vec![f.conj() * (pre * scale * sigma_h2), z(pre * scale * a)],
    ])?)
}

/// Cramér-Rao bounds from the inverse of [`fim_multi`].
pub fn crb<T: Real>(
    f: Complex<T>,
    sigma_h2: T,
    sigma2: T,
    n: usize,
    lambdas: &[T],
) -> Result<BoundReport<T>, BoundError> {
    let fim = fim_multi(f, sigma_h2, sigma2, n, lambdas)?;
    let (p, q, r) = (fim[(0, 0)].re, fim[(0, 1)], fim[(1, 1)].re);
    let det = p * r - q.norm_sqr();
    if !(det > T::epsilon() * p * r) {
        return Err(BoundError::SingularFim);
    }
    Ok(BoundReport {
        crb_f: r / det,
        crb_sigma_h2: p / det,
        fim,
    })
}

/// `(CRB_F, CRB_σh²)` for `l` independent packets in closed form.
pub fn crb_iid_closed_form<T: Real>(f: Complex<T>, sigma_h2: T, sigma2: T, n: usize, l: usize) -> (T, T) {
    let a = T::one() + f.norm_sqr();
    let nl = T::count(n * l);
    let crb_f = (sigma2 * sigma_h2 * a + sigma2 * sigma2) / (nl * sigma_h2 * sigma_h2);
    let crb_s = (sigma_h2 * a + sigma2) * (sigma_h2 + sigma2) / (nl * a);
    (crb_f, crb_s)
}

/// Per-entry MSE bound for estimating `H` with known `F`:
/// `(1/L) Σ_k σ_h² λ_k / (σ_h² (1 + |F|²) λ_k / σ² + 1)`.
pub fn bayesian_crb_h<T: Real>(f: Complex<T>, sigma_h2: T, sigma2: T, spec: &ChannelSpec<T>) -> Result<T, BoundError> {
    if !(sigma_h2 >= T::zero()) || !sigma_h2.is_finite() {
        return Err(BoundError::Domain(format!("sigma_h2 must be >= 0, got {sigma_h2}")));
    }
    positive("sigma2", sigma2)?;
    let a = T::one() + f.norm_sqr();
    let sum: T = spec
        .lambdas()
        .iter()
        .map(|&lam| sigma_h2 * lam / (sigma_h2 * a * lam / sigma2 + T::one()))
        .sum();
    Ok(sum / T::count(spec.l()))
}

/// `γ / (1 + (1 + 1/γ) N/T)`.
pub fn gamma_eff<T: Real>(gamma: T, n: usize, t: usize) -> Result<T, BoundError> {
    positive("gamma", gamma)?;
    if t == 0 {
        return Err(BoundError::Domain("training length must be positive".into()));
    }
    let r = T::count(n) / T::count(t);
    Ok(gamma / (T::one() + (T::one() + T::one() / gamma) * r))
}

/// MMSE of one path coefficient after training: `σ_h² σ_n² / (σ_n² + T P σ_h² / N)`.
pub fn mmse_j1<T: Real>(sigma_h2: T, sigma_n2: T, n: usize, t: usize, p: T) -> T {
    sigma_h2 * sigma_n2 / (sigma_n2 + T::count(t) * p * sigma_h2 / T::count(n))
}

/// `log₂(e) Σ_{k=1..N} e^{a} E_k(a)` with `a = N / γ_eff`.
pub fn capacity_lb<T: Real>(gamma_eff: T, n: usize) -> Result<T, BoundError> {
    positive("gamma_eff", gamma_eff)?;
    if n == 0 {
        return Err(BoundError::Domain("N must be >= 1".into()));
    }
    let a = T::count(n) / gamma_eff;
    let s: T = expint_scaled_all(n, a)?.into_iter().sum();
    Ok(T::LOG2_E() * s)
}

/// Four-antenna expression
/// `(log₂e / 2)[(x − 1)² + 8/3 + τ(x) eˣ E₁(x)]`, `τ(x) = 2 − x(2 + x² − x)`,
/// `x = 4/γ_eff`. It does not agree with [`capacity_lb`]; kept for comparison.
pub fn capacity_lb_tau_form_n4<T: Real>(gamma_eff: T) -> Result<T, BoundError> {
    positive("gamma_eff", gamma_eff)?;
    let x = T::lit(4.0) / gamma_eff;
    let tau = T::lit(2.0) - x * (T::lit(2.0) + x * x - x);
    let e1_scaled = expint_scaled_all(1, x)?[0];
    Ok(T::LOG2_E() / T::lit(2.0) * ((x - T::one()).powi(2) + T::lit(8.0 / 3.0) + tau * e1_scaled))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityPoint<T> {
    pub gamma: T,
    pub gamma_eff: T,
    pub c_lb: T,
    /// Monte Carlo estimate, when one was run.
    pub c_mc: Option<T>,
    pub matched: bool,
    pub j1: Option<T>,
}

/// Capacity bound when the delivered power is a fraction `m` of the matched
/// power and the matched SNR is `gamma`.
pub fn capacity_at_mismatch<T: Real>(gamma: T, m: T, n: usize, t: usize) -> Result<CapacityPoint<T>, BoundError> {
    positive("mismatch factor", m)?;
    let ge = gamma_eff(gamma * m, n, t)?;
    Ok(CapacityPoint {
        gamma: gamma * m,
        gamma_eff: ge,
        c_lb: capacity_lb(ge, n)?,
        c_mc: None,
        matched: m == T::one(),
        j1: None,
    })
}
