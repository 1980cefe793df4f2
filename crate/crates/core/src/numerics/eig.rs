use num_complex::Complex;
use num_traits::{One, Zero};

use super::{ComplexMat, NumericsError};
use crate::scalar::Real;

/// Largest admissible dimension for [`herm_eig_n`].
pub const MAX_EIG_DIM: usize = 512;

const MAX_SWEEPS: usize = 100;

/// Eigensystem of a 2×2 Hermitian matrix, `eta1 ≥ eta2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigSys2<T> {
    pub eta1: T,
    pub eta2: T,
    /// Unit eigenvector `(E₁, E₂)` of `eta1`.
    pub e1: [Complex<T>; 2],
    pub e2: [Complex<T>; 2],
}

/// Eigendecomposition of a 2×2 Hermitian matrix.
pub fn herm_eig2<T: Real>(s: &ComplexMat<T>) -> Result<EigSys2<T>, NumericsError> {
    if s.rows() != 2 || s.cols() != 2 {
        return Err(NumericsError::ShapeMismatch {
            expected: "2x2".into(),
            found: format!("{}x{}", s.rows(), s.cols()),
        });
    }
    s.ensure_hermitian()?;
    Ok(herm_eig2_entries(s[(0, 0)].re, s[(1, 1)].re, s[(0, 1)]))
}

/// Closed-form eigensystem of `[[s11, s12], [conj(s12), s22]]`.
///
/// The leading eigenvector is `(s12, eta1 − s11)` normalised; when that
/// vector vanishes (diagonal input with `s11 ≥ s22`) it falls back to `(1, 0)`.
pub fn herm_eig2_entries<T: Real>(s11: T, s22: T, s12: Complex<T>) -> EigSys2<T> {
    let two = T::lit(2.0);
    let half_gap = (s22 - s11) / two;
    let off = s12.norm_sqr();
    let radius = (half_gap * half_gap + off).sqrt();
    // eta1 - s11 = half_gap + radius, rationalised when half_gap < 0
    let lead = if half_gap >= T::zero() {
        half_gap + radius
    } else if radius > T::zero() {
        off / (radius - half_gap)
    } else {
        T::zero()
    };
    let eta1 = s11 + lead;
    let eta2 = (s11 + s22) / two - radius;

    let nrm = (off + lead * lead).sqrt();
    let e1 = if nrm > T::zero() {
        [s12 / nrm, Complex::new(lead / nrm, T::zero())]
    } else {
        [Complex::one(), Complex::zero()]
    };
    let e2 = [-e1[1].conj(), e1[0].conj()];
    EigSys2 { eta1, eta2, e1, e2 }
}

/// Eigendecomposition `V C V^H = diag(lambdas)` of a Hermitian PSD matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermEig<T> {
    /// Eigenvalues in descending order, tiny negatives clamped to zero.
    pub lambdas: Vec<T>,
    /// Unitary; row `k` is the conjugated eigenvector of `lambdas[k]`.
    pub v: ComplexMat<T>,
}

/// Cyclic Jacobi eigendecomposition of an L×L Hermitian positive
/// semi-definite matrix.
///
/// Negative eigenvalues no larger than `1e-10 · λ_max` in magnitude are
/// clamped to zero; anything more negative is reported as indefinite.
pub fn herm_eig_n<T: Real>(c: &ComplexMat<T>) -> Result<HermEig<T>, NumericsError> {
    c.ensure_hermitian()?;
    let n = c.rows();
    if n > MAX_EIG_DIM {
        return Err(NumericsError::TooLarge { dim: n, max: MAX_EIG_DIM });
    }

    let mut a = c.clone();
    for i in 0..n {
        a[(i, i)] = Complex::new(a[(i, i)].re, T::zero());
    }
    // columns of u are eigenvectors: a = u diag u^H
    let mut u = ComplexMat::<T>::identity(n);
    let total = a.frobenius_sqr();
    let stop = T::epsilon() * T::epsilon() * total;

    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off <= stop || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut a, &mut u, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap());
    let raw: Vec<T> = order.iter().map(|&i| a[(i, i)].re).collect();
    let lambda_max = raw.first().copied().unwrap_or_else(T::zero).max(T::zero());
    let clamp = T::tol(1e-10) * lambda_max;
    let mut lambdas = Vec::with_capacity(n);
    for &l in &raw {
        if l >= T::zero() {
            lambdas.push(l);
        } else if -l <= clamp {
            lambdas.push(T::zero());
        } else {
            return Err(NumericsError::IndefiniteMatrix { eigenvalue: l.as_f64() });
        }
    }
    let v = ComplexMat::from_fn(n, n, |k, j| u[(j, order[k])].conj());
    Ok(HermEig { lambdas, v })
}

/// Zeroes `a[p][q]` with the unitary `G = diag(1, e^{-iφ}) · R(θ)` acting on
/// rows/columns `p, q`, and accumulates `u ← u G`.
fn jacobi_rotate<T: Real>(a: &mut ComplexMat<T>, u: &mut ComplexMat<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == T::zero() {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if r <= T::epsilon() * T::epsilon() * (app.abs() + aqq.abs()) {
        a[(p, q)] = Complex::zero();
        a[(q, p)] = Complex::zero();
        return;
    }
    let phase = apq / r; // e^{iφ}
    let theta = (aqq - app) / (T::lit(2.0) * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
    let t = if theta == T::zero() { T::one() } else { t };
    let cs = T::one() / (t * t + T::one()).sqrt();
    let sn = t * cs;

    let g_pp = Complex::new(cs, T::zero());
    let g_pq = Complex::new(sn, T::zero());
    let g_qp = phase.conj() * (-sn);
    let g_qq = phase.conj() * cs;

    let n = a.rows();
    // a ← a G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    // a ← G^H a
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
    for k in 0..n {
        let ukp = u[(k, p)];
        let ukq = u[(k, q)];
        u[(k, p)] = ukp * g_pp + ukq * g_qp;
        u[(k, q)] = ukp * g_pq + ukq * g_qq;
    }
}
