//! Reference computations shared by the integration suites. Nothing here
//! calls into the estimators under test.

#![allow(dead_code)]

use impedance_core::scalar::complex_gaussian;
use impedance_core::Cplx;
use rand::Rng;

/// Per-antenna sample covariance of the stacked pair `[y1_i, y2_i]`.
pub struct PairCovariance {
    pub s11: f64,
    pub s22: f64,
    /// Mean of `y1_i conj(y2_i)`.
    pub s12: Cplx,
}

impl PairCovariance {
    pub fn from_samples(y1: &[Cplx], y2: &[Cplx]) -> Self {
        let n = y1.len() as f64;
        Self {
            s11: y1.iter().map(|z| z.norm_sqr()).sum::<f64>() / n,
            s22: y2.iter().map(|z| z.norm_sqr()).sum::<f64>() / n,
            s12: y1.iter().zip(y2).map(|(a, b)| a * b.conj()).sum::<Cplx>() / n,
        }
    }

    /// Mean log-likelihood per antenna (constants dropped) of
    /// `[y1; y2] ~ CN(0, s [1; F][1; F]^H + σ² I)`.
    pub fn log_likelihood(&self, f: Cplx, s: f64, sigma2: f64) -> f64 {
        let r11 = s + sigma2;
        let r22 = s * f.norm_sqr() + sigma2;
        let r12 = f.conj() * s;
        let det = r11 * r22 - r12.norm_sqr();
        let quad = (r22 * self.s11 + r11 * self.s22 - 2.0 * (r12 * self.s12.conj()).re) / det;
        -det.ln() - quad
    }
}

/// Golden-section maximum of a unimodal `f` on `[lo, hi]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..iters {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Brute-force maximum likelihood over `(F, s)` by a zooming grid on the
/// complex plane, profiling `s` numerically at each grid point.
pub fn brute_force_ml(cov: &PairCovariance, sigma2: f64) -> (Cplx, f64) {
    let s_hi = 10.0 * (cov.s11 + cov.s22);
    let profile = |f: Cplx| golden_max(|s| cov.log_likelihood(f, s, sigma2), 0.0, s_hi, 90);
    let mut center = Cplx::new(0.0, 0.0);
    let mut half = 6.0;
    const STEPS: i32 = 12;
    while half > 1e-8 {
        let mut best = (f64::NEG_INFINITY, center);
        for i in -STEPS..=STEPS {
            for j in -STEPS..=STEPS {
                let f = center + Cplx::new(i as f64, j as f64) * (half / STEPS as f64);
                let (_, v) = profile(f);
                if v > best.0 {
                    best = (v, f);
                }
            }
        }
        center = best.1;
        half /= 4.0;
    }
    (center, profile(center).0)
}

/// `n` draws of `CN(0, variance)`.
pub fn gaussian_vec<R: Rng>(rng: &mut R, n: usize, variance: f64) -> Vec<Cplx> {
    (0..n).map(|_| complex_gaussian(rng, variance)).collect()
}

/// Mean and standard error of a sample.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Composite Simpson rule with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}
