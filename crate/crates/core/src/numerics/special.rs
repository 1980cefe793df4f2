//! Bessel J0 and exponential integrals E_n.

use super::NumericsError;
use crate::scalar::Real;

const J0_SERIES_LIMIT: f64 = 12.0;
const E1_SERIES_LIMIT: f64 = 4.0;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const MAX_TERMS: usize = 500;

/// Bessel function of the first kind, order zero.
///
/// Ascending power series for `|x| ≤ 12`, Hankel asymptotic expansion beyond.
pub fn bessel_j0<T: Real>(x: T) -> T {
    let ax = x.abs();
    if ax <= T::lit(J0_SERIES_LIMIT) {
        j0_series(ax)
    } else {
        j0_asymptotic(ax)
    }
}

fn j0_series<T: Real>(x: T) -> T {
    let q = -(x * x) / T::lit(4.0);
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..MAX_TERMS {
        let kf = T::count(k);
        term *= q / (kf * kf);
        sum += term;
        if term.abs() <= T::epsilon() * sum.abs().max(T::epsilon()) {
            break;
        }
    }
    sum
}

fn j0_asymptotic<T: Real>(x: T) -> T {
    // P ~ Σ (-1)^k a_{2k} x^{-2k}, Q ~ Σ (-1)^k a_{2k+1} x^{-(2k+1)},
    // a_k = Π_{j=1..k} (2j-1)² / (k! 8^k). Terms are summed while decreasing.
    let mut p = T::one();
    let mut q = T::zero();
    let mut term = T::one();
    let mut last = T::infinity();
    for k in 1..MAX_TERMS {
        let odd = T::count(2 * k - 1);
        term = term * odd * odd / (T::count(k) * T::lit(8.0) * x);
        if term.abs() >= last {
            break;
        }
        last = term.abs();
        // Q = −a1 + a3 − ..., P = 1 − a2 + a4 − ...
        match k % 4 {
            1 => q -= term,
            2 => p -= term,
            3 => q += term,
            _ => p += term,
        }
        if term.abs() <= T::epsilon() {
            break;
        }
    }
    let chi = x - T::FRAC_PI_4();
    (T::lit(2.0) / (T::PI() * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// `E_1(a)` for `a > 0`.
pub fn expint_e1<T: Real>(a: T) -> Result<T, NumericsError> {
    check_expint_domain(1, a)?;
    if a < T::lit(E1_SERIES_LIMIT) {
        Ok(e1_series(a))
    } else {
        Ok(en_scaled_continued_fraction(1, a) * (-a).exp())
    }
}

/// Exponential integral `E_n(a) = ∫₁^∞ e^{−at} t^{−n} dt` for `n ≥ 1`, `a > 0`.
///
/// `E_1` comes from its series (`a < 4`) or continued fraction; every higher
/// order is produced by the upward recursion
/// `E_n(a) = [e^{−a} − a E_{n−1}(a)] / (n − 1)`.
pub fn expint_en<T: Real>(n: usize, a: T) -> Result<T, NumericsError> {
    check_expint_domain(n, a)?;
    let ea = (-a).exp();
    let mut e = expint_e1(a)?;
    for k in 2..=n {
        e = (ea - a * e) / T::count(k - 1);
    }
    Ok(e)
}

/// `e^{a} E_k(a)` for `k = 1..=n`, computed without forming `e^{−a}`.
///
/// Small arguments use the scaled upward recursion
/// `s_k = (1 − a s_{k−1}) / (k − 1)`; from `a ≥ 4` on each order comes from
/// its own continued fraction, since the recursion cancels badly there.
pub fn expint_scaled_all<T: Real>(n: usize, a: T) -> Result<Vec<T>, NumericsError> {
    check_expint_domain(n, a)?;
    if a >= T::lit(E1_SERIES_LIMIT) {
        return Ok((1..=n).map(|k| en_scaled_continued_fraction(k, a)).collect());
    }
    let mut out = Vec::with_capacity(n);
    out.push(e1_series(a) * a.exp());
    for k in 2..=n {
        let prev = out[k - 2];
        out.push((T::one() - a * prev) / T::count(k - 1));
    }
    Ok(out)
}

fn check_expint_domain<T: Real>(n: usize, a: T) -> Result<(), NumericsError> {
    if n == 0 {
        return Err(NumericsError::Domain(format!("exponential integral order must be >= 1, got {n}")));
    }
    if !(a > T::zero()) || !a.is_finite() {
        return Err(NumericsError::Domain(format!("exponential integral argument must be > 0, got {a}")));
    }
    Ok(())
}

fn e1_series<T: Real>(a: T) -> T {
    // E1(a) = −γ − ln a − Σ_{k≥1} (−a)^k / (k·k!)
    let mut pow_fact = T::one();
    let mut sum = T::zero();
    for k in 1..MAX_TERMS {
        let kf = T::count(k);
        pow_fact *= -a / kf;
        let term = pow_fact / kf;
        sum += term;
        if term.abs() <= T::epsilon() * sum.abs() {
            break;
        }
    }
    -T::lit(EULER_GAMMA) - a.ln() - sum
}

/// `e^{a} E_n(a)` by the modified Lentz continued fraction.
fn en_scaled_continued_fraction<T: Real>(n: usize, a: T) -> T {
    let tiny = T::min_positive_value().sqrt();
    let mut b = a + T::count(n);
    let mut c = T::one() / tiny;
    let mut d = T::one() / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let an = -T::count(i * (n - 1 + i));
        b += T::lit(2.0);
        d = T::one() / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    h
}
