use super::NumericsError;
use crate::scalar::Real;

/// Number of log-spaced probe points in the coarse scan.
pub const COARSE_POINTS: usize = 64;

/// Decades spanned by the coarse scan, measured as offsets from `lo`.
const SCAN_DECADES: f64 = 12.0;
const MAX_GOLDEN_ITERS: usize = 300;
const POLISH_STEPS: usize = 3;

/// Maximises `f` on `[lo, hi]`.
///
/// The objective is probed at `lo` and at 64 points whose offsets from `lo`
/// are log-spaced over twelve decades up to `hi`. Golden-section search then
/// refines between the neighbours of the best probe until the bracket is
/// narrower than `tol` relative to its location. No unimodality is assumed
/// globally, only inside the final bracket. NaN values rank below everything.
///
/// Returns `(x*, f(x*))`, the best point evaluated.
pub fn maximize_scalar<T: Real>(f: impl Fn(T) -> T, lo: T, hi: T, tol: T) -> Result<(T, T), NumericsError> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(NumericsError::BadBracket {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }
    if !(tol > T::zero()) {
        return Err(NumericsError::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let eval = |x: T| {
        let v = f(x);
        if v.is_nan() {
            T::neg_infinity()
        } else {
            v
        }
    };

    let width = hi - lo;
    let mut xs = Vec::with_capacity(COARSE_POINTS + 1);
    xs.push(lo);
    for i in 0..COARSE_POINTS {
        let expo = T::lit(-SCAN_DECADES) + T::lit(SCAN_DECADES) * T::count(i) / T::count(COARSE_POINTS - 1);
        let x = if i + 1 == COARSE_POINTS {
            hi
        } else {
            lo + width * T::lit(10.0).powf(expo)
        };
        xs.push(x);
    }
    let fs: Vec<T> = xs.iter().map(|&x| eval(x)).collect();
    let best = (0..xs.len()).fold(0, |b, i| if fs[i] > fs[b] { i } else { b });

    let mut best_x = xs[best];
    let mut best_f = fs[best];
    let mut a = xs[best.saturating_sub(1)];
    let mut b = xs[(best + 1).min(xs.len() - 1)];
    if !(b > a) {
        return Ok((best_x, best_f));
    }

    let inv_phi = T::lit(0.618_033_988_749_894_9);
    let floor = width * T::lit(10.0).powf(T::lit(-SCAN_DECADES));
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    for _ in 0..MAX_GOLDEN_ITERS {
        if (b - a) <= tol * (a.abs() + b.abs()).max(floor) {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2);
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > best_f {
            best_x = x;
            best_f = v;
        }
    }
    Ok(polish(&eval, best_x, best_f, lo, hi, floor))
}

/// Parabolic steps on central differences. Comparing function values
/// cannot locate a smooth peak better than about `sqrt(eps)`; the
/// difference quotient can.
fn polish<T: Real>(eval: &impl Fn(T) -> T, mut x: T, mut fx: T, lo: T, hi: T, floor: T) -> (T, T) {
    for _ in 0..POLISH_STEPS {
        let h = T::epsilon().cbrt() * x.abs().max(floor.sqrt());
        if !(x - h > lo && x + h < hi) {
            break;
        }
        let fm = eval(x - h);
        let fp = eval(x + h);
        let curv = fp - T::lit(2.0) * fx + fm;
        if !(curv < T::zero()) || !fm.is_finite() || !fp.is_finite() {
            break;
        }
        let step = -h * (fp - fm) / (T::lit(2.0) * curv);
        if !(step.abs() <= h) {
            break;
        }
        let xn = (x + step).max(lo).min(hi);
        let fxn = eval(xn);
        if !fxn.is_finite() || fxn < fx - T::lit(16.0) * T::epsilon() * fx.abs() {
            break;
        }
        x = xn;
        fx = fxn;
    }
    (x, fx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concave_quadratic() {
        let tol = 1e-9;
        let (x, fx) = maximize_scalar(|x: f64| -(x - 3.0).powi(2), 0.0, 10.0, tol).unwrap();
        assert!((x - 3.0).abs() <= 3.0 * tol, "x = {x}");
        let (x, _) = maximize_scalar(|x: f32| -(x - 3.0).powi(2), 0.0, 10.0, 1e-5).unwrap();
        assert!((x - 3.0).abs() <= 3e-5);
        assert!(fx <= 0.0);
    }

    #[test]
    fn decreasing_function_returns_lower_bound() {
        let (x, fx) = maximize_scalar(|x: f64| -x, 0.0, 1.0, 1e-8).unwrap();
        assert_eq!(x, 0.0);
        assert_eq!(fx, 0.0);
    }

    #[test]
    fn increasing_function_returns_upper_bound() {
        let (x, _) = maximize_scalar(|x: f64| x.ln_1p(), 0.0, 5.0, 1e-8).unwrap();
        assert_eq!(x, 5.0);
    }

    #[test]
    fn fast_fading_profile_objective() {
        // η(μ) = μη₁/(μ+σ²) with penalty σ²·L·ln(μ+σ²) peaks at η₁/L − σ²
        let tol = 1e-10;
        for &(eta1, s2, l) in &[(3.0, 0.2, 1usize), (12.5, 0.1, 5), (0.15, 0.2, 1), (40.0, 1.0, 10)] {
            let obj = |mu: f64| mu * eta1 / (mu + s2) - s2 * l as f64 * (mu + s2).ln();
            let (x, _) = maximize_scalar(obj, 0.0, 10.0 * eta1, tol).unwrap();
            let want = (eta1 / l as f64 - s2).max(0.0);
            assert!((x - want).abs() <= 10.0 * tol * want.max(1.0), "x={x} want={want}");
        }
    }

    #[test]
    fn bad_bracket() {
        assert!(matches!(
            maximize_scalar(|x: f64| x, 1.0, 1.0, 1e-6),
            Err(NumericsError::BadBracket { .. })
        ));
        assert!(maximize_scalar(|x: f64| x, 2.0, 1.0, 1e-6).is_err());
    }

    #[test]
    fn nan_values_are_ignored() {
        let (x, _) = maximize_scalar(|x: f64| if x < 1.0 { f64::NAN } else { -(x - 2.0).powi(2) }, 0.0, 4.0, 1e-9).unwrap();
        assert!((x - 2.0).abs() < 1e-6);
    }
}
