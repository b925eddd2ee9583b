use super::NumericsError;

/// Outcome of a bracketed root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub root: f64,
    pub iterations: usize,
}

/// Root of a monotone `f` on `[lo, hi]`.
///
/// Stops once `|f(x)| <= tol` or the bracket is narrower than
/// `tol * max(1, |hi|)`. The iteration count never exceeds
/// `ceil(log2((hi - lo) / tol)) + 2`.
pub fn bisect<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> f64,
{
    bisect_counted(f, lo, hi, tol).map(|b| b.root)
}

pub fn bisect_counted<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<Bisection, NumericsError>
where
    F: FnMut(f64) -> f64,
{
    if !(lo <= hi) || !(tol > 0.0) {
        return Err(NumericsError::InvalidArgument("bisect needs lo <= hi and tol > 0"));
    }
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if fa.abs() <= tol {
        return Ok(Bisection { root: a, iterations: 0 });
    }
    if fb.abs() <= tol {
        return Ok(Bisection { root: b, iterations: 0 });
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(NumericsError::NoBracket { lo, hi, f_lo: fa, f_hi: fb });
    }
    let rising = fa < 0.0;
    let width_tol = tol * hi.abs().max(1.0);
    let mut iterations = 0;
    loop {
        let mid = 0.5 * (a + b);
        if b - a <= width_tol {
            return Ok(Bisection { root: mid, iterations });
        }
        iterations += 1;
        let fm = f(mid);
        if fm.abs() <= tol {
            return Ok(Bisection { root: mid, iterations });
        }
        if (fm < 0.0) == rising {
            a = mid;
        } else {
            b = mid;
        }
    }
}

/// Bisection that keeps the endpoint on the feasible side of a nonincreasing
/// constraint function `g` (feasible means `g <= 0`).
///
/// Returns the smallest tested `x` in `[lo, hi]` with `g(x) <= 0`, accurate to
/// a relative bracket width of `rel_tol`. `hi` must be feasible.
pub(crate) fn feasible_edge<G>(mut g: G, lo: f64, hi: f64, rel_tol: f64, max_iter: usize) -> f64
where
    G: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    for _ in 0..max_iter {
        if b - a <= rel_tol * b.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        // Geometric midpoint while the bracket spans decades.
        let mid = if a > 0.0 && b / a > 4.0 { (a * b).sqrt() } else { 0.5 * (a + b) };
        if g(mid) <= 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    b
}

/// Doubles `start` until the nonincreasing `g` becomes feasible (`g <= 0`).
pub(crate) fn grow_until_feasible<G>(mut g: G, start: f64, max_doublings: usize) -> Option<f64>
where
    G: FnMut(f64) -> f64,
{
    let mut x = start;
    for _ in 0..max_doublings {
        if g(x) <= 0.0 {
            return Some(x);
        }
        x *= 2.0;
    }
    None
}
