//! Scalar root finding: bisection and real roots of a polynomial on a window.

/// Ascending-coefficient polynomial value.
#[inline]
pub fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}

/// Value and first derivative.
#[inline]
pub fn horner_d(c: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &ck in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + ck;
    }
    (p, dp)
}

/// sum |c_k| |x|^k, the natural size against which p(x) rounding is judged.
#[inline]
pub fn abs_scale(c: &[f64], x: f64) -> f64 {
    let ax = x.abs();
    c.iter().rev().fold(0.0, |acc, &ck| acc * ax + ck.abs())
}

/// Bisection on a bracket with f(a) f(b) <= 0. Stops once the bracket is
/// below `tol` or stops shrinking in floating point.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol || m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Options for [`real_roots`].
#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    pub bisect_tol: f64,
    pub dedup: f64,
    /// A critical point where |p| <= tangent_tol * abs_scale counts as a
    /// (double) root even without a sign change.
    pub tangent_tol: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            bisect_tol: 1e-15,
            dedup: 1e-9,
            tangent_tol: 1e-12,
        }
    }
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &ck)| k as f64 * ck)
        .collect()
}

/// All real roots of the polynomial `c` (lowest degree first) in [lo, hi], ascending.
///
/// The critical points of p, found recursively from p', split [lo, hi] into
/// monotone pieces. Each piece holds at most one root, located by safeguarded
/// Newton. A critical point where |p| is at rounding level is a tangential root.
pub fn real_roots(c: &[f64], lo: f64, hi: f64, opts: &RootOptions) -> Vec<f64> {
    let mut roots = monotone_roots(c, lo, hi, opts);
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|b, a| (*b - *a).abs() <= opts.dedup);
    roots
}

fn monotone_roots(c: &[f64], lo: f64, hi: f64, opts: &RootOptions) -> Vec<f64> {
    let deg = c.iter().rposition(|&x| x != 0.0).unwrap_or(0);
    let c = &c[..=deg];
    match deg {
        0 => return if c[0] == 0.0 { vec![lo] } else { Vec::new() },
        1 => {
            let x = -c[0] / c[1];
            return if (lo..=hi).contains(&x) {
                vec![x]
            } else {
                Vec::new()
            };
        }
        _ => {}
    }
    let crit = monotone_roots(&derivative(c), lo, hi, opts);
    let mut knots = Vec::with_capacity(crit.len() + 2);
    knots.push(lo);
    knots.extend(crit.iter().copied().filter(|&x| x > lo && x < hi));
    knots.push(hi);
    let vals: Vec<f64> = knots.iter().map(|&x| horner(c, x)).collect();
    let mut roots = Vec::new();
    for i in 0..knots.len() {
        let interior = i > 0 && i + 1 < knots.len();
        if vals[i] == 0.0
            || (interior && vals[i].abs() <= opts.tangent_tol * abs_scale(c, knots[i]))
        {
            roots.push(knots[i]);
        }
        if i + 1 < knots.len()
            && vals[i] != 0.0
            && vals[i + 1] != 0.0
            && (vals[i] < 0.0) != (vals[i + 1] < 0.0)
        {
            roots.push(safe_newton(
                c,
                knots[i],
                knots[i + 1],
                vals[i],
                opts.bisect_tol,
            ));
        }
    }
    roots
}

/// Newton inside a sign-change bracket, falling back to bisection whenever
/// the step leaves the bracket or fails to halve it.
fn safe_newton(c: &[f64], mut a: f64, mut b: f64, fa: f64, tol: f64) -> f64 {
    let neg_at_a = fa < 0.0;
    let mut x = 0.5 * (a + b);
    let mut last = (b - a).abs();
    for _ in 0..200 {
        let (p, dp) = horner_d(c, x);
        if p == 0.0 {
            return x;
        }
        if (p < 0.0) == neg_at_a {
            a = x;
        } else {
            b = x;
        }
        let width = (b - a).abs();
        if width <= tol * x.abs().max(1.0) {
            break;
        }
        let y = x - p / dp;
        let inside = dp != 0.0 && y.is_finite() && y > a.min(b) && y < a.max(b);
        let next = if inside && (y - x).abs() < 0.5 * last {
            y
        } else {
            0.5 * (a + b)
        };
        last = (next - x).abs();
        if next == x {
            break;
        }
        x = next;
    }
    x
}
