//! Small numerical primitives shared across the crate: compensated
//! summation, bracketing bisection, golden-section minimization, adaptive
//! Simpson quadrature, Gauss-Legendre panels, and shape-preserving monotone
//! cubic interpolation.

/// Neumaier-compensated accumulator. Keeps reductions deterministic and
/// accurate without depending on summation order tricks elsewhere.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.compensation += (self.sum - t) + term;
        } else {
            self.compensation += (term - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Sum a slice with compensation.
pub fn compensated_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::new();
    for t in terms {
        acc.add(t);
    }
    acc.value()
}

/// Find a root of a continuous monotone-increasing `f` on `[lo, hi]` by
/// bisection, assuming `f(lo) <= 0 <= f(hi)`. Stops when the bracket is
/// narrower than `rel_tol` times its midpoint magnitude (plus a tiny
/// absolute floor) or after `max_iter` halvings.
pub fn bisect_increasing<F: FnMut(f64) -> f64>(
    mut lo: f64,
    mut hi: f64,
    mut f: F,
    rel_tol: f64,
    max_iter: usize,
) -> f64 {
    debug_assert!(lo <= hi);
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * mid.abs().max(1e-300) {
            return mid;
        }
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
/// Returns `(argmin, min)`.
pub fn golden_min<F: FnMut(f64) -> f64>(
    mut lo: f64,
    mut hi: f64,
    mut f: F,
    rel_tol: f64,
    max_iter: usize,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    for _ in 0..max_iter {
        if (hi - lo) <= rel_tol * (lo.abs() + hi.abs()).max(1e-300) {
            break;
        }
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    if fa < fb && fa < fx {
        (a, fa)
    } else if fb < fx {
        (b, fb)
    } else {
        (x, fx)
    }
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance
/// `tol`. Depth-limited; the integrand is assumed finite on the interval.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// Nodes and weights of the `order`-point Gauss-Legendre rule on `[-1, 1]`,
/// by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    assert!(order >= 1);
    let n = order;
    let mut rule = Vec::with_capacity(n);
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0) * x * p2 - jf * p3) / (jf + 1.0);
            }
            pp = n as f64 * (x * p1 - p2) / (x * x - 1.0);
            let dx = p1 / pp;
            x -= dx;
            if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.push((-x, w));
        if 2 * (i + 1) <= n || x.abs() > 1e-12 {
            rule.push((x, w));
        }
    }
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    rule.truncate(n);
    rule
}

/// Shape-preserving monotone piecewise-cubic interpolant (Fritsch-Carlson).
///
/// Built from strictly increasing knots with nondecreasing values; evaluates
/// exactly at the knots, preserves monotonicity in between, and integrates
/// each cubic segment in closed form. Beyond the last knot it continues
/// linearly with the end slope.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
    /// Integral of the interpolant from xs[0] to xs[i].
    prefix: Vec<f64>,
}

impl MonotoneCubic {
    /// `xs` strictly increasing, `ys` the values at the knots. Needs at
    /// least two knots.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Option<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return None;
        }
        for i in 1..n {
            if !(xs[i] > xs[i - 1]) {
                return None;
            }
        }
        let mut secants = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            secants.push((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]));
        }
        let mut slopes = vec![0.0; n];
        slopes[0] = secants[0];
        slopes[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            let (s0, s1) = (secants[i - 1], secants[i]);
            slopes[i] = if s0 * s1 <= 0.0 {
                0.0
            } else {
                // Harmonic mean keeps the interpolant monotone.
                let w1 = 2.0 * (xs[i + 1] - xs[i]) + (xs[i] - xs[i - 1]);
                let w2 = (xs[i + 1] - xs[i]) + 2.0 * (xs[i] - xs[i - 1]);
                (w1 + w2) / (w1 / s0 + w2 / s1)
            };
        }
        // Fritsch-Carlson clamp.
        for i in 0..n - 1 {
            let s = secants[i];
            if s == 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
            } else {
                let a = slopes[i] / s;
                let b = slopes[i + 1] / s;
                let r = a * a + b * b;
                if r > 9.0 {
                    let t = 3.0 / r.sqrt();
                    slopes[i] = t * a * s;
                    slopes[i + 1] = t * b * s;
                }
            }
        }
        let mut prefix = vec![0.0; n];
        for i in 0..n - 1 {
            let h = xs[i + 1] - xs[i];
            // Closed-form integral of the cubic Hermite segment.
            let seg = h * (0.5 * (ys[i] + ys[i + 1]) + h * (slopes[i] - slopes[i + 1]) / 12.0);
            prefix[i + 1] = prefix[i] + seg;
        }
        Some(Self {
            xs,
            ys,
            slopes,
            prefix,
        })
    }

    fn segment(&self, x: f64) -> usize {
        match self
            .xs
            .binary_search_by(|v| v.partial_cmp(&x).unwrap())
        {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.xs.len() - 2),
        }
    }

    pub fn min_x(&self) -> f64 {
        self.xs[0]
    }

    pub fn max_x(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x >= self.xs[n - 1] {
            return self.ys[n - 1] + self.slopes[n - 1] * (x - self.xs[n - 1]);
        }
        if x <= self.xs[0] {
            return self.ys[0] + self.slopes[0] * (x - self.xs[0]);
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }

    /// Integral of the interpolant from `xs[0]` to `x` (with the linear
    /// continuation beyond the last knot).
    pub fn integral_from_start(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x >= self.xs[n - 1] {
            let d = x - self.xs[n - 1];
            return self.prefix[n - 1] + self.ys[n - 1] * d + 0.5 * self.slopes[n - 1] * d * d;
        }
        if x <= self.xs[0] {
            let d = x - self.xs[0];
            return self.ys[0] * d + 0.5 * self.slopes[0] * d * d;
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3, t4) = (t * t, t * t * t, t * t * t * t);
        // Antiderivatives of the Hermite basis on [0, 1], scaled by h.
        let ih00 = 0.5 * t4 - t3 + t;
        let ih10 = 0.25 * t4 - 2.0 * t3 / 3.0 + 0.5 * t2;
        let ih01 = -0.5 * t4 + t3;
        let ih11 = 0.25 * t4 - t3 / 3.0;
        self.prefix[i]
            + h * (ih00 * self.ys[i]
                + ih10 * h * self.slopes[i]
                + ih01 * self.ys[i + 1]
                + ih11 * h * self.slopes[i + 1])
    }
}
