//! Quadrature kernels: adaptive Simpson for smooth integrands and
//! tanh-sinh for endpoint square-root singularities.

/// Adaptive Simpson integration of `f` over `[a, b]` with absolute
/// tolerance `tol`, starting from `panels` equal panels.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let w = (b - a) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let lo = a + i as f64 * w;
        let hi = lo + w;
        let fl = f(lo);
        let fm = f(0.5 * (lo + hi));
        let fh = f(hi);
        let whole = simpson(lo, hi, fl, fm, fh);
        total += simpson_rec(f, lo, hi, fl, fm, fh, whole, tol / panels as f64, 60);
    }
    total
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Tanh-sinh quadrature of `f` over the finite interval `[a, b]`.
///
/// Converges at double-exponential rate even when `f` has integrable
/// endpoint singularities (here: square-root vanishing/blowup). The
/// step is halved until two successive levels agree to `tol`
/// (mixed absolute/relative).
pub fn tanh_sinh(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let r = 0.5 * (b - a);
    if r == 0.0 {
        return 0.0;
    }
    let g = |t: f64| -> f64 {
        // x = tanh(pi/2 sinh t), w = (pi/2) cosh t / cosh^2(pi/2 sinh t);
        // the abscissa is built from its distance to the nearer
        // endpoint, d = 1 - |x| = 2 e^{-2|u|}/(1 + e^{-2|u|}), which
        // keeps full precision against endpoint singularities
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let e2 = (-2.0 * u.abs()).exp();
        let d = 2.0 * e2 / (1.0 + e2);
        let sech = 1.0 / u.cosh();
        let w = std::f64::consts::FRAC_PI_2 * t.cosh() * sech * sech;
        if w == 0.0 || !w.is_finite() || d == 0.0 {
            return 0.0;
        }
        let xv = if t >= 0.0 { b - r * d } else { a + r * d };
        if xv <= a.min(b) || xv >= a.max(b) {
            return 0.0;
        }
        w * f(xv)
    };
    let t_max = 3.8f64;
    let mut h = 1.0f64;
    // level 0
    let mut nodes = vec![0.0f64];
    let mut t = h;
    while t <= t_max {
        nodes.push(t);
        nodes.push(-t);
        t += h;
    }
    let mut sum: f64 = nodes.iter().map(|&t| g(t)).sum();
    let mut prev = f64::NAN;
    for _level in 0..10 {
        h *= 0.5;
        let mut extra = 0.0;
        let mut t = h;
        while t <= t_max {
            extra += g(t) + g(-t);
            t += 2.0 * h;
        }
        sum += extra;
        let estimate = r * h * sum;
        if prev.is_finite() && (estimate - prev).abs() <= tol * estimate.abs().max(1e-300) + 1e-300
        {
            return estimate;
        }
        prev = estimate;
    }
    prev
}
