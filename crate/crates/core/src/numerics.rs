//! Quadrature primitives shared by every module.

use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

pub type C64 = Complex64;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn compute_gauss_legendre(n: usize) -> GaussRule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            dp = 1.0;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    if n == 1 {
        nodes[0] = 0.0;
        weights[0] = 2.0;
    }
    GaussRule { nodes, weights }
}

const MAX_CACHED: usize = 64;

/// Cached Gauss–Legendre rule of order `n` (1 ≤ n ≤ 64).
pub fn gauss_legendre(n: usize) -> &'static GaussRule {
    static CACHE: OnceLock<Vec<OnceLock<GaussRule>>> = OnceLock::new();
    assert!((1..=MAX_CACHED).contains(&n), "Gauss-Legendre order {n} unsupported");
    let cache = CACHE.get_or_init(|| (0..=MAX_CACHED).map(|_| OnceLock::new()).collect());
    cache[n].get_or_init(|| compute_gauss_legendre(n))
}

/// Fixed-order Gauss–Legendre on [a, b].
pub fn gauss_fixed<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, n: usize) -> C64 {
    let rule = gauss_legendre(n);
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = C64::new(0.0, 0.0);
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        acc += f(m + r * x) * *w;
    }
    acc * r
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

struct Segment {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: C64,
    pub error: f64,
    pub segments: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-10, max_segments: 4000 }
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) over [a, b] with forced breakpoints.
pub fn integrate_adaptive<F: FnMut(f64) -> C64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: AdaptiveOptions,
) -> QuadResult {
    if a == b {
        return QuadResult { value: C64::new(0.0, 0.0), error: 0.0, segments: 0 };
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|x| *x > lo && *x < hi).collect();
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut heap = BinaryHeap::new();
    let mut total = C64::new(0.0, 0.0);
    let mut err = 0.0;
    for w in pts.windows(2) {
        let (v, e) = gk15(&mut f, w[0], w[1]);
        total += v;
        err += e;
        heap.push(Segment { a: w[0], b: w[1], value: v, error: e });
    }
    while err > opts.abs_tol.max(opts.rel_tol * total.norm()) && heap.len() < opts.max_segments {
        let Some(seg) = heap.pop() else { break };
        let m = 0.5 * (seg.a + seg.b);
        if m <= seg.a || m >= seg.b {
            heap.push(Segment { error: 0.0, ..seg });
            continue;
        }
        let (v1, e1) = gk15(&mut f, seg.a, m);
        let (v2, e2) = gk15(&mut f, m, seg.b);
        total += v1 + v2 - seg.value;
        err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: m, value: v1, error: e1 });
        heap.push(Segment { a: m, b: seg.b, value: v2, error: e2 });
    }
    // Resum to shed accumulated rounding from the running updates.
    let mut value = C64::new(0.0, 0.0);
    let mut error = 0.0;
    let segments = heap.len();
    for s in heap {
        value += s.value;
        error += s.error;
    }
    QuadResult { value: value * sign, error, segments }
}

pub fn integrate_real<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, breaks: &[f64], opts: AdaptiveOptions) -> f64 {
    integrate_adaptive(|x| C64::new(f(x), 0.0), a, b, breaks, opts).value.re
}

/// Recursive adaptive Simpson with Richardson correction.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(&mut f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: FnMut(f64) -> f64>(
    f: &mut F,
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
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// ∮ f(z) dz over the circle |z − c| = r by the periodic trapezoid rule.
pub fn circle_contour<F: FnMut(C64) -> C64>(mut f: F, center: C64, radius: f64, nodes: usize, clockwise: bool) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    let dth = 2.0 * PI / nodes as f64;
    for j in 0..nodes {
        let e = C64::from_polar(1.0, j as f64 * dth);
        let z = center + e * radius;
        // dz = i r e^{iθ} dθ
        acc += f(z) * (C64::i() * e * radius);
    }
    let v = acc * dth;
    if clockwise {
        -v
    } else {
        v
    }
}

/// Breakpoints a·q^j accumulating at 0 from `start` down to `stop` (exclusive of 0).
pub fn geometric_breaks(start: f64, stop: f64, ratio: f64) -> Vec<f64> {
    assert!(ratio > 0.0 && ratio < 1.0 && start > 0.0 && stop > 0.0);
    let mut out = Vec::new();
    let mut x = start;
    while x > stop {
        out.push(x);
        x *= ratio;
    }
    out.push(stop);
    out
}

/// Least-squares slope of y against x.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in 1..=20 {
            let r = gauss_legendre(n);
            let s: f64 = r.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}");
            // degree 2n-1 monomial is odd, degree 2n-2 is even
            let d = 2 * n - 2;
            let q: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(d as i32)).sum();
            assert!((q - 2.0 / (d as f64 + 1.0)).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn adaptive_handles_log_endpoint() {
        // ∫_0^1 ln x dx = -1
        let r = integrate_adaptive(|x| c64(x.ln(), 0.0), 0.0, 1.0, &[], AdaptiveOptions::default());
        assert!((r.value.re + 1.0).abs() < 1e-9, "{:?}", r);
    }

    #[test]
    fn adaptive_reversed_limits_flip_sign() {
        let f = |x: f64| c64(x.sin(), x.cos());
        let a = integrate_adaptive(f, 0.0, 2.0, &[], AdaptiveOptions::default()).value;
        let b = integrate_adaptive(f, 2.0, 0.0, &[], AdaptiveOptions::default()).value;
        assert!((a + b).norm() < 1e-14);
        assert!((a.re - (1.0 - 2f64.cos())).abs() < 1e-12);
    }

    #[test]
    fn simpson_matches_closed_form() {
        let v = adaptive_simpson(|x| (1.0 + x * x).sqrt(), 0.0, 3.0, 1e-11, 40);
        let exact = 0.5 * (3.0 * 10f64.sqrt() + 3f64.asinh());
        assert!((v - exact).abs() < 1e-9);
    }

    #[test]
    fn circle_contour_residue() {
        // ∮ dz/(z - a) = 2πi for a inside, clockwise flips sign
        let a = c64(0.1, -0.2);
        let v = circle_contour(|z| (z - a).inv(), c64(0.0, 0.0), 1.0, 64, false);
        assert!((v - c64(0.0, 2.0 * PI)).norm() < 1e-12);
        let w = circle_contour(|z| (z - a).inv(), c64(0.0, 0.0), 1.0, 64, true);
        assert!((w + v).norm() < 1e-12);
    }
}
