//! Mapped parameter rectangles carrying a density.

use crate::geometry::GraphFunction;
use crate::numerics::{c64, C64};
use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;

pub type PatchDensity = Arc<dyn Fn(C64, f64, f64) -> C64 + Send + Sync>;

#[derive(Debug, Clone)]
pub enum PatchMap {
    /// (x, y) ↦ x + iy.
    Rect,
    /// (r, θ) ↦ c + r·e^{iθ}.
    Polar { center: C64 },
    /// (ξ, s) ↦ ξ + i·g(ξ)(1 + μs).
    Corridor { g: GraphFunction, mu: f64 },
    /// (r, τ) ↦ r·e^{iθ}, θ = θ_top(r) + τ(π − θ_top(r)): the part of the upper half-disc
    /// annulus lying above the graph (1+μ)g.
    PolarAbove { g: GraphFunction, mu: f64 },
    /// One of four curved quadrilaterals joining the square of half-side a·radius to the
    /// circle; (s, t) ∈ [0,1] × [−1,1].
    DiscSide { center: C64, radius: f64, a: f64, rotation: C64 },
}

#[inline]
fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

impl PatchMap {
    pub fn point(&self, u: f64, v: f64) -> C64 {
        match self {
            PatchMap::Rect => c64(u, v),
            PatchMap::Polar { center } => center + C64::from_polar(u, v),
            PatchMap::Corridor { g, mu } => c64(u, g.value(u) * (1.0 + mu * v)),
            PatchMap::PolarAbove { g, mu } => {
                let t0 = theta_top(g, *mu, u);
                C64::from_polar(u, t0 + v * (PI - t0))
            }
            PatchMap::DiscSide { center, radius, a, rotation } => {
                center + rotation * disc_side_local(*a, u, v) * *radius
            }
        }
    }

    /// |det DΦ|.
    pub fn jacobian(&self, u: f64, v: f64) -> f64 {
        match self {
            PatchMap::Rect => 1.0,
            PatchMap::Polar { .. } => u.abs(),
            PatchMap::Corridor { g, mu } => (mu * g.value(u)).abs(),
            PatchMap::PolarAbove { g, mu } => {
                let t0 = theta_top(g, *mu, u);
                let dt0 = theta_top_derivative(g, *mu, u, t0);
                let th = t0 + v * (PI - t0);
                let e = C64::from_polar(1.0, th);
                let dr = e + C64::i() * e * u * (dt0 * (1.0 - v));
                let dtau = C64::i() * e * u * (PI - t0);
                cross(dr, dtau).abs()
            }
            PatchMap::DiscSide { radius, a, .. } => {
                let (ds, dt) = disc_side_partials(*a, u, v);
                cross(ds, dt).abs() * radius * radius
            }
        }
    }

    pub fn point_jacobian(&self, u: f64, v: f64) -> (C64, f64) {
        match self {
            PatchMap::PolarAbove { g, mu } => {
                let t0 = theta_top(g, *mu, u);
                let dt0 = theta_top_derivative(g, *mu, u, t0);
                let e = C64::from_polar(1.0, t0 + v * (PI - t0));
                let dr = e + C64::i() * e * u * (dt0 * (1.0 - v));
                let dtau = C64::i() * e * u * (PI - t0);
                (e * u, cross(dr, dtau).abs())
            }
            _ => (self.point(u, v), self.jacobian(u, v)),
        }
    }

    /// Parameters of z, if the map reaches it; not restricted to any rectangle.
    pub fn inverse(&self, z: C64) -> Option<(f64, f64)> {
        match self {
            PatchMap::Rect => Some((z.re, z.im)),
            PatchMap::Polar { center } => {
                let w = z - center;
                let th = w.im.atan2(w.re);
                Some((w.norm(), th))
            }
            PatchMap::Corridor { g, mu } => {
                let gv = g.value(z.re);
                if gv > 0.0 {
                    Some((z.re, (z.im / gv - 1.0) / mu))
                } else {
                    None
                }
            }
            PatchMap::PolarAbove { g, mu } => {
                if z.im < 0.0 {
                    return None;
                }
                let r = z.norm();
                let t0 = theta_top(g, *mu, r);
                let th = z.im.atan2(z.re);
                Some((r, (th - t0) / (PI - t0)))
            }
            PatchMap::DiscSide { center, radius, a, rotation } => {
                let w = (z - center) * rotation.conj() / *radius;
                if w.re <= 0.0 {
                    return None;
                }
                let mut s = ((w.norm() - *a) / (1.0 - a)).clamp(0.0, 1.0);
                let mut t = (w.im / w.re).clamp(-1.0, 1.0);
                for _ in 0..50 {
                    let r = disc_side_local(*a, s, t) - w;
                    let (ps, pt) = disc_side_partials(*a, s, t);
                    let det = cross(ps, pt);
                    if det.abs() < 1e-300 {
                        return None;
                    }
                    let ds = cross(r, pt) / det;
                    let dt = cross(ps, r) / det;
                    s -= ds;
                    t -= dt;
                    if ds.abs() + dt.abs() < 1e-15 {
                        break;
                    }
                }
                let back = disc_side_local(*a, s, t);
                if (back - w).norm() < 1e-12 {
                    Some((s, t))
                } else {
                    None
                }
            }
        }
    }
}

fn disc_side_local(a: f64, s: f64, t: f64) -> C64 {
    let inner = c64(a, a * t);
    let outer = C64::from_polar(1.0, FRAC_PI_4 * t);
    inner * (1.0 - s) + outer * s
}

fn disc_side_partials(a: f64, s: f64, t: f64) -> (C64, C64) {
    let inner = c64(a, a * t);
    let outer = C64::from_polar(1.0, FRAC_PI_4 * t);
    let d_outer = C64::i() * outer * FRAC_PI_4;
    (outer - inner, c64(0.0, a) * (1.0 - s) + d_outer * s)
}

fn is_above(g: &GraphFunction, mu: f64, z: C64) -> bool {
    let gv = g.value(z.re);
    gv <= 0.0 || z.im > (1.0 + mu) * gv
}

/// Smallest θ such that every point r·e^{iθ'} with θ' ∈ (θ, π) lies above (1+μ)g.
pub fn theta_top(g: &GraphFunction, mu: f64, r: f64) -> f64 {
    let n = 256;
    let mut prev = PI;
    for j in 1..=n {
        let th = PI * (1.0 - j as f64 / n as f64);
        if !is_above(g, mu, C64::from_polar(r, th)) || th == 0.0 {
            if th == 0.0 && is_above(g, mu, C64::from_polar(r, 1e-300)) {
                return 0.0;
            }
            let (mut lo, mut hi) = (th, prev);
            for _ in 0..60 {
                let m = 0.5 * (lo + hi);
                if is_above(g, mu, C64::from_polar(r, m)) {
                    hi = m;
                } else {
                    lo = m;
                }
            }
            return hi;
        }
        prev = th;
    }
    0.0
}

fn theta_top_derivative(g: &GraphFunction, mu: f64, r: f64, th: f64) -> f64 {
    if th <= 0.0 {
        return 0.0;
    }
    let (c, s) = (th.cos(), th.sin());
    let x = r * c;
    let dg = (1.0 + mu) * g.derivative(x);
    let f_r = s - dg * c;
    let f_th = r * c + dg * r * s;
    if f_th.abs() < 1e-300 {
        0.0
    } else {
        -f_r / f_th
    }
}

#[derive(Clone)]
pub struct Patch {
    pub map: PatchMap,
    pub u_breaks: Vec<f64>,
    pub v_breaks: Vec<f64>,
    pub density: PatchDensity,
}

impl std::fmt::Debug for Patch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Patch")
            .field("map", &self.map)
            .field("u_cells", &(self.u_breaks.len().saturating_sub(1)))
            .field("v_cells", &(self.v_breaks.len().saturating_sub(1)))
            .finish()
    }
}

pub fn uniform_breaks(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Breakpoints on [a, b] graded geometrically toward the endpoints flagged as zeros,
/// down to cells of size `min_cell`, with interior cells no longer than `max_cell`.
pub fn graded_breaks(
    a: f64,
    b: f64,
    grade_start: bool,
    grade_end: bool,
    min_cell: f64,
    per_octave: usize,
    max_cell: f64,
    extra: &[f64],
) -> Vec<f64> {
    let len = b - a;
    let mut pts = vec![a, b];
    pts.extend(extra.iter().copied().filter(|x| *x > a && *x < b));
    let reach = if grade_start && grade_end { 0.5 * len } else { len };
    let q = 2f64.powf(1.0 / per_octave as f64);
    for (flag, origin, dir) in [(grade_start, a, 1.0), (grade_end, b, -1.0)] {
        if !flag {
            continue;
        }
        let mut d = min_cell;
        while d < reach {
            pts.push(origin + dir * d);
            d *= q;
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    // split long gaps uniformly
    let mut out = Vec::with_capacity(pts.len());
    for w in pts.windows(2) {
        out.push(w[0]);
        let gap = w[1] - w[0];
        if gap > max_cell {
            let n = (gap / max_cell).ceil() as usize;
            for i in 1..n {
                out.push(w[0] + gap * i as f64 / n as f64);
            }
        }
    }
    out.push(b);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GraphSpec;

    #[test]
    fn disc_side_inverse_roundtrip_and_area() {
        let map = PatchMap::DiscSide { center: c64(0.2, -0.1), radius: 2.0, a: 0.5, rotation: C64::i() };
        for (s, t) in [(0.1, -0.9), (0.5, 0.0), (0.99, 0.7)] {
            let z = map.point(s, t);
            let (s2, t2) = map.inverse(z).unwrap();
            assert!((s - s2).abs() < 1e-12 && (t - t2).abs() < 1e-12);
        }
        // four sides + square = disc area
        let rule = crate::numerics::gauss_legendre(20);
        let mut area = 0.0;
        for (xs, ws) in rule.nodes.iter().zip(&rule.weights) {
            for (xt, wt) in rule.nodes.iter().zip(&rule.weights) {
                area += ws * wt * 0.5 * map.jacobian(0.5 * (xs + 1.0), *xt);
            }
        }
        let square = (2.0 * 0.5 * 2.0f64).powi(2);
        assert!((4.0 * area + square - PI * 4.0).abs() < 1e-10, "{}", 4.0 * area + square);
    }

    #[test]
    fn theta_top_linear_graph() {
        let g = GraphFunction::new(GraphSpec::linear(1.0), 4.0).unwrap();
        let t = theta_top(&g, 1.0, 1.5);
        assert!((t - 2f64.atan()).abs() < 1e-13);
        let tent = GraphFunction::new(GraphSpec::Tent { a: 0.0, b: 1.0 }, 1.0).unwrap();
        assert_eq!(theta_top(&tent, 1.0, 3.0), 0.0);
    }

    #[test]
    fn polar_above_jacobian_matches_differences() {
        let g = GraphFunction::new(GraphSpec::power(1.3, 2.0), 4.0).unwrap();
        let map = PatchMap::PolarAbove { g, mu: 0.3 };
        let (u, v, h) = (1.2, 0.3, 1e-6);
        let du = (map.point(u + h, v) - map.point(u - h, v)) / (2.0 * h);
        let dv = (map.point(u, v + h) - map.point(u, v - h)) / (2.0 * h);
        let j = cross(du, dv).abs();
        assert!((j - map.jacobian(u, v)).abs() < 1e-6 * j);
    }

    #[test]
    fn graded_breaks_shape() {
        let b = graded_breaks(0.0, 1.0, true, false, 1e-6, 2, 0.1, &[0.5]);
        assert_eq!(b[0], 0.0);
        assert!((b[1] - 1e-6).abs() < 1e-20);
        assert!(b.windows(2).all(|w| w[1] - w[0] <= 0.1 + 1e-12));
        assert!(b.contains(&0.5));
    }
}
