//! Witness pairs: Cauchy integrals of a trapezoid density over two nearby graph
//! pieces whose sum stays bounded while one of them blows up at the left end.

use crate::dbar::fd_dbar;
use crate::geometry::GraphFunction;
use crate::numerics::{c64, integrate_adaptive, linear_fit, AdaptiveOptions, C64};
use crate::splitter::{AnalyticFunction, SingularSet};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub enum CellBoundary {
    Polygon(Vec<C64>),
    Circle { center: C64, radius: f64 },
}

/// A Jordan domain with a marked interior point.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub boundary: CellBoundary,
    pub center: C64,
}

impl Cell {
    pub fn polygon(vertices: Vec<C64>, center: C64) -> Result<Self> {
        let cell = Self { boundary: CellBoundary::Polygon(vertices), center };
        cell.validate()?;
        Ok(cell)
    }

    pub fn disc(disc_center: C64, radius: f64, center: C64) -> Result<Self> {
        let cell = Self { boundary: CellBoundary::Circle { center: disc_center, radius }, center };
        cell.validate()?;
        Ok(cell)
    }

    fn validate(&self) -> Result<()> {
        match &self.boundary {
            CellBoundary::Circle { radius, .. } if !(*radius > 0.0) => {
                return Err(Error::InvalidCell(format!("radius {radius}")))
            }
            CellBoundary::Polygon(v) => {
                if v.len() < 3 {
                    return Err(Error::InvalidCell("fewer than three vertices".into()));
                }
                let n = v.len();
                for i in 0..n {
                    for j in i + 1..n {
                        // adjacent edges share a vertex and are skipped
                        if j == i + 1 || (i == 0 && j == n - 1) {
                            continue;
                        }
                        if edges_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                            return Err(Error::InvalidCell("boundary is not simple".into()));
                        }
                    }
                }
            }
            _ => {}
        }
        if !self.contains(self.center) || self.boundary_distance(self.center) == 0.0 {
            return Err(Error::InvalidCell(format!("center {} not strictly inside", self.center)));
        }
        Ok(())
    }

    pub fn perimeter(&self) -> f64 {
        match &self.boundary {
            CellBoundary::Circle { radius, .. } => 2.0 * PI * radius,
            CellBoundary::Polygon(v) => (0..v.len()).map(|i| (v[(i + 1) % v.len()] - v[i]).norm()).sum(),
        }
    }

    pub fn boundary_distance(&self, z: C64) -> f64 {
        match &self.boundary {
            CellBoundary::Circle { center, radius } => ((z - center).norm() - radius).abs(),
            CellBoundary::Polygon(v) => (0..v.len())
                .map(|i| crate::splitter::segment_distance(z, v[i], v[(i + 1) % v.len()]))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Strict interior test.
    pub fn contains(&self, z: C64) -> bool {
        match &self.boundary {
            CellBoundary::Circle { center, radius } => (z - center).norm() < *radius,
            CellBoundary::Polygon(v) => {
                let mut w = 0.0;
                for i in 0..v.len() {
                    w += ((v[(i + 1) % v.len()] - z) / (v[i] - z)).arg();
                }
                w.abs() > PI && self.boundary_distance(z) > 0.0
            }
        }
    }

    /// Bounding box (min, max corners).
    pub fn bbox(&self) -> (C64, C64) {
        match &self.boundary {
            CellBoundary::Circle { center, radius } => (center - c64(*radius, *radius), center + c64(*radius, *radius)),
            CellBoundary::Polygon(v) => {
                let (mut lo, mut hi) = (v[0], v[0]);
                for p in v {
                    lo = c64(lo.re.min(p.re), lo.im.min(p.im));
                    hi = c64(hi.re.max(p.re), hi.im.max(p.im));
                }
                (lo, hi)
            }
        }
    }

    /// Points spread along the boundary, `per_edge` per edge (or 4·per_edge on a circle).
    pub fn boundary_samples(&self, per_edge: usize) -> Vec<C64> {
        match &self.boundary {
            CellBoundary::Circle { center, radius } => {
                let n = 4 * per_edge;
                (0..n).map(|i| center + C64::from_polar(*radius, 2.0 * PI * i as f64 / n as f64)).collect()
            }
            CellBoundary::Polygon(v) => {
                let mut out = Vec::new();
                for i in 0..v.len() {
                    let (a, b) = (v[i], v[(i + 1) % v.len()]);
                    out.extend((0..per_edge).map(|k| a + (b - a) * (k as f64 / per_edge as f64)));
                }
                out
            }
        }
    }
}

fn edges_intersect(a: C64, b: C64, c: C64, d: C64) -> bool {
    let cross = |u: C64, v: C64| u.re * v.im - u.im * v.re;
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    d1 * d2 <= 0.0 && d3 * d4 <= 0.0 && !(d1 == 0.0 && d2 == 0.0)
}

/// 2π·dist(A, ∂g)/length(∂g).
pub fn rotundity(cell: &Cell) -> Result<f64> {
    cell.validate()?;
    Ok(2.0 * PI * cell.boundary_distance(cell.center) / cell.perimeter())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    /// Both graphs inside the full angle |η| < kξ.
    Angle,
    /// Both graphs in the upper half of the angle, φ₁ > 0.
    UpperAngle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScheduleConfig {
    /// Half-opening slope of the angle cell.
    pub k: f64,
    /// Points of the grid on which Δ ≤ h is verified.
    pub check_points: usize,
    /// Octaves of geometric refinement used for the sups defining ε(x).
    pub sup_depth: i32,
    pub sup_uniform: usize,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self { k: 2.0, check_points: 4001, sup_depth: 60, sup_uniform: 2000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessParams {
    pub kind: ScheduleKind,
    pub x: f64,
    #[serde(rename = "X")]
    pub x_end: f64,
    pub h: f64,
    pub eps: f64,
}

impl WitnessParams {
    pub fn x1(&self) -> f64 {
        self.x + self.h
    }
    pub fn x2(&self) -> f64 {
        self.x_end - self.h
    }
}

fn sup_on_grid(lo: f64, hi: f64, cfg: &ScheduleConfig, extra: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let mut s: f64 = 0.0;
    let w = hi - lo;
    for t in crate::geometry::refinement_grid(w, cfg.sup_depth, cfg.sup_uniform) {
        s = s.max(f(lo + t));
    }
    for &t in extra {
        if t > lo && t <= hi {
            s = s.max(f(t));
        }
    }
    s
}

/// Window end X, ramp width h and ε for the chosen schedule; verifies Δ ≤ h on [x, X].
pub fn schedule(kind: ScheduleKind, x: f64, phi1: &GraphFunction, phi2: &GraphFunction, cfg: &ScheduleConfig) -> Result<WitnessParams> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("schedule needs x > 0, got {x}")));
    }
    let delta = |t: f64| phi2.value(t) - phi1.value(t);
    let kinks: Vec<f64> = phi1.kinks().iter().chain(phi2.kinks()).copied().collect();
    let (x_end, h, eps) = match kind {
        ScheduleKind::Angle => {
            let eps = sup_on_grid(0.0, 2.0 * x, cfg, &kinks, |t| (phi1.value(t).abs() + phi2.value(t).abs()) / t);
            (2.0 * x, 2.0 * eps * x, eps)
        }
        ScheduleKind::UpperAngle => {
            let p = phi1.value(x);
            if !(p > 0.0) {
                return Err(Error::Hypothesis(format!("φ₁({x}) = {p} is not positive")));
            }
            let x_end = x + 0.5 * p;
            let dsup = sup_on_grid(0.0, x_end, cfg, &kinks, |t| (phi2.derivative(t) - phi1.derivative(t)).abs())
                .max((phi2.derivative(0.0) - phi1.derivative(0.0)).abs());
            let eps = delta(x) / p + dsup;
            (x_end, 2.0 * p * eps, eps)
        }
    };
    if !(h > 0.0) {
        return Err(Error::Hypothesis(format!("ramp width h = {h} at x = {x}; the graphs coincide")));
    }
    if 2.0 * h > x_end - x {
        return Err(Error::Hypothesis(format!("ramps overlap at x = {x}: 2h = {} > X − x = {}", 2.0 * h, x_end - x)));
    }
    let n = cfg.check_points.max(2);
    for i in 0..n {
        let t = x + (x_end - x) * i as f64 / (n - 1) as f64;
        let d = delta(t);
        if d > h * (1.0 + 1e-12) {
            return Err(Error::ScheduleInfeasible { t, delta: d, h });
        }
    }
    Ok(WitnessParams { kind, x, x_end, h, eps })
}

/// Trapezoid density: 0 off (x, X), 1 on [x₁, x₂], linear ramps of width h.
pub fn trapezoid(p: &WitnessParams) -> impl Fn(f64) -> f64 + Send + Sync + Copy {
    let (x, x1, x2, xe, h) = (p.x, p.x1(), p.x2(), p.x_end, p.h);
    move |t: f64| {
        if t <= x || t >= xe {
            0.0
        } else if t < x1 {
            (t - x) / h
        } else if t <= x2 {
            1.0
        } else {
            (xe - t) / h
        }
    }
}

/// Which side of the (left-to-right oriented) arc a boundary value is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Above,
    Below,
}

#[derive(Debug, Clone)]
pub struct WitnessPair {
    pub params: WitnessParams,
    pub phi1: GraphFunction,
    pub phi2: GraphFunction,
}

const QUAD: AdaptiveOptions = AdaptiveOptions { abs_tol: 1e-14, rel_tol: 1e-12, max_segments: 20000 };

impl WitnessPair {
    pub fn new(phi1: GraphFunction, phi2: GraphFunction, kind: ScheduleKind, x: f64, cfg: &ScheduleConfig) -> Result<Self> {
        let params = schedule(kind, x, &phi1, &phi2, cfg)?;
        Ok(Self { params, phi1, phi2 })
    }

    pub fn from_params(phi1: GraphFunction, phi2: GraphFunction, params: WitnessParams) -> Self {
        Self { params, phi1, phi2 }
    }

    fn graph(&self, j: usize) -> &GraphFunction {
        if j == 1 {
            &self.phi1
        } else {
            &self.phi2
        }
    }

    /// z_j(t) = t + iφ_j(t).
    pub fn z(&self, j: usize, t: f64) -> C64 {
        c64(t, self.graph(j).value(t))
    }

    pub fn dz(&self, j: usize, t: f64) -> C64 {
        c64(1.0, self.graph(j).derivative(t))
    }

    pub fn center(&self) -> C64 {
        self.z(1, self.params.x)
    }

    /// Polyline through K_jˣ.
    pub fn arc_polyline(&self, j: usize, n: usize) -> Vec<C64> {
        let p = &self.params;
        (0..=n).map(|i| self.z(j, p.x + (p.x_end - p.x) * i as f64 / n as f64)).collect()
    }

    fn breaks(&self) -> Vec<f64> {
        let p = &self.params;
        let mut b = vec![p.x1(), p.x2()];
        b.extend(self.phi1.kinks().iter().chain(self.phi2.kinks()).copied());
        b
    }

    /// ln(z(X) − ζ) − ln(z(x) − ζ) continued along K_j, for ζ off the arc or as a one-sided limit.
    fn log_increment(&self, j: usize, zeta: C64, side: Option<Side>) -> C64 {
        let p = &self.params;
        let (a, b) = (self.z(j, p.x) - zeta, self.z(j, p.x_end) - zeta);
        let ln_ratio = (b.norm() / a.norm()).ln();
        let mut th = (b / a).arg();
        let side = side.or_else(|| {
            (zeta.re > p.x && zeta.re < p.x_end).then(|| {
                if zeta.im > self.graph(j).value(zeta.re) {
                    Side::Above
                } else {
                    Side::Below
                }
            })
        });
        // the arc is a graph: seen from above it sweeps (0, 2π), from below (−2π, 0)
        match side {
            Some(Side::Above) if th <= 0.0 => th += 2.0 * PI,
            Some(Side::Below) if th >= 0.0 => th -= 2.0 * PI,
            _ => {}
        }
        c64(ln_ratio, th)
    }

    /// Distance from ζ to K_j measured along the vertical through ζ (the arc is a graph).
    fn on_arc_parameter(&self, j: usize, zeta: C64) -> Option<f64> {
        let p = &self.params;
        let scale = p.x_end.max(zeta.norm());
        let t = zeta.re;
        (t >= p.x && t <= p.x_end && (zeta.im - self.graph(j).value(t)).abs() <= 1e-14 * scale).then_some(t)
    }

    /// W_jˣ(ζ) = (−1)^{j−1}(1/2πi)∫_{K_j} f̃(z)dz/(z − ζ); on the open arc a side is required.
    pub fn phi(&self, j: usize, zeta: C64, side: Option<Side>) -> Result<C64> {
        if j != 1 && j != 2 {
            return Err(Error::Domain(format!("witness index j = {j}")));
        }
        let p = self.params;
        let f = trapezoid(&p);
        let on = self.on_arc_parameter(j, zeta);
        if let Some(t0) = on {
            if t0 > p.x && t0 < p.x_end && side.is_none() {
                return Err(Error::Ambiguity(format!("ζ = {zeta} lies on K_{j} and no side was given")));
            }
        }
        // subtract the density value at the closest parameter, add it back through the exact log
        let ts = zeta.re.clamp(p.x, p.x_end);
        let fs = f(ts);
        let dist = if on.is_some() { 0.0 } else { (zeta - self.z(j, ts)).norm() };
        let mut br = self.breaks();
        br.push(ts);
        if dist > 0.0 {
            for m in [1.0, 4.0, 16.0, 64.0] {
                br.push(ts - m * dist);
                br.push(ts + m * dist);
            }
        }
        let reg = integrate_adaptive(
            |t| {
                let w = self.z(j, t) - zeta;
                if w == C64::new(0.0, 0.0) {
                    C64::new(0.0, 0.0)
                } else {
                    self.dz(j, t) * (f(t) - fs) / w
                }
            },
            p.x,
            p.x_end,
            &br,
            QUAD,
        )
        .value;
        let total = if fs == 0.0 { reg } else { reg + fs * self.log_increment(j, zeta, side) };
        let sign = if j == 1 { 1.0 } else { -1.0 };
        Ok(total * sign / (2.0 * PI * C64::i()))
    }

    /// Boundary value of W₁ˣ at the left end Aˣ = x + iφ₁(x).
    pub fn phi1_at_a(&self) -> C64 {
        self.phi(1, self.center(), None).expect("endpoint evaluation never needs a side")
    }

    /// (1/2π)·log((x₂ − x₁)/(2h)) − 2.
    pub fn blowup_lower_bound(&self) -> f64 {
        let p = &self.params;
        ((p.x2() - p.x1()) / (2.0 * p.h)).ln() / (2.0 * PI) - 2.0
    }

    pub fn as_analytic(&self, j: usize) -> AnalyticFunction {
        let pair = self.clone();
        AnalyticFunction::new(
            format!("witness_{j}(x={})", self.params.x),
            Arc::new(move |z| pair.phi(j, z, Some(Side::Above)).unwrap_or_else(|_| C64::new(f64::NAN, f64::NAN))),
            SingularSet::from_polyline(self.arc_polyline(j, 256)),
            f64::INFINITY,
        )
    }

    /// Cell centered at Aˣ: the truncated full angle, or the square of side 2φ₁(x).
    pub fn cell(&self, k: f64) -> Result<Cell> {
        let p = &self.params;
        let a = self.center();
        let cell = match p.kind {
            ScheduleKind::Angle => {
                let r = 3.0 * p.x;
                Cell::polygon(vec![c64(0.0, 0.0), c64(r, -k * r), c64(r, k * r)], a)?
            }
            ScheduleKind::UpperAngle => {
                let s = self.phi1.value(p.x);
                Cell::polygon(
                    vec![c64(p.x - s, 0.0), c64(p.x + s, 0.0), c64(p.x + s, 2.0 * s), c64(p.x - s, 2.0 * s)],
                    a,
                )?
            }
        };
        for (i, z) in self.arc_polyline(1, 512).into_iter().enumerate() {
            // the square contains only the part of K₁ˣ over [x, x + φ₁(x)] ⊃ [x, X]
            if i > 0 && !cell.contains(z) {
                return Err(Error::Containment(format!("K₁ˣ leaves the cell at {z}")));
            }
        }
        Ok(cell)
    }

    /// Probe offset at parameter t: min(h/10, Δ(t)/3), with Δ taken at the left end when it vanishes.
    pub fn probe_offset(&self, t: f64) -> f64 {
        let d = self.phi2.value(t) - self.phi1.value(t);
        let d = if d > 0.0 { d } else { self.phi2.value(self.params.x) - self.phi1.value(self.params.x) };
        (self.params.h / 10.0).min(d / 3.0)
    }

    /// Probe parameters along [x, X]: uniform on the plateau, refined on the ramps and ends.
    pub fn probe_parameters(&self, n: usize) -> Vec<f64> {
        let p = &self.params;
        let mut ts: Vec<f64> = (0..=n).map(|i| p.x + (p.x_end - p.x) * i as f64 / n as f64).collect();
        for i in 0..=n {
            let s = i as f64 / n as f64;
            ts.push(p.x + p.h * s);
            ts.push(p.x_end - p.h * s);
        }
        for j in 1..=30 {
            let d = p.h * 0.5f64.powi(j);
            ts.extend([p.x + d, p.x1() - d, p.x1() + d, p.x2() - d, p.x2() + d, p.x_end - d]);
        }
        ts.retain(|t| *t >= p.x && *t <= p.x_end);
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeSpec {
    pub along: usize,
    pub far_ring: usize,
    /// Far ring radius in units of X.
    pub far_factor: f64,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        Self { along: 200, far_ring: 64, far_factor: 10.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SumScan {
    pub sup: f64,
    pub argmax: [f64; 2],
    pub far_ring_sup: f64,
    pub probes: usize,
    pub delta_probe_min: f64,
}

/// sup |W₁ˣ + W₂ˣ| over one-sided probes on both sides of both arcs and a far ring.
pub fn sum_bound_scan(pair: &WitnessPair, spec: &ProbeSpec) -> SumScan {
    let mut pts = Vec::new();
    let mut dmin = f64::INFINITY;
    for t in pair.probe_parameters(spec.along) {
        let d = pair.probe_offset(t);
        dmin = dmin.min(d);
        for j in [1, 2] {
            let z = pair.z(j, t);
            pts.push(z + c64(0.0, d));
            pts.push(z - c64(0.0, d));
        }
    }
    let p = &pair.params;
    let ring_r = spec.far_factor * p.x_end;
    let ring: Vec<C64> =
        (0..spec.far_ring).map(|i| C64::from_polar(ring_r, 2.0 * PI * i as f64 / spec.far_ring as f64)).collect();
    let eval = |z: &C64| (pair.phi(1, *z, None).unwrap() + pair.phi(2, *z, None).unwrap()).norm();
    let (sup, arg) = pts
        .par_iter()
        .map(|z| (eval(z), *z))
        .reduce(|| (0.0, C64::new(0.0, 0.0)), |a, b| if b.0 > a.0 { b } else { a });
    let far = ring.par_iter().map(eval).reduce(|| 0.0, f64::max);
    SumScan {
        sup: sup.max(far),
        argmax: [arg.re, arg.im],
        far_ring_sup: far,
        probes: pts.len() + ring.len(),
        delta_probe_min: dmin,
    }
}

/// Direct kernel z₁′/(z₁ − z₀) − z₂′/(z₂ − z₀) at z₀ = z₁(t₀).
pub fn direct_kernel(t: f64, t0: f64, phi1: &GraphFunction, phi2: &GraphFunction) -> Result<C64> {
    if t == t0 {
        return Err(Error::SingularPoint(format!("kernel at t = t₀ = {t0}")));
    }
    let z0 = c64(t0, phi1.value(t0));
    let z1 = c64(t, phi1.value(t));
    let z2 = c64(t, phi2.value(t));
    Ok(c64(1.0, phi1.derivative(t)) / (z1 - z0) - c64(1.0, phi2.derivative(t)) / (z2 - z0))
}

/// The two pieces K₁ (Hölder-small remainders) and K₂ (driven by Δ(t₀)) of the direct kernel.
pub fn kernel_split(t: f64, t0: f64, phi1: &GraphFunction, phi2: &GraphFunction) -> Result<(C64, C64)> {
    if t == t0 {
        return Err(Error::SingularPoint(format!("kernel at t = t₀ = {t0}")));
    }
    let rem = |v: &dyn Fn(f64) -> f64, d: f64| v(t) - v(t0) - d * (t - t0);
    let (d1, d2) = (phi1.derivative(t), phi2.derivative(t));
    let delta = |s: f64| phi2.value(s) - phi1.value(s);
    let r1 = rem(&|s| phi1.value(s), d1);
    let r2 = rem(&|s| phi2.value(s), d2);
    let rd = rem(&delta, d2 - d1);
    let z0 = c64(t0, phi1.value(t0));
    let den = (c64(t, phi1.value(t)) - z0) * (c64(t, phi2.value(t)) - z0);
    let k1 = (C64::i() * rd + d2 * r1 - d1 * r2) / den;
    let k2 = C64::i() * delta(t0) * c64(1.0, d1) / den;
    Ok((k1, k2))
}

/// Complex polynomial Σ c_k ((z − center)/scale)^k minimizing the sup of |values − p| on the points
/// (Lawson's iteratively reweighted least squares).
pub fn minimax_polynomial(points: &[C64], values: &[C64], degree: usize, center: C64, scale: f64, iterations: usize) -> Vec<C64> {
    let n = points.len();
    let m = degree + 1;
    let v = DMatrix::from_fn(n, m, |i, k| ((points[i] - center) / scale).powi(k as i32));
    let b = DVector::from_iterator(n, values.iter().copied());
    let mut w = vec![1.0 / n as f64; n];
    let mut coef = DVector::zeros(m);
    for _ in 0..iterations.max(1) {
        let sw: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
        let a = DMatrix::from_fn(n, m, |i, k| v[(i, k)] * sw[i]);
        let rhs = DVector::from_iterator(n, (0..n).map(|i| b[i] * sw[i]));
        let Ok(sol) = a.svd(true, true).solve(&rhs, 1e-14) else { break };
        coef = sol;
        let r = &v * &coef - &b;
        let mut total = 0.0;
        for i in 0..n {
            w[i] *= r[i].norm();
            total += w[i];
        }
        if !(total > 0.0) {
            break;
        }
        w.iter_mut().for_each(|x| *x /= total);
    }
    coef.iter().copied().collect()
}

pub fn polynomial_function(coef: Vec<C64>, center: C64, scale: f64) -> AnalyticFunction {
    let c = coef.clone();
    AnalyticFunction::new(
        format!("poly(deg {})", coef.len().saturating_sub(1)),
        Arc::new(move |z| {
            let w = (z - center) / scale;
            c.iter().rev().fold(C64::new(0.0, 0.0), |acc, a| acc * w + a)
        }),
        SingularSet::empty(),
        f64::INFINITY,
    )
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Lemma21Report {
    pub lhs: f64,
    pub rhs: f64,
    pub rotundity: f64,
    pub phi_at_a: f64,
    pub probes: usize,
    pub holds: bool,
}

/// Probe grid of g∖K: a lattice of the cell, its boundary, and two-sided offsets of K.
pub fn lemma21_probes(cell: &Cell, k_arc: &[C64], lattice: usize, offset: f64) -> Vec<C64> {
    let (lo, hi) = cell.bbox();
    let mut pts = Vec::new();
    for i in 0..=lattice {
        for j in 0..=lattice {
            let z = c64(
                lo.re + (hi.re - lo.re) * i as f64 / lattice as f64,
                lo.im + (hi.im - lo.im) * j as f64 / lattice as f64,
            );
            if cell.contains(z) {
                pts.push(z);
            }
        }
    }
    // boundary points pulled slightly inward toward the center
    for b in cell.boundary_samples(4 * lattice) {
        pts.push(b + (cell.center - b) * 1e-9);
    }
    for w in k_arc.windows(2) {
        let tang = w[1] - w[0];
        let nrm = C64::i() * tang / tang.norm();
        let mid = 0.5 * (w[0] + w[1]);
        pts.push(mid + nrm * offset);
        pts.push(mid - nrm * offset);
    }
    let ksing = SingularSet::from_polyline(k_arc.to_vec());
    pts.retain(|z| cell.contains(*z) && ksing.distance(*z) > 0.0);
    pts
}

/// lhs = sup |φ − h| over the probes, rhs = (ρ/2)|φ(A)|.
pub fn lemma21_gap(
    phi: &(dyn Fn(C64) -> C64 + Sync),
    phi_at_a: C64,
    cell: &Cell,
    probes: &[C64],
    h_test: &AnalyticFunction,
) -> Result<Lemma21Report> {
    let rho = rotundity(cell)?;
    let (lo, hi) = cell.bbox();
    let scale = (hi - lo).norm();
    let step = 1e-3 * scale;
    let interior: Vec<C64> = probes.iter().copied().filter(|z| cell.boundary_distance(*z) > 2.0 * step).collect();
    let e = h_test.evaluator();
    // scale·|∂̄h| by Richardson-extrapolated central differences, so exact polynomials pass
    let cr = interior
        .par_iter()
        .map(|z| {
            let d = (4.0 * fd_dbar(&*e, *z, 0.5 * step) - fd_dbar(&*e, *z, step)) / 3.0;
            scale * d.norm()
        })
        .reduce(|| 0.0, f64::max);
    let hsup = interior.iter().map(|z| h_test.eval(*z).norm()).fold(0.0, f64::max);
    if cr > 1e-6 * (1.0 + hsup) {
        return Err(Error::InvalidTestFunction(format!("{}: CR residual {cr:.3e} in the cell", h_test.name())));
    }
    let lhs = probes.par_iter().map(|z| (phi(*z) - h_test.eval(*z)).norm()).reduce(|| 0.0, f64::max);
    let rhs = 0.5 * rho * phi_at_a.norm();
    Ok(Lemma21Report { lhs, rhs, rotundity: rho, phi_at_a: phi_at_a.norm(), probes: probes.len(), holds: lhs >= rhs - 1e-6 })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessRow {
    pub n: i32,
    pub x: f64,
    #[serde(rename = "X")]
    pub x_end: f64,
    pub h: f64,
    pub eps: f64,
    pub log_ratio: f64,
    pub phi1_a: f64,
    pub lower_bound: f64,
    pub sum_scan: f64,
    pub delta_probe: f64,
    pub rotundity: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessFamily {
    pub kind: ScheduleKind,
    pub rows: Vec<WitnessRow>,
    /// Regression of |φ₁ˣ(Aˣ)| on log((X − x)/h).
    pub slope: f64,
    pub intercept: f64,
    pub lower_bound_holds: bool,
    pub sum_ratio: f64,
    pub sum_max: f64,
    pub rotundity_min: f64,
    pub rotundity_variation: f64,
}

/// Rows for x = b·2⁻ⁿ, n ∈ ns.
pub fn witness_family(
    phi1: &GraphFunction,
    phi2: &GraphFunction,
    kind: ScheduleKind,
    b: f64,
    ns: &[i32],
    cfg: &ScheduleConfig,
    probes: &ProbeSpec,
) -> Result<WitnessFamily> {
    let rows: Vec<WitnessRow> = ns
        .par_iter()
        .map(|&n| {
            let x = b * 0.5f64.powi(n);
            let pair = WitnessPair::new(phi1.clone(), phi2.clone(), kind, x, cfg)?;
            let p = pair.params;
            let scan = sum_bound_scan(&pair, probes);
            Ok(WitnessRow {
                n,
                x,
                x_end: p.x_end,
                h: p.h,
                eps: p.eps,
                log_ratio: ((p.x_end - x) / p.h).ln(),
                phi1_a: pair.phi1_at_a().norm(),
                lower_bound: pair.blowup_lower_bound(),
                sum_scan: scan.sup,
                delta_probe: scan.delta_probe_min,
                rotundity: rotundity(&pair.cell(cfg.k)?)?,
            })
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.log_ratio).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.phi1_a).collect();
    let (slope, intercept) = if rows.len() >= 2 { linear_fit(&xs, &ys) } else { (f64::NAN, f64::NAN) };
    let smax = rows.iter().map(|r| r.sum_scan).fold(0.0, f64::max);
    let smin = rows.iter().map(|r| r.sum_scan).fold(f64::INFINITY, f64::min);
    let rmax = rows.iter().map(|r| r.rotundity).fold(0.0, f64::max);
    let rmin = rows.iter().map(|r| r.rotundity).fold(f64::INFINITY, f64::min);
    Ok(WitnessFamily {
        kind,
        lower_bound_holds: rows.iter().all(|r| r.phi1_a >= r.lower_bound),
        rows,
        slope,
        intercept,
        sum_ratio: smax / smin,
        sum_max: smax,
        rotundity_min: rmin,
        rotundity_variation: (rmax - rmin) / rmin,
    })
}
