//! Splitting f = f₁ + f₂ from a solution of ∂̄u = f∂̄χ, the test-function
//! catalog, and the certificates attached to a split.

use crate::cutting::CuttingFunction;
use crate::dbar::{
    jones_solution, plateau_scan, scaled_cr_residual, standard_cauchy_solution, tangential_solution, transversal_solution,
    CorridorGrid, DensityField, JonesConfig, PlateauReport, PlateauSpec, QuadratureSpec, SolutionField, SolverKind,
    TangentialConfig,
};
use crate::geometry::{separation_check, ArcCurve};
use crate::numerics::{c64, integrate_adaptive, AdaptiveOptions, C64};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

type Eval = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

/// Polylines on which a function may be singular.
#[derive(Debug, Clone, Default)]
pub struct SingularSet {
    pub polylines: Vec<Vec<C64>>,
}

impl SingularSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_polyline(p: Vec<C64>) -> Self {
        Self { polylines: vec![p] }
    }

    pub fn union(&self, other: &SingularSet) -> Self {
        let mut polylines = self.polylines.clone();
        polylines.extend(other.polylines.iter().cloned());
        Self { polylines }
    }

    pub fn distance(&self, z: C64) -> f64 {
        let mut d = f64::INFINITY;
        for pl in &self.polylines {
            if pl.len() == 1 {
                d = d.min((z - pl[0]).norm());
            }
            for w in pl.windows(2) {
                d = d.min(segment_distance(z, w[0], w[1]));
            }
        }
        d
    }

    /// Vertices plus segment midpoints.
    pub fn samples(&self) -> Vec<C64> {
        let mut out = Vec::new();
        for pl in &self.polylines {
            for w in pl.windows(2) {
                out.push(w[0]);
                out.push(0.5 * (w[0] + w[1]));
            }
            out.extend(pl.last().copied());
        }
        out
    }
}

pub fn segment_distance(z: C64, a: C64, b: C64) -> f64 {
    let ab = b - a;
    let l2 = ab.norm_sqr();
    if l2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * ab.conj()).re / l2).clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

/// Polyline through an arc on a grid 4 points per octave toward the origin.
pub fn arc_polyline(arc: &ArcCurve) -> Vec<C64> {
    let b = arc.t_end();
    let mut ts: Vec<f64> = (1..=64).map(|i| b * i as f64 / 64.0).collect();
    ts.extend((1..=240).map(|j| b * 2f64.powf(-(j as f64) / 4.0)));
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut v = vec![arc.point(0.0)];
    v.extend(ts.into_iter().map(|t| arc.point(t)));
    v
}

/// A bounded function analytic off `singular`.
#[derive(Clone)]
pub struct AnalyticFunction {
    name: String,
    eval: Eval,
    singular: SingularSet,
    sup_bound: f64,
    zero: bool,
}

impl std::fmt::Debug for AnalyticFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnalyticFunction").field("name", &self.name).field("sup_bound", &self.sup_bound).finish()
    }
}

impl AnalyticFunction {
    pub fn new(name: impl Into<String>, eval: Eval, singular: SingularSet, sup_bound: f64) -> Self {
        Self { name: name.into(), eval, singular, sup_bound, zero: false }
    }

    pub fn constant(c: C64) -> Self {
        Self {
            name: format!("const({c})"),
            eval: Arc::new(move |_| c),
            singular: SingularSet::empty(),
            sup_bound: c.norm(),
            zero: c == C64::new(0.0, 0.0),
        }
    }

    pub fn zero() -> Self {
        Self::constant(C64::new(0.0, 0.0))
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn is_zero(&self) -> bool {
        self.zero
    }
    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }
    pub fn singular_set(&self) -> &SingularSet {
        &self.singular
    }
    #[inline]
    pub fn eval(&self, z: C64) -> C64 {
        (self.eval)(z)
    }
    pub fn evaluator(&self) -> Eval {
        self.eval.clone()
    }

    /// c·f.
    pub fn scaled(&self, c: C64) -> Self {
        if c == C64::new(0.0, 0.0) {
            return Self::zero();
        }
        let e = self.eval.clone();
        Self {
            name: format!("{c}·{}", self.name),
            eval: Arc::new(move |z| e(z) * c),
            singular: self.singular.clone(),
            sup_bound: self.sup_bound * c.norm(),
            zero: self.zero,
        }
    }

    /// f + h with a singular set accumulating both.
    pub fn plus(&self, other: &AnalyticFunction) -> Self {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        Self {
            name: format!("{}+{}", self.name, other.name),
            eval: Arc::new(move |z| a(z) + b(z)),
            singular: self.singular.union(&other.singular),
            sup_bound: self.sup_bound + other.sup_bound,
            zero: self.zero && other.zero,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunctionSpec {
    Constant {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    /// w^{iβ}, w = (z − p)/(z − q), cut along the path from the far end p of S₁ through
    /// the common point to the far end q of S₂.
    MobiusPower { beta: f64 },
    /// (1/2πi)∫ φ(t)γ′(t)dt/(γ(t) − z) over one arc (0 = S₁, 1 = S₂), φ(t) = 4A·(t/T)(1 − t/T).
    CauchyDensity { arc: usize, amplitude: f64 },
    /// φ_j of the witness pair at parameter x on the ANGLE schedule over the two graphs.
    Witness { j: usize, x: f64 },
}

/// w^{iβ} on the complement of the polyline `path` from p = path[0] to q = path[last].
pub fn mobius_power(path: Vec<C64>, beta: f64) -> Result<AnalyticFunction> {
    if path.len() < 2 {
        return Err(Error::Construction("branch cut needs at least two points".into()));
    }
    let path = drop_collinear(&path);
    check_simple(&path)?;
    let (p, q) = (path[0], *path.last().unwrap());
    let mut closed = path.clone();
    closed.push(p);
    let wind = Winding::new(&closed);
    let eval = move |z: C64| -> C64 {
        // continuous arg of w off the cut = principal Arg − 2π·wind(cut + [q, p], z)
        let w = (z - p) / (z - q);
        let theta = w.arg() - 2.0 * PI * wind.number(z) as f64;
        (C64::i() * beta * c64(w.norm().ln(), theta)).exp()
    };
    Ok(AnalyticFunction::new(
        format!("mobius_power(β={beta})"),
        Arc::new(eval),
        SingularSet::from_polyline(path),
        (2.0 * PI * beta.abs()).exp(),
    ))
}

/// Remove interior vertices lying on the segment joining their neighbours.
fn drop_collinear(path: &[C64]) -> Vec<C64> {
    let mut out: Vec<C64> = vec![path[0]];
    for i in 1..path.len() - 1 {
        let (a, b, c) = (*out.last().unwrap(), path[i], path[i + 1]);
        let cross = ((b - a).conj() * (c - b)).im;
        let dot = ((b - a).conj() * (c - b)).re;
        if cross.abs() > 1e-14 * (b - a).norm() * (c - b).norm() || dot <= 0.0 {
            out.push(b);
        }
    }
    out.push(*path.last().unwrap());
    out
}

/// Winding numbers of a closed polygon by upward/downward crossings of the ray to the right,
/// with edges bucketed into chunks whose bounding boxes are tested first.
struct Winding {
    edges: Vec<(C64, C64)>,
    chunks: Vec<(usize, usize, f64, f64, f64)>,
}

impl Winding {
    const CHUNK: usize = 16;

    fn new(closed: &[C64]) -> Self {
        let edges: Vec<(C64, C64)> = closed.windows(2).map(|w| (w[0], w[1])).collect();
        let chunks = (0..edges.len())
            .step_by(Self::CHUNK)
            .map(|s| {
                let e = (s + Self::CHUNK).min(edges.len());
                let (mut y0, mut y1, mut x1) = (f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
                for (a, b) in &edges[s..e] {
                    y0 = y0.min(a.im).min(b.im);
                    y1 = y1.max(a.im).max(b.im);
                    x1 = x1.max(a.re).max(b.re);
                }
                (s, e, y0, y1, x1)
            })
            .collect();
        Self { edges, chunks }
    }

    fn number(&self, z: C64) -> i32 {
        let mut n = 0;
        for &(s, e, y0, y1, x1) in &self.chunks {
            if z.im < y0 || z.im > y1 || z.re > x1 {
                continue;
            }
            for (a, b) in &self.edges[s..e] {
                // measured from the nearer endpoint to avoid cancellation close to a vertex
                let o = if (z - a).norm_sqr() <= (z - b).norm_sqr() { a } else { b };
                let side = (b.re - a.re) * (z.im - o.im) - (z.re - o.re) * (b.im - a.im);
                if a.im <= z.im && b.im > z.im && side > 0.0 {
                    n += 1;
                } else if a.im > z.im && b.im <= z.im && side < 0.0 {
                    n -= 1;
                }
            }
        }
        n
    }
}

fn segments_cross(a: C64, b: C64, c: C64, d: C64) -> bool {
    let cross = |u: C64, v: C64| u.re * v.im - u.im * v.re;
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn check_simple(path: &[C64]) -> Result<()> {
    let n = path.len();
    for i in 0..n.saturating_sub(1) {
        for j in i + 2..n - 1 {
            if segments_cross(path[i], path[i + 1], path[j], path[j + 1]) {
                return Err(Error::Construction(format!(
                    "branch cut crosses itself between {} and {}",
                    path[i], path[j]
                )));
            }
        }
    }
    Ok(())
}

/// Cauchy integral over an arc of a Lipschitz density vanishing at both ends.
pub fn cauchy_density(arc: &ArcCurve, amplitude: f64) -> AnalyticFunction {
    let a = arc.clone();
    let t_end = a.t_end();
    let base: Vec<f64> = crate::geometry::refinement_grid(t_end, 50, 32);
    let eval = move |z: C64| -> C64 {
        let mut br = base.clone();
        // refine around the parameter of the closest sample
        let (mut tbest, mut dbest) = (0.0, f64::INFINITY);
        for &t in &base {
            let d = (a.point(t) - z).norm();
            if d < dbest {
                (tbest, dbest) = (t, d);
            }
        }
        for s in [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
            let t = tbest + s * dbest;
            if t > 0.0 && t < t_end {
                br.push(t);
            }
        }
        let f = |t: f64| {
            let phi = 4.0 * amplitude * (t / t_end) * (1.0 - t / t_end);
            a.velocity(t) * phi / (a.point(t) - z)
        };
        let opts = AdaptiveOptions { abs_tol: 1e-13, rel_tol: 1e-11, max_segments: 20000 };
        integrate_adaptive(f, 0.0, t_end, &br, opts).value / (2.0 * PI * C64::i())
    };
    AnalyticFunction::new(
        format!("cauchy_density(A={amplitude})"),
        Arc::new(eval),
        SingularSet::from_polyline(arc_polyline(arc)),
        // |φ| ≤ A and φ Lipschitz: the transform stays bounded; the bound is not sharp
        f64::INFINITY,
    )
}

/// Catalog entry for the singular arcs S₁ = arcs[0], S₂ = arcs[1].
pub fn test_function(spec: &TestFunctionSpec, arcs: &[ArcCurve]) -> Result<AnalyticFunction> {
    match spec {
        TestFunctionSpec::Constant { re, im } => Ok(AnalyticFunction::constant(c64(*re, *im))),
        TestFunctionSpec::MobiusPower { beta } => {
            if arcs.len() != 2 {
                return Err(Error::Construction("Möbius power needs the two arcs S₁, S₂".into()));
            }
            let mut path: Vec<C64> = arc_polyline(&arcs[0]);
            path.reverse();
            let s2 = arc_polyline(&arcs[1]);
            if (path.last().unwrap() - s2[0]).norm() > 1e-12 {
                return Err(Error::Construction("the arcs do not share their initial point".into()));
            }
            path.extend(s2.into_iter().skip(1));
            mobius_power(path, *beta)
        }
        TestFunctionSpec::CauchyDensity { arc, amplitude } => {
            let a = arcs.get(*arc).ok_or_else(|| Error::Construction(format!("no arc with index {arc}")))?;
            Ok(cauchy_density(a, *amplitude))
        }
        TestFunctionSpec::Witness { j, x } => {
            if arcs.len() != 2 || !arcs[0].is_plain_graph() || !arcs[1].is_plain_graph() {
                return Err(Error::Construction("witness functions need two graph arcs".into()));
            }
            let pair = crate::witness::WitnessPair::new(
                arcs[0].graph_fn().clone(),
                arcs[1].graph_fn().clone(),
                crate::witness::ScheduleKind::Angle,
                *x,
                &crate::witness::ScheduleConfig::default(),
            )?;
            Ok(pair.as_analytic(*j))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitConfig {
    pub solver: SolverKind,
    pub grid: CorridorGrid,
    pub quadrature: QuadratureSpec,
    pub jones: JonesConfig,
    /// End of the reflected contour for the tangential solver (defaults to R).
    pub contour_end: Option<f64>,
    pub contour_coefficient: f64,
    pub plateau: PlateauSpec,
    /// Cauchy–Riemann difference step relative to the local length scale.
    pub cr_step: f64,
    /// Plateau level whose grid carries the CR and identity checks.
    pub check_level: usize,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            solver: SolverKind::Transversal,
            grid: CorridorGrid::default(),
            quadrature: QuadratureSpec::default(),
            jones: JonesConfig::default(),
            contour_end: None,
            contour_coefficient: 1.0,
            plateau: PlateauSpec::default(),
            cr_step: 1e-3,
            check_level: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitDiagnostics {
    pub identity_residual: f64,
    pub cr_residual_f1_off_s1: f64,
    pub cr_residual_f2_off_s2: f64,
    pub sup_f1: f64,
    pub sup_f2: f64,
    pub plateau_f1: PlateauReport,
    pub plateau_f2: PlateauReport,
    /// Points used for the CR residuals and the relative step.
    pub cr_points: usize,
    pub cr_step: f64,
    pub certified_bounded: bool,
}

pub struct SplitResult {
    pub f1: AnalyticFunction,
    pub f2: AnalyticFunction,
    pub f: AnalyticFunction,
    pub u: SolutionField,
    pub diagnostics: SplitDiagnostics,
}

/// Solve ∂̄u = f∂̄χ with the chosen solver and form f₁ = f(1−χ) + u, f₂ = fχ − u;
/// χ vanishes near S₁, so f₁ is singular on S₁ only and f₂ on S₂ only.
pub fn split(f: &AnalyticFunction, cf: &CuttingFunction, s1: &SingularSet, s2: &SingularSet, cfg: &SplitConfig) -> Result<SplitResult> {
    let tiny = 1e-12 * cf.radius();
    let off_origin = |s: &SingularSet| s.samples().into_iter().filter(|z| z.norm() > tiny).collect::<Vec<_>>();
    let sep = separation_check(&off_origin(s1), &off_origin(s2), cf.g(), cf.mu());
    if !sep.separated {
        return Err(Error::Hypothesis(format!(
            "S₁, S₂ not separated by the corridor; first violation at {}",
            sep.violations.first().copied().unwrap_or_default()
        )));
    }
    let u = if f.is_zero() {
        standard_cauchy_solution(&DensityField::zero())?
    } else {
        match cfg.solver {
            SolverKind::Tangential => {
                let b = cfg.contour_end.unwrap_or(cf.radius());
                let tc = TangentialConfig { grid: cfg.grid, quadrature: cfg.quadrature, contour_coefficient: cfg.contour_coefficient };
                tangential_solution(f, cf, b, tc)?
            }
            kind => {
                let rho = DensityField::from_cutting(f, cf, cfg.grid, cfg.quadrature)?;
                match kind {
                    SolverKind::Standard => standard_cauchy_solution(&rho)?,
                    SolverKind::Transversal => transversal_solution(&rho)?,
                    _ => jones_solution(&rho, cfg.jones)?,
                }
            }
        }
    };
    Ok(assemble(f, cf, s1, s2, u, cfg))
}

/// Values of u remembered by exact argument, so f₁ and f₂ evaluated at one point share a solve.
struct Memo {
    u: SolutionField,
    map: Mutex<HashMap<(u64, u64), C64>>,
}

impl Memo {
    const CAP: usize = 1 << 18;

    fn eval(&self, z: C64) -> C64 {
        let key = (z.re.to_bits(), z.im.to_bits());
        if let Some(v) = self.map.lock().unwrap().get(&key) {
            return *v;
        }
        let v = self.u.eval(z);
        let mut m = self.map.lock().unwrap();
        if m.len() >= Self::CAP {
            m.clear();
        }
        m.insert(key, v);
        v
    }
}

/// f₁, f₂ from a given solution u; diagnostics on the configured grids.
pub fn assemble(f: &AnalyticFunction, cf: &CuttingFunction, s1: &SingularSet, s2: &SingularSet, u: SolutionField, cfg: &SplitConfig) -> SplitResult {
    let memo = Arc::new(Memo { u: u.clone(), map: Mutex::new(HashMap::new()) });
    let (fa, ca, ua) = (f.clone(), cf.clone(), memo.clone());
    let f1 = AnalyticFunction::new(
        format!("f1[{}]", f.name()),
        Arc::new(move |z| {
            let w = 1.0 - ca.chi(z);
            let head = if w == 0.0 { C64::new(0.0, 0.0) } else { fa.eval(z) * w };
            head + ua.eval(z)
        }),
        s1.clone(),
        f64::INFINITY,
    );
    let (fb, cb, ub) = (f.clone(), cf.clone(), memo);
    let f2 = AnalyticFunction::new(
        format!("f2[{}]", f.name()),
        Arc::new(move |z| {
            let w = cb.chi(z);
            let head = if w == 0.0 { C64::new(0.0, 0.0) } else { fb.eval(z) * w };
            head - ub.eval(z)
        }),
        s2.clone(),
        f64::INFINITY,
    );
    let mut sr = SplitResult { f1, f2, f: f.clone(), u, diagnostics: empty_diagnostics(cfg) };
    sr.diagnostics = verify_split(&sr, &cfg.plateau, cfg.check_level, cfg.cr_step);
    sr
}

fn empty_diagnostics(cfg: &SplitConfig) -> SplitDiagnostics {
    let empty = crate::dbar::plateau_from_rings(&vec![0.0; cfg.plateau.rings(cfg.plateau.levels) + 1], cfg.plateau);
    SplitDiagnostics {
        identity_residual: 0.0,
        cr_residual_f1_off_s1: 0.0,
        cr_residual_f2_off_s2: 0.0,
        sup_f1: 0.0,
        sup_f2: 0.0,
        plateau_f1: empty.clone(),
        plateau_f2: empty,
        cr_points: 0,
        cr_step: cfg.cr_step,
        certified_bounded: true,
    }
}

/// Recompute the diagnostics of a split on the plateau grid of `plateau`: identity residual,
/// scale-invariant CR residuals of f_j away from S_j, sups and plateaus.
pub fn verify_split(sr: &SplitResult, plateau: &PlateauSpec, check_level: usize, cr_step: f64) -> SplitDiagnostics {
    let grid = plateau.grid(check_level.min(plateau.levels));
    let s = sr.f.singular_set();
    let identity_residual = grid
        .par_iter()
        .filter(|z| s.distance(**z) > 0.0)
        .map(|&z| (sr.f.eval(z) - sr.f1.eval(z) - sr.f2.eval(z)).norm())
        .reduce(|| 0.0, f64::max);
    let a = c64(plateau.center_re, plateau.center_im);
    let cr = |fj: &AnalyticFunction| {
        let sj = fj.singular_set().clone();
        let e = fj.evaluator();
        // the lower half-plane is outside the domain; keep the difference stencil above the axis
        let scale = move |z: C64| (z - a).norm().min(sj.distance(z)).min(z.im / (1.0 + cr_step));
        scaled_cr_residual(&*e, &grid, &scale, cr_step)
    };
    let cr1 = cr(&sr.f1);
    let cr2 = cr(&sr.f2);
    let e1 = sr.f1.evaluator();
    let e2 = sr.f2.evaluator();
    let p1 = plateau_scan(&*e1, *plateau);
    let p2 = plateau_scan(&*e2, *plateau);
    SplitDiagnostics {
        identity_residual,
        cr_residual_f1_off_s1: cr1,
        cr_residual_f2_off_s2: cr2,
        sup_f1: p1.levels.last().map_or(0.0, |l| l.sup),
        sup_f2: p2.levels.last().map_or(0.0, |l| l.sup),
        certified_bounded: p1.certified_bounded && p2.certified_bounded,
        plateau_f1: p1,
        plateau_f2: p2,
        cr_points: grid.len(),
        cr_step,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{GraphFunction, GraphSpec};

    /// Continuous arg of w by summing the angles the cut subtends at z.
    fn mobius_by_angle_sum(path: &[C64], beta: f64, z: C64) -> C64 {
        let (p, q) = (path[0], *path.last().unwrap());
        let theta: f64 = path.windows(2).map(|w| ((w[1] - z) / (w[0] - z)).arg()).sum();
        (C64::i() * beta * c64((z - p).norm().ln() - (z - q).norm().ln(), -theta)).exp()
    }

    fn ex3_arcs() -> Vec<ArcCurve> {
        vec![
            ArcCurve::graph(GraphFunction::new(GraphSpec::power(1.0, 2.0), 0.5).unwrap()),
            ArcCurve::graph(GraphFunction::new(GraphSpec::power(2.0, 2.0), 0.5).unwrap()),
        ]
    }

    #[test]
    fn mobius_branch_matches_angle_sum() {
        let arcs = ex3_arcs();
        let mut path = arc_polyline(&arcs[0]);
        path.reverse();
        path.extend(arc_polyline(&arcs[1]).into_iter().skip(1));
        let f = mobius_power(path.clone(), 1.0).unwrap();
        for i in 0..40 {
            for j in 0..40 {
                let z = c64(-0.2 + 0.02 * i as f64 + 1e-7, -0.3 + 0.02 * j as f64 + 3e-7);
                let a = mobius_by_angle_sum(&path, 1.0, z);
                assert!((f.eval(z) - a).norm() < 1e-9 * (1.0 + a.norm()), "z = {z}");
            }
        }
    }

    #[test]
    fn mobius_branch_near_the_common_point() {
        let rays = vec![ArcCurve::ray(0.5f64.atan(), 0.5).unwrap(), ArcCurve::ray(4f64.atan(), 0.5).unwrap()];
        let f = test_function(&TestFunctionSpec::MobiusPower { beta: 0.5 }, &rays).unwrap();
        let path = f.singular_set().polylines[0].clone();
        for n in [10, 30, 60] {
            for a in [0.3, 0.9, 1.2, 2.5, -0.5] {
                let z = C64::from_polar(0.5f64.powi(n), a);
                let want = mobius_by_angle_sum(&path, 0.5, z);
                assert!((f.eval(z) - want).norm() < 1e-9, "n = {n}, angle {a}");
            }
        }
    }

    #[test]
    fn mobius_sup_below_declared_bound() {
        let f = test_function(&TestFunctionSpec::MobiusPower { beta: 1.0 }, &ex3_arcs()).unwrap();
        assert!((f.sup_bound() - (2.0 * PI).exp()).abs() < 1e-9);
        let mut sup: f64 = 0.0;
        for i in 0..80 {
            for j in 0..80 {
                let z = c64(-0.5 + 1.5 * i as f64 / 80.0 + 1e-9, -0.5 + 1.5 * j as f64 / 80.0 + 1e-9);
                sup = sup.max(f.eval(z).norm());
            }
        }
        assert!(sup <= f.sup_bound());
    }

    #[test]
    fn mobius_is_analytic_off_the_cut() {
        let f = test_function(&TestFunctionSpec::MobiusPower { beta: 0.7 }, &ex3_arcs()).unwrap();
        let pts = [c64(0.2, 0.06), c64(-0.1, 0.1), c64(0.3, 0.4), c64(0.4, -0.2)];
        let e = f.evaluator();
        assert!(crate::dbar::cr_residual(&*e, &pts, 1e-5) < 1e-5);
    }

    #[test]
    fn self_crossing_cut_is_rejected() {
        let path = vec![c64(0.0, 0.0), c64(1.0, 1.0), c64(1.0, 0.0), c64(0.0, 1.0)];
        assert!(matches!(mobius_power(path, 1.0), Err(Error::Construction(_))));
    }

    #[test]
    fn constant_and_zero() {
        let one = test_function(&TestFunctionSpec::Constant { re: 1.0, im: 0.0 }, &[]).unwrap();
        assert_eq!(one.eval(c64(3.0, 1.0)), c64(1.0, 0.0));
        assert_eq!(one.sup_bound(), 1.0);
        assert!(AnalyticFunction::zero().is_zero());
    }

    #[test]
    fn cauchy_density_jumps_across_its_arc() {
        let arcs = ex3_arcs();
        let f = cauchy_density(&arcs[0], 1.0);
        let t: f64 = 0.2;
        let z0 = arcs[0].point(t);
        let n = C64::i() * arcs[0].velocity(t) / arcs[0].velocity(t).norm();
        let d = 1e-7;
        let jump = f.eval(z0 + n * d) - f.eval(z0 - n * d);
        let phi = 4.0 * (t / 0.5) * (1.0 - t / 0.5);
        assert!((jump - phi).norm() < 1e-4, "jump {jump}");
    }

    #[test]
    fn segment_distance_cases() {
        assert!((segment_distance(c64(0.5, 1.0), c64(0.0, 0.0), c64(1.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((segment_distance(c64(2.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)) - 1.0).abs() < 1e-15);
    }
}
