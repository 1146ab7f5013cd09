use super::density::{CorridorGrid, DensityField, Support};
use super::quadrature::{NodeRef, QuadratureSpec};
use crate::cutting::CuttingFunction;
use crate::geometry::refinement_grid;
use crate::numerics::{c64, integrate_adaptive, AdaptiveOptions, C64};
use crate::splitter::AnalyticFunction;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Standard,
    Jones,
    Transversal,
    Tangential,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Standard => "standard",
            SolverKind::Jones => "jones",
            SolverKind::Transversal => "transversal",
            SolverKind::Tangential => "tangential",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionMeta {
    pub solver: SolverKind,
    pub quadrature: QuadratureSpec,
    pub nodes: usize,
    pub alpha: Option<f64>,
    pub contour_coefficient: Option<f64>,
}

#[derive(Clone)]
pub struct SolutionField {
    eval: Arc<dyn Fn(C64) -> C64 + Send + Sync>,
    pub meta: SolutionMeta,
}

impl std::fmt::Debug for SolutionField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolutionField").field("meta", &self.meta).finish()
    }
}

impl SolutionField {
    pub fn new(eval: Arc<dyn Fn(C64) -> C64 + Send + Sync>, meta: SolutionMeta) -> Self {
        Self { eval, meta }
    }

    fn zero(solver: SolverKind) -> Self {
        Self::new(
            Arc::new(|_| C64::new(0.0, 0.0)),
            SolutionMeta { solver, quadrature: QuadratureSpec::default(), nodes: 0, alpha: None, contour_coefficient: None },
        )
    }

    #[inline]
    pub fn eval(&self, z: C64) -> C64 {
        (self.eval)(z)
    }

    pub fn eval_many(&self, zs: &[C64]) -> Vec<C64> {
        zs.par_iter().map(|z| self.eval(*z)).collect()
    }

    pub fn evaluator(&self) -> Arc<dyn Fn(C64) -> C64 + Send + Sync> {
        self.eval.clone()
    }
}

fn meta(rho: &DensityField, solver: SolverKind) -> SolutionMeta {
    SolutionMeta {
        solver,
        quadrature: rho.quadrature().spec(),
        nodes: rho.nodes().len(),
        alpha: None,
        contour_coefficient: None,
    }
}

/// Cᵖ(z) = (1/π)∫ ρ(ζ)/(z − ζ) dA(ζ).
pub fn standard_cauchy_solution(rho: &DensityField) -> Result<SolutionField> {
    if rho.is_zero() {
        return Ok(SolutionField::zero(SolverKind::Standard));
    }
    rho.check_integrable()?;
    let r = rho.clone();
    Ok(SolutionField::new(
        Arc::new(move |z| r.quadrature().integrate(&[z], &|n: &NodeRef| n.rho / (z - n.z)) / PI),
        meta(rho, SolverKind::Standard),
    ))
}

fn check_sector(rho: &DensityField) -> Result<()> {
    let Support::Corridor { mu, radius, sector_slope: Some(k) } = rho.support() else {
        return Err(Error::Geometry(format!("{}: support is not declared inside a sector", rho.label())));
    };
    let (lo, hi) = (k.atan(), ((1.0 + mu) * k).atan());
    for n in rho.nodes() {
        if n.rho == C64::new(0.0, 0.0) {
            continue;
        }
        if n.z.im <= 0.0 {
            return Err(Error::Geometry(format!("density node {} below the real axis", n.z)));
        }
        if n.z.norm() < radius {
            let a = n.z.arg();
            if a < lo - 1e-9 || a > hi + 1e-9 {
                return Err(Error::Geometry(format!("density node {} outside the sector [{lo}, {hi}]", n.z)));
            }
        }
    }
    Ok(())
}

/// a(ζ) = (1/π)∫ (z̄/z)·ρ(z)/(ζ − z̄) dA(z); analytic in C⁺.
pub fn transversal_correction(rho: &DensityField) -> Result<SolutionField> {
    if rho.is_zero() {
        return Ok(SolutionField::zero(SolverKind::Transversal));
    }
    check_sector(rho)?;
    let r = rho.clone();
    Ok(SolutionField::new(
        Arc::new(move |zeta| {
            r.quadrature().integrate(&[zeta.conj()], &|n: &NodeRef| {
                let zb = n.z.conj();
                n.rho * (zb / n.z) / (zeta - zb)
            }) / PI
        }),
        meta(rho, SolverKind::Transversal),
    ))
}

/// u = Cᵖ − a for densities supported in a sector.
pub fn transversal_solution(rho: &DensityField) -> Result<SolutionField> {
    if rho.is_zero() {
        return Ok(SolutionField::zero(SolverKind::Transversal));
    }
    rho.check_integrable()?;
    check_sector(rho)?;
    let r = rho.clone();
    Ok(SolutionField::new(
        Arc::new(move |zeta| {
            r.quadrature().integrate(&[zeta, zeta.conj()], &|n: &NodeRef| {
                let zb = n.z.conj();
                n.rho * (1.0 / (zeta - n.z) - (zb / n.z) / (zeta - zb))
            }) / PI
        }),
        meta(rho, SolverKind::Transversal),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JonesConfig {
    /// Probe rings r = 2·scale·2^{−j/per_octave}, j ≤ octaves·per_octave.
    pub octaves: usize,
    pub per_octave: usize,
    pub angles: usize,
    pub taylor_terms: usize,
    /// Geometric height bins per octave for the measure below Im ζ.
    pub bins_per_octave: usize,
}

impl Default for JonesConfig {
    fn default() -> Self {
        Self { octaves: 36, per_octave: 2, angles: 24, taylor_terms: 30, bins_per_octave: 4 }
    }
}

impl JonesConfig {
    pub fn refined(self) -> Self {
        Self { per_octave: 2 * self.per_octave, angles: 2 * self.angles, ..self }
    }
}

/// Point masses approximating |ρ|dA (2×2 clusters of each cell's Gauss nodes), sorted
/// by height and grouped into geometric height bins (lower_m, upper_m]. The measure
/// restricted to {Im w ≤ y} is realised with a linear ramp of each group over its bin,
/// so the exponent is Lipschitz in y with slopes set by the bin width, not by the gaps
/// between cluster heights.
struct HeightMeasure {
    z: Vec<C64>,
    mass: Vec<f64>,
    /// group m occupies sorted points [start[m], start[m+1]).
    start: Vec<usize>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl HeightMeasure {
    fn new(rho: &DensityField, bins_per_octave: usize) -> Self {
        let nodes = rho.nodes();
        let order = rho.quadrature().spec().order;
        let half = order.div_ceil(2);
        let mut pts: Vec<(C64, f64)> = Vec::new();
        for range in rho.quadrature().cell_ranges() {
            let mut acc = [(C64::new(0.0, 0.0), 0.0f64); 4];
            for (k, n) in nodes[range].iter().enumerate() {
                let q = 2 * usize::from(k / order >= half) + usize::from(k % order >= half);
                let m = n.w * n.rho.norm();
                acc[q].0 += n.z * m;
                acc[q].1 += m;
            }
            pts.extend(acc.iter().filter(|(_, m)| *m > 0.0).map(|(zm, m)| (zm / *m, *m)));
        }
        pts.sort_by(|a, b| a.0.im.total_cmp(&b.0.im));
        let bpo = bins_per_octave.max(1) as f64;
        let edge = |k: f64| (k / bpo).exp2();
        let (mut z, mut mass, mut start, mut lower, mut upper) = (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
        let mut current = f64::NAN;
        for (k, (p, m)) in pts.into_iter().enumerate() {
            // bin (2^{b/bpo}, 2^{(b+1)/bpo}]; non-positive heights share one degenerate bin at 0
            let b = if p.im > 0.0 { (p.im.log2() * bpo).ceil() - 1.0 } else { f64::NEG_INFINITY };
            if b != current {
                current = b;
                start.push(k);
                if b.is_finite() {
                    lower.push(edge(b));
                    upper.push(edge(b + 1.0));
                } else {
                    lower.push(0.0);
                    upper.push(0.0);
                }
            }
            z.push(p);
            mass.push(m);
        }
        start.push(z.len());
        Self { z, mass, start, lower, upper }
    }

    fn groups(&self) -> usize {
        self.upper.len()
    }

    /// (m, frac): the ramp for height y acts fully on groups < m and by `frac` on group m.
    fn locate(&self, y: f64) -> (usize, f64) {
        let m = self.upper.partition_point(|&u| u <= y);
        if m == self.groups() {
            return (m, 0.0);
        }
        let span = self.upper[m] - self.lower[m];
        let frac = if span > 0.0 { ((y - self.lower[m]) / span).clamp(0.0, 1.0) } else { 0.0 };
        (m, frac)
    }

    /// Σ_j H_j(y)·mass_j·k(w_j).
    fn ramp_sum<T, K>(&self, y: f64, zero: T, k: K) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Copy,
        K: Fn(C64) -> T,
    {
        let (m, frac) = self.locate(y);
        let mut full = zero;
        for j in 0..self.start[m.min(self.groups())] {
            full = full + k(self.z[j]) * self.mass[j];
        }
        if m < self.groups() && frac > 0.0 {
            let mut part = zero;
            for j in self.start[m]..self.start[m + 1] {
                part = part + k(self.z[j]) * self.mass[j];
            }
            full = full + part * frac;
        }
        full
    }

    /// A(ζ) = ∫_{Im w ≤ Im ζ} 2 Im ζ/|w − ζ̄|² |ρ(w)| dA(w).
    fn balayage(&self, zeta: C64) -> f64 {
        let zb = zeta.conj();
        self.ramp_sum(zeta.im, 0.0, |w| 2.0 * zeta.im / (w - zb).norm_sqr())
    }
}

fn probe_points(rho: &DensityField, cfg: &JonesConfig) -> Vec<Vec<C64>> {
    let center = rho.accumulation_point().unwrap_or_else(|| {
        let n = rho.nodes();
        n.iter().map(|q| q.z).sum::<C64>() / n.len().max(1) as f64
    });
    let c = c64(center.re, center.im.max(0.0));
    let rmax = 2.0 * rho.scale();
    (0..=cfg.octaves * cfg.per_octave)
        .map(|j| {
            let r = rmax * 2f64.powf(-(j as f64) / cfg.per_octave as f64);
            (0..cfg.angles).map(|i| c + C64::from_polar(r, PI * (i as f64 + 0.5) / cfg.angles as f64)).collect()
        })
        .collect()
}

/// Report on α⁻¹ = sup_ζ A(ζ) over the probe rings and the density nodes.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaReport {
    pub alpha_inverse: f64,
    pub ring_maxima: Vec<f64>,
    pub probes: usize,
}

fn alpha_report(hm: &HeightMeasure, rho: &DensityField, cfg: &JonesConfig) -> AlphaReport {
    let rings = probe_points(rho, cfg);
    let ring_maxima: Vec<f64> =
        rings.par_iter().map(|ring| ring.iter().map(|z| hm.balayage(*z)).fold(0.0, f64::max)).collect();
    let node_max = hm.z.par_iter().map(|z| hm.balayage(*z)).reduce(|| 0.0, f64::max);
    let alpha_inverse = ring_maxima.iter().copied().fold(node_max, f64::max);
    AlphaReport { alpha_inverse, ring_maxima, probes: rings.iter().map(Vec::len).sum::<usize>() + hm.z.len() }
}

/// α⁻¹ for the Jones solution of ρ on the configured probe grid.
pub fn jones_alpha_inverse(rho: &DensityField, cfg: &JonesConfig) -> AlphaReport {
    alpha_report(&HeightMeasure::new(rho, cfg.bins_per_octave), rho, cfg)
}

struct JonesData {
    hm: HeightMeasure,
    alpha: f64,
    /// ramp location of every quadrature node's height.
    loc: Vec<(usize, f64)>,
    /// Ψ(ζ_i) = Φ(ζ_i, Im ζ_i) for every quadrature node.
    psi: Vec<C64>,
    taylor_terms: usize,
}

impl JonesData {
    /// Prefix sums over groups of mass_j/(z − w̄_j), and min_j |z − w̄_j|.
    fn prefix(&self, z: C64) -> (Vec<C64>, f64) {
        let hm = &self.hm;
        let mut p = Vec::with_capacity(hm.groups() + 1);
        p.push(C64::new(0.0, 0.0));
        let mut acc = C64::new(0.0, 0.0);
        let mut dmin = f64::INFINITY;
        for m in 0..hm.groups() {
            for j in hm.start[m]..hm.start[m + 1] {
                let d = z - hm.z[j].conj();
                dmin = dmin.min(d.norm());
                acc += hm.mass[j] / d;
            }
            p.push(acc);
        }
        (p, dmin)
    }

    fn from_prefix(&self, p: &[C64], y: f64) -> C64 {
        self.at_location(p, self.hm.locate(y))
    }

    fn at_location(&self, p: &[C64], (m, frac): (usize, f64)) -> C64 {
        if m >= self.hm.groups() {
            return p[self.hm.groups()];
        }
        p[m] + (p[m + 1] - p[m]) * frac
    }

    fn phi_direct(&self, z: C64, y: f64) -> C64 {
        self.hm.ramp_sum(y, C64::new(0.0, 0.0), |w| 1.0 / (z - w.conj()))
    }

    /// Prefix sums of the Taylor coefficients of ζ ↦ Σ mass_j/(ζ − w̄_j) about z.
    fn taylor_prefix(&self, z: C64) -> Vec<C64> {
        let hm = &self.hm;
        let nt = self.taylor_terms;
        let ng = hm.groups();
        let mut q = vec![C64::new(0.0, 0.0); nt * (ng + 1)];
        let mut acc = vec![C64::new(0.0, 0.0); nt];
        for m in 0..ng {
            for j in hm.start[m]..hm.start[m + 1] {
                let inv = 1.0 / (z - hm.z[j].conj());
                let mut t = inv * hm.mass[j];
                for a in acc.iter_mut() {
                    *a += t;
                    t *= -inv;
                }
            }
            for n in 0..nt {
                q[n * (ng + 1) + m + 1] = acc[n];
            }
        }
        q
    }

    fn eval(&self, rho: &DensityField, z: C64) -> C64 {
        let (p, dmin) = self.prefix(z);
        let taylor: RefCell<Option<Vec<C64>>> = RefCell::new(None);
        let ng = self.hm.groups();
        let i = C64::i();
        let kernel = |n: &NodeRef| -> C64 {
            let zeta = n.z;
            let (phi_z, psi) = match n.index {
                Some(k) => (self.at_location(&p, self.loc[k]), self.psi[k]),
                None => {
                    let y = zeta.im;
                    let phi_z = self.from_prefix(&p, y);
                    let dz = zeta - z;
                    let psi = if dz.norm() <= 0.5 * dmin {
                        let mut t = taylor.borrow_mut();
                        let q = t.get_or_insert_with(|| self.taylor_prefix(z));
                        let (m, frac) = self.hm.locate(y);
                        let mut s = C64::new(0.0, 0.0);
                        let mut pw = C64::new(1.0, 0.0);
                        for term in 0..self.taylor_terms {
                            let row = &q[term * (ng + 1)..(term + 1) * (ng + 1)];
                            let c = if m >= ng { row[ng] } else { row[m] + (row[m + 1] - row[m]) * frac };
                            s += c * pw;
                            pw *= dz;
                        }
                        s
                    } else {
                        self.phi_direct(zeta, y)
                    };
                    (phi_z, psi)
                }
            };
            let e = (-i * phi_z + i * psi) * self.alpha;
            let kern = (2.0 * i / PI) / (z - zeta) * (zeta.im / (z - zeta.conj()));
            kern * e.exp() * n.rho
        };
        rho.quadrature().integrate(&[z, z.conj()], &kernel)
    }
}

/// The adapted Jones solution with α⁻¹ = sup of the balayage over the probe grid.
pub fn jones_solution(rho: &DensityField, cfg: JonesConfig) -> Result<SolutionField> {
    if rho.is_zero() {
        return Ok(SolutionField::zero(SolverKind::Jones));
    }
    rho.check_integrable()?;
    if rho.nodes().iter().any(|n| n.rho != C64::new(0.0, 0.0) && n.z.im <= 0.0) {
        return Err(Error::Domain("Jones solution needs ρ supported in the upper half-plane".into()));
    }
    let hm = HeightMeasure::new(rho, cfg.bins_per_octave);
    let report = alpha_report(&hm, rho, &cfg);
    let ainv = report.alpha_inverse;
    if ainv == 0.0 {
        return Ok(SolutionField::zero(SolverKind::Jones));
    }
    if !ainv.is_finite() {
        return Err(Error::CarlesonViolation("α⁻¹ is not finite".into()));
    }
    // the sup must settle as the rings shrink toward the accumulation point
    let rm = &report.ring_maxima;
    let third = rm.len() / 3;
    if third > 0 {
        let mid = rm[third..2 * third].iter().copied().fold(0.0, f64::max);
        let inner = rm[2 * third..].iter().copied().fold(0.0, f64::max);
        if mid > 0.0 && inner > 1.5 * mid {
            return Err(Error::CarlesonViolation(format!(
                "balayage grows toward the accumulation point: {mid:.3e} → {inner:.3e}"
            )));
        }
    }
    let nodes = rho.nodes();
    let loc = nodes.iter().map(|n| hm.locate(n.z.im)).collect();
    let mut data = JonesData { hm, alpha: 1.0 / ainv, loc, psi: Vec::new(), taylor_terms: cfg.taylor_terms };
    data.psi = nodes
        .par_iter()
        .map(|n| if n.rho == C64::new(0.0, 0.0) { C64::new(0.0, 0.0) } else { data.phi_direct(n.z, n.z.im) })
        .collect();
    let mut m = meta(rho, SolverKind::Jones);
    m.alpha = Some(data.alpha);
    let data = Arc::new(data);
    let r = rho.clone();
    Ok(SolutionField::new(Arc::new(move |z| data.eval(&r, z)), m))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TangentialConfig {
    pub grid: CorridorGrid,
    pub quadrature: QuadratureSpec,
    /// Multiplier c of the contour term (c/2πi)∫_{γ̄₁} f(z̄)dz/(ζ − z).
    pub contour_coefficient: f64,
}

impl Default for TangentialConfig {
    fn default() -> Self {
        Self { grid: CorridorGrid::default(), quadrature: QuadratureSpec::default(), contour_coefficient: 1.0 }
    }
}

fn check_tangential_hypotheses(cf: &CuttingFunction, b: f64) -> Result<()> {
    let g = cf.g();
    if !(b > 0.0) {
        return Err(Error::Hypothesis(format!("contour end b must be positive, got {b}")));
    }
    let outer = cf.cutoff().outer;
    if (0..=2000).any(|i| g.value(-outer * i as f64 / 2000.0) != 0.0) {
        return Err(Error::Hypothesis("g must vanish on (−∞, 0]".into()));
    }
    if let Some(t) = refinement_grid(b, 50, 4000).into_iter().find(|&t| g.value(t) <= 0.0) {
        return Err(Error::Hypothesis(format!("g(x) > 0 for 0 < x ≤ b fails at x = {t:.3e}")));
    }
    Ok(())
}

/// (c/2πi)∫_{γ̄₁} f(z̄) dz/(ζ − z) along γ̄₁: t ↦ t − i g(t), t ∈ [0, b].
pub fn tangential_contour_term(f: &AnalyticFunction, cf: &CuttingFunction, b: f64, coefficient: f64) -> Result<SolutionField> {
    check_tangential_hypotheses(cf, b)?;
    let (fc, g) = (f.clone(), cf.g().clone());
    let mut base: Vec<f64> = refinement_grid(b, 60, 16);
    base.extend(g.kinks().iter().copied().filter(|k| *k > 0.0 && *k < b));
    let eval = move |zeta: C64| -> C64 {
        if fc.is_zero() {
            return C64::new(0.0, 0.0);
        }
        let mut br = base.clone();
        let x = zeta.re;
        if x > 0.0 && x < b {
            let d = zeta.norm().max(1e-300);
            for s in [-1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0] {
                let t = x + s * d;
                if t > 0.0 && t < b {
                    br.push(t);
                }
            }
        }
        let integrand = |t: f64| {
            let gt = g.value(t);
            let z = c64(t, -gt);
            fc.eval(c64(t, gt)) * c64(1.0, -g.derivative(t)) / (zeta - z)
        };
        let opts = AdaptiveOptions { abs_tol: 1e-13, rel_tol: 1e-11, max_segments: 20000 };
        let v = integrate_adaptive(integrand, 0.0, b, &br, opts).value;
        v * coefficient / (2.0 * PI * C64::i())
    };
    Ok(SolutionField::new(
        Arc::new(eval),
        SolutionMeta {
            solver: SolverKind::Tangential,
            quadrature: QuadratureSpec::default(),
            nodes: 0,
            alpha: None,
            contour_coefficient: Some(coefficient),
        },
    ))
}

/// Standard solution of ∂̄u = f∂̄χ plus the contour correction along the reflected graph.
pub fn tangential_solution(f: &AnalyticFunction, cf: &CuttingFunction, b: f64, cfg: TangentialConfig) -> Result<SolutionField> {
    check_tangential_hypotheses(cf, b)?;
    if f.is_zero() {
        return Ok(SolutionField::zero(SolverKind::Tangential));
    }
    let rho = DensityField::from_cutting(f, cf, cfg.grid, cfg.quadrature)?;
    let area = standard_cauchy_solution(&rho)?;
    let contour = tangential_contour_term(f, cf, b, cfg.contour_coefficient)?;
    let mut m = meta(&rho, SolverKind::Tangential);
    m.contour_coefficient = Some(cfg.contour_coefficient);
    Ok(SolutionField::new(Arc::new(move |z| area.eval(z) + contour.eval(z)), m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutting::CuttingFunction;
    use crate::dbar::{fd_dbar, CorridorGrid};
    use crate::geometry::{GraphFunction, GraphSpec};

    fn corridor(g: GraphSpec, mu: f64) -> CuttingFunction {
        CuttingFunction::new(GraphFunction::new(g, 2.0).unwrap(), mu, 1.0).unwrap()
    }

    fn constant_density(cf: &CuttingFunction) -> DensityField {
        let f = AnalyticFunction::constant(c64(1.0, 0.0));
        DensityField::from_cutting(&f, cf, CorridorGrid::default(), QuadratureSpec::default()).unwrap()
    }

    fn dbar_matches(u: &SolutionField, rho: &DensityField, z: C64) {
        let d = fd_dbar(&|w| u.eval(w), z, 1e-3);
        let r = rho.eval(z);
        assert!((d - r).norm() <= 1e-4 * (1.0 + r.norm()), "{z}: ∂̄u = {d}, ρ = {r}");
    }

    #[test]
    fn standard_solution_of_the_unit_disc() {
        let rho = DensityField::disc(c64(0.0, 0.0), 1.0, c64(1.0, 0.0), 8, QuadratureSpec::default());
        let u = standard_cauchy_solution(&rho).unwrap();
        for z in [c64(0.2, -0.3), c64(0.0, 0.9), c64(1.3, 0.4), c64(-2.0, -1.0)] {
            let want = if z.norm() < 1.0 { z.conj() } else { 1.0 / z };
            assert!((u.eval(z) - want).norm() < 1e-10, "{z}: {} vs {want}", u.eval(z));
        }
    }

    #[test]
    fn zero_density_gives_zero_solutions() {
        let rho = DensityField::zero();
        let z = c64(0.1, 0.2);
        assert_eq!(standard_cauchy_solution(&rho).unwrap().eval(z), C64::new(0.0, 0.0));
        assert_eq!(transversal_solution(&rho).unwrap().eval(z), C64::new(0.0, 0.0));
        assert_eq!(jones_solution(&rho, JonesConfig::default()).unwrap().eval(z), C64::new(0.0, 0.0));
    }

    #[test]
    fn transversal_correction_is_analytic_and_solution_solves() {
        let cf = corridor(GraphSpec::linear(1.0), 1.0);
        let rho = constant_density(&cf);
        let a = transversal_correction(&rho).unwrap();
        for z in [cf.corridor_point(0.3, 0.5), c64(-0.2, 0.1), c64(0.5, 2.0)] {
            let d = fd_dbar(&|w| a.eval(w), z, 1e-3);
            assert!(d.norm() < 1e-5, "{z}: {d}");
        }
        let u = transversal_solution(&rho).unwrap();
        dbar_matches(&u, &rho, cf.corridor_point(0.3, 0.5));
        // u = Cᵖ − a
        let z = c64(0.2, 0.7);
        let c = standard_cauchy_solution(&rho).unwrap().eval(z);
        // the combined integral refines cells near ζ and ζ̄ together; the cutoff band on
        // coarse cells limits agreement to quadrature accuracy
        let gap = (u.eval(z) - (c - a.eval(z))).norm();
        assert!(gap < 1e-6 * (1.0 + c.norm()), "{gap:e} {c}");
    }

    #[test]
    fn transversal_rejects_densities_outside_a_sector() {
        let rho = DensityField::disc(c64(0.0, 1.0), 0.5, c64(1.0, 0.0), 4, QuadratureSpec::default());
        assert!(transversal_solution(&rho).is_err());
    }

    #[test]
    fn jones_solves_and_is_homogeneous() {
        let cf = corridor(GraphSpec::linear(1.0), 1.0);
        let rho = constant_density(&cf);
        let u = jones_solution(&rho, JonesConfig::default()).unwrap();
        assert!(u.meta.alpha.is_some_and(|a| a > 0.0));
        dbar_matches(&u, &rho, cf.corridor_point(0.3, 0.5));
        let u2 = jones_solution(&rho.scaled(c64(0.0, 2.0)), JonesConfig::default()).unwrap();
        let z = c64(0.25, 0.4);
        assert!((u2.eval(z) - c64(0.0, 2.0) * u.eval(z)).norm() < 1e-10 * (1.0 + u.eval(z).norm()));
    }

    #[test]
    fn jones_rejects_lower_half_plane_support() {
        let rho = DensityField::disc(c64(0.0, -1.0), 0.5, c64(1.0, 0.0), 4, QuadratureSpec::default());
        assert!(jones_solution(&rho, JonesConfig::default()).is_err());
    }

    #[test]
    fn tangential_needs_a_positive_contour() {
        let f = AnalyticFunction::constant(c64(1.0, 0.0));
        let cf = corridor(GraphSpec::power(1.0, 2.0), 1.0);
        assert!(tangential_solution(&f, &cf, 0.0, TangentialConfig::default()).is_err());
    }

    #[test]
    fn tangential_solves_off_the_contour() {
        let mu = 2f64.cbrt() - 1.0;
        let cf = corridor(GraphSpec::power(2f64.cbrt(), 2.0), mu);
        let f = AnalyticFunction::constant(c64(1.0, 0.0));
        let rho = constant_density(&cf);
        let u = tangential_solution(&f, &cf, 1.0, TangentialConfig::default()).unwrap();
        dbar_matches(&u, &rho, cf.corridor_point(0.6, 0.5));
        let contour = tangential_contour_term(&f, &cf, 1.0, 1.0).unwrap();
        let e = |w| contour.eval(w);
        let z = c64(0.3, 0.2);
        let d = (4.0 * fd_dbar(&e, z, 5e-4) - fd_dbar(&e, z, 1e-3)) / 3.0;
        assert!(d.norm() < 1e-8, "{d}");
    }
}
