//! Half-plane geometry, graph and arc representations, and the classifier
//! deciding whether two arcs meeting at the origin form a bs-pair.

use crate::numerics::{c64, C64};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub type ComplexPoint = C64;

/// Poincaré distance in the upper half-plane.
///
/// Uses 2·asinh(|z−w| / (2√(y₁y₂))), which equals
/// arccosh(1 + |z−w|²/(2y₁y₂)) without the cancellation near the diagonal.
pub fn hyperbolic_distance(z: C64, w: C64) -> Result<f64> {
    if !(z.im > 0.0 && w.im > 0.0) || !z.re.is_finite() || !w.re.is_finite() {
        return Err(Error::Domain(format!("hyperbolic distance needs Im > 0, got {z} and {w}")));
    }
    Ok(2.0 * ((z - w).norm() / (2.0 * (z.im * w.im).sqrt())).asinh())
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSpec {
    /// c·ξ^p for ξ > 0, zero for ξ ≤ 0.
    Power { coef: f64, exponent: f64 },
    /// Σ cᵢ ξ^i for ξ > 0, zero for ξ ≤ 0.
    Polynomial { coefs: Vec<f64> },
    /// dist(ξ, ℝ∖(a, b)).
    Tent { a: f64, b: f64 },
    /// c·ξ^p·(1 + a·sin(ω ln ξ)) for ξ > 0.
    LogOscillation { coef: f64, exponent: f64, amplitude: f64, frequency: f64 },
    /// Cubic Hermite interpolation of samples (ξ, φ, φ′).
    Table { xi: Vec<f64>, value: Vec<f64>, derivative: Vec<f64> },
    /// Same as `Table`, read from a CSV file with columns xi,value,derivative.
    Csv { path: String },
    Sum { terms: Vec<GraphSpec> },
    Scaled { factor: f64, graph: Box<GraphSpec> },
    Zero,
}

impl GraphSpec {
    pub fn power(coef: f64, exponent: f64) -> Self {
        GraphSpec::Power { coef, exponent }
    }
    pub fn linear(k: f64) -> Self {
        GraphSpec::Power { coef: k, exponent: 1.0 }
    }
    pub fn scaled(self, factor: f64) -> Self {
        GraphSpec::Scaled { factor, graph: Box::new(self) }
    }
    pub fn plus(self, other: GraphSpec) -> Self {
        GraphSpec::Sum { terms: vec![self, other] }
    }

    fn resolve(&self, base: Option<&Path>) -> Result<GraphSpec> {
        Ok(match self {
            GraphSpec::Csv { path } => {
                let p = match base {
                    Some(b) if Path::new(path).is_relative() => b.join(path),
                    _ => Path::new(path).to_path_buf(),
                };
                load_table_csv(&p)?
            }
            GraphSpec::Sum { terms } => {
                GraphSpec::Sum { terms: terms.iter().map(|t| t.resolve(base)).collect::<Result<_>>()? }
            }
            GraphSpec::Scaled { factor, graph } => {
                GraphSpec::Scaled { factor: *factor, graph: Box::new(graph.resolve(base)?) }
            }
            GraphSpec::Table { xi, value, derivative } => {
                if xi.len() < 2 || xi.len() != value.len() || xi.len() != derivative.len() {
                    return Err(Error::Config("graph table needs ≥ 2 rows of equal length".into()));
                }
                if xi.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Config("graph table abscissae must increase".into()));
                }
                self.clone()
            }
            other => other.clone(),
        })
    }

    fn value(&self, x: f64) -> f64 {
        match self {
            GraphSpec::Power { coef, exponent } => {
                if x <= 0.0 {
                    0.0
                } else {
                    coef * x.powf(*exponent)
                }
            }
            GraphSpec::Polynomial { coefs } => {
                if x <= 0.0 {
                    0.0
                } else {
                    coefs.iter().rev().fold(0.0, |acc, c| acc * x + c)
                }
            }
            GraphSpec::Tent { a, b } => {
                if x <= *a || x >= *b {
                    0.0
                } else {
                    (x - a).min(b - x)
                }
            }
            GraphSpec::LogOscillation { coef, exponent, amplitude, frequency } => {
                if x <= 0.0 {
                    0.0
                } else {
                    coef * x.powf(*exponent) * (1.0 + amplitude * (frequency * x.ln()).sin())
                }
            }
            GraphSpec::Table { xi, value, derivative } => hermite(xi, value, derivative, x).0,
            GraphSpec::Csv { .. } => unreachable!("csv graphs are resolved at build time"),
            GraphSpec::Sum { terms } => terms.iter().map(|t| t.value(x)).sum(),
            GraphSpec::Scaled { factor, graph } => factor * graph.value(x),
            GraphSpec::Zero => 0.0,
        }
    }

    /// Derivative; at ξ = 0 the right derivative (graphs live on [0, b]).
    fn derivative(&self, x: f64) -> f64 {
        match self {
            GraphSpec::Power { coef, exponent } => {
                if x < 0.0 {
                    0.0
                } else if x == 0.0 {
                    if *exponent == 1.0 {
                        *coef
                    } else {
                        0.0
                    }
                } else {
                    coef * exponent * x.powf(exponent - 1.0)
                }
            }
            GraphSpec::Polynomial { coefs } => {
                if x < 0.0 {
                    0.0
                } else {
                    coefs.iter().enumerate().skip(1).rev().fold(0.0, |acc, (i, c)| acc * x + i as f64 * c)
                }
            }
            GraphSpec::Tent { a, b } => {
                let m = 0.5 * (a + b);
                if x < *a || x >= *b {
                    0.0
                } else if x < m {
                    1.0
                } else {
                    -1.0
                }
            }
            GraphSpec::LogOscillation { coef, exponent, amplitude, frequency } => {
                if x <= 0.0 {
                    if *exponent == 1.0 && x == 0.0 {
                        // the oscillating factor has no limit; report the mean slope
                        *coef
                    } else {
                        0.0
                    }
                } else {
                    let l = frequency * x.ln();
                    coef * x.powf(exponent - 1.0)
                        * (exponent * (1.0 + amplitude * l.sin()) + amplitude * frequency * l.cos())
                }
            }
            GraphSpec::Table { xi, value, derivative } => hermite(xi, value, derivative, x).1,
            GraphSpec::Csv { .. } => unreachable!("csv graphs are resolved at build time"),
            GraphSpec::Sum { terms } => terms.iter().map(|t| t.derivative(x)).sum(),
            GraphSpec::Scaled { factor, graph } => factor * graph.derivative(x),
            GraphSpec::Zero => 0.0,
        }
    }

    fn holder(&self) -> f64 {
        match self {
            GraphSpec::Power { exponent, .. } | GraphSpec::LogOscillation { exponent, .. } => {
                if *exponent >= 2.0 || *exponent == 1.0 {
                    1.0
                } else {
                    (exponent - 1.0).clamp(1e-3, 1.0)
                }
            }
            GraphSpec::Sum { terms } => terms.iter().map(|t| t.holder()).fold(1.0, f64::min),
            GraphSpec::Scaled { graph, .. } => graph.holder(),
            _ => 1.0,
        }
    }

    fn kinks(&self, out: &mut Vec<f64>) {
        match self {
            GraphSpec::Power { exponent, coef } if *exponent <= 1.0 && *coef != 0.0 => out.push(0.0),
            GraphSpec::LogOscillation { exponent, .. } if *exponent <= 1.0 => out.push(0.0),
            GraphSpec::Polynomial { coefs } if coefs.get(1).copied().unwrap_or(0.0) != 0.0 => out.push(0.0),
            GraphSpec::Tent { a, b } => out.extend([*a, 0.5 * (a + b), *b]),
            GraphSpec::Table { xi, .. } => {
                out.push(xi[0]);
                out.push(*xi.last().unwrap());
            }
            GraphSpec::Sum { terms } => terms.iter().for_each(|t| t.kinks(out)),
            GraphSpec::Scaled { graph, .. } => graph.kinks(out),
            _ => {}
        }
    }
}

fn hermite(xi: &[f64], v: &[f64], d: &[f64], x: f64) -> (f64, f64) {
    let n = xi.len();
    if x <= xi[0] {
        if xi[0] >= 0.0 && x <= 0.0 && v[0] == 0.0 {
            return (0.0, if x == 0.0 { d[0] } else { 0.0 });
        }
        return (v[0] + d[0] * (x - xi[0]), d[0]);
    }
    if x >= xi[n - 1] {
        return (v[n - 1] + d[n - 1] * (x - xi[n - 1]), d[n - 1]);
    }
    let i = xi.partition_point(|&t| t <= x) - 1;
    let h = xi[i + 1] - xi[i];
    let s = (x - xi[i]) / h;
    let (s2, s3) = (s * s, s * s * s);
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let val = h00 * v[i] + h10 * h * d[i] + h01 * v[i + 1] + h11 * h * d[i + 1];
    let dh00 = (6.0 * s2 - 6.0 * s) / h;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = (-6.0 * s2 + 6.0 * s) / h;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let der = dh00 * v[i] + dh10 * d[i] + dh01 * v[i + 1] + dh11 * d[i + 1];
    (val, der)
}

fn load_table_csv(path: &Path) -> Result<GraphSpec> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_path(path)?;
    let (mut xi, mut value, mut derivative) = (Vec::new(), Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() < 3 {
            return Err(Error::Config(format!("{}: rows need xi,value,derivative", path.display())));
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::Config(format!("{}: {e}", path.display())));
        xi.push(parse(&rec[0])?);
        value.push(parse(&rec[1])?);
        derivative.push(parse(&rec[2])?);
    }
    GraphSpec::Table { xi, value, derivative }.resolve(None)
}

/// A real function on [0, b] with pointwise derivative; used for φ₁, φ₂, Δ and g.
#[derive(Debug, Clone)]
pub struct GraphFunction {
    spec: GraphSpec,
    domain_end: f64,
    holder_exponent: f64,
    lipschitz_bound: f64,
    origin_anchored: bool,
    kinks: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositiveInterval {
    pub start: f64,
    pub end: f64,
    pub zero_at_start: bool,
    pub zero_at_end: bool,
}

impl GraphFunction {
    pub fn new(spec: GraphSpec, domain_end: f64) -> Result<Self> {
        Self::with_base(spec, domain_end, None)
    }

    /// Like `new`, resolving relative CSV paths against `base`.
    pub fn with_base(spec: GraphSpec, domain_end: f64, base: Option<&Path>) -> Result<Self> {
        if !(domain_end > 0.0 && domain_end.is_finite()) {
            return Err(Error::Config(format!("graph domain end must be positive, got {domain_end}")));
        }
        let spec = spec.resolve(base)?;
        let mut kinks = Vec::new();
        spec.kinks(&mut kinks);
        kinks.sort_by(f64::total_cmp);
        kinks.dedup();
        let lipschitz_bound = lipschitz_on(&spec, domain_end);
        Ok(Self {
            holder_exponent: spec.holder(),
            origin_anchored: spec.value(0.0) == 0.0,
            spec,
            domain_end,
            lipschitz_bound,
            kinks,
        })
    }

    pub fn spec(&self) -> &GraphSpec {
        &self.spec
    }
    pub fn domain_end(&self) -> f64 {
        self.domain_end
    }
    pub fn holder_exponent(&self) -> f64 {
        self.holder_exponent
    }
    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz_bound
    }
    pub fn origin_anchored(&self) -> bool {
        self.origin_anchored
    }
    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        self.spec.value(x)
    }
    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        self.spec.derivative(x)
    }

    pub fn with_domain_end(&self, b: f64) -> Self {
        let mut g = self.clone();
        g.domain_end = b;
        g.lipschitz_bound = lipschitz_on(&g.spec, b);
        g
    }

    /// The graph of c·φ.
    pub fn scaled(&self, c: f64) -> Self {
        Self::new(self.spec.clone().scaled(c), self.domain_end).expect("scaling keeps a valid graph")
    }

    /// True when φ(0) = φ′(0) = 0 and |φ′| < 1/2 on [0, b] at sampling resolution.
    pub fn flat_at_origin_regime(&self) -> bool {
        self.origin_anchored
            && self.derivative(0.0).abs() < 1e-12
            && refinement_grid(self.domain_end, 40, 2000).iter().all(|&t| self.derivative(t).abs() < 0.5)
    }

    /// Maximal subintervals of [lo, hi] on which g > 0.
    pub fn positive_intervals(&self, lo: f64, hi: f64) -> Vec<PositiveInterval> {
        let n = 4096;
        let mut xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        xs.extend(self.kinks.iter().copied().filter(|k| *k > lo && *k < hi));
        if lo < 0.0 && hi > 0.0 {
            xs.push(0.0);
            // resolve the vicinity of the origin where anchored graphs start
            xs.extend((1..60).map(|j| hi.min(1.0) * 0.5f64.powi(j)));
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let pos: Vec<bool> = xs.iter().map(|&x| self.value(x) > 0.0).collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < xs.len() {
            if !pos[i] {
                i += 1;
                continue;
            }
            let mut j = i;
            while j + 1 < xs.len() && pos[j + 1] {
                j += 1;
            }
            let start = if i == 0 { lo } else { self.bisect_zero(xs[i - 1], xs[i]) };
            let end = if j + 1 == xs.len() { hi } else { self.bisect_zero(xs[j + 1], xs[j]) };
            out.push(PositiveInterval { start, end, zero_at_start: i > 0, zero_at_end: j + 1 < xs.len() });
            i = j + 1;
        }
        out
    }

    // `zero` has g ≤ 0, `positive` has g > 0; returns the boundary point.
    fn bisect_zero(&self, mut zero: f64, mut positive: f64) -> f64 {
        for _ in 0..200 {
            let m = 0.5 * (zero + positive);
            if m == zero || m == positive {
                break;
            }
            if self.value(m) > 0.0 {
                positive = m;
            } else {
                zero = m;
            }
        }
        zero
    }
}

fn lipschitz_on(spec: &GraphSpec, b: f64) -> f64 {
    let m = refinement_grid(b, 40, 4000).into_iter().map(|t| spec.derivative(t).abs()).fold(0.0, f64::max);
    m * 1.01 + 1e-300
}

/// Points of (0, b]: a uniform grid plus a geometric grid toward 0.
pub fn refinement_grid(b: f64, depth: i32, uniform: usize) -> Vec<f64> {
    let mut ts: Vec<f64> = (1..=uniform).map(|i| b * i as f64 / uniform as f64).collect();
    ts.extend((1..=depth).map(|j| b * 0.5f64.powi(j)));
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArcSpec {
    /// t·e^{iθ}, t ∈ [0, length].
    Ray { angle: f64, length: f64 },
    /// t + iφ(t), t ∈ [0, domain_end].
    Graph { graph: GraphSpec, domain_end: f64 },
    /// e^{iθ}(t + iφ(t)), t ∈ [0, domain_end].
    RotatedGraph { angle: f64, graph: GraphSpec, domain_end: f64 },
}

// e^{iθ} with exact zeros at multiples of π/2
fn unit(angle: f64) -> C64 {
    let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
    c64(snap(angle.cos()), snap(angle.sin()))
}

/// A simple arc starting at the origin, γ(t) = e^{iθ}(t + iφ(t)).
#[derive(Debug, Clone)]
pub struct ArcCurve {
    rotation: C64,
    graph: GraphFunction,
}

impl ArcCurve {
    pub fn from_spec(spec: &ArcSpec, base: Option<&Path>) -> Result<Self> {
        match spec {
            ArcSpec::Ray { angle, length } => Self::ray(*angle, *length),
            ArcSpec::Graph { graph, domain_end } => {
                Ok(Self::graph(GraphFunction::with_base(graph.clone(), *domain_end, base)?))
            }
            ArcSpec::RotatedGraph { angle, graph, domain_end } => Ok(Self {
                rotation: unit(*angle),
                graph: GraphFunction::with_base(graph.clone(), *domain_end, base)?,
            }),
        }
    }
    pub fn ray(angle: f64, length: f64) -> Result<Self> {
        Ok(Self { rotation: unit(angle), graph: GraphFunction::new(GraphSpec::Zero, length)? })
    }
    pub fn graph(graph: GraphFunction) -> Self {
        Self { rotation: c64(1.0, 0.0), graph }
    }
    pub fn t_end(&self) -> f64 {
        self.graph.domain_end()
    }
    pub fn graph_fn(&self) -> &GraphFunction {
        &self.graph
    }
    pub fn is_plain_graph(&self) -> bool {
        self.rotation == c64(1.0, 0.0)
    }
    #[inline]
    pub fn point(&self, t: f64) -> C64 {
        self.rotation * c64(t, self.graph.value(t))
    }
    #[inline]
    pub fn velocity(&self, t: f64) -> C64 {
        self.rotation * c64(1.0, self.graph.derivative(t))
    }
    /// Samples on a uniform-plus-geometric grid including the origin.
    pub fn samples(&self, uniform: usize, depth: i32) -> Vec<C64> {
        let mut v = vec![self.point(0.0)];
        v.extend(refinement_grid(self.t_end(), depth, uniform).into_iter().map(|t| self.point(t)));
        v
    }
    fn mirrored(&self) -> Self {
        // z ↦ −z̄ sends e^{iθ}(t + iφ) to e^{i(π−θ)}(t − iφ)
        Self {
            rotation: -self.rotation.conj(),
            graph: GraphFunction::new(self.graph.spec.clone().scaled(-1.0), self.t_end()).expect("valid"),
        }
    }
}

pub fn tangent_at_origin(arc: &ArcCurve) -> Result<C64> {
    let v = arc.velocity(0.0);
    let n = v.norm();
    if !(n > 1e-300) || !n.is_finite() {
        return Err(Error::DegenerateTangent(format!("γ′(0) = {v}")));
    }
    let tau = v / n;
    if tau.im < -1e-12 {
        return Err(Error::DegenerateTangent(format!("tangent {tau} points into the lower half-plane")));
    }
    Ok(c64(tau.re, tau.im.max(0.0)))
}

pub fn tangent_of_graph(g: &GraphFunction) -> Result<C64> {
    tangent_at_origin(&ArcCurve::graph(g.clone()))
}

#[derive(Debug, Clone)]
pub struct PairSpec {
    pub lower: GraphFunction,
    pub upper: GraphFunction,
    pub containing_angle_slope: f64,
}

impl PairSpec {
    pub fn new(lower: GraphFunction, upper: GraphFunction, k: f64) -> Result<Self> {
        let p = Self { lower, upper, containing_angle_slope: k };
        p.validate()?;
        Ok(p)
    }

    pub fn domain_end(&self) -> f64 {
        self.lower.domain_end().min(self.upper.domain_end())
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.containing_angle_slope;
        if !(k > 0.0) {
            return Err(Error::InvalidPair(format!("angle slope must be positive, got {k}")));
        }
        for t in refinement_grid(self.domain_end(), 40, 4000) {
            let (a, b) = (self.lower.value(t), self.upper.value(t));
            if a >= b {
                return Err(Error::InvalidPair(format!("graphs meet or cross at t = {t}: {a} ≥ {b}")));
            }
            if a.abs() > k * t * (1.0 + 1e-12) || b.abs() > k * t * (1.0 + 1e-12) {
                return Err(Error::InvalidPair(format!("graph leaves the angle |η| ≤ {k}ξ at t = {t}")));
            }
        }
        Ok(())
    }

    pub fn delta(&self, t: f64) -> f64 {
        self.upper.value(t) - self.lower.value(t)
    }
    pub fn delta_derivative(&self, t: f64) -> f64 {
        self.upper.derivative(t) - self.lower.derivative(t)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct ClassifierConfig {
    /// Finest probe x = b·2^{−n_max}.
    pub n_max: usize,
    pub delta_pos: f64,
    pub delta_zero: f64,
    pub tangent_tol: f64,
    pub resample_tol: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self { n_max: 30, delta_pos: 1e-3, delta_zero: 1e-6, tangent_tol: 1e-9, resample_tol: 1e-14 }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Bs,
    NotBs,
    Indeterminate,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Bs => 0,
            Verdict::NotBs => 1,
            Verdict::Indeterminate => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    DistinctTangents,
    CommonNonRealTangent,
    CommonRealTangent,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RatioSample {
    pub n: usize,
    pub x: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Evidence {
    pub tau1: C64,
    pub tau2: C64,
    pub branch: Branch,
    pub ratio_samples: Vec<RatioSample>,
    /// min of Δ/φ₁ over the tail n ≥ n_max/2: the liminf estimate.
    pub tail_min: Option<f64>,
    pub tail_last: Option<f64>,
    pub config: ClassifierConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BsDecision {
    pub verdict: Verdict,
    pub evidence: Evidence,
}

pub fn classify_pair(pair: &PairSpec, cfg: &ClassifierConfig) -> Result<BsDecision> {
    pair.validate()?;
    classify_arcs(&ArcCurve::graph(pair.lower.clone()), &ArcCurve::graph(pair.upper.clone()), cfg)
}

pub fn classify_arcs(a1: &ArcCurve, a2: &ArcCurve, cfg: &ClassifierConfig) -> Result<BsDecision> {
    for (j, a) in [a1, a2].iter().enumerate() {
        for t in refinement_grid(a.t_end(), 60, 2000) {
            let z = a.point(t);
            if !(z.im > 0.0) {
                return Err(Error::InvalidPair(format!("arc {} touches the real axis at {z}", j + 1)));
            }
        }
    }
    let tau1 = tangent_at_origin(a1)?;
    let tau2 = tangent_at_origin(a2)?;
    check_disjoint(a1, a2)?;
    let mk = |verdict, branch, samples, tail_min, tail_last| BsDecision {
        verdict,
        evidence: Evidence { tau1, tau2, branch, ratio_samples: samples, tail_min, tail_last, config: *cfg },
    };
    if (tau1 - tau2).norm() > cfg.tangent_tol {
        return Ok(mk(Verdict::Bs, Branch::DistinctTangents, vec![], None, None));
    }
    if tau1.im > cfg.tangent_tol {
        return Ok(mk(Verdict::NotBs, Branch::CommonNonRealTangent, vec![], None, None));
    }
    let (b1, b2) = if tau1.re < 0.0 { (a1.mirrored(), a2.mirrored()) } else { (a1.clone(), a2.clone()) };
    let g1 = GraphOverReal::new(&b1, cfg.resample_tol)?;
    let g2 = GraphOverReal::new(&b2, cfg.resample_tol)?;
    let b = g1.x_end.min(g2.x_end);
    let mut samples = Vec::with_capacity(cfg.n_max + 1);
    let mut lower_first: Option<bool> = None;
    for n in 0..=cfg.n_max {
        let x = b * 0.5f64.powi(n as i32);
        let (p1, p2) = (g1.value(x), g2.value(x));
        let first_is_lower = p1 < p2;
        match lower_first {
            None => lower_first = Some(first_is_lower),
            Some(l) if l != first_is_lower => {
                return Err(Error::InvalidPair(format!("arcs change order near x = {x}")));
            }
            _ => {}
        }
        let (lo, hi) = if first_is_lower { (p1, p2) } else { (p2, p1) };
        if !(lo > 0.0) {
            return Err(Error::InvalidPair(format!("lower arc not above the axis at x = {x}")));
        }
        samples.push(RatioSample { n, x, ratio: (hi - lo) / lo });
    }
    let tail: Vec<f64> = samples.iter().filter(|s| s.n >= cfg.n_max / 2).map(|s| s.ratio).collect();
    let tail_min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let tail_last = *tail.last().unwrap();
    let verdict = if tail_min >= cfg.delta_pos {
        Verdict::Bs
    } else if tail_min < cfg.delta_zero {
        Verdict::NotBs
    } else {
        Verdict::Indeterminate
    };
    Ok(mk(verdict, Branch::CommonRealTangent, samples, Some(tail_min), Some(tail_last)))
}

/// An arc with real tangent τ = 1 resampled as x ↦ Im γ(t(x)), Re γ(t(x)) = x.
struct GraphOverReal<'a> {
    arc: &'a ArcCurve,
    x_end: f64,
    tol: f64,
}

impl<'a> GraphOverReal<'a> {
    fn new(arc: &'a ArcCurve, tol: f64) -> Result<Self> {
        // largest initial stretch on which Re γ increases
        let ts = refinement_grid(arc.t_end(), 60, 4000);
        let mut t_mono = 0.0;
        for &t in &ts {
            if arc.velocity(t).re > 0.0 {
                t_mono = t;
            } else {
                break;
            }
        }
        if t_mono == 0.0 {
            return Err(Error::InvalidPair("arc is not a graph over its tangent near 0".into()));
        }
        Ok(Self { arc, x_end: arc.point(t_mono).re, tol })
    }

    fn value(&self, x: f64) -> f64 {
        if self.arc.is_plain_graph() {
            return self.arc.graph.value(x);
        }
        let (mut lo, mut hi) = (0.0, self.arc.t_end());
        for _ in 0..300 {
            let m = 0.5 * (lo + hi);
            if self.arc.point(m).re < x {
                lo = m;
            } else {
                hi = m;
            }
            if hi - lo <= self.tol * x {
                break;
            }
        }
        let t = 0.5 * (lo + hi);
        // one Newton correction removes the bisection residue
        let z = self.arc.point(t);
        let v = self.arc.velocity(t);
        let t = t - (z.re - x) / v.re;
        self.arc.point(t).im
    }
}

fn check_disjoint(a1: &ArcCurve, a2: &ArcCurve) -> Result<()> {
    // polylines on t ≥ 10⁻⁶·t_end; the origin itself is the shared point
    let poly = |a: &ArcCurve| -> Vec<C64> {
        let t0 = a.t_end() * 1e-6;
        let n = 1500;
        (0..=n).map(|i| a.point(t0 * (a.t_end() / t0).powf(i as f64 / n as f64))).collect()
    };
    let p1 = poly(a1);
    let p2 = poly(a2);
    for s in p1.windows(2) {
        for r in p2.windows(2) {
            if segments_cross(s[0], s[1], r[0], r[1]) {
                return Err(Error::InvalidPair(format!("arcs intersect near {}", s[0])));
            }
        }
    }
    Ok(())
}

fn segments_cross(p: C64, p2: C64, q: C64, q2: C64) -> bool {
    let cross = |a: C64, b: C64| a.re * b.im - a.im * b.re;
    let r = p2 - p;
    let s = q2 - q;
    let den = cross(r, s);
    if den == 0.0 {
        return false;
    }
    let t = cross(q - p, s) / den;
    let u = cross(q - p, r) / den;
    (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SeparationReport {
    pub separated: bool,
    /// min of g(ξ) − η over S₁ samples.
    pub min_slack_s1: Option<f64>,
    /// min of η − (1+μ)g(ξ) over S₂ samples.
    pub min_slack_s2: Option<f64>,
    pub violations: Vec<C64>,
}

pub fn separation_check(s1: &[C64], s2: &[C64], g: &GraphFunction, mu: f64) -> SeparationReport {
    let mut violations = Vec::new();
    let mut m1: Option<f64> = None;
    let mut m2: Option<f64> = None;
    for z in s1 {
        let slack = g.value(z.re) - z.im;
        m1 = Some(m1.map_or(slack, |m| m.min(slack)));
        if !(slack > 0.0) {
            violations.push(*z);
        }
    }
    for z in s2 {
        let slack = z.im - (1.0 + mu) * g.value(z.re);
        m2 = Some(m2.map_or(slack, |m| m.min(slack)));
        if !(slack > 0.0) {
            violations.push(*z);
        }
    }
    SeparationReport { separated: violations.is_empty(), min_slack_s1: m1, min_slack_s2: m2, violations }
}

/// Infimum over the samples with g > 0 of the hyperbolic width of the corridor.
pub fn corridor_width(g: &GraphFunction, mu: f64, xs: &[f64]) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("μ must be positive, got {mu}")));
    }
    let mut best: Option<f64> = None;
    for &x in xs {
        let y = g.value(x);
        if y > 0.0 {
            let d = hyperbolic_distance(c64(x, y), c64(x, (1.0 + mu) * y))?;
            best = Some(best.map_or(d, |b| b.min(d)));
        }
    }
    best.ok_or(Error::UndefinedCorridor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn graph(spec: GraphSpec) -> GraphFunction {
        GraphFunction::new(spec, 0.5).unwrap()
    }

    #[test]
    fn distance_trivial_values() {
        assert_eq!(hyperbolic_distance(c64(0.0, 1.0), c64(0.0, 1.0)).unwrap(), 0.0);
        let d = hyperbolic_distance(c64(0.0, 1.0), c64(0.0, 2.0)).unwrap();
        assert!((d - 2f64.ln()).abs() < 1e-15);
        assert!(hyperbolic_distance(c64(0.0, 0.0), c64(0.0, 1.0)).is_err());
    }

    #[test]
    fn distance_matches_geodesic_integral() {
        // geodesic through 1+i and 3+i: circle |z − 2| = √2, z = 2 + √2e^{iθ}, θ ∈ [π/4, 3π/4];
        // |dz|/Im z = dθ/sin θ
        let r = 2f64.sqrt();
        let ds = crate::numerics::integrate_real(
            |th| r / (r * th.sin()),
            FRAC_PI_4,
            3.0 * FRAC_PI_4,
            &[],
            Default::default(),
        );
        let d = hyperbolic_distance(c64(1.0, 1.0), c64(3.0, 1.0)).unwrap();
        assert!((d - ds).abs() < 1e-10, "{d} vs {ds}");
    }

    #[test]
    fn tangent_examples() {
        let t = tangent_of_graph(&graph(GraphSpec::power(1.0, 2.0))).unwrap();
        assert!((t - c64(1.0, 0.0)).norm() < 1e-15);
        let t = tangent_at_origin(&ArcCurve::ray(FRAC_PI_4, 1.0).unwrap()).unwrap();
        let h = 0.5f64.sqrt();
        assert!((t - c64(h, h)).norm() < 1e-15);
        let t = tangent_of_graph(&graph(GraphSpec::linear(0.5))).unwrap();
        assert!((t - c64(2.0, 1.0) / 5f64.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn corridor_width_examples() {
        let xs: Vec<f64> = (1..200).map(|i| i as f64 / 100.0 - 0.5).collect();
        let w = corridor_width(&graph(GraphSpec::linear(1.0)), 1.0, &xs).unwrap();
        assert!((w - 2f64.ln()).abs() < 1e-12);
        let w = corridor_width(&graph(GraphSpec::power(1.0, 2.0)), 0.5, &xs).unwrap();
        assert!((w - 1.5f64.ln()).abs() < 1e-12);
        let tent = graph(GraphSpec::Tent { a: 0.2, b: 0.6 });
        let w = corridor_width(&tent, 1.0, &xs).unwrap();
        assert!((w - 2f64.ln()).abs() < 1e-12);
        assert!(matches!(corridor_width(&tent, 1.0, &[0.0, 0.7, 0.9]), Err(Error::UndefinedCorridor)));
    }

    #[test]
    fn classifier_table() {
        let cfg = ClassifierConfig::default();
        let p1 = graph(GraphSpec::power(1.0, 2.0));
        let bs = PairSpec::new(p1.clone(), graph(GraphSpec::power(2.0, 2.0)), 1.0).unwrap();
        assert_eq!(classify_pair(&bs, &cfg).unwrap().verdict, Verdict::Bs);
        let nb = PairSpec::new(p1, graph(GraphSpec::Polynomial { coefs: vec![0.0, 0.0, 1.0, 1.0] }), 1.0).unwrap();
        let d = classify_pair(&nb, &cfg).unwrap();
        assert_eq!(d.verdict, Verdict::NotBs);
        assert_eq!(d.evidence.branch, Branch::CommonRealTangent);
        let r1 = ArcCurve::ray(FRAC_PI_4, 1.0).unwrap();
        let r2 = ArcCurve::ray(FRAC_PI_2, 1.0).unwrap();
        let d = classify_arcs(&r1, &r2, &cfg).unwrap();
        assert_eq!(d.verdict, Verdict::Bs);
        assert_eq!(d.evidence.branch, Branch::DistinctTangents);
    }

    #[test]
    fn common_nonreal_tangent_is_not_bs() {
        let cfg = ClassifierConfig::default();
        let a1 = ArcCurve::from_spec(
            &ArcSpec::RotatedGraph { angle: 1.0, graph: GraphSpec::power(1.0, 2.0), domain_end: 0.3 },
            None,
        )
        .unwrap();
        let a2 = ArcCurve::from_spec(
            &ArcSpec::RotatedGraph { angle: 1.0, graph: GraphSpec::power(-1.0, 2.0), domain_end: 0.3 },
            None,
        )
        .unwrap();
        let d = classify_arcs(&a1, &a2, &cfg).unwrap();
        assert_eq!(d.verdict, Verdict::NotBs);
        assert_eq!(d.evidence.branch, Branch::CommonNonRealTangent);
    }

    #[test]
    fn rotated_real_tangent_resampling() {
        // both arcs leave the origin along τ = −1
        let cfg = ClassifierConfig::default();
        let a1 = ArcCurve::from_spec(
            &ArcSpec::RotatedGraph { angle: std::f64::consts::PI, graph: GraphSpec::power(-1.0, 2.0), domain_end: 0.3 },
            None,
        )
        .unwrap();
        let a2 = ArcCurve::from_spec(
            &ArcSpec::RotatedGraph { angle: std::f64::consts::PI, graph: GraphSpec::power(-3.0, 2.0), domain_end: 0.3 },
            None,
        )
        .unwrap();
        let d = classify_arcs(&a1, &a2, &cfg).unwrap();
        assert_eq!(d.verdict, Verdict::Bs);
        let r = d.evidence.tail_min.unwrap();
        assert!((r - 2.0).abs() < 1e-9, "{r}");
    }

    #[test]
    fn oscillating_ratio_is_indeterminate() {
        let cfg = ClassifierConfig::default();
        let p1 = GraphSpec::power(1.0, 2.0);
        let p2 = p1.clone().plus(GraphSpec::LogOscillation { coef: 2e-4, exponent: 2.0, amplitude: 0.5, frequency: 1.0 });
        let pair = PairSpec::new(graph(p1), graph(p2), 1.0).unwrap();
        assert_eq!(classify_pair(&pair, &cfg).unwrap().verdict, Verdict::Indeterminate);
    }

    #[test]
    fn invalid_pairs_rejected() {
        let cfg = ClassifierConfig::default();
        // crossing rays
        let a = ArcCurve::ray(0.5, 1.0).unwrap();
        let b = ArcCurve::from_spec(&ArcSpec::Graph { graph: GraphSpec::Polynomial { coefs: vec![0.0, 0.0, 3.0] }, domain_end: 0.5 }, None)
            .unwrap();
        assert!(matches!(classify_arcs(&a, &b, &cfg), Err(Error::InvalidPair(_))));
        // boundary touching
        let flat = ArcCurve::ray(0.0, 1.0).unwrap();
        assert!(matches!(classify_arcs(&flat, &a, &cfg), Err(Error::InvalidPair(_))));
        assert!(PairSpec::new(graph(GraphSpec::power(2.0, 2.0)), graph(GraphSpec::power(1.0, 2.0)), 1.0).is_err());
    }

    #[test]
    fn separation_examples() {
        let g = graph(GraphSpec::power(1.5, 2.0));
        let s1: Vec<C64> = (1..50).map(|i| { let t = i as f64 / 100.0; c64(t, t * t) }).collect();
        let s2: Vec<C64> = (1..50).map(|i| { let t = i as f64 / 100.0; c64(t, 2.0 * t * t) }).collect();
        let r = separation_check(&s1, &s2, &g, 0.2);
        assert!(r.separated && r.min_slack_s1.unwrap() > 0.0 && r.min_slack_s2.unwrap() > 0.0);
        let bad = c64(0.1, 0.5);
        let r = separation_check(&[bad], &s2, &g, 0.2);
        assert!(!r.separated);
        assert_eq!(r.violations, vec![bad]);
        assert!(separation_check(&[], &s2, &g, 0.2).separated);
    }

    #[test]
    fn hermite_table_reproduces_cubic() {
        let xs: Vec<f64> = (0..=10).map(|i| i as f64 / 20.0).collect();
        let spec = GraphSpec::Table {
            xi: xs.clone(),
            value: xs.iter().map(|x| x * x * x).collect(),
            derivative: xs.iter().map(|x| 3.0 * x * x).collect(),
        };
        let g = graph(spec);
        for x in [0.013, 0.2, 0.377] {
            assert!((g.value(x) - x * x * x).abs() < 1e-15);
            assert!((g.derivative(x) - 3.0 * x * x).abs() < 1e-14);
        }
    }

    #[test]
    fn positive_intervals_of_tent() {
        let g = graph(GraphSpec::Tent { a: 0.0, b: 1.0 });
        let iv = g.positive_intervals(-2.0, 2.0);
        assert_eq!(iv.len(), 1);
        assert!(iv[0].start.abs() < 1e-14 && (iv[0].end - 1.0).abs() < 1e-14);
        assert!(iv[0].zero_at_start && iv[0].zero_at_end);
    }
}
