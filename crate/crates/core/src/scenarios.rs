//! Built-in scenarios and the disc-chain splitting in the right half-plane Π.
//!
//! A disc chain is a sequence of closed discs B_n centred at ζ_n = ξ_n + ig(ξ_n)
//! accumulating at the origin, together with their mirror images. With
//! S₊ = ∪B_n and S₋ = ∪B̄_n, every f bounded and analytic in Π∖(S₊ ∪ S₋)
//! decomposes as f = f₁ + f₊ + f₋ with
//!
//! f₁ = −(1+z)·C_{iℝ}[f/(1+z)],  f₊ = (1+z)·Σ C_{∂B_n}[f/(1+z)],  f₋ likewise over B̄_n,
//!
//! where C_A[k](ζ) = (1/2πi)∫_A k(z)dz/(z − ζ), the axis runs upwards and the circles
//! clockwise.

use crate::cutting::CuttingFunction;
use crate::dbar::{scaled_cr_residual, PlateauSpec, SolverKind};
use crate::geometry::{refinement_grid, ArcCurve, GraphFunction, GraphSpec, PairSpec, Verdict};
use crate::numerics::{c64, circle_contour, integrate_adaptive, linear_fit, AdaptiveOptions, C64};
use crate::splitter::{arc_polyline, AnalyticFunction, SingularSet, SplitConfig, TestFunctionSpec};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

// ---------------------------------------------------------------------------
// Disc chains

/// How the discs are generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainSpec {
    /// ξ_n = xi0·q^n, r_n = r_coef·p^n·g(ξ_n), n = 1..=count.
    Geometric { xi0: f64, xi_ratio: f64, r_coef: f64, r_ratio: f64, count: usize },
    Explicit { xi: Vec<f64>, r: Vec<f64> },
}

impl ChainSpec {
    /// g = ξ², ξ_n = 2^{−n}, r_n = 4^{−n}g(ξ_n).
    pub fn standard_geometric(count: usize) -> Self {
        ChainSpec::Geometric { xi0: 1.0, xi_ratio: 0.5, r_coef: 1.0, r_ratio: 0.25, count }
    }
}

/// Remainder of Σ r_n/g(ξ_n) beyond the stored discs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainTail {
    /// The chain is exactly the stored discs.
    Finite,
    /// r_n/g(ξ_n) = coef·ratio^n for every n.
    Geometric { coef: f64, ratio: f64 },
}

#[derive(Debug, Clone)]
pub struct DiscChain {
    g: GraphFunction,
    xi: Vec<f64>,
    radii: Vec<f64>,
    centers: Vec<C64>,
    tail: ChainTail,
}

impl DiscChain {
    pub fn new(g: GraphFunction, xi: Vec<f64>, radii: Vec<f64>, tail: ChainTail) -> Result<Self> {
        if xi.is_empty() || xi.len() != radii.len() {
            return Err(Error::Hypothesis(format!("{} abscissae for {} radii", xi.len(), radii.len())));
        }
        if xi[0] > g.domain_end() {
            return Err(Error::Hypothesis(format!("ξ₁ = {} lies beyond the graph domain {}", xi[0], g.domain_end())));
        }
        for w in xi.windows(2) {
            if !(w[1] < w[0] && w[1] > 0.0) {
                return Err(Error::Hypothesis(format!("ξ_n must decrease strictly to 0: {} then {}", w[0], w[1])));
            }
        }
        for t in refinement_grid(xi[0], 60, 400) {
            let v = g.value(t);
            if !(v > 0.0) || v > t * (1.0 + 1e-12) {
                return Err(Error::Hypothesis(format!("need 0 < g(ξ) ≤ ξ, got g({t}) = {v}")));
            }
        }
        let centers: Vec<C64> = xi.iter().map(|&x| c64(x, g.value(x))).collect();
        for (n, (&x, &r)) in xi.iter().zip(&radii).enumerate() {
            if !(r > 0.0) || r >= g.value(x) {
                return Err(Error::Hypothesis(format!("disc {}: need 0 < r_n < g(ξ_n), got r = {r}", n + 1)));
            }
            let prev = if n > 0 { xi[n - 1] - x } else { f64::INFINITY };
            let next = if n + 1 < xi.len() { x - xi[n + 1] } else { f64::INFINITY };
            if r >= prev.min(next) {
                return Err(Error::Hypothesis(format!("disc {}: radius {r} reaches a neighbouring abscissa", n + 1)));
            }
            if n + 1 < xi.len() && (centers[n] - centers[n + 1]).norm() <= r + radii[n + 1] {
                return Err(Error::Hypothesis(format!("discs {} and {} overlap", n + 1, n + 2)));
            }
        }
        if let ChainTail::Geometric { coef, ratio } = tail {
            if !(coef > 0.0 && ratio > 0.0 && ratio < 1.0) {
                return Err(Error::Hypothesis(format!("geometric tail needs 0 < ratio < 1, got {ratio}")));
            }
        }
        Ok(Self { g, xi, radii, centers, tail })
    }

    pub fn from_spec(g: GraphFunction, spec: &ChainSpec) -> Result<Self> {
        match spec {
            ChainSpec::Geometric { xi0, xi_ratio, r_coef, r_ratio, count } => {
                if !(*xi_ratio > 0.0 && *xi_ratio < 1.0 && *xi0 > 0.0 && *count > 0) {
                    return Err(Error::Hypothesis(format!("bad geometric chain {spec:?}")));
                }
                let xi: Vec<f64> = (1..=*count).map(|n| xi0 * xi_ratio.powi(n as i32)).collect();
                let r = xi.iter().enumerate().map(|(i, &x)| r_coef * r_ratio.powi(i as i32 + 1) * g.value(x)).collect();
                Self::new(g, xi, r, ChainTail::Geometric { coef: *r_coef, ratio: *r_ratio })
            }
            ChainSpec::Explicit { xi, r } => Self::new(g, xi.clone(), r.clone(), ChainTail::Finite),
        }
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }
    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }
    pub fn g(&self) -> &GraphFunction {
        &self.g
    }
    pub fn xi(&self) -> &[f64] {
        &self.xi
    }
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
    pub fn centers(&self) -> &[C64] {
        &self.centers
    }
    pub fn tail(&self) -> ChainTail {
        self.tail
    }

    /// r_n/g(ξ_n), n = 1..=len.
    pub fn ratio_terms(&self) -> Vec<f64> {
        self.xi.iter().zip(&self.radii).map(|(&x, &r)| r / self.g.value(x)).collect()
    }

    /// Σ_{n>N} r_n/g(ξ_n).
    pub fn ratio_tail(&self, n: usize) -> f64 {
        match self.tail {
            ChainTail::Finite => self.ratio_terms().iter().skip(n).sum(),
            ChainTail::Geometric { coef, ratio } => coef * ratio.powi(n as i32 + 1) / (1.0 - ratio),
        }
    }

    /// dist(ζ, B_n) for 0-based n; zero inside the closed disc.
    pub fn disc_distance(&self, n: usize, zeta: C64, conj: bool) -> f64 {
        let c = if conj { self.centers[n].conj() } else { self.centers[n] };
        ((zeta - c).norm() - self.radii[n]).max(0.0)
    }

    /// Index of a closed disc of S₊ (or S₋) containing ζ.
    pub fn containing_disc(&self, zeta: C64, conj: bool) -> Option<usize> {
        (0..self.len()).find(|&n| {
            let c = if conj { self.centers[n].conj() } else { self.centers[n] };
            (zeta - c).norm() <= self.radii[n]
        })
    }

    pub fn in_s(&self, zeta: C64) -> bool {
        self.containing_disc(zeta, false).is_some() || self.containing_disc(zeta, true).is_some()
    }

    /// Polylines of the circles ∂B_n and ∂B̄_n.
    pub fn singular_sets(&self, per_circle: usize) -> (SingularSet, SingularSet) {
        let circle = |c: C64, r: f64| -> Vec<C64> {
            (0..=per_circle).map(|j| c + C64::from_polar(r, 2.0 * PI * j as f64 / per_circle as f64)).collect()
        };
        let plus = SingularSet { polylines: self.centers.iter().zip(&self.radii).map(|(&c, &r)| circle(c, r)).collect() };
        let minus =
            SingularSet { polylines: self.centers.iter().zip(&self.radii).map(|(&c, &r)| circle(c.conj(), r)).collect() };
        (plus, minus)
    }
}

// ---------------------------------------------------------------------------
// Test functions on Π∖S

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainFunctionSpec {
    Constant {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    /// Σ_{n≤terms} [a₊·r_n/(z − ζ_n) + a₋·r_n/(z − ζ̄_n)]: a pole inside every disc.
    DiscCharges { plus: f64, minus: f64, terms: usize },
    /// e^{−sz}, bounded by 1 on Π.
    Exponential { scale: f64 },
    Sum { terms: Vec<ChainFunctionSpec> },
}

pub fn chain_test_function(spec: &ChainFunctionSpec, chain: &DiscChain) -> Result<AnalyticFunction> {
    Ok(match spec {
        ChainFunctionSpec::Constant { re, im } => AnalyticFunction::constant(c64(*re, *im)),
        ChainFunctionSpec::DiscCharges { plus, minus, terms } => {
            if *terms > chain.len() {
                return Err(Error::InvalidTestFunction(format!("{terms} charges for a chain of {} discs", chain.len())));
            }
            let mut charges: Vec<(C64, C64, f64)> = Vec::with_capacity(2 * terms);
            for n in 0..*terms {
                let (c, r) = (chain.centers[n], chain.radii[n]);
                if *plus != 0.0 {
                    charges.push((c, c64(plus * r, 0.0), plus.abs()));
                }
                if *minus != 0.0 {
                    charges.push((c.conj(), c64(minus * r, 0.0), minus.abs()));
                }
            }
            // Outside every disc the nearest pole m contributes at most |a_m|, and every
            // other pole n sits at least |c_m − c_n|/2 away.
            let mut bound: f64 = 0.0;
            for &(cm, _, am) in &charges {
                let mut b = am;
                for &(cn, wn, _) in &charges {
                    if cn != cm {
                        b += 2.0 * wn.norm() / (cm - cn).norm();
                    }
                }
                bound = bound.max(b);
            }
            let singular = SingularSet { polylines: charges.iter().map(|(c, _, _)| vec![*c]).collect() };
            let ch: Vec<(C64, C64)> = charges.iter().map(|&(c, w, _)| (c, w)).collect();
            AnalyticFunction::new(
                format!("disc_charges({plus}, {minus}, {terms})"),
                Arc::new(move |z| ch.iter().map(|&(c, w)| w / (z - c)).sum()),
                singular,
                bound,
            )
        }
        ChainFunctionSpec::Exponential { scale } => {
            if !(*scale >= 0.0) {
                return Err(Error::InvalidTestFunction(format!("e^(−sz) is unbounded on Π for s = {scale}")));
            }
            let s = *scale;
            AnalyticFunction::new(format!("exp(-{s}z)"), Arc::new(move |z| (-s * z).exp()), SingularSet::empty(), 1.0)
        }
        ChainFunctionSpec::Sum { terms } => {
            let mut acc = AnalyticFunction::zero();
            for t in terms {
                acc = acc.plus(&chain_test_function(t, chain)?);
            }
            acc
        }
    })
}

// ---------------------------------------------------------------------------
// Theorem 9 splitting

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Theorem9Config {
    /// Circles ∂B_1 … ∂B_N.
    pub truncation: usize,
    /// Axis window [−iY, iY].
    pub axis_window: f64,
    /// Trapezoid nodes per circle: max(min_nodes, node_factor·r_n/d), d the distance of the
    /// nearest singularity of the integrand to the circle.
    pub min_nodes: usize,
    pub node_factor: f64,
    pub max_nodes: usize,
}

impl Default for Theorem9Config {
    fn default() -> Self {
        Self { truncation: 16, axis_window: 1e4, min_nodes: 64, node_factor: 16.0, max_nodes: 1 << 16 }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AxisValue {
    pub value: C64,
    pub quadrature_error: f64,
    /// Bound on the discarded part of the axis integral, |y| > Y.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Theorem9Point {
    pub zeta: C64,
    pub f: C64,
    pub f1: C64,
    pub f_plus: C64,
    pub f_minus: C64,
    /// |f − f₁ − f₊ − f₋|.
    pub residual: f64,
    /// |f − (f₁ + f₊) + f₋|: the grouping f = (f₁+f₊) − f₋ read literally.
    pub literal_grouping_residual: f64,
    pub axis_tail_bound: f64,
    pub disc_tail_bound: f64,
}

/// The three pieces of the decomposition, truncated at N circles and the axis window Y.
#[derive(Clone)]
pub struct Theorem9Split {
    f: AnalyticFunction,
    chain: DiscChain,
    cfg: Theorem9Config,
    singular_points: Vec<C64>,
}

pub fn theorem9_split(f: &AnalyticFunction, chain: &DiscChain, cfg: Theorem9Config) -> Result<Theorem9Split> {
    if cfg.truncation == 0 || cfg.truncation > chain.len() {
        return Err(Error::Config(format!("truncation {} outside 1..={}", cfg.truncation, chain.len())));
    }
    if !(cfg.axis_window > 0.0 && cfg.node_factor > 0.0 && cfg.min_nodes >= 8 && cfg.max_nodes >= cfg.min_nodes) {
        return Err(Error::Config(format!("bad truncation parameters {cfg:?}")));
    }
    let singular_points = f.singular_set().samples();
    for p in &singular_points {
        if p.re > 0.0 && !chain.in_s(*p) && chain.g.value(p.re) > 0.0 {
            return Err(Error::InvalidTestFunction(format!("{} is singular at {p}, outside S", f.name())));
        }
    }
    Ok(Theorem9Split { f: f.clone(), chain: chain.clone(), cfg, singular_points })
}

impl Theorem9Split {
    pub fn config(&self) -> Theorem9Config {
        self.cfg
    }
    pub fn chain(&self) -> &DiscChain {
        &self.chain
    }
    pub fn function(&self) -> &AnalyticFunction {
        &self.f
    }

    fn circle(&self, n: usize, conj: bool) -> (C64, f64) {
        let c = self.chain.centers[n];
        (if conj { c.conj() } else { c }, self.chain.radii[n])
    }

    fn nodes(&self, center: C64, r: f64, zeta: C64) -> usize {
        let mut d = ((zeta - center).norm() - r).abs();
        for p in &self.singular_points {
            d = d.min(((p - center).norm() - r).abs().max(0.0));
        }
        d = d.min(((c64(-1.0, 0.0) - center).norm() - r).abs());
        let want = if d > 0.0 { (self.cfg.node_factor * r / d).ceil() } else { f64::INFINITY };
        (want.max(self.cfg.min_nodes as f64) as usize).min(self.cfg.max_nodes)
    }

    /// C_{∂B}[k](ζ) over a clockwise circle.
    fn cauchy_circle<K: Fn(C64) -> C64>(&self, k: K, center: C64, r: f64, zeta: C64) -> C64 {
        let nodes = self.nodes(center, r, zeta);
        circle_contour(|z| k(z) / (z - zeta), center, r, nodes, true) / (2.0 * PI * C64::i())
    }

    /// C_{∂B_n}[f](ζ), 0-based n.
    pub fn circle_transform(&self, n: usize, conj: bool, zeta: C64) -> Result<C64> {
        let (c, r) = self.circle(n, conj);
        if (zeta - c).norm() <= r {
            return Err(Error::SingularPoint(format!("{zeta} lies in the closed disc {}", n + 1)));
        }
        Ok(self.cauchy_circle(|z| self.f.eval(z), c, r, zeta))
    }

    fn disc_sum(&self, zeta: C64, conj: bool) -> Result<C64> {
        if let Some(n) = self.chain.containing_disc(zeta, conj).filter(|&n| n < self.cfg.truncation) {
            return Err(Error::SingularPoint(format!("{zeta} lies in the closed disc {}", n + 1)));
        }
        let s: C64 = (0..self.cfg.truncation)
            .into_par_iter()
            .map(|n| {
                let (c, r) = self.circle(n, conj);
                self.cauchy_circle(|z| self.f.eval(z) / (1.0 + z), c, r, zeta)
            })
            .sum();
        Ok((1.0 + zeta) * s)
    }

    pub fn f_plus(&self, zeta: C64) -> Result<C64> {
        self.disc_sum(zeta, false)
    }

    pub fn f_minus(&self, zeta: C64) -> Result<C64> {
        self.disc_sum(zeta, true)
    }

    /// −(1+ζ)·(1/2π)∫_{−Y}^{Y} f(iy)/((1+iy)(iy − ζ)) dy, for Re ζ > 0.
    pub fn f1(&self, zeta: C64) -> Result<AxisValue> {
        if !(zeta.re > 0.0) {
            return Err(Error::Domain(format!("f₁ is defined on the right half-plane, got {zeta}")));
        }
        let y_max = self.cfg.axis_window;
        let mut breaks = vec![0.0];
        let mut peak = |y0: f64, w: f64| {
            let mut s = 0.0;
            while s < 64.0 {
                breaks.push(y0 - s * w);
                breaks.push(y0 + s * w);
                s = if s == 0.0 { 1.0 } else { 4.0 * s };
            }
        };
        peak(zeta.im, zeta.re);
        for p in &self.singular_points {
            if p.im.abs() < y_max {
                peak(p.im, p.re.abs().max(1e-300));
            }
        }
        let mut y = 1.0;
        while y < y_max {
            breaks.push(y);
            breaks.push(-y);
            y *= 4.0;
        }
        let opts = AdaptiveOptions { abs_tol: 1e-13, rel_tol: 1e-11, max_segments: 40_000 };
        let q = integrate_adaptive(
            |y| {
                let z = c64(0.0, y);
                self.f.eval(z) / ((1.0 + z) * (z - zeta))
            },
            -y_max,
            y_max,
            &breaks,
            opts,
        );
        let factor = (1.0 + zeta).norm() / (2.0 * PI);
        Ok(AxisValue {
            value: -(1.0 + zeta) * q.value / (2.0 * PI),
            quadrature_error: factor * q.error,
            tail_bound: factor * self.f.sup_bound() * axis_tail_integral(zeta, y_max),
        })
    }

    /// Bound on the circles beyond N: Σ_{n>N} ‖f‖·|1+ζ|/|1+z|_min · r_n/dist(ζ, B_n).
    pub fn disc_tail_bound(&self, zeta: C64) -> f64 {
        let nf = self.f.sup_bound();
        let mut total = 0.0;
        for conj in [false, true] {
            for n in self.cfg.truncation..self.chain.len() {
                let d = self.chain.disc_distance(n, zeta, conj);
                if d == 0.0 {
                    return f64::INFINITY;
                }
                total += self.chain.radii[n] / d;
            }
            if let ChainTail::Geometric { .. } = self.chain.tail {
                // Beyond the stored discs: r_n ≤ g(ξ_n)·(r_n/g(ξ_n)) ≤ ξ_last·tail, all within |z| ≤ 2ξ_last.
                let last = *self.chain.xi.last().unwrap();
                let d = zeta.norm() - 2.0 * last;
                if d <= 0.0 {
                    return f64::INFINITY;
                }
                total += last * self.chain.ratio_tail(self.chain.len()) / d;
            }
        }
        nf * (1.0 + zeta).norm() * total
    }

    pub fn decompose(&self, zeta: C64) -> Result<Theorem9Point> {
        if self.chain.in_s(zeta) {
            return Err(Error::SingularPoint(format!("{zeta} lies in S")));
        }
        let f = self.f.eval(zeta);
        let a = self.f1(zeta)?;
        let fp = self.f_plus(zeta)?;
        let fm = self.f_minus(zeta)?;
        Ok(Theorem9Point {
            zeta,
            f,
            f1: a.value,
            f_plus: fp,
            f_minus: fm,
            residual: (f - a.value - fp - fm).norm(),
            literal_grouping_residual: (f - a.value - fp + fm).norm(),
            axis_tail_bound: a.tail_bound + a.quadrature_error,
            disc_tail_bound: self.disc_tail_bound(zeta),
        })
    }
}

/// ∫_{|y|>Y} dy/(|1+iy|·|iy − ζ|) ≤ 2∫_Y^∞ dy/(y(y − |ζ|)) = (2/|ζ|)·ln(Y/(Y − |ζ|)).
fn axis_tail_integral(zeta: C64, y_max: f64) -> f64 {
    let a = zeta.norm();
    if a >= y_max {
        return f64::INFINITY;
    }
    if a < 1e-8 * y_max {
        return 2.0 / y_max;
    }
    2.0 / a * (y_max / (y_max - a)).ln()
}

/// Polar probes in Π outside S, plus rings at distance 2r_n around the first discs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Theorem9Probes {
    pub radius: f64,
    pub levels: usize,
    pub angles: usize,
    pub near_discs: usize,
    pub near_angles: usize,
}

impl Default for Theorem9Probes {
    fn default() -> Self {
        Self { radius: 1.0, levels: 12, angles: 12, near_discs: 4, near_angles: 8 }
    }
}

/// Returns the probes outside S and the number excluded for lying in a disc.
pub fn theorem9_probes(chain: &DiscChain, spec: &Theorem9Probes) -> (Vec<C64>, usize) {
    let mut raw = Vec::new();
    for j in 0..=spec.levels {
        let rho = spec.radius * 0.5f64.powi(j as i32);
        for i in 0..spec.angles {
            raw.push(C64::from_polar(rho, -0.5 * PI + PI * (i as f64 + 0.5) / spec.angles as f64));
        }
    }
    for n in 0..spec.near_discs.min(chain.len()) {
        for i in 0..spec.near_angles {
            let w = C64::from_polar(2.0 * chain.radii[n], 2.0 * PI * (i as f64 + 0.25) / spec.near_angles as f64);
            raw.push(chain.centers[n] + w);
            raw.push(chain.centers[n].conj() + w);
        }
    }
    let total = raw.len();
    let kept: Vec<C64> = raw.into_iter().filter(|z| z.re > 0.0 && !chain.in_s(*z)).collect();
    let excluded = total - kept.len();
    (kept, excluded)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Theorem9Report {
    pub config: Theorem9Config,
    pub points: usize,
    pub excluded: usize,
    pub identity_residual: f64,
    pub literal_grouping_residual: f64,
    pub max_axis_tail_bound: f64,
    pub max_disc_tail_bound: f64,
    pub sup_f1: f64,
    pub sup_f_plus: f64,
    pub sup_f_minus: f64,
    /// sup ℓ·|∂̄f₋| over upper half-plane probes, ℓ = min(|ζ|, dist(ζ, S₋)).
    pub cr_residual_f_minus: f64,
    pub tolerance: f64,
    pub advisory: Option<String>,
}

pub fn theorem9_report(split: &Theorem9Split, probes: &[C64], excluded: usize, tolerance: f64) -> Result<Theorem9Report> {
    let pts: Vec<Theorem9Point> = probes.par_iter().map(|&z| split.decompose(z)).collect::<Result<_>>()?;
    let max = |v: &dyn Fn(&Theorem9Point) -> f64| pts.iter().map(v).fold(0.0, f64::max);
    let upper: Vec<C64> = probes.iter().copied().filter(|z| z.im > 0.0).collect();
    let chain = split.chain();
    let scale = |z: C64| {
        let d = (0..chain.len()).map(|n| chain.disc_distance(n, z, true)).fold(f64::INFINITY, f64::min);
        z.norm().min(d)
    };
    let fm = |z: C64| split.f_minus(z).unwrap_or(c64(f64::NAN, f64::NAN));
    let cr = scaled_cr_residual(&fm, &upper, &scale, 1e-3);
    let axis = max(&|p| p.axis_tail_bound);
    let disc = max(&|p| p.disc_tail_bound);
    let advisory = (axis + disc > tolerance).then(|| {
        format!("truncation bounds {axis:.2e} (axis) + {disc:.2e} (discs) exceed {tolerance:.1e}: increase N or Y")
    });
    Ok(Theorem9Report {
        config: split.config(),
        points: pts.len(),
        excluded,
        identity_residual: max(&|p| p.residual),
        literal_grouping_residual: max(&|p| p.literal_grouping_residual),
        max_axis_tail_bound: axis,
        max_disc_tail_bound: disc,
        sup_f1: max(&|p| p.f1.norm()),
        sup_f_plus: max(&|p| p.f_plus.norm()),
        sup_f_minus: max(&|p| p.f_minus.norm()),
        cr_residual_f_minus: cr,
        tolerance,
        advisory,
    })
}

/// Identity residuals over successively finer (N, Y); `monotone` if each level improves.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CauchySequence {
    pub levels: Vec<Theorem9Report>,
    pub monotone: bool,
}

pub fn cauchy_sequence(
    f: &AnalyticFunction,
    chain: &DiscChain,
    levels: &[Theorem9Config],
    probes: &[C64],
    excluded: usize,
    tolerance: f64,
) -> Result<CauchySequence> {
    let mut out = Vec::new();
    for cfg in levels {
        let s = theorem9_split(f, chain, *cfg)?;
        out.push(theorem9_report(&s, probes, excluded, tolerance)?);
    }
    let monotone = out.windows(2).all(|w| w[1].identity_residual < w[0].identity_residual);
    Ok(CauchySequence { levels: out, monotone })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircleBoundCheck {
    pub points: usize,
    pub seed: u64,
    /// max over points and n ≤ N of |C_{∂B_n}[f](ζ)| / (‖f‖ r_n/dist(ζ, B_n)).
    pub max_ratio: f64,
    pub holds: bool,
}

/// |C_{∂B_n}[f](ζ)| ≤ ‖f‖_∞ r_n/dist(ζ, B_n) at random ζ outside S₊.
pub fn circle_bound_check(split: &Theorem9Split, points: usize, seed: u64) -> Result<CircleBoundCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chain = split.chain();
    let mut zs = Vec::with_capacity(points);
    while zs.len() < points {
        let z = if rng.gen_bool(0.5) {
            c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        } else {
            C64::from_polar(10f64.powf(-rng.gen_range(0.0..4.0)), rng.gen_range(0.0..2.0 * PI))
        };
        if chain.containing_disc(z, false).is_none() {
            zs.push(z);
        }
    }
    let nf = split.function().sup_bound();
    let mut worst: f64 = 0.0;
    for z in &zs {
        for n in 0..split.config().truncation {
            let lhs = split.circle_transform(n, false, *z)?.norm();
            let rhs = nf * chain.radii[n] / chain.disc_distance(n, *z, false);
            worst = worst.max(lhs / rhs);
        }
    }
    Ok(CircleBoundCheck { points, seed, max_ratio: worst, holds: worst <= 1.0 + 1e-9 })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthCheck {
    pub sector_slope: f64,
    pub radii: Vec<f64>,
    /// max over the sampled directions of |f₁| at each radius.
    pub sup_f1: Vec<f64>,
    /// ‖f‖·|1+ζ|/(2π)·∫ dy/(|1+iy||iy − ζ|), the majorant behind the log growth.
    pub majorant: Vec<f64>,
    /// Slopes against ln(1/|ζ|).
    pub f1_slope: f64,
    pub majorant_slope: f64,
    pub below_majorant: bool,
    pub slope_ratio_ok: bool,
}

/// Fits |f₁| and its majorant against ln(1/|ζ|) inside the sector |η| < kξ, |ζ| < R.
pub fn f1_growth(split: &Theorem9Split, k: f64, radius: f64, levels: usize, directions: usize) -> Result<GrowthCheck> {
    let half = k.atan();
    let thetas: Vec<f64> =
        (0..directions).map(|i| -half + 2.0 * half * (i as f64 + 0.5) / directions as f64).collect();
    let radii: Vec<f64> = (1..=levels).map(|j| radius * 0.5f64.powi(j as i32)).collect();
    let nf = split.function().sup_bound();
    let rows: Vec<(f64, f64)> = radii
        .par_iter()
        .map(|&rho| -> Result<(f64, f64)> {
            let mut s: f64 = 0.0;
            let mut m: f64 = 0.0;
            for &t in &thetas {
                let z = C64::from_polar(rho, t);
                s = s.max(split.f1(z)?.value.norm());
                m = m.max(nf * majorant_integral(z));
            }
            Ok((s, m))
        })
        .collect::<Result<_>>()?;
    let x: Vec<f64> = radii.iter().map(|r| -r.ln()).collect();
    let sup_f1: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let majorant: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let (f1_slope, _) = linear_fit(&x, &sup_f1);
    let (majorant_slope, _) = linear_fit(&x, &majorant);
    Ok(GrowthCheck {
        sector_slope: k,
        below_majorant: sup_f1.iter().zip(&majorant).all(|(a, b)| *a <= b * (1.0 + 1e-6)),
        slope_ratio_ok: f1_slope <= 1.2 * majorant_slope,
        radii,
        sup_f1,
        majorant,
        f1_slope,
        majorant_slope,
    })
}

/// |1+ζ|/(2π)·∫_ℝ dy/(|1+iy|·|iy − ζ|).
fn majorant_integral(zeta: C64) -> f64 {
    let y_max = 1e8;
    let mut breaks = vec![0.0, zeta.im];
    let mut s = 1.0;
    while s < 1e3 {
        breaks.push(zeta.im - s * zeta.re);
        breaks.push(zeta.im + s * zeta.re);
        s *= 4.0;
    }
    let mut y = 1.0;
    while y < y_max {
        breaks.push(y);
        breaks.push(-y);
        y *= 4.0;
    }
    let opts = AdaptiveOptions { abs_tol: 1e-12, rel_tol: 1e-9, max_segments: 8000 };
    let q = integrate_adaptive(
        |y| c64(1.0 / ((1.0 + y * y).sqrt() * (c64(0.0, y) - zeta).norm()), 0.0),
        -y_max,
        y_max,
        &breaks,
        opts,
    );
    (1.0 + zeta).norm() / (2.0 * PI) * (q.value.re + axis_tail_integral(zeta, y_max))
}

// ---------------------------------------------------------------------------
// Chain certificates

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CertificateGrid {
    /// Angle A_k⁺ = {ξ > 0, 0 < η < kξ} excluded from the distance check; k > 2.
    pub k: f64,
    pub radius: f64,
    pub levels: usize,
    pub angles: usize,
    pub truncation: usize,
}

impl Default for CertificateGrid {
    fn default() -> Self {
        Self { k: 3.0, radius: 1.0, levels: 40, angles: 64, truncation: 40 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainCertificate {
    pub grid: CertificateGrid,
    pub points_checked: usize,
    pub excluded_in_angle: usize,
    /// min over checked ζ and n ≤ N of dist(ζ, B_n)/g(ξ_n).
    pub min_distance_ratio: f64,
    /// sin φ − max_{n>N/2} r_n/g(ξ_n), φ the angle between η = 2ξ and η = kξ: the constant
    /// the distance bound settles to along the tail.
    pub c_k: f64,
    pub distance_bound_holds: bool,
    /// dist(ζ, B_n) ≥ ξ_n − r_n on the left half-plane probes.
    pub left_half_plane_holds: bool,
    /// Σ_{n≤N} r_n/g(ξ_n) for N = 1..=truncation.
    pub partial_sums: Vec<f64>,
    pub remainder_bound: f64,
    pub summable: bool,
}

pub fn chain_bound_certificates(chain: &DiscChain, grid: &CertificateGrid) -> Result<ChainCertificate> {
    if !(grid.k > 2.0) {
        return Err(Error::Config(format!("the excluded angle needs k > 2, got {}", grid.k)));
    }
    let n_max = grid.truncation.min(chain.len());
    let terms = chain.ratio_terms();
    let sin_phi = (grid.k.atan() - 2f64.atan()).sin();
    let mut checked = 0;
    let mut excluded = 0;
    let mut per_disc = vec![f64::INFINITY; n_max];
    let mut left_ok = true;
    for j in 0..=grid.levels {
        let rho = grid.radius * 0.5f64.powi(j as i32);
        for i in 0..grid.angles {
            let z = C64::from_polar(rho, PI * (i as f64 + 0.5) / grid.angles as f64);
            if z.re > 0.0 && z.im < grid.k * z.re {
                excluded += 1;
                continue;
            }
            checked += 1;
            for (n, m) in per_disc.iter_mut().enumerate() {
                let d = chain.disc_distance(n, z, false);
                *m = m.min(d / chain.g.value(chain.xi[n]));
                if z.re <= 0.0 && d < (chain.xi[n] - chain.radii[n]) * (1.0 - 1e-12) {
                    left_ok = false;
                }
            }
        }
    }
    // dist(ζ, B_n) ≥ g(ξ_n)·sin φ − r_n for every n; a uniform c_k appears once r_n/g(ξ_n) < sin φ.
    let per_disc_ok = per_disc.iter().zip(&terms).all(|(m, t)| *m > 0.0 && *m >= (sin_phi - t) * (1.0 - 1e-12));
    let min_ratio = per_disc.iter().copied().fold(f64::INFINITY, f64::min);
    let c_k = sin_phi - terms.iter().skip(n_max / 2).take(n_max - n_max / 2).fold(0.0, |a: f64, b| a.max(*b));
    let mut partial_sums = Vec::with_capacity(n_max);
    let mut acc = 0.0;
    for t in terms.iter().take(n_max) {
        acc += t;
        partial_sums.push(acc);
    }
    let remainder_bound = chain.ratio_tail(n_max);
    Ok(ChainCertificate {
        grid: *grid,
        points_checked: checked,
        excluded_in_angle: excluded,
        min_distance_ratio: min_ratio,
        c_k,
        distance_bound_holds: per_disc_ok && min_ratio > 0.0,
        left_half_plane_holds: left_ok,
        partial_sums,
        remainder_bound,
        summable: remainder_bound.is_finite(),
    })
}

// ---------------------------------------------------------------------------
// Scenario catalog

fn default_mu() -> f64 {
    1.0
}
fn default_c() -> f64 {
    2.0
}
fn default_end() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name")]
pub enum ScenarioSpec {
    /// Rays of slope k/2 and 2(1+μ)k around the corridor kξ < η < (1+μ)kξ.
    #[serde(rename = "EX1")]
    Ex1 { k: f64, mu: f64 },
    /// g = dist(ξ, ℝ∖G) for G a finite union of intervals in (0, ∞).
    #[serde(rename = "EX2")]
    Ex2 {
        intervals: Vec<(f64, f64)>,
        #[serde(default = "default_mu")]
        mu: f64,
    },
    /// S₁ = {η = g(ξ)}, S₂ = {η = 2g(ξ)} with g(0) = g′(0) = 0.
    #[serde(rename = "EX3")]
    Ex3 {
        g: GraphSpec,
        #[serde(default = "default_end")]
        domain_end: f64,
    },
    /// φ₂ = c·φ₁, c > 1, sharing the real tangent at 0.
    #[serde(rename = "TANGENT_BS")]
    TangentBs {
        phi1: GraphSpec,
        #[serde(default = "default_c")]
        c: f64,
        #[serde(default = "default_end")]
        domain_end: f64,
    },
    /// φ₂ = φ₁ + Δ with Δ/φ₁ → 0.
    #[serde(rename = "TANGENT_NOT_BS")]
    TangentNotBs {
        phi1: GraphSpec,
        delta: GraphSpec,
        #[serde(default = "default_end")]
        domain_end: f64,
    },
    #[serde(rename = "DISC_CHAIN")]
    DiscChain { g: GraphSpec, chain: ChainSpec },
    /// Any two graphs φ₁ < φ₂ from the origin, for the classifier.
    #[serde(rename = "PAIR")]
    Pair {
        lower: GraphSpec,
        upper: GraphSpec,
        #[serde(default = "default_end")]
        domain_end: f64,
    },
}

impl ScenarioSpec {
    pub fn label(&self) -> &'static str {
        match self {
            ScenarioSpec::Ex1 { .. } => "EX1",
            ScenarioSpec::Ex2 { .. } => "EX2",
            ScenarioSpec::Ex3 { .. } => "EX3",
            ScenarioSpec::TangentBs { .. } => "TANGENT_BS",
            ScenarioSpec::TangentNotBs { .. } => "TANGENT_NOT_BS",
            ScenarioSpec::DiscChain { .. } => "DISC_CHAIN",
            ScenarioSpec::Pair { .. } => "PAIR",
        }
    }
}

/// Everything needed to run one scenario.
#[derive(Debug, Clone)]
pub struct ScenarioBundle {
    pub spec: ScenarioSpec,
    /// S₁, S₂ as arcs from the origin, when they are single arcs.
    pub arcs: Vec<ArcCurve>,
    pub s1: SingularSet,
    pub s2: SingularSet,
    /// Graph pair for the classifier.
    pub pair: Option<PairSpec>,
    pub cutting: Option<CuttingFunction>,
    pub solver: Option<SolverKind>,
    pub test_function: TestFunctionSpec,
    pub radius: f64,
    pub plateau: PlateauSpec,
    pub chain: Option<DiscChain>,
    pub expected: Option<Verdict>,
}

impl ScenarioBundle {
    /// Split configuration with the recommended solver and the plateau rings at r₀ = R/2.
    pub fn split_config(&self) -> SplitConfig {
        SplitConfig {
            solver: self.solver.unwrap_or(SolverKind::Standard),
            plateau: self.plateau,
            ..SplitConfig::default()
        }
    }
}

fn max_abs(s: &SingularSet) -> f64 {
    s.samples().iter().fold(0.0, |m: f64, z| m.max(z.norm()))
}

fn plateau_for(radius: f64) -> PlateauSpec {
    PlateauSpec { r0: 0.5 * radius, ..PlateauSpec::default() }
}

// Slope of the smallest angle |η| ≤ kξ containing both graphs.
fn containing_slope(a: &GraphFunction, b: &GraphFunction, end: f64) -> f64 {
    let m = refinement_grid(end, 60, 2000)
        .into_iter()
        .map(|t| (a.value(t).abs().max(b.value(t).abs())) / t)
        .fold(0.0, f64::max);
    m * 1.01 + 1e-300
}

// g(0) = 0 and g′ → 0 at the origin, judged on the finest sampled octaves.
fn check_flat_tangent(g: &GraphFunction, what: &str) -> Result<()> {
    let end = g.domain_end();
    for t in refinement_grid(end, 60, 400) {
        if !(g.value(t) > 0.0) {
            return Err(Error::Hypothesis(format!("{what} must be positive on (0, {end}], got {} at {t}", g.value(t))));
        }
    }
    let tiny = end * 0.5f64.powi(40);
    if g.value(0.0) != 0.0 || g.derivative(tiny).abs() > 1e-6 || g.value(tiny) / tiny > 1e-6 {
        return Err(Error::Hypothesis(format!("{what} needs g(0) = g′(0) = 0")));
    }
    Ok(())
}

/// Two graphs φ₁ < φ₂ sharing the real tangent; the corridor sits at the geometric mean
/// ratio when φ₂/φ₁ ≥ c > 1.
fn tangent_bundle(spec: ScenarioSpec, phi1: GraphFunction, phi2: GraphFunction, ratio: Option<f64>) -> Result<ScenarioBundle> {
    let end = phi1.domain_end();
    let radius = 1.0;
    let arcs = vec![ArcCurve::graph(phi1.clone()), ArcCurve::graph(phi2.clone())];
    let k = containing_slope(&phi1, &phi2, end);
    let pair = PairSpec::new(phi1.clone(), phi2.clone(), k)?;
    let (cutting, solver, expected) = match ratio {
        Some(c) => {
            let cf = CuttingFunction::new(phi1.with_domain_end(2.0 * radius).scaled(c.cbrt()), c.cbrt() - 1.0, radius)?;
            (Some(cf), Some(SolverKind::Tangential), Some(Verdict::Bs))
        }
        None => (None, None, Some(Verdict::NotBs)),
    };
    Ok(ScenarioBundle {
        s1: SingularSet::from_polyline(arc_polyline(&arcs[0])),
        s2: SingularSet::from_polyline(arc_polyline(&arcs[1])),
        arcs,
        pair: Some(pair),
        cutting,
        solver,
        test_function: TestFunctionSpec::Constant { re: 1.0, im: 0.0 },
        radius,
        plateau: plateau_for(radius),
        chain: None,
        expected,
        spec,
    })
}

pub fn scenario(spec: &ScenarioSpec) -> Result<ScenarioBundle> {
    scenario_in(spec, None)
}

/// Like `scenario`, resolving relative CSV graph paths against `base`.
pub fn scenario_in(spec: &ScenarioSpec, base: Option<&Path>) -> Result<ScenarioBundle> {
    match spec {
        ScenarioSpec::Ex1 { k, mu } => {
            if !(*k > 0.0 && *mu > 0.0 && k.is_finite() && mu.is_finite()) {
                return Err(Error::Hypothesis(format!("EX1 needs k, μ > 0, got k = {k}, μ = {mu}")));
            }
            let radius = 1.0;
            let (lo, hi) = (0.5 * k, 2.0 * (1.0 + mu) * k);
            let length = 0.5 * radius;
            let arcs = vec![ArcCurve::ray(lo.atan(), length)?, ArcCurve::ray(hi.atan(), length)?];
            let g_lo = GraphFunction::new(GraphSpec::linear(lo), length / (1.0 + lo * lo).sqrt())?;
            let g_hi = GraphFunction::new(GraphSpec::linear(hi), length / (1.0 + hi * hi).sqrt())?;
            let pair = PairSpec::new(g_lo.with_domain_end(g_hi.domain_end()), g_hi, hi * 1.01)?;
            let cf = CuttingFunction::new(GraphFunction::new(GraphSpec::linear(*k), 2.0 * radius)?, *mu, radius)?;
            Ok(ScenarioBundle {
                s1: SingularSet::from_polyline(arc_polyline(&arcs[0])),
                s2: SingularSet::from_polyline(arc_polyline(&arcs[1])),
                arcs,
                pair: Some(pair),
                cutting: Some(cf),
                solver: Some(SolverKind::Transversal),
                test_function: TestFunctionSpec::MobiusPower { beta: 0.5 },
                radius,
                plateau: plateau_for(radius),
                chain: None,
                expected: Some(Verdict::Bs),
                spec: spec.clone(),
            })
        }
        ScenarioSpec::Ex2 { intervals, mu } => {
            if intervals.is_empty() || !(*mu > 0.0) {
                return Err(Error::Hypothesis("EX2 needs a non-empty G and μ > 0".into()));
            }
            let mut iv = intervals.clone();
            iv.sort_by(|a, b| a.0.total_cmp(&b.0));
            for (i, &(a, b)) in iv.iter().enumerate() {
                if !(a >= 0.0 && b > a && b.is_finite()) {
                    return Err(Error::Hypothesis(format!("bad interval ({a}, {b}) in G ⊂ (0, ∞)")));
                }
                if i > 0 && a < iv[i - 1].1 {
                    return Err(Error::Hypothesis(format!("intervals of G overlap at {a}")));
                }
            }
            let sup_g = iv.last().unwrap().1;
            let terms: Vec<GraphSpec> = iv.iter().map(|&(a, b)| GraphSpec::Tent { a, b }).collect();
            let g = GraphFunction::new(GraphSpec::Sum { terms }, 4.0 * sup_g)?;
            let mut p1 = Vec::new();
            let mut p2 = Vec::new();
            for &(a, b) in &iv {
                let mut s: Vec<f64> = refinement_grid(0.5, 40, 100);
                let mirrored: Vec<f64> = s.iter().map(|x| 1.0 - x).collect();
                s.extend(mirrored);
                s.push(0.0);
                s.sort_by(f64::total_cmp);
                s.dedup();
                let pts = |c: f64| s.iter().map(|&u| a + (b - a) * u).map(|x| c64(x, c * g.value(x))).collect::<Vec<_>>();
                p1.push(pts(0.5));
                p2.push(pts(2.0 * (1.0 + mu)));
            }
            let s1 = SingularSet { polylines: p1 };
            let s2 = SingularSet { polylines: p2 };
            let radius = 2.0 * max_abs(&s1).max(max_abs(&s2));
            let cf = CuttingFunction::new(g.with_domain_end(2.0 * radius), *mu, radius)?;
            Ok(ScenarioBundle {
                arcs: Vec::new(),
                s1,
                s2,
                pair: None,
                cutting: Some(cf),
                solver: Some(SolverKind::Jones),
                test_function: TestFunctionSpec::Constant { re: 1.0, im: 0.0 },
                radius,
                plateau: plateau_for(radius),
                chain: None,
                expected: None,
                spec: spec.clone(),
            })
        }
        ScenarioSpec::Ex3 { g, domain_end } => {
            let phi1 = GraphFunction::with_base(g.clone(), *domain_end, base)?;
            check_flat_tangent(&phi1, "g")?;
            let phi2 = GraphFunction::with_base(g.clone().scaled(2.0), *domain_end, base)?;
            tangent_bundle(spec.clone(), phi1, phi2, Some(2.0))
        }
        ScenarioSpec::TangentBs { phi1, c, domain_end } => {
            if !(*c > 1.0 && c.is_finite()) {
                return Err(Error::Hypothesis(format!("TANGENT_BS needs c > 1, got {c}")));
            }
            let p1 = GraphFunction::with_base(phi1.clone(), *domain_end, base)?;
            check_flat_tangent(&p1, "φ₁")?;
            let p2 = GraphFunction::with_base(phi1.clone().scaled(*c), *domain_end, base)?;
            tangent_bundle(spec.clone(), p1, p2, Some(*c))
        }
        ScenarioSpec::TangentNotBs { phi1, delta, domain_end } => {
            let p1 = GraphFunction::with_base(phi1.clone(), *domain_end, base)?;
            check_flat_tangent(&p1, "φ₁")?;
            let d = GraphFunction::with_base(delta.clone(), *domain_end, base)?;
            let ratio = |t: f64| d.value(t) / p1.value(t);
            let grid = refinement_grid(*domain_end, 60, 400);
            if grid.iter().any(|&t| !(d.value(t) > 0.0)) {
                return Err(Error::Hypothesis("Δ must be positive on (0, b]".into()));
            }
            let (coarse, fine) = (ratio(domain_end * 0.5f64.powi(10)), ratio(domain_end * 0.5f64.powi(50)));
            if !(fine < 1e-3 && fine < coarse) {
                return Err(Error::Hypothesis(format!("Δ/φ₁ must tend to 0: {coarse:.3e} at 2⁻¹⁰b, {fine:.3e} at 2⁻⁵⁰b")));
            }
            let p2 = GraphFunction::with_base(phi1.clone().plus(delta.clone()), *domain_end, base)?;
            tangent_bundle(spec.clone(), p1, p2, None)
        }
        ScenarioSpec::Pair { lower, upper, domain_end } => {
            let p1 = GraphFunction::with_base(lower.clone(), *domain_end, base)?;
            let p2 = GraphFunction::with_base(upper.clone(), *domain_end, base)?;
            let mut b = tangent_bundle(spec.clone(), p1, p2, None)?;
            b.expected = None;
            Ok(b)
        }
        ScenarioSpec::DiscChain { g, chain } => {
            let xi1 = match chain {
                ChainSpec::Geometric { xi0, xi_ratio, .. } => xi0 * xi_ratio,
                ChainSpec::Explicit { xi, .. } => xi.first().copied().unwrap_or(0.0),
            };
            if !(xi1 > 0.0) {
                return Err(Error::Hypothesis("the chain needs ξ₁ > 0".into()));
            }
            let gf = GraphFunction::with_base(g.clone(), xi1, base)?;
            let dc = DiscChain::from_spec(gf, chain)?;
            let (s1, s2) = dc.singular_sets(64);
            let radius = 2.0 * max_abs(&s1);
            Ok(ScenarioBundle {
                arcs: Vec::new(),
                s1,
                s2,
                pair: None,
                cutting: None,
                solver: None,
                test_function: TestFunctionSpec::Constant { re: 1.0, im: 0.0 },
                radius,
                plateau: plateau_for(radius),
                chain: Some(dc),
                expected: Some(Verdict::Bs),
                spec: spec.clone(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn square() -> GraphSpec {
        GraphSpec::power(1.0, 2.0)
    }

    fn chain(count: usize) -> DiscChain {
        DiscChain::from_spec(GraphFunction::new(square(), 0.5).unwrap(), &ChainSpec::standard_geometric(count)).unwrap()
    }

    // Residues: for f = Σ a r_n/(z − c_n) with c_n inside the circles,
    // f₊ = (1+ζ)Σ a r_n/((1+ζ_n)(ζ − ζ_n)) and f₁ = f(−1).
    fn charges_oracle(ch: &DiscChain, plus: f64, minus: f64, terms: usize, n: usize, z: C64) -> (C64, C64, C64) {
        let mut fp = C64::new(0.0, 0.0);
        let mut fm = C64::new(0.0, 0.0);
        let mut f1 = C64::new(0.0, 0.0);
        for i in 0..terms {
            let (c, r) = (ch.centers()[i], ch.radii()[i]);
            for (cc, a, acc) in [(c, plus, &mut fp), (c.conj(), minus, &mut fm)] {
                f1 += a * r / (c64(-1.0, 0.0) - cc);
                if i < n {
                    *acc += (1.0 + z) * a * r / ((1.0 + cc) * (z - cc));
                }
            }
        }
        (f1, fp, fm)
    }

    #[test]
    fn geometric_chain_tail() {
        let ch = chain(48);
        let cert = chain_bound_certificates(&ch, &CertificateGrid::default()).unwrap();
        // Σ 4^{−n} = 1/3; the tail after 40 terms is 4^{−41}/(3/4).
        assert_relative_eq!(*cert.partial_sums.last().unwrap() + cert.remainder_bound, 1.0 / 3.0, max_relative = 1e-14);
        assert!(cert.remainder_bound < 1e-6);
        assert!(cert.distance_bound_holds && cert.left_half_plane_holds, "{} {}", cert.min_distance_ratio, cert.c_k);
        assert!(cert.excluded_in_angle > 0);
    }

    #[test]
    fn chain_validation() {
        let g = GraphFunction::new(square(), 1.0).unwrap();
        assert!(DiscChain::new(g.clone(), vec![0.5, 0.25], vec![0.3, 0.01], ChainTail::Finite).is_err());
        assert!(DiscChain::new(g.clone(), vec![0.25, 0.5], vec![0.01, 0.01], ChainTail::Finite).is_err());
        assert!(DiscChain::new(g.clone(), vec![0.5, 0.4], vec![0.09, 0.09], ChainTail::Finite).is_err());
        let big = GraphFunction::new(GraphSpec::linear(2.0), 1.0).unwrap();
        assert!(DiscChain::new(big, vec![0.5], vec![0.01], ChainTail::Finite).is_err());
        assert!(DiscChain::new(g, vec![0.5, 0.25], vec![0.01, 0.001], ChainTail::Finite).is_ok());
    }

    #[test]
    fn constant_has_no_circle_part() {
        let ch = chain(20);
        let f = chain_test_function(&ChainFunctionSpec::Constant { re: 1.0, im: 0.0 }, &ch).unwrap();
        let s = theorem9_split(&f, &ch, Theorem9Config { truncation: 8, ..Default::default() }).unwrap();
        for z in [c64(0.3, 0.2), c64(0.01, -0.4), c64(0.2, 0.04 + 0.2)] {
            assert!(s.f_plus(z).unwrap().norm() < 1e-13);
            assert!(s.f_minus(z).unwrap().norm() < 1e-13);
            let a = s.f1(z).unwrap();
            assert!((a.value - 1.0).norm() < a.tail_bound + 1e-9);
        }
    }

    #[test]
    fn charges_match_residue_oracle() {
        let ch = chain(20);
        let f = chain_test_function(&ChainFunctionSpec::DiscCharges { plus: 1.0, minus: -0.5, terms: 6 }, &ch).unwrap();
        // The default 16·r/d node rule resolves circles to about e^{−16}; 48 reaches rounding.
        let cfg = Theorem9Config { truncation: 4, axis_window: 1e4, node_factor: 48.0, ..Default::default() };
        let s = theorem9_split(&f, &ch, cfg).unwrap();
        for z in [c64(0.3, 0.2), c64(0.5, 0.25 + 0.07), c64(0.05, -0.1), ch.centers()[1] + c64(0.0, 2.0 * ch.radii()[1])] {
            let (f1, fp, fm) = charges_oracle(&ch, 1.0, -0.5, 6, 4, z);
            assert!((s.f_plus(z).unwrap() - fp).norm() < 1e-10, "{z}");
            assert!((s.f_minus(z).unwrap() - fm).norm() < 1e-10, "{z}");
            let a = s.f1(z).unwrap();
            assert!((a.value - f1).norm() < a.tail_bound + 1e-8, "{z}: {} vs {f1}", a.value);
        }
    }

    #[test]
    fn inside_disc_is_rejected() {
        let ch = chain(10);
        let f = AnalyticFunction::constant(c64(1.0, 0.0));
        let s = theorem9_split(&f, &ch, Theorem9Config { truncation: 4, ..Default::default() }).unwrap();
        assert!(matches!(s.f_plus(ch.centers()[0]), Err(Error::SingularPoint(_))));
        assert!(matches!(s.decompose(ch.centers()[2].conj()), Err(Error::SingularPoint(_))));
        let (probes, excluded) = theorem9_probes(&ch, &Theorem9Probes::default());
        assert!(probes.iter().all(|z| !ch.in_s(*z)));
        let _ = excluded;
    }

    #[test]
    fn circle_bound_holds() {
        let ch = chain(20);
        let f = chain_test_function(
            &ChainFunctionSpec::Sum {
                terms: vec![
                    ChainFunctionSpec::DiscCharges { plus: 1.0, minus: 1.0, terms: 8 },
                    ChainFunctionSpec::Exponential { scale: 1.0 },
                ],
            },
            &ch,
        )
        .unwrap();
        let s = theorem9_split(&f, &ch, Theorem9Config { truncation: 8, ..Default::default() }).unwrap();
        let c = circle_bound_check(&s, 50, 7).unwrap();
        assert!(c.holds, "{}", c.max_ratio);
    }

    #[test]
    fn scenario_catalog_examples() {
        let ex1 = scenario(&ScenarioSpec::Ex1 { k: 1.0, mu: 1.0 }).unwrap();
        let cf = ex1.cutting.as_ref().unwrap();
        assert_relative_eq!(cf.g().value(0.3), 0.3);
        assert_relative_eq!((1.0 + cf.mu()) * cf.g().value(0.3), 0.6);
        let ex2 = scenario(&ScenarioSpec::Ex2 { intervals: vec![(0.0, 1.0)], mu: 1.0 }).unwrap();
        let g = ex2.cutting.as_ref().unwrap().g();
        assert_relative_eq!(g.value(0.5), 0.5);
        assert_relative_eq!(g.value(0.2), 0.2);
        assert_eq!(g.value(1.5), 0.0);
        let ch = scenario(&ScenarioSpec::DiscChain { g: square(), chain: ChainSpec::standard_geometric(40) }).unwrap();
        assert_eq!(ch.chain.unwrap().len(), 40);
        assert!(scenario(&ScenarioSpec::Ex1 { k: -1.0, mu: 1.0 }).is_err());
        assert!(scenario(&ScenarioSpec::Ex3 { g: GraphSpec::linear(1.0), domain_end: 0.5 }).is_err());
        assert!(scenario(&ScenarioSpec::TangentBs { phi1: square(), c: 0.5, domain_end: 0.5 }).is_err());
        assert!(scenario(&ScenarioSpec::TangentNotBs {
            phi1: square(),
            delta: GraphSpec::power(0.5, 2.0),
            domain_end: 0.5
        })
        .is_err());
    }

    #[test]
    fn scenario_spec_round_trip() {
        let specs = vec![
            ScenarioSpec::Ex1 { k: 1.0, mu: 2.0 },
            ScenarioSpec::Ex2 { intervals: vec![(0.0, 1.0), (2.0, 3.0)], mu: 1.0 },
            ScenarioSpec::TangentNotBs { phi1: square(), delta: GraphSpec::power(1.0, 3.0), domain_end: 0.5 },
            ScenarioSpec::DiscChain { g: square(), chain: ChainSpec::standard_geometric(40) },
        ];
        for s in specs {
            let j = serde_json::to_string(&s).unwrap();
            assert_eq!(serde_json::from_str::<ScenarioSpec>(&j).unwrap(), s);
        }
    }
}
