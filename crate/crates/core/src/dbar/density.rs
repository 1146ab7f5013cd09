use super::patch::{graded_breaks, uniform_breaks, Patch, PatchMap};
use super::quadrature::{AreaQuadrature, QNode, QuadratureSpec};
use crate::cutting::{CuttingFunction, Region};
use crate::geometry::GraphSpec;
use crate::numerics::{c64, C64};
use crate::splitter::AnalyticFunction;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

type Pointwise = Arc<dyn Fn(C64) -> C64 + Send + Sync>;
type EdgeDistance = Arc<dyn Fn(C64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Support {
    Empty,
    Disc { center_re: f64, center_im: f64, radius: f64 },
    /// Corridor g ≤ η ≤ (1+μ)g near the origin plus the cutoff annulus R ≤ |z| ≤ 2R.
    /// `sector_slope` is k when g(ξ) = kξ.
    Corridor { mu: f64, radius: f64, sector_slope: Option<f64> },
    Generic,
}

/// Resolution of the corridor discretisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorridorGrid {
    /// Geometric cells per octave toward zeros of g.
    pub per_octave: usize,
    /// Innermost cell size relative to R.
    pub min_cell: f64,
    /// Largest ξ-cell relative to R.
    pub max_cell: f64,
    pub s_cells: usize,
    pub annulus_r_cells: usize,
    pub annulus_t_cells: usize,
}

impl Default for CorridorGrid {
    fn default() -> Self {
        Self { per_octave: 2, min_cell: 1e-24, max_cell: 0.25, s_cells: 2, annulus_r_cells: 4, annulus_t_cells: 16 }
    }
}

struct Inner {
    quad: AreaQuadrature,
    pointwise: Pointwise,
    edge_distance: EdgeDistance,
    support: Support,
    accumulation: Option<C64>,
    scale: f64,
    label: String,
}

/// A compactly supported density ρ on C⁺ (or C), discretised on mapped patches.
#[derive(Clone)]
pub struct DensityField {
    inner: Arc<Inner>,
}

impl std::fmt::Debug for DensityField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DensityField")
            .field("label", &self.inner.label)
            .field("support", &self.inner.support)
            .field("nodes", &self.inner.quad.nodes().len())
            .finish()
    }
}

impl DensityField {
    pub fn from_patches(
        label: impl Into<String>,
        patches: Vec<Patch>,
        pointwise: Pointwise,
        edge_distance: EdgeDistance,
        support: Support,
        accumulation: Option<C64>,
        scale: f64,
        spec: QuadratureSpec,
    ) -> Self {
        let quad = AreaQuadrature::new(patches, spec);
        Self {
            inner: Arc::new(Inner { quad, pointwise, edge_distance, support, accumulation, scale, label: label.into() }),
        }
    }

    pub fn zero() -> Self {
        Self::from_patches(
            "zero",
            Vec::new(),
            Arc::new(|_| C64::new(0.0, 0.0)),
            Arc::new(|_| f64::INFINITY),
            Support::Empty,
            None,
            1.0,
            QuadratureSpec::default(),
        )
    }

    /// ρ = value on the disc |z − center| < radius: a square plus four curved sides,
    /// each split into `cells`² parameter cells.
    pub fn disc(center: C64, radius: f64, value: C64, cells: usize, spec: QuadratureSpec) -> Self {
        let a = 0.5;
        let dens: super::patch::PatchDensity = Arc::new(move |_, _, _| value);
        let mut patches = vec![Patch {
            map: PatchMap::Rect,
            u_breaks: uniform_breaks(center.re - a * radius, center.re + a * radius, cells),
            v_breaks: uniform_breaks(center.im - a * radius, center.im + a * radius, cells),
            density: dens.clone(),
        }];
        for k in 0..4 {
            patches.push(Patch {
                map: PatchMap::DiscSide { center, radius, a, rotation: C64::i().powu(k) },
                u_breaks: uniform_breaks(0.0, 1.0, cells),
                v_breaks: uniform_breaks(-1.0, 1.0, cells),
                density: dens.clone(),
            });
        }
        Self::from_patches(
            "disc",
            patches,
            Arc::new(move |z| if (z - center).norm() < radius { value } else { C64::new(0.0, 0.0) }),
            Arc::new(move |z| ((z - center).norm() - radius).abs()),
            Support::Disc { center_re: center.re, center_im: center.im, radius },
            None,
            radius,
            spec,
        )
    }

    /// ρ = f·∂̄χ for the cutting function χ = χ₀χ₁. The corridor carries
    /// f(χ₁∂̄χ₀ + χ₀∂̄χ₁), the part of the annulus above the corridor carries f∂̄χ₁.
    pub fn from_cutting(f: &AnalyticFunction, cf: &CuttingFunction, grid: CorridorGrid, spec: QuadratureSpec) -> Result<Self> {
        if f.is_zero() {
            return Ok(Self::zero());
        }
        let big_r = cf.radius();
        let outer = cf.cutoff().outer;
        let g = cf.g().clone();
        let mu = cf.mu();
        let intervals = g.positive_intervals(-outer, outer);
        let mut patches = Vec::new();
        for iv in &intervals {
            let kinks: Vec<f64> = g.kinks().to_vec();
            let xb = graded_breaks(
                iv.start,
                iv.end,
                iv.zero_at_start,
                iv.zero_at_end,
                grid.min_cell * big_r,
                grid.per_octave,
                grid.max_cell * big_r,
                &kinks,
            );
            let (fc, cfc) = (f.clone(), cf.clone());
            patches.push(Patch {
                map: PatchMap::Corridor { g: g.clone(), mu },
                u_breaks: xb,
                v_breaks: uniform_breaks(0.0, 1.0, grid.s_cells),
                density: Arc::new(move |z, xi, s| {
                    let gv = cfc.g().value(xi);
                    if gv <= 0.0 {
                        return C64::new(0.0, 0.0);
                    }
                    let chi1 = cfc.chi1(z);
                    let (a1, b1) = cfc.grad_chi1(z);
                    if chi1 == 0.0 && a1 == 0.0 && b1 == 0.0 {
                        return C64::new(0.0, 0.0);
                    }
                    let d0 = cfc.dbar_chi0_times_jacobian(xi, s) / (cfc.mu() * gv);
                    let d = d0 * chi1 + c64(0.5 * a1, 0.5 * b1) * s;
                    fc.eval(z) * d
                }),
            });
        }
        if intervals.is_empty() {
            return Err(Error::UndefinedCorridor);
        }
        let (fc, cfc) = (f.clone(), cf.clone());
        patches.push(Patch {
            map: PatchMap::PolarAbove { g: g.clone(), mu },
            u_breaks: uniform_breaks(big_r, outer, grid.annulus_r_cells),
            v_breaks: uniform_breaks(0.0, 1.0, grid.annulus_t_cells),
            density: Arc::new(move |z, _, _| {
                if cfc.region(z) != Region::Above {
                    return C64::new(0.0, 0.0);
                }
                let (a1, b1) = cfc.grad_chi1(z);
                fc.eval(z) * c64(0.5 * a1, 0.5 * b1)
            }),
        });
        let sector_slope = match g.spec() {
            GraphSpec::Power { coef, exponent } if *exponent == 1.0 && *coef > 0.0 => Some(*coef),
            _ => None,
        };
        let (fc, cfc) = (f.clone(), cf.clone());
        let pointwise: Pointwise = Arc::new(move |z| {
            if z.im <= 0.0 {
                return C64::new(0.0, 0.0);
            }
            let d = cfc.dbar_chi(z);
            if d == C64::new(0.0, 0.0) {
                d
            } else {
                fc.eval(z) * d
            }
        });
        let cfc = cf.clone();
        let edge: EdgeDistance = Arc::new(move |z| {
            let g = cfc.g();
            let (gv, dg) = (g.value(z.re), g.derivative(z.re));
            let lo = (z.im - gv).abs() / (1.0 + dg * dg).sqrt();
            let top = 1.0 + cfc.mu();
            let hi = (z.im - top * gv).abs() / (1.0 + top * top * dg * dg).sqrt();
            let kink = g.kinks().iter().map(|k| (z.re - k).abs()).fold(f64::INFINITY, f64::min);
            lo.min(hi).min(kink).min(z.norm()).min(z.im.abs())
        });
        let field = Self::from_patches(
            format!("f∂̄χ[{}]", f.name()),
            patches,
            pointwise,
            edge,
            Support::Corridor { mu, radius: big_r, sector_slope },
            Some(C64::new(0.0, 0.0)),
            big_r,
            spec,
        );
        field.check_integrable()?;
        Ok(field)
    }

    fn rebuild(&self, label: String, patches: Vec<Patch>, pointwise: Pointwise, support: Support) -> Self {
        let edge = self.inner.edge_distance.clone();
        Self::from_patches(label, patches, pointwise, edge, support, self.inner.accumulation, self.inner.scale, self.inner.quad.spec())
    }

    pub fn scaled(&self, c: C64) -> Self {
        if c == C64::new(0.0, 0.0) {
            return Self::zero();
        }
        let patches = self
            .inner
            .quad
            .patches()
            .iter()
            .map(|p| {
                let d = p.density.clone();
                Patch { density: Arc::new(move |z, u, v| d(z, u, v) * c), ..p.clone() }
            })
            .collect();
        let pw = self.inner.pointwise.clone();
        self.rebuild(format!("{c}·{}", self.inner.label), patches, Arc::new(move |z| pw(z) * c), self.inner.support)
    }

    pub fn sum(&self, other: &DensityField) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let mut patches = self.inner.quad.patches().to_vec();
        patches.extend(other.inner.quad.patches().iter().cloned());
        let (a, b) = (self.inner.pointwise.clone(), other.inner.pointwise.clone());
        let (ea, eb) = (self.inner.edge_distance.clone(), other.inner.edge_distance.clone());
        let support = if self.inner.support == other.inner.support { self.inner.support } else { Support::Generic };
        let acc = self.inner.accumulation.or(other.inner.accumulation);
        Self::from_patches(
            format!("{}+{}", self.inner.label, other.inner.label),
            patches,
            Arc::new(move |z| a(z) + b(z)),
            Arc::new(move |z| ea(z).min(eb(z))),
            support,
            acc,
            self.inner.scale.max(other.inner.scale),
            self.inner.quad.spec(),
        )
    }

    /// Same density on a different quadrature specification.
    pub fn with_spec(&self, spec: QuadratureSpec) -> Self {
        let i = &self.inner;
        Self::from_patches(
            i.label.clone(),
            i.quad.patches().to_vec(),
            i.pointwise.clone(),
            i.edge_distance.clone(),
            i.support,
            i.accumulation,
            i.scale,
            spec,
        )
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }
    pub fn eval(&self, z: C64) -> C64 {
        (self.inner.pointwise)(z)
    }
    /// Distance from z to the set where ρ fails to be smooth.
    pub fn edge_distance(&self, z: C64) -> f64 {
        (self.inner.edge_distance)(z)
    }
    pub fn support(&self) -> Support {
        self.inner.support
    }
    pub fn accumulation_point(&self) -> Option<C64> {
        self.inner.accumulation
    }
    pub fn scale(&self) -> f64 {
        self.inner.scale
    }
    pub fn quadrature(&self) -> &AreaQuadrature {
        &self.inner.quad
    }
    pub fn nodes(&self) -> &[QNode] {
        self.inner.quad.nodes()
    }
    pub fn is_zero(&self) -> bool {
        self.inner.support == Support::Empty || self.nodes().iter().all(|n| n.rho == C64::new(0.0, 0.0))
    }

    /// ∫|ρ| dA.
    pub fn total_mass(&self) -> f64 {
        self.nodes().iter().map(|n| n.w * n.rho.norm()).sum()
    }

    /// sup |ρ(z)|·Im z over the quadrature nodes.
    pub fn height_bound(&self) -> f64 {
        self.nodes().iter().map(|n| n.rho.norm() * n.z.im.max(0.0)).fold(0.0, f64::max)
    }

    /// Rejects densities whose mass fails to converge at the accumulation point.
    pub fn check_integrable(&self) -> Result<()> {
        let total = self.total_mass();
        if !total.is_finite() {
            return Err(Error::Integrability(format!("{}: ∫|ρ| dA is not finite", self.label())));
        }
        if let Some(p) = self.inner.accumulation {
            let eps = 1e-6 * self.inner.scale;
            let near: f64 = self.nodes().iter().filter(|n| (n.z - p).norm() < eps).map(|n| n.w * n.rho.norm()).sum();
            if near > 1e-3 * total {
                return Err(Error::Integrability(format!(
                    "{}: mass {near:.3e} within {eps:.1e} of the accumulation point (total {total:.3e})",
                    self.label()
                )));
            }
        }
        Ok(())
    }

    /// sup over boxes (a, a+ℓ) × (0, ℓ) of ∫_box |ρ| dA / ℓ, with ℓ = scale·2^{−j}, j ≤ `levels`,
    /// boxes near the accumulation point at small ℓ and a sweep of the support at large ℓ.
    pub fn carleson_constant(&self, levels: usize) -> f64 {
        let nodes: Vec<(C64, f64)> = self.nodes().iter().filter(|n| n.rho != C64::new(0.0, 0.0)).map(|n| (n.z, n.w * n.rho.norm())).collect();
        if nodes.is_empty() {
            return 0.0;
        }
        let (xmin, xmax) = nodes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (z, _)| (a.min(z.re), b.max(z.re)));
        let x0 = self.inner.accumulation.map(|p| p.re).unwrap_or(0.5 * (xmin + xmax));
        let mut best: f64 = 0.0;
        for j in 0..=levels {
            let l = 2.0 * self.inner.scale * 0.5f64.powi(j as i32);
            let mut starts: Vec<f64> = (-8..=7).map(|m| x0 + 0.5 * l * m as f64).collect();
            if j <= 4 {
                let mut a = xmin - l;
                while a < xmax {
                    starts.push(a);
                    a += 0.25 * l;
                }
            }
            for a in starts {
                let m: f64 = nodes.iter().filter(|(z, _)| z.re > a && z.re < a + l && z.im < l).map(|(_, w)| w).sum();
                best = best.max(m / l);
            }
        }
        best
    }
}
