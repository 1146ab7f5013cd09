//! The cutting function χ = χ₀χ₁ and numerical certificates for the Carleson
//! box condition and the gradient bound |∇χ| ≤ C / Im ζ.

use crate::geometry::GraphFunction;
use crate::numerics::{adaptive_simpson, c64, C64};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Radial cutoff χ₁: 1 for |ζ| ≤ inner, 0 for |ζ| ≥ outer, C∞ in between.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct CutoffProfile {
    pub inner: f64,
    pub outer: f64,
}

#[inline]
fn psi(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

#[inline]
fn dpsi(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        psi(t) / (t * t)
    }
}

impl CutoffProfile {
    /// Smooth step from 1 (t ≤ 0) to 0 (t ≥ 1) and its derivative.
    fn step(t: f64) -> (f64, f64) {
        if t <= 0.0 {
            return (1.0, 0.0);
        }
        if t >= 1.0 {
            return (0.0, 0.0);
        }
        let a = psi(1.0 - t);
        let b = psi(t);
        let da = -dpsi(1.0 - t);
        let db = dpsi(t);
        let s = a + b;
        (a / s, (da * b - a * db) / (s * s))
    }

    pub fn value(&self, r: f64) -> f64 {
        Self::step((r - self.inner) / (self.outer - self.inner)).0
    }

    /// d/dr of the profile.
    pub fn radial_derivative(&self, r: f64) -> f64 {
        let w = self.outer - self.inner;
        Self::step((r - self.inner) / w).1 / w
    }

    /// sup |d/dr χ₁| (the profile's C(χ₁)), attained at the midpoint by symmetry.
    pub fn max_slope(&self) -> f64 {
        self.radial_derivative(0.5 * (self.inner + self.outer)).abs()
    }
}

#[derive(Debug, Clone)]
pub struct CuttingFunction {
    g: GraphFunction,
    mu: f64,
    cutoff: CutoffProfile,
}

/// Position of a point relative to the corridor g ≤ η ≤ (1+μ)g.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Below,
    Corridor,
    Above,
}

impl CuttingFunction {
    /// χ₁ steps down on [R, 2R].
    pub fn new(g: GraphFunction, mu: f64, radius: f64) -> Result<Self> {
        Self::with_profile(g, mu, CutoffProfile { inner: radius, outer: 2.0 * radius })
    }

    pub fn with_profile(g: GraphFunction, mu: f64, cutoff: CutoffProfile) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Domain(format!("μ must be positive, got {mu}")));
        }
        if !(cutoff.inner > 0.0 && cutoff.outer > cutoff.inner) {
            return Err(Error::Domain(format!("cutoff needs 0 < inner < outer, got {cutoff:?}")));
        }
        let probe = 2.0 * cutoff.outer;
        if (0..=4000).any(|i| g.value(-probe + 2.0 * probe * i as f64 / 4000.0) < 0.0) {
            return Err(Error::Domain("g must be non-negative".into()));
        }
        Ok(Self { g, mu, cutoff })
    }

    pub fn g(&self) -> &GraphFunction {
        &self.g
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn radius(&self) -> f64 {
        self.cutoff.inner
    }
    pub fn cutoff(&self) -> CutoffProfile {
        self.cutoff
    }

    pub fn region(&self, z: C64) -> Region {
        let g = self.g.value(z.re);
        if g <= 0.0 {
            Region::Above
        } else if z.im < g {
            Region::Below
        } else if z.im <= (1.0 + self.mu) * g {
            Region::Corridor
        } else {
            Region::Above
        }
    }

    pub fn chi0(&self, z: C64) -> f64 {
        let g = self.g.value(z.re);
        if g <= 0.0 {
            return 1.0;
        }
        ((z.im - g) / (self.mu * g)).clamp(0.0, 1.0)
    }

    pub fn chi1(&self, z: C64) -> f64 {
        self.cutoff.value(z.norm())
    }

    pub fn chi(&self, z: C64) -> f64 {
        self.chi0(z) * self.chi1(z)
    }

    /// Analytic gradient of χ₀ (corridor-side value on the boundary lines).
    pub fn grad_chi0(&self, z: C64) -> (f64, f64) {
        if self.region(z) != Region::Corridor {
            return (0.0, 0.0);
        }
        let g = self.g.value(z.re);
        let dg = self.g.derivative(z.re);
        let inv = 1.0 / (self.mu * g);
        (-z.im * dg * inv / g, inv)
    }

    pub fn grad_chi1(&self, z: C64) -> (f64, f64) {
        let r = z.norm();
        if r <= self.cutoff.inner || r >= self.cutoff.outer {
            return (0.0, 0.0);
        }
        let d = self.cutoff.radial_derivative(r);
        (d * z.re / r, d * z.im / r)
    }

    pub fn grad_chi(&self, z: C64) -> (f64, f64) {
        let (a0, b0) = self.grad_chi0(z);
        let (a1, b1) = self.grad_chi1(z);
        let (c0, c1) = (self.chi0(z), self.chi1(z));
        (c1 * a0 + c0 * a1, c1 * b0 + c0 * b1)
    }

    /// ∂̄χ = ½(∂ₓ + i∂ᵧ)χ.
    pub fn dbar_chi(&self, z: C64) -> C64 {
        let (a, b) = self.grad_chi(z);
        c64(0.5 * a, 0.5 * b)
    }

    /// Point of the corridor in coordinates η = g(ξ)(1 + μs), s ∈ [0, 1].
    pub fn corridor_point(&self, xi: f64, s: f64) -> C64 {
        c64(xi, self.g.value(xi) * (1.0 + self.mu * s))
    }

    /// (∂̄χ₀)·(μ g(ξ)) at corridor coordinates (ξ, s): bounded even where g → 0.
    pub fn dbar_chi0_times_jacobian(&self, xi: f64, s: f64) -> C64 {
        c64(-(1.0 + self.mu * s) * self.g.derivative(xi), 1.0) * 0.5
    }

    /// Analytic upper bound on carleson_box_integral / side, from the gradient bound.
    pub fn carleson_ratio_bound(&self) -> f64 {
        let l = self.g.lipschitz_bound();
        (1.0 + ((1.0 + self.mu) * l).powi(2)).sqrt() + self.cutoff.max_slope() * self.cutoff.inner
    }

    /// The implementation's constant C with box ratio ≤ C·log(1+μ).
    pub fn carleson_constant(&self) -> f64 {
        self.carleson_ratio_bound() / (1.0 + self.mu).ln()
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct CarlesonBox {
    pub a: f64,
    pub b: f64,
    /// ∫_B |∇χ| dA over B = (a, b) × (0, b − a).
    pub value: f64,
    pub ratio: f64,
}

/// ∫_B |∇χ| dA for B = (a, b) × (0, b − a).
pub fn carleson_box_integral(cf: &CuttingFunction, a: f64, b: f64) -> Result<CarlesonBox> {
    if !(a < b) {
        return Err(Error::Domain(format!("box needs a < b, got ({a}, {b})")));
    }
    let side = b - a;
    let h = side;
    let g = &cf.g;
    let mu = cf.mu;
    let r_in = cf.cutoff.inner;
    let r_out = cf.cutoff.outer;
    let tol = 1e-8;
    let slice = |xi: f64| -> f64 {
        let gv = g.value(xi);
        let mut total = 0.0;
        let r_in_h = (r_in * r_in - xi * xi).max(0.0).sqrt();
        let inside_disc = |eta: f64| xi * xi + eta * eta <= r_in * r_in;
        let (lo, hi) = if gv > 0.0 { (gv, (1.0 + mu) * gv) } else { (0.0, 0.0) };
        // corridor part
        let (c_lo, c_hi) = (lo.min(h), hi.min(h));
        if c_hi > c_lo {
            if inside_disc(c_hi) {
                let c = g.derivative(xi) / gv;
                let prim = |eta: f64| {
                    if c == 0.0 {
                        eta
                    } else {
                        0.5 * (eta * (1.0 + c * c * eta * eta).sqrt() + (c * eta).asinh() / c)
                    }
                };
                total += (prim(c_hi) - prim(c_lo)) / (mu * gv);
            } else {
                let scale = (c_hi - c_lo) / (mu * gv);
                total += grad_norm_integral(cf, xi, c_lo, c_hi, r_in_h, tol * scale.max(1e-300));
            }
        }
        // above the corridor χ₀ = 1 and only χ₁ varies, inside the annulus
        let a_lo = hi.max(r_in_h);
        let a_hi = h.min((r_out * r_out - xi * xi).max(0.0).sqrt());
        if a_hi > a_lo {
            total += grad_norm_integral(cf, xi, a_lo, a_hi, f64::NAN, tol * (a_hi - a_lo) / r_in);
        }
        total
    };
    let mut breaks: Vec<f64> = vec![a, b];
    breaks.extend(g.kinks().iter().copied().filter(|k| *k > a && *k < b));
    for target in [
        &(|x: f64| g.value(x) - h) as &dyn Fn(f64) -> f64,
        &|x: f64| (1.0 + mu) * g.value(x) - h,
        &|x: f64| g.value(x),
        &|x: f64| x * x - r_in * r_in,
        &|x: f64| x * x + ((1.0 + mu) * g.value(x)).min(h).powi(2) - r_in * r_in,
        &|x: f64| x * x + g.value(x).min(h).powi(2) - r_in * r_in,
    ] {
        breaks.extend(sign_changes(target, a, b, 512));
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut value = 0.0;
    for w in breaks.windows(2) {
        value += adaptive_simpson(slice, w[0], w[1], tol * (w[1] - w[0]).max(side * 1e-6), 50);
    }
    Ok(CarlesonBox { a, b, value, ratio: value / side })
}

// ∫ |∇χ(ξ, η)| dη over [lo, hi]; a finite `split` is a forced breakpoint.
fn grad_norm_integral(cf: &CuttingFunction, xi: f64, lo: f64, hi: f64, split: f64, tol: f64) -> f64 {
    let f = |eta: f64| {
        let (x, y) = cf.grad_chi(c64(xi, eta));
        x.hypot(y)
    };
    if split.is_finite() && split > lo && split < hi {
        adaptive_simpson(f, lo, split, 0.5 * tol, 50) + adaptive_simpson(f, split, hi, 0.5 * tol, 50)
    } else {
        adaptive_simpson(f, lo, hi, tol, 50)
    }
}

fn sign_changes(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let mut x0 = a;
    let mut f0 = f(a);
    for i in 1..=n {
        let x1 = a + (b - a) * i as f64 / n as f64;
        let f1 = f(x1);
        if (f0 < 0.0) != (f1 < 0.0) {
            let (mut lo, mut hi, flo) = (x0, x1, f0);
            for _ in 0..100 {
                let m = 0.5 * (lo + hi);
                if (f(m) < 0.0) == (flo < 0.0) {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    out
}

/// sup over the grid of Im ζ·|∇χ(ζ)|.
pub fn verify_gradient_bound(cf: &CuttingFunction, grid: &[C64]) -> f64 {
    grid.iter()
        .filter(|z| z.im > 0.0)
        .map(|z| {
            let (x, y) = cf.grad_chi(*z);
            z.im * x.hypot(y)
        })
        .fold(0.0, f64::max)
}

/// Polar grid refining toward the origin: radii r₀·2^{−j/per_octave}.
pub fn polar_refinement_grid(r0: f64, octaves: usize, per_octave: usize, angles: usize) -> Vec<C64> {
    let mut out = Vec::new();
    for j in 0..=(octaves * per_octave) {
        let r = r0 * 2f64.powf(-(j as f64) / per_octave as f64);
        for a in 0..angles {
            let th = std::f64::consts::PI * (a as f64 + 0.5) / angles as f64;
            out.push(C64::from_polar(r, th));
        }
    }
    out
}
