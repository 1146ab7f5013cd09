//! Area quadrature over mapped patches with weakly singular kernels.
//!
//! Far cells use precomputed tensor Gauss–Legendre nodes. Cells close to a
//! singular point are subdivided; a cell containing one is cut at that point
//! and each corner piece is integrated with a Duffy rule, which cancels the
//! 1/|z − ζ| singularity of the kernel.

use super::patch::Patch;
use crate::numerics::{gauss_legendre, C64};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub order: usize,
    pub duffy_order: usize,
    pub near_factor: f64,
    pub max_depth: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { order: 6, duffy_order: 20, near_factor: 2.0, max_depth: 40 }
    }
}

/// What a kernel sees at one quadrature node. `index` is set for precomputed nodes only.
#[derive(Debug, Clone, Copy)]
pub struct NodeRef {
    pub z: C64,
    pub rho: C64,
    pub index: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct QNode {
    pub z: C64,
    /// Gauss weight times the map Jacobian.
    pub w: f64,
    pub rho: C64,
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    u0: f64,
    u1: f64,
    v0: f64,
    v1: f64,
}

impl Rect {
    fn mid(&self) -> (f64, f64) {
        (0.5 * (self.u0 + self.u1), 0.5 * (self.v0 + self.v1))
    }
    fn contains(&self, u: f64, v: f64) -> bool {
        let eu = 1e-12 * (self.u1 - self.u0);
        let ev = 1e-12 * (self.v1 - self.v0);
        u >= self.u0 - eu && u <= self.u1 + eu && v >= self.v0 - ev && v <= self.v1 + ev
    }
}

#[derive(Debug, Clone)]
struct QCell {
    patch: usize,
    rect: Rect,
    center: C64,
    radius: f64,
    first: usize,
    count: usize,
}

pub struct AreaQuadrature {
    patches: Vec<Patch>,
    cells: Vec<QCell>,
    nodes: Vec<QNode>,
    spec: QuadratureSpec,
}

fn bound(p: &Patch, r: &Rect) -> (C64, f64) {
    let (um, vm) = r.mid();
    let c = p.map.point(um, vm);
    let mut rad: f64 = 0.0;
    for u in [r.u0, um, r.u1] {
        for v in [r.v0, vm, r.v1] {
            rad = rad.max((p.map.point(u, v) - c).norm());
        }
    }
    (c, rad * 1.05)
}

fn gl_rect(p: &Patch, r: &Rect, order: usize, out: &mut Vec<QNode>) {
    let rule = gauss_legendre(order);
    let (hu, hv) = (0.5 * (r.u1 - r.u0), 0.5 * (r.v1 - r.v0));
    let (um, vm) = r.mid();
    for (xu, wu) in rule.nodes.iter().zip(&rule.weights) {
        let u = um + hu * xu;
        for (xv, wv) in rule.nodes.iter().zip(&rule.weights) {
            let v = vm + hv * xv;
            let (z, jac) = p.map.point_jacobian(u, v);
            let rho = (p.density)(z, u, v);
            out.push(QNode { z, w: wu * wv * hu * hv * jac, rho });
        }
    }
}

impl AreaQuadrature {
    pub fn new(patches: Vec<Patch>, spec: QuadratureSpec) -> Self {
        let mut cells = Vec::new();
        let mut nodes = Vec::new();
        for (pi, p) in patches.iter().enumerate() {
            for uw in p.u_breaks.windows(2) {
                for vw in p.v_breaks.windows(2) {
                    let rect = Rect { u0: uw[0], u1: uw[1], v0: vw[0], v1: vw[1] };
                    if rect.u1 <= rect.u0 || rect.v1 <= rect.v0 {
                        continue;
                    }
                    let (center, radius) = bound(p, &rect);
                    let first = nodes.len();
                    gl_rect(p, &rect, spec.order, &mut nodes);
                    cells.push(QCell { patch: pi, rect, center, radius, first, count: nodes.len() - first });
                }
            }
        }
        Self { patches, cells, nodes, spec }
    }

    pub fn spec(&self) -> QuadratureSpec {
        self.spec
    }

    pub fn nodes(&self) -> &[QNode] {
        &self.nodes
    }

    pub fn patches(&self) -> &[Patch] {
        &self.patches
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Node index ranges of the tensor cells, nodes ordered u-major.
    pub fn cell_ranges(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        self.cells.iter().map(|c| c.first..c.first + c.count)
    }

    fn is_near(&self, center: C64, radius: f64, sing: &[C64]) -> bool {
        sing.iter().any(|s| (s - center).norm() - radius < self.spec.near_factor * 2.0 * radius)
    }

    /// ∫ kernel dA, with `sing` the points where the kernel is (nearly) singular.
    pub fn integrate<K: Fn(&NodeRef) -> C64>(&self, sing: &[C64], kernel: &K) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for cell in &self.cells {
            if self.is_near(cell.center, cell.radius, sing) {
                acc += self.integrate_rect(&self.patches[cell.patch], cell.rect, sing, kernel, 0);
            } else {
                for (i, n) in self.nodes[cell.first..cell.first + cell.count].iter().enumerate() {
                    if n.rho != C64::new(0.0, 0.0) {
                        acc += kernel(&NodeRef { z: n.z, rho: n.rho, index: Some(cell.first + i) }) * n.w;
                    }
                }
            }
        }
        acc
    }

    fn gl_sum<K: Fn(&NodeRef) -> C64>(&self, p: &Patch, r: &Rect, kernel: &K) -> C64 {
        let mut buf = Vec::with_capacity(self.spec.order * self.spec.order);
        gl_rect(p, r, self.spec.order, &mut buf);
        sum_nodes(&buf, kernel)
    }

    fn integrate_rect<K: Fn(&NodeRef) -> C64>(
        &self,
        p: &Patch,
        r: Rect,
        sing: &[C64],
        kernel: &K,
        depth: usize,
    ) -> C64 {
        for s in sing {
            if let Some((u, v)) = p.map.inverse(*s) {
                if r.contains(u, v) {
                    return self.split_at(p, r, u.clamp(r.u0, r.u1), v.clamp(r.v0, r.v1), sing, kernel, depth);
                }
            }
        }
        let (c, rad) = bound(p, &r);
        if depth >= self.spec.max_depth || !self.is_near(c, rad, sing) {
            return self.gl_sum(p, &r, kernel);
        }
        self.subdivide(p, r, depth, |q, child, d| q.integrate_rect(p, child, sing, kernel, d))
    }

    /// Physical lengths of the two mid-lines of a rectangle.
    fn side_lengths(p: &Patch, r: &Rect) -> (f64, f64) {
        let (um, vm) = r.mid();
        let lu = (p.map.point(r.u1, vm) - p.map.point(r.u0, vm)).norm();
        let lv = (p.map.point(um, r.v1) - p.map.point(um, r.v0)).norm();
        (lu, lv)
    }

    fn subdivide<F: Fn(&Self, Rect, usize) -> C64>(&self, p: &Patch, r: Rect, depth: usize, rec: F) -> C64 {
        let (lu, lv) = Self::side_lengths(p, &r);
        let (um, vm) = r.mid();
        let mut acc = C64::new(0.0, 0.0);
        if lu > 2.0 * lv {
            acc += rec(self, Rect { u1: um, ..r }, depth + 1);
            acc += rec(self, Rect { u0: um, ..r }, depth + 1);
        } else if lv > 2.0 * lu {
            acc += rec(self, Rect { v1: vm, ..r }, depth + 1);
            acc += rec(self, Rect { v0: vm, ..r }, depth + 1);
        } else {
            for (u0, u1) in [(r.u0, um), (um, r.u1)] {
                for (v0, v1) in [(r.v0, vm), (vm, r.v1)] {
                    acc += rec(self, Rect { u0, u1, v0, v1 }, depth + 1);
                }
            }
        }
        acc
    }

    #[allow(clippy::too_many_arguments)]
    fn split_at<K: Fn(&NodeRef) -> C64>(
        &self,
        p: &Patch,
        r: Rect,
        us: f64,
        vs: f64,
        sing: &[C64],
        kernel: &K,
        depth: usize,
    ) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let tiny_u = 1e-14 * (r.u1 - r.u0);
        let tiny_v = 1e-14 * (r.v1 - r.v0);
        for (u0, u1, cu) in [(r.u0, us, us), (us, r.u1, us)] {
            if u1 - u0 <= tiny_u {
                continue;
            }
            for (v0, v1, cv) in [(r.v0, vs, vs), (vs, r.v1, vs)] {
                if v1 - v0 <= tiny_v {
                    continue;
                }
                acc += self.corner_rect(p, Rect { u0, u1, v0, v1 }, (cu, cv), sing, kernel, depth + 1);
            }
        }
        acc
    }

    /// Rectangle with a singular point at the corner `c`.
    fn corner_rect<K: Fn(&NodeRef) -> C64>(
        &self,
        p: &Patch,
        r: Rect,
        c: (f64, f64),
        sing: &[C64],
        kernel: &K,
        depth: usize,
    ) -> C64 {
        if depth >= self.spec.max_depth {
            return self.duffy(p, &r, c, kernel);
        }
        let (lu, lv) = Self::side_lengths(p, &r);
        let (um, vm) = r.mid();
        let at_u0 = c.0 == r.u0;
        let at_v0 = c.1 == r.v0;
        if lu > 2.0 * lv {
            let (near, far) = if at_u0 { (Rect { u1: um, ..r }, Rect { u0: um, ..r }) } else { (Rect { u0: um, ..r }, Rect { u1: um, ..r }) };
            return self.corner_rect(p, near, c, sing, kernel, depth + 1) + self.integrate_rect(p, far, sing, kernel, depth + 1);
        }
        if lv > 2.0 * lu {
            let (near, far) = if at_v0 { (Rect { v1: vm, ..r }, Rect { v0: vm, ..r }) } else { (Rect { v0: vm, ..r }, Rect { v1: vm, ..r }) };
            return self.corner_rect(p, near, c, sing, kernel, depth + 1) + self.integrate_rect(p, far, sing, kernel, depth + 1);
        }
        // other singular points close by: shrink around the corner
        let corner_z = p.map.point(c.0, c.1);
        let (center, rad) = bound(p, &r);
        let others_near = sing
            .iter()
            .filter(|s| (**s - corner_z).norm() > 1e-12 * rad)
            .any(|s| (s - center).norm() - rad < self.spec.near_factor * 2.0 * rad);
        if others_near {
            let mut acc = C64::new(0.0, 0.0);
            for (u0, u1) in [(r.u0, um), (um, r.u1)] {
                for (v0, v1) in [(r.v0, vm), (vm, r.v1)] {
                    let child = Rect { u0, u1, v0, v1 };
                    let has_corner = (u0 == c.0 || u1 == c.0) && (v0 == c.1 || v1 == c.1);
                    acc += if has_corner {
                        self.corner_rect(p, child, c, sing, kernel, depth + 1)
                    } else {
                        self.integrate_rect(p, child, sing, kernel, depth + 1)
                    };
                }
            }
            return acc;
        }
        self.duffy(p, &r, c, kernel)
    }

    /// Two triangles with apex at the corner, each mapped from the unit square by
    /// (s, t) ↦ A + s(B − A) + st(C − B); the factor s cancels a 1/r singularity at A.
    fn duffy<K: Fn(&NodeRef) -> C64>(&self, p: &Patch, r: &Rect, c: (f64, f64), kernel: &K) -> C64 {
        let opp = (if c.0 == r.u0 { r.u1 } else { r.u0 }, if c.1 == r.v0 { r.v1 } else { r.v0 });
        let bu = (opp.0, c.1);
        let bv = (c.0, opp.1);
        let rule = gauss_legendre(self.spec.duffy_order);
        let mut acc = C64::new(0.0, 0.0);
        for (b, cc) in [(bu, opp), (opp, bv)] {
            let e1 = (b.0 - c.0, b.1 - c.1);
            let e2 = (cc.0 - b.0, cc.1 - b.1);
            let area2 = (e1.0 * e2.1 - e1.1 * e2.0).abs();
            for (xs, ws) in rule.nodes.iter().zip(&rule.weights) {
                let s = 0.5 * (xs + 1.0);
                for (xt, wt) in rule.nodes.iter().zip(&rule.weights) {
                    let t = 0.5 * (xt + 1.0);
                    let u = c.0 + s * e1.0 + s * t * e2.0;
                    let v = c.1 + s * e1.1 + s * t * e2.1;
                    let (z, jac) = p.map.point_jacobian(u, v);
                    let rho = (p.density)(z, u, v);
                    if rho == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let w = 0.25 * ws * wt * s * area2 * jac;
                    acc += kernel(&NodeRef { z, rho, index: None }) * w;
                }
            }
        }
        acc
    }
}

fn sum_nodes<K: Fn(&NodeRef) -> C64>(nodes: &[QNode], kernel: &K) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for n in nodes {
        if n.rho != C64::new(0.0, 0.0) {
            acc += kernel(&NodeRef { z: n.z, rho: n.rho, index: None }) * n.w;
        }
    }
    acc
}
