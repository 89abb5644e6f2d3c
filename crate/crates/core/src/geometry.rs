//! Bounded domains Ω = {ζ(x) < 0}: boundary geometry, normal decomposition,
//! the specular reflection map, and near-boundary normal coordinates.

use crate::linalg::{cross, dot, norm, normalize, scale, sub, Vec3};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("gradient of the level set degenerates at the requested point (|grad| = {0:.3e})")]
    DegenerateGradient(f64),
    #[error("point is not on the boundary (zeta = {0:.3e})")]
    NotOnBoundary(f64),
    #[error("point lies outside the closed domain (zeta = {0:.3e})")]
    OutsideDomain(f64),
    #[error("closest boundary point at distance {dist:.3e} is not covered by any patch chart")]
    ChartMiss { dist: f64 },
}

/// Graph function ρ of a boundary patch, with closed-form derivatives
/// through third order (third-order entries feed the flattening frames).
#[derive(Debug, Clone)]
pub enum RhoFn {
    /// Polynomial in patch coordinates: ρ(p,q) = Σ c_{ij} p^i q^j.
    Poly(Vec<(u32, u32, f64)>),
    /// Cap of an ellipsoid: ρ(p,q) = c·sqrt(1 - p²/a² - q²/b²).
    /// A sphere cap of radius R is the special case a = b = c = R.
    EllipsoidCap { a2: f64, b2: f64, c: f64 },
}

/// ρ value and partial derivatives through third order.
#[derive(Debug, Clone, Copy, Default)]
pub struct RhoJet {
    pub rho: f64,
    pub d1: [f64; 2],          // [ρ_p, ρ_q]
    pub d2: [f64; 3],          // [ρ_pp, ρ_pq, ρ_qq]
    pub d3: [f64; 4],          // [ρ_ppp, ρ_ppq, ρ_pqq, ρ_qqq]
}

impl RhoFn {
    pub fn jet(&self, p: f64, q: f64) -> RhoJet {
        match self {
            RhoFn::Poly(coeffs) => {
                let mut jet = RhoJet::default();
                for &(i, j, c) in coeffs {
                    let (i, j) = (i as i32, j as i32);
                    let pw = |base: f64, e: i32| if e < 0 { 0.0 } else { base.powi(e) };
                    let fall = |e: i32, k: i32| -> f64 {
                        // falling factorial e (e-1) ... (e-k+1)
                        let mut r = 1.0;
                        for t in 0..k {
                            r *= (e - t) as f64;
                        }
                        r
                    };
                    jet.rho += c * pw(p, i) * pw(q, j);
                    jet.d1[0] += c * fall(i, 1) * pw(p, i - 1) * pw(q, j);
                    jet.d1[1] += c * fall(j, 1) * pw(p, i) * pw(q, j - 1);
                    jet.d2[0] += c * fall(i, 2) * pw(p, i - 2) * pw(q, j);
                    jet.d2[1] += c * fall(i, 1) * fall(j, 1) * pw(p, i - 1) * pw(q, j - 1);
                    jet.d2[2] += c * fall(j, 2) * pw(p, i) * pw(q, j - 2);
                    jet.d3[0] += c * fall(i, 3) * pw(p, i - 3) * pw(q, j);
                    jet.d3[1] += c * fall(i, 2) * fall(j, 1) * pw(p, i - 2) * pw(q, j - 1);
                    jet.d3[2] += c * fall(i, 1) * fall(j, 2) * pw(p, i - 1) * pw(q, j - 2);
                    jet.d3[3] += c * fall(j, 3) * pw(p, i) * pw(q, j - 3);
                }
                jet
            }
            RhoFn::EllipsoidCap { a2, b2, c } => {
                // ρ = c u^{1/2}, u = 1 - p²/a² - q²/b² (u quadratic, third derivs of u vanish)
                let u = 1.0 - p * p / a2 - q * q / b2;
                assert!(u > 0.0, "patch coordinates leave the cap chart");
                let up = -2.0 * p / a2;
                let uq = -2.0 * q / b2;
                let upp = -2.0 / a2;
                let uqq = -2.0 / b2;
                let s = u.sqrt();
                let g = 0.5 * c / s; // d(c sqrt(u))/du
                let g2 = -0.25 * c / (u * s); // second derivative in u
                let g3 = 0.375 * c / (u * u * s); // third derivative in u
                let mut jet = RhoJet::default();
                jet.rho = c * s;
                jet.d1 = [g * up, g * uq];
                jet.d2 = [
                    g2 * up * up + g * upp,
                    g2 * up * uq,
                    g2 * uq * uq + g * uqq,
                ];
                jet.d3 = [
                    g3 * up * up * up + 3.0 * g2 * up * upp,
                    g3 * up * up * uq + g2 * uq * upp,
                    g3 * up * uq * uq + g2 * up * uqq,
                    g3 * uq * uq * uq + 3.0 * g2 * uq * uqq,
                ];
                jet
            }
        }
    }
}

/// Orthonormal frame carrying patch coordinates to ambient coordinates:
/// ambient = origin + p e1 + q e2 + h e3, with e3 the outward axis.
#[derive(Debug, Clone, Copy)]
pub struct PatchFrame {
    pub origin: Vec3,
    pub e1: Vec3,
    pub e2: Vec3,
    pub e3: Vec3,
}

impl PatchFrame {
    pub fn axis_aligned() -> Self {
        PatchFrame {
            origin: [0.0; 3],
            e1: [1.0, 0.0, 0.0],
            e2: [0.0, 1.0, 0.0],
            e3: [0.0, 0.0, 1.0],
        }
    }

    pub fn to_ambient(&self, p: f64, q: f64, h: f64) -> Vec3 {
        [
            self.origin[0] + p * self.e1[0] + q * self.e2[0] + h * self.e3[0],
            self.origin[1] + p * self.e1[1] + q * self.e2[1] + h * self.e3[1],
            self.origin[2] + p * self.e1[2] + q * self.e2[2] + h * self.e3[2],
        ]
    }

    pub fn to_local(&self, x: Vec3) -> (f64, f64, f64) {
        let d = sub(x, self.origin);
        (dot(d, self.e1), dot(d, self.e2), dot(d, self.e3))
    }
}

/// Boundary patch: the surface is the graph {h = ρ(p,q)} in the patch frame,
/// with the domain interior on the side h < ρ.
#[derive(Debug, Clone)]
pub struct BoundaryPatch {
    pub rho: RhoFn,
    pub frame: PatchFrame,
    /// Validity rectangle in (p, q).
    pub chart_box: [[f64; 2]; 2],
}

impl BoundaryPatch {
    pub fn contains(&self, p: f64, q: f64) -> bool {
        p >= self.chart_box[0][0]
            && p <= self.chart_box[0][1]
            && q >= self.chart_box[1][0]
            && q <= self.chart_box[1][1]
    }

    /// Boundary point and outward unit normal at patch coordinates (p, q).
    pub fn surface_point(&self, p: f64, q: f64) -> (Vec3, Vec3) {
        let jet = self.rho.jet(p, q);
        let x = self.frame.to_ambient(p, q, jet.rho);
        // graph normal (-ρ_p, -ρ_q, 1) in the local frame, then normalized
        let n_local = [-jet.d1[0], -jet.d1[1], 1.0];
        let n = [
            n_local[0] * self.frame.e1[0] + n_local[1] * self.frame.e2[0] + n_local[2] * self.frame.e3[0],
            n_local[0] * self.frame.e1[1] + n_local[1] * self.frame.e2[1] + n_local[2] * self.frame.e3[1],
            n_local[0] * self.frame.e1[2] + n_local[1] * self.frame.e2[2] + n_local[2] * self.frame.e3[2],
        ];
        (x, normalize(n))
    }
}

/// Closed-form domain shapes plus user patch-graph domains.
#[derive(Debug, Clone)]
pub enum Shape {
    /// {-depth < x3 < 0}; the lateral directions are handled periodically by
    /// the grid layer, the level set depends on x3 only.
    Slab { depth: f64 },
    Ball { center: Vec3, radius: f64 },
    Ellipsoid { center: Vec3, semi: Vec3 },
    /// Domain described only through its patch charts (local tests).
    Graph,
}

#[derive(Debug, Clone)]
pub struct DomainSpec {
    pub shape: Shape,
    pub patches: Vec<BoundaryPatch>,
    /// Width of the tubular near-boundary region Ω_bd.
    pub delta0: f64,
    /// Claimed rotational symmetry (point on axis, axis direction), if any.
    pub symmetry_axis: Option<(Vec3, Vec3)>,
}

pub const ON_BOUNDARY_TOL: f64 = 1e-8;
pub const GRAZING_TOL: f64 = 1e-12;

impl DomainSpec {
    pub fn slab(depth: f64, delta0: f64) -> Self {
        assert!(depth > 0.0 && delta0 > 0.0 && delta0 <= 0.5 * depth);
        let half = 1e6; // charts are flat and unbounded laterally for practical purposes
        let top = BoundaryPatch {
            rho: RhoFn::Poly(vec![]),
            frame: PatchFrame::axis_aligned(),
            chart_box: [[-half, half], [-half, half]],
        };
        let bottom = BoundaryPatch {
            rho: RhoFn::Poly(vec![]),
            frame: PatchFrame {
                origin: [0.0, 0.0, -depth],
                e1: [0.0, 1.0, 0.0],
                e2: [1.0, 0.0, 0.0],
                e3: [0.0, 0.0, -1.0],
            },
            chart_box: [[-half, half], [-half, half]],
        };
        DomainSpec {
            shape: Shape::Slab { depth },
            patches: vec![top, bottom],
            delta0,
            symmetry_axis: None,
        }
    }

    pub fn ball(center: Vec3, radius: f64, delta0: f64) -> Self {
        let patches = cap_patches(center, [radius, radius, radius]);
        DomainSpec {
            shape: Shape::Ball { center, radius },
            patches,
            delta0,
            symmetry_axis: Some((center, [0.0, 0.0, 1.0])),
        }
    }

    pub fn ellipsoid(center: Vec3, semi: Vec3, delta0: f64) -> Self {
        let patches = cap_patches(center, semi);
        DomainSpec {
            shape: Shape::Ellipsoid { center, semi },
            patches,
            delta0,
            symmetry_axis: None,
        }
    }

    pub fn zeta(&self, x: Vec3) -> f64 {
        match &self.shape {
            Shape::Slab { depth } => x[2] * (x[2] + depth) / depth,
            Shape::Ball { center, radius } => {
                let d = sub(x, *center);
                (dot(d, d) - radius * radius) / (radius * radius)
            }
            Shape::Ellipsoid { center, semi } => {
                let d = sub(x, *center);
                d[0] * d[0] / (semi[0] * semi[0])
                    + d[1] * d[1] / (semi[1] * semi[1])
                    + d[2] * d[2] / (semi[2] * semi[2])
                    - 1.0
            }
            Shape::Graph => {
                // signed height below the nearest patch graph, negative inside
                let mut best = f64::INFINITY;
                let mut val = f64::INFINITY;
                for patch in &self.patches {
                    let (p, q, h) = patch.frame.to_local(x);
                    if !patch.contains(p, q) {
                        continue;
                    }
                    let jet = patch.rho.jet(p, q);
                    let gap = h - jet.rho;
                    if gap.abs() < best {
                        best = gap.abs();
                        val = gap;
                    }
                }
                val
            }
        }
    }

    pub fn grad_zeta(&self, x: Vec3) -> Vec3 {
        match &self.shape {
            Shape::Slab { depth } => [0.0, 0.0, (2.0 * x[2] + depth) / depth],
            Shape::Ball { center, radius } => {
                let d = sub(x, *center);
                scale(d, 2.0 / (radius * radius))
            }
            Shape::Ellipsoid { center, semi } => {
                let d = sub(x, *center);
                [
                    2.0 * d[0] / (semi[0] * semi[0]),
                    2.0 * d[1] / (semi[1] * semi[1]),
                    2.0 * d[2] / (semi[2] * semi[2]),
                ]
            }
            Shape::Graph => {
                // gradient of the signed height of the nearest covering patch
                for patch in &self.patches {
                    let (p, q, _) = patch.frame.to_local(x);
                    if !patch.contains(p, q) {
                        continue;
                    }
                    let jet = patch.rho.jet(p, q);
                    let f = &patch.frame;
                    return [
                        f.e3[0] - jet.d1[0] * f.e1[0] - jet.d1[1] * f.e2[0],
                        f.e3[1] - jet.d1[0] * f.e1[1] - jet.d1[1] * f.e2[1],
                        f.e3[2] - jet.d1[0] * f.e1[2] - jet.d1[1] * f.e2[2],
                    ];
                }
                [0.0; 3]
            }
        }
    }

    /// Closest boundary point, its outward unit normal, and the distance.
    ///
    /// Closed forms for the slab and ball; damped Newton projection along the
    /// level-set gradient with tangential sliding otherwise, with a sampled
    /// patch-chart search as fallback.
    pub fn closest_boundary(&self, x: Vec3) -> Result<(Vec3, Vec3, f64), GeometryError> {
        match &self.shape {
            Shape::Slab { depth } => {
                let d_top = -x[2];
                let d_bot = x[2] + depth;
                if d_top <= d_bot {
                    Ok(([x[0], x[1], 0.0], [0.0, 0.0, 1.0], d_top))
                } else {
                    Ok(([x[0], x[1], -depth], [0.0, 0.0, -1.0], d_bot))
                }
            }
            Shape::Ball { center, radius } => {
                let d = sub(x, *center);
                let r = norm(d);
                let dir = if r > 1e-14 { scale(d, 1.0 / r) } else { [0.0, 0.0, 1.0] };
                Ok((
                    [
                        center[0] + radius * dir[0],
                        center[1] + radius * dir[1],
                        center[2] + radius * dir[2],
                    ],
                    dir,
                    radius - r,
                ))
            }
            _ => self.closest_by_projection(x),
        }
    }

    fn closest_by_projection(&self, x: Vec3) -> Result<(Vec3, Vec3, f64), GeometryError> {
        // Project onto {ζ = 0} along ∇ζ, then slide tangentially toward x.
        let mut y = x;
        let mut converged = false;
        for _ in 0..200 {
            // Newton step for ζ(y) = 0 along the gradient.
            for _ in 0..50 {
                let z = self.zeta(y);
                if z.abs() < 1e-14 {
                    break;
                }
                let g = self.grad_zeta(y);
                let g2 = dot(g, g);
                if g2 < 1e-24 {
                    return Err(GeometryError::DegenerateGradient(g2.sqrt()));
                }
                y = sub(y, scale(g, z / g2));
            }
            // Tangential component of (x - y); a stationary point of the
            // distance has x - y parallel to the normal.
            let n = normalize(self.grad_zeta(y));
            let d = sub(x, y);
            let tang = sub(d, scale(n, dot(d, n)));
            if norm(tang) < 1e-12 {
                converged = true;
                break;
            }
            y = add3(y, scale(tang, 0.8));
        }
        if !converged {
            // Fallback: sampled minimization over patch charts.
            let mut best: Option<(Vec3, Vec3, f64)> = None;
            for patch in &self.patches {
                let bb = patch.chart_box;
                let m = 64;
                for i in 0..=m {
                    for j in 0..=m {
                        let p = bb[0][0] + (bb[0][1] - bb[0][0]) * i as f64 / m as f64;
                        let q = bb[1][0] + (bb[1][1] - bb[1][0]) * j as f64 / m as f64;
                        let (xp, n) = patch.surface_point(p, q);
                        let dist = norm(sub(x, xp));
                        if best.as_ref().map_or(true, |b| dist < b.2) {
                            best = Some((xp, n, dist));
                        }
                    }
                }
            }
            return best.ok_or(GeometryError::ChartMiss { dist: f64::INFINITY });
        }
        let n = normalize(self.grad_zeta(y));
        Ok((y, n, norm(sub(x, y))))
    }

    /// Whether any patch chart covers the given boundary point.
    pub fn patch_covering(&self, x_hat: Vec3) -> Option<usize> {
        for (k, patch) in self.patches.iter().enumerate() {
            let (p, q, h) = patch.frame.to_local(x_hat);
            if !patch.contains(p, q) {
                continue;
            }
            match patch.rho {
                RhoFn::EllipsoidCap { a2, b2, .. } => {
                    if 1.0 - p * p / a2 - q * q / b2 <= 0.0 {
                        continue;
                    }
                }
                RhoFn::Poly(_) => {}
            }
            let jet = patch.rho.jet(p, q);
            if (h - jet.rho).abs() < 1e-6 {
                return Some(k);
            }
        }
        None
    }
}

#[inline]
fn add3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn cap_patches(center: Vec3, semi: Vec3) -> Vec<BoundaryPatch> {
    // Six caps along ±x, ±y, ±z. Chart boxes extend past the 45° cone so the
    // caps overlap and cover the whole surface.
    let mut patches = Vec::new();
    let axes: [(Vec3, Vec3, Vec3); 6] = [
        ([0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]),    // +x
        ([0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]),   // -x
        ([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),    // +y
        ([1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]),   // -y
        ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]),    // +z
        ([0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]),   // -z
    ];
    for (e1, e2, e3) in axes {
        // semi-axis lengths seen by this cap's local coordinates
        let la = |e: Vec3| (e[0] * semi[0]).abs() + (e[1] * semi[1]).abs() + (e[2] * semi[2]).abs();
        let (a, b, c) = (la(e1), la(e2), la(e3));
        let w1 = 0.62 * a;
        let w2 = 0.62 * b;
        patches.push(BoundaryPatch {
            rho: RhoFn::EllipsoidCap { a2: a * a, b2: b * b, c },
            frame: PatchFrame { origin: center, e1, e2, e3 },
            chart_box: [[-w1, w1], [-w2, w2]],
        });
    }
    patches
}

/// Phase-space point (x, v) with x in the closed domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub x: Vec3,
    pub v: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Outgoing,
    Incoming,
    Grazing,
    Interior,
}

#[derive(Debug, Clone, Copy)]
pub struct BoundaryClassification {
    pub kind: BoundaryKind,
    /// Outward unit normal; zero for interior points.
    pub n: Vec3,
    pub v_dot_n: f64,
}

/// Outward unit normal n = ∇ζ/|∇ζ| at a boundary point.
pub fn outward_normal(spec: &DomainSpec, x: Vec3) -> Result<Vec3, GeometryError> {
    let z = spec.zeta(x);
    if z.abs() >= ON_BOUNDARY_TOL {
        return Err(GeometryError::NotOnBoundary(z));
    }
    let g = spec.grad_zeta(x);
    let gn = norm(g);
    if gn < 1e-12 {
        return Err(GeometryError::DegenerateGradient(gn));
    }
    Ok(scale(g, 1.0 / gn))
}

/// Specular reflection R_x v = v - 2 n (n·v); an isometric involution that
/// fixes grazing velocities.
#[inline]
pub fn reflect(v: Vec3, n: Vec3) -> Vec3 {
    let vn = dot(v, n);
    [v[0] - 2.0 * n[0] * vn, v[1] - 2.0 * n[1] * vn, v[2] - 2.0 * n[2] * vn]
}

/// Normal coordinates (x_⊥, v_⊥) of a phase point: distance to the boundary
/// and the normal velocity component at the closest boundary point. `in_bd`
/// flags the tubular region x_⊥ < δ₀.
pub fn normal_coordinates(
    spec: &DomainSpec,
    p: &PhasePoint,
) -> Result<(f64, f64, bool), GeometryError> {
    let (x_hat, n, dist) = spec.closest_boundary(p.x)?;
    let in_bd = dist < spec.delta0;
    if in_bd && spec.patch_covering(x_hat).is_none() {
        return Err(GeometryError::ChartMiss { dist });
    }
    Ok((dist.max(0.0), dot(p.v, n), in_bd))
}

/// Classify a phase point as interior or by the sign of v·n on the boundary.
pub fn classify(spec: &DomainSpec, p: &PhasePoint) -> Result<BoundaryClassification, GeometryError> {
    let z = spec.zeta(p.x);
    if z > ON_BOUNDARY_TOL {
        return Err(GeometryError::OutsideDomain(z));
    }
    if z < -ON_BOUNDARY_TOL {
        return Ok(BoundaryClassification {
            kind: BoundaryKind::Interior,
            n: [0.0; 3],
            v_dot_n: 0.0,
        });
    }
    let n = outward_normal(spec, p.x)?;
    let vn = dot(p.v, n);
    let kind = if vn > GRAZING_TOL {
        BoundaryKind::Outgoing
    } else if vn < -GRAZING_TOL {
        BoundaryKind::Incoming
    } else {
        BoundaryKind::Grazing
    };
    Ok(BoundaryClassification { kind, n, v_dot_n: vn })
}

/// Test the rotational-symmetry identity {(x-x0)×ω}·n_x = 0 over sampled
/// boundary points; returns the maximum residual.
pub fn rotational_symmetry_residual(spec: &DomainSpec, x0: Vec3, omega: Vec3) -> f64 {
    let omega = normalize(omega);
    let mut max_res: f64 = 0.0;
    for patch in &spec.patches {
        let bb = patch.chart_box;
        let m = 12;
        for i in 0..=m {
            for j in 0..=m {
                let p = bb[0][0] + (bb[0][1] - bb[0][0]) * i as f64 / m as f64;
                let q = bb[1][0] + (bb[1][1] - bb[1][0]) * j as f64 / m as f64;
                if let RhoFn::EllipsoidCap { a2, b2, .. } = patch.rho {
                    if 1.0 - p * p / a2 - q * q / b2 < 0.05 {
                        continue;
                    }
                }
                let (x, n) = patch.surface_point(p, q);
                let res = dot(cross(sub(x, x0), omega), n).abs();
                max_res = max_res.max(res);
            }
        }
    }
    max_res
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_on_unit_sphere_pole() {
        let spec = DomainSpec::ball([0.0; 3], 1.0, 0.3);
        let n = outward_normal(&spec, [0.0, 0.0, 1.0]).unwrap();
        assert!((n[0]).abs() < 1e-14 && (n[1]).abs() < 1e-14 && (n[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn normal_on_slab_face() {
        let spec = DomainSpec::slab(2.0, 0.5);
        let n = outward_normal(&spec, [0.3, -2.0, 0.0]).unwrap();
        assert_eq!(n, [0.0, 0.0, 1.0]);
        let err = outward_normal(&spec, [0.0, 0.0, -0.5]).unwrap_err();
        assert!(matches!(err, GeometryError::NotOnBoundary(_)));
    }

    #[test]
    fn normal_on_ellipsoid_apex() {
        // ζ = x1²/4 + x2² + x3² − 1 at (2,0,0): gradient (1,0,0) after normalization
        let spec = DomainSpec::ellipsoid([0.0; 3], [2.0, 1.0, 1.0], 0.2);
        let n = outward_normal(&spec, [2.0, 0.0, 0.0]).unwrap();
        assert!((n[0] - 1.0).abs() < 1e-14 && n[1].abs() < 1e-14 && n[2].abs() < 1e-14);
    }

    #[test]
    fn reflect_axis_aligned() {
        assert_eq!(reflect([1.0, 2.0, 3.0], [0.0, 0.0, 1.0]), [1.0, 2.0, -3.0]);
        assert_eq!(reflect([1.0, 2.0, 0.0], [0.0, 0.0, 1.0]), [1.0, 2.0, 0.0]);
    }

    #[test]
    fn reflect_diagonal_normal() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r = reflect([1.0, 0.0, 0.0], [s, s, 0.0]);
        assert!((r[0]).abs() < 1e-15 && (r[1] + 1.0).abs() < 1e-15 && r[2].abs() < 1e-15);
    }

    #[test]
    fn slab_normal_coordinates() {
        let spec = DomainSpec::slab(2.0, 0.5);
        let p = PhasePoint { x: [0.0, 0.0, -0.2], v: [1.0, 1.0, 4.0] };
        let (xp, vp, in_bd) = normal_coordinates(&spec, &p).unwrap();
        assert!((xp - 0.2).abs() < 1e-14);
        assert!((vp - 4.0).abs() < 1e-14);
        assert!(in_bd);
    }

    #[test]
    fn ball_normal_coordinates() {
        let spec = DomainSpec::ball([0.0; 3], 1.0, 0.3);
        let p = PhasePoint { x: [0.0, 0.0, 0.5], v: [0.0, 0.0, 1.0] };
        let (xp, vp, in_bd) = normal_coordinates(&spec, &p).unwrap();
        assert!((xp - 0.5).abs() < 1e-14);
        assert!((vp - 1.0).abs() < 1e-14);
        assert!(!in_bd);
    }

    #[test]
    fn grazing_velocity_has_zero_v_perp() {
        let spec = DomainSpec::slab(2.0, 0.5);
        let p = PhasePoint { x: [0.4, 0.0, -0.1], v: [3.0, -2.0, 0.0] };
        let (_, vp, _) = normal_coordinates(&spec, &p).unwrap();
        assert_eq!(vp, 0.0);
    }

    #[test]
    fn classify_half_space_cases() {
        let spec = DomainSpec::slab(2.0, 0.5);
        let c = classify(&spec, &PhasePoint { x: [0.0; 3], v: [0.0, 0.0, 1.0] }).unwrap();
        assert_eq!(c.kind, BoundaryKind::Outgoing);
        let c = classify(&spec, &PhasePoint { x: [0.0; 3], v: [1.0, 0.0, 0.0] }).unwrap();
        assert_eq!(c.kind, BoundaryKind::Grazing);
        let c = classify(&spec, &PhasePoint { x: [0.0, 0.0, -1.0], v: [5.0, 1.0, 2.0] }).unwrap();
        assert_eq!(c.kind, BoundaryKind::Interior);
        let err = classify(&spec, &PhasePoint { x: [0.0, 0.0, 0.5], v: [0.0; 3] }).unwrap_err();
        assert!(matches!(err, GeometryError::OutsideDomain(_)));
    }

    #[test]
    fn ellipsoid_closest_point_converges() {
        let spec = DomainSpec::ellipsoid([0.0; 3], [2.0, 1.0, 1.5], 0.2);
        let x = [0.3, 0.2, 0.9];
        let (x_hat, n, dist) = spec.closest_boundary(x).unwrap();
        assert!(spec.zeta(x_hat).abs() < 1e-10);
        // stationarity: x - x_hat is parallel to the normal
        let d = sub(x, x_hat);
        let tang = sub(d, scale(n, dot(d, n)));
        assert!(norm(tang) < 1e-9, "tangential residual {}", norm(tang));
        assert!(dist > 0.0 && dist < 1.0);
    }

    #[test]
    fn symmetry_detector_matches_surfaces_of_revolution() {
        // Sphere: every axis through the center.
        let ball = DomainSpec::ball([0.0; 3], 1.0, 0.3);
        for axis in [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.3, -0.5, 0.8]] {
            assert!(rotational_symmetry_residual(&ball, [0.0; 3], axis) < 1e-12);
        }
        // Spheroid (two equal semi-axes): only its axis of revolution.
        let spheroid = DomainSpec::ellipsoid([0.0; 3], [1.0, 1.0, 1.5], 0.2);
        assert!(rotational_symmetry_residual(&spheroid, [0.0; 3], [0.0, 0.0, 1.0]) < 1e-12);
        assert!(rotational_symmetry_residual(&spheroid, [0.0; 3], [1.0, 0.0, 0.0]) > 1e-3);
        // Triaxial ellipsoid: the identity fails for every axis, including the
        // principal ones (residual ~ p q (1/a² - 1/b²) on the surface).
        let ell = DomainSpec::ellipsoid([0.0; 3], [2.0, 1.0, 1.5], 0.2);
        for axis in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.3, -0.5, 0.8]] {
            assert!(rotational_symmetry_residual(&ell, [0.0; 3], axis) > 1e-3);
        }
    }

    #[test]
    fn overlapping_cap_patches_agree_on_distance() {
        let spec = DomainSpec::ball([0.0; 3], 1.0, 0.3);
        // direction covered by both the +z and +x caps
        let dir = normalize([0.8, 0.1, 0.7]);
        let x = scale(dir, 0.9);
        let (_, _, dist) = spec.closest_boundary(x).unwrap();
        assert!((dist - 0.1).abs() < 1e-10);
        assert!(spec.patch_covering(scale(dir, 1.0)).is_some());
    }
}
