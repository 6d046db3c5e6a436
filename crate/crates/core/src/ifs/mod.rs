//! Self-similar systems of affine contractions on the line or the plane.

mod measures;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::measure::{PlanePoint, Support, TestFunctionLibrary, TransferSystem};
use crate::Settings;

pub use measures::{
    classify_ifs, hutchinson, kms_measure_ifs, orbit_condition, HutchinsonMode, OrbitCertificate, OrbitConditionReport,
    ORBIT_DEPTH,
};

/// Collision tolerance for `γⱼ(y) = γⱼ′(y)`.
pub const COLLISION_TOL: f64 = 1e-9;

/// Cell radius the attractor cover is refined to.
pub const COVER_RADIUS: f64 = 1e-6;

/// `x ↦ A x + b`. One-dimensional maps use `A[0][0]` and `b[0]` only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub linear: [[f64; 2]; 2],
    pub offset: [f64; 2],
}

impl AffineMap {
    pub fn new(linear: [[f64; 2]; 2], offset: [f64; 2]) -> Self {
        AffineMap { linear, offset }
    }

    /// `x ↦ a x + b` on the line.
    pub fn scalar(a: f64, b: f64) -> Self {
        AffineMap { linear: [[a, 0.0], [0.0, 0.0]], offset: [b, 0.0] }
    }

    pub fn apply(&self, p: &PlanePoint) -> PlanePoint {
        let a = &self.linear;
        PlanePoint::new(a[0][0] * p.x + a[0][1] * p.y + self.offset[0], a[1][0] * p.x + a[1][1] * p.y + self.offset[1])
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        let (a, b) = (&self.linear, &other.linear);
        let mut m = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        let o = self.apply(&PlanePoint::new(other.offset[0], other.offset[1]));
        AffineMap { linear: m, offset: [o.x, o.y] }
    }

    /// Rotation by `theta` about `center`.
    pub fn rotation(theta: f64, center: [f64; 2]) -> AffineMap {
        let (s, c) = theta.sin_cos();
        let lin = [[c, -s], [s, c]];
        let off = [center[0] - c * center[0] + s * center[1], center[1] - s * center[0] - c * center[1]];
        AffineMap { linear: lin, offset: off }
    }

    /// Singular values `(σ_min, σ_max)` of the linear part in dimension `dim`.
    pub fn singular_values(&self, dim: usize) -> (f64, f64) {
        let a = &self.linear;
        if dim == 1 {
            let s = a[0][0].abs();
            return (s, s);
        }
        let fro = a[0][0] * a[0][0] + a[0][1] * a[0][1] + a[1][0] * a[1][0] + a[1][1] * a[1][1];
        let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).abs();
        let disc = (fro * fro - 4.0 * det * det).max(0.0).sqrt();
        (((fro - disc) / 2.0).max(0.0).sqrt(), ((fro + disc) / 2.0).sqrt())
    }

    fn inverse(&self, dim: usize) -> Option<AffineMap> {
        let a = &self.linear;
        if dim == 1 {
            if a[0][0] == 0.0 {
                return None;
            }
            let inv = 1.0 / a[0][0];
            return Some(AffineMap::scalar(inv, -self.offset[0] * inv));
        }
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det == 0.0 {
            return None;
        }
        let m = [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]];
        let o = [
            -(m[0][0] * self.offset[0] + m[0][1] * self.offset[1]),
            -(m[1][0] * self.offset[0] + m[1][1] * self.offset[1]),
        ];
        Some(AffineMap { linear: m, offset: o })
    }

    pub(crate) fn fixed_point(&self, dim: usize) -> PlanePoint {
        let a = &self.linear;
        if dim == 1 {
            return PlanePoint::new(self.offset[0] / (1.0 - a[0][0]), 0.0);
        }
        let (m00, m01, m10, m11) = (1.0 - a[0][0], -a[0][1], -a[1][0], 1.0 - a[1][1]);
        let det = m00 * m11 - m01 * m10;
        PlanePoint::new(
            (m11 * self.offset[0] - m01 * self.offset[1]) / det,
            (m00 * self.offset[1] - m10 * self.offset[0]) / det,
        )
    }
}

/// Branch structure: collisions `γⱼ(y) = γⱼ′(y)` with `y` in the attractor.
#[derive(Clone, Debug, PartialEq)]
pub struct IfsBranchData {
    /// Points of `𝒞(γ)` with the colliding index pairs.
    pub branch_values: Vec<(PlanePoint, Vec<(usize, usize)>)>,
    /// `ℬ(γ)`.
    pub branch_points: Vec<PlanePoint>,
    /// Pairs whose difference has a singular linear part, so the collision
    /// equation has no isolated solution.
    pub singular_pairs: Vec<(usize, usize)>,
}

impl IfsBranchData {
    pub fn to_json(&self) -> Value {
        json!({
            "branch_values": self.branch_values.iter().map(|(y, pairs)| json!({"point": y, "pairs": pairs})).collect::<Vec<_>>(),
            "branch_points": self.branch_points,
            "singular_pairs": self.singular_pairs,
        })
    }
}

/// A finite family of affine proper contractions.
#[derive(Clone, Debug)]
pub struct IfsSystem {
    maps: Vec<AffineMap>,
    dim: usize,
    name: Option<String>,
    settings: Settings,
    center: PlanePoint,
    radius: f64,
    lip: Vec<f64>,
    inverses: Vec<AffineMap>,
    branch: IfsBranchData,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum LinearJson {
    Scalar(f64),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OffsetJson {
    Scalar(f64),
    Vector(Vec<f64>),
}

#[derive(Deserialize)]
struct MapJson {
    linear: LinearJson,
    offset: OffsetJson,
}

#[derive(Deserialize)]
struct SystemJson {
    dim: usize,
    maps: Vec<MapJson>,
    name: Option<String>,
}

impl IfsSystem {
    pub fn new(maps: Vec<AffineMap>, dim: usize, name: Option<String>) -> Result<Self> {
        Self::with_settings(maps, dim, name, Settings { tol: COLLISION_TOL, ..Settings::default() })
    }

    pub fn with_settings(maps: Vec<AffineMap>, dim: usize, name: Option<String>, settings: Settings) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidSystem(format!("dimension must be 1 or 2, got {dim}")));
        }
        if maps.len() < 2 {
            return Err(Error::InvalidSystem("at least two maps are required".into()));
        }
        let mut lip = Vec::new();
        let mut inverses = Vec::new();
        for (i, m) in maps.iter().enumerate() {
            let finite = m.linear.iter().flatten().chain(m.offset.iter()).all(|v| v.is_finite());
            let (lo, hi) = m.singular_values(dim);
            if !finite || !(lo > 0.0 && hi < 1.0) {
                return Err(Error::InvalidSystem(format!(
                    "map {} is not a proper contraction (singular values {lo}, {hi})",
                    i + 1
                )));
            }
            lip.push(hi);
            inverses.push(m.inverse(dim).expect("nonsingular"));
        }
        for i in 0..maps.len() {
            for j in i + 1..maps.len() {
                if maps[i] == maps[j] {
                    return Err(Error::InvalidSystem(format!("maps {} and {} coincide", i + 1, j + 1)));
                }
            }
        }
        let n = maps.len() as f64;
        let fixed: Vec<PlanePoint> = maps.iter().map(|m| m.fixed_point(dim)).collect();
        let center =
            PlanePoint::new(fixed.iter().map(|p| p.x).sum::<f64>() / n, fixed.iter().map(|p| p.y).sum::<f64>() / n);
        let radius = maps
            .iter()
            .zip(&lip)
            .map(|(m, l)| m.apply(&center).distance(&center) / (1.0 - l))
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let mut sys = IfsSystem {
            maps,
            dim,
            name,
            settings,
            center,
            radius,
            lip,
            inverses,
            branch: IfsBranchData { branch_values: Vec::new(), branch_points: Vec::new(), singular_pairs: Vec::new() },
        };
        sys.branch = sys.branch_structure(sys.cover_depth());
        Ok(sys)
    }

    /// `{y/2, 1 − y/2}` on `[0, 1]`.
    pub fn tent() -> Self {
        Self::new(vec![AffineMap::scalar(0.5, 0.0), AffineMap::scalar(-0.5, 1.0)], 1, Some("tent".into()))
            .expect("valid preset")
    }

    /// `{y/2, (y + 1)/2}` on `[0, 1]`.
    pub fn binary() -> Self {
        Self::new(vec![AffineMap::scalar(0.5, 0.0), AffineMap::scalar(0.5, 0.5)], 1, Some("binary".into()))
            .expect("valid preset")
    }

    fn sierpinski_maps() -> Vec<AffineMap> {
        let h = [[0.5, 0.0], [0.0, 0.5]];
        let s3 = 3f64.sqrt();
        vec![AffineMap::new(h, [0.25, s3 / 4.0]), AffineMap::new(h, [0.0, 0.0]), AffineMap::new(h, [0.5, 0.0])]
    }

    /// The gasket on the vertices `(1/2, √3/2)`, `(0, 0)`, `(1, 0)`.
    pub fn sierpinski() -> Self {
        Self::new(Self::sierpinski_maps(), 2, Some("sierpinski".into())).expect("valid preset")
    }

    /// The gasket with the lower maps rotated by `∓2π/3` about the centroids
    /// of their sub-triangles, so that the maps become the inverse branches
    /// of a branched self-covering.
    pub fn sierpinski_twisted() -> Self {
        let s3 = 3f64.sqrt();
        let m = Self::sierpinski_maps();
        let g2 = AffineMap::rotation(-2.0 * PI / 3.0, [0.25, s3 / 12.0]).compose(&m[1]);
        let g3 = AffineMap::rotation(2.0 * PI / 3.0, [0.75, s3 / 12.0]).compose(&m[2]);
        Self::new(vec![m[0], g2, g3], 2, Some("sierpinski-twisted".into())).expect("valid preset")
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "tent" => Ok(Self::tent()),
            "binary" => Ok(Self::binary()),
            "sierpinski" => Ok(Self::sierpinski()),
            "sierpinski-twisted" => Ok(Self::sierpinski_twisted()),
            _ => Err(Error::InvalidInput(format!(
                "unknown preset {name:?}; expected tent, binary, sierpinski or sierpinski-twisted"
            ))),
        }
    }

    /// Parses `{"dim": d, "maps": [{"linear": …, "offset": …}]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: SystemJson = serde_json::from_str(text).map_err(|e| Error::InvalidSystem(e.to_string()))?;
        let dim = parsed.dim;
        let bad = |i: usize| Error::InvalidSystem(format!("map {} has the wrong shape for dimension {dim}", i + 1));
        let mut maps = Vec::new();
        for (i, m) in parsed.maps.into_iter().enumerate() {
            let linear = match (m.linear, dim) {
                (LinearJson::Scalar(a), 1) => [[a, 0.0], [0.0, 0.0]],
                (LinearJson::Matrix(v), 1) if v.len() == 1 && v[0].len() == 1 => [[v[0][0], 0.0], [0.0, 0.0]],
                (LinearJson::Matrix(v), 2) if v.len() == 2 && v.iter().all(|r| r.len() == 2) => {
                    [[v[0][0], v[0][1]], [v[1][0], v[1][1]]]
                }
                _ => return Err(bad(i)),
            };
            let offset = match (m.offset, dim) {
                (OffsetJson::Scalar(b), 1) => [b, 0.0],
                (OffsetJson::Vector(v), 1) if v.len() == 1 => [v[0], 0.0],
                (OffsetJson::Vector(v), 2) if v.len() == 2 => [v[0], v[1]],
                _ => return Err(bad(i)),
            };
            maps.push(AffineMap { linear, offset });
        }
        Self::new(maps, dim, parsed.name)
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn settings(&self) -> Settings {
        self.settings
    }

    pub fn with_atom_budget(mut self, budget: usize) -> Self {
        self.settings.atom_budget = budget;
        self
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// Largest contraction ratio `c₂`.
    pub fn contraction(&self) -> f64 {
        self.lip.iter().copied().fold(0.0, f64::max)
    }

    /// A ball `B(c, r)` mapped into itself by every map, hence containing
    /// the attractor.
    pub fn invariant_ball(&self) -> (PlanePoint, f64) {
        (self.center, self.radius)
    }

    /// Bounding box `[x0, x1, y0, y1]` of the invariant ball.
    pub fn bbox(&self) -> [f64; 4] {
        let (c, r) = (self.center, self.radius);
        if self.dim == 1 {
            [c.x - r, c.x + r, 0.0, 0.0]
        } else {
            [c.x - r, c.x + r, c.y - r, c.y + r]
        }
    }

    /// Monomial test functions on the bounding box.
    pub fn library(&self, degree: u32) -> TestFunctionLibrary {
        TestFunctionLibrary::plane(degree, self.bbox(), self.dim)
    }

    /// Depth at which cover cells have radius below [`COVER_RADIUS`].
    pub fn cover_depth(&self) -> usize {
        let c2 = self.contraction();
        ((COVER_RADIUS / self.radius).ln() / c2.ln()).ceil().max(1.0) as usize
    }

    /// Whether `y` lies within `tol` of the depth-`depth` cover of the
    /// attractor by cells `γ_w(B(c, r))`.
    pub fn in_attractor(&self, y: &PlanePoint, depth: usize, tol: f64) -> bool {
        const FRONTIER_CAP: usize = 1 << 16;
        if self.center.distance(y) > self.radius + tol {
            return false;
        }
        // cells are γ_w(B(c, r)); keep the composed maps of live words
        let mut frontier: Vec<(AffineMap, f64)> = vec![(AffineMap::new([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0]), 1.0)];
        for _ in 0..depth {
            let mut next = Vec::new();
            for (w, l) in &frontier {
                for (g, li) in self.maps.iter().zip(&self.lip) {
                    let m = w.compose(g);
                    let lm = l * li;
                    if m.apply(&self.center).distance(y) <= self.radius * lm + tol {
                        next.push((m, lm));
                    }
                }
            }
            if next.is_empty() {
                return false;
            }
            if next.len() > FRONTIER_CAP {
                // overlapping cells: accept at the reached resolution
                return true;
            }
            frontier = next;
        }
        true
    }

    /// `γ(y)` as a set with multiplicities `e(γⱼ(y), y)`.
    pub fn images(&self, y: &PlanePoint) -> Vec<(PlanePoint, usize)> {
        let mut out: Vec<(PlanePoint, usize)> = Vec::new();
        for g in &self.maps {
            let x = g.apply(y);
            match out.iter_mut().find(|(p, _)| p.distance(&x) <= self.settings.tol) {
                Some(hit) => hit.1 += 1,
                None => out.push((x, 1)),
            }
        }
        out.sort_by(|a, b| a.0.order(&b.0));
        out
    }

    /// Solves `γⱼ(y) = γⱼ′(y)` for every pair and keeps solutions in the
    /// depth-limited attractor cover.
    pub fn branch_structure(&self, attractor_depth: usize) -> IfsBranchData {
        let tol = self.settings.tol;
        let mut values: Vec<(PlanePoint, Vec<(usize, usize)>)> = Vec::new();
        let mut singular = Vec::new();
        for j in 0..self.maps.len() {
            for k in j + 1..self.maps.len() {
                let (a, b) = (&self.maps[j], &self.maps[k]);
                let d = [
                    [a.linear[0][0] - b.linear[0][0], a.linear[0][1] - b.linear[0][1]],
                    [a.linear[1][0] - b.linear[1][0], a.linear[1][1] - b.linear[1][1]],
                ];
                let rhs = [b.offset[0] - a.offset[0], b.offset[1] - a.offset[1]];
                let scale = d.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
                let y = if self.dim == 1 {
                    if d[0][0].abs() <= 1e-14 {
                        None
                    } else {
                        Some(PlanePoint::new(rhs[0] / d[0][0], 0.0))
                    }
                } else {
                    let det = d[0][0] * d[1][1] - d[0][1] * d[1][0];
                    if det.abs() <= 1e-14 * scale.max(1.0) * scale.max(1.0) {
                        None
                    } else {
                        Some(PlanePoint::new(
                            (d[1][1] * rhs[0] - d[0][1] * rhs[1]) / det,
                            (d[0][0] * rhs[1] - d[1][0] * rhs[0]) / det,
                        ))
                    }
                };
                let Some(y) = y else {
                    singular.push((j + 1, k + 1));
                    continue;
                };
                if a.apply(&y).distance(&b.apply(&y)) > tol || !self.in_attractor(&y, attractor_depth, tol) {
                    continue;
                }
                match values.iter_mut().find(|(p, _)| p.distance(&y) <= tol) {
                    Some(v) => v.1.push((j + 1, k + 1)),
                    None => values.push((y, vec![(j + 1, k + 1)])),
                }
            }
        }
        values.sort_by(|a, b| a.0.order(&b.0));
        let mut points: Vec<PlanePoint> = Vec::new();
        for (y, pairs) in &values {
            for &(j, _) in pairs {
                let x = self.maps[j - 1].apply(y);
                if !points.iter().any(|p| p.distance(&x) <= tol) {
                    points.push(x);
                }
            }
        }
        points.sort_by(|a, b| a.order(b));
        IfsBranchData { branch_values: values, branch_points: points, singular_pairs: singular }
    }

    pub fn branch_data(&self) -> &IfsBranchData {
        &self.branch
    }

    pub fn branch_values(&self) -> Vec<PlanePoint> {
        self.branch.branch_values.iter().map(|v| v.0).collect()
    }

    pub fn is_branch_point(&self, x: &PlanePoint) -> bool {
        self.branch.branch_points.iter().any(|b| b.distance(x) <= self.settings.tol.max(1e-9))
    }

    pub(crate) fn inverses(&self) -> &[AffineMap] {
        &self.inverses
    }

    pub fn report_json(&self) -> Value {
        json!({
            "name": self.name,
            "dim": self.dim,
            "maps": self.maps,
            "contraction": self.contraction(),
            "invariant_ball": {"center": self.center, "radius": self.radius},
            "branch": self.branch.to_json(),
        })
    }
}

impl TransferSystem for IfsSystem {
    type Point = PlanePoint;

    fn fiber(&self, y: &PlanePoint) -> Result<Vec<(PlanePoint, usize)>> {
        Ok(self.images(y))
    }

    fn degree(&self) -> usize {
        self.maps.len()
    }

    fn tol(&self) -> f64 {
        self.settings.tol
    }

    fn atom_budget(&self) -> usize {
        self.settings.atom_budget
    }

    fn branch_points(&self) -> Vec<PlanePoint> {
        self.branch.branch_points.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{apply_f_beta, tilde, AtomicMeasure};

    fn pp(x: f64, y: f64) -> PlanePoint {
        PlanePoint::new(x, y)
    }

    #[test]
    fn tent_branch_structure() {
        let t = IfsSystem::tent();
        let bd = t.branch_data();
        assert_eq!(bd.branch_values.len(), 1);
        assert!(bd.branch_values[0].0.distance(&pp(1.0, 0.0)) < 1e-12);
        assert_eq!(bd.branch_points, vec![pp(0.5, 0.0)]);
    }

    #[test]
    fn binary_has_no_branching() {
        let b = IfsSystem::binary();
        assert!(b.branch_data().branch_values.is_empty());
        assert!(b.branch_data().branch_points.is_empty());
        assert_eq!(b.branch_data().singular_pairs, vec![(1, 2)]);
    }

    #[test]
    fn twisted_gasket_branch_structure() {
        let s3 = 3f64.sqrt();
        let t = IfsSystem::sierpinski_twisted();
        let bd = t.branch_data();
        let expect_b = [pp(0.25, s3 / 4.0), pp(0.75, s3 / 4.0), pp(0.5, 0.0)];
        let expect_c = [pp(0.5, s3 / 2.0), pp(0.0, 0.0), pp(1.0, 0.0)];
        assert_eq!(bd.branch_points.len(), 3);
        assert_eq!(bd.branch_values.len(), 3);
        for b in expect_b {
            assert!(bd.branch_points.iter().any(|p| p.distance(&b) < 1e-9), "missing {b}");
        }
        for c in expect_c {
            assert!(bd.branch_values.iter().any(|p| p.0.distance(&c) < 1e-9), "missing {c}");
        }
        // the untwisted gasket has no collisions at a common point
        assert!(IfsSystem::sierpinski().branch_data().branch_points.is_empty());
    }

    #[test]
    fn twisted_gasket_is_self_similar() {
        // images of points of the untwisted attractor stay in it
        let plain = IfsSystem::sierpinski();
        let twisted = IfsSystem::sierpinski_twisted();
        let mut pts = vec![pp(0.0, 0.0)];
        for _ in 0..4 {
            pts = pts.iter().flat_map(|p| plain.maps().iter().map(move |g| g.apply(p))).collect();
        }
        for p in &pts {
            for g in twisted.maps() {
                assert!(plain.in_attractor(&g.apply(p), 20, 1e-9));
            }
        }
    }

    #[test]
    fn attractor_membership() {
        let t = IfsSystem::tent();
        assert!(t.in_attractor(&pp(0.3, 0.0), 25, 1e-9));
        assert!(!t.in_attractor(&pp(1.5, 0.0), 25, 1e-9));
        let s = IfsSystem::sierpinski();
        // centroid of the middle hole is not in the gasket
        assert!(!s.in_attractor(&pp(0.5, 3f64.sqrt() / 6.0), 25, 1e-9));
        assert!(s.in_attractor(&pp(0.25, 3f64.sqrt() / 4.0), 25, 1e-9));
    }

    #[test]
    fn tilde_examples() {
        let t = IfsSystem::tent();
        assert_eq!(tilde(&t, |_| 1.0, &pp(1.0, 0.0)).unwrap(), 1.0);
        assert_eq!(tilde(&t, |_| 1.0, &pp(0.0, 0.0)).unwrap(), 2.0);
        let b = IfsSystem::binary();
        assert_eq!(tilde(&b, |p| p.x, &pp(0.0, 0.0)).unwrap(), 0.5);
    }

    #[test]
    fn f_beta_examples() {
        let t = IfsSystem::tent();
        let l2 = 2f64.ln();
        let m = apply_f_beta(&t, &AtomicMeasure::dirac(pp(1.0, 0.0)), l2).unwrap();
        assert_eq!(m.len(), 1);
        assert!((m.atoms()[0].1 - 0.5).abs() < 1e-15 && m.atoms()[0].0 == pp(0.5, 0.0));
        let m = apply_f_beta(&t, &AtomicMeasure::dirac(pp(0.0, 0.0)), l2).unwrap();
        assert_eq!(m.len(), 2);
        assert!((m.mass() - 1.0).abs() < 1e-15);
        let b = IfsSystem::binary();
        let m = apply_f_beta(&b, &AtomicMeasure::dirac(pp(0.3, 0.0)), l2).unwrap();
        assert!((m.mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        let bad = IfsSystem::new(vec![AffineMap::scalar(1.2, 0.0), AffineMap::scalar(0.5, 0.0)], 1, None);
        assert!(matches!(bad, Err(Error::InvalidSystem(_))));
        let dup = IfsSystem::new(vec![AffineMap::scalar(0.5, 0.0), AffineMap::scalar(0.5, 0.0)], 1, None);
        assert!(matches!(dup, Err(Error::InvalidSystem(_))));
        let one = IfsSystem::new(vec![AffineMap::scalar(0.5, 0.0)], 1, None);
        assert!(one.is_err());
    }

    #[test]
    fn json_systems() {
        let s = IfsSystem::from_json(
            r#"{"dim": 1, "maps": [{"linear": 0.5, "offset": 0}, {"linear": [[-0.5]], "offset": [1]}]}"#,
        )
        .unwrap();
        assert_eq!(s.branch_data().branch_points, vec![pp(0.5, 0.0)]);
        let s = IfsSystem::from_json(
            r#"{"dim": 2, "maps": [{"linear": [[0.5,0],[0,0.5]], "offset": [0,0]}, {"linear": [[0.5,0],[0,0.5]], "offset": [0.5,0]}]}"#,
        )
        .unwrap();
        assert_eq!(s.len(), 2);
        assert!(IfsSystem::from_json(r#"{"dim": 2, "maps": [{"linear": 0.5, "offset": 0}]}"#).is_err());
        assert!(IfsSystem::from_json("not json").is_err());
    }
}
