//! Points of the Riemann sphere in homogeneous coordinates.
//!
//! A point is stored as a pair `[z : w]` scaled so that the larger coordinate
//! is exactly `1 + 0i`. Infinity is `[1 : 0]`; it is an ordinary point for
//! every operation here.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Deserializer, Visitor};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherePoint {
    z: Complex64,
    w: Complex64,
}

impl SpherePoint {
    /// Builds `[z : w]`, rejecting the pair `(0, 0)` and non-finite input.
    pub fn new(z: Complex64, w: Complex64) -> Option<Self> {
        let finite = z.re.is_finite() && z.im.is_finite() && w.re.is_finite() && w.im.is_finite();
        if !finite || (z == ZERO && w == ZERO) {
            return None;
        }
        Some(normalize(z, w))
    }

    pub fn from_affine(c: Complex64) -> Self {
        SpherePoint::new(c, ONE).unwrap_or_else(SpherePoint::infinity)
    }

    pub fn from_real(x: f64) -> Self {
        SpherePoint::from_affine(Complex64::new(x, 0.0))
    }

    pub fn infinity() -> Self {
        SpherePoint { z: ONE, w: ZERO }
    }

    pub fn zero() -> Self {
        SpherePoint { z: ZERO, w: ONE }
    }

    /// Homogeneous coordinates `(z, w)`.
    pub fn coords(&self) -> (Complex64, Complex64) {
        (self.z, self.w)
    }

    pub fn is_infinity(&self) -> bool {
        self.w == ZERO
    }

    /// Affine coordinate `z / w`, or `None` at infinity.
    pub fn to_affine(&self) -> Option<Complex64> {
        if self.is_infinity() {
            None
        } else {
            Some(self.z / self.w)
        }
    }

    /// Re-normalizes; exposed so idempotence can be checked from outside.
    pub fn normalized(&self) -> Self {
        normalize(self.z, self.w)
    }

    /// Stereographic image on the unit sphere `S² ⊂ ℝ³`; `∞ ↦ (0,0,1)`.
    pub fn embed(&self) -> [f64; 3] {
        let zz = self.z.norm_sqr();
        let ww = self.w.norm_sqr();
        let s = zz + ww;
        let zw = self.z * self.w.conj();
        [2.0 * zw.re / s, 2.0 * zw.im / s, (zz - ww) / s]
    }

    /// Inverse of [`SpherePoint::embed`]; the input need not be unit length.
    pub fn from_embedding(e: [f64; 3]) -> Self {
        let n = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
        if n == 0.0 || !n.is_finite() {
            return SpherePoint::zero();
        }
        let (x, y, t) = (e[0] / n, e[1] / n, e[2] / n);
        // [x + iy : 1 - t] and [1 + t : x - iy] are the same point; use the
        // better conditioned one.
        if t <= 0.0 {
            normalize(Complex64::new(x, y), Complex64::new(1.0 - t, 0.0))
        } else {
            normalize(Complex64::new(1.0 + t, 0.0), Complex64::new(x, -y))
        }
    }
}

fn normalize(z: Complex64, w: Complex64) -> SpherePoint {
    if z == ONE && w.norm() <= 1.0 {
        return SpherePoint { z, w };
    }
    if w == ONE && z.norm() <= 1.0 {
        return SpherePoint { z, w };
    }
    let (first, second) = if z.norm() >= w.norm() { (true, w / z) } else { (false, z / w) };
    if second.norm() <= 1.0 {
        if first {
            SpherePoint { z: ONE, w: second }
        } else {
            SpherePoint { z: second, w: ONE }
        }
    } else if first {
        // rounding pushed the ratio past 1; swap roles
        SpherePoint { z: z / w, w: ONE }
    } else {
        SpherePoint { z: ONE, w: w / z }
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_affine() {
            None => write!(f, "inf"),
            Some(c) if c.im == 0.0 => write!(f, "{}", c.re),
            Some(c) => write!(f, "{}{:+}i", c.re, c.im),
        }
    }
}

/// `2|z_p w_q − z_q w_p| / (‖p‖ ‖q‖)`, the Euclidean distance of the
/// stereographic images.
pub fn chordal_distance(p: &SpherePoint, q: &SpherePoint) -> f64 {
    let num = (p.z * q.w - q.z * p.w).norm();
    let np = (p.z.norm_sqr() + p.w.norm_sqr()).sqrt();
    let nq = (q.z.norm_sqr() + q.w.norm_sqr()).sqrt();
    (2.0 * num / (np * nq)).min(2.0)
}

/// Greedy leader clustering under the chordal metric.
///
/// Points are visited in input order; each joins the earliest representative
/// within `tol`, or becomes a new representative. Representatives are
/// therefore pairwise farther apart than `tol`.
pub fn cluster(points: &[SpherePoint], tol: f64) -> Vec<(SpherePoint, usize)> {
    let mut grid = GridIndex::new(tol);
    let mut reps: Vec<(SpherePoint, usize)> = Vec::new();
    let mut rep_embed: Vec<[f64; 3]> = Vec::new();
    for p in points {
        let e = p.embed();
        match grid.nearest_within(&e, tol, &rep_embed) {
            Some(k) => reps[k].1 += 1,
            None => {
                grid.insert(&e, reps.len());
                rep_embed.push(e);
                reps.push((*p, 1));
            }
        }
    }
    reps
}

/// Uniform hash grid over points of ℝ³, used for tolerance lookups.
#[derive(Debug)]
pub(crate) struct GridIndex {
    cell: f64,
    cells: HashMap<[i64; 3], Vec<usize>>,
}

impl GridIndex {
    pub(crate) fn new(cell: f64) -> Self {
        GridIndex { cell: cell.max(1e-300), cells: HashMap::new() }
    }

    fn key(&self, e: &[f64; 3]) -> [i64; 3] {
        [(e[0] / self.cell).floor() as i64, (e[1] / self.cell).floor() as i64, (e[2] / self.cell).floor() as i64]
    }

    pub(crate) fn insert(&mut self, e: &[f64; 3], id: usize) {
        let k = self.key(e);
        self.cells.entry(k).or_default().push(id);
    }

    /// Smallest id whose stored position lies within `tol` of `e`.
    /// `positions[id]` must hold the position inserted under `id`, and `tol`
    /// must not exceed the cell size.
    pub(crate) fn nearest_within(&self, e: &[f64; 3], tol: f64, positions: &[[f64; 3]]) -> Option<usize> {
        let k = self.key(e);
        let mut best: Option<usize> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let kk = [k[0] + dx, k[1] + dy, k[2] + dz];
                    if let Some(ids) = self.cells.get(&kk) {
                        for &id in ids {
                            if dist3(&positions[id], e) <= tol && best.is_none_or(|b| id < b) {
                                best = Some(id);
                            }
                        }
                    }
                }
            }
        }
        best
    }
}

pub(crate) fn dist3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.to_affine() {
            None => s.serialize_str("inf"),
            Some(c) => {
                let mut t = s.serialize_tuple(2)?;
                t.serialize_element(&c.re)?;
                t.serialize_element(&c.im)?;
                t.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for SpherePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct PointVisitor;
        impl<'de> Visitor<'de> for PointVisitor {
            type Value = SpherePoint;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("\"inf\" or [re, im]")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<SpherePoint, E> {
                if v == "inf" {
                    Ok(SpherePoint::infinity())
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
            fn visit_seq<A: de::SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<SpherePoint, A::Error> {
                let re: f64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let im: f64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                Ok(SpherePoint::from_affine(Complex64::new(re, im)))
            }
        }
        d.deserialize_any(PointVisitor)
    }
}
