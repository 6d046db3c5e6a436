//! Finitely atomic measures and the transfer operators acting on them.

mod library;
mod transfer;

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::projective::{dist3, GridIndex, SpherePoint};

pub use library::{weak_star_distance, TestFunctionLibrary};
pub use transfer::{apply_f_beta, decompose_trace, pullback_f, pullback_g, tilde, Decomposition, TransferSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    Sphere,
    Plane,
}

/// A space measures can live on. Points are compared, merged and fed to
/// test functions through an embedding into ℝ³.
pub trait Support: Copy + Send + Sync + fmt::Debug + PartialEq + 'static {
    const SPACE: Space;

    fn embed(&self) -> [f64; 3];

    fn from_embedding(e: [f64; 3]) -> Self;

    /// Total order used to make merges and outputs deterministic.
    fn order(&self, other: &Self) -> Ordering;

    fn distance(&self, other: &Self) -> f64 {
        dist3(&self.embed(), &other.embed())
    }
}

impl Support for SpherePoint {
    const SPACE: Space = Space::Sphere;

    fn embed(&self) -> [f64; 3] {
        SpherePoint::embed(self)
    }

    fn from_embedding(e: [f64; 3]) -> Self {
        SpherePoint::from_embedding(e)
    }

    /// Finite points by `(re, im)`, infinity last.
    fn order(&self, other: &Self) -> Ordering {
        match (self.to_affine(), other.to_affine()) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
            (Some(a), Some(b)) => a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)),
        }
    }
}

/// A point of the line or the plane; one-dimensional systems use `y = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub const fn new(x: f64, y: f64) -> Self {
        PlanePoint { x, y }
    }
}

impl fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Support for PlanePoint {
    const SPACE: Space = Space::Plane;

    fn embed(&self) -> [f64; 3] {
        [self.x, self.y, 0.0]
    }

    fn from_embedding(e: [f64; 3]) -> Self {
        PlanePoint { x: e[0], y: e[1] }
    }

    fn order(&self, other: &Self) -> Ordering {
        self.x.total_cmp(&other.x).then(self.y.total_cmp(&other.y))
    }

    fn distance(&self, other: &Self) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// `Σ wᵢ δ_{xᵢ}` with positive weights and atoms separated by more than the
/// merge tolerance they were built with. Atoms are kept in [`Support::order`].
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicMeasure<P: Support> {
    atoms: Vec<(P, f64)>,
}

impl<P: Support> Default for AtomicMeasure<P> {
    fn default() -> Self {
        AtomicMeasure::zero()
    }
}

impl<P: Support> AtomicMeasure<P> {
    pub fn zero() -> Self {
        AtomicMeasure { atoms: Vec::new() }
    }

    pub fn dirac(p: P) -> Self {
        AtomicMeasure { atoms: vec![(p, 1.0)] }
    }

    /// Builds a measure from raw atoms, merging those within `tol`.
    ///
    /// Atoms are sorted first so the result does not depend on input order.
    /// A merged atom sits at the weight-averaged embedding of its members and
    /// carries their summed weight. Non-positive weights are discarded.
    pub fn from_atoms(mut atoms: Vec<(P, f64)>, tol: f64) -> Self {
        atoms.retain(|a| a.1 > 0.0);
        atoms.sort_by(|a, b| a.0.order(&b.0));
        if tol <= 0.0 {
            return AtomicMeasure { atoms };
        }
        let mut grid = GridIndex::new(tol);
        let mut leaders: Vec<[f64; 3]> = Vec::new();
        let mut groups: Vec<Vec<(P, f64)>> = Vec::new();
        for (p, w) in atoms {
            let e = p.embed();
            match grid.nearest_within(&e, tol, &leaders) {
                Some(k) => groups[k].push((p, w)),
                None => {
                    grid.insert(&e, leaders.len());
                    leaders.push(e);
                    groups.push(vec![(p, w)]);
                }
            }
        }
        let mut out: Vec<(P, f64)> = groups
            .into_iter()
            .map(|g| {
                if g.len() == 1 {
                    return g[0];
                }
                let total: f64 = g.iter().map(|a| a.1).sum();
                let mut e = [0.0; 3];
                for (p, w) in &g {
                    let pe = p.embed();
                    for k in 0..3 {
                        e[k] += w * pe[k];
                    }
                }
                for v in &mut e {
                    *v /= total;
                }
                (P::from_embedding(e), total)
            })
            .collect();
        out.sort_by(|a, b| a.0.order(&b.0));
        AtomicMeasure { atoms: out }
    }

    pub fn atoms(&self) -> &[(P, f64)] {
        &self.atoms
    }

    pub fn into_atoms(self) -> Vec<(P, f64)> {
        self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn integrate(&self, f: impl Fn(&P) -> f64) -> f64 {
        self.atoms.iter().map(|(p, w)| w * f(p)).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        if s <= 0.0 {
            return AtomicMeasure::zero();
        }
        AtomicMeasure { atoms: self.atoms.iter().map(|&(p, w)| (p, w * s)).collect() }
    }

    pub fn add(&self, other: &Self, tol: f64) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        AtomicMeasure::from_atoms(atoms, tol)
    }

    /// Scaled to total mass one; the zero measure is returned unchanged.
    pub fn normalized(&self) -> Self {
        let m = self.mass();
        if m > 0.0 {
            self.scale(1.0 / m)
        } else {
            self.clone()
        }
    }

    /// Total weight of atoms within `tol` of `p`.
    pub fn weight_near(&self, p: &P, tol: f64) -> f64 {
        self.atoms.iter().filter(|(q, _)| q.distance(p) <= tol).map(|a| a.1).sum()
    }

    pub fn to_json(&self) -> Value
    where
        P: Serialize,
    {
        let atoms: Vec<Value> = self.atoms.iter().map(|(p, w)| json!({"point": p, "weight": w})).collect();
        json!({"atoms": atoms, "total_mass": self.mass()})
    }
}

impl AtomicMeasure<SpherePoint> {
    /// CSV with columns `re, im, is_inf, weight, level`.
    pub fn write_csv<W: Write>(&self, out: W, level: Option<usize>) -> csv::Result<()> {
        write_sphere_csv(out, self.atoms.iter().map(|&(p, w)| (p, w, level)))
    }
}

impl AtomicMeasure<PlanePoint> {
    /// CSV with columns `x, y, weight`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut wr = csv::Writer::from_writer(out);
        wr.write_record(["x", "y", "weight"])?;
        for (p, w) in &self.atoms {
            wr.serialize((p.x, p.y, w))?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Writes sphere atoms, optionally tagged by level, as CSV.
pub fn write_sphere_csv<W: Write>(
    out: W,
    rows: impl IntoIterator<Item = (SpherePoint, f64, Option<usize>)>,
) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["re", "im", "is_inf", "weight", "level"])?;
    for (p, w, level) in rows {
        let (re, im, inf) = match p.to_affine() {
            Some(c) => (c.re, c.im, 0u8),
            None => (0.0, 0.0, 1u8),
        };
        wr.serialize((re, im, inf, w, level))?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn sp(re: f64, im: f64) -> SpherePoint {
        SpherePoint::from_affine(Complex64::new(re, im))
    }

    #[test]
    fn integrate_examples() {
        let d0 = AtomicMeasure::dirac(SpherePoint::zero());
        assert_eq!(d0.integrate(|_| 1.0), 1.0);

        let sym = AtomicMeasure::from_atoms(vec![(sp(1.0, 0.0), 0.5), (sp(-1.0, 0.0), 0.5)], 1e-8);
        assert!(sym.integrate(|p| p.embed()[0]).abs() < 1e-15);

        let two = AtomicMeasure::from_atoms(vec![(SpherePoint::zero(), 0.3), (SpherePoint::infinity(), 0.7)], 1e-8);
        assert!((two.integrate(|_| 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn merge_sums_and_orders() {
        let m = AtomicMeasure::from_atoms(
            vec![
                (SpherePoint::infinity(), 1.0),
                (sp(1.0, 0.0), 0.25),
                (sp(1.0 + 1e-13, 0.0), 0.25),
                (sp(-2.0, 0.0), 1.0),
                (sp(3.0, 0.0), 0.0),
            ],
            1e-8,
        );
        assert_eq!(m.len(), 3);
        assert!(m.atoms()[0].0.to_affine().unwrap().re < 0.0);
        assert!((m.atoms()[1].1 - 0.5).abs() < 1e-15);
        assert!(m.atoms()[2].0.is_infinity());
        assert!((m.mass() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn merge_is_order_independent() {
        let a = vec![(sp(0.1, 0.2), 1.0), (sp(0.1, 0.2 + 1e-12), 2.0), (sp(5.0, 1.0), 3.0)];
        let mut b = a.clone();
        b.reverse();
        assert_eq!(AtomicMeasure::from_atoms(a, 1e-8), AtomicMeasure::from_atoms(b, 1e-8));
    }

    #[test]
    fn csv_dump() {
        let m = AtomicMeasure::from_atoms(vec![(SpherePoint::infinity(), 0.5), (sp(1.0, -1.0), 0.5)], 1e-8);
        let mut buf = Vec::new();
        m.write_csv(&mut buf, Some(2)).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "re,im,is_inf,weight,level\n1.0,-1.0,0,0.5,2\n0.0,0.0,1,0.5,2\n");
    }

    #[test]
    fn json_dump() {
        let m = AtomicMeasure::dirac(SpherePoint::infinity());
        let v = m.to_json();
        assert_eq!(v["atoms"][0]["point"], "inf");
        assert_eq!(v["total_mass"], 1.0);
    }
}
