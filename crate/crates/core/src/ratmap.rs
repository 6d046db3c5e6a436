//! Rational maps of the Riemann sphere: evaluation, preimages, branched
//! points, exceptional points and orbits.

use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::ExactPoly;
use crate::measure::{AtomicMeasure, TransferSystem};
use crate::polyroots::{self, Poly};
use crate::projective::{chordal_distance, cluster, SpherePoint};
use crate::Settings;

const EPS: f64 = f64::EPSILON;

/// Chordal tolerance for the self-consistency checks of the structure.
const CHECK_TOL: f64 = 1e-6;

/// `R = P/Q` with coprime exact coefficients, `Q` monic, degree `N ≥ 2`.
#[derive(Clone, Debug)]
pub struct RationalMap {
    p_exact: ExactPoly,
    q_exact: ExactPoly,
    p: Poly,
    q: Poly,
    degree: usize,
    settings: Settings,
    branch: BranchData,
    exceptional: ExceptionalReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchPoint {
    pub point: SpherePoint,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchData {
    pub branch_points: Vec<BranchPoint>,
    pub branch_values: Vec<SpherePoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExceptionalCase {
    Empty,
    OneFixed,
    TwoFixed,
    TwoSwapped,
}

impl fmt::Display for ExceptionalCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ExceptionalCase::Empty => "Empty",
            ExceptionalCase::OneFixed => "OneFixed",
            ExceptionalCase::TwoFixed => "TwoFixed",
            ExceptionalCase::TwoSwapped => "TwoSwapped",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExceptionalReport {
    pub points: Vec<SpherePoint>,
    pub case: ExceptionalCase,
    /// Grand orbits within the exceptional set.
    pub orbit_classes: Vec<Vec<SpherePoint>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weighting {
    /// Path counts: level `k` is `Fᵏ(δ_z)`.
    SetCount,
    /// `N⁻ⁿ e(x) e(R(x)) ⋯ e(Rⁿ⁻¹(x))` summed over paths; each level has mass 1.
    IndexWeighted,
}

/// Levels of a backward orbit; level `k` is a measure on `R⁻ᵏ(z)`.
#[derive(Clone, Debug)]
pub struct OrbitTree {
    pub levels: Vec<AtomicMeasure<SpherePoint>>,
    /// Set when the atom budget stopped the expansion early.
    pub truncated: bool,
}

impl RationalMap {
    /// Reduces `P/Q` by their gcd and checks the degree.
    pub fn new(p: ExactPoly, q: ExactPoly) -> Result<Self> {
        Self::with_settings(p, q, Settings::default())
    }

    pub fn with_settings(p: ExactPoly, q: ExactPoly, settings: Settings) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::DivisionByZeroPolynomial);
        }
        if p.is_zero() {
            return Err(Error::DegreeTooLow(0));
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p.div_rem(&g).expect("gcd nonzero").0, q.div_rem(&g).expect("gcd nonzero").0);
        let lead = q.leading().expect("q nonzero").clone();
        let inv = crate::exact::gq_int(1) / lead;
        p = p.scale(&inv);
        q = q.scale(&inv);
        let degree = p.degree().unwrap_or(0).max(q.degree().unwrap_or(0));
        if degree < 2 {
            return Err(Error::DegreeTooLow(degree));
        }
        let mut map = RationalMap {
            p: p.to_poly(),
            q: q.to_poly(),
            p_exact: p,
            q_exact: q,
            degree,
            settings,
            branch: BranchData { branch_points: Vec::new(), branch_values: Vec::new() },
            exceptional: ExceptionalReport {
                points: Vec::new(),
                case: ExceptionalCase::Empty,
                orbit_classes: Vec::new(),
            },
        };
        map.branch = map.compute_branch_data()?;
        map.exceptional = map.compute_exceptional();
        Ok(map)
    }

    /// Map with integer coefficients, ascending.
    pub fn from_i64(p: &[i64], q: &[i64]) -> Result<Self> {
        Self::new(ExactPoly::from_i64(p), ExactPoly::from_i64(q))
    }

    /// Map from floating coefficients, taken as exact binary rationals.
    pub fn from_f64(p: &[Complex64], q: &[Complex64]) -> Result<Self> {
        let conv = |c: &[Complex64]| {
            ExactPoly::from_f64(c).ok_or_else(|| Error::InvalidInput("non-finite coefficient".into()))
        };
        Self::new(conv(p)?, conv(q)?)
    }

    /// `z^n` for `n ≥ 2`, or `z^{−|n|}` for `n ≤ −2`.
    pub fn power(n: i32) -> Result<Self> {
        let mono = |k: usize| {
            let mut c = vec![0i64; k + 1];
            c[k] = 1;
            ExactPoly::from_i64(&c)
        };
        let k = n.unsigned_abs() as usize;
        if n >= 0 {
            Self::new(mono(k), ExactPoly::one())
        } else {
            Self::new(ExactPoly::one(), mono(k))
        }
    }

    pub fn settings(&self) -> Settings {
        self.settings
    }

    pub fn numerator(&self) -> &ExactPoly {
        &self.p_exact
    }

    pub fn denominator(&self) -> &ExactPoly {
        &self.q_exact
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `[P(z,w) : Q(z,w)]` with both polynomials homogenized to degree `N`.
    pub fn evaluate(&self, x: &SpherePoint) -> SpherePoint {
        let (z, w) = x.coords();
        let n = self.degree;
        let mut zp = vec![Complex64::new(1.0, 0.0); n + 1];
        let mut wp = vec![Complex64::new(1.0, 0.0); n + 1];
        for k in 1..=n {
            zp[k] = zp[k - 1] * z;
            wp[k] = wp[k - 1] * w;
        }
        let hom = |poly: &Poly| -> Complex64 { (0..=n).map(|i| poly.coeff(i) * zp[i] * wp[n - i]).sum() };
        let (a, b) = (hom(&self.p), hom(&self.q));
        SpherePoint::new(a, b).unwrap_or_else(|| {
            // both vanish only through underflow; fall back to the affine chart
            match x.to_affine() {
                Some(c) if self.q.eval(c) != Complex64::zero() => {
                    SpherePoint::from_affine(self.p.eval(c) / self.q.eval(c))
                }
                _ => SpherePoint::infinity(),
            }
        })
    }

    pub fn forward_orbit(&self, z: &SpherePoint, n: usize) -> Vec<SpherePoint> {
        let mut out = Vec::with_capacity(n + 1);
        let mut cur = *z;
        out.push(cur);
        for _ in 0..n {
            cur = self.evaluate(&cur);
            out.push(cur);
        }
        out
    }

    /// Distinct preimages of `y` with local degrees; the degrees sum to `N`.
    pub fn preimages(&self, y: &SpherePoint, tol: f64) -> Result<Vec<(SpherePoint, usize)>> {
        let (zy, wy) = y.coords();
        let n = self.degree;
        let mut c: Vec<Complex64> = (0..=n).map(|i| wy * self.p.coeff(i) - zy * self.q.coeff(i)).collect();
        // top coefficients at roundoff level mean roots at infinity
        let mut top = n;
        while top > 0 {
            let noise = 8.0 * EPS * (wy.norm() * self.p.coeff(top).norm() + zy.norm() * self.q.coeff(top).norm());
            if c[top].norm() <= noise {
                c[top] = Complex64::zero();
                top -= 1;
            } else {
                break;
            }
        }
        let at_inf = n - top;
        let mut pts: Vec<SpherePoint> = Vec::with_capacity(n);
        if top > 0 {
            c.truncate(top + 1);
            // solve in the chart where the roots are small on average
            if c[0].norm() <= c[top].norm() {
                for (r, m) in polyroots::roots(&Poly::new(c), tol)? {
                    pts.extend(std::iter::repeat_n(SpherePoint::from_affine(r), m));
                }
            } else {
                let rev: Vec<Complex64> = c.iter().rev().copied().collect();
                for (u, m) in polyroots::roots(&Poly::new(rev), tol)? {
                    let p = SpherePoint::new(Complex64::new(1.0, 0.0), u).unwrap_or_else(SpherePoint::infinity);
                    pts.extend(std::iter::repeat_n(p, m));
                }
            }
        }
        pts.extend(std::iter::repeat_n(SpherePoint::infinity(), at_inf));
        let mut out = cluster(&pts, tol);
        out.sort_by(|a, b| crate::measure::Support::order(&a.0, &b.0));
        Ok(out)
    }

    pub fn branch_data(&self) -> &BranchData {
        &self.branch
    }

    pub fn branch_points(&self) -> Vec<SpherePoint> {
        self.branch.branch_points.iter().map(|b| b.point).collect()
    }

    /// Branch index of `x`: `e ≥ 2` at branched points, otherwise 1.
    pub fn branch_index(&self, x: &SpherePoint) -> usize {
        self.branch
            .branch_points
            .iter()
            .find(|b| chordal_distance(&b.point, x) <= self.settings.tol.max(1e-9))
            .map_or(1, |b| b.index)
    }

    pub fn is_branch_point(&self, x: &SpherePoint) -> bool {
        self.branch_index(x) > 1
    }

    pub fn exceptional_points(&self) -> &ExceptionalReport {
        &self.exceptional
    }

    pub fn is_exceptional(&self, x: &SpherePoint) -> bool {
        self.exceptional.points.iter().any(|e| chordal_distance(e, x) <= self.settings.tol.max(1e-9))
    }

    /// Wronskian `P′Q − PQ′`, whose zeros are the finite branched points.
    pub fn wronskian(&self) -> ExactPoly {
        self.p_exact.derivative().mul(&self.q_exact).sub(&self.p_exact.mul(&self.q_exact.derivative()))
    }

    fn compute_branch_data(&self) -> Result<BranchData> {
        let n = self.degree;
        let tol = self.settings.tol;
        let mut bps: Vec<BranchPoint> = Vec::new();
        let mut count = 0usize;
        for (factor, k) in self.wronskian().squarefree_decomposition() {
            let d = factor.degree().unwrap_or(0);
            count += k * d;
            for (r, m) in polyroots::roots(&factor.to_poly(), tol)? {
                if m != 1 {
                    return Err(Error::InternalConsistency(format!(
                        "square-free factor has a numerically multiple root near {r}"
                    )));
                }
                bps.push(BranchPoint { point: SpherePoint::from_affine(r), index: k + 1 });
            }
        }
        // at infinity: conjugate by 1/z, giving Q^rev / P^rev near 0
        let pr = self.p_exact.reversed(n);
        let qr = self.q_exact.reversed(n);
        let w_inf = qr.derivative().mul(&pr).sub(&qr.mul(&pr.derivative()));
        let ord = w_inf.zero_order();
        if ord > 0 {
            count += ord;
            bps.push(BranchPoint { point: SpherePoint::infinity(), index: ord + 1 });
        }
        if count != 2 * n - 2 {
            return Err(Error::InternalConsistency(format!(
                "Riemann-Hurwitz count {count} differs from 2N-2 = {}",
                2 * n - 2
            )));
        }
        bps.sort_by(|a, b| crate::measure::Support::order(&a.point, &b.point));

        for b in &bps {
            let y = self.evaluate(&b.point);
            let pre = self.preimages(&y, tol)?;
            let hit = pre.iter().filter(|(x, _)| chordal_distance(x, &b.point) <= CHECK_TOL).map(|(_, m)| *m).max();
            if hit != Some(b.index) {
                return Err(Error::InternalConsistency(format!(
                    "branch index {} at {} disagrees with preimage multiplicity {:?}",
                    b.index, b.point, hit
                )));
            }
        }
        let values: Vec<SpherePoint> = bps.iter().map(|b| self.evaluate(&b.point)).collect();
        let mut branch_values: Vec<SpherePoint> = cluster(&values, tol).into_iter().map(|c| c.0).collect();
        branch_values.sort_by(crate::measure::Support::order);
        Ok(BranchData { branch_points: bps, branch_values })
    }

    /// Certificate: a totally ramified `z` with unique preimage `u` is
    /// exceptional iff `R⁻¹(u)` is a single point in `{z, u}`.
    fn compute_exceptional(&self) -> ExceptionalReport {
        let n = self.degree;
        let tol = self.settings.tol;
        let near = |a: &SpherePoint, b: &SpherePoint| chordal_distance(a, b) <= CHECK_TOL;
        let mut points: Vec<SpherePoint> = Vec::new();
        for b in self.branch.branch_points.iter().filter(|b| b.index == n) {
            let z = b.point;
            // the unique preimage of z, if z is a totally ramified value
            let Ok(pre) = self.preimages(&z, tol) else { continue };
            if pre.len() != 1 {
                continue;
            }
            let u = pre[0].0;
            let Ok(pre_u) = self.preimages(&u, tol) else { continue };
            if pre_u.len() == 1
                && (near(&pre_u[0].0, &z) || near(&pre_u[0].0, &u))
                && !points.iter().any(|p| near(p, &z))
            {
                points.push(z);
            }
        }
        points.sort_by(crate::measure::Support::order);
        let fixed = |p: &SpherePoint| near(&self.evaluate(p), p);
        let (case, orbit_classes) = match points.len() {
            0 => (ExceptionalCase::Empty, Vec::new()),
            1 => (ExceptionalCase::OneFixed, vec![points.clone()]),
            _ if points.iter().all(fixed) => (ExceptionalCase::TwoFixed, points.iter().map(|p| vec![*p]).collect()),
            _ => (ExceptionalCase::TwoSwapped, vec![points.clone()]),
        };
        ExceptionalReport { points, case, orbit_classes }
    }

    /// Backward orbit of `z` to the given depth.
    pub fn backward_orbit(&self, z: &SpherePoint, depth: usize, weighting: Weighting) -> Result<OrbitTree> {
        if weighting == Weighting::IndexWeighted && self.is_exceptional(z) {
            return Err(Error::ExceptionalSeed);
        }
        let budget = self.settings.atom_budget;
        let mut levels = vec![AtomicMeasure::dirac(*z)];
        let mut total = 1usize;
        let mut truncated = false;
        for _ in 0..depth {
            let next = self.expand(levels.last().expect("nonempty"), weighting)?;
            if total + next.len() > budget {
                truncated = true;
                break;
            }
            total += next.len();
            levels.push(next);
        }
        Ok(OrbitTree { levels, truncated })
    }

    fn expand(&self, level: &AtomicMeasure<SpherePoint>, weighting: Weighting) -> Result<AtomicMeasure<SpherePoint>> {
        let tol = self.settings.tol;
        let fibers: Vec<Vec<(SpherePoint, usize)>> = if level.len() < 64 {
            level.atoms().iter().map(|(y, _)| self.preimages(y, tol)).collect::<Result<_>>()?
        } else {
            level.atoms().par_iter().map(|(y, _)| self.preimages(y, tol)).collect::<Result<_>>()?
        };
        let n = self.degree as f64;
        let mut atoms = Vec::new();
        for ((_, w), fib) in level.atoms().iter().zip(fibers) {
            for (x, e) in fib {
                let weight = match weighting {
                    Weighting::SetCount => *w,
                    Weighting::IndexWeighted => w * e as f64 / n,
                };
                atoms.push((x, weight));
            }
        }
        Ok(AtomicMeasure::from_atoms(atoms, tol))
    }

    /// Report fragment with degree, branch data and exceptional set.
    pub fn report_json(&self) -> Value {
        let ex = &self.exceptional;
        json!({
            "map": {"numerator": self.p_exact.to_string(), "denominator": self.q_exact.to_string()},
            "degree": self.degree,
            "branch_points": self.branch.branch_points,
            "branch_values": self.branch.branch_values,
            "exceptional": {
                "points": ex.points,
                "case": ex.case,
                "orbit_classes": ex.orbit_classes,
            },
        })
    }
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.p_exact, self.q_exact)
    }
}

impl TransferSystem for RationalMap {
    type Point = SpherePoint;

    fn fiber(&self, y: &SpherePoint) -> Result<Vec<(SpherePoint, usize)>> {
        self.preimages(y, self.settings.tol)
    }

    fn degree(&self) -> usize {
        self.degree
    }

    fn tol(&self) -> f64 {
        self.settings.tol
    }

    fn atom_budget(&self) -> usize {
        self.settings.atom_budget
    }

    fn branch_points(&self) -> Vec<SpherePoint> {
        RationalMap::branch_points(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(re: f64, im: f64) -> SpherePoint {
        SpherePoint::from_affine(Complex64::new(re, im))
    }

    fn close(a: &SpherePoint, b: &SpherePoint) -> bool {
        chordal_distance(a, b) < 1e-10
    }

    fn z2_plus_1() -> RationalMap {
        RationalMap::from_i64(&[1, 0, 1], &[1]).unwrap()
    }

    #[test]
    fn construction_rules() {
        assert_eq!(RationalMap::from_i64(&[0, 1], &[1]).unwrap_err(), Error::DegreeTooLow(1));
        assert_eq!(RationalMap::from_i64(&[1], &[0]).unwrap_err(), Error::DivisionByZeroPolynomial);
        // (z^2 - 1)/(z - 1) reduces to z + 1
        assert_eq!(RationalMap::from_i64(&[-1, 0, 1], &[-1, 1]).unwrap_err(), Error::DegreeTooLow(1));
        let r = RationalMap::from_i64(&[0, 0, 0, 2], &[0, 2]).unwrap();
        assert_eq!(r.degree(), 2);
        assert_eq!(r.denominator(), &ExactPoly::one());
    }

    #[test]
    fn evaluate_examples() {
        let z2 = RationalMap::power(2).unwrap();
        assert!(z2.evaluate(&SpherePoint::infinity()).is_infinity());
        let inv = RationalMap::power(-2).unwrap();
        assert!(inv.evaluate(&SpherePoint::zero()).is_infinity());
        assert!(close(&inv.evaluate(&SpherePoint::infinity()), &SpherePoint::zero()));
        assert!(close(&z2_plus_1().evaluate(&sp(2.0, 0.0)), &sp(5.0, 0.0)));
    }

    #[test]
    fn preimage_examples() {
        let z2 = RationalMap::power(2).unwrap();
        let pre = z2.preimages(&sp(1.0, 0.0), 1e-8).unwrap();
        assert_eq!(pre.len(), 2);
        assert!(close(&pre[0].0, &sp(-1.0, 0.0)) && pre[0].1 == 1);
        assert!(close(&pre[1].0, &sp(1.0, 0.0)) && pre[1].1 == 1);

        let pre = z2.preimages(&SpherePoint::zero(), 1e-8).unwrap();
        assert_eq!(pre, vec![(SpherePoint::zero(), 2)]);

        let pre = z2_plus_1().preimages(&sp(1.0, 0.0), 1e-8).unwrap();
        assert_eq!(pre.len(), 1);
        assert!(close(&pre[0].0, &SpherePoint::zero()) && pre[0].1 == 2);

        let pre = z2_plus_1().preimages(&SpherePoint::infinity(), 1e-8).unwrap();
        assert_eq!(pre, vec![(SpherePoint::infinity(), 2)]);

        let inv = RationalMap::power(-2).unwrap();
        let pre = inv.preimages(&SpherePoint::zero(), 1e-8).unwrap();
        assert_eq!(pre, vec![(SpherePoint::infinity(), 2)]);
    }

    #[test]
    fn branch_examples() {
        for n in 2..=4 {
            let r = RationalMap::power(n).unwrap();
            let bd = r.branch_data();
            assert_eq!(bd.branch_points.len(), 2);
            assert!(close(&bd.branch_points[0].point, &SpherePoint::zero()));
            assert_eq!(bd.branch_points[0].index, n as usize);
            assert!(bd.branch_points[1].point.is_infinity());
            assert_eq!(bd.branch_points[1].index, n as usize);
            assert!(close(&bd.branch_values[0], &SpherePoint::zero()));
            assert!(bd.branch_values[1].is_infinity());
        }
        let bd = z2_plus_1().branch_data().clone();
        assert_eq!(bd.branch_points.iter().map(|b| b.index).collect::<Vec<_>>(), vec![2, 2]);
        assert!(close(&bd.branch_points[0].point, &SpherePoint::zero()));
        assert!(bd.branch_points[1].point.is_infinity());
        assert!(close(&bd.branch_values[0], &sp(1.0, 0.0)));
        assert!(bd.branch_values[1].is_infinity());

        let inv = RationalMap::power(-2).unwrap();
        let idx: Vec<usize> = inv.branch_data().branch_points.iter().map(|b| b.index).collect();
        assert_eq!(idx, vec![2, 2]);
    }

    #[test]
    fn pole_of_order_two_is_branched() {
        // (z^2 + 1) / z^2 : the double pole at 0 has index 2
        let r = RationalMap::from_i64(&[1, 0, 1], &[0, 0, 1]).unwrap();
        assert_eq!(r.branch_index(&SpherePoint::zero()), 2);
    }

    #[test]
    fn exceptional_examples() {
        for n in 2..=4 {
            let e = RationalMap::power(n).unwrap().exceptional_points().clone();
            assert_eq!(e.case, ExceptionalCase::TwoFixed);
            assert_eq!(e.orbit_classes.len(), 2);
            let e = RationalMap::power(-n).unwrap().exceptional_points().clone();
            assert_eq!(e.case, ExceptionalCase::TwoSwapped);
            assert_eq!(e.orbit_classes.len(), 1);
        }
        let e = z2_plus_1().exceptional_points().clone();
        assert_eq!(e.case, ExceptionalCase::OneFixed);
        assert_eq!(e.points.len(), 1);
        assert!(e.points[0].is_infinity());
        // z^2 - 2 (Chebyshev): infinity only; 0 is critical but its orbit is infinite
        let e = RationalMap::from_i64(&[-2, 0, 1], &[1]).unwrap().exceptional_points().clone();
        assert_eq!(e.case, ExceptionalCase::OneFixed);
        // generic quadratic rational map: none
        let e = RationalMap::from_i64(&[1, 0, 1], &[2, 3]).unwrap().exceptional_points().clone();
        assert_eq!(e.case, ExceptionalCase::Empty);
    }

    #[test]
    fn orbit_examples() {
        let z2 = RationalMap::power(2).unwrap();
        let o = z2.forward_orbit(&sp(2.0, 0.0), 3);
        for (p, v) in o.iter().zip([2.0, 4.0, 16.0, 256.0]) {
            assert!(close(p, &sp(v, 0.0)));
        }
        let inv = RationalMap::power(-2).unwrap();
        let o = inv.forward_orbit(&SpherePoint::zero(), 2);
        assert!(close(&o[0], &SpherePoint::zero()) && o[1].is_infinity() && close(&o[2], &SpherePoint::zero()));
        let o = z2_plus_1().forward_orbit(&SpherePoint::zero(), 3);
        for (p, v) in o.iter().zip([0.0, 1.0, 2.0, 5.0]) {
            assert!(close(p, &sp(v, 0.0)));
        }
    }

    #[test]
    fn backward_orbit_examples() {
        let z2 = RationalMap::power(2).unwrap();
        let t = z2.backward_orbit(&sp(1.0, 0.0), 2, Weighting::IndexWeighted).unwrap();
        assert_eq!(t.levels[2].len(), 4);
        for (p, w) in t.levels[2].atoms() {
            assert!((w - 0.25).abs() < 1e-15);
            let z = p.to_affine().unwrap();
            assert!((z.powu(4) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        let t = z2.backward_orbit(&SpherePoint::zero(), 2, Weighting::SetCount).unwrap();
        for lvl in &t.levels {
            assert_eq!(lvl.atoms(), &[(SpherePoint::zero(), 1.0)]);
        }
        let t = z2_plus_1().backward_orbit(&SpherePoint::zero(), 1, Weighting::SetCount).unwrap();
        assert_eq!(t.levels[1].len(), 2);
        assert!(close(&t.levels[1].atoms()[0].0, &sp(0.0, -1.0)));
        assert!(close(&t.levels[1].atoms()[1].0, &sp(0.0, 1.0)));
        assert_eq!(
            z2.backward_orbit(&SpherePoint::zero(), 2, Weighting::IndexWeighted).unwrap_err(),
            Error::ExceptionalSeed
        );
    }

    #[test]
    fn budget_truncates_orbits() {
        let settings = Settings { atom_budget: 20, ..Settings::default() };
        let r = RationalMap::with_settings(ExactPoly::from_i64(&[0, 0, 1]), ExactPoly::one(), settings).unwrap();
        let t = r.backward_orbit(&sp(1.0, 0.0), 10, Weighting::SetCount).unwrap();
        assert!(t.truncated);
        assert_eq!(t.levels.len(), 4); // 1 + 2 + 4 + 8 = 15 atoms
    }

    #[test]
    fn report_fragment() {
        let v = RationalMap::power(2).unwrap().report_json();
        assert_eq!(v["degree"], 2);
        assert_eq!(v["exceptional"]["case"], "TwoFixed");
        assert_eq!(v["branch_points"][1]["point"], "inf");
        assert_eq!(v["branch_points"][1]["index"], 2);
    }
}
