//! KMS measures, the trace conditions (K1)/(K2) and phase reports.
//!
//! The condition checks are written against [`TransferSystem`] and serve
//! both the rational and the self-similar engines.

mod rational;

use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure, Support, TestFunctionLibrary, TransferSystem};
use crate::projective::GridIndex;

pub use rational::{
    classify, classify_julia, divergence_witness, kms_measure, lyubich, lyubich_invariance_residual, WitnessReport,
};

/// `|β − log N|` below which β is treated as critical.
pub const CRITICAL_TOL: f64 = 1e-12;

/// Default chordal radius of the cutoff around branched points.
pub const DEFAULT_RHO: f64 = 1e-3;

/// Tail bound the automatic truncation depth aims for.
pub const AUTO_TAIL: f64 = 1e-6;

/// Inverse temperature, either numeric or exactly `log N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Beta {
    Value(f64),
    Critical,
}

impl From<f64> for Beta {
    fn from(b: f64) -> Self {
        Beta::Value(b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
    Zero,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Subcritical => "Subcritical",
            Regime::Critical => "Critical",
            Regime::Supercritical => "Supercritical",
            Regime::Zero => "Zero",
        })
    }
}

impl Beta {
    /// Numeric β and its regime for a system of degree `n`.
    pub fn resolve(self, n: usize) -> Result<(f64, Regime)> {
        let log_n = (n as f64).ln();
        match self {
            Beta::Critical => Ok((log_n, Regime::Critical)),
            Beta::Value(b) if !b.is_finite() || b < 0.0 => {
                Err(Error::InvalidInput(format!("beta must be finite and nonnegative, got {b}")))
            }
            Beta::Value(0.0) => Ok((0.0, Regime::Zero)),
            Beta::Value(b) if (b - log_n).abs() < CRITICAL_TOL => Ok((b, Regime::Critical)),
            Beta::Value(b) if b < log_n => Ok((b, Regime::Subcritical)),
            Beta::Value(b) => Ok((b, Regime::Supercritical)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StateKind {
    FiniteType,
    InfiniteType,
}

impl StateKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StateKind::FiniteType => "finite",
            StateKind::InfiniteType => "infinite",
        }
    }
}

/// What an extreme state is attached to.
#[derive(Clone, Debug, PartialEq)]
pub enum Anchor<P> {
    Point(P),
    /// An exceptional cycle carrying a single 0-KMS state.
    Class(Vec<P>),
    Lyubich,
    Hutchinson,
}

impl<P: Serialize> Anchor<P> {
    pub fn to_json(&self) -> Value {
        match self {
            Anchor::Point(p) => json!(p),
            Anchor::Class(ps) => json!(ps),
            Anchor::Lyubich => json!("lyubich"),
            Anchor::Hutchinson => json!("hutchinson"),
        }
    }
}

/// A constructed KMS measure: the restriction of an extreme state.
#[derive(Clone, Debug)]
pub struct KmsMeasure<P: Support> {
    /// Probability measure (total mass one).
    pub measure: AtomicMeasure<P>,
    pub anchor: P,
    pub beta: f64,
    pub kind: StateKind,
    /// `m` in `μ = m Σ_k e^{−kβ} Fᵏ(δ_w)`, from the truncated series.
    pub normalization: f64,
    pub truncation_depth: usize,
    /// Bound on the mass of the omitted tail, in units of `μ`.
    pub tail_bound: f64,
    /// Set when the series was summed exactly.
    pub closed_form: bool,
    pub warnings: Vec<String>,
}

impl<P: Support + Serialize> KmsMeasure<P> {
    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.as_str(),
            "anchor": self.anchor,
            "beta": self.beta,
            "normalization": self.normalization,
            "truncation_depth": self.truncation_depth,
            "tail_bound": self.tail_bound,
            "closed_form": self.closed_form,
            "total_mass": self.measure.mass(),
            "atom_count": self.measure.len(),
            "warnings": self.warnings,
        })
    }
}

/// Depth `d` with `r^{d+1} / (1 − r) ≤ target`, for `0 ≤ r < 1`.
pub fn depth_for_tail(r: f64, target: f64) -> usize {
    if r <= 0.0 {
        return 0;
    }
    let need = (target * (1.0 - r)).ln() / r.ln() - 1.0;
    need.ceil().max(0.0) as usize
}

/// `m r^{d+1} / (1 − r)`.
pub fn tail_bound(r: f64, depth: usize, normalization: f64) -> f64 {
    normalization * r.powi(depth as i32 + 1) / (1.0 - r)
}

/// One entry of a phase report.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremeState<P: Support> {
    pub kind: StateKind,
    pub anchor: Anchor<P>,
    /// Exact restriction when it is a finite sum.
    pub restriction: Option<AtomicMeasure<P>>,
}

impl<P> ExtremeState<P>
where
    P: Support + Serialize,
{
    pub fn to_json(&self) -> Value {
        let mut v = json!({"kind": self.kind.as_str(), "anchor": self.anchor.to_json()});
        if let Some(r) = &self.restriction {
            v["restriction"] = r.to_json();
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseReport<P: Support> {
    pub beta: f64,
    pub regime: Regime,
    pub states: Vec<ExtremeState<P>>,
    pub warnings: Vec<String>,
}

impl<P: Support> PhaseReport<P> {
    /// `(finite, infinite)` numbers of extreme states.
    pub fn counts(&self) -> (usize, usize) {
        let fin = self.states.iter().filter(|s| s.kind == StateKind::FiniteType).count();
        (fin, self.states.len() - fin)
    }
}

impl<P> PhaseReport<P>
where
    P: Support + Serialize,
{
    pub fn to_json(&self) -> Value {
        let (fin, inf) = self.counts();
        json!({
            "beta": self.beta,
            "regime": self.regime,
            "states": self.states.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
            "counts": {"finite": fin, "infinite": inf},
            "warnings": self.warnings,
        })
    }
}

/// Outcome of a trace-condition check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KReport {
    /// Largest library residual (K1) or violation (K2), each divided by the
    /// sup-norm of its test function.
    pub max_residual: f64,
    pub per_function: Vec<f64>,
    /// Largest defect in the point-mass form of the condition.
    pub point_mass_residual: f64,
    /// Mass of `μ` and of `e^{−β} F μ` within `2ρ` of the branched points,
    /// bounding the error the cutoff introduces.
    pub cutoff_error: f64,
    pub rho: f64,
}

/// Quintic smooth step: 0 within `ρ` of `B`, 1 beyond `2ρ`.
fn cutoff<P: Support>(x: &P, branch: &[P], rho: f64) -> f64 {
    let d = branch.iter().map(|b| b.distance(x)).fold(f64::INFINITY, f64::min);
    let t = ((d - rho) / rho).clamp(0.0, 1.0);
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

struct FiberTable<P> {
    fibers: Vec<Vec<(P, usize)>>,
}

fn fiber_table<S: TransferSystem>(sys: &S, mu: &AtomicMeasure<S::Point>) -> Result<FiberTable<S::Point>> {
    use rayon::prelude::*;
    let fibers = mu.atoms().par_iter().map(|(y, _)| sys.fiber(y)).collect::<Result<Vec<_>>>()?;
    Ok(FiberTable { fibers })
}

/// For every atom and every child of an atom: (point, `μ{x}`, mass of its
/// parents `Σ_{y : x over y} μ{y}`).
fn point_mass_balance<S: TransferSystem>(
    sys: &S,
    mu: &AtomicMeasure<S::Point>,
    table: &FiberTable<S::Point>,
) -> Vec<(S::Point, f64, f64)> {
    let tol = sys.tol();
    let mut pts: Vec<(S::Point, f64, f64)> = mu.atoms().iter().map(|&(p, w)| (p, w, 0.0)).collect();
    let mut pos: Vec<[f64; 3]> = pts.iter().map(|(p, _, _)| p.embed()).collect();
    let mut grid = GridIndex::new(tol);
    for (i, e) in pos.iter().enumerate() {
        grid.insert(e, i);
    }
    for ((_, w), fib) in mu.atoms().iter().zip(&table.fibers) {
        for (x, _) in fib {
            let e = x.embed();
            match grid.nearest_within(&e, tol, &pos) {
                Some(i) => pts[i].2 += w,
                None => {
                    grid.insert(&e, pos.len());
                    pos.push(e);
                    pts.push((*x, 0.0, *w));
                }
            }
        }
    }
    pts
}

fn is_branch<P: Support>(x: &P, branch: &[P], tol: f64) -> bool {
    branch.iter().any(|b| b.distance(x) <= tol.max(1e-9))
}

fn cutoff_error<S: TransferSystem>(
    mu: &AtomicMeasure<S::Point>,
    table: &FiberTable<S::Point>,
    branch: &[S::Point],
    beta: f64,
    rho: f64,
) -> f64 {
    let near = |x: &S::Point| branch.iter().any(|b| b.distance(x) < 2.0 * rho);
    let direct: f64 = mu.atoms().iter().filter(|(p, _)| near(p)).map(|a| a.1).sum();
    let pulled: f64 = mu
        .atoms()
        .iter()
        .zip(&table.fibers)
        .map(|((_, w), fib)| w * fib.iter().filter(|(x, _)| near(x)).count() as f64)
        .sum();
    direct + (-beta).exp() * pulled
}

/// (K1): `e^{−β} ∫ ã dμ = ∫ a dμ` for `a` vanishing near the branched
/// points, with `a = f · cutoff` for each library function `f`; together
/// with the point-mass form `e^{−β} μ{R(x)} = μ{x}` off the branched points.
pub fn check_k1<S: TransferSystem>(
    sys: &S,
    mu: &AtomicMeasure<S::Point>,
    beta: f64,
    lib: &TestFunctionLibrary,
    rho: f64,
) -> Result<KReport> {
    let branch = sys.branch_points();
    let table = fiber_table(sys, mu)?;
    let eb = (-beta).exp();
    let cut_vals = |x: &S::Point| -> Vec<f64> {
        let c = cutoff(x, &branch, rho);
        if c == 0.0 {
            return vec![0.0; lib.len()];
        }
        lib.eval_all(x).into_iter().map(|v| v * c).collect()
    };
    let mut lhs = vec![0.0; lib.len()];
    let mut rhs = vec![0.0; lib.len()];
    for ((y, w), fib) in mu.atoms().iter().zip(&table.fibers) {
        for (i, v) in cut_vals(y).into_iter().enumerate() {
            rhs[i] += w * v;
        }
        for (x, _) in fib {
            for (i, v) in cut_vals(x).into_iter().enumerate() {
                lhs[i] += eb * w * v;
            }
        }
    }
    let per_function: Vec<f64> = (0..lib.len()).map(|i| (lhs[i] - rhs[i]).abs() / lib.sup_norm(i)).collect();
    let max_residual = per_function.iter().copied().fold(0.0, f64::max);
    let point_mass_residual = point_mass_balance(sys, mu, &table)
        .into_iter()
        .filter(|(x, _, _)| !is_branch(x, &branch, sys.tol()))
        .map(|(_, own, parent)| (eb * parent - own).abs())
        .fold(0.0, f64::max);
    Ok(KReport {
        max_residual,
        per_function,
        point_mass_residual,
        cutoff_error: cutoff_error::<S>(mu, &table, &branch, beta, rho),
        rho,
    })
}

/// (K2): `e^{−β} ∫ ã dμ ≤ ∫ a dμ` for the nonnegative functions
/// `a = ‖f‖ ± f`; together with `e^{−β} μ{R(x)} ≤ μ{x}` everywhere.
pub fn check_k2<S: TransferSystem>(
    sys: &S,
    mu: &AtomicMeasure<S::Point>,
    beta: f64,
    lib: &TestFunctionLibrary,
) -> Result<KReport> {
    let table = fiber_table(sys, mu)?;
    let eb = (-beta).exp();
    let n = lib.len();
    // ∫ f dμ and ∫ f̃ dμ, plus the masses they are shifted by
    let mut direct = vec![0.0; n];
    let mut pulled = vec![0.0; n];
    let mut mass = 0.0;
    let mut pulled_mass = 0.0;
    for ((y, w), fib) in mu.atoms().iter().zip(&table.fibers) {
        mass += w;
        for (i, v) in lib.eval_all(y).into_iter().enumerate() {
            direct[i] += w * v;
        }
        for (x, _) in fib {
            pulled_mass += w;
            for (i, v) in lib.eval_all(x).into_iter().enumerate() {
                pulled[i] += w * v;
            }
        }
    }
    let per_function: Vec<f64> = (0..n)
        .map(|i| {
            let s = lib.sup_norm(i);
            let plus = eb * (s * pulled_mass + pulled[i]) - (s * mass + direct[i]);
            let minus = eb * (s * pulled_mass - pulled[i]) - (s * mass - direct[i]);
            plus.max(minus).max(0.0) / s
        })
        .collect();
    let max_residual = per_function.iter().copied().fold(0.0, f64::max);
    let point_mass_residual = point_mass_balance(sys, mu, &table)
        .into_iter()
        .map(|(_, own, parent)| (eb * parent - own).max(0.0))
        .fold(0.0, f64::max);
    Ok(KReport { max_residual, per_function, point_mass_residual, cutoff_error: 0.0, rho: 0.0 })
}
