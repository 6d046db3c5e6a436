//! Transfer operators on atomic measures, written once for every system
//! that can list the fibre over a point.

use rayon::prelude::*;

use super::{weak_star_distance, AtomicMeasure, Support, TestFunctionLibrary};
use crate::error::{Error, Result};
use crate::projective::GridIndex;

/// Below this many atoms the fibres are computed serially.
const PAR_THRESHOLD: usize = 64;

/// Atoms of `μ − F_β μ` above this (negative) weight are clipped to zero.
const CLIP: f64 = 1e-6;

/// A finite-to-one correspondence `y ↦ {x}` with multiplicities: the
/// preimages of a rational map, or the images `γᵢ(y)` of an IFS.
pub trait TransferSystem: Sync {
    type Point: Support;

    /// Distinct points over `y` with their multiplicities; multiplicities sum
    /// to [`TransferSystem::degree`].
    fn fiber(&self, y: &Self::Point) -> Result<Vec<(Self::Point, usize)>>;

    fn degree(&self) -> usize;

    /// Merge tolerance for atoms.
    fn tol(&self) -> f64;

    fn atom_budget(&self) -> usize;

    /// Points where the fibre multiplicity can exceed one.
    fn branch_points(&self) -> Vec<Self::Point>;
}

type Fiber<P> = Vec<(P, usize)>;

fn fibers<S: TransferSystem>(sys: &S, mu: &AtomicMeasure<S::Point>) -> Result<Vec<Fiber<S::Point>>> {
    if mu.len() < PAR_THRESHOLD {
        mu.atoms().iter().map(|(y, _)| sys.fiber(y)).collect()
    } else {
        mu.atoms().par_iter().map(|(y, _)| sys.fiber(y)).collect()
    }
}

fn pull<S: TransferSystem>(sys: &S, mu: &AtomicMeasure<S::Point>, weighted: bool) -> Result<AtomicMeasure<S::Point>> {
    let fib = fibers(sys, mu)?;
    let budget = sys.atom_budget();
    let mut out = Vec::new();
    for ((_, w), xs) in mu.atoms().iter().zip(fib) {
        for (x, e) in xs {
            out.push((x, if weighted { w * e as f64 } else { *w }));
        }
        if out.len() > budget {
            return Err(Error::AtomBudgetExceeded(budget));
        }
    }
    Ok(AtomicMeasure::from_atoms(out, sys.tol()))
}

/// `F(δ_y) = Σ_{x over y} δ_x`, distinct points counted once.
pub fn pullback_f<S: TransferSystem>(sys: &S, mu: &AtomicMeasure<S::Point>) -> Result<AtomicMeasure<S::Point>> {
    pull(sys, mu, false)
}

/// Multiplicity-weighted pullback `Σ e(x) δ_x`; multiplies mass by the
/// degree.
pub fn pullback_g<S: TransferSystem>(sys: &S, mu: &AtomicMeasure<S::Point>) -> Result<AtomicMeasure<S::Point>> {
    pull(sys, mu, true)
}

/// `F_β = e^{−β} F`.
pub fn apply_f_beta<S: TransferSystem>(
    sys: &S,
    mu: &AtomicMeasure<S::Point>,
    beta: f64,
) -> Result<AtomicMeasure<S::Point>> {
    Ok(pullback_f(sys, mu)?.scale((-beta).exp()))
}

/// `f̃(y) = Σ_{x over y} f(x)` over distinct points.
pub fn tilde<S: TransferSystem>(sys: &S, f: impl Fn(&S::Point) -> f64, y: &S::Point) -> Result<f64> {
    Ok(sys.fiber(y)?.iter().map(|(x, _)| f(x)).sum())
}

/// Split of a sub-invariant measure into finite and infinite type parts.
#[derive(Clone, Debug)]
pub struct Decomposition<P: Support> {
    pub finite: AtomicMeasure<P>,
    pub infinite: AtomicMeasure<P>,
    /// Library distance between `μ` and `finite + infinite`.
    pub residual: f64,
    /// Total negative weight dropped from `μ − F_β μ`.
    pub clipped: f64,
    /// Set when `μ` was not atom-wise sub-invariant but is `F_β`-invariant
    /// to within [`WEAK_INVARIANCE_TOL`] in library distance, as atomic
    /// approximants of diffuse invariant measures are.
    pub weakly_invariant: bool,
}

/// Library tolerance for treating an approximant as `F_β`-invariant.
pub const WEAK_INVARIANCE_TOL: f64 = 1e-3;

/// `μ − ν` atom by atom, matching atoms within `tol`.
fn signed_difference<P: Support>(mu: &AtomicMeasure<P>, nu: &AtomicMeasure<P>, tol: f64) -> Vec<(P, f64)> {
    let mut out: Vec<(P, f64)> = mu.atoms().to_vec();
    let pos: Vec<[f64; 3]> = out.iter().map(|(p, _)| p.embed()).collect();
    let mut grid = GridIndex::new(tol);
    for (i, e) in pos.iter().enumerate() {
        grid.insert(e, i);
    }
    for (q, w) in nu.atoms() {
        match grid.nearest_within(&q.embed(), tol, &pos) {
            Some(i) => out[i].1 -= w,
            None => out.push((*q, -w)),
        }
    }
    out
}

/// `μ = μ_fin + μ_inf` with `μ₀ = μ − F_β μ`,
/// `μ_fin = Σ_{n < n_max} F_βⁿ μ₀` and `μ_inf = F_β^{n_max} μ`.
///
/// Telescoping makes the split exact at every truncation; as `n_max → ∞`
/// the parts converge to the finite and infinite type components.
pub fn decompose_trace<S: TransferSystem>(
    sys: &S,
    mu: &AtomicMeasure<S::Point>,
    beta: f64,
    n_max: usize,
    lib: &TestFunctionLibrary,
) -> Result<Decomposition<S::Point>> {
    let f_mu = apply_f_beta(sys, mu, beta)?;
    let diff = signed_difference(mu, &f_mu, sys.tol());
    let worst = diff.iter().map(|a| a.1).fold(0.0, f64::min);
    if worst < -CLIP * mu.mass().max(1.0) {
        if weak_star_distance(mu, &f_mu, lib) <= WEAK_INVARIANCE_TOL {
            return Ok(Decomposition {
                finite: AtomicMeasure::zero(),
                infinite: mu.clone(),
                residual: 0.0,
                clipped: 0.0,
                weakly_invariant: true,
            });
        }
        return Err(Error::NotSubinvariant { weight: worst });
    }
    let clipped: f64 = diff.iter().filter(|a| a.1 < 0.0).map(|a| -a.1).sum();
    let mu0 = AtomicMeasure::from_atoms(diff, sys.tol());

    let mut finite_atoms = Vec::new();
    let mut term = mu0;
    let mut tail = mu.clone();
    for n in 0..n_max {
        finite_atoms.extend_from_slice(term.atoms());
        if finite_atoms.len() > sys.atom_budget() {
            return Err(Error::AtomBudgetExceeded(sys.atom_budget()));
        }
        if n + 1 < n_max {
            term = apply_f_beta(sys, &term, beta)?;
        }
        tail = if n == 0 { f_mu.clone() } else { apply_f_beta(sys, &tail, beta)? };
    }
    let finite = AtomicMeasure::from_atoms(finite_atoms, sys.tol());
    let infinite = tail;
    let residual = weak_star_distance(mu, &finite.add(&infinite, sys.tol()), lib);
    Ok(Decomposition { finite, infinite, residual, clipped, weakly_invariant: false })
}
