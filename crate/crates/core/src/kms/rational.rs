//! KMS measures of the gauge action for rational maps.

use serde::Serialize;
use serde_json::{json, Value};

use super::{
    depth_for_tail, tail_bound, Anchor, Beta, ExtremeState, KmsMeasure, PhaseReport, Regime, StateKind, AUTO_TAIL,
};
use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure, TestFunctionLibrary};
use crate::projective::{chordal_distance, SpherePoint};
use crate::ratmap::{ExceptionalCase, RationalMap, Weighting};

/// Margin above `log N` beyond which the automatic depth is enforced.
const NEAR_CRITICAL: f64 = 0.05;

/// The exceptional cycle through `w`, starting at `w` and following
/// preimages: `[w]` for a fixed point, `[w, R⁻¹(w)]` for a 2-cycle.
fn exceptional_cycle(r: &RationalMap, w: &SpherePoint) -> Vec<SpherePoint> {
    let ex = r.exceptional_points();
    match ex.case {
        ExceptionalCase::TwoSwapped => {
            let other = ex.points.iter().copied().find(|p| chordal_distance(p, w) > 1e-6).expect("two points");
            vec![*w, other]
        }
        _ => vec![*w],
    }
}

/// `μ_{β,w} = m Σ_k e^{−kβ} Σ_{z ∈ R⁻ᵏ(w)} δ_z`, normalized to a probability
/// measure.
///
/// For exceptional `w` the backward orbit is a fixed point or a 2-cycle and
/// the series is summed exactly; otherwise it is truncated after `depth`
/// levels (`None` picks the depth making the tail bound at most `1e-6`,
/// within the atom budget).
pub fn kms_measure(
    r: &RationalMap,
    w: &SpherePoint,
    beta: impl Into<Beta>,
    depth: Option<usize>,
) -> Result<KmsMeasure<SpherePoint>> {
    let n = r.degree();
    let (b, regime) = beta.into().resolve(n)?;
    if !r.is_branch_point(w) {
        return Err(Error::NotABranchPoint);
    }
    let w = r
        .branch_points()
        .into_iter()
        .min_by(|a, c| chordal_distance(a, w).total_cmp(&chordal_distance(c, w)))
        .expect("w is a branch point");

    if r.is_exceptional(&w) {
        let cycle = exceptional_cycle(r, &w);
        // weight of the j-th point is proportional to e^{−jβ}
        let raw: Vec<f64> = (0..cycle.len()).map(|j| (-(j as f64) * b).exp()).collect();
        let total: f64 = raw.iter().sum();
        let atoms = cycle.iter().zip(&raw).map(|(p, x)| (*p, x / total)).collect();
        let normalization = if b > 0.0 { 1.0 - (-b).exp() } else { 1.0 / cycle.len() as f64 };
        return Ok(KmsMeasure {
            measure: AtomicMeasure::from_atoms(atoms, r.settings().tol),
            anchor: w,
            beta: b,
            kind: StateKind::FiniteType,
            normalization,
            truncation_depth: 0,
            tail_bound: 0.0,
            closed_form: true,
            warnings: Vec::new(),
        });
    }

    if regime != Regime::Supercritical {
        return Err(Error::OutOfRegime {
            beta: b,
            reason: format!("states anchored at non-exceptional points need beta > log {n}"),
        });
    }
    let ratio = n as f64 * (-b).exp();
    let mut warnings = Vec::new();
    let d = match depth {
        Some(d) => d,
        None => {
            let d = depth_for_tail(ratio, AUTO_TAIL);
            if b <= (n as f64).ln() + NEAR_CRITICAL {
                warnings.push(format!("beta is within {NEAR_CRITICAL} of log N; tail decays like ({ratio:.6})^k"));
            }
            d
        }
    };
    let tree = r.backward_orbit(&w, d, Weighting::SetCount)?;
    let used = tree.levels.len() - 1;
    if tree.truncated {
        warnings.push(format!("atom budget reached; series truncated at depth {used} instead of {d}"));
    }
    let mut atoms = Vec::new();
    let mut series = 0.0;
    for (k, level) in tree.levels.iter().enumerate() {
        let f = (-(k as f64) * b).exp();
        series += f * level.mass();
        atoms.extend(level.atoms().iter().map(|&(p, c)| (p, f * c)));
    }
    let m = 1.0 / series;
    let atoms = atoms.into_iter().map(|(p, x)| (p, m * x)).collect();
    let tail = tail_bound(ratio, used, m);
    if tail > AUTO_TAIL && depth.is_none() {
        warnings.push(format!("tail bound {tail:e} exceeds {AUTO_TAIL:e}"));
    }
    Ok(KmsMeasure {
        measure: AtomicMeasure::from_atoms(atoms, r.settings().tol),
        anchor: w,
        beta: b,
        kind: StateKind::FiniteType,
        normalization: m,
        truncation_depth: used,
        tail_bound: tail,
        closed_form: false,
        warnings,
    })
}

/// `μₙʸ = (G*/N)ⁿ δ_y`, the n-th Lyubich approximant.
pub fn lyubich(r: &RationalMap, y: &SpherePoint, n: usize) -> Result<AtomicMeasure<SpherePoint>> {
    let tree = r.backward_orbit(y, n, Weighting::IndexWeighted)?;
    if tree.truncated {
        return Err(Error::AtomBudgetExceeded(r.settings().atom_budget));
    }
    Ok(tree.levels.into_iter().last().expect("level 0 exists"))
}

/// `max_f |∫ f∘R dμ − ∫ f dμ| / ‖f‖_∞` over the library.
pub fn lyubich_invariance_residual(r: &RationalMap, mu: &AtomicMeasure<SpherePoint>, lib: &TestFunctionLibrary) -> f64 {
    let pushed = AtomicMeasure::from_atoms(mu.atoms().iter().map(|(p, w)| (r.evaluate(p), *w)).collect(), 0.0);
    crate::measure::weak_star_distance(&pushed, mu, lib)
}

/// Certificate that no measure satisfying (K2) charges `z` when
/// `0 < β < log N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessReport {
    pub z: SpherePoint,
    /// Point of `O⁻(z)` whose backward orbit is simple and level-disjoint.
    pub witness: SpherePoint,
    /// Level of the witness in the backward orbit of `z`.
    pub witness_level: usize,
    pub beta: f64,
    pub depth: usize,
    /// `Σ_{n ≤ k} e^{−nβ} |R⁻ⁿ(w)|` for `k = 0..=depth`.
    pub partial_sums: Vec<f64>,
    /// `Σ_{n ≤ depth} (N e^{−β})ⁿ`, which the sums equal when certified.
    pub geometric_sum: f64,
    /// Upper bound on `μ{z}` for a probability measure with (K2).
    pub mass_bound: f64,
}

impl WitnessReport {
    pub fn to_json(&self) -> Value {
        json!(self)
    }
}

/// Searches `O⁻(z)` breadth-first for a witness `w` whose backward orbit to
/// `depth` avoids the critical values and has pairwise disjoint levels.
pub fn divergence_witness(r: &RationalMap, z: &SpherePoint, beta: f64, depth: usize) -> Result<WitnessReport> {
    let n = r.degree();
    if r.is_exceptional(z) {
        return Err(Error::ExceptionalSeed);
    }
    if !(beta > 0.0 && beta < (n as f64).ln() - super::CRITICAL_TOL) {
        return Err(Error::OutOfRegime { beta, reason: format!("a witness needs 0 < beta < log {n}") });
    }
    let tol = r.settings().tol;
    let values = r.branch_data().branch_values.clone();
    let avoids = |p: &SpherePoint| values.iter().all(|c| chordal_distance(c, p) > 1e-6);

    // candidates: the backward orbit of z, level by level
    const MAX_CANDIDATES: usize = 64;
    let candidates = r.backward_orbit(z, depth.min(6), Weighting::SetCount)?;
    let mut tried = 0;
    for (level, lvl) in candidates.levels.iter().enumerate() {
        for (w, _) in lvl.atoms() {
            if tried >= MAX_CANDIDATES {
                break;
            }
            tried += 1;
            if !avoids(w) {
                continue;
            }
            let tree = r.backward_orbit(w, depth, Weighting::SetCount)?;
            if tree.truncated {
                return Err(Error::AtomBudgetExceeded(r.settings().atom_budget));
            }
            let simple = tree
                .levels
                .iter()
                .enumerate()
                .all(|(k, l)| l.len() == n.pow(k as u32) && l.atoms().iter().all(|(p, c)| *c == 1.0 && avoids(p)));
            if !simple {
                continue;
            }
            let all: Vec<(SpherePoint, f64)> = tree.levels.iter().flat_map(|l| l.atoms().iter().copied()).collect();
            let total = all.len();
            if AtomicMeasure::from_atoms(all, tol).len() != total {
                continue;
            }
            let mut partial_sums = Vec::with_capacity(depth + 1);
            let mut s = 0.0;
            for (k, l) in tree.levels.iter().enumerate() {
                s += (-(k as f64) * beta).exp() * l.len() as f64;
                partial_sums.push(s);
            }
            let ratio = n as f64 * (-beta).exp();
            let geometric_sum = (0..=depth).map(|k| ratio.powi(k as i32)).sum();
            let mass_bound = ((level as f64) * beta).exp() / s;
            return Ok(WitnessReport {
                z: *z,
                witness: *w,
                witness_level: level,
                beta,
                depth,
                partial_sums,
                geometric_sum,
                mass_bound,
            });
        }
    }
    Err(Error::WitnessNotFoundAtDepth(depth))
}

fn exceptional_states(r: &RationalMap, beta: f64, zero: bool) -> Result<Vec<ExtremeState<SpherePoint>>> {
    let ex = r.exceptional_points();
    let tol = r.settings().tol;
    if zero {
        return Ok(match ex.case {
            ExceptionalCase::Empty => Vec::new(),
            ExceptionalCase::OneFixed | ExceptionalCase::TwoFixed => ex
                .points
                .iter()
                .map(|p| ExtremeState {
                    kind: StateKind::FiniteType,
                    anchor: Anchor::Point(*p),
                    restriction: Some(AtomicMeasure::dirac(*p)),
                })
                .collect(),
            ExceptionalCase::TwoSwapped => vec![ExtremeState {
                kind: StateKind::FiniteType,
                anchor: Anchor::Class(ex.points.clone()),
                restriction: Some(AtomicMeasure::from_atoms(ex.points.iter().map(|p| (*p, 0.5)).collect(), tol)),
            }],
        });
    }
    ex.points
        .iter()
        .map(|p| {
            let k = kms_measure(r, p, beta, None)?;
            Ok(ExtremeState { kind: StateKind::FiniteType, anchor: Anchor::Point(*p), restriction: Some(k.measure) })
        })
        .collect()
}

/// Extreme β-KMS states of the gauge action on the algebra of `R` over the
/// whole sphere.
///
/// Below `log N` only the exceptional points carry states; at `log N` the
/// Lyubich state joins them; above, every branched point anchors one. At
/// `β = 0` the tracial states supported on the exceptional set are listed.
pub fn classify(r: &RationalMap, beta: impl Into<Beta>) -> Result<PhaseReport<SpherePoint>> {
    let (b, regime) = beta.into().resolve(r.degree())?;
    let mut states = Vec::new();
    match regime {
        Regime::Zero => states = exceptional_states(r, 0.0, true)?,
        Regime::Subcritical => states = exceptional_states(r, b, false)?,
        Regime::Critical => {
            states.push(ExtremeState { kind: StateKind::InfiniteType, anchor: Anchor::Lyubich, restriction: None });
            states.extend(exceptional_states(r, b, false)?);
        }
        Regime::Supercritical => {
            for p in r.branch_points() {
                let restriction = if r.is_exceptional(&p) { Some(kms_measure(r, &p, b, None)?.measure) } else { None };
                states.push(ExtremeState { kind: StateKind::FiniteType, anchor: Anchor::Point(p), restriction });
            }
        }
    }
    Ok(PhaseReport { beta: b, regime, states, warnings: Vec::new() })
}

/// Classification for the algebra over the Julia set. Membership of
/// branched points in the Julia set is supplied by the caller; exceptional
/// points never belong to it.
pub fn classify_julia(
    r: &RationalMap,
    beta: impl Into<Beta>,
    julia_branch_points: &[SpherePoint],
) -> Result<PhaseReport<SpherePoint>> {
    let (b, regime) = beta.into().resolve(r.degree())?;
    let mut flagged = Vec::new();
    for p in julia_branch_points {
        if !r.is_branch_point(p) {
            return Err(Error::NotABranchPoint);
        }
        if r.is_exceptional(p) {
            return Err(Error::InvalidInput(format!("{p} is exceptional, hence not in the Julia set")));
        }
        let q = r
            .branch_points()
            .into_iter()
            .min_by(|a, c| chordal_distance(a, p).total_cmp(&chordal_distance(c, p)))
            .expect("branch point");
        if !flagged.iter().any(|f: &SpherePoint| chordal_distance(f, &q) < 1e-9) {
            flagged.push(q);
        }
    }
    let states = match regime {
        Regime::Zero | Regime::Subcritical => Vec::new(),
        Regime::Critical => {
            vec![ExtremeState { kind: StateKind::InfiniteType, anchor: Anchor::Lyubich, restriction: None }]
        }
        Regime::Supercritical => flagged
            .into_iter()
            .map(|p| ExtremeState { kind: StateKind::FiniteType, anchor: Anchor::Point(p), restriction: None })
            .collect(),
    };
    let warnings = vec!["Julia-set membership of branched points is taken from the caller".to_string()];
    Ok(PhaseReport { beta: b, regime, states, warnings })
}
