//! Hutchinson measures, finite-type KMS measures and the orbit condition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::IfsSystem;
use crate::error::{Error, Result};
use crate::kms::{depth_for_tail, Anchor, Beta, ExtremeState, KmsMeasure, PhaseReport, Regime, StateKind, AUTO_TAIL};
use crate::measure::{AtomicMeasure, PlanePoint, Support};

const CHAOS_CHAINS: u64 = 8;
const BURN_IN: usize = 100;
const ORBIT_LEVEL_CAP: usize = 4096;
const CLOSURE_CAP: usize = 10_000;

/// How to approximate the Hutchinson measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HutchinsonMode {
    /// `(Ḡ*)ⁿ δ_{x₀}`; `x0` defaults to the fixed point of the first map.
    /// With `prune`, atoms are coarse-grained to stay within the budget.
    Deterministic { x0: Option<PlanePoint>, prune: bool },
    /// Averaged independent chaos-game chains.
    ChaosGame { samples: usize, seed: u64 },
}

fn push_forward(sys: &IfsSystem, mu: &AtomicMeasure<PlanePoint>, factor: f64) -> Vec<(PlanePoint, f64)> {
    mu.atoms().iter().flat_map(|(x, w)| sys.maps().iter().map(move |g| (g.apply(x), w * factor))).collect()
}

/// Approximates the Hutchinson measure of `sys` with `n` levels or samples.
pub fn hutchinson(sys: &IfsSystem, n: usize, mode: HutchinsonMode) -> Result<AtomicMeasure<PlanePoint>> {
    let tol = sys.settings().tol;
    let budget = sys.settings().atom_budget;
    let k = sys.len();
    match mode {
        HutchinsonMode::Deterministic { x0, prune } => {
            let x0 = x0.unwrap_or_else(|| sys.maps()[0].fixed_point(sys.dim()));
            let mut mu = AtomicMeasure::dirac(x0);
            let (_, radius) = sys.invariant_ball();
            for level in 0..n {
                if mu.len() * k > budget {
                    if !prune {
                        return Err(Error::AtomBudgetExceeded(budget));
                    }
                    let mut r = radius * sys.contraction().powi(level as i32).max(tol);
                    while mu.len() * k > budget {
                        mu = AtomicMeasure::from_atoms(mu.atoms().to_vec(), r);
                        r *= 2.0;
                    }
                }
                mu = AtomicMeasure::from_atoms(push_forward(sys, &mu, 1.0 / k as f64), tol);
            }
            Ok(mu)
        }
        HutchinsonMode::ChaosGame { samples, seed } => {
            if samples == 0 {
                return Err(Error::InvalidInput("chaos game needs at least one sample".into()));
            }
            if samples > budget {
                return Err(Error::AtomBudgetExceeded(budget));
            }
            let w = 1.0 / samples as f64;
            let per = samples.div_ceil(CHAOS_CHAINS as usize);
            let start = sys.maps()[0].fixed_point(sys.dim());
            let atoms: Vec<(PlanePoint, f64)> = (0..CHAOS_CHAINS)
                .into_par_iter()
                .flat_map_iter(|chain| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(chain);
                    let take = per.min(samples.saturating_sub(chain as usize * per));
                    let mut x = start;
                    let mut out = Vec::with_capacity(take);
                    for step in 0..BURN_IN + take {
                        x = sys.maps()[rng.random_range(0..k)].apply(&x);
                        if step >= BURN_IN {
                            out.push((x, w));
                        }
                    }
                    out
                })
                .collect();
            Ok(AtomicMeasure::from_atoms(atoms, tol))
        }
    }
}

/// The finite-type measure `(1 − N e^{−β}) Σ_{n ≤ d} e^{−nβ} Σ_{|w| = n} δ_{γ_w(b)}`
/// for `b ∈ ℬ(γ)` and `β > log N`. Colliding words add their weights.
pub fn kms_measure_ifs(
    sys: &IfsSystem,
    b: &PlanePoint,
    beta: impl Into<Beta>,
    depth: Option<usize>,
) -> Result<KmsMeasure<PlanePoint>> {
    if !sys.is_branch_point(b) {
        return Err(Error::NotABranchPoint);
    }
    let n = sys.len();
    let (beta, regime) = beta.into().resolve(n)?;
    if regime != Regime::Supercritical {
        return Err(Error::OutOfRegime { beta, reason: format!("finite-type states need beta > log {n}") });
    }
    let b = *sys.branch_data().branch_points.iter().find(|p| p.distance(b) <= 1e-9).expect("branch point");
    let r = n as f64 * (-beta).exp();
    let prefactor = 1.0 - r;
    let tol = sys.settings().tol;
    let budget = sys.settings().atom_budget;
    let mut warnings = Vec::new();
    let target = depth.unwrap_or_else(|| depth_for_tail(r, AUTO_TAIL));
    let decay = (-beta).exp();
    let mut level = AtomicMeasure::dirac(b).scale(prefactor);
    let mut parts = vec![level.clone()];
    let mut total_atoms = 1;
    let mut reached = 0;
    for k in 1..=target {
        if total_atoms + level.len() * n > budget {
            if depth.is_some() {
                return Err(Error::AtomBudgetExceeded(budget));
            }
            warnings.push(format!("depth capped at {} by the atom budget", k - 1));
            break;
        }
        level = AtomicMeasure::from_atoms(push_forward(sys, &level, decay), tol);
        total_atoms += level.len();
        parts.push(level.clone());
        reached = k;
    }
    let all: Vec<(PlanePoint, f64)> = parts.into_iter().flat_map(|m| m.into_atoms()).collect();
    let measure = AtomicMeasure::from_atoms(all, tol);
    Ok(KmsMeasure {
        measure,
        anchor: b,
        beta,
        kind: StateKind::FiniteType,
        normalization: prefactor,
        truncation_depth: reached,
        tail_bound: r.powi(reached as i32 + 1) / (1.0 - r),
        closed_form: false,
        warnings,
    })
}

/// Outcome of the orbit-condition search for one point of `𝒞(γ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum OrbitCertificate {
    /// `witness ∈ O(y)` and no forward image of it lies in `𝒞(γ)`.
    Certified {
        witness: PlanePoint,
        level: usize,
    },
    InconclusiveAtDepth(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitConditionReport {
    pub entries: Vec<(PlanePoint, OrbitCertificate)>,
    /// Size of the backward-address closure of `𝒞(γ)` within the attractor,
    /// when it is finite.
    pub closure_size: Option<usize>,
}

impl OrbitConditionReport {
    pub fn certified(&self) -> bool {
        self.entries.iter().all(|e| matches!(e.1, OrbitCertificate::Certified { .. }))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "certified": self.certified(),
            "closure_size": self.closure_size,
            "entries": self.entries.iter().map(|(y, c)| {
                match c {
                    OrbitCertificate::Certified { witness, level } => {
                        json!({"point": y, "status": "certified", "witness": witness, "level": level})
                    }
                    OrbitCertificate::InconclusiveAtDepth(d) => {
                        json!({"point": y, "status": "inconclusive", "depth": d})
                    }
                }
            }).collect::<Vec<_>>(),
        })
    }
}

/// Points of the attractor whose forward orbit meets `𝒞(γ)`, when this set
/// closes up within `depth` inverse steps.
fn backward_closure(sys: &IfsSystem, depth: usize) -> Option<Vec<PlanePoint>> {
    let tol = sys.settings().tol;
    let cover = sys.cover_depth();
    let mut all: Vec<PlanePoint> = sys.branch_values();
    let mut frontier = all.clone();
    for _ in 0..depth {
        if frontier.is_empty() {
            return Some(all);
        }
        let mut next = Vec::new();
        for q in &frontier {
            for inv in sys.inverses() {
                let p = inv.apply(q);
                if all.iter().chain(&next).any(|a: &PlanePoint| a.distance(&p) <= tol) {
                    continue;
                }
                if sys.in_attractor(&p, cover, tol) {
                    next.push(p);
                }
            }
        }
        all.extend(next.iter().copied());
        if all.len() > CLOSURE_CAP {
            return None;
        }
        frontier = next;
    }
    frontier.is_empty().then_some(all)
}

/// Searches `O(y)` for a point whose forward orbit avoids `𝒞(γ)`, for every
/// `y ∈ 𝒞(γ)`.
pub fn orbit_condition(sys: &IfsSystem, depth: usize) -> OrbitConditionReport {
    let values = sys.branch_values();
    let Some(closure) = backward_closure(sys, depth) else {
        return OrbitConditionReport {
            entries: values.into_iter().map(|y| (y, OrbitCertificate::InconclusiveAtDepth(depth))).collect(),
            closure_size: None,
        };
    };
    let margin = 1e-7;
    let entries = values
        .into_iter()
        .map(|y| {
            let mut level = vec![y];
            for k in 0..=depth {
                if let Some(x) = level.iter().find(|x| closure.iter().all(|q| q.distance(x) > margin)) {
                    return (y, OrbitCertificate::Certified { witness: *x, level: k });
                }
                let mut next: Vec<PlanePoint> = Vec::new();
                for x in &level {
                    for g in sys.maps() {
                        let p = g.apply(x);
                        if !next.iter().any(|a| a.distance(&p) <= 1e-9) {
                            next.push(p);
                        }
                    }
                }
                next.truncate(ORBIT_LEVEL_CAP);
                level = next;
            }
            (y, OrbitCertificate::InconclusiveAtDepth(depth))
        })
        .collect();
    OrbitConditionReport { entries, closure_size: Some(closure.len()) }
}

/// Depth used by [`classify_ifs`] for the orbit condition.
pub const ORBIT_DEPTH: usize = 10;

/// Extreme KMS states at inverse temperature `beta`. The orbit condition
/// must be certified unless `assume_orbit_condition` is set.
pub fn classify_ifs(
    sys: &IfsSystem,
    beta: impl Into<Beta>,
    assume_orbit_condition: bool,
) -> Result<PhaseReport<PlanePoint>> {
    let (b, regime) = beta.into().resolve(sys.len())?;
    let mut warnings = Vec::new();
    let oc = orbit_condition(sys, ORBIT_DEPTH);
    if !oc.certified() {
        if !assume_orbit_condition {
            return Err(Error::InvalidInput(format!(
                "orbit condition not certified at depth {ORBIT_DEPTH}; rerun with the override to assume it"
            )));
        }
        warnings.push(format!("orbit condition assumed, not certified at depth {ORBIT_DEPTH}"));
    }
    let states = match regime {
        Regime::Zero | Regime::Subcritical => Vec::new(),
        Regime::Critical => {
            vec![ExtremeState { kind: StateKind::InfiniteType, anchor: Anchor::Hutchinson, restriction: None }]
        }
        Regime::Supercritical => sys
            .branch_data()
            .branch_points
            .iter()
            .map(|p| ExtremeState { kind: StateKind::FiniteType, anchor: Anchor::Point(*p), restriction: None })
            .collect(),
    };
    Ok(PhaseReport { beta: b, regime, states, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kms::{check_k1, check_k2, DEFAULT_RHO};
    use crate::measure::weak_star_distance;

    fn pp(x: f64, y: f64) -> PlanePoint {
        PlanePoint::new(x, y)
    }

    #[test]
    fn tent_hutchinson_moments() {
        let t = IfsSystem::tent();
        let mu = hutchinson(&t, 16, HutchinsonMode::Deterministic { x0: None, prune: false }).unwrap();
        assert!((mu.mass() - 1.0).abs() < 1e-12);
        assert!((mu.integrate(|p| p.x) - 0.5).abs() < 1e-12);
        assert!((mu.integrate(|p| p.x * p.x) - 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn hutchinson_seed_independence() {
        let s = IfsSystem::sierpinski();
        let lib = s.library(3);
        let a = hutchinson(&s, 8, HutchinsonMode::Deterministic { x0: Some(pp(0.0, 0.0)), prune: false }).unwrap();
        let b = hutchinson(&s, 8, HutchinsonMode::Deterministic { x0: Some(pp(1.0, 0.0)), prune: false }).unwrap();
        assert!(weak_star_distance(&a, &b, &lib) < 1e-2);
        let c = hutchinson(&s, 200_000, HutchinsonMode::ChaosGame { samples: 200_000, seed: 7 }).unwrap();
        assert!((c.mass() - 1.0).abs() < 1e-9);
        assert!(weak_star_distance(&a, &c, &lib) < 2e-2);
    }

    #[test]
    fn hutchinson_budget() {
        let s = IfsSystem::sierpinski().with_atom_budget(1000);
        let err = hutchinson(&s, 8, HutchinsonMode::Deterministic { x0: None, prune: false }).unwrap_err();
        assert_eq!(err, Error::AtomBudgetExceeded(1000));
        let mu = hutchinson(&s, 8, HutchinsonMode::Deterministic { x0: None, prune: true }).unwrap();
        assert!(mu.len() <= 1000 && (mu.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tent_finite_state() {
        let t = IfsSystem::tent();
        let beta = 4f64.ln();
        let k = kms_measure_ifs(&t, &pp(0.5, 0.0), beta, Some(18)).unwrap();
        assert!((k.normalization - 0.5).abs() < 1e-15);
        assert!(k.measure.weight_near(&pp(0.5, 0.0), 1e-12) >= 0.5);
        assert!((k.measure.mass() - 1.0).abs() <= k.tail_bound);
        let lib = t.library(4);
        let k1 = check_k1(&t, &k.measure, beta, &lib, DEFAULT_RHO).unwrap();
        assert!(k1.max_residual < 1e-5, "{k1:?}");
        let k2 = check_k2(&t, &k.measure, beta, &lib).unwrap();
        assert!(k2.max_residual < 1e-5, "{k2:?}");
    }

    #[test]
    fn finite_state_preconditions() {
        let t = IfsSystem::tent();
        assert_eq!(kms_measure_ifs(&t, &pp(0.3, 0.0), 2.0, None).unwrap_err(), Error::NotABranchPoint);
        assert!(matches!(kms_measure_ifs(&t, &pp(0.5, 0.0), 0.5, None), Err(Error::OutOfRegime { .. })));
        assert!(matches!(kms_measure_ifs(&t, &pp(0.5, 0.0), Beta::Critical, None), Err(Error::OutOfRegime { .. })));
    }

    #[test]
    fn orbit_condition_certified() {
        let t = IfsSystem::tent();
        let oc = orbit_condition(&t, 10);
        assert!(oc.certified(), "{oc:?}");
        assert_eq!(oc.closure_size, Some(2));
        let s = IfsSystem::sierpinski_twisted();
        assert!(orbit_condition(&s, 10).certified());
        // nothing to certify without collisions
        assert!(orbit_condition(&IfsSystem::binary(), 10).entries.is_empty());
    }

    #[test]
    fn twisted_gasket_phases() {
        let s = IfsSystem::sierpinski_twisted();
        assert_eq!(classify_ifs(&s, 1.0, false).unwrap().counts(), (0, 0));
        assert_eq!(classify_ifs(&s, Beta::Critical, false).unwrap().counts(), (0, 1));
        assert_eq!(classify_ifs(&s, 1.5, false).unwrap().counts(), (3, 0));
        assert_eq!(classify_ifs(&s, 0.0, false).unwrap().regime, Regime::Zero);
        let plain = IfsSystem::sierpinski();
        assert_eq!(classify_ifs(&plain, 2.0, false).unwrap().counts(), (0, 0));
    }
}
