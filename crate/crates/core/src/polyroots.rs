//! Complex polynomial roots with multiplicities.
//!
//! Aberth–Ehrlich simultaneous iteration, Newton polish of isolated roots,
//! then grouping of clustered approximations into multiple roots. A group is
//! only accepted when the derivative test at its centroid confirms the
//! multiplicity.

use num_complex::Complex64;

use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;
const MAX_ITER: usize = 200;
/// Relative noise floor of the derivative test.
const DERIV_NOISE: f64 = 1e-7;

/// Polynomial with ascending complex coefficients and no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    /// `Π (z − rᵢ)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            c = next;
        }
        Poly::new(c)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Complex64 {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `Σ |aᵢ| |z|ⁱ`, the natural bound on rounding error in [`Poly::eval`].
    pub fn abs_eval(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn derivative(&self) -> Poly {
        derivative(self)
    }
}

/// Formal derivative.
pub fn derivative(p: &Poly) -> Poly {
    Poly::new(p.coeffs.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64).collect())
}

/// Multiplicity of `r` as a root of `p`: the order of the first derivative
/// that rises above `1e-7` times its own rounding scale at `r`.
pub fn multiplicity_of_root(p: &Poly, r: Complex64, tol: f64) -> Result<usize> {
    let deg = p.degree().filter(|&d| d > 0).ok_or(Error::DegreeZero(0))?;
    let residual = p.eval(r).norm();
    let bound = tol * p.abs_eval(r);
    if residual > bound {
        return Err(Error::NotARoot { residual, bound });
    }
    Ok(derivative_order(p, r).min(deg))
}

fn derivative_order(p: &Poly, r: Complex64) -> usize {
    let mut d = p.clone();
    let mut k = 0;
    loop {
        d = derivative(&d);
        k += 1;
        if d.is_zero() {
            return k;
        }
        if d.eval(r).norm() > DERIV_NOISE * d.abs_eval(r) {
            return k;
        }
    }
}

/// All roots of `p` with multiplicities summing to its degree.
///
/// Roots closer than `tol · (1 + |r|)` are reported once.
pub fn roots(p: &Poly, tol: f64) -> Result<Vec<(Complex64, usize)>> {
    let deg = match p.degree() {
        None => return Err(Error::DegreeZero(0)),
        Some(0) => return Err(Error::DegreeZero(0)),
        Some(d) => d,
    };
    let zeros = p.coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let mut out = Vec::new();
    if zeros > 0 {
        out.push((Complex64::new(0.0, 0.0), zeros));
    }
    if zeros < deg {
        let q = Poly::new(p.coeffs[zeros..].to_vec());
        let approx = aberth(&q)?;
        out.extend(group(&q, approx));
    }
    Ok(merge_close(out, tol))
}

fn aberth(p: &Poly) -> Result<Vec<Complex64>> {
    let n = p.degree().expect("nonzero");
    let lead = p.coeffs[n];
    let monic = p.scale(Complex64::new(1.0, 0.0) / lead);
    if n == 1 {
        return Ok(vec![-monic.coeffs[0]]);
    }
    let dp = derivative(&monic);
    let radius = monic.coeffs[0].norm().powf(1.0 / n as f64).max(f64::MIN_POSITIVE);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    let mut done = vec![false; n];
    for _ in 0..MAX_ITER {
        for k in 0..n {
            if done[k] {
                continue;
            }
            let zk = z[k];
            let pv = monic.eval(zk);
            if pv.norm() <= 2.0 * EPS * monic.abs_eval(zk) {
                done[k] = true;
                continue;
            }
            let ratio = pv / dp.eval(zk);
            let mut s = Complex64::new(0.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != k {
                    s += Complex64::new(1.0, 0.0) / (zk - zj);
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if !step.re.is_finite() || !step.im.is_finite() {
                // nudge off a coincidence and try again next sweep
                z[k] = zk + Complex64::new(EPS.sqrt(), EPS.sqrt()) * (1.0 + zk.norm());
                continue;
            }
            z[k] = zk - step;
            if step.norm() <= 4.0 * EPS * (1.0 + z[k].norm()) {
                done[k] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(z);
        }
    }
    // accept if everything is at least near roundoff
    let ok = z.iter().all(|&zk| monic.eval(zk).norm() <= 1e3 * EPS * monic.abs_eval(zk));
    if ok {
        Ok(z)
    } else {
        Err(Error::NonConvergence { iterations: MAX_ITER })
    }
}

/// Cluster-size-dependent spread allowed for a multiple root of order `m`.
fn spread_limit(m: usize, c: Complex64) -> f64 {
    100.0 * EPS.powf(1.0 / m as f64) * (1.0 + c.norm())
}

fn group(p: &Poly, approx: Vec<Complex64>) -> Vec<(Complex64, usize)> {
    let n = approx.len();
    let mut used = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if used[i] {
            continue;
        }
        // unassigned neighbours, nearest first
        let mut near: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i && !used[j])
            .map(|j| ((approx[j] - approx[i]).norm(), j))
            .filter(|&(d, j)| d <= 2.0 * spread_limit(n, approx[i]).max(spread_limit(n, approx[j])))
            .collect();
        near.sort_by(|a, b| a.0.total_cmp(&b.0));
        // try the largest plausible cluster first
        let mut accepted = vec![i];
        for m in (2..=near.len() + 1).rev() {
            let members: Vec<usize> = std::iter::once(i).chain(near[..m - 1].iter().map(|x| x.1)).collect();
            let c = refine_multiple(p, centroid(&approx, &members), m);
            let spread = members.iter().map(|&k| (approx[k] - c).norm()).fold(0.0, f64::max);
            if spread <= spread_limit(m, c) && derivative_order(p, c) >= m {
                accepted = members;
                break;
            }
        }
        for &k in &accepted {
            used[k] = true;
        }
        let r = if accepted.len() == 1 {
            polish(p, approx[i])
        } else {
            refine_multiple(p, centroid(&approx, &accepted), accepted.len())
        };
        out.push((r, accepted.len()));
    }
    out
}

fn centroid(z: &[Complex64], idx: &[usize]) -> Complex64 {
    idx.iter().map(|&k| z[k]).sum::<Complex64>() / idx.len() as f64
}

/// Newton on `p^{(m−1)}`, for which a root of multiplicity `m` is simple.
fn refine_multiple(p: &Poly, mut c: Complex64, m: usize) -> Complex64 {
    let mut d = p.clone();
    for _ in 0..m - 1 {
        d = derivative(&d);
    }
    let dd = derivative(&d);
    for _ in 0..5 {
        let den = dd.eval(c);
        if den.norm() == 0.0 {
            break;
        }
        let step = d.eval(c) / den;
        c -= step;
        if step.norm() <= EPS * (1.0 + c.norm()) {
            break;
        }
    }
    c
}

/// A few Newton steps, kept only while the residual improves.
fn polish(p: &Poly, mut z: Complex64) -> Complex64 {
    let dp = derivative(p);
    let mut res = p.eval(z).norm();
    for _ in 0..3 {
        let d = dp.eval(z);
        if d.norm() == 0.0 || res == 0.0 {
            break;
        }
        let cand = z - p.eval(z) / d;
        let r = p.eval(cand).norm();
        if r.is_nan() || r >= res {
            break;
        }
        z = cand;
        res = r;
    }
    z
}

fn merge_close(mut roots: Vec<(Complex64, usize)>, tol: f64) -> Vec<(Complex64, usize)> {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    roots.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    for (r, m) in roots {
        let hit = out.iter_mut().find(|(s, _)| (r - *s).norm() <= tol * (1.0 + r.norm().max(s.norm())));
        match hit {
            Some((s, k)) => {
                *s = (*s * *k as f64 + r * m as f64) / (*k + m) as f64;
                *k += m;
            }
            None => out.push((r, m)),
        }
    }
    out
}
