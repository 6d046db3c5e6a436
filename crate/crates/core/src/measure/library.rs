//! A fixed finite family of test functions standing in for the weak-*
//! topology.
//!
//! Every function is a monomial `e₀ᵃ e₁ᵇ e₂ᶜ` in the embedding coordinates of
//! the support, so one library type serves the sphere (stereographic
//! coordinates on S²) and the plane (`x, y`).

use super::{AtomicMeasure, Space, Support};

#[derive(Clone, Debug, PartialEq)]
pub struct TestFunctionLibrary {
    space: Space,
    exponents: Vec<[u32; 3]>,
    sup_norms: Vec<f64>,
}

impl TestFunctionLibrary {
    /// Monomials of total degree `≤ degree` in the three coordinates of the
    /// unit sphere; `degree = 4` gives 35 functions.
    pub fn sphere(degree: u32) -> Self {
        let mut exponents = Vec::new();
        let mut sup_norms = Vec::new();
        for n in 0..=degree {
            for a in (0..=n).rev() {
                for b in (0..=n - a).rev() {
                    let c = n - a - b;
                    exponents.push([a, b, c]);
                    sup_norms.push(sphere_sup([a, b, c]));
                }
            }
        }
        TestFunctionLibrary { space: Space::Sphere, exponents, sup_norms }
    }

    /// Monomials `xᵃ yᵇ` (`a + b ≤ degree`) on the box `[x0,x1] × [y0,y1]`;
    /// with `dim = 1` only powers of `x` are used.
    pub fn plane(degree: u32, bbox: [f64; 4], dim: usize) -> Self {
        let [x0, x1, y0, y1] = bbox;
        let mx = x0.abs().max(x1.abs());
        let my = y0.abs().max(y1.abs());
        let mut exponents = Vec::new();
        let mut sup_norms = Vec::new();
        for n in 0..=degree {
            for a in (0..=n).rev() {
                let b = n - a;
                if dim == 1 && b > 0 {
                    continue;
                }
                let sup = mx.powi(a as i32) * my.powi(b as i32);
                if sup > 0.0 {
                    exponents.push([a, b, 0]);
                    sup_norms.push(sup);
                }
            }
        }
        TestFunctionLibrary { space: Space::Plane, exponents, sup_norms }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[[u32; 3]] {
        &self.exponents
    }

    pub fn sup_norm(&self, i: usize) -> f64 {
        self.sup_norms[i]
    }

    pub fn eval<P: Support>(&self, i: usize, p: &P) -> f64 {
        eval_exp(self.exponents[i], &p.embed())
    }

    /// All library values at `p`.
    pub fn eval_all<P: Support>(&self, p: &P) -> Vec<f64> {
        let e = p.embed();
        self.eval_all_embedded(&e)
    }

    pub(crate) fn eval_all_embedded(&self, e: &[f64; 3]) -> Vec<f64> {
        let deg = self.exponents.iter().map(|x| x[0].max(x[1]).max(x[2])).max().unwrap_or(0) as usize;
        let mut pows = [vec![1.0; deg + 1], vec![1.0; deg + 1], vec![1.0; deg + 1]];
        for k in 0..3 {
            for j in 1..=deg {
                pows[k][j] = pows[k][j - 1] * e[k];
            }
        }
        self.exponents
            .iter()
            .map(|x| pows[0][x[0] as usize] * pows[1][x[1] as usize] * pows[2][x[2] as usize])
            .collect()
    }

    /// `∫ fᵢ dμ` for every library function.
    pub fn integrals<P: Support>(&self, mu: &AtomicMeasure<P>) -> Vec<f64> {
        let mut acc = vec![0.0; self.len()];
        for (p, w) in mu.atoms() {
            for (a, v) in acc.iter_mut().zip(self.eval_all(p)) {
                *a += w * v;
            }
        }
        acc
    }
}

fn eval_exp(x: [u32; 3], e: &[f64; 3]) -> f64 {
    e[0].powi(x[0] as i32) * e[1].powi(x[1] as i32) * e[2].powi(x[2] as i32)
}

/// `max |x^a y^b z^c|` on the unit sphere, `√(aᵃ bᵇ cᶜ / nⁿ)` with `0⁰ = 1`.
fn sphere_sup(x: [u32; 3]) -> f64 {
    let n: u32 = x.iter().sum();
    if n == 0 {
        return 1.0;
    }
    let ln = |k: u32| if k == 0 { 0.0 } else { k as f64 * (k as f64).ln() };
    (0.5 * (ln(x[0]) + ln(x[1]) + ln(x[2]) - ln(n))).exp()
}

/// `max_f |∫f dμ − ∫f dν| / ‖f‖_∞` over the library.
pub fn weak_star_distance<P: Support>(mu: &AtomicMeasure<P>, nu: &AtomicMeasure<P>, lib: &TestFunctionLibrary) -> f64 {
    let a = lib.integrals(mu);
    let b = lib.integrals(nu);
    a.iter().zip(&b).enumerate().map(|(i, (x, y))| (x - y).abs() / lib.sup_norm(i)).fold(0.0, f64::max)
}
