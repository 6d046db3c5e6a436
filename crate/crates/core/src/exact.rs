//! Exact polynomials over the Gaussian rationals ℚ(i).
//!
//! Map coefficients enter the engine exactly (from the expression parser, or
//! from `f64` values, which are dyadic rationals), so degree, coprimality and
//! the multiplicity structure of the Wronskian are decided without rounding.

use std::fmt;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::polyroots::Poly;

pub type GaussQ = Complex<BigRational>;

pub fn gq_int(n: i64) -> GaussQ {
    Complex::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
}

pub fn gq_ratio(num: i64, den: i64) -> GaussQ {
    Complex::new(BigRational::new(BigInt::from(num), BigInt::from(den)), BigRational::zero())
}

pub fn gq_i() -> GaussQ {
    Complex::new(BigRational::zero(), BigRational::one())
}

/// Exact conversion of a double-precision complex value.
pub fn gq_from_f64(c: Complex64) -> Option<GaussQ> {
    Some(Complex::new(BigRational::from_float(c.re)?, BigRational::from_float(c.im)?))
}

pub fn gq_to_f64(c: &GaussQ) -> Complex64 {
    Complex64::new(c.re.to_f64().unwrap_or(f64::NAN), c.im.to_f64().unwrap_or(f64::NAN))
}

/// Polynomial with ascending Gaussian-rational coefficients, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactPoly {
    coeffs: Vec<GaussQ>,
}

impl ExactPoly {
    pub fn new(mut coeffs: Vec<GaussQ>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ExactPoly { coeffs }
    }

    pub fn zero() -> Self {
        ExactPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: GaussQ) -> Self {
        ExactPoly::new(vec![c])
    }

    pub fn one() -> Self {
        ExactPoly::constant(gq_int(1))
    }

    /// The monomial `z`.
    pub fn var() -> Self {
        ExactPoly::new(vec![gq_int(0), gq_int(1)])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        ExactPoly::new(coeffs.iter().map(|&c| gq_int(c)).collect())
    }

    pub fn from_f64(coeffs: &[Complex64]) -> Option<Self> {
        coeffs.iter().map(|&c| gq_from_f64(c)).collect::<Option<Vec<_>>>().map(ExactPoly::new)
    }

    pub fn coeffs(&self) -> &[GaussQ] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&GaussQ> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> GaussQ {
        self.coeffs.get(i).cloned().unwrap_or_else(GaussQ::zero)
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(gq_to_f64).collect())
    }

    pub fn add(&self, other: &ExactPoly) -> ExactPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        ExactPoly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &ExactPoly) -> ExactPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        ExactPoly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn neg(&self) -> ExactPoly {
        ExactPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn mul(&self, other: &ExactPoly) -> ExactPoly {
        if self.is_zero() || other.is_zero() {
            return ExactPoly::zero();
        }
        let mut out = vec![GaussQ::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + a * b;
            }
        }
        ExactPoly::new(out)
    }

    pub fn scale(&self, c: &GaussQ) -> ExactPoly {
        ExactPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, e: u32) -> ExactPoly {
        let mut acc = ExactPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn derivative(&self) -> ExactPoly {
        ExactPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * gq_int(i as i64)).collect())
    }

    /// Euclidean division; `None` when dividing by zero.
    pub fn div_rem(&self, d: &ExactPoly) -> Option<(ExactPoly, ExactPoly)> {
        let dd = d.degree()?;
        let lead_inv = GaussQ::one() / d.leading()?.clone();
        let mut rem = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return Some((ExactPoly::zero(), self.clone()));
        }
        let mut quot = vec![GaussQ::zero(); n - dd];
        for k in (0..n - dd).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &c * dc;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Some((ExactPoly::new(quot), ExactPoly::new(rem)))
    }

    /// Scales to leading coefficient 1; the zero polynomial is returned as is.
    pub fn monic(&self) -> ExactPoly {
        match self.leading() {
            None => self.clone(),
            Some(l) => {
                let inv = GaussQ::one() / l.clone();
                self.scale(&inv)
            }
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &ExactPoly) -> ExactPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("b is nonzero");
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Yun's square-free decomposition: `self = c · Π fₖᵏ` with each `fₖ`
    /// square-free and pairwise coprime. Only factors of positive degree are
    /// returned, as `(fₖ, k)`.
    pub fn squarefree_decomposition(&self) -> Vec<(ExactPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let fp = self.derivative();
        let a0 = self.gcd(&fp);
        let mut b = self.div_rem(&a0).expect("gcd is nonzero").0;
        let mut c = fp.div_rem(&a0).expect("gcd is nonzero").0;
        let mut d = c.sub(&b.derivative());
        let mut k = 1;
        loop {
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), k));
            }
            b = b.div_rem(&a).expect("nonzero").0;
            c = d.div_rem(&a).expect("nonzero").0;
            d = c.sub(&b.derivative());
            k += 1;
        }
        out
    }

    /// Multiplicity of `0` as a root (number of vanishing low coefficients).
    pub fn zero_order(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// `z^n · p(1/z)`; requires `n ≥ deg p`.
    pub fn reversed(&self, n: usize) -> ExactPoly {
        let mut v = vec![GaussQ::zero(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[n - i] = c.clone();
        }
        ExactPoly::new(v)
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Human-readable coefficient, e.g. `3`, `-16/27`, `(1+2i)`.
pub fn fmt_gq(c: &GaussQ) -> String {
    if c.im.is_zero() {
        fmt_rational(&c.re)
    } else if c.re.is_zero() && c.im.abs().is_one() {
        if c.im.is_negative() {
            "-i".into()
        } else {
            "i".into()
        }
    } else if c.re.is_zero() {
        format!("{}i", fmt_rational(&c.im))
    } else {
        let sign = if c.im.is_negative() { "-" } else { "+" };
        format!("({}{}{}i)", fmt_rational(&c.re), sign, fmt_rational(&c.im.abs()))
    }
}

impl fmt::Display for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.im.is_zero() && c.re.is_negative();
            let mag = if negative { -c.clone() } else { c.clone() };
            match (first, negative) {
                (true, true) => write!(f, "-")?,
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
                (true, false) => {}
            }
            first = false;
            let unit = mag.is_one();
            match (i, unit) {
                (0, _) => write!(f, "{}", fmt_gq(&mag))?,
                (1, true) => write!(f, "z")?,
                (1, false) => write!(f, "{}*z", fmt_gq(&mag))?,
                (_, true) => write!(f, "z^{i}")?,
                (_, false) => write!(f, "{}*z^{}", fmt_gq(&mag), i)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> ExactPoly {
        ExactPoly::from_i64(c)
    }

    #[test]
    fn display() {
        assert_eq!(p(&[1, 0, 1]).to_string(), "z^2 + 1");
        assert_eq!(p(&[-3, -1, 2]).to_string(), "2*z^2 - z - 3");
        assert_eq!(p(&[0, -1]).to_string(), "-z");
        assert_eq!(ExactPoly::new(vec![gq_ratio(-16, 27), gq_int(0), gq_i()]).to_string(), "i*z^2 - 16/27");
    }

    #[test]
    fn arithmetic() {
        let a = p(&[1, 1]); // z + 1
        let b = p(&[-1, 1]); // z - 1
        assert_eq!(a.mul(&b), p(&[-1, 0, 1]));
        assert_eq!(a.pow(3), p(&[1, 3, 3, 1]));
        assert_eq!(p(&[0, 0, 0, 1]).derivative(), p(&[0, 0, 3]));
        assert!(p(&[5]).derivative().is_zero());
        assert_eq!(p(&[1, 0, 1]).derivative(), p(&[0, 2]));
    }

    #[test]
    fn division_and_gcd() {
        let f = p(&[-1, 0, 1]);
        let (q, r) = f.div_rem(&p(&[-1, 1])).unwrap();
        assert_eq!(q, p(&[1, 1]));
        assert!(r.is_zero());
        let g = p(&[-1, 0, 1]).gcd(&p(&[1, 2, 1]));
        assert_eq!(g, p(&[1, 1]));
        assert_eq!(p(&[1, 0, 1]).gcd(&p(&[0, 1])), p(&[1]));
        assert!(p(&[1]).div_rem(&ExactPoly::zero()).is_none());
    }

    #[test]
    fn squarefree() {
        // (z-2)^3 (z+1)
        let f = p(&[-2, 1]).pow(3).mul(&p(&[1, 1]));
        let sf = f.squarefree_decomposition();
        assert_eq!(sf, vec![(p(&[1, 1]), 1), (p(&[-2, 1]), 3)]);
        // z^4
        assert_eq!(p(&[0, 0, 0, 0, 1]).squarefree_decomposition(), vec![(p(&[0, 1]), 4)]);
        assert!(p(&[7]).squarefree_decomposition().is_empty());
    }

    #[test]
    fn gaussian_coefficients() {
        // (z - i)^2 = z^2 - 2i z - 1
        let zi = ExactPoly::new(vec![-gq_i(), gq_int(1)]);
        let sq = zi.pow(2);
        assert_eq!(sq.coeff(1), gq_int(-2) * gq_i());
        assert_eq!(sq.squarefree_decomposition(), vec![(zi, 2)]);
    }

    #[test]
    fn reversal_and_zero_order() {
        let f = p(&[0, 0, 3, 1]);
        assert_eq!(f.zero_order(), 2);
        assert_eq!(f.reversed(4), p(&[0, 1, 3]));
    }

    #[test]
    fn float_conversion_is_exact() {
        let c = Complex64::new(0.1, -2.5);
        let q = gq_from_f64(c).unwrap();
        assert_eq!(gq_to_f64(&q), c);
        assert_eq!(fmt_gq(&gq_ratio(-16, 27)), "-16/27");
    }
}
