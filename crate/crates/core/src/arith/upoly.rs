//! Dense univariate polynomials over ℚ: interpolation, Euclidean gcd and
//! square-free parts. Used to turn sampled determinants into exact
//! conditions on a single parameter.

use std::fmt;

use num_traits::{One, Zero};

use super::poly::{MPoly, Monomial, Var};
use super::rat::Rat;

/// Coefficients in increasing degree; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UPoly(Vec<Rat>);

impl UPoly {
    pub fn zero() -> Self {
        UPoly(Vec::new())
    }

    pub fn from_coeffs(mut c: Vec<Rat>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn constant(c: Rat) -> Self {
        UPoly::from_coeffs(vec![c])
    }

    /// `x - root`
    pub fn linear(root: &Rat) -> Self {
        UPoly::from_coeffs(vec![-root.clone(), Rat::one()])
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rat {
        self.0.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.0
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        let c = (0..n)
            .map(|i| {
                self.0.get(i).cloned().unwrap_or_default() + o.0.get(i).cloned().unwrap_or_default()
            })
            .collect();
        UPoly::from_coeffs(c)
    }

    pub fn scale(&self, s: &Rat) -> UPoly {
        UPoly::from_coeffs(self.0.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![Rat::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UPoly::from_coeffs(c)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.0.clone();
        let lead = d.lead();
        if r.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut q = vec![Rat::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dj) in d.0.iter().enumerate() {
                    r[k + j] -= &c * dj;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (UPoly::from_coeffs(q), UPoly::from_coeffs(r))
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        self.scale(&(Rat::one() / self.lead()))
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.scale(&-Rat::one()))
    }

    pub fn rem(&self, d: &UPoly) -> UPoly {
        self.div_rem(d).1
    }

    /// Inverse modulo `m`, if `gcd(self, m) = 1`.
    pub fn inverse_mod(&self, m: &UPoly) -> Option<UPoly> {
        let (mut r0, mut r1) = (m.clone(), self.rem(m));
        let (mut t0, mut t1) = (UPoly::zero(), UPoly::constant(Rat::one()));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            t0 = t1;
            t1 = t;
        }
        (r0.degree() == Some(0)).then(|| t0.scale(&(Rat::one() / r0.lead())).rem(m))
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::from_coeffs(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from_integer((i as i64).into()))
                .collect(),
        )
    }

    /// Monic square-free part (product of the distinct irreducible factors).
    pub fn squarefree(&self) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    pub fn divides(&self, o: &UPoly) -> bool {
        if self.is_zero() {
            return o.is_zero();
        }
        o.div_rem(self).1.is_zero()
    }

    /// Lagrange interpolation through `(x_i, y_i)` with distinct `x_i`.
    pub fn interpolate(points: &[(Rat, Rat)]) -> UPoly {
        let mut acc = UPoly::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            if yi.is_zero() {
                continue;
            }
            let mut basis = UPoly::constant(Rat::one());
            let mut denom = Rat::one();
            for (j, (xj, _)) in points.iter().enumerate() {
                if i != j {
                    basis = basis.mul(&UPoly::linear(xj));
                    denom *= xi - xj;
                }
            }
            acc = acc.add(&basis.scale(&(yi / denom)));
        }
        acc
    }

    pub fn to_mpoly(&self, v: Var) -> MPoly {
        MPoly::from_terms(
            self.0
                .iter()
                .enumerate()
                .map(|(i, c)| (Monomial::var(v, i as u32), c.clone())),
        )
    }

    /// Reads a polynomial in the single variable `v`; `None` if other
    /// variables occur.
    pub fn from_mpoly(p: &MPoly, v: Var) -> Option<UPoly> {
        let mut c = vec![Rat::zero(); p.degree_in(v) as usize + 1];
        for (m, a) in p.terms() {
            if m.pairs().iter().any(|&(w, _)| w != v) {
                return None;
            }
            c[m.exponent(v) as usize] = a.clone();
        }
        Some(UPoly::from_coeffs(c))
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_mpoly(Var::Delta))
    }
}
