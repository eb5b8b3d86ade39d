//! The Grassmann algebra `Λ(N)` on odd generators `ξ_1, …, ξ_N` with
//! polynomial coefficients.
//!
//! A monomial `ξ_I` is stored as a bitmask (bit `i-1` set iff `i ∈ I`) and
//! always denotes the product with factors in increasing index order.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::poly::MPoly;
use super::rat::Rat;
use crate::error::{Error, Result};

pub type Mask = u32;

pub const MAX_GENERATORS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GrassmannElt {
    n: usize,
    terms: BTreeMap<Mask, MPoly>,
}

/// Sign of `ξ_I ξ_J` relative to `ξ_{I∪J}`; `None` when `I ∩ J ≠ ∅`.
pub fn merge_sign(i: Mask, j: Mask) -> Option<i32> {
    if i & j != 0 {
        return None;
    }
    // count pairs (a ∈ I, b ∈ J) with a > b
    let mut inversions = 0u32;
    let mut rest = j;
    while rest != 0 {
        let b = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (i >> (b + 1)).count_ones();
    }
    Some(if inversions.is_multiple_of(2) { 1 } else { -1 })
}

/// `|I|` for a monomial mask.
pub fn degree(mask: Mask) -> u32 {
    mask.count_ones()
}

pub fn mask_of(indices: &[usize]) -> Mask {
    indices.iter().fold(0, |m, &i| m | (1 << (i - 1)))
}

pub fn indices_of(mask: Mask) -> Vec<usize> {
    (0..32).filter(|b| mask & (1 << b) != 0).map(|b| b + 1).collect()
}

impl GrassmannElt {
    pub fn zero(n: usize) -> Self {
        GrassmannElt {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        GrassmannElt::monomial(n, 0, MPoly::one())
    }

    pub fn monomial(n: usize, mask: Mask, coeff: MPoly) -> Self {
        let mut g = GrassmannElt::zero(n);
        g.add_term(mask, coeff);
        g
    }

    /// The generator `ξ_i` (1-based).
    pub fn xi(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i > n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        Ok(GrassmannElt::monomial(n, 1 << (i - 1), MPoly::one()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_term(&mut self, mask: Mask, coeff: MPoly) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(mask).or_default();
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mask, &MPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mask: Mask) -> MPoly {
        self.terms.get(&mask).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Parity of a homogeneous element (`None` for mixed parity or zero).
    pub fn parity(&self) -> Option<bool> {
        let mut it = self.terms.keys().map(|&m| degree(m) % 2 == 1);
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    pub fn add(&self, other: &GrassmannElt) -> Result<GrassmannElt> {
        self.same_n(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &MPoly) -> GrassmannElt {
        let mut out = GrassmannElt::zero(self.n);
        for (m, a) in &self.terms {
            out.add_term(*m, a * c);
        }
        out
    }

    pub fn scale_rat(&self, c: &Rat) -> GrassmannElt {
        if c.is_zero() {
            return GrassmannElt::zero(self.n);
        }
        self.scale(&MPoly::constant(c.clone()))
    }

    fn same_n(&self, other: &GrassmannElt) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GrassmannMismatch(self.n, other.n));
        }
        Ok(())
    }

    /// Anticommutative product.
    pub fn mul(&self, other: &GrassmannElt) -> Result<GrassmannElt> {
        self.same_n(other)?;
        let mut out = GrassmannElt::zero(self.n);
        for (&i, a) in &self.terms {
            for (&j, b) in &other.terms {
                if let Some(s) = merge_sign(i, j) {
                    let c = a * b;
                    out.add_term(i | j, if s < 0 { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// Odd left derivative `∂/∂ξ_i`.
    pub fn deriv(&self, i: usize) -> Result<GrassmannElt> {
        if i == 0 || i > self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        let bit = 1 << (i - 1);
        let mut out = GrassmannElt::zero(self.n);
        for (&m, c) in &self.terms {
            if m & bit == 0 {
                continue;
            }
            let before = (m & (bit - 1)).count_ones();
            let c = if before.is_multiple_of(2) { c.clone() } else { -c.clone() };
            out.add_term(m & !bit, c);
        }
        Ok(out)
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&MPoly) -> MPoly) -> GrassmannElt {
        let mut out = GrassmannElt::zero(self.n);
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }
}

pub fn render_mask(mask: Mask) -> String {
    let idx = indices_of(mask);
    if idx.is_empty() {
        "1".into()
    } else {
        format!(
            "xi{{{}}}",
            idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
        )
    }
}

impl fmt::Display for GrassmannElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({})*{}", c, render_mask(*m)))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xi(n: usize, i: usize) -> GrassmannElt {
        GrassmannElt::xi(n, i).unwrap()
    }

    fn mono(n: usize, idx: &[usize], c: i64) -> GrassmannElt {
        GrassmannElt::monomial(n, mask_of(idx), MPoly::int(c))
    }

    #[test]
    fn ordered_product() {
        assert_eq!(xi(2, 1).mul(&xi(2, 2)).unwrap(), mono(2, &[1, 2], 1));
    }

    #[test]
    fn one_transposition() {
        assert_eq!(xi(2, 2).mul(&xi(2, 1)).unwrap(), mono(2, &[1, 2], -1));
    }

    #[test]
    fn repeated_generator_vanishes() {
        assert!(mono(2, &[1, 2], 1).mul(&xi(2, 1)).unwrap().is_zero());
    }

    #[test]
    fn mismatched_n() {
        assert!(xi(2, 1).mul(&xi(3, 1)).is_err());
    }

    #[test]
    fn derivative_examples() {
        let x12 = mono(2, &[1, 2], 1);
        assert_eq!(x12.deriv(1).unwrap(), xi(2, 2));
        assert_eq!(x12.deriv(2).unwrap(), mono(2, &[1], -1));
        assert!(xi(2, 2).deriv(1).unwrap().is_zero());
        assert!(x12.deriv(3).is_err());
        assert!(x12.deriv(0).is_err());
    }

    #[test]
    fn derivative_sign_matches_leibniz() {
        // ∂_2(ξ1 ξ2) = (∂_2 ξ1) ξ2 + (-1)^{p(ξ1)} ξ1 (∂_2 ξ2) = -ξ1
        let lhs = xi(2, 1).mul(&xi(2, 2)).unwrap().deriv(2).unwrap();
        let t1 = xi(2, 1).deriv(2).unwrap().mul(&xi(2, 2)).unwrap();
        let t2 = xi(2, 1)
            .mul(&xi(2, 2).deriv(2).unwrap())
            .unwrap()
            .scale(&MPoly::int(-1));
        assert_eq!(lhs, t1.add(&t2).unwrap());
        assert_eq!(lhs, mono(2, &[1], -1));
    }

    #[test]
    fn merge_sign_counts_inversions() {
        assert_eq!(merge_sign(mask_of(&[2, 3]), mask_of(&[1])), Some(1));
        assert_eq!(merge_sign(mask_of(&[3]), mask_of(&[1, 2])), Some(1));
        assert_eq!(merge_sign(mask_of(&[2]), mask_of(&[1, 3])), Some(-1));
        assert_eq!(merge_sign(mask_of(&[2]), mask_of(&[2])), None);
    }
}
