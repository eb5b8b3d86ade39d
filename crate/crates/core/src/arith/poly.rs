//! Sparse multivariate polynomials with exact rational coefficients.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Signed, Zero};

use super::rat::{fmt_rat, Rat};
use crate::error::{Error, Result};

/// The indeterminates a polynomial may mention. The derived order is the
/// fixed variable order used by the monomial ordering and by rendering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// `∂`, the translation operator acting on free `ℂ[∂]`-modules.
    D,
    /// `λ`
    Lambda,
    /// `μ`
    Mu,
    /// `ν`
    Nu,
    /// `λ_k`, the cochain slot variables (`k ≥ 1`).
    L(u8),
    /// `Δ`, conformal weight parameter.
    Delta,
    /// `α`, spectral shift parameter.
    Alpha,
    /// Scratch variables for internal substitutions.
    T(u8),
}

impl Var {
    pub fn name(&self) -> String {
        match self {
            Var::D => "d".into(),
            Var::Lambda => "l".into(),
            Var::Mu => "mu".into(),
            Var::Nu => "nu".into(),
            Var::L(k) => format!("l{k}"),
            Var::Delta => "Delta".into(),
            Var::Alpha => "alpha".into(),
            Var::T(k) => format!("t{k}"),
        }
    }

    pub fn from_name(s: &str) -> Option<Var> {
        match s {
            "d" => Some(Var::D),
            "l" => Some(Var::Lambda),
            "mu" => Some(Var::Mu),
            "nu" => Some(Var::Nu),
            "Delta" => Some(Var::Delta),
            "alpha" => Some(Var::Alpha),
            _ => {
                let (head, digits) = s.split_at(1);
                let k: u8 = digits.parse().ok()?;
                if digits.starts_with('0') && digits.len() > 1 {
                    return None;
                }
                match head {
                    "l" if k >= 1 => Some(Var::L(k)),
                    "t" => Some(Var::T(k)),
                    _ => None,
                }
            }
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A monomial: sorted `(variable, exponent)` pairs with positive exponents.
///
/// Ordered graded-lexicographically: total degree first, then the exponent
/// vectors compared lexicographically in the fixed [`Var`] order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn from_pairs(mut pairs: Vec<(Var, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_by_key(|&(v, _)| v);
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some((w, f)) if *w == v => *f += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Splits off the power of `v`: returns `(exponent, rest)`.
    pub fn split(&self, v: Var) -> (u32, Monomial) {
        let mut rest = Vec::with_capacity(self.0.len());
        let mut e = 0;
        for &(w, f) in &self.0 {
            if w == v {
                e = f;
            } else {
                rest.push((w, f));
            }
        }
        (e, Monomial(rest))
    }

    fn render(&self) -> String {
        self.0
            .iter()
            .map(|&(v, e)| {
                if e == 1 {
                    v.name()
                } else {
                    format!("{}^{}", v.name(), e)
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (a, b) = (&self.0, &other.0);
            for (x, y) in a.iter().zip(b.iter()) {
                if x.0 != y.0 {
                    // The monomial carrying the earlier variable is larger.
                    return if x.0 < y.0 {
                        Ordering::Greater
                    } else {
                        Ordering::Less
                    };
                }
                if x.1 != y.1 {
                    return x.1.cmp(&y.1);
                }
            }
            a.len().cmp(&b.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial; never stores a zero coefficient, so structural
/// equality is mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct MPoly {
    terms: BTreeMap<Monomial, Rat>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn one() -> Self {
        MPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        MPoly::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        MPoly::constant(super::rat::int(n))
    }

    pub fn var(v: Var) -> Self {
        MPoly::term(Rat::one(), Monomial::var(v, 1))
    }

    pub fn term(c: Rat, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MPoly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rat)>>(it: I) -> Self {
        let mut p = MPoly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn contains(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.pairs().iter().map(|&(v, _)| v))
            .collect()
    }

    pub fn scale(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Groups the terms by the exponent of `v`: `self = Σ_k v^k · out[k]`.
    pub fn split_by(&self, v: Var) -> BTreeMap<u32, MPoly> {
        let mut out: BTreeMap<u32, MPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(v);
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out
    }

    /// Coefficient of `v^k` (a polynomial free of `v`).
    pub fn coeff_of(&self, v: Var, k: u32) -> MPoly {
        MPoly::from_terms(self.terms.iter().filter_map(|(m, c)| {
            let (e, rest) = m.split(v);
            (e == k).then(|| (rest, c.clone()))
        }))
    }

    /// Replaces every occurrence of `v` by `image` in a single pass. `image`
    /// may mention `v` itself (the replacement is not re-applied).
    pub fn substitute(&self, v: Var, image: &MPoly) -> MPoly {
        if !self.contains(v) {
            return self.clone();
        }
        let mut powers: Vec<MPoly> = vec![MPoly::one()];
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(v);
            while powers.len() <= e as usize {
                let next = powers.last().unwrap() * image;
                powers.push(next);
            }
            let piece = powers[e as usize].mul_monomial(&rest, c);
            out += piece;
        }
        out
    }

    /// Simultaneous substitution of several variables.
    pub fn substitute_many(&self, images: &[(Var, MPoly)]) -> MPoly {
        if images.is_empty() {
            return self.clone();
        }
        let mut cache: BTreeMap<(usize, u32), MPoly> = BTreeMap::new();
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            let mut piece = MPoly::constant(c.clone());
            let mut kept = Vec::new();
            for &(v, e) in m.pairs() {
                match images.iter().position(|(w, _)| *w == v) {
                    Some(idx) => {
                        let pw = cache
                            .entry((idx, e))
                            .or_insert_with(|| images[idx].1.pow(e))
                            .clone();
                        piece = &piece * &pw;
                    }
                    None => kept.push((v, e)),
                }
            }
            out += piece.mul_monomial(&Monomial(kept), &Rat::one());
        }
        out
    }

    /// `v := image` with the non-termination guard of the public contract:
    /// the image must not mention `v`.
    pub fn subst_affine(&self, v: Var, image: &MPoly) -> Result<MPoly> {
        if image.contains(v) {
            return Err(Error::SelfSubstitution(v.name()));
        }
        Ok(self.substitute(v, image))
    }

    pub fn eval(&self, v: Var, value: &Rat) -> MPoly {
        self.substitute(v, &MPoly::constant(value.clone()))
    }

    fn mul_monomial(&self, m: &Monomial, c: &Rat) -> MPoly {
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(n, a)| (n.mul(m), a * c))
                .filter(|(_, a)| !a.is_zero())
                .collect(),
        }
    }

    /// Formal partial derivative.
    pub fn derivative(&self, v: Var) -> MPoly {
        MPoly::from_terms(self.terms.iter().filter_map(|(m, c)| {
            let (e, rest) = m.split(v);
            (e > 0).then(|| {
                (
                    rest.mul(&Monomial::var(v, e - 1)),
                    c * Rat::from_integer(e.into()),
                )
            })
        }))
    }
}

impl From<Var> for MPoly {
    fn from(v: Var) -> Self {
        MPoly::var(v)
    }
}

impl From<Rat> for MPoly {
    fn from(c: Rat) -> Self {
        MPoly::constant(c)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                f.write_str(&fmt_rat(&a))?;
            } else if a.is_one() {
                f.write_str(&m.render())?;
            } else {
                write!(f, "{}*{}", fmt_rat(&a), m.render())?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn add(self, rhs: &'a MPoly) -> MPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for MPoly {
    type Output = MPoly;
    fn add(mut self, rhs: MPoly) -> MPoly {
        self += rhs;
        self
    }
}

impl<'a> AddAssign<&'a MPoly> for MPoly {
    fn add_assign(&mut self, rhs: &'a MPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl AddAssign for MPoly {
    fn add_assign(&mut self, rhs: MPoly) {
        if self.terms.is_empty() {
            *self = rhs;
            return;
        }
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl<'a> SubAssign<&'a MPoly> for MPoly {
    fn sub_assign(&mut self, rhs: &'a MPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl SubAssign for MPoly {
    fn sub_assign(&mut self, rhs: MPoly) {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
    }
}

impl<'a> Sub<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &'a MPoly) -> MPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for MPoly {
    type Output = MPoly;
    fn sub(mut self, rhs: MPoly) -> MPoly {
        self -= rhs;
        self
    }
}

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -self.clone()
    }
}

impl<'a> Mul<&'a MPoly> for &'a MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &'a MPoly) -> MPoly {
        let mut out = MPoly::zero();
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        for (m, a) in &self.terms {
            for (n, b) in &rhs.terms {
                out.add_term(m.mul(n), a * b);
            }
        }
        out
    }
}

impl Mul for MPoly {
    type Output = MPoly;
    fn mul(self, rhs: MPoly) -> MPoly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::{int, rat};

    fn d() -> MPoly {
        MPoly::var(Var::D)
    }
    fn l() -> MPoly {
        MPoly::var(Var::Lambda)
    }
    fn mu() -> MPoly {
        MPoly::var(Var::Mu)
    }

    #[test]
    fn difference_of_squares() {
        let p = &(&l() + &d()) * &(&l() - &d());
        assert_eq!(p, &l().pow(2) - &d().pow(2));
    }

    #[test]
    fn additive_identity() {
        let p = &l().pow(3) + &d().scale(&rat(1, 2));
        assert_eq!(&p + &MPoly::zero(), p);
    }

    #[test]
    fn cube_matches_repeated_multiplication() {
        let s = &l() + &d();
        let mut expected = MPoly::zero();
        // (λ+∂)^3 expanded by hand-rolled repeated multiplication.
        let mut acc = MPoly::one();
        for _ in 0..3 {
            acc = &acc * &s;
        }
        expected += acc;
        let want = l().pow(3)
            + (&l().pow(2) * &d()).scale(&int(3))
            + (&l() * &d().pow(2)).scale(&int(3))
            + d().pow(3);
        assert_eq!(expected, want);
        assert_eq!(s.pow(3), want);
    }

    #[test]
    fn substitution_binomial() {
        let image = -(&l() + &d());
        let p = mu().pow(2).subst_affine(Var::Mu, &image).unwrap();
        assert_eq!(p, l().pow(2) + (&l() * &d()).scale(&int(2)) + d().pow(2));
    }

    #[test]
    fn substitution_absent_variable_is_noop() {
        let p = &l() + &d();
        assert_eq!(p.subst_affine(Var::Mu, &MPoly::var(Var::Nu)).unwrap(), p);
    }

    #[test]
    fn substitution_virasoro_skew_step() {
        let p = &d() + &mu().scale(&int(2));
        let image = -(&l() + &d());
        let got = p.subst_affine(Var::Mu, &image).unwrap();
        assert_eq!(got, -(d() + l().scale(&int(2))));
    }

    #[test]
    fn self_substitution_rejected() {
        let p = mu();
        assert!(p.subst_affine(Var::Mu, &(&mu() + &l())).is_err());
        // the internal single-pass substitution allows it
        assert_eq!(p.substitute(Var::Mu, &(&mu() + &l())), &mu() + &l());
    }

    #[test]
    fn rendering_order() {
        let p = l().pow(3).scale(&int(2)) + (&d() * &l()).scale(&rat(1, 2));
        assert_eq!(p.to_string(), "2*l^3 + 1/2*d*l");
        let q = -(d()) + MPoly::int(-3);
        assert_eq!(q.to_string(), "-d - 3");
        assert_eq!(MPoly::zero().to_string(), "0");
    }

    #[test]
    fn var_names_round_trip() {
        for v in [
            Var::D,
            Var::Lambda,
            Var::Mu,
            Var::Nu,
            Var::L(1),
            Var::L(12),
            Var::Delta,
            Var::Alpha,
            Var::T(0),
        ] {
            assert_eq!(Var::from_name(&v.name()), Some(v));
        }
        assert_eq!(Var::from_name("l0"), None);
        assert_eq!(Var::from_name("x"), None);
    }

    #[test]
    fn simultaneous_substitution_swaps() {
        let p = &MPoly::var(Var::L(1)) - &MPoly::var(Var::L(2)).scale(&int(3));
        let swapped = p.substitute_many(&[
            (Var::L(1), MPoly::var(Var::L(2))),
            (Var::L(2), MPoly::var(Var::L(1))),
        ]);
        assert_eq!(
            swapped,
            &MPoly::var(Var::L(2)) - &MPoly::var(Var::L(1)).scale(&int(3))
        );
    }
}
