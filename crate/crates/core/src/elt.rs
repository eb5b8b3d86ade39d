//! Elements of free `ℂ[∂]`-modules: finite maps from basis labels to
//! polynomial coefficients. The coefficient polynomials may mention `∂`
//! (acting by multiplication) as well as λ-variables and parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::arith::{MPoly, Rat, Var};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeElt<K: Ord> {
    terms: BTreeMap<K, MPoly>,
}

impl<K: Ord> Default for FreeElt<K> {
    fn default() -> Self {
        FreeElt {
            terms: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> FreeElt<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(k: K) -> Self {
        Self::term(k, MPoly::one())
    }

    pub fn term(k: K, c: MPoly) -> Self {
        let mut e = Self::zero();
        e.add_term(k, c);
        e
    }

    pub fn from_terms<I: IntoIterator<Item = (K, MPoly)>>(it: I) -> Self {
        let mut e = Self::zero();
        for (k, c) in it {
            e.add_term(k, c);
        }
        e
    }

    pub fn add_term(&mut self, k: K, c: MPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &MPoly) {
        for (k, p) in &other.terms {
            self.add_term(k.clone(), p * c);
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

    pub fn terms(&self) -> impl Iterator<Item = (&K, &MPoly)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (K, MPoly)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, k: &K) -> MPoly {
        self.terms.get(k).cloned().unwrap_or_default()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn scale(&self, c: &MPoly) -> Self {
        self.map_coeffs(|p| p * c)
    }

    pub fn scale_rat(&self, c: &Rat) -> Self {
        self.map_coeffs(|p| p.scale(c))
    }

    pub fn map_coeffs(&self, f: impl Fn(&MPoly) -> MPoly) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, p)| (k.clone(), f(p))))
    }

    pub fn map_keys<J: Ord + Clone>(&self, f: impl Fn(&K) -> J) -> FreeElt<J> {
        FreeElt::from_terms(self.terms.iter().map(|(k, p)| (f(k), p.clone())))
    }

    /// Single-pass substitution `v := image` in every coefficient.
    pub fn substitute(&self, v: Var, image: &MPoly) -> Self {
        self.map_coeffs(|p| p.substitute(v, image))
    }

    pub fn substitute_many(&self, images: &[(Var, MPoly)]) -> Self {
        self.map_coeffs(|p| p.substitute_many(images))
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.values().map(|p| p.degree_in(v)).max().unwrap_or(0)
    }

    /// Coefficient of `v^k` (as an element whose coefficients no longer
    /// mention `v`).
    pub fn coeff_of(&self, v: Var, k: u32) -> Self {
        self.map_coeffs(|p| p.coeff_of(v, k))
    }

    /// Renders with the supplied label names, e.g. `(d + 2*l)*L`.
    pub fn render(&self, name: impl Fn(&K) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, p)| {
                if p.is_one() {
                    name(k)
                } else if p.len() == 1 && !p.to_string().starts_with('-') {
                    format!("{}*{}", p, name(k))
                } else {
                    format!("({})*{}", p, name(k))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl<K: Ord + Clone + fmt::Display> fmt::Display for FreeElt<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(|k| k.to_string()))
    }
}

impl<'a, K: Ord + Clone> Add<&'a FreeElt<K>> for &'a FreeElt<K> {
    type Output = FreeElt<K>;
    fn add(self, o: &'a FreeElt<K>) -> FreeElt<K> {
        let mut out = self.clone();
        for (k, p) in &o.terms {
            out.add_term(k.clone(), p.clone());
        }
        out
    }
}

impl<K: Ord + Clone> Add for FreeElt<K> {
    type Output = FreeElt<K>;
    fn add(mut self, o: FreeElt<K>) -> FreeElt<K> {
        for (k, p) in o.terms {
            self.add_term(k, p);
        }
        self
    }
}

impl<'a, K: Ord + Clone> Sub<&'a FreeElt<K>> for &'a FreeElt<K> {
    type Output = FreeElt<K>;
    fn sub(self, o: &'a FreeElt<K>) -> FreeElt<K> {
        let mut out = self.clone();
        for (k, p) in &o.terms {
            out.add_term(k.clone(), -p);
        }
        out
    }
}

impl<K: Ord + Clone> Sub for FreeElt<K> {
    type Output = FreeElt<K>;
    fn sub(self, o: FreeElt<K>) -> FreeElt<K> {
        &self - &o
    }
}

impl<K: Ord + Clone> Neg for FreeElt<K> {
    type Output = FreeElt<K>;
    fn neg(self) -> FreeElt<K> {
        self.map_coeffs(|p| -p)
    }
}

impl<K: Ord + Clone> Neg for &FreeElt<K> {
    type Output = FreeElt<K>;
    fn neg(self) -> FreeElt<K> {
        self.map_coeffs(|p| -p)
    }
}
