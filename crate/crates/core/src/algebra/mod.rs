//! Conformal algebras given by λ-product tables on the generators of a free
//! `ℂ[∂]`-module, together with the sesquilinear extension of the table to
//! arbitrary elements.

pub mod builders;
pub mod check;
pub mod superconf;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::arith::grassmann::{self, Mask};
use crate::arith::rat::{binomial, factorial, int, rat};
use crate::arith::{MPoly, Rat, Var};
use crate::elt::FreeElt;
use crate::error::{Error, Result};

/// Generator labels. Finite algebras use `Basis` (names are held by the
/// algebra); the Grassmann families use `Xi` (the function `ξ_I`) and
/// `XiD` (the vector field `ξ_I ∂_i`, 1-based `i`); `gc_N` uses `J`
/// (`J^m_A` for the matrix unit `A = E_{row,col}`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    Basis(u16),
    Xi(Mask),
    XiD(Mask, u8),
    J { row: u8, col: u8, m: u32 },
}

/// An element of the algebra (coefficients in `∂` and parameters), or of
/// `ℂ[λ, …] ⊗ R` when the coefficients also mention λ-variables.
pub type ConfElt = FreeElt<Gen>;

/// Alias used where a value is understood to carry λ-dependence.
pub type LambdaElt = ConfElt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Lie,
    Associative,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Lie => "lie",
            Kind::Associative => "associative",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenInfo {
    pub gen: Gen,
    pub name: String,
    /// `true` for odd generators.
    pub odd: bool,
    pub weight: Rat,
    /// `∂` acts by zero on this generator (only used for central terms).
    pub d_zero: bool,
}

impl GenInfo {
    pub fn new(gen: Gen, name: impl Into<String>, odd: bool, weight: Rat) -> Self {
        GenInfo {
            gen,
            name: name.into(),
            odd,
            weight,
            d_zero: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generators {
    Finite(Vec<GenInfo>),
    /// `J^m_{E_ij}` for `1 ≤ i, j ≤ n`, `m ≥ 0`.
    Gc { n: u8 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Table {
    /// Explicit entries in the variables `λ` and `∂`; missing pairs are 0.
    Finite(BTreeMap<(Gen, Gen), ConfElt>),
    /// `J^m_A λ J^n_B = Σ_j C(m,j)(λ+∂)^j J^{m+n-j}_{AB}`.
    Gc,
    /// `[a_λ b] = a_λ b − p(a,b) b_{−λ−∂} a` over an associative algebra.
    Commutator(Box<ConformalAlgebra>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformalAlgebra {
    name: String,
    kind: Kind,
    is_super: bool,
    gens: Generators,
    table: Table,
}

/// `(−1)^{p(a)p(b)}` as ±1.
pub fn sign(odd_a: bool, odd_b: bool) -> i64 {
    if odd_a && odd_b {
        -1
    } else {
        1
    }
}

impl ConformalAlgebra {
    /// Builds an algebra from an explicit table, validating generator
    /// references, the variables used, and parity coherence.
    pub fn finite(
        name: impl Into<String>,
        kind: Kind,
        is_super: bool,
        gens: Vec<GenInfo>,
        table: BTreeMap<(Gen, Gen), ConfElt>,
    ) -> Result<Self> {
        let alg = ConformalAlgebra {
            name: name.into(),
            kind,
            is_super,
            gens: Generators::Finite(gens),
            table: Table::Finite(BTreeMap::new()),
        };
        let mut clean = BTreeMap::new();
        for ((a, b), v) in table {
            let ia = alg.info(&a)?;
            let ib = alg.info(&b)?;
            for (c, p) in v.terms() {
                let ic = alg.info(c)?;
                if let Some(var) = p.vars().into_iter().find(|v| !matches!(v, Var::Lambda | Var::D)) {
                    return Err(Error::InvalidAlgebra(format!(
                        "entry ({}, {}) mentions the variable `{}`",
                        ia.name, ib.name, var
                    )));
                }
                if ic.odd != (ia.odd ^ ib.odd) {
                    return Err(Error::InvalidAlgebra(format!(
                        "parity mismatch: ({}, {}) produces {}",
                        ia.name, ib.name, ic.name
                    )));
                }
            }
            if !v.is_zero() {
                clean.insert((a, b), alg.normalize(v));
            }
        }
        Ok(ConformalAlgebra {
            table: Table::Finite(clean),
            ..alg
        })
    }

    /// `gc_N` (associative, `Cend_N`) or its commutator Lie algebra.
    pub fn gc(n: u8, kind: Kind) -> Result<Self> {
        if n == 0 {
            return Err(Error::Unsupported("gc_0".into()));
        }
        let assoc = ConformalAlgebra {
            name: format!("cend:{n}"),
            kind: Kind::Associative,
            is_super: false,
            gens: Generators::Gc { n },
            table: Table::Gc,
        };
        Ok(match kind {
            Kind::Associative => assoc,
            Kind::Lie => assoc.commutator(format!("gc:{n}")),
        })
    }

    /// The Lie algebra with bracket `a_λ b − p(a,b) b_{−λ−∂} a`.
    pub fn commutator(self, name: impl Into<String>) -> Self {
        ConformalAlgebra {
            name: name.into(),
            kind: Kind::Lie,
            is_super: self.is_super,
            gens: self.gens.clone(),
            table: Table::Commutator(Box::new(self)),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_super(&self) -> bool {
        self.is_super
    }

    pub fn generators_def(&self) -> &Generators {
        &self.gens
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    /// Explicit table entries (finite algebras only).
    pub fn finite_table(&self) -> Option<&BTreeMap<(Gen, Gen), ConfElt>> {
        match &self.table {
            Table::Finite(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.gens, Generators::Finite(_))
    }

    /// All generators; for `gc_N` those with `m ≤ bound`.
    pub fn generators(&self, bound: u32) -> Vec<Gen> {
        match &self.gens {
            Generators::Finite(g) => g.iter().map(|i| i.gen).collect(),
            Generators::Gc { n } => {
                let mut out = Vec::new();
                for m in 0..=bound {
                    for row in 1..=*n {
                        for col in 1..=*n {
                            out.push(Gen::J { row, col, m });
                        }
                    }
                }
                out
            }
        }
    }

    pub fn rank(&self) -> Option<usize> {
        match &self.gens {
            Generators::Finite(g) => Some(g.len()),
            Generators::Gc { .. } => None,
        }
    }

    pub fn info(&self, g: &Gen) -> Result<GenInfo> {
        match (&self.gens, g) {
            (Generators::Finite(list), _) => list
                .iter()
                .find(|i| i.gen == *g)
                .cloned()
                .ok_or_else(|| Error::UnknownGenerator(format!("{g:?}"))),
            (Generators::Gc { n }, Gen::J { row, col, m })
                if (1..=*n).contains(row) && (1..=*n).contains(col) =>
            {
                Ok(GenInfo::new(*g, gc_name(*row, *col, *m), false, int(*m as i64 + 1)))
            }
            _ => Err(Error::UnknownGenerator(format!("{g:?}"))),
        }
    }

    pub fn gen_name(&self, g: &Gen) -> String {
        self.info(g).map(|i| i.name).unwrap_or_else(|_| format!("{g:?}"))
    }

    pub fn odd(&self, g: &Gen) -> bool {
        self.info(g).map(|i| i.odd).unwrap_or(false)
    }

    pub fn weight(&self, g: &Gen) -> Result<Rat> {
        Ok(self.info(g)?.weight)
    }

    pub fn d_zero(&self, g: &Gen) -> bool {
        self.info(g).map(|i| i.d_zero).unwrap_or(false)
    }

    pub fn by_name(&self, name: &str) -> Result<Gen> {
        match &self.gens {
            Generators::Finite(list) => list
                .iter()
                .find(|i| i.name == name)
                .map(|i| i.gen)
                .ok_or_else(|| Error::UnknownGenerator(name.into())),
            Generators::Gc { n } => parse_gc_name(name)
                .filter(|(r, c, _)| (1..=*n).contains(r) && (1..=*n).contains(c))
                .map(|(row, col, m)| Gen::J { row, col, m })
                .ok_or_else(|| Error::UnknownGenerator(name.into())),
        }
    }

    pub fn render(&self, x: &ConfElt) -> String {
        x.render(|g| self.gen_name(g))
    }

    /// Parity of a homogeneous element; `None` for zero or mixed parity.
    pub fn parity_of(&self, x: &ConfElt) -> Option<bool> {
        let mut it = x.keys().map(|g| self.odd(g));
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    /// Sets `∂ := 0` on coefficients of generators annihilated by `∂`.
    fn normalize(&self, x: ConfElt) -> ConfElt {
        if !x.keys().any(|g| self.d_zero(g)) {
            return x;
        }
        ConfElt::from_terms(x.into_terms().map(|(g, p)| {
            if self.d_zero(&g) {
                (g, p.substitute(Var::D, &MPoly::zero()))
            } else {
                (g, p)
            }
        }))
    }

    /// The table value `a_λ b` in the variables `λ`, `∂`.
    pub fn table_entry(&self, a: &Gen, b: &Gen) -> Result<ConfElt> {
        match &self.table {
            Table::Finite(t) => {
                self.info(a)?;
                self.info(b)?;
                Ok(t.get(&(*a, *b)).cloned().unwrap_or_default())
            }
            Table::Gc => gc_product(self, a, b),
            Table::Commutator(inner) => {
                let x = ConfElt::basis(*a);
                let y = ConfElt::basis(*b);
                let direct = inner.lambda_product(&x, &y, Var::Lambda)?;
                let swapped = inner.conjugate(&x, &y, Var::Lambda)?;
                let s = sign(self.odd(a), self.odd(b));
                Ok(&direct - &swapped.scale_rat(&int(s)))
            }
        }
    }

    /// `x_Λ y` for an arbitrary polynomial `Λ` (which may mention `λ`, `μ`,
    /// …). Left coefficients `P(∂)` become `P(−Λ)`, right coefficients
    /// `Q(∂)` become `Q(∂+Λ)`, and the table's `λ` becomes `Λ`.
    pub fn product_at(&self, x: &ConfElt, y: &ConfElt, lam: &MPoly) -> Result<ConfElt> {
        let minus = -lam;
        let shifted = &MPoly::var(Var::D) + lam;
        let mut out = ConfElt::zero();
        for (a, p) in x.terms() {
            let left = if self.d_zero(a) { p.clone() } else { p.substitute(Var::D, &minus) };
            if left.is_zero() {
                continue;
            }
            for (b, q) in y.terms() {
                let entry = self.table_entry(a, b)?;
                if entry.is_zero() {
                    continue;
                }
                let right = if self.d_zero(b) { q.clone() } else { q.substitute(Var::D, &shifted) };
                let value = entry.substitute(Var::Lambda, lam);
                out.add_scaled(&value, &(&left * &right));
            }
        }
        Ok(self.normalize(out))
    }

    /// `x_v y` in the variable `v`.
    pub fn lambda_product(&self, x: &ConfElt, y: &ConfElt, v: Var) -> Result<ConfElt> {
        self.product_at(x, y, &MPoly::var(v))
    }

    /// `y_{−v−∂} x`: computes `y_t x` in a scratch variable and substitutes
    /// `t := −v−∂`.
    pub fn conjugate(&self, x: &ConfElt, y: &ConfElt, v: Var) -> Result<ConfElt> {
        let t = Var::T(0);
        let raw = self.lambda_product(y, x, t)?;
        let image = -(&MPoly::var(v) + &MPoly::var(Var::D));
        let mut out = ConfElt::zero();
        for (g, p) in raw.terms() {
            out.add_term(*g, p.subst_affine(t, &image)?);
        }
        Ok(self.normalize(out))
    }

    /// `x_(n) y = n! · [λ^n](x_λ y)`.
    pub fn nth_product(&self, x: &ConfElt, y: &ConfElt, n: u32) -> Result<ConfElt> {
        let p = self.lambda_product(x, y, Var::Lambda)?;
        Ok(p.coeff_of(Var::Lambda, n).scale_rat(&factorial(n)))
    }

    /// Extends a finite algebra by one even central generator `name` on
    /// which `∂` acts by zero, adding `c_{ab}(λ)·C` to the listed entries.
    pub fn with_central_term(
        &self,
        name: &str,
        terms: &BTreeMap<(Gen, Gen), MPoly>,
    ) -> Result<ConformalAlgebra> {
        let (Generators::Finite(list), Table::Finite(table)) = (&self.gens, &self.table) else {
            return Err(Error::Unsupported("central extension of a rule-generated algebra".into()));
        };
        let next = list
            .iter()
            .filter_map(|g| match g.gen {
                Gen::Basis(k) => Some(k + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let c = Gen::Basis(next);
        let mut gens = list.clone();
        gens.push(GenInfo {
            gen: c,
            name: name.into(),
            odd: false,
            weight: Rat::zero(),
            d_zero: true,
        });
        let mut t = table.clone();
        for ((a, b), p) in terms {
            if p.vars().iter().any(|v| *v != Var::Lambda) {
                return Err(Error::InvalidAlgebra("central term must be a polynomial in λ".into()));
            }
            let mut e = t.remove(&(*a, *b)).unwrap_or_default();
            e.add_term(c, p.clone());
            t.insert((*a, *b), e);
        }
        ConformalAlgebra::finite(format!("{}+{}", self.name, name), self.kind, self.is_super, gens, t)
    }

    /// Copy of a finite algebra with one table entry replaced.
    pub fn with_entry(&self, a: Gen, b: Gen, value: ConfElt) -> Result<ConformalAlgebra> {
        let (Generators::Finite(list), Table::Finite(table)) = (&self.gens, &self.table) else {
            return Err(Error::Unsupported("editing a rule-generated table".into()));
        };
        let mut t = table.clone();
        t.insert((a, b), value);
        ConformalAlgebra::finite(self.name.clone(), self.kind, self.is_super, list.clone(), t)
    }
}

pub fn gc_name(row: u8, col: u8, m: u32) -> String {
    format!("J{row}{col}m{m}")
}

fn parse_gc_name(s: &str) -> Option<(u8, u8, u32)> {
    let rest = s.strip_prefix('J')?;
    let (rc, m) = rest.split_once('m')?;
    let mut chars = rc.chars();
    let row = chars.next()?.to_digit(10)? as u8;
    let col = chars.next()?.to_digit(10)? as u8;
    if chars.next().is_some() {
        return None;
    }
    Some((row, col, m.parse().ok()?))
}

fn gc_product(alg: &ConformalAlgebra, a: &Gen, b: &Gen) -> Result<ConfElt> {
    alg.info(a)?;
    alg.info(b)?;
    let (Gen::J { row: r1, col: c1, m }, Gen::J { row: r2, col: c2, m: n }) = (a, b) else {
        unreachable!("validated by info")
    };
    if c1 != r2 {
        return Ok(ConfElt::zero());
    }
    let shift = &MPoly::var(Var::Lambda) + &MPoly::var(Var::D);
    let mut out = ConfElt::zero();
    for j in 0..=*m {
        let coeff = shift.pow(j).scale(&binomial(*m as i64, j));
        out.add_term(
            Gen::J {
                row: *r1,
                col: *c2,
                m: m + n - j,
            },
            coeff,
        );
    }
    Ok(out)
}

/// Name used for `ξ_I` (`X` followed by the indices; `X` alone for 1).
pub fn xi_name(mask: Mask) -> String {
    let idx: String = grassmann::indices_of(mask).iter().map(|i| i.to_string()).collect();
    format!("X{idx}")
}

/// Name used for `ξ_I ∂_i`.
pub fn xid_name(mask: Mask, i: u8) -> String {
    format!("{}D{}", xi_name(mask), i)
}

/// `2 − |I|/2`, the weight of `ξ_I` in `W_N` and `K_N`.
pub fn xi_weight(mask: Mask) -> Rat {
    int(2) - rat(grassmann::degree(mask) as i64, 2)
}

/// `(3 − |I|)/2`, the weight of `ξ_I ∂_i` in `W_N`.
pub fn xid_weight(mask: Mask) -> Rat {
    rat(3 - grassmann::degree(mask) as i64, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gc_names_round_trip() {
        assert_eq!(parse_gc_name(&gc_name(1, 2, 3)), Some((1, 2, 3)));
        assert_eq!(parse_gc_name("J1m"), None);
    }

    #[test]
    fn sign_rule() {
        assert_eq!(sign(true, true), -1);
        assert_eq!(sign(true, false), 1);
    }
}
