//! Mode algebras: `a_m b_n = Σ_j (m choose j) (a_(j) b)_{m+n−j}` with the
//! convention `a_n = Res_z z^n a(z)`.
//!
//! Only generator modes are stored. A `∂`-multiple is normalized through
//! `(∂a)_n = −n a_{n−1}`, and a generator with `∂a = 0` keeps only its
//! mode `a_{−1}`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::algebra::check::{CheckReport, Failure};
use crate::algebra::{sign, ConfElt, ConformalAlgebra, Gen, Kind};
use crate::arith::rat::{binomial, falling, fmt_rat, int};
use crate::arith::{Rat, Var};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode {
    pub gen: Gen,
    pub n: i64,
}

impl Mode {
    pub fn new(gen: Gen, n: i64) -> Self {
        Mode { gen, n }
    }
}

/// Finite rational combination of generator modes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModeElt(BTreeMap<Mode, Rat>);

impl ModeElt {
    pub fn zero() -> Self {
        ModeElt(BTreeMap::new())
    }

    pub fn mode(m: Mode) -> Self {
        ModeElt::term(m, Rat::one())
    }

    pub fn term(m: Mode, c: Rat) -> Self {
        let mut out = ModeElt::zero();
        out.add_term(m, c);
        out
    }

    pub fn add_term(&mut self, m: Mode, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(m).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mode, &Rat)> {
        self.0.iter()
    }

    pub fn coeff(&self, m: &Mode) -> Rat {
        self.0.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add(&self, o: &ModeElt) -> ModeElt {
        let mut out = self.clone();
        for (m, c) in &o.0 {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &ModeElt) -> ModeElt {
        self.add(&o.scale(&-Rat::one()))
    }

    pub fn scale(&self, s: &Rat) -> ModeElt {
        if s.is_zero() {
            return ModeElt::zero();
        }
        ModeElt(self.0.iter().map(|(m, c)| (*m, c * s)).collect())
    }

    /// Shifts every mode index of the generators accepted by `f` by the
    /// returned amount.
    pub fn reindex(&self, f: impl Fn(&Gen) -> i64) -> ModeElt {
        let mut out = ModeElt::zero();
        for (m, c) in &self.0 {
            out.add_term(Mode::new(m.gen, m.n - f(&m.gen)), c.clone());
        }
        out
    }

    pub fn render(&self, alg: &ConformalAlgebra) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.0.iter().enumerate() {
            let name = format!("{}_{}", alg.gen_name(&m.gen), fmt_index(m.n));
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if a.is_one() {
                s.push_str(&name);
            } else {
                s.push_str(&format!("{}*{}", fmt_rat(&a), name));
            }
        }
        s
    }
}

fn fmt_index(n: i64) -> String {
    if n < 0 {
        format!("({n})")
    } else {
        n.to_string()
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}_{}", self.gen, self.n)
    }
}

/// The mode `x_p` of an element of the algebra.
pub fn elt_mode(alg: &ConformalAlgebra, x: &ConfElt, p: i64) -> Result<ModeElt> {
    let mut out = ModeElt::zero();
    for (g, poly) in x.terms() {
        for (mono, c) in poly.terms() {
            if mono.pairs().iter().any(|(v, _)| *v != Var::D) {
                return Err(Error::Mismatch(format!("coefficient {poly} is not a polynomial in d")));
            }
            let k = mono.exponent(Var::D);
            if alg.d_zero(g) {
                if k == 0 && p == -1 {
                    out.add_term(Mode::new(*g, -1), c.clone());
                }
                continue;
            }
            let s = if k % 2 == 0 { int(1) } else { int(-1) };
            out.add_term(Mode::new(*g, p - k as i64), c * s * falling(p, k));
        }
    }
    Ok(out)
}

/// `a_m b_n` for generator modes.
pub fn mode_product(alg: &ConformalAlgebra, a: &Mode, b: &Mode) -> Result<ModeElt> {
    if alg.d_zero(&a.gen) && a.n != -1 || alg.d_zero(&b.gen) && b.n != -1 {
        return Ok(ModeElt::zero());
    }
    let (x, y) = (ConfElt::basis(a.gen), ConfElt::basis(b.gen));
    let p = alg.lambda_product(&x, &y, Var::Lambda)?;
    let top = p.degree_in(Var::Lambda);
    let mut out = ModeElt::zero();
    for j in 0..=top {
        let cm = binomial(a.n, j);
        if cm.is_zero() {
            continue;
        }
        let xj = alg.nth_product(&x, &y, j)?;
        out = out.add(&elt_mode(alg, &xj, a.n + b.n - j as i64)?.scale(&cm));
    }
    Ok(out)
}

pub fn mode_product_elt(alg: &ConformalAlgebra, x: &ModeElt, y: &ModeElt) -> Result<ModeElt> {
    let mut out = ModeElt::zero();
    for (a, c) in x.terms() {
        for (b, d) in y.terms() {
            out = out.add(&mode_product(alg, a, b)?.scale(&(c * d)));
        }
    }
    Ok(out)
}

/// The Lie bracket of modes: the product itself for a Lie table, the
/// commutator for an associative one.
pub fn mode_bracket(alg: &ConformalAlgebra, x: &ModeElt, y: &ModeElt) -> Result<ModeElt> {
    let xy = mode_product_elt(alg, x, y)?;
    match alg.kind() {
        Kind::Lie => Ok(xy),
        Kind::Associative => {
            let mut yx = ModeElt::zero();
            for (a, c) in x.terms() {
                for (b, d) in y.terms() {
                    let s = int(sign(alg.odd(&a.gen), alg.odd(&b.gen)));
                    yx = yx.add(&mode_product(alg, b, a)?.scale(&(c * d * s)));
                }
            }
            Ok(xy.sub(&yx))
        }
    }
}

/// Every product `a_m b_n` with generators from `scope` and indices in
/// `[−window, window]`.
pub fn mode_table(alg: &ConformalAlgebra, scope: &[Gen], window: i64) -> Result<Vec<(Mode, Mode, ModeElt)>> {
    let mut jobs = Vec::new();
    for a in scope {
        for m in -window..=window {
            for b in scope {
                for n in -window..=window {
                    jobs.push((Mode::new(*a, m), Mode::new(*b, n)));
                }
            }
        }
    }
    jobs.par_iter()
        .map(|(a, b)| Ok((*a, *b, mode_product(alg, a, b)?)))
        .collect()
}

fn failure(alg: &ConformalAlgebra, identity: &str, modes: &[Mode], r: &ModeElt) -> Failure {
    Failure {
        identity: identity.into(),
        tuple: modes
            .iter()
            .map(|m| format!("{}_{}", alg.gen_name(&m.gen), fmt_index(m.n)))
            .collect(),
        residual: r.render(alg),
    }
}

/// Antisymmetry and Jacobi of the mode bracket for a Lie table, or
/// associativity for an associative one, on every window triple.
pub fn verify_mode_axioms(alg: &ConformalAlgebra, scope: &[Gen], window: i64) -> Result<CheckReport> {
    let modes: Vec<Mode> = scope
        .iter()
        .flat_map(|g| (-window..=window).map(move |n| Mode::new(*g, n)))
        .collect();
    let mut triples = Vec::new();
    for a in &modes {
        for b in &modes {
            for c in &modes {
                triples.push([*a, *b, *c]);
            }
        }
    }
    let mut report = CheckReport::default();
    if alg.kind() == Kind::Lie {
        let pairs: Vec<(Mode, Mode)> = modes.iter().flat_map(|a| modes.iter().map(move |b| (*a, *b))).collect();
        let fails = pairs
            .par_iter()
            .map(|(a, b)| {
                let ab = mode_product(alg, a, b)?;
                let ba = mode_product(alg, b, a)?;
                let s = int(sign(alg.odd(&a.gen), alg.odd(&b.gen)));
                let r = ab.add(&ba.scale(&s));
                Ok((!r.is_zero()).then(|| failure(alg, "mode antisymmetry", &[*a, *b], &r)))
            })
            .collect::<Result<Vec<_>>>()?;
        report.checked += pairs.len();
        report.failures.extend(fails.into_iter().flatten());
    }
    let fails = triples
        .par_iter()
        .map(|[a, b, c]| {
            let (x, y, z) = (ModeElt::mode(*a), ModeElt::mode(*b), ModeElt::mode(*c));
            let (name, r) = match alg.kind() {
                Kind::Lie => {
                    let t1 = mode_bracket(alg, &x, &mode_bracket(alg, &y, &z)?)?;
                    let t2 = mode_bracket(alg, &mode_bracket(alg, &x, &y)?, &z)?;
                    let t3 = mode_bracket(alg, &y, &mode_bracket(alg, &x, &z)?)?;
                    let s = int(sign(alg.odd(&a.gen), alg.odd(&b.gen)));
                    ("mode Jacobi", t1.sub(&t2).sub(&t3.scale(&s)))
                }
                Kind::Associative => {
                    let t1 = mode_product_elt(alg, &mode_product_elt(alg, &x, &y)?, &z)?;
                    let t2 = mode_product_elt(alg, &x, &mode_product_elt(alg, &y, &z)?)?;
                    ("mode associativity", t1.sub(&t2))
                }
            };
            Ok((!r.is_zero()).then(|| failure(alg, name, &[*a, *b, *c], &r)))
        })
        .collect::<Result<Vec<_>>>()?;
    report.checked += triples.len();
    report.failures.extend(fails.into_iter().flatten());
    Ok(report)
}

/// Index shift `w(a) − 1` taking `a_n` to the textbook labelling by
/// eigenvalue of `−L_0`-type gradings; `None` for a non-integer weight.
pub fn display_shift(alg: &ConformalAlgebra, g: &Gen) -> Option<i64> {
    let w = alg.weight(g).ok()? - int(1);
    w.is_integer().then(|| w.to_integer().try_into().ok()).flatten()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builders::{current, virasoro, FinAlgebra};
    use crate::arith::MPoly;

    #[test]
    fn virasoro_modes() {
        let vir = virasoro();
        let l = Gen::Basis(0);
        for m in -5..=5 {
            for n in -5..=5 {
                let got = mode_product(&vir, &Mode::new(l, m), &Mode::new(l, n)).unwrap();
                assert_eq!(got, ModeElt::term(Mode::new(l, m + n - 1), int(m - n)));
                // the same relation after relabelling L_m -> L_{m-1}
                let shifted = got.reindex(|g| display_shift(&vir, g).unwrap());
                assert_eq!(shifted, ModeElt::term(Mode::new(l, m + n - 2), int(m - n)));
            }
        }
    }

    #[test]
    fn current_modes() {
        let sl2 = FinAlgebra::sl2();
        let cur = current("cur", &sl2).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want: ModeElt = sl2
                    .product(i, j)
                    .into_iter()
                    .fold(ModeElt::zero(), |acc, (k, c)| {
                        acc.add(&ModeElt::term(Mode::new(Gen::Basis(k as u16), 5), c))
                    });
                let got = mode_product(&cur, &Mode::new(Gen::Basis(i as u16), 2), &Mode::new(Gen::Basis(j as u16), 3))
                    .unwrap();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn derivative_modes() {
        let vir = virasoro();
        let l = Gen::Basis(0);
        let dl = ConfElt::term(l, MPoly::var(Var::D));
        assert_eq!(elt_mode(&vir, &dl, 4).unwrap(), ModeElt::term(Mode::new(l, 3), int(-4)));
    }

    #[test]
    fn mode_axioms() {
        let vir = virasoro();
        assert!(verify_mode_axioms(&vir, &vir.generators(0), 3).unwrap().passed());
        // skew-symmetric but not Jacobi: (∂+2λ)(λ²+λ∂)L
        let (d, l) = (MPoly::var(Var::D), MPoly::var(Var::Lambda));
        let p = &(&d + &l.scale(&int(2))) * &(&(&l * &l) + &(&l * &d));
        let bad = vir.with_entry(Gen::Basis(0), Gen::Basis(0), ConfElt::term(Gen::Basis(0), p)).unwrap();
        let r = verify_mode_axioms(&bad, &bad.generators(0), 2).unwrap();
        assert!(!r.passed());
        assert!(r.failures.iter().all(|f| f.identity == "mode Jacobi"));
    }
}
