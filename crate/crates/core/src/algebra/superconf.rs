//! The Grassmann families: `W_N` (vector fields plus functions on the odd
//! superline), the divergence-zero subalgebra `S_N`, and `K_N`.
//!
//! Generators of `W_N` are `ξ_I ∂_i` (parity `|I|+1`, weight `(3−|I|)/2`)
//! and `ξ_I` (parity `|I|`, weight `2−|I|/2`); `K_N` has the `ξ_I` only.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;

use super::{sign, xi_name, xi_weight, xid_name, xid_weight, ConfElt, ConformalAlgebra, Gen, GenInfo, Kind};
use crate::arith::grassmann::{self, Mask};
use crate::arith::rat::{int, rat};
use crate::arith::{GrassmannElt, MPoly, Rat, Var};
use crate::error::{Error, Result};
use crate::linalg;

/// Largest `N` accepted by the builders.
pub const MAX_N: usize = 4;

fn check_n(n: usize) -> Result<()> {
    if n > MAX_N {
        return Err(Error::Unsupported(format!("N = {n} (supported: N ≤ {MAX_N})")));
    }
    Ok(())
}

fn masks(n: usize) -> impl Iterator<Item = Mask> {
    0..(1u32 << n)
}

/// A `W_N` element split into vector-field components `P_1, …, P_N`
/// (the coefficient of `∂_i`) and a function part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub fields: Vec<GrassmannElt>,
    pub func: GrassmannElt,
}

impl Split {
    pub fn zero(n: usize) -> Self {
        Split {
            fields: vec![GrassmannElt::zero(n); n],
            func: GrassmannElt::zero(n),
        }
    }

    pub fn from_elt(n: usize, x: &ConfElt) -> Result<Self> {
        let mut s = Split::zero(n);
        for (g, c) in x.terms() {
            match *g {
                Gen::XiD(m, i) if (1..=n).contains(&(i as usize)) && m < (1 << n) => {
                    s.fields[i as usize - 1].add_term(m, c.clone())
                }
                Gen::Xi(m) if m < (1 << n) => s.func.add_term(m, c.clone()),
                _ => return Err(Error::UnknownGenerator(format!("{g:?} in W_{n}"))),
            }
        }
        Ok(s)
    }

    pub fn to_elt(&self) -> ConfElt {
        let mut out = ConfElt::zero();
        for (i, p) in self.fields.iter().enumerate() {
            for (m, c) in p.terms() {
                out.add_term(Gen::XiD(*m, i as u8 + 1), c.clone());
            }
        }
        for (m, c) in self.func.terms() {
            out.add_term(Gen::Xi(*m), c.clone());
        }
        out
    }
}

/// Supercommutator of the homogeneous vector fields `a = Σ P_i ∂_i`,
/// `b = Σ Q_j ∂_j`: `Σ P_i(∂_i Q_j)∂_j − p(a,b) Q_j(∂_j P_i)∂_i`.
fn field_bracket(
    n: usize,
    a: &[GrassmannElt],
    odd_a: bool,
    b: &[GrassmannElt],
    odd_b: bool,
) -> Result<Vec<GrassmannElt>> {
    let s = MPoly::int(sign(odd_a, odd_b));
    let mut out = vec![GrassmannElt::zero(n); n];
    for i in 0..n {
        for j in 0..n {
            let t1 = a[i].mul(&b[j].deriv(i + 1)?)?;
            out[j] = out[j].add(&t1)?;
            let t2 = b[j].mul(&a[i].deriv(j + 1)?)?.scale(&-s.clone());
            out[i] = out[i].add(&t2)?;
        }
    }
    Ok(out)
}

/// `a(f) = Σ P_i ∂_i f`.
fn apply_field(a: &[GrassmannElt], f: &GrassmannElt) -> Result<GrassmannElt> {
    let mut out = GrassmannElt::zero(f.n());
    for (i, p) in a.iter().enumerate() {
        out = out.add(&p.mul(&f.deriv(i + 1)?)?)?;
    }
    Ok(out)
}

fn field_of(n: usize, mask: Mask, i: u8) -> Vec<GrassmannElt> {
    let mut v = vec![GrassmannElt::zero(n); n];
    v[i as usize - 1] = GrassmannElt::monomial(n, mask, MPoly::one());
    v
}

fn func_to_elt(f: &GrassmannElt) -> ConfElt {
    ConfElt::from_terms(f.terms().map(|(m, c)| (Gen::Xi(*m), c.clone())))
}

fn fields_to_elt(v: &[GrassmannElt]) -> ConfElt {
    let mut out = ConfElt::zero();
    for (i, p) in v.iter().enumerate() {
        for (m, c) in p.terms() {
            out.add_term(Gen::XiD(*m, i as u8 + 1), c.clone());
        }
    }
    out
}

fn lam() -> MPoly {
    MPoly::var(Var::Lambda)
}

/// Substitutes `λ := −λ−∂` in a table value (skew completion).
fn reflect(x: &ConfElt) -> ConfElt {
    let image = -(&lam() + &MPoly::var(Var::D));
    x.substitute(Var::Lambda, &image)
}

pub fn w_n_generators(n: usize) -> Vec<GenInfo> {
    let mut gens = Vec::new();
    for i in 1..=n as u8 {
        for m in masks(n) {
            gens.push(GenInfo::new(
                Gen::XiD(m, i),
                xid_name(m, i),
                grassmann::degree(m).is_multiple_of(2),
                xid_weight(m),
            ));
        }
    }
    for m in masks(n) {
        gens.push(GenInfo::new(Gen::Xi(m), xi_name(m), grassmann::degree(m) % 2 == 1, xi_weight(m)));
    }
    gens
}

/// `W_N`: `[a_λ b] = [a,b]`, `[a_λ f] = a(f) − p(a,f)λ f a`,
/// `[f_λ g] = −(∂+2λ) f g`, and `[f_λ a]` by skew-symmetry.
pub fn w_n(n: usize) -> Result<ConformalAlgebra> {
    check_n(n)?;
    let gens = w_n_generators(n);
    let odd = |g: &Gen| gens.iter().find(|i| i.gen == *g).map(|i| i.odd).unwrap_or(false);
    let mut table = BTreeMap::new();
    let fields: Vec<(Mask, u8)> = (1..=n as u8).flat_map(|i| masks(n).map(move |m| (m, i))).collect();
    let funcs: Vec<Mask> = masks(n).collect();
    for &(ma, i) in &fields {
        let a = field_of(n, ma, i);
        let ga = Gen::XiD(ma, i);
        for &(mb, j) in &fields {
            let gb = Gen::XiD(mb, j);
            let b = field_of(n, mb, j);
            let v = fields_to_elt(&field_bracket(n, &a, odd(&ga), &b, odd(&gb))?);
            table.insert((ga, gb), v);
        }
        for &mf in &funcs {
            let gf = Gen::Xi(mf);
            let f = GrassmannElt::monomial(n, mf, MPoly::one());
            let af = func_to_elt(&apply_field(&a, &f)?);
            // f a = (f P_i) ∂_i
            let fa: Vec<GrassmannElt> = a.iter().map(|p| f.mul(p)).collect::<Result<_>>()?;
            let s = int(sign(odd(&ga), odd(&gf)));
            let v = &af - &fields_to_elt(&fa).scale(&lam().scale(&s));
            let back = reflect(&v).scale_rat(&-int(sign(odd(&gf), odd(&ga))));
            table.insert((ga, gf), v);
            table.insert((gf, ga), back);
        }
    }
    let dl = &MPoly::var(Var::D) + &lam().scale(&int(2));
    for &mf in &funcs {
        let f = GrassmannElt::monomial(n, mf, MPoly::one());
        for &mg in &funcs {
            let g = GrassmannElt::monomial(n, mg, MPoly::one());
            let v = func_to_elt(&f.mul(&g)?).scale(&-dl.clone());
            table.insert((Gen::Xi(mf), Gen::Xi(mg)), v);
        }
    }
    ConformalAlgebra::finite(format!("wN:{n}"), Kind::Lie, n > 0, gens, table)
}

/// `K_N`: for `f = ξ_I`, `g = ξ_J`,
/// `[f_λ g] = (|f|/2 − 1)∂(fg) + ½(−1)^{|f|} Σ_i (∂_i f)(∂_i g)
///            + λ(|f|/2 + |g|/2 − 2) fg`.
pub fn k_n(n: usize) -> Result<ConformalAlgebra> {
    check_n(n)?;
    let gens: Vec<GenInfo> = masks(n)
        .map(|m| GenInfo::new(Gen::Xi(m), xi_name(m), grassmann::degree(m) % 2 == 1, xi_weight(m)))
        .collect();
    let mut table = BTreeMap::new();
    for mf in masks(n) {
        let f = GrassmannElt::monomial(n, mf, MPoly::one());
        let df = grassmann::degree(mf) as i64;
        for mg in masks(n) {
            let g = GrassmannElt::monomial(n, mg, MPoly::one());
            let dg = grassmann::degree(mg) as i64;
            let fg = f.mul(&g)?;
            let mut v = fg.scale(&MPoly::var(Var::D).scale(&(rat(df, 2) - int(1))));
            let half = if df % 2 == 0 { rat(1, 2) } else { rat(-1, 2) };
            for i in 1..=n {
                let t = f.deriv(i)?.mul(&g.deriv(i)?)?;
                v = v.add(&t.scale_rat(&half))?;
            }
            v = v.add(&fg.scale(&lam().scale(&(rat(df + dg, 2) - int(2)))))?;
            table.insert((Gen::Xi(mf), Gen::Xi(mg)), func_to_elt(&v));
        }
    }
    ConformalAlgebra::finite(format!("kN:{n}"), Kind::Lie, n > 0, gens, table)
}

/// `div(Σ P_i ∂_i + f) = Σ_i (−1)^{p(P_i)} ∂_i P_i − ∂ f`, applied to
/// `w·D` when a weight `w` is given (`w = 1 + ξ_1⋯ξ_N` tests membership in
/// the deformed series).
pub fn divergence(n: usize, x: &ConfElt, weight: Option<&GrassmannElt>) -> Result<GrassmannElt> {
    let mut s = Split::from_elt(n, x)?;
    if let Some(w) = weight {
        s.fields = s.fields.iter().map(|p| w.mul(p)).collect::<Result<_>>()?;
        s.func = w.mul(&s.func)?;
    }
    let mut out = GrassmannElt::zero(n);
    for (i, p) in s.fields.iter().enumerate() {
        for (m, c) in p.terms() {
            let sgn = if grassmann::degree(*m).is_multiple_of(2) { 1 } else { -1 };
            let mono = GrassmannElt::monomial(n, *m, c.clone()).deriv(i + 1)?;
            out = out.add(&mono.scale(&MPoly::int(sgn)))?;
        }
    }
    out = out.add(&s.func.scale(&-MPoly::var(Var::D)))?;
    Ok(out)
}

/// The weight `1 + ξ_1 ⋯ ξ_N`.
pub fn deformation_weight(n: usize) -> GrassmannElt {
    let mut w = GrassmannElt::one(n);
    w.add_term((1u32 << n) - 1, MPoly::one());
    w
}

/// One closure relation: `[s_left λ s_right] = Σ r_k(λ, ∂) s_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureEntry {
    pub left: usize,
    pub right: usize,
    pub coeffs: Vec<(usize, MPoly)>,
    /// Every λ-coefficient of the bracket has zero divergence.
    pub div_zero: bool,
    /// The recombination reproduces the bracket exactly.
    pub recomposed: bool,
}

/// A spanning set of `S_N ⊂ W_N` over `ℂ[∂]` with its closure certificate.
#[derive(Clone, Debug)]
pub struct SnSpan {
    pub n: usize,
    pub algebra: ConformalAlgebra,
    pub span: Vec<ConfElt>,
    /// Number of leading spanning elements that are `∂`-free vector fields.
    pub kernel_len: usize,
    pub certificate: Vec<ClosureEntry>,
}

impl SnSpan {
    pub fn certified(&self) -> bool {
        self.certificate.iter().all(|e| e.div_zero && e.recomposed)
    }
}

/// `(p − p|_{∂=0}) / ∂`.
fn drop_d(p: &MPoly) -> MPoly {
    MPoly::from_terms(p.terms().filter_map(|(m, c)| {
        let e = m.exponent(Var::D);
        (e > 0).then(|| {
            let pairs = m
                .pairs()
                .iter()
                .map(|&(v, k)| if v == Var::D { (v, k - 1) } else { (v, k) })
                .collect();
            (crate::arith::Monomial::from_pairs(pairs), c.clone())
        })
    }))
}

/// Spanning set: a basis of the divergence-free `∂`-free vector fields,
/// followed by `∂a + div₀(a)` for every vector-field generator `a`.
pub fn s_n_span(n: usize) -> Result<SnSpan> {
    let w = w_n(n)?;
    let fields: Vec<Gen> = (1..=n as u8).flat_map(|i| masks(n).map(move |m| Gen::XiD(m, i))).collect();
    let divs: Vec<GrassmannElt> = fields
        .iter()
        .map(|g| divergence(n, &ConfElt::basis(*g), None))
        .collect::<Result<_>>()?;
    // rows: Grassmann monomials, columns: fields
    let rows: Vec<Vec<Rat>> = masks(n)
        .map(|m| {
            divs.iter()
                .map(|d| d.coeff(m).as_constant().expect("constant divergence"))
                .collect()
        })
        .collect();
    let kernel = linalg::nullspace(&rows, fields.len());
    let mut pivot_of = Vec::new();
    let mut span = Vec::new();
    for v in &kernel {
        let free = v.iter().rposition(|x| !x.is_zero()).expect("nonzero kernel vector");
        pivot_of.push(free);
        span.push(ConfElt::from_terms(
            fields
                .iter()
                .zip(v)
                .map(|(g, c)| (*g, MPoly::constant(c.clone()))),
        ));
    }
    let kernel_len = span.len();
    for (g, d) in fields.iter().zip(&divs) {
        let mut e = ConfElt::term(*g, MPoly::var(Var::D));
        e = &e + &func_to_elt(d);
        span.push(e);
    }
    let pairs: Vec<(usize, usize)> = (0..span.len())
        .flat_map(|i| (0..span.len()).map(move |j| (i, j)))
        .collect();
    let certificate = pairs
        .par_iter()
        .map(|&(i, j)| {
            let b = w.lambda_product(&span[i], &span[j], Var::Lambda)?;
            let div_zero = (0..=b.degree_in(Var::Lambda)).try_fold(true, |ok, k| {
                Ok::<bool, Error>(ok && divergence(n, &b.coeff_of(Var::Lambda, k), None)?.is_zero())
            })?;
            let coeffs = decompose(&b, &fields, &kernel, &pivot_of, kernel_len);
            let mut re = ConfElt::zero();
            for (k, r) in &coeffs {
                re.add_scaled(&span[*k], r);
            }
            Ok(ClosureEntry {
                left: i,
                right: j,
                coeffs,
                div_zero,
                recomposed: re == b,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SnSpan {
        n,
        algebra: w,
        span,
        kernel_len,
        certificate,
    })
}

/// Re-expresses a divergence-free element in the spanning set; the result
/// is verified by the caller through recomposition.
fn decompose(
    x: &ConfElt,
    fields: &[Gen],
    kernel: &[Vec<Rat>],
    pivot_of: &[usize],
    kernel_len: usize,
) -> Vec<(usize, MPoly)> {
    let zero_d = MPoly::zero();
    let mut out: BTreeMap<usize, MPoly> = BTreeMap::new();
    let mut rest = x.clone();
    // ∂-free part of the vector fields lies in the kernel of div₀
    let constant: Vec<MPoly> = fields
        .iter()
        .map(|g| rest.coeff(g).substitute(Var::D, &zero_d))
        .collect();
    for (k, v) in kernel.iter().enumerate() {
        let c = constant[pivot_of[k]].clone();
        if c.is_zero() {
            continue;
        }
        for (g, a) in fields.iter().zip(v) {
            rest.add_term(*g, -c.scale(a));
        }
        *out.entry(k).or_default() += c;
    }
    for (idx, g) in fields.iter().enumerate() {
        let c = drop_d(&rest.coeff(g));
        if c.is_zero() {
            continue;
        }
        *out.entry(kernel_len + idx).or_default() += c;
    }
    out.into_iter().filter(|(_, p)| !p.is_zero()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divergence_examples() {
        let x1 = grassmann::mask_of(&[1]);
        let d11 = ConfElt::basis(Gen::XiD(x1, 1));
        assert_eq!(divergence(2, &d11, None).unwrap(), GrassmannElt::monomial(2, 0, MPoly::int(-1)));
        let d12 = ConfElt::basis(Gen::XiD(x1, 2));
        assert!(divergence(2, &d12, None).unwrap().is_zero());
        let dd = d11.scale(&MPoly::var(Var::D));
        assert_eq!(
            divergence(2, &dd, None).unwrap(),
            GrassmannElt::monomial(2, 0, -MPoly::var(Var::D))
        );
        let f = ConfElt::basis(Gen::Xi(x1));
        assert_eq!(
            divergence(1, &f, None).unwrap(),
            GrassmannElt::monomial(1, x1, -MPoly::var(Var::D))
        );
        let x2 = grassmann::mask_of(&[2]);
        let sym = &d12 + &ConfElt::basis(Gen::XiD(x2, 1));
        assert!(divergence(2, &sym, None).unwrap().is_zero());
    }

    #[test]
    fn w_n_function_bracket() {
        let w = w_n(1).unwrap();
        let one = Gen::Xi(0);
        let v = w.table_entry(&one, &one).unwrap();
        let dl = &MPoly::var(Var::D) + &lam().scale(&int(2));
        assert_eq!(v, ConfElt::term(one, -dl));
    }

    #[test]
    fn k0_is_virasoro_up_to_sign() {
        let k = k_n(0).unwrap();
        let one = Gen::Xi(0);
        let v = k.table_entry(&one, &one).unwrap();
        let dl = &MPoly::var(Var::D) + &lam().scale(&int(2));
        assert_eq!(v, ConfElt::term(one, -dl));
    }

    #[test]
    fn rejects_large_n() {
        assert!(w_n(5).is_err());
        assert!(k_n(9).is_err());
    }
}

#[cfg(test)]
mod family_tests {
    use super::*;
    use crate::algebra::check::{check_axioms, check_parity, check_weights};

    #[test]
    fn w1_w2_are_lie_conformal() {
        for n in 0..=2 {
            let w = w_n(n).unwrap();
            let g = w.generators(0);
            let r = check_axioms(&w, &g).unwrap();
            assert!(r.passed(), "W_{n}: {:?}", r.failures.first());
            assert!(check_parity(&w, &g).unwrap().passed());
            assert!(check_weights(&w, &g).unwrap().passed());
        }
    }

    #[test]
    fn k1_k2_are_lie_conformal() {
        for n in 0..=3 {
            let k = k_n(n).unwrap();
            let g = k.generators(0);
            let r = check_axioms(&k, &g).unwrap();
            assert!(r.passed(), "K_{n}: {:?}", r.failures.first());
            assert!(check_weights(&k, &g).unwrap().passed());
        }
    }

    #[test]
    fn s2_span_is_closed() {
        let s = s_n_span(2).unwrap();
        assert!(s.certified());
    }
}
