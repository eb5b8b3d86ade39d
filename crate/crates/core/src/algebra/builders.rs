//! Concrete algebras: Virasoro, current algebras of finite-dimensional
//! algebras, and the semidirect product `Vir ⋉ Cur g`.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{ConfElt, ConformalAlgebra, Gen, GenInfo, Kind};
use crate::arith::rat::int;
use crate::arith::{MPoly, Rat, Var};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// A finite-dimensional algebra given by structure constants
/// `e_i e_j = Σ_k c^k_{ij} e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinAlgebra {
    pub names: Vec<String>,
    pub odd: Vec<bool>,
    pub kind: Kind,
    pub mult: BTreeMap<(usize, usize), BTreeMap<usize, Rat>>,
}

impl FinAlgebra {
    pub fn new(names: Vec<String>, kind: Kind) -> Self {
        let odd = vec![false; names.len()];
        FinAlgebra {
            names,
            odd,
            kind,
            mult: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, c: Rat) {
        if c.is_zero() {
            return;
        }
        *self.mult.entry((i, j)).or_default().entry(k).or_insert_with(Rat::zero) += c;
    }

    pub fn product(&self, i: usize, j: usize) -> BTreeMap<usize, Rat> {
        self.mult.get(&(i, j)).cloned().unwrap_or_default()
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        if self.odd.len() != n {
            return Err(Error::InvalidAlgebra("parity list has the wrong length".into()));
        }
        for ((i, j), row) in &self.mult {
            if *i >= n || *j >= n || row.keys().any(|k| *k >= n) {
                return Err(Error::InvalidAlgebra(format!(
                    "structure constant index out of range for dimension {n}"
                )));
            }
        }
        if self.kind == Kind::Lie {
            for i in 0..n {
                for j in 0..n {
                    let a = self.product(i, j);
                    let b = self.product(j, i);
                    let s = if self.odd[i] && self.odd[j] { 1 } else { -1 };
                    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
                    for k in keys {
                        let x = a.get(k).cloned().unwrap_or_default();
                        let y = b.get(k).cloned().unwrap_or_default();
                        if x != y * int(s) {
                            return Err(Error::InvalidAlgebra(format!(
                                "bracket of {} and {} is not skew",
                                self.names[i], self.names[j]
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `sl_2` with basis `e, h, f` and `[e,f] = h`, `[h,e] = 2e`,
    /// `[h,f] = −2f`.
    pub fn sl2() -> Self {
        let mut g = FinAlgebra::new(vec!["e".into(), "h".into(), "f".into()], Kind::Lie);
        let (e, h, f) = (0, 1, 2);
        g.set(e, f, h, int(1));
        g.set(f, e, h, int(-1));
        g.set(h, e, e, int(2));
        g.set(e, h, e, int(-2));
        g.set(h, f, f, int(-2));
        g.set(f, h, f, int(2));
        g
    }

    /// `Mat_n` with matrix units `E_ij` (named `E{i}{j}`).
    pub fn mat(n: usize) -> Self {
        let idx = |i: usize, j: usize| i * n + j;
        let names = (0..n)
            .flat_map(|i| (0..n).map(move |j| format!("E{}{}", i + 1, j + 1)))
            .collect();
        let mut a = FinAlgebra::new(names, Kind::Associative);
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    a.set(idx(i, j), idx(j, l), idx(i, l), int(1));
                }
            }
        }
        a
    }

    pub fn abelian(n: usize) -> Self {
        FinAlgebra::new((1..=n).map(|i| format!("a{i}")).collect(), Kind::Lie)
    }

    /// Matrices of `ad e_i` in the basis, `(ad x)_{kj}` = coefficient of
    /// `e_k` in `[x, e_j]`.
    pub fn adjoint_matrices(&self) -> Vec<Matrix> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut m = vec![vec![Rat::zero(); n]; n];
                for j in 0..n {
                    for (k, c) in self.product(i, j) {
                        m[k][j] = c;
                    }
                }
                m
            })
            .collect()
    }

    /// The trace form `tr(ad x ad y)`.
    pub fn killing_form(&self) -> Matrix {
        let ad = self.adjoint_matrices();
        let n = self.dim();
        let mul = |a: &Matrix, b: &Matrix| crate::linalg::mat_mul(a, b, n);
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let p = mul(&ad[i], &ad[j]);
                        (0..n).fold(Rat::zero(), |acc, k| acc + &p[k][k])
                    })
                    .collect()
            })
            .collect()
    }
}

pub fn virasoro() -> ConformalAlgebra {
    let l = Gen::Basis(0);
    let mut table = BTreeMap::new();
    table.insert((l, l), ConfElt::term(l, d_plus(int(2))));
    ConformalAlgebra::finite(
        "virasoro",
        Kind::Lie,
        false,
        vec![GenInfo::new(l, "L", false, int(2))],
        table,
    )
    .expect("virasoro table is well formed")
}

/// `∂ + cλ`
fn d_plus(c: Rat) -> MPoly {
    &MPoly::var(Var::D) + &MPoly::var(Var::Lambda).scale(&c)
}

/// `Cur A`: generators are the basis of `A`, `a_λ b = ab`, weight 1.
pub fn current(name: &str, a: &FinAlgebra) -> Result<ConformalAlgebra> {
    a.validate()?;
    let gens: Vec<GenInfo> = a
        .names
        .iter()
        .enumerate()
        .map(|(i, n)| GenInfo::new(Gen::Basis(i as u16), n.clone(), a.odd[i], int(1)))
        .collect();
    let mut table = BTreeMap::new();
    for ((i, j), row) in &a.mult {
        let v = ConfElt::from_terms(
            row.iter()
                .map(|(k, c)| (Gen::Basis(*k as u16), MPoly::constant(c.clone()))),
        );
        table.insert((Gen::Basis(*i as u16), Gen::Basis(*j as u16)), v);
    }
    ConformalAlgebra::finite(name, a.kind, a.odd.iter().any(|&o| o), gens, table)
}

/// `Vir ⋉ Cur g`: `[L_λ L] = (∂+2λ)L`, `[L_λ a] = (∂+λ)a`, `[a_λ L] = λa`,
/// `[a_λ b] = [a,b]`.
pub fn semidirect(name: &str, g: &FinAlgebra) -> Result<ConformalAlgebra> {
    if g.kind != Kind::Lie {
        return Err(Error::InvalidAlgebra("semidirect product needs a Lie algebra".into()));
    }
    g.validate()?;
    let l = Gen::Basis(0);
    let gen = |i: usize| Gen::Basis(i as u16 + 1);
    let mut gens = vec![GenInfo::new(l, "L", false, int(2))];
    if g.names.iter().any(|n| n == "L") {
        return Err(Error::InvalidAlgebra("basis name `L` is reserved".into()));
    }
    for (i, n) in g.names.iter().enumerate() {
        gens.push(GenInfo::new(gen(i), n.clone(), g.odd[i], int(1)));
    }
    let mut table = BTreeMap::new();
    table.insert((l, l), ConfElt::term(l, d_plus(int(2))));
    for i in 0..g.dim() {
        table.insert((l, gen(i)), ConfElt::term(gen(i), d_plus(int(1))));
        table.insert((gen(i), l), ConfElt::term(gen(i), MPoly::var(Var::Lambda)));
    }
    for ((i, j), row) in &g.mult {
        let v = ConfElt::from_terms(row.iter().map(|(k, c)| (gen(*k), MPoly::constant(c.clone()))));
        table.insert((gen(*i), gen(*j)), v);
    }
    ConformalAlgebra::finite(name, Kind::Lie, false, gens, table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn virasoro_products() {
        let vir = virasoro();
        let l = ConfElt::basis(Gen::Basis(0));
        let ll = vir.lambda_product(&l, &l, Var::Lambda).unwrap();
        assert_eq!(vir.render(&ll), "(d + 2*l)*L");
        let dl = l.scale(&MPoly::var(Var::D));
        let left = vir.lambda_product(&dl, &l, Var::Lambda).unwrap();
        assert_eq!(left, ll.scale(&-MPoly::var(Var::Lambda)));
        let right = vir.lambda_product(&l, &dl, Var::Lambda).unwrap();
        assert_eq!(right, ll.scale(&d_plus(int(1))));
    }

    #[test]
    fn virasoro_nth_products() {
        let vir = virasoro();
        let l = ConfElt::basis(Gen::Basis(0));
        assert_eq!(vir.nth_product(&l, &l, 0).unwrap(), l.scale(&MPoly::var(Var::D)));
        assert_eq!(vir.nth_product(&l, &l, 1).unwrap(), l.scale(&MPoly::int(2)));
        assert!(vir.nth_product(&l, &l, 5).unwrap().is_zero());
    }

    #[test]
    fn virasoro_conjugate() {
        let vir = virasoro();
        let l = ConfElt::basis(Gen::Basis(0));
        let c = vir.conjugate(&l, &l, Var::Lambda).unwrap();
        assert_eq!(c, ConfElt::term(Gen::Basis(0), -d_plus(int(2))));
    }

    #[test]
    fn sl2_current_entries() {
        let cur = current("cur:sl2", &FinAlgebra::sl2()).unwrap();
        let e = cur.by_name("e").unwrap();
        let f = cur.by_name("f").unwrap();
        let h = cur.by_name("h").unwrap();
        assert_eq!(cur.table_entry(&e, &f).unwrap(), ConfElt::basis(h));
        let x = ConfElt::basis(e);
        let y = ConfElt::basis(f);
        assert_eq!(cur.conjugate(&x, &y, Var::Lambda).unwrap(), ConfElt::term(h, MPoly::int(-1)));
        assert!(cur.conjugate(&x, &ConfElt::zero(), Var::Lambda).unwrap().is_zero());
    }

    #[test]
    fn semidirect_cross_terms() {
        let sd = semidirect("semidirect:sl2", &FinAlgebra::sl2()).unwrap();
        let l = sd.by_name("L").unwrap();
        let e = sd.by_name("e").unwrap();
        assert_eq!(sd.table_entry(&l, &e).unwrap(), ConfElt::term(e, d_plus(int(1))));
        assert_eq!(sd.table_entry(&e, &l).unwrap(), ConfElt::term(e, MPoly::var(Var::Lambda)));
    }

    #[test]
    fn killing_form_of_sl2() {
        let k = FinAlgebra::sl2().killing_form();
        assert_eq!(k[0][2], int(4));
        assert_eq!(k[1][1], int(8));
        assert_eq!(k[0][0], int(0));
    }

    #[test]
    fn rejects_non_skew_lie_constants() {
        let mut g = FinAlgebra::abelian(2);
        g.set(0, 1, 0, int(1));
        assert!(current("bad", &g).is_err());
    }
}
