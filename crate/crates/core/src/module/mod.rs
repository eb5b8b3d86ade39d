//! Conformal modules: free `ℂ[∂]`-modules with a λ-action of a conformal
//! algebra, the module axiom checks, and the standard families.

pub mod chom;
pub mod ext;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;

use crate::algebra::check::{CheckReport, Failure};
use crate::algebra::{sign, ConfElt, ConformalAlgebra, Gen, Generators, Kind};
use crate::arith::rat::int;
use crate::arith::{MPoly, Rat, Var};
use crate::elt::FreeElt;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Module elements: basis index to polynomial coefficient.
pub type ModElt = FreeElt<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModBasis {
    pub name: String,
    pub odd: bool,
    pub weight: Rat,
    /// `∂` acts by zero (the trivial module `ℂ`).
    pub d_zero: bool,
}

impl ModBasis {
    pub fn new(name: impl Into<String>, odd: bool, weight: Rat) -> Self {
        ModBasis {
            name: name.into(),
            odd,
            weight,
            d_zero: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    /// `a_λ u_i` for generator `a` and basis index `i`; missing entries are 0.
    Finite(BTreeMap<(Gen, usize), ModElt>),
    /// The standard `Cend_N` module: `J^m_A λ v = (∂+λ+α)^m A v`.
    CendStandard { alpha: MPoly },
}

#[derive(Clone, Debug)]
pub struct ConfModule {
    name: String,
    algebra: Arc<ConformalAlgebra>,
    basis: Vec<ModBasis>,
    action: Action,
}

fn allowed_action_var(v: Var) -> bool {
    matches!(v, Var::D | Var::Lambda | Var::Delta | Var::Alpha)
}

impl ConfModule {
    pub fn finite(
        name: impl Into<String>,
        algebra: Arc<ConformalAlgebra>,
        basis: Vec<ModBasis>,
        action: BTreeMap<(Gen, usize), ModElt>,
    ) -> Result<Self> {
        let name = name.into();
        for ((g, i), v) in &action {
            algebra.info(g)?;
            if *i >= basis.len() {
                return Err(Error::IndexOutOfRange {
                    index: *i,
                    n: basis.len(),
                });
            }
            for (k, p) in v.terms() {
                if *k >= basis.len() {
                    return Err(Error::IndexOutOfRange {
                        index: *k,
                        n: basis.len(),
                    });
                }
                if let Some(bad) = p.vars().into_iter().find(|v| !allowed_action_var(*v)) {
                    return Err(Error::InvalidModule(format!(
                        "action of {} on {} mentions `{bad}`",
                        algebra.gen_name(g),
                        basis[*i].name
                    )));
                }
            }
        }
        let action = action.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(ConfModule {
            name,
            algebra,
            basis,
            action: Action::Finite(action),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn algebra(&self) -> &ConformalAlgebra {
        &self.algebra
    }

    pub fn algebra_arc(&self) -> Arc<ConformalAlgebra> {
        self.algebra.clone()
    }

    pub fn basis(&self) -> &[ModBasis] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn action(&self) -> &Action {
        &self.action
    }

    pub fn basis_name(&self, i: usize) -> String {
        self.basis.get(i).map(|b| b.name.clone()).unwrap_or_else(|| format!("u{i}"))
    }

    pub fn by_name(&self, name: &str) -> Result<usize> {
        self.basis
            .iter()
            .position(|b| b.name == name)
            .ok_or_else(|| Error::UnknownBasis(name.to_string()))
    }

    pub fn render(&self, v: &ModElt) -> String {
        v.render(|i| self.basis_name(*i))
    }

    fn d_zero(&self, i: usize) -> bool {
        self.basis.get(i).is_some_and(|b| b.d_zero)
    }

    fn normalize(&self, v: ModElt) -> ModElt {
        if !v.keys().any(|i| self.d_zero(*i)) {
            return v;
        }
        ModElt::from_terms(v.into_terms().map(|(i, p)| {
            if self.d_zero(i) {
                (i, p.substitute(Var::D, &MPoly::zero()))
            } else {
                (i, p)
            }
        }))
    }

    /// The table value `a_λ u_i` in the variables `λ`, `∂`.
    pub fn action_entry(&self, a: &Gen, i: usize) -> Result<ModElt> {
        if i >= self.dim() {
            return Err(Error::IndexOutOfRange { index: i, n: self.dim() });
        }
        match &self.action {
            Action::Finite(t) => {
                self.algebra.info(a)?;
                Ok(t.get(&(*a, i)).cloned().unwrap_or_default())
            }
            Action::CendStandard { alpha } => {
                let Gen::J { row, col, m } = *a else {
                    return Err(Error::UnknownGenerator(self.algebra.gen_name(a)));
                };
                if col as usize != i + 1 {
                    return Ok(ModElt::zero());
                }
                let base = &(&MPoly::var(Var::D) + &MPoly::var(Var::Lambda)) + alpha;
                Ok(ModElt::term(row as usize - 1, base.pow(m)))
            }
        }
    }

    /// `x_Λ v` with the same sesquilinear rules as the algebra product.
    pub fn action_at(&self, x: &ConfElt, v: &ModElt, lam: &MPoly) -> Result<ModElt> {
        let minus = -lam;
        let shifted = &MPoly::var(Var::D) + lam;
        let mut out = ModElt::zero();
        for (a, p) in x.terms() {
            let left = if self.algebra.d_zero(a) {
                p.clone()
            } else {
                p.substitute(Var::D, &minus)
            };
            if left.is_zero() {
                continue;
            }
            for (i, q) in v.terms() {
                let entry = self.action_entry(a, *i)?;
                if entry.is_zero() {
                    continue;
                }
                let right = if self.d_zero(*i) {
                    q.clone()
                } else {
                    q.substitute(Var::D, &shifted)
                };
                out.add_scaled(&entry.substitute(Var::Lambda, lam), &(&left * &right));
            }
        }
        Ok(self.normalize(out))
    }

    pub fn lambda_action(&self, x: &ConfElt, v: &ModElt, var: Var) -> Result<ModElt> {
        self.action_at(x, v, &MPoly::var(var))
    }

    /// Specializes parameters (`Δ`, `α`) in the action table.
    pub fn specialize(&self, values: &[(Var, Rat)]) -> ConfModule {
        let sub = |p: &MPoly| values.iter().fold(p.clone(), |acc, (v, c)| acc.eval(*v, c));
        let action = match &self.action {
            Action::Finite(t) => {
                Action::Finite(t.iter().map(|(k, v)| (*k, v.map_coeffs(sub))).collect())
            }
            Action::CendStandard { alpha } => Action::CendStandard { alpha: sub(alpha) },
        };
        ConfModule {
            action,
            ..self.clone()
        }
    }
}

fn lam() -> MPoly {
    MPoly::var(Var::Lambda)
}

fn mu() -> MPoly {
    MPoly::var(Var::Mu)
}

/// `[a_λ, b_μ] v − [a_λ b]_{λ+μ} v` for Lie algebras, where
/// `[a_λ, b_μ] = a_λ b_μ − p(a,b) b_μ a_λ`.
pub fn lie_module_residual(m: &ConfModule, a: &Gen, b: &Gen, i: usize) -> Result<ModElt> {
    let alg = m.algebra();
    let (x, y, v) = (ConfElt::basis(*a), ConfElt::basis(*b), ModElt::basis(i));
    let t1 = m.action_at(&x, &m.action_at(&y, &v, &mu())?, &lam())?;
    let t2 = m.action_at(&y, &m.action_at(&x, &v, &lam())?, &mu())?;
    let ab = alg.product_at(&x, &y, &lam())?;
    let t3 = m.action_at(&ab, &v, &(&lam() + &mu()))?;
    let s = sign(alg.odd(a), alg.odd(b));
    Ok(&(&t1 - &t2.scale_rat(&int(s))) - &t3)
}

/// `a_λ(b_μ v) − (a_λ b)_{λ+μ} v`.
pub fn assoc_module_residual(m: &ConfModule, a: &Gen, b: &Gen, i: usize) -> Result<ModElt> {
    let alg = m.algebra();
    let (x, y, v) = (ConfElt::basis(*a), ConfElt::basis(*b), ModElt::basis(i));
    let t1 = m.action_at(&x, &m.action_at(&y, &v, &mu())?, &lam())?;
    let ab = alg.product_at(&x, &y, &lam())?;
    let t2 = m.action_at(&ab, &v, &(&lam() + &mu()))?;
    Ok(&t1 - &t2)
}

/// Checks the module identity appropriate to the algebra's kind on every
/// `(a, b, u_i)` with `a, b` in `scope`.
pub fn check_module(m: &ConfModule, scope: &[Gen]) -> Result<CheckReport> {
    let triples: Vec<(Gen, Gen, usize)> = scope
        .iter()
        .flat_map(|a| scope.iter().flat_map(move |b| (0..m.dim()).map(move |i| (*a, *b, i))))
        .collect();
    let (identity, f): (&str, fn(&ConfModule, &Gen, &Gen, usize) -> Result<ModElt>) =
        match m.algebra().kind() {
            Kind::Lie => ("module-lie", lie_module_residual),
            Kind::Associative => ("module-associative", assoc_module_residual),
        };
    let results: Vec<Result<Option<Failure>>> = triples
        .par_iter()
        .map(|(a, b, i)| {
            let r = f(m, a, b, *i)?;
            Ok((!r.is_zero()).then(|| Failure {
                identity: identity.to_string(),
                tuple: vec![m.algebra().gen_name(a), m.algebra().gen_name(b), m.basis_name(*i)],
                residual: m.render(&r),
            }))
        })
        .collect();
    let mut report = CheckReport {
        checked: triples.len(),
        failures: Vec::new(),
    };
    for r in results {
        if let Some(fail) = r? {
            report.failures.push(fail);
        }
    }
    Ok(report)
}

/// The trivial one-dimensional module `ℂ` (`∂` and the algebra act by 0).
pub fn trivial(algebra: Arc<ConformalAlgebra>) -> ConfModule {
    let mut b = ModBasis::new("1", false, Rat::zero());
    b.d_zero = true;
    ConfModule {
        name: "trivial".into(),
        algebra,
        basis: vec![b],
        action: Action::Finite(BTreeMap::new()),
    }
}

/// `M(Δ, α) = ℂ[∂]m` over the Virasoro algebra, `L_λ m = (∂+α+Δλ)m`.
/// Either parameter may be symbolic (`Var::Delta`, `Var::Alpha`).
pub fn m_delta_alpha(virasoro: Arc<ConformalAlgebra>, delta: MPoly, alpha: MPoly) -> Result<ConfModule> {
    let l = virasoro.by_name("L")?;
    let weight = delta.as_constant().unwrap_or_else(Rat::zero);
    let value = &(&MPoly::var(Var::D) + &alpha) + &(&delta * &lam());
    let name = format!("M({delta},{alpha})");
    let mut action = BTreeMap::new();
    action.insert((l, 0), ModElt::term(0, value));
    ConfModule::finite(name, virasoro, vec![ModBasis::new("m", false, weight)], action)
}

/// `M(U) = ℂ[∂] ⊗ U` over `Cur g`: `a_λ u = a(u)`. `matrices[k]` is the
/// matrix of the `k`-th generator, `(ρ)_{ij}` = coefficient of `u_i` in
/// `a(u_j)`.
pub fn m_u(
    current: Arc<ConformalAlgebra>,
    names: Vec<String>,
    matrices: &[Matrix],
) -> Result<ConfModule> {
    let gens = current.generators(0);
    if matrices.len() != gens.len() {
        return Err(Error::InvalidModule(format!(
            "{} action matrices for {} generators",
            matrices.len(),
            gens.len()
        )));
    }
    let n = names.len();
    let mut action = BTreeMap::new();
    for (g, rho) in gens.iter().zip(matrices) {
        if rho.len() != n || rho.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidModule(format!(
                "action matrix of {} is not {n}×{n}",
                current.gen_name(g)
            )));
        }
        for j in 0..n {
            let v = ModElt::from_terms((0..n).map(|i| (i, MPoly::constant(rho[i][j].clone()))));
            action.insert((*g, j), v);
        }
    }
    let basis = names.into_iter().map(|s| ModBasis::new(s, false, Rat::zero())).collect();
    ConfModule::finite(format!("M(U) over {}", current.name()), current, basis, action)
}

/// The standard `sl_2` representation on `u1, u2` in the basis `e, h, f`.
pub fn sl2_standard_matrices() -> Vec<Matrix> {
    let m = |r: [[i64; 2]; 2]| r.iter().map(|row| row.iter().map(|x| int(*x)).collect()).collect();
    vec![m([[0, 1], [0, 0]]), m([[1, 0], [0, -1]]), m([[0, 0], [1, 0]])]
}

/// The standard module `ℂ[∂]^N` of `Cend_N` / `gc_N`.
pub fn cend_standard(gc: Arc<ConformalAlgebra>, alpha: MPoly) -> Result<ConfModule> {
    let Generators::Gc { n } = gc.generators_def() else {
        return Err(Error::InvalidModule("the standard module needs a gc algebra".into()));
    };
    let basis = (1..=*n).map(|i| ModBasis::new(format!("v{i}"), false, Rat::zero())).collect();
    Ok(ConfModule {
        name: format!("standard over {}", gc.name()),
        algebra: gc,
        basis,
        action: Action::CendStandard { alpha },
    })
}

/// An extension `0 → M(Δ′,α′) → E → M(Δ,α) → 0` on the basis `m′, m`:
/// `L_λ m′ = (∂+α′+Δ′λ)m′`, `L_λ m = (∂+α+Δλ)m + f(∂,λ)m′`.
pub fn extension_module(
    virasoro: Arc<ConformalAlgebra>,
    quotient: (MPoly, MPoly),
    sub: (MPoly, MPoly),
    f: &MPoly,
) -> Result<ConfModule> {
    let l = virasoro.by_name("L")?;
    let (delta, alpha) = quotient;
    let (delta_s, alpha_s) = sub;
    let d = MPoly::var(Var::D);
    let mut action = BTreeMap::new();
    action.insert((l, 0), ModElt::term(0, &(&d + &alpha_s) + &(&delta_s * &lam())));
    let mut top = ModElt::term(1, &(&d + &alpha) + &(&delta * &lam()));
    top.add_term(0, f.clone());
    action.insert((l, 1), top);
    let basis = vec![
        ModBasis::new("m'", false, delta_s.as_constant().unwrap_or_else(Rat::zero)),
        ModBasis::new("m", false, delta.as_constant().unwrap_or_else(Rat::zero)),
    ];
    ConfModule::finite("extension", virasoro, basis, action)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builders::{current, virasoro, FinAlgebra};

    fn vir() -> Arc<ConformalAlgebra> {
        Arc::new(virasoro())
    }

    #[test]
    fn m_delta_alpha_action() {
        let m = m_delta_alpha(vir(), MPoly::int(2), MPoly::zero()).unwrap();
        let l = ConfElt::basis(Gen::Basis(0));
        let v = m.lambda_action(&l, &ModElt::basis(0), Var::Lambda).unwrap();
        assert_eq!(m.render(&v), "(d + 2*l)*m");
        let dl = l.scale(&MPoly::var(Var::D));
        let w = m.lambda_action(&dl, &ModElt::basis(0), Var::Lambda).unwrap();
        assert_eq!(w, v.scale(&-lam()));
    }

    #[test]
    fn symbolic_m_delta_alpha_is_a_module() {
        let m = m_delta_alpha(vir(), MPoly::var(Var::Delta), MPoly::var(Var::Alpha)).unwrap();
        let r = check_module(&m, &m.algebra().generators(0)).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn corrupted_action_fails() {
        let v = vir();
        let l = v.by_name("L").unwrap();
        let bad = &(&MPoly::var(Var::D) + &MPoly::var(Var::Alpha))
            + &(&MPoly::var(Var::Delta) * &lam().pow(2));
        let mut action = BTreeMap::new();
        action.insert((l, 0), ModElt::term(0, bad));
        let m = ConfModule::finite("bad", v, vec![ModBasis::new("m", false, Rat::zero())], action)
            .unwrap();
        assert!(!check_module(&m, &[l]).unwrap().passed());
    }

    #[test]
    fn sl2_modules() {
        let g = FinAlgebra::sl2();
        let cur = Arc::new(current("cur:sl2", &g).unwrap());
        let std = m_u(cur.clone(), vec!["u1".into(), "u2".into()], &sl2_standard_matrices()).unwrap();
        let e = cur.by_name("e").unwrap();
        let v = std.lambda_action(&ConfElt::basis(e), &ModElt::basis(1), Var::Lambda).unwrap();
        assert_eq!(v, ModElt::basis(0));
        assert!(check_module(&std, &cur.generators(0)).unwrap().passed());
        let adj = m_u(cur.clone(), g.names.clone(), &g.adjoint_matrices()).unwrap();
        let h = cur.by_name("h").unwrap();
        let w = adj.lambda_action(&ConfElt::basis(h), &ModElt::basis(0), Var::Lambda).unwrap();
        assert_eq!(w, ModElt::term(0, MPoly::int(2)));
        assert!(check_module(&adj, &cur.generators(0)).unwrap().passed());
        let triv = m_u(cur.clone(), vec!["u".into()], &vec![vec![vec![Rat::zero()]]; 3]).unwrap();
        for gen in cur.generators(0) {
            assert!(triv.action_entry(&gen, 0).unwrap().is_zero());
        }
    }

    #[test]
    fn gc_standard_module() {
        let assoc = Arc::new(ConformalAlgebra::gc(2, Kind::Associative).unwrap());
        let m = cend_standard(assoc.clone(), MPoly::zero()).unwrap();
        assert!(check_module(&m, &assoc.generators(2)).unwrap().passed());
        let lie = Arc::new(ConformalAlgebra::gc(1, Kind::Lie).unwrap());
        let m = cend_standard(lie.clone(), MPoly::int(1)).unwrap();
        assert!(check_module(&m, &lie.generators(2)).unwrap().passed());
    }
}
