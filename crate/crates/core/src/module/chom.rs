//! Conformal linear maps between modules, the λ-action of the algebra on
//! them, the contragredient module and a search for constant intertwiners.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;

use super::{ConfModule, ModBasis, ModElt};
use crate::algebra::check::{CheckReport, Failure};
use crate::algebra::{ConfElt, Gen};
use crate::arith::rat::int;
use crate::arith::{MPoly, Monomial, Rat, Var};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

fn nu() -> MPoly {
    MPoly::var(Var::Nu)
}

/// `φ_ν` determined by its values on the basis of the source module:
/// `images[i] = φ_ν(u_i)`, polynomials in `ν`, `∂` (and parameters) over
/// the target basis. Extended by `φ_ν(Q(∂)u) = Q(∂+ν)φ_ν(u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfLinearMap {
    pub images: Vec<ModElt>,
}

impl ConfLinearMap {
    pub fn new(images: Vec<ModElt>) -> Self {
        ConfLinearMap { images }
    }

    pub fn identity(dim: usize) -> Self {
        ConfLinearMap::new((0..dim).map(ModElt::basis).collect())
    }

    /// Builds a map from prescribed values `φ_ν(∂^k u_i)`. Every basis
    /// vector needs a `k = 0` value; values at higher `k` must agree with
    /// `(∂+ν)^k φ_ν(u_i)`.
    pub fn from_values(dim: usize, values: &[(usize, u32, ModElt)]) -> Result<Self> {
        let mut images: Vec<Option<ModElt>> = vec![None; dim];
        for (i, k, v) in values {
            if *i >= dim {
                return Err(Error::IndexOutOfRange { index: *i, n: dim });
            }
            if *k == 0 {
                images[*i] = Some(v.clone());
            }
        }
        let images: Vec<ModElt> = images
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::NotConformalLinear(format!("no value on basis vector {i}"))))
            .collect::<Result<_>>()?;
        let map = ConfLinearMap { images };
        for (i, k, v) in values {
            let u = ModElt::term(*i, MPoly::var(Var::D).pow(*k));
            if map.apply(&u, &nu()) != *v {
                return Err(Error::NotConformalLinear(format!(
                    "value on ∂^{k} of basis vector {i} breaks ∂φ_ν − φ_ν∂ = −νφ_ν"
                )));
            }
        }
        Ok(map)
    }

    /// `φ_Λ(u)` for an arbitrary source element.
    pub fn apply(&self, u: &ModElt, at: &MPoly) -> ModElt {
        let shifted = &MPoly::var(Var::D) + at;
        let mut out = ModElt::zero();
        for (i, q) in u.terms() {
            let Some(img) = self.images.get(*i) else { continue };
            let img = img.substitute(Var::Nu, at);
            out.add_scaled(&img, &q.substitute(Var::D, &shifted));
        }
        out
    }
}

fn require_even(u: &ConfModule) -> Result<()> {
    if u.algebra().is_super() {
        return Err(Error::Unsupported("conformal linear maps over superalgebras".into()));
    }
    Ok(())
}

/// `(a_Λ φ)_ν u = a_Λ(φ_{ν−Λ} u) − φ_{ν−Λ}(a_Λ u)`.
pub fn chom_apply(
    u_mod: &ConfModule,
    v_mod: &ConfModule,
    a: &ConfElt,
    phi: &ConfLinearMap,
    lam: &MPoly,
    u: &ModElt,
) -> Result<ModElt> {
    require_even(u_mod)?;
    let at = &nu() - lam;
    let t1 = v_mod.action_at(a, &phi.apply(u, &at), lam)?;
    let t2 = phi.apply(&u_mod.action_at(a, u, lam)?, &at);
    Ok(&t1 - &t2)
}

/// `a_Λ φ` as a conformal linear map (in `ν`, with `Λ` a parameter).
pub fn chom_action(
    u_mod: &ConfModule,
    v_mod: &ConfModule,
    a: &ConfElt,
    phi: &ConfLinearMap,
    lam: &MPoly,
) -> Result<ConfLinearMap> {
    let images = (0..u_mod.dim())
        .map(|i| chom_apply(u_mod, v_mod, a, phi, lam, &ModElt::basis(i)))
        .collect::<Result<_>>()?;
    Ok(ConfLinearMap::new(images))
}

/// `[a_λ, b_μ]φ − [a_λ b]_{λ+μ}φ`, evaluated on every source basis vector.
pub fn chom_residual(
    u_mod: &ConfModule,
    v_mod: &ConfModule,
    a: &Gen,
    b: &Gen,
    phi: &ConfLinearMap,
) -> Result<Vec<ModElt>> {
    let alg = u_mod.algebra();
    let (l, m) = (MPoly::var(Var::Lambda), MPoly::var(Var::Mu));
    let (x, y) = (ConfElt::basis(*a), ConfElt::basis(*b));
    let b_phi = chom_action(u_mod, v_mod, &y, phi, &m)?;
    let a_phi = chom_action(u_mod, v_mod, &x, phi, &l)?;
    let ab = alg.product_at(&x, &y, &l)?;
    let lm = &l + &m;
    (0..u_mod.dim())
        .map(|i| {
            let u = ModElt::basis(i);
            let t1 = chom_apply(u_mod, v_mod, &x, &b_phi, &l, &u)?;
            let t2 = chom_apply(u_mod, v_mod, &y, &a_phi, &m, &u)?;
            let t3 = chom_apply(u_mod, v_mod, &ab, phi, &lm, &u)?;
            Ok(&(&t1 - &t2) - &t3)
        })
        .collect()
}

/// Runs the Lie module identity on `Chom(U, V)` over the given test maps.
pub fn check_chom(
    u_mod: &ConfModule,
    v_mod: &ConfModule,
    maps: &[ConfLinearMap],
    scope: &[Gen],
) -> Result<CheckReport> {
    let cases: Vec<(Gen, Gen, usize)> = scope
        .iter()
        .flat_map(|a| scope.iter().flat_map(move |b| (0..maps.len()).map(move |k| (*a, *b, k))))
        .collect();
    let results: Vec<Result<Option<Failure>>> = cases
        .par_iter()
        .map(|(a, b, k)| {
            let r = chom_residual(u_mod, v_mod, a, b, &maps[*k])?;
            Ok(r.iter().any(|x| !x.is_zero()).then(|| Failure {
                identity: "chom-module".into(),
                tuple: vec![u_mod.algebra().gen_name(a), u_mod.algebra().gen_name(b), format!("map{k}")],
                residual: r.iter().map(|x| v_mod.render(x)).collect::<Vec<_>>().join("; "),
            }))
        })
        .collect();
    let mut report = CheckReport {
        checked: cases.len(),
        failures: Vec::new(),
    };
    for r in results {
        if let Some(f) = r? {
            report.failures.push(f);
        }
    }
    Ok(report)
}

/// Test maps `φ_ν(u_i) = ν^p ∂^q w_j` for `p, q ≤ degree`.
pub fn monomial_maps(dim_u: usize, dim_v: usize, degree: u32) -> Vec<ConfLinearMap> {
    let mut out = Vec::new();
    for i in 0..dim_u {
        for j in 0..dim_v {
            for p in 0..=degree {
                for q in 0..=degree {
                    let mut images = vec![ModElt::zero(); dim_u];
                    images[i] = ModElt::term(j, &nu().pow(p) * &MPoly::var(Var::D).pow(q));
                    out.push(ConfLinearMap::new(images));
                }
            }
        }
    }
    out
}

/// The contragredient module `U* = Chom(U, ℂ)` in the dual basis:
/// `a_λ u*_k = −Σ_i R_{ki}(λ, −λ−∂) u*_i`, where `R_{ki}` is the coefficient
/// of `u_k` in `a_λ u_i`.
pub fn contragredient(u: &ConfModule) -> Result<ConfModule> {
    require_even(u)?;
    let alg = u.algebra_arc();
    let image = -(&MPoly::var(Var::Lambda) + &MPoly::var(Var::D));
    let mut action: BTreeMap<(Gen, usize), ModElt> = BTreeMap::new();
    for a in alg.generators(2) {
        for i in 0..u.dim() {
            let r = u.action_entry(&a, i)?;
            for (k, p) in r.terms() {
                let c = -p.substitute(Var::D, &image);
                action.entry((a, *k)).or_default().add_term(i, c);
            }
        }
    }
    let basis = u
        .basis()
        .iter()
        .map(|b| ModBasis::new(format!("{}*", b.name), b.odd, int(1) - &b.weight))
        .collect();
    ConfModule::finite(format!("{}*", u.name()), alg, basis, action)
}

/// All `∂`-constant matrices `T` (`dim M2 × dim M1`) with
/// `T(a_λ u) = a_λ(T u)` for every generator, as a basis of the solution
/// space.
pub fn intertwiners(m1: &ConfModule, m2: &ConfModule) -> Result<Vec<Matrix>> {
    let (d1, d2) = (m1.dim(), m2.dim());
    let var = |l: usize, k: usize| l * d1 + k;
    let mut rows: BTreeMap<(usize, usize, usize, Monomial), Vec<Rat>> = BTreeMap::new();
    let mut add = |key: (usize, usize, usize), col: usize, p: &MPoly, sgn: i64| {
        for (mono, c) in p.terms() {
            let row = rows
                .entry((key.0, key.1, key.2, mono.clone()))
                .or_insert_with(|| vec![Rat::zero(); d1 * d2]);
            row[col] += c * int(sgn);
        }
    };
    for (gi, a) in m1.algebra().generators(2).iter().enumerate() {
        for i in 0..d1 {
            let r1 = m1.action_entry(a, i)?;
            for l in 0..d2 {
                // Σ_k R1_{ki} T_{lk}
                for (k, p) in r1.terms() {
                    add((gi, i, l), var(l, *k), p, 1);
                }
                // − Σ_j R2_{lj} T_{ji}
                for j in 0..d2 {
                    let p = m2.action_entry(a, j)?.coeff(&l);
                    add((gi, i, l), var(j, i), &p, -1);
                }
            }
        }
    }
    let system: Matrix = rows.into_values().collect();
    let kernel = if system.is_empty() {
        (0..d1 * d2)
            .map(|c| (0..d1 * d2).map(|r| if r == c { int(1) } else { Rat::zero() }).collect())
            .collect()
    } else {
        linalg::nullspace(&system, d1 * d2)
    };
    Ok(kernel
        .into_iter()
        .map(|v| (0..d2).map(|l| (0..d1).map(|k| v[var(l, k)].clone()).collect()).collect())
        .collect())
}

/// Whether some combination of the intertwiner basis is invertible (square
/// case), probed on the basis elements and their sum.
pub fn has_isomorphism(basis: &[Matrix]) -> bool {
    if basis.is_empty() {
        return false;
    }
    let n = basis[0].len();
    if basis[0].iter().any(|r| r.len() != n) {
        return false;
    }
    let mut sum = linalg::zeros(n, n);
    for t in basis {
        for i in 0..n {
            for j in 0..n {
                sum[i][j] += &t[i][j];
            }
        }
    }
    basis.iter().chain(std::iter::once(&sum)).any(|t| !linalg::det(t).is_zero())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::builders::virasoro;
    use crate::module::{check_module, m_delta_alpha, trivial};

    #[test]
    fn trivial_maps_are_annihilated() {
        let vir = Arc::new(virasoro());
        let c = trivial(vir.clone());
        let phi = ConfLinearMap::identity(1);
        let l = ConfElt::basis(vir.by_name("L").unwrap());
        let out = chom_action(&c, &c, &l, &phi, &MPoly::var(Var::Lambda)).unwrap();
        assert!(out.images.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn chom_output_is_conformal_linear() {
        let vir = Arc::new(virasoro());
        let m = m_delta_alpha(vir.clone(), MPoly::int(2), MPoly::int(1)).unwrap();
        let l = ConfElt::basis(vir.by_name("L").unwrap());
        let phi = ConfLinearMap::new(vec![ModElt::term(0, &nu() + &MPoly::var(Var::D))]);
        let lam = MPoly::var(Var::Lambda);
        let du = ModElt::term(0, MPoly::var(Var::D));
        let lhs = chom_apply(&m, &m, &l, &phi, &lam, &du).unwrap();
        let base = chom_apply(&m, &m, &l, &phi, &lam, &ModElt::basis(0)).unwrap();
        assert_eq!(lhs, base.scale(&(&MPoly::var(Var::D) + &nu())));
    }

    #[test]
    fn contragredient_of_m_delta() {
        let vir = Arc::new(virasoro());
        let delta = MPoly::var(Var::Delta);
        let m = m_delta_alpha(vir.clone(), delta.clone(), MPoly::zero()).unwrap();
        let dual = contragredient(&m).unwrap();
        assert!(check_module(&dual, &vir.generators(0)).unwrap().passed());
        let target = m_delta_alpha(vir, &MPoly::one() - &delta, MPoly::zero()).unwrap();
        let t = intertwiners(&dual, &target).unwrap();
        assert!(has_isomorphism(&t));
    }

    #[test]
    fn from_values_rejects_inconsistent_data() {
        let v0 = ModElt::basis(0);
        let good = ModElt::term(0, &MPoly::var(Var::D) + &nu());
        assert!(ConfLinearMap::from_values(1, &[(0, 0, v0.clone()), (0, 1, good)]).is_ok());
        let bad = ModElt::term(0, MPoly::var(Var::D));
        assert!(matches!(
            ConfLinearMap::from_values(1, &[(0, 0, v0), (0, 1, bad)]),
            Err(Error::NotConformalLinear(_))
        ));
    }
}
