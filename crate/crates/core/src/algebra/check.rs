//! Symbolic axiom checks. Every identity is evaluated exactly in
//! `ℂ[λ, μ] ⊗ R`; a failure is a tuple together with its nonzero residual.

use rayon::prelude::*;

use super::{sign, ConfElt, ConformalAlgebra, Gen, Kind};
use crate::arith::rat::int;
use crate::arith::{MPoly, Var};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub identity: String,
    pub tuple: Vec<String>,
    pub residual: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub checked: usize,
    pub failures: Vec<Failure>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(mut self, other: CheckReport) -> CheckReport {
        self.checked += other.checked;
        self.failures.extend(other.failures);
        self
    }
}

fn lam() -> MPoly {
    MPoly::var(Var::Lambda)
}

fn mu() -> MPoly {
    MPoly::var(Var::Mu)
}

/// `[a_λ b] + p(a,b)[b_{−λ−∂} a]`.
pub fn skew_residual(alg: &ConformalAlgebra, a: &Gen, b: &Gen) -> Result<ConfElt> {
    let x = ConfElt::basis(*a);
    let y = ConfElt::basis(*b);
    let direct = alg.lambda_product(&x, &y, Var::Lambda)?;
    let swapped = alg.conjugate(&x, &y, Var::Lambda)?;
    let s = sign(alg.odd(a), alg.odd(b));
    Ok(&direct + &swapped.scale_rat(&int(s)))
}

/// `[a_λ[b_μ c]] − [[a_λ b]_{λ+μ} c] − p(a,b)[b_μ[a_λ c]]`.
pub fn jacobi_residual(alg: &ConformalAlgebra, a: &Gen, b: &Gen, c: &Gen) -> Result<ConfElt> {
    let (x, y, z) = (ConfElt::basis(*a), ConfElt::basis(*b), ConfElt::basis(*c));
    let bc = alg.product_at(&y, &z, &mu())?;
    let t1 = alg.product_at(&x, &bc, &lam())?;
    let ab = alg.product_at(&x, &y, &lam())?;
    let t2 = alg.product_at(&ab, &z, &(&lam() + &mu()))?;
    let ac = alg.product_at(&x, &z, &lam())?;
    let t3 = alg.product_at(&y, &ac, &mu())?;
    let s = sign(alg.odd(a), alg.odd(b));
    Ok(&(&t1 - &t2) - &t3.scale_rat(&int(s)))
}

/// `a_λ(b_μ c) − (a_λ b)_{λ+μ} c`.
pub fn assoc_residual(alg: &ConformalAlgebra, a: &Gen, b: &Gen, c: &Gen) -> Result<ConfElt> {
    let (x, y, z) = (ConfElt::basis(*a), ConfElt::basis(*b), ConfElt::basis(*c));
    let bc = alg.product_at(&y, &z, &mu())?;
    let t1 = alg.product_at(&x, &bc, &lam())?;
    let ab = alg.product_at(&x, &y, &lam())?;
    let t2 = alg.product_at(&ab, &z, &(&lam() + &mu()))?;
    Ok(&t1 - &t2)
}

/// `a_λ b − b_{−λ−∂} a`.
pub fn commutativity_residual(alg: &ConformalAlgebra, a: &Gen, b: &Gen) -> Result<ConfElt> {
    let x = ConfElt::basis(*a);
    let y = ConfElt::basis(*b);
    Ok(&alg.lambda_product(&x, &y, Var::Lambda)? - &alg.conjugate(&x, &y, Var::Lambda)?)
}

fn pairs(scope: &[Gen]) -> Vec<Vec<Gen>> {
    scope
        .iter()
        .flat_map(|a| scope.iter().map(move |b| vec![*a, *b]))
        .collect()
}

fn triples(scope: &[Gen]) -> Vec<Vec<Gen>> {
    scope
        .iter()
        .flat_map(|a| {
            scope
                .iter()
                .flat_map(move |b| scope.iter().map(move |c| vec![*a, *b, *c]))
        })
        .collect()
}

fn run(
    alg: &ConformalAlgebra,
    identity: &str,
    tuples: Vec<Vec<Gen>>,
    f: impl Fn(&[Gen]) -> Result<ConfElt> + Sync,
) -> Result<CheckReport> {
    let results: Vec<Result<Option<Failure>>> = tuples
        .par_iter()
        .map(|t| {
            let r = f(t)?;
            Ok((!r.is_zero()).then(|| Failure {
                identity: identity.to_string(),
                tuple: t.iter().map(|g| alg.gen_name(g)).collect(),
                residual: alg.render(&r),
            }))
        })
        .collect();
    let mut report = CheckReport {
        checked: tuples.len(),
        failures: Vec::new(),
    };
    for r in results {
        if let Some(fail) = r? {
            report.failures.push(fail);
        }
    }
    Ok(report)
}

pub fn check_skew(alg: &ConformalAlgebra, scope: &[Gen]) -> Result<CheckReport> {
    run(alg, "skew-symmetry", pairs(scope), |t| skew_residual(alg, &t[0], &t[1]))
}

pub fn check_jacobi(alg: &ConformalAlgebra, scope: &[Gen]) -> Result<CheckReport> {
    run(alg, "jacobi", triples(scope), |t| jacobi_residual(alg, &t[0], &t[1], &t[2]))
}

pub fn check_associativity(alg: &ConformalAlgebra, scope: &[Gen]) -> Result<CheckReport> {
    run(alg, "associativity", triples(scope), |t| {
        assoc_residual(alg, &t[0], &t[1], &t[2])
    })
}

pub fn check_commutativity(alg: &ConformalAlgebra, scope: &[Gen]) -> Result<CheckReport> {
    run(alg, "commutativity", pairs(scope), |t| {
        commutativity_residual(alg, &t[0], &t[1])
    })
}

/// The defining identities for the algebra's kind: skew-symmetry and
/// Jacobi for Lie algebras, associativity otherwise.
pub fn check_axioms(alg: &ConformalAlgebra, scope: &[Gen]) -> Result<CheckReport> {
    match alg.kind() {
        Kind::Lie => Ok(check_skew(alg, scope)?.merge(check_jacobi(alg, scope)?)),
        Kind::Associative => check_associativity(alg, scope),
    }
}

/// `p(a_λ b) = p(a) + p(b)` for every pair in scope.
pub fn check_parity(alg: &ConformalAlgebra, scope: &[Gen]) -> Result<CheckReport> {
    run(alg, "parity", pairs(scope), |t| {
        let v = alg.table_entry(&t[0], &t[1])?;
        let want = alg.odd(&t[0]) ^ alg.odd(&t[1]);
        Ok(ConfElt::from_terms(
            v.terms()
                .filter(|(g, _)| alg.odd(g) != want)
                .map(|(g, p)| (*g, p.clone())),
        ))
    })
}

/// Weight homogeneity: every term `λ^k ∂^l c` of `a_λ b` has
/// `k + l + w(c) = w(a) + w(b) − 1`. Central (`∂`-annihilated) targets
/// are exempt.
pub fn check_weights(alg: &ConformalAlgebra, scope: &[Gen]) -> Result<CheckReport> {
    run(alg, "weight", pairs(scope), |t| {
        let v = alg.table_entry(&t[0], &t[1])?;
        let target = alg.weight(&t[0])? + alg.weight(&t[1])? - int(1);
        let mut bad = ConfElt::zero();
        for (g, p) in v.terms() {
            if alg.d_zero(g) {
                continue;
            }
            let w = alg.weight(g)?;
            for (m, c) in p.terms() {
                if int(m.degree() as i64) + &w != target {
                    bad.add_term(*g, MPoly::term(c.clone(), m.clone()));
                }
            }
        }
        Ok(bad)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builders::{current, virasoro, FinAlgebra};

    #[test]
    fn virasoro_passes() {
        let vir = virasoro();
        let r = check_axioms(&vir, &vir.generators(0)).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.checked, 2);
    }

    #[test]
    fn mutated_virasoro_fails_jacobi() {
        let vir = virasoro();
        let l = Gen::Basis(0);
        let bad = vir
            .with_entry(
                l,
                l,
                ConfElt::term(l, &MPoly::var(Var::D) + &MPoly::var(Var::Lambda).scale(&int(3))),
            )
            .unwrap();
        let r = check_jacobi(&bad, &bad.generators(0)).unwrap();
        assert!(!r.passed());
        assert_ne!(r.failures[0].residual, "0");
    }

    #[test]
    fn mat2_is_associative() {
        let m = current("cur:mat2", &FinAlgebra::mat(2)).unwrap();
        let r = check_axioms(&m, &m.generators(0)).unwrap();
        assert!(r.passed());
        assert_eq!(r.checked, 64);
    }
}
