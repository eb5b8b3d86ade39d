use std::sync::Arc;

use lambda_forge::algebra::builders::{current, semidirect, virasoro, FinAlgebra};
use lambda_forge::algebra::check::check_parity;
use lambda_forge::algebra::superconf::{k_n, w_n};
use lambda_forge::algebra::{ConfElt, ConformalAlgebra};
use lambda_forge::arith::rat::int;
use lambda_forge::arith::{GrassmannElt, MPoly, Monomial, Var};
use lambda_forge::cohomology::Complex;
use lambda_forge::dist::oracle_check;
use lambda_forge::module::trivial;
use proptest::prelude::*;

const VARS: [Var; 3] = [Var::D, Var::Lambda, Var::Mu];

fn poly() -> impl Strategy<Value = MPoly> {
    prop::collection::vec(((0u32..3, 0u32..3, 0u32..2), -4i64..=4), 0..5).prop_map(|terms| {
        MPoly::from_terms(terms.into_iter().map(|((a, b, c), k)| {
            (
                Monomial::from_pairs(vec![(VARS[0], a), (VARS[1], b), (VARS[2], c)]),
                int(k),
            )
        }))
    })
}

fn d_poly() -> impl Strategy<Value = MPoly> {
    prop::collection::vec(-3i64..=3, 1..4).prop_map(|cs| {
        MPoly::from_terms(
            cs.into_iter()
                .enumerate()
                .map(|(i, c)| (Monomial::var(Var::D, i as u32), int(c))),
        )
    })
}

fn algebras() -> Vec<ConformalAlgebra> {
    let sl2 = FinAlgebra::sl2();
    vec![
        virasoro(),
        current("cur", &sl2).unwrap(),
        semidirect("sd", &sl2).unwrap(),
        w_n(1).unwrap(),
        k_n(2).unwrap(),
    ]
}

fn grass(n: usize) -> impl Strategy<Value = GrassmannElt> {
    prop::collection::vec((0u32..(1 << n), -3i64..=3), 0..5).prop_map(move |terms| {
        let mut g = GrassmannElt::zero(n);
        for (m, c) in terms {
            g.add_term(m as _, MPoly::constant(int(c)));
        }
        g
    })
}

fn homogeneous(n: usize, odd: bool) -> impl Strategy<Value = GrassmannElt> {
    grass(n).prop_map(move |g| {
        let mut out = GrassmannElt::zero(n);
        for (m, c) in g.terms() {
            if (m.count_ones() % 2 == 1) == odd {
                out.add_term(*m, c.clone());
            }
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &MPoly::one(), a.clone());
    }

    #[test]
    fn derivative_is_a_derivation(a in poly(), b in poly()) {
        for v in VARS {
            let lhs = (&a * &b).derivative(v);
            let rhs = &(&a.derivative(v) * &b) + &(&a * &b.derivative(v));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn substitution_is_a_homomorphism(a in poly(), b in poly(), img in poly()) {
        let img = img.substitute(Var::Lambda, &MPoly::var(Var::Nu));
        let s = |p: &MPoly| p.substitute(Var::Lambda, &img);
        prop_assert_eq!(s(&(&a * &b)), &s(&a) * &s(&b));
        prop_assert_eq!(s(&(&a + &b)), &s(&a) + &s(&b));
    }

    #[test]
    fn grassmann_supercommutes(x in homogeneous(3, true), y in homogeneous(3, true), z in homogeneous(3, false)) {
        let xy = x.mul(&y).unwrap();
        let yx = y.mul(&x).unwrap();
        prop_assert!(xy.add(&yx).unwrap().is_zero());
        prop_assert_eq!(x.mul(&z).unwrap(), z.mul(&x).unwrap());
    }

    #[test]
    fn grassmann_odd_derivation(x in homogeneous(3, true), y in grass(3), i in 1usize..=3) {
        // ∂(xy) = (∂x)y − x(∂y) for odd x
        let lhs = x.mul(&y).unwrap().deriv(i).unwrap();
        let rhs = x.deriv(i).unwrap().mul(&y).unwrap()
            .add(&x.mul(&y.deriv(i).unwrap()).unwrap().scale_rat(&int(-1))).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sesquilinearity(which in 0usize..5, i in 0usize..32, j in 0usize..32, p in d_poly(), q in d_poly()) {
        let alg = &algebras()[which];
        let gens = alg.generators(0);
        let (a, b) = (gens[i % gens.len()], gens[j % gens.len()]);
        let lam = MPoly::var(Var::Lambda);
        let base = alg.product_at(&ConfElt::basis(a), &ConfElt::basis(b), &lam).unwrap();
        // (p(∂)a)_λ b = p(−λ) a_λ b
        let left = alg.product_at(&ConfElt::term(a, p.clone()), &ConfElt::basis(b), &lam).unwrap();
        prop_assert_eq!(left, base.scale(&p.substitute(Var::D, &-lam.clone())));
        // a_λ (q(∂) b) = q(∂+λ) a_λ b
        let right = alg.product_at(&ConfElt::basis(a), &ConfElt::term(b, q.clone()), &lam).unwrap();
        let shifted = q.substitute(Var::D, &(&MPoly::var(Var::D) + &lam));
        let want = if alg.d_zero(&b) { ConfElt::zero() } else { base.scale(&shifted) };
        prop_assert_eq!(right, want);
    }

    #[test]
    fn parity_of_products(i in 0usize..64, j in 0usize..64) {
        let w2 = w_n(2).unwrap();
        let gens = w2.generators(0);
        let (a, b) = (gens[i % gens.len()], gens[j % gens.len()]);
        let p = w2.lambda_product(&ConfElt::basis(a), &ConfElt::basis(b), Var::Lambda).unwrap();
        if !p.is_zero() {
            prop_assert_eq!(w2.parity_of(&p), Some(w2.odd(&a) ^ w2.odd(&b)));
        }
    }
}

#[test]
fn parity_coherence_on_families() {
    for alg in algebras().iter().chain([w_n(2).unwrap(), k_n(3).unwrap()].iter()) {
        assert!(check_parity(alg, &alg.generators(0)).unwrap().passed(), "{}", alg.name());
    }
}

#[test]
fn modes_reproduce_table() {
    for alg in algebras() {
        let gens = alg.generators(0);
        for a in &gens {
            for b in &gens {
                assert!(oracle_check(&alg, a, b, 10).unwrap(), "{} {:?} {:?}", alg.name(), a, b);
            }
        }
    }
}

#[test]
fn d_squared_vanishes_on_components() {
    let sl2 = FinAlgebra::sl2();
    let cx = Complex::new(trivial(Arc::new(semidirect("sd", &sl2).unwrap()))).unwrap();
    for n in 0..2 {
        for w in cx.weights(n, &int(2)) {
            assert!(cx.d_squared_vanishes(n, &w).unwrap(), "n={n} w={w}");
        }
    }
}
