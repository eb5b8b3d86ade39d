//! Extensions `0 → M(Δ′,α′) → E → M(Δ,α) → 0` of Virasoro modules.
//!
//! The unknown is the off-diagonal term `f(∂,λ)` of `L_λ m`; the module
//! identity on `(L, L, m)` is linear in `f`, and changing the lift
//! `m ↦ m + g(∂)m′` adds the coboundary
//! `g(∂+λ)(∂+α′+Δ′λ) − (∂+α+Δλ)g(∂)`.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{check_module, extension_module, lie_module_residual, ModElt};
use crate::algebra::builders::virasoro;
use crate::algebra::{ConfElt, ConformalAlgebra, Gen};
use crate::arith::rat::{int, rat};
use crate::arith::{MPoly, Monomial, Rat, UPoly, Var};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Largest total degree accepted for the unknown cocycle.
pub const MAX_DEGREE: u32 = 30;

fn vir() -> Arc<ConformalAlgebra> {
    static VIR: OnceLock<Arc<ConformalAlgebra>> = OnceLock::new();
    VIR.get_or_init(|| Arc::new(virasoro())).clone()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionProblem {
    /// Quotient `M(Δ, α)`.
    pub delta: Rat,
    pub alpha: Rat,
    /// Submodule `M(Δ′, α′)`.
    pub delta_sub: Rat,
    pub alpha_sub: Rat,
    /// Total-degree bound on `f`; defaults to `max(Δ−Δ′, 0) + 3`.
    pub degree: Option<u32>,
}

impl ExtensionProblem {
    pub fn new(delta: Rat, delta_sub: Rat, alpha: Rat, alpha_sub: Rat) -> Self {
        ExtensionProblem {
            delta,
            alpha,
            delta_sub,
            alpha_sub,
            degree: None,
        }
    }

    pub fn ints(delta: i64, delta_sub: i64, alpha: i64, alpha_sub: i64) -> Self {
        Self::new(int(delta), int(delta_sub), int(alpha), int(alpha_sub))
    }

    pub fn with_degree(mut self, d: u32) -> Self {
        self.degree = Some(d);
        self
    }

    /// `Δ − Δ′` when it is an integer.
    pub fn shift(&self) -> Option<i64> {
        let s = &self.delta - &self.delta_sub;
        s.is_integer().then(|| s.to_integer().try_into().ok()).flatten()
    }

    fn min_bound(&self) -> u32 {
        let s = (&self.delta - &self.delta_sub).floor().to_integer();
        let s: i64 = s.try_into().unwrap_or(i64::MAX / 2);
        (s.max(0) as u32).saturating_add(2)
    }

    pub fn bound(&self) -> Result<u32> {
        let min = self.min_bound();
        let b = self.degree.unwrap_or(min + 1);
        if b < min {
            return Err(Error::DegreeBound {
                requested: b,
                reason: format!("must be at least Δ−Δ′+2 = {min}"),
            });
        }
        if b > MAX_DEGREE {
            return Err(Error::DegreeBound {
                requested: b,
                reason: format!("exceeds the supported maximum {MAX_DEGREE}"),
            });
        }
        Ok(b)
    }

    fn quotient(&self) -> (MPoly, MPoly) {
        (MPoly::constant(self.delta.clone()), MPoly::constant(self.alpha.clone()))
    }

    fn sub(&self) -> (MPoly, MPoly) {
        (MPoly::constant(self.delta_sub.clone()), MPoly::constant(self.alpha_sub.clone()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FastPath {
    /// `α ≠ α′`.
    SpectralMismatch,
    /// `Δ − Δ′ ∉ ℤ`.
    NonIntegerShift,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionResult {
    /// Dimension of the space of nontrivial extensions (cocycles modulo
    /// coboundaries) within the degree bound.
    pub dim: usize,
    /// Representative cocycles `f(∂, λ)`.
    pub cocycles: Vec<MPoly>,
    pub bound: u32,
    pub cocycle_dim: usize,
    pub coboundary_rank: usize,
    pub fast_path: Option<FastPath>,
}

/// Monomials `∂^a λ^b` with `a + b ≤ t`, by degree then `∂`-exponent.
fn unknowns(t: u32) -> Vec<(u32, u32)> {
    (0..=t).flat_map(|d| (0..=d).rev().map(move |a| (a, d - a))).collect()
}

fn mono(a: u32, b: u32) -> MPoly {
    &MPoly::var(Var::D).pow(a) * &MPoly::var(Var::Lambda).pow(b)
}

/// The `m′`-component of the module identity on `(L, L, m)` for the
/// extension with off-diagonal term `f`.
pub fn cocycle_residual(quotient: &(MPoly, MPoly), sub: &(MPoly, MPoly), f: &MPoly) -> Result<MPoly> {
    let e = extension_module(vir(), quotient.clone(), sub.clone(), f)?;
    let l = Gen::Basis(0);
    Ok(lie_module_residual(&e, &l, &l, 1)?.coeff(&0))
}

/// `g(∂+λ)(∂+α′+Δ′λ) − (∂+α+Δλ)g(∂)`.
pub fn coboundary(quotient: &(MPoly, MPoly), sub: &(MPoly, MPoly), g: &MPoly) -> MPoly {
    let d = MPoly::var(Var::D);
    let l = MPoly::var(Var::Lambda);
    let shifted = g.substitute(Var::D, &(&d + &l));
    let sub_act = &(&d + &sub.1) + &(&sub.0 * &l);
    let quo_act = &(&d + &quotient.1) + &(&quotient.0 * &l);
    &(&shifted * &sub_act) - &(&quo_act * g)
}

fn to_vector(p: &MPoly, index: &BTreeMap<(u32, u32), usize>) -> Result<Vec<Rat>> {
    let mut v = vec![Rat::zero(); index.len()];
    for (m, c) in p.terms() {
        let key = (m.exponent(Var::D), m.exponent(Var::Lambda));
        if m.degree() != key.0 + key.1 {
            return Err(Error::Mismatch(format!("unexpected variable in {p}")));
        }
        let k = index
            .get(&key)
            .ok_or_else(|| Error::Mismatch(format!("monomial of {p} outside the degree bound")))?;
        v[*k] = c.clone();
    }
    Ok(v)
}

fn from_vector(v: &[Rat], monos: &[(u32, u32)]) -> MPoly {
    let mut p = MPoly::zero();
    for (c, (a, b)) in v.iter().zip(monos) {
        if !c.is_zero() {
            p += mono(*a, *b).scale(c);
        }
    }
    p
}

/// Cocycles modulo coboundaries for the given problem.
pub fn extension_dim(p: &ExtensionProblem) -> Result<ExtensionResult> {
    let bound = p.bound()?;
    let fast = if p.alpha != p.alpha_sub {
        Some(FastPath::SpectralMismatch)
    } else if p.shift().is_none() {
        Some(FastPath::NonIntegerShift)
    } else {
        None
    };
    if let Some(f) = fast {
        return Ok(ExtensionResult {
            dim: 0,
            cocycles: Vec::new(),
            bound,
            cocycle_dim: 0,
            coboundary_rank: 0,
            fast_path: Some(f),
        });
    }
    extension_dim_full(p)
}

/// The same computation without the fast paths.
pub fn extension_dim_full(p: &ExtensionProblem) -> Result<ExtensionResult> {
    let bound = p.bound()?;
    let (q, s) = (p.quotient(), p.sub());
    let monos = unknowns(bound);
    let index: BTreeMap<(u32, u32), usize> = monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let columns = monos
        .par_iter()
        .map(|(a, b)| cocycle_residual(&q, &s, &mono(*a, *b)))
        .collect::<Result<Vec<_>>>()?;
    let mut rows: BTreeMap<Monomial, Vec<Rat>> = BTreeMap::new();
    for (j, col) in columns.iter().enumerate() {
        for (m, c) in col.terms() {
            rows.entry(m.clone()).or_insert_with(|| vec![Rat::zero(); monos.len()])[j] = c.clone();
        }
    }
    let system: Matrix = rows.into_values().collect();
    let cocycles = if system.is_empty() {
        identity(monos.len())
    } else {
        linalg::nullspace(&system, monos.len())
    };
    let cobs: Vec<Vec<Rat>> = (0..bound)
        .map(|k| to_vector(&coboundary(&q, &s, &MPoly::var(Var::D).pow(k)), &index))
        .collect::<Result<_>>()?;
    for b in &cobs {
        if !system.is_empty() && linalg::mat_vec(&system, b).iter().any(|x| !x.is_zero()) {
            return Err(Error::Mismatch("a coboundary failed the cocycle equations".into()));
        }
    }
    let coboundary_rank = linalg::rank(&cobs);
    let mut span = cobs.clone();
    let mut reps = Vec::new();
    let mut r = coboundary_rank;
    for z in &cocycles {
        span.push(z.clone());
        let r2 = linalg::rank(&span);
        if r2 > r {
            r = r2;
            reps.push(from_vector(z, &monos));
        } else {
            span.pop();
        }
    }
    Ok(ExtensionResult {
        dim: reps.len(),
        cocycles: reps,
        bound,
        cocycle_dim: cocycles.len(),
        coboundary_rank,
        fast_path: None,
    })
}

fn identity(n: usize) -> Vec<Vec<Rat>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
        .collect()
}

/// Installs `f` and runs the module check on the resulting extension.
pub fn cocycle_installs(p: &ExtensionProblem, f: &MPoly) -> Result<bool> {
    let e = extension_module(vir(), p.quotient(), p.sub(), f)?;
    Ok(check_module(&e, &[Gen::Basis(0)])?.passed())
}

/// Checks that `m′ ↦ m′`, `m ↦ m + g(∂)m′` intertwines the extensions with
/// terms `f + coboundary(g)` and `f`.
pub fn coboundary_is_isomorphism(p: &ExtensionProblem, f: &MPoly, g: &MPoly) -> Result<bool> {
    let (q, s) = (p.quotient(), p.sub());
    let shifted = f + &coboundary(&q, &s, g);
    let src = extension_module(vir(), q.clone(), s.clone(), &shifted)?;
    let dst = extension_module(vir(), q, s, f)?;
    let phi = |v: &ModElt| {
        let top = v.coeff(&1);
        let mut out = ModElt::term(1, top.clone());
        out.add_term(0, &v.coeff(&0) + &(&top * g));
        out
    };
    let l = ConfElt::basis(Gen::Basis(0));
    for i in 0..2 {
        let u = ModElt::basis(i);
        let lhs = phi(&src.lambda_action(&l, &u, Var::Lambda)?);
        let rhs = dst.lambda_action(&l, &phi(&u), Var::Lambda)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Where nontrivial extensions occur in one homogeneous degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Locus {
    Never,
    Always,
    /// Exactly at the roots of this monic square-free polynomial.
    Roots(UPoly),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionCondition {
    pub shift: i64,
    pub bound: u32,
    pub per_degree: Vec<(u32, Locus)>,
    /// Monic square-free condition on `Δ`; the zero polynomial means
    /// nontrivial for every `Δ`, the constant 1 means never.
    pub condition: UPoly,
}

type PolyMatrix = Vec<Vec<UPoly>>;

fn eval_matrix(m: &PolyMatrix, x: &Rat) -> Matrix {
    m.iter().map(|r| r.iter().map(|p| p.eval(x)).collect()).collect()
}

fn small_random(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    (0..rows)
        .map(|_| (0..cols).map(|_| int(rng.gen_range(-6..=6))).collect())
        .collect()
}

/// `det(P M(Δ) Q)` recovered by exact interpolation, with extra points
/// confirming the degree.
fn projected_det(m: &PolyMatrix, p: &Matrix, q: &Matrix, r: usize, deg: usize) -> Result<UPoly> {
    let mut guess = deg;
    while guess <= 4 * deg + 8 {
        let xs: Vec<Rat> = (0..guess + 3).map(|t| rat(2 * t as i64 + 1, 3)).collect();
        let vals: Vec<(Rat, Rat)> = xs
            .par_iter()
            .map(|x| {
                let mx = eval_matrix(m, x);
                let cols = mx.first().map_or(0, |row| row.len());
                let pm = linalg::mat_mul(p, &mx, cols);
                let pmq = linalg::mat_mul(&pm, q, r);
                (x.clone(), linalg::det(&pmq))
            })
            .collect();
        let poly = UPoly::interpolate(&vals[..guess + 1]);
        if vals[guess + 1..].iter().all(|(x, y)| poly.eval(x) == *y) {
            return Ok(poly);
        }
        guess *= 2;
    }
    Err(Error::Mismatch("determinant interpolation did not stabilize".into()))
}

/// Splits `g` (square-free) into factors on which the rank of `m` over
/// `ℚ[Δ]/(factor)` is constant.
fn split_rank(m: &PolyMatrix, g: &UPoly, out: &mut Vec<(UPoly, usize)>) {
    if g.degree().is_none_or(|d| d == 0) {
        return;
    }
    let mut a: PolyMatrix = m.iter().map(|r| r.iter().map(|x| x.rem(g)).collect()).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let mut pivot = None;
        for r in rank..rows {
            if a[r][c].is_zero() {
                continue;
            }
            let h = a[r][c].gcd(g);
            if h.degree() == Some(0) {
                pivot = Some(r);
                break;
            }
            let cof = g.div_rem(&h).0;
            split_rank(m, &h, out);
            split_rank(m, &cof, out);
            return;
        }
        let Some(pr) = pivot else { continue };
        a.swap(rank, pr);
        let inv = a[rank][c].inverse_mod(g).expect("unit pivot");
        for r in rank + 1..rows {
            if a[r][c].is_zero() {
                continue;
            }
            let factor = a[r][c].mul(&inv).rem(g);
            for k in c..cols {
                let t = a[r][k].sub(&factor.mul(&a[rank][k])).rem(g);
                a[r][k] = t;
            }
        }
        rank += 1;
    }
    out.push((g.monic(), rank));
}

fn lcm(a: &UPoly, b: &UPoly) -> UPoly {
    let g = a.gcd(b);
    a.mul(b).div_rem(&g).0.monic()
}

fn degree_locus(s: i64, d: u32, seed: u64) -> Result<Locus> {
    let delta = MPoly::var(Var::Delta);
    let quotient = (delta.clone(), MPoly::zero());
    let sub = (&delta - &MPoly::int(s), MPoly::zero());
    let monos: Vec<(u32, u32)> = (0..=d).rev().map(|a| (a, d - a)).collect();
    let n = monos.len();
    let columns = monos
        .par_iter()
        .map(|(a, b)| cocycle_residual(&quotient, &sub, &mono(*a, *b)))
        .collect::<Result<Vec<_>>>()?;
    let mut rows: BTreeMap<Monomial, Vec<UPoly>> = BTreeMap::new();
    for (j, col) in columns.iter().enumerate() {
        for (m, c) in col.terms() {
            let (e, rest) = m.split(Var::Delta);
            let row = rows.entry(rest).or_insert_with(|| vec![UPoly::zero(); n]);
            let mut coeffs = vec![Rat::zero(); e as usize + 1];
            coeffs[e as usize] = c.clone();
            row[j] = row[j].add(&UPoly::from_coeffs(coeffs));
        }
    }
    let m: PolyMatrix = rows.into_values().collect();
    let bvec: Vec<UPoly> = if d == 0 {
        vec![UPoly::zero(); n]
    } else {
        let b = coboundary(&quotient, &sub, &MPoly::var(Var::D).pow(d - 1));
        let index: BTreeMap<(u32, u32), usize> = monos.iter().enumerate().map(|(i, x)| (*x, i)).collect();
        let mut v = vec![UPoly::zero(); n];
        for (mm, c) in b.terms() {
            let (e, rest) = mm.split(Var::Delta);
            let key = (rest.exponent(Var::D), rest.exponent(Var::Lambda));
            let k = index[&key];
            let mut coeffs = vec![Rat::zero(); e as usize + 1];
            coeffs[e as usize] = c.clone();
            v[k] = v[k].add(&UPoly::from_coeffs(coeffs));
        }
        v
    };
    let samples = [rat(1000, 7), rat(-3001, 17), rat(77, 13)];
    let r = samples
        .iter()
        .map(|x| linalg::rank(&eval_matrix(&m, x)))
        .max()
        .unwrap_or(0);
    let kernel = n - r;
    let b_generic = usize::from(bvec.iter().any(|x| !x.is_zero()));
    if kernel > b_generic {
        return Ok(Locus::Always);
    }
    if kernel < b_generic {
        return Err(Error::Mismatch(format!("coboundary outside the cocycle space in degree {d}")));
    }
    let mut locus = UPoly::constant(Rat::one());
    if r > 0 {
        let maxdeg = m.iter().flatten().filter_map(|p| p.degree()).max().unwrap_or(0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (d as u64) << 8);
        let mut cand = UPoly::zero();
        for _ in 0..3 {
            let p = small_random(&mut rng, r, m.len());
            let q = small_random(&mut rng, n, r);
            let det = projected_det(&m, &p, &q, r, r * maxdeg)?;
            cand = cand.gcd(&det);
        }
        if cand.is_zero() {
            return Err(Error::Mismatch("all projected minors vanished".into()));
        }
        let cand = cand.squarefree();
        let mut parts = Vec::new();
        split_rank(&m, &cand, &mut parts);
        for (f, rk) in parts {
            if rk < r {
                locus = lcm(&locus, &f);
            }
        }
    }
    if b_generic == 1 {
        let gb = bvec.iter().fold(UPoly::zero(), |acc, x| acc.gcd(x));
        locus = lcm(&locus, &gb.squarefree());
    }
    Ok(if locus.degree() == Some(0) {
        Locus::Never
    } else {
        Locus::Roots(locus.monic())
    })
}

/// For `Δ′ = Δ − s`, `α = α′ = 0` and `Δ` symbolic: the values of `Δ` at
/// which nontrivial extensions exist, per homogeneous degree of `f` up to
/// the bound and combined.
pub fn extension_condition(s: i64, degree: Option<u32>) -> Result<ExtensionCondition> {
    let min = (s.max(0) as u32) + 2;
    let bound = degree.unwrap_or(min + 1);
    if bound < min || bound > MAX_DEGREE {
        return Err(Error::DegreeBound {
            requested: bound,
            reason: format!("expected a bound in {min}..={MAX_DEGREE}"),
        });
    }
    let per_degree = (0..=bound)
        .into_par_iter()
        .map(|d| Ok((d, degree_locus(s, d, 0x5eed_u64)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut condition = UPoly::constant(Rat::one());
    let mut always = false;
    for (_, l) in &per_degree {
        match l {
            Locus::Always => always = true,
            Locus::Roots(p) => condition = lcm(&condition, p),
            Locus::Never => {}
        }
    }
    if always {
        condition = UPoly::zero();
    }
    Ok(ExtensionCondition {
        shift: s,
        bound,
        per_degree,
        condition,
    })
}

/// `2Δ² − 14Δ + 15`, whose roots `(7 ± √19)/2` are the irrational weights.
pub fn irrational_pair_factor() -> UPoly {
    UPoly::from_coeffs(vec![int(15), int(-14), int(2)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listed_pairs_are_nontrivial() {
        for (d, ds) in [(1, 1), (3, 1), (1, 0)] {
            let r = extension_dim(&ExtensionProblem::ints(d, ds, 0, 0)).unwrap();
            assert!(r.dim >= 1, "({d},{ds}) gave {r:?}");
            for f in &r.cocycles {
                assert!(cocycle_installs(&ExtensionProblem::ints(d, ds, 0, 0), f).unwrap());
            }
        }
    }

    #[test]
    fn generic_shift_one_is_trivial() {
        let r = extension_dim(&ExtensionProblem::ints(2, 1, 0, 0)).unwrap();
        assert_eq!(r.dim, 0);
    }

    #[test]
    fn spectral_mismatch() {
        let p = ExtensionProblem::ints(1, 1, 0, 1);
        assert_eq!(extension_dim(&p).unwrap().fast_path, Some(FastPath::SpectralMismatch));
        assert_eq!(extension_dim_full(&p).unwrap().dim, 0);
    }

    #[test]
    fn degree_bounds() {
        let p = ExtensionProblem::ints(3, 1, 0, 0);
        assert!(matches!(p.clone().with_degree(3).bound(), Err(Error::DegreeBound { .. })));
        assert!(matches!(p.with_degree(99).bound(), Err(Error::DegreeBound { .. })));
    }

    #[test]
    fn coboundary_change_of_lift() {
        let p = ExtensionProblem::ints(3, 1, 0, 0);
        let f = extension_dim(&p).unwrap().cocycles[0].clone();
        let g = &MPoly::var(Var::D).pow(2) + &MPoly::int(3);
        assert!(coboundary_is_isomorphism(&p, &f, &g).unwrap());
    }

    #[test]
    fn shift_one_condition() {
        let c = extension_condition(1, None).unwrap();
        assert_eq!(c.condition, UPoly::linear(&int(1)));
    }
}
