//! Cochains of a Lie conformal algebra with coefficients in a module, the
//! differential, the `∂`-action, and the weight-graded basic and reduced
//! complexes.
//!
//! A cochain is stored on non-decreasing tuples of generator indices; its
//! value there is an element of `ℂ[λ_1, …, λ_n] ⊗ M`. Values on other
//! orderings follow from skew-symmetry under simultaneous permutation of
//! the arguments and the `λ_k`.
//!
//! Grading: a monomial `λ^e ∂^l v` on `(a_1, …, a_n)` has weight
//! `|e| + l + w(v) − Σ (w(a_i) − 1)`, which `d` and `∂` preserve.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::check::{check_weights, CheckReport};
use crate::algebra::{ConfElt, ConformalAlgebra, Gen, Kind};
use crate::arith::rat::int;
use crate::arith::{MPoly, Monomial, Rat, Var};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::module::{ConfModule, ModElt};

/// Default cap on the dimension of a single graded component.
pub const DEFAULT_LIMIT: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComplexKind {
    Basic,
    Reduced,
}

impl fmt::Display for ComplexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComplexKind::Basic => "basic",
            ComplexKind::Reduced => "reduced",
        })
    }
}

fn slot(k: usize) -> Var {
    Var::L(k as u8 + 1)
}

/// One basis cochain of a graded component: the antisymmetrization, over
/// permutations within blocks of equal generators, of `λ^exps ∂^dpow v`
/// on `tuple`. Exponents strictly decrease inside each block.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BasisElt {
    pub tuple: Vec<usize>,
    pub exps: Vec<u32>,
    pub vector: usize,
    pub dpow: u32,
}

impl BasisElt {
    fn monomial(&self) -> Monomial {
        let mut pairs: Vec<(Var, u32)> = self.exps.iter().enumerate().map(|(k, e)| (slot(k), *e)).collect();
        pairs.push((Var::D, self.dpow));
        Monomial::from_pairs(pairs)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cochain {
    pub n: usize,
    /// Sorted generator-index tuple to value.
    pub values: BTreeMap<Vec<usize>, ModElt>,
}

impl Cochain {
    pub fn zero(n: usize) -> Self {
        Cochain {
            n,
            values: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(|v| v.is_zero())
    }

    pub fn add_value(&mut self, tuple: Vec<usize>, v: ModElt) {
        let slot = self.values.entry(tuple.clone()).or_default();
        *slot = &*slot + &v;
        if slot.is_zero() {
            self.values.remove(&tuple);
        }
    }

    pub fn scale(&self, c: &Rat) -> Cochain {
        Cochain {
            n: self.n,
            values: self
                .values
                .iter()
                .map(|(t, v)| (t.clone(), v.scale_rat(c)))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        let mut out = self.clone();
        for (t, v) in &other.values {
            out.add_value(t.clone(), v.clone());
        }
        out
    }
}

fn sort_perm(t: &[usize]) -> (Vec<usize>, i64) {
    let mut idx: Vec<usize> = (0..t.len()).collect();
    idx.sort_by_key(|&k| t[k]);
    let mut seen = vec![false; t.len()];
    let mut sign = 1;
    for s in 0..t.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut k = s;
        while !seen[k] {
            seen[k] = true;
            k = idx[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    (idx, sign)
}

/// Permutations of `0..k` with signs.
fn perms(k: usize) -> Vec<(Vec<usize>, i64)> {
    if k == 0 {
        return vec![(Vec::new(), 1)];
    }
    let mut out = Vec::new();
    for (p, s) in perms(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            let moved = (p.len() - pos) as i64;
            out.push((q, if moved % 2 == 0 { s } else { -s }));
        }
    }
    out
}

/// One graded row of a cohomology report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimRow {
    pub n: usize,
    pub weight: Rat,
    pub dim_c: usize,
    /// Rank of the incoming differential (on the quotient, for the reduced
    /// complex).
    pub rank_in: usize,
    pub rank_out: usize,
    pub dim_h: usize,
}

/// The graded cochain complex of a finite, even, weight-graded Lie
/// conformal algebra with coefficients in a module.
#[derive(Clone, Debug)]
pub struct Complex {
    module: ConfModule,
    gens: Vec<Gen>,
    index: BTreeMap<Gen, usize>,
    shifts: Vec<Rat>,
    limit: usize,
    shuffle: Option<u64>,
}

impl Complex {
    pub fn new(module: ConfModule) -> Result<Self> {
        let alg = module.algebra();
        if alg.kind() != Kind::Lie {
            return Err(Error::Unsupported("cohomology of associative conformal algebras".into()));
        }
        if alg.is_super() {
            return Err(Error::Unsupported("cohomology of superalgebras".into()));
        }
        if !alg.is_finite() {
            return Err(Error::Unsupported("cohomology of rule-generated algebras".into()));
        }
        let gens = alg.generators(0);
        let w = check_weights(alg, &gens)?;
        if !w.passed() {
            return Err(Error::Grading(format!(
                "table is not weight-homogeneous at {:?}",
                w.failures[0].tuple
            )));
        }
        let shifts = gens
            .iter()
            .map(|g| Ok(alg.weight(g)? - int(1)))
            .collect::<Result<Vec<_>>>()?;
        let index = gens.iter().enumerate().map(|(i, g)| (*g, i)).collect();
        let c = Complex {
            module,
            gens,
            index,
            shifts,
            limit: DEFAULT_LIMIT,
            shuffle: None,
        };
        c.check_module_grading()?;
        Ok(c)
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    /// Enumerates every component basis in a seeded random order.
    pub fn with_shuffle(mut self, seed: u64) -> Self {
        self.shuffle = Some(seed);
        self
    }

    pub fn module(&self) -> &ConfModule {
        &self.module
    }

    pub fn algebra(&self) -> &ConformalAlgebra {
        self.module.algebra()
    }

    pub fn generators(&self) -> &[Gen] {
        &self.gens
    }

    fn check_module_grading(&self) -> Result<()> {
        let m = &self.module;
        for (gi, g) in self.gens.iter().enumerate() {
            for i in 0..m.dim() {
                let v = m.action_entry(g, i)?;
                let target = &self.shifts[gi] + &m.basis()[i].weight;
                for (k, p) in v.terms() {
                    for (mono, _) in p.terms() {
                        let deg = mono.exponent(Var::D) + mono.exponent(Var::Lambda);
                        if mono.degree() != deg || int(deg as i64) + &m.basis()[*k].weight != target {
                            return Err(Error::Grading(format!(
                                "action of {} on {} is not weight-homogeneous",
                                self.algebra().gen_name(g),
                                m.basis_name(i)
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn tuples(&self, n: usize) -> Vec<Vec<usize>> {
        fn rec(start: usize, k: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..r {
                cur.push(i);
                rec(i, k, r, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(0, n, self.gens.len(), &mut Vec::new(), &mut out);
        out
    }

    /// Weight of the constant cochain on `tuple` with value `u_vector`.
    fn offset(&self, tuple: &[usize], vector: usize) -> Rat {
        tuple
            .iter()
            .fold(self.module.basis()[vector].weight.clone(), |acc, g| acc - &self.shifts[*g])
    }

    /// Weights `≤ wmax` at which degree-`n` cochains exist.
    pub fn weights(&self, n: usize, wmax: &Rat) -> BTreeSet<Rat> {
        let mut out = BTreeSet::new();
        for t in self.tuples(n) {
            for v in 0..self.module.dim() {
                let mut w = self.offset(&t, v);
                while &w <= wmax {
                    out.insert(w.clone());
                    w += Rat::one();
                }
            }
        }
        out
    }

    /// Basis of the degree-`n`, weight-`w` component.
    pub fn basis(&self, n: usize, w: &Rat) -> Result<Vec<BasisElt>> {
        let mut out = Vec::new();
        for t in self.tuples(n) {
            for v in 0..self.module.dim() {
                let budget = w - self.offset(&t, v);
                if budget < Rat::zero() || !budget.is_integer() {
                    continue;
                }
                let budget: u32 = budget
                    .to_integer()
                    .try_into()
                    .map_err(|_| Error::Grading("weight out of range".into()))?;
                let dmax = if self.module.basis()[v].d_zero { 0 } else { budget };
                for dpow in 0..=dmax {
                    for exps in block_exponents(&t, budget - dpow) {
                        out.push(BasisElt {
                            tuple: t.clone(),
                            exps,
                            vector: v,
                            dpow,
                        });
                        if out.len() > self.limit {
                            return Err(Error::ComponentTooLarge {
                                n,
                                weight: w.to_string(),
                                size: out.len(),
                                limit: self.limit,
                            });
                        }
                    }
                }
            }
        }
        if let Some(seed) = self.shuffle {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n as u64) << 32));
            out.shuffle(&mut rng);
        }
        Ok(out)
    }

    /// The basis element as a cochain.
    pub fn cochain_of(&self, b: &BasisElt) -> Cochain {
        let n = b.tuple.len();
        let mut blocks: Vec<(usize, usize)> = Vec::new();
        let mut s = 0;
        while s < n {
            let mut e = s + 1;
            while e < n && b.tuple[e] == b.tuple[s] {
                e += 1;
            }
            blocks.push((s, e));
            s = e;
        }
        let mut terms: Vec<(Vec<u32>, i64)> = vec![(b.exps.clone(), 1)];
        for (s, e) in blocks {
            let mut next = Vec::new();
            for (ex, sg) in &terms {
                for (p, ps) in perms(e - s) {
                    let mut q = ex.clone();
                    for (k, pk) in p.iter().enumerate() {
                        q[s + k] = ex[s + pk];
                    }
                    next.push((q, sg * ps));
                }
            }
            terms = next;
        }
        let mut poly = MPoly::zero();
        for (ex, sg) in terms {
            let mut pairs: Vec<(Var, u32)> = ex.iter().enumerate().map(|(k, e)| (slot(k), *e)).collect();
            pairs.push((Var::D, b.dpow));
            poly.add_term(Monomial::from_pairs(pairs), int(sg));
        }
        let mut c = Cochain::zero(n);
        c.add_value(b.tuple.clone(), ModElt::term(b.vector, poly));
        c
    }

    pub fn combination(&self, basis: &[BasisElt], coeffs: &[Rat]) -> Cochain {
        let mut out = Cochain::zero(basis.first().map_or(0, |b| b.tuple.len()));
        for (b, c) in basis.iter().zip(coeffs) {
            if !c.is_zero() {
                out = out.add(&self.cochain_of(b).scale(c));
            }
        }
        out
    }

    /// Coordinates of a cochain in a component basis.
    pub fn coordinates(&self, c: &Cochain, basis: &[BasisElt]) -> Vec<Rat> {
        basis
            .iter()
            .map(|b| {
                c.values
                    .get(&b.tuple)
                    .map(|v| v.coeff(&b.vector).coeff(&b.monomial()))
                    .unwrap_or_else(Rat::zero)
            })
            .collect()
    }

    /// `γ_{y_1,…,y_n}(a_{t_1}, …, a_{t_n})` for an arbitrary tuple.
    pub fn eval(&self, c: &Cochain, tuple: &[usize], vars: &[MPoly]) -> ModElt {
        let (pi, sign) = sort_perm(tuple);
        let sorted: Vec<usize> = pi.iter().map(|&k| tuple[k]).collect();
        let Some(v) = c.values.get(&sorted) else {
            return ModElt::zero();
        };
        let images: Vec<(Var, MPoly)> = pi.iter().enumerate().map(|(k, &p)| (slot(k), vars[p].clone())).collect();
        v.substitute_many(&images).scale_rat(&int(sign))
    }

    fn gen_index(&self, g: &Gen) -> Result<usize> {
        self.index
            .get(g)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(self.algebra().gen_name(g)))
    }

    fn d_on_tuple(&self, c: &Cochain, t: &[usize]) -> Result<ModElt> {
        let m = t.len();
        let vars: Vec<MPoly> = (0..m).map(|k| MPoly::var(slot(k))).collect();
        let mut out = ModElt::zero();
        for i in 0..m {
            let rest: Vec<usize> = (0..m).filter(|&k| k != i).map(|k| t[k]).collect();
            let rest_vars: Vec<MPoly> = (0..m).filter(|&k| k != i).map(|k| vars[k].clone()).collect();
            let v = self.eval(c, &rest, &rest_vars);
            if v.is_zero() {
                continue;
            }
            let act = self.module.action_at(&ConfElt::basis(self.gens[t[i]]), &v, &vars[i])?;
            // −(−1)^{i+1} with 1-based positions
            let s = if i % 2 == 0 { 1 } else { -1 };
            out = &out + &act.scale_rat(&int(s));
        }
        let alg = self.algebra();
        for i in 0..m {
            for j in i + 1..m {
                let br = alg.product_at(
                    &ConfElt::basis(self.gens[t[i]]),
                    &ConfElt::basis(self.gens[t[j]]),
                    &vars[i],
                )?;
                if br.is_zero() {
                    continue;
                }
                let lij = &vars[i] + &vars[j];
                let rest: Vec<usize> = (0..m).filter(|&k| k != i && k != j).collect();
                let s = if (i + j) % 2 == 0 { 1 } else { -1 };
                for (g, p) in br.terms() {
                    let coeff = p.substitute(Var::D, &-lij.clone());
                    let mut tuple = vec![self.gen_index(g)?];
                    tuple.extend(rest.iter().map(|&k| t[k]));
                    let mut vs = vec![lij.clone()];
                    vs.extend(rest.iter().map(|&k| vars[k].clone()));
                    let val = self.eval(c, &tuple, &vs);
                    out = &out + &val.scale(&coeff.scale(&int(s)));
                }
            }
        }
        Ok(out)
    }

    /// The differential, evaluated on every sorted `(n+1)`-tuple.
    pub fn differential(&self, c: &Cochain) -> Result<Cochain> {
        let mut out = Cochain::zero(c.n + 1);
        for t in self.tuples(c.n + 1) {
            let v = self.d_on_tuple(c, &t)?;
            if !v.is_zero() {
                out.values.insert(t, v);
            }
        }
        Ok(out)
    }

    /// `(∂γ)_{λ_1…λ_n} = (∂ + λ_1 + … + λ_n) γ_{λ_1…λ_n}`.
    pub fn partial(&self, c: &Cochain) -> Cochain {
        let sum = (0..c.n).fold(MPoly::zero(), |acc, k| acc + MPoly::var(slot(k)));
        let d = MPoly::var(Var::D);
        let mut out = Cochain::zero(c.n);
        for (t, v) in &c.values {
            let mut w = v.scale(&sum);
            for (i, p) in v.terms() {
                if !self.module.basis()[*i].d_zero {
                    w.add_term(*i, &d * p);
                }
            }
            out.add_value(t.clone(), w);
        }
        out
    }

    /// Images of the basis of `(n, w)` under `d`, as coordinate vectors in
    /// the basis of `(n+1, w)`.
    pub fn d_images(&self, n: usize, w: &Rat) -> Result<(Vec<BasisElt>, Vec<BasisElt>, Vec<Vec<Rat>>)> {
        let src = self.basis(n, w)?;
        let dst = self.basis(n + 1, w)?;
        let images = src
            .par_iter()
            .map(|b| {
                let dc = self.differential(&self.cochain_of(b))?;
                if !self.homogeneous(&dc, w) {
                    return Err(Error::Grading(format!("d leaves weight {w} in degree {n}")));
                }
                Ok(self.coordinates(&dc, &dst))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((src, dst, images))
    }

    /// Whether every monomial of `c` has weight `w`.
    pub fn homogeneous(&self, c: &Cochain, w: &Rat) -> bool {
        c.values.iter().all(|(t, v)| {
            v.terms().all(|(i, p)| {
                let base = self.offset(t, *i);
                p.terms().all(|(m, _)| {
                    let lam: u32 = (0..t.len()).map(|k| m.exponent(slot(k))).sum();
                    lam + m.exponent(Var::D) == m.degree() && &base + int(m.degree() as i64) == *w
                })
            })
        })
    }

    /// Images of the basis of `(n, w−1)` under `∂`, in the basis of `(n, w)`.
    pub fn partial_images(&self, n: usize, w: &Rat) -> Result<Vec<Vec<Rat>>> {
        let src = self.basis(n, &(w - Rat::one()))?;
        let dst = self.basis(n, w)?;
        Ok(src
            .par_iter()
            .map(|b| self.coordinates(&self.partial(&self.cochain_of(b)), &dst))
            .collect())
    }

    /// `d ∘ d = 0` on the component `(n, w)`, as a matrix identity.
    pub fn d_squared_vanishes(&self, n: usize, w: &Rat) -> Result<bool> {
        let (_, mid, first) = self.d_images(n, w)?;
        let (_, _, second) = self.d_images(n + 1, w)?;
        if mid.is_empty() {
            return Ok(true);
        }
        let Some(width) = second.first().map(Vec::len) else {
            return Ok(true);
        };
        let d2: Matrix = linalg::transpose(&second, width);
        Ok(first.iter().all(|v| linalg::mat_vec(&d2, v).iter().all(Zero::is_zero)))
    }

    /// `∂ d = d ∂` from `(n, w−1)` to `(n+1, w)`.
    pub fn partial_commutes(&self, n: usize, w: &Rat) -> Result<bool> {
        let src = self.basis(n, &(w - Rat::one()))?;
        for b in &src {
            let c = self.cochain_of(b);
            let lhs = self.partial(&self.differential(&c)?);
            let rhs = self.differential(&self.partial(&c))?;
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn component(&self, n: usize, w: &Rat, kind: ComplexKind) -> Result<ComponentData> {
        let (src, _, out_images) = self.d_images(n, w)?;
        let in_images = if n == 0 { Vec::new() } else { self.d_images(n - 1, w)?.2 };
        let (here, next) = match kind {
            ComplexKind::Basic => (Vec::new(), Vec::new()),
            ComplexKind::Reduced => (self.partial_images(n, w)?, self.partial_images(n + 1, w)?),
        };
        Ok(ComponentData {
            dim: src.len(),
            basis: src,
            out_images,
            in_images,
            here,
            next,
        })
    }

    /// Dimensions of cohomology per `(n, w)` for `n ≤ nmax`, `w ≤ wmax`.
    pub fn dims(&self, nmax: usize, wmax: &Rat, kind: ComplexKind) -> Result<Vec<DimRow>> {
        let mut jobs = Vec::new();
        for n in 0..=nmax {
            for w in self.weights(n, wmax) {
                jobs.push((n, w));
            }
        }
        jobs.par_iter()
            .map(|(n, w)| {
                let c = self.component(*n, w, kind)?;
                Ok(c.row(*n, w.clone()))
            })
            .collect()
    }

    /// Cocycles spanning a complement of the coboundaries (and, for the
    /// reduced complex, of the `∂`-image) in `(n, w)`.
    pub fn representatives(&self, n: usize, w: &Rat, kind: ComplexKind) -> Result<Vec<Cochain>> {
        let c = self.component(n, w, kind)?;
        let dim = c.dim;
        if dim == 0 {
            return Ok(Vec::new());
        }
        let cocycles: Vec<Vec<Rat>> = if c.out_images.first().map_or(0, |v| v.len()) == 0 {
            identity_rows(dim)
        } else {
            // columns: source basis, then the ∂-image generators of n+1
            let rows = c.out_images[0].len();
            let mut cols: Vec<Vec<Rat>> = c.out_images.clone();
            cols.extend(c.next.iter().map(|v| v.iter().map(|x| -x.clone()).collect()));
            let m = linalg::transpose(&cols, rows);
            linalg::nullspace(&m, cols.len())
                .into_iter()
                .map(|v| v[..dim].to_vec())
                .collect()
        };
        let mut span: Vec<Vec<Rat>> = c.in_images.clone();
        span.extend(c.here.iter().cloned());
        let mut r = linalg::rank(&span);
        let mut out = Vec::new();
        for z in cocycles {
            span.push(z.clone());
            let r2 = linalg::rank(&span);
            if r2 > r {
                r = r2;
                out.push(self.combination(&c.basis, &z));
            } else {
                span.pop();
            }
        }
        Ok(out)
    }

    /// Whether `d x` vanishes (basic) or lies in `∂C` (reduced).
    pub fn is_cocycle(&self, x: &Cochain, w: &Rat, kind: ComplexKind) -> Result<bool> {
        let dx = self.differential(x)?;
        if dx.is_zero() {
            return Ok(true);
        }
        if kind == ComplexKind::Basic {
            return Ok(false);
        }
        let n = x.n + 1;
        let dst = self.basis(n, w)?;
        let v = self.coordinates(&dx, &dst);
        if self.combination(&dst, &v) != dx {
            return Err(Error::Grading("differential left the component".into()));
        }
        let mut span = self.partial_images(n, w)?;
        let r = linalg::rank(&span);
        span.push(v);
        Ok(linalg::rank(&span) == r)
    }

    /// Whether `x` lies in `im d + ∂C` (reduced) or `im d` (basic) inside
    /// `(n, w)`.
    pub fn is_trivial(&self, x: &Cochain, n: usize, w: &Rat, kind: ComplexKind) -> Result<bool> {
        let c = self.component(n, w, kind)?;
        let v = self.coordinates(x, &c.basis);
        if self.combination(&c.basis, &v) != *x {
            return Err(Error::Grading("cochain is not in the requested component".into()));
        }
        let mut span: Vec<Vec<Rat>> = c.in_images.clone();
        span.extend(c.here.iter().cloned());
        let r = linalg::rank(&span);
        span.push(v);
        Ok(linalg::rank(&span) == r)
    }

    /// The central term `α_{ab}(λ) = γ_{λ,−λ}(a, b)` of a 2-cochain with
    /// values in the trivial module.
    pub fn central_terms(&self, c: &Cochain) -> Result<BTreeMap<(Gen, Gen), MPoly>> {
        if c.n != 2 {
            return Err(Error::Mismatch("central terms need a 2-cochain".into()));
        }
        let l = MPoly::var(Var::Lambda);
        let mut out = BTreeMap::new();
        for (i, a) in self.gens.iter().enumerate() {
            for (j, b) in self.gens.iter().enumerate() {
                let v = self.eval(c, &[i, j], &[l.clone(), -l.clone()]);
                let p = v.coeff(&0);
                if !p.is_zero() {
                    out.insert((*a, *b), p);
                }
            }
        }
        Ok(out)
    }

    /// Installs a 2-cocycle as a central term and re-runs the axiom check
    /// on the extended algebra.
    pub fn central_extension_check(&self, c: &Cochain) -> Result<(ConformalAlgebra, CheckReport)> {
        let terms = self.central_terms(c)?;
        let ext = self.algebra().with_central_term("C", &terms)?;
        let report = crate::algebra::check::check_axioms(&ext, &ext.generators(0))?;
        Ok((ext, report))
    }

    /// The 2-cochain `γ_{λ_1,λ_2}(a_i, a_j) = form[i][j] · p(λ_1, λ_2)` with
    /// values in the first basis vector. On a repeated argument `p` must be
    /// odd under swapping the slots.
    pub fn bilinear(&self, form: &Matrix, p: &MPoly) -> Result<Cochain> {
        let swapped = p.substitute_many(&[
            (Var::L(1), MPoly::var(Var::L(2))),
            (Var::L(2), MPoly::var(Var::L(1))),
        ]);
        let mut c = Cochain::zero(2);
        for t in self.tuples(2) {
            let f = &form[t[0]][t[1]];
            if f.is_zero() {
                continue;
            }
            if t[0] == t[1] && swapped != -p.clone() {
                return Err(Error::Mismatch("value on a repeated argument is not skew".into()));
            }
            c.add_value(t, ModElt::term(0, p.scale(f)));
        }
        Ok(c)
    }

    pub fn render(&self, c: &Cochain) -> String {
        if c.is_zero() {
            return "0".into();
        }
        let alg = self.algebra();
        c.values
            .iter()
            .map(|(t, v)| {
                let args: Vec<String> = t.iter().map(|g| alg.gen_name(&self.gens[*g])).collect();
                format!("({}) -> {}", args.join(", "), self.module.render(v))
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

struct ComponentData {
    dim: usize,
    basis: Vec<BasisElt>,
    out_images: Vec<Vec<Rat>>,
    in_images: Vec<Vec<Rat>>,
    /// `∂`-image inside this component.
    here: Vec<Vec<Rat>>,
    /// `∂`-image inside the next degree.
    next: Vec<Vec<Rat>>,
}

impl ComponentData {
    fn row(&self, n: usize, weight: Rat) -> DimRow {
        let rank_here = linalg::rank(&self.here);
        let rank_next = linalg::rank(&self.next);
        let cat = |a: &[Vec<Rat>], b: &[Vec<Rat>]| {
            let mut v = a.to_vec();
            v.extend(b.iter().cloned());
            linalg::rank(&v)
        };
        // rank of d modulo the ∂-images on both sides
        let rank_out = cat(&self.out_images, &self.next) - rank_next;
        let rank_in = cat(&self.in_images, &self.here) - rank_here;
        let dim_c = self.dim;
        DimRow {
            n,
            weight,
            dim_c,
            rank_in,
            rank_out,
            dim_h: dim_c - rank_here - rank_out - rank_in,
        }
    }
}

fn identity_rows(n: usize) -> Vec<Vec<Rat>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
        .collect()
}

/// Exponent vectors of total `degree`, strictly decreasing inside blocks of
/// equal entries of `tuple`.
fn block_exponents(tuple: &[usize], degree: u32) -> Vec<Vec<u32>> {
    fn rec(tuple: &[usize], k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == tuple.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let cap = if k > 0 && tuple[k] == tuple[k - 1] {
            match cur[k - 1].checked_sub(1) {
                Some(c) => c.min(left),
                None => return,
            }
        } else {
            left
        };
        for e in (0..=cap).rev() {
            cur.push(e);
            rec(tuple, k + 1, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(tuple, 0, degree, &mut Vec::new(), &mut out);
    out
}

/// Sums `dim_h` over weights for each degree.
pub fn totals(rows: &[DimRow], nmax: usize) -> Vec<usize> {
    (0..=nmax)
        .map(|n| rows.iter().filter(|r| r.n == n).map(|r| r.dim_h).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::builders::{current, virasoro, FinAlgebra};
    use crate::module::trivial;

    fn vir_complex() -> Complex {
        Complex::new(trivial(Arc::new(virasoro()))).unwrap()
    }

    #[test]
    fn sign_of_sorting() {
        assert_eq!(sort_perm(&[0, 1, 2]).1, 1);
        assert_eq!(sort_perm(&[1, 0, 2]).1, -1);
        assert_eq!(sort_perm(&[2, 0, 1]).1, 1);
        assert_eq!(perms(3).len(), 6);
    }

    #[test]
    fn differential_of_lambda() {
        let cx = vir_complex();
        let mut g = Cochain::zero(1);
        g.add_value(vec![0], ModElt::term(0, MPoly::var(Var::L(1))));
        let dg = cx.differential(&g).unwrap();
        let (l1, l2) = (MPoly::var(Var::L(1)), MPoly::var(Var::L(2)));
        let want = -(&(&l1 - &l2) * &(&l1 + &l2));
        assert_eq!(dg.values[&vec![0, 0]], ModElt::term(0, want));
    }

    #[test]
    fn zero_cochain_maps_to_zero() {
        let cx = vir_complex();
        let mut g = Cochain::zero(0);
        g.add_value(vec![], ModElt::basis(0));
        assert!(cx.differential(&g).unwrap().is_zero());
        assert!(cx.partial(&g).is_zero());
    }

    fn cur_complex() -> Complex {
        Complex::new(trivial(Arc::new(current("cur", &FinAlgebra::sl2()).unwrap()))).unwrap()
    }

    #[test]
    fn virasoro_dims() {
        let cx = vir_complex();
        let basic = cx.dims(4, &int(6), ComplexKind::Basic).unwrap();
        assert_eq!(totals(&basic, 4), vec![1, 0, 0, 1, 0]);
        let reduced = cx.dims(4, &int(6), ComplexKind::Reduced).unwrap();
        assert_eq!(totals(&reduced, 4), vec![1, 0, 1, 1, 0]);
        let h2: Vec<_> = reduced.iter().filter(|r| r.n == 2 && r.dim_h > 0).collect();
        assert_eq!(h2.len(), 1);
        assert_eq!(h2[0].weight, int(1));
    }

    #[test]
    fn virasoro_cocycle_is_lambda_cubed() {
        let cx = vir_complex();
        let reps = cx.representatives(2, &int(1), ComplexKind::Reduced).unwrap();
        assert_eq!(reps.len(), 1);
        let l1 = MPoly::var(Var::L(1));
        let l2 = MPoly::var(Var::L(2));
        assert!(cx.bilinear(&vec![vec![int(1)]], &l1.pow(3)).is_err());
        let cube = cx.bilinear(&vec![vec![int(1)]], &(&l1.pow(3) - &l2.pow(3))).unwrap();
        assert!(!cx.is_trivial(&cube, 2, &int(1), ComplexKind::Reduced).unwrap());
        assert!(cx.is_cocycle(&cube, &int(1), ComplexKind::Reduced).unwrap());
        // λ_1 − λ_2 is a coboundary
        let lin = cx.bilinear(&vec![vec![int(1)]], &(&l1 - &l2)).unwrap();
        assert!(cx.is_trivial(&lin, 2, &int(-1), ComplexKind::Reduced).unwrap());
        let (ext, report) = cx.central_extension_check(&cube).unwrap();
        assert!(report.passed());
        assert_eq!(ext.rank(), Some(2));
    }

    #[test]
    fn current_sl2_killing_class() {
        let cx = cur_complex();
        let reduced = cx.dims(3, &int(3), ComplexKind::Reduced).unwrap();
        assert_eq!(totals(&reduced, 3), vec![1, 0, 1, 1]);
        let half = Rat::new(1.into(), 2.into());
        let p = (&MPoly::var(Var::L(1)) - &MPoly::var(Var::L(2))).scale(&half);
        let kappa = cx.bilinear(&FinAlgebra::sl2().killing_form(), &p).unwrap();
        assert!(!cx.is_cocycle(&kappa, &int(1), ComplexKind::Basic).unwrap());
        assert!(cx.is_cocycle(&kappa, &int(1), ComplexKind::Reduced).unwrap());
        assert!(!cx.is_trivial(&kappa, 2, &int(1), ComplexKind::Reduced).unwrap());
        let rep = &cx.representatives(2, &int(1), ComplexKind::Reduced).unwrap()[0];
        let (_, report) = cx.central_extension_check(rep).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn d_squared_and_partial() {
        let cx = cur_complex();
        for w in 0..3 {
            assert!(cx.d_squared_vanishes(1, &int(w)).unwrap());
            assert!(cx.partial_commutes(1, &int(w)).unwrap());
        }
        let vx = vir_complex();
        for w in -1..4 {
            assert!(vx.d_squared_vanishes(2, &int(w)).unwrap());
            assert!(vx.partial_commutes(2, &int(w)).unwrap());
        }
    }

    #[test]
    fn shuffled_bases_agree() {
        let cx = vir_complex();
        let a = cx.dims(3, &int(4), ComplexKind::Reduced).unwrap();
        let b = cx.clone().with_shuffle(7).dims(3, &int(4), ComplexKind::Reduced).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn size_guard() {
        let cx = vir_complex().with_limit(5);
        assert!(matches!(
            cx.dims(3, &int(8), ComplexKind::Basic),
            Err(Error::ComponentTooLarge { .. })
        ));
    }

    #[test]
    fn rejects_associative_and_super() {
        let gc = ConformalAlgebra::gc(1, Kind::Associative).unwrap();
        assert!(Complex::new(trivial(Arc::new(gc))).is_err());
        let k1 = crate::algebra::superconf::k_n(1).unwrap();
        assert!(matches!(Complex::new(trivial(Arc::new(k1))), Err(Error::Unsupported(_))));
    }

    #[test]
    fn block_exponents_are_strict() {
        let e = block_exponents(&[0, 0, 1], 3);
        assert!(e.iter().all(|x| x[0] > x[1]));
        assert!(e.contains(&vec![2, 1, 0]));
        assert!(e.contains(&vec![1, 0, 2]));
    }
}

