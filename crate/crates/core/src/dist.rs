//! Truncated formal distributions.
//!
//! A one-variable distribution `c(w) = Σ c_n w^{−n−1}` keeps the modes
//! with `n` in a window `[lo, hi]`; a two- or three-variable one keeps a
//! square (cube) `[−K, K]^k` of modes. An entry is `None` when it would
//! depend on modes outside the inputs' windows, so results carry their own
//! validity and never silently read a truncated zero.
//!
//! Each operation declares a guard band `g`: the number of boundary modes
//! it may invalidate. Comparisons are asserted only on the interior
//! `[−K+g, K−g]`, and fail with [`Error::WindowExhausted`] if some interior
//! entry is unknown.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_traits::{One, Zero};
use rand::Rng;

use rayon::prelude::*;

use crate::algebra::{ConfElt, ConformalAlgebra, Gen};
use crate::arith::rat::{binomial, factorial, int};
use crate::arith::{Rat, Var};
use crate::error::{Error, Result};
use crate::modes::{elt_mode, mode_product, Mode, ModeElt};

/// Values a distribution can take.
pub trait Coeff: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn scale(&self, c: &Rat) -> Self;
}

impl Coeff for Rat {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn scale(&self, c: &Rat) -> Self {
        self * c
    }
}

impl Coeff for ModeElt {
    fn zero() -> Self {
        ModeElt::zero()
    }
    fn is_zero(&self) -> bool {
        ModeElt::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        ModeElt::add(self, o)
    }
    fn scale(&self, c: &Rat) -> Self {
        ModeElt::scale(self, c)
    }
}

/// Guard band of multiplication by `(z−w)^N`, a `z^i w^k` monomial factor
/// or a Laurent polynomial of degree `N`: `N`.
pub fn guard_mul(degree: u32) -> i64 {
    degree as i64
}

/// Guard band of `∂_z`, `∂_w` and of one application of `∂` to `c(w)`.
pub const GUARD_DERIVATIVE: i64 = 1;

/// Guard band of the `j`-th OPE coefficient: `j`.
pub fn guard_ope(j: u32) -> i64 {
    j as i64
}

/// `Σ_{k ≤ terms} coeff_k · ∂^k` leaves `terms` boundary modes unknown.
pub fn guard_fourier(order: u32) -> i64 {
    2 * order as i64
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dist1<V: Coeff> {
    lo: i64,
    vals: Vec<Option<V>>,
}

impl<V: Coeff> Dist1<V> {
    pub fn from_fn(lo: i64, hi: i64, f: impl Fn(i64) -> Option<V>) -> Self {
        Dist1 {
            lo,
            vals: (lo..=hi).map(f).collect(),
        }
    }

    /// A fully known distribution on `[−k, k]` with zero modes.
    pub fn zero(k: i64) -> Self {
        Dist1::from_fn(-k, k, |_| Some(V::zero()))
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.vals.len() as i64 - 1
    }

    /// The mode `c_n`, or `None` when unknown or outside the window.
    pub fn get(&self, n: i64) -> Option<&V> {
        if n < self.lo {
            return None;
        }
        self.vals.get((n - self.lo) as usize)?.as_ref()
    }

    pub fn map(&self, f: impl Fn(i64, &V) -> V) -> Self {
        Dist1::from_fn(self.lo, self.hi(), |n| self.get(n).map(|v| f(n, v)))
    }

    pub fn add(&self, o: &Dist1<V>) -> Self {
        let lo = self.lo.max(o.lo);
        let hi = self.hi().min(o.hi());
        Dist1::from_fn(lo, hi, |n| Some(self.get(n)?.add(o.get(n)?)))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        self.map(|_, v| v.scale(c))
    }

    /// `∂_w c(w)`: `(∂c)_n = −n c_{n−1}`.
    pub fn derivative(&self) -> Self {
        Dist1::from_fn(self.lo, self.hi(), |n| Some(self.get(n - 1)?.scale(&int(-n))))
    }

    /// `∂^{(j)} c = ∂^j c / j!`.
    pub fn divided_derivative(&self, j: u32) -> Self {
        let mut out = self.clone();
        for _ in 0..j {
            out = out.derivative();
        }
        out.scale(&(Rat::one() / factorial(j)))
    }

    /// `w^p c(w)`: `(w^p c)_n = c_{n+p}`.
    pub fn mul_power(&self, p: i64) -> Self {
        Dist1::from_fn(self.lo, self.hi(), |n| self.get(n + p).cloned())
    }

    /// Whether both agree on `[−k+g, k−g]`.
    pub fn agrees(&self, o: &Dist1<V>, k: i64, g: i64) -> Result<bool> {
        for n in (-k + g)..=(k - g) {
            match (self.get(n), o.get(n)) {
                (Some(a), Some(b)) => {
                    if a != b {
                        return Ok(false);
                    }
                }
                _ => return Err(Error::WindowExhausted(format!("mode {n} is unknown"))),
            }
        }
        Ok(true)
    }

    pub fn vanishes(&self, k: i64, g: i64) -> Result<bool> {
        self.agrees(&Dist1::from_fn(-k, k, |_| Some(V::zero())), k, g)
    }
}

/// `a(z, w) = Σ a_{m,n} z^{−m−1} w^{−n−1}` on `[−K, K]²`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dist2<V: Coeff> {
    k: i64,
    vals: Vec<Option<V>>,
}

impl<V: Coeff> Dist2<V> {
    pub fn from_fn(k: i64, f: impl Fn(i64, i64) -> Option<V>) -> Self {
        let mut vals = Vec::with_capacity(((2 * k + 1) * (2 * k + 1)) as usize);
        for m in -k..=k {
            for n in -k..=k {
                vals.push(f(m, n));
            }
        }
        Dist2 { k, vals }
    }

    pub fn window(&self) -> i64 {
        self.k
    }

    pub fn get(&self, m: i64, n: i64) -> Option<&V> {
        let k = self.k;
        if m.abs() > k || n.abs() > k {
            return None;
        }
        self.vals[((m + k) * (2 * k + 1) + n + k) as usize].as_ref()
    }

    pub fn add(&self, o: &Dist2<V>) -> Self {
        Dist2::from_fn(self.k.min(o.k), |m, n| Some(self.get(m, n)?.add(o.get(m, n)?)))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Dist2::from_fn(self.k, |m, n| Some(self.get(m, n)?.scale(c)))
    }

    /// `a(w, z)`.
    pub fn swap(&self) -> Self {
        Dist2::from_fn(self.k, |m, n| self.get(n, m).cloned())
    }

    /// `∂_z a`. Guard band [`GUARD_DERIVATIVE`].
    pub fn d_z(&self) -> Self {
        Dist2::from_fn(self.k, |m, n| Some(self.get(m - 1, n)?.scale(&int(-m))))
    }

    /// `∂_w a`. Guard band [`GUARD_DERIVATIVE`].
    pub fn d_w(&self) -> Self {
        Dist2::from_fn(self.k, |m, n| Some(self.get(m, n - 1)?.scale(&int(-n))))
    }

    /// `p(z, w) · a` for a Laurent polynomial given as `(i, k) ↦ coeff` of
    /// `z^i w^k`. Guard band `max |i| + |k|`.
    pub fn mul_poly(&self, p: &BTreeMap<(i64, i64), Rat>) -> Self {
        Dist2::from_fn(self.k, |m, n| {
            let mut acc = V::zero();
            for ((i, k), c) in p {
                acc = acc.add(&self.get(m + i, n + k)?.scale(c));
            }
            Some(acc)
        })
    }

    /// `(z − w)^N a`. Guard band `N`.
    pub fn mul_z_minus_w(&self, power: u32) -> Self {
        self.mul_poly(&z_minus_w(power))
    }

    /// `D_a f (w) = Res_z a(z, w) f(z)` for a Laurent polynomial
    /// `f = Σ f_i z^i`. Exact wherever the needed `z`-modes lie in the window.
    pub fn residue_pair(&self, f: &BTreeMap<i64, Rat>) -> Dist1<V> {
        let k = self.k;
        Dist1::from_fn(-k, k, |n| {
            let mut acc = V::zero();
            for (i, c) in f {
                acc = acc.add(&self.get(*i, n)?.scale(c));
            }
            Some(acc)
        })
    }

    /// `c^j(w) = Res_z a(z, w)(z − w)^j`. Guard band [`guard_ope`].
    pub fn ope_coefficient(&self, j: u32) -> Dist1<V> {
        let k = self.k;
        Dist1::from_fn(-k, k, |n| {
            let mut acc = V::zero();
            for i in 0..=j {
                let c = binomial(j as i64, i) * if (j - i).is_multiple_of(2) { int(1) } else { int(-1) };
                acc = acc.add(&self.get(i as i64, n + (j - i) as i64)?.scale(&c));
            }
            Some(acc)
        })
    }

    /// Whether `a` vanishes on `[−K+g, K−g]²`.
    pub fn vanishes(&self, g: i64) -> Result<bool> {
        let k = self.k;
        for m in (-k + g)..=(k - g) {
            for n in (-k + g)..=(k - g) {
                match self.get(m, n) {
                    Some(v) if v.is_zero() => {}
                    Some(_) => return Ok(false),
                    None => return Err(Error::WindowExhausted(format!("entry ({m}, {n}) is unknown"))),
                }
            }
        }
        Ok(true)
    }

    /// Agreement on the entries of `[−K+g, K−g]²` known on both sides. A
    /// product `c(w)·kernel` built from a windowed `c` is known only on a
    /// diagonal band, so this is the comparison used for reconstructions.
    /// Fails if no entry is known.
    pub fn agrees_where_known(&self, o: &Dist2<V>, g: i64) -> Result<bool> {
        let k = self.k.min(o.k);
        let mut seen = 0usize;
        for m in (-k + g)..=(k - g) {
            for n in (-k + g)..=(k - g) {
                if let (Some(a), Some(b)) = (self.get(m, n), o.get(m, n)) {
                    if a != b {
                        return Ok(false);
                    }
                    seen += 1;
                }
            }
        }
        if seen == 0 {
            return Err(Error::WindowExhausted("no entry is known on both sides".into()));
        }
        Ok(true)
    }

    pub fn agrees(&self, o: &Dist2<V>, g: i64) -> Result<bool> {
        self.add(&o.scale(&-Rat::one())).vanishes(g)
    }

    /// Smallest `g` such that every entry of `[−K+g, K−g]²` is known: the
    /// guard band already spent by the operations that produced `a`.
    pub fn known_guard(&self) -> i64 {
        let k = self.k;
        (0..=k)
            .find(|&g| {
                ((-k + g)..=(k - g)).all(|m| ((-k + g)..=(k - g)).all(|n| self.get(m, n).is_some()))
            })
            .unwrap_or(k + 1)
    }

    /// Smallest `N` with `(z − w)^N a = 0` on the interior, testing
    /// `N ≤ K/2`. Guard band `N` on top of [`Dist2::known_guard`].
    pub fn locality_order(&self) -> Result<u32> {
        let g0 = self.known_guard();
        for n in 0..=(self.k / 2) as u32 {
            let g = g0 + guard_mul(n);
            if g > self.k {
                break;
            }
            if self.mul_z_minus_w(n).vanishes(g)? {
                return Ok(n);
            }
        }
        Err(Error::NotLocal)
    }

    /// `[(j, c^j)]` for `j` below the locality order.
    pub fn ope_coefficients(&self) -> Result<Vec<(u32, Dist1<V>)>> {
        let n = self.locality_order()?;
        Ok((0..n).map(|j| (j, self.ope_coefficient(j))).collect())
    }

    /// `Φ^λ_{z,w} a = Σ_j λ^j c^j / j!`, as the list of `λ^j` coefficients.
    pub fn fourier(&self) -> Result<LambdaPoly<V>> {
        let n = self.locality_order()?;
        Ok(LambdaPoly(
            (0..n)
                .map(|j| self.ope_coefficient(j).scale(&(Rat::one() / factorial(j))))
                .collect(),
        ))
    }
}

/// `(z − w)^N` as a Laurent polynomial.
pub fn z_minus_w(power: u32) -> BTreeMap<(i64, i64), Rat> {
    (0..=power)
        .map(|i| {
            let s = if (power - i).is_multiple_of(2) { int(1) } else { int(-1) };
            ((i as i64, (power - i) as i64), binomial(power as i64, i) * s)
        })
        .collect()
}

/// The constant distribution `c(w) = v`: the single mode `c_{−1} = v`.
pub fn constant<V: Coeff>(lo: i64, hi: i64, v: &V) -> Dist1<V> {
    Dist1::from_fn(lo, hi, |n| Some(if n == -1 { v.clone() } else { V::zero() }))
}

/// `δ(z − w)`: `a_{m,n} = 1` iff `m + n = −1`. Guard band 0.
pub fn delta<V: Coeff>(k: i64, one: &V) -> Dist2<V> {
    kernel(k, 0, &constant(-2 * k - 1, 2 * k + 1, one))
}

/// The field `x(w) = Σ x_n w^{−n−1}` of an element, modes in `[−k, k]`.
pub fn field(alg: &ConformalAlgebra, x: &ConfElt, k: i64) -> Result<Dist1<ModeElt>> {
    let vals = (-k..=k).map(|n| elt_mode(alg, x, n)).collect::<Result<Vec<_>>>()?;
    Ok(Dist1::from_fn(-k, k, |n| Some(vals[(n + k) as usize].clone())))
}

/// `a(z) b(w)` from the mode products `a_m b_n`, `m, n ∈ [−k, k]`.
pub fn product_distribution(alg: &ConformalAlgebra, a: &Gen, b: &Gen, k: i64) -> Result<Dist2<ModeElt>> {
    let side = (2 * k + 1) as usize;
    let vals = (-k..=k)
        .flat_map(|m| (-k..=k).map(move |n| (m, n)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|(m, n)| mode_product(alg, &Mode::new(*a, *m), &Mode::new(*b, *n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Dist2::from_fn(k, |m, n| {
        Some(vals[(m + k) as usize * side + (n + k) as usize].clone())
    }))
}

/// Whether the OPE of `a(z) b(w)`, assembled from modes on `[−k, k]`,
/// reproduces the `j`-th products of the table.
pub fn oracle_check(alg: &ConformalAlgebra, a: &Gen, b: &Gen, k: i64) -> Result<bool> {
    let dist = product_distribution(alg, a, b, k)?;
    let ope = dist.ope_coefficients()?;
    let (x, y) = (ConfElt::basis(*a), ConfElt::basis(*b));
    let top = alg.lambda_product(&x, &y, Var::Lambda)?.degree_in(Var::Lambda);
    let terms = if alg.lambda_product(&x, &y, Var::Lambda)?.is_zero() { 0 } else { top + 1 };
    if ope.len() as u32 != terms {
        return Ok(false);
    }
    let g = guard_ope(terms);
    for (j, c) in &ope {
        let want = field(alg, &alg.nth_product(&x, &y, *j)?, k)?;
        if !c.agrees(&want, k, g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `c(w) ∂_w^{(j)} δ(z − w)`, with entries `C(m, j) c_{m+n−j}`.
pub fn kernel<V: Coeff>(k: i64, j: u32, c: &Dist1<V>) -> Dist2<V> {
    Dist2::from_fn(k, |m, n| Some(c.get(m + n - j as i64)?.scale(&binomial(m, j))))
}

/// `Σ_j c^j(w) ∂_w^{(j)} δ(z − w)`.
pub fn reconstruct<V: Coeff>(k: i64, coeffs: &[(u32, Dist1<V>)]) -> Dist2<V> {
    let mut out = Dist2::from_fn(k, |_, _| Some(V::zero()));
    for (j, c) in coeffs {
        out = out.add(&kernel(k, *j, c));
    }
    out
}

/// A polynomial in `λ` with distribution coefficients, `λ^j` at index `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaPoly<V: Coeff>(pub Vec<Dist1<V>>);

impl<V: Coeff> LambdaPoly<V> {
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// Agreement coefficient by coefficient on `[−k+g, k−g]`; a missing
    /// coefficient counts as zero.
    pub fn agrees(&self, o: &LambdaPoly<V>, k: i64, g: i64) -> Result<bool> {
        for j in 0..self.0.len().max(o.0.len()) {
            let ok = match (self.0.get(j), o.0.get(j)) {
                (Some(a), Some(b)) => a.agrees(b, k, g)?,
                (Some(a), None) | (None, Some(a)) => a.vanishes(k, g)?,
                (None, None) => true,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `λ · p`.
    pub fn times_lambda(&self) -> Self {
        let mut v = vec![];
        if let Some(first) = self.0.first() {
            v.push(first.map(|_, _| V::zero()));
        }
        v.extend(self.0.iter().cloned());
        LambdaPoly(v)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        LambdaPoly(self.0.iter().map(|d| d.scale(c)).collect())
    }

    pub fn add(&self, o: &LambdaPoly<V>) -> Self {
        let n = self.0.len().max(o.0.len());
        LambdaPoly(
            (0..n)
                .map(|j| match (self.0.get(j), o.0.get(j)) {
                    (Some(a), Some(b)) => a.add(b),
                    (Some(a), None) | (None, Some(a)) => a.clone(),
                    (None, None) => unreachable!(),
                })
                .collect(),
        )
    }

    /// `∂_w` applied to every coefficient.
    pub fn derivative(&self) -> Self {
        LambdaPoly(self.0.iter().map(Dist1::derivative).collect())
    }
}

/// `Φ^{−λ−∂_w}` applied to the OPE coefficients `c^n`:
/// `Σ_n (−λ − ∂_w)^n c^n / n!`, with `∂_w` acting on `c^n`.
pub fn fourier_reflected<V: Coeff>(coeffs: &[(u32, Dist1<V>)]) -> LambdaPoly<V> {
    let top = coeffs.iter().map(|(j, _)| *j as usize + 1).max().unwrap_or(0);
    let mut out: Vec<Option<Dist1<V>>> = vec![None; top];
    for (n, c) in coeffs {
        let n = *n;
        for kk in 0..=n {
            // λ^kk ∂^{n−kk} with coefficient (−1)^n C(n, kk) / n!
            let s = if n % 2 == 0 { int(1) } else { int(-1) };
            let coef = s * binomial(n as i64, kk) / factorial(n);
            let mut d = c.clone();
            for _ in 0..n - kk {
                d = d.derivative();
            }
            let term = d.scale(&coef);
            let slot = &mut out[kk as usize];
            *slot = Some(match slot.take() {
                Some(prev) => prev.add(&term),
                None => term,
            });
        }
    }
    LambdaPoly(out.into_iter().map(|d| d.expect("every degree below top is reached")).collect())
}

/// The three transformation laws of OPE coefficients under `∂_z`, `∂_w`
/// and the swap `z ↔ w`, checked on `[−K+g, K−g]` with `g` the largest
/// guard band involved.
pub fn remark_laws<V: Coeff>(a: &Dist2<V>) -> Result<[bool; 3]> {
    let k = a.window();
    let n = a.locality_order()?;
    let c: Vec<Dist1<V>> = (0..=n + 1).map(|j| a.ope_coefficient(j)).collect();
    let cz = a.d_z();
    let cw = a.d_w();
    let swapped = a.swap();
    let g = guard_fourier(n + 2) + 2;
    let mut laws = [true; 3];
    for j in 0..=n + 1 {
        // c_z^j = −j c^{j−1}
        let lhs = cz.ope_coefficient(j);
        let rhs = if j == 0 {
            Dist1::zero(k)
        } else {
            c[j as usize - 1].scale(&int(-(j as i64)))
        };
        laws[0] &= lhs.agrees(&rhs, k, g)?;
        // c_w^j = ∂c^j + j c^{j−1}
        let lhs = cw.ope_coefficient(j);
        let mut rhs = c[j as usize].derivative();
        if j > 0 {
            rhs = rhs.add(&c[j as usize - 1].scale(&int(j as i64)));
        }
        laws[1] &= lhs.agrees(&rhs, k, g)?;
        // c̃^j = Σ_i (−1)^{i+j} ∂^{(i)} c^{i+j}
        let lhs = swapped.ope_coefficient(j);
        let mut rhs = Dist1::zero(k);
        for i in 0..=(n + 1).saturating_sub(j) {
            let s = if (i + j) % 2 == 0 { int(1) } else { int(-1) };
            rhs = rhs.add(&c[(i + j) as usize].divided_derivative(i).scale(&s));
        }
        laws[2] &= lhs.agrees(&rhs, k, g)?;
    }
    Ok(laws)
}

/// Checks identities `Φ(∂_z a) = −λΦ(a)`, `[∂_w, Φ] a = −λΦ(a)` and
/// `Φ(a(w, z)) = Φ^{−λ−∂_w}(a(z, w))`.
pub fn fourier_identities<V: Coeff>(a: &Dist2<V>) -> Result<[bool; 3]> {
    let k = a.window();
    let n = a.locality_order()?;
    let g = guard_fourier(n + 1) + 2;
    let phi = a.fourier()?;
    let minus_lambda = phi.times_lambda().scale(&-Rat::one());
    let dz = a.d_z().fourier()?;
    let first = dz.agrees(&minus_lambda, k, g)?;
    // ∂_w Φ(a) − Φ(∂_w a)
    let comm = phi.derivative().add(&a.d_w().fourier()?.scale(&-Rat::one()));
    let second = comm.agrees(&minus_lambda, k, g)?;
    let lhs = a.swap().fourier()?;
    let rhs = fourier_reflected(&a.ope_coefficients()?);
    let third = lhs.agrees(&rhs, k, g)?;
    Ok([first, second, third])
}

/// A random local distribution `Σ_{j<order} c^j(w) ∂_w^{(j)} δ(z − w)`
/// with small integer modes, known on the whole window.
pub fn random_local<R: Rng>(rng: &mut R, k: i64, order: u32) -> (Dist2<Rat>, Vec<(u32, Dist1<Rat>)>) {
    let coeffs: Vec<(u32, Dist1<Rat>)> = (0..order)
        .map(|j| {
            let wide = 2 * k + order as i64 + 2;
            let vals: Vec<i64> = (-wide..=wide).map(|_| rng.gen_range(-5..=5)).collect();
            (j, Dist1::from_fn(-wide, wide, |n| Some(int(vals[(n + wide) as usize]))))
        })
        .collect();
    (reconstruct(k, &coeffs), coeffs)
}

/// A three-variable distribution `a(z, w, x)` on `[−K, K]³`, entries
/// `a_{m,n,p}` of `z^{−m−1} w^{−n−1} x^{−p−1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dist3 {
    k: i64,
    vals: Vec<Option<Rat>>,
}

/// One kernel term of a three-variable distribution.
#[derive(Clone, Debug)]
pub enum Kernel3 {
    /// `c(w) ∂_w^{(i)}δ(z − w) ∂_w^{(j)}δ(x − w)`
    AtW { i: u32, j: u32, c: Dist1<Rat> },
    /// `c(w) ∂_x^{(i)}δ(z − x) ∂_w^{(j)}δ(x − w)`
    Chain { i: u32, j: u32, c: Dist1<Rat> },
}

impl Dist3 {
    pub fn from_kernels(k: i64, terms: &[Kernel3]) -> Self {
        let side = 2 * k + 1;
        let mut vals = Vec::with_capacity((side * side * side) as usize);
        for m in -k..=k {
            for n in -k..=k {
                for p in -k..=k {
                    let mut acc = Some(<Rat as Zero>::zero());
                    for t in terms {
                        let v = match t {
                            Kernel3::AtW { i, j, c } => {
                                // w-exponent: m−i + p−j − q − 1 = −n − 1
                                c.get(m + n + p - *i as i64 - *j as i64)
                                    .map(|c| c * binomial(m, *i) * binomial(p, *j))
                            }
                            Kernel3::Chain { i, j, c } => {
                                // ∂_x^{(i)}δ(z−x) = Σ_m C(m,i) z^{−m−1} x^{m−i};
                                // x-exponents add: (m−i) + (−r−1) = −p−1 with
                                // δ(x−w) part Σ_r C(r, j) x^{−r−1} w^{r−j}
                                let r = m + p - *i as i64;
                                c.get(r - *j as i64 + n).map(|c| c * binomial(m, *i) * binomial(r, *j))
                            }
                        };
                        acc = match (acc, v) {
                            (Some(a), Some(b)) => Some(a + b),
                            _ => None,
                        };
                    }
                    vals.push(acc);
                }
            }
        }
        Dist3 { k, vals }
    }

    pub fn window(&self) -> i64 {
        self.k
    }

    pub fn get(&self, m: i64, n: i64, p: i64) -> Option<&Rat> {
        let k = self.k;
        if m.abs() > k || n.abs() > k || p.abs() > k {
            return None;
        }
        let side = 2 * k + 1;
        self.vals[(((m + k) * side + n + k) * side + p + k) as usize].as_ref()
    }

    /// `Res_x (x − w)^j a(z, w, x)` as a distribution in `(z, w)`.
    fn res_x_at_w(&self, j: u32) -> Dist2<Rat> {
        Dist2::from_fn(self.k, |m, n| {
            let mut acc = <Rat as Zero>::zero();
            for i in 0..=j {
                let s = if (j - i).is_multiple_of(2) { int(1) } else { int(-1) };
                acc += self.get(m, n + (j - i) as i64, i as i64)? * binomial(j as i64, i) * s;
            }
            Some(acc)
        })
    }

    /// `Res_z (z − x)^i a(z, w, x)` as a distribution in `(x, w)`, with `x`
    /// in the first slot.
    fn res_z_at_x(&self, i: u32) -> Dist2<Rat> {
        Dist2::from_fn(self.k, |p, n| {
            let mut acc = <Rat as Zero>::zero();
            for t in 0..=i {
                let s = if (i - t).is_multiple_of(2) { int(1) } else { int(-1) };
                acc += self.get(t as i64, n, p + (i - t) as i64)? * binomial(i as i64, t) * s;
            }
            Some(acc)
        })
    }

    /// `Φ^λ_{z,w} Φ^μ_{x,w} a`, as `(deg λ, deg μ) ↦ coefficient`, for
    /// degrees below `order` in each variable.
    pub fn fourier_lhs(&self, order: u32) -> BTreeMap<(u32, u32), Dist1<Rat>> {
        let mut out = BTreeMap::new();
        for b in 0..order {
            let inner = self.res_x_at_w(b).scale(&(Rat::one() / factorial(b)));
            for a in 0..order {
                let c = inner.ope_coefficient(a).scale(&(Rat::one() / factorial(a)));
                out.insert((a, b), c);
            }
        }
        out
    }

    /// `Φ^{λ+μ}_{x,w} Φ^λ_{z,x} a`, expanded in `λ^a μ^b`.
    pub fn fourier_rhs(&self, order: u32) -> BTreeMap<(u32, u32), Dist1<Rat>> {
        let mut out: BTreeMap<(u32, u32), Dist1<Rat>> = BTreeMap::new();
        for i in 0..order {
            let inner = self.res_z_at_x(i).scale(&(Rat::one() / factorial(i)));
            for t in 0..2 * order {
                let c = inner.ope_coefficient(t).scale(&(Rat::one() / factorial(t)));
                // λ^i (λ+μ)^t = Σ_s C(t, s) λ^{i+s} μ^{t−s}
                for s in 0..=t {
                    let key = (i + s, t - s);
                    if key.0 >= order || key.1 >= order {
                        continue;
                    }
                    let term = c.scale(&binomial(t as i64, s));
                    let e = out.remove(&key);
                    out.insert(key, e.map_or(term.clone(), |p| p.add(&term)));
                }
            }
        }
        out
    }
}

/// `Φ^λ_{z,w}Φ^μ_{x,w} a = Φ^{λ+μ}_{x,w}Φ^λ_{z,x} a` on `[−K+g, K−g]`
/// for every `λ^a μ^b` with `a, b < order`. Guard band `4·order`.
pub fn composition_law(a: &Dist3, order: u32) -> Result<bool> {
    let k = a.window();
    let g = 4 * order as i64;
    let lhs = a.fourier_lhs(order);
    let rhs = a.fourier_rhs(order);
    for (key, l) in &lhs {
        let ok = match rhs.get(key) {
            Some(r) => l.agrees(r, k, g)?,
            None => l.vanishes(k, g)?,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A random three-variable distribution built from kernel terms with
/// `δ`-derivative orders below `order`.
pub fn random_dist3<R: Rng>(rng: &mut R, k: i64, order: u32, terms: usize) -> Dist3 {
    let wide = 3 * k + 2 * order as i64 + 2;
    let kernels: Vec<Kernel3> = (0..terms)
        .map(|t| {
            let vals: Vec<i64> = (-wide..=wide).map(|_| rng.gen_range(-4..=4)).collect();
            let c = Dist1::from_fn(-wide, wide, |n| Some(int(vals[(n + wide) as usize])));
            let (i, j) = (rng.gen_range(0..order), rng.gen_range(0..order));
            if t % 2 == 0 {
                Kernel3::AtW { i, j, c }
            } else {
                Kernel3::Chain { i, j, c }
            }
        })
        .collect();
    Dist3::from_kernels(k, &kernels)
}

/// One row of the randomized identity suite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawRow {
    pub sample: usize,
    pub law: &'static str,
    pub order: u32,
    pub window: i64,
    pub guard: i64,
    pub passed: bool,
}

/// Runs the OPE reconstruction, the Fourier identities, the three
/// coefficient laws and the composition law on `samples` random local
/// distributions in window `k`, seeded by `seed`.
pub fn law_suite(seed: u64, samples: usize, k: i64) -> Result<Vec<LawRow>> {
    use rand::SeedableRng;
    let mut rows = Vec::new();
    for sample in 0..samples {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(sample as u64));
        let order = 1 + (sample % 3) as u32;
        let (a, coeffs) = random_local(&mut rng, k, order);
        let mut push = |law: &'static str, guard: i64, passed: bool| {
            rows.push(LawRow {
                sample,
                law,
                order,
                window: k,
                guard,
                passed,
            })
        };
        let got = a.ope_coefficients()?;
        let mut ok = got.len() == coeffs.len();
        for ((j, c), (_, want)) in got.iter().zip(&coeffs) {
            ok &= c.agrees(want, k, guard_ope(*j))?;
        }
        ok &= reconstruct(k, &got).agrees_where_known(&a, order as i64)?;
        push("ope", order as i64, ok);
        let f = fourier_identities(&a)?;
        let g = guard_fourier(order + 1) + 2;
        push("fourier-dz", g, f[0]);
        push("fourier-dw", g, f[1]);
        push("fourier-swap", g, f[2]);
        let r = remark_laws(&a)?;
        let g = guard_fourier(order + 2) + 2;
        push("coeff-dz", g, r[0]);
        push("coeff-dw", g, r[1]);
        push("coeff-swap", g, r[2]);
        let b = random_dist3(&mut rng, k, 2, 3);
        push("composition", 8, composition_law(&b, 2)?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    const K: i64 = 16;

    fn one() -> Rat {
        Rat::one()
    }

    #[test]
    fn delta_reproduces() {
        let d = delta(K, &one());
        for p in -4..=4 {
            let f = BTreeMap::from([(p, one())]);
            let got = d.residue_pair(&f);
            let want = Dist1::from_fn(-K, K, |n| Some(if n == -p - 1 { one() } else { <Rat as Zero>::zero() }));
            assert!(got.agrees(&want, K, 0).unwrap());
        }
    }

    #[test]
    fn delta_locality() {
        let d = delta(K, &one());
        assert!(d.mul_z_minus_w(1).vanishes(guard_mul(1)).unwrap());
        assert!(!d.vanishes(0).unwrap());
        assert!(d.d_w().mul_z_minus_w(2).vanishes(guard_mul(2) + GUARD_DERIVATIVE).unwrap());
        assert_eq!(d.locality_order().unwrap(), 1);
        for j in 0..4 {
            let dj = kernel(K, j, &constant(-3 * K, 3 * K, &one()));
            assert_eq!(dj.locality_order().unwrap(), j + 1);
        }
    }

    #[test]
    fn fourier_of_delta_derivatives() {
        for j in 0..=5u32 {
            // ∂_w^j δ = j! ∂_w^{(j)} δ
            let dj = kernel(K, j, &constant(-3 * K, 3 * K, &factorial(j)));
            let phi = dj.fourier().unwrap();
            assert_eq!(phi.degree(), Some(j as usize));
            for (i, c) in phi.0.iter().enumerate() {
                let want = if i == j as usize { one() } else { <Rat as Zero>::zero() };
                let target = constant(-K, K, &want);
                assert!(c.agrees(&target, K, guard_fourier(j + 1)).unwrap());
            }
        }
    }

    #[test]
    fn random_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..20 {
            let order = 1 + trial % 3;
            let (a, coeffs) = random_local(&mut rng, K, order);
            assert_eq!(a.locality_order().unwrap(), order);
            let got = a.ope_coefficients().unwrap();
            for ((j, c), (_, want)) in got.iter().zip(&coeffs) {
                assert!(c.agrees(want, K, guard_ope(*j)).unwrap());
            }
            assert!(reconstruct(K, &got).agrees_where_known(&a, order as i64).unwrap());
            assert_eq!(fourier_identities(&a).unwrap(), [true; 3]);
            assert_eq!(remark_laws(&a).unwrap(), [true; 3]);
        }
    }

    #[test]
    fn random_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..3 {
            let a = random_dist3(&mut rng, 10, 2, 3);
            assert!(composition_law(&a, 2).unwrap());
        }
    }

    #[test]
    fn virasoro_ope() {
        let vir = crate::algebra::builders::virasoro();
        let l = Gen::Basis(0);
        let bracket = product_distribution(&vir, &l, &l, K).unwrap();
        let ope = bracket.ope_coefficients().unwrap();
        assert_eq!(ope.len(), 2);
        let lf = field(&vir, &ConfElt::basis(l), K).unwrap();
        assert!(ope[0].1.agrees(&lf.derivative(), K, 2).unwrap());
        assert!(ope[1].1.agrees(&lf.scale(&int(2)), K, 2).unwrap());
        assert!(oracle_check(&vir, &l, &l, K).unwrap());
    }

    #[test]
    fn checks_detect_wrong_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (a, _) = random_local(&mut rng, K, 3);
        let g = guard_fourier(4);
        // Φ(a(w, z)) differs from the unreflected Φ(a(z, w))
        assert!(!a.swap().fourier().unwrap().agrees(&a.fourier().unwrap(), K, g).unwrap());
        let b = random_dist3(&mut rng, 12, 2, 2);
        let c = random_dist3(&mut rng, 12, 2, 2);
        let lhs = b.fourier_lhs(2);
        let rhs = c.fourier_rhs(2);
        assert!(lhs.iter().any(|(key, l)| !l.agrees(&rhs[key], 12, 8).unwrap()));
    }

    #[test]
    fn non_local_is_reported() {
        let a: Dist2<Rat> = Dist2::from_fn(K, |m, n| Some(int((m * 7 + n * 3) % 5)));
        assert!(matches!(a.locality_order(), Err(Error::NotLocal)));
    }
}
