//! Exact rational scalars.
//!
//! The ground field is modelled by `ℚ`. `BigRational` already keeps values in
//! lowest terms with a positive denominator, so `Rat` is a plain alias plus a
//! handful of helpers used throughout the crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

/// `n / d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n!` as a rational.
pub fn factorial(n: u32) -> Rat {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    Rat::from_integer(acc)
}

/// Generalised binomial `C(top, k) = top (top-1) ... (top-k+1) / k!`, valid
/// for negative `top`.
pub fn binomial(top: i64, k: u32) -> Rat {
    let mut num = BigInt::one();
    for i in 0..k as i64 {
        num *= top - i;
    }
    Rat::new(num, factorial(k).to_integer())
}

/// Falling factorial `top (top-1) ... (top-k+1)`.
pub fn falling(top: i64, k: u32) -> Rat {
    let mut num = BigInt::one();
    for i in 0..k as i64 {
        num *= top - i;
    }
    Rat::from_integer(num)
}

/// Renders as `num` or `num/den`.
pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `num` or `num/den` (optional leading sign).
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rat::new(n, d))
}

/// Magnitude of the numerator, used for pivot selection.
pub fn numer_size(r: &Rat) -> BigInt {
    r.numer().abs()
}

pub fn is_one(r: &Rat) -> bool {
    r.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let r = rat(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(rat(0, 5), Rat::zero());
        assert_eq!(rat(0, 5).denom(), &BigInt::one());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), int(10));
        assert_eq!(binomial(-1, 3), int(-1));
        assert_eq!(binomial(-3, 2), int(6));
        assert_eq!(binomial(2, 5), int(0));
        assert_eq!(falling(4, 2), int(12));
    }

    #[test]
    fn render_and_parse() {
        for r in [rat(1, 2), rat(-7, 3), int(0), int(12)] {
            assert_eq!(parse_rat(&fmt_rat(&r)), Some(r));
        }
        assert_eq!(parse_rat("3/0"), None);
    }
}
