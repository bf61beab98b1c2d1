//! Exact rational helpers. All costs and thresholds are `BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `p/q` in lowest terms. Panics on a zero denominator.
pub fn frac(p: i64, q: i64) -> Rational {
    assert!(q != 0, "zero denominator");
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn pow2(k: u32) -> Rational {
    Rational::from_integer(BigInt::one() << k)
}

/// Parses `"p/q"` or `"p"`. Decimal and exponent notation are refused so that
/// no float ever sneaks into an instance.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let t = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational (expected \"p/q\" or an integer): {s:?}"));
    if t.is_empty() || t.contains(['.', 'e', 'E']) {
        return Err(bad());
    }
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn is_negative(r: &Rational) -> bool {
    r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("6/4").unwrap(), frac(3, 2));
        assert_eq!(parse_rational(" -1/2 ").unwrap(), frac(-1, 2));
        assert_eq!(parse_rational("2/-4").unwrap(), frac(-1, 2));
    }

    #[test]
    fn parse_rejects_floats_and_garbage() {
        for s in ["1.5", "1e3", "", "1/0", "a/b", "1//2", "0.5/1"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn format_round_trip() {
        for r in [int(0), int(-7), frac(13, 4), frac(-1, 3)] {
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
        assert_eq!(format_rational(&frac(4, 2)), "2");
        assert_eq!(format_rational(&frac(1, 32)), "1/32");
    }

    #[test]
    fn lowest_terms() {
        let r = frac(10, -4);
        assert_eq!(r.numer(), &BigInt::from(-5));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(pow2(5), int(32));
    }
}
