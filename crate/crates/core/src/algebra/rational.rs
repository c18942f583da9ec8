use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Integer as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `p/q` as a rational. Panics on `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `p`, `p/q`, `+p/q` or `-p/q`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::BadRational(text.to_string());
    let s = text.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    if num.starts_with("+-") || num.starts_with("++") {
        return Err(bad());
    }
    let num = num.strip_prefix('+').unwrap_or(num);
    if num.is_empty() {
        return Err(bad());
    }
    let numer: BigInt = num.parse().map_err(|_| bad())?;
    let denom: BigInt = match den {
        Some(d) => {
            if d.starts_with(['+', '-']) {
                return Err(bad());
            }
            d.parse().map_err(|_| bad())?
        }
        None => BigInt::from(1),
    };
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(numer, denom))
}

/// Canonical rendering: `p/q`, or `p` when the denominator is one.
pub fn format_rational(x: &Rational) -> String {
    x.to_string()
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
