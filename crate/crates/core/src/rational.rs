//! Exact rational plumbing: the validated `Delta` parameter and string
//! conversions that never round.
//!
//! The gap parameter delta appears in every predicate of the crate. It is
//! kept as an exact `BigRational` so that decisions like "is the gap of
//! sqrt(n) at least delta" reduce to integer comparisons, with a cached
//! `f64` approximation for the floating paths that only need a few digits.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A rational gap parameter, guaranteed to lie strictly inside (0, 1/2).
#[derive(Debug, Clone)]
pub struct Delta {
    exact: BigRational,
    approx: f64,
}

// comparisons delegate to the exact value; approx is derived from it
impl PartialEq for Delta {
    fn eq(&self, other: &Self) -> bool {
        self.exact == other.exact
    }
}

impl Eq for Delta {}

impl PartialOrd for Delta {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Delta {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.exact.cmp(&other.exact)
    }
}

impl Delta {
    /// Wraps a rational after checking 0 < value < 1/2.
    pub fn new(value: BigRational) -> Result<Self> {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        if value <= BigRational::zero() || value >= half {
            return Err(Error::DeltaOutOfRange {
                value: value.to_string(),
            });
        }
        let approx = value.to_f64().unwrap_or(f64::NAN);
        if !approx.is_finite() {
            return Err(Error::DeltaOutOfRange {
                value: value.to_string(),
            });
        }
        Ok(Delta {
            exact: value,
            approx,
        })
    }

    /// Convenience constructor from an integer fraction p/q.
    pub fn from_ratio(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::DeltaOutOfRange {
                value: format!("{p}/0"),
            });
        }
        Delta::new(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// Parses "p/q" or an exact decimal such as "0.05" or "5e-5".
    pub fn parse(s: &str) -> Result<Self> {
        Delta::new(parse_rational(s)?)
    }

    /// The exact value.
    pub fn rational(&self) -> &BigRational {
        &self.exact
    }

    /// Numerator of the reduced fraction (positive).
    pub fn numer(&self) -> &BigInt {
        self.exact.numer()
    }

    /// Denominator of the reduced fraction (positive).
    pub fn denom(&self) -> &BigInt {
        self.exact.denom()
    }

    /// Nearest floating approximation; only for display and for floating
    /// paths whose error budget dwarfs one rounding of delta.
    pub fn as_f64(&self) -> f64 {
        self.approx
    }

    /// delta/2, still a valid gap parameter.
    pub fn half(&self) -> Delta {
        let halved = &self.exact / BigRational::from_integer(BigInt::from(2));
        Delta::new(halved).expect("half of a valid delta is valid")
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.exact)
    }
}

/// Parses a rational from "p/q", integer, or exact decimal notation
/// (optionally with an exponent, e.g. "5e-5"). Decimals are converted
/// without rounding.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let fail = || Error::Precondition(format!("cannot parse {s:?} as a rational"));
    if s.is_empty() {
        return Err(fail());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| fail())?;
        let d = BigInt::from_str(den.trim()).map_err(|_| fail())?;
        if d.is_zero() {
            return Err(fail());
        }
        return Ok(BigRational::new(n, d));
    }

    // Decimal form: [sign] digits [. digits] [e|E [sign] digits]
    let (mantissa, exp_str) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, Some(e)),
        None => (s, None),
    };
    let exp: i64 = match exp_str {
        Some(e) => e.parse().map_err(|_| fail())?,
        None => 0,
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits: String = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(fail());
    }
    let numer = BigInt::from_str(&digits).map_err(|_| fail())?;
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(numer * ten.pow(scale as u32))
    } else {
        BigRational::new(numer, ten.pow((-scale) as u32))
    })
}

/// Exact rational value of a finite f64 (every finite f64 is p/2^k).
pub fn rational_from_f64(x: f64, what: &'static str) -> Result<BigRational> {
    BigRational::from_float(x).ok_or(Error::NonFinite { what })
}

/// Formats a nonnegative rational for reports, e.g. "1/20000".
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// ceil(r) for a nonnegative rational, as a BigInt.
pub fn ceil_rational(r: &BigRational) -> BigInt {
    debug_assert!(!r.is_negative());
    r.ceil().to_integer()
}
