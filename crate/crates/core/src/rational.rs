//! Small exact rationals for exponents and precision bounds, and the `"p/q"`
//! text form used for every rational on the wire.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Exponent-sized rational.
pub type Rat = Ratio<i64>;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(n)
}

pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn format_big(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Compact form: `p` for integers, `p/q` otherwise.
pub fn display_big(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format_big(r)
    }
}

pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let bad = || Error::Parse(format!("bad rational '{s}'"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => s.parse::<i64>().map(Rat::from_integer).map_err(|_| bad()),
    }
}

pub fn parse_big(s: &str) -> Result<BigRational, Error> {
    let bad = || Error::Parse(format!("bad rational '{s}'"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => s
            .parse::<BigInt>()
            .map(BigRational::from_integer)
            .map_err(|_| bad()),
    }
}

pub fn to_big(r: &Rat) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Floor of a rational as an integer.
pub fn floor(r: &Rat) -> i64 {
    r.floor().to_integer()
}

pub fn ceil(r: &Rat) -> i64 {
    r.ceil().to_integer()
}

/// Rational upper bound for the square root of a nonnegative rational.
pub fn sqrt_upper(r: &Rat) -> Rat {
    if !r.is_positive() {
        return Rat::zero();
    }
    // Denominator 64 keeps the bound within 1/64 of the true root.
    let scaled = (r * Rat::from_integer(64 * 64)).ceil().to_integer() as u64;
    let mut s = crate::arith::isqrt(scaled);
    if s * s < scaled {
        s += 1;
    }
    Rat::new(s as i64, 64)
}

pub fn is_half_integer(r: &Rat) -> bool {
    (r * Rat::from_integer(2)).is_integer()
}

pub fn frac(r: &Rat) -> Rat {
    r - r.floor()
}

pub fn one() -> Rat {
    Rat::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        assert_eq!(parse_rat("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rat("-4").unwrap(), int(-4));
        assert_eq!(format_rat(&rat(-2, 4)), "-1/2");
        assert!(parse_rat("1/0").is_err());
        assert_eq!(parse_big("272/43").unwrap(), to_big(&rat(272, 43)));
    }

    #[test]
    fn sqrt_bound() {
        for n in 0..200 {
            let r = rat(n, 7);
            let s = sqrt_upper(&r);
            assert!(s * s >= r);
        }
    }
}
