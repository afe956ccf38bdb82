//! Exact rationals and the continued-fraction helpers used to round solver
//! estimates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// The fraction with the smallest denominator in the closed interval
/// `[lo, hi]` (smallest absolute value among integers).
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo <= hi, "empty interval");
    if lo.is_positive() {
        simplest_positive(lo, hi)
    } else if hi.is_negative() {
        -simplest_positive(&-hi, &-lo)
    } else {
        Rational::zero()
    }
}

fn simplest_positive(lo: &Rational, hi: &Rational) -> Rational {
    let c = lo.ceil();
    if &c <= hi {
        return c;
    }
    // lo, hi lie strictly between two consecutive integers
    let fl = lo.floor();
    let inner = simplest_positive(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

/// Closest fraction to `x` with denominator at most `max_den`; ties go to
/// the last convergent.
pub fn limit_denominator(x: &Rational, max_den: &BigInt) -> Rational {
    assert!(max_den >= &BigInt::one());
    if x.denom() <= max_den {
        return x.clone();
    }
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
    loop {
        let a = n.div_floor(&d);
        let q2 = &q0 + &a * &q1;
        if &q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let r = &n - &a * &d;
        (n, d) = (d, r);
    }
    let k = (max_den - &q0).div_floor(&q1);
    let b1 = Rational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let b2 = Rational::new(p1, q1);
    if (&b2 - x).abs() <= (&b1 - x).abs() {
        b2
    } else {
        b1
    }
}

/// Decimal rendering rounded half away from zero.
pub fn to_decimal(x: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (x * Rational::from_integer(scale.clone())).round().to_integer();
    let neg = scaled.is_negative();
    let (int_part, frac) = scaled.abs().div_rem(&scale);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{:0>width$}", frac.to_string(), width = digits)
    }
}

/// Parses `3`, `-1/2` or `0.75`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((i, f)) = s.split_once('.') {
        if f.is_empty() || !f.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let neg = i.starts_with('-');
        let i: BigInt = if i.is_empty() || i == "-" { BigInt::zero() } else { i.parse().ok()? };
        let den = num_traits::pow(BigInt::from(10), f.len());
        let frac = Rational::new(f.parse().ok()?, den);
        let whole = Rational::from_integer(i.abs());
        let v = whole + frac;
        return Some(if neg { -v } else { v });
    }
    s.parse::<BigInt>().ok().map(Rational::from_integer)
}

/// `num/den` as used in JSON output.
pub fn to_pair(x: &Rational) -> (String, String) {
    (x.numer().to_string(), x.denom().to_string())
}

pub fn to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn simplest_examples() {
        assert_eq!(simplest_between(&ratio(1, 3), &ratio(1, 2)), ratio(1, 2));
        assert_eq!(simplest_between(&ratio(3, 10), &ratio(4, 10)), ratio(1, 3));
        assert_eq!(simplest_between(&ratio(-1, 10), &ratio(1, 10)), int(0));
        assert_eq!(simplest_between(&ratio(-4, 10), &ratio(-3, 10)), ratio(-1, 3));
        assert_eq!(simplest_between(&ratio(7, 5), &ratio(7, 5)), ratio(7, 5));
        assert_eq!(simplest_between(&ratio(13, 10), &ratio(27, 10)), int(2));
    }

    #[test]
    fn limit_denominator_examples() {
        let pi_ish = ratio(314159, 100000);
        assert_eq!(limit_denominator(&pi_ish, &BigInt::from(10)), ratio(22, 7));
        assert_eq!(limit_denominator(&pi_ish, &BigInt::from(1)), int(3));
        assert_eq!(limit_denominator(&ratio(1, 8), &BigInt::from(8)), ratio(1, 8));
        assert_eq!(limit_denominator(&ratio(-5, 17), &BigInt::from(4)), ratio(-1, 3));
    }

    #[test]
    fn decimals() {
        assert_eq!(to_decimal(&ratio(1, 8), 6), "0.125000");
        assert_eq!(to_decimal(&ratio(1, 7), 4), "0.1429");
        assert_eq!(to_decimal(&ratio(-2, 3), 2), "-0.67");
        assert_eq!(to_decimal(&int(3), 0), "3");
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("1/2"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("0.9"), Some(ratio(9, 10)));
        assert_eq!(parse_rational("-0.25"), Some(ratio(-1, 4)));
        assert_eq!(parse_rational(".5"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("4"), Some(int(4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    fn brute_simplest(lo: &Rational, hi: &Rational) -> Rational {
        for d in 1i64.. {
            let d_big = int(d);
            let mut candidates: Vec<Rational> = Vec::new();
            let start = (lo * &d_big).ceil().to_integer();
            let end = (hi * &d_big).floor().to_integer();
            let mut n = start;
            while n <= end {
                candidates.push(Rational::new(n.clone(), BigInt::from(d)));
                n += 1;
            }
            if let Some(best) = candidates.into_iter().min_by_key(|c| c.numer().abs()) {
                return best;
            }
        }
        unreachable!()
    }

    proptest! {
        #[test]
        fn simplest_has_minimal_denominator(a in -200i64..200, b in 1i64..60, c in 0i64..200, d in 1i64..60) {
            let lo = ratio(a, b);
            let hi = &lo + ratio(c, d);
            let s = simplest_between(&lo, &hi);
            prop_assert!(lo <= s && s <= hi);
            let brute = brute_simplest(&lo, &hi);
            prop_assert_eq!(s.denom(), brute.denom());
        }

        #[test]
        fn limit_denominator_is_closest(a in -500i64..500, b in 1i64..500, m in 1i64..30) {
            let x = ratio(a, b);
            let got = limit_denominator(&x, &BigInt::from(m));
            prop_assert!(got.denom() <= &BigInt::from(m));
            let dist = (&got - &x).abs();
            for q in 1..=m {
                let p = (&x * int(q)).round().to_integer();
                let cand = Rational::new(p, BigInt::from(q));
                prop_assert!(dist <= (&cand - &x).abs());
            }
        }
    }
}
