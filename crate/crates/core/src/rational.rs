//! Exact parsing and rendering of rationals.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

/// Parses `p/q`, an integer, or a decimal such as `-0.125` or `3e-2`
/// into an exact rational. Decimals are read digit by digit, never via `f64`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().ok()?);
    let shift = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, (-shift) as usize);
    }
    Some(if negative { -value } else { value })
}

/// Renders `p/q` with an explicit denominator, even for integers.
pub fn render_exact(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Exact `a^(1/n)` when `a` is a perfect `n`-th power of a rational.
pub fn exact_root(a: &Rational, n: u32) -> Option<Rational> {
    if a.is_negative() {
        return None;
    }
    let num = a.numer().nth_root(n);
    let den = a.denom().nth_root(n);
    if num.pow(n) == *a.numer() && den.pow(n) == *a.denom() {
        Some(Rational::new(num, den))
    } else {
        None
    }
}

/// Sign of `lhs - rhs` where `rhs = (a^(1/2) + b^(1/2))^2`, decided exactly.
pub fn cmp_sum_of_roots_squared(lhs: &Rational, a: &Rational, b: &Rational) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    // lhs >= a + b + 2 sqrt(ab)  <=>  d := lhs - a - b >= 0 and d^2 >= 4ab
    let d = lhs - a - b;
    if d.is_negative() {
        return Ordering::Less;
    }
    let four_ab = Rational::from_integer(BigInt::from(4)) * a * b;
    (&d * &d).cmp(&four_ab)
}

pub fn one() -> Rational {
    Rational::one()
}
