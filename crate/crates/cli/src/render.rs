//! Exact decimal rendering of rationals. Everything stays in integer
//! arithmetic: the bound intervals hinge on strict inequalities, so no float
//! may touch a value before it is formatted.

use dksample_core::num_bigint::{BigInt, BigUint};
use dksample_core::num_rational::BigRational;
use dksample_core::num_traits::{Signed, ToPrimitive, Zero};

/// Significant digits used for distribution values and bounds.
pub const SIG_DIGITS: u32 = 12;

fn pow10(e: u32) -> BigUint {
    BigUint::from(10u32).pow(e)
}

/// `r` as a decimal string with at most `sig` significant digits,
/// round-half-away-from-zero, trailing fraction zeros trimmed ("0.5", not
/// "0.500000000000"). Never scientific notation.
pub fn decimal_sig(r: &BigRational, sig: u32) -> String {
    assert!(sig >= 1);
    if r.is_zero() {
        return "0".into();
    }
    let a = r.numer().magnitude().clone();
    let b = r.denom().magnitude().clone();

    // Decimal exponent e with 10^e <= a/b < 10^(e+1).
    let mut e = a.to_string().len() as i64 - b.to_string().len() as i64;
    let below = |e: i64| {
        // a/b < 10^e ?
        if e >= 0 {
            a < &b * pow10(e as u32)
        } else {
            &a * pow10((-e) as u32) < b
        }
    };
    while below(e) {
        e -= 1;
    }
    while !below(e + 1) {
        e += 1;
    }

    // digits = round(a/b * 10^(sig-1-e)), an integer with exactly `sig`
    // digits (one more after a rounding carry).
    let shift = sig as i64 - 1 - e;
    let (num, den) = if shift >= 0 {
        (&a * pow10(shift as u32), b.clone())
    } else {
        (a.clone(), &b * pow10((-shift) as u32))
    };
    let mut q = &num / &den;
    if (&num - &q * &den) * 2u32 >= den {
        q += 1u32;
    }
    if q == pow10(sig) {
        q = pow10(sig - 1);
        e += 1;
    }

    let digits = q.to_string();
    debug_assert_eq!(digits.len(), sig as usize);
    let mut out = String::new();
    if r.is_negative() {
        out.push('-');
    }
    if e >= sig as i64 - 1 {
        out.push_str(&digits);
        for _ in 0..(e - sig as i64 + 1) {
            out.push('0');
        }
    } else if e >= 0 {
        let point = (e + 1) as usize;
        out.push_str(&digits[..point]);
        let frac = digits[point..].trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
    } else {
        let frac = digits.trim_end_matches('0');
        out.push_str("0.");
        for _ in 0..(-e - 1) {
            out.push('0');
        }
        out.push_str(frac);
    }
    out
}

/// A ratio rendered as a percentage with exactly two decimals ("11.67"),
/// round-half-away-from-zero. The `%` sign is left to the caller.
pub fn percent2(r: &BigRational) -> String {
    let scaled = r * BigRational::from(BigInt::from(10_000));
    let num = scaled.numer();
    let den = scaled.denom();
    let mut q = num / den;
    if (num - &q * den).magnitude() * 2u32 >= *den.magnitude() {
        if num.is_negative() {
            q -= 1;
        } else {
            q += 1;
        }
    }
    let hundredths = q.to_i128().expect("percentage fits i128");
    let sign = if hundredths < 0 { "-" } else { "" };
    let n = hundredths.unsigned_abs();
    format!("{sign}{}.{:02}", n / 100, n % 100)
}

/// Exact `numer/denom` form for run records, reparsed losslessly.
pub fn fraction(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
