//! Exact rational coordinates.
//!
//! Every endpoint coordinate and every gadget quantity in this crate is a
//! `Rational`: arbitrary-precision, always in lowest terms, with a positive
//! denominator. Comparison, addition, and multiplication are exact; nothing
//! in the crate ever rounds. The deep gadget constructions nest divisions by
//! `2n - 1/2` per tree level, which is exactly the kind of geometry floating
//! point would silently break.

use num::BigInt;

/// Arbitrary-precision rational, stored reduced with a positive denominator.
pub type Rational = num::BigRational;

/// Builds `n / d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer `n` as a rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stored_in_lowest_terms_with_positive_denominator() {
        let r = rat(4, -6);
        assert_eq!(r.numer(), &BigInt::from(-2));
        assert_eq!(r.denom(), &BigInt::from(3));
    }

    #[test]
    fn arithmetic_is_exact() {
        // 1/3 + 1/6 == 1/2, exactly.
        assert_eq!(rat(1, 3) + rat(1, 6), rat(1, 2));
        // (2/3) * (9/4) == 3/2, exactly.
        assert_eq!(rat(2, 3) * rat(9, 4), rat(3, 2));
        let tiny = rat(1, 1_000_000_007);
        assert!(rat_int(0) < tiny && tiny < rat(1, 1_000_000_006));
    }
}
