//! Shorthands for unit tests, fixed to `BigRational`.

use num_rational::BigRational;

use crate::scalar::Extended;

pub fn q(n: i64, d: i64) -> BigRational {
    crate::scalar::q(n, d)
}

pub fn qx(n: i64, d: i64) -> Extended<BigRational> {
    crate::scalar::qx(n, d)
}
