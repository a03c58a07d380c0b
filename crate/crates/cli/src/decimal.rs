use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use plq_core::ExactRational;

/// Fixed-point rendering of an exact rational, rounding half away from zero.
pub fn render(r: &ExactRational, digits: u32) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits as usize);
    let scaled = r.numer().abs() * &scale;
    let (q, rem) = scaled.div_rem(r.denom());
    let q = if rem * 2 >= *r.denom() { q + 1 } else { q };
    let (int_part, frac) = q.div_rem(&scale);
    let sign = if r.is_negative() && !q_is_zero(&int_part, &frac) {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        return format!("{sign}{int_part}");
    }
    format!(
        "{sign}{int_part}.{:0>width$}",
        frac.to_string(),
        width = digits as usize
    )
}

fn q_is_zero(a: &BigInt, b: &BigInt) -> bool {
    a.is_zero() && b.is_zero()
}
