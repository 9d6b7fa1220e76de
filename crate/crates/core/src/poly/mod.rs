//! Sparse univariate and trivariate polynomials over GF(2^n).

mod tri;
mod uni;

pub use tri::{LinearForm, Monomial, TriPoly, Var};
pub use uni::{UniPoly, MAX_UNI_DEGREE};

/// Cap on the total degree of any trivariate term.
pub const DEGREE_CAP: u32 = 1 << 16;

/// Every `i` whose set bits are a subset of those of `e`, ascending,
/// i.e. every `i` with `C(e, i)` odd.
pub fn submasks(e: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(0u32);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == e {
            None
        } else {
            Some(((cur | !e).wrapping_add(1)) & e)
        };
        Some(cur)
    })
}
