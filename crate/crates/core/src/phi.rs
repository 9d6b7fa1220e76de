//! The surface `phi = (f(x)+f(y)+f(z)+f(x+y+z)) / ((x+y)(x+z)(y+z))`.
//!
//! `phi` is linear in `f`, so everything reduces to the monomial surfaces
//! `phi_j`, whose coefficients lie in GF(2) whatever the ambient field. For a
//! Gold exponent `j = 2^k + 1`, `phi_j` splits into the `2^k - 2` linear forms
//! `x + a*y + (a+1)*z`, `a` in GF(2^k) minus GF(2).

use crate::error::{FieldError, PhiError};
use crate::field::{FieldCtx, FieldElement};
use crate::par::{self, Strategy};
use crate::poly::{submasks, LinearForm, Monomial, TriPoly, UniPoly};

/// `x^j + y^j + z^j + (x+y+z)^j` over GF(2). The multinomial coefficient of
/// `x^a y^b z^c` in `(x+y+z)^j` is odd exactly when `a, b, c` split the
/// binary digits of `j` without carries.
fn monomial_numerator(j: u32, c: FieldElement, out: &mut TriPoly) {
    for a in submasks(j) {
        let rest = j ^ a;
        for b in submasks(rest) {
            out.add_term(Monomial::new(a, b, rest ^ b), c);
        }
    }
    out.add_term(Monomial::new(j, 0, 0), c);
    out.add_term(Monomial::new(0, j, 0), c);
    out.add_term(Monomial::new(0, 0, j), c);
}

/// `f(x) + f(y) + f(z) + f(x+y+z)`, expanded.
pub fn numerator_surface(f: &UniPoly) -> TriPoly {
    let mut out = TriPoly::zero(*f.ctx());
    for (j, c) in f.terms() {
        monomial_numerator(j, c, &mut out);
    }
    out
}

/// `phi` for `f`: the numerator divided by `x+y`, `x+z`, `y+z` in turn.
///
/// # Panics
/// If one of the divisions is inexact, which would be a bug: the numerator
/// always vanishes on the three planes.
pub fn build_phi(f: &UniPoly) -> TriPoly {
    divide_by_denominator(numerator_surface(f))
}

fn divide_by_denominator(numerator: TriPoly) -> TriPoly {
    LinearForm::denominator_factors()
        .iter()
        .fold(numerator, |p, form| match p.exact_div_linear(form) {
            Ok(q) => q,
            Err(e) => panic!("numerator not divisible by {form}: {e}"),
        })
}

/// `phi_j`: homogeneous of degree `j - 3`, zero when `j` is 0 or a power of 2.
pub fn build_phi_j(j: u32, ctx: FieldCtx) -> TriPoly {
    let mut num = TriPoly::zero(ctx);
    monomial_numerator(j, FieldElement::ONE, &mut num);
    divide_by_denominator(num)
}

/// The linear forms `x + a*y + (a+1)*z` for `a` in GF(2^k) minus GF(2).
pub fn gold_factors(k: u32, ctx: FieldCtx) -> Result<Vec<LinearForm>, FieldError> {
    Ok(ctx
        .subfield_elements(k)?
        .into_iter()
        .filter(|a| a.bits() > 1)
        .map(|a| LinearForm::new(FieldElement::ONE, a, a + FieldElement::ONE))
        .collect())
}

/// Product of the Gold linear factors for GF(2^k) (`k | ctx.n`), formed
/// as a balanced product tree.
pub fn gold_product(k: u32, ctx: FieldCtx) -> Result<TriPoly, FieldError> {
    gold_product_with(k, ctx, Strategy::default())
}

pub fn gold_product_with(k: u32, ctx: FieldCtx, strategy: Strategy) -> Result<TriPoly, FieldError> {
    let factors: Vec<TriPoly> = gold_factors(k, ctx)?
        .iter()
        .map(|l| l.to_poly(ctx))
        .collect();
    Ok(par::reduce_tree(strategy, factors, &|a: &TriPoly, b: &TriPoly| a * b)
        .unwrap_or_else(|| TriPoly::one(ctx)))
}

/// A verified instance of `phi_j = D^(2^t - 1) * phi_m^(2^t)`, `j = 2^t * m`,
/// `m` odd.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvenReduction {
    pub j: u32,
    /// `D^(2^t - 1)`.
    pub multiplier: TriPoly,
    pub odd_core: u32,
    /// `2^t`.
    pub square_exponent: u32,
    /// `phi_j` itself, as checked.
    pub phi: TriPoly,
}

/// Splits off the even part of `j` and checks the squaring identity by
/// explicit multiplication.
pub fn even_reduction(j: u32, ctx: FieldCtx) -> Result<EvenReduction, PhiError> {
    if j % 2 == 1 {
        return Err(PhiError::OddDegree(j));
    }
    if j == 0 {
        // phi_0 = 0 = D^0 * phi_0^1 would need t = 0; report the trivial core.
        return Ok(EvenReduction {
            j,
            multiplier: TriPoly::one(ctx),
            odd_core: 0,
            square_exponent: 1,
            phi: TriPoly::zero(ctx),
        });
    }
    let t = j.trailing_zeros();
    let m = j >> t;
    let square = 1u32 << t;
    let phi_m = build_phi_j(m, ctx);
    let phi = build_phi_j(j, ctx);
    let multiplier = TriPoly::denominator(ctx).pow(square - 1);
    let mut core_power = phi_m;
    for _ in 0..t {
        core_power = core_power.square();
    }
    let rhs = if core_power.is_zero() {
        core_power
    } else {
        &multiplier * &core_power
    };
    if rhs != phi {
        return Err(PhiError::IdentityFailed {
            j,
            multiplier_exp: square - 1,
            core: m,
            square,
        });
    }
    Ok(EvenReduction {
        j,
        multiplier,
        odd_core: m,
        square_exponent: square,
        phi,
    })
}
