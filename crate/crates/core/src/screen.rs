//! Coprimality of `phi_(2^k+1)` with `phi_d`, the steps of its proof as
//! checkable operations, divisor oracles, and the exceptional-APN screen.
//!
//! The screen walks a fixed decision tree. Every test it runs lands in the
//! [`Verdict`] trace as `(test, inputs, outcome)`, and [`replay`] recomputes
//! any entry from `f` alone, so a verdict can be audited after the fact.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::ScreenError;
use crate::field::{gcd, FieldCtx, FieldElement};
use crate::par::{self, Strategy};
use crate::phi::{build_phi, build_phi_j, even_reduction, numerator_surface};
use crate::poly::{LinearForm, Monomial, TriPoly, UniPoly, DEGREE_CAP};

const ONE: FieldElement = FieldElement::ONE;

/// Largest `d` accepted by [`coprime_bruteforce`].
pub const BRUTEFORCE_LIMIT: u32 = 256;

/// Every GF(2^m) with `m <= 8` is a subfield of one of these.
pub const LINEAR_SCAN_FIELDS: [u32; 4] = [5, 6, 7, 8];

/// `C(a, b) mod 2`: 1 iff the bits of `b` are a subset of those of `a`.
pub fn lucas_mod2(a: u64, b: u64) -> u8 {
    (a & b == b) as u8
}

/// `l` with `d = 2^l + 1`, `l >= 1`.
pub fn gold_exponent(d: u64) -> Option<u32> {
    (d >= 3 && (d - 1).is_power_of_two()).then(|| (d - 1).trailing_zeros())
}

/// `k >= 2` with `d = 2^(2k) - 2^k + 1`.
pub fn kasami_welch_index(d: u64) -> Option<u32> {
    (2..32u32)
        .map(|k| (k, (1u64 << (2 * k)) - (1u64 << k) + 1))
        .take_while(|&(_, v)| v <= d)
        .find(|&(_, v)| v == d)
        .map(|(k, _)| k)
}

/// Whether `x + a*y + (a+1)*z` divides `p`, tested on each homogeneous part
/// separately.
pub fn linear_form_divides(p: &TriPoly, alpha: FieldElement) -> bool {
    let form = LinearForm::new(ONE, alpha, alpha + ONE);
    p.homogeneous_parts().values().all(|part| {
        part.restrict_to_plane(&form)
            .expect("form has a nonzero x coefficient")
            .is_zero()
    })
}

/// Whether `x + a*y` divides a polynomial in `x, y` (such as the output of
/// [`TriPoly::shift_xy`]): `F_r(a, 1) = 0` for every homogeneous part `F_r`.
pub fn shifted_form_divides(p: &TriPoly, alpha: FieldElement) -> bool {
    debug_assert!(p.terms().all(|(m, _)| m.z == 0));
    let zero = FieldElement::ZERO;
    p.homogeneous_parts()
        .values()
        .all(|part| part.eval(alpha, ONE, zero).is_zero())
}

/// Closed form for coprimality of `phi_(2^k+1)` and `phi_d`, `d` odd: they
/// share a factor iff `d = 2^l + 1` with `gcd(l, k) > 1`.
pub fn coprime_gold_formula(k: u32, d: u32) -> Result<bool, ScreenError> {
    if d.is_multiple_of(2) {
        return Err(ScreenError::EvenDegree(d));
    }
    if d < 3 {
        return Err(ScreenError::DegreeTooSmall(d as u64, 3));
    }
    Ok(match gold_exponent(d as u64) {
        Some(l) => gcd(l as u64, k as u64) == 1,
        None => true,
    })
}

/// Result of scanning the Gold factors of `phi_(2^k+1)` against `phi_d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoprimeScan {
    pub k: u32,
    pub d: u32,
    /// `d = square_exponent * odd_core`.
    pub odd_core: u32,
    pub square_exponent: u32,
    /// The `a` whose form `x + a*y + (a+1)*z` divides `phi_d`.
    pub dividing: Vec<FieldElement>,
    pub coprime: bool,
}

/// Brute-force coprimality: `phi_(2^k+1)` is the product of the forms
/// `x + a*y + (a+1)*z`, `a` in GF(2^k) minus GF(2), so it is coprime to
/// `phi_d` iff none of them divides `phi_d`.
pub fn coprime_bruteforce(k: u32, d: u32, ambient: &FieldCtx) -> Result<bool, ScreenError> {
    Ok(coprime_scan(k, d, ambient, Strategy::default())?.coprime)
}

pub fn coprime_scan(
    k: u32,
    d: u32,
    ambient: &FieldCtx,
    strategy: Strategy,
) -> Result<CoprimeScan, ScreenError> {
    if d < 3 {
        return Err(ScreenError::DegreeTooSmall(d as u64, 3));
    }
    if d > BRUTEFORCE_LIMIT {
        return Err(ScreenError::DegreeTooLarge(d as u64, BRUTEFORCE_LIMIT as u64));
    }
    let alphas: Vec<FieldElement> = ambient
        .subfield_elements(k)?
        .into_iter()
        .filter(|a| a.bits() > 1)
        .collect();
    let (odd_core, square_exponent) = if d % 2 == 1 {
        (d, 1)
    } else {
        let red = even_reduction(d, *ambient)?;
        // The multiplier is a power of D = (x+y)(x+z)(y+z); none of its
        // factors is a Gold form.
        let dd = TriPoly::denominator(*ambient);
        assert!(
            alphas.iter().all(|a| !linear_form_divides(&dd, *a)),
            "D shares a factor with the Gold product"
        );
        (red.odd_core, red.square_exponent)
    };
    let phi = build_phi_j(odd_core, *ambient);
    let dividing: Vec<FieldElement> = if phi.is_zero() {
        alphas
    } else {
        par::map_range(strategy, alphas.len(), |i| {
            linear_form_divides(&phi, alphas[i]).then_some(alphas[i])
        })
        .into_iter()
        .flatten()
        .collect()
    };
    Ok(CoprimeScan {
        k,
        d,
        odd_core,
        square_exponent,
        coprime: dividing.is_empty(),
        dividing,
    })
}

/// Where the root-of-unity argument broke for one `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditStep {
    /// `a^(l-1) != 1` although both vanishing conditions hold.
    RootOfUnity,
    /// `(a+1)^(l-1) != 1` although both vanishing conditions hold.
    ShiftedRootOfUnity,
    /// `(a+1)^l + a^l + 1 = 0` and `a^(l-1) = 1` without `(a+1)^(l-1) = 1`.
    Implication,
    /// The component of degree `m - (2^i+1)` is not `y^(m-(2^i+1))` at
    /// `(a*y, y)`.
    ContradictionTerm,
    /// `x + a*y` divides the shifted surface after all.
    Divides,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AuditViolation {
    pub alpha: FieldElement,
    pub step: AuditStep,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AuditReport {
    /// `l = 1`: `m` is a Gold number and the argument does not apply.
    GoldCase { m: u32 },
    Checked {
        m: u32,
        /// `C(m, 2^i + 1) mod 2`.
        binomial: u8,
        /// The `a` satisfying both `(a+1)^l + a^l + 1 = 0` and
        /// `(a+1)^(l+1) + a^(l+1) + 1 = 0`.
        candidates: Vec<FieldElement>,
        violations: Vec<AuditViolation>,
    },
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        match self {
            AuditReport::GoldCase { .. } => true,
            AuditReport::Checked { violations, .. } => violations.is_empty(),
        }
    }
}

/// Replays the contradiction argument for `m = 2^i * l + 1` against every
/// `a` in GF(2^k) minus GF(2), working on the shifted surface
/// `f(x, y) = phi_m(x+1, y+1, 1) * x * y * (x+y)`.
pub fn root_of_unity_audit(
    k: u32,
    i: u32,
    l: u32,
    ambient: &FieldCtx,
) -> Result<AuditReport, ScreenError> {
    if l.is_multiple_of(2) {
        return Err(ScreenError::EvenL(l));
    }
    if i == 0 {
        return Err(ScreenError::AuditIndex(i));
    }
    let m = (1u64 << i.min(40)) * l as u64 + 1;
    if m > DEGREE_CAP as u64 {
        return Err(ScreenError::DegreeTooLarge(m, DEGREE_CAP as u64));
    }
    let m = m as u32;
    let alphas: Vec<FieldElement> = ambient
        .subfield_elements(k)?
        .into_iter()
        .filter(|a| a.bits() > 1)
        .collect();
    if l == 1 {
        return Ok(AuditReport::GoldCase { m });
    }
    let ctx = *ambient;
    // numerator(x+1, y+1, 1) = phi_m(x+1, y+1, 1) * D(x+1, y+1, 1), and
    // D(x+1, y+1, 1) = x*y*(x+y).
    let shifted = numerator_surface(&UniPoly::monomial(ctx, m)).shift_xy();
    let parts = shifted.homogeneous_parts();
    let r = m - ((1 << i) + 1);
    let zero = FieldElement::ZERO;
    let contradiction_part = parts.get(&r).cloned().unwrap_or_else(|| TriPoly::zero(ctx));

    let mut candidates = Vec::new();
    let mut violations = Vec::new();
    for &a in &alphas {
        let a1 = a + ONE;
        let pw = |x: FieldElement, e: u32| ctx.pow(x, e as u64);
        let eq_l = pw(a1, l) + pw(a, l) + ONE == zero;
        let eq_l1 = pw(a1, l + 1) + pw(a, l + 1) + ONE == zero;
        let root = pw(a, l - 1) == ONE;
        let shifted_root = pw(a1, l - 1) == ONE;
        let mut flag = |step| violations.push(AuditViolation { alpha: a, step });
        if parts.values().all(|p| p.eval(a, ONE, zero).is_zero()) {
            flag(AuditStep::Divides);
        }
        if eq_l && root && !shifted_root {
            flag(AuditStep::Implication);
        }
        if eq_l && eq_l1 {
            candidates.push(a);
            if !root {
                flag(AuditStep::RootOfUnity);
            }
            if !shifted_root {
                flag(AuditStep::ShiftedRootOfUnity);
            }
            if contradiction_part.eval(a, ONE, zero) != ONE {
                flag(AuditStep::ContradictionTerm);
            }
        }
    }
    Ok(AuditReport::Checked {
        m,
        binomial: lucas_mod2(m as u64, (1u64 << i) + 1),
        candidates,
        violations,
    })
}

/// Coefficients of `P = c1(x^2+y^2+z^2) + c4(xy+xz+yz) + b1(x+y+z) + d`,
/// living in the cubic extension of the base field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CubicParams {
    pub c1: FieldElement,
    pub c4: FieldElement,
    pub b1: FieldElement,
    pub d: FieldElement,
}

impl CubicParams {
    /// `(x+y)(y+z)(z+x) + P`.
    pub fn divisor(&self, ctx: FieldCtx) -> TriPoly {
        let mut out = TriPoly::denominator(ctx);
        let m = |x, y, z| Monomial::new(x, y, z);
        for mono in [m(2, 0, 0), m(0, 2, 0), m(0, 0, 2)] {
            out.add_term(mono, self.c1);
        }
        for mono in [m(1, 1, 0), m(1, 0, 1), m(0, 1, 1)] {
            out.add_term(mono, self.c4);
        }
        for mono in [m(1, 0, 0), m(0, 1, 0), m(0, 0, 1)] {
            out.add_term(mono, self.b1);
        }
        out.add_term(m(0, 0, 0), self.d);
        out
    }

    /// Coefficients `[a0, a1, a2]` of the divisor restricted to the line
    /// `y = 1, z = t`, as a polynomial in `x`.
    fn on_line(&self, ctx: &FieldCtx, t: FieldElement) -> [FieldElement; 3] {
        let t1 = t + ONE;
        let m = |a, b| ctx.mul(a, b);
        let a2 = t1 + self.c1;
        let a1 = m(t1, t1) + m(self.c4, t1) + self.b1;
        let a0 = m(t, t1) + m(self.c1, ONE + m(t, t)) + m(self.c4, t) + m(self.b1, t1) + self.d;
        [a0, a1, a2]
    }
}

fn cubic_extension(ctx: &FieldCtx) -> Result<FieldCtx, ScreenError> {
    Ok(FieldCtx::new(3 * ctx.n())?)
}

fn divides_by_cubic(phi: &TriPoly, params: &CubicParams) -> bool {
    if phi.is_zero() {
        return true;
    }
    if phi.total_degree() < Some(3) {
        return false;
    }
    let (_, rem) = phi
        .div_rem(&params.divisor(*phi.ctx()))
        .expect("same context, nonzero divisor");
    rem.is_zero()
}

/// Whether `(x+y)(y+z)(z+x) + P` divides `phi`; `ext` must be the cubic
/// extension of `phi`'s field and holds the parameters.
pub fn cubic_divisor_check(
    phi: &TriPoly,
    params: &CubicParams,
    ext: &FieldCtx,
) -> Result<bool, ScreenError> {
    let n = phi.ctx().n();
    if ext.n() != 3 * n {
        return Err(ScreenError::ExtensionUnavailable {
            expected: 3 * n,
            got: ext.n(),
        });
    }
    for c in [params.c1, params.c4, params.b1, params.d] {
        ext.element(c.bits())?;
    }
    let big = phi.embed(&phi.ctx().embedding_into(ext)?);
    Ok(divides_by_cubic(&big, params))
}

/// All parameter quadruples over GF(q^3), `q <= 4`, whose cubic divides
/// `phi`, sorted.
pub fn exhaustive_cubic_search(phi: &TriPoly, ctx: &FieldCtx) -> Result<Vec<CubicParams>, ScreenError> {
    exhaustive_cubic_search_with(phi, ctx, Strategy::default())
}

pub fn exhaustive_cubic_search_with(
    phi: &TriPoly,
    ctx: &FieldCtx,
    strategy: Strategy,
) -> Result<Vec<CubicParams>, ScreenError> {
    if phi.ctx() != ctx {
        return Err(crate::error::PolyError::ContextMismatch.into());
    }
    if ctx.n() > 2 {
        return Err(ScreenError::SearchTooLarge(ctx.n()));
    }
    if phi.is_zero() {
        return Err(ScreenError::ZeroSurface);
    }
    if phi.total_degree() < Some(3) {
        return Ok(Vec::new());
    }
    let ext = cubic_extension(ctx)?;
    let big = phi.embed(&ctx.embedding_into(&ext)?);
    // Every candidate's top part is D, so D must divide the top part of phi.
    let top = big.top_part();
    if LinearForm::denominator_factors()
        .iter()
        .any(|f| !top.restrict_to_plane(f).expect("nonzero form").is_zero())
    {
        return Ok(Vec::new());
    }
    // Cheap necessary conditions: restricted to a line, the cubic must
    // divide the restriction of phi.
    let g = ext.generator_x();
    let lines: Vec<(FieldElement, Vec<FieldElement>)> = [FieldElement::ZERO, g, ext.mul(g, g)]
        .into_iter()
        .map(|t| (t, restrict_to_line(&big, t)))
        .collect();
    let qq = ext.order() as usize;
    let found = par::map_range_with(strategy, qq, Vec::new, |scratch, c1| {
        let mut out = Vec::new();
        for c4 in 0..qq {
            for b1 in 0..qq {
                for d in 0..qq {
                    let p = CubicParams {
                        c1: FieldElement(c1 as u32),
                        c4: FieldElement(c4 as u32),
                        b1: FieldElement(b1 as u32),
                        d: FieldElement(d as u32),
                    };
                    let on_lines = lines
                        .iter()
                        .all(|(t, line)| line_divides(&ext, line, p.on_line(&ext, *t), scratch));
                    if on_lines && divides_by_cubic(&big, &p) {
                        out.push(p);
                    }
                }
            }
        }
        out
    });
    Ok(found.into_iter().flatten().collect())
}

/// `phi(x, 1, t)` as a dense coefficient vector in `x`.
fn restrict_to_line(p: &TriPoly, t: FieldElement) -> Vec<FieldElement> {
    let ctx = p.ctx();
    let mut out = vec![FieldElement::ZERO; p.total_degree().unwrap_or(0) as usize + 1];
    for (m, c) in p.terms() {
        out[m.x as usize] += ctx.mul(*c, ctx.pow(t, m.z as u64));
    }
    out
}

/// Whether `a2 x^2 + a1 x + a0` divides the dense polynomial `num`.
fn line_divides(
    ctx: &FieldCtx,
    num: &[FieldElement],
    [a0, a1, a2]: [FieldElement; 3],
    scratch: &mut Vec<FieldElement>,
) -> bool {
    if !a2.is_zero() {
        scratch.clear();
        scratch.extend_from_slice(num);
        let inv = ctx.inv(a2).expect("nonzero");
        for i in (2..scratch.len()).rev() {
            let c = ctx.mul(scratch[i], inv);
            if c.is_zero() {
                continue;
            }
            scratch[i - 1] += ctx.mul(c, a1);
            scratch[i - 2] += ctx.mul(c, a0);
        }
        scratch.iter().take(2).all(|c| c.is_zero())
    } else if !a1.is_zero() {
        let root = ctx.mul(a0, ctx.inv(a1).expect("nonzero"));
        num.iter()
            .rev()
            .fold(FieldElement::ZERO, |acc, c| ctx.mul(acc, root) + *c)
            .is_zero()
    } else if !a0.is_zero() {
        true
    } else {
        num.iter().all(|c| c.is_zero())
    }
}

/// `d < 0.45 * 2^(n/4) + 0.5`, i.e. `(10(2d-1))^4 < 9^4 * 2^n`, in exact
/// integer arithmetic.
pub fn theorem1_holds(d: u64, n: u32) -> bool {
    let lhs = (10 * (2 * d as u128 - 1)).pow(4);
    // 6561 * 2^n overflows u128 only far beyond any d accepted below.
    n >= 115 || lhs < 6561u128 << n
}

/// Degree bound for [`theorem1_min_field`].
pub const THEOREM1_MAX_DEGREE: u64 = 1 << 24;

/// Smallest `n` with `d < 0.45 * 2^(n/4) + 0.5`.
pub fn theorem1_min_field(d: u64) -> Result<u32, ScreenError> {
    if d < 9 {
        return Err(ScreenError::DegreeTooSmall(d, 9));
    }
    if d > THEOREM1_MAX_DEGREE {
        return Err(ScreenError::DegreeTooLarge(d, THEOREM1_MAX_DEGREE));
    }
    Ok((1..).find(|&n| theorem1_holds(d, n)).expect("inequality eventually holds"))
}

/// The linear forms (normalized: first nonzero coefficient 1) dividing a
/// homogeneous polynomial over its own field.
pub fn linear_factors(p: &TriPoly) -> Vec<LinearForm> {
    let ctx = *p.ctx();
    if p.is_zero() || p.total_degree() == Some(0) {
        return Vec::new();
    }
    let zero = FieldElement::ZERO;
    // Roots in t of a univariate restriction; every element if it vanishes.
    let roots = |g: &dyn Fn(FieldElement) -> FieldElement| -> Vec<FieldElement> {
        ctx.elements().filter(|t| g(*t).is_zero()).collect()
    };
    let divides = |form: &LinearForm| {
        p.restrict_to_plane(form).expect("nonzero form").is_zero()
    };
    let mut out = Vec::new();
    // x + a*y + b*z: p(a, 1, 0) = 0 and p(b, 0, 1) = 0.
    let ay = roots(&|t| p.eval(t, ONE, zero));
    let bz = roots(&|t| p.eval(t, zero, ONE));
    for &a in &ay {
        for &b in &bz {
            let form = LinearForm::new(ONE, a, b);
            if divides(&form) {
                out.push(form);
            }
        }
    }
    // y + b*z: p(0, b, 1) = 0.
    for b in roots(&|t| p.eval(zero, t, ONE)) {
        let form = LinearForm::new(zero, ONE, b);
        if divides(&form) {
            out.push(form);
        }
    }
    let form = LinearForm::new(zero, zero, ONE);
    if divides(&form) {
        out.push(form);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    NotExceptional,
    ConjecturedExceptional,
    Inconclusive,
    Informational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub test: String,
    pub inputs: String,
    pub outcome: String,
}

/// Outcome of [`screen_exceptional`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub theorem: Option<String>,
    pub heuristic: bool,
    pub trace: Vec<TraceEntry>,
}

impl Verdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdict serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes")
    }
}

/// Degrees `j` with `a_j != 0` and `phi_j != 0` (`j >= 3`, not a power of
/// two), descending. Other terms leave `phi` unchanged.
pub fn phi_support(f: &UniPoly) -> Vec<u32> {
    f.terms()
        .rev()
        .map(|(j, _)| j)
        .filter(|&j| j >= 3 && !j.is_power_of_two())
        .collect()
}

/// `f` minus its leading term, keeping only terms visible to `phi`.
fn tail(f: &UniPoly) -> UniPoly {
    let rest = f.without_leading();
    UniPoly::from_terms(
        *f.ctx(),
        rest.terms().filter(|&(j, _)| j >= 3 && !j.is_power_of_two()),
    )
}

/// One replayable test of the screen.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Check {
    Degree,
    PhiSupport,
    GoldNumber { d: u64 },
    KasamiWelchNumber { d: u64 },
    OddDegreeTerm,
    CubicSearch,
    CoprimeFormula { k: u32, d: u32 },
    CoprimeBruteforce { k: u32, j: u32 },
    Gcd { k: u32, n: u32 },
    ExceptionalForm { k: u32 },
    LinearFactorScan { j: u32, m: u32 },
    PhiCubicSearch { j: u32 },
}

struct Outcome {
    text: String,
    pass: bool,
}

impl Outcome {
    fn flag(pass: bool) -> Self {
        Outcome {
            text: pass.to_string(),
            pass,
        }
    }
}

impl Check {
    fn name(&self) -> &'static str {
        match self {
            Check::Degree => "degree",
            Check::PhiSupport => "phi_support",
            Check::GoldNumber { .. } => "gold_number",
            Check::KasamiWelchNumber { .. } => "kasami_welch_number",
            Check::OddDegreeTerm => "odd_degree_term",
            Check::CubicSearch => "cubic_divisor_search",
            Check::CoprimeFormula { .. } => "coprime_gold_formula",
            Check::CoprimeBruteforce { .. } => "coprime_bruteforce",
            Check::Gcd { .. } => "gcd",
            Check::ExceptionalForm { .. } => "exceptional_form",
            Check::LinearFactorScan { .. } => "linear_factor_scan",
            Check::PhiCubicSearch { .. } => "phi_j_cubic_search",
        }
    }

    fn inputs(&self, f: &UniPoly) -> String {
        match *self {
            Check::Degree | Check::PhiSupport | Check::OddDegreeTerm => format!("f={f}"),
            Check::CubicSearch => format!("f={f}, q={}", f.ctx().order()),
            Check::GoldNumber { d } | Check::KasamiWelchNumber { d } => format!("d={d}"),
            Check::CoprimeFormula { k, d } => format!("k={k}, d={d}"),
            Check::CoprimeBruteforce { k, j } => format!("k={k}, j={j}"),
            Check::Gcd { k, n } => format!("k={k}, n={n}"),
            Check::ExceptionalForm { k } => format!("f={f}, k={k}"),
            Check::LinearFactorScan { j, m } => format!("j={j}, m={m}"),
            Check::PhiCubicSearch { j } => format!("j={j}, q=2"),
        }
    }

    fn parse(test: &str, inputs: &str) -> Option<Check> {
        let args: BTreeMap<&str, &str> = inputs
            .split(", ")
            .filter_map(|kv| kv.split_once('='))
            .collect();
        let num = |key: &str| args.get(key)?.parse::<u64>().ok();
        let small = |key: &str| num(key).and_then(|v| u32::try_from(v).ok());
        Some(match test {
            "degree" => Check::Degree,
            "phi_support" => Check::PhiSupport,
            "gold_number" => Check::GoldNumber { d: num("d")? },
            "kasami_welch_number" => Check::KasamiWelchNumber { d: num("d")? },
            "odd_degree_term" => Check::OddDegreeTerm,
            "cubic_divisor_search" => Check::CubicSearch,
            "coprime_gold_formula" => Check::CoprimeFormula {
                k: small("k")?,
                d: small("d")?,
            },
            "coprime_bruteforce" => Check::CoprimeBruteforce {
                k: small("k")?,
                j: small("j")?,
            },
            "gcd" => Check::Gcd {
                k: small("k")?,
                n: small("n")?,
            },
            "exceptional_form" => Check::ExceptionalForm { k: small("k")? },
            "linear_factor_scan" => Check::LinearFactorScan {
                j: small("j")?,
                m: small("m")?,
            },
            "phi_j_cubic_search" => Check::PhiCubicSearch { j: small("j")? },
            _ => return None,
        })
    }

    fn run(&self, f: &UniPoly) -> Outcome {
        match *self {
            Check::Degree => {
                let d = f.degree();
                Outcome {
                    text: d.map_or("none".into(), |d| d.to_string()),
                    pass: d.is_some_and(|d| d > 0),
                }
            }
            Check::PhiSupport => {
                let s = phi_support(f);
                Outcome {
                    text: if s.is_empty() {
                        "none".into()
                    } else {
                        s.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
                    },
                    pass: !s.is_empty(),
                }
            }
            Check::GoldNumber { d } => match gold_exponent(d) {
                Some(l) => Outcome {
                    text: format!("2^{l}+1"),
                    pass: true,
                },
                None => Outcome {
                    text: "no".into(),
                    pass: false,
                },
            },
            Check::KasamiWelchNumber { d } => match kasami_welch_index(d) {
                Some(k) => Outcome {
                    text: format!("2^{}-2^{k}+1", 2 * k),
                    pass: true,
                },
                None => Outcome {
                    text: "no".into(),
                    pass: false,
                },
            },
            Check::OddDegreeTerm => match f.terms().rev().find(|(j, _)| j % 2 == 1) {
                Some((j, _)) => Outcome {
                    text: format!("x^{j}"),
                    pass: true,
                },
                None => Outcome {
                    text: "none".into(),
                    pass: false,
                },
            },
            Check::CubicSearch => {
                let ctx = *f.ctx();
                if ctx.n() > 2 {
                    return Outcome {
                        text: "skipped: q > 4".into(),
                        pass: false,
                    };
                }
                let phi = build_phi(f);
                match exhaustive_cubic_search(&phi, &ctx) {
                    Ok(found) if found.is_empty() => Outcome {
                        text: "none".into(),
                        pass: true,
                    },
                    Ok(found) => Outcome {
                        text: format!("{} divisors", found.len()),
                        pass: false,
                    },
                    Err(e) => Outcome {
                        text: format!("error: {e}"),
                        pass: false,
                    },
                }
            }
            Check::CoprimeFormula { k, d } => match coprime_gold_formula(k, d) {
                Ok(v) => Outcome {
                    text: match gold_exponent(d as u64) {
                        Some(l) => format!("{v} ({d} = 2^{l}+1, gcd({l},{k}) = {})", gcd(l as u64, k as u64)),
                        None => format!("{v} ({d} is not a Gold number)"),
                    },
                    pass: v,
                },
                Err(e) => Outcome {
                    text: format!("error: {e}"),
                    pass: false,
                },
            },
            Check::CoprimeBruteforce { k, j } => {
                if j < 3 || j.is_power_of_two() {
                    return Outcome {
                        text: "phi_j = 0".into(),
                        pass: false,
                    };
                }
                let verdict = FieldCtx::new(k)
                    .map_err(ScreenError::from)
                    .and_then(|ambient| coprime_bruteforce(k, j, &ambient));
                match verdict {
                    Ok(v) => Outcome::flag(v),
                    Err(e) => Outcome {
                        text: format!("skipped: {e}"),
                        pass: false,
                    },
                }
            }
            Check::Gcd { k, n } => {
                let g = gcd(k as u64, n as u64);
                Outcome {
                    text: g.to_string(),
                    pass: g == 1,
                }
            }
            Check::ExceptionalForm { k } => {
                let h = tail(f);
                let top = (1u32 << (k - 1)) + 2;
                let a = h.coeff(top);
                let form = UniPoly::from_terms(*f.ctx(), [(top, a), (3, f.ctx().mul(a, a))]);
                Outcome::flag(!a.is_zero() && h == form)
            }
            Check::LinearFactorScan { j, m } => {
                let ctx = FieldCtx::new(m).expect("scan fields are valid");
                let factors = linear_factors(&build_phi_j(j, ctx));
                Outcome {
                    text: if factors.is_empty() {
                        "none".into()
                    } else {
                        format!("{} factors", factors.len())
                    },
                    pass: factors.is_empty(),
                }
            }
            Check::PhiCubicSearch { j } => {
                let ctx = FieldCtx::new(1).expect("GF(2)");
                match exhaustive_cubic_search(&build_phi_j(j, ctx), &ctx) {
                    Ok(found) if found.is_empty() => Outcome {
                        text: "none".into(),
                        pass: true,
                    },
                    Ok(found) => Outcome {
                        text: format!("{} divisors", found.len()),
                        pass: false,
                    },
                    Err(e) => Outcome {
                        text: format!("error: {e}"),
                        pass: false,
                    },
                }
            }
        }
    }
}

/// Recomputes a trace entry from `f` alone. `None` for entries that are not
/// tests (branch summaries, notes) or that do not parse.
pub fn replay(f: &UniPoly, entry: &TraceEntry) -> Option<String> {
    let check = Check::parse(&entry.test, &entry.inputs)?;
    (check.inputs(f) == entry.inputs).then(|| check.run(f).text)
}

struct Screen<'a> {
    f: &'a UniPoly,
    trace: Vec<TraceEntry>,
    /// Checks already run; each appears once in the trace.
    seen: BTreeMap<Check, bool>,
    first: Option<(Status, Option<String>, bool)>,
}

impl Screen<'_> {
    fn check(&mut self, c: Check) -> bool {
        if let Some(&pass) = self.seen.get(&c) {
            return pass;
        }
        let out = c.run(self.f);
        self.seen.insert(c.clone(), out.pass);
        self.trace.push(TraceEntry {
            test: c.name().into(),
            inputs: c.inputs(self.f),
            outcome: out.text,
        });
        out.pass
    }

    fn note(&mut self, test: &str, inputs: String, outcome: String) {
        self.trace.push(TraceEntry {
            test: test.into(),
            inputs,
            outcome,
        });
    }

    fn branch(&mut self, id: &str, result: Option<(Status, &str, bool)>, reason: &str) {
        let outcome = match result {
            Some((status, thm, _)) => format!("{status:?} ({thm})"),
            None => format!("not concluded: {reason}"),
        };
        self.note("branch", format!("id={id}"), outcome);
        if let Some((status, thm, heuristic)) = result {
            if self.first.is_none() {
                let thm = (!thm.is_empty()).then(|| thm.to_string());
                self.first = Some((status, thm, heuristic));
            }
        }
    }

    fn finish(self) -> Verdict {
        let (status, theorem, heuristic) = self.first.unwrap_or((Status::Inconclusive, None, false));
        Verdict {
            status,
            theorem,
            heuristic,
            trace: self.trace,
        }
    }
}

/// Runs the decision tree on `f` over its own field.
///
/// Branches, in order: (a) Gold/Kasami-Welch monomial; (b) odd degree;
/// (c) degree `2e`, `e` odd; (d) degree `4e`, `e = 3 mod 4`; (e) Gold
/// degree plus tail; (f) Kasami-Welch degree plus tail; (g) degree 12 or
/// 20. Every applicable branch is traced; the verdict cites the first that
/// concludes.
pub fn screen_exceptional(f: &UniPoly) -> Verdict {
    use Status::*;
    let mut s = Screen {
        f,
        trace: Vec::new(),
        seen: BTreeMap::new(),
        first: None,
    };
    if !s.check(Check::Degree) {
        s.branch("-", None, "f is constant");
        return s.finish();
    }
    let d = f.degree().expect("nonconstant");
    s.check(Check::PhiSupport);
    let support = phi_support(f);
    let d64 = d as u64;
    let n = f.ctx().n();

    // (a) Monomials up to terms phi cannot see; x^(2^t e) is x^e composed
    // with a Frobenius power.
    if support.len() == 1 && support[0] == d {
        let core = d64 >> d64.trailing_zeros();
        let gold = s.check(Check::GoldNumber { d: core });
        let kw = s.check(Check::KasamiWelchNumber { d: core });
        let result = match (gold, kw) {
            (true, _) => Some((ConjecturedExceptional, "Gold monomial", false)),
            (_, true) => Some((ConjecturedExceptional, "Kasami-Welch monomial", false)),
            _ => None,
        };
        s.branch("a", result, "exponent is neither Gold nor Kasami-Welch");
    }

    // (b)
    if d % 2 == 1 {
        let gold = s.check(Check::GoldNumber { d: d64 });
        let kw = s.check(Check::KasamiWelchNumber { d: d64 });
        let result = (!gold && !kw).then_some((NotExceptional, "Thm 2", false));
        s.branch("b", result, "degree is a Gold or Kasami-Welch number");
    }

    // (c)
    if d % 4 == 2 {
        let odd = s.check(Check::OddDegreeTerm);
        s.branch("c", odd.then_some((NotExceptional, "Thm 3", false)), "no odd-degree term");
    }

    // (d)
    if d.is_multiple_of(4) && (d / 4) % 4 == 3 {
        let none = s.check(Check::CubicSearch);
        let reason = if n > 2 { "search needs q <= 4" } else { "a cubic divisor exists" };
        s.branch("d", none.then_some((NotExceptional, "Thm 4", false)), reason);
    }

    // (e)
    if let Some(k) = gold_exponent(d64).filter(|&k| k >= 2) {
        screen_gold(&mut s, k, d, n);
    }

    // (f)
    if let Some(k) = kasami_welch_index(d64) {
        let g = tail(f);
        let bound = (1u64 << (2 * k - 1)) - (1u64 << (k - 1)) + 1;
        if g.degree().is_some_and(|dg| dg as u64 <= bound) {
            let mut certified = false;
            for j in phi_support(&g).into_iter().filter(|&j| j > 3) {
                let linear_free = LINEAR_SCAN_FIELDS
                    .iter()
                    .all(|&m| s.check(Check::LinearFactorScan { j, m }));
                if linear_free && s.check(Check::PhiCubicSearch { j }) {
                    certified = true;
                }
            }
            let result = certified.then_some((NotExceptional, "Thm 9", true));
            s.branch("f", result, "no phi_j of the tail passed the irreducibility heuristic");
        } else {
            s.branch("f", None, &format!("tail degree exceeds {bound}"));
        }
    }

    // (g)
    if d == 12 || d == 20 {
        let label = if d == 12 {
            "degree-12 classification"
        } else {
            "degree-20 classification"
        };
        s.branch("g", Some((Informational, label, false)), "");
    }
    s.finish()
}

fn screen_gold(s: &mut Screen<'_>, k: u32, d: u32, n: u32) {
    use Status::*;
    let h = tail(s.f);
    let Some(hd) = h.degree() else {
        s.branch("e", None, "tail is invisible to phi");
        return;
    };

    if hd % 2 == 1 {
        let ok = s.check(Check::CoprimeFormula { k, d: hd });
        s.branch("e.1", ok.then_some((NotExceptional, "Thm 11", false)), "deg(h) is a Gold number sharing a factor");
    }

    let mut coprime_terms = Vec::new();
    for (j, _) in h.terms().rev() {
        // A Gold phi_j splits into linear forms, so only coprimality helps.
        if j % 2 == 1 {
            s.check(Check::GoldNumber { d: j as u64 });
        }
        if s.check(Check::CoprimeBruteforce { k, j }) {
            coprime_terms.push(j);
        }
    }
    let result = (!coprime_terms.is_empty()).then_some((NotExceptional, "Thm 5", false));
    s.branch("e.2", result, "no term of h is coprime to the Gold surface");

    if hd == (1 << (k - 1)) + 2 {
        let coprime_n = s.check(Check::Gcd { k, n });
        let special = s.check(Check::ExceptionalForm { k });
        let result = (k % 2 == 1 && coprime_n && !special).then_some((NotExceptional, "Thm 6", false));
        let reason = if k.is_multiple_of(2) {
            "k is even"
        } else if !coprime_n {
            "gcd(k, n) > 1"
        } else {
            "h has the exceptional two-term form"
        };
        s.branch("e.3", result, reason);

        if k.is_multiple_of(2) && k >= 4 {
            let result = (!coprime_terms.is_empty()).then_some((NotExceptional, "Thm 12", false));
            if result.is_none() {
                let m = hd / 2;
                let l = gold_exponent(m as u64).expect("hd/2 = 2^(k-2)+1");
                s.note(
                    "discrepancy",
                    format!("k={k}, j={hd}"),
                    format!(
                        "phi_{hd} = D*phi_{m}^2 and phi_{m} shares linear factors with phi_{d} \
                         (gcd({l},{k}) = {}), so the coprimality hypothesis cannot hold for j = {hd}",
                        gcd(l as u64, k as u64)
                    ),
                );
            }
            s.branch("e.4", result, "no term of h is coprime to the Gold surface");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi::gold_product;
    use crate::poly::Var;

    fn k(n: u32) -> FieldCtx {
        FieldCtx::new(n).unwrap()
    }

    fn binom_mod2(a: u64, b: u64) -> u8 {
        // Pascal's rule over GF(2).
        let mut row = vec![1u8];
        for _ in 0..a {
            let mut next = vec![1u8; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] ^ row[i];
            }
            row = next;
        }
        row.get(b as usize).copied().unwrap_or(0)
    }

    #[test]
    fn lucas_examples() {
        assert_eq!(lucas_mod2(7, 3), 1);
        assert_eq!(lucas_mod2(5, 2), 0);
        for a in 0..40 {
            assert_eq!(lucas_mod2(a, 0), 1);
            for b in 0..=a {
                assert_eq!(lucas_mod2(a, b), binom_mod2(a, b), "C({a},{b})");
            }
        }
    }

    #[test]
    fn number_predicates() {
        assert_eq!(gold_exponent(3), Some(1));
        assert_eq!(gold_exponent(9), Some(3));
        assert_eq!(gold_exponent(2), None);
        assert_eq!(gold_exponent(7), None);
        assert_eq!(kasami_welch_index(13), Some(2));
        assert_eq!(kasami_welch_index(57), Some(3));
        assert_eq!(kasami_welch_index(3), None);
        assert_eq!(kasami_welch_index(14), None);
    }

    #[test]
    fn linear_form_examples() {
        let ctx = k(2);
        let w = FieldElement(2);
        assert!(linear_form_divides(&build_phi_j(5, ctx), w));
        assert!(!linear_form_divides(&build_phi_j(9, ctx), w));
        assert!(linear_form_divides(&TriPoly::denominator(ctx), ONE));
        let shifted = build_phi_j(5, ctx).shift_xy();
        assert!(shifted_form_divides(&shifted, w));
        assert!(!shifted_form_divides(&build_phi_j(9, ctx).shift_xy(), w));
    }

    #[test]
    fn formula_examples() {
        assert_eq!(coprime_gold_formula(2, 9), Ok(true));
        assert_eq!(coprime_gold_formula(4, 5), Ok(false));
        assert_eq!(coprime_gold_formula(3, 7), Ok(true));
        assert_eq!(coprime_gold_formula(3, 9), Ok(false));
        assert_eq!(coprime_gold_formula(3, 10), Err(ScreenError::EvenDegree(10)));
    }

    #[test]
    fn bruteforce_examples() {
        assert!(coprime_bruteforce(2, 9, &k(2)).unwrap());
        assert!(!coprime_bruteforce(2, 10, &k(2)).unwrap());
        assert!(!coprime_bruteforce(3, 9, &k(3)).unwrap());
        assert!(!coprime_bruteforce(4, 5, &k(4)).unwrap());
        // Same answer inside a larger ambient field.
        assert!(coprime_bruteforce(2, 9, &k(6)).unwrap());
        assert!(matches!(
            coprime_bruteforce(3, 9, &k(4)),
            Err(ScreenError::Field(_))
        ));
        assert!(matches!(
            coprime_bruteforce(2, 257, &k(2)),
            Err(ScreenError::DegreeTooLarge(..))
        ));
        let scan = coprime_scan(2, 10, &k(2), Strategy::Sequential).unwrap();
        assert_eq!((scan.odd_core, scan.square_exponent), (5, 2));
        assert_eq!(scan.dividing, vec![FieldElement(2), FieldElement(3)]);
    }

    #[test]
    fn formula_matches_bruteforce_small() {
        for kk in 2..=4 {
            let ctx = k(kk);
            for d in (3..=33).step_by(2) {
                assert_eq!(
                    coprime_gold_formula(kk, d).unwrap(),
                    coprime_bruteforce(kk, d, &ctx).unwrap(),
                    "k = {kk}, d = {d}"
                );
            }
        }
    }

    #[test]
    fn audit_examples() {
        let r = root_of_unity_audit(2, 1, 3, &k(2)).unwrap();
        assert!(r.is_clean(), "{r:?}");
        match r {
            AuditReport::Checked { m, binomial, .. } => assert_eq!((m, binomial), (7, 1)),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            root_of_unity_audit(3, 2, 1, &k(3)).unwrap(),
            AuditReport::GoldCase { m: 5 }
        );
        assert_eq!(root_of_unity_audit(2, 1, 4, &k(2)), Err(ScreenError::EvenL(4)));
        for kk in 2..=4 {
            for l in (3..=15).step_by(2) {
                for i in 1..=3 {
                    assert!(root_of_unity_audit(kk, i, l, &k(kk)).unwrap().is_clean());
                }
            }
        }
    }

    #[test]
    fn cubic_examples() {
        let ctx = k(1);
        let ext = k(3);
        let zero = CubicParams {
            c1: FieldElement::ZERO,
            c4: FieldElement::ZERO,
            b1: FieldElement::ZERO,
            d: FieldElement::ZERO,
        };
        assert_eq!(cubic_divisor_check(&build_phi_j(5, ctx), &zero, &ext), Ok(false));
        assert_eq!(cubic_divisor_check(&TriPoly::one(ctx), &zero, &ext), Ok(false));
        assert_eq!(cubic_divisor_check(&build_phi_j(6, ctx), &zero, &ext), Ok(true));
        assert_eq!(
            cubic_divisor_check(&build_phi_j(5, ctx), &zero, &k(2)),
            Err(ScreenError::ExtensionUnavailable { expected: 3, got: 2 })
        );
        assert!(matches!(
            exhaustive_cubic_search(&build_phi_j(9, k(3)), &k(3)),
            Err(ScreenError::SearchTooLarge(3))
        ));
    }

    // The line filters are only necessary conditions; the search must agree
    // with plain trial division over every candidate.
    #[test]
    fn cubic_search_matches_plain_trial_division() {
        let ctx = k(1);
        let ext = k(3);
        let f = UniPoly::from_exponents(ctx, &[12, 3]);
        for phi in [build_phi(&f), build_phi_j(7, ctx), build_phi_j(6, ctx), build_phi_j(11, ctx)] {
            let big = phi.embed(&ctx.embedding_into(&ext).unwrap());
            let mut oracle = Vec::new();
            for bits in 0..4096u32 {
                let p = CubicParams {
                    c1: FieldElement(bits >> 9),
                    c4: FieldElement(bits >> 6 & 7),
                    b1: FieldElement(bits >> 3 & 7),
                    d: FieldElement(bits & 7),
                };
                let (_, rem) = big.div_rem(&p.divisor(ext)).unwrap();
                if rem.is_zero() {
                    oracle.push(p);
                }
            }
            assert_eq!(exhaustive_cubic_search(&phi, &ctx).unwrap(), oracle, "{phi}");
        }
    }

    #[test]
    fn cubic_search_golden() {
        let ctx = k(1);
        let f = UniPoly::from_exponents(ctx, &[12, 3]);
        let phi = build_phi(&f);
        let found = exhaustive_cubic_search(&phi, &ctx).unwrap();
        let seq = exhaustive_cubic_search_with(&phi, &ctx, Strategy::Sequential).unwrap();
        assert_eq!(found, seq);
        let d_plus_one = CubicParams {
            c1: FieldElement::ZERO,
            c4: FieldElement::ZERO,
            b1: FieldElement::ZERO,
            d: ONE,
        };
        assert!(found.contains(&d_plus_one));
        let rendered: Vec<String> = found
            .iter()
            .map(|p| format!("{} {} {} {}", p.c1, p.c4, p.b1, p.d))
            .collect();
        assert_eq!(rendered, GOLDEN_X12_X3);
    }

    const GOLDEN_X12_X3: &[&str] = &["0x0 0x0 0x0 0x1"];

    #[test]
    fn theorem1_examples() {
        assert_eq!(theorem1_min_field(9), Ok(17));
        assert_eq!(theorem1_min_field(13), Ok(20));
        assert!(!theorem1_holds(9, 16));
        assert!(!theorem1_holds(13, 19));
        assert_eq!(theorem1_min_field(8), Err(ScreenError::DegreeTooSmall(8, 9)));
        let big = theorem1_min_field(THEOREM1_MAX_DEGREE).unwrap();
        assert!(theorem1_holds(THEOREM1_MAX_DEGREE, big) && !theorem1_holds(THEOREM1_MAX_DEGREE, big - 1));
    }

    #[test]
    fn linear_factor_search() {
        let ctx = k(2);
        let gold = gold_product(2, ctx).unwrap();
        assert_eq!(linear_factors(&gold).len(), 2);
        let d = TriPoly::denominator(ctx);
        assert_eq!(linear_factors(&d).len(), 3);
        assert_eq!(linear_factors(&TriPoly::var(ctx, Var::Z)).len(), 1);
        // phi_7 has no linear factor over GF(2^8).
        assert!(linear_factors(&build_phi_j(7, k(8))).is_empty());
    }

    fn screen(text: &str, n: u32) -> Verdict {
        screen_exceptional(&UniPoly::parse(text, k(n)).unwrap())
    }

    #[test]
    fn screen_examples() {
        let cases = [
            ("x^3", Status::ConjecturedExceptional, Some("Gold monomial")),
            ("x^7+x^5", Status::NotExceptional, Some("Thm 2")),
            ("x^9+x^7", Status::NotExceptional, Some("Thm 11")),
            ("x^9+x^5", Status::NotExceptional, Some("Thm 11")),
            ("x^6+x^3", Status::NotExceptional, Some("Thm 3")),
            ("x^17+x^5", Status::Inconclusive, None),
            ("x^17+x^10", Status::Inconclusive, None),
            ("x^12+x^5", Status::Informational, Some("degree-12 classification")),
            ("x^13+x^7", Status::NotExceptional, Some("Thm 9")),
        ];
        for (text, status, thm) in cases {
            let v = screen(text, 5);
            assert_eq!(v.status, status, "{text}: {}", v.to_json_pretty());
            assert_eq!(v.theorem.as_deref(), thm, "{text}");
            assert_eq!(v.heuristic, thm == Some("Thm 9"));
        }
        let v = screen("x^17+x^10", 5);
        assert!(v.trace.iter().any(|e| e.test == "discrepancy"));
    }

    #[test]
    fn trace_replays() {
        for text in ["x^7+x^5", "x^9+x^7", "x^6+x^3", "x^17+x^10", "x^12+x^3", "x^13+x^7"] {
            for n in [1, 2, 5] {
                let f = UniPoly::parse(text, k(n)).unwrap();
                let v = screen_exceptional(&f);
                for e in &v.trace {
                    if let Some(out) = replay(&f, e) {
                        assert_eq!(out, e.outcome, "{text}: {e:?}");
                    } else {
                        assert!(matches!(e.test.as_str(), "branch" | "discrepancy"), "{e:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn thm4_over_small_fields() {
        // phi(x^12 + x^3) = D^3 + 1 is divisible by D + 1.
        let v = screen("x^12+x^3", 1);
        assert_eq!(v.status, Status::Informational);
        let v = screen("x^12+x^7", 1);
        assert!(v.trace.iter().any(|e| e.test == "cubic_divisor_search"));
    }
}
