//! Differential spectra, the classical APN exponent families, Rodier's
//! surface criterion and rational-point counts on the surface `phi = 0`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::DdtError;
use crate::field::{gcd, FieldCtx, FieldElement};
use crate::par::{self, Strategy};
use crate::phi::build_phi;
use crate::poly::{TriPoly, UniPoly};

/// Largest `n` accepted by [`diff_spectrum`].
pub const SPECTRUM_LIMIT: u32 = 20;
/// Largest `n` accepted by the `q^3` scans.
pub const SURFACE_LIMIT: u32 = 7;
/// Largest `n` for which the full `q x q` table may be requested.
pub const FULL_TABLE_LIMIT: u32 = 12;

/// Solution-count histogram: count value -> number of `b` attaining it.
pub type Histogram = BTreeMap<u32, u64>;

/// Differential spectrum of `f` over one field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffSpectrum {
    pub ctx: FieldCtx,
    /// Row `a - 1` holds the histogram for difference `a != 0`.
    pub rows: Vec<Histogram>,
    /// Max solution count over all `a != 0` and `b`.
    pub uniformity: u32,
}

impl DiffSpectrum {
    /// Histogram merged over all nonzero differences.
    pub fn histogram(&self) -> Histogram {
        let mut out = Histogram::new();
        for row in &self.rows {
            for (count, freq) in row {
                *out.entry(*count).or_default() += freq;
            }
        }
        out
    }

    pub fn is_apn(&self) -> bool {
        self.uniformity == 2
    }

    /// Every recorded count is even (solutions pair up as `x`, `x + a`).
    pub fn all_counts_even(&self) -> bool {
        self.rows
            .iter()
            .all(|row| row.iter().all(|(count, freq)| *freq == 0 || count % 2 == 0))
    }

    pub fn report(&self, f: &UniPoly) -> SpectrumReport {
        SpectrumReport {
            n: self.ctx.n(),
            modulus: format!("{:#x}", self.ctx.modulus()),
            poly: f.to_string(),
            uniformity: self.uniformity,
            histogram: self
                .histogram()
                .into_iter()
                .map(|(count, frequency)| HistogramEntry { count, frequency })
                .collect(),
            apn: self.is_apn(),
        }
    }
}

/// Serializable spectrum summary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectrumReport {
    pub n: u32,
    pub modulus: String,
    pub poly: String,
    pub uniformity: u32,
    pub histogram: Vec<HistogramEntry>,
    pub apn: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HistogramEntry {
    pub count: u32,
    pub frequency: u64,
}

fn check_ctx(f: &UniPoly, ctx: &FieldCtx, limit: u32) -> Result<(), DdtError> {
    if f.ctx() != ctx {
        return Err(DdtError::ContextMismatch);
    }
    if ctx.n() > limit {
        return Err(DdtError::FieldTooLarge { n: ctx.n(), limit });
    }
    Ok(())
}

/// Values of `f` at every element, in bit order, as raw bits.
fn value_table(f: &UniPoly, strategy: Strategy) -> Vec<u32> {
    let ctx = *f.ctx();
    let terms: Vec<(u32, FieldElement)> = f.terms().collect();
    par::map_range(strategy, ctx.order() as usize, |x| {
        let a = FieldElement(x as u32);
        terms
            .iter()
            .fold(FieldElement::ZERO, |acc, (d, c)| {
                acc + ctx.mul(*c, ctx.pow(a, *d as u64))
            })
            .bits()
    })
}

/// Solution counts of `f(x + a) + f(x) = b` for every `a != 0`, one pass
/// over `x` per `a`.
pub fn diff_spectrum(f: &UniPoly, ctx: &FieldCtx) -> Result<DiffSpectrum, DdtError> {
    diff_spectrum_with(f, ctx, Strategy::default())
}

pub fn diff_spectrum_with(
    f: &UniPoly,
    ctx: &FieldCtx,
    strategy: Strategy,
) -> Result<DiffSpectrum, DdtError> {
    check_ctx(f, ctx, SPECTRUM_LIMIT)?;
    let q = ctx.order() as usize;
    let values = value_table(f, strategy);
    let rows = par::map_range_with(
        strategy,
        q - 1,
        || vec![0u32; q],
        |counts, i| {
            let a = i + 1;
            counts.iter_mut().for_each(|c| *c = 0);
            for x in 0..q {
                counts[(values[x ^ a] ^ values[x]) as usize] += 1;
            }
            let mut hist = Histogram::new();
            for &c in counts.iter() {
                *hist.entry(c).or_default() += 1;
            }
            hist
        },
    );
    let uniformity = rows
        .iter()
        .filter_map(|h| h.keys().next_back().copied())
        .max()
        .unwrap_or(0);
    Ok(DiffSpectrum {
        ctx: *ctx,
        rows,
        uniformity,
    })
}

/// The complete difference distribution table, row `a`, column `b`.
pub fn ddt_full(f: &UniPoly, ctx: &FieldCtx) -> Result<Vec<Vec<u32>>, DdtError> {
    check_ctx(f, ctx, FULL_TABLE_LIMIT)?;
    let q = ctx.order() as usize;
    let values = value_table(f, Strategy::default());
    Ok(par::map_range(Strategy::default(), q, |a| {
        let mut row = vec![0u32; q];
        for x in 0..q {
            row[(values[x ^ a] ^ values[x]) as usize] += 1;
        }
        row
    }))
}

/// Uniformity exactly 2.
pub fn is_apn(f: &UniPoly, ctx: &FieldCtx) -> Result<bool, DdtError> {
    Ok(diff_spectrum(f, ctx)?.is_apn())
}

/// Rows of the classical APN table, plus the two binomial families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Gold { r: u32 },
    KasamiWelch { r: u32 },
    Welch { r: u32 },
    Niho { r: u32 },
    Inverse { r: u32 },
    Dobbertin { r: u32 },
    /// `x^3 + u x^36` over GF(2^10); `u = None` picks the first admissible
    /// coefficient.
    EkpBinomial { u: Option<FieldElement> },
    /// `x^(2^s+1) + w x^(2^(ik) + 2^(mk+s))` over GF(2^(3k)).
    Bcl { s: u32, k: u32 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Gold { .. } => "Gold",
            Family::KasamiWelch { .. } => "Kasami-Welch",
            Family::Welch { .. } => "Welch",
            Family::Niho { .. } => "Niho",
            Family::Inverse { .. } => "Inverse",
            Family::Dobbertin { .. } => "Dobbertin",
            Family::EkpBinomial { .. } => "EKP",
            Family::Bcl { .. } => "BCL",
        }
    }
}

/// A family row with its field degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
    pub n: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyMember {
    Exponent(u64),
    Binomial(UniPoly),
}

impl FamilyMember {
    pub fn to_poly(&self, ctx: FieldCtx) -> UniPoly {
        match self {
            FamilyMember::Exponent(d) => UniPoly::monomial(ctx, reduce_exponent(*d, &ctx)),
            FamilyMember::Binomial(p) => p.clone(),
        }
    }
}

/// As a map on GF(2^n), `x^e` equals `x^e'` for `e' = e mod (2^n - 1)`
/// taken in `1..=2^n - 1`.
fn reduce_exponent(e: u64, ctx: &FieldCtx) -> u32 {
    let m = ctx.order() - 1;
    if e <= m {
        e as u32
    } else {
        (((e - 1) % m) + 1) as u32
    }
}

fn violated(family: &Family, condition: impl Into<String>) -> DdtError {
    DdtError::ConstraintViolated {
        family: family.name(),
        condition: condition.into(),
    }
}

/// The family's exponent (or binomial), after checking its constraints.
pub fn family_exponent(spec: &FamilySpec) -> Result<FamilyMember, DdtError> {
    let n = spec.n;
    let fam = &spec.family;
    let pow2 = |e: u32| -> Result<u64, DdtError> {
        1u64.checked_shl(e)
            .filter(|_| e < 64)
            .ok_or_else(|| violated(fam, format!("exponent 2^{e} too large")))
    };
    let need_2r1 = |r: u32| -> Result<(), DdtError> {
        if n != 2 * r + 1 {
            return Err(violated(fam, format!("n = 2r+1 (n = {n}, r = {r})")));
        }
        Ok(())
    };
    let positive = |r: u32| -> Result<(), DdtError> {
        if r == 0 {
            return Err(violated(fam, "r >= 1"));
        }
        Ok(())
    };
    match *fam {
        Family::Gold { r } => {
            positive(r)?;
            if gcd(r as u64, n as u64) != 1 {
                return Err(violated(fam, format!("(r,n) = 1 (r = {r}, n = {n})")));
            }
            Ok(FamilyMember::Exponent(pow2(r)? + 1))
        }
        Family::KasamiWelch { r } => {
            positive(r)?;
            if gcd(r as u64, n as u64) != 1 {
                return Err(violated(fam, format!("(r,n) = 1 (r = {r}, n = {n})")));
            }
            if n.is_multiple_of(2) {
                return Err(violated(fam, format!("n odd (n = {n})")));
            }
            Ok(FamilyMember::Exponent(pow2(2 * r)? - pow2(r)? + 1))
        }
        Family::Welch { r } => {
            positive(r)?;
            need_2r1(r)?;
            Ok(FamilyMember::Exponent(pow2(r)? + 3))
        }
        Family::Niho { r } => {
            positive(r)?;
            need_2r1(r)?;
            let d = if r % 2 == 0 {
                pow2(r)? + pow2(r / 2)? - 1
            } else {
                pow2(r)? + pow2((3 * r).div_ceil(2))? - 1
            };
            Ok(FamilyMember::Exponent(d))
        }
        Family::Inverse { r } => {
            positive(r)?;
            need_2r1(r)?;
            Ok(FamilyMember::Exponent(pow2(2 * r)? - 1))
        }
        Family::Dobbertin { r } => {
            positive(r)?;
            if n != 5 * r {
                return Err(violated(fam, format!("n = 5r (n = {n}, r = {r})")));
            }
            Ok(FamilyMember::Exponent(
                pow2(4 * r)? + pow2(3 * r)? + pow2(2 * r)? + pow2(r)? - 1,
            ))
        }
        Family::EkpBinomial { u } => {
            if n != 10 {
                return Err(violated(fam, format!("n = 10 (n = {n})")));
            }
            let ctx = FieldCtx::new(10)?;
            let admissible = ekp_admissible_u(&ctx)?;
            let u = match u {
                Some(u) => {
                    if admissible.binary_search(&u).is_err() {
                        return Err(violated(
                            fam,
                            format!("u in w*GF(2^5)* or w^2*GF(2^5)* (u = {u})"),
                        ));
                    }
                    u
                }
                None => admissible[0],
            };
            Ok(FamilyMember::Binomial(UniPoly::from_terms(
                ctx,
                [(3, FieldElement::ONE), (36, u)],
            )))
        }
        Family::Bcl { s, k } => {
            if n != 3 * k {
                return Err(violated(fam, format!("n = 3k (n = {n}, k = {k})")));
            }
            if k < 4 {
                return Err(violated(fam, format!("k >= 4 (k = {k})")));
            }
            if gcd(k as u64, 3) != 1 {
                return Err(violated(fam, format!("(k,3) = 1 (k = {k})")));
            }
            if s == 0 || gcd(s as u64, n as u64) != 1 {
                return Err(violated(fam, format!("(s,3k) = 1 (s = {s})")));
            }
            let ctx = FieldCtx::new(n)?;
            let i = (s * k) % 3;
            let m = 3 - i;
            let order = pow2(2 * k)? + pow2(k)? + 1;
            let w = ctx.element_of_order(order)?;
            let e1 = pow2(s)? + 1;
            let e2 = pow2(i * k)? + pow2(m * k + s)?;
            Ok(FamilyMember::Binomial(UniPoly::from_terms(
                ctx,
                [
                    (reduce_exponent(e1, &ctx), FieldElement::ONE),
                    (reduce_exponent(e2, &ctx), w),
                ],
            )))
        }
    }
}

/// `w * GF(2^5)* u w^2 * GF(2^5)*` inside GF(2^10), for any `w` of order 3
/// (the set does not depend on the choice), sorted.
pub fn ekp_admissible_u(ctx: &FieldCtx) -> Result<Vec<FieldElement>, DdtError> {
    if ctx.n() != 10 {
        return Err(violated(
            &Family::EkpBinomial { u: None },
            format!("n = 10 (n = {})", ctx.n()),
        ));
    }
    let w = ctx.element_of_order(3)?;
    let w2 = ctx.square(w);
    let sub = ctx.subfield_elements(5)?;
    let mut out: Vec<FieldElement> = sub
        .iter()
        .filter(|v| !v.is_zero())
        .flat_map(|&v| [ctx.mul(w, v), ctx.mul(w2, v)])
        .collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Outcome of the surface-containment scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prop1Report {
    pub holds: bool,
    /// First `(x, y, z)` in lexicographic order on the numerator surface but
    /// off `(x+y)(x+z)(y+z) = 0`.
    pub witness: Option<(FieldElement, FieldElement, FieldElement)>,
}

/// Checks that every rational zero of `f(x)+f(y)+f(z)+f(x+y+z)` lies on
/// `(x+y)(x+z)(y+z) = 0`, and that the answer matches [`is_apn`].
///
/// # Panics
/// If the scan and the differential spectrum disagree.
pub fn prop1_check(f: &UniPoly, ctx: &FieldCtx) -> Result<Prop1Report, DdtError> {
    prop1_check_with(f, ctx, Strategy::default())
}

pub fn prop1_check_with(
    f: &UniPoly,
    ctx: &FieldCtx,
    strategy: Strategy,
) -> Result<Prop1Report, DdtError> {
    check_ctx(f, ctx, SURFACE_LIMIT)?;
    let q = ctx.order() as usize;
    let v = value_table(f, strategy);
    let first_x = par::find_first(strategy, q, |x| {
        (0..q).any(|y| (0..q).any(|z| off_denominator_zero(&v, x, y, z)))
    });
    let witness = first_x.map(|x| {
        let (y, z) = (0..q)
            .flat_map(|y| (0..q).map(move |z| (y, z)))
            .find(|&(y, z)| off_denominator_zero(&v, x, y, z))
            .expect("row found by the scan");
        (
            FieldElement(x as u32),
            FieldElement(y as u32),
            FieldElement(z as u32),
        )
    });
    let report = Prop1Report {
        holds: witness.is_none(),
        witness,
    };
    let apn = diff_spectrum_with(f, ctx, strategy)?.is_apn();
    assert_eq!(
        report.holds, apn,
        "surface criterion and differential spectrum disagree for {f}"
    );
    Ok(report)
}

#[inline]
fn off_denominator_zero(v: &[u32], x: usize, y: usize, z: usize) -> bool {
    x != y && x != z && y != z && v[x] ^ v[y] ^ v[z] ^ v[x ^ y ^ z] == 0
}

/// `4((d - 3)q + 1)`: the point bound for an absolutely irreducible APN
/// surface of degree `d >= 5`.
pub fn corollary_bound(d: u64, q: u64) -> u64 {
    4 * ((d - 3) * q + 1)
}

/// Rational points of the projective closure of `phi = 0` in P^3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PointCount {
    pub affine: u64,
    pub at_infinity: u64,
    pub total: u64,
}

/// Counts rational points on the projective closure of `phi(f) = 0`: all
/// affine `(x, y, z)`, plus the zeros in P^2 of the top homogeneous part.
pub fn projective_point_count(f: &UniPoly, ctx: &FieldCtx) -> Result<PointCount, DdtError> {
    projective_point_count_with(f, ctx, Strategy::default())
}

pub fn projective_point_count_with(
    f: &UniPoly,
    ctx: &FieldCtx,
    strategy: Strategy,
) -> Result<PointCount, DdtError> {
    check_ctx(f, ctx, SURFACE_LIMIT)?;
    let d = f.degree().map_or(-1, i64::from);
    if d < 5 {
        return Err(DdtError::DegreeTooSmall(d));
    }
    let phi = build_phi(f);
    let q = ctx.order() as usize;
    let v = value_table(f, strategy);
    // Off D = 0 the numerator is D * phi with D invertible, so phi vanishes
    // iff the numerator does; on D = 0 evaluate phi itself.
    let per_x = par::map_range(strategy, q, |x| {
        let fx = FieldElement(x as u32);
        let mut count = 0u64;
        for y in 0..q {
            for z in 0..q {
                let zero = if x != y && x != z && y != z {
                    v[x] ^ v[y] ^ v[z] ^ v[x ^ y ^ z] == 0
                } else {
                    phi.eval(fx, FieldElement(y as u32), FieldElement(z as u32))
                        .is_zero()
                };
                count += zero as u64;
            }
        }
        count
    });
    let affine = per_x.iter().sum();
    let at_infinity = projective_plane_zeros(&phi.top_part(), strategy);
    Ok(PointCount {
        affine,
        at_infinity,
        total: affine + at_infinity,
    })
}

/// Zeros of a homogeneous polynomial in P^2, one representative per class
/// (first nonzero coordinate normalized to 1).
pub fn projective_plane_zeros(p: &TriPoly, strategy: Strategy) -> u64 {
    let ctx = *p.ctx();
    let q = ctx.order() as usize;
    let (zero, one) = (FieldElement::ZERO, FieldElement::ONE);
    // [1 : y : z]
    let lead: u64 = par::map_range(strategy, q, |y| {
        (0..q)
            .filter(|&z| p.eval(one, FieldElement(y as u32), FieldElement(z as u32)).is_zero())
            .count() as u64
    })
    .into_iter()
    .sum();
    // [0 : 1 : z] and [0 : 0 : 1]
    let mid = (0..q)
        .filter(|&z| p.eval(zero, one, FieldElement(z as u32)).is_zero())
        .count() as u64;
    let last = p.eval(zero, zero, one).is_zero() as u64;
    lead + mid + last
}

/// Direct count by evaluating `phi` at every affine point; the oracle for
/// [`projective_point_count`].
pub fn affine_point_count_direct(phi: &TriPoly) -> u64 {
    let ctx = *phi.ctx();
    let mut count = 0;
    for x in ctx.elements() {
        for y in ctx.elements() {
            for z in ctx.elements() {
                count += phi.eval(x, y, z).is_zero() as u64;
            }
        }
    }
    count
}
