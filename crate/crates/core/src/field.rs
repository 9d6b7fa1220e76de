//! Arithmetic in GF(2^n) for 1 <= n <= 24.
//!
//! Elements are bit vectors: bit `i` is the coefficient of `x^i` in the
//! residue modulo the field's defining polynomial. A [`FieldCtx`] is a small
//! `Copy` value; every element operation is interpreted relative to one.

use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::FieldError;

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 24;

/// Lexicographically smallest irreducible polynomial of each degree
/// `1..=24` with nonzero constant term, as the full `n + 1` bit pattern.
const DEFAULT_MODULI: [u32; MAX_DEGREE as usize] = [
    0x3, 0x7, 0xb, 0x13, 0x25, 0x43, 0x83, 0x11b, 0x203, 0x409, 0x805, 0x1009, 0x201b, 0x4021,
    0x8003, 0x1002b, 0x20009, 0x40009, 0x80027, 0x100009, 0x200005, 0x400003, 0x800021,
    0x100001b,
];

/// Returns the shipped default modulus for degree `n`, after it has passed
/// the irreducibility test once for the whole table.
pub fn default_modulus(n: u32) -> Result<u32, FieldError> {
    if n == 0 || n > MAX_DEGREE {
        return Err(FieldError::DegreeOutOfRange(n));
    }
    static VERIFIED: OnceLock<()> = OnceLock::new();
    VERIFIED.get_or_init(|| {
        for (i, &m) in DEFAULT_MODULI.iter().enumerate() {
            assert!(
                gf2x::is_irreducible(m as u64),
                "default modulus for n = {} is reducible: {m:#x}",
                i + 1
            );
        }
    });
    Ok(DEFAULT_MODULI[(n - 1) as usize])
}

/// An element of GF(2^n), context-relative.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

// Characteristic 2: addition is XOR.
#[allow(clippy::suspicious_arithmetic_impl)]
impl Add for FieldElement {
    type Output = FieldElement;
    #[inline]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

#[allow(clippy::suspicious_op_assign_impl)]
impl AddAssign for FieldElement {
    #[inline]
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

impl FromStr for FieldElement {
    type Err = FieldError;

    /// Parses a `0x`-prefixed hex literal. Range is not checked here; use
    /// [`FieldCtx::element`] for that.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_hex(s).map(FieldElement)
    }
}

pub(crate) fn parse_hex(s: &str) -> Result<u32, FieldError> {
    let t = s.trim();
    let digits = t
        .strip_prefix("0x")
        .or_else(|| t.strip_prefix("0X"))
        .ok_or_else(|| FieldError::BadHex(s.to_string()))?;
    u32::from_str_radix(digits, 16).map_err(|_| FieldError::BadHex(s.to_string()))
}

/// Description of GF(2^n): extension degree and reduction modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldCtx {
    n: u32,
    modulus: u32,
}

impl FieldCtx {
    /// Field with the default modulus for degree `n`.
    pub fn new(n: u32) -> Result<Self, FieldError> {
        let modulus = default_modulus(n)?;
        Ok(FieldCtx { n, modulus })
    }

    /// Field with an explicit modulus (full `n + 1` bit pattern).
    pub fn with_modulus(n: u32, modulus: u32) -> Result<Self, FieldError> {
        if n == 0 || n > MAX_DEGREE {
            return Err(FieldError::DegreeOutOfRange(n));
        }
        let degree = 31 - modulus.leading_zeros();
        if modulus == 0 || degree != n {
            return Err(FieldError::ModulusDegree {
                expected: n,
                modulus,
            });
        }
        if modulus & 1 == 0 || !gf2x::is_irreducible(modulus as u64) {
            return Err(FieldError::Reducible(modulus));
        }
        Ok(FieldCtx { n, modulus })
    }

    /// `create_field`: default modulus unless one is supplied.
    pub fn create(n: u32, modulus: Option<u32>) -> Result<Self, FieldError> {
        match modulus {
            Some(m) => Self::with_modulus(n, m),
            None => Self::new(n),
        }
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Field order `q = 2^n`.
    #[inline]
    pub fn order(&self) -> u64 {
        1u64 << self.n
    }

    #[inline]
    fn mask(&self) -> u32 {
        ((1u64 << self.n) - 1) as u32
    }

    /// Checked conversion of a raw bit pattern.
    pub fn element(&self, bits: u32) -> Result<FieldElement, FieldError> {
        if bits & !self.mask() != 0 {
            return Err(FieldError::NotInField { bits, n: self.n });
        }
        Ok(FieldElement(bits))
    }

    pub fn parse_element(&self, s: &str) -> Result<FieldElement, FieldError> {
        self.element(parse_hex(s)?)
    }

    #[inline]
    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 & !self.mask() == 0
    }

    /// The class of `x`; equals 1 in GF(2).
    pub fn generator_x(&self) -> FieldElement {
        if self.n == 1 {
            FieldElement::ONE
        } else {
            FieldElement(2)
        }
    }

    /// All `2^n` elements in bit-pattern order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.mask()).chain(std::iter::once(self.mask())).map(FieldElement)
    }

    /// Carry-less product reduced by the modulus.
    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let mut prod = gf2x::clmul(a.0 as u64, b.0 as u64);
        let m = self.modulus as u64;
        while prod >> self.n != 0 {
            let top = 63 - prod.leading_zeros();
            prod ^= m << (top - self.n);
        }
        FieldElement(prod as u32)
    }

    #[inline]
    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    /// Square-and-multiply; `pow(0, 0) = 1` so that monomials evaluate
    /// consistently at zero.
    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }

    /// `a^(2^k)`, the k-th Frobenius image.
    pub fn frobenius(&self, a: FieldElement, k: u32) -> FieldElement {
        (0..k % self.n).fold(a, |acc, _| self.mul(acc, acc))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroElement("inverse"));
        }
        Ok(self.pow(a, self.order() - 2))
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: FieldElement) -> Result<u64, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroElement("element order"));
        }
        let group = self.order() - 1;
        let mut t = group;
        for p in prime_factors(group) {
            while t.is_multiple_of(p) && self.pow(a, t / p) == FieldElement::ONE {
                t /= p;
            }
        }
        Ok(t)
    }

    /// Some element of exactly the given order, found deterministically by
    /// scanning candidates in bit order. `order` must divide `2^n - 1`.
    pub fn element_of_order(&self, order: u64) -> Result<FieldElement, FieldError> {
        let group = self.order() - 1;
        if order == 0 || !group.is_multiple_of(order) {
            return Err(FieldError::NoSuchOrder { order, n: self.n });
        }
        let cofactor = group / order;
        for g in self.elements().skip(1) {
            let h = self.pow(g, cofactor);
            if self.element_order(h)? == order {
                return Ok(h);
            }
        }
        Err(FieldError::NoSuchOrder { order, n: self.n })
    }

    /// The subfield GF(2^k), as the `2^k` fixed points of `a -> a^(2^k)`,
    /// sorted by bit pattern.
    pub fn subfield_elements(&self, k: u32) -> Result<Vec<FieldElement>, FieldError> {
        if k == 0 || !self.n.is_multiple_of(k) {
            return Err(FieldError::NotASubfield { k, n: self.n });
        }
        if k == self.n {
            return Ok(self.elements().collect());
        }
        let size = 1u64 << k;
        let gen = self.element_of_order(size - 1)?;
        let mut out = Vec::with_capacity(size as usize);
        out.push(FieldElement::ZERO);
        let mut cur = FieldElement::ONE;
        for _ in 0..size - 1 {
            out.push(cur);
            cur = self.mul(cur, gen);
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Homomorphic embedding of this field into `big`, sending `x` to the
    /// smallest root (by bit pattern) of this field's modulus in `big`.
    pub fn embedding_into(&self, big: &FieldCtx) -> Result<Embedding, FieldError> {
        if !big.n.is_multiple_of(self.n) {
            return Err(FieldError::NotASubfield {
                k: self.n,
                n: big.n,
            });
        }
        if self == big {
            return Ok(Embedding::identity(*self));
        }
        let candidates = big.subfield_elements(self.n)?;
        let root = candidates
            .into_iter()
            .find(|&r| {
                // Horner on the modulus bits, highest first.
                let mut acc = FieldElement::ZERO;
                for i in (0..=self.n).rev() {
                    acc = big.mul(acc, r);
                    if self.modulus >> i & 1 == 1 {
                        acc += FieldElement::ONE;
                    }
                }
                acc.is_zero()
            })
            .ok_or(FieldError::NotASubfield {
                k: self.n,
                n: big.n,
            })?;
        let mut basis = Vec::with_capacity(self.n as usize);
        let mut cur = FieldElement::ONE;
        for _ in 0..self.n {
            basis.push(cur);
            cur = big.mul(cur, root);
        }
        Ok(Embedding {
            small: *self,
            big: *big,
            basis,
        })
    }
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod {:#x}", self.n, self.modulus)
    }
}

/// A field embedding GF(2^k) -> GF(2^K), linear over GF(2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    small: FieldCtx,
    big: FieldCtx,
    basis: Vec<FieldElement>,
}

impl Embedding {
    fn identity(ctx: FieldCtx) -> Self {
        let basis = (0..ctx.n).map(|i| FieldElement(1 << i)).collect();
        Embedding {
            small: ctx,
            big: ctx,
            basis,
        }
    }

    pub fn source(&self) -> &FieldCtx {
        &self.small
    }

    pub fn target(&self) -> &FieldCtx {
        &self.big
    }

    pub fn map(&self, a: FieldElement) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        for (i, b) in self.basis.iter().enumerate() {
            if a.0 >> i & 1 == 1 {
                acc += *b;
            }
        }
        acc
    }
}

/// Distinct prime factors of `m`, ascending.
pub fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            out.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Polynomials over GF(2) packed into a `u64`, for moduli of degree <= 24.
pub(crate) mod gf2x {
    #[inline]
    pub fn degree(a: u64) -> i32 {
        63 - a.leading_zeros() as i32
    }

    #[inline]
    pub fn clmul(a: u64, b: u64) -> u64 {
        let mut acc = 0u64;
        let mut a = a;
        let mut b = b;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            a <<= 1;
            b >>= 1;
        }
        acc
    }

    pub fn rem(mut a: u64, m: u64) -> u64 {
        let dm = degree(m);
        while a != 0 && degree(a) >= dm {
            a ^= m << (degree(a) - dm);
        }
        a
    }

    pub fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            (a, b) = (b, rem(a, b));
        }
        a
    }

    fn mulmod(a: u64, b: u64, m: u64) -> u64 {
        rem(clmul(a, b), m)
    }

    /// `x^(2^e) mod m`.
    fn x_pow_pow2(e: u32, m: u64) -> u64 {
        let mut acc = rem(0b10, m);
        for _ in 0..e {
            acc = mulmod(acc, acc, m);
        }
        acc
    }

    /// Rabin's test: `x^(2^n) = x mod m` and `gcd(x^(2^(n/p)) - x, m) = 1`
    /// for every prime `p | n`.
    pub fn is_irreducible(m: u64) -> bool {
        let n = degree(m);
        if n < 1 {
            return false;
        }
        let n = n as u32;
        let x = rem(0b10, m);
        if x_pow_pow2(n, m) != x {
            return false;
        }
        super::prime_factors(n as u64).into_iter().all(|p| {
            let t = x_pow_pow2(n / p as u32, m) ^ x;
            gcd(m, t) == 1
        })
    }
}
