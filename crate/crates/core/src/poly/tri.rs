use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use crate::error::PolyError;
use crate::field::{Embedding, FieldCtx, FieldElement};

use super::{submasks, DEGREE_CAP};

/// Exponent triple `x^x y^y z^z`. Ordered graded-lexicographically with
/// `x > y > z`, so the greatest key of a [`TriPoly`] is its leading term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { x: 0, y: 0, z: 0 };

    pub const fn new(x: u32, y: u32, z: u32) -> Self {
        Monomial { x, y, z }
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.x + self.y + self.z
    }

    #[inline]
    pub fn exps(&self) -> [u32; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn from_exps(e: [u32; 3]) -> Self {
        Monomial::new(e[0], e[1], e[2])
    }

    #[inline]
    fn times(self, o: Monomial) -> Monomial {
        Monomial::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    fn divides(&self, o: &Monomial) -> bool {
        self.x <= o.x && self.y <= o.y && self.z <= o.z
    }

    fn quotient(self, by: Monomial) -> Monomial {
        Monomial::new(self.x - by.x, self.y - by.y, self.z - by.z)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.x.cmp(&other.x))
            .then(self.y.cmp(&other.y))
            .then(self.z.cmp(&other.z))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, e) in [('x', self.x), ('y', self.y), ('z', self.z)] {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// One of the three variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X = 0,
    Y = 1,
    Z = 2,
}

/// The linear form `cx*x + cy*y + cz*z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinearForm {
    pub cx: FieldElement,
    pub cy: FieldElement,
    pub cz: FieldElement,
}

impl LinearForm {
    pub fn new(cx: FieldElement, cy: FieldElement, cz: FieldElement) -> Self {
        LinearForm { cx, cy, cz }
    }

    /// `x + y`, `x + z`, `y + z`: the factors of `D`, in division order.
    pub fn denominator_factors() -> [LinearForm; 3] {
        let (o, i) = (FieldElement::ZERO, FieldElement::ONE);
        [
            LinearForm::new(i, i, o),
            LinearForm::new(i, o, i),
            LinearForm::new(o, i, i),
        ]
    }

    fn coeffs(&self) -> [FieldElement; 3] {
        [self.cx, self.cy, self.cz]
    }

    /// First variable (in `x, y, z` order) with a nonzero coefficient.
    pub fn leading_var(&self) -> Option<Var> {
        [Var::X, Var::Y, Var::Z]
            .into_iter()
            .find(|&v| !self.coeffs()[v as usize].is_zero())
    }

    pub fn to_poly(&self, ctx: FieldCtx) -> TriPoly {
        let mut p = TriPoly::zero(ctx);
        p.add_term(Monomial::new(1, 0, 0), self.cx);
        p.add_term(Monomial::new(0, 1, 0), self.cy);
        p.add_term(Monomial::new(0, 0, 1), self.cz);
        p
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, c) in [("x", self.cx), ("y", self.cy), ("z", self.cz)] {
            match c.bits() {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{c}*{name}")),
            }
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join("+"))
        }
    }
}

/// Sparse polynomial in `x, y, z` over a [`FieldCtx`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriPoly {
    ctx: FieldCtx,
    terms: BTreeMap<Monomial, FieldElement>,
}

impl TriPoly {
    pub fn zero(ctx: FieldCtx) -> Self {
        TriPoly {
            ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: FieldCtx) -> Self {
        Self::constant(ctx, FieldElement::ONE)
    }

    pub fn constant(ctx: FieldCtx, c: FieldElement) -> Self {
        Self::term(ctx, c, Monomial::ONE)
    }

    pub fn term(ctx: FieldCtx, c: FieldElement, m: Monomial) -> Self {
        let mut p = Self::zero(ctx);
        p.add_term(m, c);
        p
    }

    pub fn var(ctx: FieldCtx, v: Var) -> Self {
        let mut e = [0; 3];
        e[v as usize] = 1;
        Self::term(ctx, FieldElement::ONE, Monomial::from_exps(e))
    }

    /// `D = (x+y)(x+z)(y+z)`.
    pub fn denominator(ctx: FieldCtx) -> Self {
        LinearForm::denominator_factors()
            .iter()
            .fold(Self::one(ctx), |acc, l| &acc * &l.to_poly(ctx))
    }

    pub fn from_terms(
        ctx: FieldCtx,
        terms: impl IntoIterator<Item = (Monomial, FieldElement)>,
    ) -> Self {
        let mut p = Self::zero(ctx);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    #[inline]
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &FieldElement)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Same as [`Self::is_zero`].
    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn coeff(&self, m: &Monomial) -> FieldElement {
        self.terms.get(m).copied().unwrap_or_default()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn leading(&self) -> Option<(Monomial, FieldElement)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, *c))
    }

    /// Adds `c * m` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        debug_assert!(self.ctx.contains(c));
        assert!(m.degree() <= DEGREE_CAP, "total degree cap exceeded");
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = *e.get() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn checked_add(&self, rhs: &TriPoly) -> Result<TriPoly, PolyError> {
        if self.ctx != rhs.ctx {
            return Err(PolyError::ContextMismatch);
        }
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, *c);
        }
        Ok(out)
    }

    /// Distributive product (`tri_mul`).
    pub fn checked_mul(&self, rhs: &TriPoly) -> Result<TriPoly, PolyError> {
        if self.ctx != rhs.ctx {
            return Err(PolyError::ContextMismatch);
        }
        let (small, large) = if self.len() <= rhs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut acc: std::collections::HashMap<Monomial, FieldElement> =
            std::collections::HashMap::with_capacity(large.len() * small.len().min(8));
        for (ma, ca) in &small.terms {
            for (mb, cb) in &large.terms {
                *acc.entry(ma.times(*mb)).or_default() += self.ctx.mul(*ca, *cb);
            }
        }
        Ok(TriPoly::from_terms(self.ctx, acc))
    }

    pub fn scale(&self, c: FieldElement) -> TriPoly {
        TriPoly::from_terms(
            self.ctx,
            self.terms.iter().map(|(m, a)| (*m, self.ctx.mul(*a, c))),
        )
    }

    /// Squaring is additive in characteristic 2: each term squares alone.
    pub fn square(&self) -> TriPoly {
        TriPoly::from_terms(
            self.ctx,
            self.terms.iter().map(|(m, c)| {
                (
                    Monomial::new(2 * m.x, 2 * m.y, 2 * m.z),
                    self.ctx.square(*c),
                )
            }),
        )
    }

    pub fn pow(&self, mut e: u32) -> TriPoly {
        let mut base = self.clone();
        let mut acc = TriPoly::one(self.ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Sparse evaluation (`tri_eval`); arguments must lie in this context.
    pub fn eval(&self, x: FieldElement, y: FieldElement, z: FieldElement) -> FieldElement {
        let k = &self.ctx;
        let mut acc = FieldElement::ZERO;
        // Terms are grouped by x-exponent within each degree, so caching the
        // last power of each variable saves most exponentiations.
        let mut cache = [(u32::MAX, FieldElement::ZERO); 3];
        let args = [x, y, z];
        for (m, c) in &self.terms {
            let mut t = *c;
            for (i, e) in m.exps().into_iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if cache[i].0 != e {
                    cache[i] = (e, k.pow(args[i], e as u64));
                }
                t = k.mul(t, cache[i].1);
            }
            acc += t;
        }
        acc
    }

    /// Evaluation at points of an extension field, through an embedding of
    /// this polynomial's field.
    pub fn eval_in(
        &self,
        emb: &Embedding,
        x: FieldElement,
        y: FieldElement,
        z: FieldElement,
    ) -> Result<FieldElement, PolyError> {
        if emb.source() != &self.ctx {
            return Err(PolyError::ContextMismatch);
        }
        Ok(self.embed(emb).eval(x, y, z))
    }

    /// Image of this polynomial under a field embedding.
    pub fn embed(&self, emb: &Embedding) -> TriPoly {
        TriPoly::from_terms(
            *emb.target(),
            self.terms.iter().map(|(m, c)| (*m, emb.map(*c))),
        )
    }

    /// Same polynomial with its coefficients reread in another context.
    /// Only valid when every coefficient lies in GF(2).
    pub fn reinterpret_binary(&self, ctx: FieldCtx) -> Option<TriPoly> {
        self.terms
            .values()
            .all(|c| *c == FieldElement::ONE)
            .then(|| TriPoly {
                ctx,
                terms: self.terms.clone(),
            })
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Partition by total degree (`homogeneous_parts`).
    pub fn homogeneous_parts(&self) -> BTreeMap<u32, TriPoly> {
        let mut out: BTreeMap<u32, TriPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| TriPoly::zero(self.ctx))
                .terms
                .insert(*m, *c);
        }
        out
    }

    /// Highest-degree homogeneous part.
    pub fn top_part(&self) -> TriPoly {
        match self.total_degree() {
            None => self.clone(),
            Some(d) => TriPoly::from_terms(
                self.ctx,
                self.terms
                    .iter()
                    .filter(|(m, _)| m.degree() == d)
                    .map(|(m, c)| (*m, *c)),
            ),
        }
    }

    /// `p(x+1, y+1, 1)`, a polynomial in `x, y` only.
    pub fn shift_xy(&self) -> TriPoly {
        let mut out = TriPoly::zero(self.ctx);
        for (m, c) in &self.terms {
            for i in submasks(m.x) {
                for j in submasks(m.y) {
                    out.add_term(Monomial::new(i, j, 0), *c);
                }
            }
        }
        out
    }

    /// Permutes variables: variable `i` of the result is variable `perm[i]`
    /// of `self`, i.e. `result(x0, x1, x2) = self` with `x_perm[i] -> x_i`.
    pub fn permute(&self, perm: [Var; 3]) -> TriPoly {
        TriPoly::from_terms(
            self.ctx,
            self.terms.iter().map(|(m, c)| {
                let e = m.exps();
                let mut out = [0; 3];
                for (i, v) in perm.iter().enumerate() {
                    out[i] = e[*v as usize];
                }
                (Monomial::from_exps(out), *c)
            }),
        )
    }

    /// Substitutes `v := a*u + b*w`, where `u, w` are the other two
    /// variables in `x, y, z` order. The result does not involve `v`.
    pub fn substitute_linear(&self, v: Var, a: FieldElement, b: FieldElement) -> TriPoly {
        let k = self.ctx;
        let (u, w) = others(v);
        let mut out = TriPoly::zero(k);
        for (m, c) in &self.terms {
            let e = m.exps();
            let ev = e[v as usize];
            for i in submasks(ev) {
                let coef = k.mul(
                    *c,
                    k.mul(k.pow(a, i as u64), k.pow(b, (ev - i) as u64)),
                );
                let mut ne = e;
                ne[v as usize] = 0;
                ne[u as usize] += i;
                ne[w as usize] += ev - i;
                out.add_term(Monomial::from_exps(ne), coef);
            }
        }
        out
    }

    /// The residue of `self` on the plane `form = 0`: the form's leading
    /// variable is eliminated. Zero iff the form divides `self`.
    pub fn restrict_to_plane(&self, form: &LinearForm) -> Result<TriPoly, PolyError> {
        let k = self.ctx;
        let v = form.leading_var().ok_or(PolyError::ZeroForm)?;
        let c = form.coeffs();
        let inv = k.inv(c[v as usize]).expect("leading coefficient is nonzero");
        let (u, w) = others(v);
        Ok(self.substitute_linear(v, k.mul(c[u as usize], inv), k.mul(c[w as usize], inv)))
    }

    /// Exact division by a linear form (`exact_div_linear`): synthetic
    /// division in the lexicographic order led by the form's leading
    /// variable, after a substitution pre-check that supplies the witness
    /// on failure.
    pub fn exact_div_linear(&self, form: &LinearForm) -> Result<TriPoly, PolyError> {
        let residue = self.restrict_to_plane(form)?;
        if !residue.is_zero() {
            return Err(PolyError::NotDivisible {
                form: form.to_string(),
                witness: abbreviate(&residue.to_string()),
            });
        }
        let k = self.ctx;
        let v = form.leading_var().ok_or(PolyError::ZeroForm)?;
        let (u, w) = others(v);
        let order = [v as usize, u as usize, w as usize];
        let c = form.coeffs();
        let lead_inv = k.inv(c[v as usize]).expect("leading coefficient is nonzero");

        let key = |m: &Monomial| {
            let e = m.exps();
            [e[order[0]], e[order[1]], e[order[2]]]
        };
        let unkey = |e: [u32; 3]| {
            let mut out = [0; 3];
            for (slot, &var) in order.iter().enumerate() {
                out[var] = e[slot];
            }
            Monomial::from_exps(out)
        };

        let mut work: BTreeMap<[u32; 3], FieldElement> =
            self.terms.iter().map(|(m, c)| (key(m), *c)).collect();
        let mut quotient = TriPoly::zero(k);
        while let Some((e, coef)) = work.pop_last() {
            if e[0] == 0 {
                return Err(PolyError::NotDivisible {
                    form: form.to_string(),
                    witness: format!("remainder term {}", unkey(e)),
                });
            }
            let qc = k.mul(coef, lead_inv);
            let qe = [e[0] - 1, e[1], e[2]];
            quotient.add_term(unkey(qe), qc);
            for (slot, var) in [(1usize, u), (2usize, w)] {
                let cv = c[var as usize];
                if cv.is_zero() {
                    continue;
                }
                let mut ne = qe;
                ne[slot] += 1;
                let add = k.mul(qc, cv);
                let entry = work.entry(ne).or_default();
                *entry += add;
                if entry.is_zero() {
                    work.remove(&ne);
                }
            }
        }
        Ok(quotient)
    }

    /// Division with remainder by a single polynomial in graded-lex order.
    /// The remainder is zero exactly when `divisor` divides `self`.
    pub fn div_rem(&self, divisor: &TriPoly) -> Result<(TriPoly, TriPoly), PolyError> {
        if self.ctx != divisor.ctx {
            return Err(PolyError::ContextMismatch);
        }
        let k = self.ctx;
        let (lm, lc) = divisor.leading().ok_or(PolyError::ZeroForm)?;
        let lc_inv = k.inv(lc).expect("nonzero");
        let tail: Vec<(Monomial, FieldElement)> = divisor
            .terms
            .iter()
            .filter(|(m, _)| **m != lm)
            .map(|(m, c)| (*m, *c))
            .collect();
        let mut work = self.terms.clone();
        let mut quotient = TriPoly::zero(k);
        let mut remainder = TriPoly::zero(k);
        while let Some((m, c)) = work.pop_last() {
            if lm.divides(&m) {
                let t = m.quotient(lm);
                let tc = k.mul(c, lc_inv);
                quotient.add_term(t, tc);
                for (dm, dc) in &tail {
                    let nm = t.times(*dm);
                    let entry = work.entry(nm).or_default();
                    *entry += k.mul(tc, *dc);
                    if entry.is_zero() {
                        work.remove(&nm);
                    }
                }
            } else {
                remainder.add_term(m, c);
            }
        }
        Ok((quotient, remainder))
    }

    /// Sum of polynomials (the inverse of [`TriPoly::homogeneous_parts`]).
    pub fn sum<'a>(ctx: FieldCtx, parts: impl IntoIterator<Item = &'a TriPoly>) -> TriPoly {
        let mut out = TriPoly::zero(ctx);
        for p in parts {
            for (m, c) in &p.terms {
                out.add_term(*m, *c);
            }
        }
        out
    }
}

fn others(v: Var) -> (Var, Var) {
    match v {
        Var::X => (Var::Y, Var::Z),
        Var::Y => (Var::X, Var::Z),
        Var::Z => (Var::X, Var::Y),
    }
}

fn abbreviate(s: &str) -> String {
    const LIMIT: usize = 96;
    if s.len() <= LIMIT {
        s.to_string()
    } else {
        format!("{}...", &s[..LIMIT])
    }
}

impl Add for &TriPoly {
    type Output = TriPoly;

    /// # Panics
    /// If the operands live over different fields.
    fn add(self, rhs: &TriPoly) -> TriPoly {
        self.checked_add(rhs).expect("TriPoly addition across fields")
    }
}

impl Mul for &TriPoly {
    type Output = TriPoly;

    /// # Panics
    /// If the operands live over different fields.
    fn mul(self, rhs: &TriPoly) -> TriPoly {
        self.checked_mul(rhs)
            .expect("TriPoly multiplication across fields")
    }
}

/// Graded-lex rendering, leading term first, e.g. `x^2+x*y+0x3*z`.
impl fmt::Display for TriPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if *m == Monomial::ONE {
                if *c == FieldElement::ONE {
                    f.write_str("1")?;
                } else {
                    write!(f, "{c}")?;
                }
            } else if *c == FieldElement::ONE {
                write!(f, "{m}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}
