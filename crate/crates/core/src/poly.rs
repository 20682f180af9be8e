//! Univariate polynomials over `F_q` and the factorization statistics built
//! on them: squarefree decomposition, distinct-degree profiles, resultants
//! and discriminants.
//!
//! Coefficients are stored low to high with no trailing zeros. Only factor
//! degrees are ever computed; no equal-degree splitting is done.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::splitting::SplittingType;

type Coeffs = Vec<FieldElement>;

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: FieldSpec,
    coeffs: Coeffs,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{:?}](", self.field)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl Poly {
    pub fn new(field: &FieldSpec, mut coeffs: Vec<FieldElement>) -> Self {
        trim(&mut coeffs);
        Poly { field: field.clone(), coeffs }
    }

    /// Coefficients given as canonical element indices, low to high.
    pub fn from_indices(field: &FieldSpec, indices: &[u32]) -> Result<Self> {
        let coeffs = indices
            .iter()
            .map(|&i| field.element(i as u64))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(field, coeffs))
    }

    /// Integer coefficients reduced into the prime subfield, low to high.
    pub fn from_ints(field: &FieldSpec, ints: &[i64]) -> Self {
        Self::new(field, ints.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn zero(field: &FieldSpec) -> Self {
        Self::new(field, vec![])
    }

    pub fn one(field: &FieldSpec) -> Self {
        Self::new(field, vec![FieldElement::ONE])
    }

    pub fn constant(field: &FieldSpec, c: FieldElement) -> Self {
        Self::new(field, vec![c])
    }

    /// `c * x^d`.
    pub fn monomial(field: &FieldSpec, c: FieldElement, d: usize) -> Self {
        let mut v = vec![FieldElement::ZERO; d + 1];
        v[d] = c;
        Self::new(field, v)
    }

    pub fn x(field: &FieldSpec) -> Self {
        Self::monomial(field, FieldElement::ONE, 1)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<FieldElement> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(FieldElement::ONE)
    }

    pub fn eval(&self, a: FieldElement) -> FieldElement {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElement::ZERO, |acc, &c| f.add(f.mul(acc, a), c))
    }

    fn check_same(&self, other: &Poly) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn wrap(&self, coeffs: Coeffs) -> Poly {
        Poly::new(&self.field, coeffs)
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.check_same(other)?;
        Ok(self.wrap(add(&self.field, &self.coeffs, &other.coeffs)))
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.check_same(other)?;
        Ok(self.wrap(sub(&self.field, &self.coeffs, &other.coeffs)))
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.check_same(other)?;
        Ok(self.wrap(mul(&self.field, &self.coeffs, &other.coeffs)))
    }

    pub fn div_rem(&self, other: &Poly) -> Result<(Poly, Poly)> {
        self.check_same(other)?;
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (q, r) = div_rem(&self.field, &self.coeffs, &other.coeffs);
        Ok((self.wrap(q), self.wrap(r)))
    }

    pub fn rem(&self, other: &Poly) -> Result<Poly> {
        Ok(self.div_rem(other)?.1)
    }

    /// Monic gcd; `gcd(0, 0)` is rejected.
    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        self.check_same(other)?;
        if self.is_zero() && other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.wrap(gcd(&self.field, &self.coeffs, &other.coeffs)))
    }

    /// Formal derivative; the coefficient `i * c_i` uses `i mod p`.
    pub fn derivative(&self) -> Poly {
        self.wrap(derivative(&self.field, &self.coeffs))
    }

    /// `x^m mod self`.
    pub fn x_pow_mod(&self, m: u128) -> Result<Poly> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let x = vec![FieldElement::ZERO, FieldElement::ONE];
        let base = div_rem(&self.field, &x, &self.coeffs).1;
        Ok(self.wrap(powmod(&self.field, &base, m, &self.coeffs)))
    }

    fn check_monic_nonconstant(&self) -> Result<()> {
        match self.degree() {
            None | Some(0) if !self.is_monic() && !self.is_zero() => Err(Error::NotMonic),
            None | Some(0) => Err(Error::Constant),
            _ if !self.is_monic() => Err(Error::NotMonic),
            _ => Ok(()),
        }
    }

    /// Pairs `(Q_j, m_j)` with `Q_j` monic squarefree and pairwise coprime
    /// such that `self = prod Q_j^{m_j}`, ordered by multiplicity.
    pub fn squarefree_decomposition(&self) -> Result<Vec<(Poly, u32)>> {
        self.check_monic_nonconstant()?;
        let mut parts = squarefree(&self.field, &self.coeffs);
        parts.sort_by_key(|(_, m)| *m);
        Ok(parts.into_iter().map(|(c, m)| (self.wrap(c), m)).collect())
    }

    /// Degrees of irreducible factors counted with multiplicity.
    pub fn splitting_type(&self) -> Result<SplittingType> {
        self.check_monic_nonconstant()?;
        Ok(splitting_type_of(&self.field, &self.coeffs))
    }

    /// Irreducibility; uses the discriminant character for quadratics over odd `q`.
    pub fn is_irreducible(&self) -> Result<bool> {
        self.check_monic_nonconstant()?;
        if self.coeffs.len() == 3 && self.field.is_odd() {
            return Ok(quadratic_type(&self.field, self.coeffs[1], self.coeffs[0]) == -1);
        }
        Ok(is_irreducible_raw(&self.field, &self.coeffs))
    }

    /// Irreducibility without the quadratic shortcut.
    pub fn is_irreducible_general(&self) -> Result<bool> {
        self.check_monic_nonconstant()?;
        Ok(is_irreducible_raw(&self.field, &self.coeffs))
    }

    /// `disc P = (-1)^{n(n-1)/2} Res(P, P')`, resultant by the Euclidean recurrence.
    pub fn discriminant(&self) -> Result<FieldElement> {
        self.check_discriminant_input()?;
        let r = resultant(&self.field, &self.coeffs, &derivative(&self.field, &self.coeffs));
        Ok(self.disc_sign(r))
    }

    /// Same as [`Poly::discriminant`] with the resultant taken as a Sylvester determinant.
    pub fn discriminant_sylvester(&self) -> Result<FieldElement> {
        self.check_discriminant_input()?;
        let n = self.coeffs.len() - 1;
        let mut dp = derivative(&self.field, &self.coeffs);
        // Formal degree n - 1 for P'; exact for monic P.
        dp.resize(n, FieldElement::ZERO);
        let r = sylvester_resultant(&self.field, &self.coeffs, &dp);
        Ok(self.disc_sign(r))
    }

    fn check_discriminant_input(&self) -> Result<()> {
        if !self.is_monic() {
            return Err(if self.is_zero() { Error::DegreeTooSmall(2) } else { Error::NotMonic });
        }
        if self.coeffs.len() < 3 {
            return Err(Error::DegreeTooSmall(2));
        }
        Ok(())
    }

    fn disc_sign(&self, r: FieldElement) -> FieldElement {
        let n = self.coeffs.len() - 1;
        if (n * (n - 1) / 2) % 2 == 1 {
            self.field.neg(r)
        } else {
            r
        }
    }

    /// Checks `chi(disc P) = (-1)^{n - r}` where `r` counts irreducible factors.
    pub fn stickelberger_check(&self) -> Result<bool> {
        if !self.field.is_odd() {
            return Err(Error::EvenCharacteristic);
        }
        let disc = self.discriminant()?;
        if disc.is_zero() {
            return Err(Error::NotSquarefree);
        }
        let n = self.coeffs.len() - 1;
        let r = self.splitting_type()?.parts() as usize;
        let expected = if (n - r).is_multiple_of(2) { 1 } else { -1 };
        Ok(self.field.qchar(disc)? == expected)
    }
}

/// Resultant of two nonzero polynomials by the Euclidean recurrence.
pub fn resultant_of(a: &Poly, b: &Poly) -> Result<FieldElement> {
    a.check_same(b)?;
    if a.is_zero() || b.is_zero() {
        return Ok(FieldElement::ZERO);
    }
    Ok(resultant(&a.field, &a.coeffs, &b.coeffs))
}

/// Resultant of two nonzero polynomials as the Sylvester determinant.
pub fn resultant_sylvester_of(a: &Poly, b: &Poly) -> Result<FieldElement> {
    a.check_same(b)?;
    if a.is_zero() || b.is_zero() {
        return Ok(FieldElement::ZERO);
    }
    Ok(sylvester_resultant(&a.field, &a.coeffs, &b.coeffs))
}

/// Number of monic irreducibles of degree `n` over `F_q`: `(1/n) sum_{d|n} mu(d) q^{n/d}`.
pub fn count_irreducible(n: u32, field: &FieldSpec) -> Result<u128> {
    count_irreducible_q(n, field.q() as u64)
}

pub fn count_irreducible_q(n: u32, q: u64) -> Result<u128> {
    if n == 0 {
        return Err(Error::DegreeTooSmall(1));
    }
    let overflow = || Error::Overflow(q, n as u64);
    let mut acc: i128 = 0;
    for d in 1..=n {
        if !n.is_multiple_of(d) {
            continue;
        }
        let mu = crate::arith::mobius(d as u64) as i128;
        if mu == 0 {
            continue;
        }
        let term = (q as i128).checked_pow(n / d).ok_or_else(overflow)?;
        acc = acc.checked_add(mu * term).ok_or_else(overflow)?;
    }
    debug_assert!(acc % n as i128 == 0);
    Ok((acc / n as i128) as u128)
}

// ---------------------------------------------------------------------------
// Coefficient-vector kernels. Inputs are trimmed unless noted.

#[inline]
fn trim(v: &mut Coeffs) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn add(f: &FieldSpec, a: &[FieldElement], b: &[FieldElement]) -> Coeffs {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, &s) in out.iter_mut().zip(short) {
        *o = f.add(*o, s);
    }
    trim(&mut out);
    out
}

fn sub(f: &FieldSpec, a: &[FieldElement], b: &[FieldElement]) -> Coeffs {
    let mut out = a.to_vec();
    if b.len() > out.len() {
        out.resize(b.len(), FieldElement::ZERO);
    }
    for (o, &s) in out.iter_mut().zip(b) {
        *o = f.sub(*o, s);
    }
    trim(&mut out);
    out
}

fn mul(f: &FieldSpec, a: &[FieldElement], b: &[FieldElement]) -> Coeffs {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![FieldElement::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

/// Reduces `a` modulo the nonzero `m` in place.
fn rem_in_place(f: &FieldSpec, a: &mut Coeffs, m: &[FieldElement]) {
    let dm = m.len() - 1;
    let lead = m[dm];
    let inv = if lead == FieldElement::ONE { lead } else { f.inv(lead).expect("nonzero leading coefficient") };
    while a.len() > dm {
        let top = a.len() - 1;
        let c = f.mul(a[top], inv);
        if !c.is_zero() {
            let shift = top - dm;
            for (i, &mi) in m.iter().enumerate().take(dm) {
                a[shift + i] = f.sub(a[shift + i], f.mul(c, mi));
            }
        }
        a.pop();
    }
    trim(a);
}

fn div_rem(f: &FieldSpec, a: &[FieldElement], m: &[FieldElement]) -> (Coeffs, Coeffs) {
    let dm = m.len() - 1;
    if a.len() <= dm {
        return (vec![], a.to_vec());
    }
    let inv = f.inv(m[dm]).expect("nonzero leading coefficient");
    let mut r = a.to_vec();
    let mut q = vec![FieldElement::ZERO; a.len() - dm];
    while r.len() > dm {
        let top = r.len() - 1;
        let c = f.mul(r[top], inv);
        let shift = top - dm;
        q[shift] = c;
        if !c.is_zero() {
            for (i, &mi) in m.iter().enumerate().take(dm) {
                r[shift + i] = f.sub(r[shift + i], f.mul(c, mi));
            }
        }
        r.pop();
    }
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

fn make_monic(f: &FieldSpec, a: &mut Coeffs) {
    if let Some(&lead) = a.last() {
        if lead != FieldElement::ONE {
            let inv = f.inv(lead).expect("nonzero leading coefficient");
            for c in a.iter_mut() {
                *c = f.mul(*c, inv);
            }
        }
    }
}

fn gcd(f: &FieldSpec, a: &[FieldElement], b: &[FieldElement]) -> Coeffs {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    while !y.is_empty() {
        rem_in_place(f, &mut x, &y);
        std::mem::swap(&mut x, &mut y);
    }
    make_monic(f, &mut x);
    x
}

fn derivative(f: &FieldSpec, a: &[FieldElement]) -> Coeffs {
    let mut out: Coeffs = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| f.mul(f.from_int(i as i64), c))
        .collect();
    trim(&mut out);
    out
}

fn mulmod(f: &FieldSpec, a: &[FieldElement], b: &[FieldElement], m: &[FieldElement]) -> Coeffs {
    let mut prod = mul(f, a, b);
    rem_in_place(f, &mut prod, m);
    prod
}

/// `base^e mod m` with `base` already reduced.
fn powmod(f: &FieldSpec, base: &[FieldElement], mut e: u128, m: &[FieldElement]) -> Coeffs {
    let mut acc = vec![FieldElement::ONE];
    rem_in_place(f, &mut acc, m);
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(f, &acc, &b, m);
        }
        e >>= 1;
        if e > 0 {
            b = mulmod(f, &b, &b, m);
        }
    }
    acc
}

fn is_one(a: &[FieldElement]) -> bool {
    a.len() == 1 && a[0] == FieldElement::ONE
}

/// Squarefree factorization of a monic nonconstant polynomial, including the
/// characteristic-`p` branch where the remaining cofactor is a `p`-th power.
fn squarefree(f: &FieldSpec, a: &[FieldElement]) -> Vec<(Coeffs, u32)> {
    let mut out = Vec::new();
    let da = derivative(f, a);
    let mut c = if da.is_empty() { a.to_vec() } else { gcd(f, a, &da) };
    let mut w = div_rem(f, a, &c).0;
    let mut i = 1u32;
    while !is_one(&w) {
        let y = gcd(f, &w, &c);
        let z = div_rem(f, &w, &y).0;
        if !is_one(&z) {
            out.push((z, i));
        }
        i += 1;
        c = div_rem(f, &c, &y).0;
        w = y;
    }
    if !is_one(&c) {
        // c(x) = R(x^p); take p-th roots of the coefficients.
        let p = f.p() as usize;
        let root: Coeffs = c.iter().step_by(p).map(|&x| f.pth_root(x)).collect();
        for (g, m) in squarefree(f, &root) {
            out.push((g, m * f.p()));
        }
    }
    out
}

/// Distinct-degree profile of a monic squarefree polynomial: `(degree, count)` pairs.
fn distinct_degree_profile(f: &FieldSpec, a: &[FieldElement], mut visit: impl FnMut(usize, usize)) {
    let mut g = a.to_vec();
    let q = f.q() as u128;
    let x = vec![FieldElement::ZERO, FieldElement::ONE];
    let mut h = x.clone();
    let mut d = 1;
    while g.len() > 2 * d {
        // h = x^{q^d} mod g
        h = powmod(f, &h, q, &g);
        let hx = sub(f, &h, &x);
        let t = gcd(f, &hx, &g);
        let dt = t.len() - 1;
        if dt > 0 {
            visit(d, dt / d);
            g = div_rem(f, &g, &t).0;
            rem_in_place(f, &mut h, &g);
        }
        d += 1;
    }
    if g.len() > 1 {
        visit(g.len() - 1, 1);
    }
}

pub(crate) fn splitting_type_of(f: &FieldSpec, a: &[FieldElement]) -> SplittingType {
    let n = a.len() - 1;
    let mut s = vec![0u32; n];
    if n == 1 {
        s[0] = 1;
        return SplittingType::from_counts_unchecked(s);
    }
    for (part, mult) in squarefree(f, a) {
        distinct_degree_profile(f, &part, |d, count| s[d - 1] += (count as u32) * mult);
    }
    SplittingType::from_counts_unchecked(s)
}

/// For `x^2 + b x + c` over odd `q`: the character of `b^2 - 4c`.
/// `-1` means irreducible; `0` a double root; `+1` two distinct roots.
#[inline]
pub(crate) fn quadratic_type(f: &FieldSpec, b: FieldElement, c: FieldElement) -> i8 {
    let four_c = f.mul(f.from_int(4), c);
    let disc = f.sub(f.mul(b, b), four_c);
    f.qchar(disc).expect("odd characteristic")
}

fn is_irreducible_raw(f: &FieldSpec, a: &[FieldElement]) -> bool {
    let n = a.len() - 1;
    if n == 1 {
        return true;
    }
    if a[0].is_zero() {
        return false;
    }
    // A reducible polynomial has an irreducible factor of degree <= n/2, which
    // divides x^{q^d} - x for that d.
    let q = f.q() as u128;
    let x = vec![FieldElement::ZERO, FieldElement::ONE];
    let mut h = x.clone();
    for _ in 1..=n / 2 {
        h = powmod(f, &h, q, a);
        let t = gcd(f, &sub(f, &h, &x), a);
        if t.len() > 1 {
            return false;
        }
    }
    true
}

fn resultant(f: &FieldSpec, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    if a.is_empty() || b.is_empty() {
        return FieldElement::ZERO;
    }
    let (n, m) = (a.len() - 1, b.len() - 1);
    if m == 0 {
        return f.pow(b[0], n as u64);
    }
    if n == 0 {
        return f.pow(a[0], m as u64);
    }
    let r = div_rem(f, a, b).1;
    if r.is_empty() {
        return FieldElement::ZERO;
    }
    // Res(a, b) = (-1)^{nm} lc(b)^{n - deg r} Res(b, r)
    let dr = r.len() - 1;
    let mut out = f.mul(f.pow(b[m], (n - dr) as u64), resultant(f, b, &r));
    if (n * m) % 2 == 1 {
        out = f.neg(out);
    }
    out
}

/// Determinant of the Sylvester matrix, with the formal degrees given by the slice lengths.
fn sylvester_resultant(f: &FieldSpec, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    let (n, m) = (a.len() - 1, b.len() - 1);
    let size = n + m;
    if size == 0 {
        return FieldElement::ONE;
    }
    let mut mat = vec![vec![FieldElement::ZERO; size]; size];
    for i in 0..m {
        for (j, &c) in a.iter().rev().enumerate() {
            mat[i][i + j] = c;
        }
    }
    for i in 0..n {
        for (j, &c) in b.iter().rev().enumerate() {
            mat[m + i][i + j] = c;
        }
    }
    determinant(f, mat)
}

fn determinant(f: &FieldSpec, mut mat: Vec<Vec<FieldElement>>) -> FieldElement {
    let size = mat.len();
    let mut det = FieldElement::ONE;
    for col in 0..size {
        let Some(pivot) = (col..size).find(|&r| !mat[r][col].is_zero()) else {
            return FieldElement::ZERO;
        };
        if pivot != col {
            mat.swap(pivot, col);
            det = f.neg(det);
        }
        let pv = mat[col][col];
        det = f.mul(det, pv);
        let inv = f.inv(pv).expect("pivot is nonzero");
        for r in col + 1..size {
            let factor = f.mul(mat[r][col], inv);
            if factor.is_zero() {
                continue;
            }
            let (upper, lower) = mat.split_at_mut(r);
            for (x, &y) in lower[0][col..size].iter_mut().zip(&upper[col][col..size]) {
                *x = f.sub(*x, f.mul(factor, y));
            }
        }
    }
    det
}
