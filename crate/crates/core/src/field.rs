//! Finite fields `F_q`, `q = p^k`, in a polynomial basis over `F_p`.
//!
//! An element is stored as its canonical index: the base-`p` evaluation of
//! its coordinate vector `(c_0, ..., c_{k-1})`, so `c_0 + c_1 x + ...` has
//! index `c_0 + c_1 p + ...`. The indices `0..q` enumerate the field in
//! canonical order and the prime subfield occupies `0..p`.
//!
//! The modulus of `F_{p^k}` is the monic irreducible of degree `k` whose
//! coefficient vector has the smallest base-`p` value. For `k = 1` it is `x`.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::arith::{is_prime, prime_divisors};
use crate::error::{Error, Result};
use crate::poly::Poly;

/// Largest order for which log/exp and quadratic-character tables are built.
pub const TABLE_LIMIT: u32 = 1 << 20;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Canonical index in `0..q`.
    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Caller guarantees `i < q` for the field the element will be used with.
    #[inline]
    pub(crate) fn from_index(i: u32) -> Self {
        FieldElement(i)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct LogTables {
    /// `exp[i] = g^i` for `i in 0..2(q-1)`, doubled so sums of logs need no reduction.
    exp: Vec<u32>,
    /// `log[a]` for nonzero `a`; `log[0]` is unused.
    log: Vec<u32>,
}

struct Inner {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    /// `p^i` for `i in 0..k`.
    place: Vec<u32>,
    tables: Option<LogTables>,
    qchar_table: Option<Vec<i8>>,
    /// `Tr(x^i)` for the basis vectors.
    basis_trace: Vec<u32>,
    /// `exp(2 pi i t / p)` for `t in 0..p`, only for `p <= TABLE_LIMIT`.
    roots_of_unity: Option<Vec<Complex64>>,
}

/// A concrete model of `F_q`. Cheap to clone; immutable after construction.
#[derive(Clone)]
pub struct FieldSpec(Arc<Inner>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.k == other.0.k && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)?;
        if self.0.k > 1 {
            write!(f, " (mod {:?})", self.0.modulus)?;
        }
        Ok(())
    }
}

impl FieldSpec {
    /// Builds `F_{p^k}` with the canonical modulus.
    pub fn new(p: u64, k: u64) -> Result<Self> {
        if k == 0 || k > 31 {
            return Err(Error::DegreeOutOfRange(k));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let q = (p as u128).checked_pow(k as u32).filter(|&q| q <= MAX_ORDER as u128);
        let Some(q) = q else {
            return Err(Error::Overflow(p, k));
        };
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            smallest_irreducible(p as u32, k as u32)?
        };
        Ok(Self::with_modulus(p as u32, k as u32, q as u32, modulus))
    }

    /// Builds the field of order `q`, which must be a prime power.
    pub fn of_order(q: u64) -> Result<Self> {
        match crate::arith::prime_power(q) {
            Some((p, k)) => Self::new(p, k as u64),
            None => Err(Error::NotPrime(q)),
        }
    }

    fn with_modulus(p: u32, k: u32, q: u32, modulus: Vec<u32>) -> Self {
        let place: Vec<u32> = (0..k).map(|i| p.pow(i)).collect();
        let mut inner = Inner {
            p,
            k,
            q,
            modulus,
            place,
            tables: None,
            qchar_table: None,
            basis_trace: vec![],
            roots_of_unity: None,
        };
        if k > 1 && q <= TABLE_LIMIT {
            inner.tables = Some(build_log_tables(&inner));
        }
        let basis_trace = (0..k)
            .map(|i| trace_by_frobenius(&inner, FieldElement(inner.place[i as usize])))
            .collect();
        inner.basis_trace = basis_trace;
        if p % 2 == 1 && q <= TABLE_LIMIT {
            let mut table = vec![-1i8; q as usize];
            table[0] = 0;
            for a in 1..q {
                let sq = mul_inner(&inner, FieldElement(a), FieldElement(a));
                table[sq.0 as usize] = 1;
            }
            inner.qchar_table = Some(table);
        }
        if p <= TABLE_LIMIT {
            inner.roots_of_unity = Some(
                (0..p)
                    .map(|t| root_of_unity(t, p))
                    .collect(),
            );
        }
        FieldSpec(Arc::new(inner))
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.0.k
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Modulus coefficients, low to high, monic of degree `k`.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn is_odd(&self) -> bool {
        self.0.p % 2 == 1
    }

    pub fn element(&self, index: u64) -> Result<FieldElement> {
        if index < self.0.q as u64 {
            Ok(FieldElement(index as u32))
        } else {
            Err(Error::ElementOutOfRange(index))
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, c: i64) -> FieldElement {
        FieldElement(c.rem_euclid(self.0.p as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() > self.0.k as usize {
            return Err(Error::ElementOutOfRange(coeffs.len() as u64));
        }
        let mut idx = 0u32;
        for (i, &c) in coeffs.iter().enumerate() {
            if c >= self.0.p {
                return Err(Error::ElementOutOfRange(c as u64));
            }
            idx += c * self.0.place[i];
        }
        Ok(FieldElement(idx))
    }

    /// Coordinates `(c_0, ..., c_{k-1})` of `a` in the polynomial basis.
    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        let p = self.0.p;
        let mut v = a.0;
        (0..self.0.k)
            .map(|_| {
                let c = v % p;
                v /= p;
                c
            })
            .collect()
    }

    /// All `q` elements in canonical order.
    pub fn elements(&self) -> impl ExactSizeIterator<Item = FieldElement> + Clone {
        (0..self.0.q).map(FieldElement)
    }

    /// The element `-1`.
    pub fn minus_one(&self) -> FieldElement {
        FieldElement(self.0.p - 1)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = &*self.0;
        if s.k == 1 {
            let r = a.0 as u64 + b.0 as u64;
            FieldElement(if r >= s.p as u64 { (r - s.p as u64) as u32 } else { r as u32 })
        } else if s.p == 2 {
            FieldElement(a.0 ^ b.0)
        } else {
            digitwise(s, a.0, b.0, |x, y, p| {
                let r = x + y;
                if r >= p {
                    r - p
                } else {
                    r
                }
            })
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let s = &*self.0;
        if s.k == 1 {
            FieldElement(if a.0 == 0 { 0 } else { s.p - a.0 })
        } else if s.p == 2 {
            a
        } else {
            digitwise(s, a.0, 0, |x, _, p| if x == 0 { 0 } else { p - x })
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = &*self.0;
        if s.k == 1 {
            FieldElement(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + s.p - b.0 })
        } else if s.p == 2 {
            FieldElement(a.0 ^ b.0)
        } else {
            digitwise(s, a.0, b.0, |x, y, p| if x >= y { x - y } else { x + p - y })
        }
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        mul_inner(&self.0, a, b)
    }

    /// Multiplication through polynomial-basis reduction, bypassing any tables.
    pub fn mul_by_reduction(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.0.k == 1 {
            return self.mul(a, b);
        }
        mul_by_reduction(&self.0, a, b)
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let s = &*self.0;
        if let Some(t) = &s.tables {
            let l = t.log[a.0 as usize];
            return Ok(FieldElement(t.exp[((s.q - 1 - l) % (s.q - 1)) as usize]));
        }
        Ok(self.pow(a, s.q as u64 - 2))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` by square-and-multiply; for nonzero `a` the exponent is reduced mod `q - 1`.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let s = &*self.0;
        let order = s.q as u64 - 1;
        let mut e = e % order;
        if let Some(t) = &s.tables {
            let l = (t.log[a.0 as usize] as u64 * e) % order;
            return FieldElement(t.exp[l as usize]);
        }
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Frobenius `a -> a^p`.
    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.0.p as u64)
    }

    /// Inverse Frobenius `a -> a^{p^{k-1}}`, the unique `p`-th root of `a`.
    pub fn pth_root(&self, a: FieldElement) -> FieldElement {
        self.pow(a, (self.0.q / self.0.p) as u64)
    }

    /// Absolute trace to `F_p`, as a residue in `0..p`.
    pub fn trace(&self, a: FieldElement) -> u32 {
        let s = &*self.0;
        if s.k == 1 {
            return a.0;
        }
        let p = s.p as u64;
        let mut v = a.0;
        let mut acc = 0u64;
        for &t in &s.basis_trace {
            acc += (v % s.p) as u64 * t as u64;
            v /= s.p;
        }
        (acc % p) as u32
    }

    /// Trace computed as `a + a^p + ... + a^{p^{k-1}}`.
    pub fn trace_by_frobenius(&self, a: FieldElement) -> u32 {
        trace_by_frobenius(&self.0, a)
    }

    /// Quadratic character: `+1` on nonzero squares, `0` at zero, `-1` otherwise.
    pub fn qchar(&self, a: FieldElement) -> Result<i8> {
        if !self.is_odd() {
            return Err(Error::EvenCharacteristic);
        }
        if let Some(t) = &self.0.qchar_table {
            return Ok(t[a.0 as usize]);
        }
        self.qchar_by_power(a)
    }

    /// Quadratic character through Euler's criterion `a^{(q-1)/2}`.
    pub fn qchar_by_power(&self, a: FieldElement) -> Result<i8> {
        if !self.is_odd() {
            return Err(Error::EvenCharacteristic);
        }
        if a.is_zero() {
            return Ok(0);
        }
        let r = self.pow(a, (self.0.q as u64 - 1) / 2);
        Ok(if r == FieldElement::ONE { 1 } else { -1 })
    }

    /// Additive character `e_q(a) = exp(2 pi i Tr(a) / p)`.
    pub fn add_char(&self, a: FieldElement) -> Complex64 {
        let t = self.trace(a);
        match &self.0.roots_of_unity {
            Some(r) => r[t as usize],
            None => root_of_unity(t, self.0.p),
        }
    }

    /// `e_q(a b)`.
    #[inline]
    pub fn add_char_product(&self, a: FieldElement, b: FieldElement) -> Complex64 {
        self.add_char(self.mul(a, b))
    }
}

fn root_of_unity(t: u32, p: u32) -> Complex64 {
    if t == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, TAU * t as f64 / p as f64)
    }
}

#[inline]
fn digitwise(s: &Inner, mut a: u32, mut b: u32, op: impl Fn(u32, u32, u32) -> u32) -> FieldElement {
    let p = s.p;
    let mut out = 0u32;
    for &w in &s.place {
        out += op(a % p, b % p, p) * w;
        a /= p;
        b /= p;
    }
    FieldElement(out)
}

#[inline]
fn mul_inner(s: &Inner, a: FieldElement, b: FieldElement) -> FieldElement {
    if s.k == 1 {
        return FieldElement(((a.0 as u64 * b.0 as u64) % s.p as u64) as u32);
    }
    if a.0 == 0 || b.0 == 0 {
        return FieldElement::ZERO;
    }
    if let Some(t) = &s.tables {
        let l = t.log[a.0 as usize] + t.log[b.0 as usize];
        return FieldElement(t.exp[l as usize]);
    }
    mul_by_reduction(s, a, b)
}

fn mul_by_reduction(s: &Inner, a: FieldElement, b: FieldElement) -> FieldElement {
    let k = s.k as usize;
    let p = s.p as u64;
    let split = |mut v: u32| -> Vec<u64> {
        (0..k)
            .map(|_| {
                let c = (v % s.p) as u64;
                v /= s.p;
                c
            })
            .collect()
    };
    let (x, y) = (split(a.0), split(b.0));
    let mut prod = vec![0u64; 2 * k - 1];
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0 {
            continue;
        }
        for (j, &yj) in y.iter().enumerate() {
            prod[i + j] = (prod[i + j] + xi * yj) % p;
        }
    }
    // Reduce by the monic modulus from the top down.
    for top in (k..prod.len()).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        prod[top] = 0;
        for i in 0..k {
            let m = s.modulus[i] as u64;
            if m != 0 {
                let idx = top - k + i;
                prod[idx] = (prod[idx] + (p - c) * m) % p;
            }
        }
    }
    let idx: u32 = prod[..k].iter().zip(&s.place).map(|(&c, &w)| c as u32 * w).sum();
    FieldElement(idx)
}

fn pow_slow(s: &Inner, a: FieldElement, mut e: u64) -> FieldElement {
    let mut base = a;
    let mut acc = FieldElement::ONE;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_inner(s, acc, base);
        }
        base = mul_inner(s, base, base);
        e >>= 1;
    }
    acc
}

fn trace_by_frobenius(s: &Inner, a: FieldElement) -> u32 {
    if s.k == 1 {
        return a.0;
    }
    let p = s.p;
    let mut acc = a;
    let mut cur = a;
    for _ in 1..s.k {
        cur = pow_slow(s, cur, p as u64);
        acc = digitwise(s, acc.0, cur.0, |x, y, p| (x + y) % p);
    }
    debug_assert!(acc.0 < p, "trace must land in the prime field");
    acc.0
}

fn build_log_tables(s: &Inner) -> LogTables {
    let q = s.q;
    let order = (q - 1) as u64;
    let factors = prime_divisors(order);
    let generator = (2..q)
        .map(FieldElement)
        .find(|&g| {
            factors
                .iter()
                .all(|&r| pow_slow(s, g, order / r) != FieldElement::ONE)
        })
        .expect("multiplicative group of a finite field is cyclic");
    let mut exp = vec![0u32; 2 * (q as usize - 1)];
    let mut log = vec![0u32; q as usize];
    let mut cur = FieldElement::ONE;
    for i in 0..(q - 1) {
        exp[i as usize] = cur.0;
        exp[(i + q - 1) as usize] = cur.0;
        log[cur.0 as usize] = i;
        cur = mul_by_reduction(s, cur, generator);
    }
    LogTables { exp, log }
}

/// Smallest monic irreducible of degree `k` over `F_p`, ordering candidates
/// by the base-`p` value `c_0 + c_1 p + ... + c_{k-1} p^{k-1}` of their
/// non-leading coefficients (the canonical element order applied to the
/// coefficient vector).
fn smallest_irreducible(p: u32, k: u32) -> Result<Vec<u32>> {
    let prime = FieldSpec::new(p as u64, 1)?;
    let count = (p as u64).pow(k);
    for idx in 0..count {
        let mut coeffs = vec![0u32; k as usize + 1];
        let mut v = idx;
        for c in coeffs.iter_mut().take(k as usize) {
            *c = (v % p as u64) as u32;
            v /= p as u64;
        }
        if coeffs[0] == 0 {
            continue;
        }
        coeffs[k as usize] = 1;
        let poly = Poly::from_indices(&prime, &coeffs)?;
        if poly.is_irreducible()? {
            return Ok(coeffs);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
