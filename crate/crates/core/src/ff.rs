//! Finite fields GF(p^k) in a polynomial basis over GF(p).
//!
//! Elements are encoded as `u32` values `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`
//! where `c_i` is the coefficient of `t^i`. The integer order of the encoding
//! is the lexicographic order of coefficient vectors (highest coefficient
//! first), which is also the enumeration order and the tie-break order for
//! two-valued roots.
//!
//! [`FieldSpec`] is a cheap-to-clone handle; the raw `u32` arithmetic on it is
//! what the polynomial layer uses. [`FieldElement`] pairs a value with its
//! field for the public API.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::Polynomial;

/// Largest supported field cardinality.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

/// Log/antilog tables are only built up to this cardinality.
const TABLE_LIMIT: u32 = 1 << 16;

struct LogTables {
    // exp has length 2(q-1) so that log a + log b never needs a reduction
    exp: Vec<u32>,
    log: Vec<u32>,
}

struct Inner {
    p: u32,
    k: u32,
    q: u32,
    /// Coefficients of the monic modulus, low degree first. Empty for k = 1.
    modulus: Vec<u32>,
    tables: Option<LogTables>,
    /// Least quadratic nonresidue (odd characteristic only).
    nonresidue: Option<u32>,
}

#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<Inner>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.k == other.inner.k
                && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FieldSpec {}

impl std::hash::Hash for FieldSpec {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.inner.p.hash(state);
        self.inner.k.hash(state);
        self.inner.modulus.hash(state);
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inner.k == 1 {
            write!(f, "GF({})", self.inner.p)
        } else {
            write!(f, "GF({}):{}", self.inner.q, self.modulus_text())
        }
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl FieldSpec {
    /// The prime field GF(p).
    pub fn prime(p: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if p as u64 > MAX_FIELD_SIZE {
            return Err(Error::FieldTooLarge(format!("p = {p} exceeds 2^20")));
        }
        Ok(Self::build(p, 1, Vec::new()))
    }

    /// GF(p^k) with the default modulus: the monic irreducible of degree k
    /// whose lower coefficients have the least encoding.
    pub fn new(p: u32, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidField("extension degree must be positive".into()));
        }
        let base = Self::prime(p)?;
        if k == 1 {
            return Ok(base);
        }
        check_size(p, k)?;
        let count = (p as u64).pow(k);
        for lower in 0..count {
            let mut coeffs = digits(lower as u32, p, k as usize);
            coeffs.push(1);
            let m = Polynomial::new(&base, coeffs.clone());
            if m.is_irreducible().unwrap_or(false) {
                return Ok(Self::build(p, k, coeffs));
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    /// GF(p^k) with an explicit modulus (coefficients low degree first).
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self> {
        let base = Self::prime(p)?;
        let m = Polynomial::new(&base, modulus.iter().map(|c| c % p).collect());
        let k = match m.degree() {
            Some(d) if d >= 1 => d as u32,
            _ => return Err(Error::InvalidField("modulus must be nonconstant".into())),
        };
        if m.leading() != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        if k == 1 {
            return Err(Error::InvalidField(
                "prime fields take no modulus; write GF(p)".into(),
            ));
        }
        check_size(p, k)?;
        if !m.is_irreducible()? {
            return Err(Error::InvalidField(format!("modulus {m} is reducible over GF({p})")));
        }
        Ok(Self::build(p, k, m.coeffs().to_vec()))
    }

    /// Parse `GF(p)`, `GF(p^k)` or `GF(p^k):<modulus in t>`.
    pub fn parse(text: &str) -> Result<Self> {
        crate::parse::parse_field(text)
    }

    fn build(p: u32, k: u32, modulus: Vec<u32>) -> Self {
        let q = p.pow(k);
        let mut inner = Inner { p, k, q, modulus, tables: None, nonresidue: None };
        if k > 1 && q <= TABLE_LIMIT {
            inner.tables = Some(build_tables(&inner));
        }
        let mut spec = FieldSpec { inner: Arc::new(inner) };
        if p != 2 {
            let z = (1..q).find(|&z| spec.pow(z, ((q - 1) / 2) as u64) != 1);
            Arc::get_mut(&mut spec.inner).expect("unique").nonresidue = z;
        }
        spec
    }

    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.k
    }

    pub fn order(&self) -> u32 {
        self.inner.q
    }

    pub fn is_prime_field(&self) -> bool {
        self.inner.k == 1
    }

    /// Modulus coefficients, low degree first (empty for prime fields).
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn modulus_text(&self) -> String {
        let base = FieldSpec::prime(self.inner.p).expect("p is prime");
        let mut s = Polynomial::new(&base, self.inner.modulus.clone()).to_string();
        s = s.replace('x', "t");
        s
    }

    pub fn prime_subfield(&self) -> FieldSpec {
        if self.is_prime_field() {
            self.clone()
        } else {
            FieldSpec::prime(self.inner.p).expect("p is prime")
        }
    }

    // ---- raw arithmetic on encoded values ----

    /// Coefficient vector of length k, low degree first.
    pub fn to_coeffs(&self, v: u32) -> Vec<u32> {
        digits(v, self.inner.p, self.inner.k as usize)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> u32 {
        let p = self.inner.p;
        let mut rem = coeffs.to_vec();
        // fold higher powers of t through the modulus
        if rem.len() > self.inner.k as usize && self.inner.k > 1 {
            let k = self.inner.k as usize;
            for i in (k..rem.len()).rev() {
                let c = rem[i] % p;
                if c == 0 {
                    continue;
                }
                rem[i] = 0;
                for (j, &m) in self.inner.modulus[..k].iter().enumerate() {
                    rem[i - k + j] = (rem[i - k + j] % p + (p - c) * m % p) % p;
                }
            }
        } else {
            debug_assert!(rem.len() <= self.inner.k as usize, "t has no meaning in GF(p)");
        }
        let mut v = 0u32;
        for &c in rem.iter().take(self.inner.k as usize).rev() {
            v = v * p + c % p;
        }
        v
    }

    /// Image of an integer under Z -> GF(p) -> GF(q).
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.inner.p as i64) as u32
    }

    /// The generator t of the polynomial basis (k > 1).
    pub fn generator(&self) -> Option<u32> {
        (self.inner.k > 1).then_some(self.inner.p)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let p = self.inner.p;
        if self.inner.k == 1 {
            let s = a + b;
            return if s >= p { s - p } else { s };
        }
        if p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.inner.k {
            let d = (a % p + b % p) % p;
            out += d * place;
            place *= p;
            a /= p;
            b /= p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        let p = self.inner.p;
        if self.inner.k == 1 {
            return if a == 0 { 0 } else { p - a };
        }
        if p == 2 {
            return a;
        }
        let mut a = a;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.inner.k {
            let d = (p - a % p) % p;
            out += d * place;
            place *= p;
            a /= p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.inner.k == 1 {
            return ((a as u64 * b as u64) % self.inner.p as u64) as u32;
        }
        match &self.inner.tables {
            Some(t) => t.exp[(t.log[a as usize] + t.log[b as usize]) as usize],
            None => mul_slow(&self.inner, a, b),
        }
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        if let Some(t) = &self.inner.tables {
            let q1 = self.inner.q - 1;
            let l = t.log[a as usize];
            return Some(t.exp[((q1 - l) % q1) as usize]);
        }
        Some(self.pow(a, self.inner.q as u64 - 2))
    }

    pub fn div(&self, a: u32, b: u32) -> Option<u32> {
        self.inv(b).map(|ib| self.mul(a, ib))
    }

    /// Square root with least encoding, if one exists.
    pub fn sqrt(&self, c: u32) -> Option<u32> {
        if c == 0 {
            return Some(0);
        }
        if self.inner.p == 2 {
            return Some(self.frobenius_root(c));
        }
        let q = self.inner.q as u64;
        if self.pow(c, (q - 1) / 2) != 1 {
            return None;
        }
        // Tonelli-Shanks
        let mut s = 0u32;
        let mut odd = q - 1;
        while odd.is_multiple_of(2) {
            odd /= 2;
            s += 1;
        }
        let z = self.inner.nonresidue.expect("odd characteristic has a nonresidue");
        let mut m = s;
        let mut cc = self.pow(z, odd);
        let mut t = self.pow(c, odd);
        let mut r = self.pow(c, odd.div_ceil(2));
        while t != 1 {
            let mut i = 0u32;
            let mut tt = t;
            while tt != 1 {
                tt = self.mul(tt, tt);
                i += 1;
            }
            let mut b = cc;
            for _ in 0..(m - i - 1) {
                b = self.mul(b, b);
            }
            m = i;
            cc = self.mul(b, b);
            t = self.mul(t, cc);
            r = self.mul(r, b);
        }
        Some(r.min(self.neg(r)))
    }

    /// The unique r with r^p = c.
    pub fn frobenius_root(&self, c: u32) -> u32 {
        self.pow(c, (self.inner.q / self.inner.p) as u64)
    }

    /// Absolute trace to GF(2), as 0 or 1. Characteristic 2 only.
    pub fn trace2(&self, c: u32) -> u32 {
        debug_assert_eq!(self.inner.p, 2);
        let mut acc = 0u32;
        let mut x = c;
        for _ in 0..self.inner.k {
            acc = self.add(acc, x);
            x = self.mul(x, x);
        }
        acc
    }

    /// Solve a^2 + a = c; the root with least encoding.
    pub fn artin_schreier_root(&self, c: u32) -> Result<Option<u32>> {
        if self.inner.p != 2 {
            return Err(Error::WrongCharacteristic { expected: "2", found: self.inner.p });
        }
        let k = self.inner.k as usize;
        let gf2 = self.prime_subfield();
        // column i is the image of the basis vector t^i under a -> a^2 + a
        let images: Vec<Vec<u32>> = (0..k)
            .map(|i| {
                let e = 1u32 << i;
                self.to_coeffs(self.add(self.mul(e, e), e))
            })
            .collect();
        let rows: Vec<Vec<u32>> = (0..k).map(|r| (0..k).map(|c| images[c][r]).collect()).collect();
        let sol = linalg::solve(&gf2, &rows, &self.to_coeffs(c));
        Ok(sol.map(|bits| {
            let a = self.from_coeffs(&bits);
            a.min(a ^ 1)
        }))
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.inner.q
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = u32> {
        1..self.inner.q
    }

    pub fn element(&self, v: u32) -> FieldElement {
        assert!(v < self.inner.q, "value out of range");
        FieldElement { field: self.clone(), value: v }
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    /// All q elements in encoding order.
    pub fn enumerate(&self) -> Result<Vec<FieldElement>> {
        if self.inner.q as u64 > MAX_FIELD_SIZE {
            return Err(Error::FieldTooLarge(format!("q = {}", self.inner.q)));
        }
        Ok(self.elements().map(|v| self.element(v)).collect())
    }

    pub fn format_value(&self, v: u32) -> String {
        if self.inner.k == 1 {
            return v.to_string();
        }
        let coeffs = self.to_coeffs(v);
        let mut terms = Vec::new();
        for (i, &c) in coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }

    /// Whether the printed form of `v` needs parentheses as a coefficient.
    pub(crate) fn value_is_compound(&self, v: u32) -> bool {
        self.to_coeffs(v).iter().filter(|&&c| c != 0).count() > 1
    }
}

fn check_size(p: u32, k: u32) -> Result<()> {
    let q = (p as u64).checked_pow(k).unwrap_or(u64::MAX);
    if q > MAX_FIELD_SIZE {
        return Err(Error::FieldTooLarge(format!("{p}^{k} exceeds 2^20")));
    }
    Ok(())
}

fn digits(mut v: u32, p: u32, k: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        out.push(v % p);
        v /= p;
    }
    out
}

fn mul_slow(inner: &Inner, a: u32, b: u32) -> u32 {
    let p = inner.p as u64;
    let k = inner.k as usize;
    let da = digits(a, inner.p, k);
    let db = digits(b, inner.p, k);
    let mut prod = vec![0u64; 2 * k - 1];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
        }
    }
    for i in (k..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for (j, &m) in inner.modulus[..k].iter().enumerate() {
            prod[i - k + j] = (prod[i - k + j] + (p - c) * m as u64) % p;
        }
    }
    let mut v = 0u32;
    for &c in prod[..k].iter().rev() {
        v = v * inner.p + c as u32;
    }
    v
}

fn build_tables(inner: &Inner) -> LogTables {
    let q = inner.q;
    let order = (q - 1) as u64;
    let factors = prime_factors(order);
    let pow_slow = |a: u32, mut e: u64| {
        let (mut base, mut acc) = (a, 1u32);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_slow(inner, acc, base);
            }
            base = mul_slow(inner, base, base);
            e >>= 1;
        }
        acc
    };
    let g = (2..q)
        .find(|&g| factors.iter().all(|&r| pow_slow(g, order / r) != 1))
        .expect("multiplicative group is cyclic");
    let mut exp = vec![0u32; 2 * (q as usize - 1)];
    let mut log = vec![0u32; q as usize];
    let mut x = 1u32;
    for i in 0..(q - 1) as usize {
        exp[i] = x;
        exp[i + q as usize - 1] = x;
        log[x as usize] = i as u32;
        x = mul_slow(inner, x, g);
    }
    LogTables { exp, log }
}

/// An element of a finite field together with its field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: FieldSpec,
    value: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FieldElement {
    pub fn new(field: &FieldSpec, value: u32) -> Self {
        field.element(value)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn coeffs(&self) -> Vec<u32> {
        self.field.to_coeffs(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn arith(&self, other: &FieldElement, op: ArithOp) -> Result<FieldElement> {
        if self.field != other.field {
            return Err(Error::MixedFields);
        }
        let f = &self.field;
        let v = match op {
            ArithOp::Add => f.add(self.value, other.value),
            ArithOp::Sub => f.sub(self.value, other.value),
            ArithOp::Mul => f.mul(self.value, other.value),
            ArithOp::Div => f.div(self.value, other.value).ok_or(Error::DivisionByZero)?,
        };
        Ok(f.element(v))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        self.field.inv(self.value).map(|v| self.field.element(v)).ok_or(Error::DivisionByZero)
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        self.field.element(self.field.pow(self.value, e))
    }

    pub fn sqrt(&self) -> Option<FieldElement> {
        self.field.sqrt(self.value).map(|v| self.field.element(v))
    }

    pub fn artin_schreier_solve(&self) -> Result<Option<FieldElement>> {
        Ok(self.field.artin_schreier_root(self.value)?.map(|v| self.field.element(v)))
    }

    pub fn frobenius_root(&self) -> FieldElement {
        self.field.element(self.field.frobenius_root(self.value))
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format_value(self.value))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self, self.field)
    }
}

macro_rules! forward_op {
    ($tr:ident, $m:ident, $op:expr) => {
        impl std::ops::$tr for &FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                self.arith(rhs, $op).expect("field arithmetic")
            }
        }
        impl std::ops::$tr for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_op!(Add, add, ArithOp::Add);
forward_op!(Sub, sub, ArithOp::Sub);
forward_op!(Mul, mul, ArithOp::Mul);
forward_op!(Div, div, ArithOp::Div);

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.field.element(self.field.neg(self.value))
    }
}
