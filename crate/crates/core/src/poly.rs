//! Dense univariate polynomials over a finite field.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::ff::{FieldElement, FieldSpec};
use crate::linalg;

/// Dense polynomial, coefficients low degree first, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    field: FieldSpec,
    coeffs: Vec<u32>,
}

impl Polynomial {
    pub fn new(field: &FieldSpec, mut coeffs: Vec<u32>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        debug_assert!(coeffs.iter().all(|&c| c < field.order()));
        Polynomial { field: field.clone(), coeffs }
    }

    pub fn zero(field: &FieldSpec) -> Self {
        Polynomial { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &FieldSpec) -> Self {
        Self::constant(field, 1)
    }

    pub fn constant(field: &FieldSpec, c: u32) -> Self {
        Self::new(field, vec![c])
    }

    /// The indeterminate x.
    pub fn x(field: &FieldSpec) -> Self {
        Self::new(field, vec![0, 1])
    }

    pub fn monomial(field: &FieldSpec, c: u32, e: usize) -> Self {
        let mut v = vec![0; e + 1];
        v[e] = c;
        Self::new(field, v)
    }

    /// x - a
    pub fn linear(field: &FieldSpec, a: u32) -> Self {
        Self::new(field, vec![field.neg(a), 1])
    }

    pub fn parse(field: &FieldSpec, text: &str) -> Result<Self> {
        crate::parse::parse_polynomial(field, text)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to -1.
    pub fn deg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    /// Leading coefficient (0 for the zero polynomial).
    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn leading_element(&self) -> FieldElement {
        self.field.element(self.leading())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    fn same_field(&self, other: &Self) {
        assert!(self.field == other.field, "polynomials over different fields");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_field(other);
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        Self::new(f, v)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_field(other);
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect();
        Self::new(f, v)
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        Polynomial { field: f.clone(), coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_field(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.field);
        }
        let f = &self.field;
        let mut v = vec![0u32; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                v[i + j] = f.add(v[i + j], f.mul(a, b));
            }
        }
        Self::new(f, v)
    }

    pub fn scale(&self, c: u32) -> Self {
        let f = &self.field;
        Self::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Multiply by x^e.
    pub fn shift(&self, e: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![0; e];
        v.extend_from_slice(&self.coeffs);
        Polynomial { field: self.field.clone(), coeffs: v }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Euclidean division: `self = q * g + r`, `deg r < deg g`.
    pub fn divmod(&self, g: &Self) -> Result<(Self, Self)> {
        self.same_field(g);
        if g.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = &self.field;
        let dg = g.coeffs.len() - 1;
        let inv_lc = f.inv(g.leading()).expect("nonzero");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dg {
            return Ok((Self::zero(f), self.clone()));
        }
        let mut quot = vec![0u32; rem.len() - dg];
        for i in (dg..rem.len()).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            let t = f.mul(c, inv_lc);
            quot[i - dg] = t;
            for (j, &gc) in g.coeffs.iter().enumerate() {
                rem[i - dg + j] = f.sub(rem[i - dg + j], f.mul(t, gc));
            }
        }
        rem.truncate(dg);
        Ok((Self::new(f, quot), Self::new(f, rem)))
    }

    pub fn rem(&self, g: &Self) -> Result<Self> {
        Ok(self.divmod(g)?.1)
    }

    /// Quotient when `g` divides `self`, otherwise `None`.
    pub fn div_exact(&self, g: &Self) -> Option<Self> {
        let (q, r) = self.divmod(g).ok()?;
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.div_exact(self).is_some()
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(self.field.inv(self.leading()).expect("nonzero"))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        self.same_field(other);
        if self.is_zero() && other.is_zero() {
            return Err(Error::BothZero);
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    pub fn derivative(&self) -> Self {
        let f = &self.field;
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(c, f.from_int(i as i64)))
            .collect();
        Self::new(f, v)
    }

    pub fn eval(&self, x: u32) -> u32 {
        let f = &self.field;
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn pow_mod(&self, mut e: u64, m: &Self) -> Result<Self> {
        let mut base = self.rem(m)?;
        let mut acc = Self::one(&self.field).rem(m)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).rem(m)?;
            }
        }
        Ok(acc)
    }

    /// gcd(f, f') = 1.
    pub fn is_separable(&self) -> Result<bool> {
        if self.is_constant() {
            return Err(Error::ConstantInput);
        }
        Ok(self.gcd(&self.derivative())?.is_one())
    }

    /// A square root in K[X], if `self` is a perfect square. The root's
    /// leading coefficient is the least square root of the leading
    /// coefficient.
    pub fn sqrt(&self) -> Option<Self> {
        let f = &self.field;
        if self.is_zero() {
            return Some(self.clone());
        }
        let d = self.coeffs.len() - 1;
        if f.characteristic() == 2 {
            if self.coeffs.iter().skip(1).step_by(2).any(|&c| c != 0) {
                return None;
            }
            let v = self.coeffs.iter().step_by(2).map(|&c| f.frobenius_root(c)).collect();
            return Some(Self::new(f, v));
        }
        if d % 2 == 1 {
            return None;
        }
        let m = d / 2;
        let s = f.sqrt(self.leading())?;
        let inv_2s = f.inv(f.add(s, s)).expect("odd characteristic");
        let mut g = vec![0u32; m + 1];
        g[m] = s;
        for j in 1..=m {
            // coefficient of x^{2m-j} in g^2 = 2 g_m g_{m-j} + sum of known products
            let mut known = 0u32;
            for i in (m - j + 1)..m {
                let l = 2 * m - j - i;
                if l > m - j && l <= m {
                    known = f.add(known, f.mul(g[i], g[l]));
                }
            }
            g[m - j] = f.mul(f.sub(self.coeffs[2 * m - j], known), inv_2s);
        }
        let g = Self::new(f, g);
        (g.mul(&g) == *self).then_some(g)
    }

    /// Monic product of the distinct monic irreducible factors.
    pub fn radical(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(radical_monic(&self.monic()))
    }

    /// Irreducibility over the coefficient field.
    pub fn is_irreducible(&self) -> Result<bool> {
        let n = match self.degree() {
            None | Some(0) => return Err(Error::ConstantInput),
            Some(n) => n,
        };
        if n == 1 {
            return Ok(true);
        }
        let q = self.field.order() as u64;
        let half = (n / 2) as u32;
        if n <= 8 && q.checked_pow(half).is_some_and(|c| c <= 4096) {
            Ok(self.is_irreducible_by_trial_division())
        } else {
            self.is_irreducible_by_frobenius()
        }
    }

    /// Trial division by every monic polynomial of degree at most n/2.
    pub(crate) fn is_irreducible_by_trial_division(&self) -> bool {
        let n = self.degree().unwrap_or(0);
        for d in 1..=n / 2 {
            for g in monic_polys(&self.field, d) {
                if g.divides(self) {
                    return false;
                }
            }
        }
        true
    }

    /// Rabin's test: x^{q^n} = x mod f and gcd(x^{q^{n/r}} - x, f) = 1 for
    /// every prime r dividing n.
    pub(crate) fn is_irreducible_by_frobenius(&self) -> Result<bool> {
        let f = self.monic();
        let n = f.degree().ok_or(Error::ConstantInput)?;
        let q = self.field.order() as u64;
        let x = Self::x(&self.field);
        // powers[i] = x^{q^i} mod f
        let mut powers = vec![x.rem(&f)?];
        for i in 1..=n {
            let next = powers[i - 1].pow_mod(q, &f)?;
            powers.push(next);
        }
        if powers[n] != x.rem(&f)? {
            return Ok(false);
        }
        let mut m = n;
        let mut r = 2;
        let mut primes = Vec::new();
        while r * r <= m {
            if m % r == 0 {
                primes.push(r);
                while m % r == 0 {
                    m /= r;
                }
            }
            r += 1;
        }
        if m > 1 {
            primes.push(m);
        }
        for r in primes {
            let h = powers[n / r].sub(&x);
            if !f.gcd(&h)?.is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Factorization into monic irreducibles with multiplicities, sorted.
    /// The leading coefficient is dropped.
    pub fn factor(&self) -> Result<Vec<(Polynomial, u32)>> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let f = self.monic();
        if f.is_constant() {
            return Ok(Vec::new());
        }
        let mut primes = berlekamp(&radical_monic(&f))?;
        primes.sort();
        let mut out = Vec::with_capacity(primes.len());
        for p in primes {
            let mut rest = f.clone();
            let mut e = 0;
            while let Some(q) = rest.div_exact(&p) {
                rest = q;
                e += 1;
            }
            out.push((p, e));
        }
        Ok(out)
    }

    /// Canonical text in the CLI grammar.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

fn radical_monic(f: &Polynomial) -> Polynomial {
    let field = f.field();
    if f.is_constant() {
        return Polynomial::one(field);
    }
    let d = f.derivative();
    if d.is_zero() {
        // f = h(x)^p with h obtained by p-th roots of the coefficients of x^{pi}
        let p = field.characteristic() as usize;
        let h: Vec<u32> = f.coeffs.iter().step_by(p).map(|&c| field.frobenius_root(c)).collect();
        return radical_monic(&Polynomial::new(field, h).monic());
    }
    let g = f.gcd(&d).expect("f nonzero");
    // w collects the primes whose multiplicity is prime to p, each once
    let w = f.div_exact(&g).expect("gcd divides").monic();
    if g.is_constant() {
        return w;
    }
    let rg = radical_monic(&g);
    let common = w.gcd(&rg).expect("nonzero");
    w.mul(&rg.div_exact(&common).expect("gcd divides")).monic()
}

/// Berlekamp splitting of a squarefree monic polynomial.
fn berlekamp(r: &Polynomial) -> Result<Vec<Polynomial>> {
    let field = r.field().clone();
    let n = r.degree().unwrap_or(0);
    if n <= 1 {
        return Ok(if n == 1 { vec![r.clone()] } else { Vec::new() });
    }
    let q = field.order() as u64;
    let xq = Polynomial::x(&field).pow_mod(q, r)?;
    // rows of Q - I: x^{iq} mod r minus x^i
    let mut rows = Vec::with_capacity(n);
    let mut cur = Polynomial::one(&field);
    for i in 0..n {
        let mut row: Vec<u32> = (0..n).map(|j| cur.coeff(j)).collect();
        row[i] = field.sub(row[i], 1);
        rows.push(row);
        cur = cur.mul(&xq).rem(r)?;
    }
    // v is in the Berlekamp subalgebra iff sum_i v_i row_i = 0
    let transposed: Vec<Vec<u32>> = (0..n).map(|j| (0..n).map(|i| rows[i][j]).collect()).collect();
    let basis = linalg::nullspace(&field, &transposed, n);
    let k = basis.len();
    if k == 1 {
        return Ok(vec![r.clone()]);
    }
    let mut factors = vec![r.clone()];
    for v in basis {
        if factors.len() == k {
            break;
        }
        let vp = Polynomial::new(&field, v);
        if vp.is_constant() {
            continue;
        }
        let mut next = Vec::new();
        for g in factors {
            if g.degree() == Some(1) {
                next.push(g);
                continue;
            }
            let mut rest = g;
            for c in field.elements() {
                if rest.is_constant() {
                    break;
                }
                let h = rest.gcd(&vp.sub(&Polynomial::constant(&field, c)))?;
                if !h.is_constant() && h.degree() < rest.degree() {
                    rest = rest.div_exact(&h).expect("gcd divides").monic();
                    next.push(h);
                }
            }
            if !rest.is_constant() {
                next.push(rest);
            }
        }
        factors = next;
    }
    if factors.len() != k {
        return Err(Error::Internal(format!("Berlekamp produced {} of {k} factors", factors.len())));
    }
    Ok(factors)
}

/// All monic polynomials of degree `d`, in order of their lower coefficients'
/// encoding (constant term varying fastest).
pub fn monic_polys(field: &FieldSpec, d: usize) -> impl Iterator<Item = Polynomial> + '_ {
    let q = field.order() as u64;
    let count = q.checked_pow(d as u32).expect("enumeration too large");
    (0..count).map(move |mut idx| {
        let mut v = Vec::with_capacity(d + 1);
        for _ in 0..d {
            v.push((idx % q) as u32);
            idx /= q;
        }
        v.push(1);
        Polynomial::new(field, v)
    })
}

/// All polynomials of degree at most `d` (including zero).
pub fn polys_up_to(field: &FieldSpec, d: usize) -> impl Iterator<Item = Polynomial> + '_ {
    let q = field.order() as u64;
    let count = q.checked_pow(d as u32 + 1).expect("enumeration too large");
    (0..count).map(move |mut idx| {
        let mut v = Vec::with_capacity(d + 1);
        for _ in 0..=d {
            v.push((idx % q) as u32);
            idx /= q;
        }
        Polynomial::new(field, v)
    })
}

impl PartialOrd for Polynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree first, then coefficients from the top down.
impl Ord for Polynomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg()
            .cmp(&other.deg())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let field = &self.field;
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let cs = field.format_value(c);
            let mono = match i {
                0 => {
                    terms.push(cs);
                    continue;
                }
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            terms.push(if c == 1 {
                mono
            } else if field.value_is_compound(c) {
                format!("({cs})*{mono}")
            } else {
                format!("{cs}*{mono}")
            });
        }
        f.write_str(&terms.join("+"))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

macro_rules! poly_op {
    ($tr:ident, $m:ident) => {
        impl std::ops::$tr<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &Polynomial) -> Polynomial {
                Polynomial::$m(self, rhs)
            }
        }
        impl std::ops::$tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                Polynomial::$m(&self, &rhs)
            }
        }
    };
}

poly_op!(Add, add);
poly_op!(Sub, sub);
poly_op!(Mul, mul);

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::neg(self)
    }
}
