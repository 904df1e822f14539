//! The rational function field K(x): rational functions, places, divisors,
//! heights, Möbius changes of the generator, and Laurent expansions at the
//! infinite place.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::ff::FieldSpec;
use crate::poly::Polynomial;

/// A quotient of polynomials with coprime numerator and monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero(num.field()));
        }
        let g = num.gcd(&den)?;
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        let lc = den.leading();
        if lc != 1 {
            let inv = num.field().inv(lc).expect("nonzero");
            num = num.scale(inv);
            den = den.scale(inv);
        }
        Ok(RationalFunction { num, den })
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let den = Polynomial::one(p.field());
        RationalFunction { num: p, den }
    }

    pub fn zero(field: &FieldSpec) -> Self {
        Self::from_poly(Polynomial::zero(field))
    }

    pub fn one(field: &FieldSpec) -> Self {
        Self::from_poly(Polynomial::one(field))
    }

    pub fn constant(field: &FieldSpec, c: u32) -> Self {
        Self::from_poly(Polynomial::constant(field, c))
    }

    pub fn x(field: &FieldSpec) -> Self {
        Self::from_poly(Polynomial::x(field))
    }

    pub fn parse(field: &FieldSpec, text: &str) -> Result<Self> {
        crate::parse::parse_rational(field, text)
    }

    pub fn field(&self) -> &FieldSpec {
        self.num.field()
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn as_polynomial(&self) -> Option<Polynomial> {
        self.den.is_one().then(|| self.num.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::new(self.num.add(&o.num), self.den.clone()).expect("nonzero den");
        }
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        Self::new(num, self.den.mul(&o.den)).expect("nonzero den")
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero den")
    }

    pub fn scale(&self, c: u32) -> Self {
        if c == 0 {
            return Self::zero(self.field());
        }
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let e = e.unsigned_abs();
        Ok(RationalFunction { num: base.num.pow(e), den: base.den.pow(e) })
    }

    /// v_P(f); `ZeroInput` for f = 0, whose valuation is +infinity.
    pub fn valuation(&self, place: &Place) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(match place {
            Place::Infinite => self.den.deg() - self.num.deg(),
            Place::Finite(p) => multiplicity(&self.num, p) - multiplicity(&self.den, p),
        })
    }

    /// Degree of the zero divisor, computed without factoring.
    pub fn zero_degree(&self) -> u64 {
        let (n, d) = (self.num.deg(), self.den.deg());
        (n + (d - n).max(0)) as u64
    }

    /// Degree of the pole divisor, computed without factoring.
    pub fn pole_degree(&self) -> u64 {
        let (n, d) = (self.num.deg(), self.den.deg());
        (d + (n - d).max(0)) as u64
    }

    /// H(f) = deg (f)_0 = deg (f)_inf.
    pub fn height(&self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let (z, p) = (self.zero_degree(), self.pole_degree());
        if z != p {
            return Err(Error::Internal(format!("zero degree {z} != pole degree {p}")));
        }
        Ok(z)
    }

    /// Zero and pole divisors, by factoring numerator and denominator.
    pub fn divisors(&self) -> Result<(Divisor, Divisor)> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let mut zero = Divisor::new();
        let mut pole = Divisor::new();
        for (p, e) in self.num.factor()? {
            zero.add(Place::Finite(p), e as i64);
        }
        for (p, e) in self.den.factor()? {
            pole.add(Place::Finite(p), e as i64);
        }
        let v_inf = self.den.deg() - self.num.deg();
        match v_inf.cmp(&0) {
            Ordering::Greater => zero.add(Place::Infinite, v_inf),
            Ordering::Less => pole.add(Place::Infinite, -v_inf),
            Ordering::Equal => {}
        }
        Ok((zero, pole))
    }

    /// f((a x + b) / (c x + d)).
    pub fn mobius_substitute(&self, m: &Mobius) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let field = self.field();
        let lin_num = Polynomial::new(field, vec![m.b, m.a]);
        let lin_den = Polynomial::new(field, vec![m.d, m.c]);
        let homog = |p: &Polynomial| -> Polynomial {
            let n = p.degree().unwrap_or(0);
            let mut acc = Polynomial::zero(field);
            for (i, &c) in p.coeffs().iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let term = lin_num.pow(i as u64).mul(&lin_den.pow((n - i) as u64)).scale(c);
                acc = acc.add(&term);
            }
            acc
        };
        let (nn, nd) = (self.num.degree().unwrap_or(0), self.den.degree().unwrap_or(0));
        let num = homog(&self.num).mul(&lin_den.pow(nd as u64));
        let den = homog(&self.den).mul(&lin_den.pow(nn as u64));
        Self::new(num, den).expect("invertible substitution keeps the denominator nonzero")
    }

    /// Expansion in descending powers of x with `terms` coefficients.
    pub fn series_at_infinity(&self, terms: usize) -> Result<LaurentSeries> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let n = LaurentSeries::from_poly(&self.num, -self.num.deg() + terms as i64);
        let d = LaurentSeries::from_poly(&self.den, -self.den.deg() + terms as i64);
        n.div(&d)
    }

    /// Sort key used for deterministic enumeration: height, then numerator,
    /// then denominator.
    fn sort_key(&self) -> (u64, &Polynomial, &Polynomial) {
        (self.pole_degree(), &self.num, &self.den)
    }
}

fn multiplicity(f: &Polynomial, p: &Polynomial) -> i64 {
    let mut rest = f.clone();
    let mut e = 0;
    while let Some(q) = rest.div_exact(p) {
        rest = q;
        e += 1;
    }
    e
}

impl PartialOrd for RationalFunction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RationalFunction {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

fn is_compound(p: &Polynomial) -> bool {
    p.coeffs().iter().filter(|&&c| c != 0).count() > 1
        || p.coeffs().last().is_some_and(|&c| p.field().value_is_compound(c))
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Polynomial| {
            if is_compound(p) {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        // a monomial denominator with a coefficient would bind wrongly without
        // parentheses, but canonical denominators are monic
        let den = if self.den.coeffs().iter().filter(|&&c| c != 0).count() > 1 {
            format!("({})", self.den)
        } else {
            self.den.to_string()
        };
        write!(f, "{}/{}", wrap(&self.num), den)
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A place of K(x): the infinite place or a monic irreducible polynomial.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Place {
    Infinite,
    Finite(Polynomial),
}

impl Place {
    pub fn finite(p: Polynomial) -> Result<Self> {
        if p.is_constant() {
            return Err(Error::ConstantInput);
        }
        if !p.is_monic() || !p.is_irreducible()? {
            return Err(Error::BadPlaceSet(format!("{p} is not monic irreducible")));
        }
        Ok(Place::Finite(p))
    }

    /// The degree-one place x - a.
    pub fn point(field: &FieldSpec, a: u32) -> Self {
        Place::Finite(Polynomial::linear(field, a))
    }

    pub fn parse(field: &FieldSpec, text: &str) -> Result<Self> {
        if text.trim() == "inf" {
            return Ok(Place::Infinite);
        }
        Place::finite(Polynomial::parse(field, text)?)
    }

    pub fn degree(&self) -> usize {
        match self {
            Place::Infinite => 1,
            Place::Finite(p) => p.degree().unwrap_or(0),
        }
    }

    /// For degree-one places, the point a with P = (x - a); `None` at infinity.
    pub fn as_point(&self) -> Option<u32> {
        match self {
            Place::Finite(p) if p.degree() == Some(1) => Some(p.field().neg(p.coeff(0))),
            _ => None,
        }
    }

    /// Order by printed text; used for deterministic tie-breaking.
    pub fn text_cmp(&self, other: &Self) -> Ordering {
        self.to_string().cmp(&other.to_string())
    }
}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Place {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Place::Infinite, Place::Infinite) => Ordering::Equal,
            (Place::Infinite, _) => Ordering::Less,
            (_, Place::Infinite) => Ordering::Greater,
            (Place::Finite(a), Place::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => f.write_str("inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl fmt::Debug for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Finite formal sum of places.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Divisor {
    terms: BTreeMap<Place, i64>,
}

impl Divisor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, place: Place, mult: i64) {
        let e = self.terms.entry(place).or_insert(0);
        *e += mult;
        if *e == 0 {
            self.terms.retain(|_, m| *m != 0);
        }
    }

    pub fn multiplicity(&self, place: &Place) -> i64 {
        self.terms.get(place).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|(p, m)| m * p.degree() as i64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Place, i64)> {
        self.terms.iter().map(|(p, &m)| (p, m))
    }

    pub fn support(&self) -> impl Iterator<Item = &Place> {
        self.terms.keys()
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (p, &m)) in self.terms.iter().enumerate() {
            let sign = if m < 0 { "-" } else { "+" };
            match (i, m < 0) {
                (0, false) => {}
                (0, true) => f.write_str("-")?,
                _ => write!(f, " {sign} ")?,
            }
            write!(f, "{}*({p})", m.abs())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The substitution x -> (a x + b) / (c x + d).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mobius {
    field: FieldSpec,
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl Mobius {
    pub fn new(field: &FieldSpec, a: u32, b: u32, c: u32, d: u32) -> Result<Self> {
        let det = field.sub(field.mul(a, d), field.mul(b, c));
        if det == 0 {
            return Err(Error::SingularMatrix);
        }
        Ok(Mobius { field: field.clone(), a, b, c, d })
    }

    pub fn identity(field: &FieldSpec) -> Self {
        Mobius { field: field.clone(), a: 1, b: 0, c: 0, d: 1 }
    }

    /// x -> 1/x
    pub fn swap(field: &FieldSpec) -> Self {
        Mobius { field: field.clone(), a: 0, b: 1, c: 1, d: 0 }
    }

    /// x -> x + s
    pub fn translate(field: &FieldSpec, s: u32) -> Self {
        Mobius { field: field.clone(), a: 1, b: s, c: 0, d: 1 }
    }

    /// x -> alpha + 1/x, which moves the place x - alpha to infinity.
    pub fn to_infinity(field: &FieldSpec, alpha: u32) -> Self {
        Mobius { field: field.clone(), a: alpha, b: 1, c: 1, d: 0 }
    }

    /// Matrix product self * other. Substituting `self` and then `other`
    /// equals substituting `self.compose(other)`.
    pub fn compose(&self, o: &Mobius) -> Mobius {
        let f = &self.field;
        let dot = |x: u32, y: u32, z: u32, w: u32| f.add(f.mul(x, y), f.mul(z, w));
        Mobius {
            field: f.clone(),
            a: dot(self.a, o.a, self.b, o.c),
            b: dot(self.a, o.b, self.b, o.d),
            c: dot(self.c, o.a, self.d, o.c),
            d: dot(self.c, o.b, self.d, o.d),
        }
    }

    pub fn inverse(&self) -> Mobius {
        let f = &self.field;
        Mobius { field: f.clone(), a: self.d, b: f.neg(self.b), c: f.neg(self.c), d: self.a }
    }

    /// Image of a point of P^1 (`None` is infinity).
    pub fn apply(&self, point: Option<u32>) -> Option<u32> {
        let f = &self.field;
        match point {
            None => f.div(self.a, self.c),
            Some(x) => {
                let den = f.add(f.mul(self.c, x), self.d);
                f.div(f.add(f.mul(self.a, x), self.b), den)
            }
        }
    }

    /// The place of `g = f∘self` that corresponds to the place `place` of
    /// `f`, i.e. the preimage of `place` under the map of P^1.
    pub fn pullback_place(&self, place: &Place) -> Place {
        match place {
            Place::Infinite => match self.inverse().apply(None) {
                None => Place::Infinite,
                Some(x) => Place::point(&self.field, x),
            },
            Place::Finite(p) => {
                let g = RationalFunction::from_poly(p.clone()).mobius_substitute(self);
                if g.numerator().is_constant() {
                    Place::Infinite
                } else {
                    Place::Finite(g.numerator().monic())
                }
            }
        }
    }
}

/// A Laurent series in t = 1/x, i.e. in descending powers of x.
///
/// `coeffs[i]` is the coefficient of `t^(val + i)`; coefficients of
/// `t^e` for `e >= val + coeffs.len()` are unknown.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    field: FieldSpec,
    val: i64,
    coeffs: Vec<u32>,
}

impl LaurentSeries {
    /// O(t^abs_prec).
    pub fn zero(field: &FieldSpec, abs_prec: i64) -> Self {
        LaurentSeries { field: field.clone(), val: abs_prec, coeffs: Vec::new() }
    }

    /// Build from coefficients of t^val, t^(val+1), ...
    pub fn from_coeffs(field: &FieldSpec, val: i64, coeffs: Vec<u32>) -> Self {
        let mut s = LaurentSeries { field: field.clone(), val, coeffs };
        s.normalize();
        s
    }

    /// A polynomial in x known to absolute t-precision `abs_prec`.
    pub fn from_poly(p: &Polynomial, abs_prec: i64) -> Self {
        let field = p.field();
        if p.is_zero() {
            return Self::zero(field, abs_prec);
        }
        let val = -p.deg();
        let len = (abs_prec - val).max(0) as usize;
        let coeffs = (0..len)
            .map(|j| {
                let e = p.deg() - j as i64;
                if e >= 0 { p.coeff(e as usize) } else { 0 }
            })
            .collect();
        Self::from_coeffs(field, val, coeffs)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|&c| c != 0).unwrap_or(self.coeffs.len());
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.val += lead as i64;
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// Whether no nonzero coefficient is known.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// t-adic valuation (= v_inf); for a zero series, its absolute precision.
    pub fn valuation(&self) -> i64 {
        self.val
    }

    /// Leading exponent in x, i.e. -v_inf.
    pub fn leading_exponent(&self) -> Option<i64> {
        (!self.is_zero()).then_some(-self.val)
    }

    pub fn leading_coeff(&self) -> u32 {
        self.coeffs.first().copied().unwrap_or(0)
    }

    /// Number of known coefficients from the leading term on.
    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficients of t^e with e below this bound are known.
    pub fn abs_precision(&self) -> i64 {
        self.val + self.coeffs.len() as i64
    }

    /// Coefficient of t^e, or `None` when beyond the precision.
    pub fn t_coeff(&self, e: i64) -> Option<u32> {
        if e >= self.abs_precision() {
            return None;
        }
        if e < self.val {
            return Some(0);
        }
        Some(self.coeffs[(e - self.val) as usize])
    }

    /// Coefficient of x^e.
    pub fn x_coeff(&self, e: i64) -> Option<u32> {
        self.t_coeff(-e)
    }

    pub fn truncate_abs(&self, abs_prec: i64) -> Self {
        if abs_prec >= self.abs_precision() {
            return self.clone();
        }
        if abs_prec <= self.val {
            return Self::zero(&self.field, abs_prec);
        }
        let mut s = self.clone();
        s.coeffs.truncate((abs_prec - self.val) as usize);
        s
    }

    pub fn add(&self, o: &Self) -> Self {
        let f = &self.field;
        let prec = self.abs_precision().min(o.abs_precision());
        let val = self.val.min(o.val).min(prec);
        let coeffs = (val..prec)
            .map(|e| f.add(self.t_coeff(e).unwrap(), o.t_coeff(e).unwrap()))
            .collect();
        Self::from_coeffs(f, val, coeffs)
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        LaurentSeries { field: f.clone(), val: self.val, coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: u32) -> Self {
        let f = &self.field;
        Self::from_coeffs(f, self.val, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Multiply by t^e (x^-e).
    pub fn shift(&self, e: i64) -> Self {
        LaurentSeries { field: self.field.clone(), val: self.val + e, coeffs: self.coeffs.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let f = &self.field;
        let len = self.coeffs.len().min(o.coeffs.len());
        let val = self.val + o.val;
        if len == 0 {
            // one factor is O(t^P); the product is O(t^(P + val of the other))
            let prec = (self.abs_precision() + o.val).min(o.abs_precision() + self.val);
            return Self::zero(f, prec);
        }
        Self::from_coeffs(f, val, ps_mul(f, &self.coeffs, &o.coeffs, len))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = &self.field;
        Ok(Self::from_coeffs(f, -self.val, ps_inv(f, &self.coeffs, self.coeffs.len())))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    /// Multiply by an exact polynomial in x.
    pub fn mul_poly(&self, p: &Polynomial) -> Self {
        if p.is_zero() {
            return Self::zero(&self.field, self.abs_precision().max(0));
        }
        // p is exact, so represent it with more precision than needed
        let ps = Self::from_poly(p, -p.deg() + self.coeffs.len() as i64 + 1);
        self.mul(&ps)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let e = -(self.val + i as i64);
            let cs = self.field.format_value(c);
            let cs = if self.field.value_is_compound(c) { format!("({cs})") } else { cs };
            terms.push(match (e, c) {
                (0, _) => cs,
                (1, 1) => "x".to_string(),
                (1, _) => format!("{cs}*x"),
                (_, 1) => format!("x^{e}"),
                _ => format!("{cs}*x^{e}"),
            });
        }
        terms.push(format!("O(x^{})", -self.abs_precision()));
        f.write_str(&terms.join(" + "))
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Truncated product of power series.
fn ps_mul(f: &FieldSpec, a: &[u32], b: &[u32], n: usize) -> Vec<u32> {
    let mut out = vec![0u32; n];
    for (i, &x) in a.iter().enumerate().take(n) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n - i) {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    out
}

/// Truncated inverse of a power series with nonzero constant term.
fn ps_inv(f: &FieldSpec, a: &[u32], n: usize) -> Vec<u32> {
    let inv0 = f.inv(a[0]).expect("unit series");
    let mut out = vec![0u32; n];
    if n == 0 {
        return out;
    }
    out[0] = inv0;
    for k in 1..n {
        let mut s = 0u32;
        for j in 1..=k.min(a.len() - 1) {
            s = f.add(s, f.mul(a[j], out[k - j]));
        }
        out[k] = f.neg(f.mul(s, inv0));
    }
    out
}

/// Square root of a power series with constant term 1, by Newton iteration
/// z <- (z + u/z) / 2 (odd characteristic).
fn ps_sqrt_one(f: &FieldSpec, u: &[u32], n: usize) -> Vec<u32> {
    debug_assert_eq!(u[0], 1);
    let half = f.inv(2).expect("odd characteristic");
    let mut z = vec![1u32];
    let mut prec = 1;
    while prec < n {
        prec = (2 * prec).min(n);
        let zi = ps_inv(f, &z, prec);
        let q = ps_mul(f, &u[..prec.min(u.len())], &zi, prec);
        z.resize(prec, 0);
        z = (0..prec).map(|i| f.mul(f.add(z[i], q[i]), half)).collect();
    }
    z.truncate(n);
    z
}

/// Behaviour of the infinite place of K(x) in the quadratic extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
    NotApplicable,
}

impl fmt::Display for Splitting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Splitting::Split => "split",
            Splitting::Inert => "inert",
            Splitting::Ramified => "ramified",
            Splitting::NotApplicable => "not-applicable",
        })
    }
}

/// Y^2 = f (odd characteristic) or Y^2 + B Y + C = 0 (characteristic 2).
#[derive(Debug, Clone, Copy)]
pub enum QuadraticEquation<'a> {
    Square { f: &'a Polynomial },
    ArtinSchreier { b: &'a Polynomial, c: &'a Polynomial },
}

#[derive(Debug, Clone)]
pub struct RootsAtInfinity {
    pub splitting: Splitting,
    pub roots: Vec<LaurentSeries>,
}

/// Roots of the quadratic equation in the completion at the infinite place,
/// each carrying at least `terms` known coefficients (fewer only when the
/// root vanishes at infinity to high order).
pub fn quadratic_roots_at_infinity(eq: QuadraticEquation<'_>, terms: usize) -> Result<RootsAtInfinity> {
    match eq {
        QuadraticEquation::Square { f } => square_roots(f, terms),
        QuadraticEquation::ArtinSchreier { b, c } => artin_schreier_roots(b, c, terms),
    }
}

fn square_roots(f: &Polynomial, terms: usize) -> Result<RootsAtInfinity> {
    let field = f.field();
    if field.characteristic() == 2 {
        return Err(Error::DegenerateEquation("Y^2 = f is inseparable in characteristic 2"));
    }
    if f.is_zero() {
        return Err(Error::ZeroInput);
    }
    let d = f.deg();
    if d % 2 != 0 {
        return Ok(RootsAtInfinity { splitting: Splitting::Ramified, roots: Vec::new() });
    }
    let lc = f.leading();
    let Some(s) = field.sqrt(lc) else {
        return Ok(RootsAtInfinity { splitting: Splitting::Inert, roots: Vec::new() });
    };
    // f = lc x^d u(t) with u(0) = 1
    let inv_lc = field.inv(lc).expect("nonzero");
    let u: Vec<u32> = (0..terms)
        .map(|j| {
            let e = d - j as i64;
            if e >= 0 { field.mul(f.coeff(e as usize), inv_lc) } else { 0 }
        })
        .collect();
    let r = ps_sqrt_one(field, &u, terms);
    let root = LaurentSeries::from_coeffs(field, -d / 2, r).scale(s);
    let other = root.neg();
    Ok(RootsAtInfinity { splitting: Splitting::Split, roots: vec![root, other] })
}

fn artin_schreier_roots(b: &Polynomial, c: &Polynomial, terms: usize) -> Result<RootsAtInfinity> {
    let field = b.field();
    if field.characteristic() != 2 {
        return Err(Error::WrongCharacteristic { expected: "2", found: field.characteristic() });
    }
    if b.is_zero() {
        return Err(Error::DegenerateEquation("B = 0 makes Y^2 + C inseparable"));
    }
    let db = b.deg();
    // Y = B w turns the equation into w^2 + w = C / B^2
    let prec = terms as i64 + 2 * db + 2;
    let mut w_neg: BTreeMap<i64, u32> = BTreeMap::new();
    let mut r = if c.is_zero() {
        LaurentSeries::zero(field, prec)
    } else {
        let cs = LaurentSeries::from_poly(c, prec + 2 * db);
        let bs = LaurentSeries::from_poly(&b.mul(b), prec + 2 * db);
        cs.div(&bs)?.truncate_abs(prec)
    };
    // clear the polar part: even orders are absorbed into w, odd orders ramify
    while !r.is_zero() && r.valuation() < 0 {
        let v = r.valuation();
        if v % 2 != 0 {
            return Ok(RootsAtInfinity { splitting: Splitting::Ramified, roots: Vec::new() });
        }
        let s = field.frobenius_root(r.leading_coeff());
        w_neg.insert(v / 2, s);
        let mut corr = vec![0u32; (prec - v).max(1) as usize];
        corr[0] = field.mul(s, s);
        corr[(v / 2 - v) as usize] = field.add(corr[(v / 2 - v) as usize], s);
        let corr = LaurentSeries::from_coeffs(field, v, corr);
        r = r.sub(&corr);
    }
    let r0 = r.t_coeff(0).unwrap_or(0);
    let Some(a0) = field.artin_schreier_root(r0)? else {
        return Ok(RootsAtInfinity { splitting: Splitting::Inert, roots: Vec::new() });
    };
    let n = prec.max(1) as usize;
    let mut w = vec![0u32; n];
    w[0] = a0;
    for i in 1..n {
        let ri = r.t_coeff(i as i64).unwrap_or(0);
        w[i] = if i % 2 == 0 { field.add(ri, field.mul(w[i / 2], w[i / 2])) } else { ri };
    }
    let lowest = w_neg.keys().next().copied().unwrap_or(0);
    let mut full = vec![0u32; (n as i64 - lowest) as usize];
    for (&e, &s) in &w_neg {
        full[(e - lowest) as usize] = s;
    }
    for (i, &wi) in w.iter().enumerate() {
        full[(i as i64 - lowest) as usize] = wi;
    }
    let w1 = LaurentSeries::from_coeffs(field, lowest, full);
    let w1 = if w1.is_zero() { LaurentSeries::zero(field, n as i64) } else { w1 };
    let w1 = w1.add(&LaurentSeries::zero(field, n as i64));
    let w2 = w1.add(&LaurentSeries::from_poly(&Polynomial::one(field), n as i64));
    let roots = [w1, w2]
        .iter()
        .map(|w| {
            let y = w.mul_poly(b);
            let keep = y.valuation() + terms as i64;
            y.truncate_abs(keep.min(y.abs_precision()))
        })
        .collect();
    Ok(RootsAtInfinity { splitting: Splitting::Split, roots })
}

/// Residual of a claimed root: Y^2 - f or Y^2 + B Y + C, as a series.
pub fn root_residual(eq: QuadraticEquation<'_>, y: &LaurentSeries) -> LaurentSeries {
    match eq {
        QuadraticEquation::Square { f } => {
            let fs = LaurentSeries::from_poly(f, y.abs_precision() + y.valuation() + 1);
            y.mul(y).sub(&fs)
        }
        QuadraticEquation::ArtinSchreier { b, c } => {
            let yy = y.mul(y);
            let by = y.mul_poly(b);
            let s = yy.add(&by);
            s.add(&LaurentSeries::from_poly(c, s.abs_precision()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(p: u32) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    fn rf(field: &FieldSpec, s: &str) -> RationalFunction {
        RationalFunction::parse(field, s).unwrap()
    }

    fn place(field: &FieldSpec, s: &str) -> Place {
        Place::parse(field, s).unwrap()
    }

    #[test]
    fn valuation_examples() {
        let f5 = gf(5);
        assert_eq!(rf(&f5, "x^2+1").valuation(&Place::Infinite).unwrap(), -2);
        assert_eq!(rf(&f5, "x^2+1").valuation(&place(&f5, "x+2")).unwrap(), 1);
        let f2 = gf(2);
        assert_eq!(rf(&f2, "(x^2+x)/x^3").valuation(&place(&f2, "x")).unwrap(), -2);
        assert_eq!(RationalFunction::zero(&f2).valuation(&Place::Infinite), Err(Error::ZeroInput));
    }

    #[test]
    fn height_examples() {
        let f5 = gf(5);
        assert_eq!(rf(&f5, "x^2+1").height().unwrap(), 2);
        assert_eq!(rf(&f5, "3").height().unwrap(), 0);
        assert_eq!(rf(&f5, "(x^2+1)/x").height().unwrap(), 2);
        assert_eq!(RationalFunction::zero(&f5).height(), Err(Error::ZeroInput));
    }

    #[test]
    fn divisor_examples() {
        let f2 = gf(2);
        let (z, p) = rf(&f2, "x").divisors().unwrap();
        assert_eq!(z.to_string(), "1*(x)");
        assert_eq!(p.to_string(), "1*(inf)");
        let f5 = gf(5);
        let (z, p) = rf(&f5, "(x^2+1)/x").divisors().unwrap();
        assert_eq!(z.to_string(), "1*(x+2) + 1*(x+3)");
        assert_eq!(p.multiplicity(&Place::Infinite), 1);
        assert_eq!(p.multiplicity(&place(&f5, "x")), 1);
        let (z, p) = rf(&f5, "3").divisors().unwrap();
        assert!(z.is_empty() && p.is_empty());
        let mut d = Divisor::new();
        d.add(place(&f5, "x+2"), 1);
        d.add(place(&f5, "x+3"), 1);
        d.add(Place::Infinite, -2);
        assert_eq!(d.to_string(), "-2*(inf) + 1*(x+2) + 1*(x+3)");
        assert_eq!(d.degree(), 0);
    }

    #[test]
    fn mobius_examples() {
        let f5 = gf(5);
        let f = rf(&f5, "x^3+2x/(x+1)");
        assert_eq!(f.mobius_substitute(&Mobius::identity(&f5)), f);
        let sq = rf(&f5, "x^2").mobius_substitute(&Mobius::swap(&f5));
        assert_eq!(sq, rf(&f5, "1/x^2"));
        assert_eq!(Mobius::swap(&f5).pullback_place(&Place::Infinite), place(&f5, "x"));
        let shifted = rf(&f5, "x+1").mobius_substitute(&Mobius::translate(&f5, 4));
        assert_eq!(shifted, rf(&f5, "x"));
        assert_eq!(Mobius::new(&f5, 1, 2, 2, 4), Err(Error::SingularMatrix));
    }

    #[test]
    fn mobius_moves_place_to_infinity() {
        let f5 = gf(5);
        let m = Mobius::to_infinity(&f5, 3);
        assert_eq!(m.pullback_place(&Place::point(&f5, 3)), Place::Infinite);
        assert_eq!(m.pullback_place(&Place::Infinite), place(&f5, "x"));
        // a pole at x = 3 becomes a pole at infinity
        let g = rf(&f5, "1/(x-3)^2").mobius_substitute(&m);
        assert_eq!(g, rf(&f5, "x^2"));
        // a degree-two place pulls back to a degree-two place
        let p2 = place(&f5, "x^2+2");
        let back = m.pullback_place(&p2);
        assert_eq!(back.degree(), 2);
    }

    #[test]
    fn series_examples() {
        let f5 = gf(5);
        let s = rf(&f5, "x^2+1").series_at_infinity(5).unwrap();
        assert_eq!(s.leading_exponent(), Some(2));
        assert_eq!(s.x_coeff(2), Some(1));
        assert_eq!(s.x_coeff(0), Some(1));
        assert_eq!(s.x_coeff(1), Some(0));
        let f2 = gf(2);
        let g = rf(&f2, "1/(x+1)").series_at_infinity(8).unwrap();
        assert_eq!(g.leading_exponent(), Some(-1));
        // (x+1) * series = 1 to precision
        let back = g.mul_poly(&Polynomial::parse(&f2, "x+1").unwrap());
        assert_eq!(back.t_coeff(0), Some(1));
        for e in 1..back.abs_precision() {
            assert_eq!(back.t_coeff(e), Some(0));
        }
        for e in 1..=8 {
            assert_eq!(g.x_coeff(-e), Some(1));
        }
        let h = rf(&f5, "1/x").series_at_infinity(4).unwrap();
        assert_eq!(h.leading_exponent(), Some(-1));
        assert_eq!(h.precision(), 4);
        assert_eq!(h.x_coeff(-2), Some(0));
    }

    #[test]
    fn odd_char_roots() {
        let f5 = gf(5);
        let f = Polynomial::parse(&f5, "x^2+1").unwrap();
        let eq = QuadraticEquation::Square { f: &f };
        let r = quadratic_roots_at_infinity(eq, 24).unwrap();
        assert_eq!(r.splitting, Splitting::Split);
        assert_eq!(r.roots.len(), 2);
        let y = &r.roots[0];
        // x + 3x^-1 + ...
        assert_eq!(y.x_coeff(1), Some(1));
        assert_eq!(y.x_coeff(0), Some(0));
        assert_eq!(y.x_coeff(-1), Some(3));
        assert_eq!(r.roots[1], y.neg());
        for y in &r.roots {
            assert!(y.precision() >= 24);
            let res = root_residual(eq, y);
            assert!(res.is_zero(), "{res}");
            assert!(res.abs_precision() >= 20);
        }
        let g = Polynomial::parse(&f5, "x").unwrap();
        let r = quadratic_roots_at_infinity(QuadraticEquation::Square { f: &g }, 10).unwrap();
        assert_eq!(r.splitting, Splitting::Ramified);
        assert!(r.roots.is_empty());
        let h = Polynomial::parse(&f5, "2x^2+1").unwrap();
        let r = quadratic_roots_at_infinity(QuadraticEquation::Square { f: &h }, 10).unwrap();
        assert_eq!(r.splitting, Splitting::Inert);
    }

    #[test]
    fn char_two_roots() {
        let f2 = gf(2);
        let b = Polynomial::parse(&f2, "x").unwrap();
        let c = Polynomial::parse(&f2, "x").unwrap();
        let eq = QuadraticEquation::ArtinSchreier { b: &b, c: &c };
        let r = quadratic_roots_at_infinity(eq, 24).unwrap();
        assert_eq!(r.splitting, Splitting::Split);
        let y1 = &r.roots[0];
        let y2 = &r.roots[1];
        // y1 = 1 + x^-1 + x^-3 + ..., y2 = x + 1 + x^-1 + ...
        assert_eq!((y1.x_coeff(0), y1.x_coeff(-1), y1.x_coeff(-2), y1.x_coeff(-3)), (Some(1), Some(1), Some(0), Some(1)));
        assert_eq!((y2.x_coeff(1), y2.x_coeff(0), y2.x_coeff(-1)), (Some(1), Some(1), Some(1)));
        for y in &r.roots {
            assert!(y.precision() >= 24);
            let res = root_residual(eq, y);
            assert!(res.is_zero() && res.abs_precision() >= 20, "{res}");
        }
        let zero = Polynomial::zero(&f2);
        let bad = QuadraticEquation::ArtinSchreier { b: &zero, c: &c };
        assert!(matches!(quadratic_roots_at_infinity(bad, 5), Err(Error::DegenerateEquation(_))));
        // B = 1, C = x: polar part of odd order
        let one = Polynomial::one(&f2);
        let r = quadratic_roots_at_infinity(QuadraticEquation::ArtinSchreier { b: &one, c: &c }, 5).unwrap();
        assert_eq!(r.splitting, Splitting::Ramified);
        // B = x, C = x^2+x over GF(2): residue 1 has no Artin-Schreier root
        let c2 = Polynomial::parse(&f2, "x^2+x").unwrap();
        let r = quadratic_roots_at_infinity(QuadraticEquation::ArtinSchreier { b: &b, c: &c2 }, 5).unwrap();
        assert_eq!(r.splitting, Splitting::Inert);
        // x^2 is absorbed into w, leaving an odd-order pole
        let c3 = Polynomial::parse(&f2, "x^2").unwrap();
        let r = quadratic_roots_at_infinity(QuadraticEquation::ArtinSchreier { b: &one, c: &c3 }, 8).unwrap();
        assert_eq!(r.splitting, Splitting::Ramified);
        let c4 = Polynomial::parse(&f2, "x^4+x^3+x").unwrap();
        let b4 = Polynomial::parse(&f2, "x").unwrap();
        let eq4 = QuadraticEquation::ArtinSchreier { b: &b4, c: &c4 };
        let r = quadratic_roots_at_infinity(eq4, 12).unwrap();
        assert_eq!(r.splitting, Splitting::Split);
        for y in &r.roots {
            assert!(root_residual(eq4, y).is_zero());
        }
    }

    fn arb_rf(p: u32) -> impl Strategy<Value = RationalFunction> {
        (proptest::collection::vec(0..p, 1..6), proptest::collection::vec(0..p, 1..5)).prop_filter_map(
            "nonzero",
            move |(n, d)| {
                let f = FieldSpec::prime(p).unwrap();
                let (n, d) = (Polynomial::new(&f, n), Polynomial::new(&f, d));
                if n.is_zero() || d.is_zero() {
                    return None;
                }
                RationalFunction::new(n, d).ok()
            },
        )
    }

    fn places(field: &FieldSpec) -> Vec<Place> {
        let mut v = vec![Place::Infinite];
        for d in 1..=2 {
            for p in crate::poly::monic_polys(field, d) {
                if p.is_irreducible().unwrap() {
                    v.push(Place::Finite(p));
                }
            }
        }
        v
    }

    proptest! {
        #[test]
        fn product_rule(f in arb_rf(3), g in arb_rf(3)) {
            let field = f.field().clone();
            let fg = f.mul(&g);
            for p in places(&field) {
                prop_assert_eq!(fg.valuation(&p).unwrap(), f.valuation(&p).unwrap() + g.valuation(&p).unwrap());
            }
        }

        #[test]
        fn height_properties(f in arb_rf(3), g in arb_rf(3)) {
            let (z, p) = f.divisors().unwrap();
            let h = f.height().unwrap() as i64;
            prop_assert_eq!(z.degree(), h);
            prop_assert_eq!(p.degree(), h);
            for (pl, m) in z.iter().chain(p.iter()) {
                let v = f.valuation(pl).unwrap();
                prop_assert_eq!(v.abs(), m);
            }
            prop_assert!(f.mul(&g).height().unwrap() <= f.height().unwrap() + g.height().unwrap());
            prop_assert_eq!(h == 0, f.is_constant());
        }

        #[test]
        fn mobius_composes(f in arb_rf(5), a in 0u32..5, b in 0u32..5, c in 0u32..5, d in 0u32..5,
                           a2 in 0u32..5, b2 in 0u32..5, c2 in 0u32..5, d2 in 0u32..5) {
            let field = f.field().clone();
            let (Ok(m), Ok(m2)) = (Mobius::new(&field, a, b, c, d), Mobius::new(&field, a2, b2, c2, d2)) else {
                return Ok(());
            };
            let twice = f.mobius_substitute(&m).mobius_substitute(&m2);
            prop_assert_eq!(twice, f.mobius_substitute(&m.compose(&m2)));
            prop_assert_eq!(f.mobius_substitute(&m).mobius_substitute(&m.inverse()), f);
        }

        #[test]
        fn series_inverts(f in arb_rf(5)) {
            let s = f.series_at_infinity(12).unwrap();
            prop_assert_eq!(s.leading_exponent(), Some(-f.valuation(&Place::Infinite).unwrap()));
            let back = s.mul_poly(f.denominator());
            let num = LaurentSeries::from_poly(f.numerator(), back.abs_precision());
            prop_assert!(back.sub(&num).is_zero());
        }

        #[test]
        fn display_round_trip(f in arb_rf(7)) {
            prop_assert_eq!(RationalFunction::parse(f.field(), &f.to_string()).unwrap(), f);
        }
    }
}
