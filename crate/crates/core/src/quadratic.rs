//! Quadratic orders O_F = K[x, y] over y^2 = f (odd characteristic) and
//! y^2 + B y + C = 0 (characteristic 2): validation, element arithmetic,
//! norms, fundamental units, unit-power recursions, genus and splitting at
//! infinity, and the unit sum number classification.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::ff::FieldSpec;
use crate::funcfield::{quadratic_roots_at_infinity, QuadraticEquation, RootsAtInfinity, Splitting};
use crate::linalg;
use crate::parse;
use crate::poly::Polynomial;

/// One violated curve invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: String,
    pub detail: String,
}

impl Violation {
    fn new(rule: &str, detail: impl Into<String>) -> Self {
        Violation { rule: rule.to_string(), detail: detail.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveSpec {
    OddChar { f: Polynomial },
    CharTwo { b: Polynomial, c: Polynomial },
    CharTwoInseparable { f: Polynomial },
}

fn rejected(v: Vec<Violation>) -> Result<()> {
    if v.is_empty() { Ok(()) } else { Err(Error::CurveRejected(v)) }
}

impl CurveSpec {
    /// y^2 = f in odd characteristic.
    pub fn odd(f: Polynomial) -> Result<Self> {
        let p = f.field().characteristic();
        if p == 2 {
            return Err(Error::WrongCharacteristic { expected: "odd", found: p });
        }
        let mut v = Vec::new();
        if f.is_constant() {
            v.push(Violation::new("constant-f", format!("f = {f} is constant")));
        } else if !f.is_separable()? {
            v.push(Violation::new("not-separable", format!("gcd(f, f') = {} is nonconstant", f.gcd(&f.derivative())?)));
        }
        rejected(v)?;
        Ok(CurveSpec::OddChar { f })
    }

    /// y^2 + B y + C = 0 in characteristic 2.
    pub fn char_two(b: Polynomial, c: Polynomial) -> Result<Self> {
        let p = b.field().characteristic();
        if p != 2 {
            return Err(Error::WrongCharacteristic { expected: "2", found: p });
        }
        if b.field() != c.field() {
            return Err(Error::MixedFields);
        }
        let mut v = Vec::new();
        if b.is_zero() {
            v.push(Violation::new("b-zero", "B = 0; use y^2 = f for the inseparable case"));
        } else if !b.is_monic() {
            v.push(Violation::new("b-not-monic", format!("B = {b} is not monic")));
        }
        if c.is_zero() {
            v.push(Violation::new("c-zero", "C = 0 makes the equation reducible"));
        }
        if !v.is_empty() {
            return Err(Error::CurveRejected(v));
        }
        let rad = b.radical()?;
        match c.div_exact(&rad) {
            None => v.push(Violation::new("radical-b-divides-c", format!("rad(B) = {rad} does not divide C = {c}"))),
            Some(cof) => {
                let g = cof.gcd(&rad)?;
                if !g.is_one() {
                    v.push(Violation::new(
                        "b-factor-simple-in-c",
                        format!("{g} divides C/rad(B) = {cof}; a prime factor of B is not simple in C"),
                    ));
                }
            }
        }
        let excess = c.deg() - 2 * b.deg();
        if excess > 0 && excess % 2 == 0 {
            v.push(Violation::new(
                "degree-parity",
                format!("deg C - 2 deg B = {excess} is positive and even; the form is not normalized at infinity"),
            ));
        }
        if b.is_one() && c.is_constant() && b.field().artin_schreier_root(c.coeff(0))?.is_some() {
            v.push(Violation::new("reducible", format!("y^2 + y + {c} has a root in the constant field")));
        }
        rejected(v)?;
        Ok(CurveSpec::CharTwo { b, c })
    }

    /// y^2 = f in characteristic 2 (purely inseparable extension).
    pub fn inseparable(f: Polynomial) -> Result<Self> {
        let p = f.field().characteristic();
        if p != 2 {
            return Err(Error::WrongCharacteristic { expected: "2", found: p });
        }
        let mut v = Vec::new();
        if f.is_constant() {
            v.push(Violation::new("constant-f", format!("f = {f} is constant")));
        } else if f.sqrt().is_some() {
            v.push(Violation::new("square-f", format!("f = {f} is a square")));
        }
        rejected(v)?;
        Ok(CurveSpec::CharTwoInseparable { f })
    }

    pub fn from_hasse(h: &HasseForm) -> Result<Self> {
        let (b, c) = hasse_to_modified(h)?;
        Self::char_two(b, c)
    }

    /// Parse `y^2 = f`, `y^2 + (B)y + (C) = 0`, or `y^2 + y = g/D`.
    pub fn parse(field: &FieldSpec, text: &str) -> Result<Self> {
        let eq = parse::parse_equation(field, text)?;
        let shape = |msg: &str| Error::CurveRejected(vec![Violation::new("equation-shape", msg)]);
        if eq.y_degree() != 2 {
            return Err(shape("expected an equation of degree 2 in y"));
        }
        let lead = eq.coeff(2);
        let lead = lead
            .as_polynomial()
            .filter(|p| p.is_constant() && !p.is_zero())
            .ok_or_else(|| shape("the coefficient of y^2 must be a nonzero constant"))?;
        let inv = field.inv(lead.coeff(0)).expect("nonzero");
        let c1 = eq.coeff(1).scale(inv);
        let c0 = eq.coeff(0).scale(inv);
        let poly = |r: &crate::funcfield::RationalFunction, what: &str| {
            r.as_polynomial().ok_or_else(|| shape(&format!("the {what} must be a polynomial in x")))
        };
        if field.characteristic() != 2 {
            if !c1.is_zero() {
                return Err(shape("odd characteristic curves are written y^2 = f"));
            }
            return Self::odd(poly(&c0.neg(), "right-hand side")?);
        }
        if c1.is_zero() {
            return Self::inseparable(poly(&c0, "right-hand side")?);
        }
        let b = poly(&c1, "coefficient of y")?;
        if let Some(c) = c0.as_polynomial() {
            return Self::char_two(b, c);
        }
        if !b.is_one() {
            return Err(shape("a rational right-hand side needs the Hasse form y^2 + y = g/D"));
        }
        Self::from_hasse(&HasseForm::from_rational(c0.numerator(), c0.denominator())?)
    }

    pub fn field(&self) -> &FieldSpec {
        match self {
            CurveSpec::OddChar { f } | CurveSpec::CharTwoInseparable { f } => f.field(),
            CurveSpec::CharTwo { b, .. } => b.field(),
        }
    }
}

fn wrap(p: &Polynomial) -> String {
    if p.coeffs().iter().filter(|&&c| c != 0).count() > 1 { format!("({p})") } else { p.to_string() }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveSpec::OddChar { f: g } | CurveSpec::CharTwoInseparable { f: g } => write!(f, "y^2 = {g}"),
            CurveSpec::CharTwo { b, c } => write!(f, "y^2 + ({b})*y + ({c}) = 0"),
        }
    }
}

/// y^2 + y = g / prod p_i^(2 n_i - 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HasseForm {
    pub factors: Vec<(Polynomial, u32)>,
    pub g: Polynomial,
}

impl HasseForm {
    pub fn new(factors: Vec<(Polynomial, u32)>, g: Polynomial) -> Result<Self> {
        let bad = |m: String| Err(Error::BadHasseForm(m));
        if g.field().characteristic() != 2 {
            return Err(Error::WrongCharacteristic { expected: "2", found: g.field().characteristic() });
        }
        if g.is_zero() {
            return bad("numerator g is zero".into());
        }
        for (i, (p, n)) in factors.iter().enumerate() {
            if *n == 0 {
                return bad(format!("exponent of {p} must be positive"));
            }
            if p.is_constant() || !p.is_monic() || !p.is_irreducible()? {
                return bad(format!("{p} is not monic irreducible"));
            }
            if factors[..i].iter().any(|(q, _)| q == p) {
                return bad(format!("{p} is repeated"));
            }
            if p.divides(&g) {
                return bad(format!("{p} divides the numerator {g}"));
            }
        }
        let h = HasseForm { factors, g };
        let parity = h.pole_degree() - h.g.deg();
        if parity < 0 && parity % 2 == 0 {
            return bad(format!("sum (2n_i - 1) deg p_i - deg g = {parity} is negative and even"));
        }
        Ok(h)
    }

    /// From y^2 + y = num/den with den monic and coprime to num.
    fn from_rational(num: &Polynomial, den: &Polynomial) -> Result<Self> {
        let mut factors = Vec::new();
        for (p, m) in den.factor()? {
            if m % 2 == 0 {
                return Err(Error::BadHasseForm(format!("{p} occurs to the even power {m} in the denominator")));
            }
            factors.push((p, m.div_ceil(2)));
        }
        Self::new(factors, num.clone())
    }

    fn pole_degree(&self) -> i64 {
        self.factors.iter().map(|(p, n)| (2 * *n as i64 - 1) * p.deg()).sum()
    }
}

/// B = prod p_i^n_i, C = g prod p_i.
pub fn hasse_to_modified(h: &HasseForm) -> Result<(Polynomial, Polynomial)> {
    let field = h.g.field();
    let mut b = Polynomial::one(field);
    let mut c = h.g.clone();
    for (p, n) in &h.factors {
        b = b.mul(&p.pow(*n as u64));
        c = c.mul(p);
    }
    Ok((b, c))
}

/// a(x) + b(x) y.
#[derive(Clone, PartialEq, Eq)]
pub struct OrderElement {
    curve: Arc<CurveSpec>,
    a: Polynomial,
    b: Polynomial,
}

impl OrderElement {
    pub fn new(curve: &CurveSpec, a: Polynomial, b: Polynomial) -> Result<Self> {
        Self::with_arc(Arc::new(curve.clone()), a, b)
    }

    fn with_arc(curve: Arc<CurveSpec>, a: Polynomial, b: Polynomial) -> Result<Self> {
        if a.field() != curve.field() || b.field() != curve.field() {
            return Err(Error::MixedFields);
        }
        Ok(OrderElement { curve, a, b })
    }

    fn make(&self, a: Polynomial, b: Polynomial) -> Self {
        OrderElement { curve: self.curve.clone(), a, b }
    }

    pub fn from_poly(curve: &CurveSpec, a: Polynomial) -> Self {
        let z = Polynomial::zero(curve.field());
        OrderElement { curve: Arc::new(curve.clone()), a, b: z }
    }

    pub fn constant(curve: &CurveSpec, c: u32) -> Self {
        Self::from_poly(curve, Polynomial::constant(curve.field(), c))
    }

    pub fn one(curve: &CurveSpec) -> Self {
        Self::constant(curve, 1)
    }

    pub fn y(curve: &CurveSpec) -> Self {
        let f = curve.field();
        OrderElement { curve: Arc::new(curve.clone()), a: Polynomial::zero(f), b: Polynomial::one(f) }
    }

    /// Parse an expression in x and y; powers of y are reduced with the
    /// curve equation.
    pub fn parse(curve: &CurveSpec, text: &str) -> Result<Self> {
        let yp = parse::parse_ypoly(curve.field(), text)?;
        let y = Self::y(curve);
        let mut acc = Self::from_poly(curve, Polynomial::zero(curve.field()));
        let mut ypow = Self::one(curve);
        for i in 0..=yp.y_degree() {
            let c = yp.coeff(i).as_polynomial().ok_or_else(|| {
                Error::Parse(parse::ParseError { line: 1, column: 1, message: "order elements have polynomial coefficients".into() })
            })?;
            acc = acc.add(&ypow.scale_poly(&c))?;
            ypow = ypow.mul(&y)?;
        }
        Ok(acc)
    }

    pub fn curve(&self) -> &CurveSpec {
        &self.curve
    }

    pub fn a(&self) -> &Polynomial {
        &self.a
    }

    pub fn b(&self) -> &Polynomial {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn same_curve(&self, o: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.curve, &o.curve) || self.curve == o.curve { Ok(()) } else { Err(Error::MixedCurves) }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_curve(o)?;
        Ok(self.make(self.a.add(&o.a), self.b.add(&o.b)))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.same_curve(o)?;
        Ok(self.make(self.a.sub(&o.a), self.b.sub(&o.b)))
    }

    pub fn neg(&self) -> Self {
        self.make(self.a.neg(), self.b.neg())
    }

    pub fn scale(&self, c: u32) -> Self {
        self.make(self.a.scale(c), self.b.scale(c))
    }

    pub fn scale_poly(&self, p: &Polynomial) -> Self {
        self.make(self.a.mul(p), self.b.mul(p))
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same_curve(o)?;
        let (a, b, c, d) = (&self.a, &self.b, &o.a, &o.b);
        let bd = b.mul(d);
        let cross = a.mul(d).add(&b.mul(c));
        Ok(match &*self.curve {
            CurveSpec::OddChar { f } | CurveSpec::CharTwoInseparable { f } => self.make(a.mul(c).add(&bd.mul(f)), cross),
            CurveSpec::CharTwo { b: bb, c: cc } => self.make(a.mul(c).add(&bd.mul(cc)), cross.add(&bd.mul(bb))),
        })
    }

    pub fn pow(&self, n: u64) -> Self {
        let mut acc = self.make(Polynomial::one(self.a.field()), Polynomial::zero(self.a.field()));
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base).expect("same curve");
            }
            base = base.mul(&base).expect("same curve");
            n >>= 1;
        }
        acc
    }

    /// Integer power; negative exponents need a unit.
    pub fn pow_signed(&self, k: i64) -> Result<Self> {
        if k >= 0 {
            Ok(self.pow(k as u64))
        } else {
            Ok(self.inverse()?.pow(k.unsigned_abs()))
        }
    }

    pub fn conj(&self) -> Self {
        match &*self.curve {
            CurveSpec::OddChar { .. } | CurveSpec::CharTwoInseparable { .. } => self.make(self.a.clone(), self.b.neg()),
            CurveSpec::CharTwo { b: bb, .. } => self.make(self.a.add(&self.b.mul(bb)), self.b.clone()),
        }
    }

    pub fn norm(&self) -> Polynomial {
        let (a, b) = (&self.a, &self.b);
        match &*self.curve {
            CurveSpec::OddChar { f } | CurveSpec::CharTwoInseparable { f } => a.mul(a).sub(&b.mul(b).mul(f)),
            CurveSpec::CharTwo { b: bb, c } => a.mul(a).add(&a.mul(b).mul(bb)).add(&b.mul(b).mul(c)),
        }
    }

    pub fn is_unit(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroElement);
        }
        let n = self.norm();
        Ok(n.is_constant() && !n.is_zero())
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit()? {
            return Err(Error::NotUnit);
        }
        let inv = self.a.field().inv(self.norm().coeff(0)).expect("nonzero norm");
        Ok(self.conj().scale(inv))
    }
}

impl fmt::Display for OrderElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ypart = if self.b.is_one() { "y".to_string() } else { format!("{}*y", wrap(&self.b)) };
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => f.write_str(&ypart),
            (false, false) => write!(f, "{} + {ypart}", self.a),
        }
    }
}

impl fmt::Debug for OrderElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A unit a(x) + y with constant norm mu.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalUnit {
    pub unit: OrderElement,
    pub mu: u32,
}

/// The unit a(x) + y of least norm mu (by encoding), if any exists.
///
/// Absent for curves whose units are all constant, including constant field
/// extensions where a + y could only be torsion.
pub fn fundamental_unit(curve: &CurveSpec) -> Result<Option<FundamentalUnit>> {
    let field = curve.field();
    let arc = Arc::new(curve.clone());
    match curve {
        CurveSpec::CharTwoInseparable { .. } => Err(Error::InseparableCurve),
        CurveSpec::OddChar { f } => {
            if f.deg() % 2 != 0 {
                return Ok(None);
            }
            for mu in field.nonzero_elements() {
                if let Some(g) = f.add(&Polynomial::constant(field, mu)).sqrt() {
                    let unit = OrderElement::with_arc(arc, g, Polynomial::one(field))?;
                    return Ok(Some(FundamentalUnit { unit, mu }));
                }
            }
            Ok(None)
        }
        CurveSpec::CharTwo { b, c } => {
            if c.is_constant() {
                return Ok(None);
            }
            for mu in field.nonzero_elements() {
                let rhs = c.add(&Polynomial::constant(field, mu));
                if let Some(a) = solve_additive(b, &rhs) {
                    let other = a.add(b);
                    let a = a.min(other);
                    let unit = OrderElement::with_arc(arc, a, Polynomial::one(field))?;
                    return Ok(Some(FundamentalUnit { unit, mu }));
                }
            }
            Ok(None)
        }
    }
}

/// Solve a^2 + B a = rhs with deg a <= deg B as a linear system over the
/// prime field GF(2).
fn solve_additive(b: &Polynomial, rhs: &Polynomial) -> Option<Polynomial> {
    let field = b.field();
    let k = field.degree() as usize;
    let db = b.degree().unwrap_or(0);
    if rhs.deg() > 2 * db as i64 {
        return None;
    }
    let rows = (2 * db + 1) * k;
    let gf2 = field.prime_subfield();
    let mut cols = Vec::new();
    for i in 0..=db {
        for j in 0..k {
            let e = Polynomial::monomial(field, 1 << j, i);
            let img = e.mul(&e).add(&b.mul(&e));
            let bits: Vec<u32> = (0..=2 * db).flat_map(|d| field.to_coeffs(img.coeff(d))).collect();
            cols.push(bits);
        }
    }
    let matrix: Vec<Vec<u32>> = (0..rows).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    let target: Vec<u32> = (0..=2 * db).flat_map(|d| field.to_coeffs(rhs.coeff(d))).collect();
    let sol = linalg::solve(&gf2, &matrix, &target)?;
    let coeffs = (0..=db).map(|i| field.from_coeffs(&sol[i * k..(i + 1) * k])).collect();
    Some(Polynomial::new(field, coeffs))
}

/// (a_n, b_n) with eps^n = a_n + b_n y, by the linear recursion.
pub fn unit_powers(eps: &OrderElement, n: u64) -> Result<(Polynomial, Polynomial)> {
    if !eps.b.is_one() {
        return Err(Error::WrongShape);
    }
    if !eps.is_unit()? {
        return Err(Error::NotUnit);
    }
    Ok(unit_power_sequence(eps, n).pop().expect("nonempty"))
}

/// [(a_0, b_0), ..., (a_n, b_n)] for eps = a + y, without shape checks.
pub fn unit_power_sequence(eps: &OrderElement, n: u64) -> Vec<(Polynomial, Polynomial)> {
    let field = eps.a.field();
    let a = &eps.a;
    let mut out = vec![(Polynomial::one(field), Polynomial::zero(field))];
    for _ in 0..n {
        let (an, bn) = out.last().expect("nonempty");
        let next = match &*eps.curve {
            CurveSpec::OddChar { f } | CurveSpec::CharTwoInseparable { f } => {
                (a.mul(an).add(&bn.mul(f)), a.mul(bn).add(an))
            }
            CurveSpec::CharTwo { b, c } => (a.mul(an).add(&bn.mul(c)), a.mul(bn).add(an).add(&bn.mul(b))),
        };
        out.push(next);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenusInfo {
    pub genus_zero: bool,
    pub genus: Option<u64>,
    pub splitting: Splitting,
    pub inseparable: bool,
}

/// Closed-form splitting of the infinite place for characteristic-2 genus-0
/// shapes; `None` outside those shapes.
pub fn closed_form_genus_zero_splitting(b: &Polynomial, c: &Polynomial) -> Result<Option<Splitting>> {
    Ok(match (b.deg(), c.deg()) {
        (1, dc) if dc < 2 => Some(Splitting::Split),
        (1, 2) => {
            if b.field().artin_schreier_root(c.leading())?.is_some() {
                Some(Splitting::Split)
            } else {
                Some(Splitting::Inert)
            }
        }
        (0, 1) => Some(Splitting::Ramified),
        _ => None,
    })
}

/// Series roots of the defining equation at the infinite place.
pub fn roots_at_infinity(curve: &CurveSpec, terms: usize) -> Result<RootsAtInfinity> {
    match curve {
        CurveSpec::OddChar { f } => quadratic_roots_at_infinity(QuadraticEquation::Square { f }, terms),
        CurveSpec::CharTwo { b, c } => quadratic_roots_at_infinity(QuadraticEquation::ArtinSchreier { b, c }, terms),
        CurveSpec::CharTwoInseparable { .. } => {
            Ok(RootsAtInfinity { splitting: Splitting::Ramified, roots: Vec::new() })
        }
    }
}

pub fn genus_and_splitting(curve: &CurveSpec) -> Result<GenusInfo> {
    match curve {
        CurveSpec::OddChar { f } => {
            let d = f.deg();
            let splitting = if d % 2 != 0 {
                Splitting::Ramified
            } else if f.field().sqrt(f.leading()).is_some() {
                Splitting::Split
            } else {
                Splitting::Inert
            };
            Ok(GenusInfo { genus_zero: d <= 2, genus: Some(((d - 1) / 2) as u64), splitting, inseparable: false })
        }
        CurveSpec::CharTwo { b, c } => {
            let splitting = roots_at_infinity(curve, 4)?.splitting;
            let (db, dc) = (b.deg(), c.deg());
            let genus = if dc > 2 * db { db + (dc - 2 * db + 1) / 2 - 1 } else { (db - 1).max(0) };
            let genus_zero = genus == 0;
            if genus_zero {
                if let Some(closed) = closed_form_genus_zero_splitting(b, c)? {
                    if closed != splitting {
                        return Err(Error::Internal(format!(
                            "series splitting {splitting} disagrees with closed form {closed} for {curve}"
                        )));
                    }
                }
            }
            Ok(GenusInfo { genus_zero, genus: Some(genus as u64), splitting, inseparable: false })
        }
        CurveSpec::CharTwoInseparable { f } => Ok(GenusInfo {
            genus_zero: f.deg() <= 2,
            genus: None,
            splitting: Splitting::Ramified,
            inseparable: true,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSumNumber {
    Omega,
    Infinity,
}

impl fmt::Display for UnitSumNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnitSumNumber::Omega => "omega",
            UnitSumNumber::Infinity => "infinity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reason {
    pub tag: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub verdict: UnitSumNumber,
    pub full_constant_field: bool,
    pub genus_zero: bool,
    pub genus: Option<u64>,
    pub splitting: Splitting,
    pub reasons: Vec<Reason>,
}

impl ClassificationReport {
    /// Human-readable criterion trail.
    pub fn trail(&self) -> String {
        let sym = match self.verdict {
            UnitSumNumber::Omega => "ω",
            UnitSumNumber::Infinity => "∞",
        };
        let parts: Vec<&str> = self.reasons.iter().map(|r| r.detail.as_str()).collect();
        format!("{} ⇒ u(O_F) = {sym}", parts.join("; "))
    }
}

pub fn classify(curve: &CurveSpec) -> Result<ClassificationReport> {
    let info = genus_and_splitting(curve)?;
    let field = curve.field();
    let mut reasons = Vec::new();
    let full_constant_field = match curve {
        CurveSpec::OddChar { f } => {
            reasons.push(Reason { tag: "full-constant-field", detail: format!("f = {f} is separable and nonconstant") });
            let d = f.deg();
            let lc = field.format_value(f.leading());
            reasons.push(if info.genus_zero {
                Reason { tag: "genus-zero", detail: format!("deg f = {d}") }
            } else {
                Reason { tag: "positive-genus", detail: format!("deg f = {d} > 2, genus {}", info.genus.unwrap_or(0)) }
            });
            reasons.push(match info.splitting {
                Splitting::Split => Reason { tag: "split", detail: format!("lc(f) = {lc} is a square in {field}") },
                Splitting::Inert => Reason { tag: "inert", detail: format!("lc(f) = {lc} is not a square in {field}") },
                _ => Reason { tag: "ramified", detail: format!("deg f = {d} is odd") },
            });
            true
        }
        CurveSpec::CharTwo { b, c } => {
            let fcf = !c.is_constant();
            reasons.push(if fcf {
                Reason { tag: "full-constant-field", detail: format!("C = {c} is nonconstant") }
            } else {
                Reason { tag: "constant-field-extension", detail: format!("C = {c} is constant") }
            });
            let g = info.genus.unwrap_or(0);
            reasons.push(Reason {
                tag: if info.genus_zero { "genus-zero" } else { "positive-genus" },
                detail: format!("deg B = {}, deg C = {}, genus {g}", b.deg(), c.deg()),
            });
            reasons.push(match info.splitting {
                Splitting::Split => {
                    Reason { tag: "split", detail: "w^2 + w = C/B^2 has two roots at infinity".to_string() }
                }
                Splitting::Inert => Reason {
                    tag: "inert",
                    detail: format!("the residue of C/B^2 at infinity is not of the form a^2 + a in {field}"),
                },
                _ => Reason { tag: "ramified", detail: "C/B^2 has a pole of odd order at infinity".to_string() },
            });
            fcf
        }
        CurveSpec::CharTwoInseparable { f } => {
            reasons.push(Reason {
                tag: "purely-inseparable",
                detail: format!("y^2 = {f} is purely inseparable; the infinite place is ramified"),
            });
            true
        }
    };
    let omega = full_constant_field && info.genus_zero && info.splitting == Splitting::Split;
    Ok(ClassificationReport {
        verdict: if omega { UnitSumNumber::Omega } else { UnitSumNumber::Infinity },
        full_constant_field,
        genus_zero: info.genus_zero,
        genus: info.genus,
        splitting: info.splitting,
        reasons,
    })
}

/// A point (alpha, beta) over GF(q^d) where G, G_X and G_Y all vanish.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularPoint {
    pub field: FieldSpec,
    pub x: u32,
    pub y: u32,
}

impl fmt::Display for SingularPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}) over {}", self.field.format_value(self.x), self.field.format_value(self.y), self.field)
    }
}

/// Largest extension field enumerated point by point.
const MAX_POINT_FIELD: u32 = 1 << 12;

/// Map GF(q) into GF(q^d), returning the extension and the image of each
/// element of GF(q) indexed by encoding.
fn embed(field: &FieldSpec, d: u32) -> Result<(FieldSpec, Vec<u32>)> {
    let (p, k) = (field.characteristic(), field.degree());
    let big = FieldSpec::new(p, k * d)?;
    // image of t: a root of the modulus of GF(q) inside the extension
    let t_image = if k == 1 {
        0
    } else {
        let m = field.modulus();
        big.elements()
            .find(|&r| {
                let mut acc = 0u32;
                for &c in m.iter().rev() {
                    acc = big.add(big.mul(acc, r), big.from_int(c as i64));
                }
                acc == 0
            })
            .ok_or_else(|| Error::Internal(format!("{field} does not embed into {big}")))?
    };
    let image = field
        .elements()
        .map(|v| {
            let mut acc = 0u32;
            for &c in field.to_coeffs(v).iter().rev() {
                acc = big.add(big.mul(acc, t_image), big.from_int(c as i64));
            }
            acc
        })
        .collect();
    Ok((big, image))
}

/// Search GF(q^d), d in `degrees`, for a singular point of
/// G = Y^2 + B(X) Y + C(X).
pub fn singular_point(b: &Polynomial, c: &Polynomial, degrees: &[u32], exec: Exec) -> Result<Option<SingularPoint>> {
    let field = b.field();
    if field.characteristic() != 2 {
        return Err(Error::WrongCharacteristic { expected: "2", found: field.characteristic() });
    }
    for &d in degrees {
        let size = (field.order() as u64).checked_pow(d).unwrap_or(u64::MAX);
        if size > MAX_POINT_FIELD as u64 {
            return Err(Error::FieldTooLarge(format!("GF({}^{d}) has more than {MAX_POINT_FIELD} elements", field.order())));
        }
        let (big, image) = embed(field, d)?;
        let lift = |p: &Polynomial| Polynomial::new(&big, p.coeffs().iter().map(|&v| image[v as usize]).collect());
        let (bb, cc) = (lift(b), lift(c));
        let (db, dc) = (bb.derivative(), cc.derivative());
        let xs: Vec<u32> = big.elements().collect();
        let hit = exec.find_map_first(&xs, |&x| {
            let (bx, cx, dbx, dcx) = (bb.eval(x), cc.eval(x), db.eval(x), dc.eval(x));
            big.elements()
                .find(|&y| {
                    let g = big.add(big.add(big.mul(y, y), big.mul(bx, y)), cx);
                    let gx = big.add(big.mul(dbx, y), dcx);
                    g == 0 && gx == 0 && bx == 0
                })
                .map(|y| (x, y))
        });
        if let Some((x, y)) = hit {
            return Ok(Some(SingularPoint { field: big, x, y }));
        }
    }
    Ok(None)
}

pub fn check_nonsingular(curve: &CurveSpec, degrees: &[u32], exec: Exec) -> Result<bool> {
    match curve {
        CurveSpec::CharTwo { b, c } => Ok(singular_point(b, c, degrees, exec)?.is_none()),
        _ => Err(Error::WrongCharacteristic { expected: "2", found: curve.field().characteristic() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(s: &str) -> FieldSpec {
        FieldSpec::parse(s).unwrap()
    }

    fn poly(f: &FieldSpec, s: &str) -> Polynomial {
        Polynomial::parse(f, s).unwrap()
    }

    fn curve(f: &str, s: &str) -> CurveSpec {
        CurveSpec::parse(&gf(f), s).unwrap()
    }

    fn elem(c: &CurveSpec, s: &str) -> OrderElement {
        OrderElement::parse(c, s).unwrap()
    }

    fn rules(e: Error) -> Vec<String> {
        match e {
            Error::CurveRejected(v) => v.into_iter().map(|v| v.rule).collect(),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn make_curve_examples() {
        let f5 = gf("GF(5)");
        assert!(matches!(CurveSpec::odd(poly(&f5, "x^2+1")), Ok(CurveSpec::OddChar { .. })));
        let f2 = gf("GF(2)");
        assert!(matches!(CurveSpec::char_two(poly(&f2, "x"), poly(&f2, "x")), Ok(CurveSpec::CharTwo { .. })));
        let e = CurveSpec::char_two(poly(&f2, "x"), poly(&f2, "x^2")).unwrap_err();
        assert_eq!(rules(e), vec!["b-factor-simple-in-c"]);
        assert_eq!(rules(CurveSpec::odd(poly(&f5, "(x+1)^2*x")).unwrap_err()), vec!["not-separable"]);
        assert!(matches!(CurveSpec::odd(poly(&f2, "x")), Err(Error::WrongCharacteristic { .. })));
        let e = CurveSpec::char_two(poly(&f2, "x^2"), poly(&f2, "x^3")).unwrap_err();
        assert_eq!(rules(e), vec!["b-factor-simple-in-c"]);
        let e = CurveSpec::char_two(poly(&f2, "x"), poly(&f2, "x+1")).unwrap_err();
        assert_eq!(rules(e), vec!["radical-b-divides-c"]);
        let e = CurveSpec::char_two(poly(&f2, "1"), poly(&f2, "x^2")).unwrap_err();
        assert_eq!(rules(e), vec!["degree-parity"]);
        let e = CurveSpec::char_two(poly(&f2, "1"), poly(&f2, "0")).unwrap_err();
        assert_eq!(rules(e), vec!["c-zero"]);
        assert_eq!(rules(CurveSpec::inseparable(poly(&f2, "x^2+1")).unwrap_err()), vec!["square-f"]);
    }

    #[test]
    fn parse_curves() {
        assert_eq!(curve("GF(5)", "y^2 = x^2+1"), CurveSpec::odd(poly(&gf("GF(5)"), "x^2+1")).unwrap());
        let f2 = gf("GF(2)");
        assert_eq!(curve("GF(2)", "y^2 + (x)y + (x) = 0"), CurveSpec::char_two(poly(&f2, "x"), poly(&f2, "x")).unwrap());
        assert_eq!(curve("GF(2)", "y^2 = x"), CurveSpec::CharTwoInseparable { f: poly(&f2, "x") });
        // y^2 + y = 1/x is the Hasse form of B = x, C = x
        assert_eq!(curve("GF(2)", "y^2 + y = 1/x"), CurveSpec::char_two(poly(&f2, "x"), poly(&f2, "x")).unwrap());
        assert_eq!(
            curve("GF(2)", "y^2 + y = (x+1)/x^3"),
            CurveSpec::char_two(poly(&f2, "x^2"), poly(&f2, "x^2+x")).unwrap()
        );
        assert!(matches!(CurveSpec::parse(&f2, "y^2 + y = 1/x^2"), Err(Error::BadHasseForm(_))));
        for c in [curve("GF(5)", "y^2 = x^2+1"), curve("GF(4)", "y^2 + (x)y + (x^2+x) = 0")] {
            assert_eq!(CurveSpec::parse(c.field(), &c.to_string()).unwrap(), c);
        }
    }

    #[test]
    fn hasse_examples() {
        let f2 = gf("GF(2)");
        let h = HasseForm::new(vec![(poly(&f2, "x"), 1)], poly(&f2, "1")).unwrap();
        assert_eq!(hasse_to_modified(&h).unwrap(), (poly(&f2, "x"), poly(&f2, "x")));
        let h = HasseForm::new(vec![(poly(&f2, "x"), 2)], poly(&f2, "x+1")).unwrap();
        assert_eq!(hasse_to_modified(&h).unwrap(), (poly(&f2, "x^2"), poly(&f2, "x^2+x")));
        let h = HasseForm::new(vec![], poly(&f2, "x")).unwrap();
        assert_eq!(hasse_to_modified(&h).unwrap(), (poly(&f2, "1"), poly(&f2, "x")));
        assert!(CurveSpec::from_hasse(&h).is_ok());
        assert!(HasseForm::new(vec![(poly(&f2, "x"), 1)], poly(&f2, "x")).is_err());
        assert!(HasseForm::new(vec![], poly(&f2, "x^2")).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        let c = curve("GF(5)", "y^2 = x^2+1");
        assert_eq!(elem(&c, "x+y").mul(&elem(&c, "x-y")).unwrap(), elem(&c, "4"));
        assert_eq!(elem(&c, "x+y").norm(), poly(c.field(), "4"));
        assert!(elem(&c, "x+y").is_unit().unwrap());
        assert!(!elem(&c, "y").is_unit().unwrap());
        assert!(elem(&c, "3").is_unit().unwrap());
        assert_eq!(OrderElement::from_poly(&c, Polynomial::zero(c.field())).is_unit(), Err(Error::ZeroElement));
        let c2 = curve("GF(2)", "y^2 + (x)y + (x) = 0");
        assert_eq!(elem(&c2, "(1+y)*(1+x+y)"), elem(&c2, "1"));
        assert_eq!(elem(&c2, "1+y").norm(), poly(c2.field(), "1"));
        assert_eq!(elem(&c2, "1+y").conj(), elem(&c2, "1+x+y"));
        assert_eq!(elem(&c2, "1").norm(), poly(c2.field(), "1"));
        let u = elem(&c2, "x^2 + x*y");
        assert_eq!(u.mul(&OrderElement::one(&c2)).unwrap(), u);
        assert_eq!(elem(&c, "x+y").mul(&elem(&c2, "1")), Err(Error::MixedCurves));
        assert_eq!(elem(&c, "x+y").inverse().unwrap(), elem(&c, "4x+y"));
    }

    #[test]
    fn display_round_trip() {
        let c = curve("GF(4)", "y^2 + (x)y + (x^2+x) = 0");
        for s in ["0", "x", "y", "t*y", "x + (x+t)*y", "(t+1)*x^2 + x*y"] {
            let e = elem(&c, s);
            assert_eq!(elem(&c, &e.to_string()), e, "{s} -> {e}");
        }
        let c = curve("GF(5)", "y^2 = x^2+1");
        assert_eq!(elem(&c, "x+y").to_string(), "x + y");
        assert_eq!(elem(&c, "2x^2+1+2x*y").to_string(), "2*x^2+1 + 2*x*y");
    }

    #[test]
    fn fundamental_unit_examples() {
        let c = curve("GF(5)", "y^2 = x^2+1");
        let u = fundamental_unit(&c).unwrap().unwrap();
        assert_eq!((u.unit.clone(), u.mu), (elem(&c, "x+y"), 4));
        assert_eq!(u.unit.norm(), poly(c.field(), "4"));
        let c2 = curve("GF(2)", "y^2 + (x)y + (x) = 0");
        let u = fundamental_unit(&c2).unwrap().unwrap();
        assert_eq!((u.unit, u.mu), (elem(&c2, "1+y"), 1));
        assert_eq!(fundamental_unit(&curve("GF(5)", "y^2 = x^3+x")).unwrap(), None);
        let c4 = curve("GF(5)", "y^2 = x^4+1");
        let u = fundamental_unit(&c4).unwrap().unwrap();
        assert_eq!((u.unit, u.mu), (elem(&c4, "x^2+y"), 4));
        assert_eq!(fundamental_unit(&curve("GF(2)", "y^2 = x")), Err(Error::InseparableCurve));
    }

    #[test]
    fn unit_power_examples() {
        let c = curve("GF(5)", "y^2 = x^2+1");
        let f = c.field().clone();
        let eps = elem(&c, "x+y");
        assert_eq!(unit_powers(&eps, 2).unwrap(), (poly(&f, "2x^2+1"), poly(&f, "2x")));
        assert_eq!(unit_powers(&eps, 0).unwrap(), (poly(&f, "1"), poly(&f, "0")));
        let c2 = curve("GF(2)", "y^2 + (x)y + (x) = 0");
        let eps2 = elem(&c2, "1+y");
        let f2 = c2.field().clone();
        assert_eq!(unit_powers(&eps2, 2).unwrap(), (poly(&f2, "1+x"), poly(&f2, "x")));
        assert_eq!(unit_powers(&elem(&c, "x+2y"), 2), Err(Error::WrongShape));
        assert_eq!(unit_powers(&elem(&c, "x+1+y"), 2), Err(Error::NotUnit));
        for n in 0..=15 {
            let (a, b) = unit_powers(&eps, n).unwrap();
            let p = eps.pow(n);
            assert_eq!((p.a().clone(), p.b().clone()), (a, b));
        }
    }

    #[test]
    fn genus_examples() {
        let g = genus_and_splitting(&curve("GF(5)", "y^2 = x^2+1")).unwrap();
        assert_eq!((g.genus_zero, g.genus, g.splitting), (true, Some(0), Splitting::Split));
        let g = genus_and_splitting(&curve("GF(5)", "y^2 = 2x^2+1")).unwrap();
        assert_eq!((g.genus_zero, g.splitting), (true, Splitting::Inert));
        let g = genus_and_splitting(&curve("GF(2)", "y^2 + (x)y + (x^2+x) = 0")).unwrap();
        assert_eq!((g.genus_zero, g.splitting), (true, Splitting::Inert));
        let g = genus_and_splitting(&curve("GF(2)", "y^2 + y + x = 0")).unwrap();
        assert_eq!((g.genus_zero, g.genus, g.splitting), (true, Some(0), Splitting::Ramified));
        let g = genus_and_splitting(&curve("GF(2)", "y^2 + (x^2+x)y + (x^2+x) = 0")).unwrap();
        assert_eq!(g.genus, Some(1));
        let g = genus_and_splitting(&curve("GF(5)", "y^2 = x^5+x+1")).unwrap();
        assert_eq!((g.genus, g.splitting), (Some(2), Splitting::Ramified));
    }

    #[test]
    fn classify_examples() {
        let omega = |f: &str, s: &str| classify(&curve(f, s)).unwrap().verdict == UnitSumNumber::Omega;
        assert!(omega("GF(5)", "y^2 = x^2+1"));
        assert!(!omega("GF(5)", "y^2 = 2x^2+1"));
        assert!(!omega("GF(5)", "y^2 = x^3+x"));
        assert!(omega("GF(2)", "y^2 + (x)y + (x) = 0"));
        assert!(!omega("GF(2)", "y^2 + (x)y + (x^2+x) = 0"));
        assert!(omega("GF(4):t^2+t+1", "y^2 + (x)y + (x^2+x) = 0"));
        assert!(!omega("GF(5)", "y^2 = x^4+1"));
        assert!(!omega("GF(2)", "y^2 = x"));
        let r = classify(&curve("GF(5)", "y^2 = x^2+1")).unwrap();
        assert_eq!(r.trail(), "f = x^2+1 is separable and nonconstant; deg f = 2; lc(f) = 1 is a square in GF(5) ⇒ u(O_F) = ω");
        let r = classify(&curve("GF(2)", "y^2 + y + 1 = 0")).unwrap();
        assert!(!r.full_constant_field);
        assert_eq!(r.verdict, UnitSumNumber::Infinity);
    }

    #[test]
    fn nonsingular_examples() {
        let f2 = gf("GF(2)");
        let c = curve("GF(2)", "y^2 + (x)y + (x) = 0");
        assert!(check_nonsingular(&c, &[1, 2], Exec::default()).unwrap());
        let pt = singular_point(&poly(&f2, "x"), &poly(&f2, "x^2"), &[1], Exec::Sequential).unwrap().unwrap();
        assert_eq!((pt.x, pt.y), (0, 0));
        let c4 = curve("GF(4)", "y^2 + (x)y + (x^2+x) = 0");
        assert!(check_nonsingular(&c4, &[1], Exec::default()).unwrap());
        assert!(check_nonsingular(&c4, &[2], Exec::Sequential).unwrap());
        assert!(matches!(check_nonsingular(&c4, &[7], Exec::Sequential), Err(Error::FieldTooLarge(_))));
    }

    fn arb_poly(p: u32, max: usize) -> impl Strategy<Value = Vec<u32>> {
        proptest::collection::vec(0..p, 0..=max)
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative_odd(a in arb_poly(5, 4), b in arb_poly(5, 4), c in arb_poly(5, 4), d in arb_poly(5, 4)) {
            let cv = curve("GF(5)", "y^2 = x^3+2x+1");
            let f = cv.field().clone();
            let u = OrderElement::new(&cv, Polynomial::new(&f, a), Polynomial::new(&f, b)).unwrap();
            let v = OrderElement::new(&cv, Polynomial::new(&f, c), Polynomial::new(&f, d)).unwrap();
            prop_assert_eq!(u.mul(&v).unwrap().norm(), u.norm().mul(&v.norm()));
            let uc = u.mul(&u.conj()).unwrap();
            prop_assert!(uc.b().is_zero());
            prop_assert_eq!(uc.a(), &u.norm());
        }

        #[test]
        fn norm_is_multiplicative_char_two(a in 0u32..64, b in 0u32..64, c in 0u32..64, d in 0u32..64) {
            let cv = curve("GF(4)", "y^2 + (x^2+x)y + ((x^2+x)*(x+t)) = 0");
            let f = cv.field().clone();
            let mk = |v: u32| Polynomial::new(&f, vec![v & 3, (v >> 2) & 3, (v >> 4) & 3]);
            let u = OrderElement::new(&cv, mk(a), mk(b)).unwrap();
            let v = OrderElement::new(&cv, mk(c), mk(d)).unwrap();
            prop_assert_eq!(u.mul(&v).unwrap().norm(), u.norm().mul(&v.norm()));
            let uc = u.mul(&u.conj()).unwrap();
            prop_assert!(uc.b().is_zero());
            prop_assert_eq!(uc.a(), &u.norm());
        }
    }
}
