//! Sum-of-units decompositions: the greedy height-descent algorithm for
//! S-integers of K(x) and its transport to quadratic orders through powers
//! of the fundamental unit.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcfield::{LaurentSeries, Mobius, Place, RationalFunction};
use crate::poly::Polynomial;
use crate::quadratic::{classify, fundamental_unit, roots_at_infinity, OrderElement, UnitSumNumber};

/// lambda * eps^power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PowerTerm {
    pub lambda: u32,
    pub power: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnitList {
    Rational(Vec<RationalFunction>),
    Quadratic { eps: OrderElement, terms: Vec<PowerTerm> },
}

/// Serialized form of one unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnitRecord {
    pub unit: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<i64>,
}

impl UnitList {
    pub fn len(&self) -> usize {
        match self {
            UnitList::Rational(u) => u.len(),
            UnitList::Quadratic { terms, .. } => terms.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rational_units(&self) -> Option<&[RationalFunction]> {
        match self {
            UnitList::Rational(u) => Some(u),
            UnitList::Quadratic { .. } => None,
        }
    }

    /// The units of a quadratic decomposition as order elements.
    pub fn quadratic_units(&self) -> Result<Vec<OrderElement>> {
        match self {
            UnitList::Rational(_) => Err(Error::WrongShape),
            UnitList::Quadratic { eps, terms } => {
                terms.iter().map(|t| Ok(eps.pow_signed(t.power)?.scale(t.lambda))).collect()
            }
        }
    }

    pub fn records(&self) -> Vec<UnitRecord> {
        match self {
            UnitList::Rational(u) => {
                u.iter().map(|f| UnitRecord { unit: f.to_string(), lambda: None, power: None }).collect()
            }
            UnitList::Quadratic { eps, terms } => {
                let field = eps.curve().field();
                terms
                    .iter()
                    .map(|t| UnitRecord {
                        unit: eps.to_string(),
                        lambda: Some(field.format_value(t.lambda)),
                        power: Some(t.power),
                    })
                    .collect()
            }
        }
    }
}

impl fmt::Display for UnitList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = match self {
            UnitList::Rational(u) => u.iter().map(|x| x.to_string()).collect(),
            UnitList::Quadratic { eps, terms } => {
                let field = eps.curve().field();
                let parts = terms
                    .iter()
                    .map(|t| {
                        let l = field.format_value(t.lambda);
                        let l = if field.value_is_compound(t.lambda) { format!("({l})") } else { l };
                        match t.power {
                            0 => l,
                            1 => format!("{l}*e"),
                            k => format!("{l}*e^{k}"),
                        }
                    })
                    .collect::<Vec<_>>();
                return write!(f, "{} where e = {eps}", parts.join(" + "));
            }
        };
        f.write_str(&parts.join(" + "))
    }
}

/// Whether f is nonzero and its divisor is supported on S.
pub fn is_s_unit(f: &RationalFunction, s: &[Place]) -> Result<bool> {
    if f.is_zero() {
        return Ok(false);
    }
    if f.valuation(&Place::Infinite)? != 0 && !s.contains(&Place::Infinite) {
        return Ok(false);
    }
    for p in [f.numerator(), f.denominator()] {
        for (q, _) in p.factor()? {
            if !s.contains(&Place::Finite(q)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `NotAnSInteger` unless f has no poles outside S.
pub fn check_s_integer(f: &RationalFunction, s: &[Place]) -> Result<()> {
    if f.is_zero() {
        return Ok(());
    }
    if f.valuation(&Place::Infinite)? < 0 && !s.contains(&Place::Infinite) {
        return Err(Error::NotAnSInteger(format!("{f} has a pole at inf")));
    }
    for (q, _) in f.denominator().factor()? {
        let place = Place::Finite(q);
        if !s.contains(&place) {
            return Err(Error::NotAnSInteger(format!("{f} has a pole at {place}")));
        }
    }
    Ok(())
}

fn check_place_set(s: &[Place]) -> Result<()> {
    if s.len() < 2 {
        return Err(Error::BadPlaceSet(format!("need at least two places, got {}", s.len())));
    }
    for (i, p) in s.iter().enumerate() {
        if p.degree() != 1 {
            return Err(Error::BadPlaceSet(format!("{p} has degree {}", p.degree())));
        }
        if s[..i].contains(p) {
            return Err(Error::BadPlaceSet(format!("{p} is repeated")));
        }
    }
    Ok(())
}

fn zero_sum(field: &crate::ff::FieldSpec, nonempty_zero: bool) -> Vec<u32> {
    if nonempty_zero { vec![1, field.neg(1)] } else { Vec::new() }
}

/// A rational decomposition with the height of the remainder after each
/// subtraction (the first entry is H(f)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalDecomposition {
    pub units: UnitList,
    pub height_trace: Vec<u64>,
}

/// Greedy decomposition of an S-integer f into S-units.
pub fn decompose_rational(f: &RationalFunction, s: &[Place], nonempty_zero: bool) -> Result<RationalDecomposition> {
    check_place_set(s)?;
    check_s_integer(f, s)?;
    let field = f.field();
    if f.is_zero() {
        let units = zero_sum(field, nonempty_zero).into_iter().map(|c| RationalFunction::constant(field, c)).collect();
        return Ok(RationalDecomposition { units: UnitList::Rational(units), height_trace: vec![0] });
    }
    let mut g = f.clone();
    let mut units = Vec::new();
    let mut trace = vec![g.height()?];
    while *trace.last().expect("nonempty") > 0 {
        // deepest pole in S; ties go to the least place text
        let mut best: Option<(i64, &Place)> = None;
        for p in s {
            let v = g.valuation(p)?;
            if v < 0 {
                let better = match best {
                    None => true,
                    Some((bv, bp)) => match (-v).cmp(&bv) {
                        Ordering::Greater => true,
                        Ordering::Equal => p.text_cmp(bp) == Ordering::Less,
                        Ordering::Less => false,
                    },
                };
                if better {
                    best = Some((-v, p));
                }
            }
        }
        let (order, p1) = best.ok_or_else(|| Error::Internal(format!("{g} has positive height but no pole in S")))?;
        let p2 = s
            .iter()
            .filter(|p| *p != p1)
            .min_by(|a, b| a.text_cmp(b))
            .expect("at least two places");
        let m = match p1.as_point() {
            None => Mobius::identity(field),
            Some(alpha) => Mobius::to_infinity(field, alpha),
        };
        let h = g.mobius_substitute(&m);
        let alpha2 = m
            .pullback_place(p2)
            .as_point()
            .ok_or_else(|| Error::Internal(format!("{p2} did not stay finite")))?;
        let lambda = h.numerator().leading();
        let u_moved = RationalFunction::from_poly(Polynomial::linear(field, alpha2).pow(order as u64).scale(lambda));
        let u = u_moved.mobius_substitute(&m.inverse());
        g = g.sub(&u);
        units.push(u);
        let hg = if g.is_zero() { 0 } else { g.height()? };
        if hg >= *trace.last().expect("nonempty") {
            return Err(Error::Internal(format!("height did not drop below {}", trace.last().unwrap())));
        }
        trace.push(hg);
    }
    if !g.is_zero() {
        units.push(g);
    }
    let sum = units.iter().fold(RationalFunction::zero(field), |acc, u| acc.add(u));
    if sum != *f {
        return Err(Error::Internal(format!("decomposition sums to {sum}, not {f}")));
    }
    Ok(RationalDecomposition { units: UnitList::Rational(units), height_trace: trace })
}

/// Largest series precision tried before giving up.
const MAX_PRECISION: usize = 1 << 12;

/// Decompose w into distinct powers of the fundamental unit, doubling the
/// series precision whenever it is insufficient.
pub fn decompose_quadratic(w: &OrderElement, precision: usize, nonempty_zero: bool) -> Result<UnitList> {
    let mut prec = precision.max(4);
    loop {
        match decompose_quadratic_at(w, prec, nonempty_zero) {
            Err(Error::PrecisionExhausted(p)) if p < MAX_PRECISION => prec = 2 * p,
            other => return other,
        }
    }
}

/// One attempt at a fixed series precision.
pub fn decompose_quadratic_at(w: &OrderElement, precision: usize, nonempty_zero: bool) -> Result<UnitList> {
    let curve = w.curve();
    if classify(curve)?.verdict != UnitSumNumber::Omega {
        return Err(Error::NotOmega);
    }
    let eps = fundamental_unit(curve)?.ok_or(Error::NoFundamentalUnit)?.unit;
    let field = curve.field().clone();
    if w.is_zero() {
        let terms = zero_sum(&field, nonempty_zero).into_iter().map(|lambda| PowerTerm { lambda, power: 0 }).collect();
        return Ok(UnitList::Quadratic { eps, terms });
    }
    let roots = roots_at_infinity(curve, precision)?.roots;
    let embed = |u: &OrderElement, r: &LaurentSeries| -> LaurentSeries {
        let by = r.mul_poly(u.b());
        by.add(&LaurentSeries::from_poly(u.a(), by.abs_precision()))
    };
    // P1 is the embedding in which eps has a pole
    let (r1, r2) = {
        let e0 = embed(&eps, &roots[0]);
        if e0.leading_exponent().is_some_and(|d| d > 0) { (&roots[0], &roots[1]) } else { (&roots[1], &roots[0]) }
    };
    let pole = |s: &LaurentSeries| -> Result<(i64, u32)> {
        match s.leading_exponent() {
            Some(e) if e > 0 => Ok((e, s.leading_coeff())),
            Some(_) => Ok((0, 0)),
            None if s.abs_precision() >= 1 => Ok((0, 0)),
            None => Err(Error::PrecisionExhausted(precision)),
        }
    };
    let (eps_deg, eps_lc) = pole(&embed(&eps, r1))?;
    if eps_deg == 0 {
        return Err(Error::PrecisionExhausted(precision));
    }
    let eps_inv = eps.inverse()?;
    let mut rest = w.clone();
    let mut terms = Vec::new();
    for (root, unit, sign) in [(r1, &eps, 1i64), (r2, &eps_inv, -1i64)] {
        let (d, lc) = if sign == 1 { (eps_deg, eps_lc) } else { pole(&embed(unit, root))? };
        loop {
            let (e, c) = pole(&embed(&rest, root))?;
            if e == 0 {
                break;
            }
            if e % d != 0 {
                return Err(Error::Internal(format!("pole order {e} is not a multiple of {d}")));
            }
            let m = e / d;
            let unit_m = unit.pow(m as u64);
            let (_, lc_m) = pole(&embed(&unit_m, root))?;
            debug_assert_eq!(lc_m, field.pow(lc, m as u64));
            let lambda = field.div(c, lc_m).expect("nonzero leading coefficient");
            rest = rest.sub(&unit_m.scale(lambda))?;
            terms.push(PowerTerm { lambda, power: sign * m });
        }
    }
    if !rest.b().is_zero() || !rest.a().is_constant() {
        return Err(Error::PrecisionExhausted(precision));
    }
    if !rest.a().is_zero() {
        terms.push(PowerTerm { lambda: rest.a().coeff(0), power: 0 });
    }
    let list = UnitList::Quadratic { eps, terms };
    let sum = list
        .quadratic_units()?
        .iter()
        .try_fold(OrderElement::from_poly(curve, Polynomial::zero(&field)), |acc, u| acc.add(u))?;
    if sum != *w {
        return Err(Error::Internal(format!("decomposition sums to {sum}, not {w}")));
    }
    Ok(list)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::FieldSpec;
    use crate::quadratic::CurveSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(s: &str) -> FieldSpec {
        FieldSpec::parse(s).unwrap()
    }

    fn rf(f: &FieldSpec, s: &str) -> RationalFunction {
        RationalFunction::parse(f, s).unwrap()
    }

    fn places(f: &FieldSpec, s: &[&str]) -> Vec<Place> {
        s.iter().map(|p| Place::parse(f, p).unwrap()).collect()
    }

    fn texts(d: &RationalDecomposition) -> Vec<String> {
        d.units.rational_units().unwrap().iter().map(|u| u.to_string()).collect()
    }

    #[test]
    fn rational_examples() {
        let f5 = gf("GF(5)");
        let s = places(&f5, &["inf", "x"]);
        let d = decompose_rational(&rf(&f5, "x^2+3x+2"), &s, false).unwrap();
        assert_eq!(texts(&d), ["x^2", "3*x", "2"]);
        assert_eq!(d.height_trace, [2, 1, 0]);
        let d = decompose_rational(&rf(&f5, "(x^2+1)/x"), &s, false).unwrap();
        assert_eq!(texts(&d), ["x", "1/x"]);
        assert_eq!(d.units.to_string(), "x + 1/x");
        assert!(decompose_rational(&RationalFunction::zero(&f5), &s, false).unwrap().units.is_empty());
        let d = decompose_rational(&RationalFunction::zero(&f5), &s, true).unwrap();
        assert_eq!(texts(&d), ["1", "4"]);
    }

    #[test]
    fn rational_errors() {
        let f5 = gf("GF(5)");
        let s = places(&f5, &["inf", "x"]);
        assert!(matches!(decompose_rational(&rf(&f5, "1/(x+1)"), &s, false), Err(Error::NotAnSInteger(_))));
        assert!(matches!(decompose_rational(&rf(&f5, "x"), &s[..1], false), Err(Error::BadPlaceSet(_))));
        let dup = places(&f5, &["x", "x"]);
        assert!(matches!(decompose_rational(&rf(&f5, "x"), &dup, false), Err(Error::BadPlaceSet(_))));
        let deg2 = places(&f5, &["inf", "x^2+2"]);
        assert!(matches!(decompose_rational(&rf(&f5, "x"), &deg2, false), Err(Error::BadPlaceSet(_))));
        let finite = places(&f5, &["x", "x+1"]);
        assert!(matches!(decompose_rational(&rf(&f5, "x"), &finite, false), Err(Error::NotAnSInteger(_))));
    }

    #[test]
    fn rational_without_infinity() {
        let f3 = gf("GF(3)");
        let s = places(&f3, &["x", "x+1"]);
        let f = rf(&f3, "(x^2+2)/(x^2*(x+1)^3)");
        let d = decompose_rational(&f, &s, false).unwrap();
        for u in d.units.rational_units().unwrap() {
            assert!(is_s_unit(u, &s).unwrap(), "{u}");
        }
        assert!(d.height_trace.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn randomized_rational_contract() {
        let f5 = gf("GF(5)");
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for s in [places(&f5, &["inf", "x"]), places(&f5, &["inf", "x", "x+1"])] {
            for _ in 0..40 {
                let f = crate::search::random_s_integer(&f5, &s, 10, &mut rng);
                let d = decompose_rational(&f, &s, false).unwrap();
                let h = if f.is_zero() { 0 } else { f.height().unwrap() };
                assert!(d.units.len() as u64 <= h + 1);
                for u in d.units.rational_units().unwrap() {
                    assert!(is_s_unit(u, &s).unwrap());
                }
                assert!(d.height_trace.windows(2).all(|w| w[1] < w[0]));
            }
        }
    }

    fn curve(f: &str, s: &str) -> CurveSpec {
        CurveSpec::parse(&gf(f), s).unwrap()
    }

    fn terms(l: &UnitList) -> Vec<(u32, i64)> {
        match l {
            UnitList::Quadratic { terms, .. } => terms.iter().map(|t| (t.lambda, t.power)).collect(),
            _ => panic!(),
        }
    }

    #[test]
    fn quadratic_examples() {
        let c = curve("GF(5)", "y^2 = x^2+1");
        let w = OrderElement::parse(&c, "x").unwrap();
        assert_eq!(terms(&decompose_quadratic(&w, 8, false).unwrap()), [(3, 1), (2, -1)]);
        let w = OrderElement::parse(&c, "y").unwrap();
        assert_eq!(terms(&decompose_quadratic(&w, 8, false).unwrap()), [(3, 1), (3, -1)]);
        let c2 = curve("GF(2)", "y^2 + (x)y + (x) = 0");
        let w = OrderElement::parse(&c2, "x").unwrap();
        let l = decompose_quadratic(&w, 8, false).unwrap();
        assert_eq!(terms(&l), [(1, 1), (1, -1)]);
        assert_eq!(l.records()[0], UnitRecord { unit: "1 + y".into(), lambda: Some("1".into()), power: Some(1) });
        let zero = OrderElement::parse(&c2, "0").unwrap();
        assert_eq!(terms(&decompose_quadratic(&zero, 8, true).unwrap()), [(1, 0), (1, 0)]);
        let bad = curve("GF(5)", "y^2 = x^4+1");
        assert_eq!(decompose_quadratic(&OrderElement::parse(&bad, "x").unwrap(), 8, false), Err(Error::NotOmega));
    }

    #[test]
    fn low_precision_recovers() {
        let c = curve("GF(4)", "y^2 + (x)y + (x^2+x) = 0");
        let w = OrderElement::parse(&c, "x^5 + (x^3+t)*y").unwrap();
        assert_eq!(decompose_quadratic_at(&w, 2, false), Err(Error::PrecisionExhausted(2)));
        let l = decompose_quadratic(&w, 2, false).unwrap();
        let powers: Vec<i64> = terms(&l).iter().map(|t| t.1).collect();
        let mut sorted = powers.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), powers.len());
    }
}
