//! Certificates and bounded witnesses: residue-class certificates for
//! integers that are not short signed sums of powers of p, exact
//! non-representability of polynomials by the degree-span argument, and
//! exhaustive sums-of-S-units search.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::decompose::{check_s_integer, is_s_unit, PowerTerm, UnitList};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::ff::FieldSpec;
use crate::funcfield::{Place, RationalFunction};
use crate::poly::Polynomial;
use crate::quadratic::{fundamental_unit, unit_power_sequence, CurveSpec, OrderElement};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Representable { certificate: UnitList },
    NotRepresentableExact { reason: String },
    NoneWithinBounds { height_bound: u64, unit_count: usize },
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Representable { .. } => "representable",
            Verdict::NotRepresentableExact { .. } => "not-representable-exact",
            Verdict::NoneWithinBounds { .. } => "none-within-bounds",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Representable { certificate } => write!(f, "representable: {certificate}"),
            Verdict::NotRepresentableExact { reason } => write!(f, "not a sum of units: {reason}"),
            Verdict::NoneWithinBounds { height_bound, unit_count } => write!(
                f,
                "no sum of at most {unit_count} units of height <= {height_bound} found (not a proof)"
            ),
        }
    }
}

/// Least positive integer n with a residue certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NonRepresentable {
    pub n: u64,
    /// n mod p^t lies outside every residue of a signed sum.
    pub t: u32,
}

/// Largest modulus p^T tabulated.
const MAX_MODULUS: u64 = 1 << 22;

/// Residues mod p^t of all sums sum_{j <= m} p^{t_j} k_j with |k_j| <= a.
pub fn residue_set(p: u64, m: u32, a: u64, t: u32) -> Vec<bool> {
    let modulus = p.pow(t);
    let mut step = vec![false; modulus as usize];
    for e in 0..t {
        let pe = p.pow(e);
        for k in 0..=a {
            step[((pe % modulus) * (k % modulus) % modulus) as usize] = true;
            step[((modulus - (pe * k) % modulus) % modulus) as usize] = true;
        }
    }
    step[0] = true;
    let offsets: Vec<usize> = step.iter().enumerate().filter(|(_, &s)| s).map(|(i, _)| i).collect();
    let mut reach = vec![false; modulus as usize];
    reach[0] = true;
    for _ in 0..m {
        let mut next = vec![false; modulus as usize];
        for (r, _) in reach.iter().enumerate().filter(|(_, &b)| b) {
            for &o in &offsets {
                next[(r + o) % modulus as usize] = true;
            }
        }
        if next == reach {
            break;
        }
        reach = next;
    }
    reach
}

pub fn nonrepresentable_n(p: u32, m: u32, a: u64, limit: u64) -> Result<NonRepresentable> {
    if !crate::ff::is_prime(p as u64) {
        return Err(Error::InvalidField(format!("{p} is not prime")));
    }
    let p = p as u64;
    // moduli up to a couple of p-adic digits past the limit
    let mut tables = Vec::new();
    let mut t = 1u32;
    loop {
        let modulus = p.pow(t);
        if modulus > MAX_MODULUS {
            break;
        }
        tables.push((t, modulus, residue_set(p, m, a, t)));
        if modulus > limit.saturating_mul(p * p) {
            break;
        }
        t += 1;
    }
    for n in 1..=limit {
        for (t, modulus, reach) in &tables {
            if !reach[(n % modulus) as usize] {
                return Ok(NonRepresentable { n, t: *t });
            }
        }
    }
    Err(Error::NoneFound(limit))
}

/// Exact test of w against the span of the polynomial parts of unit pairs.
pub fn exact_witness_quadratic(curve: &CurveSpec, w: &Polynomial) -> Result<Verdict> {
    let fu = fundamental_unit(curve)?.ok_or(Error::NoFundamentalUnit)?;
    let field = curve.field().clone();
    let eps = fu.unit;
    let target_deg = w.deg().max(0) as u64;
    // spanning polynomials, indexed by the power n that produces them
    let mut span: Vec<(u64, Polynomial)> = Vec::new();
    let char_two = matches!(curve, CurveSpec::CharTwo { .. });
    if char_two {
        span.push((0, Polynomial::one(&field)));
    }
    let mut n = 0u64;
    loop {
        let seq = unit_power_sequence(&eps, n);
        let (an, bn) = seq.last().expect("nonempty");
        let elem = match curve {
            CurveSpec::CharTwo { b, .. } => {
                if n == 0 {
                    None
                } else {
                    Some(bn.mul(b))
                }
            }
            _ => Some(an.clone()),
        };
        if let Some(e) = elem {
            let d = e.deg();
            span.push((n, e));
            if d > target_deg as i64 {
                break;
            }
        }
        n += 1;
        if n > target_deg + 2 {
            break;
        }
    }
    let mut rest = w.clone();
    let mut coeffs: BTreeMap<u64, u32> = BTreeMap::new();
    while !rest.is_zero() {
        let d = rest.deg();
        let Some((n, s)) = span.iter().find(|(_, s)| s.deg() == d) else {
            let degs: Vec<String> = span.iter().map(|(_, s)| s.deg().to_string()).collect();
            return Ok(Verdict::NotRepresentableExact {
                reason: format!(
                    "elimination strands the x^{d} term of {rest}; the spanning polynomials have degrees {{{}}}",
                    degs.join(", ")
                ),
            });
        };
        let c = field.div(rest.leading(), s.leading()).expect("nonzero");
        rest = rest.sub(&s.scale(c));
        *coeffs.entry(*n).or_insert(0) = c;
    }
    let mu = fu.mu;
    let mut terms = Vec::new();
    for (&n, &c) in coeffs.iter().rev() {
        if n == 0 {
            terms.push(PowerTerm { lambda: c, power: 0 });
            continue;
        }
        // odd: a_n = (e^n + mu^n e^-n)/2; char 2: b_n B = e^n + mu^n e^-n
        let lambda = if char_two { c } else { field.div(c, field.from_int(2)).expect("odd characteristic") };
        terms.push(PowerTerm { lambda, power: n as i64 });
        terms.push(PowerTerm { lambda: field.mul(lambda, field.pow(mu, n)), power: -(n as i64) });
    }
    let certificate = UnitList::Quadratic { eps, terms };
    let sum = certificate
        .quadratic_units()?
        .iter()
        .try_fold(OrderElement::from_poly(curve, Polynomial::zero(&field)), |acc, u| acc.add(u))?;
    if sum != OrderElement::from_poly(curve, w.clone()) {
        return Err(Error::Internal(format!("certificate sums to {sum}, not {w}")));
    }
    Ok(Verdict::Representable { certificate })
}

/// Cap on the number of enumerated units.
const MAX_UNITS: u64 = 1 << 20;

fn exponent_rank(e: i64) -> u64 {
    if e > 0 { 2 * e as u64 - 1 } else { 2 * e.unsigned_abs() }
}

/// All S-units of height at most `bound`, ordered by height, then by the
/// exponent vector (exponents ranked 0, 1, -1, 2, -2, ...), then by the
/// constant factor.
pub fn enumerate_units(field: &FieldSpec, s: &[Place], bound: u64) -> Result<Vec<RationalFunction>> {
    let finite: Vec<&Polynomial> = s
        .iter()
        .filter_map(|p| match p {
            Place::Finite(q) => Some(q),
            Place::Infinite => None,
        })
        .collect();
    let has_inf = s.contains(&Place::Infinite);
    let degs: Vec<i64> = finite.iter().map(|q| q.deg()).collect();
    let mut vectors: Vec<(u64, Vec<i64>)> = Vec::new();
    let mut cur = vec![0i64; finite.len()];
    fn rec(i: usize, degs: &[i64], bound: i64, has_inf: bool, cur: &mut Vec<i64>, out: &mut Vec<(u64, Vec<i64>)>) {
        if i == degs.len() {
            let pos: i64 = cur.iter().zip(degs).filter(|(e, _)| **e > 0).map(|(e, d)| e * d).sum();
            let neg: i64 = cur.iter().zip(degs).filter(|(e, _)| **e < 0).map(|(e, d)| -e * d).sum();
            if (has_inf || pos == neg) && pos.max(neg) <= bound {
                out.push((pos.max(neg) as u64, cur.clone()));
            }
            return;
        }
        let r = bound / degs[i];
        for e in -r..=r {
            cur[i] = e;
            rec(i + 1, degs, bound, has_inf, cur, out);
        }
        cur[i] = 0;
    }
    let total_estimate: u64 = degs
        .iter()
        .map(|d| 2 * (bound / *d as u64) + 1)
        .try_fold(1u64, |acc, x| acc.checked_mul(x))
        .and_then(|v| v.checked_mul(field.order() as u64 - 1))
        .unwrap_or(u64::MAX);
    if total_estimate > MAX_UNITS {
        return Err(Error::FieldTooLarge(format!("about {total_estimate} units of height <= {bound}")));
    }
    rec(0, &degs, bound as i64, has_inf, &mut cur, &mut vectors);
    vectors.sort_by(|(ha, a), (hb, b)| {
        ha.cmp(hb).then_with(|| {
            a.iter().map(|&e| exponent_rank(e)).cmp(b.iter().map(|&e| exponent_rank(e)))
        })
    });
    let mut out = Vec::with_capacity(vectors.len() * (field.order() as usize - 1));
    for (_, v) in &vectors {
        let mut num = Polynomial::one(field);
        let mut den = Polynomial::one(field);
        for (q, &e) in finite.iter().zip(v) {
            if e > 0 {
                num = num.mul(&q.pow(e as u64));
            } else if e < 0 {
                den = den.mul(&q.pow(e.unsigned_abs()));
            }
        }
        let base = RationalFunction::new(num, den)?;
        for lambda in field.nonzero_elements() {
            out.push(base.scale(lambda));
        }
    }
    Ok(out)
}

/// Multisets of size k from 0..n, as nondecreasing index vectors.
fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn binomial(n: u64, k: u64) -> u64 {
    let mut r: u64 = 1;
    for i in 0..k {
        r = match r.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u64::MAX,
        };
    }
    r
}

/// Search for target = u_1 + ... + u_c with c <= n and S-units of height at
/// most `height_bound`. Stops at the least c with a solution and returns the
/// least certificate (units sorted in decreasing order, compared
/// lexicographically).
pub fn bounded_witness(
    field: &FieldSpec,
    s: &[Place],
    target: &RationalFunction,
    n: usize,
    height_bound: u64,
    budget: u64,
    exec: Exec,
) -> Result<Verdict> {
    if s.is_empty() {
        return Err(Error::BadPlaceSet("S is empty".into()));
    }
    check_s_integer(target, s)?;
    if n == 0 {
        return Ok(Verdict::NotRepresentableExact { reason: "the empty sum is zero and not admitted".into() });
    }
    if n == 1 {
        if is_s_unit(target, s)? {
            return Ok(Verdict::Representable { certificate: UnitList::Rational(vec![target.clone()]) });
        }
        let outside = if target.is_zero() {
            "target is zero".to_string()
        } else {
            let (z, p) = target.divisors()?;
            let places: Vec<String> = z.support().chain(p.support()).filter(|q| !s.contains(q)).map(|q| q.to_string()).collect();
            format!("divisor of {target} is supported at {} outside S", places.join(", "))
        };
        return Ok(Verdict::NotRepresentableExact { reason: outside });
    }
    let units = enumerate_units(field, s, height_bound)?;
    let index: HashMap<&RationalFunction, usize> = units.iter().enumerate().map(|(i, u)| (u, i)).collect();
    let mut spent = 0u64;
    for count in 1..=n {
        let prefix_len = count.saturating_sub(2);
        let steps = if count == 1 { 1 } else { binomial((units.len() + prefix_len) as u64 - 1, prefix_len as u64).saturating_mul(units.len() as u64) };
        spent = spent.saturating_add(steps);
        if spent > budget {
            return Err(Error::BudgetExceeded { reached: count - 1 });
        }
        let mut found: Vec<Vec<RationalFunction>> = if count == 1 {
            index.get(target).map(|_| vec![vec![target.clone()]]).unwrap_or_default()
        } else {
            let prefixes = multisets(units.len(), prefix_len);
            exec.map(&prefixes, |pre| {
                let start = pre.last().copied().unwrap_or(0);
                let rest = pre.iter().fold(target.clone(), |acc, &i| acc.sub(&units[i]));
                let mut hits = Vec::new();
                for a in start..units.len() {
                    let other = rest.sub(&units[a]);
                    if let Some(&b) = index.get(&other) {
                        if b >= a {
                            let mut cert: Vec<RationalFunction> = pre.iter().map(|&i| units[i].clone()).collect();
                            cert.push(units[a].clone());
                            cert.push(units[b].clone());
                            cert.sort_by(|x, y| y.cmp(x));
                            hits.push(cert);
                        }
                    }
                }
                hits
            })
            .into_iter()
            .flatten()
            .collect()
        };
        if let Some(best) = found.iter_mut().min().cloned() {
            let sum = best.iter().fold(RationalFunction::zero(field), |acc, u| acc.add(u));
            if sum != *target {
                return Err(Error::Internal(format!("certificate sums to {sum}")));
            }
            return Ok(Verdict::Representable { certificate: UnitList::Rational(best) });
        }
    }
    Ok(Verdict::NoneWithinBounds { height_bound, unit_count: n })
}

/// A random element of O_S of height at most `max_height`.
pub fn random_s_integer<R: Rng>(field: &FieldSpec, s: &[Place], max_height: u64, rng: &mut R) -> RationalFunction {
    let finite: Vec<&Polynomial> = s
        .iter()
        .filter_map(|p| match p {
            Place::Finite(q) => Some(q),
            Place::Infinite => None,
        })
        .collect();
    let q = field.order();
    let mut den = Polynomial::one(field);
    if !finite.is_empty() {
        let target = rng.gen_range(0..=max_height);
        while den.deg() < target as i64 {
            let pick = finite[rng.gen_range(0..finite.len())];
            if den.deg() + pick.deg() > target as i64 {
                break;
            }
            den = den.mul(pick);
        }
    }
    let max_num = if s.contains(&Place::Infinite) { max_height as i64 } else { den.deg() };
    let num_deg = rng.gen_range(0..=max_num.max(0)) as usize;
    let coeffs = (0..=num_deg).map(|_| rng.gen_range(0..q)).collect();
    RationalFunction::new(Polynomial::new(field, coeffs), den).expect("nonzero denominator")
}
