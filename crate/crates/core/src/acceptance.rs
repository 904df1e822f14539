//! The acceptance suite: one check per release criterion, shared by the
//! `acceptance` test target and the CLI `selftest` subcommand.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decompose::{decompose_quadratic, decompose_rational, is_s_unit};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::ff::FieldSpec;
use crate::funcfield::{root_residual, Place, QuadraticEquation, RationalFunction, Splitting};
use crate::poly::Polynomial;
use crate::quadratic::{
    check_nonsingular, classify, closed_form_genus_zero_splitting, fundamental_unit, genus_and_splitting,
    roots_at_infinity, singular_point, unit_power_sequence, unit_powers, CurveSpec, OrderElement, UnitSumNumber,
};
use crate::search::{bounded_witness, exact_witness_quadratic, nonrepresentable_n, random_s_integer, Verdict};
use crate::sweep::{acceptance_curves, classify_all, SweepRow};

pub const CRITERIA: [&str; 9] = [
    "classification-instances",
    "sweep-consistency",
    "degree-laws",
    "greedy-decomposer",
    "nonrep-values",
    "rank-one-separation",
    "bounded-witness",
    "series-correctness",
    "nonsingularity",
];

#[derive(Debug, Clone)]
pub struct Options {
    /// Run only the criteria whose name contains this text.
    pub filter: Option<String>,
    /// Replace the unit-power recursion by a corrupted one (negative control).
    pub mutate_recursion: bool,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for Options {
    fn default() -> Self {
        Options { filter: None, mutate_recursion: false, seed: 2024, exec: Exec::default() }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

struct Ctx {
    opts: Options,
    rows: Option<Vec<SweepRow>>,
}

impl Ctx {
    fn rows(&mut self) -> std::result::Result<&[SweepRow], String> {
        if self.rows.is_none() {
            let curves = lift(acceptance_curves(self.opts.exec))?;
            self.rows = Some(lift(classify_all(&curves, self.opts.exec))?);
        }
        Ok(self.rows.as_deref().expect("just computed"))
    }
}

pub fn run(opts: &Options) -> Vec<Outcome> {
    let mut ctx = Ctx { opts: opts.clone(), rows: None };
    let mut out = Vec::new();
    for (i, name) in CRITERIA.iter().enumerate() {
        if opts.filter.as_deref().is_some_and(|f| !name.contains(f)) {
            continue;
        }
        let start = Instant::now();
        let res = match i {
            0 => classification_instances(),
            1 => sweep_consistency(&mut ctx),
            2 => degree_laws(&mut ctx),
            3 => greedy_decomposer(&ctx.opts),
            4 => nonrep_values(),
            5 => rank_one_separation(),
            6 => bounded_search(&ctx.opts),
            7 => series_correctness(&mut ctx),
            _ => nonsingularity(&mut ctx),
        };
        let (passed, detail) = match res {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        out.push(Outcome { id: i + 1, name, passed, detail, elapsed: start.elapsed() });
    }
    out
}

fn gf(s: &str) -> std::result::Result<FieldSpec, String> {
    lift(FieldSpec::parse(s))
}

fn curve(field: &str, s: &str) -> std::result::Result<CurveSpec, String> {
    lift(CurveSpec::parse(&gf(field)?, s))
}

fn classification_instances() -> Check {
    let cases = [
        ("GF(5)", "y^2 = x^2+1", UnitSumNumber::Omega),
        ("GF(5)", "y^2 = 2x^2+1", UnitSumNumber::Infinity),
        ("GF(5)", "y^2 = x^3+x", UnitSumNumber::Infinity),
        ("GF(2)", "y^2 + (x)y + (x) = 0", UnitSumNumber::Omega),
        ("GF(2)", "y^2 + (x)y + (x^2+x) = 0", UnitSumNumber::Infinity),
        ("GF(4)", "y^2 + (x)y + (x^2+x) = 0", UnitSumNumber::Omega),
    ];
    for (f, c, want) in cases {
        let got = lift(classify(&curve(f, c)?))?.verdict;
        ensure(got == want, || format!("{f} {c}: got {got}, expected {want}"))?;
    }
    Ok(format!("{} instances", cases.len()))
}

fn probes(c: &CurveSpec) -> Result<Vec<OrderElement>> {
    ["1", "x", "y", "x + y"].iter().map(|s| OrderElement::parse(c, s)).collect()
}

fn sweep_consistency(ctx: &mut Ctx) -> Check {
    let exec = ctx.opts.exec;
    let rows = ctx.rows()?;
    let mut omega = 0;
    for r in rows {
        let conj = r.unit.is_some() && r.report.genus_zero && r.report.splitting == Splitting::Split;
        let is_omega = r.report.verdict == UnitSumNumber::Omega;
        ensure(is_omega == conj, || format!("{} over {}: verdict {} but conjunction {conj}", r.curve, r.curve.field(), r.report.verdict))?;
        omega += is_omega as usize;
    }
    let omega_rows: Vec<&SweepRow> = rows.iter().filter(|r| r.report.verdict == UnitSumNumber::Omega).collect();
    let failures: Vec<String> = exec.filter_map(&omega_rows, |r| -> Option<String> {
        let run = || -> Result<()> {
            for w in probes(&r.curve)? {
                let list = decompose_quadratic(&w, 16, false)?;
                let sum = list
                    .quadratic_units()?
                    .iter()
                    .try_fold(OrderElement::from_poly(&r.curve, Polynomial::zero(r.curve.field())), |a, u| a.add(u))?;
                if sum != w {
                    return Err(Error::Internal(format!("{w} re-sums to {sum}")));
                }
            }
            Ok(())
        };
        run().err().map(|e| format!("{} over {}: {e}", r.curve, r.curve.field()))
    });
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(format!("{} curves, {omega} omega, probes decomposed", rows.len()))
}

fn corrupted_powers(eps: &OrderElement, n: u64) -> Vec<(Polynomial, Polynomial)> {
    let field = eps.curve().field();
    let a = eps.a();
    let mut out = vec![(Polynomial::one(field), Polynomial::zero(field))];
    for _ in 0..n {
        let (an, bn) = out.last().expect("nonempty");
        // drops the b_n f (resp. b_n C) term
        out.push((a.mul(an), a.mul(bn).add(an)));
    }
    out
}

fn degree_laws(ctx: &mut Ctx) -> Check {
    let mutate = ctx.opts.mutate_recursion;
    let exec = ctx.opts.exec;
    let rows: Vec<&SweepRow> = ctx.rows()?.iter().filter(|r| r.unit.is_some()).collect();
    let failures: Vec<String> = exec.filter_map(&rows, |r| -> Option<String> {
        let eps = &r.unit.as_ref().expect("filtered").unit;
        let seq = if mutate { corrupted_powers(eps, 15) } else { unit_power_sequence(eps, 15) };
        let check = || -> std::result::Result<(), String> {
            for n in 1..=15u64 {
                let (an, bn) = &seq[n as usize];
                let n = n as i64;
                match &r.curve {
                    CurveSpec::OddChar { f } => {
                        let h = f.deg() / 2;
                        ensure(an.deg() == n * h, || format!("deg a_{n} = {} != {}", an.deg(), n * h))?;
                        ensure(bn.deg() == (n - 1) * h, || format!("deg b_{n} = {} != {}", bn.deg(), (n - 1) * h))?;
                    }
                    CurveSpec::CharTwo { b, .. } => {
                        let d = b.deg();
                        ensure(an.deg() <= n * d, || format!("deg a_{n} = {} > {}", an.deg(), n * d))?;
                        ensure(bn.deg() == (n - 1) * d, || format!("deg b_{n} = {} != {}", bn.deg(), (n - 1) * d))?;
                    }
                    CurveSpec::CharTwoInseparable { .. } => return Err("inseparable curve with a unit".into()),
                }
                let p = eps.pow(n as u64);
                ensure(p.a() == an && p.b() == bn, || format!("recursion differs from eps^{n}"))?;
                if n == 15 {
                    let direct = unit_powers(eps, 15).map_err(|e| e.to_string())?;
                    ensure(direct == (p.a().clone(), p.b().clone()), || "unit_powers differs from eps^15".into())?;
                }
            }
            Ok(())
        };
        check().err().map(|e| format!("{} over {} with unit {eps}: {e}", r.curve, r.curve.field()))
    });
    ensure(failures.is_empty(), || format!("{} failures, first: {}", failures.len(), failures[0]))?;
    Ok(format!("{} units, n = 1..15", rows.len()))
}

fn greedy_decomposer(opts: &Options) -> Check {
    let f5 = gf("GF(5)")?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let sets = [
        vec![Place::Infinite, Place::point(&f5, 0)],
        vec![Place::Infinite, Place::point(&f5, 0), Place::point(&f5, 4)],
    ];
    let mut total = 0;
    for s in &sets {
        for _ in 0..100 {
            let f = random_s_integer(&f5, s, 10, &mut rng);
            let d = lift(decompose_rational(&f, s, false))?;
            let units = d.units.rational_units().expect("rational");
            let sum = units.iter().fold(RationalFunction::zero(&f5), |a, u| a.add(u));
            ensure(sum == f, || format!("{f} re-sums to {sum}"))?;
            for u in units {
                ensure(lift(is_s_unit(u, s))?, || format!("{u} is not an S-unit in the decomposition of {f}"))?;
            }
            let h = if f.is_zero() { 0 } else { lift(f.height())? };
            ensure(units.len() as u64 <= h + 1, || format!("{f}: {} units for height {h}", units.len()))?;
            ensure(d.height_trace.windows(2).all(|w| w[1] < w[0]), || format!("{f}: trace {:?}", d.height_trace))?;
            total += 1;
        }
    }
    Ok(format!("{total} S-integers, seed {}", opts.seed))
}

/// All integers -sum_{j <= m} p^{t_j} k_j with t_j <= tmax, |k_j| <= a.
fn brute_force_sums(p: i64, m: u32, a: i64, tmax: u32) -> BTreeSet<i64> {
    let terms: Vec<i64> = (0..=tmax).flat_map(|t| (-a..=a).map(move |k| p.pow(t) * k)).collect();
    let mut sums = BTreeSet::from([0i64]);
    for _ in 0..m {
        sums = sums.iter().flat_map(|s| terms.iter().map(move |t| s - t)).collect();
    }
    sums
}

fn nonrep_values() -> Check {
    let cases = [(2u32, 1u32, 1u64, 3u64), (2, 2, 1, 11), (3, 1, 1, 2), (2, 0, 1, 1), (5, 0, 3, 1)];
    let mut notes = Vec::new();
    for (p, m, a, want) in cases {
        let r = lift(nonrepresentable_n(p, m, a, 1000))?;
        ensure(r.n == want, || format!("({p},{m},{a}): n = {}, expected {want}", r.n))?;
        let sums = brute_force_sums(p as i64, m, a as i64, r.t + 2);
        ensure(!sums.contains(&(r.n as i64)), || format!("({p},{m},{a}): {} is a sum", r.n))?;
        // the certificate itself: no residue mod p^T matches, and terms with
        // t >= T vanish mod p^T, so t < T is exhaustive
        let modulus = (p as i64).pow(r.t);
        let residues = brute_force_sums(p as i64, m, a as i64, r.t.saturating_sub(1));
        ensure(
            residues.iter().all(|s| s.rem_euclid(modulus) != r.n as i64 % modulus),
            || format!("({p},{m},{a}): certificate mod {modulus} fails"),
        )?;
        // every smaller positive integer is a sum
        for k in 1..r.n {
            ensure(sums.contains(&(k as i64)), || format!("({p},{m},{a}): {k} < n is not a sum"))?;
        }
        notes.push(format!("({p},{m},{a}) -> {} mod {p}^{}", r.n, r.t));
    }
    Ok(notes.join(", "))
}

fn rank_one_separation() -> Check {
    let c = curve("GF(5)", "y^2 = x^4+1")?;
    let fu = lift(fundamental_unit(&c))?.ok_or("no fundamental unit")?;
    ensure(fu.unit.to_string() == "x^2 + y" && fu.mu == 4, || format!("unit {} with mu {}", fu.unit, fu.mu))?;
    let report = lift(classify(&c))?;
    ensure(report.verdict == UnitSumNumber::Infinity, || "classified omega".into())?;
    let x = lift(Polynomial::parse(c.field(), "x"))?;
    let v = lift(exact_witness_quadratic(&c, &x))?;
    ensure(matches!(v, Verdict::NotRepresentableExact { .. }), || format!("x: {v}"))?;
    Ok("x^2 + y, mu = 4, infinity, x certified".into())
}

fn bounded_search(opts: &Options) -> Check {
    let f2 = gf("GF(2)")?;
    let s = vec![Place::Infinite, Place::point(&f2, 0), Place::point(&f2, 1)];
    let target = lift(RationalFunction::parse(&f2, "x^2+x+1"))?;
    let v1 = lift(bounded_witness(&f2, &s, &target, 1, 4, 1 << 24, opts.exec))?;
    ensure(v1.kind() == "not-representable-exact", || format!("N = 1: {}", v1.kind()))?;
    let v2 = lift(bounded_witness(&f2, &s, &target, 2, 4, 1 << 24, opts.exec))?;
    let Verdict::Representable { certificate } = &v2 else {
        return Err(format!("N = 2: {}", v2.kind()));
    };
    let units = certificate.rational_units().expect("rational");
    let text: Vec<String> = units.iter().map(|u| u.to_string()).collect();
    ensure(text == ["x^2", "x+1"], || format!("certificate {text:?}"))?;
    for u in units {
        ensure(lift(is_s_unit(u, &s))?, || format!("{u} is not an S-unit"))?;
    }
    Ok("N = 1 exact, N = 2 [x^2, x+1]".into())
}

fn series_correctness(ctx: &mut Ctx) -> Check {
    let exec = ctx.opts.exec;
    let rows: Vec<&SweepRow> = ctx.rows()?.iter().filter(|r| !matches!(r.curve, CurveSpec::CharTwoInseparable { .. })).collect();
    let failures: Vec<String> = exec.filter_map(&rows, |r| -> Option<String> {
        let check = || -> std::result::Result<bool, String> {
            let roots = lift(roots_at_infinity(&r.curve, 24))?;
            let eq = match &r.curve {
                CurveSpec::OddChar { f } => QuadraticEquation::Square { f },
                CurveSpec::CharTwo { b, c } => QuadraticEquation::ArtinSchreier { b, c },
                CurveSpec::CharTwoInseparable { .. } => unreachable!(),
            };
            let lowest = match &r.curve {
                CurveSpec::OddChar { f } => -f.deg(),
                CurveSpec::CharTwo { b, c } => -(c.deg().max(2 * b.deg())),
                CurveSpec::CharTwoInseparable { .. } => unreachable!(),
            };
            if roots.splitting == Splitting::Split {
                ensure(roots.roots.len() == 2, || "split without two roots".into())?;
                for y in &roots.roots {
                    let res = root_residual(eq, y);
                    ensure(res.is_zero(), || format!("root {y} leaves {res}"))?;
                    let verified = res.abs_precision() - lowest;
                    ensure(verified >= 20, || format!("only {verified} coefficients verified"))?;
                }
            }
            if let CurveSpec::CharTwo { b, c } = &r.curve {
                let info = lift(genus_and_splitting(&r.curve))?;
                if info.genus_zero {
                    if let Some(closed) = lift(closed_form_genus_zero_splitting(b, c))? {
                        ensure(closed == roots.splitting, || format!("closed form {closed}, series {}", roots.splitting))?;
                        return Ok(true);
                    }
                }
            }
            Ok(false)
        };
        match check() {
            Ok(true) => None,
            Ok(false) => None,
            Err(e) => Some(format!("{} over {}: {e}", r.curve, r.curve.field())),
        }
    });
    ensure(failures.is_empty(), || failures.join("; "))?;
    let split = rows.iter().filter(|r| r.report.splitting == Splitting::Split).count();
    Ok(format!("{split} split curves, 24-term roots"))
}

fn nonsingularity(ctx: &mut Ctx) -> Check {
    let exec = ctx.opts.exec;
    let rows: Vec<&SweepRow> = ctx.rows()?.iter().filter(|r| matches!(r.curve, CurveSpec::CharTwo { .. })).collect();
    let failures: Vec<String> = exec.filter_map(&rows, |r| match check_nonsingular(&r.curve, &[1, 2], Exec::Sequential) {
        Ok(true) => None,
        Ok(false) => Some(format!("{} over {} is singular", r.curve, r.curve.field())),
        Err(e) => Some(e.to_string()),
    });
    ensure(failures.is_empty(), || failures.join("; "))?;
    let f2 = gf("GF(2)")?;
    let (b, c) = (lift(Polynomial::parse(&f2, "x"))?, lift(Polynomial::parse(&f2, "x^2"))?);
    ensure(CurveSpec::char_two(b.clone(), c.clone()).is_err(), || "B = x, C = x^2 accepted".into())?;
    let pt = lift(singular_point(&b, &c, &[1], exec))?.ok_or("B = x, C = x^2: no singular point")?;
    Ok(format!("{} curves over GF(q), GF(q^2); B = x, C = x^2 singular at {pt}", rows.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_enumerator() {
        let s = brute_force_sums(2, 1, 1, 3);
        assert_eq!(s, BTreeSet::from([-8, -4, -2, -1, 0, 1, 2, 4, 8]));
    }

    #[test]
    fn cheap_criteria_pass() {
        for name in ["classification-instances", "nonrep-values", "rank-one-separation", "bounded-witness"] {
            let out = run(&Options { filter: Some(name.into()), ..Options::default() });
            assert_eq!(out.len(), 1);
            assert!(out[0].passed, "{}: {}", out[0].name, out[0].detail);
        }
    }
}
