//! Exhaustive curve families and their classification, the workload behind
//! the consistency sweeps and the benchmarks.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::ff::FieldSpec;
use crate::poly::{monic_polys, polys_up_to, Polynomial};
use crate::quadratic::{classify, fundamental_unit, ClassificationReport, CurveSpec, FundamentalUnit};

/// Every valid y^2 = f with 1 <= deg f <= max_deg.
pub fn odd_char_curves(field: &FieldSpec, max_deg: usize, exec: Exec) -> Vec<CurveSpec> {
    let candidates: Vec<Polynomial> = polys_up_to(field, max_deg).filter(|f| f.deg() >= 1).collect();
    exec.filter_map(&candidates, |f| CurveSpec::odd(f.clone()).ok())
}

/// Every valid y^2 + B y + C = 0 with B monic, deg B <= max_deg_b and
/// deg C <= 2 deg B + 1.
pub fn char_two_curves(field: &FieldSpec, max_deg_b: usize, exec: Exec) -> Vec<CurveSpec> {
    let mut pairs = Vec::new();
    for db in 0..=max_deg_b {
        for b in monic_polys(field, db) {
            for c in polys_up_to(field, 2 * db + 1) {
                if !c.is_zero() {
                    pairs.push((b.clone(), c));
                }
            }
        }
    }
    exec.filter_map(&pairs, |(b, c)| CurveSpec::char_two(b.clone(), c.clone()).ok())
}

/// The acceptance sweep: q in {3, 5} with deg f <= 4, and q in {2, 4} with
/// deg B <= 2.
pub fn acceptance_curves(exec: Exec) -> Result<Vec<CurveSpec>> {
    let mut out = Vec::new();
    for q in [3, 5] {
        out.extend(odd_char_curves(&FieldSpec::prime(q)?, 4, exec));
    }
    for k in [1, 2] {
        out.extend(char_two_curves(&FieldSpec::new(2, k)?, 2, exec));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub curve: CurveSpec,
    pub report: ClassificationReport,
    pub unit: Option<FundamentalUnit>,
}

pub fn classify_all(curves: &[CurveSpec], exec: Exec) -> Result<Vec<SweepRow>> {
    exec.map(curves, |c| -> Result<SweepRow> {
        let report = classify(c)?;
        let unit = match fundamental_unit(c) {
            Ok(u) => u,
            Err(Error::InseparableCurve) => None,
            Err(e) => return Err(e),
        };
        Ok(SweepRow { curve: c.clone(), report, unit })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::UnitSumNumber;

    #[test]
    fn small_families() {
        let f3 = FieldSpec::prime(3).unwrap();
        let curves = odd_char_curves(&f3, 2, Exec::Sequential);
        // degree 1: 2*3 polynomials; degree 2: 2*9 minus the 2*3 squares
        assert_eq!(curves.len(), 6 + 12);
        let rows = classify_all(&curves, Exec::default()).unwrap();
        let omega = rows.iter().filter(|r| r.report.verdict == UnitSumNumber::Omega).count();
        // degree 2 with square leading coefficient 1: 9 - 3 squares
        assert_eq!(omega, 6);
        let f2 = FieldSpec::prime(2).unwrap();
        let seq = char_two_curves(&f2, 1, Exec::Sequential);
        assert_eq!(seq, char_two_curves(&f2, 1, Exec::Parallel));
        assert!(seq.contains(&CurveSpec::parse(&f2, "y^2 + (x)y + (x) = 0").unwrap()));
    }
}
