use unitsum::exec::Exec;
use unitsum::quadratic::check_nonsingular;
use unitsum::search::bounded_witness;
use unitsum::sweep::{char_two_curves, classify_all, odd_char_curves};
use unitsum::{FieldSpec, Place, RationalFunction};

#[test]
fn sweep_rows_identical() {
    let f5 = FieldSpec::prime(5).unwrap();
    let f4 = FieldSpec::new(2, 2).unwrap();
    let mut curves = odd_char_curves(&f5, 3, Exec::Sequential);
    assert_eq!(curves, odd_char_curves(&f5, 3, Exec::Parallel));
    curves.extend(char_two_curves(&f4, 1, Exec::Parallel));
    let seq = classify_all(&curves, Exec::Sequential).unwrap();
    let par = classify_all(&curves, Exec::Parallel).unwrap();
    assert_eq!(seq.len(), par.len());
    for (a, b) in seq.iter().zip(&par) {
        assert_eq!(a.curve, b.curve);
        assert_eq!(a.report, b.report);
        assert_eq!(a.unit.as_ref().map(|u| u.unit.to_string()), b.unit.as_ref().map(|u| u.unit.to_string()));
    }
    for c in curves.iter().filter(|c| c.field().characteristic() == 2) {
        assert_eq!(check_nonsingular(c, &[1, 2], Exec::Sequential).unwrap(), check_nonsingular(c, &[1, 2], Exec::Parallel).unwrap());
    }
}

#[test]
fn witness_certificates_identical() {
    let f3 = FieldSpec::prime(3).unwrap();
    let s = vec![Place::Infinite, Place::point(&f3, 0), Place::point(&f3, 1)];
    for target in ["x^2+2", "x^3+x+1", "(x^2+1)/x", "2*x^4+x"] {
        let t = RationalFunction::parse(&f3, target).unwrap();
        let seq = bounded_witness(&f3, &s, &t, 3, 3, 1 << 24, Exec::Sequential).map(|v| v.to_string());
        let par = bounded_witness(&f3, &s, &t, 3, 3, 1 << 24, Exec::Parallel).map(|v| v.to_string());
        assert_eq!(seq.map_err(|e| e.to_string()), par.map_err(|e| e.to_string()), "{target}");
    }
}
