use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use unitsum::exec::Exec;
use unitsum::quadratic::{check_nonsingular, CurveSpec};
use unitsum::search::bounded_witness;
use unitsum::sweep::{acceptance_curves, char_two_curves, classify_all};
use unitsum::{FieldSpec, Place, RationalFunction};

const PATHS: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn classification(c: &mut Criterion) {
    let curves = acceptance_curves(Exec::default()).unwrap();
    let mut group = c.benchmark_group("classify_sweep");
    group.sample_size(10);
    for (name, exec) in PATHS {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| classify_all(&curves, exec).unwrap().len())
        });
    }
    group.finish();
}

fn nonsingular(c: &mut Criterion) {
    let f4 = FieldSpec::new(2, 2).unwrap();
    let curves: Vec<CurveSpec> = char_two_curves(&f4, 2, Exec::default());
    let mut group = c.benchmark_group("nonsingular_gf4");
    group.sample_size(10);
    for (name, exec) in PATHS {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| exec.map(&curves, |cv| check_nonsingular(cv, &[1, 2], Exec::Sequential).unwrap()))
        });
    }
    group.finish();
}

fn witness(c: &mut Criterion) {
    let f3 = FieldSpec::prime(3).unwrap();
    let s = vec![Place::Infinite, Place::point(&f3, 0), Place::point(&f3, 1), Place::point(&f3, 2)];
    let target = RationalFunction::parse(&f3, "x^3+x^2+2").unwrap();
    let mut group = c.benchmark_group("bounded_witness_gf3");
    group.sample_size(10);
    for (name, exec) in PATHS {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| bounded_witness(&f3, &s, &target, 3, 3, 1 << 26, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, classification, nonsingular, witness);
criterion_main!(benches);
