use criterion::{criterion_group, criterion_main, Criterion};
use orthosep_core::invspace::invariant_basis;
use orthosep_core::separate::{beta_sep, is_minimal, main_set, OrbitTable};
use orthosep_core::Field;

fn minimality(c: &mut Criterion) {
    let mut g = c.benchmark_group("minimal");
    for (q, m) in [(2u64, 4usize), (5, 3), (9, 2)] {
        let field = Field::new(q).unwrap();
        let table = OrbitTable::new(&field, m);
        let set = main_set(m, &field).unwrap();
        g.bench_function(format!("q{q}_m{m}"), |b| {
            b.iter(|| is_minimal(&table, &set).unwrap())
        });
    }
    g.finish();
}

fn invariant_spaces(c: &mut Criterion) {
    let field = Field::new(7).unwrap();
    c.bench_function("basis_q7_m2_d6", |b| {
        b.iter(|| invariant_basis(2, 6, &field).unwrap())
    });
    c.bench_function("beta_q7_m2", |b| b.iter(|| beta_sep(2, &field, 6).unwrap()));
}

criterion_group!(benches, minimality, invariant_spaces);
criterion_main!(benches);
