use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_bigint::BigInt;
use tamtor::curve::WeierstrassCurve;
use tamtor::tate::{conductor, tate_local_data};

fn curve(a: [i64; 5]) -> WeierstrassCurve {
    WeierstrassCurve::new(a.map(BigInt::from)).unwrap()
}

fn bench_local_data(c: &mut Criterion) {
    let e11a1 = curve([0, -1, 1, -10, -20]);
    let e114c1 = curve([1, 1, 1, -352, -2431]);
    let quartic = curve([0, 0, 0, -25, 0]);

    c.bench_function("tate 11a1 at 11", |b| {
        let p = BigInt::from(11);
        b.iter(|| tate_local_data(black_box(&e11a1), black_box(&p)).unwrap())
    });
    c.bench_function("tate 114c1 at 2", |b| {
        let p = BigInt::from(2);
        b.iter(|| tate_local_data(black_box(&e114c1), black_box(&p)).unwrap())
    });
    c.bench_function("tate y^2=x^3-25x at 5", |b| {
        let p = BigInt::from(5);
        b.iter(|| tate_local_data(black_box(&quartic), black_box(&p)).unwrap())
    });
    c.bench_function("conductor 114c1", |b| {
        b.iter(|| conductor(black_box(&e114c1)).unwrap())
    });
}

criterion_group!(benches, bench_local_data);
criterion_main!(benches);
