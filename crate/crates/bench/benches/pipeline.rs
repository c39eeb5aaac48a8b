use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use larmour_core::hermitian::{hensel_lift_isometry, larmour_decompose};
use larmour_core::involutions::CaseLabel;
use larmour_core::residue_maps::boundary;
use larmour_core::sample::{
    fixture, random_form, random_nonzero, random_quat, random_sym, random_unit_quat,
};
use larmour_core::valued_field::ValuedField;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arithmetic(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let k = ValuedField::prime(5).unwrap();
    let a = random_nonzero(&mut rng, &k, 0, 0)
        .add(&k.one().shift(1))
        .unwrap()
        .inv()
        .unwrap();
    let b = a.mul(&a).unwrap();
    c.bench_function("laurent mul, dense F_5 series", |bn| {
        bn.iter(|| black_box(&a).mul(black_box(&b)).unwrap())
    });
    c.bench_function("laurent inv, dense F_5 series", |bn| {
        bn.iter(|| black_box(&b).inv().unwrap())
    });
    let (alg, _, _, _) = fixture(CaseLabel::B12, 5).unwrap();
    let u = random_quat(&mut rng, &alg, -1, 1);
    let v = random_quat(&mut rng, &alg, -1, 1);
    c.bench_function("quaternion mul, sparse F_5 coordinates", |bn| {
        bn.iter(|| alg.mul(black_box(&u), black_box(&v)).unwrap())
    });
}

fn lifting(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (alg, sigma, eps, _) = fixture(CaseLabel::B211, 5).unwrap();
    let v1 = loop {
        let u = random_sym(&mut rng, &alg, &sigma, eps, 0, 0);
        if alg.valuation_d(&u).unwrap().0 == 0 {
            break u;
        }
    };
    let t0 = random_unit_quat(&mut rng, &alg);
    let v0 = alg
        .product(&[&sigma.apply(&alg, &t0).unwrap(), &v1, &t0])
        .unwrap();
    let theta = alg.residue_d(&t0).unwrap();
    c.bench_function("hensel lift, B211 over F_5", |bn| {
        bn.iter(|| hensel_lift_isometry(&alg, &sigma, &v0, &v1, &theta).unwrap())
    });
}

fn decomposition(c: &mut Criterion) {
    let mut group = c.benchmark_group("decompose 3-dim form");
    for label in CaseLabel::ALL {
        let (alg, sigma, eps, _) = fixture(label, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        group.bench_function(label.to_string(), |bn| {
            bn.iter_batched(
                || random_form(&mut rng, &alg, &sigma, eps, 3),
                |h| larmour_decompose(&h).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
    let (alg, sigma, eps, _) = fixture(CaseLabel::B12, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    c.bench_function("boundary of 3-dim B12 form over F_3", |bn| {
        bn.iter_batched(
            || random_form(&mut rng, &alg, &sigma, eps, 3),
            |h| boundary(&h).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, arithmetic, lifting, decomposition);
criterion_main!(benches);
