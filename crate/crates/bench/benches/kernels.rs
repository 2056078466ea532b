use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use yamabe_cone::geometry::sphere_volume;
use yamabe_cone::isoperimetry::cone_iso_profile;
use yamabe_cone::symmetrization::rearrange;
use yamabe_cone::variational::minimize_line;
use yamabe_cone::verify::random_round_function;
use yamabe_cone::*;

fn iso_profile(c: &mut Criterion) {
    let cone = SphericalCone::new(&EinsteinData::einstein("b", 4, 16.0, 3.0).unwrap()).unwrap();
    c.bench_function("cone_iso_profile/99", |b| {
        b.iter(|| (1..100).map(|i| cone_iso_profile(&cone, i as f64 / 100.0).unwrap()).sum::<f64>())
    });
}

fn line_minimizer(c: &mut Criterion) {
    let pb = LineProblem::normalized(4, sphere_volume(4).unwrap(), 12.0, 4001).unwrap();
    let opts = MinimizeOptions::default();
    c.bench_function("minimize_line/n4_4001", |b| b.iter(|| minimize_line(black_box(&pb), &opts).unwrap().value));
}

fn rearrangement(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = ConeFunction::Round2d(random_round_function(RoundConeGrid::new(2, 200, 200).unwrap(), &mut rng).unwrap());
    c.bench_function("rearrange/200x200", |b| b.iter(|| rearrange(black_box(&f)).unwrap()));
}

criterion_group!(benches, iso_profile, line_minimizer, rearrangement);
criterion_main!(benches);
