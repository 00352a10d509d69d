use criterion::{criterion_group, criterion_main, Criterion};
use grover_noise::{
    exact_step, fit_shifted_power, initial_state, sigma_max_single_run,
    trajectory_success_probability, LadderConfig, NoiseConvention, NoiseSpec, ProblemSize,
    RandomStream, WeightedPoint,
};
use std::hint::black_box;

fn kernel(c: &mut Criterion) {
    let size = ProblemSize::new(16).unwrap();
    c.bench_function("exact_step x201 (N=65536)", |b| {
        b.iter(|| {
            let mut s = initial_state(size);
            for _ in 0..201 {
                s = exact_step(black_box(s), size);
            }
            s
        })
    });
}

fn noisy(c: &mut Criterion) {
    let size = ProblemSize::new(10).unwrap();
    let spec = NoiseSpec::new(0.002, NoiseConvention::StandardDeviation).unwrap();
    let mut rng = RandomStream::new(1);
    c.bench_function("noisy trajectory (N=1024)", |b| {
        b.iter(|| trajectory_success_probability(size, &spec, &mut rng).unwrap())
    });

    let ladder = LadderConfig::new(1e-4, 0.7, 1, 0).unwrap();
    let mut rng = RandomStream::new(2);
    c.bench_function("ladder run dσ=1e-4 (N=1024)", |b| {
        b.iter(|| sigma_max_single_run(size, &ladder, &mut rng).unwrap())
    });
}

fn fitting(c: &mut Criterion) {
    let points: Vec<_> = [1e-4, 1e-5, 1e-6, 1e-7, 1e-8]
        .iter()
        .map(|&x: &f64| WeightedPoint::new(x, 0.00104 + 0.024 * x.powf(0.3), 2e-5))
        .collect();
    c.bench_function("fit_shifted_power (5 points)", |b| {
        b.iter(|| fit_shifted_power(black_box(&points)).unwrap())
    });
}

criterion_group!(benches, kernel, noisy, fitting);
criterion_main!(benches);
