use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use aperture_core::channel::los_channel;
use aperture_core::geometry::{build_array, place_terminals};
use aperture_core::montecarlo::{run_multicell, run_trials};
use aperture_core::power_control::{maxmin_uplink_multicell, CrossGains};
use aperture_core::zf_core::{gram, zf_diagnostics};
use aperture_core::{AmplitudeMode, ArrayShape, Layout, ScenarioConfig};

fn splitmix(state: &mut u64) -> f64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64
}

fn bench_gram(c: &mut Criterion) {
    let mut group = c.benchmark_group("gram");
    for (label, f_c, m) in [("pcs_128x18", 1.9e9, 128usize), ("mmwave_4000x18", 60e9, 4000)] {
        let array = build_array(ArrayShape::Circular, m, f_c, [0.0, 0.0], 30.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let terminals = place_terminals(&mut rng, 18, 0, [0.0, 0.0], 250.0, 1.5);
        let g = los_channel(&array, &terminals, AmplitudeMode::Center);
        group.bench_function(label, |b| b.iter(|| gram(black_box(&g))));
    }
    group.finish();
}

fn bench_zf(c: &mut Criterion) {
    let array = build_array(ArrayShape::Circular, 128, 1.9e9, [0.0, 0.0], 30.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let terminals = place_terminals(&mut rng, 18, 0, [0.0, 0.0], 250.0, 1.5);
    let g = los_channel(&array, &terminals, AmplitudeMode::Center);
    c.bench_function("zf_diagnostics_128x18", |b| {
        b.iter(|| zf_diagnostics(black_box(&g)).unwrap())
    });
}

fn bench_trials(c: &mut Criterion) {
    let single = ScenarioConfig::default();
    c.bench_function("single_cell_trial", |b| {
        b.iter(|| run_trials(black_box(&single), 1, 1).unwrap())
    });
    let multi = ScenarioConfig { layout: Layout::SevenCell, ..ScenarioConfig::default() };
    let mut group = c.benchmark_group("multicell");
    group.sample_size(10);
    group.bench_function("seven_cell_trial", |b| {
        b.iter(|| run_multicell(black_box(&multi), 1, 1).unwrap())
    });
    group.finish();
}

fn bench_solver(c: &mut Criterion) {
    let n = 126;
    let mut state = 42u64;
    let inv_gain: Vec<f64> = (0..n).map(|_| 1e-9 * (0.5 + splitmix(&mut state))).collect();
    let mut cross = CrossGains::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i / 18 != j / 18 {
                cross.set(i, j, 1e-11 * splitmix(&mut state));
            }
        }
    }
    c.bench_function("maxmin_uplink_126", |b| {
        b.iter(|| maxmin_uplink_multicell(black_box(&inv_gain), &cross, 1.6e-13, 0.2).unwrap())
    });
}

criterion_group!(benches, bench_gram, bench_zf, bench_trials, bench_solver);
criterion_main!(benches);
