use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use octorecon::channel::{simulate, ChannelParams};
use octorecon::ldpc::{shipped_code, BpDecoder, DEFAULT_MAX_ITER};
use octorecon::reconciliation::{decode_side_info, encode_side_info, Direction, NoiseModel};
use octorecon::OrthoFamily;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn unit(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..8).map(|_| StandardNormal.sample(&mut *rng)).collect();
    let len = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / len).collect()
}

fn rotation(c: &mut Criterion) {
    let family = OrthoFamily::new(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (x, y) = (unit(&mut rng), unit(&mut rng));
    let coeffs = family.rotation_coeffs(&x, &y).unwrap();
    let mut g = c.benchmark_group("rotation");
    g.bench_function("coeffs_d8", |b| b.iter(|| family.rotation_coeffs(black_box(&x), black_box(&y))));
    g.bench_function("apply_d8", |b| b.iter(|| family.apply_rotation(black_box(&coeffs), black_box(&x))));
    g.finish();
}

fn reconciliation(c: &mut Criterion) {
    let family = OrthoFamily::new(8).unwrap();
    let code = shipped_code();
    let n = code.n_vars();
    let params = ChannelParams::experimental().at_distance(25.0).with_snr(0.7);
    let samples = simulate(&params, n, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let key: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<bool>())).collect();
    let side = encode_side_info(&family, &code, &key, &samples.y).unwrap();
    let noise = NoiseModel::analytic(&params, Direction::Reverse).unwrap();
    let llr = decode_side_info(&family, &side, &samples.x, &noise).unwrap();

    let mut g = c.benchmark_group("reconciliation");
    g.throughput(Throughput::Elements(n as u64));
    g.bench_function("encode_side_info", |b| {
        b.iter(|| encode_side_info(&family, &code, black_box(&key), black_box(&samples.y)))
    });
    g.bench_function("decode_side_info", |b| {
        b.iter(|| decode_side_info(&family, black_box(&side), black_box(&samples.x), &noise))
    });
    g.sample_size(10);
    g.bench_function("decode_bp_snr_0_7", |b| {
        b.iter_batched_ref(
            || BpDecoder::new(&code),
            |dec| dec.decode(black_box(&llr), &side.syndrome, DEFAULT_MAX_ITER).unwrap(),
            BatchSize::LargeInput,
        )
    });
    g.finish();
}

criterion_group!(benches, rotation, reconciliation);
criterion_main!(benches);
