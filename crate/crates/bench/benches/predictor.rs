use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use motion_code::predictor::{train, Modality, TrainConfig};
use motion_code_bench::{rgb_examples, synthetic_records, visual_model};

fn bench_predictor(c: &mut Criterion) {
    let records = synthetic_records(256, 1);
    let model = visual_model(&records, 2);
    let examples = rgb_examples(&records);

    c.bench_function("forward", |b| {
        b.iter(|| model.forward(black_box(&examples[0].features), Modality::Rgb).unwrap())
    });
    c.bench_function("gradient_batch_32", |b| {
        b.iter(|| model.gradient(black_box(&examples[..32]), Modality::Rgb).unwrap())
    });
    c.bench_function("predict", |b| {
        b.iter(|| model.predict(black_box(&records[0]), None).unwrap())
    });

    let config = TrainConfig {
        epochs: 1,
        ..TrainConfig::default()
    };
    let mut group = c.benchmark_group("train");
    group.sample_size(10);
    group.bench_function("one_epoch_256", |b| {
        b.iter_batched(
            || model.clone(),
            |m| train(m, &records, None, &config).unwrap(),
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

criterion_group!(benches, bench_predictor);
criterion_main!(benches);
