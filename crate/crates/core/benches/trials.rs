use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use uav_scope::scope::run_scope;
use uav_scope::{par, ChannelParams, DeploymentConstraints, Scenario, ScenarioConfig};

fn snapshots(n_users: usize, count: u64) -> Vec<Scenario> {
    (0..count)
        .map(|seed| {
            let cfg = ScenarioConfig {
                n_users,
                seed,
                ..ScenarioConfig::default()
            };
            Scenario::generate(&cfg).expect("scenario")
        })
        .collect()
}

fn trials(c: &mut Criterion) {
    let constraints = DeploymentConstraints::default();
    let params = ChannelParams::default();
    let mut group = c.benchmark_group("scope_trials");
    group.sample_size(10);
    for n in [200usize, 600] {
        let batch = snapshots(n, 16);
        let solve = |s: &Scenario| run_scope(&s.users, &constraints, &params).map(|d| d.uavs.len());
        group.bench_with_input(BenchmarkId::new("sequential", n), &batch, |b, batch| {
            b.iter(|| par::map_seq(batch, solve))
        });
        group.bench_with_input(BenchmarkId::new("parallel", n), &batch, |b, batch| {
            b.iter(|| par::map(batch, solve))
        });
    }
    group.finish();
}

criterion_group!(benches, trials);
criterion_main!(benches);
