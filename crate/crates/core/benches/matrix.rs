//! Compares sequential and rayon-parallel matrix execution on a reduced
//! scenario grid over one synthetic neighborhood.

use criterion::{criterion_group, criterion_main, Criterion};

use pathways_core::config::{MatrixAxes, RunConfig};
use pathways_core::domain::{AdoptionSetting, Climate, Development, GridPathwayId, Timeline};
use pathways_core::energy::{ClimateCurve, DemandTable};
use pathways_core::fixtures;
use pathways_core::LoadedData;

fn bench_data() -> LoadedData {
    let catalog = fixtures::default_catalog();
    let targets = fixtures::NeighborhoodTargets {
        name: "brentwood".into(),
        lots: 600,
        total_lot_area_m2: 780_000.0,
        housing_units: 1_100,
        housing_area_m2: 140_000.0,
        origin: (0.0, 0.0),
    };
    let parcels = fixtures::synthesize_neighborhood(&targets, 7).unwrap();
    let timeline = Timeline::standard();
    let curve = ClimateCurve::built_in(&timeline);
    let demand = DemandTable::synthetic(&catalog, &curve, &timeline);
    LoadedData {
        catalog,
        schedule: fixtures::default_schedule(),
        rules: fixtures::default_rules(),
        neighborhoods: vec![("brentwood".into(), parcels)],
        demand,
        climate_curve: curve,
        grid_overrides: Default::default(),
        timeline,
    }
}

fn bench_config() -> RunConfig {
    RunConfig {
        seed: 42,
        matrix: MatrixAxes {
            climates: vec![Climate::Tmy, Climate::A1b],
            grids: vec![GridPathwayId::None, GridPathwayId::Rapid],
            developments: vec![Development::LowDensity, Development::HighDensity],
            adoptions: vec![AdoptionSetting::NoAdoption, AdoptionSetting::Neutral],
        },
        ..Default::default()
    }
}

fn matrix_benches(c: &mut Criterion) {
    let data = bench_data();
    let config = bench_config();

    let mut group = c.benchmark_group("matrix_16_runs");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| pathways_core::run_matrix_sequential(&data, &config))
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel_4_jobs", |b| {
        b.iter(|| pathways_core::runner::run_matrix_parallel(&data, &config, 4))
    });
    group.finish();
}

criterion_group!(benches, matrix_benches);
criterion_main!(benches);
