//! Scenario execution: redevelopment, adoption, demand, and emissions per
//! decade; matrix execution across scenario combinations; output emission.
//!
//! A single run is strictly sequential and deterministic. Matrix cells
//! share no mutable state, so they run data-parallel under the `parallel`
//! feature (a sequential fallback always exists and is what the feature
//! disables down to).

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::adoption::{AdoptionCounts, AdoptionSim, Tech};
use crate::config::{LoadedData, RunConfig};
use crate::domain::{AdoptionSetting, Development, Parcel, ResidenceUnit, ScenarioSpec};
use crate::energy::{
    effective_hvac_multiplier, net_grid_demand, pv_annual_generation, EnergyParams, TechSet,
};
use crate::error::{Error, Result};
use crate::io::{self, fmt_sig, Manifest};
use crate::pathways::{
    aggregate, emissions_tco2e, premium_for_sprawl, PathwayPoint, PathwaySeries, PremiumPoint,
};
use crate::redevelopment::{apply_decade, DecadeOutcome, NeighborhoodState};

/// Label of the all-neighborhood aggregate in outputs.
pub const TOTAL_LABEL: &str = "all";

/// Per-parcel, per-decade accounting row.
#[derive(Clone, Debug)]
pub struct ParcelDecadeRecord {
    pub parcel_id: String,
    pub neighborhood: String,
    pub decade: i32,
    pub archetype_id: String,
    pub buildings: u32,
    pub units: u32,
    pub floor_area_m2: f64,
    pub demand_kwh: f64,
    pub emissions_tco2e: f64,
    pub redeveloped_in: Option<i32>,
}

/// Cumulative adoption counts at a decade boundary.
#[derive(Clone, Copy, Debug)]
pub struct DecadeAdoption {
    pub decade: i32,
    pub counts: AdoptionCounts,
}

/// Everything one scenario run produces.
#[derive(Clone, Debug)]
pub struct ScenarioOutputs {
    pub spec: ScenarioSpec,
    /// One series per neighborhood, sorted by name, plus the aggregate.
    pub neighborhoods: Vec<PathwaySeries>,
    pub total: PathwaySeries,
    /// Populated only when per-parcel outputs are requested; across a full
    /// matrix these rows dominate memory (runs × parcels × decades).
    pub parcel_records: Vec<ParcelDecadeRecord>,
    pub adoption: Vec<DecadeAdoption>,
}

impl ScenarioOutputs {
    pub fn series_for(&self, neighborhood: &str) -> Option<&[PathwayPoint]> {
        if neighborhood == TOTAL_LABEL {
            return Some(&self.total.points);
        }
        self.neighborhoods.iter().find(|s| s.neighborhood == neighborhood).map(|s| &s.points[..])
    }
}

fn unit_net_demand(
    unit: &ResidenceUnit,
    decade: i32,
    spec: &ScenarioSpec,
    data: &LoadedData,
    energy: &EnergyParams,
    sim: Option<&AdoptionSim>,
) -> Result<(f64, f64)> {
    let archetype = data.catalog.require(&unit.archetype_id)?;
    let base = data.demand.lookup(&unit.archetype_id, decade, spec.climate)?;
    let (techs, hvac_year) = match sim {
        Some(sim) => sim.tech_for_unit(&unit.id),
        None => (TechSet::default(), None),
    };
    // The lifetime replacement cycle applies to everyone; adopting
    // high-efficiency HVAC only adds whatever the cycle has not delivered.
    let cycle = effective_hvac_multiplier(unit.vintage, decade, None);
    let gross = base * cycle;
    let hvac_extra = if techs.high_eff_hvac {
        effective_hvac_multiplier(unit.vintage, decade, hvac_year) / cycle
    } else {
        1.0
    };
    let pv_gen = match techs.solar_pv_kw {
        Some(kw) => pv_annual_generation(kw, energy.s_avg_hours, energy.days_constant)?,
        None => 0.0,
    };
    let net = net_grid_demand(gross, &techs, pv_gen, hvac_extra, energy.thermostat_multiplier);
    Ok((net, archetype.unit_floor_area))
}

/// Executes one scenario end to end, including per-parcel records.
pub fn run_scenario(
    data: &LoadedData,
    config: &RunConfig,
    spec: &ScenarioSpec,
) -> Result<ScenarioOutputs> {
    run_scenario_inner(data, config, spec, true)
}

fn run_scenario_inner(
    data: &LoadedData,
    config: &RunConfig,
    spec: &ScenarioSpec,
    keep_parcel_records: bool,
) -> Result<ScenarioOutputs> {
    let label = spec.label();
    let wrap = |decade: i32, e: Error| Error::Scenario {
        scenario: label.clone(),
        decade,
        source: Box::new(e),
    };

    let pathway = data.pathway(spec.grid);
    let decades = data.timeline.decades().to_vec();
    let mut states: Vec<NeighborhoodState> = Vec::with_capacity(data.neighborhoods.len());
    for (name, parcels) in &data.neighborhoods {
        states.push(
            NeighborhoodState::initial(name, parcels.clone(), &data.catalog)
                .map_err(|e| wrap(decades[0], e))?,
        );
    }
    let all_parcels: Vec<Parcel> =
        data.neighborhoods.iter().flat_map(|(_, p)| p.iter().cloned()).collect();

    let mut sim: Option<AdoptionSim> = None;
    let mut neighborhood_series: Vec<PathwaySeries> = states
        .iter()
        .map(|s| PathwaySeries {
            scenario: spec.clone(),
            neighborhood: s.neighborhood.clone(),
            points: Vec::with_capacity(decades.len()),
        })
        .collect();
    let mut total_series = PathwaySeries {
        scenario: spec.clone(),
        neighborhood: TOTAL_LABEL.to_string(),
        points: Vec::with_capacity(decades.len()),
    };
    let mut parcel_records = Vec::new();
    let mut adoption = Vec::with_capacity(decades.len());

    let trace = std::env::var_os("PATHWAYS_TRACE").is_some();
    for (di, &decade) in decades.iter().enumerate() {
        let t0 = Instant::now();
        // Annual ticks covering the years since the previous snapshot.
        if di > 0 {
            if let Some(sim) = sim.as_mut() {
                for year in (decade - 9)..=decade {
                    sim.tick(year);
                }
            }
        }
        let t_tick = t0.elapsed();

        // This decade's redevelopment wave, per neighborhood.
        let mut combined = DecadeOutcome { decade, ..Default::default() };
        for state in states.iter_mut() {
            let (next, outcome) = apply_decade(
                state,
                decade,
                spec.development,
                &data.schedule,
                &data.rules,
                &data.catalog,
                &decades,
            )
            .map_err(|e| wrap(decade, e))?;
            *state = next;
            combined.redeveloped_parcels.extend(outcome.redeveloped_parcels);
            combined.removed_unit_ids.extend(outcome.removed_unit_ids);
            combined.new_units.extend(outcome.new_units);
        }

        // Population: initialized after the first wave, churned after later
        // ones; mandates land on each wave's new construction.
        if spec.adoption.abm_enabled() {
            match sim.as_mut() {
                None => {
                    let units: Vec<ResidenceUnit> =
                        states.iter().flat_map(|s| s.units.iter().cloned()).collect();
                    sim = Some(
                        AdoptionSim::new(
                            &units,
                            &all_parcels,
                            &data.catalog,
                            &config.abm,
                            &config.prices,
                            &config.energy,
                            spec.adoption,
                            spec.seed,
                        )
                        .map_err(|e| wrap(decade, e))?,
                    );
                }
                Some(sim) => sim.sync(&combined, &data.catalog).map_err(|e| wrap(decade, e))?,
            }
            if let Some(sim) = sim.as_mut() {
                sim.apply_mandates(&combined.new_units, decade);
            }
            debug_assert_eq!(
                sim.as_ref().map(|s| s.alive_count()).unwrap_or(0),
                states.iter().map(|s| s.units.len()).sum::<usize>(),
                "one agent per residence unit after churn"
            );
        }

        let t_sync = t0.elapsed() - t_tick;
        // Snapshot: demand and emissions at this decade's installed sets.
        let intensity = pathway.intensity(decade).map_err(|e| wrap(decade, e))?;
        let mut decade_points: Vec<PathwayPoint> = Vec::with_capacity(states.len());
        for state in &states {
            let mut nb_demand = 0.0;
            let mut nb_units = 0u64;
            let mut nb_area = 0.0;
            let mut unit_cursor = 0usize;
            for parcel in &state.parcels {
                let mut p_demand = 0.0;
                let mut p_area = 0.0;
                let mut p_units = 0u32;
                while unit_cursor < state.units.len()
                    && state.units[unit_cursor].parcel_id == parcel.id
                {
                    let unit = &state.units[unit_cursor];
                    let (net, area) =
                        unit_net_demand(unit, decade, spec, data, &config.energy, sim.as_ref())
                            .map_err(|e| wrap(decade, e))?;
                    p_demand += net;
                    p_area += area;
                    p_units += 1;
                    unit_cursor += 1;
                }
                if keep_parcel_records {
                    parcel_records.push(ParcelDecadeRecord {
                        parcel_id: parcel.id.clone(),
                        neighborhood: state.neighborhood.clone(),
                        decade,
                        archetype_id: parcel.current_archetype.clone(),
                        buildings: parcel.buildings,
                        units: p_units,
                        floor_area_m2: p_area,
                        demand_kwh: p_demand,
                        emissions_tco2e: emissions_tco2e(p_demand, intensity),
                        redeveloped_in: parcel.redeveloped_in,
                    });
                }
                nb_demand += p_demand;
                nb_units += u64::from(p_units);
                nb_area += p_area;
            }
            decade_points.push(PathwayPoint::from_totals(
                &state.neighborhood,
                decade,
                nb_demand,
                emissions_tco2e(nb_demand, intensity),
                nb_units,
                nb_area,
            ));
        }
        let total_point =
            aggregate(TOTAL_LABEL, decade, &decade_points.iter().collect::<Vec<_>>());
        for (series, point) in neighborhood_series.iter_mut().zip(decade_points) {
            series.points.push(point);
        }
        total_series.points.push(total_point);
        adoption.push(DecadeAdoption {
            decade,
            counts: sim.as_ref().map(|s| s.counts()).unwrap_or_default(),
        });
        if trace {
            let agents = sim.as_ref().map(|s| s.alive_count()).unwrap_or(0);
            eprintln!(
                "trace {label} {decade}: tick {:.0?} sync {:.0?} snapshot {:.0?} agents {agents}",
                t_tick,
                t_sync,
                t0.elapsed() - t_tick - t_sync,
            );
        }
    }

    Ok(ScenarioOutputs {
        spec: spec.clone(),
        neighborhoods: neighborhood_series,
        total: total_series,
        parcel_records,
        adoption,
    })
}

/// A whole matrix execution: per-cell results plus post-processed premium
/// series for every low/high development pair.
pub struct MatrixOutputs {
    pub runs: Vec<(ScenarioSpec, Result<ScenarioOutputs>)>,
    pub premiums: Vec<PremiumRecord>,
}

#[derive(Clone, Debug)]
pub struct PremiumRecord {
    pub neighborhood: String,
    pub climate: crate::domain::Climate,
    pub grid: crate::domain::GridPathwayId,
    pub adoption: AdoptionSetting,
    pub points: Vec<PremiumPoint>,
}

impl MatrixOutputs {
    pub fn failure_labels(&self) -> Vec<String> {
        self.runs
            .iter()
            .filter_map(|(spec, r)| r.as_ref().err().map(|e| format!("{}: {e}", spec.label())))
            .collect()
    }

    pub fn successful(&self) -> impl Iterator<Item = &ScenarioOutputs> {
        self.runs.iter().filter_map(|(_, r)| r.as_ref().ok())
    }

    pub fn find(
        &self,
        climate: crate::domain::Climate,
        grid: crate::domain::GridPathwayId,
        development: Development,
        adoption: AdoptionSetting,
    ) -> Option<&ScenarioOutputs> {
        self.successful().find(|o| {
            o.spec.climate == climate
                && o.spec.grid == grid
                && o.spec.development == development
                && o.spec.adoption == adoption
        })
    }
}

/// Runs every combination sequentially. Always available; the `parallel`
/// feature adds the rayon path on top of it.
pub fn run_matrix_sequential(data: &LoadedData, config: &RunConfig) -> MatrixOutputs {
    let specs = config.matrix.specs(config.seed);
    let runs: Vec<(ScenarioSpec, Result<ScenarioOutputs>)> = specs
        .into_iter()
        .map(|spec| {
            let result = run_scenario_inner(data, config, &spec, config.per_parcel_outputs);
            (spec, result)
        })
        .collect();
    finish_matrix(runs)
}

/// Runs every combination on a rayon pool bounded by `jobs`.
#[cfg(feature = "parallel")]
pub fn run_matrix_parallel(data: &LoadedData, config: &RunConfig, jobs: usize) -> MatrixOutputs {
    use rayon::prelude::*;
    let specs = config.matrix.specs(config.seed);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("rayon pool");
    let runs: Vec<(ScenarioSpec, Result<ScenarioOutputs>)> = pool.install(|| {
        specs
            .into_par_iter()
            .map(|spec| {
                let result = run_scenario_inner(data, config, &spec, config.per_parcel_outputs);
                (spec, result)
            })
            .collect()
    });
    finish_matrix(runs)
}

/// Matrix entry point honoring the configured job bound.
pub fn run_matrix(data: &LoadedData, config: &RunConfig) -> MatrixOutputs {
    #[cfg(feature = "parallel")]
    {
        let jobs = config.jobs.unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        });
        if jobs > 1 {
            return run_matrix_parallel(data, config, jobs);
        }
    }
    run_matrix_sequential(data, config)
}

fn finish_matrix(runs: Vec<(ScenarioSpec, Result<ScenarioOutputs>)>) -> MatrixOutputs {
    let mut matrix = MatrixOutputs { runs, premiums: Vec::new() };
    matrix.premiums = compute_premiums(&matrix);
    matrix
}

/// Premium-for-sprawl series for every (neighborhood, climate, grid,
/// adoption) cell where both development runs completed.
fn compute_premiums(matrix: &MatrixOutputs) -> Vec<PremiumRecord> {
    let mut premiums = Vec::new();
    let lows: Vec<&ScenarioOutputs> =
        matrix.successful().filter(|o| o.spec.development == Development::LowDensity).collect();
    for low in lows {
        let Some(high) = matrix.find(
            low.spec.climate,
            low.spec.grid,
            Development::HighDensity,
            low.spec.adoption,
        ) else {
            continue;
        };
        let mut labels: Vec<&str> =
            low.neighborhoods.iter().map(|s| s.neighborhood.as_str()).collect();
        labels.push(TOTAL_LABEL);
        for label in labels {
            let (Some(l), Some(h)) = (low.series_for(label), high.series_for(label)) else {
                continue;
            };
            if let Ok(points) = premium_for_sprawl(l, h) {
                premiums.push(PremiumRecord {
                    neighborhood: label.to_string(),
                    climate: low.spec.climate,
                    grid: low.spec.grid,
                    adoption: low.spec.adoption,
                    points,
                });
            }
        }
    }
    premiums
}

const PATHWAYS_HEADER: &str = "neighborhood,climate,grid,development,adoption,decade,total_kwh,total_tco2e,units,floor_area_m2,tco2e_per_unit,tco2e_per_m2\n";

fn pathway_rows(out: &mut String, run: &ScenarioOutputs) {
    let spec = &run.spec;
    for series in run.neighborhoods.iter().chain(std::iter::once(&run.total)) {
        for p in &series.points {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                series.neighborhood,
                spec.climate,
                spec.grid,
                spec.development,
                spec.adoption,
                p.decade,
                fmt_sig(p.total_demand_kwh),
                fmt_sig(p.total_emissions_tco2e),
                p.units,
                fmt_sig(p.floor_area_m2),
                fmt_sig(p.per_unit_tco2e),
                fmt_sig(p.per_m2_tco2e),
            ));
        }
    }
}

const ADOPTION_HEADER: &str = "climate,grid,development,adoption,decade,technology,chosen_cumulative,mandated_cumulative,total_cumulative\n";

fn adoption_rows(out: &mut String, run: &ScenarioOutputs) {
    let spec = &run.spec;
    for da in &run.adoption {
        for tech in Tech::ALL {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                spec.climate,
                spec.grid,
                spec.development,
                spec.adoption,
                da.decade,
                tech,
                da.counts.chosen[tech.index()],
                da.counts.mandated[tech.index()],
                da.counts.total(tech),
            ));
        }
    }
}

const PARCEL_HEADER: &str = "parcel_id,neighborhood,decade,archetype_id,buildings,units,floor_area_m2,demand_kwh,emissions_tco2e,redeveloped_in\n";

fn parcel_rows(out: &mut String, run: &ScenarioOutputs) {
    for r in &run.parcel_records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.parcel_id,
            r.neighborhood,
            r.decade,
            r.archetype_id,
            r.buildings,
            r.units,
            fmt_sig(r.floor_area_m2),
            fmt_sig(r.demand_kwh),
            fmt_sig(r.emissions_tco2e),
            r.redeveloped_in.map(|d| d.to_string()).unwrap_or_default(),
        ));
    }
}

const PREMIUM_HEADER: &str = "neighborhood,climate,grid,adoption,decade,premium_tco2e,units_low,units_high,total_low_tco2e,total_high_tco2e\n";

fn premium_rows(out: &mut String, premiums: &[PremiumRecord]) {
    for record in premiums {
        for p in &record.points {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                record.neighborhood,
                record.climate,
                record.grid,
                record.adoption,
                p.decade,
                fmt_sig(p.premium_tco2e),
                p.units_low,
                p.units_high,
                fmt_sig(p.total_low_tco2e),
                fmt_sig(p.total_high_tco2e),
            ));
        }
    }
}

/// Writes a single run's output set: pathway CSV, per-parcel CSV,
/// adoption-count CSV, and the manifest.
pub fn write_run_outputs(
    run: &ScenarioOutputs,
    config: &RunConfig,
    dir: &Path,
    started: Instant,
) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();

    let mut pathways = String::from(PATHWAYS_HEADER);
    pathway_rows(&mut pathways, run);
    let path = dir.join("pathways.csv");
    io::write_file(&path, &pathways)?;
    files.push(path);

    let mut parcels = String::from(PARCEL_HEADER);
    parcel_rows(&mut parcels, run);
    let path = dir.join("parcels.csv");
    io::write_file(&path, &parcels)?;
    files.push(path);

    let mut counts = String::from(ADOPTION_HEADER);
    adoption_rows(&mut counts, run);
    let path = dir.join("adoption_counts.csv");
    io::write_file(&path, &counts)?;
    files.push(path);

    let manifest = Manifest {
        config_digest: config.digest(),
        seed: config.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        runs: 1,
        files: files.iter().map(|f| f.file_name().unwrap().to_string_lossy().into_owned()).collect(),
        failures: Vec::new(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    let path = dir.join("manifest.json");
    io::write_manifest(&path, &manifest)?;
    files.push(path);
    Ok(files)
}

/// Writes a matrix's combined output set. The premium CSV only exists
/// when at least one low/high development pair ran; per-parcel CSVs are
/// opt-in for matrix runs.
pub fn write_matrix_outputs(
    matrix: &MatrixOutputs,
    config: &RunConfig,
    dir: &Path,
    started: Instant,
) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();

    let mut pathways = String::from(PATHWAYS_HEADER);
    let mut counts = String::from(ADOPTION_HEADER);
    for run in matrix.successful() {
        pathway_rows(&mut pathways, run);
        adoption_rows(&mut counts, run);
    }
    let path = dir.join("pathways.csv");
    io::write_file(&path, &pathways)?;
    files.push(path);
    let path = dir.join("adoption_counts.csv");
    io::write_file(&path, &counts)?;
    files.push(path);

    if !matrix.premiums.is_empty() {
        let mut premium = String::from(PREMIUM_HEADER);
        premium_rows(&mut premium, &matrix.premiums);
        let path = dir.join("premium.csv");
        io::write_file(&path, &premium)?;
        files.push(path);
    }

    if config.per_parcel_outputs {
        for run in matrix.successful() {
            let mut parcels = String::from(PARCEL_HEADER);
            parcel_rows(&mut parcels, run);
            let path = dir.join("runs").join(run.spec.label()).join("parcels.csv");
            io::write_file(&path, &parcels)?;
            files.push(path);
        }
    }

    let manifest = Manifest {
        config_digest: config.digest(),
        seed: config.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        runs: matrix.runs.len(),
        files: files
            .iter()
            .map(|f| f.strip_prefix(dir).unwrap_or(f).to_string_lossy().into_owned())
            .collect(),
        failures: matrix.failure_labels(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    let path = dir.join("manifest.json");
    io::write_manifest(&path, &manifest)?;
    files.push(path);
    Ok(files)
}
