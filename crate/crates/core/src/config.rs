//! Run configuration: a TOML file naming the input data and parameter
//! blocks, plus the scenario axes to execute.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::adoption::{AdoptionParams, PriceParams};
use crate::domain::{
    AdoptionSetting, Catalog, Climate, Development, GridPathwayId, Parcel, ScenarioSpec, Timeline,
};
use crate::energy::{ClimateCurve, DemandTable, EnergyParams};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::grid::GridPathway;
use crate::io;
use crate::redevelopment::{RedevelopmentSchedule, RuleTable};

/// Paths to input data. Everything is optional: missing entries fall back
/// to the built-in defaults (the shipped catalog, schedule, rules, the
/// synthetic demand table, and the seeded neighborhood fixtures).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DataPaths {
    pub parcels: Vec<PathBuf>,
    pub catalog: Option<PathBuf>,
    pub schedule: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub demand: Option<PathBuf>,
    pub climate_curve: Option<PathBuf>,
    pub grid_curves: Option<PathBuf>,
}

/// Axes of one scenario (the `run` verb).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioAxes {
    pub climate: Climate,
    pub grid: GridPathwayId,
    pub development: Development,
    pub adoption: AdoptionSetting,
}

impl Default for ScenarioAxes {
    fn default() -> Self {
        ScenarioAxes {
            climate: Climate::Tmy,
            grid: GridPathwayId::None,
            development: Development::Reference,
            adoption: AdoptionSetting::NoAdoption,
        }
    }
}

/// Axes of the scenario matrix (the `matrix` verb).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MatrixAxes {
    pub climates: Vec<Climate>,
    pub grids: Vec<GridPathwayId>,
    pub developments: Vec<Development>,
    pub adoptions: Vec<AdoptionSetting>,
}

impl Default for MatrixAxes {
    fn default() -> Self {
        MatrixAxes {
            climates: Climate::ALL.to_vec(),
            grids: GridPathwayId::ALL.to_vec(),
            developments: Development::ALL.to_vec(),
            adoptions: AdoptionSetting::ALL.to_vec(),
        }
    }
}

impl MatrixAxes {
    /// All combinations in canonical order.
    pub fn specs(&self, seed: u64) -> Vec<ScenarioSpec> {
        let mut specs = Vec::new();
        for &climate in &self.climates {
            for &grid in &self.grids {
                for &development in &self.developments {
                    for &adoption in &self.adoptions {
                        specs.push(ScenarioSpec {
                            climate,
                            grid,
                            development,
                            adoption,
                            seed,
                            timeline: Timeline::standard(),
                        });
                    }
                }
            }
        }
        specs
    }
}

/// The whole run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Parallel worker bound for matrix runs; None means all cores.
    pub jobs: Option<usize>,
    /// Write per-parcel decade CSVs for matrix runs (always written for
    /// single runs).
    pub per_parcel_outputs: bool,
    pub data: DataPaths,
    pub scenario: ScenarioAxes,
    pub matrix: MatrixAxes,
    pub energy: EnergyParams,
    pub abm: AdoptionParams,
    pub prices: PriceParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            out_dir: PathBuf::from("out"),
            jobs: None,
            per_parcel_outputs: false,
            data: DataPaths::default(),
            scenario: ScenarioAxes::default(),
            matrix: MatrixAxes::default(),
            energy: EnergyParams::default(),
            abm: AdoptionParams::default(),
            prices: PriceParams::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config { detail: e.to_string() })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
        let mut config = Self::from_toml_str(&text)?;
        // Data paths are relative to the config file.
        if let Some(base) = path.parent() {
            let rebase = |p: &mut PathBuf| {
                if p.is_relative() {
                    *p = base.join(&p);
                }
            };
            for p in config.data.parcels.iter_mut() {
                rebase(p);
            }
            for p in [
                &mut config.data.catalog,
                &mut config.data.schedule,
                &mut config.data.rules,
                &mut config.data.demand,
                &mut config.data.climate_curve,
                &mut config.data.grid_curves,
            ]
            .into_iter()
            .flatten()
            {
                rebase(p);
            }
        }
        Ok(config)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config { detail: e.to_string() })
    }

    /// Stable digest of the semantic config content.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(json.as_bytes());
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// The single-scenario spec from the `[scenario]` block.
    pub fn scenario_spec(&self) -> ScenarioSpec {
        ScenarioSpec {
            climate: self.scenario.climate,
            grid: self.scenario.grid,
            development: self.scenario.development,
            adoption: self.scenario.adoption,
            seed: self.seed,
            timeline: Timeline::standard(),
        }
    }
}

/// Everything a run needs, loaded and validated.
#[derive(Clone, Debug)]
pub struct LoadedData {
    pub catalog: Catalog,
    pub schedule: RedevelopmentSchedule,
    pub rules: RuleTable,
    /// Parcels grouped per neighborhood, neighborhoods sorted by name.
    pub neighborhoods: Vec<(String, Vec<Parcel>)>,
    pub demand: DemandTable,
    pub climate_curve: ClimateCurve,
    /// Intensity-curve overrides keyed by built-in pathway id.
    pub grid_overrides: BTreeMap<GridPathwayId, GridPathway>,
    pub timeline: Timeline,
}

impl LoadedData {
    /// Loads per the config, falling back to built-ins where paths are
    /// absent. Validates everything on the way in.
    pub fn load(config: &RunConfig) -> Result<Self> {
        let timeline = Timeline::standard();
        let catalog = match &config.data.catalog {
            Some(path) => Catalog::new(io::load_catalog(path)?)?,
            None => fixtures::default_catalog(),
        };
        let schedule = match &config.data.schedule {
            Some(path) => io::load_schedule(path)?,
            None => fixtures::default_schedule(),
        };
        let rules = match &config.data.rules {
            Some(path) => io::load_rules(path)?,
            None => fixtures::default_rules(),
        };
        rules.validate(&catalog)?;

        let mut parcels: Vec<Parcel> = Vec::new();
        if config.data.parcels.is_empty() {
            for (_, mut batch) in fixtures::synthesize_all(fixtures::SHIPPED_FIXTURE_SEED)? {
                parcels.append(&mut batch);
            }
        } else {
            for path in &config.data.parcels {
                parcels.extend(io::load_parcels(path)?);
            }
        }
        let mut by_neighborhood: BTreeMap<String, Vec<Parcel>> = BTreeMap::new();
        for p in parcels {
            catalog.require(&p.current_archetype)?;
            by_neighborhood.entry(p.neighborhood.clone()).or_default().push(p);
        }
        schedule.validate(timeline.decades())?;
        for neighborhood in by_neighborhood.keys() {
            // Every neighborhood must have a complete schedule row.
            for &decade in timeline.decades() {
                schedule.fraction(neighborhood, decade)?;
            }
        }

        let climate_curve = match &config.data.climate_curve {
            Some(path) => {
                let curve = io::load_climate_curve(path)?;
                curve.validate()?;
                curve
            }
            None => ClimateCurve::built_in(&timeline),
        };
        let demand = match &config.data.demand {
            Some(path) => io::load_demand_table(path)?,
            None => DemandTable::synthetic(&catalog, &climate_curve, &timeline),
        };
        demand.validate(&catalog, &timeline)?;

        let mut grid_overrides = BTreeMap::new();
        if let Some(path) = &config.data.grid_curves {
            for (id, points) in io::load_grid_curves(path)? {
                if let Some(builtin) = GridPathwayId::parse(&id) {
                    grid_overrides.insert(builtin, GridPathway::custom(id, points)?);
                }
            }
        }

        Ok(LoadedData {
            catalog,
            schedule,
            rules,
            neighborhoods: by_neighborhood.into_iter().collect(),
            demand,
            climate_curve,
            grid_overrides,
            timeline,
        })
    }

    pub fn pathway(&self, id: GridPathwayId) -> GridPathway {
        self.grid_overrides.get(&id).cloned().unwrap_or(GridPathway::BuiltIn(id))
    }

    pub fn total_parcels(&self) -> usize {
        self.neighborhoods.iter().map(|(_, p)| p.len()).sum()
    }
}

/// Parses `climate=A1B,grid=moderate,dev=low,adopt=neutral` overrides.
pub fn parse_scenario_overrides(text: &str, axes: &mut ScenarioAxes) -> Result<()> {
    for part in text.split(',').filter(|p| !p.trim().is_empty()) {
        let (key, value) = part.split_once('=').ok_or_else(|| Error::Config {
            detail: format!("scenario override {part:?} is not key=value"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "climate" => {
                axes.climate = Climate::parse(value).ok_or_else(|| Error::Config {
                    detail: format!("unknown climate {value:?}"),
                })?;
            }
            "grid" => {
                axes.grid = GridPathwayId::parse(value).ok_or_else(|| Error::Config {
                    detail: format!("unknown grid pathway {value:?}"),
                })?;
            }
            "dev" | "development" => {
                axes.development = Development::parse(value).ok_or_else(|| Error::Config {
                    detail: format!("unknown development scenario {value:?}"),
                })?;
            }
            "adopt" | "adoption" => {
                axes.adoption = AdoptionSetting::parse(value).ok_or_else(|| Error::Config {
                    detail: format!("unknown adoption setting {value:?}"),
                })?;
            }
            _ => {
                return Err(Error::Config { detail: format!("unknown scenario axis {key:?}") });
            }
        }
    }
    Ok(())
}
