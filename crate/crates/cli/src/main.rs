//! Command-line front end: validate inputs, run one scenario, sweep the
//! scenario matrix, post-process premiums, and regenerate bundled data.
//!
//! Exit codes: 0 success, 2 validation failure, 3 runtime failure.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use pathways_core::config::{parse_scenario_overrides, LoadedData, RunConfig};
use pathways_core::domain::validate_catalog;
use pathways_core::io;
use pathways_core::pathways::{premium_for_sprawl, PathwayPoint};
use pathways_core::runner::{
    run_matrix, run_scenario, write_matrix_outputs, write_run_outputs,
};
use pathways_core::{fixtures, Development};

#[derive(Parser)]
#[command(
    name = "pathways",
    version,
    about = "Decade-resolution neighborhood emission pathway simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the config and every referenced data file.
    Validate {
        #[command(flatten)]
        common: ConfigArgs,
    },
    /// Run a single scenario and write its output set.
    Run {
        #[command(flatten)]
        common: ConfigArgs,
        /// Axis overrides, e.g. climate=a1b,grid=moderate,dev=low,adopt=neutral
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Run the full scenario matrix and write combined outputs.
    Matrix {
        #[command(flatten)]
        common: ConfigArgs,
        /// Parallel worker bound.
        #[arg(long)]
        jobs: Option<usize>,
        /// Also write per-parcel CSVs for every matrix cell.
        #[arg(long)]
        per_parcel: bool,
    },
    /// Compute premium-for-sprawl series from an existing pathway CSV.
    Premium {
        /// A pathways.csv produced by `run` or `matrix`.
        #[arg(long)]
        input: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Regenerate the bundled synthetic data files.
    Fixtures {
        /// Directory to write the data files into.
        #[arg(long, default_value = "data")]
        out: PathBuf,
        /// Seed for the synthetic draws.
        #[arg(long, default_value_t = fixtures::SHIPPED_FIXTURE_SEED)]
        seed: u64,
    },
}

fn load_config(common: &ConfigArgs) -> Result<RunConfig> {
    let mut config = match &common.config {
        Some(path) => RunConfig::from_path(path)
            .with_context(|| format!("reading config {}", path.display()))?,
        None => RunConfig::default(),
    };
    if let Some(out) = &common.out {
        config.out_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn cmd_validate(common: &ConfigArgs) -> Result<()> {
    let config = load_config(common)?;
    let data = LoadedData::load(&config)?;
    let report = validate_catalog(data.catalog.archetypes());
    for violation in &report {
        eprintln!("catalog: {violation}");
    }
    if !report.is_empty() {
        anyhow::bail!("{} catalog violations", report.len());
    }
    println!("config digest  {}", config.digest());
    println!("archetypes     {}", data.catalog.archetypes().len());
    println!("neighborhoods  {}", data.neighborhoods.len());
    for (name, parcels) in &data.neighborhoods {
        let units: u32 = parcels
            .iter()
            .map(|p| {
                data.catalog
                    .get(&p.current_archetype)
                    .map(|a| a.units_per_building * p.buildings)
                    .unwrap_or(0)
            })
            .sum();
        println!("  {name}: {} parcels, {units} units", parcels.len());
    }
    println!("ok");
    Ok(())
}

fn cmd_run(common: &ConfigArgs, scenario: Option<&str>) -> Result<()> {
    let started = Instant::now();
    let mut config = load_config(common)?;
    if let Some(overrides) = scenario {
        parse_scenario_overrides(overrides, &mut config.scenario)?;
    }
    let data = LoadedData::load(&config)?;
    let spec = config.scenario_spec();
    let run = run_scenario(&data, &config, &spec).map_err(RuntimeFailure::from)?;
    let dir = config.out_dir.join(spec.label());
    let files = write_run_outputs(&run, &config, &dir, started).map_err(RuntimeFailure::from)?;
    println!("scenario {}", spec.label());
    println!("decades  {}", run.total.points.len());
    println!("files    {}", files.len());
    for f in files {
        println!("  {}", f.display());
    }
    Ok(())
}

fn cmd_matrix(common: &ConfigArgs, jobs: Option<usize>, per_parcel: bool) -> Result<()> {
    let started = Instant::now();
    let mut config = load_config(common)?;
    if let Some(jobs) = jobs {
        config.jobs = Some(jobs);
    }
    if per_parcel {
        config.per_parcel_outputs = true;
    }
    let data = LoadedData::load(&config)?;
    let matrix = run_matrix(&data, &config);
    let failures = matrix.failure_labels();
    let files = write_matrix_outputs(&matrix, &config, &config.out_dir, started)
        .map_err(RuntimeFailure::from)?;
    println!("runs     {} ({} failed)", matrix.runs.len(), failures.len());
    println!("elapsed  {:.1}s", started.elapsed().as_secs_f64());
    for f in &files {
        println!("  {}", f.display());
    }
    for failure in &failures {
        eprintln!("failed: {failure}");
    }
    if !failures.is_empty() {
        return Err(RuntimeFailure::msg(format!("{} scenario runs failed", failures.len())));
    }
    Ok(())
}

fn cmd_premium(input: &Path, out: &Path) -> Result<()> {
    let rows = io::load_pathway_rows(input)?;
    // Group by everything except development; pair low against high.
    type Key = (String, String, String, String);
    let mut groups: BTreeMap<Key, (Vec<PathwayPoint>, Vec<PathwayPoint>)> = BTreeMap::new();
    for row in rows {
        let key = (
            row.neighborhood.clone(),
            row.climate.to_string(),
            row.grid.to_string(),
            row.adoption.to_string(),
        );
        let point = PathwayPoint::from_totals(
            &row.neighborhood,
            row.decade,
            row.total_kwh,
            row.total_tco2e,
            row.units,
            row.floor_area_m2,
        );
        let entry = groups.entry(key).or_default();
        match row.development {
            Development::LowDensity => entry.0.push(point),
            Development::HighDensity => entry.1.push(point),
            Development::Reference => {}
        }
    }

    let mut output = String::from(
        "neighborhood,climate,grid,adoption,decade,premium_tco2e,units_low,units_high,total_low_tco2e,total_high_tco2e\n",
    );
    let mut pairs = 0;
    for ((neighborhood, climate, grid, adoption), (mut low, mut high)) in groups {
        if low.is_empty() || high.is_empty() {
            continue;
        }
        low.sort_by_key(|p| p.decade);
        high.sort_by_key(|p| p.decade);
        let series = premium_for_sprawl(&low, &high).map_err(RuntimeFailure::from)?;
        pairs += 1;
        for p in series {
            output.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                neighborhood,
                climate,
                grid,
                adoption,
                p.decade,
                io::fmt_sig(p.premium_tco2e),
                p.units_low,
                p.units_high,
                io::fmt_sig(p.total_low_tco2e),
                io::fmt_sig(p.total_high_tco2e),
            ));
        }
    }
    if pairs == 0 {
        anyhow::bail!(
            "{}: no (low_density, high_density) scenario pairs to compare",
            input.display()
        );
    }
    io::write_file(out, &output).map_err(RuntimeFailure::from)?;
    println!("premium series for {pairs} scenario groups -> {}", out.display());
    Ok(())
}

fn cmd_fixtures(out: &Path, seed: u64) -> Result<()> {
    let catalog = fixtures::default_catalog();
    io::write_catalog(&out.join("archetypes.csv"), catalog.archetypes())?;
    let decades: Vec<i32> = (0..9).map(|i| 2020 + 10 * i).collect();
    io::write_schedule(&out.join("schedule.csv"), &fixtures::default_schedule(), &decades)?;
    io::write_rules(&out.join("assignment_rules.csv"), &fixtures::default_rules())?;
    for (targets, parcels) in fixtures::synthesize_all(seed)? {
        fixtures::validate_fixture_counts(&parcels, &catalog, &targets)?;
        let path = out.join(format!("parcels_{}.csv", targets.name));
        io::write_parcels(&path, &parcels)?;
        println!("{}: {} parcels", path.display(), parcels.len());
    }
    println!("wrote data files to {}", out.display());
    Ok(())
}

/// Marker distinguishing runtime failures (exit 3) from validation
/// failures (exit 2).
#[derive(Debug)]
struct RuntimeFailure(anyhow::Error);

impl RuntimeFailure {
    fn from(e: pathways_core::Error) -> anyhow::Error {
        anyhow::Error::new(RuntimeFailure(anyhow::Error::new(e)))
    }

    fn msg(m: String) -> anyhow::Error {
        anyhow::Error::new(RuntimeFailure(anyhow::anyhow!(m)))
    }
}

impl std::fmt::Display for RuntimeFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for RuntimeFailure {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { common } => cmd_validate(common),
        Command::Run { common, scenario } => cmd_run(common, scenario.as_deref()),
        Command::Matrix { common, jobs, per_parcel } => cmd_matrix(common, *jobs, *per_parcel),
        Command::Premium { input, out } => cmd_premium(input, out),
        Command::Fixtures { out, seed } => cmd_fixtures(out, *seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.is::<RuntimeFailure>()) {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
