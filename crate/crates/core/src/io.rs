//! CSV ingestion and output emission.
//!
//! Input schemas (bit-exact headers):
//! - parcels: `parcel_id,neighborhood,land_use_class,location_class,lot_area_m2,ilr,year_built,archetype_id,x_m,y_m`
//! - catalog: `archetype_id,dwelling_class,units_per_building,unit_floor_area_m2,stories,footprint_m2,base_intensity_kwh_m2_yr`
//! - schedule: `neighborhood,decade,fraction`
//! - rules: `scenario,land_use_class,location_class,lot_area_min_m2,lot_area_max_m2,target_archetype_id,subdivision_count`
//! - demand table: `archetype_id,decade,climate,kwh_per_unit_yr`
//! - climate curve: `climate,decade,multiplier`
//! - grid curves: `pathway_id,year,g_per_kwh`
//!
//! All numeric output is emitted at 6 significant digits with stable row
//! ordering.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::{Archetype, Climate, Development, DwellingClass, LandUseClass, LocationClass, Parcel};
use crate::energy::{ClimateCurve, DemandTable};
use crate::error::{Error, Result};
use crate::redevelopment::{AssignmentRule, RedevelopmentSchedule, RuleTable};

fn path_str(path: &Path) -> String {
    path.display().to_string()
}

struct CsvTable {
    path: String,
    headers: Vec<String>,
    records: Vec<csv::StringRecord>,
}

impl CsvTable {
    fn read(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Csv { path: path_str(path), detail: e.to_string() })?;
        let headers = reader
            .headers()
            .map_err(|e| Error::Csv { path: path_str(path), detail: e.to_string() })?
            .iter()
            .map(str::to_string)
            .collect();
        let mut records = Vec::new();
        for record in reader.records() {
            records
                .push(record.map_err(|e| Error::Csv { path: path_str(path), detail: e.to_string() })?);
        }
        Ok(CsvTable { path: path_str(path), headers, records })
    }

    fn column(&self, name: &str) -> Result<usize> {
        self.headers.iter().position(|h| h == name).ok_or_else(|| Error::MissingColumn {
            path: self.path.clone(),
            column: name.to_string(),
        })
    }

    fn field<'a>(&self, record: &'a csv::StringRecord, col: usize, row: usize) -> Result<&'a str> {
        record.get(col).ok_or_else(|| Error::CsvRow {
            path: self.path.clone(),
            row,
            detail: format!("missing field {}", self.headers[col]),
        })
    }

    fn row_error(&self, row: usize, detail: String) -> Error {
        Error::CsvRow { path: self.path.clone(), row, detail }
    }
}

fn parse_f64(table: &CsvTable, s: &str, name: &str, row: usize) -> Result<f64> {
    if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") || s.is_empty() {
        return Ok(f64::INFINITY);
    }
    s.parse::<f64>()
        .map_err(|_| table.row_error(row, format!("{name} value {s:?} is not numeric")))
}

fn parse_i64(table: &CsvTable, s: &str, name: &str, row: usize) -> Result<i64> {
    s.parse::<i64>()
        .map_err(|_| table.row_error(row, format!("{name} value {s:?} is not an integer")))
}

/// Loads and validates parcels; parse errors carry the data row number.
pub fn load_parcels(path: &Path) -> Result<Vec<Parcel>> {
    let table = CsvTable::read(path)?;
    let c_id = table.column("parcel_id")?;
    let c_nb = table.column("neighborhood")?;
    let c_lu = table.column("land_use_class")?;
    let c_loc = table.column("location_class")?;
    let c_area = table.column("lot_area_m2")?;
    let c_ilr = table.column("ilr")?;
    let c_year = table.column("year_built")?;
    let c_arch = table.column("archetype_id")?;
    let c_x = table.column("x_m")?;
    let c_y = table.column("y_m")?;

    let mut parcels = Vec::with_capacity(table.records.len());
    for (i, record) in table.records.iter().enumerate() {
        let row = i + 2; // header is row 1
        let land_use_raw = table.field(record, c_lu, row)?;
        let land_use = LandUseClass::parse(land_use_raw)
            .ok_or_else(|| table.row_error(row, format!("unknown land_use_class {land_use_raw:?}")))?;
        let location_raw = table.field(record, c_loc, row)?;
        let location = LocationClass::parse(location_raw)
            .ok_or_else(|| table.row_error(row, format!("unknown location_class {location_raw:?}")))?;
        let ilr = parse_f64(&table, table.field(record, c_ilr, row)?, "ilr", row)?;
        if !ilr.is_finite() || ilr < 0.0 {
            return Err(table.row_error(row, format!("ilr must be a finite non-negative number, got {ilr}")));
        }
        let lot_area = parse_f64(&table, table.field(record, c_area, row)?, "lot_area_m2", row)?;
        if !lot_area.is_finite() || lot_area <= 0.0 {
            return Err(table.row_error(row, format!("lot_area_m2 must be positive, got {lot_area}")));
        }
        parcels.push(Parcel {
            id: table.field(record, c_id, row)?.to_string(),
            neighborhood: table.field(record, c_nb, row)?.to_string(),
            land_use_class: land_use,
            location_class: location,
            lot_area,
            ilr,
            year_built: parse_i64(&table, table.field(record, c_year, row)?, "year_built", row)?
                as i32,
            current_archetype: table.field(record, c_arch, row)?.to_string(),
            buildings: 1,
            redeveloped_in: None,
            x: parse_f64(&table, table.field(record, c_x, row)?, "x_m", row)?,
            y: parse_f64(&table, table.field(record, c_y, row)?, "y_m", row)?,
        });
    }
    Ok(parcels)
}

pub fn write_parcels(path: &Path, parcels: &[Parcel]) -> Result<()> {
    let mut out = String::new();
    out.push_str(
        "parcel_id,neighborhood,land_use_class,location_class,lot_area_m2,ilr,year_built,archetype_id,x_m,y_m\n",
    );
    for p in parcels {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            p.id,
            p.neighborhood,
            p.land_use_class,
            p.location_class,
            p.lot_area,
            p.ilr,
            p.year_built,
            p.current_archetype,
            p.x,
            p.y
        ));
    }
    write_file(path, &out)
}

pub fn load_catalog(path: &Path) -> Result<Vec<Archetype>> {
    let table = CsvTable::read(path)?;
    let c_id = table.column("archetype_id")?;
    let c_class = table.column("dwelling_class")?;
    let c_units = table.column("units_per_building")?;
    let c_area = table.column("unit_floor_area_m2")?;
    let c_stories = table.column("stories")?;
    let c_foot = table.column("footprint_m2")?;
    let c_int = table.column("base_intensity_kwh_m2_yr")?;

    let mut archetypes = Vec::with_capacity(table.records.len());
    for (i, record) in table.records.iter().enumerate() {
        let row = i + 2;
        let class_raw = table.field(record, c_class, row)?;
        let dwelling_class = DwellingClass::parse(class_raw)
            .ok_or_else(|| table.row_error(row, format!("unknown dwelling_class {class_raw:?}")))?;
        archetypes.push(Archetype {
            id: table.field(record, c_id, row)?.to_string(),
            dwelling_class,
            units_per_building: parse_i64(
                &table,
                table.field(record, c_units, row)?,
                "units_per_building",
                row,
            )? as u32,
            unit_floor_area: parse_f64(
                &table,
                table.field(record, c_area, row)?,
                "unit_floor_area_m2",
                row,
            )?,
            stories: parse_i64(&table, table.field(record, c_stories, row)?, "stories", row)?
                as u32,
            footprint: parse_f64(&table, table.field(record, c_foot, row)?, "footprint_m2", row)?,
            base_intensity: parse_f64(
                &table,
                table.field(record, c_int, row)?,
                "base_intensity_kwh_m2_yr",
                row,
            )?,
        });
    }
    Ok(archetypes)
}

pub fn write_catalog(path: &Path, archetypes: &[Archetype]) -> Result<()> {
    let mut out = String::new();
    out.push_str(
        "archetype_id,dwelling_class,units_per_building,unit_floor_area_m2,stories,footprint_m2,base_intensity_kwh_m2_yr\n",
    );
    for a in archetypes {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            a.id,
            a.dwelling_class,
            a.units_per_building,
            a.unit_floor_area,
            a.stories,
            a.footprint,
            a.base_intensity
        ));
    }
    write_file(path, &out)
}

pub fn load_schedule(path: &Path) -> Result<RedevelopmentSchedule> {
    let table = CsvTable::read(path)?;
    let c_nb = table.column("neighborhood")?;
    let c_decade = table.column("decade")?;
    let c_frac = table.column("fraction")?;
    let mut schedule = RedevelopmentSchedule::default();
    for (i, record) in table.records.iter().enumerate() {
        let row = i + 2;
        let neighborhood = table.field(record, c_nb, row)?;
        let decade = parse_i64(&table, table.field(record, c_decade, row)?, "decade", row)? as i32;
        let fraction = parse_f64(&table, table.field(record, c_frac, row)?, "fraction", row)?;
        schedule.insert(neighborhood, decade, fraction);
    }
    Ok(schedule)
}

pub fn write_schedule(path: &Path, schedule: &RedevelopmentSchedule, decades: &[i32]) -> Result<()> {
    let mut out = String::from("neighborhood,decade,fraction\n");
    for neighborhood in schedule.neighborhoods() {
        for &decade in decades {
            let f = schedule.fraction(neighborhood, decade)?;
            out.push_str(&format!("{neighborhood},{decade},{f}\n"));
        }
    }
    write_file(path, &out)
}

pub fn load_rules(path: &Path) -> Result<RuleTable> {
    let table = CsvTable::read(path)?;
    let c_dev = table.column("scenario")?;
    let c_lu = table.column("land_use_class")?;
    let c_loc = table.column("location_class")?;
    let c_min = table.column("lot_area_min_m2")?;
    let c_max = table.column("lot_area_max_m2")?;
    let c_target = table.column("target_archetype_id")?;
    let c_sub = table.column("subdivision_count")?;

    let mut rules = Vec::with_capacity(table.records.len());
    for (i, record) in table.records.iter().enumerate() {
        let row = i + 2;
        let dev_raw = table.field(record, c_dev, row)?;
        let development = Development::parse(dev_raw)
            .ok_or_else(|| table.row_error(row, format!("unknown scenario {dev_raw:?}")))?;
        let lu_raw = table.field(record, c_lu, row)?;
        let land_use_class = LandUseClass::parse(lu_raw)
            .ok_or_else(|| table.row_error(row, format!("unknown land_use_class {lu_raw:?}")))?;
        let loc_raw = table.field(record, c_loc, row)?;
        let location_class = LocationClass::parse(loc_raw)
            .ok_or_else(|| table.row_error(row, format!("unknown location_class {loc_raw:?}")))?;
        rules.push(AssignmentRule {
            development,
            land_use_class,
            location_class,
            lot_area_min: parse_f64(&table, table.field(record, c_min, row)?, "lot_area_min_m2", row)?,
            lot_area_max: parse_f64(&table, table.field(record, c_max, row)?, "lot_area_max_m2", row)?,
            target_archetype_id: table.field(record, c_target, row)?.to_string(),
            subdivision: parse_i64(&table, table.field(record, c_sub, row)?, "subdivision_count", row)?
                as u32,
        });
    }
    Ok(RuleTable::new(rules))
}

pub fn write_rules(path: &Path, rules: &RuleTable) -> Result<()> {
    let mut out = String::from(
        "scenario,land_use_class,location_class,lot_area_min_m2,lot_area_max_m2,target_archetype_id,subdivision_count\n",
    );
    for r in rules.rules() {
        let max = if r.lot_area_max.is_finite() { r.lot_area_max.to_string() } else { "inf".into() };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.development,
            r.land_use_class,
            r.location_class,
            r.lot_area_min,
            max,
            r.target_archetype_id,
            r.subdivision
        ));
    }
    write_file(path, &out)
}

pub fn load_demand_table(path: &Path) -> Result<DemandTable> {
    let table = CsvTable::read(path)?;
    let c_arch = table.column("archetype_id")?;
    let c_decade = table.column("decade")?;
    let c_climate = table.column("climate")?;
    let c_kwh = table.column("kwh_per_unit_yr")?;
    let mut cells = BTreeMap::new();
    for (i, record) in table.records.iter().enumerate() {
        let row = i + 2;
        let climate_raw = table.field(record, c_climate, row)?;
        let climate = Climate::parse(climate_raw)
            .ok_or_else(|| table.row_error(row, format!("unknown climate {climate_raw:?}")))?;
        let decade = parse_i64(&table, table.field(record, c_decade, row)?, "decade", row)? as i32;
        let kwh = parse_f64(&table, table.field(record, c_kwh, row)?, "kwh_per_unit_yr", row)?;
        cells.insert((table.field(record, c_arch, row)?.to_string(), decade, climate), kwh);
    }
    Ok(DemandTable::from_cells(cells))
}

pub fn load_climate_curve(path: &Path) -> Result<ClimateCurve> {
    let table = CsvTable::read(path)?;
    let c_climate = table.column("climate")?;
    let c_decade = table.column("decade")?;
    let c_mult = table.column("multiplier")?;
    let mut values = BTreeMap::new();
    for (i, record) in table.records.iter().enumerate() {
        let row = i + 2;
        let climate_raw = table.field(record, c_climate, row)?;
        let climate = Climate::parse(climate_raw)
            .ok_or_else(|| table.row_error(row, format!("unknown climate {climate_raw:?}")))?;
        let decade = parse_i64(&table, table.field(record, c_decade, row)?, "decade", row)? as i32;
        let mult = parse_f64(&table, table.field(record, c_mult, row)?, "multiplier", row)?;
        values.insert((climate, decade), mult);
    }
    Ok(ClimateCurve::from_values(values))
}

/// Custom grid intensity curves: `pathway_id -> (year, gCO2eq/kWh)` points.
pub fn load_grid_curves(path: &Path) -> Result<BTreeMap<String, Vec<(i32, f64)>>> {
    let table = CsvTable::read(path)?;
    let c_id = table.column("pathway_id")?;
    let c_year = table.column("year")?;
    let c_g = table.column("g_per_kwh")?;
    let mut curves: BTreeMap<String, Vec<(i32, f64)>> = BTreeMap::new();
    for (i, record) in table.records.iter().enumerate() {
        let row = i + 2;
        let id = table.field(record, c_id, row)?.to_string();
        let year = parse_i64(&table, table.field(record, c_year, row)?, "year", row)? as i32;
        let g = parse_f64(&table, table.field(record, c_g, row)?, "g_per_kwh", row)?;
        curves.entry(id).or_default().push((year, g));
    }
    Ok(curves)
}

pub fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| Error::Io { path: path_str(parent), source: e })?;
    }
    let mut file = std::fs::File::create(path)
        .map_err(|e| Error::Io { path: path_str(path), source: e })?;
    file.write_all(content.as_bytes())
        .map_err(|e| Error::Io { path: path_str(path), source: e })
}

/// Formats a value at 6 significant digits, plain decimal where readable.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-5..15).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let scale = 10f64.powi(magnitude - 5);
    let rounded = (x / scale).round() * scale;
    let decimals = (5 - magnitude).max(0) as usize;
    let formatted = format!("{rounded:.decimals$}");
    if formatted.contains('.') {
        let trimmed = formatted.trim_end_matches('0').trim_end_matches('.');
        trimmed.to_string()
    } else {
        formatted
    }
}

/// One parsed row of a long-format pathway CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct PathwayRow {
    pub neighborhood: String,
    pub climate: Climate,
    pub grid: crate::domain::GridPathwayId,
    pub development: Development,
    pub adoption: crate::domain::AdoptionSetting,
    pub decade: i32,
    pub total_kwh: f64,
    pub total_tco2e: f64,
    pub units: u64,
    pub floor_area_m2: f64,
}

/// Reads back a long-format pathway CSV (for post-processing verbs).
pub fn load_pathway_rows(path: &Path) -> Result<Vec<PathwayRow>> {
    let table = CsvTable::read(path)?;
    let c_nb = table.column("neighborhood")?;
    let c_climate = table.column("climate")?;
    let c_grid = table.column("grid")?;
    let c_dev = table.column("development")?;
    let c_adopt = table.column("adoption")?;
    let c_decade = table.column("decade")?;
    let c_kwh = table.column("total_kwh")?;
    let c_t = table.column("total_tco2e")?;
    let c_units = table.column("units")?;
    let c_area = table.column("floor_area_m2")?;

    let mut rows = Vec::with_capacity(table.records.len());
    for (i, record) in table.records.iter().enumerate() {
        let row = i + 2;
        let climate_raw = table.field(record, c_climate, row)?;
        let grid_raw = table.field(record, c_grid, row)?;
        let dev_raw = table.field(record, c_dev, row)?;
        let adopt_raw = table.field(record, c_adopt, row)?;
        rows.push(PathwayRow {
            neighborhood: table.field(record, c_nb, row)?.to_string(),
            climate: Climate::parse(climate_raw)
                .ok_or_else(|| table.row_error(row, format!("unknown climate {climate_raw:?}")))?,
            grid: crate::domain::GridPathwayId::parse(grid_raw)
                .ok_or_else(|| table.row_error(row, format!("unknown grid {grid_raw:?}")))?,
            development: Development::parse(dev_raw)
                .ok_or_else(|| table.row_error(row, format!("unknown development {dev_raw:?}")))?,
            adoption: crate::domain::AdoptionSetting::parse(adopt_raw)
                .ok_or_else(|| table.row_error(row, format!("unknown adoption {adopt_raw:?}")))?,
            decade: parse_i64(&table, table.field(record, c_decade, row)?, "decade", row)? as i32,
            total_kwh: parse_f64(&table, table.field(record, c_kwh, row)?, "total_kwh", row)?,
            total_tco2e: parse_f64(&table, table.field(record, c_t, row)?, "total_tco2e", row)?,
            units: parse_i64(&table, table.field(record, c_units, row)?, "units", row)? as u64,
            floor_area_m2: parse_f64(
                &table,
                table.field(record, c_area, row)?,
                "floor_area_m2",
                row,
            )?,
        });
    }
    Ok(rows)
}

/// Reproducibility manifest written next to every output set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub config_digest: String,
    pub seed: u64,
    pub version: String,
    pub runs: usize,
    pub files: Vec<String>,
    pub failures: Vec<String>,
    pub wall_clock_seconds: f64,
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    let json = serde_json::to_string_pretty(manifest)
        .map_err(|e| Error::Config { detail: e.to_string() })?;
    write_file(path, &(json + "\n"))
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io { path: path_str(path), source: e })?;
    serde_json::from_str(&text).map_err(|e| Error::Config { detail: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn parcels_round_trip_and_row_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("parcels.csv");
        let parcels = fixtures::micro_neighborhood();
        write_parcels(&path, &parcels).unwrap();
        let loaded = load_parcels(&path).unwrap();
        assert_eq!(loaded, parcels);

        // Empty file with header loads to an empty list.
        let empty = dir.path().join("empty.csv");
        write_parcels(&empty, &[]).unwrap();
        assert!(load_parcels(&empty).unwrap().is_empty());

        // A malformed ILR is rejected with its row number.
        let bad = dir.path().join("bad.csv");
        let mut text = std::fs::read_to_string(&path).unwrap();
        text = text.replacen(",1,", ",abc,", 1);
        write_file(&bad, &text).unwrap();
        let err = load_parcels(&bad).unwrap_err().to_string();
        assert!(err.contains("row") || err.contains(":2:"), "{err}");
        assert!(err.contains("abc"), "{err}");
    }

    #[test]
    fn catalog_schedule_rules_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let catalog = fixtures::default_catalog();
        let path = dir.path().join("catalog.csv");
        write_catalog(&path, catalog.archetypes()).unwrap();
        assert_eq!(load_catalog(&path).unwrap(), catalog.archetypes());

        let schedule = fixtures::default_schedule();
        let decades: Vec<i32> = (0..9).map(|i| 2020 + 10 * i).collect();
        let spath = dir.path().join("schedule.csv");
        write_schedule(&spath, &schedule, &decades).unwrap();
        assert_eq!(load_schedule(&spath).unwrap(), schedule);

        let rules = fixtures::default_rules();
        let rpath = dir.path().join("rules.csv");
        write_rules(&rpath, &rules).unwrap();
        assert_eq!(load_rules(&rpath).unwrap().rules(), rules.rules());
    }

    #[test]
    fn demand_climate_and_grid_loaders() {
        let dir = tempfile::tempdir().unwrap();

        let demand = dir.path().join("demand.csv");
        write_file(
            &demand,
            "archetype_id,decade,climate,kwh_per_unit_yr\nSF_MED,2020,tmy,12300\nSF_MED,2020,a2,13100\n",
        )
        .unwrap();
        let table = load_demand_table(&demand).unwrap();
        assert_eq!(table.lookup("SF_MED", 2020, crate::domain::Climate::Tmy).unwrap(), 12_300.0);
        assert!(table.lookup("SF_MED", 2030, crate::domain::Climate::Tmy).is_err());

        let climate = dir.path().join("climate.csv");
        write_file(&climate, "climate,decade,multiplier\nb1,2050,1.1\nb1,2100,1.15\n").unwrap();
        let curve = load_climate_curve(&climate).unwrap();
        assert_eq!(curve.multiplier(crate::domain::Climate::B1, 2050), 1.1);
        // Absent cells default to the reference weather.
        assert_eq!(curve.multiplier(crate::domain::Climate::Tmy, 2050), 1.0);
        curve.validate().unwrap();

        let bad = dir.path().join("bad_climate.csv");
        write_file(&bad, "climate,decade,multiplier\ntmy,2050,1.2\n").unwrap();
        assert!(load_climate_curve(&bad).unwrap().validate().is_err());

        let grid = dir.path().join("grid.csv");
        write_file(
            &grid,
            "pathway_id,year,g_per_kwh\nrapid,2020,400\nrapid,2060,40\ncustom,2020,100\n",
        )
        .unwrap();
        let curves = load_grid_curves(&grid).unwrap();
        assert_eq!(curves["rapid"], vec![(2020, 400.0), (2060, 40.0)]);
        assert_eq!(curves["custom"], vec![(2020, 100.0)]);
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(4.3), "4.3");
        assert_eq!(fmt_sig(1234567.0), "1234570");
        assert_eq!(fmt_sig(0.0123456789), "0.0123457");
        assert_eq!(fmt_sig(-8900.0), "-8900");
        assert_eq!(fmt_sig(239.0), "239");
        assert_eq!(fmt_sig(1.0000004), "1");
    }
}
