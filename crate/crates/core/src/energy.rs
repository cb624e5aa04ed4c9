//! Annual operational energy demand per residence unit.
//!
//! Demand is a data table keyed by `(archetype, decade, climate)`, not a
//! physics simulation. The default table is synthesized from catalog
//! intensity × unit floor area × a climate multiplier curve; real simulation
//! output can be ingested in the same CSV schema.

use std::collections::BTreeMap;

use crate::domain::{Archetype, Catalog, Climate, Timeline, START_YEAR};
use crate::error::{Error, Result};

/// Annual efficiency gain of newly available HVAC equipment.
const HVAC_IMPROVEMENT_PER_YEAR: f64 = 0.02;
/// Years of improvement before the technology limit is reached.
const HVAC_IMPROVEMENT_HORIZON: i32 = 20;
/// HVAC service life, years.
pub const HVAC_LIFETIME: i32 = 20;
/// Fraction of post-multiplier demand a battery can keep off the grid.
const STORAGE_SELF_SUFFICIENCY: f64 = 0.40;

/// Tunable energy-model parameters with their documented defaults.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct EnergyParams {
    /// Day-count constant in the PV sun-hours formula. The shipped default
    /// is 356; set 365 to use a plain calendar year instead.
    pub days_constant: f64,
    /// Average daily sun hours at the site.
    pub s_avg_hours: f64,
    /// Demand multiplier applied when a smart thermostat is installed.
    pub thermostat_multiplier: f64,
    /// Fraction of a building footprint usable for PV.
    pub usable_roof_fraction: f64,
    /// Panel power density, kW per m² of usable roof.
    pub panel_power_density: f64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        EnergyParams {
            days_constant: 356.0,
            s_avg_hours: 5.0,
            thermostat_multiplier: 0.95,
            usable_roof_fraction: 0.40,
            panel_power_density: 0.20,
        }
    }
}

/// Technologies installed on one residence unit.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TechSet {
    pub high_eff_hvac: bool,
    pub smart_thermostat: bool,
    /// Installed PV nameplate, kW.
    pub solar_pv_kw: Option<f64>,
    pub storage: bool,
}

impl TechSet {
    pub fn is_empty(&self) -> bool {
        !self.high_eff_hvac && !self.smart_thermostat && self.solar_pv_kw.is_none() && !self.storage
    }
}

/// Dimensionless demand multiplier for a climate scenario at a decade.
///
/// Anchors: 1.0 for TMY everywhere and for all scenarios in 2020; +10% for
/// every warming scenario by 2050; B1 plateaus at +15% from 2080; A1B and
/// A2 reach +22% and +25% by 2100. Linear between anchors.
pub fn climate_multiplier(climate: Climate, decade: i32) -> f64 {
    let anchors: &[(i32, f64)] = match climate {
        Climate::Tmy => return 1.0,
        Climate::B1 => &[(2020, 1.0), (2050, 1.10), (2080, 1.15), (2100, 1.15)],
        Climate::A1b => &[(2020, 1.0), (2050, 1.10), (2100, 1.22)],
        Climate::A2 => &[(2020, 1.0), (2050, 1.10), (2100, 1.25)],
    };
    interp(anchors, decade)
}

fn interp(points: &[(i32, f64)], year: i32) -> f64 {
    match points.iter().position(|&(y, _)| y >= year) {
        Some(0) => points[0].1,
        Some(i) => {
            let (y0, v0) = points[i - 1];
            let (y1, v1) = points[i];
            v0 + (v1 - v0) * f64::from(year - y0) / f64::from(y1 - y0)
        }
        None => points.last().expect("non-empty").1,
    }
}

/// Per-decade climate multipliers, either built-in or ingested.
#[derive(Clone, Debug)]
pub struct ClimateCurve {
    values: BTreeMap<(Climate, i32), f64>,
}

impl ClimateCurve {
    /// The shipped anchor curve sampled on the timeline.
    pub fn built_in(timeline: &Timeline) -> Self {
        let mut values = BTreeMap::new();
        for &climate in &Climate::ALL {
            for &decade in timeline.decades() {
                values.insert((climate, decade), climate_multiplier(climate, decade));
            }
        }
        ClimateCurve { values }
    }

    pub fn from_values(values: BTreeMap<(Climate, i32), f64>) -> Self {
        ClimateCurve { values }
    }

    /// Cells default to 1.0 when absent, so an ingested curve may list
    /// only the warming scenarios.
    pub fn multiplier(&self, climate: Climate, decade: i32) -> f64 {
        self.values.get(&(climate, decade)).copied().unwrap_or(1.0)
    }

    /// Ingested curves must keep TMY at 1.0 and never dip below the
    /// reference weather.
    pub fn validate(&self) -> Result<()> {
        for (&(climate, decade), &m) in &self.values {
            if climate == Climate::Tmy && m != 1.0 {
                return Err(Error::Config {
                    detail: format!("climate curve: tmy multiplier at {decade} is {m}, must be 1.0"),
                });
            }
            if m < 1.0 {
                return Err(Error::Config {
                    detail: format!("climate curve: {climate} multiplier at {decade} is {m} < 1.0"),
                });
            }
        }
        Ok(())
    }
}

/// Map `(archetype, decade, climate) -> kWh per unit per year`.
#[derive(Clone, Debug)]
pub struct DemandTable {
    cells: BTreeMap<(String, i32, Climate), f64>,
}

impl DemandTable {
    /// Synthesize the default table: intensity × unit area × climate
    /// multiplier, for every catalog archetype, decade, and climate.
    pub fn synthetic(catalog: &Catalog, curve: &ClimateCurve, timeline: &Timeline) -> Self {
        let mut cells = BTreeMap::new();
        for a in catalog.archetypes() {
            let base = a.base_intensity * a.unit_floor_area;
            for &decade in timeline.decades() {
                for &climate in &Climate::ALL {
                    cells.insert(
                        (a.id.clone(), decade, climate),
                        base * curve.multiplier(climate, decade),
                    );
                }
            }
        }
        DemandTable { cells }
    }

    pub fn from_cells(cells: BTreeMap<(String, i32, Climate), f64>) -> Self {
        DemandTable { cells }
    }

    /// Checks completeness, positivity, and the TMY ≤ B1 ≤ A1B ≤ A2
    /// ordering from 2050 onward.
    pub fn validate(&self, catalog: &Catalog, timeline: &Timeline) -> Result<()> {
        for a in catalog.archetypes() {
            for &decade in timeline.decades() {
                let mut row = [0.0; 4];
                for (i, &climate) in Climate::ALL.iter().enumerate() {
                    let v = self.lookup(&a.id, decade, climate)?;
                    if v <= 0.0 {
                        return Err(Error::DemandOrdering {
                            archetype_id: a.id.clone(),
                            decade,
                            detail: format!("non-positive value {v} for {climate}"),
                        });
                    }
                    row[i] = v;
                }
                if decade >= 2050 {
                    for w in row.windows(2) {
                        if w[0] > w[1] {
                            return Err(Error::DemandOrdering {
                                archetype_id: a.id.clone(),
                                decade,
                                detail: format!("{} > {}", w[0], w[1]),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn lookup(&self, archetype_id: &str, decade: i32, climate: Climate) -> Result<f64> {
        self.cells.get(&(archetype_id.to_string(), decade, climate)).copied().ok_or_else(|| {
            Error::MissingDemandCell {
                archetype_id: archetype_id.to_string(),
                decade,
                climate: climate.to_string(),
            }
        })
    }

    pub fn cells(&self) -> impl Iterator<Item = (&(String, i32, Climate), &f64)> {
        self.cells.iter()
    }
}

/// Gross annual demand of one unit before technology effects, kWh/yr.
pub fn base_demand(
    archetype: &Archetype,
    decade: i32,
    climate: Climate,
    table: &DemandTable,
) -> Result<f64> {
    table.lookup(&archetype.id, decade, climate)
}

/// Efficiency of the best HVAC equipment available in `year`, as a demand
/// multiplier: 2%/yr improvement from 2020, limited after 20 years.
fn best_available_multiplier(year: i32) -> f64 {
    let years = (year - START_YEAR).clamp(0, HVAC_IMPROVEMENT_HORIZON);
    (1.0 - HVAC_IMPROVEMENT_PER_YEAR).powi(years)
}

/// Demand multiplier of HVAC equipment installed on the regular 20-year
/// replacement cycle in `vintage_year`.
pub fn hvac_vintage_multiplier(vintage_year: i32) -> f64 {
    best_available_multiplier(vintage_year)
}

/// Demand multiplier obtained by adopting high-efficiency HVAC in
/// `adoption_year`; same curve as the lifetime cycle, applied immediately.
pub fn high_efficiency_multiplier(adoption_year: i32) -> f64 {
    best_available_multiplier(adoption_year)
}

/// Year of the most recent HVAC installation event for a unit of the given
/// vintage, observed at `year`.
///
/// Construction counts as an installation; lifetime replacements then
/// happen every 20 years. Units built before 2020 replace at the first
/// decade their system is at least 20 years old (2020 for the existing
/// stock), the decade being the model's native replacement resolution.
/// `None` means the pre-2020 system is still in service.
pub fn latest_replacement_year(vintage: i32, year: i32) -> Option<i32> {
    use crate::domain::DECADE_STEP;
    if vintage >= START_YEAR {
        debug_assert!(year >= vintage);
        return Some(vintage + HVAC_LIFETIME * ((year - vintage) / HVAC_LIFETIME));
    }
    let due = (vintage + HVAC_LIFETIME).max(START_YEAR);
    let first = START_YEAR + (due - START_YEAR + DECADE_STEP - 1) / DECADE_STEP * DECADE_STEP;
    if year < first {
        None
    } else {
        Some(first + HVAC_LIFETIME * ((year - first) / HVAC_LIFETIME))
    }
}

/// Effective HVAC multiplier of a unit at `year`: the best equipment it has
/// installed so far, via the lifetime cycle and, if adopted, the
/// high-efficiency upgrade. Equipment from before 2020 carries no
/// improvement.
pub fn effective_hvac_multiplier(vintage: i32, year: i32, adoption_year: Option<i32>) -> f64 {
    let cycle = latest_replacement_year(vintage, year);
    let adopted = adoption_year.filter(|&a| a <= year);
    match (cycle, adopted) {
        (None, None) => 1.0,
        (Some(c), None) => best_available_multiplier(c),
        (None, Some(a)) => best_available_multiplier(a),
        (Some(c), Some(a)) => best_available_multiplier(c.max(a)),
    }
}

/// Annual PV generation from the sun-hours method, kWh/yr.
pub fn pv_annual_generation(power_kw: f64, s_avg_hours: f64, days_constant: f64) -> Result<f64> {
    if power_kw < 0.0 {
        return Err(Error::NegativePvSize { kw: power_kw });
    }
    Ok(days_constant * s_avg_hours * power_kw)
}

/// Installable PV capacity for a building footprint, kW.
pub fn roof_capacity(footprint_m2: f64, params: &EnergyParams) -> f64 {
    debug_assert!(footprint_m2 > 0.0);
    footprint_m2 * params.usable_roof_fraction * params.panel_power_density
}

/// Grid demand after technology effects, kWh/yr.
///
/// Order: high-efficiency HVAC multiplier, thermostat multiplier, then
/// annual PV netting; with storage the result is additionally capped at
/// 60% of the post-multiplier demand (the 40% self-sufficiency rule).
/// `hvac_multiplier` is the reduction attributable to the adopted upgrade,
/// relative to whatever the unit would run otherwise.
pub fn net_grid_demand(
    gross: f64,
    techs: &TechSet,
    pv_gen: f64,
    hvac_multiplier: f64,
    thermostat_multiplier: f64,
) -> f64 {
    debug_assert!(gross >= 0.0 && pv_gen >= 0.0);
    let mut d = gross;
    if techs.high_eff_hvac {
        d *= hvac_multiplier;
    }
    if techs.smart_thermostat {
        d *= thermostat_multiplier;
    }
    let mut net = (d - pv_gen).max(0.0);
    if techs.storage {
        net = net.min((1.0 - STORAGE_SELF_SUFFICIENCY) * d);
    }
    net.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DwellingClass;

    fn catalog_with(intensity: f64, area: f64) -> Catalog {
        Catalog::new(vec![Archetype {
            id: "T1".into(),
            dwelling_class: DwellingClass::SingleFamily,
            units_per_building: 1,
            unit_floor_area: area,
            stories: 1,
            footprint: area,
            base_intensity: intensity,
        }])
        .unwrap()
    }

    #[test]
    fn climate_multiplier_anchors() {
        for decade in Timeline::standard().decades() {
            assert_eq!(climate_multiplier(Climate::Tmy, *decade), 1.0);
        }
        assert!((climate_multiplier(Climate::A1b, 2050) - 1.10).abs() < 1e-12);
        assert!((climate_multiplier(Climate::B1, 2090) - 1.15).abs() < 1e-12);
        assert!((climate_multiplier(Climate::B1, 2080) - 1.15).abs() < 1e-12);
        assert!((climate_multiplier(Climate::A1b, 2100) - 1.22).abs() < 1e-12);
        assert!((climate_multiplier(Climate::A2, 2100) - 1.25).abs() < 1e-12);
    }

    #[test]
    fn climate_ordering_from_2050() {
        for decade in (2050..=2100).step_by(10) {
            let tmy = climate_multiplier(Climate::Tmy, decade);
            let b1 = climate_multiplier(Climate::B1, decade);
            let a1b = climate_multiplier(Climate::A1b, decade);
            let a2 = climate_multiplier(Climate::A2, decade);
            assert!(tmy <= b1 && b1 <= a1b && a1b <= a2, "ordering at {decade}");
        }
    }

    #[test]
    fn synthetic_table_matches_product() {
        let catalog = catalog_with(80.0, 100.0);
        let timeline = Timeline::standard();
        let curve = ClimateCurve::built_in(&timeline);
        let table = DemandTable::synthetic(&catalog, &curve, &timeline);
        table.validate(&catalog, &timeline).unwrap();

        let arch = catalog.get("T1").unwrap();
        assert_eq!(base_demand(arch, 2020, Climate::Tmy, &table).unwrap(), 8_000.0);
        assert!((base_demand(arch, 2050, Climate::A1b, &table).unwrap() - 8_800.0).abs() < 1e-9);
        // TMY is decade-invariant by construction.
        assert_eq!(
            base_demand(arch, 2020, Climate::Tmy, &table).unwrap(),
            base_demand(arch, 2100, Climate::Tmy, &table).unwrap()
        );
    }

    #[test]
    fn missing_cell_names_the_triple() {
        let catalog = catalog_with(80.0, 100.0);
        let timeline = Timeline::standard();
        let table =
            DemandTable::synthetic(&catalog, &ClimateCurve::built_in(&timeline), &timeline);
        let err = table.lookup("nope", 2020, Climate::Tmy).unwrap_err();
        assert!(err.to_string().contains("nope"));
    }

    #[test]
    fn hvac_vintage_curve() {
        assert_eq!(hvac_vintage_multiplier(2020), 1.0);
        assert!((hvac_vintage_multiplier(2030) - 0.98f64.powi(10)).abs() < 1e-12);
        assert!((hvac_vintage_multiplier(2030) - 0.8171).abs() < 1e-4);
        // Limit clamp at 20 years of improvement.
        assert!((hvac_vintage_multiplier(2060) - 0.98f64.powi(20)).abs() < 1e-12);
        assert!((hvac_vintage_multiplier(2060) - 0.6676).abs() < 1e-4);
    }

    #[test]
    fn high_efficiency_curve_and_dominance() {
        assert_eq!(high_efficiency_multiplier(2020), 1.0);
        assert!((high_efficiency_multiplier(2040) - 0.6676).abs() < 1e-4);
        // Adoption at year y never runs worse equipment than the lifetime
        // cycle of a 2020-vintage non-adopter observed the same year.
        for y in 2020..=2100 {
            let cycle = hvac_vintage_multiplier(latest_replacement_year(2020, y).unwrap());
            assert!(high_efficiency_multiplier(y) <= cycle + 1e-12, "year {y}");
        }
    }

    #[test]
    fn multipliers_stay_in_bounds() {
        for y in 2020..=2100 {
            let m = hvac_vintage_multiplier(y);
            assert!(m > 0.66 && m <= 1.0);
        }
    }

    #[test]
    fn replacement_cycle_years() {
        // Existing stock replaces at 2020, then every 20 years.
        assert_eq!(latest_replacement_year(1960, 2020), Some(2020));
        assert_eq!(latest_replacement_year(1965, 2030), Some(2020));
        assert_eq!(latest_replacement_year(1965, 2040), Some(2040));
        // A 2005 system is not due until 2030.
        assert_eq!(latest_replacement_year(2005, 2020), None);
        assert_eq!(latest_replacement_year(2005, 2030), Some(2030));
        // New construction installs at construction, replaces on schedule.
        assert_eq!(latest_replacement_year(2030, 2049), Some(2030));
        assert_eq!(latest_replacement_year(2030, 2050), Some(2050));
        // 2020-era replacements carry no improvement yet.
        assert_eq!(effective_hvac_multiplier(1965, 2020, None), 1.0);
        assert_eq!(effective_hvac_multiplier(1965, 2030, None), 1.0);
        assert!((effective_hvac_multiplier(1965, 2050, None) - 0.98f64.powi(20)).abs() < 1e-12);
        // An adopter beats the cycle until the cycle catches up.
        assert!((effective_hvac_multiplier(1965, 2030, Some(2025)) - 0.98f64.powi(5)).abs() < 1e-12);
    }

    #[test]
    fn pv_formula() {
        assert_eq!(pv_annual_generation(5.0, 5.0, 356.0).unwrap(), 8_900.0);
        assert_eq!(pv_annual_generation(0.0, 5.0, 356.0).unwrap(), 0.0);
        assert_eq!(pv_annual_generation(2.5, 5.0, 356.0).unwrap(), 4_450.0);
        assert_eq!(pv_annual_generation(5.0, 5.0, 365.0).unwrap(), 9_125.0);
        assert!(pv_annual_generation(-1.0, 5.0, 356.0).is_err());
    }

    #[test]
    fn pv_is_linear() {
        for p in [0.5, 1.0, 3.0, 7.5] {
            for s in [3.0, 5.0, 6.5] {
                let one = pv_annual_generation(1.0, 1.0, 356.0).unwrap();
                let v = pv_annual_generation(p, s, 356.0).unwrap();
                assert!((v - one * p * s).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn roof_capacity_defaults() {
        let params = EnergyParams::default();
        assert_eq!(roof_capacity(100.0, &params), 8.0);
        assert_eq!(roof_capacity(62.5, &params), 5.0);
        let zero = EnergyParams { usable_roof_fraction: 0.0, ..Default::default() };
        assert_eq!(roof_capacity(100.0, &zero), 0.0);
    }

    #[test]
    fn netting_examples() {
        let none = TechSet::default();
        assert_eq!(net_grid_demand(12_345.0, &none, 0.0, 1.0, 0.95), 12_345.0);

        let pv = TechSet { solar_pv_kw: Some(2.5), ..Default::default() };
        assert_eq!(net_grid_demand(10_000.0, &pv, 4_450.0, 1.0, 0.95), 5_550.0);

        let pv_storage =
            TechSet { solar_pv_kw: Some(2.0), storage: true, ..Default::default() };
        // 40% self-sufficiency floor binds when PV netting alone is short.
        assert_eq!(net_grid_demand(10_000.0, &pv_storage, 3_000.0, 1.0, 0.95), 6_000.0);
        // ... and never makes things worse than PV-only netting.
        assert_eq!(net_grid_demand(10_000.0, &pv_storage, 8_000.0, 1.0, 0.95), 2_000.0);
    }

    #[test]
    fn netting_never_exceeds_gross() {
        let techs = TechSet {
            high_eff_hvac: true,
            smart_thermostat: true,
            solar_pv_kw: Some(5.0),
            storage: true,
        };
        for gross in [0.0, 100.0, 10_000.0] {
            for pv in [0.0, 500.0, 20_000.0] {
                let net = net_grid_demand(gross, &techs, pv, 0.8, 0.95);
                assert!(net <= gross);
                assert!(net >= 0.0);
                assert!(net <= 0.6 * gross * 0.8 * 0.95 + 1e-9);
            }
        }
    }
}
