//! Shared domain vocabulary: parcels, archetypes, residence units, scenario
//! axes, and the decade timeline.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

use crate::error::Error;

/// Occupants assumed per residential dwelling unit.
pub const OCCUPANTS_PER_UNIT: f64 = 2.5;

/// First modeled year.
pub const START_YEAR: i32 = 2020;
/// Last modeled year.
pub const END_YEAR: i32 = 2100;
/// Years between snapshots.
pub const DECADE_STEP: i32 = 10;

/// The fixed decade grid 2020, 2030, ..., 2100.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timeline {
    decades: Vec<i32>,
}

impl Timeline {
    pub fn standard() -> Self {
        Timeline {
            decades: (0..=(END_YEAR - START_YEAR) / DECADE_STEP)
                .map(|i| START_YEAR + i * DECADE_STEP)
                .collect(),
        }
    }

    pub fn decades(&self) -> &[i32] {
        &self.decades
    }

    pub fn len(&self) -> usize {
        self.decades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decades.is_empty()
    }

    pub fn index_of(&self, year: i32) -> Option<usize> {
        self.decades.iter().position(|&d| d == year)
    }

    pub fn year_at(&self, index: usize) -> Option<i32> {
        self.decades.get(index).copied()
    }
}

impl Default for Timeline {
    fn default() -> Self {
        Timeline::standard()
    }
}

/// People housed by `units` residential dwelling units.
///
/// Fractional results are intentional: all uses are aggregates, and rounding
/// would bias per-capita metrics.
pub fn occupants(units: f64) -> f64 {
    debug_assert!(units >= 0.0);
    units * OCCUPANTS_PER_UNIT
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DwellingClass {
    SingleFamily,
    MultiFamily,
    MixedUse,
    Commercial,
}

impl DwellingClass {
    pub fn as_str(self) -> &'static str {
        match self {
            DwellingClass::SingleFamily => "single_family",
            DwellingClass::MultiFamily => "multi_family",
            DwellingClass::MixedUse => "mixed_use",
            DwellingClass::Commercial => "commercial",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "single_family" => Some(DwellingClass::SingleFamily),
            "multi_family" => Some(DwellingClass::MultiFamily),
            "mixed_use" => Some(DwellingClass::MixedUse),
            "commercial" => Some(DwellingClass::Commercial),
            _ => None,
        }
    }
}

impl fmt::Display for DwellingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A building template from which parcel residences are instantiated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Archetype {
    pub id: String,
    pub dwelling_class: DwellingClass,
    pub units_per_building: u32,
    /// Conditioned floor area per dwelling unit, m².
    pub unit_floor_area: f64,
    pub stories: u32,
    /// Ground footprint of one building, m².
    pub footprint: f64,
    /// Annual demand intensity, kWh/m²/yr, used by the synthetic demand table.
    pub base_intensity: f64,
}

/// A single catalog-validation finding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatalogViolation {
    DuplicateId { archetype_id: String },
    NonPositiveField { archetype_id: String, field: &'static str },
    SingleFamilyUnits { archetype_id: String, units: u32 },
}

impl fmt::Display for CatalogViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogViolation::DuplicateId { archetype_id } => {
                write!(f, "duplicate archetype id {archetype_id:?}")
            }
            CatalogViolation::NonPositiveField { archetype_id, field } => {
                write!(f, "archetype {archetype_id:?}: {field} must be positive")
            }
            CatalogViolation::SingleFamilyUnits { archetype_id, units } => {
                write!(
                    f,
                    "archetype {archetype_id:?}: single_family must have exactly 1 unit, has {units}"
                )
            }
        }
    }
}

/// Checks archetype invariants; an empty report means the catalog is valid.
pub fn validate_catalog(catalog: &[Archetype]) -> Vec<CatalogViolation> {
    let mut report = Vec::new();
    let mut seen = BTreeSet::new();
    for a in catalog {
        if !seen.insert(a.id.clone()) {
            report.push(CatalogViolation::DuplicateId { archetype_id: a.id.clone() });
        }
        if a.unit_floor_area <= 0.0 {
            report.push(CatalogViolation::NonPositiveField {
                archetype_id: a.id.clone(),
                field: "unit_floor_area_m2",
            });
        }
        if a.footprint <= 0.0 {
            report.push(CatalogViolation::NonPositiveField {
                archetype_id: a.id.clone(),
                field: "footprint_m2",
            });
        }
        if a.base_intensity <= 0.0 {
            report.push(CatalogViolation::NonPositiveField {
                archetype_id: a.id.clone(),
                field: "base_intensity_kwh_m2_yr",
            });
        }
        if a.stories == 0 {
            report.push(CatalogViolation::NonPositiveField {
                archetype_id: a.id.clone(),
                field: "stories",
            });
        }
        if a.dwelling_class == DwellingClass::SingleFamily && a.units_per_building != 1 {
            report.push(CatalogViolation::SingleFamilyUnits {
                archetype_id: a.id.clone(),
                units: a.units_per_building,
            });
        }
    }
    report
}

/// An archetype catalog with by-id lookup.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    archetypes: Vec<Archetype>,
}

impl Catalog {
    pub fn new(archetypes: Vec<Archetype>) -> Result<Self, Error> {
        let report = validate_catalog(&archetypes);
        if !report.is_empty() {
            return Err(Error::InvalidCatalog {
                report: report.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "),
            });
        }
        Ok(Catalog { archetypes })
    }

    pub fn get(&self, id: &str) -> Option<&Archetype> {
        self.archetypes.iter().find(|a| a.id == id)
    }

    pub fn require(&self, id: &str) -> Result<&Archetype, Error> {
        self.get(id).ok_or_else(|| Error::UnknownArchetype { archetype_id: id.to_string() })
    }

    pub fn archetypes(&self) -> &[Archetype] {
        &self.archetypes
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LandUseClass {
    SmallResidential,
    LargeResidential,
    CommercialMixed,
}

impl LandUseClass {
    pub fn as_str(self) -> &'static str {
        match self {
            LandUseClass::SmallResidential => "small_residential",
            LandUseClass::LargeResidential => "large_residential",
            LandUseClass::CommercialMixed => "commercial_mixed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "small_residential" => Some(LandUseClass::SmallResidential),
            "large_residential" => Some(LandUseClass::LargeResidential),
            "commercial_mixed" => Some(LandUseClass::CommercialMixed),
            _ => None,
        }
    }

    pub const ALL: [LandUseClass; 3] = [
        LandUseClass::SmallResidential,
        LandUseClass::LargeResidential,
        LandUseClass::CommercialMixed,
    ];
}

impl fmt::Display for LandUseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocationClass {
    Interior,
    Corridor,
    Tod,
}

impl LocationClass {
    pub fn as_str(self) -> &'static str {
        match self {
            LocationClass::Interior => "interior",
            LocationClass::Corridor => "corridor",
            LocationClass::Tod => "tod",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "interior" => Some(LocationClass::Interior),
            "corridor" => Some(LocationClass::Corridor),
            "tod" => Some(LocationClass::Tod),
            _ => None,
        }
    }

    pub const ALL: [LocationClass; 3] =
        [LocationClass::Interior, LocationClass::Corridor, LocationClass::Tod];
}

impl fmt::Display for LocationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A land lot — the unit of redevelopment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parcel {
    pub id: String,
    pub neighborhood: String,
    pub land_use_class: LandUseClass,
    pub location_class: LocationClass,
    /// Lot area, m².
    pub lot_area: f64,
    /// Improvement-to-land ratio; low values redevelop first.
    pub ilr: f64,
    pub year_built: i32,
    pub current_archetype: String,
    /// Buildings currently on the lot (subdivision can raise this above 1).
    pub buildings: u32,
    /// Decade in which the parcel redeveloped; set at most once.
    pub redeveloped_in: Option<i32>,
    /// Parcel centroid, m (planar, neighborhood-local frame).
    pub x: f64,
    pub y: f64,
}

/// One dwelling unit instantiated from a parcel's archetype.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidenceUnit {
    pub id: String,
    pub parcel_id: String,
    pub archetype_id: String,
    pub dwelling_class: DwellingClass,
    /// Construction or last-redevelopment year.
    pub vintage: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Climate {
    Tmy,
    B1,
    A1b,
    A2,
}

impl Climate {
    pub const ALL: [Climate; 4] = [Climate::Tmy, Climate::B1, Climate::A1b, Climate::A2];

    pub fn as_str(self) -> &'static str {
        match self {
            Climate::Tmy => "tmy",
            Climate::B1 => "b1",
            Climate::A1b => "a1b",
            Climate::A2 => "a2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tmy" => Some(Climate::Tmy),
            "b1" => Some(Climate::B1),
            "a1b" => Some(Climate::A1b),
            "a2" => Some(Climate::A2),
            _ => None,
        }
    }
}

impl fmt::Display for Climate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridPathwayId {
    None,
    Moderate,
    Rapid,
}

impl GridPathwayId {
    pub const ALL: [GridPathwayId; 3] =
        [GridPathwayId::None, GridPathwayId::Moderate, GridPathwayId::Rapid];

    pub fn as_str(self) -> &'static str {
        match self {
            GridPathwayId::None => "none",
            GridPathwayId::Moderate => "moderate",
            GridPathwayId::Rapid => "rapid",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Some(GridPathwayId::None),
            "moderate" => Some(GridPathwayId::Moderate),
            "rapid" => Some(GridPathwayId::Rapid),
            _ => None,
        }
    }
}

impl fmt::Display for GridPathwayId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Development {
    Reference,
    LowDensity,
    HighDensity,
}

impl Development {
    pub const ALL: [Development; 3] =
        [Development::Reference, Development::LowDensity, Development::HighDensity];

    pub fn as_str(self) -> &'static str {
        match self {
            Development::Reference => "reference",
            Development::LowDensity => "low_density",
            Development::HighDensity => "high_density",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "reference" => Some(Development::Reference),
            "low_density" | "low" => Some(Development::LowDensity),
            "high_density" | "high" => Some(Development::HighDensity),
            _ => None,
        }
    }
}

impl fmt::Display for Development {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Technology-adoption context for a run.
///
/// `FallingPrices` is the supportive policy paired with a steeper price
/// decline, the most adoption-favorable corner of the axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdoptionSetting {
    NoAdoption,
    Neutral,
    Supportive,
    FallingPrices,
}

impl AdoptionSetting {
    pub const ALL: [AdoptionSetting; 4] = [
        AdoptionSetting::NoAdoption,
        AdoptionSetting::Neutral,
        AdoptionSetting::Supportive,
        AdoptionSetting::FallingPrices,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AdoptionSetting::NoAdoption => "no_adoption",
            AdoptionSetting::Neutral => "neutral",
            AdoptionSetting::Supportive => "supportive",
            AdoptionSetting::FallingPrices => "falling_prices",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "no_adoption" | "none" => Some(AdoptionSetting::NoAdoption),
            "neutral" => Some(AdoptionSetting::Neutral),
            "supportive" => Some(AdoptionSetting::Supportive),
            "falling_prices" | "falling" => Some(AdoptionSetting::FallingPrices),
            _ => None,
        }
    }

    /// Whether the household ABM runs at all under this setting.
    pub fn abm_enabled(self) -> bool {
        !matches!(self, AdoptionSetting::NoAdoption)
    }

    /// Whether supportive-policy incentives and mandates are active.
    pub fn supportive_policy(self) -> bool {
        matches!(self, AdoptionSetting::Supportive | AdoptionSetting::FallingPrices)
    }
}

impl fmt::Display for AdoptionSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The four scenario axes plus seed and timeline: everything that
/// distinguishes one run from another.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub climate: Climate,
    pub grid: GridPathwayId,
    pub development: Development,
    pub adoption: AdoptionSetting,
    pub seed: u64,
    #[serde(default)]
    pub timeline: Timeline,
}

impl ScenarioSpec {
    pub fn label(&self) -> String {
        format!("{}-{}-{}-{}", self.climate, self.grid, self.development, self.adoption)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sf(id: &str, units: u32) -> Archetype {
        Archetype {
            id: id.to_string(),
            dwelling_class: DwellingClass::SingleFamily,
            units_per_building: units,
            unit_floor_area: 150.0,
            stories: 1,
            footprint: 150.0,
            base_intensity: 80.0,
        }
    }

    #[test]
    fn timeline_is_nine_increasing_decades() {
        let t = Timeline::standard();
        assert_eq!(t.len(), 9);
        assert_eq!(t.decades().first(), Some(&2020));
        assert_eq!(t.decades().last(), Some(&2100));
        assert!(t.decades().windows(2).all(|w| w[1] - w[0] == 10));
    }

    #[test]
    fn timeline_index_round_trips() {
        let t = Timeline::standard();
        for (i, &year) in t.decades().iter().enumerate() {
            assert_eq!(t.index_of(year), Some(i));
            assert_eq!(t.year_at(i), Some(year));
        }
        assert_eq!(t.index_of(2025), None);
    }

    #[test]
    fn occupants_matches_rule() {
        assert_eq!(occupants(1.0), 2.5);
        assert_eq!(occupants(0.0), 0.0);
        // Brentwood 2020 housing units scaled by the occupancy rule.
        assert_eq!(occupants(4790.0), 11_975.0);
    }

    #[test]
    fn occupants_is_linear() {
        for a in 0..50 {
            for b in 0..50 {
                let (a, b) = (a as f64, b as f64);
                assert_eq!(occupants(a + b), occupants(a) + occupants(b));
            }
        }
    }

    #[test]
    fn duplicate_ids_are_reported() {
        let catalog = vec![sf("SF1", 1), sf("SF1", 1)];
        let report = validate_catalog(&catalog);
        assert_eq!(report.len(), 1);
        assert!(matches!(&report[0], CatalogViolation::DuplicateId { archetype_id } if archetype_id == "SF1"));
    }

    #[test]
    fn single_family_unit_count_is_checked() {
        let catalog = vec![sf("SF2", 2)];
        let report = validate_catalog(&catalog);
        assert_eq!(report.len(), 1);
        assert!(matches!(&report[0], CatalogViolation::SingleFamilyUnits { units: 2, .. }));
    }

    #[test]
    fn non_positive_fields_are_reported() {
        let mut a = sf("SF1", 1);
        a.base_intensity = 0.0;
        let report = validate_catalog(&[a]);
        assert_eq!(report.len(), 1);
    }
}
