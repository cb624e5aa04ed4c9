//! Emission conversion, aggregation, and the derived pathway metrics:
//! baseline deltas, rebound detection, and the premium for sprawl.

use serde::{Deserialize, Serialize};

use crate::domain::ScenarioSpec;
use crate::error::{Error, Result};

/// Converts annual electricity demand to annual emissions.
pub fn emissions_tco2e(demand_kwh: f64, intensity_g_per_kwh: f64) -> f64 {
    debug_assert!(demand_kwh >= 0.0 && intensity_g_per_kwh >= 0.0);
    demand_kwh * intensity_g_per_kwh * 1e-6
}

/// Per-decade record of one (scenario, neighborhood) pathway.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathwayPoint {
    pub neighborhood: String,
    pub decade: i32,
    pub total_demand_kwh: f64,
    pub total_emissions_tco2e: f64,
    pub units: u64,
    pub floor_area_m2: f64,
    pub per_unit_tco2e: f64,
    pub per_m2_tco2e: f64,
}

impl PathwayPoint {
    pub fn from_totals(
        neighborhood: &str,
        decade: i32,
        total_demand_kwh: f64,
        total_emissions_tco2e: f64,
        units: u64,
        floor_area_m2: f64,
    ) -> Self {
        PathwayPoint {
            neighborhood: neighborhood.to_string(),
            decade,
            total_demand_kwh,
            total_emissions_tco2e,
            units,
            floor_area_m2,
            per_unit_tco2e: if units > 0 {
                total_emissions_tco2e / units as f64
            } else {
                0.0
            },
            per_m2_tco2e: if floor_area_m2 > 0.0 {
                total_emissions_tco2e / floor_area_m2
            } else {
                0.0
            },
        }
    }
}

/// Exact sum of per-neighborhood points into an aggregate point.
pub fn aggregate(neighborhood_label: &str, decade: i32, points: &[&PathwayPoint]) -> PathwayPoint {
    let mut demand = 0.0;
    let mut emissions = 0.0;
    let mut units = 0u64;
    let mut area = 0.0;
    for p in points {
        debug_assert_eq!(p.decade, decade);
        demand += p.total_demand_kwh;
        emissions += p.total_emissions_tco2e;
        units += p.units;
        area += p.floor_area_m2;
    }
    PathwayPoint::from_totals(neighborhood_label, decade, demand, emissions, units, area)
}

/// A full pathway for one scenario and one neighborhood grouping.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathwaySeries {
    pub scenario: ScenarioSpec,
    pub neighborhood: String,
    pub points: Vec<PathwayPoint>,
}

/// Sprawl surplus per decade: the low-density pathway scaled to house the
/// high-density unit count, minus the high-density pathway.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PremiumPoint {
    pub decade: i32,
    pub premium_tco2e: f64,
    pub units_low: u64,
    pub units_high: u64,
    pub total_low_tco2e: f64,
    pub total_high_tco2e: f64,
}

/// `premium(d) = low(d) × units_high(d)/units_low(d) − high(d)`, in
/// tCO₂eq/yr, for series sharing every other scenario axis.
pub fn premium_for_sprawl(
    low: &[PathwayPoint],
    high: &[PathwayPoint],
) -> Result<Vec<PremiumPoint>> {
    if low.len() != high.len() {
        return Err(Error::MisalignedSeries {
            detail: format!("low has {} decades, high has {}", low.len(), high.len()),
        });
    }
    let mut out = Vec::with_capacity(low.len());
    for (l, h) in low.iter().zip(high.iter()) {
        if l.decade != h.decade {
            return Err(Error::MisalignedSeries {
                detail: format!("decade {} vs {}", l.decade, h.decade),
            });
        }
        if l.units == 0 {
            return Err(Error::ZeroLowDensityUnits { decade: l.decade });
        }
        let scale = h.units as f64 / l.units as f64;
        out.push(PremiumPoint {
            decade: l.decade,
            premium_tco2e: l.total_emissions_tco2e * scale - h.total_emissions_tco2e,
            units_low: l.units,
            units_high: h.units,
            total_low_tco2e: l.total_emissions_tco2e,
            total_high_tco2e: h.total_emissions_tco2e,
        });
    }
    Ok(out)
}

/// Per-decade ratio of a series against a reference series.
pub fn baseline_delta(series: &[(i32, f64)], reference: &[(i32, f64)]) -> Result<Vec<(i32, f64)>> {
    if series.len() != reference.len() {
        return Err(Error::MisalignedSeries {
            detail: format!("{} vs {} decades", series.len(), reference.len()),
        });
    }
    let mut out = Vec::with_capacity(series.len());
    for (&(d, v), &(dr, r)) in series.iter().zip(reference.iter()) {
        if d != dr {
            return Err(Error::MisalignedSeries { detail: format!("decade {d} vs {dr}") });
        }
        if r == 0.0 {
            return Err(Error::ZeroBaseline { decade: d });
        }
        out.push((d, v / r));
    }
    Ok(out)
}

/// Result of scanning a pathway for a late-century rebound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rebound {
    /// Decade of the series minimum.
    pub min_decade: i32,
    /// True when the final value exceeds the minimum by more than the
    /// tolerance.
    pub rebounds: bool,
    /// `final / min − 1`.
    pub magnitude: f64,
}

/// Finds the series minimum and flags a rebound when the 2100 value rises
/// back above it by more than `tolerance` (fractional, default 1%).
pub fn rebound_detector(series: &[(i32, f64)], tolerance: f64) -> Option<Rebound> {
    if series.is_empty() {
        return None;
    }
    let (mut min_decade, mut min_value) = series[0];
    for &(d, v) in series.iter().skip(1) {
        if v < min_value {
            min_value = v;
            min_decade = d;
        }
    }
    let last = series.last().unwrap().1;
    let magnitude = if min_value > 0.0 { last / min_value - 1.0 } else { 0.0 };
    Some(Rebound { min_decade, rebounds: magnitude > tolerance, magnitude })
}

pub const DEFAULT_REBOUND_TOLERANCE: f64 = 0.01;
