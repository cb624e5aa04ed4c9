//! Grid carbon intensity as a function of pathway and year.
//!
//! Three built-in pathways: a flat 430 gCO₂eq/kWh reference, a rapid
//! descent of 100 g/kWh per decade clamped at a 48 g/kWh floor, and a
//! moderate pathway defined as the arithmetic mean of the other two.
//! Custom pathways can be supplied as `(year, intensity)` points with
//! linear interpolation between them.

use crate::domain::{GridPathwayId, END_YEAR, START_YEAR};
use crate::error::{Error, Result};

/// 2020 grid carbon content, gCO₂eq/kWh.
pub const BASE_INTENSITY: f64 = 430.0;
/// Residual embodied intensity of a fully decarbonized grid, gCO₂eq/kWh.
pub const FLOOR_INTENSITY: f64 = 48.0;
/// Rapid-pathway decline, gCO₂eq/kWh per year.
const RAPID_DECLINE_PER_YEAR: f64 = 10.0;

/// Annual-average carbon intensity for a built-in pathway, gCO₂eq/kWh.
///
/// Linear in the year within decades; rejects years outside 2020-2100.
pub fn carbon_intensity(pathway: GridPathwayId, year: i32) -> Result<f64> {
    if !(START_YEAR..=END_YEAR).contains(&year) {
        return Err(Error::YearOutOfRange { year });
    }
    Ok(intensity_unchecked(pathway, year))
}

fn intensity_unchecked(pathway: GridPathwayId, year: i32) -> f64 {
    match pathway {
        GridPathwayId::None => BASE_INTENSITY,
        GridPathwayId::Rapid => {
            let linear = BASE_INTENSITY - RAPID_DECLINE_PER_YEAR * f64::from(year - START_YEAR);
            linear.max(FLOOR_INTENSITY)
        }
        GridPathwayId::Moderate => {
            (intensity_unchecked(GridPathwayId::None, year)
                + intensity_unchecked(GridPathwayId::Rapid, year))
                / 2.0
        }
    }
}

/// A named intensity curve, either built-in or ingested from CSV points.
#[derive(Clone, Debug)]
pub enum GridPathway {
    BuiltIn(GridPathwayId),
    /// Sorted `(year, gCO₂eq/kWh)` points; linear interpolation between
    /// them, clamped outside the covered range.
    Custom { id: String, points: Vec<(i32, f64)> },
}

impl GridPathway {
    pub fn custom(id: impl Into<String>, mut points: Vec<(i32, f64)>) -> Result<Self> {
        let id = id.into();
        if points.is_empty() {
            return Err(Error::EmptyGridPathway { pathway: id });
        }
        points.sort_by_key(|&(y, _)| y);
        Ok(GridPathway::Custom { id, points })
    }

    pub fn id(&self) -> &str {
        match self {
            GridPathway::BuiltIn(id) => id.as_str(),
            GridPathway::Custom { id, .. } => id,
        }
    }

    pub fn intensity(&self, year: i32) -> Result<f64> {
        match self {
            GridPathway::BuiltIn(id) => carbon_intensity(*id, year),
            GridPathway::Custom { points, .. } => Ok(interpolate(points, year)),
        }
    }
}

fn interpolate(points: &[(i32, f64)], year: i32) -> f64 {
    match points.iter().position(|&(y, _)| y >= year) {
        Some(0) => points[0].1,
        Some(i) => {
            let (y0, v0) = points[i - 1];
            let (y1, v1) = points[i];
            if y0 == y1 {
                v1
            } else {
                v0 + (v1 - v0) * f64::from(year - y0) / f64::from(y1 - y0)
            }
        }
        None => points.last().expect("non-empty").1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Timeline;

    #[test]
    fn reference_pathway_is_flat() {
        for year in [2020, 2050, 2080, 2100] {
            assert_eq!(carbon_intensity(GridPathwayId::None, year).unwrap(), 430.0);
        }
    }

    #[test]
    fn rapid_pathway_decade_values() {
        let expected = [430.0, 330.0, 230.0, 130.0, 48.0, 48.0, 48.0, 48.0, 48.0];
        for (decade, want) in Timeline::standard().decades().iter().zip(expected) {
            assert_eq!(carbon_intensity(GridPathwayId::Rapid, *decade).unwrap(), want);
        }
    }

    #[test]
    fn moderate_is_the_mean_everywhere() {
        for year in 2020..=2100 {
            let none = carbon_intensity(GridPathwayId::None, year).unwrap();
            let rapid = carbon_intensity(GridPathwayId::Rapid, year).unwrap();
            let moderate = carbon_intensity(GridPathwayId::Moderate, year).unwrap();
            assert_eq!(moderate, (none + rapid) / 2.0);
        }
        assert_eq!(carbon_intensity(GridPathwayId::Moderate, 2060).unwrap(), 239.0);
    }

    #[test]
    fn pathway_ordering_and_monotonicity() {
        let mut prev_rapid = f64::INFINITY;
        let mut prev_moderate = f64::INFINITY;
        for year in 2020..=2100 {
            let none = carbon_intensity(GridPathwayId::None, year).unwrap();
            let moderate = carbon_intensity(GridPathwayId::Moderate, year).unwrap();
            let rapid = carbon_intensity(GridPathwayId::Rapid, year).unwrap();
            assert!(rapid <= moderate && moderate <= none);
            assert!(rapid <= prev_rapid);
            assert!(moderate <= prev_moderate);
            prev_rapid = rapid;
            prev_moderate = moderate;
        }
    }

    #[test]
    fn years_outside_range_are_rejected() {
        assert!(carbon_intensity(GridPathwayId::None, 2019).is_err());
        assert!(carbon_intensity(GridPathwayId::Rapid, 2101).is_err());
    }

    #[test]
    fn custom_pathway_interpolates() {
        let p = GridPathway::custom("tx_custom", vec![(2020, 400.0), (2040, 200.0)]).unwrap();
        assert_eq!(p.intensity(2030).unwrap(), 300.0);
        assert_eq!(p.intensity(2010).unwrap(), 400.0);
        assert_eq!(p.intensity(2100).unwrap(), 200.0);
    }
}
