//! Engine error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid archetype catalog: {report}")]
    InvalidCatalog { report: String },

    #[error("unknown archetype id {archetype_id:?}")]
    UnknownArchetype { archetype_id: String },

    #[error("parcel {parcel_id:?} has an invalid ILR")]
    InvalidIlr { parcel_id: String },

    #[error("no redevelopment schedule for neighborhood {neighborhood:?}")]
    UnknownNeighborhood { neighborhood: String },

    #[error("schedule for {neighborhood:?} has no entry for decade {decade}")]
    UnknownScheduleDecade { neighborhood: String, decade: i32 },

    #[error("schedule fractions for {neighborhood:?} sum to {sum}, expected 1.0")]
    ScheduleSum { neighborhood: String, sum: f64 },

    #[error("decade {decade} already applied to {neighborhood:?}")]
    DecadeAlreadyApplied { neighborhood: String, decade: i32 },

    #[error("decade {decade} applied out of order to {neighborhood:?}, expected {expected}")]
    DecadeOutOfOrder { neighborhood: String, decade: i32, expected: i32 },

    #[error(
        "no assignment rule for scenario {scenario} matching \
         ({land_use}, {location}, {lot_area} m2)"
    )]
    UnmatchedParcel { scenario: String, land_use: String, location: String, lot_area: f64 },

    #[error("assignment rules for scenario {scenario} overlap on ({land_use}, {location}) at {lot_area} m2")]
    OverlappingRules { scenario: String, land_use: String, location: String, lot_area: f64 },

    #[error("no demand-table cell for ({archetype_id}, {decade}, {climate})")]
    MissingDemandCell { archetype_id: String, decade: i32, climate: String },

    #[error("demand table violates climate ordering at ({archetype_id}, {decade}): {detail}")]
    DemandOrdering { archetype_id: String, decade: i32, detail: String },

    #[error("negative PV system size {kw} kW")]
    NegativePvSize { kw: f64 },

    #[error("year {year} outside the modeled range 2020-2100")]
    YearOutOfRange { year: i32 },

    #[error("grid pathway {pathway:?} has no intensity data")]
    EmptyGridPathway { pathway: String },

    #[error("premium requires a positive low-density unit count at decade {decade}")]
    ZeroLowDensityUnits { decade: i32 },

    #[error("baseline series is zero at decade {decade}")]
    ZeroBaseline { decade: i32 },

    #[error("series decades are not aligned: {detail}")]
    MisalignedSeries { detail: String },

    #[error("{path}:{row}: {detail}")]
    CsvRow { path: String, row: usize, detail: String },

    #[error("{path}: missing column {column:?}")]
    MissingColumn { path: String, column: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {detail}")]
    Csv { path: String, detail: String },

    #[error("config: {detail}")]
    Config { detail: String },

    #[error("scenario {scenario} failed at decade {decade}: {source}")]
    Scenario {
        scenario: String,
        decade: i32,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
