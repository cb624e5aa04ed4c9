//! Shipped default data: the archetype catalog, redevelopment schedule,
//! archetype-assignment rules, and seeded synthetic parcel fixtures for the
//! three study neighborhoods.
//!
//! Real appraisal-district parcel data is not redistributable; the
//! synthesizer reproduces each neighborhood's published lot count, total
//! lot area, housing-unit count, and housing floor area exactly, and draws
//! everything else (lot sizes, ILRs, positions, vintages) from seeded
//! distributions. All of it is replaceable input data in documented CSV
//! schemas.

use crate::domain::{Archetype, Catalog, DwellingClass, LandUseClass, LocationClass, Parcel};
use crate::error::{Error, Result};
use crate::redevelopment::{AssignmentRule, RedevelopmentSchedule, RuleTable};
use crate::rng::Stream;
use crate::domain::Development;

/// Single-family archetypes available to the fixture mix, smallest first.
const SF_IDS: [&str; 4] = ["SF_SMALL", "SF_MED", "SF_LARGE", "SF_ESTATE"];

/// The default 12-archetype catalog: four single-family sizes, four
/// multi-family scales, two mixed-use, two commercial. Geometry follows
/// the 7.6 m bay-depth convention (double-loaded 2.4 m corridors for
/// multi-family), so footprints are unit area × units / stories.
pub fn default_catalog() -> Catalog {
    let a = |id: &str, class: DwellingClass, units: u32, area: f64, stories: u32, footprint: f64, intensity: f64| {
        Archetype {
            id: id.to_string(),
            dwelling_class: class,
            units_per_building: units,
            unit_floor_area: area,
            stories,
            footprint,
            base_intensity: intensity,
        }
    };
    use DwellingClass::*;
    Catalog::new(vec![
        a("SF_SMALL", SingleFamily, 1, 110.0, 1, 110.0, 85.0),
        a("SF_MED", SingleFamily, 1, 150.0, 1, 150.0, 82.0),
        a("SF_LARGE", SingleFamily, 1, 200.0, 2, 100.0, 80.0),
        a("SF_ESTATE", SingleFamily, 1, 280.0, 2, 140.0, 78.0),
        a("MF_PLEX4", MultiFamily, 4, 100.0, 2, 200.0, 75.0),
        a("MF_PLEX8", MultiFamily, 8, 85.0, 2, 340.0, 72.0),
        a("MF_MID24", MultiFamily, 24, 75.0, 4, 450.0, 70.0),
        a("MF_MID40", MultiFamily, 40, 65.0, 5, 520.0, 68.0),
        a("MU_MID16", MixedUse, 16, 60.0, 4, 320.0, 78.0),
        a("MU_HIGH36", MixedUse, 36, 55.0, 6, 396.0, 76.0),
        a("COM_RETAIL", Commercial, 0, 450.0, 1, 450.0, 120.0),
        a("COM_OFFICE", Commercial, 0, 600.0, 3, 600.0, 110.0),
    ])
    .expect("default catalog is valid")
}

pub const BRENTWOOD: &str = "brentwood";
pub const SOUTH_MENCHACA: &str = "south_menchaca";
pub const MONTOPOLIS: &str = "montopolis";

/// The shipped redevelopment schedule: percent of lots per decade.
pub fn default_schedule() -> RedevelopmentSchedule {
    let mut s = RedevelopmentSchedule::default();
    let decades: Vec<i32> = (0..9).map(|i| 2020 + i * 10).collect();
    let rows: [(&str, [f64; 9]); 3] = [
        (MONTOPOLIS, [0.15, 0.15, 0.06, 0.06, 0.09, 0.09, 0.10, 0.15, 0.15]),
        (BRENTWOOD, [0.06, 0.06, 0.06, 0.09, 0.09, 0.12, 0.12, 0.20, 0.20]),
        (SOUTH_MENCHACA, [0.06, 0.06, 0.06, 0.09, 0.09, 0.12, 0.12, 0.20, 0.20]),
    ];
    for (neighborhood, fractions) in rows {
        for (&decade, &f) in decades.iter().zip(fractions.iter()) {
            s.insert(neighborhood, decade, f);
        }
    }
    s
}

/// Default archetype-assignment rules.
///
/// Low density: everything trends to large single-family; large lots are
/// subdivided into multiple homes. High density: missing-middle plexes in
/// the interior, mid-rise multi-family along corridors, mixed use in
/// transit-oriented areas.
pub fn default_rules() -> RuleTable {
    let r = |dev: Development,
             land_use: LandUseClass,
             location: LocationClass,
             min: f64,
             max: f64,
             target: &str,
             subdivision: u32| AssignmentRule {
        development: dev,
        land_use_class: land_use,
        location_class: location,
        lot_area_min: min,
        lot_area_max: max,
        target_archetype_id: target.to_string(),
        subdivision,
    };
    use Development::{HighDensity as High, LowDensity as Low};
    use LandUseClass::*;
    use LocationClass::*;
    const INF: f64 = f64::INFINITY;

    let mut rules = Vec::new();
    // Low density: sprawling single-family.
    for loc in LocationClass::ALL {
        rules.push(r(Low, SmallResidential, loc, 0.0, INF, "SF_LARGE", 1));
        rules.push(r(Low, LargeResidential, loc, 0.0, 3_000.0, "SF_ESTATE", 1));
        rules.push(r(Low, LargeResidential, loc, 3_000.0, 8_000.0, "SF_ESTATE", 2));
        rules.push(r(Low, LargeResidential, loc, 8_000.0, INF, "SF_ESTATE", 4));
        rules.push(r(Low, CommercialMixed, loc, 0.0, INF, "COM_RETAIL", 1));
    }
    // High density: intensity graded by location.
    rules.push(r(High, SmallResidential, Interior, 0.0, INF, "MF_PLEX4", 1));
    rules.push(r(High, SmallResidential, Corridor, 0.0, INF, "MF_MID24", 1));
    rules.push(r(High, SmallResidential, Tod, 0.0, INF, "MU_MID16", 1));
    rules.push(r(High, LargeResidential, Interior, 0.0, INF, "MF_PLEX8", 1));
    rules.push(r(High, LargeResidential, Corridor, 0.0, INF, "MF_MID40", 1));
    rules.push(r(High, LargeResidential, Tod, 0.0, INF, "MU_HIGH36", 1));
    rules.push(r(High, CommercialMixed, Interior, 0.0, INF, "MU_MID16", 1));
    rules.push(r(High, CommercialMixed, Corridor, 0.0, INF, "MU_HIGH36", 1));
    rules.push(r(High, CommercialMixed, Tod, 0.0, INF, "MU_HIGH36", 1));
    RuleTable::new(rules)
}

/// Published 2020 characteristics a synthetic neighborhood must hit.
#[derive(Clone, Debug)]
pub struct NeighborhoodTargets {
    pub name: String,
    pub lots: usize,
    pub total_lot_area_m2: f64,
    pub housing_units: usize,
    pub housing_area_m2: f64,
    /// Planar offset keeping neighborhoods geographically separate, m.
    pub origin: (f64, f64),
}

/// The three study neighborhoods' 2020 characteristics.
pub fn study_neighborhoods() -> Vec<NeighborhoodTargets> {
    vec![
        NeighborhoodTargets {
            name: BRENTWOOD.into(),
            lots: 2_580,
            total_lot_area_m2: 3_340_000.0,
            housing_units: 4_790,
            housing_area_m2: 606_240.0,
            origin: (0.0, 0.0),
        },
        NeighborhoodTargets {
            name: SOUTH_MENCHACA.into(),
            lots: 2_378,
            total_lot_area_m2: 2_831_000.0,
            housing_units: 3_099,
            housing_area_m2: 441_520.0,
            origin: (8_000.0, 0.0),
        },
        NeighborhoodTargets {
            name: MONTOPOLIS.into(),
            lots: 2_143,
            total_lot_area_m2: 4_744_000.0,
            housing_units: 3_619,
            housing_area_m2: 494_530.0,
            origin: (16_000.0, 0.0),
        },
    ]
}

/// Commercial share of lots in the synthetic mix.
const COMMERCIAL_FRAC: f64 = 0.07;

struct Composition {
    commercial: usize,
    plex4: usize,
    plex8: usize,
    sf_counts: [usize; 4], // SF_SMALL, SF_MED, SF_LARGE, SF_ESTATE
}

/// Solves the lot mix so unit and floor-area totals land exactly.
fn solve_composition(targets: &NeighborhoodTargets) -> Result<Composition> {
    let lots = targets.lots;
    let commercial = (COMMERCIAL_FRAC * lots as f64).round() as usize;
    let residential = lots - commercial;
    if targets.housing_units < residential {
        return Err(Error::Config {
            detail: format!(
                "{}: {} units cannot fill {} residential lots",
                targets.name, targets.housing_units, residential
            ),
        });
    }
    // Units beyond one per lot come from fourplexes (+3) and 8-plexes (+7).
    let extra = targets.housing_units - residential;
    let mut plex8 = extra / 7;
    while !extra.saturating_sub(7 * plex8).is_multiple_of(3) {
        plex8 -= 1;
    }
    let plex4 = (extra - 7 * plex8) / 3;
    let sf = residential - plex4 - plex8;

    // Remaining floor area to cover with single-family homes.
    let mf_area = 400.0 * plex4 as f64 + 680.0 * plex8 as f64;
    let sf_area = targets.housing_area_m2 - mf_area;
    let diff10 = ((sf_area - 150.0 * sf as f64) / 10.0).round() as i64;

    // Counts of upgrades to SF_LARGE (+5), SF_ESTATE (+13) and downgrades
    // to SF_SMALL (-4) from an all-SF_MED baseline, in tens of m².
    let prefer_large = sf as i64 / 10;
    let prefer_small = 3 * sf as i64 / 20;
    let mut solution = None;
    'outer: for large in (0..=prefer_large).rev() {
        for small in prefer_small..prefer_small + 5 {
            let numer = diff10 - 13 * large + 4 * small;
            if numer >= 0 && numer % 5 == 0 {
                let upgrades = numer / 5;
                if upgrades + large + small <= sf as i64 {
                    solution = Some((upgrades as usize, large as usize, small as usize));
                    break 'outer;
                }
            }
        }
    }
    let (sf_large, sf_estate, sf_small) = solution.ok_or_else(|| Error::Config {
        detail: format!("{}: no single-family mix hits the floor-area total", targets.name),
    })?;
    let sf_med = sf - sf_large - sf_estate - sf_small;
    Ok(Composition {
        commercial,
        plex4,
        plex8,
        sf_counts: [sf_small, sf_med, sf_large, sf_estate],
    })
}

/// Synthesizes the 2020 parcel fixture for one neighborhood.
///
/// Lot/unit counts and floor areas match the targets exactly; the total
/// lot area matches up to float rounding. Location classes come from the
/// layout geometry: a central corridor band and a transit-oriented disc.
pub fn synthesize_neighborhood(targets: &NeighborhoodTargets, seed: u64) -> Result<Vec<Parcel>> {
    let comp = solve_composition(targets)?;
    let lots = targets.lots;
    let side = targets.total_lot_area_m2.sqrt();
    let cols = (lots as f64).sqrt().ceil() as usize;
    let cell = side / cols as f64;
    let stream = Stream::new(seed, "fixture").derive(crate::rng::label(&targets.name));

    // Positions on a jittered grid.
    let mut positions = Vec::with_capacity(lots);
    for i in 0..lots {
        let mut s = stream.derive(i as u64);
        let x = (i % cols) as f64 * cell + cell * (0.25 + 0.5 * s.next_f64());
        let y = (i / cols) as f64 * cell + cell * (0.25 + 0.5 * s.next_f64());
        positions.push((x, y));
    }

    // Location classes from geometry: TOD disc wins over the corridor band.
    let corridor_half = 0.075 * side;
    let tod_center = (0.30 * side, 0.30 * side);
    let tod_radius = 0.178 * side;
    let location_of = |&(x, y): &(f64, f64)| {
        let (dx, dy) = (x - tod_center.0, y - tod_center.1);
        if dx * dx + dy * dy <= tod_radius * tod_radius {
            LocationClass::Tod
        } else if (x - side / 2.0).abs() <= corridor_half {
            LocationClass::Corridor
        } else {
            LocationClass::Interior
        }
    };

    // Commercial lots hug the corridor; multi-family takes the next ring.
    let mut by_corridor_distance: Vec<usize> = (0..lots).collect();
    by_corridor_distance.sort_by(|&a, &b| {
        let da = (positions[a].0 - side / 2.0).abs();
        let db = (positions[b].0 - side / 2.0).abs();
        da.partial_cmp(&db).unwrap().then(a.cmp(&b))
    });
    #[derive(Clone, Copy, PartialEq)]
    enum LotKind {
        Com,
        Mf,
        Sf,
    }
    let mut kinds = vec![LotKind::Sf; lots];
    for &i in by_corridor_distance.iter().take(comp.commercial) {
        kinds[i] = LotKind::Com;
    }
    for &i in by_corridor_distance.iter().skip(comp.commercial).take(comp.plex4 + comp.plex8) {
        kinds[i] = LotKind::Mf;
    }

    // Raw lot areas by kind, rescaled so the neighborhood total is exact.
    let mut raw_areas = Vec::with_capacity(lots);
    for (i, kind) in kinds.iter().enumerate() {
        let mut s = stream.derive(0x1000_0000 + i as u64);
        let area = match kind {
            LotKind::Sf => s.lognormal(750f64.ln(), 0.25),
            LotKind::Mf => s.lognormal(1_500f64.ln(), 0.30),
            LotKind::Com => s.lognormal(2_500f64.ln(), 0.35),
        };
        raw_areas.push(area);
    }
    let scale = targets.total_lot_area_m2 / raw_areas.iter().sum::<f64>();
    for a in raw_areas.iter_mut() {
        *a *= scale;
    }

    // Single-family sizes by lot area: small homes on small lots.
    let mut sf_lots: Vec<usize> = (0..lots).filter(|&i| kinds[i] == LotKind::Sf).collect();
    sf_lots.sort_by(|&a, &b| raw_areas[a].partial_cmp(&raw_areas[b]).unwrap().then(a.cmp(&b)));
    let mut sf_archetype = vec![0usize; lots];
    {
        let mut cursor = 0;
        for (class_idx, &count) in comp.sf_counts.iter().enumerate() {
            for &lot in sf_lots.iter().skip(cursor).take(count) {
                sf_archetype[lot] = class_idx;
            }
            cursor += count;
        }
    }

    // Multi-family: 8-plexes on the larger lots.
    let mut mf_lots: Vec<usize> = (0..lots).filter(|&i| kinds[i] == LotKind::Mf).collect();
    mf_lots.sort_by(|&a, &b| raw_areas[a].partial_cmp(&raw_areas[b]).unwrap().then(a.cmp(&b)));
    let mut is_plex8 = vec![false; lots];
    for &lot in mf_lots.iter().skip(comp.plex4) {
        is_plex8[lot] = true;
    }

    let prefix: String = targets.name.chars().take(2).collect::<String>().to_uppercase();
    let mut parcels = Vec::with_capacity(lots);
    let mut com_alternate = false;
    for i in 0..lots {
        let mut s = stream.derive(0x2000_0000 + i as u64);
        let ilr = s.lognormal(0.0, 0.5);
        let year_built = 1940 + s.index(36) as i32;
        let (archetype, land_use) = match kinds[i] {
            LotKind::Sf => {
                let class_idx = sf_archetype[i];
                let land_use = if class_idx <= 1 {
                    LandUseClass::SmallResidential
                } else {
                    LandUseClass::LargeResidential
                };
                (SF_IDS[class_idx].to_string(), land_use)
            }
            LotKind::Mf => {
                let id = if is_plex8[i] { "MF_PLEX8" } else { "MF_PLEX4" };
                (id.to_string(), LandUseClass::LargeResidential)
            }
            LotKind::Com => {
                com_alternate = !com_alternate;
                let id = if com_alternate { "COM_RETAIL" } else { "COM_OFFICE" };
                (id.to_string(), LandUseClass::CommercialMixed)
            }
        };
        parcels.push(Parcel {
            id: format!("{prefix}{i:04}"),
            neighborhood: targets.name.clone(),
            land_use_class: land_use,
            location_class: location_of(&positions[i]),
            lot_area: raw_areas[i],
            ilr,
            year_built,
            current_archetype: archetype,
            buildings: 1,
            redeveloped_in: None,
            x: positions[i].0 + targets.origin.0,
            y: positions[i].1 + targets.origin.1,
        });
    }
    Ok(parcels)
}

/// All three study-neighborhood fixtures.
pub fn synthesize_all(seed: u64) -> Result<Vec<(NeighborhoodTargets, Vec<Parcel>)>> {
    study_neighborhoods()
        .into_iter()
        .map(|t| synthesize_neighborhood(&t, seed).map(|p| (t, p)))
        .collect()
}

/// Seed used for the data files shipped in the repository.
pub const SHIPPED_FIXTURE_SEED: u64 = 20_200_101;

/// Checks a parcel set against published neighborhood totals: exact lot
/// and unit counts, exact housing floor area, lot area within rounding.
pub fn validate_fixture_counts(
    parcels: &[Parcel],
    catalog: &Catalog,
    targets: &NeighborhoodTargets,
) -> Result<()> {
    if parcels.len() != targets.lots {
        return Err(Error::Config {
            detail: format!("{}: {} lots, expected {}", targets.name, parcels.len(), targets.lots),
        });
    }
    let mut units = 0usize;
    let mut housing_area = 0.0;
    let mut lot_area = 0.0;
    for p in parcels {
        let a = catalog.require(&p.current_archetype)?;
        let n = (a.units_per_building * p.buildings) as usize;
        units += n;
        housing_area += n as f64 * a.unit_floor_area;
        lot_area += p.lot_area;
    }
    if units != targets.housing_units {
        return Err(Error::Config {
            detail: format!("{}: {units} units, expected {}", targets.name, targets.housing_units),
        });
    }
    if (housing_area - targets.housing_area_m2).abs() > 1e-6 * targets.housing_area_m2 {
        return Err(Error::Config {
            detail: format!(
                "{}: housing area {housing_area}, expected {}",
                targets.name, targets.housing_area_m2
            ),
        });
    }
    if (lot_area - targets.total_lot_area_m2).abs() > 1e-6 * targets.total_lot_area_m2 {
        return Err(Error::Config {
            detail: format!(
                "{}: lot area {lot_area}, expected {}",
                targets.name, targets.total_lot_area_m2
            ),
        });
    }
    Ok(())
}

/// A deterministic ten-parcel neighborhood, single stratum, ILRs 1..=10,
/// for hand-checkable and brute-force comparisons.
pub fn micro_neighborhood() -> Vec<Parcel> {
    (1..=10)
        .map(|i| Parcel {
            id: format!("MICRO{i:02}"),
            neighborhood: "micro".into(),
            land_use_class: if i % 3 == 0 {
                LandUseClass::LargeResidential
            } else {
                LandUseClass::SmallResidential
            },
            location_class: LocationClass::Interior,
            lot_area: 700.0 + 100.0 * i as f64,
            ilr: i as f64,
            year_built: 1950 + i,
            current_archetype: if i % 4 == 0 { "MF_PLEX4".into() } else { "SF_MED".into() },
            buildings: 1,
            redeveloped_in: None,
            x: 50.0 * i as f64,
            y: 0.0,
        })
        .collect()
}

/// Schedule for the micro neighborhood: front-loaded, zero tail decades.
pub fn micro_schedule() -> RedevelopmentSchedule {
    let mut s = RedevelopmentSchedule::default();
    let fractions = [0.2, 0.2, 0.2, 0.2, 0.1, 0.1, 0.0, 0.0, 0.0];
    for (i, &f) in fractions.iter().enumerate() {
        s.insert("micro", 2020 + 10 * i as i32, f);
    }
    s
}
