//! Property tests for the engine's structural invariants.

use proptest::prelude::*;

use pathways_core::adoption::{affordability_scale, EconomicContext, PriceParams, Tech};
use pathways_core::config::RunConfig;
use pathways_core::domain::{occupants, AdoptionSetting, Climate, GridPathwayId};
use pathways_core::energy::{
    climate_multiplier, effective_hvac_multiplier, net_grid_demand, pv_annual_generation, TechSet,
};
use pathways_core::grid::carbon_intensity;
use pathways_core::pathways::{premium_for_sprawl, PathwayPoint};
use pathways_core::redevelopment::{largest_remainder, round_half_up};

proptest! {
    #[test]
    fn occupants_is_additive(a in 0u32..5_000_000, b in 0u32..5_000_000) {
        let (a, b) = (f64::from(a), f64::from(b));
        prop_assert_eq!(occupants(a) + occupants(b), occupants(a + b));
    }

    #[test]
    fn grid_pathways_stay_ordered(year in 2020..=2100i32) {
        let none = carbon_intensity(GridPathwayId::None, year).unwrap();
        let moderate = carbon_intensity(GridPathwayId::Moderate, year).unwrap();
        let rapid = carbon_intensity(GridPathwayId::Rapid, year).unwrap();
        prop_assert!(rapid <= moderate && moderate <= none);
        prop_assert!(rapid >= 48.0 && none == 430.0);
    }

    #[test]
    fn climate_multipliers_stay_ordered(decade_idx in 0usize..9) {
        let decade = 2020 + 10 * decade_idx as i32;
        let tmy = climate_multiplier(Climate::Tmy, decade);
        let b1 = climate_multiplier(Climate::B1, decade);
        let a1b = climate_multiplier(Climate::A1b, decade);
        let a2 = climate_multiplier(Climate::A2, decade);
        prop_assert_eq!(tmy, 1.0);
        prop_assert!(b1 >= 1.0);
        if decade >= 2050 {
            prop_assert!(tmy <= b1 && b1 <= a1b && a1b <= a2);
        }
    }

    #[test]
    fn hvac_multiplier_stays_in_bounds(
        vintage in 1900..=2100i32,
        offset in 0..=80i32,
        adoption_offset in proptest::option::of(0..=80i32),
    ) {
        let year = (vintage.max(2020) + offset).min(2100);
        let adoption = adoption_offset.map(|o| 2020 + o).filter(|&a| a <= year);
        let m = effective_hvac_multiplier(vintage.min(year), year, adoption);
        prop_assert!(m > 0.66 && m <= 1.0, "multiplier {} out of bounds", m);
    }

    #[test]
    fn pv_generation_is_bilinear(p in 0.0..50.0f64, s in 0.1..12.0f64, k in 0.1..4.0f64) {
        let base = pv_annual_generation(p, s, 356.0).unwrap();
        let scaled_p = pv_annual_generation(p * k, s, 356.0).unwrap();
        let scaled_s = pv_annual_generation(p, s * k, 356.0).unwrap();
        prop_assert!((scaled_p - base * k).abs() < 1e-6 * base.max(1.0));
        prop_assert!((scaled_s - base * k).abs() < 1e-6 * base.max(1.0));
    }

    #[test]
    fn netting_never_exceeds_gross(
        gross in 0.0..1e6f64,
        pv in 0.0..1e6f64,
        hvac in 0.6676..=1.0f64,
        thermostat in 0.9..=1.0f64,
        flags in 0u8..16,
    ) {
        let techs = TechSet {
            high_eff_hvac: flags & 1 != 0,
            smart_thermostat: flags & 2 != 0,
            solar_pv_kw: (flags & 4 != 0).then_some(5.0),
            storage: flags & 12 == 12, // storage only alongside solar
        };
        let pv_gen = if techs.solar_pv_kw.is_some() { pv } else { 0.0 };
        let net = net_grid_demand(gross, &techs, pv_gen, hvac, thermostat);
        prop_assert!(net >= 0.0);
        prop_assert!(net <= gross + 1e-9);
        if techs.is_empty() && pv_gen == 0.0 {
            prop_assert_eq!(net, gross);
        }
        if techs.storage {
            let post = gross
                * if techs.high_eff_hvac { hvac } else { 1.0 }
                * if techs.smart_thermostat { thermostat } else { 1.0 };
            prop_assert!(net <= 0.6 * post + 1e-9);
        }
    }

    #[test]
    fn apportionment_conserves_and_bounds(
        total in 0usize..500,
        sizes in proptest::collection::vec(0usize..400, 1..6),
    ) {
        let quotas = largest_remainder(total, &sizes);
        prop_assert_eq!(quotas.len(), sizes.len());
        let whole: usize = sizes.iter().sum();
        if whole > 0 {
            prop_assert_eq!(quotas.iter().sum::<usize>(), total);
            for (&q, &s) in quotas.iter().zip(&sizes) {
                // A stratum's quota stays within one seat of its exact share.
                let share = total as f64 * s as f64 / whole as f64;
                prop_assert!((q as f64 - share).abs() < 1.0 + 1e-9);
            }
        } else {
            prop_assert_eq!(quotas.iter().sum::<usize>(), 0);
        }
    }

    #[test]
    fn rounding_is_half_up(x in 0.0..1e6f64) {
        let r = round_half_up(x);
        prop_assert!((x + 0.5 + 1e-6) >= r as f64 && r as f64 >= x - 0.5);
    }

    #[test]
    fn premium_scales_with_demand(
        low_e in 1.0..1e5f64,
        high_e in 1.0..1e5f64,
        units_low in 1u64..10_000,
        units_high in 1u64..50_000,
        k in 0.01..100.0f64,
    ) {
        let mk = |e: f64, u: u64| {
            vec![PathwayPoint::from_totals("n", 2020, e * 1e6 / 430.0, e, u, 1000.0)]
        };
        let base = premium_for_sprawl(&mk(low_e, units_low), &mk(high_e, units_high)).unwrap();
        let scaled =
            premium_for_sprawl(&mk(low_e * k, units_low), &mk(high_e * k, units_high)).unwrap();
        let expected = base[0].premium_tco2e * k;
        prop_assert!((scaled[0].premium_tco2e - expected).abs() <= 1e-9 * expected.abs().max(1.0));
    }

    #[test]
    fn supportive_net_cost_never_exceeds_neutral(
        year in 2020..=2100i32,
        size in 0.5..20.0f64,
        seed in 0u64..50,
    ) {
        let economy = EconomicContext::new(&PriceParams::default(), false, seed);
        for tech in Tech::ALL {
            let sup = economy.net_cost(tech, year, size, AdoptionSetting::Supportive);
            let neu = economy.net_cost(tech, year, size, AdoptionSetting::Neutral);
            prop_assert!(sup <= neu + 1e-9);
            prop_assert!(sup >= 0.0);
        }
    }

    #[test]
    fn config_digest_survives_round_trip(seed in 0u64..u64::MAX, jobs in 1usize..64) {
        let config = RunConfig { seed, jobs: Some(jobs), ..Default::default() };
        let text = config.to_toml_string().unwrap();
        let reparsed = RunConfig::from_toml_str(&text).unwrap();
        prop_assert_eq!(config.digest(), reparsed.digest());
    }
}

#[test]
fn affordability_scale_is_max_of_2020_prices() {
    let params = PriceParams::default();
    let scale = affordability_scale(&params, 5.0);
    assert!(scale >= params.hvac && scale >= params.storage && scale >= params.thermostat);
    assert_eq!(scale, params.solar_per_kw * 5.0);
}
