//! Household technology adoption: a dual-threshold gateway model with
//! sequential co-adoption, running in annual ticks on a small-world social
//! network, under policy and economic contexts.

mod network;
mod population;
mod simulate;

pub use network::{
    average_clustering, build_network, rewire_preserving_degrees, Network, NetworkParams,
};
pub use population::{Agent, InstallKind, Plan, Tenure};
pub use simulate::{AdoptionCounts, AdoptionSim};

use serde::{Deserialize, Serialize};

use crate::domain::AdoptionSetting;

/// The four adoptable technologies, in gateway-distribution order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tech {
    #[serde(rename = "solar")]
    SolarPv,
    #[serde(rename = "hvac")]
    HighEffHvac,
    #[serde(rename = "thermostat")]
    SmartThermostat,
    Storage,
}

impl Tech {
    pub const ALL: [Tech; 4] =
        [Tech::SolarPv, Tech::HighEffHvac, Tech::SmartThermostat, Tech::Storage];

    pub fn index(self) -> usize {
        match self {
            Tech::SolarPv => 0,
            Tech::HighEffHvac => 1,
            Tech::SmartThermostat => 2,
            Tech::Storage => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Tech::SolarPv => "solar",
            Tech::HighEffHvac => "hvac",
            Tech::SmartThermostat => "thermostat",
            Tech::Storage => "storage",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "solar" | "solar_pv" => Some(Tech::SolarPv),
            "hvac" | "high_eff_hvac" => Some(Tech::HighEffHvac),
            "thermostat" | "smart_thermostat" => Some(Tech::SmartThermostat),
            "storage" => Some(Tech::Storage),
            _ => None,
        }
    }
}

impl std::fmt::Display for Tech {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Gateway-draw probabilities; need not be normalized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GatewayDistribution {
    pub solar: f64,
    pub hvac: f64,
    pub thermostat: f64,
    pub storage: f64,
}

impl Default for GatewayDistribution {
    fn default() -> Self {
        GatewayDistribution { solar: 0.35, hvac: 0.35, thermostat: 0.25, storage: 0.05 }
    }
}

impl GatewayDistribution {
    pub fn weights(&self) -> [f64; 4] {
        [self.solar, self.hvac, self.thermostat, self.storage]
    }
}

/// Behavioural and network parameters of the ABM, with shipped defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdoptionParams {
    /// Geographic candidate radius, m.
    pub phi_m: f64,
    /// Homophily: fraction of geographic candidates kept, most similar
    /// financial access first.
    pub rho: f64,
    /// Extra uniform-random links as a fraction of the homophily degree.
    pub lambda: f64,
    /// Information gained per tick per unit of neighbor adopter fraction.
    pub sigma: f64,
    /// Information level at which an agent activates.
    pub theta_info: f64,
    pub gateway_distribution: GatewayDistribution,
    pub owner_prob_sf: f64,
    pub owner_prob_mf: f64,
    /// Retail electricity rate, $/kWh.
    pub retail_rate: f64,
    /// Feed-in tariff, $/kWh, used to value savings once PV is installed.
    pub feed_in_rate: f64,
    /// Technologies required on new construction under supportive policy.
    pub mandate_set: Vec<Tech>,
    /// Fraction of the 2020 population seeded as prior adopters.
    pub initial_adopter_frac: f64,
    /// Beta-distribution shape parameters for the financial index.
    pub financial_alpha: f64,
    pub financial_beta: f64,
    /// Agent coordinate jitter around the parcel centroid, m.
    pub location_jitter_m: f64,
    /// Budget slack within which the benefit estimate decides a bid.
    pub benefit_margin: f64,
    /// Years of benefit a marginal bid must recoup its net cost within.
    pub benefit_payback_years: f64,
    /// Reference PV system size used to normalize budgets, kW.
    pub pv_reference_kw: f64,
}

impl Default for AdoptionParams {
    fn default() -> Self {
        AdoptionParams {
            // At study-neighborhood densities (1,400-10,000 units/km²) a
            // 150 m radius keeps social degrees in a plausible 10-75 range.
            phi_m: 150.0,
            rho: 0.10,
            lambda: 0.10,
            sigma: 0.30,
            theta_info: 1.0,
            gateway_distribution: GatewayDistribution::default(),
            owner_prob_sf: 0.55,
            owner_prob_mf: 0.10,
            retail_rate: 0.12,
            feed_in_rate: 0.097,
            mandate_set: vec![Tech::HighEffHvac],
            initial_adopter_frac: 0.03,
            financial_alpha: 2.0,
            financial_beta: 2.0,
            location_jitter_m: 12.0,
            benefit_margin: 0.05,
            benefit_payback_years: 10.0,
            pv_reference_kw: 5.0,
        }
    }
}

/// Sale-price trajectories: stable declines with constant variability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PriceParams {
    /// 2020 prices: $/kW for solar, $ per system otherwise.
    pub solar_per_kw: f64,
    pub hvac: f64,
    pub thermostat: f64,
    pub storage: f64,
    /// Annual fractional price decline per technology.
    pub decline_solar: f64,
    pub decline_hvac: f64,
    pub decline_thermostat: f64,
    pub decline_storage: f64,
    /// Extra annual decline under the falling-prices adoption setting.
    pub falling_extra_decline: f64,
    /// Multiplicative noise scale on each year's market price.
    pub variability: f64,
}

impl Default for PriceParams {
    fn default() -> Self {
        PriceParams {
            solar_per_kw: 2_500.0,
            hvac: 8_000.0,
            thermostat: 250.0,
            storage: 10_000.0,
            decline_solar: 0.03,
            decline_hvac: 0.005,
            decline_thermostat: 0.01,
            decline_storage: 0.04,
            falling_extra_decline: 0.03,
            variability: 0.02,
        }
    }
}

impl PriceParams {
    fn base(&self, tech: Tech) -> f64 {
        match tech {
            Tech::SolarPv => self.solar_per_kw,
            Tech::HighEffHvac => self.hvac,
            Tech::SmartThermostat => self.thermostat,
            Tech::Storage => self.storage,
        }
    }

    fn decline(&self, tech: Tech, falling: bool) -> f64 {
        let d = match tech {
            Tech::SolarPv => self.decline_solar,
            Tech::HighEffHvac => self.decline_hvac,
            Tech::SmartThermostat => self.decline_thermostat,
            Tech::Storage => self.decline_storage,
        };
        if falling {
            d + self.falling_extra_decline
        } else {
            d
        }
    }
}

/// Federal investment tax credit rate on solar PV purchases.
///
/// Supportive policy: 26% through 2022, 22% in 2023, expired from 2024.
/// Neutral policy: no credit at all.
pub fn fitc_rate(year: i32, setting: AdoptionSetting) -> f64 {
    if !setting.supportive_policy() {
        return 0.0;
    }
    match year {
        ..=2019 => 0.0,
        2020..=2022 => 0.26,
        2023 => 0.22,
        _ => 0.0,
    }
}

/// Flat purchase rebate for a technology, $.
///
/// Supportive policy keeps rebates through 2100; the solar rebate's size
/// threshold drops from 2.5 kW to 1.2 kW in 2022. Neutral policy has none.
pub fn rebate(tech: Tech, year: i32, system_size_kw: f64, setting: AdoptionSetting) -> f64 {
    if !setting.supportive_policy() || year < 2020 {
        return 0.0;
    }
    match tech {
        Tech::SolarPv => {
            let threshold = if year >= 2022 { 1.2 } else { 2.5 };
            if system_size_kw >= threshold {
                2_500.0
            } else {
                0.0
            }
        }
        Tech::HighEffHvac => 2_550.0,
        Tech::SmartThermostat => 110.0,
        Tech::Storage => 0.0,
    }
}

/// Market prices for one run: per-year draws shared by every agent, with
/// noise keyed by `(technology, year)` so paired runs see identical draws.
#[derive(Clone, Debug)]
pub struct EconomicContext {
    /// `prices[tech][year - 2020]`, $/kW for solar, $ per system otherwise.
    prices: [Vec<f64>; 4],
}

impl EconomicContext {
    pub fn new(params: &PriceParams, falling: bool, seed: u64) -> Self {
        use crate::domain::{END_YEAR, START_YEAR};
        let stream = crate::rng::Stream::new(seed, "prices");
        let mut prices: [Vec<f64>; 4] = Default::default();
        for tech in Tech::ALL {
            let base = params.base(tech);
            let decline = params.decline(tech, falling);
            let series = &mut prices[tech.index()];
            for year in START_YEAR..=END_YEAR {
                let mut s =
                    stream.derive((tech.index() as u64) << 32 | (year - START_YEAR) as u64);
                let noise = 1.0 + params.variability * s.normal();
                let trend = base * (1.0 - decline).powi(year - START_YEAR);
                series.push((trend * noise).max(0.05 * base));
            }
        }
        EconomicContext { prices }
    }

    /// Market price in `year`: $/kW for solar, $ per system otherwise.
    pub fn price(&self, tech: Tech, year: i32) -> f64 {
        let idx = (year - crate::domain::START_YEAR).clamp(0, 80) as usize;
        self.prices[tech.index()][idx]
    }

    /// Purchase price of a concrete system.
    pub fn system_price(&self, tech: Tech, year: i32, size_kw: f64) -> f64 {
        match tech {
            Tech::SolarPv => self.price(tech, year) * size_kw,
            _ => self.price(tech, year),
        }
    }

    /// Price net of the tax credit and rebate, floored at zero.
    pub fn net_cost(
        &self,
        tech: Tech,
        year: i32,
        size_kw: f64,
        setting: AdoptionSetting,
    ) -> f64 {
        let mut c = self.system_price(tech, year, size_kw);
        if tech == Tech::SolarPv {
            c *= 1.0 - fitc_rate(year, setting);
        }
        (c - rebate(tech, year, size_kw, setting)).max(0.0)
    }
}

/// Budget normalization: the costliest nominal 2020 system price (solar
/// evaluated at the reference size). A financial index of 1.0 affords it.
pub fn affordability_scale(params: &PriceParams, reference_pv_kw: f64) -> f64 {
    let candidates = [
        params.solar_per_kw * reference_pv_kw,
        params.hvac,
        params.thermostat,
        params.storage,
    ];
    candidates.into_iter().fold(0.0, f64::max)
}

/// Annual dollar value of saved energy, valued at the feed-in tariff once
/// solar is installed and at the retail rate otherwise.
pub fn evaluate_benefit(
    saved_kwh_per_year: f64,
    has_solar: bool,
    retail_rate: f64,
    feed_in_rate: f64,
) -> f64 {
    let rate = if has_solar { feed_in_rate } else { retail_rate };
    saved_kwh_per_year * rate
}
