//! The adoption engine: population synthesis, annual ticks (diffusion,
//! activation, bidding), mandates, and redevelopment-driven churn.

use std::collections::HashMap;

use crate::domain::{AdoptionSetting, Catalog, DwellingClass, Parcel, ResidenceUnit};
use crate::energy::{
    high_efficiency_multiplier, pv_annual_generation, roof_capacity, EnergyParams, TechSet,
};
use crate::error::{Error, Result};
use crate::redevelopment::DecadeOutcome;
use crate::rng::Stream;

use super::network::{build_network, wire_new_agents, Network, NetworkParams, SpatialGrid};
use super::population::{sample_plan, sample_seed_tech, Agent, InstallKind, Tenure};
use super::{
    affordability_scale, evaluate_benefit, AdoptionParams, EconomicContext, PriceParams, Tech,
};

/// Cumulative install events since 2020, split by how they happened.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AdoptionCounts {
    pub chosen: [u64; 4],
    pub mandated: [u64; 4],
}

impl AdoptionCounts {
    pub fn total(&self, tech: Tech) -> u64 {
        self.chosen[tech.index()] + self.mandated[tech.index()]
    }

    pub fn grand_total(&self) -> u64 {
        Tech::ALL.iter().map(|&t| self.total(t)).sum()
    }
}

/// One scenario's adoption state. Fully deterministic in
/// `(units, seed, params)`; named streams keep the population, network,
/// plan, and price draws independent of one another.
pub struct AdoptionSim {
    setting: AdoptionSetting,
    params: AdoptionParams,
    energy: EnergyParams,
    economy: EconomicContext,
    budget_scale: f64,
    agents: Vec<Agent>,
    unit_to_agent: HashMap<String, u32>,
    network: Network,
    grid: SpatialGrid,
    /// Number of adopter neighbors per agent, maintained incrementally.
    adopter_neighbors: Vec<u32>,
    population_stream: Stream,
    plans_stream: Stream,
    network_stream: Stream,
    counts: AdoptionCounts,
    parcel_xy: HashMap<String, (f64, f64)>,
}

impl AdoptionSim {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        units: &[ResidenceUnit],
        parcels: &[Parcel],
        catalog: &Catalog,
        params: &AdoptionParams,
        prices: &PriceParams,
        energy: &EnergyParams,
        setting: AdoptionSetting,
        seed: u64,
    ) -> Result<Self> {
        let parcel_xy: HashMap<String, (f64, f64)> =
            parcels.iter().map(|p| (p.id.clone(), (p.x, p.y))).collect();
        let falling = setting == AdoptionSetting::FallingPrices;
        let mut sim = AdoptionSim {
            setting,
            params: params.clone(),
            energy: energy.clone(),
            economy: EconomicContext::new(prices, falling, seed),
            budget_scale: affordability_scale(prices, params.pv_reference_kw),
            agents: Vec::with_capacity(units.len()),
            unit_to_agent: HashMap::with_capacity(units.len()),
            network: Network::default(),
            grid: SpatialGrid::new(params.phi_m),
            adopter_neighbors: Vec::new(),
            population_stream: Stream::new(seed, "population"),
            plans_stream: Stream::new(seed, "plans"),
            network_stream: Stream::new(seed, "network"),
            counts: AdoptionCounts::default(),
            parcel_xy,
        };

        for unit in units {
            sim.create_agent(unit, catalog, true)?;
        }

        let (network, grid) = build_network(
            &sim.agents,
            &sim.network_params(),
            &sim.network_stream,
        );
        sim.network = network;
        sim.grid = grid;

        sim.adopter_neighbors = vec![0; sim.agents.len()];
        for i in 0..sim.agents.len() {
            if sim.agents[i].is_adopter() {
                for &nb in sim.network.neighbors(i as u32) {
                    sim.adopter_neighbors[nb as usize] += 1;
                }
            }
        }
        Ok(sim)
    }

    fn network_params(&self) -> NetworkParams {
        NetworkParams { phi: self.params.phi_m, rho: self.params.rho, lambda: self.params.lambda }
    }

    /// Creates the agent for one residence unit. Seeding of prior adopters
    /// only happens for the 2020 population.
    fn create_agent(&mut self, unit: &ResidenceUnit, catalog: &Catalog, seedable: bool) -> Result<()> {
        let id = self.agents.len() as u32;
        let archetype = catalog.require(&unit.archetype_id)?;
        let &(px, py) = self.parcel_xy.get(&unit.parcel_id).ok_or_else(|| Error::Config {
            detail: format!("unit {} references unknown parcel {}", unit.id, unit.parcel_id),
        })?;

        let mut s = self.population_stream.derive(u64::from(id));
        let jitter = self.params.location_jitter_m;
        let x = px + s.uniform(-jitter, jitter);
        let y = py + s.uniform(-jitter, jitter);
        let financial_index = s.beta(self.params.financial_alpha, self.params.financial_beta);
        let owner_prob = if unit.dwelling_class == DwellingClass::SingleFamily {
            self.params.owner_prob_sf
        } else {
            self.params.owner_prob_mf
        };
        let tenure = if s.next_f64() < owner_prob { Tenure::Owner } else { Tenure::Renter };
        let constrained =
            tenure == Tenure::Renter || unit.dwelling_class != DwellingClass::SingleFamily;

        let nameplate_kwh = archetype.base_intensity * archetype.unit_floor_area;
        let roof_cap_kw = roof_capacity(archetype.footprint, &self.energy);
        let pv_size_kw = if constrained {
            0.0
        } else {
            let demand_sized =
                nameplate_kwh / (self.energy.days_constant * self.energy.s_avg_hours);
            let sized = demand_sized.max(1.0).min(roof_cap_kw);
            (sized * 10.0).round() / 10.0
        };

        let mut agent = Agent {
            id,
            unit_id: unit.id.clone(),
            x,
            y,
            financial_index,
            info_index: 0.0,
            tenure,
            dwelling_class: unit.dwelling_class,
            constrained,
            roof_cap_kw,
            pv_size_kw,
            nameplate_kwh,
            activated: false,
            plan: None,
            plan_pos: 0,
            installed: [None; 4],
            install_year: [0; 4],
            alive: true,
        };

        if seedable && self.params.initial_adopter_frac > 0.0 {
            let u = s.next_f64();
            if u < self.params.initial_adopter_frac {
                let mut plan_stream = self.plans_stream.derive(u64::from(id));
                let seed_tech = sample_seed_tech(
                    constrained,
                    &self.params.gateway_distribution,
                    &mut plan_stream,
                );
                let mut plan =
                    sample_plan(constrained, &self.params.gateway_distribution, &mut plan_stream);
                // The pre-2020 install becomes the head of the sequence.
                if let Some(pos) = plan.sequence.iter().position(|&t| t == seed_tech) {
                    plan.sequence.remove(pos);
                }
                plan.sequence.insert(0, seed_tech);
                plan.gateway = seed_tech;
                agent.activated = true;
                agent.plan = Some(plan);
                agent.plan_pos = 1;
                agent.install(seed_tech, crate::domain::START_YEAR, InstallKind::Chosen);
                self.counts.chosen[seed_tech.index()] += 1;
            }
        }

        self.unit_to_agent.insert(unit.id.clone(), id);
        self.agents.push(agent);
        Ok(())
    }

    /// Marks an agent as a fresh adopter in its neighbors' tallies.
    fn propagate_adopter(&mut self, id: u32) {
        for &nb in self.network.neighbors(id) {
            self.adopter_neighbors[nb as usize] += 1;
        }
    }

    fn estimated_savings_kwh(&self, agent: &Agent, tech: Tech, year: i32) -> f64 {
        match tech {
            Tech::SmartThermostat => {
                (1.0 - self.energy.thermostat_multiplier) * agent.nameplate_kwh
            }
            Tech::HighEffHvac => (1.0 - high_efficiency_multiplier(year)) * agent.nameplate_kwh,
            Tech::SolarPv => {
                let gen = pv_annual_generation(
                    agent.pv_size_kw,
                    self.energy.s_avg_hours,
                    self.energy.days_constant,
                )
                .unwrap_or(0.0);
                gen.min(agent.nameplate_kwh)
            }
            Tech::Storage => 0.10 * agent.nameplate_kwh,
        }
    }

    /// One annual step: information diffusion, threshold activation, and
    /// one bid per activated agent on its next plan item.
    pub fn tick(&mut self, year: i32) {
        // 1. Diffusion from the adopter fraction among social neighbors.
        for i in 0..self.agents.len() {
            if !self.agents[i].alive {
                continue;
            }
            let degree = self.network.degree(i as u32);
            if degree > 0 {
                let frac = f64::from(self.adopter_neighbors[i]) / degree as f64;
                self.agents[i].info_index += self.params.sigma * frac;
            }
        }

        // 2. Activation: crossing the informational threshold fixes a plan.
        for i in 0..self.agents.len() {
            let agent = &mut self.agents[i];
            if agent.alive && !agent.activated && agent.info_index >= self.params.theta_info {
                agent.activated = true;
                let mut plan_stream = self.plans_stream.derive(u64::from(agent.id));
                agent.plan = Some(sample_plan(
                    agent.constrained,
                    &self.params.gateway_distribution,
                    &mut plan_stream,
                ));
                agent.plan_pos = 0;
            }
        }

        // 3. Bidding, in plan order only.
        for i in 0..self.agents.len() {
            if !self.agents[i].alive || !self.agents[i].activated {
                continue;
            }
            let exhausted = match &self.agents[i].plan {
                Some(p) => self.agents[i].plan_pos >= p.sequence.len(),
                None => true,
            };
            if exhausted {
                continue;
            }
            let Some(plan) = self.agents[i].plan.clone() else { continue };

            // Items already covered (e.g. by mandate) cost nothing.
            while self.agents[i].plan_pos < plan.sequence.len()
                && self.agents[i].has(plan.sequence[self.agents[i].plan_pos])
            {
                self.agents[i].plan_pos += 1;
            }
            let pos = self.agents[i].plan_pos;
            if pos >= plan.sequence.len() {
                continue;
            }
            let tech = plan.sequence[pos];

            let (feasible, size) = match tech {
                Tech::SolarPv => (self.agents[i].pv_size_kw > 0.0, self.agents[i].pv_size_kw),
                Tech::Storage => (self.agents[i].has(Tech::SolarPv), 0.0),
                _ => (true, 0.0),
            };
            if !feasible {
                self.agents[i].plan_pos += 1;
                continue;
            }

            let net_cost = self.economy.net_cost(tech, year, size, self.setting);
            let ratio = net_cost / self.budget_scale;
            let fi = self.agents[i].financial_index;
            let accepted = if fi >= ratio {
                true
            } else if fi >= (1.0 - self.params.benefit_margin) * ratio {
                // Marginal budget: the annual benefit decides the bid.
                let saved = self.estimated_savings_kwh(&self.agents[i], tech, year);
                let benefit = evaluate_benefit(
                    saved,
                    self.agents[i].has(Tech::SolarPv),
                    self.params.retail_rate,
                    self.params.feed_in_rate,
                );
                benefit * self.params.benefit_payback_years >= net_cost
            } else {
                false
            };

            if accepted {
                let first_install = !self.agents[i].is_adopter();
                self.agents[i].install(tech, year, InstallKind::Chosen);
                self.agents[i].plan_pos += 1;
                self.counts.chosen[tech.index()] += 1;
                if first_install {
                    self.propagate_adopter(i as u32);
                }
            }
        }
    }

    /// Installs the mandate set on new construction under supportive
    /// policy. Mandated items never touch plans or budgets.
    pub fn apply_mandates(&mut self, new_units: &[ResidenceUnit], year: i32) {
        if !self.setting.supportive_policy() {
            return;
        }
        let mandates = self.params.mandate_set.clone();
        for unit in new_units {
            let Some(&id) = self.unit_to_agent.get(&unit.id) else { continue };
            for &tech in &mandates {
                if !self.agents[id as usize].has(tech) {
                    let first_install = !self.agents[id as usize].is_adopter();
                    self.agents[id as usize].install(tech, year, InstallKind::Mandated);
                    self.counts.mandated[tech.index()] += 1;
                    if first_install {
                        self.propagate_adopter(id);
                    }
                }
            }
        }
    }

    /// Redevelopment churn: agents on redeveloped parcels leave, one new
    /// agent arrives per new unit and is wired into the network locally.
    pub fn sync(&mut self, outcome: &DecadeOutcome, catalog: &Catalog) -> Result<()> {
        for unit_id in &outcome.removed_unit_ids {
            let Some(id) = self.unit_to_agent.remove(unit_id) else { continue };
            let idx = id as usize;
            let was_adopter = self.agents[idx].is_adopter();
            self.agents[idx].alive = false;
            let (x, y) = (self.agents[idx].x, self.agents[idx].y);
            self.grid.remove(id, x, y);
            let neighbors = self.network.remove_agent(id);
            if was_adopter {
                for nb in neighbors {
                    self.adopter_neighbors[nb as usize] -= 1;
                }
            }
            self.adopter_neighbors[idx] = 0;
        }

        let first_new = self.agents.len() as u32;
        for unit in &outcome.new_units {
            self.create_agent(unit, catalog, false)?;
        }
        let new_ids: Vec<u32> = (first_new..self.agents.len() as u32).collect();
        self.adopter_neighbors.resize(self.agents.len(), 0);

        let net_params = self.network_params();
        let added = wire_new_agents(
            &mut self.network,
            &mut self.grid,
            &self.agents,
            &new_ids,
            &net_params,
            &self.network_stream,
        );
        for (a, b) in added {
            if self.agents[a as usize].is_adopter() {
                self.adopter_neighbors[b as usize] += 1;
            }
            if self.agents[b as usize].is_adopter() {
                self.adopter_neighbors[a as usize] += 1;
            }
        }
        Ok(())
    }

    /// Installed technologies of a unit's decision-maker, plus the year
    /// high-efficiency HVAC arrived, for demand accounting.
    pub fn tech_for_unit(&self, unit_id: &str) -> (TechSet, Option<i32>) {
        let Some(&id) = self.unit_to_agent.get(unit_id) else {
            return (TechSet::default(), None);
        };
        let agent = &self.agents[id as usize];
        let techs = TechSet {
            high_eff_hvac: agent.has(Tech::HighEffHvac),
            smart_thermostat: agent.has(Tech::SmartThermostat),
            solar_pv_kw: agent.has(Tech::SolarPv).then_some(agent.pv_size_kw),
            storage: agent.has(Tech::Storage),
        };
        let hvac_year =
            agent.has(Tech::HighEffHvac).then_some(agent.install_year[Tech::HighEffHvac.index()]);
        (techs, hvac_year)
    }

    pub fn counts(&self) -> AdoptionCounts {
        self.counts
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn alive_count(&self) -> usize {
        self.agents.iter().filter(|a| a.alive).count()
    }

    #[cfg(test)]
    fn agent_mut(&mut self, id: u32) -> &mut Agent {
        &mut self.agents[id as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Archetype, LandUseClass, LocationClass};

    fn catalog() -> Catalog {
        Catalog::new(vec![
            Archetype {
                id: "SF".into(),
                dwelling_class: DwellingClass::SingleFamily,
                units_per_building: 1,
                unit_floor_area: 150.0,
                stories: 1,
                footprint: 150.0,
                base_intensity: 80.0,
            },
            Archetype {
                id: "MF4".into(),
                dwelling_class: DwellingClass::MultiFamily,
                units_per_building: 4,
                unit_floor_area: 90.0,
                stories: 2,
                footprint: 180.0,
                base_intensity: 70.0,
            },
        ])
        .unwrap()
    }

    fn grid_parcels(n: usize) -> Vec<Parcel> {
        (0..n)
            .map(|i| Parcel {
                id: format!("P{i:04}"),
                neighborhood: "toy".into(),
                land_use_class: LandUseClass::SmallResidential,
                location_class: LocationClass::Interior,
                lot_area: 800.0,
                ilr: 1.0,
                year_built: 1960,
                current_archetype: "SF".into(),
                buildings: 1,
                redeveloped_in: None,
                x: (i % 40) as f64 * 40.0,
                y: (i / 40) as f64 * 40.0,
            })
            .collect()
    }

    fn sf_units(parcels: &[Parcel]) -> Vec<ResidenceUnit> {
        parcels
            .iter()
            .map(|p| ResidenceUnit {
                id: format!("{}:b0:u0", p.id),
                parcel_id: p.id.clone(),
                archetype_id: "SF".into(),
                dwelling_class: DwellingClass::SingleFamily,
                vintage: p.year_built,
            })
            .collect()
    }

    fn sim_with(
        n: usize,
        setting: AdoptionSetting,
        seed: u64,
        tweak: impl FnOnce(&mut AdoptionParams),
    ) -> AdoptionSim {
        let parcels = grid_parcels(n);
        let units = sf_units(&parcels);
        let mut params = AdoptionParams { phi_m: 100.0, ..Default::default() };
        tweak(&mut params);
        AdoptionSim::new(
            &units,
            &parcels,
            &catalog(),
            &params,
            &PriceParams::default(),
            &EnergyParams::default(),
            setting,
            seed,
        )
        .unwrap()
    }

    #[test]
    fn population_is_seed_deterministic() {
        let make = |seed| {
            let mut sim = sim_with(1_000, AdoptionSetting::Neutral, seed, |_| {});
            for year in 2021..=2040 {
                sim.tick(year);
            }
            sim
        };
        let a = make(42);
        let b = make(42);
        assert_eq!(a.agents.len(), b.agents.len());
        for (x, y) in a.agents.iter().zip(b.agents.iter()) {
            assert_eq!(x.financial_index, y.financial_index);
            assert_eq!(x.x, y.x);
            assert_eq!(x.installed, y.installed);
            assert_eq!(x.plan, y.plan);
        }
        assert_eq!(a.counts(), b.counts());

        let c = make(43);
        assert_ne!(
            a.agents.iter().map(|ag| ag.financial_index).collect::<Vec<_>>(),
            c.agents.iter().map(|ag| ag.financial_index).collect::<Vec<_>>()
        );
    }

    #[test]
    fn multifamily_agents_never_plan_beyond_thermostats() {
        let parcels = grid_parcels(100);
        let units: Vec<ResidenceUnit> = parcels
            .iter()
            .flat_map(|p| {
                (0..4).map(|u| ResidenceUnit {
                    id: format!("{}:b0:u{u}", p.id),
                    parcel_id: p.id.clone(),
                    archetype_id: "MF4".into(),
                    dwelling_class: DwellingClass::MultiFamily,
                    vintage: p.year_built,
                })
            })
            .collect();
        let params = AdoptionParams { phi_m: 100.0, ..Default::default() };
        let mut sim = AdoptionSim::new(
            &units,
            &parcels,
            &catalog(),
            &params,
            &PriceParams::default(),
            &EnergyParams::default(),
            AdoptionSetting::Supportive,
            42,
        )
        .unwrap();
        for year in 2021..=2060 {
            sim.tick(year);
        }
        for agent in sim.agents() {
            assert!(agent.constrained);
            if let Some(plan) = &agent.plan {
                assert_eq!(plan.sequence, vec![Tech::SmartThermostat]);
            }
            assert!(!agent.has(Tech::SolarPv));
            assert!(!agent.has(Tech::Storage));
            assert!(!agent.has(Tech::HighEffHvac));
        }
    }

    #[test]
    fn no_adopters_means_no_information() {
        let mut sim = sim_with(200, AdoptionSetting::Neutral, 42, |p| {
            p.initial_adopter_frac = 0.0;
        });
        sim.tick(2021);
        assert!(sim.agents().iter().all(|a| a.info_index == 0.0));
        assert_eq!(sim.counts().grand_total(), 0);
    }

    #[test]
    fn activated_wealthy_agent_adopts_its_gateway() {
        let mut sim = sim_with(9, AdoptionSetting::Supportive, 42, |p| {
            p.initial_adopter_frac = 0.0;
        });
        sim.agent_mut(4).info_index = 10.0;
        sim.agent_mut(4).financial_index = 1.0;
        sim.tick(2021);
        let agent = &sim.agents()[4];
        assert!(agent.activated);
        let plan = agent.plan.as_ref().unwrap();
        assert!(agent.has(plan.sequence[0]), "first plan item installed");
        assert_eq!(sim.counts().grand_total(), 1);
    }

    #[test]
    fn installs_follow_plan_order() {
        let mut sim = sim_with(400, AdoptionSetting::FallingPrices, 7, |p| {
            p.initial_adopter_frac = 0.10;
        });
        for year in 2021..=2100 {
            sim.tick(year);
        }
        assert!(sim.counts().grand_total() > 0);
        for agent in sim.agents() {
            let Some(plan) = &agent.plan else { continue };
            // No installed item may follow an uninstalled chosen one.
            let mut seen_gap = false;
            for &t in &plan.sequence {
                match agent.installed[t.index()] {
                    Some(InstallKind::Chosen) => assert!(!seen_gap, "plan order violated"),
                    Some(InstallKind::Mandated) => {}
                    None => seen_gap = true,
                }
            }
            // Storage never without solar.
            if agent.has(Tech::Storage) {
                assert!(agent.has(Tech::SolarPv));
            }
            if let Some(kw) = agent.has(Tech::SolarPv).then_some(agent.pv_size_kw) {
                assert!(kw <= agent.roof_cap_kw + 1e-9);
            }
        }
    }

    #[test]
    fn mandates_hit_every_new_unit_under_supportive_policy() {
        let parcels = grid_parcels(60);
        let units = sf_units(&parcels);
        let new_units: Vec<ResidenceUnit> = units[..50].to_vec();
        for (setting, expected) in
            [(AdoptionSetting::Supportive, 50), (AdoptionSetting::Neutral, 0)]
        {
            let mut sim = AdoptionSim::new(
                &units,
                &parcels,
                &catalog(),
                &AdoptionParams { initial_adopter_frac: 0.0, ..Default::default() },
                &PriceParams::default(),
                &EnergyParams::default(),
                setting,
                42,
            )
            .unwrap();
            sim.apply_mandates(&new_units, 2030);
            assert_eq!(sim.counts().mandated[Tech::HighEffHvac.index()], expected);
            assert_eq!(sim.counts().chosen, [0; 4]);
        }
    }

    #[test]
    fn mandates_do_not_touch_plans() {
        // Paired runs differing only in mandates sample identical plans.
        let run = |mandates: Vec<Tech>| {
            let parcels = grid_parcels(150);
            let units = sf_units(&parcels);
            let mut sim = AdoptionSim::new(
                &units,
                &parcels,
                &catalog(),
                &AdoptionParams { phi_m: 100.0, mandate_set: mandates, ..Default::default() },
                &PriceParams::default(),
                &EnergyParams::default(),
                AdoptionSetting::Supportive,
                11,
            )
            .unwrap();
            sim.apply_mandates(&units.to_vec(), 2020);
            for year in 2021..=2050 {
                sim.tick(year);
            }
            sim.agents().iter().map(|a| a.plan.clone()).collect::<Vec<_>>()
        };
        let with = run(vec![Tech::HighEffHvac]);
        let without = run(vec![]);
        for (a, b) in with.iter().zip(without.iter()) {
            match (a, b) {
                (Some(pa), Some(pb)) => assert_eq!(pa.sequence, pb.sequence),
                (None, None) => {}
                _ => {} // activation timing may differ; plans that exist match
            }
        }
    }

    #[test]
    fn sync_keeps_agent_count_equal_to_units() {
        let parcels = grid_parcels(50);
        let units = sf_units(&parcels);
        let mut sim = sim_with(50, AdoptionSetting::Neutral, 42, |_| {});
        assert_eq!(sim.alive_count(), units.len());

        // Parcel P0000 turns into a fourplex: 1 agent out, 4 in.
        let outcome = DecadeOutcome {
            decade: 2030,
            redeveloped_parcels: vec!["P0000".into()],
            removed_unit_ids: vec!["P0000:b0:u0".into()],
            new_units: (0..4)
                .map(|u| ResidenceUnit {
                    id: format!("P0000:b0:u{u}"),
                    parcel_id: "P0000".into(),
                    archetype_id: "MF4".into(),
                    dwelling_class: DwellingClass::MultiFamily,
                    vintage: 2030,
                })
                .collect(),
        };
        sim.sync(&outcome, &catalog()).unwrap();
        assert_eq!(sim.alive_count(), 53);
        for unit in &outcome.new_units {
            let (_, id) = sim
                .unit_to_agent
                .get_key_value(&unit.id)
                .expect("new unit has an agent");
            assert!(sim.agents()[*id as usize].constrained);
        }

        // An empty outcome is a no-op.
        let before = sim.alive_count();
        sim.sync(&DecadeOutcome::default(), &catalog()).unwrap();
        assert_eq!(sim.alive_count(), before);
    }

    #[test]
    fn policy_monotonicity_under_paired_seeds() {
        let run = |setting| {
            let mut sim = sim_with(600, setting, 42, |_| {});
            let mut per_decade = Vec::new();
            for year in 2021..=2060 {
                sim.tick(year);
                if (year - 2020) % 10 == 0 {
                    per_decade.push(sim.counts());
                }
            }
            per_decade
        };
        let neutral = run(AdoptionSetting::Neutral);
        let supportive = run(AdoptionSetting::Supportive);
        let falling = run(AdoptionSetting::FallingPrices);
        for ((n, s), f) in neutral.iter().zip(&supportive).zip(&falling) {
            for tech in Tech::ALL {
                assert!(s.total(tech) >= n.total(tech), "supportive >= neutral for {tech}");
                assert!(f.total(tech) >= s.total(tech), "falling >= supportive for {tech}");
            }
        }
    }
}
