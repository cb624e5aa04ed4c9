//! Agent state and population synthesis.

use crate::domain::DwellingClass;
use crate::rng::Stream;

use super::{GatewayDistribution, Tech};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tenure {
    Owner,
    Renter,
}

/// How a technology ended up installed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstallKind {
    Chosen,
    Mandated,
}

/// A home-energy plan: the drawn gateway technology plus the full install
/// sequence. The sequence keeps solar ahead of storage so installs never
/// leave a battery without panels.
#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub gateway: Tech,
    pub sequence: Vec<Tech>,
}

/// One decision-maker per residence unit.
#[derive(Clone, Debug)]
pub struct Agent {
    pub id: u32,
    pub unit_id: String,
    pub x: f64,
    pub y: f64,
    /// Access to financial resources, normalized to [0, 1].
    pub financial_index: f64,
    /// Accumulated informational resources.
    pub info_index: f64,
    pub tenure: Tenure,
    pub dwelling_class: DwellingClass,
    /// Renters and non-single-family dwellers may only adopt thermostats.
    pub constrained: bool,
    /// Installable PV capacity of the building, kW.
    pub roof_cap_kw: f64,
    /// PV size this agent would install, kW (0 when infeasible).
    pub pv_size_kw: f64,
    /// Archetype-level annual demand before any multipliers, kWh/yr; used
    /// for benefit estimates and PV sizing.
    pub nameplate_kwh: f64,
    pub activated: bool,
    pub plan: Option<Plan>,
    /// Next sequence index to attempt.
    pub plan_pos: usize,
    pub installed: [Option<InstallKind>; 4],
    pub install_year: [i32; 4],
    pub alive: bool,
}

impl Agent {
    pub fn is_adopter(&self) -> bool {
        self.installed.iter().any(|k| k.is_some())
    }

    pub fn has(&self, tech: Tech) -> bool {
        self.installed[tech.index()].is_some()
    }

    pub fn install(&mut self, tech: Tech, year: i32, kind: InstallKind) {
        self.installed[tech.index()] = Some(kind);
        self.install_year[tech.index()] = year;
    }
}

/// Draws an agent's plan: gateway from the configured distribution, the
/// remaining feasible technologies in random order behind it.
///
/// Constrained agents get `[thermostat]` regardless of the draw. For
/// unconstrained agents the sequence is reordered, if needed, so solar
/// precedes storage; the reported gateway stays as drawn.
pub fn sample_plan(
    constrained: bool,
    distribution: &GatewayDistribution,
    stream: &mut Stream,
) -> Plan {
    if constrained {
        return Plan { gateway: Tech::SmartThermostat, sequence: vec![Tech::SmartThermostat] };
    }
    let gateway = Tech::ALL[stream.categorical(&distribution.weights())];
    let mut rest: Vec<Tech> = Tech::ALL.iter().copied().filter(|&t| t != gateway).collect();
    stream.shuffle(&mut rest);
    let mut sequence = Vec::with_capacity(4);
    sequence.push(gateway);
    sequence.extend(rest);

    let solar_pos = sequence.iter().position(|&t| t == Tech::SolarPv).unwrap();
    let storage_pos = sequence.iter().position(|&t| t == Tech::Storage).unwrap();
    if storage_pos < solar_pos {
        sequence.remove(solar_pos);
        sequence.insert(storage_pos, Tech::SolarPv);
    }
    Plan { gateway, sequence }
}

/// Gateway for a seeded 2020 adopter: drawn from the distribution,
/// constrained agents always seed a thermostat, and storage (which cannot
/// stand alone) redraws as solar.
pub fn sample_seed_tech(
    constrained: bool,
    distribution: &GatewayDistribution,
    stream: &mut Stream,
) -> Tech {
    if constrained {
        return Tech::SmartThermostat;
    }
    match Tech::ALL[stream.categorical(&distribution.weights())] {
        Tech::Storage => Tech::SolarPv,
        t => t,
    }
}
