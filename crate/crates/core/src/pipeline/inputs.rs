use crate::demand::{read_skims, read_zones, SkimSet, ZoneAttributes};
use crate::netgraph::{apply_scenario, read_network, read_scenario, validate_network, Network, Phase, ScenarioDelta};
use crate::Error;

use super::RunConfig;

/// Everything a run reads from disk, validated.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub network: Network,
    /// One entry per network zone, in zone order.
    pub zones: Vec<ZoneAttributes>,
    pub skims: SkimSet,
    pub scenarios: Vec<ScenarioDelta>,
}

/// Reads and validates every input named by `config`.
///
/// Scenarios are applied to the network in both phases here, so a broken scenario
/// stops the run before any computation starts.
pub fn load_inputs(config: &RunConfig) -> Result<Inputs, Error> {
    let net_path = config.resolve(&config.paths.network);
    let network = read_network(&net_path)?;
    let defects = validate_network(&network);
    if !defects.is_empty() {
        return Err(Error::InvalidNetwork { path: Some(net_path), defects });
    }

    let zones_path = config.resolve(&config.paths.zones);
    let zones = read_zones(&zones_path)?;
    if zones.len() != network.zone_count() {
        return Err(Error::input(
            &zones_path,
            format!("{} zone rows, the network has {} zones", zones.len(), network.zone_count()),
        ));
    }

    let skims_path = config.resolve(&config.paths.skims);
    let skims = read_skims(&skims_path, &config.resolve(&config.paths.ownership), network.zone_ids())?;
    if let Err(msg) = skims.check() {
        return Err(Error::input(&skims_path, msg));
    }
    if let Some((i, j, v)) = skims.car_time.iter().find(|&(_, _, v)| v <= 0.0) {
        let ids = network.zone_ids();
        return Err(Error::input(
            &skims_path,
            format!("TIMCAR {} -> {} = {v}: car time is the distribution impedance and must be > 0", ids[i], ids[j]),
        ));
    }

    let mut scenarios: Vec<ScenarioDelta> = Vec::new();
    for p in &config.paths.scenarios {
        let path = config.resolve(p);
        let delta = read_scenario(&path)?;
        if scenarios.iter().any(|s| s.name == delta.name) {
            return Err(Error::input(&path, format!("duplicate scenario name `{}`", delta.name)));
        }
        for phase in [Phase::Construction, Phase::Operation] {
            let net = apply_scenario(&network, &delta, phase).map_err(|source| Error::Scenario {
                name: delta.name.clone(),
                source,
            })?;
            let defects = validate_network(&net);
            if !defects.is_empty() {
                return Err(Error::InvalidNetwork { path: Some(path), defects });
            }
        }
        scenarios.push(delta);
    }
    Ok(Inputs { network, zones, skims, scenarios })
}

impl Inputs {
    /// Keeps only the named scenarios, in the order given.
    pub fn select_scenarios(&mut self, names: &[String]) -> Result<(), Error> {
        if names.is_empty() {
            return Ok(());
        }
        let mut chosen = Vec::with_capacity(names.len());
        for name in names {
            let s = self
                .scenarios
                .iter()
                .find(|s| &s.name == name)
                .ok_or_else(|| Error::Config(format!("no scenario named `{name}`")))?;
            chosen.push(s.clone());
        }
        self.scenarios = chosen;
        Ok(())
    }
}
