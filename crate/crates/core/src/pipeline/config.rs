use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::appraise::{EmissionFactors, FuelModel, PollutantPrices, PriceTableReading, UnitValues};
use crate::assign::AssignmentOptions;
use crate::demand::{default_deviation_params, ChoiceModel, DemandModels, Purpose, TripModels};
use crate::Error;

/// Input and output locations. Relative paths are resolved against the directory
/// holding the configuration file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub network: PathBuf,
    pub zones: PathBuf,
    pub skims: PathBuf,
    pub ownership: PathBuf,
    #[serde(default)]
    pub scenarios: Vec<PathBuf>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// Year-over-year multipliers. Only population and car ownership grow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Growth {
    pub population: f64,
    pub car_ownership: f64,
    /// Applied to the exogenous transit in-vehicle and out-of-vehicle times.
    pub transit_time: f64,
}

impl Default for Growth {
    fn default() -> Self {
        Self { population: 1.02, car_ownership: 1.03, transit_time: 1.0 }
    }
}

/// One assignment period. The assigned hour carries `demand_share` of daily PCE
/// trips and represents `hours_per_year` hours of the year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Period {
    pub name: String,
    pub demand_share: f64,
    pub hours_per_year: f64,
}

pub fn default_periods() -> Vec<Period> {
    // 3 h + 3 h of peak and 18 h of off-peak, 365 days.
    vec![
        Period { name: "am_peak".into(), demand_share: 0.07, hours_per_year: 1095.0 },
        Period { name: "pm_peak".into(), demand_share: 0.07, hours_per_year: 1095.0 },
        Period { name: "off_peak".into(), demand_share: 0.032222, hours_per_year: 6570.0 },
    ]
}

/// Optional mode-choice/assignment fixed point with MSA-averaged demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Feedback {
    pub enabled: bool,
    pub max_iterations: usize,
}

impl Default for Feedback {
    fn default() -> Self {
        Self { enabled: false, max_iterations: 5 }
    }
}

/// Optional diversion of private-mode trips to bus under a uniform cost change.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Diversion {
    pub enabled: bool,
    pub delta_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip)]
    pub base_dir: PathBuf,
    pub paths: Paths,
    #[serde(default)]
    pub growth: Growth,
    #[serde(default = "default_periods")]
    pub periods: Vec<Period>,
    /// Unit prices, discount rate, horizon and currency label.
    #[serde(default)]
    pub appraisal: UnitValues,
    /// When set, replaces `appraisal.pollutant_price` by the chosen table reading.
    #[serde(default)]
    pub pollutant_price_reading: Option<PriceTableReading>,
    #[serde(default = "default_perturbation")]
    pub sensitivity_perturbation: f64,
    #[serde(default)]
    pub demand: DemandModels,
    #[serde(default)]
    pub assignment: AssignmentOptions,
    #[serde(default)]
    pub fuel: FuelModel,
    #[serde(default)]
    pub emission: EmissionFactors,
    #[serde(default)]
    pub feedback: Feedback,
    #[serde(default)]
    pub diversion: Diversion,
}

fn default_perturbation() -> f64 {
    0.1
}

impl RunConfig {
    /// A configuration with every model default and the given input files.
    pub fn with_paths(paths: Paths) -> Self {
        Self {
            base_dir: PathBuf::new(),
            paths,
            growth: Growth::default(),
            periods: default_periods(),
            appraisal: UnitValues::default(),
            pollutant_price_reading: None,
            sensitivity_perturbation: default_perturbation(),
            demand: DemandModels::default(),
            assignment: AssignmentOptions::default(),
            fuel: FuelModel::default(),
            emission: EmissionFactors::default(),
            feedback: Feedback::default(),
            diversion: Diversion::default(),
        }
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, Error> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.fill_model_gaps();
        if let Some(reading) = cfg.pollutant_price_reading {
            cfg.appraisal.pollutant_price = PollutantPrices::from_table(reading);
        }
        cfg.check()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let dir = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, dir).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable as TOML")
    }

    /// Purposes or modes left out of an override keep their default coefficients.
    fn fill_model_gaps(&mut self) {
        let defaults = TripModels::default();
        for p in Purpose::ALL {
            self.demand.trips.production.entry(p).or_insert_with(|| defaults.production[&p].clone());
            self.demand.trips.attraction.entry(p).or_insert_with(|| defaults.attraction[&p].clone());
            self.demand.choice.entry(p).or_insert_with(|| ChoiceModel::default_for(p));
        }
        for (mode, params) in default_deviation_params() {
            self.demand.deviation.entry(mode).or_insert(params);
        }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.paths.output)
    }

    pub fn horizon(&self) -> u32 {
        self.appraisal.horizon
    }

    pub fn check(&self) -> Result<(), Error> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.appraisal.horizon < 1 {
            return bad("horizon must be >= 1".into());
        }
        let g = &self.growth;
        for (name, v) in [("population", g.population), ("car_ownership", g.car_ownership), ("transit_time", g.transit_time)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("growth.{name} = {v} must be > 0"));
            }
        }
        if self.periods.is_empty() {
            return bad("at least one period is required".into());
        }
        for p in &self.periods {
            if !(p.hours_per_year > 0.0 && p.demand_share > 0.0) {
                return bad(format!("period `{}`: weights must be > 0", p.name));
            }
        }
        if !(self.sensitivity_perturbation > 0.0) {
            return bad("sensitivity_perturbation must be > 0".into());
        }
        if self.feedback.enabled && self.feedback.max_iterations < 1 {
            return bad("feedback.max_iterations must be >= 1".into());
        }
        let config_error = |e: &dyn std::fmt::Display| Error::Config(e.to_string());
        self.appraisal.check().map_err(|e| config_error(&e))?;
        self.assignment.check().map_err(|e| config_error(&e))?;
        self.fuel.check().map_err(|e| config_error(&e))?;
        self.emission.check().map_err(|e| config_error(&e))?;
        for model in self.demand.choice.values() {
            model.check().map_err(|e| config_error(&e))?;
        }
        Ok(())
    }
}
