//! Nested-logit vehicle choice.
//!
//! Elemental utilities are linear in skim variables. Modes grouped in a nest enter the
//! upper level through the nest's inclusive value `theta * ln Σ exp(U_k / theta)` and
//! split inside the nest by a multinomial logit at scale `1 / theta`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{DemandError, Purpose};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Car,
    Motorcycle,
    Bus,
    Taxi,
    Minibus,
    Bicycle,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Car => "car",
            Mode::Motorcycle => "motorcycle",
            Mode::Bus => "bus",
            Mode::Taxi => "taxi",
            Mode::Minibus => "minibus",
            Mode::Bicycle => "bicycle",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Level-of-service and zone variables referenced by the utility functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variable {
    /// Car door-to-door time, minutes.
    TIMCAR,
    TIMMOT,
    TIMTAX,
    /// Transit in-vehicle time.
    TIMBIN,
    /// Transit out-of-vehicle time.
    TIMBOT,
    DIST,
    /// Car ownership rate at the origin.
    OWNCAR,
    OWNMOT,
    /// Destination restricted-traffic-zone indicator.
    DESFLAG,
}

impl Variable {
    pub const ALL: [Variable; 9] = [
        Variable::TIMCAR,
        Variable::TIMMOT,
        Variable::TIMTAX,
        Variable::TIMBIN,
        Variable::TIMBOT,
        Variable::DIST,
        Variable::OWNCAR,
        Variable::OWNMOT,
        Variable::DESFLAG,
    ];

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Variable values for one origin-destination pair; unset variables are `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SkimEntry {
    values: [Option<f64>; 9],
}

impl SkimEntry {
    pub fn with(mut self, var: Variable, value: f64) -> Self {
        self.values[var.slot()] = Some(value);
        self
    }

    pub fn set(&mut self, var: Variable, value: f64) {
        self.values[var.slot()] = Some(value);
    }

    pub fn get(&self, var: Variable) -> Option<f64> {
        self.values[var.slot()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityTerm {
    pub var: Variable,
    pub coef: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilitySpec {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub terms: Vec<UtilityTerm>,
}

impl UtilitySpec {
    fn new(constant: f64, terms: &[(Variable, f64)]) -> Self {
        Self {
            constant,
            terms: terms.iter().map(|&(var, coef)| UtilityTerm { var, coef }).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nest {
    pub name: String,
    pub members: Vec<Mode>,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiceModel {
    pub purpose: Purpose,
    pub utilities: BTreeMap<Mode, UtilitySpec>,
    #[serde(default)]
    pub nests: Vec<Nest>,
}

impl ChoiceModel {
    /// Modes of the model in canonical order; [`mode_shares`] uses the same order.
    pub fn modes(&self) -> Vec<Mode> {
        self.utilities.keys().copied().collect()
    }

    pub fn check(&self) -> Result<(), DemandError> {
        let mut seen = Vec::new();
        for nest in &self.nests {
            if nest.members.is_empty() {
                return Err(DemandError::InvalidNest(format!("nest `{}` is empty", nest.name)));
            }
            if !(nest.theta > 0.0 && nest.theta <= 1.0) {
                return Err(DemandError::InvalidNest(format!(
                    "nest `{}` has theta {} outside (0, 1]",
                    nest.name, nest.theta
                )));
            }
            for m in &nest.members {
                if !self.utilities.contains_key(m) {
                    return Err(DemandError::InvalidNest(format!("nest `{}` lists unknown mode {m}", nest.name)));
                }
                if seen.contains(m) {
                    return Err(DemandError::InvalidNest(format!("mode {m} belongs to two nests")));
                }
                seen.push(*m);
            }
        }
        Ok(())
    }

    /// Default vehicle-choice coefficients for a purpose. Only work trips carry a
    /// public-transport nest; its scale defaults to 1.
    pub fn default_for(purpose: Purpose) -> Self {
        use Variable::*;
        let u = UtilitySpec::new;
        let (utilities, nests) = match purpose {
            Purpose::Work => (
                vec![
                    (Mode::Car, u(0.697568, &[(TIMCAR, -0.034575), (OWNCAR, 9.008179), (DESFLAG, -0.588848)])),
                    (Mode::Motorcycle, u(-0.480759, &[(TIMMOT, -0.047222), (OWNMOT, 18.345253)])),
                    (Mode::Bus, u(0.330393, &[(TIMBIN, -0.020389), (TIMBOT, -0.026496)])),
                    (Mode::Taxi, u(0.0, &[(TIMTAX, -0.048415), (OWNCAR, 3.100169)])),
                ],
                vec![Nest {
                    name: "public".into(),
                    members: vec![Mode::Bus, Mode::Taxi],
                    theta: 1.0,
                }],
            ),
            Purpose::Education => (
                vec![
                    (Mode::Bus, u(0.8811690, &[(TIMBIN, -0.012004), (TIMBOT, -0.012004)])),
                    (Mode::Taxi, u(-0.0365572, &[(TIMTAX, -0.030786), (OWNCAR, 8.253327)])),
                    (Mode::Car, u(-1.1044833, &[(TIMCAR, -0.041592), (OWNCAR, 11.324764), (DESFLAG, -0.582493)])),
                    (Mode::Minibus, u(0.0, &[(DIST, -1.104768), (OWNCAR, 6.648515)])),
                ],
                vec![],
            ),
            Purpose::Shopping => (
                vec![
                    (Mode::Bus, u(2.794484, &[(TIMBIN, -0.013595), (TIMBOT, -0.015329)])),
                    (Mode::Taxi, u(1.967395, &[(TIMTAX, -0.037180), (OWNCAR, 6.596312)])),
                    (Mode::Car, u(0.0, &[(TIMCAR, -0.015029), (OWNCAR, 12.443686), (DESFLAG, -0.689367)])),
                ],
                vec![],
            ),
            Purpose::Recreation => (
                vec![
                    (Mode::Bus, u(2.725886, &[(TIMBIN, -0.009414), (TIMBOT, -0.009414)])),
                    (Mode::Taxi, u(2.393202, &[(TIMTAX, -0.033543), (OWNCAR, 5.379732)])),
                    (Mode::Car, u(0.0, &[(TIMCAR, -0.015111), (OWNCAR, 13.957626), (DESFLAG, -0.374195)])),
                ],
                vec![],
            ),
            Purpose::NonHomeBased => (
                vec![
                    (Mode::Bus, u(0.039002, &[(TIMBIN, -0.008689), (TIMBOT, -0.041852)])),
                    (Mode::Taxi, u(0.334293, &[(TIMTAX, -0.020176)])),
                    (Mode::Car, u(0.0, &[(TIMCAR, -0.012662), (DESFLAG, -0.705396)])),
                ],
                vec![],
            ),
        };
        Self {
            purpose,
            utilities: utilities.into_iter().collect(),
            nests,
        }
    }
}

/// Systematic utility of `mode` for one zone pair.
pub fn mode_utility(model: &ChoiceModel, mode: Mode, skims: &SkimEntry) -> Result<f64, DemandError> {
    let spec = model.utilities.get(&mode).ok_or(DemandError::ModeNotInModel {
        purpose: model.purpose,
        mode,
    })?;
    spec.terms.iter().try_fold(spec.constant, |acc, t| {
        skims
            .get(t.var)
            .map(|v| acc + t.coef * v)
            .ok_or(DemandError::MissingVariable { mode, variable: t.var })
    })
}

/// `theta * ln Σ exp(u_k)`, evaluated with a max shift.
pub fn nest_logsum(utilities: &[f64], theta: f64) -> Result<f64, DemandError> {
    if utilities.is_empty() {
        return Err(DemandError::InvalidNest("logsum of an empty nest".into()));
    }
    let m = utilities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = utilities.iter().map(|u| (u - m).exp()).sum();
    Ok(theta * (m + s.ln()))
}

fn softmax(values: &[f64]) -> Vec<f64> {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = values.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// Nested-logit choice probabilities.
///
/// `utilities` is aligned with [`ChoiceModel::modes`]; the result uses the same order.
/// The model is assumed to satisfy [`ChoiceModel::check`].
pub fn mode_shares(model: &ChoiceModel, utilities: &[f64]) -> Vec<f64> {
    let modes = model.modes();
    assert_eq!(modes.len(), utilities.len(), "one utility per mode");
    let position = |m: &Mode| modes.iter().position(|x| x == m).expect("nest member is a model mode");

    // upper level: unnested modes first, then one alternative per nest
    let mut upper = Vec::new();
    let mut unnested = Vec::new();
    for (k, m) in modes.iter().enumerate() {
        if !model.nests.iter().any(|n| n.members.contains(m)) {
            unnested.push(k);
            upper.push(utilities[k]);
        }
    }
    let mut within = Vec::with_capacity(model.nests.len());
    for nest in &model.nests {
        let scaled: Vec<f64> = nest.members.iter().map(|m| utilities[position(m)] / nest.theta).collect();
        upper.push(nest_logsum(&scaled, nest.theta).expect("nests are non-empty"));
        within.push(softmax(&scaled));
    }

    let upper_p = softmax(&upper);
    let mut shares = vec![0.0; modes.len()];
    for (slot, &k) in unnested.iter().enumerate() {
        shares[k] = upper_p[slot];
    }
    for (n, nest) in model.nests.iter().enumerate() {
        let p_nest = upper_p[unnested.len() + n];
        for (m, p_cond) in nest.members.iter().zip(&within[n]) {
            shares[position(m)] = p_nest * p_cond;
        }
    }
    shares
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(modes: &[Mode]) -> ChoiceModel {
        ChoiceModel {
            purpose: Purpose::Work,
            utilities: modes.iter().map(|&m| (m, UtilitySpec::new(0.0, &[]))).collect(),
            nests: vec![],
        }
    }

    #[test]
    fn work_car_utility() {
        let model = ChoiceModel::default_for(Purpose::Work);
        let entry = SkimEntry::default()
            .with(Variable::TIMCAR, 20.0)
            .with(Variable::OWNCAR, 0.1)
            .with(Variable::DESFLAG, 0.0);
        let u = mode_utility(&model, Mode::Car, &entry).unwrap();
        assert!((u - (0.697568 - 0.034575 * 20.0 + 9.008179 * 0.1)).abs() < 1e-12);
        assert!((u - 0.9068859).abs() < 1e-7);
    }

    #[test]
    fn constant_terms() {
        let zeros = Variable::ALL.iter().fold(SkimEntry::default(), |e, &v| e.with(v, 0.0));
        let work = ChoiceModel::default_for(Purpose::Work);
        assert_eq!(mode_utility(&work, Mode::Motorcycle, &zeros).unwrap(), -0.480759);
        let nhb = ChoiceModel::default_for(Purpose::NonHomeBased);
        assert_eq!(mode_utility(&nhb, Mode::Taxi, &zeros).unwrap(), 0.334293);
    }

    #[test]
    fn missing_variable_is_named() {
        let work = ChoiceModel::default_for(Purpose::Work);
        let entry = SkimEntry::default().with(Variable::TIMCAR, 10.0);
        match mode_utility(&work, Mode::Car, &entry) {
            Err(DemandError::MissingVariable { variable, .. }) => assert_eq!(variable, Variable::OWNCAR),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            mode_utility(&work, Mode::Minibus, &entry),
            Err(DemandError::ModeNotInModel { .. })
        ));
    }

    #[test]
    fn logsum_cases() {
        assert_eq!(nest_logsum(&[1.7], 1.0).unwrap(), 1.7);
        assert!((nest_logsum(&[0.0, 0.0], 1.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((nest_logsum(&[0.0, 0.0], 0.5).unwrap() - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!(nest_logsum(&[], 1.0).is_err());
    }

    #[test]
    fn equal_utilities_split_evenly() {
        let model = flat(&[Mode::Car, Mode::Bus, Mode::Taxi]);
        for s in mode_shares(&model, &[0.3, 0.3, 0.3]) {
            assert!((s - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn unit_theta_nest_collapses() {
        let mut nested = flat(&[Mode::Car, Mode::Bus, Mode::Taxi]);
        nested.nests.push(Nest {
            name: "pt".into(),
            members: vec![Mode::Bus, Mode::Taxi],
            theta: 1.0,
        });
        let u = [0.4, -1.2, 2.0];
        let a = mode_shares(&nested, &u);
        let b = mode_shares(&flat(&[Mode::Car, Mode::Bus, Mode::Taxi]), &u);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn nest_validation() {
        let mut model = ChoiceModel::default_for(Purpose::Work);
        assert!(model.check().is_ok());
        model.nests[0].theta = 1.5;
        assert!(model.check().is_err());
        model.nests[0].theta = 0.5;
        model.nests[0].members.push(Mode::Minibus);
        assert!(model.check().is_err());
    }

    #[test]
    fn large_utilities_do_not_overflow() {
        let model = ChoiceModel::default_for(Purpose::Work);
        let s = mode_shares(&model, &[900.0, 800.0, -900.0, 850.0]);
        assert!(s.iter().all(|p| p.is_finite()));
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
