//! Zone attributes and the trip production/attraction regressions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::DemandError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Purpose {
    Work,
    Education,
    Shopping,
    Recreation,
    NonHomeBased,
}

impl Purpose {
    pub const ALL: [Purpose; 5] = [
        Purpose::Work,
        Purpose::Education,
        Purpose::Shopping,
        Purpose::Recreation,
        Purpose::NonHomeBased,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Purpose::Work => "work",
            Purpose::Education => "education",
            Purpose::Shopping => "shopping",
            Purpose::Recreation => "recreation",
            Purpose::NonHomeBased => "non_home_based",
        }
    }
}

impl fmt::Display for Purpose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Purpose {
    type Err = DemandError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().replace(['-', ' '], "_").as_str() {
            "work" => Purpose::Work,
            "education" | "school" => Purpose::Education,
            "shopping" | "buy" => Purpose::Shopping,
            "recreation" | "entertainment" => Purpose::Recreation,
            "non_home_based" | "nhb" => Purpose::NonHomeBased,
            _ => return Err(DemandError::UnknownPurpose(s.to_string())),
        })
    }
}

/// A zone attribute, named by its column header in the zones file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ZoneAttr {
    P,
    VP,
    ER,
    STR,
    STUR,
    EMPE,
    SHOP,
    ST,
    STU,
    HOSPB,
    PARK,
    DRA,
    DB,
    DT,
    DQ,
    DF,
    DR,
    D128,
    D444,
    DIST,
}

impl ZoneAttr {
    pub const ALL: [ZoneAttr; 20] = [
        ZoneAttr::P,
        ZoneAttr::VP,
        ZoneAttr::ER,
        ZoneAttr::STR,
        ZoneAttr::STUR,
        ZoneAttr::EMPE,
        ZoneAttr::SHOP,
        ZoneAttr::ST,
        ZoneAttr::STU,
        ZoneAttr::HOSPB,
        ZoneAttr::PARK,
        ZoneAttr::DRA,
        ZoneAttr::DB,
        ZoneAttr::DT,
        ZoneAttr::DQ,
        ZoneAttr::DF,
        ZoneAttr::DR,
        ZoneAttr::D128,
        ZoneAttr::D444,
        ZoneAttr::DIST,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            ZoneAttr::P => "P",
            ZoneAttr::VP => "VP",
            ZoneAttr::ER => "ER",
            ZoneAttr::STR => "STR",
            ZoneAttr::STUR => "STUR",
            ZoneAttr::EMPE => "EMPE",
            ZoneAttr::SHOP => "SHOP",
            ZoneAttr::ST => "ST",
            ZoneAttr::STU => "STU",
            ZoneAttr::HOSPB => "HOSPB",
            ZoneAttr::PARK => "PARK",
            ZoneAttr::DRA => "DRA",
            ZoneAttr::DB => "DB",
            ZoneAttr::DT => "DT",
            ZoneAttr::DQ => "DQ",
            ZoneAttr::DF => "DF",
            ZoneAttr::DR => "DR",
            ZoneAttr::D128 => "D128",
            ZoneAttr::D444 => "D444",
            ZoneAttr::DIST => "DIST",
        }
    }

    /// 0/1 location indicators.
    pub fn is_covariate(self) -> bool {
        matches!(
            self,
            ZoneAttr::DRA
                | ZoneAttr::DB
                | ZoneAttr::DT
                | ZoneAttr::DQ
                | ZoneAttr::DF
                | ZoneAttr::DR
                | ZoneAttr::D128
                | ZoneAttr::D444
        )
    }
}

/// Socioeconomic description of one traffic zone.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ZoneAttributes {
    /// Population.
    pub population: f64,
    /// Private cars per capita.
    pub car_ownership: f64,
    /// Employed residents.
    pub resident_employment: f64,
    /// Resident school students.
    pub resident_school_students: f64,
    /// Resident university students.
    pub resident_university_students: f64,
    /// Jobs located in the zone.
    pub employment: f64,
    pub shops: f64,
    /// School places in the zone.
    pub school_students: f64,
    /// University places in the zone.
    pub university_students: f64,
    pub hospital_beds: f64,
    pub parks: f64,
    /// Restricted traffic-plan area indicator.
    pub dra: f64,
    pub db: f64,
    pub dt: f64,
    pub dq: f64,
    pub df: f64,
    pub dr: f64,
    pub d128: f64,
    pub d444: f64,
    /// Distance term in km.
    pub dist: f64,
}

impl ZoneAttributes {
    pub fn get(&self, attr: ZoneAttr) -> f64 {
        match attr {
            ZoneAttr::P => self.population,
            ZoneAttr::VP => self.car_ownership,
            ZoneAttr::ER => self.resident_employment,
            ZoneAttr::STR => self.resident_school_students,
            ZoneAttr::STUR => self.resident_university_students,
            ZoneAttr::EMPE => self.employment,
            ZoneAttr::SHOP => self.shops,
            ZoneAttr::ST => self.school_students,
            ZoneAttr::STU => self.university_students,
            ZoneAttr::HOSPB => self.hospital_beds,
            ZoneAttr::PARK => self.parks,
            ZoneAttr::DRA => self.dra,
            ZoneAttr::DB => self.db,
            ZoneAttr::DT => self.dt,
            ZoneAttr::DQ => self.dq,
            ZoneAttr::DF => self.df,
            ZoneAttr::DR => self.dr,
            ZoneAttr::D128 => self.d128,
            ZoneAttr::D444 => self.d444,
            ZoneAttr::DIST => self.dist,
        }
    }

    pub fn set(&mut self, attr: ZoneAttr, value: f64) {
        let slot = match attr {
            ZoneAttr::P => &mut self.population,
            ZoneAttr::VP => &mut self.car_ownership,
            ZoneAttr::ER => &mut self.resident_employment,
            ZoneAttr::STR => &mut self.resident_school_students,
            ZoneAttr::STUR => &mut self.resident_university_students,
            ZoneAttr::EMPE => &mut self.employment,
            ZoneAttr::SHOP => &mut self.shops,
            ZoneAttr::ST => &mut self.school_students,
            ZoneAttr::STU => &mut self.university_students,
            ZoneAttr::HOSPB => &mut self.hospital_beds,
            ZoneAttr::PARK => &mut self.parks,
            ZoneAttr::DRA => &mut self.dra,
            ZoneAttr::DB => &mut self.db,
            ZoneAttr::DT => &mut self.dt,
            ZoneAttr::DQ => &mut self.dq,
            ZoneAttr::DF => &mut self.df,
            ZoneAttr::DR => &mut self.dr,
            ZoneAttr::D128 => &mut self.d128,
            ZoneAttr::D444 => &mut self.d444,
            ZoneAttr::DIST => &mut self.dist,
        };
        *slot = value;
    }

    /// First violated attribute invariant, if any.
    pub fn check(&self) -> Result<(), String> {
        for attr in ZoneAttr::ALL {
            let v = self.get(attr);
            if !v.is_finite() || v < 0.0 {
                return Err(format!("{} = {v} must be finite and >= 0", attr.symbol()));
            }
            if attr.is_covariate() && v != 0.0 && v != 1.0 {
                return Err(format!("{} = {v} must be 0 or 1", attr.symbol()));
            }
        }
        Ok(())
    }
}

/// `coef * Π attrs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coef: f64,
    pub attrs: Vec<ZoneAttr>,
}

impl Term {
    fn eval(&self, z: &ZoneAttributes) -> f64 {
        self.attrs.iter().fold(self.coef, |acc, &a| acc * z.get(a))
    }
}

/// A linear-in-parameters trip regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regression {
    pub terms: Vec<Term>,
}

impl Regression {
    fn new(terms: &[(f64, &[ZoneAttr])]) -> Self {
        Self {
            terms: terms
                .iter()
                .map(|&(coef, attrs)| Term {
                    coef,
                    attrs: attrs.to_vec(),
                })
                .collect(),
        }
    }

    /// Raw regression value, possibly negative.
    pub fn raw(&self, z: &ZoneAttributes) -> f64 {
        self.terms.iter().map(|t| t.eval(z)).sum()
    }

    /// Regression value clamped at zero.
    pub fn trips(&self, z: &ZoneAttributes) -> f64 {
        let v = self.raw(z);
        if v < 0.0 {
            log::warn!("negative trip regression output {v} clamped to 0");
            0.0
        } else {
            v
        }
    }
}

/// Production and attraction regressions per purpose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TripModels {
    pub production: BTreeMap<Purpose, Regression>,
    pub attraction: BTreeMap<Purpose, Regression>,
}

impl Default for TripModels {
    fn default() -> Self {
        use ZoneAttr::*;
        let production = BTreeMap::from([
            (Purpose::Work, Regression::new(&[(0.569, &[VP, ER]), (1.107, &[ER])])),
            (
                Purpose::Education,
                Regression::new(&[(3.070, &[VP, STR]), (0.903, &[STUR]), (0.020, &[DIST, P])]),
            ),
            (Purpose::Shopping, Regression::new(&[(0.061, &[P]), (0.414, &[VP, P])])),
            (Purpose::Recreation, Regression::new(&[(0.073, &[P]), (0.373, &[VP, P])])),
            (
                Purpose::NonHomeBased,
                Regression::new(&[(0.490, &[EMPE]), (10.213, &[VP, SHOP]), (14485.0, &[DB]), (951.0, &[DQ])]),
            ),
        ]);
        let attraction = BTreeMap::from([
            (
                Purpose::Work,
                Regression::new(&[(1.620, &[EMPE]), (2.420, &[SHOP]), (62694.0, &[DB])]),
            ),
            (
                Purpose::Education,
                Regression::new(&[(3.833, &[VP, ST]), (0.500, &[STU]), (26789.0, &[DT]), (9299.0, &[D128])]),
            ),
            (
                Purpose::Shopping,
                Regression::new(&[
                    (15.760, &[VP, SHOP]),
                    (0.195, &[EMPE]),
                    (0.825, &[HOSPB]),
                    (15456.0, &[DB]),
                    (3469.0, &[DQ]),
                    (7474.0, &[DF]),
                    (4607.0, &[D444]),
                    (-0.889, &[SHOP, DRA]),
                ]),
            ),
            (
                Purpose::Recreation,
                Regression::new(&[
                    (122.140, &[PARK]),
                    (0.040, &[P]),
                    (7.364, &[VP, SHOP]),
                    (0.304, &[EMPE]),
                    (4098.0, &[DR]),
                    (1937.0, &[DF]),
                    (1532.0, &[DQ]),
                    (-0.279, &[SHOP, DRA]),
                    (-0.208, &[EMPE, DRA]),
                ]),
            ),
            (
                Purpose::NonHomeBased,
                Regression::new(&[(0.458, &[EMPE]), (11.526, &[VP, SHOP]), (11706.0, &[DB]), (1173.0, &[DQ])]),
            ),
        ]);
        Self { production, attraction }
    }
}

impl TripModels {
    pub fn production(&self, z: &ZoneAttributes, purpose: Purpose) -> Result<f64, DemandError> {
        self.production
            .get(&purpose)
            .map(|r| r.trips(z))
            .ok_or(DemandError::PurposeNotConfigured(purpose))
    }

    pub fn attraction(&self, z: &ZoneAttributes, purpose: Purpose) -> Result<f64, DemandError> {
        self.attraction
            .get(&purpose)
            .map(|r| r.trips(z))
            .ok_or(DemandError::PurposeNotConfigured(purpose))
    }

    pub fn trip_ends(&self, zones: &[ZoneAttributes], purpose: Purpose) -> Result<TripEnds, DemandError> {
        Ok(TripEnds {
            purpose,
            productions: zones.iter().map(|z| self.production(z, purpose)).collect::<Result<_, _>>()?,
            attractions: zones.iter().map(|z| self.attraction(z, purpose)).collect::<Result<_, _>>()?,
        })
    }
}

/// Trips per day produced by a zone, using the default coefficients.
pub fn trip_production(z: &ZoneAttributes, purpose: Purpose) -> Result<f64, DemandError> {
    TripModels::default().production(z, purpose)
}

/// Trips per day attracted to a zone, using the default coefficients.
pub fn trip_attraction(z: &ZoneAttributes, purpose: Purpose) -> Result<f64, DemandError> {
    TripModels::default().attraction(z, purpose)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripEnds {
    pub purpose: Purpose,
    pub productions: Vec<f64>,
    pub attractions: Vec<f64>,
}

/// Scales attractions uniformly so their total equals total productions.
pub fn balance_attractions(ends: &TripEnds) -> Result<TripEnds, DemandError> {
    let total_p: f64 = ends.productions.iter().sum();
    let total_a: f64 = ends.attractions.iter().sum();
    if total_a <= 0.0 && total_p > 0.0 {
        return Err(DemandError::NoAttractionMass(ends.purpose));
    }
    let factor = if total_p == 0.0 { 0.0 } else { total_p / total_a };
    Ok(TripEnds {
        purpose: ends.purpose,
        productions: ends.productions.clone(),
        attractions: ends.attractions.iter().map(|a| a * factor).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn zone() -> ZoneAttributes {
        ZoneAttributes::default()
    }

    #[test]
    fn work_production() {
        let z = ZoneAttributes {
            car_ownership: 0.5,
            resident_employment: 1000.0,
            ..zone()
        };
        assert!((trip_production(&z, Purpose::Work).unwrap() - 1391.5).abs() < 1e-9);
    }

    #[test]
    fn education_production() {
        let z = ZoneAttributes {
            car_ownership: 0.2,
            resident_school_students: 500.0,
            resident_university_students: 100.0,
            dist: 2.0,
            population: 10_000.0,
            ..zone()
        };
        assert!((trip_production(&z, Purpose::Education).unwrap() - 797.3).abs() < 1e-9);
    }

    #[test]
    fn zero_zone_generates_nothing() {
        for p in Purpose::ALL {
            assert_eq!(trip_production(&zone(), p).unwrap(), 0.0);
            assert_eq!(trip_attraction(&zone(), p).unwrap(), 0.0);
        }
    }

    #[test]
    fn work_attraction() {
        let z = ZoneAttributes {
            employment: 1000.0,
            shops: 100.0,
            ..zone()
        };
        assert!((trip_attraction(&z, Purpose::Work).unwrap() - 1862.0).abs() < 1e-9);
        let bazaar = ZoneAttributes { db: 1.0, ..zone() };
        assert_eq!(trip_attraction(&bazaar, Purpose::Work).unwrap(), 62694.0);
    }

    #[test]
    fn negative_attraction_clamps() {
        // restricted zone with many shops and no car ownership: -0.889 SHOP dominates
        let z = ZoneAttributes {
            shops: 1000.0,
            dra: 1.0,
            ..zone()
        };
        let models = TripModels::default();
        assert!(models.attraction[&Purpose::Shopping].raw(&z) < 0.0);
        assert_eq!(trip_attraction(&z, Purpose::Shopping).unwrap(), 0.0);
    }

    #[test]
    fn unknown_or_unconfigured_purpose() {
        assert!(matches!("commute".parse::<Purpose>(), Err(DemandError::UnknownPurpose(_))));
        assert_eq!("buy".parse::<Purpose>().unwrap(), Purpose::Shopping);
        let mut models = TripModels::default();
        models.production.remove(&Purpose::Work);
        assert!(matches!(
            models.production(&zone(), Purpose::Work),
            Err(DemandError::PurposeNotConfigured(Purpose::Work))
        ));
    }

    #[test]
    fn balancing() {
        let ends = |p: Vec<f64>, a: Vec<f64>| TripEnds {
            purpose: Purpose::Work,
            productions: p,
            attractions: a,
        };
        let b = balance_attractions(&ends(vec![10.0, 10.0], vec![5.0, 5.0])).unwrap();
        assert_eq!(b.attractions, vec![10.0, 10.0]);
        assert_eq!(b.productions, vec![10.0, 10.0]);
        let b = balance_attractions(&ends(vec![30.0, 0.0], vec![10.0, 20.0])).unwrap();
        assert_eq!(b.attractions, vec![10.0, 20.0]);
        assert!(matches!(
            balance_attractions(&ends(vec![1.0], vec![0.0])),
            Err(DemandError::NoAttractionMass(Purpose::Work))
        ));
    }

    fn arb_zone() -> impl Strategy<Value = ZoneAttributes> {
        (
            proptest::collection::vec(0.0f64..5000.0, 11),
            0.0f64..1.0,
            proptest::collection::vec(0u8..2, 8),
            0.0f64..20.0,
        )
            .prop_map(|(counts, vp, flags, dist)| {
                let mut z = ZoneAttributes::default();
                let count_attrs = [
                    ZoneAttr::P,
                    ZoneAttr::ER,
                    ZoneAttr::STR,
                    ZoneAttr::STUR,
                    ZoneAttr::EMPE,
                    ZoneAttr::SHOP,
                    ZoneAttr::ST,
                    ZoneAttr::STU,
                    ZoneAttr::HOSPB,
                    ZoneAttr::PARK,
                ];
                for (a, v) in count_attrs.iter().zip(&counts) {
                    z.set(*a, *v);
                }
                z.car_ownership = vp;
                let covs = ZoneAttr::ALL.iter().copied().filter(|a| a.is_covariate());
                for (a, f) in covs.zip(&flags) {
                    z.set(a, f64::from(*f));
                }
                z.dist = dist;
                z
            })
    }

    proptest! {
        #[test]
        fn monotone_in_positively_weighted_attributes(z in arb_zone(), bump in 0.0f64..1000.0) {
            let models = TripModels::default();
            for table in [&models.production, &models.attraction] {
                for reg in table.values() {
                    for attr in ZoneAttr::ALL {
                        if attr.is_covariate() {
                            continue;
                        }
                        let involved: Vec<_> = reg.terms.iter().filter(|t| t.attrs.contains(&attr)).collect();
                        if involved.is_empty() || involved.iter().any(|t| t.coef < 0.0) {
                            continue;
                        }
                        let mut bigger = z;
                        bigger.set(attr, z.get(attr) + bump);
                        prop_assert!(reg.trips(&bigger) >= reg.trips(&z));
                    }
                }
            }
        }
    }
}
