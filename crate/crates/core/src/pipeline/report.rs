use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{HorizonResult, YearResult};
use crate::appraise::{
    compare_scenarios, cumulative_npv, sensitivity, AppraisalLedger, AppraiseError, Comparison, InitialCosts,
    LedgerYear, SensitivityShares, UnitValues,
};
use crate::assign::format_flows;
use crate::netgraph::Network;
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub name: String,
    pub initial_costs: InitialCosts,
    /// Construction, acquisition and construction-year disbenefits.
    pub initial_total: f64,
    pub component_totals: LedgerYear,
    pub npv: f64,
    pub payback_year: Option<u32>,
    pub bc_ratio: Option<f64>,
    pub sensitivity_shares: Option<SensitivityShares>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub currency: String,
    pub discount_rate: f64,
    pub horizon: usize,
    pub scenarios: Vec<ScenarioSummary>,
    pub comparison: Option<Comparison>,
    /// Assignments that stopped at the iteration cap.
    #[serde(default)]
    pub non_converged: Vec<String>,
}

/// NPV, payback, B/C and sensitivity for each ledger, plus a ranking when there are
/// at least two.
pub fn summarize(ledgers: &[AppraisalLedger], unit: &UnitValues, perturbation: f64) -> Result<Summary, AppraiseError> {
    let r = unit.discount_rate;
    let mut scenarios = Vec::with_capacity(ledgers.len());
    for l in ledgers {
        let sensitivity_shares = match sensitivity(l, unit, perturbation) {
            Ok(s) => Some(s),
            Err(AppraiseError::DegenerateSensitivity) => None,
            Err(e) => return Err(e),
        };
        scenarios.push(ScenarioSummary {
            name: l.name.clone(),
            initial_costs: l.initial,
            initial_total: l.c0(),
            component_totals: l.component_totals(),
            npv: l.npv(r),
            payback_year: l.payback_year(r),
            bc_ratio: l.bc_ratio(r),
            sensitivity_shares,
        });
    }
    let comparison = if ledgers.len() >= 2 { Some(compare_scenarios(ledgers, r)?) } else { None };
    Ok(Summary {
        currency: ledgers.first().map_or_else(|| unit.currency.clone(), |l| l.currency.clone()),
        discount_rate: r,
        horizon: ledgers.first().map_or(unit.horizon as usize, |l| l.horizon()),
        scenarios,
        comparison,
        non_converged: Vec::new(),
    })
}

/// Cost to benefit sign flip that never produces `-0`.
fn flip(v: f64) -> f64 {
    0.0 - v
}

/// Year series in benefit-positive form.
///
/// Row 0 is the up-front block: its benefit columns hold the negated construction-year
/// disbenefits and `maintenance` holds the capital outlay (construction plus
/// acquisition). `net` is the cash flow entering the NPV and `cumulative_npv` the
/// discounted running total.
pub fn benefits_csv(ledger: &AppraisalLedger, r: f64) -> String {
    let mut out =
        String::from("year,time_benefit,fuel_benefit,emission_benefit,accident_benefit,maintenance,net,cumulative_npv\n");
    let i = &ledger.initial;
    let c0 = ledger.c0();
    let _ = writeln!(
        out,
        "0,{},{},{},{},{},{},{}",
        flip(i.time),
        flip(i.fuel),
        flip(i.emission),
        flip(i.accident),
        i.construction + i.acquisition,
        flip(c0),
        flip(c0)
    );
    let flows = ledger.cash_flows();
    let cumulative = cumulative_npv(c0, &flows, r);
    for (k, y) in ledger.years.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            k + 1,
            flip(y.time),
            flip(y.fuel),
            flip(y.emission),
            flip(y.accident),
            y.maintenance,
            flows[k],
            cumulative[k]
        );
    }
    out
}

pub fn metrics_csv(years: &[YearResult]) -> String {
    let mut out = String::from(
        "year,vehicle_hours,vehicle_km,fuel_liters,co_kg,hc_kg,nox_kg,so2_kg,accident_exposure,converged\n",
    );
    for y in years {
        let m = &y.metrics;
        let e = &m.emissions_kg;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            y.year, m.vehicle_hours, m.vehicle_km, m.fuel_liters, e.co, e.hc, e.nox, e.so2, m.accident_exposure, y.converged
        );
    }
    out
}

/// A file-system friendly version of a scenario name.
pub fn slug(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    if s.is_empty() { "_".into() } else { s }
}

struct Writer {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl Writer {
    fn put(&mut self, rel: &str, contents: &str) -> Result<(), Error> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    fn flows(&mut self, dir: &str, net: &Network, year: &YearResult) -> Result<(), Error> {
        for p in &year.periods {
            self.put(&format!("{dir}/flows_year{}_{}.csv", year.year, slug(&p.name)), &format_flows(net, &p.state))?;
        }
        Ok(())
    }
}

/// Writes every report of a horizon run under `out_dir` and returns the file list.
///
/// Link flows are written for the construction year and the final year.
pub fn emit_reports(result: &HorizonResult, unit: &UnitValues, perturbation: f64, out_dir: &Path) -> Result<Vec<PathBuf>, Error> {
    let mut w = Writer { root: out_dir.to_path_buf(), written: Vec::new() };
    let last = result.horizon as usize;
    let r = result.discount_rate;

    w.put("status_quo/metrics.csv", &metrics_csv(&result.status_quo))?;
    for y in [0, last] {
        w.flows("status_quo", &result.status_quo_network, &result.status_quo[y])?;
    }
    for s in &result.scenarios {
        let dir = slug(&s.name);
        w.put(&format!("{dir}/benefits.csv"), &benefits_csv(&s.ledger, r))?;
        w.put(&format!("{dir}/metrics.csv"), &metrics_csv(&s.years))?;
        w.flows(&dir, &s.construction_network, &s.years[0])?;
        w.flows(&dir, &s.operation_network, &s.years[last])?;
    }

    let ledgers = result.ledgers();
    w.put("ledgers.json", &pretty_json(&ledgers))?;
    let mut summary = summarize(&ledgers, unit, perturbation)?;
    summary.non_converged = result.non_converged();
    w.put("summary.json", &pretty_json(&summary))?;
    Ok(w.written)
}

fn pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn read_ledgers(path: &Path) -> Result<Vec<AppraisalLedger>, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::input(path, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ledger() -> AppraisalLedger {
        AppraisalLedger {
            name: "a b/c".into(),
            currency: "USD".into(),
            initial: InitialCosts { construction: 10.0, acquisition: 2.0, time: 1.0, ..InitialCosts::default() },
            years: vec![LedgerYear { time: -8.0, maintenance: 1.0, ..LedgerYear::default() }; 2],
        }
    }

    #[test]
    fn benefits_rows() {
        let csv = benefits_csv(&ledger(), 0.0);
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[1], "0,-1,0,0,0,12,-13,-13");
        assert_eq!(rows[2], "1,8,0,0,0,1,7,-6");
        assert_eq!(rows[3], "2,8,0,0,0,1,7,1");
    }

    #[test]
    fn summary_fields() {
        let s = summarize(&[ledger()], &UnitValues { discount_rate: 0.0, ..UnitValues::default() }, 0.1).unwrap();
        assert_eq!(s.scenarios[0].initial_total, 13.0);
        assert_eq!(s.scenarios[0].payback_year, Some(2));
        assert!(s.comparison.is_none());
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"npv\":1.0"));
    }

    #[test]
    fn slugs() {
        assert_eq!(slug("a b/c"), "a_b_c");
        assert_eq!(slug(""), "_");
    }
}
