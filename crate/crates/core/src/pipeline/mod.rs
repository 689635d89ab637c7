//! Configuration, input loading, multi-year orchestration of
//! demand → assignment → appraisal, and report files.

mod config;
mod inputs;
mod report;
mod run;

pub use config::{default_periods, Diversion, Feedback, Growth, Paths, Period, RunConfig};
pub use inputs::{load_inputs, Inputs};
pub use report::{benefits_csv, emit_reports, metrics_csv, read_ledgers, slug, summarize, ScenarioSummary, Summary};
pub use run::{
    assess_network, daily_demand, grow_skims, grow_zones, hourly_metrics, run_horizon, run_year, year_demand,
    DailyDemand, HorizonResult, PeriodResult, ScenarioOutcome, YearResult,
};
