//! CSV readers for zones, skims and zone ownership rates.

use std::collections::HashMap;
use std::path::Path;

use super::{SkimEntry, Variable, ZoneAttr, ZoneAttributes};
use crate::netgraph::NodeId;
use crate::od::OdMatrix;
use crate::text::ParseError;
use crate::Error;

/// Zone-pair level-of-service inputs for mode choice.
#[derive(Debug, Clone, PartialEq)]
pub struct SkimSet {
    pub car_time: OdMatrix,
    pub motorcycle_time: OdMatrix,
    pub taxi_time: OdMatrix,
    pub transit_in_vehicle: OdMatrix,
    pub transit_out_of_vehicle: OdMatrix,
    pub distance: OdMatrix,
    /// Per origin zone.
    pub own_car: Vec<f64>,
    pub own_motorcycle: Vec<f64>,
    /// Per destination zone, 0 or 1.
    pub des_flag: Vec<f64>,
}

impl SkimSet {
    pub fn zones(&self) -> usize {
        self.own_car.len()
    }

    pub fn entry(&self, origin: usize, dest: usize) -> SkimEntry {
        SkimEntry::default()
            .with(Variable::TIMCAR, self.car_time.get(origin, dest))
            .with(Variable::TIMMOT, self.motorcycle_time.get(origin, dest))
            .with(Variable::TIMTAX, self.taxi_time.get(origin, dest))
            .with(Variable::TIMBIN, self.transit_in_vehicle.get(origin, dest))
            .with(Variable::TIMBOT, self.transit_out_of_vehicle.get(origin, dest))
            .with(Variable::DIST, self.distance.get(origin, dest))
            .with(Variable::OWNCAR, self.own_car[origin])
            .with(Variable::OWNMOT, self.own_motorcycle[origin])
            .with(Variable::DESFLAG, self.des_flag[dest])
    }

    /// First violated invariant, if any.
    pub fn check(&self) -> Result<(), String> {
        let mats = [
            ("TIMCAR", &self.car_time),
            ("TIMMOT", &self.motorcycle_time),
            ("TIMTAX", &self.taxi_time),
            ("TIMBIN", &self.transit_in_vehicle),
            ("TIMBOT", &self.transit_out_of_vehicle),
            ("DIST", &self.distance),
        ];
        for (name, m) in mats {
            if let Some((i, j, v)) = m.iter().find(|&(_, _, v)| !(v >= 0.0 && v.is_finite())) {
                return Err(format!("{name}[{i},{j}] = {v} must be finite and >= 0"));
            }
        }
        if let Some((k, v)) = self.des_flag.iter().enumerate().find(|(_, &v)| v != 0.0 && v != 1.0) {
            return Err(format!("DESFLAG of zone #{k} = {v} must be 0 or 1"));
        }
        Ok(())
    }
}

fn open(path: &Path) -> Result<(csv::Reader<std::fs::File>, Vec<String>), Error> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = rdr
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    Ok((rdr, headers))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse(ParseError::new(path, line, 1, format!("{other:?}"))),
    }
}

fn column(path: &Path, headers: &[String], name: &str) -> Result<usize, Error> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::input(path, format!("missing column `{name}`")))
}

fn field(path: &Path, record: &csv::StringRecord, col: usize, name: &str) -> Result<f64, Error> {
    let line = record.position().map_or(0, |p| p.line() as usize);
    let raw = record.get(col).unwrap_or("");
    raw.parse::<f64>().map_err(|_| {
        Error::Parse(ParseError::new(
            path,
            line,
            col + 1,
            format!("expected number for {name}, found `{raw}`"),
        ))
    })
}

/// Reads the zones file: one row per zone, columns named by attribute symbol.
pub fn read_zones(path: &Path) -> Result<Vec<ZoneAttributes>, Error> {
    let (mut rdr, headers) = open(path)?;
    let cols = ZoneAttr::ALL
        .iter()
        .map(|&a| column(path, &headers, a.symbol()).map(|c| (a, c)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut zones = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let mut z = ZoneAttributes::default();
        for &(attr, col) in &cols {
            z.set(attr, field(path, &record, col, attr.symbol())?);
        }
        if let Err(msg) = z.check() {
            let line = record.position().map_or(0, |p| p.line() as usize);
            return Err(Error::input(path, format!("line {line}: {msg}")));
        }
        zones.push(z);
    }
    Ok(zones)
}

/// Reads the pair skims and the per-zone ownership table. Every ordered zone pair,
/// intrazonal ones included, must appear exactly once.
pub fn read_skims(skims_path: &Path, ownership_path: &Path, zone_ids: &[NodeId]) -> Result<SkimSet, Error> {
    let n = zone_ids.len();
    let index: HashMap<NodeId, usize> = zone_ids.iter().enumerate().map(|(k, &z)| (z, k)).collect();
    let zone_of = |path: &Path, record: &csv::StringRecord, col: usize, name: &str| -> Result<usize, Error> {
        let v = field(path, record, col, name)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        index
            .get(&(v as NodeId))
            .copied()
            .filter(|_| v.fract() == 0.0 && v >= 0.0)
            .ok_or_else(|| Error::input(path, format!("line {line}: {name} {v} is not a zone")))
    };

    let names = ["TIMCAR", "TIMMOT", "TIMTAX", "TIMBIN", "TIMBOT", "DIST"];
    let (mut rdr, headers) = open(skims_path)?;
    let oc = column(skims_path, &headers, "origin")?;
    let dc = column(skims_path, &headers, "dest")?;
    let cols = names
        .iter()
        .map(|name| column(skims_path, &headers, name))
        .collect::<Result<Vec<_>, _>>()?;
    let mut mats = vec![OdMatrix::zeros(n); names.len()];
    let mut seen = vec![false; n * n];
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(skims_path, e))?;
        let i = zone_of(skims_path, &record, oc, "origin")?;
        let j = zone_of(skims_path, &record, dc, "dest")?;
        if std::mem::replace(&mut seen[i * n + j], true) {
            return Err(Error::input(
                skims_path,
                format!("duplicate pair {} -> {}", zone_ids[i], zone_ids[j]),
            ));
        }
        for (m, (&col, name)) in mats.iter_mut().zip(cols.iter().zip(names)) {
            m.set(i, j, field(skims_path, &record, col, name)?);
        }
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(Error::input(
            skims_path,
            format!("missing pair {} -> {}", zone_ids[k / n], zone_ids[k % n]),
        ));
    }

    let (mut rdr, headers) = open(ownership_path)?;
    let zc = column(ownership_path, &headers, "zone")?;
    let own_cols = ["OWNCAR", "OWNMOT", "DESFLAG"]
        .iter()
        .map(|name| column(ownership_path, &headers, name))
        .collect::<Result<Vec<_>, _>>()?;
    let mut per_zone = vec![[f64::NAN; 3]; n];
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(ownership_path, e))?;
        let z = zone_of(ownership_path, &record, zc, "zone")?;
        for (slot, (&col, name)) in own_cols.iter().zip(["OWNCAR", "OWNMOT", "DESFLAG"]).enumerate() {
            per_zone[z][slot] = field(ownership_path, &record, col, name)?;
        }
    }
    if let Some(k) = per_zone.iter().position(|r| r[0].is_nan()) {
        return Err(Error::input(ownership_path, format!("missing zone {}", zone_ids[k])));
    }

    let mut it = mats.into_iter();
    let set = SkimSet {
        car_time: it.next().unwrap(),
        motorcycle_time: it.next().unwrap(),
        taxi_time: it.next().unwrap(),
        transit_in_vehicle: it.next().unwrap(),
        transit_out_of_vehicle: it.next().unwrap(),
        distance: it.next().unwrap(),
        own_car: per_zone.iter().map(|r| r[0]).collect(),
        own_motorcycle: per_zone.iter().map(|r| r[1]).collect(),
        des_flag: per_zone.iter().map(|r| r[2]).collect(),
    };
    set.check().map_err(|msg| Error::input(skims_path, msg))?;
    Ok(set)
}
