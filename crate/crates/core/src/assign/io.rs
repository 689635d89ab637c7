//! Demand matrix input and link-flow output.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::FlowState;
use crate::netgraph::{Network, NodeId};
use crate::od::OdMatrix;
use crate::text::{parse_f64, parse_u32, tokens, ParseError};
use crate::Error;

/// Parses a TNTP trips table (`Origin k` blocks of `dest : value;` entries).
pub fn parse_tntp_demand(path: &Path, text: &str, zone_ids: &[NodeId]) -> Result<OdMatrix, ParseError> {
    let index: HashMap<NodeId, usize> = zone_ids.iter().enumerate().map(|(k, &z)| (z, k)).collect();
    let mut od = OdMatrix::zeros(zone_ids.len());
    let mut origin: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('~').next().unwrap_or("");
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('<') {
            continue;
        }
        let toks = tokens(line);
        if toks[0].1.eq_ignore_ascii_case("origin") {
            let tok = *toks
                .get(1)
                .ok_or_else(|| ParseError::new(path, line_no, toks[0].0, "origin id missing"))?;
            let id = parse_u32(path, line_no, tok, "origin")?;
            origin = Some(
                *index
                    .get(&id)
                    .ok_or_else(|| ParseError::new(path, line_no, tok.0, format!("origin {id} is not a zone")))?,
            );
            continue;
        }
        let o = origin.ok_or_else(|| ParseError::new(path, line_no, 1, "entry before any `Origin` line"))?;
        // entries look like `dest : value;` possibly several per line
        let mut offset = 0;
        for entry in line.split(';') {
            let start = offset;
            offset += entry.len() + 1;
            if entry.trim().is_empty() {
                continue;
            }
            let (dest, value) = entry
                .split_once(':')
                .ok_or_else(|| ParseError::new(path, line_no, start + 1, "expected `dest : value`"))?;
            let dcol = start + dest.len() - dest.trim_start().len() + 1;
            let vcol = start + dest.len() + 1 + value.len() - value.trim_start().len() + 1;
            let d = parse_u32(path, line_no, (dcol, dest.trim()), "destination")?;
            let v = parse_f64(path, line_no, (vcol, value.trim()), "demand")?;
            let j = *index
                .get(&d)
                .ok_or_else(|| ParseError::new(path, line_no, dcol, format!("destination {d} is not a zone")))?;
            od[(o, j)] += v;
        }
    }
    Ok(od)
}

/// Reads `origin,dest,pce_per_hour` CSV, or the TNTP trips layout for other extensions.
pub fn read_demand(path: &Path, zone_ids: &[NodeId]) -> Result<OdMatrix, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if path.extension().and_then(|e| e.to_str()) != Some("csv") {
        return Ok(parse_tntp_demand(path, &text, zone_ids)?);
    }
    let index: HashMap<NodeId, usize> = zone_ids.iter().enumerate().map(|(k, &z)| (z, k)).collect();
    let mut od = OdMatrix::zeros(zone_ids.len());
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, h)| h.replace(' ', "")).unwrap_or_default();
    if header != "origin,dest,pce_per_hour" {
        return Err(Error::input(path, "expected header `origin,dest,pce_per_hour`"));
    }
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 1;
        let mut col = 1;
        let mut fields = Vec::new();
        for f in line.split(',') {
            fields.push((col + f.len() - f.trim_start().len(), f.trim()));
            col += f.len() + 1;
        }
        if fields.len() != 3 {
            return Err(ParseError::new(path, line_no, 1, "expected 3 fields").into());
        }
        let o = parse_u32(path, line_no, fields[0], "origin")?;
        let d = parse_u32(path, line_no, fields[1], "dest")?;
        let v = parse_f64(path, line_no, fields[2], "pce_per_hour")?;
        let (Some(&oi), Some(&di)) = (index.get(&o), index.get(&d)) else {
            return Err(Error::input(path, format!("line {line_no}: pair {o} -> {d} is not between zones")));
        };
        od[(oi, di)] += v;
    }
    Ok(od)
}

/// `from,to,flow,time,v_over_c`, one row per link in network order.
pub fn format_flows(net: &Network, state: &FlowState) -> String {
    let mut out = String::from("from,to,flow,time,v_over_c\n");
    for ((l, x), t) in net.links().iter().zip(&state.flows).zip(&state.times) {
        let _ = writeln!(out, "{},{},{},{},{}", l.from, l.to, x, t, x / l.capacity);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tntp_trips() {
        let text = "<NUMBER OF ZONES> 3\n<END OF METADATA>\n\nOrigin 1\n    2 :   5.0;    3 : 1.5;\nOrigin 3\n 1 : 2;\n";
        let od = parse_tntp_demand(Path::new("t"), text, &[1, 2, 3]).unwrap();
        assert_eq!(od.get(0, 1), 5.0);
        assert_eq!(od.get(0, 2), 1.5);
        assert_eq!(od.get(2, 0), 2.0);
        assert_eq!(od.total(), 8.5);
    }

    #[test]
    fn tntp_errors_have_columns() {
        let err = parse_tntp_demand(Path::new("t"), "Origin 1\n  2 : x;\n", &[1, 2]).unwrap_err();
        assert_eq!((err.line, err.column), (2, 7));
        let err = parse_tntp_demand(Path::new("t"), "Origin 9\n", &[1, 2]).unwrap_err();
        assert_eq!((err.line, err.column), (1, 8));
    }

    #[test]
    fn csv_demand() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        std::fs::write(&p, "origin,dest,pce_per_hour\n1,2,10\n2,1,4.5\n").unwrap();
        let od = read_demand(&p, &[1, 2]).unwrap();
        assert_eq!(od.cells(), &[0.0, 10.0, 4.5, 0.0]);
        std::fs::write(&p, "origin,dest,pce_per_hour\n1,2,ten\n").unwrap();
        match read_demand(&p, &[1, 2]).unwrap_err() {
            Error::Parse(e) => assert_eq!((e.line, e.column), (2, 5)),
            other => panic!("{other}"),
        }
    }
}
