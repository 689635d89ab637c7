//! Network and scenario text files.
//!
//! Network files follow the TNTP layout: `<NUMBER OF ZONES>`, `<NUMBER OF NODES>` and
//! `<NUMBER OF LINKS>` metadata, then one row per link
//! `from to capacity length free_flow_time alpha beta accident_mult ;`.
//! Nodes are numbered `1..=nodes`, the first `zones` of them being centroids.
//! Lines starting with `~` are comments.

use std::fmt::Write as _;
use std::path::Path;

use super::{DirectCosts, Edit, Link, LinkField, Network, ScenarioDelta, DEFAULT_VDF_ALPHA, DEFAULT_VDF_BETA};
use crate::text::{parse_f64, parse_u32, tokens, ParseError};

/// Costs in scenario files are given in millions of currency units.
pub const SCENARIO_COST_SCALE: f64 = 1.0e6;

fn strip_comment(line: &str, marker: char) -> &str {
    match line.find(marker) {
        Some(i) => &line[..i],
        None => line,
    }
}

pub fn parse_network(path: &Path, text: &str) -> Result<Network, ParseError> {
    let mut zones = None;
    let mut nodes = None;
    let mut declared_links = None;
    let mut links = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = strip_comment(raw, '~');
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('<') {
            let close = trimmed.find('>').ok_or_else(|| {
                ParseError::new(path, line_no, 1, "unterminated metadata tag")
            })?;
            let tag = &trimmed[1..close];
            let value = trimmed[close + 1..].trim();
            let column = line.find('>').unwrap_or(0) + 2;
            let slot = match tag {
                "NUMBER OF ZONES" => &mut zones,
                "NUMBER OF NODES" => &mut nodes,
                "NUMBER OF LINKS" => &mut declared_links,
                _ => continue,
            };
            *slot = Some(parse_u32(path, line_no, (column, value), tag)?);
            continue;
        }

        let toks: Vec<_> = tokens(line).into_iter().filter(|(_, t)| *t != ";").collect();
        let toks: Vec<_> = toks
            .into_iter()
            .map(|(c, t)| (c, t.trim_end_matches(';')))
            .collect();
        if toks.len() < 7 || toks.len() > 8 {
            return Err(ParseError::new(
                path,
                line_no,
                toks.first().map_or(1, |t| t.0),
                format!(
                    "link row needs 7 or 8 fields (from to capacity length free_flow_time alpha beta [accident_mult]), found {}",
                    toks.len()
                ),
            ));
        }
        let link = Link {
            from: parse_u32(path, line_no, toks[0], "from")?,
            to: parse_u32(path, line_no, toks[1], "to")?,
            capacity: parse_f64(path, line_no, toks[2], "capacity")?,
            length: parse_f64(path, line_no, toks[3], "length")?,
            free_flow_time: parse_f64(path, line_no, toks[4], "free_flow_time")?,
            vdf_alpha: parse_f64(path, line_no, toks[5], "alpha")?,
            vdf_beta: parse_f64(path, line_no, toks[6], "beta")?,
            accident_rate_multiplier: match toks.get(7) {
                Some(&t) => parse_f64(path, line_no, t, "accident_mult")?,
                None => 1.0,
            },
        };
        links.push(link);
    }

    let missing = |tag: &str| ParseError::new(path, 1, 1, format!("missing <{tag}> header"));
    let zones = zones.ok_or_else(|| missing("NUMBER OF ZONES"))?;
    let nodes = nodes.ok_or_else(|| missing("NUMBER OF NODES"))?;
    if let Some(n) = declared_links {
        if n as usize != links.len() {
            return Err(ParseError::new(
                path,
                last_line.max(1),
                1,
                format!("header declares {n} links, file has {}", links.len()),
            ));
        }
    }
    Ok(Network::with_numbered_nodes(nodes, zones, links))
}

pub fn read_network(path: &Path) -> Result<Network, crate::Error> {
    let text = std::fs::read_to_string(path).map_err(|e| crate::Error::io(path, e))?;
    Ok(parse_network(path, &text)?)
}

/// Writes a network in the same layout [`parse_network`] reads.
pub fn format_network(net: &Network) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "<NUMBER OF ZONES> {}", net.zone_count());
    let _ = writeln!(out, "<NUMBER OF NODES> {}", net.nodes().len());
    let _ = writeln!(out, "<NUMBER OF LINKS> {}", net.links().len());
    let _ = writeln!(out, "<END OF METADATA>");
    let _ = writeln!(out, "~ from to capacity length free_flow_time alpha beta accident_mult ;");
    for l in net.links() {
        let _ = writeln!(
            out,
            "{} {} {} {} {} {} {} {} ;",
            l.from, l.to, l.capacity, l.length, l.free_flow_time, l.vdf_alpha, l.vdf_beta, l.accident_rate_multiplier
        );
    }
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Construction,
    Operation,
    Costs,
}

/// Parses a scenario file. `default_name` is used when no `name = ...` line is present.
pub fn parse_scenario(path: &Path, text: &str, default_name: &str) -> Result<ScenarioDelta, ParseError> {
    let mut delta = ScenarioDelta::null(default_name);
    let mut section = Section::Preamble;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw, '#');
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col0 = line.len() - line.trim_start().len() + 1;
        if trimmed.starts_with('[') {
            section = match trimmed {
                "[construction]" => Section::Construction,
                "[operation]" => Section::Operation,
                "[costs]" => Section::Costs,
                other => {
                    return Err(ParseError::new(path, line_no, col0, format!("unknown section {other}")))
                }
            };
            continue;
        }
        match section {
            Section::Preamble | Section::Costs => {
                let (key, value) = trimmed.split_once('=').ok_or_else(|| {
                    ParseError::new(path, line_no, col0, "expected `key = value`")
                })?;
                let key = key.trim();
                let value = value.trim();
                let eq = line.find('=').unwrap_or(0);
                let after = &line[eq + 1..];
                let vcol = eq + 2 + (after.len() - after.trim_start().len());
                if section == Section::Preamble {
                    if key == "name" {
                        delta.name = value.trim_matches('"').to_string();
                        continue;
                    }
                    return Err(ParseError::new(path, line_no, col0, format!("unknown key `{key}` before first section")));
                }
                let amount = parse_f64(path, line_no, (vcol, value), key)? * SCENARIO_COST_SCALE;
                match key {
                    "construction" => delta.direct_costs.construction = amount,
                    "acquisition" => delta.direct_costs.acquisition = amount,
                    "maintenance" => delta.direct_costs.annual_maintenance = amount,
                    _ => return Err(ParseError::new(path, line_no, col0, format!("unknown cost `{key}`"))),
                }
            }
            Section::Construction | Section::Operation => {
                let edit = parse_edit(path, line_no, line)?;
                if section == Section::Construction {
                    delta.construction.push(edit);
                } else {
                    delta.operation.push(edit);
                }
            }
        }
    }
    Ok(delta)
}

fn parse_edit(path: &Path, line_no: usize, line: &str) -> Result<Edit, ParseError> {
    let toks = tokens(line);
    let (verb_col, verb) = toks[0];
    let need = |n: usize, usage: &str| {
        if toks.len() < n {
            Err(ParseError::new(path, line_no, verb_col, format!("usage: {usage}")))
        } else {
            Ok(())
        }
    };
    match verb {
        "set" => {
            need(5, "set <from> <to> <field> <value>")?;
            let (fcol, fname) = toks[3];
            let field = LinkField::parse(fname)
                .ok_or_else(|| ParseError::new(path, line_no, fcol, format!("unknown link field `{fname}`")))?;
            Ok(Edit::SetField {
                from: parse_u32(path, line_no, toks[1], "from")?,
                to: parse_u32(path, line_no, toks[2], "to")?,
                field,
                value: parse_f64(path, line_no, toks[4], "value")?,
            })
        }
        "remove" => {
            need(3, "remove <from> <to>")?;
            Ok(Edit::RemoveLink {
                from: parse_u32(path, line_no, toks[1], "from")?,
                to: parse_u32(path, line_no, toks[2], "to")?,
            })
        }
        "add" => {
            need(6, "add <from> <to> <capacity> <length> <free_flow_time> [alpha beta accident_mult]")?;
            let opt = |k: usize, what: &str, default: f64| match toks.get(k) {
                Some(&t) => parse_f64(path, line_no, t, what),
                None => Ok(default),
            };
            Ok(Edit::AddLink(Link {
                from: parse_u32(path, line_no, toks[1], "from")?,
                to: parse_u32(path, line_no, toks[2], "to")?,
                capacity: parse_f64(path, line_no, toks[3], "capacity")?,
                length: parse_f64(path, line_no, toks[4], "length")?,
                free_flow_time: parse_f64(path, line_no, toks[5], "free_flow_time")?,
                vdf_alpha: opt(6, "alpha", DEFAULT_VDF_ALPHA)?,
                vdf_beta: opt(7, "beta", DEFAULT_VDF_BETA)?,
                accident_rate_multiplier: opt(8, "accident_mult", 1.0)?,
            }))
        }
        other => Err(ParseError::new(path, line_no, verb_col, format!("unknown edit `{other}`"))),
    }
}

pub fn read_scenario(path: &Path) -> Result<ScenarioDelta, crate::Error> {
    let text = std::fs::read_to_string(path).map_err(|e| crate::Error::io(path, e))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    Ok(parse_scenario(path, &text, stem)?)
}

impl DirectCosts {
    pub fn initial(&self) -> f64 {
        self.construction + self.acquisition
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::netgraph::validate_network;

    const TWO_ZONE: &str = "\
<NUMBER OF ZONES> 2
<NUMBER OF NODES> 3
<NUMBER OF LINKS> 4
<END OF METADATA>
~ from to capacity length fft alpha beta accident_mult ;
1 3 1000 1.0 2.0 0.15 4 1.0 ;
3 2 1000 1.0 2.0 0.15 4 ;
2 3 1000 1.0 2.0 0.15 4 1.0 ;
3 1 1000 1.0 2.0 0.15 4 2.5 ;
";

    #[test]
    fn parses_minimal_network() {
        let net = parse_network(Path::new("net.tntp"), TWO_ZONE).unwrap();
        assert_eq!(net.zone_ids(), &[1, 2]);
        assert_eq!(net.links().len(), 4);
        assert_eq!(net.link(1).accident_rate_multiplier, 1.0);
        assert_eq!(net.link(3).accident_rate_multiplier, 2.5);
        assert!(validate_network(&net).is_empty());
    }

    #[test]
    fn reports_line_and_column() {
        let text = TWO_ZONE.replace("3 2 1000 1.0 2.0", "3 2 1000 x.0 2.0");
        let err = parse_network(Path::new("net.tntp"), &text).unwrap_err();
        assert_eq!((err.line, err.column), (7, 10));
        assert!(err.message.contains("length"));
    }

    #[test]
    fn link_count_mismatch() {
        let text = TWO_ZONE.replace("<NUMBER OF LINKS> 4", "<NUMBER OF LINKS> 5");
        assert!(parse_network(Path::new("n"), &text).is_err());
    }

    #[test]
    fn format_round_trips() {
        let net = fixtures::synthetic_grid(4, 6, 7);
        let back = parse_network(Path::new("x"), &format_network(&net)).unwrap();
        assert_eq!(back, net);
    }

    #[test]
    fn parses_scenario_sections() {
        let text = "\
name = directional
[construction]
set 1 2 capacity 500   # narrowed during works
remove 2 1
[operation]
add 1 4 2000 0.8 0.6
set 1 2 free_flow_time 0.5
[costs]
construction = 40.3
acquisition = 16.4
maintenance = 0.55
";
        let s = parse_scenario(Path::new("s"), text, "fallback").unwrap();
        assert_eq!(s.name, "directional");
        assert_eq!(s.construction.len(), 2);
        assert_eq!(s.operation.len(), 2);
        assert_eq!(
            s.operation[0],
            Edit::AddLink(Link::new(1, 4, 0.8, 0.6, 2000.0))
        );
        assert!((s.direct_costs.construction - 40.3e6).abs() < 1e-6);
        assert!((s.direct_costs.annual_maintenance - 0.55e6).abs() < 1e-9);
    }

    #[test]
    fn scenario_errors_carry_position() {
        let err = parse_scenario(Path::new("s"), "[operation]\nset 1 2 colour 3\n", "x").unwrap_err();
        assert_eq!((err.line, err.column), (2, 9));
        let err = parse_scenario(Path::new("s"), "[costs]\nconstruction = abc\n", "x").unwrap_err();
        assert_eq!((err.line, err.column), (2, 16));
    }
}
