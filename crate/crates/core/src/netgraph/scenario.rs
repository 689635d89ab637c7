use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Link, LinkField, Network, NodeId};

/// A single network edit. `remove` and `set` address the first link `from -> to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Edit {
    AddLink(Link),
    RemoveLink { from: NodeId, to: NodeId },
    SetField { from: NodeId, to: NodeId, field: LinkField, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Construction,
    Operation,
}

/// Direct project costs in currency units.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DirectCosts {
    pub construction: f64,
    pub acquisition: f64,
    pub annual_maintenance: f64,
}

/// An interchange design expressed as link edits against the status-quo network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDelta {
    pub name: String,
    pub construction: Vec<Edit>,
    pub operation: Vec<Edit>,
    pub direct_costs: DirectCosts,
}

impl ScenarioDelta {
    /// A scenario with no edits and no costs.
    pub fn null(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            construction: Vec::new(),
            operation: Vec::new(),
            direct_costs: DirectCosts::default(),
        }
    }

    pub fn edits(&self, phase: Phase) -> &[Edit] {
        match phase {
            Phase::Construction => &self.construction,
            Phase::Operation => &self.operation,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("edit #{edit}: no link {from} -> {to}")]
    MissingLink { edit: usize, from: NodeId, to: NodeId },
}

/// One step of an undo log, expressed by link position.
#[derive(Debug, Clone, PartialEq)]
enum Undo {
    Remove(usize),
    Insert(usize, Link),
    Restore(usize, LinkField, f64),
}

/// Reverts an applied edit list, restoring the network bit-exactly (including link order).
#[derive(Debug, Clone, PartialEq)]
pub struct UndoLog {
    steps: Vec<Undo>,
}

impl UndoLog {
    pub fn revert(&self, net: &Network) -> Network {
        let (nodes, mut links, zones) = net.clone().into_parts();
        for step in self.steps.iter().rev() {
            match step {
                Undo::Remove(k) => {
                    links.remove(*k);
                }
                Undo::Insert(k, link) => links.insert(*k, *link),
                Undo::Restore(k, field, value) => field.set(&mut links[*k], *value),
            }
        }
        Network::new(nodes, links, zones)
    }
}

/// Applies `edits` in order to a copy of `net`, returning the edited network and its undo log.
pub fn apply_edits(net: &Network, edits: &[Edit]) -> Result<(Network, UndoLog), ScenarioError> {
    let (nodes, mut links, zones) = net.clone().into_parts();
    let mut steps = Vec::with_capacity(edits.len());
    let locate = |links: &[Link], edit: usize, from: NodeId, to: NodeId| {
        links
            .iter()
            .position(|l| l.from == from && l.to == to)
            .ok_or(ScenarioError::MissingLink { edit, from, to })
    };
    for (i, edit) in edits.iter().enumerate() {
        match *edit {
            Edit::AddLink(link) => {
                links.push(link);
                steps.push(Undo::Remove(links.len() - 1));
            }
            Edit::RemoveLink { from, to } => {
                let k = locate(&links, i, from, to)?;
                let old = links.remove(k);
                steps.push(Undo::Insert(k, old));
            }
            Edit::SetField {
                from,
                to,
                field,
                value,
            } => {
                let k = locate(&links, i, from, to)?;
                steps.push(Undo::Restore(k, field, field.get(&links[k])));
                field.set(&mut links[k], value);
            }
        }
    }
    Ok((Network::new(nodes, links, zones), UndoLog { steps }))
}

/// The network for one phase of a scenario. The input network is untouched.
pub fn apply_scenario(
    net: &Network,
    delta: &ScenarioDelta,
    phase: Phase,
) -> Result<Network, ScenarioError> {
    apply_edits(net, delta.edits(phase)).map(|(n, _)| n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    #[test]
    fn empty_edits_are_identity() {
        let net = fixtures::braess(true);
        let out = apply_scenario(&net, &ScenarioDelta::null("x"), Phase::Operation).unwrap();
        assert_eq!(out, net);
    }

    #[test]
    fn set_field_touches_one_field() {
        let net = fixtures::two_parallel_links();
        let delta = ScenarioDelta {
            operation: vec![Edit::SetField {
                from: 1,
                to: 2,
                field: LinkField::Capacity,
                value: 2000.0,
            }],
            ..ScenarioDelta::null("cap")
        };
        let out = apply_scenario(&net, &delta, Phase::Operation).unwrap();
        let mut expected = *net.link(0);
        expected.capacity = 2000.0;
        assert_eq!(out.link(0), &expected);
        assert_eq!(&out.links()[1..], &net.links()[1..]);
        assert_eq!(net.link(0).capacity, 100.0);
    }

    #[test]
    fn add_then_remove_restores_original() {
        let net = fixtures::braess(false);
        let extra = Link::new(2, 3, 0.5, 1.0, 10.0);
        let edits = vec![Edit::AddLink(extra), Edit::RemoveLink { from: 2, to: 3 }];
        let (out, _) = apply_edits(&net, &edits).unwrap();
        assert_eq!(out, net);
    }

    #[test]
    fn missing_link_names_edit_index() {
        let net = fixtures::braess(false);
        let edits = vec![
            Edit::SetField { from: 1, to: 2, field: LinkField::Capacity, value: 1.0 },
            Edit::RemoveLink { from: 2, to: 3 },
        ];
        assert_eq!(
            apply_edits(&net, &edits).unwrap_err(),
            ScenarioError::MissingLink { edit: 1, from: 2, to: 3 }
        );
    }

    fn edit_strategy() -> impl Strategy<Value = Edit> {
        let pair = (1u32..=4, 1u32..=4);
        prop_oneof![
            (pair.clone(), 0.1f64..10.0).prop_map(|((f, t), c)| Edit::AddLink(Link::new(f, t, 1.0, c, 50.0))),
            pair.clone().prop_map(|(from, to)| Edit::RemoveLink { from, to }),
            (pair, 0.1f64..500.0).prop_map(|((from, to), value)| Edit::SetField {
                from,
                to,
                field: LinkField::Capacity,
                value
            }),
        ]
    }

    proptest! {
        #[test]
        fn apply_then_revert_is_identity(edits in proptest::collection::vec(edit_strategy(), 0..12)) {
            let net = fixtures::braess(true);
            let before = net.clone();
            if let Ok((edited, undo)) = apply_edits(&net, &edits) {
                prop_assert_eq!(undo.revert(&edited), net.clone());
            }
            prop_assert_eq!(net, before);
        }
    }
}
