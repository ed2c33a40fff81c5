//! Line-oriented parser for fault-tree documents.
//!
//! Grammar summary (full description in `docs/tree-format.md`):
//!
//! ```text
//! # comment
//! event  <id> rate=<per-hour>
//! cbe    <id> model=propulsion [config=<PNPN|PNPNPN|PPNNPN>] [lambda=<per-hour>]
//! cbe    <id> model=battery    [lambda=] [d=] [alpha=] [beta=]
//! cbe    <id> model=processor  [mttf_ref=] [ea=] [k=] [tr=] [u=]
//! cbe    <id> model=custom chain=<name> [init=<state>]
//!             [symptom=motors config=<cfg> map=<pattern:state,...> [default=<state>]]
//! markov <name> states=<s1,s2,...> absorbing=<s,...>
//! trans  <name> <from> <to> rate=<per-hour>
//! gate   <id> <AND|OR> children=<id,id,...>
//! top    <id>
//! ```
//!
//! `plink` is reserved for probabilistic symptom links and currently
//! rejected. Every node must be reachable from the single `top` node, have
//! at most one parent, and sit on no cycle.

use super::{
    BatteryLeaf, CustomLeaf, FaultTree, GateKind, LeafModel, MotorSymptomMap, Node, NodeKind,
    ProcessorLeaf, PropulsionLeaf,
};
use crate::markov::MarkovModel;
use crate::models::MotorConfiguration;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate id `{id}` at line {line}")]
    DuplicateId { id: String, line: usize },
    #[error("unknown id `{id}` referenced at line {line}")]
    UnknownId { id: String, line: usize },
    #[error("gate `{gate}` lists child `{child}` twice (line {line})")]
    DuplicateChild {
        gate: String,
        child: String,
        line: usize,
    },
    #[error("node `{id}` is used by more than one gate")]
    NodeReused { id: String },
    #[error("cycle detected through `{id}`")]
    CycleDetected { id: String },
    #[error("unresolved binding on `{id}`: {detail}")]
    UnresolvedBinding { id: String, detail: String },
    #[error("custom chain `{name}` is invalid: {detail}")]
    InvalidChain { name: String, detail: String },
    #[error("document declares no top node")]
    MissingTop,
    #[error("second top declaration at line {line}")]
    MultipleTop { line: usize },
    #[error("node `{id}` is not reachable from the top node")]
    UnreachableNode { id: String },
    #[error("tree has no leaves")]
    NoLeaves,
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl<'a> Token<'a> {
    fn error(&self, message: impl Into<String>) -> TreeError {
        TreeError::Parse {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }
}

fn tokenize(raw: &str, line: usize) -> Vec<Token<'_>> {
    let content = match raw.find('#') {
        Some(i) => &raw[..i],
        None => raw,
    };
    let mut tokens = Vec::new();
    let mut offset = 0;
    for piece in content.split_whitespace() {
        let start = content[offset..].find(piece).unwrap() + offset;
        offset = start + piece.len();
        tokens.push(Token {
            text: piece,
            line,
            column: start + 1,
        });
    }
    tokens
}

fn valid_id(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphanumeric() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// Splits `key=value` tokens, enforcing an allowed-key list and rejecting
/// repeats.
fn parse_attributes<'a>(
    tokens: &[Token<'a>],
    allowed: &[&str],
) -> Result<HashMap<&'a str, Token<'a>>, TreeError> {
    let mut attrs: HashMap<&str, Token<'_>> = HashMap::new();
    for token in tokens {
        let Some((key, value)) = token.text.split_once('=') else {
            return Err(token.error(format!("expected key=value, got `{}`", token.text)));
        };
        if !allowed.contains(&key) {
            return Err(token.error(format!(
                "unknown attribute `{key}` (expected one of: {})",
                allowed.join(", ")
            )));
        }
        if value.is_empty() {
            return Err(token.error(format!("attribute `{key}` has an empty value")));
        }
        let value_token = Token {
            text: value,
            line: token.line,
            column: token.column + key.len() + 1,
        };
        if attrs.insert(key, value_token).is_some() {
            return Err(token.error(format!("attribute `{key}` given twice")));
        }
    }
    Ok(attrs)
}

fn parse_number(token: &Token<'_>) -> Result<f64, TreeError> {
    token
        .text
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| token.error(format!("invalid number `{}`", token.text)))
}

fn require<'a>(
    attrs: &HashMap<&str, Token<'a>>,
    key: &str,
    line: usize,
) -> Result<Token<'a>, TreeError> {
    attrs.get(key).copied().ok_or(TreeError::Parse {
        line,
        column: 1,
        message: format!("missing required attribute `{key}`"),
    })
}

#[derive(Debug)]
enum RawLeaf {
    Event {
        rate: f64,
    },
    Cbe {
        model: String,
        attrs: HashMap<String, String>,
        line: usize,
    },
}

#[derive(Debug)]
struct RawGate {
    kind: GateKind,
    children: Vec<String>,
    line: usize,
}

#[derive(Debug, Default)]
struct RawChain {
    states: Vec<String>,
    absorbing: Vec<String>,
    transitions: Vec<(String, String, f64)>,
}

/// Parses and validates a fault-tree document.
pub fn parse_fault_tree(text: &str) -> Result<FaultTree, TreeError> {
    // Declaration order of node ids, with the payload parsed per directive.
    let mut order: Vec<String> = Vec::new();
    let mut leaves: HashMap<String, RawLeaf> = HashMap::new();
    let mut gates: HashMap<String, RawGate> = HashMap::new();
    let mut decl_lines: HashMap<String, usize> = HashMap::new();
    let mut chains: HashMap<String, RawChain> = HashMap::new();
    let mut chain_lines: HashMap<String, usize> = HashMap::new();
    let mut top: Option<(String, usize)> = None;

    for (index, raw_line) in text.lines().enumerate() {
        let line = index + 1;
        let tokens = tokenize(raw_line, line);
        if tokens.is_empty() {
            continue;
        }
        let directive = tokens[0];
        let rest = &tokens[1..];
        match directive.text {
            "event" | "cbe" | "gate" => {
                let id_token = rest.first().ok_or_else(|| directive.error("missing id"))?;
                if !valid_id(id_token.text) {
                    return Err(id_token.error(format!("invalid id `{}`", id_token.text)));
                }
                let id = id_token.text.to_string();
                if decl_lines.contains_key(&id) {
                    return Err(TreeError::DuplicateId { id, line });
                }
                decl_lines.insert(id.clone(), line);
                order.push(id.clone());
                match directive.text {
                    "event" => {
                        let attrs = parse_attributes(&rest[1..], &["rate"])?;
                        let rate_token = require(&attrs, "rate", line)?;
                        let rate = parse_number(&rate_token)?;
                        if rate < 0.0 {
                            return Err(rate_token.error("rate must be non-negative"));
                        }
                        leaves.insert(id, RawLeaf::Event { rate });
                    }
                    "cbe" => {
                        let allowed = [
                            "model", "config", "lambda", "d", "alpha", "beta", "mttf_ref", "ea",
                            "k", "tr", "u", "chain", "init", "symptom", "map", "default",
                        ];
                        let attrs = parse_attributes(&rest[1..], &allowed)?;
                        let model = require(&attrs, "model", line)?.text.to_string();
                        let mut string_attrs = HashMap::new();
                        for (key, token) in &attrs {
                            if *key != "model" {
                                string_attrs.insert(key.to_string(), token.text.to_string());
                            }
                        }
                        // Kind-specific attribute sets are checked during
                        // assembly; numbers are parsed here for positions.
                        for key in [
                            "lambda", "d", "alpha", "beta", "mttf_ref", "ea", "k", "tr", "u",
                        ] {
                            if let Some(token) = attrs.get(key) {
                                parse_number(token)?;
                            }
                        }
                        leaves.insert(
                            id,
                            RawLeaf::Cbe {
                                model,
                                attrs: string_attrs,
                                line,
                            },
                        );
                    }
                    "gate" => {
                        let kind_token = rest
                            .get(1)
                            .ok_or_else(|| directive.error("missing gate kind"))?;
                        let kind = match kind_token.text {
                            "AND" => GateKind::And,
                            "OR" => GateKind::Or,
                            other => {
                                return Err(kind_token
                                    .error(format!("unknown gate kind `{other}` (AND or OR)")))
                            }
                        };
                        let attrs = parse_attributes(&rest[2..], &["children"])?;
                        let children_token = require(&attrs, "children", line)?;
                        let children: Vec<String> =
                            children_token.text.split(',').map(str::to_string).collect();
                        if children.is_empty() || children.iter().any(String::is_empty) {
                            return Err(children_token.error("empty child list entry"));
                        }
                        gates.insert(
                            id,
                            RawGate {
                                kind,
                                children,
                                line,
                            },
                        );
                    }
                    _ => unreachable!(),
                }
            }
            "markov" => {
                let name_token = rest
                    .first()
                    .ok_or_else(|| directive.error("missing chain name"))?;
                if !valid_id(name_token.text) {
                    return Err(
                        name_token.error(format!("invalid chain name `{}`", name_token.text))
                    );
                }
                let name = name_token.text.to_string();
                if chain_lines.contains_key(&name) {
                    return Err(TreeError::DuplicateId { id: name, line });
                }
                chain_lines.insert(name.clone(), line);
                let attrs = parse_attributes(&rest[1..], &["states", "absorbing"])?;
                let states: Vec<String> = require(&attrs, "states", line)?
                    .text
                    .split(',')
                    .map(str::to_string)
                    .collect();
                let absorbing: Vec<String> = require(&attrs, "absorbing", line)?
                    .text
                    .split(',')
                    .map(str::to_string)
                    .collect();
                chains.insert(
                    name,
                    RawChain {
                        states,
                        absorbing,
                        transitions: Vec::new(),
                    },
                );
            }
            "trans" => {
                if rest.len() < 4 {
                    return Err(directive.error("expected: trans <chain> <from> <to> rate=<f>"));
                }
                let chain_token = rest[0];
                let chain = chains
                    .get_mut(chain_token.text)
                    .ok_or(TreeError::UnknownId {
                        id: chain_token.text.to_string(),
                        line,
                    })?;
                let attrs = parse_attributes(&rest[3..], &["rate"])?;
                let rate_token = require(&attrs, "rate", line)?;
                let rate = parse_number(&rate_token)?;
                chain
                    .transitions
                    .push((rest[1].text.to_string(), rest[2].text.to_string(), rate));
            }
            "top" => {
                let id_token = rest
                    .first()
                    .ok_or_else(|| directive.error("missing top id"))?;
                if top.is_some() {
                    return Err(TreeError::MultipleTop { line });
                }
                top = Some((id_token.text.to_string(), line));
            }
            "plink" => {
                return Err(directive.error(
                    "`plink` (probabilistic symptom link) is reserved and not yet supported",
                ));
            }
            other => {
                return Err(directive.error(format!(
                    "unknown directive `{other}` (event, cbe, markov, trans, gate, top)"
                )));
            }
        }
    }

    // Build custom chains.
    let mut built_chains: HashMap<String, MarkovModel> = HashMap::new();
    for (name, raw) in &chains {
        let states: Vec<&str> = raw.states.iter().map(String::as_str).collect();
        let absorbing: Vec<&str> = raw.absorbing.iter().map(String::as_str).collect();
        let transitions: Vec<(&str, &str, f64)> = raw
            .transitions
            .iter()
            .map(|(f, t, r)| (f.as_str(), t.as_str(), *r))
            .collect();
        let model = MarkovModel::from_rates(&states, &transitions, &absorbing).map_err(|e| {
            TreeError::InvalidChain {
                name: name.clone(),
                detail: e.to_string(),
            }
        })?;
        built_chains.insert(name.clone(), model);
    }

    // Assemble nodes in declaration order.
    let mut nodes: Vec<Node> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for id in &order {
        let kind = if let Some(raw) = leaves.get(id) {
            NodeKind::Leaf(build_leaf(id, raw, &built_chains)?)
        } else {
            // Children resolved below once every id is indexed.
            NodeKind::Gate {
                kind: gates[id].kind,
                children: Vec::new(),
            }
        };
        index.insert(id.clone(), nodes.len());
        nodes.push(Node {
            id: id.clone(),
            kind,
        });
    }
    for (id, raw_gate) in &gates {
        let mut children = Vec::with_capacity(raw_gate.children.len());
        let mut seen = std::collections::HashSet::new();
        for child in &raw_gate.children {
            let &child_index = index.get(child).ok_or(TreeError::UnknownId {
                id: child.clone(),
                line: raw_gate.line,
            })?;
            if !seen.insert(child_index) {
                return Err(TreeError::DuplicateChild {
                    gate: id.clone(),
                    child: child.clone(),
                    line: raw_gate.line,
                });
            }
            children.push(child_index);
        }
        let node_index = index[id];
        nodes[node_index].kind = NodeKind::Gate {
            kind: raw_gate.kind,
            children,
        };
    }

    let (top_id, top_line) = top.ok_or(TreeError::MissingTop)?;
    let &root = index.get(&top_id).ok_or(TreeError::UnknownId {
        id: top_id.clone(),
        line: top_line,
    })?;

    validate_structure(&nodes, root)?;

    let tree = FaultTree { nodes, root, index };
    if tree.leaf_count() == 0 {
        return Err(TreeError::NoLeaves);
    }
    Ok(tree)
}

fn build_leaf(
    id: &str,
    raw: &RawLeaf,
    chains: &HashMap<String, MarkovModel>,
) -> Result<LeafModel, TreeError> {
    let (model, attrs, line) = match raw {
        RawLeaf::Event { rate } => {
            return Ok(LeafModel::BasicEvent {
                failure_rate: *rate,
            })
        }
        RawLeaf::Cbe { model, attrs, line } => (model.as_str(), attrs, *line),
    };
    let get = |key: &str| attrs.get(key).map(String::as_str);
    let number = |key: &str| get(key).map(|v| v.parse::<f64>().expect("pre-parsed number"));
    let reject_extra = |allowed: &[&str]| -> Result<(), TreeError> {
        for key in attrs.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(TreeError::Parse {
                    line,
                    column: 1,
                    message: format!("attribute `{key}` does not apply to model `{model}`"),
                });
            }
        }
        Ok(())
    };
    match model {
        "propulsion" => {
            reject_extra(&["config", "lambda"])?;
            let configuration = get("config")
                .map(|v| {
                    v.parse::<MotorConfiguration>()
                        .map_err(|e| TreeError::UnresolvedBinding {
                            id: id.into(),
                            detail: e.to_string(),
                        })
                })
                .transpose()?;
            Ok(LeafModel::Propulsion(PropulsionLeaf {
                configuration,
                motor_failure_rate: number("lambda"),
            }))
        }
        "battery" => {
            reject_extra(&["lambda", "d", "alpha", "beta"])?;
            Ok(LeafModel::Battery(BatteryLeaf {
                failure_rate: number("lambda"),
                degradation_rate: number("d"),
                usage_rate: number("alpha"),
                inactivity_rate: number("beta"),
            }))
        }
        "processor" => {
            reject_extra(&["mttf_ref", "ea", "k", "tr", "u"])?;
            Ok(LeafModel::Processor(ProcessorLeaf {
                mttf_ref: number("mttf_ref"),
                activation_energy: number("ea"),
                boltzmann: number("k"),
                ref_temperature: number("tr"),
                utilization: number("u"),
            }))
        }
        "custom" => {
            reject_extra(&["chain", "init", "symptom", "config", "map", "default"])?;
            let chain_name = get("chain").ok_or(TreeError::Parse {
                line,
                column: 1,
                message: "custom model requires chain=<name>".into(),
            })?;
            let chain = chains
                .get(chain_name)
                .ok_or_else(|| TreeError::UnresolvedBinding {
                    id: id.into(),
                    detail: format!("chain `{chain_name}` is not declared"),
                })?
                .clone();
            let state_index = |label: &str| {
                chain
                    .state_index(label)
                    .ok_or_else(|| TreeError::UnresolvedBinding {
                        id: id.into(),
                        detail: format!("state `{label}` not in chain `{chain_name}`"),
                    })
            };
            let initial_state = match get("init") {
                Some(label) => state_index(label)?,
                None => 0,
            };
            let symptom = match get("symptom") {
                None => None,
                Some("motors") => {
                    let configuration = get("config")
                        .ok_or(TreeError::Parse {
                            line,
                            column: 1,
                            message: "symptom=motors requires config=<pattern>".into(),
                        })?
                        .parse::<MotorConfiguration>()
                        .map_err(|e| TreeError::UnresolvedBinding {
                            id: id.into(),
                            detail: e.to_string(),
                        })?;
                    let map_text = get("map").ok_or(TreeError::Parse {
                        line,
                        column: 1,
                        message: "symptom=motors requires map=<pattern:state,...>".into(),
                    })?;
                    let mut entries = Vec::new();
                    for pair in map_text.split(',') {
                        let Some((pattern, state)) = pair.split_once(':') else {
                            return Err(TreeError::Parse {
                                line,
                                column: 1,
                                message: format!("map entry `{pair}` is not pattern:state"),
                            });
                        };
                        if pattern.len() != configuration.motor_count()
                            || !pattern.chars().all(|c| c == 'O' || c == 'F')
                        {
                            return Err(TreeError::Parse {
                                line,
                                column: 1,
                                message: format!(
                                    "pattern `{pattern}` must be {} characters of O/F",
                                    configuration.motor_count()
                                ),
                            });
                        }
                        entries.push((pattern.to_string(), state_index(state)?));
                    }
                    let fallback = match get("default") {
                        Some(label) => state_index(label)?,
                        None => *chain
                            .absorbing_states()
                            .iter()
                            .next()
                            .expect("validated chain has an absorbing state"),
                    };
                    Some(MotorSymptomMap {
                        configuration,
                        entries,
                        fallback,
                    })
                }
                Some(other) => {
                    return Err(TreeError::Parse {
                        line,
                        column: 1,
                        message: format!("unsupported symptom source `{other}` (only: motors)"),
                    })
                }
            };
            Ok(LeafModel::Custom(CustomLeaf {
                chain,
                initial_state,
                symptom,
            }))
        }
        other => Err(TreeError::UnresolvedBinding {
            id: id.into(),
            detail: format!("unknown model kind `{other}`"),
        }),
    }
}

fn validate_structure(nodes: &[Node], root: usize) -> Result<(), TreeError> {
    // Single parent per node.
    let mut parent_count = vec![0usize; nodes.len()];
    for node in nodes {
        if let NodeKind::Gate { children, .. } = &node.kind {
            for &c in children {
                parent_count[c] += 1;
                if parent_count[c] > 1 {
                    return Err(TreeError::NodeReused {
                        id: nodes[c].id.clone(),
                    });
                }
            }
        }
    }

    // Cycle check by iterative DFS with colors (0 white, 1 gray, 2 black).
    let mut color = vec![0u8; nodes.len()];
    let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
    color[root] = 1;
    while let Some(&mut (node, ref mut next)) = stack.last_mut() {
        let children: &[usize] = match &nodes[node].kind {
            NodeKind::Gate { children, .. } => children,
            NodeKind::Leaf(_) => &[],
        };
        if *next < children.len() {
            let child = children[*next];
            *next += 1;
            match color[child] {
                0 => {
                    color[child] = 1;
                    stack.push((child, 0));
                }
                1 => {
                    return Err(TreeError::CycleDetected {
                        id: nodes[child].id.clone(),
                    })
                }
                _ => {}
            }
        } else {
            color[node] = 2;
            stack.pop();
        }
    }

    // Everything declared must be reachable (black after the DFS).
    for (i, node) in nodes.iter().enumerate() {
        if color[i] == 0 {
            return Err(TreeError::UnreachableNode {
                id: node.id.clone(),
            });
        }
    }
    Ok(())
}
