//! Strategy certificates: extraction, serialization, verification.
//!
//! A certificate is a self-contained winning strategy. Nodes are keyed by
//! the canonical state string and shared across paths, so the strategy is a
//! DAG rather than a duplicated tree. Every non-terminal node answers every
//! adversary item with either a placement (and the resulting child state) or
//! a cheat proof (the emitted class multiset, recorded as unpackable).
//!
//! Certificates never appeal to dominance reasoning: extraction expands
//! cache-assisted wins by re-solving, so the verifier only needs the game
//! rules. [`Certificate::verify`] recomputes everything it checks — guard
//! arithmetic inline, item universes, placements, child keys, and every
//! cheat proof from scratch — and shares no code with the solver's guards
//! beyond the model's `place` and the packing oracle's `fits_exact`.
//!
//! The wire format is a single JSON document; the exact grammar is described
//! in `docs/certificate-format.md`. Keys are emitted in sorted order so
//! serialization is byte-stable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::model::{render_state, FillState, GameState, History, Item, Params, Placement};
use crate::packing::{che, fits_exact, fmt_multiset, PackingInstance};
use crate::solver::{available_item_count, generate_items, SolveInterrupt, Solver};

/// Version tag of the serialized certificate layout.
pub const FORMAT_VERSION: u64 = 1;

/// Why a state needs no further play.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalReason {
    /// The fill levels already sum to the adversary's whole volume budget.
    VolumeExceeded,
    /// All outstanding volume fits the emptiest bin.
    EmptiestBin,
    /// No adversary item is available.
    NoItems,
}

impl TerminalReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            TerminalReason::VolumeExceeded => "volume_exceeded",
            TerminalReason::EmptiestBin => "emptiest_bin",
            TerminalReason::NoItems => "no_items",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "volume_exceeded" => Some(TerminalReason::VolumeExceeded),
            "emptiest_bin" => Some(TerminalReason::EmptiestBin),
            "no_items" => Some(TerminalReason::NoItems),
            _ => None,
        }
    }
}

impl fmt::Display for TerminalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The strategy's answer to one adversary item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    /// Put the item into this (canonical) bin; play continues at `child`.
    Place { bin: usize, child: String },
    /// No placement survives, but the emitted classes — this item included —
    /// cannot fit the offline bins, so the adversary cheated.
    CheatProof { classes: Vec<u32> },
}

/// One node of the strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategyNode {
    Terminal(TerminalReason),
    /// One decision per available adversary item, keyed by item string.
    Branch(BTreeMap<String, Decision>),
}

/// A complete winning strategy for one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub params: Params,
    /// Canonical key of the starting state (all bins empty, nothing seen).
    pub root: String,
    pub nodes: BTreeMap<String, StrategyNode>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtractError {
    #[error("instance is not a win for the online player")]
    NotWinning,
    #[error("extraction interrupted: {0}")]
    Interrupted(SolveInterrupt),
    #[error("extraction found no decision at {state}; solver and replay disagree")]
    Inconsistent { state: String },
}

/// Builds the certificate for a winning instance by replaying the strategy:
/// at each node the first bin whose successor solves as a win is recorded,
/// and items no bin survives get their cheat proof. States the original
/// search settled through the cache are simply re-solved here (cheaply, the
/// cache is warm), which keeps the certificate free of dominance reasoning.
pub fn extract(solver: &mut Solver) -> Result<Certificate, ExtractError> {
    let params = solver.params();
    let winnable = solver.solve_initial().map_err(ExtractError::Interrupted)?;
    if !winnable {
        return Err(ExtractError::NotWinning);
    }
    let mut nodes = BTreeMap::new();
    let root = GameState::initial(&params);
    record_node(solver, &root.fill, &root.history, &mut nodes)?;
    Ok(Certificate {
        params,
        root: root.to_string(),
        nodes,
    })
}

fn record_node(
    solver: &mut Solver,
    fill: &FillState,
    history: &History,
    nodes: &mut BTreeMap<String, StrategyNode>,
) -> Result<(), ExtractError> {
    let key = render_state(fill, history);
    if nodes.contains_key(&key) {
        return Ok(());
    }
    let params = solver.params();
    let total = fill.total();
    let volume = params.offline_volume();
    if total >= volume {
        nodes.insert(key, StrategyNode::Terminal(TerminalReason::VolumeExceeded));
        return Ok(());
    }
    if volume - total - 1 + (fill.min_level() as u64) < params.capacity() as u64 {
        nodes.insert(key, StrategyNode::Terminal(TerminalReason::EmptiestBin));
        return Ok(());
    }
    let items = generate_items(&params, fill);
    if items.is_empty() {
        nodes.insert(key, StrategyNode::Terminal(TerminalReason::NoItems));
        return Ok(());
    }

    let mut branches = BTreeMap::new();
    for item in items {
        let grown = (item.class() > 0).then(|| history.with(item.class()));
        let next_history = grown.as_ref().unwrap_or(history);
        let mut decision = None;
        for bin in 0..params.bins() {
            let placed = fill
                .place(item, bin, &params)
                .expect("bin index within range");
            if let Placement::NewFill(next_fill) = placed {
                let wins = solver
                    .solve_parts(&next_fill, next_history)
                    .map_err(ExtractError::Interrupted)?;
                if wins {
                    let child = render_state(&next_fill, next_history);
                    record_node(solver, &next_fill, next_history, nodes)?;
                    decision = Some(Decision::Place { bin, child });
                    break;
                }
            }
        }
        let decision = match decision {
            Some(d) => d,
            None => {
                // Certificates always justify a stuck item against the
                // history including that item; any weaker cheat proof the
                // search may have used implies this one.
                if !che(next_history, &params) {
                    return Err(ExtractError::Inconsistent { state: key });
                }
                Decision::CheatProof {
                    classes: next_history.classes().to_vec(),
                }
            }
        };
        branches.insert(item.to_string(), decision);
    }
    nodes.insert(key, StrategyNode::Branch(branches));
    Ok(())
}

/// What a failed verification found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyFailure {
    RootStateMismatch { expected: String },
    MissingNode,
    MalformedStateKey,
    StateOutsideInstance,
    WrongTerminalReason { recorded: TerminalReason },
    BranchAtSettledState,
    BranchCountMismatch { expected: u64, found: u64 },
    UnknownItem { item: String },
    IllegalPlacement { item: String, bin: usize },
    WrongChildKey { item: String, expected: String },
    CheatProofMismatch { item: String },
    CheatProofRejected { item: String, multiset: String },
    UnreachableNode,
}

impl fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyFailure::RootStateMismatch { expected } => {
                write!(f, "root is not the starting state {expected}")
            }
            VerifyFailure::MissingNode => write!(f, "referenced node is missing"),
            VerifyFailure::MalformedStateKey => write!(f, "state key is not canonical"),
            VerifyFailure::StateOutsideInstance => {
                write!(f, "state holds levels or classes outside the instance")
            }
            VerifyFailure::WrongTerminalReason { recorded } => {
                write!(f, "terminal reason {recorded} does not hold here")
            }
            VerifyFailure::BranchAtSettledState => {
                write!(f, "state is already settled but carries branches")
            }
            VerifyFailure::BranchCountMismatch { expected, found } => {
                write!(f, "state has {expected} available items but {found} decisions")
            }
            VerifyFailure::UnknownItem { item } => {
                write!(f, "decision for unavailable item {item}")
            }
            VerifyFailure::IllegalPlacement { item, bin } => {
                write!(f, "illegal placement of {item} into bin {bin}")
            }
            VerifyFailure::WrongChildKey { item, expected } => {
                write!(f, "child key for {item} should be {expected}")
            }
            VerifyFailure::CheatProofMismatch { item } => {
                write!(f, "cheat proof for {item} records the wrong multiset")
            }
            VerifyFailure::CheatProofRejected { item, multiset } => {
                write!(
                    f,
                    "cheat proof for {item} names the packable multiset {multiset}"
                )
            }
            VerifyFailure::UnreachableNode => write!(f, "node unreachable from the root"),
        }
    }
}

/// Verdict of [`Certificate::verify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyOutcome {
    Valid,
    Invalid {
        failure: VerifyFailure,
        state: String,
    },
}

impl VerifyOutcome {
    pub fn is_valid(&self) -> bool {
        matches!(self, VerifyOutcome::Valid)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("certificate format error: {0}")]
pub struct CertificateParseError(String);

impl Certificate {
    /// Checks the whole strategy against the game rules alone.
    ///
    /// Walks every node reachable from the root and recomputes each claim:
    /// terminal guards must hold (and be the first applicable one), branch
    /// nodes must answer exactly the available items, placements must be
    /// legal with correctly keyed children, and cheat proofs must record the
    /// node's history plus the branch item and that multiset must really be
    /// unpackable — the recorded claim is never trusted. Nodes the walk
    /// never reaches are themselves a failure.
    pub fn verify(&self) -> VerifyOutcome {
        let params = self.params;
        let invalid = |failure: VerifyFailure, state: &str| VerifyOutcome::Invalid {
            failure,
            state: state.to_string(),
        };

        let expected_root = GameState::initial(&params).to_string();
        if self.root != expected_root {
            return invalid(
                VerifyFailure::RootStateMismatch {
                    expected: expected_root,
                },
                &self.root,
            );
        }

        let mut visited: BTreeSet<String> = BTreeSet::new();
        let mut pending = vec![self.root.clone()];
        while let Some(key) = pending.pop() {
            if !visited.insert(key.clone()) {
                continue;
            }
            let Some(node) = self.nodes.get(&key) else {
                return invalid(VerifyFailure::MissingNode, &key);
            };
            let Ok(state) = key.parse::<GameState>() else {
                return invalid(VerifyFailure::MalformedStateKey, &key);
            };
            if state.fill.bin_count() != params.bins()
                || state.fill.levels().iter().any(|&l| l >= params.capacity())
                || state
                    .history
                    .classes()
                    .iter()
                    .any(|&c| c == 0 || c >= params.granularity())
            {
                return invalid(VerifyFailure::StateOutsideInstance, &key);
            }

            // guard arithmetic, recomputed here on purpose
            let total = state.fill.total();
            let volume = params.bins() as u64 * params.granularity() as u64;
            let settled = if total >= volume {
                Some(TerminalReason::VolumeExceeded)
            } else if volume - total - 1 + (state.fill.min_level() as u64)
                < params.capacity() as u64
            {
                Some(TerminalReason::EmptiestBin)
            } else {
                None
            };

            match node {
                StrategyNode::Terminal(recorded) => {
                    let expected = settled.or_else(|| {
                        (available_item_count(&params, &state.fill) == 0)
                            .then_some(TerminalReason::NoItems)
                    });
                    if expected != Some(*recorded) {
                        return invalid(
                            VerifyFailure::WrongTerminalReason {
                                recorded: *recorded,
                            },
                            &key,
                        );
                    }
                }
                StrategyNode::Branch(branches) => {
                    if settled.is_some() {
                        return invalid(VerifyFailure::BranchAtSettledState, &key);
                    }
                    let item_count = available_item_count(&params, &state.fill);
                    if item_count == 0 {
                        return invalid(VerifyFailure::BranchAtSettledState, &key);
                    }
                    // count first: a document claiming an absurd instance
                    // must pay for its branch set in bytes before the item
                    // universe is ever materialized
                    if branches.len() as u64 != item_count {
                        return invalid(
                            VerifyFailure::BranchCountMismatch {
                                expected: item_count,
                                found: branches.len() as u64,
                            },
                            &key,
                        );
                    }
                    let expected: BTreeMap<String, Item> = generate_items(&params, &state.fill)
                        .iter()
                        .map(|i| (i.to_string(), *i))
                        .collect();
                    for item_key in branches.keys() {
                        if !expected.contains_key(item_key) {
                            return invalid(
                                VerifyFailure::UnknownItem {
                                    item: item_key.clone(),
                                },
                                &key,
                            );
                        }
                    }
                    for (item_key, decision) in branches {
                        let item = expected[item_key];
                        let grown = (item.class() > 0).then(|| state.history.with(item.class()));
                        let next_history = grown.as_ref().unwrap_or(&state.history);
                        match decision {
                            Decision::Place { bin, child } => {
                                let placed = if *bin < params.bins() {
                                    state
                                        .fill
                                        .place(item, *bin, &params)
                                        .expect("bin index within range")
                                } else {
                                    Placement::OnlineLoss
                                };
                                let Placement::NewFill(next_fill) = placed else {
                                    return invalid(
                                        VerifyFailure::IllegalPlacement {
                                            item: item_key.clone(),
                                            bin: *bin,
                                        },
                                        &key,
                                    );
                                };
                                let expected_child = render_state(&next_fill, next_history);
                                if *child != expected_child {
                                    return invalid(
                                        VerifyFailure::WrongChildKey {
                                            item: item_key.clone(),
                                            expected: expected_child,
                                        },
                                        &key,
                                    );
                                }
                                if !self.nodes.contains_key(child) {
                                    return invalid(VerifyFailure::MissingNode, child);
                                }
                                pending.push(child.clone());
                            }
                            Decision::CheatProof { classes } => {
                                let mut recorded = classes.clone();
                                recorded.sort_unstable_by(|a, b| b.cmp(a));
                                if recorded != next_history.classes() {
                                    return invalid(
                                        VerifyFailure::CheatProofMismatch {
                                            item: item_key.clone(),
                                        },
                                        &key,
                                    );
                                }
                                let rejected = if next_history.is_empty() {
                                    // nothing emitted packs trivially
                                    true
                                } else {
                                    let capacities = vec![params.granularity() - 1; params.bins()];
                                    let instance = PackingInstance::new(
                                        next_history.classes().to_vec(),
                                        capacities,
                                    )
                                    .expect("classes and offline sizes are positive");
                                    fits_exact(&instance)
                                };
                                if rejected {
                                    return invalid(
                                        VerifyFailure::CheatProofRejected {
                                            item: item_key.clone(),
                                            multiset: fmt_multiset(next_history.classes()),
                                        },
                                        &key,
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }

        if visited.len() != self.nodes.len() {
            let orphan = self
                .nodes
                .keys()
                .find(|k| !visited.contains(*k))
                .expect("some node was not visited");
            return invalid(VerifyFailure::UnreachableNode, orphan);
        }
        VerifyOutcome::Valid
    }

    /// Serializes to the JSON document format. Byte-stable: keys are sorted
    /// and the layout is fixed, so equal certificates serialize identically.
    pub fn to_json(&self) -> String {
        let mut doc = Map::new();
        doc.insert("format_version".into(), json!(FORMAT_VERSION));
        doc.insert(
            "params".into(),
            json!({
                "m": self.params.bins(),
                "k": self.params.granularity(),
                "s": self.params.capacity(),
            }),
        );
        doc.insert("root".into(), json!(self.root));
        let mut nodes = Map::new();
        for (key, node) in &self.nodes {
            nodes.insert(key.clone(), node_to_value(node));
        }
        doc.insert("nodes".into(), Value::Object(nodes));
        let mut text = serde_json::to_string_pretty(&Value::Object(doc))
            .expect("certificate serialization cannot fail");
        text.push('\n');
        text
    }

    /// Parses and structurally validates a JSON certificate. Syntax errors
    /// carry the line and column; structural errors name the offending path.
    /// Game-rule violations are left to [`Certificate::verify`].
    pub fn from_json(text: &str) -> Result<Self, CertificateParseError> {
        let err = |msg: String| CertificateParseError(msg);
        let value: Value = serde_json::from_str(text).map_err(|e| err(e.to_string()))?;
        let doc = expect_object(
            &value,
            "document",
            &["format_version", "nodes", "params", "root"],
        )?;

        let version = expect_u64(&doc["format_version"], "format_version")?;
        if version != FORMAT_VERSION {
            return Err(err(format!(
                "unsupported format_version {version}, expected {FORMAT_VERSION}"
            )));
        }

        let params_obj = expect_object(&doc["params"], "params", &["k", "m", "s"])?;
        let m = expect_u64(&params_obj["m"], "params.m")?;
        let k = expect_u64(&params_obj["k"], "params.k")?;
        let s = expect_u64(&params_obj["s"], "params.s")?;
        let params = Params::new(
            usize::try_from(m).map_err(|_| err("params.m out of range".into()))?,
            u32::try_from(k).map_err(|_| err("params.k out of range".into()))?,
            u32::try_from(s).map_err(|_| err("params.s out of range".into()))?,
        )
        .map_err(|e| err(format!("invalid params: {e}")))?;

        let root = expect_string(&doc["root"], "root")?.to_string();

        let nodes_obj = match &doc["nodes"] {
            Value::Object(map) => map,
            _ => return Err(err("nodes must be an object".into())),
        };
        let mut nodes = BTreeMap::new();
        for (key, node_value) in nodes_obj {
            let node = node_from_value(node_value, &format!("nodes[{key}]"))?;
            nodes.insert(key.clone(), node);
        }

        Ok(Certificate {
            params,
            root,
            nodes,
        })
    }
}

fn node_to_value(node: &StrategyNode) -> Value {
    match node {
        StrategyNode::Terminal(reason) => json!({ "terminal": reason.as_str() }),
        StrategyNode::Branch(branches) => {
            let mut map = Map::new();
            for (item, decision) in branches {
                let value = match decision {
                    Decision::Place { bin, child } => json!({ "bin": bin, "child": child }),
                    Decision::CheatProof { classes } => json!({ "cheat": classes }),
                };
                map.insert(item.clone(), value);
            }
            json!({ "branches": Value::Object(map) })
        }
    }
}

fn node_from_value(value: &Value, path: &str) -> Result<StrategyNode, CertificateParseError> {
    let err = |msg: String| CertificateParseError(msg);
    let Value::Object(obj) = value else {
        return Err(err(format!("{path} must be an object")));
    };
    match (obj.get("terminal"), obj.get("branches")) {
        (Some(reason), None) if obj.len() == 1 => {
            let reason_str = expect_string(reason, &format!("{path}.terminal"))?;
            let reason = TerminalReason::parse(reason_str)
                .ok_or_else(|| err(format!("{path}.terminal: unknown reason {reason_str:?}")))?;
            Ok(StrategyNode::Terminal(reason))
        }
        (None, Some(branches)) if obj.len() == 1 => {
            let Value::Object(map) = branches else {
                return Err(err(format!("{path}.branches must be an object")));
            };
            let mut decisions = BTreeMap::new();
            for (item, decision_value) in map {
                let decision_path = format!("{path}.branches[{item}]");
                decisions.insert(
                    item.clone(),
                    decision_from_value(decision_value, &decision_path)?,
                );
            }
            Ok(StrategyNode::Branch(decisions))
        }
        _ => Err(err(format!(
            "{path} must have exactly one of \"terminal\" or \"branches\""
        ))),
    }
}

fn decision_from_value(value: &Value, path: &str) -> Result<Decision, CertificateParseError> {
    let err = |msg: String| CertificateParseError(msg);
    let Value::Object(obj) = value else {
        return Err(err(format!("{path} must be an object")));
    };
    if obj.len() == 2 && obj.contains_key("bin") && obj.contains_key("child") {
        let bin = expect_u64(&obj["bin"], &format!("{path}.bin"))?;
        let bin = usize::try_from(bin).map_err(|_| err(format!("{path}.bin out of range")))?;
        let child = expect_string(&obj["child"], &format!("{path}.child"))?.to_string();
        return Ok(Decision::Place { bin, child });
    }
    if obj.len() == 1 && obj.contains_key("cheat") {
        let Value::Array(raw) = &obj["cheat"] else {
            return Err(err(format!("{path}.cheat must be an array")));
        };
        let mut classes = Vec::with_capacity(raw.len());
        for (i, entry) in raw.iter().enumerate() {
            let class = expect_u64(entry, &format!("{path}.cheat[{i}]"))?;
            classes.push(
                u32::try_from(class).map_err(|_| err(format!("{path}.cheat[{i}] out of range")))?,
            );
        }
        return Ok(Decision::CheatProof { classes });
    }
    Err(err(format!(
        "{path} must be {{\"bin\",\"child\"}} or {{\"cheat\"}}"
    )))
}

fn expect_object<'a>(
    value: &'a Value,
    path: &str,
    exact_keys: &[&str],
) -> Result<&'a Map<String, Value>, CertificateParseError> {
    let Value::Object(obj) = value else {
        return Err(CertificateParseError(format!("{path} must be an object")));
    };
    for key in exact_keys {
        if !obj.contains_key(*key) {
            return Err(CertificateParseError(format!(
                "{path} is missing \"{key}\""
            )));
        }
    }
    for key in obj.keys() {
        if !exact_keys.contains(&key.as_str()) {
            return Err(CertificateParseError(format!(
                "{path} has unexpected key \"{key}\""
            )));
        }
    }
    Ok(obj)
}

fn expect_u64(value: &Value, path: &str) -> Result<u64, CertificateParseError> {
    value
        .as_u64()
        .ok_or_else(|| CertificateParseError(format!("{path} must be an unsigned integer")))
}

fn expect_string<'a>(value: &'a Value, path: &str) -> Result<&'a str, CertificateParseError> {
    value
        .as_str()
        .ok_or_else(|| CertificateParseError(format!("{path} must be a string")))
}
