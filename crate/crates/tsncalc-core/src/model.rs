//! Network specification: parsing, validation, and normalization of the
//! device/flow model.
//!
//! A network is a set of output ports ("nodes"), each an aggregate
//! rate-latency server shared by `n` traffic classes under Deficit
//! Round-Robin, plus a set of flows, each statically assigned a class and a
//! path (an ordered list of nodes).
//!
//! Specs are TOML documents with three sections:
//!
//! ```toml
//! # optional top level:
//! # epsilon = "8 bit"        scheduler granularity default for all nodes
//! # utilization = 0.5        multiplier applied to every flow rate
//!
//! [classes]
//! names = ["critical", "video"]
//!
//! [[nodes]]
//! id = "S1"
//! rate = "1 Gb/s"            # aggregate service rate R
//! latency = "16 us"          # aggregate service latency T
//! quanta = ["3070 B", "1535 B"]       # per class, in class order
//! max_packet = ["1535 B", "1535 B"]   # per class l_max
//! # epsilon = "1 bit"        per-node override
//!
//! [[flows]]
//! id = "f1"
//! class = "critical"         # class name or zero-based index
//! path = ["S1", "S2"]
//! rate = "20 Mb/s"
//! burst = "3070 B"
//! # destinations = [["S1","S2"], ["S1","S3"]]   # multicast: one flow per path
//! ```
//!
//! Quantities are numbers (already normalized: bits, seconds, bits/second)
//! or strings with units. Data units: `bit`/`b`, `B`, `kb`, `KB`, `Mb`,
//! `MB`, `Gb`, `GB` (decimal SI; `B` = 8 bits). Time units: `s`, `ms`,
//! `us`/`µs`. Rates are `<data>/<time>` composites such as `Gb/s`.
//!
//! # Invariants
//!
//! - After parsing, every stored quantity is in bits / seconds / bits per
//!   second; no unit strings survive.
//! - `parse ∘ serialize ∘ parse` is the identity on normalized specs
//!   (serialization uses shortest-round-trip float formatting, so values
//!   are preserved bit for bit).
//! - Multicast `destinations` are expanded at parse time into one flow per
//!   path, with ids `<id>#0`, `<id>#1`, ….

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::curves::{RateLatency, TokenBucket};

/// Default scheduler granularity: one byte.
pub const DEFAULT_EPSILON_BITS: f64 = 8.0;

/// Fraction of a node's service rate above which total demand triggers a
/// near-saturation warning.
pub const UTILIZATION_WARN_FRACTION: f64 = 0.95;

// ===========================================================================
// Errors and diagnostics
// ===========================================================================

/// Parse-time failure, with a path to the offending field where one exists.
#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    /// The document is not syntactically valid TOML / does not fit the schema.
    #[error("spec syntax: {0}")]
    Syntax(String),
    /// A well-formed field holds an invalid value.
    #[error("{context}: {message}")]
    Field {
        /// Path to the field, e.g. `flows[2].path[1]`.
        context: String,
        /// What is wrong with it.
        message: String,
    },
}

impl SpecError {
    fn field(context: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Field {
            context: context.into(),
            message: message.into(),
        }
    }
}

/// Severity of a validation diagnostic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    /// The spec violates a model invariant; analysis results are undefined.
    Error,
    /// The spec is analyzable but unusual (e.g. a quantum below the maximum
    /// packet size, or demand close to a node's capacity).
    Warning,
}

/// One finding from [`NetworkSpec::validate`].
#[derive(Clone, Debug)]
pub struct Diagnostic {
    /// Error or warning.
    pub severity: Severity,
    /// Human-readable description naming the offending ids.
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

// ===========================================================================
// Normalized model
// ===========================================================================

/// One output port: an aggregate rate-latency server with per-class DRR
/// configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeConfig {
    /// Stable identifier used in spec documents and reports.
    pub id: String,
    /// Aggregate service curve `β_{R,T}` of the port.
    pub service: RateLatency,
    /// Per-class DRR quantum `Q_c` (bits), in class order.
    pub quanta: Vec<f64>,
    /// Per-class maximum packet size `l_max_c` (bits), in class order.
    pub max_packet: Vec<f64>,
    /// Scheduler granularity ε (bits), > 0.
    pub epsilon: f64,
}

impl NodeConfig {
    /// `Q_tot`: the sum of all class quanta at this node.
    #[must_use]
    pub fn quantum_total(&self) -> f64 {
        self.quanta.iter().sum()
    }

    /// Residual deficit `d_max_c = l_max_c − ε`, clamped at 0 (a granularity
    /// above the packet size leaves no carry-over).
    #[must_use]
    pub fn residual_deficit(&self, class: usize) -> f64 {
        (self.max_packet[class] - self.epsilon).max(0.0)
    }
}

/// One (unicast) flow: a class, a path of node indices, and a token-bucket
/// arrival curve at the source.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowSpec {
    /// Stable identifier (multicast expansion appends `#k`).
    pub id: String,
    /// Class index into [`NetworkSpec::classes`].
    pub class: usize,
    /// Node indices into [`NetworkSpec::nodes`], in traversal order; never
    /// empty, no repeats.
    pub path: Vec<usize>,
    /// Source arrival curve `γ_{r,b}`.
    pub arrival: TokenBucket,
}

/// A parsed, normalized network specification.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSpec {
    /// Class names; the index in this list is the class index everywhere.
    pub classes: Vec<String>,
    /// All ports.
    pub nodes: Vec<NodeConfig>,
    /// All flows (multicast already expanded).
    pub flows: Vec<FlowSpec>,
}

impl NetworkSpec {
    /// Number of traffic classes.
    #[must_use]
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Index of the node with the given id.
    #[must_use]
    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Multiplies every flow rate by `factor` (utilization sweeps).
    pub fn scale_rates(&mut self, factor: f64) {
        assert!(factor > 0.0 && factor.is_finite());
        for f in &mut self.flows {
            f.arrival = TokenBucket::new(f.arrival.rate * factor, f.arrival.burst);
        }
    }

    /// Parses a TOML spec document into a normalized spec.
    ///
    /// Errors carry a path to the offending field; unit errors name the
    /// unknown unit; path entries referring to unknown nodes name both the
    /// flow and the node.
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let raw: RawSpec =
            toml::from_str(text).map_err(|e| SpecError::Syntax(e.to_string()))?;
        raw.normalize()
    }

    /// Serializes the normalized spec back to a TOML document. All
    /// quantities are emitted as plain numbers (bits / seconds / bits per
    /// second) with shortest-round-trip formatting, so parsing the output
    /// reproduces this spec exactly.
    #[must_use]
    pub fn to_document(&self) -> String {
        let raw = RawSpec::from_normalized(self);
        toml::to_string_pretty(&raw).expect("normalized spec always serializes")
    }

    /// Checks model invariants beyond what parsing enforces.
    ///
    /// Errors: duplicate node/flow ids, repeated nodes within a path,
    /// non-positive quanta. Warnings: quantum below the class's maximum
    /// packet, granularity at or above a class's maximum packet, total
    /// demand near a node's capacity.
    #[must_use]
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut seen = HashMap::new();
        for n in &self.nodes {
            if seen.insert(n.id.clone(), ()).is_some() {
                out.push(Diagnostic {
                    severity: Severity::Error,
                    message: format!("duplicate node id \"{}\"", n.id),
                });
            }
        }
        let mut seen = HashMap::new();
        for f in &self.flows {
            if seen.insert(f.id.clone(), ()).is_some() {
                out.push(Diagnostic {
                    severity: Severity::Error,
                    message: format!("duplicate flow id \"{}\"", f.id),
                });
            }
            let mut visited = HashMap::new();
            for &v in &f.path {
                if visited.insert(v, ()).is_some() {
                    out.push(Diagnostic {
                        severity: Severity::Error,
                        message: format!(
                            "flow \"{}\" visits node \"{}\" more than once",
                            f.id, self.nodes[v].id
                        ),
                    });
                }
            }
        }
        for n in &self.nodes {
            for (c, name) in self.classes.iter().enumerate() {
                if n.quanta[c] <= 0.0 {
                    out.push(Diagnostic {
                        severity: Severity::Error,
                        message: format!(
                            "node \"{}\": quantum for class \"{name}\" must be positive",
                            n.id
                        ),
                    });
                } else if n.quanta[c] < n.max_packet[c] {
                    out.push(Diagnostic {
                        severity: Severity::Warning,
                        message: format!(
                            "node \"{}\": quantum {} below max packet {} for class \
                             \"{name}\" (several rounds per packet)",
                            n.id, n.quanta[c], n.max_packet[c]
                        ),
                    });
                }
                if n.epsilon >= n.max_packet[c] {
                    out.push(Diagnostic {
                        severity: Severity::Warning,
                        message: format!(
                            "node \"{}\": granularity {} not below max packet {} for \
                             class \"{name}\"",
                            n.id, n.epsilon, n.max_packet[c]
                        ),
                    });
                }
            }
        }
        for (v, n) in self.nodes.iter().enumerate() {
            let demand: f64 = self
                .flows
                .iter()
                .filter(|f| f.path.contains(&v))
                .map(|f| f.arrival.rate)
                .sum();
            if demand >= UTILIZATION_WARN_FRACTION * n.service.rate {
                out.push(Diagnostic {
                    severity: Severity::Warning,
                    message: format!(
                        "node \"{}\": total demand {demand} approaches service rate {}",
                        n.id, n.service.rate
                    ),
                });
            }
        }
        out
    }
}

// ===========================================================================
// Unit handling
// ===========================================================================

fn data_unit_bits(unit: &str) -> Option<f64> {
    Some(match unit {
        "bit" | "b" => 1.0,
        "B" | "byte" => 8.0,
        "kb" | "Kb" => 1e3,
        "KB" => 8e3,
        "Mb" => 1e6,
        "MB" => 8e6,
        "Gb" => 1e9,
        "GB" => 8e9,
        _ => return None,
    })
}

fn time_unit_seconds(unit: &str) -> Option<f64> {
    Some(match unit {
        "s" => 1.0,
        "ms" => 1e-3,
        "us" | "\u{b5}s" => 1e-6,
        _ => return None,
    })
}

/// Splits `"16 us"` / `"16us"` into the numeric part and the unit suffix.
fn split_quantity(s: &str) -> Result<(f64, &str), String> {
    let s = s.trim();
    let unit_start = s
        .char_indices()
        .find(|(_, ch)| ch.is_alphabetic() || *ch == '\u{b5}')
        .map_or(s.len(), |(i, _)| i);
    let (num, unit) = s.split_at(unit_start);
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("\"{s}\" has no leading number"))?;
    Ok((value, unit.trim()))
}

fn parse_data_bits(s: &str) -> Result<f64, String> {
    let (value, unit) = split_quantity(s)?;
    if unit.is_empty() {
        return Ok(value);
    }
    data_unit_bits(unit)
        .map(|f| value * f)
        .ok_or_else(|| format!("unknown data unit \"{unit}\""))
}

fn parse_time_seconds(s: &str) -> Result<f64, String> {
    let (value, unit) = split_quantity(s)?;
    if unit.is_empty() {
        return Ok(value);
    }
    time_unit_seconds(unit)
        .map(|f| value * f)
        .ok_or_else(|| format!("unknown time unit \"{unit}\""))
}

fn parse_rate_bits_per_second(s: &str) -> Result<f64, String> {
    let (value, unit) = split_quantity(s)?;
    if unit.is_empty() {
        return Ok(value);
    }
    let (data, time) = unit
        .split_once('/')
        .ok_or_else(|| format!("rate unit \"{unit}\" is not of the form data/time"))?;
    let d = data_unit_bits(data.trim())
        .ok_or_else(|| format!("unknown data unit \"{}\"", data.trim()))?;
    let t = time_unit_seconds(time.trim())
        .ok_or_else(|| format!("unknown time unit \"{}\"", time.trim()))?;
    Ok(value * d / t)
}

// ===========================================================================
// Raw document schema
// ===========================================================================

/// A quantity as written in a document: a bare (normalized) number or a
/// string with a unit.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
enum RawQuantity {
    Number(f64),
    Text(String),
}

impl RawQuantity {
    fn resolve(
        &self,
        context: &str,
        parse: impl Fn(&str) -> Result<f64, String>,
    ) -> Result<f64, SpecError> {
        let value = match self {
            RawQuantity::Number(v) => *v,
            RawQuantity::Text(s) => {
                parse(s).map_err(|m| SpecError::field(context, m))?
            }
        };
        if !value.is_finite() || value < 0.0 {
            return Err(SpecError::field(
                context,
                format!("value {value} must be finite and non-negative"),
            ));
        }
        Ok(value)
    }
}

/// A class reference: name or zero-based index.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
enum RawClassRef {
    Index(usize),
    Name(String),
}

#[derive(Debug, Deserialize, Serialize)]
struct RawClasses {
    names: Vec<String>,
}

#[derive(Debug, Deserialize, Serialize)]
struct RawNode {
    id: String,
    rate: RawQuantity,
    latency: RawQuantity,
    quanta: Vec<RawQuantity>,
    max_packet: Vec<RawQuantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<RawQuantity>,
}

#[derive(Debug, Deserialize, Serialize)]
struct RawFlow {
    id: String,
    class: RawClassRef,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    destinations: Option<Vec<Vec<String>>>,
    rate: RawQuantity,
    burst: RawQuantity,
}

#[derive(Debug, Deserialize, Serialize)]
struct RawSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<RawQuantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    utilization: Option<f64>,
    classes: RawClasses,
    #[serde(default)]
    nodes: Vec<RawNode>,
    #[serde(default)]
    flows: Vec<RawFlow>,
}

impl RawSpec {
    fn normalize(self) -> Result<NetworkSpec, SpecError> {
        let classes = self.classes.names;
        if classes.is_empty() {
            return Err(SpecError::field("classes.names", "at least one class"));
        }
        let n_classes = classes.len();
        let default_epsilon = match &self.epsilon {
            Some(q) => q.resolve("epsilon", parse_data_bits)?,
            None => DEFAULT_EPSILON_BITS,
        };
        if default_epsilon <= 0.0 {
            return Err(SpecError::field("epsilon", "granularity must be positive"));
        }

        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (i, raw) in self.nodes.iter().enumerate() {
            let ctx = |field: &str| format!("nodes[{i}].{field}");
            let rate = raw.rate.resolve(&ctx("rate"), parse_rate_bits_per_second)?;
            if rate <= 0.0 {
                return Err(SpecError::field(ctx("rate"), "service rate must be positive"));
            }
            let latency = raw.latency.resolve(&ctx("latency"), parse_time_seconds)?;
            let expect_len = |name: &str, len: usize| -> Result<(), SpecError> {
                if len != n_classes {
                    return Err(SpecError::field(
                        ctx(name),
                        format!("expected {n_classes} entries (one per class), got {len}"),
                    ));
                }
                Ok(())
            };
            expect_len("quanta", raw.quanta.len())?;
            expect_len("max_packet", raw.max_packet.len())?;
            let mut quanta = Vec::with_capacity(n_classes);
            for (c, q) in raw.quanta.iter().enumerate() {
                quanta.push(q.resolve(&format!("nodes[{i}].quanta[{c}]"), parse_data_bits)?);
            }
            let mut max_packet = Vec::with_capacity(n_classes);
            for (c, q) in raw.max_packet.iter().enumerate() {
                max_packet
                    .push(q.resolve(&format!("nodes[{i}].max_packet[{c}]"), parse_data_bits)?);
            }
            let epsilon = match &raw.epsilon {
                Some(q) => q.resolve(&ctx("epsilon"), parse_data_bits)?,
                None => default_epsilon,
            };
            if epsilon <= 0.0 {
                return Err(SpecError::field(ctx("epsilon"), "granularity must be positive"));
            }
            nodes.push(NodeConfig {
                id: raw.id.clone(),
                service: RateLatency::new(rate, latency),
                quanta,
                max_packet,
                epsilon,
            });
        }

        let node_index: HashMap<&str, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect();

        let utilization = self.utilization.unwrap_or(1.0);
        if !(utilization > 0.0 && utilization.is_finite()) {
            return Err(SpecError::field("utilization", "must be positive and finite"));
        }

        let mut flows = Vec::new();
        for (i, raw) in self.flows.iter().enumerate() {
            let ctx = |field: &str| format!("flows[{i}].{field}");
            let class = match &raw.class {
                RawClassRef::Index(k) => {
                    if *k >= n_classes {
                        return Err(SpecError::field(
                            ctx("class"),
                            format!("class index {k} out of range (have {n_classes})"),
                        ));
                    }
                    *k
                }
                RawClassRef::Name(name) => classes
                    .iter()
                    .position(|c| c == name)
                    .ok_or_else(|| {
                        SpecError::field(ctx("class"), format!("unknown class \"{name}\""))
                    })?,
            };
            let rate = raw.rate.resolve(&ctx("rate"), parse_rate_bits_per_second)?;
            let burst = raw.burst.resolve(&ctx("burst"), parse_data_bits)?;
            let arrival = TokenBucket::new(rate * utilization, burst);

            let resolve_path = |path: &[String], ctx: String| -> Result<Vec<usize>, SpecError> {
                if path.is_empty() {
                    return Err(SpecError::field(ctx, "path must not be empty"));
                }
                path.iter()
                    .map(|id| {
                        node_index.get(id.as_str()).copied().ok_or_else(|| {
                            SpecError::field(
                                &ctx,
                                format!("flow \"{}\" references unknown node \"{id}\"", raw.id),
                            )
                        })
                    })
                    .collect()
            };

            match (&raw.path, &raw.destinations) {
                (Some(path), None) => {
                    flows.push(FlowSpec {
                        id: raw.id.clone(),
                        class,
                        path: resolve_path(path, ctx("path"))?,
                        arrival,
                    });
                }
                (None, Some(dests)) => {
                    if dests.is_empty() {
                        return Err(SpecError::field(
                            ctx("destinations"),
                            "multicast needs at least one path",
                        ));
                    }
                    for (k, path) in dests.iter().enumerate() {
                        flows.push(FlowSpec {
                            id: format!("{}#{k}", raw.id),
                            class,
                            path: resolve_path(path, format!("flows[{i}].destinations[{k}]"))?,
                            arrival,
                        });
                    }
                }
                (Some(_), Some(_)) => {
                    return Err(SpecError::field(
                        ctx("path"),
                        "give either path or destinations, not both",
                    ));
                }
                (None, None) => {
                    return Err(SpecError::field(
                        ctx("path"),
                        "flow needs a path (or destinations for multicast)",
                    ));
                }
            }
        }

        Ok(NetworkSpec { classes, nodes, flows })
    }

    /// Rebuilds a raw document from a normalized spec; quantities become
    /// plain numbers, multicast stays expanded, utilization is folded in.
    fn from_normalized(spec: &NetworkSpec) -> Self {
        RawSpec {
            epsilon: None,
            utilization: None,
            classes: RawClasses {
                names: spec.classes.clone(),
            },
            nodes: spec
                .nodes
                .iter()
                .map(|n| RawNode {
                    id: n.id.clone(),
                    rate: RawQuantity::Number(n.service.rate),
                    latency: RawQuantity::Number(n.service.latency),
                    quanta: n.quanta.iter().map(|&q| RawQuantity::Number(q)).collect(),
                    max_packet: n
                        .max_packet
                        .iter()
                        .map(|&q| RawQuantity::Number(q))
                        .collect(),
                    epsilon: Some(RawQuantity::Number(n.epsilon)),
                })
                .collect(),
            flows: spec
                .flows
                .iter()
                .map(|f| RawFlow {
                    id: f.id.clone(),
                    class: RawClassRef::Name(spec.classes[f.class].clone()),
                    path: Some(f.path.iter().map(|&v| spec.nodes[v].id.clone()).collect()),
                    destinations: None,
                    rate: RawQuantity::Number(f.arrival.rate),
                    burst: RawQuantity::Number(f.arrival.burst),
                })
                .collect(),
        }
    }
}

// ===========================================================================
// Tests
// ===========================================================================
