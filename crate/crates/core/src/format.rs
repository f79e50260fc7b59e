//! Line-oriented text format for social graphs.
//!
//! ```text
//! # comment
//! entities 3
//! network 1
//! entity 1 bandwidth=5000000 malicious=0
//! entity 2 bandwidth=1200000 malicious=1
//! entity 3 bandwidth=800000 malicious=0
//! link 1 2 network=1 q:freq=3 q:time=3 c:major=POSITIVE c:relationship=POSITIVE
//! link 2 3 network=1 q:freq=1 q:time=4 c:major=NEUTRAL c:relationship=NEGATIVE tv=0.25
//! ```
//!
//! `network` lines are optional; networks named by links are registered on
//! the fly. Floats are written in shortest round-trip form, so serialising an
//! `f64` graph and parsing it back reproduces it exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::fuzzy::QualitativeClass;
use crate::graph::{EntityId, FriendLink, NetworkId, SocialGraph};
use crate::scalar::Scalar;

/// Malformed input. `line` is 1-based; 0 marks whole-file problems.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{}{message}", if *.line > 0 { format!("line {}: ", .line) } else { String::new() })]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

/// Splits `key=value` words into a map, rejecting repeated keys.
pub(crate) fn key_values<'a>(
    words: impl Iterator<Item = &'a str>,
) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for word in words {
        let (k, v) = word
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, found `{word}`"))?;
        if k.is_empty() {
            return Err(format!("empty key in `{word}`"));
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(format!("key `{k}` given twice"));
        }
    }
    Ok(map)
}

fn parse_num<N: std::str::FromStr>(line: usize, what: &str, s: &str) -> Result<N, ParseError> {
    s.parse()
        .map_err(|_| ParseError::new(line, format!("invalid {what} `{s}`")))
}

pub fn parse_graph<T: Scalar>(text: &str) -> Result<SocialGraph<T>, ParseError> {
    let mut graph = SocialGraph::new();
    let mut declared: Option<(usize, usize)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let directive = words.next().unwrap_or_default();
        if declared.is_none() && directive != "entities" {
            return Err(ParseError::new(ln, "expected `entities <n>` header first"));
        }
        match directive {
            "entities" => {
                if declared.is_some() {
                    return Err(ParseError::new(ln, "duplicate `entities` header"));
                }
                let n = words
                    .next()
                    .ok_or_else(|| ParseError::new(ln, "`entities` needs a count"))?;
                declared = Some((parse_num(ln, "entity count", n)?, ln));
                if let Some(extra) = words.next() {
                    return Err(ParseError::new(ln, format!("unexpected `{extra}`")));
                }
            }
            "network" => {
                let id = words
                    .next()
                    .ok_or_else(|| ParseError::new(ln, "`network` needs an id"))?;
                graph.add_network(NetworkId(parse_num(ln, "network id", id)?));
                if let Some(extra) = words.next() {
                    return Err(ParseError::new(ln, format!("unexpected `{extra}`")));
                }
            }
            "entity" => {
                let id = words
                    .next()
                    .ok_or_else(|| ParseError::new(ln, "`entity` needs an id"))?;
                let id = EntityId(parse_num(ln, "entity id", id)?);
                let kv = key_values(words).map_err(|m| ParseError::new(ln, m))?;
                let mut bandwidth = None;
                let mut malicious = false;
                for (k, v) in &kv {
                    match k.as_str() {
                        "bandwidth" => bandwidth = Some(parse_num::<f64>(ln, "bandwidth", v)?),
                        "malicious" => {
                            malicious = match v.as_str() {
                                "0" => false,
                                "1" => true,
                                _ => return Err(ParseError::new(ln, format!("malicious must be 0 or 1, got `{v}`"))),
                            }
                        }
                        other => return Err(ParseError::new(ln, format!("unknown entity key `{other}`"))),
                    }
                }
                let bandwidth =
                    bandwidth.ok_or_else(|| ParseError::new(ln, "entity is missing `bandwidth`"))?;
                graph
                    .add_entity(id, bandwidth)
                    .map_err(|e| ParseError::new(ln, e.to_string()))?;
                graph
                    .set_malicious(id, malicious)
                    .map_err(|e| ParseError::new(ln, e.to_string()))?;
            }
            "link" => {
                let mut end = |what: &str| -> Result<EntityId, ParseError> {
                    let w = words
                        .next()
                        .ok_or_else(|| ParseError::new(ln, format!("`link` needs a {what} entity")))?;
                    Ok(EntityId(parse_num(ln, "entity id", w)?))
                };
                let from = end("source")?;
                let to = end("target")?;
                let kv = key_values(words).map_err(|m| ParseError::new(ln, m))?;
                let network = kv
                    .get("network")
                    .ok_or_else(|| ParseError::new(ln, "link is missing `network`"))?;
                let network = NetworkId(parse_num(ln, "network id", network)?);
                let mut link = FriendLink::new(from, to, network);
                for (k, v) in &kv {
                    if k == "network" {
                        continue;
                    } else if k == "tv" {
                        let tv: f64 = parse_num(ln, "trust value", v)?;
                        let tv = T::from_real(tv)
                            .ok_or_else(|| ParseError::new(ln, format!("invalid trust value `{v}`")))?;
                        link.trust_value = Some(tv);
                    } else if let Some(name) = k.strip_prefix("q:") {
                        let raw: f64 = parse_num(ln, "quantitative value", v)?;
                        if !(raw.is_finite() && raw >= 0.0) {
                            return Err(ParseError::new(ln, format!("`{k}` must be finite and non-negative")));
                        }
                        link.attributes.quantitative.insert(name.to_string(), raw);
                    } else if let Some(name) = k.strip_prefix("c:") {
                        let class: QualitativeClass =
                            v.parse().map_err(|e: crate::fuzzy::FuzzyError| ParseError::new(ln, e.to_string()))?;
                        link.attributes.qualitative.insert(name.to_string(), class);
                    } else {
                        return Err(ParseError::new(ln, format!("unknown link key `{k}`")));
                    }
                }
                graph.add_network(network);
                if graph.link(link.key()).is_some() {
                    return Err(ParseError::new(
                        ln,
                        format!("duplicate link {from}->{to} in network {network}"),
                    ));
                }
                graph
                    .add_link(link)
                    .map_err(|e| ParseError::new(ln, e.to_string()))?;
            }
            other => return Err(ParseError::new(ln, format!("unknown directive `{other}`"))),
        }
    }
    let (n, ln) = declared.ok_or_else(|| ParseError::new(0, "empty graph file"))?;
    if n != graph.entity_count() {
        return Err(ParseError::new(
            ln,
            format!("header declares {n} entities but {} are listed", graph.entity_count()),
        ));
    }
    Ok(graph)
}

pub fn write_graph<T: Scalar>(graph: &SocialGraph<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "entities {}", graph.entity_count());
    for net in graph.networks() {
        let _ = writeln!(out, "network {net}");
    }
    for e in graph.entities() {
        let _ = writeln!(
            out,
            "entity {} bandwidth={} malicious={}",
            e.id,
            e.bandwidth,
            u8::from(e.malicious)
        );
    }
    for link in graph.links() {
        let _ = write!(out, "link {} {} network={}", link.from, link.to, link.network);
        for (name, raw) in &link.attributes.quantitative {
            let _ = write!(out, " q:{name}={raw}");
        }
        for (name, class) in &link.attributes.qualitative {
            let _ = write!(out, " c:{name}={class}");
        }
        if let Some(tv) = link.trust_value {
            let _ = write!(out, " tv={}", tv.as_f64());
        }
        out.push('\n');
    }
    out
}
