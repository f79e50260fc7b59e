use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::SimError;
use crate::format::ParseError;
use crate::generator::{GeneratorSpec, DEFAULT_BANDWIDTH_MAX};
use crate::graph::EntityId;
use crate::propagation::DEFAULT_MAX_HOPS;
use crate::selection::{SelectionMode, SelectionPolicy, DEFAULT_CIRCUIT_LENGTH};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Strategy {
    OriginalTor,
    OpportunisticTor,
    PracticalSTor,
    TheoreticalSTor,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::OriginalTor,
        Strategy::OpportunisticTor,
        Strategy::PracticalSTor,
        Strategy::TheoreticalSTor,
    ];

    pub fn mode(self) -> SelectionMode {
        match self {
            Strategy::OriginalTor | Strategy::OpportunisticTor => SelectionMode::TorBaseline,
            Strategy::PracticalSTor | Strategy::TheoreticalSTor => SelectionMode::STor,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::OriginalTor => "original_tor",
            Strategy::OpportunisticTor => "opportunistic_tor",
            Strategy::PracticalSTor => "practical_stor",
            Strategy::TheoreticalSTor => "theoretical_stor",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        Strategy::ALL
            .into_iter()
            .find(|st| st.as_str() == lower)
            .ok_or_else(|| SimError::InvalidScenario(format!("unknown strategy `{s}`")))
    }
}

/// How router bandwidth relates to the evaluated user's trust scores.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum CorrelationCase {
    /// Bandwidths as generated.
    #[default]
    None,
    /// Better-trusted friends run faster routers; outsiders run the slowest.
    Best,
    /// Better-trusted friends run slower routers; outsiders run the fastest.
    Worst,
}

impl fmt::Display for CorrelationCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorrelationCase::None => "none",
            CorrelationCase::Best => "best",
            CorrelationCase::Worst => "worst",
        })
    }
}

impl FromStr for CorrelationCase {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(CorrelationCase::None),
            "best" => Ok(CorrelationCase::Best),
            "worst" => Ok(CorrelationCase::Worst),
            _ => Err(SimError::InvalidScenario(format!("unknown correlation case `{s}`"))),
        }
    }
}

/// One experiment, as read from a scenario file.
///
/// ```text
/// strategy = practical_stor
/// fraction = 0.2
/// case = none
/// omega = 0
/// ts_h = 0.01
/// rounds = 200
/// draws = 1000
/// seed = 7
/// n = 500
/// generator = calibrated:0.8
/// ```
///
/// Further keys: `hops`, `source`, `circuit_length`, `bandwidth_max`,
/// `networks`, and the optional file paths `graph` and `rules`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimScenario {
    pub strategy: Strategy,
    /// Share of routers that are malicious, in `[0, 1)`.
    pub fraction: f64,
    pub case: CorrelationCase,
    pub omega: f64,
    pub ts_h: f64,
    pub circuit_length: usize,
    pub rounds: usize,
    pub draws: usize,
    pub seed: u64,
    pub n: usize,
    pub generator: GeneratorSpec,
    pub max_hops: usize,
    /// The evaluated user.
    pub source: EntityId,
    pub bandwidth_max: f64,
    pub networks: u16,
    pub graph: Option<PathBuf>,
    pub rules: Option<PathBuf>,
}

impl Default for SimScenario {
    fn default() -> Self {
        SimScenario {
            strategy: Strategy::PracticalSTor,
            fraction: 0.2,
            case: CorrelationCase::None,
            omega: 0.0,
            ts_h: 0.0,
            circuit_length: DEFAULT_CIRCUIT_LENGTH,
            rounds: 200,
            draws: 1000,
            seed: 1,
            n: 500,
            generator: GeneratorSpec::default(),
            max_hops: DEFAULT_MAX_HOPS,
            source: EntityId(1),
            bandwidth_max: DEFAULT_BANDWIDTH_MAX,
            networks: 1,
            graph: None,
            rules: None,
        }
    }
}

impl SimScenario {
    pub fn policy(&self) -> SelectionPolicy {
        SelectionPolicy {
            mode: self.strategy.mode(),
            omega: self.omega,
            ts_h: self.ts_h,
            circuit_length: self.circuit_length,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidScenario(m));
        if !(0.0..1.0).contains(&self.fraction) {
            return bad(format!("fraction {} outside [0, 1)", self.fraction));
        }
        if self.rounds == 0 || self.draws == 0 {
            return bad("rounds and draws must be positive".into());
        }
        if self.max_hops == 0 {
            return bad("hops must be at least 1".into());
        }
        self.policy()
            .validate()
            .map_err(|e| SimError::InvalidScenario(e.to_string()))
    }

    /// Number of malicious routers among `n`.
    pub fn malicious_count(&self, n: usize) -> usize {
        (self.fraction * n as f64 - 1e-9).ceil().max(0.0) as usize
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut s = SimScenario::default();
        let mut seen = std::collections::BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let ln = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ParseError::new(ln, format!("expected `key = value`, found `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(ParseError::new(ln, format!("key `{key}` given twice")));
            }
            let invalid = |what: String| ParseError::new(ln, format!("invalid value for `{key}`: {what}"));
            let num = |v: &str| v.parse::<f64>().map_err(|_| invalid(format!("`{v}` is not a number")));
            let int = |v: &str| v.parse::<usize>().map_err(|_| invalid(format!("`{v}` is not a count")));
            match key {
                "strategy" => s.strategy = value.parse().map_err(|e: SimError| invalid(e.to_string()))?,
                "fraction" => s.fraction = num(value)?,
                "case" => s.case = value.parse().map_err(|e: SimError| invalid(e.to_string()))?,
                "omega" => s.omega = num(value)?,
                "ts_h" => s.ts_h = num(value)?,
                "circuit_length" => s.circuit_length = int(value)?,
                "rounds" => s.rounds = int(value)?,
                "draws" => s.draws = int(value)?,
                "seed" => {
                    s.seed = value
                        .parse()
                        .map_err(|_| invalid(format!("`{value}` is not a seed")))?
                }
                "n" => s.n = int(value)?,
                "generator" => {
                    s.generator = value
                        .parse()
                        .map_err(|e: crate::GeneratorError| invalid(e.to_string()))?
                }
                "hops" => s.max_hops = int(value)?,
                "source" => {
                    s.source = EntityId(
                        value
                            .parse()
                            .map_err(|_| invalid(format!("`{value}` is not an entity id")))?,
                    )
                }
                "bandwidth_max" => s.bandwidth_max = num(value)?,
                "networks" => {
                    s.networks = value
                        .parse()
                        .map_err(|_| invalid(format!("`{value}` is not a network count")))?
                }
                "graph" => s.graph = Some(PathBuf::from(value)),
                "rules" => s.rules = Some(PathBuf::from(value)),
                other => return Err(ParseError::new(ln, format!("unknown scenario key `{other}`"))),
            }
        }
        s.validate().map_err(|e| ParseError::new(0, e.to_string()))?;
        Ok(s)
    }

    /// Scenario file text; `parse(to_text())` reproduces the scenario.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "strategy = {}\nfraction = {}\ncase = {}\nomega = {}\nts_h = {}\ncircuit_length = {}\n\
             rounds = {}\ndraws = {}\nseed = {}\nn = {}\ngenerator = {}\nhops = {}\nsource = {}\n\
             bandwidth_max = {}\nnetworks = {}\n",
            self.strategy,
            self.fraction,
            self.case,
            self.omega,
            self.ts_h,
            self.circuit_length,
            self.rounds,
            self.draws,
            self.seed,
            self.n,
            self.generator,
            self.max_hops,
            self.source,
            self.bandwidth_max,
            self.networks,
        );
        if let Some(g) = &self.graph {
            out.push_str(&format!("graph = {}\n", g.display()));
        }
        if let Some(r) = &self.rules {
            out.push_str(&format!("rules = {}\n", r.display()));
        }
        out
    }
}
