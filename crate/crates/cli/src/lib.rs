//! Pipeline behind the `trustroute` binary: load files, run the library, write
//! CSV files into an output directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use trustroute::generator::GeneratorConfig;
use trustroute::propagation::{propagate_all, scores_csv};
use trustroute::sim::{
    cdf_csv, generate_world_graph, mean_report, rounds_csv, run_circuit_rounds, run_selection_rounds,
    sweep, sweep_csv, GraphSource, RoundReport, SimWorld, SweepAxis,
};
use trustroute::{compute_link_trust, generate_graph, parse_graph, write_graph, FuzzyRuleSet, Graph, SimScenario};

/// Where inputs come from and where results go.
#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub out: PathBuf,
    pub quiet: bool,
    /// Replaces the seed of the scenario or generator when set.
    pub seed: Option<u64>,
}

impl PipelineConfig {
    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out)
            .with_context(|| format!("cannot create output directory {}", self.out.display()))?;
        let path = self.out.join(name);
        fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn load_rules(path: Option<&Path>) -> Result<FuzzyRuleSet> {
    match path {
        None => Ok(FuzzyRuleSet::major_relationship()),
        Some(p) => FuzzyRuleSet::parse(&read(p)?).with_context(|| format!("in rule file {}", p.display())),
    }
}

pub fn load_graph(path: &Path) -> Result<Graph> {
    parse_graph(&read(path)?).with_context(|| format!("in graph file {}", path.display()))
}

/// Relative paths inside a scenario file are taken from the file's directory.
pub fn load_scenario(path: &Path) -> Result<SimScenario> {
    let mut s = SimScenario::parse(&read(path)?).with_context(|| format!("in scenario file {}", path.display()))?;
    let dir = path.parent().unwrap_or(Path::new(""));
    s.graph = s.graph.map(|g| dir.join(g));
    s.rules = s.rules.map(|r| dir.join(r));
    Ok(s)
}

/// CSV with header `from,to,network,tv`.
pub fn link_trust_csv(graph: &Graph) -> String {
    let mut out = String::from("from,to,network,tv\n");
    for l in graph.links() {
        let tv = l.trust_value.map(|t| t.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{}", l.from, l.to, l.network, tv);
    }
    out
}

pub struct GenerateArgs {
    pub config: GeneratorConfig,
    pub rules: Option<PathBuf>,
}

/// Writes `graph.txt` with attributes and trust values.
pub fn cmd_generate(cfg: &PipelineConfig, args: &GenerateArgs) -> Result<()> {
    let rules = load_rules(args.rules.as_deref())?;
    let seed = cfg.seed.unwrap_or(1);
    let (mut graph, report) = generate_graph::<f64>(&args.config, seed)?;
    compute_link_trust(&mut graph, &rules)?;
    let path = cfg.write("graph.txt", &write_graph(&graph))?;
    cfg.say(format!(
        "{} entities, {} links, edge probability {:.6}, mean circle fraction {:.4}\nwrote {}",
        graph.entity_count(),
        graph.link_count(),
        report.edge_probability,
        report.mean_circle_fraction,
        path.display()
    ));
    Ok(())
}

/// Writes `link_trust.csv` and `trust_scores.csv`.
pub fn cmd_trust(cfg: &PipelineConfig, graph: &Path, rules: Option<&Path>, max_hops: usize) -> Result<()> {
    let rules = load_rules(rules)?;
    let mut graph = load_graph(graph)?;
    compute_link_trust(&mut graph, &rules)?;
    let tables = propagate_all(&graph, max_hops)?;
    cfg.write("link_trust.csv", &link_trust_csv(&graph))?;
    cfg.write("trust_scores.csv", &scores_csv(tables.values()))?;
    let mean_circle = tables.values().map(|t| t.len()).sum::<usize>() as f64 / tables.len().max(1) as f64;
    cfg.say(format!(
        "entities: {}\nmean circle size: {mean_circle:.4}",
        graph.entity_count()
    ));
    Ok(())
}

/// The scenario's graph: read from its file (evaluating trust values when
/// any link lacks one) or generated.
fn scenario_graph(scenario: &SimScenario) -> Result<Graph> {
    let rules = load_rules(scenario.rules.as_deref())?;
    match &scenario.graph {
        Some(path) => {
            let mut graph = load_graph(path)?;
            if graph.links().any(|l| l.trust_value.is_none()) {
                compute_link_trust(&mut graph, &rules)?;
            }
            Ok(graph)
        }
        None => Ok(generate_world_graph(scenario, &rules)?.0),
    }
}

fn apply_seed(cfg: &PipelineConfig, mut scenario: SimScenario) -> SimScenario {
    if let Some(seed) = cfg.seed {
        scenario.seed = seed;
    }
    scenario
}

fn r_mr(rounds: &[RoundReport]) -> Vec<f64> {
    rounds.iter().map(|r| r.r_mr).collect()
}

/// Writes per-round reports and their distributions for single-router
/// selection and for circuits.
pub fn cmd_simulate(cfg: &PipelineConfig, scenario: &Path) -> Result<()> {
    let scenario = apply_seed(cfg, load_scenario(scenario)?);
    let world = SimWorld::new(scenario_graph(&scenario)?, &scenario)?;
    let selection = run_selection_rounds(&world, &scenario)?;
    let circuits = run_circuit_rounds(&world, &scenario)?;
    cfg.write("selection_rounds.csv", &rounds_csv(&selection))?;
    cfg.write("selection_cdf.csv", &cdf_csv(&r_mr(&selection)))?;
    cfg.write("circuit_rounds.csv", &rounds_csv(&circuits))?;
    let r_mc: Vec<f64> = circuits.iter().filter_map(|r| r.r_mc).collect();
    cfg.write("circuit_cdf.csv", &cdf_csv(&r_mc))?;
    let sel = mean_report(&selection);
    let circ = mean_report(&circuits);
    cfg.say(format!(
        "strategy {}: circle {} trusted {}\nmean r_mr {:.4}  mean r_mc {:.4}  mean bandwidth {:.1}",
        scenario.strategy,
        world.scores.len(),
        world.scores.trustworthy_count(scenario.ts_h),
        sel.r_mr,
        circ.r_mc.unwrap_or(0.0),
        sel.avg_bandwidth,
    ));
    Ok(())
}

/// Writes one `<axis>_<value>_selection.csv` and `<axis>_<value>_circuits.csv`
/// per value plus `sweep_<axis>.csv` summarising all of them.
pub fn cmd_sweep(cfg: &PipelineConfig, scenario: &Path, axis: SweepAxis, values: &[f64]) -> Result<()> {
    let scenario = apply_seed(cfg, load_scenario(scenario)?);
    let rules = load_rules(scenario.rules.as_deref())?;
    let fixed;
    let source = match &scenario.graph {
        Some(_) => {
            fixed = scenario_graph(&scenario)?;
            GraphSource::Fixed(&fixed)
        }
        None => GraphSource::Generated(&rules),
    };
    let points = sweep(source, &scenario, axis, values)?;
    for p in &points {
        cfg.write(&format!("{axis}_{}_selection.csv", p.value), &rounds_csv(&p.selection))?;
        cfg.write(&format!("{axis}_{}_circuits.csv", p.value), &rounds_csv(&p.circuits))?;
    }
    let summary = sweep_csv(&points);
    cfg.write(&format!("sweep_{axis}.csv"), &summary)?;
    cfg.say(summary.trim_end());
    Ok(())
}
