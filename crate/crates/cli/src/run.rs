use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use pursuit_core::catalog::{Arena, CopKind, RobberKind};
use pursuit_core::engine::{run_match, GameConfig, MatchOptions, Outcome, Recording, Trace, DEFAULT_MAX_ROUNDS};
use pursuit_core::evader::GUARANTEED_COPS;
use pursuit_core::strategies::Placement;
use pursuit_core::VertexId;

use crate::{write_json, ArenaArgs, ArenaSource, CliError};

pub const SUMMARY_VERSION: u32 = 1;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TraceMode {
    /// Every half-round.
    Full,
    /// Placements and the summary only.
    Summary,
    /// No trace files.
    None,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    Survive,
    Capture,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PlacementArg {
    Spread,
    Centers,
    Random,
}

#[derive(Args, Debug, Clone)]
pub struct CommonRunArgs {
    #[command(flatten)]
    pub arena: ArenaArgs,
    /// Robber strategy: evader, random[:V], stationary:V, solver.
    #[arg(long, default_value = "evader")]
    pub robber: String,
    /// Number of cops; defaults to what the strategy needs, else 3.
    #[arg(long)]
    pub k: Option<usize>,
    /// Round limit; 0 plays until capture.
    #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
    pub max_rounds: u64,
    /// Seeds as a comma list of numbers and half-open ranges, e.g. `0..100,7`.
    #[arg(long, default_value = "0")]
    pub seeds: String,
    /// Cop start positions for greedy, random and exit-blocker.
    #[arg(long, value_enum)]
    pub placement: Option<PlacementArg>,
    /// Output directory for the summary and traces.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Fail (exit 1) unless every match ends this way.
    #[arg(long, value_enum)]
    pub expect: Option<Expect>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Args, Debug)]
pub struct MatchArgs {
    /// Cop strategy: greedy, random, exit-blocker, hybrid[:FUZZ], trap,
    /// sweep[:K], solver.
    #[arg(long, default_value = "greedy")]
    pub cops: String,
    #[command(flatten)]
    pub common: CommonRunArgs,
    /// Trace detail written per match.
    #[arg(long, value_enum, default_value = "full")]
    pub traces: TraceMode,
}

#[derive(Args, Debug)]
pub struct TournamentArgs {
    /// Comma list of cop strategies; `hybrid:A..B` expands to one entry per
    /// fuzz seed.
    #[arg(long, default_value = "greedy,exit-blocker,random")]
    pub cops: String,
    #[command(flatten)]
    pub common: CommonRunArgs,
    /// Trace detail written per match. Full 10^5-round traces run to tens
    /// of megabytes each.
    #[arg(long, value_enum, default_value = "summary")]
    pub traces: TraceMode,
}

/// Everything needed to reproduce a batch of matches.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunPlan {
    pub v: u32,
    pub arena: ArenaSource,
    /// `(label, strategy)` pairs; labels key the results.
    pub cops: Vec<(String, CopKind)>,
    pub robber: RobberKind,
    pub k: Option<usize>,
    pub max_rounds: Option<u64>,
    pub seeds: Vec<u64>,
    pub traces: TraceMode,
    pub out: Option<PathBuf>,
}

impl RunPlan {
    fn from_args(cops: &str, common: &CommonRunArgs, traces: TraceMode) -> Result<Self, CliError> {
        let placement = common.placement.map(|p| match p {
            PlacementArg::Spread => Placement::Spread,
            PlacementArg::Centers => Placement::Centers,
            PlacementArg::Random => Placement::Random,
        });
        Ok(RunPlan {
            v: SUMMARY_VERSION,
            arena: common.arena.source(),
            cops: parse_cops(cops, placement)?,
            robber: common.robber.parse()?,
            k: common.k,
            max_rounds: (common.max_rounds > 0).then_some(common.max_rounds),
            seeds: parse_seeds(&common.seeds)?,
            traces,
            out: common.out.clone(),
        })
    }

    /// Cops used with strategy `kind` on `arena`.
    pub fn cops_for(&self, kind: &CopKind, arena: &Arena) -> usize {
        self.k.or_else(|| kind.required_cops(arena)).unwrap_or(3)
    }

    pub fn config(&self, kind: &CopKind, arena: &Arena) -> Result<GameConfig, CliError> {
        Ok(GameConfig::new(
            arena.graph.clone(),
            self.cops_for(kind, arena),
            self.max_rounds,
        )?)
    }
}

pub fn parse_seeds(s: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Usage(format!("bad seed list {s:?}"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
                out.extend(a..b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

pub fn parse_cops(s: &str, placement: Option<Placement>) -> Result<Vec<(String, CopKind)>, CliError> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some(range) = part.strip_prefix("hybrid:").filter(|r| r.contains("..")) {
            for fuzz in parse_seeds(range)? {
                out.push((format!("hybrid:{fuzz}"), CopKind::Hybrid { fuzz }));
            }
            continue;
        }
        let mut kind: CopKind = part.parse()?;
        if let Some(p) = &placement {
            match &mut kind {
                CopKind::Greedy { placement } | CopKind::Random { placement } | CopKind::ExitBlocker { placement } => {
                    *placement = Some(p.clone())
                }
                _ => {}
            }
        }
        out.push((part.to_string(), kind));
    }
    if out.is_empty() {
        return Err(CliError::Usage("no cop strategy given".into()));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatchResult {
    pub strategy: String,
    pub seed: u64,
    pub k: usize,
    pub outcome: Outcome,
    pub rounds: u64,
    pub robber_turns: u64,
    pub robber_steps: u64,
    pub captured_at: Option<VertexId>,
    /// Summary counters agree with the recorded half-rounds.
    pub counters_consistent: bool,
    pub config_digest: String,
    pub final_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robber_report: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cop_report: Option<serde_json::Value>,
    /// Why this match counts as a property violation.
    pub problems: Vec<String>,
}

impl MatchResult {
    fn from_trace(strategy: &str, t: &Trace, expect: Option<Expect>) -> Self {
        let s = &t.summary;
        let mut problems = Vec::new();
        if let Outcome::Aborted { side, reason } = &s.outcome {
            problems.push(format!("aborted by {side:?}: {reason}"));
        }
        let consistent = t.counters_consistent();
        if !consistent {
            problems.push("summary counters disagree with the trace".into());
        }
        match (expect, &s.outcome) {
            (Some(Expect::Survive), Outcome::CopsWin { .. }) => problems.push("robber was captured".into()),
            (Some(Expect::Capture), Outcome::RobberSurvived { .. }) => problems.push("robber survived".into()),
            _ => {}
        }
        let field = |v: &Option<serde_json::Value>, k: &str| v.as_ref().and_then(|r| r.get(k)).and_then(|x| x.as_u64());
        let covered = t.header.k <= GUARANTEED_COPS;
        if let Some(n) = field(&s.robber_report, "violation_count").filter(|&n| n > 0 && covered) {
            problems.push(format!("robber strategy logged {n} invariant violations"));
        }
        if let (Some(spent), Some(budget)) = (field(&s.cop_report, "total_spent"), field(&s.cop_report, "budget")) {
            if spent > budget {
                problems.push(format!("cops spent {spent} over budget {budget}"));
            }
        }
        MatchResult {
            strategy: strategy.to_string(),
            seed: t.header.seed,
            k: t.header.k,
            captured_at: match s.outcome {
                Outcome::CopsWin { at, .. } => Some(at),
                _ => None,
            },
            outcome: s.outcome.clone(),
            rounds: s.rounds,
            robber_turns: s.robber_turns,
            robber_steps: s.robber_steps,
            counters_consistent: consistent,
            config_digest: t.header.config_digest.clone(),
            final_digest: s.final_digest.clone(),
            trace_file: None,
            robber_report: s.robber_report.clone(),
            cop_report: s.cop_report.clone(),
            problems,
        }
    }

    pub fn line(&self) -> String {
        let outcome = match &self.outcome {
            Outcome::CopsWin { round, at } => format!("cops_win round={round} at={}", at.0),
            Outcome::RobberSurvived { rounds } => format!("robber_survived rounds={rounds}"),
            Outcome::Aborted { side, reason } => format!("aborted side={side:?} reason={reason:?}"),
        };
        let mut s = format!(
            "{} seed={} k={} {outcome} robber_steps={}",
            self.strategy, self.seed, self.k, self.robber_steps
        );
        if !self.problems.is_empty() {
            s.push_str(&format!(" VIOLATION: {}", self.problems.join("; ")));
        }
        s
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Totals {
    pub matches: usize,
    pub cops_win: usize,
    pub robber_survived: usize,
    pub aborted: usize,
    pub violations: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub v: u32,
    pub plan: RunPlan,
    pub matches: Vec<MatchResult>,
    pub totals: BTreeMap<String, Totals>,
}

fn file_label(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

fn play_one(
    plan: &RunPlan,
    arena: &Arena,
    label: &str,
    kind: &CopKind,
    seed: u64,
    expect: Option<Expect>,
    trace_dir: Option<&Path>,
) -> Result<MatchResult, CliError> {
    let config = plan.config(kind, arena)?;
    let mut cops = kind.build(arena, config.k)?;
    let mut robber = plan.robber.build(arena, config.k)?;
    let recording = match plan.traces {
        TraceMode::Full => Recording::Full,
        TraceMode::Summary | TraceMode::None => Recording::Summary,
    };
    let trace = run_match(
        &config,
        cops.as_mut(),
        robber.as_mut(),
        MatchOptions { seed, recording },
    );
    let mut result = MatchResult::from_trace(label, &trace, expect);
    if let (Some(dir), false) = (trace_dir, plan.traces == TraceMode::None) {
        let path = dir.join(format!("{}-seed{seed}.jsonl", file_label(label)));
        let f = std::io::BufWriter::new(std::fs::File::create(&path)?);
        trace.write_jsonl(f)?;
        result.trace_file = Some(path);
    }
    Ok(result)
}

/// Runs every `(strategy, seed)` pair in a pool and returns results in
/// `(strategy label, seed)` order regardless of completion order.
pub fn run_all(plan: &RunPlan, expect: Option<Expect>, jobs: usize) -> Result<RunSummary, CliError> {
    let arena = plan.arena.load()?;
    if arena.construction.is_some() {
        // built once here rather than raced for by the workers
        arena.tables()?;
        arena.oracle()?;
    }
    let trace_dir = match &plan.out {
        Some(out) => {
            let d = out.join("traces");
            std::fs::create_dir_all(&d)?;
            Some(d)
        }
        None => None,
    };
    let work: Vec<(&String, &CopKind, u64)> = plan
        .cops
        .iter()
        .flat_map(|(l, k)| plan.seeds.iter().map(move |&s| (l, k, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut matches = pool.install(|| {
        work.par_iter()
            .map(|&(l, k, s)| play_one(plan, &arena, l, k, s, expect, trace_dir.as_deref()))
            .collect::<Result<Vec<_>, _>>()
    })?;
    matches.sort_by(|a, b| (&a.strategy, a.seed).cmp(&(&b.strategy, b.seed)));
    let mut totals: BTreeMap<String, Totals> = BTreeMap::new();
    for m in &matches {
        let t = totals.entry(m.strategy.clone()).or_default();
        t.matches += 1;
        match m.outcome {
            Outcome::CopsWin { .. } => t.cops_win += 1,
            Outcome::RobberSurvived { .. } => t.robber_survived += 1,
            Outcome::Aborted { .. } => t.aborted += 1,
        }
        t.violations += usize::from(!m.problems.is_empty());
    }
    Ok(RunSummary {
        v: SUMMARY_VERSION,
        plan: plan.clone(),
        matches,
        totals,
    })
}

fn report(summary: &RunSummary, print_matches: bool) -> Result<bool, CliError> {
    if print_matches {
        for m in &summary.matches {
            println!("{}", m.line());
        }
    }
    for (label, t) in &summary.totals {
        println!(
            "{label}: {} matches, {} cops_win, {} robber_survived, {} aborted, {} violations",
            t.matches, t.cops_win, t.robber_survived, t.aborted, t.violations
        );
    }
    if let Some(out) = &summary.plan.out {
        let path = out.join("summary.json");
        write_json(&path, summary)?;
        println!("wrote {}", path.display());
    }
    Ok(summary.totals.values().all(|t| t.violations == 0))
}

pub fn cmd_simulate(a: MatchArgs) -> Result<bool, CliError> {
    let plan = RunPlan::from_args(&a.cops, &a.common, a.traces)?;
    if plan.cops.len() != 1 {
        return Err(CliError::Usage(
            "simulate takes one cop strategy; use tournament for several".into(),
        ));
    }
    let summary = run_all(&plan, a.common.expect, a.common.jobs)?;
    report(&summary, true)
}

pub fn cmd_tournament(a: TournamentArgs) -> Result<bool, CliError> {
    let plan = RunPlan::from_args(&a.cops, &a.common, a.traces)?;
    let summary = run_all(&plan, a.common.expect, a.common.jobs)?;
    report(&summary, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seeds("0..3,7").unwrap(), vec![0, 1, 2, 7]);
        assert!(parse_seeds("x").is_err());
        assert!(parse_seeds("").is_err());
    }

    #[test]
    fn hybrid_ranges_expand() {
        let c = parse_cops("greedy,hybrid:0..3", Some(Placement::Spread)).unwrap();
        let labels: Vec<&str> = c.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(labels, ["greedy", "hybrid:0", "hybrid:1", "hybrid:2"]);
        assert_eq!(
            c[0].1,
            CopKind::Greedy {
                placement: Some(Placement::Spread)
            }
        );
    }
}
