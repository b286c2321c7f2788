//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one `PASS`/`FAIL` line, even when all pass.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use pursuit_core::catalog::{Arena, CopKind, RobberKind};
use pursuit_core::construction::{Construction, ConstructionParams};
use pursuit_core::engine::{run_match, GameConfig, MatchOptions, Outcome, Recording, Trace};
use pursuit_core::evader::{EvaderReport, UnitTables};
use pursuit_core::gen;
use pursuit_core::lemma::{verify_center_escape, verify_return};
use pursuit_core::separator::{separate, separate_components, SeparatorResult};
use pursuit_core::solver::{cop_number, solve, SolveOptions, SolverCop, SolverRobber};
use pursuit_core::strategies::{RandomRobber, SeparatorSweep, DEFAULT_SWEEP_CONSTANT};
use pursuit_core::Digraph;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t0: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let e = t0.elapsed();
    ensure(e <= limit, || {
        format!("{what} took {:.1}s, limit {:.0}s", e.as_secs_f64(), limit.as_secs_f64())
    })
}

fn summary(seed: u64) -> MatchOptions {
    MatchOptions {
        seed,
        recording: Recording::Summary,
    }
}

fn census() -> Verdict {
    let t0 = Instant::now();
    let c = Construction::assemble(ConstructionParams::default()).map_err(|e| e.to_string())?;
    within(t0, Duration::from_secs(5), "build")?;
    let g = &c.graph;
    ensure(g.vertex_count() == 64_752, || format!("{} vertices", g.vertex_count()))?;
    ensure(g.arc_count() == 68_640, || format!("{} arcs", g.arc_count()))?;
    ensure(
        c.params.vertex_count() == g.vertex_count() && c.params.arc_count() == g.arc_count(),
        || "closed form disagrees with the built graph".into(),
    )?;
    ensure(c.units.len() == 12, || format!("{} units", c.units.len()))?;
    let exits: usize = c.units.iter().map(|u| u.exits.len()).sum();
    ensure(exits == 60, || format!("{exits} exits"))?;
    let paired = c
        .paths
        .iter()
        .filter(|p| c.paths.iter().any(|q| q.from == p.to && q.to == p.from))
        .count();
    ensure(c.paths.len() == 60 && paired == 60, || {
        format!("{} paths, {paired} with a reverse", c.paths.len())
    })?;
    ensure(g.strongly_connected(), || "not strongly connected".into())?;
    let chi = c.rotation.euler_characteristic().map_err(|e| e.to_string())?;
    ensure(chi == 2, || format!("Euler characteristic {chi}"))?;
    Ok(format!(
        "n=64752 arcs=68640 units=12 exits=60 green pairs={} strongly connected, V-E+F=2, {:.2}s",
        paired / 2,
        t0.elapsed().as_secs_f64()
    ))
}

fn center_escape() -> Verdict {
    let t0 = Instant::now();
    let c = Construction::assemble(ConstructionParams::default()).map_err(|e| e.to_string())?;
    let t = UnitTables::new(&c).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for cops in [1, 2] {
        let r = verify_center_escape(&c, &t, cops, 10, 64).map_err(|e| e.to_string())?;
        ensure(r.passed(), || {
            format!(
                "c={cops}: {} of {} cases escape, {} counterexamples",
                r.successes,
                r.cases,
                r.counterexamples.len()
            )
        })?;
        ensure(r.max_moves <= 10, || format!("c={cops}: {} moves", r.max_moves))?;
        parts.push(format!(
            "c={cops}: {}/{} cases, max {} moves",
            r.successes, r.cases, r.max_moves
        ));
    }
    within(t0, Duration::from_secs(600), "search")?;
    Ok(format!("{}, {:.1}s", parts.join("; "), t0.elapsed().as_secs_f64()))
}

fn perimeter_return() -> Verdict {
    let t0 = Instant::now();
    let c = Construction::assemble(ConstructionParams::default()).map_err(|e| e.to_string())?;
    let t = UnitTables::new(&c).map_err(|e| e.to_string())?;
    let r = verify_return(&c, &t, 27).map_err(|e| e.to_string())?;
    ensure(r.passed(), || format!("{} of {} cases return", r.successes, r.cases))?;
    ensure(r.max_moves <= 27, || format!("{} moves", r.max_moves))?;
    within(t0, Duration::from_secs(60), "search")?;
    Ok(format!(
        "{}/{} cases from {} perimeter vertices, max {} moves, {:.1}s",
        r.successes,
        r.cases,
        r.perimeter,
        r.max_moves,
        t0.elapsed().as_secs_f64()
    ))
}

fn evader_report(t: &Trace) -> Result<EvaderReport, String> {
    let v = t.summary.robber_report.clone().ok_or("no robber report")?;
    serde_json::from_value(v).map_err(|e| e.to_string())
}

fn survival() -> Verdict {
    let t0 = Instant::now();
    let params = ConstructionParams::new(250, 10, 16);
    let arena = Arena::build(params).map_err(|e| e.to_string())?;
    let config = GameConfig::new(arena.graph.clone(), 3, Some(100_000)).map_err(|e| e.to_string())?;
    let mut lineup: Vec<(String, u64)> = vec![("greedy".into(), 0), ("exit-blocker".into(), 0)];
    lineup.extend((0..100).map(|s| ("random".to_string(), s)));
    lineup.extend((0..20).map(|h| (format!("hybrid:{h}"), h)));
    let exit_budget = params.exit_budget();
    let transit_budget = (params.green + params.spoke) as u64;
    let outcomes: Vec<Result<EvaderReport, String>> = lineup
        .par_iter()
        .map(|(name, seed)| {
            let kind: CopKind = name.parse().map_err(|e: pursuit_core::Error| e.to_string())?;
            let mut cops = kind.build(&arena, 3).map_err(|e| e.to_string())?;
            let mut robber = RobberKind::Evader.build(&arena, 3).map_err(|e| e.to_string())?;
            let t = run_match(&config, cops.as_mut(), robber.as_mut(), summary(*seed));
            let who = format!("{name} seed {seed}");
            ensure(t.summary.outcome == Outcome::RobberSurvived { rounds: 100_000 }, || {
                format!("{who}: {:?}", t.summary.outcome)
            })?;
            let r = evader_report(&t)?;
            ensure(r.violation_count == 0, || format!("{who}: {:?}", r.violations))?;
            ensure(r.max_escape_moves.max(r.max_run_moves) <= exit_budget, || {
                format!("{who}: exit after {} moves", r.max_escape_moves.max(r.max_run_moves))
            })?;
            ensure(r.max_transit_moves <= transit_budget, || {
                format!("{who}: transit {} moves", r.max_transit_moves)
            })?;
            Ok(r)
        })
        .collect();
    let reports = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;
    within(t0, Duration::from_secs(1800), "suite")?;
    let max = |f: fn(&EvaderReport) -> u64| reports.iter().map(f).max().unwrap_or(0);
    Ok(format!(
        "{} matches, 0 captures, 0 violations, {} center re-entries, exit <= {} (budget {exit_budget}), transit <= {} (budget {transit_budget}), {:.1}s",
        reports.len(),
        reports.iter().map(|r| r.center_arrivals).sum::<u64>(),
        max(|r| r.max_escape_moves.max(r.max_run_moves)),
        max(|r| r.max_transit_moves),
        t0.elapsed().as_secs_f64()
    ))
}

fn four_cop_control() -> Verdict {
    let arena = Arena::build(ConstructionParams::new(250, 10, 16)).map_err(|e| e.to_string())?;
    let config = GameConfig::new(arena.graph.clone(), 4, Some(100_000)).map_err(|e| e.to_string())?;
    let mut cops = CopKind::Trap.build(&arena, 4).map_err(|e| e.to_string())?;
    let mut robber = RobberKind::Evader.build(&arena, 4).map_err(|e| e.to_string())?;
    let t = run_match(&config, cops.as_mut(), robber.as_mut(), summary(0));
    match t.summary.outcome {
        Outcome::CopsWin { round, at } => Ok(format!(
            "k=4 trap captures the evader at vertex {} in round {round}",
            at.0
        )),
        other => Err(format!("{other:?}")),
    }
}

/// Solves at the claimed cop number, checks one cop fewer loses, then plays
/// the extracted strategies in the engine.
fn oracle_case(name: &str, g: &Digraph, expected: usize) -> Result<(), String> {
    let options = SolveOptions::default();
    let number = cop_number(g, expected + 1, &options).map_err(|e| e.to_string())?;
    ensure(number == Some(expected), || {
        format!("{name}: cop number {number:?}, want {expected}")
    })?;
    let table = Arc::new(solve(g, expected, &options).map_err(|e| e.to_string())?);
    let (_, worst) = table
        .winning_placement()
        .ok_or_else(|| format!("{name}: no winning placement"))?;
    let config = GameConfig::new(Arc::new(g.clone()), expected, Some(10_000)).map_err(|e| e.to_string())?;
    let optimal = run_match(
        &config,
        &mut SolverCop::new(table.clone()),
        &mut SolverRobber::new(table.clone()),
        summary(0),
    );
    let Outcome::CopsWin { .. } = optimal.summary.outcome else {
        return Err(format!("{name}: optimal play gave {:?}", optimal.summary.outcome));
    };
    // distances count cop and robber moves after placement
    let plies = optimal.summary.cop_turns + optimal.summary.robber_turns;
    ensure(plies == worst as u64, || {
        format!("{name}: optimal play took {plies} moves, table says {worst}")
    })?;
    for seed in 0..4 {
        let t = run_match(
            &config,
            &mut SolverCop::new(table.clone()),
            &mut RandomRobber::new(None),
            summary(seed),
        );
        let plies = t.summary.cop_turns + t.summary.robber_turns;
        ensure(t.summary.outcome.is_capture() && plies <= worst as u64, || {
            format!(
                "{name}: random robber seed {seed}: {:?} after {plies} moves",
                t.summary.outcome
            )
        })?;
    }
    Ok(())
}

fn solver_oracle() -> Verdict {
    let t0 = Instant::now();
    let mut cases: Vec<(String, Digraph, usize)> = vec![("single vertex".into(), gen::single_vertex().graph, 1)];
    for n in 1..=10 {
        for seed in 0..5 {
            cases.push((
                format!("tree n={n} seed={seed}"),
                gen::random_tree(n, seed).map_err(|e| e.to_string())?.graph,
                1,
            ));
        }
    }
    for n in 4..=8 {
        cases.push((
            format!("cycle n={n}"),
            gen::undirected_cycle(n).map_err(|e| e.to_string())?.graph,
            2,
        ));
    }
    for n in 3..=8 {
        cases.push((
            format!("directed cycle n={n}"),
            gen::directed_cycle(n).map_err(|e| e.to_string())?.graph,
            2,
        ));
    }
    for (name, g, k) in &cases {
        oracle_case(name, g, *k)?;
    }
    within(t0, Duration::from_secs(60), "oracle")?;
    Ok(format!(
        "{} graphs, cop numbers and engine replays agree, {:.1}s",
        cases.len(),
        t0.elapsed().as_secs_f64()
    ))
}

/// Independent scan: partition, balance, |C| <= 4 sqrt(n) and no A-B edge.
fn scan(g: &Digraph, r: &SeparatorResult) -> Result<f64, String> {
    let n = g.vertex_count();
    let mut side = vec![0u8; n];
    for (tag, set) in [(1u8, &r.a), (2, &r.b), (3, &r.c)] {
        for &v in set {
            ensure(side[v as usize] == 0, || format!("vertex {v} repeated"))?;
            side[v as usize] = tag;
        }
    }
    ensure(!side.contains(&0), || "partition misses a vertex".into())?;
    let third = 2.0 * n as f64 / 3.0;
    ensure(r.a.len() as f64 <= third && r.b.len() as f64 <= third, || {
        format!("|A|={} |B|={} n={n}", r.a.len(), r.b.len())
    })?;
    let ratio = r.c.len() as f64 / (n as f64).sqrt();
    ensure(ratio <= 4.0, || format!("|C|={} n={n}", r.c.len()))?;
    let crossing = g
        .arcs()
        .iter()
        .find(|&&(u, v)| side[u as usize] * side[v as usize] == 2);
    ensure(crossing.is_none(), || format!("arc {crossing:?} joins A and B"))?;
    Ok(ratio)
}

fn separator_bounds() -> Verdict {
    let t0 = Instant::now();
    let ratios: Vec<f64> = (0..1000u64)
        .into_par_iter()
        .map(|seed| {
            let n = 4 + (seed as usize * 7919) % 9997;
            let e = gen::random_triangulation(n, seed).map_err(|e| e.to_string())?;
            let r = separate(&e.rotation).map_err(|e| e.to_string())?;
            scan(&e.graph, &r).map_err(|m| format!("seed {seed}: {m}"))
        })
        .collect::<Result<_, _>>()?;
    let c = Construction::assemble(ConstructionParams::default()).map_err(|e| e.to_string())?;
    let r = separate_components(&c.rotation).map_err(|e| e.to_string())?;
    let arena_ratio = scan(&c.graph, &r).map_err(|m| format!("construction: {m}"))?;
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    Ok(format!(
        "1000 triangulations (n <= 10000) max |C|/sqrt(n) = {worst:.3}; construction |C|/sqrt(n) = {arena_ratio:.3}; {:.1}s",
        t0.elapsed().as_secs_f64()
    ))
}

fn sweep_case(
    name: &str,
    g: Arc<Digraph>,
    rot: Arc<pursuit_core::embedding::RotationSystem>,
    robber: &mut dyn pursuit_core::engine::RobberStrategy,
    seed: u64,
) -> Result<String, String> {
    let mut sweep = SeparatorSweep::new(g.clone(), rot, DEFAULT_SWEEP_CONSTANT).map_err(|e| e.to_string())?;
    let config = GameConfig::new(g, sweep.budget(), None).map_err(|e| e.to_string())?;
    let t = run_match(&config, &mut sweep, robber, summary(seed));
    ensure(t.summary.outcome.is_capture(), || {
        format!("{name}: {:?}", t.summary.outcome)
    })?;
    ensure(t.summary.robber_turns > 0, || format!("{name}: captured at placement"))?;
    let cert = sweep.certificate();
    ensure(cert.total_spent <= cert.budget, || {
        format!("{name}: spent {} of {}", cert.total_spent, cert.budget)
    })?;
    ensure(cert.all_sealed(), || format!("{name}: a separator was not sealed"))?;
    ensure(cert.max_spend_ratio() <= 4.0, || {
        format!("{name}: level spend ratio {:.2}", cert.max_spend_ratio())
    })?;
    ensure(cert.max_shrink() <= 2.0 / 3.0 + 1e-9, || {
        format!("{name}: shrink {:.3}", cert.max_shrink())
    })?;
    let k_used = cert.total_spent as f64 / (cert.n as f64).sqrt();
    Ok(format!(
        "{name} n={} K={} spent {:.2}sqrt(n)",
        cert.n, cert.constant, k_used
    ))
}

fn sweep() -> Verdict {
    let t0 = Instant::now();
    let mut lines = Vec::new();
    let arena = Arena::build(ConstructionParams::default()).map_err(|e| e.to_string())?;
    let c = arena.construction.clone().ok_or("no construction")?;
    let rot = Arc::new(c.rotation.clone());
    let mut evader = RobberKind::Evader.build(&arena, 3).map_err(|e| e.to_string())?;
    lines.push(sweep_case(
        "construction/evader",
        c.graph.clone(),
        rot.clone(),
        evader.as_mut(),
        0,
    )?);
    lines.push(sweep_case(
        "construction/random",
        c.graph.clone(),
        rot,
        &mut RandomRobber::new(None),
        1,
    )?);
    for (i, n) in [1_000usize, 10_000, 65_000].into_iter().enumerate() {
        let e = gen::random_triangulation(n, 40 + i as u64).map_err(|e| e.to_string())?;
        let g = Arc::new(gen::random_strong_orientation(&e.rotation, i as u64).map_err(|e| e.to_string())?);
        ensure(g.strongly_connected(), || format!("orientation n={n} not strong"))?;
        lines.push(sweep_case(
            "triangulation/random",
            g,
            Arc::new(e.rotation),
            &mut RandomRobber::new(None),
            i as u64,
        )?);
    }
    Ok(format!("{}; {:.1}s", lines.join("; "), t0.elapsed().as_secs_f64()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("construction census", census),
        ("center escape, c in {1,2}", center_escape),
        ("perimeter return", perimeter_return),
        ("3-cop survival suite", survival),
        ("4-cop falsification control", four_cop_control),
        ("solver oracle", solver_oracle),
        ("separator bounds", separator_bounds),
        ("separator sweep end to end", sweep),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match verdict {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
