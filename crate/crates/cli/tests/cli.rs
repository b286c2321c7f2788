use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use pursuit_core::construction::ConstructionParams;
use pursuit_core::engine::{replay, GameConfig, Trace};
use pursuit_core::gen;
use pursuit_core::io::GraphDocument;

fn pursuit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pursuit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn build_reports_formula_counts() {
    let o = pursuit(&["build", "--green", "1000", "--spoke", "10", "--chain", "16"]);
    assert_eq!(o.status.code(), Some(0));
    let expected = ConstructionParams::default().vertex_count();
    assert_eq!(expected, 64_752);
    assert!(stdout(&o).contains(&format!("{expected} vertices")), "{}", stdout(&o));
}

#[test]
fn build_flags_small_green_as_not_admissible() {
    let o = pursuit(&["build", "--green", "100"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stderr(&o).contains("warning: not admissible (100 < 218)"),
        "{}",
        stderr(&o)
    );
    let o = pursuit(&["build", "--green", "250"]);
    assert!(stdout(&o).contains("admissible (250 > 218)"));
    assert!(stderr(&o).is_empty());
}

#[test]
fn build_rejects_bad_params_as_usage_error() {
    let o = pursuit(&["build", "--chain", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(pursuit(&["build", "--green", "x"]).status.code(), Some(2));
    assert_eq!(pursuit(&["teleport"]).status.code(), Some(2));
}

#[test]
fn solve_small_families() {
    for (family, number) in [("directed-cycle:6", 2), ("path:5", 1), ("complete:4", 1)] {
        let o = pursuit(&["solve", "--family", family]);
        assert_eq!(o.status.code(), Some(0), "{family}");
        assert!(
            stdout(&o).contains(&format!("cop number {number}")),
            "{family}: {}",
            stdout(&o)
        );
    }
}

#[test]
fn solve_reads_graph_files_and_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let e = gen::directed_cycle(6).unwrap();
    let g = dir.path().join("c6.json");
    GraphDocument::from_graph(&e.graph, Some(&e.rotation), None)
        .write(&g)
        .unwrap();
    let table = dir.path().join("c6.crst");
    let o = pursuit(&[
        "solve",
        "--graph",
        g.to_str().unwrap(),
        "--table",
        table.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("1 cops: robber win"));
    assert!(stdout(&o).contains("cop number 2"));
    let back = pursuit_core::solver::SolveResult::read_table(&e.graph, std::fs::File::open(&table).unwrap()).unwrap();
    assert_eq!(back.k(), 2);
    assert!(back.is_cop_win());
}

#[test]
fn solve_budget_guard_is_an_error() {
    let o = pursuit(&["solve", "--family", "grid:6x6", "--k", "3", "--max-states", "1000"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("exceeds budget"));
}

#[test]
fn verify_lemmas_pass() {
    let o = pursuit(&["verify", "l31", "--c", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = pursuit(&["verify", "l31", "--c", "2", "--cross-check", "64"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 counterexamples: pass"));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l32.json");
    let o = pursuit(&["verify", "l32", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(r["max_moves"].as_u64().unwrap() <= 27);
    assert_eq!(r["horizon"], 27);
}

#[test]
fn verify_horizon_misconfiguration() {
    let o = pursuit(&["verify", "l31", "--horizon", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let o = pursuit(&["verify", "l31", "--c", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn separate_checks_bounds() {
    let o = pursuit(&["separate", "--family", "triangulation:3000:5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("pass\n"));
    // an impossible constant turns the check into a property violation
    let o = pursuit(&["separate", "--family", "grid:30x30", "--constant", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn evader_survives_greedy_for_the_full_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let o = pursuit(&[
        "simulate",
        "--green",
        "250",
        "--cops",
        "greedy",
        "--k",
        "3",
        "--seeds",
        "0",
        "--traces",
        "summary",
        "--expect",
        "survive",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = summary(dir.path());
    let m = &s["matches"][0];
    assert_eq!(m["outcome"]["result"], "robber_survived");
    assert_eq!(m["outcome"]["rounds"], 100_000);
    assert_eq!(m["robber_report"]["violation_count"], 0);
}

#[test]
fn evader_survives_random_cops_on_every_seed() {
    let o = pursuit(&[
        "tournament",
        "--green",
        "250",
        "--cops",
        "random",
        "--k",
        "3",
        "--seeds",
        "0..100",
        "--traces",
        "none",
        "--expect",
        "survive",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("random: 100 matches, 0 cops_win, 100 robber_survived"));
}

#[test]
fn sweep_captures_within_budget() {
    let dir = tempfile::tempdir().unwrap();
    let o = pursuit(&[
        "simulate",
        "--green",
        "250",
        "--cops",
        "sweep",
        "--max-rounds",
        "0",
        "--traces",
        "summary",
        "--expect",
        "capture",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let m = &summary(dir.path())["matches"][0];
    assert_eq!(m["outcome"]["result"], "cops_win");
    let cert = &m["cop_report"];
    let n = ConstructionParams::new(250, 10, 16).vertex_count() as f64;
    assert_eq!(cert["budget"].as_u64().unwrap(), (16.0 * n.sqrt()).ceil() as u64);
    assert!(cert["total_spent"].as_u64().unwrap() <= cert["budget"].as_u64().unwrap());
    assert_eq!(m["k"], cert["budget"]);
}

#[test]
fn trap_capture_is_reported_against_survive_expectation() {
    let o = pursuit(&[
        "simulate", "--green", "250", "--cops", "trap", "--traces", "none", "--expect", "survive",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("VIOLATION: robber was captured"));
}

#[test]
fn traces_are_the_source_of_truth() {
    let dir = tempfile::tempdir().unwrap();
    let o = pursuit(&[
        "simulate",
        "--green",
        "250",
        "--cops",
        "exit-blocker",
        "--k",
        "3",
        "--max-rounds",
        "3000",
        "--seeds",
        "4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = summary(dir.path());
    let m = &s["matches"][0];
    let path = m["trace_file"].as_str().unwrap();
    let trace = Trace::read_jsonl(std::io::BufReader::new(std::fs::File::open(path).unwrap())).unwrap();
    let counts = trace.recount().unwrap();
    assert_eq!(counts.rounds, m["rounds"].as_u64().unwrap());
    assert_eq!(counts.robber_steps, m["robber_steps"].as_u64().unwrap());
    assert_eq!(counts.robber_turns, m["robber_turns"].as_u64().unwrap());
    assert_eq!(trace.header.seed, 4);
    let arena = pursuit_core::catalog::Arena::build(ConstructionParams::new(250, 10, 16)).unwrap();
    let config = GameConfig::new(arena.graph.clone(), 3, Some(3000)).unwrap();
    let end = replay(&config, &trace).unwrap();
    assert_eq!(end.digest_hex(), m["final_digest"].as_str().unwrap());
}

#[test]
fn runs_are_deterministic_and_ordered() {
    let run = |jobs: &str| {
        let dir = tempfile::tempdir().unwrap();
        let o = pursuit(&[
            "tournament",
            "--green",
            "250",
            "--cops",
            "random,hybrid:0..3,greedy",
            "--k",
            "3",
            "--seeds",
            "5,1,3",
            "--max-rounds",
            "2000",
            "--jobs",
            jobs,
            "--out",
            dir.path().to_str().unwrap(),
            "--traces",
            "none",
        ]);
        assert_eq!(o.status.code(), Some(0));
        let s = summary(dir.path());
        s["matches"].as_array().unwrap().clone()
    };
    let one = run("1");
    let many = run("4");
    assert_eq!(one, many);
    let keys: Vec<(String, u64)> = one
        .iter()
        .map(|m| (m["strategy"].as_str().unwrap().to_string(), m["seed"].as_u64().unwrap()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(keys.len(), 15);
}

#[test]
fn config_file_supplies_flags_and_command_line_wins() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"green": 250, "simulate": {"cops": "greedy", "k": 2, "max_rounds": 500, "seeds": [7], "traces": "none"}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = pursuit(&[
        "--config",
        cfg.to_str().unwrap(),
        "simulate",
        "--k",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = summary(&out);
    assert_eq!(s["plan"]["seeds"][0], 7);
    assert_eq!(s["plan"]["max_rounds"], 500);
    assert_eq!(s["matches"][0]["k"], 3);
    assert_eq!(s["plan"]["arena"]["params"]["green"], 250);

    std::fs::write(&cfg, r#"{"simulate": {"warp": 9}}"#).unwrap();
    let o = pursuit(&["--config", cfg.to_str().unwrap(), "simulate"]);
    assert_eq!(o.status.code(), Some(2));
}
