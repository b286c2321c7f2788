use std::sync::Arc;

use pursuit_core::construction::{Construction, ConstructionParams};
use pursuit_core::engine::{run_match, GameConfig, MatchOptions, Outcome, Recording};
use pursuit_core::evader::Evader;
use pursuit_core::gen::{random_strong_orientation, random_triangulation};
use pursuit_core::strategies::{RandomRobber, SeparatorSweep, DEFAULT_SWEEP_CONSTANT};

fn summary(seed: u64) -> MatchOptions {
    MatchOptions {
        seed,
        recording: Recording::Summary,
    }
}

#[test]
fn sweep_catches_random_robbers_on_triangulations() {
    for seed in 0..6u64 {
        let e = random_triangulation(400 + 300 * seed as usize, seed).unwrap();
        let g = Arc::new(random_strong_orientation(&e.rotation, seed).unwrap());
        let rot = Arc::new(e.rotation);
        let mut sweep = SeparatorSweep::new(g.clone(), rot, DEFAULT_SWEEP_CONSTANT).unwrap();
        let config = GameConfig::new(g, sweep.budget(), Some(1_000_000)).unwrap();
        let trace = run_match(&config, &mut sweep, &mut RandomRobber::new(None), summary(seed));
        assert!(
            trace.summary.outcome.is_capture(),
            "seed {seed}: {:?}",
            trace.summary.outcome
        );
        let cert = sweep.certificate();
        assert!(cert.total_spent <= cert.budget);
        assert!(cert.all_sealed());
        assert!(cert.max_spend_ratio() <= 4.0, "{cert:?}");
        assert!(cert.max_shrink() <= 2.0 / 3.0 + 1e-9, "{cert:?}");
        let n = cert.n as f64;
        assert!(cert.levels.len() as f64 <= n.ln() / 1.5f64.ln() + 1.0);
    }
}

#[test]
fn sweep_catches_the_evader_on_a_small_arena() {
    let arena = Arc::new(Construction::assemble(ConstructionParams::new(250, 10, 16)).unwrap());
    let g = arena.graph.clone();
    let rot = Arc::new(arena.rotation.clone());
    let mut sweep = SeparatorSweep::new(g.clone(), rot, DEFAULT_SWEEP_CONSTANT).unwrap();
    let config = GameConfig::new(g, sweep.budget(), Some(1_000_000)).unwrap();
    let mut evader = Evader::new(arena).unwrap();
    let trace = run_match(&config, &mut sweep, &mut evader, summary(1));
    assert!(
        matches!(trace.summary.outcome, Outcome::CopsWin { .. }),
        "{:?}",
        trace.summary.outcome
    );
    assert!(sweep.certificate().all_sealed());
}
