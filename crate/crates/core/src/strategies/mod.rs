//! Cop adversaries and simple robbers.

mod exit_blocker;
mod oracle;
mod sweep;
mod trap;

use std::sync::mpsc::Receiver;
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use exit_blocker::ExitBlocker;
pub use oracle::{path_avoiding, ArenaOracle, BfsCache, Distances};
pub use sweep::{LevelRecord, SeparatorSweep, SweepCertificate, DEFAULT_SWEEP_CONSTANT};
pub use trap::FourCopTrap;

use crate::construction::Construction;
use crate::engine::{
    CopMove, CopStrategy, GameConfig, GameState, History, RecordKind, RobberMove, RobberStrategy, Trace,
};
use crate::error::{Error, Result};
use crate::graph::{Digraph, VertexId};

/// Where cops start.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// Evenly spaced vertex ids.
    Spread,
    /// Unit centers `0, 1, ..` of the arena.
    Centers,
    Random,
    Fixed(Vec<VertexId>),
}

pub(crate) fn place(
    p: &Placement,
    config: &GameConfig,
    arena: Option<&Construction>,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<VertexId>> {
    let n = config.graph.vertex_count();
    let k = config.k;
    Ok(match p {
        Placement::Spread => (0..k).map(|i| VertexId::from(i * n / k)).collect(),
        Placement::Centers => {
            let a = arena.ok_or_else(|| Error::Strategy("center placement needs an arena".into()))?;
            (0..k).map(|i| a.center_of(i % a.units.len())).collect()
        }
        Placement::Random => (0..k).map(|_| VertexId::from(rng.random_range(0..n))).collect(),
        Placement::Fixed(v) => v.clone(),
    })
}

fn seeded(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Every cop steps along a shortest directed path to the robber.
pub struct Greedy {
    placement: Placement,
    arena: Option<Arc<Construction>>,
    dist: Distances,
}

impl Greedy {
    pub fn new(placement: Placement) -> Self {
        Greedy {
            placement,
            arena: None,
            dist: Distances::bfs(),
        }
    }

    pub fn on_arena(oracle: Arc<ArenaOracle>, placement: Placement) -> Self {
        Greedy {
            placement,
            arena: Some(oracle.arena().clone()),
            dist: Distances::Arena(oracle),
        }
    }
}

/// Greedy step for every cop toward `target`.
pub fn greedy_move(dist: &mut Distances, g: &Digraph, state: &GameState, target: VertexId) -> CopMove {
    CopMove(state.cops.iter().map(|&c| dist.step_toward(g, c, target)).collect())
}

impl CopStrategy for Greedy {
    fn name(&self) -> String {
        "greedy".into()
    }

    fn place(&mut self, config: &GameConfig, _state: &GameState) -> Result<Vec<VertexId>> {
        place(&self.placement, config, self.arena.as_deref(), &mut seeded(0, 1))
    }

    fn step(&mut self, config: &GameConfig, state: &GameState, _h: &History) -> Result<CopMove> {
        let r = state.robber.expect("placed");
        Ok(greedy_move(&mut self.dist, &config.graph, state, r))
    }
}

/// Each cop independently stays or takes a uniformly random out-arc.
pub struct RandomCops {
    placement: Placement,
    arena: Option<Arc<Construction>>,
    rng: ChaCha8Rng,
}

impl RandomCops {
    pub fn new(placement: Placement, arena: Option<Arc<Construction>>) -> Self {
        RandomCops {
            placement,
            arena,
            rng: seeded(0, 2),
        }
    }
}

fn random_step(g: &Digraph, v: VertexId, rng: &mut ChaCha8Rng) -> VertexId {
    let out = g.out_raw(v.idx());
    let i = rng.random_range(0..=out.len());
    if i == out.len() {
        v
    } else {
        VertexId(out[i])
    }
}

impl CopStrategy for RandomCops {
    fn name(&self) -> String {
        "random".into()
    }

    fn reset(&mut self, seed: u64) {
        self.rng = seeded(seed, 2);
    }

    fn place(&mut self, config: &GameConfig, _state: &GameState) -> Result<Vec<VertexId>> {
        place(&self.placement, config, self.arena.as_deref(), &mut self.rng)
    }

    fn step(&mut self, config: &GameConfig, state: &GameState, _h: &History) -> Result<CopMove> {
        Ok(CopMove(
            state
                .cops
                .iter()
                .map(|&c| random_step(&config.graph, c, &mut self.rng))
                .collect(),
        ))
    }
}

/// Replays a fixed placement and move list, then stays put.
pub struct Scripted {
    placement: Vec<VertexId>,
    moves: Vec<CopMove>,
    next: usize,
}

impl Scripted {
    pub fn new(placement: Vec<VertexId>, moves: Vec<CopMove>) -> Self {
        Scripted {
            placement,
            moves,
            next: 0,
        }
    }

    /// The cop side of a recorded trace.
    pub fn from_trace(trace: &Trace) -> Result<Self> {
        let mut placement = None;
        let mut moves = Vec::new();
        for r in &trace.records {
            match r.side {
                RecordKind::CopPlacement => placement = Some(r.moves.clone()),
                RecordKind::Cops => moves.push(CopMove(r.moves.clone())),
                _ => {}
            }
        }
        let placement = placement.ok_or_else(|| Error::Format("trace has no cop placement".into()))?;
        Ok(Scripted::new(placement, moves))
    }
}

impl CopStrategy for Scripted {
    fn name(&self) -> String {
        "scripted".into()
    }

    fn reset(&mut self, _seed: u64) {
        self.next = 0;
    }

    fn place(&mut self, _config: &GameConfig, _state: &GameState) -> Result<Vec<VertexId>> {
        Ok(self.placement.clone())
    }

    fn step(&mut self, _config: &GameConfig, state: &GameState, _h: &History) -> Result<CopMove> {
        let m = self
            .moves
            .get(self.next)
            .cloned()
            .unwrap_or_else(|| CopMove::stay(state));
        self.next += 1;
        Ok(m)
    }
}

/// Cop moves supplied from outside the match loop, e.g. by a human.
pub struct HumanRemote {
    rx: Receiver<Vec<VertexId>>,
}

impl HumanRemote {
    pub fn new(rx: Receiver<Vec<VertexId>>) -> Self {
        HumanRemote { rx }
    }

    fn next(&self) -> Result<Vec<VertexId>> {
        self.rx
            .recv()
            .map_err(|_| Error::Strategy("remote cop controller disconnected".into()))
    }
}

impl CopStrategy for HumanRemote {
    fn name(&self) -> String {
        "human".into()
    }

    fn place(&mut self, _config: &GameConfig, _state: &GameState) -> Result<Vec<VertexId>> {
        self.next()
    }

    fn step(&mut self, _config: &GameConfig, _state: &GameState, _h: &History) -> Result<CopMove> {
        self.next().map(CopMove)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridWeights {
    pub greedy: f64,
    pub random: f64,
    pub stay: f64,
    pub patrol: f64,
}

/// Per-cop random mixture of chasing, wandering, idling and patrolling
/// toward random unit centers. Weights are drawn from the fuzz seed.
pub struct Hybrid {
    fuzz: u64,
    arena: Arc<Construction>,
    dist: Distances,
    weights: Vec<HybridWeights>,
    patrol: Vec<VertexId>,
    rng: ChaCha8Rng,
}

impl Hybrid {
    pub fn new(oracle: Arc<ArenaOracle>, fuzz: u64) -> Self {
        Hybrid {
            fuzz,
            arena: oracle.arena().clone(),
            dist: Distances::Arena(oracle),
            weights: Vec::new(),
            patrol: Vec::new(),
            rng: seeded(fuzz, 3),
        }
    }

    pub fn weights(&self) -> &[HybridWeights] {
        &self.weights
    }
}

impl CopStrategy for Hybrid {
    fn name(&self) -> String {
        format!("hybrid-{}", self.fuzz)
    }

    fn reset(&mut self, seed: u64) {
        self.rng = seeded(seed ^ self.fuzz.rotate_left(17), 3);
    }

    fn place(&mut self, config: &GameConfig, _state: &GameState) -> Result<Vec<VertexId>> {
        let mut wr = seeded(self.fuzz, 4);
        self.weights = (0..config.k)
            .map(|_| HybridWeights {
                greedy: wr.random::<f64>(),
                random: wr.random::<f64>() * 0.5,
                stay: wr.random::<f64>() * 0.3,
                patrol: wr.random::<f64>(),
            })
            .collect();
        let centers: Vec<VertexId> = self.arena.units.iter().map(|u| u.center).collect();
        self.patrol = (0..config.k)
            .map(|_| *centers.choose(&mut self.rng).expect("units"))
            .collect();
        let mode = wr.random_range(0..3);
        let p = match mode {
            0 => Placement::Centers,
            1 => Placement::Random,
            _ => Placement::Spread,
        };
        place(&p, config, Some(&self.arena), &mut self.rng)
    }

    fn step(&mut self, config: &GameConfig, state: &GameState, _h: &History) -> Result<CopMove> {
        let g = &config.graph;
        let robber = state.robber.expect("placed");
        let mut out = Vec::with_capacity(state.cops.len());
        for (i, &c) in state.cops.iter().enumerate() {
            let w = self.weights[i];
            let total = w.greedy + w.random + w.stay + w.patrol;
            let mut x = self.rng.random::<f64>() * total;
            let next = if x < w.greedy {
                self.dist.step_toward(g, c, robber)
            } else {
                x -= w.greedy;
                if x < w.random {
                    random_step(g, c, &mut self.rng)
                } else if x < w.random + w.stay {
                    c
                } else {
                    if c == self.patrol[i] {
                        let centers: Vec<VertexId> = self.arena.units.iter().map(|u| u.center).collect();
                        self.patrol[i] = *centers.choose(&mut self.rng).expect("units");
                    }
                    self.dist.step_toward(g, c, self.patrol[i])
                }
            };
            out.push(next);
        }
        Ok(CopMove(out))
    }
}

/// Robber that moves uniformly at random among safe options when it can.
pub struct RandomRobber {
    rng: ChaCha8Rng,
    start: Option<VertexId>,
}

impl RandomRobber {
    pub fn new(start: Option<VertexId>) -> Self {
        RandomRobber {
            rng: seeded(0, 5),
            start,
        }
    }
}

impl RobberStrategy for RandomRobber {
    fn name(&self) -> String {
        "random".into()
    }

    fn reset(&mut self, seed: u64) {
        self.rng = seeded(seed, 5);
    }

    fn place(&mut self, config: &GameConfig, state: &GameState) -> Result<VertexId> {
        if let Some(v) = self.start {
            return Ok(v);
        }
        let n = config.graph.vertex_count();
        for _ in 0..64 {
            let v = VertexId::from(self.rng.random_range(0..n));
            if !state.cops.contains(&v) {
                return Ok(v);
            }
        }
        Ok(VertexId::from(self.rng.random_range(0..n)))
    }

    fn step(&mut self, config: &GameConfig, state: &GameState, _h: &History) -> Result<RobberMove> {
        let g = &config.graph;
        let r = state.robber.expect("placed");
        let options: Vec<VertexId> = std::iter::once(r).chain(g.out_neighbors(r)).collect();
        let safe: Vec<VertexId> = options
            .iter()
            .copied()
            .filter(|&x| !state.cops.iter().any(|&c| c == x || g.has_arc(c, x)))
            .collect();
        let pool = if safe.is_empty() { &options } else { &safe };
        Ok(RobberMove(
            *pool.choose(&mut self.rng).expect("stay is always an option"),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_match, MatchOptions, StationaryRobber};

    #[test]
    fn greedy_catches_on_a_directed_path() {
        let g = Arc::new(Digraph::new(3, vec![(0, 1), (1, 2)]).unwrap());
        let cfg = GameConfig::new(g, 1, Some(10)).unwrap();
        let mut cop = Greedy::new(Placement::Fixed(vec![VertexId(1)]));
        let mut robber = StationaryRobber { at: VertexId(2) };
        let t = run_match(&cfg, &mut cop, &mut robber, MatchOptions::default());
        assert!(t.summary.outcome.is_capture());
        assert_eq!(t.summary.cop_turns, 1);
    }

    #[test]
    fn greedy_stays_when_robber_unreachable() {
        let g = Arc::new(Digraph::new(3, vec![(0, 1), (1, 2)]).unwrap());
        let cfg = GameConfig::new(g, 1, Some(5)).unwrap();
        let s = GameState::new(&cfg)
            .place_cops(&cfg, &[VertexId(2)])
            .unwrap()
            .place_robber(&cfg, VertexId(0))
            .unwrap();
        let mut cop = Greedy::new(Placement::Spread);
        let m = cop.step(&cfg, &s, &History::default()).unwrap();
        assert_eq!(m.0, vec![VertexId(2)]);
    }

    #[test]
    fn greedy_on_directed_triangle_two_cops() {
        let g = Arc::new(Digraph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap());
        let cfg = GameConfig::new(g, 2, Some(100)).unwrap();
        let mut cop = Greedy::new(Placement::Spread);
        let mut robber = StationaryRobber { at: VertexId(2) };
        let t = run_match(&cfg, &mut cop, &mut robber, MatchOptions::default());
        assert!(t.summary.outcome.is_capture());
    }

    #[test]
    fn random_cops_are_reproducible() {
        let g = Arc::new(Digraph::from_undirected(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap());
        let cfg = GameConfig::new(g, 1, Some(50)).unwrap();
        let play = |seed| {
            let mut cop = RandomCops::new(Placement::Spread, None);
            let mut robber = RandomRobber::new(None);
            run_match(
                &cfg,
                &mut cop,
                &mut robber,
                MatchOptions {
                    seed,
                    ..Default::default()
                },
            )
        };
        assert_eq!(play(7).summary.final_digest, play(7).summary.final_digest);
    }
}
