//! Rules of the game as a replayable state machine.
//!
//! Cops place first (stacking allowed), then the robber. Afterwards the
//! sides alternate, cops first; every agent may stay or cross one arc in
//! its direction. Capture is vertex coincidence after any half-round.

use std::io::{BufRead, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{Digraph, VertexId};

pub const DEFAULT_MAX_ROUNDS: u64 = 100_000;
pub const TRACE_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct GameConfig {
    pub graph: Arc<Digraph>,
    pub k: usize,
    /// `None` plays until capture.
    pub max_rounds: Option<u64>,
}

impl GameConfig {
    pub fn new(graph: Arc<Digraph>, k: usize, max_rounds: Option<u64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if graph.vertex_count() == 0 {
            return Err(Error::InvalidConfig("graph is empty".into()));
        }
        if max_rounds == Some(0) {
            return Err(Error::InvalidConfig("max_rounds must be positive".into()));
        }
        Ok(GameConfig { graph, k, max_rounds })
    }

    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.graph.vertex_count() as u64).to_le_bytes());
        for &(a, b) in self.graph.arcs() {
            h.update(a.to_le_bytes());
            h.update(b.to_le_bytes());
        }
        h.update((self.k as u64).to_le_bytes());
        h.update(self.max_rounds.unwrap_or(0).to_le_bytes());
        hex::encode(h.finalize())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    CopPlacement,
    RobberPlacement,
    CopTurn,
    RobberTurn,
    CopsWin,
    RobberSurvived,
}

impl Phase {
    pub fn is_terminal(self) -> bool {
        matches!(self, Phase::CopsWin | Phase::RobberSurvived)
    }

    pub fn name(self) -> &'static str {
        match self {
            Phase::CopPlacement => "cop_placement",
            Phase::RobberPlacement => "robber_placement",
            Phase::CopTurn => "cop_turn",
            Phase::RobberTurn => "robber_turn",
            Phase::CopsWin => "cops_win",
            Phase::RobberSurvived => "robber_survived",
        }
    }
}

/// Destination of every cop, indexed like [`GameState::cops`]; a cop that
/// stays lists its own vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CopMove(pub Vec<VertexId>);

impl CopMove {
    pub fn stay(state: &GameState) -> Self {
        CopMove(state.cops.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RobberMove(pub VertexId);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameState {
    pub phase: Phase,
    pub cops: Vec<VertexId>,
    pub robber: Option<VertexId>,
    /// 0 during placement, 1 from the first cop turn.
    pub round: u64,
    /// Robber half-rounds played, stays included.
    pub robber_turns: u64,
    /// Robber half-rounds in which it crossed an arc.
    pub robber_steps: u64,
    pub cop_turns: u64,
    #[serde(with = "hex_digest")]
    pub digest: [u8; 32],
}

mod hex_digest {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(d))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let s = String::deserialize(d)?;
        let v = hex::decode(&s).map_err(serde::de::Error::custom)?;
        v.try_into()
            .map_err(|_| serde::de::Error::custom("digest must be 32 bytes"))
    }
}

impl GameState {
    pub fn new(config: &GameConfig) -> Self {
        let mut h = Sha256::new();
        h.update(config.digest().as_bytes());
        GameState {
            phase: Phase::CopPlacement,
            cops: Vec::new(),
            robber: None,
            round: 0,
            robber_turns: 0,
            robber_steps: 0,
            cop_turns: 0,
            digest: h.finalize().into(),
        }
    }

    pub fn digest_hex(&self) -> String {
        hex::encode(self.digest)
    }

    pub fn is_over(&self) -> bool {
        self.phase.is_terminal()
    }

    pub fn robber_captured(&self) -> bool {
        self.robber.is_some_and(|r| self.cops.contains(&r))
    }

    fn expect(&self, phase: Phase) -> Result<()> {
        if self.phase != phase {
            return Err(Error::WrongPhase {
                expected: phase.name(),
                found: self.phase.name().into(),
            });
        }
        Ok(())
    }

    fn roll(&mut self) {
        let mut h = Sha256::new();
        h.update(self.digest);
        h.update([self.phase as u8]);
        h.update(self.round.to_le_bytes());
        h.update(self.robber.map_or(u32::MAX, |r| r.0).to_le_bytes());
        for c in &self.cops {
            h.update(c.0.to_le_bytes());
        }
        self.digest = h.finalize().into();
    }

    pub fn place_cops(&self, config: &GameConfig, positions: &[VertexId]) -> Result<GameState> {
        self.expect(Phase::CopPlacement)?;
        if positions.len() != config.k {
            return Err(Error::WrongCopCount {
                expected: config.k,
                got: positions.len(),
            });
        }
        for &p in positions {
            config.graph.check_vertex(p)?;
        }
        let mut s = self.clone();
        s.cops = positions.to_vec();
        s.phase = Phase::RobberPlacement;
        s.roll();
        Ok(s)
    }

    pub fn place_robber(&self, config: &GameConfig, v: VertexId) -> Result<GameState> {
        self.expect(Phase::RobberPlacement)?;
        config.graph.check_vertex(v)?;
        let mut s = self.clone();
        s.robber = Some(v);
        if s.cops.contains(&v) {
            s.phase = Phase::CopsWin;
        } else {
            s.phase = Phase::CopTurn;
            s.round = 1;
        }
        s.roll();
        Ok(s)
    }

    pub fn apply_cop_move(&self, config: &GameConfig, m: &CopMove) -> Result<GameState> {
        self.expect(Phase::CopTurn)?;
        if m.0.len() != self.cops.len() {
            return Err(Error::WrongCopCount {
                expected: self.cops.len(),
                got: m.0.len(),
            });
        }
        for (i, (&from, &to)) in self.cops.iter().zip(&m.0).enumerate() {
            config.graph.check_vertex(to)?;
            if !config.graph.is_step(from, to) {
                return Err(Error::IllegalMove(format!("cop {i} cannot move {from} -> {to}")));
            }
        }
        let mut s = self.clone();
        s.cops.clone_from(&m.0);
        s.cop_turns += 1;
        s.phase = if s.robber_captured() {
            Phase::CopsWin
        } else {
            Phase::RobberTurn
        };
        s.roll();
        Ok(s)
    }

    pub fn apply_robber_move(&self, config: &GameConfig, m: RobberMove) -> Result<GameState> {
        self.expect(Phase::RobberTurn)?;
        config.graph.check_vertex(m.0)?;
        let from = self.robber.expect("robber placed before its turn");
        if !config.graph.is_step(from, m.0) {
            return Err(Error::IllegalMove(format!("robber cannot move {from} -> {}", m.0)));
        }
        let mut s = self.clone();
        s.robber = Some(m.0);
        s.robber_turns += 1;
        if m.0 != from {
            s.robber_steps += 1;
        }
        if s.robber_captured() {
            s.phase = Phase::CopsWin;
        } else {
            s.round += 1;
            s.phase = match config.max_rounds {
                Some(max) if s.round > max => Phase::RobberSurvived,
                _ => Phase::CopTurn,
            };
        }
        s.roll();
        Ok(s)
    }

    /// Stay plus every out-neighbour of a cop.
    pub fn legal_cop_targets(&self, config: &GameConfig, cop: usize) -> Vec<VertexId> {
        let v = self.cops[cop];
        std::iter::once(v).chain(config.graph.out_neighbors(v)).collect()
    }

    pub fn legal_robber_targets(&self, config: &GameConfig) -> Vec<VertexId> {
        match self.robber {
            Some(v) => std::iter::once(v).chain(config.graph.out_neighbors(v)).collect(),
            None => Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Cops,
    Robber,
}

/// Everything a strategy may look at besides the current state.
#[derive(Clone, Debug, Default)]
pub struct History {
    /// `(cops, robber)` after each completed half-round, oldest first.
    /// Empty when recording is disabled.
    pub positions: Vec<(Vec<VertexId>, VertexId)>,
}

pub trait CopStrategy: Send {
    fn name(&self) -> String;

    /// Called once before placement with the match seed.
    fn reset(&mut self, _seed: u64) {}

    fn place(&mut self, config: &GameConfig, state: &GameState) -> Result<Vec<VertexId>>;

    fn step(&mut self, config: &GameConfig, state: &GameState, history: &History) -> Result<CopMove>;

    fn annotation(&self) -> Option<serde_json::Value> {
        None
    }

    /// Strategy-specific summary attached to the trace when the match ends.
    fn report(&self) -> Option<serde_json::Value> {
        None
    }
}

pub trait RobberStrategy: Send {
    fn name(&self) -> String;

    fn reset(&mut self, _seed: u64) {}

    fn place(&mut self, config: &GameConfig, state: &GameState) -> Result<VertexId>;

    fn step(&mut self, config: &GameConfig, state: &GameState, history: &History) -> Result<RobberMove>;

    /// Debug annotation for the latest move.
    fn annotation(&self) -> Option<serde_json::Value> {
        None
    }

    /// Strategy-specific summary attached to the trace when the match ends.
    fn report(&self) -> Option<serde_json::Value> {
        None
    }
}

impl<T: CopStrategy + ?Sized> CopStrategy for Box<T> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn reset(&mut self, seed: u64) {
        (**self).reset(seed)
    }
    fn place(&mut self, c: &GameConfig, s: &GameState) -> Result<Vec<VertexId>> {
        (**self).place(c, s)
    }
    fn step(&mut self, c: &GameConfig, s: &GameState, h: &History) -> Result<CopMove> {
        (**self).step(c, s, h)
    }
    fn annotation(&self) -> Option<serde_json::Value> {
        (**self).annotation()
    }
    fn report(&self) -> Option<serde_json::Value> {
        (**self).report()
    }
}

impl<T: RobberStrategy + ?Sized> RobberStrategy for Box<T> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn reset(&mut self, seed: u64) {
        (**self).reset(seed)
    }
    fn place(&mut self, c: &GameConfig, s: &GameState) -> Result<VertexId> {
        (**self).place(c, s)
    }
    fn step(&mut self, c: &GameConfig, s: &GameState, h: &History) -> Result<RobberMove> {
        (**self).step(c, s, h)
    }
    fn annotation(&self) -> Option<serde_json::Value> {
        (**self).annotation()
    }
    fn report(&self) -> Option<serde_json::Value> {
        (**self).report()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub v: u32,
    pub config_digest: String,
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub max_rounds: Option<u64>,
    pub cop_strategy: String,
    pub robber_strategy: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    CopPlacement,
    RobberPlacement,
    Cops,
    Robber,
}

/// One half-round. `moves` lists destinations (all cops, or the robber).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub round: u64,
    pub side: RecordKind,
    pub moves: Vec<VertexId>,
    pub cops: Vec<VertexId>,
    pub robber: Option<VertexId>,
    pub digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotation: Option<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Outcome {
    CopsWin { round: u64, at: VertexId },
    RobberSurvived { rounds: u64 },
    Aborted { side: Side, reason: String },
}

impl Outcome {
    pub fn is_capture(&self) -> bool {
        matches!(self, Outcome::CopsWin { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub outcome: Outcome,
    pub rounds: u64,
    pub robber_turns: u64,
    pub robber_steps: u64,
    pub cop_turns: u64,
    pub final_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robber_report: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cop_report: Option<serde_json::Value>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceCounts {
    pub rounds: u64,
    pub robber_turns: u64,
    pub robber_steps: u64,
    pub cop_turns: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub header: TraceHeader,
    /// Placements are always kept; later records only with full recording.
    pub records: Vec<TraceRecord>,
    pub summary: TraceSummary,
}

impl Trace {
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer(&mut w, &self.header)?;
        writeln!(w)?;
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            writeln!(w)?;
        }
        serde_json::to_writer(&mut w, &self.summary)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf)?;
        Ok(String::from_utf8(buf).expect("json is utf-8"))
    }

    /// Counters recomputed from the records, or `None` when the trace was
    /// recorded in summary mode.
    pub fn recount(&self) -> Option<TraceCounts> {
        let played = self
            .records
            .iter()
            .any(|r| matches!(r.side, RecordKind::Cops | RecordKind::Robber));
        if !played && self.summary.cop_turns + self.summary.robber_turns > 0 {
            return None;
        }
        let mut c = TraceCounts::default();
        let mut at = None;
        for r in &self.records {
            match r.side {
                RecordKind::Cops => c.cop_turns += 1,
                RecordKind::Robber => {
                    c.robber_turns += 1;
                    if r.robber != at {
                        c.robber_steps += 1;
                    }
                }
                RecordKind::CopPlacement | RecordKind::RobberPlacement => {}
            }
            at = r.robber;
            c.rounds = r.round;
        }
        Some(c)
    }

    /// True when the summary counters agree with the records, or when there
    /// are no records to check against.
    pub fn counters_consistent(&self) -> bool {
        self.recount().is_none_or(|c| {
            c == TraceCounts {
                rounds: self.summary.rounds,
                robber_turns: self.summary.robber_turns,
                robber_steps: self.summary.robber_steps,
                cop_turns: self.summary.cop_turns,
            }
        })
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Trace> {
        let lines: Vec<String> = r
            .lines()
            .collect::<std::io::Result<Vec<_>>>()?
            .into_iter()
            .filter(|l| !l.trim().is_empty())
            .collect();
        if lines.len() < 2 {
            return Err(Error::Format("trace needs a header and a summary".into()));
        }
        let header = serde_json::from_str(&lines[0])?;
        let summary = serde_json::from_str(&lines[lines.len() - 1])?;
        let records = lines[1..lines.len() - 1]
            .iter()
            .map(|l| serde_json::from_str(l))
            .collect::<std::result::Result<_, _>>()?;
        Ok(Trace {
            header,
            records,
            summary,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recording {
    /// Every half-round is kept and strategies see the full history.
    Full,
    /// Only placements and the summary; digests still roll.
    Summary,
}

#[derive(Clone, Copy, Debug)]
pub struct MatchOptions {
    pub seed: u64,
    pub recording: Recording,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions {
            seed: 0,
            recording: Recording::Full,
        }
    }
}

fn record(
    state: &GameState,
    kind: RecordKind,
    moves: Vec<VertexId>,
    annotation: Option<serde_json::Value>,
) -> TraceRecord {
    TraceRecord {
        round: state.round,
        side: kind,
        moves,
        cops: state.cops.clone(),
        robber: state.robber,
        digest: state.digest_hex(),
        annotation,
    }
}

/// A match driven one half-round at a time. Every transition goes through
/// the engine; a rejected move leaves the state untouched.
#[derive(Clone, Debug)]
pub struct MatchRecorder {
    config: GameConfig,
    header: TraceHeader,
    full: bool,
    state: GameState,
    records: Vec<TraceRecord>,
    history: History,
    aborted: Option<Outcome>,
}

impl MatchRecorder {
    pub fn new(config: &GameConfig, options: MatchOptions, cop_strategy: String, robber_strategy: String) -> Self {
        MatchRecorder {
            header: TraceHeader {
                v: TRACE_VERSION,
                config_digest: config.digest(),
                seed: options.seed,
                n: config.graph.vertex_count(),
                k: config.k,
                max_rounds: config.max_rounds,
                cop_strategy,
                robber_strategy,
            },
            full: options.recording == Recording::Full,
            state: GameState::new(config),
            config: config.clone(),
            records: Vec::new(),
            history: History::default(),
            aborted: None,
        }
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn header(&self) -> &TraceHeader {
        &self.header
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn place_cops(&mut self, positions: Vec<VertexId>, annotation: Option<serde_json::Value>) -> Result<()> {
        self.state = self.state.place_cops(&self.config, &positions)?;
        self.records
            .push(record(&self.state, RecordKind::CopPlacement, positions, annotation));
        Ok(())
    }

    pub fn place_robber(&mut self, v: VertexId, annotation: Option<serde_json::Value>) -> Result<()> {
        self.state = self.state.place_robber(&self.config, v)?;
        self.records
            .push(record(&self.state, RecordKind::RobberPlacement, vec![v], annotation));
        if self.full {
            self.history.positions.push((self.state.cops.clone(), v));
        }
        Ok(())
    }

    pub fn cop_move(&mut self, m: CopMove, annotation: Option<serde_json::Value>) -> Result<()> {
        self.state = self.state.apply_cop_move(&self.config, &m)?;
        if self.full {
            let robber = self.state.robber.expect("placed before cop turns");
            self.records
                .push(record(&self.state, RecordKind::Cops, m.0, annotation));
            self.history.positions.push((self.state.cops.clone(), robber));
        }
        Ok(())
    }

    pub fn robber_move(&mut self, m: RobberMove, annotation: Option<serde_json::Value>) -> Result<()> {
        self.state = self.state.apply_robber_move(&self.config, m)?;
        if self.full {
            self.records
                .push(record(&self.state, RecordKind::Robber, vec![m.0], annotation));
            self.history.positions.push((self.state.cops.clone(), m.0));
        }
        Ok(())
    }

    /// Ends the match early; later moves are rejected by the phase check
    /// of the caller.
    pub fn abort(&mut self, side: Side, e: Error) {
        self.aborted = Some(Outcome::Aborted {
            side,
            reason: e.to_string(),
        });
    }

    /// `None` while the match is still running.
    pub fn outcome(&self) -> Option<Outcome> {
        if let Some(a) = &self.aborted {
            return Some(a.clone());
        }
        match self.state.phase {
            Phase::CopsWin => Some(Outcome::CopsWin {
                round: self.state.round,
                at: self.state.robber.expect("placed"),
            }),
            Phase::RobberSurvived => Some(Outcome::RobberSurvived {
                rounds: self.state.round - 1,
            }),
            _ => None,
        }
    }

    /// Summary of a finished match.
    pub fn summary(
        &self,
        robber_report: Option<serde_json::Value>,
        cop_report: Option<serde_json::Value>,
    ) -> Option<TraceSummary> {
        Some(TraceSummary {
            outcome: self.outcome()?,
            rounds: self.state.round,
            robber_turns: self.state.robber_turns,
            robber_steps: self.state.robber_steps,
            cop_turns: self.state.cop_turns,
            final_digest: self.state.digest_hex(),
            robber_report,
            cop_report,
        })
    }

    /// The trace of a finished match, `None` while it is running.
    pub fn into_trace(
        self,
        robber_report: Option<serde_json::Value>,
        cop_report: Option<serde_json::Value>,
    ) -> Option<Trace> {
        let summary = self.summary(robber_report, cop_report)?;
        Some(Trace {
            header: self.header,
            records: self.records,
            summary,
        })
    }
}

/// Plays one match to completion. Strategy errors and illegal moves end the
/// match with [`Outcome::Aborted`] rather than an `Err`.
pub fn run_match(
    config: &GameConfig,
    cops: &mut dyn CopStrategy,
    robber: &mut dyn RobberStrategy,
    options: MatchOptions,
) -> Trace {
    cops.reset(options.seed);
    robber.reset(options.seed);
    let mut m = MatchRecorder::new(config, options, cops.name(), robber.name());

    let result = (|| -> std::result::Result<(), (Side, Error)> {
        let p = cops.place(config, m.state()).map_err(|e| (Side::Cops, e))?;
        m.place_cops(p, cops.annotation()).map_err(|e| (Side::Cops, e))?;
        let v = robber.place(config, m.state()).map_err(|e| (Side::Robber, e))?;
        m.place_robber(v, robber.annotation()).map_err(|e| (Side::Robber, e))?;
        loop {
            match m.state().phase {
                Phase::CopTurn => {
                    let mv = cops.step(config, m.state(), m.history()).map_err(|e| (Side::Cops, e))?;
                    m.cop_move(mv, cops.annotation()).map_err(|e| (Side::Cops, e))?;
                }
                Phase::RobberTurn => {
                    let mv = robber
                        .step(config, m.state(), m.history())
                        .map_err(|e| (Side::Robber, e))?;
                    m.robber_move(mv, robber.annotation()).map_err(|e| (Side::Robber, e))?;
                }
                Phase::CopsWin | Phase::RobberSurvived => return Ok(()),
                Phase::CopPlacement | Phase::RobberPlacement => unreachable!("placement handled above"),
            }
        }
    })();
    if let Err((side, e)) = result {
        m.abort(side, e);
    }
    m.into_trace(robber.report(), cops.report()).expect("match finished")
}

/// Re-applies a fully recorded trace and checks every digest. Returns the
/// final state.
pub fn replay(config: &GameConfig, trace: &Trace) -> Result<GameState> {
    if trace.header.config_digest != config.digest() {
        return Err(Error::Format("trace was recorded on a different configuration".into()));
    }
    let mut state = GameState::new(config);
    for (i, r) in trace.records.iter().enumerate() {
        state = match r.side {
            RecordKind::CopPlacement => state.place_cops(config, &r.moves)?,
            RecordKind::RobberPlacement => {
                let v = *r
                    .moves
                    .first()
                    .ok_or_else(|| Error::Format("empty robber placement".into()))?;
                state.place_robber(config, v)?
            }
            RecordKind::Cops => state.apply_cop_move(config, &CopMove(r.moves.clone()))?,
            RecordKind::Robber => {
                let v = *r
                    .moves
                    .first()
                    .ok_or_else(|| Error::Format("empty robber move".into()))?;
                state.apply_robber_move(config, RobberMove(v))?
            }
        };
        if state.digest_hex() != r.digest {
            return Err(Error::Format(format!("digest mismatch at record {i}")));
        }
    }
    if state.digest_hex() != trace.summary.final_digest {
        return Err(Error::Format("final digest mismatch".into()));
    }
    Ok(state)
}

/// Robber that never moves after placing at a fixed vertex.
#[derive(Clone, Debug)]
pub struct StationaryRobber {
    pub at: VertexId,
}

impl RobberStrategy for StationaryRobber {
    fn name(&self) -> String {
        "stationary".into()
    }
    fn place(&mut self, _: &GameConfig, _: &GameState) -> Result<VertexId> {
        Ok(self.at)
    }
    fn step(&mut self, _: &GameConfig, s: &GameState, _: &History) -> Result<RobberMove> {
        Ok(RobberMove(s.robber.expect("placed")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, arcs: Vec<(u32, u32)>, k: usize) -> GameConfig {
        GameConfig::new(Arc::new(Digraph::new(n, arcs).unwrap()), k, Some(DEFAULT_MAX_ROUNDS)).unwrap()
    }

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn stacking_and_counts() {
        let c = cfg(6, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)], 3);
        let s = GameState::new(&c);
        let s1 = s.place_cops(&c, &[v(0), v(0), v(5)]).unwrap();
        assert_eq!(s1.phase, Phase::RobberPlacement);
        assert!(matches!(
            s.place_cops(&c, &[v(0), v(1)]),
            Err(Error::WrongCopCount { expected: 3, got: 2 })
        ));
        assert!(matches!(
            s.place_cops(&c, &[v(0), v(1), v(9)]),
            Err(Error::InvalidVertex(9))
        ));
        let single = cfg(1, vec![], 1);
        GameState::new(&single).place_cops(&single, &[v(0)]).unwrap();
    }

    #[test]
    fn robber_placement_outcomes() {
        let c = cfg(3, vec![(0, 1), (1, 2), (2, 0)], 1);
        let s = GameState::new(&c).place_cops(&c, &[v(0)]).unwrap();
        assert_eq!(s.place_robber(&c, v(0)).unwrap().phase, Phase::CopsWin);
        let t = s.place_robber(&c, v(2)).unwrap();
        assert_eq!((t.phase, t.round), (Phase::CopTurn, 1));
        assert!(matches!(t.place_robber(&c, v(1)), Err(Error::WrongPhase { .. })));
    }

    #[test]
    fn cop_moves() {
        let c = cfg(3, vec![(0, 1), (1, 2), (2, 0)], 2);
        let s = GameState::new(&c)
            .place_cops(&c, &[v(0), v(1)])
            .unwrap()
            .place_robber(&c, v(2))
            .unwrap();
        assert_eq!(
            s.apply_cop_move(&c, &CopMove::stay(&s)).unwrap().phase,
            Phase::RobberTurn
        );
        assert_eq!(
            s.apply_cop_move(&c, &CopMove(vec![v(0), v(2)])).unwrap().phase,
            Phase::CopsWin
        );
        // 1 -> 0 is against the arc direction
        assert!(matches!(
            s.apply_cop_move(&c, &CopMove(vec![v(0), v(0)])),
            Err(Error::IllegalMove(_))
        ));
    }

    #[test]
    fn robber_moves_and_round_limit() {
        let c = GameConfig::new(
            Arc::new(Digraph::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap()),
            1,
            Some(2),
        )
        .unwrap();
        let mut s = GameState::new(&c)
            .place_cops(&c, &[v(0)])
            .unwrap()
            .place_robber(&c, v(2))
            .unwrap();
        s = s.apply_cop_move(&c, &CopMove::stay(&s)).unwrap();
        let stay = s.apply_robber_move(&c, RobberMove(v(2))).unwrap();
        assert_eq!((stay.phase, stay.round, stay.robber_steps), (Phase::CopTurn, 2, 0));
        assert_eq!(s.apply_robber_move(&c, RobberMove(v(0))).unwrap().phase, Phase::CopsWin);
        let s2 = stay.apply_cop_move(&c, &CopMove::stay(&stay)).unwrap();
        assert_eq!(
            s2.apply_robber_move(&c, RobberMove(v(2))).unwrap().phase,
            Phase::RobberSurvived
        );
        assert!(s.apply_robber_move(&c, RobberMove(v(1))).is_err());
    }

    struct Chaser;
    impl CopStrategy for Chaser {
        fn name(&self) -> String {
            "chaser".into()
        }
        fn place(&mut self, _: &GameConfig, _: &GameState) -> Result<Vec<VertexId>> {
            Ok(vec![VertexId(0), VertexId(1)])
        }
        fn step(&mut self, c: &GameConfig, s: &GameState, _: &History) -> Result<CopMove> {
            Ok(CopMove(
                s.cops
                    .iter()
                    .map(|&x| c.graph.out_neighbors(x).next().unwrap())
                    .collect(),
            ))
        }
    }

    #[test]
    fn match_trace_replays() {
        let c = cfg(3, vec![(0, 1), (1, 2), (2, 0)], 2);
        let mut robber = StationaryRobber { at: v(2) };
        let t = run_match(&c, &mut Chaser, &mut robber, MatchOptions::default());
        assert!(t.summary.outcome.is_capture());
        let back = Trace::read_jsonl(t.to_jsonl().unwrap().as_bytes()).unwrap();
        assert_eq!(back, t);
        let end = replay(&c, &back).unwrap();
        assert_eq!(end.phase, Phase::CopsWin);
    }

    #[test]
    fn summary_counters_match_records() {
        let arcs = vec![(0, 1), (1, 2), (2, 3), (3, 0), (1, 0), (2, 1), (3, 2), (0, 3)];
        let c = GameConfig::new(Arc::new(Digraph::new(4, arcs).unwrap()), 1, Some(200)).unwrap();
        let mut cops = crate::strategies::RandomCops::new(crate::strategies::Placement::Fixed(vec![v(0)]), None);
        let mut robber = crate::strategies::RandomRobber::new(Some(v(2)));
        for seed in 0..20 {
            let t = run_match(
                &c,
                &mut cops,
                &mut robber,
                MatchOptions {
                    seed,
                    recording: Recording::Full,
                },
            );
            assert!(t.counters_consistent(), "seed {seed}");
            let mut forged = t.clone();
            forged.summary.robber_turns += 1;
            assert!(!forged.counters_consistent());
            let quiet = run_match(
                &c,
                &mut cops,
                &mut robber,
                MatchOptions {
                    seed,
                    recording: Recording::Summary,
                },
            );
            assert!(quiet.recount().is_none() || quiet.summary.cop_turns == 0);
        }
    }
}
