use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use pursuit_core::catalog::{Arena, RobberKind};
use pursuit_core::construction::{Admissibility, VertexRole};
use pursuit_core::engine::{
    CopMove, GameConfig, MatchOptions, MatchRecorder, Outcome, Phase, Recording, RobberStrategy, Side, TraceHeader,
    TraceRecord, TraceSummary,
};
use pursuit_core::{Error, Result, VertexId};

pub const VIEW_VERSION: u32 = 1;

/// A registered arena with its precomputed planar layout.
pub struct ArenaEntry {
    pub id: String,
    pub arena: Arena,
    /// Stereographic projection for constructions, a circle otherwise.
    pub layout: Vec<[f64; 2]>,
    /// Small arena meant for the UI, not for the survival claim.
    pub demo: bool,
}

impl ArenaEntry {
    pub fn new(id: impl Into<String>, arena: Arena, demo: bool) -> Self {
        let layout = match &arena.construction {
            Some(c) => c.planar_layout(),
            None => {
                let n = arena.vertex_count() as f64;
                (0..arena.vertex_count())
                    .map(|i| {
                        let t = std::f64::consts::TAU * i as f64 / n;
                        [t.cos(), t.sin()]
                    })
                    .collect()
            }
        };
        ArenaEntry {
            id: id.into(),
            arena,
            layout,
            demo,
        }
    }

    pub fn admissibility(&self) -> Option<Admissibility> {
        self.arena.construction.as_ref().map(|c| c.params.admissible())
    }

    pub fn role(&self, v: VertexId) -> Option<VertexRole> {
        self.arena.construction.as_ref().map(|c| c.role(v))
    }
}

pub fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

pub struct Session {
    pub id: String,
    pub arena: Arc<ArenaEntry>,
    pub robber_kind: RobberKind,
    game: MatchRecorder,
    robber: Box<dyn RobberStrategy>,
    /// Bumped on every accepted post; clients may echo it to detect races.
    pub version: u64,
    pub created_ms: u64,
    pub updated_ms: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AgentView {
    pub vertex: VertexId,
    pub xy: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub role: Option<VertexRole>,
}

/// Everything the UI needs to draw one turn.
#[derive(Clone, Debug, Serialize)]
pub struct View {
    pub v: u32,
    pub id: String,
    pub arena: String,
    pub demo: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub admissibility: Option<Admissibility>,
    pub phase: Phase,
    pub version: u64,
    pub k: usize,
    pub round: u64,
    pub max_rounds: Option<u64>,
    pub robber_turns: u64,
    pub robber_steps: u64,
    pub cop_turns: u64,
    pub robber_strategy: String,
    pub cops: Vec<AgentView>,
    pub robber: Option<AgentView>,
    /// Per cop, every vertex it may move to (its own vertex first). Absent
    /// outside the cop turn.
    pub legal_moves: Option<Vec<Vec<VertexId>>>,
    pub robber_annotation: Option<serde_json::Value>,
    pub outcome: Option<Outcome>,
    /// Present once the match is over.
    pub trace_url: Option<String>,
    pub digest: String,
    pub created_ms: u64,
    pub updated_ms: u64,
    /// Whole-arena layout, only when asked for.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layout: Option<Vec<[f64; 2]>>,
}

/// JSONL-ready trace: the summary is missing while the match runs.
#[derive(Clone, Debug, Serialize)]
pub struct TraceDocument<'a> {
    pub header: &'a TraceHeader,
    pub records: &'a [TraceRecord],
    pub summary: Option<TraceSummary>,
}

impl Session {
    pub fn new(
        id: String,
        arena: Arc<ArenaEntry>,
        k: usize,
        robber_kind: RobberKind,
        max_rounds: Option<u64>,
        seed: u64,
    ) -> Result<Self> {
        let config = GameConfig::new(arena.arena.graph.clone(), k, max_rounds)?;
        let mut robber = robber_kind.build(&arena.arena, k)?;
        robber.reset(seed);
        let options = MatchOptions {
            seed,
            recording: Recording::Full,
        };
        let game = MatchRecorder::new(&config, options, "human".into(), robber.name());
        let t = now_ms();
        Ok(Session {
            id,
            arena,
            robber_kind,
            game,
            robber,
            version: 0,
            created_ms: t,
            updated_ms: t,
        })
    }

    pub fn phase(&self) -> Phase {
        self.game.state().phase
    }

    pub fn finished(&self) -> bool {
        self.game.outcome().is_some()
    }

    fn config(&self) -> &GameConfig {
        self.game.config()
    }

    /// Applies the human's cop half-round, then the robber's reply. On an
    /// engine rejection nothing changes.
    pub fn post_cops(&mut self, positions: Vec<VertexId>) -> Result<()> {
        if self.finished() {
            return Err(Error::WrongPhase {
                expected: "cop_placement or cop_turn",
                found: self.outcome_name(),
            });
        }
        match self.phase() {
            Phase::CopPlacement => {
                self.game.place_cops(positions, None)?;
                let config = self.config().clone();
                match self.robber.place(&config, self.game.state()) {
                    Ok(v) => {
                        if let Err(e) = self.game.place_robber(v, self.robber.annotation()) {
                            self.game.abort(Side::Robber, e);
                        }
                    }
                    Err(e) => self.game.abort(Side::Robber, e),
                }
            }
            Phase::CopTurn => {
                self.game.cop_move(CopMove(positions), None)?;
                if self.phase() == Phase::RobberTurn {
                    let config = self.config().clone();
                    let reply = self.robber.step(&config, self.game.state(), self.game.history());
                    match reply.and_then(|m| self.game.robber_move(m, self.robber.annotation())) {
                        Ok(()) => {}
                        Err(e) => self.game.abort(Side::Robber, e),
                    }
                }
            }
            other => {
                return Err(Error::WrongPhase {
                    expected: "cop_placement or cop_turn",
                    found: other.name().into(),
                })
            }
        }
        self.version += 1;
        self.updated_ms = now_ms();
        Ok(())
    }

    fn outcome_name(&self) -> String {
        match self.game.outcome() {
            Some(Outcome::Aborted { .. }) => "aborted".into(),
            _ => self.phase().name().into(),
        }
    }

    fn agent(&self, v: VertexId) -> AgentView {
        AgentView {
            vertex: v,
            xy: self.arena.layout[v.idx()],
            role: self.arena.role(v),
        }
    }

    pub fn view(&self, with_layout: bool) -> View {
        let state = self.game.state();
        let config = self.config();
        let outcome = self.game.outcome();
        let legal_moves = (state.phase == Phase::CopTurn && outcome.is_none())
            .then(|| (0..config.k).map(|i| state.legal_cop_targets(config, i)).collect());
        View {
            v: VIEW_VERSION,
            id: self.id.clone(),
            arena: self.arena.id.clone(),
            demo: self.arena.demo,
            admissibility: self.arena.admissibility(),
            phase: state.phase,
            version: self.version,
            k: config.k,
            round: state.round,
            max_rounds: config.max_rounds,
            robber_turns: state.robber_turns,
            robber_steps: state.robber_steps,
            cop_turns: state.cop_turns,
            robber_strategy: self.robber.name(),
            cops: state.cops.iter().map(|&c| self.agent(c)).collect(),
            robber: state.robber.map(|r| self.agent(r)),
            legal_moves,
            robber_annotation: self.robber.annotation(),
            trace_url: outcome.as_ref().map(|_| format!("/sessions/{}/trace", self.id)),
            outcome,
            digest: state.digest_hex(),
            created_ms: self.created_ms,
            updated_ms: self.updated_ms,
            layout: with_layout.then(|| self.arena.layout.clone()),
        }
    }

    pub fn trace(&self) -> TraceDocument<'_> {
        TraceDocument {
            header: self.game.header(),
            records: self.game.records(),
            summary: self.game.summary(self.robber.report(), None),
        }
    }

    /// Header, records and (when finished) summary, one JSON value per line.
    pub fn trace_jsonl(&self) -> Result<String> {
        let t = self.trace();
        let mut out = serde_json::to_string(t.header)?;
        out.push('\n');
        for r in t.records {
            out.push_str(&serde_json::to_string(r)?);
            out.push('\n');
        }
        if let Some(s) = &t.summary {
            out.push_str(&serde_json::to_string(s)?);
            out.push('\n');
        }
        Ok(out)
    }
}
