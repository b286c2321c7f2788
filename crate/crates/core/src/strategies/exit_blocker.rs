use std::sync::Arc;

use super::oracle::{ArenaOracle, Distances};
use super::{place, seeded, Placement};
use crate::construction::Construction;
use crate::engine::{CopMove, CopStrategy, GameConfig, GameState, History};
use crate::error::{Error, Result};
use crate::evader::effective_cop;
use crate::graph::VertexId;

/// Cop 0 chases; cops 1 and 2 camp on the entry corners the robber would
/// reach through the two exits of its unit farthest from cop 0. Targets are
/// recomputed whenever the robber's effective unit changes. Further cops
/// chase as well.
pub struct ExitBlocker {
    arena: Arc<Construction>,
    oracle: Arc<ArenaOracle>,
    dist: Distances,
    placement: Placement,
    unit: Option<usize>,
    targets: Vec<VertexId>,
}

impl ExitBlocker {
    pub fn new(oracle: Arc<ArenaOracle>, placement: Placement) -> Self {
        ExitBlocker {
            arena: oracle.arena().clone(),
            dist: Distances::Arena(oracle.clone()),
            oracle,
            placement,
            unit: None,
            targets: Vec::new(),
        }
    }

    pub fn targets(&self) -> &[VertexId] {
        &self.targets
    }

    fn retarget(&mut self, unit: usize, chaser: VertexId) {
        let c = &self.arena;
        let u = &c.units[unit];
        let mut exits: Vec<(u32, usize)> = u
            .exits
            .iter()
            .map(|&e| (self.oracle.dist(chaser, u.corners[e]), e))
            .collect();
        // farthest first, lowest corner index on ties
        exits.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        self.targets = exits
            .iter()
            .take(2)
            .map(|&(_, e)| c.paths[u.corner_path[e]].entry)
            .collect();
        self.unit = Some(unit);
    }
}

impl CopStrategy for ExitBlocker {
    fn name(&self) -> String {
        "exit-blocker".into()
    }

    fn reset(&mut self, _seed: u64) {
        self.unit = None;
        self.targets.clear();
    }

    fn place(&mut self, config: &GameConfig, _state: &GameState) -> Result<Vec<VertexId>> {
        if config.k < 3 {
            return Err(Error::Strategy("exit blocker needs at least 3 cops".into()));
        }
        place(&self.placement, config, Some(&self.arena), &mut seeded(0, 6))
    }

    fn step(&mut self, config: &GameConfig, state: &GameState, _h: &History) -> Result<CopMove> {
        let robber = state.robber.expect("placed");
        let unit = effective_cop(&self.arena, robber).unit;
        if self.unit != Some(unit) {
            self.retarget(unit, state.cops[0]);
        }
        let g = &config.graph;
        let mut out = Vec::with_capacity(state.cops.len());
        for (i, &c) in state.cops.iter().enumerate() {
            let target = match i {
                1 | 2 => self.targets.get(i - 1).copied().unwrap_or(robber),
                _ => robber,
            };
            out.push(self.dist.step_toward(g, c, target));
        }
        Ok(CopMove(out))
    }

    fn annotation(&self) -> Option<serde_json::Value> {
        Some(serde_json::json!({ "unit": self.unit, "targets": self.targets }))
    }
}
