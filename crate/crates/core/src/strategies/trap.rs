use std::sync::Arc;

use super::oracle::{path_avoiding, ArenaOracle, Distances};
use crate::construction::Construction;
use crate::engine::{CopMove, CopStrategy, GameConfig, GameState, History};
use crate::error::{Error, Result};
use crate::evader::effective_cop;
use crate::graph::VertexId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stage {
    Setup,
    Close,
}

/// Four-cop capture script for the construction arena.
///
/// With the robber waiting at the center of `U`, two campers occupy units
/// `X1` (the destination of `U`'s first exit, sitting on the entry corner
/// from `U`) and `X2` (a neighbour of `U` two steps from `X1` around `U`).
/// Together their closed neighbourhoods cover every neighbour of `U`, so no
/// exit is certified safe. A third cop parks on an inbound spoke of `U` and
/// the chaser then closes in. The robber's only option is the path to `X1`,
/// where it is pinned between the camper and the chaser.
pub struct FourCopTrap {
    arena: Arc<Construction>,
    dist: Distances,
    stage: Stage,
    unit: Option<usize>,
    /// Routes for cops 1..=3, consumed front to back.
    routes: Vec<Vec<VertexId>>,
    targets: Vec<VertexId>,
}

impl FourCopTrap {
    pub fn new(oracle: Arc<ArenaOracle>) -> Self {
        FourCopTrap {
            arena: oracle.arena().clone(),
            dist: Distances::Arena(oracle),
            stage: Stage::Setup,
            unit: None,
            routes: Vec::new(),
            targets: Vec::new(),
        }
    }

    fn plan(&mut self, unit: usize, cops: &[VertexId]) -> Result<()> {
        let c = &self.arena;
        let u = &c.units[unit];
        let x1 = u.corner_peer[u.exits[0]];
        let x2 = c
            .unit_neighbors(unit)
            .filter(|&w| w != x1 && !c.units_adjacent(w, x1))
            .min()
            .ok_or_else(|| Error::Strategy("no second camping unit".into()))?;
        let entry_x1 = c.path_between(unit, x1).expect("exit path").entry;
        let center_x2 = c.center_of(x2);
        // an inbound spoke far from the first exit
        let far_entry = *u.entries.iter().max_by_key(|&&e| e.min(10 - e)).expect("entries");
        let parking = u.spokes[far_entry].last().copied().unwrap_or(u.corners[far_entry]);

        let mut blocked = vec![false; c.vertex_count()];
        let base = c.unit_base(unit);
        blocked[base..base + c.params.unit_size()].fill(true);
        let none = vec![false; c.vertex_count()];
        let route = |from: VertexId, to: VertexId, avoid: &[bool]| {
            path_avoiding(&c.graph, from, to, avoid).ok_or_else(|| Error::Strategy(format!("no route {from} -> {to}")))
        };
        self.targets = vec![parking, entry_x1, center_x2];
        self.routes = vec![
            route(cops[1], parking, &none)?,
            route(cops[2], entry_x1, &blocked)?,
            route(cops[3], center_x2, &blocked)?,
        ];
        for r in &mut self.routes {
            r.remove(0);
        }
        self.unit = Some(unit);
        Ok(())
    }
}

impl CopStrategy for FourCopTrap {
    fn name(&self) -> String {
        "four-cop-trap".into()
    }

    fn reset(&mut self, _seed: u64) {
        self.stage = Stage::Setup;
        self.unit = None;
        self.routes.clear();
    }

    fn place(&mut self, config: &GameConfig, _state: &GameState) -> Result<Vec<VertexId>> {
        if config.k != 4 {
            return Err(Error::Strategy("the trap script uses exactly 4 cops".into()));
        }
        Ok(vec![self.arena.center_of(0); 4])
    }

    fn step(&mut self, config: &GameConfig, state: &GameState, _h: &History) -> Result<CopMove> {
        let robber = state.robber.expect("placed");
        if self.unit.is_none() {
            let u = effective_cop(&self.arena, robber).unit;
            self.plan(u, &state.cops)?;
        }
        let g = &config.graph;
        let mut out = state.cops.clone();
        match self.stage {
            Stage::Setup => {
                for i in 0..3 {
                    if !self.routes[i].is_empty() {
                        out[i + 1] = self.routes[i].remove(0);
                    }
                }
                if self.routes.iter().all(Vec::is_empty) {
                    self.stage = Stage::Close;
                }
            }
            Stage::Close => {
                out[0] = self.dist.step_toward(g, state.cops[0], robber);
                // the parked cop joins once the robber has left the center
                let center = self.unit.map(|u| self.arena.center_of(u));
                if Some(robber) != center {
                    out[1] = self.dist.step_toward(g, state.cops[1], robber);
                }
            }
        }
        Ok(CopMove(out))
    }

    fn annotation(&self) -> Option<serde_json::Value> {
        Some(serde_json::json!({
            "stage": format!("{:?}", self.stage).to_lowercase(),
            "targets": self.targets,
        }))
    }
}
