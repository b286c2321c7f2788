use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::embedding::RotationSystem;
use crate::engine::{CopMove, CopStrategy, GameConfig, GameState, History};
use crate::error::{Error, Result};
use crate::graph::{Digraph, VertexId};
use crate::separator::separate_region;

/// Budget constant `K` in `ceil(K·sqrt(n))`.
pub const DEFAULT_SWEEP_CONSTANT: f64 = 16.0;

/// One separator level of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: usize,
    /// `|G_i|`, the robber's region when the level started.
    pub region: usize,
    /// Cops sent to static posts at this level.
    pub spent: usize,
    /// Every remaining region vertex was occupied.
    pub base_case: bool,
    pub started_round: u64,
    pub completed_round: Option<u64>,
    /// Size of the side kept for the next level.
    pub next_region: Option<usize>,
    /// No arc joins the next region to the rest except at occupied vertices.
    pub sealed: Option<bool>,
}

impl LevelRecord {
    pub fn spend_ratio(&self) -> f64 {
        self.spent as f64 / (self.region as f64).sqrt()
    }

    pub fn shrink(&self) -> Option<f64> {
        self.next_region.map(|m| m as f64 / self.region as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCertificate {
    pub n: usize,
    pub constant: f64,
    pub budget: usize,
    pub total_spent: usize,
    pub levels: Vec<LevelRecord>,
}

impl SweepCertificate {
    /// Largest `spent / sqrt(|G_i|)` over levels.
    pub fn max_spend_ratio(&self) -> f64 {
        self.levels.iter().map(LevelRecord::spend_ratio).fold(0.0, f64::max)
    }

    /// Largest `|G_{i+1}| / |G_i|` over separator levels.
    pub fn max_shrink(&self) -> f64 {
        self.levels
            .iter()
            .filter(|l| !l.base_case)
            .filter_map(LevelRecord::shrink)
            .fold(0.0, f64::max)
    }

    pub fn all_sealed(&self) -> bool {
        self.levels.iter().all(|l| l.sealed != Some(false))
    }
}

struct Level {
    /// 1 for side A, 2 for side B, indexed by vertex; empty in the base case.
    side: Vec<u8>,
    a: Vec<u32>,
    b: Vec<u32>,
}

/// Separator sweep: all cops start on one vertex; each level occupies a
/// separator of the robber's region with free cops, which then never move,
/// and the region shrinks to the side holding the robber.
pub struct SeparatorSweep {
    graph: Arc<Digraph>,
    rot: Arc<RotationSystem>,
    constant: f64,
    start: VertexId,
    /// BFS tree from `start`.
    parent: Vec<u32>,
    budget: usize,
    free: Vec<usize>,
    occupied: Vec<bool>,
    region: Vec<u32>,
    moving: Vec<(usize, Vec<VertexId>, usize)>,
    level: Option<Level>,
    records: Vec<LevelRecord>,
    total_spent: usize,
}

impl SeparatorSweep {
    pub fn new(graph: Arc<Digraph>, rot: Arc<RotationSystem>, constant: f64) -> Result<Self> {
        rot.check_against(&graph)?;
        if graph.vertex_count() == 0 {
            return Err(Error::InvalidConfig("empty graph".into()));
        }
        let n = graph.vertex_count();
        let start = VertexId(0);
        let mut parent = vec![u32::MAX; n];
        parent[0] = 0;
        let mut q = VecDeque::from([0u32]);
        while let Some(x) = q.pop_front() {
            for &y in graph.out_raw(x as usize) {
                if parent[y as usize] == u32::MAX {
                    parent[y as usize] = x;
                    q.push_back(y);
                }
            }
        }
        if parent.contains(&u32::MAX) {
            return Err(Error::InvalidConfig("graph is not strongly connected".into()));
        }
        let mut s = SeparatorSweep {
            graph,
            rot,
            constant,
            start,
            parent,
            budget: 0,
            free: Vec::new(),
            occupied: Vec::new(),
            region: Vec::new(),
            moving: Vec::new(),
            level: None,
            records: Vec::new(),
            total_spent: 0,
        };
        s.budget = s.budget_for_graph();
        s.clear();
        Ok(s)
    }

    /// `ceil(K·sqrt(n))`.
    pub fn budget_for(n: usize, constant: f64) -> usize {
        (constant * (n as f64).sqrt()).ceil() as usize
    }

    fn budget_for_graph(&self) -> usize {
        Self::budget_for(self.graph.vertex_count(), self.constant)
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn certificate(&self) -> SweepCertificate {
        SweepCertificate {
            n: self.graph.vertex_count(),
            constant: self.constant,
            budget: self.budget,
            total_spent: self.total_spent,
            levels: self.records.clone(),
        }
    }

    fn clear(&mut self) {
        let n = self.graph.vertex_count();
        self.free = (0..self.budget).rev().collect();
        self.occupied = vec![false; n];
        self.region = (0..n as u32).collect();
        self.moving.clear();
        self.level = None;
        self.records.clear();
        self.total_spent = 0;
    }

    fn path_from_start(&self, target: u32) -> Vec<VertexId> {
        let mut path = vec![VertexId(target)];
        let mut x = target;
        while x != self.start.0 {
            x = self.parent[x as usize];
            path.push(VertexId(x));
        }
        path.reverse();
        path
    }

    fn start_level(&mut self, round: u64) -> Result<()> {
        // occupying everything costs no more than a separator once |R| <= 16
        let r = self.region.len();
        let base_case = r <= self.free.len() && r as f64 <= 4.0 * (r as f64).sqrt();
        let (targets, level) = if base_case {
            (
                self.region.clone(),
                Level {
                    side: Vec::new(),
                    a: Vec::new(),
                    b: Vec::new(),
                },
            )
        } else {
            let region: Vec<VertexId> = self.region.iter().map(|&v| VertexId(v)).collect();
            let sep = separate_region(&self.rot, &region)?;
            let mut side = vec![0u8; self.graph.vertex_count()];
            for &v in &sep.a {
                side[v as usize] = 1;
            }
            for &v in &sep.b {
                side[v as usize] = 2;
            }
            (
                sep.c,
                Level {
                    side,
                    a: sep.a,
                    b: sep.b,
                },
            )
        };
        if targets.len() > self.free.len() {
            return Err(Error::CopBudgetExhausted {
                needed: targets.len(),
                available: self.free.len(),
            });
        }
        let mut paths: Vec<Vec<VertexId>> = targets.iter().map(|&t| self.path_from_start(t)).collect();
        // farthest targets go to the lowest free cop indices
        paths.sort_by_key(|p| std::cmp::Reverse(p.len()));
        for p in paths {
            let cop = self.free.pop().expect("checked above");
            self.moving.push((cop, p, 0));
        }
        self.total_spent += targets.len();
        self.records.push(LevelRecord {
            level: self.records.len(),
            region: self.region.len(),
            spent: targets.len(),
            base_case,
            started_round: round,
            completed_round: None,
            next_region: None,
            sealed: None,
        });
        self.level = Some(level);
        Ok(())
    }

    /// Shrinks the region to the side holding the robber.
    fn finish_level(&mut self, robber: VertexId) {
        let level = self.level.take().expect("level in progress");
        let record = self.records.last_mut().expect("level recorded");
        if level.side.is_empty() {
            self.region.clear();
            record.next_region = Some(0);
            record.sealed = Some(true);
            return;
        }
        let (keep, tag) = match level.side[robber.idx()] {
            1 => (level.a, 1),
            2 => (level.b, 2),
            _ => (Vec::new(), 0),
        };
        let g = &self.graph;
        let sealed = keep.iter().all(|&v| {
            g.out_raw(v as usize)
                .iter()
                .chain(g.in_raw(v as usize))
                .all(|&w| level.side[w as usize] == tag || self.occupied[w as usize])
        });
        record.next_region = Some(keep.len());
        record.sealed = Some(sealed);
        self.region = keep;
    }
}

impl CopStrategy for SeparatorSweep {
    fn name(&self) -> String {
        "separator-sweep".into()
    }

    fn reset(&mut self, _seed: u64) {
        self.clear();
    }

    fn place(&mut self, config: &GameConfig, _state: &GameState) -> Result<Vec<VertexId>> {
        if config.graph.vertex_count() != self.graph.vertex_count() {
            return Err(Error::InvalidConfig("sweep built for a different graph".into()));
        }
        if config.k < self.budget {
            return Err(Error::CopBudgetExhausted {
                needed: self.budget,
                available: config.k,
            });
        }
        self.clear();
        Ok(vec![self.start; config.k])
    }

    fn step(&mut self, _config: &GameConfig, state: &GameState, _h: &History) -> Result<CopMove> {
        let robber = state.robber.expect("placed");
        let mut out = state.cops.clone();
        // levels that need no travel complete at once
        while self.moving.is_empty() {
            if self.level.is_some() {
                if let Some(r) = self.records.last_mut() {
                    r.completed_round.get_or_insert(state.round);
                }
                self.finish_level(robber);
            }
            if self.region.binary_search(&robber.0).is_err() {
                return Ok(CopMove(out));
            }
            self.start_level(state.round)?;
            let mut arrived = Vec::new();
            for (i, (cop, path, _)) in self.moving.iter().enumerate() {
                if path.len() == 1 {
                    self.occupied[path[0].idx()] = true;
                    out[*cop] = path[0];
                    arrived.push(i);
                }
            }
            for i in arrived.into_iter().rev() {
                self.moving.swap_remove(i);
            }
        }
        for (cop, path, at) in &mut self.moving {
            *at += 1;
            out[*cop] = path[*at];
            if *at + 1 == path.len() {
                self.occupied[path[*at].idx()] = true;
            }
        }
        self.moving.retain(|(_, path, at)| at + 1 < path.len());
        if self.moving.is_empty() {
            if let Some(r) = self.records.last_mut() {
                r.completed_round = Some(state.round);
            }
        }
        Ok(CopMove(out))
    }

    fn annotation(&self) -> Option<serde_json::Value> {
        Some(serde_json::json!({
            "level": self.records.len().saturating_sub(1),
            "region": self.region.len(),
            "moving": self.moving.len(),
            "spent": self.total_spent,
        }))
    }

    fn report(&self) -> Option<serde_json::Value> {
        serde_json::to_value(self.certificate()).ok()
    }
}
