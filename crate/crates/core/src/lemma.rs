//! Exhaustive checks of the unit-level escape claims on one unit of a
//! construction, played on the unit alone with cops confined to it.
//!
//! The two claims:
//! * from the center, against `c` cops off the inbound spokes, any set of
//!   more than `c` exits has a member the robber reaches within `S` moves;
//! * from any perimeter vertex, against one cop next to the center on an
//!   outbound spoke, the robber reaches the center within `1 + C + S` moves.
//!
//! Both are settled by depth-bounded minimax with memoization. For the first
//! claim every route to an exit within `S` moves is a straight outbound spoke
//! and the robber commits on its first move, before any cop acts, so a set
//! of exits is reachable iff one of its members is reachable on its own, and
//! a single exit is blocked iff one cop blocks it alone. The check therefore
//! tabulates single-cop games and combines them, and replays a sample of
//! multi-cop placements through the full search as a cross-check.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{Construction, CORNERS, EXITS};
use crate::error::{Error, Result};
use crate::evader::{corner_local, spoke_local, UnitTables};

/// Bounded reachability game on one unit. The robber moves first.
pub struct LocalGame<'a> {
    tables: &'a UnitTables,
    goal: Vec<bool>,
    goal_dist: Vec<u32>,
    memo: HashMap<(u16, Vec<u16>, u8), Option<u8>>,
}

impl<'a> LocalGame<'a> {
    pub fn new(tables: &'a UnitTables, goals: &[usize]) -> Self {
        let mut goal = vec![false; tables.size];
        for &g in goals {
            goal[g] = true;
        }
        let goal_dist = (0..tables.size)
            .map(|x| goals.iter().map(|&g| tables.dist(x, g)).min().unwrap_or(u32::MAX))
            .collect();
        LocalGame {
            tables,
            goal,
            goal_dist,
            memo: HashMap::new(),
        }
    }

    /// Fewest robber moves that force reaching a goal uncaptured within
    /// `horizon` moves, or `None` if the cops can prevent it.
    pub fn value(&mut self, robber: usize, cops: &[usize], horizon: u32) -> Option<u32> {
        if cops.contains(&robber) {
            return None;
        }
        let mut key: Vec<u16> = cops.iter().map(|&c| c as u16).collect();
        key.sort_unstable();
        self.solve(robber as u16, key, horizon.min(u8::MAX as u32) as u8)
            .map(u32::from)
    }

    fn solve(&mut self, r: u16, cops: Vec<u16>, left: u8) -> Option<u8> {
        if let Some(&v) = self.memo.get(&(r, cops.clone(), left)) {
            return v;
        }
        let t = self.tables;
        let mut best: Option<u8> = None;
        let moves = std::iter::once(r).chain(t.out_local(r as usize).iter().copied());
        for r2 in moves {
            if cops.contains(&r2) {
                continue;
            }
            if self.goal[r2 as usize] {
                best = Some(1);
                break;
            }
            if left <= 1 || self.goal_dist[r2 as usize] > left as u32 - 1 {
                continue;
            }
            if best.is_some_and(|b| b <= 2) {
                continue;
            }
            // every cop reply must still lose
            let choices: Vec<Vec<u16>> = cops
                .iter()
                .map(|&c| {
                    std::iter::once(c)
                        .chain(t.out_local(c as usize).iter().copied())
                        .collect()
                })
                .collect();
            let mut worst = Some(0u8);
            let mut idx = vec![0usize; cops.len()];
            'replies: loop {
                let mut next: Vec<u16> = idx.iter().zip(&choices).map(|(&i, ch)| ch[i]).collect();
                let sub = if next.contains(&r2) {
                    None
                } else {
                    next.sort_unstable();
                    self.solve(r2, next, left - 1)
                };
                match sub {
                    None => {
                        worst = None;
                        break 'replies;
                    }
                    Some(v) => worst = worst.map(|w| w.max(v)),
                }
                let mut i = idx.len();
                loop {
                    if i == 0 {
                        break 'replies;
                    }
                    i -= 1;
                    idx[i] += 1;
                    if idx[i] < choices[i].len() {
                        break;
                    }
                    idx[i] = 0;
                }
            }
            if let Some(w) = worst {
                let cand = w + 1;
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            }
        }
        self.memo.insert((r, cops, left), best);
        best
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscapeCounterexample {
    /// Local vertex ids of the cops.
    pub cops: Vec<usize>,
    /// Exit corner indices of the target set.
    pub exits: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterEscapeReport {
    pub c: usize,
    pub horizon: u32,
    /// Cop positions allowed by the hypothesis.
    pub positions: usize,
    pub placements: u64,
    pub cases: u64,
    pub successes: u64,
    pub max_moves: u32,
    pub cross_checked: u64,
    pub cross_check_mismatches: u64,
    pub counterexamples: Vec<EscapeCounterexample>,
}

impl CenterEscapeReport {
    pub fn passed(&self) -> bool {
        self.cases > 0 && self.successes == self.cases && self.cross_check_mismatches == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReturnCounterexample {
    pub robber: usize,
    pub cop: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReturnReport {
    pub horizon: u32,
    pub perimeter: usize,
    pub cases: u64,
    pub successes: u64,
    pub max_moves: u32,
    pub counterexamples: Vec<ReturnCounterexample>,
}

impl ReturnReport {
    pub fn passed(&self) -> bool {
        self.cases > 0 && self.successes == self.cases
    }
}

const MAX_COUNTEREXAMPLES: usize = 32;

fn inbound_interior(c: &Construction, t: &UnitTables) -> Vec<bool> {
    let s = c.params.spoke;
    let mut mask = vec![false; t.size];
    for corner in 0..CORNERS {
        if t.exit_corners.contains(&corner) {
            continue;
        }
        for p in 1..s {
            mask[spoke_local(s, corner, p)] = true;
        }
    }
    mask
}

fn multisets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in from..items.len() {
            cur.push(items[i]);
            go(items, k, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&i| m & (1 << i) != 0).collect())
        .collect()
}

/// Exit claim for `c` cops. `cross_check` multi-cop placements (evenly
/// spaced) are also replayed through the full search.
pub fn verify_center_escape(
    arena: &Construction,
    tables: &UnitTables,
    c: usize,
    horizon: u32,
    cross_check: usize,
) -> Result<CenterEscapeReport> {
    if c == 0 || c >= EXITS {
        return Err(Error::Horizon(format!("cop count {c} leaves no exit set of size c+1")));
    }
    let need = arena.params.spoke;
    if horizon < need {
        return Err(Error::Horizon(format!(
            "horizon {horizon} is below the spoke length {need}"
        )));
    }
    let inbound = inbound_interior(arena, tables);
    let positions: Vec<usize> = (1..tables.size).filter(|&x| !inbound[x]).collect();
    let exits: Vec<usize> = tables.exit_corners.iter().map(|&k| corner_local(k)).collect();

    // value[x][e]: robber moves to exit e against a lone cop at x
    let single: Vec<[Option<u32>; EXITS]> = positions
        .par_iter()
        .map(|&x| {
            let mut row = [None; EXITS];
            for (e, &goal) in exits.iter().enumerate() {
                row[e] = LocalGame::new(tables, &[goal]).value(0, &[x], horizon);
            }
            row
        })
        .collect();
    let mut free_alone = vec![[None; EXITS]; tables.size];
    for (i, &x) in positions.iter().enumerate() {
        free_alone[x] = single[i];
    }

    let placements = multisets(&positions, c);
    let sets = subsets(EXITS, c + 1);
    let mut report = CenterEscapeReport {
        c,
        horizon,
        positions: positions.len(),
        placements: placements.len() as u64,
        cases: 0,
        successes: 0,
        max_moves: 0,
        cross_checked: 0,
        cross_check_mismatches: 0,
        counterexamples: Vec::new(),
    };
    let combined = |cops: &[usize], set: &[usize]| -> Option<u32> {
        set.iter()
            .filter_map(|&e| {
                cops.iter()
                    .map(|&x| free_alone[x][e])
                    .try_fold(0, |acc, v| v.map(|v| acc.max(v)))
            })
            .min()
    };
    for cops in &placements {
        for set in &sets {
            report.cases += 1;
            match combined(cops, set) {
                Some(m) => {
                    report.successes += 1;
                    report.max_moves = report.max_moves.max(m);
                }
                None if report.counterexamples.len() < MAX_COUNTEREXAMPLES => {
                    report.counterexamples.push(EscapeCounterexample {
                        cops: cops.clone(),
                        exits: set.iter().map(|&e| tables.exit_corners[e]).collect(),
                    });
                }
                None => {}
            }
        }
    }

    let stride = (placements.len() / cross_check.max(1)).max(1);
    let sample: Vec<&Vec<usize>> = placements.iter().step_by(stride).take(cross_check).collect();
    let mismatches: u64 = sample
        .par_iter()
        .map(|cops| {
            sets.iter()
                .filter(|set| {
                    let goals: Vec<usize> = set.iter().map(|&e| exits[e]).collect();
                    let full = LocalGame::new(tables, &goals).value(0, cops, horizon);
                    full != combined(cops, set)
                })
                .count() as u64
        })
        .sum();
    report.cross_checked = sample.len() as u64;
    report.cross_check_mismatches = mismatches;
    Ok(report)
}

/// Return claim: every perimeter vertex against one cop on node 1 of each
/// outbound spoke, robber to move.
pub fn verify_return(arena: &Construction, tables: &UnitTables, horizon: u32) -> Result<ReturnReport> {
    let s = arena.params.spoke;
    if s < 2 {
        return Err(Error::Horizon("spokes have no interior".into()));
    }
    let perimeter: Vec<usize> = (0..tables.size)
        .filter(|&x| {
            let v = arena.unit_base(0) + x;
            arena.is_perimeter(crate::graph::VertexId::from(v))
        })
        .collect();
    let need = perimeter.iter().map(|&x| tables.dist(x, 0)).max().unwrap_or(0);
    if horizon < need {
        return Err(Error::Horizon(format!(
            "horizon {horizon} is below the longest return {need}"
        )));
    }
    let cops: Vec<usize> = tables.exit_corners.iter().map(|&k| spoke_local(s, k, 1)).collect();
    let results: Vec<(usize, usize, Option<u32>)> = cops
        .par_iter()
        .flat_map_iter(|&cop| {
            let mut game = LocalGame::new(tables, &[0]);
            perimeter
                .iter()
                .map(|&r| (r, cop, game.value(r, &[cop], horizon)))
                .collect::<Vec<_>>()
        })
        .collect();
    let mut report = ReturnReport {
        horizon,
        perimeter: perimeter.len(),
        cases: 0,
        successes: 0,
        max_moves: 0,
        counterexamples: Vec::new(),
    };
    for (robber, cop, v) in results {
        report.cases += 1;
        match v {
            Some(m) => {
                report.successes += 1;
                report.max_moves = report.max_moves.max(m);
            }
            None if report.counterexamples.len() < MAX_COUNTEREXAMPLES => {
                report.counterexamples.push(ReturnCounterexample { robber, cop });
            }
            None => {}
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::ConstructionParams;

    fn small() -> (Construction, UnitTables) {
        let c = Construction::assemble(ConstructionParams::new(30, 4, 5)).unwrap();
        let t = UnitTables::new(&c).unwrap();
        (c, t)
    }

    #[test]
    fn straight_dash_without_cops() {
        let (c, t) = small();
        let exit = corner_local(t.exit_corners[0]);
        let mut g = LocalGame::new(&t, &[exit]);
        assert_eq!(g.value(0, &[], 10), Some(c.params.spoke));
        assert_eq!(g.value(0, &[], c.params.spoke - 1), None);
    }

    #[test]
    fn cop_on_the_spoke_blocks_its_exit() {
        let (c, t) = small();
        let k = t.exit_corners[0];
        let exit = corner_local(k);
        let cop = spoke_local(c.params.spoke, k, 2);
        assert_eq!(LocalGame::new(&t, &[exit]).value(0, &[cop], 10), None);
    }

    #[test]
    fn small_unit_claims() {
        let (c, t) = small();
        let r = verify_center_escape(&c, &t, 1, c.params.spoke, 50).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.max_moves, c.params.spoke);
        let r = verify_return(&c, &t, c.params.return_budget() as u32).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.perimeter, 10 + 20 * (c.params.chain as usize - 1));
        assert!(verify_return(&c, &t, 3).is_err());
    }
}
