//! Exact k-cop game solver by retrograde attractor computation.
//!
//! States are `(sorted cop tuple, robber, mover)`. Cop tuples are multisets
//! ranked by the combinatorial number system, so permuted cop vectors share
//! one entry. Distances count plies until capture; robber-win states hold
//! [`ROBBER_WIN`].
//!
//! Strategy table layout (little endian):
//!
//! ```text
//! magic  b"CRST"
//! u32    version (1)
//! u32    n
//! u32    k
//! u64    tuple count M
//! [u8;32] sha256 of the graph document
//! for mover in [cops, robber]:
//!     u16 × (M·n)   distance, index = tuple_rank·n + robber
//!     u32 × (M·n)   optimal move index (u32::MAX when none)
//! ```
//!
//! A cop move index is mixed radix over the sorted cops, digit `i` choosing
//! entry `j` of `[stay, out-neighbours...]` of cop `i`. A robber move index
//! chooses from `[stay, out-neighbours...]` of the robber.

use std::collections::VecDeque;
use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::{CopMove, CopStrategy, GameConfig, GameState, History, RobberMove, RobberStrategy};
use crate::error::{Error, Result};
use crate::graph::{Digraph, VertexId};
use crate::io::GraphDocument;

pub const ROBBER_WIN: u16 = u16::MAX;
const NO_MOVE: u32 = u32::MAX;
const MAGIC: &[u8; 4] = b"CRST";
const TABLE_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mover {
    Cops,
    Robber,
}

impl Mover {
    fn index(self) -> usize {
        match self {
            Mover::Cops => 0,
            Mover::Robber => 1,
        }
    }
}

/// A game position in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SolveState {
    pub cops: Vec<VertexId>,
    pub robber: VertexId,
    pub mover: Mover,
}

impl SolveState {
    pub fn new(mut cops: Vec<VertexId>, robber: VertexId, mover: Mover) -> Self {
        cops.sort_unstable();
        SolveState { cops, robber, mover }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    CopWin { distance: u16 },
    RobberWin,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Limit on `2·M·n` states plus cop predecessor entries.
    pub max_states: u128,
}

impl Default for SolveOptions {
    fn default() -> Self {
        // n = 60 with three cops fits comfortably
        SolveOptions { max_states: 40_000_000 }
    }
}

fn binomials(top: usize, k: usize) -> Vec<Vec<u64>> {
    let mut b = vec![vec![0u64; k + 2]; top + 1];
    for a in 0..=top {
        b[a][0] = 1;
        for j in 1..=(k + 1).min(a) {
            b[a][j] = b[a - 1][j - 1] + if j < a { b[a - 1][j] } else { 0 };
        }
    }
    b
}

/// Number of size-`k` multisets over `n` vertices.
pub fn tuple_count(n: usize, k: usize) -> u128 {
    let mut r: u128 = 1;
    for i in 0..k as u128 {
        r = r * (n as u128 + i) / (i + 1);
    }
    r
}

/// Full classification of the k-cop game on one graph.
#[derive(Clone, Debug)]
pub struct SolveResult {
    n: usize,
    k: usize,
    binom: Vec<Vec<u64>>,
    tuples: Vec<u32>,
    dist: [Vec<u16>; 2],
    moves: Option<[Vec<u32>; 2]>,
    graph_digest: [u8; 32],
}

fn graph_digest(g: &Digraph) -> [u8; 32] {
    let doc = GraphDocument::from_graph(g, None, None);
    let json = doc.to_json().expect("graph serializes");
    Sha256::digest(json.as_bytes()).into()
}

/// Classifies every state of the k-cop game on `g`.
pub fn solve(g: &Digraph, k: usize, options: &SolveOptions) -> Result<SolveResult> {
    let n = g.vertex_count();
    if k == 0 || n == 0 {
        return Err(Error::InvalidConfig("need at least one cop and one vertex".into()));
    }
    let m = tuple_count(n, k);
    let states = 2 * m * n as u128;
    if states > options.max_states {
        return Err(Error::BudgetExceeded {
            states,
            budget: options.max_states,
        });
    }
    let m = m as usize;
    let binom = binomials(n + k, k);
    let mut res = SolveResult {
        n,
        k,
        binom,
        tuples: vec![0; m * k],
        dist: [Vec::new(), Vec::new()],
        moves: None,
        graph_digest: graph_digest(g),
    };
    res.fill_tuples();

    // predecessor tuples through in-neighbours, deduplicated
    let mut pred_off = vec![0u32; m + 1];
    let mut pred = Vec::new();
    let mut budget_used = states;
    let mut scratch = Vec::new();
    let mut sorted = vec![0u32; k];
    for t in 0..m {
        let tuple: Vec<u32> = res.tuple_raw(t).to_vec();
        let choices: Vec<Vec<u32>> = tuple
            .iter()
            .map(|&c| std::iter::once(c).chain(g.in_raw(c as usize).iter().copied()).collect())
            .collect();
        scratch.clear();
        for_each_product(&choices, |pick| {
            sorted.copy_from_slice(pick);
            sorted.sort_unstable();
            scratch.push(res.rank_sorted(&sorted) as u32);
        });
        scratch.sort_unstable();
        scratch.dedup();
        budget_used += scratch.len() as u128;
        if budget_used > options.max_states {
            return Err(Error::BudgetExceeded {
                states: budget_used,
                budget: options.max_states,
            });
        }
        pred.extend_from_slice(&scratch);
        pred_off[t + 1] = pred.len() as u32;
    }

    let total = m * n;
    let mut dc = vec![ROBBER_WIN; total];
    let mut dr = vec![ROBBER_WIN; total];
    let mut counter: Vec<u32> = (0..total).map(|s| 1 + g.out_raw(s % n).len() as u32).collect();
    let mut queue: VecDeque<(u32, Mover)> = VecDeque::new();
    for t in 0..m {
        for &c in res.tuple_raw(t) {
            let s = t * n + c as usize;
            if dc[s] == ROBBER_WIN {
                dc[s] = 0;
                dr[s] = 0;
                queue.push_back((s as u32, Mover::Cops));
                queue.push_back((s as u32, Mover::Robber));
            }
        }
    }
    while let Some((s, mover)) = queue.pop_front() {
        let s = s as usize;
        let (t, r) = (s / n, s % n);
        match mover {
            Mover::Robber => {
                let d = dr[s];
                for &tp in &pred[pred_off[t] as usize..pred_off[t + 1] as usize] {
                    let p = tp as usize * n + r;
                    if dc[p] == ROBBER_WIN {
                        dc[p] = d + 1;
                        queue.push_back((p as u32, Mover::Cops));
                    }
                }
            }
            Mover::Cops => {
                let d = dc[s];
                for rp in std::iter::once(r as u32).chain(g.in_raw(r).iter().copied()) {
                    let p = t * n + rp as usize;
                    if dr[p] == ROBBER_WIN {
                        counter[p] -= 1;
                        if counter[p] == 0 {
                            dr[p] = d + 1;
                            queue.push_back((p as u32, Mover::Robber));
                        }
                    }
                }
            }
        }
    }
    res.dist = [dc, dr];
    Ok(res)
}

/// Calls `f` on every element of the cartesian product of `choices`.
fn for_each_product(choices: &[Vec<u32>], mut f: impl FnMut(&[u32])) {
    let k = choices.len();
    if choices.iter().any(Vec::is_empty) {
        return;
    }
    let mut idx = vec![0usize; k];
    let mut pick: Vec<u32> = choices.iter().map(|c| c[0]).collect();
    loop {
        f(&pick);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                pick[i] = choices[i][idx[i]];
                break;
            }
            idx[i] = 0;
            pick[i] = choices[i][0];
        }
    }
}

fn stay_or_out(g: &Digraph, v: u32) -> Vec<u32> {
    std::iter::once(v)
        .chain(g.out_raw(v as usize).iter().copied())
        .collect()
}

impl SolveResult {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tuple_count(&self) -> usize {
        self.tuples.len() / self.k
    }

    /// States per mover.
    pub fn state_count(&self) -> usize {
        self.tuple_count() * self.n
    }

    fn rank_sorted(&self, sorted: &[u32]) -> usize {
        sorted
            .iter()
            .enumerate()
            .map(|(i, &c)| self.binom[c as usize + i][i + 1] as usize)
            .sum()
    }

    fn fill_tuples(&mut self) {
        let (n, k) = (self.n, self.k);
        let mut tuples = std::mem::take(&mut self.tuples);
        enumerate_sorted(n, k, &mut vec![0; k], 0, 0, &mut |t| {
            let r = self.rank_sorted(t);
            tuples[r * k..(r + 1) * k].copy_from_slice(t);
        });
        self.tuples = tuples;
    }

    fn tuple_raw(&self, t: usize) -> &[u32] {
        &self.tuples[t * self.k..(t + 1) * self.k]
    }

    pub fn tuple(&self, rank: usize) -> Vec<VertexId> {
        self.tuple_raw(rank).iter().map(|&c| VertexId(c)).collect()
    }

    fn index(&self, cops: &[VertexId], robber: VertexId) -> Result<usize> {
        if cops.len() != self.k {
            return Err(Error::WrongCopCount {
                expected: self.k,
                got: cops.len(),
            });
        }
        let mut sorted: Vec<u32> = cops.iter().map(|c| c.0).collect();
        if sorted.iter().chain([&robber.0]).any(|&v| v as usize >= self.n) {
            return Err(Error::InvalidVertex(
                sorted.iter().chain([&robber.0]).copied().max().unwrap_or(0) as usize,
            ));
        }
        sorted.sort_unstable();
        Ok(self.rank_sorted(&sorted) * self.n + robber.idx())
    }

    pub fn distance(&self, cops: &[VertexId], robber: VertexId, mover: Mover) -> Result<Option<u16>> {
        let d = self.dist[mover.index()][self.index(cops, robber)?];
        Ok((d != ROBBER_WIN).then_some(d))
    }

    pub fn verdict(&self, state: &SolveState) -> Result<Verdict> {
        Ok(match self.distance(&state.cops, state.robber, state.mover)? {
            Some(distance) => Verdict::CopWin { distance },
            None => Verdict::RobberWin,
        })
    }

    /// Worst capture distance of a placement over all robber placements,
    /// cops to move, or `None` when some robber placement escapes.
    pub fn placement_value(&self, rank: usize) -> Option<u16> {
        let row = &self.dist[0][rank * self.n..(rank + 1) * self.n];
        row.iter()
            .try_fold(0u16, |acc, &d| (d != ROBBER_WIN).then_some(acc.max(d)))
    }

    /// Cop placement that wins against every robber placement, fastest first.
    pub fn winning_placement(&self) -> Option<(Vec<VertexId>, u16)> {
        (0..self.tuple_count())
            .filter_map(|t| self.placement_value(t).map(|d| (d, t)))
            .min()
            .map(|(d, t)| (self.tuple(t), d))
    }

    pub fn is_cop_win(&self) -> bool {
        self.winning_placement().is_some()
    }

    /// Robber placement against `cops`: an escaping vertex if any, else the
    /// slowest capture.
    pub fn robber_placement(&self, cops: &[VertexId]) -> Result<VertexId> {
        let base = self.index(cops, VertexId(0))?;
        let row = &self.dist[0][base..base + self.n];
        let best = (0..self.n)
            .max_by_key(|&r| (row[r], std::cmp::Reverse(r)))
            .expect("n > 0");
        Ok(VertexId(best as u32))
    }

    /// Optimal cop move for arbitrary (unsorted) cop positions, cops to move.
    pub fn cop_move(&self, g: &Digraph, cops: &[VertexId], robber: VertexId) -> Result<Vec<VertexId>> {
        let s = self.index(cops, robber)?;
        let here = self.dist[0][s];
        let choices: Vec<Vec<u32>> = cops.iter().map(|c| stay_or_out(g, c.0)).collect();
        let mut best: Option<(u16, Vec<u32>)> = None;
        let mut sorted = vec![0u32; self.k];
        for_each_product(&choices, |pick| {
            sorted.copy_from_slice(pick);
            sorted.sort_unstable();
            let d = self.dist[1][self.rank_sorted(&sorted) * self.n + robber.idx()];
            if best.as_ref().is_none_or(|(b, _)| d < *b) {
                best = Some((d, pick.to_vec()));
            }
        });
        let (d, pick) = best.expect("staying is always possible");
        debug_assert!(here == ROBBER_WIN || d + 1 == here);
        Ok(pick.into_iter().map(VertexId).collect())
    }

    /// Optimal robber move, robber to move: stay in the robber-win region,
    /// else delay capture as long as possible.
    pub fn robber_move(&self, g: &Digraph, cops: &[VertexId], robber: VertexId) -> Result<VertexId> {
        let base = self.index(cops, VertexId(0))?;
        let row = &self.dist[0][base..base + self.n];
        let choices = stay_or_out(g, robber.0);
        let best = choices
            .iter()
            .copied()
            .max_by_key(|&r| (row[r as usize], std::cmp::Reverse(r)))
            .expect("stay");
        Ok(VertexId(best))
    }

    fn compute_moves(&mut self, g: &Digraph) {
        if self.moves.is_some() {
            return;
        }
        let n = self.n;
        let total = self.state_count();
        let mut mc = vec![NO_MOVE; total];
        let mut mr = vec![NO_MOVE; total];
        for t in 0..self.tuple_count() {
            let tuple = self.tuple_raw(t).to_vec();
            let choices: Vec<Vec<u32>> = tuple.iter().map(|&c| stay_or_out(g, c)).collect();
            for r in 0..n {
                let s = t * n + r;
                if tuple.contains(&(r as u32)) {
                    continue;
                }
                if self.dist[0][s] != ROBBER_WIN {
                    let target = self.dist[0][s] - 1;
                    let mut index = 0u32;
                    let mut found = NO_MOVE;
                    let mut sorted = vec![0u32; self.k];
                    for_each_product(&choices, |pick| {
                        if found == NO_MOVE {
                            sorted.copy_from_slice(pick);
                            sorted.sort_unstable();
                            if self.dist[1][self.rank_sorted(&sorted) * n + r] == target {
                                found = index;
                            }
                        }
                        index += 1;
                    });
                    mc[s] = found;
                }
                let options = stay_or_out(g, r as u32);
                let row = &self.dist[0][t * n..(t + 1) * n];
                let want = if self.dist[1][s] == ROBBER_WIN {
                    ROBBER_WIN
                } else {
                    self.dist[1][s] - 1
                };
                mr[s] = options
                    .iter()
                    .position(|&x| row[x as usize] == want)
                    .map_or(NO_MOVE, |i| i as u32);
            }
        }
        self.moves = Some([mc, mr]);
    }

    /// Stored optimal move index (see the module docs for the encoding).
    pub fn move_index(&self, cops: &[VertexId], robber: VertexId, mover: Mover) -> Result<Option<u32>> {
        let s = self.index(cops, robber)?;
        Ok(self
            .moves
            .as_ref()
            .map(|m| m[mover.index()][s])
            .filter(|&i| i != NO_MOVE))
    }

    pub fn write_table(&mut self, g: &Digraph, mut w: impl Write) -> Result<()> {
        self.compute_moves(g);
        w.write_all(MAGIC)?;
        w.write_all(&TABLE_VERSION.to_le_bytes())?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        w.write_all(&(self.k as u32).to_le_bytes())?;
        w.write_all(&(self.tuple_count() as u64).to_le_bytes())?;
        w.write_all(&self.graph_digest)?;
        let moves = self.moves.as_ref().expect("computed above");
        for (dist, mv_list) in self.dist.iter().zip(moves) {
            let mut buf = Vec::with_capacity(self.state_count() * 6);
            for &d in dist {
                buf.extend_from_slice(&d.to_le_bytes());
            }
            for &mv in mv_list {
                buf.extend_from_slice(&mv.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        Ok(())
    }

    /// Reads a table and checks it was computed for `g`.
    pub fn read_table(g: &Digraph, mut r: impl Read) -> Result<SolveResult> {
        let mut head = [0u8; 56];
        r.read_exact(&mut head)?;
        if &head[0..4] != MAGIC {
            return Err(Error::Format("not a strategy table".into()));
        }
        let word = |i: usize| u32::from_le_bytes(head[i..i + 4].try_into().expect("4 bytes"));
        if word(4) != TABLE_VERSION {
            return Err(Error::Format(format!("unsupported table version {}", word(4))));
        }
        let n = word(8) as usize;
        let k = word(12) as usize;
        let m = u64::from_le_bytes(head[16..24].try_into().expect("8 bytes")) as usize;
        let digest: [u8; 32] = head[24..56].try_into().expect("32 bytes");
        if n != g.vertex_count() || digest != graph_digest(g) {
            return Err(Error::Format("table was computed for a different graph".into()));
        }
        if k == 0 || tuple_count(n, k) != m as u128 {
            return Err(Error::Format("tuple count does not match n and k".into()));
        }
        let total = m * n;
        let mut dist = [Vec::new(), Vec::new()];
        let mut moves = [Vec::new(), Vec::new()];
        for mover in 0..2 {
            let mut buf = vec![0u8; total * 6];
            r.read_exact(&mut buf)?;
            let (db, mb) = buf.split_at(total * 2);
            dist[mover] = db.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]])).collect();
            moves[mover] = mb
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect();
        }
        let mut res = SolveResult {
            n,
            k,
            binom: binomials(n + k, k),
            tuples: vec![0; m * k],
            dist,
            moves: Some(moves),
            graph_digest: digest,
        };
        res.fill_tuples();
        Ok(res)
    }
}

fn enumerate_sorted(n: usize, k: usize, cur: &mut Vec<u32>, i: usize, lo: u32, f: &mut impl FnMut(&[u32])) {
    if i == k {
        f(cur);
        return;
    }
    for v in lo..n as u32 {
        cur[i] = v;
        enumerate_sorted(n, k, cur, i + 1, v, f);
    }
}

/// Least `k <= k_max` with a winning cop placement, or `None`.
pub fn cop_number(g: &Digraph, k_max: usize, options: &SolveOptions) -> Result<Option<usize>> {
    for k in 1..=k_max {
        if solve(g, k, options)?.is_cop_win() {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Cops playing the solved table.
pub struct SolverCop {
    table: Arc<SolveResult>,
}

impl SolverCop {
    pub fn new(table: Arc<SolveResult>) -> Self {
        SolverCop { table }
    }
}

impl CopStrategy for SolverCop {
    fn name(&self) -> String {
        "solver-optimal".into()
    }

    fn place(&mut self, config: &GameConfig, _state: &GameState) -> Result<Vec<VertexId>> {
        if config.k != self.table.k() || config.graph.vertex_count() != self.table.n() {
            return Err(Error::InvalidConfig("table does not match the game".into()));
        }
        self.table.winning_placement().map(|(c, _)| c).ok_or(Error::NotCopWin)
    }

    fn step(&mut self, config: &GameConfig, state: &GameState, _h: &History) -> Result<CopMove> {
        let robber = state.robber.expect("placed");
        Ok(CopMove(self.table.cop_move(&config.graph, &state.cops, robber)?))
    }
}

/// Robber playing the solved table: escapes when it can, otherwise delays.
pub struct SolverRobber {
    table: Arc<SolveResult>,
}

impl SolverRobber {
    pub fn new(table: Arc<SolveResult>) -> Self {
        SolverRobber { table }
    }
}

impl RobberStrategy for SolverRobber {
    fn name(&self) -> String {
        "solver-optimal".into()
    }

    fn place(&mut self, _config: &GameConfig, state: &GameState) -> Result<VertexId> {
        self.table.robber_placement(&state.cops)
    }

    fn step(&mut self, config: &GameConfig, state: &GameState, _h: &History) -> Result<RobberMove> {
        let robber = state.robber.expect("placed");
        Ok(RobberMove(self.table.robber_move(
            &config.graph,
            &state.cops,
            robber,
        )?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{directed_cycle, random_tree, undirected_cycle};

    #[test]
    fn tuple_ranking_is_a_bijection() {
        let g = Digraph::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let r = solve(&g, 3, &SolveOptions::default()).unwrap();
        assert_eq!(r.tuple_count(), 35);
        for t in 0..r.tuple_count() {
            let tuple: Vec<u32> = r.tuple_raw(t).to_vec();
            assert!(tuple.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(r.rank_sorted(&tuple), t);
        }
    }

    #[test]
    fn small_cop_numbers() {
        let opts = SolveOptions::default();
        let k1 = Digraph::new(1, vec![]).unwrap();
        assert_eq!(cop_number(&k1, 1, &opts).unwrap(), Some(1));
        assert_eq!(
            cop_number(&undirected_cycle(4).unwrap().graph, 3, &opts).unwrap(),
            Some(2)
        );
        assert_eq!(
            cop_number(&directed_cycle(5).unwrap().graph, 3, &opts).unwrap(),
            Some(2)
        );
        assert_eq!(
            cop_number(&random_tree(9, 1).unwrap().graph, 2, &opts).unwrap(),
            Some(1)
        );
    }

    #[test]
    fn budget_guard() {
        let g = undirected_cycle(100).unwrap().graph;
        let err = solve(&g, 4, &SolveOptions::default()).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn table_round_trip() {
        let g = directed_cycle(5).unwrap().graph;
        let mut r = solve(&g, 2, &SolveOptions::default()).unwrap();
        let mut buf = Vec::new();
        r.write_table(&g, &mut buf).unwrap();
        let back = SolveResult::read_table(&g, buf.as_slice()).unwrap();
        assert_eq!(back.dist, r.dist);
        assert_eq!(back.moves, r.moves);
        assert_eq!(back.tuples, r.tuples);
        let other = directed_cycle(6).unwrap().graph;
        assert!(SolveResult::read_table(&other, buf.as_slice()).is_err());
    }
}
