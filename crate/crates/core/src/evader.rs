//! The robber policy for the construction arena.
//!
//! The robber waits at a unit center until a cop sits one arc away on an
//! inbound spoke. With two or more cops in the unit it escapes straight
//! down an outbound spoke to a safe exit. With exactly one it walks to the
//! perimeter and holds there, fleeing only when that cop is one arc away,
//! until another cop commits to a path toward the unit; it then runs for a
//! safe exit. After exiting it rides the one-way path and walks in to the
//! next center.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::construction::{Construction, CornerKind, Location, SpokeDir, VertexRole, EXITS};
use crate::engine::{GameConfig, GameState, History, RobberMove, RobberStrategy};
use crate::error::{Error, Result};
use crate::graph::VertexId;

const INF: u32 = u32::MAX / 4;
const UNSOLVED: u16 = u16::MAX;
const MAX_LOGGED_VIOLATIONS: usize = 32;

/// Largest cop count the policy's case analysis covers; against more cops
/// logged violations are expected.
pub const GUARANTEED_COPS: usize = 3;

/// All-pairs directed distances inside one unit. Every unit has the same
/// local layout, so one table serves all twelve.
pub struct UnitTables {
    pub size: usize,
    dist: Vec<u16>,
    out: Vec<Vec<u16>>,
    inn: Vec<Vec<u16>>,
    /// Local indices of the exit corners, ascending by corner index.
    pub exit_local: [u16; EXITS],
    pub exit_corners: [usize; EXITS],
    attractors: Mutex<HashMap<u8, Arc<Attractor>>>,
}

impl std::fmt::Debug for UnitTables {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UnitTables").field("size", &self.size).finish()
    }
}

impl UnitTables {
    pub fn new(c: &Construction) -> Result<Self> {
        let size = c.params.unit_size();
        let mut local_arcs: Option<Vec<(u16, u16)>> = None;
        for u in 0..c.units.len() {
            let base = c.unit_base(u);
            let mut arcs = Vec::new();
            for v in base..base + size {
                for &w in c.graph.out_raw(v) {
                    let w = w as usize;
                    if (base..base + size).contains(&w) {
                        arcs.push(((v - base) as u16, (w - base) as u16));
                    }
                }
            }
            arcs.sort_unstable();
            match &local_arcs {
                None => local_arcs = Some(arcs),
                Some(a) if *a == arcs => {}
                Some(_) => return Err(Error::InvalidParams(format!("unit {u} layout differs from unit 0"))),
            }
        }
        let arcs = local_arcs.unwrap_or_default();
        let mut out = vec![Vec::new(); size];
        let mut inn = vec![Vec::new(); size];
        for &(a, b) in &arcs {
            out[a as usize].push(b);
            inn[b as usize].push(a);
        }
        let mut dist = vec![UNSOLVED; size * size];
        let mut queue = VecDeque::new();
        for s in 0..size {
            let row = &mut dist[s * size..(s + 1) * size];
            row[s] = 0;
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                let d = row[x];
                for &y in &out[x] {
                    if row[y as usize] == UNSOLVED {
                        row[y as usize] = d + 1;
                        queue.push_back(y as usize);
                    }
                }
            }
        }
        let unit0 = &c.units[0];
        let mut exit_corners = [0; EXITS];
        let mut exit_local = [0; EXITS];
        for (j, &e) in unit0.exits.iter().enumerate() {
            exit_corners[j] = e;
            exit_local[j] = (unit0.corners[e].idx() - c.unit_base(0)) as u16;
        }
        for u in &c.units {
            if u.exits != unit0.exits {
                return Err(Error::InvalidParams("exit corners differ between units".into()));
            }
        }
        Ok(UnitTables {
            size,
            dist,
            out,
            inn,
            exit_local,
            exit_corners,
            attractors: Mutex::new(HashMap::new()),
        })
    }

    /// Directed distance inside the unit; `u32::MAX / 4` if unreachable.
    pub fn dist(&self, from: usize, to: usize) -> u32 {
        match self.dist[from * self.size + to] {
            UNSOLVED => INF,
            d => d as u32,
        }
    }

    pub fn out_local(&self, v: usize) -> &[u16] {
        &self.out[v]
    }

    /// Exit-set mask over `exit_corners` positions.
    pub fn mask_of(&self, exits: &[usize]) -> u8 {
        let mut m = 0u8;
        for (j, &e) in self.exit_corners.iter().enumerate() {
            if exits.contains(&e) {
                m |= 1 << j;
            }
        }
        m
    }

    pub fn attractor(&self, mask: u8) -> Arc<Attractor> {
        let mut cache = self.attractors.lock().expect("attractor cache poisoned");
        cache
            .entry(mask)
            .or_insert_with(|| Arc::new(Attractor::solve(self, mask)))
            .clone()
    }
}

/// Robber-reach game against one cop confined to the unit: the robber wins
/// by standing on a goal exit with the move, after which it leaves the unit.
/// Values count robber moves, the departing move included.
pub struct Attractor {
    size: usize,
    /// `[cop * size + robber]`, robber to move.
    robber_to_move: Vec<u16>,
    /// `[cop * size + robber]`, cop to move.
    cop_to_move: Vec<u16>,
    goals: Vec<bool>,
}

impl Attractor {
    fn solve(t: &UnitTables, mask: u8) -> Self {
        let n = t.size;
        let mut goals = vec![false; n];
        for j in 0..EXITS {
            if mask & (1 << j) != 0 {
                goals[t.exit_local[j] as usize] = true;
            }
        }
        let mut rtm = vec![UNSOLVED; n * n];
        let mut ctm = vec![UNSOLVED; n * n];
        // cop-to-move counters: options left that are not yet robber wins
        let mut counter = vec![0u16; n * n];
        for a in 0..n {
            let opts = 1 + t.out[a].len() as u16;
            for r in 0..n {
                let captures = a == r || t.out[a].iter().any(|&x| x as usize == r);
                counter[a * n + r] = if captures { u16::MAX } else { opts };
            }
        }
        let mut queue: VecDeque<(bool, usize)> = VecDeque::new();
        for a in 0..n {
            for (r, &g) in goals.iter().enumerate() {
                if g && a != r {
                    rtm[a * n + r] = 1;
                    queue.push_back((true, a * n + r));
                }
            }
        }
        while let Some((robber_side, idx)) = queue.pop_front() {
            let (a, r) = (idx / n, idx % n);
            if robber_side {
                let d = rtm[idx];
                // cop predecessors: a' with a reachable by stay or one arc
                for ap in std::iter::once(a as u16).chain(t.inn[a].iter().copied()) {
                    let j = ap as usize * n + r;
                    if ctm[j] != UNSOLVED || counter[j] == u16::MAX || ap as usize == r {
                        continue;
                    }
                    counter[j] -= 1;
                    if counter[j] == 0 {
                        ctm[j] = d;
                        queue.push_back((false, j));
                    }
                }
            } else {
                let d = ctm[idx];
                for rp in std::iter::once(r as u16).chain(t.inn[r].iter().copied()) {
                    let j = a * n + rp as usize;
                    if rtm[j] == UNSOLVED && rp as usize != a {
                        rtm[j] = d.saturating_add(1);
                        queue.push_back((true, j));
                    }
                }
            }
        }
        Attractor {
            size: n,
            robber_to_move: rtm,
            cop_to_move: ctm,
            goals,
        }
    }

    /// Robber moves to a forced exit with the robber to move, if winning.
    pub fn value(&self, cop: usize, robber: usize) -> Option<u32> {
        match self.robber_to_move[cop * self.size + robber] {
            UNSOLVED => None,
            d => Some(d as u32),
        }
    }

    /// Best robber move: `None` means leave through the exit now.
    fn best_move(&self, t: &UnitTables, cop: usize, robber: usize) -> Option<Option<usize>> {
        self.value(cop, robber)?;
        if self.goals[robber] {
            return Some(None);
        }
        std::iter::once(robber)
            .chain(t.out[robber].iter().map(|&x| x as usize))
            .filter(|&x| x != cop)
            .filter_map(|x| match self.cop_to_move[cop * self.size + x] {
                UNSOLVED => None,
                d => Some((d, x)),
            })
            .min()
            .map(|(_, x)| Some(x))
    }
}

/// Exit corners of `unit` whose destination lies outside `N[X]` for every
/// outside cop's effective unit `X`.
pub fn safe_exits(c: &Construction, unit: usize, outside_units: &[usize]) -> Vec<usize> {
    let u = &c.units[unit];
    u.exits
        .iter()
        .copied()
        .filter(|&e| {
            let dest = u.corner_peer[e];
            outside_units.iter().all(|&x| x != dest && !c.units_adjacent(x, dest))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectiveCop {
    pub unit: usize,
    /// Entry corner for a cop on a path; its own vertex otherwise.
    pub vertex: VertexId,
    /// Remaining arcs to `vertex`.
    pub lag: u32,
    pub in_transit: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreatView {
    pub unit: usize,
    pub effective: Vec<EffectiveCop>,
    /// Cops whose effective unit is `unit`.
    pub cops_in_unit: usize,
    /// Of those, the ones not on an inbound spoke interior.
    pub mobile: usize,
    /// Cop indices physically inside the unit.
    pub resident: Vec<usize>,
    /// Cop indices on a path toward the unit.
    pub entrants: Vec<usize>,
    /// Effective units of the remaining cops.
    pub outside_units: Vec<usize>,
}

pub fn effective_cop(c: &Construction, v: VertexId) -> EffectiveCop {
    match c.role(v) {
        VertexRole::Green { from, to, position } => {
            let p = &c.paths[c.path_index(from as usize, to as usize).expect("path exists")];
            EffectiveCop {
                unit: to as usize,
                vertex: p.entry,
                lag: c.params.green - position,
                in_transit: true,
            }
        }
        _ => match c.location(v) {
            Location::Unit(u) => EffectiveCop {
                unit: u,
                vertex: v,
                lag: 0,
                in_transit: false,
            },
            Location::Transit { .. } => unreachable!("green roles handled above"),
        },
    }
}

pub fn threat_view(c: &Construction, cops: &[VertexId], unit: usize) -> ThreatView {
    let effective: Vec<EffectiveCop> = cops.iter().map(|&v| effective_cop(c, v)).collect();
    let mut view = ThreatView {
        unit,
        effective: effective.clone(),
        cops_in_unit: 0,
        mobile: 0,
        resident: Vec::new(),
        entrants: Vec::new(),
        outside_units: Vec::new(),
    };
    for (i, e) in effective.iter().enumerate() {
        if e.unit != unit {
            view.outside_units.push(e.unit);
            continue;
        }
        view.cops_in_unit += 1;
        if e.in_transit {
            view.entrants.push(i);
        } else {
            view.resident.push(i);
        }
        let inbound = matches!(
            c.role(cops[i]),
            VertexRole::Spoke {
                dir: SpokeDir::Inbound,
                ..
            }
        );
        if !inbound {
            view.mobile += 1;
        }
    }
    view
}

/// Lower bounds on the cops' distance to every vertex of a unit.
fn cop_distances(c: &Construction, t: &UnitTables, cops: &[VertexId], unit: usize) -> Vec<u32> {
    let base = c.unit_base(unit);
    let g = c.params.green;
    // cops that must cross into the unit first share one floor
    let mut floor = INF;
    let mut sources: Vec<(usize, u32)> = Vec::new();
    for &cop in cops {
        match c.local_index(cop) {
            Some((u, a)) if u == unit => sources.push((a, 0)),
            Some(_) => floor = floor.min(g),
            None => {
                let e = effective_cop(c, cop);
                if e.unit == unit {
                    sources.push((e.vertex.idx() - base, e.lag));
                } else {
                    floor = floor.min(e.lag + g);
                }
            }
        }
    }
    sources.sort_unstable();
    sources.dedup_by_key(|s| s.0);
    let mut d = vec![floor; t.size];
    for (a, lag) in sources {
        for (x, dx) in d.iter_mut().enumerate() {
            *dx = (*dx).min(lag + t.dist(a, x));
        }
    }
    d
}

fn straight_spoke_clear(t: &UnitTables, d: &[u32], exit_corner: usize, spoke_len: usize) -> bool {
    // local layout: spoke nodes of corner i at 11 + i*(S-1) + (p-1), corner at 1 + i
    (1..=spoke_len).all(|p| {
        let x = if p == spoke_len {
            1 + exit_corner
        } else {
            11 + exit_corner * (spoke_len - 1) + (p - 1)
        };
        x < t.size && d[x] > p as u32
    })
}

/// Straight-spoke escape from the center: the lowest-indexed exit in `s`
/// whose whole spoke stays out of reach of every cop.
pub fn escape_center(c: &Construction, t: &UnitTables, cops: &[VertexId], unit: usize, s: &[usize]) -> Result<usize> {
    let d = cop_distances(c, t, cops, unit);
    let spoke = c.params.spoke as usize;
    s.iter()
        .copied()
        .filter(|&e| c.units[unit].corner_kinds[e] == CornerKind::Exit)
        .find(|&e| straight_spoke_clear(t, &d, e, spoke))
        .ok_or_else(|| Error::Strategy(format!("no exit of {s:?} in unit {unit} is safe")))
}

/// Shortest directed path from the robber's perimeter vertex to the center.
/// Requires the unique cop in the unit to sit on the first vertex of an
/// outbound spoke.
pub fn return_to_center(
    c: &Construction,
    t: &UnitTables,
    cops: &[VertexId],
    robber: VertexId,
) -> Result<Vec<VertexId>> {
    let (unit, r) = c
        .local_index(robber)
        .filter(|_| c.is_perimeter(robber))
        .ok_or_else(|| Error::Strategy("robber is not on a unit perimeter".into()))?;
    let view = threat_view(c, cops, unit);
    let ok = view.cops_in_unit == 1
        && view.resident.len() == 1
        && matches!(
            c.role(cops[view.resident[0]]),
            VertexRole::Spoke {
                dir: SpokeDir::Outbound,
                position: 1,
                ..
            }
        );
    if !ok {
        return Err(Error::Strategy(
            "return precondition: one cop at an outbound spoke start".into(),
        ));
    }
    Ok(local_path(c, t, unit, r, 0))
}

fn local_path(c: &Construction, t: &UnitTables, unit: usize, from: usize, to: usize) -> Vec<VertexId> {
    let base = c.unit_base(unit);
    let mut path = Vec::new();
    let mut x = from;
    while x != to {
        let dx = t.dist(x, to);
        if dx >= INF {
            break;
        }
        x = t.out[x]
            .iter()
            .map(|&y| y as usize)
            .find(|&y| t.dist(y, to) + 1 == dx)
            .expect("shortest path continues");
        path.push(VertexId::from(base + x));
    }
    path
}

/// Earliest-arrival search in which every vertex entered at time `k` must
/// have cop distance above `k`. Returns the path (excluding the start).
fn static_plan(t: &UnitTables, d: &[u32], from: usize, goals: &[usize]) -> Option<Vec<usize>> {
    if goals.contains(&from) {
        return Some(Vec::new());
    }
    let mut prev = vec![usize::MAX; t.size];
    let mut depth = vec![u32::MAX; t.size];
    depth[from] = 0;
    let mut q = VecDeque::from([from]);
    while let Some(x) = q.pop_front() {
        for &y in &t.out[x] {
            let y = y as usize;
            let k = depth[x] + 1;
            if depth[y] == u32::MAX && d[y] > k {
                depth[y] = k;
                prev[y] = x;
                if goals.contains(&y) {
                    let mut path = vec![y];
                    let mut z = x;
                    while z != from {
                        path.push(z);
                        z = prev[z];
                    }
                    path.reverse();
                    return Some(path);
                }
                q.push_back(y);
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum After {
    Leave,
    Hold,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum EvaderMode {
    WaitAtCenter { unit: usize },
    EscapeCenter { unit: usize, exit: usize, after: After },
    Transit { from: usize, to: usize },
    EnterUnit { unit: usize },
    PerimeterHold { unit: usize },
    PerimeterRun { unit: usize, safe: Vec<usize> },
    ReturnToCenter { unit: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvaderReport {
    /// WaitAtCenter entries after the opening placement.
    pub center_arrivals: u64,
    pub escapes: u64,
    pub one_cop_cases: u64,
    pub runs: u64,
    pub max_escape_moves: u64,
    /// Robber turns from the run trigger to leaving the unit.
    pub max_run_moves: u64,
    /// Robber turns from leaving a unit to reaching the next center.
    pub max_transit_moves: u64,
    pub max_return_moves: u64,
    pub violation_count: u64,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Annotation {
    #[serde(flatten)]
    pub mode: EvaderMode,
    pub case: Option<u32>,
    pub target: Option<VertexId>,
}

/// Robber strategy implementing the unit-hopping policy.
pub struct Evader {
    arena: Arc<Construction>,
    tables: Arc<UnitTables>,
    mode: EvaderMode,
    turn: u64,
    phase_start: u64,
    depart_turn: Option<u64>,
    last_case: Option<u32>,
    last_target: Option<VertexId>,
    report: EvaderReport,
}

impl Evader {
    pub fn new(arena: Arc<Construction>) -> Result<Self> {
        let tables = Arc::new(UnitTables::new(&arena)?);
        Ok(Self::with_tables(arena, tables))
    }

    /// Shares distance tables and solved attractors between evaders.
    pub fn with_tables(arena: Arc<Construction>, tables: Arc<UnitTables>) -> Self {
        Evader {
            arena,
            tables,
            mode: EvaderMode::WaitAtCenter { unit: 0 },
            turn: 0,
            phase_start: 0,
            depart_turn: None,
            last_case: None,
            last_target: None,
            report: EvaderReport::default(),
        }
    }

    pub fn tables(&self) -> &Arc<UnitTables> {
        &self.tables
    }

    pub fn mode(&self) -> &EvaderMode {
        &self.mode
    }

    pub fn stats(&self) -> &EvaderReport {
        &self.report
    }

    fn violation(&mut self, msg: String) {
        self.report.violation_count += 1;
        if self.report.violations.len() < MAX_LOGGED_VIOLATIONS {
            self.report.violations.push(format!("turn {}: {msg}", self.turn));
        }
    }

    fn set_mode(&mut self, m: EvaderMode) {
        self.mode = m;
        self.phase_start = self.turn;
    }

    /// Opening: the center of the unit farthest from every cop's effective unit.
    pub fn choose_start(&self, cops: &[VertexId]) -> VertexId {
        let c = &self.arena;
        let eff: Vec<usize> = cops.iter().map(|&v| effective_cop(c, v).unit).collect();
        let best = (0..c.units.len())
            .max_by_key(|&u| {
                let m = eff.iter().map(|&x| c.icosahedron.distance(u, x)).min().unwrap_or(3);
                (m, std::cmp::Reverse(u))
            })
            .unwrap_or(0);
        c.center_of(best)
    }

    fn vertex(&self, unit: usize, local: usize) -> VertexId {
        VertexId::from(self.arena.unit_base(unit) + local)
    }

    /// Next vertex is safe from capture during the following cop move.
    fn one_step_safe(&self, cops: &[VertexId], x: VertexId) -> bool {
        let g = &self.arena.graph;
        !cops.iter().any(|&c| c == x || g.has_arc(c, x))
    }

    fn flee(&mut self, unit: usize, r: usize, d: &[u32], prefer_perimeter: bool) -> usize {
        if d[r] > 1 {
            return r;
        }
        let c = self.arena.clone();
        let t = self.tables.clone();
        let best = t.out[r]
            .iter()
            .map(|&x| x as usize)
            .filter(|&x| d[x] > 1)
            .max_by_key(|&x| {
                let per = prefer_perimeter && c.is_perimeter(self.vertex(unit, x));
                (per, d[x].min(INF), std::cmp::Reverse(x))
            });
        match best {
            Some(x) => x,
            None => {
                self.violation(format!("no 1-step-safe move in unit {unit}"));
                t.out[r]
                    .iter()
                    .map(|&x| x as usize)
                    .max_by_key(|&x| (d[x], std::cmp::Reverse(x)))
                    .unwrap_or(r)
            }
        }
    }

    fn decide(&mut self, state: &GameState) -> Result<VertexId> {
        let c = self.arena.clone();
        let robber = state
            .robber
            .ok_or_else(|| Error::Strategy("robber not placed".into()))?;
        let cops = &state.cops;
        self.last_case = None;
        self.last_target = None;

        // Re-synchronise the mode with the robber's actual location.
        match (c.location(robber), &self.mode) {
            (Location::Transit { from, to }, m) if !matches!(m, EvaderMode::Transit { .. }) => {
                self.set_mode(EvaderMode::Transit { from, to });
            }
            (Location::Unit(u), EvaderMode::Transit { .. }) => {
                self.set_mode(EvaderMode::EnterUnit { unit: u });
            }
            _ => {}
        }

        match self.mode.clone() {
            EvaderMode::Transit { from, to } => {
                let p = c.path_between(from, to).expect("path exists");
                let next = match c.role(robber) {
                    VertexRole::Green { position, .. } if (position as usize) < p.interior.len() => {
                        p.interior[position as usize]
                    }
                    _ => p.entry,
                };
                self.last_target = Some(p.entry);
                if self.one_step_safe(cops, next) {
                    Ok(next)
                } else {
                    self.violation(format!("transit {from}->{to} blocked"));
                    Ok(robber)
                }
            }
            EvaderMode::EnterUnit { unit } => {
                let (_, r) = c.local_index(robber).expect("in unit");
                if r == 0 {
                    return self.arrive_center(unit, state);
                }
                let path = local_path(&c, &self.tables, unit, r, 0);
                let next = path.first().copied().unwrap_or(robber);
                self.last_target = Some(c.center_of(unit));
                if self.one_step_safe(cops, next) {
                    Ok(next)
                } else {
                    self.violation(format!("entering unit {unit} blocked"));
                    let d = cop_distances(&c, &self.tables, cops, unit);
                    let x = self.flee(unit, r, &d, false);
                    Ok(self.vertex(unit, x))
                }
            }
            EvaderMode::WaitAtCenter { unit } => self.at_center(unit, state),
            EvaderMode::EscapeCenter { unit, exit, after } => {
                let (_, r) = c.local_index(robber).expect("in unit");
                let corner_local = 1 + exit;
                if r == corner_local {
                    self.report.max_escape_moves = self.report.max_escape_moves.max(self.turn - self.phase_start);
                    return match after {
                        After::Leave => Ok(self.depart(unit, exit)),
                        After::Hold => {
                            self.set_mode(EvaderMode::PerimeterHold { unit });
                            self.perimeter(unit, state)
                        }
                    };
                }
                let path = local_path(&c, &self.tables, unit, r, corner_local);
                let next = path[0];
                self.last_target = Some(c.units[unit].corners[exit]);
                if !self.one_step_safe(cops, next) {
                    self.violation(format!("escape route to exit {exit} of unit {unit} intercepted"));
                }
                Ok(next)
            }
            EvaderMode::PerimeterHold { unit }
            | EvaderMode::PerimeterRun { unit, .. }
            | EvaderMode::ReturnToCenter { unit } => self.perimeter(unit, state),
        }
    }

    fn depart(&mut self, unit: usize, exit: usize) -> VertexId {
        let c = &self.arena;
        let p = &c.paths[c.units[unit].corner_path[exit]];
        self.depart_turn = Some(self.turn);
        self.last_target = Some(p.entry);
        let next = p.interior[0];
        self.set_mode(EvaderMode::Transit { from: p.from, to: p.to });
        next
    }

    fn arrive_center(&mut self, unit: usize, state: &GameState) -> Result<VertexId> {
        if let Some(t0) = self.depart_turn.take() {
            self.report.max_transit_moves = self.report.max_transit_moves.max(self.turn - t0);
        }
        if let EvaderMode::ReturnToCenter { .. } = self.mode {
            self.report.max_return_moves = self.report.max_return_moves.max(self.turn - self.phase_start);
        }
        self.report.center_arrivals += 1;
        self.set_mode(EvaderMode::WaitAtCenter { unit });
        self.at_center(unit, state)
    }

    fn at_center(&mut self, unit: usize, state: &GameState) -> Result<VertexId> {
        let c = self.arena.clone();
        let cops = &state.cops;
        let center = c.center_of(unit);
        let triggered = cops.iter().any(|&x| x == center || c.graph.has_arc(x, center));
        if !triggered {
            return Ok(center);
        }
        let view = threat_view(&c, cops, unit);
        self.last_case = Some(view.cops_in_unit as u32);
        if view.cops_in_unit == 1 {
            // walk out to the perimeter, away from the lone cop, and hold
            self.report.one_cop_cases += 1;
            let d = cop_distances(&c, &self.tables, cops, unit);
            let spoke = c.params.spoke as usize;
            let pick = c.units[unit]
                .exits
                .iter()
                .copied()
                .filter(|&e| straight_spoke_clear(&self.tables, &d, e, spoke))
                .max_by_key(|&e| (d[1 + e].min(INF), std::cmp::Reverse(e)));
            return match pick {
                Some(e) => {
                    self.set_mode(EvaderMode::EscapeCenter {
                        unit,
                        exit: e,
                        after: After::Hold,
                    });
                    self.step_escape(unit, e)
                }
                None => {
                    self.violation(format!("one-cop case in unit {unit}: no clear spoke"));
                    let r = 0;
                    let x = self.flee(unit, r, &d, false);
                    Ok(self.vertex(unit, x))
                }
            };
        }
        self.report.escapes += 1;
        let mut s = safe_exits(&c, unit, &view.outside_units);
        if s.len() <= view.mobile {
            self.violation(format!(
                "unit {unit}: |S| = {} with c = {}; falling back to all exits",
                s.len(),
                view.mobile
            ));
            s = c.units[unit].exits.clone();
        }
        let e = match escape_center(&c, &self.tables, cops, unit, &s) {
            Ok(e) => e,
            Err(_) => {
                self.violation(format!("unit {unit}: no interception-free exit in {s:?}"));
                let d = cop_distances(&c, &self.tables, cops, unit);
                *s.iter()
                    .max_by_key(|&&e| (d[1 + e].min(INF), std::cmp::Reverse(e)))
                    .unwrap_or(&c.units[unit].exits[0])
            }
        };
        self.set_mode(EvaderMode::EscapeCenter {
            unit,
            exit: e,
            after: After::Leave,
        });
        self.step_escape(unit, e)
    }

    fn step_escape(&mut self, unit: usize, exit: usize) -> Result<VertexId> {
        let c = &self.arena;
        self.last_target = Some(c.units[unit].corners[exit]);
        let path = local_path(c, &self.tables, unit, 0, 1 + exit);
        Ok(path[0])
    }

    fn perimeter(&mut self, unit: usize, state: &GameState) -> Result<VertexId> {
        let c = self.arena.clone();
        let t = self.tables.clone();
        let cops = &state.cops;
        let robber = state.robber.expect("placed");
        let (_, r) = c.local_index(robber).expect("in unit");
        let view = threat_view(&c, cops, unit);
        let d = cop_distances(&c, &t, cops, unit);

        if view.cops_in_unit == 0 || matches!(self.mode, EvaderMode::ReturnToCenter { .. }) {
            if !matches!(self.mode, EvaderMode::ReturnToCenter { .. }) {
                self.set_mode(EvaderMode::ReturnToCenter { unit });
            }
            if r == 0 {
                return self.arrive_center(unit, state);
            }
            self.last_target = Some(c.center_of(unit));
            let x = match static_plan(&t, &d, r, &[0]) {
                Some(p) if !p.is_empty() => p[0],
                _ => {
                    let toward = local_path(&c, &t, unit, r, 0);
                    let next = toward[0].idx() - c.unit_base(unit);
                    if d[next] > 1 {
                        next
                    } else {
                        self.flee(unit, r, &d, false)
                    }
                }
            };
            return Ok(self.vertex(unit, x));
        }

        // a run needs two cops committed to the unit; once one of them
        // leaves, the lone-cop hold applies again
        let run = view.cops_in_unit >= 2;
        if !run {
            if let EvaderMode::PerimeterRun { .. } = self.mode {
                self.set_mode(EvaderMode::PerimeterHold { unit });
            }
            let x = self.flee(unit, r, &d, true);
            return Ok(self.vertex(unit, x));
        }
        if let EvaderMode::PerimeterHold { .. } = self.mode {
            self.report.runs += 1;
            self.set_mode(EvaderMode::PerimeterRun { unit, safe: Vec::new() });
        }

        // running for a safe exit
        let mut s = safe_exits(&c, unit, &view.outside_units);
        if s.is_empty() {
            self.violation(format!("unit {unit}: run with no safe exit"));
            s = c.units[unit].exits.clone();
        }
        self.mode = EvaderMode::PerimeterRun { unit, safe: s.clone() };
        if let Some(e) = s.iter().copied().find(|&e| r == 1 + e) {
            self.report.max_run_moves = self.report.max_run_moves.max(self.turn - self.phase_start + 1);
            return Ok(self.depart(unit, e));
        }
        let goals: Vec<usize> = s.iter().map(|&e| 1 + e).collect();
        let mut choice = None;
        if view.resident.len() == 1 {
            let (_, a) = c.local_index(cops[view.resident[0]]).expect("resident");
            let att = t.attractor(t.mask_of(&s));
            if let Some(Some(x)) = att.best_move(&t, a, r) {
                if d[x] > 1 {
                    choice = Some(x);
                }
            }
        }
        if choice.is_none() {
            choice = static_plan(&t, &d, r, &goals).and_then(|p| p.first().copied());
        }
        let x = match choice {
            Some(x) => x,
            None => {
                // head for the nearest safe exit when that step is 1-safe
                let toward = goals
                    .iter()
                    .map(|&gl| (t.dist(r, gl), gl))
                    .min()
                    .map(|(_, gl)| local_path(&c, &t, unit, r, gl))
                    .and_then(|p| p.first().map(|v| v.idx() - c.unit_base(unit)));
                match toward {
                    Some(n) if d[n] > 1 && d[r] > 1 => n,
                    _ => self.flee(unit, r, &d, true),
                }
            }
        };
        self.last_target = goals.first().map(|&gl| self.vertex(unit, gl));
        Ok(self.vertex(unit, x))
    }
}

impl RobberStrategy for Evader {
    fn name(&self) -> String {
        "evader".into()
    }

    fn reset(&mut self, _seed: u64) {
        self.mode = EvaderMode::WaitAtCenter { unit: 0 };
        self.turn = 0;
        self.phase_start = 0;
        self.depart_turn = None;
        self.report = EvaderReport::default();
    }

    fn place(&mut self, _config: &GameConfig, state: &GameState) -> Result<VertexId> {
        let v = self.choose_start(&state.cops);
        let Location::Unit(u) = self.arena.location(v) else {
            unreachable!("centers lie in units")
        };
        self.set_mode(EvaderMode::WaitAtCenter { unit: u });
        Ok(v)
    }

    fn step(&mut self, _config: &GameConfig, state: &GameState, _history: &History) -> Result<RobberMove> {
        self.turn += 1;
        let v = self.decide(state)?;
        Ok(RobberMove(v))
    }

    fn annotation(&self) -> Option<serde_json::Value> {
        serde_json::to_value(Annotation {
            mode: self.mode.clone(),
            case: self.last_case,
            target: self.last_target,
        })
        .ok()
    }

    fn report(&self) -> Option<serde_json::Value> {
        serde_json::to_value(&self.report).ok()
    }
}

/// Local index helpers exposed for verifiers and tests.
pub fn corner_local(corner: usize) -> usize {
    1 + corner
}

pub fn spoke_local(spoke_len: u32, corner: usize, position: u32) -> usize {
    debug_assert!(position >= 1 && position < spoke_len);
    11 + corner * (spoke_len as usize - 1) + (position as usize - 1)
}
