//! Named strategies and arena loading shared by the command line, the play
//! service and the bindings.

use std::path::Path;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::construction::{Construction, ConstructionParams};
use crate::embedding::RotationSystem;
use crate::engine::{CopStrategy, RobberStrategy, StationaryRobber};
use crate::error::{Error, Result};
use crate::evader::{Evader, UnitTables};
use crate::graph::{Digraph, VertexId};
use crate::io::{ArenaDocument, GraphDocument};
use crate::solver::{solve, SolveOptions, SolveResult, SolverCop, SolverRobber};
use crate::strategies::{
    ArenaOracle, ExitBlocker, FourCopTrap, Greedy, Hybrid, Placement, RandomCops, RandomRobber, SeparatorSweep,
    DEFAULT_SWEEP_CONSTANT,
};

/// A playing field: any digraph, optionally embedded, optionally a
/// generated construction. Unit tables and the distance oracle are built on
/// first use and shared by every strategy made from this arena.
pub struct Arena {
    pub graph: Arc<Digraph>,
    pub rotation: Option<Arc<RotationSystem>>,
    pub construction: Option<Arc<Construction>>,
    tables: OnceLock<Arc<UnitTables>>,
    oracle: OnceLock<Arc<ArenaOracle>>,
}

impl Arena {
    pub fn from_construction(c: Construction) -> Self {
        Arena {
            graph: c.graph.clone(),
            rotation: Some(Arc::new(c.rotation.clone())),
            construction: Some(Arc::new(c)),
            tables: OnceLock::new(),
            oracle: OnceLock::new(),
        }
    }

    pub fn build(params: ConstructionParams) -> Result<Self> {
        Ok(Self::from_construction(Construction::assemble(params)?))
    }

    pub fn from_graph(graph: Digraph, rotation: Option<RotationSystem>) -> Self {
        Arena {
            graph: Arc::new(graph),
            rotation: rotation.map(Arc::new),
            construction: None,
            tables: OnceLock::new(),
            oracle: OnceLock::new(),
        }
    }

    /// Reads either a `build` arena document (detected by its `params`
    /// field) or a plain graph document.
    pub fn from_json(s: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(s)?;
        if value.get("params").is_some() {
            let doc: ArenaDocument = serde_json::from_value(value)?;
            Ok(Self::from_construction(doc.to_construction()?))
        } else {
            let doc: GraphDocument = serde_json::from_value(value)?;
            let (g, rot) = doc.to_embedded()?;
            Ok(Self::from_graph(g, rot))
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    fn require_construction(&self, what: &str) -> Result<&Arc<Construction>> {
        self.construction
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig(format!("{what} needs a generated construction arena")))
    }

    pub fn tables(&self) -> Result<Arc<UnitTables>> {
        if let Some(t) = self.tables.get() {
            return Ok(t.clone());
        }
        let c = self.require_construction("unit tables")?;
        let t = Arc::new(UnitTables::new(c)?);
        Ok(self.tables.get_or_init(|| t).clone())
    }

    pub fn oracle(&self) -> Result<Arc<ArenaOracle>> {
        if let Some(o) = self.oracle.get() {
            return Ok(o.clone());
        }
        let c = self.require_construction("the distance oracle")?.clone();
        let o = Arc::new(ArenaOracle::new(c, self.tables()?));
        Ok(self.oracle.get_or_init(|| o).clone())
    }

    fn default_placement(&self) -> Placement {
        if self.construction.is_some() {
            Placement::Centers
        } else {
            Placement::Spread
        }
    }

    fn solved(&self, k: usize) -> Result<Arc<SolveResult>> {
        Ok(Arc::new(solve(&self.graph, k, &SolveOptions::default())?))
    }
}

/// Cop strategy by name. `placement: None` means unit centers on a
/// construction arena and evenly spread ids elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CopKind {
    Greedy {
        #[serde(default)]
        placement: Option<Placement>,
    },
    Random {
        #[serde(default)]
        placement: Option<Placement>,
    },
    ExitBlocker {
        #[serde(default)]
        placement: Option<Placement>,
    },
    Hybrid {
        fuzz: u64,
    },
    Trap,
    Sweep {
        #[serde(default = "default_sweep_constant")]
        constant: f64,
    },
    Solver,
}

fn default_sweep_constant() -> f64 {
    DEFAULT_SWEEP_CONSTANT
}

impl CopKind {
    pub fn build(&self, arena: &Arena, k: usize) -> Result<Box<dyn CopStrategy>> {
        let or_default = |p: &Option<Placement>| p.clone().unwrap_or_else(|| arena.default_placement());
        Ok(match self {
            CopKind::Greedy { placement } => match &arena.construction {
                Some(_) => Box::new(Greedy::on_arena(arena.oracle()?, or_default(placement))),
                None => Box::new(Greedy::new(or_default(placement))),
            },
            CopKind::Random { placement } => {
                Box::new(RandomCops::new(or_default(placement), arena.construction.clone()))
            }
            CopKind::ExitBlocker { placement } => Box::new(ExitBlocker::new(arena.oracle()?, or_default(placement))),
            CopKind::Hybrid { fuzz } => Box::new(Hybrid::new(arena.oracle()?, *fuzz)),
            CopKind::Trap => Box::new(FourCopTrap::new(arena.oracle()?)),
            CopKind::Sweep { constant } => {
                let rot = arena
                    .rotation
                    .clone()
                    .ok_or_else(|| Error::InvalidConfig("the sweep needs an embedded graph".into()))?;
                Box::new(SeparatorSweep::new(arena.graph.clone(), rot, *constant)?)
            }
            CopKind::Solver => Box::new(SolverCop::new(arena.solved(k)?)),
        })
    }

    /// Cops the strategy needs on this arena, if it fixes the number.
    pub fn required_cops(&self, arena: &Arena) -> Option<usize> {
        match self {
            CopKind::Sweep { constant } => Some(SeparatorSweep::budget_for(arena.vertex_count(), *constant)),
            CopKind::Trap => Some(4),
            _ => None,
        }
    }
}

/// Parses `greedy`, `random`, `exit-blocker`, `hybrid:<fuzz>`, `trap`,
/// `sweep`, `sweep:<K>` and `solver`.
impl FromStr for CopKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let bad = || Error::InvalidConfig(format!("unknown cop strategy {s:?}"));
        let num =
            |a: Option<&str>| -> Result<Option<f64>> { a.map(|a| a.parse::<f64>().map_err(|_| bad())).transpose() };
        Ok(match name {
            "greedy" => CopKind::Greedy { placement: None },
            "random" => CopKind::Random { placement: None },
            "exit-blocker" => CopKind::ExitBlocker { placement: None },
            "hybrid" => CopKind::Hybrid {
                fuzz: arg.map(|a| a.parse().map_err(|_| bad())).transpose()?.unwrap_or(0),
            },
            "trap" => CopKind::Trap,
            "sweep" => CopKind::Sweep {
                constant: num(arg)?.unwrap_or(DEFAULT_SWEEP_CONSTANT),
            },
            "solver" => CopKind::Solver,
            _ => return Err(bad()),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RobberKind {
    Evader,
    Random {
        #[serde(default)]
        start: Option<VertexId>,
    },
    Stationary {
        at: VertexId,
    },
    Solver,
}

impl RobberKind {
    pub fn build(&self, arena: &Arena, k: usize) -> Result<Box<dyn RobberStrategy>> {
        Ok(match self {
            RobberKind::Evader => {
                let c = arena.require_construction("the evader")?.clone();
                Box::new(Evader::with_tables(c, arena.tables()?))
            }
            RobberKind::Random { start } => Box::new(RandomRobber::new(*start)),
            RobberKind::Stationary { at } => Box::new(StationaryRobber { at: *at }),
            RobberKind::Solver => Box::new(SolverRobber::new(arena.solved(k)?)),
        })
    }
}

/// Parses `evader`, `random`, `random:<v>`, `stationary:<v>` and `solver`.
impl FromStr for RobberKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let bad = || Error::InvalidConfig(format!("unknown robber strategy {s:?}"));
        let vertex = |a: Option<&str>| -> Result<Option<VertexId>> {
            a.map(|a| a.parse::<u32>().map(VertexId).map_err(|_| bad())).transpose()
        };
        Ok(match name {
            "evader" => RobberKind::Evader,
            "random" => RobberKind::Random { start: vertex(arg)? },
            "stationary" => RobberKind::Stationary {
                at: vertex(arg)?.ok_or_else(bad)?,
            },
            "solver" => RobberKind::Solver,
            _ => return Err(bad()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_match, GameConfig, MatchOptions};
    use crate::gen::undirected_cycle;

    #[test]
    fn names_parse() {
        assert_eq!("hybrid:7".parse::<CopKind>().unwrap(), CopKind::Hybrid { fuzz: 7 });
        assert_eq!("sweep".parse::<CopKind>().unwrap(), CopKind::Sweep { constant: 16.0 });
        assert_eq!(
            "stationary:3".parse::<RobberKind>().unwrap(),
            RobberKind::Stationary { at: VertexId(3) }
        );
        assert!("stationary".parse::<RobberKind>().is_err());
        assert!("teleport".parse::<CopKind>().is_err());
    }

    #[test]
    fn kinds_round_trip_as_json() {
        let k: CopKind = serde_json::from_str(r#"{"kind":"greedy"}"#).unwrap();
        assert_eq!(k, CopKind::Greedy { placement: None });
        let s = serde_json::to_string(&CopKind::Hybrid { fuzz: 2 }).unwrap();
        assert_eq!(
            serde_json::from_str::<CopKind>(&s).unwrap(),
            CopKind::Hybrid { fuzz: 2 }
        );
    }

    #[test]
    fn arena_strategies_need_a_construction() {
        let e = undirected_cycle(6).unwrap();
        let arena = Arena::from_graph(e.graph, Some(e.rotation));
        assert!(RobberKind::Evader.build(&arena, 1).is_err());
        assert!(CopKind::Trap.build(&arena, 4).is_err());
    }

    #[test]
    fn solver_pair_plays_on_a_plain_graph() {
        let e = undirected_cycle(5).unwrap();
        let arena = Arena::from_graph(e.graph, None);
        let config = GameConfig::new(arena.graph.clone(), 2, Some(50)).unwrap();
        let mut cops = CopKind::Solver.build(&arena, 2).unwrap();
        let mut robber = RobberKind::Solver.build(&arena, 2).unwrap();
        let t = run_match(&config, cops.as_mut(), robber.as_mut(), MatchOptions::default());
        assert!(t.summary.outcome.is_capture());
    }

    #[test]
    fn arena_document_is_detected() {
        let c = Construction::assemble(ConstructionParams::new(30, 3, 4)).unwrap();
        let json = serde_json::to_string(&ArenaDocument::from_construction(&c)).unwrap();
        let arena = Arena::from_json(&json).unwrap();
        assert!(arena.construction.is_some());
        assert_eq!(arena.vertex_count(), c.vertex_count());
        let plain = GraphDocument::from_graph(&c.graph, None, None).to_json().unwrap();
        assert!(Arena::from_json(&plain).unwrap().construction.is_none());
    }
}
