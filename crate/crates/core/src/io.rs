//! JSON interchange for graphs and generated arenas.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::construction::{Admissibility, Construction, ConstructionParams, Unit, Vec3, VertexRole};
use crate::embedding::RotationSystem;
use crate::error::{Error, Result};
use crate::graph::Digraph;

/// `{n, arcs, rotation?, coords?}`. Floats round-trip bit-exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub n: usize,
    pub arcs: Vec<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec3>>,
}

impl GraphDocument {
    pub fn from_graph(g: &Digraph, rotation: Option<&RotationSystem>, coords: Option<&[Vec3]>) -> Self {
        GraphDocument {
            n: g.vertex_count(),
            arcs: g.arcs().iter().map(|&(a, b)| [a, b]).collect(),
            rotation: rotation.map(|r| r.as_lists().to_vec()),
            coords: coords.map(<[Vec3]>::to_vec),
        }
    }

    pub fn to_graph(&self) -> Result<Digraph> {
        Digraph::new(self.n, self.arcs.iter().map(|a| (a[0], a[1])).collect())
    }

    /// Graph plus its rotation system, checked against the edge set.
    pub fn to_embedded(&self) -> Result<(Digraph, Option<RotationSystem>)> {
        let g = self.to_graph()?;
        let rot = match &self.rotation {
            Some(r) => {
                let rot = RotationSystem::new(r.clone());
                rot.check_against(&g)?;
                Some(rot)
            }
            None => None,
        };
        if let Some(c) = &self.coords {
            if c.len() != self.n {
                return Err(Error::Format(format!("{} coords for {} vertices", c.len(), self.n)));
            }
        }
        Ok((g, rot))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// Output of `build`: the graph document flattened with role and unit tables.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArenaDocument {
    pub v: u32,
    pub params: ConstructionParams,
    pub admissibility: Admissibility,
    #[serde(flatten)]
    pub graph: GraphDocument,
    pub roles: Vec<VertexRole>,
    pub units: Vec<Unit>,
}

impl ArenaDocument {
    pub fn from_construction(c: &Construction) -> Self {
        ArenaDocument {
            v: 1,
            params: c.params,
            admissibility: c.params.admissible(),
            graph: GraphDocument::from_graph(&c.graph, Some(&c.rotation), Some(&c.coords)),
            roles: c.roles.clone(),
            units: c.units.clone(),
        }
    }

    /// Regenerates the arena and checks it against the stored arcs.
    pub fn to_construction(&self) -> Result<Construction> {
        let c = Construction::assemble(self.params)?;
        let arcs_match = c.graph.vertex_count() == self.graph.n
            && c.graph.arc_count() == self.graph.arcs.len()
            && c.graph
                .arcs()
                .iter()
                .zip(&self.graph.arcs)
                .all(|(&(a, b), s)| a == s[0] && b == s[1]);
        if !arcs_match {
            return Err(Error::Format("arena document does not match its parameters".into()));
        }
        Ok(c)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}
