//! Arc-and-node maps and their JSON form.

use serde::{Deserialize, Serialize};

use super::EngineError;

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub id: NodeId,
    pub x: f64,
    pub y: f64,
}

/// Undirected arc. `length` is the number of ticks needed to traverse it at speed 1.0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcSpec {
    pub a: NodeId,
    pub b: NodeId,
    pub length: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Neighbor {
    pub node: NodeId,
    pub length: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapDocument", into = "MapDocument")]
pub struct MapGraph {
    nodes: Vec<NodeSpec>,
    arcs: Vec<ArcSpec>,
    adjacency: Vec<Vec<Neighbor>>,
}

#[derive(Serialize, Deserialize)]
struct MapDocument {
    nodes: Vec<NodeSpec>,
    arcs: Vec<ArcSpec>,
}

impl TryFrom<MapDocument> for MapGraph {
    type Error = EngineError;

    fn try_from(doc: MapDocument) -> Result<Self, Self::Error> {
        MapGraph::new(doc.nodes, doc.arcs)
    }
}

impl From<MapGraph> for MapDocument {
    fn from(map: MapGraph) -> Self {
        MapDocument { nodes: map.nodes, arcs: map.arcs }
    }
}

impl MapGraph {
    /// Validates ids, arcs and connectivity. Neighbor lists are ordered by node id,
    /// which fixes what "the first arc from A" means.
    pub fn new(nodes: Vec<NodeSpec>, arcs: Vec<ArcSpec>) -> Result<Self, EngineError> {
        let n = nodes.len();
        if n < 2 {
            return Err(EngineError::InvalidMap("a map needs at least two nodes".into()));
        }
        for (i, node) in nodes.iter().enumerate() {
            if node.id != i {
                return Err(EngineError::InvalidMap(format!(
                    "node ids must be contiguous from 0, found {} at position {i}",
                    node.id
                )));
            }
        }
        let mut adjacency: Vec<Vec<Neighbor>> = vec![Vec::new(); n];
        for arc in &arcs {
            if arc.a >= n || arc.b >= n {
                return Err(EngineError::InvalidMap(format!("arc {}-{} names an unknown node", arc.a, arc.b)));
            }
            if arc.a == arc.b {
                return Err(EngineError::InvalidMap(format!("self-loop at node {}", arc.a)));
            }
            if arc.length == 0 {
                return Err(EngineError::InvalidMap(format!("arc {}-{} has zero length", arc.a, arc.b)));
            }
            if adjacency[arc.a].iter().any(|nb| nb.node == arc.b) {
                return Err(EngineError::InvalidMap(format!("duplicate arc {}-{}", arc.a, arc.b)));
            }
            adjacency[arc.a].push(Neighbor { node: arc.b, length: arc.length });
            adjacency[arc.b].push(Neighbor { node: arc.a, length: arc.length });
        }
        for list in &mut adjacency {
            list.sort_by_key(|nb| nb.node);
        }
        let map = MapGraph { nodes, arcs, adjacency };
        if !map.is_connected() {
            return Err(EngineError::InvalidMap("map is not connected".into()));
        }
        Ok(map)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[ArcSpec] {
        &self.arcs
    }

    pub fn neighbors(&self, node: NodeId) -> &[Neighbor] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn arc_length(&self, a: NodeId, b: NodeId) -> Option<u32> {
        self.adjacency
            .get(a)?
            .iter()
            .find(|nb| nb.node == b)
            .map(|nb| nb.length)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.nodes.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for nb in &self.adjacency[v] {
                if !seen[nb.node] {
                    seen[nb.node] = true;
                    stack.push(nb.node);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("map serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, EngineError> {
        serde_json::from_str(text).map_err(|e| EngineError::InvalidMap(e.to_string()))
    }

    /// Straight line of nodes `0 - 1 - ... - (n-1)` with the given arc lengths.
    pub fn line(lengths: &[u32]) -> Result<Self, EngineError> {
        let nodes = (0..=lengths.len())
            .map(|i| NodeSpec { id: i, x: i as f64 / lengths.len().max(1) as f64, y: 0.5 })
            .collect();
        let arcs = lengths
            .iter()
            .enumerate()
            .map(|(i, &length)| ArcSpec { a: i, b: i + 1, length })
            .collect();
        MapGraph::new(nodes, arcs)
    }
}
