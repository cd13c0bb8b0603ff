use rand::Rng;

use crate::engine::{ArcSpec, MapGraph, NodeSpec};

pub const MIN_NODES: usize = 8;
pub const MAX_NODES: usize = 10;
const MAX_DEGREE: usize = 6;

fn distance(a: &NodeSpec, b: &NodeSpec) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
}

fn arc_length(a: &NodeSpec, b: &NodeSpec) -> u32 {
    ((10.0 * distance(a, b)).ceil() as u32).max(2)
}

struct Builder {
    nodes: Vec<NodeSpec>,
    adjacent: Vec<Vec<bool>>,
    degree: Vec<usize>,
    arcs: Vec<ArcSpec>,
}

impl Builder {
    fn try_link(&mut self, a: usize, b: usize, cap: bool) -> bool {
        if a == b || self.adjacent[a][b] {
            return false;
        }
        if cap && (self.degree[a] >= MAX_DEGREE || self.degree[b] >= MAX_DEGREE) {
            return false;
        }
        self.adjacent[a][b] = true;
        self.adjacent[b][a] = true;
        self.degree[a] += 1;
        self.degree[b] += 1;
        let length = arc_length(&self.nodes[a], &self.nodes[b]);
        self.arcs.push(ArcSpec { a: a.min(b), b: a.max(b), length });
        true
    }

    /// Other nodes ordered by distance from `v`, ties by id.
    fn by_distance(&self, v: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.nodes.len()).filter(|&u| u != v).collect();
        order.sort_by(|&a, &b| {
            distance(&self.nodes[v], &self.nodes[a])
                .total_cmp(&distance(&self.nodes[v], &self.nodes[b]))
                .then(a.cmp(&b))
        });
        order
    }

    fn components(&self) -> Vec<usize> {
        let n = self.nodes.len();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = next;
            while let Some(v) = stack.pop() {
                for u in 0..n {
                    if self.adjacent[v][u] && comp[u] == usize::MAX {
                        comp[u] = next;
                        stack.push(u);
                    }
                }
            }
            next += 1;
        }
        comp
    }
}

/// Random planar-ish map: nodes uniform in the unit square, each linked to its 2 or 3
/// nearest neighbours (degree capped at 6), then the closest pair across components is
/// linked until the graph is connected. Arc length is `ceil(10 * distance)`, at least 2.
pub fn generate_map<R: Rng + ?Sized>(rng: &mut R, node_count: usize) -> MapGraph {
    assert!(
        (MIN_NODES..=MAX_NODES).contains(&node_count),
        "maps have between {MIN_NODES} and {MAX_NODES} nodes"
    );
    let nodes: Vec<NodeSpec> = (0..node_count)
        .map(|id| NodeSpec { id, x: rng.gen::<f64>(), y: rng.gen::<f64>() })
        .collect();
    let mut b = Builder {
        adjacent: vec![vec![false; node_count]; node_count],
        degree: vec![0; node_count],
        arcs: Vec::new(),
        nodes,
    };
    for v in 0..node_count {
        let wanted = rng.gen_range(2..=3);
        for u in b.by_distance(v) {
            if b.degree[v] >= wanted {
                break;
            }
            b.try_link(v, u, true);
        }
    }
    loop {
        let comp = b.components();
        if comp.iter().all(|&c| c == 0) {
            break;
        }
        let mut best: Option<(f64, usize, usize)> = None;
        for cap in [true, false] {
            for v in 0..node_count {
                for u in v + 1..node_count {
                    if comp[v] == comp[u] {
                        continue;
                    }
                    if cap && (b.degree[v] >= MAX_DEGREE || b.degree[u] >= MAX_DEGREE) {
                        continue;
                    }
                    let d = distance(&b.nodes[v], &b.nodes[u]);
                    if best.is_none_or(|(bd, _, _)| d < bd) {
                        best = Some((d, v, u));
                    }
                }
            }
            if best.is_some() {
                break;
            }
        }
        let (_, v, u) = best.expect("disconnected graph has a crossing pair");
        b.try_link(v, u, false);
    }
    b.arcs.sort_by_key(|a| (a.a, a.b));
    MapGraph::new(b.nodes, b.arcs).expect("generated maps are valid")
}
