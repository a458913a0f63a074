use std::collections::VecDeque;

use petgraph::graph::{NodeIndex, UnGraph};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::SqueezeParam;

/// One bond of the graph, read from or written to an edge list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub u: usize,
    pub v: usize,
    pub r: f64,
}

/// Undirected multigraph whose edges carry two-mode squeezing parameters.
#[derive(Debug, Clone)]
pub struct BondGraph {
    g: UnGraph<(), SqueezeParam>,
}

impl BondGraph {
    pub fn new(num_vertices: usize) -> Self {
        let mut g = UnGraph::with_capacity(num_vertices, 0);
        for _ in 0..num_vertices {
            g.add_node(());
        }
        BondGraph { g }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, r: SqueezeParam) -> Result<()> {
        let n = self.num_vertices();
        if u >= n || v >= n {
            return Err(Error::invalid(format!("edge ({u}, {v}) out of range for {n} vertices")));
        }
        if u == v {
            return Err(Error::invalid(format!("self-loop at vertex {u}")));
        }
        if !(r.r() > 0.0) {
            return Err(Error::invalid(format!("bond ({u}, {v}) needs r > 0, got {}", r.r())));
        }
        self.g.add_edge(NodeIndex::new(u), NodeIndex::new(v), r);
        Ok(())
    }

    pub fn path(n: usize, r: SqueezeParam) -> Result<Self> {
        let mut g = BondGraph::new(n);
        for v in 1..n {
            g.add_edge(v - 1, v, r)?;
        }
        Ok(g)
    }

    /// `width × height` square grid; vertex `(x, y)` has index `y·width + x`.
    pub fn grid(width: usize, height: usize, r: SqueezeParam) -> Result<Self> {
        let mut g = BondGraph::new(width * height);
        for y in 0..height {
            for x in 0..width {
                let v = y * width + x;
                if x + 1 < width {
                    g.add_edge(v, v + 1, r)?;
                }
                if y + 1 < height {
                    g.add_edge(v, v + width, r)?;
                }
            }
        }
        Ok(g)
    }

    pub fn complete(n: usize, r: SqueezeParam) -> Result<Self> {
        let mut g = BondGraph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v, r)?;
            }
        }
        Ok(g)
    }

    /// Builds a graph from edge records; the vertex count is one past the
    /// largest index.
    pub fn from_edges(edges: &[EdgeRecord]) -> Result<Self> {
        let n = edges.iter().map(|e| e.u.max(e.v) + 1).max().unwrap_or(0);
        let mut g = BondGraph::new(n);
        for e in edges {
            g.add_edge(e.u, e.v, SqueezeParam::new(e.r)?)?;
        }
        Ok(g)
    }

    /// One JSON object `{"u":..,"v":..,"r":..}` per line. Blank lines and
    /// lines starting with `#` are skipped; repeated lines add parallel bonds.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let e: EdgeRecord =
                serde_json::from_str(line).map_err(|e| Error::Parse(format!("edge list line {}: {e}", lineno + 1)))?;
            edges.push(e);
        }
        Self::from_edges(&edges)
    }

    pub fn to_edge_list(&self) -> String {
        self.edges()
            .map(|e| serde_json::to_string(&e).expect("plain record") + "\n")
            .collect()
    }

    pub fn num_vertices(&self) -> usize {
        self.g.node_count()
    }

    pub fn num_edges(&self) -> usize {
        self.g.edge_count()
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeRecord> + '_ {
        self.g.raw_edges().iter().map(|e| EdgeRecord {
            u: e.source().index(),
            v: e.target().index(),
            r: e.weight.r(),
        })
    }

    /// Neighbours of `v` with the bond parameter, one entry per parallel bond.
    pub fn bonds(&self, v: usize) -> impl Iterator<Item = (usize, SqueezeParam)> + '_ {
        use petgraph::visit::EdgeRef;
        let node = NodeIndex::new(v);
        self.g.edges(node).map(move |e| {
            let other = if e.source() == node { e.target() } else { e.source() };
            (other.index(), *e.weight())
        })
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.num_vertices() {
            return Err(Error::invalid(format!("vertex {v} out of range for {} vertices", self.num_vertices())));
        }
        Ok(())
    }

    /// BFS distances from `a`; unreachable vertices are `None`.
    pub fn distances_from(&self, a: usize) -> Result<Vec<Option<usize>>> {
        Ok(self.bfs(a)?.0)
    }

    fn bfs(&self, a: usize) -> Result<(Vec<Option<usize>>, Vec<Option<usize>>)> {
        self.check_vertex(a)?;
        let n = self.num_vertices();
        let mut dist = vec![None; n];
        let mut parent = vec![None; n];
        dist[a] = Some(0);
        let mut queue = VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued vertices have a distance");
            // Deterministic order: visit neighbours by index.
            let mut nb: Vec<usize> = self.bonds(u).map(|(v, _)| v).collect();
            nb.sort_unstable();
            nb.dedup();
            for v in nb {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        Ok((dist, parent))
    }
}

/// Shortest-path distance with one witness path (`a` first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphDistance {
    /// `None` when `b` is unreachable from `a`.
    pub distance: Option<usize>,
    pub path: Vec<usize>,
}

pub fn graph_distance(g: &BondGraph, a: usize, b: usize) -> Result<GraphDistance> {
    g.check_vertex(b)?;
    let (dist, parent) = g.bfs(a)?;
    let Some(d) = dist[b] else {
        return Ok(GraphDistance {
            distance: None,
            path: Vec::new(),
        });
    };
    let mut path = vec![b];
    let mut cur = b;
    while let Some(p) = parent[cur] {
        path.push(p);
        cur = p;
    }
    path.reverse();
    debug_assert_eq!(path.len(), d + 1);
    Ok(GraphDistance {
        distance: Some(d),
        path,
    })
}

/// Ordered regions `R_A = R_0, R_1, …, R_d = R_B` along a shortest path.
///
/// Region `i < d` is the set of vertices at BFS distance `i` from `a`; the
/// last region collects every reachable vertex at distance `≥ d`. An edge can
/// only join vertices whose distances differ by at most one, so only
/// consecutive regions touch, on any connected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionPartition {
    pub regions: Vec<Vec<usize>>,
    pub path: Vec<usize>,
    /// Vertices in other connected components.
    pub unassigned: Vec<usize>,
}

impl RegionPartition {
    pub fn num_regions(&self) -> usize {
        self.regions.len()
    }

    /// The same partition read from the other end.
    pub fn reversed(&self) -> RegionPartition {
        let mut regions = self.regions.clone();
        regions.reverse();
        let mut path = self.path.clone();
        path.reverse();
        RegionPartition {
            regions,
            path,
            unassigned: self.unassigned.clone(),
        }
    }

    pub fn region_of(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for (i, reg) in self.regions.iter().enumerate() {
            for &v in reg {
                out[v] = Some(i);
            }
        }
        out
    }

    /// Disjointness, path coverage and consecutive-only adjacency.
    pub fn verify(&self, g: &BondGraph) -> Result<()> {
        let n = g.num_vertices();
        let mut count = vec![0usize; n];
        for &v in self.regions.iter().flatten() {
            count[v] += 1;
        }
        if let Some(v) = (0..n).find(|&v| count[v] > 1) {
            return Err(Error::Internal(format!("vertex {v} lies in several regions")));
        }
        let region = self.region_of(n);
        for (i, &p) in self.path.iter().enumerate() {
            if region[p] != Some(i) {
                return Err(Error::Internal(format!("path vertex {p} is not in region {i}")));
            }
        }
        for e in g.edges() {
            match (region[e.u], region[e.v]) {
                (Some(i), Some(j)) if i.abs_diff(j) > 1 => {
                    return Err(Error::Internal(format!(
                        "edge ({}, {}) joins non-consecutive regions {i} and {j}",
                        e.u, e.v
                    )));
                }
                (Some(_), None) | (None, Some(_)) => {
                    return Err(Error::Internal(format!("edge ({}, {}) leaves the partition", e.u, e.v)));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

pub fn partition_along_path(g: &BondGraph, a: usize, b: usize) -> Result<RegionPartition> {
    let gd = graph_distance(g, a, b)?;
    let Some(d) = gd.distance else {
        return Err(Error::invalid(format!("vertices {a} and {b} are not connected")));
    };
    let dist = g.distances_from(a)?;
    let mut regions = vec![Vec::new(); d + 1];
    let mut unassigned = Vec::new();
    for (v, dv) in dist.iter().enumerate() {
        match dv {
            Some(k) => regions[(*k).min(d)].push(v),
            None => unassigned.push(v),
        }
    }
    let part = RegionPartition {
        regions,
        path: gd.path,
        unassigned,
    };
    part.verify(g)?;
    Ok(part)
}
