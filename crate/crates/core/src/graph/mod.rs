//! Weighted sharing graphs.
//!
//! Node ids are dense integers `0..n` and double as the deterministic
//! tie-break priority used by the greedy engine. Every edge keeps its weight
//! both as a value and as an index ("level") into the graph's sorted weight
//! support, so tie comparisons are exact integer comparisons.

pub(crate) mod generators;
mod io;
pub mod locations;
pub(crate) mod spatial;

pub use generators::{
    caching_weight_model, generate, generate_geometric, generate_grid2d, generate_gnp,
    generate_line, ingest_caching_instance, Family, GeneratorSpec, WeightSource,
};
pub use io::GraphFile;
pub use locations::{parse_locations, read_locations, synthetic_locations, write_locations, LocationRecord};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::WeightModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    pub weight: f64,
    pub level: u16,
}

impl Edge {
    pub fn other(&self, node: usize) -> usize {
        if self.u as usize == node {
            self.v as usize
        } else {
            self.u as usize
        }
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.u as usize, self.v as usize)
    }
}

/// One adjacency entry: the neighbour and the index of the connecting edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbor {
    pub node: u32,
    pub edge: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    support: Vec<f64>,
    offsets: Vec<usize>,
    adjacency: Vec<Neighbor>,
    quantities: Option<Vec<u32>>,
    coords: Option<Vec<[f64; 2]>>,
}

impl WeightedGraph {
    /// Builds a graph from `(i, j, level)` triples over a sorted weight support.
    pub fn from_levels(n: usize, edges: Vec<(usize, usize, u16)>, support: Vec<f64>) -> Result<Self> {
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("weight support must be strictly increasing".into()));
        }
        let mut keys = Vec::with_capacity(edges.len());
        for &(i, j, level) in &edges {
            if i >= n || j >= n {
                return Err(Error::InvalidInput(format!("edge ({i}, {j}) references a node >= n = {n}")));
            }
            if i == j {
                return Err(Error::InvalidInput(format!("self-loop at node {i}")));
            }
            if level as usize >= support.len() {
                return Err(Error::InvalidInput(format!("edge ({i}, {j}) has level {level} outside the support")));
            }
            keys.push((i.min(j) as u64) << 32 | i.max(j) as u64);
        }
        keys.sort_unstable();
        if let Some(w) = keys.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!(
                "duplicate edge ({}, {})",
                w[0] >> 32,
                w[0] & 0xffff_ffff
            )));
        }
        Ok(Self::build(n, edges, support))
    }

    /// Builds a graph from `(i, j, weight)` triples; the support becomes the
    /// sorted set of distinct weights.
    pub fn from_weighted_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if edges.iter().any(|e| !e.2.is_finite() || e.2 < 0.0) {
            return Err(Error::InvalidInput("edge weights must be finite and non-negative".into()));
        }
        let mut support: Vec<f64> = edges.iter().map(|e| e.2).collect();
        support.sort_by(|a, b| a.total_cmp(b));
        support.dedup();
        let levelled = edges
            .iter()
            .map(|&(i, j, w)| {
                let level = support.binary_search_by(|s| s.total_cmp(&w)).expect("present");
                (i, j, level as u16)
            })
            .collect();
        Self::from_levels(n, levelled, support)
    }

    /// Builds with the weight model's values as the support.
    pub fn from_model_levels(n: usize, edges: Vec<(usize, usize, u16)>, model: &WeightModel) -> Result<Self> {
        Self::from_levels(n, edges, model.values().to_vec())
    }

    /// Caller guarantees the edge list is simple and in range.
    pub(crate) fn build(n: usize, edges: Vec<(usize, usize, u16)>, support: Vec<f64>) -> Self {
        let edges: Vec<Edge> = edges
            .into_iter()
            .map(|(i, j, level)| Edge {
                u: i as u32,
                v: j as u32,
                weight: support[level as usize],
                level,
            })
            .collect();
        let mut degree = vec![0usize; n + 1];
        for e in &edges {
            degree[e.u as usize + 1] += 1;
            degree[e.v as usize + 1] += 1;
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let offsets = degree;
        let mut fill = offsets.clone();
        let mut adjacency = vec![Neighbor { node: 0, edge: 0 }; offsets[n]];
        for (idx, e) in edges.iter().enumerate() {
            let (a, b) = (e.u as usize, e.v as usize);
            adjacency[fill[a]] = Neighbor { node: e.v, edge: idx as u32 };
            fill[a] += 1;
            adjacency[fill[b]] = Neighbor { node: e.u, edge: idx as u32 };
            fill[b] += 1;
        }
        WeightedGraph {
            n,
            edges,
            support,
            offsets,
            adjacency,
            quantities: None,
            coords: None,
        }
    }

    pub fn with_quantities(mut self, quantities: Vec<u32>) -> Result<Self> {
        if quantities.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "{} quantities for {} nodes",
                quantities.len(),
                self.n
            )));
        }
        if let Some(i) = quantities.iter().position(|q| *q == 0) {
            return Err(Error::InvalidInput(format!("node {i} has quantity 0")));
        }
        self.quantities = Some(quantities);
        Ok(self)
    }

    pub fn with_coords(mut self, coords: Vec<[f64; 2]>) -> Result<Self> {
        if coords.len() != self.n {
            return Err(Error::InvalidInput(format!("{} coordinates for {} nodes", coords.len(), self.n)));
        }
        if coords.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("coordinates must be finite".into()));
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn without_quantities(mut self) -> Self {
        self.quantities = None;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn neighbors(&self, node: usize) -> &[Neighbor] {
        &self.adjacency[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn quantities(&self) -> Option<&[u32]> {
        self.quantities.as_deref()
    }

    pub fn coords(&self) -> Option<&[[f64; 2]]> {
        self.coords.as_deref()
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            2.0 * self.edges.len() as f64 / self.n as f64
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Edge index connecting `a` and `b`, if any.
    pub fn find_edge(&self, a: usize, b: usize) -> Option<usize> {
        let (small, other) = if self.degree(a) <= self.degree(b) { (a, b) } else { (b, a) };
        self.neighbors(small)
            .iter()
            .find(|nb| nb.node as usize == other)
            .map(|nb| nb.edge as usize)
    }

    /// Union-find component label per node.
    pub fn components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.u as usize), find(&mut parent, e.v as usize));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        (0..self.n).map(|i| find(&mut parent, i)).collect()
    }

    pub fn is_forest(&self) -> bool {
        let labels = self.components();
        let roots = labels.iter().enumerate().filter(|(i, l)| *i == **l).count();
        self.edges.len() + roots == self.n
    }

    /// Fraction of nodes whose connected component contains a cycle.
    pub fn cyclic_component_fraction(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let labels = self.components();
        let mut nodes = vec![0usize; self.n];
        let mut edges = vec![0usize; self.n];
        for &l in &labels {
            nodes[l] += 1;
        }
        for e in &self.edges {
            edges[labels[e.u as usize]] += 1;
        }
        let cyclic: usize = (0..self.n).filter(|&r| nodes[r] > 0 && edges[r] >= nodes[r]).map(|r| nodes[r]).sum();
        cyclic as f64 / self.n as f64
    }

    /// If the graph is a single simple path covering every node, returns the
    /// edge indices in path order (starting from the lower-id endpoint).
    pub fn path_order(&self) -> Option<Vec<usize>> {
        if self.n < 2 || self.edges.len() != self.n - 1 {
            return None;
        }
        if (0..self.n).any(|i| self.degree(i) == 0 || self.degree(i) > 2) {
            return None;
        }
        let start = (0..self.n).find(|&i| self.degree(i) == 1)?;
        let mut order = Vec::with_capacity(self.n - 1);
        let mut prev_edge = usize::MAX;
        let mut node = start;
        loop {
            let next = self.neighbors(node).iter().find(|nb| nb.edge as usize != prev_edge);
            match next {
                Some(nb) => {
                    order.push(nb.edge as usize);
                    prev_edge = nb.edge as usize;
                    node = nb.node as usize;
                }
                None => break,
            }
            if order.len() > self.n {
                return None;
            }
        }
        (order.len() == self.n - 1).then_some(order)
    }

    /// Subgraph induced by `keep` (nodes relabelled in increasing original id
    /// order, so tie-break priorities are preserved). Returns the graph and
    /// the original id of every new node.
    pub fn induced(&self, keep: &[bool]) -> (WeightedGraph, Vec<usize>) {
        let mut new_id = vec![u32::MAX; self.n];
        let mut original = Vec::new();
        for (i, k) in keep.iter().enumerate() {
            if *k {
                new_id[i] = original.len() as u32;
                original.push(i);
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| keep[e.u as usize] && keep[e.v as usize])
            .map(|e| (new_id[e.u as usize] as usize, new_id[e.v as usize] as usize, e.level))
            .collect();
        let mut g = Self::build(original.len(), edges, self.support.clone());
        g.quantities = self.quantities.as_ref().map(|q| original.iter().map(|&i| q[i]).collect());
        g.coords = self.coords.as_ref().map(|c| original.iter().map(|&i| c[i]).collect());
        (g, original)
    }

    /// Relabels node `i` as `perm[i]`. `perm` must be a permutation of `0..n`.
    pub fn relabel(&self, perm: &[usize]) -> Result<WeightedGraph> {
        if perm.len() != self.n {
            return Err(Error::InvalidInput("permutation length differs from n".into()));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidInput("not a permutation".into()));
            }
        }
        let edges = self
            .edges
            .iter()
            .map(|e| (perm[e.u as usize], perm[e.v as usize], e.level))
            .collect();
        let mut g = Self::build(self.n, edges, self.support.clone());
        let inverse = {
            let mut inv = vec![0; self.n];
            for (i, &p) in perm.iter().enumerate() {
                inv[p] = i;
            }
            inv
        };
        g.quantities = self.quantities.as_ref().map(|q| inverse.iter().map(|&i| q[i]).collect());
        g.coords = self.coords.as_ref().map(|c| inverse.iter().map(|&i| c[i]).collect());
        Ok(g)
    }
}
