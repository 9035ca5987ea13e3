//! The cubic Cayley graph `Cay(PSU₃(q), S)` built explicitly at small q.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gf::Field;
use crate::mat3::Mat3;

/// Largest q built without an explicit override.
pub const DEFAULT_MAX_Q: u32 = 5;

/// Least matrix among the central-scalar multiples of `m`.
pub fn canonical_key(f: &Field, m: &Mat3) -> Mat3 {
    f.central_scalars().iter().map(|&c| m.scale(c, f)).min().unwrap_or(*m)
}

/// PSU₃(q) elements indexed in breadth-first order from the identity.
#[derive(Clone, Debug)]
pub struct GroupEnumeration {
    pub elements: Vec<Mat3>,
    pub index: HashMap<Mat3, u32>,
    /// `neighbors[g][k]` is the index of `S_k · g`
    pub neighbors: Vec<[u32; 3]>,
}

impl GroupEnumeration {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, f: &Field, m: &Mat3) -> Option<u32> {
        self.index.get(&canonical_key(f, m)).copied()
    }
}

/// Closure of the identity under left multiplication by `gens`.
/// Fails with `CountMismatch` if the size differs from `expected`.
pub fn enumerate_group(f: &Field, gens: &[Mat3; 3], expected: u128) -> Result<GroupEnumeration> {
    let scalars = f.central_scalars();
    let key = |m: &Mat3| scalars.iter().map(|&c| m.scale(c, f)).min().unwrap_or(*m);
    let id = Mat3::identity(f);
    let mut elements = vec![key(&id)];
    let mut index = HashMap::from([(elements[0], 0u32)]);
    let mut neighbors = Vec::new();
    let mut queue = VecDeque::from([0u32]);
    while let Some(g) = queue.pop_front() {
        let gm = elements[g as usize];
        let mut row = [0u32; 3];
        for (slot, s) in row.iter_mut().zip(gens) {
            let k = key(&s.mul(&gm, f));
            *slot = match index.get(&k) {
                Some(&i) => i,
                None => {
                    let i = elements.len() as u32;
                    elements.push(k);
                    index.insert(k, i);
                    queue.push_back(i);
                    i
                }
            };
            if elements.len() as u128 > expected {
                return Err(Error::CountMismatch { found: elements.len() as u128, expected });
            }
        }
        neighbors.push(row);
    }
    if elements.len() as u128 != expected {
        return Err(Error::CountMismatch { found: elements.len() as u128, expected });
    }
    Ok(GroupEnumeration { elements, index, neighbors })
}

/// Checks that `S` consists of three distinct non-identity projective involutions.
pub fn validate_connection_set(f: &Field, gens: &[Mat3; 3]) -> Result<()> {
    for (k, s) in gens.iter().enumerate() {
        if s.is_central(f) {
            return Err(Error::ConnectionSet(format!("element {k} is the identity")));
        }
        if !s.mul(s, f).is_central(f) {
            return Err(Error::ConnectionSet(format!("element {k} is not an involution")));
        }
    }
    for i in 0..3 {
        for j in i + 1..3 {
            if gens[i].projectively_equal(&gens[j], f) {
                return Err(Error::ConnectionSet(format!("elements {i} and {j} coincide")));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyGraph {
    pub vertex_count: usize,
    /// sorted, `u < v`
    pub edges: Vec<(u32, u32)>,
    pub vertex_labels: Vec<Mat3>,
}

impl CayleyGraph {
    pub fn from_edges(vertex_count: usize, mut edges: Vec<(u32, u32)>) -> Self {
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        edges.dedup();
        CayleyGraph { vertex_count, edges, vertex_labels: Vec::new() }
    }

    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency().iter().map(Vec::len).collect()
    }

    pub fn is_regular(&self, k: usize) -> bool {
        self.degrees().iter().all(|&d| d == k)
    }

    pub fn is_simple(&self) -> bool {
        self.edges.iter().all(|&(u, v)| u < v) && self.edges.windows(2).all(|w| w[0] != w[1])
    }

    /// Size of the component containing vertex 0.
    pub fn component_size(&self) -> usize {
        if self.vertex_count == 0 {
            return 0;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertex_count];
        seen[0] = true;
        let mut queue = VecDeque::from([0u32]);
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u as usize] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.component_size() == self.vertex_count
    }
}

/// Builds the graph with edges `{g, s·g}` after validating `S`.
pub fn build_graph(f: &Field, gens: &[Mat3; 3], expected: u128) -> Result<(CayleyGraph, GroupEnumeration)> {
    validate_connection_set(f, gens)?;
    let group = enumerate_group(f, gens, expected)?;
    let mut edges: Vec<(u32, u32)> = group
        .neighbors
        .par_iter()
        .enumerate()
        .flat_map_iter(|(g, row)| {
            let g = g as u32;
            row.iter().filter(move |&&h| g < h).map(move |&h| (g, h))
        })
        .collect();
    edges.par_sort_unstable();
    let graph = CayleyGraph { vertex_count: group.len(), edges, vertex_labels: group.elements.clone() };
    Ok((graph, group))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    EdgeList,
    Adjacency,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge-list" => Ok(ExportFormat::EdgeList),
            "adjacency" => Ok(ExportFormat::Adjacency),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

/// Edge list: `p edge N M`, then sorted `u v` lines. Adjacency: `p adj N M`,
/// then one line per vertex listing its sorted neighbors.
pub fn export_graph(g: &CayleyGraph, format: ExportFormat) -> String {
    let mut out = String::new();
    match format {
        ExportFormat::EdgeList => {
            let _ = writeln!(out, "p edge {} {}", g.vertex_count, g.edges.len());
            for &(u, v) in &g.edges {
                let _ = writeln!(out, "{u} {v}");
            }
        }
        ExportFormat::Adjacency => {
            let _ = writeln!(out, "p adj {} {}", g.vertex_count, g.edges.len());
            for nbrs in g.adjacency() {
                let line: Vec<String> = nbrs.iter().map(u32::to_string).collect();
                let _ = writeln!(out, "{}", line.join(" "));
            }
        }
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<CayleyGraph> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split_whitespace().collect();
    let (n, m) = match header.as_slice() {
        ["p", "edge", n, m] => (
            n.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?,
            m.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?,
        ),
        _ => return Err(Error::Parse("missing 'p edge N M' header".into())),
    };
    let mut edges = Vec::with_capacity(m);
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let mut it = line.split_whitespace().map(|t| t.parse::<u32>());
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(u)), Some(Ok(v)), None) if (u as usize) < n && (v as usize) < n => edges.push((u, v)),
            _ => return Err(Error::Parse(format!("bad edge line '{line}'"))),
        }
    }
    if edges.len() != m {
        return Err(Error::Parse(format!("header declares {m} edges, found {}", edges.len())));
    }
    Ok(CayleyGraph { vertex_count: n, edges, vertex_labels: Vec::new() })
}

pub fn content_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TranslationWitness {
    pub translations: usize,
    pub sampled_edges: usize,
    pub preserved: bool,
}

/// Checks that `g ↦ g·h` maps sampled edges to edges for random `h`.
pub fn right_translation_witness(
    f: &Field,
    graph: &CayleyGraph,
    group: &GroupEnumeration,
    translations: usize,
    samples: usize,
    seed: u64,
) -> TranslationWitness {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edge_set: HashSet<(u32, u32)> = graph.edges.iter().copied().collect();
    let image = |v: u32, h: &Mat3| group.index_of(f, &group.elements[v as usize].mul(h, f));
    let mut preserved = !graph.edges.is_empty();
    for _ in 0..translations {
        let h = group.elements[rng.gen_range(0..group.len())];
        for _ in 0..samples {
            let (u, v) = graph.edges[rng.gen_range(0..graph.edges.len())];
            let ok = match (image(u, &h), image(v, &h)) {
                (Some(a), Some(b)) => edge_set.contains(&(a.min(b), a.max(b))),
                _ => false,
            };
            preserved &= ok;
        }
    }
    TranslationWitness { translations, sampled_edges: samples, preserved }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphSummary {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub regular_degree: Option<usize>,
    pub simple: bool,
    pub connected: bool,
    pub edge_list_sha256: String,
    pub translation_witness: TranslationWitness,
}

/// Builds, checks and hashes the graph. Gated to `q <= DEFAULT_MAX_Q` unless `allow_large`.
pub fn graph_summary(f: &Field, gens: &[Mat3; 3], expected: u128, allow_large: bool) -> Result<(GraphSummary, CayleyGraph)> {
    if f.q() > DEFAULT_MAX_Q && !allow_large {
        return Err(Error::PreconditionUnmet(format!(
            "explicit graph construction is limited to q <= {DEFAULT_MAX_Q} without override"
        )));
    }
    let (graph, group) = build_graph(f, gens, expected)?;
    let degrees = graph.degrees();
    let regular_degree = degrees.first().copied().filter(|&d| degrees.iter().all(|&e| e == d));
    let text = export_graph(&graph, ExportFormat::EdgeList);
    let summary = GraphSummary {
        vertex_count: graph.vertex_count,
        edge_count: graph.edges.len(),
        regular_degree,
        simple: graph.is_simple(),
        connected: graph.is_connected(),
        edge_list_sha256: content_hash(text.as_bytes()),
        translation_witness: right_translation_witness(f, &graph, &group, 10, 10_000, 0),
    };
    Ok((summary, graph))
}
