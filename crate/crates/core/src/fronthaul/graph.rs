//! Index-coding conflict graphs and their colorings.
//!
//! A vertex is a packet wanted by one or more ENs. Two vertices may share a
//! coded (XOR) transmission only if every EN wanting one of them already
//! caches the other; otherwise they conflict. A proper coloring therefore
//! yields one coded transmission per color.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::cache::CacheState;
use crate::error::{Error, Result};

use super::{DeliveryRequirement, Packet};

/// Largest graph accepted by [`optimal_color_bruteforce`].
pub const BRUTE_FORCE_VERTEX_CAP: usize = 12;

/// Undirected simple graph on vertices `0..n`.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    matrix: Vec<bool>,
    adj: Vec<Vec<usize>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.matrix == other.matrix
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            matrix: vec![false; n * n],
            adj: vec![Vec::new(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "self loops are not allowed");
        if !self.matrix[u * self.n + v] {
            self.matrix[u * self.n + v] = true;
            self.matrix[v * self.n + u] = true;
            self.adj[u].push(v);
            self.adj[v].push(u);
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.matrix[u * self.n + v]
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edge-list dump: the vertex count on the first line, then one `u v`
    /// line (0-based, `u < v`) per edge in lexicographic order.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.has_edge(u, v) {
                    let _ = writeln!(out, "{u} {v}");
                }
            }
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let n: usize = lines
            .next()
            .and_then(|h| h.parse().ok())
            .ok_or_else(|| Error::param("graph", "missing vertex-count header"))?;
        let mut g = Graph::new(n);
        for line in lines {
            let mut it = line.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) if u < n && v < n && u != v => g.add_edge(u, v),
                _ => return Err(Error::param("graph", format!("bad edge line {line:?}"))),
            }
        }
        Ok(g)
    }
}

/// One conflict-graph vertex: a packet and the ENs that want it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub packet: Packet,
    /// Sorted, 1-based EN indices. A single EN before merging.
    pub ens: Vec<usize>,
}

/// Conflict graph over the fronthaul transfer requirements. Vertices are
/// kept in lexicographic (EN, file, subfile) order, so vertex index doubles
/// as the tie-break order for greedy coloring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictGraph {
    vertices: Vec<Vertex>,
    graph: Graph,
}

impl ConflictGraph {
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Collapses vertices carrying the same packet into one vertex whose
    /// conflicts are the union of its members' conflicts.
    pub fn merge_identical_packets(&self) -> ConflictGraph {
        let mut groups: BTreeMap<Packet, Vec<usize>> = BTreeMap::new();
        for (idx, v) in self.vertices.iter().enumerate() {
            groups.entry(v.packet).or_default().push(idx);
        }
        let mut group_of = vec![0usize; self.vertices.len()];

        let mut merged: Vec<(Vertex, Vec<usize>)> = groups
            .into_iter()
            .map(|(packet, members)| {
                let mut ens: Vec<usize> = members
                    .iter()
                    .flat_map(|&m| self.vertices[m].ens.iter().copied())
                    .collect();
                ens.sort_unstable();
                ens.dedup();
                (Vertex { packet, ens }, members)
            })
            .collect();
        merged.sort_by_key(|(v, _)| (v.ens[0], v.packet));
        for (new_idx, (_, members)) in merged.iter().enumerate() {
            for &m in members {
                group_of[m] = new_idx;
            }
        }

        let mut graph = Graph::new(merged.len());
        for u in 0..self.vertices.len() {
            for &v in self.graph.neighbors(u) {
                let (gu, gv) = (group_of[u], group_of[v]);
                if gu != gv {
                    graph.add_edge(gu, gv);
                }
            }
        }
        ConflictGraph {
            vertices: merged.into_iter().map(|(v, _)| v).collect(),
            graph,
        }
    }
}

/// Builds the conflict graph of `req`: one vertex per (EN, packet) in the
/// requirement. Vertices `(i1, p1)` and `(i2, p2)` conflict iff `p1 != p2`
/// and not both `i1` caches `p2` and `i2` caches `p1`.
pub fn build_conflict_graph(req: &DeliveryRequirement, cache: &CacheState) -> ConflictGraph {
    let vertices: Vec<Vertex> = req
        .transfers()
        .iter()
        .map(|&(i, f, l)| Vertex {
            packet: Packet {
                file: f,
                subfile: l,
            },
            ens: vec![i],
        })
        .collect();
    let mut graph = Graph::new(vertices.len());
    for (a, va) in vertices.iter().enumerate() {
        let (ia, pa) = (va.ens[0], va.packet);
        for (b, vb) in vertices.iter().enumerate().skip(a + 1) {
            let (ib, pb) = (vb.ens[0], vb.packet);
            if pa == pb {
                continue;
            }
            let side_info =
                cache.has(ia, pb.file, pb.subfile) && cache.has(ib, pa.file, pa.subfile);
            if !side_info {
                graph.add_edge(a, b);
            }
        }
    }
    ConflictGraph { vertices, graph }
}

/// A vertex coloring with colors `0..count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub colors: Vec<usize>,
    pub count: usize,
}

impl Coloring {
    pub fn is_proper(&self, graph: &Graph) -> bool {
        (0..graph.len()).all(|u| {
            graph
                .neighbors(u)
                .iter()
                .all(|&v| self.colors[u] != self.colors[v])
        })
    }

    /// Vertex indices grouped by color.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.count];
        for (v, &c) in self.colors.iter().enumerate() {
            classes[c].push(v);
        }
        classes
    }
}

/// First-fit greedy coloring, visiting vertices by decreasing degree with
/// ties broken by vertex index.
pub fn greedy_color(graph: &Graph) -> Coloring {
    let n = graph.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&u| (std::cmp::Reverse(graph.degree(u)), u));

    const UNSET: usize = usize::MAX;
    let mut colors = vec![UNSET; n];
    let mut count = 0;
    let mut taken: Vec<bool> = Vec::new();
    for &u in &order {
        taken.clear();
        taken.resize(count + 1, false);
        for &v in graph.neighbors(u) {
            if colors[v] != UNSET {
                taken[colors[v]] = true;
            }
        }
        let c = taken.iter().position(|&t| !t).unwrap_or(count);
        colors[u] = c;
        count = count.max(c + 1);
    }
    Coloring { colors, count }
}

/// Exact chromatic number by backtracking. Refuses graphs above
/// [`BRUTE_FORCE_VERTEX_CAP`] vertices.
pub fn optimal_color_bruteforce(graph: &Graph) -> Result<usize> {
    let n = graph.len();
    if n > BRUTE_FORCE_VERTEX_CAP {
        return Err(Error::TooLarge {
            vertices: n,
            cap: BRUTE_FORCE_VERTEX_CAP,
        });
    }
    if n == 0 {
        return Ok(0);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&u| std::cmp::Reverse(graph.degree(u)));

    fn extend(
        graph: &Graph,
        order: &[usize],
        colors: &mut [usize],
        pos: usize,
        used: usize,
        k: usize,
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let u = order[pos];
        // A fresh color is only tried once: colors are interchangeable.
        for c in 0..k.min(used + 1) {
            if graph.neighbors(u).iter().all(|&v| colors[v] != c) {
                colors[u] = c;
                if extend(graph, order, colors, pos + 1, used.max(c + 1), k) {
                    return true;
                }
                colors[u] = usize::MAX;
            }
        }
        false
    }

    for k in 1..=n {
        let mut colors = vec![usize::MAX; n];
        if extend(graph, &order, &mut colors, 0, 0, k) {
            return Ok(k);
        }
    }
    Ok(n)
}

/// Checks that every color class can be sent as one coded transmission:
/// each EN in the class caches every other packet of the class.
pub fn is_decodable(graph: &ConflictGraph, coloring: &Coloring, cache: &CacheState) -> bool {
    coloring.classes().iter().all(|class| {
        class.iter().all(|&u| {
            let vu = &graph.vertices()[u];
            class.iter().filter(|&&w| w != u).all(|&w| {
                let pw = graph.vertices()[w].packet;
                pw == vu.packet || vu.ens.iter().all(|&i| cache.has(i, pw.file, pw.subfile))
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    #[test]
    fn independent_set_needs_one_color() {
        let g = Graph::new(5);
        let c = greedy_color(&g);
        assert_eq!(c.count, 1);
        assert_eq!(optimal_color_bruteforce(&Graph::new(4)).unwrap(), 1);
    }

    #[test]
    fn triangle_needs_three() {
        let g = complete(3);
        assert_eq!(optimal_color_bruteforce(&g).unwrap(), 3);
        assert_eq!(greedy_color(&g).count, 3);
    }

    #[test]
    fn odd_cycle_and_bipartite() {
        let mut c5 = Graph::new(5);
        for u in 0..5 {
            c5.add_edge(u, (u + 1) % 5);
        }
        assert_eq!(optimal_color_bruteforce(&c5).unwrap(), 3);
        let mut c6 = Graph::new(6);
        for u in 0..6 {
            c6.add_edge(u, (u + 1) % 6);
        }
        assert_eq!(optimal_color_bruteforce(&c6).unwrap(), 2);
        // Petersen graph: chromatic number 3.
        let mut p = Graph::new(10);
        for u in 0..5 {
            p.add_edge(u, (u + 1) % 5);
            p.add_edge(u, u + 5);
            p.add_edge(5 + u, 5 + (u + 2) % 5);
        }
        assert_eq!(optimal_color_bruteforce(&p).unwrap(), 3);
        assert!(greedy_color(&p).is_proper(&p));
    }

    #[test]
    fn brute_force_cap() {
        assert!(matches!(
            optimal_color_bruteforce(&Graph::new(13)),
            Err(Error::TooLarge {
                vertices: 13,
                cap: 12
            })
        ));
        assert_eq!(optimal_color_bruteforce(&complete(12)).unwrap(), 12);
    }

    #[test]
    fn edge_list_round_trip() {
        let mut g = Graph::new(4);
        g.add_edge(0, 1);
        g.add_edge(2, 3);
        g.add_edge(1, 3);
        let text = g.to_edge_list();
        assert_eq!(text, "4\n0 1\n1 3\n2 3\n");
        assert_eq!(Graph::from_edge_list(&text).unwrap(), g);
        assert!(Graph::from_edge_list("2\n0 2\n").is_err());
        assert!(Graph::from_edge_list("").is_err());
    }
}
