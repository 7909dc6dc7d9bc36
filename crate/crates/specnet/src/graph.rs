//! Undirected weighted graph with dense node ids `0..n`.
//!
//! Each undirected edge is stored once with `i < j`; weighted degrees and
//! link counts are precomputed at construction and the value is immutable
//! afterwards, so it can be shared freely across threads.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// One undirected edge, canonicalized so `i < j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub i: u32,
    pub j: u32,
    pub w: f64,
}

/// Immutable undirected weighted graph.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    /// Weighted degree d_i = sum of incident edge weights.
    degree: Vec<f64>,
    /// Unweighted link count k_i.
    link_count: Vec<u32>,
    /// Neighbor lists with weights, both directions.
    adj: Vec<Vec<(u32, f64)>>,
}

/// Degree summary used for the k_min^2 vs k_ave applicability condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegreeStats {
    pub k_min: usize,
    pub k_ave: f64,
    pub d_min: f64,
    pub d_ave: f64,
    /// k_min^2 / k_ave (0 for edgeless graphs).
    pub ratio: f64,
}

impl WeightedGraph {
    /// Builds a graph from an edge list. Endpoint order within a pair does
    /// not matter; self-loops, duplicates, out-of-range ids and non-positive
    /// weights are rejected. Isolated nodes are allowed here — operations
    /// that need positive degrees (the normalized Laplacian, random walks)
    /// reject them at their own boundary.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n == 0 {
            return Err(Error::Config("node count must be positive".into()));
        }
        let mut list: Vec<Edge> = Vec::new();
        for (a, b, w) in edges {
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            if a >= n {
                return Err(Error::NodeOutOfRange { id: a, n });
            }
            if b >= n {
                return Err(Error::NodeOutOfRange { id: b, n });
            }
            if !(w > 0.0) {
                return Err(Error::NonPositiveWeight { i: a, j: b, w });
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            list.push(Edge {
                i: i as u32,
                j: j as u32,
                w,
            });
        }
        list.sort_by_key(|e| (e.i, e.j));
        for pair in list.windows(2) {
            if pair[0].i == pair[1].i && pair[0].j == pair[1].j {
                return Err(Error::DuplicateEdge(pair[0].i as usize, pair[0].j as usize));
            }
        }

        let mut degree = vec![0.0; n];
        let mut link_count = vec![0u32; n];
        let mut adj = vec![Vec::new(); n];
        for e in &list {
            let (i, j) = (e.i as usize, e.j as usize);
            degree[i] += e.w;
            degree[j] += e.w;
            link_count[i] += 1;
            link_count[j] += 1;
            adj[i].push((e.j, e.w));
            adj[j].push((e.i, e.w));
        }

        Ok(WeightedGraph {
            n,
            edges: list,
            degree,
            link_count,
            adj,
        })
    }

    /// Builds a unit-weight graph from bare links.
    pub fn from_links<I>(n: usize, links: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges(n, links.into_iter().map(|(i, j)| (i, j, 1.0)))
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Weighted degrees d_i.
    pub fn degrees(&self) -> &[f64] {
        &self.degree
    }

    /// Unweighted link counts k_i.
    pub fn link_counts(&self) -> &[u32] {
        &self.link_count
    }

    pub fn neighbors(&self, i: usize) -> &[(u32, f64)] {
        &self.adj[i]
    }

    /// vol(G) = sum_i d_i, i.e. twice the total edge weight. This is the
    /// weighted reading of the usual 2|E| normalizer; for unit weights it is
    /// exactly twice the link count.
    pub fn volume(&self) -> f64 {
        self.degree.iter().sum()
    }

    /// True iff every node has at least one incident edge.
    pub fn has_positive_degrees(&self) -> bool {
        self.link_count.iter().all(|&k| k > 0)
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let k_min = self.link_count.iter().copied().min().unwrap_or(0) as usize;
        let k_sum: u64 = self.link_count.iter().map(|&k| k as u64).sum();
        let k_ave = k_sum as f64 / self.n as f64;
        let d_min = self.degree.iter().copied().fold(f64::INFINITY, f64::min);
        let d_ave = self.volume() / self.n as f64;
        let ratio = if k_ave > 0.0 {
            (k_min * k_min) as f64 / k_ave
        } else {
            0.0
        };
        DegreeStats {
            k_min,
            k_ave,
            d_min,
            d_ave,
            ratio,
        }
    }

    /// Breadth-first check that one component spans all nodes.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1usize;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adj[u] {
                let v = v as usize;
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// Writes the `n <count>` header followed by one `i j w` line per edge.
    /// Weights use 17 significant digits so the round trip is exact.
    pub fn write_edge_list<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "n {}", self.n)?;
        for e in &self.edges {
            writeln!(w, "{} {} {:.16e}", e.i, e.j, e.w)?;
        }
        Ok(())
    }

    pub fn write_edge_list_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_edge_list(&mut f)
    }
}

/// Parses the edge-list format written by [`WeightedGraph::write_edge_list`]:
/// an optional leading `n <count>` header, then `i j w` per line. Lines
/// starting with `#` are skipped. Without a header the node count is the
/// largest id plus one. `label` names the source in error messages.
pub fn read_edge_list<R: BufRead>(reader: R, label: &str) -> Result<WeightedGraph> {
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut seen: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
    let mut declared_n: Option<usize> = None;
    let mut max_id: usize = 0;
    let mut saw_edge = false;

    let parse_err = |line: usize, msg: String| Error::Parse {
        path: label.to_string(),
        line,
        msg,
    };

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] == "n" {
            if saw_edge || declared_n.is_some() {
                return Err(parse_err(lineno, "unexpected header line".into()));
            }
            if fields.len() != 2 {
                return Err(parse_err(lineno, "header must be `n <count>`".into()));
            }
            let n: usize = fields[1]
                .parse()
                .map_err(|e| parse_err(lineno, format!("bad node count: {e}")))?;
            declared_n = Some(n);
            continue;
        }
        if fields.len() != 3 {
            return Err(parse_err(
                lineno,
                format!("expected `i j w`, found {} fields", fields.len()),
            ));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad node id: {e}")))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad node id: {e}")))?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad weight: {e}")))?;
        if i == j {
            return Err(parse_err(lineno, format!("self-loop at node {i}")));
        }
        if !(w > 0.0) {
            return Err(parse_err(lineno, format!("non-positive weight {w}")));
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(parse_err(lineno, format!("duplicate edge ({i}, {j})")));
        }
        saw_edge = true;
        max_id = max_id.max(i).max(j);
        edges.push((i, j, w));
    }

    let n = match declared_n {
        Some(n) => n,
        None if saw_edge => max_id + 1,
        None => return Err(parse_err(0, "empty edge list without `n` header".into())),
    };
    WeightedGraph::from_edges(n, edges)
}

pub fn read_edge_list_path<P: AsRef<Path>>(path: P) -> Result<WeightedGraph> {
    let label = path.as_ref().display().to_string();
    let f = std::io::BufReader::new(std::fs::File::open(path)?);
    read_edge_list(f, &label)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> WeightedGraph {
        WeightedGraph::from_links(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn triangle_volume_and_stats() {
        let g = k3();
        assert_eq!(g.volume(), 6.0);
        let s = g.degree_stats();
        assert_eq!(s.k_min, 2);
        assert_eq!(s.k_ave, 2.0);
        assert_eq!(s.ratio, 2.0);
    }

    #[test]
    fn single_weighted_edge_volume() {
        let g = WeightedGraph::from_edges(2, [(0, 1, 2.5)]).unwrap();
        assert_eq!(g.volume(), 5.0);
    }

    #[test]
    fn star_stats() {
        let g = WeightedGraph::from_links(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let s = g.degree_stats();
        assert_eq!(s.k_min, 1);
        assert_eq!(s.k_ave, 8.0 / 5.0);
        assert_eq!(s.ratio, 5.0 / 8.0);
    }

    #[test]
    fn connectivity() {
        assert!(k3().is_connected());
        let g = WeightedGraph::from_links(4, [(0, 1), (2, 3)]).unwrap();
        assert!(!g.is_connected());
        let lonely = WeightedGraph::from_edges(1, []).unwrap();
        assert!(lonely.is_connected());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(
            WeightedGraph::from_edges(3, [(1, 1, 1.0)]),
            Err(Error::SelfLoop(1))
        ));
        assert!(matches!(
            WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 0, 2.0)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            WeightedGraph::from_edges(3, [(0, 1, 0.0)]),
            Err(Error::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            WeightedGraph::from_edges(2, [(0, 5, 1.0)]),
            Err(Error::NodeOutOfRange { id: 5, n: 2 })
        ));
    }

    #[test]
    fn degrees_match_edge_set() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 4.0)]).unwrap();
        assert_eq!(g.degrees(), &[1.0, 5.0, 4.0]);
        assert_eq!(g.link_counts(), &[1, 2, 1]);
        assert!((g.volume() - 2.0 * (1.0 + 4.0)).abs() < 1e-12);
    }

    #[test]
    fn parse_k3() {
        let text = "0 1 1.0\n1 2 1.0\n0 2 1.0\n";
        let g = read_edge_list(text.as_bytes(), "inline").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.degree_stats().k_min, 2);
    }

    #[test]
    fn parse_header_only() {
        let g = read_edge_list("n 1\n".as_bytes(), "inline").unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = read_edge_list("0 1 1.0\n2 2 1.0\n".as_bytes(), "inline").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error: {other}"),
        }
        let err = read_edge_list("0 1 1.0\n0 1 -3\n".as_bytes(), "inline").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error: {other}"),
        }
        let err = read_edge_list("0 1 1.0\n1 0 2.0\n".as_bytes(), "inline").unwrap_err();
        match err {
            Error::Parse { line, msg, .. } => {
                assert_eq!(line, 2);
                assert!(msg.contains("duplicate"));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let g = WeightedGraph::from_edges(
            4,
            [
                (0, 1, 0.12345678901234568),
                (1, 2, 4.0e-7),
                (2, 3, 1.5),
                (0, 3, 97.25),
            ],
        )
        .unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let h = read_edge_list(buf.as_slice(), "buf").unwrap();
        assert_eq!(g.node_count(), h.node_count());
        assert_eq!(g.edges(), h.edges());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        /// Arbitrary valid edge set on up to 12 nodes.
        fn edge_set() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
            (2usize..12).prop_flat_map(|n| {
                let pairs: Vec<(usize, usize)> = (0..n)
                    .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                    .collect();
                let count = pairs.len();
                (
                    Just(n),
                    proptest::sample::subsequence(pairs, 0..=count).prop_flat_map(|sel| {
                        let len = sel.len();
                        (
                            Just(sel),
                            proptest::collection::vec(1e-6f64..1e6, len..=len),
                        )
                            .prop_map(|(sel, ws)| {
                                sel.into_iter()
                                    .zip(ws)
                                    .map(|((i, j), w)| (i, j, w))
                                    .collect::<Vec<_>>()
                            })
                    }),
                )
            })
        }

        proptest! {
            #[test]
            fn volume_is_twice_total_weight((n, edges) in edge_set()) {
                let g = WeightedGraph::from_edges(n, edges.clone()).unwrap();
                let total: f64 = edges.iter().map(|e| e.2).sum();
                prop_assert!((g.volume() - 2.0 * total).abs() <= 1e-12 * (1.0 + 2.0 * total));
                // Stored degrees match a recount over the edge set.
                let mut d = vec![0.0; n];
                let mut k = vec![0u32; n];
                for &(i, j, w) in &edges {
                    d[i] += w;
                    d[j] += w;
                    k[i] += 1;
                    k[j] += 1;
                }
                prop_assert_eq!(g.link_counts(), &k[..]);
                for (have, want) in g.degrees().iter().zip(&d) {
                    prop_assert!((have - want).abs() <= 1e-12 * (1.0 + want));
                }
            }

            #[test]
            fn write_read_round_trip((n, edges) in edge_set()) {
                let g = WeightedGraph::from_edges(n, edges).unwrap();
                let mut buf = Vec::new();
                g.write_edge_list(&mut buf).unwrap();
                let h = read_edge_list(buf.as_slice(), "prop").unwrap();
                prop_assert_eq!(g.node_count(), h.node_count());
                prop_assert_eq!(g.edges(), h.edges());
            }
        }
    }
}
