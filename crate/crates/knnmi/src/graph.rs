//! Undirected graphs and Markov blankets.

use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};

/// An undirected graph over nodes 0..node_count with no self-loops.
///
/// Edges are stored as normalized (min, max) pairs in a sorted set, so
/// equality is independent of insertion order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedGraph {
    node_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl UndirectedGraph {
    pub fn new(node_count: usize) -> UndirectedGraph {
        assert!(node_count >= 1, "a graph needs at least one node");
        UndirectedGraph { node_count, edges: BTreeSet::new() }
    }

    pub fn from_edges(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<UndirectedGraph> {
        let mut g = UndirectedGraph::new(node_count);
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        for node in [i, j] {
            if node >= self.node_count {
                return Err(Error::NodeOutOfRange { node, node_count: self.node_count });
            }
        }
        self.edges.insert((i.min(j), i.max(j)));
        Ok(())
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    /// Normalized (min, max) edges in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn neighbors(&self, node: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == node {
                    Some(b)
                } else if b == node {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Render the edge list with one `name_i<TAB>name_j` line per edge,
    /// lexicographically sorted (within each edge and across lines).
    pub fn to_edge_list(&self, names: &[String]) -> Result<String> {
        if names.len() != self.node_count {
            return Err(Error::DimensionMismatch(format!(
                "{} names for a graph on {} nodes",
                names.len(),
                self.node_count
            )));
        }
        let mut lines: Vec<(String, String)> = self
            .edges
            .iter()
            .map(|&(i, j)| {
                let (a, b) = (names[i].clone(), names[j].clone());
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        lines.sort();
        let mut out = String::new();
        for (a, b) in lines {
            out.push_str(&a);
            out.push('\t');
            out.push_str(&b);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn write_edge_list(&self, names: &[String], path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = self.to_edge_list(names)?;
        std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
    }

    /// Parse an edge list produced by `to_edge_list`, resolving names to the
    /// node indices given by `names`.
    pub fn from_edge_list(text: &str, names: &[String]) -> Result<UndirectedGraph> {
        let index = |name: &str| -> Result<usize> {
            names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::UnknownColumn(name.to_string()))
        };
        let mut g = UndirectedGraph::new(names.len());
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (a, b) = line.split_once('\t').ok_or_else(|| {
                Error::InvalidParameter(format!("edge line '{line}' is not tab-separated"))
            })?;
            g.add_edge(index(a.trim())?, index(b.trim())?)?;
        }
        Ok(g)
    }

    pub fn read_edge_list(path: impl AsRef<Path>, names: &[String]) -> Result<UndirectedGraph> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_edge_list(&text, names)
    }
}

/// The estimated neighbour set of one target node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovBlanket {
    target: usize,
    members: BTreeSet<usize>,
}

impl MarkovBlanket {
    pub fn new(target: usize, members: impl IntoIterator<Item = usize>) -> Result<MarkovBlanket> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if members.contains(&target) {
            return Err(Error::SelfLoop(target));
        }
        Ok(MarkovBlanket { target, members })
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.members.contains(&node)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Conservative AND-rule assembly: edge (i, j) iff i is in the blanket of j
/// AND j is in the blanket of i.
pub fn graph_from_blankets_and_rule(blankets: &[MarkovBlanket]) -> Result<UndirectedGraph> {
    let p = blankets.len();
    let mut g = UndirectedGraph::new(p);
    for b in blankets {
        let i = b.target();
        for j in b.members() {
            if j >= p {
                return Err(Error::NodeOutOfRange { node: j, node_count: p });
            }
            if j > i && blankets[j].contains(i) {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_self_loops_and_out_of_range() {
        let mut g = UndirectedGraph::new(3);
        assert!(matches!(g.add_edge(1, 1), Err(Error::SelfLoop(1))));
        assert!(matches!(g.add_edge(0, 3), Err(Error::NodeOutOfRange { .. })));
    }

    #[test]
    fn edge_is_unordered() {
        let mut g = UndirectedGraph::new(3);
        g.add_edge(2, 0).unwrap();
        assert!(g.has_edge(0, 2));
        assert!(g.has_edge(2, 0));
        assert_eq!(g.edge_count(), 1);
        g.add_edge(0, 2).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn and_rule_requires_agreement() {
        // mb(0) = {1}, mb(1) = {} -> no edge.
        let blankets = vec![
            MarkovBlanket::new(0, [1]).unwrap(),
            MarkovBlanket::new(1, []).unwrap(),
        ];
        let g = graph_from_blankets_and_rule(&blankets).unwrap();
        assert_eq!(g.edge_count(), 0);

        // mb(0) = {1}, mb(1) = {0} -> edge.
        let blankets = vec![
            MarkovBlanket::new(0, [1]).unwrap(),
            MarkovBlanket::new(1, [0]).unwrap(),
        ];
        let g = graph_from_blankets_and_rule(&blankets).unwrap();
        assert!(g.has_edge(0, 1));
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn blanket_rejects_target_membership() {
        assert!(MarkovBlanket::new(2, [1, 2]).is_err());
    }

    #[test]
    fn edge_list_round_trip_lexicographic() {
        let names: Vec<String> =
            ["X1", "X10", "X2"].iter().map(|s| s.to_string()).collect();
        let g = UndirectedGraph::from_edges(3, [(2, 0), (1, 2)]).unwrap();
        let text = g.to_edge_list(&names).unwrap();
        // "X10 X2" sorts before "X1 X2"? No: "X1" < "X10" < "X2" lexicographically.
        assert_eq!(text, "X1\tX2\nX10\tX2\n");
        let back = UndirectedGraph::from_edge_list(&text, &names).unwrap();
        assert_eq!(back, g);
    }

    proptest! {
        // Equality ignores insertion order.
        #[test]
        fn equality_is_order_independent(
            edges in proptest::collection::vec((0usize..8, 0usize..8), 0..20),
            seed in any::<u64>(),
        ) {
            let clean: Vec<(usize, usize)> =
                edges.into_iter().filter(|(i, j)| i != j).collect();
            let g1 = UndirectedGraph::from_edges(8, clean.clone()).unwrap();
            let mut shuffled = clean;
            // Cheap deterministic shuffle.
            let m = shuffled.len();
            if m > 1 {
                for i in (1..m).rev() {
                    let j = (seed as usize).wrapping_mul(i) % (i + 1);
                    shuffled.swap(i, j);
                }
            }
            let reversed: Vec<(usize, usize)> =
                shuffled.into_iter().map(|(i, j)| (j, i)).collect();
            let g2 = UndirectedGraph::from_edges(8, reversed).unwrap();
            prop_assert_eq!(g1, g2);
        }
    }
}
