//! r-partite r-graphs with a last-part neighborhood index.
//!
//! Edges are kept as a flat, lexicographically sorted array of r-tuples. For
//! every prefix tuple over parts `1..r-1` the set of part-`r` vertices it is
//! joined to is stored as a bitset, which makes common neighborhoods a run of
//! word-wise ANDs.

use num_bigint::BigInt;
use num_rational::BigRational;
use std::fmt::Write as _;
use std::io;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("an r-partite graph needs at least one part")]
    NoParts,
    #[error("edge {edge:?} has {got} coordinates, expected {expected}")]
    Arity { edge: Vec<u32>, expected: usize, got: usize },
    #[error("vertex {vertex} out of range for part {part} of size {size}")]
    OutOfRange { part: usize, vertex: u64, size: usize },
    #[error("duplicate edge {0:?}")]
    DuplicateEdge(Vec<u32>),
    #[error("links are only defined for r >= 2")]
    UnaryLink,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub(crate) mod bits {
    #[inline]
    pub fn words_for(n: usize) -> usize {
        n.div_ceil(64)
    }

    #[inline]
    pub fn count(words: &[u64]) -> usize {
        words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn and_assign(acc: &mut [u64], other: &[u64]) {
        for (a, b) in acc.iter_mut().zip(other) {
            *a &= *b;
        }
    }

    #[cfg(test)]
    pub fn ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
        words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RPartiteHypergraph {
    part_sizes: Vec<usize>,
    edges: Vec<u32>,
    words: usize,
    nbrs: Vec<u64>,
    degrees: Vec<Vec<usize>>,
}

/// The (r-1)-graph of edges through one vertex of the last part, with that
/// vertex removed.
pub type LinkHypergraph = RPartiteHypergraph;

impl RPartiteHypergraph {
    /// Builds a graph; fails on wrong arity, out-of-range vertices and
    /// duplicate edges.
    pub fn new<I, E>(part_sizes: Vec<usize>, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[u32]>,
    {
        let r = part_sizes.len();
        if r == 0 {
            return Err(GraphError::NoParts);
        }
        let mut tuples: Vec<Vec<u32>> = Vec::new();
        for e in edges {
            let e = e.as_ref();
            if e.len() != r {
                return Err(GraphError::Arity { edge: e.to_vec(), expected: r, got: e.len() });
            }
            for (part, (&v, &size)) in e.iter().zip(&part_sizes).enumerate() {
                if v as usize >= size {
                    return Err(GraphError::OutOfRange { part, vertex: v as u64, size });
                }
            }
            tuples.push(e.to_vec());
        }
        tuples.sort_unstable();
        if let Some(w) = tuples.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].clone()));
        }
        Ok(Self::from_sorted_unique(part_sizes, tuples))
    }

    /// Like [`new`](Self::new) but silently drops duplicate edges.
    pub fn from_edge_set<I, E>(part_sizes: Vec<usize>, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[u32]>,
    {
        let mut tuples: Vec<Vec<u32>> = edges.into_iter().map(|e| e.as_ref().to_vec()).collect();
        tuples.sort_unstable();
        tuples.dedup();
        Self::new(part_sizes, tuples)
    }

    fn from_sorted_unique(part_sizes: Vec<usize>, tuples: Vec<Vec<u32>>) -> Self {
        let r = part_sizes.len();
        let last = part_sizes[r - 1];
        let words = bits::words_for(last);
        let prefixes: usize = part_sizes[..r - 1].iter().product();
        let mut nbrs = vec![0u64; prefixes * words];
        let mut degrees: Vec<Vec<usize>> = part_sizes.iter().map(|&m| vec![0; m]).collect();
        let mut flat = Vec::with_capacity(tuples.len() * r);
        for t in &tuples {
            let p = prefix_index(&part_sizes, &t[..r - 1]);
            let v = t[r - 1] as usize;
            nbrs[p * words + v / 64] |= 1 << (v % 64);
            for (part, &x) in t.iter().enumerate() {
                degrees[part][x as usize] += 1;
            }
            flat.extend_from_slice(t);
        }
        RPartiteHypergraph { part_sizes, edges: flat, words, nbrs, degrees }
    }

    /// The complete r-partite r-graph on the given parts.
    pub fn complete(part_sizes: Vec<usize>) -> Self {
        let mut tuples = Vec::new();
        let mut cur = vec![0u32; part_sizes.len()];
        if part_sizes.iter().all(|&m| m > 0) {
            'outer: loop {
                tuples.push(cur.clone());
                for i in (0..cur.len()).rev() {
                    cur[i] += 1;
                    if (cur[i] as usize) < part_sizes[i] {
                        continue 'outer;
                    }
                    cur[i] = 0;
                }
                break;
            }
        }
        Self::from_sorted_unique(part_sizes, tuples)
    }

    pub fn empty(part_sizes: Vec<usize>) -> Self {
        Self::from_sorted_unique(part_sizes, Vec::new())
    }

    pub fn r(&self) -> usize {
        self.part_sizes.len()
    }

    pub fn part_sizes(&self) -> &[usize] {
        &self.part_sizes
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len() / self.r()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.edges.chunks_exact(self.r())
    }

    pub fn contains_edge(&self, edge: &[u32]) -> bool {
        let r = self.r();
        if edge.len() != r || edge.iter().zip(&self.part_sizes).any(|(&v, &m)| v as usize >= m) {
            return false;
        }
        let v = edge[r - 1] as usize;
        self.last_part_neighbors(&edge[..r - 1])[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn degree(&self, part: usize, vertex: usize) -> Result<usize, GraphError> {
        self.check_vertex(part, vertex)?;
        Ok(self.degrees[part][vertex])
    }

    pub fn degrees(&self, part: usize) -> &[usize] {
        &self.degrees[part]
    }

    fn check_vertex(&self, part: usize, vertex: usize) -> Result<(), GraphError> {
        let size = *self.part_sizes.get(part).ok_or(GraphError::OutOfRange {
            part,
            vertex: vertex as u64,
            size: 0,
        })?;
        if vertex >= size {
            return Err(GraphError::OutOfRange { part, vertex: vertex as u64, size });
        }
        Ok(())
    }

    pub(crate) fn words(&self) -> usize {
        self.words
    }

    /// Bitset over the last part of vertices joined to `prefix`.
    pub fn last_part_neighbors(&self, prefix: &[u32]) -> &[u64] {
        let p = prefix_index(&self.part_sizes, prefix);
        &self.nbrs[p * self.words..(p + 1) * self.words]
    }

    pub(crate) fn neighbors_by_index(&self, prefix_idx: usize) -> &[u64] {
        &self.nbrs[prefix_idx * self.words..(prefix_idx + 1) * self.words]
    }

    /// Link of vertex `v` of the last part.
    pub fn link(&self, v: usize) -> Result<LinkHypergraph, GraphError> {
        let r = self.r();
        if r < 2 {
            return Err(GraphError::UnaryLink);
        }
        self.check_vertex(r - 1, v)?;
        let tuples: Vec<Vec<u32>> = self
            .edges()
            .filter(|e| e[r - 1] as usize == v)
            .map(|e| e[..r - 1].to_vec())
            .collect();
        Ok(Self::from_sorted_unique(self.part_sizes[..r - 1].to_vec(), tuples))
    }

    /// Removes every edge through a last-part vertex whose degree is strictly
    /// below `threshold`. Vertices are kept, isolated, so indices stay stable.
    pub fn prune_low_degree(&self, threshold: &BigRational) -> Pruned {
        let r = self.r();
        let low: Vec<bool> = self.degrees[r - 1]
            .iter()
            .map(|&d| BigRational::from_integer(BigInt::from(d)) < *threshold)
            .collect();
        let kept: Vec<Vec<u32>> = self
            .edges()
            .filter(|e| !low[e[r - 1] as usize])
            .map(<[u32]>::to_vec)
            .collect();
        let removed_edges = self.edge_count() - kept.len();
        let removed_vertices = low
            .iter()
            .zip(&self.degrees[r - 1])
            .filter(|(&l, &d)| l && d > 0)
            .count();
        Pruned {
            graph: Self::from_sorted_unique(self.part_sizes.clone(), kept),
            removed_edges,
            removed_vertices,
        }
    }

    /// Serializes to the `zng` text format with edges in canonical order.
    pub fn to_zng(&self) -> String {
        let mut out = String::with_capacity(16 + self.edges.len() * 4);
        out.push_str("zng ");
        out.push_str(&self.r().to_string());
        for m in &self.part_sizes {
            let _ = write!(out, " {m}");
        }
        out.push('\n');
        for e in self.edges() {
            let mut first = true;
            for v in e {
                if !first {
                    out.push(' ');
                }
                first = false;
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the `zng` format. Blank lines and `#` comments are ignored.
    pub fn from_zng(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let perr = |line: usize, message: String| GraphError::Parse { line, message };
        let mut fields = header.split_whitespace();
        if fields.next() != Some("zng") {
            return Err(perr(hline, "header must start with 'zng'".into()));
        }
        let nums: Vec<usize> = fields
            .map(|f| f.parse::<usize>().map_err(|_| perr(hline, format!("bad number '{f}' in header"))))
            .collect::<Result<_, _>>()?;
        let (&r, parts) = nums.split_first().ok_or_else(|| perr(hline, "header lacks r".into()))?;
        if r == 0 {
            return Err(perr(hline, "r must be at least 1".into()));
        }
        if parts.len() != r {
            return Err(perr(hline, format!("header declares r={r} but lists {} part sizes", parts.len())));
        }
        let part_sizes = parts.to_vec();
        let mut seen = std::collections::HashMap::new();
        let mut tuples = Vec::new();
        for (lineno, line) in lines {
            let edge: Vec<u32> = line
                .split_whitespace()
                .map(|f| f.parse::<u32>().map_err(|_| perr(lineno, format!("bad vertex index '{f}'"))))
                .collect::<Result<_, _>>()?;
            if edge.len() != r {
                return Err(perr(lineno, format!("edge has {} coordinates, expected {r}", edge.len())));
            }
            for (part, (&v, &m)) in edge.iter().zip(&part_sizes).enumerate() {
                if v as usize >= m {
                    return Err(perr(lineno, format!("vertex {v} out of range for part {part} of size {m}")));
                }
            }
            if let Some(prev) = seen.insert(edge.clone(), lineno) {
                return Err(perr(lineno, format!("duplicate edge {edge:?} (first on line {prev})")));
            }
            tuples.push(edge);
        }
        tuples.sort_unstable();
        Ok(Self::from_sorted_unique(part_sizes, tuples))
    }

    pub fn read_graph(path: &Path) -> io::Result<Result<Self, GraphError>> {
        Ok(Self::from_zng(&std::fs::read_to_string(path)?))
    }

    pub fn write_graph(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, self.to_zng())
    }
}

/// Result of [`RPartiteHypergraph::prune_low_degree`].
#[derive(Debug, Clone)]
pub struct Pruned {
    pub graph: RPartiteHypergraph,
    pub removed_edges: usize,
    pub removed_vertices: usize,
}

/// Row-major index of a prefix over parts `1..r-1`.
pub(crate) fn prefix_index(part_sizes: &[usize], prefix: &[u32]) -> usize {
    prefix
        .iter()
        .zip(part_sizes)
        .fold(0usize, |acc, (&v, &m)| acc * m + v as usize)
}
