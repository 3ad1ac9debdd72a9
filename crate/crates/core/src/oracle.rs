//! Exact Zarankiewicz numbers for tiny parameters.
//!
//! Depth-first search over the potential edges in lexicographic order,
//! including an edge before excluding it. Two cuts keep it exact:
//!
//! * bound: a branch whose edge count cannot exceed the best found so far is
//!   dropped;
//! * symmetry: vertices of the first part are interchangeable, so only graphs
//!   whose first-part incidence rows are lexicographically non-increasing are
//!   explored.
//!
//! Because inclusion is tried first and only strict improvements are
//! recorded, the reported witness is the optimum with the lexicographically
//! smallest sorted edge list.

use crate::hypergraph::RPartiteHypergraph;
use itertools::Itertools;
use std::fmt;
use thiserror::Error;

/// Default cap on the number of potential edges `prod m_i`.
pub const DEFAULT_EDGE_CAP: u64 = 36;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("query needs at least two parts and matching pattern sizes")]
    Shape,
    #[error("part and pattern sizes must be positive")]
    ZeroSize,
    #[error("{edges} potential edges exceed the cap {cap}")]
    TooLarge { edges: u64, cap: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZQuery {
    pub part_sizes: Vec<usize>,
    pub s_list: Vec<usize>,
}

impl ZQuery {
    pub fn new(part_sizes: Vec<usize>, s_list: Vec<usize>) -> Result<Self, OracleError> {
        if part_sizes.len() < 2 || part_sizes.len() != s_list.len() {
            return Err(OracleError::Shape);
        }
        if part_sizes.contains(&0) || s_list.contains(&0) {
            return Err(OracleError::ZeroSize);
        }
        Ok(ZQuery { part_sizes, s_list })
    }

    pub fn potential_edges(&self) -> u64 {
        self.part_sizes.iter().fold(1u64, |a, &m| a.saturating_mul(m as u64))
    }
}

impl fmt::Display for ZQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z({};{})", self.part_sizes.iter().join(","), self.s_list.iter().join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZResult {
    pub z: usize,
    pub witness: RPartiteHypergraph,
    /// Search nodes visited.
    pub nodes: u64,
}

pub fn exact_z(query: &ZQuery) -> Result<ZResult, OracleError> {
    exact_z_capped(query, DEFAULT_EDGE_CAP)
}

pub fn exact_z_capped(query: &ZQuery, cap: u64) -> Result<ZResult, OracleError> {
    let edges = query.potential_edges();
    if edges > cap || query.part_sizes[query.part_sizes.len() - 1] > 64 {
        return Err(OracleError::TooLarge { edges, cap });
    }
    if query.s_list.iter().zip(&query.part_sizes).any(|(s, m)| s > m) {
        let witness = RPartiteHypergraph::complete(query.part_sizes.clone());
        return Ok(ZResult { z: witness.edge_count(), witness, nodes: 0 });
    }
    let mut search = Search::new(query);
    search.dfs(0, false);
    let witness = RPartiteHypergraph::new(query.part_sizes.clone(), &search.best_edges)
        .expect("search only emits valid edges");
    Ok(ZResult { z: search.best_edges.len(), witness, nodes: search.nodes })
}

struct Search<'a> {
    query: &'a ZQuery,
    edges: Vec<Vec<u32>>,
    prefix_of: Vec<usize>,
    row_len: usize,
    nbrs: Vec<u64>,
    chosen: Vec<bool>,
    count: usize,
    best: Option<usize>,
    best_edges: Vec<Vec<u32>>,
    nodes: u64,
    // For each part i < r-1 and vertex v: all (s_i - 1)-subsets avoiding v.
    partners: Vec<Vec<Vec<Vec<u32>>>>,
}

impl<'a> Search<'a> {
    fn new(query: &'a ZQuery) -> Self {
        let parts = &query.part_sizes;
        let r = parts.len();
        let complete = RPartiteHypergraph::complete(parts.clone());
        let edges: Vec<Vec<u32>> = complete.edges().map(<[u32]>::to_vec).collect();
        let prefix_of = edges
            .iter()
            .map(|e| crate::hypergraph::prefix_index(parts, &e[..r - 1]))
            .collect();
        let prefixes: usize = parts[..r - 1].iter().product();
        let partners = (0..r - 1)
            .map(|i| {
                (0..parts[i] as u32)
                    .map(|v| {
                        (0..parts[i] as u32)
                            .filter(|&w| w != v)
                            .combinations(query.s_list[i] - 1)
                            .map(|mut c| {
                                c.push(v);
                                c.sort_unstable();
                                c
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Search {
            query,
            row_len: edges.len() / parts[0],
            chosen: vec![false; edges.len()],
            edges,
            prefix_of,
            nbrs: vec![0; prefixes],
            count: 0,
            best: None,
            best_edges: Vec::new(),
            nodes: 0,
            partners,
        }
    }

    /// Would adding edge `i` complete an ordered copy of the pattern?
    fn creates_copy(&self, i: usize) -> bool {
        let parts = &self.query.part_sizes;
        let r = parts.len();
        let e = &self.edges[i];
        let v = e[r - 1];
        let need = self.query.s_list[r - 1] as u32;
        let subsets: Vec<&Vec<Vec<u32>>> = (0..r - 1).map(|p| &self.partners[p][e[p] as usize]).collect();
        for choice in subsets.iter().map(|s| s.iter()).multi_cartesian_product() {
            let mut common = !0u64;
            for prefix in choice.iter().map(|s| s.iter()).multi_cartesian_product() {
                let idx = prefix.iter().zip(parts).fold(0usize, |acc, (&&x, &m)| acc * m + x as usize);
                let mut nb = self.nbrs[idx];
                if idx == self.prefix_of[i] {
                    nb |= 1 << v;
                }
                common &= nb;
                if common >> v & 1 == 0 {
                    break;
                }
            }
            if common >> v & 1 == 1 && common.count_ones() >= need {
                return true;
            }
        }
        false
    }

    fn set(&mut self, i: usize, on: bool) {
        let v = self.edges[i][self.edges[i].len() - 1];
        let p = self.prefix_of[i];
        if on {
            self.nbrs[p] |= 1 << v;
            self.count += 1;
        } else {
            self.nbrs[p] &= !(1 << v);
            self.count -= 1;
        }
        self.chosen[i] = on;
    }

    /// `below` means the current first-part row is already lexicographically
    /// smaller than the previous row.
    fn dfs(&mut self, i: usize, below: bool) {
        self.nodes += 1;
        let total = self.edges.len();
        if self.best.is_some_and(|b| self.count + (total - i) <= b) {
            return;
        }
        if i == total {
            self.best = Some(self.count);
            self.best_edges = (0..total).filter(|&k| self.chosen[k]).map(|k| self.edges[k].clone()).collect();
            return;
        }
        let row = i / self.row_len;
        let col = i % self.row_len;
        let below = if col == 0 { false } else { below };
        let prev_bit = (row > 0).then(|| self.chosen[i - self.row_len]);

        let include_allowed = !(prev_bit == Some(false) && !below);
        if include_allowed && !self.creates_copy(i) {
            self.set(i, true);
            self.dfs(i + 1, below);
            self.set(i, false);
        }
        let below_after = below || prev_bit == Some(true);
        self.dfs(i + 1, below_after);
    }
}

/// Plain enumeration of all `2^N` edge subsets, checking every transversal of
/// every subset tuple directly. Kept as an independent cross-check for the
/// search; only usable for very small `N`.
pub fn exact_z_exhaustive(query: &ZQuery) -> Result<usize, OracleError> {
    let edges = query.potential_edges();
    if edges > 24 {
        return Err(OracleError::TooLarge { edges, cap: 24 });
    }
    let all: Vec<Vec<u32>> = RPartiteHypergraph::complete(query.part_sizes.clone())
        .edges()
        .map(<[u32]>::to_vec)
        .collect();
    let subset_lists: Vec<Vec<Vec<u32>>> = query
        .part_sizes
        .iter()
        .zip(&query.s_list)
        .map(|(&m, &s)| (0..m as u32).combinations(s).collect())
        .collect();
    let mut best = 0;
    for mask in 0u64..(1u64 << all.len()) {
        let k = mask.count_ones() as usize;
        if k <= best {
            continue;
        }
        let present = |e: &[u32]| {
            let idx = all.iter().position(|x| x.as_slice() == e).expect("edge in list");
            mask >> idx & 1 == 1
        };
        let has_copy = subset_lists.iter().map(|l| l.iter()).multi_cartesian_product().any(|choice| {
            choice
                .iter()
                .map(|s| s.iter())
                .multi_cartesian_product()
                .all(|t| present(&t.into_iter().copied().collect::<Vec<_>>()))
        });
        if !has_copy {
            best = k;
        }
    }
    Ok(best)
}

/// One row of the comparison between an edge count and
/// `m_1 ... m_{r-1} m_r^{1 - 1/(s_1 ... s_{r-1})}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub label: String,
    pub source: &'static str,
    pub part_sizes: Vec<usize>,
    pub s_list: Vec<usize>,
    pub edges: usize,
    pub bound: f64,
    pub ratio: f64,
}

/// Input to [`bound_table`]: either a query answered by the oracle, or an
/// edge count witnessed elsewhere (e.g. by a construction).
#[derive(Debug, Clone)]
pub enum TableEntry {
    Oracle(ZQuery),
    Witness { label: String, part_sizes: Vec<usize>, s_list: Vec<usize>, edges: usize },
}

pub fn bound_expression(part_sizes: &[usize], s_list: &[usize]) -> f64 {
    let r = part_sizes.len();
    let left: f64 = part_sizes[..r - 1].iter().map(|&m| m as f64).product();
    let s: f64 = s_list[..r - 1].iter().map(|&x| x as f64).product();
    left * (part_sizes[r - 1] as f64).powf(1.0 - 1.0 / s)
}

pub fn bound_table(entries: &[TableEntry], cap: u64) -> Vec<Result<BoundRow, OracleError>> {
    entries
        .iter()
        .map(|entry| {
            let (label, source, parts, s_list, edges) = match entry {
                TableEntry::Oracle(q) => {
                    let res = exact_z_capped(q, cap)?;
                    (q.to_string(), "oracle", q.part_sizes.clone(), q.s_list.clone(), res.z)
                }
                TableEntry::Witness { label, part_sizes, s_list, edges } => {
                    (label.clone(), "witness", part_sizes.clone(), s_list.clone(), *edges)
                }
            };
            let bound = bound_expression(&parts, &s_list);
            Ok(BoundRow { label, source, part_sizes: parts, s_list, edges, bound, ratio: edges as f64 / bound })
        })
        .collect()
}

/// Tab-separated ledger line: query, z, node count, witness path.
pub fn ledger_row(query: &ZQuery, result: &ZResult, witness_path: &str) -> String {
    format!("{query}\t{}\t{}\t{witness_path}", result.z, result.nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count::count_ordered;
    use num_traits::Zero;

    fn q(parts: &[usize], s: &[usize]) -> ZQuery {
        ZQuery::new(parts.to_vec(), s.to_vec()).unwrap()
    }

    #[test]
    fn known_values() {
        assert_eq!(exact_z(&q(&[2, 2], &[2, 2])).unwrap().z, 3);
        assert_eq!(exact_z(&q(&[3, 3], &[2, 2])).unwrap().z, 6);
        assert_eq!(exact_z(&q(&[4, 4], &[2, 2])).unwrap().z, 9);
        assert_eq!(exact_z(&q(&[2, 2, 2], &[1, 1, 2])).unwrap().z, 4);
    }

    #[test]
    fn agrees_with_plain_enumeration() {
        for (parts, s) in [
            (vec![2, 2], vec![2, 2]),
            (vec![3, 3], vec![2, 2]),
            (vec![2, 3], vec![1, 2]),
            (vec![3, 2], vec![2, 1]),
            (vec![2, 2, 2], vec![1, 1, 2]),
            (vec![2, 2, 2], vec![2, 2, 1]),
            (vec![3, 4], vec![2, 3]),
        ] {
            let query = q(&parts, &s);
            assert_eq!(exact_z(&query).unwrap().z, exact_z_exhaustive(&query).unwrap(), "{query}");
        }
    }

    #[test]
    fn witnesses_are_free_and_optimal_size() {
        for (parts, s) in [(vec![3, 3], vec![2, 2]), (vec![2, 2, 3], vec![1, 2, 2]), (vec![4, 3], vec![2, 2])] {
            let query = q(&parts, &s);
            let res = exact_z(&query).unwrap();
            assert_eq!(res.witness.edge_count(), res.z);
            assert!(count_ordered(&res.witness, &s).unwrap().is_zero());
        }
    }

    #[test]
    fn trivial_ceiling_when_pattern_does_not_fit() {
        let res = exact_z(&q(&[2, 3], &[3, 1])).unwrap();
        assert_eq!(res.z, 6);
        assert_eq!(res.nodes, 0);
        assert!(exact_z(&q(&[3, 3], &[2, 2])).unwrap().z < 9);
    }

    #[test]
    fn witness_is_lexicographically_first() {
        let res = exact_z(&q(&[2, 2], &[2, 2])).unwrap();
        assert_eq!(res.witness.to_zng(), "zng 2 2 2\n0 0\n0 1\n1 0\n");
    }

    #[test]
    fn rejects_bad_queries() {
        assert_eq!(ZQuery::new(vec![2], vec![2]), Err(OracleError::Shape));
        assert_eq!(ZQuery::new(vec![2, 2], vec![2]), Err(OracleError::Shape));
        assert_eq!(ZQuery::new(vec![2, 0], vec![1, 1]), Err(OracleError::ZeroSize));
        assert_eq!(
            exact_z(&q(&[7, 7], &[2, 2])),
            Err(OracleError::TooLarge { edges: 49, cap: DEFAULT_EDGE_CAP })
        );
    }

    #[test]
    fn table_rows() {
        let rows = bound_table(
            &[
                TableEntry::Oracle(q(&[3, 3], &[2, 2])),
                TableEntry::Witness { label: "construction".into(), part_sizes: vec![10, 25], s_list: vec![2, 4], edges: 50 },
            ],
            DEFAULT_EDGE_CAP,
        );
        let a = rows[0].as_ref().unwrap();
        assert_eq!(a.edges, 6);
        assert!((a.ratio - 6.0 / (3.0 * 3f64.sqrt())).abs() < 1e-12);
        let b = rows[1].as_ref().unwrap();
        assert!((b.ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ledger_format() {
        let query = q(&[2, 2], &[2, 2]);
        let res = exact_z(&query).unwrap();
        let row = ledger_row(&query, &res, "w.zng");
        assert!(row.starts_with("z(2,2;2,2)\t3\t"));
        assert!(row.ends_with("\tw.zng"));
    }
}
