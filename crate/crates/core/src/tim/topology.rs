use serde::Serialize;

use super::TimError;
use crate::exactla::{IndexSet, MAX_UNIVERSE};

/// Largest graph accepted by [`chromatic_number`].
pub const MAX_COLORING_VERTICES: usize = 20;

/// `K` users; `interference[j]` is the set of transmitters heard at receiver `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Topology {
    k: usize,
    interference: Vec<IndexSet>,
}

impl Topology {
    pub fn new(interference: Vec<IndexSet>) -> Result<Self, TimError> {
        let k = interference.len();
        if k == 0 {
            return Err(TimError::Topology("at least one user is required".into()));
        }
        if k > MAX_UNIVERSE {
            return Err(TimError::Topology(format!("{k} users exceed {MAX_UNIVERSE}")));
        }
        for (j, set) in interference.iter().enumerate() {
            if set.universe() != k {
                return Err(TimError::Topology(format!(
                    "interference set of receiver {} is over [{}], expected [{k}]",
                    j + 1,
                    set.universe()
                )));
            }
            if set.contains(j) {
                return Err(TimError::Topology(format!("receiver {} lists its own transmitter", j + 1)));
            }
        }
        Ok(Topology { k, interference })
    }

    /// From 1-based member lists.
    pub fn from_lists(lists: &[Vec<usize>]) -> Result<Self, TimError> {
        let k = lists.len();
        let sets = lists
            .iter()
            .enumerate()
            .map(|(j, l)| {
                IndexSet::from_one_based(k, l.iter().copied())
                    .map_err(|e| TimError::Topology(format!("receiver {}: {e}", j + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(sets)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `I_j` for 0-based receiver `j`.
    pub fn interferers(&self, j: usize) -> &IndexSet {
        &self.interference[j]
    }

    pub fn interference_sets(&self) -> &[IndexSet] {
        &self.interference
    }

    pub fn link_count(&self) -> usize {
        self.interference.iter().map(IndexSet::len).sum()
    }

    /// Receivers whose interference set has exactly two members.
    pub fn alignment_receivers(&self) -> Vec<usize> {
        (0..self.k).filter(|&j| self.interference[j].len() == 2).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Regular,
    Reduced,
}

/// Directed graph on users; edges `(from, to)` are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConflictGraph {
    k: usize,
    edges: Vec<(usize, usize)>,
    flavor: Flavor,
}

impl ConflictGraph {
    fn new(k: usize, mut edges: Vec<(usize, usize)>, flavor: Flavor) -> Self {
        edges.sort_unstable();
        edges.dedup();
        ConflictGraph { k, edges, flavor }
    }

    /// Arbitrary directed graph; self-loops are dropped.
    pub fn from_edges(k: usize, edges: &[(usize, usize)]) -> Self {
        let edges = edges.iter().copied().filter(|(a, b)| a != b && *a < k && *b < k).collect();
        Self::new(k, edges, Flavor::Regular)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Edges as 1-based pairs.
    pub fn edges_one_based(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|&(a, b)| (a + 1, b + 1)).collect()
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.binary_search(&(from, to)).is_ok()
    }

    pub fn has_outgoing(&self, v: usize) -> bool {
        self.edges.iter().any(|&(a, _)| a == v)
    }

    /// Undirected neighbor masks.
    pub fn neighbor_masks(&self) -> Vec<u64> {
        let mut adj = vec![0u64; self.k];
        for &(a, b) in &self.edges {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        adj
    }

    pub fn is_isolated(&self, v: usize) -> bool {
        self.neighbor_masks()[v] == 0
    }
}

/// Edge `i → j` whenever `i ∈ I_j`.
pub fn regular_conflict_graph(t: &Topology) -> ConflictGraph {
    let edges = (0..t.k())
        .flat_map(|j| t.interferers(j).iter().map(move |i| (i, j)))
        .collect();
    ConflictGraph::new(t.k(), edges, Flavor::Regular)
}

/// Edge `i → j` whenever `i ∈ I_j` and transmitter `i` also interferes at some
/// receiver together with another transmitter.
pub fn reduced_conflict_graph(t: &Topology) -> ConflictGraph {
    let shared: Vec<bool> = (0..t.k())
        .map(|i| (0..t.k()).any(|k| t.interferers(k).contains(i) && t.interferers(k).len() >= 2))
        .collect();
    let edges = regular_conflict_graph(t)
        .edges
        .into_iter()
        .filter(|&(i, _)| shared[i])
        .collect();
    ConflictGraph::new(t.k(), edges, Flavor::Reduced)
}

/// Two-coloring of the underlying undirected graph by breadth-first search in
/// index order (the lowest uncolored vertex of each component gets part 0).
/// Returns `None` when an odd cycle exists.
pub fn two_coloring(g: &ConflictGraph) -> Option<Vec<u8>> {
    let adj = g.neighbor_masks();
    let mut color = vec![u8::MAX; g.k()];
    for start in 0..g.k() {
        if color[start] != u8::MAX {
            continue;
        }
        color[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for w in (0..g.k()).filter(|&w| adj[v] >> w & 1 == 1) {
                if color[w] == u8::MAX {
                    color[w] = 1 - color[v];
                    queue.push_back(w);
                } else if color[w] == color[v] {
                    return None;
                }
            }
        }
    }
    Some(color)
}

/// Bipartiteness plus the two parts (1-based members) when bipartite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bipartition {
    pub bipartite: bool,
    pub parts: Option<[Vec<usize>; 2]>,
}

pub fn is_bipartite(g: &ConflictGraph) -> Bipartition {
    match two_coloring(g) {
        Some(c) => {
            let part = |p: u8| (0..g.k()).filter(|&v| c[v] == p).map(|v| v + 1).collect();
            Bipartition {
                bipartite: true,
                parts: Some([part(0), part(1)]),
            }
        }
        None => Bipartition {
            bipartite: false,
            parts: None,
        },
    }
}

/// Exact chromatic number and an optimal coloring (colors `0..χ`) of the
/// undirected graph given by neighbor masks. Vertices are colored in index
/// order, each taking the smallest feasible color first.
pub fn color_masks(adj: &[u64]) -> Result<(usize, Vec<usize>), TimError> {
    let k = adj.len();
    if k > MAX_COLORING_VERTICES {
        return Err(TimError::Capacity(format!(
            "{k} vertices exceed the coloring limit {MAX_COLORING_VERTICES}"
        )));
    }
    if k == 0 {
        return Ok((0, Vec::new()));
    }
    fn fits(adj: &[u64], colors: &mut Vec<usize>, v: usize, limit: usize) -> bool {
        if v == adj.len() {
            return true;
        }
        let used = colors.iter().copied().max().map_or(0, |m| m + 1);
        // a fresh color beyond `used` is symmetric to any other fresh color
        for c in 0..limit.min(used + 1) {
            let clash = (0..v).any(|w| adj[v] >> w & 1 == 1 && colors[w] == c);
            if clash {
                continue;
            }
            colors.push(c);
            if fits(adj, colors, v + 1, limit) {
                return true;
            }
            colors.pop();
        }
        false
    }
    for limit in 1..=k {
        let mut colors = Vec::with_capacity(k);
        if fits(adj, &mut colors, 0, limit) {
            return Ok((limit, colors));
        }
    }
    unreachable!("k colors always suffice")
}

/// Chromatic number of the underlying undirected graph (1 for an edgeless graph).
pub fn chromatic_number(g: &ConflictGraph) -> Result<usize, TimError> {
    Ok(color_masks(&g.neighbor_masks())?.0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "property")]
pub enum PropertyViolation {
    /// `|I_j| > 2`; receiver 1-based.
    P1 { receiver: usize, size: usize },
    /// Two receivers (1-based), at least one with a size-2 set, sharing `transmitters`.
    P2 { receivers: (usize, usize), transmitters: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub p1: bool,
    pub p2: bool,
    pub violations: Vec<PropertyViolation>,
}

impl PropertyReport {
    pub fn holds(&self) -> bool {
        self.p1 && self.p2
    }
}

/// (P1) every interference set has at most two members; (P2) a size-2 set
/// shares no transmitter with any other receiver's set.
pub fn check_p1_p2(t: &Topology) -> PropertyReport {
    let mut violations = Vec::new();
    for j in 0..t.k() {
        let size = t.interferers(j).len();
        if size > 2 {
            violations.push(PropertyViolation::P1 { receiver: j + 1, size });
        }
    }
    let p1 = violations.is_empty();
    let mut p2 = true;
    for j in 0..t.k() {
        for k in j + 1..t.k() {
            let (a, b) = (t.interferers(j), t.interferers(k));
            if a.len().max(b.len()) != 2 {
                continue;
            }
            let common = a.intersection(b);
            if !common.is_empty() {
                p2 = false;
                violations.push(PropertyViolation::P2 {
                    receivers: (j + 1, k + 1),
                    transmitters: common.one_based(),
                });
            }
        }
    }
    PropertyReport { p1, p2, violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn t6() -> Topology {
        Topology::from_lists(&[vec![6], vec![6], vec![6], vec![2, 5], vec![3, 4], vec![1]]).unwrap()
    }

    fn t9a() -> Topology {
        let mut l = vec![vec![2, 4], vec![3, 5], vec![1, 6]];
        l.resize(9, vec![]);
        Topology::from_lists(&l).unwrap()
    }

    fn t9b() -> Topology {
        Topology::from_lists(&[
            vec![2, 3],
            vec![7],
            vec![4, 5],
            vec![7],
            vec![6, 1],
            vec![7],
            vec![],
            vec![],
            vec![7, 8],
        ])
        .unwrap()
    }

    fn one_based(edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
        let mut e = edges.to_vec();
        e.sort_unstable();
        e.iter().map(|&(a, b)| (a - 1, b - 1)).collect()
    }

    #[test]
    fn t6_graphs() {
        let reg = regular_conflict_graph(&t6());
        let mut want = one_based(&[(6, 1), (6, 2), (6, 3), (2, 4), (5, 4), (3, 5), (4, 5), (1, 6)]);
        want.sort_unstable();
        assert_eq!(reg.edges(), want.as_slice());
        let red = reduced_conflict_graph(&t6());
        let mut want = one_based(&[(2, 4), (5, 4), (3, 5), (4, 5)]);
        want.sort_unstable();
        assert_eq!(red.edges(), want.as_slice());
        assert!(red.edges().iter().all(|&(a, b)| reg.has_edge(a, b)));

        assert!(is_bipartite(&red).bipartite);
        assert!(!is_bipartite(&reg).bipartite);
        assert_eq!(chromatic_number(&reg).unwrap(), 3);
    }

    #[test]
    fn small_graphs() {
        let none = Topology::from_lists(&[vec![], vec![], vec![]]).unwrap();
        assert!(regular_conflict_graph(&none).edges().is_empty());
        assert!(reduced_conflict_graph(&none).edges().is_empty());
        assert_eq!(chromatic_number(&regular_conflict_graph(&none)).unwrap(), 1);

        let pair = Topology::from_lists(&[vec![], vec![1]]).unwrap();
        assert_eq!(regular_conflict_graph(&pair).edges(), &[(0, 1)]);
        assert!(reduced_conflict_graph(&pair).edges().is_empty());

        let shared = Topology::from_lists(&[vec![], vec![], vec![1, 2]]).unwrap();
        assert_eq!(reduced_conflict_graph(&shared).edges(), &[(0, 2), (1, 2)]);

        let triangle = ConflictGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]);
        assert!(!is_bipartite(&triangle).bipartite);
        let c5 = ConflictGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(chromatic_number(&c5).unwrap(), 3);
        let k4 = ConflictGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(chromatic_number(&k4).unwrap(), 4);
        assert!(color_masks(&[0; 21]).is_err());
    }

    #[test]
    fn self_interference_rejected() {
        assert!(Topology::from_lists(&[vec![1]]).is_err());
        assert!(Topology::from_lists(&[vec![3], vec![]]).is_err());
    }

    #[test]
    fn properties() {
        let r = check_p1_p2(&t9a());
        assert!(r.holds(), "{r:?}");
        let r = check_p1_p2(&t9b());
        assert!(r.p1 && !r.p2);
        assert!(r.violations.contains(&PropertyViolation::P2 {
            receivers: (2, 9),
            transmitters: vec![7]
        }));
        let wide = Topology::from_lists(&[vec![2, 3, 4], vec![], vec![], vec![]]).unwrap();
        assert!(!check_p1_p2(&wide).p1);
        assert!(check_p1_p2(&t6()).holds());
    }

    #[test]
    fn t9a_reduced_triangle() {
        let g = reduced_conflict_graph(&t9a());
        assert_eq!(chromatic_number(&g).unwrap(), 3);
        assert!(g.has_edge(1, 0) && g.has_edge(2, 1) && g.has_edge(0, 2));
    }
}
