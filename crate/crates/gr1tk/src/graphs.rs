//! Directed graphs with implicit self-loops: adjacency-matrix connectivity,
//! random strongly connected generation, covering-cycle search and the
//! topology-to-guarantee encoding.

use crate::ltl::{Formula, Rel, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{HashSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("edge probability {0} must exceed 1/(n-1) = {1}")]
    ProbabilityTooLow(f64, f64),
    #[error("need at least two vertices, got {0}")]
    TooSmall(usize),
    #[error("malformed graph file: {0}")]
    BadFile(String),
}

/// Directed graph over vertices `0..n` held as an adjacency matrix of
/// nonnegative integers; nonzero means edge. The diagonal is always
/// nonzero: every vertex implicitly allows staying put. Off-diagonal
/// entries are the actual topology edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    pub n: usize,
    adj: Vec<u32>,
}

/// A path: consecutive pairs are edges (self-loops permitted).
pub type Path = Vec<usize>;

impl DirectedGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        assert!(n >= 1);
        let mut adj = vec![0u32; n * n];
        for v in 0..n {
            adj[v * n + v] = 1;
        }
        for &(u, v) in edges {
            assert!(u < n && v < n, "edge ({u},{v}) out of range");
            adj[u * n + v] = 1;
        }
        DirectedGraph { n, adj }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v] != 0
    }

    /// Off-diagonal edges, ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = vec![];
        for u in 0..self.n {
            for v in 0..self.n {
                if u != v && self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Out-neighbors excluding the implicit self-loop, ascending.
    pub fn out_neighbors(&self, u: usize) -> Vec<usize> {
        (0..self.n).filter(|&v| v != u && self.has_edge(u, v)).collect()
    }

    /// In-neighbors excluding the implicit self-loop, ascending.
    pub fn in_neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| u != v && self.has_edge(u, v)).collect()
    }

    /// Successors for movement: the vertex itself plus its out-neighbors.
    pub fn move_targets(&self, u: usize) -> Vec<usize> {
        (0..self.n).filter(|&v| self.has_edge(u, v)).collect()
    }
}

/// Strong connectivity by the matrix-power method: square-and-clamp the
/// adjacency pattern n times and test that every entry is nonzero. The
/// implicit self-loops make "path of length exactly n" equivalent to
/// "path of length at most n".
pub fn is_strongly_connected(g: &DirectedGraph) -> bool {
    let n = g.n;
    let mut acc: Vec<u32> = g.adj.iter().map(|&x| u32::from(x != 0)).collect();
    for _ in 0..n {
        let mut next = vec![0u32; n * n];
        for i in 0..n {
            for k in 0..n {
                if acc[i * n + k] != 0 {
                    for j in 0..n {
                        if acc[k * n + j] != 0 {
                            next[i * n + j] = 1; // clamp: only the pattern matters
                        }
                    }
                }
            }
        }
        acc = next;
    }
    acc.iter().all(|&x| x != 0)
}

/// Erdos-Renyi generation repeated until strongly connected. One sample is
/// drawn per ordered vertex pair (diagonal included, then forced nonzero),
/// so the stream of randomness is deterministic in the seed.
pub fn generate_random_scc(n: usize, p: f64, seed: u64) -> Result<DirectedGraph, GraphError> {
    if n < 2 {
        return Err(GraphError::TooSmall(n));
    }
    let threshold = 1.0 / (n as f64 - 1.0);
    if p <= threshold {
        return Err(GraphError::ProbabilityTooLow(p, threshold));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut adj = vec![0u32; n * n];
        for cell in adj.iter_mut() {
            *cell = u32::from(rng.gen::<f64>() < p);
        }
        for v in 0..n {
            adj[v * n + v] = 1;
        }
        let g = DirectedGraph { n, adj };
        if is_strongly_connected(&g) {
            return Ok(g);
        }
    }
}

/// Shortest path starting at `u` that visits every vertex at least once and
/// whose last vertex has an edge back to `u`. Breadth-by-length frontier;
/// paths with equal (last vertex, visited set) share all continuations and
/// are deduplicated.
pub fn find_cycle(g: &DirectedGraph, u: usize) -> Path {
    debug_assert!(is_strongly_connected(g));
    if g.n == 1 {
        return vec![u];
    }
    let full: u64 = (1u64 << g.n) - 1;
    let mut frontier: Vec<(Path, u64)> = vec![(vec![u], 1u64 << u)];
    let mut seen: HashSet<(usize, u64)> = HashSet::new();
    seen.insert((u, 1u64 << u));
    loop {
        let mut extended: Vec<(Path, u64)> = vec![];
        for (p, visited) in frontier {
            let last = *p.last().unwrap();
            if visited == full && last == u {
                let mut done = p;
                done.pop();
                return done;
            }
            for v in g.move_targets(last) {
                let key = (v, visited | 1u64 << v);
                if seen.insert(key) {
                    let mut np = p.clone();
                    np.push(v);
                    extended.push((np, visited | 1u64 << v));
                }
            }
        }
        frontier = extended;
        debug_assert!(!frontier.is_empty(), "strong connectivity guarantees a cycle");
    }
}

/// Topology guarantees for one robot: per vertex `h` the conjunct
/// `[](cell = h -> X(cell = h | cell = s1 | ...))` over the move targets,
/// plus the mutual-exclusion conjunct over all positions. `cell_var` is the
/// index of the robot's position variable in the target variable table.
pub fn topology_to_guarantees(g: &DirectedGraph, cell_var: usize) -> Vec<Formula> {
    let at = |v: usize| Formula::atom(cell_var, Rel::Eq, Value::Int(v as i64));
    let mut out = vec![];
    for h in 0..g.n {
        let succ = Formula::or_all(g.move_targets(h).into_iter().map(at));
        out.push(at(h).implies(succ.next()));
    }
    out.push(Formula::or_all((0..g.n).map(at)));
    out
}

// -- file formats --

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize)>,
}

/// JSON form `{"n": .., "edges": [[u,v], ..]}`; self-loops are implicit and
/// stripped on write.
pub fn to_json(g: &DirectedGraph) -> String {
    serde_json::to_string_pretty(&GraphFile { n: g.n, edges: g.edges() })
        .expect("graph serialization")
}

pub fn from_json(text: &str) -> Result<DirectedGraph, GraphError> {
    let f: GraphFile = serde_json::from_str(text).map_err(|e| GraphError::BadFile(e.to_string()))?;
    if f.n == 0 {
        return Err(GraphError::BadFile("graph needs at least one vertex".into()));
    }
    if let Some(&(u, v)) = f.edges.iter().find(|&&(u, v)| u >= f.n || v >= f.n) {
        return Err(GraphError::BadFile(format!("edge ({u},{v}) out of range")));
    }
    Ok(DirectedGraph::from_edges(f.n, &f.edges))
}

/// Plain DOT rendering of the topology (self-loops omitted).
pub fn to_dot(g: &DirectedGraph) -> String {
    let mut out = String::from("digraph topology {\n");
    for v in 0..g.n {
        out.push_str(&format!("  v{v};\n"));
    }
    for (u, v) in g.edges() {
        out.push_str(&format!("  v{u} -> v{v};\n"));
    }
    out.push_str("}\n");
    out
}

/// The five-cell example topology used throughout the search chapters.
pub fn five_cell_topology() -> DirectedGraph {
    DirectedGraph::from_edges(
        5,
        &[(0, 1), (0, 3), (1, 0), (2, 0), (2, 4), (3, 1), (3, 2), (4, 2)],
    )
}

fn bfs_reaches_all(g: &DirectedGraph, from: usize) -> bool {
    let mut seen = vec![false; g.n];
    let mut q = VecDeque::from([from]);
    seen[from] = true;
    let mut count = 1;
    while let Some(u) = q.pop_front() {
        for v in g.out_neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                q.push_back(v);
            }
        }
    }
    count == g.n
}

/// BFS-based strong connectivity, used as an independent oracle.
pub fn is_strongly_connected_bfs(g: &DirectedGraph) -> bool {
    (0..g.n).all(|v| bfs_reaches_all(g, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_cell_topology_is_strongly_connected() {
        assert!(is_strongly_connected(&five_cell_topology()));
    }

    #[test]
    fn one_way_pair_is_not_strongly_connected() {
        let g = DirectedGraph::from_edges(2, &[(0, 1)]);
        assert!(!is_strongly_connected(&g));
    }

    #[test]
    fn matrix_power_agrees_with_bfs_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let n = rng.gen_range(2..8);
            let mut edges = vec![];
            for u in 0..n {
                for v in 0..n {
                    if u != v && rng.gen_bool(0.3) {
                        edges.push((u, v));
                    }
                }
            }
            let g = DirectedGraph::from_edges(n, &edges);
            assert_eq!(is_strongly_connected(&g), is_strongly_connected_bfs(&g));
        }
    }

    #[test]
    fn generation_is_deterministic_and_connected() {
        let a = generate_random_scc(5, 0.4, 11).unwrap();
        let b = generate_random_scc(5, 0.4, 11).unwrap();
        assert_eq!(a, b);
        assert!(is_strongly_connected(&a));
    }

    #[test]
    fn generation_rejects_threshold_probability() {
        assert!(generate_random_scc(5, 0.25, 1).is_err(), "p = 1/(n-1) exactly");
        assert!(generate_random_scc(1, 0.9, 1).is_err());
    }

    #[test]
    fn two_cycle_covering_path() {
        let g = DirectedGraph::from_edges(2, &[(0, 1), (1, 0)]);
        assert_eq!(find_cycle(&g, 0), vec![0, 1]);
    }

    #[test]
    fn complete_graph_has_hamiltonian_cycle() {
        let g = DirectedGraph::from_edges(3, &[(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]);
        let p = find_cycle(&g, 0);
        assert_eq!(p.len(), 3);
        assert_eq!(p[0], 0);
        let mut sorted = p.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2]);
    }

    // Exhaustive covering-cycle enumeration, the independent oracle for the
    // minimal length.
    fn brute_min_cycle_len(g: &DirectedGraph, u: usize) -> usize {
        let mut best = usize::MAX;
        let mut stack: Vec<Path> = vec![vec![u]];
        while let Some(p) = stack.pop() {
            if p.len() >= best || p.len() > 2 * g.n {
                continue;
            }
            let covers = (0..g.n).all(|v| p.contains(&v));
            if covers && g.has_edge(*p.last().unwrap(), u) {
                best = best.min(p.len());
                continue;
            }
            for v in g.move_targets(*p.last().unwrap()) {
                let mut np = p.clone();
                np.push(v);
                stack.push(np);
            }
        }
        best
    }

    #[test]
    fn find_cycle_is_minimal_on_the_five_cell_topology() {
        let g = five_cell_topology();
        let p = find_cycle(&g, 0);
        assert_eq!(p[0], 0);
        for w in p.windows(2) {
            assert!(g.has_edge(w[0], w[1]));
        }
        for v in 0..g.n {
            assert!(p.contains(&v), "vertex {v} uncovered");
        }
        assert!(g.has_edge(*p.last().unwrap(), 0));
        assert_eq!(p.len(), brute_min_cycle_len(&g, 0));
    }

    #[test]
    fn deduplication_preserves_minimal_length() {
        // The frontier dedup must not change results vs the naive search.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..30 {
            let n = 2 + trial % 5;
            let g = generate_random_scc(n, 0.5, rng.gen()).unwrap();
            for u in 0..n {
                assert_eq!(find_cycle(&g, u).len(), brute_min_cycle_len(&g, u), "n={n} u={u}");
            }
        }
    }

    #[test]
    fn topology_guarantees_match_the_five_cell_display() {
        use crate::ltl::VarDecl;
        let g = five_cell_topology();
        let decls = vec![VarDecl::int("cellID", 0, 4)];
        let fs = topology_to_guarantees(&g, 0);
        assert_eq!(fs.len(), 6, "five vertex conjuncts plus mutual exclusion");
        let shown: Vec<String> = fs.iter().map(|f| f.display(&decls).to_string()).collect();
        assert_eq!(shown[0], "cellID = 0 -> X(cellID = 0 | cellID = 1 | cellID = 3)");
        assert_eq!(shown[1], "cellID = 1 -> X(cellID = 0 | cellID = 1)");
        assert_eq!(shown[4], "cellID = 4 -> X(cellID = 2 | cellID = 4)");
    }

    #[test]
    fn single_vertex_topology_guarantee() {
        let g = DirectedGraph::from_edges(1, &[]);
        let fs = topology_to_guarantees(&g, 0);
        assert_eq!(fs.len(), 2);
        assert_eq!(find_cycle(&g, 0), vec![0]);
    }

    #[test]
    fn json_round_trip_strips_self_loops() {
        let g = five_cell_topology();
        let text = to_json(&g);
        assert!(!text.contains("[0,0]"), "no self-loop entries");
        let back = from_json(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn generation_terminates_over_many_seeds() {
        // Termination on the survey-scale parameters; regeneration counts
        // stay small because the giant component dominates.
        for seed in 0..50 {
            let g = generate_random_scc(10, 0.3, seed).unwrap();
            assert!(is_strongly_connected(&g));
        }
    }
}
