//! The cops-and-robbers clearing engine: edge and vertex states, the
//! deterministic clearing move, recontamination, start-vertex heuristics,
//! brute-force cop numbers and the heuristics survey.

use crate::graphs::{generate_random_scc, DirectedGraph};
use std::collections::{BTreeSet, HashMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PursuitError {
    #[error("vertex {0} is not contaminated")]
    NotContaminated(usize),
    #[error("no clearing sequence with at most {0} robots")]
    ExceedsMaxK(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeState {
    Cleared,
    Contaminated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexState {
    Cleared,
    PartiallyCleared,
    Critical,
    Contaminated,
}

/// Per-edge cleared/contaminated flags plus guard positions. Vertex states
/// are always derived. The topology's implicit self-loops are movement
/// permissions, not clearable edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphClearState {
    pub graph: DirectedGraph,
    edge_list: Vec<(usize, usize)>,
    cleared: Vec<bool>,
    pub guards: BTreeSet<usize>,
    /// Vertices currently designated start vertices (maintained by the
    /// simulation's global storage; the engine itself recomputes choices).
    pub start_marks: BTreeSet<usize>,
}

impl GraphClearState {
    /// All edges contaminated, no guards.
    pub fn contaminated(graph: DirectedGraph) -> Self {
        let edge_list = graph.edges();
        let cleared = vec![false; edge_list.len()];
        GraphClearState {
            graph,
            edge_list,
            cleared,
            guards: BTreeSet::new(),
            start_marks: BTreeSet::new(),
        }
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_list.binary_search(&(u, v)).ok()
    }

    pub fn edge_state(&self, u: usize, v: usize) -> Option<EdgeState> {
        self.edge_index(u, v).map(|i| {
            if self.cleared[i] {
                EdgeState::Cleared
            } else {
                EdgeState::Contaminated
            }
        })
    }

    pub fn set_cleared(&mut self, u: usize, v: usize) {
        if let Some(i) = self.edge_index(u, v) {
            self.cleared[i] = true;
        }
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edge_list
    }

    pub fn cleared_edges(&self) -> Vec<(usize, usize)> {
        self.edge_list
            .iter()
            .zip(&self.cleared)
            .filter_map(|(&e, &c)| c.then_some(e))
            .collect()
    }

    pub fn all_cleared(&self) -> bool {
        self.cleared.iter().all(|&c| c)
    }

    pub fn contaminated_in_degree(&self, v: usize) -> usize {
        self.graph
            .in_neighbors(v)
            .into_iter()
            .filter(|&u| self.edge_state(u, v) == Some(EdgeState::Contaminated))
            .count()
    }

    fn contaminated_out_edges(&self, u: usize) -> Vec<usize> {
        self.graph
            .out_neighbors(u)
            .into_iter()
            .filter(|&v| self.edge_state(u, v) == Some(EdgeState::Contaminated))
            .collect()
    }

    /// Compact digest of the edge flags, for traces.
    pub fn digest(&self) -> String {
        self.cleared.iter().map(|&c| if c { '1' } else { '0' }).collect()
    }
}

/// Derived vertex state: cleared when all in- and out-edges are cleared;
/// partially cleared when all in-edges are cleared and some out-edge is
/// not; contaminated when some in-edge and all out-edges are contaminated
/// and no guard is posted; critical otherwise.
pub fn vertex_state(s: &GraphClearState, v: usize) -> VertexState {
    let ins = s.graph.in_neighbors(v);
    let outs = s.graph.out_neighbors(v);
    let in_cleared = ins.iter().all(|&u| s.edge_state(u, v) == Some(EdgeState::Cleared));
    let out_cleared = outs.iter().all(|&w| s.edge_state(v, w) == Some(EdgeState::Cleared));
    let any_in_contaminated = !in_cleared;
    let all_out_contaminated =
        outs.iter().all(|&w| s.edge_state(v, w) == Some(EdgeState::Contaminated));
    if in_cleared && out_cleared {
        VertexState::Cleared
    } else if in_cleared {
        VertexState::PartiallyCleared
    } else if any_in_contaminated && all_out_contaminated && !s.guards.contains(&v) {
        VertexState::Contaminated
    } else {
        VertexState::Critical
    }
}

/// The graph is cleared when every vertex is cleared, partially cleared or
/// guarded.
pub fn graph_cleared(s: &GraphClearState) -> bool {
    (0..s.graph.n).all(|v| {
        matches!(
            vertex_state(s, v),
            VertexState::Cleared | VertexState::PartiallyCleared
        ) || s.guards.contains(&v)
    })
}

/// Propagate recontamination to a fixpoint: every unguarded critical or
/// contaminated vertex contaminates all its out-edges. Idempotent; only
/// flips cleared edges to contaminated.
pub fn recontaminate(s: &GraphClearState) -> GraphClearState {
    let mut cur = s.clone();
    loop {
        let mut changed = false;
        for v in 0..cur.graph.n {
            if cur.guards.contains(&v) {
                continue;
            }
            if matches!(
                vertex_state(&cur, v),
                VertexState::Critical | VertexState::Contaminated
            ) {
                for w in cur.graph.out_neighbors(v) {
                    if cur.edge_state(v, w) == Some(EdgeState::Cleared) {
                        if let Some(i) = cur.edge_index(v, w) {
                            cur.cleared[i] = false;
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            return cur;
        }
    }
}

/// Robot bookkeeping for clearing moves: a FIFO of free robots, the FIFO of
/// guards, and the log of start vertices. With `on_demand`, fresh robots
/// are materialized instead of withdrawing guards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClearingContext {
    pub free: VecDeque<usize>,
    pub guards: VecDeque<(usize, usize)>, // (robot, vertex)
    pub log: Vec<usize>,
    pub on_demand: bool,
    next_robot: usize,
}

impl ClearingContext {
    pub fn with_robots(k: usize) -> Self {
        ClearingContext {
            free: (0..k).collect(),
            guards: VecDeque::new(),
            log: vec![],
            on_demand: false,
            next_robot: k,
        }
    }

    pub fn on_demand() -> Self {
        ClearingContext {
            free: VecDeque::new(),
            guards: VecDeque::new(),
            log: vec![],
            on_demand: true,
            next_robot: 0,
        }
    }

    /// Total robots materialized so far.
    pub fn robots_materialized(&self) -> usize {
        self.next_robot
    }

    // Draw a robot to act: the free FIFO head; on demand a fresh robot;
    // otherwise the oldest guard is withdrawn, which may recontaminate.
    fn draw(&mut self, s: &mut GraphClearState, remove_from_free: bool) -> usize {
        if let Some(&r) = self.free.front() {
            if remove_from_free {
                self.free.pop_front();
            }
            return r;
        }
        if self.on_demand {
            let r = self.next_robot;
            self.next_robot += 1;
            if !remove_from_free {
                self.free.push_back(r);
            }
            return r;
        }
        let (r, v) = self.guards.pop_front().expect("some robot exists");
        s.guards.remove(&v);
        *s = recontaminate(s);
        if !remove_from_free {
            self.free.push_back(r);
        }
        r
    }
}

/// Execute one deterministic clearing move from `start`:
/// S1 guards the start vertex, S2 slides its out-edges clear in ascending
/// destination order, S3 sweeps partially cleared vertices in ascending
/// index order, S4 releases the guard if the start vertex ends up cleared.
/// Returns the peak number of robots simultaneously deployed.
pub fn execute_clearing_move(
    ctx: &mut ClearingContext,
    s: &mut GraphClearState,
    start: usize,
) -> Result<usize, PursuitError> {
    if vertex_state(s, start) != VertexState::Contaminated {
        return Err(PursuitError::NotContaminated(start));
    }
    let mut peak = 0usize;
    // S1: post the guard.
    let guard = ctx.draw(s, true);
    ctx.guards.push_back((guard, start));
    s.guards.insert(start);
    ctx.log.push(start);
    peak = peak.max(ctx.guards.len());

    // S2: slide the start's out-edges clear.
    for u in s.graph.out_neighbors(start) {
        if s.edge_state(start, u) == Some(EdgeState::Cleared) {
            continue;
        }
        let _slider = ctx.draw(s, false);
        peak = peak.max(ctx.guards.len() + 1);
        s.set_cleared(start, u);
    }

    // S3: sweep partially cleared vertices, lowest index first.
    loop {
        let Some(p) = (0..s.graph.n).find(|&v| vertex_state(s, v) == VertexState::PartiallyCleared)
        else {
            break;
        };
        let _slider = ctx.draw(s, false);
        peak = peak.max(ctx.guards.len() + 1);
        for q in s.contaminated_out_edges(p) {
            s.set_cleared(p, q);
        }
    }

    // S4: release the guard if the start vertex is now cleared.
    if vertex_state(s, start) == VertexState::Cleared {
        if let Some(pos) = ctx.guards.iter().position(|&(_, v)| v == start) {
            let (r, v) = ctx.guards.remove(pos).unwrap();
            s.guards.remove(&v);
            ctx.free.push_back(r);
            *s = recontaminate(s); // identity: a cleared vertex cannot recontaminate
        }
    }
    Ok(peak)
}

/// Locally observable quantities before a clearing move.
#[derive(Debug, Clone)]
pub struct HeuristicsView {
    /// Vertices whose state a robot can observe.
    pub observable: Vec<usize>,
    /// Cleared edges.
    pub cleared_edges: Vec<(usize, usize)>,
    /// Observable critical/contaminated vertices with a contaminated in-edge.
    pub candidates: Vec<usize>,
    /// Minimum contaminated in-degree over the candidates; None is infinity.
    pub mu: Option<usize>,
    /// Maximum contaminated out-degree towards mu-clear-candidates; None is
    /// minus infinity.
    pub nu: Option<usize>,
    pub mu_clear_candidates: Vec<usize>,
    pub nu_start_candidates: Vec<usize>,
}

/// Compute the observable set and the mu/nu candidate structure. Before the
/// first clearing move the whole vertex set is observable; afterwards a
/// vertex is observable iff it is an endpoint of a cleared edge or connected
/// by one edge to such an endpoint.
pub fn heuristics_view(s: &GraphClearState, first_move: bool) -> HeuristicsView {
    let n = s.graph.n;
    let cleared_edges = s.cleared_edges();
    let observable: Vec<usize> = if first_move {
        (0..n).collect()
    } else {
        let mut endpoints = BTreeSet::new();
        for &(p, q) in &cleared_edges {
            endpoints.insert(p);
            endpoints.insert(q);
        }
        (0..n)
            .filter(|&v| {
                endpoints.contains(&v)
                    || s.graph.out_neighbors(v).iter().any(|w| endpoints.contains(w))
                    || s.graph.in_neighbors(v).iter().any(|w| endpoints.contains(w))
            })
            .collect()
    };
    let candidates: Vec<usize> = observable
        .iter()
        .copied()
        .filter(|&v| {
            matches!(
                vertex_state(s, v),
                VertexState::Critical | VertexState::Contaminated
            ) && s.contaminated_in_degree(v) >= 1
        })
        .collect();
    let mu = candidates.iter().map(|&v| s.contaminated_in_degree(v)).min();
    let mu_clear_candidates: Vec<usize> = match mu {
        None => vec![],
        Some(m) => observable
            .iter()
            .copied()
            .filter(|&v| s.contaminated_in_degree(v) == m)
            .collect(),
    };
    let out_to_mu = |v: usize| {
        s.contaminated_out_edges(v)
            .into_iter()
            .filter(|w| mu_clear_candidates.contains(w))
            .count()
    };
    let nu = if mu.is_none() {
        None
    } else {
        observable.iter().map(|&v| out_to_mu(v)).max()
    };
    let nu_start_candidates: Vec<usize> = match nu {
        None => vec![],
        Some(x) => observable.iter().copied().filter(|&v| out_to_mu(v) == x).collect(),
    };
    HeuristicsView {
        observable,
        cleared_edges,
        candidates,
        mu,
        nu,
        mu_clear_candidates,
        nu_start_candidates,
    }
}

/// Select the next start vertex by the priority rules:
/// contaminated (filter), connected cleared-subgraph lookahead (filter),
/// nu-start-candidate not mu-clear-candidate, nu-start-candidate that is,
/// minimum in-degree, maximum out-degree, the optional contaminated
/// out-degree-of-destinations sum, then the lowest index.
pub fn select_start_vertex(
    s: &GraphClearState,
    view: &HeuristicsView,
    enable_h7: bool,
) -> Option<usize> {
    // H1: start vertices are contaminated.
    let h1: Vec<usize> = view
        .observable
        .iter()
        .copied()
        .filter(|&v| vertex_state(s, v) == VertexState::Contaminated)
        .collect();
    if h1.is_empty() {
        return None;
    }
    // H2: after the candidate move, the cleared-edge graph must stay weakly
    // connected. Evaluated on a scratch copy; if nothing passes, the filter
    // is dropped (a start vertex must still be produced).
    let connected_after = |v: usize| {
        let mut scratch = s.clone();
        let mut ctx = ClearingContext::on_demand();
        if execute_clearing_move(&mut ctx, &mut scratch, v).is_err() {
            return false;
        }
        weakly_connected(&scratch)
    };
    let mut pool: Vec<usize> = h1.iter().copied().filter(|&v| connected_after(v)).collect();
    if pool.is_empty() {
        pool = h1;
    }
    // H3 / H4: prefer nu-start-candidates, first those that are not
    // mu-clear-candidates.
    let h3: Vec<usize> = pool
        .iter()
        .copied()
        .filter(|v| view.nu_start_candidates.contains(v) && !view.mu_clear_candidates.contains(v))
        .collect();
    if !h3.is_empty() {
        pool = h3;
    } else {
        let h4: Vec<usize> = pool
            .iter()
            .copied()
            .filter(|v| view.nu_start_candidates.contains(v) && view.mu_clear_candidates.contains(v))
            .collect();
        if !h4.is_empty() {
            pool = h4;
        }
    }
    // H5: minimum in-degree.
    let min_in = pool.iter().map(|&v| s.graph.in_neighbors(v).len()).min().unwrap();
    pool.retain(|&v| s.graph.in_neighbors(v).len() == min_in);
    // H6: maximum out-degree.
    let max_out = pool.iter().map(|&v| s.graph.out_neighbors(v).len()).max().unwrap();
    pool.retain(|&v| s.graph.out_neighbors(v).len() == max_out);
    // H7 (optional): maximum sum of contaminated out-degrees over the
    // destinations of the vertex's out-edges.
    if enable_h7 && pool.len() > 1 {
        let score = |v: usize| -> usize {
            s.graph
                .out_neighbors(v)
                .into_iter()
                .map(|w| s.contaminated_out_edges(w).len())
                .sum()
        };
        let best = pool.iter().map(|&v| score(v)).max().unwrap();
        pool.retain(|&v| score(v) == best);
    }
    pool.into_iter().min()
}

// Weak connectivity of the graph induced by the cleared edges.
fn weakly_connected(s: &GraphClearState) -> bool {
    let edges = s.cleared_edges();
    if edges.is_empty() {
        return true;
    }
    let mut verts = BTreeSet::new();
    for &(u, v) in &edges {
        verts.insert(u);
        verts.insert(v);
    }
    let verts: Vec<usize> = verts.into_iter().collect();
    let index = |v: usize| verts.binary_search(&v).unwrap();
    let mut seen = vec![false; verts.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(i) = stack.pop() {
        let v = verts[i];
        for &(a, b) in &edges {
            let other = if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            };
            if let Some(o) = other {
                let oi = index(o);
                if !seen[oi] {
                    seen[oi] = true;
                    count += 1;
                    stack.push(oi);
                }
            }
        }
    }
    count == verts.len()
}

/// Outcome of the deterministic heuristics-driven run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeuristicsRun {
    pub robots: usize,
    pub cleared: bool,
    pub moves: usize,
}

/// Run the heuristics until the graph is cleared (or no observable
/// contaminated vertex remains), materializing robots on demand.
pub fn heuristics_run(g: &DirectedGraph, enable_h7: bool) -> HeuristicsRun {
    let mut s = GraphClearState::contaminated(g.clone());
    let mut ctx = ClearingContext::on_demand();
    let mut moves = 0;
    while !s.all_cleared() {
        let first = s.cleared_edges().is_empty() && ctx.log.is_empty();
        let view = heuristics_view(&s, first);
        let Some(start) = select_start_vertex(&s, &view, enable_h7) else {
            return HeuristicsRun { robots: ctx.robots_materialized(), cleared: false, moves };
        };
        execute_clearing_move(&mut ctx, &mut s, start).expect("selected start is contaminated");
        moves += 1;
    }
    HeuristicsRun { robots: ctx.robots_materialized(), cleared: true, moves }
}

/// Robots demanded by the single deterministic heuristics-driven run.
/// A run that fails to clear the graph reports `usize::MAX`.
pub fn robots_with_heuristics(g: &DirectedGraph, enable_h7: bool) -> usize {
    let r = heuristics_run(g, enable_h7);
    if r.cleared {
        r.robots
    } else {
        usize::MAX
    }
}

/// Smallest robot count for which some start-vertex sequence clears the
/// graph, by memoized search over the deterministic clearing-move engine.
pub fn cop_number_bruteforce(g: &DirectedGraph, max_k: usize) -> Result<usize, PursuitError> {
    if g.n == 1 {
        // No clearable edges; one robot occupies the only vertex.
        return if max_k >= 1 { Ok(1) } else { Err(PursuitError::ExceedsMaxK(max_k)) };
    }
    for k in 1..=max_k {
        if clearable_with(g, k) {
            return Ok(k);
        }
    }
    Err(PursuitError::ExceedsMaxK(max_k))
}

fn clearable_with(g: &DirectedGraph, k: usize) -> bool {
    #[derive(PartialEq, Eq, Hash, Clone)]
    struct Key {
        cleared: Vec<bool>,
        guards: Vec<usize>, // guard vertices in FIFO order
    }
    let depth_cap = g.n * g.n;
    let mut memo: HashMap<Key, bool> = HashMap::new();

    fn rec(
        g: &DirectedGraph,
        k: usize,
        s: &GraphClearState,
        guards_fifo: &VecDeque<(usize, usize)>,
        depth: usize,
        depth_cap: usize,
        memo: &mut HashMap<Key, bool>,
    ) -> bool {
        if s.all_cleared() {
            return true;
        }
        if depth >= depth_cap {
            return false;
        }
        let key = Key {
            cleared: s.edges().iter().map(|&(u, v)| {
                s.edge_state(u, v) == Some(EdgeState::Cleared)
            }).collect(),
            guards: guards_fifo.iter().map(|&(_, v)| v).collect(),
        };
        if let Some(&r) = memo.get(&key) {
            return r;
        }
        memo.insert(key.clone(), false); // cycles fail
        let mut ok = false;
        for v in 0..g.n {
            if vertex_state(s, v) != VertexState::Contaminated {
                continue;
            }
            let mut s2 = s.clone();
            let mut ctx = ClearingContext::with_robots(k);
            // Reconstruct the robot pools: guards keep their FIFO order,
            // remaining robots are free. Identities are immaterial to the
            // state evolution.
            ctx.guards = guards_fifo.clone();
            ctx.free = (guards_fifo.len()..k).collect();
            if execute_clearing_move(&mut ctx, &mut s2, v).is_err() {
                continue;
            }
            if rec(g, k, &s2, &ctx.guards, depth + 1, depth_cap, memo) {
                ok = true;
                break;
            }
        }
        memo.insert(key, ok);
        ok
    }

    let s = GraphClearState::contaminated(g.clone());
    rec(g, k, &s, &VecDeque::new(), 0, depth_cap, &mut memo)
}

/// Random-graph survey: how many of `samples` strongly connected graphs on
/// `n` vertices defeat the heuristics (more robots demanded than the cop
/// number, or no clearing at all).
pub fn survey(n: usize, samples: usize, seed: u64) -> usize {
    let p = 2.0 / (n as f64 - 1.0);
    let mut counterexamples = 0;
    for i in 0..samples {
        let g = generate_random_scc(n, p, seed.wrapping_add(i as u64)).expect("valid parameters");
        let brute = cop_number_bruteforce(&g, n + 1).expect("clearable within n+1 robots");
        let run = heuristics_run(&g, false);
        if !run.cleared || run.robots > brute {
            counterexamples += 1;
        }
    }
    counterexamples
}

/// The five-vertex counterexample topology on which the heuristics may
/// demand four robots although three suffice.
pub fn heuristics_counterexample_topology() -> DirectedGraph {
    DirectedGraph::from_edges(
        5,
        &[
            (0, 1),
            (0, 2),
            (0, 3),
            (0, 4),
            (1, 0),
            (1, 2),
            (2, 1),
            (2, 3),
            (2, 4),
            (3, 4),
            (4, 0),
            (4, 2),
            (4, 3),
        ],
    )
}

/// The two-vertex topology on which a single pursuer can be evaded forever.
pub fn evasion_pair_topology() -> DirectedGraph {
    DirectedGraph::from_edges(2, &[(0, 1), (1, 0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::five_cell_topology;

    #[test]
    fn initially_every_vertex_is_contaminated() {
        let s = GraphClearState::contaminated(five_cell_topology());
        for v in 0..5 {
            assert_eq!(vertex_state(&s, v), VertexState::Contaminated);
        }
    }

    #[test]
    fn all_cleared_edges_give_cleared_vertices() {
        let mut s = GraphClearState::contaminated(five_cell_topology());
        for (u, v) in s.edges().to_vec() {
            s.set_cleared(u, v);
        }
        for v in 0..5 {
            assert_eq!(vertex_state(&s, v), VertexState::Cleared);
        }
    }

    #[test]
    fn cleared_in_edges_with_contaminated_out_edge_is_partially_cleared() {
        let mut s = GraphClearState::contaminated(five_cell_topology());
        // v3's only in-edge is (0,3); its out-edges stay contaminated.
        s.set_cleared(0, 3);
        assert_eq!(vertex_state(&s, 3), VertexState::PartiallyCleared);
    }

    #[test]
    fn recontaminate_is_identity_without_exposed_vertices() {
        let s = GraphClearState::contaminated(five_cell_topology());
        assert_eq!(recontaminate(&s), s);
    }

    #[test]
    fn guard_withdrawal_recontaminates_out_edges() {
        let g = five_cell_topology();
        let mut s = GraphClearState::contaminated(g);
        s.guards.insert(0);
        s.set_cleared(0, 1);
        s.set_cleared(0, 3);
        // Guarded: stable.
        assert_eq!(recontaminate(&s), s);
        // Withdraw the guard: vertex 0 is critical, its out-edges flip back.
        s.guards.remove(&0);
        let after = recontaminate(&s);
        assert_eq!(after.edge_state(0, 1), Some(EdgeState::Contaminated));
        assert_eq!(after.edge_state(0, 3), Some(EdgeState::Contaminated));
        // Idempotent.
        assert_eq!(recontaminate(&after), after);
    }

    #[test]
    fn recontamination_cascades_along_a_chain() {
        // 0 -> 1 -> 2 -> 0: clear (0,1) under guard, then (1,2) under the
        // partial clearing of 1; withdrawing the guard on 0 cascades.
        let g = DirectedGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]);
        let mut s = GraphClearState::contaminated(g);
        s.guards.insert(0);
        s.set_cleared(0, 1);
        s.set_cleared(1, 2);
        assert_eq!(recontaminate(&s), s);
        s.guards.remove(&0);
        let after = recontaminate(&s);
        assert_eq!(after.edge_state(0, 1), Some(EdgeState::Contaminated));
        assert_eq!(after.edge_state(1, 2), Some(EdgeState::Contaminated), "cascade");
    }

    #[test]
    fn clearing_move_rejects_non_contaminated_start() {
        let g = five_cell_topology();
        let mut s = GraphClearState::contaminated(g);
        let mut ctx = ClearingContext::with_robots(3);
        execute_clearing_move(&mut ctx, &mut s, 0).unwrap();
        // Vertex 0 is now critical (guarded, out-edges cleared).
        assert!(matches!(
            execute_clearing_move(&mut ctx, &mut s, 0),
            Err(PursuitError::NotContaminated(0))
        ));
    }

    #[test]
    fn three_robots_clear_the_five_cell_topology() {
        let g = five_cell_topology();
        let mut s = GraphClearState::contaminated(g);
        let mut ctx = ClearingContext::with_robots(3);
        execute_clearing_move(&mut ctx, &mut s, 0).unwrap();
        execute_clearing_move(&mut ctx, &mut s, 2).unwrap();
        assert!(s.all_cleared(), "start sequence 0,2 clears with three robots");
    }

    #[test]
    fn cop_numbers_of_the_named_topologies() {
        assert_eq!(cop_number_bruteforce(&five_cell_topology(), 5).unwrap(), 3);
        assert_eq!(
            cop_number_bruteforce(&heuristics_counterexample_topology(), 5).unwrap(),
            3
        );
        assert_eq!(cop_number_bruteforce(&evasion_pair_topology(), 3).unwrap(), 2);
        let single = DirectedGraph::from_edges(1, &[]);
        assert_eq!(cop_number_bruteforce(&single, 2).unwrap(), 1);
    }

    #[test]
    fn max_k_exceeded_is_reported() {
        assert!(matches!(
            cop_number_bruteforce(&evasion_pair_topology(), 1),
            Err(PursuitError::ExceedsMaxK(1))
        ));
    }

    #[test]
    fn first_view_sees_everything() {
        let s = GraphClearState::contaminated(five_cell_topology());
        let view = heuristics_view(&s, true);
        assert_eq!(view.observable, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn cleared_graph_has_empty_candidates_and_no_selection() {
        let mut s = GraphClearState::contaminated(five_cell_topology());
        for (u, v) in s.edges().to_vec() {
            s.set_cleared(u, v);
        }
        let view = heuristics_view(&s, false);
        assert!(view.candidates.is_empty());
        assert_eq!(view.mu, None, "mu is infinite");
        assert_eq!(view.nu, None, "nu is minus infinite");
        assert_eq!(select_start_vertex(&s, &view, false), None);
    }

    #[test]
    fn observable_set_matches_direct_comprehension() {
        // Single cleared edge (3,2) of the five-cell graph: compare against
        // the set comprehension evaluated directly over the edges.
        let g = five_cell_topology();
        let mut s = GraphClearState::contaminated(g.clone());
        s.set_cleared(3, 2);
        let view = heuristics_view(&s, false);
        let mut expect = BTreeSet::new();
        for v in 0..g.n {
            let endpoint = |x: usize| x == 3 || x == 2;
            let direct = endpoint(v);
            let one_hop = g.out_neighbors(v).iter().any(|&w| endpoint(w))
                || g.in_neighbors(v).iter().any(|&w| endpoint(w));
            if direct || one_hop {
                expect.insert(v);
            }
        }
        assert_eq!(view.observable, expect.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn counterexample_first_selection_is_v2_or_v4() {
        let g = heuristics_counterexample_topology();
        let s = GraphClearState::contaminated(g);
        let view = heuristics_view(&s, true);
        let sel = select_start_vertex(&s, &view, false).unwrap();
        assert!(sel == 2 || sel == 4, "got {sel}");
        assert_eq!(sel, 2, "lowest-index tie-break");
    }

    #[test]
    fn heuristics_demand_four_robots_on_the_counterexample() {
        let g = heuristics_counterexample_topology();
        let run = heuristics_run(&g, false);
        assert!(run.cleared);
        assert_eq!(run.robots, 4);
    }

    #[test]
    fn heuristics_clear_the_five_cell_topology_with_three() {
        let run = heuristics_run(&five_cell_topology(), false);
        assert!(run.cleared);
        assert_eq!(run.robots, 3);
    }

    #[test]
    fn selection_respects_the_priority_order() {
        // Exhaustive re-ranking oracle on random mid-run states.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for seed in 0..20 {
            let g = generate_random_scc(5, 0.6, seed).unwrap();
            let mut s = GraphClearState::contaminated(g.clone());
            let mut ctx = ClearingContext::on_demand();
            // Random partial progress.
            for _ in 0..rng.gen_range(0..3) {
                let view = heuristics_view(&s, s.cleared_edges().is_empty());
                if let Some(v) = select_start_vertex(&s, &view, false) {
                    execute_clearing_move(&mut ctx, &mut s, v).unwrap();
                }
            }
            let first = s.cleared_edges().is_empty() && ctx.log.is_empty();
            let view = heuristics_view(&s, first);
            let Some(sel) = select_start_vertex(&s, &view, false) else {
                continue;
            };
            // H1 honored.
            assert_eq!(vertex_state(&s, sel), VertexState::Contaminated);
            // Among the H1/H2 survivors the selection is H3/H4-optimal.
            let h1: Vec<usize> = view
                .observable
                .iter()
                .copied()
                .filter(|&v| vertex_state(&s, v) == VertexState::Contaminated)
                .collect();
            let pick_class = |v: &usize| {
                if view.nu_start_candidates.contains(v) && !view.mu_clear_candidates.contains(v) {
                    0
                } else if view.nu_start_candidates.contains(v) {
                    1
                } else {
                    2
                }
            };
            let best = h1.iter().map(pick_class).min().unwrap();
            assert!(
                pick_class(&sel) <= best,
                "selection class {} vs best {best}",
                pick_class(&sel)
            );
        }
    }

    #[test]
    fn brute_force_never_exceeds_heuristics() {
        for seed in 0..25 {
            let g = generate_random_scc(5, 0.5, seed).unwrap();
            let brute = cop_number_bruteforce(&g, 6).unwrap();
            let heur = robots_with_heuristics(&g, false);
            assert!(brute <= heur, "seed {seed}: {brute} > {heur}");
        }
    }

    #[test]
    fn sufficient_robots_avoid_recontamination() {
        // With at least the cop number available, the recontaminate fixpoint
        // stays the identity at every step of a clearing sequence.
        for seed in 0..10 {
            let g = generate_random_scc(5, 0.5, seed).unwrap();
            let run = heuristics_run(&g, false);
            if !run.cleared {
                continue;
            }
            let mut s = GraphClearState::contaminated(g.clone());
            let mut ctx = ClearingContext::with_robots(run.robots);
            loop {
                let first = s.cleared_edges().is_empty() && ctx.log.is_empty();
                let view = heuristics_view(&s, first);
                let Some(v) = select_start_vertex(&s, &view, false) else { break };
                execute_clearing_move(&mut ctx, &mut s, v).unwrap();
                assert_eq!(recontaminate(&s), s, "seed {seed}: no recontamination");
                if s.all_cleared() {
                    break;
                }
            }
            assert!(s.all_cleared());
        }
    }

    #[test]
    fn prefix_closure_of_clearing_sequences() {
        // Executing random clearing moves first never spoils a subsequent
        // full clearing with enough robots.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for seed in 0..10 {
            let g = generate_random_scc(5, 0.5, seed).unwrap();
            let k = cop_number_bruteforce(&g, 6).unwrap();
            let mut s = GraphClearState::contaminated(g.clone());
            let mut ctx = ClearingContext::with_robots(k);
            // Random prefix of arbitrary clearing moves.
            for _ in 0..rng.gen_range(1..4) {
                let options: Vec<usize> = (0..g.n)
                    .filter(|&v| vertex_state(&s, v) == VertexState::Contaminated)
                    .collect();
                if options.is_empty() {
                    break;
                }
                let v = options[rng.gen_range(0..options.len())];
                execute_clearing_move(&mut ctx, &mut s, v).unwrap();
            }
            // A clearing sequence still exists from here: greedy search over
            // start vertices must terminate cleared.
            let cleared = clear_from(&g, k, &mut ctx, &mut s, 0);
            assert!(cleared, "seed {seed}");
        }
    }

    // Exhaustive continuation search used by the prefix-closure test.
    fn clear_from(
        g: &DirectedGraph,
        _k: usize,
        ctx: &mut ClearingContext,
        s: &mut GraphClearState,
        depth: usize,
    ) -> bool {
        if s.all_cleared() {
            return true;
        }
        if depth > g.n * g.n {
            return false;
        }
        for v in 0..g.n {
            if vertex_state(s, v) != VertexState::Contaminated {
                continue;
            }
            let mut s2 = s.clone();
            let mut ctx2 = ctx.clone();
            if execute_clearing_move(&mut ctx2, &mut s2, v).is_ok()
                && clear_from(g, _k, &mut ctx2, &mut s2, depth + 1)
            {
                return true;
            }
        }
        false
    }

    #[test]
    fn survey_with_no_samples_is_zero() {
        assert_eq!(survey(5, 0, 1), 0);
    }
}
