//! Model checking an FDS against propositional invariants, GR[1]-shaped
//! specifications and response properties, with counterexample extraction.

use crate::fds::{Computation, Fds};
use crate::ltl::{Formula, Gr1Spec, Lasso, LtlError, Valuation};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("specification variable `{0}` is not a variable of the model")]
    MissingVar(String),
    #[error(transparent)]
    Spec(#[from] LtlError),
}

/// Model-checking verdict. Counterexamples replay to the reported
/// violation: safety counterexamples are computations whose last transition
/// (or initial state) breaks the named conjunct; liveness counterexamples
/// are lassos of state valuations.
#[derive(Debug, Clone)]
pub enum Verdict {
    Satisfied,
    ViolatedSafety { step: usize, conjunct: String, run: Computation },
    ViolatedLiveness { lasso: Lasso, unmet: String },
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub verdict: Verdict,
    pub states_explored: usize,
}

impl CheckResult {
    pub fn satisfied(&self) -> bool {
        matches!(self.verdict, Verdict::Satisfied)
    }
}

/// Check a propositional invariant on every reachable state. The reported
/// counterexample has minimal length (breadth-first order).
pub fn check_invariant(m: &Fds, p: &Formula) -> CheckResult {
    let mut parent: Vec<Option<usize>> = vec![None; m.states.len()];
    let mut seen = vec![false; m.states.len()];
    let mut queue = std::collections::VecDeque::new();
    for &q in &m.initial {
        if !seen[q] {
            seen[q] = true;
            queue.push_back(q);
        }
    }
    let mut explored = 0;
    while let Some(q) = queue.pop_front() {
        explored += 1;
        if !p.eval_prop(&m.states[q]).unwrap_or(false) {
            return CheckResult {
                verdict: Verdict::ViolatedSafety {
                    step: trace_to(&parent, q, m).len() - 1,
                    conjunct: "invariant".into(),
                    run: trace_to(&parent, q, m),
                },
                states_explored: explored,
            };
        }
        for &s in &m.transitions[q] {
            if !seen[s] {
                seen[s] = true;
                parent[s] = Some(q);
                queue.push_back(s);
            }
        }
    }
    CheckResult { verdict: Verdict::Satisfied, states_explored: explored }
}

fn trace_to(parent: &[Option<usize>], mut q: usize, _m: &Fds) -> Computation {
    let mut run = vec![q];
    while let Some(p) = parent[q] {
        run.push(p);
        q = p;
    }
    run.reverse();
    run
}

// Remap a formula's variable indices from the spec's table into the
// model's, by name.
fn remap(f: &Formula, map: &[usize]) -> Formula {
    match f {
        Formula::True => Formula::True,
        Formula::Atom { var, rel, val } => {
            Formula::Atom { var: map[*var], rel: *rel, val: val.clone() }
        }
        Formula::Not(a) => remap(a, map).not(),
        Formula::Or(a, b) => remap(a, map).or(remap(b, map)),
        Formula::And(a, b) => remap(a, map).and(remap(b, map)),
        Formula::Implies(a, b) => remap(a, map).implies(remap(b, map)),
        Formula::Iff(a, b) => remap(a, map).iff(remap(b, map)),
        Formula::Next(a) => remap(a, map).next(),
        Formula::Eventually(a) => remap(a, map).eventually(),
        Formula::Always(a) => remap(a, map).always(),
        Formula::Until(a, b) => remap(a, map).until(remap(b, map)),
        Formula::WeakUntil(a, b) => remap(a, map).weak_until(remap(b, map)),
    }
}

struct MappedSpec {
    env_init: Formula,
    sys_init: Formula,
    env_trans: Vec<Formula>,
    sys_trans: Vec<Formula>,
    env_live: Vec<Formula>,
    sys_live: Vec<Formula>,
}

fn map_spec(m: &Fds, spec: &Gr1Spec) -> Result<MappedSpec, CheckError> {
    let map: Vec<usize> = spec
        .all_vars()
        .iter()
        .map(|d| m.var_index(&d.name).ok_or_else(|| CheckError::MissingVar(d.name.clone())))
        .collect::<Result<_, _>>()?;
    Ok(MappedSpec {
        env_init: remap(&spec.env_init, &map),
        sys_init: remap(&spec.sys_init, &map),
        env_trans: spec.env_trans.iter().map(|f| remap(f, &map)).collect(),
        sys_trans: spec.sys_trans.iter().map(|f| remap(f, &map)).collect(),
        env_live: spec.env_live.iter().map(|f| remap(f, &map)).collect(),
        sys_live: spec.sys_live.iter().map(|f| remap(f, &map)).collect(),
    })
}

/// Check a GR[1] specification: no computation of `m` may satisfy all
/// assumptions yet violate a guarantee. Safety conjuncts are scanned over
/// all assumption-compliant reachable transitions; liveness is a search for
/// a reachable assumption-fair cycle missing some system justice goal.
pub fn check_gr1(m: &Fds, spec: &Gr1Spec) -> Result<CheckResult, CheckError> {
    for f in spec.env_trans.iter().chain(&spec.sys_trans) {
        if f.next_depth() > 1 {
            return Err(CheckError::Spec(LtlError::Invalid(
                "transition conjunct with next depth > 1".into(),
            )));
        }
    }
    let ms = map_spec(m, spec)?;

    // Compliant initial states; a compliant initial state violating the
    // system's initial condition is an immediate safety violation.
    let mut roots = vec![];
    for &q in &m.initial {
        if ms.env_init.eval_prop(&m.states[q]).unwrap_or(false) {
            if !ms.sys_init.eval_prop(&m.states[q]).unwrap_or(false) {
                return Ok(CheckResult {
                    verdict: Verdict::ViolatedSafety {
                        step: 0,
                        conjunct: "initial condition".into(),
                        run: vec![q],
                    },
                    states_explored: 1,
                });
            }
            roots.push(q);
        }
    }

    // BFS over assumption-compliant transitions, checking guarantees.
    let env_ok = |a: &Valuation, b: &Valuation| {
        ms.env_trans.iter().all(|f| f.eval_step(a, b).unwrap_or(false))
    };
    let mut seen = vec![false; m.states.len()];
    let mut parent = vec![None; m.states.len()];
    let mut queue = std::collections::VecDeque::new();
    for &q in &roots {
        if !seen[q] {
            seen[q] = true;
            queue.push_back(q);
        }
    }
    let mut explored = 0;
    let mut order = vec![];
    while let Some(q) = queue.pop_front() {
        explored += 1;
        order.push(q);
        for &s in &m.transitions[q] {
            if !env_ok(&m.states[q], &m.states[s]) {
                continue;
            }
            for (k, f) in ms.sys_trans.iter().enumerate() {
                if !f.eval_step(&m.states[q], &m.states[s]).unwrap_or(false) {
                    let mut run = trace_to(&parent, q, m);
                    run.push(s);
                    return Ok(CheckResult {
                        verdict: Verdict::ViolatedSafety {
                            step: run.len() - 1,
                            conjunct: format!("guarantee transition {k}"),
                            run,
                        },
                        states_explored: explored,
                    });
                }
            }
            if !seen[s] {
                seen[s] = true;
                parent[s] = Some(q);
                queue.push_back(s);
            }
        }
    }

    // Liveness: for each system goal, search the compliant subgraph
    // restricted to !goal for a cycle covering every environment goal.
    let reach: Vec<usize> = order;
    let holds = |f: &Formula, q: usize| f.eval_prop(&m.states[q]).unwrap_or(false);
    for (j, goal) in ms.sys_live.iter().enumerate() {
        let allowed: Vec<bool> = (0..m.states.len())
            .map(|q| seen[q] && !holds(goal, q))
            .collect();
        let sccs = sccs_within(m, &allowed, &env_ok);
        for scc in &sccs {
            let cyclic = scc.len() > 1
                || m.transitions[scc[0]].contains(&scc[0])
                    && env_ok(&m.states[scc[0]], &m.states[scc[0]]);
            if !cyclic {
                continue;
            }
            let fair = ms.env_live.is_empty()
                || ms
                    .env_live
                    .iter()
                    .all(|eg| scc.iter().any(|&q| holds(eg, q)));
            if fair {
                let lasso = build_lasso(m, &parent, scc, &ms.env_live, &env_ok);
                return Ok(CheckResult {
                    verdict: Verdict::ViolatedLiveness {
                        lasso,
                        unmet: format!("justice goal {j}"),
                    },
                    states_explored: explored,
                });
            }
        }
    }
    let _ = reach;

    Ok(CheckResult { verdict: Verdict::Satisfied, states_explored: explored })
}

// Iterative Tarjan over the subgraph induced by `allowed` states and
// compliant edges.
fn sccs_within(
    m: &Fds,
    allowed: &[bool],
    env_ok: &impl Fn(&Valuation, &Valuation) -> bool,
) -> Vec<Vec<usize>> {
    let n = m.states.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = vec![];
    let mut sccs = vec![];
    let mut counter = 0;

    for root in 0..n {
        if !allowed[root] || index[root] != usize::MAX {
            continue;
        }
        // (node, next child position)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&mut (v, ref mut ci)) = call.last_mut() {
            if *ci == 0 {
                index[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            let succs = &m.transitions[v];
            let mut advanced = false;
            while *ci < succs.len() {
                let w = succs[*ci];
                *ci += 1;
                if !allowed[w] || !env_ok(&m.states[v], &m.states[w]) {
                    continue;
                }
                if index[w] == usize::MAX {
                    call.push((w, 0));
                    advanced = true;
                    break;
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            }
            if advanced {
                continue;
            }
            // v is finished.
            if low[v] == index[v] {
                let mut comp = vec![];
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                sccs.push(comp);
            }
            call.pop();
            if let Some(&mut (u, _)) = call.last_mut() {
                low[u] = low[u].min(low[v]);
            }
        }
    }
    sccs.sort();
    sccs
}

// Assemble a violating lasso: prefix from an initial state to the SCC, then
// a cycle inside the SCC visiting one representative per environment goal.
fn build_lasso(
    m: &Fds,
    parent: &[Option<usize>],
    scc: &[usize],
    env_live: &[Formula],
    env_ok: &impl Fn(&Valuation, &Valuation) -> bool,
) -> Lasso {
    let inside = |q: usize| scc.contains(&q);
    let entry = scc[0];
    let prefix_states = trace_to(parent, entry, m);

    // Waypoints: one state per environment goal, then back to the entry.
    let mut waypoints = vec![];
    for eg in env_live {
        let rep = scc
            .iter()
            .copied()
            .find(|&q| eg.eval_prop(&m.states[q]).unwrap_or(false))
            .expect("fair SCC covers every environment goal");
        waypoints.push(rep);
    }
    waypoints.push(entry);

    let mut cycle = vec![entry];
    let mut cur = entry;
    for &goal in &waypoints {
        // BFS within the SCC from cur to goal; a nonempty walk even if
        // cur == goal so that the loop is a real cycle.
        let path = bfs_path(m, cur, goal, &inside, env_ok);
        cycle.extend_from_slice(&path[1..]);
        cur = goal;
    }
    // `cycle` starts and ends at entry; drop the final repeat.
    cycle.pop();
    if cycle.is_empty() {
        cycle.push(entry);
    }

    Lasso::new(
        prefix_states[..prefix_states.len() - 1]
            .iter()
            .map(|&q| m.states[q].clone())
            .collect(),
        cycle.iter().map(|&q| m.states[q].clone()).collect(),
    )
}

fn bfs_path(
    m: &Fds,
    from: usize,
    to: usize,
    inside: &impl Fn(usize) -> bool,
    env_ok: &impl Fn(&Valuation, &Valuation) -> bool,
) -> Vec<usize> {
    if from == to {
        // Shortest nonempty round trip.
        let mut best: Option<Vec<usize>> = None;
        for &s in &m.transitions[from] {
            if inside(s) && env_ok(&m.states[from], &m.states[s]) {
                if s == to {
                    return vec![from, to];
                }
                let tail = bfs_path(m, s, to, inside, env_ok);
                let mut full = vec![from];
                full.extend(tail);
                if best.as_ref().map_or(true, |b| full.len() < b.len()) {
                    best = Some(full);
                }
            }
        }
        return best.expect("cyclic SCC has a round trip");
    }
    let mut parent = vec![None; m.states.len()];
    let mut seen = vec![false; m.states.len()];
    let mut queue = std::collections::VecDeque::new();
    seen[from] = true;
    queue.push_back(from);
    while let Some(q) = queue.pop_front() {
        if q == to {
            let mut path = vec![q];
            let mut c = q;
            while let Some(p) = parent[c] {
                path.push(p);
                c = p;
            }
            path.reverse();
            return path;
        }
        for &s in &m.transitions[q] {
            if inside(s) && !seen[s] && env_ok(&m.states[q], &m.states[s]) {
                seen[s] = true;
                parent[s] = Some(q);
                queue.push_back(s);
            }
        }
    }
    unreachable!("SCC is strongly connected");
}

/// Check the response property `[](p -> <> q)` on all computations of `m`:
/// violated iff some reachable state satisfies `p & !q` and admits an
/// infinite path along which `q` never holds.
pub fn check_response(m: &Fds, p: &Formula, q: &Formula) -> CheckResult {
    let n = m.states.len();
    let holds_q = |s: usize| q.eval_prop(&m.states[s]).unwrap_or(false);
    let holds_p = |s: usize| p.eval_prop(&m.states[s]).unwrap_or(false);

    // Reachability.
    let mut seen = vec![false; n];
    let mut parent = vec![None; n];
    let mut queue: std::collections::VecDeque<usize> = m.initial.iter().copied().collect();
    for &r in &m.initial {
        seen[r] = true;
    }
    let mut explored = 0;
    while let Some(v) = queue.pop_front() {
        explored += 1;
        for &s in &m.transitions[v] {
            if !seen[s] {
                seen[s] = true;
                parent[s] = Some(v);
                queue.push_back(s);
            }
        }
    }

    // States with an infinite q-free path: q-free states that reach a
    // q-free cycle.
    let allowed: Vec<bool> = (0..n).map(|s| seen[s] && !holds_q(s)).collect();
    let always_true = |_: &Valuation, _: &Valuation| true;
    let sccs = sccs_within(m, &allowed, &always_true);
    let mut in_cyclic = vec![false; n];
    for scc in &sccs {
        if scc.len() > 1 || m.transitions[scc[0]].contains(&scc[0]) {
            for &s in scc {
                in_cyclic[s] = true;
            }
        }
    }
    // Backward closure within the q-free subgraph.
    let mut evades = in_cyclic.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for v in 0..n {
            if allowed[v] && !evades[v] && m.transitions[v].iter().any(|&s| allowed[s] && evades[s])
            {
                evades[v] = true;
                changed = true;
            }
        }
    }

    for v in 0..n {
        if seen[v] && holds_p(v) && allowed[v] && evades[v] {
            // Build the lasso: initial -> v -> cycle, q-free after v.
            let inside = |s: usize| allowed[s];
            let cyc_target = (0..n)
                .filter(|&s| in_cyclic[s])
                .find(|&s| reaches_within(m, v, s, &inside))
                .expect("evading state reaches a q-free cycle");
            let to_cycle = bfs_path_plain(m, v, cyc_target, &inside);
            let cycle_scc = sccs.iter().find(|scc| scc.contains(&cyc_target)).unwrap();
            let scc_inside = |s: usize| cycle_scc.contains(&s);
            let cyc = bfs_path(m, cyc_target, cyc_target, &scc_inside, &always_true);
            let mut prefix = trace_to(&parent, v, m);
            prefix.extend_from_slice(&to_cycle[1..]);
            prefix.pop();
            let mut looped = cyc;
            looped.pop();
            return CheckResult {
                verdict: Verdict::ViolatedLiveness {
                    lasso: Lasso::new(
                        prefix.iter().map(|&s| m.states[s].clone()).collect(),
                        looped.iter().map(|&s| m.states[s].clone()).collect(),
                    ),
                    unmet: "response".into(),
                },
                states_explored: explored,
            };
        }
    }
    CheckResult { verdict: Verdict::Satisfied, states_explored: explored }
}

fn reaches_within(m: &Fds, from: usize, to: usize, inside: &impl Fn(usize) -> bool) -> bool {
    let mut seen = vec![false; m.states.len()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(v) = stack.pop() {
        if v == to {
            return true;
        }
        for &s in &m.transitions[v] {
            if inside(s) && !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
    }
    false
}

fn bfs_path_plain(m: &Fds, from: usize, to: usize, inside: &impl Fn(usize) -> bool) -> Vec<usize> {
    if from == to {
        return vec![from];
    }
    let mut parent = vec![None; m.states.len()];
    let mut seen = vec![false; m.states.len()];
    let mut queue = std::collections::VecDeque::new();
    seen[from] = true;
    queue.push_back(from);
    while let Some(v) = queue.pop_front() {
        for &s in &m.transitions[v] {
            if inside(s) && !seen[s] {
                seen[s] = true;
                parent[s] = Some(v);
                if s == to {
                    let mut path = vec![s];
                    let mut c = s;
                    while let Some(p) = parent[c] {
                        path.push(p);
                        c = p;
                    }
                    path.reverse();
                    return path;
                }
                queue.push_back(s);
            }
        }
    }
    unreachable!("target is reachable by construction");
}

/// Does a finite prefix of valuations already violate the chosen side's
/// initial or transition conjuncts? Exact for the next-depth-one safety
/// fragment.
pub fn bad_prefix(prefix: &[Valuation], spec: &Gr1Spec, env_side: bool) -> bool {
    if prefix.is_empty() {
        return false;
    }
    let (init, trans) = if env_side {
        (&spec.env_init, &spec.env_trans)
    } else {
        (&spec.sys_init, &spec.sys_trans)
    };
    if !init.eval_prop(&prefix[0]).unwrap_or(false) {
        return true;
    }
    prefix.windows(2).any(|w| {
        trans
            .iter()
            .any(|f| !f.eval_step(&w[0], &w[1]).unwrap_or(false))
    })
}
