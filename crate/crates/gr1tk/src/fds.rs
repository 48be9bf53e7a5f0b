//! Fair discrete systems: explicit states, transition adjacency, executions
//! and structural checks.

use crate::ltl::{valuation_ok, Valuation, VarDecl};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FdsError {
    #[error("no successor of state {state} matches the input at step {step}")]
    Blocked { state: usize, step: usize },
    #[error("unknown variable `{0}`")]
    UnknownName(String),
    #[error("state space bound exceeded: {0}")]
    CapExceeded(String),
    #[error("malformed FDS: {0}")]
    Invalid(String),
}

/// A computation is a sequence of state ids satisfying initiality and
/// consecution.
pub type Computation = Vec<usize>;

/// Explicit-state fair discrete system. State ids are dense indices into
/// `states`; two states may carry the same valuation.
#[derive(Debug, Clone, PartialEq)]
pub struct Fds {
    pub vars: Vec<VarDecl>,
    /// Indices into `vars` controlled by the environment.
    pub env: Vec<usize>,
    /// Indices into `vars` controlled by the system.
    pub sys: Vec<usize>,
    pub states: Vec<Valuation>,
    /// Sorted ids of initial states; nonempty (startup property).
    pub initial: Vec<usize>,
    /// Adjacency: `transitions[q]` lists successors of `q`, sorted.
    pub transitions: Vec<Vec<usize>>,
}

impl Fds {
    pub fn validate(&self) -> Result<(), FdsError> {
        let n = self.vars.len();
        let mut owned = vec![0u8; n];
        for &i in &self.env {
            owned.get(i).ok_or(FdsError::Invalid(format!("env index {i}")))?;
            owned[i] += 1;
        }
        for &i in &self.sys {
            owned.get(i).ok_or(FdsError::Invalid(format!("sys index {i}")))?;
            owned[i] += 1;
        }
        if owned.iter().any(|&c| c != 1) {
            return Err(FdsError::Invalid(
                "env and sys must partition the variables".into(),
            ));
        }
        for (id, v) in self.states.iter().enumerate() {
            if !valuation_ok(v, &self.vars) {
                return Err(FdsError::Invalid(format!("state {id} valuation out of domain")));
            }
        }
        if self.initial.is_empty() {
            return Err(FdsError::Invalid("startup property: no initial state".into()));
        }
        if self.transitions.len() != self.states.len() {
            return Err(FdsError::Invalid("transition table size mismatch".into()));
        }
        for (q, succs) in self.transitions.iter().enumerate() {
            for &s in succs {
                if s >= self.states.len() {
                    return Err(FdsError::Invalid(format!("transition {q} -> {s} out of range")));
                }
            }
        }
        for &q in &self.initial {
            if q >= self.states.len() {
                return Err(FdsError::Invalid(format!("initial state {q} out of range")));
            }
        }
        Ok(())
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|d| d.name == name)
    }

    /// Projection of a valuation onto env variables, in `self.env` order.
    pub fn env_values(&self, v: &Valuation) -> Valuation {
        self.env.iter().map(|&i| v[i].clone()).collect()
    }

    pub fn is_computation(&self, c: &Computation) -> bool {
        match c.first() {
            None => false,
            Some(q0) => {
                self.initial.contains(q0)
                    && c.windows(2).all(|w| self.transitions[w[0]].contains(&w[1]))
            }
        }
    }
}

/// Projection of a valuation onto a set of variable names.
pub fn restrict(
    v: &Valuation,
    decls: &[VarDecl],
    names: &[&str],
) -> Result<Valuation, FdsError> {
    names
        .iter()
        .map(|n| {
            decls
                .iter()
                .position(|d| d.name == *n)
                .map(|i| v[i].clone())
                .ok_or_else(|| FdsError::UnknownName(n.to_string()))
        })
        .collect()
}

/// Nonblocking property: every state has at least one successor.
pub fn is_nonblocking(m: &Fds) -> bool {
    m.transitions.iter().all(|succs| !succs.is_empty())
}

/// Take one step from `current` under environment input `input` (values for
/// `m.env`, in order). Among matching successors the lowest id wins.
pub fn step(m: &Fds, current: usize, input: &Valuation) -> Result<usize, FdsError> {
    debug_assert_eq!(input.len(), m.env.len());
    m.transitions[current]
        .iter()
        .copied()
        .find(|&q| m.env.iter().enumerate().all(|(k, &vi)| m.states[q][vi] == input[k]))
        .ok_or(FdsError::Blocked { state: current, step: 0 })
}

/// Execute a sequence of inputs from `start` (default: lowest initial id),
/// producing a computation of length `inputs.len()`.
pub fn execute(
    m: &Fds,
    inputs: &[Valuation],
    start: Option<usize>,
) -> Result<Computation, FdsError> {
    let q0 = match start {
        Some(q) => {
            if !m.initial.contains(&q) {
                return Err(FdsError::Invalid(format!("state {q} is not initial")));
            }
            q
        }
        None => *m
            .initial
            .iter()
            .min()
            .ok_or(FdsError::Invalid("no initial state".into()))?,
    };
    let mut run = vec![q0];
    for (k, input) in inputs.iter().enumerate() {
        let cur = *run.last().unwrap();
        let next = step(m, cur, input).map_err(|_| FdsError::Blocked { state: cur, step: k })?;
        run.push(next);
    }
    Ok(run)
}

/// All computations with at most `horizon` transitions. The worst-case
/// count |Q|^(horizon+1) must stay within `cap`.
pub fn enumerate_computations(
    m: &Fds,
    horizon: usize,
    cap: usize,
) -> Result<Vec<Computation>, FdsError> {
    let mut bound = 1usize;
    for _ in 0..=horizon {
        bound = bound.saturating_mul(m.states.len());
        if bound > cap {
            return Err(FdsError::CapExceeded(format!(
                "|Q|^(h+1) = {}^{} exceeds {}",
                m.states.len(),
                horizon + 1,
                cap
            )));
        }
    }
    let mut out = Vec::new();
    let mut stack: Vec<Computation> = m.initial.iter().map(|&q| vec![q]).collect();
    stack.reverse();
    while let Some(c) = stack.pop() {
        if c.len() <= horizon {
            let last = *c.last().unwrap();
            for &s in self_sorted(&m.transitions[last]).iter().rev() {
                let mut ext = c.clone();
                ext.push(s);
                stack.push(ext);
            }
        }
        out.push(c);
    }
    Ok(out)
}

fn self_sorted(v: &[usize]) -> Vec<usize> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

// -- file format --

#[derive(Serialize, Deserialize)]
struct FdsFile {
    vars: Vec<VarDecl>,
    env: Vec<String>,
    sys: Vec<String>,
    states: Vec<StateFile>,
    initial: Vec<usize>,
    transitions: BTreeMap<String, Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    id: usize,
    valuation: BTreeMap<String, crate::ltl::Value>,
}

/// Serialize to the JSON file format. Round-trip stable.
pub fn to_json(m: &Fds) -> String {
    let file = FdsFile {
        vars: m.vars.clone(),
        env: m.env.iter().map(|&i| m.vars[i].name.clone()).collect(),
        sys: m.sys.iter().map(|&i| m.vars[i].name.clone()).collect(),
        states: m
            .states
            .iter()
            .enumerate()
            .map(|(id, v)| StateFile {
                id,
                valuation: m
                    .vars
                    .iter()
                    .zip(v)
                    .map(|(d, x)| (d.name.clone(), x.clone()))
                    .collect(),
            })
            .collect(),
        initial: m.initial.clone(),
        transitions: m
            .transitions
            .iter()
            .enumerate()
            .map(|(q, succs)| (q.to_string(), succs.clone()))
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("fds serialization")
}

pub fn from_json(text: &str) -> Result<Fds, FdsError> {
    let file: FdsFile =
        serde_json::from_str(text).map_err(|e| FdsError::Invalid(e.to_string()))?;
    let name_index = |n: &String| {
        file.vars
            .iter()
            .position(|d| &d.name == n)
            .ok_or_else(|| FdsError::UnknownName(n.clone()))
    };
    let env = file.env.iter().map(name_index).collect::<Result<Vec<_>, _>>()?;
    let sys = file.sys.iter().map(name_index).collect::<Result<Vec<_>, _>>()?;
    let mut states = vec![Vec::new(); file.states.len()];
    for s in &file.states {
        if s.id >= states.len() {
            return Err(FdsError::Invalid(format!("state id {} not dense", s.id)));
        }
        states[s.id] = file
            .vars
            .iter()
            .map(|d| {
                s.valuation
                    .get(&d.name)
                    .cloned()
                    .ok_or_else(|| FdsError::Invalid(format!("state {} misses `{}`", s.id, d.name)))
            })
            .collect::<Result<Vec<_>, _>>()?;
    }
    let mut transitions = vec![Vec::new(); states.len()];
    for (k, succs) in &file.transitions {
        let q: usize =
            k.parse().map_err(|_| FdsError::Invalid(format!("bad state key `{k}`")))?;
        if q >= transitions.len() {
            return Err(FdsError::Invalid(format!("transition key {q} out of range")));
        }
        let mut ss = succs.clone();
        ss.sort_unstable();
        transitions[q] = ss;
    }
    let mut initial = file.initial;
    initial.sort_unstable();
    let m = Fds { vars: file.vars, env, sys, states, initial, transitions };
    m.validate()?;
    Ok(m)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::ltl::Value;

    fn b(x: bool) -> Value {
        Value::Bool(x)
    }

    /// The five-state three-variable model-checking example: variables
    /// x, y, z, all system-controlled; states A..E as drawn, initial A and E.
    pub fn model_check_example() -> Fds {
        let vars = vec![
            VarDecl::boolean("x"),
            VarDecl::boolean("y"),
            VarDecl::boolean("z"),
        ];
        let states = vec![
            vec![b(true), b(true), b(false)],  // 0: x, y, !z  (initial)
            vec![b(false), b(true), b(false)], // 1: !x, y, !z
            vec![b(false), b(true), b(true)],  // 2: !x, y, z
            vec![b(false), b(true), b(true)],  // 3: !x, y, z  (self-loop)
            vec![b(true), b(true), b(true)],   // 4: x, y, z   (initial)
        ];
        let transitions = vec![vec![2], vec![3], vec![0, 1], vec![3], vec![2]];
        let m = Fds {
            vars,
            env: vec![],
            sys: vec![0, 1, 2],
            states,
            initial: vec![0, 4],
            transitions,
        };
        m.validate().unwrap();
        m
    }

    /// The seven-state toy controller (env x; sys y1, y2, trigger t) as
    /// drawn, with initial states q0, q1 (those with !y1 & !y2 & !t).
    pub fn toy_controller() -> Fds {
        let vars = vec![
            VarDecl::boolean("x"),
            VarDecl::boolean("y1"),
            VarDecl::boolean("y2"),
            VarDecl::boolean("t"),
        ];
        // (x, y1, y2, t)
        let states = vec![
            vec![b(true), b(false), b(false), b(false)],  // q0
            vec![b(false), b(false), b(false), b(false)], // q1
            vec![b(false), b(false), b(true), b(false)],  // q2
            vec![b(true), b(false), b(true), b(false)],   // q3
            vec![b(false), b(true), b(false), b(true)],   // q4
            vec![b(false), b(false), b(false), b(true)],  // q5
            vec![b(true), b(true), b(false), b(true)],    // q6
        ];
        let transitions = vec![
            vec![0, 1],    // q0
            vec![2, 3],    // q1
            vec![2, 6],    // q2
            vec![3, 4],    // q3
            vec![0, 5],    // q4
            vec![0, 5],    // q5
            vec![0, 5],    // q6
        ];
        let m = Fds {
            vars,
            env: vec![0],
            sys: vec![1, 2, 3],
            states,
            initial: vec![0, 1],
            transitions,
        };
        m.validate().unwrap();
        m
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::ltl::Value;

    #[test]
    fn restriction_projects() {
        let decls = vec![VarDecl::int("x", 0, 3), VarDecl::int("y", 0, 3)];
        let v = vec![Value::Int(1), Value::Int(2)];
        assert_eq!(restrict(&v, &decls, &["x"]).unwrap(), vec![Value::Int(1)]);
        assert_eq!(restrict(&v, &decls, &["x", "y"]).unwrap(), v);
        assert!(restrict(&v, &decls, &["zz"]).is_err());
    }

    #[test]
    fn model_check_example_is_nonblocking() {
        assert!(is_nonblocking(&model_check_example()));
    }

    #[test]
    fn single_state_without_transitions_blocks() {
        let m = Fds {
            vars: vec![VarDecl::boolean("x")],
            env: vec![],
            sys: vec![0],
            states: vec![vec![Value::Bool(false)]],
            initial: vec![0],
            transitions: vec![vec![]],
        };
        assert!(!is_nonblocking(&m));
        // Adding a self-loop to every state repairs it.
        let mut fixed = m;
        for (q, succs) in fixed.transitions.iter_mut().enumerate() {
            succs.push(q);
        }
        assert!(is_nonblocking(&fixed));
    }

    #[test]
    fn step_follows_input() {
        // At q1 with input x=True the only matching successor is q3.
        let m = toy_controller();
        let next = step(&m, 1, &vec![Value::Bool(true)]).unwrap();
        assert_eq!(next, 3);
        assert_eq!(m.states[3][0], Value::Bool(true));
    }

    #[test]
    fn step_without_inputs_takes_lowest_id() {
        let m = model_check_example();
        assert_eq!(step(&m, 2, &vec![]).unwrap(), 0);
    }

    #[test]
    fn execute_visits_y2_region() {
        // Inputs x = T, F, F from the default start q0: the run must pass
        // through a state with y2 = True. Oracle: enumerate all compliant
        // runs and check they all do.
        let m = toy_controller();
        let inputs = vec![
            vec![Value::Bool(true)],
            vec![Value::Bool(false)],
            vec![Value::Bool(false)],
        ];
        let run = execute(&m, &inputs, None).unwrap();
        assert_eq!(run.len(), 4);
        assert!(m.is_computation(&run));
        assert!(run.iter().any(|&q| m.states[q][2] == Value::Bool(true)));

        let mut all_compliant = vec![];
        for &q0 in &m.initial {
            let mut frontier = vec![vec![q0]];
            for input in &inputs {
                let mut next_frontier = vec![];
                for c in frontier {
                    let last = *c.last().unwrap();
                    for &s in &m.transitions[last] {
                        if m.env_values(&m.states[s]) == *input {
                            let mut ext = c.clone();
                            ext.push(s);
                            next_frontier.push(ext);
                        }
                    }
                }
                frontier = next_frontier;
            }
            all_compliant.extend(frontier);
        }
        assert!(!all_compliant.is_empty());
        for c in &all_compliant {
            assert!(
                c.iter().any(|&q| m.states[q][2] == Value::Bool(true)),
                "compliant run misses y2: {c:?}"
            );
        }
    }

    #[test]
    fn execute_empty_inputs_is_single_state() {
        let m = toy_controller();
        assert_eq!(execute(&m, &[], None).unwrap(), vec![0]);
    }

    #[test]
    fn replaying_recorded_inputs_reproduces_the_run() {
        let m = toy_controller();
        let inputs: Vec<_> = [true, true, false, false, true]
            .iter()
            .map(|&x| vec![Value::Bool(x)])
            .collect();
        let run = execute(&m, &inputs, None).unwrap();
        assert_eq!(execute(&m, &inputs, None).unwrap(), run);
    }

    #[test]
    fn enumerate_matches_recount() {
        let m = model_check_example();
        let runs = enumerate_computations(&m, 2, 1 << 20).unwrap();
        // Depth-first recount.
        fn count(m: &Fds, from: usize, left: usize) -> usize {
            1 + if left == 0 {
                0
            } else {
                m.transitions[from].iter().map(|&s| count(m, s, left - 1)).sum()
            }
        }
        let expect: usize = m.initial.iter().map(|&q| count(&m, q, 2)).sum();
        assert_eq!(runs.len(), expect);
        for c in &runs {
            assert!(m.is_computation(c));
        }
        // Horizon 0: one computation per initial state.
        assert_eq!(enumerate_computations(&m, 0, 100).unwrap().len(), m.initial.len());
    }

    #[test]
    fn enumerated_prefixes_satisfy_always_y() {
        let m = model_check_example();
        let y = m.var_index("y").unwrap();
        for c in enumerate_computations(&m, 2, 1 << 20).unwrap() {
            assert!(c.iter().all(|&q| m.states[q][y] == Value::Bool(true)));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let m = model_check_example();
        assert!(matches!(
            enumerate_computations(&m, 30, 1 << 20),
            Err(FdsError::CapExceeded(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let m = toy_controller();
        let text = to_json(&m);
        let back = from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(to_json(&back), text);
    }
}
