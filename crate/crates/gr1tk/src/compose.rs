//! Architectures (variable ownership), asynchronous composition of FDSs,
//! and connector expressions binding one component's inputs to functions of
//! its peers' outputs.

use crate::fds::Fds;
use crate::ltl::{Value, VarDecl};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ComposeError {
    #[error("components disagree on the domain of `{0}`")]
    DomainMismatch(String),
    #[error("variable `{0}` is controlled by more than one component")]
    SharedOutput(String),
    #[error("composite exceeds the state cap {0}")]
    CapExceeded(usize),
    #[error("connector error: {0}")]
    Connector(String),
    #[error("architecture violation: {0}")]
    Architecture(String),
}

/// Variable ownership across a set of components.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Architecture {
    pub components: Vec<ComponentVars>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentVars {
    pub name: String,
    pub env: BTreeSet<String>,
    pub sys: BTreeSet<String>,
}

#[derive(Debug, Clone, Default)]
pub struct DerivedSets {
    /// Global environment variables: read by someone, controlled by no one.
    pub global_env: BTreeSet<String>,
    /// Global system variables.
    pub global_sys: BTreeSet<String>,
    /// Transmission sets indexed (reader, owner).
    pub transmissions: BTreeMap<(usize, usize), BTreeSet<String>>,
    /// Pure-environment inputs per component.
    pub pure_env: Vec<BTreeSet<String>>,
}

/// Check the ownership rules and compute the derived variable sets.
/// All variables are global by construction (rule one); no variable may be
/// controlled by two components (rule two); no component controls its own
/// inputs (rule three). Violations are returned as data.
pub fn validate_architecture(a: &Architecture) -> (bool, Vec<String>, DerivedSets) {
    let mut violations = vec![];
    for (i, ci) in a.components.iter().enumerate() {
        for (j, cj) in a.components.iter().enumerate() {
            if i < j {
                for v in ci.sys.intersection(&cj.sys) {
                    violations.push(format!(
                        "A2: `{v}` controlled by both {} and {}",
                        ci.name, cj.name
                    ));
                }
            }
        }
        for v in ci.env.intersection(&ci.sys) {
            violations.push(format!("A3: {} controls its own input `{v}`", ci.name));
        }
    }
    let mut derived = DerivedSets::default();
    let all_sys: BTreeSet<String> =
        a.components.iter().flat_map(|c| c.sys.iter().cloned()).collect();
    for (i, ci) in a.components.iter().enumerate() {
        derived.pure_env.push(ci.env.difference(&all_sys).cloned().collect());
        for (j, cj) in a.components.iter().enumerate() {
            if i == j {
                continue;
            }
            let t: BTreeSet<String> = ci.env.intersection(&cj.sys).cloned().collect();
            if !t.is_empty() {
                derived.transmissions.insert((i, j), t);
            }
        }
    }
    derived.global_env = a
        .components
        .iter()
        .flat_map(|c| c.env.iter().cloned())
        .filter(|v| !all_sys.contains(v))
        .collect();
    derived.global_sys = all_sys;
    (violations.is_empty(), violations, derived)
}

/// A materialized asynchronous composite plus the product-state keys, which
/// tie each composite state back to its component states.
#[derive(Debug)]
pub struct Composite {
    pub fds: Fds,
    pub pairs: Vec<(usize, usize)>,
}

pub const DEFAULT_COMPOSE_CAP: usize = 100_000;

/// Asynchronous composition of two FDSs. The composite steps when either
/// component steps alone or both step jointly; a stepping component reads
/// its transmission inputs from the peer's current outputs. Only states
/// reachable from the joint initial condition are materialized, up to
/// `cap`.
pub fn compose(m1: &Fds, m2: &Fds, cap: usize) -> Result<Composite, ComposeError> {
    // Merged variable table: m1's variables, then m2's new ones.
    let mut vars: Vec<VarDecl> = m1.vars.clone();
    for d in &m2.vars {
        match vars.iter().find(|e| e.name == d.name) {
            Some(e) if e.domain != d.domain => {
                return Err(ComposeError::DomainMismatch(d.name.clone()))
            }
            Some(_) => {}
            None => vars.push(d.clone()),
        }
    }
    let sys1: BTreeSet<&str> = m1.sys.iter().map(|&i| m1.vars[i].name.as_str()).collect();
    let sys2: BTreeSet<&str> = m2.sys.iter().map(|&i| m2.vars[i].name.as_str()).collect();
    if let Some(v) = sys1.intersection(&sys2).next() {
        return Err(ComposeError::SharedOutput(v.to_string()));
    }
    let env1: BTreeSet<&str> = m1.env.iter().map(|&i| m1.vars[i].name.as_str()).collect();
    let env2: BTreeSet<&str> = m2.env.iter().map(|&i| m2.vars[i].name.as_str()).collect();
    if env1.intersection(&sys1).next().is_some() || env2.intersection(&sys2).next().is_some() {
        return Err(ComposeError::Architecture("component controls its own input".into()));
    }

    // Transmission variables: inputs of one owned by the other.
    let t12: Vec<(usize, usize)> = m1 // (index in m1, index in m2)
        .env
        .iter()
        .filter_map(|&i| {
            let name = &m1.vars[i].name;
            sys2.contains(name.as_str())
                .then(|| (i, m2.var_index(name).unwrap()))
        })
        .collect();
    let t21: Vec<(usize, usize)> = m2 // (index in m2, index in m1)
        .env
        .iter()
        .filter_map(|&i| {
            let name = &m2.vars[i].name;
            sys1.contains(name.as_str())
                .then(|| (i, m1.var_index(name).unwrap()))
        })
        .collect();

    let reads_peer1 = |q1n: usize, q2: usize| -> bool {
        t12.iter().all(|&(i1, i2)| m1.states[q1n][i1] == m2.states[q2][i2])
    };
    let reads_peer2 = |q2n: usize, q1: usize| -> bool {
        t21.iter().all(|&(i2, i1)| m2.states[q2n][i2] == m1.states[q1][i1])
    };

    // Reachable product exploration.
    let mut id_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs: Vec<(usize, usize)> = vec![];
    let mut transitions: Vec<Vec<usize>> = vec![];
    let mut queue = VecDeque::new();
    let mut initial = vec![];
    for &i1 in &m1.initial {
        for &i2 in &m2.initial {
            let key = (i1, i2);
            let id = *id_of.entry(key).or_insert_with(|| {
                pairs.push(key);
                transitions.push(vec![]);
                queue.push_back(key);
                pairs.len() - 1
            });
            initial.push(id);
        }
    }
    initial.sort_unstable();
    initial.dedup();

    while let Some((q1, q2)) = queue.pop_front() {
        let sid = id_of[&(q1, q2)];
        let mut succs = BTreeSet::new();
        // Component one steps alone.
        for &q1n in &m1.transitions[q1] {
            if reads_peer1(q1n, q2) {
                succs.insert((q1n, q2));
            }
        }
        // Component two steps alone.
        for &q2n in &m2.transitions[q2] {
            if reads_peer2(q2n, q1) {
                succs.insert((q1, q2n));
            }
        }
        // Joint step.
        for &q1n in &m1.transitions[q1] {
            if !reads_peer1(q1n, q2) {
                continue;
            }
            for &q2n in &m2.transitions[q2] {
                if reads_peer2(q2n, q1) {
                    succs.insert((q1n, q2n));
                }
            }
        }
        for key in succs {
            if pairs.len() >= cap && !id_of.contains_key(&key) {
                return Err(ComposeError::CapExceeded(cap));
            }
            let id = *id_of.entry(key).or_insert_with(|| {
                pairs.push(key);
                transitions.push(vec![]);
                queue.push_back(key);
                pairs.len() - 1
            });
            transitions[sid].push(id);
        }
        transitions[sid].sort_unstable();
        transitions[sid].dedup();
    }

    // Composite valuations: each variable read from its owner, environment
    // variables from the first reader.
    let lookup: Vec<(bool, usize)> = vars
        .iter()
        .map(|d| {
            if sys2.contains(d.name.as_str()) {
                (false, m2.var_index(&d.name).unwrap())
            } else if sys1.contains(d.name.as_str()) {
                (true, m1.var_index(&d.name).unwrap())
            } else if let Some(i) = m1.var_index(&d.name) {
                (true, i)
            } else {
                (false, m2.var_index(&d.name).unwrap())
            }
        })
        .collect();
    let states: Vec<Vec<Value>> = pairs
        .iter()
        .map(|&(q1, q2)| {
            lookup
                .iter()
                .map(|&(from1, i)| {
                    if from1 {
                        m1.states[q1][i].clone()
                    } else {
                        m2.states[q2][i].clone()
                    }
                })
                .collect()
        })
        .collect();

    let env: Vec<usize> = vars
        .iter()
        .enumerate()
        .filter(|(_, d)| {
            let n = d.name.as_str();
            (env1.contains(n) || env2.contains(n)) && !sys1.contains(n) && !sys2.contains(n)
        })
        .map(|(i, _)| i)
        .collect();
    let sys: Vec<usize> = (0..vars.len()).filter(|i| !env.contains(i)).collect();

    let fds = Fds { vars, env, sys, states, initial, transitions };
    fds.validate().map_err(|e| ComposeError::Architecture(e.to_string()))?;
    Ok(Composite { fds, pairs })
}

// -- connectors --

/// Connector expression over peer outputs: the usual boolean operators,
/// comparisons, integer constants, `sum(..)` with True counting as one,
/// and `if(cond, a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CExpr {
    Const(Value),
    Var(String),
    Not(Box<CExpr>),
    And(Box<CExpr>, Box<CExpr>),
    Or(Box<CExpr>, Box<CExpr>),
    Cmp(crate::ltl::Rel, Box<CExpr>, Box<CExpr>),
    Add(Box<CExpr>, Box<CExpr>),
    Sum(Vec<CExpr>),
    If(Box<CExpr>, Box<CExpr>, Box<CExpr>),
}

/// A connector: an invariant binding `target` (an environment variable of
/// exactly one component, a system variable of none) to an expression over
/// peer system variables.
#[derive(Debug, Clone)]
pub struct Connector {
    pub target: String,
    pub expr: CExpr,
}

fn as_int(v: &Value) -> Result<i64, ComposeError> {
    match v {
        Value::Int(i) => Ok(*i),
        Value::Bool(b) => Ok(i64::from(*b)),
        Value::Sym(s) => Err(ComposeError::Connector(format!("`{s}` is not numeric"))),
    }
}

fn as_bool(v: &Value) -> Result<bool, ComposeError> {
    match v {
        Value::Bool(b) => Ok(*b),
        Value::Int(i) => Ok(*i != 0),
        Value::Sym(s) => Err(ComposeError::Connector(format!("`{s}` is not boolean"))),
    }
}

impl CExpr {
    pub fn eval(&self, global: &BTreeMap<String, Value>) -> Result<Value, ComposeError> {
        Ok(match self {
            CExpr::Const(v) => v.clone(),
            CExpr::Var(name) => global
                .get(name)
                .cloned()
                .ok_or_else(|| ComposeError::Connector(format!("unknown variable `{name}`")))?,
            CExpr::Not(a) => Value::Bool(!as_bool(&a.eval(global)?)?),
            CExpr::And(a, b) => {
                Value::Bool(as_bool(&a.eval(global)?)? && as_bool(&b.eval(global)?)?)
            }
            CExpr::Or(a, b) => {
                Value::Bool(as_bool(&a.eval(global)?)? || as_bool(&b.eval(global)?)?)
            }
            CExpr::Cmp(rel, a, b) => {
                let (x, y) = (a.eval(global)?, b.eval(global)?);
                Value::Bool(match (&x, &y) {
                    (Value::Sym(_), _) | (_, Value::Sym(_)) => rel.eval(&x, &y),
                    _ => rel.eval(&Value::Int(as_int(&x)?), &Value::Int(as_int(&y)?)),
                })
            }
            CExpr::Add(a, b) => Value::Int(as_int(&a.eval(global)?)? + as_int(&b.eval(global)?)?),
            CExpr::Sum(items) => {
                let mut acc = 0;
                for e in items {
                    acc += as_int(&e.eval(global)?)?;
                }
                Value::Int(acc)
            }
            CExpr::If(c, a, b) => {
                if as_bool(&c.eval(global)?)? {
                    a.eval(global)?
                } else {
                    b.eval(global)?
                }
            }
        })
    }

    pub fn variables(&self, out: &mut BTreeSet<String>) {
        match self {
            CExpr::Const(_) => {}
            CExpr::Var(n) => {
                out.insert(n.clone());
            }
            CExpr::Not(a) => a.variables(out),
            CExpr::And(a, b) | CExpr::Or(a, b) | CExpr::Cmp(_, a, b) | CExpr::Add(a, b) => {
                a.variables(out);
                b.variables(out);
            }
            CExpr::Sum(items) => items.iter().for_each(|e| e.variables(out)),
            CExpr::If(c, a, b) => {
                c.variables(out);
                a.variables(out);
                b.variables(out);
            }
        }
    }
}

/// Evaluate a connector against a global valuation.
pub fn eval_connector(
    c: &Connector,
    global: &BTreeMap<String, Value>,
) -> Result<Value, ComposeError> {
    c.expr.eval(global)
}

/// The connector target must be read (not controlled) by exactly one
/// component and controlled by none; sources must be controlled by peers.
pub fn validate_connector(a: &Architecture, c: &Connector) -> Result<(), ComposeError> {
    let readers = a.components.iter().filter(|comp| comp.env.contains(&c.target)).count();
    let owners = a.components.iter().filter(|comp| comp.sys.contains(&c.target)).count();
    if owners != 0 || readers != 1 {
        return Err(ComposeError::Connector(format!(
            "target `{}` must be an input of exactly one component and an output of none",
            c.target
        )));
    }
    let mut sources = BTreeSet::new();
    c.expr.variables(&mut sources);
    let reader = a
        .components
        .iter()
        .position(|comp| comp.env.contains(&c.target))
        .unwrap();
    for s in &sources {
        let owner = a.components.iter().position(|comp| comp.sys.contains(s));
        match owner {
            Some(o) if o != reader => {}
            Some(_) => {
                return Err(ComposeError::Connector(format!(
                    "source `{s}` is controlled by the reading component"
                )))
            }
            None => {
                return Err(ComposeError::Connector(format!(
                    "source `{s}` is not a system variable of any component"
                )))
            }
        }
    }
    Ok(())
}

/// Parse the connector expression syntax.
pub fn parse_connector_expr(text: &str) -> Result<CExpr, ComposeError> {
    let mut p = CParser { src: text.as_bytes(), pos: 0 };
    let e = p.parse_or()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(ComposeError::Connector(format!("trailing input at byte {}", p.pos)));
    }
    Ok(e)
}

struct CParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl CParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn err(&self, msg: &str) -> ComposeError {
        ComposeError::Connector(format!("{msg} at byte {}", self.pos))
    }

    fn parse_or(&mut self) -> Result<CExpr, ComposeError> {
        let mut lhs = self.parse_and()?;
        while self.eat("|") {
            lhs = CExpr::Or(Box::new(lhs), Box::new(self.parse_and()?));
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<CExpr, ComposeError> {
        let mut lhs = self.parse_cmp()?;
        while self.eat("&") {
            lhs = CExpr::And(Box::new(lhs), Box::new(self.parse_cmp()?));
        }
        Ok(lhs)
    }

    fn parse_cmp(&mut self) -> Result<CExpr, ComposeError> {
        use crate::ltl::Rel;
        let lhs = self.parse_add()?;
        self.skip_ws();
        let rel = if self.eat("!=") {
            Some(Rel::Ne)
        } else if self.eat(">=") {
            Some(Rel::Ge)
        } else if self.eat("<=") {
            Some(Rel::Le)
        } else if self.eat("=") {
            Some(Rel::Eq)
        } else if self.eat(">") {
            Some(Rel::Gt)
        } else if self.eat("<") {
            Some(Rel::Lt)
        } else {
            None
        };
        match rel {
            Some(r) => Ok(CExpr::Cmp(r, Box::new(lhs), Box::new(self.parse_add()?))),
            None => Ok(lhs),
        }
    }

    fn parse_add(&mut self) -> Result<CExpr, ComposeError> {
        let mut lhs = self.parse_primary()?;
        while self.eat("+") {
            lhs = CExpr::Add(Box::new(lhs), Box::new(self.parse_primary()?));
        }
        Ok(lhs)
    }

    fn parse_primary(&mut self) -> Result<CExpr, ComposeError> {
        self.skip_ws();
        if self.eat("!") {
            return Ok(CExpr::Not(Box::new(self.parse_primary()?)));
        }
        if self.eat("(") {
            let e = self.parse_or()?;
            if !self.eat(")") {
                return Err(self.err("expected `)`"));
            }
            return Ok(e);
        }
        let c = *self.src.get(self.pos).ok_or_else(|| self.err("unexpected end"))?;
        if c == b'-' || c.is_ascii_digit() {
            let start = self.pos;
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            return text
                .parse()
                .map(|i| CExpr::Const(Value::Int(i)))
                .map_err(|_| self.err("bad integer"));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let ident = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
            return match ident.as_str() {
                "True" | "true" => Ok(CExpr::Const(Value::Bool(true))),
                "False" | "false" => Ok(CExpr::Const(Value::Bool(false))),
                "sum" => {
                    if !self.eat("(") {
                        return Err(self.err("expected `(` after sum"));
                    }
                    let mut items = vec![self.parse_or()?];
                    while self.eat(",") {
                        items.push(self.parse_or()?);
                    }
                    if !self.eat(")") {
                        return Err(self.err("expected `)`"));
                    }
                    Ok(CExpr::Sum(items))
                }
                "if" => {
                    if !self.eat("(") {
                        return Err(self.err("expected `(` after if"));
                    }
                    let c = self.parse_or()?;
                    if !self.eat(",") {
                        return Err(self.err("expected `,`"));
                    }
                    let a = self.parse_or()?;
                    if !self.eat(",") {
                        return Err(self.err("expected `,`"));
                    }
                    let b = self.parse_or()?;
                    if !self.eat(")") {
                        return Err(self.err("expected `)`"));
                    }
                    Ok(CExpr::If(Box::new(c), Box::new(a), Box::new(b)))
                }
                _ => Ok(CExpr::Var(ident)),
            };
        }
        Err(self.err("unexpected character"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fds::fixtures::toy_controller;
    use crate::ltl::Value;

    fn arch2() -> Architecture {
        Architecture {
            components: vec![
                ComponentVars {
                    name: "sender".into(),
                    env: ["t", "a"].iter().map(|s| s.to_string()).collect(),
                    sys: ["r"].iter().map(|s| s.to_string()).collect(),
                },
                ComponentVars {
                    name: "receiver".into(),
                    env: ["r"].iter().map(|s| s.to_string()).collect(),
                    sys: ["a", "s"].iter().map(|s| s.to_string()).collect(),
                },
            ],
        }
    }

    #[test]
    fn sender_receiver_wiring_is_valid() {
        let (ok, violations, derived) = validate_architecture(&arch2());
        assert!(ok, "{violations:?}");
        assert_eq!(derived.global_env, ["t".to_string()].into_iter().collect());
        assert_eq!(
            derived.transmissions[&(0, 1)],
            ["a".to_string()].into_iter().collect::<BTreeSet<_>>()
        );
        assert_eq!(
            derived.transmissions[&(1, 0)],
            ["r".to_string()].into_iter().collect::<BTreeSet<_>>()
        );
    }

    #[test]
    fn overlapping_outputs_violate_rule_two() {
        let mut a = arch2();
        a.components[0].sys.insert("s".into());
        let (ok, violations, _) = validate_architecture(&a);
        assert!(!ok);
        assert!(violations.iter().any(|v| v.starts_with("A2")));
    }

    #[test]
    fn controlling_own_input_violates_rule_three() {
        let mut a = arch2();
        a.components[0].env.insert("r".into());
        let (ok, violations, _) = validate_architecture(&a);
        assert!(!ok);
        assert!(violations.iter().any(|v| v.starts_with("A3")));
    }

    #[test]
    fn disjoint_components_compose_to_the_full_product() {
        // Two single-variable loops on disjoint variables.
        let unit = |name: &str| {
            let m = Fds {
                vars: vec![VarDecl::boolean(name)],
                env: vec![],
                sys: vec![0],
                states: vec![vec![Value::Bool(false)], vec![Value::Bool(true)]],
                initial: vec![0],
                transitions: vec![vec![1], vec![0]],
            };
            m.validate().unwrap();
            m
        };
        let c = compose(&unit("p"), &unit("q"), 1000).unwrap();
        assert_eq!(c.fds.states.len(), 4, "|Q1| * |Q2| reachable");
        // Interleavings plus joint steps: from (0,0) to (1,0), (0,1), (1,1).
        assert_eq!(c.fds.transitions[0].len(), 3);
    }

    #[test]
    fn composition_is_commutative_up_to_relabeling() {
        let m1 = toy_controller();
        // A trivial peer that drives x with its own output.
        let driver = Fds {
            vars: vec![VarDecl::boolean("x")],
            env: vec![],
            sys: vec![0],
            states: vec![vec![Value::Bool(true)], vec![Value::Bool(false)]],
            initial: vec![0],
            transitions: vec![vec![0, 1], vec![0, 1]],
        };
        let a = compose(&m1, &driver, 100_000).unwrap();
        let b = compose(&driver, &m1, 100_000).unwrap();
        assert_eq!(a.fds.states.len(), b.fds.states.len());
        // Explicit bijection through the swapped product keys.
        let index_b: HashMap<(usize, usize), usize> =
            b.pairs.iter().enumerate().map(|(i, &(x, y))| ((y, x), i)).collect();
        for (ia, &(q1, q2)) in a.pairs.iter().enumerate() {
            let ib = index_b[&(q1, q2)];
            let mut succ_a: Vec<(usize, usize)> =
                a.fds.transitions[ia].iter().map(|&s| a.pairs[s]).collect();
            let mut succ_b: Vec<(usize, usize)> = b.fds.transitions[ib]
                .iter()
                .map(|&s| {
                    let (x, y) = b.pairs[s];
                    (y, x)
                })
                .collect();
            succ_a.sort_unstable();
            succ_b.sort_unstable();
            assert_eq!(succ_a, succ_b);
        }
    }

    #[test]
    fn composite_projections_are_component_computations() {
        let m1 = toy_controller();
        let driver = Fds {
            vars: vec![VarDecl::boolean("x")],
            env: vec![],
            sys: vec![0],
            states: vec![vec![Value::Bool(true)], vec![Value::Bool(false)]],
            initial: vec![0],
            transitions: vec![vec![0, 1], vec![0, 1]],
        };
        let c = compose(&m1, &driver, 100_000).unwrap();
        // Walk a composite run and project.
        let mut run = vec![c.fds.initial[0]];
        for _ in 0..12 {
            let last = *run.last().unwrap();
            let Some(&next) = c.fds.transitions[last].first() else { break };
            run.push(next);
        }
        let mut proj1: Vec<usize> = run.iter().map(|&s| c.pairs[s].0).collect();
        proj1.dedup(); // remove stuttering
        assert!(m1.is_computation(&proj1), "projection {proj1:?}");
    }

    #[test]
    fn nonblocking_components_with_self_loops_compose_nonblocking() {
        let m1 = toy_controller();
        let driver = Fds {
            vars: vec![VarDecl::boolean("x")],
            env: vec![],
            sys: vec![0],
            states: vec![vec![Value::Bool(true)], vec![Value::Bool(false)]],
            initial: vec![0],
            transitions: vec![vec![0, 1], vec![0, 1]],
        };
        let c = compose(&m1, &driver, 100_000).unwrap();
        assert!(crate::fds::is_nonblocking(&c.fds));
    }

    #[test]
    fn connector_expressions_evaluate_with_boolean_arithmetic() {
        let mut global = BTreeMap::new();
        global.insert("e_0".to_string(), Value::Bool(true));
        global.insert("e_1".to_string(), Value::Bool(true));
        global.insert("cell_0".to_string(), Value::Int(2));
        global.insert("cell_1".to_string(), Value::Int(2));
        global.insert("R".to_string(), Value::Int(1));
        global.insert("D".to_string(), Value::Int(4));
        // Engagement count on vertex 2.
        let e = parse_connector_expr("sum(e_0 & cell_0 = 2, e_1 & cell_1 = 2)").unwrap();
        assert_eq!(e.eval(&global).unwrap(), Value::Int(2));
        // Dispatch demultiplexer.
        let d1 = parse_connector_expr("if(R = 1, D, -1)").unwrap();
        assert_eq!(d1.eval(&global).unwrap(), Value::Int(4));
        let d0 = parse_connector_expr("if(R = 0, D, -1)").unwrap();
        assert_eq!(d0.eval(&global).unwrap(), Value::Int(-1));
        // Flag sensing.
        global.insert("f_2".to_string(), Value::Bool(false));
        let flag = parse_connector_expr("f_2 & cell_0 = 2").unwrap();
        assert_eq!(flag.eval(&global).unwrap(), Value::Bool(false));
    }

    #[test]
    fn connector_validation() {
        let a = arch2();
        let good = Connector {
            target: "t".into(),
            expr: parse_connector_expr("a & r = 0").unwrap(),
        };
        assert!(validate_connector(&a, &good).is_ok());
        let bad_target = Connector {
            target: "r".into(),
            expr: parse_connector_expr("a").unwrap(),
        };
        assert!(validate_connector(&a, &bad_target).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let m1 = toy_controller();
        let driver = Fds {
            vars: vec![VarDecl::boolean("x")],
            env: vec![],
            sys: vec![0],
            states: vec![vec![Value::Bool(true)], vec![Value::Bool(false)]],
            initial: vec![0],
            transitions: vec![vec![0, 1], vec![0, 1]],
        };
        assert!(matches!(
            compose(&m1, &driver, 3),
            Err(ComposeError::CapExceeded(3))
        ));
    }
}
