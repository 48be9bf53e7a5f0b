//! The LTL fragment used throughout the toolkit: typed finite-domain
//! variables, formula ASTs, parsing, desugaring, syntactic classification
//! and finite (lasso) evaluation.
//!
//! Surface syntax: `[]` always, `<>` eventually, `X(..)` next, `U` until,
//! `W` weak until, `!`, `&`, `|`, `->`, `<->`. Atoms relate a variable to a
//! constant (`r = -1`, `c < 3`, `m = gu`); a bare boolean variable `u` is
//! shorthand for `u = True`.

mod lasso;
mod parser;
mod specfile;

pub use lasso::{eval_lasso, Lasso};
pub use parser::{parse_constant, parse_formula};
pub use specfile::{parse_spec_file, write_spec_file};

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// The sentinel integer standing for "empty"/"none" in integer signals.
pub const EPSILON: i64 = -1;

#[derive(Debug, Error)]
pub enum LtlError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVar(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVar(String),
    #[error("constant `{val}` outside the domain of `{var}`")]
    OutOfDomain { var: String, val: String },
    #[error("relation `{rel}` not applicable to `{var}`")]
    BadRelation { rel: String, var: String },
    #[error("fresh trigger name `{0}` collides with a declared variable")]
    TriggerCollision(String),
    #[error("malformed spec file, line {line}: {msg}")]
    SpecFile { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

/// Domain of a state variable: booleans, an integer interval, or a set of
/// named constants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Domain {
    Bool(String), // serialized as the string "bool"
    Int { lo: i64, hi: i64 },
    Enum(Vec<String>),
}

impl Domain {
    pub fn bool() -> Self {
        Domain::Bool("bool".to_string())
    }

    pub fn size(&self) -> usize {
        match self {
            Domain::Bool(_) => 2,
            Domain::Int { lo, hi } => (hi - lo + 1) as usize,
            Domain::Enum(names) => names.len(),
        }
    }

    /// k-th value of the domain, in its canonical order.
    pub fn value(&self, k: usize) -> Value {
        match self {
            Domain::Bool(_) => Value::Bool(k == 1),
            Domain::Int { lo, .. } => Value::Int(lo + k as i64),
            Domain::Enum(names) => Value::Sym(names[k].clone()),
        }
    }

    pub fn index_of(&self, v: &Value) -> Option<usize> {
        match (self, v) {
            (Domain::Bool(_), Value::Bool(b)) => Some(usize::from(*b)),
            (Domain::Int { lo, hi }, Value::Int(i)) if lo <= i && i <= hi => {
                Some((i - lo) as usize)
            }
            (Domain::Enum(names), Value::Sym(s)) => names.iter().position(|n| n == s),
            _ => None,
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.index_of(v).is_some()
    }

    pub fn validate(&self) -> Result<(), LtlError> {
        match self {
            Domain::Bool(s) if s == "bool" => Ok(()),
            Domain::Bool(s) => Err(LtlError::Invalid(format!("bad domain tag `{s}`"))),
            Domain::Int { lo, hi } if lo <= hi => Ok(()),
            Domain::Int { lo, hi } => {
                Err(LtlError::Invalid(format!("empty interval {lo}..{hi}")))
            }
            Domain::Enum(names) if !names.is_empty() => Ok(()),
            Domain::Enum(_) => Err(LtlError::Invalid("empty enumeration".into())),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Bool(_) => write!(f, "bool"),
            Domain::Int { lo, hi } => write!(f, "{lo}..{hi}"),
            Domain::Enum(names) => write!(f, "{{{}}}", names.join(",")),
        }
    }
}

/// A typed state variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarDecl {
    pub name: String,
    pub domain: Domain,
}

impl VarDecl {
    pub fn boolean(name: impl Into<String>) -> Self {
        VarDecl { name: name.into(), domain: Domain::bool() }
    }

    pub fn int(name: impl Into<String>, lo: i64, hi: i64) -> Self {
        VarDecl { name: name.into(), domain: Domain::Int { lo, hi } }
    }

    pub fn enumeration(name: impl Into<String>, values: &[&str]) -> Self {
        VarDecl {
            name: name.into(),
            domain: Domain::Enum(values.iter().map(|s| s.to_string()).collect()),
        }
    }
}

/// A domain value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Sym(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{}", if *b { "True" } else { "False" }),
            Value::Int(i) => write!(f, "{i}"),
            Value::Sym(s) => write!(f, "{s}"),
        }
    }
}

/// A total assignment of values to a declared variable list, by position.
pub type Valuation = Vec<Value>;

/// Check that a valuation assigns exactly the declared variables, in domain.
pub fn valuation_ok(v: &Valuation, decls: &[VarDecl]) -> bool {
    v.len() == decls.len() && v.iter().zip(decls).all(|(x, d)| d.domain.contains(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rel {
    Eq,
    Ne,
    Le,
    Lt,
    Ge,
    Gt,
}

impl Rel {
    pub fn eval(self, lhs: &Value, rhs: &Value) -> bool {
        match self {
            Rel::Eq => lhs == rhs,
            Rel::Ne => lhs != rhs,
            _ => {
                let (Value::Int(a), Value::Int(b)) = (lhs, rhs) else {
                    return false;
                };
                match self {
                    Rel::Le => a <= b,
                    Rel::Lt => a < b,
                    Rel::Ge => a >= b,
                    Rel::Gt => a > b,
                    _ => unreachable!(),
                }
            }
        }
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rel::Eq => "=",
            Rel::Ne => "!=",
            Rel::Le => "<=",
            Rel::Lt => "<",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        };
        write!(f, "{s}")
    }
}

/// Formula AST over a variable table. Atoms reference variables by index
/// into the table the formula was built against.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    True,
    Atom { var: usize, rel: Rel, val: Value },
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Eventually(Box<Formula>),
    Always(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    WeakUntil(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(var: usize, rel: Rel, val: Value) -> Self {
        Formula::Atom { var, rel, val }
    }

    /// Boolean atom shorthand: `u` for `u = True`.
    pub fn var(var: usize) -> Self {
        Formula::Atom { var, rel: Rel::Eq, val: Value::Bool(true) }
    }

    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn or(self, rhs: Self) -> Self {
        Formula::Or(Box::new(self), Box::new(rhs))
    }

    pub fn and(self, rhs: Self) -> Self {
        Formula::And(Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: Self) -> Self {
        Formula::Implies(Box::new(self), Box::new(rhs))
    }

    pub fn iff(self, rhs: Self) -> Self {
        Formula::Iff(Box::new(self), Box::new(rhs))
    }

    pub fn next(self) -> Self {
        Formula::Next(Box::new(self))
    }

    pub fn eventually(self) -> Self {
        Formula::Eventually(Box::new(self))
    }

    pub fn always(self) -> Self {
        Formula::Always(Box::new(self))
    }

    pub fn until(self, rhs: Self) -> Self {
        Formula::Until(Box::new(self), Box::new(rhs))
    }

    pub fn weak_until(self, rhs: Self) -> Self {
        Formula::WeakUntil(Box::new(self), Box::new(rhs))
    }

    pub fn false_() -> Self {
        Formula::True.not()
    }

    /// Conjunction of a list; `True` when empty.
    pub fn and_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = fs.into_iter();
        match it.next() {
            None => Formula::True,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Disjunction of a list; `!True` when empty.
    pub fn or_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = fs.into_iter();
        match it.next() {
            None => Formula::false_(),
            Some(first) => it.fold(first, Formula::or),
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::Atom { .. } => vec![],
            Formula::Not(a)
            | Formula::Next(a)
            | Formula::Eventually(a)
            | Formula::Always(a) => vec![a],
            Formula::Or(a, b)
            | Formula::And(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Until(a, b)
            | Formula::WeakUntil(a, b) => vec![a, b],
        }
    }

    pub fn is_propositional(&self) -> bool {
        !matches!(
            self,
            Formula::Next(_)
                | Formula::Eventually(_)
                | Formula::Always(_)
                | Formula::Until(..)
                | Formula::WeakUntil(..)
        ) && self.children().iter().all(|c| c.is_propositional())
    }

    pub fn contains_next(&self) -> bool {
        matches!(self, Formula::Next(_)) || self.children().iter().any(|c| c.contains_next())
    }

    /// Maximum nesting depth of the next operator.
    pub fn next_depth(&self) -> usize {
        let inner = self.children().iter().map(|c| c.next_depth()).max().unwrap_or(0);
        match self {
            Formula::Next(_) => inner + 1,
            _ => inner,
        }
    }

    /// Variable indices mentioned anywhere in the formula.
    pub fn vars(&self, out: &mut Vec<usize>) {
        if let Formula::Atom { var, .. } = self {
            if !out.contains(var) {
                out.push(*var);
            }
        }
        for c in self.children() {
            c.vars(out);
        }
    }

    /// Variable indices mentioned under a next operator.
    pub fn next_vars(&self, out: &mut Vec<usize>) {
        if let Formula::Next(inner) = self {
            inner.vars(out);
        } else {
            for c in self.children() {
                c.next_vars(out);
            }
        }
    }

    /// Evaluate a propositional formula on a single valuation.
    /// Temporal nodes are rejected by returning `None`.
    pub fn eval_prop(&self, v: &Valuation) -> Option<bool> {
        match self {
            Formula::True => Some(true),
            Formula::Atom { var, rel, val } => Some(rel.eval(&v[*var], val)),
            Formula::Not(a) => a.eval_prop(v).map(|x| !x),
            Formula::Or(a, b) => Some(a.eval_prop(v)? || b.eval_prop(v)?),
            Formula::And(a, b) => Some(a.eval_prop(v)? && b.eval_prop(v)?),
            Formula::Implies(a, b) => Some(!a.eval_prop(v)? || b.eval_prop(v)?),
            Formula::Iff(a, b) => Some(a.eval_prop(v)? == b.eval_prop(v)?),
            _ => None,
        }
    }

    /// Evaluate a transition formula (next depth <= 1) on a pair of
    /// valuations: plain atoms read `cur`, next atoms read `nxt`.
    pub fn eval_step(&self, cur: &Valuation, nxt: &Valuation) -> Option<bool> {
        match self {
            Formula::True => Some(true),
            Formula::Atom { var, rel, val } => Some(rel.eval(&cur[*var], val)),
            Formula::Not(a) => a.eval_step(cur, nxt).map(|x| !x),
            Formula::Or(a, b) => Some(a.eval_step(cur, nxt)? || b.eval_step(cur, nxt)?),
            Formula::And(a, b) => Some(a.eval_step(cur, nxt)? && b.eval_step(cur, nxt)?),
            Formula::Implies(a, b) => Some(!a.eval_step(cur, nxt)? || b.eval_step(cur, nxt)?),
            Formula::Iff(a, b) => Some(a.eval_step(cur, nxt)? == b.eval_step(cur, nxt)?),
            Formula::Next(a) => a.eval_prop(nxt),
            _ => None,
        }
    }

    /// Render with the concrete ASCII syntax, against a variable table.
    pub fn display<'a>(&'a self, decls: &'a [VarDecl]) -> FormulaDisplay<'a> {
        FormulaDisplay { f: self, decls }
    }
}

pub struct FormulaDisplay<'a> {
    f: &'a Formula,
    decls: &'a [VarDecl],
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self.f, self.decls, 6, out)
    }
}

// Binding levels: 0 primary/unary, 1 U/W, 2 &, 3 |, 4 -> <->.
fn level(f: &Formula) -> u8 {
    match f {
        Formula::True
        | Formula::Atom { .. }
        | Formula::Not(_)
        | Formula::Next(_)
        | Formula::Eventually(_)
        | Formula::Always(_) => 0,
        Formula::Until(..) | Formula::WeakUntil(..) => 1,
        Formula::And(..) => 2,
        Formula::Or(..) => 3,
        Formula::Implies(..) | Formula::Iff(..) => 4,
    }
}

fn write_formula(
    f: &Formula,
    decls: &[VarDecl],
    max: u8,
    out: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    let lv = level(f);
    let paren = lv > max;
    if paren {
        write!(out, "(")?;
    }
    match f {
        Formula::True => write!(out, "True")?,
        Formula::Atom { var, rel, val } => {
            let name = &decls[*var].name;
            match (rel, val) {
                (Rel::Eq, Value::Bool(true)) => write!(out, "{name}")?,
                (Rel::Eq, Value::Bool(false)) => write!(out, "!{name}")?,
                _ => write!(out, "{name} {rel} {val}")?,
            }
        }
        Formula::Not(a) => {
            write!(out, "!")?;
            write_formula(a, decls, 0, out)?;
        }
        Formula::Next(a) => {
            write!(out, "X(")?;
            write_formula(a, decls, 6, out)?;
            write!(out, ")")?;
        }
        Formula::Eventually(a) => {
            write!(out, "<>")?;
            write_formula(a, decls, 0, out)?;
        }
        Formula::Always(a) => {
            write!(out, "[]")?;
            write_formula(a, decls, 0, out)?;
        }
        Formula::Until(a, b) => {
            write_formula(a, decls, 0, out)?;
            write!(out, " U ")?;
            write_formula(b, decls, 1, out)?;
        }
        Formula::WeakUntil(a, b) => {
            write_formula(a, decls, 0, out)?;
            write!(out, " W ")?;
            write_formula(b, decls, 1, out)?;
        }
        Formula::And(a, b) => {
            write_formula(a, decls, 2, out)?;
            write!(out, " & ")?;
            write_formula(b, decls, 1, out)?;
        }
        Formula::Or(a, b) => {
            write_formula(a, decls, 3, out)?;
            write!(out, " | ")?;
            write_formula(b, decls, 2, out)?;
        }
        Formula::Implies(a, b) => {
            write_formula(a, decls, 3, out)?;
            write!(out, " -> ")?;
            write_formula(b, decls, 4, out)?;
        }
        Formula::Iff(a, b) => {
            write_formula(a, decls, 3, out)?;
            write!(out, " <-> ")?;
            write_formula(b, decls, 4, out)?;
        }
    }
    if paren {
        write!(out, ")")?;
    }
    Ok(())
}

/// Rewrite to the kernel {Atom, True, Not, Or, Next, Until}:
/// `a & b = !(!a | !b)`, `a -> b = !a | b`, `a <-> b = (a -> b) & (b -> a)`,
/// `<>a = True U a`, `[]a = !(True U !a)`, `a W b = (a U b) | []a`.
pub fn desugar(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::Atom { .. } => f.clone(),
        Formula::Not(a) => desugar(a).not(),
        Formula::Or(a, b) => desugar(a).or(desugar(b)),
        Formula::And(a, b) => desugar(a).not().or(desugar(b).not()).not(),
        Formula::Implies(a, b) => desugar(a).not().or(desugar(b)),
        Formula::Iff(a, b) => {
            let (a, b) = (desugar(a), desugar(b));
            let fwd = a.clone().not().or(b.clone());
            let bwd = b.not().or(a);
            fwd.not().or(bwd.not()).not()
        }
        Formula::Next(a) => desugar(a).next(),
        Formula::Eventually(a) => Formula::True.until(desugar(a)),
        Formula::Always(a) => Formula::True.until(desugar(a).not()).not(),
        Formula::Until(a, b) => desugar(a).until(desugar(b)),
        Formula::WeakUntil(a, b) => {
            let (a, b) = (desugar(a), desugar(b));
            let until = a.clone().until(b);
            let always = Formula::True.until(a.not()).not();
            until.or(always)
        }
    }
}

/// Conservative syntactic safety check: true iff the formula is derivable
/// from propositional formulas under the closure operators
/// (conjunction, disjunction, next, until, weak until, always).
pub fn classify_safety_syntactic(f: &Formula) -> bool {
    if f.is_propositional() {
        return true;
    }
    match f {
        Formula::And(a, b) | Formula::Or(a, b) => {
            classify_safety_syntactic(a) && classify_safety_syntactic(b)
        }
        Formula::Next(a) | Formula::Always(a) => classify_safety_syntactic(a),
        Formula::Until(a, b) | Formula::WeakUntil(a, b) => {
            classify_safety_syntactic(a) && classify_safety_syntactic(b)
        }
        _ => false,
    }
}

/// Sufficient stutter-invariance condition: no next operator remains after
/// desugaring.
pub fn is_stutter_invariant_syntactic(f: &Formula) -> bool {
    !desugar(f).contains_next()
}

/// The GR[1] fragment emitted for a response property `[](p -> <>q)`:
/// one fresh boolean trigger variable plus its init/transition/liveness
/// conjuncts.
#[derive(Debug, Clone)]
pub struct ResponseBlock {
    pub trigger: VarDecl,
    pub init: Formula,
    pub trans: Vec<Formula>,
    pub live: Formula,
}

/// Translate the response `[](p -> <>q)` into GR[1] conjuncts over a fresh
/// boolean trigger. `trigger_index` is the index the trigger variable will
/// occupy in the final variable table.
pub fn translate_response_to_gr1(
    p: &Formula,
    q: &Formula,
    fresh: &str,
    trigger_index: usize,
    decls: &[VarDecl],
) -> Result<ResponseBlock, LtlError> {
    if decls.iter().any(|d| d.name == fresh) {
        return Err(LtlError::TriggerCollision(fresh.to_string()));
    }
    let t = || Formula::var(trigger_index);
    // !t -> (p & !q)
    let init = t().not().implies(p.clone().and(q.clone().not()));
    // []( ((!t | X p) & X !q) -> X !t )
    let t1 = t()
        .not()
        .or(p.clone().next())
        .and(q.clone().not().next())
        .implies(t().not().next());
    // []( !t & X t -> X q )
    let t2 = t().not().and(t().next()).implies(q.clone().next());
    // []( t & X !t -> X p )
    let t3 = t().and(t().not().next()).implies(p.clone().next());
    Ok(ResponseBlock {
        trigger: VarDecl::boolean(fresh),
        init,
        trans: vec![t1, t2, t3],
        live: t(),
    })
}

/// Six-part GR[1] assumption/guarantee specification.
///
/// Variable indices used inside formulas cover environment variables first
/// (0..e) and then system variables (e..e+s). Transition formulas are the
/// bodies `B` of `[]B` conjuncts; liveness formulas the bodies of `[]<>B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gr1Spec {
    pub env_vars: Vec<VarDecl>,
    pub sys_vars: Vec<VarDecl>,
    pub env_init: Formula,
    pub sys_init: Formula,
    pub env_trans: Vec<Formula>,
    pub sys_trans: Vec<Formula>,
    pub env_live: Vec<Formula>,
    pub sys_live: Vec<Formula>,
}

impl Gr1Spec {
    pub fn new(env_vars: Vec<VarDecl>, sys_vars: Vec<VarDecl>) -> Self {
        Gr1Spec {
            env_vars,
            sys_vars,
            env_init: Formula::True,
            sys_init: Formula::True,
            env_trans: vec![],
            sys_trans: vec![],
            env_live: vec![],
            sys_live: vec![],
        }
    }

    pub fn all_vars(&self) -> Vec<VarDecl> {
        self.env_vars.iter().chain(&self.sys_vars).cloned().collect()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.env_vars
            .iter()
            .chain(&self.sys_vars)
            .position(|d| d.name == name)
    }

    pub fn num_vars(&self) -> usize {
        self.env_vars.len() + self.sys_vars.len()
    }

    fn is_env_index(&self, idx: usize) -> bool {
        idx < self.env_vars.len()
    }

    /// Structural invariants: disjoint variable names, propositional
    /// init/liveness parts, transition conjuncts of next-depth at most one
    /// with environment transitions constraining only environment
    /// variables under the next operator.
    pub fn validate(&self) -> Result<(), LtlError> {
        let mut seen = std::collections::HashSet::new();
        for d in self.env_vars.iter().chain(&self.sys_vars) {
            d.domain.validate()?;
            if !seen.insert(d.name.clone()) {
                return Err(LtlError::DuplicateVar(d.name.clone()));
            }
        }
        for f in [&self.env_init, &self.sys_init] {
            if !f.is_propositional() {
                return Err(LtlError::Invalid("initial condition must be propositional".into()));
            }
        }
        for f in self.env_live.iter().chain(&self.sys_live) {
            if !f.is_propositional() {
                return Err(LtlError::Invalid("justice goal must be propositional".into()));
            }
        }
        for f in self.env_trans.iter().chain(&self.sys_trans) {
            if f.next_depth() > 1 {
                return Err(LtlError::Invalid(format!(
                    "transition conjunct has next depth {} > 1",
                    f.next_depth()
                )));
            }
            if matches!(
                f,
                Formula::Eventually(_) | Formula::Always(_) | Formula::Until(..) | Formula::WeakUntil(..)
            ) {
                return Err(LtlError::Invalid(
                    "transition conjunct must be a boolean combination of atoms and next-atoms"
                        .into(),
                ));
            }
        }
        for f in &self.env_trans {
            let mut nv = vec![];
            f.next_vars(&mut nv);
            if let Some(bad) = nv.iter().find(|i| !self.is_env_index(**i)) {
                let name = &self.all_vars()[*bad].name;
                return Err(LtlError::Invalid(format!(
                    "environment transition constrains next value of system variable `{name}`"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bool_decls(names: &[&str]) -> Vec<VarDecl> {
        names.iter().map(|n| VarDecl::boolean(*n)).collect()
    }

    #[test]
    fn desugar_eventually_is_true_until() {
        let decls = bool_decls(&["p"]);
        let f = parse_formula("<> p", &decls).unwrap();
        assert_eq!(desugar(&f), Formula::True.until(Formula::var(0)));
    }

    #[test]
    fn desugar_always_is_not_until_not() {
        let decls = bool_decls(&["p"]);
        let f = parse_formula("[] p", &decls).unwrap();
        assert_eq!(desugar(&f), Formula::True.until(Formula::var(0).not()).not());
    }

    #[test]
    fn desugar_weak_until() {
        let decls = bool_decls(&["p", "q"]);
        let f = parse_formula("p W q", &decls).unwrap();
        let until = Formula::var(0).until(Formula::var(1));
        let always = Formula::True.until(Formula::var(0).not()).not();
        assert_eq!(desugar(&f), until.or(always));
    }

    #[test]
    fn desugar_kernel_only() {
        let decls = bool_decls(&["p", "q"]);
        for text in ["p <-> q", "p -> q & <> p", "[] (p W q)", "p U (q | !p)"] {
            let f = parse_formula(text, &decls).unwrap();
            fn kernel(f: &Formula) -> bool {
                matches!(
                    f,
                    Formula::True
                        | Formula::Atom { .. }
                        | Formula::Not(_)
                        | Formula::Or(..)
                        | Formula::Next(_)
                        | Formula::Until(..)
                ) && f.children().iter().all(|c| kernel(c))
            }
            assert!(kernel(&desugar(&f)), "{text}");
        }
    }

    #[test]
    fn safety_classification() {
        let decls = bool_decls(&["x", "y", "z"]);
        let yes = ["[] x", "(x U y) & [] z", "x W y", "X(x) | y", "x & !y"];
        let no = ["<> x", "[] <> x", "!(x U y)", "x -> <> y"];
        for t in yes {
            assert!(classify_safety_syntactic(&parse_formula(t, &decls).unwrap()), "{t}");
        }
        for t in no {
            assert!(!classify_safety_syntactic(&parse_formula(t, &decls).unwrap()), "{t}");
        }
    }

    #[test]
    fn stutter_invariance_examples() {
        let decls = bool_decls(&["x", "y"]);
        let f = parse_formula("[] <> x", &decls).unwrap();
        assert!(is_stutter_invariant_syntactic(&f));
        // The paper's rising-edge form needs the next operator.
        let g = parse_formula("[](x -> X(!x -> y))", &decls).unwrap();
        assert!(!is_stutter_invariant_syntactic(&g));
        // Its rewritten weak-until form does not.
        let h = parse_formula("[](x -> x W y)", &decls).unwrap();
        assert!(is_stutter_invariant_syntactic(&h));
    }

    #[test]
    fn response_translation_shape() {
        let decls = bool_decls(&["x", "y1"]);
        let p = Formula::var(0);
        let q = Formula::var(1);
        let block = translate_response_to_gr1(&p, &q, "t", 2, &decls).unwrap();
        assert_eq!(block.trans.len(), 3);
        let t = Formula::var(2);
        assert_eq!(block.init, t.clone().not().implies(p.clone().and(q.clone().not())));
        assert_eq!(block.live, t);
        // Collision with an existing name is rejected.
        assert!(translate_response_to_gr1(&p, &q, "x", 2, &decls).is_err());
    }

    #[test]
    fn response_translation_vacuous_antecedent() {
        let decls = bool_decls(&["y"]);
        let p = Formula::false_();
        let q = Formula::var(0);
        let block = translate_response_to_gr1(&p, &q, "t", 1, &decls).unwrap();
        assert_eq!(block.trans.len(), 3);
    }

    #[test]
    fn validate_rejects_env_trans_on_sys_next() {
        let mut spec = Gr1Spec::new(bool_decls(&["x"]), bool_decls(&["y"]));
        spec.env_trans.push(Formula::var(1).next());
        assert!(spec.validate().is_err());
        spec.env_trans.clear();
        spec.env_trans.push(Formula::var(0).next());
        assert!(spec.validate().is_ok());
    }
}
