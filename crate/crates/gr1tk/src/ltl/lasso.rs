//! Evaluation of formulas on lassos (ultimately periodic sequences).

use super::{Formula, Valuation};
use std::collections::HashMap;

/// A finitely-represented infinite sequence: a prefix followed by a loop
/// repeated forever.
#[derive(Debug, Clone, PartialEq)]
pub struct Lasso {
    pub prefix: Vec<Valuation>,
    pub looped: Vec<Valuation>,
}

impl Lasso {
    pub fn new(prefix: Vec<Valuation>, looped: Vec<Valuation>) -> Self {
        assert!(!looped.is_empty(), "lasso loop must be nonempty");
        Lasso { prefix, looped }
    }

    /// Number of distinct positions (prefix plus one loop copy).
    pub fn positions(&self) -> usize {
        self.prefix.len() + self.looped.len()
    }

    /// Valuation at an unrolled position index.
    pub fn at(&self, pos: usize) -> &Valuation {
        if pos < self.prefix.len() {
            &self.prefix[pos]
        } else {
            &self.looped[(pos - self.prefix.len()) % self.looped.len()]
        }
    }

    /// Successor in the quotient position set {0, .., prefix+loop-1}.
    fn succ(&self, pos: usize) -> usize {
        if pos + 1 < self.positions() {
            pos + 1
        } else {
            self.prefix.len()
        }
    }
}

/// Decide `(sigma, j) |= f` where `sigma` is the infinite unrolling of the
/// lasso. Until and eventually are resolved by walking quotient positions
/// with loop closure, scanning up to `prefix + 2*loop` steps, which covers
/// every loop position; subformula values are memoized per quotient
/// position, making the evaluation exact for arbitrary nesting.
pub fn eval_lasso(f: &Formula, l: &Lasso, j: usize) -> bool {
    assert!(j < l.positions(), "position {j} out of range");
    let mut memo = HashMap::new();
    eval(f, l, j, &mut memo)
}

fn eval(f: &Formula, l: &Lasso, pos: usize, memo: &mut HashMap<(usize, usize), bool>) -> bool {
    let key = (f as *const Formula as usize, pos);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let result = match f {
        Formula::True => true,
        Formula::Atom { var, rel, val } => rel.eval(&l.at(pos)[*var], val),
        Formula::Not(a) => !eval(a, l, pos, memo),
        Formula::Or(a, b) => eval(a, l, pos, memo) || eval(b, l, pos, memo),
        Formula::And(a, b) => eval(a, l, pos, memo) && eval(b, l, pos, memo),
        Formula::Implies(a, b) => !eval(a, l, pos, memo) || eval(b, l, pos, memo),
        Formula::Iff(a, b) => eval(a, l, pos, memo) == eval(b, l, pos, memo),
        Formula::Next(a) => eval(a, l, l.succ(pos), memo),
        Formula::Eventually(a) => scan_until(&Formula::True, a, l, pos, memo),
        Formula::Always(a) => !scan_until(&Formula::True, &a.clone().not(), l, pos, memo),
        Formula::Until(a, b) => scan_until(a, b, l, pos, memo),
        Formula::WeakUntil(a, b) => {
            scan_until(a, b, l, pos, memo)
                || !scan_until(&Formula::True, &a.clone().not(), l, pos, memo)
        }
    };
    memo.insert(key, result);
    result
}

// `a U b` from `pos`: walk successors for prefix + 2*loop steps.
fn scan_until(
    a: &Formula,
    b: &Formula,
    l: &Lasso,
    pos: usize,
    memo: &mut HashMap<(usize, usize), bool>,
) -> bool {
    let horizon = l.prefix.len() + 2 * l.looped.len();
    let mut cur = pos;
    for _ in 0..=horizon {
        if eval(b, l, cur, memo) {
            return true;
        }
        if !eval(a, l, cur, memo) {
            return false;
        }
        cur = l.succ(cur);
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{parse_formula, VarDecl, Value};

    fn v(bits: &[bool]) -> Valuation {
        bits.iter().map(|b| Value::Bool(*b)).collect()
    }

    #[test]
    fn always_eventually_on_constant_loop() {
        let decls = vec![VarDecl::boolean("x")];
        let f = parse_formula("[] <> x", &decls).unwrap();
        let l = Lasso::new(vec![], vec![v(&[true])]);
        assert!(eval_lasso(&f, &l, 0));
        let l2 = Lasso::new(vec![], vec![v(&[false])]);
        assert!(!eval_lasso(&f, &l2, 0));
    }

    #[test]
    fn next_crosses_into_loop() {
        let decls = vec![VarDecl::boolean("x")];
        let f = parse_formula("X(x)", &decls).unwrap();
        let l = Lasso::new(vec![v(&[false])], vec![v(&[true])]);
        assert!(eval_lasso(&f, &l, 0));
    }

    #[test]
    fn until_with_prefix() {
        // x U y on prefix [x,!y],[x,!y], loop [!x,y]: holds at 0.
        let decls = vec![VarDecl::boolean("x"), VarDecl::boolean("y")];
        let f = parse_formula("x U y", &decls).unwrap();
        let l = Lasso::new(
            vec![v(&[true, false]), v(&[true, false])],
            vec![v(&[false, true])],
        );
        assert!(eval_lasso(&f, &l, 0));
    }

    #[test]
    fn loop_closure_wraps_next() {
        // Loop [x], [!x]: at the last loop position, X goes back to start.
        let decls = vec![VarDecl::boolean("x")];
        let f = parse_formula("X(x)", &decls).unwrap();
        let l = Lasso::new(vec![], vec![v(&[true]), v(&[false])]);
        assert!(eval_lasso(&f, &l, 1), "successor of loop end is loop start");
        assert!(!eval_lasso(&f, &l, 0));
    }

    #[test]
    fn agrees_with_deep_unrolling() {
        // Oracle: evaluate by explicit unrolling of 3*(prefix+loop) steps
        // using the raw quantifier semantics.
        fn oracle(f: &Formula, l: &Lasso, j: usize) -> bool {
            let n = 3 * (l.prefix.len() + l.looped.len()) + 4;
            match f {
                Formula::True => true,
                Formula::Atom { var, rel, val } => rel.eval(&l.at(j)[*var], val),
                Formula::Not(a) => !oracle(a, l, j),
                Formula::Or(a, b) => oracle(a, l, j) || oracle(b, l, j),
                Formula::And(a, b) => oracle(a, l, j) && oracle(b, l, j),
                Formula::Implies(a, b) => !oracle(a, l, j) || oracle(b, l, j),
                Formula::Iff(a, b) => oracle(a, l, j) == oracle(b, l, j),
                Formula::Next(a) => oracle(a, l, j + 1),
                Formula::Eventually(a) => (j..j + n).any(|k| oracle(a, l, k)),
                Formula::Always(a) => (j..j + n).all(|k| oracle(a, l, k)),
                Formula::Until(a, b) => (j..j + n)
                    .any(|k| oracle(b, l, k) && (j..k).all(|i| oracle(a, l, i))),
                Formula::WeakUntil(a, b) => {
                    (j..j + n).any(|k| oracle(b, l, k) && (j..k).all(|i| oracle(a, l, i)))
                        || (j..j + n).all(|k| oracle(a, l, k))
                }
            }
        }
        // Extend Lasso::at past the quotient for the oracle's unrolling.
        let decls = vec![VarDecl::boolean("p"), VarDecl::boolean("q")];
        let texts = [
            "p U q",
            "[] (p -> <> q)",
            "<> [] p",
            "p W q",
            "X(p U q)",
            "[](p -> X(!p -> q))",
        ];
        let cases = [
            Lasso::new(vec![], vec![v(&[true, false]), v(&[false, true])]),
            Lasso::new(vec![v(&[false, false])], vec![v(&[true, true])]),
            Lasso::new(
                vec![v(&[true, false]); 3],
                vec![v(&[false, false]), v(&[true, false])],
            ),
            Lasso::new(vec![], vec![v(&[false, false])]),
        ];
        for t in texts {
            let f = parse_formula(t, &decls).unwrap();
            for l in &cases {
                for j in 0..l.positions() {
                    assert_eq!(eval_lasso(&f, l, j), oracle(&f, l, j), "{t} at {j}");
                }
            }
        }
    }
}
