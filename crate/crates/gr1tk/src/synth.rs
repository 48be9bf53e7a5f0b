//! GR[1] realizability checking and winning-strategy extraction via an
//! enumerative two-player game solver.
//!
//! Positions are complete valuations of all variables, encoded as mixed
//! radix codes (environment block major). The environment moves first by
//! proposing next values for its variables consistent with every
//! assumption transition conjunct; the system replies with next values for
//! its variables consistent with every guarantee transition conjunct. The
//! winning region is the standard triple fixpoint
//! `nu Z. AND_j mu Y. OR_i nu X. (goal_j & cpre(Z)) | cpre(Y) | (!envgoal_i & cpre(X))`
//! with `cpre(S)` the positions from which the system can force the next
//! position into `S` against every permitted environment move.

use crate::fds::Fds;
use crate::ltl::{Formula, Gr1Spec, LtlError, Rel, Value, VarDecl};
use std::collections::{HashMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("position space {0} exceeds the configured cap {1}")]
    CapExceeded(usize, usize),
    #[error(transparent)]
    Spec(#[from] LtlError),
    #[error("strategy extraction on an unrealizable game")]
    Unrealizable,
    #[error("no initial state satisfies the specification (startup property)")]
    NoInitialState,
}

/// Dense bit set over game positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionSet {
    words: Vec<u64>,
    len: usize,
}

impl PositionSet {
    pub fn empty(len: usize) -> Self {
        PositionSet { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn full(len: usize) -> Self {
        let mut s = PositionSet { words: vec![!0u64; len.div_ceil(64)], len };
        let extra = s.words.len() * 64 - s.len;
        if extra > 0 {
            if let Some(last) = s.words.last_mut() {
                *last &= !0u64 >> extra;
            }
        }
        s
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn union_with(&mut self, other: &PositionSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset_of(&self, other: &PositionSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum Side {
    Cur,
    Nxt,
}

// Transition conjuncts compiled to integer-code comparisons. Values are
// domain indices, which preserve the order of integer domains.
#[derive(Debug, Clone)]
enum Cf {
    True,
    Atom(Side, usize, Rel, usize),
    Not(Box<Cf>),
    Or(Box<Cf>, Box<Cf>),
    And(Box<Cf>, Box<Cf>),
    Iff(Box<Cf>, Box<Cf>),
}

impl Cf {
    fn eval(&self, cur: &[usize], nxt: &[usize]) -> bool {
        match self {
            Cf::True => true,
            Cf::Atom(side, var, rel, code) => {
                let lhs = match side {
                    Side::Cur => cur[*var],
                    Side::Nxt => nxt[*var],
                };
                match rel {
                    Rel::Eq => lhs == *code,
                    Rel::Ne => lhs != *code,
                    Rel::Le => lhs <= *code,
                    Rel::Lt => lhs < *code,
                    Rel::Ge => lhs >= *code,
                    Rel::Gt => lhs > *code,
                }
            }
            Cf::Not(a) => !a.eval(cur, nxt),
            Cf::Or(a, b) => a.eval(cur, nxt) || b.eval(cur, nxt),
            Cf::And(a, b) => a.eval(cur, nxt) && b.eval(cur, nxt),
            Cf::Iff(a, b) => a.eval(cur, nxt) == b.eval(cur, nxt),
        }
    }

    fn max_next_var(&self, out: &mut Option<usize>) {
        match self {
            Cf::Atom(Side::Nxt, var, ..) => {
                *out = Some(out.map_or(*var, |m: usize| m.max(*var)));
            }
            Cf::Atom(..) | Cf::True => {}
            Cf::Not(a) => a.max_next_var(out),
            Cf::Or(a, b) | Cf::And(a, b) | Cf::Iff(a, b) => {
                a.max_next_var(out);
                b.max_next_var(out);
            }
        }
    }
}

fn compile(f: &Formula, decls: &[VarDecl], under_next: bool) -> Cf {
    match f {
        Formula::True => Cf::True,
        Formula::Atom { var, rel, val } => {
            let code = decls[*var]
                .domain
                .index_of(val)
                .expect("atom constant in domain (validated)");
            Cf::Atom(if under_next { Side::Nxt } else { Side::Cur }, *var, *rel, code)
        }
        Formula::Not(a) => Cf::Not(Box::new(compile(a, decls, under_next))),
        Formula::Or(a, b) => Cf::Or(
            Box::new(compile(a, decls, under_next)),
            Box::new(compile(b, decls, under_next)),
        ),
        Formula::And(a, b) => Cf::And(
            Box::new(compile(a, decls, under_next)),
            Box::new(compile(b, decls, under_next)),
        ),
        Formula::Implies(a, b) => Cf::Or(
            Box::new(Cf::Not(Box::new(compile(a, decls, under_next)))),
            Box::new(compile(b, decls, under_next)),
        ),
        Formula::Iff(a, b) => Cf::Iff(
            Box::new(compile(a, decls, under_next)),
            Box::new(compile(b, decls, under_next)),
        ),
        Formula::Next(a) => compile(a, decls, true),
        _ => unreachable!("transition conjuncts carry no other temporal operators"),
    }
}

/// The explicit game arena.
pub struct GameStructure {
    pub spec: Gr1Spec,
    decls: Vec<VarDecl>,
    sizes: Vec<usize>,
    env_count: usize,
    pub env_valuations: usize,
    pub sys_valuations: usize,
    /// Total number of positions (product of all domain sizes).
    pub positions: usize,
    // CSR adjacency: per position, permitted env moves; per env move, the
    // permitted system replies (successor position codes), ascending.
    env_off: Vec<u32>,
    env_dat: Vec<u32>,
    reply_off: Vec<u32>,
    reply_dat: Vec<u32>,
    env_dead: PositionSet,
    sys_dead: PositionSet,
    env_goals: Vec<PositionSet>,
    sys_goals: Vec<PositionSet>,
    env_init_set: PositionSet,
    sys_init_set: PositionSet,
}

#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct Diagnostics {
    pub positions: usize,
    pub outer_iterations: usize,
    pub cpre_calls: usize,
}

#[derive(Debug)]
pub struct SynthesisResult {
    pub realizable: bool,
    pub strategy: Option<Fds>,
    pub winning_region: PositionSet,
    pub diagnostics: Diagnostics,
}

pub const DEFAULT_POSITION_CAP: usize = 2_000_000;

impl GameStructure {
    pub fn valuation(&self, code: usize) -> Vec<Value> {
        let mut codes = vec![0usize; self.sizes.len()];
        decode_into(&self.sizes, code, &mut codes);
        codes
            .iter()
            .zip(&self.decls)
            .map(|(&k, d)| d.domain.value(k))
            .collect()
    }

    fn env_entries(&self, v: usize) -> std::ops::Range<usize> {
        self.env_off[v] as usize..self.env_off[v + 1] as usize
    }

    fn replies(&self, entry: usize) -> &[u32] {
        &self.reply_dat[self.reply_off[entry] as usize..self.reply_off[entry + 1] as usize]
    }

    /// Controllable predecessors of `s`: for every permitted environment
    /// move there is a permitted system reply landing in `s`. Positions
    /// where the environment has no permitted move qualify vacuously.
    pub fn cpre(&self, s: &PositionSet) -> PositionSet {
        let mut out = self.env_dead.clone();
        'pos: for v in 0..self.positions {
            if self.sys_dead.get(v) || self.env_dead.get(v) {
                continue;
            }
            for e in self.env_entries(v) {
                if !self.replies(e).iter().any(|&w| s.get(w as usize)) {
                    continue 'pos;
                }
            }
            out.set(v);
        }
        out
    }

    fn in_cpre_of(&self, v: usize, s: &PositionSet) -> bool {
        if self.env_dead.get(v) {
            return true;
        }
        if self.sys_dead.get(v) {
            return false;
        }
        self.env_entries(v)
            .all(|e| self.replies(e).iter().any(|&w| s.get(w as usize)))
    }
}

fn decode_into(sizes: &[usize], mut code: usize, out: &mut [usize]) {
    for i in (0..sizes.len()).rev() {
        out[i] = code % sizes[i];
        code /= sizes[i];
    }
}

/// Build the explicit game arena from a validated specification.
pub fn build_game(spec: &Gr1Spec, cap: usize) -> Result<GameStructure, SynthError> {
    spec.validate()?;
    let decls = spec.all_vars();
    let env_count = spec.env_vars.len();
    let sizes: Vec<usize> = decls.iter().map(|d| d.domain.size()).collect();
    let mut positions = 1usize;
    for &s in &sizes {
        positions = positions.saturating_mul(s);
        if positions > cap {
            return Err(SynthError::CapExceeded(positions, cap));
        }
    }
    let env_valuations: usize = sizes[..env_count].iter().product();
    let sys_valuations: usize = sizes[env_count..].iter().product();

    // Compile conjuncts and schedule them at the deepest next-variable they
    // mention, so partial assignments prune the enumeration early.
    // Conjuncts without next-atoms act as state invariants.
    let schedule = |fs: &[Formula]| -> (Vec<Cf>, Vec<Vec<Cf>>) {
        let mut invariants = vec![];
        let mut by_level: Vec<Vec<Cf>> = vec![Vec::new(); decls.len()];
        for f in fs {
            let cf = compile(f, &decls, false);
            let mut max = None;
            cf.max_next_var(&mut max);
            match max {
                None => invariants.push(cf),
                Some(m) => by_level[m].push(cf),
            }
        }
        (invariants, by_level)
    };
    let (env_inv, env_by_level) = schedule(&spec.env_trans);
    let (sys_inv, sys_by_level) = schedule(&spec.sys_trans);

    let prop_set = |f: &Formula| -> PositionSet {
        let cf = compile(f, &decls, false);
        let mut set = PositionSet::empty(positions);
        let mut codes = vec![0usize; sizes.len()];
        for v in 0..positions {
            decode_into(&sizes, v, &mut codes);
            if cf.eval(&codes, &codes) {
                set.set(v);
            }
        }
        set
    };

    let env_goals: Vec<PositionSet> = if spec.env_live.is_empty() {
        vec![PositionSet::full(positions)]
    } else {
        spec.env_live.iter().map(prop_set).collect()
    };
    let sys_goals: Vec<PositionSet> = if spec.sys_live.is_empty() {
        vec![PositionSet::full(positions)]
    } else {
        spec.sys_live.iter().map(prop_set).collect()
    };
    let env_init_set = prop_set(&spec.env_init);
    let sys_init_set = prop_set(&spec.sys_init);

    let mut env_off: Vec<u32> = Vec::with_capacity(positions + 1);
    let mut env_dat: Vec<u32> = Vec::new();
    let mut reply_off: Vec<u32> = vec![0];
    let mut reply_dat: Vec<u32> = Vec::new();
    let mut env_dead = PositionSet::empty(positions);
    let mut sys_dead = PositionSet::empty(positions);

    let mut cur = vec![0usize; sizes.len()];
    let mut nxt = vec![0usize; sizes.len()];
    env_off.push(0);
    for v in 0..positions {
        decode_into(&sizes, v, &mut cur);
        if !sys_inv.iter().all(|c| c.eval(&cur, &nxt)) {
            sys_dead.set(v);
        }
        if !env_inv.iter().all(|c| c.eval(&cur, &nxt)) {
            env_dead.set(v);
            env_off.push(env_dat.len() as u32);
            continue;
        }
        let mut moves: Vec<u32> = Vec::new();
        enum_env_moves(&sizes, env_count, 0, &env_by_level, &cur, &mut nxt, &mut moves);
        if moves.is_empty() {
            env_dead.set(v);
            env_off.push(env_dat.len() as u32);
            continue;
        }
        if !sys_dead.get(v) {
            for &x in &moves {
                let mut code = x as usize;
                for i in (0..env_count).rev() {
                    nxt[i] = code % sizes[i];
                    code /= sizes[i];
                }
                // Guarantee conjuncts whose deepest next-atom is an
                // environment variable filter proposals outright.
                if (0..env_count).all(|l| sys_by_level[l].iter().all(|c| c.eval(&cur, &nxt))) {
                    enum_sys_replies(&sizes, env_count, &sys_by_level, &cur, &mut nxt, &mut reply_dat);
                }
                env_dat.push(x);
                reply_off.push(reply_dat.len() as u32);
            }
        } else {
            // Replies are never enumerated from a dead position.
            for &x in &moves {
                env_dat.push(x);
                reply_off.push(reply_dat.len() as u32);
            }
        }
        env_off.push(env_dat.len() as u32);
    }

    Ok(GameStructure {
        spec: spec.clone(),
        decls,
        sizes,
        env_count,
        env_valuations,
        sys_valuations,
        positions,
        env_off,
        env_dat,
        reply_off,
        reply_dat,
        env_dead,
        sys_dead,
        env_goals,
        sys_goals,
        env_init_set,
        sys_init_set,
    })
}

fn enum_env_moves(
    sizes: &[usize],
    env_count: usize,
    level: usize,
    by_level: &[Vec<Cf>],
    cur: &[usize],
    nxt: &mut [usize],
    out: &mut Vec<u32>,
) {
    if level == env_count {
        let mut code = 0usize;
        for (i, &s) in sizes[..env_count].iter().enumerate() {
            code = code * s + nxt[i];
        }
        out.push(code as u32);
        return;
    }
    for k in 0..sizes[level] {
        nxt[level] = k;
        if by_level[level].iter().all(|c| c.eval(cur, nxt)) {
            enum_env_moves(sizes, env_count, level + 1, by_level, cur, nxt, out);
        }
    }
}

fn enum_sys_replies(
    sizes: &[usize],
    env_count: usize,
    by_level: &[Vec<Cf>],
    cur: &[usize],
    nxt: &mut [usize],
    out: &mut Vec<u32>,
) {
    fn go(
        sizes: &[usize],
        var: usize,
        by_level: &[Vec<Cf>],
        cur: &[usize],
        nxt: &mut [usize],
        out: &mut Vec<u32>,
    ) {
        if var == sizes.len() {
            let mut c = 0usize;
            for (i, &s) in sizes.iter().enumerate() {
                c = c * s + nxt[i];
            }
            out.push(c as u32);
            return;
        }
        for k in 0..sizes[var] {
            nxt[var] = k;
            if by_level[var].iter().all(|c| c.eval(cur, nxt)) {
                go(sizes, var + 1, by_level, cur, nxt, out);
            }
        }
    }
    go(sizes, env_count, by_level, cur, nxt, out);
}

struct Ring {
    cumulative: PositionSet,
    x_sets: Vec<PositionSet>,
}

struct GoalLayers {
    rings: Vec<Ring>,
}

fn solve(g: &GameStructure, diag: &mut Diagnostics) -> (PositionSet, Vec<GoalLayers>) {
    let mut z = PositionSet::full(g.positions);
    loop {
        diag.outer_iterations += 1;
        let z_before = z.clone();
        for goal in &g.sys_goals {
            z = mu_y(g, goal, &z, diag).0;
        }
        if z == z_before {
            break;
        }
    }
    // One more pass with Z fixed records the onion rings for extraction.
    let layers = g.sys_goals.iter().map(|goal| mu_y(g, goal, &z, diag).1).collect();
    (z, layers)
}

fn mu_y(
    g: &GameStructure,
    goal: &PositionSet,
    z: &PositionSet,
    diag: &mut Diagnostics,
) -> (PositionSet, GoalLayers) {
    let n = g.positions;
    diag.cpre_calls += 1;
    let cpre_z = g.cpre(z);
    let mut goal_core = PositionSet::empty(n);
    for v in goal.iter_ones() {
        if cpre_z.get(v) {
            goal_core.set(v);
        }
    }
    let mut y = PositionSet::empty(n);
    let mut rings: Vec<Ring> = Vec::new();
    loop {
        diag.cpre_calls += 1;
        let cpre_y = g.cpre(&y);
        let mut start = goal_core.clone();
        start.union_with(&cpre_y);
        let mut y_new = PositionSet::empty(n);
        let mut x_sets = Vec::with_capacity(g.env_goals.len());
        for env_goal in &g.env_goals {
            let mut x = PositionSet::full(n);
            loop {
                diag.cpre_calls += 1;
                let cpre_x = g.cpre(&x);
                let mut x_next = start.clone();
                for v in cpre_x.iter_ones() {
                    if !env_goal.get(v) {
                        x_next.set(v);
                    }
                }
                if x_next == x {
                    break;
                }
                x = x_next;
            }
            y_new.union_with(&x);
            x_sets.push(x);
        }
        if y_new == y {
            break;
        }
        rings.push(Ring { cumulative: y_new.clone(), x_sets });
        y = y_new;
    }
    (y, GoalLayers { rings })
}

/// Realizability: every environment-permitted initial choice of inputs can
/// be answered by a system initial choice inside the winning region.
pub fn check_realizable(g: &GameStructure) -> (bool, PositionSet, Diagnostics) {
    let mut diag = Diagnostics { positions: g.positions, ..Default::default() };
    let (z, _) = solve(g, &mut diag);
    (initial_choices_covered(g, &z), z, diag)
}

fn initial_choices_covered(g: &GameStructure, z: &PositionSet) -> bool {
    let mut any = vec![false; g.env_valuations];
    for v in g.env_init_set.iter_ones() {
        any[v / g.sys_valuations] = true;
    }
    (0..g.env_valuations).all(|x0| {
        if !any[x0] {
            return true;
        }
        let base = x0 * g.sys_valuations;
        (0..g.sys_valuations).any(|y0| {
            let v = base + y0;
            g.env_init_set.get(v) && g.sys_init_set.get(v) && z.get(v)
        })
    })
}

/// Extract a winning strategy as an FDS. States carry a position plus a
/// goal-memory index; for every permitted environment move one reply is
/// chosen, preferring to keep the system block unchanged, then the lowest
/// position code.
pub fn extract_strategy(g: &GameStructure, region: &PositionSet) -> Result<Fds, SynthError> {
    let mut diag = Diagnostics::default();
    let (z, layers) = solve(g, &mut diag);
    if &z != region || !initial_choices_covered(g, &z) {
        return Err(SynthError::Unrealizable);
    }
    build_strategy(g, &z, &layers)
}

fn build_strategy(
    g: &GameStructure,
    z: &PositionSet,
    layers: &[GoalLayers],
) -> Result<Fds, SynthError> {
    let goals = &g.sys_goals;
    let k = goals.len();
    let cpre_z = g.cpre(z);

    let mut initial_positions: Vec<usize> = g
        .env_init_set
        .iter_ones()
        .filter(|&v| g.sys_init_set.get(v) && z.get(v))
        .collect();
    initial_positions.sort_unstable();
    if initial_positions.is_empty() {
        return Err(SynthError::NoInitialState);
    }

    let mut id_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut states: Vec<(usize, usize)> = Vec::new();
    let mut transitions: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    for &p in &initial_positions {
        id_of.entry((p, 0)).or_insert_with(|| {
            states.push((p, 0));
            transitions.push(vec![]);
            queue.push_back((p, 0));
            states.len() - 1
        });
    }

    while let Some((v, j)) = queue.pop_front() {
        let sid = id_of[&(v, j)];
        if g.env_dead.get(v) {
            // The environment has no permitted move here; the play ends.
            transitions[sid] = vec![];
            continue;
        }
        // Target set for the replies from this state, and the next memory.
        let (target, j_next): (&PositionSet, usize) = if goals[j].get(v) && cpre_z.get(v) {
            (z, (j + 1) % k)
        } else {
            let r = layers[j]
                .rings
                .iter()
                .position(|ring| ring.cumulative.get(v))
                .expect("winning position lies in some ring");
            let ring = &layers[j].rings[r];
            let progress = r > 0 && g.in_cpre_of(v, &layers[j].rings[r - 1].cumulative);
            if progress {
                (&layers[j].rings[r - 1].cumulative, j)
            } else {
                let i = (0..g.env_goals.len())
                    .find(|&i| {
                        !g.env_goals[i].get(v)
                            && ring.x_sets[i].get(v)
                            && g.in_cpre_of(v, &ring.x_sets[i])
                    })
                    .expect("ring membership implies an evasion disjunct");
                (&ring.x_sets[i], j)
            }
        };
        let stay_sys = v % g.sys_valuations;
        let mut succs = vec![];
        for e in g.env_entries(v) {
            let replies = g.replies(e);
            let x = g.env_dat[e] as usize;
            let stay = (x * g.sys_valuations + stay_sys) as u32;
            let w = if replies.binary_search(&stay).is_ok() && target.get(stay as usize) {
                Some(stay as usize)
            } else {
                replies.iter().map(|&w| w as usize).find(|&w| target.get(w))
            };
            let Some(w) = w else {
                unreachable!("cpre membership guarantees a reply into the target");
            };
            let key = (w, j_next);
            let wid = *id_of.entry(key).or_insert_with(|| {
                states.push(key);
                transitions.push(vec![]);
                queue.push_back(key);
                states.len() - 1
            });
            succs.push(wid);
        }
        succs.sort_unstable();
        succs.dedup();
        transitions[sid] = succs;
    }

    let initial: Vec<usize> = initial_positions
        .iter()
        .filter_map(|&p| id_of.get(&(p, 0)).copied())
        .collect();
    let m = Fds {
        vars: g.decls.clone(),
        env: (0..g.env_count).collect(),
        sys: (g.env_count..g.decls.len()).collect(),
        states: states.iter().map(|&(p, _)| g.valuation(p)).collect(),
        initial,
        transitions,
    };
    m.validate().expect("extracted strategy is well-formed");
    Ok(m)
}

/// Full pipeline: build the game, decide realizability, extract a strategy.
pub fn synthesize(spec: &Gr1Spec) -> Result<SynthesisResult, SynthError> {
    synthesize_with_cap(spec, DEFAULT_POSITION_CAP)
}

pub fn synthesize_with_cap(spec: &Gr1Spec, cap: usize) -> Result<SynthesisResult, SynthError> {
    let g = build_game(spec, cap)?;
    let mut diag = Diagnostics { positions: g.positions, ..Default::default() };
    let (z, layers) = solve(&g, &mut diag);
    let realizable = initial_choices_covered(&g, &z);
    let strategy = if realizable {
        Some(build_strategy(&g, &z, &layers)?)
    } else {
        None
    };
    Ok(SynthesisResult { realizable, strategy, winning_region: z, diagnostics: diag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse_spec_file;

    pub(crate) const TOY_SPEC: &str = "\
ENV
x : bool
SYS
y1 : bool
y2 : bool
ASSUMPTION LIVE
[]<> x
[]<> !x
GUARANTEE INIT
!y1 & !y2
GUARANTEE TRANS
[](!y1 & X(y1) -> y2)
[](!y2 & X(y2) -> !x)
GUARANTEE LIVE
[](x -> <> y1)
";

    #[test]
    fn toy_spec_game_has_sixteen_positions() {
        let spec = parse_spec_file(TOY_SPEC).unwrap();
        let g = build_game(&spec, DEFAULT_POSITION_CAP).unwrap();
        assert_eq!(g.positions, 16);
    }

    #[test]
    fn toy_spec_is_realizable_with_assumptions() {
        let spec = parse_spec_file(TOY_SPEC).unwrap();
        let res = synthesize(&spec).unwrap();
        assert!(res.realizable);
        let m = res.strategy.unwrap();
        assert!(m.states.len() >= 4 && m.states.len() <= 32, "{} states", m.states.len());
    }

    #[test]
    fn toy_spec_without_assumptions_is_unrealizable() {
        let mut spec = parse_spec_file(TOY_SPEC).unwrap();
        spec.env_live.clear();
        let res = synthesize(&spec).unwrap();
        assert!(!res.realizable);
        assert!(res.strategy.is_none());
    }

    #[test]
    fn closed_system_with_trivial_goal_is_realizable() {
        let spec = parse_spec_file("ENV\nSYS\ny : bool\nGUARANTEE LIVE\n[]<> True\n").unwrap();
        let res = synthesize(&spec).unwrap();
        assert!(res.realizable);
        assert_eq!(res.winning_region.count(), res.diagnostics.positions);
    }

    #[test]
    fn closed_system_single_goal_loops_through_it() {
        let spec =
            parse_spec_file("ENV\nSYS\ny : 0..1\nGUARANTEE LIVE\n[]<> (y = 1)\n").unwrap();
        let res = synthesize(&spec).unwrap();
        assert!(res.realizable);
        let m = res.strategy.unwrap();
        assert!(m.states.len() <= 2, "tiny loop expected, got {}", m.states.len());
        // Its single run visits y=1 over and over.
        let run = crate::fds::execute(&m, &vec![vec![]; 6], None).unwrap();
        assert!(run
            .iter()
            .any(|&q| m.states[q][0] == crate::ltl::Value::Int(1)));
    }

    #[test]
    fn empty_guarantees_are_trivially_realizable() {
        let spec = parse_spec_file("ENV\nx : bool\nSYS\ny : bool\n").unwrap();
        let res = synthesize(&spec).unwrap();
        assert!(res.realizable);
    }

    #[test]
    fn unsatisfiable_sys_init_is_unrealizable() {
        let spec =
            parse_spec_file("ENV\nx : bool\nSYS\ny : bool\nGUARANTEE INIT\ny & !y\n").unwrap();
        let res = synthesize(&spec).unwrap();
        assert!(!res.realizable);
    }

    #[test]
    fn liveness_in_env_trans_is_rejected() {
        let mut spec = parse_spec_file(TOY_SPEC).unwrap();
        spec.env_trans.push(crate::ltl::Formula::var(0).always());
        assert!(build_game(&spec, DEFAULT_POSITION_CAP).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let spec = parse_spec_file(TOY_SPEC).unwrap();
        assert!(matches!(build_game(&spec, 8), Err(SynthError::CapExceeded(..))));
    }

    #[test]
    fn winning_region_is_a_fixed_point() {
        let spec = parse_spec_file(TOY_SPEC).unwrap();
        let g = build_game(&spec, DEFAULT_POSITION_CAP).unwrap();
        let (_, z, _) = check_realizable(&g);
        let mut diag = Diagnostics::default();
        let mut z2 = z.clone();
        for goal in &g.sys_goals {
            z2 = mu_y(&g, goal, &z2, &mut diag).0;
        }
        assert_eq!(z2, z);
    }

    #[test]
    fn deterministic_synthesis() {
        let spec = parse_spec_file(TOY_SPEC).unwrap();
        let a = synthesize(&spec).unwrap();
        let b = synthesize(&spec).unwrap();
        assert_eq!(
            crate::fds::to_json(&a.strategy.unwrap()),
            crate::fds::to_json(&b.strategy.unwrap())
        );
        assert_eq!(a.winning_region, b.winning_region);
    }
}
