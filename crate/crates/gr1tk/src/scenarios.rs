//! Generators for the scenario specifications: four-phase handshake sender
//! and receiver, stationary-search allocator/robot/cell, and the
//! moving-search robot with its communication ring.
//!
//! All generators are pure and deterministic in their parameters. Response
//! properties are emitted pre-translated through their trigger encoding, so
//! every produced spec is within the GR[1] fragment.

use crate::graphs::{find_cycle, topology_to_guarantees, DirectedGraph};
use crate::ltl::{
    translate_response_to_gr1, Formula, Gr1Spec, LtlError, Rel, Value, VarDecl, EPSILON,
};

/// Parameters shared by the search scenarios.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub graph: DirectedGraph,
    /// Number of robots.
    pub robots: usize,
    /// Robots required to rescue a target (stationary search).
    pub alpha: usize,
    /// Covering cycle for the circular searches (moving search).
    pub path: Vec<usize>,
    /// Slide order per vertex: each vertex's out-neighbors, the order in
    /// which a clearing robot takes them.
    pub slide_orders: Vec<Vec<usize>>,
}

impl ScenarioConfig {
    pub fn stationary(graph: DirectedGraph, robots: usize, alpha: usize) -> Self {
        let slide_orders = (0..graph.n).map(|v| graph.out_neighbors(v)).collect();
        let path = find_cycle(&graph, 0);
        ScenarioConfig { graph, robots, alpha, path, slide_orders }
    }

    /// Moving search: the covering cycle starts at vertex zero and slide
    /// orders are ascending destination indices.
    pub fn moving(graph: DirectedGraph, robots: usize) -> Self {
        Self::stationary(graph, robots, 2)
    }

    pub fn max_out_degree(&self) -> usize {
        self.slide_orders.iter().map(|w| w.len()).max().unwrap_or(0)
    }
}

fn eq(var: usize, v: Value) -> Formula {
    Formula::atom(var, Rel::Eq, v)
}

fn eq_i(var: usize, k: i64) -> Formula {
    eq(var, Value::Int(k))
}

fn ne_i(var: usize, k: i64) -> Formula {
    Formula::atom(var, Rel::Ne, Value::Int(k))
}

fn eq_s(var: usize, s: &str) -> Formula {
    eq(var, Value::Sym(s.to_string()))
}

fn ne_s(var: usize, s: &str) -> Formula {
    Formula::atom(var, Rel::Ne, Value::Sym(s.to_string()))
}

// stay / rise / fall over an arbitrary atom.
fn stay(a: Formula) -> Formula {
    a.clone().and(a.next())
}

fn rise(a: Formula) -> Formula {
    a.clone().not().and(a.next())
}

fn fall(a: Formula) -> Formula {
    a.clone().and(a.not().next())
}

/// Four-phase handshake sender: request `r` over `[eps, n)`, trigger input
/// `t`, acknowledgement input `a`. The liveness assumption ("a cleared
/// request is eventually unacknowledged") is encoded as the justice goal
/// `[]<>(r != eps | !a)`, its GR[1] form.
pub fn handshake_sender_spec(n: i64, delta: i64) -> Result<Gr1Spec, LtlError> {
    assert!((0..n).contains(&delta), "delta within [0, n)");
    let env_vars = vec![VarDecl::boolean("t"), VarDecl::boolean("a")];
    let sys_vars = vec![VarDecl::int("r", EPSILON, n - 1)];
    // Indices in env ++ sys.
    let (t, a, r) = (0, 1, 2);
    let mut spec = Gr1Spec::new(env_vars, sys_vars);

    // I as justice; II and III constrain the acknowledgement edges.
    spec.env_live.push(ne_i(r, EPSILON).or(Formula::var(a).not()));
    spec.env_trans.push(rise(Formula::var(a)).implies(ne_i(r, EPSILON)));
    spec.env_trans.push(fall(Formula::var(a)).implies(eq_i(r, EPSILON)));

    // No transmission starts while acknowledged.
    spec.sys_trans.push(
        eq_i(r, EPSILON)
            .and(ne_i(r, EPSILON).next())
            .implies(Formula::var(a).not()),
    );
    // VII: an unacknowledged request holds its value.
    for i in 0..n {
        spec.sys_trans.push(
            Formula::var(a)
                .not()
                .and(eq_i(r, i))
                .implies(eq_i(r, i).next()),
        );
    }
    // VIII: a request may only be reset to eps.
    for i in 0..n {
        spec.sys_trans.push(
            eq_i(r, i)
                .and(ne_i(r, i).next())
                .implies(eq_i(r, EPSILON).next()),
        );
    }
    // IX: acknowledged requests reset.
    spec.sys_trans.push(Formula::var(a).implies(eq_i(r, EPSILON).next()));
    // X: the trigger eventually gets the data onto the request line.
    let block = translate_response_to_gr1(
        &Formula::var(t),
        &eq_i(r, delta),
        "tx",
        spec.num_vars(),
        &spec.all_vars(),
    )?;
    spec.sys_vars.push(block.trigger);
    spec.sys_init = block.init;
    spec.sys_trans.extend(block.trans);
    spec.sys_live.push(block.live);
    spec.validate()?;
    Ok(spec)
}

/// Four-phase handshake receiver: acknowledgement `a` and sink `s`,
/// request input `r`. The liveness assumption IV is encoded as the justice
/// goal `[]<>(!a | r = eps)`.
pub fn handshake_receiver_spec(n: i64, delta: i64) -> Result<Gr1Spec, LtlError> {
    assert!((0..n).contains(&delta), "delta within [0, n)");
    let env_vars = vec![VarDecl::int("r", EPSILON, n - 1)];
    let sys_vars = vec![VarDecl::boolean("a"), VarDecl::int("s", 0, n - 1)];
    let (r, a, s) = (0, 1, 2);
    let mut spec = Gr1Spec::new(env_vars, sys_vars);

    // IV as justice; V and VI constrain the request edges.
    spec.env_live.push(Formula::var(a).not().or(eq_i(r, EPSILON)));
    spec.env_trans.push(
        eq_i(r, EPSILON)
            .and(ne_i(r, EPSILON).next())
            .implies(Formula::var(a).not()),
    );
    spec.env_trans.push(
        ne_i(r, EPSILON)
            .and(eq_i(r, EPSILON).next())
            .implies(Formula::var(a)),
    );

    // XI .. XIV.
    spec.sys_trans.push(ne_i(r, EPSILON).implies(Formula::var(a).next()));
    spec.sys_trans.push(eq_i(r, EPSILON).implies(Formula::var(a).not().next()));
    spec.sys_trans.push(rise(Formula::var(a)).implies(ne_i(r, EPSILON)));
    spec.sys_trans.push(fall(Formula::var(a)).implies(eq_i(r, EPSILON)));
    // XV: requested data eventually lands in the sink.
    let block = translate_response_to_gr1(
        &eq_i(r, delta),
        &eq_i(s, delta),
        "ts",
        spec.num_vars(),
        &spec.all_vars(),
    )?;
    spec.sys_vars.push(block.trigger);
    spec.sys_init = block.init;
    spec.sys_trans.extend(block.trans);
    spec.sys_live.push(block.live);
    spec.validate()?;
    Ok(spec)
}

/// The allocator: offered robot index `R`, offered flag index `F`, dequeue
/// acknowledgement input; dequeue request, dispatch counter and dispatch
/// signal outputs. The dispatch signal carries vertex indices.
pub fn stationary_allocator_spec(cfg: &ScenarioConfig) -> Result<Gr1Spec, LtlError> {
    let n = cfg.graph.n as i64;
    let m = cfg.robots as i64;
    let alpha = cfg.alpha as i64;
    assert!(m >= alpha, "need at least alpha robots");
    let env_vars = vec![
        VarDecl::int("R", EPSILON, m - 1),
        VarDecl::int("F", EPSILON, n - 1),
        VarDecl::boolean("DEQf_ACK"),
    ];
    let sys_vars = vec![
        VarDecl::boolean("DEQf"),
        VarDecl::int("c", 0, alpha),
        VarDecl::int("D", EPSILON, n - 1),
    ];
    let (rr, ff, ack, deq, c, d) = (0, 1, 2, 3, 4, 5);
    let mut spec = Gr1Spec::new(env_vars, sys_vars);

    // Assumptions A1 .. A4.
    spec.env_init = eq_i(rr, EPSILON).and(Formula::var(ack).not());
    for j in 0..m {
        spec.env_trans.push(fall(eq_i(rr, j)).implies(ne_i(d, EPSILON)));
    }
    for i in 0..n {
        spec.env_trans
            .push(fall(eq_i(ff, i)).implies(Formula::var(deq).or(ne_i(d, EPSILON))));
    }
    spec.env_trans.push(fall(Formula::var(ack)).implies(Formula::var(deq).not()));

    // Guarantees A1 .. A15.
    spec.sys_init = Formula::var(deq).not().and(eq_i(c, 0)).and(eq_i(d, EPSILON));
    for j in 0..m {
        for i in 0..n {
            spec.sys_trans
                .push(eq_i(d, i).and(stay(eq_i(rr, j))).implies(eq_i(d, i).next()));
        }
    }
    for j in 0..m {
        for i in 0..n {
            spec.sys_trans
                .push(eq_i(d, i).and(fall(eq_i(rr, j))).implies(eq_i(d, EPSILON).next()));
        }
    }
    for gamma in 0..alpha {
        for i in 0..n {
            spec.sys_trans.push(
                eq_i(ff, i)
                    .and(eq_i(d, EPSILON))
                    .and(eq_i(c, gamma))
                    .and(ne_i(rr, EPSILON))
                    .implies(eq_i(d, i).and(eq_i(c, gamma + 1)).next()),
            );
        }
    }
    for i in 0..n {
        spec.sys_trans.push(
            eq_i(d, EPSILON).and(eq_i(d, i).next()).implies(
                Formula::atom(c, Rel::Lt, Value::Int(alpha))
                    .and(ne_i(rr, EPSILON))
                    .and(eq_i(ff, i)),
            ),
        );
    }
    for i in 0..n {
        spec.sys_trans.push(fall(eq_i(d, i)).implies(eq_i(d, EPSILON).next()));
    }
    for i in 0..n {
        spec.sys_trans.push(rise(eq_i(d, i)).implies(eq_i(d, EPSILON)));
    }
    // A8: counter increments only on a dispatch edge.
    let increments =
        Formula::or_all((0..alpha).map(|g| eq_i(c, g).and(eq_i(c, g + 1).next())));
    let dispatches = Formula::or_all(
        (0..n).map(|i| eq_i(d, EPSILON).and(eq_i(d, i).next())),
    );
    spec.sys_trans.push(increments.implies(dispatches));
    // A9: stay, increment by one, or reset from saturation; everything else
    // is forbidden. The modulus runs over the alpha+1 counter values.
    for g1 in 0..=alpha {
        for g2 in 0..=alpha {
            let step = (g2 - g1).rem_euclid(alpha + 1);
            if step > 1 {
                spec.sys_trans
                    .push(eq_i(c, g1).and(eq_i(c, g2).next()).implies(Formula::false_()));
            }
        }
    }
    for g in 0..=alpha {
        spec.sys_trans
            .push(eq_i(c, g).and(stay(eq_i(d, EPSILON))).implies(eq_i(c, g).next()));
    }
    // A11/A12: the counter resets exactly on a rising acknowledgement edge.
    spec.sys_trans.push(
        eq_i(c, alpha)
            .and(eq_i(c, 0).next())
            .implies(rise(Formula::var(ack))),
    );
    spec.sys_trans.push(
        eq_i(c, alpha)
            .and(rise(Formula::var(ack)))
            .implies(eq_i(c, 0).next()),
    );
    // A13 .. A15: four-phase dequeue cycle.
    spec.sys_trans.push(
        eq_i(c, alpha)
            .and(Formula::var(ack).not())
            .and(Formula::var(deq).not())
            .implies(Formula::var(deq).next()),
    );
    spec.sys_trans
        .push(rise(Formula::var(deq)).implies(Formula::var(ack).not().next()));
    spec.sys_trans.push(fall(Formula::var(deq)).implies(Formula::var(ack)));
    spec.validate()?;
    Ok(spec)
}

/// One stationary-search robot: dispatch input `d_j`, flag sensor input,
/// ready/engaged outputs, destination store and position, plus the
/// topology guarantees and the reach-the-destination response.
pub fn stationary_robot_spec(cfg: &ScenarioConfig, j: usize) -> Result<Gr1Spec, LtlError> {
    let n = cfg.graph.n as i64;
    let env_vars = vec![
        VarDecl::int(format!("d_{j}"), EPSILON, n - 1),
        VarDecl::boolean(format!("flag_{j}")),
    ];
    let sys_vars = vec![
        VarDecl::boolean(format!("r_{j}")),
        VarDecl::boolean(format!("e_{j}")),
        VarDecl::int(format!("store_{j}"), EPSILON, n - 1),
        VarDecl::int(format!("cellID_{j}"), 0, n - 1),
    ];
    let (d, flag, r, e, store, cell) = (0, 1, 2, 3, 4, 5);
    let mut spec = Gr1Spec::new(env_vars, sys_vars);

    // Assumptions R1 .. R3.
    spec.env_init = eq_i(d, EPSILON);
    spec.env_trans.push(rise_from_eps(d).implies(Formula::var(r)));
    for i in 0..n {
        spec.env_trans.push(fall(eq_i(d, i)).implies(Formula::var(r).not()));
    }

    // Guarantees R1 .. R11.
    spec.sys_init = Formula::var(e)
        .not()
        .and(Formula::var(r).not())
        .and(eq_i(store, EPSILON));
    spec.sys_trans.push(
        Formula::var(r)
            .not()
            .and(eq_i(store, EPSILON))
            .implies(Formula::var(r).next()),
    );
    for i in 0..n {
        spec.sys_trans.push(
            eq_i(store, EPSILON)
                .and(eq_i(d, i))
                .and(Formula::var(r))
                .implies(eq_i(store, i).next()),
        );
    }
    for i in 0..n {
        spec.sys_trans.push(
            eq_i(store, EPSILON).and(eq_i(store, i).next()).implies(
                Formula::var(r)
                    .and(eq_i(d, i))
                    .and(Formula::var(r).not().next()),
            ),
        );
    }
    for i in 0..n {
        spec.sys_trans.push(fall(eq_i(store, i)).implies(
            Formula::var(flag)
                .not()
                .and(eq_i(cell, i))
                .and(eq_i(store, EPSILON).and(Formula::var(r)).next()),
        ));
    }
    // R6: a stored destination is eventually reached.
    let at_store = Formula::or_all((0..n).map(|i| eq_i(cell, i).and(eq_i(store, i))));
    let block = translate_response_to_gr1(
        &ne_i(store, EPSILON),
        &at_store,
        &format!("treach_{j}"),
        spec.num_vars(),
        &spec.all_vars(),
    )?;
    spec.sys_vars.push(block.trigger);
    spec.sys_init = spec.sys_init.and(block.init);
    spec.sys_trans.extend(block.trans);
    spec.sys_live.push(block.live);

    for i in 0..n {
        spec.sys_trans.push(
            eq_i(store, i)
                .and(eq_i(cell, i))
                .and(Formula::var(flag))
                .implies(Formula::var(e)),
        );
    }
    for i in 0..n {
        spec.sys_trans.push(
            eq_i(store, i)
                .and(eq_i(cell, i))
                .and(Formula::var(flag).not())
                .implies(
                    Formula::var(r)
                        .and(eq_i(store, EPSILON))
                        .and(Formula::var(e).not())
                        .next(),
                ),
        );
    }
    let at_store2 = Formula::or_all((0..n).map(|i| eq_i(cell, i).and(eq_i(store, i))));
    spec.sys_trans.push(
        rise(Formula::var(e)).implies(at_store2.next().and(Formula::var(flag).next())),
    );
    let store_falls = Formula::or_all((0..n).map(|i| fall(eq_i(store, i))));
    spec.sys_trans.push(fall(Formula::var(e)).implies(store_falls));
    for i in 0..n {
        spec.sys_trans.push(
            stay(Formula::var(e)).implies(eq_i(cell, i).iff(eq_i(cell, i).next())),
        );
    }
    spec.sys_trans.extend(topology_to_guarantees(&cfg.graph, cell));
    spec.validate()?;
    Ok(spec)
}

// clear(d = eps): the dispatch input rises from eps to a vertex.
fn rise_from_eps(var: usize) -> Formula {
    eq_i(var, EPSILON).and(ne_i(var, EPSILON).next())
}

/// One cell: engagement-count input, flag output. The flag may only fall
/// when enough robots are engaged, is always eventually raised, and the
/// engagement count may not drop while the flag stands.
pub fn cell_spec(cfg: &ScenarioConfig, i: usize) -> Result<Gr1Spec, LtlError> {
    let m = cfg.robots as i64;
    let alpha = cfg.alpha as i64;
    let env_vars = vec![VarDecl::int(format!("E_{i}"), 0, m)];
    let sys_vars = vec![VarDecl::boolean(format!("f_{i}"))];
    let (e, f) = (0, 1);
    let mut spec = Gr1Spec::new(env_vars, sys_vars);
    for g in 0..m {
        spec.env_trans.push(
            Formula::var(f)
                .and(eq_i(e, g))
                .implies(Formula::atom(e, Rel::Ge, Value::Int(g)).next()),
        );
    }
    spec.sys_trans.push(
        fall(Formula::var(f)).implies(Formula::atom(e, Rel::Ge, Value::Int(alpha))),
    );
    spec.sys_live.push(Formula::var(f));
    spec.validate()?;
    Ok(spec)
}

/// One moving-search robot. Commands arrive on `Cin` from the master and
/// leave on `Cout` to the slave, acknowledged over `ackin`/`ackout`; `cst`
/// reports the state of the current vertex. Robot zero starts searching,
/// every other robot starts guarding.
pub fn moving_robot_spec(cfg: &ScenarioConfig, j: usize) -> Result<Gr1Spec, LtlError> {
    let n = cfg.graph.n as i64;
    let p = &cfg.path;
    let plen = p.len() as i64;
    let gmax = cfg.max_out_degree() as i64;
    let gbar = |i: usize| cfg.slide_orders[i].len() as i64;
    let w = |i: usize, g: usize| cfg.slide_orders[i][g] as i64;
    // First occurrence of each vertex on the covering path.
    let gamma_of = |i: usize| p.iter().position(|&v| v == i).expect("path covers vertex") as i64;
    let nextval = |g: i64| (g + 1 + plen).rem_euclid(plen);
    let prevval = |g: i64| (g + plen - 1).rem_euclid(plen);

    let env_vars = vec![
        VarDecl::int(format!("Cin_{j}"), EPSILON, n - 1),
        VarDecl::boolean(format!("ackin_{j}")),
        VarDecl::enumeration(format!("cst_{j}"), &["cl", "pc", "cr", "sv"]),
    ];
    let sys_vars = vec![
        VarDecl::enumeration(format!("M_{j}"), &["gu", "cs", "sp", "sl"]),
        VarDecl::int(format!("store_{j}"), EPSILON, n - 1),
        VarDecl::int(format!("cellID_{j}"), 0, n - 1),
        VarDecl::int(format!("c_{j}"), EPSILON, gmax),
        VarDecl::int(format!("cnt_{j}"), 0, plen - 1),
        VarDecl::int(format!("mcnt_{j}"), 0, plen - 1),
        VarDecl::boolean(format!("ackout_{j}")),
        VarDecl::int(format!("Cout_{j}"), EPSILON, n - 1),
    ];
    let (cin, ackin, cst) = (0, 1, 2);
    let (md, store, cell, c, cnt, mcnt, ackout, cout) = (3, 4, 5, 6, 7, 8, 9, 10);
    let mut spec = Gr1Spec::new(env_vars, sys_vars);

    let in_search = || eq_s(md, "cs").or(eq_s(md, "sp"));

    // Assumptions: the handshake edges (master and slave side) and the
    // vertex-state pinning outside the searching modes.
    spec.env_init = eq_i(cin, EPSILON).and(Formula::var(ackin).not());
    spec.env_trans.push(rise(Formula::var(ackin)).implies(ne_i(cout, EPSILON)));
    spec.env_trans.push(fall(Formula::var(ackin)).implies(eq_i(cout, EPSILON)));
    spec.env_trans
        .push(ne_i(cin, EPSILON).and(eq_i(cin, EPSILON).next()).implies(Formula::var(ackout)));
    spec.env_trans.push(
        eq_i(cin, EPSILON)
            .and(ne_i(cin, EPSILON).next())
            .implies(Formula::var(ackout).not()),
    );
    spec.env_trans
        .push(in_search().not().implies(eq_s(cst, "cr").next()));
    spec.env_trans
        .push(stay(in_search().not()).implies(eq_s(cst, "cr").next()));

    // Initial condition: one searcher, the rest guards, quiet wires. The
    // searcher begins its lap at its start cell; the guards' counters sit
    // at zero, where the frame rules pin them anyway.
    let init_mode = if j == 0 { eq_s(md, "cs") } else { eq_s(md, "gu") };
    spec.sys_init = init_mode
        .and(eq_i(cout, EPSILON))
        .and(Formula::var(ackout).not())
        .and(eq_i(store, EPSILON))
        .and(eq_i(c, EPSILON))
        .and(if j == 0 {
            // Counters as if the search had just been entered at the cell.
            Formula::or_all((0..cfg.graph.n).map(|i| {
                eq_i(cell, i as i64)
                    .and(eq_i(cnt, gamma_of(i)))
                    .and(eq_i(mcnt, prevval(gamma_of(i))))
            }))
        } else {
            eq_i(cnt, 0).and(eq_i(mcnt, 0))
        });

    // M1/M2: guarding holds position until commanded, then hands over to
    // the clearing mode.
    for i in 0..n {
        spec.sys_trans.push(
            eq_s(md, "gu")
                .and(eq_i(cin, EPSILON))
                .and(eq_i(cell, i))
                .implies(eq_i(cell, i).and(eq_s(md, "gu")).next()),
        );
    }
    for i in 0..n {
        spec.sys_trans.push(
            eq_s(md, "gu").and(eq_i(cin, i)).implies(
                eq_s(md, "sl")
                    .and(eq_i(store, i))
                    .and(eq_i(c, EPSILON))
                    .next(),
            ),
        );
    }
    // M3: entering guard mode on a found start vertex calls the slave
    // there; a dormant entry (lap exhausted) leaves the command line idle.
    for i in 0..n {
        spec.sys_trans.push(
            eq_s(md, "cs")
                .and(eq_s(md, "gu").next())
                .and(eq_i(cell, i).next())
                .and(eq_s(cst, "sv").next())
                .implies(eq_i(cout, i).next()),
        );
    }
    // M4: entering a searching mode initializes the lap counters at the
    // current cell's first path position.
    for i in 0..cfg.graph.n {
        spec.sys_trans.push(
            eq_i(cell, i as i64)
                .and(rise(eq_s(md, "cs")).or(rise(eq_s(md, "sp"))))
                .implies(
                    eq_i(cnt, gamma_of(i))
                        .and(eq_i(mcnt, prevval(gamma_of(i))))
                        .and(eq_i(cell, i as i64))
                        .next(),
                ),
        );
    }
    // M5: the lap advances along the path while nothing is found.
    for g in 0..plen {
        let here = eq_i(cell, p[g as usize] as i64).and(eq_i(cnt, g)).and(ne_i(mcnt, g));
        let searching = eq_s(md, "cs")
            .and(ne_s(cst, "sv").next())
            .or(eq_s(md, "sp").and(ne_s(cst, "pc").next()));
        spec.sys_trans.push(here.and(searching).implies(
            eq_i(cnt, nextval(g))
                .and(eq_i(cell, p[nextval(g) as usize] as i64))
                .next(),
        ));
    }
    // M6/M7: found vertices switch the mode.
    for i in 0..n {
        spec.sys_trans.push(
            eq_s(md, "cs")
                .and(eq_s(cst, "sv").next())
                .and(eq_i(cell, i))
                .implies(eq_s(md, "gu").and(eq_i(c, EPSILON)).and(eq_i(cell, i)).next()),
        );
    }
    for i in 0..n {
        spec.sys_trans.push(
            eq_s(md, "sp")
                .and(eq_s(cst, "pc").next())
                .and(eq_i(cell, i))
                .implies(
                    eq_s(md, "sl")
                        .and(eq_i(c, EPSILON))
                        .and(eq_i(store, i))
                        .and(eq_i(cell, i))
                        .next(),
                ),
        );
    }
    // M8/M9: lap exhaustion falls back to the next coarser mode.
    for g in 0..plen {
        spec.sys_trans.push(
            eq_s(md, "sp")
                .and(eq_i(cnt, g))
                .and(eq_i(mcnt, g))
                .and(ne_s(cst, "pc").next())
                .implies(eq_s(md, "cs").next()),
        );
    }
    for g in 0..plen {
        spec.sys_trans.push(
            eq_s(md, "cs")
                .and(eq_i(cnt, g))
                .and(eq_i(mcnt, g))
                .and(ne_s(cst, "sv").next())
                .implies(eq_s(md, "gu").next()),
        );
    }
    // M10/M11/M12: counter frame rules.
    let staying = stay(eq_s(md, "cs")).or(stay(eq_s(md, "sp")));
    spec.sys_trans.push(staying.clone().implies(Formula::or_all(
        (0..plen).map(|g| eq_i(cnt, g).and(eq_i(cnt, nextval(g)).next())),
    )));
    spec.sys_trans.push(staying.implies(Formula::or_all(
        (0..plen).map(|g| eq_i(mcnt, g).and(eq_i(mcnt, g).next())),
    )));
    spec.sys_trans.push(
        in_search()
            .not()
            .implies(eq_i(cnt, 0).and(eq_i(mcnt, 0))),
    );
    // M13/M14: a searching mode is left only when the lap is complete or a
    // matching vertex has been found.
    let lap_done = Formula::or_all((0..plen).map(|g| eq_i(cnt, g).and(eq_i(mcnt, g))));
    spec.sys_trans.push(
        fall(eq_s(md, "cs")).implies(lap_done.clone().or(eq_s(cst, "sv").next())),
    );
    spec.sys_trans.push(
        fall(eq_s(md, "sp")).implies(lap_done.or(eq_s(cst, "pc").next())),
    );
    // M15/M16/M17/M18: store discipline around the clearing mode. The exit
    // happens back at the stored vertex once the counter saturates.
    for i in 0..n {
        spec.sys_trans.push(
            eq_i(store, EPSILON).and(eq_i(store, i).next()).implies(
                eq_i(cin, i)
                    .and(eq_s(md, "gu"))
                    .or(eq_s(md, "sp").and(eq_s(cst, "pc").next()).and(eq_i(cell, i))),
            ),
        );
    }
    spec.sys_trans.push(
        fall(eq_i(store, EPSILON)).implies(
            eq_i(c, EPSILON)
                .next()
                .and(eq_s(md, "gu"))
                .and(eq_s(md, "sl").next())
                .or(eq_s(md, "sp")
                    .and(eq_s(cst, "pc").next())
                    .and(eq_s(md, "sl").next())),
        ),
    );
    for i in 0..cfg.graph.n {
        spec.sys_trans.push(fall(eq_i(store, i as i64)).implies(
            eq_i(store, EPSILON)
                .next()
                .and(eq_i(c, gbar(i)))
                .and(eq_i(c, EPSILON).next()),
        ));
    }
    for i in 0..cfg.graph.n {
        spec.sys_trans.push(
            eq_i(store, i as i64)
                .and(eq_i(c, gbar(i)))
                .and(eq_i(cell, i as i64))
                .implies(
                    eq_i(store, EPSILON)
                        .and(eq_i(c, EPSILON))
                        .and(eq_s(md, "sp"))
                        .next(),
                ),
        );
    }
    // M19/M20/M21: travel to the stored vertex, then slide its out-edges in
    // the fixed order, counting up.
    for i in 0..n {
        spec.sys_trans.push(
            eq_i(store, i)
                .and(eq_i(c, EPSILON))
                .and(eq_i(cell, i).not())
                .implies(eq_i(c, EPSILON).next()),
        );
    }
    for i in 0..n {
        spec.sys_trans.push(
            eq_i(store, i)
                .and(eq_i(c, EPSILON))
                .and(eq_i(cell, i))
                .implies(eq_i(c, 0).and(eq_i(cell, i)).next()),
        );
    }
    for i in 0..cfg.graph.n {
        for g in 0..gbar(i) {
            spec.sys_trans.push(
                eq_i(store, i as i64)
                    .and(eq_i(c, g))
                    .and(eq_i(cell, i as i64))
                    .implies(
                        eq_i(cell, w(i, g as usize))
                            .and(eq_i(c, g + 1))
                            .next(),
                    ),
            );
        }
    }
    // M22: the merged response, one trigger for both "go to the stored
    // vertex" and "return after a slide".
    let homeward = ne_i(store, EPSILON).and(eq_i(c, EPSILON));
    let after_slide = Formula::or_all((0..cfg.graph.n).map(|i| {
        eq_i(store, i as i64).and(Formula::or_all(
            (0..gbar(i)).map(|g| eq_i(c, g + 1).and(eq_i(cell, w(i, g as usize)))),
        ))
    }));
    let at_store = Formula::or_all(
        (0..cfg.graph.n).map(|i| eq_i(store, i as i64).and(eq_i(cell, i as i64))),
    );
    let block = translate_response_to_gr1(
        &homeward.or(after_slide),
        &at_store,
        &format!("tret_{j}"),
        spec.num_vars(),
        &spec.all_vars(),
    )?;
    spec.sys_vars.push(block.trigger);
    spec.sys_init = spec.sys_init.clone().and(block.init);
    spec.sys_trans.extend(block.trans);
    spec.sys_live.push(block.live);
    // M23/M24/M25: counter bookkeeping in the clearing mode.
    for g in 0..gmax {
        let witnesses = Formula::or_all((0..cfg.graph.n).filter(|&i| g < gbar(i)).map(|i| {
            eq_i(store, i as i64)
                .and(eq_i(cell, i as i64))
                .and(eq_i(cell, w(i, g as usize)).next())
        }));
        spec.sys_trans
            .push(eq_i(c, g).and(eq_i(c, g + 1).next()).implies(witnesses));
    }
    for i in 0..cfg.graph.n {
        let allowed = Formula::or_all((-1..=gbar(i)).flat_map(|g1| {
            (-1..=gbar(i)).filter_map(move |g2| {
                let ok = g2 == g1 + 1 || (g1 == gbar(i) && g2 == EPSILON) || g1 == g2;
                ok.then(|| eq_i(c, g1).and(eq_i(c, g2).next()))
            })
        }));
        spec.sys_trans.push(eq_i(store, i as i64).implies(allowed));
    }
    let reset_witness = Formula::or_all(
        (0..cfg.graph.n).map(|i| eq_i(store, i as i64).and(eq_i(c, gbar(i)))),
    );
    spec.sys_trans
        .push(ne_i(c, EPSILON).and(eq_i(c, EPSILON).next()).implies(reset_witness));
    // M26/M27: the clearing registers are idle outside the mode, and the
    // mode is held until the stored vertex is fully slid.
    spec.sys_trans.push(
        ne_s(md, "sl").implies(eq_i(c, EPSILON).and(eq_i(store, EPSILON))),
    );
    let unfinished = Formula::and_all(
        (0..cfg.graph.n).map(|i| ne_i(store, i as i64).or(eq_i(c, gbar(i)))),
    );
    spec.sys_trans.push(
        eq_s(md, "sl")
            .and(unfinished.not())
            .implies(eq_s(md, "sl").next()),
    );
    // M28/M29/M30: the master-side handshake guarantees.
    spec.sys_trans.push(
        eq_s(md, "gu")
            .and(eq_i(cout, EPSILON))
            .and(ne_i(cout, EPSILON).next())
            .implies(Formula::var(ackin).not()),
    );
    spec.sys_trans.push(
        eq_s(md, "gu")
            .and(ne_i(cout, EPSILON))
            .and(eq_i(cout, EPSILON).next())
            .implies(Formula::var(ackin)),
    );
    spec.sys_trans.push(
        eq_s(md, "gu")
            .and(Formula::var(ackin))
            .implies(eq_i(cout, EPSILON).next()),
    );
    // M31 .. M34: the slave-side handshake guarantees.
    spec.sys_trans.push(ne_i(cin, EPSILON).implies(Formula::var(ackout).next()));
    spec.sys_trans.push(eq_i(cin, EPSILON).implies(Formula::var(ackout).not().next()));
    spec.sys_trans.push(rise(Formula::var(ackout)).implies(ne_i(cin, EPSILON)));
    spec.sys_trans.push(fall(Formula::var(ackout)).implies(eq_i(cin, EPSILON)));
    // Topology.
    spec.sys_trans.extend(topology_to_guarantees(&cfg.graph, cell));
    spec.validate()?;
    Ok(spec)
}
