//! Command-line front end. Exit codes: 0 success / realizable / satisfied /
//! cleared, 1 unrealizable / violated / uncleared, 2 usage or input errors.

use crate::check::{check_gr1, check_invariant, check_response, Verdict};
use crate::compose::compose;
use crate::fds;
use crate::graphs;
use crate::ltl::{parse_formula, parse_spec_file, write_spec_file, Value};
use crate::pursuit;
use crate::scenarios::{self, ScenarioConfig};
use crate::sim::{self, Component, FlagEvent, GlobalStorage, SimConfig, StopWhen};
use crate::synth;
use clap::{Args, Parser, Subcommand};
use std::fs;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "gr1tk", version, about = "GR[1] synthesis, composition and graph-search simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a controller from a spec file.
    Synth {
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Position-space cap for the game arena.
        #[arg(long, default_value_t = synth::DEFAULT_POSITION_CAP)]
        cap: usize,
        /// Print solver statistics as JSON.
        #[arg(long)]
        stats: bool,
        #[arg(long)]
        json: bool,
    },
    /// Model-check an FDS against a spec file or a propositional invariant.
    Check {
        model: PathBuf,
        spec: Option<PathBuf>,
        #[arg(long)]
        invariant: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Asynchronously compose two FDS files.
    Compose {
        left: PathBuf,
        right: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = crate::compose::DEFAULT_COMPOSE_CAP)]
        cap: usize,
        /// Check a response property `p => q` on the composite:
        /// two formulas separated by `=>`.
        #[arg(long)]
        response: Option<String>,
    },
    /// Emit a scenario specification.
    Scenario {
        #[command(subcommand)]
        action: ScenarioCmd,
    },
    /// Topology utilities.
    Graph {
        #[command(subcommand)]
        action: GraphCmd,
    },
    /// Closed-loop simulations.
    Simulate {
        #[command(subcommand)]
        action: SimulateCmd,
    },
}

#[derive(Subcommand)]
enum ScenarioCmd {
    /// Write a scenario spec file.
    Emit(EmitArgs),
}

#[derive(Args)]
struct EmitArgs {
    /// One of sender, receiver, allocator, robot, cell, mover.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Data range for the handshake.
    #[arg(long, default_value_t = 2)]
    n: i64,
    /// Transmitted constant for the handshake.
    #[arg(long, default_value_t = 1)]
    delta: i64,
    #[arg(long, default_value_t = 2)]
    robots: usize,
    #[arg(long, default_value_t = 2)]
    alpha: usize,
    /// Robot or cell index.
    #[arg(long, default_value_t = 0)]
    index: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Generate a random strongly connected graph.
    Gen {
        #[arg(long)]
        n: usize,
        /// Edge probability; defaults to 2/(n-1).
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        dot: bool,
    },
    /// Brute-force cop number of a graph file.
    Copnumber {
        graph: PathBuf,
        #[arg(long, default_value_t = 10)]
        max_k: usize,
    },
    /// Robots demanded by the deterministic heuristics run.
    Heuristics {
        graph: PathBuf,
        #[arg(long)]
        enable_h7: bool,
    },
    /// Count heuristics counterexamples over random graphs (CSV row).
    Survey {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum SimulateCmd {
    /// Synthesize sender and receiver, then run the handshake loop.
    Handshake {
        #[arg(long, default_value_t = 2)]
        n: i64,
        #[arg(long, default_value_t = 1)]
        delta: i64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        max_steps: usize,
    },
    /// Stationary search: allocator, robots and scripted flags.
    Stationary {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 2)]
        robots: usize,
        #[arg(long, default_value_t = 2)]
        alpha: usize,
        /// JSON flag schedule [{"step":..,"cell":..,"value":..}, ..].
        #[arg(long)]
        flags: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 4000)]
        max_steps: usize,
    },
    /// Moving search: the robot ring over the global storage.
    Moving {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 3)]
        robots: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 10000)]
        max_steps: usize,
        /// Write numbered DOT snapshots every k steps into this directory.
        #[arg(long)]
        snapshot_every: Option<usize>,
        #[arg(long)]
        snapshot_dir: Option<PathBuf>,
    },
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through this path with success.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn read(path: &PathBuf) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_out(path: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Synth { spec, output, cap, stats, json } => {
            let text = read(&spec)?;
            let parsed = parse_spec_file(&text).map_err(|e| e.to_string())?;
            let res = synth::synthesize_with_cap(&parsed, cap).map_err(|e| e.to_string())?;
            if stats {
                eprintln!("{}", serde_json::to_string(&res.diagnostics).unwrap());
            }
            if res.realizable {
                let m = res.strategy.expect("strategy accompanies realizability");
                if json {
                    println!(
                        "{{\"realizable\":true,\"states\":{},\"positions\":{}}}",
                        m.states.len(),
                        res.diagnostics.positions
                    );
                } else {
                    println!("realizable: {} states", m.states.len());
                }
                write_out(&output.map(Some).unwrap_or(None), &fds::to_json(&m))?;
                Ok(0)
            } else {
                if json {
                    println!("{{\"realizable\":false}}");
                } else {
                    println!("unrealizable");
                }
                Ok(1)
            }
        }
        Command::Check { model, spec, invariant, json } => {
            let m = fds::from_json(&read(&model)?).map_err(|e| e.to_string())?;
            let result = if let Some(text) = invariant {
                let p = parse_formula(&text, &m.vars).map_err(|e| e.to_string())?;
                check_invariant(&m, &p)
            } else {
                let spec_path = spec.ok_or("check needs a spec file or --invariant")?;
                let parsed = parse_spec_file(&read(&spec_path)?).map_err(|e| e.to_string())?;
                check_gr1(&m, &parsed).map_err(|e| e.to_string())?
            };
            match &result.verdict {
                Verdict::Satisfied => {
                    if json {
                        println!("{{\"verdict\":\"satisfied\"}}");
                    } else {
                        println!("satisfied ({} states explored)", result.states_explored);
                    }
                    Ok(0)
                }
                Verdict::ViolatedSafety { step, conjunct, run } => {
                    if json {
                        println!(
                            "{{\"verdict\":\"violated\",\"kind\":\"safety\",\"step\":{step},\"conjunct\":\"{conjunct}\",\"run\":{run:?}}}"
                        );
                    } else {
                        println!("violated ({conjunct} at step {step}); counterexample {run:?}");
                    }
                    Ok(1)
                }
                Verdict::ViolatedLiveness { unmet, .. } => {
                    if json {
                        println!("{{\"verdict\":\"violated\",\"kind\":\"liveness\",\"goal\":\"{unmet}\"}}");
                    } else {
                        println!("violated ({unmet}): fair cycle found");
                    }
                    Ok(1)
                }
            }
        }
        Command::Compose { left, right, output, cap, response } => {
            let a = fds::from_json(&read(&left)?).map_err(|e| e.to_string())?;
            let b = fds::from_json(&read(&right)?).map_err(|e| e.to_string())?;
            let c = compose(&a, &b, cap).map_err(|e| e.to_string())?;
            println!("composite: {} states", c.fds.states.len());
            if let Some(resp) = response {
                let (p, q) = resp
                    .split_once("=>")
                    .ok_or("response takes `p => q`")?;
                let pf = parse_formula(p.trim(), &c.fds.vars).map_err(|e| e.to_string())?;
                let qf = parse_formula(q.trim(), &c.fds.vars).map_err(|e| e.to_string())?;
                let res = check_response(&c.fds, &pf, &qf);
                if !res.satisfied() {
                    println!("response violated");
                    return Ok(1);
                }
                println!("response satisfied");
            }
            if output.is_some() {
                write_out(&output, &fds::to_json(&c.fds))?;
            }
            Ok(0)
        }
        Command::Scenario { action: ScenarioCmd::Emit(args) } => {
            let cfg = || -> Result<ScenarioConfig, String> {
                let path = args.graph.as_ref().ok_or("this kind needs --graph")?;
                let g = graphs::from_json(&read(path)?).map_err(|e| e.to_string())?;
                Ok(ScenarioConfig::stationary(g, args.robots, args.alpha))
            };
            let spec = match args.kind.as_str() {
                "sender" => scenarios::handshake_sender_spec(args.n, args.delta),
                "receiver" => scenarios::handshake_receiver_spec(args.n, args.delta),
                "allocator" => scenarios::stationary_allocator_spec(&cfg()?),
                "robot" => scenarios::stationary_robot_spec(&cfg()?, args.index),
                "cell" => scenarios::cell_spec(&cfg()?, args.index),
                "mover" => scenarios::moving_robot_spec(&cfg()?, args.index),
                other => return Err(format!("unknown scenario kind `{other}`")),
            }
            .map_err(|e| e.to_string())?;
            write_out(&args.output, &write_spec_file(&spec))?;
            Ok(0)
        }
        Command::Graph { action } => match action {
            GraphCmd::Gen { n, p, seed, output, dot } => {
                let p = p.unwrap_or(2.0 / (n as f64 - 1.0));
                let g = graphs::generate_random_scc(n, p, seed).map_err(|e| e.to_string())?;
                let content = if dot { graphs::to_dot(&g) } else { graphs::to_json(&g) };
                write_out(&output, &content)?;
                Ok(0)
            }
            GraphCmd::Copnumber { graph, max_k } => {
                let g = graphs::from_json(&read(&graph)?).map_err(|e| e.to_string())?;
                match pursuit::cop_number_bruteforce(&g, max_k) {
                    Ok(k) => {
                        println!("{k}");
                        Ok(0)
                    }
                    Err(_) => {
                        println!(">{max_k}");
                        Ok(1)
                    }
                }
            }
            GraphCmd::Heuristics { graph, enable_h7 } => {
                let g = graphs::from_json(&read(&graph)?).map_err(|e| e.to_string())?;
                let run = pursuit::heuristics_run(&g, enable_h7);
                if run.cleared {
                    println!("{}", run.robots);
                    Ok(0)
                } else {
                    println!("uncleared");
                    Ok(1)
                }
            }
            GraphCmd::Survey { n, samples, seed } => {
                let count = pursuit::survey(n, samples, seed);
                println!("{n},{samples},{count},{seed}");
                Ok(0)
            }
        },
        Command::Simulate { action } => simulate(action),
    }
}

fn simulate(action: SimulateCmd) -> Result<i32, String> {
    match action {
        SimulateCmd::Handshake { n, delta, seed, max_steps } => {
            let outcome =
                run_handshake(n, delta, seed, max_steps).map_err(|e| e.to_string())?;
            if outcome {
                println!("delivered");
                Ok(0)
            } else {
                println!("undelivered");
                Ok(1)
            }
        }
        SimulateCmd::Stationary { graph, robots, alpha, flags, seed, max_steps } => {
            let g = graphs::from_json(&read(&graph)?).map_err(|e| e.to_string())?;
            let events: Vec<FlagEvent> = match flags {
                Some(p) => serde_json::from_str(&read(&p)?).map_err(|e| e.to_string())?,
                None => vec![FlagEvent { step: 5, cell: 0, value: true }],
            };
            let report = run_stationary(&g, robots, alpha, &events, seed, max_steps)
                .map_err(|e| e.to_string())?;
            if report.all_rescued {
                println!("rescued: all {} flags within {} steps", report.flags, report.steps);
                Ok(0)
            } else {
                println!("unrescued flags remain after {} steps", report.steps);
                Ok(1)
            }
        }
        SimulateCmd::Moving { graph, robots, seed, max_steps, snapshot_every, snapshot_dir } => {
            let g = graphs::from_json(&read(&graph)?).map_err(|e| e.to_string())?;
            let (outcome, snaps) = run_moving(&g, robots, seed, max_steps, snapshot_every)
                .map_err(|e| e.to_string())?;
            if let Some(dir) = snapshot_dir {
                fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
                for (step, dot) in &snaps {
                    fs::write(dir.join(format!("state{step:05}.dot")), dot)
                        .map_err(|e| e.to_string())?;
                }
            }
            if outcome.0 {
                println!("cleared in {} steps ({} recontaminations)", outcome.1, outcome.2);
                Ok(0)
            } else {
                println!("uncleared after {} steps", outcome.1);
                Ok(1)
            }
        }
    }
}

/// Synthesize and wire the handshake pair; returns whether the triggered
/// transmission reached the sink.
pub fn run_handshake(n: i64, delta: i64, seed: u64, max_steps: usize) -> Result<bool, String> {
    let sender = scenarios::handshake_sender_spec(n, delta).map_err(|e| e.to_string())?;
    let receiver = scenarios::handshake_receiver_spec(n, delta).map_err(|e| e.to_string())?;
    let ms = synth::synthesize(&sender).map_err(|e| e.to_string())?;
    let mr = synth::synthesize(&receiver).map_err(|e| e.to_string())?;
    let (Some(ms), Some(mr)) = (ms.strategy, mr.strategy) else {
        return Err("handshake specs must be realizable".into());
    };
    let mut components = vec![
        Component::controller("sender", ms),
        Component::controller("receiver", mr),
        Component::script("trigger", "t", vec![(3, Value::Bool(true))]),
    ];
    let cfg = SimConfig {
        seed,
        max_steps,
        snapshot_every: None,
        stop: StopWhen::VarEquals("s".into(), Value::Int(delta), 4),
    };
    let outcome = sim::run(&mut components, &[], None, &cfg).map_err(|e| e.to_string())?;
    Ok(outcome.goal_met)
}

pub struct StationaryReport {
    pub all_rescued: bool,
    pub flags: usize,
    pub steps: usize,
}

/// Synthesize allocator and robots, wire the FIFOs, connectors and the
/// scripted flags, and require every scheduled flag to be rescued: two
/// robots engaged on the flagged cell, after which the flag falls.
pub fn run_stationary(
    g: &graphs::DirectedGraph,
    robots: usize,
    alpha: usize,
    events: &[FlagEvent],
    seed: u64,
    max_steps: usize,
) -> Result<StationaryReport, String> {
    let cfg = ScenarioConfig::stationary(g.clone(), robots, alpha);
    let alloc = synth::synthesize(&scenarios::stationary_allocator_spec(&cfg).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?
        .strategy
        .ok_or("allocator spec unrealizable")?;
    let mut components = vec![Component::controller("allocator", alloc)];
    for j in 0..robots {
        let spec = scenarios::stationary_robot_spec(&cfg, j).map_err(|e| e.to_string())?;
        let m = synth::synthesize(&spec)
            .map_err(|e| e.to_string())?
            .strategy
            .ok_or("robot spec unrealizable")?;
        components.push(Component::controller(format!("robot_{j}"), m));
    }
    let n = g.n;
    components.push(Component::fifo(
        "fifof",
        (0..n).map(|i| format!("f_{i}")).collect(),
        "F",
        Some(("DEQf".into(), "DEQf_ACK".into())),
        None,
    ));
    components.push(Component::fifo(
        "fifor",
        (0..robots).map(|j| format!("r_{j}")).collect(),
        "R",
        None,
        Some("D".into()),
    ));
    components.push(Component::flag_script(
        "cells",
        (0..n).map(|i| format!("f_{i}")).collect(),
        (0..n).map(|i| format!("E_{i}")).collect(),
        alpha as i64,
        events.to_vec(),
    ));
    let mut connectors = vec![];
    for j in 0..robots {
        connectors.push(crate::compose::Connector {
            target: format!("d_{j}"),
            expr: crate::compose::parse_connector_expr(&format!("if(R = {j}, D, -1)")).unwrap(),
        });
        let clauses: Vec<String> =
            (0..n).map(|i| format!("f_{i} & cellID_{j} = {i}")).collect();
        connectors.push(crate::compose::Connector {
            target: format!("flag_{j}"),
            expr: crate::compose::parse_connector_expr(&clauses.join(" | ")).unwrap(),
        });
    }
    for i in 0..n {
        let terms: Vec<String> =
            (0..robots).map(|j| format!("e_{j} & cellID_{j} = {i}")).collect();
        connectors.push(crate::compose::Connector {
            target: format!("E_{i}"),
            expr: crate::compose::parse_connector_expr(&format!("sum({})", terms.join(", ")))
                .unwrap(),
        });
    }
    let cfg_sim = SimConfig { seed, max_steps, snapshot_every: None, stop: StopWhen::MaxSteps };
    let outcome = sim::run(&mut components, &connectors, None, &cfg_sim)
        .map_err(|e| e.to_string())?;
    // Every scheduled raise must be followed by two engaged robots on the
    // cell and then a cleared flag.
    let mut all_rescued = true;
    for ev in events.iter().filter(|e| e.value) {
        let mut engaged_seen = false;
        let mut cleared_after = false;
        let mut raised = false;
        for rec in &outcome.trace.records {
            if rec.step < ev.step {
                continue;
            }
            raised = true;
            if let Some(Value::Int(count)) = rec.changed.get(&format!("E_{}", ev.cell)) {
                if *count >= alpha as i64 {
                    engaged_seen = true;
                }
            }
            if engaged_seen {
                if let Some(Value::Bool(false)) = rec.changed.get(&format!("f_{}", ev.cell)) {
                    cleared_after = true;
                    break;
                }
            }
        }
        if !(raised && engaged_seen && cleared_after) {
            all_rescued = false;
        }
    }
    Ok(StationaryReport {
        all_rescued,
        flags: events.iter().filter(|e| e.value).count(),
        steps: outcome.steps,
    })
}

/// Synthesize one mover spec per robot and run the ring over the storage.
/// Returns ((cleared, steps, recontaminations), snapshots).
pub fn run_moving(
    g: &graphs::DirectedGraph,
    robots: usize,
    seed: u64,
    max_steps: usize,
    snapshot_every: Option<usize>,
) -> Result<((bool, usize, usize), Vec<(usize, String)>), String> {
    let cfg = ScenarioConfig::moving(g.clone(), robots);
    let mut components = vec![];
    for j in 0..robots {
        let spec = scenarios::moving_robot_spec(&cfg, j).map_err(|e| e.to_string())?;
        let m = synth::synthesize(&spec)
            .map_err(|e| e.to_string())?
            .strategy
            .ok_or_else(|| format!("mover spec {j} unrealizable"))?;
        components.push(Component::controller(format!("robot_{j}"), m));
    }
    // The ring: robot j commands its slave j+1 and acknowledges its master.
    let mut connectors = vec![];
    for j in 0..robots {
        let master = (j + robots - 1) % robots;
        let slave = (j + 1) % robots;
        connectors.push(crate::compose::Connector {
            target: format!("Cin_{j}"),
            expr: crate::compose::CExpr::Var(format!("Cout_{master}")),
        });
        connectors.push(crate::compose::Connector {
            target: format!("ackin_{j}"),
            expr: crate::compose::CExpr::Var(format!("ackout_{slave}")),
        });
    }
    let mut storage = GlobalStorage::new(
        GraphClearState::contaminated(g.clone()),
        robots,
    );
    let cfg_sim = SimConfig {
        seed,
        max_steps,
        snapshot_every,
        stop: StopWhen::AllEdgesCleared,
    };
    let outcome = sim::run(&mut components, &connectors, Some(&mut storage), &cfg_sim)
        .map_err(|e| e.to_string())?;
    Ok((
        (outcome.goal_met, outcome.steps, outcome.recontaminations),
        outcome.snapshots,
    ))
}

use crate::pursuit::GraphClearState;
