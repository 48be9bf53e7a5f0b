//! The plain-text spec file format.
//!
//! One declaration or formula per line; `#` starts a comment. Sections:
//! `ENV`, `SYS` (declarations `name : bool`, `name : lo..hi`,
//! `name : {a,b,c}`) and `ASSUMPTION INIT|TRANS|LIVE`,
//! `GUARANTEE INIT|TRANS|LIVE` (formulas). Transition lines may carry the
//! leading `[]`, liveness lines the leading `[]<>`; both are implied.
//! A guarantee-liveness line of response shape `[](p -> <> q)` is
//! translated into its GR[1] trigger encoding with a fresh variable.

use super::{
    parse_formula, translate_response_to_gr1, Domain, Formula, Gr1Spec, LtlError, VarDecl,
};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Section {
    Env,
    Sys,
    AssumeInit,
    AssumeTrans,
    AssumeLive,
    GuarInit,
    GuarTrans,
    GuarLive,
}

fn section_of(line: &str) -> Option<Section> {
    match line {
        "ENV" => Some(Section::Env),
        "SYS" => Some(Section::Sys),
        "ASSUMPTION INIT" => Some(Section::AssumeInit),
        "ASSUMPTION TRANS" => Some(Section::AssumeTrans),
        "ASSUMPTION LIVE" => Some(Section::AssumeLive),
        "GUARANTEE INIT" => Some(Section::GuarInit),
        "GUARANTEE TRANS" => Some(Section::GuarTrans),
        "GUARANTEE LIVE" => Some(Section::GuarLive),
        _ => None,
    }
}

fn parse_decl(line: &str, lineno: usize) -> Result<VarDecl, LtlError> {
    let bad = |msg: &str| LtlError::SpecFile { line: lineno, msg: msg.to_string() };
    let (name, dom) = line.split_once(':').ok_or_else(|| bad("expected `name : domain`"))?;
    let name = name.trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(bad("bad variable name"));
    }
    let dom = dom.trim();
    let domain = if dom == "bool" {
        Domain::bool()
    } else if let Some(inner) = dom.strip_prefix('{').and_then(|d| d.strip_suffix('}')) {
        let names: Vec<String> = inner.split(',').map(|s| s.trim().to_string()).collect();
        if names.iter().any(|n| n.is_empty()) {
            return Err(bad("empty enumeration constant"));
        }
        Domain::Enum(names)
    } else if let Some((lo, hi)) = dom.split_once("..") {
        let lo = lo.trim().parse().map_err(|_| bad("bad interval bound"))?;
        let hi = hi.trim().parse().map_err(|_| bad("bad interval bound"))?;
        if lo > hi {
            return Err(bad("empty interval"));
        }
        Domain::Int { lo, hi }
    } else {
        return Err(bad("expected `bool`, `lo..hi` or `{a,b,c}`"));
    };
    Ok(VarDecl { name: name.to_string(), domain })
}

// A transition line is the body of an implicit `[]`; strip one if written.
fn strip_trans(f: Formula) -> Formula {
    match f {
        Formula::Always(inner) => *inner,
        other => other,
    }
}

// A liveness line is the body of an implicit `[]<>`.
fn strip_live(f: Formula) -> Formula {
    match f {
        Formula::Always(inner) => match *inner {
            Formula::Eventually(body) => *body,
            other => Formula::Always(Box::new(other)),
        },
        other => other,
    }
}

// `[](p -> <> q)` with propositional p, q.
fn response_parts(f: &Formula) -> Option<(Formula, Formula)> {
    let Formula::Always(body) = f else { return None };
    let Formula::Implies(p, rest) = body.as_ref() else { return None };
    let Formula::Eventually(q) = rest.as_ref() else { return None };
    (p.is_propositional() && q.is_propositional()).then(|| ((**p).clone(), (**q).clone()))
}

/// Parse a complete spec file into a validated [`Gr1Spec`].
pub fn parse_spec_file(text: &str) -> Result<Gr1Spec, LtlError> {
    let mut env_vars: Vec<VarDecl> = vec![];
    let mut sys_vars: Vec<VarDecl> = vec![];
    let mut formulas: Vec<(Section, usize, String)> = vec![];
    let mut section = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(s) = section_of(line) {
            section = Some(s);
            continue;
        }
        match section {
            None => {
                return Err(LtlError::SpecFile {
                    line: lineno,
                    msg: "content before any section header".into(),
                })
            }
            Some(Section::Env) => env_vars.push(parse_decl(line, lineno)?),
            Some(Section::Sys) => sys_vars.push(parse_decl(line, lineno)?),
            Some(s) => formulas.push((s, lineno, line.to_string())),
        }
    }

    let mut spec = Gr1Spec::new(env_vars, sys_vars);
    let mut fresh_counter = 0usize;
    // Responses append trigger variables, shifting nothing: triggers go to
    // the end of the system block, and parsed formulas index env++sys which
    // only grows at the tail.
    for (section, lineno, line) in formulas {
        let decls = spec.all_vars();
        let f = parse_formula(&line, &decls).map_err(|e| LtlError::SpecFile {
            line: lineno,
            msg: e.to_string(),
        })?;
        match section {
            Section::AssumeInit => {
                spec.env_init = conjoin(std::mem::replace(&mut spec.env_init, Formula::True), f)
            }
            Section::GuarInit => {
                spec.sys_init = conjoin(std::mem::replace(&mut spec.sys_init, Formula::True), f)
            }
            Section::AssumeTrans => spec.env_trans.push(strip_trans(f)),
            Section::GuarTrans => spec.sys_trans.push(strip_trans(f)),
            Section::AssumeLive => spec.env_live.push(strip_live(f)),
            Section::GuarLive => {
                if let Some((p, q)) = response_parts(&f) {
                    let fresh = loop {
                        let name = format!("trig{fresh_counter}");
                        fresh_counter += 1;
                        if spec.var_index(&name).is_none() {
                            break name;
                        }
                    };
                    let block =
                        translate_response_to_gr1(&p, &q, &fresh, spec.num_vars(), &decls)?;
                    spec.sys_vars.push(block.trigger);
                    spec.sys_init = conjoin(
                        std::mem::replace(&mut spec.sys_init, Formula::True),
                        block.init,
                    );
                    spec.sys_trans.extend(block.trans);
                    spec.sys_live.push(block.live);
                } else {
                    spec.sys_live.push(strip_live(f));
                }
            }
            Section::Env | Section::Sys => unreachable!(),
        }
    }
    spec.validate()?;
    Ok(spec)
}

fn conjoin(acc: Formula, f: Formula) -> Formula {
    if acc == Formula::True {
        f
    } else {
        acc.and(f)
    }
}

/// Serialize a spec in the file format. Emission is deterministic; parsing
/// the output reproduces the spec.
pub fn write_spec_file(spec: &Gr1Spec) -> String {
    let decls = spec.all_vars();
    let mut out = String::new();
    let mut push = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    push("ENV".into());
    for d in &spec.env_vars {
        push(format!("{} : {}", d.name, d.domain));
    }
    push("SYS".into());
    for d in &spec.sys_vars {
        push(format!("{} : {}", d.name, d.domain));
    }
    let sections: [(&str, Vec<String>); 6] = [
        ("ASSUMPTION INIT", init_lines(&spec.env_init, &decls)),
        (
            "ASSUMPTION TRANS",
            spec.env_trans
                .iter()
                .map(|f| f.clone().always().display(&decls).to_string())
                .collect(),
        ),
        (
            "ASSUMPTION LIVE",
            spec.env_live
                .iter()
                .map(|f| f.clone().eventually().always().display(&decls).to_string())
                .collect(),
        ),
        ("GUARANTEE INIT", init_lines(&spec.sys_init, &decls)),
        (
            "GUARANTEE TRANS",
            spec.sys_trans
                .iter()
                .map(|f| f.clone().always().display(&decls).to_string())
                .collect(),
        ),
        (
            "GUARANTEE LIVE",
            spec.sys_live
                .iter()
                .map(|f| f.clone().eventually().always().display(&decls).to_string())
                .collect(),
        ),
    ];
    for (header, lines) in sections {
        if !lines.is_empty() {
            push(header.into());
            for l in lines {
                push(l);
            }
        }
    }
    out
}

fn init_lines(f: &Formula, decls: &[VarDecl]) -> Vec<String> {
    if *f == Formula::True {
        vec![]
    } else {
        vec![f.display(decls).to_string()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "\
# toy controller
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
    fn parses_worked_example_with_response_translation() {
        let spec = parse_spec_file(EXAMPLE).unwrap();
        assert_eq!(spec.env_vars.len(), 1);
        assert_eq!(spec.sys_vars.len(), 3, "trigger variable appended");
        assert_eq!(spec.sys_vars[2].name, "trig0");
        assert_eq!(spec.env_live.len(), 2);
        assert_eq!(spec.sys_live.len(), 1);
        assert_eq!(spec.sys_trans.len(), 5, "two safety + three trigger conjuncts");
    }

    #[test]
    fn write_then_parse_is_stable() {
        let spec = parse_spec_file(EXAMPLE).unwrap();
        let text = write_spec_file(&spec);
        let again = parse_spec_file(&text).unwrap();
        assert_eq!(again, spec);
        // And once stable, emission is byte-identical.
        assert_eq!(write_spec_file(&again), text);
    }

    #[test]
    fn declaration_forms() {
        let text = "\
ENV
r : -1..3
SYS
m : {gu, cs, sp, sl}
ok : bool
GUARANTEE TRANS
[](m = gu -> X(m = gu))
";
        let spec = parse_spec_file(text).unwrap();
        assert_eq!(spec.env_vars[0].domain, Domain::Int { lo: -1, hi: 3 });
        assert_eq!(spec.sys_vars[0].domain.size(), 4);
    }

    #[test]
    fn reports_line_numbers() {
        let text = "ENV\nx : bool\nSYS\ny : bool\nGUARANTEE TRANS\n[](x -> X(zz))\n";
        match parse_spec_file(text) {
            Err(LtlError::SpecFile { line, .. }) => assert_eq!(line, 6),
            other => panic!("unexpected: {other:?}"),
        }
    }
}
