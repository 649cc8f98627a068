//! Command layer: session configuration, the command dispatcher used by
//! both the binary and the tests, the golden corpus runner and a small
//! read-eval-print loop.
//!
//! Exit codes: 0 success, 1 negative verdict, 2 error, 3 fuel-bounded
//! unknown.

use interlam_core::lambda::{rel_check, RelVerdict, DEFAULT_FUEL};
use interlam_core::reduce::{
    all_redex_kinds, all_redex_kinds_eta, normalize_d, redexes, step, Closure, NormalizeOpts,
    NormalizeOutcome, ReduceError,
};
use interlam_core::syntax::{parse_basis, parse_term, parse_type};
use interlam_core::term::essence;
use interlam_core::translate::{coercion_free, target_system, translate_with_fuel};
use interlam_core::ty::TheoryId;
use interlam_core::typing::{derivation_with_fuel, infer_with_fuel, Basis, SystemId, TypingError};
use interlam_core::{Rel, Term, TypeExpr};
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub system: SystemId,
    pub fuel: u64,
    /// None means any atom is accepted
    pub alphabet: Option<BTreeSet<String>>,
    pub basis_src: String,
    pub json: bool,
    pub trace: bool,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            system: SystemId::new(TheoryId::CD, Rel::Syn).expect("CD:syn is admitted"),
            fuel: DEFAULT_FUEL,
            alphabet: None,
            basis_src: String::new(),
            json: false,
            trace: false,
        }
    }
}

impl SessionConfig {
    /// Applies `key=value` lines; `#` starts a comment. Recognized keys:
    /// theory, relation, fuel, trace, alphabet (comma-separated), basis.
    pub fn apply_config_text(&mut self, text: &str) -> Result<(), String> {
        let mut theory = self.system.theory_id();
        let mut relation = self.system.relation();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!("config line {}: expected key=value", lineno + 1));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "theory" => {
                    theory = TheoryId::parse(value)
                        .ok_or_else(|| format!("config line {}: unknown theory", lineno + 1))?;
                }
                "relation" => {
                    relation = Rel::parse(value)
                        .ok_or_else(|| format!("config line {}: unknown relation", lineno + 1))?;
                }
                "fuel" => {
                    self.fuel = value
                        .parse()
                        .map_err(|_| format!("config line {}: bad fuel", lineno + 1))?;
                }
                "trace" => {
                    self.trace = value == "true" || value == "1";
                }
                "alphabet" => {
                    self.alphabet = Some(
                        value
                            .split(',')
                            .map(|s| s.trim().to_owned())
                            .filter(|s| !s.is_empty())
                            .collect(),
                    );
                }
                "basis" => {
                    self.basis_src = value.to_owned();
                }
                other => return Err(format!("config line {}: unknown key `{other}`", lineno + 1)),
            }
        }
        self.system = SystemId::new(theory, relation)
            .ok_or_else(|| format!("`{theory}` does not admit the `{relation}` relation"))?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum Cmd {
    Type { term: String, curry: bool },
    Check { term: String, ty: String },
    Essence { term: String },
    Reduce { term: String, eta: bool },
    Normalize { term: String, sync: bool, eta: bool },
    Translate { term: String },
    Subtype { lhs: String, rhs: String },
    Corpus { path: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmdOutput {
    pub code: i32,
    pub text: String,
}

impl CmdOutput {
    fn new(code: i32, text: impl Into<String>) -> CmdOutput {
        CmdOutput {
            code,
            text: text.into(),
        }
    }
}

#[derive(Serialize)]
struct SystemJson {
    theory: String,
    relation: String,
}

#[derive(Serialize)]
#[serde(untagged)]
enum ResultJson {
    Type { r#type: String },
    Error { error: String, detail: String },
}

#[derive(Serialize)]
struct JudgmentJson {
    system: SystemJson,
    basis: Vec<[String; 2]>,
    term: String,
    result: ResultJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    derivation: Option<serde_json::Value>,
}

fn system_json(sys: SystemId) -> SystemJson {
    SystemJson {
        theory: sys.theory_id().to_string(),
        relation: sys.relation().to_string(),
    }
}

fn basis_json(basis: &Basis) -> Vec<[String; 2]> {
    basis
        .iter()
        .map(|(n, t)| [n.clone(), t.to_string()])
        .collect()
}

fn typing_error_exit(err: &TypingError) -> i32 {
    match err {
        TypingError::RelUnknown { .. } => EXIT_UNKNOWN,
        _ => EXIT_ERROR,
    }
}

fn check_alphabet(cfg: &SessionConfig, atoms: Vec<&str>) -> Result<(), String> {
    let Some(allowed) = &cfg.alphabet else {
        return Ok(());
    };
    for a in atoms {
        if !allowed.contains(a) {
            return Err(format!("unknown atom `{a}`: not in the declared alphabet"));
        }
    }
    Ok(())
}

fn term_atoms(t: &Term) -> Vec<&str> {
    fn go<'a>(t: &'a Term, out: &mut Vec<&'a str>) {
        match t {
            Term::Free(_) | Term::Bound(_) => {}
            Term::UConst(ix) => go(ix, out),
            Term::Abs(_, ty, b) => {
                out.extend(ty.atoms());
                go(b, out);
            }
            Term::App(f, a) => {
                go(f, out);
                go(a, out);
            }
            Term::Pair(l, r) => {
                go(l, out);
                go(r, out);
            }
            Term::Proj(_, b) => go(b, out),
            Term::Coerce(b, ty) => {
                go(b, out);
                out.extend(ty.atoms());
            }
        }
    }
    let mut out = Vec::new();
    go(t, &mut out);
    out
}

fn parse_session_basis(cfg: &SessionConfig) -> Result<Basis, String> {
    let pairs = parse_basis(&cfg.basis_src).map_err(|e| e.to_string())?;
    for (_, t) in &pairs {
        check_alphabet(cfg, t.atoms())?;
    }
    Ok(Basis::from_pairs(pairs))
}

fn parse_session_term(cfg: &SessionConfig, src: &str) -> Result<Term, String> {
    let t = parse_term(src).map_err(|e| e.to_string())?;
    check_alphabet(cfg, term_atoms(&t))?;
    Ok(t)
}

pub fn run_command(cfg: &SessionConfig, cmd: &Cmd) -> CmdOutput {
    match run_inner(cfg, cmd) {
        Ok(out) => out,
        Err(msg) => CmdOutput::new(EXIT_ERROR, format!("error: {msg}\n")),
    }
}

fn render_judgment(
    cfg: &SessionConfig,
    basis: &Basis,
    term_src: &str,
    outcome: &Result<TypeExpr, TypingError>,
    derivation: Option<serde_json::Value>,
) -> String {
    if cfg.json {
        let result = match outcome {
            Ok(ty) => ResultJson::Type {
                r#type: ty.to_string(),
            },
            Err(e) => ResultJson::Error {
                error: e.code().to_owned(),
                detail: e.to_string(),
            },
        };
        let doc = JudgmentJson {
            system: system_json(cfg.system),
            basis: basis_json(basis),
            term: term_src.to_owned(),
            result,
            derivation,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    } else {
        match outcome {
            Ok(ty) => format!("{ty}\n"),
            Err(e) => format!("error[{}]: {e}\n", e.code()),
        }
    }
}

fn run_inner(cfg: &SessionConfig, cmd: &Cmd) -> Result<CmdOutput, String> {
    match cmd {
        Cmd::Type { term, curry } => {
            let basis = parse_session_basis(cfg)?;
            let t = parse_session_term(cfg, term)?;
            let deriv = derivation_with_fuel(cfg.system, &basis, &t, cfg.fuel);
            let (outcome, deriv_json) = match deriv {
                Ok(d) => {
                    let dj = cfg.json.then(|| {
                        if *curry {
                            match interlam_core::curry::erase_derivation(cfg.system, &d) {
                                Ok(c) => serde_json::json!({"style": "curry", "tree": c}),
                                Err(e) => serde_json::json!({
                                    "style": "curry",
                                    "unsupported": e.to_string(),
                                }),
                            }
                        } else {
                            serde_json::json!({"style": "church", "tree": d})
                        }
                    });
                    (Ok(d.ty), dj)
                }
                Err(e) => (Err(e), None),
            };
            let code = match &outcome {
                Ok(_) => EXIT_OK,
                Err(e) => typing_error_exit(e),
            };
            Ok(CmdOutput::new(
                code,
                render_judgment(cfg, &basis, term, &outcome, deriv_json),
            ))
        }
        Cmd::Check { term, ty } => {
            let basis = parse_session_basis(cfg)?;
            let t = parse_session_term(cfg, term)?;
            let want = parse_type(ty).map_err(|e| e.to_string())?;
            check_alphabet(cfg, want.atoms())?;
            match infer_with_fuel(cfg.system, &basis, &t, cfg.fuel) {
                Ok(got) if got == want => Ok(CmdOutput::new(EXIT_OK, "true\n")),
                Ok(got) => Ok(CmdOutput::new(
                    EXIT_NEGATIVE,
                    format!("false: the term has type {got}\n"),
                )),
                Err(e) => Ok(CmdOutput::new(
                    typing_error_exit(&e),
                    render_judgment(cfg, &basis, term, &Err(e), None),
                )),
            }
        }
        Cmd::Essence { term } => {
            let t = parse_session_term(cfg, term)?;
            Ok(CmdOutput::new(EXIT_OK, format!("{}\n", essence(&t))))
        }
        Cmd::Reduce { term, eta } => {
            let t = parse_session_term(cfg, term)?;
            let kinds = if *eta {
                all_redex_kinds_eta()
            } else {
                all_redex_kinds()
            };
            match redexes(&t, &kinds).into_iter().next() {
                None => Ok(CmdOutput::new(
                    EXIT_NEGATIVE,
                    format!("already in normal form: {t}\n"),
                )),
                Some((pos, kind)) => {
                    let next = step(&t, &pos, kind).map_err(|e| e.to_string())?;
                    let mut out = String::new();
                    if cfg.trace {
                        let _ = writeln!(out, "({pos}, {kind}, {next})");
                    }
                    let _ = writeln!(out, "{next}");
                    Ok(CmdOutput::new(EXIT_OK, out))
                }
            }
        }
        Cmd::Normalize { term, sync, eta } => {
            let t = parse_session_term(cfg, term)?;
            let opts = NormalizeOpts {
                closure: if *sync { Closure::Sync } else { Closure::Plain },
                fuel: cfg.fuel,
                eta: *eta,
            };
            match normalize_d(&t, &opts) {
                Ok((outcome, steps)) => {
                    let mut out = String::new();
                    if cfg.trace {
                        for s in &steps {
                            let _ = writeln!(out, "({}, {}, {})", s.position, s.kind, s.term);
                        }
                    }
                    match outcome {
                        NormalizeOutcome::Normal(nf) => {
                            let _ = writeln!(out, "{nf}");
                            Ok(CmdOutput::new(EXIT_OK, out))
                        }
                        NormalizeOutcome::Exhausted => {
                            let _ = writeln!(out, "no normal form within {} steps", cfg.fuel);
                            Ok(CmdOutput::new(EXIT_UNKNOWN, out))
                        }
                    }
                }
                Err(e @ ReduceError::SyncViolation { .. }) => {
                    Ok(CmdOutput::new(EXIT_ERROR, format!("error: {e}\n")))
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Cmd::Translate { term } => {
            let basis = parse_session_basis(cfg)?;
            let t = parse_session_term(cfg, term)?;
            // source must be typable first
            if let Err(e) = infer_with_fuel(cfg.system, &basis, &t, cfg.fuel) {
                return Ok(CmdOutput::new(
                    typing_error_exit(&e),
                    render_judgment(cfg, &basis, term, &Err(e), None),
                ));
            }
            let out_term = match translate_with_fuel(cfg.system, &basis, &t, cfg.fuel) {
                Ok(o) => o,
                Err(e) => {
                    return Ok(CmdOutput::new(
                        typing_error_exit(&e),
                        render_judgment(cfg, &basis, term, &Err(e), None),
                    ))
                }
            };
            let target = target_system(cfg.system);
            let target_ty = infer_with_fuel(target, &basis, &out_term, cfg.fuel)
                .map_err(|e| format!("translated term failed to typecheck: {e}"))?;
            let verdict = rel_check(
                target.relation(),
                &essence(&out_term),
                &essence(&t),
                cfg.fuel,
            );
            let code = if verdict == RelVerdict::Holds {
                EXIT_OK
            } else {
                EXIT_UNKNOWN
            };
            if cfg.json {
                let doc = serde_json::json!({
                    "system": {"theory": cfg.system.theory_id().to_string(),
                               "relation": cfg.system.relation().to_string()},
                    "target": {"theory": target.theory_id().to_string(),
                               "relation": target.relation().to_string()},
                    "term": term,
                    "translated": out_term.to_string(),
                    "coercion_free": coercion_free(&out_term),
                    "type": target_ty.to_string(),
                    "essence_verdict": format!("{verdict:?}"),
                });
                return Ok(CmdOutput::new(
                    code,
                    format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")),
                ));
            }
            let mut out = String::new();
            let _ = writeln!(out, "{out_term}");
            let _ = writeln!(out, "target system: {target}");
            let _ = writeln!(out, "target type:   {target_ty}");
            let _ = writeln!(out, "coercion-free: {}", coercion_free(&out_term));
            let _ = writeln!(out, "essence check: {verdict:?}");
            Ok(CmdOutput::new(code, out))
        }
        Cmd::Subtype { lhs, rhs } => {
            let theory = cfg.system.theory();
            let l = parse_type(lhs).map_err(|e| e.to_string())?;
            let r = parse_type(rhs).map_err(|e| e.to_string())?;
            check_alphabet(cfg, l.atoms())?;
            check_alphabet(cfg, r.atoms())?;
            let holds = interlam_core::subtype(&theory, &l, &r).map_err(|e| e.to_string())?;
            let deriv =
                interlam_core::derive_subtype(&theory, &l, &r).map_err(|e| e.to_string())?;
            if cfg.json {
                let doc = serde_json::json!({
                    "theory": theory.id.to_string(),
                    "lhs": l.to_string(),
                    "rhs": r.to_string(),
                    "holds": holds,
                    "derivation": deriv,
                });
                let code = if holds { EXIT_OK } else { EXIT_NEGATIVE };
                return Ok(CmdOutput::new(
                    code,
                    format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")),
                ));
            }
            if holds {
                let mut out = String::from("true\n");
                if let Some(d) = deriv {
                    let _ = writeln!(out, "derivation: {d:?}");
                }
                Ok(CmdOutput::new(EXIT_OK, out))
            } else {
                Ok(CmdOutput::new(EXIT_NEGATIVE, "false\n"))
            }
        }
        Cmd::Corpus { path } => run_corpus(Path::new(path), cfg.fuel),
    }
}

// ---- corpus ----

#[derive(Debug, Clone, PartialEq)]
pub enum Expect {
    Type(String),
    Error(String),
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub system: SystemId,
    pub basis_src: String,
    pub term_src: String,
    pub expect: Expect,
    pub note: String,
}

/// Parses the line-oriented corpus format: `name | system | basis | term
/// | expect [| note]` with `#` comments. The expectation is either
/// `type <type>` or `error <code>`.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>, String> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        if fields.len() < 5 || fields.len() > 6 {
            return Err(format!(
                "corpus line {}: expected 5 or 6 `|`-separated fields",
                lineno + 1
            ));
        }
        let name = fields[0].to_owned();
        let Some((theory_src, rel_src)) = fields[1].split_once(':') else {
            return Err(format!(
                "corpus line {}: system must be THEORY:REL",
                lineno + 1
            ));
        };
        let theory = TheoryId::parse(theory_src)
            .ok_or_else(|| format!("corpus line {}: unknown theory", lineno + 1))?;
        let rel = Rel::parse(rel_src)
            .ok_or_else(|| format!("corpus line {}: unknown relation", lineno + 1))?;
        let system = SystemId::new(theory, rel)
            .ok_or_else(|| format!("corpus line {}: system is not admitted", lineno + 1))?;
        let expect_src = fields[4];
        let expect = if let Some(ty) = expect_src.strip_prefix("type ") {
            Expect::Type(ty.trim().to_owned())
        } else if let Some(code) = expect_src.strip_prefix("error ") {
            Expect::Error(code.trim().to_owned())
        } else {
            return Err(format!(
                "corpus line {}: expectation must start with `type` or `error`",
                lineno + 1
            ));
        };
        out.push(CorpusEntry {
            name,
            system,
            basis_src: fields[2].to_owned(),
            term_src: fields[3].to_owned(),
            expect,
            note: fields.get(5).map(|s| s.to_string()).unwrap_or_default(),
        });
    }
    Ok(out)
}

pub struct CorpusReport {
    pub total: usize,
    pub failures: Vec<(String, String)>,
    pub rendered: String,
}

/// Runs one entry against the kernel; `None` means pass, `Some(reason)`
/// is the mismatch description. Expected types are compared structurally
/// after parsing.
pub fn run_corpus_entry(entry: &CorpusEntry, fuel: u64) -> Option<String> {
    let basis = match parse_basis(&entry.basis_src) {
        Ok(pairs) => Basis::from_pairs(pairs),
        Err(e) => return Some(format!("basis does not parse: {e}")),
    };
    let term = match parse_term(&entry.term_src) {
        Ok(t) => t,
        Err(e) => return Some(format!("term does not parse: {e}")),
    };
    let got = infer_with_fuel(entry.system, &basis, &term, fuel);
    match (&entry.expect, got) {
        (Expect::Type(want_src), Ok(got_ty)) => {
            let want = match parse_type(want_src) {
                Ok(t) => t,
                Err(e) => return Some(format!("expected type does not parse: {e}")),
            };
            if got_ty == want {
                None
            } else {
                Some(format!("expected type {want}, inferred {got_ty}"))
            }
        }
        (Expect::Type(want_src), Err(e)) => {
            Some(format!("expected type {want_src}, got error {}", e.code()))
        }
        (Expect::Error(code), Ok(got_ty)) => {
            Some(format!("expected error {code}, inferred type {got_ty}"))
        }
        (Expect::Error(code), Err(e)) => {
            if e.code() == code {
                None
            } else {
                Some(format!("expected error {code}, got error {}", e.code()))
            }
        }
    }
}

pub fn run_corpus_text(text: &str, fuel: u64) -> Result<CorpusReport, String> {
    let entries = parse_corpus(text)?;
    let mut rendered = String::new();
    let mut failures = Vec::new();
    for entry in &entries {
        match run_corpus_entry(entry, fuel) {
            None => {
                let _ = writeln!(rendered, "ok   {} [{}]", entry.name, entry.system);
            }
            Some(reason) => {
                let _ = writeln!(rendered, "FAIL {} [{}]: {reason}", entry.name, entry.system);
                failures.push((entry.name.clone(), reason));
            }
        }
    }
    let _ = writeln!(
        rendered,
        "{} entries, {} failures",
        entries.len(),
        failures.len()
    );
    Ok(CorpusReport {
        total: entries.len(),
        failures,
        rendered,
    })
}

fn run_corpus(path: &Path, fuel: u64) -> Result<CmdOutput, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read corpus {}: {e}", path.display()))?;
    let report = run_corpus_text(&text, fuel)?;
    let code = if report.failures.is_empty() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    };
    Ok(CmdOutput::new(code, report.rendered))
}

// ---- repl ----

/// Minimal interactive loop. `:type t`, `:essence t`, `:normalize t`,
/// `:subtype T1 | T2`, `:set key value`, `:quit`; a bare term is typed.
pub fn repl(
    cfg: &mut SessionConfig,
    input: &mut dyn std::io::BufRead,
    output: &mut dyn std::io::Write,
) -> std::io::Result<()> {
    let mut line = String::new();
    loop {
        write!(output, "{}> ", cfg.system)?;
        output.flush()?;
        line.clear();
        if input.read_line(&mut line)? == 0 {
            return Ok(());
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == ":quit" || line == ":q" {
            return Ok(());
        }
        let out = if let Some(rest) = line.strip_prefix(":set ") {
            let mut cfg2 = cfg.clone();
            let kv = rest.trim().replacen(' ', "=", 1);
            match cfg2.apply_config_text(&kv) {
                Ok(()) => {
                    *cfg = cfg2;
                    CmdOutput::new(EXIT_OK, format!("now in {}\n", cfg.system))
                }
                Err(e) => CmdOutput::new(EXIT_ERROR, format!("error: {e}\n")),
            }
        } else if let Some(t) = line.strip_prefix(":type ") {
            run_command(cfg, &Cmd::Type { term: t.to_owned(), curry: false })
        } else if let Some(t) = line.strip_prefix(":essence ") {
            run_command(cfg, &Cmd::Essence { term: t.to_owned() })
        } else if let Some(t) = line.strip_prefix(":normalize ") {
            run_command(
                cfg,
                &Cmd::Normalize {
                    term: t.to_owned(),
                    sync: false,
                    eta: false,
                },
            )
        } else if let Some(rest) = line.strip_prefix(":subtype ") {
            match rest.split_once('|') {
                Some((l, r)) => run_command(
                    cfg,
                    &Cmd::Subtype {
                        lhs: l.trim().to_owned(),
                        rhs: r.trim().to_owned(),
                    },
                ),
                None => CmdOutput::new(EXIT_ERROR, "usage: :subtype T1 | T2\n".to_owned()),
            }
        } else if line.starts_with(':') {
            CmdOutput::new(
                EXIT_ERROR,
                "commands: :type t, :essence t, :normalize t, :subtype T1 | T2, :set k v, :quit\n"
                    .to_owned(),
            )
        } else {
            run_command(
                cfg,
                &Cmd::Type {
                    term: line.to_owned(),
                    curry: false,
                },
            )
        };
        output.write_all(out.text.as_bytes())?;
    }
}
