//! The plain-text workspace format.
//!
//! A file is a sequence of sections, each opened by `<kind> <name>` and
//! closed by `end`. Blank lines and lines starting with `#` are ignored.
//!
//! ```text
//! language L
//!   op imp 2
//!   op bot 0
//! end
//! matrix M
//!   language L
//!   values 0 1
//!   designated 0
//!   op imp : 0 1 0 0
//!   op bot : 1
//! end
//! calculus C
//!   language L
//!   axiom k : imp(A,imp(B,A))
//!   rule MP : A, imp(A,B) => B
//! end
//! formula F
//!   language L
//!   is imp(X,X)
//! end
//! kripke K
//!   worlds r a b
//!   rel r r
//!   rel r a
//!   mode intuitionistic
//!   root r
//!   P X : a
//! end
//! derivation D
//!   calculus C
//!   step imp(X,imp(X,X)) by axiom k
//! end
//! certificate Z
//!   calculus C
//!   matrix M
//!   formula bot
//!   valuation
//! end
//! ```
//!
//! References may point forward, across files, or to built-in names.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::calculus::{builtin_calculus, Calculus, Derivation, Justification, Rule, Step};
use crate::kripke::{modal_signature, KripkeModel, Mode};
use crate::lang::{Formula, Signature, Substitution};
use crate::matrix::{
    classical, godel, godel_imp_bot, godel_top, imp_bot_signature, ipc_signature, k_matrix,
    k_signature, t3, Matrix,
};
use crate::search::Certificate;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorkspaceError {
    #[error("{source_name}:{line}: {msg}")]
    Parse {
        source_name: String,
        line: usize,
        msg: String,
    },
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
}

/// Named entities loaded from workspace files.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Workspace {
    pub languages: BTreeMap<String, Signature>,
    pub matrices: BTreeMap<String, Matrix>,
    pub calculi: BTreeMap<String, Calculus>,
    pub formulas: BTreeMap<String, (Signature, Formula)>,
    pub kripke: BTreeMap<String, KripkeModel>,
    /// Each derivation with the name of its calculus.
    pub derivations: BTreeMap<String, (String, Derivation)>,
    pub certificates: BTreeMap<String, Certificate>,
}

pub fn builtin_language(name: &str) -> Option<Signature> {
    match name {
        "IPC" => Some(ipc_signature()),
        "IB" => Some(imp_bot_signature()),
        "K" => Some(k_signature()),
        "MODAL" => Some(modal_signature()),
        _ => None,
    }
}

const BUILTIN_LANGUAGES: [&str; 4] = ["IPC", "IB", "K", "MODAL"];
const BUILTIN_CALCULI: [&str; 4] = ["IPC", "IPCIB", "K", "KNoR2"];

/// `G<m>`, `G<m>TOP`, `G<m>IB`, `M<n>`, `T3` and `CL`.
pub fn builtin_matrix(name: &str) -> Option<Matrix> {
    match name {
        "T3" => return Some(t3()),
        "CL" => return Some(classical()),
        _ => {}
    }
    let num = |s: &str| s.parse::<usize>().ok().filter(|_| s.bytes().all(|b| b.is_ascii_digit()));
    if let Some(rest) = name.strip_prefix('G') {
        if let Some(m) = rest.strip_suffix("TOP").and_then(num) {
            return godel_top(m).ok();
        }
        if let Some(m) = rest.strip_suffix("IB").and_then(num) {
            return godel_imp_bot(m).ok();
        }
        return num(rest).and_then(|m| godel(m).ok());
    }
    name.strip_prefix('M').and_then(num).and_then(|n| k_matrix(n).ok())
}

struct Section {
    kind: String,
    name: String,
    source: String,
    header_line: usize,
    /// Body lines with their 1-based line numbers.
    lines: Vec<(usize, String)>,
}

impl Section {
    fn error(&self, line: usize, msg: impl Into<String>) -> WorkspaceError {
        WorkspaceError::Parse {
            source_name: self.source.clone(),
            line,
            msg: msg.into(),
        }
    }
}

fn split_sections(source: &str, text: &str) -> Result<Vec<Section>, WorkspaceError> {
    let err = |line: usize, msg: &str| WorkspaceError::Parse {
        source_name: source.to_string(),
        line,
        msg: msg.to_string(),
    };
    let mut out = Vec::new();
    let mut open: Option<Section> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let n = i + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match open.as_mut() {
            None => {
                let mut words = line.split_whitespace();
                let (Some(kind), Some(name), None) = (words.next(), words.next(), words.next()) else {
                    return Err(err(n, "expected `<kind> <name>`"));
                };
                if !matches!(
                    kind,
                    "language" | "matrix" | "calculus" | "formula" | "kripke" | "derivation" | "certificate"
                ) {
                    return Err(err(n, &format!("unknown section kind `{kind}`")));
                }
                open = Some(Section {
                    kind: kind.to_string(),
                    name: name.to_string(),
                    source: source.to_string(),
                    header_line: n,
                    lines: Vec::new(),
                });
            }
            Some(s) => {
                if line == "end" {
                    out.push(open.take().expect("open section"));
                } else {
                    s.lines.push((n, line.to_string()));
                }
            }
        }
    }
    if let Some(s) = open {
        return Err(err(s.header_line, &format!("section `{}` has no `end`", s.name)));
    }
    Ok(out)
}

/// Splits `key rest` into the keyword and the trimmed remainder.
fn keyword(line: &str) -> (&str, &str) {
    match line.split_once(char::is_whitespace) {
        Some((k, rest)) => (k, rest.trim()),
        None => (line, ""),
    }
}

impl Workspace {
    pub fn new() -> Self {
        Workspace::default()
    }

    pub fn parse(text: &str) -> Result<Self, WorkspaceError> {
        Workspace::parse_sources(&[("<input>", text)])
    }

    /// Parses several files as one workspace.
    pub fn parse_sources(sources: &[(&str, &str)]) -> Result<Self, WorkspaceError> {
        let mut sections = Vec::new();
        for (name, text) in sources {
            sections.extend(split_sections(name, text)?);
        }
        let mut ws = Workspace::default();
        let by_kind = |k: &'static str| sections.iter().filter(move |s| s.kind == k);
        for s in by_kind("language") {
            let sig = parse_language(s)?;
            insert(&mut ws.languages, "language", s, sig)?;
        }
        for s in by_kind("matrix") {
            let m = ws.parse_matrix(s)?;
            insert(&mut ws.matrices, "matrix", s, m)?;
        }
        for s in by_kind("calculus") {
            let c = ws.parse_calculus(s)?;
            insert(&mut ws.calculi, "calculus", s, c)?;
        }
        for s in by_kind("formula") {
            let f = ws.parse_formula(s)?;
            insert(&mut ws.formulas, "formula", s, f)?;
        }
        for s in by_kind("kripke") {
            let k = parse_kripke(s)?;
            insert(&mut ws.kripke, "kripke model", s, k)?;
        }
        for s in by_kind("derivation") {
            let d = ws.parse_derivation(s)?;
            insert(&mut ws.derivations, "derivation", s, d)?;
        }
        for s in by_kind("certificate") {
            let c = ws.parse_certificate(s)?;
            insert(&mut ws.certificates, "certificate", s, c)?;
        }
        Ok(ws)
    }

    pub fn language(&self, name: &str) -> Result<Signature, WorkspaceError> {
        self.languages
            .get(name)
            .cloned()
            .or_else(|| builtin_language(name))
            .ok_or_else(|| unknown("language", name))
    }

    pub fn matrix(&self, name: &str) -> Result<Matrix, WorkspaceError> {
        self.matrices
            .get(name)
            .cloned()
            .or_else(|| builtin_matrix(name))
            .ok_or_else(|| unknown("matrix", name))
    }

    pub fn calculus(&self, name: &str) -> Result<Calculus, WorkspaceError> {
        self.calculi
            .get(name)
            .cloned()
            .or_else(|| builtin_calculus(name).ok())
            .ok_or_else(|| unknown("calculus", name))
    }

    pub fn kripke_model(&self, name: &str) -> Result<KripkeModel, WorkspaceError> {
        match name {
            "FORK" => Ok(KripkeModel::fork()),
            _ => {
                if let Some(k) = self.kripke.get(name) {
                    return Ok(k.clone());
                }
                name.strip_prefix("CHAIN")
                    .and_then(|n| n.parse().ok())
                    .and_then(|n| KripkeModel::chain(n).ok())
                    .ok_or_else(|| unknown("kripke model", name))
            }
        }
    }

    /// A named formula, or else `text` parsed in `sig`.
    pub fn formula(&self, text: &str, sig: &Signature) -> Result<Formula, WorkspaceError> {
        if let Some((fsig, f)) = self.formulas.get(text) {
            if fsig.iter().all(|c| sig.arity(&c.name) == Some(c.arity)) {
                return Ok(f.clone());
            }
        }
        sig.parse(text).map_err(|e| WorkspaceError::Parse {
            source_name: "<formula>".into(),
            line: 1,
            msg: e.to_string(),
        })
    }

    fn sig_line(&self, s: &Section) -> Result<Signature, WorkspaceError> {
        let (n, line) = s
            .lines
            .iter()
            .find(|(_, l)| keyword(l).0 == "language")
            .ok_or_else(|| s.error(s.header_line, "missing `language` line"))?;
        self.language(keyword(line).1).map_err(|e| s.error(*n, e.to_string()))
    }

    fn parse_matrix(&self, s: &Section) -> Result<Matrix, WorkspaceError> {
        let sig = self.sig_line(s)?;
        let mut values: Option<Vec<String>> = None;
        let mut designated = Vec::new();
        let mut tables: Vec<Option<Vec<usize>>> = vec![None; sig.len()];
        for (n, line) in &s.lines {
            let (key, rest) = keyword(line);
            let index = |v: &str, values: &Option<Vec<String>>| {
                values
                    .as_ref()
                    .ok_or_else(|| s.error(*n, "`values` must come first"))?
                    .iter()
                    .position(|x| x == v)
                    .ok_or_else(|| s.error(*n, format!("unknown value `{v}`")))
            };
            match key {
                "language" => {}
                "values" => values = Some(rest.split_whitespace().map(String::from).collect()),
                "designated" => {
                    for v in rest.split_whitespace() {
                        designated.push(index(v, &values)?);
                    }
                }
                "op" => {
                    let (name, entries) = rest
                        .split_once(':')
                        .ok_or_else(|| s.error(*n, "expected `op NAME : entries`"))?;
                    let c = sig
                        .index_of(name.trim())
                        .ok_or_else(|| s.error(*n, format!("unknown connective `{}`", name.trim())))?;
                    let table = entries
                        .split_whitespace()
                        .map(|v| index(v, &values))
                        .collect::<Result<Vec<_>, _>>()?;
                    if tables[c].replace(table).is_some() {
                        return Err(s.error(*n, "table given twice"));
                    }
                }
                _ => return Err(s.error(*n, format!("unexpected `{key}`"))),
            }
        }
        let values = values.ok_or_else(|| s.error(s.header_line, "missing `values`"))?;
        let tables = tables
            .into_iter()
            .zip(sig.iter())
            .map(|(t, c)| t.ok_or_else(|| s.error(s.header_line, format!("missing table for `{}`", c.name))))
            .collect::<Result<Vec<_>, _>>()?;
        Matrix::new(sig, values, designated, tables).map_err(|e| s.error(s.header_line, e.to_string()))
    }

    fn parse_calculus(&self, s: &Section) -> Result<Calculus, WorkspaceError> {
        let sig = self.sig_line(s)?;
        let mut axioms = Vec::new();
        let mut rules = Vec::new();
        for (n, line) in &s.lines {
            let (key, rest) = keyword(line);
            let parse = |t: &str| sig.parse(t.trim()).map_err(|e| s.error(*n, e.to_string()));
            match key {
                "language" => {}
                "axiom" => {
                    let (name, f) = rest
                        .split_once(':')
                        .ok_or_else(|| s.error(*n, "expected `axiom NAME : formula`"))?;
                    axioms.push((name.trim().to_string(), parse(f)?));
                }
                "rule" => {
                    let (name, body) = rest
                        .split_once(':')
                        .ok_or_else(|| s.error(*n, "expected `rule NAME : premises => conclusion`"))?;
                    let (premises, conclusion) = body
                        .split_once("=>")
                        .ok_or_else(|| s.error(*n, "missing `=>`"))?;
                    let premises = split_top_level(premises, ',')
                        .into_iter()
                        .filter(|p| !p.trim().is_empty())
                        .map(parse)
                        .collect::<Result<Vec<_>, _>>()?;
                    rules.push(Rule {
                        name: name.trim().to_string(),
                        premises,
                        conclusion: parse(conclusion)?,
                    });
                }
                _ => return Err(s.error(*n, format!("unexpected `{key}`"))),
            }
        }
        Calculus::new(sig, axioms, rules).map_err(|e| s.error(s.header_line, e.to_string()))
    }

    fn parse_formula(&self, s: &Section) -> Result<(Signature, Formula), WorkspaceError> {
        let sig = self.sig_line(s)?;
        let (n, line) = s
            .lines
            .iter()
            .find(|(_, l)| keyword(l).0 == "is")
            .ok_or_else(|| s.error(s.header_line, "missing `is` line"))?;
        let f = sig.parse(keyword(line).1).map_err(|e| s.error(*n, e.to_string()))?;
        Ok((sig, f))
    }

    fn parse_derivation(&self, s: &Section) -> Result<(String, Derivation), WorkspaceError> {
        let (n, line) = s
            .lines
            .iter()
            .find(|(_, l)| keyword(l).0 == "calculus")
            .ok_or_else(|| s.error(s.header_line, "missing `calculus` line"))?;
        let cname = keyword(line).1.to_string();
        let calc = self.calculus(&cname).map_err(|e| s.error(*n, e.to_string()))?;
        let sig = calc.signature();
        let mut d = Derivation::default();
        for (n, line) in &s.lines {
            let (key, rest) = keyword(line);
            match key {
                "calculus" => {}
                "step" => d.steps.push(parse_step(sig, rest).map_err(|m| s.error(*n, m))?),
                _ => return Err(s.error(*n, format!("unexpected `{key}`"))),
            }
        }
        Ok((cname, d))
    }

    fn parse_certificate(&self, s: &Section) -> Result<Certificate, WorkspaceError> {
        let get = |k: &str| {
            s.lines
                .iter()
                .find(|(_, l)| keyword(l).0 == k)
                .map(|(n, l)| (*n, keyword(l).1.to_string()))
                .ok_or_else(|| s.error(s.header_line, format!("missing `{k}` line")))
        };
        let (nc, cname) = get("calculus")?;
        let (nm, mname) = get("matrix")?;
        let (nf, ftext) = get("formula")?;
        let (nv, vtext) = get("valuation")?;
        let calculus = self.calculus(&cname).map_err(|e| s.error(nc, e.to_string()))?;
        let matrix = self.matrix(&mname).map_err(|e| s.error(nm, e.to_string()))?;
        let formula = calculus
            .signature()
            .parse(&ftext)
            .map_err(|e| s.error(nf, e.to_string()))?;
        let valuation = matrix
            .parse_valuation(&vtext)
            .map_err(|e| s.error(nv, e.to_string()))?;
        Ok(Certificate {
            calculus,
            matrix,
            formula,
            valuation,
        })
    }

    /// Renders the whole workspace. Languages, matrices and calculi that
    /// other entities need but that have no name yet get one.
    pub fn render(&self) -> String {
        let mut names = Names::new(self);
        let mut body = String::new();
        for (name, m) in &self.matrices {
            render_matrix(&mut body, &mut names, name, m);
        }
        for (name, c) in &self.calculi {
            render_calculus(&mut body, &mut names, name, c);
        }
        for (name, (sig, f)) in &self.formulas {
            let lang = names.language(sig);
            let _ = write!(body, "formula {name}\n  language {lang}\n  is {f}\nend\n\n");
        }
        for (name, k) in &self.kripke {
            body.push_str(&render_kripke(name, k));
            body.push('\n');
        }
        for (name, (calc, d)) in &self.derivations {
            body.push_str(&render_derivation(name, calc, d));
            body.push('\n');
        }
        for (name, cert) in &self.certificates {
            let c = names.calculus(&cert.calculus, name);
            let m = names.matrix(&cert.matrix, name);
            let _ = write!(
                body,
                "certificate {name}\n  calculus {c}\n  matrix {m}\n  formula {}\n  {}\nend\n\n",
                cert.formula,
                format!("valuation {}", cert.matrix.render_valuation(&cert.valuation)).trim_end()
            );
        }
        let mut out = String::new();
        for (name, sig) in &names.languages {
            out.push_str(&render_language(name, sig));
            out.push('\n');
        }
        out.push_str(&names.extra);
        out.push_str(&body);
        while out.ends_with("\n\n") {
            out.pop();
        }
        out
    }
}

/// Names handed out while rendering.
struct Names<'a> {
    ws: &'a Workspace,
    languages: Vec<(String, Signature)>,
    extra_matrices: Vec<(String, Matrix)>,
    extra_calculi: Vec<(String, Calculus)>,
    /// Sections generated for unnamed matrices and calculi.
    extra: String,
}

impl<'a> Names<'a> {
    fn new(ws: &'a Workspace) -> Self {
        Names {
            ws,
            languages: ws.languages.iter().map(|(n, s)| (n.clone(), s.clone())).collect(),
            extra_matrices: Vec::new(),
            extra_calculi: Vec::new(),
            extra: String::new(),
        }
    }

    fn language(&mut self, sig: &Signature) -> String {
        if let Some((n, _)) = self.languages.iter().find(|(_, s)| s == sig) {
            return n.clone();
        }
        if let Some(n) = BUILTIN_LANGUAGES
            .iter()
            .find(|n| builtin_language(n).as_ref() == Some(sig))
        {
            return n.to_string();
        }
        let name = (1..)
            .map(|i| format!("L{i}"))
            .find(|n| !self.languages.iter().any(|(x, _)| x == n) && builtin_language(n).is_none())
            .expect("unbounded");
        self.languages.push((name.clone(), sig.clone()));
        name
    }

    fn matrix(&mut self, m: &Matrix, owner: &str) -> String {
        if let Some((n, _)) = self.ws.matrices.iter().find(|(_, x)| *x == m) {
            return n.clone();
        }
        if let Some((n, _)) = self.extra_matrices.iter().find(|(_, x)| x == m) {
            return n.clone();
        }
        let name = fresh(&format!("{owner}_matrix"), |n| {
            self.ws.matrices.contains_key(n) || builtin_matrix(n).is_some()
        });
        let mut text = String::new();
        render_matrix(&mut text, self, &name, m);
        self.extra.push_str(&text);
        self.extra_matrices.push((name.clone(), m.clone()));
        name
    }

    fn calculus(&mut self, c: &Calculus, owner: &str) -> String {
        if let Some((n, _)) = self.ws.calculi.iter().find(|(_, x)| *x == c) {
            return n.clone();
        }
        if let Some(n) = BUILTIN_CALCULI
            .iter()
            .find(|n| builtin_calculus(n).ok().as_ref() == Some(c))
        {
            return n.to_string();
        }
        if let Some((n, _)) = self.extra_calculi.iter().find(|(_, x)| x == c) {
            return n.clone();
        }
        let name = fresh(&format!("{owner}_calculus"), |n| {
            self.ws.calculi.contains_key(n) || builtin_calculus(n).is_ok()
        });
        let mut text = String::new();
        render_calculus(&mut text, self, &name, c);
        self.extra.push_str(&text);
        self.extra_calculi.push((name.clone(), c.clone()));
        name
    }
}

fn fresh(base: &str, taken: impl Fn(&str) -> bool) -> String {
    if !taken(base) {
        return base.to_string();
    }
    (2..)
        .map(|i| format!("{base}{i}"))
        .find(|n| !taken(n))
        .expect("unbounded")
}

fn render_language(name: &str, sig: &Signature) -> String {
    let mut out = format!("language {name}\n");
    for c in sig.iter() {
        let _ = writeln!(out, "  op {} {}", c.name, c.arity);
    }
    out.push_str("end\n");
    out
}

fn render_matrix(out: &mut String, names: &mut Names, name: &str, m: &Matrix) {
    let lang = names.language(m.signature());
    let _ = write!(out, "matrix {name}\n  language {lang}\n{m}end\n\n");
}

fn render_calculus(out: &mut String, names: &mut Names, name: &str, c: &Calculus) {
    let lang = names.language(c.signature());
    let _ = write!(out, "calculus {name}\n  language {lang}\n");
    for (a, f) in c.axioms() {
        let _ = writeln!(out, "  axiom {a} : {f}");
    }
    for r in c.rules() {
        let _ = writeln!(out, "  rule {r}");
    }
    out.push_str("end\n\n");
}

/// A `matrix` section for a single matrix.
pub fn render_matrix_section(name: &str, m: &Matrix) -> String {
    let mut ws = Workspace::default();
    ws.matrices.insert(name.to_string(), m.clone());
    ws.render()
}

pub fn render_kripke(name: &str, k: &KripkeModel) -> String {
    let w = k.worlds();
    let mut out = format!("kripke {name}\n  worlds {}\n", w.join(" "));
    for (a, b) in k.relation() {
        let _ = writeln!(out, "  rel {} {}", w[a], w[b]);
    }
    let _ = writeln!(out, "  mode {}", k.mode());
    if let Some(r) = k.root() {
        let _ = writeln!(out, "  root {}", w[r]);
    }
    for (var, ws) in k.assignment() {
        let names: Vec<&str> = ws.iter().map(|&i| w[i].as_str()).collect();
        let _ = writeln!(out, "  P {var} : {}", names.join(" "));
    }
    out.push_str("end\n");
    out
}

pub fn render_derivation(name: &str, calculus: &str, d: &Derivation) -> String {
    let mut out = format!("derivation {name}\n  calculus {calculus}\n");
    for step in &d.steps {
        let (just, subst) = match &step.justification {
            Justification::Axiom { name, subst } => (format!("axiom {name}"), subst),
            Justification::Rule { name, premises, subst } => {
                let mut j = format!("rule {name}");
                for p in premises {
                    let _ = write!(j, " {p}");
                }
                (j, subst)
            }
        };
        let _ = write!(out, "  step {} by {just}", step.formula);
        if let Some(s) = subst {
            let parts: Vec<String> = s.iter().map(|(v, f)| format!("{v}={f}")).collect();
            let _ = write!(out, " with {}", parts.join("; "));
        }
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

fn insert<T>(
    map: &mut BTreeMap<String, T>,
    kind: &'static str,
    s: &Section,
    value: T,
) -> Result<(), WorkspaceError> {
    if map.contains_key(&s.name) {
        return Err(WorkspaceError::Duplicate {
            kind,
            name: s.name.clone(),
        });
    }
    map.insert(s.name.clone(), value);
    Ok(())
}

fn unknown(kind: &'static str, name: &str) -> WorkspaceError {
    WorkspaceError::Unknown {
        kind,
        name: name.to_string(),
    }
}

fn parse_language(s: &Section) -> Result<Signature, WorkspaceError> {
    let mut conns = Vec::new();
    for (n, line) in &s.lines {
        let mut words = line.split_whitespace();
        match (words.next(), words.next(), words.next(), words.next()) {
            (Some("op"), Some(name), Some(arity), None) => {
                let arity = arity
                    .parse::<usize>()
                    .map_err(|_| s.error(*n, format!("bad arity `{arity}`")))?;
                conns.push((name.to_string(), arity));
            }
            _ => return Err(s.error(*n, "expected `op NAME ARITY`")),
        }
    }
    Signature::new(conns).map_err(|e| s.error(s.header_line, e.to_string()))
}

fn parse_kripke(s: &Section) -> Result<KripkeModel, WorkspaceError> {
    let mut worlds: Vec<String> = Vec::new();
    let mut rel = Vec::new();
    let mut mode = None;
    let mut root = None;
    let mut p: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (n, line) in &s.lines {
        let (key, rest) = keyword(line);
        let world = |w: &str, worlds: &[String]| {
            worlds
                .iter()
                .position(|x| x == w)
                .ok_or_else(|| s.error(*n, format!("unknown world `{w}`")))
        };
        match key {
            "worlds" => worlds = rest.split_whitespace().map(String::from).collect(),
            "rel" => {
                let ws: Vec<&str> = rest.split_whitespace().collect();
                if ws.len() % 2 != 0 || ws.is_empty() {
                    return Err(s.error(*n, "expected pairs of worlds"));
                }
                for pair in ws.chunks(2) {
                    rel.push((world(pair[0], &worlds)?, world(pair[1], &worlds)?));
                }
            }
            "mode" => mode = Some(rest.parse::<Mode>().map_err(|e| s.error(*n, e.to_string()))?),
            "root" => root = Some(world(rest, &worlds)?),
            "P" => {
                let (var, ws) = rest
                    .split_once(':')
                    .ok_or_else(|| s.error(*n, "expected `P VAR : worlds`"))?;
                let ws = ws
                    .split_whitespace()
                    .map(|w| world(w, &worlds))
                    .collect::<Result<Vec<_>, _>>()?;
                p.insert(var.trim().to_string(), ws);
            }
            _ => return Err(s.error(*n, format!("unexpected `{key}`"))),
        }
    }
    let mode = mode.ok_or_else(|| s.error(s.header_line, "missing `mode`"))?;
    KripkeModel::new(worlds, &rel, p, mode, root).map_err(|e| s.error(s.header_line, e.to_string()))
}

fn parse_step(sig: &Signature, text: &str) -> Result<Step, String> {
    let (formula, just) = text
        .split_once(" by ")
        .ok_or("expected `step FORMULA by axiom NAME` or `step FORMULA by rule NAME N...`")?;
    let formula = sig.parse(formula.trim()).map_err(|e| e.to_string())?;
    let (just, subst) = match just.split_once(" with ") {
        Some((j, s)) => (j, Some(parse_subst(sig, s)?)),
        None => (just, None),
    };
    let mut words = just.split_whitespace();
    let justification = match (words.next(), words.next()) {
        (Some("axiom"), Some(name)) if words.clone().next().is_none() => Justification::Axiom {
            name: name.to_string(),
            subst,
        },
        (Some("rule"), Some(name)) => Justification::Rule {
            name: name.to_string(),
            premises: words
                .map(|w| w.parse::<usize>().map_err(|_| format!("bad step number `{w}`")))
                .collect::<Result<_, _>>()?,
            subst,
        },
        _ => return Err(format!("bad justification `{just}`")),
    };
    Ok(Step {
        formula,
        justification,
    })
}

fn parse_subst(sig: &Signature, text: &str) -> Result<Substitution, String> {
    let mut s = Substitution::new();
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (v, f) = part.split_once('=').ok_or_else(|| format!("bad binding `{part}`"))?;
        s.insert(v.trim(), sig.parse(f.trim()).map_err(|e| e.to_string())?);
    }
    Ok(s)
}

/// Splits at `sep` outside parentheses.
fn split_top_level(text: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&text[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{ipc, k_calculus};
    use crate::matrix::{product, t3};

    const SAMPLE: &str = "\
# a small workspace
language L
  op imp 2
  op bot 0
end

matrix M
  language L
  values 0 1
  designated 0
  op imp : 0 1 0 0
  op bot : 1
end

calculus C
  language L
  axiom k : imp(A,imp(B,A))
  rule MP : A, imp(A,B) => B
end

formula F
  language L
  is imp(X,X)
end

kripke T
  worlds r a b
  rel r r
  rel r a r b
  rel a a
  rel b b
  mode intuitionistic
  root r
  P X : b
  P Y : a
end

derivation D
  calculus C
  step imp(X,imp(X,X)) by axiom k
  step imp(X,imp(Y,X)) by axiom k with A=X; B=Y
end

certificate Z
  calculus C
  matrix M
  formula bot
  valuation
end
";

    #[test]
    fn parses_every_section() {
        let ws = Workspace::parse(SAMPLE).unwrap();
        let m = ws.matrix("M").unwrap();
        assert_eq!(m, godel_imp_bot(2).unwrap());
        let c = ws.calculus("C").unwrap();
        assert_eq!(c.rules().len(), 1);
        assert_eq!(c.rules()[0].premises.len(), 2);
        assert_eq!(ws.formulas["F"].1.to_string(), "imp(X,X)");
        let k = ws.kripke_model("T").unwrap();
        assert_eq!(k.matrix_of().unwrap(), t3());
        let (calc, d) = &ws.derivations["D"];
        assert_eq!(calc, "C");
        assert_eq!(c.check_derivation(d), Ok(()));
        assert!(ws.certificates["Z"].valuation.is_empty());
    }

    #[test]
    fn render_round_trips() {
        let mut ws = Workspace::parse(SAMPLE).unwrap();
        ws.matrices.insert("P".into(), product(&t3(), &godel(2).unwrap().reduct(&ipc_signature()).unwrap()).unwrap());
        ws.calculi.insert("IPCcopy".into(), ipc());
        ws.certificates.insert(
            "Y".into(),
            Certificate {
                calculus: k_calculus(false),
                matrix: k_matrix(3).unwrap(),
                formula: k_signature().parse("eq(circ(X),X)").unwrap(),
                valuation: BTreeMap::from([("X".to_string(), 1)]),
            },
        );
        let text = ws.render();
        let back = Workspace::parse(&text).unwrap();
        for (kind_eq, name) in [
            (back.matrices["M"] == ws.matrices["M"], "M"),
            (back.matrices["P"] == ws.matrices["P"], "P"),
            (back.calculi["IPCcopy"] == ipc(), "IPCcopy"),
            (back.formulas["F"] == ws.formulas["F"], "F"),
            (back.kripke["T"] == ws.kripke["T"], "T"),
            (back.derivations["D"] == ws.derivations["D"], "D"),
            (back.certificates["Y"] == ws.certificates["Y"], "Y"),
            (back.certificates["Z"] == ws.certificates["Z"], "Z"),
        ] {
            assert!(kind_eq, "{name} differs after round trip");
        }
        let again = back.render();
        assert_eq!(Workspace::parse(&again).unwrap().render(), again);
    }

    #[test]
    fn builtins_resolve() {
        let ws = Workspace::new();
        assert_eq!(ws.matrix("G4").unwrap(), godel(4).unwrap());
        assert_eq!(ws.matrix("G3TOP").unwrap(), godel_top(3).unwrap());
        assert_eq!(ws.matrix("G3IB").unwrap(), godel_imp_bot(3).unwrap());
        assert_eq!(ws.matrix("M3").unwrap(), k_matrix(3).unwrap());
        assert_eq!(ws.matrix("T3").unwrap(), t3());
        assert_eq!(ws.calculus("KNoR2").unwrap(), k_calculus(false));
        assert!(ws.matrix("G").is_err());
        assert!(ws.matrix("G+3").is_err());
        assert_eq!(ws.kripke_model("CHAIN4").unwrap().worlds().len(), 4);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "matrix M\n  language IB\n  values 0 1\n  designated 2\nend\n";
        match Workspace::parse(bad) {
            Err(WorkspaceError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            Workspace::parse("matrix M\n  language IB\n"),
            Err(WorkspaceError::Parse { line: 1, .. })
        ));
        let dup = "formula F\n language IB\n is bot\nend\nformula F\n language IB\n is bot\nend\n";
        assert!(matches!(
            Workspace::parse(dup),
            Err(WorkspaceError::Duplicate { .. })
        ));
        assert!(matches!(
            Workspace::parse("matrix M\n language Nope\nend\n"),
            Err(WorkspaceError::Parse { line: 2, .. })
        ));
    }
}
