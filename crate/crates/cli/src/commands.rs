use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use bernays_core::kripke::{approx_chain, lindenbaum_matrix, KripkeError, MatrixOracle};
use bernays_core::matrix::{iso, phi, product_all, quotient, Assignment, InfiniteGodel, QuotientError};
use bernays_core::normality::is_cover;
use bernays_core::search::{
    check_certificate, compare_with_hints, enumerate_covers, matrix_count, mc_member, minimal_covers,
    separating_formula_with_hints, McVerdict, MatrixCursor,
};
use bernays_core::workspace::Workspace;
use bernays_core::{Certificate, Formula, Matrix, Signature, Tautology, Valuation};
use serde_json::{Map, Value};

use crate::{Cli, Command, Pair};

pub const OK: u8 = 0;
pub const NEGATIVE: u8 = 1;
pub const UNKNOWN: u8 = 2;

/// What a command reports. Every text line has a structured twin.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: u8,
    pub lines: Vec<(String, String)>,
    pub json: Map<String, Value>,
    /// Workspace text produced by the command.
    pub artifact: Option<String>,
}

impl Outcome {
    fn new(code: u8) -> Self {
        Outcome {
            code,
            ..Outcome::default()
        }
    }

    pub fn line(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        let value = value.into();
        self.json.insert(key.to_string(), Value::String(value.clone()));
        self.lines.push((key.to_string(), value));
        self
    }

    fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.json.insert(key.to_string(), Value::Bool(value));
        self.lines.push((key.to_string(), value.to_string()));
        self
    }

    fn number(&mut self, key: &str, value: u64) -> &mut Self {
        self.json.insert(key.to_string(), value.into());
        self.lines.push((key.to_string(), value.to_string()));
        self
    }

    fn list(&mut self, key: &str, items: Vec<String>) -> &mut Self {
        self.lines.push((key.to_string(), items.join("; ")));
        self.json
            .insert(key.to_string(), Value::Array(items.into_iter().map(Value::String).collect()));
        self
    }

    fn artifact(&mut self, text: String) -> &mut Self {
        self.artifact = Some(text);
        self
    }
}

fn load(cli: &Cli) -> Result<Workspace> {
    let mut texts = Vec::new();
    for path in &cli.files {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        texts.push((path.display().to_string(), text));
    }
    let sources: Vec<(&str, &str)> = texts.iter().map(|(p, t)| (p.as_str(), t.as_str())).collect();
    Ok(Workspace::parse_sources(&sources)?)
}

fn matrix_section(name: &str, m: &Matrix) -> String {
    bernays_core::workspace::render_matrix_section(name, m)
}

fn certificate_section(name: &str, cert: &Certificate) -> String {
    let mut ws = Workspace::new();
    ws.certificates.insert(name.to_string(), cert.clone());
    ws.render()
}

fn countermodel(m: &Matrix, f: &Formula) -> Result<Option<Valuation>> {
    Ok(match m.tautology(f)? {
        Tautology::Valid => None,
        Tautology::Countermodel(v) => Some(v),
    })
}

fn formula(ws: &Workspace, text: &str, sig: &Signature) -> Result<Formula> {
    ws.formula(text, sig).with_context(|| format!("bad formula `{text}`"))
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let ws = load(cli)?;
    let budget = &cli.budget;
    let out = match &cli.command {
        Command::Eval { mf, valuation } => {
            let m = ws.matrix(&mf.matrix)?;
            let f = formula(&ws, &mf.formula, m.signature())?;
            let v = m.parse_valuation(valuation)?;
            let value = m.evaluate(&v, &f)?;
            let mut o = Outcome::new(OK);
            o.line("value", m.name(value)).flag("designated", m.is_designated(value));
            o
        }
        Command::Taut { mf } => {
            let m = ws.matrix(&mf.matrix)?;
            let f = formula(&ws, &mf.formula, m.signature())?;
            match countermodel(&m, &f)? {
                None => {
                    let mut o = Outcome::new(OK);
                    o.flag("tautology", true);
                    o
                }
                Some(v) => {
                    let mut o = Outcome::new(NEGATIVE);
                    o.flag("tautology", false).line("countermodel", m.render_valuation(&v));
                    o
                }
            }
        }
        Command::Product { matrices, name } => {
            let ms = matrices.iter().map(|n| ws.matrix(n)).collect::<Result<Vec<_>, _>>()?;
            let p = product_all(&ms)?;
            let mut o = Outcome::new(OK);
            o.number("values", p.len() as u64).artifact(matrix_section(name, &p));
            o
        }
        Command::Phi { mf, valuation, name } => run_phi(&ws, mf, valuation.as_deref(), name)?,
        Command::Quotient {
            matrix,
            partition,
            name,
        } => {
            let m = ws.matrix(matrix)?;
            let blocks = partition
                .split('|')
                .map(|b| {
                    b.split_whitespace()
                        .map(|v| m.value_index(v).ok_or_else(|| anyhow!("unknown value `{v}`")))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            match quotient(&m, &blocks) {
                Ok(q) => {
                    let mut o = Outcome::new(OK);
                    o.number("values", q.len() as u64).artifact(matrix_section(name, &q));
                    o
                }
                Err(e @ QuotientError::InvalidPartition(_)) => return Err(e.into()),
                Err(e) => {
                    let mut o = Outcome::new(NEGATIVE);
                    o.line("refused", e.to_string());
                    o
                }
            }
        }
        Command::Iso { first, second } => {
            let (a, b) = (ws.matrix(first)?, ws.matrix(second)?);
            match iso(&a, &b)? {
                Some(h) => {
                    let pairs = h
                        .iter()
                        .enumerate()
                        .map(|(x, &y)| format!("{}->{}", a.name(x), b.name(y)))
                        .collect();
                    let mut o = Outcome::new(OK);
                    o.flag("isomorphic", true).list("bijection", pairs);
                    o
                }
                None => {
                    let mut o = Outcome::new(NEGATIVE);
                    o.flag("isomorphic", false);
                    o
                }
            }
        }
        Command::Cover { calculus, matrix } => {
            let (c, m) = (ws.calculus(calculus)?, ws.matrix(matrix)?);
            match is_cover(&c, &m)? {
                None => {
                    let mut o = Outcome::new(OK);
                    o.flag("cover", true);
                    o
                }
                Some(fail) => {
                    let mut o = Outcome::new(NEGATIVE);
                    o.flag("cover", false)
                        .line("failure", fail.to_string())
                        .line("witness", m.render_valuation(fail.valuation()));
                    o
                }
            }
        }
        Command::CheckDerivation { derivation } => {
            let (cname, d) = ws
                .derivations
                .get(derivation)
                .ok_or_else(|| anyhow!("unknown derivation `{derivation}`"))?;
            let c = ws.calculus(cname)?;
            match c.check_derivation(d) {
                Ok(()) => {
                    let mut o = Outcome::new(OK);
                    o.flag("valid", true);
                    if let Some(f) = d.conclusion() {
                        o.line("conclusion", f.to_string());
                    }
                    o
                }
                Err(e) => {
                    let mut o = Outcome::new(NEGATIVE);
                    o.flag("valid", false).line("error", e.to_string());
                    o
                }
            }
        }
        Command::Analytic { calculus } => {
            let c = ws.calculus(calculus)?;
            match c.is_analytic() {
                Ok(()) => {
                    let mut o = Outcome::new(OK);
                    o.flag("analytic", true);
                    o
                }
                Err(bad) => {
                    let mut o = Outcome::new(NEGATIVE);
                    o.flag("analytic", false)
                        .list("offenders", bad.iter().map(|(r, p)| format!("{r}: {p}")).collect());
                    o
                }
            }
        }
        Command::Enumerate {
            language,
            calculus,
            values,
            all,
            list,
        } => run_enumerate(&ws, language.as_deref(), calculus.as_deref(), *values, !*all, *list, cli)?,
        Command::MinimalCovers { calculus, values } => {
            let c = ws.calculus(calculus)?;
            let r = minimal_covers(&c, *values, budget)?;
            let mut o = Outcome::new(if r.definitive { OK } else { UNKNOWN });
            o.number("examined", r.examined)
                .number("covers", r.covers as u64)
                .number("minimal", r.matrices.len() as u64)
                .flag("definitive", r.definitive);
            let text: String = r
                .matrices
                .iter()
                .enumerate()
                .map(|(i, m)| matrix_section(&format!("min{}", i + 1), m) + "\n")
                .collect();
            o.artifact(text);
            o
        }
        Command::Separate { pair, calculus } => run_separate(&ws, pair, calculus.as_deref(), cli)?,
        Command::Compare { pair } => {
            let (a, b) = (ws.matrix(&pair.first)?, ws.matrix(&pair.second)?);
            let hints = pair
                .hints
                .iter()
                .map(|h| formula(&ws, h, a.signature()))
                .collect::<Result<Vec<_>>>()?;
            let r = compare_with_hints(&a, &b, &hints, budget)?;
            let mut o = Outcome::new(if r.definitive { OK } else { UNKNOWN });
            o.line("relation", r.relation.to_string()).flag("definitive", r.definitive);
            for (key, s) in [("forward", &r.forward), ("backward", &r.backward)] {
                let shown = match &s.formula {
                    Some(f) => f.to_string(),
                    None if s.definitive => "none".into(),
                    None => "unknown".into(),
                };
                o.line(key, format!("{shown} ({})", s.engine));
            }
            o
        }
        Command::Mc { calculus, formula: text } => {
            let c = ws.calculus(calculus)?;
            let f = formula(&ws, text, c.signature())?;
            match mc_member(&c, &f, budget)? {
                McVerdict::In {
                    definitive,
                    searched_up_to,
                } => {
                    let mut o = Outcome::new(if definitive { OK } else { UNKNOWN });
                    o.line("verdict", "in")
                        .flag("definitive", definitive)
                        .number("searched_up_to", searched_up_to as u64);
                    o
                }
                McVerdict::Out(cert) => {
                    let mut o = Outcome::new(NEGATIVE);
                    o.line("verdict", "out")
                        .number("values", cert.matrix.len() as u64)
                        .line("countermodel", cert.matrix.render_valuation(&cert.valuation))
                        .artifact(certificate_section("cert", &cert));
                    o
                }
                McVerdict::Unknown { reached } => {
                    let mut o = Outcome::new(UNKNOWN);
                    o.line("verdict", "unknown").number("reached", reached as u64);
                    o
                }
            }
        }
        Command::Certify { certificate } => {
            let cert = ws
                .certificates
                .get(certificate)
                .ok_or_else(|| anyhow!("unknown certificate `{certificate}`"))?;
            match check_certificate(cert) {
                Ok(()) => {
                    let mut o = Outcome::new(NEGATIVE);
                    o.flag("valid", true).line("underivable", cert.formula.to_string());
                    o
                }
                Err(e) => {
                    let mut o = Outcome::new(UNKNOWN);
                    o.flag("valid", false).line("reason", e.to_string());
                    o
                }
            }
        }
        Command::KripkeEval { kripke, formula: text } => {
            let k = ws.kripke_model(kripke)?;
            let f = formula(&ws, text, &k.signature())?;
            let bits = (0..k.worlds().len())
                .map(|w| Ok(format!("{}={}", k.worlds()[w], u8::from(k.eval_world(w, &f)?))))
                .collect::<Result<Vec<_>, KripkeError>>()?;
            let holds = k.holds(&f)?;
            let mut o = Outcome::new(if holds { OK } else { NEGATIVE });
            o.list("worlds", bits).flag("holds", holds);
            o
        }
        Command::Kripke2matrix { kripke, name } => {
            let k = ws.kripke_model(kripke)?;
            let m = k.matrix_of()?;
            let mut o = Outcome::new(OK);
            o.number("values", m.len() as u64);
            if !k.assignment().is_empty() {
                o.line("valuation", m.render_valuation(&k.kripke_valuation()));
            }
            o.artifact(matrix_section(name, &m));
            o
        }
        Command::ApproxChain {
            models,
            candidates,
            length,
            name,
        } => {
            let ks = models.iter().map(|n| ws.kripke_model(n)).collect::<Result<Vec<_>, _>>()?;
            let sig = ks[0].signature();
            let fs = candidates
                .iter()
                .map(|c| formula(&ws, c, &sig))
                .collect::<Result<Vec<_>>>()?;
            let n = length.unwrap_or(fs.len());
            match approx_chain(&ks, fs, n) {
                Ok(chain) => {
                    let mut o = Outcome::new(OK);
                    o.list("values", chain.iter().map(|m| m.len().to_string()).collect());
                    if let Some(last) = chain.last() {
                        o.artifact(matrix_section(name, last));
                    }
                    o
                }
                Err(e @ KripkeError::NoRefutingModel(_)) => {
                    let mut o = Outcome::new(NEGATIVE);
                    o.line("refused", e.to_string());
                    o
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Lindenbaum {
            matrix,
            depth,
            vars,
            name,
        } => {
            let oracle = MatrixOracle(ws.matrix(matrix)?);
            match lindenbaum_matrix(&oracle, *depth, *vars) {
                Ok(m) => {
                    let mut o = Outcome::new(OK);
                    o.number("values", m.len() as u64)
                        .number("designated", m.designated().count() as u64)
                        .artifact(matrix_section(name, &m));
                    o
                }
                Err(e @ KripkeError::TooManyValues(..)) => {
                    let mut o = Outcome::new(UNKNOWN);
                    o.line("refused", e.to_string());
                    o
                }
                Err(e) => return Err(e.into()),
            }
        }
    };
    Ok(out)
}

fn run_phi(ws: &Workspace, mf: &crate::MatrixFormula, valuation: Option<&str>, name: &str) -> Result<Outcome> {
    let result = if mf.matrix == "GINF" {
        let host = InfiniteGodel::new();
        let f = formula(ws, &mf.formula, bernays_core::matrix::Evaluator::signature(&host))?;
        let text = valuation.ok_or_else(|| anyhow!("the infinite host needs --valuation"))?;
        let mut a: Assignment<u64> = BTreeMap::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (var, v) = part.split_once('=').ok_or_else(|| anyhow!("bad binding `{part}`"))?;
            let v = match v.trim() {
                "bottom" => u64::MAX,
                n => n.parse().with_context(|| format!("bad value `{n}`"))?,
            };
            a.insert(var.trim().to_string(), v);
        }
        phi(&host, &f, &a)
    } else {
        let m = ws.matrix(&mf.matrix)?;
        let f = formula(ws, &mf.formula, m.signature())?;
        let a = match valuation {
            Some(text) => m.parse_valuation(text)?,
            None => match countermodel(&m, &f)? {
                Some(v) => v,
                None => bail!("`{f}` is a tautology of `{}`; nothing to compress", mf.matrix),
            },
        };
        phi(&m, &f, &a)
    };
    let r = result?;
    let mut o = Outcome::new(OK);
    o.number("values", r.matrix.len() as u64)
        .line("countermodel", r.matrix.render_valuation(&r.valuation))
        .artifact(matrix_section(name, &r.matrix));
    Ok(o)
}

fn run_enumerate(
    ws: &Workspace,
    language: Option<&str>,
    calculus: Option<&str>,
    values: usize,
    reduce: bool,
    list: bool,
    cli: &Cli,
) -> Result<Outcome> {
    let budget = &cli.budget;
    let (found, examined, complete, sig) = match calculus {
        Some(c) => {
            let c = ws.calculus(c)?;
            let sweep = enumerate_covers(&c, values, reduce, budget)?;
            (sweep.covers, sweep.examined, sweep.complete, c.signature().clone())
        }
        None => {
            let sig = ws.language(language.ok_or_else(|| anyhow!("give --language or --calculus"))?)?;
            let mut cursor = MatrixCursor::new(&sig, values, reduce);
            let mut found = Vec::new();
            let mut examined = 0u64;
            let mut complete = true;
            loop {
                if examined >= budget.max_candidates {
                    complete = cursor.advance().is_none();
                    break;
                }
                let Some(m) = cursor.advance() else { break };
                examined += 1;
                if list {
                    found.push(m.clone());
                }
            }
            if !list {
                found.clear();
            }
            (found, examined, complete, sig)
        }
    };
    let mut o = Outcome::new(if complete { OK } else { UNKNOWN });
    if let Some(total) = matrix_count(&sig, values) {
        o.line("space", total.to_string());
    }
    o.number("examined", examined).flag("complete", complete);
    if calculus.is_some() {
        o.number("covers", found.len() as u64);
    }
    if list {
        let text: String = found
            .iter()
            .enumerate()
            .map(|(i, m)| matrix_section(&format!("e{}", i + 1), m) + "\n")
            .collect();
        o.artifact(text);
    }
    Ok(o)
}

fn run_separate(ws: &Workspace, pair: &Pair, calculus: Option<&str>, cli: &Cli) -> Result<Outcome> {
    let (a, b) = (ws.matrix(&pair.first)?, ws.matrix(&pair.second)?);
    let hints = pair
        .hints
        .iter()
        .map(|h| formula(ws, h, a.signature()))
        .collect::<Result<Vec<_>>>()?;
    let s = separating_formula_with_hints(&a, &b, &hints, &cli.budget)?;
    let mut o = match (&s.formula, s.definitive) {
        (Some(f), _) => {
            let v = countermodel(&a, f)?
                .ok_or_else(|| anyhow!("separator `{f}` is not falsified"))?;
            let mut o = Outcome::new(NEGATIVE);
            o.line("separator", f.to_string())
                .line("countermodel", a.render_valuation(&v));
            if let Some(cname) = calculus {
                let c = ws.calculus(cname)?;
                if is_cover(&c, &a)?.is_none() {
                    let cert = Certificate {
                        calculus: c,
                        matrix: a.clone(),
                        formula: f.clone(),
                        valuation: v,
                    };
                    o.artifact(certificate_section("cert", &cert));
                } else {
                    o.line("certificate", format!("none: `{}` is not a cover of `{cname}`", pair.first));
                }
            }
            o
        }
        (None, true) => {
            let mut o = Outcome::new(OK);
            o.line("separator", "none");
            o
        }
        (None, false) => {
            let mut o = Outcome::new(UNKNOWN);
            o.line("separator", "unknown");
            o
        }
    };
    o.line("engine", s.engine.to_string());
    Ok(o)
}
