//! Propositional syntax: signatures, formulas, substitution and matching.
//!
//! Formulas use a prefix notation with no precedence rules:
//!
//! ```text
//! formula := VAR | NAME | NAME "(" formula ("," formula)* ")"
//! VAR     := [A-Z][A-Za-z0-9_]*
//! NAME    := [a-z][a-z0-9_]*
//! ```
//!
//! Zero-arity connectives are written bare (`bot`), never `bot()`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::odometer::Odometer;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown connective `{0}`")]
    UnknownConnective(String),
    #[error("connective `{name}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("connective `{0}` declared twice")]
    DuplicateConnective(String),
    #[error("`{0}` is not a valid connective name")]
    BadConnectiveName(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Connective {
    pub name: String,
    pub arity: usize,
}

/// An ordered inventory of connectives. Iteration order is declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    connectives: Vec<Connective>,
}

impl Signature {
    pub fn new<S: Into<String>>(
        connectives: impl IntoIterator<Item = (S, usize)>,
    ) -> Result<Self, LangError> {
        let mut sig = Signature::default();
        for (name, arity) in connectives {
            sig.push(name.into(), arity)?;
        }
        Ok(sig)
    }

    fn push(&mut self, name: String, arity: usize) -> Result<(), LangError> {
        if !is_connective_name(&name) {
            return Err(LangError::BadConnectiveName(name));
        }
        if self.index_of(&name).is_some() {
            return Err(LangError::DuplicateConnective(name));
        }
        self.connectives.push(Connective { name, arity });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.connectives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.connectives.is_empty()
    }

    pub fn get(&self, index: usize) -> &Connective {
        &self.connectives[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Connective> {
        self.connectives.iter()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.connectives.iter().position(|c| c.name == name)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.index_of(name).map(|i| self.connectives[i].arity)
    }

    /// Checks that every application in `f` uses a declared connective at its arity.
    pub fn check(&self, f: &Formula) -> Result<(), LangError> {
        match f {
            Formula::Var(_) => Ok(()),
            Formula::App(name, args) => {
                let expected = self
                    .arity(name)
                    .ok_or_else(|| LangError::UnknownConnective(name.clone()))?;
                if expected != args.len() {
                    return Err(LangError::ArityMismatch {
                        name: name.clone(),
                        expected,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check(a))
            }
        }
    }

    /// Parses `text` as a formula over this signature.
    pub fn parse(&self, text: &str) -> Result<Formula, LangError> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
            sig: self,
        };
        let f = p.formula()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(f)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.connectives.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}/{}", c.name, c.arity)?;
        }
        Ok(())
    }
}

pub fn is_variable_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn is_connective_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(String),
    App(String, Vec<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Self {
        Formula::Var(name.into())
    }

    pub fn app(name: impl Into<String>, args: Vec<Formula>) -> Self {
        Formula::App(name.into(), args)
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Formula::App(name.into(), Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Formula::Var(_))
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Var(v) => {
                out.insert(v.clone());
            }
            Formula::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Variables in order of first occurrence, left to right.
    pub fn vars_in_order(&self, out: &mut Vec<String>) {
        match self {
            Formula::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Formula::App(_, args) => args.iter().for_each(|a| a.vars_in_order(out)),
        }
    }

    /// Connective nesting depth; variables and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Var(_) => 0,
            Formula::App(_, args) if args.is_empty() => 0,
            Formula::App(_, args) => 1 + args.iter().map(Formula::depth).max().unwrap_or(0),
        }
    }

    /// Distinct subformulas in post-order, ending with `self`.
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        self.collect_subformulas(&mut seen, &mut out);
        out
    }

    fn collect_subformulas<'a>(&'a self, seen: &mut HashSet<&'a Formula>, out: &mut Vec<Formula>) {
        if seen.contains(self) {
            return;
        }
        if let Formula::App(_, args) = self {
            for a in args {
                a.collect_subformulas(seen, out);
            }
        }
        seen.insert(self);
        out.push(self.clone());
    }

    /// Number of distinct subformulas plus one.
    pub fn xi(&self) -> u64 {
        self.subformulas().len() as u64 + 1
    }

    pub fn analyze(&self) -> FormulaInfo {
        let subformulas = self.subformulas();
        FormulaInfo {
            vars: self.vars(),
            depth: self.depth(),
            xi: subformulas.len() as u64 + 1,
            subformulas,
        }
    }

    /// Simultaneous substitution; variables outside the map are left alone.
    pub fn substitute(&self, s: &Substitution) -> Formula {
        match self {
            Formula::Var(v) => s.get(v).cloned().unwrap_or_else(|| self.clone()),
            Formula::App(name, args) => {
                Formula::App(name.clone(), args.iter().map(|a| a.substitute(s)).collect())
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) => 1,
            Formula::App(_, args) => 1 + args.iter().map(Formula::size).sum::<usize>(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(v) => f.write_str(v),
            Formula::App(name, args) => {
                f.write_str(name)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaInfo {
    pub vars: BTreeSet<String>,
    pub depth: usize,
    pub subformulas: Vec<Formula>,
    pub xi: u64,
}

/// The product of the individual `xi` values.
pub fn xi_of_list(formulas: &[Formula]) -> u64 {
    formulas.iter().map(Formula::xi).product()
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Substitution(BTreeMap<String, Formula>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: &str) -> Option<&Formula> {
        self.0.get(var)
    }

    pub fn insert(&mut self, var: impl Into<String>, f: Formula) -> Option<Formula> {
        self.0.insert(var.into(), f)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Formula)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<(S, Formula)> for Substitution {
    fn from_iter<T: IntoIterator<Item = (S, Formula)>>(iter: T) -> Self {
        Substitution(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

/// One-sided matching: finds `s` with `pattern.substitute(s) == target`.
pub fn match_pattern(pattern: &Formula, target: &Formula) -> Option<Substitution> {
    let mut s = Substitution::new();
    match_into(pattern, target, &mut s).then_some(s)
}

/// Extends `s` so that `pattern` instantiates to `target`, failing on a
/// binding conflict. On failure `s` may hold partial bindings.
pub fn match_into(pattern: &Formula, target: &Formula, s: &mut Substitution) -> bool {
    match pattern {
        Formula::Var(v) => match s.get(v) {
            Some(bound) => bound == target,
            None => {
                s.insert(v.clone(), target.clone());
                true
            }
        },
        Formula::App(name, args) => match target {
            Formula::App(tname, targs) if tname == name && targs.len() == args.len() => args
                .iter()
                .zip(targs)
                .all(|(p, t)| match_into(p, t, s)),
            _ => false,
        },
    }
}

/// All formulas of depth at most `depth` over the given variables, grouped by
/// depth level and, within a level, by connective and argument order.
pub fn formulas_up_to_depth(sig: &Signature, vars: &[String], depth: usize) -> Vec<Formula> {
    let mut all: Vec<Formula> = vars.iter().map(Formula::var).collect();
    all.extend(
        sig.iter()
            .filter(|c| c.arity == 0)
            .map(|c| Formula::constant(c.name.clone())),
    );
    let mut prev_len = 0;
    for _ in 0..depth {
        let level_start = prev_len;
        let old_len = all.len();
        let mut next = Vec::new();
        for c in sig.iter().filter(|c| c.arity > 0) {
            // tuples over `all[..old_len]` with at least one member from the newest level
            let mut odo = Odometer::new(c.arity, old_len);
            while let Some(idx) = odo.next() {
                if idx.iter().any(|&i| i >= level_start) {
                    let args = idx.iter().map(|&i| all[i].clone()).collect();
                    next.push(Formula::app(c.name.clone(), args));
                }
            }
        }
        prev_len = old_len;
        if next.is_empty() {
            break;
        }
        all.extend(next);
    }
    all
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    sig: &'a Signature,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> LangError {
        LangError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier")
    }

    fn formula(&mut self) -> Result<Formula, LangError> {
        self.skip_ws();
        let start = self.pos;
        let name = self.ident().to_string();
        if name.is_empty() {
            return Err(self.error("expected a variable or connective"));
        }
        if is_variable_name(&name) {
            return Ok(Formula::Var(name));
        }
        if !is_connective_name(&name) {
            self.pos = start;
            return Err(self.error(&format!("malformed identifier `{name}`")));
        }
        let expected = self
            .sig
            .arity(&name)
            .ok_or_else(|| LangError::UnknownConnective(name.clone()))?;
        self.skip_ws();
        let mut args = Vec::new();
        if self.src.get(self.pos) == Some(&b'(') {
            self.pos += 1;
            loop {
                args.push(self.formula()?);
                self.skip_ws();
                match self.src.get(self.pos) {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.error("expected `,` or `)`")),
                }
            }
        }
        if args.len() != expected {
            return Err(LangError::ArityMismatch {
                name,
                expected,
                found: args.len(),
            });
        }
        Ok(Formula::App(name, args))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ipc_sig() -> Signature {
        Signature::new([("imp", 2), ("and", 2), ("or", 2), ("neg", 1)]).unwrap()
    }

    fn p(s: &str) -> Formula {
        Signature::new([("imp", 2), ("and", 2), ("or", 2), ("neg", 1), ("bot", 0)])
            .unwrap()
            .parse(s)
            .unwrap()
    }

    #[test]
    fn parses_nested_application() {
        let f = ipc_sig().parse("imp(A, and(A, A))").unwrap();
        let a = Formula::var("A");
        assert_eq!(
            f,
            Formula::app("imp", vec![a.clone(), Formula::app("and", vec![a.clone(), a])])
        );
        assert_eq!(f.to_string(), "imp(A,and(A,A))");
    }

    #[test]
    fn parses_atoms() {
        assert_eq!(ipc_sig().parse("X1").unwrap(), Formula::var("X1"));
        let sig = Signature::new([("bot", 0)]).unwrap();
        assert_eq!(sig.parse(" bot ").unwrap(), Formula::constant("bot"));
    }

    #[test]
    fn parse_errors() {
        let sig = ipc_sig();
        assert!(matches!(sig.parse("foo(A)"), Err(LangError::UnknownConnective(_))));
        assert!(matches!(
            sig.parse("neg(A, B)"),
            Err(LangError::ArityMismatch { expected: 1, found: 2, .. })
        ));
        assert!(matches!(sig.parse("imp(A,"), Err(LangError::Syntax { .. })));
        assert!(matches!(sig.parse("A B"), Err(LangError::Syntax { pos: 2, .. })));
        assert!(matches!(sig.parse(""), Err(LangError::Syntax { .. })));
    }

    #[test]
    fn bot_with_parens_is_rejected() {
        let sig = Signature::new([("bot", 0)]).unwrap();
        assert!(sig.parse("bot()").is_err());
    }

    #[test]
    fn signature_rejects_duplicates_and_bad_names() {
        assert!(Signature::new([("imp", 2), ("imp", 1)]).is_err());
        assert!(Signature::new([("Imp", 2)]).is_err());
    }

    #[test]
    fn substitution_is_simultaneous() {
        let s: Substitution = [("A", p("X")), ("B", p("X"))].into_iter().collect();
        assert_eq!(p("imp(A,B)").substitute(&s), p("imp(X,X)"));

        let s: Substitution = [("A", p("imp(A,B)"))].into_iter().collect();
        assert_eq!(p("A").substitute(&s), p("imp(A,B)"));

        let s: Substitution = [("A", p("or(X,Y)"))].into_iter().collect();
        assert_eq!(p("and(A,A)").substitute(&s), p("and(or(X,Y),or(X,Y))"));
    }

    #[test]
    fn matching() {
        let s = match_pattern(&p("imp(A,B)"), &p("imp(X,and(X,Y))")).unwrap();
        assert_eq!(s.get("A"), Some(&p("X")));
        assert_eq!(s.get("B"), Some(&p("and(X,Y)")));
        assert_eq!(match_pattern(&p("and(A,A)"), &p("and(X,Y)")), None);
        let s = match_pattern(&p("A"), &p("imp(X,Y)")).unwrap();
        assert_eq!(s.get("A"), Some(&p("imp(X,Y)")));
        assert_eq!(match_pattern(&p("neg(A)"), &p("X")), None);
    }

    #[test]
    fn analysis() {
        let f = p("imp(neg(neg(X)),X)");
        let info = f.analyze();
        assert_eq!(
            info.subformulas,
            vec![p("X"), p("neg(X)"), p("neg(neg(X))"), f.clone()]
        );
        assert_eq!(info.xi, 5);
        assert_eq!(info.depth, 3);
        let x = p("X");
        assert_eq!(x.depth(), 0);
        assert_eq!(x.xi(), 2);
        assert_eq!(xi_of_list(&[f, x]), 10);
        assert_eq!(p("bot").depth(), 0);
    }

    #[test]
    fn enumerates_formulas_by_depth() {
        let sig = Signature::new([("neg", 1), ("or", 2)]).unwrap();
        let vars = vec!["X1".to_string()];
        assert_eq!(formulas_up_to_depth(&sig, &vars, 0).len(), 1);
        let d1 = formulas_up_to_depth(&sig, &vars, 1);
        assert_eq!(
            d1.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            ["X1", "neg(X1)", "or(X1,X1)"]
        );
        // depth 2: 3 + |neg over 3| + |or pairs over 3 with a depth-1 member| = 3 + 2 + 8
        let d2 = formulas_up_to_depth(&sig, &vars, 2);
        assert_eq!(d2.len(), 13);
        assert!(d2.iter().all(|f| f.depth() <= 2));
        let distinct: HashSet<_> = d2.iter().collect();
        assert_eq!(distinct.len(), d2.len());
    }
}
