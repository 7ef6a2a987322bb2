//! Hilbert calculi and derivation checking.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::lang::{match_into, Formula, LangError, Signature, Substitution};
use crate::matrix::{imp_bot_signature, ipc_signature, k_signature};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
}

impl Rule {
    /// Variables in order of first occurrence: premises left to right, then
    /// the conclusion.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        for p in &self.premises {
            p.vars_in_order(&mut out);
        }
        self.conclusion.vars_in_order(&mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    #[error("duplicate {kind} name `{name}`")]
    DuplicateName { kind: &'static str, name: String },
    #[error("unknown calculus `{0}`")]
    UnknownCalculus(String),
    #[error(transparent)]
    Lang(#[from] LangError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Calculus {
    sig: Signature,
    axioms: Vec<(String, Formula)>,
    rules: Vec<Rule>,
}

impl Calculus {
    pub fn new(
        sig: Signature,
        axioms: Vec<(String, Formula)>,
        rules: Vec<Rule>,
    ) -> Result<Self, CalculusError> {
        let mut seen = BTreeSet::new();
        for (name, f) in &axioms {
            if !seen.insert(name.as_str()) {
                return Err(CalculusError::DuplicateName {
                    kind: "axiom",
                    name: name.clone(),
                });
            }
            sig.check(f)?;
        }
        let mut seen = BTreeSet::new();
        for r in &rules {
            if !seen.insert(r.name.as_str()) {
                return Err(CalculusError::DuplicateName {
                    kind: "rule",
                    name: r.name.clone(),
                });
            }
            for p in &r.premises {
                sig.check(p)?;
            }
            sig.check(&r.conclusion)?;
        }
        Ok(Calculus { sig, axioms, rules })
    }

    /// Builds a calculus from schemas in concrete syntax.
    pub fn from_text(
        sig: Signature,
        axioms: &[(&str, &str)],
        rules: &[(&str, &[&str], &str)],
    ) -> Result<Self, CalculusError> {
        let axioms = axioms
            .iter()
            .map(|(n, f)| Ok((n.to_string(), sig.parse(f)?)))
            .collect::<Result<Vec<_>, LangError>>()?;
        let rules = rules
            .iter()
            .map(|(n, ps, c)| {
                Ok(Rule {
                    name: n.to_string(),
                    premises: ps.iter().map(|p| sig.parse(p)).collect::<Result<_, _>>()?,
                    conclusion: sig.parse(c)?,
                })
            })
            .collect::<Result<Vec<_>, LangError>>()?;
        Calculus::new(sig, axioms, rules)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn axioms(&self) -> &[(String, Formula)] {
        &self.axioms
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn axiom(&self, name: &str) -> Option<&Formula> {
        self.axioms.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    /// Checks that every premise of every rule uses only variables of the
    /// rule's conclusion. Returns every offending (rule, premise) pair.
    pub fn is_analytic(&self) -> Result<(), Vec<(String, Formula)>> {
        let mut offenders = Vec::new();
        for r in &self.rules {
            let allowed = r.conclusion.vars();
            for p in &r.premises {
                if !p.vars().is_subset(&allowed) {
                    offenders.push((r.name.clone(), p.clone()));
                }
            }
        }
        if offenders.is_empty() {
            Ok(())
        } else {
            Err(offenders)
        }
    }

    pub fn check_derivation(&self, d: &Derivation) -> Result<(), DerivationError> {
        for (i, step) in d.steps.iter().enumerate() {
            self.check_step(d, i, step)
                .map_err(|reason| DerivationError { step: i + 1, reason })?;
        }
        Ok(())
    }

    fn check_step(&self, d: &Derivation, i: usize, step: &Step) -> Result<(), StepError> {
        self.sig
            .check(&step.formula)
            .map_err(|e| StepError::Arity(e.to_string()))?;
        match &step.justification {
            Justification::Axiom { name, subst } => {
                let schema = self
                    .axiom(name)
                    .ok_or_else(|| StepError::UnknownAxiom(name.clone()))?;
                let ok = match subst {
                    Some(s) => schema.substitute(s) == step.formula,
                    None => match_into(schema, &step.formula, &mut Substitution::new()),
                };
                if ok {
                    Ok(())
                } else {
                    Err(StepError::NoMatch(format!(
                        "not an instance of axiom `{name}`"
                    )))
                }
            }
            Justification::Rule {
                name,
                premises,
                subst,
            } => {
                let rule = self
                    .rule(name)
                    .ok_or_else(|| StepError::UnknownRule(name.clone()))?;
                if premises.len() != rule.premises.len() {
                    return Err(StepError::Arity(format!(
                        "rule `{name}` takes {} premises, {} cited",
                        rule.premises.len(),
                        premises.len()
                    )));
                }
                // cited indices are 1-based step numbers
                let mut cited = Vec::with_capacity(premises.len());
                for &p in premises {
                    if p == 0 || p > i {
                        return Err(StepError::BadReference(p));
                    }
                    cited.push(&d.steps[p - 1].formula);
                }
                let ok = match subst {
                    Some(s) => {
                        rule.conclusion.substitute(s) == step.formula
                            && rule
                                .premises
                                .iter()
                                .zip(&cited)
                                .all(|(p, f)| p.substitute(s) == **f)
                    }
                    None => {
                        let mut s = Substitution::new();
                        rule.premises
                            .iter()
                            .zip(&cited)
                            .all(|(p, f)| match_into(p, f, &mut s))
                            && match_into(&rule.conclusion, &step.formula, &mut s)
                    }
                };
                if ok {
                    Ok(())
                } else {
                    Err(StepError::NoMatch(format!(
                        "no common substitution instantiates rule `{name}`"
                    )))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Axiom {
        name: String,
        subst: Option<Substitution>,
    },
    /// Premises are cited by 1-based step number.
    Rule {
        name: String,
        premises: Vec<usize>,
        subst: Option<Substitution>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Derivation {
    pub steps: Vec<Step>,
}

impl Derivation {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.steps.last().map(|s| &s.formula)
    }

    pub fn axiom(&mut self, formula: Formula, name: &str) -> &mut Self {
        self.steps.push(Step {
            formula,
            justification: Justification::Axiom {
                name: name.to_string(),
                subst: None,
            },
        });
        self
    }

    pub fn rule(&mut self, formula: Formula, name: &str, premises: &[usize]) -> &mut Self {
        self.steps.push(Step {
            formula,
            justification: Justification::Rule {
                name: name.to_string(),
                premises: premises.to_vec(),
                subst: None,
            },
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("{0}")]
    NoMatch(String),
    #[error("step {0} cannot be cited here")]
    BadReference(usize),
    #[error("{0}")]
    Arity(String),
    #[error("unknown axiom `{0}`")]
    UnknownAxiom(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step}: {reason}")]
pub struct DerivationError {
    /// 1-based step number.
    pub step: usize,
    pub reason: StepError,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :", self.name)?;
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, " {p}")?;
        }
        write!(f, " => {}", self.conclusion)
    }
}

const MP: (&str, &[&str], &str) = ("MP", &["A", "imp(A,B)"], "B");

/// Intuitionistic propositional calculus: twelve axioms and modus ponens.
pub fn ipc() -> Calculus {
    Calculus::from_text(
        ipc_signature(),
        &[
            ("a1", "imp(A,and(A,A))"),
            ("a2", "imp(and(A,B),and(B,A))"),
            ("a3", "imp(imp(A,B),imp(and(A,C),and(B,C)))"),
            ("a4", "imp(and(imp(A,B),imp(B,C)),imp(A,C))"),
            ("a5", "imp(B,imp(A,B))"),
            ("a6", "imp(and(A,imp(A,B)),B)"),
            ("a7", "imp(A,or(A,B))"),
            ("a8", "imp(or(A,B),or(B,A))"),
            ("a9", "imp(and(imp(A,C),imp(B,C)),imp(or(A,B),C))"),
            ("a10", "imp(neg(A),imp(A,B))"),
            ("a11", "imp(and(imp(A,B),imp(A,neg(B))),neg(A))"),
            ("a12", "imp(A,imp(B,and(A,B)))"),
        ],
        &[MP],
    )
    .expect("static calculus")
}

/// The implication-falsum fragment: K, S, ex falso and modus ponens.
pub fn ipc_imp_bot() -> Calculus {
    Calculus::from_text(
        imp_bot_signature(),
        &[
            ("k", "imp(A,imp(B,A))"),
            ("s", "imp(imp(A,imp(B,C)),imp(imp(A,B),imp(A,C)))"),
            ("efq", "imp(bot,A)"),
        ],
        &[MP],
    )
    .expect("static calculus")
}

/// The calculus with axiom `eq(X,circ(X))` and rule r1; `with_r2` adds the
/// rule from `eq(X,X)` to anything.
pub fn k_calculus(with_r2: bool) -> Calculus {
    let r1: (&str, &[&str], &str) = ("r1", &["eq(X,Y)"], "eq(X,circ(Y))");
    let r2: (&str, &[&str], &str) = ("r2", &["eq(X,X)"], "Y");
    let rules: &[(&str, &[&str], &str)] = if with_r2 { &[r1, r2] } else { &[r1] };
    Calculus::from_text(k_signature(), &[("ax", "eq(X,circ(X))")], rules).expect("static calculus")
}

pub fn builtin_calculus(name: &str) -> Result<Calculus, CalculusError> {
    match name {
        "IPC" => Ok(ipc()),
        "IPCIB" => Ok(ipc_imp_bot()),
        "K" => Ok(k_calculus(true)),
        "KNoR2" => Ok(k_calculus(false)),
        _ => Err(CalculusError::UnknownCalculus(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `imp(X,X)` from the IPC axioms, via `and(X,Y) -> X` at `Y = X`.
    pub(crate) fn identity_derivation() -> Derivation {
        let sig = ipc_signature();
        let p = |s: &str| sig.parse(s).unwrap();
        let mut d = Derivation::default();
        let a = "and(X,X)";
        let yx = "imp(X,X)";
        let s3 = format!("imp({a},and({yx},X))");
        let s4 = format!("imp(and({yx},X),and(X,{yx}))");
        let s7 = format!("and({s3},{s4})");
        let s9 = format!("imp({a},and(X,{yx}))");
        let s10 = format!("imp(and(X,{yx}),X)");
        let s13 = format!("and({s9},{s10})");
        let s15 = format!("imp({a},X)");
        let s16 = format!("imp(X,{a})");
        let s19 = format!("and({s16},{s15})");
        d.axiom(p(&format!("imp(X,{yx})")), "a5")
            .axiom(p(&format!("imp(imp(X,{yx}),{s3})")), "a3")
            .rule(p(&s3), "MP", &[1, 2])
            .axiom(p(&s4), "a2")
            .axiom(p(&format!("imp({s3},imp({s4},{s7}))")), "a12")
            .rule(p(&format!("imp({s4},{s7})")), "MP", &[3, 5])
            .rule(p(&s7), "MP", &[4, 6])
            .axiom(p(&format!("imp({s7},{s9})")), "a4")
            .rule(p(&s9), "MP", &[7, 8])
            .axiom(p(&s10), "a6")
            .axiom(p(&format!("imp({s9},imp({s10},{s13}))")), "a12")
            .rule(p(&format!("imp({s10},{s13})")), "MP", &[9, 11])
            .rule(p(&s13), "MP", &[10, 12])
            .axiom(p(&format!("imp({s13},{s15})")), "a4")
            .rule(p(&s15), "MP", &[13, 14])
            .axiom(p(&s16), "a1")
            .axiom(p(&format!("imp({s16},imp({s15},{s19}))")), "a12")
            .rule(p(&format!("imp({s15},{s19})")), "MP", &[16, 17])
            .rule(p(&s19), "MP", &[15, 18])
            .axiom(p(&format!("imp({s19},imp(X,X))")), "a4")
            .rule(p("imp(X,X)"), "MP", &[19, 20]);
        d
    }

    #[test]
    fn identity_is_derivable() {
        let d = identity_derivation();
        assert_eq!(ipc().check_derivation(&d), Ok(()));
        assert_eq!(d.conclusion().unwrap().to_string(), "imp(X,X)");
    }

    #[test]
    fn corrupted_step_is_reported() {
        let mut d = identity_derivation();
        d.steps[2].formula = ipc_signature().parse("imp(X,X)").unwrap();
        let err = ipc().check_derivation(&d).unwrap_err();
        assert_eq!(err.step, 3);
        assert!(matches!(err.reason, StepError::NoMatch(_)));
    }

    #[test]
    fn forward_reference_is_rejected() {
        let mut d = identity_derivation();
        d.steps[2].justification = Justification::Rule {
            name: "MP".into(),
            premises: vec![1, 3],
            subst: None,
        };
        let err = ipc().check_derivation(&d).unwrap_err();
        assert_eq!(err.reason, StepError::BadReference(3));
    }

    #[test]
    fn explicit_substitutions_agree() {
        let sig = k_signature();
        let c = k_calculus(false);
        let mut d = Derivation::default();
        d.axiom(sig.parse("eq(X,circ(X))").unwrap(), "ax")
            .rule(sig.parse("eq(X,circ(circ(X)))").unwrap(), "r1", &[1]);
        assert_eq!(c.check_derivation(&d), Ok(()));
        let s: Substitution = [
            ("X", sig.parse("X").unwrap()),
            ("Y", sig.parse("circ(X)").unwrap()),
        ]
        .into_iter()
        .collect();
        d.steps[1].justification = Justification::Rule {
            name: "r1".into(),
            premises: vec![1],
            subst: Some(s.clone()),
        };
        assert_eq!(c.check_derivation(&d), Ok(()));
        let mut wrong = s;
        wrong.insert("Y", sig.parse("X").unwrap());
        d.steps[1].justification = Justification::Rule {
            name: "r1".into(),
            premises: vec![1],
            subst: Some(wrong),
        };
        assert!(c.check_derivation(&d).is_err());
    }

    #[test]
    fn rule_needs_one_common_substitution() {
        let sig = ipc_signature();
        let mut d = Derivation::default();
        d.axiom(sig.parse("imp(X,imp(Y,X))").unwrap(), "a5")
            .axiom(sig.parse("imp(Y,imp(X,Y))").unwrap(), "a5")
            // premise 1 binds A = imp(X,imp(Y,X)), premise 2 needs A = Y
            .rule(sig.parse("imp(X,Y)").unwrap(), "MP", &[1, 2]);
        assert!(ipc().check_derivation(&d).is_err());
    }

    #[test]
    fn analyticity() {
        let offenders = ipc().is_analytic().unwrap_err();
        assert_eq!(offenders.len(), 2);
        assert!(offenders.iter().all(|(r, _)| r == "MP"));
        assert!(ipc_imp_bot().is_analytic().is_err());
        assert_eq!(k_calculus(false).is_analytic(), Ok(()));
        let offenders = k_calculus(true).is_analytic().unwrap_err();
        assert_eq!(offenders[0].0, "r2");
    }

    #[test]
    fn builtin_shapes() {
        assert_eq!(ipc().axioms().len(), 12);
        assert_eq!(ipc().rules().len(), 1);
        assert_eq!(k_calculus(false).axioms().len(), 1);
        assert_eq!(k_calculus(false).rules().len(), 1);
        assert_eq!(k_calculus(true).rules().len(), 2);
        assert!(builtin_calculus("LJ").is_err());
        assert_eq!(
            ipc().rule("MP").unwrap().variables(),
            vec!["A".to_string(), "B".to_string()]
        );
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let err = Calculus::from_text(k_signature(), &[("a", "X"), ("a", "Y")], &[]);
        assert!(matches!(err, Err(CalculusError::DuplicateName { .. })));
    }
}
