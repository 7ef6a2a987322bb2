//! Strong soundness: deciding whether a matrix is a cover of a calculus.

use std::fmt;

use crate::calculus::{Calculus, Rule};
use crate::matrix::{Compiled, Matrix, MatrixError, Tautology, Valuation};
use crate::odometer::Odometer;

/// The lexicographically first assignment to the rule's variables (in
/// first-occurrence order) that designates every premise but not the
/// conclusion.
pub fn check_rule(m: &Matrix, r: &Rule) -> Result<Option<Valuation>, MatrixError> {
    let mut formulas: Vec<_> = r.premises.iter().collect();
    formulas.push(&r.conclusion);
    let compiled = Compiled::with_vars(m.signature(), &formulas, r.variables())?;
    let roots = compiled.roots();
    let (concl, prems) = roots.split_last().expect("conclusion present");
    let mut buf = vec![0; compiled.node_count()];
    let mut odo = Odometer::new(compiled.vars().len(), m.len());
    while let Some(assignment) = odo.next() {
        compiled.eval(m, assignment, &mut buf);
        if !m.is_designated(buf[*concl]) && prems.iter().all(|&p| m.is_designated(buf[p])) {
            return Ok(Some(compiled.valuation(assignment)));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverFailure {
    Axiom { name: String, countermodel: Valuation },
    Rule { name: String, witness: Valuation },
}

impl CoverFailure {
    pub fn name(&self) -> &str {
        match self {
            CoverFailure::Axiom { name, .. } | CoverFailure::Rule { name, .. } => name,
        }
    }

    pub fn valuation(&self) -> &Valuation {
        match self {
            CoverFailure::Axiom { countermodel, .. } => countermodel,
            CoverFailure::Rule { witness, .. } => witness,
        }
    }
}

impl fmt::Display for CoverFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverFailure::Axiom { name, .. } => write!(f, "axiom {name} is not a tautology"),
            CoverFailure::Rule { name, .. } => write!(f, "rule {name} does not preserve designation"),
        }
    }
}

/// Reports the first failing axiom or rule in declaration order, axioms first.
pub fn is_cover(c: &Calculus, m: &Matrix) -> Result<Option<CoverFailure>, MatrixError> {
    if c.signature() != m.signature() {
        return Err(MatrixError::SignatureMismatch);
    }
    for (name, f) in c.axioms() {
        if let Tautology::Countermodel(countermodel) = m.tautology(f)? {
            return Ok(Some(CoverFailure::Axiom {
                name: name.clone(),
                countermodel,
            }));
        }
    }
    for r in c.rules() {
        if let Some(witness) = check_rule(m, r)? {
            return Ok(Some(CoverFailure::Rule {
                name: r.name.clone(),
                witness,
            }));
        }
    }
    Ok(None)
}

/// A precompiled cover test for sweeping many matrices over one calculus.
#[derive(Debug, Clone)]
pub struct CoverTest {
    axioms: Compiled,
    rules: Vec<Compiled>,
}

impl CoverTest {
    pub fn new(c: &Calculus) -> Result<Self, MatrixError> {
        let sig = c.signature();
        let axioms: Vec<_> = c.axioms().iter().map(|(_, f)| f).collect();
        let rules = c
            .rules()
            .iter()
            .map(|r| {
                let mut fs: Vec<_> = r.premises.iter().collect();
                fs.push(&r.conclusion);
                Compiled::with_vars(sig, &fs, r.variables())
            })
            .collect::<Result<_, _>>()?;
        Ok(CoverTest {
            axioms: Compiled::new(sig, &axioms)?,
            rules,
        })
    }

    /// Whether `m` is a cover. Axioms are checked jointly over the union of
    /// their variables, which is equivalent to checking each one alone.
    pub fn accepts(&self, m: &Matrix) -> bool {
        let mut buf = vec![0; self.axioms.node_count()];
        let mut odo = Odometer::new(self.axioms.vars().len(), m.len());
        while let Some(a) = odo.next() {
            self.axioms.eval(m, a, &mut buf);
            if self.axioms.roots().iter().any(|&r| !m.is_designated(buf[r])) {
                return false;
            }
        }
        self.rules.iter().all(|r| {
            let (concl, prems) = r.roots().split_last().expect("conclusion present");
            let mut buf = vec![0; r.node_count()];
            let mut odo = Odometer::new(r.vars().len(), m.len());
            while let Some(a) = odo.next() {
                r.eval(m, a, &mut buf);
                if !m.is_designated(buf[*concl]) && prems.iter().all(|&p| m.is_designated(buf[p]))
                {
                    return false;
                }
            }
            true
        })
    }
}
