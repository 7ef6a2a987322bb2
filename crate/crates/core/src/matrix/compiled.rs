use std::collections::{BTreeSet, HashMap};

use super::{Matrix, MatrixError, Valuation};
use crate::lang::{Formula, Signature};
use crate::odometer::Odometer;

#[derive(Debug, Clone)]
enum Node {
    Var(usize),
    App(usize, Box<[usize]>),
}

/// A set of formulas flattened into a shared subformula DAG for fast repeated
/// evaluation. Nodes are in post-order, so children precede parents.
#[derive(Debug, Clone)]
pub struct Compiled {
    vars: Vec<String>,
    nodes: Vec<Node>,
    roots: Vec<usize>,
}

impl Compiled {
    /// Compiles `formulas`; variables are ordered by name.
    pub fn new(sig: &Signature, formulas: &[&Formula]) -> Result<Self, MatrixError> {
        let vars: BTreeSet<String> = formulas.iter().flat_map(|f| f.vars()).collect();
        Self::with_vars(sig, formulas, vars.into_iter().collect())
    }

    /// Compiles `formulas` with an explicit variable order; every variable of
    /// the formulas must be listed.
    pub fn with_vars(
        sig: &Signature,
        formulas: &[&Formula],
        vars: Vec<String>,
    ) -> Result<Self, MatrixError> {
        let mut c = Compiled {
            vars,
            nodes: Vec::new(),
            roots: Vec::new(),
        };
        let mut memo = HashMap::new();
        for f in formulas {
            sig.check(f)?;
            let root = c.add(sig, f, &mut memo)?;
            c.roots.push(root);
        }
        Ok(c)
    }

    fn add<'a>(
        &mut self,
        sig: &Signature,
        f: &'a Formula,
        memo: &mut HashMap<&'a Formula, usize>,
    ) -> Result<usize, MatrixError> {
        if let Some(&id) = memo.get(f) {
            return Ok(id);
        }
        let node = match f {
            Formula::Var(v) => Node::Var(
                self.vars
                    .iter()
                    .position(|x| x == v)
                    .ok_or_else(|| MatrixError::UnassignedVariable(v.clone()))?,
            ),
            Formula::App(name, args) => {
                let conn = sig.index_of(name).expect("checked against signature");
                let children = args
                    .iter()
                    .map(|a| self.add(sig, a, memo))
                    .collect::<Result<Vec<_>, _>>()?;
                Node::App(conn, children.into_boxed_slice())
            }
        };
        self.nodes.push(node);
        let id = self.nodes.len() - 1;
        memo.insert(f, id);
        Ok(id)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Evaluates every node under `assignment` (indexed like [`Self::vars`]);
    /// `out` must have room for [`Self::node_count`] values.
    pub fn eval(&self, m: &Matrix, assignment: &[usize], out: &mut [usize]) {
        let n = m.len();
        for (i, node) in self.nodes.iter().enumerate() {
            out[i] = match node {
                Node::Var(v) => assignment[*v],
                Node::App(c, args) => {
                    let idx = args.iter().fold(0, |acc, &a| acc * n + out[a]);
                    m.table(*c)[idx] as usize
                }
            };
        }
    }

    /// First assignment, in lexicographic order, under which the first root is
    /// undesignated.
    pub fn first_countermodel(&self, m: &Matrix) -> Option<Vec<usize>> {
        let root = self.roots[0];
        let mut buf = vec![0; self.nodes.len()];
        let mut odo = Odometer::new(self.vars.len(), m.len());
        while let Some(assignment) = odo.next() {
            self.eval(m, assignment, &mut buf);
            if !m.is_designated(buf[root]) {
                return Some(assignment.to_vec());
            }
        }
        None
    }

    pub fn valuation(&self, assignment: &[usize]) -> Valuation {
        self.vars
            .iter()
            .cloned()
            .zip(assignment.iter().copied())
            .collect()
    }
}
