//! Membership in the many-valued closure: is a formula true in every cover?
//!
//! A falsifying cover with at most `xi(f)` values is searched for directly,
//! by backtracking over table cells. For each value count `m` and each size
//! `d < m` of the designated set `{0, .., d-1}` (no loss of generality up to
//! renaming values) and each assignment to the variables of `f`, the search
//! fills table cells on demand: every axiom instance, every rule instance and
//! the target `f` is a constraint whose evaluation needs certain cells, and
//! the most constrained undetermined instance chooses the next cell.

use crate::calculus::Calculus;
use crate::lang::{Formula, Signature};
use crate::matrix::{Matrix, MatrixError, Valuation};
use crate::normality::is_cover;
use crate::odometer::Odometer;

use super::certificate::Certificate;
use super::{Budget, Deadline};

#[derive(Debug, Clone, PartialEq)]
pub enum McVerdict {
    /// No falsifying cover exists up to the value bound. Definitive only for
    /// analytic calculi with a completed sweep.
    In { definitive: bool, searched_up_to: usize },
    Out(Box<Certificate>),
    /// The budget ran out at the given value count.
    Unknown { reached: usize },
}

const UNSET: u32 = u32::MAX;

#[derive(Debug, Clone)]
enum Node {
    Var(usize),
    App(usize, Box<[usize]>),
}

/// A formula flattened for partial evaluation; variables index the
/// instance's assignment.
#[derive(Debug, Clone)]
struct Shape {
    nodes: Vec<Node>,
}

impl Shape {
    fn new(sig: &Signature, f: &Formula, vars: &[String]) -> Shape {
        let mut s = Shape { nodes: Vec::new() };
        s.add(sig, f, vars);
        s
    }

    fn add(&mut self, sig: &Signature, f: &Formula, vars: &[String]) -> usize {
        let node = match f {
            Formula::Var(v) => Node::Var(vars.iter().position(|x| x == v).expect("listed variable")),
            Formula::App(name, args) => {
                let c = sig.index_of(name).expect("checked formula");
                let kids: Vec<usize> = args.iter().map(|a| self.add(sig, a, vars)).collect();
                Node::App(c, kids.into_boxed_slice())
            }
        };
        self.nodes.push(node);
        self.nodes.len() - 1
    }
}

/// Evaluation of one shape under one assignment against partial tables.
enum Partial {
    Value(usize),
    /// Unknown; carries one missing cell `(connective, tuple index)` whose
    /// arguments are all known.
    Missing(usize, usize),
}

struct Tables {
    m: usize,
    cells: Vec<Vec<u32>>,
}

impl Tables {
    fn eval(&self, shape: &Shape, assignment: &[usize], buf: &mut Vec<Partial>) -> Partial {
        buf.clear();
        for node in &shape.nodes {
            let p = match node {
                Node::Var(v) => Partial::Value(assignment[*v]),
                Node::App(c, kids) => {
                    let mut idx = 0;
                    let mut missing = None;
                    for &k in kids.iter() {
                        match buf[k] {
                            Partial::Value(v) => idx = idx * self.m + v,
                            Partial::Missing(c2, i2) => {
                                missing.get_or_insert((c2, i2));
                            }
                        }
                    }
                    match missing {
                        Some((c2, i2)) => Partial::Missing(c2, i2),
                        None => match self.cells[*c][idx] {
                            UNSET => Partial::Missing(*c, idx),
                            v => Partial::Value(v as usize),
                        },
                    }
                }
            };
            buf.push(p);
        }
        buf.pop().expect("non-empty shape")
    }
}

/// One ground requirement: premises designated imply conclusion designated.
/// Axioms have no premises; the target has no premises and must end
/// undesignated.
struct Constraint {
    premises: Vec<(usize, Vec<usize>)>,
    conclusion: (usize, Vec<usize>),
    target: bool,
}

enum Status {
    Satisfied,
    Violated,
    Open { cell: (usize, usize), unknowns: usize },
}

struct Search<'a> {
    shapes: Vec<Shape>,
    /// Values occurring in the assignment or in a filled cell.
    used: Vec<u32>,
    d: usize,
    constraints: Vec<Constraint>,
    tables: Tables,
    designated: Vec<bool>,
    buf: Vec<Partial>,
    nodes: u64,
    budget: &'a Budget,
    deadline: &'a Deadline,
    exhausted: bool,
}

impl Search<'_> {
    fn designated(&self, p: &Partial) -> Option<bool> {
        match p {
            Partial::Value(v) => Some(self.designated[*v]),
            Partial::Missing(..) => None,
        }
    }

    fn status(&mut self, i: usize) -> Status {
        let mut open = None;
        let mut unknowns = 0;
        let n_prem = self.constraints[i].premises.len();
        for p in 0..n_prem {
            let (s, a) = &self.constraints[i].premises[p];
            let r = self.tables.eval(&self.shapes[*s], a, &mut self.buf);
            match (self.designated(&r), r) {
                (Some(false), _) => return Status::Satisfied,
                (Some(true), _) => {}
                (None, Partial::Missing(c, idx)) => {
                    unknowns += 1;
                    open.get_or_insert((c, idx));
                }
                (None, Partial::Value(_)) => unreachable!(),
            }
        }
        let (s, a) = &self.constraints[i].conclusion;
        let target = self.constraints[i].target;
        let r = self.tables.eval(&self.shapes[*s], a, &mut self.buf);
        match (self.designated(&r), r) {
            (Some(d), _) if d != target => Status::Satisfied,
            (Some(_), _) => match open {
                None => Status::Violated,
                Some(cell) => Status::Open { cell, unknowns },
            },
            (None, Partial::Missing(c, idx)) => Status::Open {
                cell: open.unwrap_or((c, idx)),
                unknowns: unknowns + 1,
            },
            (None, Partial::Value(_)) => unreachable!(),
        }
    }

    /// Depth-first search; returns whether all constraints can be met.
    fn solve(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes >= self.budget.max_candidates
            || (self.nodes.is_multiple_of(1024) && self.deadline.expired())
        {
            self.exhausted = true;
            return false;
        }
        let mut best: Option<((usize, usize), usize)> = None;
        for i in 0..self.constraints.len() {
            match self.status(i) {
                Status::Satisfied => {}
                Status::Violated => return false,
                Status::Open { cell, unknowns } => {
                    if best.is_none_or(|(_, u)| unknowns < u) {
                        best = Some((cell, unknowns));
                    }
                }
            }
        }
        let Some(((c, idx), _)) = best else {
            return true;
        };
        // unused values of the same designation status are interchangeable
        let (m, d) = (self.tables.m, self.d);
        let fresh_designated = (0..d).find(|&v| self.used[v] == 0);
        let fresh_other = (d..m).find(|&v| self.used[v] == 0);
        for v in 0..m {
            if self.used[v] == 0 && Some(v) != fresh_designated && Some(v) != fresh_other {
                continue;
            }
            self.tables.cells[c][idx] = v as u32;
            self.used[v] += 1;
            let found = self.solve();
            self.used[v] -= 1;
            if found {
                return true;
            }
            if self.exhausted {
                break;
            }
        }
        self.tables.cells[c][idx] = UNSET;
        false
    }
}

/// Usage counts of an assignment if it is the first of its class under
/// permutations fixing the designated set `{0, .., d-1}`: each value is
/// either used before or the least unused value of its status.
fn canonical_use(assignment: &[usize], m: usize, d: usize) -> Option<Vec<u32>> {
    let mut used = vec![0u32; m];
    for &v in assignment {
        if used[v] == 0 {
            let class = if v < d { 0..d } else { d..m };
            if class.into_iter().find(|&w| used[w] == 0) != Some(v) {
                return None;
            }
        }
        used[v] += 1;
    }
    Some(used)
}

/// Searches for a cover of `c` with at most `xi(f)` values that falsifies `f`.
pub fn mc_member(c: &Calculus, f: &Formula, budget: &Budget) -> Result<McVerdict, MatrixError> {
    let sig = c.signature();
    sig.check(f)?;
    let bound = usize::try_from(f.xi()).unwrap_or(usize::MAX);
    let deadline = Deadline::new(budget);
    let mut nodes = 0u64;

    let mut shapes = Vec::new();
    // (shape ids, variable count) per axiom and per rule; the target is last
    let mut axioms = Vec::new();
    for (_, a) in c.axioms() {
        let vars: Vec<String> = a.vars().into_iter().collect();
        shapes.push(Shape::new(sig, a, &vars));
        axioms.push((shapes.len() - 1, vars.len()));
    }
    let mut rules = Vec::new();
    for r in c.rules() {
        let vars = r.variables();
        let prem: Vec<usize> = r
            .premises
            .iter()
            .map(|p| {
                shapes.push(Shape::new(sig, p, &vars));
                shapes.len() - 1
            })
            .collect();
        shapes.push(Shape::new(sig, &r.conclusion, &vars));
        rules.push((prem, shapes.len() - 1, vars.len()));
    }
    let f_vars: Vec<String> = f.vars().into_iter().collect();
    shapes.push(Shape::new(sig, f, &f_vars));
    let target_shape = shapes.len() - 1;

    for m in 1..=bound {
        // every cover needs at least one undesignated value to falsify f
        for d in 0..m {
            let mut base = Vec::new();
            for &(s, k) in &axioms {
                let mut odo = Odometer::new(k, m);
                while let Some(a) = odo.next() {
                    base.push(Constraint {
                        premises: Vec::new(),
                        conclusion: (s, a.to_vec()),
                        target: false,
                    });
                }
            }
            for (prem, concl, k) in &rules {
                let mut odo = Odometer::new(*k, m);
                while let Some(a) = odo.next() {
                    base.push(Constraint {
                        premises: prem.iter().map(|&p| (p, a.to_vec())).collect(),
                        conclusion: (*concl, a.to_vec()),
                        target: false,
                    });
                }
            }
            let mut odo = Odometer::new(f_vars.len(), m);
            while let Some(assignment) = odo.next() {
                let Some(used) = canonical_use(assignment, m, d) else {
                    continue;
                };
                let mut constraints = vec![Constraint {
                    premises: Vec::new(),
                    conclusion: (target_shape, assignment.to_vec()),
                    target: true,
                }];
                constraints.extend(base.iter().map(|k| Constraint {
                    premises: k.premises.clone(),
                    conclusion: k.conclusion.clone(),
                    target: false,
                }));
                let mut search = Search {
                    shapes: shapes.clone(),
                    used,
                    d,
                    constraints,
                    tables: Tables {
                        m,
                        cells: sig
                            .iter()
                            .map(|conn| vec![UNSET; m.pow(conn.arity as u32)])
                            .collect(),
                    },
                    designated: (0..m).map(|v| v < d).collect(),
                    buf: Vec::new(),
                    nodes,
                    budget,
                    deadline: &deadline,
                    exhausted: false,
                };
                let ok = search.solve();
                nodes = search.nodes;
                if ok {
                    let tables = search
                        .tables
                        .cells
                        .iter()
                        .map(|t| t.iter().map(|&v| if v == UNSET { 0 } else { v as usize }).collect())
                        .collect();
                    let matrix = Matrix::new(
                        sig.clone(),
                        (0..m).map(|v| v.to_string()).collect(),
                        (0..d).collect(),
                        tables,
                    )?;
                    let valuation: Valuation =
                        f_vars.iter().cloned().zip(assignment.iter().copied()).collect();
                    debug_assert_eq!(is_cover(c, &matrix).unwrap(), None);
                    debug_assert!(!matrix.is_designated(matrix.evaluate(&valuation, f).unwrap()));
                    return Ok(McVerdict::Out(Box::new(Certificate {
                        calculus: c.clone(),
                        matrix,
                        formula: f.clone(),
                        valuation,
                    })));
                }
                if search.exhausted {
                    return Ok(McVerdict::Unknown { reached: m });
                }
            }
        }
    }
    Ok(McVerdict::In {
        definitive: c.is_analytic().is_ok(),
        searched_up_to: bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{ipc, k_calculus};
    use crate::lang::Formula;
    use crate::search::check_certificate;

    fn k(s: &str) -> Formula {
        crate::matrix::k_signature().parse(s).unwrap()
    }

    #[test]
    fn circ_cycle_is_outside() {
        let v = mc_member(&k_calculus(false), &k("eq(circ(X),X)"), &Budget::default()).unwrap();
        match v {
            McVerdict::Out(cert) => assert_eq!(check_certificate(&cert), Ok(())),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn axiom_is_inside() {
        let v = mc_member(&k_calculus(false), &k("eq(X,circ(X))"), &Budget::default()).unwrap();
        assert_eq!(
            v,
            McVerdict::In {
                definitive: true,
                searched_up_to: 4
            }
        );
    }

    #[test]
    fn non_analytic_calculus_never_claims_definitive_membership() {
        let f = crate::matrix::ipc_signature().parse("imp(X,X)").unwrap();
        let v = mc_member(&ipc(), &f, &Budget::default()).unwrap();
        assert_eq!(
            v,
            McVerdict::In {
                definitive: false,
                searched_up_to: 3
            }
        );
    }

    #[test]
    fn tiny_budget_gives_unknown() {
        let budget = Budget {
            max_candidates: 3,
            ..Budget::default()
        };
        let v = mc_member(&k_calculus(false), &k("eq(circ(circ(X)),X)"), &budget).unwrap();
        assert!(matches!(v, McVerdict::Unknown { .. }));
    }
}
