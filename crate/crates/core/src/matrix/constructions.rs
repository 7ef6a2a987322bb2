use std::collections::HashMap;

use thiserror::Error;

use super::evaluator::{evaluate, Assignment, Evaluator};
use super::{Matrix, MatrixError, Valuation};
use crate::lang::Formula;
use crate::odometer::Odometer;

/// The direct product: pairs of values in lexicographic order, designated
/// pairs are pairs of designated values, tables act componentwise.
pub fn product(a: &Matrix, b: &Matrix) -> Result<Matrix, MatrixError> {
    if a.signature() != b.signature() {
        return Err(MatrixError::SignatureMismatch);
    }
    let nb = b.len();
    let values = a
        .values()
        .iter()
        .flat_map(|x| b.values().iter().map(move |y| format!("({x},{y})")))
        .collect();
    let designated = a
        .designated()
        .flat_map(|x| b.designated().map(move |y| x * nb + y))
        .collect();
    let mut left = Vec::new();
    let mut right = Vec::new();
    Matrix::from_fn(a.signature().clone(), values, designated, |c, args| {
        left.clear();
        right.clear();
        left.extend(args.iter().map(|&v| v / nb));
        right.extend(args.iter().map(|&v| v % nb));
        a.apply(c, &left) * nb + b.apply(c, &right)
    })
}

/// Left fold of [`product`] over a non-empty list.
pub fn product_all(ms: &[Matrix]) -> Result<Matrix, MatrixError> {
    let (first, rest) = ms.split_first().ok_or(MatrixError::NoValues)?;
    rest.iter()
        .try_fold(first.clone(), |acc, m| product(&acc, m))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiResult {
    pub matrix: Matrix,
    /// The falsifying valuation carried over into the compressed matrix.
    pub valuation: Valuation,
}

/// Compresses a host logic around one countermodel of `f`.
///
/// The values are the host values taken by the subformulas of `f` under
/// `assignment`, plus a fresh designated sentinel. A connective maps an
/// argument tuple to the value of a subformula built by that connective from
/// subformulas with exactly those values, and to the sentinel otherwise.
/// Every host tautology stays a tautology and `f` stays falsified, with at
/// most `f.xi()` values.
pub fn phi<E: Evaluator + ?Sized>(
    host: &E,
    f: &Formula,
    assignment: &Assignment<E::Value>,
) -> Result<PhiResult, MatrixError> {
    let sig = host.signature().clone();
    let subformulas = f.subformulas();
    let mut host_values: Vec<E::Value> = Vec::new();
    let mut index_of: HashMap<E::Value, usize> = HashMap::new();
    let mut sub_index: Vec<usize> = Vec::with_capacity(subformulas.len());
    for b in &subformulas {
        let t = evaluate(host, assignment, b)?;
        let idx = *index_of.entry(t.clone()).or_insert_with(|| {
            host_values.push(t);
            host_values.len() - 1
        });
        sub_index.push(idx);
    }
    let root = *sub_index.last().expect("a formula is its own subformula");
    if host.is_designated(&host_values[root]) {
        return Err(MatrixError::NotFalsified);
    }

    let mut names: Vec<String> = host_values.iter().map(|v| host.value_name(v)).collect();
    let mut sentinel = "top".to_string();
    let mut suffix = 0;
    while names.contains(&sentinel) {
        suffix += 1;
        sentinel = format!("top_{suffix}");
    }
    names.push(sentinel);
    let n = names.len();
    let top = n - 1;

    let mut designated: Vec<usize> = (0..host_values.len())
        .filter(|&i| host.is_designated(&host_values[i]))
        .collect();
    designated.push(top);

    let position: HashMap<&Formula, usize> = subformulas
        .iter()
        .enumerate()
        .map(|(i, b)| (b, i))
        .collect();
    let mut tables: Vec<Vec<Option<usize>>> = sig
        .iter()
        .map(|c| vec![None; n.pow(c.arity as u32)])
        .collect();
    for (i, b) in subformulas.iter().enumerate() {
        if let Formula::App(name, args) = b {
            let conn = sig.index_of(name).expect("evaluated above");
            let slot = args
                .iter()
                .fold(0, |acc, a| acc * n + sub_index[position[a]]);
            match tables[conn][slot] {
                Some(prev) if prev != sub_index[i] => {
                    return Err(MatrixError::NonDeterministic(name.clone()))
                }
                _ => tables[conn][slot] = Some(sub_index[i]),
            }
        }
    }
    let tables = tables
        .into_iter()
        .map(|t| t.into_iter().map(|e| e.unwrap_or(top)).collect())
        .collect();
    let matrix = Matrix::new(sig, names, designated, tables)?;
    let valuation = f
        .vars()
        .into_iter()
        .map(|v| {
            let idx = sub_index[position[&Formula::Var(v.clone())]];
            (v, idx)
        })
        .collect();
    Ok(PhiResult { matrix, valuation })
}

/// The product of [`phi`] over several formulas, each with its own countermodel.
pub fn phi_many<E: Evaluator + ?Sized>(
    host: &E,
    cases: &[(Formula, Assignment<E::Value>)],
) -> Result<Matrix, MatrixError> {
    let parts = cases
        .iter()
        .map(|(f, a)| phi(host, f, a).map(|r| r.matrix))
        .collect::<Result<Vec<_>, _>>()?;
    product_all(&parts)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error("partition is not a partition of the values: {0}")]
    InvalidPartition(String),
    #[error("block {block:?} mixes designated and undesignated values")]
    Designation { block: Vec<String> },
    #[error(
        "not a congruence for `{connective}`: {left:?} and {right:?} are equivalent but map to different blocks"
    )]
    NotCongruence {
        connective: String,
        left: Vec<String>,
        right: Vec<String>,
    },
}

/// The quotient by a partition of the values, checked to be a congruence that
/// never mixes designated with undesignated values. Blocks are represented by
/// their first member in declared order and keep that member's name.
pub fn quotient(m: &Matrix, blocks: &[Vec<usize>]) -> Result<Matrix, QuotientError> {
    let n = m.len();
    let mut block_of = vec![usize::MAX; n];
    for (b, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            return Err(QuotientError::InvalidPartition("empty block".into()));
        }
        for &v in block {
            if v >= n {
                return Err(QuotientError::InvalidPartition(format!("no value {v}")));
            }
            if block_of[v] != usize::MAX {
                return Err(QuotientError::InvalidPartition(format!(
                    "`{}` occurs twice",
                    m.name(v)
                )));
            }
            block_of[v] = b;
        }
    }
    if let Some(v) = block_of.iter().position(|&b| b == usize::MAX) {
        return Err(QuotientError::InvalidPartition(format!(
            "`{}` is in no block",
            m.name(v)
        )));
    }
    for block in blocks {
        let d = m.is_designated(block[0]);
        if block.iter().any(|&v| m.is_designated(v) != d) {
            return Err(QuotientError::Designation {
                block: block.iter().map(|&v| m.name(v).to_string()).collect(),
            });
        }
    }

    // Renumber blocks by their least member so the quotient keeps declared order.
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by_key(|&b| blocks[b].iter().min().copied());
    let mut rank = vec![0; blocks.len()];
    for (r, &b) in order.iter().enumerate() {
        rank[b] = r;
    }
    let reps: Vec<usize> = order
        .iter()
        .map(|&b| *blocks[b].iter().min().expect("non-empty"))
        .collect();
    let k = reps.len();

    let names = |args: &[usize]| -> Vec<String> { args.iter().map(|&v| m.name(v).to_string()).collect() };
    let mut tables = Vec::with_capacity(m.signature().len());
    for (c, conn) in m.signature().iter().enumerate() {
        let mut table: Vec<Option<(usize, Vec<usize>)>> = vec![None; k.pow(conn.arity as u32)];
        let mut odo = Odometer::new(conn.arity, n);
        while let Some(args) = odo.next() {
            let slot = args.iter().fold(0, |acc, &a| acc * k + rank[block_of[a]]);
            let result = rank[block_of[m.apply(c, args)]];
            match &table[slot] {
                None => table[slot] = Some((result, args.to_vec())),
                Some((prev, witness)) if *prev != result => {
                    return Err(QuotientError::NotCongruence {
                        connective: conn.name.clone(),
                        left: names(witness),
                        right: names(args),
                    })
                }
                Some(_) => {}
            }
        }
        tables.push(
            table
                .into_iter()
                .map(|e| e.expect("every block tuple is hit").0)
                .collect(),
        );
    }
    let designated = (0..k).filter(|&r| m.is_designated(reps[r])).collect();
    Matrix::new(
        m.signature().clone(),
        reps.iter().map(|&v| m.name(v).to_string()).collect(),
        designated,
        tables,
    )
    .map_err(|e| QuotientError::InvalidPartition(e.to_string()))
}

/// Searches for a value bijection `h` from `a` onto `b` that preserves and
/// reflects designation and commutes with every table. Returns `h` as a
/// vector indexed by the values of `a`.
pub fn iso(a: &Matrix, b: &Matrix) -> Result<Option<Vec<usize>>, MatrixError> {
    if a.signature() != b.signature() {
        return Err(MatrixError::SignatureMismatch);
    }
    if a.len() != b.len() || a.designated().count() != b.designated().count() {
        return Ok(None);
    }
    let n = a.len();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    Ok(extend_iso(a, b, 0, &mut map, &mut used).then_some(map))
}

fn extend_iso(a: &Matrix, b: &Matrix, next: usize, map: &mut [usize], used: &mut [bool]) -> bool {
    let n = a.len();
    if next == n {
        return is_homomorphism(a, b, map);
    }
    for target in 0..n {
        if used[target] || a.is_designated(next) != b.is_designated(target) {
            continue;
        }
        map[next] = target;
        used[target] = true;
        if consistent(a, b, next, map) && extend_iso(a, b, next + 1, map, used) {
            return true;
        }
        used[target] = false;
        map[next] = usize::MAX;
    }
    false
}

fn is_homomorphism(a: &Matrix, b: &Matrix, map: &[usize]) -> bool {
    let mut image = Vec::new();
    a.signature().iter().enumerate().all(|(c, conn)| {
        let mut odo = Odometer::new(conn.arity, a.len());
        while let Some(args) = odo.next() {
            image.clear();
            image.extend(args.iter().map(|&v| map[v]));
            if b.apply(c, &image) != map[a.apply(c, args)] {
                return false;
            }
        }
        true
    })
}

/// Checks every table entry whose arguments are all mapped, with at least one
/// argument equal to `newest`, and whose result is mapped too.
fn consistent(a: &Matrix, b: &Matrix, newest: usize, map: &[usize]) -> bool {
    let mut image = Vec::new();
    for (c, conn) in a.signature().iter().enumerate() {
        if conn.arity == 0 {
            let r = a.apply(c, &[]);
            if map[r] != usize::MAX && map[r] != b.apply(c, &[]) {
                return false;
            }
            continue;
        }
        let mut odo = Odometer::new(conn.arity, newest + 1);
        while let Some(args) = odo.next() {
            if !args.contains(&newest) {
                continue;
            }
            let r = a.apply(c, args);
            if map[r] == usize::MAX {
                continue;
            }
            image.clear();
            image.extend(args.iter().map(|&v| map[v]));
            if b.apply(c, &image) != map[r] {
                return false;
            }
        }
    }
    true
}
