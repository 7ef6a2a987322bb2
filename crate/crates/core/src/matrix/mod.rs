//! Finite-valued logical matrices.
//!
//! A [`Matrix`] has an ordered list of named values, a designated subset and
//! one total truth table per connective. Tables are stored row-major over the
//! declared value order, first argument most significant. Values are referred
//! to by their index in the declared order.

mod builtin;
mod compiled;
mod constructions;
mod evaluator;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::lang::{Formula, LangError, Signature};

pub use builtin::{
    classical, godel, godel_imp_bot, godel_top, imp_bot_signature, ipc_signature, k_matrix,
    k_signature, t3,
};
pub use compiled::Compiled;
pub use constructions::{
    iso, phi, phi_many, product, product_all, quotient, PhiResult, QuotientError,
};
pub use evaluator::{evaluate, Assignment, Evaluator, InfiniteGodel};

/// Assigns each variable the index of a matrix value.
pub type Valuation = BTreeMap<String, usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("signatures differ")]
    SignatureMismatch,
    #[error("variable `{0}` is not assigned")]
    UnassignedVariable(String),
    #[error("value {0} is out of range")]
    ValueOutOfRange(usize),
    #[error("unknown value `{0}`")]
    UnknownValue(String),
    #[error("duplicate value `{0}`")]
    DuplicateValue(String),
    #[error("matrix needs at least one value")]
    NoValues,
    #[error("table for `{connective}` has {found} entries, expected {expected}")]
    TableSize {
        connective: String,
        expected: usize,
        found: usize,
    },
    #[error("{0} tables given for {1} connectives")]
    TableCount(usize, usize),
    #[error("parameter {0} out of range")]
    ParameterOutOfRange(usize),
    #[error("the valuation satisfies the formula")]
    NotFalsified,
    #[error("host evaluator is not deterministic at connective `{0}`")]
    NonDeterministic(String),
    #[error(transparent)]
    Lang(#[from] LangError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    sig: Signature,
    values: Vec<String>,
    designated: Vec<bool>,
    tables: Vec<Vec<u32>>,
}

/// Outcome of an exhaustive tautology check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tautology {
    Valid,
    /// Lexicographically first falsifying valuation, variables in name order.
    Countermodel(Valuation),
}

impl Tautology {
    pub fn is_valid(&self) -> bool {
        matches!(self, Tautology::Valid)
    }
}

impl Matrix {
    pub fn new(
        sig: Signature,
        values: Vec<String>,
        designated: Vec<usize>,
        tables: Vec<Vec<usize>>,
    ) -> Result<Self, MatrixError> {
        if values.is_empty() {
            return Err(MatrixError::NoValues);
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(MatrixError::DuplicateValue(v.clone()));
            }
        }
        let n = values.len();
        let mut des = vec![false; n];
        for d in designated {
            *des.get_mut(d).ok_or(MatrixError::ValueOutOfRange(d))? = true;
        }
        if tables.len() != sig.len() {
            return Err(MatrixError::TableCount(tables.len(), sig.len()));
        }
        let mut stored = Vec::with_capacity(tables.len());
        for (c, table) in sig.iter().zip(tables) {
            let expected = n.pow(c.arity as u32);
            if table.len() != expected {
                return Err(MatrixError::TableSize {
                    connective: c.name.clone(),
                    expected,
                    found: table.len(),
                });
            }
            if let Some(&bad) = table.iter().find(|&&v| v >= n) {
                return Err(MatrixError::ValueOutOfRange(bad));
            }
            stored.push(table.into_iter().map(|v| v as u32).collect());
        }
        Ok(Matrix {
            sig,
            values,
            designated: des,
            tables: stored,
        })
    }

    /// Assembles a matrix from parts already known to be consistent.
    pub(crate) fn from_parts(
        sig: Signature,
        values: Vec<String>,
        designated: Vec<bool>,
        tables: Vec<Vec<u32>>,
    ) -> Matrix {
        debug_assert_eq!(designated.len(), values.len());
        debug_assert_eq!(tables.len(), sig.len());
        Matrix {
            sig,
            values,
            designated,
            tables,
        }
    }

    /// Builds a matrix by computing each table entry from its argument tuple.
    pub fn from_fn(
        sig: Signature,
        values: Vec<String>,
        designated: Vec<usize>,
        mut op: impl FnMut(usize, &[usize]) -> usize,
    ) -> Result<Self, MatrixError> {
        let n = values.len();
        let tables = (0..sig.len())
            .map(|c| {
                let arity = sig.get(c).arity;
                let mut odo = crate::odometer::Odometer::new(arity, n);
                let mut table = Vec::with_capacity(n.pow(arity as u32));
                while let Some(args) = odo.next() {
                    table.push(op(c, args));
                }
                table
            })
            .collect();
        Matrix::new(sig, values, designated, tables)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.values[v]
    }

    pub fn value_index(&self, name: &str) -> Option<usize> {
        self.values.iter().position(|v| v == name)
    }

    pub fn is_designated(&self, v: usize) -> bool {
        self.designated[v]
    }

    pub fn designated(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&v| self.designated[v])
    }

    pub fn designated_mask(&self) -> &[bool] {
        &self.designated
    }

    pub fn table(&self, conn: usize) -> &[u32] {
        &self.tables[conn]
    }

    /// Index of an argument tuple in a row-major table.
    #[inline]
    pub fn tuple_index(&self, args: &[usize]) -> usize {
        let n = self.values.len();
        args.iter().fold(0, |acc, &a| acc * n + a)
    }

    #[inline]
    pub fn apply(&self, conn: usize, args: &[usize]) -> usize {
        self.tables[conn][self.tuple_index(args)] as usize
    }

    pub fn apply_named(&self, conn: &str, args: &[usize]) -> Option<usize> {
        self.sig.index_of(conn).map(|c| self.apply(c, args))
    }

    /// Evaluates `f` bottom-up under `valuation`.
    pub fn evaluate(&self, valuation: &Valuation, f: &Formula) -> Result<usize, MatrixError> {
        evaluate(self, valuation, f)
    }

    /// Exhaustively checks all valuations of the variables of `f`.
    pub fn tautology(&self, f: &Formula) -> Result<Tautology, MatrixError> {
        let compiled = Compiled::new(&self.sig, &[f])?;
        Ok(match compiled.first_countermodel(self) {
            None => Tautology::Valid,
            Some(vals) => Tautology::Countermodel(compiled.valuation(&vals)),
        })
    }

    pub fn is_tautology(&self, f: &Formula) -> Result<bool, MatrixError> {
        let compiled = Compiled::new(&self.sig, &[f])?;
        Ok(compiled.first_countermodel(self).is_none())
    }

    /// The same matrix with its values renamed; `names` follows the declared order.
    pub fn with_value_names(&self, names: Vec<String>) -> Result<Matrix, MatrixError> {
        if names.len() != self.len() {
            return Err(MatrixError::ParameterOutOfRange(names.len()));
        }
        for (i, v) in names.iter().enumerate() {
            if names[..i].contains(v) {
                return Err(MatrixError::DuplicateValue(v.clone()));
            }
        }
        let mut m = self.clone();
        m.values = names;
        Ok(m)
    }

    /// Restriction to a sub-signature (every connective of `sig` must be present
    /// here with the same arity).
    pub fn reduct(&self, sig: &Signature) -> Result<Matrix, MatrixError> {
        let mut tables = Vec::with_capacity(sig.len());
        for c in sig.iter() {
            let idx = self
                .sig
                .index_of(&c.name)
                .ok_or_else(|| LangError::UnknownConnective(c.name.clone()))?;
            if self.sig.get(idx).arity != c.arity {
                return Err(MatrixError::SignatureMismatch);
            }
            tables.push(self.tables[idx].clone());
        }
        Ok(Matrix {
            sig: sig.clone(),
            values: self.values.clone(),
            designated: self.designated.clone(),
            tables,
        })
    }

    /// Image of this matrix under a value permutation: value `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Matrix {
        let n = self.len();
        let mut values = vec![String::new(); n];
        let mut designated = vec![false; n];
        for v in 0..n {
            values[perm[v]] = self.values[v].clone();
            designated[perm[v]] = self.designated[v];
        }
        let tables = self
            .sig
            .iter()
            .enumerate()
            .map(|(c, conn)| {
                let mut table = vec![0u32; n.pow(conn.arity as u32)];
                let mut odo = crate::odometer::Odometer::new(conn.arity, n);
                let mut image = vec![0; conn.arity];
                while let Some(args) = odo.next() {
                    for (slot, &a) in image.iter_mut().zip(args) {
                        *slot = perm[a];
                    }
                    table[self.tuple_index(&image)] = perm[self.apply(c, args)] as u32;
                }
                table
            })
            .collect();
        Matrix {
            sig: self.sig.clone(),
            values,
            designated,
            tables,
        }
    }

    pub fn render_valuation(&self, valuation: &Valuation) -> String {
        let parts: Vec<String> = valuation
            .iter()
            .map(|(k, &v)| format!("{k}={}", self.values[v]))
            .collect();
        parts.join(", ")
    }

    /// Parses `X=v, Y=w` against this matrix's value names.
    pub fn parse_valuation(&self, text: &str) -> Result<Valuation, MatrixError> {
        let mut out = Valuation::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (var, value) = part
                .split_once('=')
                .ok_or_else(|| MatrixError::UnknownValue(part.to_string()))?;
            let value = value.trim();
            let idx = self
                .value_index(value)
                .ok_or_else(|| MatrixError::UnknownValue(value.to_string()))?;
            out.insert(var.trim().to_string(), idx);
        }
        Ok(out)
    }
}

impl fmt::Display for Matrix {
    /// Renders the body of a `matrix` section in the workspace format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "  values {}", self.values.join(" "))?;
        let des: Vec<&str> = self.designated().map(|v| self.name(v)).collect();
        writeln!(f, "  designated {}", des.join(" "))?;
        for (c, conn) in self.sig.iter().enumerate() {
            let entries: Vec<&str> = self.tables[c]
                .iter()
                .map(|&v| self.values[v as usize].as_str())
                .collect();
            writeln!(f, "  op {} : {}", conn.name, entries.join(" "))?;
        }
        Ok(())
    }
}
