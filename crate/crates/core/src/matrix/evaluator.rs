use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;

use super::{Matrix, MatrixError};
use crate::lang::{Formula, LangError, Signature};

/// A variable assignment into an evaluator's value domain.
pub type Assignment<V> = BTreeMap<String, V>;

/// Truth functions computed on demand. The value domain may be infinite; all
/// that is needed is a designatedness test and deterministic connectives.
pub trait Evaluator {
    type Value: Clone + Eq + Hash + Debug;

    fn signature(&self) -> &Signature;

    fn is_designated(&self, v: &Self::Value) -> bool;

    /// Applies connective `conn` (an index into [`Self::signature`]).
    fn apply(&self, conn: usize, args: &[Self::Value]) -> Self::Value;

    fn value_name(&self, v: &Self::Value) -> String;
}

impl Evaluator for Matrix {
    type Value = usize;

    fn signature(&self) -> &Signature {
        Matrix::signature(self)
    }

    fn is_designated(&self, v: &usize) -> bool {
        Matrix::is_designated(self, *v)
    }

    fn apply(&self, conn: usize, args: &[usize]) -> usize {
        Matrix::apply(self, conn, args)
    }

    fn value_name(&self, v: &usize) -> String {
        self.name(*v).to_string()
    }
}

impl<E: Evaluator + ?Sized> Evaluator for &E {
    type Value = E::Value;

    fn signature(&self) -> &Signature {
        (**self).signature()
    }

    fn is_designated(&self, v: &Self::Value) -> bool {
        (**self).is_designated(v)
    }

    fn apply(&self, conn: usize, args: &[Self::Value]) -> Self::Value {
        (**self).apply(conn, args)
    }

    fn value_name(&self, v: &Self::Value) -> String {
        (**self).value_name(v)
    }
}

pub fn evaluate<E: Evaluator + ?Sized>(
    e: &E,
    assignment: &Assignment<E::Value>,
    f: &Formula,
) -> Result<E::Value, MatrixError> {
    match f {
        Formula::Var(v) => assignment
            .get(v)
            .cloned()
            .ok_or_else(|| MatrixError::UnassignedVariable(v.clone())),
        Formula::App(name, args) => {
            let sig = e.signature();
            let conn = sig
                .index_of(name)
                .ok_or_else(|| LangError::UnknownConnective(name.clone()))?;
            let expected = sig.get(conn).arity;
            if expected != args.len() {
                return Err(LangError::ArityMismatch {
                    name: name.clone(),
                    expected,
                    found: args.len(),
                }
                .into());
            }
            let vals = args
                .iter()
                .map(|a| evaluate(e, assignment, a))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(e.apply(conn, &vals))
        }
    }
}

/// The Gödel chain over `0..=u64::MAX`, with `0` the only designated value and
/// `u64::MAX` the bottom, using the same tables as the finite Gödel matrices.
/// Supports `imp`, `and`, `or` and `neg`.
#[derive(Debug, Clone)]
pub struct InfiniteGodel {
    sig: Signature,
}

impl InfiniteGodel {
    pub fn new() -> Self {
        InfiniteGodel {
            sig: super::ipc_signature(),
        }
    }
}

impl Default for InfiniteGodel {
    fn default() -> Self {
        Self::new()
    }
}

impl Evaluator for InfiniteGodel {
    type Value = u64;

    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn is_designated(&self, v: &u64) -> bool {
        *v == 0
    }

    fn apply(&self, conn: usize, args: &[u64]) -> u64 {
        match self.sig.get(conn).name.as_str() {
            "imp" => {
                if args[0] >= args[1] {
                    0
                } else {
                    args[1]
                }
            }
            "and" => args[0].max(args[1]),
            "or" => args[0].min(args[1]),
            "neg" => {
                if args[0] == u64::MAX {
                    0
                } else {
                    u64::MAX
                }
            }
            other => unreachable!("connective {other} outside the signature"),
        }
    }

    fn value_name(&self, v: &u64) -> String {
        if *v == u64::MAX {
            "bottom".to_string()
        } else {
            v.to_string()
        }
    }
}
