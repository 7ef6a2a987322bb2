//! Built-in matrix families.
//!
//! The Gödel matrices use `0` as the single designated ("most true") value
//! and `m-1` as the bottom: `or` is `min`, `and` is `max`, `imp(v,w)` is `0`
//! when `v >= w` and `w` otherwise, and `neg` maps `m-1` to `0` and every
//! other value to `m-1`.

use super::{Matrix, MatrixError};
use crate::lang::Signature;

pub fn ipc_signature() -> Signature {
    Signature::new([("imp", 2), ("and", 2), ("or", 2), ("neg", 1)]).expect("static signature")
}

pub fn imp_bot_signature() -> Signature {
    Signature::new([("imp", 2), ("bot", 0)]).expect("static signature")
}

pub fn k_signature() -> Signature {
    Signature::new([("eq", 2), ("circ", 1)]).expect("static signature")
}

fn godel_op(m: usize, name: &str, a: &[usize]) -> usize {
    match name {
        "imp" => {
            if a[0] >= a[1] {
                0
            } else {
                a[1]
            }
        }
        "and" => a[0].max(a[1]),
        "or" => a[0].min(a[1]),
        "neg" => {
            if a[0] == m - 1 {
                0
            } else {
                m - 1
            }
        }
        "bot" => m - 1,
        _ => unreachable!(),
    }
}

fn numbered(n: usize) -> Vec<String> {
    (0..n).map(|v| v.to_string()).collect()
}

/// The `m`-valued Gödel matrix over `imp, and, or, neg`.
pub fn godel(m: usize) -> Result<Matrix, MatrixError> {
    if m < 2 {
        return Err(MatrixError::ParameterOutOfRange(m));
    }
    let sig = ipc_signature();
    let names: Vec<String> = sig.iter().map(|c| c.name.clone()).collect();
    Matrix::from_fn(sig, numbered(m), vec![0], |c, a| godel_op(m, &names[c], a))
}

/// The classical two-valued matrix, i.e. `godel(2)`.
pub fn classical() -> Matrix {
    godel(2).expect("m = 2 is in range")
}

/// The `imp`/`bot` fragment of the `m`-valued Gödel matrix, with `bot = m-1`.
pub fn godel_imp_bot(m: usize) -> Result<Matrix, MatrixError> {
    if m < 2 {
        return Err(MatrixError::ParameterOutOfRange(m));
    }
    let sig = imp_bot_signature();
    let names: Vec<String> = sig.iter().map(|c| c.name.clone()).collect();
    Matrix::from_fn(sig, numbered(m), vec![0], |c, a| godel_op(m, &names[c], a))
}

/// The Gödel matrix extended by an absorbing value `top` that is designated
/// alongside `0`. Modus ponens fails for it: `A = top`, `B` undesignated.
pub fn godel_top(m: usize) -> Result<Matrix, MatrixError> {
    if m < 2 {
        return Err(MatrixError::ParameterOutOfRange(m));
    }
    let sig = ipc_signature();
    let names: Vec<String> = sig.iter().map(|c| c.name.clone()).collect();
    let mut values = numbered(m);
    values.push("top".to_string());
    let top = m;
    Matrix::from_fn(sig, values, vec![0, top], |c, a| {
        if a.contains(&top) {
            top
        } else {
            godel_op(m, &names[c], a)
        }
    })
}

/// The `n`-valued cover of the `eq`/`circ` calculus: `circ` is a saturating
/// successor and `eq(v,w)` is designated exactly when `v < w` or `v = n-1`.
pub fn k_matrix(n: usize) -> Result<Matrix, MatrixError> {
    if n < 1 {
        return Err(MatrixError::ParameterOutOfRange(n));
    }
    Matrix::from_fn(k_signature(), numbered(n), vec![0], |c, a| match c {
        0 => {
            if a[0] < a[1] || a[0] == n - 1 {
                0
            } else {
                1
            }
        }
        _ => (a[0] + 1).min(n - 1),
    })
}

/// The five-valued matrix of the three-world Kripke tree (root below two
/// leaves), over `imp, and, or, neg`. Bits follow the world order root, left,
/// right; `and`/`or` are bitwise and `neg(x)` is `imp(x, 000)`.
pub fn t3() -> Matrix {
    const VALUES: [&str; 5] = ["000", "001", "010", "011", "111"];
    const BITS: [u8; 5] = [0b000, 0b001, 0b010, 0b011, 0b111];
    #[rustfmt::skip]
    const IMP: [usize; 25] = [
        4, 4, 4, 4, 4,
        2, 4, 2, 4, 4,
        1, 1, 4, 4, 4,
        0, 1, 2, 4, 4,
        0, 1, 2, 3, 4,
    ];
    let index = |bits: u8| BITS.iter().position(|&b| b == bits).expect("upward closed");
    Matrix::from_fn(
        ipc_signature(),
        VALUES.iter().map(|s| s.to_string()).collect(),
        vec![4],
        |c, a| match c {
            0 => IMP[a[0] * 5 + a[1]],
            1 => index(BITS[a[0]] & BITS[a[1]]),
            2 => index(BITS[a[0]] | BITS[a[1]]),
            _ => IMP[a[0] * 5],
        },
    )
    .expect("static table")
}
