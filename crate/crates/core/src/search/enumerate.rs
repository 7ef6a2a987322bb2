use crate::calculus::Calculus;
use crate::lang::Signature;
use crate::matrix::{Matrix, MatrixError};
use crate::normality::CoverTest;
use crate::odometer::Odometer;

use super::{Budget, Deadline};

/// Position of a matrix in the canonical enumeration order: the designated
/// set as a bit mask (bit `v` for value `v`), then all table entries
/// concatenated in signature order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Encoding {
    pub designated: u64,
    pub cells: Vec<u32>,
}

pub fn encode(m: &Matrix) -> Encoding {
    let designated = m
        .designated()
        .fold(0u64, |acc, v| acc | (1u64 << v));
    let cells = (0..m.signature().len())
        .flat_map(|c| m.table(c).iter().copied())
        .collect();
    Encoding { designated, cells }
}

/// Number of `m`-valued matrices over `sig`, or `None` on overflow.
pub fn matrix_count(sig: &Signature, m: usize) -> Option<u128> {
    let mut count = 1u128.checked_shl(m as u32)?;
    for c in sig.iter() {
        let cells = (m as u128).checked_pow(c.arity as u32)?;
        count = count.checked_mul((m as u128).checked_pow(u32::try_from(cells).ok()?)?)?;
    }
    Some(count)
}

/// Walks all `m`-valued matrices over a signature in canonical order,
/// handing out a borrowed matrix that is rewritten in place at each step.
#[derive(Debug, Clone)]
pub struct MatrixCursor {
    m: usize,
    mask: u64,
    cells: Vec<u32>,
    offsets: Vec<usize>,
    current: Matrix,
    started: bool,
    done: bool,
    symmetry: Option<Symmetry>,
}

impl MatrixCursor {
    pub fn new(sig: &Signature, m: usize, symmetry_reduce: bool) -> Self {
        assert!((1..64).contains(&m), "value count out of range");
        let mut offsets = Vec::with_capacity(sig.len() + 1);
        let mut total = 0;
        for c in sig.iter() {
            offsets.push(total);
            total += m.pow(c.arity as u32);
        }
        offsets.push(total);
        let values = (0..m).map(|v| v.to_string()).collect();
        let tables = sig
            .iter()
            .map(|c| vec![0u32; m.pow(c.arity as u32)])
            .collect();
        let current = Matrix::from_parts(sig.clone(), values, vec![false; m], tables);
        MatrixCursor {
            m,
            mask: 0,
            cells: vec![0; total],
            offsets,
            symmetry: symmetry_reduce.then(|| Symmetry::new(sig, m)),
            current,
            started: false,
            done: false,
        }
    }

    fn step(&mut self) -> bool {
        for p in (0..self.cells.len()).rev() {
            self.cells[p] += 1;
            if (self.cells[p] as usize) < self.m {
                return true;
            }
            self.cells[p] = 0;
        }
        self.mask += 1;
        self.mask < (1u64 << self.m)
    }

    fn sync(&mut self) {
        let designated = (0..self.m).map(|v| self.mask >> v & 1 == 1).collect();
        let tables = self
            .offsets
            .windows(2)
            .map(|w| self.cells[w[0]..w[1]].to_vec())
            .collect();
        self.current = Matrix::from_parts(
            self.current.signature().clone(),
            self.current.values().to_vec(),
            designated,
            tables,
        );
    }

    /// Advances to the next matrix (the next orbit representative when
    /// symmetry reduction is on).
    pub fn advance(&mut self) -> Option<&Matrix> {
        loop {
            if self.done {
                return None;
            }
            if self.started {
                if !self.step() {
                    self.done = true;
                    return None;
                }
            } else {
                self.started = true;
            }
            let canonical = match &self.symmetry {
                Some(s) => s.is_canonical(self.mask, &self.cells, &self.offsets),
                None => true,
            };
            if canonical {
                self.sync();
                return Some(&self.current);
            }
        }
    }

    pub fn encoding(&self) -> Encoding {
        Encoding {
            designated: self.mask,
            cells: self.cells.clone(),
        }
    }
}

/// Owned-matrix iterator over [`MatrixCursor`].
#[derive(Debug, Clone)]
pub struct MatrixStream(MatrixCursor);

impl Iterator for MatrixStream {
    type Item = Matrix;

    fn next(&mut self) -> Option<Matrix> {
        self.0.advance().cloned()
    }
}

/// All `m`-valued matrices over `sig` in canonical order; with
/// `symmetry_reduce`, only the smallest encoding of each value-permutation
/// orbit.
pub fn enumerate_matrices(sig: &Signature, m: usize, symmetry_reduce: bool) -> MatrixStream {
    MatrixStream(MatrixCursor::new(sig, m, symmetry_reduce))
}

#[derive(Debug, Clone)]
struct Symmetry {
    /// Non-identity permutations of the values.
    perms: Vec<Vec<usize>>,
    /// Per permutation and connective: for each target tuple index, the
    /// source tuple index it is copied from.
    sources: Vec<Vec<Vec<usize>>>,
}

impl Symmetry {
    fn new(sig: &Signature, m: usize) -> Self {
        let mut perms = Vec::new();
        let mut odo = Odometer::new(m, m);
        while let Some(p) = odo.next() {
            let mut seen = vec![false; m];
            if p.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
                && p.iter().enumerate().any(|(i, &v)| i != v)
            {
                perms.push(p.to_vec());
            }
        }
        let sources = perms
            .iter()
            .map(|p| {
                let mut inv = vec![0; m];
                for (v, &pv) in p.iter().enumerate() {
                    inv[pv] = v;
                }
                sig.iter()
                    .map(|c| {
                        let mut out = Vec::with_capacity(m.pow(c.arity as u32));
                        let mut odo = Odometer::new(c.arity, m);
                        while let Some(args) = odo.next() {
                            out.push(args.iter().fold(0, |acc, &a| acc * m + inv[a]));
                        }
                        out
                    })
                    .collect()
            })
            .collect();
        Symmetry { perms, sources }
    }

    fn is_canonical(&self, mask: u64, cells: &[u32], offsets: &[usize]) -> bool {
        'perm: for (p, sources) in self.perms.iter().zip(&self.sources) {
            let image = p
                .iter()
                .enumerate()
                .fold(0u64, |acc, (v, &pv)| acc | ((mask >> v & 1) << pv));
            if image != mask {
                if image < mask {
                    return false;
                }
                continue;
            }
            for (c, src) in sources.iter().enumerate() {
                let base = offsets[c];
                for (i, &s) in src.iter().enumerate() {
                    let permuted = p[cells[base + s] as usize] as u32;
                    let own = cells[base + i];
                    if permuted != own {
                        if permuted < own {
                            return false;
                        }
                        continue 'perm;
                    }
                }
            }
        }
        true
    }
}

/// Result of sweeping the `m`-valued matrices for covers of a calculus.
#[derive(Debug, Clone)]
pub struct CoverSweep {
    pub covers: Vec<Matrix>,
    pub examined: u64,
    /// Whether every candidate was examined within budget.
    pub complete: bool,
}

pub fn enumerate_covers(
    c: &Calculus,
    m: usize,
    symmetry_reduce: bool,
    budget: &Budget,
) -> Result<CoverSweep, MatrixError> {
    let test = CoverTest::new(c)?;
    let deadline = Deadline::new(budget);
    let mut cursor = MatrixCursor::new(c.signature(), m, symmetry_reduce);
    let mut sweep = CoverSweep {
        covers: Vec::new(),
        examined: 0,
        complete: true,
    };
    loop {
        if sweep.examined >= budget.max_candidates || (sweep.examined.is_multiple_of(4096) && deadline.expired())
        {
            sweep.complete = cursor.advance().is_none();
            break;
        }
        let Some(matrix) = cursor.advance() else { break };
        sweep.examined += 1;
        if test.accepts(matrix) {
            sweep.covers.push(matrix.clone());
        }
    }
    Ok(sweep)
}
