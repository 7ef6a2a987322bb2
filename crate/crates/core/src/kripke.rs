//! Finite Kripke models, the bit-sequence matrices they induce, approximation
//! chains built from refuting models, and Lindenbaum matrices for decidable
//! logics.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::lang::{formulas_up_to_depth, Formula, Signature};
use crate::matrix::{ipc_signature, product, Matrix, MatrixError, Valuation};

/// Worlds are packed into a `u64` mask.
pub const MAX_WORLDS: usize = 64;

/// Largest value set `matrix_of` and `lindenbaum_matrix` will build.
pub const VALUE_CAP: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Modal,
    Intuitionistic,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Modal => "modal",
            Mode::Intuitionistic => "intuitionistic",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = KripkeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "modal" => Ok(Mode::Modal),
            "intuitionistic" => Ok(Mode::Intuitionistic),
            _ => Err(KripkeError::UnknownMode(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KripkeError {
    #[error("a Kripke model needs at least one world")]
    NoWorlds,
    #[error("at most {MAX_WORLDS} worlds are supported, got {0}")]
    TooManyWorlds(usize),
    #[error("duplicate world `{0}`")]
    DuplicateWorld(String),
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("world index {0} out of range")]
    WorldOutOfRange(usize),
    #[error("unknown mode `{0}`, expected modal or intuitionistic")]
    UnknownMode(String),
    #[error("intuitionistic models need a root")]
    MissingRoot,
    #[error("accessibility is not reflexive at `{0}`")]
    NotReflexive(String),
    #[error("accessibility is not transitive: `{0}` -> `{1}` -> `{2}`")]
    NotTransitive(String, String, String),
    #[error("world `{0}` is not reachable from the root")]
    Unreachable(String),
    #[error("P({var}) is not upward closed: contains `{from}` but not `{to}`")]
    NotMonotone { var: String, from: String, to: String },
    #[error("variable `{0}` has no assignment")]
    UnassignedVariable(String),
    #[error("connective `{0}` is not interpreted in {1} models")]
    UnknownConnective(String, Mode),
    #[error("{0} values exceed the cap of {1}")]
    TooManyValues(usize, usize),
    #[error("all models must share one mode")]
    MixedModes,
    #[error("no listed model refutes `{0}`")]
    NoRefutingModel(String),
    #[error("depth {depth} or variable bound {vars} not allowed")]
    BadBounds { depth: usize, vars: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// A finite Kripke model `<W, R, P>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    worlds: Vec<String>,
    /// `succ[a]` has bit `b` set iff `a R b`.
    succ: Vec<u64>,
    assignment: BTreeMap<String, u64>,
    mode: Mode,
    root: Option<usize>,
}

pub fn modal_signature() -> Signature {
    Signature::new([
        ("neg", 1),
        ("and", 2),
        ("or", 2),
        ("imp", 2),
        ("box", 1),
        ("diamond", 1),
    ])
    .expect("static signature")
}

impl KripkeModel {
    /// Builds and validates a model. `rel` and `assignment` refer to worlds
    /// by index.
    pub fn new(
        worlds: Vec<String>,
        rel: &[(usize, usize)],
        assignment: BTreeMap<String, Vec<usize>>,
        mode: Mode,
        root: Option<usize>,
    ) -> Result<Self, KripkeError> {
        let n = worlds.len();
        if n == 0 {
            return Err(KripkeError::NoWorlds);
        }
        if n > MAX_WORLDS {
            return Err(KripkeError::TooManyWorlds(n));
        }
        for (i, w) in worlds.iter().enumerate() {
            if worlds[..i].contains(w) {
                return Err(KripkeError::DuplicateWorld(w.clone()));
            }
        }
        let check = |w: usize| {
            if w < n {
                Ok(w)
            } else {
                Err(KripkeError::WorldOutOfRange(w))
            }
        };
        let mut succ = vec![0u64; n];
        for &(a, b) in rel {
            succ[check(a)?] |= 1 << check(b)?;
        }
        let mut p = BTreeMap::new();
        for (var, ws) in assignment {
            let mut mask = 0u64;
            for w in ws {
                mask |= 1 << check(w)?;
            }
            p.insert(var, mask);
        }
        if let Some(r) = root {
            check(r)?;
        }
        let model = KripkeModel {
            worlds,
            succ,
            assignment: p,
            mode,
            root,
        };
        if mode == Mode::Intuitionistic {
            model.validate_intuitionistic()?;
        }
        Ok(model)
    }

    /// Like [`KripkeModel::new`] with worlds referred to by name.
    pub fn from_names(
        worlds: Vec<String>,
        rel: &[(&str, &str)],
        assignment: &[(&str, &[&str])],
        mode: Mode,
        root: Option<&str>,
    ) -> Result<Self, KripkeError> {
        let idx = |w: &str| {
            worlds
                .iter()
                .position(|x| x == w)
                .ok_or_else(|| KripkeError::UnknownWorld(w.to_string()))
        };
        let rel = rel
            .iter()
            .map(|&(a, b)| Ok((idx(a)?, idx(b)?)))
            .collect::<Result<Vec<_>, KripkeError>>()?;
        let mut p = BTreeMap::new();
        for &(var, ws) in assignment {
            let ws = ws.iter().map(|w| idx(w)).collect::<Result<Vec<_>, _>>()?;
            p.insert(var.to_string(), ws);
        }
        let root = root.map(idx).transpose()?;
        KripkeModel::new(worlds, &rel, p, mode, root)
    }

    fn validate_intuitionistic(&self) -> Result<(), KripkeError> {
        let root = self.root.ok_or(KripkeError::MissingRoot)?;
        let n = self.worlds.len();
        for a in 0..n {
            if self.succ[a] & (1 << a) == 0 {
                return Err(KripkeError::NotReflexive(self.worlds[a].clone()));
            }
            for b in bits(self.succ[a]) {
                for c in bits(self.succ[b]) {
                    if self.succ[a] & (1 << c) == 0 {
                        return Err(KripkeError::NotTransitive(
                            self.worlds[a].clone(),
                            self.worlds[b].clone(),
                            self.worlds[c].clone(),
                        ));
                    }
                }
            }
        }
        if let Some(w) = (0..n).find(|&w| self.succ[root] & (1 << w) == 0) {
            return Err(KripkeError::Unreachable(self.worlds[w].clone()));
        }
        for (var, &mask) in &self.assignment {
            if let Some((a, b)) = self.monotonicity_gap(mask) {
                return Err(KripkeError::NotMonotone {
                    var: var.clone(),
                    from: self.worlds[a].clone(),
                    to: self.worlds[b].clone(),
                });
            }
        }
        Ok(())
    }

    fn monotonicity_gap(&self, mask: u64) -> Option<(usize, usize)> {
        bits(mask).find_map(|a| {
            bits(self.succ[a])
                .find(|&b| mask & (1 << b) == 0)
                .map(|b| (a, b))
        })
    }

    /// The chain `w1 <= w2 <= ... <= wn` as a rooted intuitionistic frame
    /// with an empty assignment.
    pub fn chain(n: usize) -> Result<Self, KripkeError> {
        let worlds = (1..=n).map(|i| format!("w{i}")).collect();
        let rel: Vec<_> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
        KripkeModel::new(worlds, &rel, BTreeMap::new(), Mode::Intuitionistic, (n > 0).then_some(0))
    }

    /// The tree with root `r` and two leaves `a`, `b`, with an empty assignment.
    pub fn fork() -> Self {
        KripkeModel::from_names(
            vec!["r".into(), "a".into(), "b".into()],
            &[("r", "r"), ("a", "a"), ("b", "b"), ("r", "a"), ("r", "b")],
            &[],
            Mode::Intuitionistic,
            Some("r"),
        )
        .expect("static model")
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_index(&self, name: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w == name)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    /// Accessibility pairs in world order.
    pub fn relation(&self) -> Vec<(usize, usize)> {
        (0..self.worlds.len())
            .flat_map(|a| bits(self.succ[a]).map(move |b| (a, b)))
            .collect()
    }

    pub fn accessible(&self, a: usize, b: usize) -> bool {
        self.succ[a] & (1 << b) != 0
    }

    /// The worlds assigned to each variable, by index.
    pub fn assignment(&self) -> BTreeMap<String, Vec<usize>> {
        self.assignment
            .iter()
            .map(|(v, &m)| (v.clone(), bits(m).collect()))
            .collect()
    }

    /// The same frame under another assignment.
    pub fn with_assignment(&self, assignment: BTreeMap<String, Vec<usize>>) -> Result<Self, KripkeError> {
        KripkeModel::new(
            self.worlds.clone(),
            &self.relation(),
            assignment,
            self.mode,
            self.root,
        )
    }

    /// Connectives the model interprets.
    pub fn signature(&self) -> Signature {
        match self.mode {
            Mode::Modal => modal_signature(),
            Mode::Intuitionistic => ipc_signature(),
        }
    }

    fn all(&self) -> u64 {
        u64::MAX >> (64 - self.worlds.len())
    }

    /// Applies a connective to truth sets.
    fn apply(&self, conn: &str, args: &[u64]) -> Result<u64, KripkeError> {
        let all = self.all();
        let n = self.worlds.len();
        let every = |p: &dyn Fn(usize) -> bool| {
            (0..n).filter(|&a| p(a)).fold(0u64, |m, a| m | 1 << a)
        };
        let imp = |x: u64, y: u64| match self.mode {
            Mode::Modal => (!x | y) & all,
            Mode::Intuitionistic => every(&|a| self.succ[a] & x & !y == 0),
        };
        Ok(match (conn, args) {
            ("and", &[x, y]) => x & y,
            ("or", &[x, y]) => x | y,
            ("imp", &[x, y]) => imp(x, y),
            ("neg", &[x]) => match self.mode {
                Mode::Modal => !x & all,
                Mode::Intuitionistic => imp(x, 0),
            },
            ("box", &[x]) if self.mode == Mode::Modal => every(&|a| self.succ[a] & !x == 0),
            ("diamond", &[x]) if self.mode == Mode::Modal => every(&|a| self.succ[a] & x != 0),
            _ => return Err(KripkeError::UnknownConnective(conn.to_string(), self.mode)),
        })
    }

    /// The set of worlds where `f` is true, as a mask over world indices.
    fn truth_set(&self, f: &Formula) -> Result<u64, KripkeError> {
        match f {
            Formula::Var(v) => self
                .assignment
                .get(v)
                .copied()
                .ok_or_else(|| KripkeError::UnassignedVariable(v.clone())),
            Formula::App(c, args) => {
                let args = args
                    .iter()
                    .map(|a| self.truth_set(a))
                    .collect::<Result<Vec<_>, _>>()?;
                self.apply(c, &args)
            }
        }
    }

    pub fn eval_world(&self, world: usize, f: &Formula) -> Result<bool, KripkeError> {
        if world >= self.worlds.len() {
            return Err(KripkeError::WorldOutOfRange(world));
        }
        Ok(self.truth_set(f)? & (1 << world) != 0)
    }

    /// Truth in the model: at every world in modal mode, at the root in
    /// intuitionistic mode.
    pub fn holds(&self, f: &Formula) -> Result<bool, KripkeError> {
        let t = self.truth_set(f)?;
        Ok(match (self.mode, self.root) {
            (Mode::Intuitionistic, Some(r)) => t & (1 << r) != 0,
            _ => t == self.all(),
        })
    }

    /// Converts a world mask to a bit sequence value (first world most
    /// significant).
    fn to_seq(&self, mask: u64) -> u64 {
        let n = self.worlds.len();
        (0..n).filter(|&w| mask & (1 << w) != 0).fold(0, |s, w| s | 1 << (n - 1 - w))
    }

    fn mask_of_seq(&self, seq: u64) -> u64 {
        self.to_seq(seq)
    }

    /// The values of `M_K` as world masks, in ascending bit sequence order.
    fn value_masks(&self) -> Result<Vec<u64>, KripkeError> {
        let n = self.worlds.len();
        if n > 20 {
            return Err(KripkeError::TooManyValues(usize::MAX, VALUE_CAP));
        }
        let mut out = Vec::new();
        for seq in 0..(1u64 << n) {
            let mask = self.mask_of_seq(seq);
            if self.mode == Mode::Intuitionistic && self.monotonicity_gap(mask).is_some() {
                continue;
            }
            out.push(mask);
            if out.len() > VALUE_CAP {
                return Err(KripkeError::TooManyValues(out.len(), VALUE_CAP));
            }
        }
        Ok(out)
    }

    fn seq_name(&self, mask: u64) -> String {
        let n = self.worlds.len();
        (0..n)
            .map(|w| if mask & (1 << w) != 0 { '1' } else { '0' })
            .collect()
    }

    /// The matrix `M_K` of bit sequences over the worlds.
    pub fn matrix_of(&self) -> Result<Matrix, KripkeError> {
        let masks = self.value_masks()?;
        let index: HashMap<u64, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let sig = self.signature();
        let names: Vec<String> = sig.iter().map(|c| c.name.clone()).collect();
        let top = index[&self.all()];
        let mut args = Vec::new();
        let mut failure = None;
        let m = Matrix::from_fn(
            sig,
            masks.iter().map(|&m| self.seq_name(m)).collect(),
            vec![top],
            |c, a| {
                args.clear();
                args.extend(a.iter().map(|&v| masks[v]));
                match self.apply(&names[c], &args) {
                    Ok(r) => index[&r],
                    Err(e) => {
                        failure.get_or_insert(e);
                        0
                    }
                }
            },
        )?;
        match failure {
            Some(e) => Err(e),
            None => Ok(m),
        }
    }

    /// The valuation `I_K` of `matrix_of(self)` induced by the assignment.
    pub fn kripke_valuation(&self) -> Valuation {
        self.assignment
            .iter()
            .map(|(v, &mask)| {
                let seq = self.to_seq(mask);
                // position among the admissible sequences below it
                let rank = (0..seq)
                    .filter(|&s| {
                        self.mode == Mode::Modal || self.monotonicity_gap(self.mask_of_seq(s)).is_none()
                    })
                    .count();
                (v.clone(), rank)
            })
            .collect()
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let b = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(b)
    })
}

/// The approximation chain `M_1, ..., M_n` for the first `n` candidates:
/// `M_1` is the matrix of the smallest listed model refuting the first
/// candidate and `M_{i+1}` is `M_i` times the matrix of the smallest model
/// refuting candidate `i + 1`. Smallest means fewest worlds, ties going to
/// the earlier model in the list.
pub fn approx_chain(
    models: &[KripkeModel],
    candidates: impl IntoIterator<Item = Formula>,
    n: usize,
) -> Result<Vec<Matrix>, KripkeError> {
    if let Some(first) = models.first() {
        if models.iter().any(|k| k.mode != first.mode) {
            return Err(KripkeError::MixedModes);
        }
    }
    let mut chain: Vec<Matrix> = Vec::with_capacity(n);
    for f in candidates.into_iter().take(n) {
        let mut best: Option<&KripkeModel> = None;
        for k in models {
            // models whose assignment misses a variable of `f` do not refute it
            if matches!(k.holds(&f), Ok(false))
                && best.is_none_or(|b| k.worlds.len() < b.worlds.len())
            {
                best = Some(k);
            }
        }
        let k = best.ok_or_else(|| KripkeError::NoRefutingModel(f.to_string()))?;
        let mk = k.matrix_of()?;
        let next = match chain.last() {
            Some(prev) => product(prev, &mk)?,
            None => mk,
        };
        chain.push(next);
    }
    Ok(chain)
}

/// A deterministic membership test for a logic.
pub trait DecisionOracle {
    fn signature(&self) -> &Signature;

    fn member(&self, f: &Formula) -> bool;
}

/// The logic of a finite matrix, decided by its tautology checker.
#[derive(Debug, Clone)]
pub struct MatrixOracle(pub Matrix);

impl DecisionOracle for MatrixOracle {
    fn signature(&self) -> &Signature {
        self.0.signature()
    }

    fn member(&self, f: &Formula) -> bool {
        self.0.is_tautology(f).unwrap_or(false)
    }
}

/// The variables `X1, ..., Xk` used by Lindenbaum matrices.
pub fn lindenbaum_vars(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("X{i}")).collect()
}

/// The matrix whose values are the formulas of depth at most `depth` over
/// `X1..Xk`, plus a designated sentinel for everything deeper.
pub fn lindenbaum_matrix(oracle: &dyn DecisionOracle, depth: usize, k: usize) -> Result<Matrix, KripkeError> {
    lindenbaum_matrix_capped(oracle, depth, k, VALUE_CAP)
}

pub fn lindenbaum_matrix_capped(
    oracle: &dyn DecisionOracle,
    depth: usize,
    k: usize,
    cap: usize,
) -> Result<Matrix, KripkeError> {
    if k == 0 {
        return Err(KripkeError::BadBounds { depth, vars: k });
    }
    let sig = oracle.signature().clone();
    let formulas = formulas_up_to_depth(&sig, &lindenbaum_vars(k), depth);
    let n = formulas.len() + 1;
    if n > cap {
        return Err(KripkeError::TooManyValues(n, cap));
    }
    let max_arity = sig.iter().map(|c| c.arity).max().unwrap_or(0);
    let cells = (n as u128).checked_pow(max_arity as u32).unwrap_or(u128::MAX);
    if cells > (cap as u128) * (cap as u128) {
        return Err(KripkeError::TooManyValues(n, cap));
    }
    let mut names: Vec<String> = formulas.iter().map(|f| f.to_string()).collect();
    let mut top = "top".to_string();
    while names.contains(&top) {
        top.push('\'');
    }
    names.push(top);
    let index: HashMap<&Formula, usize> = formulas.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let sentinel = n - 1;
    let mut designated: Vec<usize> = formulas
        .iter()
        .enumerate()
        .filter(|(_, f)| oracle.member(f))
        .map(|(i, _)| i)
        .collect();
    designated.push(sentinel);
    let conns: Vec<String> = sig.iter().map(|c| c.name.clone()).collect();
    Ok(Matrix::from_fn(sig, names, designated, |c, a| {
        if a.contains(&sentinel) {
            return sentinel;
        }
        let f = Formula::app(conns[c].clone(), a.iter().map(|&v| formulas[v].clone()).collect());
        index.get(&f).copied().unwrap_or(sentinel)
    })?)
}
