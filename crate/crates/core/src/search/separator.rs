use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::lang::Formula;
use crate::matrix::{Matrix, MatrixError};
use crate::odometer::{Odometer, RangeProduct};

use super::{Budget, Deadline};

/// Upper limit on the bytes held by closure states, independent of the
/// state cap.
const MEMORY_CAP: usize = 1 << 30;

/// Table lookups allowed per permitted state before a closure gives up.
const WORK_PER_STATE: u64 = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// A supplied candidate formula was checked directly.
    Hint,
    /// A subalgebra of the second matrix maps onto the first one reflecting
    /// designation, which rules out any separator.
    Subalgebra,
    /// Closure over (truth function, value) pairs under one assignment.
    Exact,
    /// Depth-limited search over formulas, deduplicated by their truth
    /// functions in both matrices.
    Bounded,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Hint => "hint",
            Engine::Subalgebra => "subalgebra",
            Engine::Exact => "exact",
            Engine::Bounded => "bounded",
        })
    }
}

/// Outcome of a search for a tautology of `Mb` that `Ma` falsifies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separation {
    pub formula: Option<Formula>,
    /// A found formula is always definitive; an absent one only when the
    /// search space was exhausted.
    pub definitive: bool,
    pub engine: Engine,
}

impl Separation {
    pub fn found(&self) -> bool {
        self.formula.is_some()
    }
}

/// Searches for a formula that is a tautology of `mb` but not of `ma`.
pub fn separating_formula(ma: &Matrix, mb: &Matrix, budget: &Budget) -> Result<Separation, MatrixError> {
    separating_formula_with_hints(ma, mb, &[], budget)
}

/// As [`separating_formula`], trying the given candidates first.
pub fn separating_formula_with_hints(
    ma: &Matrix,
    mb: &Matrix,
    hints: &[Formula],
    budget: &Budget,
) -> Result<Separation, MatrixError> {
    if ma.signature() != mb.signature() {
        return Err(MatrixError::SignatureMismatch);
    }
    for h in hints {
        if mb.is_tautology(h)? && !ma.is_tautology(h)? {
            return Ok(Separation {
                formula: Some(h.clone()),
                definitive: true,
                engine: Engine::Hint,
            });
        }
    }
    if ma.designated().count() == ma.len() {
        // every formula is a tautology of `ma`
        return Ok(Separation {
            formula: None,
            definitive: true,
            engine: Engine::Exact,
        });
    }
    if covering_subalgebra(ma, mb) {
        return Ok(Separation {
            formula: None,
            definitive: true,
            engine: Engine::Subalgebra,
        });
    }
    let deadline = Deadline::new(budget);
    let exact = exact_engine(ma, mb, budget, &deadline);
    if exact.found() || exact.definitive {
        return Ok(exact);
    }
    Ok(bounded_engine(ma, mb, budget, &deadline))
}

/// The closure engine alone: definitive whenever the reachable states are
/// exhausted within the state cap.
pub fn exact_separator(ma: &Matrix, mb: &Matrix, budget: &Budget) -> Result<Separation, MatrixError> {
    if ma.signature() != mb.signature() {
        return Err(MatrixError::SignatureMismatch);
    }
    Ok(exact_engine(ma, mb, budget, &Deadline::new(budget)))
}

/// The depth-limited engine alone: definitive when no new truth-function
/// pair appears at some depth, or when the depth cap reaches the number of
/// possible pairs.
pub fn bounded_separator(ma: &Matrix, mb: &Matrix, budget: &Budget) -> Result<Separation, MatrixError> {
    if ma.signature() != mb.signature() {
        return Err(MatrixError::SignatureMismatch);
    }
    Ok(bounded_engine(ma, mb, budget, &Deadline::new(budget)))
}

fn exact_engine(ma: &Matrix, mb: &Matrix, budget: &Budget, deadline: &Deadline) -> Separation {
    match Closure::new(ma, mb, Side::Point).run(budget.state_cap, None, deadline) {
        Outcome::Found(f) => verified(ma, mb, f, Engine::Exact),
        outcome => Separation {
            formula: None,
            definitive: matches!(outcome, Outcome::Saturated),
            engine: Engine::Exact,
        },
    }
}

fn bounded_engine(ma: &Matrix, mb: &Matrix, budget: &Budget, deadline: &Deadline) -> Separation {
    let mut bounded = Closure::new(ma, mb, Side::Function);
    let bound = bounded.key_space();
    match bounded.run(budget.state_cap, Some(budget.depth_cap), deadline) {
        Outcome::Found(f) => verified(ma, mb, f, Engine::Bounded),
        Outcome::Saturated => Separation {
            formula: None,
            definitive: true,
            engine: Engine::Bounded,
        },
        Outcome::Capped => Separation {
            formula: None,
            definitive: bounded.depth_completed
                && bound.is_some_and(|b| budget.depth_cap as u128 >= b),
            engine: Engine::Bounded,
        },
    }
}

/// Looks for values `b_0, .., b_{k-1}` of `mb` such that every pair in the
/// subalgebra of `mb × ma` generated by the pairs `(b_i, i)` (and the
/// constants) has its first component undesignated or its second one
/// designated. Then every formula over `X1..Xk` that is a tautology of `mb`
/// holds in `ma` under `X_i -> i`, and by renaming variables no separator
/// exists at all.
fn covering_subalgebra(ma: &Matrix, mb: &Matrix) -> bool {
    let (na, nb) = (ma.len(), mb.len());
    let sig = ma.signature();
    if nb.checked_pow(na as u32).is_none_or(|n| n > 1 << 20) {
        return false;
    }
    let ok = |b: usize, a: usize| !mb.is_designated(b) || ma.is_designated(a);
    let mut choice = Odometer::new(na, nb);
    'choice: while let Some(bs) = choice.next() {
        let mut member = vec![false; na * nb];
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut seeds: Vec<(usize, usize)> = bs.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        seeds.extend(
            sig.iter()
                .enumerate()
                .filter(|(_, c)| c.arity == 0)
                .map(|(c, _)| (mb.apply(c, &[]), ma.apply(c, &[]))),
        );
        for (b, a) in seeds {
            if !ok(b, a) {
                continue 'choice;
            }
            if !std::mem::replace(&mut member[b * na + a], true) {
                pairs.push((b, a));
            }
        }
        let mut start = 0;
        while start < pairs.len() {
            let end = pairs.len();
            for (c, conn) in sig.iter().enumerate() {
                let r = conn.arity;
                for j in 0..r {
                    let ranges = (0..r)
                        .map(|p| match p.cmp(&j) {
                            std::cmp::Ordering::Less => (0, start),
                            std::cmp::Ordering::Equal => (start, end),
                            std::cmp::Ordering::Greater => (0, end),
                        })
                        .collect();
                    let mut tuples = RangeProduct::new(ranges);
                    let (mut xb, mut xa) = (vec![0; r], vec![0; r]);
                    while let Some(ids) = tuples.next() {
                        for (p, &id) in ids.iter().enumerate() {
                            (xb[p], xa[p]) = pairs[id];
                        }
                        let (b, a) = (mb.apply(c, &xb), ma.apply(c, &xa));
                        if !ok(b, a) {
                            continue 'choice;
                        }
                        if !std::mem::replace(&mut member[b * na + a], true) {
                            pairs.push((b, a));
                        }
                    }
                }
            }
            start = end;
        }
        return true;
    }
    false
}

fn verified(ma: &Matrix, mb: &Matrix, f: Formula, engine: Engine) -> Separation {
    debug_assert!(mb.is_tautology(&f).unwrap() && !ma.is_tautology(&f).unwrap());
    Separation {
        formula: Some(f),
        definitive: true,
        engine,
    }
}

enum Outcome {
    Found(Formula),
    Saturated,
    Capped,
}

/// What a state records about the first matrix.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    /// Its value under the assignment `X_i -> i`.
    Point,
    /// Its whole truth function over the `k` variables.
    Function,
}

#[derive(Clone)]
enum Origin {
    Var(usize),
    App(usize, Box<[u32]>),
}

/// Semi-naive closure over states `(g, s)` where `g` is the truth function
/// of a formula over `X1..Xk` in `mb` (`k = |ma|`) and `s` is its value or
/// truth function in `ma`. Formulas with equal states are interchangeable
/// as subformulas, so exhausting the reachable states decides separability.
struct Closure<'a> {
    ma: &'a Matrix,
    mb: &'a Matrix,
    side: Side,
    k: usize,
    g_len: usize,
    s_len: usize,
    arena: Vec<u8>,
    origins: Vec<Origin>,
    heads: HashMap<u64, u32>,
    chain: Vec<u32>,
    depth_completed: bool,
}

impl<'a> Closure<'a> {
    fn new(ma: &'a Matrix, mb: &'a Matrix, side: Side) -> Self {
        let k = ma.len();
        let g_len = mb.len().checked_pow(k as u32).unwrap_or(usize::MAX);
        let s_len = match side {
            Side::Point => 1,
            Side::Function => ma.len().checked_pow(k as u32).unwrap_or(usize::MAX),
        };
        Closure {
            ma,
            mb,
            side,
            k,
            g_len,
            s_len,
            arena: Vec::new(),
            origins: Vec::new(),
            heads: HashMap::new(),
            chain: Vec::new(),
            depth_completed: false,
        }
    }

    /// Number of distinct possible states, if it fits.
    fn key_space(&self) -> Option<u128> {
        let nb = self.mb.len() as u128;
        let na = self.ma.len() as u128;
        let g = nb.checked_pow(u32::try_from(self.g_len).ok()?)?;
        let s = match self.side {
            Side::Point => na,
            Side::Function => na.checked_pow(u32::try_from(self.s_len).ok()?)?,
        };
        g.checked_mul(s)
    }

    fn stride(&self) -> usize {
        self.g_len + self.s_len
    }

    fn state(&self, id: usize) -> &[u8] {
        let w = self.stride();
        &self.arena[id * w..(id + 1) * w]
    }

    fn insert(&mut self, key: &[u8], origin: Origin) -> Option<usize> {
        let mut h = DefaultHasher::new();
        key.hash(&mut h);
        let hash = h.finish();
        let mut cur = self.heads.get(&hash).copied().unwrap_or(u32::MAX);
        while cur != u32::MAX {
            if self.state(cur as usize) == key {
                return None;
            }
            cur = self.chain[cur as usize];
        }
        let id = self.origins.len();
        self.chain
            .push(self.heads.insert(hash, id as u32).unwrap_or(u32::MAX));
        self.arena.extend_from_slice(key);
        self.origins.push(origin);
        Some(id)
    }

    fn separates(&self, key: &[u8]) -> bool {
        let (g, s) = key.split_at(self.g_len);
        g.iter().all(|&v| self.mb.is_designated(v as usize))
            && s.iter().any(|&v| !self.ma.is_designated(v as usize))
    }

    fn formula(&self, id: usize, memo: &mut HashMap<usize, Formula>) -> Formula {
        if let Some(f) = memo.get(&id) {
            return f.clone();
        }
        let f = match &self.origins[id] {
            Origin::Var(i) => Formula::var(format!("X{}", i + 1)),
            Origin::App(c, args) => Formula::app(
                self.ma.signature().get(*c).name.clone(),
                args.iter().map(|&a| self.formula(a as usize, memo)).collect(),
            ),
        };
        memo.insert(id, f.clone());
        f
    }

    fn found(&self, id: usize) -> Outcome {
        Outcome::Found(self.formula(id, &mut HashMap::new()))
    }

    fn too_big(&self, state_cap: u64) -> bool {
        self.origins.len() as u64 > state_cap || self.arena.len() > MEMORY_CAP
    }

    fn run(&mut self, state_cap: u64, depth_cap: Option<usize>, deadline: &Deadline) -> Outcome {
        let (na, nb, k) = (self.ma.len(), self.mb.len(), self.k);
        if self.g_len == usize::MAX
            || self.s_len == usize::MAX
            || na > 255
            || nb > 255
            || self.stride() > MEMORY_CAP
        {
            return Outcome::Capped;
        }
        let sig = self.ma.signature().clone();
        let mut key = vec![0u8; self.stride()];

        // projections, then constants
        for i in 0..k {
            let mut odo = Odometer::new(k, nb);
            let mut x = 0;
            while let Some(t) = odo.next() {
                key[x] = t[i] as u8;
                x += 1;
            }
            self.fill_var_side(&mut key, i);
            if let Some(id) = self.insert(&key, Origin::Var(i)) {
                if self.separates(&key) {
                    return self.found(id);
                }
            }
        }
        for (c, conn) in sig.iter().enumerate() {
            if conn.arity == 0 {
                let gb = self.mb.apply(c, &[]) as u8;
                let sa = self.ma.apply(c, &[]) as u8;
                key[..self.g_len].fill(gb);
                key[self.g_len..].fill(sa);
                if let Some(id) = self.insert(&key, Origin::App(c, Box::new([]))) {
                    if self.separates(&key) {
                        return self.found(id);
                    }
                }
            }
        }

        let mut start = 0;
        let mut rounds = 0;
        let mut ticks = 0u32;
        let work_cap = state_cap.saturating_mul(WORK_PER_STATE);
        let mut work = 0u64;
        loop {
            let end = self.origins.len();
            if start == end {
                return Outcome::Saturated;
            }
            if depth_cap.is_some_and(|d| rounds >= d) {
                self.depth_completed = true;
                return Outcome::Capped;
            }
            rounds += 1;
            for (c, conn) in sig.iter().enumerate() {
                let r = conn.arity;
                let tb = self.mb.table(c).to_vec();
                let ta = self.ma.table(c).to_vec();
                for j in 0..r {
                    let ranges = (0..r)
                        .map(|p| match p.cmp(&j) {
                            std::cmp::Ordering::Less => (0, start),
                            std::cmp::Ordering::Equal => (start, end),
                            std::cmp::Ordering::Greater => (0, end),
                        })
                        .collect();
                    let mut tuples = RangeProduct::new(ranges);
                    while let Some(ids) = tuples.next() {
                        ticks = ticks.wrapping_add(1);
                        work += self.stride() as u64;
                        if work > work_cap || (ticks.is_multiple_of(1024) && deadline.expired()) {
                            return Outcome::Capped;
                        }
                        for x in 0..self.g_len {
                            let idx = ids
                                .iter()
                                .fold(0, |acc, &id| acc * nb + self.state(id)[x] as usize);
                            key[x] = tb[idx] as u8;
                        }
                        for y in 0..self.s_len {
                            let idx = ids.iter().fold(0, |acc, &id| {
                                acc * na + self.state(id)[self.g_len + y] as usize
                            });
                            key[self.g_len + y] = ta[idx] as u8;
                        }
                        let origin = Origin::App(c, ids.iter().map(|&i| i as u32).collect());
                        if let Some(id) = self.insert(&key, origin) {
                            if self.separates(&key) {
                                return self.found(id);
                            }
                            if self.too_big(state_cap) {
                                return Outcome::Capped;
                            }
                        }
                    }
                }
            }
            start = end;
        }
    }

    fn fill_var_side(&self, key: &mut [u8], i: usize) {
        match self.side {
            Side::Point => key[self.g_len] = i as u8,
            Side::Function => {
                let mut odo = Odometer::new(self.k, self.ma.len());
                let mut y = 0;
                while let Some(t) = odo.next() {
                    key[self.g_len + y] = t[i] as u8;
                    y += 1;
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Equal,
    /// The first matrix has strictly fewer tautologies.
    FirstBetter,
    SecondBetter,
    Incomparable,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Equal => "equal",
            Relation::FirstBetter => "first-better",
            Relation::SecondBetter => "second-better",
            Relation::Incomparable => "incomparable",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    /// Read off the two searches, treating an unknown as "none found".
    pub relation: Relation,
    pub definitive: bool,
    /// A tautology of the second matrix falsified in the first.
    pub forward: Separation,
    /// A tautology of the first matrix falsified in the second.
    pub backward: Separation,
}

pub fn compare(m1: &Matrix, m2: &Matrix, budget: &Budget) -> Result<Comparison, MatrixError> {
    compare_with_hints(m1, m2, &[], budget)
}

pub fn compare_with_hints(
    m1: &Matrix,
    m2: &Matrix,
    hints: &[Formula],
    budget: &Budget,
) -> Result<Comparison, MatrixError> {
    let forward = separating_formula_with_hints(m1, m2, hints, budget)?;
    let backward = separating_formula_with_hints(m2, m1, hints, budget)?;
    let relation = match (forward.found(), backward.found()) {
        (false, false) => Relation::Equal,
        (true, false) => Relation::FirstBetter,
        (false, true) => Relation::SecondBetter,
        (true, true) => Relation::Incomparable,
    };
    Ok(Comparison {
        relation,
        definitive: forward.definitive && backward.definitive,
        forward,
        backward,
    })
}
