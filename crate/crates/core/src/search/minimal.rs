use crate::calculus::Calculus;
use crate::lang::{formulas_up_to_depth, Formula};
use crate::matrix::{Compiled, Matrix, MatrixError};

use super::enumerate::enumerate_covers;
use super::separator::separating_formula;
use super::Budget;

/// Battery formulas used to refute inclusions cheaply before closures run.
const BATTERY_LIMIT: usize = 4000;

#[derive(Debug, Clone)]
pub struct MinimalCovers {
    /// One representative per isomorphism class, in enumeration order.
    pub matrices: Vec<Matrix>,
    /// Covers found (isomorphism classes) before minimisation.
    pub covers: usize,
    pub examined: u64,
    /// Whether the sweep completed and every comparison that removed or
    /// kept a candidate was exact.
    pub definitive: bool,
}

fn battery(c: &Calculus) -> Vec<Formula> {
    let sig = c.signature();
    let one = ["X".to_string()];
    let two = ["X".to_string(), "Y".to_string()];
    let mut out = formulas_up_to_depth(sig, &one, 3);
    out.truncate(BATTERY_LIMIT / 2);
    out.extend(
        formulas_up_to_depth(sig, &two, 2)
            .into_iter()
            .filter(|f| f.vars().len() == 2)
            .take(BATTERY_LIMIT / 2),
    );
    out
}

fn fingerprint(m: &Matrix, battery: &[Compiled]) -> Vec<bool> {
    battery
        .iter()
        .map(|f| f.first_countermodel(m).is_none())
        .collect()
}

/// The `⊴`-minimal `m`-valued covers of `c`, one per isomorphism class.
pub fn minimal_covers(c: &Calculus, m: usize, budget: &Budget) -> Result<MinimalCovers, MatrixError> {
    let sweep = enumerate_covers(c, m, true, budget)?;
    let tests = battery(c)
        .iter()
        .map(|f| Compiled::new(c.signature(), &[f]))
        .collect::<Result<Vec<_>, _>>()?;
    let prints: Vec<Vec<bool>> = sweep.covers.iter().map(|x| fingerprint(x, &tests)).collect();
    let n = sweep.covers.len();
    let mut definitive = sweep.complete;
    let mut keep = Vec::new();
    for x in 0..n {
        let mut dominated = false;
        for y in 0..n {
            if x == y {
                continue;
            }
            // y strictly below x needs Taut(y) within Taut(x) ...
            if prints[y].iter().zip(&prints[x]).any(|(&ty, &tx)| ty && !tx) {
                continue;
            }
            // ... and some tautology of x that y falsifies.
            let strict = prints[x].iter().zip(&prints[y]).any(|(&tx, &ty)| tx && !ty);
            let x_into_y = separating_formula(&sweep.covers[x], &sweep.covers[y], budget)?;
            if x_into_y.found() {
                continue;
            }
            if !x_into_y.definitive {
                definitive = false;
                continue;
            }
            let strict = strict || {
                let s = separating_formula(&sweep.covers[y], &sweep.covers[x], budget)?;
                if !s.definitive {
                    definitive = false;
                }
                s.found()
            };
            if strict {
                dominated = true;
                break;
            }
        }
        if !dominated {
            keep.push(sweep.covers[x].clone());
        }
    }
    Ok(MinimalCovers {
        matrices: keep,
        covers: n,
        examined: sweep.examined,
        definitive,
    })
}
