//! One-to-one alignment of predicted and gold argument spans.
//!
//! Edges join spans whose token IoU is strictly above 1/2 and carry the IoU
//! as weight. The result is a maximum-total-weight matching; among optimal
//! matchings the one whose pair list, sorted by `(predicted, gold)`, is
//! lexicographically smallest is returned.
//!
//! Weights are compared exactly. Each instance is rescaled to integers over
//! the least common multiple of the edge denominators, falling back to big
//! integers when that multiple does not fit in `i128`.

use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use serde::Serialize;

use super::iou::{is_match_eligible, token_iou};
use crate::schema::TokenRange;

/// Largest side for which exhaustive search is used under [`MatchStrategy::Auto`].
pub const EXHAUSTIVE_LIMIT: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchStrategy {
    /// Exhaustive search when both sides have at most [`EXHAUSTIVE_LIMIT`]
    /// spans, the assignment solver otherwise.
    #[default]
    Auto,
    Exhaustive,
    Assignment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchedPair {
    pub predicted: usize,
    pub gold: usize,
    #[serde(serialize_with = "serialize_ratio")]
    pub iou: Ratio<u64>,
}

fn serialize_ratio<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchResult {
    pub pairs: Vec<MatchedPair>,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl MatchResult {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        Self {
            pairs: Vec::new(),
            tp,
            fp,
            fn_,
        }
    }

    pub fn total_weight(&self) -> BigRational {
        self.pairs.iter().fold(BigRational::zero(), |acc, p| {
            acc + BigRational::new(BigInt::from(*p.iou.numer()), BigInt::from(*p.iou.denom()))
        })
    }

    pub fn gold_for(&self, predicted: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.predicted == predicted).map(|p| p.gold)
    }
}

pub fn match_arguments(predicted: &[TokenRange], gold: &[TokenRange]) -> MatchResult {
    match_arguments_with(predicted, gold, MatchStrategy::Auto)
}

pub fn match_arguments_with(predicted: &[TokenRange], gold: &[TokenRange], strategy: MatchStrategy) -> MatchResult {
    let edges: Vec<Vec<Option<Ratio<u64>>>> = predicted
        .iter()
        .map(|p| {
            gold.iter()
                .map(|g| is_match_eligible(*p, *g).then(|| token_iou(*p, *g)))
                .collect()
        })
        .collect();

    let exhaustive = match strategy {
        MatchStrategy::Auto => predicted.len() <= EXHAUSTIVE_LIMIT && gold.len() <= EXHAUSTIVE_LIMIT,
        MatchStrategy::Exhaustive => true,
        MatchStrategy::Assignment => false,
    };
    let pairs = match scale_to_i128(&edges) {
        Some(w) => solve(&w, gold.len(), exhaustive),
        None => solve(&scale_to_bigint(&edges), gold.len(), exhaustive),
    };

    let tp = pairs.len();
    MatchResult {
        pairs: pairs
            .into_iter()
            .map(|(p, g)| MatchedPair {
                predicted: p,
                gold: g,
                iou: edges[p][g].expect("matched pairs are edges"),
            })
            .collect(),
        tp,
        fp: predicted.len() - tp,
        fn_: gold.len() - tp,
    }
}

/// Integer weights over a common denominator.
fn scale_to_i128(edges: &[Vec<Option<Ratio<u64>>>]) -> Option<Vec<Vec<Option<i128>>>> {
    let mut lcm: i128 = 1;
    for r in edges.iter().flatten().flatten() {
        let d = i128::from(*r.denom());
        lcm = lcm.checked_mul(d / lcm.gcd(&d))?;
    }
    // Leave headroom for sums of up to every edge weight.
    let rows = edges.len() as i128 + 1;
    lcm.checked_mul(rows)?;
    Some(
        edges
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| e.map(|r| i128::from(*r.numer()) * (lcm / i128::from(*r.denom()))))
                    .collect()
            })
            .collect(),
    )
}

fn scale_to_bigint(edges: &[Vec<Option<Ratio<u64>>>]) -> Vec<Vec<Option<BigInt>>> {
    let mut lcm = BigInt::from(1);
    for r in edges.iter().flatten().flatten() {
        lcm = lcm.lcm(&BigInt::from(*r.denom()));
    }
    edges
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| e.map(|r| BigInt::from(*r.numer()) * (&lcm / BigInt::from(*r.denom()))))
                .collect()
        })
        .collect()
}

trait Weight: Clone + Ord + Zero + Add<Output = Self> + Sub<Output = Self> {}
impl<T: Clone + Ord + Zero + Add<Output = T> + Sub<Output = T>> Weight for T {}

type Pairs = Vec<(usize, usize)>;

fn solve<T: Weight>(w: &[Vec<Option<T>>], cols: usize, exhaustive: bool) -> Pairs {
    if exhaustive {
        exhaustive_best(w, cols)
    } else {
        lexmin_assignment(w, cols)
    }
}

fn exhaustive_best<T: Weight>(w: &[Vec<Option<T>>], cols: usize) -> Pairs {
    struct Search<'a, T> {
        w: &'a [Vec<Option<T>>],
        cols: usize,
        used: Vec<bool>,
        current: Pairs,
        best: (T, Pairs),
    }

    impl<T: Weight> Search<'_, T> {
        fn run(&mut self, row: usize, acc: T) {
            if row == self.w.len() {
                let better = acc > self.best.0 || (acc == self.best.0 && self.current < self.best.1);
                if better {
                    self.best = (acc, self.current.clone());
                }
                return;
            }
            for g in 0..self.cols {
                if self.used[g] {
                    continue;
                }
                if let Some(wt) = &self.w[row][g] {
                    self.used[g] = true;
                    self.current.push((row, g));
                    self.run(row + 1, acc.clone() + wt.clone());
                    self.current.pop();
                    self.used[g] = false;
                }
            }
            self.run(row + 1, acc);
        }
    }

    let mut search = Search {
        w,
        cols,
        used: vec![false; cols],
        current: Vec::new(),
        best: (T::zero(), Vec::new()),
    };
    search.run(0, T::zero());
    search.best.1
}

/// Maximum total weight over rows not in `row_blocked` and columns not in
/// `col_blocked`, via the Hungarian method on a square cost matrix where
/// missing edges cost nothing.
fn optimum<T: Weight>(w: &[Vec<Option<T>>], cols: usize, row_blocked: &[bool], col_blocked: &[bool]) -> T {
    let n = w.len().max(cols);
    if n == 0 {
        return T::zero();
    }
    let cost = |i: usize, j: usize| -> T {
        if i < w.len() && j < cols && !row_blocked[i] && !col_blocked[j] {
            if let Some(x) = &w[i][j] {
                return T::zero() - x.clone();
            }
        }
        T::zero()
    };

    // 1-based potentials formulation; p[j] is the row assigned to column j.
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv: Vec<Option<T>> = vec![None; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<T> = None;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0].clone() - v[j].clone();
                if minv[j].as_ref().is_none_or(|m| cur < *m) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                let mj = minv[j].as_ref().expect("set above");
                if delta.as_ref().is_none_or(|d| mj < d) {
                    delta = Some(mj.clone());
                    j1 = j;
                }
            }
            let delta = delta.expect("an unused column remains");
            for j in 0..=n {
                if used[j] {
                    u[p[j]] = u[p[j]].clone() + delta.clone();
                    v[j] = v[j].clone() - delta.clone();
                } else if let Some(m) = &mut minv[j] {
                    *m = m.clone() - delta.clone();
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut total = T::zero();
    for (j, &row) in p.iter().enumerate().skip(1) {
        total = total + (T::zero() - cost(row - 1, j - 1));
    }
    total
}

/// Builds the lexicographically smallest optimal pair list one pair at a
/// time, checking each candidate prefix against the unconstrained optimum.
fn lexmin_assignment<T: Weight>(w: &[Vec<Option<T>>], cols: usize) -> Pairs {
    let rows = w.len();
    let mut row_blocked = vec![false; rows];
    let mut col_blocked = vec![false; cols];
    let target = optimum(w, cols, &row_blocked, &col_blocked);
    let mut pairs = Vec::new();
    let mut acc = T::zero();
    let mut next_row = 0;
    while acc != target {
        let mut chosen = None;
        'rows: for p in next_row..rows {
            for g in 0..cols {
                let Some(wt) = &w[p][g] else { continue };
                if col_blocked[g] {
                    continue;
                }
                let mut rb = row_blocked.clone();
                rb[..=p].iter_mut().for_each(|b| *b = true);
                col_blocked[g] = true;
                let rest = optimum(w, cols, &rb, &col_blocked);
                col_blocked[g] = false;
                if acc.clone() + wt.clone() + rest == target {
                    chosen = Some((p, g, wt.clone()));
                    break 'rows;
                }
            }
        }
        let (p, g, wt) = chosen.expect("some extension reaches the optimum");
        pairs.push((p, g));
        acc = acc + wt;
        col_blocked[g] = true;
        row_blocked[..=p].iter_mut().for_each(|b| *b = true);
        next_row = p + 1;
    }
    pairs
}
