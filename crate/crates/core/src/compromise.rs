//! Compromise (minimax-regret) selection over an income matrix.
//!
//! Rows are situations, columns are retailers. The ideal vector holds each
//! retailer's best income; the residual matrix holds each situation's
//! shortfall from it; the compromise situation minimizes the largest
//! shortfall.

use thiserror::Error;

use crate::exactmath::Rational;
use crate::market::IncomeMatrix;
use crate::model::NodeId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompromiseError {
    #[error("income matrix has no situations")]
    Empty,
    #[error("row {row} has {got} entries, expected {expected}")]
    DimensionMismatch { row: usize, expected: usize, got: usize },
    #[error("tie-break keys cover {got} situations, expected {expected}")]
    KeyCount { expected: usize, got: usize },
}

/// How equal row maxima are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionTie<'a> {
    /// Earliest situation in enumeration order.
    #[default]
    FirstInOrder,
    /// Lexicographically smallest key, e.g. the situation's site tuple.
    LowestKey(&'a [Vec<NodeId>]),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompromiseResult {
    pub ideal: Vec<Rational>,
    pub residuals: Vec<Vec<Rational>>,
    pub row_max: Vec<Rational>,
    pub selected: usize,
    pub value: Rational,
}

fn check_rect(rows: &[Vec<Rational>]) -> Result<usize, CompromiseError> {
    let width = rows.first().ok_or(CompromiseError::Empty)?.len();
    for (row, r) in rows.iter().enumerate() {
        if r.len() != width {
            return Err(CompromiseError::DimensionMismatch { row, expected: width, got: r.len() });
        }
    }
    Ok(width)
}

pub fn ideal_vector(incomes: &[Vec<Rational>]) -> Result<Vec<Rational>, CompromiseError> {
    let width = check_rect(incomes)?;
    Ok((0..width).map(|j| incomes.iter().map(|row| &row[j]).max().expect("non-empty").clone()).collect())
}

pub fn residual_matrix(incomes: &[Vec<Rational>], ideal: &[Rational]) -> Result<Vec<Vec<Rational>>, CompromiseError> {
    check_rect(incomes)?;
    incomes
        .iter()
        .enumerate()
        .map(|(row, r)| {
            if r.len() != ideal.len() {
                return Err(CompromiseError::DimensionMismatch { row, expected: ideal.len(), got: r.len() });
            }
            Ok(ideal.iter().zip(r).map(|(m, v)| m - v).collect())
        })
        .collect()
}

/// Returns `(selected, value, row_max)`.
pub fn compromise_select(
    residuals: &[Vec<Rational>],
    tie: SelectionTie<'_>,
) -> Result<(usize, Rational, Vec<Rational>), CompromiseError> {
    check_rect(residuals)?;
    if let SelectionTie::LowestKey(keys) = tie {
        if keys.len() != residuals.len() {
            return Err(CompromiseError::KeyCount { expected: residuals.len(), got: keys.len() });
        }
    }
    let row_max: Vec<Rational> =
        residuals.iter().map(|row| row.iter().max().cloned().unwrap_or_else(Rational::zero)).collect();
    let selected = pick_min(&row_max, tie);
    Ok((selected, row_max[selected].clone(), row_max))
}

fn pick_min(values: &[Rational], tie: SelectionTie<'_>) -> usize {
    let mut best = 0;
    for s in 1..values.len() {
        let better = match values[s].cmp(&values[best]) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => match tie {
                SelectionTie::FirstInOrder => false,
                SelectionTie::LowestKey(keys) => keys[s] < keys[best],
            },
        };
        if better {
            best = s;
        }
    }
    best
}

/// Full pipeline: ideal vector, residuals, selection.
pub fn solve_compromise(incomes: &[Vec<Rational>], tie: SelectionTie<'_>) -> Result<CompromiseResult, CompromiseError> {
    let ideal = ideal_vector(incomes)?;
    let residuals = residual_matrix(incomes, &ideal)?;
    let (selected, value, row_max) = compromise_select(&residuals, tie)?;
    Ok(CompromiseResult { ideal, residuals, row_max, selected, value })
}

pub fn solve_income_matrix(incomes: &IncomeMatrix, tie: SelectionTie<'_>) -> Result<CompromiseResult, CompromiseError> {
    solve_compromise(&incomes.incomes, tie)
}

/// Direct min-max scan without building the intermediate matrices.
pub fn compromise_oracle(
    incomes: &[Vec<Rational>],
    tie: SelectionTie<'_>,
) -> Result<(usize, Rational), CompromiseError> {
    let width = check_rect(incomes)?;
    let mut best: Option<(usize, Rational)> = None;
    for (s, row) in incomes.iter().enumerate() {
        let mut worst = Rational::zero();
        for j in 0..width {
            let mut top = &incomes[0][j];
            for other in incomes {
                if other[j] > *top {
                    top = &other[j];
                }
            }
            let regret = top - &row[j];
            if regret > worst {
                worst = regret;
            }
        }
        let replace = match &best {
            None => true,
            Some((b, v)) => {
                worst < *v || (worst == *v && matches!(tie, SelectionTie::LowestKey(keys) if keys[s] < keys[*b]))
            }
        };
        if replace {
            best = Some((s, worst));
        }
    }
    Ok(best.expect("non-empty"))
}
