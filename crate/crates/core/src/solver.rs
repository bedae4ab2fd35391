//! The DPBB sweep: one pass over the variables, deciding each bit by
//! comparing the relaxed least-squares error of both branches.
//!
//! For stage `i < n` the remaining columns `B_i = [a_{i+1} … a_n]` are
//! factored once and used to fit both candidate states, `s` and `s − a_i`.
//! The last stage has no remaining columns, so each branch is scored by the
//! squared magnitude of its state alone.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{matvec, sse, Matrix, QrLeastSquares, Tolerances, Vector};

/// An overdetermined system `A x = b` with `A` of full column rank.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Problem {
    a: Matrix,
    b: Vector,
}

impl Problem {
    pub fn new(a: Matrix, b: Vector, tol: &Tolerances) -> Result<Self> {
        if a.rows() <= a.cols() {
            return Err(Error::InvalidProblem(format!(
                "system must be strictly overdetermined, got {} rows for {} unknowns",
                a.rows(),
                a.cols()
            )));
        }
        if a.rows() != b.len() {
            return Err(Error::dims("right-hand side length", a.rows(), b.len()));
        }
        // full column rank, or RankDeficient with the offending pivot
        QrLeastSquares::new(&a, tol)?;
        Ok(Problem { a, b })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Vector {
        &self.b
    }

    /// Number of unknowns.
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// Number of equations.
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    /// Same matrix, different right-hand side.
    pub fn with_rhs(&self, b: Vector) -> Result<Problem> {
        if b.len() != self.m() {
            return Err(Error::dims("right-hand side length", self.m(), b.len()));
        }
        Ok(Problem {
            a: self.a.clone(),
            b,
        })
    }

    /// `‖A x − b‖²` for a binary `x`.
    pub fn residual_sse(&self, x: &[u8]) -> Result<f64> {
        let xv = Vector::new(x.iter().map(|&v| f64::from(v)).collect())?;
        Ok(sse(&matvec(&self.a, &xv)?.sub(&self.b)?))
    }
}

/// One branch (`x_i = 0` or `x_i = 1`) of a stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchEval {
    pub bit: u8,
    /// State after applying this branch's bit.
    pub state: Vector,
    /// Real-valued fit of the remaining variables; `None` at the last stage.
    pub relaxed_completion: Option<Vector>,
    pub state_estimate: Vector,
    /// `state − state_estimate`.
    pub error: Vector,
    pub sse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRecord {
    /// 1-based variable index.
    pub index: usize,
    pub incoming_state: Vector,
    pub branch0: BranchEval,
    pub branch1: BranchEval,
    pub decision: u8,
}

impl StageRecord {
    pub fn chosen(&self) -> &BranchEval {
        if self.decision == 1 {
            &self.branch1
        } else {
            &self.branch0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub x: Vec<u8>,
    /// `‖A x − b‖²`, recomputed from the problem data.
    pub final_sse: f64,
    pub stages: Vec<StageRecord>,
}

fn branch_state(bit: u8, incoming_state: &Vector, column: &Vector) -> Result<Vector> {
    match bit {
        0 => Ok(incoming_state.clone()),
        1 => incoming_state.sub(column),
        other => Err(Error::InvalidProblem(format!("branch bit must be 0 or 1, got {other}"))),
    }
}

fn fit_branch(bit: u8, state: Vector, remaining: &Matrix, factor: &QrLeastSquares) -> Result<BranchEval> {
    let completion = factor.solve(&state)?;
    let estimate = matvec(remaining, &completion)?;
    let error = state.sub(&estimate)?;
    let sse = sse(&error);
    Ok(BranchEval {
        bit,
        state,
        relaxed_completion: Some(completion),
        state_estimate: estimate,
        error,
        sse,
    })
}

/// Scores one branch of stage `i` (1-based, `i < n`) against the remaining
/// columns `remaining = [a_{i+1} … a_n]`.
pub fn evaluate_branch(
    i: usize,
    bit: u8,
    incoming_state: &Vector,
    column: &Vector,
    remaining: &Matrix,
    tol: &Tolerances,
) -> Result<BranchEval> {
    if i == 0 {
        return Err(Error::InvalidProblem("stage index is 1-based".into()));
    }
    if incoming_state.len() != remaining.rows() {
        return Err(Error::dims("branch state length", remaining.rows(), incoming_state.len()));
    }
    let state = branch_state(bit, incoming_state, column)?;
    let factor = QrLeastSquares::new(remaining, tol)?;
    fit_branch(bit, state, remaining, &factor)
}

/// Both branches of the final stage, scored by the magnitude of the state.
pub fn evaluate_last(incoming_state: &Vector, column: &Vector) -> Result<(BranchEval, BranchEval)> {
    let make = |bit: u8| -> Result<BranchEval> {
        let state = branch_state(bit, incoming_state, column)?;
        let sse = sse(&state);
        Ok(BranchEval {
            bit,
            state_estimate: Vector::zeros(state.len()),
            error: state.clone(),
            state,
            relaxed_completion: None,
            sse,
        })
    };
    Ok((make(0)?, make(1)?))
}

fn decide(branch0: &BranchEval, branch1: &BranchEval) -> u8 {
    // strict: equal errors keep x_i = 0
    u8::from(branch1.sse < branch0.sse)
}

/// Runs the full left-to-right sweep and returns the decisions with a
/// per-stage trace.
pub fn dpbb_solve(p: &Problem, tol: &Tolerances) -> Result<SolveResult> {
    let a = p.a();
    let n = p.n();
    let mut state = p.b().clone();
    let mut stages = Vec::with_capacity(n);

    for i in 1..n {
        let column = a.column(i - 1);
        let remaining = a.trailing_columns(i)?;
        // B_i does not depend on the bit, so one factorization serves both branches
        let factor = QrLeastSquares::new(&remaining, tol)?;
        let branch0 = fit_branch(0, state.clone(), &remaining, &factor)?;
        let branch1 = fit_branch(1, state.sub(&column)?, &remaining, &factor)?;
        let decision = decide(&branch0, &branch1);
        let record = StageRecord {
            index: i,
            incoming_state: state,
            branch0,
            branch1,
            decision,
        };
        state = record.chosen().state.clone();
        stages.push(record);
    }

    let (branch0, branch1) = evaluate_last(&state, &a.column(n - 1))?;
    let decision = decide(&branch0, &branch1);
    stages.push(StageRecord {
        index: n,
        incoming_state: state,
        branch0,
        branch1,
        decision,
    });

    let x: Vec<u8> = stages.iter().map(|s| s.decision).collect();
    let final_sse = p.residual_sse(&x)?;
    Ok(SolveResult { x, final_sse, stages })
}
