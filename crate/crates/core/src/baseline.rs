//! One-shot least-squares solve of the whole system, rounded to binary.

use serde::Serialize;

use crate::error::Result;
use crate::linalg::{least_squares, Tolerances, Vector};
use crate::solver::Problem;

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineResult {
    /// Unconstrained least-squares solution.
    pub real_x: Vector,
    pub rounded_x: Vec<u8>,
    pub sse_of_rounded: f64,
}

/// Entries at or above `threshold` become 1.
pub fn round_to_binary(real_x: &Vector, threshold: f64) -> Vec<u8> {
    real_x.iter().map(|&v| u8::from(v >= threshold)).collect()
}

pub fn direct_pseudo_solve(p: &Problem, tol: &Tolerances) -> Result<BaselineResult> {
    let real_x = least_squares(p.a(), p.b(), tol)?;
    let rounded_x = round_to_binary(&real_x, DEFAULT_THRESHOLD);
    let sse_of_rounded = p.residual_sse(&rounded_x)?;
    Ok(BaselineResult {
        real_x,
        rounded_x,
        sse_of_rounded,
    })
}
