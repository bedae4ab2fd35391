//! Exhaustive minimization of `‖A x − b‖²` over all binary `x`.
//!
//! Candidates are encoded as integers with `x_1` in the most significant
//! bit, so numeric order is the lexicographic order used for tie-breaks.
//! The leading bits split the space into independent blocks that run in
//! parallel; inside a block the remaining bits follow a Gray code and the
//! residual is updated one column at a time. Incremental sums only screen
//! candidates: anything that could be a new best is rescored from scratch.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::sse_slice;
use crate::solver::Problem;

pub const DEFAULT_MAX_N: usize = 24;

const PREFIX_BITS: usize = 6;
const REFRESH_EVERY: u64 = 1 << 10;
const SCREEN_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub x: Vec<u8>,
    pub sse: f64,
    pub candidates_evaluated: u64,
}

fn bits_of(code: u64, n: usize) -> Vec<u8> {
    (0..n).map(|j| ((code >> (n - 1 - j)) & 1) as u8).collect()
}

/// Residual `A x − b` computed directly from the candidate bits.
fn residual(p: &Problem, code: u64, out: &mut [f64]) {
    let a = p.a();
    let n = p.n();
    for (r, o) in out.iter_mut().enumerate() {
        let row = a.row(r);
        let ax: f64 = (0..n)
            .filter(|&j| (code >> (n - 1 - j)) & 1 == 1)
            .map(|j| row[j])
            .sum();
        *o = ax - p.b()[r];
    }
}

fn naive_sse(p: &Problem, code: u64) -> f64 {
    let mut r = vec![0.0; p.m()];
    residual(p, code, &mut r);
    sse_slice(&r)
}

fn better(a: (f64, u64), b: (f64, u64)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

fn search_block(p: &Problem, prefix: u64, suffix_len: usize, scale: f64) -> (f64, u64) {
    let n = p.n();
    let a = p.a();
    let columns: Vec<Vec<f64>> = (0..suffix_len)
        .map(|t| a.column(n - 1 - t).into_vec())
        .collect();
    let base = prefix << suffix_len;

    let mut r = vec![0.0; p.m()];
    residual(p, base, &mut r);
    let mut code = base;
    let mut best = (naive_sse(p, code), code);

    for k in 1..(1u64 << suffix_len) {
        let t = k.trailing_zeros() as usize;
        code ^= 1 << t;
        if k % REFRESH_EVERY == 0 {
            residual(p, code, &mut r);
        } else if (code >> t) & 1 == 1 {
            r.iter_mut().zip(&columns[t]).for_each(|(ri, c)| *ri += c);
        } else {
            r.iter_mut().zip(&columns[t]).for_each(|(ri, c)| *ri -= c);
        }
        let screened = sse_slice(&r);
        if screened <= best.0 + SCREEN_MARGIN * (best.0 + scale) {
            let exact = (naive_sse(p, code), code);
            if better(exact, best) {
                best = exact;
            }
        }
    }
    best
}

/// Global minimizer over `{0,1}^n`; fails with `TooLarge` when `n > max_n`.
pub fn exhaustive_solve(p: &Problem, max_n: usize) -> Result<OracleResult> {
    let n = p.n();
    if n > max_n || n >= 63 {
        return Err(Error::TooLarge { n, cap: max_n });
    }
    let prefix_len = n.min(PREFIX_BITS);
    let suffix_len = n - prefix_len;
    let scale = sse_slice(p.b().as_slice()) + sse_slice(p.a().as_slice());

    let (sse, code) = (0..(1u64 << prefix_len))
        .into_par_iter()
        .map(|prefix| search_block(p, prefix, suffix_len, scale))
        .reduce(
            || (f64::INFINITY, u64::MAX),
            |a, b| if better(b, a) { b } else { a },
        );

    Ok(OracleResult {
        x: bits_of(code, n),
        sse,
        candidates_evaluated: 1u64 << n,
    })
}
