//! Stage-by-stage record of a DPBB solve, laid out like the classic
//! decision tables: one table per (variable, branch) with the initial
//! state, new state, state estimate, estimation error and SSE.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::solver::{BranchEval, Problem, SolveResult, StageRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemEcho {
    pub rows: usize,
    pub cols: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs_source: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceBranch {
    pub decision: u8,
    pub new_state: Vec<f64>,
    /// Relaxed values of `x_{i+1} … x_n`; absent at the last stage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimal_remaining: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_estimate: Option<Vec<f64>>,
    pub estimation_error: Vec<f64>,
    pub sse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStage {
    /// 1-based index of the decided variable.
    pub variable: usize,
    pub decision: u8,
    /// 1-based indices of the columns fitted by least squares.
    pub remaining_columns: Vec<usize>,
    pub initial_state: Vec<f64>,
    /// Column `a_i` subtracted by the `x_i = 1` branch.
    pub column: Vec<f64>,
    pub branches: [TraceBranch; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub problem: ProblemEcho,
    pub stages: Vec<TraceStage>,
    pub solution: Vec<u8>,
    pub final_sse: f64,
}

fn branch(b: &BranchEval, last: bool) -> TraceBranch {
    TraceBranch {
        decision: b.bit,
        new_state: b.state.as_slice().to_vec(),
        optimal_remaining: b.relaxed_completion.as_ref().map(|v| v.as_slice().to_vec()),
        state_estimate: (!last).then(|| b.state_estimate.as_slice().to_vec()),
        estimation_error: b.error.as_slice().to_vec(),
        sse: b.sse,
    }
}

fn stage(s: &StageRecord, problem: &Problem) -> TraceStage {
    let n = problem.n();
    let last = s.index == n;
    TraceStage {
        variable: s.index,
        decision: s.decision,
        remaining_columns: (s.index + 1..=n).collect(),
        initial_state: s.incoming_state.as_slice().to_vec(),
        column: problem.a().column(s.index - 1).into_vec(),
        branches: [branch(&s.branch0, last), branch(&s.branch1, last)],
    }
}

impl TraceDocument {
    pub fn new(
        problem: &Problem,
        result: &SolveResult,
        matrix_source: Option<String>,
        rhs_source: Option<String>,
    ) -> Self {
        TraceDocument {
            problem: ProblemEcho {
                rows: problem.m(),
                cols: problem.n(),
                matrix_source,
                rhs_source,
            },
            stages: result.stages.iter().map(|s| stage(s, problem)).collect(),
            solution: result.x.clone(),
            final_sse: result.final_sse,
        }
    }

    /// Plain-text tables, one per branch, with values to `precision` digits.
    pub fn render_text(&self, precision: usize) -> String {
        let row = |label: &str, values: &[f64]| {
            let cells: Vec<String> = values.iter().map(|v| format!("{v:>12.precision$}")).collect();
            format!("{label:<28}{}\n", cells.join(""))
        };
        let mut out = String::new();
        for st in &self.stages {
            let i = st.variable;
            for br in &st.branches {
                let basis = if st.remaining_columns.is_empty() {
                    "B is not used for pseudo inverse.".to_string()
                } else {
                    let cols: Vec<String> = st.remaining_columns.iter().map(|c| format!("a_{c}")).collect();
                    format!("B = [{}] is used for pseudo inverse.", cols.join(", "))
                };
                let _ = writeln!(
                    out,
                    "Decision variable is x_{i}. Decision is x_{i} = {}. {basis} Initial state s_{}",
                    br.decision,
                    i - 1
                );
                if let Some(rest) = &br.optimal_remaining {
                    let vals: Vec<String> = st
                        .remaining_columns
                        .iter()
                        .zip(rest)
                        .map(|(c, v)| format!("X_{c} = {v:.6}"))
                        .collect();
                    let _ = writeln!(out, "Optimal choice for remaining variables: {}", vals.join(" "));
                }
                out.push_str(&row(&format!("Initial state s_{}", i - 1), &st.initial_state));
                if br.decision == 1 {
                    out.push_str(&row(&format!("a_{i}"), &st.column));
                    out.push_str(&row(&format!("New state s_{i} = s_{} - a_{i}", i - 1), &br.new_state));
                } else {
                    out.push_str(&row(&format!("New state s_{i} = s_{}", i - 1), &br.new_state));
                }
                if let Some(est) = &br.state_estimate {
                    out.push_str(&row("State estimate", est));
                }
                out.push_str(&row("Estimation error", &br.estimation_error));
                let _ = writeln!(out, "{:<28}{:>12.precision$e}\n", "SSE", br.sse);
            }
            let _ = writeln!(out, "Decision: x_{i} = {}\n", st.decision);
        }
        let x: Vec<String> = self.solution.iter().map(u8::to_string).collect();
        let _ = writeln!(out, "Solution x = ({})", x.join(", "));
        let _ = writeln!(out, "Final SSE = {:e}", self.final_sse);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::fixtures::{example1, example1_rhs};
    use crate::linalg::{sse, Tolerances, Vector};
    use crate::solver::dpbb_solve;

    fn doc() -> TraceDocument {
        let p = Problem::new(example1(), example1_rhs(), &Tolerances::default()).unwrap();
        let r = dpbb_solve(&p, &Tolerances::default()).unwrap();
        TraceDocument::new(&p, &r, None, None)
    }

    #[test]
    fn json_round_trip_is_exact() {
        let d = doc();
        let text = serde_json::to_string(&d).unwrap();
        let back: TraceDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn serialized_sse_matches_serialized_errors() {
        let d: TraceDocument = serde_json::from_str(&serde_json::to_string(&doc()).unwrap()).unwrap();
        for st in &d.stages {
            for br in &st.branches {
                let again = sse(&Vector::new(br.estimation_error.clone()).unwrap());
                assert!((again - br.sse).abs() <= 1e-9 * br.sse.max(1e-300));
            }
        }
    }

    #[test]
    fn stage_layout() {
        let d = doc();
        assert_eq!(d.stages[0].remaining_columns, vec![2, 3]);
        assert!(d.stages[2].remaining_columns.is_empty());
        assert!(d.stages[2].branches[0].state_estimate.is_none());
        assert_eq!(d.solution, vec![1, 0, 1]);
        let a1 = example1().column(0);
        assert_eq!(d.stages[0].column, a1.into_vec());
    }

    #[test]
    fn text_mirrors_tables() {
        let text = doc().render_text(4);
        assert!(text.contains("Decision variable is x_1. Decision is x_1 = 0. B = [a_2, a_3] is used for pseudo inverse."));
        assert!(text.contains("Optimal choice for remaining variables: X_2 = 0.410034 X_3 = 1.410034"));
        assert!(text.contains("New state s_1 = s_0 - a_1"));
        assert!(text.contains("Decision variable is x_3. Decision is x_3 = 1. B is not used for pseudo inverse."));
        assert!(text.contains("Solution x = (1, 0, 1)"));
    }
}
