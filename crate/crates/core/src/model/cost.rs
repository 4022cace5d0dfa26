use std::fmt;

use serde::Serialize;

/// Outcome of a step-count comparison between a filter/sort procedure and
/// element-by-element maximization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Verdict {
    ProcedureQuicker,
    BaselineQuicker,
    Equal,
}

impl Verdict {
    /// `procedure` vs `baseline` step counts; fewer steps wins.
    pub fn from_steps(procedure: usize, baseline: usize) -> Self {
        match procedure.cmp(&baseline) {
            std::cmp::Ordering::Less => Verdict::ProcedureQuicker,
            std::cmp::Ordering::Greater => Verdict::BaselineQuicker,
            std::cmp::Ordering::Equal => Verdict::Equal,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ProcedureQuicker => "procedureQuicker",
            Verdict::BaselineQuicker => "baselineQuicker",
            Verdict::Equal => "equal",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Step counts under the unit cost model: one filter or sort stage is one
/// step, one pairwise comparison is one step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CostReport {
    /// Filter + sort stages of the normalized procedure.
    pub procedure_length: usize,
    /// Distinct attributes used (`N`).
    pub attribute_count: usize,
    /// Input list length (`n`).
    pub input_length: usize,
    /// Length after all filters (`n′`), when a concrete list was given.
    pub filtered_length: Option<usize>,
    /// `max(n - 1, 0)`.
    pub baseline_comparisons: usize,
    /// `3N`, the normal-form length bound the verdict is decided on.
    pub step_bound: usize,
    pub verdict: Verdict,
}
