use std::fmt;

/// Why an iterative solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    /// Riemannian gradient norm under tolerance.
    GradientTolerance,
    /// Objective change under tolerance.
    ObjectiveStall,
    MaxIterations,
    LineSearchFailure,
    InfeasibleAfterPenaltyCap,
    /// Randomization produced no candidate meeting the sensing floor.
    NoFeasibleCandidate,
    Infeasible,
}

impl Termination {
    pub fn is_success(self) -> bool {
        matches!(self, Self::Converged | Self::GradientTolerance | Self::ObjectiveStall)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::GradientTolerance => "gradient_tolerance",
            Self::ObjectiveStall => "objective_stall",
            Self::MaxIterations => "max_iter",
            Self::LineSearchFailure => "line_search_failure",
            Self::InfeasibleAfterPenaltyCap => "infeasible_after_penalty_cap",
            Self::NoFeasibleCandidate => "no_feasible_candidate",
            Self::Infeasible => "infeasible",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Convergence record shared by the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub termination: Termination,
    pub objective_trace: Vec<f64>,
    /// Constraint residual per iteration (solver-specific meaning, zero when
    /// the solver has no explicit constraint).
    pub residual_trace: Vec<f64>,
    /// Whether the returned point meets the subproblem's QoS constraint.
    pub feasible: bool,
}

impl SolveReport {
    pub fn new(termination: Termination) -> Self {
        Self {
            iterations: 0,
            termination,
            objective_trace: Vec::new(),
            residual_trace: Vec::new(),
            feasible: true,
        }
    }

    pub fn push(&mut self, objective: f64, residual: f64) {
        self.objective_trace.push(objective);
        self.residual_trace.push(residual);
    }

    pub fn final_objective(&self) -> Option<f64> {
        self.objective_trace.last().copied()
    }
}
