//! Outcome typing rules over a parsed [`Scenario`].
//!
//! An outcome predicate is well typed only as `yields(S, C) = O`. The
//! configuration-free form is rejected (E001), outcomes from incompatible
//! configurations may be combined only through a physical bridge (E002,
//! E003, E004), and joint distributions are only requested over compatible
//! configurations (E005).

mod model;
mod rules;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::lang::{Scenario, Span};

pub use model::{Model, QueryError, SystemInfo};
pub use rules::Checker;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagnosticCode {
    /// Outcome predicated of a system with no configuration.
    E001,
    /// Outcomes from incompatible configurations combined without a bridge.
    E002,
    /// The named bridge is epistemic.
    E003,
    /// The named bridge does not license this comparison.
    E004,
    /// Joint distribution requested over incompatible configurations.
    E005,
    /// A name does not resolve.
    E006,
    /// Dimensions disagree or a declaration's quantum content is invalid.
    E007,
    /// Bridge named where the configurations are already compatible.
    W001,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl DiagnosticCode {
    pub const ALL: [DiagnosticCode; 8] = [
        DiagnosticCode::E001,
        DiagnosticCode::E002,
        DiagnosticCode::E003,
        DiagnosticCode::E004,
        DiagnosticCode::E005,
        DiagnosticCode::E006,
        DiagnosticCode::E007,
        DiagnosticCode::W001,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::E001 => "E001",
            DiagnosticCode::E002 => "E002",
            DiagnosticCode::E003 => "E003",
            DiagnosticCode::E004 => "E004",
            DiagnosticCode::E005 => "E005",
            DiagnosticCode::E006 => "E006",
            DiagnosticCode::E007 => "E007",
            DiagnosticCode::W001 => "W001",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DiagnosticCode::E001 => "IllTypedIntrinsic",
            DiagnosticCode::E002 => "InadmissibleComposition",
            DiagnosticCode::E003 => "EpistemicBridge",
            DiagnosticCode::E004 => "InvalidBridge",
            DiagnosticCode::E005 => "UndefinedJointDistribution",
            DiagnosticCode::E006 => "UnresolvedReference",
            DiagnosticCode::E007 => "DimensionMismatch",
            DiagnosticCode::W001 => "RedundantBridge",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            DiagnosticCode::W001 => Severity::Warning,
            _ => Severity::Error,
        }
    }

    pub fn parse(s: &str) -> Option<DiagnosticCode> {
        DiagnosticCode::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub message: String,
    pub span: Span,
    /// Statement the diagnostic belongs to; `None` for problems in a
    /// declaration.
    pub statement: Option<String>,
}

impl Diagnostic {
    pub fn severity(&self) -> Severity {
        self.code.severity()
    }

    pub fn is_error(&self) -> bool {
        self.severity() == Severity::Error
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CheckReport {
    /// Sorted by source position.
    pub diagnostics: Vec<Diagnostic>,
    /// Statements with no error diagnostic, in declaration order.
    pub admissible_statements: Vec<String>,
}

impl CheckReport {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }

    /// Codes reported for one statement, in source order.
    pub fn codes_for(&self, statement: &str) -> Vec<DiagnosticCode> {
        self.diagnostics.iter().filter(|d| d.statement.as_deref() == Some(statement)).map(|d| d.code).collect()
    }

    pub fn is_admissible(&self, statement: &str) -> bool {
        self.admissible_statements.iter().any(|s| s == statement)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CheckError {
    #[error("{line}:{col}: dimension {dim} exceeds the supported maximum of {max}", line = span.line, col = span.col, max = crate::quantum::MAX_DIM)]
    InternalLimit { dim: usize, span: Span },
}

/// Type-checks every declaration and statement of `scenario`.
///
/// Problems are reported as diagnostics. The only hard failure is a
/// dimension above [`crate::quantum::MAX_DIM`].
pub fn check(scenario: &Scenario) -> Result<CheckReport, CheckError> {
    let (checker, mut diagnostics) = Checker::new(scenario)?;
    let mut admissible_statements = Vec::new();
    for st in &scenario.statements {
        let diags = checker.check_statement(st)?;
        if !diags.iter().any(Diagnostic::is_error) {
            admissible_statements.push(st.id.name.clone());
        }
        diagnostics.extend(diags);
    }
    diagnostics.sort_by_key(|d| (d.span.start, d.span.end));
    Ok(CheckReport { diagnostics, admissible_statements })
}
