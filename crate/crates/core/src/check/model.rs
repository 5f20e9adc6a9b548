use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{CheckError, Diagnostic, DiagnosticCode};
use crate::lang::{ConfigSource, Scenario, Span, StructureSource};
use crate::linalg::Matrix;
use crate::quantum::builtins::{self, BuiltinError};
use crate::quantum::{
    born_probabilities, partial_trace, Configuration, Effect, OutcomeDistribution, QuantumError, QuantumStructure,
    MAX_DIM,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SystemInfo {
    pub id: String,
    pub dim: usize,
    /// Atomic factor systems of a composite, in tensor order.
    pub factors: Vec<String>,
    pub span: Span,
    /// False when the declaration itself produced a diagnostic.
    pub valid: bool,
}

#[derive(Debug, Clone)]
struct Lowered<T> {
    over: String,
    value: Option<T>,
}

/// Declarations of a scenario lowered to quantum objects.
///
/// A declaration with invalid content is kept with no value, so references
/// to it still resolve and can be reported once at the use site.
#[derive(Debug, Clone)]
pub struct Model {
    systems: Vec<SystemInfo>,
    structures: BTreeMap<String, Lowered<QuantumStructure>>,
    configs: BTreeMap<String, Lowered<Configuration>>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QueryError {
    #[error("no structure named `{0}`")]
    UnknownStructure(String),
    #[error("no configuration named `{0}`")]
    UnknownConfiguration(String),
    #[error("declaration `{0}` is invalid; run `check` for details")]
    Invalid(String),
    #[error(
        "structure `{structure}` is over `{structure_system}` but configuration `{config}` is over `{config_system}`"
    )]
    SystemMismatch { structure: String, structure_system: String, config: String, config_system: String },
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

fn decl(code: DiagnosticCode, message: String, span: Span) -> Diagnostic {
    Diagnostic { code, message, span, statement: None }
}

fn limit(dim: usize, span: Span) -> CheckError {
    CheckError::InternalLimit { dim, span }
}

/// Maps a builtin failure to a diagnostic, or to the hard dimension limit.
fn builtin_failure(err: BuiltinError, name_span: Span, decl_span: Span) -> Result<Diagnostic, CheckError> {
    Ok(match err {
        BuiltinError::Unknown(name) => decl(DiagnosticCode::E006, format!("unknown builtin `{name}`"), name_span),
        BuiltinError::Quantum(QuantumError::DimensionLimit(d)) => return Err(limit(d, decl_span)),
        other => decl(DiagnosticCode::E007, other.to_string(), name_span),
    })
}

impl Model {
    /// Lowers every declaration, reporting E006 for dangling names and E007
    /// for dimension disagreements or invalid quantum content.
    pub fn lower(scenario: &Scenario) -> Result<(Model, Vec<Diagnostic>), CheckError> {
        let mut diags = Vec::new();
        let mut systems: Vec<SystemInfo> = Vec::new();

        for s in &scenario.systems {
            if s.dim > MAX_DIM {
                return Err(limit(s.dim, s.span));
            }
            let mut info = SystemInfo {
                id: s.id.name.clone(),
                dim: s.dim,
                factors: s.factors.iter().map(|f| f.name.clone()).collect(),
                span: s.span,
                valid: true,
            };
            let mut product = 1usize;
            for (i, f) in s.factors.iter().enumerate() {
                if s.factors[..i].iter().any(|g| g.name == f.name) {
                    diags.push(decl(
                        DiagnosticCode::E007,
                        format!("`{}` appears twice among the factors of `{}`", f.name, s.id.name),
                        f.span,
                    ));
                    info.valid = false;
                    continue;
                }
                match scenario.system(&f.name) {
                    None => {
                        diags.push(decl(DiagnosticCode::E006, format!("unknown system `{}`", f.name), f.span));
                        info.valid = false;
                    }
                    Some(fs) if !fs.factors.is_empty() => {
                        diags.push(decl(
                            DiagnosticCode::E007,
                            format!("factor `{}` is itself composite; list its atomic factors instead", f.name),
                            f.span,
                        ));
                        info.valid = false;
                    }
                    Some(fs) => product = product.saturating_mul(fs.dim),
                }
            }
            if info.valid && !s.factors.is_empty() && product != s.dim {
                diags.push(decl(
                    DiagnosticCode::E007,
                    format!("`{}` has dim {} but its factors multiply to {product}", s.id.name, s.dim),
                    s.span,
                ));
                info.valid = false;
            }
            systems.push(info);
        }

        let mut model = Model { systems, structures: BTreeMap::new(), configs: BTreeMap::new() };

        for s in &scenario.structures {
            let value = match model.usable_system(&s.over.name, s.over.span, &mut diags) {
                None => None,
                Some(dim) => match lower_structure(&s.source, dim) {
                    Ok(v) => Some(v),
                    Err(Lowering::Limit(d)) => return Err(limit(d, s.span)),
                    Err(Lowering::Builtin(e)) => {
                        let name_span = match &s.source {
                            StructureSource::Builtin(b) => b.name.span,
                            _ => s.span,
                        };
                        diags.push(builtin_failure(e, name_span, s.span)?);
                        None
                    }
                    Err(Lowering::Invalid(msg)) => {
                        diags.push(decl(DiagnosticCode::E007, format!("structure `{}`: {msg}", s.id.name), s.span));
                        None
                    }
                },
            };
            model.structures.insert(s.id.name.clone(), Lowered { over: s.over.name.clone(), value });
        }

        for c in &scenario.configurations {
            let value = match model.usable_system(&c.over.name, c.over.span, &mut diags) {
                None => None,
                Some(dim) => match lower_config(&c.id.name, &c.source, dim) {
                    Ok(v) => Some(v),
                    Err(Lowering::Limit(d)) => return Err(limit(d, c.span)),
                    Err(Lowering::Builtin(e)) => {
                        let name_span = match &c.source {
                            ConfigSource::Builtin(b) => b.name.span,
                            _ => c.span,
                        };
                        diags.push(builtin_failure(e, name_span, c.span)?);
                        None
                    }
                    Err(Lowering::Invalid(msg)) => {
                        diags.push(decl(DiagnosticCode::E007, format!("configuration `{}`: {msg}", c.id.name), c.span));
                        None
                    }
                },
            };
            model.configs.insert(c.id.name.clone(), Lowered { over: c.over.name.clone(), value });
        }

        for b in &scenario.bridges {
            if !model.configs.contains_key(&b.config.name) {
                diags.push(decl(
                    DiagnosticCode::E006,
                    format!("unknown configuration `{}`", b.config.name),
                    b.config.span,
                ));
            }
        }

        Ok((model, diags))
    }

    /// Dimension of a declared, valid system; reports E006 when undeclared.
    fn usable_system(&self, id: &str, span: Span, diags: &mut Vec<Diagnostic>) -> Option<usize> {
        match self.system(id) {
            None => {
                diags.push(decl(DiagnosticCode::E006, format!("unknown system `{id}`"), span));
                None
            }
            Some(s) if !s.valid => None,
            Some(s) => Some(s.dim),
        }
    }

    pub fn systems(&self) -> &[SystemInfo] {
        &self.systems
    }

    pub fn system(&self, id: &str) -> Option<&SystemInfo> {
        self.systems.iter().find(|s| s.id == id)
    }

    /// Atomic systems making up `id`: its factors, or `id` itself.
    pub fn atoms(&self, id: &str) -> Vec<String> {
        match self.system(id) {
            Some(s) if !s.factors.is_empty() => s.factors.clone(),
            _ => vec![id.to_string()],
        }
    }

    pub fn atom_dim(&self, id: &str) -> usize {
        self.system(id).map_or(1, |s| s.dim)
    }

    /// System a structure is declared over, and its value when valid.
    pub fn structure(&self, id: &str) -> Option<(&str, Option<&QuantumStructure>)> {
        self.structures.get(id).map(|l| (l.over.as_str(), l.value.as_ref()))
    }

    /// System a configuration is declared over, and its value when valid.
    pub fn configuration(&self, id: &str) -> Option<(&str, Option<&Configuration>)> {
        self.configs.get(id).map(|l| (l.over.as_str(), l.value.as_ref()))
    }

    /// The structure as seen by the configuration: unchanged when both share
    /// a system, reduced by partial trace when the configuration acts on one
    /// factor of the structure's composite system.
    pub fn structure_for(
        &self,
        structure: &str,
        config: &str,
    ) -> Result<(QuantumStructure, &Configuration), QueryError> {
        let (s_over, s_val) =
            self.structure(structure).ok_or_else(|| QueryError::UnknownStructure(structure.into()))?;
        let (c_over, c_val) =
            self.configuration(config).ok_or_else(|| QueryError::UnknownConfiguration(config.into()))?;
        let s_val = s_val.ok_or_else(|| QueryError::Invalid(structure.into()))?;
        let c_val = c_val.ok_or_else(|| QueryError::Invalid(config.into()))?;
        if s_over == c_over {
            return Ok((s_val.clone(), c_val));
        }
        let composite = self.system(s_over).filter(|s| !s.factors.is_empty());
        if let Some(sys) = composite {
            if let Some(pos) = sys.factors.iter().position(|f| f == c_over) {
                let dims: Vec<usize> = sys.factors.iter().map(|f| self.atom_dim(f)).collect();
                return Ok((partial_trace(s_val, &dims, pos)?, c_val));
            }
        }
        Err(QueryError::SystemMismatch {
            structure: structure.into(),
            structure_system: s_over.into(),
            config: config.into(),
            config_system: c_over.into(),
        })
    }

    /// Born probabilities for a declared structure and configuration.
    pub fn probabilities(&self, structure: &str, config: &str) -> Result<OutcomeDistribution, QueryError> {
        let (s, c) = self.structure_for(structure, config)?;
        Ok(born_probabilities(&s, c)?)
    }
}

enum Lowering {
    Limit(usize),
    Builtin(BuiltinError),
    Invalid(String),
}

impl From<QuantumError> for Lowering {
    fn from(e: QuantumError) -> Self {
        match e {
            QuantumError::DimensionLimit(d) => Lowering::Limit(d),
            other => Lowering::Invalid(other.to_string()),
        }
    }
}

fn matrix(rows: &[Vec<crate::linalg::ComplexScalar>], dim: usize) -> Result<Matrix, Lowering> {
    let m = Matrix::from_rows(rows).ok_or_else(|| Lowering::Invalid("matrix is not square".into()))?;
    if m.dim() != dim {
        return Err(Lowering::Invalid(format!("matrix is {0}x{0}, but the system has dim {dim}", m.dim())));
    }
    Ok(m)
}

fn lower_structure(src: &StructureSource, dim: usize) -> Result<QuantumStructure, Lowering> {
    match src {
        StructureSource::Builtin(b) => builtins::structure(&b.name.name, &b.args, dim).map_err(|e| match e {
            BuiltinError::Quantum(q) => q.into(),
            other => Lowering::Builtin(other),
        }),
        StructureSource::Vector(v) => {
            if v.len() != dim {
                return Err(Lowering::Invalid(format!("{} amplitudes given, but the system has dim {dim}", v.len())));
            }
            Ok(QuantumStructure::pure(v.clone())?)
        }
        StructureSource::Matrix(rows) => Ok(QuantumStructure::density(matrix(rows, dim)?)?),
    }
}

fn lower_config(id: &str, src: &ConfigSource, dim: usize) -> Result<Configuration, Lowering> {
    match src {
        ConfigSource::Builtin(b) => builtins::configuration(id, &b.name.name, &b.args, dim).map_err(|e| match e {
            BuiltinError::Quantum(q) => q.into(),
            other => Lowering::Builtin(other),
        }),
        ConfigSource::Table { kind, effects } => {
            let mut lowered = Vec::with_capacity(effects.len());
            for e in effects {
                let operator = matrix(&e.matrix, dim).map_err(|err| match err {
                    Lowering::Invalid(m) => Lowering::Invalid(format!("effect `{}`: {m}", e.label)),
                    other => other,
                })?;
                lowered.push(Effect { label: e.label.clone(), operator });
            }
            Ok(Configuration::new(id, *kind, lowered)?)
        }
    }
}
