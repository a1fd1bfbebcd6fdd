//! JSON instance files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use robsub::constraints::{ConstraintFamily, CoveringFamily};
use robsub::function::build_function;
use robsub::robust_min::EACertificate;
use robsub::{Error, FunctionSpec, GroundSet, SetFunction};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProblemTag {
    /// `min_{X ∈ C} max_i f_i(X)`.
    P1,
    /// `max_{X ∈ C} min_i g_i(X)`.
    P2,
    /// `min max_i f_i(X)` subject to `g_j(X) >= c_j`.
    P3,
    /// `max min_j g_j(X)` subject to `f_i(X) <= b_i`.
    P4,
}

/// Precomputed certificate `sqrt(w(X)) <= f(X) <= tightness * sqrt(w(X))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateSpec {
    pub weights: Vec<f64>,
    #[serde(default = "one")]
    pub tightness: f64,
}

fn one() -> f64 {
    1.0
}

fn default_eps() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub ground_set: GroundSet,
    pub problem: ProblemTag,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub f: Vec<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub g: Vec<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint: Option<ConstraintFamily>,
    /// Covering description for the relaxation solver when the constraint
    /// has no built-in one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covering: Option<CoveringFamily>,
    /// One per `f`, for the certificate-based solvers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificates: Option<Vec<CertificateSpec>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub budgets: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<f64>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at `{field}`: {message}")]
    Parse { field: String, message: String },
    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl ToString) -> LoadError {
    LoadError::Invalid {
        field: field.into(),
        message: message.to_string(),
    }
}

/// A validated instance with its functions built.
pub struct Instance {
    pub file: InstanceFile,
    pub fs: Vec<SetFunction>,
    pub gs: Vec<SetFunction>,
}

impl Instance {
    pub fn n(&self) -> usize {
        self.file.ground_set.n
    }

    pub fn constraint(&self) -> &ConstraintFamily {
        self.file
            .constraint
            .as_ref()
            .expect("validated instances of P1/P2 carry a constraint")
    }

    /// Certificates from the file, else derived from the `f` descriptions.
    /// `None` when some function has neither.
    pub fn certificates(&self) -> Option<robsub::Result<Vec<EACertificate>>> {
        if let Some(certs) = &self.file.certificates {
            return Some(
                certs
                    .iter()
                    .zip(&self.fs)
                    .map(|(c, f)| EACertificate::new(f, c.weights.clone(), c.tightness))
                    .collect(),
            );
        }
        self.file
            .f
            .iter()
            .zip(&self.fs)
            .map(|(spec, f)| EACertificate::from_spec(spec, f))
            .collect()
    }
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, LoadError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            LoadError::Parse {
                field: if path.is_empty() || path == "." {
                    "<root>".into()
                } else {
                    path
                },
                message: e.into_inner().to_string(),
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files serialize")
    }

    pub fn read(path: &Path) -> Result<Self, LoadError> {
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Checks dimensions and builds the functions.
    pub fn load(self) -> Result<Instance, LoadError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!(
                    "unsupported version {}, expected {SCHEMA_VERSION}",
                    self.schema_version
                ),
            ));
        }
        self.ground_set
            .validate()
            .map_err(|e| invalid("ground_set", e))?;
        let n = self.ground_set.n;
        let build = |field: &str, specs: &[FunctionSpec]| {
            specs
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    build_function(s, &self.ground_set)
                        .map_err(|e| invalid(format!("{field}[{i}]"), e))
                })
                .collect::<Result<Vec<_>, _>>()
        };
        let fs = build("f", &self.f)?;
        let gs = build("g", &self.g)?;

        let needs_f = matches!(
            self.problem,
            ProblemTag::P1 | ProblemTag::P3 | ProblemTag::P4
        );
        let needs_g = !matches!(self.problem, ProblemTag::P1);
        if needs_f && fs.is_empty() {
            return Err(invalid(
                "f",
                format!("{:?} needs at least one function", self.problem),
            ));
        }
        if needs_g && gs.is_empty() {
            return Err(invalid(
                "g",
                format!("{:?} needs at least one function", self.problem),
            ));
        }
        match (&self.problem, &self.constraint) {
            (ProblemTag::P1 | ProblemTag::P2, None) => {
                return Err(invalid(
                    "constraint",
                    format!("{:?} needs a constraint", self.problem),
                ));
            }
            (_, Some(c)) => {
                c.validate().map_err(|e| invalid("constraint", e))?;
                if c.ground_size() != n {
                    return Err(invalid(
                        "constraint",
                        format!("covers {} elements, ground set has {n}", c.ground_size()),
                    ));
                }
            }
            _ => {}
        }
        if self.problem == ProblemTag::P2 {
            let c = self.constraint.as_ref().expect("checked above");
            if !matches!(
                c,
                ConstraintFamily::CardinalityUpper { .. } | ConstraintFamily::Knapsacks { .. }
            ) {
                return Err(invalid(
                    "constraint",
                    format!(
                        "P2 supports cardinality_upper and knapsacks, got {}",
                        c.name()
                    ),
                ));
            }
        }
        if let Some(cov) = &self.covering {
            cov.validate().map_err(|e| invalid("covering", e))?;
            if cov.n != n {
                return Err(invalid(
                    "covering",
                    format!("covers {} elements, expected {n}", cov.n),
                ));
            }
        }
        if let Some(certs) = &self.certificates {
            if certs.len() != self.f.len() {
                return Err(invalid(
                    "certificates",
                    format!(
                        "{} certificates for {} functions",
                        certs.len(),
                        self.f.len()
                    ),
                ));
            }
            for (i, c) in certs.iter().enumerate() {
                if c.weights.len() != n {
                    return Err(invalid(
                        format!("certificates[{i}].weights"),
                        format!("{} weights, expected {n}", c.weights.len()),
                    ));
                }
            }
        }
        match self.problem {
            ProblemTag::P3 if self.targets.len() != self.g.len() => {
                return Err(invalid(
                    "targets",
                    format!(
                        "{} targets for {} functions",
                        self.targets.len(),
                        self.g.len()
                    ),
                ));
            }
            ProblemTag::P4 if self.budgets.len() != self.f.len() => {
                return Err(invalid(
                    "budgets",
                    format!(
                        "{} budgets for {} functions",
                        self.budgets.len(),
                        self.f.len()
                    ),
                ));
            }
            _ => {}
        }
        if let Some(i) = self
            .targets
            .iter()
            .position(|c| !(c.is_finite() && *c >= 0.0))
        {
            return Err(invalid(format!("targets[{i}]"), "must be finite and >= 0"));
        }
        if let Some(i) = self
            .budgets
            .iter()
            .position(|b| !(b.is_finite() && *b > 0.0))
        {
            return Err(invalid(
                format!("budgets[{i}]"),
                "must be finite and positive",
            ));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(invalid("eps", format!("{} is outside (0, 1)", self.eps)));
        }
        Ok(Instance { file: self, fs, gs })
    }
}

/// Errors that mean "no feasible answer" rather than bad input.
pub fn is_infeasibility(e: &Error) -> bool {
    matches!(
        e,
        Error::Infeasible(_) | Error::InfeasibleTarget { .. } | Error::Coverage { .. }
    )
}
