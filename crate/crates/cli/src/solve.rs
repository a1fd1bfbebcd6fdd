//! Dispatch from an instance and a method name to a solver.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use robsub::constraints::{covering_polytope, ConstraintFamily};
use robsub::robust_max::{multiknapsack_robust_max, saturate_robust_max, Reduction};
use robsub::robust_min::{
    aa_submin, cr_submin, ea_submin, mmin_robust_submin, CrOptions, InnerStrategy, MMinOptions,
};
use robsub::scsc_scsk::{
    robust_scsc, robust_scsk, BicriteriaMethod, BicriteriaOptions, ScscInstance, ScskInstance,
};
use robsub::{ElementSet, Error, Result};

use crate::instance::{Instance, ProblemTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Mmin,
    Aa,
    Cr,
    Ea,
    Saturate,
}

impl Method {
    pub fn defaults(problem: ProblemTag) -> &'static [Method] {
        match problem {
            ProblemTag::P1 => &[Method::Mmin, Method::Aa, Method::Cr, Method::Ea],
            ProblemTag::P2 => &[Method::Saturate],
            ProblemTag::P3 | ProblemTag::P4 => &[Method::Mmin, Method::Aa, Method::Ea],
        }
    }

    fn bicriteria(self) -> Option<BicriteriaMethod> {
        match self {
            Method::Mmin => Some(BicriteriaMethod::Mmin),
            Method::Aa => Some(BicriteriaMethod::Aa),
            Method::Ea => Some(BicriteriaMethod::Ea),
            _ => None,
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mmin" => Ok(Method::Mmin),
            "aa" => Ok(Method::Aa),
            "cr" => Ok(Method::Cr),
            "ea" => Ok(Method::Ea),
            "saturate" => Ok(Method::Saturate),
            _ => Err(format!("unknown method `{s}` (mmin, aa, cr, ea, saturate)")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Mmin => "mmin",
            Method::Aa => "aa",
            Method::Cr => "cr",
            Method::Ea => "ea",
            Method::Saturate => "saturate",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub method: Option<Method>,
    pub eps: Option<f64>,
    pub inner: InnerStrategy,
    pub reduction: Reduction,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            method: None,
            eps: None,
            inner: InnerStrategy::Both,
            reduction: Reduction::Both,
        }
    }
}

/// Outcome of one solver run, flattened for CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub problem: ProblemTag,
    pub method: Method,
    pub set: ElementSet,
    pub f_values: Vec<f64>,
    pub g_values: Vec<f64>,
    /// `max_i f_i` for P1/P3, `min_j g_j` for P2/P4.
    pub objective: f64,
    pub sigma: Option<f64>,
    pub rho: Option<f64>,
    pub iterations: usize,
    /// Declared a-priori factor, when the solver reports one.
    pub bound: Option<f64>,
    /// Relaxed size limit or violation bound of the bicriteria solvers, or
    /// the continuous optimum of the relaxation solver.
    pub relaxation: Option<f64>,
    pub wall_ms: f64,
}

#[derive(Serialize)]
pub struct Row {
    problem: String,
    method: String,
    set: String,
    size: usize,
    f_values: String,
    g_values: String,
    objective: f64,
    sigma: Option<f64>,
    rho: Option<f64>,
    iterations: usize,
    bound: Option<f64>,
    relaxation: Option<f64>,
    wall_ms: f64,
}

fn join(v: &[f64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

impl Outcome {
    pub fn row(&self) -> Row {
        Row {
            problem: format!("{:?}", self.problem),
            method: self.method.to_string(),
            set: self
                .set
                .iter()
                .map(|j| j.to_string())
                .collect::<Vec<_>>()
                .join(" "),
            size: self.set.len(),
            f_values: join(&self.f_values),
            g_values: join(&self.g_values),
            objective: self.objective,
            sigma: self.sigma,
            rho: self.rho,
            iterations: self.iterations,
            bound: self.bound,
            relaxation: self.relaxation,
            wall_ms: self.wall_ms,
        }
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{:?} {}: set {} (|X| = {}), objective {}",
            self.problem,
            self.method,
            self.set,
            self.set.len(),
            self.objective
        );
        if let Some(sigma) = self.sigma {
            s += &format!(", sigma {sigma}");
        }
        if let Some(rho) = self.rho {
            s += &format!(", rho {rho}");
        }
        if let Some(b) = self.bound {
            s += &format!(", declared factor {b}");
        }
        s += &format!(", {} iterations, {:.1} ms", self.iterations, self.wall_ms);
        s
    }
}

fn unsupported(problem: ProblemTag, m: Method) -> Error {
    Error::Unsupported(format!("method {m} is not available for {problem:?}"))
}

pub fn solve(inst: &Instance, method: Method, opts: &SolveOptions) -> Result<Outcome> {
    let problem = inst.file.problem;
    let eps = opts.eps.unwrap_or(inst.file.eps);
    let start = Instant::now();
    let mut out = match problem {
        ProblemTag::P1 => solve_p1(inst, method, opts)?,
        ProblemTag::P2 => solve_p2(inst, method, eps, opts)?,
        ProblemTag::P3 | ProblemTag::P4 => {
            let bm = method
                .bicriteria()
                .ok_or_else(|| unsupported(problem, method))?;
            let certificates = match bm {
                BicriteriaMethod::Ea => Some(inst.certificates().ok_or_else(|| {
                    Error::Unsupported("ea needs certificates for every f".into())
                })??),
                _ => None,
            };
            let bopts = BicriteriaOptions {
                eps,
                reduction: opts.reduction,
                certificates,
                ..Default::default()
            };
            let sol = if problem == ProblemTag::P3 {
                robust_scsc(
                    &ScscInstance {
                        fs: inst.fs.clone(),
                        gs: inst.gs.clone(),
                        targets: inst.file.targets.clone(),
                    },
                    bm,
                    &bopts,
                )?
            } else {
                robust_scsk(
                    &ScskInstance {
                        fs: inst.fs.clone(),
                        gs: inst.gs.clone(),
                        budgets: inst.file.budgets.clone(),
                    },
                    bm,
                    &bopts,
                )?
            };
            Outcome {
                problem,
                method,
                set: sol.set,
                f_values: sol.f_values,
                g_values: sol.g_values,
                objective: sol.objective,
                sigma: sol.sigma,
                rho: sol.rho,
                iterations: sol.iterations.max(sol.calls),
                bound: if problem == ProblemTag::P3 {
                    sol.bound
                } else {
                    None
                },
                relaxation: if problem == ProblemTag::P4 {
                    sol.bound
                } else {
                    None
                },
                wall_ms: 0.0,
            }
        }
    };
    out.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(out)
}

fn solve_p1(inst: &Instance, method: Method, opts: &SolveOptions) -> Result<Outcome> {
    let c = inst.constraint();
    let mopts = MMinOptions {
        strategy: opts.inner,
        ..Default::default()
    };
    let sol = match method {
        Method::Mmin => mmin_robust_submin(&inst.fs, c, &mopts)?,
        Method::Aa => aa_submin(&inst.fs, c, &mopts)?,
        Method::Cr => {
            let cover = covering_polytope(c, inst.file.covering.as_ref())?;
            cr_submin(&inst.fs, &cover, c, &CrOptions::default())?
        }
        Method::Ea => {
            let certs = inst
                .certificates()
                .ok_or_else(|| Error::Unsupported("ea needs certificates for every f".into()))??;
            ea_submin(&inst.fs, &certs, c, &mopts)?
        }
        Method::Saturate => return Err(unsupported(ProblemTag::P1, method)),
    };
    Ok(Outcome {
        problem: ProblemTag::P1,
        method,
        f_values: sol.values,
        g_values: Vec::new(),
        objective: sol.worst,
        sigma: None,
        rho: None,
        iterations: sol.trace.len(),
        bound: sol.bound,
        relaxation: sol.continuous,
        wall_ms: 0.0,
        set: sol.set,
    })
}

fn solve_p2(inst: &Instance, method: Method, eps: f64, opts: &SolveOptions) -> Result<Outcome> {
    if method != Method::Saturate {
        return Err(unsupported(ProblemTag::P2, method));
    }
    let sol = match inst.constraint() {
        ConstraintFamily::CardinalityUpper { k, .. } => saturate_robust_max(&inst.gs, *k, eps)?,
        ConstraintFamily::Knapsacks { knapsacks, .. } => {
            multiknapsack_robust_max(&inst.gs, knapsacks, eps, opts.reduction)?
        }
        other => {
            return Err(Error::Unsupported(format!(
                "P2 under {} constraints",
                other.name()
            )));
        }
    };
    let (sigma, relaxation) = match &sol.violation {
        Some(v) => (Some(v.max.max(1.0)), Some(v.bound)),
        None => (None, sol.size_limit.map(|k| k as f64)),
    };
    Ok(Outcome {
        problem: ProblemTag::P2,
        method,
        f_values: Vec::new(),
        g_values: sol.values,
        objective: sol.min_value,
        sigma,
        rho: None,
        iterations: 1,
        bound: Some(1.0 / (1.0 - eps)),
        relaxation,
        wall_ms: 0.0,
        set: sol.set,
    })
}
