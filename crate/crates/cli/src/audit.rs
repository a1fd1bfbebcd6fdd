//! Solver output against the exhaustive optimum.

use std::fmt;

use robsub::function::{average, kappa_factor_at_least_one, worst_curvature};
use robsub::oracle::{brute_force_solve, OracleBudget, Problem};
use robsub::{Error, Result};

use crate::instance::{Instance, ProblemTag};
use crate::solve::{solve, Method, Outcome, SolveOptions};

const SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    Fail,
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditLine {
    /// Method name, with a suffix for secondary quantities such as `/size`.
    pub label: String,
    pub ratio: f64,
    pub bound: f64,
    pub verdict: Verdict,
}

impl AuditLine {
    fn check(label: impl Into<String>, ratio: f64, bound: f64) -> Self {
        let verdict = if ratio <= bound * (1.0 + SLACK) + 1e-12 {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        AuditLine {
            label: label.into(),
            ratio,
            bound,
            verdict,
        }
    }

    fn skipped(label: impl Into<String>, why: impl Into<String>) -> Self {
        AuditLine {
            label: label.into(),
            ratio: f64::NAN,
            bound: f64::NAN,
            verdict: Verdict::Skipped(why.into()),
        }
    }
}

impl fmt::Display for AuditLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.verdict {
            Verdict::Skipped(why) => write!(f, "{}, -, -, skipped ({why})", self.label),
            v => write!(
                f,
                "{}, {:.6}, {:.6}, {}",
                self.label,
                self.ratio,
                self.bound,
                if *v == Verdict::Pass { "pass" } else { "fail" }
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub optimum: Option<f64>,
    pub lines: Vec<AuditLine>,
    /// Set when the oracle could not run; no lines are produced then.
    pub skipped: Option<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.verdict != Verdict::Fail)
    }
}

/// `a / b` with `0 / 0 = 1`.
fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else if a <= 1e-12 {
        1.0
    } else {
        f64::INFINITY
    }
}

pub fn run_audit(
    inst: &Instance,
    opts: &SolveOptions,
    budget: &OracleBudget,
) -> Result<AuditReport> {
    let fs = &inst.fs;
    let gs = &inst.gs;
    let problem = match inst.file.problem {
        ProblemTag::P1 => Problem::SubMin {
            fs,
            constraint: inst.constraint(),
        },
        ProblemTag::P2 => Problem::SubMax {
            gs,
            constraint: inst.constraint(),
        },
        ProblemTag::P3 => Problem::Scsc {
            fs,
            gs,
            targets: &inst.file.targets,
        },
        ProblemTag::P4 => Problem::Scsk {
            fs,
            gs,
            budgets: &inst.file.budgets,
        },
    };
    let opt = match brute_force_solve(problem, budget) {
        Ok(o) => o,
        Err(Error::OracleBudget(why)) => {
            return Ok(AuditReport {
                optimum: None,
                lines: Vec::new(),
                skipped: Some(format!("oracle budget exceeded: {why}")),
            });
        }
        Err(e) => return Err(e),
    };
    let eps = opts.eps.unwrap_or(inst.file.eps);
    let methods: Vec<Method> = match opts.method {
        Some(m) => vec![m],
        None => Method::defaults(inst.file.problem).to_vec(),
    };
    let mut lines = Vec::new();
    for m in methods {
        let out = match solve(inst, m, opts) {
            Ok(o) => o,
            Err(Error::Unsupported(why)) => {
                lines.push(AuditLine::skipped(m.to_string(), why));
                continue;
            }
            Err(e) => return Err(e),
        };
        match inst.file.problem {
            ProblemTag::P1 => lines.push(p1_line(inst, opts, &out, &opt.set, opt.value)?),
            ProblemTag::P2 => {
                lines.push(AuditLine::check(
                    m.to_string(),
                    ratio(opt.value, out.objective),
                    1.0 / (1.0 - eps),
                ));
                let relaxed = out.relaxation.unwrap_or(f64::INFINITY);
                match out.sigma {
                    Some(s) => lines.push(AuditLine::check(format!("{m}/violation"), s, relaxed)),
                    None => lines.push(AuditLine::check(
                        format!("{m}/size"),
                        out.set.len() as f64,
                        relaxed,
                    )),
                }
            }
            ProblemTag::P3 => {
                let bound = out.bound.unwrap_or(f64::INFINITY);
                lines.push(AuditLine::check(
                    m.to_string(),
                    ratio(out.objective, opt.value),
                    bound,
                ));
                let floor = if m == Method::Aa { 1.0 } else { 1.0 - eps };
                let rho = out.rho.unwrap_or(0.0);
                lines.push(AuditLine::check(
                    format!("{m}/coverage"),
                    ratio(1.0, rho),
                    1.0 / floor,
                ));
            }
            ProblemTag::P4 => {
                lines.push(AuditLine::check(
                    m.to_string(),
                    ratio(opt.value, out.objective),
                    1.0 / (1.0 - eps),
                ));
                let sigma = out.sigma.unwrap_or(f64::INFINITY);
                lines.push(AuditLine::check(
                    format!("{m}/violation"),
                    sigma,
                    out.relaxation.unwrap_or(f64::INFINITY),
                ));
            }
        }
    }
    Ok(AuditReport {
        optimum: Some(opt.value),
        lines,
        skipped: None,
    })
}

fn p1_line(
    inst: &Instance,
    opts: &SolveOptions,
    out: &Outcome,
    opt_set: &robsub::ElementSet,
    opt: f64,
) -> Result<AuditLine> {
    let l = inst.fs.len();
    let alpha = inst.constraint().approx_factor();
    let size = opt_set.len() as f64;
    let bound = match out.method {
        Method::Mmin => {
            opts.inner.factor(l)
                * alpha
                * kappa_factor_at_least_one(size, worst_curvature(&inst.fs))
        }
        Method::Aa => {
            let kavg = average(&inst.fs)?.curvature_or_zero();
            l as f64 * alpha * kappa_factor_at_least_one(size, kavg)
        }
        _ => out.bound.unwrap_or(f64::INFINITY),
    };
    Ok(AuditLine::check(
        out.method.to_string(),
        ratio(out.objective, opt),
        bound,
    ))
}
