//! Synthetic robust-minimization experiment over random clustered-sqrt
//! functions.
//!
//! Each run draws one weight vector `w ~ U[0,1]^n` and `l` random
//! clusterings, giving `f_j(X) = sum_i sqrt(w(X ∩ C_ji))`, then minimizes
//! `max_j f_j(X)` subject to `|X| >= k` with every solver. With
//! `independent_weights` each function draws its own `w` instead.

use std::io::Write;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use robsub::constraints::{covering_polytope, ConstraintFamily};
use robsub::function::build_function;
use robsub::generate;
use robsub::robust_min::{
    aa_submin, cr_submin, ea_submin, mmin_robust_submin, CrOptions, EACertificate, MMinOptions,
    SolverKind,
};
use robsub::{par, GroundSet, Result, SetFunction};

/// Generator identifier recorded alongside the output.
pub const RNG_ID: &str = "ChaCha8 (rand_chacha 0.9), run seed = seed + run index";

pub const METHODS: [SolverKind; 4] = [
    SolverKind::Mmin,
    SolverKind::Aa,
    SolverKind::Cr,
    SolverKind::Ea,
];

#[derive(Debug, Clone)]
pub struct SyntheticParams {
    pub n: usize,
    pub ls: Vec<usize>,
    pub k: usize,
    pub runs: usize,
    pub seed: u64,
    pub clusters: usize,
    pub independent_weights: bool,
    pub timing: bool,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        SyntheticParams {
            n: 50,
            ls: vec![3, 10],
            k: 10,
            runs: 20,
            seed: 0,
            clusters: 5,
            independent_weights: false,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub seed: u64,
    pub l: usize,
    pub method: String,
    pub worst_value: f64,
    pub wall_ms: Option<f64>,
}

impl SyntheticParams {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.n == 0 || self.runs == 0 || self.clusters == 0 || self.ls.is_empty() {
            return Err("n, runs, clusters and l must be positive".into());
        }
        if self.ls.contains(&0) {
            return Err("every l must be positive".into());
        }
        if self.k == 0 || self.k > self.n {
            return Err(format!("k = {} must lie in 1..={}", self.k, self.n));
        }
        Ok(())
    }

    pub fn header(&self) -> String {
        format!(
            "synthetic: minimize max_j f_j(X) subject to |X| >= {k} (cardinality lower bound); \
             n = {n}, clusters = {c}, {w} weights, l in {ls:?}, {runs} runs; rng {RNG_ID}",
            k = self.k,
            n = self.n,
            c = self.clusters,
            w = if self.independent_weights {
                "independent"
            } else {
                "shared"
            },
            ls = self.ls,
            runs = self.runs,
        )
    }
}

fn one_run(p: &SyntheticParams, l: usize, seed: u64) -> Result<Vec<Record>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ground = GroundSet::new(p.n)?;
    let specs = if p.independent_weights {
        (0..l)
            .map(|_| generate::clustered_sqrt(p.n, p.clusters, &mut rng))
            .collect()
    } else {
        generate::shared_weight_clusterings(p.n, p.clusters, l, &mut rng)
    };
    let fs = specs
        .iter()
        .map(|s| build_function(s, &ground))
        .collect::<Result<Vec<SetFunction>>>()?;
    let certs = specs
        .iter()
        .zip(&fs)
        .map(|(s, f)| EACertificate::from_spec(s, f).expect("clustered sqrt has a certificate"))
        .collect::<Result<Vec<_>>>()?;
    let c = ConstraintFamily::CardinalityLower { n: p.n, k: p.k };
    let cover = covering_polytope(&c, None)?;
    let opts = MMinOptions::default();
    METHODS
        .iter()
        .map(|&m| {
            let start = Instant::now();
            let sol = match m {
                SolverKind::Mmin => mmin_robust_submin(&fs, &c, &opts)?,
                SolverKind::Aa => aa_submin(&fs, &c, &opts)?,
                SolverKind::Cr => cr_submin(&fs, &cover, &c, &CrOptions::default())?,
                SolverKind::Ea => ea_submin(&fs, &certs, &c, &opts)?,
            };
            let ms = start.elapsed().as_secs_f64() * 1e3;
            Ok(Record {
                seed,
                l,
                method: m.to_string(),
                worst_value: sol.worst,
                wall_ms: p.timing.then_some(ms),
            })
        })
        .collect()
}

/// Rows ordered by `l`, then run, then method, whatever order runs finish in.
pub fn run_synthetic(p: &SyntheticParams) -> Result<Vec<Record>> {
    let mut rows = Vec::new();
    for &l in &p.ls {
        let per_run = par::map_range(p.runs, |r| one_run(p, l, p.seed.wrapping_add(r as u64)));
        for run in per_run {
            rows.extend(run?);
        }
    }
    Ok(rows)
}

pub fn write_csv(rows: &[Record], out: impl Write) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(["seed", "l", "method", "worst_value", "wall_ms"])?;
    }
    w.flush()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    }
}

/// Per `l`, whether the median worst value of MMin is at most that of AA.
pub fn trend(rows: &[Record]) -> Vec<(usize, f64, f64)> {
    let mut ls: Vec<usize> = rows.iter().map(|r| r.l).collect();
    ls.dedup();
    ls.into_iter()
        .map(|l| {
            let pick = |m: &str| {
                median(
                    rows.iter()
                        .filter(|r| r.l == l && r.method == m)
                        .map(|r| r.worst_value)
                        .collect(),
                )
            };
            (l, pick("mmin"), pick("aa"))
        })
        .collect()
}
