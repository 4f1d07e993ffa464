//! The four experiment commands; each returns a table.

use std::time::Instant;

use rayon::prelude::*;
use sykmix::epsilon_graph::{check_epsilon_freeness_with_q, CheckKind, Graph};
use sykmix::overlap_stats::{
    falling_factorial_moment_mc, poisson_limit, sign_expectation, sign_expectation_mc, OverlapConfig,
    DEFAULT_BRUTE_FORCE_CAP,
};
use sykmix::partitions::Word;
use sykmix::syk::{
    exact_joint_moment_small, finite_n_pair_moment, limit_moment, mc_joint_moment, sweep_limit_moment, SykFamily,
};
use sykmix::{Method, MomentEstimate};

use crate::config::{Config, Point};
use crate::error::{CliError, Result};
use crate::output::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Estimator {
    DenseMc,
    Reduced,
    ExactSmall,
    Limit,
}

impl Estimator {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "dense-mc" => Ok(Estimator::DenseMc),
            "reduced" => Ok(Estimator::Reduced),
            "exact-small" => Ok(Estimator::ExactSmall),
            "limit" => Ok(Estimator::Limit),
            _ => Err(CliError::Config(format!(
                "unknown method {s:?}; expected dense-mc, reduced, exact-small or limit"
            ))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Estimator::DenseMc => "dense-mc",
            Estimator::Reduced => "reduced",
            Estimator::ExactSmall => "exact-small",
            Estimator::Limit => "limit",
        }
    }

    fn run(self, family: &SykFamily, word: &Word, samples: usize, seed: u64) -> sykmix::Result<MomentEstimate> {
        match self {
            Estimator::DenseMc => mc_joint_moment(family, word, samples, seed),
            Estimator::Reduced => finite_n_pair_moment(family, word, samples, seed),
            Estimator::ExactSmall => exact_joint_moment_small(family, word),
            Estimator::Limit => Ok(MomentEstimate::exact(limit_moment(family, word)?, Method::LimitFormula)),
        }
    }
}

fn word_text(w: &Word) -> String {
    w.to_string()
}

/// Rows of (n, word, method, value, stderr, samples) for every family, word
/// and requested method, plus wall time when `timings` is set.
pub fn moments(config: &Config, timings: bool) -> Result<Table> {
    let points = config.points()?;
    let words = config.words()?;
    let methods = if config.methods.is_empty() {
        vec![Estimator::DenseMc]
    } else {
        config.methods.iter().map(|m| Estimator::parse(m)).collect::<Result<Vec<_>>>()?
    };
    let mut tasks: Vec<(&Point, &Word, Estimator)> = Vec::new();
    for p in &points {
        for w in &words {
            tasks.extend(methods.iter().map(|&m| (p, w, m)));
        }
    }
    let (samples, seed) = (config.samples(), config.seed());
    let results = tasks
        .par_iter()
        .map(|&(p, w, m)| {
            let start = Instant::now();
            let est = m.run(&p.family, w, samples, seed)?;
            Ok((est, start.elapsed().as_secs_f64()))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut columns = vec!["n", "word", "method", "value", "stderr", "samples"];
    if timings {
        columns.push("wall_seconds");
    }
    let mut table = Table::new(columns);
    for (&(p, w, m), (est, secs)) in tasks.iter().zip(results) {
        let mut row: Vec<Cell> = vec![
            p.n.into(),
            word_text(w).into(),
            m.name().into(),
            est.value.into(),
            est.stderr.into(),
            est.samples.into(),
        ];
        if timings {
            row.push(secs.into());
        }
        table.push(row);
    }
    Ok(table)
}

/// Finite-size estimate, limit and gap for each family of a sweep.
///
/// The limit is the same for every row: it uses the declared `λ` values, or
/// the last family's finite-size `λ̂` where none is declared.
pub fn converge(config: &Config) -> Result<Table> {
    let points = config.points()?;
    let words = config.words()?;
    let estimator = Estimator::parse(config.estimator.as_deref().unwrap_or("reduced"))?;
    let families: Vec<SykFamily> = points.iter().map(|p| p.family.clone()).collect();
    let (samples, seed) = (config.samples(), config.seed());
    let mut table = Table::new(vec!["n", "word", "method", "estimate", "stderr", "samples", "limit", "gap"]);
    for w in &words {
        let limit = sweep_limit_moment(&families, w)?;
        let estimates = points
            .par_iter()
            .map(|p| estimator.run(&p.family, w, samples, seed))
            .collect::<sykmix::Result<Vec<_>>>()?;
        for (p, est) in points.iter().zip(estimates) {
            table.push(vec![
                p.n.into(),
                word_text(w).into(),
                estimator.name().into(),
                est.value.into(),
                est.stderr.into(),
                est.samples.into(),
                limit.into(),
                (est.value - limit).abs().into(),
            ]);
        }
    }
    Ok(table)
}

fn graph_text(g: &Graph) -> String {
    let edges: Vec<String> = g.edges().iter().map(|(a, b)| format!("{a}-{b}")).collect();
    edges.join(" ")
}

/// One pass/fail row per checked graph.
pub fn epsilon_check(config: &Config) -> Result<Table> {
    let eps = config.epsilon.clone().unwrap_or_default();
    let graphs: Vec<Graph> = match (eps.all_up_to, &config.graph) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config("give either \"graph\" or \"epsilon.all_up_to\", not both".into()))
        }
        (Some(d), None) => (1..=d).flat_map(Graph::all).collect(),
        (None, Some(g)) => vec![g.graph()?],
        (None, None) => return Err(CliError::Config("epsilon-check needs a \"graph\"".into())),
    };
    let max_len = eps.max_len();
    let reports = graphs
        .par_iter()
        .map(|g| {
            let q = eps.q_matrix(g)?;
            Ok(check_epsilon_freeness_with_q(g, &q, max_len)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(vec![
        "vertices",
        "edges",
        "max_len",
        "commutation_checks",
        "centered_checks",
        "failures",
        "passed",
        "first_failure",
    ]);
    for (g, r) in graphs.iter().zip(reports) {
        let first = r
            .failures
            .first()
            .map(|f| {
                let kind = match f.kind {
                    CheckKind::Commutation => "commutation",
                    CheckKind::CenteredVanishing => "centered-vanishing",
                };
                format!("{kind} {} value {:e}", f.word, f.value)
            })
            .unwrap_or_default();
        table.push(vec![
            g.vertices().into(),
            graph_text(g).into(),
            max_len.into(),
            r.commutation_checks.into(),
            r.centered_checks.into(),
            r.failure_count.into(),
            r.passed().into(),
            first.into(),
        ]);
    }
    Ok(table)
}

/// `Σ_E r_i r_j a_{i,j} / (n_i n_j)`.
fn total_lambda(cfg: &OverlapConfig) -> f64 {
    cfg.edges()
        .iter()
        .map(|&(i, j)| {
            let (ni, nj) = (cfg.domains()[i].len() as f64, cfg.domains()[j].len() as f64);
            cfg.sizes()[i] as f64 * cfg.sizes()[j] as f64 * cfg.overlap(i, j) as f64 / (ni * nj)
        })
        .sum()
}

/// Sign expectations and binomial moments of the total intersection, each
/// next to its Poisson-limit reference value.
pub fn stats(config: &Config) -> Result<Table> {
    let sc = config
        .stats
        .as_ref()
        .ok_or_else(|| CliError::Config("stats needs a \"stats\" section".into()))?;
    let cfg = sc.overlap_config()?;
    let (samples, seed) = (config.samples(), config.seed());
    let lambda = total_lambda(&cfg);
    let quantities: Vec<&str> = if sc.quantities.is_empty() {
        vec!["sign", "falling-factorial"]
    } else {
        sc.quantities.iter().map(String::as_str).collect()
    };
    let ks = if sc.k.is_empty() { vec![0, 1, 2] } else { sc.k.clone() };
    let mut table = Table::new(vec!["quantity", "k", "value", "stderr", "samples", "method", "reference"]);
    let mut push = |q: &str, k: Cell, est: MomentEstimate, reference: f64| {
        table.push(vec![
            q.into(),
            k,
            est.value.into(),
            est.stderr.into(),
            est.samples.into(),
            est.method.as_str().into(),
            reference.into(),
        ]);
    };
    for q in quantities {
        match q {
            "sign" => push(
                q,
                "".into(),
                sign_expectation(&cfg, samples, seed, DEFAULT_BRUTE_FORCE_CAP)?,
                (-2.0 * lambda).exp(),
            ),
            "sign-mc" => push(q, "".into(), sign_expectation_mc(&cfg, samples, seed), (-2.0 * lambda).exp()),
            "falling-factorial" => {
                for &k in &ks {
                    let est = falling_factorial_moment_mc(&cfg, k, samples, seed)?;
                    push(q, k.into(), est, poisson_limit(&[lambda], k));
                }
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown quantity {other:?}; expected sign, sign-mc or falling-factorial"
                )))
            }
        }
    }
    Ok(table)
}
