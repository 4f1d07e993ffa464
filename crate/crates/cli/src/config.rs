//! JSON experiment configuration and its resolution into model families.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sykmix::epsilon_graph::{build_overlap_sets_with, Graph};
use sykmix::overlap_stats::OverlapConfig;
use sykmix::partitions::{Label, QMatrix};
use sykmix::syk::{sweep_parities, CouplingLaw, SykFamily, SykModelSpec};

use crate::error::{CliError, Result};

pub const DEFAULT_SAMPLES: usize = 2000;
pub const DEFAULT_MAX_LEN: usize = 6;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub seed: Option<u64>,
    /// Worker threads; not part of the recorded config because results do
    /// not depend on it.
    #[serde(default, skip_serializing)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub words: Vec<Vec<Label>>,
    /// Requested `moments` methods: dense-mc, reduced, exact-small, limit.
    #[serde(default)]
    pub methods: Vec<String>,
    /// Finite-size estimator for `converge`.
    #[serde(default)]
    pub estimator: Option<String>,
    #[serde(default)]
    pub families: Vec<FamilyConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub graph: Option<GraphConfig>,
    #[serde(default)]
    pub epsilon: Option<EpsilonConfig>,
    #[serde(default)]
    pub stats: Option<StatsConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub models: Vec<ModelConfig>,
    #[serde(default)]
    pub lambda: Vec<LambdaConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub label: Label,
    pub domain: DomainConfig,
    pub r: usize,
    #[serde(default)]
    pub law: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainConfig {
    List(Vec<u32>),
    /// Inclusive `[lo, hi]`.
    Range { range: [u32; 2] },
}

impl DomainConfig {
    fn indices(&self) -> Result<Vec<u32>> {
        match self {
            DomainConfig::List(v) => Ok(v.clone()),
            DomainConfig::Range { range: [lo, hi] } if lo <= hi => Ok((*lo..=*hi).collect()),
            DomainConfig::Range { range } => Err(CliError::Config(format!("empty range {range:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaConfig {
    pub pair: [Label; 2],
    pub value: LambdaValue,
}

/// A finite `λ ≥ 0` or the string `"inf"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaValue {
    Finite(f64),
    Named(String),
}

impl LambdaValue {
    fn value(&self) -> Result<f64> {
        match self {
            LambdaValue::Finite(v) => Ok(*v),
            LambdaValue::Named(s) if matches!(s.as_str(), "inf" | "infinity") => Ok(f64::INFINITY),
            LambdaValue::Named(s) => Err(CliError::Config(format!("lambda value {s:?} is neither a number nor \"inf\""))),
        }
    }
}

/// Families indexed by a size parameter `n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n: Vec<usize>,
    pub models: Vec<SweepModel>,
    #[serde(default)]
    pub lambda: Vec<LambdaConfig>,
}

/// Domain `{start, …, start + size − 1}` with both ends linear in `n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepModel {
    pub label: Label,
    #[serde(default = "Linear::one")]
    pub start: Linear,
    #[serde(default = "Linear::n")]
    pub size: Linear,
    pub r: RuleConfig,
    #[serde(default)]
    pub law: Option<String>,
}

/// `round(n_coef · n) + c`, or a plain integer.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Linear {
    Const(i64),
    Affine {
        #[serde(default)]
        n: f64,
        #[serde(default)]
        c: i64,
    },
}

impl Linear {
    fn one() -> Self {
        Linear::Const(1)
    }

    fn n() -> Self {
        Linear::Affine { n: 1.0, c: 0 }
    }

    fn eval(&self, n: usize) -> i64 {
        match *self {
            Linear::Const(c) => c,
            Linear::Affine { n: coef, c } => (coef * n as f64).round() as i64 + c,
        }
    }
}

/// Interaction length as a function of the domain size `s`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RuleConfig {
    Fixed(usize),
    /// `round(c·√s)`.
    Sqrt { sqrt: f64 },
    /// `round(f·s)`.
    Fraction { fraction: f64 },
    /// `⌊coef · s^pow⌋`.
    Pow {
        pow: f64,
        #[serde(default = "one")]
        coef: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl RuleConfig {
    fn eval(&self, size: usize) -> usize {
        let s = size as f64;
        match *self {
            RuleConfig::Fixed(r) => r,
            RuleConfig::Sqrt { sqrt } => (sqrt * s.sqrt()).round() as usize,
            RuleConfig::Fraction { fraction } => (fraction * s).round() as usize,
            RuleConfig::Pow { pow, coef } => (coef * s.powf(pow)).floor() as usize,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    pub vertices: usize,
    /// 1-based vertex pairs.
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
    /// Scales for the overlap construction.
    #[serde(default)]
    pub m: Vec<usize>,
    #[serde(default)]
    pub law: Option<String>,
}

impl GraphConfig {
    pub fn graph(&self) -> Result<Graph> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|&[a, b]| (a, b)).collect();
        Ok(Graph::from_edges(self.vertices, &edges)?)
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonConfig {
    #[serde(default)]
    pub max_len: Option<usize>,
    /// Diagonal `q_{k,k}`; zeros when absent.
    #[serde(default)]
    pub q_diag: Option<Vec<f64>>,
    /// Check every labeled graph on `1..=all_up_to` vertices instead of `graph`.
    #[serde(default)]
    pub all_up_to: Option<usize>,
    /// Entries replacing `q_{i,j} = ε_{i,j}`, e.g. to run a negative control.
    #[serde(default)]
    pub q_overrides: Vec<QOverride>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QOverride {
    pub pair: [Label; 2],
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsConfig {
    #[serde(default)]
    pub pair: Option<PairConfig>,
    #[serde(default)]
    pub domains: Vec<DomainConfig>,
    #[serde(default)]
    pub sizes: Vec<usize>,
    /// 1-based domain pairs.
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
    /// Any of sign, sign-mc, falling-factorial.
    #[serde(default)]
    pub quantities: Vec<String>,
    /// Orders for falling-factorial rows.
    #[serde(default)]
    pub k: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairConfig {
    pub n1: usize,
    pub n2: usize,
    pub a: usize,
    pub r1: usize,
    pub r2: usize,
}

/// One resolved family together with its size parameter.
pub struct Point {
    pub n: usize,
    pub family: SykFamily,
}

fn law(name: &Option<String>) -> Result<CouplingLaw> {
    match name {
        None => Ok(CouplingLaw::Gaussian),
        Some(s) => s.parse().map_err(|_| CliError::Config(format!("unknown coupling law {s:?}"))),
    }
}

fn declare(family: &mut SykFamily, lambdas: &[LambdaConfig]) -> Result<()> {
    for l in lambdas {
        family.declare_lambda(l.pair[0], l.pair[1], l.value.value()?)?;
    }
    Ok(())
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(DEFAULT_SAMPLES)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Families from exactly one of `families`, `sweep` or `graph`.
    pub fn points(&self) -> Result<Vec<Point>> {
        let sources = usize::from(!self.families.is_empty()) + usize::from(self.sweep.is_some()) + usize::from(self.graph.is_some());
        if sources != 1 {
            return Err(CliError::Config(
                "give exactly one of \"families\", \"sweep\" or \"graph\"".into(),
            ));
        }
        if let Some(sweep) = &self.sweep {
            return sweep_points(sweep);
        }
        if let Some(g) = &self.graph {
            let graph = g.graph()?;
            if g.m.is_empty() {
                return Err(CliError::Config("graph construction needs at least one \"m\"".into()));
            }
            let law = law(&g.law)?;
            return g
                .m
                .iter()
                .map(|&m| {
                    Ok(Point {
                        n: g.vertices * g.vertices * m,
                        family: build_overlap_sets_with(&graph, m, law)?,
                    })
                })
                .collect();
        }
        self.families
            .iter()
            .map(|fc| {
                let specs = fc
                    .models
                    .iter()
                    .map(|m| Ok(SykModelSpec::new(m.label, m.domain.indices()?, m.r, law(&m.law)?)?))
                    .collect::<Result<Vec<_>>>()?;
                let n = specs.iter().map(SykModelSpec::size).max().unwrap_or(0);
                let mut family = SykFamily::new(specs)?;
                declare(&mut family, &fc.lambda)?;
                Ok(Point { n, family })
            })
            .collect()
    }

    pub fn words(&self) -> Result<Vec<sykmix::partitions::Word>> {
        if self.words.is_empty() {
            return Err(CliError::Config("no \"words\" given".into()));
        }
        Ok(self.words.iter().map(|w| sykmix::partitions::Word::new(w.clone())).collect())
    }
}

fn sweep_points(sweep: &SweepConfig) -> Result<Vec<Point>> {
    if sweep.n.is_empty() {
        return Err(CliError::Config("sweep needs at least one \"n\"".into()));
    }
    let points = sweep
        .n
        .iter()
        .map(|&n| {
            let specs = sweep
                .models
                .iter()
                .map(|m| {
                    let start = m.start.eval(n);
                    let size = m.size.eval(n);
                    if start < 0 || size < 0 || start + size - 1 > u32::MAX as i64 {
                        return Err(CliError::Config(format!(
                            "label {}: domain start {start} / size {size} out of range at n = {n}",
                            m.label
                        )));
                    }
                    let domain: Vec<u32> = (start as u32..(start + size) as u32).collect();
                    let r = m.r.eval(domain.len());
                    Ok(SykModelSpec::new(m.label, domain, r, law(&m.law)?)?)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut family = SykFamily::new(specs)?;
            declare(&mut family, &sweep.lambda)?;
            Ok(Point { n, family })
        })
        .collect::<Result<Vec<_>>>()?;
    let families: Vec<SykFamily> = points.iter().map(|p| p.family.clone()).collect();
    sweep_parities(&families)?;
    Ok(points)
}

impl StatsConfig {
    pub fn overlap_config(&self) -> Result<OverlapConfig> {
        if let Some(p) = &self.pair {
            if !self.domains.is_empty() {
                return Err(CliError::Config("give either \"pair\" or \"domains\", not both".into()));
            }
            return Ok(OverlapConfig::pair(p.n1, p.n2, p.a, p.r1, p.r2)?);
        }
        let domains = self.domains.iter().map(DomainConfig::indices).collect::<Result<Vec<_>>>()?;
        let mut edges = Vec::with_capacity(self.edges.len());
        for &[a, b] in &self.edges {
            if a == 0 || b == 0 {
                return Err(CliError::Config("stats edges are 1-based".into()));
            }
            edges.push((a - 1, b - 1));
        }
        Ok(OverlapConfig::new(domains, self.sizes.clone(), edges)?)
    }
}

impl EpsilonConfig {
    pub fn max_len(&self) -> usize {
        self.max_len.unwrap_or(DEFAULT_MAX_LEN)
    }

    pub fn q_matrix(&self, g: &Graph) -> Result<QMatrix> {
        let diag = match &self.q_diag {
            Some(d) if d.len() == g.vertices() => d.clone(),
            Some(d) => {
                return Err(CliError::Config(format!(
                    "q_diag has {} entries for {} vertices",
                    d.len(),
                    g.vertices()
                )))
            }
            None => vec![0.0; g.vertices()],
        };
        let mut q = g.q_matrix(&diag)?;
        let mut seen = BTreeSet::new();
        for o in &self.q_overrides {
            let key = (o.pair[0].min(o.pair[1]), o.pair[0].max(o.pair[1]));
            if !seen.insert(key) {
                return Err(CliError::Config(format!("q override for {key:?} given twice")));
            }
            q.set(o.pair[0], o.pair[1], o.value)?;
        }
        Ok(q)
    }
}
