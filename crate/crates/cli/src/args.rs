//! Command-line surface.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use qbmax_core::lemmas::Tolerance;
use qbmax_core::{QParam, QSequence, Registered, SummabilityMatrix, DEFAULT_GRID_SIZE};

#[derive(Debug, Parser)]
#[command(
    name = "qbmax",
    version,
    about = "Max-product q-Bernstein experiments with CSV output"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate f, B(f) and |B(f) - f| on a uniform grid.
    Eval(EvalArgs),
    /// Grid sup error against the pointwise and uniform error bounds.
    Bound(BoundArgs),
    /// Check one of the kernel-ratio inequalities on per-interval grids.
    Verify(VerifyArgs),
    /// Statistical convergence masses and the error series along a q-sequence.
    Stat(StatArgs),
}

/// Either explicit q values or a schedule evaluated at each n.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct QArgs {
    /// q values in (0, 1], comma separated.
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<f64>>,
    /// duman, inv-square, or a fixed real q.
    #[arg(long)]
    pub q_schedule: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Registered function: id, square, sqrt, tent, sine, const1.
    #[arg(long = "f")]
    pub f: String,
    /// Degrees, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[command(flatten)]
    pub q: QArgs,
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    pub grid: usize,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[arg(long = "f")]
    pub f: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[command(flatten)]
    pub q: QArgs,
    /// Exponent parameters alpha >= 2, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub alpha: Vec<u32>,
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// 2, 3, 4, 5 or kernel.
    #[arg(long)]
    pub lemma: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[command(flatten)]
    pub q: QArgs,
    /// Used by lemma 4 and kernel.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub alpha: Vec<u32>,
    /// Points per partition interval, endpoints included.
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    /// Relative tolerance on every inequality.
    #[arg(long, default_value_t = Tolerance::default().rel)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct StatArgs {
    /// duman, inv-square or constant:<q>.
    #[arg(long)]
    pub seq: String,
    /// cesaro or identity.
    #[arg(long, default_value = "cesaro")]
    pub matrix: String,
    /// Horizon, at least 100.
    #[arg(long = "N", default_value_t = 10_000)]
    pub n_max: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.01")]
    pub eps: Vec<f64>,
    /// Indices at which the sup error is evaluated.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long = "f", default_value = "tent")]
    pub f: String,
    #[arg(long, default_value_t = 3)]
    pub alpha: u32,
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_function(name: &str) -> anyhow::Result<Registered> {
    Registered::from_name(name).with_context(|| {
        let known: Vec<&str> = Registered::ALL.iter().map(|f| f.as_str()).collect();
        format!(
            "unknown function {name:?}; expected one of {}",
            known.join(", ")
        )
    })
}

fn parse_unit(text: &str) -> anyhow::Result<f64> {
    let q: f64 = text
        .parse()
        .with_context(|| format!("invalid q {text:?}"))?;
    if !(0.0..=1.0).contains(&q) {
        bail!("q = {q} outside [0, 1]");
    }
    Ok(q)
}

/// `duman | inv-square | <real>`.
pub fn parse_schedule(text: &str) -> anyhow::Result<QSequence> {
    match text {
        "duman" => Ok(QSequence::DumanExample),
        "inv-square" => Ok(QSequence::InverseSquare),
        other => Ok(QSequence::Constant(parse_unit(other).with_context(
            || format!("unknown q-schedule {other:?}; expected duman, inv-square or a real"),
        )?)),
    }
}

/// `duman | inv-square | constant:<q>`.
pub fn parse_sequence(text: &str) -> anyhow::Result<QSequence> {
    match text {
        "duman" => Ok(QSequence::DumanExample),
        "inv-square" => Ok(QSequence::InverseSquare),
        other => match other.strip_prefix("constant:") {
            Some(q) => Ok(QSequence::Constant(parse_unit(q)?)),
            None => bail!("unknown sequence {other:?}; expected duman, inv-square or constant:<q>"),
        },
    }
}

pub fn parse_matrix(text: &str) -> anyhow::Result<SummabilityMatrix> {
    match text {
        "cesaro" => Ok(SummabilityMatrix::CesaroC1),
        "identity" => Ok(SummabilityMatrix::Identity),
        other => bail!("unknown matrix {other:?}; expected cesaro or identity"),
    }
}

/// One `(n, q)` point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub n: usize,
    pub q: QParam,
}

impl QArgs {
    pub fn describe(&self) -> (&'static str, String) {
        match (&self.q, &self.q_schedule) {
            (Some(qs), _) => ("q", join(qs)),
            (None, Some(s)) => ("q-schedule", s.clone()),
            (None, None) => ("q", String::new()),
        }
    }

    /// Explicit q values give the product with `ns`; a schedule gives one q
    /// per n. Ordered by n, then by position in the q list.
    pub fn sweep(&self, ns: &[usize]) -> anyhow::Result<Vec<SweepPoint>> {
        for &n in ns {
            if n == 0 {
                bail!("degree n must be at least 1");
            }
        }
        let mut points = Vec::new();
        match (&self.q, &self.q_schedule) {
            (Some(qs), _) => {
                let qs = qs
                    .iter()
                    .map(|&q| QParam::new(q).map_err(anyhow::Error::from))
                    .collect::<anyhow::Result<Vec<_>>>()?;
                for &n in ns {
                    points.extend(qs.iter().map(|&q| SweepPoint { n, q }));
                }
            }
            (None, Some(s)) => {
                let seq = parse_schedule(s)?;
                for &n in ns {
                    let q = seq
                        .qparam(n)
                        .with_context(|| format!("q-schedule {s} gives q = 0 at n = {n}"))?;
                    points.push(SweepPoint { n, q });
                }
            }
            (None, None) => bail!("one of --q or --q-schedule is required"),
        }
        Ok(points)
    }
}

pub fn check_grid(grid: usize) -> anyhow::Result<()> {
    if grid < 2 {
        bail!("grid must be at least 2, got {grid}");
    }
    Ok(())
}

pub fn check_alphas(alphas: &[u32]) -> anyhow::Result<()> {
    if let Some(a) = alphas.iter().find(|&&a| a < 2) {
        bail!("alpha must be at least 2, got {a}");
    }
    Ok(())
}

pub fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}
