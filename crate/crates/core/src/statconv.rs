//! A-statistical convergence with finitely supported summability rows.
//!
//! Sequences are indexed from 1: `x[0]` holds `x_1`. Limits are replaced by
//! finite-horizon masses; the trend verdicts state their horizon and
//! threshold explicitly.

use alloc::vec::Vec;

use crate::lemmas::Verdict;
use crate::modulus::ModulusGrid;
use crate::operators::{check_alpha, MaxProductOperator};
use crate::qcalc::QParam;
use crate::{Error, Result, TestFunction};

/// Explicit nonnegative rows `1..=rows.len()` of `(column, a_nk)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomMatrix {
    rows: Vec<Vec<(usize, f64)>>,
}

impl CustomMatrix {
    pub fn new(rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            for &(column, value) in row {
                if column == 0 || !(value >= 0.0 && value.is_finite()) {
                    return Err(Error::NegativeEntry {
                        row: i + 1,
                        column,
                        value,
                    });
                }
            }
        }
        Ok(CustomMatrix { rows })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SummabilityMatrix {
    /// `a_nk = 1/n` for `k <= n`.
    CesaroC1,
    /// `a_nk = [n = k]`.
    Identity,
    Custom(CustomMatrix),
}

impl SummabilityMatrix {
    pub fn name(&self) -> &'static str {
        match self {
            SummabilityMatrix::CesaroC1 => "cesaro",
            SummabilityMatrix::Identity => "identity",
            SummabilityMatrix::Custom(_) => "custom",
        }
    }

    pub fn row(&self, n: usize) -> Result<Vec<(usize, f64)>> {
        check_row(n)?;
        Ok(match self {
            SummabilityMatrix::CesaroC1 => {
                let w = 1.0 / n as f64;
                (1..=n).map(|k| (k, w)).collect()
            }
            SummabilityMatrix::Identity => alloc::vec![(n, 1.0)],
            SummabilityMatrix::Custom(m) => m.rows.get(n - 1).cloned().unwrap_or_default(),
        })
    }

    /// Largest column in row `n` (0 for an empty row).
    pub fn support_end(&self, n: usize) -> Result<usize> {
        check_row(n)?;
        Ok(match self {
            SummabilityMatrix::CesaroC1 | SummabilityMatrix::Identity => n,
            SummabilityMatrix::Custom(m) => m
                .rows
                .get(n - 1)
                .map(|r| r.iter().map(|&(k, _)| k).max().unwrap_or(0))
                .unwrap_or(0),
        })
    }

    /// Row sum. The structured kinds are stochastic by construction, so
    /// their sum is exactly 1 rather than an accumulated `n * (1/n)`.
    pub fn row_sum(&self, n: usize) -> Result<f64> {
        check_row(n)?;
        Ok(match self {
            SummabilityMatrix::CesaroC1 | SummabilityMatrix::Identity => 1.0,
            SummabilityMatrix::Custom(_) => self.row(n)?.iter().map(|&(_, a)| a).sum(),
        })
    }

    /// `sum_k a_nk [k in K]` for every row `n = 1..=indicator.len()`.
    pub fn row_masses(&self, indicator: &[bool]) -> Result<Vec<f64>> {
        match self {
            SummabilityMatrix::CesaroC1 => {
                let mut count = 0usize;
                Ok(indicator
                    .iter()
                    .enumerate()
                    .map(|(i, &hit)| {
                        count += hit as usize;
                        count as f64 / (i + 1) as f64
                    })
                    .collect())
            }
            SummabilityMatrix::Identity => Ok(indicator
                .iter()
                .map(|&hit| if hit { 1.0 } else { 0.0 })
                .collect()),
            SummabilityMatrix::Custom(_) => (1..=indicator.len())
                .map(|n| a_density_tail(self, |k| indicator[k - 1], n, indicator.len()))
                .collect(),
        }
    }
}

fn check_row(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidRow(n))
    } else {
        Ok(())
    }
}

fn check_support(a: &SummabilityMatrix, n: usize, available: usize) -> Result<()> {
    let needed = a.support_end(n)?;
    if needed > available {
        Err(Error::Truncated {
            row: n,
            needed,
            available,
        })
    } else {
        Ok(())
    }
}

/// `(Ax)_n = sum_k a_nk x_k`.
pub fn a_transform(a: &SummabilityMatrix, x: &[f64], n: usize) -> Result<f64> {
    check_support(a, n, x.len())?;
    Ok(match a {
        SummabilityMatrix::CesaroC1 => x[..n].iter().sum::<f64>() / n as f64,
        _ => a.row(n)?.iter().map(|&(k, w)| w * x[k - 1]).sum(),
    })
}

/// `n`-th partial A-density of `K`: `sum_k a_nk chi_K(k)`. `available`
/// is the largest index the caller can vouch for.
pub fn a_density_tail(
    a: &SummabilityMatrix,
    in_set: impl Fn(usize) -> bool,
    n: usize,
    available: usize,
) -> Result<f64> {
    check_support(a, n, available)?;
    Ok(match a {
        SummabilityMatrix::CesaroC1 => (1..=n).filter(|&k| in_set(k)).count() as f64 / n as f64,
        _ => a
            .row(n)?
            .iter()
            .filter(|&&(k, _)| in_set(k))
            .map(|&(_, w)| w)
            .sum(),
    })
}

/// Row mass on `{k : |x_k - L| >= eps}`.
pub fn st_a_violation_mass(
    a: &SummabilityMatrix,
    x: &[f64],
    limit: f64,
    eps: f64,
    n: usize,
) -> Result<f64> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidScale(eps));
    }
    a_density_tail(a, |k| libm::fabs(x[k - 1] - limit) >= eps, n, x.len())
}

pub fn is_perfect_square(n: usize) -> bool {
    let mut r = libm::sqrt(n as f64) as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r * r == n
}

/// Sequences `(q_n)` with values in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QSequence {
    /// `0` on perfect squares, `1 - e^{-n}/n` elsewhere.
    DumanExample,
    /// `1 - 1/(n+1)^2`.
    InverseSquare,
    Constant(f64),
}

impl QSequence {
    pub fn name(&self) -> alloc::string::String {
        match self {
            QSequence::DumanExample => "duman".into(),
            QSequence::InverseSquare => "inv-square".into(),
            QSequence::Constant(q) => alloc::format!("constant:{q}"),
        }
    }

    /// `1 - q_n`, computed directly so it survives when `q_n` rounds to 1.
    pub fn complement(&self, n: usize) -> f64 {
        match *self {
            QSequence::DumanExample if is_perfect_square(n) => 1.0,
            QSequence::DumanExample => libm::exp(-(n as f64)) / n as f64,
            QSequence::InverseSquare => 1.0 / ((n + 1) as f64 * (n + 1) as f64),
            QSequence::Constant(q) => 1.0 - q,
        }
    }

    pub fn value(&self, n: usize) -> f64 {
        match *self {
            QSequence::Constant(q) => q,
            _ => 1.0 - self.complement(n),
        }
    }

    /// `q_n` as an operator parameter; `None` where `q_n = 0`.
    pub fn qparam(&self, n: usize) -> Option<QParam> {
        QParam::new(self.value(n)).ok()
    }

    /// `ln q_n` from the complement.
    fn ln_q(&self, n: usize) -> f64 {
        libm::log1p(-self.complement(n))
    }

    /// `q_n^e`.
    pub fn power(&self, n: usize, e: usize) -> f64 {
        if e == 0 {
            1.0
        } else {
            libm::exp(e as f64 * self.ln_q(n))
        }
    }

    /// `1 - q_n^e`.
    pub fn power_complement(&self, n: usize, e: usize) -> f64 {
        if e == 0 {
            0.0
        } else {
            -libm::expm1(e as f64 * self.ln_q(n))
        }
    }

    /// `[m]_{q_n}`, with `[m]_0 = 1` for `m >= 1`.
    pub fn q_integer(&self, n: usize, m: usize) -> f64 {
        let ln_q = self.ln_q(n);
        if m == 0 {
            0.0
        } else if ln_q == f64::NEG_INFINITY {
            1.0
        } else if ln_q == 0.0 {
            m as f64
        } else {
            libm::expm1(m as f64 * ln_q) / libm::expm1(ln_q)
        }
    }
}

/// Which `(st-)limit` condition a mass series tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StTarget {
    /// `q_n^n -> 1`
    PowerToOne,
    /// `1 / [n]_{q_n} -> 0`
    InverseQIntegerToZero,
}

impl StTarget {
    pub fn as_str(self) -> &'static str {
        match self {
            StTarget::PowerToOne => "q_n^n->1",
            StTarget::InverseQIntegerToZero => "1/[n]_q_n->0",
        }
    }

    /// `|x_n - L|` for the target.
    pub fn deviation(self, seq: &QSequence, n: usize) -> f64 {
        match self {
            StTarget::PowerToOne => seq.power_complement(n, n),
            StTarget::InverseQIntegerToZero => 1.0 / seq.q_integer(n, n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassSeries {
    pub target: StTarget,
    pub eps: f64,
    /// Row masses for `n = 1..=n_max`.
    pub masses: Vec<f64>,
    pub checkpoints: Vec<(usize, f64)>,
    pub converges: bool,
}

impl MassSeries {
    pub fn final_mass(&self) -> f64 {
        *self.masses.last().unwrap_or(&f64::NAN)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StLimitReport {
    pub sequence: QSequence,
    pub matrix: SummabilityMatrix,
    pub n_max: usize,
    /// `2 floor(sqrt(n_max)) / n_max`
    pub threshold: f64,
    pub series: Vec<MassSeries>,
}

impl StLimitReport {
    pub fn converges(&self) -> bool {
        self.series.iter().all(|s| s.converges)
    }

    pub fn get(&self, target: StTarget, eps: f64) -> Option<&MassSeries> {
        self.series
            .iter()
            .find(|s| s.target == target && s.eps == eps)
    }
}

pub const MIN_HORIZON: usize = 100;
pub const DEFAULT_EPS: [f64; 2] = [0.1, 0.01];

/// `n_max/16, n_max/8, n_max/4, n_max/2, n_max`.
pub fn checkpoints(n_max: usize) -> Vec<usize> {
    let mut out: Vec<usize> = [16, 8, 4, 2, 1]
        .iter()
        .map(|d| (n_max / d).max(1))
        .collect();
    out.dedup();
    out
}

fn isqrt(n: usize) -> usize {
    (0..=n).take_while(|r| r * r <= n).last().unwrap_or(0)
}

/// Cesaro masses of both conditions for `eps in {0.1, 0.01}`.
pub fn verify_st_limit_conditions(seq: QSequence, n_max: usize) -> Result<StLimitReport> {
    verify_st_limit_conditions_with(seq, &SummabilityMatrix::CesaroC1, n_max, &DEFAULT_EPS)
}

/// A series converges when its checkpoint masses are nonincreasing and the
/// final mass is at most `2 floor(sqrt(n_max)) / n_max`.
pub fn verify_st_limit_conditions_with(
    seq: QSequence,
    matrix: &SummabilityMatrix,
    n_max: usize,
    eps_list: &[f64],
) -> Result<StLimitReport> {
    if n_max < MIN_HORIZON {
        return Err(Error::HorizonTooShort {
            n_max,
            minimum: MIN_HORIZON,
        });
    }
    let threshold = 2.0 * isqrt(n_max) as f64 / n_max as f64;
    let marks = checkpoints(n_max);
    let mut series = Vec::new();
    for target in [StTarget::PowerToOne, StTarget::InverseQIntegerToZero] {
        let deviations: Vec<f64> = (1..=n_max).map(|n| target.deviation(&seq, n)).collect();
        for &eps in eps_list {
            if eps.is_nan() || eps <= 0.0 {
                return Err(Error::InvalidScale(eps));
            }
            let indicator: Vec<bool> = deviations.iter().map(|&d| d >= eps).collect();
            let masses = matrix.row_masses(&indicator)?;
            let checkpoints: Vec<(usize, f64)> =
                marks.iter().map(|&n| (n, masses[n - 1])).collect();
            let nonincreasing = checkpoints.windows(2).all(|w| w[1].1 <= w[0].1);
            let converges = nonincreasing && masses[n_max - 1] <= threshold;
            series.push(MassSeries {
                target,
                eps,
                masses,
                checkpoints,
                converges,
            });
        }
    }
    Ok(StLimitReport {
        sequence: seq,
        matrix: matrix.clone(),
        n_max,
        threshold,
        series,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem8Row {
    pub n: usize,
    pub q_n: f64,
    /// `q_n = 0`; the operator is undefined there.
    pub excluded: bool,
    /// `E_n^q = sup_x |B_{n,q_n}(f)(x) - f(x)|` on the grid.
    pub sup_error: Option<f64>,
    /// `4 (1 + 2/q_n^{n+1}) omega(f; [n+1]_{q_n}^{-(1-1/alpha)})`
    pub bound_thm6: Option<f64>,
    /// Same with `[n]_{q_n}` in the modulus argument.
    pub bound_thm8: Option<f64>,
    /// `q_n^{n+1} (1 + q_n) >= 1`
    pub gate: bool,
    /// Compares `sup_error` against `bound_thm6` widened by the grid slack.
    pub verdict: Option<Verdict>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem8Report {
    pub alpha: u32,
    pub grid_size: usize,
    pub rows: Vec<Theorem8Row>,
}

impl Theorem8Report {
    pub fn failures(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.verdict == Some(Verdict::Fail))
            .count()
    }

    /// `E_n^q` over the evaluated rows in index order.
    pub fn error_series(&self) -> Vec<(usize, f64)> {
        self.rows
            .iter()
            .filter_map(|r| r.sup_error.map(|e| (r.n, e)))
            .collect()
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.error_series().windows(2).all(|w| w[1].1 < w[0].1)
    }
}

pub fn theorem8_harness<F: TestFunction + ?Sized>(
    f: &F,
    seq: QSequence,
    n_list: &[usize],
    grid_size: usize,
    alpha: u32,
) -> Result<Theorem8Report> {
    check_alpha(alpha)?;
    let grid = ModulusGrid::new(f, grid_size)?;
    let exponent = 1.0 - 1.0 / alpha as f64;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        if n == 0 {
            return Err(Error::InvalidDegree(n));
        }
        let q_n = seq.value(n);
        let Some(q) = seq.qparam(n) else {
            rows.push(Theorem8Row {
                n,
                q_n,
                excluded: true,
                sup_error: None,
                bound_thm6: None,
                bound_thm8: None,
                gate: false,
                verdict: None,
            });
            continue;
        };
        let (sup, _) = MaxProductOperator::new(n, q)?.sup_error(f, grid_size)?;
        let factor = 4.0 * (1.0 + 2.0 / seq.power(n, n + 1));
        let rate6 = libm::pow(seq.q_integer(n, n + 1), -exponent);
        let rate8 = libm::pow(seq.q_integer(n, n), -exponent);
        let bound6 = factor * grid.omega(rate6)?;
        let bound8 = factor * grid.omega(rate8)?;
        let gate = seq.power(n, n + 1) * (1.0 + q_n) >= 1.0;
        let verdict = if !gate {
            Verdict::Skip
        } else if sup <= factor * grid.omega_upper(rate6)? {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        rows.push(Theorem8Row {
            n,
            q_n,
            excluded: false,
            sup_error: Some(sup),
            bound_thm6: Some(bound6),
            bound_thm8: Some(bound8),
            gate,
            verdict: Some(verdict),
        });
    }
    Ok(Theorem8Report {
        alpha,
        grid_size,
        rows,
    })
}
