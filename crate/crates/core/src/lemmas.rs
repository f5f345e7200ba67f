//! Kernel ratios on the interval partition of `[0, 1]` and exhaustive grid
//! verifiers for the inequalities the approximation order rests on.
//!
//! For `x` in `I_j = [[j]_q/[n+1]_q, [j+1]_q/[n+1]_q]`:
//!
//! ```text
//! m_{k,n,j}(x)   = p_{n,k}(x) / p_{n,j}(x)
//! M_{k,n,j}(x)   = m_{k,n,j}(x) |[k]_q/[n]_q - x|
//! Mbar_{k,n,j}   = m_{k,n,j}(x) ([k]_q/[n+1]_q - x)      k >= j + 2
//! Munder_{k,n,j} = m_{k,n,j}(x) (x - [k]_q/[n+1]_q)      k <= j - 2
//! ```
//!
//! Verifiers never error on a violated inequality; violations are report
//! rows. Each (check, j, k) cell contributes one row at its worst grid
//! point.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::operators::{approximation_rate, check_alpha, MaxProductOperator};
use crate::qcalc::{check_point, q_integer, Basis, LogWeight, QParam};
use crate::{Error, Result};

/// `I_j` with its endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalIndex {
    pub j: usize,
    pub left: f64,
    pub right: f64,
}

/// Breakpoints `[j]_q / [n+1]_q`, `j = 0..=n+1`.
#[derive(Debug, Clone)]
pub struct Partition {
    n: usize,
    breakpoints: Vec<f64>,
}

impl Partition {
    pub fn new(n: usize, q: QParam) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDegree(n));
        }
        let top = q_integer(n + 1, q);
        let breakpoints = (0..=n + 1).map(|j| q_integer(j, q) / top).collect();
        Ok(Partition { n, breakpoints })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn interval(&self, j: usize) -> IntervalIndex {
        IntervalIndex {
            j,
            left: self.breakpoints[j],
            right: self.breakpoints[j + 1],
        }
    }

    /// The `j` with `left <= x < right`; `x = 1` lands in `j = n`.
    pub fn locate(&self, x: f64) -> Result<IntervalIndex> {
        check_point(x)?;
        let above = self.breakpoints.partition_point(|&b| b <= x);
        Ok(self.interval((above - 1).min(self.n)))
    }

    /// `points` equally spaced abscissae spanning `I_j`, endpoints included.
    pub fn grid(&self, j: usize, points: usize) -> impl Iterator<Item = f64> {
        let IntervalIndex { left, right, .. } = self.interval(j);
        let last = points.saturating_sub(1).max(1) as f64;
        (0..points).map(move |i| {
            if i + 1 == points {
                right
            } else {
                left + (right - left) * (i as f64 / last)
            }
        })
    }
}

pub fn interval_index(x: f64, n: usize, q: QParam) -> Result<IntervalIndex> {
    Partition::new(n, q)?.locate(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelRatios {
    /// `M_{k,n,j}(x)`
    pub big_m: f64,
    /// `m_{k,n,j}(x)`
    pub m: f64,
    /// `Mbar_{k,n,j}(x)`, present for `k >= j + 2`.
    pub m_upper: Option<f64>,
    /// `Munder_{k,n,j}(x)`, present for `k + 2 <= j`.
    pub m_lower: Option<f64>,
}

/// Basis weights at one point, ready for ratio queries against a fixed `j`.
struct KernelPoint<'a> {
    basis: &'a Basis,
    weights: &'a [LogWeight],
    j: usize,
    x: f64,
}

impl KernelPoint<'_> {
    fn m(&self, k: usize) -> f64 {
        // callers skip points where p_{n,j} = 0
        self.weights[k]
            .ratio(self.weights[self.j])
            .unwrap_or(f64::NAN)
    }

    fn ratios(&self, k: usize) -> KernelRatios {
        let n = self.basis.degree();
        let m = self.m(k);
        let node = self.basis.q_integer(k) / self.basis.q_integer(n);
        let shifted = self.basis.q_integer(k) / self.basis.q_integer(n + 1);
        KernelRatios {
            big_m: m * libm::fabs(node - self.x),
            m,
            m_upper: (k >= self.j + 2).then_some(m * (shifted - self.x)),
            m_lower: (k + 2 <= self.j).then_some(m * (self.x - shifted)),
        }
    }
}

pub fn kernel_ratios(k: usize, n: usize, j: usize, x: f64, q: QParam) -> Result<KernelRatios> {
    let basis = Basis::new(n, q)?;
    if k > n || j > n {
        return Err(Error::IndexOutOfRange { index: k.max(j), n });
    }
    let weights = basis.log_weights(x)?;
    if weights[j].is_zero() {
        return Err(Error::DegenerateDenominator { j, x });
    }
    Ok(KernelPoint {
        basis: &basis,
        weights: &weights,
        j,
        x,
    }
    .ratios(k))
}

/// `g_{alpha,q}(k) = [k+1]_q - (q^k [k+1]_q)^{1/alpha}`.
pub fn threshold_g(k: usize, q: QParam, alpha: u32) -> f64 {
    let top = q_integer(k + 1, q);
    top - libm::pow(q.pow(k) * top, 1.0 / alpha as f64)
}

/// Largest `k <= n` with `g_{alpha,q}(k) < [j+1]_q` (the index written
/// `k-bar`; `k-tilde = k-bar + 1`).
pub fn threshold_index(j: usize, n: usize, q: QParam, alpha: u32) -> Option<usize> {
    let bound = q_integer(j + 1, q);
    (0..=n).rev().find(|&k| threshold_g(k, q, alpha) < bound)
}

/// Hypothesis of the upper chain: `g_{alpha,q}(k) >= [j+1]_q`.
pub fn upper_chain_condition(k: usize, j: usize, q: QParam, alpha: u32) -> bool {
    threshold_g(k, q, alpha) >= q_integer(j + 1, q)
}

/// Hypothesis of the lower chain: `[k]_q + (q^{k-1} [k]_q)^{1/alpha} <= [j]_q`.
pub fn lower_chain_condition(k: usize, j: usize, q: QParam, alpha: u32) -> bool {
    if k == 0 {
        return false;
    }
    let qk = q_integer(k, q);
    qk + libm::pow(q.pow(k - 1) * qk, 1.0 / alpha as f64) <= q_integer(j, q)
}

/// Fixed-(n, q) stand-in for `q_n -> 1`: `q^{n+1} (1 + q) >= 1`, which
/// implies `q^{j+1} (1 + q) >= 1` for every `j <= n`.
pub fn chain_gate(n: usize, q: QParam) -> bool {
    gate_value(n, q) >= 1.0
}

fn gate_value(n: usize, q: QParam) -> f64 {
    q.pow(n + 1) * (1.0 + q.get())
}

/// `2 (1 + 2/q^{n+1}) / [n+1]_q^{1 - 1/alpha}`.
pub fn kernel_bound(n: usize, q: QParam, alpha: u32) -> Result<f64> {
    Ok(2.0 * (1.0 + 2.0 / q.pow(n + 1)) * approximation_rate(n + 1, q, alpha)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    /// `Mbar <= M`
    Lemma2UpperLeft,
    /// `M <= (1 + 2/q^{n+1}) Mbar`
    Lemma2UpperRight,
    /// `M <= Munder`
    Lemma2LowerLeft,
    /// `Munder <= (1 + 2/q^n) M`
    Lemma2LowerRight,
    /// `m <= 1`
    Lemma3,
    /// `Mbar_{k+1} <= Mbar_k` under the upper threshold
    Lemma4Upper,
    /// `Munder_{k-1} <= Munder_k` under the lower threshold
    Lemma4Lower,
    /// interior argmax equals `j`
    Lemma5,
    /// both neighbours attain the max at a shared breakpoint
    Lemma5Tie,
    /// `M_{k,n,j} <= 2 (1 + 2/q^{n+1}) / [n+1]^{1 - 1/alpha}`
    Kernel,
    /// `E_{n,q}(x)` under the same bound
    KernelE,
    /// `q^{n+1} (1 + q) >= 1` not met
    Gate,
}

impl Check {
    pub fn as_str(self) -> &'static str {
        match self {
            Check::Lemma2UpperLeft => "2i-lower",
            Check::Lemma2UpperRight => "2i-upper",
            Check::Lemma2LowerLeft => "2ii-lower",
            Check::Lemma2LowerRight => "2ii-upper",
            Check::Lemma3 => "3",
            Check::Lemma4Upper => "4i",
            Check::Lemma4Lower => "4ii",
            Check::Lemma5 => "5",
            Check::Lemma5Tie => "5-tie",
            Check::Kernel => "kernel",
            Check::KernelE => "kernel-E",
            Check::Gate => "gate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skip => "skip",
        }
    }
}

/// `lhs <= rhs + rel |rhs| + abs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-10,
            abs: 1e-14,
        }
    }
}

impl Tolerance {
    pub fn with_rel(rel: f64) -> Self {
        Tolerance {
            rel,
            ..Default::default()
        }
    }

    pub fn excess(&self, lhs: f64, rhs: f64) -> f64 {
        lhs - (rhs + self.rel * libm::fabs(rhs) + self.abs)
    }

    pub fn holds(&self, lhs: f64, rhs: f64) -> bool {
        self.excess(lhs, rhs) <= 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: Check,
    pub n: usize,
    pub q: f64,
    pub alpha: Option<u32>,
    pub j: Option<usize>,
    pub k: Option<usize>,
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub rows: Vec<CheckRow>,
    /// Grid points at which an inequality was evaluated.
    pub points_checked: usize,
    pub points_failed: usize,
    /// Largest `lhs - rhs` among failed points, 0 when none failed.
    pub max_violation: f64,
}

impl VerificationReport {
    pub fn count(&self, verdict: Verdict) -> usize {
        self.rows.iter().filter(|r| r.verdict == verdict).count()
    }

    pub fn passed(&self) -> usize {
        self.count(Verdict::Pass)
    }

    pub fn failed(&self) -> usize {
        self.count(Verdict::Fail)
    }

    pub fn skipped(&self) -> usize {
        self.count(Verdict::Skip)
    }

    pub fn is_ok(&self) -> bool {
        self.points_failed == 0 && self.failed() == 0
    }

    pub fn violations(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| r.verdict == Verdict::Fail)
    }

    /// Concatenate; rows are then sorted on `(n, q, alpha, j, k, x, check)`.
    pub fn merge(&mut self, other: VerificationReport) {
        self.rows.extend(other.rows);
        self.points_checked += other.points_checked;
        self.points_failed += other.points_failed;
        self.max_violation = self.max_violation.max(other.max_violation);
        self.rows.sort_by(|a, b| {
            a.n.cmp(&b.n).then(a.q.total_cmp(&b.q)).then(
                (a.alpha, a.j, a.k, a.x.to_bits(), a.check).cmp(&(
                    b.alpha,
                    b.j,
                    b.k,
                    b.x.to_bits(),
                    b.check,
                )),
            )
        });
    }
}

#[derive(Debug, Clone, Copy)]
struct Worst {
    x: f64,
    lhs: f64,
    rhs: f64,
    excess: f64,
}

/// Keeps the worst point of every (j, k, check) cell.
struct Collector {
    n: usize,
    q: f64,
    alpha: Option<u32>,
    tol: Tolerance,
    cells: BTreeMap<(Option<usize>, Option<usize>, Check), Worst>,
    points_checked: usize,
    points_failed: usize,
    max_violation: f64,
}

impl Collector {
    fn new(n: usize, q: QParam, alpha: Option<u32>, tol: Tolerance) -> Self {
        Collector {
            n,
            q: q.get(),
            alpha,
            tol,
            cells: BTreeMap::new(),
            points_checked: 0,
            points_failed: 0,
            max_violation: 0.0,
        }
    }

    fn record(&mut self, check: Check, j: usize, k: Option<usize>, x: f64, lhs: f64, rhs: f64) {
        let excess = self.tol.excess(lhs, rhs);
        // NaN excess means a broken evaluation, which counts as a failure
        let failed = excess.is_nan() || excess > 0.0;
        self.points_checked += 1;
        if failed {
            self.points_failed += 1;
            self.max_violation = self.max_violation.max(lhs - rhs);
        }
        let candidate = Worst {
            x,
            lhs,
            rhs,
            excess: if failed && excess.is_nan() {
                f64::INFINITY
            } else {
                excess
            },
        };
        self.cells
            .entry((Some(j), k, check))
            .and_modify(|w| {
                if candidate.excess > w.excess {
                    *w = candidate;
                }
            })
            .or_insert(candidate);
    }

    fn finish(self) -> VerificationReport {
        let Collector {
            n,
            q,
            alpha,
            cells,
            points_checked,
            points_failed,
            max_violation,
            ..
        } = self;
        let rows = cells
            .into_iter()
            .map(|((j, k, check), w)| CheckRow {
                check,
                n,
                q,
                alpha,
                j,
                k,
                x: w.x,
                lhs: w.lhs,
                rhs: w.rhs,
                verdict: if w.excess > 0.0 {
                    Verdict::Fail
                } else {
                    Verdict::Pass
                },
            })
            .collect();
        VerificationReport {
            rows,
            points_checked,
            points_failed,
            max_violation,
        }
    }
}

/// Grid verifier for one `(n, q)`.
#[derive(Debug, Clone)]
pub struct Verifier {
    basis: Basis,
    partition: Partition,
    grid_size: usize,
    tol: Tolerance,
}

impl Verifier {
    /// `grid_size` points per interval, endpoints included.
    pub fn new(n: usize, q: QParam, grid_size: usize) -> Result<Self> {
        if grid_size < 2 {
            return Err(Error::InvalidGrid(grid_size));
        }
        Ok(Verifier {
            basis: Basis::new(n, q)?,
            partition: Partition::new(n, q)?,
            grid_size,
            tol: Tolerance::default(),
        })
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    fn n(&self) -> usize {
        self.basis.degree()
    }

    fn q(&self) -> QParam {
        self.basis.q()
    }

    /// Visit every interval-local grid point with a nonzero `p_{n,j}`.
    fn sweep(&self, mut visit: impl FnMut(&KernelPoint<'_>, usize)) -> Result<()> {
        let mut weights = Vec::with_capacity(self.n() + 1);
        for j in 0..=self.n() {
            for (i, x) in self.partition.grid(j, self.grid_size).enumerate() {
                self.basis.log_weights_into(x, &mut weights)?;
                if weights[j].is_zero() {
                    continue;
                }
                visit(
                    &KernelPoint {
                        basis: &self.basis,
                        weights: &weights,
                        j,
                        x,
                    },
                    i,
                );
            }
        }
        Ok(())
    }

    fn skip_report(&self, alpha: u32) -> VerificationReport {
        let row = CheckRow {
            check: Check::Gate,
            n: self.n(),
            q: self.q().get(),
            alpha: Some(alpha),
            j: None,
            k: None,
            x: f64::NAN,
            lhs: gate_value(self.n(), self.q()),
            rhs: 1.0,
            verdict: Verdict::Skip,
        };
        VerificationReport {
            rows: alloc::vec![row],
            ..Default::default()
        }
    }

    /// `m_{k,n,j}(x) <= 1` for all k.
    pub fn lemma3(&self) -> Result<VerificationReport> {
        let mut out = Collector::new(self.n(), self.q(), None, self.tol);
        self.sweep(|pt, _| {
            for k in 0..=self.n() {
                out.record(Check::Lemma3, pt.j, Some(k), pt.x, pt.m(k), 1.0);
            }
        })?;
        Ok(out.finish())
    }

    /// `max_k p_{n,k} = p_{n,j}` inside `I_j`; at a shared breakpoint both
    /// neighbours must attain the max.
    pub fn lemma5(&self) -> Result<VerificationReport> {
        let n = self.n();
        let last = self.grid_size - 1;
        let mut out = Collector::new(n, self.q(), None, self.tol);
        self.sweep(|pt, i| {
            let (arg, top) =
                pt.weights
                    .iter()
                    .enumerate()
                    .fold(
                        (0, LogWeight::ZERO),
                        |best, (k, &w)| if w > best.1 { (k, w) } else { best },
                    );
            let neighbour = match i {
                0 if pt.j > 0 => Some(pt.j - 1),
                i if i == last && pt.j < n => Some(pt.j + 1),
                _ => None,
            };
            match neighbour {
                Some(nb) => {
                    let low = pt.weights[pt.j].min(pt.weights[nb]);
                    let lhs = top.ratio(low).unwrap_or(f64::INFINITY);
                    out.record(Check::Lemma5Tie, pt.j, Some(nb), pt.x, lhs, 1.0);
                }
                None => {
                    let lhs = top.ratio(pt.weights[pt.j]).unwrap_or(f64::INFINITY);
                    out.record(Check::Lemma5, pt.j, Some(arg), pt.x, lhs, 1.0);
                }
            }
        })?;
        Ok(out.finish())
    }

    /// Both sandwiches: `Mbar <= M <= (1 + 2/q^{n+1}) Mbar` for `k >= j+2`
    /// and `M <= Munder <= (1 + 2/q^n) M` for `k <= j-2`.
    pub fn lemma2(&self) -> Result<VerificationReport> {
        let n = self.n();
        let upper_factor = 1.0 + 2.0 / self.q().pow(n + 1);
        let lower_factor = 1.0 + 2.0 / self.q().pow(n);
        let mut out = Collector::new(n, self.q(), None, self.tol);
        self.sweep(|pt, _| {
            for k in 0..=n {
                let r = pt.ratios(k);
                if let Some(mbar) = r.m_upper {
                    out.record(Check::Lemma2UpperLeft, pt.j, Some(k), pt.x, mbar, r.big_m);
                    out.record(
                        Check::Lemma2UpperRight,
                        pt.j,
                        Some(k),
                        pt.x,
                        r.big_m,
                        upper_factor * mbar,
                    );
                }
                if let Some(munder) = r.m_lower {
                    out.record(Check::Lemma2LowerLeft, pt.j, Some(k), pt.x, r.big_m, munder);
                    out.record(
                        Check::Lemma2LowerRight,
                        pt.j,
                        Some(k),
                        pt.x,
                        munder,
                        lower_factor * r.big_m,
                    );
                }
            }
        })?;
        Ok(out.finish())
    }

    /// Chain monotonicity under the alpha thresholds:
    /// `Mbar_k >= Mbar_{k+1}` for `k in j+2..=n-1` with `g(k) >= [j+1]`, and
    /// `Munder_k >= Munder_{k-1}` for `k in 1..=j-2` with the mirror
    /// condition. Skipped when [`chain_gate`] fails.
    pub fn lemma4(&self, alpha: u32) -> Result<VerificationReport> {
        check_alpha(alpha)?;
        if !chain_gate(self.n(), self.q()) {
            return Ok(self.skip_report(alpha));
        }
        let (n, q) = (self.n(), self.q());
        // conditions do not depend on x
        let upper: Vec<Vec<usize>> = (0..=n)
            .map(|j| {
                ((j + 2)..n)
                    .filter(|&k| upper_chain_condition(k, j, q, alpha))
                    .collect()
            })
            .collect();
        let lower: Vec<Vec<usize>> = (0..=n)
            .map(|j| {
                (1..=j.saturating_sub(2))
                    .filter(|&k| lower_chain_condition(k, j, q, alpha))
                    .collect()
            })
            .collect();
        let mut out = Collector::new(n, q, Some(alpha), self.tol);
        self.sweep(|pt, _| {
            for &k in &upper[pt.j] {
                let (this, next) = (pt.ratios(k), pt.ratios(k + 1));
                out.record(
                    Check::Lemma4Upper,
                    pt.j,
                    Some(k),
                    pt.x,
                    next.m_upper.unwrap_or(f64::NAN),
                    this.m_upper.unwrap_or(f64::NAN),
                );
            }
            for &k in &lower[pt.j] {
                let (this, prev) = (pt.ratios(k), pt.ratios(k - 1));
                out.record(
                    Check::Lemma4Lower,
                    pt.j,
                    Some(k),
                    pt.x,
                    prev.m_lower.unwrap_or(f64::NAN),
                    this.m_lower.unwrap_or(f64::NAN),
                );
            }
        })?;
        Ok(out.finish())
    }

    /// `M_{k,n,j}(x)` and `E_{n,q}(x)` against [`kernel_bound`]. Skipped
    /// when [`chain_gate`] fails.
    pub fn kernel_bound(&self, alpha: u32) -> Result<VerificationReport> {
        check_alpha(alpha)?;
        if !chain_gate(self.n(), self.q()) {
            return Ok(self.skip_report(alpha));
        }
        let n = self.n();
        let bound = kernel_bound(n, self.q(), alpha)?;
        let op = MaxProductOperator::new(n, self.q())?;
        let mut out = Collector::new(n, self.q(), Some(alpha), self.tol);
        let mut failure = None;
        self.sweep(|pt, _| {
            for k in 0..=n {
                out.record(
                    Check::Kernel,
                    pt.j,
                    Some(k),
                    pt.x,
                    pt.ratios(k).big_m,
                    bound,
                );
            }
            match op.delta_n(pt.x) {
                Ok(e) => out.record(Check::KernelE, pt.j, None, pt.x, e, bound),
                Err(err) => failure = Some(err),
            }
        })?;
        match failure {
            Some(err) => Err(err),
            None => Ok(out.finish()),
        }
    }
}

pub fn verify_lemma2(n: usize, q: QParam, grid_size: usize) -> Result<VerificationReport> {
    Verifier::new(n, q, grid_size)?.lemma2()
}

pub fn verify_lemma3(n: usize, q: QParam, grid_size: usize) -> Result<VerificationReport> {
    Verifier::new(n, q, grid_size)?.lemma3()
}

pub fn verify_lemma4(
    n: usize,
    q: QParam,
    alpha: u32,
    grid_size: usize,
) -> Result<VerificationReport> {
    Verifier::new(n, q, grid_size)?.lemma4(alpha)
}

pub fn verify_lemma5(n: usize, q: QParam, grid_size: usize) -> Result<VerificationReport> {
    Verifier::new(n, q, grid_size)?.lemma5()
}

pub fn verify_kernel_bound(
    n: usize,
    q: QParam,
    alpha: u32,
    grid_size: usize,
) -> Result<VerificationReport> {
    Verifier::new(n, q, grid_size)?.kernel_bound(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: f64) -> QParam {
        QParam::new(v).unwrap()
    }

    #[test]
    fn interval_index_examples() {
        for &qv in &[0.3, 0.9, 1.0] {
            assert_eq!(interval_index(0.0, 7, q(qv)).unwrap().j, 0);
            assert_eq!(interval_index(1.0, 7, q(qv)).unwrap().j, 7);
        }
        // breakpoints {0, 1/1.75, 1.5/1.75, 1}
        let iv = interval_index(0.6, 2, q(0.5)).unwrap();
        assert_eq!(iv.j, 1);
        assert!((iv.left - 1.0 / 1.75).abs() < 1e-15);
        assert!((iv.right - 1.5 / 1.75).abs() < 1e-15);
        assert!(interval_index(1.01, 2, q(0.5)).is_err());
    }

    #[test]
    fn partition_tiles_unit_interval() {
        for &qv in &[0.5, 0.9, 0.99, 1.0] {
            for n in [1, 5, 30, 200] {
                let p = Partition::new(n, q(qv)).unwrap();
                let total: f64 = (0..=n)
                    .map(|j| p.interval(j).right - p.interval(j).left)
                    .sum();
                assert!((total - 1.0).abs() < 1e-13);
                assert_eq!(p.interval(n).right, 1.0);
                // small q^j collapses late breakpoints in f64
                let distinct = libm::pow(qv, n as f64) > 1e-12;
                for j in 0..n {
                    assert!(p.interval(j).left <= p.interval(j).right);
                    assert!(!distinct || p.interval(j).left < p.interval(j).right);
                    assert_eq!(p.interval(j).right, p.interval(j + 1).left);
                }
            }
        }
    }

    #[test]
    fn locate_is_consistent_with_breakpoints() {
        let p = Partition::new(12, q(0.8)).unwrap();
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            let iv = p.locate(x).unwrap();
            assert!(iv.left <= x && (x < iv.right || (x == 1.0 && iv.j == 12)));
        }
        for j in 0..=12 {
            assert_eq!(p.locate(p.interval(j).left).unwrap().j, j);
        }
    }

    #[test]
    fn interval_grid_hits_endpoints() {
        let p = Partition::new(4, q(0.7)).unwrap();
        let pts: Vec<f64> = p.grid(2, 5).collect();
        assert_eq!(pts.len(), 5);
        assert_eq!(pts[0], p.interval(2).left);
        assert_eq!(pts[4], p.interval(2).right);
    }

    #[test]
    fn kernel_ratios_diagonal() {
        for j in 1..6 {
            let iv = Partition::new(6, q(0.9)).unwrap().interval(j);
            let x = 0.5 * (iv.left + iv.right);
            let r = kernel_ratios(j, 6, j, x, q(0.9)).unwrap();
            assert_eq!(r.m, 1.0);
            let node = q_integer(j, q(0.9)) / q_integer(6, q(0.9));
            assert!((r.big_m - (node - x).abs()).abs() < 1e-15);
            assert_eq!(r.m_upper, None);
            assert_eq!(r.m_lower, None);
        }
    }

    #[test]
    fn kernel_ratios_against_hand_products() {
        // p_{4,3} = [4 3] x^3 (1 - x); p_{4,1} = [4 1] x (1-x)(1-qx)(1-q^2 x)
        let qv = 0.9;
        let x = q_integer(1, q(qv)) / q_integer(5, q(qv));
        let r = kernel_ratios(3, 4, 1, x, q(qv)).unwrap();
        let q4 = 1.0 + qv + qv * qv + qv * qv * qv;
        let q3 = 1.0 + qv + qv * qv;
        let q2 = 1.0 + qv;
        let binom_43 = q4 * q3 * q2 / (q3 * q2);
        let p43 = binom_43 * x * x * x * (1.0 - x);
        let p41 = q4 * x * (1.0 - x) * (1.0 - qv * x) * (1.0 - qv * qv * x);
        let m = p43 / p41;
        assert!((r.m - m).abs() < 1e-13 * m);
        assert!((r.big_m - m * (q3 / q4 - x).abs()).abs() < 1e-13);
        let q5 = q4 + qv.powi(4);
        assert!((r.m_upper.unwrap() - m * (q3 / q5 - x)).abs() < 1e-13);
        assert_eq!(r.m_lower, None);
    }

    #[test]
    fn kernel_ratios_degenerate_denominator() {
        assert_eq!(
            kernel_ratios(0, 4, 2, 0.0, q(0.5)),
            Err(Error::DegenerateDenominator { j: 2, x: 0.0 })
        );
    }

    #[test]
    fn big_m_is_m_times_distance() {
        let (n, qv) = (9, q(0.95));
        let p = Partition::new(n, qv).unwrap();
        for j in 0..=n {
            for x in p.grid(j, 7) {
                for k in 0..=n {
                    let r = kernel_ratios(k, n, j, x, qv).unwrap();
                    let node = q_integer(k, qv) / q_integer(n, qv);
                    assert!((r.big_m - r.m * (node - x).abs()).abs() <= 1e-13);
                }
            }
        }
    }

    #[test]
    fn threshold_g_examples() {
        assert_eq!(threshold_g(0, QParam::ONE, 2), 0.0);
        let q3 = 1.0 + 0.9 + 0.81;
        let expected = q3 - libm::sqrt(0.81 * q3);
        assert!((threshold_g(2, q(0.9), 2) - expected).abs() < 1e-15);
        assert!((expected - 1.228).abs() < 1e-3);
    }

    #[test]
    fn threshold_g_increasing() {
        for &qv in &[0.9, 0.95, 0.99, 1.0] {
            for alpha in 2..=10 {
                for k in 0..100 {
                    assert!(
                        threshold_g(k + 1, q(qv), alpha) > threshold_g(k, q(qv), alpha),
                        "q={qv} alpha={alpha} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn threshold_index_is_last_below() {
        let (n, qv) = (30, q(0.99));
        for j in 0..=n {
            let kbar = threshold_index(j, n, qv, 3).unwrap();
            assert!(threshold_g(kbar, qv, 3) < q_integer(j + 1, qv));
            if kbar < n {
                assert!(upper_chain_condition(kbar + 1, j, qv, 3));
            }
        }
    }

    #[test]
    fn upper_condition_nests_in_alpha() {
        let (n, qv) = (40, q(0.999));
        for alpha in 2..10 {
            for j in 0..=n {
                for k in (j + 2)..n {
                    let base = qv.pow(k) * q_integer(k + 1, qv);
                    if base >= 1.0 && upper_chain_condition(k, j, qv, alpha) {
                        assert!(upper_chain_condition(k, j, qv, alpha + 1));
                    }
                }
            }
        }
    }

    #[test]
    fn gate_arithmetic() {
        assert!(!chain_gate(20, q(0.5)));
        for n in 2..200 {
            let qn = 1.0 - 1.0 / ((n + 1) * (n + 1)) as f64;
            assert!(chain_gate(n, q(qn)), "n={n}");
        }
        assert!(chain_gate(1000, QParam::ONE));
    }

    #[test]
    fn lemma_checks_hold_classically() {
        for n in [1, 5, 12] {
            let v = Verifier::new(n, QParam::ONE, 41).unwrap();
            assert!(v.lemma3().unwrap().is_ok(), "lemma 3 n={n}");
            assert!(v.lemma5().unwrap().is_ok(), "lemma 5 n={n}");
            assert!(v.lemma2().unwrap().is_ok(), "lemma 2 n={n}");
            assert!(v.lemma4(2).unwrap().is_ok(), "lemma 4 n={n}");
            assert!(v.kernel_bound(2).unwrap().is_ok(), "kernel n={n}");
        }
    }

    #[test]
    fn lemma5_argmax_at_q1_n1() {
        let eval = Verifier::new(1, QParam::ONE, 11).unwrap().lemma5().unwrap();
        assert!(eval.is_ok());
        let w = Basis::new(1, QParam::ONE)
            .unwrap()
            .log_weights(0.3)
            .unwrap();
        assert!(w[0] > w[1]);
    }

    #[test]
    fn lemma3_fails_below_q1() {
        // p_{1,0} = 1 - x and p_{1,1} = x cross at 1/2, but I_0 = [0, 1/(1+q)]
        let report = verify_lemma3(1, q(0.5), 101).unwrap();
        assert!(!report.is_ok());
        let worst = report.violations().next().unwrap();
        assert_eq!((worst.j, worst.k), (Some(0), Some(1)));
        assert!((worst.x - 2.0 / 3.0).abs() < 1e-15);
        assert!((worst.lhs - 2.0).abs() < 1e-12);
        let r = kernel_ratios(1, 1, 0, 0.6, q(0.5)).unwrap();
        assert!((r.m - 1.5).abs() < 1e-15);
    }

    #[test]
    fn lemma4_skips_when_gate_fails() {
        for alpha in [2, 3, 7] {
            let r = verify_lemma4(20, q(0.5), alpha, 21).unwrap();
            assert_eq!(r.rows.len(), 1);
            assert_eq!(r.rows[0].verdict, Verdict::Skip);
            assert!(r.is_ok());
        }
        assert_eq!(
            verify_lemma4(5, q(0.9), 1, 21).unwrap_err(),
            Error::InvalidAlpha(1)
        );
    }

    #[test]
    fn lemma2_factor_is_three_at_q1() {
        let n = 8;
        assert_eq!(1.0 + 2.0 / QParam::ONE.pow(n + 1), 3.0);
        assert_eq!(1.0 + 2.0 / QParam::ONE.pow(n), 3.0);
        let r = verify_lemma2(n, QParam::ONE, 31).unwrap();
        assert!(r.is_ok());
        assert!(r
            .rows
            .iter()
            .any(|row| row.check == Check::Lemma2UpperRight));
    }

    #[test]
    fn lemma2_single_point() {
        let (n, qv) = (6, q(0.9));
        let j = 1;
        let x = Partition::new(n, qv).unwrap().interval(j).left;
        let r = kernel_ratios(j + 2, n, j, x, qv).unwrap();
        let mbar = r.m_upper.unwrap();
        assert!(mbar <= r.big_m);
        assert!(r.big_m <= (1.0 + 2.0 / qv.pow(n + 1)) * mbar);
    }

    #[test]
    fn kernel_first_interval_row() {
        for &qv in &[0.5, 0.9, 0.99, 1.0] {
            let n = 10;
            let p = Partition::new(n, q(qv)).unwrap();
            let bound = 1.0 / q_integer(n + 1, q(qv));
            for x in p.grid(0, 101) {
                for k in 0..=n {
                    let r = kernel_ratios(k, n, 0, x, q(qv)).unwrap();
                    assert!(
                        Tolerance::default().holds(r.big_m, bound),
                        "q={qv} k={k} x={x}"
                    );
                }
            }
        }
    }

    #[test]
    fn kernel_bound_small_box() {
        for alpha in [2, 10] {
            let r = verify_kernel_bound(10, q(0.99), alpha, 501).unwrap();
            assert!(r.is_ok(), "alpha={alpha}: {:?}", r.violations().next());
            assert!(r.rows.iter().any(|row| row.check == Check::KernelE));
        }
    }

    #[test]
    fn collector_keeps_worst_point() {
        let mut c = Collector::new(3, q(0.5), None, Tolerance::default());
        c.record(Check::Lemma3, 1, Some(2), 0.1, 0.5, 1.0);
        c.record(Check::Lemma3, 1, Some(2), 0.2, 0.9, 1.0);
        c.record(Check::Lemma3, 1, Some(2), 0.3, 0.7, 1.0);
        c.record(Check::Lemma3, 2, Some(2), 0.4, 1.5, 1.0);
        let r = c.finish();
        assert_eq!(r.rows.len(), 2);
        assert_eq!(r.rows[0].x, 0.2);
        assert_eq!(r.rows[1].verdict, Verdict::Fail);
        assert_eq!(r.points_checked, 4);
        assert_eq!(r.points_failed, 1);
        assert!((r.max_violation - 0.5).abs() < 1e-15);
    }
}
