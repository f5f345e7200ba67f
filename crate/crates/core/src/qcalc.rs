//! q-integers, q-factorials, Gaussian binomials and the q-Bernstein basis.
//!
//! Products of up to `n` factors in `(0, 1)` underflow quickly, so the basis
//! weights are carried as natural logarithms ([`LogWeight`]) and only
//! exponentiated at the very end.

use alloc::vec::Vec;
use core::ops::Mul;

use crate::{Error, Result};

/// The deformation parameter, `0 < q <= 1`. `q = 1` is the classical case.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct QParam(f64);

impl QParam {
    pub const ONE: QParam = QParam(1.0);

    pub fn new(q: f64) -> Result<Self> {
        if q > 0.0 && q <= 1.0 {
            Ok(QParam(q))
        } else {
            Err(Error::InvalidQ(q))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_classical(self) -> bool {
        self.0 == 1.0
    }

    /// `q^e`.
    #[inline]
    pub fn pow(self, e: usize) -> f64 {
        if self.is_classical() {
            1.0
        } else {
            libm::pow(self.0, e as f64)
        }
    }
}

impl TryFrom<f64> for QParam {
    type Error = Error;

    fn try_from(q: f64) -> Result<Self> {
        QParam::new(q)
    }
}

/// Log of a nonnegative weight. `-inf` encodes the weight zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogWeight(f64);

impl LogWeight {
    pub const ZERO: LogWeight = LogWeight(f64::NEG_INFINITY);
    pub const ONE: LogWeight = LogWeight(0.0);

    /// Wraps a logarithm. `+inf` and NaN are not weights.
    pub fn from_ln(ln: f64) -> Self {
        debug_assert!(
            !ln.is_nan() && ln != f64::INFINITY,
            "invalid log weight {ln}"
        );
        LogWeight(ln)
    }

    pub fn from_linear(w: f64) -> Self {
        debug_assert!(w >= 0.0 && w.is_finite(), "invalid weight {w}");
        LogWeight(libm::log(w))
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn value(self) -> f64 {
        libm::exp(self.0)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// `self / other` in the linear domain with one exponentiation, or `None`
    /// when `other` is zero.
    pub fn ratio(self, other: LogWeight) -> Option<f64> {
        if other.is_zero() {
            None
        } else if self.is_zero() {
            Some(0.0)
        } else {
            Some(libm::exp(self.0 - other.0))
        }
    }

    pub fn max(self, other: LogWeight) -> LogWeight {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: LogWeight) -> LogWeight {
        if other.0 < self.0 {
            other
        } else {
            self
        }
    }
}

/// Multiplication of weights is addition of logs.
#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for LogWeight {
    type Output = LogWeight;

    fn mul(self, rhs: LogWeight) -> LogWeight {
        LogWeight(self.0 + rhs.0)
    }
}

/// `[n]_q = (1 - q^n) / (1 - q)`, and `n` at `q = 1`.
///
/// Evaluated as `expm1(n ln q) / expm1(ln q)`, which keeps full relative
/// accuracy as `q -> 1` where the textbook quotient cancels.
pub fn q_integer(n: usize, q: QParam) -> f64 {
    if q.is_classical() {
        return n as f64;
    }
    if n == 0 {
        return 0.0;
    }
    let ln_q = libm::log1p(q.get() - 1.0);
    libm::expm1(n as f64 * ln_q) / libm::expm1(ln_q)
}

/// `[n]_q! = [n]_q [n-1]_q ... [1]_q`, with `[0]_q! = 1`.
///
/// Overflows to `inf` for large `n` near `q = 1`; use [`ln_q_factorial`]
/// there.
pub fn q_factorial(n: usize, q: QParam) -> f64 {
    (1..=n).map(|i| q_integer(i, q)).product()
}

pub fn ln_q_factorial(n: usize, q: QParam) -> LogWeight {
    LogWeight(ln_factorial_table(n, q)[n])
}

/// `ln [i]_q!` for `i = 0..=n`.
pub(crate) fn ln_factorial_table(n: usize, q: QParam) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    table.push(acc);
    for i in 1..=n {
        acc += libm::log(q_integer(i, q));
        table.push(acc);
    }
    table
}

#[inline]
fn ln_binomial_from_table(table: &[f64], n: usize, k: usize) -> f64 {
    // one subtraction of a symmetric sum keeps k <-> n-k exact
    table[n] - (table[k] + table[n - k])
}

/// Gaussian binomial `[n k]_q`; zero for `k < 0` or `k > n`.
pub fn q_binomial(n: usize, k: i64, q: QParam) -> f64 {
    ln_q_binomial(n, k, q).value()
}

pub fn ln_q_binomial(n: usize, k: i64, q: QParam) -> LogWeight {
    if k < 0 || k as u64 > n as u64 {
        return LogWeight::ZERO;
    }
    let table = ln_factorial_table(n, q);
    LogWeight(ln_binomial_from_table(&table, n, k as usize))
}

/// `p_{n,k}(x; q) = [n k]_q x^k prod_{s=0}^{n-k-1} (1 - q^s x)` in log form.
pub fn basis_weight(n: usize, k: usize, x: f64, q: QParam) -> Result<LogWeight> {
    Basis::new(n, q)?.log_weight(k, x)
}

/// Linear-domain convenience wrapper around [`basis_weight`].
pub fn basis_weight_linear(n: usize, k: usize, x: f64, q: QParam) -> Result<f64> {
    basis_weight(n, k, x, q).map(LogWeight::value)
}

pub(crate) fn check_point(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::PointOutOfRange(x))
    }
}

/// Precomputed tables for the degree-`n` q-Bernstein basis: log binomials,
/// powers of `q` and the nodes `[k]_q / [n]_q`.
#[derive(Debug, Clone)]
pub struct Basis {
    n: usize,
    q: QParam,
    ln_binom: Vec<f64>,
    q_pows: Vec<f64>,
    q_ints: Vec<f64>,
    nodes: Vec<f64>,
}

impl Basis {
    pub fn new(n: usize, q: QParam) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDegree(n));
        }
        let table = ln_factorial_table(n, q);
        let ln_binom = (0..=n)
            .map(|k| ln_binomial_from_table(&table, n, k))
            .collect();
        let q_pows = (0..=n + 1).map(|s| q.pow(s)).collect();
        let q_ints: Vec<f64> = (0..=n + 1).map(|k| q_integer(k, q)).collect();
        let nodes = (0..=n).map(|k| q_ints[k] / q_ints[n]).collect();
        Ok(Basis {
            n,
            q,
            ln_binom,
            q_pows,
            q_ints,
            nodes,
        })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn q(&self) -> QParam {
        self.q
    }

    /// Sample points `[k]_q / [n]_q`, strictly increasing from 0 to 1.
    #[inline]
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `[k]_q` for `k = 0..=n+1`.
    #[inline]
    pub fn q_integer(&self, k: usize) -> f64 {
        self.q_ints[k]
    }

    /// `q^s` for `s = 0..=n+1`.
    #[inline]
    pub fn q_pow(&self, s: usize) -> f64 {
        self.q_pows[s]
    }

    pub fn log_weight(&self, k: usize, x: f64) -> Result<LogWeight> {
        check_point(x)?;
        if k > self.n {
            return Err(Error::IndexOutOfRange {
                index: k,
                n: self.n,
            });
        }
        let mut ln = self.ln_binom[k] + ln_power(x, k);
        for s in 0..self.n - k {
            ln += libm::log1p(-self.q_pows[s] * x);
        }
        Ok(LogWeight(ln))
    }

    /// All `n + 1` log weights at `x`, written into `out`.
    pub fn log_weights_into(&self, x: f64, out: &mut Vec<LogWeight>) -> Result<()> {
        check_point(x)?;
        out.clear();
        // prefix[m] = sum_{s<m} ln(1 - q^s x); weight k uses prefix[n - k]
        let mut prefix = Vec::with_capacity(self.n + 1);
        let mut acc = 0.0;
        prefix.push(acc);
        for s in 0..self.n {
            acc += libm::log1p(-self.q_pows[s] * x);
            prefix.push(acc);
        }
        out.extend(
            (0..=self.n).map(|k| LogWeight(self.ln_binom[k] + ln_power(x, k) + prefix[self.n - k])),
        );
        Ok(())
    }

    pub fn log_weights(&self, x: f64) -> Result<Vec<LogWeight>> {
        let mut out = Vec::with_capacity(self.n + 1);
        self.log_weights_into(x, &mut out)?;
        Ok(out)
    }
}

/// `k ln x` with the convention `0 ln 0 = 0`.
#[inline]
fn ln_power(x: f64, k: usize) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * libm::log(x)
    }
}
