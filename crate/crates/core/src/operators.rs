//! The nonlinear max-product q-Bernstein operator
//!
//! ```text
//! B(f)(x) = max_k p_{n,k}(x; q) f([k]_q / [n]_q)  /  max_k p_{n,k}(x; q)
//! ```
//!
//! its linear counterpart, and the pointwise and uniform error bounds
//! expressed through the modulus of continuity.

use alloc::vec::Vec;

use crate::modulus::ModulusGrid;
use crate::qcalc::{check_point, q_integer, Basis, LogWeight, QParam};
use crate::{DistanceFrom, Error, Result, TestFunction};

pub const DEFAULT_GRID_SIZE: usize = 1001;

/// One operator evaluation with the attaining indices (smallest on ties).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEvaluation {
    pub x: f64,
    pub value: f64,
    pub argmax_numerator: usize,
    pub argmax_denominator: usize,
}

/// `f` sampled at the nodes `[k]_q / [n]_q`.
#[derive(Debug, Clone)]
pub struct NodeSamples {
    values: Vec<f64>,
    ln_values: Vec<f64>,
}

impl NodeSamples {
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Degree-`n` operator with its basis tables; reusable across functions and
/// evaluation points.
#[derive(Debug, Clone)]
pub struct MaxProductOperator {
    basis: Basis,
}

impl MaxProductOperator {
    pub fn new(n: usize, q: QParam) -> Result<Self> {
        Ok(MaxProductOperator {
            basis: Basis::new(n, q)?,
        })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn q(&self) -> QParam {
        self.basis.q()
    }

    pub fn sample<F: TestFunction + ?Sized>(&self, f: &F) -> Result<NodeSamples> {
        let mut values = Vec::with_capacity(self.degree() + 1);
        let mut ln_values = Vec::with_capacity(self.degree() + 1);
        for &t in self.basis.nodes() {
            let value = f.eval(t);
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::NegativeSample { x: t, value });
            }
            values.push(value);
            ln_values.push(libm::log(value));
        }
        Ok(NodeSamples { values, ln_values })
    }

    pub fn apply(&self, samples: &NodeSamples, x: f64) -> Result<PointEvaluation> {
        let weights = self.basis.log_weights(x)?;
        self.apply_weights(samples, &weights, x)
    }

    /// Same as [`apply`](Self::apply) with the basis weights at `x` supplied.
    pub fn apply_weights(
        &self,
        samples: &NodeSamples,
        weights: &[LogWeight],
        x: f64,
    ) -> Result<PointEvaluation> {
        let (den_k, den) = argmax(weights.iter().map(|w| w.ln()));
        let (num_k, num) = argmax(
            weights
                .iter()
                .zip(&samples.ln_values)
                .map(|(w, ln_f)| w.ln() + ln_f),
        );
        let value = LogWeight::from_ln(num)
            .ratio(LogWeight::from_ln(den))
            .ok_or(Error::DegenerateRatio { x })?;
        Ok(PointEvaluation {
            x,
            value,
            argmax_numerator: num_k,
            argmax_denominator: den_k,
        })
    }

    pub fn evaluate<F: TestFunction + ?Sized>(&self, f: &F, x: f64) -> Result<PointEvaluation> {
        check_point(x)?;
        let samples = self.sample(f)?;
        self.apply(&samples, x)
    }

    /// `sum_k p_{n,k}(x; q) f(node_k)`.
    pub fn apply_linear(&self, samples: &NodeSamples, x: f64) -> Result<f64> {
        let weights = self.basis.log_weights(x)?;
        Ok(weights
            .iter()
            .zip(&samples.values)
            .map(|(w, f)| w.value() * f)
            .sum())
    }

    /// `E_{n,q}(x) = B(phi_x)(x)` with `phi_x(t) = |t - x|`.
    pub fn delta_n(&self, x: f64) -> Result<f64> {
        Ok(self.evaluate(&DistanceFrom(x), x)?.value)
    }

    /// `sup_x |B(f)(x) - f(x)|` over the uniform grid, with the first
    /// abscissa attaining it.
    pub fn sup_error<F: TestFunction + ?Sized>(
        &self,
        f: &F,
        grid_size: usize,
    ) -> Result<(f64, f64)> {
        let samples = self.sample(f)?;
        let mut best = (0.0f64, 0.0f64);
        for x in uniform_grid(grid_size)? {
            let err = libm::fabs(self.apply(&samples, x)?.value - f.eval(x));
            if err > best.0 {
                best = (err, x);
            }
        }
        Ok(best)
    }
}

/// Index of the first maximum. An empty or all-`-inf` sequence yields
/// `(0, -inf)`.
fn argmax(values: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (k, v) in values.enumerate() {
        if v > best.1 {
            best = (k, v);
        }
    }
    best
}

/// `i / (G - 1)` for `i = 0..G`; endpoints included.
pub fn uniform_grid(grid_size: usize) -> Result<impl Iterator<Item = f64> + Clone> {
    if grid_size < 2 {
        return Err(Error::InvalidGrid(grid_size));
    }
    let last = (grid_size - 1) as f64;
    Ok((0..grid_size).map(move |i| i as f64 / last))
}

pub(crate) fn check_alpha(alpha: u32) -> Result<()> {
    if alpha >= 2 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

pub fn max_product_q_bernstein<F: TestFunction + ?Sized>(
    f: &F,
    n: usize,
    q: QParam,
    x: f64,
) -> Result<PointEvaluation> {
    check_point(x)?;
    MaxProductOperator::new(n, q)?.evaluate(f, x)
}

pub fn linear_q_bernstein<F: TestFunction + ?Sized>(
    f: &F,
    n: usize,
    q: QParam,
    x: f64,
) -> Result<f64> {
    check_point(x)?;
    let op = MaxProductOperator::new(n, q)?;
    let samples = op.sample(f)?;
    op.apply_linear(&samples, x)
}

pub fn delta_n(x: f64, n: usize, q: QParam) -> Result<f64> {
    check_point(x)?;
    MaxProductOperator::new(n, q)?.delta_n(x)
}

/// `2 omega(f, delta_n(x; q))` with the grid modulus.
pub fn corollary1_bound<F: TestFunction + ?Sized>(
    f: &F,
    n: usize,
    q: QParam,
    x: f64,
    grid_size: usize,
) -> Result<f64> {
    let delta = delta_n(x, n, q)?;
    Ok(2.0 * ModulusGrid::new(f, grid_size)?.omega(delta)?)
}

/// `4 (1 + 2 / q^{n+1})`.
pub fn theorem6_factor(n: usize, q: QParam) -> f64 {
    4.0 * (1.0 + 2.0 / q.pow(n + 1))
}

/// `[m]_q^{-(1 - 1/alpha)}`; `m = n + 1` gives the uniform rate.
pub fn approximation_rate(m: usize, q: QParam, alpha: u32) -> Result<f64> {
    check_alpha(alpha)?;
    let exponent = 1.0 - 1.0 / alpha as f64;
    Ok(libm::pow(q_integer(m, q), -exponent))
}

/// `4 (1 + 2/q^{n+1}) omega(f; [n+1]_q^{-(1 - 1/alpha)})` with the grid
/// modulus.
pub fn theorem6_bound<F: TestFunction + ?Sized>(
    f: &F,
    n: usize,
    q: QParam,
    alpha: u32,
    grid_size: usize,
) -> Result<f64> {
    let grid = ModulusGrid::new(f, grid_size)?;
    theorem6_bound_on(&grid, n, q, alpha)
}

pub fn theorem6_bound_on(grid: &ModulusGrid, n: usize, q: QParam, alpha: u32) -> Result<f64> {
    Ok(theorem6_factor(n, q) * grid.omega(approximation_rate(n + 1, q, alpha)?)?)
}

pub fn sup_error<F: TestFunction + ?Sized>(
    f: &F,
    n: usize,
    q: QParam,
    grid_size: usize,
) -> Result<(f64, f64)> {
    MaxProductOperator::new(n, q)?.sup_error(f, grid_size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Constant, FnFunction, Registered};

    fn q(v: f64) -> QParam {
        QParam::new(v).unwrap()
    }

    #[test]
    fn constants_are_preserved() {
        for &c in &[0.0, 1.0, 7.5] {
            for &x in &[0.0, 0.13, 0.5, 0.97, 1.0] {
                let v = max_product_q_bernstein(&Constant(c), 12, q(0.9), x)
                    .unwrap()
                    .value;
                assert!((v - c).abs() <= 1e-13, "c={c} x={x} v={v}");
            }
        }
    }

    #[test]
    fn endpoints_interpolate() {
        for f in Registered::ALL {
            for n in [1, 7, 40] {
                let at0 = max_product_q_bernstein(&f, n, q(0.8), 0.0).unwrap();
                assert_eq!(at0.value, f.eval(0.0));
                let at1 = max_product_q_bernstein(&f, n, q(0.8), 1.0).unwrap();
                assert!((at1.value - f.eval(1.0)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn two_term_example() {
        // numerator max(0.75 * 0, 0.25 * 1), denominator max(0.75, 0.25)
        for &qv in &[0.3, 0.9, 1.0] {
            let e = max_product_q_bernstein(&Registered::Id, 1, q(qv), 0.25).unwrap();
            assert!((e.value - 1.0 / 3.0).abs() < 1e-15);
            assert_eq!(e.argmax_numerator, 1);
            assert_eq!(e.argmax_denominator, 0);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let neg = FnFunction::new("neg", |x: f64| x - 0.5);
        assert!(matches!(
            max_product_q_bernstein(&neg, 3, q(0.5), 0.5),
            Err(Error::NegativeSample { .. })
        ));
        let nan = FnFunction::new("nan", |_| f64::NAN);
        assert!(max_product_q_bernstein(&nan, 3, q(0.5), 0.5).is_err());
        assert_eq!(
            max_product_q_bernstein(&Registered::Id, 3, q(0.5), -0.1),
            Err(Error::PointOutOfRange(-0.1))
        );
    }

    #[test]
    fn linear_examples() {
        for &x in &[0.0, 0.3, 1.0] {
            let one = linear_q_bernstein(&Registered::Const1, 9, q(0.7), x).unwrap();
            assert!((one - 1.0).abs() < 1e-12);
        }
        // three hand-expanded terms, nodes {0, 1/1.5, 1}:
        // p0 = (1 - x)(1 - qx) = 0.5 * 0.75, p1 = [2]_q x (1 - x) = 1.5 * 0.25, p2 = x^2
        let expected = 0.5 * 0.75 * 0.0 + 1.5 * 0.25 * (1.0 / 1.5) + 0.25 * 1.0;
        let got = linear_q_bernstein(&Registered::Id, 2, q(0.5), 0.5).unwrap();
        assert!((got - expected).abs() < 1e-15);
    }

    #[test]
    fn linear_classical_reduction() {
        // B_n(x^2)(x) = x^2 + x(1 - x)/n at q = 1
        for &x in &[0.1, 0.5, 0.8] {
            let got = linear_q_bernstein(&Registered::Square, 10, QParam::ONE, x).unwrap();
            assert!((got - (x * x + x * (1.0 - x) / 10.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn delta_n_examples() {
        for &qv in &[0.5, 0.9, 1.0] {
            assert_eq!(delta_n(0.0, 15, q(qv)).unwrap(), 0.0);
            assert!(delta_n(1.0, 15, q(qv)).unwrap() < 1e-15);
        }
        // max(0.75 * 0.25, 0.25 * 0.75) / 0.75
        assert!((delta_n(0.25, 1, q(0.9)).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn delta_n_below_farthest_node() {
        let op = MaxProductOperator::new(20, q(0.93)).unwrap();
        for i in 0..=200 {
            let x = i as f64 / 200.0;
            let far = op
                .basis()
                .nodes()
                .iter()
                .map(|t| (t - x).abs())
                .fold(0.0, f64::max);
            assert!(op.delta_n(x).unwrap() <= far + 1e-15);
        }
    }

    #[test]
    fn corollary1_examples() {
        assert_eq!(
            corollary1_bound(&Constant(2.0), 10, q(0.9), 0.4, 1001).unwrap(),
            0.0
        );
        assert_eq!(
            corollary1_bound(&Registered::Sqrt, 10, q(0.9), 0.0, 1001).unwrap(),
            0.0
        );
        let d = delta_n(0.5, 10, q(0.95)).unwrap();
        let b = corollary1_bound(&Registered::Id, 10, q(0.95), 0.5, 1001).unwrap();
        // omega(id, d) on the grid is d rounded down to a multiple of 1/1000
        assert!((b - 2.0 * libm::floor(d * 1000.0) / 1000.0).abs() < 1e-15);
    }

    #[test]
    fn theorem6_examples() {
        assert_eq!(
            theorem6_bound(&Registered::Const1, 10, q(0.9), 3, 1001).unwrap(),
            0.0
        );
        assert_eq!(theorem6_factor(25, QParam::ONE), 12.0);
        assert_eq!(
            theorem6_bound(&Registered::Id, 10, q(0.9), 1, 101),
            Err(Error::InvalidAlpha(1))
        );

        // independent plug-in: [21]_q by a running power sum
        let qv = 1.0 - 1.0 / 441.0;
        let (mut sum, mut p) = (0.0, 1.0);
        for _ in 0..21 {
            sum += p;
            p *= qv;
        }
        let delta = libm::pow(sum, -2.0 / 3.0);
        let factor = 4.0 * (1.0 + 2.0 / libm::pow(qv, 21.0));
        let expected = factor * libm::floor(delta * 1000.0) / 1000.0;
        let got = theorem6_bound(&Registered::Id, 20, q(qv), 3, 1001).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn sup_error_examples() {
        let (s, _) = sup_error(&Constant(3.0), 8, q(0.9), 101).unwrap();
        assert!(s < 1e-13);
        // n = 1: B(id)(x) = x / max(1 - x, x), scan the closed form
        let (s, at) = sup_error(&Registered::Id, 1, q(0.6), 101).unwrap();
        let mut best = (0.0f64, 0.0);
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let e = x / (1.0 - x).max(x) - x;
            if e > best.0 {
                best = (e, x);
            }
        }
        assert!((s - best.0).abs() < 1e-14);
        assert_eq!(at, best.1);
        assert!(at > 0.0 && at < 1.0);
    }

    #[test]
    fn argmax_prefers_smallest_index() {
        assert_eq!(argmax([1.0, 3.0, 3.0, 2.0].into_iter()), (1, 3.0));
        assert_eq!(
            argmax([f64::NEG_INFINITY; 3].into_iter()),
            (0, f64::NEG_INFINITY)
        );
    }
}
