//! Nonnegative continuous functions on `[0, 1]`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result};

/// A member of `C_+[0, 1]`: total on `[0, 1]` with `eval(x) >= 0`.
///
/// Nonnegativity is not checked here; the operators reject a negative
/// sample when they see one.
pub trait TestFunction {
    fn name(&self) -> &str;
    fn eval(&self, x: f64) -> f64;
}

impl<T: TestFunction + ?Sized> TestFunction for &T {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn eval(&self, x: f64) -> f64 {
        (**self).eval(x)
    }
}

/// The fixed function registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Registered {
    /// `x`
    Id,
    /// `x^2`
    Square,
    /// `sqrt(x)`
    Sqrt,
    /// `|x - 1/2|`
    Tent,
    /// `sin(pi x)`
    Sine,
    /// `1`
    Const1,
}

impl Registered {
    pub const ALL: [Registered; 6] = [
        Registered::Id,
        Registered::Square,
        Registered::Sqrt,
        Registered::Tent,
        Registered::Sine,
        Registered::Const1,
    ];

    pub fn from_name(name: &str) -> Option<Registered> {
        Registered::ALL.into_iter().find(|f| f.name() == name)
    }

    pub const fn as_str(self) -> &'static str {
        match self {
            Registered::Id => "id",
            Registered::Square => "square",
            Registered::Sqrt => "sqrt",
            Registered::Tent => "tent",
            Registered::Sine => "sine",
            Registered::Const1 => "const1",
        }
    }
}

impl TestFunction for Registered {
    fn name(&self) -> &str {
        self.as_str()
    }

    fn eval(&self, x: f64) -> f64 {
        match self {
            Registered::Id => x,
            Registered::Square => x * x,
            Registered::Sqrt => libm::sqrt(x),
            Registered::Tent => libm::fabs(x - 0.5),
            Registered::Sine => libm::sin(PI * x).max(0.0),
            Registered::Const1 => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl TestFunction for Constant {
    fn name(&self) -> &str {
        "const"
    }

    fn eval(&self, _x: f64) -> f64 {
        self.0
    }
}

/// `phi_x(t) = |t - x|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceFrom(pub f64);

impl TestFunction for DistanceFrom {
    fn name(&self) -> &str {
        "distance"
    }

    fn eval(&self, t: f64) -> f64 {
        libm::fabs(t - self.0)
    }
}

/// Named closure.
pub struct FnFunction<F> {
    name: &'static str,
    f: F,
}

impl<F: Fn(f64) -> f64> FnFunction<F> {
    pub fn new(name: &'static str, f: F) -> Self {
        FnFunction { name, f }
    }
}

impl<F: Fn(f64) -> f64> TestFunction for FnFunction<F> {
    fn name(&self) -> &str {
        self.name
    }

    fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

/// Linear interpolation through `(knot_i, value_i)` with knots spanning
/// `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let spans = knots.first() == Some(&0.0) && knots.last() == Some(&1.0);
        let increasing = knots.windows(2).all(|w| w[0] < w[1]);
        if !spans || !increasing || knots.len() != values.len() || knots.len() < 2 {
            return Err(Error::InvalidKnots);
        }
        if let Some((&x, &value)) = knots
            .iter()
            .zip(&values)
            .find(|(_, v)| !(**v >= 0.0 && v.is_finite()))
        {
            return Err(Error::NegativeSample { x, value });
        }
        Ok(PiecewiseLinear { knots, values })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Pointwise sum on the merged knot set; exact as a function.
    pub fn sum(&self, other: &PiecewiseLinear) -> PiecewiseLinear {
        let mut knots: Vec<f64> = self.knots.iter().chain(&other.knots).copied().collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let values = knots
            .iter()
            .map(|&x| self.eval(x) + other.eval(x))
            .collect();
        PiecewiseLinear { knots, values }
    }
}

impl TestFunction for PiecewiseLinear {
    fn name(&self) -> &str {
        "piecewise-linear"
    }

    fn eval(&self, x: f64) -> f64 {
        let i = self.knots.partition_point(|&k| k <= x);
        if i == 0 {
            return self.values[0];
        }
        if i >= self.knots.len() {
            return self.values[self.values.len() - 1];
        }
        let (x0, x1) = (self.knots[i - 1], self.knots[i]);
        let (y0, y1) = (self.values[i - 1], self.values[i]);
        let t = (x - x0) / (x1 - x0);
        y0 + t * (y1 - y0)
    }
}
