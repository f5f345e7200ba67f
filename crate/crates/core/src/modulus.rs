//! Grid estimate of the modulus of continuity
//! `omega(f, delta) = max { |f(x) - f(y)| : x, y in [0, 1], |x - y| <= delta }`.
//!
//! The estimate samples `f` on the uniform grid `i / (G - 1)` and takes the
//! constrained maximum over grid pairs. It never exceeds the true modulus
//! and falls short of it by at most `2 omega(f, 1 / (G - 1))`.

use alloc::vec::Vec;

use crate::{Error, Result, TestFunction};

/// Samples of `f` on a uniform grid plus `omega` for every pair offset.
#[derive(Debug, Clone)]
pub struct ModulusGrid {
    samples: Vec<f64>,
    /// by_offset[w] = max over pairs with |i - j| <= w
    by_offset: Vec<f64>,
}

impl ModulusGrid {
    /// Exhaustive pair scan, `O(G^2)` once per function and grid.
    pub fn new<F: TestFunction + ?Sized>(f: &F, grid_size: usize) -> Result<Self> {
        if grid_size < 2 {
            return Err(Error::InvalidGrid(grid_size));
        }
        let last = (grid_size - 1) as f64;
        let samples: Vec<f64> = (0..grid_size).map(|i| f.eval(i as f64 / last)).collect();
        Ok(Self::from_samples(samples))
    }

    pub fn from_samples(samples: Vec<f64>) -> Self {
        let g = samples.len();
        let mut by_offset = Vec::with_capacity(g);
        let mut running = 0.0f64;
        by_offset.push(0.0);
        for w in 1..g {
            let widest = samples
                .iter()
                .zip(&samples[w..])
                .map(|(a, b)| libm::fabs(b - a))
                .fold(0.0f64, f64::max);
            running = running.max(widest);
            by_offset.push(running);
        }
        ModulusGrid { samples, by_offset }
    }

    pub fn grid_size(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Grid spacing `1 / (G - 1)`.
    pub fn spacing(&self) -> f64 {
        1.0 / (self.samples.len() - 1) as f64
    }

    /// Largest pair offset `w` with `w / (G - 1) <= delta`.
    pub fn window(&self, delta: f64) -> usize {
        let last = self.samples.len() - 1;
        if delta >= 1.0 {
            return last;
        }
        let denom = last as f64;
        let mut w = libm::floor(delta * denom) as usize;
        // the product can round across an integer in either direction
        while w < last && (w + 1) as f64 / denom <= delta {
            w += 1;
        }
        while w > 0 && w as f64 / denom > delta {
            w -= 1;
        }
        w
    }

    pub fn omega(&self, delta: f64) -> Result<f64> {
        if delta.is_nan() || delta < 0.0 {
            return Err(Error::InvalidScale(delta));
        }
        Ok(self.by_offset[self.window(delta)])
    }

    /// `omega(f, 1 / (G - 1))` on the grid.
    pub fn resolution_slack(&self) -> f64 {
        self.by_offset[1]
    }

    /// Upper bound for the true modulus at `delta`, assuming the grid
    /// resolves `f` at its own spacing.
    pub fn omega_upper(&self, delta: f64) -> Result<f64> {
        Ok(self.omega(delta)? + 2.0 * self.resolution_slack())
    }
}

pub fn modulus_of_continuity<F: TestFunction + ?Sized>(
    f: &F,
    delta: f64,
    grid_size: usize,
) -> Result<f64> {
    ModulusGrid::new(f, grid_size)?.omega(delta)
}
