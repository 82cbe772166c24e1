//! Low-rank adaptation of a frozen linear layer, at desk scale.
//!
//! A layer computes `h = W0 x + B (A x)` with `W0` frozen and only `B` (d×r)
//! and `A` (r×k) trainable. The product `BA` is never formed on the forward
//! path.

mod registry;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;
use thiserror::Error;

pub use registry::{AdapterRegistry, AdaptedLayer, ModelCounts};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoraError {
    #[error("rank {r} must satisfy 1 <= r < min({d}, {k})")]
    Rank { d: usize, k: usize, r: usize },
    #[error("{what}: expected {expected}, got {found}")]
    DimensionMismatch { what: &'static str, expected: String, found: String },
    #[error("finite-difference step must be positive and finite")]
    BadStep,
}

fn check_rank(d: usize, k: usize, r: usize) -> Result<(), LoraError> {
    if r == 0 || r >= d.min(k) {
        return Err(LoraError::Rank { d, k, r });
    }
    Ok(())
}

fn shape(m: &DMatrix<f64>) -> String {
    format!("{}x{}", m.nrows(), m.ncols())
}

fn expect_len(what: &'static str, v: &DVector<f64>, n: usize) -> Result<(), LoraError> {
    if v.len() != n {
        return Err(LoraError::DimensionMismatch { what, expected: n.to_string(), found: v.len().to_string() });
    }
    Ok(())
}

fn expect_shape(what: &'static str, m: &DMatrix<f64>, rows: usize, cols: usize) -> Result<(), LoraError> {
    if (m.nrows(), m.ncols()) != (rows, cols) {
        return Err(LoraError::DimensionMismatch { what, expected: format!("{rows}x{cols}"), found: shape(m) });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoraLayer {
    w0: DMatrix<f64>,
    b: DMatrix<f64>,
    a: DMatrix<f64>,
}

impl LoraLayer {
    /// Wraps a frozen weight with a zero `B` and a small random `A`, so the
    /// adapter starts out contributing nothing.
    pub fn new<R: Rng + ?Sized>(w0: DMatrix<f64>, r: usize, rng: &mut R) -> Result<Self, LoraError> {
        let (d, k) = w0.shape();
        check_rank(d, k, r)?;
        let normal = Normal::new(0.0, 0.01).expect("valid deviation");
        let a = DMatrix::from_fn(r, k, |_, _| normal.sample(rng));
        Ok(LoraLayer { w0, b: DMatrix::zeros(d, r), a })
    }

    pub fn from_parts(w0: DMatrix<f64>, b: DMatrix<f64>, a: DMatrix<f64>) -> Result<Self, LoraError> {
        let (d, k) = w0.shape();
        let r = b.ncols();
        check_rank(d, k, r)?;
        expect_shape("B", &b, d, r)?;
        expect_shape("A", &a, r, k)?;
        Ok(LoraLayer { w0, b, a })
    }

    /// Fully random layer, for tests and demos.
    pub fn random<R: Rng + ?Sized>(d: usize, k: usize, r: usize, rng: &mut R) -> Result<Self, LoraError> {
        check_rank(d, k, r)?;
        let mut m = |rows, cols| DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0));
        let w0 = m(d, k);
        let b = m(d, r);
        let a = m(r, k);
        Self::from_parts(w0, b, a)
    }

    pub fn w0(&self) -> &DMatrix<f64> {
        &self.w0
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn rank(&self) -> usize {
        self.b.ncols()
    }

    /// `(d, k)`: output and input sizes.
    pub fn dims(&self) -> (usize, usize) {
        self.w0.shape()
    }

    pub fn frozen_forward(&self, x: &DVector<f64>) -> Result<DVector<f64>, LoraError> {
        expect_len("input", x, self.w0.ncols())?;
        Ok(&self.w0 * x)
    }

    pub fn adapter_forward(&self, x: &DVector<f64>) -> Result<DVector<f64>, LoraError> {
        expect_len("input", x, self.a.ncols())?;
        Ok(&self.b * (&self.a * x))
    }

    pub fn forward(&self, x: &DVector<f64>) -> Result<DVector<f64>, LoraError> {
        Ok(self.frozen_forward(x)? + self.adapter_forward(x)?)
    }

    /// The materialized update `BA`.
    pub fn delta_w(&self) -> DMatrix<f64> {
        &self.b * &self.a
    }

    /// Trainable values: `B` then `A`, each column-major.
    pub fn trainable_parameters(&self) -> Vec<f64> {
        self.b.iter().chain(self.a.iter()).copied().collect()
    }

    /// Gradient step on the adapter; `W0` is untouched.
    pub fn update(&mut self, grads: &Gradients, learning_rate: f64) -> Result<(), LoraError> {
        expect_shape("dB", &grads.d_b, self.b.nrows(), self.b.ncols())?;
        expect_shape("dA", &grads.d_a, self.a.nrows(), self.a.ncols())?;
        self.b -= &grads.d_b * learning_rate;
        self.a -= &grads.d_a * learning_rate;
        Ok(())
    }

    /// Gradients of `gᵀh` with respect to `B` and `A`.
    pub fn gradients(&self, x: &DVector<f64>, g: &DVector<f64>) -> Result<Gradients, LoraError> {
        expect_len("input", x, self.dims().1)?;
        expect_len("upstream gradient", g, self.dims().0)?;
        let ax = &self.a * x;
        let btg = self.b.transpose() * g;
        Ok(Gradients { d_b: g * ax.transpose(), d_a: btg * x.transpose() })
    }
}

/// `h = W0 x + B (A x)`.
pub fn lora_forward(layer: &LoraLayer, x: &DVector<f64>) -> Result<DVector<f64>, LoraError> {
    layer.forward(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub d_b: DMatrix<f64>,
    pub d_a: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamCounts {
    pub full: usize,
    pub lora: usize,
    pub ratio: f64,
}

/// Parameters of a dense d×k update versus its rank-r factorization.
pub fn param_counts(d: usize, k: usize, r: usize) -> Result<ParamCounts, LoraError> {
    check_rank(d, k, r)?;
    let full = d * k;
    let lora = r * (d + k);
    Ok(ParamCounts { full, lora, ratio: lora as f64 / full as f64 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheck {
    pub analytic: Gradients,
    /// Largest `|analytic - numeric| / max(|analytic|, |numeric|, 1)`.
    pub max_relative_error: f64,
    pub checked: usize,
}

pub const DEFAULT_STEP: f64 = 1e-5;

/// Compares analytic adapter gradients with central differences of the
/// scalar `gᵀh`, one trainable entry at a time.
pub fn grad_check(layer: &LoraLayer, x: &DVector<f64>, g: &DVector<f64>, step: f64) -> Result<GradCheck, LoraError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(LoraError::BadStep);
    }
    let analytic = layer.gradients(x, g)?;
    let loss = |l: &LoraLayer| g.dot(&l.forward(x).expect("dimensions checked"));
    let mut probe = layer.clone();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let rel = |a: f64, n: f64| (a - n).abs() / a.abs().max(n.abs()).max(1.0);
    for idx in 0..layer.b.len() {
        let orig = probe.b[idx];
        probe.b[idx] = orig + step;
        let up = loss(&probe);
        probe.b[idx] = orig - step;
        let down = loss(&probe);
        probe.b[idx] = orig;
        worst = worst.max(rel(analytic.d_b[idx], (up - down) / (2.0 * step)));
        checked += 1;
    }
    for idx in 0..layer.a.len() {
        let orig = probe.a[idx];
        probe.a[idx] = orig + step;
        let up = loss(&probe);
        probe.a[idx] = orig - step;
        let down = loss(&probe);
        probe.a[idx] = orig;
        worst = worst.max(rel(analytic.d_a[idx], (up - down) / (2.0 * step)));
        checked += 1;
    }
    Ok(GradCheck { analytic, max_relative_error: worst, checked })
}
