//! Adversarial-refinement loss terms as plain numerical functions.
//!
//! The refinement objective combines a Wasserstein critic-score gap, a
//! gradient penalty pulling the critic's gradient norm toward 1, and an L1
//! segmentation-consistency term between mask pairs:
//!
//! ```text
//! l_gan   = mean(D(real)) - mean(D(fake))
//! l_gp    = lambda * mean((||grad D(x_hat)||_2 - 1)^2)
//! l_seg   = mean(|mask_a - mask_b|)
//! l_total = l_gan + lambda_gp * l_gp + lambda_seg * l_seg
//! ```
//!
//! Note that the penalty coefficient appears twice by construction: the
//! inner `lambda` inside `l_gp` and the outer `lambda_gp` in the total, so
//! the effective penalty weight is their product. Critic gradients are
//! estimated by central finite differences, which is exact for affine
//! critics and has O(h^2) truncation error otherwise. No autodiff, no
//! neural stack: these functions are the testable numeric surface of the
//! refinement objective.

use thiserror::Error;

use crate::raster::Mask;

/// Scalar-valued critic over flattened sample vectors.
pub trait Critic {
    fn eval(&self, x: &[f64]) -> f64;
}

impl<F: Fn(&[f64]) -> f64> Critic for F {
    fn eval(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// Affine critic `D(x) = w . x + b`, the workhorse for tests and the toy
/// fitting loop.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineCritic {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl AffineCritic {
    pub fn zeros(dim: usize) -> Self {
        Self {
            weights: vec![0.0; dim],
            bias: 0.0,
        }
    }

    pub fn new(weights: Vec<f64>, bias: f64) -> Self {
        Self { weights, bias }
    }

    pub fn weight_norm(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum::<f64>().sqrt()
    }
}

impl Critic for AffineCritic {
    fn eval(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }
}

/// Loss combination weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    /// Outer weight on the gradient penalty in the total.
    pub lambda_gp: f64,
    /// Weight on the segmentation-consistency term.
    pub lambda_seg: f64,
    /// Inner coefficient of the gradient penalty itself.
    pub lambda: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            lambda_gp: 1.0,
            lambda_seg: 1.0,
            lambda: 10.0,
        }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<(), LossError> {
        if self.lambda_gp < 0.0 || self.lambda_seg < 0.0 || self.lambda < 0.0 {
            return Err(LossError::NegativeWeight);
        }
        Ok(())
    }
}

/// The scalar loss components and their weighted total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub l_gan: f64,
    pub l_gp: f64,
    pub l_seg: f64,
    pub l_total: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum LossError {
    #[error("score batch is empty")]
    EmptyBatch,
    #[error("critic returned a non-finite value")]
    NonFiniteCritic,
    #[error("shape mismatch: {0} vs {1}")]
    ShapeMismatch(usize, usize),
    #[error("finite-difference step must be > 0")]
    BadStep,
    #[error("loss weights must be non-negative")]
    NegativeWeight,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Critic-score gap `mean(real) - mean(fake)`.
pub fn wasserstein_loss(real_scores: &[f64], fake_scores: &[f64]) -> Result<f64, LossError> {
    if real_scores.is_empty() || fake_scores.is_empty() {
        return Err(LossError::EmptyBatch);
    }
    Ok(mean(real_scores) - mean(fake_scores))
}

/// Euclidean norm of the central finite-difference gradient estimate.
pub fn gradient_norm(
    critic: &dyn Critic,
    x_hat: &[f64],
    fd_step: f64,
) -> Result<f64, LossError> {
    if !(fd_step > 0.0 && fd_step.is_finite()) {
        return Err(LossError::BadStep);
    }
    let mut probe = x_hat.to_vec();
    let mut sum_sq = 0.0f64;
    for i in 0..x_hat.len() {
        let orig = probe[i];
        probe[i] = orig + fd_step;
        let plus = critic.eval(&probe);
        probe[i] = orig - fd_step;
        let minus = critic.eval(&probe);
        probe[i] = orig;
        if !plus.is_finite() || !minus.is_finite() {
            return Err(LossError::NonFiniteCritic);
        }
        let g = (plus - minus) / (2.0 * fd_step);
        sum_sq += g * g;
    }
    Ok(sum_sq.sqrt())
}

/// Gradient penalty `lambda * mean((||grad D|| - 1)^2)` over a batch of
/// reference points.
pub fn gradient_penalty(
    critic: &dyn Critic,
    x_hat_batch: &[Vec<f64>],
    lambda: f64,
    fd_step: f64,
) -> Result<f64, LossError> {
    if x_hat_batch.is_empty() {
        return Err(LossError::EmptyBatch);
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let mut acc = 0.0f64;
    for x in x_hat_batch {
        let g = gradient_norm(critic, x, fd_step)?;
        acc += (g - 1.0) * (g - 1.0);
    }
    Ok(lambda * (acc / x_hat_batch.len() as f64))
}

/// Mean absolute difference between two equally sized sample vectors
/// (masks, soft masks, or images flattened to slices).
pub fn seg_consistency_loss(a: &[f64], b: &[f64]) -> Result<f64, LossError> {
    if a.len() != b.len() {
        return Err(LossError::ShapeMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let abs: Vec<f64> = a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).collect();
    Ok(crate::metrics::pairwise_sum(&abs) / abs.len() as f64)
}

/// [`seg_consistency_loss`] over binary masks.
pub fn seg_consistency_masks(a: &Mask, b: &Mask) -> Result<f64, LossError> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(LossError::ShapeMismatch(
            a.data().len(),
            b.data().len(),
        ));
    }
    let av: Vec<f64> = a.data().iter().map(|&v| f64::from(v)).collect();
    let bv: Vec<f64> = b.data().iter().map(|&v| f64::from(v)).collect();
    seg_consistency_loss(&av, &bv)
}

/// Assemble the weighted total. `l_gp` is expected to already include its
/// inner `lambda`; `weights.lambda_gp` is the outer multiplier.
pub fn total_loss(l_gan: f64, l_gp: f64, l_seg: f64, weights: &LossWeights) -> LossBreakdown {
    LossBreakdown {
        l_gan,
        l_gp,
        l_seg,
        l_total: l_gan + weights.lambda_gp * l_gp + weights.lambda_seg * l_seg,
    }
}

/// Convex combination `(1 - t) * real + t * fake`, the standard reference
/// point construction for the gradient penalty.
pub fn interpolate(real: &[f64], fake: &[f64], t: f64) -> Result<Vec<f64>, LossError> {
    if real.len() != fake.len() {
        return Err(LossError::ShapeMismatch(real.len(), fake.len()));
    }
    Ok(real
        .iter()
        .zip(fake)
        .map(|(&r, &f)| (1.0 - t) * r + t * f)
        .collect())
}

/// Seeded batch of convex combinations over paired real/fake vectors.
pub fn interpolate_batch(
    real: &[Vec<f64>],
    fake: &[Vec<f64>],
    seed: u64,
) -> Result<Vec<Vec<f64>>, LossError> {
    if real.is_empty() || fake.is_empty() {
        return Err(LossError::EmptyBatch);
    }
    let mut rng = crate::rng::SplitMix64::new(seed);
    let n = real.len().min(fake.len());
    (0..n)
        .map(|i| interpolate(&real[i], &fake[i], rng.next_f64()))
        .collect()
}

/// Fit an affine critic by gradient ascent on the penalized score gap,
/// over low-dimensional feature vectors. Returns the loss trace including
/// the initial (zero-critic) state, so `steps = 0` yields one entry.
///
/// The ascent direction is the analytic gradient of
/// `l_gan - lambda * (||w|| - 1)^2` with the penalty subgradient taken as
/// zero at `w = 0`.
pub fn toy_adversarial_fit(
    real_feats: &[Vec<f64>],
    fake_feats: &[Vec<f64>],
    steps: usize,
    learning_rate: f64,
) -> Result<Vec<LossBreakdown>, LossError> {
    if real_feats.is_empty() || fake_feats.is_empty() {
        return Err(LossError::EmptyBatch);
    }
    let dim = real_feats[0].len();
    if real_feats.iter().chain(fake_feats).any(|v| v.len() != dim) {
        return Err(LossError::ShapeMismatch(dim, 0));
    }
    let weights = LossWeights::default();
    let fd_step = 1e-4;

    let feature_mean = |batch: &[Vec<f64>]| -> Vec<f64> {
        let mut mu = vec![0.0; dim];
        for v in batch {
            for (m, x) in mu.iter_mut().zip(v) {
                *m += x;
            }
        }
        for m in &mut mu {
            *m /= batch.len() as f64;
        }
        mu
    };
    let mu_real = feature_mean(real_feats);
    let mu_fake = feature_mean(fake_feats);
    let delta: Vec<f64> = mu_real.iter().zip(&mu_fake).map(|(r, f)| r - f).collect();

    let mut critic = AffineCritic::zeros(dim);
    let x_hat = interpolate_batch(real_feats, fake_feats, 0xFEED)?;

    let breakdown = |critic: &AffineCritic| -> Result<LossBreakdown, LossError> {
        let real_scores: Vec<f64> = real_feats.iter().map(|v| critic.eval(v)).collect();
        let fake_scores: Vec<f64> = fake_feats.iter().map(|v| critic.eval(v)).collect();
        let l_gan = wasserstein_loss(&real_scores, &fake_scores)?;
        let l_gp = gradient_penalty(critic, &x_hat, weights.lambda, fd_step)?;
        Ok(total_loss(l_gan, l_gp, 0.0, &weights))
    };

    let mut trace = Vec::with_capacity(steps + 1);
    trace.push(breakdown(&critic)?);
    for _ in 0..steps {
        let norm = critic.weight_norm();
        for i in 0..dim {
            let penalty_grad = if norm > 0.0 {
                2.0 * weights.lambda * (norm - 1.0) * critic.weights[i] / norm
            } else {
                0.0
            };
            critic.weights[i] += learning_rate * (delta[i] - penalty_grad);
        }
        trace.push(breakdown(&critic)?);
    }
    Ok(trace)
}
