//! Closed-form Benjamin-Ono traveling-wave profiles (s = 1/2, 𝔪 ≡ 1, p = 2),
//! used as ground truth throughout the test and acceptance suites.
//!
//! The negative family (λ < -1) is u±(x) = 1/(-λ ± √(λ²-1)cos x), strictly
//! positive. The positive family (λ > k) is u±_{k,λ} = k²/(λ ± √(λ²-k²)cos kx) - λ.
//! Coefficients decay like e^{-β n} with β = tanh⁻¹(k/λ) in |λ|; the Minus
//! member has all-positive oscillatory coefficients, the Plus member carries
//! the alternating signs of the half-period translate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{from_grid, next_fast_size, CosineField, GridSamples, TWO_PI};

/// Which of the two branches emanating from a bifurcation point (they are
/// x ↦ x + π/k translates of each other).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchSign {
    Plus,
    Minus,
}

impl BranchSign {
    fn factor(self) -> f64 {
        match self {
            BranchSign::Plus => 1.0,
            BranchSign::Minus => -1.0,
        }
    }
}

/// Parameters selecting one closed-form profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoParams {
    pub branch_k: usize,
    pub lambda: f64,
    pub sign: BranchSign,
}

/// Profiles closer than this to the bifurcation point are refused: the
/// oscillation is numerically indistinguishable from a constant and
/// β = tanh⁻¹(k/λ) overflows.
const BIFURCATION_GUARD: f64 = 1e-6;

fn project_pointwise(f: impl Fn(f64) -> f64, n: usize) -> CosineField {
    let m = next_fast_size((4 * n).max(1024).max(2 * n + 1));
    let vals: Vec<f64> = (0..m)
        .map(|j| f(TWO_PI * j as f64 / m as f64))
        .collect();
    from_grid(&GridSamples::new(vals), n)
}

/// The positive solutions u±_λ = 1/(-λ ± √(λ²-1)cos x) on λ < -1,
/// sampled pointwise and projected onto n cosine modes.
pub fn bo_negative(lambda: f64, sign: BranchSign, n: usize) -> Result<CosineField> {
    if !(lambda < -1.0 - BIFURCATION_GUARD) {
        return Err(Error::LambdaOutOfRange {
            lambda,
            reason: "negative family needs lambda < -1",
        });
    }
    let root = (lambda * lambda - 1.0).sqrt();
    let s = sign.factor();
    Ok(project_pointwise(
        |x| 1.0 / (-lambda + s * root * x.cos()),
        n,
    ))
}

/// Exact cosine coefficients of [`bo_negative`]: a0 = 1 and
/// a_n = 2(∓1)^n e^{-βn} with β = tanh⁻¹(1/|λ|).
pub fn bo_negative_coeffs(lambda: f64, sign: BranchSign, n: usize) -> Result<Vec<f64>> {
    if !(lambda < -1.0 - BIFURCATION_GUARD) {
        return Err(Error::LambdaOutOfRange {
            lambda,
            reason: "negative family needs lambda < -1",
        });
    }
    let beta = (1.0 / lambda.abs()).atanh();
    let alt = match sign {
        BranchSign::Plus => -1.0,
        BranchSign::Minus => 1.0,
    };
    let mut a = vec![0.0; n + 1];
    a[0] = 1.0;
    let mut phase = 1.0;
    for (k, slot) in a.iter_mut().enumerate().skip(1) {
        phase *= alt;
        *slot = 2.0 * phase * (-beta * k as f64).exp();
    }
    Ok(a)
}

/// The family u±_{k,λ} = k²/(λ ± √(λ²-k²)cos kx) - λ on λ > k, obtained from
/// the negative family through the symmetry T and the scalings T_k.
pub fn bo_positive(k: usize, lambda: f64, sign: BranchSign, n: usize) -> Result<CosineField> {
    if k < 1 {
        return Err(Error::InvalidParameter("branch index k must be >= 1".into()));
    }
    if !(lambda > k as f64 + BIFURCATION_GUARD) {
        return Err(Error::LambdaOutOfRange {
            lambda,
            reason: "positive family needs lambda > k",
        });
    }
    let kf = k as f64;
    let root = (lambda * lambda - kf * kf).sqrt();
    let s = sign.factor();
    Ok(project_pointwise(
        |x| kf * kf / (lambda + s * root * (kf * x).cos()) - lambda,
        n,
    ))
}

/// Exact cosine coefficients of [`bo_positive`]: a0 = k - λ and
/// a_{km} = 2k(∓1)^m e^{-βm} with β = tanh⁻¹(k/λ); off-multiples vanish.
pub fn bo_positive_coeffs(
    k: usize,
    lambda: f64,
    sign: BranchSign,
    n: usize,
) -> Result<Vec<f64>> {
    if !(lambda > k as f64 + BIFURCATION_GUARD) {
        return Err(Error::LambdaOutOfRange {
            lambda,
            reason: "positive family needs lambda > k",
        });
    }
    let kf = k as f64;
    let beta = (kf / lambda).atanh();
    let alt = match sign {
        BranchSign::Plus => -1.0,
        BranchSign::Minus => 1.0,
    };
    let mut a = vec![0.0; n + 1];
    a[0] = kf - lambda;
    let mut phase = 1.0;
    let mut m = 1usize;
    while k * m <= n {
        phase *= alt;
        a[k * m] = 2.0 * kf * phase * (-beta * m as f64).exp();
        m += 1;
    }
    Ok(a)
}

/// Leading amplitude of the k-th positive branch at λ, together with the
/// λ predicted by the local second-order model σ_k + ½λ''(0)·amplitude²
/// (λ''(0) = 1/k for this problem). Used for local-vs-exact comparison plots.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BranchParam {
    pub amplitude: f64,
    pub predicted_lambda: f64,
}

pub fn bo_branch_parametrization(k: usize, lambda: f64) -> Result<BranchParam> {
    if !(lambda > k as f64 + BIFURCATION_GUARD) {
        return Err(Error::LambdaOutOfRange {
            lambda,
            reason: "positive family needs lambda > k",
        });
    }
    let kf = k as f64;
    let beta = (kf / lambda).atanh();
    let amplitude = 2.0 * kf * (-beta).exp();
    let predicted_lambda = kf + 0.5 * amplitude * amplitude / kf;
    Ok(BranchParam {
        amplitude,
        predicted_lambda,
    })
}
