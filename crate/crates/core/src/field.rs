//! Even periodic fields as truncated cosine series, grid transforms,
//! the action of 𝓛, pointwise nonlinearities and the norm bundle.
//!
//! A [`CosineField`] stores a0..aN with u(x) = a0 + Σ a_n cos(nx); its complex
//! coefficients are û(0) = a0 and û(±n) = a_n/2. Norm conventions follow the
//! analysis: the L² norm carries the 2π factor of the integral, the Ḣ^s
//! seminorms are plain coefficient sums Σ |n|^{2s}|û(n)|².

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiplier::MultiplierSpec;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Smallest 5-smooth integer (2^a 3^b 5^c) that is >= x. FFTs of these
/// lengths stay on the fast path of the planner.
pub fn next_fast_size(x: usize) -> usize {
    let mut m = x.max(1);
    loop {
        let mut r = m;
        while r % 2 == 0 {
            r /= 2;
        }
        while r % 3 == 0 {
            r /= 3;
        }
        while r % 5 == 0 {
            r /= 5;
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Minimal grid size for which the truncated projection of the pointwise
/// power |u|^p is computed without aliasing (integer p), or the documented
/// oversampling heuristic for non-integer p.
///
/// A degree-p product of an N-mode field has bandwidth pN; mode n of the
/// M-point grid transform picks up energy from modes M - n, so keeping
/// 0..N clean requires M >= (p+1)N + 1. Non-integer powers are not
/// band-limited at all; M = 4N keeps the aliasing error at the level of the
/// spectral tail.
pub fn dealias_size(n: usize, p: f64) -> usize {
    if p.fract() == 0.0 && p >= 2.0 && p < 64.0 {
        (p as usize + 1) * n + 1
    } else {
        (4 * n).max(2 * n + 1)
    }
}

// Per-worker FFT planner; plans are cached by length and never shared
// across threads.
thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan_forward(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

fn plan_inverse(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

/// Even real periodic function as a truncated cosine series.
#[derive(Debug, Clone, PartialEq)]
pub struct CosineField {
    a: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    #[serde(rename = "N")]
    n: usize,
    a: Vec<f64>,
}

impl Serialize for CosineField {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        FieldRepr {
            n: self.truncation(),
            a: self.a.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for CosineField {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = FieldRepr::deserialize(de)?;
        if repr.a.len() != repr.n + 1 {
            return Err(serde::de::Error::custom(format!(
                "field claims N = {} but carries {} coefficients",
                repr.n,
                repr.a.len()
            )));
        }
        CosineField::from_coeffs(repr.a).map_err(serde::de::Error::custom)
    }
}

impl CosineField {
    /// Zero field with truncation order n.
    pub fn zeros(n: usize) -> Self {
        Self {
            a: vec![0.0; n + 1],
        }
    }

    /// Constant field u ≡ c.
    pub fn constant(c: f64, n: usize) -> Self {
        let mut f = Self::zeros(n);
        f.a[0] = c;
        f
    }

    /// The basis field e_k: 1 for k = 0, cos(kx) for k >= 1.
    pub fn mode(k: usize, n: usize) -> Self {
        assert!(k <= n, "mode {k} not representable at truncation {n}");
        let mut f = Self::zeros(n);
        f.a[k] = 1.0;
        f
    }

    /// Wrap a coefficient vector a0..aN. Rejects empty and non-finite data.
    pub fn from_coeffs(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidParameter(
                "a cosine field needs at least the a0 coefficient".into(),
            ));
        }
        if let Some(bad) = a.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite coefficient a[{bad}]"
            )));
        }
        Ok(Self { a })
    }

    pub fn truncation(&self) -> usize {
        self.a.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.a
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.a
    }

    /// Coefficient a_n, 0 beyond the truncation.
    pub fn coeff(&self, n: usize) -> f64 {
        self.a.get(n).copied().unwrap_or(0.0)
    }

    /// Direct pointwise evaluation a0 + Σ a_n cos(nx).
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = self.a[0];
        for (n, &an) in self.a.iter().enumerate().skip(1) {
            acc += an * (n as f64 * x).cos();
        }
        acc
    }

    /// Copy with a new truncation order (pad with zeros or drop the tail).
    pub fn resized(&self, n: usize) -> Self {
        let mut a = self.a.clone();
        a.resize(n + 1, 0.0);
        Self { a }
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self {
            a: self.a.iter().map(|v| alpha * v).collect(),
        }
    }

    /// Coefficient-wise self + alpha * other (common truncation = max of both).
    pub fn add_scaled(&self, alpha: f64, other: &Self) -> Self {
        let n = self.truncation().max(other.truncation());
        let mut a = vec![0.0; n + 1];
        for (i, slot) in a.iter_mut().enumerate() {
            *slot = self.coeff(i) + alpha * other.coeff(i);
        }
        Self { a }
    }

    /// Shift by a constant: u + c (only a0 moves).
    pub fn add_constant(&self, c: f64) -> Self {
        let mut a = self.a.clone();
        a[0] += c;
        Self { a }
    }

    /// Euclidean norm of the raw coefficient vector (the Newton solver's
    /// convergence metric).
    pub fn coeff_l2(&self) -> f64 {
        self.a.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Resolution diagnostic |a_N| / max_n |a_n| (0 for the zero field).
    pub fn tail_ratio(&self) -> f64 {
        let peak = self.a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if peak == 0.0 {
            0.0
        } else {
            self.a[self.truncation()].abs() / peak
        }
    }
}

/// Samples of a real function on the uniform grid x_j = 2πj/M.
#[derive(Debug, Clone)]
pub struct GridSamples {
    values: Vec<f64>,
}

impl GridSamples {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Evaluate the trigonometric polynomial on the M-point grid via an FFT
/// synthesis. Exact up to rounding; errors when M < 2N+1 (the aliasing
/// threshold for linear reconstruction).
pub fn to_grid(u: &CosineField, m: usize) -> Result<GridSamples> {
    let n = u.truncation();
    if m < 2 * n + 1 {
        return Err(Error::GridTooCoarse {
            m,
            required: 2 * n + 1,
        });
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    buf[0].re = u.a[0];
    for k in 1..=n {
        let half = 0.5 * u.a[k];
        buf[k].re += half;
        buf[m - k].re += half;
    }
    plan_inverse(m).process(&mut buf);
    Ok(GridSamples {
        values: buf.into_iter().map(|c| c.re).collect(),
    })
}

/// Cosine coefficients of the even trigonometric interpolant, truncated at n.
///
/// The input is symmetrised first, g_j <- (g_j + g_{M-j})/2, so odd content is
/// annihilated; asymmetry above 1e-8 is logged as a warning, not an error.
pub fn from_grid(g: &GridSamples, n: usize) -> CosineField {
    let m = g.len();
    assert!(m > 0, "empty grid");
    let mut asym = 0.0f64;
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for j in 0..m {
        let mirror = if j == 0 { 0 } else { m - j };
        let a = g.values[j];
        let b = g.values[mirror];
        asym = asym.max((a - b).abs());
        buf[j].re = 0.5 * (a + b);
    }
    if asym > 1e-8 {
        log::warn!("from_grid: input asymmetry {asym:.3e} exceeds 1e-8; odd part discarded");
    }
    plan_forward(m).process(&mut buf);
    let inv_m = 1.0 / m as f64;
    let mut a = vec![0.0; n + 1];
    a[0] = buf[0].re * inv_m;
    for (k, slot) in a.iter_mut().enumerate().skip(1) {
        if 2 * k < m {
            *slot = 2.0 * buf[k].re * inv_m;
        } else if 2 * k == m {
            // Nyquist cosine mode appears once on the grid
            *slot = buf[k].re * inv_m;
        }
        // modes above M/2 are not representable on this grid: left at zero
    }
    CosineField { a }
}

/// Diagonal action of 𝓛: coefficient n is multiplied by |n|^{2s}𝔪(n), and
/// the mean a0 maps to 0.
pub fn apply_l(spec: &MultiplierSpec, u: &CosineField) -> Result<CosineField> {
    let mut a = vec![0.0; u.a.len()];
    for (n, slot) in a.iter_mut().enumerate().skip(1) {
        *slot = spec.operator_symbol(n as i64)? * u.a[n];
    }
    Ok(CosineField { a })
}

/// |x|^p with exact integer fast paths.
fn abs_pow(x: f64, p: f64) -> f64 {
    if p == 2.0 {
        x * x
    } else if p == 3.0 {
        let a = x.abs();
        a * a * a
    } else if p == 4.0 {
        let x2 = x * x;
        x2 * x2
    } else {
        x.abs().powf(p)
    }
}

/// sign(x)|x|^{p-1}, the continuous extension of x|x|^{p-2} through x = 0
/// for p >= 2.
fn signed_abs_pow(x: f64, p: f64) -> f64 {
    if p == 2.0 {
        x
    } else if p == 3.0 {
        x * x.abs()
    } else if p == 4.0 {
        x * x * x
    } else {
        x.signum() * x.abs().powf(p - 1.0)
    }
}

/// Cosine projection of x ↦ |u(x)|^p (or sign(u)|u|^{p-1} when `signed`),
/// truncated at u's order, evaluated on an m-point grid.
pub fn nonlinearity(u: &CosineField, p: f64, signed: bool, m: usize) -> Result<CosineField> {
    let n = u.truncation();
    let required = dealias_size(n, p);
    if m < required {
        return Err(Error::GridTooCoarse { m, required });
    }
    let g = to_grid(u, m)?;
    let h: Vec<f64> = g
        .values
        .iter()
        .map(|&x| {
            if signed {
                signed_abs_pow(x, p)
            } else {
                abs_pow(x, p)
            }
        })
        .collect();
    Ok(from_grid(&GridSamples::new(h), n))
}

/// Cosine projection of the pointwise product w(x)·v(x) where w is given by
/// grid samples. Used by the Jacobian, which needs u|u|^{p-2}·v without an
/// intermediate projection of the factor.
pub fn project_product(w: &GridSamples, v: &CosineField, n_out: usize) -> Result<CosineField> {
    let g = to_grid(v, w.len())?;
    let prod: Vec<f64> = w
        .values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| a * b)
        .collect();
    Ok(from_grid(&GridSamples::new(prod), n_out))
}

/// All norms of the analysis. `s` sets the Sobolev scales; `linf` is the
/// oversampled grid maximum of |u| (grid of max(1024, 8N) points).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBundle {
    pub l2: f64,
    pub hdot_s: f64,
    pub hdot_2s: f64,
    pub h_s: f64,
    pub h_2s: f64,
    pub linf: f64,
}

pub fn norms(u: &CosineField, s: f64) -> NormBundle {
    let n = u.truncation();
    let mut sum_sq = 0.0;
    let mut sum_s = 0.0;
    let mut sum_2s = 0.0;
    for (k, &ak) in u.a.iter().enumerate().skip(1) {
        let a2 = ak * ak;
        let kf = k as f64;
        sum_sq += a2;
        sum_s += kf.powf(2.0 * s) * a2;
        sum_2s += kf.powf(4.0 * s) * a2;
    }
    let l2 = (TWO_PI * (u.a[0] * u.a[0] + 0.5 * sum_sq)).sqrt();
    let hdot_s = (0.5 * sum_s).sqrt();
    let hdot_2s = (0.5 * sum_2s).sqrt();
    let grid = next_fast_size(1024.max(8 * n).max(2 * n + 1));
    let linf = to_grid(u, grid)
        .expect("oversampled grid is above the aliasing threshold")
        .values
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    NormBundle {
        l2,
        hdot_s,
        hdot_2s,
        h_s: (l2 * l2 + hdot_s * hdot_s).sqrt(),
        h_2s: (l2 * l2 + hdot_2s * hdot_2s).sqrt(),
        linf,
    }
}

/// Coefficient ℓ¹ sum |a0| + Σ|a_n|, the rigorous L^∞ majorant used by the
/// proof-chain inequality test.
pub fn coeff_l1(u: &CosineField) -> f64 {
    u.a.iter().map(|v| v.abs()).sum()
}

/// The L² pairing ⟨u, v⟩ = ∫ u v = 2π(a0 b0 + ½ Σ a_n b_n).
pub fn l2_pairing(u: &CosineField, v: &CosineField) -> f64 {
    let top = u.truncation().max(v.truncation());
    let mut acc = u.coeff(0) * v.coeff(0);
    for k in 1..=top {
        acc += 0.5 * u.coeff(k) * v.coeff(k);
    }
    TWO_PI * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::MultiplierSpec;

    /// Independent quadrature oracle: cosine coefficient n of f via the
    /// trapezoidal rule on a grid fine enough to be exact for trigonometric
    /// polynomials of the sampled degree. f is evaluated pointwise, not
    /// through any transform.
    fn quadrature_coeff(f: impl Fn(f64) -> f64, n: usize, grid: usize) -> f64 {
        let mut acc = 0.0;
        for j in 0..grid {
            let x = TWO_PI * j as f64 / grid as f64;
            acc += f(x) * (n as f64 * x).cos();
        }
        let integral = acc * TWO_PI / grid as f64;
        if n == 0 {
            integral / TWO_PI
        } else {
            integral / std::f64::consts::PI
        }
    }

    #[test]
    fn to_grid_single_mode() {
        let u = CosineField::mode(1, 1);
        let g = to_grid(&u, 8).unwrap();
        for (j, v) in g.values().iter().enumerate() {
            let x = TWO_PI * j as f64 / 8.0;
            assert!((v - x.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn to_grid_constant() {
        let u = CosineField::constant(3.0, 1);
        let g = to_grid(&u, 4).unwrap();
        for v in g.values() {
            assert!((v - 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn to_grid_two_modes() {
        // u = 1 + cos(2x) at N = 2, M = 8, against direct evaluation
        let u = CosineField::from_coeffs(vec![1.0, 0.0, 1.0]).unwrap();
        let g = to_grid(&u, 8).unwrap();
        for (j, v) in g.values().iter().enumerate() {
            let x = TWO_PI * j as f64 / 8.0;
            assert!((v - (1.0 + (2.0 * x).cos())).abs() < 1e-14);
        }
    }

    #[test]
    fn to_grid_rejects_coarse() {
        let u = CosineField::mode(3, 3);
        assert!(matches!(
            to_grid(&u, 6),
            Err(Error::GridTooCoarse { m: 6, required: 7 })
        ));
    }

    #[test]
    fn from_grid_single_mode() {
        let m = 16;
        let vals: Vec<f64> = (0..m)
            .map(|j| (3.0 * TWO_PI * j as f64 / m as f64).cos())
            .collect();
        let u = from_grid(&GridSamples::new(vals), 5);
        assert!((u.coeff(3) - 1.0).abs() < 1e-13);
        for n in [0, 1, 2, 4, 5] {
            assert!(u.coeff(n).abs() < 1e-13);
        }
    }

    #[test]
    fn from_grid_annihilates_odd_part() {
        let m = 16;
        let vals: Vec<f64> = (0..m)
            .map(|j| (TWO_PI * j as f64 / m as f64).sin())
            .collect();
        let u = from_grid(&GridSamples::new(vals), 4);
        assert!(u.coeffs().iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn from_grid_cos_squared() {
        // cos^2(x) = 1/2 + cos(2x)/2, cross-checked by the quadrature oracle
        let m = 16;
        let vals: Vec<f64> = (0..m)
            .map(|j| (TWO_PI * j as f64 / m as f64).cos().powi(2))
            .collect();
        let u = from_grid(&GridSamples::new(vals), 2);
        assert!((u.coeff(0) - 0.5).abs() < 1e-14);
        assert!((u.coeff(2) - 0.5).abs() < 1e-14);
        for n in 0..=2 {
            let oracle = quadrature_coeff(|x| x.cos() * x.cos(), n, 64);
            assert!((u.coeff(n) - oracle).abs() < 1e-13);
        }
    }

    #[test]
    fn apply_l_eigenmode() {
        let spec = MultiplierSpec::fractional(0.5);
        for k in 1..=5 {
            let u = CosineField::mode(k, 8);
            let lu = apply_l(&spec, &u).unwrap();
            for n in 0..=8 {
                let expected = if n == k { k as f64 } else { 0.0 };
                assert!((lu.coeff(n) - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn apply_l_kills_constants() {
        for spec in [MultiplierSpec::fractional(0.75), MultiplierSpec::ilw(0.5, 1.0)] {
            let u = CosineField::constant(4.2, 6);
            let lu = apply_l(&spec, &u).unwrap();
            assert!(lu.coeffs().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn apply_l_ilw_mode() {
        // L cos(2x) = 2|coth 2 - 1/2| cos(2x) for s = 1/2, delta = 1
        let spec = MultiplierSpec::ilw(0.5, 1.0);
        let u = CosineField::mode(2, 4);
        let lu = apply_l(&spec, &u).unwrap();
        let expected = 2.0 * 0.537314720727548;
        assert!((lu.coeff(2) - expected).abs() < 1e-13);
    }

    #[test]
    fn nonlinearity_cos_squared() {
        let u = CosineField::mode(1, 2);
        let w = nonlinearity(&u, 2.0, false, dealias_size(2, 2.0)).unwrap();
        assert!((w.coeff(0) - 0.5).abs() < 1e-14);
        assert!(w.coeff(1).abs() < 1e-14);
        assert!((w.coeff(2) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn nonlinearity_zero_and_constant() {
        let z = CosineField::zeros(4);
        let w = nonlinearity(&z, 3.0, false, dealias_size(4, 3.0)).unwrap();
        assert!(w.coeffs().iter().all(|v| *v == 0.0));

        let c = CosineField::constant(-2.0, 4);
        let w = nonlinearity(&c, 3.0, false, dealias_size(4, 3.0)).unwrap();
        assert!((w.coeff(0) - 8.0).abs() < 1e-13);
        assert!(w.coeffs()[1..].iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn nonlinearity_quadratic_exact_at_dealias_size() {
        // Full-band field squared: compare against the quadrature oracle on
        // a much finer grid. At M = dealias_size(N, 2) the projection must be
        // exact to rounding.
        let n = 8;
        let a: Vec<f64> = (0..=n).map(|k| 1.0 / (1.0 + k as f64)).collect();
        let u = CosineField::from_coeffs(a).unwrap();
        let w = nonlinearity(&u, 2.0, false, dealias_size(n, 2.0)).unwrap();
        for k in 0..=n {
            let oracle = quadrature_coeff(|x| u.eval(x) * u.eval(x), k, 256);
            assert!(
                (w.coeff(k) - oracle).abs() < 1e-12,
                "mode {k}: {} vs oracle {}",
                w.coeff(k),
                oracle
            );
        }
    }

    #[test]
    fn nonlinearity_rejects_coarse_grid() {
        let u = CosineField::mode(4, 4);
        let err = nonlinearity(&u, 2.0, false, 8);
        assert!(matches!(err, Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn signed_nonlinearity_is_identity_for_p2() {
        let u = CosineField::from_coeffs(vec![0.3, -1.2, 0.5]).unwrap();
        let w = nonlinearity(&u, 2.0, true, dealias_size(2, 2.0)).unwrap();
        for k in 0..=2 {
            assert!((w.coeff(k) - u.coeff(k)).abs() < 1e-14);
        }
    }

    #[test]
    fn norm_values_single_mode() {
        let u = CosineField::mode(1, 4);
        let b = norms(&u, 0.5);
        assert!((b.l2 - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert!((b.hdot_s - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((b.h_s - (b.l2 * b.l2 + 0.5).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn norm_values_constant() {
        let u = CosineField::constant(-2.5, 3);
        let b = norms(&u, 0.75);
        assert!((b.l2 - 2.5 * TWO_PI.sqrt()).abs() < 1e-13);
        assert_eq!(b.hdot_s, 0.0);
        assert!((b.linf - 2.5).abs() < 1e-12);
    }

    #[test]
    fn linf_two_modes() {
        let u = CosineField::from_coeffs(vec![0.0, 1.0, 1.0]).unwrap();
        let b = norms(&u, 0.5);
        assert!((b.linf - 2.0).abs() < 1e-12);
    }

    #[test]
    fn evenness_is_exact() {
        let u = CosineField::from_coeffs(vec![0.2, -0.7, 0.31, 0.05]).unwrap();
        for &x in &[0.1, 1.3, 2.9, 3.7] {
            assert_eq!(u.eval(x), u.eval(-x));
        }
    }

    #[test]
    fn parseval_round_trip() {
        let a: Vec<f64> = (0..=12).map(|k| (-(k as f64) / 3.0).exp()).collect();
        let u = CosineField::from_coeffs(a).unwrap();
        let g = to_grid(&u, next_fast_size(2 * 12 + 1)).unwrap();
        let v = from_grid(&g, 12);
        let (nu, nv) = (norms(&u, 0.5).l2, norms(&v, 0.5).l2);
        assert!((nu - nv).abs() / nu < 1e-12);
    }

    #[test]
    fn dealias_sizes() {
        assert_eq!(dealias_size(8, 2.0), 25);
        assert_eq!(dealias_size(8, 3.0), 33);
        assert_eq!(dealias_size(8, 4.0), 41);
        assert_eq!(dealias_size(8, 2.5), 32);
    }

    #[test]
    fn next_fast_sizes() {
        assert_eq!(next_fast_size(25), 25);
        assert_eq!(next_fast_size(26), 27);
        assert_eq!(next_fast_size(769), 800);
    }

    #[test]
    fn field_serde_round_trip() {
        let u = CosineField::from_coeffs(vec![1.0, -0.25, 0.125]).unwrap();
        let json = serde_json::to_string(&u).unwrap();
        assert!(json.contains("\"N\":2"));
        let v: CosineField = serde_json::from_str(&json).unwrap();
        assert_eq!(u, v);
    }

    #[test]
    fn tail_ratio_diagnostic() {
        let u = CosineField::from_coeffs(vec![0.0, 1.0, 0.5, 1e-9]).unwrap();
        assert!((u.tail_ratio() - 1e-9).abs() < 1e-22);
        assert_eq!(CosineField::zeros(4).tail_ratio(), 0.0);
    }
}
