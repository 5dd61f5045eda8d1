//! Exact spectra of the linearisations along the two trivial branches, the
//! transversality pairing, the bifurcation-direction formula for p = 2, the
//! explicit corrector field, and the second-order local branch predictor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{self, apply_l, l2_pairing, CosineField};
use crate::multiplier::MultiplierSpec;
use crate::operator::ProblemSpec;

/// One generalized eigenvalue of the trivial-branch linearisation
/// 𝔏(λ) = 𝓛 - λ: sigma = k^{2s}𝔪(k) with kernel cos(kx) (the constant 1
/// for k = 0). All eigenvalues are simple, chi = 1.
#[derive(Debug, Clone)]
pub struct EigenData {
    pub k: usize,
    pub sigma: f64,
    pub kernel_mode: CosineField,
    pub chi: usize,
}

/// Eigenvalues σ_0 = 0 < 𝔪(1) < 2^{2s}𝔪(2) < ... up to mode k_max.
pub fn trivial_spectrum(spec: &MultiplierSpec, k_max: usize) -> Result<Vec<EigenData>> {
    let n = k_max.max(1);
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        out.push(EigenData {
            k,
            sigma: spec.operator_symbol(k as i64)?,
            kernel_mode: CosineField::mode(k, n),
            chi: 1,
        });
    }
    Ok(out)
}

/// Eigenvalues 0 > -𝔪(1)/(p-1) > ... of the linearisation along the
/// constant branch u_λ = ∓|λ|^{1/(p-1)}.
pub fn constant_branch_spectrum(
    spec: &MultiplierSpec,
    p: f64,
    k_max: usize,
) -> Result<Vec<f64>> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "constant-branch spectrum needs p > 1 (got {p})"
        )));
    }
    (0..=k_max)
        .map(|k| Ok(-spec.operator_symbol(k as i64)? / (p - 1.0)))
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Transversality {
    pub projection: f64,
    pub passes: bool,
}

/// The crossing pairing ⟨∂²_{λu}F(σ_k, 0)[cos kx], cos kx⟩ = ⟨-cos kx, cos kx⟩.
/// Computed through the discrete L² pairing; equals -π for every mode and
/// multiplier, which is what makes each eigenvalue 1-transversal.
pub fn transversality_check(ps: &ProblemSpec, k: usize) -> Transversality {
    assert!(k >= 1 && k <= ps.n, "mode {k} outside 1..={}", ps.n);
    let phi = CosineField::mode(k, ps.n);
    let projection = l2_pairing(&phi.scale(-1.0), &phi);
    Transversality {
        projection,
        passes: projection.abs() > 1e-8,
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BifurcationDirection {
    pub lambda_dot: f64,
    pub lambda_ddot: f64,
}

/// Bifurcation direction at (σ_k, 0) for p = 2:
/// λ'(0) = 0 and λ''(0) = [2^{2s+1}𝔪(2k) - 3𝔪(k)] / [σ_k (2^{2s}𝔪(2k) - 𝔪(k))].
/// Positive under (M2), so every bifurcation is supercritical.
pub fn bifurcation_direction(ps: &ProblemSpec, k: usize) -> Result<BifurcationDirection> {
    if ps.p != 2.0 {
        return Err(Error::UnsupportedP { p: ps.p });
    }
    if k < 1 {
        return Err(Error::InvalidParameter("bifurcating modes start at k = 1".into()));
    }
    let spec = &ps.multiplier;
    let mk = spec.symbol(k as i64)?;
    let m2k = spec.symbol(2 * k as i64)?;
    let sigma_k = spec.operator_symbol(k as i64)?;
    let two_pow = (2.0f64).powf(2.0 * spec.s);
    let denom = two_pow * m2k - mk;
    if denom == 0.0 {
        return Err(Error::InvalidParameter(
            "degenerate direction denominator; multiplier violates (M2)".into(),
        ));
    }
    Ok(BifurcationDirection {
        lambda_dot: 0.0,
        lambda_ddot: (2.0 * two_pow * m2k - 3.0 * mk) / (sigma_k * denom),
    })
}

/// The corrector φ_k solving 𝓛φ - σ_k φ = 2cos²(kx) with the kernel
/// component pinned to zero:
/// φ_k = -1/σ_k + cos(2kx) / ((2k)^{2s}𝔪(2k) - σ_k).
pub fn corrector_phi(ps: &ProblemSpec, k: usize) -> Result<CosineField> {
    if ps.p != 2.0 {
        return Err(Error::UnsupportedP { p: ps.p });
    }
    if k < 1 || 2 * k > ps.n {
        return Err(Error::InvalidParameter(format!(
            "corrector needs 1 <= k and 2k <= N (k = {k}, N = {})",
            ps.n
        )));
    }
    let sigma_k = ps.multiplier.operator_symbol(k as i64)?;
    let sigma_2k = ps.multiplier.operator_symbol(2 * k as i64)?;
    let mut phi = CosineField::zeros(ps.n);
    phi.coeffs_mut()[0] = -1.0 / sigma_k;
    phi.coeffs_mut()[2 * k] = 1.0 / (sigma_2k - sigma_k);

    // defining equation, checked before returning
    let lhs = apply_l(&ps.multiplier, &phi)?.add_scaled(-sigma_k, &phi);
    let mut rhs = CosineField::zeros(ps.n);
    rhs.coeffs_mut()[0] = 1.0;
    rhs.coeffs_mut()[2 * k] = 1.0;
    let defect = field::norms(&lhs.add_scaled(-1.0, &rhs), ps.s()).l2;
    assert!(
        defect < 1e-12,
        "corrector defect {defect:.3e} for k = {k}"
    );
    Ok(phi)
}

/// Second-order local branch model at (σ_k, 0) for p = 2:
/// u ≈ s·cos(kx) + (s²/2)·φ_k,  λ ≈ σ_k + (1/2)λ''(0)·s².
/// Intended as a Newton starting point; useful for |s| up to about 0.3.
pub fn local_predictor(
    ps: &ProblemSpec,
    k: usize,
    amplitude: f64,
) -> Result<(f64, CosineField)> {
    if ps.p != 2.0 {
        return Err(Error::UnsupportedP { p: ps.p });
    }
    let dir = bifurcation_direction(ps, k)?;
    let sigma_k = ps.multiplier.operator_symbol(k as i64)?;
    if amplitude == 0.0 {
        return Ok((sigma_k, CosineField::zeros(ps.n)));
    }
    let phi = corrector_phi(ps, k)?;
    let u = CosineField::mode(k, ps.n)
        .scale(amplitude)
        .add_scaled(0.5 * amplitude * amplitude, &phi);
    let lambda = sigma_k + 0.5 * dir.lambda_ddot * amplitude * amplitude;
    Ok((lambda, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::jacobian_matrix;

    fn bo_problem(n: usize) -> ProblemSpec {
        ProblemSpec::new(MultiplierSpec::fractional(0.5), 2.0, n).unwrap()
    }

    #[test]
    fn trivial_spectrum_fractional() {
        let eig = trivial_spectrum(&MultiplierSpec::fractional(0.5), 4).unwrap();
        let sigmas: Vec<f64> = eig.iter().map(|e| e.sigma).collect();
        for (k, s) in sigmas.iter().enumerate() {
            assert!((s - k as f64).abs() < 1e-14);
        }
        let eig1 = trivial_spectrum(&MultiplierSpec::fractional(1.0), 3).unwrap();
        let expect = [0.0, 1.0, 4.0, 9.0];
        for (e, x) in eig1.iter().zip(expect) {
            assert!((e.sigma - x).abs() < 1e-13);
            assert_eq!(e.chi, 1);
        }
    }

    #[test]
    fn trivial_spectrum_ilw() {
        let eig = trivial_spectrum(&MultiplierSpec::ilw(0.5, 1.0), 1).unwrap();
        assert!((eig[1].sigma - 0.313035285499331).abs() < 1e-13);
    }

    #[test]
    fn trivial_spectrum_strictly_increasing() {
        for spec in [
            MultiplierSpec::fractional(0.5),
            MultiplierSpec::fractional(0.75),
            MultiplierSpec::ilw(0.5, 0.7),
        ] {
            let eig = trivial_spectrum(&spec, 12).unwrap();
            for w in eig.windows(2) {
                assert!(w[1].sigma > w[0].sigma);
            }
        }
    }

    #[test]
    fn constant_branch_spectrum_values() {
        let s = constant_branch_spectrum(&MultiplierSpec::fractional(0.5), 2.0, 3).unwrap();
        for (k, v) in s.iter().enumerate() {
            assert!((v + k as f64).abs() < 1e-14);
        }
        let s3 = constant_branch_spectrum(&MultiplierSpec::fractional(0.5), 3.0, 2).unwrap();
        assert!((s3[2] + 1.0).abs() < 1e-14);
        let ilw = constant_branch_spectrum(&MultiplierSpec::ilw(0.5, 1.0), 2.0, 1).unwrap();
        assert!((ilw[1] + 0.313035285499331).abs() < 1e-13);
        // strictly decreasing
        for w in s.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn transversality_is_minus_pi() {
        let ps = bo_problem(12);
        for k in [1, 5] {
            let t = transversality_check(&ps, k);
            assert!((t.projection + std::f64::consts::PI).abs() < 1e-13);
            assert!(t.passes);
        }
        // cross modes are orthogonal
        let a = CosineField::mode(2, 12).scale(-1.0);
        let b = CosineField::mode(3, 12);
        assert_eq!(l2_pairing(&a, &b), 0.0);
    }

    #[test]
    fn bifurcation_direction_values() {
        // closed-form substitutions: (s, k, value)
        let cases = [(0.5, 1, 1.0), (0.5, 2, 0.5), (1.0, 1, 5.0 / 3.0)];
        for (s, k, expected) in cases {
            let ps = ProblemSpec::new(MultiplierSpec::fractional(s), 2.0, 8).unwrap();
            let d = bifurcation_direction(&ps, k).unwrap();
            assert_eq!(d.lambda_dot, 0.0);
            assert!(
                (d.lambda_ddot - expected).abs() < 1e-13,
                "s={s}, k={k}: {} vs {expected}",
                d.lambda_ddot
            );
        }
    }

    #[test]
    fn bifurcation_direction_lower_bound() {
        // λ''(0) >= 1/σ_k > 0 under (M2)
        for spec in [
            MultiplierSpec::fractional(0.5),
            MultiplierSpec::fractional(1.0),
            MultiplierSpec::ilw(0.5, 1.0),
        ] {
            let ps = ProblemSpec::new(spec, 2.0, 32).unwrap();
            for k in 1..=8 {
                let d = bifurcation_direction(&ps, k).unwrap();
                let sigma = ps.multiplier.operator_symbol(k as i64).unwrap();
                assert!(d.lambda_ddot >= 1.0 / sigma - 1e-14);
            }
        }
    }

    #[test]
    fn bifurcation_direction_rejects_p3() {
        let ps = ProblemSpec::new(MultiplierSpec::fractional(0.5), 3.0, 8).unwrap();
        assert!(matches!(
            bifurcation_direction(&ps, 1),
            Err(Error::UnsupportedP { .. })
        ));
    }

    #[test]
    fn corrector_phi_closed_forms() {
        let ps = bo_problem(8);
        let phi = corrector_phi(&ps, 1).unwrap();
        assert!((phi.coeff(0) + 1.0).abs() < 1e-13);
        assert!((phi.coeff(2) - 1.0).abs() < 1e-13);
        assert_eq!(phi.coeff(1), 0.0);

        let ps1 = ProblemSpec::new(MultiplierSpec::fractional(1.0), 2.0, 8).unwrap();
        let phi1 = corrector_phi(&ps1, 1).unwrap();
        assert!((phi1.coeff(0) + 1.0).abs() < 1e-13);
        assert!((phi1.coeff(2) - 1.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn local_predictor_second_order() {
        let ps = bo_problem(8);
        let (lambda, u) = local_predictor(&ps, 1, 0.2).unwrap();
        assert!((lambda - 1.02).abs() < 1e-13);
        assert!((u.coeff(0) + 0.02).abs() < 1e-13);
        assert!((u.coeff(1) - 0.2).abs() < 1e-13);
        assert!((u.coeff(2) - 0.02).abs() < 1e-13);
    }

    #[test]
    fn local_predictor_edge_cases() {
        let ps = bo_problem(8);
        let (lambda, u) = local_predictor(&ps, 2, 0.0).unwrap();
        assert_eq!(lambda, 2.0);
        assert!(u.coeffs().iter().all(|v| *v == 0.0));
        // λ even in the amplitude since λ'(0) = 0
        let (lp, _) = local_predictor(&ps, 1, 0.2).unwrap();
        let (lm, _) = local_predictor(&ps, 1, -0.2).unwrap();
        assert_eq!(lp, lm);
    }

    #[test]
    fn simple_kernel_at_each_eigenvalue() {
        for spec in [MultiplierSpec::fractional(0.5), MultiplierSpec::ilw(0.75, 1.0)] {
            let ps = ProblemSpec::new(spec, 2.0, 12).unwrap();
            for k in 1..=5usize {
                let sigma = ps.multiplier.operator_symbol(k as i64).unwrap();
                let mat = jacobian_matrix(&ps, sigma, &CosineField::zeros(12)).unwrap();
                let mut svs: Vec<f64> = mat.singular_values().iter().copied().collect();
                svs.sort_by(f64::total_cmp);
                assert!(svs[0] < 1e-10, "kernel should be present at sigma_{k}");
                assert!(svs[1] > 1e-3, "eigenvalue sigma_{k} should be simple");
            }
        }
    }
}
