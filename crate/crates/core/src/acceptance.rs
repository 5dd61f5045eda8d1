//! End-to-end verification suite. Each criterion is a standalone runner so
//! the `verify` CLI subcommand and the acceptance test target execute exactly
//! the same checks with the same pinned tolerances.

use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundConstants};
use crate::continuation::{
    branch_switch, constant_solution, continue_branch, detect_events, make_point, scale_t_k,
    symmetry_t, BranchOrigin, ContinuationConfig, EventKind,
};
use crate::error::Result;
use crate::evolve::{self, ComplexField};
use crate::field::{norms, to_grid, CosineField};
use crate::multiplier::MultiplierSpec;
use crate::operator::{
    jacobian_apply, newton_solve, residual, second_derivative, third_derivative, ProblemSpec,
};
use crate::oracle_bo::{bo_negative, bo_positive, bo_positive_coeffs, BranchSign};
use crate::spectrum::{bifurcation_direction, local_predictor, trivial_spectrum};

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    fn pass(id: usize, name: &str, detail: String) -> Self {
        Self {
            id,
            name: name.into(),
            passed: true,
            detail,
        }
    }

    fn fail(id: usize, name: &str, detail: String) -> Self {
        Self {
            id,
            name: name.into(),
            passed: false,
            detail,
        }
    }
}

fn outcome(id: usize, name: &str, result: Result<(bool, String)>) -> CriterionResult {
    match result {
        Ok((true, detail)) => CriterionResult::pass(id, name, detail),
        Ok((false, detail)) => CriterionResult::fail(id, name, detail),
        Err(e) => CriterionResult::fail(id, name, format!("error: {e}")),
    }
}

fn bo_spec() -> MultiplierSpec {
    MultiplierSpec::fractional(0.5)
}

fn linf_diff(a: &CosineField, b: &CosineField, grid: usize) -> f64 {
    let d = a.add_scaled(-1.0, &b.resized(a.truncation().max(b.truncation())));
    to_grid(&d.resized(d.truncation()), grid.max(2 * d.truncation() + 1))
        .map(|g| g.values().iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .unwrap_or(f64::INFINITY)
}

/// Criterion 1: exact trivial spectrum k^{2s} for 𝔪 ≡ 1 and singular-value
/// scans that relocate every σ_k, k ≤ 10, to |Δλ| ≤ 1e-6 after refinement.
pub fn criterion_spectrum_exactness() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let mut worst_exact = 0.0f64;
        let mut worst_located = 0.0f64;
        for s in [0.5, 0.75, 1.0] {
            let spec = MultiplierSpec::fractional(s);
            let eig = trivial_spectrum(&spec, 10)?;
            for e in &eig {
                let expect = (e.k as f64).powf(2.0 * s);
                let scale = expect.max(1.0);
                worst_exact = worst_exact.max((e.sigma - expect).abs() / scale);
            }
            let ps = ProblemSpec::new(spec, 2.0, 16)?;
            let sigma10 = eig[10].sigma;
            let sigma9 = eig[9].sigma;
            let start = make_point(&ps, 0.5, &CosineField::zeros(16), 0.0)?;
            let cfg = ContinuationConfig {
                ds0: 0.05,
                ds_max: 0.05,
                target_lambda: Some(sigma10 + 0.5 * (sigma10 - sigma9)),
                max_steps: 2500,
                ..Default::default()
            };
            let branch = continue_branch(&ps, &start, 1.0, &cfg, BranchOrigin::Manual)?;
            let events = detect_events(&ps, &branch)?;
            for e in &eig[1..] {
                let found = events
                    .iter()
                    .filter(|ev| ev.kind == EventKind::BranchPoint)
                    .map(|ev| (ev.lambda - e.sigma).abs())
                    .fold(f64::INFINITY, f64::min);
                worst_located = worst_located.max(found);
            }
        }
        let ok = worst_exact <= 1e-14 && worst_located <= 1e-6;
        Ok((
            ok,
            format!(
                "max rel spectrum error {worst_exact:.2e} (tol 1e-14), \
                 max |Δλ| after refinement {worst_located:.2e} (tol 1e-6)"
            ),
        ))
    };
    outcome(1, "spectrum exactness and singular-value scan", run())
}

/// Criterion 2: closed-form profiles of both families have residual below
/// 1e-9 at N = 256.
pub fn criterion_oracle_residuals(n: usize) -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        if n < 64 {
            return Ok((
                false,
                format!("truncation N = {n} is too coarse to resolve the closed forms (need >= 64; GridTooCoarse)"),
            ));
        }
        let ps = ProblemSpec::new(bo_spec(), 2.0, n)?;
        let mut worst = 0.0f64;
        for lambda in [-5.0, -2.0, -1.5] {
            for sign in [BranchSign::Plus, BranchSign::Minus] {
                let u = bo_negative(lambda, sign, n)?;
                worst = worst.max(norms(&residual(&ps, lambda, &u)?, 0.5).l2);
            }
        }
        for (k, lambda) in [(1usize, 1.5), (1, 2.0), (1, 5.0), (2, 3.0), (3, 4.0)] {
            for sign in [BranchSign::Plus, BranchSign::Minus] {
                let u = bo_positive(k, lambda, sign, n)?;
                worst = worst.max(norms(&residual(&ps, lambda, &u)?, 0.5).l2);
            }
        }
        Ok((
            worst < 1e-9,
            format!("worst oracle residual {worst:.2e} (tol 1e-9) at N = {n}"),
        ))
    };
    outcome(2, "oracle residuals", run())
}

/// Criterion 3: Newton from the second-order predictor lands on the exact
/// branch in at most 8 iterations, and the continued branch to λ = 3 stays
/// within 1e-6 of the closed form pointwise.
pub fn criterion_local_to_global() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let n = 128;
        let ps = ProblemSpec::new(bo_spec(), 2.0, n)?;
        let (lambda0, u0) = local_predictor(&ps, 1, 0.2)?;
        let newton = newton_solve(&ps, lambda0, &u0, 1e-10, 20)?;
        let oracle0 = bo_positive(1, lambda0, BranchSign::Minus, n)?;
        let newton_err = linf_diff(&newton.u, &oracle0, 1024);
        let iters_ok = newton.iterations <= 8;

        let start = make_point(&ps, lambda0, &newton.u, 0.0)?;
        let cfg = ContinuationConfig {
            ds0: 0.02,
            ds_max: 0.08,
            target_lambda: Some(3.0),
            max_steps: 400,
            ..Default::default()
        };
        let branch = continue_branch(&ps, &start, 1.0, &cfg, BranchOrigin::TrivialMode(1))?;
        let mut worst_resid = 0.0f64;
        let mut worst_dist = 0.0f64;
        for p in &branch.points {
            worst_resid = worst_resid.max(p.residual_l2);
            let oracle = bo_positive(1, p.lambda, BranchSign::Minus, n)?;
            worst_dist = worst_dist.max(linf_diff(&p.u, &oracle, 1024));
        }
        let reached = branch
            .points
            .last()
            .map(|p| (p.lambda - 3.0).abs() < 1e-6)
            .unwrap_or(false);
        let ok = iters_ok && newton_err < 1e-6 && worst_resid < 1e-8 && worst_dist < 1e-6 && reached;
        Ok((
            ok,
            format!(
                "newton iters {} (<=8), predictor->oracle linf {newton_err:.2e} (tol 1e-6), \
                 branch residual max {worst_resid:.2e} (tol 1e-8), branch->oracle linf max \
                 {worst_dist:.2e} (tol 1e-6), reached λ=3: {reached}",
                newton.iterations
            ),
        ))
    };
    outcome(3, "local-to-global agreement", run())
}

fn fit_quadratic(points: &[(f64, f64)]) -> (f64, f64) {
    // least squares for lambda = c0 + c1 * a^2
    let n = points.len() as f64;
    let (mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(a, lambda) in points {
        let x = a * a;
        sx += x;
        sxx += x * x;
        sy += lambda;
        sxy += x * lambda;
    }
    let det = n * sxx - sx * sx;
    let c1 = (n * sxy - sx * sy) / det;
    let c0 = (sy - c1 * sx) / n;
    (c0, c1)
}

/// Criterion 4: the quadratic fit of λ against the leading amplitude on the
/// computed branch reproduces λ''(0) within 5% for (s, k) in
/// {(1/2,1), (1/2,2), (1,1)}; the BO case is confirmed against the exact
/// parametrisation λ = coth β, amplitude = 2e^{-β}.
pub fn criterion_bifurcation_direction() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let cases = [(0.5, 1usize), (0.5, 2), (1.0, 1)];
        let mut details = Vec::new();
        let mut all_ok = true;
        for (s, k) in cases {
            let ps = ProblemSpec::new(MultiplierSpec::fractional(s), 2.0, 64)?;
            let exact = bifurcation_direction(&ps, k)?.lambda_ddot;
            let sigma = ps.multiplier.operator_symbol(k as i64)?;
            let cfg = ContinuationConfig {
                ds0: 0.01,
                ds_max: 0.02,
                target_lambda: Some(sigma + 0.62 * exact * 0.15 * 0.15),
                max_steps: 600,
                ..Default::default()
            };
            let start = branch_switch(&ps, k, 0.04, &cfg)?;
            let branch = continue_branch(&ps, &start, 1.0, &cfg, BranchOrigin::TrivialMode(k))?;
            let pts: Vec<(f64, f64)> = branch
                .points
                .iter()
                .filter(|p| {
                    let a = p.u.coeff(k).abs();
                    (0.02..=0.155).contains(&a)
                })
                .map(|p| (p.u.coeff(k), p.lambda))
                .collect();
            if pts.len() < 6 {
                all_ok = false;
                details.push(format!("(s={s}, k={k}): only {} fit points", pts.len()));
                continue;
            }
            let (_, c1) = fit_quadratic(&pts);
            let fitted = 2.0 * c1;
            let rel = (fitted - exact).abs() / exact;
            all_ok &= rel <= 0.05;
            details.push(format!(
                "(s={s}, k={k}): fitted λ''={fitted:.4} vs exact {exact:.4} (rel {rel:.3})"
            ));
            if s == 0.5 && k == 1 {
                all_ok &= (fitted - 1.0).abs() <= 0.05;
                // independent confirmation from λ = coth β, amplitude = 2e^{-β}
                let exact_pts: Vec<(f64, f64)> = (0..20)
                    .map(|i| {
                        let a = 0.02 + (0.15 - 0.02) * i as f64 / 19.0;
                        let q = 0.25 * a * a;
                        (a, (1.0 + q) / (1.0 - q))
                    })
                    .collect();
                let (_, c1x) = fit_quadratic(&exact_pts);
                let confirmed = 2.0 * c1x;
                all_ok &= (confirmed - 1.0).abs() <= 0.05;
                details.push(format!("BO exact-relation fit λ''={confirmed:.4}"));
            }
        }
        Ok((all_ok, details.join("; ")))
    };
    outcome(4, "bifurcation direction", run())
}

/// Criterion 5: T is an involution to 1e-12, maps the negative-λ closed
/// forms to residual < 1e-9 solutions at -λ, and T_2 of the k = 1 branch is
/// the k = 2 closed form coefficient-wise to 1e-10.
pub fn criterion_symmetry_scaling() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let n = 128;
        let ps = ProblemSpec::new(bo_spec(), 2.0, n)?;
        let mut ok = true;
        let mut details = Vec::new();

        // involution
        let base = make_point(&ps, -2.0, &bo_negative(-2.0, BranchSign::Plus, n)?, 0.0)?;
        let twice = symmetry_t(&ps, &symmetry_t(&ps, &base)?)?;
        let mut inv_err: f64 = (twice.lambda - base.lambda).abs();
        for i in 0..=n {
            inv_err = inv_err.max((twice.u.coeff(i) - base.u.coeff(i)).abs());
        }
        ok &= inv_err <= 1e-12;
        details.push(format!("T∘T defect {inv_err:.2e} (tol 1e-12)"));

        // mapping the negative family
        let mut worst_mapped = 0.0f64;
        for lambda in [-5.0, -2.0, -1.5] {
            for sign in [BranchSign::Plus, BranchSign::Minus] {
                let pt = make_point(&ps, lambda, &bo_negative(lambda, sign, n)?, 0.0)?;
                let mapped = symmetry_t(&ps, &pt)?;
                worst_mapped = worst_mapped.max(mapped.residual_l2);
            }
        }
        ok &= worst_mapped < 1e-9;
        details.push(format!("T-image residual max {worst_mapped:.2e} (tol 1e-9)"));

        // scaling the k = 1 branch onto the k = 2 family
        let mut worst_scaled = 0.0f64;
        for lambda in [1.5, 2.0, 2.5] {
            let pt = make_point(&ps, lambda, &bo_positive(1, lambda, BranchSign::Minus, n)?, 0.0)?;
            let (_, mapped) = scale_t_k(&ps, &pt, 2, 2 * n)?;
            let expect = bo_positive_coeffs(2, 2.0 * lambda, BranchSign::Minus, 2 * n)?;
            for i in 0..=2 * n {
                worst_scaled = worst_scaled.max((mapped.u.coeff(i) - expect[i]).abs());
            }
        }
        ok &= worst_scaled <= 1e-10;
        details.push(format!(
            "T_2 vs closed form coefficient defect {worst_scaled:.2e} (tol 1e-10)"
        ));
        Ok((ok, details.join("; ")))
    };
    outcome(5, "symmetry and scaling", run())
}

/// Criterion 6: the L² bound and L^∞ chain hold on every well-converged
/// branch point, the constant branch saturates the L² bound to 1e-10, the
/// Φ_ρ root is tight, and both asymptotic ratios sit within 2% at |λ| = 1e6.
pub fn criterion_bounds() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let bc = BoundConstants::default();
        let mut ok = true;
        let mut details = Vec::new();

        // branch samples: oscillatory branch + constant branch
        let ps = ProblemSpec::new(bo_spec(), 2.0, 64)?;
        let cfg = ContinuationConfig {
            target_lambda: Some(2.5),
            ..Default::default()
        };
        let start = branch_switch(&ps, 1, 0.2, &cfg)?;
        let osc = continue_branch(&ps, &start, 1.0, &cfg, BranchOrigin::TrivialMode(1))?;
        let psc = ProblemSpec::new(bo_spec(), 2.0, 16)?;
        let cstart = make_point(&psc, 0.5, &constant_solution(2.0, 0.5, 16)?, 0.0)?;
        let ccfg = ContinuationConfig {
            target_lambda: Some(3.0),
            ..Default::default()
        };
        let con = continue_branch(&psc, &cstart, 1.0, &ccfg, BranchOrigin::Constant)?;
        let mut checked = 0usize;
        for (prob, branch) in [(&ps, &osc), (&psc, &con)] {
            for p in &branch.points {
                if p.residual_l2 < 1e-8 {
                    checked += 1;
                    let report = bounds::check_point(prob, None, p);
                    for e in &report.entries {
                        if matches!(e.name.as_str(), "l2" | "linf_chain") && !e.passes {
                            ok = false;
                            details.push(format!(
                                "{} bound failed at λ={}: {} > {}",
                                e.name, p.lambda, e.measured, e.bound
                            ));
                        }
                    }
                }
            }
        }
        details.push(format!("L²/L∞-chain bounds hold on {checked} branch points"));

        // constant branch saturation
        let cpt = make_point(&psc, 3.0, &constant_solution(2.0, 3.0, 16)?, 0.0)?;
        let gap = (cpt.norms.l2 - bounds::l2_bound(2.0, 3.0)).abs();
        ok &= gap <= 1e-10;
        details.push(format!("constant-branch L² saturation gap {gap:.2e} (tol 1e-10)"));

        // phi root quality and asymptotics
        let mut worst_defect = 0.0f64;
        for lambda in [0.5, 3.0, 100.0, 1e6] {
            worst_defect = worst_defect.max(bounds::phi_root_defect(&ps, &bc, lambda)?);
            let phi = bounds::phi_rho(&ps, &bc, lambda)?;
            if bounds::phi_poly_eval(&ps, &bc, lambda, 0.5 * phi)? >= 0.0 {
                ok = false;
                details.push(format!("interiority failed at λ={lambda}"));
            }
        }
        ok &= worst_defect < 1e-10;
        details.push(format!("Φ root defect max {worst_defect:.2e} (tol 1e-10)"));

        let (pc, pe) = bounds::phi_asymptote(&ps, &bc)?;
        let phi_ratio = bounds::phi_rho(&ps, &bc, 1e6)? / (pc * 1e6f64.powf(pe));
        let (qc, qe) = bounds::psi_asymptote(&ps, &bc)?;
        let psi_ratio = bounds::psi_rho(&ps, &bc, 1e6)? / (qc * 1e6f64.powf(qe));
        ok &= (phi_ratio - 1.0).abs() <= 0.02 && (psi_ratio - 1.0).abs() <= 0.02;
        details.push(format!(
            "asymptotic ratios Φ {phi_ratio:.4}, Ψ {psi_ratio:.4} (tol 2%)"
        ));
        Ok((ok, details.join("; ")))
    };
    outcome(6, "a-priori bounds", run())
}

/// Criterion 7: the Jacobian along the constant branch u ≡ -λ (p = 2)
/// collapses at λ = -k^{2s}𝔪(k)/(p-1) for k ≤ 3, located to |Δλ| ≤ 1e-6.
pub fn criterion_constant_branch_spectrum() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let ps = ProblemSpec::new(bo_spec(), 2.0, 16)?;
        let start = make_point(&ps, -0.5, &constant_solution(2.0, -0.5, 16)?, 0.0)?;
        let cfg = ContinuationConfig {
            ds0: 0.05,
            ds_max: 0.05,
            target_lambda: Some(-3.6),
            max_steps: 400,
            ..Default::default()
        };
        let branch = continue_branch(&ps, &start, -1.0, &cfg, BranchOrigin::Constant)?;
        let events = detect_events(&ps, &branch)?;
        let bps: Vec<f64> = events
            .iter()
            .filter(|e| e.kind == EventKind::BranchPoint)
            .map(|e| e.lambda)
            .collect();
        let mut worst = 0.0f64;
        for expected in [-1.0, -2.0, -3.0] {
            let best = bps
                .iter()
                .map(|l| (l - expected).abs())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(best);
        }
        Ok((
            worst <= 1e-6 && bps.len() == 3,
            format!(
                "{} events found, max |Δλ| to {{-1,-2,-3}} is {worst:.2e} (tol 1e-6)",
                bps.len()
            ),
        ))
    };
    outcome(7, "constant-branch spectrum", run())
}

/// Deterministic pseudo-random stream (SplitMix64) so the derivative sweep
/// is reproducible without extra dependencies.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// uniform in (-1, 1)
    fn sym(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    }
}

fn random_field(rng: &mut SplitMix64, n: usize, s: f64, target_h2s: f64) -> CosineField {
    let a: Vec<f64> = (0..=n)
        .map(|k| rng.sym() * (0.7f64).powi(k as i32))
        .collect();
    let u = CosineField::from_coeffs(a).unwrap();
    let h2s = norms(&u, s).h_2s.max(1e-12);
    u.scale(target_h2s / h2s)
}

fn rel_coeff_error(got: &CosineField, expect: &CosineField) -> f64 {
    let diff = got.add_scaled(-1.0, expect).coeff_l2();
    diff / expect.coeff_l2().max(1e-10)
}

/// Criterion 8: each derivative matches central finite differences of the
/// next-lower derivative to relative 1e-5 on 20 random instances with
/// p ∈ {2, 3, 4} (second/third derivatives on the p where the regularity
/// class provides them; p = 3 must report RegularityUnavailable).
pub fn criterion_derivatives() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let mut rng = SplitMix64(0x5EED_CAFE);
        let n = 24;
        let h = 1e-5;
        let mut worst_j = 0.0f64;
        let mut worst_d2 = 0.0f64;
        let mut worst_d3 = 0.0f64;
        let mut gate_ok = true;
        for i in 0..20 {
            let p = [2.0, 3.0, 4.0][i % 3];
            let ps = ProblemSpec::new(MultiplierSpec::fractional(0.75), p, n)?;
            let s = ps.s();
            let size = 0.2 + 0.8 * (0.5 * (rng.sym() + 1.0));
            let u = random_field(&mut rng, n, s, size);
            let v1 = random_field(&mut rng, n, s, 0.5);
            let v2 = random_field(&mut rng, n, s, 0.5);
            let v3 = random_field(&mut rng, n, s, 0.5);
            let lambda = 2.0 * rng.sym() + 1.0;

            // J[v] vs central differences of F
            let fd = residual(&ps, lambda, &u.add_scaled(h, &v1))?
                .add_scaled(-1.0, &residual(&ps, lambda, &u.add_scaled(-h, &v1))?)
                .scale(0.5 / h);
            let jv = jacobian_apply(&ps, lambda, &u, &v1)?;
            worst_j = worst_j.max(rel_coeff_error(&fd, &jv));

            // D²[v1, v2] vs central differences of J
            match second_derivative(&ps, &u, &v1, &v2) {
                Ok(d2) => {
                    let fd2 = jacobian_apply(&ps, lambda, &u.add_scaled(h, &v2), &v1)?
                        .add_scaled(-1.0, &jacobian_apply(&ps, lambda, &u.add_scaled(-h, &v2), &v1)?)
                        .scale(0.5 / h);
                    worst_d2 = worst_d2.max(rel_coeff_error(&fd2, &d2));
                }
                Err(_) => gate_ok &= p == 3.0,
            }

            // D³[v1, v2, v3] vs central differences of D²
            match third_derivative(&ps, &u, &v1, &v2, &v3) {
                Ok(d3) => {
                    let fd3 = second_derivative(&ps, &u.add_scaled(h, &v3), &v1, &v2)?
                        .add_scaled(-1.0, &second_derivative(&ps, &u.add_scaled(-h, &v3), &v1, &v2)?)
                        .scale(0.5 / h);
                    if d3.coeff_l2() == 0.0 {
                        // p = 2: the third derivative vanishes identically
                        worst_d3 = worst_d3.max(fd3.coeff_l2());
                    } else {
                        worst_d3 = worst_d3.max(rel_coeff_error(&fd3, &d3));
                    }
                }
                Err(_) => gate_ok &= p == 3.0,
            }
        }
        let ok = worst_j < 1e-5 && worst_d2 < 1e-5 && worst_d3 < 1e-5 && gate_ok;
        Ok((
            ok,
            format!(
                "max rel FD error: J {worst_j:.2e}, D² {worst_d2:.2e}, D³ {worst_d3:.2e} \
                 (tol 1e-5); p=3 regularity gate honored: {gate_ok}"
            ),
        ))
    };
    outcome(8, "derivative correctness", run())
}

/// Criterion 9: the BO soliton is transported as an exact shift with
/// c = -λ: L^∞ deviation < 1e-4 at t = 1 and N = 256, mass conserved
/// exactly, momentum to 1e-8 relative, observed RK order within [3.5, 4.5].
pub fn criterion_traveling_wave(n: usize) -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        if n < 64 {
            return Ok((
                false,
                format!("truncation N = {n} too coarse for the soliton run (need >= 64; GridTooCoarse)"),
            ));
        }
        let spec = bo_spec();
        let profile = bo_positive(1, 2.0, BranchSign::Minus, n)?;
        let dt = 5e-4;
        let deviation = evolve::traveling_wave_check(&spec, &profile, 2.0, 1.0, dt)?;

        let u0 = ComplexField::from_cosine(&profile);
        let u1 = evolve::evolve(&spec, &u0, dt, 1.0)?;
        let q0 = evolve::conserved_quantities(&u0);
        let q1 = evolve::conserved_quantities(&u1);
        let mass_exact = q1.mass == q0.mass;
        let mom_rel = (q1.momentum - q0.momentum).abs() / q0.momentum.abs();

        // convergence order on a coarser, stability-safe pair of steps
        let profile64 = bo_positive(1, 2.0, BranchSign::Minus, 64)?;
        let d1 = evolve::traveling_wave_check(&spec, &profile64, 2.0, 0.5, 8e-3)?;
        let d2 = evolve::traveling_wave_check(&spec, &profile64, 2.0, 0.5, 4e-3)?;
        let order = (d1 / d2).log2();

        let ok = deviation < 1e-4
            && mass_exact
            && mom_rel < 1e-8
            && (3.5..=4.5).contains(&order);
        Ok((
            ok,
            format!(
                "shift deviation {deviation:.2e} (tol 1e-4), mass exact: {mass_exact}, \
                 momentum drift {mom_rel:.2e} (tol 1e-8), observed order {order:.2} \
                 (window [3.5, 4.5])"
            ),
        ))
    };
    outcome(9, "traveling waves", run())
}

/// Criterion 10: the abstract global alternative and the existence theorems
/// are theory, not algorithms; what is reproducible at desk scale is the
/// constructive side — a non-constant branch actually traced across the whole
/// window (𝔪(1), 2^{2s}𝔪(2)) for both the fractional and the ILW model.
pub fn criterion_branch_existence_window() -> CriterionResult {
    let run = || -> Result<(bool, String)> {
        let mut ok = true;
        let mut details = Vec::new();
        for (label, spec) in [
            ("fractional", bo_spec()),
            ("ilw(delta=1)", MultiplierSpec::ilw(0.5, 1.0)),
        ] {
            let ps = ProblemSpec::new(spec, 2.0, 64)?;
            let sigma1 = ps.multiplier.operator_symbol(1)?;
            let sigma2 = ps.multiplier.operator_symbol(2)?;
            let cfg = ContinuationConfig {
                ds0: 0.01,
                ds_max: 0.05,
                target_lambda: Some(sigma2),
                max_steps: 600,
                ..Default::default()
            };
            let start = branch_switch(&ps, 1, 0.08, &cfg)?;
            let branch = continue_branch(&ps, &start, 1.0, &cfg, BranchOrigin::TrivialMode(1))?;
            let lo = branch.points.first().map(|p| p.lambda).unwrap_or(f64::NAN);
            let hi = branch.points.last().map(|p| p.lambda).unwrap_or(f64::NAN);
            let all_converged = branch.points.iter().all(|p| p.residual_l2 < 1e-8);
            let non_constant = branch.points.iter().all(|p| p.u.coeff(1).abs() > 1e-3);
            let spans = lo < sigma1 + 0.2 * (sigma2 - sigma1) && (hi - sigma2).abs() < 1e-6;
            ok &= all_converged && non_constant && spans;
            details.push(format!(
                "{label}: branch over λ ∈ [{lo:.4}, {hi:.4}] covering (σ1, σ2) = \
                 ({sigma1:.4}, {sigma2:.4}), {} points, residuals ok: {all_converged}",
                branch.points.len()
            ));
        }
        Ok((ok, details.join("; ")))
    };
    outcome(
        10,
        "branch existence across (m(1), 2^{2s}m(2)) — constructive only",
        run(),
    )
}

/// Run the whole suite. `n` is the oracle truncation (256 in the reference
/// configuration); resolution-dependent checks fail with a diagnostic when
/// it is set too low.
pub fn run_all(n: usize) -> Vec<CriterionResult> {
    vec![
        criterion_spectrum_exactness(),
        criterion_oracle_residuals(n),
        criterion_local_to_global(),
        criterion_bifurcation_direction(),
        criterion_symmetry_scaling(),
        criterion_bounds(),
        criterion_constant_branch_spectrum(),
        criterion_derivatives(),
        criterion_traveling_wave(n),
        criterion_branch_existence_window(),
    ]
}
