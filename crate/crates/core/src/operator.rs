//! The nonlinear operator F(λ, u) = 𝓛u - λu - |u|^p, its first three
//! u-derivatives, the Galerkin Jacobian matrix, and a damped Newton solver.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{
    self, apply_l, dealias_size, next_fast_size, nonlinearity, to_grid, CosineField, GridSamples,
};
use crate::multiplier::MultiplierSpec;

/// Differentiability order of x ↦ |x|^p: floor(p) for non-integer p,
/// p - 1 for odd p, unbounded for even p.
pub fn omega(p: f64) -> f64 {
    if p.fract() != 0.0 {
        p.floor()
    } else if (p as i64) % 2 == 1 {
        p - 1.0
    } else {
        f64::INFINITY
    }
}

/// Discretisation of one problem instance: the multiplier, the power p and
/// the Galerkin truncation together with its dealiasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub multiplier: MultiplierSpec,
    pub p: f64,
    pub n: usize,
    pub m: usize,
}

impl ProblemSpec {
    /// Standard construction: the grid size is the smallest fast FFT length
    /// above the dealiasing threshold for |u|^p.
    pub fn new(multiplier: MultiplierSpec, p: f64, n: usize) -> Result<Self> {
        let m = next_fast_size(dealias_size(n, p));
        Self::with_grid(multiplier, p, n, m)
    }

    pub fn with_grid(multiplier: MultiplierSpec, p: f64, n: usize, m: usize) -> Result<Self> {
        if !(p >= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "the analysis assumes p >= 2 (got {p})"
            )));
        }
        if !(multiplier.s >= 0.5) {
            return Err(Error::InvalidParameter(format!(
                "the analysis assumes s >= 1/2 (got {})",
                multiplier.s
            )));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("truncation N must be >= 1".into()));
        }
        let required = dealias_size(n, p);
        if m < required {
            return Err(Error::GridTooCoarse { m, required });
        }
        Ok(Self {
            multiplier,
            p,
            n,
            m,
        })
    }

    pub fn s(&self) -> f64 {
        self.multiplier.s
    }

    /// Same problem at a different truncation (grid re-derived).
    pub fn resized(&self, n: usize) -> Result<Self> {
        Self::new(self.multiplier.clone(), self.p, n)
    }

    fn check_truncation(&self, u: &CosineField) -> Result<()> {
        if u.truncation() != self.n {
            return Err(Error::TruncationMismatch {
                expected: self.n,
                got: u.truncation(),
            });
        }
        Ok(())
    }
}

/// F(λ, u) = 𝓛u - λu - |u|^p, projected onto the first N+1 cosine modes.
pub fn residual(ps: &ProblemSpec, lambda: f64, u: &CosineField) -> Result<CosineField> {
    ps.check_truncation(u)?;
    let lu = apply_l(&ps.multiplier, u)?;
    let nl = nonlinearity(u, ps.p, false, ps.m)?;
    let mut out = lu;
    for k in 0..=ps.n {
        out.coeffs_mut()[k] -= lambda * u.coeff(k) + nl.coeff(k);
    }
    Ok(out)
}

/// Grid samples of the Jacobian weight p·u|u|^{p-2} = p·sign(u)|u|^{p-1}.
fn jacobian_weight(ps: &ProblemSpec, u: &CosineField) -> Result<GridSamples> {
    let g = to_grid(u, ps.m)?;
    let w: Vec<f64> = g
        .values()
        .iter()
        .map(|&x| {
            let base = if ps.p == 2.0 {
                x
            } else {
                x.signum() * x.abs().powf(ps.p - 1.0)
            };
            ps.p * base
        })
        .collect();
    Ok(GridSamples::new(w))
}

/// ∂_u F(λ, u)[v] = 𝓛v - λv - p·u|u|^{p-2}·v.
pub fn jacobian_apply(
    ps: &ProblemSpec,
    lambda: f64,
    u: &CosineField,
    v: &CosineField,
) -> Result<CosineField> {
    ps.check_truncation(u)?;
    ps.check_truncation(v)?;
    let w = jacobian_weight(ps, u)?;
    jacobian_apply_with_weight(ps, lambda, &w, v)
}

fn jacobian_apply_with_weight(
    ps: &ProblemSpec,
    lambda: f64,
    w: &GridSamples,
    v: &CosineField,
) -> Result<CosineField> {
    let lv = apply_l(&ps.multiplier, v)?;
    let wv = field::project_product(w, v, ps.n)?;
    let mut out = lv;
    for k in 0..=ps.n {
        out.coeffs_mut()[k] -= lambda * v.coeff(k) + wv.coeff(k);
    }
    Ok(out)
}

/// True when ∂²_{uu}F exists for this p: everywhere for p = 2 (where it is
/// -2 v1 v2) and for p > 3; the window 2 < p <= 3 only has one derivative.
fn second_derivative_available(p: f64) -> bool {
    p == 2.0 || p > 3.0
}

/// True when ∂³_{uuu}F exists: p = 2 (identically zero) or p >= 4.
fn third_derivative_available(p: f64) -> bool {
    p == 2.0 || p >= 4.0
}

/// ∂²_{uu}F(λ, u)[v1, v2] = -p(p-1)|u|^{p-2} v1 v2.
pub fn second_derivative(
    ps: &ProblemSpec,
    u: &CosineField,
    v1: &CosineField,
    v2: &CosineField,
) -> Result<CosineField> {
    if !second_derivative_available(ps.p) {
        return Err(Error::RegularityUnavailable { order: 2, p: ps.p });
    }
    ps.check_truncation(u)?;
    ps.check_truncation(v1)?;
    ps.check_truncation(v2)?;
    let g1 = to_grid(v1, ps.m)?;
    let g2 = to_grid(v2, ps.m)?;
    let gu = to_grid(u, ps.m)?;
    let c = -ps.p * (ps.p - 1.0);
    let vals: Vec<f64> = (0..ps.m)
        .map(|j| {
            let factor = if ps.p == 2.0 {
                1.0
            } else {
                gu.values()[j].abs().powf(ps.p - 2.0)
            };
            c * factor * g1.values()[j] * g2.values()[j]
        })
        .collect();
    Ok(field::from_grid(&GridSamples::new(vals), ps.n))
}

/// ∂³_{uuu}F(λ, u)[v1, v2, v3] = -p(p-1)(p-2) u|u|^{p-4} v1 v2 v3
/// (identically zero for p = 2).
pub fn third_derivative(
    ps: &ProblemSpec,
    u: &CosineField,
    v1: &CosineField,
    v2: &CosineField,
    v3: &CosineField,
) -> Result<CosineField> {
    if !third_derivative_available(ps.p) {
        return Err(Error::RegularityUnavailable { order: 3, p: ps.p });
    }
    ps.check_truncation(u)?;
    if ps.p == 2.0 {
        return Ok(CosineField::zeros(ps.n));
    }
    ps.check_truncation(v1)?;
    ps.check_truncation(v2)?;
    ps.check_truncation(v3)?;
    let g1 = to_grid(v1, ps.m)?;
    let g2 = to_grid(v2, ps.m)?;
    let g3 = to_grid(v3, ps.m)?;
    let gu = to_grid(u, ps.m)?;
    let c = -ps.p * (ps.p - 1.0) * (ps.p - 2.0);
    let vals: Vec<f64> = (0..ps.m)
        .map(|j| {
            let x = gu.values()[j];
            // u|u|^{p-4} = sign(u)|u|^{p-3}, continuous for p >= 4 (p=4: sign*|.|^1... exactly x^? )
            let factor = if ps.p == 4.0 {
                x
            } else {
                x.signum() * x.abs().powf(ps.p - 3.0)
            };
            c * factor * g1.values()[j] * g2.values()[j] * g3.values()[j]
        })
        .collect();
    Ok(field::from_grid(&GridSamples::new(vals), ps.n))
}

/// Dense Galerkin Jacobian: column j holds the coefficients of
/// ∂_u F(λ, u)[e_j] in the basis (1, cos x, ..., cos Nx). At u = 0 the
/// matrix is diagonal with entries |n|^{2s}𝔪(n) - λ.
pub fn jacobian_matrix(ps: &ProblemSpec, lambda: f64, u: &CosineField) -> Result<DMatrix<f64>> {
    ps.check_truncation(u)?;
    let w = jacobian_weight(ps, u)?;
    let dim = ps.n + 1;
    let mut mat = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let e = CosineField::mode(j, ps.n);
        let col = jacobian_apply_with_weight(ps, lambda, &w, &e)?;
        for i in 0..dim {
            mat[(i, j)] = col.coeff(i);
        }
    }
    Ok(mat)
}

/// Coefficient vector of a field (length N+1).
pub fn field_to_vector(u: &CosineField) -> DVector<f64> {
    DVector::from_column_slice(u.coeffs())
}

pub fn vector_to_field(v: &DVector<f64>) -> CosineField {
    CosineField::from_coeffs(v.as_slice().to_vec()).expect("finite solver output")
}

/// Crude condition estimate from the LU factors: max|U_ii| / min|U_ii|.
pub fn lu_condition_estimate(lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>) -> f64 {
    let diag = lu.u().diagonal();
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for d in diag.iter() {
        let a = d.abs();
        lo = lo.min(a);
        hi = hi.max(a);
    }
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Sign of det(A) from its LU factorisation, without forming the (possibly
/// overflowing) product. Returns 0 when a pivot vanishes exactly.
pub fn det_sign(mat: &DMatrix<f64>) -> i8 {
    let lu = mat.clone().lu();
    let mut sign = if lu.p().determinant::<f64>() < 0.0 { -1i8 } else { 1i8 };
    for d in lu.u().diagonal().iter() {
        if *d == 0.0 {
            return 0;
        }
        if *d < 0.0 {
            sign = -sign;
        }
    }
    sign
}

/// Smallest singular value of a matrix.
pub fn min_singular_value(mat: &DMatrix<f64>) -> f64 {
    mat.clone()
        .singular_values()
        .iter()
        .fold(f64::INFINITY, |m, s| m.min(*s))
}

/// Converged Newton state with the residual trace for diagnostics.
#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub u: CosineField,
    pub iterations: usize,
    /// Euclidean norm of the residual coefficient vector at the solution.
    pub final_residual: f64,
    /// Residual norms before each iteration plus the final one.
    pub residual_history: Vec<f64>,
}

pub const DEFAULT_NEWTON_TOL: f64 = 1e-10;
const MAX_HALVINGS: usize = 30;
const SINGULAR_COND: f64 = 1e14;

/// Damped Newton iteration at fixed λ. Convergence is measured in the
/// Euclidean norm of the residual coefficients; steps are halved (up to 30
/// times) whenever the residual norm fails to decrease. Deterministic.
pub fn newton_solve(
    ps: &ProblemSpec,
    lambda: f64,
    u0: &CosineField,
    tol: f64,
    max_iter: usize,
) -> Result<NewtonOutcome> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("Newton tol must be positive".into()));
    }
    let mut u = u0.clone();
    let mut r = residual(ps, lambda, &u)?;
    let mut rn = r.coeff_l2();
    let mut history = vec![rn];
    if rn <= tol {
        return Ok(NewtonOutcome {
            u,
            iterations: 0,
            final_residual: rn,
            residual_history: history,
        });
    }
    for iter in 1..=max_iter {
        let jac = jacobian_matrix(ps, lambda, &u)?;
        let lu = jac.lu();
        let cond = lu_condition_estimate(&lu);
        if cond > SINGULAR_COND {
            return Err(Error::SingularJacobian {
                cond_estimate: cond,
            });
        }
        let rhs = -field_to_vector(&r);
        let delta = lu.solve(&rhs).ok_or(Error::SingularJacobian {
            cond_estimate: cond,
        })?;
        if !delta.iter().all(|v| v.is_finite()) {
            return Err(Error::SingularJacobian {
                cond_estimate: cond,
            });
        }
        let dir = vector_to_field(&delta);

        let mut step = 1.0;
        let mut halvings = 0;
        let (next_u, next_r, next_rn) = loop {
            let cand = u.add_scaled(step, &dir);
            let cand_r = residual(ps, lambda, &cand)?;
            let cand_rn = cand_r.coeff_l2();
            if cand_rn < rn || cand_rn <= tol {
                break (cand, cand_r, cand_rn);
            }
            halvings += 1;
            if halvings > MAX_HALVINGS {
                return Err(Error::NoConvergence {
                    iterations: iter,
                    residual: rn,
                });
            }
            step *= 0.5;
        };
        log::debug!(
            "newton iter {iter}: residual {next_rn:.3e} (damping halvings: {halvings})"
        );
        u = next_u;
        r = next_r;
        rn = next_rn;
        history.push(rn);
        if rn <= tol {
            return Ok(NewtonOutcome {
                u,
                iterations: iter,
                final_residual: rn,
                residual_history: history,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: rn,
    })
}
