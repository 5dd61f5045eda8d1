//! Pseudo-arclength continuation of solution branches, branch switching at
//! bifurcation points, fold and branch-point detection, the constant branch,
//! and the symmetry/scaling transforms acting on solution pairs.
//!
//! Continuation state is the augmented vector z = (λ, a0..aN). Steps, tangents
//! and arclength are measured in the metric |Δλ|² + ‖Δu‖²_{H^{2s}}, so branch
//! geometry matches the norms used everywhere else. The corrector is Keller's
//! bordered system: F(λ, u) = 0 together with ⟨t, z - z_prev⟩ = ds.

use nalgebra::{DMatrix, DVector};
use serde::de::Error as _;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{Error, Result};
use crate::field::{norms, CosineField, NormBundle, TWO_PI};
use crate::operator::{
    self, field_to_vector, jacobian_matrix, min_singular_value, newton_solve, residual,
    ProblemSpec,
};
use crate::spectrum::local_predictor;

/// One accepted continuation state with its diagnostics.
#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub lambda: f64,
    pub u: CosineField,
    /// L² norm (2π convention) of the residual field.
    pub residual_l2: f64,
    pub norms: NormBundle,
    /// Smallest singular value of the Galerkin Jacobian at (λ, u).
    pub min_sv: f64,
    /// Cumulative arclength in the (λ, H^{2s}) metric.
    pub arclength: f64,
}

/// Where a branch came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchOrigin {
    TrivialMode(usize),
    Constant,
    Oracle,
    Manual,
}

/// An ordered branch with its problem digest.
#[derive(Debug, Clone)]
pub struct Branch {
    pub origin: BranchOrigin,
    pub points: Vec<BranchPoint>,
    pub problem: ProblemSpec,
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    lambda: f64,
    a: Vec<f64>,
    residual: f64,
    min_sv: f64,
    arclength: f64,
}

#[derive(Serialize, Deserialize)]
struct BranchRepr {
    problem: ProblemSpec,
    origin: BranchOrigin,
    points: Vec<PointRepr>,
}

impl Serialize for Branch {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        BranchRepr {
            problem: self.problem.clone(),
            origin: self.origin.clone(),
            points: self
                .points
                .iter()
                .map(|p| PointRepr {
                    lambda: p.lambda,
                    a: p.u.coeffs().to_vec(),
                    residual: p.residual_l2,
                    min_sv: p.min_sv,
                    arclength: p.arclength,
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Branch {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = BranchRepr::deserialize(de)?;
        let s = repr.problem.multiplier.s;
        let points = repr
            .points
            .into_iter()
            .map(|p| {
                let u = CosineField::from_coeffs(p.a).map_err(D::Error::custom)?;
                let nb = norms(&u, s);
                Ok(BranchPoint {
                    lambda: p.lambda,
                    u,
                    residual_l2: p.residual,
                    norms: nb,
                    min_sv: p.min_sv,
                    arclength: p.arclength,
                })
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        Ok(Branch {
            origin: repr.origin,
            points,
            problem: repr.problem,
        })
    }
}

impl Branch {
    /// CSV export: one row per point, columns lambda,l2,h2s,linf,residual,min_sv.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,l2,h2s,linf,residual,min_sv\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                p.lambda, p.norms.l2, p.norms.h_2s, p.norms.linf, p.residual_l2, p.min_sv
            ));
        }
        out
    }
}

/// Step control and corrector settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContinuationConfig {
    pub ds0: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    pub target_lambda: Option<f64>,
    pub max_steps: usize,
    pub newton_tol: f64,
    pub max_corrector_iter: usize,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            ds0: 0.02,
            ds_min: 1e-8,
            ds_max: 0.1,
            target_lambda: None,
            max_steps: 500,
            newton_tol: 1e-10,
            max_corrector_iter: 12,
        }
    }
}

impl ContinuationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.ds_min && self.ds_min <= self.ds0 && self.ds0 <= self.ds_max) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < ds_min <= ds0 <= ds_max (got {}, {}, {})",
                self.ds_min, self.ds0, self.ds_max
            )));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::InvalidParameter("newton_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Weights of the continuation metric: 1 for λ, then the H^{2s} quadratic
/// form per cosine coefficient (2π for a0, π + n^{4s}/2 for a_n).
struct Metric {
    w: Vec<f64>,
}

impl Metric {
    fn new(ps: &ProblemSpec) -> Self {
        let mut w = Vec::with_capacity(ps.n + 2);
        w.push(1.0);
        w.push(TWO_PI);
        for n in 1..=ps.n {
            w.push(std::f64::consts::PI + 0.5 * (n as f64).powf(4.0 * ps.s()));
        }
        Self { w }
    }

    fn dot(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.iter()
            .zip(y.iter())
            .zip(&self.w)
            .map(|((a, b), w)| w * a * b)
            .sum()
    }

    fn norm(&self, x: &DVector<f64>) -> f64 {
        self.dot(x, x).sqrt()
    }
}

fn pack(lambda: f64, u: &CosineField) -> DVector<f64> {
    let mut z = DVector::zeros(u.truncation() + 2);
    z[0] = lambda;
    for (i, &a) in u.coeffs().iter().enumerate() {
        z[i + 1] = a;
    }
    z
}

fn unpack(z: &DVector<f64>) -> (f64, CosineField) {
    let u = CosineField::from_coeffs(z.as_slice()[1..].to_vec()).expect("finite solver state");
    (z[0], u)
}

/// Assemble a BranchPoint at (λ, u): residual, norms, smallest singular value.
/// Warns (and debug-asserts) when a well-converged point escapes the always
/// applicable a-priori bounds.
pub fn make_point(
    ps: &ProblemSpec,
    lambda: f64,
    u: &CosineField,
    arclength: f64,
) -> Result<BranchPoint> {
    let r = residual(ps, lambda, u)?;
    let residual_l2 = norms(&r, ps.s()).l2;
    let nb = norms(u, ps.s());
    let min_sv = min_singular_value(&jacobian_matrix(ps, lambda, u)?);
    if residual_l2 < 1e-8 {
        let l2_cap = bounds::l2_bound(ps.p, lambda);
        let slack = 1e-6 * (1.0 + l2_cap);
        if nb.l2 > l2_cap + slack {
            log::warn!(
                "branch point at lambda = {lambda}: L2 norm {} exceeds a-priori bound {}",
                nb.l2,
                l2_cap
            );
            debug_assert!(false, "L2 a-priori bound violated on converged point");
        }
    }
    Ok(BranchPoint {
        lambda,
        u: u.clone(),
        residual_l2,
        norms: nb,
        min_sv,
        arclength,
    })
}

/// The unique non-trivial constant solution at λ ≠ 0: u ≡ -λ^{1/(p-1)} for
/// λ > 0 and u ≡ (-λ)^{1/(p-1)} for λ < 0 (negative/positive respectively).
pub fn constant_solution(p: f64, lambda: f64, n: usize) -> Result<CosineField> {
    if lambda == 0.0 {
        return Err(Error::ZeroLambda);
    }
    let value = if lambda > 0.0 {
        -lambda.powf(1.0 / (p - 1.0))
    } else {
        (-lambda).powf(1.0 / (p - 1.0))
    };
    Ok(CosineField::constant(value, n))
}

/// Newton correction with the k-th cosine coefficient pinned: unknowns are λ
/// and the remaining coefficients. This is the branch-switch corrector; the
/// pinned kernel coordinate is exactly what makes the system regular at a
/// simple bifurcation point.
fn correct_with_pinned_mode(
    ps: &ProblemSpec,
    lambda0: f64,
    u0: &CosineField,
    k: usize,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, CosineField, usize)> {
    let mut lambda = lambda0;
    let mut u = u0.clone();
    let mut r = residual(ps, lambda, &u)?;
    let mut rn = r.coeff_l2();
    for iter in 0..=max_iter {
        if rn <= tol {
            return Ok((lambda, u, iter));
        }
        if iter == max_iter {
            break;
        }
        let mut jac = jacobian_matrix(ps, lambda, &u)?;
        // column k becomes ∂F/∂λ = -u
        for i in 0..=ps.n {
            jac[(i, k)] = -u.coeff(i);
        }
        let lu = jac.lu();
        let delta = lu.solve(&(-field_to_vector(&r))).ok_or(Error::SingularJacobian {
            cond_estimate: f64::INFINITY,
        })?;
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..=20 {
            let mut cand = u.clone();
            for i in 0..=ps.n {
                if i != k {
                    cand.coeffs_mut()[i] += step * delta[i];
                }
            }
            let cand_lambda = lambda + step * delta[k];
            let cand_r = residual(ps, cand_lambda, &cand)?;
            let cand_rn = cand_r.coeff_l2();
            if cand_rn < rn || cand_rn <= tol {
                u = cand;
                lambda = cand_lambda;
                r = cand_r;
                rn = cand_rn;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: rn,
    })
}

/// First corrected point off the trivial branch at mode k. For p = 2 the
/// second-order local model seeds the corrector; other p fall back to the
/// first-order seed u = amplitude·cos(kx) at λ = σ_k.
pub fn branch_switch(
    ps: &ProblemSpec,
    k: usize,
    amplitude: f64,
    cfg: &ContinuationConfig,
) -> Result<BranchPoint> {
    cfg.validate()?;
    if k < 1 || k > ps.n {
        return Err(Error::InvalidParameter(format!(
            "branch mode k = {k} outside 1..={}",
            ps.n
        )));
    }
    if amplitude == 0.0 {
        return Err(Error::InvalidParameter(
            "branch_switch needs a nonzero amplitude".into(),
        ));
    }
    let (lambda0, u0) = if ps.p == 2.0 {
        local_predictor(ps, k, amplitude)?
    } else {
        let sigma = ps.multiplier.operator_symbol(k as i64)?;
        (sigma, CosineField::mode(k, ps.n).scale(amplitude))
    };
    let (lambda, u, iters) =
        correct_with_pinned_mode(ps, lambda0, &u0, k, cfg.newton_tol, cfg.max_corrector_iter.max(20))?;
    log::debug!("branch_switch k={k} amp={amplitude}: corrected in {iters} iterations");
    make_point(ps, lambda, &u, 0.0)
}

/// Keller corrector: drive F to zero on the hyperplane ⟨t, z - z_base⟩ = ds.
/// Returns the corrected state and iteration count, or None on failure.
fn keller_correct(
    ps: &ProblemSpec,
    metric: &Metric,
    z_pred: &DVector<f64>,
    z_base: &DVector<f64>,
    tangent: &DVector<f64>,
    ds: f64,
    cfg: &ContinuationConfig,
) -> Result<Option<(DVector<f64>, usize)>> {
    let dim = ps.n + 2;
    let mut z = z_pred.clone();
    for iter in 0..=cfg.max_corrector_iter {
        let (lambda, u) = unpack(&z);
        let r = residual(ps, lambda, &u)?;
        let rn = r.coeff_l2();
        let c = metric.dot(tangent, &(&z - z_base)) - ds;
        if rn <= cfg.newton_tol && c.abs() <= 1e-9 * (1.0 + ds.abs()) {
            return Ok(Some((z, iter)));
        }
        if iter == cfg.max_corrector_iter {
            break;
        }
        let jac = jacobian_matrix(ps, lambda, &u)?;
        let mut bordered = DMatrix::zeros(dim, dim);
        for i in 0..=ps.n {
            bordered[(i, 0)] = -u.coeff(i);
            for j in 0..=ps.n {
                bordered[(i, j + 1)] = jac[(i, j)];
            }
        }
        for j in 0..dim {
            bordered[(dim - 1, j)] = metric.w[j] * tangent[j];
        }
        let mut rhs = DVector::zeros(dim);
        for i in 0..=ps.n {
            rhs[i] = -r.coeff(i);
        }
        rhs[dim - 1] = -c;
        match bordered.lu().solve(&rhs) {
            Some(delta) if delta.iter().all(|v| v.is_finite()) => z += delta,
            _ => return Ok(None),
        }
    }
    Ok(None)
}

/// Natural-parameter correction: Newton at fixed λ from a given seed.
fn natural_point(
    ps: &ProblemSpec,
    lambda: f64,
    seed: &CosineField,
    cfg: &ContinuationConfig,
) -> Result<CosineField> {
    let out = newton_solve(ps, lambda, seed, cfg.newton_tol, cfg.max_corrector_iter.max(15))?;
    Ok(out.u)
}

/// Implicit branch tangent at a point: (1, du/dλ) with J_u (du/dλ) = u,
/// normalised in the continuation metric and oriented along `direction` in λ.
/// Near a simple bifurcation the solve amplifies the kernel component, which
/// is exactly the branch direction. Falls back to the pure-λ direction when
/// the Jacobian cannot be factorised.
fn initial_tangent(
    ps: &ProblemSpec,
    metric: &Metric,
    lambda: f64,
    u: &CosineField,
    direction: f64,
) -> Result<DVector<f64>> {
    let dim = ps.n + 2;
    let jac = jacobian_matrix(ps, lambda, u)?;
    let mut t = DVector::zeros(dim);
    t[0] = 1.0;
    if let Some(du) = jac.lu().solve(&field_to_vector(u)) {
        let finite = du.iter().all(|v| v.is_finite());
        let scale = du.amax();
        // a singular Jacobian (start exactly on an eigenvalue) produces a
        // huge spurious kernel vector; fall back to the λ direction then
        if finite && scale < 1e8 {
            for i in 0..=ps.n {
                t[i + 1] = du[i];
            }
        }
    }
    let norm = metric.norm(&t);
    t /= norm;
    if t[0] * direction < 0.0 {
        t = -t;
    }
    Ok(t)
}

/// Trace a branch from `start` by pseudo-arclength continuation.
///
/// `direction` (+1/-1) orients the initial motion in λ. The run terminates at
/// `target_lambda` (with an exact Newton landing on the target), `max_steps`,
/// or when the step size is exhausted; exhaustion before any progress is the
/// [`Error::StallAtMinStep`] error, afterwards it just ends the branch.
pub fn continue_branch(
    ps: &ProblemSpec,
    start: &BranchPoint,
    direction: f64,
    cfg: &ContinuationConfig,
    origin: BranchOrigin,
) -> Result<Branch> {
    cfg.validate()?;
    if direction == 0.0 {
        return Err(Error::InvalidParameter("direction must be +1 or -1".into()));
    }
    let dir = direction.signum();
    let r0 = residual(ps, start.lambda, &start.u)?.coeff_l2();
    if r0 > 10.0 * cfg.newton_tol {
        return Err(Error::InvalidParameter(format!(
            "start point residual {r0:.3e} exceeds the corrector tolerance"
        )));
    }
    let metric = Metric::new(ps);
    let mut points = vec![make_point(ps, start.lambda, &start.u, start.arclength)?];

    // the first step uses the implicit tangent; afterwards secants take over
    let mut z_curr = pack(start.lambda, &start.u);
    let mut arclength = start.arclength;
    let mut tangent = initial_tangent(ps, &metric, start.lambda, &start.u, dir)?;

    let mut ds = cfg.ds0;
    let mut easy_streak = 0usize;

    // termination on target = the branch actually crossing that λ; a branch
    // that folds away from the target simply runs out of steps
    let reached = |last: f64, prev: f64| -> bool {
        match cfg.target_lambda {
            Some(t) => (last - t) * (prev - t) <= 0.0,
            None => false,
        }
    };

    for _step in 0..cfg.max_steps {
        let z_pred = &z_curr + &tangent * ds;
        match keller_correct(ps, &metric, &z_pred, &z_curr, &tangent, ds, cfg)? {
            Some((z_new, iters)) => {
                let hop = &z_new - &z_curr;
                let hop_len = metric.norm(&hop);
                // a corrected point far from the predictor means the corrector
                // wandered onto a different branch; reject and shrink
                if hop_len > 4.0 * ds {
                    easy_streak = 0;
                    ds *= 0.5;
                    if ds < cfg.ds_min {
                        if points.len() > 1 {
                            log::warn!("continuation stalled rejecting long hops");
                            break;
                        }
                        return Err(Error::StallAtMinStep { ds_min: cfg.ds_min });
                    }
                    continue;
                }
                let (lambda_new, u_new) = unpack(&z_new);
                arclength += hop_len;
                let prev_lambda = z_curr[0];
                points.push(make_point(ps, lambda_new, &u_new, arclength)?);
                tangent = hop / hop_len;
                z_curr = z_new;

                if iters <= 3 {
                    easy_streak += 1;
                    if easy_streak >= 4 {
                        ds = (ds * 2.0).min(cfg.ds_max);
                        easy_streak = 0;
                    }
                } else {
                    easy_streak = 0;
                }

                if reached(lambda_new, prev_lambda) {
                    if let Some(t) = cfg.target_lambda {
                        // replace the overshoot with an exact Newton landing
                        // on the target, keeping λ monotone across the seam
                        if (lambda_new - t).abs() > 1e-13 {
                            let landing = natural_point(ps, t, &u_new, cfg).ok().filter(|u_t| {
                                // reject landings that left the branch
                                let d = metric.norm(&(&pack(t, u_t) - &z_curr));
                                d <= 4.0 * cfg.ds_max + 2.0 * (lambda_new - t).abs()
                            });
                            match landing {
                                Some(u_t) => {
                                    let overshoot =
                                        points.pop().expect("landing needs a point");
                                    let anchor = points.last().expect("points never empty");
                                    let z_a = pack(anchor.lambda, &anchor.u);
                                    let z_t = pack(t, &u_t);
                                    let arc =
                                        anchor.arclength + metric.norm(&(&z_t - &z_a));
                                    points.push(make_point(ps, t, &u_t, arc)?);
                                    drop(overshoot);
                                }
                                None => log::warn!(
                                    "could not land exactly on target lambda = {t}; keeping overshoot"
                                ),
                            }
                        }
                    }
                    break;
                }
            }
            None => {
                easy_streak = 0;
                ds *= 0.5;
                if ds < cfg.ds_min {
                    if points.len() > 1 {
                        log::warn!(
                            "continuation stalled at ds = {ds:.3e} after {} points",
                            points.len()
                        );
                        break;
                    }
                    return Err(Error::StallAtMinStep { ds_min: cfg.ds_min });
                }
            }
        }
    }

    Ok(Branch {
        origin,
        points,
        problem: ps.clone(),
    })
}

/// What `detect_events` found on a branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Fold,
    BranchPoint,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub lambda: f64,
}

/// Scan a branch for folds (dλ/ds sign change) and branch points (Jacobian
/// determinant sign change with min_sv collapse). Branch points are refined
/// by λ-bisection with a Newton re-solve at each midpoint; folds by a
/// bracketed extremum search on corrected hyperplane sections. Both to
/// |Δλ| ≤ 1e-6 or better.
pub fn detect_events(ps: &ProblemSpec, branch: &Branch) -> Result<Vec<Event>> {
    let pts = &branch.points;
    if pts.len() < 3 {
        return Ok(Vec::new());
    }
    let cfg = ContinuationConfig::default();
    let mut events = Vec::new();

    // fold brackets: λ reverses direction
    let mut fold_spans = Vec::new();
    for i in 1..pts.len() - 1 {
        let d1 = pts[i].lambda - pts[i - 1].lambda;
        let d2 = pts[i + 1].lambda - pts[i].lambda;
        if d1 * d2 < 0.0 {
            fold_spans.push((i - 1, i + 1));
            let lambda = refine_fold(ps, &pts[i - 1], &pts[i + 1], &cfg)
                .unwrap_or(pts[i].lambda);
            events.push(Event {
                kind: EventKind::Fold,
                lambda,
            });
        }
    }

    // determinant sign changes away from folds are branch points
    let signs = pts
        .iter()
        .map(|p| Ok(operator::det_sign(&jacobian_matrix(ps, p.lambda, &p.u)?)))
        .collect::<Result<Vec<i8>>>()?;
    for i in 0..pts.len() - 1 {
        let in_fold = fold_spans.iter().any(|&(a, b)| i >= a && i < b);
        if in_fold {
            continue;
        }
        if signs[i] * signs[i + 1] == -1 {
            if let Some(lambda) = refine_branch_point(ps, &pts[i], &pts[i + 1], &cfg)? {
                events.push(Event {
                    kind: EventKind::BranchPoint,
                    lambda,
                });
            }
        } else if signs[i] == 0 {
            events.push(Event {
                kind: EventKind::BranchPoint,
                lambda: pts[i].lambda,
            });
        }
    }
    events.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(events)
}

/// Bisect on the Jacobian determinant sign between two branch points,
/// re-solving on the branch at each midpoint λ. Confirms the event by the
/// min_sv collapse test at the refined point.
fn refine_branch_point(
    ps: &ProblemSpec,
    lo: &BranchPoint,
    hi: &BranchPoint,
    cfg: &ContinuationConfig,
) -> Result<Option<f64>> {
    let mut la = lo.lambda;
    let mut lb = hi.lambda;
    let mut ua = lo.u.clone();
    let mut ub = hi.u.clone();
    let mut sa = operator::det_sign(&jacobian_matrix(ps, la, &ua)?);
    for _ in 0..80 {
        if (lb - la).abs() <= 1e-9 {
            break;
        }
        let lm = 0.5 * (la + lb);
        let seed = ua.add_scaled(1.0, &ub).scale(0.5);
        let um = match natural_point(ps, lm, &seed, cfg) {
            Ok(u) => u,
            // too close to the singularity for a clean solve: shrink anyway
            Err(_) => seed,
        };
        let sm = operator::det_sign(&jacobian_matrix(ps, lm, &um)?);
        if sm == 0 || sm == sa {
            la = lm;
            ua = um;
            sa = if sm == 0 { sa } else { sm };
            if sm == 0 {
                break;
            }
        } else {
            lb = lm;
            ub = um;
        }
    }
    let lambda = 0.5 * (la + lb);
    let u = ua.add_scaled(1.0, &ub).scale(0.5);
    let jac = jacobian_matrix(ps, lambda, &u)?;
    let scale = (0..=ps.n)
        .map(|i| jac[(i, i)].abs())
        .fold(1.0f64, f64::max);
    let confirmed = min_singular_value(&jac) < 1e-6 * scale;
    Ok(confirmed.then_some(lambda))
}

/// Golden-section search for the λ extremum between two points around a fold.
/// Each trial is corrected back onto the branch in the hyperplane orthogonal
/// to the chord.
fn refine_fold(
    ps: &ProblemSpec,
    a: &BranchPoint,
    b: &BranchPoint,
    cfg: &ContinuationConfig,
) -> Option<f64> {
    let metric = Metric::new(ps);
    let za = pack(a.lambda, &a.u);
    let zb = pack(b.lambda, &b.u);
    let chord = &zb - &za;
    let chord_len = metric.norm(&chord);
    if chord_len == 0.0 {
        return Some(a.lambda);
    }
    let t = &chord / chord_len;
    let lambda_at = |theta: f64| -> Option<f64> {
        let z_pred = &za + &chord * theta;
        let ds = theta * chord_len;
        match keller_correct(ps, &metric, &z_pred, &za, &t, ds, cfg) {
            Ok(Some((z, _))) => Some(z[0]),
            _ => None,
        }
    };
    // direction of the extremum from the bracket interior
    let maximize = lambda_at(0.5)? > 0.5 * (a.lambda + b.lambda);
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut th1 = hi - phi * (hi - lo);
    let mut th2 = lo + phi * (hi - lo);
    let mut f1 = lambda_at(th1)?;
    let mut f2 = lambda_at(th2)?;
    for _ in 0..60 {
        if (hi - lo) * chord_len < 1e-8 {
            break;
        }
        let pick1 = if maximize { f1 > f2 } else { f1 < f2 };
        if pick1 {
            hi = th2;
            th2 = th1;
            f2 = f1;
            th1 = hi - phi * (hi - lo);
            f1 = lambda_at(th1)?;
        } else {
            lo = th1;
            th1 = th2;
            f1 = f2;
            th2 = lo + phi * (hi - lo);
            f2 = lambda_at(th2)?;
        }
    }
    lambda_at(0.5 * (lo + hi))
}

/// The affine symmetry T(λ, u) = (-λ, u + λ) for p = 2. An involution; maps
/// solutions to solutions exactly, up to the truncation of u².
pub fn symmetry_t(ps: &ProblemSpec, point: &BranchPoint) -> Result<BranchPoint> {
    if ps.p != 2.0 {
        return Err(Error::UnsupportedP { p: ps.p });
    }
    let u = point.u.add_constant(point.lambda);
    make_point(ps, -point.lambda, &u, point.arclength)
}

/// The scaling injection T_k(λ, u) = (k^{2s}λ, k^{2s/(p-1)} u(kx)) for the
/// fractional multiplier. The image lives at truncation k·N (mode k·n holds
/// the old mode n); scaling that would exceed `n_cap` is refused rather than
/// aliased.
pub fn scale_t_k(
    ps: &ProblemSpec,
    point: &BranchPoint,
    k: usize,
    n_cap: usize,
) -> Result<(ProblemSpec, BranchPoint)> {
    if !ps.multiplier.is_fractional() {
        return Err(Error::UnsupportedMultiplier);
    }
    if k < 1 {
        return Err(Error::InvalidParameter("scaling index k must be >= 1".into()));
    }
    let n_out = k * ps.n;
    if n_out > n_cap {
        return Err(Error::TruncationOverflow {
            required: n_out,
            cap: n_cap,
        });
    }
    let s = ps.s();
    let factor = (k as f64).powf(2.0 * s / (ps.p - 1.0));
    let mut out = CosineField::zeros(n_out);
    for i in 0..=ps.n {
        out.coeffs_mut()[k * i] = factor * point.u.coeff(i);
    }
    let lambda = (k as f64).powf(2.0 * s) * point.lambda;
    let ps_out = ps.resized(n_out)?;
    let mapped = make_point(&ps_out, lambda, &out, point.arclength)?;
    Ok((ps_out, mapped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::to_grid;
    use crate::multiplier::MultiplierSpec;
    use crate::oracle_bo::{bo_positive, BranchSign};

    fn bo_problem(n: usize) -> ProblemSpec {
        ProblemSpec::new(MultiplierSpec::fractional(0.5), 2.0, n).unwrap()
    }

    #[test]
    fn constant_solution_examples() {
        assert_eq!(constant_solution(2.0, 3.0, 4).unwrap().coeff(0), -3.0);
        assert_eq!(constant_solution(2.0, -3.0, 4).unwrap().coeff(0), 3.0);
        assert_eq!(constant_solution(3.0, 4.0, 4).unwrap().coeff(0), -2.0);
        assert!(matches!(
            constant_solution(2.0, 0.0, 4),
            Err(Error::ZeroLambda)
        ));
    }

    #[test]
    fn branch_switch_matches_oracle() {
        let ps = bo_problem(64);
        let cfg = ContinuationConfig::default();
        let pt = branch_switch(&ps, 1, 0.2, &cfg).unwrap();
        assert!((pt.lambda - 1.02).abs() < 5e-3);
        let oracle = bo_positive(1, pt.lambda, BranchSign::Minus, 64).unwrap();
        let diff = pt.u.add_scaled(-1.0, &oracle);
        let linf = to_grid(&diff, 512)
            .unwrap()
            .values()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(linf < 1e-6, "linf distance to oracle {linf:.3e}");
    }

    #[test]
    fn branch_switch_signs_are_translates() {
        let ps = bo_problem(48);
        let cfg = ContinuationConfig::default();
        let plus = branch_switch(&ps, 1, 0.2, &cfg).unwrap();
        let minus = branch_switch(&ps, 1, -0.2, &cfg).unwrap();
        assert!((plus.lambda - minus.lambda).abs() < 1e-10);
        // x -> x + π maps one onto the other: a_n -> (-1)^n a_n
        for n in 0..=48 {
            let flipped = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!(
                (plus.u.coeff(n) - flipped * minus.u.coeff(n)).abs() < 1e-9,
                "coefficient {n}"
            );
        }
    }

    #[test]
    fn branch_switch_k2_has_4_zeros() {
        let ps = bo_problem(48);
        let cfg = ContinuationConfig::default();
        let pt = branch_switch(&ps, 2, 0.2, &cfg).unwrap();
        // dominant oscillatory mode 2
        for n in 1..=48 {
            if n != 2 {
                assert!(pt.u.coeff(n).abs() <= pt.u.coeff(2).abs());
            }
        }
        // solutions near the k-th bifurcation have exactly 2k zeros
        let g = to_grid(&pt.u, 4096).unwrap();
        let mut crossings = 0;
        for j in 0..4096 {
            let a = g.values()[j];
            let b = g.values()[(j + 1) % 4096];
            if a == 0.0 {
                continue;
            }
            if a * b < 0.0 {
                crossings += 1;
            }
        }
        assert_eq!(crossings, 4);
    }

    #[test]
    fn continue_constant_branch() {
        let ps = bo_problem(16);
        let u0 = constant_solution(2.0, 0.5, 16).unwrap();
        let start = make_point(&ps, 0.5, &u0, 0.0).unwrap();
        let cfg = ContinuationConfig {
            target_lambda: Some(5.0),
            ds_max: 0.25,
            ..Default::default()
        };
        let branch = continue_branch(&ps, &start, 1.0, &cfg, BranchOrigin::Constant).unwrap();
        let last = branch.points.last().unwrap();
        assert!((last.lambda - 5.0).abs() < 1e-9, "landed at {}", last.lambda);
        for p in &branch.points {
            assert!((p.u.coeff(0) + p.lambda).abs() < 1e-8, "u != -lambda at {}", p.lambda);
            assert!(p.u.coeffs()[1..].iter().all(|v| v.abs() < 1e-8));
            assert!(p.residual_l2 < 1e-8);
        }
    }

    #[test]
    fn branch_continuity_invariant() {
        let ps = bo_problem(32);
        let cfg = ContinuationConfig {
            target_lambda: Some(2.0),
            ..Default::default()
        };
        let start = branch_switch(&ps, 1, 0.15, &cfg).unwrap();
        let branch = continue_branch(&ps, &start, 1.0, &cfg, BranchOrigin::TrivialMode(1)).unwrap();
        assert!(branch.points.len() > 5);
        for w in branch.points.windows(2) {
            let du = w[1].u.add_scaled(-1.0, &w[0].u);
            let h2s = norms(&du, ps.s()).h_2s;
            let hop = h2s + (w[1].lambda - w[0].lambda).abs();
            assert!(hop <= 2.0 * cfg.ds_max + 1e-9, "hop {hop} too large");
            assert!(w[1].arclength > w[0].arclength);
        }
    }

    #[test]
    fn trivial_branch_event_detection() {
        let ps = bo_problem(8);
        let start = make_point(&ps, 0.4, &CosineField::zeros(8), 0.0).unwrap();
        let cfg = ContinuationConfig {
            ds0: 0.05,
            ds_max: 0.05,
            target_lambda: Some(3.6),
            max_steps: 200,
            ..Default::default()
        };
        let branch =
            continue_branch(&ps, &start, 1.0, &cfg, BranchOrigin::Manual).unwrap();
        let events = detect_events(&ps, &branch).unwrap();
        let bps: Vec<f64> = events
            .iter()
            .filter(|e| e.kind == EventKind::BranchPoint)
            .map(|e| e.lambda)
            .collect();
        assert_eq!(bps.len(), 3, "events: {events:?}");
        for (found, expected) in bps.iter().zip([1.0, 2.0, 3.0]) {
            assert!(
                (found - expected).abs() <= 1e-6,
                "event at {found} vs sigma = {expected}"
            );
        }
        assert!(events.iter().all(|e| e.kind != EventKind::Fold));
    }

    #[test]
    fn bo_branch_has_no_folds() {
        // the closed-form branch is a graph over λ, so no fold events
        let ps = bo_problem(48);
        let cfg = ContinuationConfig {
            target_lambda: Some(2.2),
            ..Default::default()
        };
        let start = branch_switch(&ps, 1, 0.2, &cfg).unwrap();
        let branch =
            continue_branch(&ps, &start, 1.0, &cfg, BranchOrigin::TrivialMode(1)).unwrap();
        let events = detect_events(&ps, &branch).unwrap();
        assert!(
            events.iter().all(|e| e.kind != EventKind::Fold),
            "unexpected folds: {events:?}"
        );
    }

    #[test]
    fn fold_detected_traversing_the_branch_through_its_minimum() {
        // following C_1 through amplitude zero: λ(s) = σ_1 + λ''(0)s²/2 has a
        // minimum at the bifurcation point, i.e. a fold in λ along the branch
        let ps = bo_problem(32);
        let cfg = ContinuationConfig {
            ds0: 0.02,
            ds_max: 0.04,
            target_lambda: Some(0.99),
            max_steps: 80,
            ..Default::default()
        };
        let start = branch_switch(&ps, 1, 0.25, &cfg).unwrap();
        let branch =
            continue_branch(&ps, &start, -1.0, &cfg, BranchOrigin::TrivialMode(1)).unwrap();
        // the run turns around at λ = 1 and stops shortly after on the way up
        let lambdas: Vec<f64> = branch.points.iter().map(|p| p.lambda).collect();
        let min_lambda = lambdas.iter().fold(f64::INFINITY, |m, v| m.min(*v));
        assert!(min_lambda > 0.995, "should not get below sigma_1: {min_lambda}");
        let a1_first = branch.points.first().unwrap().u.coeff(1);
        let a1_last = branch.points.last().unwrap().u.coeff(1);
        assert!(
            a1_first * a1_last < 0.0,
            "traversal should reach the mirror side: {a1_first} vs {a1_last}"
        );
        let events = detect_events(&ps, &branch).unwrap();
        let folds: Vec<f64> = events
            .iter()
            .filter(|e| e.kind == EventKind::Fold)
            .map(|e| e.lambda)
            .collect();
        assert_eq!(folds.len(), 1, "events: {events:?}");
        assert!(
            (folds[0] - 1.0).abs() <= 1e-6,
            "fold refined to {} (expected 1)",
            folds[0]
        );
    }

    #[test]
    fn symmetry_t_involution_and_examples() {
        let ps = bo_problem(16);
        // constant point (-3, u ≡ 3) maps to the trivial point (3, 0)
        let c = make_point(&ps, -3.0, &CosineField::constant(3.0, 16), 0.0).unwrap();
        let tc = symmetry_t(&ps, &c).unwrap();
        assert_eq!(tc.lambda, 3.0);
        assert!(tc.u.coeffs().iter().all(|v| v.abs() < 1e-14));
        // involution
        let u = CosineField::from_coeffs(
            (0..=16).map(|k| 0.1 * (-(k as f64)).exp()).collect(),
        )
        .unwrap();
        let p0 = make_point(&ps, -2.0, &u, 0.0).unwrap();
        let p2 = symmetry_t(&ps, &symmetry_t(&ps, &p0).unwrap()).unwrap();
        assert_eq!(p2.lambda, p0.lambda);
        for n in 0..=16 {
            assert!((p2.u.coeff(n) - p0.u.coeff(n)).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetry_t_requires_p2() {
        let ps = ProblemSpec::new(MultiplierSpec::fractional(0.5), 3.0, 8).unwrap();
        let pt = make_point(&ps, 1.0, &CosineField::zeros(8), 0.0).unwrap();
        assert!(matches!(
            symmetry_t(&ps, &pt),
            Err(Error::UnsupportedP { .. })
        ));
    }

    #[test]
    fn scale_t_k_basics() {
        let ps = bo_problem(8);
        let pt = make_point(&ps, 1.5, &CosineField::mode(1, 8).scale(0.3), 0.0).unwrap();
        // k = 1 is the identity
        let (ps1, one) = scale_t_k(&ps, &pt, 1, 64).unwrap();
        assert_eq!(ps1.n, 8);
        assert_eq!(one.lambda, pt.lambda);
        // trivial points stay trivial with λ scaled by k^{2s}
        let triv = make_point(&ps, 0.7, &CosineField::zeros(8), 0.0).unwrap();
        let (_, mapped) = scale_t_k(&ps, &triv, 3, 64).unwrap();
        assert!((mapped.lambda - 3.0f64.powf(1.0) * 0.7).abs() < 1e-14);
        assert!(mapped.u.coeffs().iter().all(|v| *v == 0.0));
        // refusal instead of aliasing
        assert!(matches!(
            scale_t_k(&ps, &triv, 9, 64),
            Err(Error::TruncationOverflow { .. })
        ));
        // non-fractional multipliers are rejected
        let ilw = ProblemSpec::new(MultiplierSpec::ilw(0.5, 1.0), 2.0, 8).unwrap();
        let pt_ilw = make_point(&ilw, 0.1, &CosineField::zeros(8), 0.0).unwrap();
        assert!(matches!(
            scale_t_k(&ilw, &pt_ilw, 2, 64),
            Err(Error::UnsupportedMultiplier)
        ));
    }

    #[test]
    fn branch_serde_round_trip() {
        let ps = bo_problem(6);
        let u0 = constant_solution(2.0, 1.0, 6).unwrap();
        let start = make_point(&ps, 1.0, &u0, 0.0).unwrap();
        let cfg = ContinuationConfig {
            target_lambda: Some(1.5),
            ..Default::default()
        };
        let branch = continue_branch(&ps, &start, 1.0, &cfg, BranchOrigin::Constant).unwrap();
        let json = serde_json::to_string(&branch).unwrap();
        let back: Branch = serde_json::from_str(&json).unwrap();
        assert_eq!(back.points.len(), branch.points.len());
        assert_eq!(back.origin, branch.origin);
        for (a, b) in branch.points.iter().zip(&back.points) {
            assert_eq!(a.lambda, b.lambda);
            assert_eq!(a.u, b.u);
            assert_eq!(a.residual_l2, b.residual_l2);
            assert_eq!(a.min_sv, b.min_sv);
            assert_eq!(a.arclength, b.arclength);
        }
    }
}
