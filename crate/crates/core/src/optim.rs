//! Fitting model parameters to a standard vector.
//!
//! The fit minimizes the mean squared error over the grid and reports its
//! root, `ε`. Bounded models (INDP, PRSP) are searched in logit coordinates
//! so the search is unconstrained. Each start runs a quasi-Newton
//! (deflected-gradient) descent whose inverse-curvature estimate is reset to
//! the identity every `N + 1` iterations, `N` being the parameter count.

use linalg::solve3;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::Seed;
use crate::models::{logit, sigmoid, ModelError, ModelKind, ModelParams};
use crate::oracle::Target;

/// Search coordinates for bounded parameters are clamped to this magnitude.
pub const MAX_LOGIT: f64 = 30.0;

const MAX_DOUBLINGS: usize = 30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("{0} is not fitted; it is defined directly by the standard vector")]
    NotFittable(ModelKind),
    #[error("no start produced a finite objective for {kind}: {reason}")]
    NoFiniteStart { kind: ModelKind, reason: String },
    #[error("least-squares design matrix is singular")]
    Singular,
    #[error("empty target vector")]
    NoTargets,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimSettings {
    /// Random starts, in addition to the warm and constant starts.
    pub n_starts: usize,
    /// Accepted steps per start.
    pub max_iters: usize,
    /// Stop when the gradient of the RMS error falls below this.
    pub grad_tol: f64,
    /// Stop when a step improves the squared error by less than this fraction.
    pub obj_rel_tol: f64,
    /// Central-difference step, in search coordinates.
    pub fd_step: f64,
}

impl Default for OptimSettings {
    fn default() -> Self {
        Self { n_starts: 5, max_iters: 500, grad_tol: 1e-8, obj_rel_tol: 1e-12, fd_step: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: ModelParams,
    /// Root-mean-square error over the grid.
    pub epsilon: f64,
    pub iterations: usize,
    pub converged: bool,
    pub start_index: usize,
}

/// Root-mean-square error of `m` against the targets.
pub fn objective(m: &ModelParams, targets: &[Target]) -> Result<f64, ModelError> {
    if m.kind() == ModelKind::Bst {
        return Ok(0.0);
    }
    Ok(mean_squared_error(m.kind(), m.values(), targets)?.sqrt())
}

fn mean_squared_error(kind: ModelKind, values: &[f64], targets: &[Target]) -> Result<f64, ModelError> {
    let mut sum = 0.0;
    for t in targets {
        let r = t.value - kind.predict_raw(values, t.evidence)?;
        sum += r * r;
    }
    Ok(sum / targets.len() as f64)
}

/// Closed-form least-squares LINR parameters.
pub fn ols_linr(targets: &[Target]) -> Result<ModelParams, FitError> {
    let rows = targets.iter().map(|t| ([t.evidence.e1, t.evidence.e2, 1.0], t.value));
    let coef = least_squares3(rows)?;
    Ok(ModelParams::linr(coef[0], coef[1], coef[2])?)
}

/// Least squares in log-odds space. Only a starting point for the PWR
/// search; returns `None` when any evidence or target is certain.
pub fn logit_ols_pwr(targets: &[Target]) -> Option<ModelParams> {
    let open = |p: f64| p > 0.0 && p < 1.0;
    if !targets.iter().all(|t| open(t.evidence.e1) && open(t.evidence.e2) && open(t.value)) {
        return None;
    }
    let rows = targets.iter().map(|t| ([logit(t.evidence.e1), logit(t.evidence.e2), 1.0], logit(t.value)));
    let coef = least_squares3(rows).ok()?;
    ModelParams::pwr(coef[0], coef[1], coef[2]).ok()
}

fn least_squares3(rows: impl Iterator<Item = ([f64; 3], f64)>) -> Result<[f64; 3], FitError> {
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for (x, y) in rows {
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += x[i] * x[j];
            }
            atb[i] += x[i] * y;
        }
    }
    solve3(ata, atb).ok_or(FitError::Singular)
}

/// Maps between model parameters and unconstrained search coordinates.
fn to_search(kind: ModelKind, values: &[f64]) -> Vec<f64> {
    if kind.is_bounded() {
        values.iter().map(|&p| logit(p).clamp(-MAX_LOGIT, MAX_LOGIT)).collect()
    } else {
        values.to_vec()
    }
}

fn from_search(kind: ModelKind, x: &[f64]) -> Vec<f64> {
    if kind.is_bounded() {
        x.iter().map(|&v| sigmoid(v.clamp(-MAX_LOGIT, MAX_LOGIT))).collect()
    } else {
        x.to_vec()
    }
}

/// Fits `kind` with no model-specific warm start (OLS still seeds LINR).
pub fn fit(
    kind: ModelKind,
    targets: &[Target],
    settings: &OptimSettings,
    seed: Seed,
) -> Result<FitResult, FitError> {
    fit_with_warm_start(kind, targets, settings, seed, None)
}

/// Multistart fit. Start 0 is the warm start (the supplied parameters, or
/// the least-squares solution for LINR and PWR), then a constant predictor
/// at the target mean, then `settings.n_starts` random starts drawn from
/// `seed`. The best result wins; ties go to the earlier start.
pub fn fit_with_warm_start(
    kind: ModelKind,
    targets: &[Target],
    settings: &OptimSettings,
    seed: Seed,
    warm: Option<&ModelParams>,
) -> Result<FitResult, FitError> {
    if targets.is_empty() {
        return Err(FitError::NoTargets);
    }
    let mean = targets.iter().map(|t| t.value).sum::<f64>() / targets.len() as f64;
    match kind {
        ModelKind::Bst => return Err(FitError::NotFittable(kind)),
        ModelKind::Wrst => {
            let params = ModelParams::wrst(mean)?;
            return Ok(FitResult {
                epsilon: objective(&params, targets)?,
                params,
                iterations: 0,
                converged: true,
                start_index: 0,
            });
        }
        _ => {}
    }

    let mut starts: Vec<Vec<f64>> = Vec::new();
    let warm = match (warm, kind) {
        (Some(p), _) if p.kind() == kind => Some(p.clone()),
        (_, ModelKind::Linr) => Some(ols_linr(targets)?),
        (_, ModelKind::Pwr) => logit_ols_pwr(targets),
        _ => None,
    };
    if let Some(p) = warm {
        starts.push(p.values().to_vec());
    }
    let c = mean.clamp(1e-9, 1.0 - 1e-9);
    starts.push(ModelParams::constant(kind, c)?.values().to_vec());
    let mut rng = seed.rng();
    for _ in 0..settings.n_starts {
        starts.push(random_start(kind, &mut rng));
    }

    let f = |x: &[f64]| mean_squared_error(kind, &from_search(kind, x), targets).unwrap_or(f64::INFINITY);
    let mut best: Option<(usize, Minimum)> = None;
    for (index, start) in starts.iter().enumerate() {
        let Some(m) = minimize(&f, &to_search(kind, start), settings) else {
            continue;
        };
        if best.as_ref().is_none_or(|(_, b)| m.value < b.value) {
            best = Some((index, m));
        }
    }
    let Some((start_index, m)) = best else {
        let reason = match kind.predict_raw(starts[0].as_slice(), targets[0].evidence) {
            Err(e) => e.to_string(),
            Ok(_) => "objective is not finite".to_string(),
        };
        return Err(FitError::NoFiniteStart { kind, reason });
    };
    let params = ModelParams::new(kind, from_search(kind, &m.x))?;
    Ok(FitResult {
        epsilon: objective(&params, targets)?,
        params,
        iterations: m.iterations,
        converged: m.converged,
        start_index,
    })
}

fn random_start(kind: ModelKind, rng: &mut impl Rng) -> Vec<f64> {
    match kind {
        ModelKind::Linr => {
            vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(0.0..1.0)]
        }
        ModelKind::Pwr => {
            vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-2.0..2.0)]
        }
        _ => (0..kind.dimension()).map(|_| rng.random_range(0.02..0.98)).collect(),
    }
}

/// Outcome of one quasi-Newton run.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective value after each accepted step, starting with the initial point.
    pub trace: Vec<f64>,
}

/// Central finite-difference gradient.
pub fn fd_gradient(f: &impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Quasi-Newton descent from `x0` with a BFGS inverse-Hessian update, reset
/// to the identity every `N + 1` iterations, and a halving line search.
///
/// `f` must be nonnegative (a mean squared error). The identity is scaled by
/// `s.y / y.y` from the latest curvature pair, and the gradient test is
/// applied to the gradient of `sqrt(f)`, so a nearly exact fit does not stop
/// early just because its squared error is tiny.
/// Returns `None` when the objective at `x0` is not finite.
pub fn minimize(f: &impl Fn(&[f64]) -> f64, x0: &[f64], settings: &OptimSettings) -> Option<Minimum> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    if !fx.is_finite() {
        return None;
    }
    let mut trace = vec![fx];
    let mut g = fd_gradient(f, &x, settings.fd_step);
    let mut h = identity(n, 1.0);
    // `s.y / y.y` of the latest accepted step, once one is known
    let mut scale: Option<f64> = None;
    let mut scaled = false;
    let mut since_reset = 0;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < settings.max_iters {
        if fx == 0.0 || norm(&g) < settings.grad_tol * 2.0 * fx.sqrt() {
            converged = true;
            break;
        }
        if since_reset > n {
            h = identity(n, scale.unwrap_or(1.0));
            scaled = scale.is_some();
            since_reset = 0;
        }
        let mut dir = mat_vec(&h, &g).into_iter().map(|v| -v).collect::<Vec<_>>();
        if dot(&g, &dir) >= 0.0 {
            h = identity(n, 1.0);
            scaled = false;
            since_reset = 0;
            dir = g.iter().map(|v| -v).collect();
        }

        let Some((x_new, f_new)) = line_search(f, &x, fx, &dir) else {
            if since_reset == 0 && !scaled {
                // steepest descent found no decrease either: stalled
                converged = norm(&g) < settings.grad_tol.sqrt();
                break;
            }
            h = identity(n, 1.0);
            scaled = false;
            since_reset = 0;
            continue;
        };

        let g_new = fd_gradient(f, &x_new, settings.fd_step);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let rel_change = (fx - f_new) / fx.abs().max(f64::MIN_POSITIVE);
        x = x_new;
        fx = f_new;
        g = g_new;
        iterations += 1;
        trace.push(fx);
        if rel_change < settings.obj_rel_tol {
            converged = true;
            break;
        }

        let sy = dot(&s, &y);
        if sy > 1e-14 * norm(&s) * norm(&y) {
            let pair_scale = sy / dot(&y, &y);
            scale = Some(pair_scale);
            if !scaled {
                h.iter_mut().flatten().for_each(|v| *v *= pair_scale);
                scaled = true;
            }
            bfgs_update(&mut h, &s, &y, sy);
        }
        since_reset += 1;
    }

    Some(Minimum { x, value: fx, iterations, converged, trace })
}

fn line_search(f: &impl Fn(&[f64]) -> f64, x: &[f64], fx: f64, dir: &[f64]) -> Option<(Vec<f64>, f64)> {
    let at = |t: f64| -> (Vec<f64>, f64) {
        let cand: Vec<f64> = x.iter().zip(dir).map(|(a, d)| a + t * d).collect();
        let fc = f(&cand);
        (cand, if fc.is_finite() { fc } else { f64::INFINITY })
    };
    let mut t = 1.0;
    let (mut best, mut f_best) = at(t);
    if f_best < fx {
        // the full step already descends: keep doubling while that helps
        for _ in 0..MAX_DOUBLINGS {
            let (cand, fc) = at(2.0 * t);
            if fc >= f_best {
                break;
            }
            (best, f_best, t) = (cand, fc, 2.0 * t);
        }
        return Some((best, f_best));
    }
    for _ in 0..60 {
        t *= 0.5;
        (best, f_best) = at(t);
        if f_best < fx {
            return Some((best, f_best));
        }
    }
    None
}

fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy = mat_vec(h, y);
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i][j] += (1.0 + rho * yhy) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

fn identity(n: usize, diag: f64) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { diag } else { 0.0 }).collect()).collect()
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

mod linalg {
    /// Gaussian elimination with partial pivoting on a 3×3 system.
    pub fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
        let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        for col in 0..3 {
            let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
            if a[pivot][col].abs() <= 1e-12 * scale {
                return None;
            }
            a.swap(col, pivot);
            b.swap(col, pivot);
            for row in col + 1..3 {
                let factor = a[row][col] / a[col][col];
                let pivot_row = a[col];
                for (v, p) in a[row].iter_mut().zip(pivot_row).skip(col) {
                    *v -= factor * p;
                }
                b[row] -= factor * b[col];
            }
        }
        let mut x = [0.0; 3];
        for row in (0..3).rev() {
            let tail: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
            x[row] = (b[row] - tail) / a[row][row];
        }
        Some(x)
    }
}
