//! The evolution operator `F(x) = x²`, its fixed points, the Jacobian at a
//! point, and the evolution algebra generated by that Jacobian.
//!
//! In coordinates `F: x_k' = Σ_i a_ik x_i²`, so the Jacobian at `x` has
//! entries `J[(k, i)] = 2 a_ik x_i`. Non-zero solutions of `F(x) = x` are
//! found in closed form when the structure matrix matches a canonical
//! family, and by seeded multi-start Newton otherwise. The zero vector,
//! which is always fixed, is never reported.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraError, EvolutionAlgebra, Tolerances};
use crate::classify3::{canonical3, Class3};
use crate::roots::{companion_real_roots, cubic_real_roots, quadratic_real_roots};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    ClosedForm,
    MultistartNewton,
}

/// Options for the multi-start Newton solver. All randomness derives from
/// `seed`; two runs with equal options produce identical reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub restarts: usize,
    pub radius: f64,
    pub seed: u64,
    pub max_iter: usize,
    pub merge_radius: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            restarts: 64,
            radius: 10.0,
            seed: 0,
            max_iter: 100,
            merge_radius: 1e-6,
        }
    }
}

/// Non-zero fixed points of the evolution operator with per-point residuals.
/// `complete` is only claimed on the closed-form path.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub points: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub complete: bool,
    pub method: SolveMethod,
    pub notes: Vec<String>,
}

/// `F(x) = x²`; named entry point for the dynamics view of the algebra.
pub fn evolution_map(a: &EvolutionAlgebra, x: &[f64]) -> Result<Vec<f64>, AlgebraError> {
    a.square(x)
}

/// Jacobian of `F` at `x`: `J[(k, i)] = 2 a_ik x_i` (row = output component).
pub fn jacobian(a: &EvolutionAlgebra, x: &[f64]) -> Result<DMatrix<f64>, AlgebraError> {
    let n = a.dim();
    if x.len() != n {
        return Err(AlgebraError::LengthMismatch { got: x.len(), dim: n });
    }
    let mut j = DMatrix::zeros(n, n);
    for k in 0..n {
        for i in 0..n {
            j[(k, i)] = 2.0 * a.matrix()[(i, k)] * x[i];
        }
    }
    Ok(j)
}

/// The evolution algebra whose structure matrix is `J_F(x)`.
pub fn jacobian_algebra(
    a: &EvolutionAlgebra,
    x: &[f64],
) -> Result<EvolutionAlgebra, AlgebraError> {
    let j = jacobian(a, x)?;
    EvolutionAlgebra::new(a.dim(), j)
}

/// Non-zero fixed points of `F`. Closed forms are used when the matrix
/// matches a canonical family (then `complete = true`); otherwise the
/// multi-start Newton solver runs.
pub fn fixed_points(
    a: &EvolutionAlgebra,
    opts: &SolverOptions,
    tol: &Tolerances,
) -> FixedPointReport {
    if let Some((candidates, notes)) = closed_form_candidates(a) {
        let (points, residuals) = finalize(a, candidates, opts, tol);
        return FixedPointReport {
            points,
            residuals,
            complete: true,
            method: SolveMethod::ClosedForm,
            notes,
        };
    }
    fixed_points_multistart(a, opts, tol)
}

/// The multi-start Newton path, exposed separately so it can be checked
/// against the closed forms on the canonical families.
pub fn fixed_points_multistart(
    a: &EvolutionAlgebra,
    opts: &SolverOptions,
    tol: &Tolerances,
) -> FixedPointReport {
    let n = a.dim();
    let offset = splitmix64(opts.seed) % (1 << 20);
    let mut candidates = Vec::new();
    for j in 0..opts.restarts {
        let mut x0 = vec![0.0; n];
        for (i, x) in x0.iter_mut().enumerate() {
            let u = halton(offset + 1 + j as u64, HALTON_BASES[i]);
            *x = (2.0 * u - 1.0) * opts.radius;
        }
        if let Some(x) = polish(a, &x0, opts.max_iter) {
            candidates.push(x);
        }
    }
    let (points, residuals) = finalize(a, candidates, opts, tol);
    FixedPointReport {
        points,
        residuals,
        complete: false,
        method: SolveMethod::MultistartNewton,
        notes: Vec::new(),
    }
}

/// Pairs each non-zero fixed point with its Jacobian algebra.
pub fn linearize_at_fixed_points(
    a: &EvolutionAlgebra,
    opts: &SolverOptions,
    tol: &Tolerances,
) -> Vec<(Vec<f64>, EvolutionAlgebra)> {
    fixed_points(a, opts, tol)
        .points
        .into_iter()
        .map(|x| {
            let alg = jacobian_algebra(a, &x).expect("point has the algebra's dimension");
            (x, alg)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

const A4_BOUND_TEXT: &str =
    "a4 is below -3/cbrt(4) ~= -1.8899, where the defining cubic t^3 + a4*t - 1 = 0 \
     switches from one to three real roots; a real root exists for every a4, so all \
     non-zero fixed points are reported regardless of the parameter value";

/// Parameter value of the E7(a4) family where the real-root count of
/// `t³ + a4·t − 1` changes (the cubic's discriminant vanishes).
pub fn a4_three_root_bound() -> f64 {
    -3.0 / 4.0_f64.cbrt()
}

fn closed_form_candidates(a: &EvolutionAlgebra) -> Option<(Vec<Vec<f64>>, Vec<String>)> {
    if a.matrix().iter().all(|&v| v == 0.0) {
        return Some((Vec::new(), Vec::new()));
    }
    match a.dim() {
        2 => closed_form_2d(a),
        3 => closed_form_3d(a),
        _ => None,
    }
}

fn closed_form_2d(a: &EvolutionAlgebra) -> Option<(Vec<Vec<f64>>, Vec<String>)> {
    let m = a.matrix();
    let e = |i: usize, k: usize| m[(i, k)];

    let fixed: [([f64; 4], Vec<Vec<f64>>); 5] = [
        ([1.0, 0.0, 0.0, 0.0], vec![vec![1.0, 0.0]]),   // E1
        ([1.0, 0.0, 1.0, 0.0], vec![vec![1.0, 0.0]]),   // E2
        ([1.0, 1.0, -1.0, -1.0], vec![]),               // E3
        ([0.0, 1.0, 0.0, 0.0], vec![]),                 // E4
        ([0.0, 1.0, 0.0, -1.0], vec![vec![0.0, -1.0]]), // E5
    ];
    for (pat, pts) in fixed {
        if e(0, 0) == pat[0] && e(0, 1) == pat[1] && e(1, 0) == pat[2] && e(1, 1) == pat[3] {
            return Some((pts, Vec::new()));
        }
    }

    // E6(a2, a3) = [[1, a2], [a3, 1]]
    if e(0, 0) == 1.0 && e(1, 1) == 1.0 {
        let (a2, a3) = (e(0, 1), e(1, 0));
        return Some((e6_candidates(a2, a3), Vec::new()));
    }

    // E7(a4) = [[0, 1], [1, a4]]
    if e(0, 0) == 0.0 && e(0, 1) == 1.0 && e(1, 0) == 1.0 {
        let a4 = e(1, 1);
        let pts: Vec<Vec<f64>> = cubic_real_roots(1.0, 0.0, a4, -1.0)
            .into_iter()
            .map(|t| vec![t * t, t])
            .collect();
        let mut notes = Vec::new();
        if a4 < a4_three_root_bound() {
            notes.push(format!("a4 = {a4}: {A4_BOUND_TEXT}"));
        }
        return Some((pts, notes));
    }

    None
}

/// Fixed points of E6(a2, a3): x1 = x1² + a3 x2², x2 = a2 x1² + x2².
fn e6_candidates(a2: f64, a3: f64) -> Vec<Vec<f64>> {
    let mut pts = Vec::new();
    if a3 == 0.0 {
        // x1 ∈ {0, 1}; x2 solves x2² - x2 + a2 x1² = 0.
        pts.push(vec![0.0, 1.0]);
        for r in quadratic_real_roots(1.0, -1.0, a2) {
            pts.push(vec![1.0, r]);
        }
    } else {
        // Eliminate x2: with u = a2 a3 - 1 the first equation gives
        // x2² = (x1 - x1²)/a3, the second x2 = a2 x1² + (x1 - x1²)/a3, and
        // substituting back yields (u x1² + x1)² + a3 x1² - a3 x1 = 0.
        let u = a2 * a3 - 1.0;
        let coeffs = [0.0, -a3, 1.0 + a3, 2.0 * u, u * u];
        for x1 in companion_real_roots(&coeffs) {
            let x2 = a2 * x1 * x1 + (x1 - x1 * x1) / a3;
            pts.push(vec![x1, x2]);
        }
    }
    pts
}

fn closed_form_3d(a: &EvolutionAlgebra) -> Option<(Vec<Vec<f64>>, Vec<String>)> {
    for label in Class3::ALL {
        let canon = canonical3(label);
        if a.matrix() == canon.matrix() {
            let pts = if label.has_fixed_point() {
                vec![vec![1.0, 0.0, 0.0]]
            } else {
                Vec::new()
            };
            return Some((pts, Vec::new()));
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Newton machinery
// ---------------------------------------------------------------------------

const HALTON_BASES: [u64; 3] = [2, 3, 5];
const DIVERGENCE_BOUND: f64 = 1e6;

fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Radical-inverse (van der Corput) value of `index` in the given base.
fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

fn residual_inf(a: &EvolutionAlgebra, x: &[f64]) -> f64 {
    let fx = a.square(x).expect("length checked by caller");
    fx.iter()
        .zip(x)
        .map(|(f, x)| (f - x).abs())
        .fold(0.0, f64::max)
}

/// Newton on G(x) = F(x) - x with the analytic Jacobian J_F - I, damped
/// steps, and a pseudo-inverse fallback for singular iterates.
fn polish(a: &EvolutionAlgebra, x0: &[f64], max_iter: usize) -> Option<Vec<f64>> {
    let n = a.dim();
    let mut x = x0.to_vec();
    for _ in 0..max_iter {
        if x.iter().any(|v| !v.is_finite() || v.abs() > 10.0 * DIVERGENCE_BOUND) {
            return None;
        }
        let fx = a.square(&x).ok()?;
        let g: Vec<f64> = fx.iter().zip(&x).map(|(f, x)| f - x).collect();
        let gnorm = g.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if gnorm <= 1e-14 * (1.0 + x.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
            break;
        }
        let mut j = jacobian(a, &x).ok()?;
        for i in 0..n {
            j[(i, i)] -= 1.0;
        }
        let rhs = nalgebra::DVector::from_iterator(n, g.iter().map(|v| -v));
        let delta = match j.clone().lu().solve(&rhs) {
            Some(d) if d.iter().all(|v| v.is_finite()) => d,
            _ => {
                let svd = j.svd(true, true);
                svd.solve(&rhs, 1e-10).ok()?
            }
        };
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..25 {
            let trial: Vec<f64> = x
                .iter()
                .zip(delta.iter())
                .map(|(xi, di)| xi + step * di)
                .collect();
            let gt = a.square(&trial).ok()?;
            let tnorm = gt
                .iter()
                .zip(&trial)
                .map(|(f, x)| (f - x).abs())
                .fold(0.0, f64::max);
            if tnorm < gnorm {
                x = trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if x.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_BOUND) {
        return None;
    }
    Some(x)
}

/// Polishes, filters (residual bound, divergence, the zero vector), sorts
/// lexicographically and deduplicates within the merge radius.
fn finalize(
    a: &EvolutionAlgebra,
    candidates: Vec<Vec<f64>>,
    opts: &SolverOptions,
    tol: &Tolerances,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut polished: Vec<Vec<f64>> = Vec::new();
    for c in candidates {
        let x = match polish(a, &c, opts.max_iter) {
            Some(x) => x,
            None => continue,
        };
        if residual_inf(a, &x) > tol.eps_residual {
            continue;
        }
        let norm = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if norm <= opts.merge_radius {
            continue; // the zero fixed point is not interesting
        }
        polished.push(x);
    }
    polished.sort_by(|p, q| p.partial_cmp(q).unwrap_or(std::cmp::Ordering::Equal));
    let mut points: Vec<Vec<f64>> = Vec::new();
    for x in polished {
        let dup = points.iter().any(|p| {
            p.iter()
                .zip(&x)
                .map(|(u, v)| (u - v).abs())
                .fold(0.0, f64::max)
                <= opts.merge_radius
        });
        if !dup {
            points.push(x);
        }
    }
    let residuals = points.iter().map(|x| residual_inf(a, x)).collect();
    (points, residuals)
}
