//! Classification of 3-dimensional real evolution algebras with
//! one-dimensional derived subalgebra into the thirteen classical canonical
//! forms, with verified basis-change witnesses.
//!
//! Such an algebra has structure matrix of rank one: every row is a multiple
//! of a single pivot row `w`, i.e. `e_i² = d_i · w` for the element
//! `w = Σ w_k e_k`. Two intrinsic objects drive both the labelling and the
//! witness construction:
//!
//! - the symmetric form `β(x, y) = Σ_i d_i x_i y_i` (products are
//!   `x · y = β(x, y) · w`), whose congruence class natural changes preserve;
//! - the scalar `q = β(w, w)` with `w² = q · w`.
//!
//! Labels and traces follow the classical case tree on the parameters
//! `(a₁, a₂, a₃, c₁, c₂)`; witnesses are produced by closed-form
//! orthogonal-completion constructions per structural family (`q ≠ 0`,
//! `q = 0` with `w` isotropic, `q = 0` with `w` in the kernel of `β`),
//! validated in place, with a verified numeric isomorphism search as
//! fallback.

use nalgebra::{DMatrix, Matrix2, Vector3};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, BasisChange, EvolutionAlgebra, Tolerances};
use crate::iso::{iso_search, verify_iso, IsoOptions};

/// Labels of the thirteen canonical forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Class3 {
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
    E7,
    E8,
    E9,
    E10,
    E11,
    E12,
    E13,
}

impl Class3 {
    pub const ALL: [Class3; 13] = [
        Class3::E1,
        Class3::E2,
        Class3::E3,
        Class3::E4,
        Class3::E5,
        Class3::E6,
        Class3::E7,
        Class3::E8,
        Class3::E9,
        Class3::E10,
        Class3::E11,
        Class3::E12,
        Class3::E13,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Class3::E1 => "E1",
            Class3::E2 => "E2",
            Class3::E3 => "E3",
            Class3::E4 => "E4",
            Class3::E5 => "E5",
            Class3::E6 => "E6",
            Class3::E7 => "E7",
            Class3::E8 => "E8",
            Class3::E9 => "E9",
            Class3::E10 => "E10",
            Class3::E11 => "E11",
            Class3::E12 => "E12",
            Class3::E13 => "E13",
        }
    }

    pub fn from_label(s: &str) -> Option<Class3> {
        Class3::ALL.iter().copied().find(|c| c.label() == s)
    }

    /// Whether the evolution operator of the canonical form has a non-zero
    /// fixed point (then it is (1, 0, 0)).
    pub fn has_fixed_point(&self) -> bool {
        matches!(
            self,
            Class3::E4
                | Class3::E5
                | Class3::E6
                | Class3::E7
                | Class3::E8
                | Class3::E9
                | Class3::E10
        )
    }

    /// `(d, w)` with canonical matrix rows `d_i · w`.
    fn pattern(&self) -> (Vector3<f64>, Vector3<f64>) {
        let plane = Vector3::new(1.0, 1.0, 0.0);
        let axis = Vector3::new(1.0, 0.0, 0.0);
        match self {
            Class3::E1 => (Vector3::new(1.0, -1.0, 0.0), plane),
            Class3::E2 => (Vector3::new(1.0, -1.0, 1.0), plane),
            Class3::E3 => (Vector3::new(1.0, -1.0, -1.0), plane),
            Class3::E4 => (Vector3::new(1.0, 0.0, 0.0), axis),
            Class3::E5 => (Vector3::new(1.0, 0.0, 1.0), axis),
            Class3::E6 => (Vector3::new(1.0, 0.0, -1.0), axis),
            Class3::E7 => (Vector3::new(1.0, 1.0, 1.0), axis),
            Class3::E8 => (Vector3::new(1.0, 1.0, -1.0), axis),
            Class3::E9 => (Vector3::new(1.0, -1.0, -1.0), axis),
            Class3::E10 => (Vector3::new(1.0, -1.0, 1.0), axis),
            Class3::E11 => (Vector3::new(0.0, 0.0, 1.0), axis),
            Class3::E12 => (Vector3::new(0.0, 1.0, 1.0), axis),
            Class3::E13 => (Vector3::new(0.0, 1.0, -1.0), axis),
        }
    }
}

/// The exact canonical structure matrix of a label (entries in {-1, 0, 1}).
pub fn canonical3(label: Class3) -> EvolutionAlgebra {
    let (d, w) = label.pattern();
    let mut m = DMatrix::zeros(3, 3);
    for i in 0..3 {
        for k in 0..3 {
            m[(i, k)] = d[i] * w[k];
        }
    }
    EvolutionAlgebra::new(3, m).expect("canonical matrices are valid")
}

/// The rank-one parameters of the structure matrix: the pivot row
/// `(a₁, a₂, a₃)` in original coordinates, the row multipliers `c₁, c₂` of
/// the remaining rows against the pivot, and the permutation that moves the
/// pivot row first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseParams {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub c1: f64,
    pub c2: f64,
    pub pivot_perm: [usize; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification3 {
    #[serde(rename = "label")]
    pub class: Class3,
    #[serde(serialize_with = "crate::io::serialize_change")]
    pub witness: BasisChange,
    pub residual: f64,
    pub verified: bool,
    pub trace: Vec<String>,
}

#[derive(Debug, Error)]
pub enum Classify3Error {
    #[error("algebra must be 3-dimensional, got {0}")]
    NotThreeDimensional(usize),
    #[error("derived subalgebra has dimension {0}, classification requires 1")]
    RankNotOne(usize),
    #[error("classification failed; trace: {trace:?}")]
    ClassificationFailed { trace: Vec<String> },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Extracts `(a₁, a₂, a₃, c₁, c₂)` and the pivot permutation from a rank-one
/// structure matrix.
pub fn extract_case_params(
    a: &EvolutionAlgebra,
    tol: &Tolerances,
) -> Result<CaseParams, Classify3Error> {
    if a.dim() != 3 {
        return Err(Classify3Error::NotThreeDimensional(a.dim()));
    }
    let rank = a.derived_dim(tol);
    if rank != 1 {
        return Err(Classify3Error::RankNotOne(rank));
    }
    let m = a.matrix();
    let row_norm = |i: usize| (0..3).map(|k| m[(i, k)].abs()).fold(0.0, f64::max);
    let max_norm = (0..3).map(row_norm).fold(0.0, f64::max);
    let pivot = (0..3)
        .find(|&i| row_norm(i) > 1e-9 * max_norm)
        .expect("rank-one matrix has a non-zero row");
    let mut perm = [0usize, 1, 2];
    perm.swap(0, pivot);
    let dot = |i: usize, j: usize| (0..3).map(|k| m[(i, k)] * m[(j, k)]).sum::<f64>();
    let ww = dot(pivot, pivot);
    let c1 = dot(perm[1], pivot) / ww;
    let c2 = dot(perm[2], pivot) / ww;
    Ok(CaseParams {
        a1: m[(pivot, 0)],
        a2: m[(pivot, 1)],
        a3: m[(pivot, 2)],
        c1,
        c2,
        pivot_perm: perm,
    })
}

/// Classifies a rank-one 3-dimensional algebra: walks the case tree for the
/// label and trace, constructs a witness in closed form, validates it, and
/// falls back to a verified numeric search if the construction fails.
pub fn classify3(
    a: &EvolutionAlgebra,
    tol: &Tolerances,
) -> Result<Classification3, Classify3Error> {
    if a.dim() != 3 {
        return Err(Classify3Error::NotThreeDimensional(a.dim()));
    }
    let rank = a.derived_dim(tol);
    if rank != 1 {
        return Err(Classify3Error::RankNotOne(rank));
    }

    for label in Class3::ALL {
        let canon = canonical3(label);
        if a.equals(&canon, tol) {
            let witness = BasisChange::identity(3);
            let (verified, residual) = verify_iso(a, &canon, &witness, tol)?;
            return Ok(Classification3 {
                class: label,
                witness,
                residual,
                verified,
                trace: vec!["already-canonical".into()],
            });
        }
    }

    let (label, mut trace) = tree_label(a, tol)?;

    if let Some(witness) = canonicalize(a.matrix(), label, tol) {
        if let Ok((true, residual)) = verify_iso(a, &canonical3(label), &witness, tol) {
            return Ok(Classification3 {
                class: label,
                witness,
                residual,
                verified: true,
                trace,
            });
        }
    }

    // Fallback: the closed-form construction did not validate (numeric
    // boundary). Try every candidate form, construction first, then search.
    trace.push("fallback".into());
    let mut candidates = vec![label];
    candidates.extend(Class3::ALL.iter().copied().filter(|&c| c != label));
    for cand in &candidates {
        if let Some(witness) = canonicalize(a.matrix(), *cand, tol) {
            if let Ok((true, residual)) = verify_iso(a, &canonical3(*cand), &witness, tol) {
                trace.push(format!("fallback-construction:{}", cand.label()));
                return Ok(Classification3 {
                    class: *cand,
                    witness,
                    residual,
                    verified: true,
                    trace,
                });
            }
        }
    }
    let iso_opts = IsoOptions {
        restarts: 96,
        seed: 17,
        ..Default::default()
    };
    for cand in &candidates {
        let r = iso_search(a, &canonical3(*cand), &iso_opts, tol);
        if r.found {
            trace.push(format!("fallback-iso:{}", cand.label()));
            return Ok(Classification3 {
                class: *cand,
                witness: r.witness.expect("found implies witness"),
                residual: r.residual,
                verified: true,
                trace,
            });
        }
    }
    Err(Classify3Error::ClassificationFailed { trace })
}

/// Deterministic rank-one test generator: rows `(r, c₁·r, c₂·r)` with a
/// non-zero `r` and `c₁, c₂` drawn from `[-scale, scale]`.
pub fn random_rank1_algebra(seed: u64, scale: f64) -> EvolutionAlgebra {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = [0.0f64; 3];
    loop {
        for v in r.iter_mut() {
            *v = rng.gen_range(-scale..scale);
        }
        if r.iter().map(|v| v.abs()).fold(0.0, f64::max) > 0.05 * scale {
            break;
        }
    }
    let c1: f64 = rng.gen_range(-scale..scale);
    let c2: f64 = rng.gen_range(-scale..scale);
    let rows = vec![
        r.to_vec(),
        r.iter().map(|v| c1 * v).collect(),
        r.iter().map(|v| c2 * v).collect(),
    ];
    EvolutionAlgebra::from_rows(&rows).expect("constructed rows are valid")
}

// ---------------------------------------------------------------------------
// Case tree (labels and traces only; witnesses come from the canonicalizers)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct TreeParams {
    a1: f64,
    a2: f64,
    a3: f64,
    c1: f64,
    c2: f64,
}

impl TreeParams {
    fn a_band(&self) -> f64 {
        1e-9 * self.a1.abs().max(self.a2.abs()).max(self.a3.abs())
    }

    fn c_band(&self) -> f64 {
        1e-9 * self.c1.abs().max(self.c2.abs()).max(1.0)
    }
}

fn walker_params(a: &EvolutionAlgebra) -> TreeParams {
    let m = a.matrix();
    let row_norm = |i: usize| (0..3).map(|k| m[(i, k)].abs()).fold(0.0, f64::max);
    let max_norm = (0..3).map(row_norm).fold(0.0, f64::max);
    let pivot = (0..3)
        .find(|&i| row_norm(i) > 1e-9 * max_norm)
        .expect("caller checked rank");
    let mut perm = [0usize, 1, 2];
    perm.swap(0, pivot);
    let dot = |i: usize, j: usize| (0..3).map(|k| m[(i, k)] * m[(j, k)]).sum::<f64>();
    let ww = dot(pivot, pivot);
    TreeParams {
        a1: m[(pivot, perm[0])],
        a2: m[(pivot, perm[1])],
        a3: m[(pivot, perm[2])],
        c1: dot(perm[1], pivot) / ww,
        c2: dot(perm[2], pivot) / ww,
    }
}

fn tree_label(
    a: &EvolutionAlgebra,
    _tol: &Tolerances,
) -> Result<(Class3, Vec<String>), Classify3Error> {
    let mut p = walker_params(a);
    let mut trace: Vec<String> = Vec::new();

    for _ in 0..4 {
        let a_band = p.a_band();
        if p.a1.abs() > a_band {
            trace.push("1".into());
            // Rescale e1 so that a1 = 1: a_i -> a_i/a1², c_i -> c_i·a1².
            let a1 = p.a1;
            p = TreeParams {
                a1: 1.0,
                a2: p.a2 / (a1 * a1),
                a3: p.a3 / (a1 * a1),
                c1: p.c1 * a1 * a1,
                c2: p.c2 * a1 * a1,
            };
            let u2 = p.a2 * p.a2 * p.c1;
            let u3 = p.a3 * p.a3 * p.c2;
            let s = 1.0 + u2 + u3;
            let s_band = 1e-9 * (1.0 + u2.abs() + u3.abs());
            let c_band = p.c_band();
            let a_band = p.a_band();
            if s.abs() <= s_band {
                trace.push("1.1".into());
                let t3 = 1.0 + u3;
                let t3_band = 1e-9 * (1.0 + u3.abs());
                if t3.abs() > t3_band {
                    if p.a3.abs() > a_band {
                        trace.push("1.1.1.1".into());
                        if p.c2.abs() <= c_band {
                            return Ok((Class3::E1, trace));
                        }
                        return Ok((Class3::E2, trace));
                    }
                    trace.push("1.1.1.2".into());
                    if p.c2.abs() <= c_band {
                        return Ok((Class3::E1, trace));
                    }
                    return Ok(if p.c2 > 0.0 {
                        (Class3::E2, trace)
                    } else {
                        (Class3::E3, trace)
                    });
                }
                // 1 + a3²c2 = 0 forces a2²c1 = 0.
                if p.c1.abs() > c_band {
                    trace.push("1.1.2.1".into());
                    return Ok(if p.c1 > 0.0 {
                        (Class3::E2, trace)
                    } else {
                        (Class3::E3, trace)
                    });
                }
                if p.a2.abs() <= a_band {
                    trace.push("1.1.2.2".into());
                } else {
                    trace.push("1.1.2.3".into());
                }
                return Ok((Class3::E1, trace));
            }

            trace.push("1.2".into());
            let c1z = p.c1.abs() <= c_band;
            let c2z = p.c2.abs() <= c_band;
            if c1z && c2z {
                trace.push("1.2.1".into());
                return Ok((Class3::E4, trace));
            }
            if c1z {
                trace.push(if p.c2 > 0.0 { "1.2.2.1" } else { "1.2.2.2" }.into());
                return Ok(if p.c2 > 0.0 {
                    (Class3::E5, trace)
                } else {
                    (Class3::E6, trace)
                });
            }
            if c2z {
                // Swapping e2 and e3 moves this to the previous case with
                // c2' = c1.
                trace.push("1.2.8".into());
                return Ok(if p.c1 > 0.0 {
                    (Class3::E5, trace)
                } else {
                    (Class3::E6, trace)
                });
            }
            let t2 = 1.0 + u2;
            let t2_band = 1e-9 * (1.0 + u2.abs());
            if t2.abs() <= t2_band {
                trace.push("1.2.7".into());
                return Ok((Class3::E8, trace));
            }
            // After the shared shear the squares carry coefficients
            // (s, c1·t2, c2·s/t2); rescaling leaves the sign pattern
            // (sgn(c1·t2·s), sgn(c2·t2)).
            let s2 = (p.c1 * t2 * s).signum();
            let s3 = (p.c2 * t2).signum();
            trace.push(subcase_1_2(p.c1, p.c2, s, t2).into());
            let label = match (s2 > 0.0, s3 > 0.0) {
                (true, true) => Class3::E7,
                (true, false) => Class3::E8,
                (false, false) => Class3::E9,
                (false, true) => Class3::E10,
            };
            return Ok((label, trace));
        }

        // Case 2: a1 = 0.
        trace.push("2".into());
        if p.a2.abs() <= a_band {
            // Ensure a2 ≠ 0 by swapping e2 and e3.
            p = TreeParams {
                a1: p.a1,
                a2: p.a3,
                a3: p.a2,
                c1: p.c2,
                c2: p.c1,
            };
            trace.push("2:swap-e2-e3".into());
        }
        let c_band = p.c_band();
        let a_band = p.a_band();
        if p.c1.abs() > c_band {
            // Basis (e2, e3, e1) re-enters Case 1 with a1' = c1·a2 ≠ 0.
            trace.push("2.1".into());
            p = TreeParams {
                a1: p.c1 * p.a2,
                a2: p.c1 * p.a3,
                a3: 0.0,
                c1: p.c2 / p.c1,
                c2: 1.0 / p.c1,
            };
            continue;
        }
        if p.c2.abs() > c_band && p.a3.abs() > a_band {
            // Basis (e3, e2, e1) re-enters Case 1 with a1' = c2·a3 ≠ 0.
            trace.push("2.2.1".into());
            p = TreeParams {
                a1: p.c2 * p.a3,
                a2: p.c2 * p.a2,
                a3: 0.0,
                c1: p.c1 / p.c2,
                c2: 1.0 / p.c2,
            };
            continue;
        }
        if p.c2.abs() <= c_band {
            trace.push("2.2.2.1".into());
            return Ok((Class3::E11, trace));
        }
        trace.push(if p.c2 > 0.0 { "2.2.2.2" } else { "2.2.2.3" }.into());
        return Ok(if p.c2 > 0.0 {
            (Class3::E12, trace)
        } else {
            (Class3::E13, trace)
        });
    }
    Err(Classify3Error::ClassificationFailed { trace })
}

fn subcase_1_2(c1: f64, c2: f64, s: f64, t2: f64) -> &'static str {
    match (c1 > 0.0, c2 > 0.0) {
        (true, true) => "1.2.3",
        (true, false) => {
            if s > 0.0 {
                "1.2.4.1"
            } else {
                "1.2.4.2"
            }
        }
        (false, true) => {
            if t2 > 0.0 {
                "1.2.5.1.1"
            } else if s > 0.0 {
                "1.2.5.2.1"
            } else {
                "1.2.5.2.2"
            }
        }
        (false, false) => {
            if t2 > 0.0 {
                if s > 0.0 {
                    "1.2.6.1.1"
                } else {
                    "1.2.6.1.2"
                }
            } else {
                "1.2.6.2.2"
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Closed-form witness constructions
// ---------------------------------------------------------------------------

/// `M = outer(d, w)`: pivot row `w` (largest ∞-norm) and per-row multipliers.
fn rank1_decompose(m: &DMatrix<f64>) -> Option<(Vector3<f64>, Vector3<f64>)> {
    let row_norm = |i: usize| (0..3).map(|k| m[(i, k)].abs()).fold(0.0, f64::max);
    let pivot = (0..3).fold(0, |b, i| if row_norm(i) > row_norm(b) { i } else { b });
    if row_norm(pivot) == 0.0 {
        return None;
    }
    let w = Vector3::new(m[(pivot, 0)], m[(pivot, 1)], m[(pivot, 2)]);
    let ww = w.dot(&w);
    let mut d = Vector3::zeros();
    let scale = m.amax();
    for i in 0..3 {
        let row = Vector3::new(m[(i, 0)], m[(i, 1)], m[(i, 2)]);
        d[i] = row.dot(&w) / ww;
        let res = row - d[i] * w;
        if res.amax() > 1e-7 * scale {
            return None;
        }
    }
    Some((w, d))
}

fn beta(d: &Vector3<f64>, x: &Vector3<f64>, y: &Vector3<f64>) -> f64 {
    d[0] * x[0] * y[0] + d[1] * x[1] * y[1] + d[2] * x[2] * y[2]
}

/// Two orthonormal vectors spanning the Euclidean complement of `v`.
fn complement_basis(v: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let axis = if v[0].abs() <= v[1].abs() && v[0].abs() <= v[2].abs() {
        Vector3::new(1.0, 0.0, 0.0)
    } else if v[1].abs() <= v[2].abs() {
        Vector3::new(0.0, 1.0, 0.0)
    } else {
        Vector3::new(0.0, 0.0, 1.0)
    };
    let u1 = v.cross(&axis).normalize();
    let u2 = v.cross(&u1).normalize();
    (u1, u2)
}

/// β-orthogonal eigen-basis of the plane spanned by `v1, v2`: returns
/// `(vectors, eigenvalues)` with `β(u_i, u_j) = λ_i δ_ij`.
fn beta_diagonal_pair(
    d: &Vector3<f64>,
    v1: &Vector3<f64>,
    v2: &Vector3<f64>,
) -> ([Vector3<f64>; 2], [f64; 2]) {
    let g = Matrix2::new(
        beta(d, v1, v1),
        beta(d, v1, v2),
        beta(d, v1, v2),
        beta(d, v2, v2),
    );
    let eig = g.symmetric_eigen();
    let u = |j: usize| v1 * eig.eigenvectors[(0, j)] + v2 * eig.eigenvectors[(1, j)];
    ([u(0), u(1)], [eig.eigenvalues[0], eig.eigenvalues[1]])
}

fn sign_of(v: f64, band: f64) -> i8 {
    if v.abs() <= band {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

fn rows_from(f1: &Vector3<f64>, f2: &Vector3<f64>, f3: &Vector3<f64>) -> Option<BasisChange> {
    let rows: Vec<Vec<f64>> = [f1, f2, f3]
        .iter()
        .map(|v| vec![v[0], v[1], v[2]])
        .collect();
    BasisChange::from_rows(&rows).ok()
}

/// Closed-form witness from a rank-one matrix to the canonical form of
/// `label`, or `None` when the structural family does not match.
fn canonicalize(m: &DMatrix<f64>, label: Class3, tol: &Tolerances) -> Option<BasisChange> {
    let (w, d) = rank1_decompose(m)?;
    let (d_target, _) = label.pattern();
    let q = beta(&d, &w, &w);
    let q_ref = (0..3).map(|i| (d[i] * w[i] * w[i]).abs()).sum::<f64>().max(1e-300);
    let bw = Vector3::new(d[0] * w[0], d[1] * w[1], d[2] * w[2]);
    let d_band = 1e-9 * d.amax();

    let q_is_zero = q.abs() <= 1e-9 * q_ref;
    let w_in_kernel = bw.amax() <= 1e-9 * d.amax() * w.amax();

    match label {
        Class3::E4
        | Class3::E5
        | Class3::E6
        | Class3::E7
        | Class3::E8
        | Class3::E9
        | Class3::E10 => {
            if q_is_zero {
                return None;
            }
            let f1 = w / q;
            let (v1, v2) = complement_basis(&bw);
            let (us, ls) = beta_diagonal_pair(&d, &v1, &v2);
            let t2 = d_target[1] as i8 as f64;
            let t3 = d_target[2];
            assign_pair(&us, &ls, q, t2 as i8, t3 as i8, d_band, tol).and_then(
                |(f2, f3)| {
                    let p = rows_from(&f1, &f2, &f3)?;
                    Some(p)
                },
            )
        }
        Class3::E11 | Class3::E12 | Class3::E13 => {
            if !w_in_kernel {
                return None;
            }
            let (v1, v2) = complement_basis(&w);
            let (us, ls) = beta_diagonal_pair(&d, &v1, &v2);
            let t2 = d_target[1] as i8;
            let t3 = d_target[2] as i8;
            // A sign flip of f1 negates the effective pattern.
            for flip in [1.0f64, -1.0] {
                if let Some((f2, f3)) =
                    assign_pair(&us, &ls, flip, t2, t3, d_band, tol)
                {
                    let f1 = w * flip;
                    if let Some(p) = rows_from(&f1, &f2, &f3) {
                        return Some(p);
                    }
                }
            }
            None
        }
        Class3::E1 | Class3::E2 | Class3::E3 => {
            if !q_is_zero || w_in_kernel {
                return None;
            }
            canonicalize_isotropic(&w, &d, &bw, d_target[2], tol)
        }
    }
}

/// Orders and rescales the β-diagonal pair `us` to match the target signs
/// `(t2, t3)` of `λ_i · q`.
fn assign_pair(
    us: &[Vector3<f64>; 2],
    ls: &[f64; 2],
    q: f64,
    t2: i8,
    t3: i8,
    band: f64,
    _tol: &Tolerances,
) -> Option<(Vector3<f64>, Vector3<f64>)> {
    let scaled = |i: usize| -> Option<Vector3<f64>> {
        if sign_of(ls[i], band) == 0 {
            Some(us[i])
        } else {
            Some(us[i] / (ls[i] * q).abs().sqrt())
        }
    };
    for (i, j) in [(0usize, 1usize), (1, 0)] {
        let si = sign_of(ls[i], band) as i32 * q.signum() as i32;
        let sj = sign_of(ls[j], band) as i32 * q.signum() as i32;
        let si = if sign_of(ls[i], band) == 0 { 0 } else { si };
        let sj = if sign_of(ls[j], band) == 0 { 0 } else { sj };
        if si == t2 as i32 && sj == t3 as i32 {
            return Some((scaled(i)?, scaled(j)?));
        }
    }
    None
}

/// Witness for the family with `q = 0` and `w` isotropic but not in the
/// kernel: builds a hyperbolic pair `(f1, f2)` with `f1 + f2 ∝ w` and a
/// β-orthogonal third direction whose square sign selects E1/E2/E3.
fn canonicalize_isotropic(
    w: &Vector3<f64>,
    d: &Vector3<f64>,
    bw: &Vector3<f64>,
    d3_target: f64,
    _tol: &Tolerances,
) -> Option<BasisChange> {
    // u: a direction in w's β-complement, independent of w.
    let (b1, b2) = complement_basis(bw);
    let ww = w.dot(w);
    let cand1 = b1 - w * (b1.dot(w) / ww);
    let cand2 = b2 - w * (b2.dot(w) / ww);
    let u_raw = if cand1.norm() >= cand2.norm() { cand1 } else { cand2 };
    if u_raw.norm() <= 1e-12 {
        return None;
    }
    let u = u_raw.normalize();
    let buu = beta(d, &u, &u);
    let bu = Vector3::new(d[0] * u[0], d[1] * u[1], d[2] * u[2]);
    let band = 1e-9 * d.amax();

    let (f3, a_gauge) = if buu.abs() <= band {
        if d3_target != 0.0 {
            return None;
        }
        (u, 1.0)
    } else {
        if d3_target == 0.0 {
            return None;
        }
        (u / buu.abs().sqrt(), buu.signum() * d3_target)
    };

    // z: β-orthogonal to u, independent of w, with β(w, z) ≠ 0.
    let z = if bu.amax() <= band * u.amax().max(1.0) {
        // u is β-null; any direction pairing with w works, e.g. bw itself.
        *bw
    } else {
        let (g1, g2) = complement_basis(&bu);
        let zc1 = g1 - w * (g1.dot(w) / ww);
        let zc2 = g2 - w * (g2.dot(w) / ww);
        // Prefer the candidate with the stronger pairing β(w, ·).
        let p1 = beta(d, w, &zc1).abs();
        let p2 = beta(d, w, &zc2).abs();
        if p1 >= p2 {
            zc1
        } else {
            zc2
        }
    };
    let bwz = beta(d, w, &z);
    if bwz.abs() <= 1e-12 * d.amax() * w.amax() * z.amax().max(1e-300) {
        return None;
    }
    let gamma = 1.0 / bwz;
    let bzz = beta(d, &z, &z);
    let alpha = (a_gauge - bzz / (bwz * bwz)) / 2.0;
    let alpha_p = a_gauge - alpha;
    let f1 = w * alpha + z * gamma;
    let f2 = w * alpha_p - z * gamma;
    rows_from(&f1, &f2, &f3)
}
