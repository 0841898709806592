//! The seven canonical families of 2-dimensional real evolution algebras, a
//! classifier into them with verified witnesses, and the predicted canonical
//! class of the Jacobian algebra at a fixed point.
//!
//! For a nondegenerate structure matrix the naturality equations force every
//! natural change to be monomial (diagonal × permutation), so the rank-2
//! classifier below — diagonal normalization onto `[[1,b2],[b3,1]]`, with a
//! cube-root scaling onto `[[0,1],[1,b4]]` when a diagonal entry vanishes —
//! is a complete decision procedure. Rank-1 inputs go through the numeric
//! isomorphism search against the five rank-1 representatives in order;
//! witness verification makes any search path sound.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{compose_changes, AlgebraError, BasisChange, EvolutionAlgebra, Tolerances};
use crate::dynamics::{fixed_points, jacobian_algebra, SolverOptions};
use crate::iso::{iso_search, verify_iso, IsoOptions};
use crate::roots::real_cbrt;

/// Canonical class of a 2-dimensional algebra, with continuous parameters
/// for the two families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "label")]
pub enum Class2 {
    E1,
    E2,
    E3,
    E4,
    E5,
    E6 { a2: f64, a3: f64 },
    E7 { a4: f64 },
    Zero,
}

impl Class2 {
    pub fn label(&self) -> &'static str {
        match self {
            Class2::E1 => "E1",
            Class2::E2 => "E2",
            Class2::E3 => "E3",
            Class2::E4 => "E4",
            Class2::E5 => "E5",
            Class2::E6 { .. } => "E6",
            Class2::E7 { .. } => "E7",
            Class2::Zero => "Zero",
        }
    }

    /// Same label with parameters within `eps` (E6 compared after the
    /// canonical ordering of its parameter pair).
    pub fn same_class(&self, other: &Class2, eps: f64) -> bool {
        match (self, other) {
            (Class2::E6 { a2, a3 }, Class2::E6 { a2: b2, a3: b3 }) => {
                let (p, q) = canonical_e6_params(*a2, *a3);
                let (r, s) = canonical_e6_params(*b2, *b3);
                (p - r).abs() <= eps && (q - s).abs() <= eps
            }
            (Class2::E7 { a4 }, Class2::E7 { a4: b4 }) => (a4 - b4).abs() <= eps,
            _ => self.label() == other.label(),
        }
    }
}

/// Lexicographically smaller of `(a2, a3)` and `(a3, a2)`, honoring the
/// symmetry of the E6 family.
pub fn canonical_e6_params(a2: f64, a3: f64) -> (f64, f64) {
    if (a3, a2) < (a2, a3) {
        (a3, a2)
    } else {
        (a2, a3)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification2 {
    pub class: Class2,
    #[serde(serialize_with = "crate::io::serialize_change")]
    pub witness: BasisChange,
    pub residual: f64,
    pub verified: bool,
}

#[derive(Debug, Error)]
pub enum Classify2Error {
    #[error("algebra must be 2-dimensional, got {0}")]
    NotTwoDimensional(usize),
    #[error("invalid class parameters: {0}")]
    InvalidParams(String),
    #[error("classification failed: {0}")]
    ClassificationFailed(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Error)]
pub enum PredictError {
    #[error("class {0} has no non-zero fixed point")]
    NoFixedPoint(&'static str),
    #[error("fixed-point coordinate {index} is {value:.3e}, too close to zero for the prediction formulas")]
    DivisionByNearZero { index: usize, value: f64 },
}

/// The canonical structure matrix of a class.
pub fn canonical2(class: &Class2) -> Result<EvolutionAlgebra, Classify2Error> {
    let rows = match class {
        Class2::E1 => vec![vec![1.0, 0.0], vec![0.0, 0.0]],
        Class2::E2 => vec![vec![1.0, 0.0], vec![1.0, 0.0]],
        Class2::E3 => vec![vec![1.0, 1.0], vec![-1.0, -1.0]],
        Class2::E4 => vec![vec![0.0, 1.0], vec![0.0, 0.0]],
        Class2::E5 => vec![vec![0.0, 1.0], vec![0.0, -1.0]],
        Class2::E6 { a2, a3 } => {
            let det = 1.0 - a2 * a3;
            if det.abs() <= 1e-9 * (1.0 + (a2 * a3).abs()) {
                return Err(Classify2Error::InvalidParams(format!(
                    "E6 requires 1 - a2*a3 != 0, got a2 = {a2}, a3 = {a3}"
                )));
            }
            vec![vec![1.0, *a2], vec![*a3, 1.0]]
        }
        Class2::E7 { a4 } => vec![vec![0.0, 1.0], vec![1.0, *a4]],
        Class2::Zero => vec![vec![0.0, 0.0], vec![0.0, 0.0]],
    };
    Ok(EvolutionAlgebra::from_rows(&rows)?)
}

/// Classifies a 2-dimensional algebra, returning the label with parameters
/// and a verified natural witness onto the canonical representative.
pub fn classify2(
    a: &EvolutionAlgebra,
    tol: &Tolerances,
) -> Result<Classification2, Classify2Error> {
    if a.dim() != 2 {
        return Err(Classify2Error::NotTwoDimensional(a.dim()));
    }
    match a.derived_dim(tol) {
        0 => {
            let witness = BasisChange::identity(2);
            let canon = canonical2(&Class2::Zero)?;
            let (verified, residual) = verify_iso(a, &canon, &witness, tol)?;
            Ok(Classification2 {
                class: Class2::Zero,
                witness,
                residual,
                verified,
            })
        }
        2 => classify_rank2(a, tol),
        _ => classify_rank1(a, tol),
    }
}

fn classify_rank2(
    a: &EvolutionAlgebra,
    tol: &Tolerances,
) -> Result<Classification2, Classify2Error> {
    let m = a.matrix();
    let band = tol.sign_band(a.matrix().amax());
    let d1 = m[(0, 0)];
    let d2 = m[(1, 1)];

    let (class, witness) = if d1.abs() > band && d2.abs() > band {
        // Diagonal normalization onto [[1, b2], [b3, 1]].
        let diag = BasisChange::diagonal(&[1.0 / d1, 1.0 / d2]);
        let b2 = m[(0, 1)] * d2 / (d1 * d1);
        let b3 = m[(1, 0)] * d1 / (d2 * d2);
        if (b3, b2) < (b2, b3) {
            let swap = BasisChange::permutation(&[1, 0]);
            (
                Class2::E6 { a2: b3, a3: b2 },
                compose_changes(&swap, &diag)?,
            )
        } else {
            (Class2::E6 { a2: b2, a3: b3 }, diag)
        }
    } else {
        // At least one vanishing diagonal entry: bring it to position (1,1)
        // and scale onto [[0, 1], [1, b4]].
        let (work, pre) = if d1.abs() > band {
            let swap = BasisChange::permutation(&[1, 0]);
            (a.transform(&swap, tol)?, Some(swap))
        } else {
            (a.clone(), None)
        };
        let wm = work.matrix();
        let q = wm[(0, 1)];
        let r = wm[(1, 0)];
        let s = wm[(1, 1)];
        if q.abs() <= band || r.abs() <= band {
            return Err(Classify2Error::ClassificationFailed(
                "rank-2 matrix with a zero diagonal entry must have non-zero antidiagonal".into(),
            ));
        }
        let l1 = real_cbrt(1.0 / (q * q * r));
        let l2 = l1 * l1 * q;
        let b4 = l2 * s;
        let scale = BasisChange::diagonal(&[l1, l2]);
        let witness = match pre {
            Some(swap) => compose_changes(&scale, &swap)?,
            None => scale,
        };
        (Class2::E7 { a4: b4 }, witness)
    };

    let canon = canonical2(&class)?;
    let (verified, residual) = verify_iso(a, &canon, &witness, tol)?;
    if !verified {
        return Err(Classify2Error::ClassificationFailed(format!(
            "rank-2 normalization witness failed verification (residual {residual:.3e})"
        )));
    }
    Ok(Classification2 {
        class,
        witness,
        residual,
        verified,
    })
}

fn classify_rank1(
    a: &EvolutionAlgebra,
    tol: &Tolerances,
) -> Result<Classification2, Classify2Error> {
    let opts = IsoOptions {
        restarts: 128,
        seed: 11,
        ..Default::default()
    };
    for class in [Class2::E1, Class2::E2, Class2::E3, Class2::E4, Class2::E5] {
        let canon = canonical2(&class)?;
        let result = iso_search(a, &canon, &opts, tol);
        if result.found {
            return Ok(Classification2 {
                class,
                witness: result.witness.expect("found implies witness"),
                residual: result.residual,
                verified: true,
            });
        }
    }
    Err(Classify2Error::ClassificationFailed(
        "no verified witness onto a rank-1 representative within the search budget".into(),
    ))
}

/// Predicted class of the Jacobian algebra at a non-zero fixed point of the
/// canonical representative of `class`.
pub fn predicted_iso(class: &Class2, fixed_point: &[f64]) -> Result<Class2, PredictError> {
    let guard = |i: usize| -> Result<f64, PredictError> {
        let v = fixed_point[i];
        if v.abs() < 1e-9 {
            Err(PredictError::DivisionByNearZero { index: i, value: v })
        } else {
            Ok(v)
        }
    };
    match class {
        Class2::E1 | Class2::E2 | Class2::E5 => Ok(Class2::E1),
        Class2::E6 { a2, a3 } => {
            let x1 = guard(0)?;
            let x2 = guard(1)?;
            let b2 = a3 * (x2 / x1) * (x2 / x1);
            let b3 = a2 * (x1 / x2) * (x1 / x2);
            let (p, q) = canonical_e6_params(b2, b3);
            Ok(Class2::E6 { a2: p, a3: q })
        }
        Class2::E7 { a4 } => {
            let x1 = guard(0)?;
            let x2 = guard(1)?;
            let ratio = (x2 / x1) * (x2 / x1);
            Ok(Class2::E7 {
                a4: a4 * real_cbrt(ratio),
            })
        }
        Class2::E3 => Err(PredictError::NoFixedPoint("E3")),
        Class2::E4 => Err(PredictError::NoFixedPoint("E4")),
        Class2::Zero => Err(PredictError::NoFixedPoint("Zero")),
    }
}

/// One row of the linearization table for a canonical class: every non-zero
/// fixed point with its Jacobian algebra, that algebra's classification, and
/// the check against the predicted class.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub class: Class2,
    pub rows: Vec<TableEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableEntry {
    pub fixed_point: Vec<f64>,
    pub jacobian_matrix: Vec<Vec<f64>>,
    pub classified_as: Class2,
    pub predicted: Option<Class2>,
    pub matches_prediction: Option<bool>,
}

pub fn table2d(
    class: &Class2,
    opts: &SolverOptions,
    tol: &Tolerances,
) -> Result<TableRow, Classify2Error> {
    let canon = canonical2(class)?;
    let report = fixed_points(&canon, opts, tol);
    let mut rows = Vec::new();
    for point in report.points {
        let jac = jacobian_algebra(&canon, &point)?;
        let classified = classify2(&jac, tol)?;
        let predicted = predicted_iso(class, &point).ok();
        let matches = predicted
            .as_ref()
            .map(|p| p.same_class(&classified.class, 1e-6));
        rows.push(TableEntry {
            fixed_point: point,
            jacobian_matrix: jac.rows(),
            classified_as: classified.class,
            predicted,
            matches_prediction: matches,
        });
    }
    Ok(TableRow {
        class: *class,
        rows,
    })
}
