//! Structure-matrix representation of evolution algebras, products in a
//! natural basis, derived-subalgebra dimension and natural basis changes.
//!
//! Conventions used throughout the crate:
//!
//! - `matrix[(i, k)]` is `a_ik`, the coefficient of `e_k` in `e_i²`
//!   (row `i` of the structure matrix holds the square of `e_i`);
//! - row `p` of a [`BasisChange`] holds the old-basis coordinates of the new
//!   basis element `f_p`;
//! - a change `P` is *natural* when all cross products `f_p · f_r` (p ≠ r)
//!   vanish, and then the structure matrix transforms as
//!   `M' = (P∘2 · M) · P⁻¹` where `P∘2` is the entrywise square of `P`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerances shared by rank decisions, residual checks and invertibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative singular-value cutoff for numerical rank.
    pub eps_rank: f64,
    /// Scaled residual bound for naturality and structure-identity checks.
    pub eps_residual: f64,
    /// Absolute determinant bound below which a change counts as singular.
    pub eps_det: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_rank: 1e-9,
            eps_residual: 1e-8,
            eps_det: 1e-12,
        }
    }
}

impl Tolerances {
    /// Dead-band half-width used when branching on exact zero conditions.
    pub(crate) fn sign_band(&self, scale: f64) -> f64 {
        1e-9 * scale.max(1.0)
    }
}

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("dimension must be 2 or 3, got {0}")]
    UnsupportedDim(usize),
    #[error("matrix is {rows}x{cols}, expected {dim}x{dim}")]
    ShapeMismatch { rows: usize, cols: usize, dim: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("vector length {got} does not match dimension {dim}")]
    LengthMismatch { got: usize, dim: usize },
    #[error("basis change is not natural (max cross-product residual {residual:.3e})")]
    NotNatural { residual: f64 },
    #[error("basis change is singular (det = {det:.3e})")]
    Singular { det: f64 },
}

/// An evolution algebra given by its structure matrix in a natural basis.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionAlgebra {
    dim: usize,
    matrix: DMatrix<f64>,
}

impl EvolutionAlgebra {
    /// Builds an algebra from its structure matrix. No normalization is
    /// applied; the zero matrix is a valid (trivial) algebra.
    pub fn new(dim: usize, matrix: DMatrix<f64>) -> Result<Self, AlgebraError> {
        if dim != 2 && dim != 3 {
            return Err(AlgebraError::UnsupportedDim(dim));
        }
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(AlgebraError::ShapeMismatch {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                dim,
            });
        }
        for i in 0..dim {
            for k in 0..dim {
                if !matrix[(i, k)].is_finite() {
                    return Err(AlgebraError::NonFinite { row: i, col: k });
                }
            }
        }
        Ok(EvolutionAlgebra { dim, matrix })
    }

    /// Convenience constructor from nested rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, AlgebraError> {
        let dim = rows.len();
        if dim != 2 && dim != 3 {
            return Err(AlgebraError::UnsupportedDim(dim));
        }
        for r in rows {
            if r.len() != dim {
                return Err(AlgebraError::ShapeMismatch {
                    rows: dim,
                    cols: r.len(),
                    dim,
                });
            }
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        EvolutionAlgebra::new(dim, DMatrix::from_row_slice(dim, dim, &flat))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Structure matrix as nested rows (for serialization).
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|k| self.matrix[(i, k)]).collect())
            .collect()
    }

    /// Largest entry magnitude, floored at 1 for use as a residual scale.
    pub(crate) fn scale(&self) -> f64 {
        self.matrix.amax().max(1.0)
    }

    /// Product of two elements given by their coordinates in the natural
    /// basis: `z_k = Σ_i a_ik x_i y_i`. Commutative and bilinear by
    /// construction.
    pub fn multiply(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>, AlgebraError> {
        self.check_len(x)?;
        self.check_len(y)?;
        let mut z = vec![0.0; self.dim];
        for k in 0..self.dim {
            let mut acc = 0.0;
            for i in 0..self.dim {
                // Grouping (x_i·y_i) keeps the product bitwise symmetric.
                acc += self.matrix[(i, k)] * (x[i] * y[i]);
            }
            z[k] = acc;
        }
        Ok(z)
    }

    /// `x² = x · x`.
    pub fn square(&self, x: &[f64]) -> Result<Vec<f64>, AlgebraError> {
        self.multiply(x, x)
    }

    /// Dimension of the derived subalgebra E² (the span of the squares
    /// `e_i²`), computed as the numerical row rank of the structure matrix
    /// via singular values with relative cutoff `eps_rank · σ_max`.
    pub fn derived_dim(&self, tol: &Tolerances) -> usize {
        let svd = self.matrix.clone().svd(false, false);
        let smax = svd.singular_values.amax();
        if smax == 0.0 {
            return 0;
        }
        svd.singular_values
            .iter()
            .filter(|&&s| s > tol.eps_rank * smax)
            .count()
    }

    /// Largest cross-product residual of `P` against this algebra:
    /// `max_{p<r, k} |Σ_i a_ik P[p][i] P[r][i]|`.
    pub fn naturality_residual(&self, p: &BasisChange) -> f64 {
        let n = self.dim;
        let pm = &p.rows;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in (a + 1)..n {
                for k in 0..n {
                    let mut acc = 0.0;
                    for i in 0..n {
                        acc += self.matrix[(i, k)] * pm[(a, i)] * pm[(b, i)];
                    }
                    worst = worst.max(acc.abs());
                }
            }
        }
        worst
    }

    /// True when every pair of new basis elements annihilates:
    /// `f_p · f_r = 0` for all `p ≠ r`, up to `eps_residual` at the problem's
    /// scale.
    pub fn is_natural_change(&self, p: &BasisChange, tol: &Tolerances) -> bool {
        if p.dim() != self.dim {
            return false;
        }
        let scale = self.scale() * p.scale() * p.scale();
        self.naturality_residual(p) <= tol.eps_residual * scale
    }

    /// Structure matrix in the new basis: `M' = (P∘2 · M) · P⁻¹`.
    ///
    /// Fails fast when `P` is singular or not natural, since the formula is
    /// meaningless otherwise.
    pub fn transform(
        &self,
        p: &BasisChange,
        tol: &Tolerances,
    ) -> Result<EvolutionAlgebra, AlgebraError> {
        if p.dim() != self.dim {
            return Err(AlgebraError::ShapeMismatch {
                rows: p.dim(),
                cols: p.dim(),
                dim: self.dim,
            });
        }
        let det = p.det();
        if det.abs() <= tol.eps_det {
            return Err(AlgebraError::Singular { det });
        }
        if !self.is_natural_change(p, tol) {
            return Err(AlgebraError::NotNatural {
                residual: self.naturality_residual(p),
            });
        }
        let inv = p
            .rows
            .clone()
            .try_inverse()
            .ok_or(AlgebraError::Singular { det })?;
        let sq = p.rows.map(|v| v * v);
        let m = (sq * &self.matrix) * inv;
        EvolutionAlgebra::new(self.dim, m)
    }

    /// Entrywise equality of structure matrices up to `eps_residual` at the
    /// matrices' scale.
    pub fn equals(&self, other: &EvolutionAlgebra, tol: &Tolerances) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let scale = self.scale().max(other.scale());
        let diff = &self.matrix - &other.matrix;
        diff.amax() <= tol.eps_residual * scale
    }

    fn check_len(&self, x: &[f64]) -> Result<(), AlgebraError> {
        if x.len() != self.dim {
            return Err(AlgebraError::LengthMismatch {
                got: x.len(),
                dim: self.dim,
            });
        }
        Ok(())
    }
}

/// An invertible change of natural basis. Row `p` holds the old-basis
/// coordinates of the new basis element `f_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisChange {
    rows: DMatrix<f64>,
}

impl BasisChange {
    pub fn new(rows: DMatrix<f64>) -> Result<Self, AlgebraError> {
        if rows.nrows() != rows.ncols() {
            return Err(AlgebraError::ShapeMismatch {
                rows: rows.nrows(),
                cols: rows.ncols(),
                dim: rows.nrows(),
            });
        }
        for i in 0..rows.nrows() {
            for k in 0..rows.ncols() {
                if !rows[(i, k)].is_finite() {
                    return Err(AlgebraError::NonFinite { row: i, col: k });
                }
            }
        }
        Ok(BasisChange { rows })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, AlgebraError> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(AlgebraError::ShapeMismatch {
                    rows: n,
                    cols: r.len(),
                    dim: n,
                });
            }
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        BasisChange::new(DMatrix::from_row_slice(n, n, &flat))
    }

    pub fn identity(dim: usize) -> Self {
        BasisChange {
            rows: DMatrix::identity(dim, dim),
        }
    }

    /// `f_i = entries[i] · e_i`.
    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = entries[i];
        }
        BasisChange { rows: m }
    }

    /// `f_p = e_{perm[p]}`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = DMatrix::zeros(n, n);
        for (p, &i) in perm.iter().enumerate() {
            m[(p, i)] = 1.0;
        }
        BasisChange { rows: m }
    }

    pub fn dim(&self) -> usize {
        self.rows.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.rows
    }

    pub fn row_vectors(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|k| self.rows[(i, k)]).collect())
            .collect()
    }

    pub fn det(&self) -> f64 {
        self.rows.determinant()
    }

    pub fn inverse(&self, tol: &Tolerances) -> Result<BasisChange, AlgebraError> {
        let det = self.det();
        if det.abs() <= tol.eps_det {
            return Err(AlgebraError::Singular { det });
        }
        let inv = self
            .rows
            .clone()
            .try_inverse()
            .ok_or(AlgebraError::Singular { det })?;
        Ok(BasisChange { rows: inv })
    }

    pub(crate) fn scale(&self) -> f64 {
        self.rows.amax().max(1.0)
    }
}

/// Composition of basis changes: `later` is expressed in the basis produced
/// by `first`; the result `later · first` maps the original basis directly to
/// the final one.
pub fn compose_changes(
    later: &BasisChange,
    first: &BasisChange,
) -> Result<BasisChange, AlgebraError> {
    if later.dim() != first.dim() {
        return Err(AlgebraError::ShapeMismatch {
            rows: later.dim(),
            cols: later.dim(),
            dim: first.dim(),
        });
    }
    Ok(BasisChange {
        rows: &later.rows * &first.rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn alg(rows: &[Vec<f64>]) -> EvolutionAlgebra {
        EvolutionAlgebra::from_rows(rows).unwrap()
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn make_algebra_accepts_canonical_matrices() {
        let e1 = alg(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        assert_eq!(e1.dim(), 2);
        let zero = alg(&[vec![0.0; 3], vec![0.0; 3], vec![0.0; 3]]);
        assert_eq!(zero.derived_dim(&tol()), 0);
        let e7 = alg(&[vec![0.0, 1.0], vec![1.0, 0.5]]);
        assert_eq!(e7.matrix()[(1, 1)], 0.5);
    }

    #[test]
    fn make_algebra_rejects_bad_input() {
        assert!(matches!(
            EvolutionAlgebra::from_rows(&[vec![1.0]]),
            Err(AlgebraError::UnsupportedDim(1))
        ));
        assert!(matches!(
            EvolutionAlgebra::from_rows(&[vec![1.0, 2.0], vec![3.0]]),
            Err(AlgebraError::ShapeMismatch { .. })
        ));
        assert!(matches!(
            EvolutionAlgebra::from_rows(&[vec![1.0, f64::NAN], vec![0.0, 0.0]]),
            Err(AlgebraError::NonFinite { row: 0, col: 1 })
        ));
    }

    #[test]
    fn multiply_annihilates_distinct_basis_elements() {
        // E6(a2,a3) with a2=0.7, a3=-0.3
        let a = alg(&[vec![1.0, 0.7], vec![-0.3, 1.0]]);
        let z = a.multiply(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_eq!(z, vec![0.0, 0.0]);
        // e1·e1 = e1 + a2 e2
        let z = a.multiply(&[1.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_eq!(z, vec![1.0, 0.7]);
    }

    #[test]
    fn multiply_reproduces_e5_fixed_point_identity() {
        // E5 = [[0,1],[0,-1]]; (0,-1)² = (0,-1)
        let e5 = alg(&[vec![0.0, 1.0], vec![0.0, -1.0]]);
        let z = e5.multiply(&[0.0, -1.0], &[0.0, -1.0]).unwrap();
        assert_eq!(z, vec![0.0, -1.0]);
    }

    #[test]
    fn multiply_checks_lengths() {
        let a = alg(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        assert!(matches!(
            a.multiply(&[1.0, 0.0, 0.0], &[1.0, 0.0]),
            Err(AlgebraError::LengthMismatch { got: 3, dim: 2 })
        ));
    }

    #[test]
    fn square_examples() {
        let any = alg(&[vec![0.4, -1.2], vec![2.0, 0.1]]);
        assert_eq!(any.square(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        let e1 = alg(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        assert_eq!(e1.square(&[1.0, 0.0]).unwrap(), vec![1.0, 0.0]);
        // E7(0): (1,1)² = (x2², x1²) = (1,1)
        let e70 = alg(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(e70.square(&[1.0, 1.0]).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn derived_dim_examples() {
        let e6 = alg(&[vec![1.0, 0.5], vec![0.5, 1.0]]); // 1 - a2 a3 = 0.75
        assert_eq!(e6.derived_dim(&tol()), 2);
        let zero = alg(&[vec![0.0, 0.0], vec![0.0, 0.0]]);
        assert_eq!(zero.derived_dim(&tol()), 0);
        let e2_3d = alg(&[
            vec![1.0, 1.0, 0.0],
            vec![-1.0, -1.0, 0.0],
            vec![1.0, 1.0, 0.0],
        ]);
        assert_eq!(e2_3d.derived_dim(&tol()), 1);
    }

    #[test]
    fn naturality_of_identity_and_monomial_changes() {
        let a = alg(&[vec![1.3, -0.2], vec![0.8, 2.0]]);
        assert!(a.is_natural_change(&BasisChange::identity(2), &tol()));
        // diagonal scaling x permutation
        let p = compose_changes(
            &BasisChange::permutation(&[1, 0]),
            &BasisChange::diagonal(&[2.0, -0.5]),
        )
        .unwrap();
        assert!(a.is_natural_change(&p, &tol()));
    }

    #[test]
    fn naturality_rejects_mixing_change_on_rank2() {
        // E6(1,-1): f1 = e1+e2, f2 = e1-e2 gives f1·f2 = e1²-e2² = (2,0) ≠ 0
        let a = alg(&[vec![1.0, 1.0], vec![-1.0, 1.0]]);
        let p = BasisChange::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        assert!(!a.is_natural_change(&p, &tol()));
    }

    #[test]
    fn transform_rescales_to_canonical() {
        // [[2,0],[0,0]] with f1 = e1/2 becomes E1 = [[1,0],[0,0]]
        let a = alg(&[vec![2.0, 0.0], vec![0.0, 0.0]]);
        let p = BasisChange::diagonal(&[0.5, 1.0]);
        let b = a.transform(&p, &tol()).unwrap();
        assert!(b.equals(&alg(&[vec![1.0, 0.0], vec![0.0, 0.0]]), &tol()));
    }

    #[test]
    fn transform_identity_is_identity() {
        let a = alg(&[vec![1.0, 2.0, 0.0], vec![0.5, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let b = a.transform(&BasisChange::identity(3), &tol()).unwrap();
        assert!(b.equals(&a, &tol()));
    }

    #[test]
    fn transform_3d_diagonal_example() {
        // diag(1,2,1) sends [[1,2,0],[-1/4,-1/2,0],[1,2,0]] to the canonical
        // [[1,1,0],[-1,-1,0],[1,1,0]]
        let a = alg(&[
            vec![1.0, 2.0, 0.0],
            vec![-0.25, -0.5, 0.0],
            vec![1.0, 2.0, 0.0],
        ]);
        let p = BasisChange::diagonal(&[1.0, 2.0, 1.0]);
        let b = a.transform(&p, &tol()).unwrap();
        let e2 = alg(&[
            vec![1.0, 1.0, 0.0],
            vec![-1.0, -1.0, 0.0],
            vec![1.0, 1.0, 0.0],
        ]);
        assert!(b.equals(&e2, &tol()));
    }

    #[test]
    fn transform_fails_fast() {
        let a = alg(&[vec![1.0, 1.0], vec![-1.0, 1.0]]);
        let p = BasisChange::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        assert!(matches!(
            a.transform(&p, &tol()),
            Err(AlgebraError::NotNatural { .. })
        ));
        let s = BasisChange::from_rows(&[vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert!(matches!(
            a.transform(&s, &tol()),
            Err(AlgebraError::Singular { .. })
        ));
    }

    #[test]
    fn compose_changes_examples() {
        let p = BasisChange::diagonal(&[1.0, 2.0, 1.0]);
        let q = BasisChange::permutation(&[1, 0, 2]);
        let r = compose_changes(&q, &p).unwrap();
        assert_eq!(
            r.row_vectors(),
            vec![
                vec![0.0, 2.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0]
            ]
        );
        let id = BasisChange::identity(3);
        assert_eq!(compose_changes(&q, &id).unwrap(), q);
        assert_eq!(compose_changes(&id, &p).unwrap(), p);
    }

    #[test]
    fn equality_of_swapped_and_scaled_jacobian_algebra() {
        // [[0,0],[0,2]] with f1 = e2/2, f2 = e1 equals E1
        let a = alg(&[vec![0.0, 0.0], vec![0.0, 2.0]]);
        let p = BasisChange::from_rows(&[vec![0.0, 0.5], vec![1.0, 0.0]]).unwrap();
        let b = a.transform(&p, &tol()).unwrap();
        assert!(b.equals(&alg(&[vec![1.0, 0.0], vec![0.0, 0.0]]), &tol()));
        let e1_3d = alg(&[
            vec![1.0, 1.0, 0.0],
            vec![-1.0, -1.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ]);
        let e2_3d = alg(&[
            vec![1.0, 1.0, 0.0],
            vec![-1.0, -1.0, 0.0],
            vec![1.0, 1.0, 0.0],
        ]);
        assert!(!e1_3d.equals(&e2_3d, &tol()));
    }

    // Property tests for the algebraic identities the representation must
    // satisfy exactly or near machine precision.

    fn arb_entries(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-3.0f64..3.0, n)
    }

    fn arb_algebra(dim: usize) -> impl Strategy<Value = EvolutionAlgebra> {
        arb_entries(dim * dim).prop_map(move |v| {
            EvolutionAlgebra::new(dim, DMatrix::from_row_slice(dim, dim, &v)).unwrap()
        })
    }

    fn arb_monomial(dim: usize) -> impl Strategy<Value = BasisChange> {
        let perms3: Vec<Vec<usize>> = vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ];
        let perms2: Vec<Vec<usize>> = vec![vec![0, 1], vec![1, 0]];
        let perms = if dim == 2 { perms2 } else { perms3 };
        (
            prop::sample::select(perms),
            prop::collection::vec(
                prop_oneof![-3.0f64..-0.2, 0.2f64..3.0],
                dim,
            ),
        )
            .prop_map(|(perm, scales)| {
                compose_changes(
                    &BasisChange::permutation(&perm),
                    &BasisChange::diagonal(&scales),
                )
                .unwrap()
            })
    }

    proptest! {
        #[test]
        fn multiply_is_commutative(a in arb_algebra(3),
                                   x in arb_entries(3),
                                   y in arb_entries(3)) {
            let xy = a.multiply(&x, &y).unwrap();
            let yx = a.multiply(&y, &x).unwrap();
            prop_assert_eq!(xy, yx);
        }

        #[test]
        fn multiply_is_bilinear(a in arb_algebra(2),
                                x in arb_entries(2),
                                xp in arb_entries(2),
                                y in arb_entries(2),
                                al in -2.0f64..2.0,
                                be in -2.0f64..2.0) {
            let lhs_arg: Vec<f64> =
                x.iter().zip(&xp).map(|(u, v)| al * u + be * v).collect();
            let lhs = a.multiply(&lhs_arg, &y).unwrap();
            let mx = a.multiply(&x, &y).unwrap();
            let mxp = a.multiply(&xp, &y).unwrap();
            let scale: f64 = lhs
                .iter()
                .map(|v| v.abs())
                .fold(1.0, f64::max);
            for k in 0..2 {
                prop_assert!(
                    (lhs[k] - (al * mx[k] + be * mxp[k])).abs() <= 1e-12 * scale
                );
            }
        }

        #[test]
        fn monomial_changes_are_always_natural(a in arb_algebra(3),
                                               p in arb_monomial(3)) {
            prop_assert!(a.is_natural_change(&p, &tol()));
        }

        #[test]
        fn rank_is_invariant_under_natural_changes(a in arb_algebra(3),
                                                   p in arb_monomial(3)) {
            let t = tol();
            let b = a.transform(&p, &t).unwrap();
            prop_assert_eq!(a.derived_dim(&t), b.derived_dim(&t));
        }

        #[test]
        fn composition_matches_sequential_transforms(a in arb_algebra(3),
                                                     p in arb_monomial(3),
                                                     q in arb_monomial(3)) {
            let t = tol();
            let ap = a.transform(&p, &t).unwrap();
            let apq = ap.transform(&q, &t).unwrap();
            let r = compose_changes(&q, &p).unwrap();
            prop_assert!(a.is_natural_change(&r, &t));
            let ar = a.transform(&r, &t).unwrap();
            let scale = apq.scale().max(ar.scale());
            let diff = (apq.matrix() - ar.matrix()).amax();
            prop_assert!(diff <= 1e-9 * scale);
        }
    }

    #[test]
    fn bilinearity_spot_check() {
        let a = alg(&[vec![1.0, 0.7], vec![-0.3, 1.0]]);
        let x = [0.3, -1.1];
        let y = [2.0, 0.4];
        let sum: Vec<f64> = x.iter().zip(&y).map(|(u, v)| u + v).collect();
        let lhs = a.multiply(&sum, &[1.0, 1.0]).unwrap();
        let mx = a.multiply(&x, &[1.0, 1.0]).unwrap();
        let my = a.multiply(&y, &[1.0, 1.0]).unwrap();
        for k in 0..2 {
            assert_abs_diff_eq!(lhs[k], mx[k] + my[k], epsilon = 1e-12);
        }
    }
}
