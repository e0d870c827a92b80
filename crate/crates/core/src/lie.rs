//! Matrix Lie-group and Lie-algebra arithmetic over a runtime group description.
//!
//! A [`LieGroupSpec`] fixes a basis of the Lie algebra as explicit generator
//! matrices and derives the structure constants from their commutators. All
//! operations (hat/vee, exp/log, brackets, adjoints) work generically from that
//! data; the SE(2) basis is recognised structurally and dispatches to closed
//! forms.
//!
//! Conventions, fixed once for the whole crate:
//! * algebra vectors are coordinates in the generator basis, with the
//!   Euclidean norm;
//! * [`GroupElement::adjoint_right`] is the linear action of conjugation by
//!   the element itself, `Ad(g) v = vee(g · hat(v) · g⁻¹)`. The inverse
//!   orientation (conjugation by `g⁻¹`, natural for right-translation flows)
//!   is `g.inverse().adjoint_right()`.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;
use thiserror::Error;

/// Tolerance for algebraic identities a spec must satisfy at construction.
const SPEC_TOL: f64 = 1e-12;
/// Residual tolerance when projecting a matrix onto the generator span.
const VEE_TOL: f64 = 1e-9;
/// Group-variety tolerance for SE(2) element validation.
const GROUP_TOL: f64 = 1e-9;
/// Below this rotation angle the SE(2) closed forms switch to Taylor series.
const SMALL_ANGLE: f64 = 1e-6;

/// Errors raised by algebra/group arithmetic.
#[derive(Debug, Error)]
pub enum LieError {
    #[error("coordinate vector has length {got}, algebra dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is {got_rows}x{got_cols}, expected {expected}x{expected}")]
    MatrixShape {
        expected: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("value contains a non-finite entry")]
    NonFinite,
    #[error("matrix lies outside the generator span (residual {residual:.3e} > {tolerance:.3e})")]
    OffSpan { residual: f64, tolerance: f64 },
    #[error("logarithm at the cut locus (|angle| = {angle:.9} is within 1e-9 of pi)")]
    CutLocus { angle: f64 },
    #[error("matrix logarithm did not converge")]
    LogDiverged,
    #[error("matrix does not satisfy the group constraints: {0}")]
    NotInGroup(String),
    #[error("invalid group description: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GroupKind {
    Se2,
    Generic,
}

/// Runtime description of a matrix Lie group: algebra dimension, matrix size,
/// generator basis and the structure constants derived from it.
pub struct LieGroupSpec {
    name: String,
    dim_algebra: usize,
    dim_matrix: usize,
    generators: Vec<DMatrix<f64>>,
    /// `structure[(i * n + j) * n + k]` is the coefficient of `e_k` in `[e_i, e_j]`.
    structure: Vec<f64>,
    /// Least-squares projector from vectorised matrices onto basis coordinates.
    projector: DMatrix<f64>,
    /// Columns are the vectorised generators (column-major).
    span: DMatrix<f64>,
    kind: GroupKind,
}

impl fmt::Debug for LieGroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LieGroupSpec")
            .field("name", &self.name)
            .field("dim_algebra", &self.dim_algebra)
            .field("dim_matrix", &self.dim_matrix)
            .finish()
    }
}

#[derive(Deserialize)]
struct SpecFile {
    name: String,
    dim_algebra: usize,
    dim_matrix: usize,
    /// One row-major `m*m` block per generator.
    generators: Vec<Vec<f64>>,
}

fn vectorise(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(m.len(), m.iter().copied())
}

impl LieGroupSpec {
    /// The planar rigid-motion group with basis (forward, lateral, heading).
    pub fn se2() -> Arc<Self> {
        let gens = vec![
            DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]),
            DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        ];
        Self::from_generators("SE2", 3, gens).expect("canonical SE(2) basis is valid")
    }

    /// Builds a spec from generator matrices, deriving and validating the
    /// structure constants. Fails if the generators are dependent, do not
    /// close under commutation, or violate the Jacobi identity.
    pub fn from_generators(
        name: &str,
        dim_matrix: usize,
        generators: Vec<DMatrix<f64>>,
    ) -> Result<Arc<Self>, LieError> {
        let n = generators.len();
        if n == 0 {
            return Err(LieError::InvalidSpec("no generators supplied".into()));
        }
        for g in &generators {
            if g.nrows() != dim_matrix || g.ncols() != dim_matrix {
                return Err(LieError::MatrixShape {
                    expected: dim_matrix,
                    got_rows: g.nrows(),
                    got_cols: g.ncols(),
                });
            }
            if g.iter().any(|v| !v.is_finite()) {
                return Err(LieError::NonFinite);
            }
        }

        let mm = dim_matrix * dim_matrix;
        let mut span = DMatrix::zeros(mm, n);
        for (j, g) in generators.iter().enumerate() {
            span.set_column(j, &vectorise(g));
        }
        let svd = span.clone().svd(true, true);
        let sigma_max = svd.singular_values.max();
        let sigma_min = svd.singular_values.min();
        if sigma_min <= 1e-12 * sigma_max.max(1.0) {
            return Err(LieError::InvalidSpec(
                "generators are linearly dependent".into(),
            ));
        }
        let projector = svd
            .pseudo_inverse(1e-12 * sigma_max)
            .map_err(|e| LieError::InvalidSpec(e.to_string()))?;

        // Structure constants from the matrix commutators of the basis.
        let mut structure = vec![0.0; n * n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let comm = &generators[i] * &generators[j] - &generators[j] * &generators[i];
                let v = vectorise(&comm);
                let coords = &projector * &v;
                let residual = (&span * &coords - &v).norm();
                if residual > VEE_TOL * v.norm().max(1.0) {
                    return Err(LieError::InvalidSpec(format!(
                        "generators do not close under commutation ([e_{i}, e_{j}] residual {residual:.3e})"
                    )));
                }
                for k in 0..n {
                    structure[(i * n + j) * n + k] = coords[k];
                    structure[(j * n + i) * n + k] = -coords[k];
                }
            }
        }

        let kind = if Self::matches_se2(dim_matrix, &generators) {
            GroupKind::Se2
        } else {
            GroupKind::Generic
        };

        let spec = Self {
            name: name.to_string(),
            dim_algebra: n,
            dim_matrix,
            generators,
            structure,
            projector,
            span,
            kind,
        };

        let jacobi = spec.max_jacobi_residual();
        if jacobi > SPEC_TOL * spec.structure_scale().max(1.0) {
            return Err(LieError::InvalidSpec(format!(
                "structure constants violate the Jacobi identity (residual {jacobi:.3e})"
            )));
        }

        Ok(Arc::new(spec))
    }

    fn matches_se2(dim_matrix: usize, generators: &[DMatrix<f64>]) -> bool {
        if dim_matrix != 3 || generators.len() != 3 {
            return false;
        }
        let canon = [
            DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]),
            DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        ];
        generators
            .iter()
            .zip(canon.iter())
            .all(|(g, c)| (g - c).norm() < 1e-12)
    }

    /// Loads a spec from JSON: `{name, dim_algebra, dim_matrix, generators}`
    /// with each generator given row-major. Structure constants are always
    /// derived, never read.
    pub fn from_json_str(text: &str) -> Result<Arc<Self>, LieError> {
        let file: SpecFile =
            serde_json::from_str(text).map_err(|e| LieError::InvalidSpec(e.to_string()))?;
        if file.generators.len() != file.dim_algebra {
            return Err(LieError::InvalidSpec(format!(
                "expected {} generators, found {}",
                file.dim_algebra,
                file.generators.len()
            )));
        }
        let m = file.dim_matrix;
        let gens = file
            .generators
            .iter()
            .map(|rows| {
                if rows.len() != m * m {
                    Err(LieError::InvalidSpec(format!(
                        "generator has {} entries, expected {}",
                        rows.len(),
                        m * m
                    )))
                } else {
                    Ok(DMatrix::from_row_slice(m, m, rows))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_generators(&file.name, m, gens)
    }

    /// Loads a spec from a JSON file on disk.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Arc<Self>, LieError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| LieError::InvalidSpec(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json_str(&text)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim_algebra(&self) -> usize {
        self.dim_algebra
    }

    pub fn dim_matrix(&self) -> usize {
        self.dim_matrix
    }

    pub fn generator(&self, i: usize) -> &DMatrix<f64> {
        &self.generators[i]
    }

    pub fn is_se2(&self) -> bool {
        self.kind == GroupKind::Se2
    }

    /// Coefficient of `e_k` in `[e_i, e_j]`.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.structure[(i * self.dim_algebra + j) * self.dim_algebra + k]
    }

    fn structure_scale(&self) -> f64 {
        self.structure.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Largest norm over basis triples of the cyclic Jacobi sum.
    pub fn max_jacobi_residual(&self) -> f64 {
        let n = self.dim_algebra;
        let mut worst: f64 = 0.0;
        let basis = |i: usize| {
            let mut v = DVector::zeros(n);
            v[i] = 1.0;
            v
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let sum = self.bracket_coords(&basis(i), &self.bracket_coords(&basis(j), &basis(k)))
                        + self.bracket_coords(&basis(j), &self.bracket_coords(&basis(k), &basis(i)))
                        + self.bracket_coords(&basis(k), &self.bracket_coords(&basis(i), &basis(j)));
                    worst = worst.max(sum.norm());
                }
            }
        }
        worst
    }

    /// Bracket of raw coordinate vectors via the structure constants.
    pub fn bracket_coords(&self, a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
        let n = self.dim_algebra;
        let mut out = DVector::zeros(n);
        for i in 0..n {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if b[j] == 0.0 {
                    continue;
                }
                let w = a[i] * b[j];
                for k in 0..n {
                    out[k] += w * self.structure[(i * n + j) * n + k];
                }
            }
        }
        out
    }

    /// Linear combination of generators for the given coordinates.
    pub fn hat(&self, coords: &[f64]) -> Result<DMatrix<f64>, LieError> {
        if coords.len() != self.dim_algebra {
            return Err(LieError::DimensionMismatch {
                expected: self.dim_algebra,
                got: coords.len(),
            });
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(LieError::NonFinite);
        }
        let mut out = DMatrix::zeros(self.dim_matrix, self.dim_matrix);
        for (c, g) in coords.iter().zip(self.generators.iter()) {
            if *c != 0.0 {
                out += g * *c;
            }
        }
        Ok(out)
    }

    /// Coordinates of a matrix in the generator basis; errors if the matrix
    /// is not in the span.
    pub fn vee(self: &Arc<Self>, matrix: &DMatrix<f64>) -> Result<AlgebraVector, LieError> {
        let coords = self.project_coords(matrix, true)?;
        Ok(AlgebraVector {
            spec: Arc::clone(self),
            coords,
        })
    }

    fn project_coords(
        &self,
        matrix: &DMatrix<f64>,
        check_residual: bool,
    ) -> Result<DVector<f64>, LieError> {
        if matrix.nrows() != self.dim_matrix || matrix.ncols() != self.dim_matrix {
            return Err(LieError::MatrixShape {
                expected: self.dim_matrix,
                got_rows: matrix.nrows(),
                got_cols: matrix.ncols(),
            });
        }
        let v = vectorise(matrix);
        let coords = &self.projector * &v;
        if check_residual {
            let residual = (&self.span * &coords - &v).norm();
            let tolerance = VEE_TOL * v.norm().max(1.0);
            if residual > tolerance {
                return Err(LieError::OffSpan {
                    residual,
                    tolerance,
                });
            }
        }
        Ok(coords)
    }
}

fn assert_same_spec(a: &Arc<LieGroupSpec>, b: &Arc<LieGroupSpec>) {
    assert!(
        Arc::ptr_eq(a, b)
            || (a.name == b.name && a.dim_algebra == b.dim_algebra && a.dim_matrix == b.dim_matrix),
        "operands belong to different group specs ({} vs {})",
        a.name,
        b.name
    );
}

/// Coordinates of a Lie-algebra element in the spec's generator basis.
#[derive(Debug, Clone)]
pub struct AlgebraVector {
    spec: Arc<LieGroupSpec>,
    coords: DVector<f64>,
}

impl AlgebraVector {
    pub fn new(spec: &Arc<LieGroupSpec>, coords: &[f64]) -> Result<Self, LieError> {
        if coords.len() != spec.dim_algebra {
            return Err(LieError::DimensionMismatch {
                expected: spec.dim_algebra,
                got: coords.len(),
            });
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(LieError::NonFinite);
        }
        Ok(Self {
            spec: Arc::clone(spec),
            coords: DVector::from_row_slice(coords),
        })
    }

    pub fn from_dvector(spec: &Arc<LieGroupSpec>, coords: DVector<f64>) -> Result<Self, LieError> {
        Self::new(spec, coords.as_slice())
    }

    pub fn zero(spec: &Arc<LieGroupSpec>) -> Self {
        Self {
            spec: Arc::clone(spec),
            coords: DVector::zeros(spec.dim_algebra),
        }
    }

    /// The i-th basis direction.
    pub fn basis(spec: &Arc<LieGroupSpec>, i: usize) -> Self {
        let mut coords = DVector::zeros(spec.dim_algebra);
        coords[i] = 1.0;
        Self {
            spec: Arc::clone(spec),
            coords,
        }
    }

    pub fn spec(&self) -> &Arc<LieGroupSpec> {
        &self.spec
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn as_slice(&self) -> &[f64] {
        self.coords.as_slice()
    }

    /// Euclidean norm of the basis coordinates.
    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        assert_same_spec(&self.spec, &other.spec);
        self.coords.dot(&other.coords)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            spec: Arc::clone(&self.spec),
            coords: &self.coords * s,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_same_spec(&self.spec, &other.spec);
        Self {
            spec: Arc::clone(&self.spec),
            coords: &self.coords + &other.coords,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_same_spec(&self.spec, &other.spec);
        Self {
            spec: Arc::clone(&self.spec),
            coords: &self.coords - &other.coords,
        }
    }

    /// Matrix representative in the ambient algebra.
    pub fn hat(&self) -> DMatrix<f64> {
        self.spec
            .hat(self.coords.as_slice())
            .expect("coordinates validated at construction")
    }

    /// Lie bracket with `other`, computed from the structure constants.
    pub fn bracket(&self, other: &Self) -> Self {
        assert_same_spec(&self.spec, &other.spec);
        Self {
            spec: Arc::clone(&self.spec),
            coords: self.spec.bracket_coords(&self.coords, &other.coords),
        }
    }

    /// Matrix of the map `v -> [self, v]` on basis coordinates.
    pub fn ad_matrix(&self) -> LinearOperator {
        let n = self.spec.dim_algebra;
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut basis = DVector::zeros(n);
            basis[j] = 1.0;
            let col = self.spec.bracket_coords(&self.coords, &basis);
            m.set_column(j, &col);
        }
        LinearOperator {
            spec: Arc::clone(&self.spec),
            matrix: m,
        }
    }

    /// Exponential onto the group (closed form on SE(2), scaling-and-squaring
    /// otherwise).
    pub fn exp(&self) -> GroupElement {
        let matrix = match self.spec.kind {
            GroupKind::Se2 => se2_exp(self.coords[0], self.coords[1], self.coords[2]),
            GroupKind::Generic => generic_exp(&self.hat()),
        };
        GroupElement {
            spec: Arc::clone(&self.spec),
            matrix,
        }
    }
}

/// A square matrix with a spec reference, constrained to the group's matrix
/// variety.
#[derive(Debug, Clone)]
pub struct GroupElement {
    spec: Arc<LieGroupSpec>,
    matrix: DMatrix<f64>,
}

impl GroupElement {
    pub fn identity(spec: &Arc<LieGroupSpec>) -> Self {
        Self {
            spec: Arc::clone(spec),
            matrix: DMatrix::identity(spec.dim_matrix, spec.dim_matrix),
        }
    }

    /// Wraps a raw matrix, validating the SE(2) variety (orthonormal rotation
    /// block, unit determinant, affine bottom row) when the group carries
    /// closed forms. Generic groups are only checked for shape and finiteness.
    pub fn from_matrix(spec: &Arc<LieGroupSpec>, matrix: DMatrix<f64>) -> Result<Self, LieError> {
        let m = spec.dim_matrix;
        if matrix.nrows() != m || matrix.ncols() != m {
            return Err(LieError::MatrixShape {
                expected: m,
                got_rows: matrix.nrows(),
                got_cols: matrix.ncols(),
            });
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(LieError::NonFinite);
        }
        if spec.kind == GroupKind::Se2 {
            let r = matrix.view((0, 0), (2, 2));
            let ortho = (r * r.transpose() - DMatrix::identity(2, 2)).norm();
            if ortho > GROUP_TOL {
                return Err(LieError::NotInGroup(format!(
                    "rotation block not orthonormal (residual {ortho:.3e})"
                )));
            }
            let det = r[(0, 0)] * r[(1, 1)] - r[(0, 1)] * r[(1, 0)];
            if (det - 1.0).abs() > GROUP_TOL {
                return Err(LieError::NotInGroup(format!("determinant {det} != 1")));
            }
            let row_ok = matrix[(2, 0)].abs() <= GROUP_TOL
                && matrix[(2, 1)].abs() <= GROUP_TOL
                && (matrix[(2, 2)] - 1.0).abs() <= GROUP_TOL;
            if !row_ok {
                return Err(LieError::NotInGroup("bottom row is not [0 0 1]".into()));
            }
        }
        Ok(Self {
            spec: Arc::clone(spec),
            matrix,
        })
    }

    /// SE(2) element from planar pose coordinates.
    pub fn se2_from_pose(spec: &Arc<LieGroupSpec>, x: f64, y: f64, theta: f64) -> Self {
        assert!(spec.is_se2(), "se2_from_pose requires the SE(2) basis");
        let (s, c) = theta.sin_cos();
        Self {
            spec: Arc::clone(spec),
            matrix: DMatrix::from_row_slice(3, 3, &[c, -s, x, s, c, y, 0.0, 0.0, 1.0]),
        }
    }

    pub fn spec(&self) -> &Arc<LieGroupSpec> {
        &self.spec
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Planar pose chart (x, y, heading) of an SE(2) element.
    pub fn pose(&self) -> (f64, f64, f64) {
        assert!(self.spec.is_se2(), "pose chart requires the SE(2) basis");
        (
            self.matrix[(0, 2)],
            self.matrix[(1, 2)],
            self.matrix[(1, 0)].atan2(self.matrix[(0, 0)]),
        )
    }

    pub fn compose(&self, other: &Self) -> Self {
        assert_same_spec(&self.spec, &other.spec);
        Self {
            spec: Arc::clone(&self.spec),
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn inverse(&self) -> Self {
        let matrix = match self.spec.kind {
            GroupKind::Se2 => {
                // (R, t)^-1 = (R^T, -R^T t)
                let m = &self.matrix;
                let (c, s) = (m[(0, 0)], m[(1, 0)]);
                let (x, y) = (m[(0, 2)], m[(1, 2)]);
                DMatrix::from_row_slice(
                    3,
                    3,
                    &[
                        c,
                        s,
                        -(c * x + s * y),
                        -s,
                        c,
                        s * x - c * y,
                        0.0,
                        0.0,
                        1.0,
                    ],
                )
            }
            GroupKind::Generic => self
                .matrix
                .clone()
                .try_inverse()
                .expect("group element must be invertible"),
        };
        Self {
            spec: Arc::clone(&self.spec),
            matrix,
        }
    }

    /// Logarithm back to the algebra. Errors at the SE(2) cut locus
    /// (|heading| within 1e-9 of pi) and when the generic series fails to
    /// converge.
    pub fn log(&self) -> Result<AlgebraVector, LieError> {
        match self.spec.kind {
            GroupKind::Se2 => {
                let coords = se2_log(&self.matrix)?;
                Ok(AlgebraVector {
                    spec: Arc::clone(&self.spec),
                    coords,
                })
            }
            GroupKind::Generic => {
                let x = generic_log(&self.matrix)?;
                let coords = self.spec.project_coords(&x, true)?;
                Ok(AlgebraVector {
                    spec: Arc::clone(&self.spec),
                    coords,
                })
            }
        }
    }

    /// Linear action of conjugation by this element on algebra coordinates:
    /// `exp(adjoint_right(g) · v) = g · exp(v) · g⁻¹`.
    pub fn adjoint_right(&self) -> LinearOperator {
        let n = self.spec.dim_algebra;
        let matrix = match self.spec.kind {
            GroupKind::Se2 => {
                let (x, y, theta) = self.pose();
                let (s, c) = theta.sin_cos();
                DMatrix::from_row_slice(3, 3, &[c, -s, y, s, c, -x, 0.0, 0.0, 1.0])
            }
            GroupKind::Generic => {
                let inv = self.inverse();
                let mut m = DMatrix::zeros(n, n);
                for j in 0..n {
                    let conj = &self.matrix * self.spec.generator(j) * &inv.matrix;
                    let col = self
                        .spec
                        .project_coords(&conj, false)
                        .expect("adjoint image stays in the algebra");
                    m.set_column(j, &col);
                }
                m
            }
        };
        LinearOperator {
            spec: Arc::clone(&self.spec),
            matrix,
        }
    }

    /// Largest singular value of [`Self::adjoint_right`].
    pub fn adjoint_operator_norm(&self) -> f64 {
        self.adjoint_right().operator_norm()
    }
}

/// Closed-form induced 2-norm of the SE(2) adjoint: `(r + sqrt(r^2 + 4)) / 2`
/// with `r` the translation magnitude. Independent route against the SVD in
/// [`GroupElement::adjoint_operator_norm`].
pub fn se2_adjoint_norm_closed_form(g: &GroupElement) -> f64 {
    let (x, y, _) = g.pose();
    let r = x.hypot(y);
    0.5 * (r + (r * r + 4.0).sqrt())
}

/// A linear map on algebra coordinates.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    spec: Arc<LieGroupSpec>,
    matrix: DMatrix<f64>,
}

impl LinearOperator {
    pub fn identity(spec: &Arc<LieGroupSpec>) -> Self {
        Self {
            spec: Arc::clone(spec),
            matrix: DMatrix::identity(spec.dim_algebra, spec.dim_algebra),
        }
    }

    pub fn from_matrix(spec: &Arc<LieGroupSpec>, matrix: DMatrix<f64>) -> Result<Self, LieError> {
        let n = spec.dim_algebra;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(LieError::MatrixShape {
                expected: n,
                got_rows: matrix.nrows(),
                got_cols: matrix.ncols(),
            });
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(LieError::NonFinite);
        }
        Ok(Self {
            spec: Arc::clone(spec),
            matrix,
        })
    }

    pub fn spec(&self) -> &Arc<LieGroupSpec> {
        &self.spec
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, v: &AlgebraVector) -> AlgebraVector {
        assert_same_spec(&self.spec, &v.spec);
        AlgebraVector {
            spec: Arc::clone(&self.spec),
            coords: &self.matrix * &v.coords,
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        assert_same_spec(&self.spec, &other.spec);
        Self {
            spec: Arc::clone(&self.spec),
            matrix: &self.matrix * &other.matrix,
        }
    }

    /// Induced 2-norm (largest singular value).
    pub fn operator_norm(&self) -> f64 {
        self.matrix
            .clone()
            .svd(false, false)
            .singular_values
            .max()
    }
}

// ---------------------------------------------------------------------------
// SE(2) closed forms
// ---------------------------------------------------------------------------

/// Coefficients A = sin(t)/t and B = (1 - cos(t))/t with Taylor fallback.
fn se2_v_coeffs(theta: f64) -> (f64, f64) {
    if theta.abs() < SMALL_ANGLE {
        let t2 = theta * theta;
        (
            1.0 - t2 / 6.0 + t2 * t2 / 120.0,
            theta / 2.0 - theta * t2 / 24.0,
        )
    } else {
        ((theta.sin()) / theta, (1.0 - theta.cos()) / theta)
    }
}

fn se2_exp(forward: f64, lateral: f64, theta: f64) -> DMatrix<f64> {
    let (a, b) = se2_v_coeffs(theta);
    let tx = a * forward - b * lateral;
    let ty = b * forward + a * lateral;
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(3, 3, &[c, -s, tx, s, c, ty, 0.0, 0.0, 1.0])
}

fn se2_log(m: &DMatrix<f64>) -> Result<DVector<f64>, LieError> {
    let theta = m[(1, 0)].atan2(m[(0, 0)]);
    if theta.abs() >= std::f64::consts::PI - 1e-9 {
        return Err(LieError::CutLocus { angle: theta });
    }
    let (a, b) = se2_v_coeffs(theta);
    let det = a * a + b * b;
    let (tx, ty) = (m[(0, 2)], m[(1, 2)]);
    // V^{-1} = [[A, B], [-B, A]] / (A^2 + B^2)
    let forward = (a * tx + b * ty) / det;
    let lateral = (-b * tx + a * ty) / det;
    Ok(DVector::from_row_slice(&[forward, lateral, theta]))
}

// ---------------------------------------------------------------------------
// Generic dense exp/log for small matrices
// ---------------------------------------------------------------------------

/// Scaling-and-squaring Taylor exponential. Squaring count follows
/// ceil(log2(norm / 0.5)) so the scaled argument has norm <= 0.5.
fn generic_exp(x: &DMatrix<f64>) -> DMatrix<f64> {
    let m = x.nrows();
    let norm = x.norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = x / 2f64.powi(squarings);
    let mut term = DMatrix::identity(m, m);
    let mut acc = DMatrix::identity(m, m);
    for k in 1..=40 {
        term = &term * &scaled / k as f64;
        acc += &term;
        if term.norm() <= 1e-18 * acc.norm() {
            break;
        }
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    acc
}

/// Matrix square root by the Denman-Beavers iteration.
fn matrix_sqrt(a: &DMatrix<f64>) -> Result<DMatrix<f64>, LieError> {
    let m = a.nrows();
    let mut x = a.clone();
    let mut y = DMatrix::identity(m, m);
    for _ in 0..100 {
        let xi = x.clone().try_inverse().ok_or(LieError::LogDiverged)?;
        let yi = y.clone().try_inverse().ok_or(LieError::LogDiverged)?;
        let xn = (&x + &yi) * 0.5;
        let yn = (&y + &xi) * 0.5;
        let delta = (&xn - &x).norm();
        x = xn;
        y = yn;
        if delta <= 1e-15 * x.norm().max(1.0) {
            return Ok(x);
        }
    }
    Err(LieError::LogDiverged)
}

/// Inverse scaling-and-squaring logarithm: repeated square roots until the
/// argument is near the identity, then an order-7 Mercator series.
fn generic_log(g: &DMatrix<f64>) -> Result<DMatrix<f64>, LieError> {
    let m = g.nrows();
    let id = DMatrix::identity(m, m);
    let mut a = g.clone();
    let mut doublings = 0u32;
    // order-7 truncation error is ~||a - id||^8 / 8; 0.01 keeps it near 1e-17
    while (&a - &id).norm() > 0.01 {
        if doublings >= 60 {
            return Err(LieError::LogDiverged);
        }
        a = matrix_sqrt(&a)?;
        doublings += 1;
    }
    let y = &a - &id;
    let mut acc = DMatrix::zeros(m, m);
    let mut power = y.clone();
    for k in 1..=7 {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        acc += &power * (sign / k as f64);
        power = &power * &y;
    }
    Ok(acc * 2f64.powi(doublings as i32))
}
