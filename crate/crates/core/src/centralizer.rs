//! The commuting subspace of a motion generator and operations built on it:
//! membership tests, ideal/residual splits, closure checks and defense
//! ranking of candidate inputs.
//!
//! For a generator `f` the subspace is the kernel of the bracket map
//! `v -> [f, v]`; exactly the displacements whose conjugation by the flow of
//! `f` is trivial. Its orthogonal complement (Euclidean coordinate inner
//! product) defines the unique ideal/residual split used throughout the
//! attack pipeline.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::lie::{AlgebraVector, GroupElement, LieError};

/// Default relative singular-value cutoff for kernel extraction.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;
/// Absolute floor used when the bracket map is numerically zero.
const RANK_FLOOR: f64 = 1e-12;
/// Span-membership tolerance for closure and confinement checks.
const SPAN_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CentralizerError {
    #[error("no candidate inputs supplied")]
    EmptyCandidates,
    #[error("displacement is not inside the subspace (residual {residual:.3e})")]
    NotInSubspace { residual: f64 },
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// Orthonormal basis of the subspace commuting with a fixed generator,
/// together with the singular values of the bracket map it was cut from.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    basis: DMatrix<f64>,
    singular_values: DVector<f64>,
    rank_tolerance: f64,
    generator: AlgebraVector,
}

impl SubspaceBasis {
    /// Number of independent commuting directions.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// `n x d` matrix with orthonormal columns.
    pub fn basis_matrix(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// The j-th basis direction as an algebra vector.
    pub fn column(&self, j: usize) -> AlgebraVector {
        AlgebraVector::from_dvector(self.generator.spec(), self.basis.column(j).into_owned())
            .expect("basis columns are finite")
    }

    pub fn singular_values(&self) -> &DVector<f64> {
        &self.singular_values
    }

    pub fn rank_tolerance(&self) -> f64 {
        self.rank_tolerance
    }

    /// The generator this subspace was computed for.
    pub fn generator(&self) -> &AlgebraVector {
        &self.generator
    }

    /// Norm of the component of `v` outside the subspace.
    pub fn membership_residual(&self, v: &AlgebraVector) -> f64 {
        let coords = v.coords();
        let projected = &self.basis * (self.basis.transpose() * coords);
        (coords - projected).norm()
    }

    /// Orthogonal projection of `v` onto the subspace.
    pub fn project(&self, v: &AlgebraVector) -> AlgebraVector {
        let projected = &self.basis * (self.basis.transpose() * v.coords());
        AlgebraVector::from_dvector(v.spec(), projected).expect("projection is finite")
    }
}

/// Ideal (in-subspace) and residual (orthogonal-complement) parts of a
/// displacement. The two always reconstruct the input exactly.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub ideal: AlgebraVector,
    pub residual: AlgebraVector,
}

/// Verdict and raw numbers from a commutation test.
#[derive(Debug, Clone, Copy)]
pub struct TransferReport {
    pub transferable: bool,
    pub bracket_norm: f64,
    pub threshold: f64,
}

/// A candidate input annotated with the subspace its generator leaves open.
#[derive(Debug, Clone)]
pub struct DefenseRanking<T> {
    pub input: T,
    pub dim: usize,
    pub subspace: SubspaceBasis,
}

/// Orthonormal kernel basis of the bracket map of `generator`, via SVD.
/// Singular values below `tol * sigma_max` count as zero; a zero generator
/// yields the full space with the identity basis.
pub fn commuting_subspace(generator: &AlgebraVector, tol: f64) -> SubspaceBasis {
    assert!(tol > 0.0 && tol.is_finite(), "rank tolerance must be positive");
    let n = generator.spec().dim_algebra();
    let ad = generator.ad_matrix();
    let svd = ad.matrix().clone().svd(false, true);
    let sv = &svd.singular_values;
    let sigma_max = sv.max();

    if sigma_max <= RANK_FLOOR {
        return SubspaceBasis {
            basis: DMatrix::identity(n, n),
            singular_values: DVector::zeros(n),
            rank_tolerance: tol,
            generator: generator.clone(),
        };
    }

    let threshold = (tol * sigma_max).max(RANK_FLOOR);
    let rank = sv.iter().filter(|s| **s > threshold).count();
    let v_t = svd.v_t.expect("SVD with right singular vectors");
    let d = n - rank;
    let mut basis = DMatrix::zeros(n, d);
    for (col, row) in (rank..n).enumerate() {
        basis.set_column(col, &v_t.row(row).transpose());
    }
    let mut singular_values = DVector::zeros(n);
    for (i, s) in sv.iter().enumerate() {
        singular_values[i] = *s;
    }
    SubspaceBasis {
        basis,
        singular_values,
        rank_tolerance: tol,
        generator: generator.clone(),
    }
}

/// Tests whether `displacement` commutes with `generator`:
/// `|| [generator, displacement] || <= tol * max(1, ||generator|| * ||displacement||)`.
pub fn is_transferable(
    displacement: &AlgebraVector,
    generator: &AlgebraVector,
    tol: f64,
) -> TransferReport {
    let bracket_norm = generator.bracket(displacement).norm();
    let threshold = tol * (generator.norm() * displacement.norm()).max(1.0);
    TransferReport {
        transferable: bracket_norm <= threshold,
        bracket_norm,
        threshold,
    }
}

/// Splits a displacement into its orthogonal projection onto the subspace
/// and the complement remainder.
pub fn decompose(displacement: &AlgebraVector, subspace: &SubspaceBasis) -> Decomposition {
    let ideal = subspace.project(displacement);
    let residual = displacement.sub(&ideal);
    Decomposition { ideal, residual }
}

/// Checks that the subspace is closed under the bracket: every pairwise
/// bracket of basis vectors must project back into the span.
pub fn jacobi_closure_check(subspace: &SubspaceBasis) -> bool {
    let d = subspace.dim();
    for i in 0..d {
        for j in (i + 1)..d {
            let br = subspace.column(i).bracket(&subspace.column(j));
            if subspace.membership_residual(&br) > SPAN_TOL * br.norm().max(1.0) {
                return false;
            }
        }
    }
    true
}

/// Checks that displacing `state` by an in-subspace vector stays inside the
/// coset through `state`: the relative pose `state⁻¹ · (state · exp(v))` must
/// log back into the span. The membership precondition on `v` is reported as
/// a distinct error, not a `false`.
pub fn leaf_confinement_check(
    state: &GroupElement,
    displacement: &AlgebraVector,
    subspace: &SubspaceBasis,
) -> Result<bool, CentralizerError> {
    let residual = subspace.membership_residual(displacement);
    if residual > SPAN_TOL * displacement.norm().max(1.0) {
        return Err(CentralizerError::NotInSubspace { residual });
    }
    let displaced = state.compose(&displacement.exp());
    let relative = state.inverse().compose(&displaced);
    let log = relative.log()?;
    Ok(subspace.membership_residual(&log) <= SPAN_TOL * log.norm().max(1.0))
}

/// Ranks candidate inputs by how few commuting directions they leave an
/// attacker (ascending subspace dimension, stable under ties). The map from
/// input to motion generator is supplied by the caller.
pub fn defense_rank_inputs<T, F>(
    candidates: &[T],
    to_generator: F,
    tol: f64,
) -> Result<Vec<DefenseRanking<T>>, CentralizerError>
where
    T: Clone,
    F: Fn(&T) -> AlgebraVector,
{
    if candidates.is_empty() {
        return Err(CentralizerError::EmptyCandidates);
    }
    let mut ranked: Vec<DefenseRanking<T>> = candidates
        .iter()
        .map(|input| {
            let subspace = commuting_subspace(&to_generator(input), tol);
            DefenseRanking {
                input: input.clone(),
                dim: subspace.dim(),
                subspace,
            }
        })
        .collect();
    ranked.sort_by_key(|r| r.dim);
    Ok(ranked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{generator as dubins_generator, ControlInput};
    use crate::lie::LieGroupSpec;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn se2() -> Arc<LieGroupSpec> {
        LieGroupSpec::se2()
    }

    fn vec3(spec: &Arc<LieGroupSpec>, f: f64, l: f64, t: f64) -> AlgebraVector {
        AlgebraVector::new(spec, &[f, l, t]).unwrap()
    }

    /// Sine of the largest principal angle between the computed span and an
    /// analytic one, measured through projection residuals both ways.
    fn span_gap(computed: &SubspaceBasis, analytic: &[AlgebraVector]) -> f64 {
        let mut worst: f64 = 0.0;
        for v in analytic {
            let unit = v.scale(1.0 / v.norm());
            worst = worst.max(computed.membership_residual(&unit));
        }
        // and the reverse inclusion, using the analytic projector
        let spec = computed.generator().spec().clone();
        let n = spec.dim_algebra();
        let mut b = DMatrix::zeros(n, analytic.len());
        for (j, v) in analytic.iter().enumerate() {
            b.set_column(j, &(v.coords() / v.norm()));
        }
        // analytic vectors are orthogonal in every case used here
        for j in 0..computed.dim() {
            let col = computed.column(j);
            let proj = &b * (b.transpose() * col.coords());
            worst = worst.max((col.coords() - proj).norm());
        }
        worst
    }

    #[test]
    fn straight_motion_leaves_translations() {
        let spec = se2();
        let sub = commuting_subspace(&vec3(&spec, 10.0, 0.0, 0.0), DEFAULT_RANK_TOL);
        assert_eq!(sub.dim(), 2);
        let analytic = vec![vec3(&spec, 1.0, 0.0, 0.0), vec3(&spec, 0.0, 1.0, 0.0)];
        assert!(span_gap(&sub, &analytic) < 1e-9);
    }

    #[test]
    fn curved_motion_collapses_to_one_direction() {
        let spec = se2();
        let (v, w) = (10.0, 0.5);
        let sub = commuting_subspace(&vec3(&spec, v, 0.0, w), DEFAULT_RANK_TOL);
        assert_eq!(sub.dim(), 1);
        let analytic = vec![vec3(&spec, v / w, 0.0, 1.0)];
        assert!(span_gap(&sub, &analytic) < 1e-9);
    }

    #[test]
    fn zero_generator_keeps_the_full_space() {
        let spec = se2();
        let sub = commuting_subspace(&AlgebraVector::zero(&spec), DEFAULT_RANK_TOL);
        assert_eq!(sub.dim(), 3);
        assert_relative_eq!(
            (sub.basis_matrix() - DMatrix::identity(3, 3)).norm(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn kernel_matches_analytic_kernel_randomised() {
        let spec = se2();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let v: f64 = rng.random_range(0.5..20.0);
            let straight = rng.random_bool(0.3);
            let w: f64 = if straight {
                0.0
            } else {
                let mag: f64 = rng.random_range(0.1..2.0);
                if rng.random_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            };
            let f = vec3(&spec, v, 0.0, w);
            let sub = commuting_subspace(&f, DEFAULT_RANK_TOL);
            let analytic = if straight {
                vec![vec3(&spec, 1.0, 0.0, 0.0), vec3(&spec, 0.0, 1.0, 0.0)]
            } else {
                vec![vec3(&spec, v / w, 0.0, 1.0)]
            };
            assert_eq!(sub.dim(), analytic.len());
            assert!(span_gap(&sub, &analytic) < 1e-9);

            // every basis column genuinely commutes with the generator
            let sigma_max = sub.singular_values().max();
            for j in 0..sub.dim() {
                let residual = f.bracket(&sub.column(j)).norm();
                assert!(residual < sub.rank_tolerance() * sigma_max.max(1.0));
            }

            // columns are orthonormal
            let b = sub.basis_matrix();
            let gram = b.transpose() * b;
            assert!((gram - DMatrix::identity(sub.dim(), sub.dim())).norm() < 1e-12);
        }
    }

    #[test]
    fn subspace_dimension_is_scale_invariant() {
        let spec = se2();
        let f = vec3(&spec, 3.0, 0.0, -0.7);
        for s in [1e-3, 0.5, 1.0, 40.0, 1e4] {
            let sub = commuting_subspace(&f.scale(s), DEFAULT_RANK_TOL);
            assert_eq!(sub.dim(), 1, "dimension changed at scale {s}");
        }
    }

    #[test]
    fn basis_vectors_are_adjoint_invariant() {
        let spec = se2();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..50 {
            let v: f64 = rng.random_range(0.5..15.0);
            let w: f64 = rng.random_range(0.2..1.5);
            let f = vec3(&spec, v, 0.0, w);
            let sub = commuting_subspace(&f, DEFAULT_RANK_TOL);
            for j in 0..sub.dim() {
                let b = sub.column(j);
                for s in [0.1, 0.5, 1.0] {
                    let flow = f.scale(s).exp();
                    for g in [flow.clone(), flow.inverse()] {
                        let pushed = g.adjoint_right().apply(&b).exp();
                        assert!(
                            (pushed.matrix() - b.exp().matrix()).norm() < 1e-9,
                            "basis vector moved under the flow adjoint"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn transferable_examples() {
        let spec = se2();
        let f = vec3(&spec, 13.96, 0.0, -1.02);

        let along = vec3(&spec, 13.96 / -1.02, 0.0, 1.0).scale(0.4);
        assert!(is_transferable(&along, &f, 1e-9).transferable);
        assert!(is_transferable(&f, &f, 1e-9).transferable);

        let lateral = vec3(&spec, 0.0, 1.0, 0.0);
        let report = is_transferable(&lateral, &f, 1e-9);
        assert!(!report.transferable);
        assert_relative_eq!(report.bracket_norm, 1.02, epsilon = 1e-12);
    }

    #[test]
    fn decompose_straight_motion_example() {
        let spec = se2();
        let sub = commuting_subspace(&vec3(&spec, 5.0, 0.0, 0.0), DEFAULT_RANK_TOL);
        let split = decompose(&vec3(&spec, 1.0, 2.0, 0.3), &sub);
        assert!((split.ideal.coords() - vec3(&spec, 1.0, 2.0, 0.0).coords()).norm() < 1e-12);
        assert!((split.residual.coords() - vec3(&spec, 0.0, 0.0, 0.3).coords()).norm() < 1e-12);

        // reconstruction and orthogonality
        let back = split.ideal.add(&split.residual);
        assert!((back.coords() - vec3(&spec, 1.0, 2.0, 0.3).coords()).norm() < 1e-15);
        assert!(split.ideal.dot(&split.residual).abs() < 1e-12);

        // idempotence: the ideal part has no residual left
        let again = decompose(&split.ideal, &sub);
        assert!(again.residual.norm() < 1e-12);
    }

    #[test]
    fn decompose_pure_cases() {
        let spec = se2();
        let sub = commuting_subspace(&vec3(&spec, 5.0, 0.0, 0.0), DEFAULT_RANK_TOL);
        let inside = vec3(&spec, 2.0, -1.0, 0.0);
        assert!(decompose(&inside, &sub).residual.norm() < 1e-12);
        let outside = vec3(&spec, 0.0, 0.0, 0.7);
        assert!(decompose(&outside, &sub).ideal.norm() < 1e-12);
    }

    #[test]
    fn closure_checks() {
        let spec = se2();
        let straight = commuting_subspace(&vec3(&spec, 4.0, 0.0, 0.0), DEFAULT_RANK_TOL);
        assert!(jacobi_closure_check(&straight));
        let curved = commuting_subspace(&vec3(&spec, 4.0, 0.0, 0.9), DEFAULT_RANK_TOL);
        assert!(jacobi_closure_check(&curved));
        let full = commuting_subspace(&AlgebraVector::zero(&spec), DEFAULT_RANK_TOL);
        assert!(jacobi_closure_check(&full));
    }

    #[test]
    fn leaf_confinement() {
        let spec = se2();
        let sub = commuting_subspace(&vec3(&spec, 5.0, 0.0, 0.0), DEFAULT_RANK_TOL);
        let x = GroupElement::se2_from_pose(&spec, 4.0, -2.0, 1.1);

        assert!(leaf_confinement_check(&x, &AlgebraVector::zero(&spec), &sub).unwrap());
        assert!(leaf_confinement_check(&x, &vec3(&spec, 3.0, -1.0, 0.0), &sub).unwrap());

        let off = vec3(&spec, 0.0, 0.0, 0.4);
        assert!(matches!(
            leaf_confinement_check(&x, &off, &sub),
            Err(CentralizerError::NotInSubspace { .. })
        ));
    }

    #[test]
    fn defense_ranking_prefers_turns() {
        let spec = se2();
        let candidates = vec![
            ControlInput::new(10.0, 0.0),
            ControlInput::new(10.0, 0.5),
        ];
        let ranked = defense_rank_inputs(
            &candidates,
            |u| dubins_generator(u, &spec),
            DEFAULT_RANK_TOL,
        )
        .unwrap();
        assert_eq!(ranked[0].input.omega(), 0.5);
        assert_eq!(ranked[0].dim, 1);
        assert_eq!(ranked[1].dim, 2);

        let single = defense_rank_inputs(
            &candidates[..1],
            |u| dubins_generator(u, &spec),
            DEFAULT_RANK_TOL,
        )
        .unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].dim, 2);

        // ties keep the original order (stable sort): three straight inputs
        // share dim 2 and must come back in the order supplied
        let ties = vec![
            ControlInput::new(7.0, 0.0),
            ControlInput::new(3.0, 0.0),
            ControlInput::new(11.0, 0.0),
        ];
        let ranked = defense_rank_inputs(&ties, |u| dubins_generator(u, &spec), DEFAULT_RANK_TOL)
            .unwrap();
        assert!(ranked.iter().all(|r| r.dim == 2));
        assert_eq!(
            ranked.iter().map(|r| r.input.v()).collect::<Vec<_>>(),
            vec![7.0, 3.0, 11.0]
        );

        // all-zero inputs leave the whole space open
        let zeros = vec![ControlInput::new(0.0, 0.0); 3];
        let ranked = defense_rank_inputs(
            &zeros,
            |u| dubins_generator(u, &spec),
            DEFAULT_RANK_TOL,
        )
        .unwrap();
        assert!(ranked.iter().all(|r| r.dim == 3));

        let empty: Vec<ControlInput> = vec![];
        assert!(matches!(
            defense_rank_inputs(&empty, |u| dubins_generator(u, &spec), DEFAULT_RANK_TOL),
            Err(CentralizerError::EmptyCandidates)
        ));
    }
}
