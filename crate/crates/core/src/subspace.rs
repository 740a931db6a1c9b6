//! Linear spans of matrices with orthonormal bases, projector comparisons,
//! and closure under products and adjoints. This is the finite-dimensional
//! stand-in for "closed linear span" arguments: every span equality a
//! theorem asserts becomes a projector-distance check here.

use crate::error::{Error, Result};
use crate::scalar::{c_zero, to_f64, CMat, CVec, Cx, Real};

/// Relative singular-value cutoff for span ranks.
pub const SPAN_TOL: f64 = 1e-9;
/// Default Frobenius tolerance for projector comparisons.
pub const SUBSPACE_TOL: f64 = 1e-8;

/// A linear subspace of d×d matrices, stored as an orthonormal set of
/// vectorized matrices (rows of `basis`, each of length d²).
#[derive(Debug, Clone)]
pub struct OperatorSubspace<T: Real> {
    dim: usize,
    basis: CMat<T>,
}

pub fn vectorize<T: Real>(m: &CMat<T>) -> CVec<T> {
    CVec::from_column_slice(m.as_slice())
}

pub fn unvectorize<T: Real>(v: &CVec<T>, d: usize) -> CMat<T> {
    CMat::from_column_slice(d, d, v.as_slice())
}

/// Result of a closure run.
#[derive(Debug, Clone)]
pub struct ClosureOutcome<T: Real> {
    pub subspace: OperatorSubspace<T>,
    pub iterations: usize,
    pub stabilized: bool,
}

/// Orthonormalizes the given vectors by modified Gram-Schmidt with a
/// re-orthogonalization pass, dropping any vector whose orthogonal residual
/// falls below tol · (largest input norm). Every output is an explicit
/// combination of the inputs, so the result can never leave their span; a
/// vectorized SVD has no such guarantee once singular values collide.
pub(crate) fn orthonormal_rows<T: Real>(rows: &[CVec<T>], tol: f64) -> Vec<CVec<T>> {
    let mut top = T::zero();
    for r in rows {
        let n = r.norm();
        if n > top {
            top = n;
        }
    }
    if !(to_f64(top) > 0.0) {
        return Vec::new();
    }
    let cut = r_tol::<T>(tol) * top;
    let one = Cx::new(T::one(), T::zero());
    let mut basis: Vec<CVec<T>> = Vec::new();
    for r in rows {
        let mut w = r.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&w);
                w.axpy(-c, b, one);
            }
        }
        let n = w.norm();
        if n > cut {
            basis.push(w.unscale(n));
        }
    }
    basis
}

/// Least-squares coefficients against a fixed full-column-rank matrix, by
/// twice-iterated Gram-Schmidt QR. The Q columns are explicit combinations
/// of the input columns, so the factorization cannot drift out of the
/// column span the way a vectorized SVD can once singular values collide.
pub(crate) struct LsqSolver<T: Real> {
    q: Vec<CVec<T>>,
    r: CMat<T>,
}

impl<T: Real> LsqSolver<T> {
    pub(crate) fn new(a: &CMat<T>) -> Result<Self> {
        let k = a.ncols();
        let mut top = T::zero();
        for j in 0..k {
            let n = a.column(j).norm();
            if n > top {
                top = n;
            }
        }
        if k == 0 || !(to_f64(top) > 0.0) {
            return Err(Error::InvalidInput("least squares needs nonzero columns".into()));
        }
        let one = Cx::new(T::one(), T::zero());
        let mut q: Vec<CVec<T>> = Vec::with_capacity(k);
        let mut r = CMat::<T>::from_element(k, k, c_zero());
        for j in 0..k {
            let mut w = a.column(j).into_owned();
            for _ in 0..2 {
                for (i, qi) in q.iter().enumerate() {
                    let c = qi.dotc(&w);
                    r[(i, j)] += c;
                    w.axpy(-c, qi, one);
                }
            }
            let n = w.norm();
            if n <= r_tol::<T>(1e-12) * top {
                return Err(Error::Numerical("dependent columns in least squares".into()));
            }
            r[(j, j)] = Cx::new(n, T::zero());
            q.push(w.unscale(n));
        }
        Ok(LsqSolver { q, r })
    }

    /// argmin_x ‖A·x − b‖ via x = R⁻¹·Q^H·b.
    pub(crate) fn solve(&self, b: &CVec<T>) -> CVec<T> {
        let k = self.q.len();
        let mut x = CVec::<T>::from_element(k, c_zero());
        for i in 0..k {
            x[i] = self.q[i].dotc(b);
        }
        for j in (0..k).rev() {
            let mut acc = x[j];
            for l in (j + 1)..k {
                acc -= self.r[(j, l)] * x[l];
            }
            x[j] = acc / self.r[(j, j)];
        }
        x
    }
}

impl<T: Real> OperatorSubspace<T> {
    /// Orthonormal span of the given matrices. Rank is the number of
    /// inputs carrying an orthogonal residual above tol · (largest norm).
    pub fn span_of(mats: &[CMat<T>], tol: f64) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::InvalidInput("span of empty list".into()));
        }
        let d = mats[0].nrows();
        for m in mats {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::Dimension("span inputs must share one square dim".into()));
            }
        }
        let vd = d * d;
        let rows: Vec<CVec<T>> = mats.iter().map(vectorize).collect();
        let kept = orthonormal_rows(&rows, tol);
        let basis = CMat::<T>::from_fn(kept.len(), vd, |i, j| kept[i][j]);
        Ok(OperatorSubspace { dim: d, basis })
    }

    pub fn zero(dim: usize) -> Self {
        OperatorSubspace {
            dim,
            basis: CMat::from_element(0, dim * dim, c_zero()),
        }
    }

    /// Ambient matrix dimension d (operators are d×d).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.nrows()
    }

    /// The orthonormal basis as matrices.
    pub fn basis_matrices(&self) -> Vec<CMat<T>> {
        (0..self.rank())
            .map(|i| unvectorize(&self.basis.row(i).transpose(), self.dim))
            .collect()
    }

    /// Orthogonal projection of a vectorized matrix onto the span.
    fn project_vec(&self, v: &CVec<T>) -> CVec<T> {
        if self.rank() == 0 {
            return CVec::from_element(v.len(), c_zero());
        }
        // P v = Bᵀ·conj(B)·v, computed without materializing conj(B).
        let coeffs = (&self.basis * v.conjugate()).conjugate();
        self.basis.tr_mul(&coeffs)
    }

    /// Relative residual of x against the span: ‖x − Px‖ / ‖x‖ (1 for x = 0
    /// against the zero span convention does not arise; x = 0 gives 0).
    pub fn contains_residual(&self, x: &CMat<T>) -> T {
        let v = vectorize(x);
        let norm = v.norm();
        if to_f64(norm) == 0.0 {
            return T::zero();
        }
        let resid = &v - self.project_vec(&v);
        resid.norm() / norm
    }

    pub fn contains_matrix(&self, x: &CMat<T>, tol: f64) -> bool {
        to_f64(self.contains_residual(x)) < tol
    }

    /// ‖(1−P_self)·P_other‖_F: zero iff other ⊆ self.
    pub fn containment_defect(&self, other: &Self) -> Result<T> {
        if self.dim != other.dim {
            return Err(Error::Dimension("subspace ambients differ".into()));
        }
        let mut total = T::zero();
        for i in 0..other.rank() {
            let v = other.basis.row(i).transpose();
            let resid = &v - self.project_vec(&v);
            let n = resid.norm();
            total += n * n;
        }
        Ok(total.sqrt())
    }

    pub fn contains_subspace(&self, other: &Self, tol: f64) -> Result<bool> {
        Ok(to_f64(self.containment_defect(other)?) < tol)
    }

    /// ‖P_self − P_other‖_F, evaluated exactly on an orthonormal basis of
    /// the sum space (the difference vanishes on its complement). Projection
    /// differences are taken vector-by-vector before norming, which keeps
    /// the result accurate near zero.
    pub fn projector_distance(&self, other: &Self) -> Result<T> {
        if self.dim != other.dim {
            return Err(Error::Dimension("subspace ambients differ".into()));
        }
        let total_rank = self.rank() + other.rank();
        if total_rank == 0 {
            return Ok(T::zero());
        }
        let mut rows: Vec<CVec<T>> = Vec::with_capacity(total_rank);
        for i in 0..self.rank() {
            rows.push(self.basis.row(i).transpose());
        }
        for i in 0..other.rank() {
            rows.push(other.basis.row(i).transpose());
        }
        // Directions of `other` within SPAN_TOL of `self` drop out of the
        // union basis; their contribution to the sum is quadratically small.
        let union = orthonormal_rows(&rows, SPAN_TOL);
        let mut total = T::zero();
        for w in &union {
            let diff = self.project_vec(w) - other.project_vec(w);
            let n = diff.norm();
            total += n * n;
        }
        Ok(total.sqrt())
    }

    pub fn equal(&self, other: &Self, tol: f64) -> Result<bool> {
        Ok(to_f64(self.projector_distance(other)?) < tol)
    }

    /// Span of the union of the two bases.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Dimension("subspace ambients differ".into()));
        }
        let mut mats = self.basis_matrices();
        mats.extend(other.basis_matrices());
        if mats.is_empty() {
            return Ok(Self::zero(self.dim));
        }
        Self::span_of(&mats, SPAN_TOL)
    }

    /// Iterates S ← span(S ∪ S·S ∪ S*) until the rank stops growing or cap
    /// iterations have run. Since each step contains the previous span,
    /// rank stability means the subspace is a fixed point.
    pub fn multiplicative_closure(&self, cap: usize) -> Result<ClosureOutcome<T>> {
        if cap == 0 {
            return Err(Error::InvalidInput("closure cap must be at least 1".into()));
        }
        let mut current = self.clone();
        for iter in 1..=cap {
            let mats = current.basis_matrices();
            let mut next: Vec<CMat<T>> = mats.clone();
            for a in &mats {
                next.push(a.adjoint());
                for b in &mats {
                    next.push(a * b);
                }
            }
            let grown = Self::span_of(&next, SPAN_TOL)?;
            if grown.rank() == current.rank() {
                return Ok(ClosureOutcome {
                    subspace: current,
                    iterations: iter,
                    stabilized: true,
                });
            }
            current = grown;
        }
        Ok(ClosureOutcome {
            subspace: current,
            iterations: cap,
            stabilized: false,
        })
    }

    /// Absolute residual ‖x − Px‖ of a vectorized matrix against the span.
    /// The right scale for closure checks on unit-norm basis elements,
    /// whose products may legitimately vanish (the relative residual of a
    /// noise-level product would misreport as 1).
    pub(crate) fn absolute_residual(&self, x: &CMat<T>) -> T {
        let v = vectorize(x);
        (&v - self.project_vec(&v)).norm()
    }

    /// Max residual of products b_i·b_j and adjoints b_i* against the span;
    /// near zero iff the span is a *-subalgebra (cheaper than re-spanning
    /// for large ranks). Residuals are absolute, which is calibrated here
    /// because the basis is orthonormal. `sample` bounds the number of
    /// product pairs checked (deterministic stride); 0 means all pairs.
    pub fn closure_defect(&self, sample: usize) -> T {
        let mats = self.basis_matrices();
        let r = mats.len();
        let mut worst = T::zero();
        for a in &mats {
            let d = self.absolute_residual(&a.adjoint());
            if d > worst {
                worst = d;
            }
        }
        let total = r * r;
        let step = if sample == 0 || total <= sample {
            1
        } else {
            total.div_ceil(sample)
        };
        let mut idx = 0;
        while idx < total {
            let (i, j) = (idx / r, idx % r);
            let d = self.absolute_residual(&(&mats[i] * &mats[j]));
            if d > worst {
                worst = d;
            }
            idx += step;
        }
        worst
    }

    /// Gram defect of the stored basis: ‖B·B^H − I‖ (invariant check).
    pub fn orthonormality_defect(&self) -> T {
        let r = self.rank();
        if r == 0 {
            return T::zero();
        }
        let gram = &self.basis * self.basis.adjoint();
        let mut total = T::zero();
        for i in 0..r {
            for j in 0..r {
                let expect = if i == j { T::one() } else { T::zero() };
                let d = (gram[(i, j)] - Cx::new(expect, T::zero())).norm_sqr();
                total += d;
            }
        }
        total.sqrt()
    }
}

fn r_tol<T: Real>(tol: f64) -> T {
    crate::scalar::r::<T>(tol)
}

/// A span of operators on a product space whose generators all factor as
/// (label factor on the leading legs) ⊗ (block on the trailing legs), with
/// pairwise-orthogonal label factors. The global span is then ⊕_i ℓ_i⊗S_i
/// and projector arithmetic factorizes exactly: ‖P−Q‖_F² = Σ_i ‖P_i−Q_i‖²,
/// independent of the label factors' norms. Comparisons stay feasible on
/// ambients where one vectorized SVD of the global span would not be.
///
/// Callers are responsible for the factorized form and the orthogonality
/// of the label family; both hold by construction at every use site.
#[derive(Debug, Clone)]
pub struct LabeledSpan<T: Real> {
    blocks: Vec<OperatorSubspace<T>>,
}

impl<T: Real> LabeledSpan<T> {
    /// One block span per label, in label order. Labels with no generators
    /// get the zero span.
    pub fn from_blocks(per_label: &[Vec<CMat<T>>], block_dim: usize, tol: f64) -> Result<Self> {
        let mut blocks = Vec::with_capacity(per_label.len());
        for mats in per_label {
            if mats.is_empty() {
                blocks.push(OperatorSubspace::zero(block_dim));
            } else {
                blocks.push(OperatorSubspace::span_of(mats, tol)?);
            }
        }
        Ok(LabeledSpan { blocks })
    }

    pub fn blocks(&self) -> &[OperatorSubspace<T>] {
        &self.blocks
    }

    pub fn label_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|b| b.rank()).sum()
    }

    /// Exact global projector distance, aggregated over labels.
    pub fn distance(&self, other: &Self) -> Result<T> {
        if self.blocks.len() != other.blocks.len() {
            return Err(Error::Dimension("label counts differ".into()));
        }
        let mut total = T::zero();
        for (a, b) in self.blocks.iter().zip(other.blocks.iter()) {
            let d = a.projector_distance(b)?;
            total += d * d;
        }
        Ok(total.sqrt())
    }

    /// Exact global ‖(1−P_self)P_other‖_F.
    pub fn containment_defect(&self, other: &Self) -> Result<T> {
        if self.blocks.len() != other.blocks.len() {
            return Err(Error::Dimension("label counts differ".into()));
        }
        let mut total = T::zero();
        for (a, b) in self.blocks.iter().zip(other.blocks.iter()) {
            let d = a.containment_defect(b)?;
            total += d * d;
        }
        Ok(total.sqrt())
    }

    pub fn equal(&self, other: &Self, tol: f64) -> Result<bool> {
        Ok(to_f64(self.distance(other)?) < tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cx, sample_unit, seeded_rng};
    use crate::tensor::eye;
    use rand_chacha::ChaCha8Rng;

    fn random_mat(d: usize, rng: &mut ChaCha8Rng) -> CMat<f64> {
        CMat::from_fn(d, d, |_, _| {
            cx(
                sample_unit::<f64>(rng) * 2.0 - 1.0,
                sample_unit::<f64>(rng) * 2.0 - 1.0,
            )
        })
    }

    fn pauli() -> Vec<CMat<f64>> {
        let i = cx(0.0, 1.0);
        let o = cx(0.0, 0.0);
        let l = cx(1.0, 0.0);
        vec![
            eye(2),
            CMat::from_row_slice(2, 2, &[o, l, l, o]),
            CMat::from_row_slice(2, 2, &[o, -i, i, o]),
            CMat::from_row_slice(2, 2, &[l, o, o, -l]),
        ]
    }

    #[test]
    fn scaled_copies_have_rank_one() {
        let s = OperatorSubspace::span_of(&[eye::<f64>(3), eye::<f64>(3) * cx(2.0, 0.0)], SPAN_TOL)
            .unwrap();
        assert_eq!(s.rank(), 1);
        assert!(to_f64(s.orthonormality_defect()) < 1e-12);
    }

    #[test]
    fn pauli_basis_spans_all_of_m2() {
        let s = OperatorSubspace::span_of(&pauli(), SPAN_TOL).unwrap();
        assert_eq!(s.rank(), 4);
        for m in pauli() {
            assert!(to_f64(s.contains_residual(&m)) < 1e-13);
        }
    }

    #[test]
    fn generic_matrices_span_everything() {
        let mut rng = seeded_rng(61);
        let mats: Vec<_> = (0..100).map(|_| random_mat(2, &mut rng)).collect();
        let s = OperatorSubspace::span_of(&mats, SPAN_TOL).unwrap();
        assert_eq!(s.rank(), 4);
        assert!(to_f64(s.orthonormality_defect()) < 1e-12);
    }

    #[test]
    fn span_rank_is_unitarily_invariant() {
        let mut rng = seeded_rng(67);
        let mats: Vec<_> = (0..3).map(|_| random_mat(3, &mut rng)).collect();
        let base = OperatorSubspace::span_of(&mats, SPAN_TOL).unwrap();
        // Build a unitary via the exponential-free route: orthonormalize a
        // random matrix's columns by QR.
        let q = random_mat(3, &mut rng).qr().q();
        let conj: Vec<_> = mats.iter().map(|m| &q * m * q.adjoint()).collect();
        let rotated = OperatorSubspace::span_of(&conj, SPAN_TOL).unwrap();
        assert_eq!(base.rank(), rotated.rank());
    }

    #[test]
    fn equality_and_containment_behave() {
        let p = pauli();
        let s = OperatorSubspace::span_of(&[p[0].clone(), p[1].clone()], SPAN_TOL).unwrap();
        assert!(s.equal(&s, 1e-14).unwrap());
        // Same span from a rotated generating set.
        let sum = &p[0] + &p[1];
        let diff = &p[0] - &p[1];
        let t = OperatorSubspace::span_of(&[sum, diff], SPAN_TOL).unwrap();
        assert!(s.equal(&t, 1e-12).unwrap());
        // σ_x vs σ_y: disjoint lines.
        let sx = OperatorSubspace::span_of(&[p[1].clone()], SPAN_TOL).unwrap();
        let sy = OperatorSubspace::span_of(&[p[2].clone()], SPAN_TOL).unwrap();
        assert!(!sx.equal(&sy, 0.5).unwrap());
        assert!(!sx.contains_subspace(&sy, 0.5).unwrap());
        assert!(!sy.contains_subspace(&sx, 0.5).unwrap());
        // Containment is antisymmetric up to equality.
        assert!(s.contains_subspace(&t, 1e-12).unwrap());
        assert!(t.contains_subspace(&s, 1e-12).unwrap());
        // Line inside the two-dimensional span.
        assert!(s.contains_subspace(&sx, 1e-12).unwrap());
        assert!(!sx.contains_subspace(&s, 0.5).unwrap());
    }

    #[test]
    fn projector_distance_detects_rank_gaps() {
        let p = pauli();
        let s = OperatorSubspace::span_of(&p, SPAN_TOL).unwrap();
        let line = OperatorSubspace::span_of(&[p[0].clone()], SPAN_TOL).unwrap();
        let d = to_f64(s.projector_distance(&line).unwrap());
        // ‖P−Q‖_F² = rank difference for nested spans.
        assert!((d - 3.0f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn closure_of_identity_is_identity() {
        let s = OperatorSubspace::span_of(&[eye::<f64>(2)], SPAN_TOL).unwrap();
        let out = s.multiplicative_closure(3).unwrap();
        assert!(out.stabilized);
        assert_eq!(out.iterations, 1);
        assert_eq!(out.subspace.rank(), 1);
    }

    #[test]
    fn pauli_pair_generates_full_matrix_algebra() {
        let p = pauli();
        let s = OperatorSubspace::span_of(&[p[1].clone(), p[3].clone()], SPAN_TOL).unwrap();
        let out = s.multiplicative_closure(4).unwrap();
        assert!(out.stabilized);
        assert_eq!(out.subspace.rank(), 4);
        // Cap too small to certify stabilization.
        let capped = s.multiplicative_closure(1).unwrap();
        assert!(!capped.stabilized);
    }

    #[test]
    fn closure_defect_flags_non_algebras() {
        let p = pauli();
        let alg = OperatorSubspace::span_of(&p, SPAN_TOL).unwrap();
        assert!(to_f64(alg.closure_defect(0)) < 1e-12);
        let line = OperatorSubspace::span_of(&[p[1].clone() + p[3].clone()], SPAN_TOL).unwrap();
        // (σ_x+σ_z)² = 2I is not in the line.
        assert!(to_f64(line.closure_defect(0)) > 0.5);
    }

    #[test]
    fn labeled_span_matches_global_arithmetic() {
        // Generators (ℓ_i ⊗ block) with orthogonal labels ℓ_0 = e11, ℓ_1 = e22:
        // the labeled distance must equal the global projector distance.
        let p = pauli();
        let l0 = {
            let mut m = CMat::<f64>::zeros(2, 2);
            m[(0, 0)] = cx(1.0, 0.0);
            m
        };
        let l1 = {
            let mut m = CMat::<f64>::zeros(2, 2);
            m[(1, 1)] = cx(3.0, 0.0); // scaled label: distance must not care
            m
        };
        let blocks_a = vec![vec![p[0].clone(), p[1].clone()], vec![p[3].clone()]];
        let blocks_b = vec![vec![p[0].clone()], vec![p[3].clone()]];
        let la = LabeledSpan::from_blocks(&blocks_a, 2, SPAN_TOL).unwrap();
        let lb = LabeledSpan::from_blocks(&blocks_b, 2, SPAN_TOL).unwrap();
        let glob_a = OperatorSubspace::span_of(
            &[
                crate::tensor::kron(&l0, &p[0]),
                crate::tensor::kron(&l0, &p[1]),
                crate::tensor::kron(&l1, &p[3]),
            ],
            SPAN_TOL,
        )
        .unwrap();
        let glob_b = OperatorSubspace::span_of(
            &[crate::tensor::kron(&l0, &p[0]), crate::tensor::kron(&l1, &p[3])],
            SPAN_TOL,
        )
        .unwrap();
        let dl = to_f64(la.distance(&lb).unwrap());
        let dg = to_f64(glob_a.projector_distance(&glob_b).unwrap());
        assert!((dl - dg).abs() < 1e-12, "labeled {dl} vs global {dg}");
        assert!(to_f64(la.containment_defect(&lb).unwrap()) < 1e-13);
        assert!(to_f64(lb.containment_defect(&la).unwrap()) > 0.9);
        assert_eq!(la.rank(), glob_a.rank());
    }

    #[test]
    fn zero_span_edge_cases() {
        let z = OperatorSubspace::<f64>::span_of(&[CMat::zeros(2, 2)], SPAN_TOL).unwrap();
        assert_eq!(z.rank(), 0);
        let s = OperatorSubspace::span_of(&[eye::<f64>(2)], SPAN_TOL).unwrap();
        assert!(to_f64(z.projector_distance(&s).unwrap()) > 0.9);
        assert!(s.contains_subspace(&z, 1e-12).unwrap());
        assert!(OperatorSubspace::<f64>::span_of(&[], SPAN_TOL).is_err());
    }
}
