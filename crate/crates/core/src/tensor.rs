//! Tensor-factor bookkeeping: leg-numbered embeddings, flips, slices, and
//! partial traces over dense complex matrices.
//!
//! Composite indices are row-major: (i₁,…,i_k) ↦ Σ i_p · Π_{q>p} d_q, and
//! legs are 1-based throughout, so embed_legs(X, [2,3], …) is the X₂₃ of the
//! operator calculus.

use crate::error::{Error, Result};
use crate::scalar::{c_one, c_zero, to_f64, CMat, Cx, Real};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorSpace {
    factors: Vec<usize>,
}

impl TensorSpace {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() || factors.iter().any(|&d| d == 0) {
            return Err(Error::Dimension("tensor factors must be positive".into()));
        }
        Ok(TensorSpace { factors })
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn leg_count(&self) -> usize {
        self.factors.len()
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().product()
    }

    pub fn leg_dim(&self, leg: usize) -> Result<usize> {
        if leg == 0 || leg > self.factors.len() {
            return Err(Error::Dimension(format!("leg {leg} out of range")));
        }
        Ok(self.factors[leg - 1])
    }

    /// Flat index of a digit tuple.
    pub fn compose(&self, digits: &[usize]) -> usize {
        let mut idx = 0;
        for (p, &d) in digits.iter().enumerate() {
            idx = idx * self.factors[p] + d;
        }
        idx
    }

    /// Digit tuple of a flat index.
    pub fn decompose(&self, mut idx: usize) -> Vec<usize> {
        let k = self.factors.len();
        let mut digits = vec![0; k];
        for p in (0..k).rev() {
            digits[p] = idx % self.factors[p];
            idx /= self.factors[p];
        }
        digits
    }

    /// The space with one leg removed.
    pub fn without_leg(&self, leg: usize) -> Result<TensorSpace> {
        self.leg_dim(leg)?;
        if self.factors.len() == 1 {
            return Err(Error::Dimension("cannot remove the only leg".into()));
        }
        let mut factors = self.factors.clone();
        factors.remove(leg - 1);
        TensorSpace::new(factors)
    }
}

/// Places X on the named legs (identity elsewhere). X must act on the
/// product of the listed legs' dimensions, in the listed order.
pub fn embed_legs<T: Real>(x: &CMat<T>, legs: &[usize], space: &TensorSpace) -> Result<CMat<T>> {
    let k = space.leg_count();
    if legs.is_empty() {
        return Err(Error::Dimension("no legs given".into()));
    }
    let mut seen = vec![false; k];
    for &leg in legs {
        if leg == 0 || leg > k {
            return Err(Error::Dimension(format!("leg {leg} out of range")));
        }
        if seen[leg - 1] {
            return Err(Error::Dimension(format!("repeated leg {leg}")));
        }
        seen[leg - 1] = true;
    }
    let sub_dim: usize = legs.iter().map(|&l| space.factors[l - 1]).product();
    if x.nrows() != sub_dim || x.ncols() != sub_dim {
        return Err(Error::Dimension(format!(
            "operator is {}x{}, legs give {}",
            x.nrows(),
            x.ncols(),
            sub_dim
        )));
    }
    let rest: Vec<usize> = (1..=k).filter(|l| !legs.contains(l)).collect();
    let rest_dim: usize = rest.iter().map(|&l| space.factors[l - 1]).product();
    let leg_dims: Vec<usize> = legs.iter().map(|&l| space.factors[l - 1]).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&l| space.factors[l - 1]).collect();
    let sub = TensorSpace::new(leg_dims).unwrap();
    let rest_space = if rest.is_empty() {
        None
    } else {
        Some(TensorSpace::new(rest_dims).unwrap())
    };

    let d = space.dim();
    let mut out = CMat::<T>::from_element(d, d, c_zero());
    // Enumerate (row digits on legs, col digits on legs, shared rest digits).
    let mut digits = vec![0usize; k];
    for r_sub in 0..sub_dim {
        let rd = sub.decompose(r_sub);
        for c_sub in 0..sub_dim {
            let cd = sub.decompose(c_sub);
            let v = x[(r_sub, c_sub)];
            if v == c_zero() {
                continue;
            }
            for shared in 0..rest_dim.max(1) {
                let sd = rest_space
                    .as_ref()
                    .map(|s| s.decompose(shared))
                    .unwrap_or_default();
                for (pos, &leg) in legs.iter().enumerate() {
                    digits[leg - 1] = rd[pos];
                }
                for (pos, &leg) in rest.iter().enumerate() {
                    digits[leg - 1] = sd[pos];
                }
                let row = space.compose(&digits);
                for (pos, &leg) in legs.iter().enumerate() {
                    digits[leg - 1] = cd[pos];
                }
                let col = space.compose(&digits);
                out[(row, col)] = v;
            }
        }
    }
    Ok(out)
}

/// Unitary permutation exchanging legs p and q (requires d_p = d_q, p ≠ q).
pub fn leg_flip<T: Real>(space: &TensorSpace, p: usize, q: usize) -> Result<CMat<T>> {
    if p == q {
        return Err(Error::Dimension("flip needs two distinct legs".into()));
    }
    let dp = space.leg_dim(p)?;
    let dq = space.leg_dim(q)?;
    if dp != dq {
        return Err(Error::Dimension(format!(
            "legs {p} and {q} have different dimensions {dp} vs {dq}"
        )));
    }
    let d = space.dim();
    let mut out = CMat::<T>::from_element(d, d, c_zero());
    for col in 0..d {
        let mut digits = space.decompose(col);
        digits.swap(p - 1, q - 1);
        out[(space.compose(&digits), col)] = c_one();
    }
    Ok(out)
}

/// The (k,l) slice on one leg: Y[(…),(…)] = X[(…,k at leg,…),(…,l at leg,…)].
pub fn slice<T: Real>(
    x: &CMat<T>,
    space: &TensorSpace,
    leg: usize,
    k: usize,
    l: usize,
) -> Result<CMat<T>> {
    let d_leg = space.leg_dim(leg)?;
    if x.nrows() != space.dim() || x.ncols() != space.dim() {
        return Err(Error::Dimension("operator does not match the space".into()));
    }
    if k >= d_leg || l >= d_leg {
        return Err(Error::Dimension(format!(
            "slice index ({k},{l}) out of range for leg of dim {d_leg}"
        )));
    }
    let reduced = space.without_leg(leg)?;
    let rd = reduced.dim();
    let mut out = CMat::<T>::from_element(rd, rd, c_zero());
    for r in 0..rd {
        let mut row_digits = reduced.decompose(r);
        row_digits.insert(leg - 1, k);
        let row = space.compose(&row_digits);
        for c in 0..rd {
            let mut col_digits = reduced.decompose(c);
            col_digits.insert(leg - 1, l);
            out[(r, c)] = x[(row, space.compose(&col_digits))];
        }
    }
    Ok(out)
}

/// Partial trace over one leg: Σ_k slice(X, leg, k, k).
pub fn partial_trace<T: Real>(x: &CMat<T>, space: &TensorSpace, leg: usize) -> Result<CMat<T>> {
    let d_leg = space.leg_dim(leg)?;
    let reduced = space.without_leg(leg)?;
    let rd = reduced.dim();
    let mut out = CMat::<T>::from_element(rd, rd, c_zero());
    for k in 0..d_leg {
        out += slice(x, space, leg, k, k)?;
    }
    Ok(out)
}

/// Kronecker product in the row-major leg convention.
pub fn kron<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    a.kronecker(b)
}

/// For x = Σ_j ℓ_j⊗y_j on a [dlabel, drest] split (row-major, label factor
/// leading), extracts y for the given label factor ℓ:
/// y = (tr⊗ι)((ℓ*⊗1)x)/‖ℓ‖²_F, exact when the ℓ_j are pairwise orthogonal.
pub fn contract_label<T: Real>(x: &CMat<T>, dlabel: usize, l: &CMat<T>) -> Result<CMat<T>> {
    let total = x.nrows();
    if total % dlabel != 0 || l.nrows() != dlabel || l.ncols() != dlabel {
        return Err(Error::Dimension("label factor does not divide the ambient".into()));
    }
    let drest = total / dlabel;
    let mut norm2 = T::zero();
    for z in l.iter() {
        norm2 += z.norm_sqr();
    }
    if to_f64(norm2) == 0.0 {
        return Err(Error::InvalidInput("zero label factor".into()));
    }
    let mut y = CMat::<T>::from_element(drest, drest, c_zero());
    for a in 0..dlabel {
        for ap in 0..dlabel {
            let w = l[(ap, a)].conj();
            if w.norm_sqr() == T::zero() {
                continue;
            }
            for rr in 0..drest {
                for cc in 0..drest {
                    y[(rr, cc)] += w * x[(ap * drest + rr, a * drest + cc)];
                }
            }
        }
    }
    let inv = Cx::new(T::one() / norm2, T::zero());
    Ok(y * inv)
}

/// Diagonal matrix from a list of entries.
pub fn diag<T: Real>(entries: &[Cx<T>]) -> CMat<T> {
    let n = entries.len();
    let mut m = CMat::<T>::from_element(n, n, c_zero());
    for (i, &e) in entries.iter().enumerate() {
        m[(i, i)] = e;
    }
    m
}

/// d×d identity.
pub fn eye<T: Real>(d: usize) -> CMat<T> {
    CMat::<T>::identity(d, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cx, fro_dist, sample_unit, seeded_rng, to_f64};
    use rand_chacha::ChaCha8Rng;

    fn random_mat(d: usize, rng: &mut ChaCha8Rng) -> CMat<f64> {
        CMat::from_fn(d, d, |_, _| {
            cx(
                sample_unit::<f64>(rng) * 2.0 - 1.0,
                sample_unit::<f64>(rng) * 2.0 - 1.0,
            )
        })
    }

    fn pauli_x() -> CMat<f64> {
        CMat::from_row_slice(2, 2, &[cx(0.0, 0.0), cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0)])
    }

    #[test]
    fn composite_index_is_row_major() {
        let s = TensorSpace::new(vec![2, 3, 2]).unwrap();
        assert_eq!(s.dim(), 12);
        // (i1,i2,i3) ↦ i1·6 + i2·2 + i3.
        assert_eq!(s.compose(&[1, 2, 1]), 11);
        assert_eq!(s.compose(&[1, 0, 1]), 7);
        assert_eq!(s.decompose(7), vec![1, 0, 1]);
        for i in 0..12 {
            assert_eq!(s.compose(&s.decompose(i)), i);
        }
    }

    #[test]
    fn embed_identity_gives_identity() {
        let s = TensorSpace::new(vec![2, 3]).unwrap();
        let out = embed_legs(&eye::<f64>(3), &[2], &s).unwrap();
        assert_eq!(to_f64(fro_dist(&out, &eye(6))), 0.0);
    }

    #[test]
    fn embed_on_leg_two_is_kronecker_with_identity() {
        let s = TensorSpace::new(vec![2, 2]).unwrap();
        let out = embed_legs(&pauli_x(), &[2], &s).unwrap();
        let expect = kron(&eye::<f64>(2), &pauli_x());
        assert!(to_f64(fro_dist(&out, &expect)) < 1e-15);
    }

    #[test]
    fn disjoint_legs_commute() {
        let s = TensorSpace::new(vec![2, 3, 2]).unwrap();
        let mut rng = seeded_rng(7);
        for _ in 0..3 {
            let a = random_mat(2, &mut rng);
            let b = random_mat(2, &mut rng);
            let ea = embed_legs(&a, &[1], &s).unwrap();
            let eb = embed_legs(&b, &[3], &s).unwrap();
            assert!(to_f64(fro_dist(&(&ea * &eb), &(&eb * &ea))) < 1e-13);
        }
    }

    #[test]
    fn embed_full_leg_list_is_identity_map() {
        let s = TensorSpace::new(vec![2, 3]).unwrap();
        let mut rng = seeded_rng(9);
        let a = random_mat(6, &mut rng);
        let out = embed_legs(&a, &[1, 2], &s).unwrap();
        assert!(to_f64(fro_dist(&out, &a)) < 1e-15);
    }

    #[test]
    fn embed_is_multiplicative_and_star_preserving() {
        let s = TensorSpace::new(vec![3, 2, 2]).unwrap();
        let mut rng = seeded_rng(13);
        let a = random_mat(6, &mut rng);
        let b = random_mat(6, &mut rng);
        let e = |m: &CMat<f64>| embed_legs(m, &[3, 1], &s).unwrap();
        assert!(to_f64(fro_dist(&e(&(&a * &b)), &(&e(&a) * &e(&b)))) < 1e-12);
        assert!(to_f64(fro_dist(&e(&a.adjoint()), &e(&a).adjoint())) < 1e-15);
    }

    #[test]
    fn embed_rejects_bad_legs() {
        let s = TensorSpace::new(vec![2, 2]).unwrap();
        assert!(embed_legs(&eye::<f64>(2), &[1, 1], &s).is_err());
        assert!(embed_legs(&eye::<f64>(2), &[3], &s).is_err());
        assert!(embed_legs(&eye::<f64>(3), &[1], &s).is_err());
    }

    #[test]
    fn flip_is_swap_on_two_qubits() {
        let s = TensorSpace::new(vec![2, 2]).unwrap();
        let f = leg_flip::<f64>(&s, 1, 2).unwrap();
        let mut rng = seeded_rng(21);
        let a = random_mat(2, &mut rng);
        let b = random_mat(2, &mut rng);
        let lhs = &f * kron(&a, &b) * &f;
        assert!(to_f64(fro_dist(&lhs, &kron(&b, &a))) < 1e-13);
    }

    #[test]
    fn flip_is_an_involution_and_rejects_bad_args() {
        let s = TensorSpace::new(vec![2, 3, 2]).unwrap();
        let f = leg_flip::<f64>(&s, 1, 3).unwrap();
        assert!(to_f64(fro_dist(&(&f * &f), &eye(12))) < 1e-15);
        assert!(leg_flip::<f64>(&s, 2, 2).is_err());
        assert!(leg_flip::<f64>(&s, 1, 2).is_err());
    }

    #[test]
    fn slice_of_pure_tensor_picks_coefficient() {
        let s = TensorSpace::new(vec![3, 2]).unwrap();
        let mut rng = seeded_rng(25);
        let a = random_mat(3, &mut rng);
        let b = random_mat(2, &mut rng);
        let x = kron(&a, &b);
        for k in 0..2 {
            for l in 0..2 {
                let y = slice(&x, &s, 2, k, l).unwrap();
                let expect = &a * b[(k, l)];
                assert!(to_f64(fro_dist(&y, &expect)) < 1e-14);
            }
        }
        let z = slice(&eye::<f64>(6), &s, 2, 0, 1).unwrap();
        assert!(to_f64(z.norm()) == 0.0);
    }

    #[test]
    fn contract_label_recovers_blocks() {
        let mut rng = seeded_rng(29);
        // x = e00⊗y0 + e11⊗y1 with orthogonal (even scaled) labels.
        let y0 = random_mat(3, &mut rng);
        let y1 = random_mat(3, &mut rng);
        let mut l0 = CMat::<f64>::zeros(2, 2);
        l0[(0, 0)] = cx(2.0, 1.0);
        let mut l1 = CMat::<f64>::zeros(2, 2);
        l1[(1, 1)] = cx(0.0, -1.0);
        let x = kron(&l0, &y0) + kron(&l1, &y1);
        let got0 = contract_label(&x, 2, &l0).unwrap();
        let got1 = contract_label(&x, 2, &l1).unwrap();
        assert!(to_f64(fro_dist(&got0, &y0)) < 1e-13);
        assert!(to_f64(fro_dist(&got1, &y1)) < 1e-13);
        assert!(contract_label(&x, 2, &CMat::zeros(2, 2)).is_err());
        assert!(contract_label(&x, 4, &CMat::zeros(4, 4)).is_err());
    }

    #[test]
    fn diagonal_slices_sum_to_partial_trace() {
        let s = TensorSpace::new(vec![2, 3, 2]).unwrap();
        let mut rng = seeded_rng(29);
        let x = random_mat(12, &mut rng);
        // Independent oracle for the trace over leg 2: contract indices
        // directly from the digit expansion.
        let reduced = s.without_leg(2).unwrap();
        let rd = reduced.dim();
        let mut oracle = CMat::<f64>::from_element(rd, rd, c_zero());
        for r in 0..rd {
            for c in 0..rd {
                let rdig = reduced.decompose(r);
                let cdig = reduced.decompose(c);
                for k in 0..3 {
                    let row = s.compose(&[rdig[0], k, rdig[1]]);
                    let col = s.compose(&[cdig[0], k, cdig[1]]);
                    oracle[(r, c)] += x[(row, col)];
                }
            }
        }
        let pt = partial_trace(&x, &s, 2).unwrap();
        assert!(to_f64(fro_dist(&pt, &oracle)) < 1e-13);
    }

    #[test]
    fn slice_linearity_against_embeddings() {
        // slice(embed(A,[1])·X, leg 2) = A·slice(X, leg 2) for X on [d1,d2].
        let s = TensorSpace::new(vec![3, 2]).unwrap();
        let mut rng = seeded_rng(33);
        let a = random_mat(3, &mut rng);
        let x = random_mat(6, &mut rng);
        let ea = embed_legs(&a, &[1], &s).unwrap();
        for k in 0..2 {
            for l in 0..2 {
                let lhs = slice(&(&ea * &x), &s, 2, k, l).unwrap();
                let rhs = &a * slice(&x, &s, 2, k, l).unwrap();
                assert!(to_f64(fro_dist(&lhs, &rhs)) < 1e-13);
            }
        }
    }
}
