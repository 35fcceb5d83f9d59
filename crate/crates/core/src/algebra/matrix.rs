use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::{AlgebraError, GroupAlgebra, GroupAlgebraElement};
use crate::coeff::Coeff;
use crate::group::GroupLaw;

/// `k×k` matrix with entries in `ℂ[N]`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatrixOverGroupAlgebra<E: Ord + Clone + Serialize> {
    size: usize,
    entries: Vec<GroupAlgebraElement<E>>,
}

impl<E: Ord + Clone + Serialize> MatrixOverGroupAlgebra<E> {
    pub fn zeros(size: usize) -> Self {
        MatrixOverGroupAlgebra { size, entries: vec![GroupAlgebraElement::zero(); size * size] }
    }

    pub fn from_entries(size: usize, entries: Vec<GroupAlgebraElement<E>>) -> Result<Self, AlgebraError> {
        if entries.len() != size * size {
            return Err(AlgebraError::Size(entries.len(), size * size));
        }
        Ok(MatrixOverGroupAlgebra { size, entries })
    }

    pub fn diagonal(diag: Vec<GroupAlgebraElement<E>>) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.into_iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &GroupAlgebraElement<E> {
        &self.entries[i * self.size + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut GroupAlgebraElement<E> {
        &mut self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: GroupAlgebraElement<E>) {
        self.entries[i * self.size + j] = x;
    }

    pub fn entries(&self) -> &[GroupAlgebraElement<E>] {
        &self.entries
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.size).all(|i| (0..self.size).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn diagonal_entries(&self) -> Vec<&GroupAlgebraElement<E>> {
        (0..self.size).map(|i| self.get(i, i)).collect()
    }

    fn same_size(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.size != other.size {
            return Err(AlgebraError::Size(self.size, other.size));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_size(other)?;
        Ok(MatrixOverGroupAlgebra {
            size: self.size,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_size(other)?;
        Ok(MatrixOverGroupAlgebra {
            size: self.size,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.sub(b)).collect(),
        })
    }

    pub fn neg(&self) -> Self {
        MatrixOverGroupAlgebra { size: self.size, entries: self.entries.iter().map(|a| a.neg()).collect() }
    }

    /// Entrywise coefficient-ℓ¹ matrix `(Σ_g |λ_g^{ij}|)_{ij}`.
    pub fn l1_matrix(&self) -> Vec<f64> {
        self.entries.iter().map(GroupAlgebraElement::l1_norm).collect()
    }

    /// Upper bound on the norm of every fiber: the Schur test
    /// `sqrt(max row sum · max column sum)` on the ℓ¹ matrix.
    pub fn norm_upper_bound(&self) -> f64 {
        let l1 = self.l1_matrix();
        let k = self.size;
        if k == 0 {
            return 0.0;
        }
        let row = (0..k).map(|i| (0..k).map(|j| l1[i * k + j]).sum::<f64>()).fold(0.0, f64::max);
        let col = (0..k).map(|j| (0..k).map(|i| l1[i * k + j]).sum::<f64>()).fold(0.0, f64::max);
        (row * col).sqrt()
    }
}

impl<G: GroupLaw> GroupAlgebra<G>
where
    G::Elem: Serialize,
{
    pub fn matrix_identity(&self, size: usize) -> MatrixOverGroupAlgebra<G::Elem> {
        MatrixOverGroupAlgebra::diagonal(vec![self.one(); size])
    }

    /// `c·1_k`.
    pub fn matrix_scalar(&self, size: usize, c: Coeff) -> MatrixOverGroupAlgebra<G::Elem> {
        MatrixOverGroupAlgebra::diagonal(vec![self.scalar(c); size])
    }

    pub fn matrix_mul(
        &self,
        a: &MatrixOverGroupAlgebra<G::Elem>,
        b: &MatrixOverGroupAlgebra<G::Elem>,
    ) -> Result<MatrixOverGroupAlgebra<G::Elem>, AlgebraError> {
        a.same_size(b)?;
        let k = a.size;
        let mut out = MatrixOverGroupAlgebra::zeros(k);
        for i in 0..k {
            for j in 0..k {
                let mut acc = GroupAlgebraElement::zero();
                for l in 0..k {
                    let (x, y) = (a.get(i, l), b.get(l, j));
                    if x.is_zero() || y.is_zero() {
                        continue;
                    }
                    acc = acc.add(&self.mul(x, y));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Conjugate transpose with entrywise adjoints.
    pub fn matrix_adjoint(&self, a: &MatrixOverGroupAlgebra<G::Elem>) -> MatrixOverGroupAlgebra<G::Elem> {
        let k = a.size;
        let mut out = MatrixOverGroupAlgebra::zeros(k);
        for i in 0..k {
            for j in 0..k {
                out.set(j, i, self.adjoint(a.get(i, j)));
            }
        }
        out
    }

    pub fn matrix_is_self_adjoint(&self, a: &MatrixOverGroupAlgebra<G::Elem>) -> bool {
        self.matrix_adjoint(a) == *a
    }

    /// `(tr_k ⊗ τ)(m) = (1/k) Σᵢ τ(mᵢᵢ)`.
    pub fn matrix_trace(&self, m: &MatrixOverGroupAlgebra<G::Elem>) -> Coeff {
        if m.size == 0 {
            return Coeff::zero();
        }
        let mut acc = Coeff::zero();
        for i in 0..m.size {
            acc += &self.canonical_trace(m.get(i, i));
        }
        acc.scale(&BigRational::new(BigInt::from(1), BigInt::from(m.size)))
    }

    pub fn matrix_check(&self, m: &MatrixOverGroupAlgebra<G::Elem>) -> Result<(), AlgebraError> {
        m.entries.iter().try_for_each(|x| self.check(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroupTable;

    #[test]
    fn trace_examples() {
        let alg = GroupAlgebra::new(FiniteGroupTable::cyclic(4).unwrap());
        assert_eq!(alg.matrix_trace(&alg.matrix_identity(3)), Coeff::one());
        let g = GroupAlgebraElement::basis(1usize);
        let m = MatrixOverGroupAlgebra::diagonal(vec![g.clone(), g]);
        assert_eq!(alg.matrix_trace(&m), Coeff::zero());
        let m = MatrixOverGroupAlgebra::diagonal(vec![alg.one(), GroupAlgebraElement::zero()]);
        assert_eq!(alg.matrix_trace(&m), Coeff::ratio(1, 2));
    }

    #[test]
    fn ring_laws_small() {
        let alg = GroupAlgebra::new(FiniteGroupTable::cyclic(3).unwrap());
        let x = |g: usize, n: i64| GroupAlgebraElement::monomial(g, Coeff::from_int(n));
        let a = MatrixOverGroupAlgebra::from_entries(2, vec![x(1, 2), x(0, 1), x(2, -1), x(1, 3)]).unwrap();
        let b = MatrixOverGroupAlgebra::from_entries(2, vec![x(2, 1), x(1, 1), x(0, 5), x(2, 2)]).unwrap();
        let c = MatrixOverGroupAlgebra::from_entries(2, vec![x(0, 1), x(0, 0), x(1, 1), x(0, -3)]).unwrap();
        let ab_c = alg.matrix_mul(&alg.matrix_mul(&a, &b).unwrap(), &c).unwrap();
        let a_bc = alg.matrix_mul(&a, &alg.matrix_mul(&b, &c).unwrap()).unwrap();
        assert_eq!(ab_c, a_bc);
        let lhs = alg.matrix_adjoint(&alg.matrix_mul(&a, &b).unwrap());
        let rhs = alg.matrix_mul(&alg.matrix_adjoint(&b), &alg.matrix_adjoint(&a)).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(alg.matrix_mul(&alg.matrix_identity(2), &a).unwrap(), a);
        assert!(alg.matrix_mul(&a, &alg.matrix_identity(3)).is_err());
    }
}
