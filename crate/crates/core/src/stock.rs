//! Ready-made descriptions of standard examples.

use crate::algebra::{GroupAlgebra, MatrixOverGroupAlgebra};
use crate::group::{
    AbelianElement, FGAbelianGroup, GroupDescription, GroupNode, GroupProperty, IntMatrix, SemidirectProductGroup,
    UnionLimit,
};

fn semidirect(rank: usize, generators: &[Vec<Vec<i64>>]) -> SemidirectProductGroup {
    let gens: Vec<IntMatrix> = generators.iter().map(|g| IntMatrix::from_rows(g.clone()).expect("square")).collect();
    SemidirectProductGroup::from_matrix_generators(rank, &gens).expect("finite matrix group")
}

fn z(n: usize) -> GroupDescription {
    GroupDescription::abelian(FGAbelianGroup::free_abelian(n))
}

/// `ℤ ⋊ ℤ/2` with the generator acting by `−1`.
pub fn infinite_dihedral() -> GroupDescription {
    GroupDescription::semidirect(semidirect(1, &[vec![vec![-1]]])).with_label("infinite dihedral")
}

/// `ℤ² ⋊ ℤ/2` with the generator acting by `−I`.
pub fn z2_by_minus_identity() -> GroupDescription {
    GroupDescription::semidirect(semidirect(2, &[vec![vec![-1, 0], vec![0, -1]]])).with_label("Z^2 x| Z/2")
}

/// `ℤ² ⋊ ℤ/3` with the generator acting by an order-3 rotation of the hexagonal lattice.
pub fn z2_by_order_three() -> GroupDescription {
    GroupDescription::semidirect(semidirect(2, &[vec![vec![0, -1], vec![1, -1]]])).with_label("Z^2 x| Z/3")
}

pub fn free_abelian(n: usize) -> GroupDescription {
    z(n).with_label(format!("Z^{n}"))
}

/// `ℚⁿ = ⋃ ℤⁿ` along multiplication by `2, 3, …`, truncated to `stages` stages.
pub fn rationals(n: usize, stages: usize) -> GroupDescription {
    let stages = stages.max(1);
    let mut d = GroupDescription::union(vec![z(n); stages], UnionLimit::Stable);
    if let GroupNode::Union(u) = &mut d.node {
        u.connecting = Some((0..stages - 1).map(|k| IntMatrix::scalar(n, k as i64 + 2)).collect());
    }
    d.with_label(format!("Q^{n}"))
}

/// `⨁ ℤ/2 = ⋃ (ℤ/2)^k`.
pub fn direct_sum_z2(stages: usize) -> GroupDescription {
    let stage = |k: usize| GroupDescription::abelian(FGAbelianGroup::from_cyclic_orders(0, &vec![2; k]).expect("orders"));
    GroupDescription::union((1..=stages.max(1)).map(stage).collect(), UnionLimit::Stable).with_label("direct sum of Z/2")
}

/// `ℤ/2 ≀ ℤ = (⨁ ℤ/2) ⋊ ℤ`.
pub fn lamplighter() -> GroupDescription {
    GroupDescription::extension(direct_sum_z2(3), z(1)).with_label("lamplighter")
}

/// `ℤ ≀ ℤ = (⨁ ℤ) ⋊ ℤ`; the base has unbounded Hirsch length.
pub fn z_wreath_z(stages: usize) -> GroupDescription {
    let stages = stages.max(1);
    let mut base = GroupDescription::union((1..=stages).map(z).collect(), UnionLimit::Unbounded);
    if let GroupNode::Union(u) = &mut base.node {
        let inclusion = |k: usize| {
            let mut m = IntMatrix::zeros(k + 1, k);
            (0..k).for_each(|i| m.set(i, i, 1));
            m
        };
        u.connecting = Some((1..stages).map(inclusion).collect());
    }
    GroupDescription::extension(base, z(1)).with_label("Z wr Z")
}

/// Upper unitriangular integer matrices `UT_n`, built as
/// `UT_n = ℤ^{n−1} . UT_{n−1}` with `UT_2 = ℤ`.
pub fn unitriangular(n: usize) -> GroupDescription {
    let mut d = z(1);
    for k in 3..=n.max(2) {
        d = GroupDescription::extension(z(k - 1), d);
    }
    d.with_label(format!("UT_{}(Z)", n.max(2)))
        .with_tag(GroupProperty::Nilpotent, true, "unitriangular integer matrices form a nilpotent group")
        .with_tag(GroupProperty::TorsionFree, true, "unipotent integer matrices have infinite order")
}

/// `⋃ UT_n(ℤ)` along the corner embeddings.
pub fn unitriangular_union(stages: usize) -> GroupDescription {
    GroupDescription::union((2..stages.max(1) + 2).map(unitriangular).collect(), UnionLimit::Unbounded)
        .with_label("union of UT_n(Z)")
}

/// `diag(β(z^λ₁), …)` over `ℂ[ℤ]`, with `β(d) = 1 − (d + d⁻¹)/2`.
pub fn beta_powers(lambdas: &[i64]) -> (FGAbelianGroup, MatrixOverGroupAlgebra<AbelianElement>) {
    let g = FGAbelianGroup::free_abelian(1);
    let alg = GroupAlgebra::new(g.clone());
    let m = MatrixOverGroupAlgebra::diagonal(lambdas.iter().map(|&l| alg.beta(&AbelianElement::free(vec![l]))).collect());
    (g, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::HirschLength;

    #[test]
    fn all_validate() {
        for d in [
            infinite_dihedral(),
            z2_by_minus_identity(),
            z2_by_order_three(),
            rationals(2, 3),
            direct_sum_z2(4),
            lamplighter(),
            z_wreath_z(4),
            unitriangular_union(3),
        ] {
            d.validate().unwrap();
        }
    }

    #[test]
    fn hirsch_lengths() {
        assert_eq!(rationals(3, 4).hirsch_length().unwrap(), HirschLength::Finite(3));
        assert_eq!(unitriangular(4).hirsch_length().unwrap(), HirschLength::Finite(6));
        assert_eq!(z_wreath_z(3).hirsch_length().unwrap(), HirschLength::Infinite);
        assert_eq!(lamplighter().hirsch_length().unwrap(), HirschLength::Finite(1));
    }
}
