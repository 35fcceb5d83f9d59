use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{FGAbelianGroup, FiniteGroupTable, GroupError, GroupLaw, IntMatrix};

/// Upper bound on the size of a matrix group generated by closure.
const MAX_ACTING_ORDER: usize = 10_000;

/// `ℤ^r ⋊_σ H` with `H` finite and `σ: H → GL(r, ℤ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemidirectProductGroup {
    rank: usize,
    acting: FiniteGroupTable,
    action: Vec<IntMatrix>,
}

/// `(v, h)` with `v ∈ ℤ^r`, `h` an index into the acting group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SemidirectElement {
    pub v: Vec<i64>,
    pub h: usize,
}

impl SemidirectElement {
    pub fn new(v: Vec<i64>, h: usize) -> Self {
        SemidirectElement { v, h }
    }
}

impl fmt::Display for SemidirectElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.v.iter().map(i64::to_string).collect();
        write!(f, "(({}), h{})", v.join(","), self.h)
    }
}

/// `{v : σ(h)v = v ∀h}` as a saturated sublattice of `ℤ^r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationCenter {
    pub ambient_rank: usize,
    /// Hermite-normal-form basis.
    pub basis: Vec<Vec<i64>>,
}

impl TranslationCenter {
    pub fn as_group(&self) -> FGAbelianGroup {
        FGAbelianGroup::free_abelian(self.basis.len())
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }
}

impl SemidirectProductGroup {
    /// Validates that every matrix is `r×r` with determinant ±1, that the
    /// identity acts trivially, and that `σ` is a homomorphism.
    pub fn new(
        rank: usize,
        acting: FiniteGroupTable,
        action: Vec<IntMatrix>,
    ) -> Result<Self, GroupError> {
        if action.len() != acting.order() {
            return Err(GroupError::Action(format!(
                "{} matrices for an acting group of order {}",
                action.len(),
                acting.order()
            )));
        }
        for (h, m) in action.iter().enumerate() {
            if m.rows() != rank || m.cols() != rank {
                return Err(GroupError::Action(format!("matrix for h{h} is not {rank}x{rank}")));
            }
            let det = m.determinant()?;
            if det.abs() != 1 {
                return Err(GroupError::Action(format!(
                    "matrix for h{h} has determinant {det}, not invertible over the integers"
                )));
            }
        }
        if action[0] != IntMatrix::identity(rank) {
            return Err(GroupError::Action("identity does not act trivially".into()));
        }
        let n = acting.order();
        for a in 0..n {
            for b in 0..n {
                if action[a].mul(&action[b])? != action[acting.op(&a, &b)] {
                    return Err(GroupError::Action(format!(
                        "not a homomorphism: σ(h{a})σ(h{b}) ≠ σ(h{a}·h{b})"
                    )));
                }
            }
        }
        Ok(SemidirectProductGroup { rank, acting, action })
    }

    /// The acting group is the finite matrix group generated by `generators`,
    /// acting faithfully. Index 0 is the identity matrix; the rest follow
    /// breadth-first discovery order.
    pub fn from_matrix_generators(rank: usize, generators: &[IntMatrix]) -> Result<Self, GroupError> {
        for g in generators {
            if g.rows() != rank || g.cols() != rank {
                return Err(GroupError::Action(format!("generator is not {rank}x{rank}")));
            }
        }
        let mut elems = vec![IntMatrix::identity(rank)];
        let mut index: HashMap<IntMatrix, usize> = HashMap::from([(elems[0].clone(), 0)]);
        let mut i = 0;
        while i < elems.len() {
            for g in generators {
                let y = elems[i].mul(g)?;
                if !index.contains_key(&y) {
                    if elems.len() >= MAX_ACTING_ORDER {
                        return Err(GroupError::Action(format!(
                            "generated matrix group exceeds {MAX_ACTING_ORDER} elements (infinite?)"
                        )));
                    }
                    index.insert(y.clone(), elems.len());
                    elems.push(y);
                }
            }
            i += 1;
        }
        let n = elems.len();
        let mut table = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let p = elems[a].mul(&elems[b])?;
                table[a][b] = *index.get(&p).ok_or_else(|| {
                    GroupError::Action("matrix closure is not closed under products".into())
                })?;
            }
        }
        Self::new(rank, FiniteGroupTable::from_trusted(table), elems)
    }

    /// `ℤ^r ⋊ H` with trivial action.
    pub fn direct(rank: usize, acting: FiniteGroupTable) -> Self {
        let action = vec![IntMatrix::identity(rank); acting.order()];
        SemidirectProductGroup { rank, acting, action }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn acting(&self) -> &FiniteGroupTable {
        &self.acting
    }

    pub fn action(&self, h: usize) -> &IntMatrix {
        &self.action[h]
    }

    pub fn actions(&self) -> &[IntMatrix] {
        &self.action
    }

    pub fn base(&self) -> FGAbelianGroup {
        FGAbelianGroup::free_abelian(self.rank)
    }

    pub fn is_action_trivial(&self) -> bool {
        let id = IntMatrix::identity(self.rank);
        self.action.iter().all(|m| *m == id)
    }

    pub fn translation(&self, v: Vec<i64>) -> SemidirectElement {
        SemidirectElement { v, h: 0 }
    }

    /// Canonical section `h ↦ (0, h)`.
    pub fn section(&self, h: usize) -> SemidirectElement {
        SemidirectElement { v: vec![0; self.rank], h }
    }

    /// `π(v, h) = h`.
    pub fn project(&self, g: &SemidirectElement) -> usize {
        g.h
    }

    /// Identifies `g` with an element of the normal lattice when `π(g) = e`.
    pub fn normal_part(&self, g: &SemidirectElement) -> Option<super::AbelianElement> {
        (g.h == 0).then(|| super::AbelianElement::free(g.v.clone()))
    }

    pub fn mul(&self, a: &SemidirectElement, b: &SemidirectElement) -> Result<SemidirectElement, GroupError> {
        self.check(a)?;
        self.check(b)?;
        self.try_op(a, b)
    }

    fn try_op(&self, a: &SemidirectElement, b: &SemidirectElement) -> Result<SemidirectElement, GroupError> {
        let w = self.action[a.h].mul_vec(&b.v)?;
        let v = a
            .v
            .iter()
            .zip(&w)
            .map(|(x, y)| x.checked_add(*y).ok_or(GroupError::Overflow("translation sum")))
            .collect::<Result<_, _>>()?;
        Ok(SemidirectElement { v, h: self.acting.op(&a.h, &b.h) })
    }

    /// `{v : σ(h)v = v for all h}` from the integer kernel of the stacked `σ(h) − I`.
    pub fn translation_center(&self) -> TranslationCenter {
        let id = IntMatrix::identity(self.rank);
        let blocks: Vec<IntMatrix> = self.action.iter().map(|m| m.sub(&id)).collect();
        let stacked = IntMatrix::stack(&blocks, self.rank);
        TranslationCenter { ambient_rank: self.rank, basis: stacked.integer_kernel() }
    }
}

impl GroupLaw for SemidirectProductGroup {
    type Elem = SemidirectElement;

    fn identity(&self) -> SemidirectElement {
        self.section(0)
    }

    /// `(v₁, h₁)(v₂, h₂) = (v₁ + σ(h₁)v₂, h₁h₂)`. Panics on `i64` overflow.
    fn op(&self, a: &SemidirectElement, b: &SemidirectElement) -> SemidirectElement {
        self.try_op(a, b).expect("semidirect product overflow")
    }

    /// `(v, h)⁻¹ = (−σ(h⁻¹)v, h⁻¹)`.
    fn inverse(&self, a: &SemidirectElement) -> SemidirectElement {
        let hi = self.acting.inverse(&a.h);
        let w = self.action[hi].mul_vec(&a.v).expect("semidirect inverse overflow");
        SemidirectElement { v: w.into_iter().map(|x| -x).collect(), h: hi }
    }

    fn check(&self, a: &SemidirectElement) -> Result<(), GroupError> {
        if a.v.len() != self.rank {
            return Err(GroupError::Dimension(format!(
                "translation of length {} in a rank-{} lattice",
                a.v.len(),
                self.rank
            )));
        }
        self.acting.check(&a.h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn dinf() -> SemidirectProductGroup {
        SemidirectProductGroup::from_matrix_generators(1, &[IntMatrix::scalar(1, -1)]).unwrap()
    }

    #[test]
    fn dihedral_conjugation() {
        let g = dinf();
        let a = g.translation(vec![1]);
        let flip = g.section(1);
        // (0,f)(1,e)(0,f)⁻¹ = (σ(f)·1, f)(0,f) = (−1, e)
        assert_eq!(g.conjugate(&flip, &a), g.translation(vec![-1]));
        let x = SemidirectElement::new(vec![5], 1);
        assert_eq!(g.op(&x, &g.inverse(&x)), g.identity());
        let v = g.translation(vec![2]);
        let w = g.translation(vec![-7]);
        assert_eq!(g.op(&v, &w), g.translation(vec![-5]));
    }

    #[test]
    fn centers() {
        let trivial = SemidirectProductGroup::direct(3, FiniteGroupTable::cyclic(2).unwrap());
        assert_eq!(trivial.translation_center().basis.len(), 3);
        assert!(dinf().translation_center().is_trivial());
        let swap = IntMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap();
        let g = SemidirectProductGroup::from_matrix_generators(2, &[swap]).unwrap();
        assert_eq!(g.translation_center().basis, vec![vec![1, 1]]);
    }

    #[test]
    fn validation() {
        let c2 = FiniteGroupTable::cyclic(2).unwrap();
        let bad_det = vec![IntMatrix::identity(1), IntMatrix::scalar(1, 2)];
        assert!(SemidirectProductGroup::new(1, c2.clone(), bad_det).is_err());
        // Z/3 cannot act by -1 (not a homomorphism)
        let c3 = FiniteGroupTable::cyclic(3).unwrap();
        let not_hom = vec![IntMatrix::identity(1), IntMatrix::scalar(1, -1), IntMatrix::scalar(1, -1)];
        assert!(SemidirectProductGroup::new(1, c3, not_hom).is_err());
        let ok = vec![IntMatrix::identity(1), IntMatrix::scalar(1, -1)];
        assert!(SemidirectProductGroup::new(1, c2, ok).is_ok());
        // infinite-order generator
        let shear = IntMatrix::from_rows(vec![vec![1, 1], vec![0, 1]]).unwrap();
        assert!(SemidirectProductGroup::from_matrix_generators(2, &[shear]).is_err());
    }

    #[test]
    fn order_three_rotation() {
        let rot = IntMatrix::from_rows(vec![vec![0, -1], vec![1, -1]]).unwrap();
        let g = SemidirectProductGroup::from_matrix_generators(2, &[rot]).unwrap();
        assert_eq!(g.acting().order(), 3);
        assert!(g.translation_center().is_trivial());
    }
}
