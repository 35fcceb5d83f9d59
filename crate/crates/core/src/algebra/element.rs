use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::AlgebraError;
use crate::coeff::Coeff;
use crate::group::GroupLaw;

/// Finite formal sum `Σ λ_g g` with no zero coefficients stored.
///
/// Iteration and serialization follow the group elements' total order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAlgebraElement<E: Ord> {
    terms: BTreeMap<E, Coeff>,
}

/// One `(element, coefficient)` pair of the canonical serialization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term<E> {
    pub g: E,
    pub c: Coeff,
}

impl<E: Ord + Clone> GroupAlgebraElement<E> {
    pub fn zero() -> Self {
        GroupAlgebraElement { terms: BTreeMap::new() }
    }

    pub fn basis(g: E) -> Self {
        Self::monomial(g, Coeff::one())
    }

    pub fn monomial(g: E, c: Coeff) -> Self {
        let mut x = Self::zero();
        x.add_term(g, &c);
        x
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (E, Coeff)>) -> Self {
        let mut x = Self::zero();
        for (g, c) in terms {
            x.add_term(g, &c);
        }
        x
    }

    /// `self += c·g`, dropping the entry if it cancels.
    pub fn add_term(&mut self, g: E, c: &Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(g) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, g: &E) -> Coeff {
        self.terms.get(g).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&E, &Coeff)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &E> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), &-c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        GroupAlgebraElement { terms: self.terms.iter().map(|(g, c)| (g.clone(), -c)).collect() }
    }

    pub fn scale(&self, s: &Coeff) -> Self {
        Self::from_terms(self.terms.iter().map(|(g, c)| (g.clone(), s * c)))
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        Self::from_terms(self.terms.iter().map(|(g, c)| (g.clone(), c.scale(r))))
    }

    /// Sum of coefficient moduli, `Σ |λ_g|` (an upper bound for every C*-norm).
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(Coeff::abs_f64).sum()
    }

    /// Keeps the terms accepted by `f`, re-keyed by its output.
    pub fn restrict_map<F: Ord + Clone>(
        &self,
        mut f: impl FnMut(&E) -> Option<F>,
    ) -> GroupAlgebraElement<F> {
        let mut out = GroupAlgebraElement::zero();
        for (g, c) in &self.terms {
            if let Some(h) = f(g) {
                out.add_term(h, c);
            }
        }
        out
    }

    pub fn to_terms(&self) -> Vec<Term<E>> {
        self.terms.iter().map(|(g, c)| Term { g: g.clone(), c: c.clone() }).collect()
    }
}

impl<E: Ord + Clone + Serialize> Serialize for GroupAlgebraElement<E> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_terms().serialize(s)
    }
}

impl<'de, E: Ord + Clone + Deserialize<'de>> Deserialize<'de> for GroupAlgebraElement<E> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms: Vec<Term<E>> = Vec::deserialize(d)?;
        Ok(Self::from_terms(terms.into_iter().map(|t| (t.g, t.c))))
    }
}

/// `ℂ[G]` for a concrete group law.
#[derive(Clone, Debug)]
pub struct GroupAlgebra<G: GroupLaw> {
    group: G,
}

impl<G: GroupLaw> GroupAlgebra<G> {
    pub fn new(group: G) -> Self {
        GroupAlgebra { group }
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn one(&self) -> GroupAlgebraElement<G::Elem> {
        GroupAlgebraElement::basis(self.group.identity())
    }

    pub fn scalar(&self, c: Coeff) -> GroupAlgebraElement<G::Elem> {
        GroupAlgebraElement::monomial(self.group.identity(), c)
    }

    /// Validated construction.
    pub fn element(
        &self,
        terms: impl IntoIterator<Item = (G::Elem, Coeff)>,
    ) -> Result<GroupAlgebraElement<G::Elem>, AlgebraError> {
        let x = GroupAlgebraElement::from_terms(terms);
        self.check(&x)?;
        Ok(x)
    }

    pub fn check(&self, x: &GroupAlgebraElement<G::Elem>) -> Result<(), AlgebraError> {
        for g in x.support() {
            self.group.check(g).map_err(AlgebraError::MixedGroup)?;
        }
        Ok(())
    }

    /// Convolution `(Σλ_g g)(Σμ_h h) = Σ λ_g μ_h (gh)`.
    pub fn mul(
        &self,
        x: &GroupAlgebraElement<G::Elem>,
        y: &GroupAlgebraElement<G::Elem>,
    ) -> GroupAlgebraElement<G::Elem> {
        let mut out = GroupAlgebraElement::zero();
        for (g, a) in x.terms() {
            for (h, b) in y.terms() {
                out.add_term(self.group.op(g, h), &(a * b));
            }
        }
        out
    }

    /// Convolution with operand validation.
    pub fn try_mul(
        &self,
        x: &GroupAlgebraElement<G::Elem>,
        y: &GroupAlgebraElement<G::Elem>,
    ) -> Result<GroupAlgebraElement<G::Elem>, AlgebraError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.mul(x, y))
    }

    pub fn try_add(
        &self,
        x: &GroupAlgebraElement<G::Elem>,
        y: &GroupAlgebraElement<G::Elem>,
    ) -> Result<GroupAlgebraElement<G::Elem>, AlgebraError> {
        self.check(x)?;
        self.check(y)?;
        Ok(x.add(y))
    }

    /// `λ_g g ↦ conj(λ_g) g⁻¹`.
    pub fn adjoint(&self, x: &GroupAlgebraElement<G::Elem>) -> GroupAlgebraElement<G::Elem> {
        GroupAlgebraElement::from_terms(x.terms().map(|(g, c)| (self.group.inverse(g), c.conj())))
    }

    pub fn is_self_adjoint(&self, x: &GroupAlgebraElement<G::Elem>) -> bool {
        self.adjoint(x) == *x
    }

    /// `β(g) = 1 − (g + g⁻¹)/2`.
    pub fn beta(&self, g: &G::Elem) -> GroupAlgebraElement<G::Elem> {
        let half = Coeff::ratio(-1, 2);
        let mut x = self.one();
        x.add_term(g.clone(), &half);
        x.add_term(self.group.inverse(g), &half);
        x
    }

    /// `(g + g⁻¹)/2`.
    pub fn real_part(&self, g: &G::Elem) -> GroupAlgebraElement<G::Elem> {
        let half = Coeff::ratio(1, 2);
        let mut x = GroupAlgebraElement::zero();
        x.add_term(g.clone(), &half);
        x.add_term(self.group.inverse(g), &half);
        x
    }

    /// `τ(x) = λ_e`.
    pub fn canonical_trace(&self, x: &GroupAlgebraElement<G::Elem>) -> Coeff {
        x.coefficient(&self.group.identity())
    }

    /// Restriction of the support to the subgroup accepted by `in_subgroup`.
    pub fn conditional_expectation(
        &self,
        x: &GroupAlgebraElement<G::Elem>,
        in_subgroup: impl Fn(&G::Elem) -> bool,
    ) -> GroupAlgebraElement<G::Elem> {
        x.restrict_map(|g| in_subgroup(g).then(|| g.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FGAbelianGroup, FiniteGroupTable};

    #[test]
    fn convolution_examples() {
        let alg = GroupAlgebra::new(FiniteGroupTable::cyclic(5).unwrap());
        let g = GroupAlgebraElement::basis(1usize);
        let gi = GroupAlgebraElement::basis(4usize);
        let x = alg.element([(2, Coeff::ratio(3, 7)), (3, Coeff::complex(1, 1, 2, 1))]).unwrap();
        assert_eq!(alg.mul(&alg.one(), &x), x);
        assert_eq!(alg.mul(&g, &gi), alg.one());
        // (e − g)(e + g) = e − g²
        let e_minus_g = alg.one().sub(&g);
        let e_plus_g = alg.one().add(&g);
        let expected = alg.one().sub(&GroupAlgebraElement::basis(2usize));
        assert_eq!(alg.mul(&e_minus_g, &e_plus_g), expected);
    }

    #[test]
    fn beta_shapes() {
        let z = GroupAlgebra::new(FGAbelianGroup::free_abelian(1));
        let a = crate::group::AbelianElement::free(vec![3]);
        let b = z.beta(&a);
        assert_eq!(b.len(), 3);
        assert_eq!(b.coefficient(&z.group().identity()), Coeff::one());
        assert_eq!(b.coefficient(&a), Coeff::ratio(-1, 2));
        assert_eq!(b, z.beta(&z.group().inverse(&a)));
        assert!(z.is_self_adjoint(&b));
        assert!(z.beta(&z.group().identity()).is_zero());
        assert_eq!(z.canonical_trace(&b), Coeff::one());

        // order-2 element merges to {e: 1, g: −1}
        let c2 = GroupAlgebra::new(FiniteGroupTable::cyclic(2).unwrap());
        let b2 = c2.beta(&1);
        assert_eq!(b2.len(), 2);
        assert_eq!(b2.coefficient(&1), Coeff::from_int(-1));
    }

    #[test]
    fn trace_and_expectation() {
        let alg = GroupAlgebra::new(FiniteGroupTable::cyclic(6).unwrap());
        assert_eq!(alg.canonical_trace(&alg.one()), Coeff::one());
        assert_eq!(alg.canonical_trace(&GroupAlgebraElement::basis(2)), Coeff::zero());
        // subgroup {0, 2, 4}
        let in_n = |g: &usize| g.is_multiple_of(2);
        let x = alg.element([(2, Coeff::ratio(1, 3)), (3, Coeff::from_int(5))]).unwrap();
        assert_eq!(
            alg.conditional_expectation(&x, in_n),
            GroupAlgebraElement::monomial(2, Coeff::ratio(1, 3))
        );
        assert!(alg.conditional_expectation(&GroupAlgebraElement::basis(1), in_n).is_zero());
        let y = GroupAlgebraElement::basis(4);
        assert_eq!(alg.conditional_expectation(&y, in_n), y);
    }

    #[test]
    fn mixed_group_rejected() {
        let alg = GroupAlgebra::new(FiniteGroupTable::cyclic(3).unwrap());
        let foreign = GroupAlgebraElement::basis(7usize);
        assert!(matches!(
            alg.try_mul(&alg.one(), &foreign),
            Err(AlgebraError::MixedGroup(_))
        ));
    }

    #[test]
    fn serialization_is_sorted() {
        let x = GroupAlgebraElement::from_terms([(3usize, Coeff::one()), (1usize, Coeff::ratio(1, 2))]);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"[{"g":1,"c":"1/2"},{"g":3,"c":"1"}]"#);
        let back: GroupAlgebraElement<usize> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }
}
