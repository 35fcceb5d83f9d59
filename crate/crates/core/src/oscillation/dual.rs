use std::collections::BTreeSet;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::OscillationError;
use crate::group::{AbelianElement, FGAbelianGroup, GroupError};

pub const DEFAULT_COMPONENTS_CAP: usize = 4096;

/// `Ĝ` for `G = ℤ^r ⊕ ⨁ ℤ/nᵢ`: `∏ nᵢ` tori of dimension `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualDescription {
    group: FGAbelianGroup,
    components_cap: usize,
}

/// `χ(x) = exp(2πi(θ·free + Σ tⱼcⱼ/nⱼ))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Character {
    pub theta: Vec<f64>,
    pub torsion: Vec<u64>,
}

/// Components actually visited.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentSelection {
    pub tuples: Vec<Vec<u64>>,
    pub total: u128,
    pub sampled: bool,
}

impl Character {
    pub fn trivial(group: &FGAbelianGroup) -> Self {
        Character { theta: vec![0.0; group.free_rank()], torsion: vec![0; group.torsion_factors().len()] }
    }
}

impl DualDescription {
    pub fn new(group: FGAbelianGroup) -> Self {
        DualDescription { group, components_cap: DEFAULT_COMPONENTS_CAP }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.components_cap = cap.max(1);
        self
    }

    pub fn group(&self) -> &FGAbelianGroup {
        &self.group
    }

    pub fn dimension(&self) -> usize {
        self.group.free_rank()
    }

    pub fn components_cap(&self) -> usize {
        self.components_cap
    }

    pub fn component_count(&self) -> u128 {
        self.group.torsion_order()
    }

    /// Mixed-radix index of a torsion tuple (last coordinate fastest).
    pub fn component_id(&self, tuple: &[u64]) -> u128 {
        tuple
            .iter()
            .zip(self.group.torsion_factors())
            .fold(0u128, |acc, (&t, &n)| acc * n as u128 + t as u128)
    }

    fn tuple_of(&self, mut id: u128) -> Vec<u64> {
        let factors = self.group.torsion_factors();
        let mut out = vec![0u64; factors.len()];
        for (slot, &n) in out.iter_mut().zip(factors).rev() {
            *slot = (id % n as u128) as u64;
            id /= n as u128;
        }
        out
    }

    /// All components when their number is within the cap; otherwise the
    /// trivial component plus `cap − 1` others drawn uniformly without
    /// replacement, flagged as sampled.
    pub fn components(&self, seed: u64) -> ComponentSelection {
        let total = self.component_count();
        if total <= self.components_cap as u128 {
            let tuples = (0..total).map(|id| self.tuple_of(id)).collect();
            return ComponentSelection { tuples, total, sampled: false };
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ids: BTreeSet<u128> = BTreeSet::from([0]);
        while ids.len() < self.components_cap {
            ids.insert(rng.gen_range(0..total));
        }
        ComponentSelection { tuples: ids.into_iter().map(|id| self.tuple_of(id)).collect(), total, sampled: true }
    }

    pub fn check_character(&self, chi: &Character) -> Result<(), OscillationError> {
        let g = &self.group;
        if chi.theta.len() != g.free_rank() || chi.torsion.len() != g.torsion_factors().len() {
            return Err(GroupError::Dimension("character does not match the dual".into()).into());
        }
        if chi.torsion.iter().zip(g.torsion_factors()).any(|(t, n)| t >= n) {
            return Err(GroupError::Dimension("torsion character index out of range".into()).into());
        }
        Ok(())
    }
}

/// Phase `θ·free + Σ tⱼcⱼ/nⱼ` reduced to `[0, 1)`.
pub(crate) fn phase(group: &FGAbelianGroup, chi: &Character, x: &AbelianElement) -> f64 {
    let free: f64 = chi.theta.iter().zip(&x.free).map(|(t, &v)| t * v as f64).sum();
    let tor: f64 = chi
        .torsion
        .iter()
        .zip(&x.torsion)
        .zip(group.torsion_factors())
        .map(|((&t, &c), &n)| ((t as u128 * c as u128) % n as u128) as f64 / n as f64)
        .sum();
    (free + tor).rem_euclid(1.0)
}

pub(crate) fn unit(phase: f64) -> Complex64 {
    // exact values at quarter turns keep closed-form examples exact
    if phase == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    if phase == 0.5 {
        return Complex64::new(-1.0, 0.0);
    }
    if phase == 0.25 {
        return Complex64::new(0.0, 1.0);
    }
    if phase == 0.75 {
        return Complex64::new(0.0, -1.0);
    }
    Complex64::from_polar(1.0, TAU * phase)
}

pub fn character_value(
    dual: &DualDescription,
    chi: &Character,
    x: &AbelianElement,
) -> Result<Complex64, OscillationError> {
    use crate::group::GroupLaw;
    dual.check_character(chi)?;
    dual.group.check(x)?;
    Ok(unit(phase(&dual.group, chi, x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn character_examples() {
        let z = DualDescription::new(FGAbelianGroup::free_abelian(1));
        let one = AbelianElement::free(vec![1]);
        let triv = Character::trivial(z.group());
        assert_eq!(character_value(&z, &triv, &one).unwrap(), Complex64::new(1.0, 0.0));
        let half = Character { theta: vec![0.5], torsion: vec![] };
        assert_eq!(character_value(&z, &half, &one).unwrap(), Complex64::new(-1.0, 0.0));
        let z4 = DualDescription::new(FGAbelianGroup::cyclic(4).unwrap());
        let chi = Character { theta: vec![], torsion: vec![1] };
        let c = AbelianElement { free: vec![], torsion: vec![1] };
        assert_eq!(character_value(&z4, &chi, &c).unwrap(), Complex64::new(0.0, 1.0));
        assert!(character_value(&z4, &half, &c).is_err());
    }

    #[test]
    fn component_enumeration() {
        let d = DualDescription::new(FGAbelianGroup::new(1, vec![2, 4]).unwrap());
        let sel = d.components(0);
        assert_eq!(sel.total, 8);
        assert_eq!(sel.tuples.len(), 8);
        assert!(!sel.sampled);
        for (i, t) in sel.tuples.iter().enumerate() {
            assert_eq!(d.component_id(t), i as u128);
        }
        let capped = d.clone().with_cap(3).components(5);
        assert!(capped.sampled);
        assert_eq!(capped.tuples.len(), 3);
        assert_eq!(capped.tuples[0], vec![0, 0]);
        assert_eq!(capped, d.with_cap(3).components(5));
    }
}
