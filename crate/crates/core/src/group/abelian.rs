use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GroupError, GroupLaw};

/// `ℤ^r ⊕ ℤ/n₁ ⊕ … ⊕ ℤ/n_k` in invariant-factor form (`n₁ | n₂ | … | n_k`, each ≥ 2).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FGAbelianGroup {
    free_rank: usize,
    torsion_factors: Vec<u64>,
}

/// Element of an [`FGAbelianGroup`]: integer coordinates plus reduced residues.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbelianElement {
    #[serde(default)]
    pub free: Vec<i64>,
    #[serde(default)]
    pub torsion: Vec<u64>,
}

impl AbelianElement {
    /// Finite order iff the free part vanishes.
    pub fn is_torsion(&self) -> bool {
        self.free.iter().all(|&x| x == 0)
    }

    pub fn free(free: Vec<i64>) -> Self {
        AbelianElement { free, torsion: Vec::new() }
    }
}

impl fmt::Display for AbelianElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let free: Vec<String> = self.free.iter().map(i64::to_string).collect();
        let tor: Vec<String> = self.torsion.iter().map(u64::to_string).collect();
        write!(f, "({} | {})", free.join(","), tor.join(","))
    }
}

impl FGAbelianGroup {
    /// Strict constructor: the torsion list must already be an invariant-factor chain.
    pub fn new(free_rank: usize, torsion_factors: Vec<u64>) -> Result<Self, GroupError> {
        if let Some(&n) = torsion_factors.iter().find(|&&n| n < 2) {
            return Err(GroupError::TorsionFactors(format!("factor {n} is smaller than 2")));
        }
        for w in torsion_factors.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(GroupError::TorsionFactors(format!(
                    "divisibility chain broken: {} does not divide {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(FGAbelianGroup { free_rank, torsion_factors })
    }

    /// Normalizes an arbitrary direct sum `ℤ^r ⊕ ⨁ ℤ/mⱼ` (orders ≥ 1) to invariant factors.
    pub fn from_cyclic_orders(free_rank: usize, orders: &[u64]) -> Result<Self, GroupError> {
        if orders.contains(&0) {
            return Err(GroupError::TorsionFactors(
                "cyclic order 0 is not finite; count it in the free rank".into(),
            ));
        }
        // prime -> exponents collected over all summands
        let mut by_prime: std::collections::BTreeMap<u64, Vec<u32>> = Default::default();
        for &m in orders {
            for (p, e) in factorize(m) {
                by_prime.entry(p).or_default().push(e);
            }
        }
        let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; len];
        for (p, mut exps) in by_prime {
            exps.sort_unstable_by(|a, b| b.cmp(a));
            // largest prime powers go into the largest invariant factor (the last slot)
            for (slot, e) in exps.into_iter().enumerate() {
                let idx = len - 1 - slot;
                factors[idx] = factors[idx]
                    .checked_mul(p.checked_pow(e).ok_or(GroupError::Overflow("prime power"))?)
                    .ok_or(GroupError::Overflow("invariant factor"))?;
            }
        }
        factors.retain(|&n| n > 1);
        FGAbelianGroup::new(free_rank, factors)
    }

    pub fn free_abelian(rank: usize) -> Self {
        FGAbelianGroup { free_rank: rank, torsion_factors: Vec::new() }
    }

    pub fn cyclic(n: u64) -> Result<Self, GroupError> {
        Self::from_cyclic_orders(0, &[n])
    }

    pub fn trivial() -> Self {
        Self::free_abelian(0)
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion_factors(&self) -> &[u64] {
        &self.torsion_factors
    }

    /// Locally finite iff there is no free part.
    pub fn is_locally_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion_factors.is_empty()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion_factors.is_empty()
    }

    /// `|T(G)| = ∏ nᵢ`, saturating.
    pub fn torsion_order(&self) -> u128 {
        self.torsion_factors.iter().fold(1u128, |acc, &n| acc.saturating_mul(n as u128))
    }

    /// Returns `(T(G), G/T(G))`.
    pub fn torsion_subgroup_and_free_quotient(&self) -> (FGAbelianGroup, FGAbelianGroup) {
        (
            FGAbelianGroup { free_rank: 0, torsion_factors: self.torsion_factors.clone() },
            FGAbelianGroup::free_abelian(self.free_rank),
        )
    }

    /// `ρ: G → G/T(G)`.
    pub fn project_to_free(&self, x: &AbelianElement) -> AbelianElement {
        AbelianElement::free(x.free.clone())
    }

    /// Builds an element, reducing residues into `[0, nᵢ)`.
    pub fn element(&self, free: Vec<i64>, torsion: Vec<i64>) -> Result<AbelianElement, GroupError> {
        if free.len() != self.free_rank || torsion.len() != self.torsion_factors.len() {
            return Err(GroupError::Dimension(format!(
                "element with {} free and {} torsion coordinates in a group with shape ({}, {})",
                free.len(),
                torsion.len(),
                self.free_rank,
                self.torsion_factors.len()
            )));
        }
        let torsion = torsion
            .iter()
            .zip(&self.torsion_factors)
            .map(|(&c, &n)| c.rem_euclid(n as i64) as u64)
            .collect();
        Ok(AbelianElement { free, torsion })
    }

    pub fn zero(&self) -> AbelianElement {
        AbelianElement { free: vec![0; self.free_rank], torsion: vec![0; self.torsion_factors.len()] }
    }

    /// Checked product (sum) of two elements.
    pub fn add(&self, x: &AbelianElement, y: &AbelianElement) -> Result<AbelianElement, GroupError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.op(x, y))
    }

    pub fn neg(&self, x: &AbelianElement) -> Result<AbelianElement, GroupError> {
        self.check(x)?;
        Ok(self.inverse(x))
    }

    /// Standard generators: unit vectors of the free part, then the torsion generators.
    pub fn generators(&self) -> Vec<AbelianElement> {
        let mut out = Vec::new();
        for i in 0..self.free_rank {
            let mut x = self.zero();
            x.free[i] = 1;
            out.push(x);
        }
        for j in 0..self.torsion_factors.len() {
            let mut x = self.zero();
            x.torsion[j] = 1;
            out.push(x);
        }
        out
    }
}

impl fmt::Display for FGAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        parts.extend(self.torsion_factors.iter().map(|n| format!("Z/{n}")));
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl GroupLaw for FGAbelianGroup {
    type Elem = AbelianElement;

    fn identity(&self) -> AbelianElement {
        self.zero()
    }

    fn op(&self, a: &AbelianElement, b: &AbelianElement) -> AbelianElement {
        AbelianElement {
            free: a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&b.torsion)
                .zip(&self.torsion_factors)
                .map(|((x, y), n)| (x + y) % n)
                .collect(),
        }
    }

    fn inverse(&self, a: &AbelianElement) -> AbelianElement {
        AbelianElement {
            free: a.free.iter().map(|x| -x).collect(),
            torsion: a
                .torsion
                .iter()
                .zip(&self.torsion_factors)
                .map(|(x, n)| (n - x) % n)
                .collect(),
        }
    }

    fn check(&self, a: &AbelianElement) -> Result<(), GroupError> {
        if a.free.len() != self.free_rank || a.torsion.len() != self.torsion_factors.len() {
            return Err(GroupError::Dimension(format!("element {a} does not belong to {self}")));
        }
        if let Some((c, n)) = a.torsion.iter().zip(&self.torsion_factors).find(|(c, n)| c >= n) {
            return Err(GroupError::Dimension(format!("residue {c} not reduced modulo {n}")));
        }
        Ok(())
    }
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariant_factor_normalization() {
        let g = FGAbelianGroup::from_cyclic_orders(0, &[2, 3]).unwrap();
        assert_eq!(g.torsion_factors(), &[6]);
        let g = FGAbelianGroup::from_cyclic_orders(1, &[4, 6, 1]).unwrap();
        assert_eq!(g.torsion_factors(), &[2, 12]);
        assert_eq!(g.free_rank(), 1);
        let g = FGAbelianGroup::from_cyclic_orders(0, &[2, 2, 2]).unwrap();
        assert_eq!(g.torsion_factors(), &[2, 2, 2]);
        assert!(FGAbelianGroup::from_cyclic_orders(0, &[0]).is_err());
    }

    #[test]
    fn strict_constructor_rejects_broken_chain() {
        assert!(FGAbelianGroup::new(0, vec![2, 6]).is_ok());
        assert!(matches!(FGAbelianGroup::new(0, vec![4, 6]), Err(GroupError::TorsionFactors(_))));
        assert!(FGAbelianGroup::new(0, vec![1]).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        let z2 = FGAbelianGroup::free_abelian(2);
        let x = z2.element(vec![1, 0], vec![]).unwrap();
        let y = z2.element(vec![2, 3], vec![]).unwrap();
        assert_eq!(z2.add(&x, &y).unwrap().free, vec![3, 3]);
        let z4 = FGAbelianGroup::cyclic(4).unwrap();
        let t = z4.element(vec![], vec![3]).unwrap();
        assert_eq!(z4.add(&t, &t).unwrap().torsion, vec![2]);
        assert_eq!(z4.op(&t, &z4.inverse(&t)), z4.identity());
        let bad = AbelianElement::free(vec![1]);
        assert!(matches!(z2.add(&x, &bad), Err(GroupError::Dimension(_))));
    }

    #[test]
    fn torsion_predicate() {
        let g = FGAbelianGroup::new(2, vec![4]).unwrap();
        assert!(g.element(vec![0, 0], vec![3]).unwrap().is_torsion());
        assert!(!g.element(vec![1, 0], vec![0]).unwrap().is_torsion());
        assert!(g.identity().is_torsion());
    }

    #[test]
    fn torsion_split() {
        let g = FGAbelianGroup::new(2, vec![4]).unwrap();
        let (t, f) = g.torsion_subgroup_and_free_quotient();
        assert_eq!(t, FGAbelianGroup::cyclic(4).unwrap());
        assert_eq!(f, FGAbelianGroup::free_abelian(2));
        let g = FGAbelianGroup::from_cyclic_orders(0, &[2, 6]).unwrap();
        let (t, f) = g.torsion_subgroup_and_free_quotient();
        assert_eq!(t, g);
        assert!(f.is_trivial());
        let (t, f) = FGAbelianGroup::free_abelian(3).torsion_subgroup_and_free_quotient();
        assert!(t.is_trivial());
        assert_eq!(f.free_rank(), 3);
    }
}
