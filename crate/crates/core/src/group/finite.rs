use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{GroupError, GroupLaw};

/// Finite group given by its Cayley table. Index 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct FiniteGroupTable {
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
}

impl FiniteGroupTable {
    /// Validates a full table: Latin square, index 0 is a two-sided identity,
    /// associativity (checked exhaustively).
    pub fn new(mul: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = mul.len();
        if n == 0 {
            return Err(GroupError::Table("empty table".into()));
        }
        if mul.iter().any(|row| row.len() != n) {
            return Err(GroupError::Table("table is not square".into()));
        }
        if mul.iter().flatten().any(|&x| x >= n) {
            return Err(GroupError::Table("entry out of range".into()));
        }
        for i in 0..n {
            let row: BTreeSet<_> = mul[i].iter().collect();
            let col: BTreeSet<_> = (0..n).map(|j| mul[j][i]).collect();
            if row.len() != n || col.len() != n {
                return Err(GroupError::Table(format!("row/column {i} is not a permutation")));
            }
        }
        for i in 0..n {
            if mul[0][i] != i || mul[i][0] != i {
                return Err(GroupError::Table("index 0 is not a two-sided identity".into()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = mul[a][b];
                for c in 0..n {
                    if mul[ab][c] != mul[a][mul[b][c]] {
                        return Err(GroupError::Table(format!(
                            "associativity fails on ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let inv = (0..n)
            .map(|a| (0..n).find(|&b| mul[a][b] == 0).expect("latin square has inverses"))
            .collect();
        Ok(FiniteGroupTable { mul, inv })
    }

    /// Builds the table without the cubic associativity check; callers guarantee
    /// the table comes from an actual group law.
    pub(crate) fn from_trusted(mul: Vec<Vec<usize>>) -> Self {
        let n = mul.len();
        let inv = (0..n)
            .map(|a| (0..n).find(|&b| mul[a][b] == 0).expect("group table"))
            .collect();
        FiniteGroupTable { mul, inv }
    }

    pub fn cyclic(n: usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::Table("cyclic group of order 0".into()));
        }
        Ok(Self::from_trusted((0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect()))
    }

    pub fn trivial() -> Self {
        Self::from_trusted(vec![vec![0]])
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mul
    }

    pub fn inverse_table(&self) -> &[usize] {
        &self.inv
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.mul[x][a];
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul[a][b] == self.mul[b][a]))
    }

    fn commutator(&self, a: usize, b: usize) -> usize {
        // a b a⁻¹ b⁻¹
        self.mul[self.mul[self.mul[a][b]][self.inv[a]]][self.inv[b]]
    }

    /// Subgroup generated by `gens`.
    pub fn closure(&self, gens: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut sub: BTreeSet<usize> = BTreeSet::from([0]);
        let mut frontier: Vec<usize> = vec![0];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul[x][g];
                if sub.insert(y) {
                    frontier.push(y);
                }
            }
        }
        sub
    }

    fn commutator_subgroup(&self, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> BTreeSet<usize> {
        let gens = a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y)));
        let gens: BTreeSet<usize> = gens.map(|(x, y)| self.commutator(x, y)).collect();
        self.closure(&gens)
    }

    /// Derived series reaches the trivial group.
    pub fn is_solvable(&self) -> bool {
        let mut cur: BTreeSet<usize> = (0..self.order()).collect();
        loop {
            if cur.len() == 1 {
                return true;
            }
            let next = self.commutator_subgroup(&cur, &cur);
            if next.len() == cur.len() {
                return false;
            }
            cur = next;
        }
    }

    /// Lower central series reaches the trivial group.
    pub fn is_nilpotent(&self) -> bool {
        let all: BTreeSet<usize> = (0..self.order()).collect();
        let mut cur = all.clone();
        loop {
            if cur.len() == 1 {
                return true;
            }
            let next = self.commutator_subgroup(&cur, &all);
            if next.len() == cur.len() {
                return false;
            }
            cur = next;
        }
    }
}

impl GroupLaw for FiniteGroupTable {
    type Elem = usize;

    fn identity(&self) -> usize {
        0
    }

    fn op(&self, a: &usize, b: &usize) -> usize {
        self.mul[*a][*b]
    }

    fn inverse(&self, a: &usize) -> usize {
        self.inv[*a]
    }

    fn check(&self, a: &usize) -> Result<(), GroupError> {
        if *a < self.order() {
            Ok(())
        } else {
            Err(GroupError::Dimension(format!("index {a} outside a group of order {}", self.order())))
        }
    }
}

impl TryFrom<Vec<Vec<usize>>> for FiniteGroupTable {
    type Error = GroupError;
    fn try_from(mul: Vec<Vec<usize>>) -> Result<Self, Self::Error> {
        FiniteGroupTable::new(mul)
    }
}

impl From<FiniteGroupTable> for Vec<Vec<usize>> {
    fn from(t: FiniteGroupTable) -> Self {
        t.mul
    }
}
