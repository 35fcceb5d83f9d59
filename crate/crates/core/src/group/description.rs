use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize, Serializer};

use super::{FGAbelianGroup, FiniteGroupTable, GroupError, IntMatrix, SemidirectProductGroup};

/// Group-theoretic properties tracked per description node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupProperty {
    LocallyFinite,
    Periodic,
    TorsionFree,
    Abelian,
    Nilpotent,
    LocallyNilpotent,
    Solvable,
    VirtuallySolvable,
    ElementaryAmenable,
    Amenable,
    FiniteHirsch,
    /// `Aut(G)` embeds in some `GL(l, k)`.
    LinearAutomorphisms,
    #[serde(rename = "strongly-not-fs")]
    StronglyNotFS,
}

impl GroupProperty {
    pub const ALL: [GroupProperty; 13] = [
        GroupProperty::LocallyFinite,
        GroupProperty::Periodic,
        GroupProperty::TorsionFree,
        GroupProperty::Abelian,
        GroupProperty::Nilpotent,
        GroupProperty::LocallyNilpotent,
        GroupProperty::Solvable,
        GroupProperty::VirtuallySolvable,
        GroupProperty::ElementaryAmenable,
        GroupProperty::Amenable,
        GroupProperty::FiniteHirsch,
        GroupProperty::LinearAutomorphisms,
        GroupProperty::StronglyNotFS,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GroupProperty::LocallyFinite => "locally-finite",
            GroupProperty::Periodic => "periodic",
            GroupProperty::TorsionFree => "torsion-free",
            GroupProperty::Abelian => "abelian",
            GroupProperty::Nilpotent => "nilpotent",
            GroupProperty::LocallyNilpotent => "locally-nilpotent",
            GroupProperty::Solvable => "solvable",
            GroupProperty::VirtuallySolvable => "virtually-solvable",
            GroupProperty::ElementaryAmenable => "elementary-amenable",
            GroupProperty::Amenable => "amenable",
            GroupProperty::FiniteHirsch => "finite-hirsch",
            GroupProperty::LinearAutomorphisms => "linear-automorphisms",
            GroupProperty::StronglyNotFS => "strongly-not-fs",
        }
    }
}

impl fmt::Display for GroupProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A user-declared property value with its justification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeclaredTag {
    pub value: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub justification: Option<String>,
}

pub type DeclaredTags = BTreeMap<GroupProperty, DeclaredTag>;

/// How a finite prefix of an increasing union extrapolates to the limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnionLimit {
    /// Stage invariants are eventually constant; the prefix supremum is the limit value.
    Stable,
    /// Hirsch length of the stages grows without bound.
    Unbounded,
}

/// `⋃ G_n`, given by an explicitly declared finite prefix of stages.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IncreasingUnion {
    pub stages: Vec<GroupDescription>,
    pub limit: UnionLimit,
    /// Optional inclusion maps `G_n → G_{n+1}` for free abelian stages
    /// (matrices of shape `rank(G_{n+1}) × rank(G_n)`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connecting: Option<Vec<IntMatrix>>,
    /// Tags declared to hold for every stage.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub stage_tags: DeclaredTags,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupNode {
    Abelian(FGAbelianGroup),
    Finite { table: FiniteGroupTable },
    Semidirect(SemidirectProductGroup),
    Extension {
        normal: Box<GroupDescription>,
        quotient: Box<GroupDescription>,
        #[serde(skip_serializing_if = "Option::is_none")]
        realization: Option<SemidirectProductGroup>,
    },
    Union(IncreasingUnion),
}

/// A node of a group construction tree plus its declared tags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupDescription {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(flatten)]
    pub node: GroupNode,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub tags: DeclaredTags,
}

/// Hirsch length: a non-negative integer or `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HirschLength {
    Finite(u64),
    Infinite,
}

impl HirschLength {
    pub fn is_finite(self) -> bool {
        matches!(self, HirschLength::Finite(_))
    }
}

impl Add for HirschLength {
    type Output = HirschLength;
    fn add(self, rhs: HirschLength) -> HirschLength {
        match (self, rhs) {
            (HirschLength::Finite(a), HirschLength::Finite(b)) => HirschLength::Finite(a + b),
            _ => HirschLength::Infinite,
        }
    }
}

impl fmt::Display for HirschLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HirschLength::Finite(n) => write!(f, "{n}"),
            HirschLength::Infinite => write!(f, "+inf"),
        }
    }
}

impl Serialize for HirschLength {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            HirschLength::Finite(n) => s.serialize_u64(*n),
            HirschLength::Infinite => s.serialize_str("+inf"),
        }
    }
}

impl GroupDescription {
    pub fn new(node: GroupNode) -> Self {
        GroupDescription { label: None, node, tags: DeclaredTags::new() }
    }

    pub fn abelian(g: FGAbelianGroup) -> Self {
        Self::new(GroupNode::Abelian(g))
    }

    pub fn finite(table: FiniteGroupTable) -> Self {
        Self::new(GroupNode::Finite { table })
    }

    pub fn semidirect(g: SemidirectProductGroup) -> Self {
        Self::new(GroupNode::Semidirect(g))
    }

    pub fn extension(normal: GroupDescription, quotient: GroupDescription) -> Self {
        Self::new(GroupNode::Extension {
            normal: Box::new(normal),
            quotient: Box::new(quotient),
            realization: None,
        })
    }

    /// Extension realized by a semidirect product; validates that the
    /// realization's lattice and acting group match the declared children.
    pub fn realized_extension(realization: SemidirectProductGroup) -> Self {
        let normal = Self::abelian(realization.base());
        let quotient = Self::finite(realization.acting().clone());
        Self::new(GroupNode::Extension {
            normal: Box::new(normal),
            quotient: Box::new(quotient),
            realization: Some(realization),
        })
    }

    pub fn union(stages: Vec<GroupDescription>, limit: UnionLimit) -> Self {
        Self::new(GroupNode::Union(IncreasingUnion {
            stages,
            limit,
            connecting: None,
            stage_tags: DeclaredTags::new(),
        }))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_tag(mut self, prop: GroupProperty, value: bool, justification: &str) -> Self {
        self.tags.insert(
            prop,
            DeclaredTag { value, justification: Some(justification.to_string()) },
        );
        self
    }

    pub fn kind(&self) -> &'static str {
        match &self.node {
            GroupNode::Abelian(_) => "abelian",
            GroupNode::Finite { .. } => "finite",
            GroupNode::Semidirect(_) => "semidirect",
            GroupNode::Extension { .. } => "extension",
            GroupNode::Union(_) => "union",
        }
    }

    /// Direct children, in a fixed order (normal before quotient; stages in order).
    pub fn children(&self) -> Vec<&GroupDescription> {
        match &self.node {
            GroupNode::Extension { normal, quotient, .. } => vec![normal, quotient],
            GroupNode::Union(u) => u.stages.iter().collect(),
            _ => Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }

    pub fn declared(&self, prop: GroupProperty) -> Option<bool> {
        self.tags.get(&prop).map(|t| t.value)
    }

    /// Structural validation of the whole tree.
    pub fn validate(&self) -> Result<(), GroupError> {
        match &self.node {
            GroupNode::Extension { normal, quotient, realization } => {
                normal.validate()?;
                quotient.validate()?;
                if let Some(real) = realization {
                    let normal_ok = matches!(&normal.node,
                        GroupNode::Abelian(a) if a.free_rank() == real.rank() && a.is_torsion_free());
                    let quotient_ok = matches!(&quotient.node,
                        GroupNode::Finite { table } if table == real.acting());
                    if !normal_ok {
                        return Err(GroupError::Description(format!(
                            "realization lattice Z^{} does not match the declared normal subgroup",
                            real.rank()
                        )));
                    }
                    if !quotient_ok {
                        return Err(GroupError::Description(
                            "realization acting group does not match the declared quotient".into(),
                        ));
                    }
                }
                Ok(())
            }
            GroupNode::Union(u) => {
                if u.stages.is_empty() {
                    return Err(GroupError::Description("increasing union with no stages".into()));
                }
                for s in &u.stages {
                    s.validate()?;
                }
                if let Some(maps) = &u.connecting {
                    if maps.len() + 1 != u.stages.len() {
                        return Err(GroupError::Description(format!(
                            "{} connecting maps for {} stages",
                            maps.len(),
                            u.stages.len()
                        )));
                    }
                    for (i, m) in maps.iter().enumerate() {
                        let rank_of = |d: &GroupDescription| match &d.node {
                            GroupNode::Abelian(a) if a.is_torsion_free() => Some(a.free_rank()),
                            _ => None,
                        };
                        let (Some(src), Some(dst)) =
                            (rank_of(&u.stages[i]), rank_of(&u.stages[i + 1]))
                        else {
                            return Err(GroupError::Description(
                                "connecting maps are only supported between free abelian stages".into(),
                            ));
                        };
                        if m.rows() != dst || m.cols() != src {
                            return Err(GroupError::Description(format!(
                                "connecting map {i} has shape {}x{}, expected {dst}x{src}",
                                m.rows(),
                                m.cols()
                            )));
                        }
                        if m.rank() != src {
                            return Err(GroupError::Description(format!(
                                "connecting map {i} is not injective"
                            )));
                        }
                    }
                }
                if u.limit == UnionLimit::Unbounded {
                    let hs: Vec<HirschLength> =
                        u.stages.iter().filter_map(|s| s.hirsch_length().ok()).collect();
                    if hs.len() == u.stages.len() && hs.windows(2).any(|w| w[1] < w[0]) {
                        return Err(GroupError::Description(
                            "stages of a nested union cannot decrease in Hirsch length".into(),
                        ));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Hirsch length from `h(ℤ) = 1`, `h(finite) = 0`, additivity over
    /// extensions and suprema over increasing unions.
    pub fn hirsch_length(&self) -> Result<HirschLength, GroupError> {
        if self.declared(GroupProperty::ElementaryAmenable) == Some(false) {
            return Err(GroupError::Unsupported(
                "Hirsch length is only defined for elementary amenable groups".into(),
            ));
        }
        match &self.node {
            GroupNode::Abelian(a) => Ok(HirschLength::Finite(a.free_rank() as u64)),
            GroupNode::Finite { .. } => Ok(HirschLength::Finite(0)),
            GroupNode::Semidirect(s) => Ok(HirschLength::Finite(s.rank() as u64)),
            GroupNode::Extension { normal, quotient, .. } => {
                Ok(normal.hirsch_length()? + quotient.hirsch_length()?)
            }
            GroupNode::Union(u) => {
                if u.stage_tags.get(&GroupProperty::ElementaryAmenable).map(|t| t.value)
                    == Some(false)
                {
                    return Err(GroupError::Unsupported(
                        "stages declared not elementary amenable".into(),
                    ));
                }
                let mut sup = HirschLength::Finite(0);
                for s in &u.stages {
                    sup = sup.max(s.hirsch_length()?);
                }
                match u.limit {
                    UnionLimit::Stable => Ok(sup),
                    UnionLimit::Unbounded => Ok(HirschLength::Infinite),
                }
            }
        }
    }

    /// Whether the group is known to be trivial/non-trivial from structure alone.
    pub fn is_trivial(&self) -> Option<bool> {
        match &self.node {
            GroupNode::Abelian(a) => Some(a.is_trivial()),
            GroupNode::Finite { table } => Some(table.order() == 1),
            GroupNode::Semidirect(s) => Some(s.rank() == 0 && s.acting().order() == 1),
            GroupNode::Extension { normal, quotient, .. } => {
                match (normal.is_trivial(), quotient.is_trivial()) {
                    (Some(true), Some(true)) => Some(true),
                    (Some(false), _) | (_, Some(false)) => Some(false),
                    _ => None,
                }
            }
            GroupNode::Union(u) => {
                let all: Vec<Option<bool>> = u.stages.iter().map(|s| s.is_trivial()).collect();
                if all.contains(&Some(false)) {
                    Some(false)
                } else if u.limit == UnionLimit::Stable && all.iter().all(|t| *t == Some(true)) {
                    Some(true)
                } else {
                    None
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize) -> GroupDescription {
        GroupDescription::abelian(FGAbelianGroup::free_abelian(n))
    }

    #[test]
    fn hirsch_examples() {
        for n in 0..=10 {
            assert_eq!(z(n).hirsch_length().unwrap(), HirschLength::Finite(n as u64));
        }
        let q = GroupDescription::union(vec![z(1), z(1), z(1)], UnionLimit::Stable);
        assert_eq!(q.hirsch_length().unwrap(), HirschLength::Finite(1));
        let sum_z = GroupDescription::union((1..4).map(z).collect(), UnionLimit::Unbounded);
        let wreath = GroupDescription::extension(sum_z, z(1));
        assert_eq!(wreath.hirsch_length().unwrap(), HirschLength::Infinite);
        let f = GroupDescription::finite(FiniteGroupTable::cyclic(5).unwrap());
        assert_eq!(f.hirsch_length().unwrap(), HirschLength::Finite(0));
    }

    #[test]
    fn hirsch_rejects_non_elementary_amenable() {
        let d = z(1).with_tag(GroupProperty::ElementaryAmenable, false, "declared");
        assert!(matches!(d.hirsch_length(), Err(GroupError::Unsupported(_))));
    }

    #[test]
    fn realization_must_match_children() {
        let s = SemidirectProductGroup::from_matrix_generators(1, &[IntMatrix::scalar(1, -1)]).unwrap();
        let ok = GroupDescription::realized_extension(s.clone());
        assert!(ok.validate().is_ok());
        let bad = GroupDescription::new(GroupNode::Extension {
            normal: Box::new(z(2)),
            quotient: Box::new(GroupDescription::finite(s.acting().clone())),
            realization: Some(s),
        });
        assert!(bad.validate().is_err());
    }

    #[test]
    fn connecting_maps_validated() {
        let mut q = GroupDescription::union(vec![z(1), z(1)], UnionLimit::Stable);
        if let GroupNode::Union(u) = &mut q.node {
            u.connecting = Some(vec![IntMatrix::scalar(1, 2)]);
        }
        assert!(q.validate().is_ok());
        if let GroupNode::Union(u) = &mut q.node {
            u.connecting = Some(vec![IntMatrix::scalar(1, 0)]);
        }
        assert!(q.validate().is_err());
    }

    #[test]
    fn hirsch_display() {
        assert_eq!(HirschLength::Infinite.to_string(), "+inf");
        assert_eq!(serde_json::to_string(&HirschLength::Finite(3)).unwrap(), "3");
        assert!(HirschLength::Finite(1_000) < HirschLength::Infinite);
    }
}
