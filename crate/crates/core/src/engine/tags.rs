use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use super::EngineError;
use crate::group::{GroupDescription, GroupNode, GroupProperty, UnionLimit};

use GroupProperty::*;

/// Where a node sits relative to its parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Role {
    Root,
    Normal,
    Quotient,
    Stage(usize),
}

/// Pre-order flattening of a description tree.
#[derive(Clone, Debug)]
pub(crate) struct FlatNode<'a> {
    pub path: String,
    pub desc: &'a GroupDescription,
    pub role: Role,
    pub children: Vec<usize>,
}

pub(crate) fn flatten(d: &GroupDescription) -> Vec<FlatNode<'_>> {
    fn walk<'a>(d: &'a GroupDescription, path: String, role: Role, out: &mut Vec<FlatNode<'a>>) -> usize {
        let idx = out.len();
        out.push(FlatNode { path: path.clone(), desc: d, role, children: Vec::new() });
        let join = |seg: String| if path.is_empty() { seg } else { format!("{path}/{seg}") };
        let mut children = Vec::new();
        match &d.node {
            GroupNode::Extension { normal, quotient, .. } => {
                children.push(walk(normal, join("normal".into()), Role::Normal, out));
                children.push(walk(quotient, join("quotient".into()), Role::Quotient, out));
            }
            GroupNode::Union(u) => {
                for (i, s) in u.stages.iter().enumerate() {
                    children.push(walk(s, join(format!("stages[{i}]")), Role::Stage(i), out));
                }
            }
            _ => {}
        }
        out[idx].children = children;
        idx
    }
    let mut out = Vec::new();
    walk(d, String::new(), Role::Root, &mut out);
    out
}

pub(crate) fn display_path(path: &str) -> &str {
    if path.is_empty() {
        "root"
    } else {
        path
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Declared,
    Derived(&'static str),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Declared => f.write_str("declared"),
            Provenance::Derived(rule) => write!(f, "derived:{rule}"),
        }
    }
}

impl Serialize for Provenance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A fact a derivation step depends on.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Premise {
    Tag { node: usize, path: String, property: GroupProperty, value: bool },
    Fact(String),
}

impl fmt::Display for Premise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Premise::Tag { path, property, value, .. } => write!(f, "{}: {property}={value}", display_path(path)),
            Premise::Fact(s) => f.write_str(s),
        }
    }
}

impl Serialize for Premise {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tag {
    pub value: bool,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub justification: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<Premise>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeTags {
    pub path: String,
    pub kind: &'static str,
    pub tags: BTreeMap<GroupProperty, Tag>,
}

/// Tri-state property flags for every node of a description, each known flag
/// carrying its provenance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyTagSet {
    pub nodes: Vec<NodeTags>,
    pub iterations: usize,
}

impl PropertyTagSet {
    pub fn node_index(&self, path: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.path == path)
    }

    pub fn get(&self, node: usize, p: GroupProperty) -> Option<bool> {
        self.nodes[node].tags.get(&p).map(|t| t.value)
    }

    pub fn tag(&self, node: usize, p: GroupProperty) -> Option<&Tag> {
        self.nodes[node].tags.get(&p)
    }

    pub fn root(&self, p: GroupProperty) -> Option<bool> {
        self.get(0, p)
    }

    pub fn at(&self, path: &str, p: GroupProperty) -> Option<bool> {
        self.node_index(path).and_then(|i| self.get(i, p))
    }

    pub(crate) fn premise(&self, node: usize, p: GroupProperty) -> Premise {
        Premise::Tag {
            node,
            path: self.nodes[node].path.clone(),
            property: p,
            value: self.get(node, p).expect("premise on a known tag"),
        }
    }

    /// Records a derived value, or reports a clash with an existing one.
    /// Returns whether anything changed.
    pub(crate) fn set(
        &mut self,
        node: usize,
        p: GroupProperty,
        value: bool,
        rule: &'static str,
        premises: Vec<Premise>,
    ) -> Result<bool, EngineError> {
        let path = self.nodes[node].path.clone();
        match self.nodes[node].tags.get(&p) {
            Some(t) if t.value == value => Ok(false),
            Some(t) => Err(EngineError::InconsistentTags {
                path: display_path(&path).to_string(),
                property: p,
                first: format!("{}={} ({})", p, t.value, t.provenance),
                second: format!("{}={} ({})", p, value, Provenance::Derived(rule)),
            }),
            None => {
                let tag = Tag { value, provenance: Provenance::Derived(rule), justification: None, premises };
                self.nodes[node].tags.insert(p, tag);
                Ok(true)
            }
        }
    }
}

/// `A ⇒ B` within one node, applied forwards and by contraposition.
const IMPLICATIONS: &[(GroupProperty, GroupProperty, &str)] = &[
    (LocallyFinite, Periodic, "lf-periodic"),
    (LocallyFinite, ElementaryAmenable, "lf-elementary-amenable"),
    (LocallyFinite, FiniteHirsch, "lf-finite-hirsch"),
    (Abelian, Nilpotent, "abelian-nilpotent"),
    (Nilpotent, Solvable, "nilpotent-solvable"),
    (Nilpotent, LocallyNilpotent, "nilpotent-locally-nilpotent"),
    (Solvable, VirtuallySolvable, "solvable-virtually-solvable"),
    (VirtuallySolvable, ElementaryAmenable, "virtually-solvable-elementary-amenable"),
    (ElementaryAmenable, Amenable, "elementary-amenable-amenable"),
    (LocallyNilpotent, Amenable, "locally-nilpotent-amenable"),
];

const EXTENSION_CLOSED: &[GroupProperty] =
    &[LocallyFinite, Periodic, TorsionFree, Solvable, ElementaryAmenable, Amenable, FiniteHirsch];
const SUBGROUP_CLOSED: &[GroupProperty] = &[
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
];
const QUOTIENT_CLOSED: &[GroupProperty] = &[
    LocallyFinite,
    Periodic,
    Abelian,
    Nilpotent,
    LocallyNilpotent,
    Solvable,
    VirtuallySolvable,
    ElementaryAmenable,
    Amenable,
    FiniteHirsch,
];
const UNION_CLOSED: &[GroupProperty] =
    &[LocallyFinite, Periodic, TorsionFree, Abelian, LocallyNilpotent, ElementaryAmenable, Amenable];

fn structural(d: &GroupDescription) -> Vec<(GroupProperty, bool, &'static str, String)> {
    let mut out = Vec::new();
    let mut push = |p, v, rule, fact: String| out.push((p, v, rule, fact));
    match &d.node {
        GroupNode::Abelian(a) => {
            let fact = format!("abelian atom {a}");
            let r0 = a.free_rank() == 0;
            for (p, v) in [
                (Abelian, true),
                (LocallyFinite, r0),
                (Periodic, r0),
                (TorsionFree, a.is_torsion_free()),
                (ElementaryAmenable, true),
                (FiniteHirsch, true),
            ] {
                push(p, v, "atom-abelian", fact.clone());
            }
        }
        GroupNode::Finite { table } => {
            let fact = format!("finite group of order {}", table.order());
            for (p, v) in [
                (LocallyFinite, true),
                (Abelian, table.is_abelian()),
                (Nilpotent, table.is_nilpotent()),
                (LocallyNilpotent, table.is_nilpotent()),
                (Solvable, table.is_solvable()),
                (VirtuallySolvable, true),
                (TorsionFree, table.order() == 1),
            ] {
                push(p, v, "atom-finite", fact.clone());
            }
        }
        GroupNode::Semidirect(s) | GroupNode::Extension { realization: Some(s), .. } => {
            let h = s.acting();
            let fact = format!("Z^{} semidirect a finite group of order {}", s.rank(), h.order());
            let trivial_action = s.is_action_trivial();
            for (p, v) in [
                (LocallyFinite, s.rank() == 0),
                (Periodic, s.rank() == 0),
                (TorsionFree, h.order() == 1),
                (Abelian, trivial_action && h.is_abelian()),
                // a finite group acting unipotently on a lattice acts trivially
                (Nilpotent, trivial_action && h.is_nilpotent()),
                (LocallyNilpotent, trivial_action && h.is_nilpotent()),
                (Solvable, h.is_solvable()),
                (VirtuallySolvable, true),
                (FiniteHirsch, true),
            ] {
                push(p, v, "atom-semidirect", fact.clone());
            }
        }
        GroupNode::Union(u) if u.limit == UnionLimit::Unbounded => {
            push(FiniteHirsch, false, "union-unbounded-hirsch", "stages grow in Hirsch length without bound".into());
        }
        _ => {}
    }
    out
}

/// Fixed point of the structural, implication and closure rules over the
/// whole tree. Declared tags (including tags declared for every stage of a
/// union) seed the set; any derived value contradicting a known one is an
/// error naming both provenances.
pub fn derive_tags(d: &GroupDescription) -> Result<PropertyTagSet, EngineError> {
    let nodes = flatten(d);
    let mut set = PropertyTagSet {
        nodes: nodes
            .iter()
            .map(|n| NodeTags { path: n.path.clone(), kind: n.desc.kind(), tags: BTreeMap::new() })
            .collect(),
        iterations: 0,
    };
    for (i, n) in nodes.iter().enumerate() {
        let mut declared: Vec<(GroupProperty, bool, Option<String>)> =
            n.desc.tags.iter().map(|(p, t)| (*p, t.value, t.justification.clone())).collect();
        if let Role::Stage(_) = n.role {
            let parent = nodes.iter().find(|m| m.children.contains(&i)).expect("stage parent");
            if let GroupNode::Union(u) = &parent.desc.node {
                for (p, t) in &u.stage_tags {
                    let just = t.justification.clone().or_else(|| Some("declared for every stage".into()));
                    declared.push((*p, t.value, just));
                }
            }
        }
        for (p, value, justification) in declared {
            if let Some(old) = set.nodes[i].tags.get(&p) {
                if old.value != value {
                    return Err(EngineError::InconsistentTags {
                        path: display_path(&n.path).to_string(),
                        property: p,
                        first: format!("{p}={} (declared)", old.value),
                        second: format!("{p}={value} (declared for every stage)"),
                    });
                }
                continue;
            }
            set.nodes[i].tags.insert(p, Tag { value, provenance: Provenance::Declared, justification, premises: Vec::new() });
        }
    }
    for (i, n) in nodes.iter().enumerate() {
        for (p, v, rule, fact) in structural(n.desc) {
            set.set(i, p, v, rule, vec![Premise::Fact(fact)])?;
        }
    }

    let bound = GroupProperty::ALL.len() * nodes.len() + 1;
    loop {
        set.iterations += 1;
        if set.iterations > bound {
            return Err(EngineError::NoFixedPoint(bound));
        }
        let mut changed = false;
        for i in (0..nodes.len()).rev() {
            changed |= apply_node_rules(&nodes, &mut set, i)?;
        }
        if !changed {
            return Ok(set);
        }
    }
}

fn nontrivial_fact(n: &FlatNode<'_>) -> Option<Premise> {
    (n.desc.is_trivial() == Some(false)).then(|| Premise::Fact(format!("{}: nontrivial", display_path(&n.path))))
}

fn apply_node_rules(nodes: &[FlatNode<'_>], set: &mut PropertyTagSet, i: usize) -> Result<bool, EngineError> {
    let mut changed = false;
    for &(a, b, rule) in IMPLICATIONS {
        if set.get(i, a) == Some(true) {
            let pr = vec![set.premise(i, a)];
            changed |= set.set(i, b, true, rule, pr)?;
        }
        if set.get(i, b) == Some(false) {
            let pr = vec![set.premise(i, b)];
            changed |= set.set(i, a, false, rule, pr)?;
        }
    }
    // an elementary amenable periodic group is locally finite
    if set.get(i, Periodic) == Some(true) && set.get(i, ElementaryAmenable) == Some(true) {
        let pr = vec![set.premise(i, Periodic), set.premise(i, ElementaryAmenable)];
        changed |= set.set(i, LocallyFinite, true, "periodic-elementary-amenable-lf", pr)?;
    }
    if set.get(i, LocallyFinite) == Some(false) && set.get(i, ElementaryAmenable) == Some(true) {
        let pr = vec![set.premise(i, LocallyFinite), set.premise(i, ElementaryAmenable)];
        changed |= set.set(i, Periodic, false, "periodic-elementary-amenable-lf", pr)?;
    }
    if set.get(i, Periodic) == Some(true) && set.get(i, LocallyNilpotent) == Some(true) {
        let pr = vec![set.premise(i, Periodic), set.premise(i, LocallyNilpotent)];
        changed |= set.set(i, LocallyFinite, true, "periodic-locally-nilpotent-lf", pr)?;
    }
    if let Some(nt) = nontrivial_fact(&nodes[i]) {
        if set.get(i, TorsionFree) == Some(true) {
            let pr = vec![set.premise(i, TorsionFree), nt.clone()];
            changed |= set.set(i, Periodic, false, "nontrivial-torsion-free-not-periodic", pr)?;
        }
        if set.get(i, Periodic) == Some(true) {
            let pr = vec![set.premise(i, Periodic), nt];
            changed |= set.set(i, TorsionFree, false, "nontrivial-torsion-free-not-periodic", pr)?;
        }
    }
    if set.get(i, StronglyNotFS) == Some(true) {
        let pr = vec![set.premise(i, StronglyNotFS)];
        changed |= set.set(i, Periodic, false, "strongly-not-fs-not-periodic", pr)?;
    }
    if [Abelian, TorsionFree, FiniteHirsch].iter().all(|&p| set.get(i, p) == Some(true)) {
        let pr = vec![set.premise(i, Abelian), set.premise(i, TorsionFree), set.premise(i, FiniteHirsch)];
        changed |= set.set(i, LinearAutomorphisms, true, "torsion-free-abelian-finite-hirsch-linear", pr)?;
    }

    let children = nodes[i].children.clone();
    match &nodes[i].desc.node {
        GroupNode::Extension { .. } => {
            let (n, q) = (children[0], children[1]);
            for &p in EXTENSION_CLOSED {
                if set.get(n, p) == Some(true) && set.get(q, p) == Some(true) {
                    let pr = vec![set.premise(n, p), set.premise(q, p)];
                    changed |= set.set(i, p, true, "extension-closure", pr)?;
                }
            }
            for &p in SUBGROUP_CLOSED {
                changed |= down_and_up(set, i, n, p, "subgroup-closure")?;
            }
            for &p in QUOTIENT_CLOSED {
                changed |= down_and_up(set, i, q, p, "quotient-closure")?;
            }
            if set.get(n, Solvable) == Some(true) && set.get(q, VirtuallySolvable) == Some(true) {
                let pr = vec![set.premise(n, Solvable), set.premise(q, VirtuallySolvable)];
                changed |= set.set(i, VirtuallySolvable, true, "solvable-by-virtually-solvable", pr)?;
            }
        }
        GroupNode::Union(u) => {
            for &p in UNION_CLOSED {
                if children.iter().all(|&s| set.get(s, p) == Some(true)) {
                    let pr = children.iter().map(|&s| set.premise(s, p)).collect();
                    changed |= set.set(i, p, true, "union-closure", pr)?;
                }
            }
            if u.limit == UnionLimit::Stable && children.iter().all(|&s| set.get(s, FiniteHirsch) == Some(true)) {
                let mut pr: Vec<Premise> = children.iter().map(|&s| set.premise(s, FiniteHirsch)).collect();
                pr.push(Premise::Fact("union declared stable".into()));
                changed |= set.set(i, FiniteHirsch, true, "union-stable-hirsch", pr)?;
            }
            for &s in &children {
                for &p in SUBGROUP_CLOSED {
                    changed |= down_and_up(set, i, s, p, "subgroup-closure")?;
                }
            }
        }
        _ => {}
    }
    Ok(changed)
}

/// `G` has `p` ⇒ the child has `p`; the child lacks `p` ⇒ `G` lacks `p`.
fn down_and_up(
    set: &mut PropertyTagSet,
    g: usize,
    child: usize,
    p: GroupProperty,
    rule: &'static str,
) -> Result<bool, EngineError> {
    let mut changed = false;
    if set.get(g, p) == Some(true) {
        let pr = vec![set.premise(g, p)];
        changed |= set.set(child, p, true, rule, pr)?;
    }
    if set.get(child, p) == Some(false) {
        let pr = vec![set.premise(child, p)];
        changed |= set.set(g, p, false, rule, pr)?;
    }
    Ok(changed)
}
