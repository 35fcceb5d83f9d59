use std::collections::BTreeSet;

use serde::Serialize;

use super::tags::{display_path, flatten, FlatNode, Premise, PropertyTagSet, Provenance};
use super::EngineError;
use crate::group::{GroupDescription, GroupNode, GroupProperty};

use GroupProperty::*;

/// One step of a derivation. `paper_anchor` names the statement the step
/// applies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub rule_id: String,
    pub paper_anchor: String,
    pub node: String,
    pub premises: Vec<String>,
    pub conclusion: String,
}

impl TraceStep {
    pub(crate) fn new(rule: &str, node: &str, premises: Vec<String>, conclusion: String) -> Self {
        TraceStep {
            rule_id: rule.to_string(),
            paper_anchor: anchor(rule).to_string(),
            node: display_path(node).to_string(),
            premises,
            conclusion,
        }
    }
}

/// The statement each rule applies.
pub fn anchor(rule: &str) -> &'static str {
    match rule {
        "atom-abelian" => "structure of a finitely generated abelian group",
        "atom-finite" => "structure of a finite group read off its table",
        "atom-semidirect" => "structure of a lattice extended by a finite group",
        "union-unbounded-hirsch" => "Hirsch length of an increasing union is the supremum over the stages",
        "union-stable-hirsch" => "Hirsch length of an increasing union is the supremum over the stages",
        "lf-periodic" => "locally finite groups are periodic",
        "lf-elementary-amenable" => "locally finite groups are elementary amenable",
        "lf-finite-hirsch" => "locally finite groups have Hirsch length 0",
        "abelian-nilpotent" => "abelian groups are nilpotent",
        "nilpotent-solvable" => "nilpotent groups are solvable",
        "nilpotent-locally-nilpotent" => "nilpotent groups are locally nilpotent",
        "solvable-virtually-solvable" => "solvable groups are virtually solvable",
        "virtually-solvable-elementary-amenable" => "virtually solvable groups are elementary amenable",
        "elementary-amenable-amenable" => "elementary amenable groups are amenable",
        "locally-nilpotent-amenable" => "locally nilpotent groups are amenable",
        "periodic-elementary-amenable-lf" => "an elementary amenable periodic group is locally finite",
        "periodic-locally-nilpotent-lf" => "a periodic locally nilpotent group is locally finite",
        "nontrivial-torsion-free-not-periodic" => "a nontrivial group cannot be both torsion-free and periodic",
        "strongly-not-fs-not-periodic" => "strongly not (FS) groups are not periodic by definition",
        "torsion-free-abelian-finite-hirsch-linear" => {
            "a torsion-free abelian group of finite Hirsch length l has Aut(G) inside GL(l, Q)"
        }
        "extension-closure" => "closure under extensions",
        "subgroup-closure" => "closure under subgroups",
        "quotient-closure" => "closure under quotients",
        "union-closure" => "closure under increasing unions",
        "solvable-by-virtually-solvable" => "solvable-by-(virtually solvable) groups are virtually solvable",
        "R1" => "every countable abelian group that is not locally finite is strongly not (FS)",
        "R2" => "periodic-by-(nontrivial torsion-free amenable) groups are strongly not (FS)",
        "R3" => "an increasing union of strongly not (FS) groups is strongly not (FS)",
        "R4" => "every nilpotent group is periodic-by-torsion-free",
        "R5" => "a locally nilpotent group that is not locally finite is strongly not (FS)",
        "lf-af" => "C*(G) of a locally finite group is an AF-algebra",
        "strongly-not-fs-not-rr0" => "if G is strongly not (FS), C*(G) cannot have real rank zero",
        "witness-center" => "a non-torsion element of Z(L) for an extension of L by a locally finite group",
        "embedding-diagonal" => "Phi(a) = diag(g_h a g_h^-1) for a in the finite-index normal subgroup",
        "omega-beta-diagonal" => "omega(diag(beta(a), beta(d_2), ..., beta(d_k))) = 2 for non-torsion a",
        "omega-bounded-tower" => {
            "oscillation bounded away from 0 along the tower of continuous fields rules out real rank zero"
        }
        "normal-free-abelian" => "an amenable group with a normal subgroup Z^n does not have real rank zero",
        "torsion-free-finite-index" => {
            "an infinite amenable group with a torsion-free finite-index subgroup does not have real rank zero"
        }
        "abelian-normal-linear-automorphisms" => {
            "amenable N-by-H with N abelian, not locally finite and Aut(N) linear does not have real rank zero"
        }
        "normal-elementary-amenable-finite-hirsch" => {
            "a normal elementary amenable subgroup of finite Hirsch length in an amenable group with real rank zero C*-algebra is locally finite"
        }
        "virtually-solvable-not-lf" => "a countable virtually solvable group with real rank zero C*-algebra is locally finite",
        _ => "unrecognized rule",
    }
}

/// Result of the strongly-not-(FS) derivation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StronglyNotFsDerivation {
    pub holds: bool,
    pub rule_trace: Vec<TraceStep>,
    #[serde(skip)]
    pub tags: PropertyTagSet,
}

fn fires(nodes: &[FlatNode<'_>], set: &PropertyTagSet, i: usize) -> Option<(&'static str, Vec<Premise>)> {
    let is = |n: usize, p: GroupProperty, v: bool| set.get(n, p) == Some(v);
    let children = &nodes[i].children;
    if let GroupNode::Union(_) = nodes[i].desc.node {
        if !children.is_empty() && children.iter().all(|&s| is(s, StronglyNotFS, true)) {
            return Some(("R3", children.iter().map(|&s| set.premise(s, StronglyNotFS)).collect()));
        }
    }
    if is(i, Abelian, true) && is(i, LocallyFinite, false) {
        let mut pr = vec![set.premise(i, Abelian), set.premise(i, LocallyFinite)];
        pr.push(Premise::Fact("described groups are countable".into()));
        return Some(("R1", pr));
    }
    if let GroupNode::Extension { .. } = nodes[i].desc.node {
        let (n, q) = (children[0], children[1]);
        let nontrivial = if is(q, Periodic, false) {
            Some(set.premise(q, Periodic))
        } else if nodes[q].desc.is_trivial() == Some(false) {
            Some(Premise::Fact(format!("{}: nontrivial", display_path(&nodes[q].path))))
        } else {
            None
        };
        if let (true, true, true, Some(nt)) =
            (is(n, Periodic, true), is(q, TorsionFree, true), is(q, Amenable, true), nontrivial)
        {
            let pr = vec![set.premise(n, Periodic), set.premise(q, TorsionFree), set.premise(q, Amenable), nt];
            return Some(("R2", pr));
        }
    }
    if is(i, Nilpotent, true) && is(i, Periodic, false) {
        return Some(("R4", vec![set.premise(i, Nilpotent), set.premise(i, Periodic)]));
    }
    if is(i, LocallyNilpotent, true) && is(i, LocallyFinite, false) {
        return Some(("R5", vec![set.premise(i, LocallyNilpotent), set.premise(i, LocallyFinite)]));
    }
    None
}

/// Applies R1–R5 bottom-up to a fixed point, on top of `tags`.
pub fn strongly_not_fs_derive(
    d: &GroupDescription,
    tags: &PropertyTagSet,
) -> Result<StronglyNotFsDerivation, EngineError> {
    let nodes = flatten(d);
    let mut set = tags.clone();
    loop {
        let mut changed = false;
        for i in (0..nodes.len()).rev() {
            if set.get(i, StronglyNotFS).is_some() {
                continue;
            }
            if let Some((rule, premises)) = fires(&nodes, &set, i) {
                changed |= set.set(i, StronglyNotFS, true, rule, premises)?;
            }
        }
        if !changed {
            break;
        }
    }
    let holds = set.root(StronglyNotFS) == Some(true);
    let rule_trace = if holds { support_trace(&set, &[(0, StronglyNotFS)]) } else { Vec::new() };
    Ok(StronglyNotFsDerivation { holds, rule_trace, tags: set })
}

fn premise_text(set: &PropertyTagSet, p: &Premise) -> String {
    match p {
        Premise::Tag { node, property, .. } => match set.tag(*node, *property) {
            Some(t) => format!("{p} [{}]", t.provenance),
            None => p.to_string(),
        },
        Premise::Fact(_) => p.to_string(),
    }
}

/// Derivation steps supporting the given tags, premises before conclusions.
pub(crate) fn support_trace(set: &PropertyTagSet, targets: &[(usize, GroupProperty)]) -> Vec<TraceStep> {
    fn visit(
        set: &PropertyTagSet,
        node: usize,
        p: GroupProperty,
        seen: &mut BTreeSet<(usize, GroupProperty)>,
        out: &mut Vec<TraceStep>,
    ) {
        if !seen.insert((node, p)) {
            return;
        }
        let Some(tag) = set.tag(node, p) else { return };
        let Provenance::Derived(rule) = tag.provenance else { return };
        for pr in &tag.premises {
            if let Premise::Tag { node: n, property, .. } = pr {
                visit(set, *n, *property, seen, out);
            }
        }
        let path = &set.nodes[node].path;
        let premises: Vec<String> = tag.premises.iter().map(|pr| premise_text(set, pr)).collect();
        let conclusion = format!("{}: {p}={}", display_path(path), tag.value);
        if rule == "R4" {
            // nilpotent G is periodic-by-torsion-free: T = torsion elements
            let here = display_path(path);
            out.push(TraceStep::new(
                "R4",
                path,
                premises,
                format!("{here}: T = torsion subgroup is periodic and normal, {here}/T is torsion-free nilpotent and nontrivial"),
            ));
            out.push(TraceStep::new(
                "R2",
                path,
                vec![
                    format!("{here}/T: torsion-free"),
                    format!("{here}/T: amenable (nilpotent)"),
                    format!("{here}/T: nontrivial ({here} is not periodic)"),
                    "T: periodic".into(),
                ],
                conclusion,
            ));
        } else {
            out.push(TraceStep::new(rule, path, premises, conclusion));
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &(n, p) in targets {
        visit(set, n, p, &mut seen, &mut out);
    }
    out
}

/// Re-derives tags and the strongly-not-(FS) fixed point from scratch and
/// checks that `trace` is reproduced exactly.
pub fn replay_strongly_not_fs(d: &GroupDescription, trace: &[TraceStep]) -> Result<bool, EngineError> {
    let tags = super::derive_tags(d)?;
    Ok(strongly_not_fs_derive(d, &tags)?.rule_trace == trace)
}
