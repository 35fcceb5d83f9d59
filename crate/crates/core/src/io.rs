//! Versioned JSON description files.
//!
//! ```json
//! {
//!   "version": 1,
//!   "group": { "kind": "semidirect", "rank": 1, "action_generators": [[[-1]]] },
//!   "declarations": [
//!     { "node": "root", "property": "amenable", "value": true, "justification": "virtually abelian" }
//!   ],
//!   "analysis": { "grid": 128, "seed": 7 }
//! }
//! ```
//!
//! Node paths are `root` or `/`-joined segments `normal`, `quotient` and
//! `stages[i]`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{GroupAlgebra, GroupAlgebraElement, MatrixOverGroupAlgebra};
use crate::group::{
    AbelianElement, DeclaredTag, DeclaredTags, FGAbelianGroup, FiniteGroupTable, GroupDescription, GroupError,
    GroupLaw, GroupNode, GroupProperty, IncreasingUnion, IntMatrix, SemidirectProductGroup, SeriesLabel, UnionLimit,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("schema violation at `{field}` (line {line}, column {column}): {message}")]
    Schema { field: String, line: usize, column: usize, message: String },
    #[error("unsupported format version {0}, expected {FORMAT_VERSION}")]
    Version(u32),
    #[error("at {path}: {message}")]
    Node { path: String, message: String },
    #[error("invalid element: {0}")]
    Element(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

type Matrix = Vec<Vec<i64>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescriptionFile {
    pub version: u32,
    pub group: NodeSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub declarations: Vec<Declaration>,
    #[serde(default)]
    pub analysis: AnalysisSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeSpec {
    Abelian(AbelianSpec),
    Finite(FiniteSpec),
    Semidirect(SemidirectSpec),
    Extension(ExtensionSpec),
    Union(UnionSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbelianSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default)]
    pub free_rank: usize,
    /// Invariant factors `n₁ | n₂ | …`, each at least 2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torsion_factors: Option<Vec<u64>>,
    /// Arbitrary cyclic orders, normalized to invariant factors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cyclic_orders: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cyclic: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemidirectSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub rank: usize,
    /// Generators of a finite subgroup of `GL(rank, ℤ)` acting faithfully.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_generators: Option<Vec<Matrix>>,
    /// Explicit acting table with one matrix per element.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acting: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<Vec<Matrix>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal: Option<Box<NodeSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quotient: Option<Box<NodeSpec>>,
    /// Split realization `ℤ^r ⋊ H`; implies the normal and quotient nodes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realization: Option<SemidirectSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub stages: Vec<NodeSpec>,
    pub limit: UnionLimit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connecting: Option<Vec<Matrix>>,
    /// Tags holding for every stage.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stage_tags: Vec<TagSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TagSpec {
    pub property: GroupProperty,
    pub value: bool,
    pub justification: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Declaration {
    pub node: String,
    pub property: GroupProperty,
    pub value: bool,
    pub justification: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Matrix over the group algebra of an abelian group, for `oscillation`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<ElementSpec>,
    /// Factor labels, bottom first, for `series-normalize`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<Vec<SeriesLabel>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementSpec {
    /// `diag(1 − (dᵢ + dᵢ⁻¹)/2)`.
    BetaDiagonal(Vec<AbelianElement>),
    /// `(d + d⁻¹)/2` as a `1×1` matrix.
    RealPart(AbelianElement),
    /// Rows of entries, each a list of `{g, c}` terms.
    Matrix(Vec<Vec<GroupAlgebraElement<AbelianElement>>>),
}

/// A parsed and validated description file.
#[derive(Clone, Debug)]
pub struct ParsedDescription {
    pub file: DescriptionFile,
    pub description: GroupDescription,
}

pub fn parse_description(path: &Path) -> Result<ParsedDescription, InputError> {
    let text = fs::read_to_string(path)
        .map_err(|e| InputError::Read { path: path.display().to_string(), message: e.to_string() })?;
    parse_description_str(&text)
}

pub fn parse_description_str(text: &str) -> Result<ParsedDescription, InputError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: DescriptionFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        InputError::Schema { field, line: inner.line(), column: inner.column(), message: inner.to_string() }
    })?;
    let description = file.to_description()?;
    Ok(ParsedDescription { file, description })
}

fn node_err(path: &str, message: impl Into<String>) -> InputError {
    InputError::Node { path: if path.is_empty() { "root".into() } else { path.into() }, message: message.into() }
}

fn int_matrices(path: &str, ms: &[Matrix]) -> Result<Vec<IntMatrix>, InputError> {
    ms.iter().map(|m| IntMatrix::from_rows(m.clone()).map_err(|e| node_err(path, e.to_string()))).collect()
}

fn join(path: &str, seg: &str) -> String {
    if path.is_empty() {
        seg.to_string()
    } else {
        format!("{path}/{seg}")
    }
}

impl SemidirectSpec {
    fn build(&self, path: &str) -> Result<SemidirectProductGroup, InputError> {
        let wrap = |e: GroupError| node_err(path, e.to_string());
        match (&self.action_generators, &self.acting, &self.action) {
            (Some(gens), None, None) => {
                SemidirectProductGroup::from_matrix_generators(self.rank, &int_matrices(path, gens)?).map_err(wrap)
            }
            (None, Some(table), Some(action)) => {
                let acting = FiniteGroupTable::new(table.clone()).map_err(wrap)?;
                SemidirectProductGroup::new(self.rank, acting, int_matrices(path, action)?).map_err(wrap)
            }
            _ => Err(node_err(path, "give either `action_generators` or both `acting` and `action`")),
        }
    }
}

impl NodeSpec {
    fn build(&self, path: &str) -> Result<GroupDescription, InputError> {
        let wrap = |e: GroupError| node_err(path, e.to_string());
        let (d, label) = match self {
            NodeSpec::Abelian(a) => {
                let g = match (&a.torsion_factors, &a.cyclic_orders) {
                    (Some(_), Some(_)) => {
                        return Err(node_err(path, "`torsion_factors` and `cyclic_orders` are exclusive"))
                    }
                    (Some(t), None) => FGAbelianGroup::new(a.free_rank, t.clone()),
                    (None, Some(c)) => FGAbelianGroup::from_cyclic_orders(a.free_rank, c),
                    (None, None) => Ok(FGAbelianGroup::free_abelian(a.free_rank)),
                }
                .map_err(wrap)?;
                (GroupDescription::abelian(g), &a.label)
            }
            NodeSpec::Finite(f) => {
                let table = match (&f.table, f.cyclic) {
                    (Some(t), None) => FiniteGroupTable::new(t.clone()),
                    (None, Some(n)) => FiniteGroupTable::cyclic(n),
                    _ => return Err(node_err(path, "give exactly one of `table` and `cyclic`")),
                }
                .map_err(wrap)?;
                (GroupDescription::finite(table), &f.label)
            }
            NodeSpec::Semidirect(s) => (GroupDescription::semidirect(s.build(path)?), &s.label),
            NodeSpec::Extension(e) => {
                let d = match (&e.normal, &e.quotient, &e.realization) {
                    (None, None, Some(r)) => GroupDescription::realized_extension(r.build(path)?),
                    (Some(n), Some(q), realization) => {
                        let normal = n.build(&join(path, "normal"))?;
                        let quotient = q.build(&join(path, "quotient"))?;
                        let realization = realization.as_ref().map(|r| r.build(path)).transpose()?;
                        GroupDescription::new(GroupNode::Extension {
                            normal: Box::new(normal),
                            quotient: Box::new(quotient),
                            realization,
                        })
                    }
                    _ => return Err(node_err(path, "give `normal` and `quotient`, or a `realization`")),
                };
                (d, &e.label)
            }
            NodeSpec::Union(u) => {
                let stages = u
                    .stages
                    .iter()
                    .enumerate()
                    .map(|(i, s)| s.build(&join(path, &format!("stages[{i}]"))))
                    .collect::<Result<Vec<_>, _>>()?;
                let connecting = u.connecting.as_ref().map(|ms| int_matrices(path, ms)).transpose()?;
                let mut stage_tags = DeclaredTags::new();
                for t in &u.stage_tags {
                    let tag = DeclaredTag { value: t.value, justification: Some(t.justification.clone()) };
                    if stage_tags.insert(t.property, tag).is_some() {
                        return Err(node_err(path, format!("stage tag `{}` given twice", t.property)));
                    }
                }
                let node = GroupNode::Union(IncreasingUnion { stages, limit: u.limit, connecting, stage_tags });
                (GroupDescription::new(node), &u.label)
            }
        };
        Ok(match label {
            Some(l) => d.with_label(l.clone()),
            None => d,
        })
    }
}

fn node_at_mut<'a>(d: &'a mut GroupDescription, path: &str) -> Option<&'a mut GroupDescription> {
    if path == "root" || path.is_empty() {
        return Some(d);
    }
    let mut cur = d;
    for seg in path.split('/') {
        cur = match (&mut cur.node, seg) {
            (GroupNode::Extension { normal, .. }, "normal") => normal,
            (GroupNode::Extension { quotient, .. }, "quotient") => quotient,
            (GroupNode::Union(u), s) => {
                let i: usize = s.strip_prefix("stages[")?.strip_suffix(']')?.parse().ok()?;
                u.stages.get_mut(i)?
            }
            _ => return None,
        };
    }
    Some(cur)
}

impl DescriptionFile {
    /// Builds and validates the tree, then attaches the declarations.
    pub fn to_description(&self) -> Result<GroupDescription, InputError> {
        if self.version != FORMAT_VERSION {
            return Err(InputError::Version(self.version));
        }
        let mut d = self.group.build("")?;
        for decl in &self.declarations {
            let node = node_at_mut(&mut d, &decl.node).ok_or_else(|| node_err(&decl.node, "no such node"))?;
            if node.tags.contains_key(&decl.property) {
                return Err(node_err(&decl.node, format!("`{}` declared twice", decl.property)));
            }
            *node = node.clone().with_tag(decl.property, decl.value, &decl.justification);
        }
        d.validate()?;
        Ok(d)
    }
}

impl ElementSpec {
    /// Builds the matrix over `ℂ[group]`, checking every support element.
    pub fn to_matrix(&self, group: &FGAbelianGroup) -> Result<MatrixOverGroupAlgebra<AbelianElement>, InputError> {
        let alg = GroupAlgebra::new(group.clone());
        let check = |g: &AbelianElement| group.check(g).map_err(|e| InputError::Element(e.to_string()));
        let m = match self {
            ElementSpec::BetaDiagonal(ds) => {
                ds.iter().try_for_each(check)?;
                MatrixOverGroupAlgebra::diagonal(ds.iter().map(|d| alg.beta(d)).collect())
            }
            ElementSpec::RealPart(d) => {
                check(d)?;
                MatrixOverGroupAlgebra::diagonal(vec![alg.real_part(d)])
            }
            ElementSpec::Matrix(rows) => {
                let k = rows.len();
                if k == 0 || rows.iter().any(|r| r.len() != k) {
                    return Err(InputError::Element("matrix must be square and non-empty".into()));
                }
                let entries: Vec<_> = rows.iter().flatten().cloned().collect();
                entries.iter().flat_map(|x| x.support()).try_for_each(check)?;
                MatrixOverGroupAlgebra::from_entries(k, entries).map_err(|e| InputError::Element(e.to_string()))?
            }
        };
        Ok(m)
    }
}
