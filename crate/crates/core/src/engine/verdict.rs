use std::time::Instant;

use serde::Serialize;

use super::rules::{strongly_not_fs_derive, support_trace, TraceStep};
use super::tags::{derive_tags, display_path, flatten, PropertyTagSet};
use super::EngineError;
use crate::embedding::LiftTable;
use crate::group::{GroupDescription, GroupNode, GroupProperty, SemidirectProductGroup};
use crate::oscillation::{
    oscillation_exact_beta_diagonal, oscillation_sampled, recognize_beta_diagonal, DualDescription, GridSpec,
    NormMode, SamplingConfig,
};

use GroupProperty::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VerdictKind {
    NotRealRankZero,
    StronglyNotFS,
    NoObstructionFound,
    #[serde(rename = "LocallyFinite-AF")]
    LocallyFiniteAF,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Confidence {
    SymbolicExact,
    NumericCertified,
    NumericSampled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisConfig {
    pub sampling: SamplingConfig,
    pub components_cap: usize,
    /// Allowed gap between the exact and sampled oscillation.
    pub tol: f64,
    /// Record wall-clock time; off by default so reports stay byte-identical.
    pub wall_clock: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            sampling: SamplingConfig::default(),
            components_cap: crate::oscillation::DEFAULT_COMPONENTS_CAP,
            tol: 1e-3,
            wall_clock: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessSource {
    /// Non-torsion vector fixed by the whole acting group.
    TranslationCenter,
    /// `L = ℤ^r` is abelian, so `Z(L) = L`; first lattice basis vector.
    LatticeBasis,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub element: Vec<i64>,
    pub source: WitnessSource,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageOmega {
    pub stage: String,
    pub index: usize,
    /// `Φ(β(a)) = diag(β(d₁), …, β(d_n))`, listed as the `dᵢ`.
    pub diagonal: Vec<String>,
    pub exact: f64,
    pub sampled: f64,
    pub sampled_upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmegaSummary {
    pub exact: f64,
    pub sampled: f64,
    pub agreement: bool,
    pub tol: f64,
    pub grid: Option<GridSpec>,
    pub stages: Vec<StageOmega>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timings {
    pub fiber_evaluations: u64,
    pub stages: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

/// Verdict plus everything needed to check it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionCertificate {
    pub verdict: VerdictKind,
    pub confidence: Confidence,
    pub implies: Vec<String>,
    pub rule_trace: Vec<TraceStep>,
    pub witness: Option<Witness>,
    pub omega: Option<OmegaSummary>,
    /// Other verdict rules whose premises also hold.
    pub also_fires: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub narrative: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub timings: Timings,
}

/// `ℤ^r ⋊ H_n` stages of a tower, with their node paths.
fn tower(d: &GroupDescription) -> Option<Vec<(String, &SemidirectProductGroup)>> {
    fn single(d: &GroupDescription) -> Option<&SemidirectProductGroup> {
        match &d.node {
            GroupNode::Semidirect(s) | GroupNode::Extension { realization: Some(s), .. } => Some(s),
            _ => None,
        }
    }
    if let Some(s) = single(d) {
        return (s.rank() > 0).then(|| vec![(String::new(), s)]);
    }
    let GroupNode::Union(u) = &d.node else { return None };
    let stages: Vec<_> = u
        .stages
        .iter()
        .enumerate()
        .map(|(i, s)| single(s).map(|g| (format!("stages[{i}]"), g)))
        .collect::<Option<_>>()?;
    let r = stages.first()?.1.rank();
    (r > 0 && stages.iter().all(|(_, s)| s.rank() == r)).then_some(stages)
}

/// Translation-center generators first, then the lattice basis; the
/// Hermite normal form makes the first row a deterministic choice.
fn find_witness(s: &SemidirectProductGroup) -> Witness {
    let center = s.translation_center();
    if let Some(v) = center.basis.first() {
        return Witness { element: v.clone(), source: WitnessSource::TranslationCenter };
    }
    let mut e1 = vec![0; s.rank()];
    e1[0] = 1;
    Witness { element: e1, source: WitnessSource::LatticeBasis }
}

struct NumericRun {
    witness: Witness,
    omega: OmegaSummary,
    trace: Vec<TraceStep>,
    evaluations: u64,
    stages: usize,
}

fn numeric_tower(
    stages: &[(String, &SemidirectProductGroup)],
    tags: &PropertyTagSet,
    cfg: &AnalysisConfig,
) -> Result<NumericRun, EngineError> {
    let first = stages[0].1;
    let witness = find_witness(first);
    let r = first.rank();
    let mut trace = vec![TraceStep::new(
        "witness-center",
        &stages[0].0,
        vec![
            format!("L = Z^{r} is abelian and not locally finite"),
            match witness.source {
                WitnessSource::TranslationCenter => "a is fixed by every element of the acting group".into(),
                WitnessSource::LatticeBasis => "Z(L) = L; first lattice basis vector".into(),
            },
        ],
        format!("a = {:?} in Z(L), non-torsion", witness.element),
    )];
    let mut per = Vec::new();
    let mut evaluations = 0;
    let mut grid = None;
    for (path, s) in stages {
        let lt = LiftTable::build(s);
        let alg = lt.algebra();
        let a = s.translation(witness.element.clone());
        let m = lt.phi(&alg.beta(&a));
        let n_group = lt.normal_group();
        let bd = recognize_beta_diagonal(&m, &n_group).ok_or_else(|| {
            EngineError::Internal(format!("Phi(beta(a)) at {} is not beta-diagonal", display_path(path)))
        })?;
        let dual = DualDescription::new(n_group).with_cap(cfg.components_cap);
        let exact = oscillation_exact_beta_diagonal(&bd.entries, &dual)?;
        let sampled = oscillation_sampled(&m, &dual, &cfg.sampling, NormMode::Hermitian)?;
        evaluations += sampled.evaluations;
        grid = sampled.grid.clone();
        let diagonal: Vec<String> = bd.entries.iter().map(|d| format!("{:?}", d.free)).collect();
        trace.push(TraceStep::new(
            "embedding-diagonal",
            path,
            vec![format!("index n = {}", lt.index()), "canonical lifts g_h = (0, h)".into()],
            format!("Phi(beta(a)) = diag(beta(d)) for d in [{}]", diagonal.join(", ")),
        ));
        trace.push(TraceStep::new(
            "omega-beta-diagonal",
            path,
            vec![format!("d_1 = a = {:?} has infinite order", witness.element)],
            format!("omega(Phi(beta(a))) = {}", exact.omega_lower),
        ));
        per.push(StageOmega {
            stage: display_path(path).to_string(),
            index: lt.index(),
            diagonal,
            exact: exact.omega_lower,
            sampled: sampled.omega_lower,
            sampled_upper: sampled.omega_upper,
        });
    }
    let exact = per.iter().map(|s| s.exact).fold(f64::INFINITY, f64::min);
    let sampled = per.iter().map(|s| s.sampled).fold(f64::INFINITY, f64::min);
    let agreement = per.iter().all(|s| (s.exact - s.sampled).abs() <= cfg.tol);
    let mut premises = vec![format!("omega = {exact} at each of {} stage(s)", per.len())];
    premises.push(format!("root: amenable={}", tags.root(Amenable).map_or("unknown".into(), |v| v.to_string())));
    premises.push("acting groups are finite, so their union is locally finite".into());
    trace.push(TraceStep::new("omega-bounded-tower", "", premises, "C*(G) does not have real rank zero".into()));
    Ok(NumericRun {
        witness,
        omega: OmegaSummary { exact, sampled, agreement, tol: cfg.tol, grid, stages: per },
        trace,
        evaluations,
        stages: stages.len(),
    })
}

struct SymbolicHit {
    rule: &'static str,
    trace: Vec<TraceStep>,
}

/// Root-level obstruction rules on the derived tags, in priority order.
fn symbolic_rules(d: &GroupDescription, tags: &PropertyTagSet) -> Vec<SymbolicHit> {
    let nodes = flatten(d);
    let mut hits = Vec::new();
    let is = |n: usize, p: GroupProperty, v: bool| tags.get(n, p) == Some(v);
    let conclusion = || "C*(G) does not have real rank zero".to_string();
    let with_support = |targets: &[(usize, GroupProperty)], step: TraceStep| {
        let mut t = support_trace(tags, targets);
        t.push(step);
        t
    };
    let premise_strings = |targets: &[(usize, GroupProperty)]| {
        targets.iter().map(|&(n, p)| tags.premise(n, p).to_string()).collect::<Vec<_>>()
    };

    if let GroupNode::Extension { .. } = d.node {
        let (n, q) = (nodes[0].children[0], nodes[0].children[1]);
        let normal_free = matches!(&nodes[n].desc.node, GroupNode::Abelian(a) if a.is_torsion_free() && a.free_rank() > 0);
        if normal_free && is(0, Amenable, true) {
            let targets = [(0, Amenable)];
            let rank = match &nodes[n].desc.node {
                GroupNode::Abelian(a) => a.free_rank(),
                _ => 0,
            };
            let mut pr = premise_strings(&targets);
            pr.push(format!("normal: isomorphic to Z^{rank}"));
            hits.push(SymbolicHit {
                rule: "normal-free-abelian",
                trace: with_support(&targets, TraceStep::new("normal-free-abelian", "", pr, conclusion())),
            });
        }
        let quotient_finite = match &nodes[q].desc.node {
            GroupNode::Finite { .. } => true,
            GroupNode::Abelian(a) => a.free_rank() == 0,
            _ => false,
        };
        if quotient_finite && is(n, TorsionFree, true) && is(n, Periodic, false) && is(0, Amenable, true) {
            let targets = [(n, TorsionFree), (n, Periodic), (0, Amenable)];
            let mut pr = premise_strings(&targets);
            pr.push("quotient: finite, so normal has finite index and G is infinite".into());
            hits.push(SymbolicHit {
                rule: "torsion-free-finite-index",
                trace: with_support(&targets, TraceStep::new("torsion-free-finite-index", "", pr, conclusion())),
            });
        }
        if is(n, Abelian, true) && is(n, LocallyFinite, false) && is(n, LinearAutomorphisms, true) && is(0, Amenable, true)
        {
            let targets = [(n, Abelian), (n, LocallyFinite), (n, LinearAutomorphisms), (0, Amenable)];
            let pr = premise_strings(&targets);
            hits.push(SymbolicHit {
                rule: "abelian-normal-linear-automorphisms",
                trace: with_support(&targets, TraceStep::new("abelian-normal-linear-automorphisms", "", pr, conclusion())),
            });
        }
        if is(n, ElementaryAmenable, true) && is(n, FiniteHirsch, true) && is(n, LocallyFinite, false) && is(0, Amenable, true)
        {
            let targets = [(n, ElementaryAmenable), (n, FiniteHirsch), (n, LocallyFinite), (0, Amenable)];
            let pr = premise_strings(&targets);
            hits.push(SymbolicHit {
                rule: "normal-elementary-amenable-finite-hirsch",
                trace: with_support(
                    &targets,
                    TraceStep::new("normal-elementary-amenable-finite-hirsch", "", pr, conclusion()),
                ),
            });
        }
    }
    if is(0, VirtuallySolvable, true) && is(0, LocallyFinite, false) {
        let targets = [(0, VirtuallySolvable), (0, LocallyFinite)];
        let mut pr = premise_strings(&targets);
        pr.push("described groups are countable".into());
        hits.push(SymbolicHit {
            rule: "virtually-solvable-not-lf",
            trace: with_support(&targets, TraceStep::new("virtually-solvable-not-lf", "", pr, conclusion())),
        });
    }
    hits
}

fn reduction_narrative() -> Vec<String> {
    vec![
        "H = normal subgroup: elementary amenable, finite Hirsch length, not locally finite".into(),
        "pass to H / Lambda(H): virtually solvable, finite Hirsch length, no nontrivial locally finite normal subgroup; Lambda(H) is characteristic in H, hence normal in G".into(),
        "pass to a characteristic solvable subgroup of finite index".into(),
        "take the last nontrivial term S of its derived series: abelian, characteristic, and torsion-free (its torsion subgroup would be a nontrivial locally finite normal subgroup)".into(),
        "S is normal in G, torsion-free abelian of finite Hirsch length, so Aut(S) is linear and the abelian-normal rule applies".into(),
    ]
}

/// Verdict pipeline: locally finite ⇒ AF; then the oscillation certificate
/// along a semidirect tower; then strongly not (FS); then the remaining
/// symbolic obstructions. Without any of these the result is
/// `NoObstructionFound`, which is inconclusive.
pub fn rr0_obstruction_analyze(
    d: &GroupDescription,
    cfg: &AnalysisConfig,
) -> Result<ObstructionCertificate, EngineError> {
    let start = cfg.wall_clock.then(Instant::now);
    d.validate()?;
    cfg.sampling.validate()?;
    let tags = derive_tags(d)?;
    let snfs = strongly_not_fs_derive(d, &tags)?;
    let tags = snfs.tags.clone();
    let symbolic = symbolic_rules(d, &tags);

    let mut cert = ObstructionCertificate {
        verdict: VerdictKind::NoObstructionFound,
        confidence: Confidence::SymbolicExact,
        implies: Vec::new(),
        rule_trace: Vec::new(),
        witness: None,
        omega: None,
        also_fires: Vec::new(),
        narrative: Vec::new(),
        notes: Vec::new(),
        timings: Timings { fiber_evaluations: 0, stages: 0, wall_ms: None },
    };
    let mut candidates: Vec<&'static str> = Vec::new();
    if snfs.holds {
        candidates.push("strongly-not-fs-not-rr0");
    }
    candidates.extend(symbolic.iter().map(|h| h.rule));

    if tags.root(LocallyFinite) == Some(true) {
        cert.verdict = VerdictKind::LocallyFiniteAF;
        let mut trace = support_trace(&tags, &[(0, LocallyFinite)]);
        trace.push(TraceStep::new(
            "lf-af",
            "",
            vec![tags.premise(0, LocallyFinite).to_string()],
            "C*(G) is an AF-algebra, hence of real rank zero".into(),
        ));
        cert.rule_trace = trace;
    } else if let Some(stages) = tower(d) {
        let run = numeric_tower(&stages, &tags, cfg)?;
        cert.verdict = VerdictKind::NotRealRankZero;
        cert.confidence = if run.omega.agreement { Confidence::NumericCertified } else { Confidence::NumericSampled };
        if !run.omega.agreement {
            cert.notes.push(format!("sampled oscillation differs from the closed form by more than {}", cfg.tol));
        }
        cert.notes.push("sampled values bracket the suprema from below; only the closed form is exact".into());
        cert.rule_trace = run.trace;
        cert.witness = Some(run.witness);
        cert.omega = Some(run.omega);
        cert.timings.fiber_evaluations = run.evaluations;
        cert.timings.stages = run.stages;
        cert.also_fires = candidates.iter().map(|s| s.to_string()).collect();
    } else if snfs.holds {
        cert.verdict = VerdictKind::StronglyNotFS;
        cert.implies.push("strongly not (FS) => C*(G) does not have real rank zero".into());
        let mut trace = snfs.rule_trace.clone();
        trace.push(TraceStep::new(
            "strongly-not-fs-not-rr0",
            "",
            vec![format!("{} [{}]", tags.premise(0, StronglyNotFS), tags.tag(0, StronglyNotFS).expect("root tag").provenance)],
            "C*(G) does not have real rank zero".into(),
        ));
        cert.rule_trace = trace;
        cert.also_fires = candidates[1..].iter().map(|s| s.to_string()).collect();
    } else if let Some(first) = symbolic.first() {
        cert.verdict = VerdictKind::NotRealRankZero;
        cert.rule_trace = first.trace.clone();
        if first.rule == "normal-elementary-amenable-finite-hirsch" {
            cert.narrative = reduction_narrative();
        }
        cert.also_fires = candidates[1..].iter().map(|s| s.to_string()).collect();
    } else {
        cert.notes.push("inconclusive: no obstruction applies; this is not a proof of real rank zero".into());
    }
    if let Some(t) = start {
        cert.timings.wall_ms = Some(t.elapsed().as_secs_f64() * 1e3);
    }
    Ok(cert)
}

/// Runs the analysis again and checks the trace and verdict are reproduced.
pub fn replay_certificate(
    d: &GroupDescription,
    cfg: &AnalysisConfig,
    cert: &ObstructionCertificate,
) -> Result<bool, EngineError> {
    let again = rr0_obstruction_analyze(d, cfg)?;
    Ok(again.verdict == cert.verdict && again.rule_trace == cert.rule_trace && again.omega == cert.omega)
}
