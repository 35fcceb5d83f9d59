//! The matrix representation `Φ: ℂ[G] → M_n(ℂ[N])` of an extension
//! `1 → N → G → H → 1` with `|H| = n`, built from coset lifts and the
//! conditional expectation onto `ℂ[N]`:
//!
//! `Φ(a)_{h',h} = E(g_{h'} · a · g_h⁻¹)`.
//!
//! Rows and columns follow the acting group's enumeration, identity first.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{GroupAlgebra, GroupAlgebraElement, MatrixOverGroupAlgebra};
use crate::coeff::Coeff;
use crate::group::{
    AbelianElement, FGAbelianGroup, GroupDescription, GroupLaw, GroupNode, SemidirectElement,
    SemidirectProductGroup,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error("no canonical section: extension is not realized as a semidirect product")]
    NoCanonicalSection,
    #[error("lift for h{index} projects to h{projected}")]
    NotALift { index: usize, projected: usize },
    #[error("first lift must be the group identity")]
    FirstLiftNotIdentity,
    #[error("expected {expected} lifts, got {got}")]
    LiftCount { expected: usize, got: usize },
    #[error(transparent)]
    Group(#[from] crate::group::GroupError),
}

/// Coset lifts `{g_h}` of an extension realized as `ℤ^r ⋊ H`.
#[derive(Clone, Debug)]
pub struct LiftTable {
    group: SemidirectProductGroup,
    lifts: Vec<SemidirectElement>,
    lifts_inv: Vec<SemidirectElement>,
}

impl LiftTable {
    /// Canonical lifts `g_h = (0, h)`.
    pub fn build(ext: &SemidirectProductGroup) -> LiftTable {
        let lifts: Vec<_> = (0..ext.acting().order()).map(|h| ext.section(h)).collect();
        Self::from_parts(ext.clone(), lifts)
    }

    /// User-supplied lifts, indexed by the acting group's enumeration.
    pub fn with_lifts(
        ext: &SemidirectProductGroup,
        lifts: Vec<SemidirectElement>,
    ) -> Result<LiftTable, EmbeddingError> {
        let n = ext.acting().order();
        if lifts.len() != n {
            return Err(EmbeddingError::LiftCount { expected: n, got: lifts.len() });
        }
        for (index, g) in lifts.iter().enumerate() {
            ext.check(g)?;
            let projected = ext.project(g);
            if projected != index {
                return Err(EmbeddingError::NotALift { index, projected });
            }
        }
        if !ext.is_identity(&lifts[0]) {
            return Err(EmbeddingError::FirstLiftNotIdentity);
        }
        Ok(Self::from_parts(ext.clone(), lifts))
    }

    /// Lift table for a description node that is a semidirect product or an
    /// extension carrying a semidirect realization.
    pub fn from_description(d: &GroupDescription) -> Result<LiftTable, EmbeddingError> {
        match &d.node {
            GroupNode::Semidirect(s) => Ok(Self::build(s)),
            GroupNode::Extension { realization: Some(s), .. } => Ok(Self::build(s)),
            _ => Err(EmbeddingError::NoCanonicalSection),
        }
    }

    fn from_parts(group: SemidirectProductGroup, lifts: Vec<SemidirectElement>) -> Self {
        let lifts_inv = lifts.iter().map(|g| group.inverse(g)).collect();
        LiftTable { group, lifts, lifts_inv }
    }

    pub fn group(&self) -> &SemidirectProductGroup {
        &self.group
    }

    pub fn lifts(&self) -> &[SemidirectElement] {
        &self.lifts
    }

    pub fn index(&self) -> usize {
        self.lifts.len()
    }

    pub fn normal_group(&self) -> FGAbelianGroup {
        self.group.base()
    }

    pub fn algebra(&self) -> GroupAlgebra<SemidirectProductGroup> {
        GroupAlgebra::new(self.group.clone())
    }

    pub fn normal_algebra(&self) -> GroupAlgebra<FGAbelianGroup> {
        GroupAlgebra::new(self.normal_group())
    }

    /// `Φ(x)_{h',h} = E(g_{h'} x g_h⁻¹)`.
    ///
    /// Each term `λ g` lands in exactly one column per row: the one with
    /// `h = h'·π(g)` (up to the lifts' projections).
    pub fn phi(&self, x: &GroupAlgebraElement<SemidirectElement>) -> MatrixOverGroupAlgebra<AbelianElement> {
        let n = self.index();
        let acting = self.group.acting();
        let mut out = MatrixOverGroupAlgebra::zeros(n);
        for (row, gl) in self.lifts.iter().enumerate() {
            for (g, c) in x.terms() {
                let col = acting.op(&gl.h, &g.h);
                let y = self.group.op(&self.group.op(gl, g), &self.lifts_inv[col]);
                let a = self.group.normal_part(&y).expect("coset bookkeeping");
                out.get_mut(row, col).add_term(a, c);
            }
        }
        out
    }

    /// `Φ` evaluated by the literal formula: every `(h', h)` pair, conjugate
    /// and restrict. Independent of the column bookkeeping in [`Self::phi`].
    pub fn phi_by_definition(
        &self,
        x: &GroupAlgebraElement<SemidirectElement>,
    ) -> MatrixOverGroupAlgebra<AbelianElement> {
        let n = self.index();
        let alg = self.algebra();
        let mut out = MatrixOverGroupAlgebra::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let left = GroupAlgebraElement::basis(self.lifts[i].clone());
                let right = GroupAlgebraElement::basis(self.lifts_inv[j].clone());
                let conj = alg.mul(&alg.mul(&left, x), &right);
                out.set(i, j, conj.restrict_map(|g| self.group.normal_part(g)));
            }
        }
        out
    }
}

/// Outcome of a randomized exact audit.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct AuditReport {
    pub check: String,
    pub trials: usize,
    pub seed: u64,
    pub failures: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Random element of `ℂ[ℤ^r ⋊ H]`: up to `max_terms` terms, translations in
/// `[-radius, radius]^r`, complex rational coefficients with small numerators
/// and denominators.
pub fn random_element<R: Rng>(
    rng: &mut R,
    g: &SemidirectProductGroup,
    max_terms: usize,
    radius: i64,
) -> GroupAlgebraElement<SemidirectElement> {
    let terms = rng.gen_range(1..=max_terms.max(1));
    GroupAlgebraElement::from_terms((0..terms).map(|_| {
        let v = (0..g.rank()).map(|_| rng.gen_range(-radius..=radius)).collect();
        let h = rng.gen_range(0..g.acting().order());
        (SemidirectElement::new(v, h), random_coeff(rng))
    }))
}

pub fn random_coeff<R: Rng>(rng: &mut R) -> Coeff {
    Coeff::complex(
        rng.gen_range(-9..=9),
        rng.gen_range(1..=6),
        rng.gen_range(-9..=9),
        rng.gen_range(1..=6),
    )
}

/// `Φ(xy) = Φ(x)Φ(y)`, `Φ(x*) = Φ(x)*`, `Φ(1) = 1`, exactly, on seeded random pairs.
pub fn verify_homomorphism(lt: &LiftTable, trials: usize, seed: u64) -> AuditReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alg = lt.algebra();
    let nalg = lt.normal_algebra();
    let mut failures = Vec::new();
    if lt.phi(&alg.one()) != nalg.matrix_identity(lt.index()) {
        failures.push("Φ(1) ≠ 1".to_string());
    }
    for t in 0..trials {
        let x = random_element(&mut rng, lt.group(), 4, 3);
        let y = random_element(&mut rng, lt.group(), 4, 3);
        let lhs = lt.phi(&alg.mul(&x, &y));
        let rhs = nalg.matrix_mul(&lt.phi(&x), &lt.phi(&y)).expect("same size");
        if lhs != rhs {
            failures.push(format!("trial {t}: Φ(xy) ≠ Φ(x)Φ(y)"));
        }
        if lt.phi(&alg.adjoint(&x)) != nalg.matrix_adjoint(&lt.phi(&x)) {
            failures.push(format!("trial {t}: Φ(x*) ≠ Φ(x)*"));
        }
    }
    AuditReport { check: "homomorphism".into(), trials, seed, failures }
}

/// `(tr_n ⊗ τ_N)(Φ(x)) = τ_G(x)` exactly on seeded random elements.
pub fn verify_trace_identity(lt: &LiftTable, trials: usize, seed: u64) -> AuditReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alg = lt.algebra();
    let nalg = lt.normal_algebra();
    let mut failures = Vec::new();
    for t in 0..trials {
        let mut x = random_element(&mut rng, lt.group(), 6, 2);
        // make the identity coefficient non-trivial in about half the trials
        if rng.gen_bool(0.5) {
            x.add_term(alg.group().identity(), &random_coeff(&mut rng));
        }
        let lhs = nalg.matrix_trace(&lt.phi(&x));
        let rhs = alg.canonical_trace(&x);
        if lhs != rhs {
            failures.push(format!("trial {t}: tr⊗τ(Φ(x)) = {lhs}, τ(x) = {rhs}"));
        }
    }
    AuditReport { check: "trace-identity".into(), trials, seed, failures }
}
