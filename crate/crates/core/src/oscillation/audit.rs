use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::fiber::{spectral_norm, CompiledMatrix, FiberMatrix};
use super::sampled::{sample_field, selected_components, SamplingConfig};
use super::{DualDescription, OscillationError};
use crate::algebra::{GroupAlgebra, MatrixOverGroupAlgebra};
use crate::group::AbelianElement;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LipschitzAudit {
    pub omega_m: f64,
    pub omega_m_plus_p: f64,
    pub norm_p: f64,
    /// `|ω̂(m) − ω̂(m+p)|`.
    pub lhs: f64,
    /// `2‖p‖̂`.
    pub rhs: f64,
    pub holds: bool,
    pub points: u64,
}

/// Checks `|ω̂(m) − ω̂(m+p)| ≤ 2‖p‖̂` with every quantity taken over one
/// fixed uniform character set (no refinement, so the set is shared), where
/// the inequality holds with no slack.
pub fn lipschitz_audit(
    m: &MatrixOverGroupAlgebra<AbelianElement>,
    p: &MatrixOverGroupAlgebra<AbelianElement>,
    dual: &DualDescription,
    cfg: &SamplingConfig,
) -> Result<LipschitzAudit, OscillationError> {
    cfg.validate()?;
    let sum = m.add(p).map_err(|e| OscillationError::Config(e.to_string()))?;
    let alg = GroupAlgebra::new(dual.group().clone());
    let compile = |x: &MatrixOverGroupAlgebra<AbelianElement>| CompiledMatrix::new(x, dual, alg.matrix_is_self_adjoint(x));
    let (cm, cs, cp) = (compile(m)?, compile(&sum)?, compile(p)?);
    let (components, _, _) = selected_components(dual, cfg)?;
    let fixed = SamplingConfig { refine: 0, ..cfg.clone() };
    let r = dual.dimension();
    let run_m = sample_field(r, &components, &fixed, false, |chi| cm.norm_at(chi));
    let run_s = sample_field(r, &components, &fixed, false, |chi| cs.norm_at(chi));
    let run_p = sample_field(r, &components, &fixed, false, |chi| cp.norm_at(chi));
    let (omega_m, omega_m_plus_p, norm_p) = (run_m.omega(), run_s.omega(), run_p.max_norm());
    if ![omega_m, omega_m_plus_p, norm_p].iter().all(|x| x.is_finite()) {
        return Err(OscillationError::NonFinite);
    }
    let lhs = (omega_m - omega_m_plus_p).abs();
    let rhs = 2.0 * norm_p;
    Ok(LipschitzAudit {
        omega_m,
        omega_m_plus_p,
        norm_p,
        lhs,
        rhs,
        holds: lhs <= rhs,
        points: run_m.evaluations,
    })
}

/// The field `θ ↦ u(θ) D u(θ)*` on `𝕋^r`, where
/// `u(θ) = U₀ · ∏ⱼ G_{pⱼ,qⱼ}(2π θ·wⱼ) · diag(e^{2πi θ·vᵢ})` is a product of a
/// constant unitary, Givens rotations and diagonal phases, all with integer
/// frequency vectors so the field is continuous on the torus.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugatedDiagonalField {
    pub r: usize,
    pub diag: Vec<f64>,
    pub base: DMatrix<Complex64>,
    pub rotations: Vec<(usize, usize, Vec<i64>)>,
    pub phases: Vec<Vec<i64>>,
}

impl ConjugatedDiagonalField {
    /// `u(θ)` = rotation by `2πθ`, `D = diag(1, −1)`, over `𝕋`.
    pub fn rotation_example() -> Self {
        ConjugatedDiagonalField {
            r: 1,
            diag: vec![1.0, -1.0],
            base: DMatrix::identity(2, 2),
            rotations: vec![(0, 1, vec![1])],
            phases: vec![vec![0], vec![0]],
        }
    }

    pub fn constant(diag: Vec<f64>, r: usize) -> Self {
        let k = diag.len();
        ConjugatedDiagonalField { r, diag, base: DMatrix::identity(k, k), rotations: Vec::new(), phases: vec![vec![0; r]; k] }
    }

    pub fn random<R: Rng>(rng: &mut R, r: usize, k: usize) -> Self {
        let k = k.max(1);
        let diag = (0..k).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let gaussian = DMatrix::from_fn(k, k, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let base = gaussian.qr().q();
        let freq = |rng: &mut R| (0..r).map(|_| rng.gen_range(-3..=3)).collect::<Vec<i64>>();
        let rotations = if k < 2 {
            Vec::new()
        } else {
            (0..rng.gen_range(1..=3))
                .map(|_| {
                    let p = rng.gen_range(0..k);
                    let q = (p + rng.gen_range(1..k)) % k;
                    (p, q, freq(rng))
                })
                .collect()
        };
        let phases = (0..k).map(|_| freq(rng)).collect();
        ConjugatedDiagonalField { r, diag, base, rotations, phases }
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn unitary(&self, theta: &[f64]) -> DMatrix<Complex64> {
        let k = self.size();
        let dot = |w: &[i64]| theta.iter().zip(w).map(|(t, &x)| t * x as f64).sum::<f64>();
        let mut u = self.base.clone();
        for (p, q, w) in &self.rotations {
            let (s, c) = (TAU * dot(w)).sin_cos();
            let mut g = DMatrix::<Complex64>::identity(k, k);
            g[(*p, *p)] = Complex64::new(c, 0.0);
            g[(*q, *q)] = Complex64::new(c, 0.0);
            g[(*p, *q)] = Complex64::new(-s, 0.0);
            g[(*q, *p)] = Complex64::new(s, 0.0);
            u *= g;
        }
        let phase = DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                Complex64::from_polar(1.0, TAU * dot(&self.phases[i]))
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        u * phase
    }

    pub fn evaluate(&self, theta: &[f64]) -> FiberMatrix {
        let u = self.unitary(theta);
        let d = DMatrix::from_fn(self.size(), self.size(), |i, j| {
            if i == j {
                Complex64::new(self.diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        FiberMatrix(&u * d * u.adjoint())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroOscillationAudit {
    pub omega_sampled: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub evaluations: u64,
}

pub const ZERO_OSCILLATION_TOL: f64 = 1e-6;

/// Samples the oscillation of a pointwise-conjugated constant diagonal; its
/// eigenvalues never move, so the result must vanish up to rounding.
pub fn finite_spectrum_zero_oscillation_audit(
    field: &ConjugatedDiagonalField,
    cfg: &SamplingConfig,
) -> Result<ZeroOscillationAudit, OscillationError> {
    cfg.validate()?;
    let run = sample_field(field.r, &[(0, Vec::new())], cfg, false, |chi| {
        spectral_norm(&field.evaluate(&chi.theta), true).unwrap_or(f64::NAN)
    });
    let omega = run.omega();
    if !omega.is_finite() {
        return Err(OscillationError::NonFinite);
    }
    Ok(ZeroOscillationAudit {
        omega_sampled: omega,
        tolerance: ZERO_OSCILLATION_TOL,
        passed: omega <= ZERO_OSCILLATION_TOL,
        evaluations: run.evaluations,
    })
}
