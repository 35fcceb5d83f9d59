use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::exact::{oscillation_exact_beta_diagonal, recognize_beta_diagonal};
use super::sampled::{oscillation_sampled, NormMode, SamplingConfig};
use super::{DualDescription, OscillationError};
use crate::algebra::{GroupAlgebra, MatrixOverGroupAlgebra};
use crate::coeff::Coeff;
use crate::group::{AbelianElement, GroupLaw};

/// Interval containing `d(m)`, the distance from `m` to the self-adjoint
/// elements of finite spectrum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceBracket {
    pub lower: f64,
    pub upper: f64,
    /// The lower end comes from the closed form rather than sampling.
    pub lower_exact: bool,
    /// Shift `λ` realizing the lower end.
    pub lower_shift: Coeff,
    /// Shift `λ` realizing the upper end.
    pub upper_shift: Coeff,
    pub shifts_tried: usize,
}

/// Scalar shifts that move the spectrum of every fiber to one side of the
/// origin: `cᵢ` and `cᵢ ± sᵢ`, where `cᵢ` is the real identity coefficient of
/// the `i`-th diagonal entry and `sᵢ` bounds the rest of row `i`.
fn candidate_shifts(m: &MatrixOverGroupAlgebra<AbelianElement>, e: &AbelianElement) -> BTreeSet<BigRational> {
    let k = m.size();
    let mut out = BTreeSet::from([BigRational::zero()]);
    for i in 0..k {
        let c = m.get(i, i).coefficient(e).re;
        let mut s = BigRational::zero();
        for j in 0..k {
            for (g, x) in m.get(i, j).terms() {
                if i == j && g == e {
                    continue;
                }
                s += x.re.abs() + x.im.abs();
            }
        }
        out.insert(&c - &s);
        out.insert(&c + &s);
        out.insert(c);
    }
    out
}

/// `[max_λ ω(m − λ)/2, min_λ ‖m − λ‖]`: shifting by a scalar does not change
/// `d`, oscillation bounds `d` from below by half, and `λ·1` itself has
/// finite spectrum.
pub fn finite_spectrum_distance_bracket(
    m: &MatrixOverGroupAlgebra<AbelianElement>,
    dual: &DualDescription,
    cfg: &SamplingConfig,
) -> Result<DistanceBracket, OscillationError> {
    let alg = GroupAlgebra::new(dual.group().clone());
    if !alg.matrix_is_self_adjoint(m) {
        return Err(OscillationError::NotSelfAdjoint);
    }
    let e = dual.group().identity();
    let shifts = candidate_shifts(m, &e);
    let mut best = DistanceBracket {
        lower: 0.0,
        upper: f64::INFINITY,
        lower_exact: false,
        lower_shift: Coeff::zero(),
        upper_shift: Coeff::zero(),
        shifts_tried: shifts.len(),
    };
    for lambda in shifts {
        let shift = Coeff::real(lambda);
        let shifted = m.sub(&alg.matrix_scalar(m.size(), shift.clone())).expect("same size");
        let (omega, exact) = match recognize_beta_diagonal(&shifted, dual.group()) {
            Some(bd) => (oscillation_exact_beta_diagonal(&bd.entries, dual)?.omega_lower, true),
            None => (oscillation_sampled(&shifted, dual, cfg, NormMode::Hermitian)?.omega_lower, false),
        };
        let lb = omega / 2.0;
        if lb > best.lower || (lb == best.lower && exact && !best.lower_exact) {
            best.lower = lb;
            best.lower_exact = exact;
            best.lower_shift = shift.clone();
        }
        let ub = shifted.norm_upper_bound();
        if ub < best.upper {
            best.upper = ub;
            best.upper_shift = shift;
        }
    }
    Ok(best)
}
