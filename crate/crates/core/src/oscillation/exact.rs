use num_traits::Signed;
use serde::Serialize;

use super::dual::{phase, unit};
use super::sampled::{selected_components, SamplingConfig};
use super::{Character, ComponentExtrema, DualDescription, EstimateMethod, OscillationError, OscillationEstimate};
use crate::algebra::{GroupAlgebraElement, MatrixOverGroupAlgebra};
use crate::coeff::{rat, Coeff};
use crate::group::{AbelianElement, FGAbelianGroup, GroupLaw};

/// `s · diag(β(d₁), …, β(d_k))` with `s = ±1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BetaDiagonal {
    pub sign: i8,
    pub entries: Vec<AbelianElement>,
}

/// Returns `Some(d)` with `x = s·β(d)`, or `None`; `x = 0` is `β(e)` for
/// either sign.
fn beta_argument(group: &FGAbelianGroup, x: &GroupAlgebraElement<AbelianElement>, sign: &Coeff) -> Option<AbelianElement> {
    let e = group.identity();
    if x.is_zero() {
        return Some(e);
    }
    if x.coefficient(&e) != *sign {
        return None;
    }
    let rest: Vec<(&AbelianElement, &Coeff)> = x.terms().filter(|(g, _)| **g != e).collect();
    match rest.as_slice() {
        [(d, c)] if group.inverse(d) == **d && **c == -sign => Some((*d).clone()),
        [(d1, c1), (d2, c2)] if group.inverse(d1) == **d2 => {
            let half = sign.scale(&rat(-1, 2));
            (**c1 == half && **c2 == half).then(|| (*d1).clone().max((*d2).clone()))
        }
        _ => None,
    }
}

pub fn recognize_beta_diagonal(
    m: &MatrixOverGroupAlgebra<AbelianElement>,
    group: &FGAbelianGroup,
) -> Option<BetaDiagonal> {
    if !m.is_diagonal() {
        return None;
    }
    for x in m.entries() {
        if x.support().any(|g| group.check(g).is_err()) {
            return None;
        }
    }
    let diag = m.diagonal_entries();
    // the sign is fixed by the first entry with a nonzero identity coefficient
    let e = group.identity();
    let sign = diag
        .iter()
        .map(|x| x.coefficient(&e))
        .find(|c| !c.is_zero())
        .map(|c| if c.re.is_positive() { 1i8 } else { -1 })
        .unwrap_or(1);
    let s = Coeff::from_int(sign as i64);
    let entries = diag.iter().map(|x| beta_argument(group, x, &s)).collect::<Option<Vec<_>>>()?;
    Some(BetaDiagonal { sign, entries })
}

/// Closed form: `2` if some `dᵢ` has infinite order, else `0`.
///
/// On the trivial component every `β(dᵢ)` vanishes at the trivial character,
/// and a non-torsion `d` reaches `χ(d) = −1` there, so the norm runs through
/// `[0, 2]`. When every `dᵢ` is torsion, `χ(dᵢ)` only depends on the torsion
/// part of `χ` and the fiber norm `maxᵢ (1 − Re χ(dᵢ))` is constant on each
/// component.
pub fn oscillation_exact_beta_diagonal(
    entries: &[AbelianElement],
    dual: &DualDescription,
) -> Result<OscillationEstimate, OscillationError> {
    let group = dual.group();
    for d in entries {
        group.check(d)?;
    }
    let r = dual.dimension();
    let wild = entries.iter().any(|d| !d.is_torsion());
    let (per_component, total, sampled) = if wild {
        // the trivial component is the witness: norm 0 at the trivial
        // character and 2 wherever a non-torsion entry has phase 1/2
        let zero = vec![0u64; group.torsion_factors().len()];
        let extrema = ComponentExtrema { component: zero, max_norm: 2.0, min_norm: 0.0, argmax: None, argmin: None };
        (vec![extrema], dual.component_count(), dual.component_count() > 1)
    } else {
        let (components, total, sampled) = selected_components(dual, &SamplingConfig::default())?;
        let extrema = components
            .into_iter()
            .map(|(_, tuple)| {
                let chi = Character { theta: vec![0.0; r], torsion: tuple.clone() };
                let norm = entries.iter().map(|d| 1.0 - unit(phase(group, &chi, d)).re).fold(0.0, f64::max);
                ComponentExtrema { component: tuple, max_norm: norm, min_norm: norm, argmax: None, argmin: None }
            })
            .collect();
        (extrema, total, sampled)
    };
    let omega = if wild { 2.0 } else { 0.0 };
    Ok(OscillationEstimate {
        method: EstimateMethod::ExactDiagonal,
        omega_lower: omega,
        omega_upper: omega,
        per_component,
        grid: None,
        components_total: total,
        component_sampled: sampled,
        evaluations: 0,
    })
}

/// Exact path: recognizes `±diag(β(dᵢ))` and applies the closed form.
pub fn oscillation_exact(
    m: &MatrixOverGroupAlgebra<AbelianElement>,
    dual: &DualDescription,
) -> Result<OscillationEstimate, OscillationError> {
    let bd = recognize_beta_diagonal(m, dual.group()).ok_or(OscillationError::NotBetaDiagonal)?;
    oscillation_exact_beta_diagonal(&bd.entries, dual)
}
