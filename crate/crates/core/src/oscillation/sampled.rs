use rayon::prelude::*;
use serde::Serialize;

use super::fiber::CompiledMatrix;
use super::surface::SurfacePoint;
use super::{
    Character, ComponentExtrema, DualDescription, EstimateMethod, GridSpec, OscillationError,
    OscillationEstimate,
};
use crate::algebra::{GroupAlgebra, MatrixOverGroupAlgebra};
use crate::group::AbelianElement;
use crate::DEFAULT_SEED;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMode {
    /// Requires a symbolically self-adjoint input; uses eigenvalues.
    Hermitian,
    /// Any input; uses singular values.
    SingularValues,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplingConfig {
    /// Points per torus axis.
    pub grid: usize,
    /// Local refinement levels around the per-component extrema.
    pub refine: usize,
    /// Spacing divisor per refinement level; the patch spans `±zoom` steps.
    pub zoom: usize,
    /// Seed for component sampling beyond the cap.
    pub seed: u64,
    /// Budget of grid points per component and per refinement patch.
    pub max_points: usize,
    /// Sample components uniformly beyond the cap instead of failing.
    pub sample_components: bool,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            grid: 64,
            refine: 2,
            zoom: 8,
            seed: DEFAULT_SEED,
            max_points: 1 << 20,
            sample_components: true,
        }
    }
}

impl SamplingConfig {
    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_refine(mut self, refine: usize) -> Self {
        self.refine = refine;
        self
    }

    pub fn validate(&self) -> Result<(), OscillationError> {
        if self.grid == 0 {
            return Err(OscillationError::Config("grid must be positive".into()));
        }
        if self.zoom < 2 {
            return Err(OscillationError::Config("zoom must be at least 2".into()));
        }
        if self.max_points == 0 {
            return Err(OscillationError::Config("point budget must be positive".into()));
        }
        Ok(())
    }

    /// Largest `p ≤ grid` with `p^r` within the point budget.
    pub fn points_per_axis(&self, r: usize) -> usize {
        let mut p = self.grid.max(1);
        while p > 1 && grid_size(p, r).is_none_or(|n| n > self.max_points) {
            p -= 1;
        }
        p
    }
}

fn grid_size(p: usize, r: usize) -> Option<usize> {
    p.checked_pow(u32::try_from(r).ok()?)
}

/// Output of [`sample_field`].
#[derive(Clone, Debug, PartialEq)]
pub struct SampleRun {
    pub extrema: Vec<ComponentExtrema>,
    pub grid: GridSpec,
    pub evaluations: u64,
    pub surface: Vec<SurfacePoint>,
}

impl SampleRun {
    pub fn omega(&self) -> f64 {
        self.extrema.iter().map(|e| e.max_norm - e.min_norm).fold(0.0, f64::max)
    }

    pub fn max_norm(&self) -> f64 {
        self.extrema.iter().map(|e| e.max_norm).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy)]
struct Best {
    value: f64,
    index: usize,
}

fn pick(a: Best, b: Best, larger: bool) -> Best {
    let better = if larger { b.value > a.value } else { b.value < a.value };
    if better || (b.value == a.value && b.index < a.index) {
        b
    } else {
        a
    }
}

fn unflatten(mut n: usize, p: usize, r: usize) -> Vec<usize> {
    let mut out = vec![0; r];
    for slot in out.iter_mut().rev() {
        *slot = n % p;
        n /= p;
    }
    out
}

/// Evaluates `f` on a uniform grid of every listed component (each a torus
/// `𝕋^r`, identified by `(id, torsion tuple)`) and refines around each
/// component's maximum and minimum. The reduction breaks ties by index, so
/// the result does not depend on thread scheduling.
pub fn sample_field<F>(
    r: usize,
    components: &[(u128, Vec<u64>)],
    cfg: &SamplingConfig,
    collect_surface: bool,
    f: F,
) -> SampleRun
where
    F: Fn(&Character) -> f64 + Sync,
{
    let p = if r == 0 { 1 } else { cfg.points_per_axis(r) };
    let base = grid_size(p, r).unwrap_or(1);
    let patch_side = 2 * cfg.zoom + 1;
    let patch = grid_size(patch_side, r).filter(|&n| n <= cfg.max_points);
    let refine = if r == 0 || patch.is_none() { 0 } else { cfg.refine };

    let per: Vec<(ComponentExtrema, u64, Vec<SurfacePoint>)> = components
        .par_iter()
        .map(|(id, tuple)| {
            let chi_at = |theta: Vec<f64>| Character { theta, torsion: tuple.clone() };
            let theta_of = |n: usize| unflatten(n, p, r).into_iter().map(|k| k as f64 / p as f64).collect::<Vec<_>>();
            let values: Vec<f64> = (0..base).into_par_iter().map(|n| f(&chi_at(theta_of(n)))).collect();
            let mut evaluations = base as u64;
            let seed = Best { value: values[0], index: 0 };
            let (mut hi, mut lo) = values.iter().enumerate().fold((seed, seed), |(hi, lo), (i, &v)| {
                let b = Best { value: v, index: i };
                (pick(hi, b, true), pick(lo, b, false))
            });
            let mut argmax = theta_of(hi.index);
            let mut argmin = theta_of(lo.index);

            for level in 1..=refine {
                let step = 1.0 / (p as f64 * (cfg.zoom as f64).powi(level as i32));
                let n_patch = patch.unwrap_or(0);
                let offset = |n: usize| unflatten(n, patch_side, r).into_iter().map(|j| j as f64 - cfg.zoom as f64);
                let around = |center: &[f64]| -> Vec<Vec<f64>> {
                    (0..n_patch)
                        .map(|n| center.iter().zip(offset(n)).map(|(c, j)| (c + j * step).rem_euclid(1.0)).collect())
                        .collect()
                };
                for (larger, center) in [(true, argmax.clone()), (false, argmin.clone())] {
                    let points = around(&center);
                    let vals: Vec<f64> = points.par_iter().map(|t| f(&chi_at(t.clone()))).collect();
                    evaluations += n_patch as u64;
                    let mut best = if larger { hi } else { lo };
                    let mut best_theta = None;
                    for (i, &v) in vals.iter().enumerate() {
                        let better = if larger { v > best.value } else { v < best.value };
                        if better {
                            best = Best { value: v, index: 0 };
                            best_theta = Some(i);
                        }
                    }
                    if let Some(i) = best_theta {
                        if larger {
                            hi = best;
                            argmax = points[i].clone();
                        } else {
                            lo = best;
                            argmin = points[i].clone();
                        }
                    }
                }
            }

            let surface = if collect_surface {
                values.iter().enumerate().map(|(n, &norm)| SurfacePoint { component: *id, theta: theta_of(n), norm }).collect()
            } else {
                Vec::new()
            };
            let (argmax, argmin) = if r == 0 { (None, None) } else { (Some(argmax), Some(argmin)) };
            let extrema = ComponentExtrema { component: tuple.clone(), max_norm: hi.value, min_norm: lo.value, argmax, argmin };
            (extrema, evaluations, surface)
        })
        .collect();

    let mut run = SampleRun {
        extrema: Vec::with_capacity(per.len()),
        grid: GridSpec {
            grid: cfg.grid,
            points_per_axis: p,
            refine,
            zoom: cfg.zoom,
            refinement_skipped: r > 0 && cfg.refine > 0 && patch.is_none(),
        },
        evaluations: 0,
        surface: Vec::new(),
    };
    for (e, n, s) in per {
        run.extrema.push(e);
        run.evaluations += n;
        run.surface.extend(s);
    }
    run
}

pub(crate) fn selected_components(
    dual: &DualDescription,
    cfg: &SamplingConfig,
) -> Result<(Vec<(u128, Vec<u64>)>, u128, bool), OscillationError> {
    let count = dual.component_count();
    if count > dual.components_cap() as u128 && !cfg.sample_components {
        return Err(OscillationError::TooManyComponents { count, cap: dual.components_cap() });
    }
    let sel = dual.components(cfg.seed);
    let listed = sel.tuples.into_iter().map(|t| (dual.component_id(&t), t)).collect();
    Ok((listed, sel.total, sel.sampled))
}

pub(crate) fn check_mode(
    m: &MatrixOverGroupAlgebra<AbelianElement>,
    dual: &DualDescription,
    mode: NormMode,
) -> Result<bool, OscillationError> {
    let alg = GroupAlgebra::new(dual.group().clone());
    let self_adjoint = alg.matrix_is_self_adjoint(m);
    match mode {
        NormMode::Hermitian if !self_adjoint => Err(OscillationError::NotSelfAdjoint),
        NormMode::Hermitian => Ok(true),
        NormMode::SingularValues => Ok(false),
    }
}

/// Sampled oscillation together with the raw grid surface.
pub fn oscillation_sampled_with_surface(
    m: &MatrixOverGroupAlgebra<AbelianElement>,
    dual: &DualDescription,
    cfg: &SamplingConfig,
    mode: NormMode,
    collect_surface: bool,
) -> Result<(OscillationEstimate, Vec<SurfacePoint>), OscillationError> {
    cfg.validate()?;
    let hermitian = check_mode(m, dual, mode)?;
    let compiled = CompiledMatrix::new(m, dual, hermitian)?;
    let (components, total, sampled) = selected_components(dual, cfg)?;
    let r = dual.dimension();
    let run = sample_field(r, &components, cfg, collect_surface, |chi| compiled.norm_at(chi));
    if run.extrema.iter().any(|e| !e.max_norm.is_finite() || !e.min_norm.is_finite()) {
        return Err(OscillationError::NonFinite);
    }
    let (method, lower, upper) = if r == 0 {
        (EstimateMethod::ZeroDimensional, 0.0, 0.0)
    } else {
        let lower = run.omega();
        (EstimateMethod::Sampled, lower, m.norm_upper_bound().max(lower))
    };
    let estimate = OscillationEstimate {
        method,
        omega_lower: lower,
        omega_upper: upper,
        per_component: run.extrema,
        grid: Some(run.grid),
        components_total: total,
        component_sampled: sampled,
        evaluations: run.evaluations,
    };
    Ok((estimate, run.surface))
}

/// `ω̂(m)`: max over components of sampled max minus sampled min. The upper
/// end is the ℓ¹ norm bound, which dominates every fiber norm.
pub fn oscillation_sampled(
    m: &MatrixOverGroupAlgebra<AbelianElement>,
    dual: &DualDescription,
    cfg: &SamplingConfig,
    mode: NormMode,
) -> Result<OscillationEstimate, OscillationError> {
    oscillation_sampled_with_surface(m, dual, cfg, mode, false).map(|(e, _)| e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GroupAlgebraElement;
    use crate::coeff::Coeff;
    use crate::group::FGAbelianGroup;

    fn z(n: i64) -> AbelianElement {
        AbelianElement::free(vec![n])
    }

    #[test]
    fn example_beta_power() {
        let g = FGAbelianGroup::free_abelian(1);
        let alg = GroupAlgebra::new(g.clone());
        let dual = DualDescription::new(g);
        for lambda in [1, 2, 5] {
            let m = MatrixOverGroupAlgebra::diagonal(vec![alg.beta(&z(lambda))]);
            let est = oscillation_sampled(&m, &dual, &SamplingConfig::default(), NormMode::Hermitian).unwrap();
            assert!(est.omega_lower >= 2.0 - 1e-3 && est.omega_lower <= 2.0, "{}", est.omega_lower);
            assert!(est.omega_lower <= est.omega_upper);
        }
    }

    #[test]
    fn constant_and_zero_dimensional() {
        let g = FGAbelianGroup::free_abelian(2);
        let alg = GroupAlgebra::new(g.clone());
        let m = alg.matrix_scalar(2, Coeff::ratio(3, 2));
        let est = oscillation_sampled(&m, &DualDescription::new(g), &SamplingConfig::default(), NormMode::Hermitian).unwrap();
        assert_eq!(est.omega_lower, 0.0);

        let t = FGAbelianGroup::cyclic(6).unwrap();
        let alg = GroupAlgebra::new(t.clone());
        let c = AbelianElement { free: vec![], torsion: vec![1] };
        let m = MatrixOverGroupAlgebra::diagonal(vec![alg.beta(&c)]);
        let est = oscillation_sampled(&m, &DualDescription::new(t), &SamplingConfig::default(), NormMode::Hermitian).unwrap();
        assert_eq!((est.omega_lower, est.omega_upper), (0.0, 0.0));
        assert_eq!(est.per_component.len(), 6);
        assert!(est.is_exact());
    }

    #[test]
    fn rejects_non_self_adjoint_unless_asked() {
        let g = FGAbelianGroup::free_abelian(1);
        let m = MatrixOverGroupAlgebra::diagonal(vec![GroupAlgebraElement::basis(z(1))]);
        let dual = DualDescription::new(g);
        let cfg = SamplingConfig::default();
        assert_eq!(oscillation_sampled(&m, &dual, &cfg, NormMode::Hermitian), Err(OscillationError::NotSelfAdjoint));
        // a unitary: every fiber norm is 1
        let est = oscillation_sampled(&m, &dual, &cfg, NormMode::SingularValues).unwrap();
        assert!(est.omega_lower < 1e-12);
    }

    #[test]
    fn cap_policy() {
        let g = FGAbelianGroup::new(1, vec![2, 2, 2]).unwrap();
        let dual = DualDescription::new(g.clone()).with_cap(4);
        let alg = GroupAlgebra::new(g);
        let m = alg.matrix_identity(1);
        let cfg = SamplingConfig { sample_components: false, ..SamplingConfig::default() };
        assert!(matches!(oscillation_sampled(&m, &dual, &cfg, NormMode::Hermitian), Err(OscillationError::TooManyComponents { .. })));
        let est = oscillation_sampled(&m, &dual, &SamplingConfig::default(), NormMode::Hermitian).unwrap();
        assert!(est.component_sampled);
        assert_eq!(est.per_component.len(), 4);
    }

    #[test]
    fn refinement_is_monotone() {
        let g = FGAbelianGroup::free_abelian(2);
        let alg = GroupAlgebra::new(g.clone());
        let x = alg.beta(&AbelianElement::free(vec![3, 7])).add(&alg.real_part(&AbelianElement::free(vec![1, -2])));
        let m = MatrixOverGroupAlgebra::diagonal(vec![x]);
        let dual = DualDescription::new(g);
        let mut last = 0.0;
        for refine in 0..3 {
            let cfg = SamplingConfig::default().with_grid(16).with_refine(refine);
            let w = oscillation_sampled(&m, &dual, &cfg, NormMode::Hermitian).unwrap().omega_lower;
            assert!(w >= last);
            last = w;
        }
    }

    #[test]
    fn points_budget() {
        let cfg = SamplingConfig { max_points: 1000, ..SamplingConfig::default() };
        assert_eq!(cfg.points_per_axis(1), 64);
        assert_eq!(cfg.points_per_axis(2), 31);
        assert_eq!(cfg.points_per_axis(3), 10);
    }
}
