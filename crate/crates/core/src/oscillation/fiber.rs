use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::dual::{phase, unit};
use super::{Character, DualDescription, OscillationError};
use crate::algebra::MatrixOverGroupAlgebra;
use crate::group::{AbelianElement, GroupLaw};

/// A fiber `π_χ(m) ∈ M_k(ℂ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberMatrix(pub DMatrix<Complex64>);

impl FiberMatrix {
    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let m = &self.0;
        (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= tol))
    }
}

impl Serialize for FiberMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.0.nrows())
            .map(|i| (0..self.0.ncols()).map(|j| [self.0[(i, j)].re, self.0[(i, j)].im]).collect())
            .collect();
        rows.serialize(s)
    }
}

/// Operator norm (largest singular value). The Hermitian path uses
/// eigenvalues; diagonal and `1×1` inputs are read off directly.
pub fn spectral_norm(f: &FiberMatrix, hermitian: bool) -> Result<f64, OscillationError> {
    let m = &f.0;
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(OscillationError::NonFinite);
    }
    let k = m.nrows();
    if k == 0 {
        return Ok(0.0);
    }
    let diagonal = (0..k).all(|i| (0..k).all(|j| i == j || m[(i, j)] == Complex64::new(0.0, 0.0)));
    if diagonal {
        return Ok((0..k).map(|i| m[(i, i)].norm()).fold(0.0, f64::max));
    }
    if hermitian {
        let eig = m.clone().symmetric_eigenvalues();
        return Ok(eig.iter().map(|x| x.abs()).fold(0.0, f64::max));
    }
    Ok(m.clone().singular_values().iter().copied().fold(0.0, f64::max))
}

/// A matrix over `ℂ[A]` with coefficients converted to floats once, for
/// repeated evaluation at many characters.
#[derive(Clone, Debug)]
pub struct CompiledMatrix {
    size: usize,
    dual: DualDescription,
    entries: Vec<Vec<(Complex64, AbelianElement)>>,
    hermitian: bool,
}

impl CompiledMatrix {
    pub fn new(
        m: &MatrixOverGroupAlgebra<AbelianElement>,
        dual: &DualDescription,
        hermitian: bool,
    ) -> Result<Self, OscillationError> {
        for x in m.entries() {
            for g in x.support() {
                dual.group().check(g)?;
            }
        }
        let entries = m
            .entries()
            .iter()
            .map(|x| x.terms().map(|(g, c)| (c.to_c64(), g.clone())).collect())
            .collect();
        Ok(CompiledMatrix { size: m.size(), dual: dual.clone(), entries, hermitian })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn evaluate(&self, chi: &Character) -> FiberMatrix {
        let k = self.size;
        let group = self.dual.group();
        FiberMatrix(DMatrix::from_fn(k, k, |i, j| {
            self.entries[i * k + j]
                .iter()
                .map(|(c, g)| c * unit(phase(group, chi, g)))
                .sum()
        }))
    }

    pub fn norm_at(&self, chi: &Character) -> f64 {
        spectral_norm(&self.evaluate(chi), self.hermitian).unwrap_or(f64::NAN)
    }
}

/// `π_χ(m)`: entrywise `Σ λ_g χ(g)`.
pub fn evaluate_fiber(
    m: &MatrixOverGroupAlgebra<AbelianElement>,
    dual: &DualDescription,
    chi: &Character,
) -> Result<FiberMatrix, OscillationError> {
    dual.check_character(chi)?;
    Ok(CompiledMatrix::new(m, dual, false)?.evaluate(chi))
}
