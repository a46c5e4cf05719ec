//! Truncated Fock-space algebra for a single cavity mode.
//!
//! Units are ħ = 1 with quadratures q̂ = (â + â†)/√2 and p̂ = (â − â†)/(i√2),
//! so [q̂, p̂] = i and the vacuum has variance 1/2 in either quadrature.
//! The complex amplitude is α = (q + ip)/√2.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

const NORM_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-10;
const POSITIVITY_TOL: f64 = 1e-8;
const RENORM_TOL: f64 = 1e-8;

/// Size of the truncated Fock basis |0⟩ … |dim−1⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertSpec {
    dim: usize,
}

impl HilbertSpec {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Dimension(dim));
        }
        Ok(Self { dim })
    }

    /// Default truncation for experiments touching amplitudes up to `max_alpha`:
    /// ⌈4|α|² + 10⌉.
    pub fn for_amplitude(max_alpha: f64) -> Self {
        let dim = (4.0 * max_alpha * max_alpha + 10.0).ceil() as usize;
        Self { dim: dim.max(2) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Largest |α|² accepted by amplitude-dependent constructions.
    pub fn alpha_sq_limit(&self) -> f64 {
        self.dim as f64 / 4.0
    }

    pub fn check_amplitude(&self, alpha: C64) -> Result<()> {
        let alpha_sq = alpha.norm_sqr();
        let limit = self.alpha_sq_limit();
        if !alpha_sq.is_finite() || alpha_sq > limit {
            return Err(Error::Truncation { alpha_sq, limit });
        }
        Ok(())
    }
}

/// Pure field state as Fock amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    amplitudes: CVector,
    renormalization: f64,
}

impl FieldState {
    /// Normalizes `amplitudes`; fails on a zero vector.
    pub fn from_amplitudes(amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::Dimension(amplitudes.len()));
        }
        let norm = amplitudes.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState("zero or non-finite amplitude vector".into()));
        }
        Ok(Self { amplitudes: amplitudes / C64::from(norm), renormalization: 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn spec(&self) -> HilbertSpec {
        HilbertSpec { dim: self.dim() }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    /// Probability mass discarded by truncation before renormalizing.
    pub fn renormalization(&self) -> f64 {
        self.renormalization
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &FieldState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    /// Zero-pads (or truncates, if the dropped tail is below 1e-12) to `dim`.
    pub fn resized(&self, dim: usize) -> Result<FieldState> {
        let tail: f64 = self.amplitudes.iter().skip(dim).map(|c| c.norm_sqr()).sum();
        if dim < 2 || tail > 1e-12 {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: dim });
        }
        let mut out = CVector::zeros(dim);
        for (n, c) in self.amplitudes.iter().take(dim).enumerate() {
            out[n] = *c;
        }
        Ok(FieldState { amplitudes: out, renormalization: self.renormalization })
    }

    pub fn to_density(&self) -> DensityOperator {
        pure_to_density(self)
    }
}

/// Complex dim×dim matrix with density-operator invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates hermiticity and unit trace. Positivity is checked by [`validate`](Self::validate).
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let rho = Self { matrix };
        rho.check_shape()?;
        rho.check_hermitian_and_trace()?;
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    /// Hermitian part, rescaled to unit trace.
    pub(crate) fn normalized_from(matrix: CMatrix) -> Result<Self> {
        let herm = (&matrix + matrix.adjoint()) * C64::from(0.5);
        let tr = herm.trace().re;
        if !(tr > 0.0 && tr.is_finite()) {
            return Err(Error::InvalidState(format!("trace {tr:.3e} cannot be normalized")));
        }
        Ok(Self { matrix: herm / C64::from(tr) })
    }

    pub fn vacuum(spec: HilbertSpec) -> Self {
        let mut m = CMatrix::zeros(spec.dim, spec.dim);
        m[(0, 0)] = C64::from(1.0);
        Self { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn spec(&self) -> HilbertSpec {
        HilbertSpec { dim: self.dim() }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn mean_photon_number(&self) -> f64 {
        (0..self.dim()).map(|n| n as f64 * self.matrix[(n, n)].re).sum()
    }

    /// ⟨ψ|ρ|φ⟩
    pub fn matrix_element(&self, bra: &FieldState, ket: &FieldState) -> C64 {
        bra.amplitudes().dotc(&(&self.matrix * ket.amplitudes()))
    }

    /// Tr(ρ A)
    pub fn expectation(&self, op: &FieldOperator) -> C64 {
        (&self.matrix * op.matrix()).trace()
    }

    /// ⟨ψ|ρ|ψ⟩
    pub fn fidelity_to_pure(&self, psi: &FieldState) -> f64 {
        self.matrix_element(psi, psi).re
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * C64::from(0.5);
        herm.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Checks all three invariants: hermiticity, unit trace, positivity.
    pub fn validate(&self) -> Result<()> {
        self.check_shape()?;
        self.check_hermitian_and_trace()?;
        let min = self.min_eigenvalue();
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    /// Zero-pads to a larger basis, or truncates if the dropped block is negligible.
    pub fn resized(&self, dim: usize) -> Result<DensityOperator> {
        let n = self.dim();
        if dim < 2 {
            return Err(Error::Dimension(dim));
        }
        if dim < n {
            let dropped: f64 = (dim..n).map(|k| self.matrix[(k, k)].re).sum();
            if dropped > 1e-12 {
                return Err(Error::DimensionMismatch { expected: n, got: dim });
            }
        }
        let mut out = CMatrix::zeros(dim, dim);
        let keep = n.min(dim);
        out.view_mut((0, 0), (keep, keep)).copy_from(&self.matrix.view((0, 0), (keep, keep)));
        Ok(DensityOperator { matrix: out })
    }

    fn check_shape(&self) -> Result<()> {
        if self.matrix.nrows() != self.matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.nrows(),
                got: self.matrix.ncols(),
            });
        }
        if self.matrix.nrows() < 2 {
            return Err(Error::Dimension(self.matrix.nrows()));
        }
        Ok(())
    }

    fn check_hermitian_and_trace(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("hermiticity error {herm:.3e}")));
        }
        let tr = self.trace();
        if (tr - C64::from(1.0)).norm() > NORM_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        Ok(())
    }
}

/// Generic complex operator on the truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldOperator {
    matrix: CMatrix,
}

impl FieldOperator {
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), got: matrix.ncols() });
        }
        Ok(Self { matrix })
    }

    pub fn identity(spec: HilbertSpec) -> Self {
        Self { matrix: CMatrix::identity(spec.dim, spec.dim) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    pub fn apply(&self, state: &FieldState) -> CVector {
        &self.matrix * state.amplitudes()
    }

    /// A ρ A†, without renormalization.
    pub fn conjugate(&self, rho: &DensityOperator) -> CMatrix {
        &self.matrix * rho.matrix() * self.matrix.adjoint()
    }

    /// Largest elementwise deviation of A†A from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim();
        let prod = self.matrix.adjoint() * &self.matrix;
        let id = CMatrix::identity(n, n);
        (prod - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Mul for &FieldOperator {
    type Output = FieldOperator;
    fn mul(self, rhs: &FieldOperator) -> FieldOperator {
        FieldOperator { matrix: &self.matrix * &rhs.matrix }
    }
}

pub fn annihilation(spec: HilbertSpec) -> FieldOperator {
    let n = spec.dim;
    let mut m = CMatrix::zeros(n, n);
    for k in 1..n {
        m[(k - 1, k)] = C64::from((k as f64).sqrt());
    }
    FieldOperator { matrix: m }
}

pub fn creation(spec: HilbertSpec) -> FieldOperator {
    annihilation(spec).adjoint()
}

pub fn number(spec: HilbertSpec) -> FieldOperator {
    let n = spec.dim;
    FieldOperator {
        matrix: CMatrix::from_diagonal(&CVector::from_fn(n, |k, _| C64::from(k as f64))),
    }
}

/// q̂ = (â + â†)/√2
pub fn quadrature_q(spec: HilbertSpec) -> FieldOperator {
    let a = annihilation(spec).matrix;
    FieldOperator { matrix: (&a + a.adjoint()) * C64::from(std::f64::consts::FRAC_1_SQRT_2) }
}

/// p̂ = (â − â†)/(i√2)
pub fn quadrature_p(spec: HilbertSpec) -> FieldOperator {
    let a = annihilation(spec).matrix;
    let scale = C64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2);
    FieldOperator { matrix: (&a - a.adjoint()) * scale }
}

/// 𝒫 = exp(iπ n̂), diagonal (−1)ⁿ.
pub fn parity(spec: HilbertSpec) -> FieldOperator {
    FieldOperator { matrix: CMatrix::from_diagonal(&parity_diagonal(spec.dim)) }
}

pub(crate) fn parity_diagonal(dim: usize) -> CVector {
    CVector::from_fn(dim, |k, _| C64::from(if k % 2 == 0 { 1.0 } else { -1.0 }))
}

/// D(α) = exp(α↠− α* â) by scaling-and-squaring Padé on the truncated generator.
///
/// The result is exactly unitary. Its matrix elements agree with the
/// untruncated operator on levels well below the cutoff; with ten levels of
/// headroom over [`HilbertSpec::for_amplitude`] the error is ~1e-12.
pub fn displacement(spec: HilbertSpec, alpha: C64) -> Result<FieldOperator> {
    spec.check_amplitude(alpha)?;
    Ok(displacement_unguarded(spec.dim, alpha))
}

pub(crate) fn displacement_unguarded(dim: usize, alpha: C64) -> FieldOperator {
    if alpha == C64::from(0.0) {
        return FieldOperator { matrix: CMatrix::identity(dim, dim) };
    }
    let a = annihilation(HilbertSpec { dim }).matrix;
    let generator = a.adjoint() * alpha - &a * alpha.conj();
    FieldOperator { matrix: generator.exp() }
}

/// D(α)ψ on the truncated space of ψ without forming the matrix.
///
/// Same operator as [`displacement`]: the Taylor series of the truncated
/// generator G = α↠− α*â is summed in substeps with ‖G‖ ≤ 1, each term
/// costing O(dim).
pub fn displace_vector(psi: &CVector, alpha: C64) -> CVector {
    let dim = psi.len();
    if alpha == C64::from(0.0) || dim < 2 {
        return psi.clone();
    }
    let bound = 2.0 * alpha.norm() * ((dim - 1) as f64).sqrt();
    let steps = bound.ceil().max(1.0) as usize;
    let a = alpha / steps as f64;
    let ac = a.conj();
    let roots: Vec<f64> = (0..=dim).map(|k| (k as f64).sqrt()).collect();
    let apply_generator = |v: &CVector, k: f64| -> CVector {
        CVector::from_fn(dim, |n, _| {
            let mut out = C64::from(0.0);
            if n > 0 {
                out += a * roots[n] * v[n - 1];
            }
            if n + 1 < dim {
                out -= ac * roots[n + 1] * v[n + 1];
            }
            out / k
        })
    };
    let mut v = psi.clone();
    for _ in 0..steps {
        let mut term = v.clone();
        let mut sum = v.clone();
        for k in 1..=60 {
            term = apply_generator(&term, k as f64);
            sum += &term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
        }
        v = sum;
    }
    v
}

/// Raw truncated series e^{−|α|²/2} αⁿ/√n! and the mass it leaves out.
fn coherent_series(dim: usize, alpha: C64) -> (CVector, f64) {
    let mut amps = CVector::zeros(dim);
    let mut c = C64::from((-alpha.norm_sqr() / 2.0).exp());
    amps[0] = c;
    for n in 1..dim {
        c = c * alpha / (n as f64).sqrt();
        amps[n] = c;
    }
    let mass: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    (amps, (1.0 - mass).max(0.0))
}

/// |α⟩ from the Fock series, renormalized after truncation.
pub fn coherent_state(spec: HilbertSpec, alpha: C64) -> Result<FieldState> {
    spec.check_amplitude(alpha)?;
    let (amps, missing) = coherent_series(spec.dim, alpha);
    if missing > RENORM_TOL {
        return Err(Error::TruncationTail { correction: missing, dim: spec.dim });
    }
    let norm = amps.norm();
    Ok(FieldState { amplitudes: amps / C64::from(norm), renormalization: missing })
}

pub fn fock_state(spec: HilbertSpec, n: usize) -> Result<FieldState> {
    if n >= spec.dim {
        return Err(Error::Index { index: n, dim: spec.dim });
    }
    let mut amps = CVector::zeros(spec.dim);
    amps[n] = C64::from(1.0);
    Ok(FieldState { amplitudes: amps, renormalization: 0.0 })
}

/// N₁ = √(2[1 + cos ψ e^{−2|α|²}]).
pub fn cat_normalization(alpha: C64, psi: f64) -> f64 {
    (2.0 * (1.0 + psi.cos() * (-2.0 * alpha.norm_sqr()).exp())).sqrt()
}

/// (|α⟩ + e^{iψ}|−α⟩)/N₁
pub fn cat_state(spec: HilbertSpec, alpha: C64, psi: f64) -> Result<FieldState> {
    spec.check_amplitude(alpha)?;
    let norm = cat_normalization(alpha, psi);
    if !(norm >= 1e-6) {
        return Err(Error::DegenerateState { norm });
    }
    let (plus, missing) = coherent_series(spec.dim, alpha);
    if missing > RENORM_TOL {
        return Err(Error::TruncationTail { correction: missing, dim: spec.dim });
    }
    let phase = C64::from_polar(1.0, psi);
    // |−α⟩ differs from |α⟩ only by (−1)ⁿ.
    let amps = CVector::from_fn(spec.dim, |n, _| {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        (plus[n] + phase * plus[n] * sign) / norm
    });
    let actual = amps.norm();
    Ok(FieldState { amplitudes: amps / C64::from(actual), renormalization: (1.0 - actual * actual).abs() })
}

/// |ψ⟩⟨ψ|
pub fn pure_to_density(state: &FieldState) -> DensityOperator {
    let v = state.amplitudes();
    DensityOperator { matrix: v * v.adjoint() }
}

/// Σ wᵢ ρᵢ; weights must be nonnegative and sum to one within 1e-12.
pub fn mix(components: &[(f64, DensityOperator)]) -> Result<DensityOperator> {
    let first = components
        .first()
        .ok_or_else(|| Error::Weight("empty mixture".into()))?;
    let dim = first.1.dim();
    if let Some((w, _)) = components.iter().find(|(w, _)| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::Weight(format!("negative or non-finite weight {w}")));
    }
    let total: f64 = components.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Weight(format!("weights sum to {total}")));
    }
    let mut m = CMatrix::zeros(dim, dim);
    for (w, rho) in components {
        if rho.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: rho.dim() });
        }
        m += rho.matrix() * C64::from(*w);
    }
    Ok(DensityOperator { matrix: m })
}

pub fn mix_pure(components: &[(f64, FieldState)]) -> Result<DensityOperator> {
    let densities: Vec<(f64, DensityOperator)> =
        components.iter().map(|(w, s)| (*w, pure_to_density(s))).collect();
    mix(&densities)
}
