//! Phase-space representations of the field.
//!
//! Coordinates are α = (q₁ + iq₂)/√2 with q₁ = q, q₂ = p and [q̂, p̂] = i.
//! W is α-normalized: W(α) = 2·Tr[ρ D(α) 𝒫 D(α)†], so |W| ≤ 2 and
//! ∫ d²α/π W = 1. The position-space density W_qp of Wigner's formula is
//! W/(2π).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{quadrature_p, quadrature_q, CMatrix, DensityOperator, FieldState, HilbertSpec, C64};
use crate::hermite::{hermite_functions, GaussHermite};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Largest |α|² accepted by [`wigner_point`]; beyond it e^{−2|α|²} underflows
/// long before any state in a workable truncation has weight there.
pub const WIGNER_ALPHA_SQ_LIMIT: f64 = 170.0;
const RESIDUE_LIMIT: f64 = 1e-6;
const BOUND_SLACK: f64 = 1e-8;
const QUADRATURE_TOL: f64 = 1e-10;
const MAX_NODES: usize = 600;

/// Uniform rectangular grid over (q₁, q₂).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSpaceGrid {
    pub q1_min: f64,
    pub q1_max: f64,
    pub q2_min: f64,
    pub q2_max: f64,
    pub n1: usize,
    pub n2: usize,
}

impl PhaseSpaceGrid {
    pub fn new(q1_min: f64, q1_max: f64, q2_min: f64, q2_max: f64, n1: usize, n2: usize) -> Result<Self> {
        let grid = Self { q1_min, q1_max, q2_min, q2_max, n1, n2 };
        grid.validate()?;
        Ok(grid)
    }

    /// Square grid [−half, half]² with `n` points per axis.
    pub fn square(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, -half_width, half_width, n, n)
    }

    /// Square grid with spacing at most `max_step`.
    pub fn square_with_step(half_width: f64, max_step: f64) -> Result<Self> {
        if !(max_step > 0.0) {
            return Err(Error::Domain(format!("grid step must be positive, got {max_step}")));
        }
        let n = (2.0 * half_width / max_step).ceil() as usize + 1;
        Self::square(half_width, n)
    }

    /// Figure-class default for states whose lobes sit at |α| ≤ `max_alpha`:
    /// the lobe at q = √2|α| plus four units of margin, step ≤ 0.075.
    pub fn default_for_amplitude(max_alpha: f64) -> Result<Self> {
        Self::square_with_step(std::f64::consts::SQRT_2 * max_alpha.abs() + 4.0, 0.075)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.q1_min, self.q1_max, self.q2_min, self.q2_max].iter().all(|v| v.is_finite());
        if !finite || self.q1_max <= self.q1_min || self.q2_max <= self.q2_min {
            return Err(Error::Domain("grid bounds must be finite with max > min".into()));
        }
        if self.n1 < 2 || self.n2 < 2 {
            return Err(Error::Domain("grid needs at least two points per axis".into()));
        }
        Ok(())
    }

    pub fn step1(&self) -> f64 {
        (self.q1_max - self.q1_min) / (self.n1 - 1) as f64
    }

    pub fn step2(&self) -> f64 {
        (self.q2_max - self.q2_min) / (self.n2 - 1) as f64
    }

    pub fn q1(&self, i: usize) -> f64 {
        self.q1_min + i as f64 * self.step1()
    }

    pub fn q2(&self, j: usize) -> f64 {
        self.q2_min + j as f64 * self.step2()
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// α at grid point (i, j).
    pub fn alpha(&self, i: usize, j: usize) -> C64 {
        C64::new(self.q1(i), self.q2(j)) / std::f64::consts::SQRT_2
    }

    /// Largest distance from the origin to a grid corner.
    pub fn corner_radius(&self) -> f64 {
        let x = self.q1_min.abs().max(self.q1_max.abs());
        let y = self.q2_min.abs().max(self.q2_max.abs());
        x.hypot(y)
    }
}

/// Axis-aligned sub-rectangle of phase space, e.g. the fringe region of a cat.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub q1_min: f64,
    pub q1_max: f64,
    pub q2_min: f64,
    pub q2_max: f64,
}

impl Region {
    pub fn contains(&self, q1: f64, q2: f64) -> bool {
        (self.q1_min..=self.q1_max).contains(&q1) && (self.q2_min..=self.q2_max).contains(&q2)
    }

    /// Strip between the lobes of a cat with real amplitude: |q₁| ≤ half_width.
    pub fn central_strip(half_width: f64, q2_extent: f64) -> Self {
        Self { q1_min: -half_width, q1_max: half_width, q2_min: -q2_extent, q2_max: q2_extent }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    Computed,
    Reconstructed,
    MeasuredDirect,
}

/// Sampled Wigner function. `values[i * n2 + j]` is W at (q1(i), q2(j)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerMap {
    pub grid: PhaseSpaceGrid,
    pub kind: MapKind,
    pub values: Vec<f64>,
}

/// Bound and normalization diagnostics of a map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapChecks {
    pub max_abs: f64,
    pub within_bound: bool,
    pub normalization: f64,
}

impl WignerMap {
    pub fn from_values(grid: PhaseSpaceGrid, kind: MapKind, values: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid, kind, values })
    }

    /// Evaluates `f(α)` on every grid point.
    pub fn tabulate(
        grid: PhaseSpaceGrid,
        kind: MapKind,
        mut f: impl FnMut(C64) -> Result<f64>,
    ) -> Result<Self> {
        grid.validate()?;
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.n1 {
            for j in 0..grid.n2 {
                values.push(f(grid.alpha(i, j))?);
            }
        }
        Ok(Self { grid, kind, values })
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n2 + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Riemann sum of ∫ d²α/π W.
    pub fn normalization(&self) -> f64 {
        let cell = self.grid.step1() * self.grid.step2() / TWO_PI;
        self.values.iter().sum::<f64>() * cell
    }

    pub fn checks(&self) -> MapChecks {
        let max_abs = self.max_abs();
        MapChecks { max_abs, within_bound: max_abs <= 2.0 + BOUND_SLACK, normalization: self.normalization() }
    }

    fn same_grid(&self, other: &WignerMap) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Domain("maps are sampled on different grids".into()));
        }
        Ok(())
    }

    /// max |self − other| over the common grid.
    pub fn sup_diff(&self, other: &WignerMap) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn rmse(&self, other: &WignerMap) -> Result<f64> {
        self.same_grid(other)?;
        let sum: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).powi(2)).sum();
        Ok((sum / self.values.len() as f64).sqrt())
    }

    /// Bilinear interpolation; `None` outside the grid.
    pub fn interpolate(&self, q1: f64, q2: f64) -> Option<f64> {
        let g = &self.grid;
        let u = (q1 - g.q1_min) / g.step1();
        let v = (q2 - g.q2_min) / g.step2();
        let eps = 1e-9;
        if u < -eps || v < -eps || u > (g.n1 - 1) as f64 + eps || v > (g.n2 - 1) as f64 + eps {
            return None;
        }
        let i = (u.floor().max(0.0) as usize).min(g.n1 - 2);
        let j = (v.floor().max(0.0) as usize).min(g.n2 - 2);
        let fu = u - i as f64;
        let fv = v - j as f64;
        Some(
            (1.0 - fu) * (1.0 - fv) * self.value(i, j)
                + fu * (1.0 - fv) * self.value(i + 1, j)
                + (1.0 - fu) * fv * self.value(i, j + 1)
                + fu * fv * self.value(i + 1, j + 1),
        )
    }

    /// (min, max) of the map over grid points inside `region`.
    pub fn region_extrema(&self, region: &Region) -> Option<(f64, f64)> {
        let mut out: Option<(f64, f64)> = None;
        for i in 0..self.grid.n1 {
            for j in 0..self.grid.n2 {
                if region.contains(self.grid.q1(i), self.grid.q2(j)) {
                    let v = self.value(i, j);
                    out = Some(out.map_or((v, v), |(lo, hi)| (lo.min(v), hi.max(v))));
                }
            }
        }
        out
    }

    /// Peak-to-peak swing of W inside `region`.
    pub fn fringe_contrast(&self, region: &Region) -> Option<f64> {
        self.region_extrema(region).map(|(lo, hi)| hi - lo)
    }

    /// max |self − other| over grid points inside `region`.
    pub fn region_sup_diff(&self, other: &WignerMap, region: &Region) -> Result<f64> {
        self.same_grid(other)?;
        let mut m: f64 = 0.0;
        for i in 0..self.grid.n1 {
            for j in 0..self.grid.n2 {
                if region.contains(self.grid.q1(i), self.grid.q2(j)) {
                    m = m.max((self.value(i, j) - other.value(i, j)).abs());
                }
            }
        }
        Ok(m)
    }
}

fn check_alpha(alpha: C64) -> Result<()> {
    let alpha_sq = alpha.norm_sqr();
    if !alpha_sq.is_finite() || alpha_sq > WIGNER_ALPHA_SQ_LIMIT {
        return Err(Error::Truncation { alpha_sq, limit: WIGNER_ALPHA_SQ_LIMIT });
    }
    Ok(())
}

fn real_part_checked(value: C64) -> Result<f64> {
    let residue = value.im.abs();
    if residue > RESIDUE_LIMIT {
        return Err(Error::NonHermitian(residue));
    }
    Ok(value.re)
}

/// Tr[ρ D(β) 𝒫] using exact matrix elements ⟨m|D(β)|n⟩ on the support of ρ.
///
/// Columns follow from D|0⟩ = |β⟩ and a†D = D(a† + β*):
/// ⟨m|D|n+1⟩ = (√m⟨m−1|D|n⟩ − β*⟨m|D|n⟩)/√(n+1).
fn displaced_parity_trace(rho: &CMatrix, beta: C64) -> C64 {
    let dim = rho.nrows();
    let roots: Vec<f64> = (0..=dim).map(|k| (k as f64).sqrt()).collect();
    let bc = beta.conj();
    let mut col = vec![C64::from(0.0); dim];
    let mut next = vec![C64::from(0.0); dim];
    col[0] = C64::from((-0.5 * beta.norm_sqr()).exp());
    for m in 1..dim {
        col[m] = col[m - 1] * beta / roots[m];
    }
    let mut total = C64::from(0.0);
    for n in 0..dim {
        let mut s = C64::from(0.0);
        for (m, c) in col.iter().enumerate() {
            s += rho[(n, m)] * c;
        }
        if n % 2 == 0 {
            total += s;
        } else {
            total -= s;
        }
        if n + 1 < dim {
            let inv = 1.0 / roots[n + 1];
            next[0] = -bc * col[0] * inv;
            for m in 1..dim {
                next[m] = (col[m - 1] * roots[m] - bc * col[m]) * inv;
            }
            std::mem::swap(&mut col, &mut next);
        }
    }
    total
}

/// W(α) = 2·Tr[ρ D(α) 𝒫 D(α)†], evaluated as 2·Tr[ρ D(2α) 𝒫].
pub fn wigner_point(rho: &DensityOperator, alpha: C64) -> Result<f64> {
    check_alpha(alpha)?;
    real_part_checked(displaced_parity_trace(rho.matrix(), alpha * 2.0) * 2.0)
}

fn position_integral(rho: &CMatrix, q: f64, p: f64, rule: &GaussHermite) -> C64 {
    let dim = rho.nrows();
    let mut total = C64::from(0.0);
    for (&y, &w) in rule.nodes.iter().zip(&rule.weights) {
        let a = hermite_functions(q - y, dim);
        let b = hermite_functions(q + y, dim);
        let mut s = C64::from(0.0);
        for m in 0..dim {
            if a[m] == 0.0 {
                continue;
            }
            let mut row = C64::from(0.0);
            for n in 0..dim {
                row += rho[(m, n)] * b[n];
            }
            s += row * a[m];
        }
        total += s * C64::from_polar(w, 2.0 * p * y);
    }
    total * 2.0
}

/// Wigner's position-space formula, rescaled by 2π to the α-normalization.
///
/// With x = 2y, 2π·W_qp = 2∫ e^{2ipy} ⟨q−y|ρ|q+y⟩ dy. The kets are Hermite
/// functions, so the integrand is e^{−y²} times a polynomial times e^{2ipy};
/// Gauss–Hermite quadrature is refined until two rule sizes agree.
pub fn wigner_position(rho: &DensityOperator, q: f64, p: f64) -> Result<f64> {
    if !(q.is_finite() && p.is_finite()) {
        return Err(Error::Domain("phase-space point must be finite".into()));
    }
    let dim = rho.dim();
    let mut n = dim + 20 + (2.0 * p * p).ceil() as usize;
    if n > MAX_NODES {
        return Err(Error::Quadrature(format!("p = {p} needs more than {MAX_NODES} nodes")));
    }
    let mut previous = position_integral(rho.matrix(), q, p, &GaussHermite::new(n));
    loop {
        let bigger = (n + n / 2 + 10).min(MAX_NODES);
        let current = position_integral(rho.matrix(), q, p, &GaussHermite::new(bigger));
        let change = (current - previous).norm();
        if change <= QUADRATURE_TOL * current.norm().max(1.0) {
            return real_part_checked(current);
        }
        if bigger == MAX_NODES {
            return Err(Error::Quadrature(format!(
                "no convergence at (q, p) = ({q}, {p}): last change {change:e}"
            )));
        }
        n = bigger;
        previous = current;
    }
}

/// Pointwise [`wigner_point`] over `grid`.
pub fn wigner_map(rho: &DensityOperator, grid: &PhaseSpaceGrid) -> Result<WignerMap> {
    WignerMap::tabulate(*grid, MapKind::Computed, |alpha| wigner_point(rho, alpha))
}

/// P(q_θ) = ⟨q_θ|ρ|q_θ⟩ with q_θ = q cosθ + p sinθ and ⟨q_θ|n⟩ = e^{−inθ}φₙ(q_θ).
pub fn marginal_distribution(rho: &DensityOperator, theta: f64, x: f64) -> Result<f64> {
    if !(theta.is_finite() && x.is_finite()) {
        return Err(Error::Domain("angle and quadrature value must be finite".into()));
    }
    let dim = rho.dim();
    let phi = hermite_functions(x, dim);
    let u: Vec<C64> = (0..dim).map(|n| C64::from_polar(phi[n], n as f64 * theta)).collect();
    let m = rho.matrix();
    let mut total = C64::from(0.0);
    for a in 0..dim {
        let mut row = C64::from(0.0);
        for b in 0..dim {
            row += m[(a, b)] * u[b];
        }
        total += u[a].conj() * row;
    }
    Ok(total.re)
}

/// Marginal P(q_θ) at each of `points`.
pub fn marginal_on(rho: &DensityOperator, theta: f64, points: &[f64]) -> Result<Vec<f64>> {
    points.iter().map(|&x| marginal_distribution(rho, theta, x)).collect()
}

/// Integrates W_qp = W/2π along lines q cosθ + p sinθ = x of a sampled map.
///
/// The map is interpolated bilinearly and treated as zero off the grid.
pub fn radon_of_map(map: &WignerMap, theta: f64, points: &[f64]) -> Vec<f64> {
    let g = &map.grid;
    let h = g.step1().min(g.step2());
    let reach = g.corner_radius();
    let steps = (reach / h).ceil() as i64;
    let (s, c) = theta.sin_cos();
    points
        .iter()
        .map(|&x| {
            let mut sum = 0.0;
            for k in -steps..=steps {
                let t = k as f64 * h;
                if let Some(v) = map.interpolate(x * c - t * s, x * s + t * c) {
                    sum += v;
                }
            }
            sum * h / TWO_PI
        })
        .collect()
}

/// qᵐpⁿ in symmetric (Weyl) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub q_pow: u32,
    pub p_pow: u32,
}

impl Monomial {
    pub fn new(q_pow: u32, p_pow: u32) -> Self {
        Self { q_pow, p_pow }
    }

    pub fn degree(&self) -> u32 {
        self.q_pow + self.p_pow
    }

    /// All monomials with 1 ≤ degree ≤ `max_degree`.
    pub fn up_to(max_degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        for d in 1..=max_degree {
            for p in 0..=d {
                out.push(Monomial::new(d - p, p));
            }
        }
        out
    }
}

pub const MOYAL_MAX_DEGREE: u32 = 4;
const MOYAL_DIM_MARGIN: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoyalComparison {
    pub monomial: Monomial,
    /// Tr[ρ {q̂ᵐp̂ⁿ}_sym]
    pub operator_side: f64,
    /// ∫dq dp W_qp qᵐpⁿ
    pub phase_space_side: f64,
    pub discrepancy: f64,
}

/// Average of all distinct orderings of the word q̂ᵐp̂ⁿ.
fn symmetric_word(q: &CMatrix, p: &CMatrix, monomial: Monomial) -> CMatrix {
    let len = monomial.degree() as usize;
    let dim = q.nrows();
    let mut sum = CMatrix::zeros(dim, dim);
    let mut count = 0usize;
    for mask in 0u32..(1u32 << len) {
        if mask.count_ones() != monomial.p_pow {
            continue;
        }
        let mut word = CMatrix::identity(dim, dim);
        for k in 0..len {
            word = if mask & (1 << k) != 0 { word * p } else { word * q };
        }
        sum += word;
        count += 1;
    }
    sum / C64::from(count as f64)
}

/// Highest Fock level carrying non-negligible population.
fn effective_top_level(rho: &DensityOperator) -> usize {
    let m = rho.matrix();
    (0..rho.dim()).rev().find(|&n| m[(n, n)].re > 1e-24).unwrap_or(0)
}

/// Both sides of the Moyal identity ⟨{q̂ᵐp̂ⁿ}_sym⟩ = ∫dq dp W_qp qᵐpⁿ for
/// every monomial in `monomials`, sharing one phase-space tabulation.
pub fn moyal_averages(rho: &DensityOperator, monomials: &[Monomial]) -> Result<Vec<MoyalComparison>> {
    if let Some(m) = monomials.iter().find(|m| m.degree() > MOYAL_MAX_DEGREE) {
        return Err(Error::Domain(format!(
            "symmetric words are supported up to degree {MOYAL_MAX_DEGREE}, got {}",
            m.degree()
        )));
    }
    let big = HilbertSpec::new(rho.dim() + MOYAL_DIM_MARGIN)?;
    let embedded = rho.resized(big.dim())?;
    let q_op = quadrature_q(big).matrix().clone();
    let p_op = quadrature_p(big).matrix().clone();

    // Trapezoid rule: the integrand is entire and Gaussian-damped, so the
    // error is spectrally small once the step resolves the fringes. Only the
    // disc of radius `half` is tabulated; the square's corners lie further
    // outside the classical turning circle than the margin already allows.
    let half = (2.0 * effective_top_level(rho) as f64 + 1.0).sqrt() + 6.0;
    let step = 0.125;
    let n = (2.0 * half / step).ceil() as usize + 1;
    let grid = PhaseSpaceGrid::square(half, n)?;
    let disc = half * half / 2.0;
    let map = WignerMap::tabulate(grid, MapKind::Computed, |alpha| {
        if alpha.norm_sqr() > disc {
            Ok(0.0)
        } else {
            wigner_point(rho, alpha)
        }
    })?;
    let cell = grid.step1() * grid.step2() / TWO_PI;

    monomials
        .iter()
        .map(|&monomial| {
            let word = symmetric_word(&q_op, &p_op, monomial);
            let operator_side = (embedded.matrix() * word).trace().re;
            let mut integral = 0.0;
            for i in 0..grid.n1 {
                let q = grid.q1(i);
                let qm = q.powi(monomial.q_pow as i32);
                for j in 0..grid.n2 {
                    let p = grid.q2(j);
                    integral += map.value(i, j) * qm * p.powi(monomial.p_pow as i32);
                }
            }
            let phase_space_side = integral * cell;
            Ok(MoyalComparison {
                monomial,
                operator_side,
                phase_space_side,
                discrepancy: (operator_side - phase_space_side).abs(),
            })
        })
        .collect()
}

pub fn moyal_average(rho: &DensityOperator, monomial: Monomial) -> Result<MoyalComparison> {
    Ok(moyal_averages(rho, &[monomial])?.remove(0))
}

/// Diagonal of ρ in the Fock basis.
pub fn photon_number_distribution(rho: &DensityOperator) -> Vec<f64> {
    let m = rho.matrix();
    (0..rho.dim()).map(|n| m[(n, n)].re).collect()
}

/// Two states with equal position and momentum marginals but different W.
#[derive(Debug, Clone)]
pub struct PauliPair {
    /// (|0⟩ + i|2⟩)/√2
    pub state_a: FieldState,
    /// (|0⟩ − i|2⟩)/√2
    pub state_b: FieldState,
    pub evidence: PauliEvidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliEvidence {
    /// sup over θ ∈ {0, π/2} and the reference points of |P_a − P_b|.
    pub marginal_deviation: f64,
    /// sup |P_a − P_b| at θ = π/4.
    pub diagonal_marginal_deviation: f64,
    /// sup |W_a − W_b| on the reference grid.
    pub wigner_deviation: f64,
}

/// Quadrature points used as the reference set for marginal comparisons.
pub fn reference_points() -> Vec<f64> {
    (0..=240).map(|k| -6.0 + 0.05 * k as f64).collect()
}

pub fn pauli_counterexample(spec: HilbertSpec) -> Result<PauliPair> {
    if spec.dim() < 3 {
        return Err(Error::Dimension(spec.dim()));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let build = |sign: f64| {
        let mut amps = crate::fock::CVector::zeros(spec.dim());
        amps[0] = C64::new(r, 0.0);
        amps[2] = C64::new(0.0, sign * r);
        FieldState::from_amplitudes(amps)
    };
    let state_a = build(1.0)?;
    let state_b = build(-1.0)?;
    let rho_a = state_a.to_density();
    let rho_b = state_b.to_density();
    let points = reference_points();
    let deviation = |theta: f64| -> Result<f64> {
        let a = marginal_on(&rho_a, theta, &points)?;
        let b = marginal_on(&rho_b, theta, &points)?;
        Ok(a.iter().zip(&b).fold(0.0, |m, (x, y)| m.max((x - y).abs())))
    };
    let marginal_deviation = deviation(0.0)?.max(deviation(std::f64::consts::FRAC_PI_2)?);
    let diagonal_marginal_deviation = deviation(std::f64::consts::FRAC_PI_4)?;
    let grid = PhaseSpaceGrid::square(4.0, 81)?;
    let wigner_deviation = wigner_map(&rho_a, &grid)?.sup_diff(&wigner_map(&rho_b, &grid)?)?;
    Ok(PauliPair {
        state_a,
        state_b,
        evidence: PauliEvidence { marginal_deviation, diagonal_marginal_deviation, wigner_deviation },
    })
}
