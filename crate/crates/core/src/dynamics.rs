//! Cavity damping.
//!
//! The field obeys the single-mode amplitude-damping master equation
//!
//! dρ/dt = κ(n̄+1)(âρâ† − ½{â†â, ρ}) + κn̄(â†ρâ − ½{ââ†, ρ})
//!
//! integrated with an adaptive Dormand–Prince 5(4) scheme on the density
//! matrix entries. The generator is applied entrywise: every term is a
//! shifted diagonal, so one evaluation costs O(dim²).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{coherent_state, CMatrix, DensityOperator, HilbertSpec, C64};

/// Planck constant (J s).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380_649e-23;

const RTOL: f64 = 1e-9;
const ATOL: f64 = 1e-13;
const MAX_STEPS: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingModel {
    kappa: f64,
    n_thermal: f64,
}

impl DampingModel {
    pub fn new(kappa: f64, n_thermal: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
        }
        if !(n_thermal >= 0.0 && n_thermal.is_finite()) {
            return Err(Error::Domain(format!("n_thermal must be nonnegative, got {n_thermal}")));
        }
        Ok(Self { kappa, n_thermal })
    }

    pub fn zero_temperature(kappa: f64) -> Result<Self> {
        Self::new(kappa, 0.0)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn n_thermal(&self) -> f64 {
        self.n_thermal
    }

    /// 1/κ
    pub fn dissipation_time(&self) -> f64 {
        1.0 / self.kappa
    }

    /// Lobe amplitude of a coherent state after `t` at zero temperature.
    pub fn damped_amplitude(&self, alpha: C64, t: f64) -> C64 {
        alpha * (-0.5 * self.kappa * t).exp()
    }
}

/// Uniform sampling of [t_start, t_end] with `steps` intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, steps: usize) -> Result<Self> {
        if !(t_start >= 0.0 && t_end > t_start && t_end.is_finite()) || steps == 0 {
            return Err(Error::Domain(format!(
                "invalid time grid [{t_start}, {t_end}] with {steps} steps"
            )));
        }
        Ok(Self { t_start, t_end, steps })
    }

    pub fn times(&self) -> Vec<f64> {
        let h = (self.t_end - self.t_start) / self.steps as f64;
        (0..=self.steps).map(|k| self.t_start + h * k as f64).collect()
    }
}

/// Entrywise action of the damping generator.
fn generator(rho: &CMatrix, model: &DampingModel, out: &mut CMatrix) {
    let dim = rho.nrows();
    let down = model.kappa * (model.n_thermal + 1.0);
    let up = model.kappa * model.n_thermal;
    // Truncated ââ† = diag(1, 2, …, dim−1, 0), consistent with â†ρâ so the trace is conserved.
    let aad = |k: usize| if k + 1 < dim { (k + 1) as f64 } else { 0.0 };
    for n in 0..dim {
        for m in 0..dim {
            let mut v = -0.5 * down * (m + n) as f64 * rho[(m, n)];
            if m + 1 < dim && n + 1 < dim {
                v += down * (((m + 1) * (n + 1)) as f64).sqrt() * rho[(m + 1, n + 1)];
            }
            if up > 0.0 {
                v -= 0.5 * up * (aad(m) + aad(n)) * rho[(m, n)];
                if m >= 1 && n >= 1 {
                    v += up * ((m * n) as f64).sqrt() * rho[(m - 1, n - 1)];
                }
            }
            out[(m, n)] = v;
        }
    }
}

// Dormand–Prince 5(4) tableau. The generator is autonomous, so the nodes cᵢ never appear.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Differences between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combo(base: &CMatrix, h: f64, terms: &[(f64, &CMatrix)]) -> CMatrix {
    let mut out = base.clone();
    for (coef, k) in terms {
        if *coef != 0.0 {
            out.zip_apply(k, |o, kv| *o += kv * (h * coef));
        }
    }
    out
}

/// Integrates from 0 to `t`, returning the raw matrix.
fn integrate(rho: &CMatrix, model: &DampingModel, t: f64) -> Result<CMatrix> {
    let dim = rho.nrows();
    let mut y = rho.clone();
    if t == 0.0 {
        return Ok(y);
    }
    let rate = model.kappa * (model.n_thermal + 1.0) * dim as f64;
    let mut h = (1.0 / rate).min(t);
    let mut time = 0.0;
    let mut k1 = CMatrix::zeros(dim, dim);
    generator(&y, model, &mut k1);
    let mut k2 = CMatrix::zeros(dim, dim);
    let mut k3 = CMatrix::zeros(dim, dim);
    let mut k4 = CMatrix::zeros(dim, dim);
    let mut k5 = CMatrix::zeros(dim, dim);
    let mut k6 = CMatrix::zeros(dim, dim);
    let mut k7 = CMatrix::zeros(dim, dim);
    let mut steps = 0usize;
    while time < t {
        if steps >= MAX_STEPS {
            return Err(Error::Integration(format!("step budget exhausted at t = {time}")));
        }
        steps += 1;
        let last = time + h >= t;
        if last {
            h = t - time;
        }
        generator(&combo(&y, h, &[(A21, &k1)]), model, &mut k2);
        generator(&combo(&y, h, &[(A31, &k1), (A32, &k2)]), model, &mut k3);
        generator(&combo(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]), model, &mut k4);
        generator(&combo(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]), model, &mut k5);
        generator(
            &combo(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            model,
            &mut k6,
        );
        let y_new = combo(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        generator(&y_new, model, &mut k7);

        let mut err: f64 = 0.0;
        for idx in 0..y.len() {
            let e = (k1[idx] * E1 + k3[idx] * E3 + k4[idx] * E4 + k5[idx] * E5 + k6[idx] * E6
                + k7[idx] * E7)
                * h;
            let scale = ATOL + RTOL * y[idx].norm().max(y_new[idx].norm());
            err = err.max(e.norm() / scale);
        }
        if !err.is_finite() {
            return Err(Error::Integration(format!("non-finite error estimate at t = {time}")));
        }
        if err <= 1.0 {
            time = if last { t } else { time + h };
            y = y_new;
            std::mem::swap(&mut k1, &mut k7);
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < 1e-14 * t.max(1.0) {
            return Err(Error::Integration(format!("step size underflow at t = {time}")));
        }
    }
    Ok(y)
}

/// ρ(t) under the damping generator.
pub fn evolve(rho: &DensityOperator, model: &DampingModel, t: f64) -> Result<DensityOperator> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("evolution time must be nonnegative, got {t}")));
    }
    let m = integrate(rho.matrix(), model, t)?;
    Ok(DensityOperator::from_matrix_unchecked(m))
}

/// States at each of the sorted `times`, integrating segment by segment.
pub fn trajectory(
    rho: &DensityOperator,
    model: &DampingModel,
    times: &[f64],
) -> Result<Vec<DensityOperator>> {
    let mut out = Vec::with_capacity(times.len());
    let mut current = rho.clone();
    let mut now = 0.0;
    for &t in times {
        if !(t >= now) {
            return Err(Error::Domain("times must be sorted and nonnegative".into()));
        }
        current = evolve(&current, model, t - now)?;
        now = t;
        out.push(current.clone());
    }
    Ok(out)
}

/// Interference coefficient of a two-lobe state on |±α⟩, in [0, 1].
///
/// Writes the projection of ρ onto span{|α⟩, |−α⟩} as Σ Cᵢⱼ|vᵢ⟩⟨vⱼ| by
/// inverting the Gram matrix of the (non-orthogonal) lobes, and returns
/// |C₁₂|/√(C₁₁C₂₂). A freshly prepared cat gives 1, a statistical mixture
/// of the lobes gives 0. For a damped cat `alpha` should be the current
/// lobe amplitude (see [`DampingModel::damped_amplitude`]).
pub fn cat_coherence(rho: &DensityOperator, alpha: C64) -> Result<f64> {
    let spec = rho.spec();
    let plus = coherent_state(spec, alpha)?;
    let minus = coherent_state(spec, -alpha)?;
    let g = plus.inner(&minus);
    let det = 1.0 - g.norm_sqr();
    if det < 1e-6 {
        return Err(Error::Domain(format!("lobes at alpha = {alpha} are not distinguishable")));
    }
    let m11 = rho.matrix_element(&plus, &plus);
    let m12 = rho.matrix_element(&plus, &minus);
    let m21 = rho.matrix_element(&minus, &plus);
    let m22 = rho.matrix_element(&minus, &minus);
    // G⁻¹ = [[1, −g], [−g*, 1]] / det
    let gi = [[C64::from(1.0), -g], [-g.conj(), C64::from(1.0)]];
    let m = [[m11, m12], [m21, m22]];
    let mut c = [[C64::from(0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = C64::from(0.0);
            for k in 0..2 {
                for l in 0..2 {
                    acc += gi[i][k] * m[k][l] * gi[l][j];
                }
            }
            c[i][j] = acc / (det * det);
        }
    }
    let diag = (c[0][0].re * c[1][1].re).max(0.0).sqrt();
    if diag == 0.0 {
        return Ok(0.0);
    }
    Ok((c[0][1].norm() / diag).min(1.0))
}

/// Dissipation time divided by twice the mean photon number.
pub fn decoherence_time(model: &DampingModel, mean_n: f64) -> Result<f64> {
    if !(mean_n > 0.0 && mean_n.is_finite()) {
        return Err(Error::Domain(format!("mean photon number must be positive, got {mean_n}")));
    }
    Ok(model.dissipation_time() / (2.0 * mean_n))
}

/// Thermal de Broglie wavelength h/√(2π m k_B T).
pub fn thermal_wavelength(mass: f64, temperature: f64) -> Result<f64> {
    if !(mass > 0.0 && temperature > 0.0 && mass.is_finite() && temperature.is_finite()) {
        return Err(Error::Domain("mass and temperature must be positive".into()));
    }
    Ok(PLANCK / (2.0 * std::f64::consts::PI * mass * BOLTZMANN * temperature).sqrt())
}

/// (d/λ_dB)², the dimensionless size of a spatial superposition.
pub fn separation_measure(d: f64, mass: f64, temperature: f64) -> Result<f64> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::Domain(format!("separation must be positive, got {d}")));
    }
    let lambda = thermal_wavelength(mass, temperature)?;
    Ok((d / lambda).powi(2))
}

/// Least-squares slope of ln(values) against time, returned as a positive decay rate.
pub fn fit_decay_rate(times: &[f64], values: &[f64]) -> Result<f64> {
    if times.len() != values.len() || times.len() < 2 {
        return Err(Error::Domain("need at least two (time, value) pairs".into()));
    }
    if values.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Domain("log fit needs positive values".into()));
    }
    let n = times.len() as f64;
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mt = times.iter().sum::<f64>() / n;
    let ml = logs.iter().sum::<f64>() / n;
    let sxy: f64 = times.iter().zip(&logs).map(|(t, l)| (t - mt) * (l - ml)).sum();
    let sxx: f64 = times.iter().map(|t| (t - mt).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("degenerate time samples".into()));
    }
    Ok(-sxy / sxx)
}

/// One row of an exported coherence trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub coherence: f64,
    pub mean_n: f64,
    pub trace_error: f64,
}

/// Evolves `cat` (a two-lobe state at amplitude `alpha`) and samples the
/// witness, energy and trace drift at each time.
pub fn coherence_trajectory(
    cat: &DensityOperator,
    alpha: C64,
    model: &DampingModel,
    times: &[f64],
) -> Result<Vec<TrajectoryPoint>> {
    let states = trajectory(cat, model, times)?;
    times
        .iter()
        .zip(&states)
        .map(|(&t, rho)| {
            Ok(TrajectoryPoint {
                t,
                coherence: cat_coherence(rho, model.damped_amplitude(alpha, t))?,
                mean_n: rho.mean_photon_number(),
                trace_error: (rho.trace() - C64::from(1.0)).norm(),
            })
        })
        .collect()
}

/// Sample count used by [`fitted_coherence_time`].
pub const COHERENCE_FIT_SAMPLES: usize = 9;

/// Fitted e-folding time of the cat interference coefficient.
///
/// The fit is log-linear over the onset window [0, t_dec/4], where
/// t_dec = [`decoherence_time`] at n̄ = |α|².
pub fn fitted_coherence_time(alpha: C64, psi: f64, model: &DampingModel) -> Result<f64> {
    let spec = HilbertSpec::for_amplitude(alpha.norm());
    let cat = crate::fock::cat_state(spec, alpha, psi)?.to_density();
    let window = decoherence_time(model, alpha.norm_sqr())? / 4.0;
    let times: Vec<f64> = (0..COHERENCE_FIT_SAMPLES)
        .map(|k| window * k as f64 / (COHERENCE_FIT_SAMPLES - 1) as f64)
        .collect();
    let points = coherence_trajectory(&cat, alpha, model, &times)?;
    let values: Vec<f64> = points.iter().map(|p| p.coherence).collect();
    Ok(1.0 / fit_decay_rate(&times, &values)?)
}
