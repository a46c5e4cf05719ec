//! Direct Wigner measurement with a probe atom.
//!
//! A classical source injects D(α) into the cavity, then an atom in |e⟩
//! crosses R1, the cavity (conditional phase φ = π) and R2 before detection.
//! The Born probabilities satisfy 2(P_g − P_e) = ⟨𝒫⟩ of the displaced field
//! times two, which is W(−α) of the field before injection.
//!
//! Injection is simulated in an enlarged Fock space so that the displaced
//! state is not clipped by the cutoff of ρ₀.

use nalgebra::SymmetricEigen;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, fit_decay_rate, decoherence_time, DampingModel};
use crate::error::{Error, Result};
use crate::fock::{cat_state, displace_vector, DensityOperator, FieldState, HilbertSpec, C64};
use crate::protocol::{
    detect_atom, probe_field, probe_sequence, AtomState, CavityInteraction, JointState, ProtocolConfig,
};
use crate::tomo::seeded_rng;
use crate::wigner::{MapKind, PhaseSpaceGrid, WignerMap, WIGNER_ALPHA_SQ_LIMIT};

/// Amplitude tolerance used to size the enlarged injection space.
const LEAK_AMPLITUDE: f64 = 1e-13;
const MAX_INJECTION_DIM: usize = 4000;
const EIGEN_FLOOR: f64 = 1e-16;

/// Which conditional interaction realizes the parity readout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Dispersive e^{iφn̂} with φ = π on |e⟩ only.
    Standard,
    /// Opposite shifts φ = π/2 on both levels, compensated by η = π/2 in R2.
    Brune,
    /// Resonant 2π Rabi cycle; only valid on the {0, 1} photon subspace.
    #[serde(rename = "resonant-2pi")]
    Resonant2Pi,
}

impl Variant {
    fn interaction(self) -> CavityInteraction {
        match self {
            Variant::Standard => CavityInteraction::Dispersive,
            Variant::Brune => CavityInteraction::Brune,
            Variant::Resonant2Pi => CavityInteraction::Resonant2Pi,
        }
    }

    fn config(self, base: &ProtocolConfig) -> Result<ProtocolConfig> {
        base.validate()?;
        match self {
            Variant::Standard => {
                base.require_pi_shift()?;
                Ok(*base)
            }
            Variant::Brune => Ok(ProtocolConfig { ramsey_phase: base.ramsey_phase, ..ProtocolConfig::brune() }),
            Variant::Resonant2Pi => Ok(*base),
        }
    }
}

/// One point of a direct measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    /// Injected amplitude.
    pub alpha: C64,
    pub p_e: f64,
    pub p_g: f64,
    /// Zero for exact records.
    pub n_shots: u64,
    pub n_detected: u64,
    /// 2(P_g − P_e), exact or estimated from detected atoms.
    pub estimate: f64,
    pub stderr: f64,
}

/// Dimension large enough that D(α) applied to ρ₀ leaks less than
/// ~1e−13 in amplitude past the cutoff.
///
/// D(α)|n⟩ is concentrated on √m ∈ √n ± |α| with a Gaussian tail in
/// √m − √n − |α|, so each level contributes √ρₙₙ·exp(−(√m − √n − |α|)²).
pub fn injection_dim(rho: &DensityOperator, alpha: C64) -> usize {
    let m = rho.matrix();
    let radius = alpha.norm();
    let mut needed = 0.0f64;
    for n in 0..rho.dim() {
        let weight = m[(n, n)].re.max(0.0).sqrt();
        if weight <= LEAK_AMPLITUDE {
            continue;
        }
        let tail = (weight / LEAK_AMPLITUDE).ln().sqrt();
        needed = needed.max(((n as f64).sqrt() + radius + tail + 1.0).powi(2));
    }
    rho.dim().max(needed.ceil() as usize)
}

/// Exact (P_e, P_g) after injecting α into ρ₀ and running the probe atom.
fn injected_probabilities(
    rho: &DensityOperator,
    alpha: C64,
    interaction: CavityInteraction,
    config: &ProtocolConfig,
) -> Result<(f64, f64)> {
    let alpha_sq = alpha.norm_sqr();
    if !alpha_sq.is_finite() || alpha_sq > WIGNER_ALPHA_SQ_LIMIT {
        return Err(Error::Truncation { alpha_sq, limit: WIGNER_ALPHA_SQ_LIMIT });
    }
    if alpha == C64::from(0.0) {
        let det = probe_field(rho, interaction, config)?;
        return Ok((det.p_e(), det.p_g()));
    }
    let ext = injection_dim(rho, alpha);
    if ext > MAX_INJECTION_DIM {
        return Err(Error::Truncation { alpha_sq, limit: WIGNER_ALPHA_SQ_LIMIT });
    }
    // ρ₀ = Σ λₖ|ψₖ⟩⟨ψₖ|; every component is displaced and probed as a pure state.
    let eig = SymmetricEigen::new(rho.matrix().clone());
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let (mut p_e, mut p_g, mut weight) = (0.0, 0.0, 0.0);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= EIGEN_FLOOR * top {
            continue;
        }
        let component = FieldState::from_amplitudes(eig.eigenvectors.column(k).into_owned())?.resized(ext)?;
        let displaced = FieldState::from_amplitudes(displace_vector(component.amplitudes(), alpha))?;
        let joint = JointState::product(AtomState::excited(), &displaced);
        let det = detect_atom(&probe_sequence(&joint, interaction, config)?);
        p_e += lambda * det.p_e();
        p_g += lambda * det.p_g();
        weight += lambda;
    }
    Ok((p_e / weight, p_g / weight))
}

fn exact_record(alpha: C64, p_e: f64, p_g: f64) -> MeasurementRecord {
    MeasurementRecord { alpha, p_e, p_g, n_shots: 0, n_detected: 0, estimate: 2.0 * (p_g - p_e), stderr: 0.0 }
}

/// Exact probabilities for injection α with the standard φ = π readout.
pub fn direct_point_exact(rho: &DensityOperator, alpha: C64, config: &ProtocolConfig) -> Result<MeasurementRecord> {
    variant_check(rho, Variant::Standard, alpha, config)
}

/// Exact probabilities under one of the readout variants.
pub fn variant_check(
    rho: &DensityOperator,
    variant: Variant,
    alpha: C64,
    config: &ProtocolConfig,
) -> Result<MeasurementRecord> {
    let config = variant.config(config)?;
    if variant == Variant::Resonant2Pi && alpha != C64::from(0.0) {
        return Err(Error::Domain("the resonant variant is only defined at alpha = 0".into()));
    }
    let (p_e, p_g) = injected_probabilities(rho, alpha, variant.interaction(), &config)?;
    Ok(exact_record(alpha, p_e, p_g))
}

/// Shot-by-shot simulation: each atom is detected with probability
/// `efficiency`, and detected atoms give e or g with the exact Born
/// probabilities. Missed atoms are simply discarded.
pub fn direct_point_sampled(
    rho: &DensityOperator,
    alpha: C64,
    n_shots: u64,
    efficiency: f64,
    seed: u64,
    config: &ProtocolConfig,
) -> Result<MeasurementRecord> {
    let exact = direct_point_exact(rho, alpha, config)?;
    sample_record(&exact, n_shots, efficiency, &mut seeded_rng(seed, 0))
}

/// Shot simulation from already computed exact probabilities, drawing from
/// stream `stream` of `seed`. Scans use the grid index as the stream.
pub fn sample_from_exact(
    exact: &MeasurementRecord,
    n_shots: u64,
    efficiency: f64,
    seed: u64,
    stream: u64,
) -> Result<MeasurementRecord> {
    sample_record(exact, n_shots, efficiency, &mut seeded_rng(seed, stream))
}

fn sample_record(
    exact: &MeasurementRecord,
    n_shots: u64,
    efficiency: f64,
    rng: &mut impl Rng,
) -> Result<MeasurementRecord> {
    if n_shots == 0 {
        return Err(Error::Domain("need at least one shot".into()));
    }
    if !(0.0..=1.0).contains(&efficiency) {
        return Err(Error::Domain(format!("efficiency {efficiency} outside [0, 1]")));
    }
    let (mut n_g, mut n_e) = (0u64, 0u64);
    for _ in 0..n_shots {
        let detected = rng.random::<f64>() < efficiency;
        let ground = rng.random::<f64>() < exact.p_g;
        if detected {
            if ground {
                n_g += 1;
            } else {
                n_e += 1;
            }
        }
    }
    let n_detected = n_g + n_e;
    if n_detected == 0 {
        return Err(Error::NoDetection { shots: n_shots });
    }
    let mean = (n_g as f64 - n_e as f64) / n_detected as f64;
    Ok(MeasurementRecord {
        n_shots,
        n_detected,
        estimate: 2.0 * mean,
        stderr: 2.0 * ((1.0 - mean * mean).max(0.0) / n_detected as f64).sqrt(),
        ..*exact
    })
}

/// Direct map of W over `grid`: the point β is read out by injecting −β.
pub fn scan_map(rho: &DensityOperator, grid: &PhaseSpaceGrid, config: &ProtocolConfig) -> Result<WignerMap> {
    scan_map_variant(rho, grid, Variant::Standard, config)
}

pub fn scan_map_variant(
    rho: &DensityOperator,
    grid: &PhaseSpaceGrid,
    variant: Variant,
    config: &ProtocolConfig,
) -> Result<WignerMap> {
    WignerMap::tabulate(*grid, MapKind::MeasuredDirect, |beta| {
        Ok(variant_check(rho, variant, -beta, config)?.estimate)
    })
}

/// Shot budget for the optional sampled trace of [`monitor_origin`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingPlan {
    pub n_shots: u64,
    pub efficiency: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorPoint {
    pub t: f64,
    pub exact: MeasurementRecord,
    pub sampled: Option<MeasurementRecord>,
}

/// W(0) of the damped field at each time, read out with α = 0.
///
/// The sampled trace at time index k draws from stream k of the plan's seed.
pub fn monitor_origin(
    rho: &DensityOperator,
    model: &DampingModel,
    times: &[f64],
    config: &ProtocolConfig,
    sampling: Option<&SamplingPlan>,
) -> Result<Vec<MonitorPoint>> {
    if times.iter().any(|t| !(*t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("monitor times must be sorted and nonnegative".into()));
    }
    let origin = C64::from(0.0);
    let mut state = rho.clone();
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        if t > now {
            state = evolve(&state, model, t - now)?;
            now = t;
        }
        let exact = direct_point_exact(&state, origin, config)?;
        let sampled = match sampling {
            Some(plan) => {
                Some(sample_record(&exact, plan.n_shots, plan.efficiency, &mut seeded_rng(plan.seed, k as u64))?)
            }
            None => None,
        };
        out.push(MonitorPoint { t, exact, sampled });
    }
    Ok(out)
}

/// Samples in the onset window used by [`origin_collapse_time`].
pub const COLLAPSE_FIT_SAMPLES: usize = 9;

/// Collapse time of W(0) for the even cat of amplitude α.
///
/// The origin is monitored over [0, t_dec/4] and 1/rate is taken from a
/// log-linear fit, the same onset window used for the coherence fit.
pub fn origin_collapse_time(alpha: C64, model: &DampingModel, config: &ProtocolConfig) -> Result<f64> {
    let t_dec = decoherence_time(model, alpha.norm_sqr())?;
    let spec = HilbertSpec::for_amplitude(alpha.norm());
    let cat = cat_state(spec, alpha, 0.0)?.to_density();
    let times: Vec<f64> = (0..COLLAPSE_FIT_SAMPLES)
        .map(|k| 0.25 * t_dec * k as f64 / (COLLAPSE_FIT_SAMPLES - 1) as f64)
        .collect();
    let series = monitor_origin(&cat, model, &times, config, None)?;
    let values: Vec<f64> = series.iter().map(|p| p.exact.estimate).collect();
    Ok(1.0 / fit_decay_rate(&times, &values)?)
}

/// Warns when atoms are detected too rarely to follow the decoherence.
///
/// With one atom sent every `shot_interval` and detection efficiency η, a
/// detected atom arrives every `shot_interval/η` on average; if that exceeds
/// the decoherence time the field changes between useful shots.
pub fn pacing_warning(shot_interval: f64, efficiency: f64, t_dec: f64) -> Option<String> {
    if efficiency <= 0.0 {
        return Some("efficiency is zero: no atom will ever be detected".into());
    }
    let spacing = shot_interval / efficiency;
    (spacing > t_dec).then(|| {
        format!("detected atoms arrive every {spacing:.3e} on average, longer than the decoherence time {t_dec:.3e}")
    })
}
