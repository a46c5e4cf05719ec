use cqed_core::direct::Variant;
use cqed_core::dynamics::DampingModel;
use cqed_core::fock::{cat_state, coherent_state, fock_state, mix_pure, DensityOperator, HilbertSpec, C64};
use cqed_core::protocol::ProtocolConfig;
use cqed_core::tomo::Binning;
use cqed_core::wigner::{PhaseSpaceGrid, Region};
use serde::{Deserialize, Serialize};

/// Everything an experiment reads. Every field has a default, so `{}` is a
/// valid config; unknown keys are rejected at every level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Field amplitude as `[re, im]`: the coherent injection, or the cat amplitude.
    pub alpha: C64,
    pub state: StateSpec,
    pub protocol: ProtocolConfig,
    pub kappa: f64,
    pub n_thermal: f64,
    /// Fock truncation; chosen from `alpha` when absent.
    pub dim: Option<usize>,
    pub seed: u64,
    /// Phase-space grid; sized to `alpha` when absent.
    pub grid: Option<PhaseSpaceGrid>,
    pub scan: ScanConfig,
    pub tomography: TomographyConfig,
    pub direct: DirectConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            alpha: C64::new(2.0, 0.0),
            state: StateSpec::default(),
            protocol: ProtocolConfig::default(),
            kappa: 1.0,
            n_thermal: 0.0,
            dim: None,
            seed: 1,
            grid: None,
            scan: ScanConfig::default(),
            tomography: TomographyConfig::default(),
            direct: DirectConfig::default(),
        }
    }
}

/// Cavity field fed to the measurement experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateSpec {
    Vacuum,
    Fock { n: usize },
    Coherent,
    Cat {
        #[serde(default)]
        psi: f64,
    },
    /// 50/50 mixture of |α⟩ and |−α⟩.
    Mixture,
    /// Cat after damping for time `t`.
    DampedCat {
        #[serde(default)]
        psi: f64,
        t: f64,
    },
}

impl Default for StateSpec {
    fn default() -> Self {
        StateSpec::Cat { psi: 0.0 }
    }
}

/// Delay or monitoring times: `steps` evenly spaced points on [0, t_max].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub t_max: f64,
    pub steps: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { t_max: 8.0, steps: 81 }
    }
}

impl ScanConfig {
    pub fn times(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![0.0];
        }
        (0..self.steps).map(|k| self.t_max * k as f64 / (self.steps - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TomographyConfig {
    pub angles: usize,
    pub n_per_angle: usize,
    pub binning: Binning,
    pub fringe_region: Option<Region>,
}

impl Default for TomographyConfig {
    fn default() -> Self {
        Self { angles: 72, n_per_angle: 20_000, binning: Binning::default(), fringe_region: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DirectConfig {
    pub variant: Variant,
    /// Atoms per point; exact probabilities only when absent.
    pub n_shots: Option<u64>,
    pub efficiency: f64,
    /// Time between atoms, used only for the pacing warning.
    pub shot_interval: Option<f64>,
}

impl Default for DirectConfig {
    fn default() -> Self {
        Self { variant: Variant::Standard, n_shots: None, efficiency: 1.0, shot_interval: None }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("invalid config: {e}"))
    }

    pub fn validate(&self) -> Result<(), String> {
        let finite = |name: &str, x: f64| if x.is_finite() { Ok(()) } else { Err(format!("{name} must be finite")) };
        finite("alpha", self.alpha.re)?;
        finite("alpha", self.alpha.im)?;
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(format!("kappa must be positive, got {}", self.kappa));
        }
        if !(self.n_thermal >= 0.0 && self.n_thermal.is_finite()) {
            return Err(format!("n_thermal must be nonnegative, got {}", self.n_thermal));
        }
        if let Some(d) = self.dim {
            HilbertSpec::new(d).map_err(|e| e.to_string())?;
        }
        self.protocol.validate().map_err(|e| e.to_string())?;
        if let Some(g) = &self.grid {
            g.validate().map_err(|e| e.to_string())?;
        }
        match self.state {
            StateSpec::Cat { psi } => finite("state.psi", psi)?,
            StateSpec::DampedCat { psi, t } => {
                finite("state.psi", psi)?;
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(format!("state.t must be nonnegative, got {t}"));
                }
            }
            _ => {}
        }
        if !(self.scan.t_max >= 0.0 && self.scan.t_max.is_finite()) || self.scan.steps == 0 {
            return Err("scan needs t_max >= 0 and at least one step".into());
        }
        self.tomography.binning.validate().map_err(|e| e.to_string())?;
        if self.tomography.n_per_angle == 0 {
            return Err("tomography.n_per_angle must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.direct.efficiency) {
            return Err(format!("direct.efficiency must lie in [0, 1], got {}", self.direct.efficiency));
        }
        if self.direct.n_shots == Some(0) {
            return Err("direct.n_shots must be positive".into());
        }
        if let Some(dt) = self.direct.shot_interval {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(format!("direct.shot_interval must be positive, got {dt}"));
            }
        }
        Ok(())
    }

    pub fn model(&self) -> cqed_core::Result<DampingModel> {
        DampingModel::new(self.kappa, self.n_thermal)
    }

    pub fn spec(&self) -> cqed_core::Result<HilbertSpec> {
        match self.dim {
            Some(d) => HilbertSpec::new(d),
            None => {
                let base = HilbertSpec::for_amplitude(self.alpha.norm()).dim();
                let need = match self.state {
                    StateSpec::Fock { n } => n + 10,
                    _ => 0,
                };
                HilbertSpec::new(base.max(need))
            }
        }
    }

    pub fn grid(&self) -> cqed_core::Result<PhaseSpaceGrid> {
        match self.grid {
            Some(g) => Ok(g),
            None => PhaseSpaceGrid::default_for_amplitude(self.alpha.norm()),
        }
    }

    pub fn density(&self) -> cqed_core::Result<DensityOperator> {
        let spec = self.spec()?;
        let a = self.alpha;
        Ok(match self.state {
            StateSpec::Vacuum => DensityOperator::vacuum(spec),
            StateSpec::Fock { n } => fock_state(spec, n)?.to_density(),
            StateSpec::Coherent => coherent_state(spec, a)?.to_density(),
            StateSpec::Cat { psi } => cat_state(spec, a, psi)?.to_density(),
            StateSpec::Mixture => mix_pure(&[(0.5, coherent_state(spec, a)?), (0.5, coherent_state(spec, -a)?)])?,
            StateSpec::DampedCat { psi, t } => {
                cqed_core::dynamics::evolve(&cat_state(spec, a, psi)?.to_density(), &self.model()?, t)?
            }
        })
    }
}
