//! Run configuration: the single schema behind both the CLI flags and the
//! `run --config` JSON input. Unknown keys are rejected.

use ductmodes::error::Error as CoreError;
use ductmodes::sweep::Quantity;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Modes,
    Ep,
    Encircle,
    Nonortho,
    Junction,
    Power,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    #[default]
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantityArg {
    GammaRe,
    GammaIm,
    Kp,
    SijRe,
    SijIm,
}

impl From<QuantityArg> for Quantity {
    fn from(q: QuantityArg) -> Quantity {
        match q {
            QuantityArg::GammaRe => Quantity::GammaRe,
            QuantityArg::GammaIm => Quantity::GammaIm,
            QuantityArg::Kp => Quantity::Kp,
            QuantityArg::SijRe => Quantity::SijRe,
            QuantityArg::SijIm => Quantity::SijIm,
        }
    }
}

fn default_k() -> f64 {
    30.0
}

fn default_n_modes() -> usize {
    50
}

/// Everything one invocation needs. Serialized verbatim into the output
/// envelope, so re-running a parsed config reproduces the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default = "default_k")]
    pub k: f64,
    #[serde(default)]
    pub m: u32,
    #[serde(default)]
    pub beta_re: f64,
    #[serde(default)]
    pub beta_im: f64,
    /// Impedance input Z0 (mutually exclusive with beta_re/beta_im).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_re: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_im: Option<f64>,
    /// beta0 -> infinity proxy (pressure release) for mode families.
    #[serde(default)]
    pub pressure_release: bool,
    #[serde(default = "default_n_modes")]
    pub n_modes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
    /// Number of EPs (ep command).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    /// Surface classification threshold on Im(gamma).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface_threshold: Option<f64>,
    /// Sweep window and resolution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub re_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub re_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub re_resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im_resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantity: Option<QuantityArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sij_i: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sij_j: Option<usize>,
    /// Axial grid (power command).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_points: Option<usize>,
    /// Apply the azimuthal constant (2 pi for m = 0, pi otherwise) to powers.
    #[serde(default)]
    pub azimuthal_factor: bool,
    /// Encircling loop nodes as [re, im] pairs; defaults to the rectangle
    /// around the first EP when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loop_nodes: Option<Vec<[f64; 2]>>,
    /// Which EP (by pair index) the encircle command targets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ep_index: Option<usize>,
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        RunConfig {
            command,
            k: default_k(),
            m: 0,
            beta_re: 0.0,
            beta_im: 0.0,
            z_re: None,
            z_im: None,
            pressure_release: false,
            n_modes: default_n_modes(),
            output_path: None,
            format: OutputFormat::default(),
            count: None,
            surface_threshold: None,
            re_min: None,
            re_max: None,
            im_min: None,
            im_max: None,
            re_resolution: None,
            im_resolution: None,
            quantity: None,
            sij_i: None,
            sij_j: None,
            z_max: None,
            z_points: None,
            azimuthal_factor: false,
            loop_nodes: None,
            ep_index: None,
        }
    }

    /// Wall admittance after resolving the impedance alternative.
    pub fn beta0(&self) -> Result<Complex64, String> {
        match (self.z_re, self.z_im) {
            (None, None) => Ok(Complex64::new(self.beta_re, self.beta_im)),
            (Some(re), Some(im)) => {
                if self.beta_re != 0.0 || self.beta_im != 0.0 {
                    return Err("give either beta or Z, not both".into());
                }
                let z = Complex64::new(re, im);
                if z.norm() == 0.0 {
                    return Err("Z = 0 is the pressure-release limit; use pressure_release".into());
                }
                Ok(1.0 / z)
            }
            _ => Err("z_re and z_im must be given together".into()),
        }
    }

    /// Validate invariants that hold for every command.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(format!("K must be finite and positive, got {}", self.k));
        }
        if self.n_modes == 0 {
            return Err("n_modes must be >= 1".into());
        }
        self.beta0()?;
        if self.pressure_release
            && (self.beta_re != 0.0 || self.beta_im != 0.0 || self.z_re.is_some())
        {
            return Err("pressure_release excludes beta/Z inputs".into());
        }
        match self.command {
            CommandKind::Ep => {
                let count = self.count.unwrap_or(1);
                if count == 0 || count > 20 {
                    return Err(format!("EP count {count} outside 1..=20"));
                }
            }
            CommandKind::Sweep => {
                for (name, v) in [
                    ("re_min", self.re_min),
                    ("re_max", self.re_max),
                    ("im_min", self.im_min),
                    ("im_max", self.im_max),
                ] {
                    if v.is_none() {
                        return Err(format!("sweep requires {name}"));
                    }
                }
                let rr = self.re_resolution.unwrap_or(101);
                let ir = self.im_resolution.unwrap_or(101);
                if rr == 0 || ir == 0 || rr > 512 || ir > 512 {
                    return Err("sweep resolution must be in 1..=512 per axis".into());
                }
            }
            CommandKind::Power => {
                let zmax = self.z_max.unwrap_or(10.0);
                if !(zmax > 0.0) {
                    return Err("z_max must be positive".into());
                }
                if self.z_points.unwrap_or(201) < 2 {
                    return Err("z_points must be >= 2".into());
                }
            }
            CommandKind::Encircle => {
                if let Some(nodes) = &self.loop_nodes {
                    if nodes.len() < 3 {
                        return Err("loop needs at least 3 nodes".into());
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Exit status taxonomy: config 2, convergence 3, io 4.
pub fn exit_code_for_core(err: &CoreError) -> i32 {
    match err {
        CoreError::InvalidInput { .. } => 2,
        CoreError::RangeExceeded { .. } | CoreError::DegenerateArguments { .. } => 2,
        CoreError::NonFinite { .. }
        | CoreError::PoleAtEigenvalue { .. }
        | CoreError::CompletenessFailure { .. }
        | CoreError::StepCollapse { .. }
        | CoreError::NoConvergence { .. }
        | CoreError::TripleRoot { .. }
        | CoreError::OutOfExpansionDisk { .. }
        | CoreError::InvalidLoop { .. }
        | CoreError::IllConditioned { .. } => 3,
    }
}
