//! Scenario configuration: a flat, typed key-value file with INI-like
//! sections, validated into a [`ScenarioConfig`].
//!
//! An empty file yields the sedimenting-cylinder benchmark: a disk of
//! radius 0.125 and density 1.5 centered at (1, 4) in a [0,2] x [0,6] box of
//! fluid at rest (density 1, viscosity 0.01) under gravity -980, discretized
//! with dx = 1/256 and dt = 1e-4, run to t = 0.1. Every key overrides one
//! default; unknown keys are hard errors.

use std::path::{Path, PathBuf};

use crate::diagnostics::ProfileAxis;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::params::{
    AdvectionScheme, IndicatorTransport, PenalizationForm, SolverParams,
};
use crate::transport::wall_clearance;

/// One requested cross-section profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRequest {
    pub axis: ProfileAxis,
    pub coordinate: f64,
    pub time: f64,
}

/// Fully validated description of a run.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub grid: GridSpec,
    pub params: SolverParams,
    pub body_center: [f64; 2],
    pub body_radius: f64,
    pub t_final: f64,
    pub probe_times: Vec<f64>,
    /// When present, the run is an eta sweep over these values (sorted to
    /// strictly decreasing order).
    pub sweep_etas: Option<Vec<f64>>,
    pub csv_dir: Option<PathBuf>,
    /// Write field and interface VTK files every this many steps; 0 disables.
    pub vtk_every: u64,
    pub profiles: Vec<ProfileRequest>,
    /// Budget guard: a run whose projected step count exceeds this aborts.
    pub step_cap: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec::new(512, 1536, 1.0 / 256.0, [0.0, 0.0])
                .expect("benchmark grid is valid"),
            params: SolverParams::default(),
            body_center: [1.0, 4.0],
            body_radius: 0.125,
            t_final: 0.1,
            probe_times: vec![0.1],
            sweep_etas: None,
            csv_dir: None,
            vtk_every: 0,
            profiles: Vec::new(),
            step_cap: 10_000_000,
        }
    }
}

impl ScenarioConfig {
    /// Parses and validates a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str(&text)
    }

    /// Parses and validates config text.
    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> Result<Self> {
        let raw = RawConfig::parse(text)?;
        raw.build()
    }

    /// Projected number of steps for one run.
    pub fn n_steps(&self) -> u64 {
        (self.t_final / self.params.dt).round() as u64
    }

    /// Deterministic content hash (FNV-1a over the canonical description),
    /// recorded in sweep reports so outputs can be matched to their inputs.
    pub fn scenario_hash(&self) -> u64 {
        let mut canonical = format!(
            "grid={}x{}x{};fluid={},{};body={},{},{},{};g={},{};eta={};dt={};tol={};\
             adv={:?};ind={:?};sharp={};pen={:?};reproj={};t={};probes={:?};sweep={:?}",
            self.grid.nx,
            self.grid.ny,
            self.grid.dx,
            self.params.rho_f,
            self.params.mu,
            self.body_center[0],
            self.body_center[1],
            self.body_radius,
            self.params.rho_s,
            self.params.gravity[0],
            self.params.gravity[1],
            self.params.eta,
            self.params.dt,
            self.params.poisson_tol,
            self.params.advection_scheme,
            self.params.indicator_transport,
            self.params.sharp_indicator,
            self.params.penalization,
            self.params.post_penalization_projection,
            self.t_final,
            self.probe_times,
            self.sweep_etas,
        );
        for p in &self.profiles {
            canonical.push_str(&format!(";prof={:?},{},{}", p.axis, p.coordinate, p.time));
        }
        fnv1a(canonical.as_bytes())
    }

    fn validate(&self) -> Result<()> {
        self.params.validate().map_err(|e| match e {
            Error::Domain(msg) => Error::ConfigInvalid(msg),
            other => other,
        })?;
        if !(self.body_radius > 0.0) {
            return Err(Error::ConfigInvalid(format!(
                "body.radius must be positive, got {}",
                self.body_radius
            )));
        }
        let clearance = wall_clearance(self.grid, self.body_center) - self.body_radius;
        let required = 4.0 * self.grid.dx;
        if clearance < required {
            return Err(Error::ConfigInvalid(format!(
                "body must start at least 4 dx = {required} inside the domain; \
                 boundary clearance is {clearance}"
            )));
        }
        if !(self.t_final > 0.0) {
            return Err(Error::ConfigInvalid(format!(
                "run.t_final must be positive, got {}",
                self.t_final
            )));
        }
        let slack = 0.5 * self.params.dt;
        for &t in &self.probe_times {
            if t < -slack || t > self.t_final + slack {
                return Err(Error::ConfigInvalid(format!(
                    "probe time {t} outside [0, {}]",
                    self.t_final
                )));
            }
        }
        for p in &self.profiles {
            if p.time < -slack || p.time > self.t_final + slack {
                return Err(Error::ConfigInvalid(format!(
                    "profile time {} outside [0, {}]",
                    p.time, self.t_final
                )));
            }
            let (lo, hi) = match p.axis {
                ProfileAxis::Horizontal => {
                    (self.grid.origin[1], self.grid.origin[1] + self.grid.extent[1])
                }
                ProfileAxis::Vertical => {
                    (self.grid.origin[0], self.grid.origin[0] + self.grid.extent[0])
                }
            };
            if p.coordinate < lo || p.coordinate > hi {
                return Err(Error::ConfigInvalid(format!(
                    "profile coordinate {} outside [{lo}, {hi}]",
                    p.coordinate
                )));
            }
        }
        if let Some(etas) = &self.sweep_etas {
            if etas.is_empty() {
                return Err(Error::ConfigInvalid("sweep.etas must not be empty".into()));
            }
            for &eta in etas {
                if !(eta > 0.0) {
                    return Err(Error::ConfigInvalid(format!(
                        "sweep eta must be positive, got {eta}"
                    )));
                }
            }
            for pair in etas.windows(2) {
                if pair[1] >= pair[0] {
                    return Err(Error::ConfigInvalid(
                        "sweep.etas must be distinct (sorted to strictly decreasing)".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Parsed key-value pairs before typing and validation.
struct RawConfig {
    entries: Vec<(usize, String, String)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self> {
        let mut section = String::new();
        let mut entries = Vec::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or(Error::ConfigParse {
                    line: line_no,
                    msg: format!("unterminated section header `{line}`"),
                })?;
                section = name.trim().to_string();
                if section.is_empty() {
                    return Err(Error::ConfigParse {
                        line: line_no,
                        msg: "empty section name".into(),
                    });
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(Error::ConfigParse {
                line: line_no,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::ConfigParse {
                    line: line_no,
                    msg: "empty key".into(),
                });
            }
            let full_key = if section.is_empty() {
                key.to_string()
            } else {
                format!("{section}.{key}")
            };
            entries.push((line_no, full_key, value.trim().to_string()));
        }
        Ok(Self { entries })
    }

    fn build(self) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::default();
        let mut nx = cfg.grid.nx;
        let mut ny = cfg.grid.ny;
        let mut dx = cfg.grid.dx;

        for (line, key, value) in &self.entries {
            let line = *line;
            let parse_err = |msg: String| Error::ConfigParse { line, msg };
            let f = |v: &str| -> Result<f64> {
                v.parse::<f64>()
                    .map_err(|_| parse_err(format!("expected a number, got `{v}`")))
            };
            let int = |v: &str| -> Result<u64> {
                v.parse::<u64>()
                    .map_err(|_| parse_err(format!("expected a non-negative integer, got `{v}`")))
            };
            let boolean = |v: &str| -> Result<bool> {
                match v {
                    "true" | "yes" | "on" => Ok(true),
                    "false" | "no" | "off" => Ok(false),
                    _ => Err(parse_err(format!("expected true/false, got `{v}`"))),
                }
            };
            let float_list = |v: &str| -> Result<Vec<f64>> {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<f64>()
                            .map_err(|_| parse_err(format!("expected a number, got `{s}`")))
                    })
                    .collect()
            };

            match key.as_str() {
                "grid.nx" => nx = int(value)? as usize,
                "grid.ny" => ny = int(value)? as usize,
                "grid.dx" => dx = f(value)?,
                "fluid.rho" => cfg.params.rho_f = f(value)?,
                "fluid.mu" => cfg.params.mu = f(value)?,
                "body.center_x" => cfg.body_center[0] = f(value)?,
                "body.center_y" => cfg.body_center[1] = f(value)?,
                "body.radius" => cfg.body_radius = f(value)?,
                "body.rho" => cfg.params.rho_s = f(value)?,
                "physics.gravity_x" => cfg.params.gravity[0] = f(value)?,
                "physics.gravity_y" => cfg.params.gravity[1] = f(value)?,
                "numerics.eta" => cfg.params.eta = f(value)?,
                "numerics.dt" => cfg.params.dt = f(value)?,
                "numerics.poisson_tol" => cfg.params.poisson_tol = f(value)?,
                "numerics.poisson_max_iter" => cfg.params.poisson_max_iter = int(value)? as usize,
                "numerics.advection" => {
                    cfg.params.advection_scheme = match value.as_str() {
                        "upwind1" => AdvectionScheme::Upwind1,
                        "semi_lagrangian" => AdvectionScheme::SemiLagrangian,
                        _ => {
                            return Err(parse_err(format!(
                                "expected upwind1 or semi_lagrangian, got `{value}`"
                            )))
                        }
                    }
                }
                "numerics.indicator_transport" => {
                    cfg.params.indicator_transport = match value.as_str() {
                        "exact_rigid_transform" => IndicatorTransport::ExactRigidTransform,
                        "semi_lagrangian" => IndicatorTransport::SemiLagrangian,
                        _ => {
                            return Err(parse_err(format!(
                                "expected exact_rigid_transform or semi_lagrangian, got `{value}`"
                            )))
                        }
                    }
                }
                "numerics.sharp_indicator" => cfg.params.sharp_indicator = boolean(value)?,
                "numerics.penalization" => {
                    cfg.params.penalization = match value.as_str() {
                        "implicit" => PenalizationForm::Implicit,
                        "explicit" => PenalizationForm::Explicit,
                        _ => {
                            return Err(parse_err(format!(
                                "expected implicit or explicit, got `{value}`"
                            )))
                        }
                    }
                }
                "numerics.post_penalization_projection" => {
                    cfg.params.post_penalization_projection = boolean(value)?
                }
                "sweep.etas" => {
                    let mut etas = float_list(value)?;
                    etas.sort_by(|a, b| b.partial_cmp(a).expect("finite etas"));
                    cfg.sweep_etas = Some(etas);
                }
                "output.csv_dir" => cfg.csv_dir = Some(PathBuf::from(value)),
                "output.vtk_every" => cfg.vtk_every = int(value)?,
                "output.profiles" => {
                    let mut profiles = Vec::new();
                    for item in value.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                        let parts: Vec<&str> = item.split(',').map(str::trim).collect();
                        if parts.len() != 3 {
                            return Err(parse_err(format!(
                                "profile must be `axis,coordinate,time`, got `{item}`"
                            )));
                        }
                        let axis = match parts[0] {
                            "horizontal" | "h" => ProfileAxis::Horizontal,
                            "vertical" | "v" => ProfileAxis::Vertical,
                            _ => {
                                return Err(parse_err(format!(
                                    "profile axis must be horizontal or vertical, got `{}`",
                                    parts[0]
                                )))
                            }
                        };
                        profiles.push(ProfileRequest {
                            axis,
                            coordinate: f(parts[1])?,
                            time: f(parts[2])?,
                        });
                    }
                    cfg.profiles = profiles;
                }
                "run.t_final" => cfg.t_final = f(value)?,
                "run.probe_times" => cfg.probe_times = float_list(value)?,
                "run.step_cap" => cfg.step_cap = int(value)?,
                _ => {
                    return Err(parse_err(format!("unknown key `{key}`")));
                }
            }
        }

        cfg.grid = GridSpec::new(nx, ny, dx, [0.0, 0.0]).map_err(|e| match e {
            Error::Domain(msg) => Error::ConfigInvalid(msg),
            other => other,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }
}
