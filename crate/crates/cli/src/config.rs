//! Flat key-value experiment configuration with `[section]` headers.
//!
//! The format is line-oriented: `#` starts a comment, blank lines are
//! skipped, and every `key = value` pair belongs to the most recent
//! section header. Unknown sections or keys are rejected so that a typo
//! cannot silently fall back to a default. `to_text` prints the full
//! effective configuration in the same format; floating-point values use
//! the shortest round-tripping decimal form.

use std::fmt::Write as _;

use mvflow_core::{
    sample_strong, ConservedState, ForceField, ModelParams, SolverConfig, TorusGrid, Vec2,
};

/// Configuration or precondition problem; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Simulate,
    Deposition,
    WeakStrong,
    YoungAnalyze,
    StationaryCheck,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Simulate => "simulate",
            Experiment::Deposition => "deposition",
            Experiment::WeakStrong => "weak-strong",
            Experiment::YoungAnalyze => "young-analyze",
            Experiment::StationaryCheck => "stationary-check",
        }
    }

    pub fn parse(s: &str) -> Option<Experiment> {
        match s {
            "simulate" => Some(Experiment::Simulate),
            "deposition" => Some(Experiment::Deposition),
            "weak-strong" => Some(Experiment::WeakStrong),
            "young-analyze" => Some(Experiment::YoungAnalyze),
            "stationary-check" => Some(Experiment::StationaryCheck),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSection {
    pub kind: String,
    pub gamma: f64,
    pub kappa: f64,
    pub a: f64,
    pub d: f64,
    pub force_x: f64,
    pub force_y: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSection {
    pub nx: usize,
    /// `0` selects a one-dimensional grid.
    pub ny: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverSection {
    pub cfl: f64,
    pub t_end: f64,
    pub viscosity: f64,
    pub record_every: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitialSection {
    pub preset: String,
    pub h: f64,
    pub h_low: f64,
    pub h_base: f64,
    pub amp: f64,
    pub u_x: f64,
    pub u_y: f64,
    pub slope_fraction: f64,
    pub speed: f64,
    pub waves: u32,
    pub path: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSection {
    pub dir: String,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeakStrongSection {
    pub resolutions: Vec<usize>,
    /// Relative height perturbation of the sampled data; the convergence
    /// estimate assumes shared initial data, so a positive value makes the
    /// run report-only.
    pub perturb: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct YoungSection {
    pub ensemble: String,
    pub size: usize,
    pub epsilon0: f64,
    pub perturb: f64,
    pub h_a: f64,
    pub h_b: f64,
    pub times: Vec<f64>,
    /// Escape radius for the ensemble lift; `0` means automatic.
    pub cutoff: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub model: ModelSection,
    pub grid: GridSection,
    pub solver: SolverSection,
    pub initial: InitialSection,
    pub output: OutputSection,
    pub weak_strong: WeakStrongSection,
    pub young: YoungSection,
}

impl ExperimentConfig {
    /// Ready-to-run defaults for each experiment.
    pub fn default_for(experiment: Experiment) -> ExperimentConfig {
        let mut cfg = ExperimentConfig {
            experiment,
            model: ModelSection {
                kind: "savage-hutter".into(),
                gamma: 1.4,
                kappa: 1.0,
                a: 1.0,
                d: 1.0,
                force_x: 0.0,
                force_y: 0.0,
            },
            grid: GridSection { nx: 200, ny: 0 },
            solver: SolverSection { cfl: 0.45, t_end: 4.0, viscosity: 0.0, record_every: 1 },
            initial: InitialSection {
                preset: "dam-break".into(),
                h: 1.0,
                h_low: 0.25,
                h_base: 1.0,
                amp: 0.3,
                u_x: 0.0,
                u_y: 0.0,
                slope_fraction: 1.0,
                speed: 0.5,
                waves: 2,
                path: String::new(),
            },
            output: OutputSection { dir: "out".into(), seed: 0 },
            weak_strong: WeakStrongSection { resolutions: vec![64, 128, 256], perturb: 0.0 },
            young: YoungSection {
                ensemble: "viscosity-ladder".into(),
                size: 4,
                epsilon0: 0.02,
                perturb: 0.05,
                h_a: 1.0,
                h_b: 3.0,
                times: vec![0.5],
                cutoff: 0.0,
            },
        };
        match experiment {
            Experiment::Simulate | Experiment::Deposition => {}
            Experiment::WeakStrong => {
                cfg.grid.nx = 64;
                cfg.initial.preset = "traveling-wave".into();
                cfg.initial.h_base = 1.5;
                cfg.solver.t_end = 0.8;
                cfg.solver.viscosity = 0.004;
                cfg.solver.record_every = 4;
            }
            Experiment::YoungAnalyze => {
                cfg.grid.nx = 64;
                cfg.solver.t_end = 1.0;
                cfg.solver.record_every = 4;
            }
            Experiment::StationaryCheck => {
                cfg.grid.nx = 64;
                cfg.initial.preset = "stationary-pile".into();
                cfg.initial.h_base = 0.8;
                cfg.solver.t_end = 1.0;
            }
        }
        cfg
    }

    /// Parse `text` on top of the defaults for `experiment`. A
    /// `[experiment] kind` entry, when present, must match.
    pub fn parse(text: &str, experiment: Experiment) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = ExperimentConfig::default_for(experiment);
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let Some(name) = name.strip_suffix(']') else {
                    return err(format!("line {}: malformed section header", lineno + 1));
                };
                section = name.trim().to_string();
                if !matches!(
                    section.as_str(),
                    "experiment"
                        | "model"
                        | "grid"
                        | "solver"
                        | "initial"
                        | "output"
                        | "weak-strong"
                        | "young"
                ) {
                    return err(format!("line {}: unknown section [{section}]", lineno + 1));
                }
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!("line {}: expected `key = value`", lineno + 1));
            };
            let key = key.trim();
            let value = value.trim();
            cfg.apply(&section, key, value)
                .map_err(|e| ConfigError(format!("line {}: {}", lineno + 1, e.0)))?;
        }
        Ok(cfg)
    }

    fn apply(&mut self, section: &str, key: &str, value: &str) -> Result<(), ConfigError> {
        match (section, key) {
            ("experiment", "kind") => {
                let Some(kind) = Experiment::parse(value) else {
                    return err(format!("unknown experiment `{value}`"));
                };
                if kind != self.experiment {
                    return err(format!(
                        "config is for `{}` but the `{}` subcommand was invoked",
                        kind.name(),
                        self.experiment.name()
                    ));
                }
            }
            ("model", "kind") => {
                if value != "isentropic-euler" && value != "savage-hutter" {
                    return err(format!("unknown model `{value}`"));
                }
                self.model.kind = value.to_string();
            }
            ("model", "gamma") => self.model.gamma = parse_f64(key, value)?,
            ("model", "kappa") => self.model.kappa = parse_f64(key, value)?,
            ("model", "a") => self.model.a = parse_f64(key, value)?,
            ("model", "d") => self.model.d = parse_f64(key, value)?,
            ("model", "force_x") => self.model.force_x = parse_f64(key, value)?,
            ("model", "force_y") => self.model.force_y = parse_f64(key, value)?,
            ("grid", "nx") => self.grid.nx = parse_usize(key, value)?,
            ("grid", "ny") => self.grid.ny = parse_usize(key, value)?,
            ("solver", "cfl") => self.solver.cfl = parse_f64(key, value)?,
            ("solver", "t_end") => self.solver.t_end = parse_f64(key, value)?,
            ("solver", "viscosity") => self.solver.viscosity = parse_f64(key, value)?,
            ("solver", "record_every") => self.solver.record_every = parse_usize(key, value)?,
            ("initial", "preset") => self.initial.preset = value.to_string(),
            ("initial", "h") => self.initial.h = parse_f64(key, value)?,
            ("initial", "h_low") => self.initial.h_low = parse_f64(key, value)?,
            ("initial", "h_base") => self.initial.h_base = parse_f64(key, value)?,
            ("initial", "amp") => self.initial.amp = parse_f64(key, value)?,
            ("initial", "u_x") => self.initial.u_x = parse_f64(key, value)?,
            ("initial", "u_y") => self.initial.u_y = parse_f64(key, value)?,
            ("initial", "slope_fraction") => self.initial.slope_fraction = parse_f64(key, value)?,
            ("initial", "speed") => self.initial.speed = parse_f64(key, value)?,
            ("initial", "waves") => self.initial.waves = parse_usize(key, value)? as u32,
            ("initial", "path") => self.initial.path = value.to_string(),
            ("output", "dir") => self.output.dir = value.to_string(),
            ("output", "seed") => {
                self.output.seed =
                    value.parse().map_err(|e| ConfigError(format!("seed: {e}")))?;
            }
            ("weak-strong", "resolutions") => {
                self.weak_strong.resolutions = parse_usize_list(key, value)?;
            }
            ("weak-strong", "perturb") => self.weak_strong.perturb = parse_f64(key, value)?,
            ("young", "ensemble") => {
                if !matches!(value, "viscosity-ladder" | "perturbed" | "pair") {
                    return err(format!("unknown ensemble kind `{value}`"));
                }
                self.young.ensemble = value.to_string();
            }
            ("young", "size") => self.young.size = parse_usize(key, value)?,
            ("young", "epsilon0") => self.young.epsilon0 = parse_f64(key, value)?,
            ("young", "perturb") => self.young.perturb = parse_f64(key, value)?,
            ("young", "h_a") => self.young.h_a = parse_f64(key, value)?,
            ("young", "h_b") => self.young.h_b = parse_f64(key, value)?,
            ("young", "times") => self.young.times = parse_f64_list(key, value)?,
            ("young", "cutoff") => self.young.cutoff = parse_f64(key, value)?,
            _ => {
                return if section.is_empty() {
                    err(format!("key `{key}` appears before any section header"))
                } else {
                    err(format!("unknown key `{key}` in section [{section}]"))
                };
            }
        }
        Ok(())
    }

    /// Full effective configuration; parses back to an equal value.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[experiment]");
        let _ = writeln!(s, "kind = {}", self.experiment.name());
        let _ = writeln!(s, "\n[model]");
        let _ = writeln!(s, "kind = {}", self.model.kind);
        let _ = writeln!(s, "gamma = {}", self.model.gamma);
        let _ = writeln!(s, "kappa = {}", self.model.kappa);
        let _ = writeln!(s, "a = {}", self.model.a);
        let _ = writeln!(s, "d = {}", self.model.d);
        let _ = writeln!(s, "force_x = {}", self.model.force_x);
        let _ = writeln!(s, "force_y = {}", self.model.force_y);
        let _ = writeln!(s, "\n[grid]");
        let _ = writeln!(s, "nx = {}", self.grid.nx);
        let _ = writeln!(s, "ny = {}", self.grid.ny);
        let _ = writeln!(s, "\n[solver]");
        let _ = writeln!(s, "cfl = {}", self.solver.cfl);
        let _ = writeln!(s, "t_end = {}", self.solver.t_end);
        let _ = writeln!(s, "viscosity = {}", self.solver.viscosity);
        let _ = writeln!(s, "record_every = {}", self.solver.record_every);
        let _ = writeln!(s, "\n[initial]");
        let _ = writeln!(s, "preset = {}", self.initial.preset);
        let _ = writeln!(s, "h = {}", self.initial.h);
        let _ = writeln!(s, "h_low = {}", self.initial.h_low);
        let _ = writeln!(s, "h_base = {}", self.initial.h_base);
        let _ = writeln!(s, "amp = {}", self.initial.amp);
        let _ = writeln!(s, "u_x = {}", self.initial.u_x);
        let _ = writeln!(s, "u_y = {}", self.initial.u_y);
        let _ = writeln!(s, "slope_fraction = {}", self.initial.slope_fraction);
        let _ = writeln!(s, "speed = {}", self.initial.speed);
        let _ = writeln!(s, "waves = {}", self.initial.waves);
        let _ = writeln!(s, "path = {}", self.initial.path);
        let _ = writeln!(s, "\n[output]");
        let _ = writeln!(s, "dir = {}", self.output.dir);
        let _ = writeln!(s, "seed = {}", self.output.seed);
        let _ = writeln!(s, "\n[weak-strong]");
        let _ = writeln!(s, "resolutions = {}", join(&self.weak_strong.resolutions));
        let _ = writeln!(s, "perturb = {}", self.weak_strong.perturb);
        let _ = writeln!(s, "\n[young]");
        let _ = writeln!(s, "ensemble = {}", self.young.ensemble);
        let _ = writeln!(s, "size = {}", self.young.size);
        let _ = writeln!(s, "epsilon0 = {}", self.young.epsilon0);
        let _ = writeln!(s, "perturb = {}", self.young.perturb);
        let _ = writeln!(s, "h_a = {}", self.young.h_a);
        let _ = writeln!(s, "h_b = {}", self.young.h_b);
        let _ = writeln!(s, "times = {}", join(&self.young.times));
        let _ = writeln!(s, "cutoff = {}", self.young.cutoff);
        s
    }

    pub fn build_params(&self) -> Result<ModelParams, ConfigError> {
        let base = match self.model.kind.as_str() {
            "isentropic-euler" => ModelParams::euler(self.model.gamma, self.model.kappa),
            "savage-hutter" => ModelParams::savage_hutter(self.model.a, self.model.d),
            other => return err(format!("unknown model `{other}`")),
        }
        .map_err(|e| ConfigError(e.to_string()))?;
        let force = Vec2::new(self.model.force_x, self.model.force_y);
        Ok(if force == Vec2::ZERO {
            base
        } else {
            base.with_force(ForceField::Constant(force))
        })
    }

    pub fn build_grid(&self) -> Result<TorusGrid, ConfigError> {
        if self.grid.ny == 0 {
            TorusGrid::line(self.grid.nx)
        } else {
            TorusGrid::square(self.grid.nx, self.grid.ny)
        }
        .map_err(|e| ConfigError(e.to_string()))
    }

    pub fn build_solver(&self) -> Result<SolverConfig, ConfigError> {
        let config = SolverConfig {
            cfl: self.solver.cfl,
            t_end: self.solver.t_end,
            viscosity: self.solver.viscosity,
            record_every: self.solver.record_every,
            ..SolverConfig::default()
        };
        config.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(config)
    }

    /// Initial data for the named preset. The `file` preset carries its
    /// own grid, which replaces the `[grid]` section; every other preset
    /// is sampled on `grid`.
    pub fn build_initial(
        &self,
        grid: &TorusGrid,
        params: &ModelParams,
    ) -> Result<(ConservedState, TorusGrid), ConfigError> {
        let ini = &self.initial;
        let u = Vec2::new(ini.u_x, ini.u_y);
        let state = match ini.preset.as_str() {
            "constant" => mvflow_core::presets::constant(grid, ini.h, u),
            "sine-perturbation" => {
                mvflow_core::presets::sine_perturbation(grid, ini.h_base, ini.amp, u)
            }
            "dam-break" => mvflow_core::presets::dam_break(grid, ini.h, ini.h_low),
            "stationary-pile" => {
                mvflow_core::presets::stationary_pile(grid, params, ini.h_base, ini.slope_fraction)
            }
            "traveling-wave" => {
                let (strong, _) = mvflow_core::presets::traveling_wave(
                    params, ini.h_base, ini.amp, ini.speed, ini.waves,
                )
                .map_err(|e| ConfigError(e.to_string()))?;
                sample_strong(&strong, grid, 0.0)
            }
            "file" => {
                let text = std::fs::read_to_string(&ini.path).map_err(|e| {
                    ConfigError(format!("cannot read state file `{}`: {e}", ini.path))
                })?;
                let (state, file_grid) = mvflow_core::presets::parse_state(&text)
                    .map_err(|e| ConfigError(e.to_string()))?;
                return Ok((state, file_grid));
            }
            other => return err(format!("unknown initial preset `{other}`")),
        }
        .map_err(|e| ConfigError(e.to_string()))?;
        Ok((state, grid.clone()))
    }

    /// Model sanity common to the granular experiments.
    pub fn require_granular(&self) -> Result<(), ConfigError> {
        if self.model.kind != "savage-hutter" {
            return err(format!(
                "the {} experiment needs the savage-hutter model",
                self.experiment.name()
            ));
        }
        Ok(())
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    let x: f64 = value.parse().map_err(|e| ConfigError(format!("{key}: {e}")))?;
    if !x.is_finite() {
        return err(format!("{key}: must be finite, got {value}"));
    }
    Ok(x)
}

fn parse_usize(key: &str, value: &str) -> Result<usize, ConfigError> {
    value.parse().map_err(|e| ConfigError(format!("{key}: {e}")))
}

fn parse_usize_list(key: &str, value: &str) -> Result<Vec<usize>, ConfigError> {
    value.split(',').map(|part| parse_usize(key, part.trim())).collect()
}

fn parse_f64_list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    value.split(',').map(|part| parse_f64(key, part.trim())).collect()
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Check a generic model config against the granular-only requirement and
/// build everything an experiment runner needs up front.
pub struct BuiltObjects {
    pub params: ModelParams,
    pub grid: TorusGrid,
    pub solver: SolverConfig,
    pub initial: ConservedState,
}

pub fn build_objects(cfg: &ExperimentConfig) -> Result<BuiltObjects, ConfigError> {
    let params = cfg.build_params()?;
    let grid = cfg.build_grid()?;
    let solver = cfg.build_solver()?;
    let (initial, grid) = cfg.build_initial(&grid, &params)?;
    Ok(BuiltObjects { params, grid, solver, initial })
}
