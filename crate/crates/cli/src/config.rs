//! Run configuration: a TOML file in scenario units (m, s, km/h, cars/km,
//! cars/h), resolved against defaults and validated before any run.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use ibvp_core::flux::{kmh_to_ms, LwrFlux, SpeedProfile};
use ibvp_core::ibvp::{IbvpProblem, StepFn};
use ibvp_core::traffic::{LightColor, LightSchedule, TrafficScenario, REFERENCE_SPEEDS_KMH};
use ibvp_core::verify::entropy::EntropyConfig;
use serde::{Deserialize, Serialize};

use crate::error::{from_build, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Solve,
    Certify,
    Sweep,
    GammaCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    Green,
    Red,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LightSpec {
    pub green_s: f64,
    pub red_s: f64,
    pub first_switch_s: f64,
    pub initial: Color,
}

impl LightSpec {
    fn schedule(&self) -> LightSchedule {
        LightSchedule {
            green: self.green_s,
            red: self.red_s,
            first_switch: self.first_switch_s,
            initial: match self.initial {
                Color::Green => LightColor::Green,
                Color::Red => LightColor::Red,
            },
        }
    }
}

/// The traffic-light road; every field defaults to the reference scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSpec {
    pub road_length_m: f64,
    pub max_density_per_km: f64,
    pub inflow_per_h: f64,
    pub v_green_kmh: f64,
    pub v_red_kmh: f64,
    pub delta_m: f64,
    pub inflow_cycles: u32,
    pub horizon_s: f64,
    pub record_dt_s: f64,
    pub entry: LightSpec,
    pub exit: LightSpec,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec {
            road_length_m: 250.0,
            max_density_per_km: 200.0,
            inflow_per_h: 2000.0,
            v_green_kmh: 60.0,
            v_red_kmh: 40.0,
            delta_m: 100.0,
            inflow_cycles: 3,
            horizon_s: 1200.0,
            record_dt_s: 0.5,
            entry: LightSpec {
                green_s: 39.0,
                red_s: 27.0,
                first_switch_s: 39.0,
                initial: Color::Green,
            },
            exit: LightSpec {
                green_s: 30.0,
                red_s: 45.0,
                first_switch_s: 12.0,
                initial: Color::Green,
            },
        }
    }
}

impl ScenarioSpec {
    pub fn to_scenario(&self) -> TrafficScenario {
        TrafficScenario {
            road_length: self.road_length_m,
            max_density: self.max_density_per_km / 1000.0,
            inflow: self.inflow_per_h / 3600.0,
            v_green: kmh_to_ms(self.v_green_kmh),
            v_red: kmh_to_ms(self.v_red_kmh),
            delta: self.delta_m,
            inflow_cycles: self.inflow_cycles,
            horizon: self.horizon_s,
            entry: self.entry.schedule(),
            exit: self.exit.schedule(),
            record_dt: self.record_dt_s,
        }
    }
}

/// Step function given by breakpoints and one value per piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSpec {
    pub breaks: Vec<f64>,
    pub values: Vec<f64>,
}

impl StepSpec {
    fn build(&self, what: &str, scale: f64) -> CliResult<StepFn> {
        StepFn::new(self.breaks.clone(), self.values.iter().map(|v| v * scale).collect())
            .map_err(|e| CliError::Config(format!("problem.{what}: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainSpec {
    Segment,
    HalfLine,
}

/// LWR problem with step data. Breaks of `initial` are in m, of `left`,
/// `right` and `speed` in s; densities in cars/km, speeds in km/h.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub domain: DomainSpec,
    pub max_density_per_km: f64,
    pub initial: StepSpec,
    pub left: StepSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right: Option<StepSpec>,
    pub speed_kmh: StepSpec,
    pub record_dt_s: f64,
}

impl ProblemSpec {
    pub fn build(&self) -> CliResult<IbvpProblem> {
        let per_km = 1e-3;
        let g = Arc::new(LwrFlux::new(self.max_density_per_km * per_km).map_err(from_build)?);
        let initial = self.initial.build("initial", per_km)?;
        let left = self.left.build("left", per_km)?;
        let speed_steps = self.speed_kmh.build("speed_kmh", kmh_to_ms(1.0))?;
        let v_min = speed_steps.range().0;
        let speed = SpeedProfile::from_steps(speed_steps, v_min).map_err(from_build)?;
        let p = match (self.domain, &self.right) {
            (DomainSpec::Segment, Some(r)) => {
                IbvpProblem::segment(initial, left, r.build("right", per_km)?, speed, g)
            }
            (DomainSpec::Segment, None) => {
                return Err(CliError::Config("problem.right is required for a segment".into()))
            }
            (DomainSpec::HalfLine, None) => IbvpProblem::half_line(initial, left, speed, g),
            (DomainSpec::HalfLine, Some(_)) => {
                return Err(CliError::Config("problem.right is not allowed on a half line".into()))
            }
        };
        p.map_err(from_build)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub cells: usize,
    pub cfl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub speeds_kmh: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySpec {
    /// Seeded random segment problems certified alongside the main run.
    pub random_problems: usize,
    pub k_samples: usize,
    pub tiles: usize,
}

impl CertifySpec {
    pub fn entropy(&self) -> EntropyConfig {
        EntropyConfig {
            k_samples: self.k_samples,
            tiles: self.tiles,
            ..EntropyConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Write every `profile_stride`-th record to the profile CSV.
    pub profile_stride: usize,
}

/// Fully resolved configuration. Serializes to a file `parse_config` reads
/// back unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub seed: u64,
    pub out: PathBuf,
    pub grid: GridSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemSpec>,
    pub sweep: SweepSpec,
    pub certify: CertifySpec,
    pub output: OutputSpec,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileGrid {
    cells: Option<usize>,
    cfl: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileCertify {
    random_problems: Option<usize>,
    k_samples: Option<usize>,
    tiles: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    mode: Option<Mode>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    grid: Option<FileGrid>,
    scenario: Option<ScenarioSpec>,
    problem: Option<ProblemSpec>,
    sweep: Option<SweepSpec>,
    certify: Option<FileCertify>,
    output: Option<OutputSpec>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub cells: Option<usize>,
    pub cfl: Option<f64>,
}

pub const DEFAULT_CFL: f64 = 0.9;
pub const DEFAULT_OUT: &str = "out";

pub fn parse_config(path: &Path) -> CliResult<RunConfig> {
    parse_config_with(path, &Overrides::default())
}

pub fn parse_config_with(path: &Path, over: &Overrides) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text, over)
}

pub fn parse_config_str(text: &str, over: &Overrides) -> CliResult<RunConfig> {
    let file: FileConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let grid = file.grid.unwrap_or_default();
    let mode = over.mode.or(file.mode);
    let cells = over.cells.or(grid.cells);
    let mut missing = vec![];
    if mode.is_none() {
        missing.push("mode");
    }
    if cells.is_none() {
        missing.push("grid.cells");
    }
    if !missing.is_empty() {
        return Err(CliError::Config(format!("missing required keys: {}", missing.join(", "))));
    }
    let certify = file.certify.unwrap_or_default();
    let defaults = EntropyConfig::default();
    let cfg = RunConfig {
        mode: mode.unwrap(),
        seed: over.seed.or(file.seed).unwrap_or(0),
        out: over.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        grid: GridSpec {
            cells: cells.unwrap(),
            cfl: over.cfl.or(grid.cfl).unwrap_or(DEFAULT_CFL),
        },
        scenario: match (&file.scenario, &file.problem) {
            (None, None) => Some(ScenarioSpec::default()),
            (s, _) => s.clone(),
        },
        problem: file.problem,
        sweep: file.sweep.unwrap_or(SweepSpec {
            speeds_kmh: REFERENCE_SPEEDS_KMH.to_vec(),
        }),
        certify: CertifySpec {
            random_problems: certify.random_problems.unwrap_or(0),
            k_samples: certify.k_samples.unwrap_or(defaults.k_samples),
            tiles: certify.tiles.unwrap_or(defaults.tiles),
        },
        output: file.output.unwrap_or(OutputSpec { profile_stride: 1 }),
    };
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.grid.cells < 4 {
            return bad(format!("grid.cells = {} must be at least 4", self.grid.cells));
        }
        if !(self.grid.cfl > 0.0 && self.grid.cfl <= 1.0) {
            return bad(format!("grid.cfl = {} must lie in (0, 1]", self.grid.cfl));
        }
        if self.output.profile_stride == 0 {
            return bad("output.profile_stride must be at least 1".into());
        }
        if self.certify.k_samples < 2 || self.certify.tiles < 2 {
            return bad("certify.k_samples and certify.tiles must be at least 2".into());
        }
        if self.scenario.is_some() && self.problem.is_some() {
            return bad("give either [scenario] or [problem], not both".into());
        }
        if let Some(p) = &self.problem {
            if self.mode == Mode::Sweep {
                return bad("sweep mode runs the traffic [scenario]; remove [problem]".into());
            }
            if !(p.record_dt_s > 0.0) {
                return bad("problem.record_dt_s must be positive".into());
            }
            p.build()?;
        }
        if let Some(s) = &self.scenario {
            let base = s.to_scenario();
            base.validate().map_err(|e| CliError::Config(format!("scenario: {e}")))?;
            if self.mode == Mode::Sweep {
                if self.sweep.speeds_kmh.is_empty() {
                    return bad("sweep.speeds_kmh is empty".into());
                }
                for &v in &self.sweep.speeds_kmh {
                    base.with_v_red_kmh(v)
                        .validate()
                        .map_err(|e| CliError::Config(format!("sweep.speeds_kmh = {v}: {e}")))?;
                }
            }
        }
        Ok(())
    }

    /// Canonical TOML text of the resolved configuration.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
