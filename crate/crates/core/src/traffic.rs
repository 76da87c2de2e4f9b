//! Traffic-light scenario on a single road: inflow metered by an entry
//! light, outflow by an exit light, and a speed limit that switches with
//! the exit light. The queue functional `J` weights time spent at high
//! density close to the exit.

use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::exec::{self, Execution};
use crate::flux::{kmh_to_ms, ms_to_kmh, FluxModel, LwrFlux, SpeedProfile};
use crate::ibvp::{IbvpProblem, StepFn};
use crate::solver::{solve, GridSpec, SolutionField, SolverConfig};

/// Speed limits (km/h) compared in the reference sweep.
pub const REFERENCE_SPEEDS_KMH: [f64; 7] = [40.0, 45.0, 50.0, 55.0, 60.0, 65.0, 70.0];

/// Road is considered empty below this many cars.
pub const EMPTY_ROAD_CARS: f64 = 1e-3;

const CAPACITY_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LightColor {
    Green,
    Red,
}

impl LightColor {
    fn other(self) -> Self {
        match self {
            LightColor::Green => LightColor::Red,
            LightColor::Red => LightColor::Green,
        }
    }
}

/// Periodic two-phase light: shows `initial` on `[0, first_switch)`, then
/// alternates with the given durations. Right-continuous at switches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightSchedule {
    pub green: f64,
    pub red: f64,
    pub first_switch: f64,
    pub initial: LightColor,
}

impl LightSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.green > 0.0 && self.red > 0.0 && self.first_switch > 0.0) {
            return Err(invalid("light schedule", "durations and first switch must be positive"));
        }
        Ok(())
    }

    fn duration(&self, c: LightColor) -> f64 {
        match c {
            LightColor::Green => self.green,
            LightColor::Red => self.red,
        }
    }

    /// Switch times in `(0, horizon)`, each with the color shown from then on.
    pub fn switches(&self, horizon: f64) -> Vec<(f64, LightColor)> {
        let mut out = Vec::new();
        let mut t = self.first_switch;
        let mut c = self.initial.other();
        while t < horizon {
            out.push((t, c));
            t += self.duration(c);
            c = c.other();
        }
        out
    }

    pub fn color_at(&self, t: f64) -> LightColor {
        if t < self.first_switch {
            return self.initial;
        }
        let period = self.green + self.red;
        let first = self.initial.other();
        let phase = (t - self.first_switch).rem_euclid(period);
        if phase < self.duration(first) {
            first
        } else {
            first.other()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficScenario {
    /// Road length (m).
    pub road_length: f64,
    /// Maximal density (cars/m).
    pub max_density: f64,
    /// Inflow while the entry light is green (cars/s).
    pub inflow: f64,
    /// Speed limit while the exit light is green (m/s).
    pub v_green: f64,
    /// Speed limit while the exit light is red (m/s).
    pub v_red: f64,
    /// Length of the monitored stretch before the exit (m).
    pub delta: f64,
    /// Entry-light cycles with inflow; afterwards the entry stays closed.
    pub inflow_cycles: u32,
    /// Simulated horizon (s).
    pub horizon: f64,
    pub entry: LightSchedule,
    pub exit: LightSchedule,
    /// Spacing of stored profiles (s); `J` is integrated on this grid.
    pub record_dt: f64,
}

impl TrafficScenario {
    /// The reference road: 250 m, 200 cars/km, 2000 cars/h during entry
    /// green (39 s green, 27 s red, green at t = 0), exit light 30 s green,
    /// 45 s red, first red at t = 12 s, 60 km/h while the exit is green.
    pub fn reference(v_red_kmh: f64) -> Self {
        TrafficScenario {
            road_length: 250.0,
            max_density: 0.2,
            inflow: 2000.0 / 3600.0,
            v_green: kmh_to_ms(60.0),
            v_red: kmh_to_ms(v_red_kmh),
            delta: 100.0,
            inflow_cycles: 3,
            horizon: 1200.0,
            entry: LightSchedule {
                green: 39.0,
                red: 27.0,
                first_switch: 39.0,
                initial: LightColor::Green,
            },
            exit: LightSchedule {
                green: 30.0,
                red: 45.0,
                first_switch: 12.0,
                initial: LightColor::Green,
            },
            record_dt: 0.5,
        }
    }

    pub fn with_v_red_kmh(&self, v: f64) -> Self {
        TrafficScenario {
            v_red: kmh_to_ms(v),
            ..self.clone()
        }
    }

    pub fn v_red_kmh(&self) -> f64 {
        ms_to_kmh(self.v_red)
    }

    pub fn flux(&self) -> Result<LwrFlux> {
        LwrFlux::new(self.max_density)
    }

    pub fn inflow_cutoff(&self) -> f64 {
        self.inflow_cycles as f64 * (self.entry.green + self.entry.red)
    }

    pub fn validate(&self) -> Result<()> {
        self.entry.validate()?;
        self.exit.validate()?;
        let pos = [
            ("road length", self.road_length),
            ("max density", self.max_density),
            ("green speed", self.v_green),
            ("red speed", self.v_red),
            ("delta", self.delta),
            ("horizon", self.horizon),
            ("record step", self.record_dt),
        ];
        if let Some((name, v)) = pos.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return Err(invalid("scenario", format!("{name} = {v} must be positive")));
        }
        if !(self.inflow >= 0.0) {
            return Err(invalid("scenario", "inflow must be nonnegative"));
        }
        if self.delta > self.road_length {
            return Err(invalid("scenario", "monitored stretch longer than the road"));
        }
        let g = self.flux()?;
        let slowest = self.v_green.min(self.v_red);
        inflow_to_boundary_density(self.inflow, slowest, &g)?;
        Ok(())
    }

    /// Speed limit per exit-light color.
    pub fn speed_profile(&self) -> Result<SpeedProfile> {
        let mut breaks = vec![0.0];
        let mut values = vec![self.speed_for(self.exit.initial)];
        for (t, c) in self.exit.switches(self.horizon) {
            breaks.push(t);
            values.push(self.speed_for(c));
        }
        breaks.push(self.horizon);
        SpeedProfile::new(breaks, values, self.v_green.min(self.v_red))
    }

    fn speed_for(&self, c: LightColor) -> f64 {
        match c {
            LightColor::Green => self.v_green,
            LightColor::Red => self.v_red,
        }
    }
}

/// Subcritical density `u ∈ [0, R/2]` carrying flow `q` at speed `v`:
/// the smaller root of `v u (1 − u/R) = q`.
pub fn inflow_to_boundary_density(q: f64, speed: f64, g: &LwrFlux) -> Result<f64> {
    let capacity = speed * g.capacity();
    if q > capacity * (1.0 + CAPACITY_RTOL) {
        return Err(Error::Infeasible { flow: q, capacity });
    }
    if q >= capacity {
        return Ok(g.critical_density());
    }
    let r = g.max_density;
    let s = q / speed;
    // 2s / (1 + sqrt(1 − 4s/R)) avoids cancellation for small flows
    Ok(2.0 * s / (1.0 + (1.0 - 4.0 * s / r).max(0.0).sqrt()))
}

/// Segment problem: empty road, entry datum metering the inflow while the
/// entry light is green, exit datum `R` (wall) on red and `0` (free) on green.
pub fn build_problem(s: &TrafficScenario) -> Result<IbvpProblem> {
    s.validate()?;
    let g = s.flux()?;
    let speed = s.speed_profile()?;
    let cutoff = s.inflow_cutoff();
    let t_end = s.horizon;

    let mut cuts: Vec<f64> = vec![0.0, t_end];
    cuts.extend(s.entry.switches(t_end).into_iter().map(|(t, _)| t));
    cuts.extend(s.exit.switches(t_end).into_iter().map(|(t, _)| t));
    if cutoff < t_end {
        cuts.push(cutoff);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut left_vals = Vec::with_capacity(cuts.len() - 1);
    for &t in &cuts[..cuts.len() - 1] {
        let open = t < cutoff && s.entry.color_at(t) == LightColor::Green;
        left_vals.push(if open {
            inflow_to_boundary_density(s.inflow, speed.at(t), &g)?
        } else {
            0.0
        });
    }
    let left = StepFn::new(cuts.clone(), left_vals)?;

    let mut rb = vec![0.0];
    let mut rv = vec![exit_datum(s.exit.initial, s.max_density)];
    for (t, c) in s.exit.switches(t_end) {
        rb.push(t);
        rv.push(exit_datum(c, s.max_density));
    }
    rb.push(t_end);
    let right = StepFn::new(rb, rv)?;
    let initial = StepFn::constant(0.0, s.road_length, 0.0)?;
    IbvpProblem::segment(initial, left, right, speed, Arc::new(g))
}

fn exit_datum(c: LightColor, r: f64) -> f64 {
    match c {
        LightColor::Green => 0.0,
        LightColor::Red => r,
    }
}

/// Queue weight: 0 below `0.75R`, linear ramp to 1 at `0.85R`, 1 above.
pub fn psi(r: f64, max_density: f64) -> f64 {
    let x = r / max_density;
    if x < 0.75 {
        0.0
    } else if x <= 0.85 {
        (10.0 * x - 7.5).clamp(0.0, 1.0)
    } else {
        1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueueFunctionalResult {
    /// `J` in m·s.
    pub j: f64,
    /// `(t, ∫_{L−δ}^{L} Ψ(u(t,x)) dx)` at each recorded time.
    pub integrand: Vec<(f64, f64)>,
    pub v_red: f64,
}

/// `J = ∫_0^T ∫_{L−δ}^{L} Ψ(u) dx dt`: cell midpoint rule in space with
/// partial cells weighted by their overlap, trapezoid rule over the
/// recorded times.
pub fn queue_functional(field: &SolutionField, s: &TrafficScenario) -> Result<QueueFunctionalResult> {
    let edges = field.grid.edges();
    let (a, b) = (s.road_length - s.delta, s.road_length);
    if field.grid.x_lo > a || field.grid.x_hi < b {
        return Err(invalid("queue functional", "field does not cover the monitored stretch"));
    }
    let overlap: Vec<f64> = edges
        .windows(2)
        .map(|w| (w[1].min(b) - w[0].max(a)).max(0.0))
        .collect();
    let integrand: Vec<(f64, f64)> = field
        .times
        .iter()
        .zip(&field.profiles)
        .map(|(&t, u)| {
            let v = u
                .iter()
                .zip(&overlap)
                .filter(|(_, &w)| w > 0.0)
                .map(|(&x, &w)| psi(x, s.max_density) * w)
                .sum::<f64>();
            (t, v)
        })
        .collect();
    let j = integrand
        .windows(2)
        .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
        .sum();
    Ok(QueueFunctionalResult {
        j,
        integrand,
        v_red: s.v_red,
    })
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub scenario: TrafficScenario,
    pub problem: IbvpProblem,
    pub field: SolutionField,
    pub queue: QueueFunctionalResult,
}

impl ScenarioRun {
    pub fn total_discharge(&self) -> f64 {
        self.field.total_discharge()
    }

    pub fn total_admitted(&self) -> f64 {
        self.field.diagnostics.mass_in
    }

    /// First recorded time after which the road holds fewer than
    /// [`EMPTY_ROAD_CARS`] cars at every later record.
    pub fn emptying_time(&self) -> Option<f64> {
        let n = self.field.len();
        let mut first_empty = None;
        for i in (0..n).rev() {
            if self.field.mass(i) < EMPTY_ROAD_CARS {
                first_empty = Some(self.field.times[i]);
            } else {
                break;
            }
        }
        first_empty
    }
}

pub fn run_scenario(s: &TrafficScenario, n_cells: usize, cfl: f64) -> Result<ScenarioRun> {
    let problem = build_problem(s)?;
    let grid = GridSpec::covering(&problem, n_cells)?;
    let config = SolverConfig::with_cfl(cfl).uniform_records(s.horizon, s.record_dt);
    let field = solve(&problem, &grid, &config)?;
    let queue = queue_functional(&field, s)?;
    Ok(ScenarioRun {
        scenario: s.clone(),
        problem,
        field,
        queue,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub v_red_kmh: f64,
    pub j: f64,
    pub total_discharge: f64,
    pub emptying_time: Option<f64>,
}

/// Runs the scenario once per red-phase speed limit (km/h).
pub fn sweep_speed_limits(
    template: &TrafficScenario,
    speeds_kmh: &[f64],
    n_cells: usize,
    cfl: f64,
    exec: Execution,
) -> Result<Vec<SweepRow>> {
    let scenarios: Vec<TrafficScenario> = speeds_kmh.iter().map(|&v| template.with_v_red_kmh(v)).collect();
    for s in &scenarios {
        s.validate()?;
    }
    let jobs: Vec<(f64, TrafficScenario)> = speeds_kmh.iter().copied().zip(scenarios).collect();
    exec::map(exec, &jobs, |(v_kmh, s)| {
        let run = run_scenario(s, n_cells, cfl)?;
        Ok(SweepRow {
            v_red_kmh: *v_kmh,
            j: run.queue.j,
            total_discharge: run.total_discharge(),
            emptying_time: run.emptying_time(),
        })
    })
    .into_iter()
    .collect()
}

/// Largest flow the road can carry at speed `v` (cars/s).
pub fn capacity(speed: f64, g: &LwrFlux) -> f64 {
    speed * g.eval(g.critical_density())
}
