//! Lax–Friedrichs finite volumes with Godunov boundary fluxes against the
//! boundary data (the discrete form of the Bardos–le Roux–Nédélec
//! condition), and the alternative solve through the time rescaling `Γ`.

use crate::error::{invalid, Error, Result};
use crate::flux::{FluxModel, SpeedProfile};
use crate::ibvp::{DomainKind, IbvpProblem, StepFn};
use std::sync::Arc;

pub const DEFAULT_CFL: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n_cells: usize,
    pub x_lo: f64,
    pub x_hi: f64,
}

impl GridSpec {
    pub fn new(n_cells: usize, x_lo: f64, x_hi: f64) -> Result<Self> {
        if n_cells < 4 {
            return Err(invalid("grid", format!("{n_cells} cells (need at least 4)")));
        }
        if !(x_hi > x_lo) || !x_lo.is_finite() || !x_hi.is_finite() {
            return Err(invalid("grid", format!("bad extent [{x_lo}, {x_hi}]")));
        }
        Ok(GridSpec { n_cells, x_lo, x_hi })
    }

    pub fn covering(problem: &IbvpProblem, n_cells: usize) -> Result<Self> {
        Self::new(n_cells, 0.0, problem.length())
    }

    pub fn dx(&self) -> f64 {
        (self.x_hi - self.x_lo) / self.n_cells as f64
    }

    pub fn edges(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..=self.n_cells)
            .map(|i| if i == self.n_cells { self.x_hi } else { self.x_lo + i as f64 * dx })
            .collect()
    }

    pub fn centers(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n_cells).map(|i| self.x_lo + (i as f64 + 0.5) * dx).collect()
    }

    pub fn refine(&self) -> Self {
        GridSpec {
            n_cells: 2 * self.n_cells,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryMode {
    #[default]
    GodunovBln,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub cfl: f64,
    /// Times at which profiles are stored; empty means `{0, T}`.
    pub record_times: Vec<f64>,
    pub boundary_mode: BoundaryMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            cfl: DEFAULT_CFL,
            record_times: Vec::new(),
            boundary_mode: BoundaryMode::GodunovBln,
        }
    }
}

impl SolverConfig {
    pub fn with_cfl(cfl: f64) -> Self {
        SolverConfig {
            cfl,
            ..Self::default()
        }
    }

    /// Records at `0, dt, 2dt, …` and at `T`.
    pub fn uniform_records(mut self, horizon: f64, dt: f64) -> Self {
        let n = (horizon / dt).round().max(1.0) as usize;
        self.record_times = (0..=n).map(|i| (i as f64 * dt).min(horizon)).collect();
        if *self.record_times.last().unwrap() < horizon {
            self.record_times.push(horizon);
        }
        self.record_times.dedup();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(invalid("solver config", format!("cfl = {} not in (0, 1]", self.cfl)));
        }
        Ok(())
    }
}

/// One accepted time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub dt: f64,
    pub speed: f64,
    /// Numerical flux through `x = x_lo` (cars/s, positive into the domain).
    pub influx: f64,
    /// Numerical flux through `x = x_hi` (cars/s, positive out of the domain).
    pub outflux: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub steps: Vec<StepRecord>,
    pub initial_mass: f64,
    pub final_mass: f64,
    pub mass_in: f64,
    pub mass_out: f64,
}

impl Diagnostics {
    pub fn throughput(&self) -> f64 {
        self.initial_mass.abs() + self.mass_in.abs() + self.mass_out.abs()
    }

    /// `|ΔM − ∫(F_in − F_out)|`.
    pub fn mass_defect(&self) -> f64 {
        ((self.final_mass - self.initial_mass) - (self.mass_in - self.mass_out)).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    pub times: Vec<f64>,
    pub profiles: Vec<Vec<f64>>,
    pub grid: GridSpec,
    pub diagnostics: Diagnostics,
}

impl SolutionField {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &[f64] {
        self.profiles.last().expect("empty solution field")
    }

    pub fn mass(&self, i: usize) -> f64 {
        self.profiles[i].iter().sum::<f64>() * self.grid.dx()
    }

    pub fn tv(&self, i: usize) -> f64 {
        profile_tv(&self.profiles[i])
    }

    /// Index of the recorded time closest to `t`.
    pub fn index_near(&self, t: f64) -> usize {
        let mut best = 0;
        for (i, &s) in self.times.iter().enumerate() {
            if (s - t).abs() < (self.times[best] - t).abs() {
                best = i;
            }
        }
        best
    }

    pub fn total_discharge(&self) -> f64 {
        self.diagnostics.mass_out
    }

    /// The profile as a step function on the grid.
    pub fn step_fn(&self, i: usize) -> Result<StepFn> {
        StepFn::new(self.grid.edges(), self.profiles[i].clone())
    }
}

pub fn profile_tv(u: &[f64]) -> f64 {
    u.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// `Σ |u_j − w_j| Δx` for profiles on the same grid.
pub fn l1_cells(u: &[f64], w: &[f64], dx: f64) -> f64 {
    debug_assert_eq!(u.len(), w.len());
    u.iter().zip(w).map(|(a, b)| (a - b).abs()).sum::<f64>() * dx
}

/// L1 distance between profiles on nested uniform grids over the same extent;
/// the coarser one is compared cell-wise after averaging the finer one.
pub fn l1_nested(u: &[f64], w: &[f64], extent: f64) -> Result<f64> {
    let (fine, coarse) = if u.len() >= w.len() { (u, w) } else { (w, u) };
    if fine.len() % coarse.len() != 0 {
        return Err(invalid("nested grids", format!("{} not a multiple of {}", fine.len(), coarse.len())));
    }
    // compare as step functions on the fine grid
    let r = fine.len() / coarse.len();
    let dx = extent / fine.len() as f64;
    Ok(fine
        .iter()
        .enumerate()
        .map(|(j, &a)| (a - coarse[j / r]).abs())
        .sum::<f64>()
        * dx)
}

/// State supplied at one end of the domain for a single step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Edge {
    /// Ghost cell value, coupled through the Lax–Friedrichs flux.
    Ghost(f64),
    /// Prescribed numerical flux through the edge.
    Flux(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Side {
    Left,
    Right,
}

/// Godunov flux between the boundary datum, taken as the exterior state,
/// and the interior trace.
pub fn bln_boundary_flux(interior: f64, datum: f64, speed: f64, g: &dyn FluxModel, side: Side) -> f64 {
    match side {
        Side::Left => speed * g.godunov(datum, interior),
        Side::Right => speed * g.godunov(interior, datum),
    }
}

fn lf_flux(a: f64, b: f64, fa: f64, fb: f64, half_ratio: f64) -> f64 {
    // ½(f(a) + f(b)) − (Δx / 2Δt)(b − a)
    0.5 * (fa + fb) - half_ratio * (b - a)
}

/// Edge fluxes realized by one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeFluxes {
    pub left: f64,
    pub right: f64,
}

/// One Lax–Friedrichs step of `∂ₜu + ∂ₓ(v g(u)) = 0` in conservation form.
///
/// Interior cells follow `uⱼ' = ½(uⱼ₋₁ + uⱼ₊₁) − (Δt/2Δx) v (g(uⱼ₊₁) − g(uⱼ₋₁))`;
/// the ends use either a ghost state or a prescribed flux. Total mass
/// changes by exactly `Δt (F_left − F_right)` up to rounding.
pub fn lax_friedrichs_step(
    profile: &[f64],
    speed: f64,
    g: &dyn FluxModel,
    dt: f64,
    dx: f64,
    left: Edge,
    right: Edge,
) -> Result<(Vec<f64>, EdgeFluxes)> {
    let (lo, hi) = extended_range(profile, left, right);
    let limit = dx / (speed * g.derivative_bound(lo, hi));
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::StepSize { dt, limit });
    }
    let mut out = vec![0.0; profile.len()];
    let mut fluxes = vec![0.0; profile.len() + 1];
    let edges = lf_update(profile, &mut out, &mut fluxes, speed, g, dt, dx, left, right);
    Ok((out, edges))
}

fn extended_range(profile: &[f64], left: Edge, right: Edge) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let ghosts = [left, right].into_iter().filter_map(|e| match e {
        Edge::Ghost(u) => Some(u),
        Edge::Flux(_) => None,
    });
    for u in profile.iter().copied().chain(ghosts) {
        lo = lo.min(u);
        hi = hi.max(u);
    }
    (lo, hi)
}

#[allow(clippy::too_many_arguments)]
fn lf_update(
    u: &[f64],
    out: &mut [f64],
    fluxes: &mut [f64],
    speed: f64,
    g: &dyn FluxModel,
    dt: f64,
    dx: f64,
    left: Edge,
    right: Edge,
) -> EdgeFluxes {
    let n = u.len();
    let half_ratio = 0.5 * dx / dt;
    let f = |x: f64| speed * g.eval(x);
    let mut f_prev = f(u[0]);
    fluxes[0] = match left {
        Edge::Ghost(a) => lf_flux(a, u[0], f(a), f_prev, half_ratio),
        Edge::Flux(v) => v,
    };
    for j in 0..n - 1 {
        let f_next = f(u[j + 1]);
        fluxes[j + 1] = lf_flux(u[j], u[j + 1], f_prev, f_next, half_ratio);
        f_prev = f_next;
    }
    fluxes[n] = match right {
        Edge::Ghost(b) => lf_flux(u[n - 1], b, f_prev, f(b), half_ratio),
        Edge::Flux(v) => v,
    };
    let lambda = dt / dx;
    for j in 0..n {
        out[j] = u[j] - lambda * (fluxes[j + 1] - fluxes[j]);
    }
    EdgeFluxes {
        left: fluxes[0],
        right: fluxes[n],
    }
}

/// Marches the problem from `0` to `T`.
///
/// The step is `cfl Δx / (v(t) ‖g'‖_{L∞(𝒰)})`, clipped so that every
/// breakpoint of `v`, of the boundary data, and every record time is hit
/// exactly; `v` and the data are therefore constant across each step.
pub fn solve(problem: &IbvpProblem, grid: &GridSpec, config: &SolverConfig) -> Result<SolutionField> {
    config.validate()?;
    check_grid(problem, grid)?;
    let horizon = problem.horizon;
    let records = record_schedule(&config.record_times, horizon)?;
    let mut events = problem.time_events();
    events.extend(records.iter().copied().filter(|&t| t > 0.0 && t < horizon));
    events.push(horizon);
    events.sort_by(f64::total_cmp);
    events.dedup();

    let hull = problem.hull_full();
    let mut slope = problem.flux.derivative_bound(hull.lo, hull.hi);
    if !(slope > 0.0) {
        let (a, b) = problem.flux.working_interval();
        slope = problem.flux.derivative_bound(a, b);
    }
    if !(slope > 0.0) {
        slope = 1.0;
    }

    let dx = grid.dx();
    let g = problem.flux.as_ref();
    let mut u = problem.initial.cell_averages(&grid.edges());
    let mut next = vec![0.0; u.len()];
    let mut fluxes = vec![0.0; u.len() + 1];

    let mut diag = Diagnostics {
        initial_mass: u.iter().sum::<f64>() * dx,
        ..Diagnostics::default()
    };
    let mut times = Vec::with_capacity(records.len());
    let mut profiles = Vec::with_capacity(records.len());
    let mut rec = records.iter().peekable();
    if rec.peek() == Some(&&0.0) {
        times.push(0.0);
        profiles.push(u.clone());
        rec.next();
    }

    let mut t = 0.0;
    let mut ev = 0;
    while t < horizon {
        while events[ev] <= t {
            ev += 1;
        }
        let target = events[ev];
        let v = problem.speed.at(t);
        let dt_cfl = config.cfl * dx / (v * slope);
        let (dt, t_new) = if t + dt_cfl >= target * (1.0 - 1e-14) {
            (target - t, target)
        } else {
            (dt_cfl, t + dt_cfl)
        };

        let n = u.len();
        let left = Edge::Flux(bln_boundary_flux(u[0], problem.left.eval(t), v, g, Side::Left));
        let right = match (&problem.kind, &problem.right) {
            (DomainKind::Segment { .. }, Some(r)) => {
                Edge::Flux(bln_boundary_flux(u[n - 1], r.eval(t), v, g, Side::Right))
            }
            // free outflow: copy-out ghost
            _ => Edge::Ghost(u[n - 1]),
        };
        let edges = lf_update(&u, &mut next, &mut fluxes, v, g, dt, dx, left, right);
        if next.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical {
                t: t_new,
                reason: "non-finite cell average".into(),
            });
        }
        std::mem::swap(&mut u, &mut next);
        diag.mass_in += edges.left * dt;
        diag.mass_out += edges.right * dt;
        diag.steps.push(StepRecord {
            t,
            dt,
            speed: v,
            influx: edges.left,
            outflux: edges.right,
        });
        t = t_new;
        while let Some(&&r) = rec.peek() {
            if r <= t {
                times.push(t);
                profiles.push(u.clone());
                rec.next();
            } else {
                break;
            }
        }
    }
    diag.final_mass = u.iter().sum::<f64>() * dx;
    let allowed = 1e-10 * diag.throughput().max(f64::MIN_POSITIVE);
    if diag.mass_defect() > allowed {
        return Err(Error::Numerical {
            t,
            reason: format!("mass balance defect {} > {allowed}", diag.mass_defect()),
        });
    }
    Ok(SolutionField {
        times,
        profiles,
        grid: *grid,
        diagnostics: diag,
    })
}

fn check_grid(problem: &IbvpProblem, grid: &GridSpec) -> Result<()> {
    let len = problem.length();
    if grid.x_lo != 0.0 || (grid.x_hi - len).abs() > 1e-12 * len {
        return Err(invalid(
            "grid",
            format!("extent [{}, {}] does not match domain [0, {len}]", grid.x_lo, grid.x_hi),
        ));
    }
    if let DomainKind::HalfLine { x_max } = problem.kind {
        let need = problem.initial.support_end() + problem.max_wave_speed() * problem.horizon + grid.dx();
        if x_max < need {
            return Err(invalid(
                "grid",
                format!("truncation {x_max} m leaves no spare cell beyond the reach {need} m"),
            ));
        }
    }
    Ok(())
}

fn record_schedule(requested: &[f64], horizon: f64) -> Result<Vec<f64>> {
    let mut r: Vec<f64> = if requested.is_empty() {
        vec![0.0, horizon]
    } else {
        requested.to_vec()
    };
    if let Some(&bad) = r.iter().find(|&&t| !(t >= 0.0 && t <= horizon)) {
        return Err(Error::Domain {
            what: "record time",
            value: bad,
            lo: 0.0,
            hi: horizon,
        });
    }
    r.sort_by(f64::total_cmp);
    r.dedup();
    Ok(r)
}

/// Solves through the autonomous problem `∂_τ w + ∂ₓ g(w) = 0` on
/// `[0, Γ⁻¹(T)]` with `w_b(τ) = u_b(Γ(τ))`, then reads `u(t) = w(Γ⁻¹(t))`.
pub fn solve_via_gamma(problem: &IbvpProblem, grid: &GridSpec, config: &SolverConfig) -> Result<SolutionField> {
    config.validate()?;
    let speed = &problem.speed;
    let to_tau = |t: f64| speed.gamma_inverse(t).expect("boundary breakpoint inside horizon");
    let rescaled = SpeedProfile::constant(1.0, speed.rescaled_horizon())?;
    let left = problem.left.map_breakpoints(to_tau)?;
    let right = problem.right.as_ref().map(|r| r.map_breakpoints(to_tau)).transpose()?;
    let autonomous = IbvpProblem {
        kind: problem.kind,
        initial: problem.initial.clone(),
        left,
        right,
        horizon: rescaled.horizon(),
        speed: rescaled,
        flux: Arc::clone(&problem.flux),
    };
    let requested = record_schedule(&config.record_times, problem.horizon)?;
    let tau_records = requested
        .iter()
        .map(|&t| speed.gamma_inverse(t))
        .collect::<Result<Vec<_>>>()?;
    let cfg = SolverConfig {
        record_times: tau_records,
        ..config.clone()
    };
    let w = solve(&autonomous, grid, &cfg)?;

    let steps = w
        .diagnostics
        .steps
        .iter()
        .map(|s| {
            let t0 = speed.gamma(s.t)?;
            let t1 = speed.gamma(s.t + s.dt)?;
            let dt = t1 - t0;
            let scale = if dt > 0.0 { s.dt / dt } else { speed.at(t0) };
            Ok(StepRecord {
                t: t0,
                dt,
                speed: speed.at(t0),
                influx: s.influx * scale,
                outflux: s.outflux * scale,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let times = w.times.iter().map(|&tau| speed.gamma(tau)).collect::<Result<Vec<_>>>()?;
    Ok(SolutionField {
        times,
        profiles: w.profiles,
        grid: w.grid,
        diagnostics: Diagnostics { steps, ..w.diagnostics },
    })
}
