//! Time-dependent speed factors `v(t)`, density flux factors `g(u)`, the
//! time-rescaling map `Γ` that turns `v(t) g(u)` into an autonomous flux,
//! and the causal mollifier used to approximate discontinuous speeds.

use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::step::StepFn;

/// Default sampling step (s) for smooth speed functions.
pub const DEFAULT_SPEED_RESOLUTION: f64 = 1e-3;

pub fn kmh_to_ms(v: f64) -> f64 {
    v / 3.6
}

pub fn ms_to_kmh(v: f64) -> f64 {
    v * 3.6
}

/// Piecewise-constant speed profile on `[0, T]`, bounded below by `v_min > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedProfile {
    steps: StepFn,
    v_min: f64,
    /// `cumulative[i] = ∫_0^{breaks[i]} v`.
    cumulative: Vec<f64>,
}

impl SpeedProfile {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>, v_min: f64) -> Result<Self> {
        Self::from_steps(StepFn::new(breaks, values)?, v_min)
    }

    pub fn from_steps(steps: StepFn, v_min: f64) -> Result<Self> {
        if !(v_min > 0.0) {
            return Err(invalid("speed profile", format!("v_min = {v_min} must be positive")));
        }
        if steps.lo() != 0.0 {
            return Err(invalid("speed profile", "must start at t = 0"));
        }
        if let Some(&v) = steps.values().iter().find(|&&v| v < v_min) {
            return Err(invalid("speed profile", format!("value {v} below v_min {v_min}")));
        }
        let mut cumulative = Vec::with_capacity(steps.breakpoints().len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for (p, q, v) in steps.pieces() {
            acc += v * (q - p);
            cumulative.push(acc);
        }
        Ok(SpeedProfile {
            steps,
            v_min,
            cumulative,
        })
    }

    pub fn constant(v: f64, horizon: f64) -> Result<Self> {
        Self::new(vec![0.0, horizon], vec![v], v)
    }

    /// Samples a smooth speed function onto a fine step profile.
    pub fn sample(horizon: f64, resolution: f64, v_min: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_steps(StepFn::sample(0.0, horizon, resolution, f)?, v_min)
    }

    pub fn horizon(&self) -> f64 {
        self.steps.hi()
    }

    pub fn v_min(&self) -> f64 {
        self.v_min
    }

    pub fn steps(&self) -> &StepFn {
        &self.steps
    }

    pub fn breakpoints(&self) -> &[f64] {
        self.steps.breakpoints()
    }

    /// Right-continuous value, clamped to the horizon.
    pub fn at(&self, t: f64) -> f64 {
        self.steps.eval(t)
    }

    pub fn value_at(&self, t: f64) -> Result<f64> {
        self.steps.value_at(t)
    }

    /// `‖v‖_{L∞([0,t])}`.
    pub fn sup_on(&self, t: f64) -> f64 {
        self.steps.range_on(0.0, t.min(self.horizon())).1
    }

    pub fn sup(&self) -> f64 {
        self.steps.range().1
    }

    fn check_time(&self, t: f64) -> Result<f64> {
        let h = self.horizon();
        let slack = 1e-12 * h;
        if !(t >= -slack && t <= h + slack) {
            return Err(Error::Domain {
                what: "time",
                value: t,
                lo: 0.0,
                hi: h,
            });
        }
        Ok(t.clamp(0.0, h))
    }

    /// Rescaled time `Γ⁻¹(t) = ∫_0^t v(s) ds`.
    pub fn gamma_inverse(&self, t: f64) -> Result<f64> {
        let t = self.check_time(t)?;
        if t == self.horizon() {
            return Ok(self.rescaled_horizon());
        }
        let breaks = self.steps.breakpoints();
        let i = self.steps.piece_index(t);
        Ok(self.cumulative[i] + self.steps.values()[i] * (t - breaks[i]))
    }

    /// `Γ⁻¹(T)`, the rescaled horizon.
    pub fn rescaled_horizon(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Physical time `Γ(τ)`, the inverse of [`Self::gamma_inverse`].
    pub fn gamma(&self, tau: f64) -> Result<f64> {
        let end = self.rescaled_horizon();
        let slack = 1e-12 * end;
        if !(tau >= -slack && tau <= end + slack) {
            return Err(Error::Domain {
                what: "rescaled time",
                value: tau,
                lo: 0.0,
                hi: end,
            });
        }
        let tau = tau.clamp(0.0, end);
        if tau == end {
            return Ok(self.horizon());
        }
        let n = self.steps.values().len();
        let i = (self.cumulative.partition_point(|&c| c <= tau)).saturating_sub(1).min(n - 1);
        let t = self.steps.breakpoints()[i] + (tau - self.cumulative[i]) / self.steps.values()[i];
        Ok(t.min(self.horizon()))
    }

    /// Exact `‖v − w‖_{L1([0,t])}`; both profiles must share the horizon.
    pub fn l1_distance(&self, other: &SpeedProfile, t: f64) -> Result<f64> {
        if self.horizon() != other.horizon() {
            return Err(invalid(
                "speed L1 distance",
                format!("horizons {} and {} differ", self.horizon(), other.horizon()),
            ));
        }
        let t = self.check_time(t)?;
        self.steps.l1_distance_on(&other.steps, 0.0, t)
    }

    /// Causal mollification `v_n = (v̄ * η_n)` with `v̄ = v_min` outside `[0, T]`,
    /// sampled at the left end of each cell of width ≤ `resolution`.
    ///
    /// The kernel `η(z) = 140 (z(1−z))³` on `[0, 1]` looks only into the past,
    /// so each sample is a convex combination of `v_min` and values of `v` on
    /// `[t − 1/n, t]`.
    pub fn mollify(&self, n: u32, resolution: f64) -> Result<SpeedProfile> {
        if n == 0 {
            return Err(invalid("mollifier", "n must be at least 1"));
        }
        if !(resolution > 0.0) {
            return Err(invalid("mollifier", "resolution must be positive"));
        }
        let h = self.horizon();
        let cells = (h / resolution).ceil().max(1.0) as usize;
        let dt = h / cells as f64;
        let breaks: Vec<f64> = (0..=cells).map(|i| if i == cells { h } else { i as f64 * dt }).collect();
        let values = breaks[..cells]
            .iter()
            .map(|&t| self.mollified_at(n as f64, t))
            .collect();
        SpeedProfile::new(breaks, values, self.v_min)
    }

    /// `∫_0^1 v̄(t − z/n) η(z) dz`, integrated exactly piece by piece.
    fn mollified_at(&self, n: f64, t: f64) -> f64 {
        let mut acc = 0.0;
        let mut covered = 0.0;
        for (p, q, v) in self.steps.pieces() {
            // t − z/n ∈ [p, q)  ⇔  z ∈ (n(t − q), n(t − p)]
            let z_lo = (n * (t - q)).max(0.0);
            let z_hi = (n * (t - p)).min(1.0);
            if z_hi > z_lo {
                let m = bump_cdf(z_hi) - bump_cdf(z_lo);
                acc += v * m;
                covered += m;
            }
        }
        // the part of the kernel reaching before t = 0 (or past T) sees v_min
        (acc + self.v_min * (1.0 - covered).max(0.0)).max(self.v_min)
    }
}

/// Polynomial bump `140 (z(1−z))³` on `[0, 1]`, unit mass.
pub fn bump(z: f64) -> f64 {
    if (0.0..=1.0).contains(&z) {
        140.0 * (z * (1.0 - z)).powi(3)
    } else {
        0.0
    }
}

/// Antiderivative of [`bump`], 0 at `z = 0` and 1 at `z = 1`.
pub fn bump_cdf(z: f64) -> f64 {
    let z = z.clamp(0.0, 1.0);
    let z4 = z.powi(4);
    140.0 * z4 * (0.25 - 0.6 * z + 0.5 * z * z - z * z * z / 7.0)
}

/// The density-dependent flux factor `g`.
pub trait FluxModel: Debug + Send + Sync {
    fn eval(&self, u: f64) -> f64;

    fn derivative(&self, u: f64) -> f64;

    /// Density interval on which the model is asserted `C¹`.
    fn working_interval(&self) -> (f64, f64);

    /// `‖g'‖_{L∞([lo, hi])}`.
    fn derivative_bound(&self, lo: f64, hi: f64) -> f64 {
        sample_interval(lo, hi).map(|u| self.derivative(u).abs()).fold(0.0, f64::max)
    }

    fn min_on(&self, lo: f64, hi: f64) -> f64 {
        sample_interval(lo, hi).map(|u| self.eval(u)).fold(f64::INFINITY, f64::min)
    }

    fn max_on(&self, lo: f64, hi: f64) -> f64 {
        sample_interval(lo, hi).map(|u| self.eval(u)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Godunov flux for the pair `(left, right)`.
    fn godunov(&self, left: f64, right: f64) -> f64 {
        if left <= right {
            self.min_on(left, right)
        } else {
            self.max_on(right, left)
        }
    }

    /// The LWR specialization, if this is one; used by the exact Riemann oracle.
    fn as_lwr(&self) -> Option<&LwrFlux> {
        None
    }
}

pub type SharedFlux = Arc<dyn FluxModel>;

const SAMPLES: usize = 1024;

fn sample_interval(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    (0..=SAMPLES).map(move |i| {
        if i == SAMPLES {
            hi
        } else {
            lo + (hi - lo) * i as f64 / SAMPLES as f64
        }
    })
}

/// Largest normalized mismatch `|FD − g'| / (1 + |g'|)` between a central
/// difference of `eval` and `derivative` over the working interval.
pub fn derivative_mismatch(g: &dyn FluxModel, samples: usize) -> f64 {
    let (lo, hi) = g.working_interval();
    let h = 1e-6 * (hi - lo).max(1e-12);
    (0..=samples)
        .map(|i| {
            let u = lo + (hi - lo) * i as f64 / samples as f64;
            let fd = (g.eval(u + h) - g.eval(u - h)) / (2.0 * h);
            let d = g.derivative(u);
            (fd - d).abs() / (1.0 + d.abs())
        })
        .fold(0.0, f64::max)
}

/// Lighthill–Whitham–Richards flux factor `g(u) = u (1 − u/R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LwrFlux {
    pub max_density: f64,
}

impl LwrFlux {
    pub fn new(max_density: f64) -> Result<Self> {
        if !(max_density > 0.0 && max_density.is_finite()) {
            return Err(invalid("LWR flux", format!("R = {max_density} must be positive")));
        }
        Ok(LwrFlux { max_density })
    }

    pub fn critical_density(&self) -> f64 {
        0.5 * self.max_density
    }

    /// `max g = R/4`.
    pub fn capacity(&self) -> f64 {
        0.25 * self.max_density
    }
}

impl FluxModel for LwrFlux {
    fn eval(&self, u: f64) -> f64 {
        u * (1.0 - u / self.max_density)
    }

    fn derivative(&self, u: f64) -> f64 {
        1.0 - 2.0 * u / self.max_density
    }

    fn working_interval(&self) -> (f64, f64) {
        (0.0, self.max_density)
    }

    fn derivative_bound(&self, lo: f64, hi: f64) -> f64 {
        self.derivative(lo).abs().max(self.derivative(hi).abs())
    }

    fn min_on(&self, lo: f64, hi: f64) -> f64 {
        self.eval(lo).min(self.eval(hi))
    }

    fn max_on(&self, lo: f64, hi: f64) -> f64 {
        let c = self.critical_density();
        if lo <= c && c <= hi {
            self.eval(c)
        } else {
            self.eval(lo).max(self.eval(hi))
        }
    }

    fn as_lwr(&self) -> Option<&LwrFlux> {
        Some(self)
    }
}

/// Linear transport `g(u) = a u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFlux {
    pub speed: f64,
    pub interval: (f64, f64),
}

impl FluxModel for LinearFlux {
    fn eval(&self, u: f64) -> f64 {
        self.speed * u
    }

    fn derivative(&self, _u: f64) -> f64 {
        self.speed
    }

    fn working_interval(&self) -> (f64, f64) {
        self.interval
    }

    fn derivative_bound(&self, _lo: f64, _hi: f64) -> f64 {
        self.speed.abs()
    }

    fn min_on(&self, lo: f64, hi: f64) -> f64 {
        self.eval(lo).min(self.eval(hi))
    }

    fn max_on(&self, lo: f64, hi: f64) -> f64 {
        self.eval(lo).max(self.eval(hi))
    }
}
