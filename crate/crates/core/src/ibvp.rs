//! Problem statements for `∂ₜu + ∂ₓ(v(t) g(u)) = 0` on a segment or a
//! truncated half line, together with the data functionals that control
//! every a priori bound: the hull of the data ranges and the total
//! variation functional.

use crate::error::{invalid, Result};
use crate::flux::{SharedFlux, SpeedProfile};
pub use crate::step::StepFn;

/// Piecewise-constant data; the name used throughout the problem layer.
pub type PiecewiseConstantFn = StepFn;

/// Closed interval `[lo, hi]` of densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullInterval {
    pub lo: f64,
    pub hi: f64,
}

impl HullInterval {
    pub fn point(v: f64) -> Self {
        HullInterval { lo: v, hi: v }
    }

    pub fn contains(&self, u: f64, tol: f64) -> bool {
        u >= self.lo - tol && u <= self.hi + tol
    }

    pub fn contains_interval(&self, other: &HullInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn union(&self, other: &HullInterval) -> Self {
        HullInterval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn inflate(&self, fraction: f64) -> Self {
        let pad = fraction * (self.hi - self.lo);
        HullInterval {
            lo: self.lo - pad,
            hi: self.hi + pad,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Smallest closed interval containing the range of `initial` on its whole
/// domain and of each boundary datum on `[0, t]`.
pub fn hull(initial: &StepFn, boundary: &[&StepFn], t: f64) -> HullInterval {
    let (lo, hi) = initial.range();
    boundary.iter().fold(HullInterval { lo, hi }, |h, b| {
        let (lo, hi) = b.range_on(b.lo(), t.min(b.hi()));
        h.union(&HullInterval { lo, hi })
    })
}

/// Hull of time data only, each restricted to `[0, t]`.
pub fn boundary_hull(boundary: &[&StepFn], t: f64) -> HullInterval {
    let mut it = boundary.iter().map(|b| {
        let (lo, hi) = b.range_on(b.lo(), t.min(b.hi()));
        HullInterval { lo, hi }
    });
    let first = it.next().unwrap_or(HullInterval::point(0.0));
    it.fold(first, |a, b| a.union(&b))
}

/// Value of a total variation functional at the end of a time window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvFunctionalValue {
    pub value: f64,
    pub window_end: f64,
}

/// `TV(u_o) + TV(u_b; [0,t]) + |u_b(0+) − u_o(0+)|`.
pub fn tv_functional(initial: &StepFn, boundary: &StepFn, t: f64) -> TvFunctionalValue {
    let value = initial.total_variation()
        + boundary.tv_on(boundary.lo(), t)
        + (boundary.first() - initial.first()).abs();
    TvFunctionalValue { value, window_end: t }
}

/// Segment form: both boundary variations and both compatibility jumps
/// `|u_b1(0+) − u_o(0+)|`, `|u_b2(0+) − u_o(L−)|`.
pub fn tv_functional_segment(
    initial: &StepFn,
    left: &StepFn,
    right: &StepFn,
    t: f64,
) -> TvFunctionalValue {
    let value = initial.total_variation()
        + left.tv_on(left.lo(), t)
        + right.tv_on(right.lo(), t)
        + (left.first() - initial.first()).abs()
        + (right.first() - initial.last()).abs();
    TvFunctionalValue { value, window_end: t }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BvCompositionCheck {
    /// `∫_0^y |u(x + φ(x)) − u(x)| dx`
    pub lhs: f64,
    /// `‖φ‖_{L∞([0,y])} TV(u; [0, y + ‖φ‖∞])`
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

/// Checks the shift estimate
/// `∫_0^y |u(x+φ(x)) − u(x)| dx ≤ ‖φ‖∞ TV(u; [0, y + ‖φ‖∞])`
/// for a nonnegative step shift `φ`. Shifted points reach past `y`, so the
/// variation window extends by `‖φ‖∞`. The left side is integrated exactly;
/// `u` is extended by its end values outside its domain.
pub fn bv_composition_bound_check(u: &StepFn, phi: &StepFn, y: f64) -> Result<BvCompositionCheck> {
    if phi.values().iter().any(|&h| h < 0.0) {
        return Err(invalid("shift", "must be nonnegative"));
    }
    if phi.lo() > 0.0 || phi.hi() < y || y < 0.0 {
        return Err(invalid("shift", format!("must cover [0, {y}]")));
    }
    let mut lhs = 0.0;
    let mut sup_phi: f64 = 0.0;
    for (p, q, h) in phi.pieces() {
        let (p, q) = (p.max(0.0), q.min(y));
        if q <= p {
            continue;
        }
        sup_phi = sup_phi.max(h);
        let mut cuts = vec![p, q];
        for &b in u.breakpoints() {
            for c in [b, b - h] {
                if c > p && c < q {
                    cuts.push(c);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        lhs += cuts
            .windows(2)
            .map(|w| {
                let m = 0.5 * (w[0] + w[1]);
                (u.eval(m + h) - u.eval(m)).abs() * (w[1] - w[0])
            })
            .sum::<f64>();
    }
    // jumps exactly at the window ends are crossed on a null set only
    let rhs = sup_phi * u.tv_on(0.0, y + sup_phi);
    let margin = rhs - lhs;
    Ok(BvCompositionCheck {
        lhs,
        rhs,
        margin,
        pass: margin >= -1e-12 * (1.0 + rhs),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind {
    /// `[0, L]` with boundary data at both ends.
    Segment { length: f64 },
    /// `[0, X_max]` standing in for the half line; the right edge is free outflow.
    HalfLine { x_max: f64 },
}

impl DomainKind {
    pub fn right_end(&self) -> f64 {
        match *self {
            DomainKind::Segment { length } => length,
            DomainKind::HalfLine { x_max } => x_max,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IbvpProblem {
    pub kind: DomainKind,
    pub initial: StepFn,
    pub left: StepFn,
    pub right: Option<StepFn>,
    pub speed: SpeedProfile,
    pub flux: SharedFlux,
    pub horizon: f64,
}

impl IbvpProblem {
    pub fn segment(
        initial: StepFn,
        left: StepFn,
        right: StepFn,
        speed: SpeedProfile,
        flux: SharedFlux,
    ) -> Result<Self> {
        let p = IbvpProblem {
            kind: DomainKind::Segment { length: initial.hi() },
            horizon: speed.horizon(),
            initial,
            left,
            right: Some(right),
            speed,
            flux,
        };
        p.validate()?;
        Ok(p)
    }

    /// Half line truncated at `initial.hi()`. The truncation must sit beyond
    /// the support of `u_o` plus the farthest distance any wave can travel
    /// in `[0, T]`.
    pub fn half_line(initial: StepFn, left: StepFn, speed: SpeedProfile, flux: SharedFlux) -> Result<Self> {
        let p = IbvpProblem {
            kind: DomainKind::HalfLine { x_max: initial.hi() },
            horizon: speed.horizon(),
            initial,
            left,
            right: None,
            speed,
            flux,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.horizon;
        if self.initial.lo() != 0.0 {
            return Err(invalid("problem", "initial datum must start at x = 0"));
        }
        let time_data: Vec<&StepFn> = self.boundary_data();
        for b in &time_data {
            if b.domain() != (0.0, t) {
                return Err(invalid(
                    "problem",
                    format!("boundary datum domain {:?} != [0, {t}]", b.domain()),
                ));
            }
        }
        match (self.kind, &self.right) {
            (DomainKind::Segment { length }, Some(_)) if length == self.initial.hi() => {}
            (DomainKind::HalfLine { x_max }, None) if x_max == self.initial.hi() => {}
            _ => return Err(invalid("problem", "domain kind does not match the data")),
        }
        let (wlo, whi) = self.flux.working_interval();
        let u = self.hull_full();
        if u.lo < wlo || u.hi > whi {
            return Err(invalid(
                "problem",
                format!("data range [{}, {}] outside working interval [{wlo}, {whi}]", u.lo, u.hi),
            ));
        }
        if let DomainKind::HalfLine { x_max } = self.kind {
            let need = self.initial.support_end() + self.max_wave_speed() * t;
            if x_max < need {
                return Err(invalid(
                    "problem",
                    format!("half-line truncation {x_max} m closer than the reach {need} m"),
                ));
            }
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.kind.right_end()
    }

    pub fn boundary_data(&self) -> Vec<&StepFn> {
        let mut v = vec![&self.left];
        if let Some(r) = &self.right {
            v.push(r);
        }
        v
    }

    /// `𝒰(u_o, u_b|[0,t])`.
    pub fn hull(&self, t: f64) -> HullInterval {
        hull(&self.initial, &self.boundary_data(), t)
    }

    pub fn hull_full(&self) -> HullInterval {
        self.hull(self.horizon)
    }

    /// `‖v‖_{L∞([0,T])} ‖g'‖_{L∞(𝒰)}` with `𝒰` at the full horizon.
    pub fn max_wave_speed(&self) -> f64 {
        let u = self.hull_full();
        self.speed.sup() * self.flux.derivative_bound(u.lo, u.hi)
    }

    pub fn tv_functional(&self, t: f64) -> TvFunctionalValue {
        match &self.right {
            Some(r) => tv_functional_segment(&self.initial, &self.left, r, t),
            None => tv_functional(&self.initial, &self.left, t),
        }
    }

    pub fn with_speed(&self, speed: SpeedProfile) -> Result<Self> {
        let mut p = self.clone();
        p.horizon = speed.horizon();
        p.speed = speed;
        p.validate()?;
        Ok(p)
    }

    pub fn with_flux(&self, flux: SharedFlux) -> Result<Self> {
        let mut p = self.clone();
        p.flux = flux;
        p.validate()?;
        Ok(p)
    }

    pub fn with_data(&self, initial: StepFn, left: StepFn, right: Option<StepFn>) -> Result<Self> {
        let mut p = self.clone();
        p.initial = initial;
        p.left = left;
        p.right = right;
        p.validate()?;
        Ok(p)
    }

    /// Breakpoints of `v` and of every boundary datum inside `(0, T)`, sorted.
    pub fn time_events(&self) -> Vec<f64> {
        let t = self.horizon;
        let mut ev: Vec<f64> = self.speed.steps().interior_breaks(0.0, t).collect();
        for b in self.boundary_data() {
            ev.extend(b.interior_breaks(0.0, t));
        }
        ev.sort_by(f64::total_cmp);
        ev.dedup();
        ev
    }
}
