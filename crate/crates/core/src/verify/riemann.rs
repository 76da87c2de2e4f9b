//! Exact entropy solutions of LWR Riemann problems at constant speed, and
//! their juxtaposition for staircase data before any waves meet.

use crate::error::{invalid, Error, Result};
use crate::flux::{FluxModel, LwrFlux};
use crate::ibvp::StepFn;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaveKind {
    Constant,
    Shock { speed: f64 },
    /// Fan between the characteristic speeds of the two states.
    Rarefaction { left_edge: f64, right_edge: f64 },
}

/// Entropy solution of `∂ₜu + ∂ₓ(v u(1 − u/R)) = 0` with a single jump at `x0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSolution {
    pub left: f64,
    pub right: f64,
    pub x0: f64,
    pub speed: f64,
    pub max_density: f64,
    pub kind: WaveKind,
}

pub fn exact_riemann_lwr(left: f64, right: f64, speed: f64, max_density: f64) -> Result<RiemannSolution> {
    riemann_at(left, right, 0.0, speed, max_density)
}

/// As [`exact_riemann_lwr`], with the jump located at `x0`.
pub fn riemann_at(left: f64, right: f64, x0: f64, speed: f64, max_density: f64) -> Result<RiemannSolution> {
    let g = LwrFlux::new(max_density)?;
    let tol = 1e-12 * max_density;
    for u in [left, right] {
        if !(u >= -tol && u <= max_density + tol) {
            return Err(Error::Domain {
                what: "Riemann state",
                value: u,
                lo: 0.0,
                hi: max_density,
            });
        }
    }
    if !(speed > 0.0) {
        return Err(invalid("Riemann problem", "speed must be positive"));
    }
    let kind = if left == right {
        WaveKind::Constant
    } else if left < right {
        // concave flux: increasing jumps are admissible shocks
        WaveKind::Shock {
            speed: speed * (g.eval(left) - g.eval(right)) / (left - right),
        }
    } else {
        WaveKind::Rarefaction {
            left_edge: speed * g.derivative(left),
            right_edge: speed * g.derivative(right),
        }
    };
    Ok(RiemannSolution {
        left,
        right,
        x0,
        speed,
        max_density,
        kind,
    })
}

impl RiemannSolution {
    /// `(slowest, fastest)` signal speeds of the wave.
    pub fn extent(&self) -> (f64, f64) {
        match self.kind {
            WaveKind::Constant => (0.0, 0.0),
            WaveKind::Shock { speed } => (speed, speed),
            WaveKind::Rarefaction { left_edge, right_edge } => (left_edge, right_edge),
        }
    }

    pub fn sample(&self, t: f64, x: f64) -> f64 {
        if t <= 0.0 {
            return if x < self.x0 { self.left } else { self.right };
        }
        let xi = (x - self.x0) / t;
        match self.kind {
            WaveKind::Constant => self.left,
            WaveKind::Shock { speed } => {
                if xi < speed {
                    self.left
                } else {
                    self.right
                }
            }
            WaveKind::Rarefaction { left_edge, right_edge } => {
                if xi <= left_edge {
                    self.left
                } else if xi >= right_edge {
                    self.right
                } else {
                    // g'(u) v = ξ  ⇒  u = (R/2)(1 − ξ/v)
                    0.5 * self.max_density * (1.0 - xi / self.speed)
                }
            }
        }
    }

    /// Positions at time `t` where the profile has kinks or jumps.
    fn kinks(&self, t: f64) -> [f64; 2] {
        let (a, b) = self.extent();
        [self.x0 + a * t, self.x0 + b * t]
    }

    /// Exact `∫_a^b u(t, x) dx`; the profile is piecewise linear.
    pub fn integral(&self, t: f64, a: f64, b: f64) -> f64 {
        piecewise_linear_integral(a, b, &self.kinks(t), |x| self.sample(t, x))
    }
}

/// Integrates a function that is linear between the given cut points.
fn piecewise_linear_integral(a: f64, b: f64, cuts: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut pts = vec![a, b];
    pts.extend(cuts.iter().copied().filter(|&c| c > a && c < b));
    pts.sort_by(f64::total_cmp);
    // midpoint rule is exact for linear pieces
    pts.windows(2).map(|w| f(0.5 * (w[0] + w[1])) * (w[1] - w[0])).sum()
}

/// Juxtaposed Riemann solutions of a staircase datum at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct GluedRiemann {
    pub waves: Vec<RiemannSolution>,
    pub base: StepFn,
    pub t: f64,
}

/// First time at which two neighbouring waves touch, or a wave reaches
/// the end of the domain.
pub fn first_interaction_time(waves: &[RiemannSolution], lo: f64, hi: f64) -> f64 {
    let mut t_star = f64::INFINITY;
    for pair in waves.windows(2) {
        let (_, fast) = pair[0].extent();
        let (slow, _) = pair[1].extent();
        if fast > slow {
            t_star = t_star.min((pair[1].x0 - pair[0].x0) / (fast - slow));
        }
    }
    if let Some(w) = waves.first() {
        let (slow, _) = w.extent();
        if slow < 0.0 {
            t_star = t_star.min((w.x0 - lo) / -slow);
        }
    }
    if let Some(w) = waves.last() {
        let (_, fast) = w.extent();
        if fast > 0.0 {
            t_star = t_star.min((hi - w.x0) / fast);
        }
    }
    t_star
}

/// Exact entropy solution at time `t` of staircase data, valid strictly
/// before the first wave interaction.
pub fn glue_riemann(u: &StepFn, speed: f64, max_density: f64, t: f64) -> Result<GluedRiemann> {
    let waves = u
        .breakpoints()
        .iter()
        .skip(1)
        .take(u.values().len() - 1)
        .enumerate()
        .map(|(i, &x)| riemann_at(u.values()[i], u.values()[i + 1], x, speed, max_density))
        .collect::<Result<Vec<_>>>()?;
    let t_star = first_interaction_time(&waves, u.lo(), u.hi());
    if t >= t_star {
        return Err(Error::OracleInvalid(format!(
            "t = {t} not before the first interaction at {t_star}"
        )));
    }
    Ok(GluedRiemann {
        waves,
        base: u.clone(),
        t,
    })
}

impl GluedRiemann {
    pub fn sample(&self, x: f64) -> f64 {
        // waves are ordered and disjoint: find the last one starting left of x
        let mut value = self.base.first();
        for w in &self.waves {
            let (slow, _) = w.extent();
            if x >= w.x0 + slow * self.t {
                value = w.sample(self.t, x);
            } else {
                break;
            }
        }
        value
    }

    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let cuts: Vec<f64> = self.waves.iter().flat_map(|w| w.kinks(self.t)).collect();
        piecewise_linear_integral(a, b, &cuts, |x| self.sample(x))
    }

    pub fn cell_averages(&self, edges: &[f64]) -> Vec<f64> {
        edges
            .windows(2)
            .map(|w| self.integral(w[0], w[1]) / (w[1] - w[0]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const R: f64 = 0.2;

    #[test]
    fn constant_state() {
        let s = exact_riemann_lwr(0.05, 0.05, 10.0, R).unwrap();
        assert_eq!(s.kind, WaveKind::Constant);
        assert_eq!(s.sample(3.0, -7.0), 0.05);
    }

    #[test]
    fn stationary_shock() {
        let s = exact_riemann_lwr(0.2 * R, 0.8 * R, 10.0, R).unwrap();
        match s.kind {
            WaveKind::Shock { speed } => assert!(speed.abs() < 1e-14),
            k => panic!("expected shock, got {k:?}"),
        }
        assert_eq!(s.sample(5.0, -1e-9), 0.2 * R);
        assert_eq!(s.sample(5.0, 1e-9), 0.8 * R);
    }

    #[test]
    fn full_rarefaction() {
        let v = 10.0;
        let s = exact_riemann_lwr(R, 0.0, v, R).unwrap();
        assert_eq!(
            s.kind,
            WaveKind::Rarefaction {
                left_edge: -v,
                right_edge: v
            }
        );
        assert!((s.sample(2.0, 0.0) - 0.5 * R).abs() < 1e-15);
        assert!((s.sample(2.0, 10.0) - 0.25 * R).abs() < 1e-15);
        assert_eq!(s.sample(2.0, -25.0), R);
    }

    #[test]
    fn rejects_states_outside_range() {
        assert!(exact_riemann_lwr(-0.1, 0.1, 1.0, R).is_err());
        assert!(exact_riemann_lwr(0.1, 0.3, 1.0, R).is_err());
        assert!(exact_riemann_lwr(0.1, 0.1, 0.0, R).is_err());
    }

    #[test]
    fn fan_conserves_mass_exactly() {
        // mass in [-L, L] changes only by the flux through ±L
        let v = 3.0;
        let g = LwrFlux::new(R).unwrap();
        for (ul, ur) in [(R, 0.0), (0.9 * R, 0.3 * R), (0.1 * R, 0.7 * R)] {
            let s = exact_riemann_lwr(ul, ur, v, R).unwrap();
            let (a, b) = (-10.0, 10.0);
            let t = 2.0;
            let m0 = ul * 10.0 + ur * 10.0;
            let m = s.integral(t, a, b);
            let expect = m0 + t * v * (g.eval(ul) - g.eval(ur));
            assert!((m - expect).abs() < 1e-12, "{ul} {ur}: {m} vs {expect}");
        }
    }

    #[test]
    fn single_jump_glue_matches_riemann() {
        let u = StepFn::new(vec![0.0, 50.0, 100.0], vec![R, 0.0]).unwrap();
        let glued = glue_riemann(&u, 10.0, R, 2.0).unwrap();
        let s = riemann_at(R, 0.0, 50.0, 10.0, R).unwrap();
        for x in [10.0, 35.0, 49.0, 50.0, 55.0, 69.0, 90.0] {
            assert_eq!(glued.sample(x), s.sample(2.0, x));
        }
    }

    #[test]
    fn glue_refuses_after_interaction() {
        // rarefaction right edge +v meets the shock (speed 0.1v) of the next jump
        let u = StepFn::new(vec![0.0, 40.0, 60.0, 100.0], vec![0.1 * R, 0.0, 0.9 * R]).unwrap();
        let v = 10.0;
        let waves: Vec<_> = vec![
            riemann_at(0.1 * R, 0.0, 40.0, v, R).unwrap(),
            riemann_at(0.0, 0.9 * R, 60.0, v, R).unwrap(),
        ];
        let t_star = first_interaction_time(&waves, 0.0, 100.0);
        assert!(glue_riemann(&u, v, R, 0.5 * t_star).is_ok());
        assert!(matches!(glue_riemann(&u, v, R, 1.01 * t_star), Err(Error::OracleInvalid(_))));
    }
}
