//! Discrete evaluation of the boundary entropy inequality
//!
//! ```text
//! ∫∫ (u−k)^± ∂ₜφ + sgn^±(u−k) (f(t,u) − f(t,k)) ∂ₓφ
//!   + ∫ (u_o−k)^± φ(0,·) − ∫ (u(T)−k)^± φ(T,·)
//!   + ‖∂_u f‖ ∫ Σ_sides (u_b−k)^± φ(·, side)  ≥  0
//! ```
//!
//! for a finite family of constants `k` and tensor-product bump test
//! functions `φ(t, x) = a(t) b(x)`. The recorded field is read as
//! piecewise constant in space (cells) and in time (held from each record
//! to the next); every integral is then evaluated exactly, so constant
//! states give nonnegative residuals up to rounding.

use crate::ibvp::{DomainKind, IbvpProblem, StepFn};
use crate::solver::SolutionField;

use super::CertificateReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn part(self, s: f64) -> f64 {
        match self {
            Branch::Plus => s.max(0.0),
            Branch::Minus => (-s).max(0.0),
        }
    }

    fn sign(self, s: f64) -> f64 {
        match self {
            Branch::Plus if s > 0.0 => 1.0,
            Branch::Minus if s < 0.0 => -1.0,
            _ => 0.0,
        }
    }
}

/// `64 (z(1−z))³` on `[0, 1]`: C² bump with peak value 1.
fn profile(z: f64) -> f64 {
    if z <= 0.0 || z >= 1.0 {
        0.0
    } else {
        64.0 * (z * (1.0 - z)).powi(3)
    }
}

fn profile_slope(z: f64) -> f64 {
    if z <= 0.0 || z >= 1.0 {
        0.0
    } else {
        let w = z * (1.0 - z);
        192.0 * w * w * (1.0 - 2.0 * z)
    }
}

/// `∫_0^z profile`.
fn profile_primitive(z: f64) -> f64 {
    let z = z.clamp(0.0, 1.0);
    let z4 = z.powi(4);
    64.0 * z4 * (0.25 - 0.6 * z + 0.5 * z * z - z * z * z / 7.0)
}

/// Nonnegative test function supported on `[t0, t1] × [x0, x1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpTest {
    pub t0: f64,
    pub t1: f64,
    pub x0: f64,
    pub x1: f64,
}

impl BumpTest {
    fn zt(&self, t: f64) -> f64 {
        (t - self.t0) / (self.t1 - self.t0)
    }

    fn zx(&self, x: f64) -> f64 {
        (x - self.x0) / (self.x1 - self.x0)
    }

    pub fn value(&self, t: f64, x: f64) -> f64 {
        self.a(t) * self.b(x)
    }

    pub fn a(&self, t: f64) -> f64 {
        profile(self.zt(t))
    }

    pub fn b(&self, x: f64) -> f64 {
        profile(self.zx(x))
    }

    pub fn dt(&self, t: f64, x: f64) -> f64 {
        profile_slope(self.zt(t)) / (self.t1 - self.t0) * self.b(x)
    }

    pub fn dx(&self, t: f64, x: f64) -> f64 {
        self.a(t) * profile_slope(self.zx(x)) / (self.x1 - self.x0)
    }

    /// `∫_lo^hi b(x) dx`.
    pub fn b_integral(&self, lo: f64, hi: f64) -> f64 {
        (profile_primitive(self.zx(hi)) - profile_primitive(self.zx(lo))) * (self.x1 - self.x0)
    }

    /// An `m × m` family whose supports are centred on a uniform lattice
    /// including the domain corners, so boundary and initial/final terms
    /// are exercised.
    pub fn tiling(horizon: f64, length: f64, m: usize) -> Vec<BumpTest> {
        let m = m.max(2);
        let ht = horizon / (m - 1) as f64;
        let hx = length / (m - 1) as f64;
        let mut out = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let (ct, cx) = (i as f64 * ht, j as f64 * hx);
                out.push(BumpTest {
                    t0: ct - ht,
                    t1: ct + ht,
                    x0: cx - hx,
                    x1: cx + hx,
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyConfig {
    pub k_samples: usize,
    /// Fractional inflation of the data hull spanned by the `k` samples.
    pub hull_inflation: f64,
    /// Test functions per axis.
    pub tiles: usize,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        EntropyConfig {
            k_samples: 17,
            hull_inflation: 0.05,
            tiles: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyResidual {
    pub k: f64,
    pub branch: Branch,
    pub test: BumpTest,
    pub residual: f64,
    /// Bound on the flux term: `max |g(u) − g(k)|` over the data hull
    /// joined with `k`, integrated against `v |∂ₓφ|`.
    pub scale: f64,
}

impl EntropyResidual {
    pub fn normalized(&self) -> f64 {
        if self.scale > 0.0 {
            self.residual / self.scale
        } else {
            0.0
        }
    }
}

const GAUSS4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_85),
    (-0.339_981_043_584_856_26, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_26, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_85),
];

/// `∫_lo^hi w(t) a(t) dt` for a step function `w`; exact since `a` has
/// degree 7 on its support.
fn weighted_a(w: &StepFn, test: &BumpTest, lo: f64, hi: f64) -> f64 {
    let (lo, hi) = (lo.max(test.t0), hi.min(test.t1));
    if hi <= lo {
        return 0.0;
    }
    let mut cuts = vec![lo, hi];
    cuts.extend(w.interior_breaks(lo, hi));
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2)
        .map(|c| {
            let (mid, half) = (0.5 * (c[0] + c[1]), 0.5 * (c[1] - c[0]));
            let s: f64 = GAUSS4.iter().map(|&(z, wt)| wt * test.a(mid + half * z)).sum();
            w.eval(mid) * s * half
        })
        .sum()
}

const OSC_SAMPLES: usize = 64;

/// Entropy residual of `field` for one `(k, branch, φ)`.
pub fn entropy_residual(
    field: &SolutionField,
    problem: &IbvpProblem,
    k: f64,
    branch: Branch,
    test: &BumpTest,
) -> EntropyResidual {
    let g = problem.flux.as_ref();
    let edges = field.grid.edges();
    let gk = g.eval(k);
    let b_cell: Vec<f64> = edges.windows(2).map(|e| test.b_integral(e[0], e[1])).collect();
    let db_cell: Vec<f64> = edges.windows(2).map(|e| test.b(e[1]) - test.b(e[0])).collect();
    let speed = problem.speed.steps();
    // k may lie outside the data hull: take ‖g'‖ and the spread over both
    let hull = problem.hull_full();
    let (lo, hi) = (hull.lo.min(k), hull.hi.max(k));
    let lip = problem.speed.sup() * g.derivative_bound(lo, hi);
    let spread = (0..=OSC_SAMPLES)
        .map(|i| (g.eval(lo + (hi - lo) * i as f64 / OSC_SAMPLES as f64) - gk).abs())
        .fold(0.0, f64::max);
    let db_total: f64 = db_cell.iter().map(|d| d.abs()).sum();

    // record intervals use the mean of their two end states
    let mut dt_term = 0.0;
    let mut dx_term = 0.0;
    let mut noise = 0.0;
    let mut scale = 0.0;
    for i in 0..field.len().saturating_sub(1) {
        let (t1, t2) = (field.times[i], field.times[i + 1]);
        if t2 <= test.t0 || t1 >= test.t1 {
            continue;
        }
        let da = test.a(t2) - test.a(t1);
        let va = weighted_a(speed, test, t1, t2);
        for (j, (&u1, &u2)) in field.profiles[i].iter().zip(&field.profiles[i + 1]).enumerate() {
            let (d1, d2) = (g.eval(u1) - gk, g.eval(u2) - gk);
            let part = 0.5 * (branch.part(u1 - k) + branch.part(u2 - k));
            let flux = 0.5 * (branch.sign(u1 - k) * d1 + branch.sign(u2 - k) * d2);
            let flux_abs = 0.5 * (d1.abs() + d2.abs()) * db_cell[j].abs() * va;
            dt_term += part * da * b_cell[j];
            dx_term += flux * db_cell[j] * va;
            noise += 0.5 * ((u1 - k).abs() + (u2 - k).abs()) * da.abs() * b_cell[j] + flux_abs;
        }
        scale += spread * db_total * va;
    }

    let t_first = field.times[0];
    let t_last = *field.times.last().expect("empty solution field");
    let (a0, a1) = (test.a(t_first), test.a(t_last));
    let mut init = 0.0;
    let mut fin = 0.0;
    for (j, (&u0, &u1)) in field.profiles[0].iter().zip(field.last()).enumerate() {
        init += branch.part(u0 - k) * b_cell[j] * a0;
        fin += branch.part(u1 - k) * b_cell[j] * a1;
        noise += ((u0 - k).abs() * a0 + (u1 - k).abs() * a1) * b_cell[j];
    }

    let side = |ub: &StepFn, x: f64, f: &dyn Fn(f64) -> f64| {
        let w = ub.map_values(f).expect("finite values");
        lip * test.b(x) * weighted_a(&w, test, t_first, t_last)
    };
    let mut sides = vec![(&problem.left, field.grid.x_lo)];
    if let (DomainKind::Segment { .. }, Some(r)) = (problem.kind, &problem.right) {
        sides.push((r, field.grid.x_hi));
    }
    let mut bdry = 0.0;
    for (ub, x) in sides {
        bdry += side(ub, x, &|u| branch.part(u - k));
        noise += side(ub, x, &|u| (u - k).abs());
    }

    let mut residual = dt_term + dx_term + init - fin + bdry;
    if residual.abs() <= 1e-12 * noise {
        residual = 0.0;
    }
    EntropyResidual {
        k,
        branch,
        test: *test,
        residual,
        scale,
    }
}

/// All residuals over the configured `(k, φ)` family, both branches.
pub fn entropy_residuals(field: &SolutionField, problem: &IbvpProblem, cfg: &EntropyConfig) -> Vec<EntropyResidual> {
    let hull = problem.hull_full();
    let pad = if hull.width() > 0.0 {
        cfg.hull_inflation * hull.width()
    } else {
        cfg.hull_inflation * hull.lo.abs().max(1e-3)
    };
    let (lo, hi) = (hull.lo - pad, hull.hi + pad);
    let n = cfg.k_samples.max(2);
    let ks: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let tests = BumpTest::tiling(problem.horizon, problem.length(), cfg.tiles);
    let mut out = Vec::with_capacity(ks.len() * tests.len() * 2);
    for test in &tests {
        for &k in &ks {
            for branch in [Branch::Plus, Branch::Minus] {
                out.push(entropy_residual(field, problem, k, branch, test));
            }
        }
    }
    out
}

/// Reports the smallest normalized residual; passes when it is `≥ −tol`.
pub fn check_entropy_inequality(
    field: &SolutionField,
    problem: &IbvpProblem,
    cfg: &EntropyConfig,
    tol: f64,
) -> (CertificateReport, Option<EntropyResidual>) {
    let all = entropy_residuals(field, problem, cfg);
    let worst = all
        .iter()
        .min_by(|a, b| a.normalized().total_cmp(&b.normalized()))
        .copied();
    let empirical = worst.map_or(0.0, |w| -w.normalized()).max(0.0);
    (CertificateReport::new("entropy", 0.0, tol, empirical), worst)
}
