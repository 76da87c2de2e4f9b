//! Closed-form a priori bounds: L1 stability with respect to the data and
//! with respect to the flux `v g`.

use crate::error::{invalid, Result};
use crate::flux::{FluxModel, SpeedProfile};
use crate::ibvp::{boundary_hull, IbvpProblem, StepFn, TvFunctionalValue};

/// Flux-stability estimate
/// `tv(t) · (A t ‖g' − g̃'‖_{L∞(𝒰)} + B ‖v − ṽ‖_{L1([0,t])})` with
/// `A = max{1, G} V`, `B = (1 + V/v_min) G`, and `G`, `V` the smaller of
/// the two derivative and speed sup-norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityBound {
    pub a: f64,
    pub b: f64,
    pub g: f64,
    pub v: f64,
    pub v_min: f64,
    pub tv: TvFunctionalValue,
    pub derivative_gap: f64,
    pub speed_gap: f64,
    pub t: f64,
    pub value: f64,
}

/// `‖g' − h'‖_{L∞([lo, hi])}`, sampled on 1025 points including both ends.
pub fn derivative_gap(g: &dyn FluxModel, h: &dyn FluxModel, lo: f64, hi: f64) -> f64 {
    const N: usize = 1024;
    (0..=N)
        .map(|i| {
            let u = if i == N { hi } else { lo + (hi - lo) * i as f64 / N as f64 };
            (g.derivative(u) - h.derivative(u)).abs()
        })
        .fold(0.0, f64::max)
}

pub fn flux_stability_bound(p: &IbvpProblem, q: &IbvpProblem, t: f64) -> Result<StabilityBound> {
    if p.initial != q.initial || p.left != q.left || p.right != q.right {
        return Err(invalid("flux stability bound", "problems must share initial and boundary data"));
    }
    let hull = p.hull(t);
    let g = p
        .flux
        .derivative_bound(hull.lo, hull.hi)
        .min(q.flux.derivative_bound(hull.lo, hull.hi));
    let v = p.speed.sup_on(t).min(q.speed.sup_on(t));
    let v_min = p.speed.v_min().min(q.speed.v_min());
    let a = g.max(1.0) * v;
    let b = (1.0 + v / v_min) * g;
    let tv = p.tv_functional(t);
    let dg = derivative_gap(p.flux.as_ref(), q.flux.as_ref(), hull.lo, hull.hi);
    let dv = p.speed.l1_distance(&q.speed, t)?;
    let value = tv.value * (a * t * dg + b * dv);
    Ok(StabilityBound {
        a,
        b,
        g,
        v,
        v_min,
        tv,
        derivative_gap: dg,
        speed_gap: dv,
        t,
        value,
    })
}

/// `‖u_o − ũ_o‖_{L1} + ‖v‖_{L∞([0,t])} ‖g'‖_{L∞(𝒰)} Σᵢ ‖u_{b,i} − ũ_{b,i}‖_{L1([0,t])}`
/// with `𝒰` the hull of all boundary data on `[0, t]`. Pass one boundary
/// pair for the half line, two for the segment.
pub fn data_stability_bound(
    initial: (&StepFn, &StepFn),
    boundary: &[(&StepFn, &StepFn)],
    speed: &SpeedProfile,
    g: &dyn FluxModel,
    t: f64,
) -> Result<f64> {
    let init = initial.0.l1_distance(initial.1)?;
    let all: Vec<&StepFn> = boundary.iter().flat_map(|(a, b)| [*a, *b]).collect();
    let hull = boundary_hull(&all, t);
    let lip = speed.sup_on(t) * g.derivative_bound(hull.lo, hull.hi);
    let mut bdry = 0.0;
    for (a, b) in boundary {
        bdry += a.l1_distance_on(b, 0.0, t)?;
    }
    Ok(init + lip * bdry)
}

/// [`data_stability_bound`] for two problems sharing `v` and `g`.
pub fn data_stability_bound_for(p: &IbvpProblem, q: &IbvpProblem, t: f64) -> Result<f64> {
    let mut pairs = vec![(&p.left, &q.left)];
    match (&p.right, &q.right) {
        (Some(a), Some(b)) => pairs.push((a, b)),
        (None, None) => {}
        _ => return Err(invalid("data stability bound", "problems of different kinds")),
    }
    data_stability_bound((&p.initial, &q.initial), &pairs, &p.speed, p.flux.as_ref(), t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{kmh_to_ms, LwrFlux, SharedFlux};
    use std::sync::Arc;

    fn c(lo: f64, hi: f64, v: f64) -> StepFn {
        StepFn::constant(lo, hi, v).unwrap()
    }

    fn lwr(r: f64) -> SharedFlux {
        Arc::new(LwrFlux::new(r).unwrap())
    }

    fn problem(v: SpeedProfile, uo: StepFn, b1: StepFn, b2: StepFn) -> IbvpProblem {
        IbvpProblem::segment(uo, b1, b2, v, lwr(0.2)).unwrap()
    }

    #[test]
    fn identical_problems_have_zero_bound() {
        let p = problem(
            SpeedProfile::constant(10.0, 60.0).unwrap(),
            StepFn::new(vec![0.0, 50.0, 100.0], vec![0.02, 0.1]).unwrap(),
            c(0.0, 60.0, 0.05),
            c(0.0, 60.0, 0.0),
        );
        assert_eq!(flux_stability_bound(&p, &p, 60.0).unwrap().value, 0.0);
        assert_eq!(data_stability_bound_for(&p, &p, 60.0).unwrap(), 0.0);
    }

    #[test]
    fn constant_data_make_the_bound_vanish() {
        let p = problem(SpeedProfile::constant(10.0, 60.0).unwrap(), c(0.0, 100.0, 0.05), c(0.0, 60.0, 0.05), c(0.0, 60.0, 0.05));
        let q = p.with_speed(SpeedProfile::constant(4.0, 60.0).unwrap()).unwrap();
        assert_eq!(flux_stability_bound(&p, &q, 60.0).unwrap().value, 0.0);
    }

    #[test]
    fn lwr_speed_pair_by_direct_arithmetic() {
        let (v1, v2) = (kmh_to_ms(60.0), kmh_to_ms(40.0));
        let t = 60.0;
        // u_o jumps by 0.02 inside the road, data otherwise matching: tv = 0.02
        let uo = StepFn::new(vec![0.0, 100.0, 200.0], vec![0.0, 0.02]).unwrap();
        let p = problem(
            SpeedProfile::new(vec![0.0, t], vec![v1], v2).unwrap(),
            uo,
            c(0.0, t, 0.0),
            c(0.0, t, 0.02),
        );
        let q = p.with_speed(SpeedProfile::new(vec![0.0, t], vec![v2], v2).unwrap()).unwrap();
        let b = flux_stability_bound(&p, &q, t).unwrap();
        // hull [0, 0.02]; ‖g'‖ = 1 at u = 0 for R = 0.2
        let g_norm = 1.0;
        let v_small = v2;
        let b_coef = (1.0 + v_small / v2) * g_norm;
        let expect = 0.02 * b_coef * (v1 - v2) * t;
        assert!((b.tv.value - 0.02).abs() < 1e-15);
        assert!((b.value - expect).abs() < 1e-12 * expect);
        assert_eq!(b.a, g_norm.max(1.0) * v_small);
    }

    #[test]
    fn flux_pair_uses_derivative_gap() {
        let t = 10.0;
        let uo = StepFn::new(vec![0.0, 50.0, 100.0], vec![0.0, 0.1]).unwrap();
        let p = problem(SpeedProfile::constant(5.0, t).unwrap(), uo, c(0.0, t, 0.0), c(0.0, t, 0.1));
        let q = p.with_flux(lwr(0.25)).unwrap();
        let b = flux_stability_bound(&p, &q, t).unwrap();
        // |g' − g̃'| = 2u |1/0.2 − 1/0.25| is largest at u = 0.1
        let gap = 2.0 * 0.1 * (5.0 - 4.0);
        assert!((b.derivative_gap - gap).abs() < 1e-12);
        let g: f64 = 1.0;
        let expect = 0.1 * (g.max(1.0) * 5.0 * t * gap);
        assert!((b.value - expect).abs() < 1e-12);
    }

    #[test]
    fn data_bound_by_direct_arithmetic() {
        let t = 10.0;
        let v = SpeedProfile::constant(kmh_to_ms(60.0), t).unwrap();
        let g = LwrFlux::new(0.2).unwrap();
        let uo = c(0.0, 100.0, 0.0);
        let ub = c(0.0, t, 0.0);
        let ub2 = c(0.0, t, 0.1);
        let got = data_stability_bound((&uo, &uo), &[(&ub, &ub2)], &v, &g, t).unwrap();
        // hull of boundary data [0, 0.1]: ‖g'‖ = 1
        let expect = kmh_to_ms(60.0) * 1.0 * 0.1 * t;
        assert!((got - expect).abs() < 1e-12);
        // segment: both sides differ
        let got2 = data_stability_bound((&uo, &uo), &[(&ub, &ub2), (&ub2, &ub)], &v, &g, t).unwrap();
        assert!((got2 - 2.0 * expect).abs() < 1e-12);
        // window restriction: difference only after t = 5
        let late = StepFn::new(vec![0.0, 5.0, t], vec![0.0, 0.1]).unwrap();
        let got3 = data_stability_bound((&uo, &uo), &[(&ub, &late)], &v, &g, 4.0).unwrap();
        assert_eq!(got3, 0.0);
    }

    #[test]
    fn requires_shared_data() {
        let t = 1.0;
        let v = SpeedProfile::constant(1.0, t).unwrap();
        let p = problem(v.clone(), c(0.0, 1.0, 0.1), c(0.0, t, 0.1), c(0.0, t, 0.1));
        let q = problem(v, c(0.0, 1.0, 0.05), c(0.0, t, 0.1), c(0.0, t, 0.1));
        assert!(flux_stability_bound(&p, &q, t).is_err());
    }
}
