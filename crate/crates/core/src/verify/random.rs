//! Seeded generators of step data and LWR problems for batch checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use crate::error::Result;
use crate::flux::{LwrFlux, SpeedProfile};
use crate::ibvp::{IbvpProblem, StepFn};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random step function on `[lo, hi]` with up to `max_pieces` pieces and
/// values in `[v_lo, v_hi]`.
pub fn random_step(rng: &mut impl Rng, lo: f64, hi: f64, max_pieces: usize, v_lo: f64, v_hi: f64) -> StepFn {
    let n = rng.gen_range(1..=max_pieces.max(1));
    let mut cuts: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(lo..hi)).collect();
    cuts.sort_by(f64::total_cmp);
    let mut breaks = vec![lo];
    for c in cuts {
        // keep pieces visibly separated
        if c - breaks.last().unwrap() > 1e-3 * (hi - lo) && hi - c > 1e-3 * (hi - lo) {
            breaks.push(c);
        }
    }
    breaks.push(hi);
    let values = (0..breaks.len() - 1).map(|_| rng.gen_range(v_lo..=v_hi)).collect();
    StepFn::new(breaks, values).expect("sorted breaks")
}

/// Random step speed profile on `[0, horizon]` with values in `[v_lo, v_hi]`.
pub fn random_speed(rng: &mut impl Rng, horizon: f64, max_pieces: usize, v_lo: f64, v_hi: f64) -> SpeedProfile {
    let s = random_step(rng, 0.0, horizon, max_pieces, v_lo, v_hi);
    SpeedProfile::from_steps(s, v_lo).expect("positive speeds")
}

/// Shape of the generated problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemShape {
    pub length: f64,
    pub horizon: f64,
    pub max_density: f64,
    pub max_pieces: usize,
    pub v_lo: f64,
    pub v_hi: f64,
}

impl Default for ProblemShape {
    fn default() -> Self {
        ProblemShape {
            length: 100.0,
            horizon: 10.0,
            max_density: 0.2,
            max_pieces: 4,
            v_lo: 5.0,
            v_hi: 20.0,
        }
    }
}

impl ProblemShape {
    fn density(&self, rng: &mut impl Rng, lo: f64, hi: f64) -> StepFn {
        random_step(rng, lo, hi, self.max_pieces, 0.0, self.max_density)
    }

    /// Random LWR problem on the segment `[0, length]`.
    pub fn segment(&self, rng: &mut impl Rng) -> Result<IbvpProblem> {
        let uo = self.density(rng, 0.0, self.length);
        let b1 = self.density(rng, 0.0, self.horizon);
        let b2 = self.density(rng, 0.0, self.horizon);
        let v = random_speed(rng, self.horizon, self.max_pieces, self.v_lo, self.v_hi);
        IbvpProblem::segment(uo, b1, b2, v, Arc::new(LwrFlux::new(self.max_density)?))
    }

    /// Pair sharing all data except the speed profile.
    pub fn speed_pair(&self, rng: &mut impl Rng) -> Result<(IbvpProblem, IbvpProblem)> {
        let p = self.segment(rng)?;
        let v2 = random_speed(rng, self.horizon, self.max_pieces, self.v_lo, self.v_hi);
        let q = p.with_speed(v2)?;
        Ok((p, q))
    }

    /// Pair sharing speed and flux, with independent initial and boundary data.
    pub fn data_pair(&self, rng: &mut impl Rng) -> Result<(IbvpProblem, IbvpProblem)> {
        let p = self.segment(rng)?;
        let uo = self.density(rng, 0.0, self.length);
        let b1 = self.density(rng, 0.0, self.horizon);
        let b2 = self.density(rng, 0.0, self.horizon);
        let q = p.with_data(uo, b1, Some(b2))?;
        Ok((p, q))
    }
}
