//! Right-continuous piecewise-constant functions on a bounded interval.
//!
//! Every density datum (initial and boundary) and every speed profile is
//! carried as a [`StepFn`]. Representations are canonical: adjacent pieces
//! with equal values are merged on construction, so two step functions are
//! equal as functions iff they are equal as values.

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct StepFn {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl StepFn {
    /// `breaks` has one more entry than `values`; piece `i` is
    /// `[breaks[i], breaks[i + 1])`, the last piece also contains its right end.
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("step function", "no pieces"));
        }
        if breaks.len() != values.len() + 1 {
            return Err(invalid(
                "step function",
                format!(
                    "{} breakpoints for {} values (need values + 1)",
                    breaks.len(),
                    values.len()
                ),
            ));
        }
        if breaks.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(invalid("step function", "non-finite entry"));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("step function", "breakpoints not strictly increasing"));
        }
        let mut f = StepFn { breaks, values };
        f.normalize();
        Ok(f)
    }

    pub fn constant(lo: f64, hi: f64, value: f64) -> Result<Self> {
        Self::new(vec![lo, hi], vec![value])
    }

    /// Samples `f` at the midpoints of a uniform partition of `[lo, hi]`
    /// whose cells are no wider than `resolution`.
    pub fn sample(lo: f64, hi: f64, resolution: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        if !(resolution > 0.0) || !(hi > lo) {
            return Err(invalid("step function", "bad sampling interval or resolution"));
        }
        let n = ((hi - lo) / resolution).ceil().max(1.0) as usize;
        let h = (hi - lo) / n as f64;
        let breaks: Vec<f64> = (0..=n)
            .map(|i| if i == n { hi } else { lo + i as f64 * h })
            .collect();
        let values = (0..n).map(|i| f(lo + (i as f64 + 0.5) * h)).collect();
        Self::new(breaks, values)
    }

    fn normalize(&mut self) {
        let mut breaks = Vec::with_capacity(self.breaks.len());
        let mut values = Vec::with_capacity(self.values.len());
        breaks.push(self.breaks[0]);
        for (i, &v) in self.values.iter().enumerate() {
            if values.last() == Some(&v) {
                *breaks.last_mut().unwrap() = self.breaks[i + 1];
            } else {
                values.push(v);
                breaks.push(self.breaks[i + 1]);
            }
        }
        self.breaks = breaks;
        self.values = values;
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    pub fn lo(&self) -> f64 {
        self.breaks[0]
    }

    pub fn hi(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    /// Trace at the left end of the domain, `u(lo+)`.
    pub fn first(&self) -> f64 {
        self.values[0]
    }

    /// Trace at the right end of the domain, `u(hi-)`.
    pub fn last(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn piece_index(&self, x: f64) -> usize {
        // partition_point gives the number of breaks <= x
        let k = self.breaks.partition_point(|&b| b <= x);
        k.saturating_sub(1).min(self.values.len() - 1)
    }

    /// Right-continuous value; points outside the domain are clamped.
    pub fn eval(&self, x: f64) -> f64 {
        self.values[self.piece_index(x)]
    }

    pub fn value_at(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return Err(Error::Domain {
                what: "step function argument",
                value: x,
                lo,
                hi,
            });
        }
        Ok(self.eval(x))
    }

    /// Breakpoints lying strictly inside `(a, b)`.
    pub fn interior_breaks(&self, a: f64, b: f64) -> impl Iterator<Item = f64> + '_ {
        self.breaks[1..self.breaks.len() - 1]
            .iter()
            .copied()
            .filter(move |&x| x > a && x < b)
    }

    pub fn total_variation(&self) -> f64 {
        self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }

    /// Variation of the restriction to `[a, b]`: jumps strictly inside `(a, b)`.
    pub fn tv_on(&self, a: f64, b: f64) -> f64 {
        let inner = &self.breaks[1..self.breaks.len() - 1];
        inner
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > a && x < b)
            .map(|(i, _)| (self.values[i + 1] - self.values[i]).abs())
            .sum()
    }

    /// Essential range on `[a, b]`; a degenerate window returns the point value.
    pub fn range_on(&self, a: f64, b: f64) -> (f64, f64) {
        if b <= a {
            let v = self.eval(a);
            return (v, v);
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (i, &v) in self.values.iter().enumerate() {
            let (p, q) = (self.breaks[i], self.breaks[i + 1]);
            if q > a && p < b {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if lo > hi {
            let v = self.eval(a.clamp(self.lo(), self.hi()));
            return (v, v);
        }
        (lo, hi)
    }

    pub fn range(&self) -> (f64, f64) {
        self.range_on(self.lo(), self.hi())
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Exact integral over `[a, b] ∩ domain`.
    pub fn integral_on(&self, a: f64, b: f64) -> f64 {
        self.pieces()
            .map(|(p, q, v)| {
                let len = q.min(b) - p.max(a);
                if len > 0.0 {
                    v * len
                } else {
                    0.0
                }
            })
            .sum()
    }

    pub fn integral(&self) -> f64 {
        self.integral_on(self.lo(), self.hi())
    }

    pub fn l1_norm(&self) -> f64 {
        self.pieces().map(|(p, q, v)| v.abs() * (q - p)).sum()
    }

    /// `(left, right, value)` for each piece.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.breaks[i], self.breaks[i + 1], v))
    }

    /// Integrates `h(self, other)` over `[a, b]` on the merged partition.
    pub fn integrate_pair(&self, other: &StepFn, a: f64, b: f64, h: impl Fn(f64, f64) -> f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let mut cuts: Vec<f64> = vec![a, b];
        cuts.extend(self.interior_breaks(a, b));
        cuts.extend(other.interior_breaks(a, b));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                h(self.eval(mid), other.eval(mid)) * (w[1] - w[0])
            })
            .sum()
    }

    /// Exact L1 distance over `[a, b]`; both functions must cover the window.
    pub fn l1_distance_on(&self, other: &StepFn, a: f64, b: f64) -> Result<f64> {
        for f in [self, other] {
            if a < f.lo() || b > f.hi() {
                return Err(Error::Domain {
                    what: "L1 window",
                    value: if a < f.lo() { a } else { b },
                    lo: f.lo(),
                    hi: f.hi(),
                });
            }
        }
        Ok(self.integrate_pair(other, a, b, |x, y| (x - y).abs()))
    }

    pub fn l1_distance(&self, other: &StepFn) -> Result<f64> {
        if self.domain() != other.domain() {
            return Err(invalid(
                "L1 distance",
                format!("domains {:?} and {:?} differ", self.domain(), other.domain()),
            ));
        }
        self.l1_distance_on(other, self.lo(), self.hi())
    }

    pub fn restrict(&self, a: f64, b: f64) -> Result<StepFn> {
        if !(a >= self.lo() && b <= self.hi() && b > a) {
            return Err(invalid("restriction", format!("[{a}, {b}] not inside {:?}", self.domain())));
        }
        let mut breaks = vec![a];
        breaks.extend(self.interior_breaks(a, b));
        breaks.push(b);
        let values = breaks[..breaks.len() - 1].iter().map(|&x| self.eval(x)).collect();
        StepFn::new(breaks, values)
    }

    /// Reparametrizes the argument through a strictly increasing map.
    pub fn map_breakpoints(&self, f: impl Fn(f64) -> f64) -> Result<StepFn> {
        StepFn::new(self.breaks.iter().map(|&x| f(x)).collect(), self.values.clone())
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<StepFn> {
        StepFn::new(self.breaks.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    /// Right end of the closure of `{x : u(x) != 0}`, or the left end when u ≡ 0.
    pub fn support_end(&self) -> f64 {
        self.pieces()
            .filter(|&(_, _, v)| v != 0.0)
            .map(|(_, q, _)| q)
            .fold(self.lo(), f64::max)
    }

    /// Averages over the cells `[edges[i], edges[i+1]]`.
    pub fn cell_averages(&self, edges: &[f64]) -> Vec<f64> {
        edges
            .windows(2)
            .map(|w| self.integral_on(w[0], w[1]) / (w[1] - w[0]))
            .collect()
    }
}
