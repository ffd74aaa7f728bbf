//! Measure-preserving systems and the averages `μf(x) = Σ_k μ(k) f(τ^k x)`.
//!
//! The cyclic shift on `ℤ_q` carries the exact uniform measure, so level-set
//! measures and sups are exact there. The circle rotation is evaluated on a
//! deterministic stratified sample and is meant for qualitative runs.

use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math;
use crate::measure::LatticeMeasure;
use crate::par;
use crate::sequence::{convolve_prefixes, SequenceSpec};

pub const DEFAULT_ALPHA: f64 = SQRT_2 - 1.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DynSystem {
    /// `τ(j) = j + 1 mod q` with uniform measure.
    Cyclic { q: u64 },
    /// `τ(x) = x + α mod 1`, measured on `samples` stratified points.
    Rotation {
        alpha: f64,
        samples: usize,
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum State {
    Site(u64),
    Point(f64),
}

impl DynSystem {
    pub fn cyclic(q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::domain("cyclic system needs q >= 1"));
        }
        Ok(DynSystem::Cyclic { q })
    }

    pub fn rotation(alpha: f64, samples: usize, seed: u64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(alloc::format!(
                "rotation alpha {alpha} outside (0, 1)"
            )));
        }
        if samples == 0 {
            return Err(Error::domain("rotation needs at least one sample"));
        }
        Ok(DynSystem::Rotation {
            alpha,
            samples,
            seed,
        })
    }

    /// Number of states averaged over: `q`, or the sample count.
    pub fn state_count(&self) -> usize {
        match *self {
            DynSystem::Cyclic { q } => q as usize,
            DynSystem::Rotation { samples, .. } => samples,
        }
    }

    /// Offset `u ∈ [0, 1)` of the stratified sample `(i + u)/S`; `½` for
    /// seed 0, otherwise drawn from ChaCha8.
    fn sample_offset(&self) -> f64 {
        match *self {
            DynSystem::Rotation { seed: 0, .. } | DynSystem::Cyclic { .. } => 0.5,
            DynSystem::Rotation { seed, .. } => ChaCha8Rng::seed_from_u64(seed).gen::<f64>(),
        }
    }

    /// The `i`-th state in deterministic order.
    pub fn state(&self, i: usize) -> State {
        match *self {
            DynSystem::Cyclic { .. } => State::Site(i as u64),
            DynSystem::Rotation { samples, .. } => {
                State::Point((i as f64 + self.sample_offset()) / samples as f64)
            }
        }
    }

    pub fn states(&self) -> Vec<State> {
        let u = self.sample_offset();
        match *self {
            DynSystem::Cyclic { q } => (0..q).map(State::Site).collect(),
            DynSystem::Rotation { samples, .. } => (0..samples)
                .map(|i| State::Point((i as f64 + u) / samples as f64))
                .collect(),
        }
    }

    /// `τ^k x`, negative `k` included.
    pub fn shift(&self, x: State, k: i64) -> State {
        match (*self, x) {
            (DynSystem::Cyclic { q }, State::Site(j)) => {
                let q = q as i128;
                State::Site((j as i128 + k as i128).rem_euclid(q) as u64)
            }
            (DynSystem::Rotation { alpha, .. }, State::Point(p)) => {
                State::Point(math::frac(p + math::frac(k as f64 * alpha)))
            }
            // Mismatched states are rejected by `check_state`.
            (_, other) => other,
        }
    }

    fn check_state(&self, x: State) -> Result<()> {
        match (*self, x) {
            (DynSystem::Cyclic { q }, State::Site(j)) if j < q => Ok(()),
            (DynSystem::Rotation { .. }, State::Point(p)) if (0.0..1.0).contains(&p) => Ok(()),
            _ => Err(Error::domain(alloc::format!("state {x:?} not in {self:?}"))),
        }
    }

    /// Position of a state on `[0, 1)`: `j/q` or `x`.
    fn coordinate(&self, x: State) -> f64 {
        match (*self, x) {
            (DynSystem::Cyclic { q }, State::Site(j)) => j as f64 / q as f64,
            (_, State::Point(p)) => p,
            (_, State::Site(j)) => j as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Shape {
    Constant,
    /// `{start, …, start + len − 1} mod q`.
    Block {
        start: u64,
        len: u64,
    },
    /// Sorted, deduplicated sites.
    Subset(Vec<u64>),
    /// `[lo, hi)` on the circle; wraps when `lo > hi`.
    Interval {
        lo: f64,
        hi: f64,
    },
    /// `cos 2π·freq·coordinate`.
    Trig {
        frequency: i64,
    },
    Table(Vec<f64>),
}

/// A bounded function on a system's state space, times a scale factor.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    shape: Shape,
    scale: f64,
}

impl TestFunction {
    pub fn constant(c: f64) -> Self {
        TestFunction {
            shape: Shape::Constant,
            scale: c,
        }
    }

    pub fn block(start: u64, len: u64) -> Self {
        TestFunction {
            shape: Shape::Block { start, len },
            scale: 1.0,
        }
    }

    pub fn subset(sites: &[u64]) -> Self {
        let mut s = sites.to_vec();
        s.sort_unstable();
        s.dedup();
        TestFunction {
            shape: Shape::Subset(s),
            scale: 1.0,
        }
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        TestFunction {
            shape: Shape::Interval { lo, hi },
            scale: 1.0,
        }
    }

    pub fn trig(frequency: i64) -> Self {
        TestFunction {
            shape: Shape::Trig { frequency },
            scale: 1.0,
        }
    }

    pub fn table(values: Vec<f64>) -> Self {
        TestFunction {
            shape: Shape::Table(values),
            scale: 1.0,
        }
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.scale *= c;
        self
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Checks the function is defined and finite on `sys`.
    pub fn validate(&self, sys: &DynSystem) -> Result<()> {
        if !self.scale.is_finite() {
            return Err(Error::domain("test function scale is not finite"));
        }
        let cyclic_q = match *sys {
            DynSystem::Cyclic { q } => Some(q),
            DynSystem::Rotation { .. } => None,
        };
        match (&self.shape, cyclic_q) {
            (Shape::Block { len, .. }, Some(q)) if *len <= q => Ok(()),
            (Shape::Subset(s), Some(q)) if s.last().is_none_or(|&m| m < q) => Ok(()),
            (Shape::Table(v), Some(q)) if v.len() as u64 == q => {
                if v.iter().all(|x| x.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::domain("table holds non-finite values"))
                }
            }
            (Shape::Interval { lo, hi }, _) => {
                if (0.0..=1.0).contains(lo) && (0.0..=1.0).contains(hi) {
                    Ok(())
                } else {
                    Err(Error::domain("interval endpoints must lie in [0, 1]"))
                }
            }
            (Shape::Constant | Shape::Trig { .. }, _) => Ok(()),
            (shape, _) => Err(Error::domain(alloc::format!(
                "test function {shape:?} is not defined on {sys:?}"
            ))),
        }
    }

    fn raw(&self, sys: &DynSystem, x: State) -> f64 {
        match (&self.shape, x) {
            (Shape::Constant, _) => 1.0,
            (Shape::Block { start, len }, State::Site(j)) => {
                let q = sys.state_count() as u64;
                let d = (j + q - start % q) % q;
                if d < *len {
                    1.0
                } else {
                    0.0
                }
            }
            (Shape::Subset(s), State::Site(j)) => {
                if s.binary_search(&j).is_ok() {
                    1.0
                } else {
                    0.0
                }
            }
            (Shape::Table(v), State::Site(j)) => v[j as usize],
            (Shape::Interval { lo, hi }, _) => {
                let p = sys.coordinate(x);
                let inside = if lo <= hi {
                    *lo <= p && p < *hi
                } else {
                    p >= *lo || p < *hi
                };
                if inside {
                    1.0
                } else {
                    0.0
                }
            }
            (Shape::Trig { frequency }, _) => {
                let p = sys.coordinate(x);
                math::unit_phase(*frequency as f64 * p).re
            }
            _ => 0.0,
        }
    }

    pub fn eval(&self, sys: &DynSystem, x: State) -> f64 {
        self.scale * self.raw(sys, x)
    }

    /// `‖f‖₁` under the system's (sample) measure.
    pub fn norm_l1(&self, sys: &DynSystem) -> f64 {
        let states = sys.states();
        let s: f64 = states.iter().map(|&x| math::abs(self.eval(sys, x))).sum();
        s / states.len() as f64
    }

    /// `max |f|` over the system's states.
    pub fn sup_norm(&self, sys: &DynSystem) -> f64 {
        sys.states()
            .iter()
            .map(|&x| math::abs(self.eval(sys, x)))
            .fold(0.0, f64::max)
    }
}

/// `μf(x)` prepared for many evaluations: on a cyclic group `f` is
/// tabulated once and each measure folded mod q, so one average costs
/// `min(|supp μ|, q)` lookups.
pub(crate) struct Averager<'a> {
    sys: &'a DynSystem,
    f: &'a TestFunction,
    table: Option<Vec<f64>>,
}

pub(crate) enum Prepared<'m> {
    /// `(k mod q, weight)`, merged per residue when the support wraps.
    Residues(Vec<(usize, f64)>),
    Atoms(&'m LatticeMeasure),
}

impl<'a> Averager<'a> {
    pub(crate) fn new(sys: &'a DynSystem, f: &'a TestFunction) -> Self {
        let table = match sys {
            DynSystem::Cyclic { .. } => {
                Some(sys.states().iter().map(|&x| f.eval(sys, x)).collect())
            }
            DynSystem::Rotation { .. } => None,
        };
        Averager { sys, f, table }
    }

    pub(crate) fn prepare<'m>(&self, mu: &'m LatticeMeasure) -> Prepared<'m> {
        let DynSystem::Cyclic { q } = *self.sys else {
            return Prepared::Atoms(mu);
        };
        let residue = |k: i64| k.rem_euclid(q as i64) as usize;
        if (mu.weights().len() as u64) < q {
            return Prepared::Residues(mu.atoms().map(|(k, w)| (residue(k), w)).collect());
        }
        let mut acc = alloc::vec![0.0; q as usize];
        for (k, w) in mu.atoms() {
            acc[residue(k)] += w;
        }
        Prepared::Residues(
            acc.into_iter()
                .enumerate()
                .filter(|&(_, w)| w != 0.0)
                .collect(),
        )
    }

    pub(crate) fn average(&self, mu: &Prepared<'_>, x: State) -> f64 {
        match (mu, &self.table, x) {
            (Prepared::Residues(rs), Some(table), State::Site(j)) => {
                let q = table.len();
                let j = j as usize;
                rs.iter()
                    .map(|&(r, w)| {
                        let i = j + r;
                        w * table[if i >= q { i - q } else { i }]
                    })
                    .sum()
            }
            (Prepared::Atoms(m), _, _) => m
                .atoms()
                .map(|(k, w)| w * self.f.eval(self.sys, self.sys.shift(x, k)))
                .sum(),
            // A cyclic averager only ever sees sites.
            _ => 0.0,
        }
    }
}

fn average_unchecked(sys: &DynSystem, mu: &LatticeMeasure, f: &TestFunction, x: State) -> f64 {
    let a = Averager::new(sys, f);
    a.average(&a.prepare(mu), x)
}

/// `μf(x) = Σ_k μ(k) f(τ^k x)` over the support of `μ`.
pub fn weighted_average(
    sys: &DynSystem,
    mu: &LatticeMeasure,
    f: &TestFunction,
    x: State,
) -> Result<f64> {
    sys.check_state(x)?;
    f.validate(sys)?;
    Ok(average_unchecked(sys, mu, f, x))
}

fn maximal_unchecked(a: &Averager<'_>, mus: &[Prepared<'_>], x: State) -> f64 {
    mus.iter()
        .map(|mu| math::abs(a.average(mu, x)))
        .fold(0.0, f64::max)
}

/// `max_{n ≤ N} |μ_n f(x)|` over the given list.
pub fn maximal_function(
    sys: &DynSystem,
    mus: &[LatticeMeasure],
    f: &TestFunction,
    x: State,
) -> Result<f64> {
    if mus.is_empty() {
        return Err(Error::Empty);
    }
    sys.check_state(x)?;
    f.validate(sys)?;
    let a = Averager::new(sys, f);
    let prepared: Vec<Prepared<'_>> = mus.iter().map(|m| a.prepare(m)).collect();
    Ok(maximal_unchecked(&a, &prepared, x))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weak11Row {
    pub lambda: f64,
    /// `m{Mf > λ}`.
    pub level_measure: f64,
    /// `λ · m{Mf > λ} / ‖f‖₁`.
    pub constant: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Weak11Table {
    pub horizon: usize,
    pub norm_l1: f64,
    pub max_mf: f64,
    pub rows: Vec<Weak11Row>,
}

impl Weak11Table {
    /// Largest empirical constant over the `λ` rows.
    pub fn constant(&self) -> f64 {
        self.rows.iter().map(|r| r.constant).fold(0.0, f64::max)
    }
}

/// Maximal function of `μ_1, …, μ_N` at every state, given prefixes.
pub fn maximal_profile(
    sys: &DynSystem,
    mus: &[LatticeMeasure],
    f: &TestFunction,
) -> Result<Vec<f64>> {
    if mus.is_empty() {
        return Err(Error::Empty);
    }
    f.validate(sys)?;
    let states = sys.states();
    let a = Averager::new(sys, f);
    let prepared: Vec<Prepared<'_>> = mus.iter().map(|m| a.prepare(m)).collect();
    Ok(par::map_range(states.len(), |i| {
        maximal_unchecked(&a, &prepared, states[i])
    }))
}

/// Level-set measures of `Mf` for `μ_n = ν_1 ∗ ⋯ ∗ ν_n`, `n ≤ N`.
pub fn weak11_table(
    sys: &DynSystem,
    spec: &SequenceSpec,
    f: &TestFunction,
    n_max: usize,
    lambdas: &[f64],
) -> Result<Weak11Table> {
    let mus = convolve_prefixes(spec, n_max, 0.0)?;
    weak11_table_of(sys, &mus, f, lambdas)
}

pub fn weak11_table_of(
    sys: &DynSystem,
    mus: &[LatticeMeasure],
    f: &TestFunction,
    lambdas: &[f64],
) -> Result<Weak11Table> {
    if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
        return Err(Error::domain(alloc::format!("lambda {l} must be positive")));
    }
    let mf = maximal_profile(sys, mus, f)?;
    let norm = f.norm_l1(sys);
    let total = mf.len() as f64;
    let rows = lambdas
        .iter()
        .map(|&lambda| {
            let level = mf.iter().filter(|&&v| v > lambda).count() as f64 / total;
            let constant = if level == 0.0 {
                0.0
            } else if norm > 0.0 {
                lambda * level / norm
            } else {
                f64::INFINITY
            };
            Weak11Row {
                lambda,
                level_measure: level,
                constant,
            }
        })
        .collect();
    Ok(Weak11Table {
        horizon: mus.len(),
        norm_l1: norm,
        max_mf: mf.iter().copied().fold(0.0, f64::max),
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoboundaryCheck {
    /// `max_x |μg(x) − μ(g∘τ)(x)|`.
    pub lhs: f64,
    /// `‖μ − μ∗δ_1‖₁ · ‖g‖_∞`.
    pub rhs: f64,
}

impl CoboundaryCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + 1e-10
    }
}

pub fn coboundary_bound_check(
    sys: &DynSystem,
    mu: &LatticeMeasure,
    g: &TestFunction,
) -> Result<CoboundaryCheck> {
    g.validate(sys)?;
    let states = sys.states();
    let avg = Averager::new(sys, g);
    let prepared = avg.prepare(mu);
    let diffs = par::map_range(states.len(), |i| {
        let x = states[i];
        let a = avg.average(&prepared, x);
        let b = avg.average(&prepared, sys.shift(x, 1));
        math::abs(a - b)
    });
    Ok(CoboundaryCheck {
        lhs: diffs.into_iter().fold(0.0, f64::max),
        rhs: mu.tv_shift_distance() * g.sup_norm(sys),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTrace {
    /// `μ_n f(x)` for `n = 1..=N`.
    pub values: Vec<f64>,
    /// First `n` of the oscillation window.
    pub window_start: usize,
    /// `max − min` of the values over `window_start ≤ n ≤ N`.
    pub oscillation: f64,
}

/// `μ_n f(x)` for `n ≤ N` and the tail oscillation; the window starts at
/// `N/2` unless given.
pub fn convergence_trace(
    sys: &DynSystem,
    spec: &SequenceSpec,
    f: &TestFunction,
    x: State,
    n_max: usize,
    window_start: Option<usize>,
) -> Result<ConvergenceTrace> {
    if n_max < 2 {
        return Err(Error::domain("convergence trace needs N >= 2"));
    }
    let mus = convolve_prefixes(spec, n_max, 0.0)?;
    convergence_trace_of(sys, &mus, f, x, window_start)
}

pub fn convergence_trace_of(
    sys: &DynSystem,
    mus: &[LatticeMeasure],
    f: &TestFunction,
    x: State,
    window_start: Option<usize>,
) -> Result<ConvergenceTrace> {
    let n_max = mus.len();
    if n_max < 2 {
        return Err(Error::domain("convergence trace needs N >= 2"));
    }
    sys.check_state(x)?;
    f.validate(sys)?;
    let m = window_start.unwrap_or(n_max / 2).max(1);
    if m > n_max {
        return Err(Error::domain(alloc::format!(
            "window start {m} beyond horizon {n_max}"
        )));
    }
    let a = Averager::new(sys, f);
    let values: Vec<f64> = mus.iter().map(|mu| a.average(&a.prepare(mu), x)).collect();
    let tail = &values[m - 1..];
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ConvergenceTrace {
        values,
        window_start: m,
        oscillation: hi - lo,
    })
}
