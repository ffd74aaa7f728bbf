//! The three-atom counterexample family and the experiments around it.
//!
//! `ν_n` puts `(1+2b)/(3+2b)` at `+1` and `1/(3+2b)` at each of `−b`, `−b−1`
//! with `b = b_n = ⌊1/(1 − a_n)⌋`. Each term has mean zero, so the drift
//! comes entirely from the rare long jumps; the sequence is dissipative yet
//! keeps `|μ̂_n|` bounded below by `Π(2a_l − 1)` on all of `[−½, ½)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dynamics::{Averager, DynSystem, Prepared, State, TestFunction};
use crate::error::{Error, Result};
use crate::math;
use crate::measure::LatticeMeasure;
use crate::par;
use crate::sequence::{convolve_prefixes_capped, Decomposition, SequenceSpec, Term};
use crate::spectral;

/// Running max at or above this counts as "swept up".
pub const SUP_THRESHOLD: f64 = 0.9;
/// Running min at or below this counts as "swept down".
pub const INF_THRESHOLD: f64 = 0.1;
/// Slack of the Fourier-floor contract.
pub const FLOOR_TOLERANCE: f64 = 1e-10;

/// `n ↦ a_n`.
#[derive(Clone, Debug, PartialEq)]
pub enum AtomRule {
    /// `a_n = 1 − n^{−p}`.
    InversePower {
        p: f64,
    },
    Constant(f64),
    /// `a_1, a_2, …`; indices past the end are a generator failure.
    Table(Vec<f64>),
}

impl AtomRule {
    pub fn a(&self, n: usize) -> Result<f64> {
        let a = match self {
            AtomRule::InversePower { p } => 1.0 - math::powf(n as f64, -p),
            AtomRule::Constant(a) => *a,
            AtomRule::Table(v) => *v.get(n - 1).ok_or_else(|| Error::Generator {
                n,
                reason: format!("a_n table holds only {} entries", v.len()),
            })?,
        };
        if !(0.0..1.0).contains(&a) {
            return Err(Error::Generator {
                n,
                reason: format!("a_n = {a} outside [0, 1)"),
            });
        }
        Ok(a)
    }

    /// `⌊1/(1 − a_n)⌋`, taken as `⌊n^p⌋` for the power rule so integer
    /// powers are exact.
    pub fn b(&self, n: usize) -> Result<u64> {
        let a = self.a(n)?;
        let inv = match self {
            AtomRule::InversePower { p } => math::powf(n as f64, *p),
            _ => 1.0 / (1.0 - a),
        };
        // Guard against 1/(1 − a) landing a rounding step below an integer.
        let b = math::floor(inv * (1.0 + 4.0 * f64::EPSILON));
        if !(1.0..9.0e15).contains(&b) {
            return Err(Error::Generator {
                n,
                reason: format!("b_n = {b} out of range"),
            });
        }
        Ok(b as u64)
    }

    pub fn describe(&self) -> String {
        match self {
            AtomRule::InversePower { p } => format!("a_n = 1 - n^-{p}"),
            AtomRule::Constant(a) => format!("a_n = {a}"),
            AtomRule::Table(v) => format!("a_n table of {}", v.len()),
        }
    }
}

/// The three-atom measure for `b ≥ 1`, with its decomposition
/// `a δ_1 + (1 − a)·½(δ_{−b} + δ_{−b−1})`, `a = (1+2b)/(3+2b)`.
pub fn example_measure(b: u64) -> Result<Term> {
    if b == 0 {
        return Err(Error::domain("example measure needs b >= 1"));
    }
    let b_i = i64::try_from(b).map_err(|_| Error::domain("b too large"))?;
    let denom = 3.0 + 2.0 * b as f64;
    let side = 1.0 / denom;
    let a = (1.0 + 2.0 * b as f64) / denom;
    let measure = LatticeMeasure::from_atoms(&[(1, a), (-b_i, side), (-b_i - 1, side)])?;
    let remainder = LatticeMeasure::new(-b_i - 1, alloc::vec![0.5, 0.5])?;
    Ok(Term {
        measure,
        decomposition: Some(Decomposition {
            weight: a,
            atom: 1,
            remainder,
        }),
    })
}

/// `(2b² + 4b + 2)/(3 + 2b)`.
pub fn example_second_moment(b: u64) -> f64 {
    let b = b as f64;
    (2.0 * b * b + 4.0 * b + 2.0) / (3.0 + 2.0 * b)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepoutFamily {
    pub rule: AtomRule,
}

impl SweepoutFamily {
    pub fn new(rule: AtomRule) -> Self {
        SweepoutFamily { rule }
    }

    /// `a_n = 1 − 1/n²`.
    pub fn standard() -> Self {
        Self::new(AtomRule::InversePower { p: 2.0 })
    }

    pub fn b(&self, n: usize) -> Result<u64> {
        self.rule.b(n)
    }

    pub fn term(&self, n: usize) -> Result<Term> {
        example_measure(self.rule.b(n)?)
    }

    /// Decomposition weight of `ν_n`, `(1 + 2b_n)/(3 + 2b_n)`.
    pub fn weight(&self, n: usize) -> Result<f64> {
        let b = self.rule.b(n)? as f64;
        Ok((1.0 + 2.0 * b) / (3.0 + 2.0 * b))
    }

    /// `Π_{l≤n} (2a_l − 1)` for `n = 1..=N`, from the weights alone.
    pub fn products(&self, n_max: usize) -> Result<Vec<f64>> {
        let mut p = 1.0;
        (1..=n_max)
            .map(|n| {
                p *= 2.0 * self.weight(n)? - 1.0;
                Ok(p)
            })
            .collect()
    }

    pub fn spec(&self) -> SequenceSpec {
        let fam = self.clone();
        SequenceSpec::from_fn(
            format!("three-atom family, {}", self.rule.describe()),
            move |n| fam.term(n),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DissipativityRow {
    pub n: usize,
    /// `max_{|k| ≤ K} μ_n(k)`.
    pub near_mass: f64,
}

pub fn dissipativity_of(mus: &[LatticeMeasure], k: u64) -> Vec<DissipativityRow> {
    let k = k.min(i64::MAX as u64) as i64;
    mus.iter()
        .enumerate()
        .map(|(i, mu)| {
            let lo = mu.min_index().max(-k);
            let hi = mu.max_index().min(k);
            let near = (lo..=hi).map(|j| mu.get(j)).fold(0.0, f64::max);
            DissipativityRow {
                n: i + 1,
                near_mass: near,
            }
        })
        .collect()
}

pub fn dissipativity_trace(
    spec: &SequenceSpec,
    k: u64,
    n_max: usize,
    prune_eps: f64,
    support_cap: usize,
) -> Result<Vec<DissipativityRow>> {
    if k == 0 || n_max == 0 {
        return Err(Error::domain("dissipativity trace needs K, N >= 1"));
    }
    let mus = convolve_prefixes_capped(spec, n_max, prune_eps, support_cap)?;
    Ok(dissipativity_of(&mus, k))
}

/// Reduced fractions `p/q ∈ [−½, ½)` with `q ≤ q_max`, ascending.
pub fn low_denominator_points(q_max: u64) -> Vec<f64> {
    let mut pts = Vec::new();
    for q in 1..=q_max.max(1) {
        let q_i = q as i64;
        for p in -(q_i / 2)..=(q_i / 2) {
            if math::gcd(p.unsigned_abs(), q) != 1 {
                continue;
            }
            let t = p as f64 / q as f64;
            if (-0.5..0.5).contains(&t) {
                pts.push(t);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FloorRow {
    pub t: f64,
    /// `min_{N/2 ≤ n ≤ N} |μ̂_n(t)|`.
    pub floor: f64,
    /// `Π_{l≤N} (2a_l − 1)`.
    pub product: f64,
    pub contract_ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FloorScan {
    pub horizon: usize,
    pub window_start: usize,
    pub product: f64,
    /// Some `a_l ≤ ½`: the product bound says nothing.
    pub vacuous: bool,
    pub rows: Vec<FloorRow>,
}

impl FloorScan {
    pub fn contract_holds(&self) -> bool {
        self.rows.iter().all(|r| r.contract_ok)
    }
}

/// Liminf proxy `min_{N/2 ≤ n ≤ N} |μ̂_n(t)|` against the product bound.
///
/// `μ̂_n(t)` is accumulated as `Π_{l≤n} ν̂_l(t)`, which equals the transform
/// of the convolution without ever forming it.
pub fn fourier_floor_scan(spec: &SequenceSpec, points: &[f64], n_max: usize) -> Result<FloorScan> {
    if n_max == 0 {
        return Err(Error::domain("floor scan needs N >= 1"));
    }
    if let Some(t) = points.iter().find(|t| !(-0.5..0.5).contains(*t)) {
        return Err(Error::domain(format!("scan point {t} outside [-1/2, 1/2)")));
    }
    let mut terms = Vec::with_capacity(n_max);
    let mut product = 1.0;
    let mut vacuous = false;
    for n in 1..=n_max {
        let d = spec.decomposition(n)?;
        vacuous |= d.weight <= 0.5;
        product *= 2.0 * d.weight - 1.0;
        terms.push(spec.measure(n)?);
    }
    let window_start = (n_max / 2).max(1);
    let floors = par::map_range(points.len(), |i| {
        let t = points[i];
        let mut z = num_complex::Complex64::new(1.0, 0.0);
        let mut floor = f64::INFINITY;
        for (l, nu) in terms.iter().enumerate() {
            z *= spectral::fourier_value(nu, t);
            if l + 1 >= window_start {
                floor = floor.min(z.norm());
            }
        }
        floor
    });
    let rows = points
        .iter()
        .zip(floors)
        .map(|(&t, floor)| FloorRow {
            t,
            floor,
            product,
            contract_ok: floor >= product - FLOOR_TOLERANCE,
        })
        .collect();
    Ok(FloorScan {
        horizon: n_max,
        window_start,
        product,
        vacuous,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepoutSimulation {
    pub horizon: usize,
    /// Measure of `B` as realised on the system.
    pub b_measure: f64,
    /// Per state: `max_{n≤N} μ_n χ_B(x)`.
    pub running_max: Vec<f64>,
    /// Per state: `min_{n≤N} μ_n χ_B(x)`.
    pub running_min: Vec<f64>,
    /// Fraction of states with running max `≥ SUP_THRESHOLD` after each `n`.
    pub sup_trace: Vec<f64>,
    /// Fraction of states with running min `≤ INF_THRESHOLD` after each `n`.
    pub inf_trace: Vec<f64>,
}

impl SweepoutSimulation {
    pub fn sup_fraction(&self) -> f64 {
        self.sup_trace.last().copied().unwrap_or(0.0)
    }

    pub fn inf_fraction(&self) -> f64 {
        self.inf_trace.last().copied().unwrap_or(0.0)
    }

    pub fn global_max(&self) -> f64 {
        self.running_max.iter().copied().fold(0.0, f64::max)
    }
}

/// `B` of measure `b_measure`: the block `{0, …, round(bq) − 1}` on `ℤ_q`,
/// or `[0, b)` on the circle.
pub fn sweep_set(sys: &DynSystem, b_measure: f64) -> Result<(TestFunction, f64)> {
    if !(0.0..=1.0).contains(&b_measure) {
        return Err(Error::domain(format!(
            "B measure {b_measure} outside [0, 1]"
        )));
    }
    Ok(match *sys {
        DynSystem::Cyclic { q } => {
            let len = math::floor(b_measure * q as f64 + 0.5) as u64;
            (TestFunction::block(0, len), len as f64 / q as f64)
        }
        DynSystem::Rotation { .. } => (TestFunction::interval(0.0, b_measure), b_measure),
    })
}

pub fn sweepout_simulation_of(
    sys: &DynSystem,
    mus: &[LatticeMeasure],
    b_measure: f64,
) -> Result<SweepoutSimulation> {
    if mus.is_empty() {
        return Err(Error::Empty);
    }
    let (chi, realised) = sweep_set(sys, b_measure)?;
    chi.validate(sys)?;
    let states: Vec<State> = sys.states();
    let n_max = mus.len();
    let avg = Averager::new(sys, &chi);
    let prepared: Vec<Prepared<'_>> = mus.iter().map(|m| avg.prepare(m)).collect();
    // Per state: the index at which running max first reaches the threshold
    // and likewise for the min, plus the extremes.
    let per_state = par::map_range(states.len(), |i| {
        let x = states[i];
        let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
        let (mut up_at, mut down_at) = (usize::MAX, usize::MAX);
        for (n, mu) in prepared.iter().enumerate() {
            let v = avg.average(mu, x);
            hi = hi.max(v);
            lo = lo.min(v);
            if up_at == usize::MAX && hi >= SUP_THRESHOLD {
                up_at = n;
            }
            if down_at == usize::MAX && lo <= INF_THRESHOLD {
                down_at = n;
            }
        }
        (hi, lo, up_at, down_at)
    });
    let total = states.len() as f64;
    let mut ups = alloc::vec![0usize; n_max];
    let mut downs = alloc::vec![0usize; n_max];
    let mut running_max = Vec::with_capacity(states.len());
    let mut running_min = Vec::with_capacity(states.len());
    for &(hi, lo, up, down) in &per_state {
        running_max.push(hi);
        running_min.push(lo);
        if up < n_max {
            ups[up] += 1;
        }
        if down < n_max {
            downs[down] += 1;
        }
    }
    let cumulative = |counts: &[usize]| {
        let mut c = 0usize;
        counts
            .iter()
            .map(|&k| {
                c += k;
                c as f64 / total
            })
            .collect::<Vec<_>>()
    };
    Ok(SweepoutSimulation {
        horizon: n_max,
        b_measure: realised,
        sup_trace: cumulative(&ups),
        inf_trace: cumulative(&downs),
        running_max,
        running_min,
    })
}

pub fn sweepout_simulation(
    sys: &DynSystem,
    spec: &SequenceSpec,
    b_measure: f64,
    n_max: usize,
    prune_eps: f64,
    support_cap: usize,
) -> Result<SweepoutSimulation> {
    let mus = convolve_prefixes_capped(spec, n_max, prune_eps, support_cap)?;
    sweepout_simulation_of(sys, &mus, b_measure)
}
