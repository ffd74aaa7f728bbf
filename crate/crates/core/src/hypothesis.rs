//! Finite-horizon reports on the conditions behind the convergence and
//! sweep-out results.
//!
//! Asymptotic conditions (`O(n)` growth, summability, divergence of a drift)
//! cannot be decided from finitely many terms. Each verdict therefore carries
//! its empirical bound plus a trend diagnostic, and a report only ever says
//! "holds up to horizon N".

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math;
use crate::measure::DEFAULT_SUPPORT_CAP;
use crate::par;
use crate::sequence::{convolve_prefixes_capped, SequenceSpec};
use crate::spectral::{self, DEFAULT_GRID};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HypothesisOptions {
    pub grid_size: usize,
    pub prune_eps: f64,
    pub support_cap: usize,
    /// `|E(ν_n)|` below this counts as zero.
    pub zero_tol: f64,
    /// Largest admissible second-half / first-half growth ratio. Linear
    /// growth gives 1, quadratic 3.
    pub trend_limit: f64,
    /// Same ratio for quantities that should stay bounded (`m1`, d2
    /// integrals), taken between window maxima. Bounded gives about 1,
    /// linear growth 2.
    pub bounded_trend_limit: f64,
    /// Trend ratios are checked at every horizon from here to N.
    pub min_trend_horizon: usize,
    /// `δ` of the reported `sup_{|t| ≥ δ} |ν̂_n(t)|`.
    pub tail_delta: f64,
    /// Sweep-out summability: last-half tail of `Σ(1 − a_n)` over the
    /// partial sum must not exceed this.
    pub tail_fraction: f64,
    pub d2_integrals: bool,
}

impl Default for HypothesisOptions {
    fn default() -> Self {
        HypothesisOptions {
            grid_size: DEFAULT_GRID,
            prune_eps: 0.0,
            support_cap: DEFAULT_SUPPORT_CAP,
            zero_tol: 1e-10,
            trend_limit: 2.0,
            bounded_trend_limit: 1.25,
            min_trend_horizon: 8,
            tail_delta: 0.1,
            tail_fraction: 0.05,
            d2_integrals: true,
        }
    }
}

/// Per-`n` numbers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HypothesisRow {
    pub n: usize,
    pub expectation: f64,
    pub first_moment: f64,
    pub second_moment: f64,
    /// `φ(n)/n` with `φ(n) = Σ_{i≤n} m₂(ν_i)`.
    pub phi_over_n: f64,
    pub decay_constant: f64,
    pub rho: f64,
    pub strictly_aperiodic: bool,
    /// `sup_{|t_j| ≥ δ} |ν̂_n(t_j)|`.
    pub sup_beyond: f64,
    /// `∫|μ̂″_n(t)||t|dt`, when computed.
    pub d2_integral: Option<f64>,
    /// `‖μ_n − μ_n ∗ δ_1‖₁`.
    pub shift_tv: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verdict {
    pub passed: bool,
    pub witness: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceVerdicts {
    /// Witness: `max |E(ν_n)|`.
    pub zero_expectation: Verdict,
    /// Witness: `max φ(n)/n`.
    pub moment_growth: Verdict,
    /// `(φ(N) − φ(N/2)) / φ(N/2)`.
    pub moment_trend: f64,
    /// Witness: `min_n` certified decay constant.
    pub gaussian_decay: Verdict,
    /// Witness: number of `n` with `ν_n` not strictly aperiodic.
    pub strict_aperiodicity: Verdict,
    /// Witness: `max_n sup_{β,r} ν_n(βℤ + r)`.
    pub coset_rho: Verdict,
    /// Witness: `max m₁(ν_n)`.
    pub first_moment_bound: Verdict,
    /// Witness: `max_n ∫|μ̂″_n||t|dt`.
    pub d2_integral_sup: Option<Verdict>,
    pub d2_trend: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisReport {
    pub label: String,
    pub horizon: usize,
    pub options: HypothesisOptions,
    pub rows: Vec<HypothesisRow>,
    pub verdicts: ConvergenceVerdicts,
    pub sweepout: Option<SweepoutReport>,
}

impl HypothesisReport {
    /// All three conditions of the second-derivative route, plus strict
    /// aperiodicity.
    pub fn theorem_pos_holds(&self) -> bool {
        let v = &self.verdicts;
        v.zero_expectation.passed
            && v.moment_growth.passed
            && v.gaussian_decay.passed
            && v.strict_aperiodicity.passed
    }

    /// The uniformly-bounded-moment route: zero mean, coset mass bounded
    /// away from 1, first moments bounded.
    pub fn coset_route_holds(&self) -> bool {
        let v = &self.verdicts;
        v.zero_expectation.passed && v.coset_rho.passed && v.first_moment_bound.passed
    }

    pub fn shift_distance_trace(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.shift_tv).collect()
    }

    /// Human-readable summary; starts with the failing conditions by name.
    pub fn summary_lines(&self) -> Vec<String> {
        let v = &self.verdicts;
        let mark = |p: bool| if p { "pass" } else { "FAIL" };
        let mut out = Vec::new();
        out.push(format!("sequence: {}", self.label));
        out.push(format!("horizon N = {}", self.horizon));
        out.push(format!(
            "zero_expectation: {} (max |E| = {:e})",
            mark(v.zero_expectation.passed),
            v.zero_expectation.witness
        ));
        out.push(format!(
            "moment_growth: {} (max phi(n)/n = {}, trend = {})",
            mark(v.moment_growth.passed),
            v.moment_growth.witness,
            v.moment_trend
        ));
        out.push(format!(
            "gaussian_decay: {} (min C = {})",
            mark(v.gaussian_decay.passed),
            v.gaussian_decay.witness
        ));
        out.push(format!(
            "strict_aperiodicity: {} ({} periodic terms)",
            mark(v.strict_aperiodicity.passed),
            v.strict_aperiodicity.witness
        ));
        out.push(format!(
            "coset_rho: {} (max rho = {})",
            mark(v.coset_rho.passed),
            v.coset_rho.witness
        ));
        out.push(format!(
            "first_moment_bound: {} (max m1 = {})",
            mark(v.first_moment_bound.passed),
            v.first_moment_bound.witness
        ));
        match (v.d2_integral_sup, v.d2_trend) {
            (Some(d), Some(trend)) => out.push(format!(
                "d2_integral_sup: {} (max = {}, trend = {})",
                mark(d.passed),
                d.witness,
                trend
            )),
            _ => out.push(String::from("d2_integral_sup: not computed")),
        }
        out.push(format!(
            "second-derivative route (zero mean, O(n) moments, Gaussian decay): {}",
            mark(self.theorem_pos_holds())
        ));
        out.push(format!(
            "coset route (zero mean, rho < 1, bounded m1): {}",
            mark(self.coset_route_holds())
        ));
        if let Some(s) = &self.sweepout {
            out.extend(s.summary_lines());
        }
        out.push(String::from(
            "verdicts describe n <= N only; asymptotic conditions are not decided",
        ));
        out
    }
}

/// `later / earlier` with `0/0 = 1`.
fn growth_ratio(later: f64, earlier: f64) -> f64 {
    if earlier > 0.0 {
        later / earlier
    } else if later > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

fn horizons(n_max: usize, min_h: usize) -> core::ops::RangeInclusive<usize> {
    let lo = min_h.max(2).min(n_max);
    lo..=n_max
}

/// Evaluates zero expectation, `φ(n) = O(n)`, uniform Gaussian decay, strict
/// aperiodicity, the coset mass bound, bounded first moments and the
/// `sup_n ∫|μ̂″_n||t|dt` trend for `n ≤ N`.
pub fn check_convergence_hypotheses(
    spec: &SequenceSpec,
    n_max: usize,
    opts: &HypothesisOptions,
) -> Result<HypothesisReport> {
    if n_max < 2 {
        return Err(Error::domain("horizon must be at least 2"));
    }
    let terms = (1..=n_max)
        .map(|n| spec.measure(n))
        .collect::<Result<Vec<_>>>()?;
    let prefixes = convolve_prefixes_capped(spec, n_max, opts.prune_eps, opts.support_cap)?;

    let per_n = par::map_range(n_max, |i| -> Result<_> {
        let nu = &terms[i];
        let profile = spectral::fourier_eval(nu, opts.grid_size)?;
        let decay = spectral::decay_certificate(nu, opts.grid_size)?.constant;
        let d2 = if opts.d2_integrals {
            Some(spectral::weighted_d2_integral(&prefixes[i])?)
        } else {
            None
        };
        Ok((
            decay,
            nu.coset_mass_sup().rho,
            profile.sup_beyond(opts.tail_delta),
            d2,
        ))
    });

    let mut rows = Vec::with_capacity(n_max);
    let mut phi = 0.0;
    let mut phis = Vec::with_capacity(n_max);
    for (i, res) in per_n.into_iter().enumerate() {
        let (decay, rho, sup_beyond, d2) = res?;
        let nu = &terms[i];
        let m2 = nu.second_moment();
        phi += m2;
        phis.push(phi);
        rows.push(HypothesisRow {
            n: i + 1,
            expectation: nu.expectation(),
            first_moment: nu.first_moment(),
            second_moment: m2,
            phi_over_n: phi / (i + 1) as f64,
            decay_constant: decay,
            rho,
            strictly_aperiodic: nu.is_strictly_aperiodic(),
            sup_beyond,
            d2_integral: d2,
            shift_tv: prefixes[i].tv_shift_distance(),
        });
    }

    let verdicts = convergence_verdicts(&rows, &phis, opts);
    Ok(HypothesisReport {
        label: String::from(spec.label()),
        horizon: n_max,
        options: *opts,
        rows,
        verdicts,
        sweepout: None,
    })
}

fn max_of(xs: impl Iterator<Item = f64>) -> f64 {
    xs.fold(0.0, f64::max)
}

fn convergence_verdicts(
    rows: &[HypothesisRow],
    phis: &[f64],
    opts: &HypothesisOptions,
) -> ConvergenceVerdicts {
    let n_max = rows.len();
    let max_e = max_of(rows.iter().map(|r| math::abs(r.expectation)));
    let max_phi = max_of(rows.iter().map(|r| r.phi_over_n));
    let min_c = rows
        .iter()
        .map(|r| r.decay_constant)
        .fold(f64::INFINITY, f64::min);
    let periodic = rows.iter().filter(|r| !r.strictly_aperiodic).count();
    let max_rho = max_of(rows.iter().map(|r| r.rho));
    let max_m1 = max_of(rows.iter().map(|r| r.first_moment));
    let d2_known = rows.iter().all(|r| r.d2_integral.is_some());
    let max_d2 = max_of(rows.iter().filter_map(|r| r.d2_integral));

    let phi_trend = |h: usize| {
        let half = phis[h / 2 - 1];
        growth_ratio(phis[h - 1] - half, half)
    };
    let window_trend = |h: usize, f: &dyn Fn(&HypothesisRow) -> f64| {
        let split = h / 2;
        let early = max_of(rows[..split].iter().map(f));
        let late = max_of(rows[split..h].iter().map(f));
        growth_ratio(late, early)
    };
    let m1 = |r: &HypothesisRow| r.first_moment;
    let d2 = |r: &HypothesisRow| r.d2_integral.unwrap_or(0.0);

    let hs = horizons(n_max, opts.min_trend_horizon);
    let growth_ok = hs.clone().all(|h| phi_trend(h) <= opts.trend_limit);
    let m1_ok = hs
        .clone()
        .all(|h| window_trend(h, &m1) <= opts.bounded_trend_limit);

    ConvergenceVerdicts {
        zero_expectation: Verdict {
            passed: max_e <= opts.zero_tol,
            witness: max_e,
        },
        moment_growth: Verdict {
            passed: growth_ok,
            witness: max_phi,
        },
        moment_trend: phi_trend(n_max),
        gaussian_decay: Verdict {
            passed: min_c > 0.0,
            witness: min_c,
        },
        strict_aperiodicity: Verdict {
            passed: periodic == 0,
            witness: periodic as f64,
        },
        coset_rho: Verdict {
            passed: max_rho < 1.0,
            witness: max_rho,
        },
        first_moment_bound: Verdict {
            passed: m1_ok,
            witness: max_m1,
        },
        d2_integral_sup: d2_known.then(|| Verdict {
            passed: hs
                .clone()
                .all(|h| window_trend(h, &d2) <= opts.bounded_trend_limit),
            witness: max_d2,
        }),
        d2_trend: d2_known.then(|| window_trend(n_max, &d2)),
    }
}

/// Numbers behind the dissipativity + Fourier-floor conditions of the
/// sweep-out corollary, for `ν_n = a_n δ_{x_n} + (1 − a_n) γ_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepoutReport {
    pub horizon: usize,
    pub weights: Vec<f64>,
    pub atoms: Vec<i64>,
    /// `Σ_{l≤n} (1 − a_l)`.
    pub defect_sums: Vec<f64>,
    /// `Σ_{N/2 < l ≤ N} (1 − a_l)`.
    pub tail_half: f64,
    pub summable: Verdict,
    pub min_abs_atom: i64,
    pub atoms_ok: bool,
    /// `Σ_{l≤n} x_l`.
    pub drift: Vec<i64>,
    pub drift_sign: i8,
    pub drift_ok: bool,
    /// `Π_{l≤n} (2a_l − 1)`.
    pub products: Vec<f64>,
    pub product_bound: f64,
    pub product_ok: bool,
}

impl SweepoutReport {
    pub fn holds(&self) -> bool {
        self.summable.passed && self.atoms_ok && self.drift_ok && self.product_ok
    }

    pub fn summary_lines(&self) -> Vec<String> {
        let mark = |p: bool| if p { "pass" } else { "FAIL" };
        let n = self.horizon;
        alloc::vec![
            format!(
                "sweepout summability: {} (sum(1-a_n) = {}, last-half tail = {:e})",
                mark(self.summable.passed),
                self.defect_sums[n - 1],
                self.tail_half
            ),
            format!(
                "sweepout atoms |x_n| >= 1: {} (min |x_n| = {})",
                mark(self.atoms_ok),
                self.min_abs_atom
            ),
            format!(
                "sweepout drift: {} (sum x_n = {}, sign {})",
                mark(self.drift_ok),
                self.drift[n - 1],
                self.drift_sign
            ),
            format!(
                "sweepout product bound: {} (prod(2a_n-1) = {})",
                mark(self.product_ok),
                self.product_bound
            ),
        ]
    }
}

/// Partial sums of `1 − a_n`, atoms and drift, and the lower bound
/// `Π(2a_n − 1)` for a decomposed sequence.
pub fn check_sweepout_hypotheses(
    spec: &SequenceSpec,
    n_max: usize,
    opts: &HypothesisOptions,
) -> Result<SweepoutReport> {
    if n_max < 2 {
        return Err(Error::domain("horizon must be at least 2"));
    }
    let mut weights = Vec::with_capacity(n_max);
    let mut atoms = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let d = spec.decomposition(n)?;
        weights.push(d.weight);
        atoms.push(d.atom);
    }
    let mut defect_sums = Vec::with_capacity(n_max);
    let mut products = Vec::with_capacity(n_max);
    let mut drift = Vec::with_capacity(n_max);
    let (mut s, mut p, mut x) = (0.0, 1.0, 0i64);
    for (&a, &atom) in weights.iter().zip(&atoms) {
        s += 1.0 - a;
        p *= 2.0 * a - 1.0;
        x += atom;
        defect_sums.push(s);
        products.push(p);
        drift.push(x);
    }
    let split = n_max / 2;
    let tail_half = s - defect_sums[split - 1];
    let min_abs_atom = atoms.iter().map(|x| x.abs()).min().unwrap_or(0);
    let drift_sign = x.signum() as i8;
    let drift_ok = drift_sign != 0 && {
        let sg = drift_sign as i64;
        let early = drift[..split].iter().map(|d| sg * d).max().unwrap_or(0);
        let late = drift[split..].iter().map(|d| sg * d).min().unwrap_or(0);
        late > early
    };
    let all_above_half = weights.iter().all(|&a| a > 0.5);
    Ok(SweepoutReport {
        horizon: n_max,
        summable: Verdict {
            passed: tail_half <= opts.tail_fraction * s,
            witness: tail_half,
        },
        tail_half,
        defect_sums,
        atoms_ok: min_abs_atom >= 1,
        min_abs_atom,
        drift,
        drift_sign,
        drift_ok,
        product_bound: p,
        product_ok: all_above_half && p > 0.0,
        products,
        weights,
        atoms,
    })
}

/// Both reports; the sweep-out part is filled when every term up to N is
/// decomposed.
pub fn check_all(
    spec: &SequenceSpec,
    n_max: usize,
    opts: &HypothesisOptions,
) -> Result<HypothesisReport> {
    let mut report = check_convergence_hypotheses(spec, n_max, opts)?;
    report.sweepout = match check_sweepout_hypotheses(spec, n_max, opts) {
        Ok(s) => Some(s),
        Err(Error::MissingDecomposition { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(report)
}

/// `α / (1 − a_n)` with `α = d c²`: the second-moment floor for a
/// zero-mean `ν_n = a_n δ_{x_n} + (1 − a_n) γ_n` with `|x_n| ≥ c`,
/// `a_n ≥ d`.
pub fn second_moment_floor(a_n: f64, c: f64, d: f64) -> Result<f64> {
    if !(a_n > 0.0 && a_n < 1.0) {
        return Err(Error::domain(format!("a_n = {a_n} outside (0, 1)")));
    }
    if !(c >= 1.0) {
        return Err(Error::domain(format!("c = {c} below 1")));
    }
    if !(d > 0.0) {
        return Err(Error::domain(format!("d = {d} not positive")));
    }
    Ok(d * c * c / (1.0 - a_n))
}

/// `4π²φ e^{−(n−1)Ct²} + 16π⁴φ² e^{−(n−2)Ct²} t²`, the majorant of
/// `|μ̂″_n(t)|` under zero mean and `|ν̂_i(t)| ≤ e^{−Ct²}`.
pub fn second_derivative_majorant(phi: f64, n: usize, c: f64, t: f64) -> f64 {
    let t2 = t * t;
    let n = n as f64;
    4.0 * PI * PI * phi * math::exp(-(n - 1.0) * c * t2)
        + 16.0 * PI * PI * PI * PI * phi * phi * math::exp(-(n - 2.0) * c * t2) * t2
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MajorantCheck {
    /// Uniform decay constant used (`min_n` certified constant of `ν_n`).
    pub decay_constant: f64,
    /// `max |μ̂″_n(t_j)| / (majorant + slack)`, where the slack
    /// `4π² m₂(μ_n) · 1e-12` covers summation roundoff at points where
    /// the majorant itself underflows.
    pub worst_ratio: f64,
    pub worst_n: usize,
    pub worst_t: f64,
}

impl MajorantCheck {
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.worst_ratio <= 1.0 + rel_tol
    }
}

const ROUNDOFF_SLACK: f64 = 1e-12;

/// Evaluates `|μ̂″_n(t_j)|` against [`second_derivative_majorant`] at every
/// grid point for `n ≤ N`.
pub fn majorant_chain_check(
    spec: &SequenceSpec,
    n_max: usize,
    opts: &HypothesisOptions,
) -> Result<MajorantCheck> {
    let terms = (1..=n_max)
        .map(|n| spec.measure(n))
        .collect::<Result<Vec<_>>>()?;
    let decays = par::map_range(n_max, |i| {
        spectral::decay_constant(&terms[i], opts.grid_size)
    });
    let mut c = f64::INFINITY;
    for d in decays {
        c = c.min(d?);
    }
    let prefixes = convolve_prefixes_capped(spec, n_max, opts.prune_eps, opts.support_cap)?;
    let mut phis = Vec::with_capacity(n_max);
    let mut phi = 0.0;
    for nu in &terms {
        phi += nu.second_moment();
        phis.push(phi);
    }
    let grid = spectral::uniform_grid(opts.grid_size);
    let worst = par::map_range(n_max, |i| {
        let mu = &prefixes[i];
        let slack = 4.0 * PI * PI * mu.second_moment() * ROUNDOFF_SLACK;
        let mut w = (0.0, 0.0);
        for &t in &grid {
            let lhs = spectral::fourier_d2(mu, t).norm();
            let rhs = second_derivative_majorant(phis[i], i + 1, c, t);
            let r = growth_ratio(lhs, rhs + slack);
            if r > w.0 {
                w = (r, t);
            }
        }
        w
    });
    let mut best = MajorantCheck {
        decay_constant: c,
        worst_ratio: 0.0,
        worst_n: 1,
        worst_t: 0.0,
    };
    for (i, (r, t)) in worst.into_iter().enumerate() {
        if r > best.worst_ratio {
            best.worst_ratio = r;
            best.worst_n = i + 1;
            best.worst_t = t;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::LatticeMeasure;
    use crate::sequence::{Decomposition, Term};
    use alloc::vec;

    fn lazy() -> LatticeMeasure {
        LatticeMeasure::new(-1, vec![0.25, 0.5, 0.25]).unwrap()
    }

    fn quick() -> HypothesisOptions {
        HypothesisOptions {
            d2_integrals: false,
            ..HypothesisOptions::default()
        }
    }

    #[test]
    fn lazy_walk_passes() {
        let r = check_convergence_hypotheses(&SequenceSpec::iid(lazy()), 100, &quick()).unwrap();
        let v = r.verdicts;
        assert!(v.zero_expectation.passed);
        assert_eq!(v.zero_expectation.witness, 0.0);
        assert!(v.moment_growth.passed);
        assert!((v.moment_growth.witness - 0.5).abs() < 1e-15);
        assert!(v.gaussian_decay.passed);
        assert!((v.gaussian_decay.witness - PI * PI).abs() < 0.3);
        assert!(v.coset_rho.passed);
        assert!(r.theorem_pos_holds());
        assert!(r.coset_route_holds());
        assert_eq!(r.rows.len(), 100);
    }

    #[test]
    fn coin_fails_zero_expectation() {
        let coin = LatticeMeasure::new(0, vec![0.5, 0.5]).unwrap();
        let r = check_convergence_hypotheses(&SequenceSpec::iid(coin), 10, &quick()).unwrap();
        assert!(!r.verdicts.zero_expectation.passed);
        assert_eq!(r.verdicts.zero_expectation.witness, 0.5);
        assert!(r
            .summary_lines()
            .iter()
            .any(|l| l.starts_with("zero_expectation: FAIL")));
    }

    #[test]
    fn verdicts_are_monotone_in_horizon() {
        // Second moments jump at n = 10; once flagged, always flagged.
        let spec = SequenceSpec::from_fn("jump", |n| {
            let w = if n < 10 { 1 } else { 40 };
            Ok(Term::plain(
                LatticeMeasure::from_atoms(&[(-w, 0.5), (w, 0.5)]).unwrap(),
            ))
        });
        let mut failed = false;
        for n in [8, 12, 16, 24, 32] {
            let r = check_convergence_hypotheses(&spec, n, &quick()).unwrap();
            if failed {
                assert!(!r.verdicts.moment_growth.passed, "recovered at {n}");
            }
            failed |= !r.verdicts.moment_growth.passed;
        }
        assert!(failed);
    }

    #[test]
    fn sweepout_checks() {
        let nu = LatticeMeasure::new(-1, vec![0.5, 0.0, 0.5]).unwrap();
        let half = Decomposition {
            weight: 0.5,
            atom: 1,
            remainder: LatticeMeasure::delta(-1),
        };
        let r = check_sweepout_hypotheses(
            &SequenceSpec::iid_decomposed(nu, half),
            20,
            &HypothesisOptions::default(),
        )
        .unwrap();
        assert_eq!(r.product_bound, 0.0);
        assert!(!r.product_ok);
        assert!(!r.summable.passed);
        assert!(!r.holds());

        let alternating = SequenceSpec::from_fn("alternating", |n| {
            let x = if n % 2 == 1 { 1 } else { -1 };
            let measure = LatticeMeasure::from_atoms(&[(x, 0.99), (0, 0.01)]).unwrap();
            Ok(Term {
                decomposition: Some(Decomposition {
                    weight: 0.99,
                    atom: x,
                    remainder: LatticeMeasure::delta(0),
                }),
                measure,
            })
        });
        let r = check_sweepout_hypotheses(&alternating, 40, &HypothesisOptions::default()).unwrap();
        assert!(!r.drift_ok);
        assert!(r.atoms_ok);

        assert!(matches!(
            check_sweepout_hypotheses(&SequenceSpec::iid(lazy()), 5, &HypothesisOptions::default()),
            Err(Error::MissingDecomposition { n: 1 })
        ));
    }

    #[test]
    fn second_moment_floor_values() {
        assert_eq!(second_moment_floor(0.5, 1.0, 0.5).unwrap(), 1.0);
        let mut prev = 0.0;
        for a in [0.1, 0.5, 0.9, 0.99, 0.999999] {
            let f = second_moment_floor(a, 1.0, 0.3).unwrap();
            assert!(f.is_finite() && f > prev);
            prev = f;
        }
        assert!(second_moment_floor(1.0, 1.0, 0.5).is_err());
        assert!(second_moment_floor(0.5, 0.5, 0.5).is_err());
        assert!(second_moment_floor(0.5, 1.0, 0.0).is_err());
    }

    #[test]
    fn generator_failure_propagates() {
        let spec = SequenceSpec::from_list(vec![lazy(); 3]);
        assert!(matches!(
            check_convergence_hypotheses(&spec, 5, &quick()),
            Err(Error::Generator { n: 4, .. })
        ));
    }
}
