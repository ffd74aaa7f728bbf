//! Generators for `ν_1, ν_2, …` and their prefix convolutions.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::math;
use crate::measure::{LatticeMeasure, DEFAULT_SUPPORT_CAP, MASS_TOLERANCE};

/// ℓ¹ tolerance when checking `a δ_x + (1 − a) γ` against `ν`.
pub const DECOMPOSITION_TOLERANCE: f64 = 1e-12;

/// `ν = weight·δ_atom + (1 − weight)·remainder`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub weight: f64,
    pub atom: i64,
    pub remainder: LatticeMeasure,
}

impl Decomposition {
    pub fn reconstruct(&self) -> Result<LatticeMeasure> {
        let a = self.weight;
        let mut atoms: Vec<(i64, f64)> = self
            .remainder
            .atoms()
            .map(|(k, w)| (k, (1.0 - a) * w))
            .collect();
        atoms.push((self.atom, a));
        LatticeMeasure::from_atoms(&atoms)
    }
}

/// One generated term: the measure and, optionally, its decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub measure: LatticeMeasure,
    pub decomposition: Option<Decomposition>,
}

impl Term {
    pub fn plain(measure: LatticeMeasure) -> Self {
        Term {
            measure,
            decomposition: None,
        }
    }
}

type Generator = dyn Fn(usize) -> Result<Term> + Send + Sync;

/// Rule producing `ν_n` from `n ≥ 1`.
#[derive(Clone)]
pub struct SequenceSpec {
    label: String,
    length_hint: Option<usize>,
    generator: Arc<Generator>,
}

impl fmt::Debug for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SequenceSpec")
            .field("label", &self.label)
            .field("length_hint", &self.length_hint)
            .finish_non_exhaustive()
    }
}

impl SequenceSpec {
    pub fn from_fn<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(usize) -> Result<Term> + Send + Sync + 'static,
    {
        SequenceSpec {
            label: label.into(),
            length_hint: None,
            generator: Arc::new(f),
        }
    }

    /// `ν_n = nu` for every `n`.
    pub fn iid(nu: LatticeMeasure) -> Self {
        let label = format!("iid offset={} weights={:?}", nu.min_index(), nu.weights());
        let term = Term::plain(nu);
        Self::from_fn(label, move |_| Ok(term.clone()))
    }

    /// `ν_n = nu` for every `n`, with a fixed decomposition attached.
    pub fn iid_decomposed(nu: LatticeMeasure, decomposition: Decomposition) -> Self {
        let label = format!(
            "iid offset={} weights={:?} a={} x={}",
            nu.min_index(),
            nu.weights(),
            decomposition.weight,
            decomposition.atom
        );
        let term = Term {
            measure: nu,
            decomposition: Some(decomposition),
        };
        Self::from_fn(label, move |_| Ok(term.clone()))
    }

    /// Explicit finite list; asking past its end is a generator failure.
    pub fn from_list(list: Vec<LatticeMeasure>) -> Self {
        let len = list.len();
        let mut spec = Self::from_fn(format!("list of {len}"), move |n| {
            list.get(n - 1)
                .cloned()
                .map(Term::plain)
                .ok_or_else(|| Error::Generator {
                    n,
                    reason: format!("list holds only {len} measures"),
                })
        });
        spec.length_hint = Some(len);
        spec
    }

    pub fn with_length_hint(mut self, n_max: usize) -> Self {
        self.length_hint = Some(n_max);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn length_hint(&self) -> Option<usize> {
        self.length_hint
    }

    /// `ν_n` with its decomposition, validated.
    pub fn term(&self, n: usize) -> Result<Term> {
        if n == 0 {
            return Err(Error::Generator {
                n,
                reason: "terms are indexed from 1".into(),
            });
        }
        let term = (self.generator)(n)?;
        let m = &term.measure;
        if !(math::abs(m.mass() + m.mass_defect() - 1.0) <= MASS_TOLERANCE) {
            return Err(Error::Generator {
                n,
                reason: format!("mass {} is not 1", m.mass() + m.mass_defect()),
            });
        }
        if let Some(d) = &term.decomposition {
            if !(d.weight > 0.0 && d.weight <= 1.0) {
                return Err(Error::Generator {
                    n,
                    reason: format!("decomposition weight {} outside (0, 1]", d.weight),
                });
            }
            let rebuilt = d.reconstruct()?;
            let dist = rebuilt.l1_distance(m);
            if dist > DECOMPOSITION_TOLERANCE {
                return Err(Error::Generator {
                    n,
                    reason: format!("decomposition misses ν_n by {dist} in ℓ¹"),
                });
            }
        }
        Ok(term)
    }

    pub fn measure(&self, n: usize) -> Result<LatticeMeasure> {
        self.term(n).map(|t| t.measure)
    }

    pub fn decomposition(&self, n: usize) -> Result<Decomposition> {
        self.term(n)?
            .decomposition
            .ok_or(Error::MissingDecomposition { n })
    }
}

/// `μ_1, …, μ_N` with `μ_n = ν_1 ∗ ⋯ ∗ ν_n`.
///
/// After each convolution weights below `prune_eps` are dropped into the
/// mass defect; nothing is renormalised.
pub fn convolve_prefixes(
    spec: &SequenceSpec,
    n_max: usize,
    prune_eps: f64,
) -> Result<Vec<LatticeMeasure>> {
    convolve_prefixes_capped(spec, n_max, prune_eps, DEFAULT_SUPPORT_CAP)
}

pub fn convolve_prefixes_capped(
    spec: &SequenceSpec,
    n_max: usize,
    prune_eps: f64,
    cap: usize,
) -> Result<Vec<LatticeMeasure>> {
    if n_max == 0 {
        return Err(Error::domain("need at least one term"));
    }
    if !(0.0..=1e-8).contains(&prune_eps) {
        return Err(Error::domain(format!(
            "prune_eps {prune_eps} outside [0, 1e-8]"
        )));
    }
    let mut out: Vec<LatticeMeasure> = Vec::with_capacity(n_max);
    let first = spec.measure(1)?;
    if first.support_len() > cap {
        return Err(Error::SupportCap {
            size: first.support_len(),
            cap,
        });
    }
    out.push(first.pruned(prune_eps));
    for n in 2..=n_max {
        let nu = spec.measure(n)?;
        let next = out[n - 2].convolve_capped(&nu, cap)?.pruned(prune_eps);
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn translations_compose() {
        let spec = SequenceSpec::iid(LatticeMeasure::delta(1));
        let mus = convolve_prefixes(&spec, 3, 0.0).unwrap();
        assert_eq!(
            mus,
            vec![
                LatticeMeasure::delta(1),
                LatticeMeasure::delta(2),
                LatticeMeasure::delta(3)
            ]
        );
    }

    #[test]
    fn coin_prefix() {
        let spec = SequenceSpec::iid(LatticeMeasure::new(0, vec![0.5, 0.5]).unwrap());
        let mus = convolve_prefixes(&spec, 2, 0.0).unwrap();
        assert_eq!(mus[1].weights(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn mass_is_conserved_without_pruning() {
        let spec = SequenceSpec::iid(LatticeMeasure::new(-1, vec![0.2, 0.3, 0.1, 0.4]).unwrap());
        let mus = convolve_prefixes(&spec, 40, 0.0).unwrap();
        let last = mus.last().unwrap();
        assert_eq!(last.mass_defect(), 0.0);
        assert!((last.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pruning_accumulates_defect() {
        let spec = SequenceSpec::iid(LatticeMeasure::new(0, vec![0.5, 0.5]).unwrap());
        let mus = convolve_prefixes(&spec, 60, 1e-9).unwrap();
        let last = mus.last().unwrap();
        assert!(last.mass_defect() > 0.0);
        assert!((last.mass() + last.mass_defect() - 1.0).abs() < 1e-12);
        assert!(last.weights().iter().all(|&w| w == 0.0 || w >= 1e-9));
    }

    #[test]
    fn bad_prune_and_list_overrun() {
        let spec = SequenceSpec::iid(LatticeMeasure::delta(0));
        assert!(matches!(
            convolve_prefixes(&spec, 3, 1e-3),
            Err(Error::Domain(_))
        ));
        let list = SequenceSpec::from_list(vec![LatticeMeasure::delta(0); 2]);
        assert!(matches!(
            convolve_prefixes(&list, 3, 0.0),
            Err(Error::Generator { n: 3, .. })
        ));
    }

    #[test]
    fn cap_error_propagates() {
        let spec = SequenceSpec::iid(LatticeMeasure::uniform(0, 100).unwrap());
        assert!(matches!(
            convolve_prefixes_capped(&spec, 5, 0.0, 300),
            Err(Error::SupportCap { .. })
        ));
    }

    #[test]
    fn decomposition_is_checked() {
        let nu = LatticeMeasure::new(-1, vec![0.5, 0.0, 0.5]).unwrap();
        let good = Decomposition {
            weight: 0.5,
            atom: 1,
            remainder: LatticeMeasure::delta(-1),
        };
        let spec = SequenceSpec::iid_decomposed(nu.clone(), good.clone());
        assert_eq!(spec.decomposition(4).unwrap(), good);
        let bad = Decomposition {
            weight: 0.5,
            atom: 0,
            remainder: LatticeMeasure::delta(-1),
        };
        let spec = SequenceSpec::iid_decomposed(nu.clone(), bad);
        assert!(matches!(spec.term(1), Err(Error::Generator { .. })));
        assert!(matches!(
            SequenceSpec::iid(nu).decomposition(1),
            Err(Error::MissingDecomposition { n: 1 })
        ));
    }
}
