//! Finitely supported nonnegative measures on ℤ and their exact algebra.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Largest support (in lattice points) a convolution may produce by default.
pub const DEFAULT_SUPPORT_CAP: usize = 1_000_000;

/// Tolerance on `Σ weights + mass_defect = 1` for probability measures.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A finitely supported measure on ℤ stored densely over
/// `[min_index, max_index]`.
///
/// The first and last stored weights are always positive. Mass removed by
/// pruning is kept in `mass_defect` instead of being renormalised away, so a
/// probability measure satisfies `Σ weights + mass_defect = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeMeasure {
    min_index: i64,
    weights: Vec<f64>,
    mass_defect: f64,
}

/// Witness for the largest coset mass `ν(βℤ + r)` over proper cosets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CosetSup {
    pub rho: f64,
    pub beta: u64,
    pub residue: u64,
}

impl LatticeMeasure {
    /// Point mass at `k`.
    pub fn delta(k: i64) -> Self {
        LatticeMeasure {
            min_index: k,
            weights: vec![1.0],
            mass_defect: 0.0,
        }
    }

    /// Probability measure with weight `weights[i]` at `min_index + i`.
    pub fn new(min_index: i64, weights: Vec<f64>) -> Result<Self> {
        Self::with_defect(min_index, weights, 0.0)
    }

    /// Like [`LatticeMeasure::new`] but with `mass_defect` already removed.
    pub fn with_defect(min_index: i64, weights: Vec<f64>, mass_defect: f64) -> Result<Self> {
        if !(mass_defect.is_finite() && mass_defect >= 0.0) {
            return Err(Error::domain("mass defect must be finite and nonnegative"));
        }
        let m = Self::from_trimmed(min_index, weights, mass_defect)?;
        let mass = m.mass();
        if math::abs(mass + mass_defect - 1.0) > MASS_TOLERANCE {
            return Err(Error::NotProbability {
                mass,
                defect: mass_defect,
            });
        }
        Ok(m)
    }

    /// Densifies `(index, weight)` pairs; repeated indices add up.
    pub fn from_atoms(atoms: &[(i64, f64)]) -> Result<Self> {
        let lo = atoms.iter().map(|a| a.0).min().ok_or(Error::Empty)?;
        let hi = atoms.iter().map(|a| a.0).max().ok_or(Error::Empty)?;
        let span = (hi - lo) as u64 + 1;
        if span > DEFAULT_SUPPORT_CAP as u64 {
            return Err(Error::SupportCap {
                size: span as usize,
                cap: DEFAULT_SUPPORT_CAP,
            });
        }
        let mut weights = vec![0.0; span as usize];
        for &(k, w) in atoms {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidWeight { index: k, value: w });
            }
            weights[(k - lo) as usize] += w;
        }
        Self::new(lo, weights)
    }

    /// Uniform measure on `start, …, start + len − 1`.
    pub fn uniform(start: i64, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::Empty);
        }
        Self::new(start, vec![1.0 / len as f64; len])
    }

    fn from_trimmed(min_index: i64, weights: Vec<f64>, mass_defect: f64) -> Result<Self> {
        for (i, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidWeight {
                    index: min_index + i as i64,
                    value: w,
                });
            }
        }
        Self::trimmed(min_index, weights, mass_defect).ok_or(Error::Empty)
    }

    /// Strips zero weights from both ends; `None` if nothing positive remains.
    fn trimmed(min_index: i64, mut weights: Vec<f64>, mass_defect: f64) -> Option<Self> {
        let first = weights.iter().position(|&w| w > 0.0)?;
        let last = weights.iter().rposition(|&w| w > 0.0)?;
        weights.truncate(last + 1);
        if first > 0 {
            weights.drain(..first);
        }
        Some(LatticeMeasure {
            min_index: min_index + first as i64,
            weights,
            mass_defect,
        })
    }

    pub fn min_index(&self) -> i64 {
        self.min_index
    }

    pub fn max_index(&self) -> i64 {
        self.min_index + self.weights.len() as i64 - 1
    }

    /// Dense weights over `[min_index, max_index]`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mass_defect(&self) -> f64 {
        self.mass_defect
    }

    /// Number of stored lattice points (including interior zeros).
    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    /// Number of strictly positive weights.
    pub fn atom_count(&self) -> usize {
        self.weights.iter().filter(|&&w| w > 0.0).count()
    }

    /// `max |k|` over the stored range.
    pub fn max_abs_index(&self) -> u64 {
        self.min_index
            .unsigned_abs()
            .max(self.max_index().unsigned_abs())
    }

    /// Σ weights (excluding the defect).
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn get(&self, k: i64) -> f64 {
        if k < self.min_index {
            return 0.0;
        }
        self.weights
            .get((k - self.min_index) as usize)
            .copied()
            .unwrap_or(0.0)
    }

    /// Every stored `(k, μ(k))`, zeros included, in increasing `k`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let lo = self.min_index;
        self.weights
            .iter()
            .enumerate()
            .map(move |(i, &w)| (lo + i as i64, w))
    }

    /// Only the points carrying positive weight.
    pub fn atoms(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.iter().filter(|&(_, w)| w > 0.0)
    }

    /// Translate by `k` (convolution with `δ_k`).
    pub fn shifted(&self, k: i64) -> Self {
        LatticeMeasure {
            min_index: self.min_index + k,
            weights: self.weights.clone(),
            mass_defect: self.mass_defect,
        }
    }

    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.convolve_capped(other, DEFAULT_SUPPORT_CAP)
    }

    /// Exact convolution; fails instead of truncating when the output would
    /// exceed `cap` lattice points.
    pub fn convolve_capped(&self, other: &Self, cap: usize) -> Result<Self> {
        let len = self.weights.len() + other.weights.len() - 1;
        if len > cap {
            return Err(Error::SupportCap { size: len, cap });
        }
        // The outer loop runs over the sparser factor and skips its zeros.
        let (outer, inner) = if self.atom_count() <= other.atom_count() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = vec![0.0; len];
        for (i, &w) in outer.weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let dst = &mut out[i..i + inner.weights.len()];
            for (d, &v) in dst.iter_mut().zip(&inner.weights) {
                *d += w * v;
            }
        }
        let defect = self.mass_defect + other.mass_defect - self.mass_defect * other.mass_defect;
        Self::trimmed(self.min_index + other.min_index, out, defect).ok_or(Error::Empty)
    }

    /// Zeroes every weight below `eps` and books the removed mass as defect.
    /// Never renormalises.
    pub fn pruned(mut self, eps: f64) -> Self {
        if eps <= 0.0 {
            return self;
        }
        let mut removed = 0.0;
        for w in &mut self.weights {
            if *w < eps && *w > 0.0 {
                removed += *w;
                *w = 0.0;
            }
        }
        if removed == 0.0 {
            return self;
        }
        let defect = self.mass_defect + removed;
        match Self::trimmed(self.min_index, self.weights, defect) {
            Some(m) => m,
            // Everything fell below the threshold; keep the empty remainder
            // representable as a zero atom at the old origin.
            None => LatticeMeasure {
                min_index: self.min_index,
                weights: vec![0.0],
                mass_defect: defect,
            },
        }
    }

    /// ℓ¹ distance between weight functions.
    pub fn l1_distance(&self, other: &Self) -> f64 {
        let lo = self.min_index.min(other.min_index);
        let hi = self.max_index().max(other.max_index());
        (lo..=hi)
            .map(|k| math::abs(self.get(k) - other.get(k)))
            .sum()
    }

    /// `E(μ) = Σ k μ(k)`.
    pub fn expectation(&self) -> f64 {
        self.iter().map(|(k, w)| k as f64 * w).sum()
    }

    /// `Σ |k|^p μ(k)`.
    pub fn moment(&self, p: f64) -> f64 {
        if p == 1.0 {
            return self.first_moment();
        }
        if p == 2.0 {
            return self.second_moment();
        }
        self.atoms()
            .map(|(k, w)| math::powf(math::abs(k as f64), p) * w)
            .sum()
    }

    pub fn first_moment(&self) -> f64 {
        self.iter().map(|(k, w)| math::abs(k as f64) * w).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.iter()
            .map(|(k, w)| {
                let k = k as f64;
                k * k * w
            })
            .sum()
    }

    /// `‖μ − μ∗δ_1‖₁ = Σ_k |μ(k) − μ(k−1)|`.
    pub fn tv_shift_distance(&self) -> f64 {
        let w = &self.weights;
        let interior: f64 = w.windows(2).map(|p| math::abs(p[1] - p[0])).sum();
        w[0] + interior + w[w.len() - 1]
    }

    /// Largest mass of a proper coset `βℤ + r` (β ≥ 2).
    ///
    /// Moduli run over `2..=diameter`; every larger modulus isolates single
    /// atoms, which is covered by the largest atom.
    pub fn coset_mass_sup(&self) -> CosetSup {
        let atoms: Vec<(i64, f64)> = self.atoms().collect();
        let (atom_k, atom_w) =
            atoms
                .iter()
                .copied()
                .fold((self.min_index, f64::NEG_INFINITY), |best, a| {
                    if a.1 > best.1 {
                        a
                    } else {
                        best
                    }
                });
        let diameter = (self.max_index() - self.min_index) as u64;

        let mut best: Option<CosetSup> = None;
        let mut buckets: Vec<f64> = Vec::new();
        let mut residues: Vec<(u64, f64)> = Vec::with_capacity(atoms.len());
        for beta in 2..=diameter {
            let (mass, residue) = if (atoms.len() as u64) < beta {
                residues.clear();
                residues.extend(
                    atoms
                        .iter()
                        .map(|&(k, w)| (k.rem_euclid(beta as i64) as u64, w)),
                );
                residues.sort_by_key(|r| r.0);
                let mut top = (0.0, 0);
                let mut i = 0;
                while i < residues.len() {
                    let r = residues[i].0;
                    let mut m = 0.0;
                    while i < residues.len() && residues[i].0 == r {
                        m += residues[i].1;
                        i += 1;
                    }
                    if m > top.0 {
                        top = (m, r);
                    }
                }
                top
            } else {
                buckets.clear();
                buckets.resize(beta as usize, 0.0);
                for &(k, w) in &atoms {
                    buckets[k.rem_euclid(beta as i64) as usize] += w;
                }
                let mut top = (0.0, 0);
                for (r, &m) in buckets.iter().enumerate() {
                    if m > top.0 {
                        top = (m, r as u64);
                    }
                }
                top
            };
            if best.is_none_or(|b| mass > b.rho) {
                best = Some(CosetSup {
                    rho: mass,
                    beta,
                    residue,
                });
            }
        }

        let atom_beta = (diameter + 1).max(2);
        let atom_witness = CosetSup {
            rho: atom_w,
            beta: atom_beta,
            residue: atom_k.rem_euclid(atom_beta as i64) as u64,
        };
        match best {
            Some(b) if b.rho >= atom_w => b,
            _ => atom_witness,
        }
    }

    /// Whether the support avoids every proper coset `r + dℤ`, `d ≥ 2`.
    pub fn is_strictly_aperiodic(&self) -> bool {
        let mut atoms = self.atoms();
        let Some((k0, _)) = atoms.next() else {
            return false;
        };
        let mut g = 0;
        for (k, _) in atoms {
            g = math::gcd(g, (k - k0).unsigned_abs());
            if g == 1 {
                return true;
            }
        }
        false
    }
}
