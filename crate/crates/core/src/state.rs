//! States, systems and the basic constructions on them.

use crate::linalg::{hermitian_deviation, hermitian_eig, CMatrix};
use crate::{Error, Result, TOL};

/// Negative populations down to this value are treated as rounding noise.
const CLAMP_TOL: f64 = 1e-12;

/// Relative width within which two beta-ordering keys count as tied.
const KEY_TIE_TOL: f64 = 1e-12;

/// Block-diagonal state: populations over the energy eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    populations: Vec<f64>,
}

impl State {
    /// Validates and normalizes a population vector.
    ///
    /// Entries in `[-1e-12, 0)` are clamped to zero and a sum within `1e-9` of
    /// one is renormalized exactly.
    pub fn new(populations: Vec<f64>) -> Result<Self> {
        if populations.is_empty() {
            return Err(Error::EmptyVector);
        }
        let mut populations = populations;
        for (index, p) in populations.iter_mut().enumerate() {
            if !p.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if *p < 0.0 {
                if *p < -CLAMP_TOL {
                    return Err(Error::NegativePopulation { index, value: *p });
                }
                *p = 0.0;
            }
        }
        let sum: f64 = populations.iter().sum();
        if (sum - 1.0).abs() > TOL {
            return Err(Error::NotNormalized { sum });
        }
        if sum != 1.0 {
            populations.iter_mut().for_each(|p| *p /= sum);
        }
        Ok(Self { populations })
    }

    /// Sharp state on `dim` levels: the first `rank` entries equal `1/rank`.
    pub fn sharp(dim: usize, rank: usize) -> Result<Self> {
        if rank == 0 || rank > dim {
            return Err(Error::InvalidRank { dim, rank });
        }
        let mut populations = vec![0.0; dim];
        populations[..rank].fill(1.0 / rank as f64);
        Ok(Self { populations })
    }

    /// Pure state concentrated on `level`.
    pub fn pure(dim: usize, level: usize) -> Result<Self> {
        if level >= dim {
            return Err(Error::OutOfRange {
                what: "level",
                value: level as f64,
            });
        }
        let mut populations = vec![0.0; dim];
        populations[level] = 1.0;
        Ok(Self { populations })
    }

    pub fn uniform(dim: usize) -> Result<Self> {
        Self::sharp(dim, dim)
    }

    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    pub fn dim(&self) -> usize {
        self.populations.len()
    }

    /// Number of strictly positive populations.
    pub fn rank(&self) -> usize {
        self.populations.iter().filter(|&&p| p > 0.0).count()
    }

    pub fn into_populations(self) -> Vec<f64> {
        self.populations
    }
}

/// Nonuniformity in bits carried by the sharp state `s(d, j)`.
pub fn sharp_nonuniformity(dim: usize, rank: usize) -> Result<f64> {
    if rank == 0 || rank > dim {
        return Err(Error::InvalidRank { dim, rank });
    }
    Ok((dim as f64 / rank as f64).log2())
}

/// Which resource theory a system falls under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Fully degenerate Hamiltonian; the free state is maximally mixed.
    Noisy,
    /// General Hamiltonian at inverse temperature `beta`.
    Thermal,
}

/// Energy levels and inverse temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct System {
    energies: Vec<f64>,
    beta: f64,
}

impl System {
    pub fn new(energies: Vec<f64>, beta: f64) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some(index) = energies.iter().position(|e| !e.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidSystem(format!("beta must be positive, got {beta}")));
        }
        Ok(Self { energies, beta })
    }

    /// `n` degenerate levels at zero energy, `beta = 1`.
    pub fn trivial(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n], 1.0)
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.energies.clone(), beta)
    }

    pub fn mode(&self) -> Mode {
        let first = self.energies[0];
        if self.energies.iter().all(|&e| e == first) {
            Mode::Noisy
        } else {
            Mode::Thermal
        }
    }

    /// Unnormalized Boltzmann weights `e^{-beta E_i}`.
    pub fn gibbs_weights(&self) -> Vec<f64> {
        self.energies.iter().map(|e| (-self.beta * e).exp()).collect()
    }

    pub fn partition_function(&self) -> f64 {
        self.gibbs_weights().iter().sum()
    }

    pub fn gibbs_state(&self) -> State {
        let w = self.gibbs_weights();
        let z: f64 = w.iter().sum();
        State {
            populations: w.into_iter().map(|x| x / z).collect(),
        }
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: dim,
            });
        }
        Ok(())
    }
}

pub fn partition_function(system: &System) -> f64 {
    system.partition_function()
}

pub fn gibbs_state(system: &System) -> State {
    system.gibbs_state()
}

/// Permutation listing levels by `eta_i e^{beta E_i}` in descending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaOrder {
    perm: Vec<usize>,
}

impl BetaOrder {
    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
        }
    }

    /// `perm()[k]` is the original index of the `k`-th level in the order.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Rearranges `values` (original indexing) into this order.
    pub fn arrange(&self, values: &[f64]) -> Vec<f64> {
        self.perm.iter().map(|&i| values[i]).collect()
    }

    /// Inverse of [`BetaOrder::arrange`].
    pub fn restore(&self, ordered: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; ordered.len()];
        for (k, &i) in self.perm.iter().enumerate() {
            out[i] = ordered[k];
        }
        out
    }
}

/// Beta-orders the levels of `state`.
///
/// Keys that agree to a relative 1e-12 are tied and keep their original index
/// order, so Gibbs states always give the identity.
pub fn beta_order(state: &State, system: &System) -> Result<BetaOrder> {
    system.check_dim(state.dim())?;
    let beta = system.beta();
    let keys: Vec<f64> = state
        .populations()
        .iter()
        .zip(system.energies())
        .map(|(&p, &e)| if p == 0.0 { 0.0 } else { p * (beta * e).exp() })
        .collect();
    let mut perm: Vec<usize> = (0..keys.len()).collect();
    perm.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]).then(a.cmp(&b)));

    // regroup runs of numerically tied keys by index
    let mut start = 0;
    while start < perm.len() {
        let head = keys[perm[start]];
        let mut end = start + 1;
        while end < perm.len() && head - keys[perm[end]] <= KEY_TIE_TOL * head {
            end += 1;
        }
        perm[start..end].sort_unstable();
        start = end;
    }
    Ok(BetaOrder { perm })
}

/// Complex density matrix; Hermitian, unit trace and positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        if entries.nrows() == 0 {
            return Err(Error::EmptyVector);
        }
        let dev = hermitian_deviation(&entries);
        if dev > TOL || !dev.is_finite() {
            return Err(Error::NotHermitian(dev));
        }
        let trace: f64 = (0..entries.nrows()).map(|i| entries[(i, i)].re).sum();
        if (trace - 1.0).abs() > TOL {
            return Err(Error::BadTrace(trace));
        }
        let eig = hermitian_eig(&entries)?;
        let smallest = *eig.eigenvalues.last().expect("non-empty");
        if smallest < -TOL {
            return Err(Error::NotPositive(smallest));
        }
        Ok(Self { entries })
    }

    /// Diagonal density matrix with the given populations.
    pub fn from_state(state: &State) -> Self {
        let n = state.dim();
        let mut entries = CMatrix::zeros(n, n);
        for (i, &p) in state.populations().iter().enumerate() {
            entries[(i, i)].re = p;
        }
        Self { entries }
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Largest modulus among off-diagonal entries.
    pub fn max_coherence(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(self.entries[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// Real diagonal as a population vector (no validation of the system).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).collect()
    }

    /// The fully dephased matrix `diag(rho)`.
    pub fn dephased(&self) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            out[(i, i)].re = self.entries[(i, i)].re;
        }
        out
    }
}

/// Dephases `rho` in the energy eigenbasis.
///
/// Degenerate levels are dephased as well: only the diagonal is kept.
pub fn decohere(rho: &DensityMatrix, system: &System) -> Result<State> {
    system.check_dim(rho.dim())?;
    State::new(rho.diagonal())
}

/// Tensor product of two state/system pairs (row-major flattening).
pub fn tensor(a: (&State, &System), b: (&State, &System)) -> Result<(State, System)> {
    let (sa, ha) = a;
    let (sb, hb) = b;
    ha.check_dim(sa.dim())?;
    hb.check_dim(sb.dim())?;
    if ha.beta() != hb.beta() {
        return Err(Error::BetaMismatch(ha.beta(), hb.beta()));
    }
    let mut populations = Vec::with_capacity(sa.dim() * sb.dim());
    let mut energies = Vec::with_capacity(sa.dim() * sb.dim());
    for (&pa, &ea) in sa.populations().iter().zip(ha.energies()) {
        for (&pb, &eb) in sb.populations().iter().zip(hb.energies()) {
            populations.push(pa * pb);
            energies.push(ea + eb);
        }
    }
    Ok((State::new(populations)?, System::new(energies, ha.beta())?))
}
