//! Rényi free energies, free coherence and heralded-probability bounds with
//! catalysts.
//!
//! Every bound here compares the initial state, tagged with a flag qubit in
//! `|0>`, against the heralded mixture
//! `p sigma (x) |0><0| + (1 - p) tau (x) |1><1|` for each order `alpha` of a
//! finite [`AlphaGrid`]. The reference on the flag is `tau (x) I/2`; the
//! normalization shifts both sides of every constraint by the same amount.

mod coherence;
mod renyi;

pub use coherence::{free_coherence, heralded_coherence_bound};
pub use renyi::{free_energy_alpha, renyi_divergence, renyi_divergence_raw};

pub use crate::linalg::{hermitian_eig, HermitianEig};

use crate::state::{State, System};
use crate::{Error, Result};

/// Sorted orders `alpha >= 0`, with `f64::INFINITY` standing for `alpha = inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaGrid {
    values: Vec<f64>,
}

const REQUIRED: [f64; 5] = [0.0, 0.5, 1.0, 2.0, f64::INFINITY];

impl AlphaGrid {
    /// `{0, 1/2, 1, 2, inf}` together with `extra`.
    pub fn with_values(extra: &[f64]) -> Result<Self> {
        let mut values = REQUIRED.to_vec();
        for &a in extra {
            renyi::check_alpha(a)?;
            values.push(a);
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(Self { values })
    }

    /// Log-spaced points `10^-3 .. 10^3`, `points` of them, plus the required orders.
    pub fn log_spaced(points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::OutOfRange {
                what: "grid points",
                value: points as f64,
            });
        }
        let step = 6.0 / (points - 1) as f64;
        let extra: Vec<f64> = (0..points)
            .map(|k| 10f64.powf(-3.0 + step * k as f64))
            .collect();
        Self::with_values(&extra)
    }

    /// 97 log-spaced points, sixteen per decade.
    pub fn standard() -> Self {
        Self::log_spaced(97).expect("valid grid")
    }

    /// Twice the density of [`AlphaGrid::standard`].
    pub fn refined() -> Self {
        Self::log_spaced(193).expect("valid grid")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl Default for AlphaGrid {
    fn default() -> Self {
        Self::standard()
    }
}

const SAMPLES: usize = 32;
const SCAN_POINTS: usize = 10_000;
const RESOLUTION: f64 = 1e-10;
const GAP_SLACK: f64 = 1e-12;

/// Left- and right-hand side of one constraint at a given `p`.
type Sides = (f64, f64);

fn satisfied((lhs, rhs): Sides) -> bool {
    if lhs == f64::INFINITY {
        return true;
    }
    lhs - rhs >= -GAP_SLACK * lhs.abs().max(1.0)
}

fn bisect<F: Fn(f64) -> Result<bool>>(mut lo: f64, mut hi: f64, feasible: F) -> Result<f64> {
    while hi - lo > RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Largest `p` in `[0, 1]` satisfying every constraint `k < count`.
///
/// Bisection per constraint when each gap is non-increasing on a 32-point
/// sample, otherwise a joint scan over `10^4` values followed by bisection
/// inside the last feasible cell.
pub(crate) fn largest_feasible<F>(count: usize, sides: F) -> Result<f64>
where
    F: Fn(usize, f64) -> Result<Sides>,
{
    let mut monotone = true;
    'outer: for k in 0..count {
        let mut prev = f64::INFINITY;
        for s in 0..SAMPLES {
            let p = s as f64 / (SAMPLES - 1) as f64;
            let (lhs, rhs) = sides(k, p)?;
            if lhs == f64::INFINITY {
                break;
            }
            let gap = lhs - rhs;
            if gap.is_nan() {
                return Err(Error::Numerical("undefined constraint gap".into()));
            }
            if gap > prev + GAP_SLACK * lhs.abs().max(1.0) {
                monotone = false;
                break 'outer;
            }
            prev = gap;
        }
    }

    let all = |p: f64| -> Result<bool> {
        for k in 0..count {
            if !satisfied(sides(k, p)?) {
                return Ok(false);
            }
        }
        Ok(true)
    };

    if monotone {
        let mut best: f64 = 1.0;
        for k in 0..count {
            let one = |p: f64| sides(k, p).map(satisfied);
            let pk = if one(1.0)? {
                1.0
            } else if !one(0.0)? {
                0.0
            } else {
                bisect(0.0, 1.0, one)?
            };
            best = best.min(pk);
        }
        return Ok(best);
    }

    for s in (0..=SCAN_POINTS).rev() {
        let p = s as f64 / SCAN_POINTS as f64;
        if all(p)? {
            if s == SCAN_POINTS {
                return Ok(1.0);
            }
            return bisect(p, (s + 1) as f64 / SCAN_POINTS as f64, all);
        }
    }
    Ok(0.0)
}

/// `(p sigma, (1 - p) tau)` as a vector on system (x) flag.
fn heralded_mixture(sigma: &[f64], tau: &[f64], p: f64) -> Vec<f64> {
    sigma
        .iter()
        .map(|s| p * s)
        .chain(tau.iter().map(|t| (1.0 - p) * t))
        .collect()
}

/// Upper bound on the heralded probability of `rho -> sigma` with catalysts.
///
/// The largest `p` for which `F_alpha(rho (x) |0>)` dominates the free energy
/// of the heralded mixture at every grid order. Never below the
/// non-catalytic `p*`.
pub fn heralded_bound_cto(
    rho: &State,
    sigma: &State,
    system: &System,
    grid: &AlphaGrid,
) -> Result<f64> {
    system.check_dim(rho.dim())?;
    system.check_dim(sigma.dim())?;
    let tau = system.gibbs_state();
    let tau = tau.populations();
    let reference: Vec<f64> = tau.iter().chain(tau).map(|t| 0.5 * t).collect();
    let zeros = vec![0.0; rho.dim()];
    let initial: Vec<f64> = rho.populations().iter().chain(&zeros).copied().collect();

    let alphas = grid.values();
    let lhs = alphas
        .iter()
        .map(|&a| renyi_divergence_raw(&initial, &reference, a))
        .collect::<Result<Vec<f64>>>()?;

    largest_feasible(alphas.len(), |k, p| {
        let mix = heralded_mixture(sigma.populations(), tau, p);
        Ok((lhs[k], renyi_divergence_raw(&mix, &reference, alphas[k])?))
    })
}
