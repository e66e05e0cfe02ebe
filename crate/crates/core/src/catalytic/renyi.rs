//! Classical Rényi divergences and the free energies built from them.

use crate::state::{State, System};
use crate::{Error, Result};

/// `ln sum_i exp(t_i)` without overflow.
pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::OutOfRange {
            what: "alpha",
            value: alpha,
        });
    }
    Ok(())
}

/// Rényi divergence `D_alpha(p || q)` in nats on raw probability vectors.
///
/// Support violations yield `+inf` rather than an error.
pub fn renyi_divergence_raw(p: &[f64], q: &[f64], alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    let pairs = p.iter().zip(q).filter(|(&pi, _)| pi > 0.0);

    if alpha == 0.0 {
        let mass: f64 = pairs.map(|(_, &qi)| qi).sum();
        return Ok(if mass > 0.0 { -mass.ln() } else { f64::INFINITY });
    }
    if alpha == 1.0 {
        let mut total = 0.0;
        for (&pi, &qi) in pairs {
            if qi == 0.0 {
                return Ok(f64::INFINITY);
            }
            total += pi * (pi / qi).ln();
        }
        return Ok(total);
    }
    if alpha.is_infinite() {
        let mut best = f64::NEG_INFINITY;
        for (&pi, &qi) in pairs {
            if qi == 0.0 {
                return Ok(f64::INFINITY);
            }
            best = best.max((pi / qi).ln());
        }
        return Ok(best);
    }

    let mut terms = Vec::with_capacity(p.len());
    for (&pi, &qi) in pairs {
        if qi == 0.0 {
            if alpha > 1.0 {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        terms.push(alpha * pi.ln() + (1.0 - alpha) * qi.ln());
    }
    let lse = log_sum_exp(&terms);
    if lse == f64::NEG_INFINITY {
        return Ok(f64::INFINITY);
    }
    Ok(lse / (alpha - 1.0))
}

pub fn renyi_divergence(p: &State, q: &State, alpha: f64) -> Result<f64> {
    renyi_divergence_raw(p.populations(), q.populations(), alpha)
}

/// `F_alpha = D_alpha(rho || tau) - ln Z` in units of kT.
pub fn free_energy_alpha(state: &State, system: &System, alpha: f64) -> Result<f64> {
    system.check_dim(state.dim())?;
    let d = renyi_divergence(state, &system.gibbs_state(), alpha)?;
    Ok(d - system.partition_function().ln())
}
