use crate::linalg::{hermitian_eig, CMatrix};
use crate::state::{DensityMatrix, System};
use crate::Result;

use super::renyi::{check_alpha, log_sum_exp};
use super::{largest_feasible, AlphaGrid};

/// Eigenvalues at or below this count as outside the support.
const SUPPORT_FLOOR: f64 = 1e-12;

fn diagonal(m: &CMatrix) -> Vec<f64> {
    (0..m.nrows()).map(|i| m[(i, i)].re).collect()
}

fn entropy(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&v| v > SUPPORT_FLOOR)
        .map(|&v| -v * v.ln())
        .sum()
}

/// Whether `m` has weight on a level where its own diagonal vanishes.
fn leaks_outside_diagonal(m: &CMatrix, d: &[f64]) -> bool {
    (0..m.nrows()).any(|i| {
        d[i] <= SUPPORT_FLOOR && (0..m.ncols()).any(|j| m[(i, j)].norm() > SUPPORT_FLOOR)
    })
}

/// `S_alpha(m || diag(m))` for a Hermitian positive semidefinite `m`.
pub(crate) fn coherence_of_matrix(m: &CMatrix, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let n = m.nrows();
    if (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)].norm() == 0.0)) {
        return Ok(0.0);
    }
    let d = diagonal(m);
    if leaks_outside_diagonal(m, &d) {
        return Ok(f64::INFINITY);
    }

    if alpha == 1.0 {
        let eig = hermitian_eig(m)?;
        return Ok((entropy(&d) - entropy(&eig.eigenvalues)).max(0.0));
    }

    if alpha < 1.0 {
        let eig = hermitian_eig(m)?;
        let power = eig.map(|l| if l > SUPPORT_FLOOR { l.powf(alpha) } else { 0.0 });
        let trace: f64 = d
            .iter()
            .enumerate()
            .filter(|(_, &di)| di > SUPPORT_FLOOR)
            .map(|(i, &di)| power[(i, i)].re * di.powf(1.0 - alpha))
            .sum();
        if trace <= 0.0 {
            return Ok(f64::INFINITY);
        }
        return Ok((trace.ln() / (alpha - 1.0)).max(0.0));
    }

    // sandwiched form: D^s m D^s with s = (1 - alpha) / (2 alpha)
    let s = if alpha.is_infinite() {
        -0.5
    } else {
        (1.0 - alpha) / (2.0 * alpha)
    };
    let w: Vec<f64> = d
        .iter()
        .map(|&di| if di > SUPPORT_FLOOR { di.powf(s) } else { 0.0 })
        .collect();
    let sandwiched = CMatrix::from_fn(n, n, |i, j| m[(i, j)] * (w[i] * w[j]));
    let eig = hermitian_eig(&sandwiched)?;
    if alpha.is_infinite() {
        let top = eig.eigenvalues[0];
        return Ok(if top > 0.0 { top.ln().max(0.0) } else { 0.0 });
    }
    let terms: Vec<f64> = eig
        .eigenvalues
        .iter()
        .filter(|&&l| l > SUPPORT_FLOOR)
        .map(|&l| alpha * l.ln())
        .collect();
    Ok((log_sum_exp(&terms) / (alpha - 1.0)).max(0.0))
}

/// Free coherence `A_alpha(rho) = S_alpha(rho || rho_D)` in nats.
///
/// Petz form below `alpha = 1`, relative entropy of coherence at `alpha = 1`
/// and the sandwiched form above (with `alpha = inf` as its limit).
pub fn free_coherence(rho: &DensityMatrix, system: &System, alpha: f64) -> Result<f64> {
    system.check_dim(rho.dim())?;
    coherence_of_matrix(rho.entries(), alpha)
}

/// Largest `p` allowed by the free-coherence constraints at every grid order.
///
/// An upper bound on the heralded probability only; combine with
/// [`super::heralded_bound_cto`] by taking the minimum.
pub fn heralded_coherence_bound(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    system: &System,
    grid: &AlphaGrid,
) -> Result<f64> {
    system.check_dim(rho.dim())?;
    system.check_dim(sigma.dim())?;
    let n = rho.dim();
    let tau = system.gibbs_state();
    let tau = tau.populations();

    let initial = CMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i < n && j < n {
            rho.entries()[(i, j)]
        } else {
            Default::default()
        }
    });
    let mixture = |p: f64| {
        CMatrix::from_fn(2 * n, 2 * n, |i, j| {
            if i < n && j < n {
                sigma.entries()[(i, j)] * p
            } else if i >= n && i == j {
                (tau[i - n] * (1.0 - p)).into()
            } else {
                Default::default()
            }
        })
    };

    let alphas = grid.values();
    let lhs = alphas
        .iter()
        .map(|&a| coherence_of_matrix(&initial, a))
        .collect::<Result<Vec<f64>>>()?;
    largest_feasible(alphas.len(), |k, p| {
        Ok((lhs[k], coherence_of_matrix(&mixture(p), alphas[k])?))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::State;
    use proptest::prelude::*;

    fn plus() -> DensityMatrix {
        DensityMatrix::new(CMatrix::from_element(2, 2, C64::new(0.5, 0.0))).unwrap()
    }

    fn qubit(p: f64, c: C64) -> DensityMatrix {
        DensityMatrix::new(CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(p, 0.0), c, c.conj(), C64::new(1.0 - p, 0.0)],
        ))
        .unwrap()
    }

    const ALPHAS: [f64; 8] = [0.0, 0.3, 0.5, 1.0, 1.7, 2.0, 10.0, f64::INFINITY];

    #[test]
    fn diagonal_states_have_none() {
        let sys = System::trivial(3).unwrap();
        let rho = DensityMatrix::from_state(&State::new(vec![0.2, 0.5, 0.3]).unwrap());
        for a in ALPHAS {
            assert_eq!(free_coherence(&rho, &sys, a).unwrap(), 0.0);
        }
    }

    #[test]
    fn plus_state() {
        let sys = System::trivial(2).unwrap();
        let ln2 = 2f64.ln();
        for a in [0.0, 0.5, 1.0, 2.0, 5.0, f64::INFINITY] {
            let v = free_coherence(&plus(), &sys, a).unwrap();
            assert!((v - ln2).abs() < 1e-10, "alpha {a}: {v}");
        }
    }

    #[test]
    fn branches_meet_at_one() {
        let sys = System::new(vec![0.0, 1.0], 1.0).unwrap();
        let rho = qubit(0.7, C64::new(0.2, -0.25));
        let at_one = free_coherence(&rho, &sys, 1.0).unwrap();
        for a in [1.0 - 1e-4, 1.0 + 1e-4] {
            assert!((free_coherence(&rho, &sys, a).unwrap() - at_one).abs() < 1e-3);
        }
    }

    #[test]
    fn coherence_bound_examples() {
        let sys = System::new(vec![0.0, 0.5], 1.0).unwrap();
        let grid = AlphaGrid::standard();
        let rho = qubit(0.6, C64::new(0.1, 0.2));
        let diag = DensityMatrix::from_state(&State::new(vec![0.3, 0.7]).unwrap());
        assert_eq!(heralded_coherence_bound(&rho, &diag, &sys, &grid).unwrap(), 1.0);
        assert_eq!(heralded_coherence_bound(&rho, &rho, &sys, &grid).unwrap(), 1.0);
        let b = heralded_coherence_bound(&diag, &rho, &sys, &grid).unwrap();
        assert!(b < 1e-6, "{b}");
    }

    proptest! {
        #[test]
        fn free_coherence_is_non_negative(
            p in 0.05f64..0.95, re in -1.0f64..1.0, im in -1.0f64..1.0, shrink in 0.0f64..1.0,
        ) {
            let r = (p * (1.0 - p)).sqrt() * shrink;
            let norm = (re * re + im * im).sqrt().max(1e-12);
            let rho = qubit(p, C64::new(r * re / norm, r * im / norm));
            let sys = System::trivial(2).unwrap();
            let mut prev = 0.0;
            for a in ALPHAS {
                let v = free_coherence(&rho, &sys, a).unwrap();
                prop_assert!(v >= 0.0);
                prop_assert!(v >= prev - 1e-9);
                prev = v;
            }
        }
    }
}
