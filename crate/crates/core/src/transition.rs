//! Maximum transition probability and the protocol that achieves it.

use nalgebra::DMatrix;

use crate::curve::{build_curve, curve_dominates, Comparison, Curve};
use crate::state::{decohere, BetaOrder, DensityMatrix, State, System};
use crate::{Error, Result, TOL};

/// Absolute slack when deciding that a block ratio is attained again.
const RATIO_TIE: f64 = 1e-12;

fn check_pair(rho: &State, sigma: &State, system: &System) -> Result<()> {
    system.check_dim(rho.dim())?;
    system.check_dim(sigma.dim())
}

fn min_height_ratio(rho_curve: &Curve, sigma_curve: &Curve) -> Result<f64> {
    let mut best = f64::INFINITY;
    let mut last_x = f64::NAN;
    for (x, y) in sigma_curve.points().skip(1) {
        if x == last_x || y <= 0.0 {
            continue;
        }
        last_x = x;
        best = best.min(rho_curve.v_at(x)? / y);
    }
    Ok(best)
}

/// Largest `p` with `rho -> p sigma + (1 - p) X` for block-diagonal `sigma`.
pub fn max_transition_probability(rho: &State, sigma: &State, system: &System) -> Result<f64> {
    check_pair(rho, sigma, system)?;
    let rc = build_curve(rho, system)?;
    let sc = build_curve(sigma, system)?;
    if curve_dominates(&rc, &sc, Comparison::Tolerant)? {
        return Ok(1.0);
    }
    Ok(min_height_ratio(&rc, &sc)?.clamp(0.0, 1.0))
}

/// Transition probability for states that may carry coherences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PStar {
    pub value: f64,
    /// Set when `sigma` has coherences: `value` is then only an upper bound.
    pub upper_bound_only: bool,
}

/// Dephases both states and reports `p*`, flagging coherent targets.
pub fn max_transition_probability_dm(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    system: &System,
) -> Result<PStar> {
    let rho_d = decohere(rho, system)?;
    let sigma_d = decohere(sigma, system)?;
    Ok(PStar {
        value: max_transition_probability(&rho_d, &sigma_d, system)?,
        upper_bound_only: sigma.max_coherence() > TOL,
    })
}

/// State with `sigma`'s beta-order whose curve joins `rho`'s curve sampled at
/// `sigma`'s elbows. `rho` always thermo-majorizes it.
pub fn flatten_to_target_order(rho: &State, sigma: &State, system: &System) -> Result<State> {
    check_pair(rho, sigma, system)?;
    let rc = build_curve(rho, system)?;
    let sc = build_curve(sigma, system)?;
    let ordered = interpolated_increments(&rc, &sc)?;
    State::new(sc.order().restore(&ordered))
}

fn interpolated_increments(rho_curve: &Curve, sigma_curve: &Curve) -> Result<Vec<f64>> {
    let heights = sigma_curve
        .xs()
        .iter()
        .map(|&x| rho_curve.v_at(x))
        .collect::<Result<Vec<f64>>>()?;
    Ok(heights.windows(2).map(|h| (h[1] - h[0]).max(0.0)).collect())
}

/// Achievability certificate for `p*`.
///
/// All vectors are listed in `sigma`'s beta-order ([`Protocol::order`]).
/// The protocol first maps `rho` to `rho_sigma`, then acts blockwise to reach
/// `pre_measurement = p* sigma + (1 - p*) X`; the two-outcome measurement with
/// diagonal `m_diag` then heralds `sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct Protocol {
    pub pstar: f64,
    pub order: BetaOrder,
    /// `0 = l_0 < l_1 < ... < l_k = n`.
    pub boundaries: Vec<usize>,
    /// One ratio per block, strictly increasing; `inf` for blocks where
    /// `sigma` has no mass.
    pub ratios: Vec<f64>,
    pub sigma: Vec<f64>,
    pub rho_sigma: Vec<f64>,
    pub pre_measurement: Vec<f64>,
    pub x_state: Vec<f64>,
    pub m_diag: Vec<f64>,
}

impl Protocol {
    /// Maps a vector from `sigma`'s beta-order back to level indexing.
    pub fn in_level_order(&self, ordered: &[f64]) -> Vec<f64> {
        self.order.restore(ordered)
    }

    /// The failure branch as a state over the original levels.
    pub fn failure_state(&self) -> Result<State> {
        State::new(self.in_level_order(&self.x_state))
    }

    /// Block index of each level in beta-order.
    pub fn block_of(&self, k: usize) -> usize {
        self.boundaries.windows(2).position(|w| k >= w[0] && k < w[1]).unwrap_or(0)
    }
}

/// Builds the block protocol achieving [`max_transition_probability`].
pub fn build_protocol(rho: &State, sigma: &State, system: &System) -> Result<Protocol> {
    check_pair(rho, sigma, system)?;
    let rc = build_curve(rho, system)?;
    let sc = build_curve(sigma, system)?;
    let n = sigma.dim();
    let order = sc.order().clone();
    let sigma_ord = order.arrange(sigma.populations());
    let rho_sigma = interpolated_increments(&rc, &sc)?;

    if curve_dominates(&rc, &sc, Comparison::Tolerant)? {
        return Ok(Protocol {
            pstar: 1.0,
            order,
            boundaries: vec![0, n],
            ratios: vec![1.0],
            x_state: sigma_ord.clone(),
            pre_measurement: sigma_ord.clone(),
            m_diag: vec![1.0; n],
            sigma: sigma_ord,
            rho_sigma,
        });
    }

    // cumulative masses in sigma's order
    let mut a = vec![0.0; n + 1];
    let mut b = vec![0.0; n + 1];
    for k in 0..n {
        a[k + 1] = a[k] + rho_sigma[k];
        b[k + 1] = sc.ys()[k + 1];
    }

    let mut boundaries = vec![0];
    let mut ratios = Vec::new();
    let mut prev = 0;
    while prev < n {
        let mut r = f64::INFINITY;
        for l in (prev + 1)..=n {
            let db = b[l] - b[prev];
            if db > 0.0 {
                r = r.min((a[l] - a[prev]) / db);
            }
        }
        if r.is_infinite() {
            boundaries.push(n);
            ratios.push(f64::INFINITY);
            break;
        }
        let end = ((prev + 1)..=n)
            .rev()
            .find(|&l| ((a[l] - a[prev]) - r * (b[l] - b[prev])).abs() <= RATIO_TIE)
            .expect("the minimizing index attains the ratio");
        // recompute from the chosen end so block masses match exactly
        let r = (a[end] - a[prev]) / (b[end] - b[prev]);
        boundaries.push(end);
        ratios.push(r);
        prev = end;
    }

    let pstar = ratios[0].clamp(0.0, 1.0);
    let mut pre_measurement = vec![0.0; n];
    let mut x_state = vec![0.0; n];
    let mut m_diag = vec![0.0; n];
    for (block, w) in boundaries.windows(2).enumerate() {
        let r = ratios[block];
        for k in w[0]..w[1] {
            if r.is_infinite() {
                pre_measurement[k] = rho_sigma[k];
                x_state[k] = rho_sigma[k] / (1.0 - pstar);
                m_diag[k] = 0.0;
            } else {
                pre_measurement[k] = r * sigma_ord[k];
                x_state[k] = ((r - pstar) / (1.0 - pstar) * sigma_ord[k]).max(0.0);
                m_diag[k] = (pstar / r).min(1.0);
            }
        }
    }

    Ok(Protocol {
        pstar,
        order,
        boundaries,
        ratios,
        sigma: sigma_ord,
        rho_sigma,
        pre_measurement,
        x_state,
        m_diag,
    })
}

/// Real orthogonal `[[sqrt M, sqrt(1-M)], [sqrt(1-M), -sqrt M]]` for diagonal `M`.
pub fn measurement_unitary(m_diag: &[f64]) -> Result<DMatrix<f64>> {
    if let Some(&bad) = m_diag.iter().find(|m| !(0.0..=1.0).contains(*m)) {
        return Err(Error::OutOfRange {
            what: "measurement entry",
            value: bad,
        });
    }
    let n = m_diag.len();
    let mut u = DMatrix::zeros(2 * n, 2 * n);
    for (i, &m) in m_diag.iter().enumerate() {
        let keep = m.sqrt();
        let leak = (1.0 - m).sqrt();
        u[(i, i)] = keep;
        u[(i, n + i)] = leak;
        u[(n + i, i)] = leak;
        u[(n + i, n + i)] = -keep;
    }
    Ok(u)
}

/// Cost in units of kT of erasing the one-bit measurement record.
///
/// A single shot costs `ln 2`; when repeated, the record compresses to the
/// binary entropy `h(p)` in nats.
pub fn erasure_cost(p: f64, repeated: bool) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { what: "p", value: p });
    }
    if !repeated {
        return Ok(std::f64::consts::LN_2);
    }
    let term = |q: f64| if q > 0.0 { -q * q.ln() } else { 0.0 };
    Ok(term(p) + term(1.0 - p))
}

/// Rewrites a transition between different Hamiltonians as one over the
/// switched Hamiltonian `H_1 (+) H_2`.
///
/// `rho` is placed on the `H_1` levels and `sigma` on the `H_2` levels, so the
/// combined partition function is `Z_1 + Z_2`.
pub fn embed_changing_hamiltonian(
    rho: &State,
    sys1: &System,
    sigma: &State,
    sys2: &System,
) -> Result<(State, State, System)> {
    sys1.check_dim(rho.dim())?;
    sys2.check_dim(sigma.dim())?;
    if sys1.beta() != sys2.beta() {
        return Err(Error::BetaMismatch(sys1.beta(), sys2.beta()));
    }
    let (n1, n2) = (rho.dim(), sigma.dim());
    let mut energies = sys1.energies().to_vec();
    energies.extend_from_slice(sys2.energies());
    let mut r = rho.populations().to_vec();
    r.resize(n1 + n2, 0.0);
    let mut s = vec![0.0; n1];
    s.extend_from_slice(sigma.populations());
    Ok((State::new(r)?, State::new(s)?, System::new(energies, sys1.beta())?))
}
