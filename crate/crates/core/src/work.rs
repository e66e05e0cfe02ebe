//! Work (or nonuniformity) of transition and its relation to `p*`.
//!
//! Work is exchanged with a two-level battery `|0>, |W>`. Appending the
//! excited battery state compresses a curve horizontally by `e^{-beta W}`,
//! which is how both the deterministic work cost and the probability/work
//! tradeoff are evaluated here.

use crate::curve::build_curve;
use crate::state::{tensor, Mode, State, System};
use crate::transition::max_transition_probability;
use crate::{Error, Result, TOL};

/// Work of a transition. Positive values can be extracted, negative values
/// must be supplied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkValue {
    /// `beta W` in nats for thermal systems, bits for degenerate ones.
    pub value: f64,
    pub mode: Mode,
}

impl WorkValue {
    /// The value as `beta W` in nats regardless of mode.
    pub fn beta_w(&self) -> f64 {
        match self.mode {
            Mode::Thermal => self.value,
            Mode::Noisy => self.value * std::f64::consts::LN_2,
        }
    }

    pub fn bits(&self) -> f64 {
        self.beta_w() / std::f64::consts::LN_2
    }

    fn from_ratio(ratio: f64, mode: Mode) -> Self {
        let value = match mode {
            Mode::Thermal => 0.0 - ratio.ln(),
            Mode::Noisy => 0.0 - ratio.log2(),
        };
        Self { value, mode }
    }
}

fn check_pair(rho: &State, sigma: &State, system: &System) -> Result<()> {
    system.check_dim(rho.dim())?;
    system.check_dim(sigma.dim())
}

/// Largest horizontal ratio `L_y(rho) / L_y(sigma)` over `sigma`'s elbow heights.
pub fn max_width_ratio(rho: &State, sigma: &State, system: &System) -> Result<f64> {
    check_pair(rho, sigma, system)?;
    let rc = build_curve(rho, system)?;
    let sc = build_curve(sigma, system)?;
    let mut best: f64 = 0.0;
    for y in sc.elbow_sets().ys {
        best = best.max(rc.l_at(y)? / sc.l_at(y)?);
    }
    Ok(best)
}

/// Optimal deterministic work of `rho -> sigma` for block-diagonal `sigma`.
pub fn work_of_transition(rho: &State, sigma: &State, system: &System) -> Result<WorkValue> {
    let ratio = max_width_ratio(rho, sigma, system)?;
    Ok(WorkValue::from_ratio(ratio, system.mode()))
}

/// `-log2(eta_max * n)`, the nonuniformity of formation for degenerate systems.
pub fn nonuniformity_of_formation(state: &State) -> f64 {
    let largest = state.populations().iter().copied().fold(0.0, f64::max);
    -(largest * state.dim() as f64).log2()
}

/// Bounds `lower <= p* <= upper` from work in both directions.
pub fn pstar_bounds(rho: &State, sigma: &State, system: &System) -> Result<(f64, f64)> {
    let forward = work_of_transition(rho, sigma, system)?;
    let backward = work_of_transition(sigma, rho, system)?;
    let lower = forward.beta_w().exp().min(1.0);
    let upper = (-backward.beta_w()).exp().min(1.0);
    Ok((lower, upper))
}

/// Two-level battery with gap `|beta_w| / beta`.
fn battery(beta_w: f64, beta: f64) -> Result<System> {
    System::new(vec![0.0, beta_w.abs() / beta], beta)
}

/// `p*` when `beta_w` of work is extracted (positive) or supplied (negative).
pub fn pstar_with_work(rho: &State, sigma: &State, system: &System, beta_w: f64) -> Result<f64> {
    check_pair(rho, sigma, system)?;
    if !beta_w.is_finite() {
        return Err(Error::OutOfRange {
            what: "beta_w",
            value: beta_w,
        });
    }
    if beta_w == 0.0 {
        return max_transition_probability(rho, sigma, system);
    }
    let bat = battery(beta_w, system.beta())?;
    let ground = State::pure(2, 0)?;
    let excited = State::pure(2, 1)?;
    let (r, s) = if beta_w < 0.0 {
        (&excited, &ground)
    } else {
        (&ground, &excited)
    };
    let (rho_w, joint) = tensor((rho, system), (r, &bat))?;
    let (sigma_w, _) = tensor((sigma, system), (s, &bat))?;
    max_transition_probability(&rho_w, &sigma_w, &joint)
}

/// Closed form of `p*(W)` for two-level degenerate systems, `W` in bits.
///
/// `eta1` and `zeta1` are the larger populations of `rho` and `sigma`.
pub fn qubit_tradeoff_closed_form(eta1: f64, zeta1: f64, w_bits: f64) -> Result<f64> {
    for (what, v) in [("eta1", eta1), ("zeta1", zeta1)] {
        if !(0.5..=1.0).contains(&v) {
            return Err(Error::OutOfRange { what, value: v });
        }
    }
    if w_bits.is_nan() {
        return Err(Error::OutOfRange {
            what: "w_bits",
            value: w_bits,
        });
    }
    let w_det = qubit_work_bits(eta1, zeta1);
    if w_bits <= w_det {
        return Ok(1.0);
    }
    let p0 = (eta1 / zeta1).min(1.0);
    let scale = (-w_bits).exp2();
    if eta1 < zeta1 {
        if w_bits <= 0.0 {
            Ok((2.0 - scale) * p0 + (scale - 1.0) / zeta1)
        } else {
            Ok(p0 * scale)
        }
    } else {
        let denominator = 2.0 * eta1 * zeta1 - zeta1;
        let crossover = if denominator > 0.0 {
            ((eta1 - 2.0 * zeta1 + 2.0 * eta1 * zeta1) / denominator).log2()
        } else {
            f64::INFINITY
        };
        if w_bits <= crossover {
            Ok((2.0 * eta1 - 1.0) + 2.0 * (1.0 - eta1) * scale)
        } else {
            Ok(eta1 / zeta1 * scale)
        }
    }
}

/// Work of transition in bits between qubits `(eta1, 1-eta1) -> (zeta1, 1-zeta1)`.
fn qubit_work_bits(eta1: f64, zeta1: f64) -> f64 {
    let rank = |p: f64| if p < 1.0 { 2.0 } else { 1.0 };
    // horizontal distance to height zeta1 on rho's curve, one unit per level
    let reach = if zeta1 <= eta1 {
        zeta1 / eta1
    } else {
        1.0 + (zeta1 - eta1) / (1.0 - eta1)
    };
    let mut ratio: f64 = rank(eta1) / rank(zeta1);
    if zeta1 < 1.0 {
        ratio = ratio.max(reach);
    }
    -ratio.log2()
}

/// Consistency with the Jarzynski equality: returns `(p*, p* e^{beta W_{sigma->tau}})`
/// for the transition from the thermal state to `sigma`. The product never
/// exceeds one.
pub fn jarzynski_upper_check(sigma: &State, system: &System) -> Result<(f64, f64)> {
    let tau = system.gibbs_state();
    let pstar = max_transition_probability(&tau, sigma, system)?;
    let w = work_of_transition(sigma, &tau, system)?;
    let product = pstar * w.beta_w().exp();
    debug_assert!(product <= 1.0 + TOL, "Jarzynski bound violated: {product}");
    Ok((pstar, product))
}
