//! Brute-force checks that do not use the curve machinery.
//!
//! Reachability between diagonal states is decided directly: `sigma` is
//! reachable from `rho` iff some column-stochastic `G` with `G g = g`
//! (`g` the Gibbs state) maps `rho` to `sigma`. The optimal probability is
//! the largest `p` with `G rho >= p sigma` entrywise.

mod rng;
mod simplex;

pub use rng::SplitMix64;
pub use simplex::{simplex_solve, LpProblem, LpSolution, LpStatus};

use nalgebra::DMatrix;

use crate::curve::build_curve;
use crate::state::{tensor, State, System};
use crate::{Error, Result};

/// Gibbs-stochastic constraints on the `n^2` entries of `G` (row-major),
/// embedded in a problem with `extra` trailing variables.
fn gibbs_stochastic_rows(g: &[f64], extra: usize) -> (DMatrix<f64>, Vec<f64>) {
    let n = g.len();
    let vars = n * n + extra;
    let mut a = DMatrix::zeros(2 * n, vars);
    let mut b = vec![0.0; 2 * n];
    for j in 0..n {
        for i in 0..n {
            a[(j, i * n + j)] = 1.0;
        }
        b[j] = 1.0;
    }
    for i in 0..n {
        for j in 0..n {
            a[(n + i, i * n + j)] = g[j];
        }
        b[n + i] = g[i];
    }
    (a, b)
}

fn stack(top: (DMatrix<f64>, Vec<f64>), bottom: (DMatrix<f64>, Vec<f64>)) -> (DMatrix<f64>, Vec<f64>) {
    let (a1, mut b1) = top;
    let (a2, b2) = bottom;
    let mut a = DMatrix::zeros(a1.nrows() + a2.nrows(), a1.ncols());
    a.rows_mut(0, a1.nrows()).copy_from(&a1);
    a.rows_mut(a1.nrows(), a2.nrows()).copy_from(&a2);
    b1.extend(b2);
    (a, b1)
}

fn check(rho: &State, sigma: &State, system: &System) -> Result<()> {
    system.check_dim(rho.dim())?;
    system.check_dim(sigma.dim())
}

/// Whether a Gibbs-stochastic matrix maps `rho` exactly onto `sigma`.
pub fn oracle_feasible(rho: &State, sigma: &State, system: &System) -> Result<bool> {
    check(rho, sigma, system)?;
    let n = system.dim();
    let g = system.gibbs_state();
    let eta = rho.populations();
    let mut map = DMatrix::zeros(n, n * n);
    for i in 0..n {
        for j in 0..n {
            map[(i, i * n + j)] = eta[j];
        }
    }
    let (a, b) = stack(
        gibbs_stochastic_rows(g.populations(), 0),
        (map, sigma.populations().to_vec()),
    );
    let lp = LpProblem::non_negative(vec![0.0; n * n], a, b);
    Ok(simplex_solve(&lp)?.status == LpStatus::Optimal)
}

/// Largest `p` such that some Gibbs-stochastic `G` has `G rho >= p sigma`.
pub fn oracle_pstar(rho: &State, sigma: &State, system: &System) -> Result<f64> {
    check(rho, sigma, system)?;
    let n = system.dim();
    let g = system.gibbs_state();
    let eta = rho.populations();
    let zeta = sigma.populations();
    // variables: G (n^2), p, slacks (n)
    let vars = n * n + 1 + n;
    let mut rows = DMatrix::zeros(n, vars);
    for i in 0..n {
        for j in 0..n {
            rows[(i, i * n + j)] = eta[j];
        }
        rows[(i, n * n)] = -zeta[i];
        rows[(i, n * n + 1 + i)] = -1.0;
    }
    let (a, b) = stack(gibbs_stochastic_rows(g.populations(), 1 + n), (rows, vec![0.0; n]));
    let mut objective = vec![0.0; vars];
    objective[n * n] = 1.0;
    let mut lp = LpProblem::non_negative(objective, a, b);
    lp.bounds[n * n] = (0.0, 1.0);
    let sol = simplex_solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.values[n * n].clamp(0.0, 1.0)),
        status => Err(Error::Numerical(format!("unexpected LP status {status:?}"))),
    }
}

/// Compares the two curves at `samples` evenly spaced abscissae in `[0, Z]`.
pub fn dense_curve_check(rho: &State, sigma: &State, system: &System, samples: usize) -> Result<bool> {
    check(rho, sigma, system)?;
    if samples < 2 {
        return Err(Error::OutOfRange {
            what: "samples",
            value: samples as f64,
        });
    }
    let rc = build_curve(rho, system)?;
    let sc = build_curve(sigma, system)?;
    let z = rc.z();
    for k in 0..samples {
        let x = z * k as f64 / (samples - 1) as f64;
        if rc.v_at(x)? < sc.v_at(x)? - 1e-9 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A random vertex of the Gibbs-stochastic polytope: maximizes `<R, G>` for
/// a uniformly random `R`.
fn random_vertex(g: &[f64], rng: &mut SplitMix64) -> Result<DMatrix<f64>> {
    let n = g.len();
    let objective: Vec<f64> = (0..n * n).map(|_| rng.next_f64()).collect();
    let (a, b) = gibbs_stochastic_rows(g, 0);
    let sol = simplex_solve(&LpProblem::non_negative(objective, a, b))?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Numerical("Gibbs-stochastic polytope reported empty".into()));
    }
    Ok(DMatrix::from_row_slice(n, n, &sol.values))
}

/// `w_identity I + w_thermal g 1^T + w_vertex V` for a random polytope vertex `V`.
///
/// Weights must be non-negative and sum to one.
pub fn gibbs_stochastic_mixture(
    system: &System,
    weights: [f64; 3],
    seed: u64,
) -> Result<DMatrix<f64>> {
    let total: f64 = weights.iter().sum();
    if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized { sum: total });
    }
    let n = system.dim();
    let g = system.gibbs_state();
    let g = g.populations();
    let mut rng = SplitMix64::new(seed);
    let vertex = if weights[2] > 0.0 {
        random_vertex(g, &mut rng)?
    } else {
        DMatrix::zeros(n, n)
    };
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        weights[0] * id + weights[1] * g[i] + weights[2] * vertex[(i, j)]
    }))
}

/// Random Gibbs-stochastic matrix, deterministic per seed.
pub fn random_gibbs_stochastic(system: &System, seed: u64) -> Result<DMatrix<f64>> {
    let mut rng = SplitMix64::new(seed);
    let weights = rng.simplex(3);
    gibbs_stochastic_mixture(system, [weights[0], weights[1], weights[2]], rng.next_u64())
}

/// Applies a stochastic matrix to a state.
pub fn apply(matrix: &DMatrix<f64>, state: &State) -> Result<State> {
    if matrix.ncols() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: matrix.ncols(),
            found: state.dim(),
        });
    }
    let v = matrix * nalgebra::DVector::from_column_slice(state.populations());
    State::new(v.iter().map(|x| x.max(0.0)).collect())
}

const WORK_LIMIT: f64 = 50.0;
const WORK_RESOLUTION: f64 = 1e-8;

fn feasible_with_battery(rho: &State, sigma: &State, system: &System, beta_w: f64) -> Result<bool> {
    let gap = beta_w.abs() / system.beta();
    let battery = System::new(vec![0.0, gap], system.beta())?;
    let ground = State::pure(2, 0)?;
    let excited = State::pure(2, 1)?;
    let (from, to) = if beta_w < 0.0 {
        (&excited, &ground)
    } else {
        (&ground, &excited)
    };
    let (initial, joint) = tensor((rho, system), (from, &battery))?;
    let (target, _) = tensor((sigma, system), (to, &battery))?;
    oracle_feasible(&initial, &target, &joint)
}

/// Largest extractable `beta W` (nats) found by bisection on the battery
/// gap. Values beyond `+-50` are reported as infinite.
pub fn oracle_work(rho: &State, sigma: &State, system: &System) -> Result<f64> {
    check(rho, sigma, system)?;
    let feasible = |w: f64| feasible_with_battery(rho, sigma, system, w);
    let (mut lo, mut hi);
    if feasible(1.0)? {
        lo = 1.0;
        hi = 2.0;
        while feasible(hi)? {
            lo = hi;
            hi *= 2.0;
            if lo >= WORK_LIMIT {
                return Ok(f64::INFINITY);
            }
        }
    } else if feasible(-1.0)? {
        lo = -1.0;
        hi = 1.0;
    } else {
        hi = -1.0;
        lo = -2.0;
        while !feasible(lo)? {
            hi = lo;
            lo *= 2.0;
            if hi <= -WORK_LIMIT {
                return Ok(f64::NEG_INFINITY);
            }
        }
    }
    while hi - lo > WORK_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One randomly drawn problem.
#[derive(Debug, Clone)]
pub struct Instance {
    pub system: System,
    pub rho: State,
    pub sigma: State,
}

fn sparse_simplex(rng: &mut SplitMix64, n: usize) -> Result<State> {
    let mut v = rng.simplex(n);
    let zeros = rng.below(n);
    for _ in 0..zeros {
        let k = rng.below(n);
        v[k] = 0.0;
    }
    if v.iter().all(|&x| x == 0.0) {
        v[rng.below(n)] = 1.0;
    }
    let s: f64 = v.iter().sum();
    State::new(v.iter().map(|x| x / s).collect())
}

/// Draws an instance of dimension `n` with energies uniform in `[0, max_energy]`.
///
/// Mixes unrelated pairs, reachable targets `G rho`, Gibbs targets and
/// states with vanishing populations.
pub fn random_instance(rng: &mut SplitMix64, n: usize, max_energy: f64, beta: f64) -> Result<Instance> {
    let energies = (0..n).map(|_| rng.uniform(0.0, max_energy)).collect();
    let system = System::new(energies, beta)?;
    let rho = State::new(rng.simplex(n))?;
    let (rho, sigma) = match rng.below(4) {
        0 => {
            let sigma = State::new(rng.simplex(n))?;
            (rho, sigma)
        }
        1 => {
            let g = random_gibbs_stochastic(&system, rng.next_u64())?;
            let sigma = apply(&g, &rho)?;
            (rho, sigma)
        }
        2 => (rho, system.gibbs_state()),
        _ => (sparse_simplex(rng, n)?, sparse_simplex(rng, n)?),
    };
    Ok(Instance { system, rho, sigma })
}

/// `count` instances with dimensions cycling through `dims`.
pub fn corpus(seed: u64, count: usize, dims: &[usize], max_energy: f64, beta: f64) -> Result<Vec<Instance>> {
    let mut rng = SplitMix64::new(seed);
    (0..count)
        .map(|k| random_instance(&mut rng, dims[k % dims.len()], max_energy, beta))
        .collect()
}
