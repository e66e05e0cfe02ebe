//! Thermo-majorization (Lorenz) curves and the monotones read off them.
//!
//! A curve joins `(0, 0)` to the cumulative points
//! `(sum_k e^{-beta E_k}, sum_k eta_k)` taken in beta-order. It is concave,
//! ends at `(Z, 1)`, and in the degenerate case is the ordinary Lorenz curve
//! with one unit of `x` per level.

mod export;

pub use export::{curve_from_csv, curve_to_csv, curve_to_svg, format_significant};

use crate::state::{beta_order, BetaOrder, State, System};
use crate::{Error, Result, TOL};

/// How inequalities between curve heights are decided.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Comparison {
    /// Absolute slack of `1e-9`.
    #[default]
    Tolerant,
    /// Exact floating-point comparison, for rational fixtures.
    Strict,
}

impl Comparison {
    pub fn slack(self) -> f64 {
        match self {
            Comparison::Tolerant => TOL,
            Comparison::Strict => 0.0,
        }
    }
}

/// Concave piecewise-linear curve through beta-ordered partial sums.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    xs: Vec<f64>,
    ys: Vec<f64>,
    rank: usize,
    order: BetaOrder,
}

impl Curve {
    /// Breakpoints including the origin.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    /// Total horizontal extent, the partition function.
    pub fn z(&self) -> f64 {
        *self.xs.last().expect("curve has at least two points")
    }

    /// Number of nonzero populations of the underlying state.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> &BetaOrder {
        &self.order
    }

    /// Height at `x`; arguments up to `1e-9` outside `[0, Z]` are clamped.
    pub fn v_at(&self, x: f64) -> Result<f64> {
        let z = self.z();
        if !(x >= -TOL && x <= z + TOL) {
            return Err(Error::OutOfRange { what: "x", value: x });
        }
        let x = x.clamp(0.0, z);
        // first breakpoint at or beyond x
        let k = self.xs.partition_point(|&xi| xi < x);
        if k == 0 {
            return Ok(0.0);
        }
        if self.xs[k] == x {
            return Ok(self.ys[k]);
        }
        let (x0, x1) = (self.xs[k - 1], self.xs[k]);
        let (y0, y1) = (self.ys[k - 1], self.ys[k]);
        Ok(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }

    /// Leftmost `x` at which the curve reaches height `y`.
    ///
    /// At `y = 1` this is the Gibbs weight of the first `rank` levels, so
    /// trailing zero populations never count.
    pub fn l_at(&self, y: f64) -> Result<f64> {
        if !(-TOL..=1.0 + TOL).contains(&y) {
            return Err(Error::OutOfRange { what: "y", value: y });
        }
        if y >= 1.0 {
            return Ok(self.xs[self.rank]);
        }
        if y <= 0.0 {
            return Ok(0.0);
        }
        let k = self.ys.partition_point(|&yi| yi < y);
        if k >= self.ys.len() {
            // y is within rounding of 1 but above the stored partial sums
            return Ok(self.xs[self.rank]);
        }
        let (x0, x1) = (self.xs[k - 1], self.xs[k]);
        let (y0, y1) = (self.ys[k - 1], self.ys[k]);
        Ok(x0 + (x1 - x0) * (y - y0) / (y1 - y0))
    }

    /// True when segment slopes never increase by more than `tol`.
    pub fn is_concave(&self, tol: f64) -> bool {
        let slopes: Vec<f64> = self
            .xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect();
        slopes.windows(2).all(|s| s[1] <= s[0] + tol)
    }

    pub(crate) fn from_points(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::DimensionMismatch {
                expected: xs.len(),
                found: ys.len(),
            });
        }
        let n = xs.len() - 1;
        let rank = ys.iter().position(|&y| y >= 1.0).unwrap_or(n);
        Ok(Self {
            xs,
            ys,
            rank,
            order: BetaOrder::identity(n),
        })
    }
}

/// Builds the thermo-majorization curve of `state`.
pub fn build_curve(state: &State, system: &System) -> Result<Curve> {
    let order = beta_order(state, system)?;
    let weights = system.gibbs_weights();
    let n = state.dim();
    let rank = state.rank();
    let mut xs = Vec::with_capacity(n + 1);
    let mut ys = Vec::with_capacity(n + 1);
    xs.push(0.0);
    ys.push(0.0);
    let (mut x, mut y) = (0.0, 0.0);
    for (k, &i) in order.perm().iter().enumerate() {
        x += weights[i];
        y += state.populations()[i];
        xs.push(x);
        // zero populations are ordered last, so the curve is flat at 1 from here
        ys.push(if k + 1 >= rank { 1.0 } else { y.min(1.0) });
    }
    Ok(Curve { xs, ys, rank, order })
}

/// Elbow coordinates: `xs` feed the finite deterministic-conversion test,
/// `ys` feed the work-of-transition maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct ElbowSets {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl Curve {
    pub fn elbow_sets(&self) -> ElbowSets {
        let xs = self.xs[1..].to_vec();
        let mut ys: Vec<f64> = self.ys[1..=self.rank].to_vec();
        ys.dedup();
        ElbowSets { xs, ys }
    }
}

pub fn elbow_sets(state: &State, system: &System) -> Result<ElbowSets> {
    Ok(build_curve(state, system)?.elbow_sets())
}

/// Deterministic convertibility of `rho` into `sigma` (tolerant comparison).
pub fn thermo_majorizes(rho: &State, sigma: &State, system: &System) -> Result<bool> {
    thermo_majorizes_with(rho, sigma, system, Comparison::Tolerant)
}

pub fn thermo_majorizes_with(
    rho: &State,
    sigma: &State,
    system: &System,
    cmp: Comparison,
) -> Result<bool> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let rc = build_curve(rho, system)?;
    let sc = build_curve(sigma, system)?;
    curve_dominates(&rc, &sc, cmp)
}

/// `upper` lies on or above `lower` at every elbow of `lower`.
pub fn curve_dominates(upper: &Curve, lower: &Curve, cmp: Comparison) -> Result<bool> {
    let slack = cmp.slack();
    for (x, y) in lower.points().skip(1) {
        if upper.v_at(x)? < y - slack {
            return Ok(false);
        }
    }
    Ok(true)
}
