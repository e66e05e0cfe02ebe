//! Entanglement of transition between bipartite pure states under LOCC.

use crate::linalg::{hermitian_eig, CMatrix};
use crate::state::{State, System};
use crate::work::max_width_ratio;
use crate::{Error, Result, TOL};

/// Amplitude matrix `psi_{ab}` of a normalized pure state on `A (x) B`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureBipartite {
    amplitudes: CMatrix,
}

impl PureBipartite {
    pub fn new(amplitudes: CMatrix) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyVector);
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical("non-finite amplitude".into()));
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > TOL {
            return Err(Error::NotNormalized { sum: norm });
        }
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &CMatrix {
        &self.amplitudes
    }
}

/// Squared Schmidt coefficients in descending order, `min(d_A, d_B)` of them.
pub fn schmidt_spectrum(psi: &PureBipartite) -> Result<State> {
    let a = &psi.amplitudes;
    let gram = a * a.adjoint();
    let eig = hermitian_eig(&gram)?;
    let keep = a.nrows().min(a.ncols());
    let values = eig
        .eigenvalues
        .into_iter()
        .take(keep)
        .map(|l| l.max(0.0))
        .collect();
    State::new(values)
}

fn padded(state: State, dim: usize) -> Result<State> {
    let mut v = state.into_populations();
    v.resize(dim, 0.0);
    State::new(v)
}

/// Ebits gained by `psi -> phi`; negative values must be consumed.
pub fn entanglement_of_transition(psi: &PureBipartite, phi: &PureBipartite) -> Result<f64> {
    let a = schmidt_spectrum(psi)?;
    let b = schmidt_spectrum(phi)?;
    let dim = a.dim().max(b.dim());
    let (a, b) = (padded(a, dim)?, padded(b, dim)?);
    let ratio = max_width_ratio(&b, &a, &System::trivial(dim)?)?;
    Ok(0.0 - ratio.log2())
}
