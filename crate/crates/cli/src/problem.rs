use std::path::Path;

use serde::Deserialize;
use thermoflux::linalg::{CMatrix, C64};
use thermoflux::locc::PureBipartite;
use thermoflux::state::decohere;
use thermoflux::{DensityMatrix, State, System};

use crate::CliError;

/// Complex matrix as nested rows of `[re, im]` pairs.
pub type ComplexRows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub system: Option<SystemSpec>,
    pub rho: Option<StateSpec>,
    pub sigma: Option<StateSpec>,
    pub mode: Option<ModeSpec>,
    pub psi: Option<ComplexRows>,
    pub phi: Option<ComplexRows>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub energies: Vec<f64>,
    pub beta: f64,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateSpec {
    Populations(Vec<f64>),
    DensityMatrix(ComplexRows),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum ModeSpec {
    #[serde(rename = "NO")]
    Noisy,
    #[serde(rename = "TO")]
    Thermal,
}

pub fn complex_matrix(rows: &ComplexRows) -> Result<CMatrix, CliError> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(CliError::Input("empty matrix".into()));
    }
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(CliError::Input("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| {
        let [re, im] = rows[i][j];
        C64::new(re, im)
    }))
}

fn density_matrix(spec: &StateSpec) -> Result<DensityMatrix, CliError> {
    match spec {
        StateSpec::Populations(p) => Ok(DensityMatrix::from_state(&State::new(p.clone())?)),
        StateSpec::DensityMatrix(rows) => Ok(DensityMatrix::new(complex_matrix(rows)?)?),
    }
}

pub fn read_file(path: &Path) -> Result<ProblemFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("malformed problem file {}: {e}", path.display())))
}

/// A validated problem: a system with an initial and a target state.
#[derive(Debug, Clone)]
pub struct Problem {
    pub system: System,
    pub rho: DensityMatrix,
    pub sigma: DensityMatrix,
}

impl Problem {
    pub fn from_file(file: &ProblemFile, beta: Option<f64>) -> Result<Self, CliError> {
        let rho = file
            .rho
            .as_ref()
            .ok_or_else(|| CliError::Input("problem file has no rho".into()))?;
        let sigma = file
            .sigma
            .as_ref()
            .ok_or_else(|| CliError::Input("problem file has no sigma".into()))?;
        let rho = density_matrix(rho)?;
        let sigma = density_matrix(sigma)?;

        let system = match (file.mode, &file.system) {
            (Some(ModeSpec::Noisy), spec) => {
                let n = spec.as_ref().map_or(rho.dim(), |s| s.energies.len());
                let b = spec.as_ref().map_or(1.0, |s| s.beta);
                System::new(vec![0.0; n], beta.unwrap_or(b))?
            }
            (_, Some(spec)) => System::new(spec.energies.clone(), beta.unwrap_or(spec.beta))?,
            (_, None) => return Err(CliError::Input("problem file has no system".into())),
        };
        for (name, dm) in [("rho", &rho), ("sigma", &sigma)] {
            if dm.dim() != system.dim() {
                return Err(CliError::Input(format!(
                    "{name} has dimension {} but the system has {} levels",
                    dm.dim(),
                    system.dim()
                )));
            }
        }
        Ok(Self { system, rho, sigma })
    }

    pub fn rho_state(&self) -> Result<State, CliError> {
        Ok(decohere(&self.rho, &self.system)?)
    }

    pub fn sigma_state(&self) -> Result<State, CliError> {
        Ok(decohere(&self.sigma, &self.system)?)
    }

    pub fn sigma_is_coherent(&self) -> bool {
        self.sigma.max_coherence() > thermoflux::TOL
    }
}

pub fn bipartite(rows: &ComplexRows) -> Result<PureBipartite, CliError> {
    Ok(PureBipartite::new(complex_matrix(rows)?)?)
}

/// Reads an amplitude matrix either bare or as `{"amplitudes": ...}`.
pub fn read_bipartite(path: &Path) -> Result<PureBipartite, CliError> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Amplitudes {
        Bare(ComplexRows),
        Wrapped { amplitudes: ComplexRows },
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let parsed: Amplitudes = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("malformed amplitudes in {}: {e}", path.display())))?;
    match parsed {
        Amplitudes::Bare(rows) | Amplitudes::Wrapped { amplitudes: rows } => bipartite(&rows),
    }
}
