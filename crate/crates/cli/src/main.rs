mod problem;
mod report;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use thermoflux::catalytic::{
    free_coherence, free_energy_alpha, heralded_bound_cto, heralded_coherence_bound, AlphaGrid,
};
use thermoflux::curve::{build_curve, curve_to_csv, curve_to_svg, thermo_majorizes};
use thermoflux::locc::{entanglement_of_transition, schmidt_spectrum, PureBipartite};
use thermoflux::oracle::{corpus, oracle_feasible, oracle_pstar};
use thermoflux::transition::{build_protocol, max_transition_probability};
use thermoflux::work::{pstar_bounds, pstar_with_work, qubit_tradeoff_closed_form, work_of_transition};
use thermoflux::Mode;

use problem::{bipartite, read_bipartite, read_file, Problem, ProblemFile};
use report::{indices, num, nums, render};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<thermoflux::Error> for CliError {
    fn from(e: thermoflux::Error) -> Self {
        match e {
            thermoflux::Error::Numerical(_) => CliError::Numerical(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

type CliResult = Result<Value, CliError>;

/// Transition probabilities, work and majorization for thermodynamic states.
#[derive(Parser, Debug)]
#[command(name = "thermoflux", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Input {
    /// Problem file (JSON).
    #[arg(short = 'i', long = "input")]
    input: Option<PathBuf>,
    /// Inverse temperature, overriding the file.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
}

impl Input {
    fn file(&self) -> Result<ProblemFile, CliError> {
        let path = self
            .input
            .as_ref()
            .ok_or_else(|| CliError::Input("missing -i problem.json".into()))?;
        read_file(path)
    }

    fn problem(&self) -> Result<Problem, CliError> {
        Problem::from_file(&self.file()?, self.beta)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Deterministic convertibility of rho into sigma.
    Check(Input),
    /// Maximal probability of rho -> sigma.
    Pstar(Input),
    /// The block protocol achieving the maximal probability.
    Protocol(Input),
    /// Work (or nonuniformity) of rho -> sigma.
    Work(Input),
    /// Lower and upper bounds on the probability from work.
    Bounds(Input),
    /// Probability as a function of invested or extracted work.
    Tradeoff {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_hyphen_values = true)]
        wmin: f64,
        #[arg(long, allow_hyphen_values = true)]
        wmax: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Catalytic and coherence bounds on the heralded probability.
    Catalytic {
        #[command(flatten)]
        input: Input,
        /// Extra orders, comma separated.
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<f64>,
        /// Use the grid with twice the density.
        #[arg(long)]
        refine: bool,
    },
    /// Entanglement of transition between bipartite pure states.
    Locc {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        psi: Option<PathBuf>,
        #[arg(long)]
        phi: Option<PathBuf>,
    },
    /// Curve breakpoints, optionally exported.
    Curve {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Which::Rho)]
        state: Which,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Linear-programming cross-checks.
    Oracle {
        #[command(subcommand)]
        query: OracleQuery,
    },
}

#[derive(Subcommand, Debug)]
enum OracleQuery {
    Pstar(Input),
    Feasible(Input),
    /// Compares formulas and oracle on a seeded random corpus (THERMOFLUX_SEED).
    Corpus {
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3, 4])]
        dims: Vec<usize>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Which {
    Rho,
    Sigma,
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Noisy => "NO",
        Mode::Thermal => "TO",
    }
}

fn check(input: &Input) -> CliResult {
    let p = input.problem()?;
    let convertible = thermo_majorizes(&p.rho_state()?, &p.sigma_state()?, &p.system)?;
    let mut out = Map::new();
    out.insert("convertible".into(), json!(convertible));
    out.insert("mode".into(), json!(mode_name(p.system.mode())));
    if p.sigma_is_coherent() {
        out.insert("necessary_only".into(), json!(true));
    }
    Ok(Value::Object(out))
}

fn pstar(input: &Input) -> CliResult {
    let p = input.problem()?;
    let value = max_transition_probability(&p.rho_state()?, &p.sigma_state()?, &p.system)?;
    Ok(json!({
        "pstar": num(value),
        "upper_bound_only": p.sigma_is_coherent(),
    }))
}

fn protocol(input: &Input) -> CliResult {
    let p = input.problem()?;
    let proto = build_protocol(&p.rho_state()?, &p.sigma_state()?, &p.system)?;
    Ok(json!({
        "pstar": num(proto.pstar),
        "order": indices(proto.order.perm()),
        "boundaries": indices(&proto.boundaries),
        "ratios": nums(&proto.ratios),
        "sigma": nums(&proto.sigma),
        "rho_sigma": nums(&proto.rho_sigma),
        "pre_measurement": nums(&proto.pre_measurement),
        "failure_state": nums(&proto.x_state),
        "measurement": nums(&proto.m_diag),
    }))
}

fn work_json(value: thermoflux::work::WorkValue) -> Value {
    let unit = match value.mode {
        Mode::Noisy => "bits",
        Mode::Thermal => "kT",
    };
    json!({
        "mode": mode_name(value.mode),
        "value": num(value.value),
        "unit": unit,
        "beta_w": num(value.beta_w()),
    })
}

fn work(input: &Input) -> CliResult {
    let p = input.problem()?;
    let w = work_of_transition(&p.rho_state()?, &p.sigma_state()?, &p.system)?;
    Ok(work_json(w))
}

fn bounds(input: &Input) -> CliResult {
    let p = input.problem()?;
    let (rho, sigma) = (p.rho_state()?, p.sigma_state()?);
    let (lower, upper) = pstar_bounds(&rho, &sigma, &p.system)?;
    let value = max_transition_probability(&rho, &sigma, &p.system)?;
    Ok(json!({
        "lower": num(lower),
        "pstar": num(value),
        "upper": num(upper),
    }))
}

fn tradeoff(input: &Input, wmin: f64, wmax: f64, steps: usize) -> CliResult {
    if steps == 0 || !wmin.is_finite() || !wmax.is_finite() {
        return Err(CliError::Input("need finite --wmin, --wmax and --steps >= 1".into()));
    }
    let p = input.problem()?;
    let (rho, sigma) = (p.rho_state()?, p.sigma_state()?);
    let mode = p.system.mode();
    let qubit = mode == Mode::Noisy && p.system.dim() == 2;
    let largest = |s: &thermoflux::State| s.populations().iter().copied().fold(0.0, f64::max);

    let mut points = Vec::with_capacity(steps);
    for k in 0..steps {
        let w = if steps == 1 {
            wmin
        } else {
            wmin + (wmax - wmin) * k as f64 / (steps - 1) as f64
        };
        let beta_w = match mode {
            Mode::Noisy => w * std::f64::consts::LN_2,
            Mode::Thermal => w,
        };
        let mut point = Map::new();
        point.insert("w".into(), num(w));
        point.insert("pstar".into(), num(pstar_with_work(&rho, &sigma, &p.system, beta_w)?));
        if qubit {
            let closed = qubit_tradeoff_closed_form(largest(&rho), largest(&sigma), w)?;
            point.insert("closed_form".into(), num(closed));
        }
        points.push(Value::Object(point));
    }
    Ok(json!({
        "mode": mode_name(mode),
        "unit": if mode == Mode::Noisy { "bits" } else { "kT" },
        "points": points,
    }))
}

fn catalytic(input: &Input, alphas: &[f64], refine: bool) -> CliResult {
    let p = input.problem()?;
    let base = if refine {
        AlphaGrid::refined()
    } else {
        AlphaGrid::standard()
    };
    let mut values = base.values().to_vec();
    values.extend_from_slice(alphas);
    let grid = AlphaGrid::with_values(&values)?;
    let (rho, sigma) = (p.rho_state()?, p.sigma_state()?);
    let per_alpha = |f: &dyn Fn(f64) -> thermoflux::Result<f64>| -> Result<Value, CliError> {
        let values = grid
            .values()
            .iter()
            .map(|&a| f(a))
            .collect::<thermoflux::Result<Vec<f64>>>()?;
        Ok(nums(&values))
    };
    let cto = heralded_bound_cto(&rho, &sigma, &p.system, &grid)?;
    let coherence = heralded_coherence_bound(&p.rho, &p.sigma, &p.system, &grid)?;
    Ok(json!({
        "alphas": nums(grid.values()),
        "free_energy": {
            "rho": per_alpha(&|a| free_energy_alpha(&rho, &p.system, a))?,
            "sigma": per_alpha(&|a| free_energy_alpha(&sigma, &p.system, a))?,
        },
        "free_coherence": {
            "rho": per_alpha(&|a| free_coherence(&p.rho, &p.system, a))?,
            "sigma": per_alpha(&|a| free_coherence(&p.sigma, &p.system, a))?,
        },
        "pstar": num(max_transition_probability(&rho, &sigma, &p.system)?),
        "cto_bound": num(cto),
        "coherence_bound": num(coherence),
        "upper_bound": num(cto.min(coherence)),
    }))
}

fn locc(input: &Input, psi: Option<&Path>, phi: Option<&Path>) -> CliResult {
    let file = match (&input.input, psi, phi) {
        (_, Some(_), Some(_)) => None,
        _ => Some(input.file()?),
    };
    let pick = |path: Option<&Path>, field: Option<&problem::ComplexRows>, name: &str| -> Result<PureBipartite, CliError> {
        match (path, field) {
            (Some(path), _) => read_bipartite(path),
            (None, Some(rows)) => bipartite(rows),
            (None, None) => Err(CliError::Input(format!("no {name} given"))),
        }
    };
    let psi = pick(psi, file.as_ref().and_then(|f| f.psi.as_ref()), "psi")?;
    let phi = pick(phi, file.as_ref().and_then(|f| f.phi.as_ref()), "phi")?;
    Ok(json!({
        "psi_spectrum": nums(schmidt_spectrum(&psi)?.populations()),
        "phi_spectrum": nums(schmidt_spectrum(&phi)?.populations()),
        "ebits": num(entanglement_of_transition(&psi, &phi)?),
    }))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn curve(input: &Input, which: Which, csv: Option<&Path>, svg: Option<&Path>) -> CliResult {
    let p = input.problem()?;
    let state = match which {
        Which::Rho => p.rho_state()?,
        Which::Sigma => p.sigma_state()?,
    };
    let c = build_curve(&state, &p.system)?;
    if let Some(path) = csv {
        write_text(path, &curve_to_csv(&c))?;
    }
    if let Some(path) = svg {
        write_text(path, &curve_to_svg(&c))?;
    }
    let points: Vec<Value> = c.points().map(|(x, y)| json!([num(x), num(y)])).collect();
    Ok(json!({
        "state": if which == Which::Rho { "rho" } else { "sigma" },
        "order": indices(c.order().perm()),
        "points": points,
    }))
}

fn seed_from_env() -> Result<u64, CliError> {
    match std::env::var("THERMOFLUX_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("THERMOFLUX_SEED is not an unsigned integer: {s}"))),
        Err(_) => Ok(0),
    }
}

fn oracle(query: &OracleQuery) -> CliResult {
    match query {
        OracleQuery::Pstar(input) => {
            let p = input.problem()?;
            let v = oracle_pstar(&p.rho_state()?, &p.sigma_state()?, &p.system)?;
            Ok(json!({ "oracle_pstar": num(v) }))
        }
        OracleQuery::Feasible(input) => {
            let p = input.problem()?;
            let v = oracle_feasible(&p.rho_state()?, &p.sigma_state()?, &p.system)?;
            Ok(json!({ "oracle_feasible": v }))
        }
        OracleQuery::Corpus { count, dims } => {
            if dims.is_empty() || dims.iter().any(|&d| d == 0 || d > 8) {
                return Err(CliError::Input("dimensions must lie in 1..=8".into()));
            }
            let seed = seed_from_env()?;
            let mut worst: f64 = 0.0;
            let mut mismatches = 0usize;
            for inst in corpus(seed, *count, dims, 3.0, 1.0)? {
                let (r, s, h) = (&inst.rho, &inst.sigma, &inst.system);
                let gap = (max_transition_probability(r, s, h)? - oracle_pstar(r, s, h)?).abs();
                worst = worst.max(gap);
                if thermo_majorizes(r, s, h)? != oracle_feasible(r, s, h)? {
                    mismatches += 1;
                }
            }
            Ok(json!({
                "seed": seed,
                "count": count,
                "max_pstar_deviation": num(worst),
                "feasibility_mismatches": mismatches,
            }))
        }
    }
}

fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Check(i) => check(i),
        Command::Pstar(i) => pstar(i),
        Command::Protocol(i) => protocol(i),
        Command::Work(i) => work(i),
        Command::Bounds(i) => bounds(i),
        Command::Tradeoff {
            input,
            wmin,
            wmax,
            steps,
        } => tradeoff(input, *wmin, *wmax, *steps),
        Command::Catalytic {
            input,
            alphas,
            refine,
        } => catalytic(input, alphas, *refine),
        Command::Locc { input, psi, phi } => locc(input, psi.as_deref(), phi.as_deref()),
        Command::Curve {
            input,
            state,
            csv,
            svg,
        } => curve(input, *state, csv.as_deref(), svg.as_deref()),
        Command::Oracle { query } => oracle(query),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(value) => {
            print!("{}", render(&value));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("thermoflux: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
