//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Lines marked `documented` report a literal reading that cannot hold
//! mathematically; they are printed but do not fail the run. The README
//! explains each of them.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use thermoflux::catalytic::{heralded_bound_cto, renyi_divergence, AlphaGrid};
use thermoflux::curve::{build_curve, curve_from_csv, curve_to_csv, thermo_majorizes, Curve};
use thermoflux::linalg::{CMatrix, C64};
use thermoflux::locc::{entanglement_of_transition, PureBipartite};
use thermoflux::oracle::{
    corpus, dense_curve_check, oracle_feasible, oracle_pstar, Instance, SplitMix64,
};
use thermoflux::transition::{build_protocol, max_transition_probability, measurement_unitary};
use thermoflux::work::{
    jarzynski_upper_check, max_width_ratio, pstar_bounds, pstar_with_work,
    qubit_tradeoff_closed_form,
};
use thermoflux::{State, System};

const CORPUS_SEED: u64 = 20_140_801;

struct Line {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
    documented: Option<&'static str>,
}

fn line(id: &'static str, title: &'static str, pass: bool, detail: String) -> Line {
    Line {
        id,
        title,
        pass,
        detail,
        documented: None,
    }
}

fn the_corpus() -> Vec<Instance> {
    corpus(CORPUS_SEED, 500, &[2, 3, 4], 3.0, 1.0).expect("corpus")
}

fn criterion_1(instances: &[Instance]) -> Vec<Line> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut mismatches = 0;
    let mut errors = 0;
    for inst in instances {
        let (r, s, h) = (&inst.rho, &inst.sigma, &inst.system);
        match (max_transition_probability(r, s, h), oracle_pstar(r, s, h)) {
            (Ok(a), Ok(b)) => worst = worst.max((a - b).abs()),
            _ => errors += 1,
        }
        match (thermo_majorizes(r, s, h), oracle_feasible(r, s, h)) {
            (Ok(a), Ok(b)) if a == b => {}
            _ => mismatches += 1,
        }
    }
    let secs = start.elapsed().as_secs_f64();
    vec![line(
        "1",
        "oracle equivalence",
        worst < 1e-7 && mismatches == 0 && errors == 0 && secs < 60.0,
        format!(
            "{} instances, max |p* - LP| = {worst:.2e}, feasibility mismatches = {mismatches}, errors = {errors}, {secs:.1} s",
            instances.len()
        ),
    )]
}

fn criterion_2() -> Vec<Line> {
    let sys = System::trivial(2).unwrap();
    let rho = State::new(vec![0.6, 0.4]).unwrap();
    let sigma = State::new(vec![0.85, 0.15]).unwrap();
    let p0 = max_transition_probability(&rho, &sigma, &sys).unwrap();
    let exact = (p0 - 12.0 / 17.0).abs() < 1e-12;

    let ln2 = std::f64::consts::LN_2;
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let w = (k as f64 - 24.0) / 8.0;
        let numeric = pstar_with_work(&rho, &sigma, &sys, w * ln2).unwrap();
        let closed = qubit_tradeoff_closed_form(0.6, 0.85, w).unwrap();
        worst = worst.max((numeric - closed).abs());
    }

    let h = 1e-6;
    let at = |w: f64| pstar_with_work(&rho, &sigma, &sys, w * ln2).unwrap();
    let left = (at(0.0) - at(-h)) / h;
    let right = (at(h) - at(0.0)) / h;
    // a convex function cannot have its slope drop across a point
    let kink = left - right > 0.1;
    vec![line(
        "2",
        "qubit tradeoff",
        exact && worst < 1e-9 && kink,
        format!(
            "p*(0) - 12/17 = {:.1e}, max |numeric - closed form| over 50 W = {worst:.1e}, slopes at W = 0: left {left:.4}, right {right:.4}",
            p0 - 12.0 / 17.0
        ),
    )]
}

/// Whether every breakpoint below height 1 lies on the chord to the first
/// point at height 1.
fn is_straight(curve: &Curve) -> bool {
    let top = curve.rank();
    let x_top = curve.xs()[top];
    curve
        .points()
        .take(top)
        .all(|(x, y)| (y - x / x_top).abs() < 1e-12)
}

fn restricted_gibbs(system: &System, mask: &[bool]) -> State {
    let w = system.gibbs_weights();
    let v: Vec<f64> = w.iter().zip(mask).map(|(x, &m)| if m { *x } else { 0.0 }).collect();
    let s: f64 = v.iter().sum();
    State::new(v.iter().map(|x| x / s).collect()).unwrap()
}

fn random_mask(rng: &mut SplitMix64, n: usize) -> Vec<bool> {
    let mut m: Vec<bool> = (0..n).map(|_| rng.next_f64() < 0.5).collect();
    if !m.iter().any(|&b| b) {
        m[rng.below(n)] = true;
    }
    m
}

fn criterion_3(instances: &[Instance]) -> Vec<Line> {
    let mut violations = 0;
    for inst in instances {
        let (r, s, h) = (&inst.rho, &inst.sigma, &inst.system);
        let p = max_transition_probability(r, s, h).unwrap();
        let (lo, hi) = pstar_bounds(r, s, h).unwrap();
        if lo - 1e-9 > p || p > hi + 1e-9 {
            violations += 1;
        }
    }

    // both curves straight: states proportional to Gibbs weights on a support
    let mut rng = SplitMix64::new(CORPUS_SEED ^ 3);
    let mut both_worst: f64 = 0.0;
    for k in 0..200 {
        let n = 2 + k % 3;
        let energies = (0..n).map(|_| rng.uniform(0.0, 3.0)).collect();
        let sys = System::new(energies, 1.0).unwrap();
        let rho = restricted_gibbs(&sys, &random_mask(&mut rng, n));
        let sigma = restricted_gibbs(&sys, &random_mask(&mut rng, n));
        let p = max_transition_probability(&rho, &sigma, &sys).unwrap();
        let (lo, hi) = pstar_bounds(&rho, &sigma, &sys).unwrap();
        both_worst = both_worst.max((lo - p).abs()).max((hi - p).abs());
    }

    // literal reading: only the target curve straight
    let mut straight_targets = 0;
    let mut unsaturated = 0;
    let mut rng = SplitMix64::new(CORPUS_SEED ^ 33);
    for inst in instances {
        let h = &inst.system;
        let targets = [
            inst.sigma.clone(),
            State::pure(h.dim(), rng.below(h.dim())).unwrap(),
            restricted_gibbs(h, &random_mask(&mut rng, h.dim())),
        ];
        for sigma in targets {
            if !is_straight(&build_curve(&sigma, h).unwrap()) {
                continue;
            }
            straight_targets += 1;
            let p = max_transition_probability(&inst.rho, &sigma, h).unwrap();
            let (lo, hi) = pstar_bounds(&inst.rho, &sigma, h).unwrap();
            if (lo - p).abs() > 1e-9 || (hi - p).abs() > 1e-9 {
                unsaturated += 1;
            }
        }
    }

    vec![
        line(
            "3",
            "bounds sandwich and saturation",
            violations == 0 && both_worst < 1e-9,
            format!(
                "sandwich violations on {} instances = {violations}; saturation with both curves straight on 200 instances: max gap {both_worst:.1e}",
                instances.len()
            ),
        ),
        Line {
            id: "3*",
            title: "saturation with only the target curve straight",
            pass: unsaturated == 0,
            detail: format!("{unsaturated} of {straight_targets} straight targets not saturated"),
            documented: Some(
                "equality needs both curves straight; rho = (0.6, 0.4) -> sigma = (1, 0) has p* = 0.6, lower bound 0.5",
            ),
        },
    ]
}

fn criterion_4(instances: &[Instance]) -> Vec<Line> {
    let mut mixture_err: f64 = 0.0;
    let mut measurement_err: f64 = 0.0;
    let mut literal_err: f64 = 0.0;
    let mut majorization_failures = 0;
    let mut unitary_err: f64 = 0.0;
    let mut commutator: f64 = 0.0;
    for inst in instances {
        let (r, s, h) = (&inst.rho, &inst.sigma, &inst.system);
        let proto = build_protocol(r, s, h).unwrap();
        let p = proto.pstar;
        let n = s.dim();
        for k in 0..n {
            let mix = p * proto.sigma[k] + (1.0 - p) * proto.x_state[k];
            mixture_err = mixture_err.max((mix - proto.pre_measurement[k]).abs());
            literal_err = literal_err.max((mix - proto.rho_sigma[k]).abs());
            let measured = proto.m_diag[k] * proto.pre_measurement[k];
            measurement_err = measurement_err.max((measured - p * proto.sigma[k]).abs());
        }
        let rho_sigma = State::new(proto.in_level_order(&proto.rho_sigma)).unwrap();
        let pre = State::new(proto.in_level_order(&proto.pre_measurement)).unwrap();
        if !thermo_majorizes(r, &rho_sigma, h).unwrap() || !thermo_majorizes(&rho_sigma, &pre, h).unwrap() {
            majorization_failures += 1;
        }

        let u = measurement_unitary(&proto.m_diag).unwrap();
        let sq = &u * &u;
        let energies = proto.order.arrange(h.energies());
        for i in 0..2 * n {
            for j in 0..2 * n {
                let id = if i == j { 1.0 } else { 0.0 };
                unitary_err = unitary_err.max((sq[(i, j)] - id).abs());
                // [U, H (+) H] with H diagonal in the same level order
                let c = u[(i, j)] * (energies[j % n] - energies[i % n]);
                commutator = commutator.max(c.abs());
            }
        }
    }
    vec![
        line(
            "4",
            "protocol reconstruction",
            mixture_err < 1e-9
                && measurement_err < 1e-9
                && majorization_failures == 0
                && unitary_err < 1e-12
                && commutator < 1e-12,
            format!(
                "|p* sigma + (1-p*) X - rho'_sigma| = {mixture_err:.1e}, |m rho'_sigma - p* sigma| = {measurement_err:.1e}, majorization failures = {majorization_failures}, |U^2 - I| = {unitary_err:.1e}, |[U, H+H]| = {commutator:.1e}"
            ),
        ),
        Line {
            id: "4*",
            title: "mixture identity against the pre-block state rho_sigma",
            pass: literal_err < 1e-9,
            detail: format!("max deviation {literal_err:.2e}"),
            documented: Some(
                "the identity holds after the blockwise step; rho = (0.5, 0.25, 0.25), sigma = (0.4, 0.4, 0.2) would need a negative X",
            ),
        },
    ]
}

fn criterion_5(instances: &[Instance]) -> Vec<Line> {
    const SAMPLES: usize = 10_000;
    let mut vertical_gap: f64 = 0.0;
    let mut horizontal_gap: f64 = 0.0;
    let mut mismatches = 0;
    for inst in instances {
        let (r, s, h) = (&inst.rho, &inst.sigma, &inst.system);
        let rc = build_curve(r, h).unwrap();
        let sc = build_curve(s, h).unwrap();
        let elbow_min = max_transition_probability(r, s, h).unwrap();
        let mut dense_min = elbow_min;
        for k in 1..=SAMPLES {
            let x = sc.z() * k as f64 / SAMPLES as f64;
            dense_min = dense_min.min(rc.v_at(x).unwrap() / sc.v_at(x).unwrap());
        }
        vertical_gap = vertical_gap.max(elbow_min - dense_min);

        let elbow_max = max_width_ratio(r, s, h).unwrap();
        let mut dense_max = elbow_max;
        for k in 1..=SAMPLES {
            let y = k as f64 / SAMPLES as f64;
            dense_max = dense_max.max(rc.l_at(y).unwrap() / sc.l_at(y).unwrap());
        }
        horizontal_gap = horizontal_gap.max(dense_max - elbow_max);

        if dense_curve_check(r, s, h, SAMPLES).unwrap() != thermo_majorizes(r, s, h).unwrap() {
            mismatches += 1;
        }
    }
    vec![line(
        "5",
        "finite elbow sets suffice",
        vertical_gap < 1e-9 && horizontal_gap < 1e-9 && mismatches == 0,
        format!(
            "dense minimum below elbow minimum by {vertical_gap:.1e}, dense maximum above elbow maximum by {horizontal_gap:.1e}, majorization mismatches = {mismatches}"
        ),
    )]
}

fn criterion_6() -> Vec<Line> {
    let mut rng = SplitMix64::new(CORPUS_SEED ^ 6);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..200 {
        let n = 2 + k % 4;
        let energies = (0..n).map(|_| rng.uniform(0.0, 3.0)).collect();
        let sys = System::new(energies, 1.0).unwrap();
        let sigma = State::new(rng.simplex(n)).unwrap();
        let (_, product) = jarzynski_upper_check(&sigma, &sys).unwrap();
        worst = worst.max(product);
    }
    let mut equality_gap: f64 = 0.0;
    for _ in 0..50 {
        let sys = System::new(vec![rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0)], 1.0).unwrap();
        for level in 0..2 {
            let (_, product) = jarzynski_upper_check(&State::pure(2, level).unwrap(), &sys).unwrap();
            equality_gap = equality_gap.max((product - 1.0).abs());
        }
    }
    vec![line(
        "6",
        "Jarzynski consistency",
        worst <= 1.0 + 1e-9 && equality_gap < 1e-9,
        format!("max p* e^(beta W) = {worst:.12} over 200 targets, two-level pure targets off by {equality_gap:.1e}"),
    )]
}

fn criterion_7() -> Vec<Line> {
    let start = Instant::now();
    let alphas = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, f64::INFINITY];
    let mut rng = SplitMix64::new(CORPUS_SEED ^ 7);
    let mut non_monotone = 0;
    for k in 0..200 {
        let n = 2 + k % 4;
        let p = State::new(rng.simplex(n)).unwrap();
        let q = State::new(rng.simplex(n)).unwrap();
        let d: Vec<f64> = alphas.iter().map(|&a| renyi_divergence(&p, &q, a).unwrap()).collect();
        if d.windows(2).any(|w| w[1] < w[0] - 1e-12) {
            non_monotone += 1;
        }
    }

    let standard = AlphaGrid::standard();
    let refined = AlphaGrid::refined();
    let mut below = 0;
    let mut halving: f64 = 0.0;
    for inst in corpus(CORPUS_SEED ^ 77, 200, &[2, 3, 4], 3.0, 1.0).unwrap() {
        let (r, s, h) = (&inst.rho, &inst.sigma, &inst.system);
        let p = max_transition_probability(r, s, h).unwrap();
        let coarse = heralded_bound_cto(r, s, h, &standard).unwrap();
        let fine = heralded_bound_cto(r, s, h, &refined).unwrap();
        if coarse < p - 1e-9 || fine < p - 1e-9 {
            below += 1;
        }
        halving = halving.max((coarse - fine).abs());
    }
    vec![line(
        "7",
        "Renyi and catalytic bounds",
        non_monotone == 0 && below == 0 && halving < 1e-3,
        format!(
            "non-monotone D_alpha pairs = {non_monotone}/200, CTO bound below p* = {below}/200, max grid-halving change = {halving:.1e}, {:.1} s",
            start.elapsed().as_secs_f64()
        ),
    )]
}

fn diagonal_bipartite(p: &[f64]) -> PureBipartite {
    let n = p.len();
    PureBipartite::new(CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(p[i].sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
    .unwrap()
}

/// A random local basis change so that the Schmidt form is not given away.
fn scrambled(p: &[f64], rng: &mut SplitMix64) -> PureBipartite {
    let n = p.len();
    let theta = rng.uniform(0.0, std::f64::consts::TAU);
    let (c, s) = (theta.cos(), theta.sin());
    let base = diagonal_bipartite(p).amplitudes().clone();
    let mut rot = CMatrix::identity(n, n);
    rot[(0, 0)] = C64::new(c, 0.0);
    rot[(0, 1)] = C64::new(-s, 0.0);
    rot[(1, 0)] = C64::new(s, 0.0);
    rot[(1, 1)] = C64::new(c, 0.0);
    PureBipartite::new(&rot * base * rot.transpose()).unwrap()
}

fn criterion_8() -> Vec<Line> {
    let bell = diagonal_bipartite(&[0.5, 0.5]);
    let product = diagonal_bipartite(&[1.0, 0.0]);
    let e1 = entanglement_of_transition(&bell, &product).unwrap();
    let e2 = entanglement_of_transition(&product, &bell).unwrap();
    let e3 = entanglement_of_transition(&bell, &bell).unwrap();
    let exact = e1 == 1.0 && e2 == -1.0 && e3 == 0.0;

    let mut rng = SplitMix64::new(CORPUS_SEED ^ 8);
    let mut disagreements = 0;
    for k in 0..200 {
        let n = 2 + k % 3;
        let a = rng.simplex(n);
        let b = rng.simplex(n);
        let e = entanglement_of_transition(&scrambled(&a, &mut rng), &scrambled(&b, &mut rng)).unwrap();
        let sys = System::trivial(n).unwrap();
        let majorizes = thermo_majorizes(&State::new(b).unwrap(), &State::new(a).unwrap(), &sys).unwrap();
        if (e >= -1e-12) != majorizes {
            disagreements += 1;
        }
    }
    vec![line(
        "8",
        "LOCC entanglement of transition",
        exact && disagreements == 0,
        format!("Bell->product {e1}, product->Bell {e2}, Bell->Bell {e3}; Nielsen disagreements = {disagreements}/200"),
    )]
}

fn run_cli(args: &[&str], dir: &Path) -> Option<String> {
    let out = Command::new(env!("CARGO_BIN_EXE_thermoflux"))
        .args(args)
        .current_dir(dir)
        .output()
        .ok()?;
    out.status.success().then(|| String::from_utf8(out.stdout).ok()).flatten()
}

fn criterion_9() -> Vec<Line> {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden");
    let cases = [
        ("gibbs_to_excited_pstar", vec!["pstar", "-i", "gibbs_to_excited.json"]),
        ("noisy_qubit_pstar", vec!["pstar", "-i", "noisy_qubit.json"]),
        ("identity_check", vec!["check", "-i", "identity.json"]),
    ];
    let mut matched = 0;
    for (name, args) in &cases {
        let expected = std::fs::read_to_string(golden.join(format!("{name}.expected.json"))).ok();
        if run_cli(args, &golden).is_some() && run_cli(args, &golden) == expected {
            matched += 1;
        }
    }

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("curve.csv");
    let mut round_trips = 0;
    let mut total = 0;
    for file in ["gibbs_to_excited.json", "noisy_qubit.json", "identity.json"] {
        for state in ["rho", "sigma"] {
            total += 1;
            let args = ["curve", "-i", file, "--state", state, "--csv", csv.to_str().unwrap()];
            if run_cli(&args, &golden).is_none() {
                continue;
            }
            let text = std::fs::read_to_string(&csv).unwrap();
            let Ok(curve) = curve_from_csv(&text) else { continue };
            let reparsed: Vec<(u64, u64)> = text
                .lines()
                .skip(1)
                .map(|l| {
                    let (x, y) = l.split_once(',').unwrap();
                    (x.parse::<f64>().unwrap().to_bits(), y.parse::<f64>().unwrap().to_bits())
                })
                .collect();
            let original: Vec<(u64, u64)> = curve.points().map(|(x, y)| (x.to_bits(), y.to_bits())).collect();
            if curve_to_csv(&curve) == text && reparsed == original {
                round_trips += 1;
            }
        }
    }
    vec![line(
        "9",
        "CLI golden files and CSV round trip",
        matched == cases.len() && round_trips == total,
        format!("golden matches {matched}/{}, bit-exact CSV round trips {round_trips}/{total}", cases.len()),
    )]
}

fn main() -> ExitCode {
    let instances = the_corpus();
    let mut lines = Vec::new();
    lines.extend(criterion_1(&instances));
    lines.extend(criterion_2());
    lines.extend(criterion_3(&instances));
    lines.extend(criterion_4(&instances));
    lines.extend(criterion_5(&instances));
    lines.extend(criterion_6());
    lines.extend(criterion_7());
    lines.extend(criterion_8());
    lines.extend(criterion_9());

    let mut failed = false;
    for l in &lines {
        let verdict = if l.pass { "PASS" } else { "FAIL" };
        match l.documented {
            Some(why) if !l.pass => {
                println!("{verdict} [{}] {}: {} (documented: {why})", l.id, l.title, l.detail)
            }
            _ => println!("{verdict} [{}] {}: {}", l.id, l.title, l.detail),
        }
        if !l.pass && l.documented.is_none() {
            failed = true;
        }
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
