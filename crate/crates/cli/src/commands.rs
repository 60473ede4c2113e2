use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::{bail, Context, Result};
use precess_core::observables::{optimal_state, verify_precession, FamilySpec, PRECESSION_TOL};
use precess_core::probspace::{facet_dist, write_csv, QuantumBody};
use precess_core::protocol::{
    check_mean_sum_zero, dimension_witness, embed_grassmann, embed_real, general_bound, grassmann_encode_state, max_p3, real_encode_state,
    spectrum, ScoreOperators, SpectrumInfo, CLASSICAL_BOUND,
};
use precess_core::random::{random_state, rng_from_seed};
use precess_core::repro::{run_all, run_one, CriterionOutcome};
use precess_core::spectral::eig_hermitian;
use precess_core::{DensityMatrix, PrecessingPair, State, StateVector};
use serde::{Deserialize, Serialize};

use crate::args::{
    BoundArgs, EmbedKind, FamilyArgs, FamilyKind, ProbspaceArgs, ReproArgs, ReproFormat, ScoreArgs, StateKind, Tolerances, VerifyArgs,
};

/// Flag combinations that cannot be executed; reported with exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

/// Result of a command: success, a failed check (exit 1) or an open
/// probability-space bracket (exit 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    CheckFailed,
    GapAboveTol,
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn need<T: Copy>(value: Option<T>, flag: &str, family: &str) -> Result<T> {
    match value {
        Some(v) => Ok(v),
        None => usage(format!("--family {family} requires {flag}")),
    }
}

impl FamilyArgs {
    pub fn spec(&self) -> Result<FamilySpec> {
        if let Some(path) = &self.file {
            return read_json(path);
        }
        let Some(kind) = self.family else {
            return usage("either --family or --file is required");
        };
        Ok(match kind {
            FamilyKind::FourLevel => FamilySpec::FourLevel {
                x_plus: need(self.x_plus, "--x-plus", "four_level")?,
                x_minus: need(self.x_minus, "--x-minus", "four_level")?,
            },
            FamilyKind::Spin => FamilySpec::Spin { j: need(self.j, "--j", "spin")? },
            FamilyKind::Clock => {
                FamilySpec::Clock { n: need(self.n, "--N", "clock")?, l: self.l.unwrap_or(1.0), x_plus: self.x_plus, x_minus: self.x_minus }
            }
            FamilyKind::Raw => return usage("--family raw requires --file"),
        })
    }

    /// The pair before any embedding, checked for precession unless
    /// `verified` is false.
    pub fn base_pair(&self, verified: bool) -> Result<PrecessingPair> {
        let spec = self.spec()?;
        Ok(if verified { spec.build()? } else { spec.build_unverified()? })
    }

    pub fn embed(&self, pair: &PrecessingPair) -> Result<PrecessingPair> {
        Ok(match self.embed {
            None => pair.clone(),
            Some(EmbedKind::Real) => embed_real(pair)?,
            Some(EmbedKind::Grassmann) => embed_grassmann(pair, self.grassmann_n)?,
        })
    }

    pub fn encode(&self, state: &State) -> State {
        match self.embed {
            None => state.clone(),
            Some(EmbedKind::Real) => real_encode_state(state).into(),
            Some(EmbedKind::Grassmann) => grassmann_encode_state(state, self.grassmann_n).into(),
        }
    }

    pub fn pair(&self) -> Result<PrecessingPair> {
        self.embed(&self.base_pair(true)?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BoundOutput {
    pub x_plus: Option<f64>,
    pub x_minus: Option<f64>,
    pub has_zero: bool,
    pub general_bound: f64,
    pub classical_bound: f64,
}

pub fn bound(args: &BoundArgs, tol: &Tolerances) -> Result<Status> {
    let f = &args.family;
    let spec = if f.family.is_some() || f.file.is_some() {
        spectrum(&f.pair()?, tol.zero_tol)?
    } else if f.x_plus.is_some() || f.x_minus.is_some() {
        SpectrumInfo::from_extremes(f.x_plus, f.x_minus, args.has_zero)?
    } else {
        return usage("bound needs --family/--file or --x-plus/--x-minus");
    };
    print_json(&BoundOutput {
        x_plus: spec.x_plus,
        x_minus: spec.x_minus,
        has_zero: spec.has_zero,
        general_bound: general_bound(&spec)?,
        classical_bound: CLASSICAL_BOUND,
    })?;
    Ok(Status::Ok)
}

/// A state on the unembedded pair; "optimal" is the built-in optimal state
/// where the family has one, otherwise a maximizer of the score.
fn base_state(pair: &PrecessingPair, args: &ScoreArgs) -> Result<State> {
    Ok(match args.state {
        StateKind::Optimal => match optimal_state(pair) {
            Ok(s) => s.into(),
            Err(_) => max_p3(pair)?.1.into(),
        },
        StateKind::Mixed => DensityMatrix::maximally_mixed(pair.dim()).into(),
        StateKind::Random => random_state(pair.dim(), &mut rng_from_seed(args.seed)).into(),
        StateKind::File => {
            let Some(path) = &args.state_file else {
                return usage("--state file requires --state-file");
            };
            load_state(path)?
        }
    })
}

/// Reads a state vector or a density matrix.
pub fn load_state(path: &Path) -> Result<State> {
    let value: serde_json::Value = read_json(path)?;
    let is_matrix = value.get("re").and_then(|r| r.get(0)).is_some_and(serde_json::Value::is_array);
    Ok(if is_matrix {
        serde_json::from_value::<DensityMatrix>(value)?.into()
    } else {
        serde_json::from_value::<StateVector>(value)?.into()
    })
}

pub fn save_state(path: &Path, state: &State) -> Result<()> {
    let text = match state {
        State::Pure(s) => serde_json::to_string_pretty(s)?,
        State::Mixed(r) => serde_json::to_string_pretty(r)?,
    };
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

pub fn score(args: &ScoreArgs, tol: &Tolerances) -> Result<Status> {
    let base = args.family.base_pair(true)?;
    let pair = args.family.embed(&base)?;
    let state = base_state(&base, args)?;
    if let Some(path) = &args.save_state {
        save_state(path, &state)?;
    }
    let ops = ScoreOperators::new(&pair, tol.zero_tol)?;
    print_json(&ops.score_with_tol(&args.family.encode(&state), tol.score_tol)?)?;
    Ok(Status::Ok)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProbspaceSummary {
    pub family: String,
    pub directions: usize,
    pub ray_tol: f64,
    pub max_p3: f64,
    pub min_p3: f64,
    pub max_gap: f64,
    pub mean_gap: f64,
    pub gaps_above_tol: usize,
    pub beyond_classical: usize,
    pub center: [f64; 3],
    pub center_reanchored: bool,
    pub csv: String,
}

pub fn probspace(args: &ProbspaceArgs, tol: &Tolerances) -> Result<Status> {
    if args.directions == 0 {
        return usage("--directions must be at least 1");
    }
    let pair = args.family.pair()?;
    let body = QuantumBody::with_zero_tol(&pair, tol.zero_tol)?;
    let results = body.sample_surface(args.directions, args.seed, tol.ray_tol)?;
    let file = File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_csv(BufWriter::new(file), &results)?;

    let p3s: Vec<f64> = results.iter().map(|r| r.tuple.iter().sum::<f64>() / 3.0).collect();
    let gaps: Vec<f64> = results.iter().map(|r| r.gap()).collect();
    let gaps_above_tol = gaps.iter().filter(|&&g| g > tol.ray_tol).count();
    let summary = ProbspaceSummary {
        family: pair.family().label(),
        directions: results.len(),
        ray_tol: tol.ray_tol,
        max_p3: p3s.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        min_p3: p3s.iter().copied().fold(f64::INFINITY, f64::min),
        max_gap: gaps.iter().copied().fold(0.0, f64::max),
        mean_gap: gaps.iter().sum::<f64>() / gaps.len() as f64,
        gaps_above_tol,
        beyond_classical: results.iter().filter(|r| facet_dist(r.tuple) > tol.score_tol).count(),
        center: body.center(),
        center_reanchored: body.center_reanchored(),
        csv: args.out.display().to_string(),
    };
    print_json(&summary)?;
    Ok(if gaps_above_tol == 0 { Status::Ok } else { Status::GapAboveTol })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub value: Option<f64>,
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    fn measured(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), pass: value <= threshold, value: Some(value), threshold: Some(threshold), detail: None }
    }

    fn failed(name: &str, err: impl std::fmt::Display) -> Self {
        Self { name: name.into(), pass: false, value: None, threshold: None, detail: Some(err.to_string()) }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub family: String,
    pub dim: usize,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

fn embedding_check(base: &PrecessingPair, kind: EmbedKind, grassmann_n: usize, zero_tol: f64) -> CheckResult {
    let name = match kind {
        EmbedKind::Real => "real_embedding_preserves_p3",
        EmbedKind::Grassmann => "grassmann_embedding_preserves_p3",
    };
    let run = || -> precess_core::Result<f64> {
        let state: State = match optimal_state(base) {
            Ok(s) => s.into(),
            Err(_) => max_p3(base)?.1.into(),
        };
        let before = ScoreOperators::new(base, zero_tol)?.score(&state)?.p3;
        let after = match kind {
            EmbedKind::Real => ScoreOperators::new(&embed_real(base)?, zero_tol)?.score(&real_encode_state(&state).into())?,
            EmbedKind::Grassmann => ScoreOperators::new(&embed_grassmann(base, grassmann_n)?, zero_tol)?
                .score(&grassmann_encode_state(&state, grassmann_n).into())?,
        };
        Ok((after.p3 - before).abs())
    };
    match run() {
        Ok(dev) => CheckResult::measured(name, dev, 1e-9),
        Err(e) => CheckResult::failed(name, e),
    }
}

pub fn verify(args: &VerifyArgs, tol: &Tolerances) -> Result<Status> {
    let f = &args.family;
    let base = f.base_pair(false)?;
    let pair = match f.embed {
        None => base.clone(),
        Some(_) => f.embed(&base)?,
    };
    let mut checks = Vec::new();

    let rep = verify_precession(&pair, PRECESSION_TOL);
    checks.push(CheckResult::measured("precession", rep.max_residual, rep.threshold));

    let mut rng = rng_from_seed(args.seed);
    let states: Vec<State> = (0..args.states).map(|_| random_state(pair.dim(), &mut rng).into()).collect();
    let scale = eig_hermitian(pair.x()).spectral_norm().max(1.0);
    checks.push(match check_mean_sum_zero(&pair, &states) {
        Ok(m) => CheckResult::measured("mean_sum_zero", m, 1e-9 * scale),
        Err(e) => CheckResult::failed("mean_sum_zero", e),
    });

    checks.push(match spectrum(&pair, tol.zero_tol) {
        Ok(s) => CheckResult {
            name: "spectrum_time_independent".into(),
            pass: true,
            value: Some(s.outcomes.len() as f64),
            threshold: None,
            detail: Some(format!("{} distinct outcomes", s.outcomes.len())),
        },
        Err(e) => CheckResult::failed("spectrum_time_independent", e),
    });

    let kinds = match f.embed {
        Some(k) => vec![k],
        None => vec![EmbedKind::Real, EmbedKind::Grassmann],
    };
    for k in kinds {
        checks.push(embedding_check(&base, k, f.grassmann_n, tol.zero_tol));
    }

    let pass = checks.iter().all(|c| c.pass);
    print_json(&VerifyOutput { family: pair.family().label(), dim: pair.dim(), checks, pass })?;
    Ok(if pass { Status::Ok } else { Status::CheckFailed })
}

pub fn witness(args: &FamilyArgs) -> Result<Status> {
    print_json(&dimension_witness(&args.pair()?)?)?;
    Ok(Status::Ok)
}

#[derive(Debug, Serialize)]
pub struct ReproOutput {
    pub criteria: Vec<CriterionOutcome>,
    pub passed: usize,
    pub total: usize,
}

pub fn repro(args: &ReproArgs) -> Result<Status> {
    let criteria = match args.only {
        Some(id) => match run_one(id) {
            Some(c) => vec![c],
            None => return usage(format!("no criterion {id}; valid ids are 1-11")),
        },
        None => run_all(),
    };
    let passed = criteria.iter().filter(|c| c.pass).count();
    let total = criteria.len();
    match args.format {
        ReproFormat::Json => print_json(&ReproOutput { criteria, passed, total })?,
        ReproFormat::Table => {
            for c in &criteria {
                println!(
                    "{:>2}  {:<4}  {:<36}  {:<40}  {}  ({:.3} s / {} s)",
                    c.id,
                    if c.pass { "PASS" } else { "FAIL" },
                    c.title,
                    c.reference,
                    c.measured,
                    c.seconds,
                    c.time_limit
                );
            }
            println!("{passed}/{total} passed");
        }
    }
    Ok(if passed == total { Status::Ok } else { Status::CheckFailed })
}

pub fn check_tolerances(tol: &Tolerances) -> Result<()> {
    for (name, v) in [("--zero-tol", tol.zero_tol), ("--score-tol", tol.score_tol), ("--ray-tol", tol.ray_tol)] {
        if !(v.is_finite() && v > 0.0) {
            bail!(UsageError(format!("{name} must be a positive number, got {v}")));
        }
    }
    Ok(())
}
