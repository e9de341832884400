//! feltfp: fixed-point checks for felt metric spaces.
//!
//! Exit codes: 0 when every check passes (or the fixed point is certified),
//! 1 on a semantic failure, 2 on usage or input errors.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use feltfp_core::axioms;
use feltfp_core::contraction::{self, ModulusProfile, DEFAULT_EPSILON_GRID};
use feltfp_core::format::parse_space_file;
use feltfp_core::oracle::{self, EnumerationConfig, StressSummary};
use feltfp_core::sample::Sampler;
use feltfp_core::solver;
use feltfp_core::{CheckReport, FeltError, FeltSpace, Point, SelfMap, Tolerances, Verdict};

/// ε levels at which felt continuity is certified by `check`.
const CONTINUITY_EPSILONS: [f64; 3] = [0.1, 0.2, 0.5];

#[derive(Parser)]
#[command(name = "feltfp", version)]
#[command(about = "Axiom, contraction and fixed-point checks for felt metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the axioms and contraction conditions of a space and map
    Check(Opts),
    /// Run Picard iteration from --x0 and certify the limit
    Iterate(Opts),
    /// Exhaustively test the fixed-point theorem on small finite spaces
    Stress(Opts),
    /// Compare the open and upper band conditions on random finite spaces
    Fuzz(Opts),
}

#[derive(Args)]
struct Opts {
    /// Space file path, or builtin:NAME (euclid:a,b | maxpm:0,b | discrete:n)
    #[arg(long, value_name = "SRC")]
    space: Option<String>,
    /// Self-map, builtin:NAME (cos | half | ident | const:v | affine:c,b)
    #[arg(long, value_name = "SRC")]
    map: Option<String>,
    /// Start point: index or label on finite spaces, x or x1,x2,.. otherwise
    #[arg(long, value_name = "V", allow_hyphen_values = true)]
    x0: Option<String>,
    #[arg(long, value_name = "V")]
    tol_zero: Option<f64>,
    #[arg(long, value_name = "V")]
    tol_fixed: Option<f64>,
    #[arg(long, value_name = "N")]
    max_iter: Option<usize>,
    #[arg(long, value_name = "N")]
    window: Option<usize>,
    /// Number of points for stress and fuzz
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Distance alphabet for stress and fuzz
    #[arg(long, value_name = "CSV", default_value = "0,0.5,1")]
    alphabet: String,
    /// Random spaces drawn by fuzz
    #[arg(long, value_name = "N", default_value_t = 1000)]
    trials: usize,
    #[arg(long, value_name = "N", env = "FELTFP_SEED", default_value_t = 0)]
    seed: u64,
    /// Emit one JSON document instead of human-readable lines
    #[arg(long)]
    json: bool,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Felt(FeltError),
}

impl From<FeltError> for CliError {
    fn from(e: FeltError) -> Self {
        CliError::Felt(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => f.write_str(m),
            CliError::Felt(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match &cli.command {
        Command::Check(o) => cmd_check(o),
        Command::Iterate(o) => cmd_iterate(o),
        Command::Stress(o) => cmd_stress(o),
        Command::Fuzz(o) => cmd_fuzz(o),
    };
    match run {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

impl Opts {
    fn tolerances(&self) -> CliResult<Tolerances> {
        let mut tol = Tolerances {
            seed: self.seed,
            ..Tolerances::default()
        };
        if let Some(v) = self.tol_zero {
            tol.tol_zero = v;
        }
        if let Some(v) = self.tol_fixed {
            tol.tol_fixed = v;
        }
        if let Some(v) = self.max_iter {
            tol.max_iter = v;
        }
        if let Some(v) = self.window {
            tol.window = v;
        }
        tol.validate()?;
        Ok(tol)
    }

    /// The space and the map, from `--map` or else embedded in the file.
    fn load(&self) -> CliResult<(FeltSpace, Option<SelfMap>)> {
        let src = self
            .space
            .as_deref()
            .ok_or_else(|| CliError::Input("--space is required".into()))?;
        let (space, file_map) = match src.strip_prefix("builtin:") {
            Some(name) => (FeltSpace::builtin(name)?, None),
            None => {
                let text = fs::read_to_string(src)
                    .map_err(|e| CliError::Input(format!("cannot read {src}: {e}")))?;
                let (s, m) = parse_space_file(&text, src)
                    .map_err(|e| CliError::Input(format!("{src}: {e}")))?;
                (FeltSpace::Finite(s), m)
            }
        };
        let map = match &self.map {
            Some(m) => {
                let name = m.strip_prefix("builtin:").unwrap_or(m);
                Some(SelfMap::builtin(name, &space)?)
            }
            None => file_map,
        };
        if let Some(m) = &map {
            m.check_compatible(&space)?;
        }
        Ok((space, map))
    }

    fn enumeration(&self) -> CliResult<EnumerationConfig> {
        let alphabet = oracle::parse_alphabet(&self.alphabet)?;
        let cfg = EnumerationConfig::new(self.n, &alphabet)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_point(space: &FeltSpace, v: &str) -> CliResult<Point> {
    let bad = || {
        CliError::Input(format!(
            "cannot parse --x0 {v:?} as a point of {}",
            space.name()
        ))
    };
    let p = match space {
        FeltSpace::Finite(s) => match s.index_of(v) {
            Some(i) => Point::Index(i),
            None => Point::Index(v.trim().parse().map_err(|_| bad())?),
        },
        FeltSpace::Continuous(_) => {
            let coords: Vec<f64> = v
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad())?;
            Point::Coords(coords)
        }
    };
    space.contains(&p)?;
    Ok(p)
}

/// Plain decimal for moderate magnitudes, scientific otherwise.
fn num(v: f64) -> String {
    if v == 0.0 || (1e-4..1e6).contains(&v.abs()) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn profile_line(p: &ModulusProfile) -> String {
    let levels: Vec<String> = p
        .levels
        .iter()
        .map(|l| format!("{}->{}", l.alpha, l.epsilon))
        .collect();
    format!("modulus profile (alpha->epsilon): {}", levels.join(", "))
}

/// 0-continuity at `points`, folded into one report: the first failure, or
/// a pass counting the points and those where the check was vacuous.
fn zero_continuity_at(
    space: &FeltSpace,
    map: &SelfMap,
    points: &[Point],
    tol: &Tolerances,
) -> CliResult<CheckReport> {
    let mut sampled = false;
    let mut vacuous = 0usize;
    for x in points {
        let r = axioms::check_zero_continuity(space, map, x, tol)?;
        if r.verdict == Verdict::Fail {
            return Ok(r.detail("points", points.len()));
        }
        sampled |= r.verdict == Verdict::PassSampled;
        vacuous += usize::from(r.detail.get("vacuous") == Some(&Value::Bool(true)));
    }
    let r = if sampled {
        CheckReport::pass_sampled(axioms::ZERO_CONTINUITY)
    } else {
        CheckReport::pass(axioms::ZERO_CONTINUITY)
    };
    Ok(r.detail("points", points.len())
        .detail("vacuous_points", vacuous))
}

fn cmd_check(o: &Opts) -> CliResult<bool> {
    let tol = o.tolerances()?;
    let (space, map) = o.load()?;
    let mut reports = Vec::new();
    let mut skipped: Vec<(&str, &str)> = Vec::new();

    let indiscernible = axioms::check_indiscernibility(&space, &tol)?;
    let completeness_ok = indiscernible.passed();
    reports.push(indiscernible);
    reports.push(axioms::check_symmetry(&space, &tol)?);
    for outcome in axioms::check_felt_continuity(&space, &CONTINUITY_EPSILONS, &tol)? {
        reports.push(outcome.to_report());
    }
    if space.is_finite() {
        if completeness_ok {
            reports.push(axioms::check_zero_completeness_finite(&space, &tol)?);
        } else {
            skipped.push((axioms::ZERO_COMPLETENESS, "needs indiscernibility"));
        }
    }

    let mut profile = None;
    match &map {
        Some(map) => {
            if space.is_finite() {
                let c3 = contraction::check_upper_band_finite(&space, map)?;
                reports.push(contraction::check_open_band_finite(&space, map)?);
                reports.push(c3.report);
                reports.push(contraction::check_band_equivalence(&space, map)?);
                profile = c3.profile;
            } else {
                let alphas = contraction::probe_alphas(&space, &tol)?;
                let c3 = contraction::check_upper_band_sampled(
                    &space,
                    map,
                    &alphas,
                    &DEFAULT_EPSILON_GRID,
                    &tol,
                )?;
                reports.push(c3.report());
                profile = Some(c3.profile());
                skipped.push((contraction::OPEN_BAND, "finite spaces only"));
                skipped.push((contraction::BAND_EQUIVALENCE, "finite spaces only"));
            }
            reports.push(contraction::nonexpansive_on_positive(&space, map, &tol)?);
            let points = match (&o.x0, &space) {
                (Some(v), _) => vec![parse_point(&space, v)?],
                (None, FeltSpace::Finite(s)) => (0..s.len()).map(Point::Index).collect(),
                (None, FeltSpace::Continuous(c)) => Sampler::with_seed(c, 0, tol.seed)?
                    .grid()
                    .iter()
                    .map(|g| Point::Coords(g.clone()))
                    .collect(),
            };
            reports.push(zero_continuity_at(&space, map, &points, &tol)?);
        }
        None => skipped.push(("map checks", "no map given")),
    }

    let ok = reports.iter().all(CheckReport::passed);
    if o.json {
        let doc = json!({
            "command": "check",
            "space": space.name(),
            "map": map.as_ref().map(SelfMap::name),
            "reports": reports.iter().map(CheckReport::to_json).collect::<Vec<_>>(),
            "skipped": skipped
                .iter()
                .map(|(c, why)| json!({"check": c, "reason": why}))
                .collect::<Vec<_>>(),
            "profile": profile,
            "ok": ok,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("json values serialize")
        );
    } else {
        for r in &reports {
            println!("{r}");
        }
        for (c, why) in &skipped {
            println!("{:<14} {c}  ({why})", "SKIP");
        }
        if let Some(p) = profile.as_ref().filter(|p| !p.levels.is_empty()) {
            println!("{}", profile_line(p));
        }
    }
    Ok(ok)
}

fn cmd_iterate(o: &Opts) -> CliResult<bool> {
    let tol = o.tolerances()?;
    let (space, map) = o.load()?;
    let map =
        map.ok_or_else(|| CliError::Input("iterate needs a map (--map or in the file)".into()))?;
    let x0 =
        o.x0.as_deref()
            .ok_or_else(|| CliError::Input("iterate needs --x0".into()))?;
    let x0 = parse_point(&space, x0)?;
    let r = solver::solve(&space, &map, &x0, &tol)?;
    let tail = &r.residuals[r.residuals.len().saturating_sub(tol.window)..];

    if o.json {
        let doc = json!({
            "command": "iterate",
            "space": space.name(),
            "map": map.name(),
            "x0": x0,
            "tolerances": tol,
            "result": r,
            "residual_tail": tail,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("json values serialize")
        );
    } else {
        let reason = r
            .stopped_reason
            .map(|s| serde_json::to_value(s).expect("stop reasons serialize"));
        println!("x*            {}", r.x_star);
        println!(
            "stopped       {} after {} iterations",
            reason.as_ref().and_then(Value::as_str).unwrap_or("-"),
            r.iterations
        );
        println!("residual_fix  {}", num(r.residual_fix));
        println!("self_dist     {}", num(r.self_dist));
        if let Some(c) = r.final_consec {
            println!("last step     {}", num(c));
        }
        let tail: Vec<String> = tail.iter().map(|&v| num(v)).collect();
        println!("residual tail [{}]", tail.join(", "));
        if r.theorem_violation_candidate {
            println!("WARNING       steps vanished but p(x*, fx*) > 0");
        }
        println!("certified     {}", if r.certified { "yes" } else { "no" });
    }
    Ok(r.certified)
}

fn print_summary(s: &StressSummary, json: bool) {
    if json {
        println!("{}", s.to_json());
        return;
    }
    let seed = s.seed.map(|v| format!(" seed={v}")).unwrap_or_default();
    println!(
        "{} n={} alphabet={:?}{seed}: {} cases, {} pass the upper band condition, {} orbits, {} certified, {} counterexamples ({:.2?})",
        s.mode,
        s.n,
        s.alphabet,
        s.cases_total,
        s.cases_upper_band,
        s.orbits_total,
        s.cases_certified,
        s.counterexamples.len(),
        s.wall_time
    );
    for c in &s.counterexamples {
        let start = c.start.map(|x| format!(" from {x}")).unwrap_or_default();
        println!(
            "  case {}{start}: {}  {}",
            c.case_index,
            c.reason,
            c.space.to_json()
        );
    }
}

fn cmd_stress(o: &Opts) -> CliResult<bool> {
    let s = oracle::stress_theorem(&o.enumeration()?)?;
    print_summary(&s, o.json);
    Ok(s.is_clean())
}

fn cmd_fuzz(o: &Opts) -> CliResult<bool> {
    let cfg = o.enumeration()?.with_seed(o.seed, o.trials);
    let s = oracle::fuzz_equivalence(&cfg)?;
    print_summary(&s, o.json);
    Ok(s.is_clean())
}
