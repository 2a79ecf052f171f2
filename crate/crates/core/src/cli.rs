//! Command-line front end: flag parsing, validation, dispatch and output.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::cloner::{self, PriorWeights};
use crate::curve::{self, CloningProblem, FlagOverlap};
use crate::error::CloneError;
use crate::format::g15;
use crate::protocols::{self, UdRegime};
use crate::sim;

pub const SEED_ENV: &str = "CLONEOPT_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Optimal cloner for one prior.
    Solve,
    /// Q_min and Q_UD against eta1 on [0, 1/2].
    Sweep,
    /// Unitarity curve (q1, q2) for a flag overlap alpha.
    Curve,
    /// Optimal unambiguous discrimination.
    Ud,
    /// Optimal cloning against both composite protocols.
    Compare,
    /// Monte Carlo run of the explicit unitary at the optimal point.
    Simulate,
    /// Curvature of Q_min near the critical prior as n grows.
    Transition,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Sweep => "sweep",
            Command::Curve => "curve",
            Command::Ud => "ud",
            Command::Compare => "compare",
            Command::Simulate => "simulate",
            Command::Transition => "transition",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Minimum-failure probabilistic cloning of two pure states.
#[derive(Debug, Parser)]
#[command(name = "cloneopt", version)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Overlap <psi1|psi2>, 0 <= s < 1.
    #[arg(long = "s")]
    pub s: Option<f64>,
    /// Input copies.
    #[arg(long = "m")]
    pub m: Option<u32>,
    /// Output clones, n > m.
    #[arg(long = "n")]
    pub n: Option<u32>,
    /// Prior of the first state.
    #[arg(long)]
    pub eta1: Option<f64>,
    /// Flag overlap for `curve` (1 = optimal cloning, 0 = cloning by discrimination).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Samples for `sweep`, or per mirror half for `curve`.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// RNG seed; the CLONEOPT_SEED environment variable takes precedence.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Finite-difference step in eta1 for `transition`.
    #[arg(long = "fd-step")]
    pub fd_step: Option<f64>,
    /// Clone counts scanned by `transition`.
    #[arg(long = "n-values", value_delimiter = ',')]
    pub n_values: Option<Vec<u32>>,
    /// Gram-matrix tolerance accepted when building the unitary for `simulate`.
    #[arg(long = "gram-tol")]
    pub gram_tol: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write here instead of standard output.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
}

pub const DEFAULT_POINTS: usize = 200;
pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_N_VALUES: [u32; 4] = [3, 5, 10, 20];

/// A validated invocation with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub s: f64,
    pub m: u32,
    pub n: Option<u32>,
    pub eta1: Option<f64>,
    pub alpha: f64,
    pub points: usize,
    pub trials: u64,
    pub seed: u64,
    pub fd_step: f64,
    pub n_values: Vec<u32>,
    pub gram_tol: f64,
    pub format: Format,
    pub output: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] CloneError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_VALIDATION,
            CliError::Compute(e) if e.is_validation() => EXIT_VALIDATION,
            CliError::Compute(_) => EXIT_NUMERIC,
            CliError::Io(_) | CliError::Json(_) => EXIT_IO,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl RunConfig {
    /// Validates flag combinations. `env_seed` is the value of
    /// [`SEED_ENV`], which overrides `--seed` when set.
    pub fn from_args(args: Args, env_seed: Option<&str>) -> Result<RunConfig, CliError> {
        use Command::*;
        let cmd = args.command;
        let name = cmd.name();
        let uses = |flag: &str| -> bool {
            match flag {
                "n" => !matches!(cmd, Ud | Transition),
                "eta1" => matches!(cmd, Solve | Ud | Compare | Simulate),
                "alpha" => cmd == Curve,
                "points" => matches!(cmd, Sweep | Curve),
                "trials" | "seed" | "gram-tol" => cmd == Simulate,
                "fd-step" | "n-values" => cmd == Transition,
                _ => true,
            }
        };
        let given = [
            ("n", args.n.is_some()),
            ("eta1", args.eta1.is_some()),
            ("alpha", args.alpha.is_some()),
            ("points", args.points.is_some()),
            ("trials", args.trials.is_some()),
            ("seed", args.seed.is_some()),
            ("gram-tol", args.gram_tol.is_some()),
            ("fd-step", args.fd_step.is_some()),
            ("n-values", args.n_values.is_some()),
        ];
        for (flag, present) in given {
            if present && !uses(flag) {
                return Err(usage(format!("--{flag} is not accepted by `{name}`")));
            }
        }

        let s = args
            .s
            .ok_or_else(|| usage(format!("`{name}` requires --s")))?;
        let m = args
            .m
            .ok_or_else(|| usage(format!("`{name}` requires --m")))?;
        if uses("n") && args.n.is_none() {
            return Err(usage(format!("`{name}` requires --n")));
        }
        if uses("eta1") && args.eta1.is_none() {
            return Err(usage(format!("`{name}` requires --eta1")));
        }

        let seed = match env_seed {
            Some(raw) => raw
                .trim()
                .parse()
                .map_err(|_| usage(format!("{SEED_ENV}={raw:?} is not an unsigned integer")))?,
            None => args.seed.unwrap_or(DEFAULT_SEED),
        };

        let config = RunConfig {
            command: cmd,
            s,
            m,
            n: args.n,
            eta1: args.eta1,
            alpha: args.alpha.unwrap_or(1.0),
            points: args.points.unwrap_or(DEFAULT_POINTS),
            trials: args.trials.unwrap_or(DEFAULT_TRIALS),
            seed,
            fd_step: args.fd_step.unwrap_or(protocols::DEFAULT_FD_STEP),
            n_values: args.n_values.unwrap_or_else(|| DEFAULT_N_VALUES.to_vec()),
            gram_tol: args.gram_tol.unwrap_or(sim::GRAM_TOL),
            format: args.format,
            output: args.output,
        };
        config.check_values()?;
        Ok(config)
    }

    fn check_values(&self) -> Result<(), CliError> {
        if self.points < 2 {
            return Err(usage("--points must be at least 2"));
        }
        if self.trials < 1 {
            return Err(usage("--trials must be at least 1"));
        }
        if !(self.gram_tol.is_finite() && self.gram_tol > 0.0) {
            return Err(usage("--gram-tol must be positive"));
        }
        if self.n_values.is_empty() {
            return Err(usage("--n-values must list at least one clone count"));
        }
        // Range checks on s, m, n, eta1, alpha and fd-step are done by the
        // library constructors and surface as validation errors.
        Ok(())
    }

    fn problem(&self) -> Result<CloningProblem, CliError> {
        let n = self.n.ok_or_else(|| usage("missing --n"))?;
        Ok(CloningProblem::new(self.s, self.m, n)?)
    }

    fn priors(&self) -> Result<PriorWeights, CliError> {
        let eta1 = self.eta1.ok_or_else(|| usage("missing --eta1"))?;
        Ok(PriorWeights::new(eta1)?)
    }
}

/// A CSV table: header plus rows of already-formatted cells.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn write_to(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(g15).unwrap_or_default()
}

fn regime_name(r: UdRegime) -> &'static str {
    match r {
        UdRegime::Generalized3Outcome => "Generalized3Outcome",
        UdRegime::Projective2Outcome => "Projective2Outcome",
    }
}

#[derive(Serialize)]
struct SolveRecord {
    command: Command,
    s: f64,
    m: u32,
    n: u32,
    eta1: f64,
    t_star: f64,
    q1: f64,
    q2: f64,
    p1: f64,
    p2: f64,
    q_min: f64,
    swapped: bool,
}

#[derive(Serialize)]
struct SweepRow {
    eta1: f64,
    q_min: f64,
    q_ud: f64,
}

#[derive(Serialize)]
struct SweepRecord {
    command: Command,
    s: f64,
    m: u32,
    n: u32,
    rows: Vec<SweepRow>,
}

#[derive(Serialize)]
struct CurveRecord {
    command: Command,
    s: f64,
    m: u32,
    n: u32,
    alpha: f64,
    rows: Vec<curve::CurveSample>,
}

#[derive(Serialize)]
struct UdRecord {
    command: Command,
    s: f64,
    m: u32,
    eta1: f64,
    q_ud: f64,
    regime: UdRegime,
    threshold: f64,
}

#[derive(Serialize)]
struct CompareRecord {
    command: Command,
    s: f64,
    m: u32,
    n: u32,
    eta1: f64,
    q_min: f64,
    q_ud: f64,
    cloning_by_discrimination: protocols::CompositeResult,
    discrimination_by_cloning: protocols::CompositeResult,
    /// `Q_UD - Q_min`.
    gap_cloning: f64,
    /// Discrimination-by-cloning total minus `Q_UD`.
    gap_discrimination: f64,
}

#[derive(Serialize)]
struct SimulateRecord {
    command: Command,
    s: f64,
    m: u32,
    n: u32,
    eta1: f64,
    q1: f64,
    q2: f64,
    analytic_q: f64,
    sigma: f64,
    z_score: f64,
    unitarity_defect: f64,
    tally: sim::MonteCarloTally,
}

#[derive(Serialize)]
struct TransitionRecord {
    command: Command,
    #[serde(flatten)]
    scan: protocols::TransitionScan,
}

enum Report {
    Solve(SolveRecord),
    Sweep(SweepRecord),
    Curve(CurveRecord),
    Ud(UdRecord),
    Compare(CompareRecord),
    Simulate(SimulateRecord),
    Transition(TransitionRecord),
}

impl Report {
    fn table(&self) -> Table {
        match self {
            Report::Solve(r) => Table {
                header: vec![
                    "s", "m", "n", "eta1", "t_star", "q1", "q2", "p1", "p2", "q_min", "swapped",
                ],
                rows: vec![vec![
                    g15(r.s),
                    r.m.to_string(),
                    r.n.to_string(),
                    g15(r.eta1),
                    g15(r.t_star),
                    g15(r.q1),
                    g15(r.q2),
                    g15(r.p1),
                    g15(r.p2),
                    g15(r.q_min),
                    r.swapped.to_string(),
                ]],
            },
            Report::Sweep(r) => Table {
                header: vec!["eta1", "q_min", "q_ud"],
                rows: r
                    .rows
                    .iter()
                    .map(|x| vec![g15(x.eta1), g15(x.q_min), g15(x.q_ud)])
                    .collect(),
            },
            Report::Curve(r) => Table {
                header: vec!["t", "q1", "q2"],
                rows: r
                    .rows
                    .iter()
                    .map(|x| vec![opt(x.t), g15(x.q1), g15(x.q2)])
                    .collect(),
            },
            Report::Ud(r) => Table {
                header: vec!["s", "m", "eta1", "q_ud", "regime", "threshold"],
                rows: vec![vec![
                    g15(r.s),
                    r.m.to_string(),
                    g15(r.eta1),
                    g15(r.q_ud),
                    regime_name(r.regime).to_string(),
                    g15(r.threshold),
                ]],
            },
            Report::Compare(r) => Table {
                header: vec![
                    "s",
                    "m",
                    "n",
                    "eta1",
                    "q_min",
                    "q_ud",
                    "cbd_total",
                    "dbc_q_cloning",
                    "dbc_q_second",
                    "dbc_total",
                    "gap_cloning",
                    "gap_discrimination",
                ],
                rows: vec![vec![
                    g15(r.s),
                    r.m.to_string(),
                    r.n.to_string(),
                    g15(r.eta1),
                    g15(r.q_min),
                    g15(r.q_ud),
                    g15(r.cloning_by_discrimination.total),
                    g15(r.discrimination_by_cloning.q_cloning),
                    g15(r.discrimination_by_cloning.q_second),
                    g15(r.discrimination_by_cloning.total),
                    g15(r.gap_cloning),
                    g15(r.gap_discrimination),
                ]],
            },
            Report::Simulate(r) => Table {
                header: vec![
                    "s",
                    "m",
                    "n",
                    "eta1",
                    "q1",
                    "q2",
                    "trials",
                    "failures",
                    "trials_state1",
                    "trials_state2",
                    "failures_state1",
                    "failures_state2",
                    "seed",
                    "empirical_q",
                    "analytic_q",
                    "sigma",
                    "z_score",
                    "unitarity_defect",
                ],
                rows: vec![vec![
                    g15(r.s),
                    r.m.to_string(),
                    r.n.to_string(),
                    g15(r.eta1),
                    g15(r.q1),
                    g15(r.q2),
                    r.tally.trials.to_string(),
                    r.tally.failures.to_string(),
                    r.tally.trials_by_state[0].to_string(),
                    r.tally.trials_by_state[1].to_string(),
                    r.tally.failures_by_state[0].to_string(),
                    r.tally.failures_by_state[1].to_string(),
                    r.tally.seed.to_string(),
                    g15(r.tally.empirical_q),
                    g15(r.analytic_q),
                    g15(r.sigma),
                    g15(r.z_score),
                    g15(r.unitarity_defect),
                ]],
            },
            Report::Transition(r) => Table {
                header: vec!["n", "eta_star", "peak_d2", "eta_at_peak", "jump_limit"],
                rows: r
                    .scan
                    .rows
                    .iter()
                    .map(|x| {
                        vec![
                            x.n.to_string(),
                            g15(r.scan.eta_star),
                            g15(x.peak_d2),
                            g15(x.eta_at_peak),
                            g15(r.scan.jump_limit),
                        ]
                    })
                    .collect(),
            },
        }
    }

    fn to_json(&self) -> serde_json::Result<String> {
        match self {
            Report::Solve(r) => serde_json::to_string_pretty(r),
            Report::Sweep(r) => serde_json::to_string_pretty(r),
            Report::Curve(r) => serde_json::to_string_pretty(r),
            Report::Ud(r) => serde_json::to_string_pretty(r),
            Report::Compare(r) => serde_json::to_string_pretty(r),
            Report::Simulate(r) => serde_json::to_string_pretty(r),
            Report::Transition(r) => serde_json::to_string_pretty(r),
        }
    }
}

fn compute(config: &RunConfig) -> Result<Report, CliError> {
    let command = config.command;
    let report = match command {
        Command::Solve => {
            let problem = config.problem()?;
            let priors = config.priors()?;
            let sol = cloner::solve(&problem, priors)?;
            Report::Solve(SolveRecord {
                command,
                s: problem.s(),
                m: problem.m(),
                n: problem.n(),
                eta1: priors.eta1,
                t_star: sol.t_star,
                q1: sol.q1,
                q2: sol.q2,
                p1: sol.p1,
                p2: sol.p2,
                q_min: sol.q_min,
                swapped: sol.swapped,
            })
        }
        Command::Sweep => {
            let problem = config.problem()?;
            let rows = cloner::sweep(&problem, config.points)?
                .into_iter()
                .map(|p| {
                    let ud = protocols::ud_failure(
                        problem.s(),
                        problem.m(),
                        PriorWeights::new(p.eta1)?,
                    )?;
                    Ok(SweepRow {
                        eta1: p.eta1,
                        q_min: p.q_min,
                        q_ud: ud.q_ud,
                    })
                })
                .collect::<Result<_, CloneError>>()?;
            Report::Sweep(SweepRecord {
                command,
                s: problem.s(),
                m: problem.m(),
                n: problem.n(),
                rows,
            })
        }
        Command::Curve => {
            let problem = config.problem()?;
            let alpha = FlagOverlap::new(config.alpha)?;
            Report::Curve(CurveRecord {
                command,
                s: problem.s(),
                m: problem.m(),
                n: problem.n(),
                alpha: alpha.value(),
                rows: curve::trace_curve(&problem, alpha, config.points)?,
            })
        }
        Command::Ud => {
            let priors = config.priors()?;
            let ud = protocols::ud_failure(config.s, config.m, priors)?;
            Report::Ud(UdRecord {
                command,
                s: config.s,
                m: config.m,
                eta1: priors.eta1,
                q_ud: ud.q_ud,
                regime: ud.regime,
                threshold: protocols::ud_threshold(config.s.powi(config.m as i32)),
            })
        }
        Command::Compare => {
            let problem = config.problem()?;
            let priors = config.priors()?;
            let sol = cloner::solve(&problem, priors)?;
            let ud = protocols::ud_failure(problem.s(), problem.m(), priors)?;
            let cbd = protocols::cloning_by_discrimination(&problem, priors)?;
            let dbc = protocols::discrimination_by_cloning(&problem, priors)?;
            Report::Compare(CompareRecord {
                command,
                s: problem.s(),
                m: problem.m(),
                n: problem.n(),
                eta1: priors.eta1,
                q_min: sol.q_min,
                q_ud: ud.q_ud,
                cloning_by_discrimination: cbd,
                discrimination_by_cloning: dbc,
                gap_cloning: ud.q_ud - sol.q_min,
                gap_discrimination: dbc.total - ud.q_ud,
            })
        }
        Command::Simulate => {
            let problem = config.problem()?;
            let priors = config.priors()?;
            let sol = cloner::solve(&problem, priors)?;
            let machine = sim::build_unitary_with_tol(&problem, sol.q1, sol.q2, config.gram_tol)?;
            let tally = sim::simulate(
                &problem,
                priors,
                (sol.q1, sol.q2),
                config.trials,
                config.seed,
            )?;
            let sigma = (sol.q_min * (1.0 - sol.q_min) / config.trials as f64).sqrt();
            let z_score = if sigma > 0.0 {
                (tally.empirical_q - sol.q_min) / sigma
            } else {
                0.0
            };
            Report::Simulate(SimulateRecord {
                command,
                s: problem.s(),
                m: problem.m(),
                n: problem.n(),
                eta1: priors.eta1,
                q1: sol.q1,
                q2: sol.q2,
                analytic_q: sol.q_min,
                sigma,
                z_score,
                unitarity_defect: machine.unitarity_defect(),
                tally,
            })
        }
        Command::Transition => {
            let scan =
                protocols::transition_scan(config.s, config.m, &config.n_values, config.fd_step)?;
            Report::Transition(TransitionRecord { command, scan })
        }
    };
    Ok(report)
}

/// Runs a validated configuration, writing the report to `out`.
pub fn run_to(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let report = compute(config)?;
    match config.format {
        Format::Csv => report.table().write_to(out)?,
        Format::Json => writeln!(out, "{}", report.to_json()?)?,
    }
    out.flush()?;
    Ok(())
}

/// Runs a validated configuration against its configured output and
/// returns the process exit code.
pub fn run(config: &RunConfig) -> i32 {
    let result = match &config.output {
        Some(path) => File::create(path)
            .map_err(CliError::from)
            .and_then(|f| run_to(config, &mut BufWriter::new(f))),
        None => run_to(config, &mut io::stdout().lock()),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("cloneopt: {e}");
            e.exit_code()
        }
    }
}

/// Parses `argv`, applies the seed override and runs.
pub fn main_with<I, T>(argv: I, env_seed: Option<&str>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    match RunConfig::from_args(args, env_seed) {
        Ok(config) => run(&config),
        Err(e) => {
            eprintln!("cloneopt: {e}\n\nRun `cloneopt --help` for usage.");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(argv: &[&str]) -> Result<RunConfig, CliError> {
        let args =
            Args::try_parse_from(std::iter::once("cloneopt").chain(argv.iter().copied())).unwrap();
        RunConfig::from_args(args, None)
    }

    fn output(argv: &[&str]) -> String {
        let cfg = config(argv).unwrap();
        let mut buf = Vec::new();
        run_to(&cfg, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn defaults_filled_in() {
        let c = config(&[
            "simulate", "--s", "0.5", "--m", "1", "--n", "2", "--eta1", "0.5",
        ])
        .unwrap();
        assert_eq!((c.points, c.trials, c.seed), (200, 1_000_000, 42));
        assert_eq!(c.fd_step, 1e-4);
        assert_eq!(c.format, Format::Csv);
    }

    #[test]
    fn env_seed_overrides_flag() {
        let args = Args::try_parse_from([
            "cloneopt", "simulate", "--s", "0.5", "--m", "1", "--n", "2", "--eta1", "0.5",
            "--seed", "5",
        ])
        .unwrap();
        assert_eq!(RunConfig::from_args(args, Some("99")).unwrap().seed, 99);
        let args = Args::try_parse_from([
            "cloneopt", "simulate", "--s", "0.5", "--m", "1", "--n", "2", "--eta1", "0.5",
        ])
        .unwrap();
        assert!(matches!(
            RunConfig::from_args(args, Some("abc")),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn rejects_bad_combinations() {
        for argv in [
            &["ud", "--s", "0.5", "--m", "1", "--n", "2", "--eta1", "0.1"][..],
            &["solve", "--s", "0.5", "--m", "1", "--n", "2"][..],
            &[
                "solve", "--s", "0.5", "--m", "1", "--n", "2", "--eta1", "0.3", "--alpha", "0.5",
            ][..],
            &[
                "sweep", "--s", "0.5", "--m", "1", "--n", "2", "--points", "1",
            ][..],
            &["transition", "--s", "0.5", "--m", "1", "--n", "3"][..],
        ] {
            let e = config(argv).unwrap_err();
            assert_eq!(e.exit_code(), EXIT_VALIDATION, "{argv:?}");
        }
    }

    #[test]
    fn solve_csv() {
        let out = output(&[
            "solve", "--s", "0.5", "--m", "1", "--n", "2", "--eta1", "0.5",
        ]);
        let mut lines = out.lines();
        assert_eq!(
            lines.next().unwrap(),
            "s,m,n,eta1,t_star,q1,q2,p1,p2,q_min,swapped"
        );
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[9], "0.333333333333333");
        assert_eq!(row[10], "false");
    }

    #[test]
    fn ud_csv() {
        let out = output(&["ud", "--s", "0.5", "--m", "1", "--eta1", "0.1"]);
        assert_eq!(
            out.lines().nth(1).unwrap(),
            "0.5,1,0.1,0.325,Projective2Outcome,0.2"
        );
    }

    #[test]
    fn invalid_values_map_to_validation_exit() {
        let cfg = config(&[
            "solve", "--s", "1.0", "--m", "1", "--n", "2", "--eta1", "0.5",
        ])
        .unwrap();
        let err = run_to(&cfg, &mut Vec::new()).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_VALIDATION);
        assert_eq!(
            CliError::Compute(CloneError::Numeric("x".into())).exit_code(),
            EXIT_NUMERIC
        );
    }

    #[test]
    fn json_has_named_fields() {
        let out = output(&[
            "compare", "--s", "0.5", "--m", "1", "--n", "2", "--eta1", "0.5", "--format", "json",
        ]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["command"], "compare");
        assert!((v["discrimination_by_cloning"]["total"].as_f64().unwrap() - 0.5).abs() < 1e-15);
        assert!((v["gap_cloning"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-15);
    }
}
