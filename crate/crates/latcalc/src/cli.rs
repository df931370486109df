//! Command-line front end.
//!
//! Subcommands: `eval`, `converge`, `boxplus`, `boxtimes`, `modulus`,
//! `closure`, `certify`, `test-hom`. Every run is reproducible from its
//! configuration: randomness is seeded (default seed 42), sweep folds are
//! thread-count independent, and only wall-clock columns vary between runs.
//!
//! Reports go to stdout or `--out PATH`, as CSV or JSON (`--format`; each
//! command has a natural default). Failure paths print a single
//! `ERROR: ...` line to stderr and exit with status 2; `test-hom` exits
//! with status 1 when the probed property fails, with witnesses in the
//! report.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::sync::Arc;

use crate::calculus::{
    boxplus, boxtimes, complex_modulus, sigma_sequence, support_formula, SigmaTrace,
};
use crate::completion::{
    certify_not_h_complete, check_homomorphism_preserves, check_preservation_implies_modulus,
    eval_expr, Expr, LinearMapRep, Tower, DEFAULT_CHECK_TOL,
};
use crate::error::{Error, Result};
use crate::homogeneous::{resolve_spec, Curvature, HomogeneousFn};
use crate::lattice::{Element, GridLattice};

/// Parses a registry mean name (`mu:R,S | nu:R,S | norm:M | geo:M |
/// pow:P[,M]`).
pub fn parse_mean_spec(s: &str) -> Result<HomogeneousFn> {
    resolve_spec(s)
}

// ---------------------------------------------------------------------------
// expression grammar
// ---------------------------------------------------------------------------

/// Parses the expression grammar: `gen(i)`, `k * e`, `e + e`, `sup(e, e)`,
/// `inf(e, e)`, `apply(NAME; e, ..., e)`, with `*` binding tighter than `+`
/// and parentheses for grouping. Application names are resolved against the
/// registry and checked for arity at parse time.
pub fn parse_expr(s: &str) -> Result<Expr> {
    let mut p = ExprParser { src: s, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != s.len() {
        return Err(Error::Parse {
            offset: p.pos,
            message: "unexpected trailing input".into(),
        });
    }
    Ok(e)
}

struct ExprParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> ExprParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src.as_bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse {
                offset: self.pos,
                message: format!("expected {:?}", c as char),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'+') {
                self.pos += 1;
                let rhs = self.term()?;
                acc = Expr::add(acc, rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'-' || c == b'+' || c == b'.' => {
                let k = self.number()?;
                self.expect(b'*')?;
                let inner = self.term()?;
                Ok(Expr::scale(k, inner))
            }
            _ => self.primary(),
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        if self.pos < bytes.len() && (bytes[self.pos] == b'-' || bytes[self.pos] == b'+') {
            self.pos += 1;
        }
        while self.pos < bytes.len()
            && (bytes[self.pos].is_ascii_digit() || bytes[self.pos] == b'.')
        {
            self.pos += 1;
        }
        if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
            self.pos += 1;
            if self.pos < bytes.len() && (bytes[self.pos] == b'-' || bytes[self.pos] == b'+') {
                self.pos += 1;
            }
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        self.src[start..self.pos].parse().map_err(|_| Error::Parse {
            offset: start,
            message: format!("bad number {:?}", &self.src[start..self.pos]),
        })
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        self.src[start..self.pos].to_string()
    }

    fn primary(&mut self) -> Result<Expr> {
        self.skip_ws();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(b')')?;
            return Ok(e);
        }
        let at = self.pos;
        let word = self.ident();
        match word.as_str() {
            "gen" => {
                self.expect(b'(')?;
                self.skip_ws();
                let start = self.pos;
                let bytes = self.src.as_bytes();
                while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let idx: usize = self.src[start..self.pos].parse().map_err(|_| Error::Parse {
                    offset: start,
                    message: "expected a generator index".into(),
                })?;
                self.expect(b')')?;
                Ok(Expr::gen(idx))
            }
            "sup" | "inf" => {
                self.expect(b'(')?;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(b')')?;
                Ok(if word == "sup" {
                    Expr::sup(a, b)
                } else {
                    Expr::inf(a, b)
                })
            }
            "apply" => {
                self.expect(b'(')?;
                let name_start = self.pos;
                let semi = self.src[self.pos..].find(';').ok_or(Error::Parse {
                    offset: self.pos,
                    message: "expected ';' after the function name".into(),
                })?;
                let name = self.src[name_start..name_start + semi].trim().to_string();
                self.pos = name_start + semi + 1;
                let h = resolve_spec(&name).map_err(|e| match e {
                    Error::Parse { offset, message } => Error::Parse {
                        offset: name_start + offset,
                        message,
                    },
                    other => other,
                })?;
                let mut children = vec![self.expr()?];
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                            children.push(self.expr()?);
                        }
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => {
                            return Err(Error::Parse {
                                offset: self.pos,
                                message: "expected ',' or ')'".into(),
                            })
                        }
                    }
                }
                if children.len() != h.arity() {
                    return Err(Error::ArityMismatch {
                        name,
                        expected: h.arity(),
                        got: children.len(),
                    });
                }
                Ok(Expr::Apply(name, children))
            }
            "" => Err(Error::Parse {
                offset: at,
                message: "expected an expression".into(),
            }),
            other => Err(Error::Parse {
                offset: at,
                message: format!("unknown form {other:?}"),
            }),
        }
    }
}

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapKind {
    /// One nonnegative entry per row: a lattice homomorphism.
    Sparse,
    /// Strictly positive rows with several entries: positive but not a
    /// homomorphism.
    Dense,
}

#[derive(Debug, Clone)]
pub enum CommandConfig {
    Eval {
        expr: String,
    },
    Converge {
        mean: String,
        arity: Option<usize>,
        levels: u32,
        support_density: Option<u32>,
    },
    Boxplus {
        k: usize,
    },
    Boxtimes {
        k: usize,
    },
    Modulus {
        k: usize,
    },
    Closure {
        means: Vec<String>,
        levels: usize,
        budget: usize,
    },
    Certify {
        mean: String,
        knots: Vec<f64>,
    },
    TestHom {
        mean: String,
        trials: usize,
        map: MapKind,
        target: Option<usize>,
        eps: Option<Vec<f64>>,
        lambda: Option<f64>,
    },
}

/// A fully resolved run: command, grid, seed, output target and format,
/// tolerance and thread overrides, plus any explicit input elements.
/// Identical configurations produce identical reports (wall-clock columns
/// aside).
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandConfig,
    pub grid_size: Option<usize>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Option<ReportFormat>,
    pub tol: Option<f64>,
    pub threads: Option<usize>,
    pub values: Vec<Vec<f64>>,
    pub values_files: Vec<PathBuf>,
}

pub struct RunOutcome {
    pub report: String,
    pub failed: bool,
}

// ---------------------------------------------------------------------------
// clap surface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "latcalc",
    about = "Functional calculus on finite vector lattices",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Args, Clone)]
struct Common {
    /// Grid size for generated inputs (per-command default otherwise)
    #[arg(long)]
    grid: Option<usize>,
    /// Seed for all randomness in the run
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format (per-command default otherwise)
    #[arg(long, value_enum)]
    format: Option<ReportFormat>,
    /// Tolerance override for pass/fail checks
    #[arg(long)]
    tol: Option<f64>,
    /// Rayon thread count for sweeps (results do not depend on it)
    #[arg(long)]
    threads: Option<usize>,
    /// Inline element values, e.g. --values "1,2,3"; repeat per element
    #[arg(long = "values", allow_hyphen_values = true)]
    values: Vec<String>,
    /// Element files (.json or CSV label,value rows); repeat per element
    #[arg(long = "values-file")]
    values_file: Vec<PathBuf>,
}

#[derive(Subcommand, Clone)]
enum CliCommand {
    /// Evaluate an expression over generator elements
    Eval {
        /// Expression, e.g. "apply(mu:2,4; gen(0), gen(1))"
        #[arg(long)]
        expr: String,
        #[command(flatten)]
        common: Common,
    },
    /// Dyadic approximation trace for a convex or concave mean
    Converge {
        /// Mean name, e.g. norm:2 or pow:2,3
        #[arg(long)]
        mean: String,
        /// Expected arity (checked against the mean)
        #[arg(long = "m")]
        arity: Option<usize>,
        /// Number of dyadic levels
        #[arg(long = "N", default_value_t = 10)]
        levels: u32,
        /// Also evaluate the one-shot supporting-hyperplane formula at this
        /// density and report its error
        #[arg(long)]
        density: Option<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Square-mean grid supremum sup { f cos t + g sin t }
    Boxplus {
        /// Number of angle samples on the circle
        #[arg(long = "K", default_value_t = 1024)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Geometric-mean grid infimum 1/2 inf { t f + g/t }
    Boxtimes {
        /// Number of log-spaced weight samples
        #[arg(long = "K", default_value_t = 1024)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Modulus |f + i g| as a grid supremum
    Modulus {
        /// Number of angle samples on the circle
        #[arg(long = "K", default_value_t = 1024)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Build a closure tower over generators
    Closure {
        /// Mean name; repeat to close under several functions
        #[arg(long = "mean", required = true)]
        means: Vec<String>,
        /// Number of tower levels to build
        #[arg(long, default_value_t = 3)]
        level: usize,
        /// Cap on new application atoms per level
        #[arg(long, default_value_t = 64)]
        budget: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Piecewise-linear non-closure certificate
    Certify {
        /// Mean name applied to the seed functions
        #[arg(long)]
        mean: String,
        /// Designated breakpoints, e.g. "0,1"
        #[arg(long, default_value = "0,1")]
        knots: String,
        #[command(flatten)]
        common: Common,
    },
    /// Probe whether a random map commutes with a mean
    #[command(name = "test-hom")]
    TestHom {
        /// Mean name the map is tested against
        #[arg(long)]
        mean: String,
        /// Random tuples per check
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Shape of the generated map
        #[arg(long, value_enum, default_value_t = MapKind::Sparse)]
        map: MapKind,
        /// Target grid size (defaults to the source size)
        #[arg(long)]
        target: Option<usize>,
        /// Diagonal coefficients for the converse check, e.g. "1,1"
        #[arg(long, allow_hyphen_values = true)]
        eps: Option<String>,
        /// Diagonal scale for the converse check
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|tok| {
            tok.trim().parse().map_err(|_| Error::Parse {
                offset: 0,
                message: format!("bad number {tok:?} in list {s:?}"),
            })
        })
        .collect()
}

impl Cli {
    fn into_config(self) -> Result<RunConfig> {
        let (command, common) = match self.command {
            CliCommand::Eval { expr, common } => (CommandConfig::Eval { expr }, common),
            CliCommand::Converge {
                mean,
                arity,
                levels,
                density,
                common,
            } => (
                CommandConfig::Converge {
                    mean,
                    arity,
                    levels,
                    support_density: density,
                },
                common,
            ),
            CliCommand::Boxplus { k, common } => (CommandConfig::Boxplus { k }, common),
            CliCommand::Boxtimes { k, common } => (CommandConfig::Boxtimes { k }, common),
            CliCommand::Modulus { k, common } => (CommandConfig::Modulus { k }, common),
            CliCommand::Closure {
                means,
                level,
                budget,
                common,
            } => (
                CommandConfig::Closure {
                    means,
                    levels: level,
                    budget,
                },
                common,
            ),
            CliCommand::Certify {
                mean,
                knots,
                common,
            } => (
                CommandConfig::Certify {
                    mean,
                    knots: parse_f64_list(&knots)?,
                },
                common,
            ),
            CliCommand::TestHom {
                mean,
                trials,
                map,
                target,
                eps,
                lambda,
                common,
            } => (
                CommandConfig::TestHom {
                    mean,
                    trials,
                    map,
                    target,
                    eps: eps.as_deref().map(parse_f64_list).transpose()?,
                    lambda,
                },
                common,
            ),
        };
        if let Some(g) = common.grid {
            if g < 1 {
                return Err(Error::InvalidParameter("grid size must be >= 1".into()));
            }
        }
        let values = common
            .values
            .iter()
            .map(|v| parse_f64_list(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(RunConfig {
            command,
            grid_size: common.grid,
            seed: common.seed,
            out: common.out,
            format: common.format,
            tol: common.tol,
            threads: common.threads,
            values,
            values_files: common.values_file,
        })
    }
}

// ---------------------------------------------------------------------------
// input elements
// ---------------------------------------------------------------------------

enum Domain {
    Signed,
    Positive,
}

fn load_elements(
    config: &RunConfig,
    need: usize,
    domain: Domain,
    default_grid: usize,
) -> Result<Vec<Element>> {
    if !config.values.is_empty() && !config.values_files.is_empty() {
        return Err(Error::InvalidParameter(
            "give either --values or --values-file, not both".into(),
        ));
    }
    if !config.values.is_empty() {
        if config.values.len() != need {
            return Err(Error::InvalidParameter(format!(
                "this command needs {need} element(s), got {} --values",
                config.values.len()
            )));
        }
        let len = config.values[0].len();
        if config.values.iter().any(|v| v.len() != len) {
            return Err(Error::InvalidParameter(
                "all --values lists must have the same length".into(),
            ));
        }
        if let Some(g) = config.grid_size {
            if g != len {
                return Err(Error::InvalidParameter(format!(
                    "--grid {g} conflicts with --values of length {len}"
                )));
            }
        }
        let lattice = GridLattice::with_size(len)?;
        return config
            .values
            .iter()
            .map(|v| Element::new(lattice.clone(), v.clone()))
            .collect();
    }
    if !config.values_files.is_empty() {
        if config.values_files.len() != need {
            return Err(Error::InvalidParameter(format!(
                "this command needs {need} element(s), got {} --values-file",
                config.values_files.len()
            )));
        }
        let elements: Vec<Element> = config
            .values_files
            .iter()
            .map(|path| {
                let text = std::fs::read_to_string(path)?;
                if path.extension().and_then(|e| e.to_str()) == Some("json") {
                    Element::from_json(&text)
                } else {
                    Element::from_csv(&text)
                }
            })
            .collect::<Result<_>>()?;
        for e in &elements[1..] {
            if !e.same_lattice(&elements[0]) {
                return Err(Error::LatticeMismatch(
                    "element files disagree on the grid".into(),
                ));
            }
        }
        return Ok(elements);
    }
    let n = config.grid_size.unwrap_or(default_grid);
    let lattice = GridLattice::with_size(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..need)
        .map(|_| {
            let vals: Vec<f64> = (0..n)
                .map(|_| match domain {
                    Domain::Signed => rng.random_range(-10.0..10.0),
                    Domain::Positive => rng.random_range(0.1..10.0),
                })
                .collect();
            Element::new(lattice.clone(), vals)
        })
        .collect()
}

/// Resolves a mean and, when its curvature is unverified (the two-parameter
/// families), certifies it by seeded sampling so the convex/concave
/// evaluators can run.
fn resolve_certified(spec: &str, seed: u64) -> Result<HomogeneousFn> {
    let h = resolve_spec(spec)?;
    if h.curvature() == Curvature::Unverified {
        let tag = h.certify_curvature(200, seed);
        Ok(h.with_curvature(tag))
    } else {
        Ok(h)
    }
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ElementReport<'a> {
    command: &'a str,
    lattice: Vec<String>,
    result: Vec<f64>,
}

fn element_csv(e: &Element) -> String {
    let mut out = String::from("label,value\n");
    out.push_str(&e.to_csv());
    out
}

#[derive(Serialize)]
struct PairGridReport<'a> {
    command: &'a str,
    k: usize,
    lattice: Vec<String>,
    result: Vec<f64>,
    oracle: Vec<f64>,
    max_deviation_from_oracle: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    unattained_points: Option<Vec<usize>>,
}

fn pair_grid_csv(e: &Element, oracle: &Element) -> String {
    let mut out = String::from("label,value,oracle\n");
    for ((l, v), o) in e
        .lattice()
        .labels()
        .iter()
        .zip(e.values())
        .zip(oracle.values())
    {
        let _ = writeln!(out, "{l},{v},{o}");
    }
    out
}

#[derive(Serialize)]
struct ConvergeLevel {
    n: usize,
    grid_size: u64,
    sup_error: f64,
    skipped: u64,
    wall_ms: f64,
}

#[derive(Serialize)]
struct ConvergeReport<'a> {
    command: &'a str,
    mean: &'a str,
    arity: usize,
    grid: usize,
    monotone: bool,
    levels: Vec<ConvergeLevel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    support: Option<SupportSummary>,
}

#[derive(Serialize)]
struct SupportSummary {
    density: u32,
    sup_error: f64,
}

#[derive(Serialize)]
struct ClosureLevelReport {
    level: usize,
    size: usize,
}

#[derive(Serialize)]
struct ClosureReport<'a> {
    command: &'a str,
    means: &'a [String],
    generators: usize,
    budget: usize,
    levels: Vec<ClosureLevelReport>,
    top_sample: Vec<String>,
}

#[derive(Serialize)]
struct TestHomReport<'a> {
    command: &'a str,
    mean: &'a str,
    map_kind: &'a str,
    source_size: usize,
    target_size: usize,
    positive: bool,
    homomorphism: bool,
    preservation: crate::completion::PreservationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    converse: Option<crate::completion::ConverseReport>,
    passed: bool,
}

fn to_json_report<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

/// Executes a configuration and renders its report. `failed` marks runs
/// whose probed property did not hold (exit status 1).
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    if let Some(t) = config.threads {
        // ignore the error when a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    match &config.command {
        CommandConfig::Eval { expr } => run_eval(config, expr),
        CommandConfig::Converge {
            mean,
            arity,
            levels,
            support_density,
        } => run_converge(config, mean, *arity, *levels, *support_density),
        CommandConfig::Boxplus { k } => run_pair_grid(config, "boxplus", *k),
        CommandConfig::Modulus { k } => run_pair_grid(config, "modulus", *k),
        CommandConfig::Boxtimes { k } => run_boxtimes(config, *k),
        CommandConfig::Closure {
            means,
            levels,
            budget,
        } => run_closure(config, means, *levels, *budget),
        CommandConfig::Certify { mean, knots } => run_certify(config, mean, knots),
        CommandConfig::TestHom {
            mean,
            trials,
            map,
            target,
            eps,
            lambda,
        } => run_test_hom(config, mean, *trials, *map, *target, eps.as_deref(), *lambda),
    }
}

fn run_eval(config: &RunConfig, expr: &str) -> Result<RunOutcome> {
    let e = parse_expr(expr)?;
    let need = e.max_generator().map(|i| i + 1).unwrap_or(1);
    let assignment = load_elements(config, need, Domain::Signed, 8)?;
    let result = eval_expr(&e, &assignment)?;
    let report = match config.format.unwrap_or(ReportFormat::Csv) {
        ReportFormat::Csv => element_csv(&result),
        ReportFormat::Json => to_json_report(&ElementReport {
            command: "eval",
            lattice: result.lattice().labels().to_vec(),
            result: result.values().to_vec(),
        })?,
    };
    Ok(RunOutcome {
        report,
        failed: false,
    })
}

fn run_converge(
    config: &RunConfig,
    mean: &str,
    arity: Option<usize>,
    levels: u32,
    support_density: Option<u32>,
) -> Result<RunOutcome> {
    let h = resolve_certified(mean, config.seed)?;
    if let Some(m) = arity {
        if m != h.arity() {
            return Err(Error::ArityMismatch {
                name: h.name().to_string(),
                expected: h.arity(),
                got: m,
            });
        }
    }
    let a = load_elements(config, h.arity(), Domain::Positive, 16)?;
    let trace = sigma_sequence(&h, &a, levels)?;
    let support = support_density
        .map(|d| -> Result<SupportSummary> {
            let s = support_formula(&h, &a, d)?;
            let oracle = crate::calculus::pointwise_apply(&h, &a)?;
            Ok(SupportSummary {
                density: d,
                sup_error: s.sup_distance(&oracle)?,
            })
        })
        .transpose()?;
    let report = match config.format.unwrap_or(ReportFormat::Csv) {
        ReportFormat::Csv => {
            let mut out = trace.to_csv();
            if let Some(s) = &support {
                let _ = writeln!(
                    out,
                    "support,{},{},",
                    dyadic_size(h.arity(), s.density),
                    s.sup_error
                );
            }
            out
        }
        ReportFormat::Json => {
            let levels_out = trace_levels(&trace);
            to_json_report(&ConvergeReport {
                command: "converge",
                mean: h.name(),
                arity: h.arity(),
                grid: a[0].values().len(),
                monotone: trace.monotone,
                levels: levels_out,
                support,
            })?
        }
    };
    Ok(RunOutcome {
        report,
        failed: false,
    })
}

fn dyadic_size(m: usize, n: u32) -> u64 {
    1u64 << (n as u64 * (m as u64 - 1))
}

fn trace_levels(trace: &SigmaTrace) -> Vec<ConvergeLevel> {
    trace
        .errors
        .iter()
        .enumerate()
        .map(|(i, e)| ConvergeLevel {
            n: i + 1,
            grid_size: trace.grid_sizes[i],
            sup_error: *e,
            skipped: trace.skipped[i],
            wall_ms: trace.wall_ms[i],
        })
        .collect()
}

fn run_pair_grid(config: &RunConfig, command: &str, k: usize) -> Result<RunOutcome> {
    let pair = load_elements(config, 2, Domain::Signed, 16)?;
    let (f, g) = (&pair[0], &pair[1]);
    let result = if command == "modulus" {
        complex_modulus(f, g, k)?
    } else {
        boxplus(f, g, k)?
    };
    let oracle_vals: Vec<f64> = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| (a * a + b * b).sqrt())
        .collect();
    let oracle = Element::new(f.lattice().clone(), oracle_vals)?;
    let max_dev = result.sup_distance(&oracle)?;
    let report = match config.format.unwrap_or(ReportFormat::Csv) {
        ReportFormat::Csv => pair_grid_csv(&result, &oracle),
        ReportFormat::Json => to_json_report(&PairGridReport {
            command,
            k,
            lattice: result.lattice().labels().to_vec(),
            result: result.values().to_vec(),
            oracle: oracle.values().to_vec(),
            max_deviation_from_oracle: max_dev,
            unattained_points: None,
        })?,
    };
    Ok(RunOutcome {
        report,
        failed: false,
    })
}

fn run_boxtimes(config: &RunConfig, k: usize) -> Result<RunOutcome> {
    let pair = load_elements(config, 2, Domain::Positive, 16)?;
    let (f, g) = (&pair[0], &pair[1]);
    let result = boxtimes(f, g, k)?;
    let oracle_vals: Vec<f64> = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| (a * b).sqrt())
        .collect();
    let oracle = Element::new(f.lattice().clone(), oracle_vals)?;
    let max_dev = result.value.sup_distance(&oracle)?;
    let report = match config.format.unwrap_or(ReportFormat::Csv) {
        ReportFormat::Csv => pair_grid_csv(&result.value, &oracle),
        ReportFormat::Json => to_json_report(&PairGridReport {
            command: "boxtimes",
            k,
            lattice: result.value.lattice().labels().to_vec(),
            result: result.value.values().to_vec(),
            oracle: oracle.values().to_vec(),
            max_deviation_from_oracle: max_dev,
            unattained_points: Some(result.unattained),
        })?,
    };
    Ok(RunOutcome {
        report,
        failed: false,
    })
}

fn run_closure(
    config: &RunConfig,
    means: &[String],
    levels: usize,
    budget: usize,
) -> Result<RunOutcome> {
    if levels < 1 {
        return Err(Error::InvalidParameter("need at least one level".into()));
    }
    let dee: Vec<HomogeneousFn> = means.iter().map(|m| resolve_spec(m)).collect::<Result<_>>()?;
    let need = if config.values.is_empty() && config.values_files.is_empty() {
        2
    } else {
        config.values.len().max(config.values_files.len())
    };
    let generators = load_elements(config, need, Domain::Signed, 8)?;
    let mut tower = Tower::new(generators, dee)?;
    for _ in 1..levels {
        tower = tower.closure_step(budget)?;
    }
    let level_sizes: Vec<ClosureLevelReport> = tower
        .levels()
        .iter()
        .enumerate()
        .map(|(i, l)| ClosureLevelReport {
            level: i + 1,
            size: l.len(),
        })
        .collect();
    let top_sample: Vec<String> = tower.top().iter().take(20).map(|e| e.to_string()).collect();
    let report = match config.format.unwrap_or(ReportFormat::Json) {
        ReportFormat::Csv => {
            let mut out = String::from("level,size\n");
            for l in &level_sizes {
                let _ = writeln!(out, "{},{}", l.level, l.size);
            }
            out
        }
        ReportFormat::Json => to_json_report(&ClosureReport {
            command: "closure",
            means,
            generators: tower.generators().len(),
            budget,
            levels: level_sizes,
            top_sample,
        })?,
    };
    Ok(RunOutcome {
        report,
        failed: false,
    })
}

/// Affine seed family for certificates: slopes and intercepts for up to six
/// seed functions; the first two are the canonical `x` and `1 - x`.
const AFFINE_SEEDS: [(f64, f64); 6] = [
    (1.0, 0.0),
    (-1.0, 1.0),
    (0.5, 0.5),
    (2.0, 1.0),
    (-0.5, 2.0),
    (1.5, 0.25),
];

fn run_certify(config: &RunConfig, mean: &str, knots: &[f64]) -> Result<RunOutcome> {
    let h = resolve_spec(mean)?;
    let (seedfns, xs) = if config.values_files.is_empty() && config.values.is_empty() {
        let n = config.grid_size.unwrap_or(257);
        let (lattice, xs) = GridLattice::unit_interval(n)?;
        if h.arity() > AFFINE_SEEDS.len() {
            return Err(Error::InvalidParameter(format!(
                "no default seed functions for arity {}; pass --values-file",
                h.arity()
            )));
        }
        let seeds: Vec<Element> = AFFINE_SEEDS[..h.arity()]
            .iter()
            .map(|(a, b)| {
                Element::new(lattice.clone(), xs.iter().map(|x| a * x + b).collect())
            })
            .collect::<Result<_>>()?;
        (seeds, xs)
    } else {
        let seeds = load_elements(config, h.arity(), Domain::Signed, 257)?;
        let xs: Vec<f64> = seeds[0]
            .lattice()
            .labels()
            .iter()
            .map(|l| {
                l.parse().map_err(|_| {
                    Error::InvalidParameter(format!(
                        "grid label {l:?} is not an abscissa; certify needs numeric labels"
                    ))
                })
            })
            .collect::<Result<_>>()?;
        (seeds, xs)
    };
    let cert = certify_not_h_complete(&h, &seedfns, &xs, knots)?;
    let report = match config.format.unwrap_or(ReportFormat::Json) {
        ReportFormat::Json => to_json_report(&cert)?,
        ReportFormat::Csv => {
            let mut out =
                String::from("status,function,scale,threshold,max_second_difference,witness_x\n");
            let wx = cert
                .witness
                .as_ref()
                .map(|w| w.x.to_string())
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{:?},{},{},{},{},{}",
                cert.status, cert.function, cert.scale, cert.threshold, cert.max_second_difference, wx
            );
            out
        }
    };
    Ok(RunOutcome {
        report,
        failed: false,
    })
}

fn run_test_hom(
    config: &RunConfig,
    mean: &str,
    trials: usize,
    map_kind: MapKind,
    target: Option<usize>,
    eps: Option<&[f64]>,
    lambda: Option<f64>,
) -> Result<RunOutcome> {
    let h = resolve_spec(mean)?;
    let source_size = config.grid_size.unwrap_or(6);
    let target_size = target.unwrap_or(source_size);
    let source = GridLattice::with_size(source_size)?;
    let target: Arc<GridLattice> =
        GridLattice::new((0..target_size).map(|i| format!("q{i}")).collect())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let matrix: Vec<Vec<f64>> = match map_kind {
        MapKind::Sparse => (0..target_size)
            .map(|_| {
                let mut row = vec![0.0; source_size];
                row[rng.random_range(0..source_size)] = rng.random_range(0.0..2.0);
                row
            })
            .collect(),
        MapKind::Dense => (0..target_size)
            .map(|_| (0..source_size).map(|_| rng.random_range(0.1..1.0)).collect())
            .collect(),
    };
    let map = LinearMapRep::new(source, target, matrix)?;
    let tol = config.tol.unwrap_or(DEFAULT_CHECK_TOL);
    let preservation = check_homomorphism_preserves(&map, &h, trials, config.seed, tol)?;
    let converse = match (eps, lambda) {
        (Some(eps), Some(lambda)) => Some(check_preservation_implies_modulus(
            &map,
            &h,
            eps,
            lambda,
            trials,
            config.seed,
            tol,
        )?),
        (None, None) => None,
        _ => {
            return Err(Error::InvalidParameter(
                "--eps and --lambda must be given together".into(),
            ))
        }
    };
    let passed =
        preservation.passed && converse.as_ref().map(|c| c.implication_held).unwrap_or(true);
    let kind_name = match map_kind {
        MapKind::Sparse => "sparse",
        MapKind::Dense => "dense",
    };
    let report_data = TestHomReport {
        command: "test-hom",
        mean: h.name(),
        map_kind: kind_name,
        source_size,
        target_size,
        positive: map.is_positive(),
        homomorphism: map.is_homomorphism(),
        preservation,
        converse,
        passed,
    };
    let report = match config.format.unwrap_or(ReportFormat::Json) {
        ReportFormat::Json => to_json_report(&report_data)?,
        ReportFormat::Csv => {
            let mut out = String::from("mean,map_kind,homomorphism,max_deviation,passed\n");
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                report_data.mean,
                report_data.map_kind,
                report_data.homomorphism,
                report_data.preservation.max_deviation,
                report_data.passed
            );
            out
        }
    };
    Ok(RunOutcome {
        report,
        failed: !passed,
    })
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

/// Prints to stdout, treating a broken pipe (downstream reader closed) as a
/// quiet success. Returns an exit code.
fn emit_stdout(text: &str) -> i32 {
    use std::io::Write;
    let mut out = std::io::stdout();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Ok(()) => 0,
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("ERROR: {e}");
            2
        }
    }
}

/// Parses arguments, runs, writes the report, and maps outcomes to exit
/// codes: 0 for success, 1 when the probed property failed, 2 for usage or
/// I/O errors. Every error path prints one `ERROR: ...` line to stderr.
pub fn run_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => emit_stdout(&e.to_string()),
                _ => {
                    let first = e
                        .to_string()
                        .lines()
                        .next()
                        .unwrap_or("bad arguments")
                        .to_string();
                    eprintln!("ERROR: {first}");
                    2
                }
            };
        }
    };
    let config = match cli.into_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("ERROR: {e}");
            return 2;
        }
    };
    match run(&config) {
        Ok(outcome) => {
            if let Some(path) = &config.out {
                if let Err(e) = std::fs::write(path, &outcome.report) {
                    eprintln!("ERROR: {e}");
                    return 2;
                }
            } else {
                let code = emit_stdout(&outcome.report);
                if code != 0 {
                    return code;
                }
            }
            if outcome.failed {
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("ERROR: {e}");
            2
        }
    }
}
