//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 cap or
//! budget exceeded. Every failure prints one line to stderr of the form
//! `error: kind=<kind> message=<text>`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::dimension::{
    dimension_json, dimension_table, stable_dimension_for_degree, DimensionQuery,
};
use crate::error::Error;
use crate::invariants::tensor::{random_complex_tensor, random_integer_tensor};
use crate::invariants::{
    build_invariant, evaluation_rank, verify_invariance, OrthogonalKind, OrthogonalTuple, Tensor,
    TensorData, TensorPolynomial,
};
use crate::limits::Limits;
use crate::matchings::{Matching, Permutation};
use crate::orbits::{enumerate_orbits_with, to_colored_graph};
use crate::phylo::{forest_act, matching_to_tree, read_tree, PhyloForest, PhyloTree};
use std::str::FromStr;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 2012;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "orthoinv",
    version,
    about = "Invariants of tensors under products of orthogonal groups"
)]
pub struct Cli {
    /// Worker threads for parallel kernels (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stable dimension of degree 2m invariants for r factors.
    Dim(DimArgs),
    /// Grid of stable dimensions.
    Table(TableArgs),
    /// One canonical matching tuple per basis element.
    Orbits(OrbitsArgs),
    /// The polynomial attached to one orbit.
    Invariant(InvariantArgs),
    /// Numerical invariance check under random orthogonal tuples.
    Verify(VerifyArgs),
    /// Matchings as phylogenetic trees and forests.
    Trees(TreesArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("degree").required(true).args(["m", "d"])))]
pub struct DimArgs {
    #[arg(long)]
    pub r: u32,
    /// Half the degree.
    #[arg(long)]
    pub m: Option<u32>,
    /// The degree itself; odd degrees give 0.
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub rmax: u32,
    #[arg(long)]
    pub mmax: u32,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct OrbitsArgs {
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub m: usize,
    /// Write one `orbit_K.dot` per orbit into this directory.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct InvariantArgs {
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub m: usize,
    /// 1-based orbit index, as listed by `orbits`.
    #[arg(long)]
    pub orbit: usize,
    /// Comma-separated factor sizes; defaults to 2m for every factor.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long)]
    pub json: bool,
    /// Evaluate on the tensor stored in this JSON file.
    #[arg(long)]
    pub eval: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Real,
    Cayley,
    Both,
}

impl KindArg {
    fn kinds(self) -> Vec<OrthogonalKind> {
        match self {
            KindArg::Real => vec![OrthogonalKind::Real],
            KindArg::Cayley => vec![OrthogonalKind::ComplexCayley],
            KindArg::Both => vec![OrthogonalKind::Real, OrthogonalKind::ComplexCayley],
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<usize>,
    /// Random group elements per orbit and kind.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = KindArg::Both)]
    pub kind: KindArg,
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    /// Use this tensor instead of random ones.
    #[arg(long)]
    pub tensor: Option<PathBuf>,
    /// Also require full exact evaluation rank on this many integer tensors.
    #[arg(long)]
    pub rank_samples: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["matching", "newick", "act"])))]
pub struct TreesArgs {
    /// Matching in cycle notation, e.g. "(1 4)(2 3)(5 8)(6 7)".
    #[arg(long)]
    pub matching: Option<String>,
    /// Tree in Newick form, e.g. "(((1,4),(2,3)),5);".
    #[arg(long)]
    pub newick: Option<String>,
    /// Permutation in cycle notation applied to `--forest`.
    #[arg(long, requires = "forest")]
    pub act: Option<String>,
    /// JSON array of Newick strings.
    #[arg(long)]
    pub forest: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

/// A failure of a subcommand, mapped to an exit code.
#[derive(Debug)]
pub enum Failure {
    Lib(Error),
    Usage(String),
    Io(String),
    /// Verification ran and did not pass; the report is already printed.
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Lib(Error::CapExceeded { .. } | Error::BudgetExceeded { .. }) => EXIT_CAP,
            Failure::Lib(Error::NonIntegral(_) | Error::Singular(_)) | Failure::Verify => {
                EXIT_VERIFY_FAILED
            }
            Failure::Lib(_) | Failure::Usage(_) | Failure::Io(_) => EXIT_USAGE,
        }
    }

    fn diagnostic(&self) -> Option<String> {
        let (kind, message) = match self {
            Failure::Lib(e) => (e.kind(), e.to_string()),
            Failure::Usage(m) => ("usage", m.clone()),
            Failure::Io(m) => ("io", m.clone()),
            Failure::Verify => return None,
        };
        Some(format!("error: kind={kind} message={}", one_line(&message)))
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

type CliResult<T = ()> = std::result::Result<T, Failure>;

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{}", e.render());
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        let _ = writeln!(err, "error: kind=usage message=missing subcommand");
                        EXIT_USAGE
                    } else {
                        EXIT_OK
                    }
                }
                _ => {
                    let text = e.render().to_string();
                    let first = text
                        .lines()
                        .next()
                        .unwrap_or("")
                        .trim_start_matches("error: ");
                    let _ = writeln!(err, "error: kind=usage message={}", one_line(first));
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            if let Some(line) = f.diagnostic() {
                let _ = writeln!(err, "{line}");
            }
            f.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let limits = Limits::from_env();
    match &cli.command {
        Command::Dim(a) => dim(a, out),
        Command::Table(a) => table(a, out),
        Command::Orbits(a) => orbits(a, &limits, out),
        Command::Invariant(a) => invariant(a, &limits, out),
        Command::Verify(a) => verify(a, &limits, out),
        Command::Trees(a) => trees(a, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Io(e.to_string()))
}

fn emit_json(out: &mut dyn Write, value: &Value) -> CliResult {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialise");
    emit(out, &format!("{text}\n"))
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Lib(Error::Parse(format!("{}: {e}", path.display()))))
}

fn dim(a: &DimArgs, out: &mut dyn Write) -> CliResult {
    let d = match (a.m, a.d) {
        (Some(m), _) => 2 * m,
        (None, Some(d)) => d,
        (None, None) => unreachable!("clap requires one of --m, --d"),
    };
    let value = stable_dimension_for_degree(a.r, d)?;
    if a.json {
        let mut v = dimension_json(DimensionQuery::new(a.r, d / 2)?, &value);
        v["d"] = json!(d);
        emit_json(out, &v)
    } else {
        emit(out, &format!("{value}\n"))
    }
}

fn table(a: &TableArgs, out: &mut dyn Write) -> CliResult {
    let t = dimension_table(a.rmax, a.mmax)?;
    if a.json {
        emit_json(out, &t.to_json())
    } else {
        emit(out, &t.to_text())
    }
}

fn orbits(a: &OrbitsArgs, limits: &Limits, out: &mut dyn Write) -> CliResult {
    let found = enumerate_orbits_with(a.r, a.m, limits)?;
    if let Some(dir) = &a.dot {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
        for (i, c) in found.iter().enumerate() {
            let path = dir.join(format!("orbit_{}.dot", i + 1));
            let dot = to_colored_graph(&c.tuple).to_dot(&format!("orbit_{}", i + 1));
            fs::write(&path, dot).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        }
    }
    if a.json {
        let items: Vec<Value> = found
            .iter()
            .enumerate()
            .map(|(i, c)| {
                json!({
                    "index": i + 1,
                    "tuple": c.tuple,
                    "cycles": c.tuple.taus().iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "orbit_size": c.orbit_size().to_string(),
                })
            })
            .collect();
        emit_json(
            out,
            &json!({ "r": a.r, "m": a.m, "count": found.len(), "orbits": items }),
        )
    } else {
        let mut text = String::new();
        for (i, c) in found.iter().enumerate() {
            text.push_str(&format!(
                "{}\t{}\torbit_size={}\n",
                i + 1,
                c.tuple,
                c.orbit_size()
            ));
        }
        emit(out, &text)
    }
}

fn pick_orbit(
    r: usize,
    m: usize,
    k: usize,
    limits: &Limits,
) -> CliResult<crate::orbits::MatchingTuple> {
    let found = enumerate_orbits_with(r, m, limits)?;
    if k == 0 || k > found.len() {
        return Err(Failure::Lib(Error::InvalidArgument(format!(
            "orbit {k} outside 1..={} for r={r} m={m}",
            found.len()
        ))));
    }
    Ok(found[k - 1].tuple.clone())
}

fn invariant(a: &InvariantArgs, limits: &Limits, out: &mut dyn Write) -> CliResult {
    let t = pick_orbit(a.r, a.m, a.orbit, limits)?;
    let dims = a
        .dims
        .clone()
        .unwrap_or_else(|| vec![(2 * a.m).max(1); a.r]);
    let f = build_invariant(&t, &dims)?;
    let value = match &a.eval {
        None => None,
        Some(path) => Some(match TensorData::from_json(&read_json(path)?)? {
            TensorData::Rational(x) => json!(f.evaluate_with(&x, limits.eval_budget)?.to_string()),
            TensorData::Complex(x) => {
                let v = f.evaluate_with(&x, limits.eval_budget)?;
                json!([v.re, v.im])
            }
        }),
    };
    if a.json {
        let mut v = f.to_json();
        v["orbit"] = json!(a.orbit);
        v["latex"] = json!(f.to_latex());
        if let Some(value) = value {
            v["value"] = value;
        }
        emit_json(out, &v)
    } else {
        let mut text = format!("{}\n", f.to_latex());
        if let Some(value) = value {
            let shown = match &value {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            text.push_str(&format!("value={shown}\n"));
        }
        emit(out, &text)
    }
}

fn verify(a: &VerifyArgs, limits: &Limits, out: &mut dyn Write) -> CliResult {
    if a.tolerance.is_nan() || a.tolerance < 0.0 {
        return Err(Failure::Usage("--tolerance must be non-negative".into()));
    }
    let found = enumerate_orbits_with(a.r, a.m, limits)?;
    let fs: Vec<_> = found
        .iter()
        .map(|c| build_invariant(&c.tuple, &a.dims))
        .collect::<crate::error::Result<_>>()?;
    let fixed = match &a.tensor {
        None => None,
        Some(path) => {
            let x = TensorData::from_json(&read_json(path)?)?.to_complex();
            if x.dims() != a.dims.as_slice() {
                return Err(Failure::Lib(Error::InvalidArgument(format!(
                    "tensor dims {:?} differ from --dims {:?}",
                    x.dims(),
                    a.dims
                ))));
            }
            Some(x)
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let kinds = a.kind.kinds();
    let mut per_orbit = Vec::new();
    let mut max_residual: f64 = 0.0;
    for (i, f) in fs.iter().enumerate() {
        let mut row = json!({ "index": i + 1 });
        for &kind in &kinds {
            let mut worst: f64 = 0.0;
            for _ in 0..a.trials {
                let x = match &fixed {
                    Some(x) => x.clone(),
                    None => random_complex_tensor(&a.dims, &mut rng)?,
                };
                let k = OrthogonalTuple::random(&a.dims, kind, &mut rng)?;
                let res = verify_invariance(f, &x, &k)?;
                worst = if res.is_nan() {
                    f64::INFINITY
                } else {
                    worst.max(res)
                };
            }
            row[kind_name(kind)] = json!(worst);
            max_residual = max_residual.max(worst);
        }
        per_orbit.push(row);
    }
    let rank = match a.rank_samples {
        None => None,
        Some(n) => {
            let samples: Vec<Tensor<BigRational>> = (0..n)
                .map(|_| random_integer_tensor(&a.dims, -3, 3, &mut rng))
                .collect::<crate::error::Result<_>>()?;
            Some(evaluation_rank(&fs, &samples)?)
        }
    };
    let pass = max_residual <= a.tolerance && rank.is_none_or(|k| k == fs.len());
    if a.json {
        emit_json(
            out,
            &json!({
                "r": a.r,
                "m": a.m,
                "dims": a.dims,
                "seed": a.seed,
                "trials": a.trials,
                "kind": format!("{:?}", a.kind).to_lowercase(),
                "tolerance": a.tolerance,
                "invariants": fs.len(),
                "max_residual": max_residual,
                "rank": rank,
                "orbits": per_orbit,
                "pass": pass,
            }),
        )?;
    } else {
        let mut text = format!(
            "invariants={} trials={} seed={} max_residual={:e} tolerance={:e}",
            fs.len(),
            a.trials,
            a.seed,
            max_residual,
            a.tolerance
        );
        if let Some(k) = rank {
            text.push_str(&format!(" rank={k}"));
        }
        text.push_str(if pass {
            " status=pass\n"
        } else {
            " status=fail\n"
        });
        emit(out, &text)?;
    }
    if pass {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn kind_name(kind: OrthogonalKind) -> &'static str {
    match kind {
        OrthogonalKind::Real => "real",
        OrthogonalKind::ComplexCayley => "cayley",
    }
}

fn trees(a: &TreesArgs, out: &mut dyn Write) -> CliResult {
    if let Some(s) = &a.matching {
        let tau = Matching::from_str(s)?;
        let tree = matching_to_tree(&tau)?;
        let reading = read_tree(&tree)?;
        if a.json {
            emit_json(
                out,
                &json!({
                    "matching": tau.to_string(),
                    "newick": tree.to_newick(),
                    "sibling_pairs": reading.sibling_pairs,
                }),
            )
        } else {
            emit(out, &format!("{}\n", tree.to_newick()))
        }
    } else if let Some(s) = &a.newick {
        let tree = PhyloTree::from_newick(s)?;
        let reading = read_tree(&tree)?;
        if a.json {
            emit_json(
                out,
                &json!({
                    "matching": reading.matching.to_string(),
                    "newick": tree.to_newick(),
                    "sibling_pairs": reading.sibling_pairs,
                }),
            )
        } else {
            emit(out, &format!("{}\n", reading.matching))
        }
    } else {
        let perm = a.act.as_deref().expect("clap enforces one input");
        let path = a
            .forest
            .as_ref()
            .expect("clap enforces --forest with --act");
        let forest = PhyloForest::from_json(&read_json(path)?)?;
        let sigma = Permutation::parse(perm, Some(2 * (forest.n_leaves() - 1)))?;
        let acted = forest_act(&sigma, &forest)?;
        if a.json {
            emit_json(out, &acted.to_json())
        } else {
            let text: String = acted
                .trees()
                .iter()
                .map(|t| format!("{}\n", t.to_newick()))
                .collect();
            emit(out, &text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("orthoinv").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn dim_prints_value() {
        assert_eq!(
            run_capture(&["dim", "--r", "3", "--m", "2"]),
            (0, "5\n".into(), String::new())
        );
        assert_eq!(run_capture(&["dim", "--r", "3", "--d", "5"]).1, "0\n");
    }

    #[test]
    fn usage_errors_exit_two() {
        let (code, out, err) = run_capture(&["dim", "--r", "0", "--m", "2"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(out.is_empty());
        assert_eq!(err.lines().count(), 1);
        assert!(err.starts_with("error: kind=invalid_argument"));
        let (code, _, err) = run_capture(&["dim", "--r", "3"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.starts_with("error: kind=usage"));
        assert_eq!(err.lines().count(), 1);
        assert_eq!(run_capture(&["bogus"]).0, EXIT_USAGE);
    }

    #[test]
    fn caps_exit_three() {
        let (code, _, err) = run_capture(&["orbits", "--r", "2", "--m", "7"]);
        assert_eq!(code, EXIT_CAP);
        assert!(err.starts_with("error: kind=cap_exceeded"));
    }

    #[test]
    fn verify_failure_exits_one() {
        let (code, out, _) = run_capture(&[
            "verify",
            "--r",
            "3",
            "--m",
            "2",
            "--dims",
            "2,2,2",
            "--trials",
            "2",
            "--tolerance",
            "0",
        ]);
        assert_eq!(code, EXIT_VERIFY_FAILED);
        assert!(out.contains("status=fail"));
    }

    #[test]
    fn help_is_success() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("verify"));
    }
}
