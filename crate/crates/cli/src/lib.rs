//! `ptolemy-lab`: batch front end over the ptolemy-core modules.
//!
//! Every verb reads one payload (a file, `-` for stdin, or `--inline`),
//! writes plain text or, with `--format json`, the JSON wire formats.
//! Exit codes: 0 success, 1 domain error, 2 malformed input.

mod error;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Read;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use ptolemy_core::euclidean::verify_ptolemy_euclidean;
use ptolemy_core::frieze::{check_frieze, frieze_from_triangulation, frieze_from_values, is_unitary, CheckOptions};
use ptolemy_core::hyperbolic::{realize_polygon, sig12};
use ptolemy_core::pluecker::{parse_matrix, pluecker_from_matrix, verify_pluecker};
use ptolemy_core::seed::{DEFAULT_MAX_DEPTH, DEFAULT_MAX_NODES};
use ptolemy_core::{
    explore, Chord, DecoratedIdealPolygon, EdgeValues, ExploreLimits, Frieze, FriezeGrid, Quiver, Seed, Triangulation,
};

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "ptolemy-lab", version, about = "Exact cluster mutation, friezes and lambda lengths")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Input {
    /// Payload file; `-` or omitted reads stdin.
    pub input: Option<PathBuf>,
    /// Payload given on the command line instead.
    #[arg(long, conflicts_with = "input")]
    pub inline: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mutate a quiver (JSON `{n, frozen, b}`) at the given 1-based vertices, in order.
    QuiverMutate {
        #[command(flatten)]
        input: Input,
        #[arg(long, short, value_delimiter = ',', required = true)]
        k: Vec<usize>,
        /// Also write the result as Graphviz DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Mutate a seed (seed text, seed JSON, or a quiver for its initial seed).
    SeedMutate {
        #[command(flatten)]
        input: Input,
        #[arg(long, short, value_delimiter = ',', required = true)]
        k: Vec<usize>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Breadth-first exchange graph from a seed or quiver.
    Explore {
        #[command(flatten)]
        input: Input,
        #[arg(long, env = "PTOLEMY_LAB_MAX_NODES")]
        max_nodes: Option<usize>,
        #[arg(long)]
        max_depth: Option<usize>,
        /// Write the exchange graph as Graphviz DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Frieze of a triangulation, optionally seeded with rational diagonal values.
    FriezeGen {
        /// Polygon size; with no triangulation, a random one of this size is drawn.
        #[arg(long)]
        m: Option<usize>,
        /// Triangulation file (`m` then diagonal pairs, or JSON).
        #[arg(long)]
        triangulation: Option<PathBuf>,
        /// Values on the diagonals (`i-j p/q` lines or JSON); default all 1.
        #[arg(long)]
        values: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the frieze conditions on a grid.
    FriezeCheck {
        #[command(flatten)]
        input: Input,
        /// The grid is a window, not exactly one period.
        #[arg(long)]
        window: bool,
    },
    /// Decide whether a frieze comes from a triangulation; prints it if so.
    FriezeUnitary {
        #[command(flatten)]
        input: Input,
    },
    /// Plücker coordinates of a 2 x n matrix (two lines of rationals).
    Pluecker {
        #[command(flatten)]
        input: Input,
        /// Use a random integer matrix with this many columns instead.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the three-term Plücker relations on a set of coordinates.
    PlueckerVerify {
        #[command(flatten)]
        input: Input,
    },
    /// Ptolemy residual of four planar points (eight numbers, `x y` per point).
    PtolemyEuclid {
        #[command(flatten)]
        input: Input,
    },
    /// Lambda lengths between all vertices of a decorated ideal polygon.
    Lambda {
        #[command(flatten)]
        input: Input,
    },
    /// Decorated ideal polygon with the given lambda lengths on a triangulation.
    Realize {
        #[arg(long)]
        triangulation: PathBuf,
        /// Values on sides and diagonals; default all 1.
        #[arg(long)]
        values: Option<PathBuf>,
    },
    /// Run the HTTP session service.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory of static files served at `/`.
        #[arg(long)]
        static_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 256)]
        capacity: usize,
        #[arg(long, default_value_t = 3600)]
        ttl_secs: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command. Stdin is
/// read only by verbs whose payload comes from it.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind::{DisplayHelp, DisplayHelpOnMissingArgumentOrSubcommand, DisplayVersion};
            let rendered = e.render().to_string();
            return match e.kind() {
                DisplayHelp | DisplayVersion => Outcome { code: 0, stdout: rendered, stderr: String::new() },
                DisplayHelpOnMissingArgumentOrSubcommand => Outcome { code: 2, stdout: String::new(), stderr: rendered },
                _ => {
                    let first = rendered.lines().next().unwrap_or_default().trim_start_matches("error: ");
                    let err = CliError::malformed("Usage", first);
                    Outcome { code: 2, stdout: format!("{err}\n"), stderr: rendered }
                }
            };
        }
    };
    let format = cli.format;
    match execute(cli, stdin) {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(Failure::Check(stdout)) => Outcome { code: 1, stdout, stderr: String::new() },
        Err(Failure::Error(e)) => {
            let stdout = match format {
                Format::Text => format!("{e}\n"),
                Format::Json => format!("{}\n", json!({ "error": e.kind, "detail": e.detail })),
            };
            Outcome { code: e.exit_code(), stdout, stderr: String::new() }
        }
    }
}

enum Failure {
    /// A verification verb ran but the input failed the check.
    Check(String),
    Error(CliError),
}

impl<E: Into<CliError>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Error(e.into())
    }
}

fn read_input(input: &Input, stdin: &mut dyn Read) -> Result<String, CliError> {
    if let Some(text) = &input.inline {
        return Ok(text.clone());
    }
    match input.input.as_deref() {
        None => read_stdin(stdin),
        Some(p) if p == Path::new("-") => read_stdin(stdin),
        Some(p) => read_file(p),
    }
}

fn read_stdin(stdin: &mut dyn Read) -> Result<String, CliError> {
    let mut s = String::new();
    stdin.read_to_string(&mut s).map_err(|e| CliError::malformed("Io", format!("stdin: {e}")))?;
    Ok(s)
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::malformed("Io", format!("{}: {e}", path.display())))
}

fn read_path(path: &Path, stdin: &mut dyn Read) -> Result<String, CliError> {
    if path == Path::new("-") {
        read_stdin(stdin)
    } else {
        read_file(path)
    }
}

fn write_dot(path: &Path, dot: &str) -> Result<(), CliError> {
    std::fs::write(path, dot).map_err(|e| CliError::domain("Io", format!("{}: {e}", path.display())))
}

fn parse_quiver(text: &str) -> Result<Quiver, CliError> {
    Ok(serde_json::from_str(text)?)
}

/// 1-based labels from the command line to 0-based vertices.
fn vertices(ks: &[usize], n: usize) -> Result<Vec<usize>, CliError> {
    ks.iter()
        .map(|&k| match k {
            1.. if k <= n => Ok(k - 1),
            _ => Err(CliError::domain("InvalidVertex", format!("vertex {k} is out of range 1..={n}"))),
        })
        .collect()
}

fn line(v: &impl serde::Serialize) -> String {
    format!("{}\n", serde_json::to_string(v).expect("output serializes"))
}

fn execute(cli: Cli, stdin: &mut dyn Read) -> Result<String, Failure> {
    let json = cli.format == Format::Json;
    match cli.command {
        Command::QuiverMutate { input, k, dot } => {
            let q = parse_quiver(&read_input(&input, stdin)?)?;
            let mut out = q;
            for v in vertices(&k, out.n())? {
                out = out.mutate(v)?;
            }
            if let Some(path) = dot {
                write_dot(&path, &out.to_dot())?;
            }
            Ok(format!("{}\n", out.to_json()))
        }
        Command::SeedMutate { input, k, dot } => {
            let seed = Seed::parse(&read_input(&input, stdin)?)?;
            let ks = vertices(&k, seed.quiver().n())?;
            let out = seed.mutate_sequence(&ks)?;
            if let Some(path) = dot {
                write_dot(&path, &out.quiver().to_dot())?;
            }
            Ok(if json { format!("{}\n", out.to_json()) } else { out.to_text() })
        }
        Command::Explore { input, max_nodes, max_depth, dot } => {
            let mut seed = Seed::parse(&read_input(&input, stdin)?)?;
            // an initial seed is relabeled canonically so the output does not
            // depend on the input's vertex order
            if seed == Seed::initial(seed.quiver().clone()) {
                seed = Seed::initial(seed.quiver().canonical_form().0);
            }
            let limits = ExploreLimits {
                max_nodes: max_nodes.unwrap_or(DEFAULT_MAX_NODES),
                max_depth: max_depth.unwrap_or(DEFAULT_MAX_DEPTH),
            };
            let g = explore(&seed, limits)?;
            if let Some(path) = dot {
                write_dot(&path, &g.to_dot())?;
            }
            if json {
                return Ok(line(&g.to_export()));
            }
            let mut out = format!("{}\n", g.summary());
            for v in g.variables() {
                out.push_str(&format!("{v}\n"));
            }
            Ok(out)
        }
        Command::FriezeGen { m, triangulation, values, seed } => {
            let t = match (&triangulation, m) {
                (Some(path), _) => Triangulation::parse(&read_path(path, stdin)?)?,
                (None, Some(m)) => random_triangulation(m, seed)?,
                (None, None) => return Err(CliError::malformed("MissingInput", "give --triangulation or --m").into()),
            };
            if let Some(m) = m.filter(|&m| m != t.m()) {
                return Err(CliError::malformed("SizeMismatch", format!("--m {m} but the triangulation has m = {}", t.m()))
                    .into());
            }
            let f = match &values {
                Some(path) => frieze_from_values(&t, &EdgeValues::parse(&read_file(path)?)?)?,
                None => frieze_from_triangulation(&t),
            };
            if json {
                return Ok(line(&frieze_json(&f)));
            }
            Ok(f.grid().to_text())
        }
        Command::FriezeCheck { input, window } => {
            let grid = parse_grid(&read_input(&input, stdin)?)?;
            let report = check_frieze(&grid, CheckOptions { cyclic: !window });
            let out = if json {
                let mut v = serde_json::to_value(&report).expect("report serializes");
                v["ok"] = json!(report.ok());
                line(&v)
            } else {
                let opt = |o: Option<String>| o.unwrap_or_else(|| "n/a".into());
                let mut s = format!(
                    "ok={} boundary={} diamonds={} positive={} integer={} shift_invariant={} min_period={}\n",
                    report.ok(),
                    report.boundary_ok,
                    report.diamond_ok,
                    report.positive,
                    report.integer,
                    opt(report.shift_invariant.map(|b| b.to_string())),
                    opt(report.min_period.map(|p| p.to_string())),
                );
                for (r, c) in &report.violations {
                    s.push_str(&format!("violation row={r} col={c}\n"));
                }
                s
            };
            if report.ok() {
                Ok(out)
            } else {
                Err(Failure::Check(out))
            }
        }
        Command::FriezeUnitary { input } => {
            let grid = parse_grid(&read_input(&input, stdin)?)?;
            let f = Frieze::from_grid(&grid)?;
            let cert = is_unitary(&f);
            if json {
                return Ok(line(&json!({ "unitary": cert.is_some(), "triangulation": cert })));
            }
            Ok(match cert {
                Some(t) => format!("unitary=true\n{}", t.to_text()),
                None => "unitary=false\n".into(),
            })
        }
        Command::Pluecker { input, random, seed } => {
            let rows = match random {
                Some(n) => random_matrix(n, seed),
                None => parse_matrix(&read_input(&input, stdin)?)?,
            };
            let p = pluecker_from_matrix(&rows)?;
            Ok(if json { line(&p) } else { p.to_text() })
        }
        Command::PlueckerVerify { input } => {
            let p = EdgeValues::parse(&read_input(&input, stdin)?)?;
            let report = verify_pluecker(&p)?;
            let out = if json {
                let mut v = serde_json::to_value(&report).expect("report serializes");
                v["ok"] = json!(report.ok());
                line(&v)
            } else {
                let mut s =
                    format!("n={} checked={} violations={}\n", report.n, report.checked, report.violations.len());
                for [i, j, k, l] in &report.violations {
                    s.push_str(&format!("violation {i} {j} {k} {l}\n"));
                }
                s
            };
            if report.ok() {
                Ok(out)
            } else {
                Err(Failure::Check(out))
            }
        }
        Command::PtolemyEuclid { input } => {
            let pts = parse_points(&read_input(&input, stdin)?)?;
            let r = verify_ptolemy_euclidean(pts)?;
            Ok(if json { line(&r) } else { format!("residual={:e} cyclic={}\n", r.residual, r.cyclic) })
        }
        Command::Lambda { input } => {
            let p = DecoratedIdealPolygon::parse(&read_input(&input, stdin)?)?;
            let table = p.lambda_table();
            if json {
                let map: BTreeMap<String, f64> =
                    table.iter().map(|(c, v)| (c.to_string(), sig12(*v).parse().expect("formatted float"))).collect();
                return Ok(line(&map));
            }
            Ok(table.iter().map(|(c, v)| format!("{c} {}\n", sig12(*v))).collect())
        }
        Command::Realize { triangulation, values } => {
            let t = Triangulation::parse(&read_path(&triangulation, stdin)?)?;
            let vals = match &values {
                Some(path) => EdgeValues::parse(&read_file(path)?)?,
                None => EdgeValues::ones(&t),
            };
            let p = realize_polygon(&t, &vals)?;
            Ok(if json { line(&p.to_export()) } else { p.to_text() })
        }
        Command::Serve { bind, port, static_dir, capacity, ttl_secs } => {
            let config = ptolemy_service::ServiceConfig { capacity, idle_ttl: Duration::from_secs(ttl_secs), static_dir };
            let addr = SocketAddr::new(bind, port);
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::domain("Io", e.to_string()))?;
            eprintln!("listening on http://{addr}");
            rt.block_on(ptolemy_service::serve(addr, config)).map_err(|e| CliError::domain("Io", e.to_string()))?;
            Ok(String::new())
        }
    }
}

fn frieze_json(f: &Frieze) -> Value {
    let grid = f.grid();
    let rows: Vec<Vec<String>> = grid.rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
    let quiddity: Option<Vec<String>> = f.quiddity().ok().map(|q| q.iter().map(ToString::to_string).collect());
    json!({ "m": f.m(), "rows": rows, "quiddity": quiddity, "values": f.values() })
}

#[derive(Deserialize)]
struct GridJson {
    m: usize,
    rows: Vec<Vec<Value>>,
}

/// Grid text, or the JSON written by `frieze-gen --format json`.
fn parse_grid(text: &str) -> Result<FriezeGrid, CliError> {
    if !text.trim_start().starts_with('{') {
        return Ok(FriezeGrid::parse(text)?);
    }
    let g: GridJson = serde_json::from_str(text)?;
    let rows = g
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|v| {
                    let s = match v {
                        Value::String(s) => s.clone(),
                        Value::Number(n) => n.to_string(),
                        other => other.to_string(),
                    };
                    s.parse::<BigRational>().map_err(|_| CliError::malformed("Format", format!("bad entry {s:?}")))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FriezeGrid::new(g.m, rows)?)
}

fn parse_points(text: &str) -> Result<[(f64, f64); 4], CliError> {
    let nums: Vec<f64> = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| CliError::malformed("Parse", format!("bad number {t:?}"))))
        .collect::<Result<_, _>>()?;
    if nums.len() != 8 || nums.iter().any(|x| !x.is_finite()) {
        return Err(CliError::malformed("Parse", format!("expected 8 finite numbers, got {}", nums.len())));
    }
    Ok(std::array::from_fn(|i| (nums[2 * i], nums[2 * i + 1])))
}

/// Splits polygons on a uniformly chosen apex over the edge from the first
/// to the last vertex. Not uniform over triangulations.
fn random_triangulation(m: usize, seed: u64) -> Result<Triangulation, CliError> {
    fn split(verts: &[usize], rng: &mut ChaCha8Rng, out: &mut Vec<Chord>) {
        let len = verts.len();
        if len < 4 {
            return;
        }
        let k = rng.random_range(1..len - 1);
        if k > 1 {
            out.push(Chord::new(verts[0], verts[k]));
        }
        if k < len - 2 {
            out.push(Chord::new(verts[k], verts[len - 1]));
        }
        split(&verts[..=k], rng, out);
        split(&verts[k..], rng, out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let verts: Vec<usize> = (1..=m).collect();
    let mut chords = Vec::new();
    split(&verts, &mut rng, &mut chords);
    Ok(Triangulation::new(m, chords)?)
}

fn random_matrix(n: usize, seed: u64) -> Vec<Vec<BigRational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..2)
        .map(|_| (0..n).map(|_| BigRational::from_integer(BigInt::from(rng.random_range(-9i64..=9)))).collect())
        .collect()
}
