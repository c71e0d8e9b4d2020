//! `eip`: command line front end for the lattice isoperimetry toolkit.
//!
//! Axes and value-change positions are 1-based on the command line.

use std::cmp::Ordering;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use eip_core::bounds::{converse_sweep, lower_bound_sweep};
use eip_core::daisy::{daisy_of_cardinality, daisy_perimeter, eip_value, is_minimizer};
use eip_core::defects::{height_bound_holds, normalize_with_trace};
use eip_core::experiments::{fit_pairs, fluctuation_scan, Family};
use eip_core::io::from_json;
use eip_core::lattice::{bond_count, edge_perimeter, Config};
use eip_core::oracle::eip_bruteforce;
use eip_core::order::{compare, initial_segment, OrderKey};
use eip_core::rearrange::{decreasing_rearrangement, sections_are_minimizers};

#[derive(Parser)]
#[command(name = "eip", version, about = "Edge isoperimetry on the integer lattice")]
struct Cli {
    /// Write the result here instead of standard output.
    #[arg(short = 'o', long, global = true)]
    output: Option<PathBuf>,
    /// Output format; tabular commands default to csv, the rest to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Compare two points of N^d in the daisy order.
    OrderCmp {
        /// Comma-separated positive coordinates, e.g. 1,2,3.
        x: String,
        y: String,
    },
    /// The first n points of N^d in the daisy order.
    InitialSegment(Size),
    /// The daisy with n points.
    Daisy {
        #[command(flatten)]
        size: Size,
        /// Print the coefficient matrix (the default).
        #[arg(long, group = "view")]
        matrix: bool,
        /// Print the point set.
        #[arg(long, group = "view")]
        points: bool,
        /// Print the perimeter from the closed form.
        #[arg(long, group = "view")]
        perimeter: bool,
    },
    /// Edge perimeter and bond count of a point set.
    Perimeter(Input),
    /// Whether a point set attains the minimal perimeter for its size.
    MinimizeCheck(Input),
    /// Decreasing rearrangement along an axis.
    Rearrange {
        #[command(flatten)]
        input: Input,
        /// Axis, 1-based.
        #[arg(long)]
        axis: usize,
    },
    /// Normal form of a minimizer.
    Normalize {
        #[command(flatten)]
        input: Input,
        /// Write one JSON line per move here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Slab families against the optimal perimeter.
    Bounds {
        /// Slabs thinned by at most floor(h); all should be minimizers.
        #[arg(long, group = "which", required = true)]
        check_lb: bool,
        /// Padded slabs past the threshold; none should be minimizers.
        #[arg(long, group = "which")]
        check_converse: bool,
        #[arg(short = 'd', long)]
        dim: usize,
        #[arg(long)]
        ell_min: u64,
        #[arg(long)]
        ell_max: u64,
    },
    /// Exact minimum and all minimizers by exhaustive enumeration.
    Oracle {
        #[command(flatten)]
        size: Size,
        /// Include every minimizer in the report.
        #[arg(long)]
        list: bool,
    },
    /// Distance to the Wulff cube along a family.
    Fluctuation {
        #[arg(short = 'd', long)]
        dim: usize,
        #[arg(long)]
        ell_min: u64,
        #[arg(long)]
        ell_max: u64,
        #[arg(long, default_value_t = 1)]
        ell_step: u64,
        /// slab-extremal or daisy.
        #[arg(long, default_value = "slab-extremal")]
        family: String,
    },
    /// Log-log least squares on a fluctuation CSV.
    Fit {
        #[arg(short = 'i', long)]
        input: PathBuf,
    },
    /// Randomized consistency checks, driven by --seed.
    Selfcheck {
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(short = 'd', long, default_value_t = 3)]
        dim: usize,
    },
}

#[derive(Args)]
struct Size {
    #[arg(short = 'n', long)]
    n: u128,
    #[arg(short = 'd', long)]
    dim: usize,
}

#[derive(Args)]
struct Input {
    /// Point-set JSON file.
    #[arg(short = 'i', long)]
    input: PathBuf,
}

impl Input {
    fn read(&self) -> anyhow::Result<Config> {
        let text = fs::read_to_string(&self.input).with_context(|| format!("reading {}", self.input.display()))?;
        Ok(from_json(&text)?)
    }
}

/// What a command produces.
enum Output {
    Json(Value),
    Rows(Vec<Value>),
    Text(String),
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn parse_point(s: &str) -> anyhow::Result<OrderKey> {
    let coords = s
        .split(',')
        .map(|t| t.trim().parse::<u64>().with_context(|| format!("bad coordinate `{t}`")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(OrderKey::new(coords)?)
}

fn to_usize(n: u128) -> anyhow::Result<usize> {
    usize::try_from(n).context("n is too large")
}

fn run(cli: &Cli) -> anyhow::Result<Output> {
    Ok(match &cli.command {
        Command::OrderCmp { x, y } => {
            let (x, y) = (parse_point(x)?, parse_point(y)?);
            let order = match compare(&x, &y)? {
                Ordering::Less => "less",
                Ordering::Equal => "equal",
                Ordering::Greater => "greater",
            };
            Output::Json(json!({ "x": x.coords(), "y": y.coords(), "order": order }))
        }
        Command::InitialSegment(s) => Output::Json(to_value(&initial_segment(s.n, s.dim)?)),
        Command::Daisy { size, points, perimeter, .. } => {
            let spec = daisy_of_cardinality(size.n, size.dim)?;
            if *points {
                Output::Json(to_value(&spec.materialize()?))
            } else if *perimeter {
                Output::Json(json!({
                    "n": size.n.to_string(),
                    "d": size.dim,
                    "perimeter": daisy_perimeter(&spec).to_string(),
                    "bonds": spec.bond_count().to_string(),
                }))
            } else {
                Output::Text(spec.to_matrix().to_string())
            }
        }
        Command::Perimeter(input) => {
            let c = input.read()?;
            Output::Json(json!({
                "n": c.len(),
                "d": c.dim(),
                "perimeter": edge_perimeter(&c).to_string(),
                "bonds": bond_count(&c).to_string(),
            }))
        }
        Command::MinimizeCheck(input) => {
            let c = input.read()?;
            Output::Json(json!({
                "n": c.len(),
                "d": c.dim(),
                "perimeter": edge_perimeter(&c).to_string(),
                "eip": eip_value(c.len() as u128, c.dim())?.to_string(),
                "is_minimizer": is_minimizer(&c)?,
                "sections_are_minimizers": c.dim() < 2 || sections_are_minimizers(&c)?,
            }))
        }
        Command::Rearrange { input, axis } => {
            let c = input.read()?;
            if *axis == 0 || *axis > c.dim() {
                bail!(eip_core::Error::InvalidArgument(format!("axis {axis} outside 1..={}", c.dim())));
            }
            Output::Json(to_value(&decreasing_rearrangement(&c, axis - 1)?))
        }
        Command::Normalize { input, trace } => {
            let c = input.read()?;
            let out = normalize_with_trace(&c)?;
            if let Some(path) = trace {
                let mut lines = String::new();
                for m in &out.trace {
                    lines.push_str(&serde_json::to_string(m)?);
                    lines.push('\n');
                }
                fs::write(path, lines).with_context(|| format!("writing {}", path.display()))?;
            }
            let f = &out.form;
            Output::Json(json!({
                "dim": f.dim,
                "axis_order": f.axis_order.iter().map(|a| a + 1).collect::<Vec<_>>(),
                "block_extents": f.block_extents.values(),
                "height": f.height,
                "top_daisy": f.top_daisy.layers().iter().map(|l| l.values().to_vec()).collect::<Vec<_>>(),
                "lateral_residue": to_value(&f.lateral_residue),
                "lateral_axis": f.lateral_axis.map(|a| a + 1),
                "lateral_level": f.lateral_axis.map(|a| f.block_extents.values()[a] + 1),
                "height_bound_holds": height_bound_holds(f),
                "moves": out.trace.len(),
                "points": to_value(&f.to_config()?),
            }))
        }
        Command::Bounds { check_lb, dim, ell_min, ell_max, .. } => {
            if ell_min > ell_max || *ell_min == 0 {
                bail!(eip_core::Error::InvalidArgument(format!("bad range {ell_min}..={ell_max}")));
            }
            let ells: Vec<u64> = (*ell_min..=*ell_max).collect();
            let table = if *check_lb { lower_bound_sweep(*dim, &ells)? } else { converse_sweep(*dim, &ells)? };
            let rows: Vec<Value> = table
                .iter()
                .map(|r| {
                    json!({
                        "d": r.d, "ell": r.ell, "j": r.j, "p": r.p,
                        "theta_family": r.theta_family.to_string(),
                        "theta_daisy": r.theta_daisy.to_string(),
                        "is_minimizer": r.is_minimizer,
                    })
                })
                .collect();
            Output::Rows(rows)
        }
        Command::Oracle { size, list } => {
            let report = eip_bruteforce(to_usize(size.n)?, size.dim)?;
            let mut v = json!({
                "n": report.n,
                "d": report.d,
                "eip": report.eip.to_string(),
                "count": report.count,
                "shapes": report.shapes,
                "disconnected": to_value(&report.disconnected),
            });
            if *list {
                v["minimizers"] = to_value(&report.minimizers);
            }
            Output::Json(v)
        }
        Command::Fluctuation { dim, ell_min, ell_max, ell_step, family } => {
            if *ell_step == 0 || ell_min > ell_max {
                bail!(eip_core::Error::InvalidArgument("bad ell range or step".into()));
            }
            let family: Family = family.parse()?;
            let ells: Vec<u64> = (*ell_min..=*ell_max).step_by(*ell_step as usize).collect();
            let table = fluctuation_scan(*dim, &ells, family)?;
            let rows: Vec<Value> = table
                .iter()
                .map(|r| {
                    json!({
                        "d": r.d, "ell": r.ell, "p": r.p,
                        "n": r.n.to_string(),
                        "symdiff": r.symdiff.to_string(),
                        "exponent_pred": r.exponent_pred.to_string(),
                    })
                })
                .collect();
            Output::Rows(rows)
        }
        Command::Fit { input } => {
            #[derive(Deserialize)]
            struct Pair {
                n: u128,
                symdiff: u128,
            }
            let mut reader = csv::Reader::from_path(input).with_context(|| format!("reading {}", input.display()))?;
            let pairs = reader
                .deserialize::<Pair>()
                .map(|r| r.map(|p| (p.n, p.symdiff)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| eip_core::Error::InvalidArgument(format!("bad fluctuation CSV: {e}")))?;
            Output::Json(to_value(&fit_pairs(&pairs)?))
        }
        Command::Selfcheck { cases, dim } => selfcheck(cli.seed, *cases, *dim)?,
    })
}

/// Random configurations checked against the perimeter identity and the
/// monotonicity of rearrangement.
fn selfcheck(seed: u64, cases: usize, d: usize) -> anyhow::Result<Output> {
    if d < 2 {
        bail!(eip_core::Error::InvalidArgument("selfcheck needs d >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for case in 0..cases {
        let n = rng.gen_range(1..=40);
        let pts: Vec<Vec<i32>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(1..=6)).collect()).collect();
        let c = Config::new(d, &pts)?;
        let theta = edge_perimeter(&c);
        if theta + 2 * bond_count(&c) as u128 != 2 * d as u128 * c.len() as u128 {
            failures.push(json!({ "case": case, "check": "perimeter identity", "config": to_value(&c) }));
        }
        let axis = rng.gen_range(0..d);
        if edge_perimeter(&decreasing_rearrangement(&c, axis)?) > theta {
            failures.push(json!({ "case": case, "check": "rearrangement", "config": to_value(&c) }));
        }
    }
    let v = json!({ "seed": seed, "cases": cases, "d": d, "failures": failures });
    if !failures.is_empty() {
        eprintln!("{v}");
        bail!(eip_core::Error::Invariant(format!("{} selfcheck failures", failures.len())));
    }
    Ok(Output::Json(v))
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render(out: Output, format: Option<Format>) -> anyhow::Result<String> {
    Ok(match (out, format) {
        (Output::Text(t), None) => t,
        (Output::Text(t), Some(Format::Json)) => serde_json::to_string(&t)? + "\n",
        (Output::Json(v), None | Some(Format::Json)) => serde_json::to_string_pretty(&v)? + "\n",
        (Output::Rows(rows), Some(Format::Json)) => serde_json::to_string_pretty(&rows)? + "\n",
        (Output::Rows(rows), None | Some(Format::Csv)) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            if let Some(Value::Object(first)) = rows.first() {
                w.write_record(first.keys())?;
            }
            for row in &rows {
                let Value::Object(map) = row else { unreachable!("rows are objects") };
                w.write_record(map.values().map(csv_cell))?;
            }
            String::from_utf8(w.into_inner()?)?
        }
        (Output::Json(Value::Object(map)), Some(Format::Csv)) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(map.keys())?;
            w.write_record(map.values().map(csv_cell))?;
            String::from_utf8(w.into_inner()?)?
        }
        (_, Some(Format::Csv)) => bail!(eip_core::Error::InvalidArgument("this output has no csv form".into())),
    })
}

fn exit_code(e: &anyhow::Error) -> u8 {
    e.chain().find_map(|c| c.downcast_ref::<eip_core::Error>()).map_or(1, |e| e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = run(&cli).and_then(|out| render(out, cli.format)).and_then(|text| {
        match &cli.output {
            Some(path) => fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
            None => io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
