use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use largeness_core::vdw::DEFAULT_VDW_GUARD;
use serde_json::{json, Value as Json};

use crate::commands::{execute, guard_json, Invocation, Outcome};
use crate::error::{CliError, CliResult};
use crate::fuzz::DEFAULT_SEED;
use crate::io::{default_guard, Loader};

pub const EXIT_USAGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "largeness",
    version,
    about = "Witness search and certificate checking for syndetic, thick, piecewise syndetic, J- and CR-sets",
    after_help = "Exit codes: 0 witness found / check holds, 1 proven negative on a finite universe, \
                  2 negative relative to a window or search bound, 3 usage or input error.\n\
                  LARGENESS_COST_GUARD overrides the default enumeration guards."
)]
pub struct Cli {
    /// Worker threads for the parallel searches (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the JSON run record here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Add wall time to the run record (makes records differ between runs).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
pub struct SetArg {
    /// Set file: {"semigroup": ..., "members": [...]}.
    #[arg(long)]
    pub set: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Finite F with the union of -t + A over t in F covering the universe (or the window's target).
    Syndetic {
        #[command(flatten)]
        set: SetArg,
        #[arg(long, default_value_t = 4)]
        max_card: usize,
        /// Largest shift value on a window (default: the window midpoint).
        #[arg(long)]
        shift_limit: Option<u64>,
    },
    /// x with E + x inside A.
    Thick {
        #[command(flatten)]
        set: SetArg,
        /// Probe set E: a JSON array of elements or {"elements": [...]}.
        #[arg(long)]
        probe: Option<PathBuf>,
        /// Without --probe on a window, E = the first N integers of the window.
        #[arg(long, default_value_t = 3)]
        probe_len: usize,
    },
    /// F and x with E + x inside the union of -t + A over t in F.
    Pws {
        #[command(flatten)]
        set: SetArg,
        #[arg(long, default_value_t = 4)]
        max_card: usize,
        #[arg(long)]
        probe: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        probe_len: usize,
        #[arg(long)]
        shift_limit: Option<u64>,
    },
    /// a and H with a + sum over H of f(n) in A for every sequence f.
    JWitness {
        #[command(flatten)]
        set: SetArg,
        /// {"sequences": [[...], ...], "horizon": m}.
        #[arg(long)]
        sequences: PathBuf,
        /// JSON [lo, hi] bounding a.
        #[arg(long)]
        a_range: Option<String>,
    },
    /// Row set alpha and shift s with s + M_{alpha,j} in A for every column.
    CrWitness {
        #[command(flatten)]
        set: SetArg,
        #[arg(long)]
        matrix: PathBuf,
        /// JSON [lo, hi] bounding s.
        #[arg(long)]
        s_range: Option<String>,
    },
    /// Does every r x n matrix have a witness? Finite semigroups only.
    CrCheck {
        #[command(flatten)]
        set: SetArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        /// Largest number of matrices to enumerate.
        #[arg(long)]
        guard: Option<u128>,
    },
    /// Least r at which cr-check holds.
    CrDegree {
        #[command(flatten)]
        set: SetArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        r_max: usize,
        #[arg(long)]
        guard: Option<u128>,
    },
    /// Arithmetic progression s + d, ..., s + n*d in A from a witness for M_ij = j.
    ExtractAp {
        #[command(flatten)]
        set: SetArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s_range: Option<String>,
    },
    /// Side-by-side join of equal-height matrices.
    Concat {
        #[arg(long, num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Transfer a CR witness from A to its AP-pair set through the lifted matrix.
    Lift {
        #[command(flatten)]
        set: SetArg,
        /// {"semigroup": S, "entries": [[[a, b], ...], ...]}.
        #[arg(long)]
        pair_matrix: PathBuf,
        /// Progression steps L (L + 1 terms).
        #[arg(long)]
        steps: usize,
        /// JSON [lo, hi] for the free element s.
        #[arg(long)]
        s_range: Option<String>,
        /// JSON [lo, hi] for the base witness shift.
        #[arg(long)]
        base_range: Option<String>,
    },
    /// Pairs (a, b) with a, a + b, ..., a + L*b all in A.
    ApPairs {
        #[command(flatten)]
        set: SetArg,
        #[arg(long)]
        steps: usize,
        /// JSON [[a_lo, a_hi], [b_lo, b_hi]].
        #[arg(long = "box")]
        pair_box: Option<String>,
    },
    /// Check a chain certificate: containment, decrease, shift map, CR evidence.
    ChainValidate {
        #[arg(long)]
        cert: PathBuf,
        /// Base set A (default: the first level).
        #[arg(long)]
        set: Option<PathBuf>,
        /// Fill missing shift entries with the least valid level.
        #[arg(long)]
        search_shifts: bool,
        #[arg(long)]
        guard: Option<u128>,
    },
    /// Lift a chain for A to the chain of AP-pair sets and verify it.
    ChainLift {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long = "box")]
        pair_box: Option<String>,
        #[arg(long)]
        search_shifts: bool,
    },
    /// Every c-coloring of [1, N] has a monochromatic k-term progression?
    Vdw {
        #[arg(long)]
        terms: usize,
        #[arg(long)]
        colors: usize,
        #[arg(long)]
        upto: usize,
        #[arg(long)]
        guard: Option<u128>,
        /// Ignore the enumeration guard.
        #[arg(long)]
        force: bool,
    },
    /// Replay a run record and re-check its witness.
    Validate {
        #[arg(long)]
        record: PathBuf,
    },
    /// Seeded self-check campaigns.
    Fuzz {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// all, transfer, witness, chain or translation.
        #[arg(long, default_value = "all")]
        campaign: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Syndetic { .. } => "syndetic",
            Command::Thick { .. } => "thick",
            Command::Pws { .. } => "pws",
            Command::JWitness { .. } => "j-witness",
            Command::CrWitness { .. } => "cr-witness",
            Command::CrCheck { .. } => "cr-check",
            Command::CrDegree { .. } => "cr-degree",
            Command::ExtractAp { .. } => "extract-ap",
            Command::Concat { .. } => "concat",
            Command::Lift { .. } => "lift",
            Command::ApPairs { .. } => "ap-pairs",
            Command::ChainValidate { .. } => "chain-validate",
            Command::ChainLift { .. } => "chain-lift",
            Command::Vdw { .. } => "vdw",
            Command::Validate { .. } => "validate",
            Command::Fuzz { .. } => "fuzz",
        }
    }
}

fn json_arg(v: &Option<String>, flag: &str) -> CliResult<Json> {
    match v {
        None => Ok(Json::Null),
        Some(s) => serde_json::from_str(s).map_err(|e| CliError::Input(format!("--{flag} is not JSON: {e}"))),
    }
}

fn guard(explicit: Option<u128>) -> CliResult<Json> {
    Ok(guard_json(Some(match explicit {
        Some(g) => g,
        None => default_guard()?,
    })))
}

/// Reads the files a command names and records its bounds.
fn invocation(cmd: &Command, loader: &mut Loader) -> CliResult<Invocation> {
    let mut inputs = BTreeMap::new();
    let mut load = |role: &str, path: &Path, loader: &mut Loader| -> CliResult<()> {
        inputs.insert(role.to_string(), loader.load(path)?);
        Ok(())
    };
    let bounds = match cmd {
        Command::Syndetic { set, max_card, shift_limit } => {
            load("set", &set.set, loader)?;
            json!({ "max_card": max_card, "shift_limit": shift_limit })
        }
        Command::Thick { set, probe, probe_len } => {
            load("set", &set.set, loader)?;
            if let Some(p) = probe {
                load("probe", p, loader)?;
            }
            json!({ "probe_len": probe_len })
        }
        Command::Pws { set, max_card, probe, probe_len, shift_limit } => {
            load("set", &set.set, loader)?;
            if let Some(p) = probe {
                load("probe", p, loader)?;
            }
            json!({ "max_card": max_card, "probe_len": probe_len, "shift_limit": shift_limit })
        }
        Command::JWitness { set, sequences, a_range } => {
            load("set", &set.set, loader)?;
            load("sequences", sequences, loader)?;
            json!({ "a_range": json_arg(a_range, "a-range")? })
        }
        Command::CrWitness { set, matrix, s_range } => {
            load("set", &set.set, loader)?;
            load("matrix", matrix, loader)?;
            json!({ "s_range": json_arg(s_range, "s-range")? })
        }
        Command::CrCheck { set, n, r, guard: g } => {
            load("set", &set.set, loader)?;
            json!({ "n": n, "r": r, "guard": guard(*g)? })
        }
        Command::CrDegree { set, n, r_max, guard: g } => {
            load("set", &set.set, loader)?;
            json!({ "n": n, "r_max": r_max, "guard": guard(*g)? })
        }
        Command::ExtractAp { set, n, r, s_range } => {
            load("set", &set.set, loader)?;
            json!({ "n": n, "r": r, "s_range": json_arg(s_range, "s-range")? })
        }
        Command::Concat { inputs: files } => {
            let docs = files.iter().map(|p| loader.load(p)).collect::<CliResult<Vec<_>>>()?;
            inputs.insert("matrices".into(), Json::Array(docs));
            json!({})
        }
        Command::Lift { set, pair_matrix, steps, s_range, base_range } => {
            load("set", &set.set, loader)?;
            load("pair_matrix", pair_matrix, loader)?;
            json!({
                "steps": steps,
                "s_range": json_arg(s_range, "s-range")?,
                "base_range": json_arg(base_range, "base-range")?,
            })
        }
        Command::ApPairs { set, steps, pair_box } => {
            load("set", &set.set, loader)?;
            json!({ "steps": steps, "box": json_arg(pair_box, "box")? })
        }
        Command::ChainValidate { cert, set, search_shifts, guard: g } => {
            load("certificate", cert, loader)?;
            if let Some(s) = set {
                load("set", s, loader)?;
            }
            json!({ "search_shifts": search_shifts, "guard": guard(*g)? })
        }
        Command::ChainLift { cert, steps, pair_box, search_shifts } => {
            load("certificate", cert, loader)?;
            json!({ "steps": steps, "box": json_arg(pair_box, "box")?, "search_shifts": search_shifts })
        }
        Command::Vdw { terms, colors, upto, guard: g, force } => {
            let guard = match (force, g) {
                (true, _) => Json::Null,
                (false, Some(g)) => guard_json(Some(*g)),
                (false, None) => guard_json(Some(match std::env::var_os("LARGENESS_COST_GUARD") {
                    Some(_) => default_guard()?,
                    None => DEFAULT_VDW_GUARD,
                })),
            };
            json!({ "terms": terms, "colors": colors, "upto": upto, "guard": guard })
        }
        Command::Validate { record } => {
            load("record", record, loader)?;
            json!({})
        }
        Command::Fuzz { seed, count, campaign } => json!({ "seed": seed, "count": count, "campaign": campaign }),
    };
    Ok(Invocation { subcommand: cmd.name().to_string(), inputs, bounds })
}

/// The command line with the output-only flags removed.
fn replay_line(args: &[OsString]) -> String {
    const VALUED: &[&str] = &["--workers", "--format", "--out"];
    let mut parts = vec!["largeness".to_string()];
    let mut skip = false;
    for a in args.iter().skip(1) {
        let a = a.to_string_lossy();
        if std::mem::take(&mut skip) {
            continue;
        }
        if VALUED.contains(&a.as_ref()) {
            skip = true;
            continue;
        }
        if a == "--timing" || VALUED.iter().any(|f| a.starts_with(&format!("{f}="))) {
            continue;
        }
        parts.push(a.into_owned());
    }
    shell_words::join(parts)
}

fn record(inv: &Invocation, digest: String, outcome: &Outcome, replay: String, wall: Option<f64>) -> Json {
    let mut rec = json!({
        "subcommand": inv.subcommand,
        "input_digest": digest,
        "inputs": inv.inputs,
        "bounds": inv.bounds,
        "result": outcome.result,
        "validated": outcome.validated,
        "exit_code": outcome.status.exit_code(),
        "replay": replay,
    });
    if let Some(ms) = wall {
        rec["wall_time_ms"] = json!(ms);
    }
    rec
}

fn run_parsed(cli: &Cli, args: &[OsString]) -> CliResult<i32> {
    let workers = match cli.workers {
        Some(0) => return Err(CliError::Input("--workers must be at least 1".into())),
        Some(k) => k,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Input(format!("cannot start {workers} workers: {e}")))?;
    let start = Instant::now();
    let mut loader = Loader::new();
    let inv = invocation(&cli.command, &mut loader)?;
    let outcome = pool.install(|| execute(&inv))?;
    let wall = cli.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    let rec = record(&inv, loader.digest(), &outcome, replay_line(args), wall);
    let mut text = serde_json::to_string_pretty(&rec).expect("records serialize");
    text.push('\n');
    if let Some(path) = &cli.out {
        std::fs::write(path, &text).map_err(|source| CliError::Io { path: path.clone(), source })?;
    }
    let mut stdout = std::io::stdout().lock();
    let written = match cli.format {
        Format::Json if cli.out.is_none() => stdout.write_all(text.as_bytes()),
        Format::Json => Ok(()),
        Format::Text => {
            let validated = match outcome.validated {
                Some(true) => "witness re-validated",
                Some(false) => "witness FAILED re-validation",
                None => "nothing to re-validate",
            };
            writeln!(stdout, "{}\n{validated}; exit {}", outcome.summary, outcome.status.exit_code())
        }
    };
    written.map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })?;
    Ok(if outcome.validated == Some(false) { EXIT_USAGE } else { outcome.status.exit_code() })
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run(args: Vec<OsString>) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_parsed(&cli, &args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
