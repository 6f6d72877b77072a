//! `rom`: robustness of magic from the command line.
//!
//! Exit status is 0 on success, 1 when a computation fails and 2 on bad
//! arguments (including malformed state or gate specs).

mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use magic_rom::bounds::{is_magic_witnessed, product_lower_bound, st_norm};
use magic_rom::cache::{load_basis, save_basis, BasisStore};
use magic_rom::robustness::{rom, rom_bracket, BasisMatrix};
use magic_rom::sampler::{parse_circuit, simulate, Estimate, EstimatorConfig};
use magic_rom::stabilizer::StabilizerEnumeration;
use magic_rom::state::{phase_family, StateSpec};
use magic_rom::synthesis::{
    classification_table, clifford_equivalent, t_count_lower_bound, SearchOutcome, DEFAULT_SEARCH_BUDGET,
};
use magic_rom::{DensityOperator, Error, PhasePolynomialGate};

#[derive(Parser)]
#[command(name = "rom", version, about = "Robustness of magic for multiqubit states")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Basis cache directory (default: $ROM_CACHE_DIR or ~/.cache/magic-rom).
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
    /// Assemble bases in memory only.
    #[arg(long, global = true, conflicts_with = "cache_dir")]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble the stabilizer basis for n qubits and write it to disk.
    GenBasis {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
        n: u8,
        /// Output file (default: the cache directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Robustness of magic of a state.
    Rom {
        #[arg(long)]
        state: String,
        /// Basis file from `gen-basis`.
        #[arg(long)]
        basis: Option<PathBuf>,
        /// Print the optimal pseudomixture and the dual certificate.
        #[arg(long)]
        certificate: bool,
    },
    /// St-norm lower bounds, optionally for several copies.
    Bound {
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        copies: u64,
    },
    /// Lower and upper bounds on R(|H⟩^⊗t).
    Bracket {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        hcopies: u64,
        /// A certified lower bound from elsewhere.
        #[arg(long)]
        known_lower: Option<f64>,
    },
    /// Estimate a Pauli expectation value of a Clifford+T circuit.
    Simulate {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// T gates per |H⟩^⊗m resource block.
        #[arg(long, default_value_t = 1)]
        block_size: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// One CSV header and row.
        #[arg(long, conflicts_with = "json")]
        csv: bool,
    },
    /// T-count lower bound of a diagonal gate.
    SynthBound {
        #[arg(long)]
        gate: String,
        /// T count of a known synthesis, to compare against the bound.
        #[arg(long)]
        known_t: Option<usize>,
    },
    /// Search for a Clifford mapping one resource state to another.
    CliffordEquiv {
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
        budget: usize,
    },
    /// Group the diagonal gates on n qubits by robustness.
    Classify {
        #[arg(long, value_parser = clap::value_parser!(u8).range(3..=4))]
        n: u8,
    },
    /// Robustness of (|0…0⟩ + … + e^{iθ}|1…1⟩) over θ ∈ [0, π].
    PolarPlot {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        m: u8,
        #[arg(long, default_value_t = 90, value_parser = clap::value_parser!(u64).range(1..))]
        steps: u64,
        #[arg(long, value_enum, default_value_t = PlotFormat::Csv)]
        out: PlotFormat,
        /// Write to a file instead of stdout.
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotFormat {
    Csv,
    Svg,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(p) => Failure::Usage(p.to_string()),
            other => Failure::Domain(other.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn store(cli: &Cli) -> BasisStore {
    let s = if cli.no_cache {
        BasisStore::in_memory()
    } else if let Some(dir) = &cli.cache_dir {
        BasisStore::with_dir(dir)
    } else {
        BasisStore::from_env()
    };
    s.allow_heavy(true)
}

fn parse_state(text: &str) -> Result<(StateSpec, DensityOperator), Failure> {
    let spec = StateSpec::parse(text).map_err(|e| Failure::Usage(format!("bad state spec {text:?}: {e}")))?;
    let rho = spec.to_density()?;
    Ok((spec, rho))
}

fn parse_gate(text: &str) -> Result<PhasePolynomialGate, Failure> {
    let (spec, _) = parse_state(text)?;
    spec.as_gate().cloned().ok_or_else(|| Failure::Usage(format!("{text:?} is not a diagonal gate")))
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values always serialise"));
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialise")
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::GenBasis { n, out } => gen_basis(cli, *n as usize, out.as_deref()),
        Command::Rom { state, basis, certificate } => rom_cmd(cli, state, basis.as_deref(), *certificate),
        Command::Bound { state, copies } => bound(cli, state, *copies as usize),
        Command::Bracket { hcopies, known_lower } => bracket(cli, *hcopies as usize, *known_lower),
        Command::Simulate { circuit, delta, epsilon, seed, block_size, workers, csv } => {
            let cfg = EstimatorConfig {
                delta: *delta,
                epsilon: *epsilon,
                seed: *seed,
                block_size: *block_size,
                workers: *workers,
            };
            simulate_cmd(cli, circuit, &cfg, *csv)
        }
        Command::SynthBound { gate, known_t } => synth_bound(cli, gate, *known_t),
        Command::CliffordEquiv { u, v, budget } => clifford_equiv(cli, u, v, *budget),
        Command::Classify { n } => classify(cli, *n as usize),
        Command::PolarPlot { m, steps, out, file } => polar_plot(cli, *m as usize, *steps as usize, *out, file.as_deref()),
    }
}

fn gen_basis(cli: &Cli, n: usize, out: Option<&Path>) -> CmdResult {
    let path = match out {
        Some(p) => p.to_path_buf(),
        None => store(cli)
            .path_for(n)
            .ok_or_else(|| Failure::Usage("no cache directory; pass --out".into()))?,
    };
    let basis = BasisMatrix::assemble_heavy(n, u64::MAX)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Domain(format!("cannot create {}: {e}", dir.display())))?;
    }
    save_basis(&basis, &path)?;
    let bytes = std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0);
    if cli.json {
        print_json(&json!({
            "n": n,
            "path": path.display().to_string(),
            "columns": basis.num_cols(),
            "nonzeros": basis.nnz(),
            "bytes": bytes,
        }));
    } else {
        println!("wrote {} ({} columns, {} nonzeros, {} bytes)", path.display(), basis.num_cols(), basis.nnz(), bytes);
    }
    Ok(())
}

fn rom_cmd(cli: &Cli, state: &str, basis_path: Option<&Path>, certificate: bool) -> CmdResult {
    let (_, rho) = parse_state(state)?;
    let n = rho.num_qubits();
    let basis: Arc<BasisMatrix> = match basis_path {
        Some(p) => {
            let b = load_basis(p)?;
            if b.num_qubits() != n {
                return Err(Failure::Domain(format!(
                    "basis in {} is for {} qubits, state has {n}",
                    p.display(),
                    b.num_qubits()
                )));
            }
            Arc::new(b)
        }
        None => store(cli).get(n)?,
    };
    let r = rom(&rho, &basis)?;
    if cli.json {
        let mut v = json!({
            "state": state,
            "n": n,
            "value": r.value,
            "status": to_json(&r.status),
            "dual_value": r.dual_value,
            "gap": r.gap,
        });
        if certificate {
            let e = StabilizerEnumeration::new(n)?;
            let terms = r
                .mixture
                .terms()
                .iter()
                .map(|&(i, x)| {
                    let gens = e.generators(i).map(|g| g.iter().map(|p| p.to_string()).collect::<Vec<_>>())?;
                    Ok(json!({ "index": i, "coefficient": x, "generators": gens }))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            v["mixture"] = Value::Array(terms);
            v["dual"] = to_json(&r.dual);
            v["primal_residual"] = json!(r.primal_residual);
            v["dual_violation"] = json!(r.dual_violation);
            v["iterations"] = json!(r.iterations);
        }
        print_json(&v);
        return Ok(());
    }
    println!("{:.6}", r.value);
    if certificate {
        println!("status          {}", to_json(&r.status).as_str().unwrap_or("?"));
        println!("dual bound      {:.10}", r.dual_value);
        println!("gap             {:.3e}", r.gap);
        println!("primal residual {:.3e}", r.primal_residual);
        println!("dual violation  {:.3e}", r.dual_violation);
        println!("iterations      {}", r.iterations);
        println!("pseudomixture   {} stabilizer states", r.mixture.terms().len());
        let e = StabilizerEnumeration::new(n)?;
        let mut terms = r.mixture.terms().to_vec();
        terms.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
        for (i, x) in terms {
            let gens: Vec<String> = e.generators(i)?.iter().map(|p| p.to_string()).collect();
            println!("  {x:+.8}  #{i:<8} <{}>", gens.join(", "));
        }
    }
    Ok(())
}

fn bound(cli: &Cli, state: &str, copies: usize) -> CmdResult {
    let (_, rho) = parse_state(state)?;
    let d = st_norm(&rho)?;
    let b = product_lower_bound(&rho, copies)?;
    let witnessed = is_magic_witnessed(&rho)?;
    if cli.json {
        print_json(&json!({
            "state": state,
            "n": d.n,
            "st_norm": d.value,
            "copies": copies,
            "lower_bound": b.tighter,
            "plain_bound": b.plain,
            "witnessed": witnessed,
        }));
    } else {
        println!("st-norm D       {:.6}", d.value);
        println!("lower bound     {:.6}  ({copies} cop{})", b.tighter, if copies == 1 { "y" } else { "ies" });
        println!("plain bound     {:.6}", b.plain);
        println!("magic witnessed {}", if witnessed { "yes" } else { "no" });
    }
    Ok(())
}

fn bracket(cli: &Cli, t: usize, known_lower: Option<f64>) -> CmdResult {
    let b = rom_bracket(t, known_lower)?;
    if cli.json {
        print_json(&to_json(&b));
    } else {
        let split: Vec<String> = b.split.iter().map(|k| k.to_string()).collect();
        println!("t               {}", b.t);
        println!("lower           {:.6}", b.lower);
        println!("upper           {:.6}", b.upper);
        println!("st-norm lower   {:.6}", b.st_lower);
        println!("split           {}", split.join("+"));
    }
    Ok(())
}

fn simulate_cmd(cli: &Cli, path: &Path, cfg: &EstimatorConfig, csv: bool) -> CmdResult {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Domain(format!("cannot read {}: {e}", path.display())))?;
    let circuit = parse_circuit(&text)?;
    let est: Estimate = simulate(&circuit, &store(cli), cfg)?;
    if cli.json {
        print_json(&to_json(&est));
    } else if csv {
        println!("{}", Estimate::CSV_HEADER);
        println!("{}", est.csv_row());
    } else {
        println!("estimate  {:.6}", est.estimate);
        println!("l1        {:.6}", est.l1);
        println!("samples   {}", est.samples);
        println!("delta     {}", est.delta);
        println!("epsilon   {}", est.epsilon);
        println!("seed      {}", est.seed);
        println!("workers   {}", est.workers);
        println!("wall time {:.3} s", est.wall_time_secs);
    }
    Ok(())
}

fn synth_bound(cli: &Cli, gate: &str, known_t: Option<usize>) -> CmdResult {
    let g = parse_gate(gate)?;
    let v = t_count_lower_bound(&g, known_t, &store(cli))?;
    if cli.json {
        print_json(&to_json(&v));
        return Ok(());
    }
    println!("gate      {}", v.gate);
    println!("R         {:.6}", v.rom_value);
    if v.lower_t_exact {
        println!("T count   >= {}", v.lower_t);
    } else {
        println!("T count   >= {} (R(H^t) bracket unresolved up to t = {})", v.lower_t, v.upper_t);
    }
    if let Some(k) = v.known_t {
        println!("known     {k}");
        println!("verdict   {}", v.verdict);
    }
    Ok(())
}

/// Pads two gate resource states onto a common register; other states must
/// already agree in size.
fn resource_pair(u: &str, v: &str) -> Result<(DensityOperator, DensityOperator), Failure> {
    let (su, ru) = parse_state(u)?;
    let (sv, rv) = parse_state(v)?;
    if let (Some(a), Some(b)) = (su.as_gate(), sv.as_gate()) {
        let n = a.num_qubits().max(b.num_qubits());
        let pad = |g: &PhasePolynomialGate| g.embed(n, &(0..g.num_qubits()).collect::<Vec<_>>());
        return Ok((pad(a)?.resource_state()?, pad(b)?.resource_state()?));
    }
    Ok((ru, rv))
}

fn clifford_equiv(cli: &Cli, u: &str, v: &str, budget: usize) -> CmdResult {
    let (ru, rv) = resource_pair(u, v)?;
    let outcome = clifford_equivalent(&ru, &rv, budget)?;
    if cli.json {
        let mut out = to_json(&outcome);
        out["u"] = json!(u);
        out["v"] = json!(v);
        print_json(&out);
        return Ok(());
    }
    match outcome {
        SearchOutcome::Found { word } => println!("found: {word}"),
        SearchOutcome::Disproved { reason } => println!("disproved: {reason}"),
        SearchOutcome::NotFound { explored } => println!("not found after {explored} states"),
    }
    Ok(())
}

fn classify(cli: &Cli, n: usize) -> CmdResult {
    let rows = classification_table(n, &store(cli))?;
    if cli.json {
        print_json(&to_json(&rows));
        return Ok(());
    }
    println!("{:>10}  {:>6}  gates", "R", "T cost");
    for r in rows {
        let cost = r.t_cost.map_or("-".to_string(), |t| t.to_string());
        let names: Vec<String> = r.gates.iter().map(|g| g.to_string()).collect();
        println!("{:>10.6}  {:>6}  {}", r.value, cost, names.join(" "));
    }
    Ok(())
}

fn polar_plot(cli: &Cli, m: usize, steps: usize, format: PlotFormat, file: Option<&Path>) -> CmdResult {
    let st = store(cli);
    let basis = st.get(m)?;
    let mut points = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let theta = std::f64::consts::PI * k as f64 / steps as f64;
        points.push((theta, rom(&phase_family(m, theta)?, &basis)?.value));
    }
    let body = if cli.json {
        let pts: Vec<Value> = points.iter().map(|(t, r)| json!({ "theta": t, "rom": r })).collect();
        serde_json::to_string_pretty(&json!({ "m": m, "points": pts })).expect("JSON values always serialise") + "\n"
    } else {
        match format {
            PlotFormat::Csv => plot::csv(&points),
            PlotFormat::Svg => plot::svg(m, &points),
        }
    };
    match file {
        Some(p) => std::fs::write(p, body).map_err(|e| Failure::Domain(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
