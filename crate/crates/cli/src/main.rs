use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use dqc_core::encoding::QuditEncoding;
use dqc_core::qubit::{build_dgcz, build_dgms, build_fanout, GczStrategy, GmsSpec, GmsStrategy, Partition};
use dqc_core::qudit::build_qudit_gcz;
use dqc_core::resources::{fanout_gain, gcz_costs, GczConfig};
use dqc_core::sim::{simulate, SimConfig, DEFAULT_MAX_DIM};
use dqc_core::verify::{
    basis_inputs, logical_inputs, random_inputs, verify, OracleKind, OracleSpec, VerifyOptions, DEFAULT_THRESHOLD,
};
use dqc_core::{tally, Angle, DistCircuit, Gate, MixedRegister, NodeLayout};

/// Environment variable overriding the simulator's register-size cap.
const MAX_DIM_VAR: &str = "DQC_MAX_DIM";

#[derive(Parser)]
#[command(name = "dqc", version, about = "Compile, simulate and verify distributed global gates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a distributed circuit and print its resource tally.
    Compile(CompileArgs),
    /// Run a circuit on one basis input and print every branch.
    Simulate(SimulateArgs),
    /// Check a circuit against an oracle on every measurement branch.
    Verify(VerifyArgs),
    /// Closed-form GCZ resource counts as CSV.
    Estimate(EstimateArgs),
    /// Run the gate-algebra identity suite.
    Identities,
}

#[derive(Clone, Copy, ValueEnum)]
enum CompileGate {
    Gms,
    Gcz,
    Fanout,
}

#[derive(clap::Args)]
struct CompileArgs {
    #[arg(long, value_enum)]
    gate: CompileGate,
    #[arg(long)]
    n: usize,
    /// Rotation angle, e.g. `pi/2` or `0.7`.
    #[arg(long, default_value = "pi/2")]
    theta: Angle,
    /// Number of nodes (default: one qubit per node).
    #[arg(long)]
    nodes: Option<usize>,
    /// Qubits per node (default: n / nodes).
    #[arg(long)]
    per_node: Option<usize>,
    /// Communication slots per node (default: enough for the strategy).
    #[arg(long)]
    slots: Option<u32>,
    /// pairwise, pairwise_conditional, fanout or teleport_all.
    #[arg(long, default_value = "fanout")]
    strategy: String,
    /// Pack qubit pairs into ququarts (GCZ only).
    #[arg(long)]
    qudit: bool,
    /// Gate applied to each fan-out target: X, Z, or RZ with --theta.
    #[arg(long, default_value = "X")]
    target_gate: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SimulateArgs {
    #[arg(long)]
    circuit: PathBuf,
    /// Logical basis input as digits, e.g. `0110` or `0,3`.
    #[arg(long)]
    basis: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Gms,
    Gcz,
    Csum4,
    Csum4Multi,
    Cz4Pow,
    Fanout,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long, value_enum)]
    oracle: OracleArg,
    #[arg(long, default_value = "pi/2")]
    theta: Angle,
    #[arg(long, default_value_t = 2)]
    power: u32,
    #[arg(long, default_value = "X")]
    target_gate: String,
    /// `basis`, `random:N`, `basis+random:N`, or `file:PATH` (JSON list of digit lists).
    #[arg(long, default_value = "basis")]
    inputs: String,
    #[arg(long, default_value_t = 20_240_917)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Disable parallel evaluation of inputs.
    #[arg(long)]
    serial: bool,
}

#[derive(clap::Args)]
struct EstimateArgs {
    /// Qubit-count range `lo..hi` (inclusive) or a single value.
    #[arg(long)]
    n: String,
    /// Node count; every n in range divisible by it is reported.
    #[arg(long, conflicts_with = "per_node")]
    nodes: Option<usize>,
    /// Qubits per node; every n in range divisible by it is reported.
    #[arg(long)]
    per_node: Option<usize>,
    /// Qubits per qudit (default: all qubits on a node).
    #[arg(long)]
    per_qudit: Option<usize>,
    /// One or more ε values, comma separated.
    #[arg(long, default_value = "1", value_delimiter = ',')]
    epsilon: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure kinds mapped to exit codes.
enum Outcome {
    Ok,
    VerificationFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(1),
        // A closed pipe (`dqc ... | head`) is not an error.
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Compile(a) => compile(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Estimate(a) => estimate(a),
        Command::Identities => identities(),
    }
}

fn emit(text: &str) -> io::Result<()> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()
}

fn sim_config() -> Result<SimConfig> {
    let max_dim = match std::env::var(MAX_DIM_VAR) {
        Ok(v) => v.trim().parse().with_context(|| format!("{MAX_DIM_VAR}={v} is not a positive integer"))?,
        Err(_) => DEFAULT_MAX_DIM,
    };
    if max_dim == 0 {
        bail!("{MAX_DIM_VAR} must be positive");
    }
    Ok(SimConfig { max_dim, ..SimConfig::default() })
}

fn labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("q{i}")).collect()
}

fn parse_target_gate(name: &str, theta: Angle) -> Result<Gate> {
    let g = match name.to_ascii_uppercase().as_str() {
        "RZ" => Gate::Rz(theta),
        upper => Gate::from_name(upper, &[])?,
    };
    if g.arity() != [2] {
        bail!("target gate `{name}` must act on one qubit");
    }
    Ok(g)
}

fn node_shape(n: usize, nodes: Option<usize>, per_node: Option<usize>) -> Result<(usize, usize)> {
    let (d, k) = match (nodes, per_node) {
        (Some(d), Some(k)) => (d, k),
        (Some(d), None) if d > 0 && n.is_multiple_of(d) => (d, n / d),
        (None, Some(k)) if k > 0 && n.is_multiple_of(k) => (n / k, k),
        (None, None) => (n, 1),
        _ => bail!("{n} qubits cannot be split evenly as requested"),
    };
    if d == 0 || d * k != n {
        bail!("{d} nodes × {k} qubits does not give n = {n}");
    }
    Ok((d, k))
}

fn compile(a: CompileArgs) -> Result<Outcome> {
    let ls = labels(a.n);
    let (d, k) = node_shape(a.n, a.nodes, a.per_node)?;
    let circuit = match a.gate {
        CompileGate::Gms => {
            if a.qudit {
                bail!("--qudit is only supported for GCZ");
            }
            let strategy: GmsStrategy = a.strategy.parse().map_err(|e| anyhow!("{e}"))?;
            let layout = NodeLayout::uniform(&ls, d, k, a.slots.unwrap_or(2));
            build_dgms(&GmsSpec::new(ls, a.theta)?, &layout, strategy)?
        }
        CompileGate::Gcz if a.qudit => {
            if k != 2 {
                bail!("the qudit strategy needs exactly two qubits per node, got {k}");
            }
            let names: Vec<String> = (1..=d).map(|i| format!("Q{i}")).collect();
            let enc = QuditEncoding::consecutive(&ls, &names)?;
            build_qudit_gcz(a.n, &Partition::uniform(&ls, d, k, a.slots.unwrap_or(2)), &enc)?
        }
        CompileGate::Gcz => {
            let strategy: GczStrategy = a.strategy.parse().map_err(|e| anyhow!("{e}"))?;
            let slots = a.slots.unwrap_or(k as u32 + 1);
            build_dgcz(&ls, &Partition::uniform(&ls, d, k, slots), strategy)?
        }
        CompileGate::Fanout => {
            if a.qudit {
                bail!("--qudit is only supported for GCZ");
            }
            let gate = parse_target_gate(&a.target_gate, a.theta)?;
            let layout = NodeLayout::uniform(&ls, d, k, a.slots.unwrap_or(2));
            let targets: Vec<(String, Gate)> = ls[1..].iter().map(|t| (t.clone(), gate.clone())).collect();
            build_fanout(&ls[0], &targets, &layout)?
        }
    };
    let json = circuit.to_json();
    if let Some(path) = &a.out { fs::write(path, &json).with_context(|| format!("writing {}", path.display()))? }
    let t = tally(&circuit);
    let mut text = format!("tally: {t}\nmessages: {} ({} bits)\ntime: {}\n", t.messages, t.message_bits, t.time_units);
    if a.out.is_none() {
        text.push_str(&json);
        text.push('\n');
    }
    emit(&text)?;
    Ok(Outcome::Ok)
}

fn load(path: &PathBuf) -> Result<DistCircuit> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let c = DistCircuit::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    let violations = dqc_core::validate(&c);
    if let Some(v) = violations.first() {
        bail!("{} is not a valid circuit: {v}", path.display());
    }
    Ok(c)
}

fn parse_digits(s: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = if s.contains(',') || s.contains(' ') {
        s.split([',', ' ']).filter(|p| !p.is_empty()).collect()
    } else {
        s.split("").filter(|p| !p.is_empty()).collect()
    };
    parts.iter().map(|p| p.parse::<usize>().with_context(|| format!("`{p}` in `{s}` is not a digit"))).collect()
}

fn basis_state(labels: &[String], dims: &[usize], digits: &[usize]) -> Result<MixedRegister> {
    if digits.len() != labels.len() {
        bail!("expected {} basis digits for {:?}, got {}", labels.len(), labels, digits.len());
    }
    Ok(MixedRegister::basis(labels.to_vec(), dims.to_vec(), digits)?)
}

fn simulate_cmd(a: SimulateArgs) -> Result<Outcome> {
    let c = load(&a.circuit)?;
    let (labels, dims) = logical_inputs(&c);
    let mut input = basis_state(&labels, &dims, &parse_digits(&a.basis)?)?;
    if let Some(enc) = &c.encoding {
        input = enc.encode(&input)?;
    }
    let branches = simulate(&c, &input, &sim_config()?)?;
    let mut out = Vec::new();
    for b in &branches {
        let state = match &c.encoding {
            Some(enc) => enc.decode(&b.state)?,
            None => b.state.clone(),
        };
        let amps: Vec<serde_json::Value> = state
            .amps()
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > 1e-12)
            .map(|(i, z)| serde_json::json!({ "index": i, "re": z.re, "im": z.im }))
            .collect();
        out.push(serde_json::json!({
            "outcomes": b.outcomes.iter().map(|(s, v)| serde_json::json!([s, v])).collect::<Vec<_>>(),
            "probability": b.probability,
            "represented": b.represented,
            "labels": state.labels(),
            "dims": state.dims(),
            "amplitudes": amps,
        }));
    }
    emit(&format!("{}\n", serde_json::to_string_pretty(&serde_json::Value::Array(out))?))?;
    Ok(Outcome::Ok)
}

fn oracle_for(a: &VerifyArgs, labels: &[String]) -> Result<OracleSpec> {
    let kind = match a.oracle {
        OracleArg::Gms => OracleKind::Gms(a.theta),
        OracleArg::Gcz => OracleKind::Gcz,
        OracleArg::Csum4 => OracleKind::Csum4,
        OracleArg::Csum4Multi => OracleKind::Csum4Multi,
        OracleArg::Cz4Pow => OracleKind::Cz4Pow(a.power),
        OracleArg::Fanout => OracleKind::FanOut(parse_target_gate(&a.target_gate, a.theta)?),
    };
    Ok(OracleSpec::new(kind, labels.iter().cloned())?)
}

fn verify_inputs(spec: &str, labels: &[String], dims: &[usize], seed: u64) -> Result<Vec<MixedRegister>> {
    let random = |n: &str| -> Result<Vec<MixedRegister>> {
        let count: usize = n.parse().with_context(|| format!("`{n}` is not a count"))?;
        Ok(random_inputs(labels, dims, count, seed))
    };
    if spec == "basis" {
        Ok(basis_inputs(labels, dims))
    } else if let Some(n) = spec.strip_prefix("basis+random:") {
        let mut v = basis_inputs(labels, dims);
        v.extend(random(n)?);
        Ok(v)
    } else if let Some(n) = spec.strip_prefix("random:") {
        random(n)
    } else if let Some(path) = spec.strip_prefix("file:") {
        let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        let rows: Vec<Vec<usize>> = serde_json::from_str(&text).with_context(|| format!("parsing {path}"))?;
        rows.iter().map(|d| basis_state(labels, dims, d)).collect()
    } else {
        bail!("unknown input set `{spec}`")
    }
}

fn verify_cmd(a: VerifyArgs) -> Result<Outcome> {
    let c = load(&a.circuit)?;
    let (labels, dims) = logical_inputs(&c);
    let oracle = oracle_for(&a, &labels)?;
    let inputs = verify_inputs(&a.inputs, &labels, &dims, a.seed)?;
    if inputs.is_empty() {
        bail!("no inputs to check");
    }
    let seed = a.inputs.contains("random:").then_some(a.seed);
    let opts = VerifyOptions { threshold: a.threshold, sim: sim_config()?, seed, parallel: !a.serial };
    let report = verify(&c, &oracle, &inputs, &opts)?;
    emit(&format!("{}\n", report.to_json()))?;
    Ok(if report.passed { Outcome::Ok } else { Outcome::VerificationFailed })
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (lo.trim().parse()?, hi.trim_start_matches('=').trim().parse()?),
        None => {
            let v = s.trim().parse()?;
            (v, v)
        }
    };
    if lo == 0 || lo > hi {
        bail!("invalid range `{s}`");
    }
    Ok((lo, hi))
}

fn arities(m: &std::collections::BTreeMap<usize, u64>) -> String {
    m.iter().map(|(a, c)| format!("{a}:{c}")).collect::<Vec<_>>().join(";")
}

fn estimate(a: EstimateArgs) -> Result<Outcome> {
    let (lo, hi) = parse_range(&a.n).with_context(|| format!("bad --n `{}`", a.n))?;
    if a.nodes.is_none() && a.per_node.is_none() {
        bail!("one of --nodes or --per-node is required");
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "n",
        "nodes",
        "per_node",
        "per_qudit",
        "epsilon",
        "pairwise_ep",
        "fanout_ghz",
        "fanout_ghz_arities",
        "fanout_ep",
        "qudit_ghz",
        "qudit_ghz_arities",
        "qudit_ep",
        "qudit_dim",
        "time_pairwise",
        "time_fanout",
        "time_qudit",
        "fanout_gain",
    ])?;
    let mut rows = 0;
    for n in lo..=hi {
        let (d, k) = match (a.nodes, a.per_node) {
            (Some(d), _) if d > 0 && n % d == 0 => (d, n / d),
            (_, Some(k)) if k > 0 && n % k == 0 => (n / k, k),
            _ => continue,
        };
        let m = a.per_qudit.unwrap_or(k);
        for &eps in &a.epsilon {
            let cfg = GczConfig { n, nodes: d, per_node: k, per_qudit: m, epsilon: eps };
            let r = gcz_costs(&cfg)?;
            w.write_record([
                n.to_string(),
                d.to_string(),
                k.to_string(),
                m.to_string(),
                eps.to_string(),
                r.pairwise_ep.to_string(),
                r.fanout_ghz.to_string(),
                arities(&r.fanout_ghz_arities),
                r.fanout_ep.to_string(),
                r.qudit_ghz.to_string(),
                arities(&r.qudit_ghz_arities),
                r.qudit_ep.to_string(),
                r.qudit_dim.to_string(),
                r.time_pairwise.to_string(),
                r.time_fanout.to_string(),
                r.time_qudit.to_string(),
                fanout_gain(n, eps).to_string(),
            ])?;
            rows += 1;
        }
    }
    if rows == 0 {
        bail!("no n in {lo}..={hi} fits the requested node shape");
    }
    let bytes = w.into_inner().map_err(|e| anyhow!("{e}"))?;
    match a.out {
        Some(path) => fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?,
        None => emit(&String::from_utf8(bytes)?)?,
    }
    Ok(Outcome::Ok)
}

fn identities() -> Result<Outcome> {
    let checks = dqc_core::identities::run_all();
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:>12}  {:>9}  result", "identity", "deviation", "tolerance");
    for c in &checks {
        let _ = writeln!(
            out,
            "{:<width$}  {:>12.3e}  {:>9.0e}  {}",
            c.name,
            c.max_deviation,
            c.tolerance,
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
    emit(&out)?;
    Ok(if checks.iter().all(|c| c.passed) { Outcome::Ok } else { Outcome::VerificationFailed })
}
