//! `draftgame`: solve, verify, generate, reduce, bench and play.
//!
//! Exit codes: 0 ok (or YES under `--threshold`), 1 NO or a failed suite,
//! 2 any error.

mod play;
mod solve;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use draftgame::io::{format_score, parse_position, serialize_instance};
use draftgame::oracle::{game_sum, random_instance, random_otp_instance, DEFAULT_MAX_EFF};
use draftgame::reduction::{build_draft_instance, normalize_qbf, parse_qdimacs, to_qdimacs};
use draftgame::suites::{run_suite, Suite};
use draftgame::{Player, Position, Pruning, SolveOptions};

use solve::{solve_dispatch, Method};

#[derive(Parser)]
#[command(name = "draftgame", version, about = "Exact solvers for the draft game")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Optimal score and move of an instance or saved position.
    Solve(SolveArgs),
    /// Run the seeded self-check suites.
    Verify(VerifyArgs),
    /// Write a random instance.
    Generate(GenerateArgs),
    /// Build the draft instance of a QBF game given in QDIMACS.
    Reduce(ReduceArgs),
    /// Node counts and timings with each pruning rule switched off.
    Bench(BenchArgs),
    /// Draft against the engine on the terminal.
    Play(PlayArgs),
}

#[derive(Args)]
struct SearchFlags {
    /// Plain alpha-beta without the dominance filters, and no OTP dispatch.
    #[arg(long)]
    no_prune: bool,
    /// Give up after this many search nodes.
    #[arg(long, value_name = "N")]
    budget: Option<u64>,
}

impl SearchFlags {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            pruning: if self.no_prune { Pruning::NONE } else { Pruning::ALL },
            node_budget: self.budget,
            ..SolveOptions::default()
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Instance or position JSON.
    path: PathBuf,
    /// Decide `score >= S`; without a value, use the file's threshold.
    #[arg(long, value_name = "S", num_args = 0..=1, default_missing_value = "")]
    threshold: Option<String>,
    /// Print an optimal line to the end of the draft.
    #[arg(long)]
    pv: bool,
    #[command(flatten)]
    search: SearchFlags,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite to run (repeatable); all suites by default.
    #[arg(long)]
    suite: Vec<Suite>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Random instances per suite.
    #[arg(long, default_value_t = 200)]
    cases: usize,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, short = 'n', default_value_t = 6)]
    agents: usize,
    #[arg(long, short = 't', default_value_t = 2)]
    tasks: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_EFF)]
    max_eff: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// One nonzero efficiency per agent.
    #[arg(long)]
    otp: bool,
    /// Sum of this many copies of the generated game.
    #[arg(long, default_value_t = 1)]
    copies: usize,
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    /// QDIMACS file with a strict exists/forall prefix.
    path: PathBuf,
    /// Drop pure literals and fix polarities first.
    #[arg(long)]
    normalize: bool,
    /// Instance output; the naming map goes next to it as `<stem>.names.json`.
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
    /// Explicit path for the naming map.
    #[arg(long)]
    names: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    path: PathBuf,
    /// Timing repetitions; the fastest run is reported.
    #[arg(long, default_value_t = 3)]
    repeat: usize,
    #[arg(long, value_name = "N")]
    budget: Option<u64>,
}

#[derive(Args)]
struct PlayArgs {
    /// Instance or position JSON.
    path: PathBuf,
    /// Side the human plays.
    #[arg(long = "as", default_value = "alice")]
    human: Player,
    /// Where `quit` saves the position.
    #[arg(long, default_value = "draftgame-save.json")]
    save: PathBuf,
    #[arg(long, value_name = "N")]
    budget: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let fmt = cli.format;
    match cli.cmd {
        Cmd::Solve(a) => cmd_solve(a, fmt),
        Cmd::Verify(a) => cmd_verify(a, fmt),
        Cmd::Generate(a) => cmd_generate(a, fmt),
        Cmd::Reduce(a) => cmd_reduce(a, fmt),
        Cmd::Bench(a) => cmd_bench(a, fmt),
        Cmd::Play(a) => {
            let pos = read_position(&a.path)?;
            let opts = SolveOptions {
                node_budget: a.budget,
                ..SolveOptions::default()
            };
            let stdin = io::stdin();
            play::run(pos, a.human, &opts, &a.save, &mut stdin.lock(), &mut io::stdout())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn read_position(path: &Path) -> Result<Position> {
    let text = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    parse_position(&text).with_context(|| format!("parsing {}", path.display()))
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).unwrap());
}

/// Reads a threshold in the instance's original units and rescales it.
fn scaled_threshold(text: &str, scale_pow10: u32) -> Result<BigInt> {
    let text = text.trim();
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    let k = scale_pow10 as usize;
    if frac.len() > k {
        bail!("threshold {text} has more decimals than the instance");
    }
    let digits = format!("{int}{frac:0<k$}");
    digits
        .parse::<BigInt>()
        .with_context(|| format!("threshold {text:?} is not a number"))
}

fn cmd_solve(a: SolveArgs, fmt: Format) -> Result<ExitCode> {
    let pos = read_position(&a.path)?;
    let inst = pos.instance();
    let threshold = match a.threshold.as_deref() {
        None => None,
        Some("") => Some(
            inst.threshold
                .clone()
                .context("--threshold without a value needs a threshold in the file")?,
        ),
        Some(s) => Some(scaled_threshold(s, inst.scale_pow10)?),
    };
    let mut opts = a.search.options();
    opts.want_pv = a.pv;
    let out = solve_dispatch(&pos, &opts, !a.search.no_prune)?;
    let show = |v: &BigInt| format_score(v, inst.scale_pow10);
    let decision = threshold.as_ref().map(|s| out.score >= *s);

    match fmt {
        Format::Json => {
            let agent = |k: usize| json!({"index": k, "id": inst.agent(k).id, "eff": inst.agent(k).to_string()});
            let mut doc = json!({
                "method": out.method.name(),
                "score": serde_json::from_str::<Value>(&out.score.to_string())?,
                "score_display": show(&out.score),
                "best": out.best.map(agent),
                "to_move": pos.to_move().as_str(),
            });
            let map = doc.as_object_mut().unwrap();
            if inst.scale_pow10 > 0 {
                map.insert("scale_pow10".into(), json!(inst.scale_pow10));
            }
            if let Some(pv) = &out.pv {
                map.insert("pv".into(), Value::Array(pv.iter().map(|&k| agent(k)).collect()));
            }
            if let Some(stats) = &out.stats {
                map.insert("stats".into(), serde_json::to_value(stats)?);
            }
            if let Some(v) = out.visited_states {
                map.insert("visited_states".into(), json!(v));
            }
            if let (Some(s), Some(d)) = (&threshold, decision) {
                map.insert("threshold".into(), serde_json::from_str(&s.to_string())?);
                map.insert("decision".into(), json!(if d { "YES" } else { "NO" }));
            }
            print_json(&doc);
        }
        Format::Text => {
            match out.best {
                Some(k) => println!("score {}, best {}", show(&out.score), inst.agent(k)),
                None => println!("score {} (draft finished)", show(&out.score)),
            }
            if let Some(k) = out.best {
                println!("best agent {}", inst.agent(k).id);
            }
            println!("method {}", out.method.describe());
            if let Some(pv) = &out.pv {
                let line: Vec<String> = pv
                    .iter()
                    .map(|&k| format!("{} {}", inst.agent(k).id, inst.agent(k)))
                    .collect();
                println!("pv {}", line.join(" -> "));
            }
            if let Some(s) = &out.stats {
                println!(
                    "nodes {}, expanded {}, memo hits {}, leaves {}, pruning: dominating agent {}, dominating pair {}, two-task {}, pareto removed {}",
                    s.nodes, s.expanded, s.memo_hits, s.leaf_evals, s.dominating_agent_hits,
                    s.dominating_pair_hits, s.two_task_hits, s.pareto_removed
                );
            }
            if let Some(v) = out.visited_states {
                println!("reduced states visited {v}");
            }
            if let (Some(s), Some(d)) = (&threshold, decision) {
                let verdict = if d { "YES" } else { "NO" };
                let rel = if d { ">=" } else { "<" };
                println!("{verdict}: score {} {rel} threshold {}", show(&out.score), show(s));
            }
        }
    }
    Ok(match decision {
        Some(false) => ExitCode::from(1),
        _ => ExitCode::SUCCESS,
    })
}

fn cmd_verify(a: VerifyArgs, fmt: Format) -> Result<ExitCode> {
    let suites = if a.suite.is_empty() { Suite::ALL.to_vec() } else { a.suite };
    let mut reports = Vec::new();
    for s in suites {
        let r = run_suite(s, a.seed, a.cases);
        if fmt == Format::Text {
            let status = if r.passed { "PASS" } else { "FAIL" };
            println!("{status} {} (seed {}, {} cases, {} ms)", r.suite, r.seed, r.cases, r.millis);
            if let Some(f) = &r.failure {
                println!("  {f}");
            }
            io::stdout().flush()?;
        }
        reports.push(r);
    }
    if fmt == Format::Json {
        print_json(&serde_json::to_value(&reports)?);
    }
    Ok(if reports.iter().all(|r| r.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_generate(a: GenerateArgs, _fmt: Format) -> Result<ExitCode> {
    if a.tasks == 0 {
        bail!("--tasks must be positive");
    }
    if a.copies == 0 {
        bail!("--copies must be positive");
    }
    let base = if a.otp {
        random_otp_instance(a.agents, a.tasks, a.max_eff, a.seed)
    } else {
        random_instance(a.agents, a.tasks, a.max_eff, a.seed)
    };
    let inst = if a.copies == 1 {
        base
    } else {
        game_sum(&vec![base; a.copies])
    };
    let bytes = serialize_instance(&inst);
    match a.out {
        Some(p) => fs::write(&p, bytes).with_context(|| format!("writing {}", p.display()))?,
        None => io::stdout().write_all(&bytes)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("instance");
    out.with_file_name(format!("{stem}.names.json"))
}

fn cmd_reduce(a: ReduceArgs, fmt: Format) -> Result<ExitCode> {
    let text = fs::read_to_string(&a.path).with_context(|| format!("reading {}", a.path.display()))?;
    let mut formula = parse_qdimacs(&text)?;
    if a.normalize {
        formula = normalize_qbf(&formula)?;
    }
    let gadget = build_draft_instance(&formula)?;
    let mut names = serde_json::to_value(&gadget)?;
    names
        .as_object_mut()
        .unwrap()
        .insert("formula".into(), json!(to_qdimacs(&formula)));
    let names_bytes = serde_json::to_vec_pretty(&names)?;
    let bytes = serialize_instance(&gadget.instance);
    let names_path = a.names.or_else(|| a.out.as_deref().map(sidecar_path));
    if let Some(p) = &names_path {
        fs::write(p, &names_bytes).with_context(|| format!("writing {}", p.display()))?;
    }
    match &a.out {
        Some(p) => {
            fs::write(p, &bytes).with_context(|| format!("writing {}", p.display()))?;
            let summary = json!({
                "instance": p.display().to_string(),
                "names": names_path.as_ref().map(|p| p.display().to_string()),
                "agents": gadget.instance.len(),
                "tasks": gadget.instance.tasks(),
                "threshold": serde_json::from_str::<Value>(&gadget.threshold.to_string())?,
            });
            if fmt == Format::Json {
                print_json(&summary);
            } else {
                println!(
                    "{} agents, {} tasks, threshold {}; wrote {}",
                    gadget.instance.len(),
                    gadget.instance.tasks(),
                    gadget.threshold,
                    p.display()
                );
                if let Some(n) = &names_path {
                    println!("naming map {}", n.display());
                }
            }
        }
        None => io::stdout().write_all(&bytes)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(a: BenchArgs, fmt: Format) -> Result<ExitCode> {
    let pos = read_position(&a.path)?;
    let configs: [(&str, Pruning, bool); 7] = [
        ("all pruning", Pruning::ALL, true),
        ("no dominating agent", Pruning { dominating_agent: false, ..Pruning::ALL }, true),
        ("no dominating pair", Pruning { dominating_pair: false, ..Pruning::ALL }, true),
        ("no two-task", Pruning { two_task: false, ..Pruning::ALL }, true),
        ("no pareto", Pruning { pareto: false, ..Pruning::ALL }, true),
        ("no pruning", Pruning::NONE, true),
        ("plain minimax", Pruning::NONE, false),
    ];
    let mut rows = Vec::new();
    for (label, pruning, alpha_beta) in configs {
        let opts = SolveOptions {
            pruning,
            alpha_beta,
            node_budget: a.budget,
            want_pv: false,
        };
        let mut best = f64::INFINITY;
        let mut last = None;
        for _ in 0..a.repeat.max(1) {
            let start = Instant::now();
            let r = solve_dispatch(&pos, &opts, false);
            best = best.min(start.elapsed().as_secs_f64());
            last = Some(r);
        }
        let row = match last.unwrap() {
            Ok(o) => json!({
                "config": label,
                "score": o.score.to_string(),
                "nodes": o.stats.as_ref().map(|s| s.nodes),
                "expanded": o.stats.as_ref().map(|s| s.expanded),
                "millis": best * 1e3,
            }),
            Err(e) => json!({"config": label, "error": e.to_string(), "millis": best * 1e3}),
        };
        rows.push(row);
    }
    if pos.picked_a().is_empty() && pos.picked_b().is_empty() && pos.first() == Player::Alice {
        for method in [Method::TwoTaskLinear, Method::OtpXp] {
            if let Some(o) = solve::solve_otp(pos.instance(), method) {
                let start = Instant::now();
                let _ = solve::solve_otp(pos.instance(), method);
                rows.push(json!({
                    "config": method.name(),
                    "score": o.score.to_string(),
                    "visited_states": o.visited_states,
                    "millis": start.elapsed().as_secs_f64() * 1e3,
                }));
            }
        }
    }
    match fmt {
        Format::Json => print_json(&Value::Array(rows)),
        Format::Text => {
            println!("{:<22} {:>10} {:>10} {:>10} {:>10}", "config", "score", "nodes", "expanded", "ms");
            for r in &rows {
                let cell = |k: &str| match &r[k] {
                    Value::Null => "-".to_string(),
                    Value::String(s) => s.clone(),
                    v => v.to_string(),
                };
                if let Some(e) = r["error"].as_str() {
                    println!("{:<22} {e}", cell("config"));
                    continue;
                }
                let nodes = if r["visited_states"].is_null() { cell("nodes") } else { cell("visited_states") };
                println!(
                    "{:<22} {:>10} {:>10} {:>10} {:>10.3}",
                    cell("config"),
                    cell("score"),
                    nodes,
                    cell("expanded"),
                    r["millis"].as_f64().unwrap_or(0.0)
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
