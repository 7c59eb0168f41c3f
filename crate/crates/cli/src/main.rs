mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use raequiv::algebra::Algebra;
use raequiv::automata::{parse_automaton, print_automaton, AnyAutomaton, AutomatonError, RegisterAutomaton};
use raequiv::checker::{
    decide_equivalence, decide_functionality, decide_zeroness, machine_report, text_report, CheckerError, Verdict,
};
use raequiv::encodings::{compile_to_poly, EncodingError};
use raequiv::poly::MonomialOrder;
use raequiv::reductions::{
    build_oneletter_variant, build_reduction_ra, crossvalidate_bounded, CrossMode, MachineError, TwoCounterMachine,
};
use raequiv::tree::{parse_ranked_tree, RankedTree};

use config::{FileConfig, FlagBudget};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Automaton { path: String, source: AutomatonError },
    #[error("{path}: {source}")]
    Machine { path: String, source: MachineError },
    #[error("tree: {0}")]
    Tree(String),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Checker(#[from] CheckerError),
    #[error(transparent)]
    Run(#[from] AutomatonError),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
}

/// Functionality and equivalence checking for register automata.
#[derive(Parser)]
#[command(name = "raequiv", version)]
struct Cli {
    /// TOML file with a [budget] section.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the output set of an automaton on one input tree.
    Run {
        automaton: PathBuf,
        /// File holding the input tree.
        input: Option<PathBuf>,
        /// Input tree given inline, e.g. `a(_|_, _|_)`.
        #[arg(long, conflicts_with = "input")]
        tree: Option<String>,
    },
    /// Decide zeroness, functionality or equivalence.
    Check {
        kind: CheckKind,
        /// One automaton, two for equivalence.
        #[arg(required = true, num_args = 1..=2)]
        automata: Vec<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Line-oriented key=value report.
        #[arg(long)]
        machine: bool,
    },
    /// Build the reduction automaton of a two-counter machine.
    Generate {
        kind: GenerateKind,
        machine_file: PathBuf,
        /// Target state; defaults to the last state.
        #[arg(long)]
        target: Option<usize>,
        /// Write the automaton here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Cross-validate the deterministic reduction on all words up to this length.
        #[arg(long, value_name = "L")]
        crossvalidate: Option<usize>,
        /// Visit every word, even after the witness register is zero.
        #[arg(long, requires = "crossvalidate")]
        exhaustive: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Zeroness,
    Functionality,
    Equivalence,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenerateKind {
    Reduction,
    Oneletter,
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long)]
    budget_secs: Option<f64>,
    #[arg(long)]
    max_steps: Option<u64>,
    #[arg(long)]
    max_tree_size: Option<usize>,
    #[arg(long)]
    max_degree: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Single-task interleaving, reproducible across runs.
    #[arg(long)]
    deterministic: bool,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_automaton(path: &Path) -> Result<AnyAutomaton, CliError> {
    parse_automaton(&read(path)?).map_err(|source| CliError::Automaton {
        path: path.display().to_string(),
        source,
    })
}

fn load_machine(path: &Path) -> Result<TwoCounterMachine, CliError> {
    TwoCounterMachine::parse(&read(path)?).map_err(|source| CliError::Machine {
        path: path.display().to_string(),
        source,
    })
}

fn render_outputs<A: Algebra + Clone>(
    m: &RegisterAutomaton<A>,
    t: &RankedTree,
    show: impl Fn(&A::Value) -> String,
) -> Result<Vec<String>, CliError> {
    Ok(m.outputs_on(t)?.iter().map(show).collect())
}

/// Output set on `t` in the automaton's own algebra.
fn native_outputs(m: &AnyAutomaton, t: &RankedTree) -> Result<Vec<String>, CliError> {
    let order = MonomialOrder::degrevlex();
    match m {
        AnyAutomaton::Rat(a) => render_outputs(a, t, |v| v.to_string()),
        AnyAutomaton::Poly(a) => render_outputs(a, t, |v| v.to_text(&order)),
        AnyAutomaton::Uf(a) => render_outputs(a, t, |v| if v.is_empty() { "{}".into() } else { v.to_string() }),
        AnyAutomaton::Ucf(a) => render_outputs(a, t, |v| if v.is_empty() { "{}".into() } else { v.to_string() }),
        AnyAutomaton::Word(a) => render_outputs(a, t, |v| if v.is_empty() { "eps".into() } else { v.to_string() }),
    }
}

fn cmd_run(automaton: &Path, input: Option<&Path>, tree: Option<&str>) -> Result<ExitCode, CliError> {
    let m = load_automaton(automaton)?;
    let text = match (input, tree) {
        (Some(p), _) => read(p)?,
        (None, Some(t)) => t.to_string(),
        (None, None) => return Err(CliError::Usage("give an input file or --tree".into())),
    };
    let t = parse_ranked_tree(text.trim()).map_err(|e| CliError::Tree(e.to_string()))?;
    let outs = native_outputs(&m, &t)?;
    if outs.is_empty() {
        println!("no output");
    }
    for o in outs {
        println!("{o}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(kind: CheckKind, paths: &[PathBuf], budget: &raequiv::checker::Budget, machine: bool) -> Result<ExitCode, CliError> {
    let expected = if matches!(kind, CheckKind::Equivalence) { 2 } else { 1 };
    if paths.len() != expected {
        return Err(CliError::Usage(format!("expected {expected} automaton file(s)")));
    }
    let sources: Vec<AnyAutomaton> = paths.iter().map(|p| load_automaton(p)).collect::<Result<_, _>>()?;
    if let [a, b] = sources.as_slice() {
        if a.header() != b.header() {
            return Err(CliError::Usage(format!("algebras differ: {} vs {}", a.header(), b.header())));
        }
    }
    let compiled = sources.iter().map(compile_to_poly).collect::<Result<Vec<_>, _>>()?;
    if compiled[0].algebra().substitution {
        eprintln!("note: substitution algebra; ideal search disabled, counterexample search only");
    }
    let verdict: Verdict = match kind {
        CheckKind::Zeroness => decide_zeroness(&compiled[0], budget)?,
        CheckKind::Functionality => decide_functionality(&compiled[0], budget)?,
        CheckKind::Equivalence => decide_equivalence(&compiled[0], &compiled[1], budget)?,
    };
    let mut native = Vec::new();
    if let Some(t) = verdict.certificate.tree() {
        if !matches!(sources[0], AnyAutomaton::Poly(_)) {
            for (i, m) in sources.iter().enumerate() {
                native.push((i + 1, native_outputs(m, t)?));
            }
        }
    }
    if machine {
        print!("{}", machine_report(&verdict));
        for (i, outs) in &native {
            for o in outs {
                println!("source_output.{i}={o}");
            }
        }
    } else {
        print!("{}", text_report(&verdict));
        for (i, outs) in &native {
            let label = if sources.len() > 1 { format!(" of automaton {i}") } else { String::new() };
            println!("  outputs{label} in its own algebra: {}", outs.join(", "));
        }
    }
    Ok(ExitCode::from(verdict.exit_code() as u8))
}

fn cmd_generate(
    kind: GenerateKind,
    machine_file: &Path,
    target: Option<usize>,
    output: Option<&Path>,
    crossvalidate: Option<usize>,
    exhaustive: bool,
) -> Result<ExitCode, CliError> {
    let m = load_machine(machine_file)?;
    let target = target.unwrap_or(m.states());
    if target == 0 || target > m.states() {
        return Err(CliError::Usage(format!("target {target} is not a state of the machine")));
    }
    let ra = match kind {
        GenerateKind::Reduction => build_reduction_ra(&m, target)?,
        GenerateKind::Oneletter => build_oneletter_variant(&m, target)?,
    };
    let text = print_automaton(&ra);
    match output {
        Some(p) => std::fs::write(p, &text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        })?,
        None => print!("{text}"),
    }
    if let Some(bound) = crossvalidate {
        let mode = if exhaustive { CrossMode::Exhaustive } else { CrossMode::Pruned };
        let r = crossvalidate_bounded(&m, target, bound, mode)?;
        if r.passed() {
            eprintln!(
                "crossvalidate L={bound}: pass ({} words visited, {} covered by zero absorption, {} valid runs, {} reach the target)",
                r.words, r.pruned, r.valid_runs, r.accepting_runs
            );
        } else {
            eprintln!("crossvalidate L={bound}: fail: {}", r.mismatch.unwrap_or_default());
            return Ok(ExitCode::from(1));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let file = match &cli.config {
        Some(p) => config::load_file(p)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Run { automaton, input, tree } => cmd_run(&automaton, input.as_deref(), tree.as_deref()),
        Command::Check {
            kind,
            automata,
            budget,
            machine,
        } => {
            let flags = FlagBudget {
                secs: budget.budget_secs,
                max_steps: budget.max_steps,
                max_tree_size: budget.max_tree_size,
                max_degree: budget.max_degree,
                seed: budget.seed,
                deterministic: budget.deterministic,
            };
            let b = config::resolve(&flags, &file)?;
            cmd_check(kind, &automata, &b, machine)
        }
        Command::Generate {
            kind,
            machine_file,
            target,
            output,
            crossvalidate,
            exhaustive,
        } => cmd_generate(kind, &machine_file, target, output.as_deref(), crossvalidate, exhaustive),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
