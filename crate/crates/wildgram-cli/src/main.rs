//! Command-line wildcard search.
//!
//! `search` runs a filtering engine and prints occurrence positions;
//! `oracle` answers with the naive matcher; `inspect` exports the greedy
//! probe schedule for a pattern; `bench` runs instrumented trial sweeps.
//!
//! Exit codes: 0 success, 1 input or validation error, 2 internal
//! invariant violation (an engine disagreed with the oracle).

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;
use wildgram::bench::{BenchError, Engine, Placement, TrialConfig};
use wildgram::core::WILDCARD_BYTE;
use wildgram::inspection::{
    default_cover_rounds, dense_cover_schedule, greedy_scheme, probe_lower_bound, BlockModel,
    RecurrenceBounds,
};
use wildgram::parse::{parse_pattern, parse_text};
use wildgram::search::{
    search_block_greedy, search_with_pattern_wildcards, search_with_text_wildcards, ParamChoice,
    SearchParams,
};
use wildgram::{
    choose_params, naive_search, Alphabet, Pattern, Problem, SearchReport, Text,
    DEFAULT_TABLE_BUDGET,
};

#[derive(Parser)]
#[command(
    name = "wildgram",
    about = "Wildcard pattern search with average-case filtering",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search a text file for a pattern; `?` is the wildcard on either side
    Search(SearchArgs),
    /// Search with the naive matcher (handles wildcards on both sides)
    Oracle(OracleArgs),
    /// Print the greedy probe schedule for a pattern as CSV
    Inspect(InspectArgs),
    /// Run instrumented trial sweeps and print them as CSV
    Bench(BenchArgs),
}

#[derive(Args)]
struct SearchArgs {
    /// Pattern string, one symbol per byte, `?` for the wildcard
    #[arg(long)]
    pattern: String,
    /// File holding the text (a single trailing newline is ignored)
    #[arg(long)]
    text_file: std::path::PathBuf,
    /// Engine: wt (wildcards in text), wp (wildcards in pattern), greedy,
    /// or auto
    #[arg(long, default_value = "auto")]
    engine: String,
    /// Force the alphabet size (must cover the letters actually seen)
    #[arg(long)]
    sigma: Option<usize>,
    /// Force the gram length used by the wt/wp filters
    #[arg(long)]
    q: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    pattern: String,
    #[arg(long)]
    text_file: std::path::PathBuf,
    #[arg(long)]
    sigma: Option<usize>,
}

#[derive(Args)]
struct InspectArgs {
    #[arg(long)]
    pattern: String,
    #[arg(long)]
    sigma: usize,
    /// Also print the probe-count lower bound, the set-cover schedule
    /// totals, and the cover-recurrence values
    #[arg(long)]
    bounds: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// key=value config file (keys: engine, n, m, sigma, g, wildcard_rate,
    /// trials, seed, placement, table_budget); overrides the inline flags
    #[arg(long)]
    config: Option<std::path::PathBuf>,
    #[arg(long, default_value = "naive")]
    engine: String,
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long, default_value_t = 16)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    sigma: usize,
    #[arg(long, default_value_t = 0)]
    g: usize,
    #[arg(long, default_value_t = 0.0)]
    wildcard_rate: f64,
    #[arg(long, default_value_t = 10)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "uniform")]
    placement: String,
}

enum CliError {
    /// Bad input or flags: exit 1.
    Input(String),
    /// A cross-check inside the run failed: exit 2.
    Internal(String),
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Search(args) => run_search(args),
        Command::Oracle(args) => run_oracle(args),
        Command::Inspect(args) => run_inspect(args),
        Command::Bench(args) => run_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_text_file(path: &std::path::Path) -> Result<Vec<u8>, CliError> {
    let mut bytes = std::fs::read(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    // a single trailing newline comes from the editor, not the text
    if bytes.last() == Some(&b'\n') {
        bytes.pop();
        if bytes.last() == Some(&b'\r') {
            bytes.pop();
        }
    }
    Ok(bytes)
}

fn build_alphabet(inputs: &[&[u8]], sigma: Option<usize>) -> Result<Alphabet, CliError> {
    let mut seen = [false; 256];
    for chunk in inputs {
        for &b in *chunk {
            if b != WILDCARD_BYTE {
                seen[b as usize] = true;
            }
        }
    }
    let letters: Vec<u8> = (0u16..256)
        .map(|b| b as u8)
        .filter(|&b| seen[b as usize])
        .collect();
    if let Some(forced) = sigma {
        if forced < 2 {
            return Err(CliError::Input(format!(
                "--sigma must be at least 2, got {forced}"
            )));
        }
    }
    let sigma = sigma.unwrap_or(letters.len().max(2));
    Alphabet::from_letters_with_sigma(letters, sigma).map_err(CliError::input)
}

fn parse_inputs(
    pattern: &str,
    text_bytes: &[u8],
    sigma: Option<usize>,
) -> Result<(Pattern, Text, Alphabet), CliError> {
    let alphabet = build_alphabet(&[pattern.as_bytes(), text_bytes], sigma)?;
    let x = parse_pattern(pattern.as_bytes(), &alphabet).map_err(CliError::input)?;
    let t = parse_text(text_bytes, &alphabet).map_err(CliError::input)?;
    Ok((x, t, alphabet))
}

fn print_report(report: &SearchReport, engine: &str) {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut buf = String::new();
    for p in &report.occurrences {
        writeln!(buf, "{p}").unwrap();
    }
    writeln!(
        buf,
        "# stats: engine={engine} occurrences={} inspected_chars={} windows={} \
         verifications={} used_fallback={} effective_q={}",
        report.occurrences.len(),
        report.inspected_chars,
        report.windows,
        report.verifications,
        report.used_fallback,
        report.effective_q,
    )
    .unwrap();
    // a closed pipe downstream is not our error
    let _ = out.write_all(buf.as_bytes());
}

// apply a forced gram length to chosen parameters
fn override_q(
    choice: ParamChoice,
    q: usize,
    m: usize,
    g: usize,
    problem: Problem,
) -> Result<ParamChoice, CliError> {
    if q < 1 || q > m {
        return Err(CliError::Input(format!(
            "forced q={q} must be in [1, m={m}]"
        )));
    }
    let ParamChoice::Use(params) = choice else {
        return Ok(choice); // fallback stays fallback
    };
    let ell = match problem {
        Problem::TextWildcards => 1,
        Problem::PatternWildcards => {
            let ell = g.div_ceil(q) + 1;
            if ell * q >= m {
                return Err(CliError::Input(format!(
                    "forced q={q} leaves no positive shift (need ell*q < m, got {}*{q} >= {m})",
                    ell
                )));
            }
            ell
        }
    };
    Ok(ParamChoice::Use(SearchParams {
        q_eff: q,
        ell,
        ..params
    }))
}

fn run_search(args: SearchArgs) -> Result<(), CliError> {
    let text_bytes = read_text_file(&args.text_file)?;
    let (x, t, alphabet) = parse_inputs(&args.pattern, &text_bytes, args.sigma)?;
    let pattern_wild = x.wildcard_count() > 0;
    let text_wild = t.has_wildcards();

    let engine = match args.engine.as_str() {
        "auto" => {
            if pattern_wild && text_wild {
                return Err(CliError::Input(
                    "wildcards on both sides have no filtering engine; use the `oracle` \
                     subcommand"
                        .into(),
                ));
            } else if pattern_wild {
                "wp"
            } else {
                "wt"
            }
        }
        e @ ("wt" | "wp" | "greedy") => e,
        other => {
            return Err(CliError::Input(format!(
                "unknown engine {other:?} (expected wt, wp, greedy, or auto)"
            )))
        }
    };

    let (m, g, sigma) = (x.len(), x.wildcard_count(), alphabet.sigma());
    let report = match engine {
        "wt" => {
            let mut choice =
                choose_params(m, g, sigma, Problem::TextWildcards, DEFAULT_TABLE_BUDGET);
            if let Some(q) = args.q {
                choice = override_q(choice, q, m, g, Problem::TextWildcards)?;
            }
            search_with_text_wildcards(&t, &x, &alphabet, &choice).map_err(CliError::input)?
        }
        "wp" => {
            let mut choice =
                choose_params(m, g, sigma, Problem::PatternWildcards, DEFAULT_TABLE_BUDGET);
            if let Some(q) = args.q {
                choice = override_q(choice, q, m, g, Problem::PatternWildcards)?;
            }
            search_with_pattern_wildcards(&t, &x, &alphabet, &choice).map_err(CliError::input)?
        }
        "greedy" => {
            let scheme = greedy_scheme(&x, sigma);
            search_block_greedy(&t, &x, &alphabet, &scheme).map_err(CliError::input)?
        }
        _ => unreachable!(),
    };

    // the filters must agree with the oracle; disagreeing is a bug worth
    // a distinct exit code
    let oracle = naive_search(&t, &x);
    if report.occurrences != oracle.occurrences {
        return Err(CliError::Internal(format!(
            "engine {engine} reported {} occurrences but the oracle found {}",
            report.occurrences.len(),
            oracle.occurrences.len()
        )));
    }
    print_report(&report, engine);
    Ok(())
}

fn run_oracle(args: OracleArgs) -> Result<(), CliError> {
    let text_bytes = read_text_file(&args.text_file)?;
    let (x, t, _) = parse_inputs(&args.pattern, &text_bytes, args.sigma)?;
    let report = naive_search(&t, &x);
    print_report(&report, "naive");
    Ok(())
}

fn run_inspect(args: InspectArgs) -> Result<(), CliError> {
    let alphabet = build_alphabet(&[args.pattern.as_bytes()], Some(args.sigma))?;
    let x = parse_pattern(args.pattern.as_bytes(), &alphabet).map_err(CliError::input)?;
    let sigma = alphabet.sigma();
    let scheme = greedy_scheme(&x, sigma);

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut buf = String::new();
    writeln!(buf, "step,probe_position,expected_remaining").unwrap();
    writeln!(buf, "0,-,{}", scheme.trajectory[0]).unwrap();
    for (k, &z) in scheme.probes.iter().enumerate() {
        writeln!(buf, "{},{},{}", k + 1, z, scheme.trajectory[k + 1]).unwrap();
    }

    if args.bounds {
        let (m, g) = (x.len(), x.wildcard_count());
        let bound = probe_lower_bound(m, g, sigma).map_err(CliError::input)?;
        let rounds = default_cover_rounds(m, sigma);
        let model = BlockModel::build(&x, sigma);
        let schedule = dense_cover_schedule(&model, rounds);
        writeln!(buf, "# lower_bound_k,{bound}").unwrap();
        writeln!(buf, "# greedy_probes,{}", scheme.probes.len()).unwrap();
        writeln!(buf, "# greedy_terminated,{}", scheme.terminated_early).unwrap();
        writeln!(buf, "# dense_cover_rounds,{rounds}").unwrap();
        writeln!(buf, "# dense_cover_total,{}", schedule.total_probes()).unwrap();
        writeln!(buf, "# dense_cover_partial,{}", schedule.partial).unwrap();
        for i in 1..=rounds {
            match wildgram::inspection::recurrence_bounds(m, g, i) {
                RecurrenceBounds::Values { g: gi, .. } => {
                    writeln!(buf, "# G,{i},{gi}").unwrap();
                }
                RecurrenceBounds::Diverged => {
                    writeln!(buf, "# G,{i},diverged").unwrap();
                    break;
                }
            }
        }
    }
    let _ = out.write_all(buf.as_bytes());
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<(), CliError> {
    let engine: Engine = args.engine.parse().map_err(CliError::input)?;
    let placement: Placement = args.placement.parse().map_err(CliError::input)?;
    let mut cfg = TrialConfig::new(args.n, args.m, args.sigma, engine);
    cfg.g = args.g;
    cfg.wildcard_rate = args.wildcard_rate;
    cfg.trials = args.trials;
    cfg.seed = args.seed;
    cfg.placement = placement;
    if let Some(path) = &args.config {
        let content = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_config(&content).map_err(CliError::input)?;
    }
    cfg.validate().map_err(CliError::input)?;
    match wildgram::bench::run_trials(&cfg) {
        Ok((_, csv)) => {
            let _ = std::io::stdout().write_all(csv.as_bytes());
            Ok(())
        }
        Err(e @ BenchError::OracleMismatch { .. }) => Err(CliError::Internal(e.to_string())),
        Err(e) => Err(CliError::input(e)),
    }
}
