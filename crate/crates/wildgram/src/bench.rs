//! Seeded instance generation, match-probability trials, and the
//! instrumented trial runner.
//!
//! Every random draw goes through a fixed, seedable generator (ChaCha8
//! from `rand_chacha`, 64-bit seeds) so identical configurations produce
//! bit-identical CSV output on every platform. The runner cross-checks
//! each engine run against the naive matcher and aborts on the first
//! mismatch; catching such a mismatch is its main job.

use crate::core::{naive_search, Alphabet, Pattern, SearchReport, Symbol, Text};
use crate::inspection::{greedy_scheme, InspectionError};
use crate::search::{
    choose_params, search_block_greedy, search_with_pattern_wildcards, search_with_text_wildcards,
    Problem, SearchError,
};
use crate::DEFAULT_TABLE_BUDGET;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Generator recorded in CSV headers for reproducibility.
pub const RNG_NAME: &str = "chacha8 (rand_chacha 0.3)";

#[derive(Debug, Error, PartialEq)]
pub enum BenchError {
    #[error("trials must be >= 1")]
    NoTrials,
    #[error("wildcard_rate {0} is not in [0, 1]")]
    BadWildcardRate(f64),
    #[error("wildcard count g={g} exceeds pattern length m={m}")]
    TooManyWildcards { g: usize, m: usize },
    #[error("engine wt searches wildcard-free patterns, got g={0}")]
    WtNeedsCleanPattern(usize),
    #[error("engine {0} searches wildcard-free texts, got wildcard_rate={1}")]
    NeedsCleanText(&'static str, f64),
    #[error("probe order must be a permutation of 0..2m")]
    BadProbeOrder,
    #[error("adversarial patterns need g < m, got g={g}, m={m}")]
    AdversarialNeedsLetters { g: usize, m: usize },
    #[error("sample length {u_len} must fit the fixed string (need u_len <= m={m} and m > g + log_sigma m)")]
    SampleDoesNotFit { u_len: usize, m: usize },
    #[error("need trials/m^2 >= 10 for a usable estimate; got {trials} trials at m={m}")]
    TooFewTrialsForBound { trials: u64, m: usize },
    #[error(
        "occurrences of engine {engine} differ from the oracle at trial {trial} (seed {seed})"
    )]
    OracleMismatch {
        engine: Engine,
        trial: u64,
        seed: u64,
    },
    #[error("unknown engine {0:?}")]
    UnknownEngine(String),
    #[error("unknown placement {0:?}")]
    UnknownPlacement(String),
    #[error("config line {line}: expected key=value")]
    ConfigSyntax { line: usize },
    #[error("config line {line}: bad value for {key}")]
    ConfigValue { line: usize, key: String },
    #[error("config line {line}: unknown key {key:?}")]
    ConfigKey { line: usize, key: String },
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Inspection(#[from] InspectionError),
}

/// Search engine selector for trial runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Wt,
    Wp,
    Greedy,
    Naive,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::Wt => "wt",
            Engine::Wp => "wp",
            Engine::Greedy => "greedy",
            Engine::Naive => "naive",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Engine {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s {
            "wt" => Ok(Engine::Wt),
            "wp" => Ok(Engine::Wp),
            "greedy" => Ok(Engine::Greedy),
            "naive" => Ok(Engine::Naive),
            other => Err(BenchError::UnknownEngine(other.to_string())),
        }
    }
}

/// How pattern wildcards are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Placement {
    #[default]
    Uniform,
    Clustered,
}

impl FromStr for Placement {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s {
            "uniform" => Ok(Placement::Uniform),
            "clustered" => Ok(Placement::Clustered),
            other => Err(BenchError::UnknownPlacement(other.to_string())),
        }
    }
}

/// One trial-sweep configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub n: usize,
    pub m: usize,
    pub sigma: usize,
    pub g: usize,
    /// Per-symbol wildcard probability for generated texts.
    pub wildcard_rate: f64,
    pub engine: Engine,
    pub trials: u64,
    pub seed: u64,
    pub placement: Placement,
    pub table_budget: usize,
}

impl TrialConfig {
    pub fn new(n: usize, m: usize, sigma: usize, engine: Engine) -> Self {
        TrialConfig {
            n,
            m,
            sigma,
            g: 0,
            wildcard_rate: 0.0,
            engine,
            trials: 1,
            seed: 0,
            placement: Placement::Uniform,
            table_budget: DEFAULT_TABLE_BUDGET,
        }
    }

    /// Parse `key=value` lines (blank lines and `#` comments allowed) on
    /// top of this configuration. Keys: n, m, sigma, g, wildcard_rate,
    /// engine, trials, seed, placement, table_budget.
    pub fn apply_config(&mut self, content: &str) -> Result<(), BenchError> {
        for (lineno, raw) in content.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = lineno + 1;
            let (key, value) = line
                .split_once('=')
                .ok_or(BenchError::ConfigSyntax { line: lineno })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || BenchError::ConfigValue {
                line: lineno,
                key: key.to_string(),
            };
            match key {
                "n" => self.n = value.parse().map_err(|_| bad())?,
                "m" => self.m = value.parse().map_err(|_| bad())?,
                "sigma" => self.sigma = value.parse().map_err(|_| bad())?,
                "g" => self.g = value.parse().map_err(|_| bad())?,
                "wildcard_rate" => {
                    self.wildcard_rate = value.parse().map_err(|_| bad())?;
                    if !self.wildcard_rate.is_finite() {
                        return Err(bad());
                    }
                }
                "engine" => self.engine = value.parse().map_err(|_| bad())?,
                "trials" => self.trials = value.parse().map_err(|_| bad())?,
                "seed" => self.seed = value.parse().map_err(|_| bad())?,
                "placement" => self.placement = value.parse().map_err(|_| bad())?,
                "table_budget" => self.table_budget = value.parse().map_err(|_| bad())?,
                _ => {
                    return Err(BenchError::ConfigKey {
                        line: lineno,
                        key: key.to_string(),
                    })
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.trials < 1 {
            return Err(BenchError::NoTrials);
        }
        if !(0.0..=1.0).contains(&self.wildcard_rate) {
            return Err(BenchError::BadWildcardRate(self.wildcard_rate));
        }
        if self.g > self.m {
            return Err(BenchError::TooManyWildcards {
                g: self.g,
                m: self.m,
            });
        }
        match self.engine {
            Engine::Wt if self.g > 0 => Err(BenchError::WtNeedsCleanPattern(self.g)),
            Engine::Wp if self.wildcard_rate > 0.0 => {
                Err(BenchError::NeedsCleanText("wp", self.wildcard_rate))
            }
            Engine::Greedy if self.wildcard_rate > 0.0 => {
                Err(BenchError::NeedsCleanText("greedy", self.wildcard_rate))
            }
            _ => Ok(()),
        }
    }
}

/// Aggregates over one trial sweep. Sums are exact; ratios are derived
/// from them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrialResult {
    pub trials: u64,
    pub total_inspected: u64,
    pub total_windows: u64,
    pub total_verifications: u64,
    pub total_occurrences: u64,
    pub fallback_trials: u64,
    pub mean_inspected_per_char: f64,
    pub max_inspected_per_char: f64,
    pub mean_inspected_per_window: f64,
    pub verifications_per_window: f64,
}

/// i.i.d. text: each position is the wildcard with probability
/// `wildcard_rate`, otherwise a uniform letter. A rate of 1/(sigma+1)
/// makes every symbol uniform over the alphabet plus wildcard.
pub fn gen_random_text(n: usize, sigma: usize, wildcard_rate: f64, seed: u64) -> Text {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Text::from_symbols(
        (0..n)
            .map(|_| {
                if wildcard_rate > 0.0 && rng.gen_bool(wildcard_rate) {
                    Symbol::Wildcard
                } else {
                    Symbol::Letter(rng.gen_range(0..sigma as u16))
                }
            })
            .collect(),
    )
}

/// Random pattern with exactly `g` wildcards: sampled without replacement,
/// or one contiguous run at a uniform offset.
pub fn gen_random_pattern(
    m: usize,
    sigma: usize,
    g: usize,
    placement: Placement,
    seed: u64,
) -> Result<Pattern, BenchError> {
    if g > m {
        return Err(BenchError::TooManyWildcards { g, m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut symbols: Vec<Symbol> = (0..m)
        .map(|_| Symbol::Letter(rng.gen_range(0..sigma as u16)))
        .collect();
    match placement {
        Placement::Uniform => {
            for i in rand::seq::index::sample(&mut rng, m, g) {
                symbols[i] = Symbol::Wildcard;
            }
        }
        Placement::Clustered => {
            if g > 0 {
                let offset = rng.gen_range(0..=m - g);
                for s in &mut symbols[offset..offset + g] {
                    *s = Symbol::Wildcard;
                }
            }
        }
    }
    Ok(Pattern::from_symbols(symbols).expect("m >= 1"))
}

/// A pattern built against a fixed probe order so that the first g probes
/// cannot rule out one candidate alignment.
///
/// If the first g probe positions fit inside a window of m consecutive
/// block positions starting at some candidate, the wildcards sit at
/// exactly the probed offsets of that alignment; otherwise every probed
/// position inside the pattern range becomes a wildcard (probes at or past
/// m never intersect candidate 0) and leftovers land anywhere. Returns the
/// pattern and the candidate the construction protects.
pub fn gen_adversarial_fixed_pattern(
    probe_order: &[usize],
    m: usize,
    g: usize,
    sigma: usize,
    seed: u64,
) -> Result<(Pattern, usize), BenchError> {
    if g >= m {
        return Err(BenchError::AdversarialNeedsLetters { g, m });
    }
    let mut seen = vec![false; 2 * m];
    if probe_order.len() != 2 * m
        || probe_order
            .iter()
            .any(|&z| z >= 2 * m || std::mem::replace(&mut seen[z], true))
    {
        return Err(BenchError::BadProbeOrder);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut symbols: Vec<Symbol> = (0..m)
        .map(|_| Symbol::Letter(rng.gen_range(0..sigma as u16)))
        .collect();
    if g == 0 {
        return Ok((Pattern::from_symbols(symbols).expect("m >= 1"), 0));
    }

    let first = &probe_order[..g];
    let min_z = *first.iter().min().expect("g >= 1");
    let max_z = *first.iter().max().expect("g >= 1");
    let window = max_z.saturating_sub(m - 1).min(m - 1);
    let survivor = if window <= min_z && max_z < window + m {
        // all first-g probes land on wildcard offsets of this alignment
        for &z in first {
            symbols[z - window] = Symbol::Wildcard;
        }
        window
    } else {
        let mut placed = 0usize;
        for &z in first {
            if z < m && !symbols[z].is_wildcard() {
                symbols[z] = Symbol::Wildcard;
                placed += 1;
            }
        }
        // leftovers may sit anywhere
        let free: Vec<usize> = (0..m).filter(|&i| !symbols[i].is_wildcard()).collect();
        for k in rand::seq::index::sample(&mut rng, free.len(), g - placed) {
            symbols[free[k]] = Symbol::Wildcard;
        }
        0
    };
    Ok((Pattern::from_symbols(symbols).expect("m >= 1"), survivor))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTrialConfig {
    /// Which side carries the wildcards. Text wildcards: the sample is
    /// drawn over the alphabet plus wildcard with length
    /// 3 log_{(sigma+1)/2} m against a wildcard-free string. Pattern
    /// wildcards: a wildcard-free sample of length g + 3 log_sigma m
    /// against a string with g wildcards.
    pub kind: Problem,
    pub m: usize,
    /// Wildcards in the fixed string; used by the pattern-wildcards kind.
    pub g: usize,
    pub sigma: usize,
    pub trials: u64,
    pub seed: u64,
}

/// Monte Carlo estimate of a factor-match probability, next to the 1/m^2
/// rate the sample lengths are tuned for.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityEstimate {
    pub observed_rate: f64,
    pub bound: f64,
    pub matches: u64,
    pub trials: u64,
    pub sample_len: usize,
}

fn ceil_snapped(v: f64) -> usize {
    if (v - v.round()).abs() < 1e-9 {
        v.round() as usize
    } else {
        v.ceil() as usize
    }
}

// does u correspond to some factor of v
fn corresponds_to_some_factor(u: &[Symbol], v: &[Symbol]) -> bool {
    if u.len() > v.len() {
        return false;
    }
    v.windows(u.len()).any(|factor| {
        factor
            .iter()
            .zip(u)
            .all(|(&a, &b)| crate::core::correspond(a, b))
    })
}

/// Estimate the probability that a fresh random sample of the
/// filter-tuned length corresponds to some factor of a fixed string.
pub fn probability_trial(cfg: &ProbabilityTrialConfig) -> Result<ProbabilityEstimate, BenchError> {
    let m = cfg.m;
    let mf = m as f64;
    if cfg.trials < 10 * (m * m) as u64 {
        return Err(BenchError::TooFewTrialsForBound {
            trials: cfg.trials,
            m,
        });
    }
    let sigma = cfg.sigma;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (fixed, sample_len, wildcard_samples) = match cfg.kind {
        Problem::TextWildcards => {
            let len = ceil_snapped(3.0 * mf.ln() / ((sigma as f64 + 1.0) / 2.0).ln());
            let v: Vec<Symbol> = (0..m)
                .map(|_| Symbol::Letter(rng.gen_range(0..sigma as u16)))
                .collect();
            (v, len, true)
        }
        Problem::PatternWildcards => {
            let len = cfg.g + ceil_snapped(3.0 * mf.ln() / (sigma as f64).ln());
            // worst case: the wildcards form one run
            let mut v: Vec<Symbol> = (0..m)
                .map(|_| Symbol::Letter(rng.gen_range(0..sigma as u16)))
                .collect();
            if cfg.g > 0 {
                if cfg.g > m {
                    return Err(BenchError::TooManyWildcards { g: cfg.g, m });
                }
                let offset = rng.gen_range(0..=m - cfg.g);
                for s in &mut v[offset..offset + cfg.g] {
                    *s = Symbol::Wildcard;
                }
            }
            (v, len, false)
        }
    };
    if sample_len > m || mf <= cfg.g as f64 + mf.ln() / (sigma as f64).ln() {
        return Err(BenchError::SampleDoesNotFit {
            u_len: sample_len,
            m,
        });
    }

    let mut matches = 0u64;
    let mut u = vec![Symbol::Wildcard; sample_len];
    for _ in 0..cfg.trials {
        for slot in u.iter_mut() {
            *slot = if wildcard_samples {
                // uniform over sigma letters plus the wildcard
                let d = rng.gen_range(0..=sigma);
                if d == sigma {
                    Symbol::Wildcard
                } else {
                    Symbol::Letter(d as u16)
                }
            } else {
                Symbol::Letter(rng.gen_range(0..sigma as u16))
            };
        }
        if corresponds_to_some_factor(&u, &fixed) {
            matches += 1;
        }
    }
    Ok(ProbabilityEstimate {
        observed_rate: matches as f64 / cfg.trials as f64,
        bound: 1.0 / mf / mf,
        matches,
        trials: cfg.trials,
        sample_len,
    })
}

/// Monte Carlo rate at which a uniform letter corresponds to a uniform
/// symbol drawn from the alphabet plus wildcard; converges to
/// 2 / (sigma + 1).
pub fn single_symbol_match_rate(sigma: usize, trials: u64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matches = 0u64;
    for _ in 0..trials {
        let letter = rng.gen_range(0..sigma);
        let other = rng.gen_range(0..=sigma); // sigma encodes the wildcard
        if other == sigma || other == letter {
            matches += 1;
        }
    }
    matches as f64 / trials as f64
}

const TEXT_SEED_STREAM: u64 = 0x9E37_79B9_7F4A_7C15;

fn run_engine(
    cfg: &TrialConfig,
    t: &Text,
    x: &Pattern,
    alphabet: &Alphabet,
) -> Result<SearchReport, BenchError> {
    let report = match cfg.engine {
        Engine::Naive => naive_search(t, x),
        Engine::Wt => {
            let choice = choose_params(
                cfg.m,
                x.wildcard_count(),
                cfg.sigma,
                Problem::TextWildcards,
                cfg.table_budget,
            );
            search_with_text_wildcards(t, x, alphabet, &choice)?
        }
        Engine::Wp => {
            let choice = choose_params(
                cfg.m,
                x.wildcard_count(),
                cfg.sigma,
                Problem::PatternWildcards,
                cfg.table_budget,
            );
            search_with_pattern_wildcards(t, x, alphabet, &choice)?
        }
        Engine::Greedy => {
            let scheme = greedy_scheme(x, cfg.sigma);
            search_block_greedy(t, x, alphabet, &scheme)?
        }
    };
    Ok(report)
}

/// Run a trial sweep: per trial, generate a fresh (pattern, text) pair
/// from `seed + trial`, run the configured engine, and cross-check its
/// occurrences against the naive matcher. Returns the aggregates and the
/// CSV (one row per trial, then a summary row with trial = -1).
pub fn run_trials(cfg: &TrialConfig) -> Result<(TrialResult, String), BenchError> {
    cfg.validate()?;
    let alphabet = Alphabet::generic(cfg.sigma).expect("validated sigma");
    let mut csv = String::new();
    csv.push_str(&format!("# rng: {RNG_NAME}\n"));
    csv.push_str(
        "trial,engine,n,m,sigma,g,q_eff,inspected_chars,windows,verifications,occurrences,fallback,seed\n",
    );
    let mut result = TrialResult {
        trials: cfg.trials,
        max_inspected_per_char: 0.0,
        ..TrialResult::default()
    };
    let mut sum_inspected_per_char = 0.0;

    for trial in 0..cfg.trials {
        let trial_seed = cfg.seed.wrapping_add(trial);
        let x = gen_random_pattern(cfg.m, cfg.sigma, cfg.g, cfg.placement, trial_seed)?;
        let t = gen_random_text(
            cfg.n,
            cfg.sigma,
            cfg.wildcard_rate,
            trial_seed ^ TEXT_SEED_STREAM,
        );
        let report = run_engine(cfg, &t, &x, &alphabet)?;
        if cfg.engine != Engine::Naive {
            let oracle = naive_search(&t, &x);
            if report.occurrences != oracle.occurrences {
                return Err(BenchError::OracleMismatch {
                    engine: cfg.engine,
                    trial,
                    seed: trial_seed,
                });
            }
        }

        result.total_inspected += report.inspected_chars;
        result.total_windows += report.windows;
        result.total_verifications += report.verifications;
        result.total_occurrences += report.occurrences.len() as u64;
        result.fallback_trials += u64::from(report.used_fallback);
        if cfg.n > 0 {
            let per_char = report.inspected_chars as f64 / cfg.n as f64;
            sum_inspected_per_char += per_char;
            result.max_inspected_per_char = result.max_inspected_per_char.max(per_char);
        }

        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            trial,
            cfg.engine,
            cfg.n,
            cfg.m,
            cfg.sigma,
            cfg.g,
            report.effective_q,
            report.inspected_chars,
            report.windows,
            report.verifications,
            report.occurrences.len(),
            report.used_fallback,
            trial_seed,
        ));
    }

    result.mean_inspected_per_char = sum_inspected_per_char / cfg.trials as f64;
    if result.total_windows > 0 {
        result.mean_inspected_per_window =
            result.total_inspected as f64 / result.total_windows as f64;
        result.verifications_per_window =
            result.total_verifications as f64 / result.total_windows as f64;
    }
    // summary row: totals, with fallback holding the count of fallback trials
    csv.push_str(&format!(
        "-1,{},{},{},{},{},{},{},{},{},{},{},{}\n",
        cfg.engine,
        cfg.n,
        cfg.m,
        cfg.sigma,
        cfg.g,
        0,
        result.total_inspected,
        result.total_windows,
        result.total_verifications,
        result.total_occurrences,
        result.fallback_trials,
        cfg.seed,
    ));
    Ok((result, csv))
}
