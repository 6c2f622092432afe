//! Alphabet and wildcard semantics, the correspondence relation, the naive
//! oracle matcher, and the window verifier shared by all search engines.

use thiserror::Error;

/// Errors from constructing or querying the core types.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoreError {
    #[error("alphabet must have at least 2 letters, got {0}")]
    AlphabetTooSmall(usize),
    #[error("alphabet size {0} exceeds the 256 distinct byte letters supported")]
    AlphabetTooLarge(usize),
    #[error("duplicate letter {0:?} in alphabet")]
    DuplicateLetter(u8),
    #[error("the wildcard byte '?' cannot be an alphabet letter")]
    WildcardLetter,
    #[error("letter set has {letters} distinct letters but sigma was forced to {sigma}")]
    SigmaTooSmall { letters: usize, sigma: usize },
    #[error("pattern must be non-empty")]
    EmptyPattern,
    #[error("alignment {i} out of range [0, {max}]")]
    PositionOutOfRange { i: usize, max: usize },
    #[error("pattern length {m} exceeds text length {n}")]
    PatternLongerThanText { m: usize, n: usize },
}

/// One symbol: an ordinary letter identified by its rank, or the wildcard.
///
/// The wildcard corresponds to every letter and to itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Letter(u16),
    Wildcard,
}

impl Symbol {
    pub fn is_wildcard(&self) -> bool {
        matches!(self, Symbol::Wildcard)
    }
}

/// True iff the two symbols correspond: they are equal or either is the
/// wildcard. The relation is reflexive and symmetric but not transitive.
pub fn correspond(a: Symbol, b: Symbol) -> bool {
    match (a, b) {
        (Symbol::Wildcard, _) | (_, Symbol::Wildcard) => true,
        (Symbol::Letter(x), Symbol::Letter(y)) => x == y,
    }
}

/// A finite ordered alphabet of at least two letters.
///
/// Letter ranks come from a fixed, explicit letter order supplied at
/// construction (sorted byte order when built from bytes), so numeric gram
/// encodings are stable across runs. The wildcard is never a letter; `sigma`
/// may exceed the number of byte-mapped letters, in which case the extra
/// ranks exist only numerically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    sigma: usize,
    letters: Vec<u8>,
}

/// Byte that denotes the wildcard in the textual syntax.
pub const WILDCARD_BYTE: u8 = b'?';

impl Alphabet {
    /// Alphabet of `sigma` letters with no byte mapping, for programmatic use.
    pub fn generic(sigma: usize) -> Result<Self, CoreError> {
        if sigma < 2 {
            return Err(CoreError::AlphabetTooSmall(sigma));
        }
        Ok(Alphabet {
            sigma,
            letters: Vec::new(),
        })
    }

    /// Alphabet whose letters are the given bytes, ranked in sorted order.
    pub fn from_letters(bytes: impl IntoIterator<Item = u8>) -> Result<Self, CoreError> {
        let mut letters: Vec<u8> = bytes.into_iter().collect();
        letters.sort_unstable();
        for w in letters.windows(2) {
            if w[0] == w[1] {
                return Err(CoreError::DuplicateLetter(w[0]));
            }
        }
        if letters.contains(&WILDCARD_BYTE) {
            return Err(CoreError::WildcardLetter);
        }
        if letters.len() < 2 {
            return Err(CoreError::AlphabetTooSmall(letters.len()));
        }
        let sigma = letters.len();
        Ok(Alphabet { sigma, letters })
    }

    /// Like [`Alphabet::from_letters`] but with `sigma` forced to a larger
    /// value than the number of observed letters.
    pub fn from_letters_with_sigma(
        bytes: impl IntoIterator<Item = u8>,
        sigma: usize,
    ) -> Result<Self, CoreError> {
        let mut letters: Vec<u8> = bytes.into_iter().collect();
        letters.sort_unstable();
        letters.dedup();
        if letters.contains(&WILDCARD_BYTE) {
            return Err(CoreError::WildcardLetter);
        }
        if sigma < letters.len() {
            return Err(CoreError::SigmaTooSmall {
                letters: letters.len(),
                sigma,
            });
        }
        if sigma < 2 {
            return Err(CoreError::AlphabetTooSmall(sigma));
        }
        if sigma > u16::MAX as usize + 1 {
            return Err(CoreError::AlphabetTooLarge(sigma));
        }
        Ok(Alphabet { sigma, letters })
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    /// Rank of a letter byte, if it is in the alphabet.
    pub fn rank(&self, byte: u8) -> Option<usize> {
        self.letters.binary_search(&byte).ok()
    }

    /// Byte for a rank, if the rank is byte-mapped.
    pub fn letter(&self, rank: usize) -> Option<u8> {
        self.letters.get(rank).copied()
    }
}

/// A pattern: a non-empty symbol sequence over the alphabet plus wildcard.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    symbols: Vec<Symbol>,
    wildcards: usize,
}

impl Pattern {
    pub fn from_symbols(symbols: Vec<Symbol>) -> Result<Self, CoreError> {
        if symbols.is_empty() {
            return Err(CoreError::EmptyPattern);
        }
        let wildcards = symbols.iter().filter(|s| s.is_wildcard()).count();
        Ok(Pattern { symbols, wildcards })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty patterns
    }

    /// Number of wildcard positions.
    pub fn wildcard_count(&self) -> usize {
        self.wildcards
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Boolean mask, one entry per position, true at wildcards.
    pub fn wildcard_mask(&self) -> Vec<bool> {
        self.symbols.iter().map(Symbol::is_wildcard).collect()
    }
}

/// A text: a symbol sequence, possibly empty, possibly with wildcards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Text {
    symbols: Vec<Symbol>,
}

impl Text {
    pub fn from_symbols(symbols: Vec<Symbol>) -> Self {
        Text { symbols }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn has_wildcards(&self) -> bool {
        self.symbols.iter().any(Symbol::is_wildcard)
    }
}

/// Occurrence positions plus instrumentation counters from one search run.
///
/// `inspected_chars` counts text-symbol reads/comparisons at the model
/// level: gram reads, verifier comparisons, block probes, and oracle
/// comparisons, depending on the engine.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchReport {
    /// Start positions, strictly increasing, each in `[0, n - m]`.
    pub occurrences: Vec<usize>,
    pub inspected_chars: u64,
    pub windows: u64,
    pub verifications: u64,
    pub used_fallback: bool,
    pub effective_q: usize,
}

/// Occurrences found by one verifier call, plus the comparisons it spent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Verification {
    pub occurrences: Vec<usize>,
    pub comparisons: u64,
}

// Compares the full alignment at `i`, counting every symbol comparison.
// Caller guarantees i + m <= n.
pub(crate) fn match_window(t: &Text, x: &Pattern, i: usize, comparisons: &mut u64) -> bool {
    let ts = &t.symbols[i..i + x.len()];
    for (a, b) in ts.iter().zip(x.symbols.iter()) {
        *comparisons += 1;
        if !correspond(*a, *b) {
            return false;
        }
    }
    true
}

/// Does the pattern occur at alignment `i`? Out-of-range `i` is an error so
/// harness bugs surface instead of reading as "no match".
pub fn matches_at(t: &Text, x: &Pattern, i: usize) -> Result<bool, CoreError> {
    let (n, m) = (t.len(), x.len());
    if m > n {
        return Err(CoreError::PatternLongerThanText { m, n });
    }
    if i > n - m {
        return Err(CoreError::PositionOutOfRange { i, max: n - m });
    }
    let mut comparisons = 0;
    Ok(match_window(t, x, i, &mut comparisons))
}

/// Ground-truth matcher: checks every alignment directly.
///
/// Also serves as the fallback engine when filter parameters are
/// unavailable. A pattern longer than the text yields an empty report with
/// zero windows.
pub fn naive_search(t: &Text, x: &Pattern) -> SearchReport {
    let (n, m) = (t.len(), x.len());
    let mut report = SearchReport::default();
    if m > n {
        return report;
    }
    for i in 0..=n - m {
        report.windows += 1;
        if match_window(t, x, i, &mut report.inspected_chars) {
            report.occurrences.push(i);
        }
    }
    report
}

/// Verify one window: check all alignments starting in
/// `[i, min(i + m - 1, n - m)]`. At most `m * m` symbol comparisons.
pub fn ver(t: &Text, x: &Pattern, i: usize) -> Verification {
    let (n, m) = (t.len(), x.len());
    let mut out = Verification::default();
    if m > n {
        return out;
    }
    let hi = (i + m - 1).min(n - m);
    for j in i..=hi {
        if match_window(t, x, j, &mut out.comparisons) {
            out.occurrences.push(j);
        }
    }
    out
}
