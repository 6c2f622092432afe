//! Sliding-window filtering engines.
//!
//! Both filters slide a window over the text, read a few grams from it,
//! and consult a pattern index. A negative lookup proves no occurrence can
//! start in the window's shift range; a positive one hands the window to
//! the verifier. Occurrence sets are always exactly the naive matcher's;
//! the filters only skip work, never matches.
//!
//! `search_with_text_wildcards` handles wildcards in the text (pattern
//! wildcard-free) through the membership index; `search_with_pattern_wildcards`
//! handles wildcards in the pattern through the weak-order query;
//! `search_block_greedy` resolves fixed-size blocks with a precomputed
//! probe schedule. When the filter parameters do not exist (tiny patterns,
//! wildcard ratio too high) the engines run the naive matcher and flag it.

use crate::core::{
    correspond, match_window, naive_search, ver, Alphabet, Pattern, SearchReport, Symbol, Text,
};
use crate::inspection::InspectionScheme;
use crate::qgram::{QBasicIndex, QGramError, QWeakIndex};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("this engine requires a wildcard-free pattern")]
    PatternHasWildcards,
    #[error("this engine requires a wildcard-free text")]
    TextHasWildcards,
    #[error("inspection scheme was built for a different pattern or alphabet")]
    SchemeMismatch,
    #[error(transparent)]
    Index(#[from] QGramError),
}

/// Which side carries the wildcards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    /// Wildcards in the text, pattern over the plain alphabet.
    TextWildcards,
    /// Wildcards in the pattern, text over the plain alphabet.
    PatternWildcards,
}

/// Filter parameters chosen for one (pattern, alphabet) combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchParams {
    /// Gram length the cost analysis asks for.
    pub q_theory: usize,
    /// Gram length actually used (clamped to the pattern length).
    pub q_eff: usize,
    /// Grams read per window (always 1 for text wildcards).
    pub ell: usize,
    /// Cell cap handed to index builds.
    pub table_budget: usize,
}

/// Outcome of parameter selection: usable filter parameters, or fall back
/// to the naive matcher.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamChoice {
    Use(SearchParams),
    Fallback,
}

impl ParamChoice {
    pub fn params(&self) -> Option<&SearchParams> {
        match self {
            ParamChoice::Use(p) => Some(p),
            ParamChoice::Fallback => None,
        }
    }
}

// ceil that forgives float error just below an integer
fn ceil_snapped(v: f64) -> f64 {
    if (v - v.round()).abs() < 1e-9 {
        v.round()
    } else {
        v.ceil()
    }
}

fn log_base(x: f64, base: f64) -> f64 {
    x.ln() / base.ln()
}

/// Pick gram length and gram count for a search, or decide to fall back.
///
/// Text wildcards: q = ceil(3 log_{(sigma+1)/2} m). Pattern wildcards:
/// q = ceil(3 log_sigma m) and ell = ceil(g/q) + 1 grams per window, valid
/// only under the wildcard-ratio condition m > 2(g + 3 log_sigma m) and
/// when a positive shift m - ell*q remains.
pub fn choose_params(
    m: usize,
    g: usize,
    sigma: usize,
    problem: Problem,
    table_budget: usize,
) -> ParamChoice {
    if m == 0 || sigma < 2 {
        return ParamChoice::Fallback;
    }
    let mf = m as f64;
    match problem {
        Problem::TextWildcards => {
            let base = (sigma as f64 + 1.0) / 2.0;
            let q_theory = ceil_snapped(3.0 * log_base(mf, base)) as usize;
            let q_eff = q_theory.min(m);
            if q_eff < 1 {
                return ParamChoice::Fallback;
            }
            ParamChoice::Use(SearchParams {
                q_theory,
                q_eff,
                ell: 1,
                table_budget,
            })
        }
        Problem::PatternWildcards => {
            let log_sigma_m = log_base(mf, sigma as f64);
            let q_theory = ceil_snapped(3.0 * log_sigma_m) as usize;
            let q_eff = q_theory.min(m);
            if q_eff < 1 {
                return ParamChoice::Fallback;
            }
            // wildcard-ratio condition: m must exceed 2(g + 3 log_sigma m)
            if mf <= 2.0 * (g as f64 + 3.0 * log_sigma_m) - 1e-9 {
                return ParamChoice::Fallback;
            }
            let ell = g.div_ceil(q_eff) + 1;
            if ell * q_eff >= m {
                return ParamChoice::Fallback;
            }
            ParamChoice::Use(SearchParams {
                q_theory,
                q_eff,
                ell,
                table_budget,
            })
        }
    }
}

fn fallback_report(t: &Text, x: &Pattern) -> SearchReport {
    let mut report = naive_search(t, x);
    report.used_fallback = true;
    report
}

// Resolve the alignments the filter loop never reached.
fn verify_tail(t: &Text, x: &Pattern, from: usize, report: &mut SearchReport) {
    let (n, m) = (t.len(), x.len());
    if m > n {
        return;
    }
    for j in from..=n - m {
        if match_window(t, x, j, &mut report.inspected_chars) {
            report.occurrences.push(j);
        }
    }
}

/// Find all occurrences when wildcards may appear in the text only.
///
/// Per window starting at i, reads the window's length-q suffix
/// (wildcards and all; the membership index absorbs them) and skips
/// m - q positions on a miss, since any occurrence starting in the
/// skipped range would contain that suffix as a factor.
pub fn search_with_text_wildcards(
    t: &Text,
    x: &Pattern,
    alphabet: &Alphabet,
    choice: &ParamChoice,
) -> Result<SearchReport, SearchError> {
    if x.wildcard_count() > 0 {
        return Err(SearchError::PatternHasWildcards);
    }
    let ParamChoice::Use(params) = choice else {
        return Ok(fallback_report(t, x));
    };
    let (n, m) = (t.len(), x.len());
    let q = params.q_eff;
    let mut report = SearchReport {
        effective_q: q,
        ..SearchReport::default()
    };
    if m > n {
        return Ok(report);
    }
    let index = QBasicIndex::build(x, q, alphabet.sigma(), params.table_budget)?;
    let miss_shift = (m - q).max(1);
    let mut i = 0usize;
    while i + m <= n {
        report.windows += 1;
        let gram = &t.symbols()[i + m - q..i + m];
        report.inspected_chars += q as u64;
        if index.contains(gram)? {
            report.verifications += 1;
            let v = ver(t, x, i);
            report.inspected_chars += v.comparisons;
            report.occurrences.extend(v.occurrences);
            i += m;
        } else {
            i += miss_shift;
        }
    }
    verify_tail(t, x, i, &mut report);
    Ok(report)
}

/// Find all occurrences when wildcards may appear in the pattern only.
///
/// Per window starting at i, reads ell consecutive non-overlapping q-grams
/// occupying the last ell*q characters of the window's first half (the
/// span [i + m - ell*q, i + m - 1], which every occurrence starting in the
/// shift range contains) and tests them with the weak-order query.
pub fn search_with_pattern_wildcards(
    t: &Text,
    x: &Pattern,
    alphabet: &Alphabet,
    choice: &ParamChoice,
) -> Result<SearchReport, SearchError> {
    if t.has_wildcards() {
        return Err(SearchError::TextHasWildcards);
    }
    let ParamChoice::Use(params) = choice else {
        return Ok(fallback_report(t, x));
    };
    let (n, m) = (t.len(), x.len());
    let (q, ell) = (params.q_eff, params.ell);
    let mut report = SearchReport {
        effective_q: q,
        ..SearchReport::default()
    };
    if m > n {
        return Ok(report);
    }
    let index = QWeakIndex::build(x, q, alphabet.sigma(), params.table_budget)?;
    let span = ell * q; // < m, enforced by choose_params
    let miss_shift = m - span;
    let mut grams: Vec<&[Symbol]> = Vec::with_capacity(ell);
    let mut i = 0usize;
    while i + m <= n {
        report.windows += 1;
        report.inspected_chars += span as u64;
        let block_start = i + m - span;
        grams.clear();
        grams
            .extend((0..ell).map(|k| &t.symbols()[block_start + k * q..block_start + (k + 1) * q]));
        if index.weak_order_query(&grams)? {
            report.verifications += 1;
            let v = ver(t, x, i);
            report.inspected_chars += v.comparisons;
            report.occurrences.extend(v.occurrences);
            i += m;
        } else {
            i += miss_shift;
        }
    }
    verify_tail(t, x, i, &mut report);
    Ok(report)
}

/// Find all occurrences by resolving blocks of length 2m with a probe
/// schedule.
///
/// Blocks start every m positions, so each block owns the m candidate
/// starts in its first half and every owned occurrence lies inside it.
/// Probes follow the scheme order, then any remaining positions in
/// ascending order; a candidate dies on its first failed comparison and
/// is declared a match once all its non-wildcard offsets have been seen
/// to correspond. Probing stops as soon as no candidate is undecided.
pub fn search_block_greedy(
    t: &Text,
    x: &Pattern,
    alphabet: &Alphabet,
    scheme: &InspectionScheme,
) -> Result<SearchReport, SearchError> {
    if t.has_wildcards() {
        return Err(SearchError::TextHasWildcards);
    }
    if !scheme.matches_pattern(x, alphabet.sigma()) {
        return Err(SearchError::SchemeMismatch);
    }
    let (n, m) = (t.len(), x.len());
    let mut report = SearchReport::default();
    if m > n {
        return Ok(report);
    }
    let needed = (m - x.wildcard_count()) as u32;
    let mask = x.wildcard_mask();

    // scheme probes first, then whatever it left unprobed
    let mut order: Vec<usize> = scheme.probes.clone();
    let mut in_scheme = vec![false; 2 * m];
    for &z in &order {
        in_scheme[z] = true;
    }
    order.extend((0..2 * m).filter(|&z| !in_scheme[z]));

    let mut block_start = 0usize;
    while block_start <= n - m {
        report.windows += 1;
        let candidate_count = (n - m - block_start + 1).min(m);
        let mut eliminated = vec![false; candidate_count];
        let mut confirmed = vec![0u32; candidate_count];
        let mut undecided = candidate_count;
        let mut found: Vec<usize> = Vec::new();

        if needed == 0 {
            // all-wildcard pattern: every candidate matches with no probes
            found.extend(0..candidate_count);
            undecided = 0;
        }

        for &z in &order {
            if undecided == 0 {
                break;
            }
            if block_start + z >= n {
                continue;
            }
            let text_symbol = t.symbols()[block_start + z];
            report.inspected_chars += 1;
            // candidates this probe intersects: c with 0 <= z - c < m at a
            // non-wildcard offset
            let lo = z.saturating_sub(m - 1);
            let hi = z.min(candidate_count - 1);
            for c in lo..=hi {
                if eliminated[c] || confirmed[c] == needed {
                    continue;
                }
                let y = z - c;
                if y >= m || mask[y] {
                    continue;
                }
                if correspond(text_symbol, x.symbols()[y]) {
                    confirmed[c] += 1;
                    if confirmed[c] == needed {
                        found.push(c);
                        undecided -= 1;
                    }
                } else {
                    eliminated[c] = true;
                    undecided -= 1;
                }
            }
        }

        found.sort_unstable();
        report
            .occurrences
            .extend(found.into_iter().map(|c| block_start + c));
        block_start += m;
    }
    Ok(report)
}
