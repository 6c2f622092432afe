//! The two q-gram dictionaries behind the window filters.
//!
//! [`QBasicIndex`] answers "does this gram (wildcards allowed) correspond to
//! any factor of the pattern". [`QWeakIndex`] keeps a per-position match
//! table `M` over wildcard-free grams and answers successor ("next match at
//! or after") queries in constant time, from which [`QWeakIndex::weak_order_query`]
//! tests whether a gram sequence can be placed left to right in the pattern
//! with gaps of at least q.
//!
//! Conceptually both are tables indexed by the numeric gram encoding
//! [`rho`]. The stored representation switches between a dense table, a
//! per-gram match-position list, and a direct factor scan depending on
//! size, with identical query semantics.

use crate::core::{correspond, Pattern, Symbol};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QGramError {
    #[error("gram length q={q} must be in [1, m={m}]")]
    BadGramLength { q: usize, m: usize },
    #[error("gram has length {got}, index expects {expected}")]
    WrongQueryLength { expected: usize, got: usize },
    #[error("letter rank {rank} is outside alphabet of size {sigma}")]
    RankOutOfAlphabet { rank: usize, sigma: usize },
    #[error("wildcard symbol not allowed in this encoding")]
    WildcardNotAllowed,
    #[error("gram encoding overflows the machine word (base {base}, q {q})")]
    RankOverflow { base: usize, q: usize },
}

/// Numeric representation of a q-gram: the big-endian base-`base` value of
/// its digit sequence. `base` is sigma + 1 when the wildcard is a digit
/// (the largest one), else sigma.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GramRank {
    pub value: usize,
    pub base: usize,
    pub q: usize,
}

fn digit(s: Symbol, sigma: usize, include_wildcard: bool) -> Result<usize, QGramError> {
    match s {
        Symbol::Wildcard if include_wildcard => Ok(sigma),
        Symbol::Wildcard => Err(QGramError::WildcardNotAllowed),
        Symbol::Letter(r) => {
            let rank = r as usize;
            if rank < sigma {
                Ok(rank)
            } else {
                Err(QGramError::RankOutOfAlphabet { rank, sigma })
            }
        }
    }
}

/// Encode a gram as its positional value. Bijective on its domain; inverse
/// is [`rho_inverse`].
pub fn rho(s: &[Symbol], sigma: usize, include_wildcard: bool) -> Result<GramRank, QGramError> {
    let base = if include_wildcard { sigma + 1 } else { sigma };
    let q = s.len();
    let mut value: usize = 0;
    for &sym in s {
        let d = digit(sym, sigma, include_wildcard)?;
        value = value
            .checked_mul(base)
            .and_then(|v| v.checked_add(d))
            .ok_or(QGramError::RankOverflow { base, q })?;
    }
    Ok(GramRank { value, base, q })
}

/// Decode a positional value back into the gram it encodes.
pub fn rho_inverse(value: usize, q: usize, sigma: usize, include_wildcard: bool) -> Vec<Symbol> {
    let base = if include_wildcard { sigma + 1 } else { sigma };
    let mut out = vec![Symbol::Wildcard; q];
    let mut v = value;
    for slot in out.iter_mut().rev() {
        let d = v % base;
        v /= base;
        *slot = if include_wildcard && d == sigma {
            Symbol::Wildcard
        } else {
            Symbol::Letter(d as u16)
        };
    }
    out
}

// Plain bitset over table cells.
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn new(bits: usize) -> Self {
        BitSet {
            words: vec![0; bits.div_ceil(64)],
        }
    }
    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }
    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }
}

// Calls `f(rank)` once for every gram of the query domain that corresponds
// symbol-wise to `factor`. The query domain is sigma letters plus, when
// `query_wildcard`, the wildcard as digit sigma.
fn for_each_corresponding_gram(
    factor: &[Symbol],
    sigma: usize,
    query_wildcard: bool,
    f: &mut impl FnMut(usize),
) {
    let base = if query_wildcard { sigma + 1 } else { sigma };
    fn recurse(
        factor: &[Symbol],
        k: usize,
        acc: usize,
        sigma: usize,
        base: usize,
        query_wildcard: bool,
        f: &mut impl FnMut(usize),
    ) {
        if k == factor.len() {
            f(acc);
            return;
        }
        match factor[k] {
            // a wildcard in the factor corresponds to every query digit
            Symbol::Wildcard => {
                for d in 0..base {
                    recurse(
                        factor,
                        k + 1,
                        acc * base + d,
                        sigma,
                        base,
                        query_wildcard,
                        f,
                    );
                }
            }
            Symbol::Letter(r) => {
                recurse(
                    factor,
                    k + 1,
                    acc * base + r as usize,
                    sigma,
                    base,
                    query_wildcard,
                    f,
                );
                if query_wildcard {
                    recurse(
                        factor,
                        k + 1,
                        acc * base + sigma,
                        sigma,
                        base,
                        query_wildcard,
                        f,
                    );
                }
            }
        }
    }
    recurse(factor, 0, 0, sigma, base, query_wildcard, f);
}

// Number of grams enumerated per factor, saturating.
fn enumeration_work(x: &[Symbol], q: usize, per_letter: usize, per_wildcard: usize) -> usize {
    let mut total = 0usize;
    for factor in x.windows(q) {
        let mut prod = 1usize;
        for s in factor {
            let c = if s.is_wildcard() {
                per_wildcard
            } else {
                per_letter
            };
            prod = prod.saturating_mul(c);
        }
        total = total.saturating_add(prod);
    }
    total
}

fn validate_build(x: &Pattern, q: usize, sigma: usize) -> Result<(), QGramError> {
    if q == 0 || q > x.len() {
        return Err(QGramError::BadGramLength { q, m: x.len() });
    }
    for &s in x.symbols() {
        if let Symbol::Letter(r) = s {
            if r as usize >= sigma {
                return Err(QGramError::RankOutOfAlphabet {
                    rank: r as usize,
                    sigma,
                });
            }
        }
    }
    Ok(())
}

// Builds that would enumerate more grams than this fall back to scanning.
const MAX_BUILD_WORK: usize = 1 << 27;

enum BasicRepr {
    Dense(BitSet),
    Scan(Vec<Symbol>),
}

/// Membership index over grams from the alphabet plus wildcard: true for
/// exactly the grams that correspond to some length-q factor of the
/// indexed pattern.
pub struct QBasicIndex {
    q: usize,
    sigma: usize,
    repr: BasicRepr,
}

impl QBasicIndex {
    /// Index every length-q factor of `x`. Tables larger than
    /// `table_budget` cells are not materialized; lookups then scan the
    /// pattern directly, with identical results.
    pub fn build(
        x: &Pattern,
        q: usize,
        sigma: usize,
        table_budget: usize,
    ) -> Result<Self, QGramError> {
        validate_build(x, q, sigma)?;
        let cells = (sigma + 1).checked_pow(q as u32);
        let work = enumeration_work(x.symbols(), q, 2, sigma + 1);
        let repr = match cells {
            Some(cells) if cells <= table_budget && work <= MAX_BUILD_WORK => {
                let mut member = BitSet::new(cells);
                for factor in x.symbols().windows(q) {
                    for_each_corresponding_gram(factor, sigma, true, &mut |rank| member.set(rank));
                }
                BasicRepr::Dense(member)
            }
            _ => BasicRepr::Scan(x.symbols().to_vec()),
        };
        Ok(QBasicIndex { q, sigma, repr })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Does `s` correspond to some factor of the indexed pattern?
    pub fn contains(&self, s: &[Symbol]) -> Result<bool, QGramError> {
        if s.len() != self.q {
            return Err(QGramError::WrongQueryLength {
                expected: self.q,
                got: s.len(),
            });
        }
        match &self.repr {
            BasicRepr::Dense(member) => Ok(member.get(rho(s, self.sigma, true)?.value)),
            BasicRepr::Scan(pattern) => {
                for &sym in s {
                    digit(sym, self.sigma, true)?;
                }
                Ok(pattern
                    .windows(self.q)
                    .any(|factor| factor.iter().zip(s).all(|(&a, &b)| correspond(a, b))))
            }
        }
    }

    #[cfg(test)]
    fn is_dense(&self) -> bool {
        matches!(self.repr, BasicRepr::Dense(_))
    }

    #[cfg(test)]
    fn force_scan(x: &Pattern, q: usize, sigma: usize) -> Self {
        QBasicIndex {
            q,
            sigma,
            repr: BasicRepr::Scan(x.symbols().to_vec()),
        }
    }
}

const NO_MATCH: u32 = u32::MAX;

enum WeakRepr {
    // Full match table plus successor table: next[r * (m + 1) + p] is the
    // first position h >= p where gram r matches, realizing the
    // next-smaller-value query on a 0/1 row in O(1).
    Dense { next: Vec<u32>, m: usize },
    // Sorted match positions per gram that matches anywhere.
    Lists(HashMap<usize, Vec<u32>>),
    Scan,
}

// Dense successor tables beyond this many cells cost more memory than the
// O(1) query is worth; match lists or scanning take over.
const MAX_DENSE_WEAK_CELLS: usize = 1 << 26;
const MAX_LIST_ENTRIES: usize = 1 << 22;

/// Per-position match table over wildcard-free grams: entry (s, i) records
/// whether `s` corresponds to the pattern factor at `i`, with successor
/// queries for the first match at or after a position.
pub struct QWeakIndex {
    q: usize,
    sigma: usize,
    pattern: Vec<Symbol>,
    repr: WeakRepr,
}

impl QWeakIndex {
    pub fn build(
        x: &Pattern,
        q: usize,
        sigma: usize,
        table_budget: usize,
    ) -> Result<Self, QGramError> {
        validate_build(x, q, sigma)?;
        let m = x.len();
        let work = enumeration_work(x.symbols(), q, 1, sigma);
        let dense_cells = sigma
            .checked_pow(q as u32)
            .and_then(|rows| rows.checked_mul(m + 1));
        let repr = match dense_cells {
            Some(cells)
                if cells <= table_budget.min(MAX_DENSE_WEAK_CELLS) && work <= MAX_BUILD_WORK =>
            {
                Self::build_dense(x, q, sigma, m)
            }
            _ if work <= table_budget.min(MAX_LIST_ENTRIES) => Self::build_lists(x, q, sigma),
            _ => WeakRepr::Scan,
        };
        Ok(QWeakIndex {
            q,
            sigma,
            pattern: x.symbols().to_vec(),
            repr,
        })
    }

    fn build_dense(x: &Pattern, q: usize, sigma: usize, m: usize) -> WeakRepr {
        let rows = sigma.pow(q as u32);
        let mut zero = BitSet::new(rows * m);
        for (i, factor) in x.symbols().windows(q).enumerate() {
            for_each_corresponding_gram(factor, sigma, false, &mut |rank| zero.set(rank * m + i));
        }
        // one right-to-left sweep per row fills the successor table
        let mut next = vec![NO_MATCH; rows * (m + 1)];
        for r in 0..rows {
            let row = &mut next[r * (m + 1)..(r + 1) * (m + 1)];
            let mut succ = NO_MATCH;
            for p in (0..m).rev() {
                if zero.get(r * m + p) {
                    succ = p as u32;
                }
                row[p] = succ;
            }
        }
        WeakRepr::Dense { next, m }
    }

    fn build_lists(x: &Pattern, q: usize, sigma: usize) -> WeakRepr {
        let mut rows: HashMap<usize, Vec<u32>> = HashMap::new();
        // factors visited in increasing i, so each row stays sorted
        for (i, factor) in x.symbols().windows(q).enumerate() {
            for_each_corresponding_gram(factor, sigma, false, &mut |rank| {
                rows.entry(rank).or_default().push(i as u32)
            });
        }
        WeakRepr::Lists(rows)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn pattern_len(&self) -> usize {
        self.pattern.len()
    }

    fn validate_query(&self, s: &[Symbol]) -> Result<(), QGramError> {
        if s.len() != self.q {
            return Err(QGramError::WrongQueryLength {
                expected: self.q,
                got: s.len(),
            });
        }
        for &sym in s {
            digit(sym, self.sigma, false)?;
        }
        Ok(())
    }

    /// Is M\[rho(s)\]\[i\] a recorded match, i.e. does `s` correspond to the
    /// factor starting at `i`? Positions past `m - q` hold no factor.
    pub fn is_match(&self, s: &[Symbol], i: usize) -> Result<bool, QGramError> {
        self.validate_query(s)?;
        let m = self.pattern.len();
        if i + self.q > m {
            return Ok(false);
        }
        Ok(self.pattern[i..i + self.q]
            .iter()
            .zip(s)
            .all(|(&a, &b)| correspond(a, b)))
    }

    /// First position h >= p where `s` matches the pattern factor at h, or
    /// `None`. Constant time on the dense representation; `p > m` (no
    /// positions left) is `None`, not an error.
    pub fn next_match_at_or_after(
        &self,
        s: &[Symbol],
        p: usize,
    ) -> Result<Option<usize>, QGramError> {
        self.validate_query(s)?;
        let m = self.pattern.len();
        if p > m {
            return Ok(None);
        }
        match &self.repr {
            WeakRepr::Dense { next, m } => {
                let r = rho(s, self.sigma, false)?.value;
                let h = next[r * (m + 1) + p];
                Ok((h != NO_MATCH).then_some(h as usize))
            }
            WeakRepr::Lists(rows) => {
                let r = rho(s, self.sigma, false)?.value;
                Ok(rows.get(&r).and_then(|positions| {
                    let k = positions.partition_point(|&h| (h as usize) < p);
                    positions.get(k).map(|&h| h as usize)
                }))
            }
            WeakRepr::Scan => {
                for h in p..=m.saturating_sub(self.q) {
                    if self.pattern[h..h + self.q]
                        .iter()
                        .zip(s)
                        .all(|(&a, &b)| correspond(a, b))
                    {
                        return Ok(Some(h));
                    }
                }
                Ok(None)
            }
        }
    }

    /// Greedy left-to-right placement of a gram sequence: gram k+1 must
    /// match at or after the previous placement plus q. True iff every
    /// gram places; an empty sequence is vacuously true.
    pub fn weak_order_query(&self, grams: &[&[Symbol]]) -> Result<bool, QGramError> {
        let mut from = 0usize;
        for s in grams {
            match self.next_match_at_or_after(s, from)? {
                Some(j) => from = j + self.q,
                None => return Ok(false),
            }
        }
        Ok(true)
    }

    #[cfg(test)]
    fn with_repr(x: &Pattern, q: usize, sigma: usize, which: &str) -> Self {
        let repr = match which {
            "dense" => Self::build_dense(x, q, sigma, x.len()),
            "lists" => Self::build_lists(x, q, sigma),
            "scan" => WeakRepr::Scan,
            other => panic!("unknown repr {other}"),
        };
        QWeakIndex {
            q,
            sigma,
            pattern: x.symbols().to_vec(),
            repr,
        }
    }

    #[cfg(test)]
    fn repr_name(&self) -> &'static str {
        match self.repr {
            WeakRepr::Dense { .. } => "dense",
            WeakRepr::Lists(_) => "lists",
            WeakRepr::Scan => "scan",
        }
    }
}
