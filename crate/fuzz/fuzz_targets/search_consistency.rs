#![no_main]

use libfuzzer_sys::fuzz_target;
use wildgram::core::Symbol;
use wildgram::inspection::greedy_scheme;
use wildgram::search::{
    search_block_greedy, search_with_pattern_wildcards, search_with_text_wildcards,
};
use wildgram::{choose_params, naive_search, Alphabet, Pattern, Problem, Text};

// Decode an instance straight from fuzz bytes and require every engine to
// report exactly the naive matcher's occurrence set.
fuzz_target!(|data: &[u8]| {
    if data.len() < 3 {
        return;
    }
    let sigma = 2 + (data[0] % 4) as usize;
    let m = 1 + (data[1] % 24) as usize;
    let rest = &data[2..];
    if rest.len() <= m {
        return;
    }
    let (pattern_bytes, text_bytes) = rest.split_at(m);

    // pattern over the alphabet plus wildcard
    let pattern_symbols: Vec<Symbol> = pattern_bytes
        .iter()
        .map(|&b| {
            let d = b as usize % (sigma + 1);
            if d == sigma {
                Symbol::Wildcard
            } else {
                Symbol::Letter(d as u16)
            }
        })
        .collect();
    let x = Pattern::from_symbols(pattern_symbols).unwrap();
    let alphabet = Alphabet::generic(sigma).unwrap();
    let g = x.wildcard_count();
    let budget = 1 << 16;

    // engines for pattern wildcards read a clean text
    let clean = Text::from_symbols(
        text_bytes
            .iter()
            .map(|&b| Symbol::Letter((b as usize % sigma) as u16))
            .collect(),
    );
    let oracle = naive_search(&clean, &x);
    let choice = choose_params(m, g, sigma, Problem::PatternWildcards, budget);
    let wp = search_with_pattern_wildcards(&clean, &x, &alphabet, &choice).unwrap();
    assert_eq!(wp.occurrences, oracle.occurrences, "wp != oracle");
    let scheme = greedy_scheme(&x, sigma);
    let greedy = search_block_greedy(&clean, &x, &alphabet, &scheme).unwrap();
    assert_eq!(greedy.occurrences, oracle.occurrences, "greedy != oracle");

    // with a wildcard-free pattern the text side may carry wildcards
    if g == 0 {
        let wild = Text::from_symbols(
            text_bytes
                .iter()
                .map(|&b| {
                    let d = b as usize % (sigma + 1);
                    if d == sigma {
                        Symbol::Wildcard
                    } else {
                        Symbol::Letter(d as u16)
                    }
                })
                .collect(),
        );
        let oracle = naive_search(&wild, &x);
        let choice = choose_params(m, 0, sigma, Problem::TextWildcards, budget);
        let wt = search_with_text_wildcards(&wild, &x, &alphabet, &choice).unwrap();
        assert_eq!(wt.occurrences, oracle.occurrences, "wt != oracle");
    }
});
