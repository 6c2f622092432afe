//! Byte-level pattern/text syntax.
//!
//! One symbol per byte; `?` denotes the wildcard; every other byte must be
//! an alphabet letter. There is no escaping, so inputs that need a literal
//! `?` letter are unsupported.

use crate::core::{Alphabet, CoreError, Pattern, Symbol, Text, WILDCARD_BYTE};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("byte {byte:?} at offset {offset} is not a letter of the alphabet")]
    UnknownLetter { byte: u8, offset: usize },
    #[error(transparent)]
    Core(#[from] CoreError),
}

fn parse_symbols(bytes: &[u8], alphabet: &Alphabet) -> Result<Vec<Symbol>, ParseError> {
    bytes
        .iter()
        .enumerate()
        .map(|(offset, &byte)| {
            if byte == WILDCARD_BYTE {
                Ok(Symbol::Wildcard)
            } else {
                alphabet
                    .rank(byte)
                    .map(|r| Symbol::Letter(r as u16))
                    .ok_or(ParseError::UnknownLetter { byte, offset })
            }
        })
        .collect()
}

/// Parse a pattern; must be non-empty.
pub fn parse_pattern(bytes: &[u8], alphabet: &Alphabet) -> Result<Pattern, ParseError> {
    Ok(Pattern::from_symbols(parse_symbols(bytes, alphabet)?)?)
}

/// Parse a text; may be empty.
pub fn parse_text(bytes: &[u8], alphabet: &Alphabet) -> Result<Text, ParseError> {
    Ok(Text::from_symbols(parse_symbols(bytes, alphabet)?))
}

/// Build the alphabet from the distinct non-`?` bytes of the given inputs,
/// ranked in sorted byte order. At least two letter ranks always exist, so
/// single-letter inputs get sigma 2.
pub fn infer_alphabet(inputs: &[&[u8]]) -> Result<Alphabet, ParseError> {
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
    let sigma = letters.len().max(2);
    Ok(Alphabet::from_letters_with_sigma(letters, sigma)?)
}

/// Render symbols back to bytes; wildcards become `?`. Returns `None` for
/// ranks the alphabet does not byte-map.
pub fn render(symbols: &[Symbol], alphabet: &Alphabet) -> Option<Vec<u8>> {
    symbols
        .iter()
        .map(|s| match s {
            Symbol::Wildcard => Some(WILDCARD_BYTE),
            Symbol::Letter(r) => alphabet.letter(*r as usize),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_wildcards_and_letters() {
        let a = Alphabet::from_letters(*b"ab").unwrap();
        let p = parse_pattern(b"a?b", &a).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.wildcard_count(), 1);
        assert_eq!(p.wildcard_mask(), [false, true, false]);
        assert_eq!(
            p.symbols(),
            [Symbol::Letter(0), Symbol::Wildcard, Symbol::Letter(1)]
        );
    }

    #[test]
    fn rejects_unknown_letters_and_empty_patterns() {
        let a = Alphabet::from_letters(*b"ab").unwrap();
        assert_eq!(
            parse_pattern(b"axb", &a),
            Err(ParseError::UnknownLetter {
                byte: b'x',
                offset: 1
            })
        );
        assert!(matches!(
            parse_pattern(b"", &a),
            Err(ParseError::Core(CoreError::EmptyPattern))
        ));
        // texts may be empty
        assert_eq!(parse_text(b"", &a).unwrap().len(), 0);
    }

    #[test]
    fn inference_collects_sorted_distinct_letters() {
        let a = infer_alphabet(&[b"ba?na", b"nab"]).unwrap();
        assert_eq!(a.sigma(), 3);
        assert_eq!(a.rank(b'a'), Some(0));
        assert_eq!(a.rank(b'b'), Some(1));
        assert_eq!(a.rank(b'n'), Some(2));
        assert_eq!(a.rank(b'?'), None);
    }

    #[test]
    fn inference_pads_to_sigma_two() {
        let a = infer_alphabet(&[b"aaa?a"]).unwrap();
        assert_eq!(a.sigma(), 2);
        assert_eq!(a.letter(1), None);
        let all_wild = infer_alphabet(&[b"???"]).unwrap();
        assert_eq!(all_wild.sigma(), 2);
    }

    #[test]
    fn wildcard_byte_is_never_a_letter() {
        assert_eq!(
            Alphabet::from_letters(*b"a?"),
            Err(CoreError::WildcardLetter)
        );
    }

    #[test]
    fn render_roundtrip() {
        let a = Alphabet::from_letters(*b"ab").unwrap();
        let p = parse_pattern(b"ab?a", &a).unwrap();
        assert_eq!(render(p.symbols(), &a).unwrap(), b"ab?a");
    }
}
