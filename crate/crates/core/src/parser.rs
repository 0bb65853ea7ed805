//! SAMPA utterance parser: `.`-separated syllables, tokenized by longest
//! match against the inventory's phoneme symbols and split into onset,
//! nucleus and coda.

use std::fmt;

use thiserror::Error;

use crate::inventory::Inventory;

pub const MAX_SYLLABLES: usize = 3;
pub const MAX_ONSET: usize = 2;
pub const MAX_NUCLEUS: usize = 3;
pub const MAX_CODA: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty utterance")]
    Empty,
    #[error("unknown symbol at byte {position}: `{rest}`")]
    UnknownSymbol { position: usize, rest: String },
    #[error("empty syllable {syllable}")]
    EmptySyllable { syllable: usize },
    #[error("syllable {syllable}: {message}")]
    Structure { syllable: usize, message: String },
    #[error("syllable {syllable}: vowel `{symbol}` after coda consonant")]
    VowelAfterCoda { syllable: usize, symbol: String },
}

impl ParseError {
    /// Whether the input was lexically fine but violates the syllable
    /// structure constraints.
    pub fn is_structural(&self) -> bool {
        !matches!(self, ParseError::Empty | ParseError::UnknownSymbol { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Syllable {
    pub onset: Vec<String>,
    pub nucleus: Vec<String>,
    pub coda: Vec<String>,
}

impl Syllable {
    pub fn segments(&self) -> impl Iterator<Item = &str> {
        self.onset
            .iter()
            .chain(&self.nucleus)
            .chain(&self.coda)
            .map(String::as_str)
    }

    /// Concatenated symbols, used as the syllabary key.
    pub fn key(&self) -> String {
        self.segments().collect()
    }
}

impl fmt::Display for Syllable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Utterance {
    pub syllables: Vec<Syllable>,
    pub source: String,
}

impl Utterance {
    pub fn segments(&self) -> impl Iterator<Item = &str> {
        self.syllables.iter().flat_map(Syllable::segments)
    }
}

impl fmt::Display for Utterance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let keys: Vec<String> = self.syllables.iter().map(Syllable::key).collect();
        f.write_str(&keys.join("."))
    }
}

/// Inventory symbols sorted longest first, for maximal munch.
fn lexicon(inv: &Inventory) -> Vec<&str> {
    let mut symbols: Vec<&str> = inv.symbols().collect();
    symbols.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    symbols
}

fn tokenize<'a>(text: &str, base: usize, lexicon: &[&'a str]) -> Result<Vec<&'a str>, ParseError> {
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < text.len() {
        let rest = &text[pos..];
        let symbol = lexicon
            .iter()
            .find(|s| rest.starts_with(**s))
            .ok_or_else(|| ParseError::UnknownSymbol {
                position: base + pos,
                rest: rest.to_string(),
            })?;
        out.push(*symbol);
        pos += symbol.len();
    }
    Ok(out)
}

pub fn parse_utterance(text: &str, inv: &Inventory) -> Result<Utterance, ParseError> {
    if text.is_empty() {
        return Err(ParseError::Empty);
    }
    let lexicon = lexicon(inv);
    let mut syllables = Vec::new();
    let mut offset = 0;
    for (n, chunk) in text.split('.').enumerate() {
        let index = n + 1;
        if chunk.is_empty() {
            return Err(ParseError::EmptySyllable { syllable: index });
        }
        let tokens = tokenize(chunk, offset, &lexicon)?;
        offset += chunk.len() + 1;
        syllables.push(structure(index, &tokens, inv)?);
    }
    if syllables.len() > MAX_SYLLABLES {
        return Err(ParseError::Structure {
            syllable: syllables.len(),
            message: format!(
                "{} syllables, at most {MAX_SYLLABLES} allowed",
                syllables.len()
            ),
        });
    }
    Ok(Utterance {
        syllables,
        source: text.to_string(),
    })
}

fn structure(index: usize, tokens: &[&str], inv: &Inventory) -> Result<Syllable, ParseError> {
    let mut syl = Syllable::default();
    let mut seen_vowel = false;
    for &tok in tokens {
        let vowel = inv.is_vowel(tok);
        match (vowel, seen_vowel, syl.coda.is_empty()) {
            (true, _, false) => {
                return Err(ParseError::VowelAfterCoda {
                    syllable: index,
                    symbol: tok.to_string(),
                })
            }
            (true, _, true) => {
                seen_vowel = true;
                syl.nucleus.push(tok.to_string());
            }
            (false, false, _) => syl.onset.push(tok.to_string()),
            (false, true, _) => syl.coda.push(tok.to_string()),
        }
    }
    let fail = |message: String| ParseError::Structure {
        syllable: index,
        message,
    };
    if syl.nucleus.is_empty() {
        return Err(fail("no vowel".into()));
    }
    if syl.onset.len() > MAX_ONSET {
        return Err(fail(format!(
            "{} onset consonants, at most {MAX_ONSET} allowed",
            syl.onset.len()
        )));
    }
    if syl.nucleus.len() > MAX_NUCLEUS {
        return Err(fail(format!(
            "{} vocalic segments, at most {MAX_NUCLEUS} allowed",
            syl.nucleus.len()
        )));
    }
    if syl.coda.len() > MAX_CODA {
        return Err(fail(format!(
            "{} coda consonants, at most {MAX_CODA} allowed",
            syl.coda.len()
        )));
    }
    Ok(syl)
}
