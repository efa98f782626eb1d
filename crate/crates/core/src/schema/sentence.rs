use serde::{Deserialize, Serialize};

use super::span::{TokenRange, TokenSpan};
use crate::error::{Error, Result};

/// Tokenized source sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub id: String,
    pub text: String,
    pub tokens: Vec<TokenSpan>,
}

/// Splits raw text into character-anchored tokens.
pub trait Tokenizer {
    fn tokenize(&self, text: &str) -> Vec<TokenSpan>;
}

/// Whitespace splitting with leading and trailing punctuation detached into
/// single-character tokens. Word-internal punctuation ("30-acre", "team's")
/// stays attached.
#[derive(Debug, Clone, Copy, Default)]
pub struct SimpleTokenizer;

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

impl Tokenizer for SimpleTokenizer {
    fn tokenize(&self, text: &str) -> Vec<TokenSpan> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            if chars[i].is_whitespace() {
                i += 1;
                continue;
            }
            let mut j = i;
            while j < chars.len() && !chars[j].is_whitespace() {
                j += 1;
            }
            // chunk is chars[i..j]
            let mut lo = i;
            let mut hi = j;
            while lo < hi && is_punct(chars[lo]) {
                out.push(TokenSpan::new(lo, lo + 1));
                lo += 1;
            }
            let mut trailing = Vec::new();
            while hi > lo && is_punct(chars[hi - 1]) {
                trailing.push(TokenSpan::new(hi - 1, hi));
                hi -= 1;
            }
            if lo < hi {
                out.push(TokenSpan::new(lo, hi));
            }
            out.extend(trailing.into_iter().rev());
            i = j;
        }
        out
    }
}

impl Sentence {
    /// Builds a sentence from explicit token spans, checking ordering and bounds.
    pub fn new(id: impl Into<String>, text: impl Into<String>, tokens: Vec<TokenSpan>) -> Result<Self> {
        let s = Self {
            id: id.into(),
            text: text.into(),
            tokens,
        };
        s.check()?;
        Ok(s)
    }

    pub fn tokenize(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self::tokenize_with(&SimpleTokenizer, id, text)
    }

    pub fn tokenize_with(tokenizer: &dyn Tokenizer, id: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        let tokens = tokenizer.tokenize(&text);
        Self {
            id: id.into(),
            text,
            tokens,
        }
    }

    /// Checks the token invariants: nonempty, strictly ordered,
    /// non-overlapping and within the text.
    pub fn check(&self) -> Result<()> {
        let n = self.text.chars().count();
        let mut prev_end = 0;
        for (i, t) in self.tokens.iter().enumerate() {
            if t.start >= t.end {
                return Err(Error::InvalidSentence(format!(
                    "sentence {}: token {i} is empty ({}..{})",
                    self.id, t.start, t.end
                )));
            }
            if t.end > n {
                return Err(Error::InvalidSentence(format!(
                    "sentence {}: token {i} ends at {} beyond text length {n}",
                    self.id, t.end
                )));
            }
            if i > 0 && t.start < prev_end {
                return Err(Error::InvalidSentence(format!(
                    "sentence {}: token {i} overlaps or precedes token {}",
                    self.id,
                    i - 1
                )));
            }
            prev_end = t.end;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    fn byte_offset(&self, char_index: usize) -> Option<usize> {
        if char_index == self.text.chars().count() {
            return Some(self.text.len());
        }
        self.text.char_indices().nth(char_index).map(|(b, _)| b)
    }

    fn slice_chars(&self, start: usize, end: usize) -> Option<&str> {
        let b0 = self.byte_offset(start)?;
        let b1 = self.byte_offset(end)?;
        self.text.get(b0..b1)
    }

    pub fn token_text(&self, index: usize) -> Option<&str> {
        let t = self.tokens.get(index)?;
        self.slice_chars(t.start, t.end)
    }

    /// Text covered by an inclusive token range, with the sentence's own
    /// inter-token spacing. `None` for inverted or out-of-bounds ranges.
    pub fn range_text(&self, range: TokenRange) -> Option<&str> {
        if !range.is_valid() || range.last >= self.tokens.len() {
            return None;
        }
        self.slice_chars(self.tokens[range.first].start, self.tokens[range.last].end)
    }

    /// All token ranges whose covered text equals `phrase` exactly, in order
    /// of their first token.
    pub fn find_phrase(&self, phrase: &str) -> Vec<TokenRange> {
        let phrase = phrase.trim();
        if phrase.is_empty() {
            return Vec::new();
        }
        let mut offsets: Vec<usize> = self.text.char_indices().map(|(b, _)| b).collect();
        offsets.push(self.text.len());
        let byte = |c: usize| offsets.get(c).copied();
        let mut hits = Vec::new();
        for first in 0..self.tokens.len() {
            let Some(b0) = byte(self.tokens[first].start) else { continue };
            if !self.text[b0..].starts_with(phrase) {
                continue;
            }
            let target_end = b0 + phrase.len();
            for last in first..self.tokens.len() {
                let Some(b1) = byte(self.tokens[last].end) else { break };
                if b1 == target_end {
                    hits.push(TokenRange::new(first, last));
                    break;
                }
                if b1 > target_end {
                    break;
                }
            }
        }
        hits
    }

    /// Text with the token at `index` wrapped in `<f></f>` markers.
    pub fn marked_text(&self, index: usize) -> Option<String> {
        let t = self.tokens.get(index)?;
        let b0 = self.byte_offset(t.start)?;
        let b1 = self.byte_offset(t.end)?;
        Some(format!(
            "{}<f>{}</f>{}",
            &self.text[..b0],
            &self.text[b0..b1],
            &self.text[b1..]
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(s: &Sentence) -> Vec<&str> {
        (0..s.len()).map(|i| s.token_text(i).unwrap()).collect()
    }

    #[test]
    fn detaches_edge_punctuation() {
        let s = Sentence::tokenize("s1", "Valley Ranch is the team's 30-acre practice camp.");
        assert_eq!(
            words(&s),
            ["Valley", "Ranch", "is", "the", "team's", "30-acre", "practice", "camp", "."]
        );
        s.check().unwrap();
    }

    #[test]
    fn quotes_and_parentheses() {
        let s = Sentence::tokenize("s", "(\"Hello,\" she said)");
        assert_eq!(words(&s), ["(", "\"", "Hello", ",", "\"", "she", "said", ")"]);
    }

    #[test]
    fn multibyte_offsets_are_chars() {
        let s = Sentence::tokenize("s", "from 2012–2019 in Zürich.");
        assert_eq!(words(&s), ["from", "2012–2019", "in", "Zürich", "."]);
        assert_eq!(s.tokens[3], TokenSpan::new(18, 24));
        assert_eq!(s.range_text(TokenRange::new(1, 3)), Some("2012–2019 in Zürich"));
    }

    #[test]
    fn rejects_overlapping_tokens() {
        let err = Sentence::new("x", "ab cd", vec![TokenSpan::new(0, 3), TokenSpan::new(2, 5)]);
        assert!(err.is_err());
        let err = Sentence::new("x", "ab", vec![TokenSpan::new(0, 3)]);
        assert!(err.is_err());
        let err = Sentence::new("x", "ab", vec![TokenSpan::new(1, 1)]);
        assert!(err.is_err());
    }

    #[test]
    fn find_phrase_respects_token_boundaries() {
        let s = Sentence::tokenize("s", "the cat and the catalog and the cat");
        assert_eq!(
            s.find_phrase("the cat"),
            vec![TokenRange::new(0, 1), TokenRange::new(6, 7)]
        );
        assert!(s.find_phrase("cat and the cata").is_empty());
        assert!(s.find_phrase("").is_empty());
    }

    #[test]
    fn marked_text_wraps_target() {
        let s = Sentence::tokenize("s", "She wrote articles.");
        assert_eq!(s.marked_text(2).unwrap(), "She wrote <f>articles</f>.");
    }
}
