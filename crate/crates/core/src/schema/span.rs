use serde::{Deserialize, Serialize};

/// Character-anchored token boundaries, in Unicode scalar offsets into the
/// sentence text. `end` is exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TokenSpan {
    pub start: usize,
    pub end: usize,
}

impl TokenSpan {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }
}

/// Inclusive range of token indices `[first, last]`.
///
/// A range with `first > last` is representable so that malformed input can
/// be reported by validation instead of failing to load.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TokenRange {
    #[serde(rename = "first_token")]
    pub first: usize,
    #[serde(rename = "last_token")]
    pub last: usize,
}

impl TokenRange {
    pub fn new(first: usize, last: usize) -> Self {
        Self { first, last }
    }

    pub fn single(index: usize) -> Self {
        Self::new(index, index)
    }

    pub fn is_valid(&self) -> bool {
        self.first <= self.last
    }

    /// Number of tokens covered; zero for an inverted range.
    pub fn len(&self) -> usize {
        if self.is_valid() {
            self.last - self.first + 1
        } else {
            0
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, index: usize) -> bool {
        self.is_valid() && self.first <= index && index <= self.last
    }

    pub fn intersection_len(&self, other: &TokenRange) -> usize {
        if !self.is_valid() || !other.is_valid() {
            return 0;
        }
        let lo = self.first.max(other.first);
        let hi = self.last.min(other.last);
        if lo > hi {
            0
        } else {
            hi - lo + 1
        }
    }

    pub fn union_len(&self, other: &TokenRange) -> usize {
        self.len() + other.len() - self.intersection_len(other)
    }
}

impl std::fmt::Display for TokenRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{}]", self.first, self.last)
    }
}
