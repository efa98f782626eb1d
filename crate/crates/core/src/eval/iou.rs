use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::schema::TokenRange;

/// Token-level intersection over union of two inclusive ranges. Inverted
/// ranges cover no tokens; two empty ranges have IoU 0.
pub fn token_iou(a: TokenRange, b: TokenRange) -> Ratio<u64> {
    let union = a.union_len(&b) as u64;
    if union == 0 {
        return Ratio::from_integer(0);
    }
    Ratio::new(a.intersection_len(&b) as u64, union)
}

/// Whether two ranges overlap enough to be aligned: IoU strictly above 1/2.
pub fn is_match_eligible(a: TokenRange, b: TokenRange) -> bool {
    2 * a.intersection_len(&b) > a.union_len(&b)
}

/// A token range tied to the sentence it indexes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScopedRange<'a> {
    pub sentence_id: &'a str,
    pub range: TokenRange,
}

impl<'a> ScopedRange<'a> {
    pub fn new(sentence_id: &'a str, range: TokenRange) -> Self {
        Self { sentence_id, range }
    }

    /// IoU against another range over the same sentence.
    pub fn iou(&self, other: &ScopedRange<'_>) -> Result<Ratio<u64>> {
        if self.sentence_id != other.sentence_id {
            return Err(Error::Usage(format!(
                "cannot compare ranges from sentences {:?} and {:?}",
                self.sentence_id, other.sentence_id
            )));
        }
        if !self.range.is_valid() || !other.range.is_valid() {
            return Err(Error::Usage(format!(
                "invalid range in IoU: {} vs {}",
                self.range, other.range
            )));
        }
        Ok(token_iou(self.range, other.range))
    }
}
