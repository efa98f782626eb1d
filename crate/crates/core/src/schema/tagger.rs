//! Noun-target detection.

use std::collections::HashMap;
use std::io::Write;
use std::process::{Command, Stdio};

use super::sentence::Sentence;
use crate::error::{Error, Result};

/// Finds the token indices that are nouns.
pub trait NounTagger: Send + Sync {
    fn noun_indices(&self, sentence: &Sentence) -> Result<Vec<usize>>;
}

/// Closed-class words never treated as nouns.
const FUNCTION_WORDS: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "my", "your", "his", "her", "its", "our",
    "their", "some", "any", "each", "every", "no", "several", "many", "much", "few", "various",
    "all", "both", "either", "neither", "i", "you", "he", "she", "it", "we", "they", "me", "him",
    "us", "them", "who", "whom", "whose", "which", "what", "where", "when", "why", "how", "in",
    "on", "at", "by", "for", "with", "from", "to", "of", "into", "onto", "over", "under", "about",
    "after", "before", "between", "through", "during", "without", "within", "against", "among",
    "across", "along", "around", "behind", "beyond", "near", "since", "until", "upon", "via",
    "and", "or", "but", "nor", "so", "yet", "if", "than", "as", "because", "while", "although",
    "though", "is", "are", "was", "were", "be", "been", "being", "am", "has", "have", "had",
    "having", "do", "does", "did", "will", "would", "shall", "should", "can", "could", "may",
    "might", "must", "not", "also", "very", "too", "just", "only", "even", "still", "then",
    "there", "here", "now", "again", "already", "often", "never", "always", "later", "including",
];

/// Words after which a candidate run is taken to be a noun phrase.
const NP_OPENERS: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "my", "your", "his", "her", "its", "our",
    "their", "some", "any", "each", "every", "no", "several", "many", "much", "few", "various",
    "all", "both", "in", "on", "at", "by", "for", "with", "from", "to", "of", "into", "onto",
    "over", "under", "about", "after", "before", "between", "through", "during", "without",
    "within", "against", "among", "across", "along", "around", "behind", "beyond", "near",
    "since", "until", "upon", "via", "and", "or", "including", "whose",
];

/// Heuristic fallback: the last word of each run of open-class words is a
/// noun when the run opens a noun phrase (after a determiner, preposition or
/// conjunction, at the sentence start, or when the run has two or more
/// words or is capitalized mid-sentence).
#[derive(Debug, Clone, Copy, Default)]
pub struct HeuristicTagger;

fn is_wordlike(token: &str) -> bool {
    let mut chars = token.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic())
        && token.chars().all(|c| c.is_alphabetic() || c == '-' || c == '\'')
}

fn is_open_class(token: &str) -> bool {
    let lower = token.to_lowercase();
    is_wordlike(token) && !FUNCTION_WORDS.contains(&lower.as_str()) && !lower.ends_with("ly")
}

impl NounTagger for HeuristicTagger {
    fn noun_indices(&self, sentence: &Sentence) -> Result<Vec<usize>> {
        let words: Vec<&str> = (0..sentence.len())
            .map(|i| sentence.token_text(i).unwrap_or_default())
            .collect();
        let mut nouns = Vec::new();
        let mut i = 0;
        while i < words.len() {
            if !is_open_class(words[i]) {
                i += 1;
                continue;
            }
            let start = i;
            while i < words.len() && is_open_class(words[i]) {
                i += 1;
            }
            let head = i - 1;
            let opener = start
                .checked_sub(1)
                .map(|p| words[p].to_lowercase())
                .map(|w| NP_OPENERS.contains(&w.as_str()) || w.chars().all(|c| c.is_ascii_digit()));
            let capitalized_mid = start > 0 && words[head].chars().next().is_some_and(char::is_uppercase);
            if opener.unwrap_or(true) || head > start || capitalized_mid {
                nouns.push(head);
            }
        }
        Ok(nouns)
    }
}

/// Noun indices supplied ahead of time, keyed by sentence id.
#[derive(Debug, Clone, Default)]
pub struct FixedTagger {
    pub nouns: HashMap<String, Vec<usize>>,
}

impl FixedTagger {
    pub fn new(nouns: HashMap<String, Vec<usize>>) -> Self {
        Self { nouns }
    }
}

impl NounTagger for FixedTagger {
    fn noun_indices(&self, sentence: &Sentence) -> Result<Vec<usize>> {
        Ok(self.nouns.get(&sentence.id).cloned().unwrap_or_default())
    }
}

/// Runs an external tagger process per sentence. The process receives
/// `{"id", "text", "tokens": [string]}` as one JSON line on stdin and must
/// print a JSON array of noun token indices.
#[derive(Debug, Clone)]
pub struct CommandTagger {
    pub program: String,
    pub args: Vec<String>,
}

impl NounTagger for CommandTagger {
    fn noun_indices(&self, sentence: &Sentence) -> Result<Vec<usize>> {
        let tokens: Vec<&str> = (0..sentence.len())
            .map(|i| sentence.token_text(i).unwrap_or_default())
            .collect();
        let input = serde_json::json!({ "id": sentence.id, "text": sentence.text, "tokens": tokens });
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()?;
        {
            let mut stdin = child.stdin.take().expect("stdin is piped");
            writeln!(stdin, "{input}")?;
        }
        let output = child.wait_with_output()?;
        if !output.status.success() {
            return Err(Error::Usage(format!(
                "tagger {} exited with {}: {}",
                self.program,
                output.status,
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        let mut indices: Vec<usize> = serde_json::from_slice(&output.stdout)?;
        indices.retain(|&i| i < sentence.len());
        indices.sort_unstable();
        indices.dedup();
        Ok(indices)
    }
}

/// Uses `primary`, falling back to the heuristic when it fails.
pub struct FallbackTagger<T> {
    pub primary: T,
}

impl<T: NounTagger> NounTagger for FallbackTagger<T> {
    fn noun_indices(&self, sentence: &Sentence) -> Result<Vec<usize>> {
        self.primary
            .noun_indices(sentence)
            .or_else(|_| HeuristicTagger.noun_indices(sentence))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nouns(text: &str) -> Vec<String> {
        let s = Sentence::tokenize("s", text);
        HeuristicTagger
            .noun_indices(&s)
            .unwrap()
            .into_iter()
            .map(|i| s.token_text(i).unwrap().to_string())
            .collect()
    }

    #[test]
    fn heuristic_finds_common_heads() {
        assert_eq!(nouns("The album was released in 1971."), ["album"]);
        assert_eq!(
            nouns("She has written articles and essays for various journals."),
            ["articles", "essays", "journals"]
        );
        assert_eq!(
            nouns("Father Tompkins also played a significant role in shaping the labor movement in Nova Scotia."),
            ["Tompkins", "role", "shaping", "movement", "Scotia"]
        );
    }

    #[test]
    fn fixed_and_fallback() {
        let s = Sentence::tokenize("s9", "The album was released.");
        let fixed = FixedTagger::new(HashMap::from([("s9".to_string(), vec![1])]));
        assert_eq!(fixed.noun_indices(&s).unwrap(), [1]);
        let broken = CommandTagger {
            program: "/nonexistent/tagger".into(),
            args: vec![],
        };
        assert!(broken.noun_indices(&s).is_err());
        let fb = FallbackTagger { primary: broken };
        assert_eq!(fb.noun_indices(&s).unwrap(), [1]);
    }

    #[test]
    fn command_tagger_protocol() {
        let s = Sentence::tokenize("s", "The album was released.");
        let t = CommandTagger {
            program: "sh".into(),
            args: vec!["-c".into(), "cat >/dev/null; echo '[1, 1, 99]'".into()],
        };
        assert_eq!(t.noun_indices(&s).unwrap(), [1]);
    }
}
