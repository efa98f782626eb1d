//! QA-Noun data model, question grammar and dataset format.

pub mod dataset;
pub mod grammar;
pub mod record;
pub mod sentence;
pub mod span;
pub mod stats;
pub mod tagger;
pub mod template;
pub mod validate;

pub use dataset::{read_dataset, read_dataset_file, write_dataset, DatasetRecord, Split};
pub use grammar::{parse_question, render_question};
pub use record::{AnnotationRecord, NounTarget, Phase, QAPair};
pub use sentence::{Sentence, SimpleTokenizer, Tokenizer};
pub use span::{TokenRange, TokenSpan};
pub use stats::{dataset_stats, DatasetStats};
pub use tagger::{HeuristicTagger, NounTagger};
pub use template::{Amount, PartMember, QuestionForm, TemplateId, WhChoice};
pub use validate::{validate_record, Rule, Violation};
