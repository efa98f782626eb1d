//! Few-shot QA-Noun parsing through chat-completion endpoints.
//!
//! [`prompt`] builds the parser prompt, [`format`] renders and parses the
//! three-line QA output format, [`endpoint`] talks to inference servers with
//! retries, bounded concurrency and replay logs, [`judge`] asks a model
//! whether a QA pair is entailed by its sentence, and [`parser`] ties them
//! into a noun parser.

pub mod endpoint;
pub mod error;
pub mod format;
pub mod judge;
pub mod parser;
pub mod prompt;

pub use endpoint::{ChatClient, ChatMessage, Gateway, InferenceEndpoint, RetryPolicy};
pub use error::{GatewayError, Result};
pub use format::{parse_output, render_output, ParseOutcome, NO_QAS_SENTINEL};
pub use judge::{judge_entailment, judge_equivalent, judge_text, EntailmentVerdict, QaText};
pub use parser::NounParser;
pub use prompt::{build_prompt, ExemplarSet};
