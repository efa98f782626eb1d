use std::sync::Arc;

use qanoun_core::schema::{NounTarget, QAPair, QuestionForm, Sentence, TokenRange};
use qanoun_llm::endpoint::{ChatClient, ChatMessage, FnClient, Gateway, InferenceEndpoint, ReplayClient, ReplayLog, ScriptedClient};
use qanoun_llm::judge::{judge_entailment, JUDGE_PROMPT_VERSION, REPROMPT};
use qanoun_llm::{GatewayError, NounParser};
use qanoun_llm::prompt::ExemplarSet;

fn album() -> (Sentence, NounTarget, QAPair) {
    let s = Sentence::tokenize("s1", "The album was released in 1971.");
    let t = NounTarget::new(&s, 1).unwrap();
    let qa = QAPair::from_range(&s, QuestionForm::time(), TokenRange::single(5)).unwrap();
    (s, t, qa)
}

fn gateway(client: Arc<dyn qanoun_llm::ChatClient>) -> Gateway {
    Gateway::new(InferenceEndpoint::stub("judge-stub"), client).unwrap()
}

#[test]
fn yes_means_entailed() {
    let (s, t, qa) = album();
    let client = Arc::new(ScriptedClient::replies(["yes"]));
    let v = judge_entailment(&s, &t, &qa, &gateway(client.clone())).unwrap();
    assert!(v.entailed && !v.reprompted);
    assert_eq!(v.judge_model, "judge-stub");
    assert_eq!(v.raw_response, vec!["yes"]);
    assert_eq!(v.prompt_version, JUDGE_PROMPT_VERSION);
    let sent = &client.requests()[0][0].content;
    assert!(sent.contains("Question: When is the album?\nAnswer: 1971"));
}

#[test]
fn maybe_then_no_is_not_entailed_with_reprompt() {
    let (s, t, qa) = album();
    let client = Arc::new(ScriptedClient::replies(["maybe", "No."]));
    let v = judge_entailment(&s, &t, &qa, &gateway(client.clone())).unwrap();
    assert!(!v.entailed && v.reprompted);
    assert_eq!(v.raw_response, vec!["maybe", "No."]);
    let second = &client.requests()[1];
    assert_eq!(second.len(), 3);
    assert_eq!(second[1], ChatMessage::assistant("maybe"));
    assert_eq!(second[2], ChatMessage::user(REPROMPT));
}

#[test]
fn two_unclear_replies_are_indeterminate() {
    let (s, t, qa) = album();
    let client = Arc::new(ScriptedClient::replies(["maybe", "hard to say"]));
    match judge_entailment(&s, &t, &qa, &gateway(client)) {
        Err(GatewayError::IndeterminateVerdict { response }) => assert_eq!(response, "hard to say"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn endpoint_down_fails_after_configured_attempts() {
    let (s, t, qa) = album();
    let client = Arc::new(ScriptedClient::down());
    let gw = gateway(client.clone());
    match judge_entailment(&s, &t, &qa, &gw) {
        Err(GatewayError::Transport { attempts, .. }) => assert_eq!(attempts, 3),
        other => panic!("{other:?}"),
    }
    assert_eq!(client.requests().len(), 3);
}

fn deterministic_stub() -> Arc<dyn ChatClient> {
    Arc::new(FnClient(|m: &[ChatMessage]| {
        let prompt = &m.last().unwrap().content;
        if prompt.starts_with("Read the Sentence") {
            Ok("QAs:\nQuestion template number: 9\nQuestion: When is the album?\nAnswer: 1971".to_string())
        } else {
            Ok(if prompt.contains("1971") { "yes" } else { "no" }.to_string())
        }
    }))
}

#[test]
fn parse_then_judge_is_reproducible_and_replayable() {
    let (s, t, _) = album();
    let dir = tempfile::tempdir().unwrap();
    let log_path = dir.path().join("replay.jsonl");
    let run = |gw: &Gateway| {
        let parser = NounParser::new(gw.clone(), ExemplarSet::builtin()).unwrap();
        let outcome = parser.parse(&s, &t).unwrap();
        let verdicts: Vec<_> = outcome
            .qas
            .iter()
            .map(|qa| judge_entailment(&s, &t, qa, gw).unwrap())
            .collect();
        (outcome, verdicts)
    };
    let live = gateway(deterministic_stub()).with_recorder(ReplayLog::open(&log_path).unwrap());
    let a = run(&live);
    let b = run(&gateway(deterministic_stub()));
    assert_eq!(a, b);
    assert_eq!(a.0.qas.len(), 1);
    assert!(a.1[0].entailed);

    let replay = ReplayClient::load(&log_path).unwrap();
    assert_eq!(replay.len(), 2);
    assert_eq!(run(&gateway(Arc::new(replay))), a);
}

#[test]
fn batch_results_keep_input_order() {
    let client = Arc::new(FnClient(|m: &[ChatMessage]| {
        let n: u64 = m[0].content.parse().unwrap();
        std::thread::sleep(std::time::Duration::from_millis((20 - n) % 7));
        Ok(format!("reply {n}"))
    }));
    let mut ep = InferenceEndpoint::stub("m");
    ep.max_in_flight = 4;
    let gw = Gateway::new(ep, client).unwrap();
    let batch: Vec<Vec<ChatMessage>> = (0..20).map(|i| vec![ChatMessage::user(i.to_string())]).collect();
    let got: Vec<String> = gw.complete_all(&batch).into_iter().map(Result::unwrap).collect();
    let want: Vec<String> = (0..20).map(|i| format!("reply {i}")).collect();
    assert_eq!(got, want);
}
