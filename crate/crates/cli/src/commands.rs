use std::collections::HashMap;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde_json::json;

use qanoun_core::eval::report::ScoreReport;
use qanoun_core::eval::{evaluate_corpus, iaa, iaa_from_dataset, AveragingMode, IaaReport};
use qanoun_core::schema::dataset::{dataset_to_string, QaEntry, RecordEntry, TargetEntry};
use qanoun_core::schema::stats::compare_with_published;
use qanoun_core::schema::tagger::{CommandTagger, FixedTagger};
use qanoun_core::schema::{
    dataset_stats, read_dataset_file, AnnotationRecord, DatasetRecord, HeuristicTagger, NounTagger, NounTarget, Phase,
    Sentence,
};
use qanoun_decomp::sources::{EndpointVerbSource, LlmRedundancyJudge, LlmUnitJudge, PromptVerbSource};
use qanoun_decomp::stub::Script;
use qanoun_decomp::{report_outcomes, Pipeline, ReportConfig, VerbUnitSource};
use qanoun_llm::endpoint::{ReplayClient, ReplayLog};
use qanoun_llm::{ExemplarSet, Gateway, InferenceEndpoint, NounParser};

use crate::error::{CliError, Result};
use crate::{
    Command, DecomposeArgs, EvalArgs, IaaArgs, Mode, ParseArgs, PhaseArg, ServeArgs, StatsArgs, TaggerArgs, TaggerKind,
    ValidateArgs,
};

pub fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    match command {
        Command::Validate(a) => validate(a, out, err),
        Command::Stats(a) => stats(a, out).map(|_| 0),
        Command::Eval(a) => eval(a, out).map(|_| 0),
        Command::Iaa(a) => agreement(a, out, err).map(|_| 0),
        Command::Parse(a) => parse(a, out, err).map(|_| 0),
        Command::Decompose(a) => decompose(a, out, err).map(|_| 0),
        Command::Serve(a) => serve(a).map(|_| 0),
    }
}

fn load(path: &Path) -> Result<Vec<DatasetRecord>> {
    if !path.is_file() {
        return Err(CliError::Usage(format!("{}: no such file", path.display())));
    }
    read_dataset_file(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn tagger(args: &TaggerArgs) -> Arc<dyn NounTagger> {
    match (&args.tagger_cmd, args.tagger) {
        (Some(program), _) => Arc::new(CommandTagger {
            program: program.clone(),
            args: Vec::new(),
        }),
        (None, TaggerKind::Heuristic) => Arc::new(HeuristicTagger),
        (None, TaggerKind::None) => Arc::new(FixedTagger::new(HashMap::new())),
    }
}

/// Uses a dataset's own targets where it lists any, the fallback elsewhere.
struct DatasetTagger {
    listed: HashMap<String, Vec<usize>>,
    fallback: Arc<dyn NounTagger>,
}

impl DatasetTagger {
    fn new(records: &[DatasetRecord], fallback: Arc<dyn NounTagger>) -> Self {
        let listed = records
            .iter()
            .filter(|r| !r.targets.is_empty())
            .map(|r| (r.id.clone(), r.targets.iter().map(|t| t.token_index).collect()))
            .collect();
        Self { listed, fallback }
    }
}

impl NounTagger for DatasetTagger {
    fn noun_indices(&self, sentence: &Sentence) -> qanoun_core::Result<Vec<usize>> {
        match self.listed.get(&sentence.id) {
            Some(ix) => Ok(ix.clone()),
            None => self.fallback.noun_indices(sentence),
        }
    }
}

fn validate(a: ValidateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    let records = load(&a.dataset)?;
    let tagger = HeuristicTagger;
    let check: Option<&dyn NounTagger> = if a.check_nouns { Some(&tagger) } else { None };
    let mut total = 0;
    for r in &records {
        for v in r.validate(check) {
            total += 1;
            if a.json {
                writeln!(out, "{}", serde_json::to_string(&v).expect("violation serializes"))?;
            } else {
                writeln!(out, "{v}")?;
            }
        }
    }
    writeln!(err, "{} record(s), {total} violation(s)", records.len())?;
    Ok(u8::from(total > 0))
}

fn stats(a: StatsArgs, out: &mut dyn Write) -> Result<()> {
    let records = load(&a.dataset)?;
    let stats = dataset_stats(&records)?;
    let discrepancies = if a.published { compare_with_published(&stats) } else { Vec::new() };
    if a.json {
        let mut v = json!({ "stats": stats });
        if a.published {
            v["discrepancies"] = json!(discrepancies);
        }
        writeln!(out, "{v}")?;
        return Ok(());
    }
    writeln!(out, "{stats}")?;
    for d in &discrepancies {
        writeln!(out, "discrepancy: {}: published {}, computed {}", d.quantity, d.published, d.computed)?;
    }
    Ok(())
}

fn scores_line(r: &ScoreReport) -> String {
    format!("P={} R={} F1={}", r.precision, r.recall, r.f1)
}

fn eval(a: EvalArgs, out: &mut dyn Write) -> Result<()> {
    let pred = load(&a.pred)?;
    let gold = load(&a.gold)?;
    let mode = match a.mode {
        Mode::Micro => AveragingMode::Micro,
        Mode::Macro => AveragingMode::Macro,
    };
    let report = evaluate_corpus(&pred, &gold, mode)?;
    if a.json {
        writeln!(out, "{}", report.to_json())?;
    } else {
        writeln!(out, "{}", scores_line(&report))?;
    }
    Ok(())
}

/// Pairs the two independent records of every target that has exactly two.
pub fn independent_pairs(records: &[DatasetRecord]) -> Result<(Vec<Vec<AnnotationRecord>>, usize)> {
    let mut groups = Vec::new();
    let mut skipped = 0;
    for record in records {
        let sentence = record.sentence()?;
        for target in &record.targets {
            let group: Vec<AnnotationRecord> = target
                .records
                .iter()
                .filter(|r| r.phase == Phase::Independent)
                .map(|r| record.to_annotation_record(&sentence, target, r))
                .collect();
            match group.len() {
                2 => groups.push(group),
                _ => skipped += 1,
            }
        }
    }
    Ok((groups, skipped))
}

fn agreement(a: IaaArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let records = load(&a.dataset)?;
    let report: IaaReport = match a.phase {
        PhaseArg::Consolidated => iaa_from_dataset(&records)?,
        PhaseArg::Independent => {
            let (groups, skipped) = independent_pairs(&records)?;
            if skipped > 0 {
                writeln!(err, "skipped {skipped} target(s) without exactly two independent records")?;
            }
            iaa(&groups)?
        }
    };
    let per_target: Vec<_> = report
        .targets
        .iter()
        .map(|t| (t.sentence_id.clone(), t.token_index, t.result.clone()))
        .collect();
    let summary = ScoreReport::new(AveragingMode::Macro, &report.scores).with_targets(&per_target);
    if a.json {
        writeln!(out, "{}", summary.to_json())?;
    } else {
        writeln!(out, "targets={} {}", report.targets.len(), scores_line(&summary))?;
    }
    Ok(())
}

fn gateway(endpoint: &Path, replay: Option<&Path>, record: Option<&Path>) -> Result<Gateway> {
    let ep = InferenceEndpoint::load(endpoint).map_err(|e| CliError::Usage(format!("{}: {e}", endpoint.display())))?;
    let gw = match replay {
        Some(log) => Gateway::new(ep, Arc::new(ReplayClient::load(log)?))?,
        None => Gateway::http(ep)?,
    };
    Ok(match record {
        Some(log) => gw.with_recorder(ReplayLog::open(log)?),
        None => gw,
    })
}

fn parse(a: ParseArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let records = load(&a.input)?;
    let exemplars = match &a.exemplars {
        Some(p) => ExemplarSet::load(p)?,
        None => ExemplarSet::builtin(),
    };
    let gw = gateway(&a.endpoint.endpoint, a.endpoint.replay.as_deref(), a.endpoint.record.as_deref())?;
    let model = gw.model().to_string();
    let parser = NounParser::new(gw, exemplars)?;
    let tagger = DatasetTagger::new(&records, tagger(&a.tagger));

    let mut jobs = Vec::new();
    let mut owners = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let sentence = r.sentence()?;
        for idx in tagger.noun_indices(&sentence)? {
            jobs.push((sentence.clone(), NounTarget::new(&sentence, idx)?));
            owners.push(i);
        }
    }
    let results = parser.parse_all(&jobs);

    let mut parsed: Vec<DatasetRecord> = records
        .iter()
        .map(|r| DatasetRecord {
            targets: Vec::new(),
            ..r.clone()
        })
        .collect();
    let (mut diagnostics, mut first_error) = (0, None);
    for ((owner, (_, target)), result) in owners.iter().zip(&jobs).zip(results) {
        match result {
            Ok(outcome) => {
                diagnostics += outcome.diagnostics.len();
                parsed[*owner].targets.push(TargetEntry {
                    token_index: target.token_index,
                    records: vec![RecordEntry {
                        annotator: model.clone(),
                        phase: Phase::Independent,
                        qas: outcome.qas.iter().map(|q| QaEntry::from_pair(q, &target.surface)).collect(),
                        extra: Default::default(),
                    }],
                    extra: Default::default(),
                });
            }
            Err(e) => {
                writeln!(err, "{}:{}: {e}", target.sentence_id, target.token_index)?;
                first_error.get_or_insert(e);
            }
        }
    }
    let text = dataset_to_string(&parsed);
    match &a.out {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    writeln!(err, "{} target(s) parsed, {diagnostics} format diagnostic(s)", jobs.len())?;
    match first_error {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn decompose(a: DecomposeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let (sentences, pipeline) = match &a.script {
        Some(path) => {
            let script = Script::load(path)?;
            (script.sentences(), script.pipeline())
        }
        None => llm_pipeline(&a)?,
    };
    let outcomes = pipeline.run(&sentences);
    let ids: Vec<String> = sentences.iter().map(|s| s.id.clone()).collect();
    let transport = outcomes.iter().filter_map(|o| o.as_ref().err()).find(|e| e.is_transport()).map(|e| e.to_string());
    if outcomes.iter().all(|o| o.is_err()) {
        if let Some(Err(e)) = outcomes.into_iter().next() {
            return Err(e.into());
        }
        return Err(CliError::Usage("no sentences to decompose".into()));
    }
    let config = ReportConfig {
        replicates: a.replicates,
        level: a.level,
        seed: a.seed,
    };
    let report = report_outcomes(&ids, &outcomes, config)?;
    writeln!(out, "{report}")?;
    for f in &report.failures {
        writeln!(err, "{}: {}", f.sentence_id, f.message)?;
    }
    if let Some(path) = &a.report {
        std::fs::write(path, report.to_json() + "\n")?;
    }
    match transport {
        Some(m) => Err(CliError::Transport(m)),
        None => Ok(()),
    }
}

fn llm_pipeline(a: &DecomposeArgs) -> Result<(Vec<Sentence>, Pipeline)> {
    let (Some(input), Some(endpoint)) = (&a.input, &a.endpoint) else {
        return Err(CliError::Usage("--in and --endpoint are required without --script".into()));
    };
    let records = load(input)?;
    let sentences = records.iter().map(DatasetRecord::sentence).collect::<qanoun_core::Result<Vec<_>>>()?;
    let parser_gw = gateway(endpoint, a.replay.as_deref(), a.record.as_deref())?;
    let judge_gw = match &a.judge_endpoint {
        Some(p) => gateway(p, a.replay.as_deref(), a.record.as_deref())?,
        None => parser_gw.clone(),
    };
    let verbs: Arc<dyn VerbUnitSource> = match &a.verb_url {
        Some(url) => {
            let ep = parser_gw.endpoint();
            Arc::new(EndpointVerbSource::new(url.clone(), ep.timeout(), ep.retry.clone())?)
        }
        None => Arc::new(PromptVerbSource { gateway: parser_gw.clone() }),
    };
    let pipeline = Pipeline {
        tagger: Arc::new(DatasetTagger::new(&records, tagger(&a.tagger))),
        nouns: Arc::new(NounParser::new(parser_gw, ExemplarSet::builtin())?),
        verbs,
        redundancy: Arc::new(LlmRedundancyJudge { gateway: judge_gw.clone() }),
        entailment: Arc::new(LlmUnitJudge { gateway: judge_gw }),
        within_source: a.within_source,
    };
    Ok((sentences, pipeline))
}

fn serve(a: ServeArgs) -> Result<()> {
    if !a.token_file.is_file() {
        return Err(CliError::Usage(format!("{}: no such token file", a.token_file.display())));
    }
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    let config = qanoun_service::ServeConfig {
        data_dir: a.data_dir,
        bind: a.bind,
        token_file: a.token_file,
    };
    runtime.block_on(qanoun_service::serve(config, tagger(&a.tagger)))?;
    Ok(())
}
