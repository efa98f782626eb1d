use std::collections::{BTreeSet, HashSet};

use proptest::prelude::{any, prop_assert_eq, proptest};
use qanoun_core::schema::{Sentence, TokenRange};
use qanoun_decomp::error::DecompError;
use qanoun_decomp::redundancy::is_candidate;
use qanoun_decomp::sources::{AlwaysEntailed, NeverRedundant};
use qanoun_decomp::{filter_redundant, MeaningUnit, Source};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sentence() -> Sentence {
    Sentence::tokenize("s", "a b c d e f g h i j k l")
}

fn unit(id: usize, source: Source, first: usize, last: usize) -> MeaningUnit {
    let s = sentence();
    let answer = TokenRange::new(first, last);
    MeaningUnit {
        id,
        sentence_id: "s".into(),
        source,
        question: format!("q{id}"),
        answer,
        answer_text: s.range_text(answer).unwrap().to_string(),
        predicate: None,
    }
}

/// Connected components by repeated relaxation, independent of union-find.
fn components(n: usize, edges: &[(usize, usize)]) -> BTreeSet<Vec<usize>> {
    let mut label: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for &(a, b) in edges {
            let m = label[a].min(label[b]);
            if label[a] != m || label[b] != m {
                label[a] = m;
                label[b] = m;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut out = BTreeSet::new();
    for l in label.iter().copied().collect::<BTreeSet<_>>() {
        out.insert((0..n).filter(|&i| label[i] == l).collect());
    }
    out
}

#[test]
fn disjoint_answers_stay_singletons() {
    let units = vec![unit(0, Source::Noun, 0, 1), unit(1, Source::Verb, 3, 4), unit(2, Source::Verb, 6, 9)];
    let yes = |_: &Sentence, _: &MeaningUnit, _: &MeaningUnit| Ok::<_, DecompError>(true);
    let out = filter_redundant(&sentence(), &units, &yes, true).unwrap();
    assert_eq!(out.clusters.len(), 3);
    assert_eq!(out.kept, units);
}

#[test]
fn chain_closes_transitively() {
    // A noun, B verb, C noun: A≡B and B≡C judged, A and C never compared.
    let units = vec![unit(0, Source::Noun, 2, 4), unit(1, Source::Verb, 2, 4), unit(2, Source::Noun, 2, 4)];
    let judged = std::sync::Mutex::new(Vec::new());
    let judge = |_: &Sentence, a: &MeaningUnit, b: &MeaningUnit| {
        judged.lock().unwrap().push((a.id, b.id));
        Ok::<_, DecompError>(true)
    };
    let out = filter_redundant(&sentence(), &units, &judge, false).unwrap();
    assert_eq!(judged.into_inner().unwrap(), vec![(0, 1), (1, 2)]);
    let oracle = components(3, &[(0, 1), (1, 2)]);
    let got: BTreeSet<Vec<usize>> = out.clusters.iter().map(|c| c.members.clone()).collect();
    assert_eq!(got, oracle);
    assert_eq!(out.clusters[0].representative, 0);
    assert_eq!(out.kept.len(), 1);
}

#[test]
fn verb_only_cluster_keeps_lowest_id() {
    let units = vec![unit(0, Source::Verb, 2, 4), unit(1, Source::Verb, 2, 4)];
    let yes = |_: &Sentence, _: &MeaningUnit, _: &MeaningUnit| Ok::<_, DecompError>(true);
    let out = filter_redundant(&sentence(), &units, &yes, true).unwrap();
    assert_eq!(out.clusters[0].representative, 0);
}

#[test]
fn noun_representative_wins_over_lower_verb_id() {
    let units = vec![unit(0, Source::Verb, 2, 4), unit(1, Source::Noun, 2, 4)];
    let yes = |_: &Sentence, _: &MeaningUnit, _: &MeaningUnit| Ok::<_, DecompError>(true);
    let out = filter_redundant(&sentence(), &units, &yes, false).unwrap();
    assert_eq!(out.clusters[0].representative, 1);
}

fn random_units(rng: &mut ChaCha8Rng) -> Vec<MeaningUnit> {
    let n = rng.random_range(0..10);
    (0..n)
        .map(|id| {
            let first = rng.random_range(0..12);
            let last = (first + rng.random_range(0..4)).min(11);
            let source = if rng.random_bool(0.5) { Source::Noun } else { Source::Verb };
            unit(id, source, first, last)
        })
        .collect()
}

#[test]
fn fuzzed_runs_keep_counts_monotone_and_clusters_partitioned() {
    let s = sentence();
    for run in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(run);
        let units = random_units(&mut rng);
        let within = rng.random_bool(0.3);
        let salt: u64 = rng.random();
        let judge = move |_: &Sentence, a: &MeaningUnit, b: &MeaningUnit| {
            let h = (a.id as u64 * 31 + b.id as u64).wrapping_mul(salt | 1) >> 60;
            match h % 4 {
                0 => Err(DecompError::Source("flaky".into())),
                1 | 2 => Ok(true),
                _ => Ok(false),
            }
        };
        let reject = move |_: &Sentence, u: &MeaningUnit| Ok::<_, DecompError>(!(u.id as u64 ^ salt).is_multiple_of(3));
        let out = filter_redundant(&s, &units, &judge, within).unwrap();

        let mut seen = HashSet::new();
        for c in &out.clusters {
            assert!(c.members.contains(&c.representative));
            for m in &c.members {
                assert!(seen.insert(*m), "run {run}: unit {m} in two clusters");
            }
        }
        assert_eq!(seen.len(), units.len(), "run {run}");

        let merged: Vec<(usize, usize)> = out
            .clusters
            .iter()
            .flat_map(|c| c.evidence.iter())
            .filter(|e| e.verdict == qanoun_decomp::PairVerdict::Equivalent)
            .map(|e| (e.a, e.b))
            .collect();
        for &(a, b) in &merged {
            assert!(is_candidate(&units[a], &units[b], within));
        }
        let got: BTreeSet<Vec<usize>> = out.clusters.iter().map(|c| c.members.clone()).collect();
        assert_eq!(got, components(units.len(), &merged), "run {run}");

        let entailed = out.kept.iter().filter(|u| qanoun_decomp::UnitJudge::entailed(&reject, &s, u).unwrap()).count();
        assert!(entailed <= out.kept.len() && out.kept.len() <= units.len(), "run {run}");
    }
}

proptest! {
    #[test]
    fn all_no_judge_is_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let units = random_units(&mut rng);
        let out = filter_redundant(&sentence(), &units, &NeverRedundant, true).unwrap();
        prop_assert_eq!(&out.kept, &units);
        prop_assert_eq!(out.clusters.len(), units.len());
        let _ = AlwaysEntailed;
    }
}
