use chapterkit::chunking::ChunkBudget;
use chapterkit::corpus::{Chapter, ChapterSet, Episode, EpisodeMetadata, Sentence, Transcript};
use chapterkit::eval::{estimate_k, evaluate_corpus, window_diff, BoundarySeq, HashedBowEmbedder};
use chapterkit::generate::{
    CohesionGenerator, CohesionParams, FixedGenerator, OracleGenerator, RecordingGenerator,
};
use chapterkit::pipeline::{Pipeline, PipelineConfig, PredictionRecord};
use chapterkit::promptfmt::PREVIOUS_LABEL;
use chapterkit::synth::{synth_corpus, SynthProfile};

fn small_profile(episodes: usize) -> SynthProfile {
    SynthProfile {
        episodes,
        ..SynthProfile::podcast()
    }
}

/// 40 sentences of 10 words; chapters at 0, 12 and 30.
fn ten_word_episode() -> Episode {
    let sentences = (0..40)
        .map(|i| Sentence::plain(format!("s{i} w w w w w w w w w")).unwrap())
        .collect();
    Episode::new(
        EpisodeMetadata {
            episode_id: "ten".into(),
            show_id: None,
            title: "Weekly".into(),
            description: "Unique description marker".into(),
        },
        Transcript::new(sentences).unwrap(),
        Some(
            ChapterSet::new(vec![
                Chapter::new(0, "Opening"),
                Chapter::new(12, "Middle part"),
                Chapter::new(30, "Closing words"),
            ])
            .unwrap(),
        ),
    )
    .unwrap()
}

#[test]
fn oracle_round_trip_on_synthetic_corpus() {
    let corpus = synth_corpus(&small_profile(10), 3);
    let pipeline = Pipeline::new(PipelineConfig::default()).unwrap();
    let outcomes = pipeline.chapterize_corpus(&corpus, &OracleGenerator, 4);
    let mut preds = Vec::new();
    for (ep, out) in corpus.iter().zip(outcomes) {
        let out = out.unwrap();
        assert_eq!(Some(&out.chapters), ep.reference_chapters.as_ref());
        assert!(out.warnings.is_empty(), "{:?}", out.warnings);
        preds.push((ep.id().to_string(), out.chapters));
    }
    let k = estimate_k(&corpus).unwrap();
    let report = evaluate_corpus(&corpus, &preds, k, &HashedBowEmbedder::default()).unwrap();
    assert_eq!(report.aggregate.windiff.mean, Some(0.0));
    assert_eq!(report.aggregate.rouge_l_f1_aligned.mean, Some(1.0));
    assert_eq!(report.aggregate.emb_f1.mean, Some(1.0));
}

#[test]
fn dynamic_context_threads_titles_across_chunks() {
    let ep = ten_word_episode();
    // body of 150 words: chunks of 15 sentences
    let budget = ChunkBudget::new(200, 50).unwrap();
    let rec = RecordingGenerator::new(OracleGenerator);
    let pipeline = Pipeline::new(PipelineConfig {
        budget,
        ..Default::default()
    })
    .unwrap();
    let out = pipeline.chapterize_episode(&ep, &rec).unwrap();
    assert_eq!(out.chunks, 3);
    assert_eq!(Some(&out.chapters), ep.reference_chapters.as_ref());
    let inputs: Vec<String> = rec.inputs().into_iter().map(|(_, i)| i).collect();
    assert!(!inputs[0].contains(PREVIOUS_LABEL));
    assert!(inputs[1].contains(&format!("{PREVIOUS_LABEL} Opening | Middle part")));
    assert!(inputs[2].contains(&format!("{PREVIOUS_LABEL} Opening | Middle part")));
    assert!(inputs[1]
        .starts_with("Episode title: Weekly\nEpisode description: Unique description marker\n"));
    assert!(inputs[1].contains("\n15: s15 "));
}

#[test]
fn ablation_switches_remove_context() {
    let ep = ten_word_episode();
    let budget = ChunkBudget::new(200, 50).unwrap();
    for (stat, dynm) in [(false, true), (true, false), (false, false)] {
        let rec = RecordingGenerator::new(OracleGenerator);
        Pipeline::new(PipelineConfig {
            budget,
            use_static_context: stat,
            use_dynamic_context: dynm,
            blocklist_path: None,
        })
        .unwrap()
        .chapterize_episode(&ep, &rec)
        .unwrap();
        for (_, input) in rec.inputs() {
            assert_eq!(input.contains("Unique description marker"), stat);
            if !dynm {
                assert!(!input.contains(PREVIOUS_LABEL));
            }
        }
    }
}

#[test]
fn unusable_generator_output_falls_back() {
    let ep = ten_word_episode();
    let out = Pipeline::new(PipelineConfig::default())
        .unwrap()
        .chapterize_episode(&ep, &FixedGenerator("I cannot do that.".into()))
        .unwrap();
    assert_eq!(out.chapters.chapters(), &[Chapter::new(0, "Weekly")]);
    assert!(out.warnings.iter().any(|w| w.contains("unparseable")));
    assert!(out.warnings.iter().any(|w| w.contains("fallback")));
}

#[test]
fn blocklist_applies_after_stitching() {
    let ep = ten_word_episode();
    let pipeline = Pipeline::with_blocklist(PipelineConfig::default(), vec!["middle".into()]);
    let out = pipeline.chapterize_episode(&ep, &OracleGenerator).unwrap();
    assert_eq!(out.chapters.chapters()[1], Chapter::new(12, "Chapter 2"));
    let record = PredictionRecord::from_outcome(&ep, &out);
    assert!(record.warnings.iter().any(|w| w.contains("chapter 2")));
}

#[test]
fn cohesion_generator_through_pipeline() {
    let corpus = synth_corpus(&small_profile(5), 11);
    let pipeline = Pipeline::new(PipelineConfig::default()).unwrap();
    let generator = CohesionGenerator::new(CohesionParams::default());
    let k = estimate_k(&corpus).unwrap();
    let mut total = 0.0;
    let (mut predicted, mut reference) = (0usize, 0usize);
    for ep in &corpus {
        let out = pipeline.chapterize_episode(ep, &generator).unwrap();
        let n = ep.transcript.len();
        out.chapters.check_range(n).unwrap();
        assert_eq!(out.chapters.chapters()[0].start_index, 0);
        let r = BoundarySeq::from_chapters(ep.reference_chapters.as_ref().unwrap(), n).unwrap();
        let h = BoundarySeq::from_chapters(&out.chapters, n).unwrap();
        total += window_diff(&r, &h, k).unwrap();
        predicted += out.chapters.len();
        reference += ep.reference_chapters.as_ref().unwrap().len();
    }
    // chapter topics shift the vocabulary at every reference start
    let mean = total / corpus.len() as f64;
    assert!(mean < 0.3, "mean WindowDiff {mean}");
    let ratio = predicted as f64 / reference as f64;
    assert!(
        (0.5..=2.0).contains(&ratio),
        "predicted/reference chapters {ratio}"
    );
}
