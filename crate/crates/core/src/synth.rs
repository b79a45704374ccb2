//! Seeded synthetic corpora with controllable length, chapter and title
//! statistics. Used by tests, benchmarks and the `synth` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Zipf};
use serde::{Deserialize, Serialize};

use crate::corpus::{Chapter, ChapterSet, Episode, EpisodeMetadata, Sentence, Transcript};

/// One component of the document-length mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthBand {
    pub weight: f64,
    pub min_words: usize,
    pub max_words: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthProfile {
    pub episodes: usize,
    pub length_bands: Vec<LengthBand>,
    /// Expected transcript words per chapter; chapter counts scale with
    /// document length.
    pub words_per_chapter: f64,
    pub title_words_mean: f64,
    pub title_words_std: f64,
    pub title_words_max: usize,
    pub sentence_words: (usize, usize),
    pub description_words: usize,
    pub episode_title_words: usize,
    pub background_vocab: u64,
    pub zipf_exponent: f64,
    pub topic_vocab: u64,
    pub topic_words_per_chapter: usize,
    /// Probability that a transcript token is drawn from the chapter topic.
    pub topic_rate: f64,
    pub words_per_second: f64,
}

impl Default for SynthProfile {
    fn default() -> Self {
        Self::podcast()
    }
}

impl SynthProfile {
    /// Long conversational episodes: about 11.8k words, 11.3 chapters of
    /// roughly 80 sentences, 6.2-word titles, 102-word descriptions.
    pub fn podcast() -> Self {
        Self {
            episodes: 100,
            length_bands: vec![
                LengthBand {
                    weight: 0.28,
                    min_words: 6_000,
                    max_words: 6_900,
                },
                LengthBand {
                    weight: 0.66,
                    min_words: 12_800,
                    max_words: 13_700,
                },
                LengthBand {
                    weight: 0.06,
                    min_words: 17_500,
                    max_words: 20_500,
                },
            ],
            words_per_chapter: 1_048.0,
            title_words_mean: 6.2,
            title_words_std: 2.0,
            title_words_max: 14,
            sentence_words: (6, 20),
            description_words: 102,
            episode_title_words: 11,
            background_vocab: 50_000,
            zipf_exponent: 1.0,
            topic_vocab: 20_000,
            topic_words_per_chapter: 12,
            topic_rate: 0.4,
            words_per_second: 2.5,
        }
    }
}

const ONSETS: [&str; 15] = [
    "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "sh",
];
const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];

/// Distinct ids map to distinct lowercase pseudo-words of two or more
/// syllables.
pub fn pseudo_word(id: u64) -> String {
    let base = (ONSETS.len() * VOWELS.len()) as u64;
    let mut n = id + base;
    let mut out = String::new();
    while n > 0 {
        let s = (n % base) as usize;
        out.push_str(ONSETS[s / VOWELS.len()]);
        out.push_str(VOWELS[s % VOWELS.len()]);
        n /= base;
    }
    out
}

struct Words<'a> {
    profile: &'a SynthProfile,
    zipf: Zipf<f64>,
}

impl Words<'_> {
    fn background(&self, rng: &mut ChaCha8Rng) -> String {
        pseudo_word(self.zipf.sample(rng) as u64 - 1)
    }

    fn topic(&self, rng: &mut ChaCha8Rng) -> String {
        pseudo_word(self.profile.background_vocab + rng.random_range(0..self.profile.topic_vocab))
    }
}

fn capitalize(words: &[String]) -> String {
    let mut s = words.join(" ");
    if let Some(first) = s.get(..1) {
        let upper = first.to_uppercase();
        s.replace_range(..1, &upper);
    }
    s
}

fn sample_length(bands: &[LengthBand], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = bands.iter().map(|b| b.weight).sum();
    let mut x = rng.random::<f64>() * total;
    for b in bands {
        if x < b.weight {
            return rng.random_range(b.min_words..=b.max_words);
        }
        x -= b.weight;
    }
    let last = bands.last().expect("at least one band");
    rng.random_range(last.min_words..=last.max_words)
}

/// Chapter starts for `n_sentences` split into `k` segments with random
/// weights in [0.5, 1.5). Always starts at 0, strictly increasing.
fn chapter_starts(n_sentences: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let k = k.clamp(1, n_sentences);
    let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.5..1.5)).collect();
    let total: f64 = weights.iter().sum();
    let mut starts = vec![0];
    let mut acc = 0.0;
    for w in &weights[..k - 1] {
        acc += w;
        let s = ((acc / total) * n_sentences as f64).round() as usize;
        let prev = *starts.last().expect("non-empty");
        starts.push(s.max(prev + 1).min(n_sentences - 1));
    }
    starts.dedup();
    starts
}

fn synth_episode(
    profile: &SynthProfile,
    words: &Words,
    idx: usize,
    rng: &mut ChaCha8Rng,
) -> Episode {
    let target = sample_length(&profile.length_bands, rng);
    let (lo, hi) = profile.sentence_words;
    let mut lengths = Vec::new();
    let mut total = 0;
    while total < target {
        let l = rng.random_range(lo..=hi).min(target - total).max(1);
        lengths.push(l);
        total += l;
    }
    let jitter: f64 = rng.random_range(0.7..1.3);
    let n_chapters = ((target as f64 / profile.words_per_chapter) * jitter)
        .round()
        .max(1.0) as usize;
    let starts = chapter_starts(lengths.len(), n_chapters, rng);

    let title_len =
        Normal::new(profile.title_words_mean, profile.title_words_std).expect("finite std");
    let mut chapters = Vec::with_capacity(starts.len());
    let mut topics = Vec::with_capacity(starts.len());
    for &s in &starts {
        let topic: Vec<String> = (0..profile.topic_words_per_chapter)
            .map(|_| words.topic(rng))
            .collect();
        let n = (title_len.sample(rng).round() as i64).clamp(2, profile.title_words_max as i64)
            as usize;
        let title: Vec<String> = (0..n)
            .map(|_| topic[rng.random_range(0..topic.len())].clone())
            .collect();
        chapters.push(Chapter::new(s, capitalize(&title)));
        topics.push(topic);
    }

    let mut sentences = Vec::with_capacity(lengths.len());
    let mut clock = 0.0;
    let mut chapter = 0;
    for (i, &len) in lengths.iter().enumerate() {
        if chapter + 1 < starts.len() && i >= starts[chapter + 1] {
            chapter += 1;
        }
        let topic = &topics[chapter];
        let toks: Vec<String> = (0..len)
            .map(|_| {
                if rng.random::<f64>() < profile.topic_rate {
                    topic[rng.random_range(0..topic.len())].clone()
                } else {
                    words.background(rng)
                }
            })
            .collect();
        let duration = len as f64 / profile.words_per_second;
        let text = format!("{}.", capitalize(&toks));
        sentences.push(
            Sentence::new(text, Some(clock), Some(clock + duration)).expect("valid sentence"),
        );
        clock += duration;
    }

    let description: Vec<String> = (0..profile.description_words)
        .map(|_| {
            if rng.random::<f64>() < profile.topic_rate {
                let t = &topics[rng.random_range(0..topics.len())];
                t[rng.random_range(0..t.len())].clone()
            } else {
                words.background(rng)
            }
        })
        .collect();
    let title: Vec<String> = (0..profile.episode_title_words)
        .map(|_| words.background(rng))
        .collect();

    Episode::new(
        EpisodeMetadata {
            episode_id: format!("synth-{idx:05}"),
            show_id: Some(format!("show-{:03}", idx % 37)),
            title: capitalize(&title),
            description: format!("{}.", capitalize(&description)),
        },
        Transcript::new(sentences).expect("non-empty, ordered"),
        Some(ChapterSet::new(chapters).expect("increasing starts")),
    )
    .expect("chapters within transcript")
}

/// Deterministic corpus for `profile` and `seed`.
pub fn synth_corpus(profile: &SynthProfile, seed: u64) -> Vec<Episode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = Words {
        profile,
        zipf: Zipf::new(profile.background_vocab as f64, profile.zipf_exponent)
            .expect("positive vocabulary and exponent"),
    };
    (0..profile.episodes)
        .map(|i| synth_episode(profile, &words, i, &mut rng))
        .collect()
}

/// Episodes whose reference segments all have exactly `segment_len`
/// sentences.
pub fn uniform_segment_corpus(
    episodes: usize,
    segments: usize,
    segment_len: usize,
    seed: u64,
) -> Vec<Episode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..episodes)
        .map(|e| {
            let n = segments * segment_len;
            let sentences = (0..n)
                .map(|_| {
                    let len = rng.random_range(4..12);
                    let toks: Vec<String> = (0..len)
                        .map(|_| pseudo_word(rng.random_range(0..500)))
                        .collect();
                    Sentence::plain(toks.join(" ")).expect("non-empty")
                })
                .collect();
            let chapters = (0..segments)
                .map(|j| Chapter::new(j * segment_len, format!("Part {}", j + 1)))
                .collect();
            Episode::new(
                EpisodeMetadata {
                    episode_id: format!("uniform-{segment_len}-{e:04}"),
                    show_id: None,
                    title: format!("Uniform {e}"),
                    description: String::new(),
                },
                Transcript::new(sentences).expect("non-empty"),
                Some(ChapterSet::new(chapters).expect("increasing")),
            )
            .expect("valid episode")
        })
        .collect()
}
