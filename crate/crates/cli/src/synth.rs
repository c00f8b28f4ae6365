//! Synthetic two-class news corpus used for smoke runs and tests.

use divsel_core::corpus::Instance;
use divsel_core::LabelMap;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TOY_SEED: u64 = 20;
pub const TOY_SIZE: usize = 400;

const FAKE_WORDS: &[&str] = &[
    "shocking", "secret", "miracle", "exposed", "hoax", "banned", "conspiracy", "viral",
    "outrage", "unbelievable", "cover", "leaked", "insider", "scandal", "rumor",
];
const REAL_WORDS: &[&str] = &[
    "official", "report", "confirmed", "minister", "statement", "analysis", "committee",
    "quarterly", "agency", "researchers", "published", "budget", "court", "survey", "data",
];
const NEUTRAL_WORDS: &[&str] = &[
    "city", "people", "week", "year", "country", "school", "market", "water", "road", "team",
    "family", "health", "price", "energy", "music", "game", "police", "weather", "house",
    "travel", "food", "phone", "car", "film", "river", "village", "doctor", "student",
    "company", "festival", "morning", "night", "today", "local", "national", "new", "old",
    "big", "small", "time",
];
const FILLERS: &[&str] = &["the", "a", "of", "and", "in", "to", "is", "on", "with", "this"];
const LINKS: &[&str] = &["http://news.example/item", "www.example.org/story", "10.0.0.1"];

/// Word draw probabilities for one document.
struct Mix {
    own: f64,
    other: f64,
}

/// `size` documents, classes `fake` and `real` alternating by index. Each
/// document mixes class-indicative words, words of the other class, neutral
/// words, stop words and the occasional link or punctuation.
pub fn toy_corpus(size: usize, seed: u64) -> (Vec<Instance>, LabelMap) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = LabelMap::new(vec!["fake".into(), "real".into()]);
    let mut instances = Vec::with_capacity(size);
    for i in 0..size {
        let label = i % 2;
        let (own, other) = if label == 0 {
            (FAKE_WORDS, REAL_WORDS)
        } else {
            (REAL_WORDS, FAKE_WORDS)
        };
        // a minority of documents carry a weak signal
        let mix = if rng.gen_bool(0.15) {
            Mix { own: 0.15, other: 0.05 }
        } else {
            Mix { own: 0.3, other: 0.03 }
        };
        let len = rng.gen_range(10..=22);
        let mut words: Vec<String> = Vec::with_capacity(len + 2);
        for _ in 0..len {
            let u: f64 = rng.gen();
            let pick = if u < mix.own {
                own
            } else if u < mix.own + mix.other {
                other
            } else if u < 0.8 {
                NEUTRAL_WORDS
            } else {
                FILLERS
            };
            let mut w = pick.choose(&mut rng).expect("non-empty list").to_string();
            if rng.gen_bool(0.1) {
                w = capitalize(&w);
            }
            if rng.gen_bool(0.08) {
                w.push(if rng.gen_bool(0.5) { ',' } else { '!' });
            }
            words.push(w);
        }
        if rng.gen_bool(0.15) {
            let at = rng.gen_range(0..=words.len());
            words.insert(at, LINKS.choose(&mut rng).expect("non-empty list").to_string());
        }
        instances.push(Instance::new(words.join(" "), label));
    }
    (instances, labels)
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// The corpus shipped as `data/toy_corpus.csv`.
pub fn bundled_toy_corpus() -> (Vec<Instance>, LabelMap) {
    toy_corpus(TOY_SIZE, TOY_SEED)
}

/// Path of the bundled toy corpus inside the source tree.
pub fn bundled_toy_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy_corpus.csv")
}
