//! Planted three-class corpus used by the demo config and the tests.
//!
//! `keywords` texts use class-disjoint vocabularies, so TF-IDF separates
//! the classes perfectly. `caption` texts mention the class only some of
//! the time, mixed with words shared by every class, so its clusters are
//! looser.

use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, ImageRecord};

/// The bundled corpus file, generated by [`planted_corpus`] with [`BUNDLED_SEED`].
pub const BUNDLED_CORPUS: &str = include_str!("../../assets/synthetic_corpus.jsonl");
pub const BUNDLED_SEED: u64 = 2024;
pub const PER_CLASS: usize = 20;
pub const TEXTS_PER_IMAGE: usize = 6;

struct Class {
    name: &'static str,
    core: [&'static str; 2],
    extras: [&'static str; 6],
}

const CLASSES: [Class; 3] = [
    Class {
        name: "bedroom",
        core: ["bedroom", "bed"],
        extras: ["pillow", "blanket", "lamp", "nightstand", "mattress", "wardrobe"],
    },
    Class {
        name: "kitchen",
        core: ["kitchen", "stove"],
        extras: ["oven", "sink", "refrigerator", "counter", "kettle", "cabinet"],
    },
    Class {
        name: "tower",
        core: ["tower", "spire"],
        extras: ["skyscraper", "clock", "antenna", "steeple", "skyline", "landmark"],
    },
];

const SHARED: [&str; 12] = [
    "room", "light", "wall", "window", "people", "wood", "city", "sky", "floor", "building",
    "table", "chair",
];

pub fn planted_corpus(seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(CLASSES.len() * PER_CLASS);
    for i in 0..PER_CLASS {
        for (c, class) in CLASSES.iter().enumerate() {
            let keywords = (0..TEXTS_PER_IMAGE)
                .map(|_| {
                    let extra = class.extras.choose(&mut rng).expect("non-empty");
                    format!("{}, {}, {extra}", class.core[0], class.core[1])
                })
                .collect();
            let captions = (0..TEXTS_PER_IMAGE)
                .map(|_| {
                    let subject = if rng.random_bool(0.4) {
                        class.core[rng.random_range(0..2)]
                    } else if rng.random_bool(0.3) {
                        let other = &CLASSES[(c + rng.random_range(1..CLASSES.len())) % CLASSES.len()];
                        other.core[rng.random_range(0..2)]
                    } else {
                        SHARED.choose(&mut rng).expect("non-empty")
                    };
                    let a = SHARED.choose(&mut rng).expect("non-empty");
                    let b = SHARED.choose(&mut rng).expect("non-empty");
                    format!("a photo of a {subject} with a {a} and a {b}")
                })
                .collect();
            let texts = BTreeMap::from([
                ("caption".to_string(), captions),
                ("keywords".to_string(), keywords),
            ]);
            records.push(ImageRecord {
                id: format!("img-{:03}", i * CLASSES.len() + c),
                label: Some(class.name.to_string()),
                texts,
            });
        }
    }
    Corpus::new(records).expect("planted corpus is well formed")
}
