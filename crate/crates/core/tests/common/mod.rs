#![allow(dead_code)]

use std::path::PathBuf;

use nivat_core::config::generators::random_periodic;
use nivat_core::verifier::load_config;
use nivat_core::Configuration;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Every configuration file of the shipped corpus, by file name.
pub fn corpus_files() -> Vec<(String, Configuration)> {
    let mut names: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "cfg"))
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, load_config(&p).unwrap())
        })
        .collect()
}

pub fn periodic_corpus() -> Vec<(String, Configuration)> {
    corpus_files().into_iter().filter(|(_, c)| c.is_periodic()).collect()
}

/// `count` random periodic configurations with domains up to
/// `max_w × max_h` over 2 to `max_symbols` symbols.
pub fn random_sample(seed: u64, count: usize, max_w: usize, max_h: usize, max_symbols: usize) -> Vec<Configuration> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let w = rng.random_range(1..=max_w);
            let h = rng.random_range(1..=max_h);
            let k = rng.random_range(2..=max_symbols);
            random_periodic(&mut rng, w, h, k)
        })
        .collect()
}
