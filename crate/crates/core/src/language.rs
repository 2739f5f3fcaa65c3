//! The pattern-counting engine: enumerate the distinct colorings of a finite
//! cell set over all admissible translates of a configuration.
//!
//! Translates are scanned in parallel chunks; each chunk keeps the first
//! translate index at which a coloring appears and chunks merge by union
//! with the minimum index, so the result does not depend on partitioning.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::config::{Configuration, Symbol};
use crate::error::Result;
use crate::geometry::LatticePoint;

/// The distinct colorings of `cells` occurring in a configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Language {
    cells: Vec<LatticePoint>,
    /// Distinct colorings, sorted; entry `i` colors `cells[i]`.
    patterns: Vec<Vec<Symbol>>,
    /// For each pattern, the first translate `u` (in scan order) realizing it.
    witnesses: Vec<LatticePoint>,
    translate_count: usize,
    exhaustive: bool,
}

const MIN_CHUNK: usize = 512;

impl Language {
    /// Scan every admissible translate of `cells`. Cells keep the given order.
    pub fn scan(eta: &Configuration, cells: &[LatticePoint]) -> Result<Self> {
        let threads = rayon::current_num_threads().max(1);
        Self::scan_chunked(eta, cells, |len| (len / (threads * 4)).max(MIN_CHUNK))
    }

    /// Scan with an explicit chunk size (partition-independence testing).
    pub fn scan_with_chunk(
        eta: &Configuration,
        cells: &[LatticePoint],
        chunk: usize,
    ) -> Result<Self> {
        Self::scan_chunked(eta, cells, |_| chunk.max(1))
    }

    fn scan_chunked(
        eta: &Configuration,
        cells: &[LatticePoint],
        chunk_size: impl Fn(usize) -> usize,
    ) -> Result<Self> {
        let (src, offsets) = eta.admissible_translates(cells)?;
        let chunk = chunk_size(offsets.len());
        let found: HashMap<Vec<Symbol>, usize> = offsets
            .par_chunks(chunk)
            .enumerate()
            .map(|(ci, part)| {
                let mut seen: HashMap<Vec<Symbol>, usize> = HashMap::new();
                let mut buf = vec![0; src.len()];
                for (j, &b) in part.iter().enumerate() {
                    for (slot, &c) in buf.iter_mut().zip(&src) {
                        *slot = eta
                            .source_value(c + b)
                            .expect("admissible translates are defined");
                    }
                    if !seen.contains_key(&buf) {
                        seen.insert(buf.clone(), ci * chunk + j);
                    }
                }
                seen
            })
            .reduce(HashMap::new, |mut a, b| {
                for (k, v) in b {
                    a.entry(k).and_modify(|old| *old = (*old).min(v)).or_insert(v);
                }
                a
            });
        let mut entries: Vec<(Vec<Symbol>, usize)> = found.into_iter().collect();
        entries.sort_unstable();
        let (patterns, witnesses) = entries
            .into_iter()
            .map(|(p, i)| (p, eta.view_translate(offsets[i])))
            .unzip();
        Ok(Self {
            cells: cells.to_vec(),
            patterns,
            witnesses,
            translate_count: offsets.len(),
            exhaustive: eta.is_exhaustive(),
        })
    }

    pub fn cells(&self) -> &[LatticePoint] {
        &self.cells
    }

    pub fn patterns(&self) -> &[Vec<Symbol>] {
        &self.patterns
    }

    pub fn witness(&self, i: usize) -> LatticePoint {
        self.witnesses[i]
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn translate_count(&self) -> usize {
        self.translate_count
    }

    pub fn exhaustive(&self) -> bool {
        self.exhaustive
    }

    pub fn position(&self, p: LatticePoint) -> Option<usize> {
        self.cells.iter().position(|&c| c == p)
    }

    /// Indices (into `cells`) of the given points.
    pub fn positions(&self, points: &[LatticePoint]) -> Option<Vec<usize>> {
        points.iter().map(|&p| self.position(p)).collect()
    }

    /// Number of distinct restrictions to the cells at `idx`.
    pub fn projected_count(&self, idx: &[usize]) -> usize {
        if idx.is_empty() {
            return usize::from(!self.patterns.is_empty());
        }
        self.fan(idx).len()
    }

    /// The language of a subset of the cells, obtained by projection. Each
    /// projected pattern keeps the witness of its smallest extension.
    pub fn restricted(&self, points: &[LatticePoint]) -> Language {
        let idx = self.positions(points).expect("points are host cells");
        let fan = self.fan(&idx);
        let witnesses = fan.values().map(|ext| self.witnesses[ext[0]]).collect();
        Language {
            cells: points.to_vec(),
            patterns: fan.into_keys().collect(),
            witnesses,
            translate_count: self.translate_count,
            exhaustive: self.exhaustive,
        }
    }

    /// Group host patterns by their restriction to the cells at `idx`:
    /// base coloring → indices of the host patterns extending it.
    pub fn fan(&self, idx: &[usize]) -> BTreeMap<Vec<Symbol>, Vec<usize>> {
        let mut out: BTreeMap<Vec<Symbol>, Vec<usize>> = BTreeMap::new();
        for (i, p) in self.patterns.iter().enumerate() {
            let key: Vec<Symbol> = idx.iter().map(|&j| p[j]).collect();
            out.entry(key).or_default().push(i);
        }
        out
    }
}
