//! Unique extension, `η`-generated vertices, generating sets and the
//! discrepancy lemmas.
//!
//! All counts for a shape and its subsets come from a single scan of the
//! largest shape, so the restriction maps are surjective even on windows.

use std::collections::HashMap;

use log::debug;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexity::discrepancy;
use crate::config::{normalized_pattern, Configuration, Pattern};
use crate::error::{Error, Result};
use crate::geometry::{ConvexLatticeSet, Direction, Edge, LatticePoint};
use crate::language::Language;

/// Fibers of the restriction map `W_η(S₂) → W_η(S₁)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionFan {
    pub base: ConvexLatticeSet,
    pub host: ConvexLatticeSet,
    pub fibers: Vec<Fiber>,
    pub exhaustive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fiber {
    pub base: Pattern,
    pub extensions: Vec<Pattern>,
}

impl ExtensionFan {
    pub fn fiber_sizes(&self) -> Vec<usize> {
        self.fibers.iter().map(|f| f.extensions.len()).collect()
    }

    /// Base patterns with more than one extension.
    pub fn non_unique_count(&self) -> usize {
        self.fibers.iter().filter(|f| f.extensions.len() > 1).count()
    }

    pub fn host_count(&self) -> usize {
        self.fibers.iter().map(|f| f.extensions.len()).sum()
    }
}

fn subset_indices(lang: &Language, sub: &ConvexLatticeSet) -> Result<Vec<usize>> {
    sub.points()
        .iter()
        .map(|&p| lang.position(p).ok_or(Error::NotSubset(p)))
        .collect()
}

pub fn extension_fan(
    eta: &Configuration,
    s1: &ConvexLatticeSet,
    s2: &ConvexLatticeSet,
) -> Result<ExtensionFan> {
    if let Some(&p) = s1.points().iter().find(|&&p| !s2.contains(p)) {
        return Err(Error::NotSubset(p));
    }
    let lang = Language::scan(eta, s2.points())?;
    let idx = subset_indices(&lang, s1)?;
    let fibers = lang
        .fan(&idx)
        .into_iter()
        .map(|(base, ext)| Fiber {
            base: normalized_pattern(s1.points().to_vec(), base),
            extensions: ext
                .into_iter()
                .map(|i| normalized_pattern(s2.points().to_vec(), lang.patterns()[i].clone()))
                .collect(),
        })
        .collect();
    Ok(ExtensionFan {
        base: s1.clone(),
        host: s2.clone(),
        fibers,
        exhaustive: lang.exhaustive(),
    })
}

fn without(s: &ConvexLatticeSet, lang: &Language, x: LatticePoint) -> Vec<usize> {
    s.points()
        .iter()
        .filter(|&&p| p != x)
        .map(|&p| lang.position(p).expect("shape cell"))
        .collect()
}

/// Whether every `η`-coloring of `S ∖ {x}` extends uniquely to `S`.
pub fn is_generated(eta: &Configuration, s: &ConvexLatticeSet, x: LatticePoint) -> Result<bool> {
    if !s.contains(x) {
        return Err(Error::PointNotInShape(x));
    }
    let lang = Language::scan(eta, s.points())?;
    Ok(generated_in(&lang, s, x))
}

pub(crate) fn generated_in(lang: &Language, s: &ConvexLatticeSet, x: LatticePoint) -> bool {
    lang.projected_count(&without(s, lang, x)) == lang.len()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscrepancyStep {
    pub generated: bool,
    pub d_before: i64,
    pub d_after: i64,
}

/// Remove a vertex and compare discrepancies: a generated vertex raises `D`
/// by exactly one, any other vertex does not raise it.
pub fn discrepancy_step(
    eta: &Configuration,
    s: &ConvexLatticeSet,
    x: LatticePoint,
) -> Result<DiscrepancyStep> {
    if !s.is_vertex(x) {
        return Err(Error::NotBoundaryVertex(x));
    }
    let lang = Language::scan(eta, s.points())?;
    let rest = without(s, &lang, x);
    let p_after = lang.projected_count(&rest);
    let step = DiscrepancyStep {
        generated: p_after == lang.len(),
        d_before: discrepancy(lang.len(), s.len()),
        d_after: discrepancy(p_after, rest.len()),
    };
    let ok = if step.generated {
        step.d_after == step.d_before + 1
    } else {
        step.d_after <= step.d_before
    };
    if !ok {
        return Err(Error::InvariantViolation(format!(
            "vertex removal at {x}: {step:?}"
        )));
    }
    Ok(step)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Greedy,
    Exhaustive,
}

pub const DEFAULT_BUDGET: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratingSetResult {
    pub set: ConvexLatticeSet,
    pub mode: SearchMode,
    #[serde(rename = "P")]
    pub p: usize,
    pub discrepancy: i64,
    pub minimality_certified: bool,
    /// Convex proper subsets checked against `D(S′) ≥ D(S) + 1`.
    pub subsets_checked: usize,
}

impl GeneratingSetResult {
    pub fn edge_directions(&self) -> Vec<Direction> {
        self.set.boundary_edges().iter().map(|e| e.direction).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GeneratingSearch {
    Found(GeneratingSetResult),
    NotFound { reason: String },
}

impl GeneratingSearch {
    pub fn found(&self) -> Option<&GeneratingSetResult> {
        match self {
            GeneratingSearch::Found(r) => Some(r),
            GeneratingSearch::NotFound { .. } => None,
        }
    }
}

/// Search `R_{n,k}` for a convex subset with `D ≤ 0` all of whose vertices
/// are generated.
///
/// Exhaustive mode returns an inclusion-minimal such set, smallest first and
/// then row-major smallest, and certifies `D(S′) ≥ D(S) + 1` for every convex
/// proper subset `S′`. Greedy mode removes the row-major smallest vertex that
/// keeps `D ≤ 0` until none does.
pub fn find_generating_set(
    eta: &Configuration,
    n: usize,
    k: usize,
    mode: SearchMode,
    budget: usize,
) -> Result<GeneratingSearch> {
    search_generating_set(eta, n, k, mode, budget, true)
}

/// As [`find_generating_set`]; with `require_exact = false` the search also
/// runs on lower-bound counts, and the result is only a candidate.
pub(crate) fn search_generating_set(
    eta: &Configuration,
    n: usize,
    k: usize,
    mode: SearchMode,
    budget: usize,
    require_exact: bool,
) -> Result<GeneratingSearch> {
    eta.alphabet().require_at_least(2)?;
    if n == 0 || k == 0 {
        return Err(Error::InvalidArgument("rectangle sides must be positive".into()));
    }
    let r = ConvexLatticeSet::rectangle(n, k);
    let lang = Language::scan(eta, r.points())?;
    let d_r = discrepancy(lang.len(), r.len());
    if d_r > 0 {
        return Ok(GeneratingSearch::NotFound {
            reason: format!("hypothesis fails: D(R_{{{n},{k}}}) = {d_r} > 0"),
        });
    }
    if require_exact && !lang.exhaustive() {
        return Err(Error::RequiresExhaustive);
    }
    let d_of = |s: &ConvexLatticeSet| -> i64 {
        let idx: Vec<usize> = s.points().iter().map(|&p| lang.position(p).unwrap()).collect();
        discrepancy(lang.projected_count(&idx), s.len())
    };
    let result = match mode {
        SearchMode::Greedy => {
            let mut s = r.clone();
            let mut d = d_r;
            loop {
                let mut verts = s.vertices().to_vec();
                verts.sort();
                let next = verts
                    .into_iter()
                    .filter(|_| s.len() > 1)
                    .map(|v| s.remove_vertex(v).expect("vertex removal"))
                    .map(|t| {
                        let dt = d_of(&t);
                        (t, dt)
                    })
                    .find(|(_, dt)| *dt <= 0);
                match next {
                    Some((t, dt)) => {
                        debug!("greedy: {} points, D = {dt}", t.len());
                        s = t;
                        d = dt;
                    }
                    None => break,
                }
            }
            GeneratingSetResult {
                p: (d + s.len() as i64) as usize,
                set: s,
                mode,
                discrepancy: d,
                minimality_certified: false,
                subsets_checked: 0,
            }
        }
        SearchMode::Exhaustive => {
            if r.len() > budget {
                return Err(Error::BudgetExceeded {
                    size: r.len(),
                    budget,
                });
            }
            let mut subsets = r.convex_subsets();
            subsets.sort_by(|a, b| (a.len(), a.points()).cmp(&(b.len(), b.points())));
            let ds: Vec<i64> = subsets.par_iter().map(&d_of).collect();
            let index: HashMap<&[LatticePoint], usize> = subsets
                .iter()
                .enumerate()
                .map(|(i, s)| (s.points(), i))
                .collect();
            // below[i]: some convex proper subset of subsets[i] has D ≤ 0
            let mut below = vec![false; subsets.len()];
            let mut chosen = None;
            for i in 0..subsets.len() {
                let s = &subsets[i];
                if s.len() > 1 {
                    below[i] = s.vertices().iter().any(|&v| {
                        let c = s.remove_vertex(v).expect("vertex removal");
                        let j = index[c.points()];
                        ds[j] <= 0 || below[j]
                    });
                }
                if chosen.is_none() && ds[i] <= 0 && !below[i] {
                    chosen = Some(i);
                }
            }
            let i = chosen.ok_or_else(|| {
                Error::InvariantViolation("R itself has D ≤ 0 but no minimal subset found".into())
            })?;
            let s = subsets[i].clone();
            let d = ds[i];
            let proper: Vec<ConvexLatticeSet> = s
                .convex_subsets()
                .into_iter()
                .filter(|t| t.len() < s.len())
                .collect();
            if let Some(bad) = proper.iter().find(|t| d_of(t) < d + 1) {
                return Err(Error::InvariantViolation(format!(
                    "subset inequality fails for {bad:?}"
                )));
            }
            GeneratingSetResult {
                p: (d + s.len() as i64) as usize,
                set: s,
                mode,
                discrepancy: d,
                minimality_certified: true,
                subsets_checked: proper.len(),
            }
        }
    };
    for &v in result.set.vertices() {
        if !generated_in(&lang_for(&lang, &result.set), &result.set, v) {
            return Err(Error::InvariantViolation(format!(
                "vertex {v} of the generating set is not generated"
            )));
        }
    }
    Ok(GeneratingSearch::Found(result))
}

/// Restrict a host language to a subset of its cells.
fn lang_for(host: &Language, s: &ConvexLatticeSet) -> Language {
    host.restricted(s.points())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeBound {
    pub edge: Edge,
    pub edge_points: usize,
    pub d_without_edge: i64,
    pub d_with_edge: i64,
    pub non_unique_count: usize,
    /// `D(S ∖ w) > D(S)`, so the multiplicity bound is asserted.
    pub applies: bool,
    /// `non_unique_count ≤ |w ∩ S| − 1` (vacuously true when not applicable).
    pub holds: bool,
}

/// Count the colorings of `S ∖ w` that do not extend uniquely to `S`.
pub fn verify_edge_bound(eta: &Configuration, s: &ConvexLatticeSet, w: &Edge) -> Result<EdgeBound> {
    if !s.boundary_edges().contains(w) {
        return Err(Error::InvalidArgument(format!(
            "{} -> {} is not an edge of the shape",
            w.start, w.end
        )));
    }
    let inner = s.without_edge(w)?;
    let lang = Language::scan(eta, s.points())?;
    let idx = subset_indices(&lang, &inner)?;
    let fan = lang.fan(&idx);
    let non_unique = fan.values().filter(|f| f.len() > 1).count();
    let d_without = discrepancy(fan.len(), inner.len());
    let d_with = discrepancy(lang.len(), s.len());
    let applies = d_without > d_with;
    let edge_points = w.lattice_count();
    Ok(EdgeBound {
        edge: *w,
        edge_points,
        d_without_edge: d_without,
        d_with_edge: d_with,
        non_unique_count: non_unique,
        applies,
        holds: !applies || non_unique < edge_points,
    })
}

/// `D` along a chain of vertex removals `S, S ∖ {p₁}, S ∖ {p₁, p₂}, …`.
pub fn chain_discrepancy(
    eta: &Configuration,
    s: &ConvexLatticeSet,
    chain: &[LatticePoint],
) -> Result<Vec<i64>> {
    let lang = Language::scan(eta, s.points())?;
    let d_of = |t: &ConvexLatticeSet| {
        let idx: Vec<usize> = t.points().iter().map(|&p| lang.position(p).unwrap()).collect();
        discrepancy(lang.projected_count(&idx), t.len())
    };
    let mut out = vec![discrepancy(lang.len(), s.len())];
    let mut cur = s.clone();
    for (j, &p) in chain.iter().enumerate() {
        let step = j + 1;
        if cur.len() == 1 {
            return Err(Error::ChainStep {
                step,
                reason: format!("removing {p} would leave the empty set"),
            });
        }
        cur = cur.remove_vertex(p).map_err(|e| Error::ChainStep {
            step,
            reason: e.to_string(),
        })?;
        let d = d_of(&cur);
        if d > out[j] + 1 {
            return Err(Error::InvariantViolation(format!(
                "step {step}: D rose from {} to {d}",
                out[j]
            )));
        }
        out.push(d);
    }
    Ok(out)
}
