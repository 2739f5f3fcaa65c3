//! Period detection: periods on finite regions, the period lattice of a
//! periodic configuration, the Morse–Hedlund oracle for words, and the
//! strip period bounds attached to balanced sets.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::balanced::BalancedCertificate;
use crate::config::{Configuration, Pattern, Source, Symbol};
use crate::error::{Error, Result};
use crate::geometry::{ext_gcd, row_major, ConvexLatticeSet, DirectedLine, Direction, Edge, LatticePoint};
use crate::language::Language;

/// A finite set of cells with a human-readable label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub label: String,
    pub cells: Vec<LatticePoint>,
}

impl Region {
    pub fn rect(origin: LatticePoint, width: usize, height: usize) -> Self {
        let cells = ConvexLatticeSet::rectangle(width, height).translate(origin).points().to_vec();
        Self {
            label: format!("{width}x{height} at {origin}"),
            cells,
        }
    }

    pub fn from_shape(s: &ConvexLatticeSet) -> Self {
        Self {
            label: format!("shape of {} cells", s.len()),
            cells: s.points().to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionPeriodicityReport {
    pub region: String,
    pub vector: LatticePoint,
    pub holds: bool,
    /// First `x` in row-major order with `x, x + u` in the region and
    /// differing colors.
    pub violation: Option<LatticePoint>,
    /// Number of pairs `(x, x + u)` compared.
    pub compared: usize,
}

fn periodic_on(
    label: String,
    cells: &[LatticePoint],
    u: LatticePoint,
    color: impl Fn(LatticePoint) -> Symbol,
) -> RegionPeriodicityReport {
    let set: HashSet<LatticePoint> = cells.iter().copied().collect();
    let mut compared = 0;
    let mut violation = None;
    for x in row_major(cells.iter().copied()) {
        if !set.contains(&(x + u)) {
            continue;
        }
        compared += 1;
        if color(x) != color(x + u) {
            violation = Some(x);
            break;
        }
    }
    RegionPeriodicityReport {
        region: label,
        vector: u,
        holds: violation.is_none(),
        violation,
        compared,
    }
}

/// Whether `η(x) = η(x + u)` for all `x` in the region with `x + u` in the region.
pub fn is_periodic_on_region(
    eta: &Configuration,
    region: &Region,
    u: LatticePoint,
) -> Result<RegionPeriodicityReport> {
    let undefined: Vec<LatticePoint> = region
        .cells
        .iter()
        .copied()
        .filter(|&c| eta.try_evaluate(c).is_none())
        .collect();
    if !undefined.is_empty() {
        return Err(Error::UndefinedCells(undefined));
    }
    Ok(periodic_on(region.label.clone(), &region.cells, u, |x| {
        eta.try_evaluate(x).unwrap()
    }))
}

/// [`is_periodic_on_region`] for a pattern on its own shape.
pub fn pattern_periodic(pattern: &Pattern, u: LatticePoint) -> RegionPeriodicityReport {
    periodic_on(
        format!("pattern of {} cells", pattern.shape.len()),
        &pattern.shape,
        u,
        |x| pattern.color_at(x).unwrap(),
    )
}

/// A lattice of period vectors given by 0, 1 or 2 generators.
///
/// Two generators form a reduced basis: shortest first, signs chosen so the
/// first nonzero coordinate is positive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodLattice {
    pub generators: Vec<LatticePoint>,
}

impl PeriodLattice {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Index in `Z²` (rank 2 only).
    pub fn index(&self) -> Option<i64> {
        match self.generators[..] {
            [a, b] => Some(a.cross(b).abs()),
            _ => None,
        }
    }

    pub fn contains(&self, v: LatticePoint) -> bool {
        match self.generators[..] {
            [] => v == LatticePoint::ORIGIN,
            [a] => a.cross(v) == 0 && (a.x == 0 || v.x % a.x == 0) && (a.y == 0 || v.y % a.y == 0),
            [a, b] => {
                let det = a.cross(b);
                // v = s·a + t·b
                let s = v.cross(b);
                let t = a.cross(v);
                s % det == 0 && t % det == 0
            }
            _ => unreachable!("at most two generators"),
        }
    }

    /// The smallest `k ≥ 1` with `k·d` a period.
    pub fn smallest_multiple(&self, d: Direction) -> Option<usize> {
        let v = d.vector();
        match self.generators[..] {
            [] => None,
            [a] => (a.cross(v) == 0).then(|| crate::geometry::gcd(a.x, a.y) as usize),
            _ => {
                let idx = self.index().unwrap();
                (1..=idx).find(|&k| self.contains(v * k)).map(|k| k as usize)
            }
        }
    }

    pub fn has_period_parallel_to(&self, d: Direction) -> bool {
        self.smallest_multiple(d).is_some()
    }
}

fn canonical_sign(v: LatticePoint) -> LatticePoint {
    if v.x < 0 || (v.x == 0 && v.y < 0) {
        -v
    } else {
        v
    }
}

fn vector_key(v: LatticePoint) -> (i64, i64, i64) {
    (v.norm_sq(), v.x, v.y)
}

/// Basis of the lattice generated by `gens` (assumed of rank 2).
fn hermite_basis(gens: &[LatticePoint]) -> [LatticePoint; 2] {
    let mut a = LatticePoint::new(0, 0);
    let mut b2 = 0i64;
    for &v in gens {
        if a.x == 0 && v.x == 0 {
            b2 = crate::geometry::gcd(crate::geometry::gcd(b2, a.y), v.y);
            a = LatticePoint::new(0, 0);
            continue;
        }
        let (g, s, t) = ext_gcd(a.x, v.x);
        let combined = a * s + v * t;
        let rest = v * (a.x / g) - a * (v.x / g);
        b2 = crate::geometry::gcd(b2, rest.y);
        a = combined;
    }
    if b2 != 0 {
        a.y = a.y.rem_euclid(b2);
    }
    [a, LatticePoint::new(0, b2)]
}

/// Lagrange reduction followed by a canonical choice among shortest bases.
fn reduced_basis([mut a, mut b]: [LatticePoint; 2]) -> [LatticePoint; 2] {
    loop {
        if a.norm_sq() > b.norm_sq() {
            std::mem::swap(&mut a, &mut b);
        }
        let (n, dot) = (a.norm_sq(), a.dot(b));
        if 2 * dot.abs() <= n {
            break;
        }
        b = b - a * (2 * dot + n).div_euclid(2 * n);
    }
    let det = a.cross(b).abs();
    let mut short: Vec<LatticePoint> = (-2i64..=2)
        .flat_map(|i| (-2i64..=2).map(move |j| a * i + b * j))
        .filter(|&v| v != LatticePoint::ORIGIN && v.norm_sq() <= b.norm_sq())
        .map(canonical_sign)
        .collect();
    short.sort_by_key(|&v| vector_key(v));
    short.dedup();
    let first = short[0];
    let second = *short
        .iter()
        .find(|&&v| first.cross(v).abs() == det)
        .expect("a reduced basis is among the short vectors");
    [first, second]
}

/// The full period lattice of a periodic configuration.
pub fn period_lattice(eta: &Configuration) -> Result<PeriodLattice> {
    let Source::Periodic(g) = eta.source() else {
        return Err(Error::RequiresPeriodic);
    };
    let (w, h) = (g.width(), g.height());
    let mut gens = vec![LatticePoint::new(w as i64, 0), LatticePoint::new(0, h as i64)];
    for vy in 0..h {
        for vx in 0..w {
            if (vx, vy) == (0, 0) {
                continue;
            }
            let period = (0..h).all(|y| (0..w).all(|x| g.get(x, y) == g.get((x + vx) % w, (y + vy) % h)));
            if period {
                gens.push(LatticePoint::new(vx as i64, vy as i64));
            }
        }
    }
    let inv = eta.view().matrix.inverse();
    let basis = hermite_basis(&gens).map(|v| inv.apply(v));
    Ok(PeriodLattice {
        generators: reduced_basis(basis).to_vec(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WordMode {
    /// The word is one period of a bi-infinite sequence.
    Periodic,
    /// The word is a finite prefix of a one-sided sequence.
    Onesided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorseHedlundVerdict {
    pub mode: WordMode,
    pub length: usize,
    /// `P(1), …, P(n_max)`.
    pub profile: Vec<usize>,
    /// The smallest `n` in the profile with `P(n) ≤ n`.
    pub low_complexity_n: Option<usize>,
    /// Minimal period (periodic) or eventual period (onesided).
    pub period: Option<usize>,
    pub preperiod: Option<usize>,
    pub caveat: Option<String>,
}

fn cyclic_factor_count(word: &[Symbol], n: usize) -> usize {
    let len = word.len();
    let ext: Vec<Symbol> = word.iter().copied().cycle().take(len + n).collect();
    (0..len).map(|i| &ext[i..i + n]).collect::<HashSet<_>>().len()
}

fn factor_count(word: &[Symbol], n: usize) -> usize {
    if n > word.len() {
        return 0;
    }
    word.windows(n).collect::<HashSet<_>>().len()
}

/// Factor complexity profile and period verdict.
///
/// In periodic mode the minimal period is `P(m)` for the first `m` with
/// `P(m) = P(m + 1)`. In onesided mode `n_max` defaults to `len / 5` and
/// the eventual period is the pair `(preperiod, period)` minimal in that
/// order, with the periodic tail at least two periods long.
pub fn morse_hedlund_1d(word: &[Symbol], mode: WordMode, n_max: Option<usize>) -> Result<MorseHedlundVerdict> {
    if word.is_empty() {
        return Err(Error::InvalidArgument("word must be nonempty".into()));
    }
    let len = word.len();
    let low = |profile: &[usize]| {
        profile
            .iter()
            .enumerate()
            .find(|&(i, &p)| p <= i + 1)
            .map(|(i, _)| i + 1)
    };
    match mode {
        WordMode::Periodic => {
            let n_max = n_max.unwrap_or(len).max(1);
            let top = n_max.max(len + 1);
            let full: Vec<usize> = (1..=top).map(|n| cyclic_factor_count(word, n)).collect();
            let m = (0..top - 1).find(|&i| full[i] == full[i + 1]).expect("P(len) = P(len + 1)");
            let profile = full[..n_max].to_vec();
            Ok(MorseHedlundVerdict {
                mode,
                length: len,
                low_complexity_n: low(&profile),
                profile,
                period: Some(full[m]),
                preperiod: Some(0),
                caveat: None,
            })
        }
        WordMode::Onesided => {
            let n_max = n_max.unwrap_or(len / 5).clamp(1, len);
            let profile: Vec<usize> = (1..=n_max).map(|n| factor_count(word, n)).collect();
            let mut best: Option<(usize, usize)> = None;
            for p in 1..len {
                let pre = (0..len - p).rev().find(|&i| word[i] != word[i + p]).map_or(0, |i| i + 1);
                if 2 * p <= len - pre && best.is_none_or(|b| (pre, p) < b) {
                    best = Some((pre, p));
                }
            }
            Ok(MorseHedlundVerdict {
                mode,
                length: len,
                low_complexity_n: low(&profile),
                profile,
                period: best.map(|b| b.1),
                preperiod: best.map(|b| b.0),
                caveat: Some(format!(
                    "finite prefix of length {len}: factor counts are lower bounds and the eventual period is measured on the prefix only"
                )),
            })
        }
    }
}

/// Unit vector `e` with `d × e = 1`, transversal to `d`.
fn transversal(d: Direction) -> LatticePoint {
    let (_, s, t) = ext_gcd(d.p(), d.q());
    LatticePoint::new(-t, s)
}

/// Smallest `k` in `1..=period` with `η(x) = η(x + k·d)` on the strip of
/// offsets `offsets` (shifted by `base`), checked over one full period.
fn strip_period(
    eta: &Configuration,
    d: Direction,
    offsets: (i64, i64),
    base: LatticePoint,
    period: usize,
) -> usize {
    let e = transversal(d);
    let v = d.vector();
    let cells: Vec<LatticePoint> = (offsets.0..=offsets.1)
        .flat_map(|c| (0..period as i64).map(move |j| base + e * c + v * j))
        .collect();
    (1..=period)
        .find(|&k| {
            cells
                .iter()
                .all(|&x| eta.try_evaluate(x) == eta.try_evaluate(x + v * k as i64))
        })
        .unwrap_or(period)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionCase {
    /// Every `S ∖ w` pattern along the strip has several extensions to `S`.
    NonUnique,
    /// Some `S ∖ w` pattern along the strip extends uniquely.
    Unique,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripRow {
    /// Transversal shift of the strip, in units of `e` with `d × e = 1`.
    pub shift: i64,
    pub translates: usize,
    pub non_unique: usize,
    pub case: ExtensionCase,
    /// Minimal period along `ℓ`, in units of the direction vector.
    pub period: usize,
    pub bound: usize,
    pub within_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripPeriodReport {
    pub direction: Direction,
    pub edge_points: usize,
    /// Offsets (relative to `ℓ` through the origin) spanned by `S ∖ w`.
    pub strip_offsets: (i64, i64),
    /// Period of `η` along `ℓ`: every strip repeats after this many steps.
    pub global_period: usize,
    pub rows: Vec<StripRow>,
    /// Non-unique rows over `|w ∩ S| − 1`.
    pub violations: Vec<i64>,
    /// Unique rows over `2|w ∩ S| − 2`. This bound is only claimed for
    /// nonexpansive directions, so exceeding it is reported, not failed.
    pub exceedances: Vec<i64>,
}

impl StripPeriodReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn strip_offsets(s: &ConvexLatticeSet, d: Direction) -> (i64, i64) {
    let counts = s.line_lattice_count(&DirectedLine::new(d));
    (counts[0].0, counts[counts.len() - 1].0)
}

/// Classify every strip `B_ℓ(S ∖ w) + u` of a periodic configuration and
/// compare its period along `ℓ` with the bound for its case.
pub fn strip_period_bound_check(eta: &Configuration, cert: &BalancedCertificate) -> Result<StripPeriodReport> {
    if !cert.balanced() {
        return Err(Error::InvalidArgument(format!(
            "certificate is not balanced: conditions {:?} fail",
            cert.failures()
        )));
    }
    let lattice = period_lattice(eta)?;
    let s = &cert.set;
    let w = cert.edge.expect("balanced certificates carry their edge");
    let d = cert.direction;
    let inner = s.without_edge(&w)?;
    let offsets = strip_offsets(&inner, d);
    let k = lattice.smallest_multiple(d).expect("periodic configurations are doubly periodic");
    let shifts = lattice.index().unwrap() / k as i64;
    let lang = Language::scan(eta, s.points())?;
    let idx = lang.positions(inner.points()).unwrap();
    let fibers: BTreeMap<Vec<Symbol>, usize> = lang.fan(&idx).into_iter().map(|(b, e)| (b, e.len())).collect();
    let e = transversal(d);
    let v = d.vector();
    let m = w.lattice_count();
    let mut rows = Vec::new();
    for o in 0..shifts {
        let base = e * o;
        let non_unique = (0..k as i64)
            .filter(|&j| {
                let t = base + v * j;
                let colors: Vec<Symbol> = inner.points().iter().map(|&p| eta.try_evaluate(p + t).unwrap()).collect();
                fibers[&colors] > 1
            })
            .count();
        let case = if non_unique == k {
            ExtensionCase::NonUnique
        } else {
            ExtensionCase::Unique
        };
        let bound = match case {
            ExtensionCase::NonUnique => m - 1,
            ExtensionCase::Unique => 2 * m - 2,
        };
        let period = strip_period(eta, d, offsets, base, k);
        rows.push(StripRow {
            shift: o,
            translates: k,
            non_unique,
            case,
            period,
            bound,
            within_bound: period <= bound,
        });
    }
    let over = |c: ExtensionCase| rows.iter().filter(|r| r.case == c && !r.within_bound).map(|r| r.shift).collect();
    Ok(StripPeriodReport {
        direction: d,
        edge_points: m,
        strip_offsets: offsets,
        global_period: k,
        violations: over(ExtensionCase::NonUnique),
        exceedances: over(ExtensionCase::Unique),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropagationReport {
    pub direction: Direction,
    pub strip_offsets: (i64, i64),
    /// Minimal period of `η|_B` along `ℓ`, in units of the direction vector.
    pub strip_period: usize,
    /// Smallest global period parallel to `ℓ`, if any.
    pub global_period: Option<usize>,
    pub holds: bool,
}

/// For periodic `η`: the strip `B` spanned by `S ∖ w` is periodic along `ℓ`,
/// and `η` has a global period parallel to `ℓ`.
pub fn periodic_strip_propagation_check(
    eta: &Configuration,
    line: &DirectedLine,
    s: &ConvexLatticeSet,
    w: &Edge,
) -> Result<PropagationReport> {
    let d = line.direction;
    if w.direction.undirected() != d.undirected() {
        return Err(Error::InvalidArgument(format!("edge {} is not parallel to {d}", w.direction)));
    }
    let lattice = period_lattice(eta)?;
    let inner = s.without_edge(w)?;
    let offsets = strip_offsets(&inner, d);
    let global = lattice.smallest_multiple(d);
    let k = global.expect("periodic configurations are doubly periodic");
    let strip = strip_period(eta, d, offsets, LatticePoint::ORIGIN, k);
    Ok(PropagationReport {
        direction: d,
        strip_offsets: offsets,
        strip_period: strip,
        global_period: global,
        holds: global.is_some(),
    })
}

/// Smallest horizontal period `(k, 0)` of a periodic configuration.
pub fn horizontal_period(eta: &Configuration) -> Result<usize> {
    Ok(period_lattice(eta)?.smallest_multiple(Direction::EAST).unwrap())
}
