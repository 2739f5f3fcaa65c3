//! Finite-scale detection of nonexpansive lines and directions.
//!
//! For a direction `d = (p, q)` the signed offset of a cell `u` is
//! `c(u) = p·u_y − q·u_x` (positive to the left of `d`), and its position
//! along the line is `u·d`. Distances are compared through squares scaled by
//! `|d|²`, so no rational or floating arithmetic is needed.
//!
//! * Direction `d` at depth `m`, extent `L`: the *inside* cells have
//!   `0 < c ≤ m·|d|` and `|u·d| ≤ L·|d|`; the probe is the origin. The
//!   direction is witnessed when two patterns of the language agree on the
//!   inside and differ at the probe.
//! * Line `d` at radius `r`, extent `L`: the *strip* cells have
//!   `|c| < r·|d|` and `|u·d| ≤ L·|d|`. On each side, the first layer at
//!   distance `≥ r` contributes its cell closest to the perpendicular through
//!   the origin as a probe. The line is witnessed when two patterns agree on
//!   the strip and differ at a probe.

use serde::{Deserialize, Serialize};

use crate::config::{Configuration, Symbol};
use crate::error::{Error, Result};
use crate::extension::{search_generating_set, GeneratingSetResult, SearchMode, DEFAULT_BUDGET};
use crate::geometry::{ext_gcd, min_corner, DirectedLine, Direction, LatticePoint};
use crate::language::Language;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NonexpansiveWitnessed,
    ExpansiveAtRadius,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Probe {
    /// Half-plane truncation for an oriented direction.
    Direction,
    /// Two-sided strip for an undirected line.
    Line,
}

/// One side of a witness: a translate of the configuration and its colors
/// on `agree_cells` followed by `differ_cells`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessPattern {
    pub translate: LatticePoint,
    pub colors: Vec<Symbol>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub agree_cells: Vec<LatticePoint>,
    pub differ_cells: Vec<LatticePoint>,
    /// A cell of `differ_cells` where the two patterns differ.
    pub differ_at: LatticePoint,
    pub first: WitnessPattern,
    pub second: WitnessPattern,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansivityVerdict {
    pub probe: Probe,
    pub direction: Direction,
    /// Depth `m` (directions) or radius `r` (lines).
    pub radius: u32,
    pub extent: u32,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

impl ExpansivityVerdict {
    pub fn witnessed(&self) -> bool {
        self.verdict == Verdict::NonexpansiveWitnessed
    }
}

impl Witness {
    /// Check the witness against the configuration: both translates
    /// reproduce their colors, agree on `agree_cells` and differ at
    /// `differ_at`.
    pub fn replay(&self, eta: &Configuration) -> Result<bool> {
        let cells: Vec<LatticePoint> = self
            .agree_cells
            .iter()
            .chain(&self.differ_cells)
            .copied()
            .collect();
        for side in [&self.first, &self.second] {
            for (i, &c) in cells.iter().enumerate() {
                if eta.evaluate(c + side.translate)? != side.colors[i] {
                    return Ok(false);
                }
            }
        }
        let n = self.agree_cells.len();
        let agree = self.first.colors[..n] == self.second.colors[..n];
        let Some(j) = self.differ_cells.iter().position(|&c| c == self.differ_at) else {
            return Ok(false);
        };
        Ok(agree && self.first.colors[n + j] != self.second.colors[n + j])
    }
}

fn check_scale(radius: u32, extent: u32) -> Result<()> {
    if radius == 0 || extent == 0 {
        return Err(Error::InvalidArgument(
            "radius and extent must be positive".into(),
        ));
    }
    Ok(())
}

/// Cells `u` with `|u·d| ≤ L·|d|` and offset `c(u)` accepted by `keep`,
/// listed row-major.
fn band(d: Direction, extent: u32, c_max: i64, keep: impl Fn(i64) -> bool) -> Vec<LatticePoint> {
    let n2 = d.norm_sq();
    let l2 = (extent as i64).pow(2) * n2;
    // |u|² = (c² + (u·d)²) / |d|², so a box of half-side c_max + L covers it
    let b = c_max + extent as i64 + 1;
    let mut out = Vec::new();
    for y in -b..=b {
        for x in -b..=b {
            let u = LatticePoint::new(x, y);
            let c = d.vector().cross(u);
            let a = u.dot(d.vector());
            if a * a <= l2 && keep(c) {
                out.push(u);
            }
        }
    }
    out
}

/// The cell on layer `c` closest to the perpendicular through the origin;
/// ties go to the smaller position along `d`.
fn layer_representative(d: Direction, c: i64) -> LatticePoint {
    // p·y − q·x = c; ext_gcd gives s·p + t·q = 1
    let (_, s, t) = ext_gcd(d.p(), d.q());
    let u0 = LatticePoint::new(-t * c, s * c);
    let n2 = d.norm_sq();
    let a0 = u0.dot(d.vector());
    let k = (-a0).div_euclid(n2);
    [k, k + 1]
        .into_iter()
        .map(|k| u0 + d.vector() * k)
        .min_by_key(|u| {
            let a = u.dot(d.vector());
            (a.abs(), a)
        })
        .unwrap()
}

/// Smallest `c > 0` with `c² ≥ r²·|d|²`.
fn first_layer_beyond(d: Direction, r: u32) -> i64 {
    let target = (r as i64).pow(2) * d.norm_sq();
    let mut c = (target as f64).sqrt() as i64;
    while c * c < target {
        c += 1;
    }
    while c > 1 && (c - 1) * (c - 1) >= target {
        c -= 1;
    }
    c.max(1)
}

fn scan_host(eta: &Configuration, host: &[LatticePoint]) -> Result<Language> {
    match Language::scan(eta, host) {
        Err(Error::ShapeExceedsDomain) => {
            let lo = min_corner(host);
            let hi_x = host.iter().map(|p| p.x).max().unwrap();
            let hi_y = host.iter().map(|p| p.y).max().unwrap();
            Err(Error::WindowTooSmall {
                width: hi_x - lo.x + 1,
                height: hi_y - lo.y + 1,
            })
        }
        other => other,
    }
}

/// Search for two patterns on `agree ∪ differ` agreeing on `agree` and
/// differing somewhere on `differ`. Returns the canonically first pair.
fn find_witness(
    eta: &Configuration,
    agree: Vec<LatticePoint>,
    differ: Vec<LatticePoint>,
) -> Result<Option<Witness>> {
    let host: Vec<LatticePoint> = agree.iter().chain(&differ).copied().collect();
    let lang = scan_host(eta, &host)?;
    let idx: Vec<usize> = (0..agree.len()).collect();
    let fan = lang.fan(&idx);
    let Some(ext) = fan.values().find(|e| e.len() > 1) else {
        return Ok(None);
    };
    let (i, j) = (ext[0], ext[1]);
    let (a, b) = (&lang.patterns()[i], &lang.patterns()[j]);
    let k = (agree.len()..host.len())
        .find(|&k| a[k] != b[k])
        .expect("distinct patterns agreeing on the base differ on the probes");
    Ok(Some(Witness {
        differ_at: host[k],
        first: WitnessPattern {
            translate: lang.witness(i),
            colors: a.clone(),
        },
        second: WitnessPattern {
            translate: lang.witness(j),
            colors: b.clone(),
        },
        agree_cells: agree,
        differ_cells: differ,
    }))
}

fn verdict(
    probe: Probe,
    d: Direction,
    radius: u32,
    extent: u32,
    witness: Option<Witness>,
) -> ExpansivityVerdict {
    ExpansivityVerdict {
        probe,
        direction: d,
        radius,
        extent,
        verdict: if witness.is_some() {
            Verdict::NonexpansiveWitnessed
        } else {
            Verdict::ExpansiveAtRadius
        },
        witness,
    }
}

/// Half-plane test for the oriented direction of `line` at depth `m`.
pub fn direction_nonexpansive_at_scale(
    eta: &Configuration,
    line: &DirectedLine,
    m: u32,
    extent: u32,
) -> Result<ExpansivityVerdict> {
    check_scale(m, extent)?;
    let d = line.direction;
    let m2 = (m as i64).pow(2) * d.norm_sq();
    let c_max = first_layer_beyond(d, m);
    let inside = band(d, extent, c_max, |c| c > 0 && c * c <= m2);
    let w = find_witness(eta, inside, vec![LatticePoint::ORIGIN])?;
    Ok(verdict(Probe::Direction, d, m, extent, w))
}

/// Strip test for the undirected line of `line` at radius `r`.
pub fn line_nonexpansive_at_scale(
    eta: &Configuration,
    line: &DirectedLine,
    r: u32,
    extent: u32,
) -> Result<ExpansivityVerdict> {
    check_scale(r, extent)?;
    let d = line.direction.undirected();
    let r2 = (r as i64).pow(2) * d.norm_sq();
    let c_r = first_layer_beyond(d, r);
    let strip = band(d, extent, c_r, |c| c * c < r2);
    let probes = vec![layer_representative(d, -c_r), layer_representative(d, c_r)];
    let w = find_witness(eta, strip, probes)?;
    Ok(verdict(Probe::Line, d, r, extent, w))
}

/// Both orientations of every distinct edge direction of the set, in
/// counterclockwise edge order.
pub fn candidate_nonexpansive_lines(s: &GeneratingSetResult) -> Vec<DirectedLine> {
    let mut dirs: Vec<Direction> = Vec::new();
    let edges = s.edge_directions();
    for &d in &edges {
        if !dirs.contains(&d) {
            dirs.push(d);
        }
    }
    for &d in &edges {
        if !dirs.contains(&d.reversed()) {
            dirs.push(d.reversed());
        }
    }
    dirs.into_iter().map(DirectedLine::new).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateOrigin {
    /// Parallel to an edge of the generating set.
    Edge,
    /// Parallel to a generating set of zero area (a segment).
    Segment,
    /// One of the axis and diagonal directions tested for every input.
    Baseline,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusLine {
    /// Canonical orientation of the undirected line.
    pub direction: Direction,
    pub origin: CandidateOrigin,
    pub line: ExpansivityVerdict,
    pub forward: ExpansivityVerdict,
    pub backward: ExpansivityVerdict,
    pub witnessed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub radius: u32,
    pub extent: u32,
    /// Smallest `n ≤ n_max` with `P(n, 3) ≤ 3n`, if any.
    pub n: Option<usize>,
    pub generating_set: Option<GeneratingSetResult>,
    pub counts_exact: bool,
    pub lines: Vec<CensusLine>,
    pub witnessed_lines: usize,
}

pub const BASELINE_DIRECTIONS: [(i64, i64); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];

/// Nonexpansive-line census: candidate lines come from the edges of a
/// generating set inside `R_{n,3}` (or its direction when it is a segment),
/// plus the axis and diagonal directions. Each candidate is tested as a line
/// and in both orientations.
pub fn census(eta: &Configuration, n_max: usize, radius: u32, extent: u32) -> Result<Census> {
    check_scale(radius, extent)?;
    let mut n_found = None;
    let mut generating_set = None;
    for n in 1..=n_max {
        let search = match search_generating_set(eta, n, 3, SearchMode::Exhaustive, DEFAULT_BUDGET, false)
        {
            Err(Error::BudgetExceeded { .. }) => {
                search_generating_set(eta, n, 3, SearchMode::Greedy, DEFAULT_BUDGET, false)?
            }
            Err(Error::ShapeExceedsDomain) => break,
            other => other?,
        };
        if let Some(g) = search.found() {
            n_found = Some(n);
            generating_set = Some(g.clone());
            break;
        }
    }
    let mut candidates: Vec<(Direction, CandidateOrigin)> = Vec::new();
    let mut push = |d: Direction, o: CandidateOrigin| {
        let d = d.undirected();
        if !candidates.iter().any(|(e, _)| *e == d) {
            candidates.push((d, o));
        }
    };
    if let Some(g) = &generating_set {
        for line in candidate_nonexpansive_lines(g) {
            push(line.direction, CandidateOrigin::Edge);
        }
        let v = g.set.vertices();
        if g.set.has_zero_area() && v.len() == 2 {
            let d = v[1] - v[0];
            push(Direction::reduce(d.x, d.y).unwrap(), CandidateOrigin::Segment);
        }
    }
    for (p, q) in BASELINE_DIRECTIONS {
        push(Direction::new(p, q).unwrap(), CandidateOrigin::Baseline);
    }
    let mut lines = Vec::with_capacity(candidates.len());
    for (d, origin) in candidates {
        let l = DirectedLine::new(d);
        let line = line_nonexpansive_at_scale(eta, &l, radius, extent)?;
        let forward = direction_nonexpansive_at_scale(eta, &l, radius, extent)?;
        let backward = direction_nonexpansive_at_scale(eta, &l.antiparallel(), radius, extent)?;
        let witnessed = line.witnessed() || forward.witnessed() || backward.witnessed();
        lines.push(CensusLine {
            direction: d,
            origin,
            line,
            forward,
            backward,
            witnessed,
        });
    }
    Ok(Census {
        radius,
        extent,
        n: n_found,
        counts_exact: eta.is_exhaustive(),
        witnessed_lines: lines.iter().filter(|l| l.witnessed).count(),
        generating_set,
        lines,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingEntry {
    pub direction: Direction,
    pub forward: bool,
    pub backward: bool,
    /// Only one orientation witnessed while exact counts satisfy the
    /// complexity hypothesis.
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingReport {
    pub hypothesis_exact: bool,
    pub entries: Vec<PairingEntry>,
}

impl PairingReport {
    pub fn flagged(&self) -> usize {
        self.entries.iter().filter(|e| e.flagged).count()
    }
}

/// For each witnessed line, whether one or both orientations carry
/// witnesses. `hypothesis_exact` states that exact counts show
/// `P(n, 3) ≤ 3n` for some `n`; only then is a one-sided line flagged.
pub fn antiparallel_pairing_check(census: &Census, hypothesis_exact: bool) -> PairingReport {
    let entries = census
        .lines
        .iter()
        .filter(|l| l.witnessed)
        .map(|l| {
            let (f, b) = (l.forward.witnessed(), l.backward.witnessed());
            PairingEntry {
                direction: l.direction,
                forward: f,
                backward: b,
                flagged: hypothesis_exact && f != b,
            }
        })
        .collect();
    PairingReport {
        hypothesis_exact,
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::generators::*;
    use crate::config::LiftRule;
    use crate::geometry::ConvexLatticeSet;

    fn line(p: i64, q: i64) -> DirectedLine {
        DirectedLine::new(Direction::new(p, q).unwrap())
    }

    #[test]
    fn representatives_lie_on_their_layer() {
        for (p, q) in [(1, 0), (0, 1), (1, 1), (2, -3), (-5, 2)] {
            let d = Direction::new(p, q).unwrap();
            for c in [-7, -1, 1, 4] {
                let u = layer_representative(d, c);
                assert_eq!(d.vector().cross(u), c);
                let a = u.dot(d.vector());
                assert!(2 * a.abs() <= d.norm_sq());
            }
        }
        assert_eq!(first_layer_beyond(Direction::new(1, 1).unwrap(), 6), 9);
        assert_eq!(first_layer_beyond(Direction::EAST, 3), 3);
    }

    #[test]
    fn checkerboard_is_expansive() {
        let c = checkerboard();
        for (p, q) in [(1, 0), (0, 1), (1, 1), (2, -1)] {
            let v = direction_nonexpansive_at_scale(&c, &line(p, q), 3, 3).unwrap();
            assert_eq!(v.verdict, Verdict::ExpansiveAtRadius);
            assert!(v.witness.is_none());
        }
    }

    #[test]
    fn fibonacci_directions() {
        let f = fibonacci_lift(200, LiftRule::X);
        for l in [line(0, 1), line(0, -1)] {
            let v = direction_nonexpansive_at_scale(&f, &l, 8, 8).unwrap();
            assert!(v.witnessed());
            assert!(v.witness.unwrap().replay(&f).unwrap());
        }
        let v = direction_nonexpansive_at_scale(&f, &line(1, 0), 2, 8).unwrap();
        assert!(!v.witnessed());
    }

    #[test]
    fn line_examples() {
        let k = constant(2, 0);
        for r in 1..4 {
            assert!(!line_nonexpansive_at_scale(&k, &line(1, 2), r, 4).unwrap().witnessed());
        }
        let f = fibonacci_lift(200, LiftRule::X);
        let v = line_nonexpansive_at_scale(&f, &line(0, 1), 5, 10).unwrap();
        assert!(v.witnessed());
        assert!(v.witness.unwrap().replay(&f).unwrap());
        let s = vertical_stripes(2);
        assert!(!line_nonexpansive_at_scale(&s, &line(0, 1), 2, 4).unwrap().witnessed());
    }

    #[test]
    fn window_too_small() {
        let t = thue_morse_2d(2);
        let err = line_nonexpansive_at_scale(&t, &line(1, 0), 3, 3).unwrap_err();
        assert!(matches!(err, Error::WindowTooSmall { .. }));
    }

    #[test]
    fn candidates_from_edges() {
        let mk = |s: ConvexLatticeSet| GeneratingSetResult {
            p: 1,
            discrepancy: 0,
            set: s,
            mode: SearchMode::Greedy,
            minimality_certified: false,
            subsets_checked: 0,
        };
        let dom = mk(ConvexLatticeSet::rectangle(2, 1));
        assert!(candidate_nonexpansive_lines(&dom).is_empty());
        let dirs: Vec<Direction> = candidate_nonexpansive_lines(&mk(ConvexLatticeSet::rectangle(2, 3)))
            .iter()
            .map(|l| l.direction)
            .collect();
        assert_eq!(
            dirs,
            vec![Direction::EAST, Direction::NORTH, Direction::WEST, Direction::SOUTH]
        );
        let hex = ConvexLatticeSet::rectangle(3, 3)
            .remove_vertex(LatticePoint::new(0, 0))
            .unwrap()
            .remove_vertex(LatticePoint::new(2, 2))
            .unwrap();
        assert_eq!(candidate_nonexpansive_lines(&mk(hex)).len(), 6);
    }

    #[test]
    fn censuses() {
        let c = census(&checkerboard(), 4, 4, 4).unwrap();
        assert_eq!(c.witnessed_lines, 0);
        assert!(antiparallel_pairing_check(&c, true).entries.is_empty());
        let f = fibonacci_lift(200, LiftRule::X);
        let c = census(&f, 4, 6, 6).unwrap();
        assert_eq!(c.witnessed_lines, 1);
        let w = c.lines.iter().find(|l| l.witnessed).unwrap();
        assert_eq!(w.direction, Direction::NORTH);
        assert!(w.forward.witnessed() && w.backward.witnessed());
        let report = antiparallel_pairing_check(&c, false);
        assert_eq!(report.entries.len(), 1);
        assert_eq!(report.flagged(), 0);
    }

    #[test]
    fn full_shift_window_witnesses_everything() {
        // a de Bruijn-like window rich enough for small probes
        let w = crate::config::Configuration::window(
            crate::config::Alphabet::digits(2),
            crate::config::Grid::from_fn(64, 64, |x, y| {
                (((x * 7 + y * 13) ^ (x * y + 3 * x)) >> 2 & 1) as Symbol
            }),
        )
        .unwrap();
        let v = line_nonexpansive_at_scale(&w, &line(1, 0), 1, 1).unwrap();
        assert!(v.witnessed());
        assert!(v.witness.unwrap().replay(&w).unwrap());
    }
}
