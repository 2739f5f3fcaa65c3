//! `ℓ`-balanced sets: validation and the three-case construction.
//!
//! An edge `w` of `S` is parallel to a directed line `ℓ` when its
//! counterclockwise direction equals the direction of `ℓ`.

use log::debug;
use serde::{Deserialize, Serialize};

use crate::complexity::discrepancy;
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::extension::{find_generating_set, generated_in, SearchMode, DEFAULT_BUDGET};
use crate::geometry::{ConvexLatticeSet, DirectedLine, Direction, Edge, LatticePoint, Unimodular};
use crate::language::Language;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointEvidence {
    pub point: LatticePoint,
    /// Largest number of extensions of an `S ∖ {point}` coloring.
    pub max_fiber: usize,
    pub generated: bool,
}

/// The four balancedness conditions with their evidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancedCertificate {
    pub set: ConvexLatticeSet,
    pub direction: Direction,
    pub edge: Option<Edge>,
    /// (1) some edge is parallel to `ℓ`.
    pub has_parallel_edge: bool,
    /// (2) both endpoints of the edge are generated by `S`.
    pub endpoints_generated: bool,
    pub endpoints: Vec<EndpointEvidence>,
    /// (3) `D(S ∖ w) > D(S)`.
    pub discrepancy_increases: bool,
    pub d_set: i64,
    pub d_without_edge: Option<i64>,
    /// (4) each `ℓ`-parallel line meeting `S` has at least `|w ∩ S| − 1` points.
    pub lines_full: bool,
    /// `(offset, count)` per `ℓ`-parallel line meeting `S`.
    pub line_counts: Vec<(i64, usize)>,
    pub exhaustive: bool,
}

impl BalancedCertificate {
    pub fn balanced(&self) -> bool {
        self.has_parallel_edge && self.endpoints_generated && self.discrepancy_increases && self.lines_full
    }

    /// The failing condition numbers.
    pub fn failures(&self) -> Vec<u8> {
        [
            self.has_parallel_edge,
            self.endpoints_generated,
            self.discrepancy_increases,
            self.lines_full,
        ]
        .iter()
        .enumerate()
        .filter(|(_, ok)| !**ok)
        .map(|(i, _)| i as u8 + 1)
        .collect()
    }
}

pub fn is_balanced(
    eta: &Configuration,
    s: &ConvexLatticeSet,
    line: &DirectedLine,
) -> Result<BalancedCertificate> {
    let d = line.direction;
    let lang = Language::scan(eta, s.points())?;
    let d_set = discrepancy(lang.len(), s.len());
    let line_counts = s.line_lattice_count(&DirectedLine::new(d));
    let mut cert = BalancedCertificate {
        set: s.clone(),
        direction: d,
        edge: None,
        has_parallel_edge: false,
        endpoints_generated: false,
        endpoints: Vec::new(),
        discrepancy_increases: false,
        d_set,
        d_without_edge: None,
        lines_full: false,
        line_counts,
        exhaustive: lang.exhaustive(),
    };
    let Some(w) = s.edge_parallel_to(d) else {
        return Ok(cert);
    };
    cert.edge = Some(w);
    cert.has_parallel_edge = true;
    for p in [w.start, w.end] {
        let rest: Vec<usize> = s
            .points()
            .iter()
            .filter(|&&q| q != p)
            .map(|&q| lang.position(q).unwrap())
            .collect();
        let max_fiber = lang.fan(&rest).values().map(Vec::len).max().unwrap_or(0);
        cert.endpoints.push(EndpointEvidence {
            point: p,
            max_fiber,
            generated: max_fiber <= 1,
        });
    }
    cert.endpoints_generated = cert.endpoints.iter().all(|e| e.generated);
    let inner = s.without_edge(&w)?;
    let idx: Vec<usize> = inner.points().iter().map(|&q| lang.position(q).unwrap()).collect();
    let d_inner = discrepancy(lang.projected_count(&idx), inner.len());
    cert.d_without_edge = Some(d_inner);
    cert.discrepancy_increases = d_inner > d_set;
    let need = w.lattice_count().saturating_sub(1);
    cert.lines_full = cert.line_counts.iter().all(|&(_, c)| c >= need);
    Ok(cert)
}

/// One logged step of the construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: String,
    pub cells: Vec<LatticePoint>,
    pub discrepancy: Option<i64>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[allow(clippy::large_enum_variant)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BalancedSearch {
    Found {
        set: ConvexLatticeSet,
        certificate: BalancedCertificate,
        trace: Vec<TraceStep>,
    },
    NotFound {
        reason: String,
        trace: Vec<TraceStep>,
    },
}

impl BalancedSearch {
    pub fn set(&self) -> Option<&ConvexLatticeSet> {
        match self {
            BalancedSearch::Found { set, .. } => Some(set),
            BalancedSearch::NotFound { .. } => None,
        }
    }

    pub fn trace(&self) -> &[TraceStep] {
        match self {
            BalancedSearch::Found { trace, .. } | BalancedSearch::NotFound { trace, .. } => trace,
        }
    }
}

struct Tracer(Vec<TraceStep>);

impl Tracer {
    fn log(&mut self, step: &str, cells: &[LatticePoint], d: Option<i64>, note: impl Into<String>) {
        let note = note.into();
        debug!("balanced: {step}: {} cells, D = {d:?}; {note}", cells.len());
        self.0.push(TraceStep {
            step: step.to_string(),
            cells: cells.to_vec(),
            discrepancy: d,
            note,
        });
    }
}

fn oriented_image(m: &Unimodular, d: Direction) -> Direction {
    let v = m.apply_direction(d);
    if m.det() > 0 {
        v
    } else {
        v.reversed()
    }
}

/// Search for an `ℓ`-balanced set following the vertical, horizontal and
/// oblique cases, starting from a generating set inside `R_{n,3}`.
///
/// Oblique directions are first reduced to `(−a, −1)` by a sign change of
/// the coordinates. Every returned set has been re-validated by
/// [`is_balanced`] in the original coordinates.
pub fn find_balanced_set(eta: &Configuration, line: &DirectedLine, n: usize) -> Result<BalancedSearch> {
    let mut tr = Tracer(Vec::new());
    let not_found = |reason: String, tr: Tracer| Ok(BalancedSearch::NotFound { reason, trace: tr.0 });
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if n == 1 {
        return not_found("degenerate: n = 1".into(), tr);
    }
    eta.alphabet().require_at_least(2)?;
    let d = line.direction;
    let r = ConvexLatticeSet::rectangle(n, 3);
    let rl = Language::scan(eta, r.points())?;
    if !rl.exhaustive() {
        return Err(Error::RequiresExhaustive);
    }
    let d_r = discrepancy(rl.len(), r.len());
    tr.log("R_{n,3}", r.points(), Some(d_r), format!("P = {}", rl.len()));
    if rl.len() > 3 * n {
        return not_found(
            format!("complexity hypothesis: P(R_{{{n},3}}) = {} > {}", rl.len(), 3 * n),
            tr,
        );
    }

    let (m, target) = if d.is_vertical() || d == Direction::WEST {
        (Unimodular::IDENTITY, d)
    } else if d == Direction::EAST {
        (Unimodular::new([[-1, 0], [0, -1]]).unwrap(), Direction::WEST)
    } else {
        let a = d.p().abs();
        let target = Direction::new(-a, -d.q().abs()).unwrap();
        let choices = [[[1, 0], [0, 1]], [[-1, 0], [0, -1]], [[-1, 0], [0, 1]], [[1, 0], [0, -1]]];
        let m = choices
            .iter()
            .map(|&c| Unimodular::new(c).unwrap())
            .find(|m| oriented_image(m, d) == target)
            .expect("a sign change maps any oblique direction to the third quadrant");
        (m, target)
    };
    let eta2 = eta.apply_unimodular(&m);
    let line2 = DirectedLine::new(target);
    let m_inv = m.inverse();
    let back = |s: &ConvexLatticeSet| s.transform(&m_inv);

    let finish = |cand: ConvexLatticeSet, step: &str, mut tr: Tracer| -> Result<BalancedSearch> {
        let cert2 = is_balanced(&eta2, &cand, &line2)?;
        if !cert2.balanced() {
            let reason = format!(
                "construction blocked at step {step}: conditions {:?} fail",
                cert2.failures()
            );
            tr.log(step, cand.points(), Some(cert2.d_set), reason.clone());
            return Ok(BalancedSearch::NotFound { reason, trace: tr.0 });
        }
        let set = back(&cand);
        let certificate = is_balanced(eta, &set, line)?;
        if !certificate.balanced() {
            return Ok(BalancedSearch::NotFound {
                reason: format!(
                    "post-validation failed in original coordinates: conditions {:?}",
                    certificate.failures()
                ),
                trace: tr.0,
            });
        }
        tr.log("result", set.points(), Some(certificate.d_set), format!("balanced via {step}"));
        Ok(BalancedSearch::Found {
            set,
            certificate,
            trace: tr.0,
        })
    };

    let mode = if 3 * n <= DEFAULT_BUDGET {
        SearchMode::Exhaustive
    } else {
        SearchMode::Greedy
    };
    let g = find_generating_set(&eta2, n, 3, mode, DEFAULT_BUDGET)?;
    let g = match g.found() {
        Some(g) => g.set.clone(),
        None => return not_found("no generating set inside R_{n,3}".into(), tr),
    };
    tr.log("generating set", g.points(), None, format!("{} vertices", g.vertices().len()));
    let w = g.edge_parallel_to(target);
    if let Some(w) = w {
        if w.lattice_count() == 2 && is_balanced(&eta2, &g, &line2)?.balanced() {
            return finish(g, "two-point edge", tr);
        }
    }

    if target.is_vertical() {
        return finish(r, "vertical", tr);
    }
    if target == Direction::WEST {
        // S_[a,b] = R_{n,2} ∪ {(x, 2) : a ≤ x ≤ b}
        let s_ab = |a: i64, b: i64| -> Vec<LatticePoint> {
            r.points()
                .iter()
                .copied()
                .filter(|p| p.y < 2 || (a..=b).contains(&p.x))
                .collect()
        };
        let d_of = |cells: &[LatticePoint]| {
            let idx = rl.positions(cells).unwrap();
            discrepancy(rl.projected_count(&idx), cells.len())
        };
        let mut best: Option<(i64, i64)> = None;
        'len: for len in 0..n as i64 {
            for a in 0..(n as i64 - len) {
                if d_of(&s_ab(a, a + len)) <= d_r {
                    best = Some((a, a + len));
                    break 'len;
                }
            }
        }
        let (a0, b0) = best.expect("S_[0,n-1] = R_{n,3} qualifies");
        let cells = s_ab(a0, b0);
        tr.log("S_[a,b]", &cells, Some(d_of(&cells)), format!("a = {a0}, b = {b0}"));
        if a0 == b0 {
            return not_found(
                format!("construction blocked at step S_[a,b]: minimal set has a = b = {a0}"),
                tr,
            );
        }
        let cand = ConvexLatticeSet::from_points_strict(cells)?;
        return finish(cand, "S_[a,b]", tr);
    }
    if target.q() != -1 {
        return not_found(
            format!("construction blocked: lines parallel to {d} meet R_{{n,3}} in at most two points"),
            tr,
        );
    }
    oblique(&eta2, &line2, n, d_r, w.as_ref(), tr, finish)
}

#[allow(clippy::too_many_arguments)]
fn oblique(
    eta: &Configuration,
    line: &DirectedLine,
    n: usize,
    d_r: i64,
    w: Option<&Edge>,
    mut tr: Tracer,
    finish: impl FnOnce(ConvexLatticeSet, &str, Tracer) -> Result<BalancedSearch>,
) -> Result<BalancedSearch> {
    let a = -line.direction.p();
    let n = n as i64;
    match w {
        Some(w) => tr.log("edge", &w.points(), None, "generating set has an edge parallel to ℓ"),
        None => tr.log("edge", &[], None, "no parallel edge; unique extension is checked directly"),
    }
    let pt = LatticePoint::new;
    // T_a = R_{n,3} ∪ {(−1,0), …, (−a,0)}
    let mut t_a: Vec<LatticePoint> = ConvexLatticeSet::rectangle(n as usize, 3).points().to_vec();
    t_a.extend((1..=a).map(|i| pt(-i, 0)));
    let host = Language::scan(eta, &t_a)?;
    let d_of = |cells: &[LatticePoint]| {
        let idx = host.positions(cells).unwrap();
        discrepancy(host.projected_count(&idx), cells.len())
    };
    let r_cells = ConvexLatticeSet::rectangle(n as usize, 3).points().to_vec();
    if host.projected_count(&host.positions(&r_cells).unwrap()) != host.len() {
        tr.log("T_a", &t_a, Some(discrepancy(host.len(), t_a.len())), "extension not unique");
        return Ok(BalancedSearch::NotFound {
            reason: "construction blocked at step T_a: R_{n,3} colorings do not extend uniquely".into(),
            trace: tr.0,
        });
    }
    let d_ta = discrepancy(host.len(), t_a.len());
    tr.log("T_a", &t_a, Some(d_ta), format!("D(T_a) = D(R) − a = {} − {a}", d_r));
    let t_tilde: Vec<LatticePoint> = t_a
        .iter()
        .copied()
        .filter(|p| !(p.y == 2 && (0..a).contains(&p.x)))
        .collect();
    tr.log("T~_a", &t_tilde, Some(d_of(&t_tilde)), "top cells (0..a−1, 2) removed");
    let s0: Vec<LatticePoint> = t_tilde
        .iter()
        .copied()
        .filter(|p| !(p.y == 0 && (n - a..n).contains(&p.x)))
        .collect();
    let d_s0 = d_of(&s0);
    tr.log("S_0", &s0, Some(d_s0), "bottom cells (n−a..n−1, 0) removed");
    if d_s0 > 0 {
        return Ok(BalancedSearch::NotFound {
            reason: format!("construction blocked at step S_0: D(S_0) = {d_s0} > 0"),
            trace: tr.0,
        });
    }
    // ℓ_j passes through (−a + j, 0); its cells are (−a + j + a·y, y)
    let on_line = |p: &LatticePoint| p.x - a * p.y + a;
    let u = |i: i64| -> Vec<LatticePoint> { s0.iter().copied().filter(|p| on_line(p) >= i).collect() };
    let ds: Vec<i64> = (0..n).map(|i| d_of(&u(i))).collect();
    for (i, &di) in ds.iter().enumerate() {
        tr.log(&format!("U_{i}"), &u(i as i64), Some(di), "");
    }
    if ds[n as usize - 1] <= 0 {
        return Ok(BalancedSearch::NotFound {
            reason: "construction blocked at step U_{n-1}: D(U_{n-1}) ≤ 0".into(),
            trace: tr.0,
        });
    }
    let i_max = (0..n - 1).rev().find(|&i| ds[i as usize] <= 0).expect("D(U_0) ≤ 0");
    let u_max = ConvexLatticeSet::from_points_strict(u(i_max))?;
    let mut q: Vec<LatticePoint> = u_max.points().iter().copied().filter(|p| on_line(p) == i_max).collect();
    q.sort_by_key(|p| p.y);
    let (q1, q3) = (q[0], *q.last().unwrap());
    let u_lang = host.restricted(u_max.points());
    let gen1 = generated_in(&u_lang, &u_max, q1);
    let gen3 = generated_in(&u_lang, &u_max, q3);
    tr.log(
        "U_imax",
        u_max.points(),
        Some(ds[i_max as usize]),
        format!("i_max = {i_max}; q1 {q1} generated: {gen1}; q3 {q3} generated: {gen3}"),
    );
    if gen1 && gen3 {
        return finish(u_max, "U_imax", tr);
    }
    let drop = if gen3 { q1 } else { q3 };
    let s1 = u_max.remove_vertex(drop)?;
    tr.log("S_1", s1.points(), Some(d_of(s1.points())), format!("removed {drop}"));
    finish(s1, "S_1", tr)
}
