//! Exact lattice geometry for finite convex subsets of Z².
//!
//! All predicates use integer cross products. A set `S` is convex when
//! `S = conv(S) ∩ Z²`; its boundary is oriented counterclockwise. When the
//! hull has zero area (a point or a segment) the edge list is empty and the
//! vertex list holds the segment endpoints.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};

/// A point of Z². Ordered row-major: by `y`, then by `x`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
}

impl LatticePoint {
    pub const ORIGIN: LatticePoint = LatticePoint { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub fn cross(self, other: Self) -> i64 {
        self.x * other.y - self.y * other.x
    }

    pub fn dot(self, other: Self) -> i64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_sq(self) -> i64 {
        self.dot(self)
    }
}

impl From<[i64; 2]> for LatticePoint {
    fn from([x, y]: [i64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<LatticePoint> for [i64; 2] {
    fn from(p: LatticePoint) -> Self {
        [p.x, p.y]
    }
}

impl From<(i64, i64)> for LatticePoint {
    fn from((x, y): (i64, i64)) -> Self {
        Self { x, y }
    }
}

impl Ord for LatticePoint {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for LatticePoint {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for LatticePoint {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for LatticePoint {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for LatticePoint {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl Mul<i64> for LatticePoint {
    type Output = Self;
    fn mul(self, k: i64) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Extended Euclid: returns `(g, s, t)` with `s·a + t·b = g = gcd(a, b) ≥ 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// A primitive nonzero integer vector `(p, q)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[i64; 2]", into = "[i64; 2]")]
pub struct Direction {
    p: i64,
    q: i64,
}

impl Direction {
    pub const EAST: Direction = Direction { p: 1, q: 0 };
    pub const NORTH: Direction = Direction { p: 0, q: 1 };
    pub const WEST: Direction = Direction { p: -1, q: 0 };
    pub const SOUTH: Direction = Direction { p: 0, q: -1 };

    pub fn new(p: i64, q: i64) -> Result<Self> {
        if (p, q) == (0, 0) || gcd(p, q) != 1 {
            return Err(Error::NotPrimitive(p, q));
        }
        Ok(Self { p, q })
    }

    /// The primitive vector pointing the same way as `(dx, dy)`.
    pub fn reduce(dx: i64, dy: i64) -> Option<Self> {
        let g = gcd(dx, dy);
        (g != 0).then(|| Self { p: dx / g, q: dy / g })
    }

    pub fn p(self) -> i64 {
        self.p
    }

    pub fn q(self) -> i64 {
        self.q
    }

    pub fn vector(self) -> LatticePoint {
        LatticePoint::new(self.p, self.q)
    }

    pub fn reversed(self) -> Self {
        Self {
            p: -self.p,
            q: -self.q,
        }
    }

    pub fn norm_sq(self) -> i64 {
        self.p * self.p + self.q * self.q
    }

    pub fn is_vertical(self) -> bool {
        self.p == 0
    }

    pub fn is_horizontal(self) -> bool {
        self.q == 0
    }

    /// Canonical representative of the undirected line: first nonzero
    /// coordinate positive.
    pub fn undirected(self) -> Self {
        if self.p < 0 || (self.p == 0 && self.q < 0) {
            self.reversed()
        } else {
            self
        }
    }
}

impl TryFrom<[i64; 2]> for Direction {
    type Error = Error;
    fn try_from([p, q]: [i64; 2]) -> Result<Self> {
        Direction::new(p, q)
    }
}

impl From<Direction> for [i64; 2] {
    fn from(d: Direction) -> Self {
        [d.p, d.q]
    }
}

impl fmt::Debug for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.p, self.q)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

/// A directed rational line through `anchor`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DirectedLine {
    pub direction: Direction,
    pub anchor: LatticePoint,
}

impl DirectedLine {
    pub fn new(direction: Direction) -> Self {
        Self {
            direction,
            anchor: LatticePoint::ORIGIN,
        }
    }

    pub fn through(direction: Direction, anchor: LatticePoint) -> Self {
        Self { direction, anchor }
    }

    pub fn antiparallel(self) -> Self {
        Self {
            direction: self.direction.reversed(),
            anchor: self.anchor,
        }
    }

    /// Signed lattice offset `p·y − q·x` of the translate through `point`,
    /// measured from the anchor. Positive offsets lie to the left.
    pub fn offset(&self, point: LatticePoint) -> i64 {
        self.direction.vector().cross(point - self.anchor)
    }
}

/// A 2×2 integer matrix with determinant ±1, acting on column vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[[i64; 2]; 2]", into = "[[i64; 2]; 2]")]
pub struct Unimodular {
    rows: [[i64; 2]; 2],
}

impl Unimodular {
    pub const IDENTITY: Unimodular = Unimodular {
        rows: [[1, 0], [0, 1]],
    };

    pub fn new(rows: [[i64; 2]; 2]) -> Result<Self> {
        let det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0];
        if det.abs() != 1 {
            return Err(Error::NotUnimodular(det));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> [[i64; 2]; 2] {
        self.rows
    }

    pub fn det(&self) -> i64 {
        self.rows[0][0] * self.rows[1][1] - self.rows[0][1] * self.rows[1][0]
    }

    pub fn apply(&self, v: LatticePoint) -> LatticePoint {
        let [[a, b], [c, d]] = self.rows;
        LatticePoint::new(a * v.x + b * v.y, c * v.x + d * v.y)
    }

    pub fn inverse(&self) -> Self {
        let [[a, b], [c, d]] = self.rows;
        let det = self.det();
        Self {
            rows: [[d * det, -b * det], [-c * det, a * det]],
        }
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        let [[a, b], [c, d]] = self.rows;
        let [[e, f], [g, h]] = other.rows;
        Self {
            rows: [[a * e + b * g, a * f + b * h], [c * e + d * g, c * f + d * h]],
        }
    }

    pub fn apply_direction(&self, d: Direction) -> Direction {
        let v = self.apply(d.vector());
        // unimodular maps send primitive vectors to primitive vectors
        Direction { p: v.x, q: v.y }
    }
}

impl TryFrom<[[i64; 2]; 2]> for Unimodular {
    type Error = Error;
    fn try_from(rows: [[i64; 2]; 2]) -> Result<Self> {
        Unimodular::new(rows)
    }
}

impl From<Unimodular> for [[i64; 2]; 2] {
    fn from(m: Unimodular) -> Self {
        m.rows
    }
}

/// A boundary edge of a convex lattice set, oriented counterclockwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub start: LatticePoint,
    pub end: LatticePoint,
    pub direction: Direction,
}

impl Edge {
    fn between(start: LatticePoint, end: LatticePoint) -> Self {
        let d = end - start;
        Self {
            start,
            end,
            direction: Direction::reduce(d.x, d.y).expect("distinct hull vertices"),
        }
    }

    /// Number of lattice points on the closed edge, `|w ∩ Z²|`.
    pub fn lattice_count(&self) -> usize {
        let d = self.end - self.start;
        gcd(d.x, d.y) as usize + 1
    }

    pub fn length_sq(&self) -> i64 {
        (self.end - self.start).norm_sq()
    }

    pub fn points(&self) -> Vec<LatticePoint> {
        let step = self.direction.vector();
        (0..self.lattice_count() as i64)
            .map(|t| self.start + step * t)
            .collect()
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        let step = self.direction.vector();
        let rel = p - self.start;
        if step.cross(rel) != 0 {
            return false;
        }
        let t = rel.dot(step);
        t >= 0 && t <= (self.end - self.start).dot(step)
    }

    pub fn line(&self) -> DirectedLine {
        DirectedLine::through(self.direction, self.start)
    }
}

/// A finite nonempty set `S ⊂ Z²` with `S = conv(S) ∩ Z²`.
///
/// Points are stored row-major; `vertices` lists `V(S)` counterclockwise
/// starting from the row-major smallest vertex.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<LatticePoint>", into = "Vec<LatticePoint>")]
pub struct ConvexLatticeSet {
    points: Vec<LatticePoint>,
    vertices: Vec<LatticePoint>,
}

impl TryFrom<Vec<LatticePoint>> for ConvexLatticeSet {
    type Error = Error;
    fn try_from(points: Vec<LatticePoint>) -> Result<Self> {
        ConvexLatticeSet::from_points_strict(points)
    }
}

impl From<ConvexLatticeSet> for Vec<LatticePoint> {
    fn from(s: ConvexLatticeSet) -> Self {
        s.points
    }
}

impl fmt::Debug for ConvexLatticeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexLatticeSet")
            .field("points", &self.points)
            .field("vertices", &self.vertices)
            .finish()
    }
}

/// Strict counterclockwise hull vertices (collinear points dropped), starting
/// at the row-major smallest point. Collinear input yields its endpoints.
pub fn hull_vertices(points: &[LatticePoint]) -> Vec<LatticePoint> {
    let mut pts: Vec<LatticePoint> = points.to_vec();
    pts.sort_by_key(|p| (p.x, p.y));
    pts.dedup();
    if pts.len() <= 2 {
        pts.sort();
        return pts;
    }
    let turn = |o: LatticePoint, a: LatticePoint, b: LatticePoint| (a - o).cross(b - o);
    let mut lower: Vec<LatticePoint> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<LatticePoint> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 {
        // all input collinear
        lower.sort();
        return lower;
    }
    let start = lower
        .iter()
        .enumerate()
        .min_by_key(|(_, p)| **p)
        .map(|(i, _)| i)
        .unwrap();
    lower.rotate_left(start);
    lower
}

/// All lattice points of `conv(vertices)`, row-major.
fn fill_hull(vertices: &[LatticePoint]) -> Vec<LatticePoint> {
    match vertices.len() {
        0 => Vec::new(),
        1 => vertices.to_vec(),
        2 => Edge::between(vertices[0], vertices[1]).points(),
        _ => {
            let (xmin, xmax) = min_max(vertices.iter().map(|p| p.x));
            let (ymin, ymax) = min_max(vertices.iter().map(|p| p.y));
            let mut out = Vec::new();
            for y in ymin..=ymax {
                for x in xmin..=xmax {
                    let p = LatticePoint::new(x, y);
                    let inside = (0..vertices.len()).all(|i| {
                        let a = vertices[i];
                        let b = vertices[(i + 1) % vertices.len()];
                        (b - a).cross(p - a) >= 0
                    });
                    if inside {
                        out.push(p);
                    }
                }
            }
            out
        }
    }
}

fn min_max(it: impl Iterator<Item = i64>) -> (i64, i64) {
    it.fold((i64::MAX, i64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Sort and dedup an arbitrary point list into row-major order.
pub fn row_major(points: impl IntoIterator<Item = LatticePoint>) -> Vec<LatticePoint> {
    let mut v: Vec<LatticePoint> = points.into_iter().collect();
    v.sort();
    v.dedup();
    v
}

/// Bounding-box corner `(min x, min y)` of a nonempty point list.
pub fn min_corner(points: &[LatticePoint]) -> LatticePoint {
    let (xmin, _) = min_max(points.iter().map(|p| p.x));
    let (ymin, _) = min_max(points.iter().map(|p| p.y));
    LatticePoint::new(xmin, ymin)
}

/// Whether an arbitrary finite point set equals `conv(points) ∩ Z²`.
pub fn is_convex_point_set(points: &[LatticePoint]) -> bool {
    let pts = row_major(points.iter().copied());
    !pts.is_empty() && fill_hull(&hull_vertices(&pts)) == pts
}

impl ConvexLatticeSet {
    /// `conv(points) ∩ Z²`. Input points are always contained in the result.
    pub fn convex_hull(points: impl IntoIterator<Item = LatticePoint>) -> Result<Self> {
        let pts = row_major(points);
        if pts.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        let vertices = hull_vertices(&pts);
        let points = fill_hull(&vertices);
        Ok(Self { points, vertices })
    }

    /// Like [`convex_hull`](Self::convex_hull) but rejects input that is not
    /// already convex.
    pub fn from_points_strict(points: impl IntoIterator<Item = LatticePoint>) -> Result<Self> {
        let pts = row_major(points);
        let set = Self::convex_hull(pts.iter().copied())?;
        if set.points.len() != pts.len() {
            let first = *set
                .points
                .iter()
                .find(|p| pts.binary_search(p).is_err())
                .expect("completion added a point");
            return Err(Error::NotConvex {
                added: set.points.len() - pts.len(),
                first,
            });
        }
        Ok(set)
    }

    /// The rectangle `R_{n,k} = [0, n−1] × [0, k−1]`.
    pub fn rectangle(n: usize, k: usize) -> Self {
        assert!(n > 0 && k > 0, "rectangle sides must be positive");
        let (n, k) = (n as i64, k as i64);
        let points = (0..k)
            .flat_map(|y| (0..n).map(move |x| LatticePoint::new(x, y)))
            .collect();
        let corners = [(0, 0), (n - 1, 0), (n - 1, k - 1), (0, k - 1)].map(LatticePoint::from);
        Self {
            points,
            vertices: hull_vertices(&corners),
        }
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        self.points.binary_search(&p).is_ok()
    }

    /// `V(S)`, counterclockwise.
    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    pub fn is_vertex(&self, p: LatticePoint) -> bool {
        self.vertices.contains(&p)
    }

    pub fn has_zero_area(&self) -> bool {
        self.vertices.len() < 3
    }

    /// `E(S)`, counterclockwise; empty when the hull has zero area.
    pub fn boundary_edges(&self) -> Vec<Edge> {
        if self.has_zero_area() {
            return Vec::new();
        }
        let n = self.vertices.len();
        (0..n)
            .map(|i| Edge::between(self.vertices[i], self.vertices[(i + 1) % n]))
            .collect()
    }

    /// The edge of `S` with the given counterclockwise direction, if any.
    pub fn edge_parallel_to(&self, direction: Direction) -> Option<Edge> {
        self.boundary_edges()
            .into_iter()
            .find(|e| e.direction == direction)
    }

    /// `S ∖ {x}` for a boundary vertex `x`.
    pub fn remove_vertex(&self, x: LatticePoint) -> Result<Self> {
        if !self.is_vertex(x) {
            return Err(Error::NotBoundaryVertex(x));
        }
        if self.points.len() == 1 {
            return Err(Error::EmptyPointSet);
        }
        let rest: Vec<LatticePoint> = self.points.iter().copied().filter(|&p| p != x).collect();
        Self::from_points_strict(rest)
    }

    /// `S ∖ w`: the points strictly on the interior side of the edge.
    pub fn without_edge(&self, edge: &Edge) -> Result<Self> {
        let step = edge.direction.vector();
        let rest: Vec<LatticePoint> = self
            .points
            .iter()
            .copied()
            .filter(|&p| step.cross(p - edge.start) > 0)
            .collect();
        if rest.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        Self::from_points_strict(rest)
    }

    /// Points per translate of `line` meeting `S`, keyed by
    /// [`DirectedLine::offset`], in increasing offset order.
    pub fn line_lattice_count(&self, line: &DirectedLine) -> Vec<(i64, usize)> {
        let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
        for &p in &self.points {
            *counts.entry(line.offset(p)).or_default() += 1;
        }
        counts.into_iter().collect()
    }

    /// Whether `self` is `E(S)`-enveloped for `s`: each edge of `self` has a
    /// parallel edge of `s` that is no longer than it.
    pub fn is_enveloped_by(&self, s: &ConvexLatticeSet) -> bool {
        let reference = s.boundary_edges();
        self.boundary_edges().iter().all(|w| {
            reference
                .iter()
                .any(|u| u.direction == w.direction && w.length_sq() >= u.length_sq())
        })
    }

    pub fn translate(&self, v: LatticePoint) -> Self {
        Self {
            points: self.points.iter().map(|&p| p + v).collect(),
            vertices: self.vertices.iter().map(|&p| p + v).collect(),
        }
    }

    /// Translate so the bounding-box corner is the origin.
    pub fn normalized(&self) -> Self {
        self.translate(-min_corner(&self.points))
    }

    pub fn transform(&self, m: &Unimodular) -> Self {
        Self::convex_hull(self.points.iter().map(|&p| m.apply(p)))
            .expect("image of a nonempty set is nonempty")
    }

    pub fn is_subset_of(&self, other: &ConvexLatticeSet) -> bool {
        self.points.iter().all(|&p| other.contains(p))
    }

    /// Every nonempty convex subset of `self` (including `self`), each listed
    /// once, in the order discovered by breadth-first vertex removal.
    pub fn convex_subsets(&self) -> Vec<ConvexLatticeSet> {
        let mut seen = std::collections::HashSet::new();
        let mut queue = std::collections::VecDeque::new();
        let mut out = Vec::new();
        seen.insert(self.points.clone());
        queue.push_back(self.clone());
        while let Some(s) = queue.pop_front() {
            if s.len() > 1 {
                for &v in s.vertices() {
                    let child = s.remove_vertex(v).expect("vertex removal keeps convexity");
                    if seen.insert(child.points.clone()) {
                        queue.push_back(child);
                    }
                }
            }
            out.push(s);
        }
        out
    }
}

/// Parse the shape file format: one `x y` pair per line, `#` comments.
/// With `strict`, non-convex input is rejected; otherwise it is completed to
/// its convex hull.
pub fn parse_shape(text: &str, strict: bool) -> Result<ConvexLatticeSet> {
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let mut coord = |name: &str| -> Result<i64> {
            let tok = it
                .next()
                .ok_or_else(|| parse_err(i + 1, format!("missing {name} coordinate")))?;
            tok.parse()
                .map_err(|_| parse_err(i + 1, format!("bad integer {tok:?}")))
        };
        let x = coord("x")?;
        let y = coord("y")?;
        if let Some(extra) = it.next() {
            return Err(parse_err(i + 1, format!("unexpected token {extra:?}")));
        }
        points.push(LatticePoint::new(x, y));
    }
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if strict {
        ConvexLatticeSet::from_points_strict(points)
    } else {
        ConvexLatticeSet::convex_hull(points)
    }
}

/// Emit a shape in the shape file format (row-major, one point per line).
pub fn emit_shape(set: &ConvexLatticeSet) -> String {
    set.points()
        .iter()
        .map(|p| format!("{} {}\n", p.x, p.y))
        .collect()
}
