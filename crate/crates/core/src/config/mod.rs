//! Configurations `η: Z² → A` and the translation action on them.
//!
//! A [`Configuration`] is a *source* (periodic fundamental domain, finite
//! window, lifted word, or iterated block substitution) seen through a
//! unimodular affine *view*: the value at view coordinate `v` is the source
//! value at `M·v + t`. Translation and unimodular recoordinatization only
//! change the view, so they are cheap and lazy.

mod format;
pub mod generators;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexLatticeSet, LatticePoint, Unimodular, min_corner, row_major};

pub use format::{from_json, from_text, to_json, to_text};

/// Index of a symbol in its [`Alphabet`].
pub type Symbol = u8;

/// Ordered set of opaque symbol tokens.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::Alphabet("alphabet is empty".into()));
        }
        if symbols.len() > 256 {
            return Err(Error::Alphabet(format!(
                "{} symbols exceed the supported 256",
                symbols.len()
            )));
        }
        let mut seen = HashSet::new();
        for s in &symbols {
            if s.is_empty() || s.chars().any(|c| c.is_whitespace() || c == '#' || c == ':') {
                return Err(Error::Alphabet(format!("invalid token {s:?}")));
            }
            if !seen.insert(s.as_str()) {
                return Err(Error::Alphabet(format!("duplicate symbol {s:?}")));
            }
        }
        Ok(Self { symbols })
    }

    /// The alphabet `0, 1, …, n−1`.
    pub fn digits(n: usize) -> Self {
        Self::new((0..n).map(|i| i.to_string())).expect("valid digit alphabet")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn index_of(&self, token: &str) -> Option<Symbol> {
        self.symbols
            .iter()
            .position(|s| s == token)
            .map(|i| i as Symbol)
    }

    pub fn token(&self, s: Symbol) -> &str {
        &self.symbols[s as usize]
    }

    pub fn require_at_least(&self, need: usize) -> Result<()> {
        if self.len() < need {
            return Err(Error::AlphabetTooSmall {
                need,
                have: self.len(),
            });
        }
        Ok(())
    }

    fn check(&self, cells: &[Symbol]) -> Result<()> {
        if let Some(&bad) = cells.iter().find(|&&c| c as usize >= self.len()) {
            return Err(Error::Alphabet(format!(
                "symbol index {bad} outside alphabet of size {}",
                self.len()
            )));
        }
        Ok(())
    }
}

/// Dense rectangle of symbols, stored with row `y = 0` first.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid {
    width: usize,
    height: usize,
    cells: Vec<Symbol>,
}

impl Grid {
    pub fn new(width: usize, height: usize, cells: Vec<Symbol>) -> Result<Self> {
        if width == 0 || height == 0 || cells.len() != width * height {
            return Err(Error::InvalidArgument(format!(
                "grid {width}x{height} needs {} cells, got {}",
                width * height,
                cells.len()
            )));
        }
        Ok(Self {
            width,
            height,
            cells,
        })
    }

    /// Build from rows listed bottom (`y = 0`) first.
    pub fn from_rows(rows: &[Vec<Symbol>]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidArgument("ragged grid rows".into()));
        }
        Self::new(width, height, rows.concat())
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> Symbol) -> Self {
        let cells = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self {
            width,
            height,
            cells,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cells(&self) -> &[Symbol] {
        &self.cells
    }

    pub fn get(&self, x: usize, y: usize) -> Symbol {
        self.cells[y * self.width + x]
    }

    /// Rows bottom (`y = 0`) first.
    pub fn rows(&self) -> impl Iterator<Item = &[Symbol]> {
        self.cells.chunks(self.width)
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Grid {}x{}", self.width, self.height)?;
        for row in self.rows().collect::<Vec<_>>().iter().rev() {
            let line: Vec<String> = row.iter().map(|s| s.to_string()).collect();
            writeln!(f, "  {}", line.join(" "))?;
        }
        Ok(())
    }
}

/// How a one-dimensional word is lifted to the plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LiftRule {
    /// `η(x, y) = s(x)`: constant columns.
    #[serde(rename = "x")]
    X,
    /// `η(x, y) = s(y)`: constant rows.
    #[serde(rename = "y")]
    Y,
    /// `η(x, y) = s(x + y)`: constant anti-diagonals.
    #[serde(rename = "x+y")]
    XPlusY,
}

impl LiftRule {
    pub fn token(self) -> &'static str {
        match self {
            LiftRule::X => "x",
            LiftRule::Y => "y",
            LiftRule::XPlusY => "x+y",
        }
    }

    pub fn parse(tok: &str) -> Option<Self> {
        match tok {
            "x" => Some(LiftRule::X),
            "y" => Some(LiftRule::Y),
            "x+y" => Some(LiftRule::XPlusY),
            _ => None,
        }
    }

    fn index(self, p: LatticePoint) -> i64 {
        match self {
            LiftRule::X => p.x,
            LiftRule::Y => p.y,
            LiftRule::XPlusY => p.x + p.y,
        }
    }
}

/// A 2D block substitution: each symbol maps to an `m × m` block.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubstitutionRule {
    block_size: usize,
    blocks: Vec<Grid>,
}

impl SubstitutionRule {
    /// `blocks[s]` is the image of symbol `s`; every block must be `m × m`
    /// with `m ≥ 2`.
    pub fn new(alphabet: &Alphabet, blocks: Vec<Option<Grid>>) -> Result<Self> {
        if blocks.len() > alphabet.len() {
            return Err(Error::InvalidArgument(
                "more substitution blocks than symbols".into(),
            ));
        }
        let mut out = Vec::with_capacity(alphabet.len());
        for s in 0..alphabet.len() {
            match blocks.get(s).cloned().flatten() {
                Some(g) => {
                    alphabet.check(g.cells())?;
                    out.push(g)
                }
                None => return Err(Error::MissingRule(alphabet.token(s as Symbol).into())),
            }
        }
        let m = out[0].width();
        if m < 2 || out.iter().any(|g| g.width() != m || g.height() != m) {
            return Err(Error::InvalidArgument(
                "substitution blocks must all be square of the same size m >= 2".into(),
            ));
        }
        Ok(Self {
            block_size: m,
            blocks: out,
        })
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn block(&self, s: Symbol) -> &Grid {
        &self.blocks[s as usize]
    }

    /// `k`-fold substitution from `seed`: an `m^k × m^k` grid.
    pub fn iterate(&self, seed: Symbol, k: u32) -> Grid {
        let mut g = Grid {
            width: 1,
            height: 1,
            cells: vec![seed],
        };
        let m = self.block_size;
        for _ in 0..k {
            let side = g.width * m;
            let mut cells = vec![0; side * side];
            for y in 0..g.height {
                for x in 0..g.width {
                    let b = self.block(g.get(x, y));
                    for dy in 0..m {
                        for dx in 0..m {
                            cells[(y * m + dy) * side + x * m + dx] = b.get(dx, dy);
                        }
                    }
                }
            }
            g = Grid {
                width: side,
                height: side,
                cells,
            };
        }
        g
    }
}

/// Where the values of a configuration come from.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Source {
    /// Total, with period vectors `(w, 0)` and `(0, h)`.
    Periodic(Grid),
    /// Defined only on `[0, W) × [0, H)`.
    Window(Grid),
    /// A finite word lifted along a [`LiftRule`]; defined where the word
    /// index lies in `[0, len)`.
    WordLift { word: Vec<Symbol>, rule: LiftRule },
    /// Window produced by iterating a block substitution.
    Substitution {
        rule: SubstitutionRule,
        seed: Symbol,
        iterations: u32,
        grid: Grid,
    },
}

impl Source {
    pub fn kind(&self) -> &'static str {
        match self {
            Source::Periodic(_) => "periodic",
            Source::Window(_) => "window",
            Source::WordLift { .. } => "wordlift",
            Source::Substitution { .. } => "substitution",
        }
    }

    fn value(&self, p: LatticePoint) -> Option<Symbol> {
        match self {
            Source::Periodic(g) => {
                let x = p.x.rem_euclid(g.width as i64) as usize;
                let y = p.y.rem_euclid(g.height as i64) as usize;
                Some(g.get(x, y))
            }
            Source::Window(g) | Source::Substitution { grid: g, .. } => {
                let inside =
                    (0..g.width as i64).contains(&p.x) && (0..g.height as i64).contains(&p.y);
                inside.then(|| g.get(p.x as usize, p.y as usize))
            }
            Source::WordLift { word, rule } => {
                let i = rule.index(p);
                (0..word.len() as i64)
                    .contains(&i)
                    .then(|| word[i as usize])
            }
        }
    }

    /// Representative source offsets `b` such that every cell `c + b` is
    /// defined, covering every distinct coloring of the cells. For periodic
    /// sources this is one full fundamental domain.
    fn offsets(&self, cells: &[LatticePoint]) -> Vec<LatticePoint> {
        if cells.is_empty() {
            return vec![LatticePoint::ORIGIN];
        }
        let span = |f: &dyn Fn(&LatticePoint) -> i64, len: usize| -> Vec<i64> {
            let lo = cells.iter().map(f).min().unwrap();
            let hi = cells.iter().map(f).max().unwrap();
            (-lo..=(len as i64 - 1 - hi)).collect()
        };
        match self {
            Source::Periodic(g) => (0..g.height as i64)
                .flat_map(|y| (0..g.width as i64).map(move |x| LatticePoint::new(x, y)))
                .collect(),
            Source::Window(g) | Source::Substitution { grid: g, .. } => {
                let xs = span(&|p| p.x, g.width);
                let ys = span(&|p| p.y, g.height);
                ys.iter()
                    .flat_map(|&y| xs.iter().map(move |&x| LatticePoint::new(x, y)))
                    .collect()
            }
            Source::WordLift { word, rule } => {
                let idx = span(&|p| rule.index(*p), word.len());
                match rule {
                    LiftRule::Y => idx.into_iter().map(|i| LatticePoint::new(0, i)).collect(),
                    _ => idx.into_iter().map(|i| LatticePoint::new(i, 0)).collect(),
                }
            }
        }
    }
}

/// Affine view `v ↦ M·v + t` from view coordinates to source coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct View {
    pub matrix: Unimodular,
    pub shift: LatticePoint,
}

impl View {
    pub const IDENTITY: View = View {
        matrix: Unimodular::IDENTITY,
        shift: LatticePoint::ORIGIN,
    };

    pub fn apply(&self, v: LatticePoint) -> LatticePoint {
        self.matrix.apply(v) + self.shift
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }
}

/// A coloring `η` of (part of) Z².
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    alphabet: Alphabet,
    source: Source,
    view: View,
}

/// A shape together with a coloring of it. The shape is translated so its
/// bounding-box corner is the origin; colors follow the row-major order of
/// the shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pattern {
    pub shape: Vec<LatticePoint>,
    pub colors: Vec<Symbol>,
}

impl Pattern {
    pub fn color_at(&self, p: LatticePoint) -> Option<Symbol> {
        self.shape
            .binary_search(&p)
            .ok()
            .map(|i| self.colors[i])
    }

    /// Compact `"01 10"`-style rendering: rows bottom first, cells outside
    /// the shape shown as `.`. Single-character tokens only.
    pub fn render(&self, alphabet: &Alphabet) -> String {
        if self.shape.is_empty() {
            return String::new();
        }
        let xmax = self.shape.iter().map(|p| p.x).max().unwrap();
        let ymax = self.shape.iter().map(|p| p.y).max().unwrap();
        (0..=ymax)
            .map(|y| {
                (0..=xmax)
                    .map(|x| match self.color_at(LatticePoint::new(x, y)) {
                        Some(s) => alphabet.token(s).to_string(),
                        None => ".".to_string(),
                    })
                    .collect::<String>()
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl Configuration {
    pub fn new(alphabet: Alphabet, source: Source) -> Result<Self> {
        match &source {
            Source::Periodic(g) | Source::Window(g) => alphabet.check(g.cells())?,
            Source::WordLift { word, .. } => {
                if word.is_empty() {
                    return Err(Error::InvalidArgument("word is empty".into()));
                }
                alphabet.check(word)?
            }
            Source::Substitution { grid, seed, .. } => {
                alphabet.check(grid.cells())?;
                alphabet.check(&[*seed])?
            }
        }
        Ok(Self {
            alphabet,
            source,
            view: View::IDENTITY,
        })
    }

    pub fn periodic(alphabet: Alphabet, grid: Grid) -> Result<Self> {
        Self::new(alphabet, Source::Periodic(grid))
    }

    pub fn window(alphabet: Alphabet, grid: Grid) -> Result<Self> {
        Self::new(alphabet, Source::Window(grid))
    }

    pub fn word_lift(alphabet: Alphabet, word: Vec<Symbol>, rule: LiftRule) -> Result<Self> {
        Self::new(alphabet, Source::WordLift { word, rule })
    }

    /// `k`-fold iterate of a block substitution from `seed`, as a window.
    pub fn substitution(
        alphabet: Alphabet,
        rule: SubstitutionRule,
        seed: Symbol,
        iterations: u32,
    ) -> Result<Self> {
        let grid = rule.iterate(seed, iterations);
        Self::new(
            alphabet,
            Source::Substitution {
                rule,
                seed,
                iterations,
                grid,
            },
        )
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn view(&self) -> &View {
        &self.view
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.source, Source::Periodic(_))
    }

    /// Pattern counts are exact (rather than lower bounds) only for
    /// periodic sources.
    pub fn is_exhaustive(&self) -> bool {
        self.is_periodic()
    }

    pub(crate) fn source_value(&self, p: LatticePoint) -> Option<Symbol> {
        self.source.value(p)
    }

    pub fn try_evaluate(&self, v: LatticePoint) -> Option<Symbol> {
        self.source.value(self.view.apply(v))
    }

    pub fn evaluate(&self, v: LatticePoint) -> Result<Symbol> {
        self.try_evaluate(v).ok_or(Error::UndefinedCell(v))
    }

    /// `T^u η`, i.e. `x ↦ η(x + u)`.
    pub fn translate(&self, u: LatticePoint) -> Self {
        let mut out = self.clone();
        out.view.shift = self.view.apply(u);
        out
    }

    /// `η ∘ M⁻¹`.
    pub fn apply_unimodular(&self, m: &Unimodular) -> Self {
        let mut out = self.clone();
        out.view.matrix = self.view.matrix.compose(&m.inverse());
        out
    }

    /// Source-space cells `M·c` and the source offsets `b` for which every
    /// `M·c + b` is defined. Offset `b` corresponds to the view translate
    /// [`Self::view_translate`]`(b)`.
    pub(crate) fn admissible_translates(
        &self,
        cells: &[LatticePoint],
    ) -> Result<(Vec<LatticePoint>, Vec<LatticePoint>)> {
        let src: Vec<LatticePoint> = cells.iter().map(|&c| self.view.matrix.apply(c)).collect();
        let offsets = self.source.offsets(&src);
        if offsets.is_empty() {
            return Err(Error::ShapeExceedsDomain);
        }
        Ok((src, offsets))
    }

    /// The view translate `u` with `M·u + t = b`.
    pub(crate) fn view_translate(&self, b: LatticePoint) -> LatticePoint {
        self.view.matrix.inverse().apply(b - self.view.shift)
    }

    /// `(T^u η)|_S` as a normalized [`Pattern`].
    pub fn restrict(&self, shape: &[LatticePoint], u: LatticePoint) -> Result<Pattern> {
        let shape = row_major(shape.iter().copied());
        let mut colors = Vec::with_capacity(shape.len());
        let mut missing = Vec::new();
        for &p in &shape {
            match self.try_evaluate(p + u) {
                Some(c) => colors.push(c),
                None => missing.push(p + u),
            }
        }
        if !missing.is_empty() {
            return Err(Error::UndefinedCells(missing));
        }
        Ok(normalized_pattern(shape, colors))
    }

    pub fn restrict_set(&self, shape: &ConvexLatticeSet, u: LatticePoint) -> Result<Pattern> {
        self.restrict(shape.points(), u)
    }

    /// Periodic source grid, if any.
    fn periodic_grid(&self) -> Result<&Grid> {
        match &self.source {
            Source::Periodic(g) => Ok(g),
            _ => Err(Error::RequiresPeriodic),
        }
    }

    /// Basis `(w, 0), (0, h)` of the source period lattice, expressed in view
    /// coordinates (a sublattice of the true period lattice).
    pub(crate) fn source_lattice_basis(&self) -> Result<[LatticePoint; 2]> {
        let g = self.periodic_grid()?;
        let inv = self.view.matrix.inverse();
        Ok([
            inv.apply(LatticePoint::new(g.width as i64, 0)),
            inv.apply(LatticePoint::new(0, g.height as i64)),
        ])
    }

    /// Fundamental domain size `w·h` of the source lattice.
    pub(crate) fn source_area(&self) -> Result<usize> {
        let g = self.periodic_grid()?;
        Ok(g.width * g.height)
    }

    /// The distinct translates `T^u η`. Only finite (and equal to the orbit
    /// closure) for periodic sources.
    pub fn orbit(&self) -> Result<Vec<Configuration>> {
        let g = match &self.source {
            Source::Periodic(g) => g,
            other => return Err(Error::OrbitNotComputable(other.kind())),
        };
        let inv = self.view.matrix.inverse();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for by in 0..g.height as i64 {
            for bx in 0..g.width as i64 {
                let u = inv.apply(LatticePoint::new(bx, by));
                let t = self.translate(u);
                let key: Vec<Symbol> = (0..g.height as i64)
                    .flat_map(|y| (0..g.width as i64).map(move |x| LatticePoint::new(x, y)))
                    .map(|p| t.source_value(t.view.shift + p).unwrap())
                    .collect();
                if seen.insert(key) {
                    out.push(t);
                }
            }
        }
        Ok(out)
    }

    /// Re-express a periodic configuration (with any view) as a periodic
    /// source with rectangular fundamental domain and identity view.
    pub fn materialize_periodic(&self) -> Result<Self> {
        let [e1, e2] = self.source_lattice_basis()?;
        let area = self.source_area()? as i64;
        // smallest W with (W, 0) in the lattice spanned by e1, e2
        let in_lattice = |v: LatticePoint| {
            let det = e1.cross(e2);
            v.cross(e2) % det == 0 && e1.cross(v) % det == 0
        };
        let w = (1..=area)
            .find(|&w| in_lattice(LatticePoint::new(w, 0)))
            .expect("lattice index bounds the horizontal period");
        let h = (1..=area)
            .find(|&h| in_lattice(LatticePoint::new(0, h)))
            .expect("lattice index bounds the vertical period");
        let grid = Grid::from_fn(w as usize, h as usize, |x, y| {
            self.try_evaluate(LatticePoint::new(x as i64, y as i64))
                .expect("periodic configurations are total")
        });
        Self::periodic(self.alphabet.clone(), grid)
    }

    /// For substitution sources: the same rule iterated once more.
    pub fn enlarged(&self) -> Result<Self> {
        match &self.source {
            Source::Substitution {
                rule,
                seed,
                iterations,
                ..
            } => {
                let mut out =
                    Self::substitution(self.alphabet.clone(), rule.clone(), *seed, iterations + 1)?;
                out.view = self.view;
                Ok(out)
            }
            _ => Err(Error::InvalidArgument(
                "only substitution sources can be enlarged".into(),
            )),
        }
    }

    /// Bounding box of the defined domain in source coordinates, if finite in
    /// both axes.
    pub fn window_size(&self) -> Option<(usize, usize)> {
        match &self.source {
            Source::Window(g) | Source::Substitution { grid: g, .. } => {
                Some((g.width, g.height))
            }
            _ => None,
        }
    }
}

pub(crate) fn normalized_pattern(shape: Vec<LatticePoint>, colors: Vec<Symbol>) -> Pattern {
    if shape.is_empty() {
        return Pattern { shape, colors };
    }
    let corner = min_corner(&shape);
    Pattern {
        shape: shape.into_iter().map(|p| p - corner).collect(),
        colors,
    }
}

#[cfg(test)]
mod tests {
    use super::generators::*;
    use super::*;

    fn p(x: i64, y: i64) -> LatticePoint {
        LatticePoint::new(x, y)
    }

    #[test]
    fn checkerboard_parity() {
        let c = checkerboard();
        assert_eq!(c.evaluate(p(5, 7)).unwrap(), 0);
        assert_eq!(c.evaluate(p(-3, 0)).unwrap(), 1);
    }

    #[test]
    fn window_outside_is_error() {
        let w = Configuration::window(Alphabet::digits(2), Grid::new(3, 3, vec![0; 9]).unwrap())
            .unwrap();
        assert_eq!(w.evaluate(p(10, 0)), Err(Error::UndefinedCell(p(10, 0))));
    }

    #[test]
    fn fibonacci_lift_reads_column() {
        let c = Configuration::word_lift(Alphabet::digits(2), fibonacci_word(100), LiftRule::X)
            .unwrap();
        assert_eq!(c.evaluate(p(3, 99)).unwrap(), 0);
        assert_eq!(c.evaluate(p(1, -5)).unwrap(), 1);
    }

    #[test]
    fn translation_action() {
        let c = checkerboard();
        assert_eq!(c.translate(p(0, 0)), c);
        assert_eq!(c.translate(p(1, 0)).evaluate(p(0, 0)).unwrap(), 1);
        let a = c.translate(p(2, -1)).translate(p(1, 3));
        let b = c.translate(p(3, 2));
        for y in -3..3 {
            for x in -3..3 {
                assert_eq!(a.evaluate(p(x, y)), b.evaluate(p(x, y)));
            }
        }
    }

    #[test]
    fn window_translate_shifts_domain() {
        let w = Configuration::window(Alphabet::digits(2), Grid::new(2, 1, vec![0, 1]).unwrap())
            .unwrap();
        let t = w.translate(p(1, 0));
        assert_eq!(t.evaluate(p(0, 0)).unwrap(), 1);
        assert_eq!(t.evaluate(p(-1, 0)).unwrap(), 0);
        assert!(t.evaluate(p(1, 0)).is_err());
    }

    #[test]
    fn restrict_examples() {
        let c = checkerboard();
        let r21 = ConvexLatticeSet::rectangle(2, 1);
        assert_eq!(c.restrict_set(&r21, p(0, 0)).unwrap().colors, vec![0, 1]);
        assert_eq!(c.restrict_set(&r21, p(1, 0)).unwrap().colors, vec![1, 0]);
        let tm = Configuration::word_lift(Alphabet::digits(2), thue_morse_word(64), LiftRule::XPlusY)
            .unwrap();
        let r31 = ConvexLatticeSet::rectangle(3, 1);
        assert_eq!(tm.restrict_set(&r31, p(0, 0)).unwrap().colors, vec![0, 1, 1]);
        let k = constant(2, 0);
        let pat = k.restrict_set(&ConvexLatticeSet::rectangle(3, 2), p(-7, 4)).unwrap();
        assert!(pat.colors.iter().all(|&s| s == 0));
    }

    #[test]
    fn restrict_reports_undefined_cells() {
        let w = Configuration::window(Alphabet::digits(2), Grid::new(2, 1, vec![0, 1]).unwrap())
            .unwrap();
        let err = w
            .restrict_set(&ConvexLatticeSet::rectangle(2, 1), p(1, 0))
            .unwrap_err();
        assert_eq!(err, Error::UndefinedCells(vec![p(2, 0)]));
    }

    #[test]
    fn unimodular_swap_and_shear() {
        let stripes = vertical_stripes(2);
        let swap = Unimodular::new([[0, 1], [1, 0]]).unwrap();
        let h = stripes.apply_unimodular(&swap);
        for y in -2..3 {
            for x in -2..3 {
                assert_eq!(h.evaluate(p(x, y)).unwrap(), y.rem_euclid(2) as Symbol);
            }
        }
        assert!(Unimodular::new([[2, 0], [0, 1]]).is_err());
        // η' = η ∘ M⁻¹ with M = [[1,1],[0,1]]: M⁻¹(x, y) = (x − y, y)
        let c = checkerboard();
        let m = Unimodular::new([[1, 1], [0, 1]]).unwrap();
        let sheared = c.apply_unimodular(&m);
        for y in 0..4i64 {
            for x in 0..4 {
                let direct = ((x - y) + y).rem_euclid(2) as Symbol;
                assert_eq!(sheared.evaluate(p(x, y)).unwrap(), direct);
            }
        }
        assert_eq!(c.apply_unimodular(&Unimodular::IDENTITY), c);
    }

    #[test]
    fn thue_morse_substitution_steps() {
        let one = thue_morse_2d(1);
        let g = match one.source() {
            Source::Substitution { grid, .. } => grid.clone(),
            _ => unreachable!(),
        };
        assert_eq!(g, Grid::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap());
        let two = thue_morse_2d(2);
        let rows: Vec<Vec<Symbol>> = (0..4)
            .map(|y| (0..4).map(|x| two.evaluate(p(x, y)).unwrap()).collect())
            .collect();
        assert_eq!(
            rows,
            vec![
                vec![0, 1, 1, 0],
                vec![1, 0, 0, 1],
                vec![1, 0, 0, 1],
                vec![0, 1, 1, 0]
            ]
        );
        let zero = thue_morse_2d(0);
        assert_eq!(zero.window_size(), Some((1, 1)));
        assert_eq!(zero.evaluate(p(0, 0)).unwrap(), 0);
    }

    #[test]
    fn substitution_missing_rule() {
        let a = Alphabet::digits(2);
        let err = SubstitutionRule::new(
            &a,
            vec![Some(Grid::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap()), None],
        )
        .unwrap_err();
        assert_eq!(err, Error::MissingRule("1".into()));
    }

    #[test]
    fn orbit_sizes() {
        assert_eq!(constant(2, 1).orbit().unwrap().len(), 1);
        assert_eq!(checkerboard().orbit().unwrap().len(), 2);
        let six = Configuration::periodic(
            Alphabet::digits(2),
            Grid::from_rows(&[vec![0, 1, 1], vec![0, 0, 1]]).unwrap(),
        )
        .unwrap();
        assert_eq!(six.orbit().unwrap().len(), 6);
        assert!(matches!(
            thue_morse_2d(2).orbit(),
            Err(Error::OrbitNotComputable("substitution"))
        ));
    }

    #[test]
    fn materialize_sheared_periodic() {
        let c = Configuration::periodic(
            Alphabet::digits(2),
            Grid::from_rows(&[vec![0, 1, 1], vec![0, 0, 1]]).unwrap(),
        )
        .unwrap();
        let m = Unimodular::new([[1, 2], [0, 1]]).unwrap();
        let s = c.apply_unimodular(&m);
        let flat = s.materialize_periodic().unwrap();
        for y in -6..6 {
            for x in -6..6 {
                assert_eq!(flat.evaluate(p(x, y)), s.evaluate(p(x, y)));
            }
        }
    }

    #[test]
    fn enlarged_substitution() {
        let t = thue_morse_2d(3);
        assert_eq!(t.enlarged().unwrap(), thue_morse_2d(4));
        assert!(checkerboard().enlarged().is_err());
    }

    #[test]
    fn alphabet_validation() {
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new(["a b"]).is_err());
        assert_eq!(Alphabet::new(["x", "y"]).unwrap().index_of("y"), Some(1));
    }
}
