//! Deterministic corpus generators: Sturmian and Thue–Morse words, the 2D
//! Thue–Morse substitution, and small periodic presets.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Alphabet, Configuration, Grid, LiftRule, SubstitutionRule, Symbol};
use crate::error::{Error, Result};

/// Prefix of the fixed point of a word substitution over symbol indices.
pub fn substitution_word(rules: &[&[Symbol]], seed: Symbol, len: usize) -> Vec<Symbol> {
    let mut w = vec![seed];
    while w.len() < len {
        let next: Vec<Symbol> = w
            .iter()
            .flat_map(|&s| rules[s as usize].iter().copied())
            .collect();
        assert!(next.len() > w.len(), "substitution must be growing");
        w = next;
    }
    w.truncate(len);
    w
}

/// Fibonacci word `0100101001001…` (fixed point of `0 → 01, 1 → 0`).
pub fn fibonacci_word(len: usize) -> Vec<Symbol> {
    substitution_word(&[&[0, 1], &[0]], 0, len)
}

/// Thue–Morse word `0110100110010110…` (fixed point of `0 → 01, 1 → 10`).
pub fn thue_morse_word(len: usize) -> Vec<Symbol> {
    substitution_word(&[&[0, 1], &[1, 0]], 0, len)
}

/// Standard Sturmian word for the directive sequence `d₁, d₂, …`, built as
/// the limit of `s_{n+1} = s_n^{d_n} s_{n−1}`. Missing entries default to 1,
/// so an empty directive gives the Fibonacci word.
pub fn standard_sturmian(directive: &[usize], len: usize) -> Vec<Symbol> {
    let mut prev: Vec<Symbol> = vec![1];
    let mut cur: Vec<Symbol> = vec![0];
    let mut i = 0;
    while cur.len() < len {
        let d = directive.get(i).copied().unwrap_or(1).max(1);
        let mut next = Vec::with_capacity(cur.len() * d + prev.len());
        for _ in 0..d {
            next.extend_from_slice(&cur);
        }
        next.extend_from_slice(&prev);
        prev = cur;
        cur = next;
        i += 1;
    }
    cur.truncate(len);
    cur
}

/// The 2D Thue–Morse block substitution `0 → [[0,1],[1,0]]`, `1 → [[1,0],[0,1]]`.
pub fn thue_morse_2d_rule() -> SubstitutionRule {
    let zero = Grid::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
    let one = Grid::from_rows(&[vec![1, 0], vec![0, 1]]).unwrap();
    SubstitutionRule::new(&Alphabet::digits(2), vec![Some(zero), Some(one)]).unwrap()
}

/// `k`-fold 2D Thue–Morse window from seed `0`.
pub fn thue_morse_2d(k: u32) -> Configuration {
    Configuration::substitution(Alphabet::digits(2), thue_morse_2d_rule(), 0, k).unwrap()
}

/// `η(x, y) = (x + y) mod 2`.
pub fn checkerboard() -> Configuration {
    let g = Grid::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
    Configuration::periodic(Alphabet::digits(2), g).unwrap()
}

/// Constant configuration over the digit alphabet of size `symbols`.
pub fn constant(symbols: usize, value: Symbol) -> Configuration {
    let g = Grid::new(1, 1, vec![value]).unwrap();
    Configuration::periodic(Alphabet::digits(symbols.max(value as usize + 1)), g).unwrap()
}

/// `η(x, y) = x mod m`.
pub fn vertical_stripes(m: usize) -> Configuration {
    let g = Grid::from_fn(m, 1, |x, _| x as Symbol);
    Configuration::periodic(Alphabet::digits(m.max(2)), g).unwrap()
}

/// `η(x, y) = y mod m`.
pub fn horizontal_stripes(m: usize) -> Configuration {
    let g = Grid::from_fn(1, m, |_, y| y as Symbol);
    Configuration::periodic(Alphabet::digits(m.max(2)), g).unwrap()
}

/// Fibonacci word of length `len` lifted along `rule`.
pub fn fibonacci_lift(len: usize, rule: LiftRule) -> Configuration {
    Configuration::word_lift(Alphabet::digits(2), fibonacci_word(len), rule).unwrap()
}

/// A window over `0, 1` containing every 2×1 pattern: `0 0 1 1 0`.
pub fn all_dominoes_window() -> Configuration {
    let g = Grid::new(5, 1, vec![0, 0, 1, 1, 0]).unwrap();
    Configuration::window(Alphabet::digits(2), g).unwrap()
}

/// Periodic configuration with a uniformly random fundamental domain.
pub fn random_periodic(rng: &mut impl Rng, width: usize, height: usize, symbols: usize) -> Configuration {
    let cells = (0..width * height)
        .map(|_| rng.random_range(0..symbols) as Symbol)
        .collect();
    let g = Grid::new(width, height, cells).unwrap();
    Configuration::periodic(Alphabet::digits(symbols), g).unwrap()
}

/// A named corpus generator, as used in campaign files and by `gen`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Generator {
    Checkerboard {},
    Constant {
        #[serde(default = "two")]
        symbols: usize,
        #[serde(default)]
        value: Symbol,
    },
    VerticalStripes { period: usize },
    HorizontalStripes { period: usize },
    Fibonacci { len: usize, rule: LiftRule },
    ThueMorse { len: usize, rule: LiftRule },
    Sturmian { directive: Vec<usize>, len: usize, rule: LiftRule },
    /// The 2D Thue–Morse substitution window.
    Tm2d { iterations: u32 },
}

fn two() -> usize {
    2
}

impl Generator {
    pub fn build(&self) -> Result<Configuration> {
        let bad = |what: &str| Err(Error::InvalidArgument(format!("{what} must be positive")));
        let lift = |w: Vec<Symbol>, rule: LiftRule| Configuration::word_lift(Alphabet::digits(2), w, rule);
        match *self {
            Generator::Checkerboard {} => Ok(checkerboard()),
            Generator::Constant { symbols, value } => {
                if symbols == 0 || value as usize >= symbols {
                    return Err(Error::InvalidArgument(format!(
                        "value {value} outside an alphabet of {symbols} symbols"
                    )));
                }
                Ok(constant(symbols, value))
            }
            Generator::VerticalStripes { period: 0 } | Generator::HorizontalStripes { period: 0 } => bad("period"),
            Generator::VerticalStripes { period } => Ok(vertical_stripes(period)),
            Generator::HorizontalStripes { period } => Ok(horizontal_stripes(period)),
            Generator::Fibonacci { len: 0, .. }
            | Generator::ThueMorse { len: 0, .. }
            | Generator::Sturmian { len: 0, .. } => bad("len"),
            Generator::Fibonacci { len, rule } => lift(fibonacci_word(len), rule),
            Generator::ThueMorse { len, rule } => lift(thue_morse_word(len), rule),
            Generator::Sturmian {
                ref directive,
                len,
                rule,
            } => lift(standard_sturmian(directive, len), rule),
            Generator::Tm2d { iterations } => {
                if iterations > 12 {
                    return Err(Error::InvalidArgument("at most 12 iterations".into()));
                }
                Ok(thue_morse_2d(iterations))
            }
        }
    }
}
