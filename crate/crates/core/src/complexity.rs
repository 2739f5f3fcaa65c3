//! Pattern sets `W_η(S)`, complexity `P_η(S)` and discrepancy
//! `D_η(S) = P_η(S) − |S|`.
//!
//! Counts are exact for periodic configurations and lower bounds otherwise;
//! every report carries the `exhaustive` flag saying which.

use serde::{Deserialize, Serialize};

use crate::config::{normalized_pattern, Configuration, Pattern};
use crate::error::Result;
use crate::geometry::{ConvexLatticeSet, LatticePoint};
use crate::language::Language;

/// `W_η(S)`: the distinct `S`-patterns over all admissible translates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternSet {
    pub shape: ConvexLatticeSet,
    pub patterns: Vec<Pattern>,
    pub translate_count: usize,
    pub exhaustive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub shape: ConvexLatticeSet,
    #[serde(rename = "P")]
    pub p: usize,
    pub size: usize,
    #[serde(rename = "D")]
    pub d: i64,
    pub translate_count: usize,
    pub exhaustive: bool,
}

/// One row of a rectangular complexity profile.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "P")]
    pub p: usize,
    /// The Nivat bound `n·k`.
    pub bound: usize,
    #[serde(rename = "D")]
    pub d: i64,
    pub exhaustive: bool,
}

impl ProfileRow {
    /// Whether `P ≤ n·k`.
    pub fn within_bound(&self) -> bool {
        self.p <= self.bound
    }
}

pub fn discrepancy(p: usize, size: usize) -> i64 {
    p as i64 - size as i64
}

pub fn words(eta: &Configuration, s: &ConvexLatticeSet) -> Result<PatternSet> {
    let lang = Language::scan(eta, s.points())?;
    let patterns = lang
        .patterns()
        .iter()
        .map(|c| normalized_pattern(s.points().to_vec(), c.clone()))
        .collect();
    Ok(PatternSet {
        shape: s.normalized(),
        patterns,
        translate_count: lang.translate_count(),
        exhaustive: lang.exhaustive(),
    })
}

pub fn complexity(eta: &Configuration, s: &ConvexLatticeSet) -> Result<ComplexityReport> {
    let lang = Language::scan(eta, s.points())?;
    Ok(ComplexityReport {
        shape: s.clone(),
        p: lang.len(),
        size: s.len(),
        d: discrepancy(lang.len(), s.len()),
        translate_count: lang.translate_count(),
        exhaustive: lang.exhaustive(),
    })
}

/// Complexity of an arbitrary finite cell set (not necessarily convex).
pub fn cell_complexity(eta: &Configuration, cells: &[LatticePoint]) -> Result<usize> {
    Ok(Language::scan(eta, cells)?.len())
}

pub fn rect_complexity(eta: &Configuration, n: usize, k: usize) -> Result<ComplexityReport> {
    complexity(eta, &ConvexLatticeSet::rectangle(n, k))
}

/// `P_η(R_{n,k})` for `n = 1..=n_max`.
pub fn complexity_profile(eta: &Configuration, n_max: usize, k: usize) -> Result<Vec<ProfileRow>> {
    (1..=n_max)
        .map(|n| {
            let r = rect_complexity(eta, n, k)?;
            Ok(ProfileRow {
                n,
                k,
                p: r.p,
                bound: n * k,
                d: r.d,
                exhaustive: r.exhaustive,
            })
        })
        .collect()
}

pub const PROFILE_CSV_HEADER: &str = "n,k,P,bound,D,exhaustive";

pub fn profile_csv(rows: &[ProfileRow]) -> String {
    let mut out = format!("{PROFILE_CSV_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n, r.k, r.p, r.bound, r.d, r.exhaustive
        ));
    }
    out
}

/// Line plot of `P` against the bound `n·k` for one or more named profiles.
pub fn profile_svg(series: &[(String, Vec<ProfileRow>)]) -> String {
    const W: f64 = 480.0;
    const H: f64 = 320.0;
    const M: f64 = 40.0;
    let rows = series.iter().flat_map(|(_, r)| r.iter());
    let n_max = rows.clone().map(|r| r.n).max().unwrap_or(1).max(1) as f64;
    let y_max = rows
        .map(|r| r.p.max(r.bound))
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    let sx = |n: f64| M + (n / n_max) * (W - 2.0 * M);
    let sy = |v: f64| H - M - (v / y_max) * (H - 2.0 * M);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    );
    out.push_str(&format!(
        "<line x1=\"{M}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n<line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{b}\" stroke=\"black\"/>\n",
        b = H - M,
        r = W - M
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\">n</text>\n<text x=\"4\" y=\"{M}\" font-size=\"12\">P</text>\n",
        W - M,
        H - M / 3.0
    ));
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
    for (i, (name, rows)) in series.iter().enumerate() {
        if rows.is_empty() {
            continue;
        }
        let color = colors[i % colors.len()];
        let pts = |f: &dyn Fn(&ProfileRow) -> usize| {
            rows.iter()
                .map(|r| format!("{:.1},{:.1}", sx(r.n as f64), sy(f(r) as f64)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" points=\"{}\"/>\n",
            pts(&|r| r.p)
        ));
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-dasharray=\"4 3\" points=\"{}\"/>\n",
            pts(&|r| r.bound)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{color}\">{}</text>\n",
            M + 8.0,
            M + 14.0 * i as f64,
            xml_escape(name)
        ));
    }
    out.push_str("</svg>\n");
    out
}

pub(crate) fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::generators::*;
    use crate::config::LiftRule;

    #[test]
    fn words_examples() {
        let r22 = ConvexLatticeSet::rectangle(2, 2);
        assert_eq!(words(&constant(2, 0), &r22).unwrap().patterns.len(), 1);
        let w = words(&checkerboard(), &r22).unwrap();
        assert_eq!(w.patterns.len(), 2);
        assert!(w.exhaustive);
        let f = fibonacci_lift(100, LiftRule::X);
        let w = words(&f, &ConvexLatticeSet::rectangle(4, 1)).unwrap();
        assert_eq!(w.patterns.len(), 5);
        assert!(!w.exhaustive);
    }

    #[test]
    fn complexity_examples() {
        let r = rect_complexity(&vertical_stripes(2), 2, 3).unwrap();
        assert_eq!((r.p, r.d), (2, -4));
        let r = complexity(&checkerboard(), &ConvexLatticeSet::rectangle(1, 1)).unwrap();
        assert_eq!((r.p, r.d), (2, 1));
        let f = fibonacci_lift(100, LiftRule::X);
        for n in 1..=10 {
            assert_eq!(rect_complexity(&f, n, 3).unwrap().p, n + 1);
        }
    }

    #[test]
    fn shape_exceeding_window() {
        let w = all_dominoes_window();
        assert_eq!(
            rect_complexity(&w, 6, 1).unwrap_err(),
            crate::Error::ShapeExceedsDomain
        );
    }

    #[test]
    fn profile_and_csv() {
        let rows = complexity_profile(&constant(2, 0), 3, 3).unwrap();
        assert!(rows.iter().all(|r| r.p == 1 && r.within_bound()));
        let csv = profile_csv(&rows[..1]);
        assert_eq!(csv, "n,k,P,bound,D,exhaustive\n1,3,1,3,-2,true\n");
        let svg = profile_svg(&[("constant".into(), rows)]);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn thue_morse_small_window() {
        let t = thue_morse_2d(3);
        let got: Vec<usize> = complexity_profile(&t, 6, 3)
            .unwrap()
            .iter()
            .map(|r| r.p)
            .collect();
        assert_eq!(got, vec![6, 12, 18, 24, 24, 18]);
    }
}
