//! Verification campaigns over a corpus of configurations, and report
//! emission as CSV, JSON and SVG.
//!
//! Entries run in parallel; the report lists them in corpus order. Random
//! sampling uses ChaCha8 seeded with `seed + index`, so a campaign file and
//! its seed determine the report byte for byte.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::balanced::{find_balanced_set, is_balanced, BalancedSearch};
use crate::complexity::{complexity_profile, profile_csv, profile_svg, xml_escape, ProfileRow};
use crate::config::generators::Generator;
use crate::config::{from_json, from_text, Configuration, Source};
use crate::error::{Error, Result};
use crate::expansivity::{antiparallel_pairing_check, census, Census, PairingReport, BASELINE_DIRECTIONS};
use crate::extension::{chain_discrepancy, discrepancy_step, verify_edge_bound};
use crate::geometry::{ConvexLatticeSet, DirectedLine, Direction, LatticePoint};
use crate::periodicity::{
    period_lattice, periodic_strip_propagation_check, strip_period_bound_check, PeriodLattice, PropagationReport,
    StripPeriodReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Profile,
    LemmaSuite,
    ExpansivityCensus,
    Balanced,
    PeriodBounds,
}

impl Check {
    pub const ALL: [Check; 5] = [
        Check::Profile,
        Check::LemmaSuite,
        Check::ExpansivityCensus,
        Check::Balanced,
        Check::PeriodBounds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Profile => "profile",
            Check::LemmaSuite => "lemma-suite",
            Check::ExpansivityCensus => "expansivity-census",
            Check::Balanced => "balanced",
            Check::PeriodBounds => "period-bounds",
        }
    }
}

/// Declared aperiodicity of a corpus entry; not verified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Aperiodic {
    pub citation: String,
}

/// One corpus entry: exactly one of `path`, `config` (inline JSON
/// configuration) or `generator`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Generator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aperiodic: Option<Aperiodic>,
}

impl CorpusEntry {
    pub fn from_generator(name: &str, generator: Generator) -> Self {
        Self {
            name: name.to_string(),
            path: None,
            config: None,
            generator: Some(generator),
            aperiodic: None,
        }
    }

    /// Load the configuration; relative paths resolve against `base`.
    pub fn load(&self, base: &Path) -> Result<Configuration> {
        match (&self.path, &self.config, &self.generator) {
            (Some(p), None, None) => load_config(&base.join(p)),
            (None, Some(v), None) => from_json(&v.to_string()),
            (None, None, Some(g)) => g.build(),
            _ => Err(Error::InvalidArgument(format!(
                "entry {:?} needs exactly one of path, config, generator",
                self.name
            ))),
        }
    }
}

/// Read a configuration file, JSON if it starts with `{`, text otherwise.
pub fn load_config(path: &Path) -> Result<Configuration> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        from_json(&text)
    } else {
        from_text(&text)
    }
}

fn default_checks() -> Vec<Check> {
    Check::ALL.to_vec()
}
fn default_n_max() -> usize {
    6
}
fn default_radius() -> u32 {
    4
}
fn default_extent() -> u32 {
    6
}
fn default_trials() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSpec {
    pub corpus: Vec<CorpusEntry>,
    #[serde(default = "default_checks")]
    pub checks: Vec<Check>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_radius")]
    pub radius: u32,
    #[serde(default = "default_extent")]
    pub extent: u32,
    #[serde(default)]
    pub seed: u64,
    /// Random trials per periodic entry in the lemma suite.
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Recount substitution profiles one iteration deeper.
    #[serde(default)]
    pub stability: bool,
}

impl CampaignSpec {
    pub fn new(corpus: Vec<CorpusEntry>, checks: Vec<Check>) -> Self {
        Self {
            corpus,
            checks,
            n_max: default_n_max(),
            radius: default_radius(),
            extent: default_extent(),
            seed: 0,
            trials: default_trials(),
            stability: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        if spec.n_max == 0 {
            return Err(Error::InvalidArgument("n_max must be positive".into()));
        }
        Ok(spec)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMode {
    /// Periodic source: low complexity must come with a nonzero period lattice.
    Forward,
    /// Declared aperiodic: every `P(n, 3)` with `n ≥ 2` must exceed `3n`.
    Contrapositive,
    /// Neither: rows are reported without a claim.
    Informational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileOutcome {
    pub mode: ProfileMode,
    pub rows3: Vec<ProfileRow>,
    pub rows2: Vec<ProfileRow>,
    pub low_n3: Option<usize>,
    pub low_n2: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice: Option<PeriodLattice>,
    /// Substitution entries: counts unchanged one iteration deeper.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stable: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<ProfileRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaFailure {
    pub lemma: String,
    pub shape: ConvexLatticeSet,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaOutcome {
    pub trials: usize,
    pub generated_vertices: usize,
    pub edge_bounds_applicable: usize,
    pub chains: usize,
    pub failures: Vec<LemmaFailure>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusOutcome {
    /// `"none"` for periodic, `"one"` for word lifts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    pub census: Census,
    pub pairing: PairingReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancedAttempt {
    pub direction: Direction,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set: Option<ConvexLatticeSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Found sets only: an independent `is_balanced` run agrees.
    pub revalidated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancedOutcome {
    pub n: Option<usize>,
    pub attempts: Vec<BalancedAttempt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodBoundsOutcome {
    pub strips: Vec<StripPeriodReport>,
    pub propagation: Vec<PropagationReport>,
    pub violations: usize,
    pub exceedances: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CheckOutcome {
    Profile(ProfileOutcome),
    LemmaSuite(LemmaOutcome),
    Census(Box<CensusOutcome>),
    Balanced(BalancedOutcome),
    PeriodBounds(PeriodBoundsOutcome),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: Check,
    pub passed: bool,
    pub summary: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<CheckOutcome>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryReport {
    pub index: usize,
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aperiodic: Option<String>,
    /// Set when the entry could not be loaded.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub checks: Vec<CheckReport>,
    pub passed: bool,
}

impl EntryReport {
    pub fn check(&self, c: Check) -> Option<&CheckReport> {
        self.checks.iter().find(|r| r.check == c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub seed: u64,
    pub n_max: usize,
    pub radius: u32,
    pub extent: u32,
    pub entries: Vec<EntryReport>,
    pub passed: bool,
    /// Not serialized, so reports stay byte-identical across runs.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl CampaignReport {
    pub fn input_errors(&self) -> usize {
        self.entries.iter().filter(|e| e.error.is_some()).count()
    }
}

/// Random convex subset of `R_{6,3}` with at least two points.
fn random_shape(rng: &mut ChaCha8Rng) -> ConvexLatticeSet {
    let r = ConvexLatticeSet::rectangle(6, 3);
    loop {
        let k = rng.random_range(2..=8);
        let pts: Vec<LatticePoint> = r.points().choose_multiple(rng, k).copied().collect();
        let s = ConvexLatticeSet::convex_hull(pts).unwrap();
        if s.len() >= 2 {
            return s;
        }
    }
}

/// Randomized trials of the vertex-removal step, the edge multiplicity bound
/// and discrepancy chains on one configuration (exact counts required).
pub fn lemma_trials(eta: &Configuration, rng: &mut ChaCha8Rng, trials: usize) -> Result<LemmaOutcome> {
    if !eta.is_exhaustive() {
        return Err(Error::RequiresExhaustive);
    }
    let mut out = LemmaOutcome::default();
    for _ in 0..trials {
        out.trials += 1;
        let s = random_shape(rng);
        let fail = |lemma: &str, detail: String| LemmaFailure {
            lemma: lemma.to_string(),
            shape: s.clone(),
            detail,
        };
        let x = *s.vertices().choose(rng).unwrap();
        match discrepancy_step(eta, &s, x) {
            Ok(step) => out.generated_vertices += usize::from(step.generated),
            Err(Error::InvariantViolation(m)) => out.failures.push(fail("vertex-removal", m)),
            Err(e) => return Err(e),
        }
        let edges = s.boundary_edges();
        if let Some(w) = edges.choose(rng) {
            let b = verify_edge_bound(eta, &s, w)?;
            out.edge_bounds_applicable += usize::from(b.applies);
            if !b.holds {
                out.failures.push(fail(
                    "edge-bound",
                    format!(
                        "edge {} -> {}: {} non-unique colorings, |w| = {}",
                        w.start, w.end, b.non_unique_count, b.edge_points
                    ),
                ));
            }
        }
        let mut chain = Vec::new();
        let mut cur = s.clone();
        while cur.len() > 1 && rng.random_bool(0.7) {
            let p = *cur.vertices().choose(rng).unwrap();
            chain.push(p);
            cur = cur.remove_vertex(p)?;
        }
        out.chains += 1;
        match chain_discrepancy(eta, &s, &chain) {
            Ok(_) => {}
            Err(Error::InvariantViolation(m)) => out.failures.push(fail("chain", format!("{chain:?}: {m}"))),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Directions tried by the balanced check, both orientations of each.
pub fn balanced_directions() -> Vec<Direction> {
    let mut out = Vec::new();
    for (p, q) in BASELINE_DIRECTIONS.iter().copied().chain([(2, 1), (1, 2), (2, -1), (1, -2)]) {
        let d = Direction::new(p, q).unwrap();
        out.push(d);
        out.push(d.reversed());
    }
    out
}

fn profile_check(eta: &Configuration, entry: &CorpusEntry, spec: &CampaignSpec) -> Result<CheckReport> {
    let rows3 = complexity_profile(eta, spec.n_max, 3)?;
    let low = |rows: &[ProfileRow]| rows.iter().find(|r| r.within_bound()).map(|r| r.n);
    let mut out = ProfileOutcome {
        mode: ProfileMode::Informational,
        low_n3: low(&rows3),
        rows3,
        rows2: Vec::new(),
        low_n2: None,
        lattice: None,
        stable: None,
        counterexample: None,
    };
    if spec.stability {
        if let Source::Substitution {
            rule, seed, iterations, ..
        } = eta.source()
        {
            let deeper = Configuration::substitution(eta.alphabet().clone(), rule.clone(), *seed, iterations + 1)?;
            let again = complexity_profile(&deeper, spec.n_max, 3)?;
            out.stable = Some(again.iter().zip(&out.rows3).all(|(a, b)| a.p == b.p));
        }
    }
    let (passed, summary) = if entry.aperiodic.is_some() {
        out.mode = ProfileMode::Contrapositive;
        out.counterexample = out.rows3.iter().find(|r| r.n >= 2 && r.within_bound()).cloned();
        let ok = out.counterexample.is_none() && out.stable != Some(false);
        let s = match &out.counterexample {
            None => format!("P(n,3) > 3n for 2 <= n <= {}", spec.n_max),
            Some(r) => format!("P({},3) = {} <= {}", r.n, r.p, r.bound),
        };
        (ok, s)
    } else if eta.is_periodic() {
        out.mode = ProfileMode::Forward;
        out.rows2 = complexity_profile(eta, spec.n_max, 2)?;
        out.low_n2 = low(&out.rows2);
        let lattice = period_lattice(eta)?;
        let ok = (out.low_n3.is_none() && out.low_n2.is_none()) || lattice.rank() > 0;
        let s = format!(
            "low n (k=3): {:?}, low n (k=2): {:?}, period lattice rank {}",
            out.low_n3,
            out.low_n2,
            lattice.rank()
        );
        out.lattice = Some(lattice);
        (ok, s)
    } else {
        (true, format!("lower bounds only; low n (k=3): {:?}", out.low_n3))
    };
    Ok(CheckReport {
        check: Check::Profile,
        passed,
        summary,
        error: None,
        outcome: Some(CheckOutcome::Profile(out)),
    })
}

fn lemma_check(eta: &Configuration, spec: &CampaignSpec, rng: &mut ChaCha8Rng) -> Result<CheckReport> {
    if !eta.is_exhaustive() {
        return Ok(skipped(Check::LemmaSuite, "counts are not exact"));
    }
    let out = lemma_trials(eta, rng, spec.trials)?;
    Ok(CheckReport {
        check: Check::LemmaSuite,
        passed: out.failures.is_empty(),
        summary: format!("{} trials, {} failures", out.trials, out.failures.len()),
        error: None,
        outcome: Some(CheckOutcome::LemmaSuite(out)),
    })
}

fn census_check(eta: &Configuration, spec: &CampaignSpec) -> Result<CheckReport> {
    let c = census(eta, spec.n_max, spec.radius, spec.extent)?;
    let hypothesis_exact = c.counts_exact && c.n.is_some();
    let pairing = antiparallel_pairing_check(&c, hypothesis_exact);
    let (expected, passed) = match eta.source() {
        Source::Periodic(_) => (Some("none"), c.witnessed_lines == 0),
        Source::WordLift { .. } => (Some("one"), c.witnessed_lines == 1),
        _ => (None, true),
    };
    let summary = format!(
        "{} of {} candidate lines witnessed at radius {}, extent {}",
        c.witnessed_lines,
        c.lines.len(),
        spec.radius,
        spec.extent
    );
    Ok(CheckReport {
        check: Check::ExpansivityCensus,
        passed,
        summary,
        error: None,
        outcome: Some(CheckOutcome::Census(Box::new(CensusOutcome {
            expected: expected.map(str::to_string),
            census: c,
            pairing,
        }))),
    })
}

fn skipped(check: Check, why: &str) -> CheckReport {
    CheckReport {
        check,
        passed: true,
        summary: format!("skipped: {why}"),
        error: None,
        outcome: None,
    }
}

/// Smallest `2 ≤ n ≤ n_max` with exact `P(n, 3) ≤ 3n` (`n = 1` is degenerate).
fn hypothesis_n(eta: &Configuration, n_max: usize) -> Result<Option<usize>> {
    Ok(complexity_profile(eta, n_max, 3)?
        .iter()
        .find(|r| r.n >= 2 && r.exhaustive && r.within_bound())
        .map(|r| r.n))
}

fn balanced_attempts(eta: &Configuration, n: usize) -> Result<Vec<(BalancedAttempt, Option<crate::balanced::BalancedCertificate>)>> {
    balanced_directions()
        .into_iter()
        .map(|d| {
            let line = DirectedLine::new(d);
            Ok(match find_balanced_set(eta, &line, n)? {
                BalancedSearch::Found { set, .. } => {
                    let cert = is_balanced(eta, &set, &line)?;
                    (
                        BalancedAttempt {
                            direction: d,
                            set: Some(set),
                            reason: None,
                            revalidated: cert.balanced(),
                        },
                        Some(cert),
                    )
                }
                BalancedSearch::NotFound { reason, .. } => (
                    BalancedAttempt {
                        direction: d,
                        set: None,
                        reason: Some(reason),
                        revalidated: false,
                    },
                    None,
                ),
            })
        })
        .collect()
}

fn balanced_checks(eta: &Configuration, spec: &CampaignSpec) -> Result<Vec<CheckReport>> {
    let want_b = spec.checks.contains(&Check::Balanced);
    let want_p = spec.checks.contains(&Check::PeriodBounds);
    let mut out = Vec::new();
    if !eta.is_periodic() {
        if want_b {
            out.push(skipped(Check::Balanced, "requires a periodic source"));
        }
        if want_p {
            out.push(skipped(Check::PeriodBounds, "requires a periodic source"));
        }
        return Ok(out);
    }
    let Some(n) = hypothesis_n(eta, spec.n_max)? else {
        if want_b {
            out.push(skipped(Check::Balanced, "no n with P(n,3) <= 3n"));
        }
        if want_p {
            out.push(skipped(Check::PeriodBounds, "no n with P(n,3) <= 3n"));
        }
        return Ok(out);
    };
    let attempts = balanced_attempts(eta, n)?;
    if want_b {
        let found: Vec<&BalancedAttempt> = attempts.iter().map(|a| &a.0).filter(|a| a.set.is_some()).collect();
        let passed = found.iter().all(|a| a.revalidated);
        out.push(CheckReport {
            check: Check::Balanced,
            passed,
            summary: format!("n = {n}: {} of {} directions balanced", found.len(), attempts.len()),
            error: None,
            outcome: Some(CheckOutcome::Balanced(BalancedOutcome {
                n: Some(n),
                attempts: attempts.iter().map(|a| a.0.clone()).collect(),
            })),
        });
    }
    if want_p {
        let mut strips = Vec::new();
        let mut propagation = Vec::new();
        for cert in attempts.iter().filter_map(|a| a.1.as_ref()).filter(|c| c.balanced()) {
            strips.push(strip_period_bound_check(eta, cert)?);
            let line = DirectedLine::new(cert.direction);
            propagation.push(periodic_strip_propagation_check(eta, &line, &cert.set, &cert.edge.unwrap())?);
        }
        let violations = strips.iter().map(|s| s.violations.len()).sum();
        let exceedances = strips.iter().map(|s| s.exceedances.len()).sum();
        let passed = violations == 0 && propagation.iter().all(|p| p.holds);
        out.push(CheckReport {
            check: Check::PeriodBounds,
            passed,
            summary: format!(
                "{} certificates: {violations} violations, {exceedances} conditional exceedances",
                strips.len()
            ),
            error: None,
            outcome: Some(CheckOutcome::PeriodBounds(PeriodBoundsOutcome {
                strips,
                propagation,
                violations,
                exceedances,
            })),
        });
    }
    Ok(out)
}

fn errored(check: Check, e: &Error) -> CheckReport {
    CheckReport {
        check,
        passed: false,
        summary: "error".into(),
        error: Some(e.to_string()),
        outcome: None,
    }
}

fn run_entry(index: usize, entry: &CorpusEntry, spec: &CampaignSpec, base: &Path) -> EntryReport {
    let mut report = EntryReport {
        index,
        name: entry.name.clone(),
        kind: None,
        aperiodic: entry.aperiodic.as_ref().map(|a| a.citation.clone()),
        error: None,
        checks: Vec::new(),
        passed: false,
    };
    let eta = match entry.load(base) {
        Ok(eta) => eta,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    report.kind = Some(eta.source().kind().to_string());
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(index as u64));
    let mut checks: Vec<Check> = spec.checks.clone();
    checks.sort();
    checks.dedup();
    let mut balanced_done = false;
    for c in checks {
        let r = match c {
            Check::Profile => profile_check(&eta, entry, spec).map(|r| vec![r]),
            Check::LemmaSuite => lemma_check(&eta, spec, &mut rng).map(|r| vec![r]),
            Check::ExpansivityCensus => census_check(&eta, spec).map(|r| vec![r]),
            Check::Balanced | Check::PeriodBounds if balanced_done => continue,
            Check::Balanced | Check::PeriodBounds => {
                balanced_done = true;
                balanced_checks(&eta, spec)
            }
        };
        match r {
            Ok(rs) => report.checks.extend(rs),
            Err(e) => report.checks.push(errored(c, &e)),
        }
    }
    report.passed = report.checks.iter().all(|c| c.passed);
    report
}

/// Run every selected check on every corpus entry. Relative corpus paths
/// resolve against `base`. Entry failures never abort the campaign.
pub fn run_campaign(spec: &CampaignSpec, base: &Path) -> CampaignReport {
    let start = Instant::now();
    let entries: Vec<EntryReport> = spec
        .corpus
        .par_iter()
        .enumerate()
        .map(|(i, e)| run_entry(i, e, spec, base))
        .collect();
    CampaignReport {
        seed: spec.seed,
        n_max: spec.n_max,
        radius: spec.radius,
        extent: spec.extent,
        passed: entries.iter().all(|e| e.passed),
        entries,
        wall_time: start.elapsed(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            "svg" => Some(Format::Svg),
            _ => None,
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const SUMMARY_CSV_HEADER: &str = "entry,name,check,passed,summary";

pub fn summary_csv(report: &CampaignReport) -> String {
    let mut out = format!("{SUMMARY_CSV_HEADER}\n");
    for e in &report.entries {
        if let Some(err) = &e.error {
            out.push_str(&format!("{},{},load,false,{}\n", e.index, csv_field(&e.name), csv_field(err)));
        }
        for c in &e.checks {
            let text = c.error.as_deref().unwrap_or(&c.summary);
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                e.index,
                csv_field(&e.name),
                c.check.name(),
                c.passed,
                csv_field(text)
            ));
        }
    }
    out
}

fn profile_rows(e: &EntryReport) -> Option<Vec<ProfileRow>> {
    e.check(Check::Profile).and_then(|c| match &c.outcome {
        Some(CheckOutcome::Profile(p)) => Some(p.rows3.iter().chain(&p.rows2).cloned().collect()),
        _ => None,
    })
}

/// Polygon drawing of a lattice set: hull outline plus one dot per point.
pub fn shape_svg(s: &ConvexLatticeSet, title: &str) -> String {
    const U: i64 = 24;
    const M: i64 = 24;
    let min_x = s.points().iter().map(|p| p.x).min().unwrap();
    let max_x = s.points().iter().map(|p| p.x).max().unwrap();
    let min_y = s.points().iter().map(|p| p.y).min().unwrap();
    let max_y = s.points().iter().map(|p| p.y).max().unwrap();
    let w = (max_x - min_x) * U + 2 * M;
    let h = (max_y - min_y) * U + 2 * M + 16;
    let px = |p: LatticePoint| (M + (p.x - min_x) * U, M + 16 + (max_y - p.y) * U);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<text x=\"4\" y=\"14\" font-size=\"12\">{}</text>\n",
        xml_escape(title)
    );
    let poly: Vec<String> = s
        .vertices()
        .iter()
        .map(|&v| {
            let (x, y) = px(v);
            format!("{x},{y}")
        })
        .collect();
    out.push_str(&format!(
        "<polygon points=\"{}\" fill=\"#dbe9f6\" stroke=\"#1f77b4\"/>\n",
        poly.join(" ")
    ));
    for &p in s.points() {
        let (x, y) = px(p);
        let fill = if s.is_vertex(p) { "#d62728" } else { "black" };
        out.push_str(&format!("<circle cx=\"{x}\" cy=\"{y}\" r=\"3\" fill=\"{fill}\"/>\n"));
    }
    out.push_str("</svg>\n");
    out
}

/// Write the report in the requested formats; returns the written paths.
///
/// `csv`: `summary.csv` and `profile_<entry>.csv`; `json`: `report.json`;
/// `svg`: `profiles.svg` and `generating_set_<entry>.svg`.
pub fn emit_report(report: &CampaignReport, formats: &[Format], dir: &Path) -> Result<Vec<PathBuf>> {
    let io = |p: &Path, e: std::io::Error| Error::Io(format!("{}: {e}", p.display()));
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut written = Vec::new();
    let mut write = |name: String, body: String| -> Result<()> {
        let p = dir.join(name);
        fs::write(&p, body).map_err(|e| io(&p, e))?;
        written.push(p);
        Ok(())
    };
    for f in formats {
        match f {
            Format::Csv => {
                write("summary.csv".into(), summary_csv(report))?;
                for e in &report.entries {
                    if let Some(rows) = profile_rows(e) {
                        write(format!("profile_{}.csv", e.index), profile_csv(&rows))?;
                    }
                }
            }
            Format::Json => {
                write("report.json".into(), serde_json::to_string_pretty(report)? + "\n")?;
            }
            Format::Svg => {
                let series: Vec<(String, Vec<ProfileRow>)> = report
                    .entries
                    .iter()
                    .filter_map(|e| {
                        let rows = profile_rows(e)?.into_iter().filter(|r| r.k == 3).collect();
                        Some((e.name.clone(), rows))
                    })
                    .collect();
                write("profiles.svg".into(), profile_svg(&series))?;
                for e in &report.entries {
                    let census = e.check(Check::ExpansivityCensus).and_then(|c| match &c.outcome {
                        Some(CheckOutcome::Census(c)) => c.census.generating_set.as_ref(),
                        _ => None,
                    });
                    if let Some(g) = census {
                        let title = format!("{}: generating set, D = {}", e.name, g.discrepancy);
                        write(format!("generating_set_{}.svg", e.index), shape_svg(&g.set, &title))?;
                    }
                }
            }
        }
    }
    Ok(written)
}
