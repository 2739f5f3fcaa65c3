//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints exactly one `[PASS]`/`[FAIL]` line.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use nivat_core::balanced::{find_balanced_set, is_balanced, BalancedSearch};
use nivat_core::complexity::{complexity, complexity_profile, rect_complexity, words};
use nivat_core::config::{from_json, from_text, to_json, to_text};
use nivat_core::config::generators::{checkerboard, fibonacci_lift, random_periodic, thue_morse_2d};
use nivat_core::expansivity::{census, direction_nonexpansive_at_scale, line_nonexpansive_at_scale};
use nivat_core::extension::{find_generating_set, is_generated, verify_edge_bound, SearchMode, DEFAULT_BUDGET};
use nivat_core::geometry::{emit_shape, min_corner, parse_shape};
use nivat_core::periodicity::{morse_hedlund_1d, period_lattice, strip_period_bound_check, WordMode};
use nivat_core::verifier::{balanced_directions, emit_report, run_campaign, CampaignSpec, Format};
use nivat_core::{Configuration, ConvexLatticeSet, DirectedLine, Direction, LatticePoint, LiftRule, Symbol};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_shape(rng: &mut ChaCha8Rng, min_len: usize) -> ConvexLatticeSet {
    let r = ConvexLatticeSet::rectangle(6, 3);
    loop {
        let k = rng.random_range(1..=10);
        let pts: Vec<LatticePoint> = r.points().choose_multiple(rng, k).copied().collect();
        let s = ConvexLatticeSet::convex_hull(pts).unwrap();
        if s.len() >= min_len {
            return s;
        }
    }
}

fn small_periodic(rng: &mut ChaCha8Rng, max_side: usize, max_symbols: usize) -> Configuration {
    let w = rng.random_range(1..=max_side);
    let h = rng.random_range(1..=max_side);
    let k = rng.random_range(2..=max_symbols);
    random_periodic(rng, w, h, k)
}

fn cyclic_period(w: &[Symbol]) -> usize {
    (1..=w.len())
        .find(|&p| w.len().is_multiple_of(p) && (0..w.len()).all(|i| w[i] == w[(i + p) % w.len()]))
        .unwrap()
}

fn d_of(eta: &Configuration, s: &ConvexLatticeSet) -> i64 {
    let r = complexity(eta, s).unwrap();
    assert!(r.exhaustive);
    r.d
}

/// One-dimensional periodic complexity on every binary word of length 1 to 12.
fn ac1() -> Outcome {
    let mut words_checked = 0;
    for len in 1..=12usize {
        for bits in 0u32..(1 << len) {
            let w: Vec<Symbol> = (0..len).map(|i| ((bits >> i) & 1) as Symbol).collect();
            let v = morse_hedlund_1d(&w, WordMode::Periodic, None).map_err(|e| e.to_string())?;
            let expected = cyclic_period(&w);
            ensure(v.period == Some(expected), || {
                format!("{w:?}: period {:?}, brute force {expected}", v.period)
            })?;
            ensure(v.low_complexity_n.is_some(), || format!("{w:?}: no n with P(n) <= n"))?;
            words_checked += 1;
        }
    }
    Ok(format!("{words_checked} words, periods match brute force"))
}

/// Generated vertices raise `D` by exactly one, other vertices never raise it.
fn ac2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut generated, mut total) = (0, 0);
    while total < 1200 {
        let eta = small_periodic(&mut rng, 5, 3);
        let s = random_shape(&mut rng, 2);
        let x = *s.vertices().choose(&mut rng).unwrap();
        let rest = s.remove_vertex(x).unwrap();
        let (d_s, d_rest) = (d_of(&eta, &s), d_of(&eta, &rest));
        let g = is_generated(&eta, &s, x).map_err(|e| e.to_string())?;
        let ok = if g { d_rest == d_s + 1 } else { d_rest <= d_s };
        ensure(ok, || {
            format!("{:?} at {x}: generated {g}, D {d_s} -> {d_rest}", s.points())
        })?;
        generated += usize::from(g);
        total += 1;
    }
    Ok(format!("{total} triples, {generated} generated vertices"))
}

/// Non-uniquely extendable colorings of `S ∖ w` number at most `|w ∩ S| − 1`
/// whenever removing `w` raises `D`.
fn ac3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut applicable, mut trials) = (0, 0);
    while applicable < 600 {
        trials += 1;
        ensure(trials < 200_000, || format!("only {applicable} applicable trials"))?;
        let eta = small_periodic(&mut rng, 5, 3);
        let s = random_shape(&mut rng, 2);
        let edges = s.boundary_edges();
        let Some(w) = edges.choose(&mut rng) else { continue };
        let inner = s.without_edge(w).unwrap();
        let full = words(&eta, &s).unwrap();
        let o = min_corner(s.points());
        let mut fan: BTreeMap<Vec<Symbol>, BTreeSet<Vec<Symbol>>> = BTreeMap::new();
        for p in &full.patterns {
            let key = inner.points().iter().map(|&c| p.color_at(c - o).unwrap()).collect();
            let val = s.points().iter().map(|&c| p.color_at(c - o).unwrap()).collect();
            fan.entry(key).or_default().insert(val);
        }
        let non_unique = fan.values().filter(|v| v.len() > 1).count();
        let applies = fan.len() as i64 - inner.len() as i64 > full.patterns.len() as i64 - s.len() as i64;
        let b = verify_edge_bound(&eta, &s, w).map_err(|e| e.to_string())?;
        ensure(b.applies == applies && b.non_unique_count == non_unique, || {
            format!("library disagrees with direct count on {:?}", s.points())
        })?;
        if applies {
            applicable += 1;
            ensure(non_unique < w.lattice_count(), || {
                format!(
                    "{:?}, edge {} -> {}: {non_unique} non-unique, |w| = {}",
                    s.points(),
                    w.start,
                    w.end,
                    w.lattice_count()
                )
            })?;
        }
    }
    Ok(format!("{applicable} applicable of {trials} trials"))
}

/// The checkerboard has a two-point generating set with `D = 0`.
fn ac4() -> Outcome {
    let eta = checkerboard();
    let search = find_generating_set(&eta, 2, 3, SearchMode::Exhaustive, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let g = search.found().ok_or("no generating set")?;
    ensure(g.set.len() == 2 && g.discrepancy == 0 && g.minimality_certified, || {
        format!("got {:?} with D = {}", g.set.points(), g.discrepancy)
    })?;
    for sub in g.set.convex_subsets() {
        if sub.len() < g.set.len() && !sub.is_empty() {
            let d = d_of(&eta, &sub);
            ensure(d > g.discrepancy, || format!("subset {:?} has D = {d}", sub.points()))?;
        }
    }
    Ok(format!("S = {:?}, D = 0, subsets certified", g.set.points()))
}

/// Periodic configurations have no witnessed nonexpansive line.
fn ac5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let inputs: Vec<Configuration> = (0..200).map(|_| small_periodic(&mut rng, 4, 2)).collect();
    use rayon::prelude::*;
    let bad: Vec<String> = inputs
        .par_iter()
        .filter_map(|eta| {
            let c = census(eta, 6, 10, 10).unwrap();
            (c.witnessed_lines != 0).then(|| format!("{:?}: {} lines", eta.source(), c.witnessed_lines))
        })
        .collect();
    ensure(bad.is_empty(), || bad.join("; "))?;
    Ok(format!("{} inputs, 0 witnessed lines at radius 10", inputs.len()))
}

/// A Fibonacci column lift has exactly the vertical nonexpansive line.
fn ac6() -> Outcome {
    let eta = fibonacci_lift(233, LiftRule::X);
    let c = census(&eta, 6, 6, 6).map_err(|e| e.to_string())?;
    ensure(c.witnessed_lines == 1, || format!("{} witnessed lines", c.witnessed_lines))?;
    let vertical = c.lines.iter().find(|l| l.witnessed).unwrap();
    ensure(vertical.direction.is_vertical(), || format!("witnessed {:?}", vertical.direction))?;
    ensure(vertical.forward.witnessed() && vertical.backward.witnessed(), || {
        "vertical line not witnessed in both orientations".into()
    })?;
    for (p, q) in [(1, 0), (1, 1), (1, -1)] {
        let d = Direction::new(p, q).unwrap();
        for r in 1..=6 {
            let mut probes = vec![line_nonexpansive_at_scale(&eta, &DirectedLine::new(d), r, 6)];
            for o in [d, d.reversed()] {
                probes.push(direction_nonexpansive_at_scale(&eta, &DirectedLine::new(o), r, 6));
            }
            for v in probes {
                let v = v.map_err(|e| e.to_string())?;
                ensure(!v.witnessed(), || format!("({p},{q}) witnessed at radius {r}"))?;
            }
        }
    }
    Ok("vertical line only, both orientations; (1,0), (1,1), (1,-1) expansive for r <= 6".into())
}

const TM2D_P3: [usize; 11] = [12, 18, 30, 36, 48, 60, 66, 72, 84, 96, 108];

/// 2D Thue–Morse window counts exceed `3n` and are stable under one more
/// iteration. Window counts are lower bounds, so exceeding `3n` is sound.
fn ac7() -> Outcome {
    let (k8, k9) = (thue_morse_2d(8), thue_morse_2d(9));
    for n in 2..=12 {
        let a = rect_complexity(&k8, n, 3).map_err(|e| e.to_string())?;
        let b = rect_complexity(&k9, n, 3).map_err(|e| e.to_string())?;
        ensure(a.p > 3 * n, || format!("P({n},3) = {} <= {}", a.p, 3 * n))?;
        ensure(a.p == TM2D_P3[n - 2], || format!("P({n},3) = {}, frozen {}", a.p, TM2D_P3[n - 2]))?;
        ensure(a.p == b.p, || format!("P({n},3): k=8 {} vs k=9 {}", a.p, b.p))?;
    }
    Ok("P(n,3) > 3n for 2 <= n <= 12, equal at k = 8 and 9".into())
}

/// Low complexity on a periodic configuration comes with a nonzero period lattice.
fn ac8() -> Outcome {
    let mut inputs: Vec<(String, Configuration)> = common::periodic_corpus();
    for (i, c) in common::random_sample(8, 300, 4, 4, 3).into_iter().enumerate() {
        inputs.push((format!("random #{i}"), c));
    }
    let mut low = 0;
    for (name, eta) in &inputs {
        let lattice = period_lattice(eta).map_err(|e| e.to_string())?;
        for k in [2, 3] {
            let rows = complexity_profile(eta, 6, k).map_err(|e| e.to_string())?;
            if rows.iter().any(|r| r.exhaustive && r.within_bound()) {
                low += 1;
                ensure(lattice.rank() > 0, || format!("{name}: low P(n,{k}) but no period"))?;
            }
        }
    }
    Ok(format!("{} inputs, {low} low-complexity profiles, all with periods", inputs.len()))
}

/// Every constructed balanced set passes the independent check, and the
/// strip periods respect the multiplicity bound.
fn ac9() -> Outcome {
    let mut inputs: Vec<(String, Configuration)> = common::periodic_corpus();
    for (i, c) in common::random_sample(9, 60, 4, 4, 3).into_iter().enumerate() {
        inputs.push((format!("random #{i}"), c));
    }
    let (mut found, mut tried) = (0, 0);
    for (name, eta) in &inputs {
        let rows = complexity_profile(eta, 6, 3).map_err(|e| e.to_string())?;
        let Some(n) = rows.iter().find(|r| r.n >= 2 && r.within_bound()).map(|r| r.n) else {
            continue;
        };
        for d in balanced_directions() {
            tried += 1;
            let line = DirectedLine::new(d);
            let r = find_balanced_set(eta, &line, n).map_err(|e| format!("{name}: {e}"))?;
            let BalancedSearch::Found { set, .. } = r else { continue };
            found += 1;
            let cert = is_balanced(eta, &set, &line).map_err(|e| e.to_string())?;
            ensure(cert.balanced(), || {
                format!("{name}, {d:?}: conditions {:?} fail", cert.failures())
            })?;
            let strips = strip_period_bound_check(eta, &cert).map_err(|e| e.to_string())?;
            ensure(strips.passed(), || {
                format!("{name}, {d:?}: strip violations {:?}", strips.violations)
            })?;
        }
    }
    Ok(format!("{found} balanced sets of {tried} attempts, all certified"))
}

fn campaign_files(spec: &CampaignSpec, threads: usize, dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let report = pool.install(|| run_campaign(spec, &common::corpus_dir()));
    assert!(report.passed, "campaign failed");
    emit_report(&report, &[Format::Csv, Format::Json, Format::Svg], dir).unwrap();
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect()
}

/// Output is byte-identical across worker counts, and formats round-trip.
fn ac10() -> Outcome {
    let text = std::fs::read_to_string(common::corpus_dir().join("campaign.json")).unwrap();
    let spec = CampaignSpec::from_json(&text).map_err(|e| e.to_string())?;
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let one = campaign_files(&spec, 1, a.path());
    let four = campaign_files(&spec, 4, b.path());
    ensure(one.keys().eq(four.keys()), || "different file sets".into())?;
    for (name, bytes) in &one {
        ensure(&four[name] == bytes, || format!("{name} differs between 1 and 4 workers"))?;
    }
    let mut configs = 0;
    for (name, eta) in common::corpus_files() {
        let t = to_text(&eta).map_err(|e| e.to_string())?;
        let j = to_json(&eta).map_err(|e| e.to_string())?;
        ensure(from_text(&t).map_err(|e| e.to_string())? == eta, || format!("{name}: text round trip"))?;
        ensure(from_json(&j).map_err(|e| e.to_string())? == eta, || format!("{name}: JSON round trip"))?;
        configs += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..200 {
        let s = random_shape(&mut rng, 1);
        let back = parse_shape(&emit_shape(&s), true).map_err(|e| e.to_string())?;
        ensure(back == s, || format!("shape {:?} did not round-trip", s.points()))?;
    }
    Ok(format!("{} identical output files; {configs} configurations and 200 shapes round-trip", one.len()))
}

type Criterion = (&'static str, &'static str, fn() -> Outcome, u64);

fn main() {
    let criteria: [Criterion; 10] = [
        ("AC1", "1D periodic complexity and minimal periods", ac1, 10),
        ("AC2", "vertex removal changes D by the generated indicator", ac2, 60),
        ("AC3", "edge multiplicity bound", ac3, 60),
        ("AC4", "checkerboard generating set", ac4, 5),
        ("AC5", "no nonexpansive line on periodic inputs", ac5, 300),
        ("AC6", "Fibonacci lift has one nonexpansive line", ac6, 60),
        ("AC7", "2D Thue-Morse complexity", ac7, 300),
        ("AC8", "low complexity implies a period", ac8, 60),
        ("AC9", "balanced sets and strip period bound", ac9, 120),
        ("AC10", "determinism and round trips", ac10, 60),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, title, run, limit) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| id.eq_ignore_ascii_case(f)) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(_) if elapsed > Duration::from_secs(limit) => Err(format!("took {elapsed:.1?}, limit {limit} s")),
            r => r,
        };
        match &result {
            Ok(detail) => println!("[PASS] {id} {title}: {detail} ({elapsed:.2?})"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {id} {title}: {why} ({elapsed:.2?})");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
