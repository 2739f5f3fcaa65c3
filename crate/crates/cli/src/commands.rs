use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use nivat_core::balanced::{find_balanced_set, is_balanced, BalancedCertificate, BalancedSearch};
use nivat_core::complexity::{complexity, complexity_profile, profile_csv, profile_svg, ProfileRow};
use nivat_core::config::generators::{random_periodic, Generator};
use nivat_core::config::{to_json, to_text};
use nivat_core::expansivity::{census, direction_nonexpansive_at_scale, line_nonexpansive_at_scale, ExpansivityVerdict};
use nivat_core::extension::{find_generating_set, GeneratingSearch, SearchMode};
use nivat_core::geometry::{emit_shape, parse_shape};
use nivat_core::periodicity::{
    horizontal_period, is_periodic_on_region, morse_hedlund_1d, period_lattice, periodic_strip_propagation_check,
    strip_period_bound_check, Region, StripPeriodReport,
};
use nivat_core::verifier::{emit_report, load_config, run_campaign, shape_svg, CampaignSpec, Format};
use nivat_core::{Configuration, ConvexLatticeSet, DirectedLine, Direction, LatticePoint, Source};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{Command, GenKind, Mode, OutFormat, Output, Probe, WordMode};

#[derive(Serialize)]
#[serde(untagged)]
enum Balanced {
    Search(BalancedSearch),
    Check(BalancedCertificate),
}

#[derive(Serialize)]
struct WithStrips<'a> {
    balanced: &'a Balanced,
    strips: &'a StripPeriodReport,
}

/// Run one subcommand. `Ok(false)` means a requested check failed or the
/// searched object does not exist.
pub fn run(command: Command) -> Result<bool> {
    match command {
        Command::Complexity { input, shape, strict, n, k, output } => {
            let eta = config(&input.config)?;
            match shape {
                Some(path) => {
                    let s = shape_file(&path, strict)?;
                    let r = complexity(&eta, &s)?;
                    println!(
                        "P = {}, |S| = {}, D = {}, translates = {}, exhaustive = {}",
                        r.p, r.size, r.d, r.translate_count, r.exhaustive
                    );
                    if let Some((path, _)) = target(&output, &[OutFormat::Json])? {
                        write(&path, json(&r)?)?;
                    }
                }
                None => {
                    let rows = complexity_profile(&eta, n, k)?;
                    print_profile(&rows);
                    match target(&output, &[OutFormat::Csv, OutFormat::Json, OutFormat::Svg])? {
                        Some((path, OutFormat::Csv)) => write(&path, profile_csv(&rows))?,
                        Some((path, OutFormat::Svg)) => {
                            let name = input.config.display().to_string();
                            write(&path, profile_svg(&[(name, rows)]))?
                        }
                        Some((path, _)) => write(&path, json(&rows)?)?,
                        None => {}
                    }
                }
            }
            Ok(true)
        }
        Command::GenerateSet { input, n, k, mode, budget, output } => {
            let eta = config(&input.config)?;
            let mode = match mode {
                Mode::Exhaustive => SearchMode::Exhaustive,
                Mode::Greedy => SearchMode::Greedy,
            };
            let search = find_generating_set(&eta, n, k, mode, budget)?;
            let found = match &search {
                GeneratingSearch::Found(g) => {
                    println!("generating set: {}", points(g.set.points()));
                    println!(
                        "P = {}, |S| = {}, D = {}, minimality certified = {} ({} subsets checked)",
                        g.p,
                        g.set.len(),
                        g.discrepancy,
                        g.minimality_certified,
                        g.subsets_checked
                    );
                    Some(g)
                }
                GeneratingSearch::NotFound { reason } => {
                    println!("no generating set: {reason}");
                    None
                }
            };
            match (target(&output, &[OutFormat::Shape, OutFormat::Json, OutFormat::Svg])?, found) {
                (Some((path, OutFormat::Json)), _) => write(&path, json(&search)?)?,
                (Some((path, OutFormat::Svg)), Some(g)) => {
                    write(&path, shape_svg(&g.set, &format!("generating set, D = {}", g.discrepancy)))?
                }
                (Some((path, _)), Some(g)) => write(&path, emit_shape(&g.set))?,
                (Some(_), None) | (None, _) => {}
            }
            Ok(found.is_some())
        }
        Command::Expansivity { input, directions, probe, radius, extent, n_max, output } => {
            let eta = config(&input.config)?;
            let extent = extent.unwrap_or(radius);
            if directions.is_empty() {
                let c = census(&eta, n_max, radius, extent)?;
                match &c.generating_set {
                    Some(g) => println!("generating set (n = {}): {}", c.n.unwrap_or(0), points(g.set.points())),
                    None => println!("no generating set for n <= {n_max}"),
                }
                for l in &c.lines {
                    println!(
                        "line {:>8} {:<8} line {:<5} forward {:<5} backward {:<5}",
                        l.direction.to_string(),
                        format!("{:?}", l.origin).to_lowercase(),
                        l.line.witnessed(),
                        l.forward.witnessed(),
                        l.backward.witnessed()
                    );
                }
                println!("{} witnessed line(s) at radius {radius}, extent {extent}", c.witnessed_lines);
                if let Some((path, _)) = target(&output, &[OutFormat::Json])? {
                    write(&path, json(&c)?)?;
                }
            } else {
                let mut verdicts: Vec<ExpansivityVerdict> = Vec::new();
                for (p, q) in directions {
                    let line = DirectedLine::new(Direction::new(p, q)?);
                    if matches!(probe, Probe::Line | Probe::Both) {
                        verdicts.push(line_nonexpansive_at_scale(&eta, &line, radius, extent)?);
                    }
                    if matches!(probe, Probe::Direction | Probe::Both) {
                        verdicts.push(direction_nonexpansive_at_scale(&eta, &line, radius, extent)?);
                    }
                }
                for v in &verdicts {
                    println!(
                        "{:<9} {:>8}  {}",
                        format!("{:?}", v.probe).to_lowercase(),
                        v.direction.to_string(),
                        if v.witnessed() { "nonexpansive (witnessed)" } else { "expansive at this scale" }
                    );
                }
                if let Some((path, _)) = target(&output, &[OutFormat::Json])? {
                    write(&path, json(&verdicts)?)?;
                }
            }
            Ok(true)
        }
        Command::Balanced { input, direction, shape, strict, n, n_max, strips, output } => {
            let eta = config(&input.config)?;
            let line = DirectedLine::new(Direction::new(direction.0, direction.1)?);
            let allowed = [OutFormat::Json, OutFormat::Shape, OutFormat::Svg];
            let (result, cert) = match shape {
                Some(path) => {
                    let s = shape_file(&path, strict)?;
                    let cert = is_balanced(&eta, &s, &line)?;
                    print_certificate(&cert);
                    (Balanced::Check(cert.clone()), Some(cert))
                }
                None => {
                    let n = match n {
                        Some(n) => n,
                        None => match hypothesis_n(&eta, n_max)? {
                            Some(n) => n,
                            None => {
                                println!("no n in 2..={n_max} with P(n, 3) <= 3n");
                                return Ok(false);
                            }
                        },
                    };
                    let search = find_balanced_set(&eta, &line, n)?;
                    for step in search.trace() {
                        let d = step.discrepancy.map_or("-".to_string(), |d| d.to_string());
                        println!("{:<8} {:>3} cells  D = {d:>3}  {}", step.step, step.cells.len(), step.note);
                    }
                    let cert = match &search {
                        BalancedSearch::Found { certificate, .. } => {
                            print_certificate(certificate);
                            Some(certificate.clone())
                        }
                        BalancedSearch::NotFound { reason, .. } => {
                            println!("not found: {reason}");
                            None
                        }
                    };
                    (Balanced::Search(search), cert)
                }
            };
            let balanced = cert.as_ref().is_some_and(BalancedCertificate::balanced);
            let strip_report = match (&cert, strips) {
                (Some(c), true) if c.balanced() => {
                    let r = strip_period_bound_check(&eta, c)?;
                    print_strips(&r);
                    Some(r)
                }
                _ => None,
            };
            match target(&output, &allowed)? {
                Some((path, OutFormat::Json)) => {
                    let body = match &strip_report {
                        Some(strips) => json(&WithStrips { balanced: &result, strips })?,
                        None => json(&result)?,
                    };
                    write(&path, body)?
                }
                Some((path, f)) => {
                    let cert = cert.as_ref().ok_or_else(|| anyhow!("no set to write"))?;
                    match f {
                        OutFormat::Svg => write(&path, shape_svg(&cert.set, &format!("balanced set for {}", line.direction)))?,
                        _ => write(&path, emit_shape(&cert.set))?,
                    }
                }
                None => {}
            }
            Ok(balanced && strip_report.as_ref().is_none_or(StripPeriodReport::passed))
        }
        Command::Periodicity { input, vector, region, shape, strict, propagate, word, n_max, output } => {
            let eta = config(&input.config)?;
            let modes = [vector.is_some(), propagate.is_some(), word.is_some()];
            if modes.iter().filter(|&&m| m).count() > 1 {
                bail!("choose one of --vector, --propagate and --word");
            }
            let shape = shape.map(|p| shape_file(&p, strict)).transpose()?;
            let out = target(&output, &[OutFormat::Json])?;
            if let Some((x, y)) = vector {
                let region = match (region, &shape) {
                    (Some((x0, y0, w, h)), _) => Region::rect(LatticePoint::new(x0, y0), w, h),
                    (None, Some(s)) => Region::from_shape(s),
                    (None, None) => Region::rect(LatticePoint::ORIGIN, 8, 8),
                };
                let r = is_periodic_on_region(&eta, &region, LatticePoint::new(x, y))?;
                match r.violation {
                    None => println!("({x}, {y}) is a period on {} ({} pairs compared)", r.region, r.compared),
                    Some(v) => println!("({x}, {y}) is not a period on {}: cells {v} and {} differ", r.region, v + LatticePoint::new(x, y)),
                }
                if let Some((path, _)) = out {
                    write(&path, json(&r)?)?;
                }
                return Ok(r.holds);
            }
            if let Some((p, q)) = propagate {
                let d = Direction::new(p, q)?;
                let s = shape.ok_or_else(|| anyhow!("--propagate needs --shape"))?;
                let w = s
                    .boundary_edges()
                    .into_iter()
                    .find(|e| e.direction.undirected() == d.undirected())
                    .ok_or_else(|| anyhow!("the shape has no edge parallel to {d}"))?;
                let r = periodic_strip_propagation_check(&eta, &DirectedLine::new(d), &s, &w)?;
                println!(
                    "strip {:?}: period {} along {d}; global period {:?}",
                    r.strip_offsets, r.strip_period, r.global_period
                );
                if let Some((path, _)) = out {
                    write(&path, json(&r)?)?;
                }
                return Ok(r.holds);
            }
            if let Some(mode) = word {
                let Source::WordLift { word, .. } = eta.source() else {
                    bail!("--word needs a wordlift configuration");
                };
                let mode = match mode {
                    WordMode::Periodic => nivat_core::periodicity::WordMode::Periodic,
                    WordMode::Onesided => nivat_core::periodicity::WordMode::Onesided,
                };
                let v = morse_hedlund_1d(word, mode, n_max)?;
                println!("P(1..{}) = {:?}", v.profile.len(), v.profile);
                println!(
                    "low complexity n = {:?}, period = {:?}, preperiod = {:?}",
                    v.low_complexity_n, v.period, v.preperiod
                );
                if let Some(c) = &v.caveat {
                    println!("note: {c}");
                }
                if let Some((path, _)) = out {
                    write(&path, json(&v)?)?;
                }
                return Ok(true);
            }
            let lattice = period_lattice(&eta)?;
            println!("period lattice generators: {}", points(&lattice.generators));
            println!(
                "rank {}, index {:?}, horizontal period {}",
                lattice.rank(),
                lattice.index(),
                horizontal_period(&eta)?
            );
            if let Some((path, _)) = out {
                write(&path, json(&lattice)?)?;
            }
            Ok(true)
        }
        Command::NivatCheck { campaign, out, format } => {
            let formats = format
                .iter()
                .map(|f| Format::parse(f).ok_or_else(|| anyhow!("unknown format `{f}` (csv, json, svg)")))
                .collect::<Result<Vec<_>>>()?;
            let text = fs::read_to_string(&campaign).with_context(|| campaign.display().to_string())?;
            let spec = CampaignSpec::from_json(&text).with_context(|| campaign.display().to_string())?;
            let base = campaign.parent().unwrap_or(Path::new("."));
            let report = run_campaign(&spec, base);
            for e in &report.entries {
                if let Some(err) = &e.error {
                    println!("[{}] {}: input error: {err}", e.index, e.name);
                }
                for c in &e.checks {
                    let status = if c.passed { "ok" } else { "FAIL" };
                    println!("[{}] {:<24} {:<20} {:<4} {}", e.index, e.name, c.check.name(), status, c.summary);
                }
            }
            let written = emit_report(&report, &formats, &out)?;
            println!(
                "{} entries, {} file(s) in {}, {:.2?}",
                report.entries.len(),
                written.len(),
                out.display(),
                report.wall_time
            );
            if report.input_errors() > 0 {
                bail!("{} corpus entr(ies) could not be loaded", report.input_errors());
            }
            Ok(report.passed)
        }
        Command::Gen { kind, out, format } => {
            let eta = generate(kind)?;
            let fmt = match (format, &out) {
                (Some(f @ (OutFormat::Text | OutFormat::Json)), _) => f,
                (Some(f), _) => bail!("gen writes text or json, not {f:?}"),
                (None, Some(p)) if p.extension().is_some_and(|e| e == "json") => OutFormat::Json,
                (None, _) => OutFormat::Text,
            };
            let body = match fmt {
                OutFormat::Json => to_json(&eta)? + "\n",
                _ => to_text(&eta)?,
            };
            match out {
                Some(p) => {
                    write(&p, body)?;
                    println!("wrote {} ({})", p.display(), eta.source().kind());
                }
                None => print!("{body}"),
            }
            Ok(true)
        }
    }
}

fn generate(kind: GenKind) -> Result<Configuration> {
    let g = match kind {
        GenKind::Checkerboard => Generator::Checkerboard {},
        GenKind::Constant { symbols, value } => Generator::Constant { symbols, value },
        GenKind::VerticalStripes { period } => Generator::VerticalStripes { period },
        GenKind::HorizontalStripes { period } => Generator::HorizontalStripes { period },
        GenKind::Fibonacci { len, rule } => Generator::Fibonacci { len, rule },
        GenKind::ThueMorse { len, rule } => Generator::ThueMorse { len, rule },
        GenKind::Sturmian { directive, len, rule } => Generator::Sturmian { directive, len, rule },
        GenKind::Substitution { iterations, .. } => Generator::Tm2d { iterations },
        GenKind::Random { width, height, symbols, seed } => {
            if width == 0 || height == 0 || symbols < 2 {
                bail!("random needs positive sides and at least 2 symbols");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            return Ok(random_periodic(&mut rng, width, height, symbols));
        }
    };
    Ok(g.build()?)
}

fn hypothesis_n(eta: &Configuration, n_max: usize) -> Result<Option<usize>> {
    Ok(complexity_profile(eta, n_max, 3)?
        .iter()
        .find(|r| r.n >= 2 && r.exhaustive && r.within_bound())
        .map(|r| r.n))
}

fn config(path: &Path) -> Result<Configuration> {
    load_config(path).with_context(|| path.display().to_string())
}

fn shape_file(path: &Path, strict: bool) -> Result<ConvexLatticeSet> {
    let text = fs::read_to_string(path).with_context(|| path.display().to_string())?;
    parse_shape(&text, strict).with_context(|| path.display().to_string())
}

/// The output path and format, if `--out` was given.
fn target(output: &Output, allowed: &[OutFormat]) -> Result<Option<(PathBuf, OutFormat)>> {
    let Some(path) = &output.out else {
        if output.format.is_some() {
            bail!("--format needs --out");
        }
        return Ok(None);
    };
    let inferred = match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Some(OutFormat::Csv),
        Some("json") => Some(OutFormat::Json),
        Some("svg") => Some(OutFormat::Svg),
        Some("shape" | "txt") => Some(OutFormat::Shape),
        _ => None,
    };
    let f = output
        .format
        .or(inferred.filter(|f| allowed.contains(f)))
        .unwrap_or(allowed[0]);
    if !allowed.contains(&f) {
        bail!("format {f:?} is not available here");
    }
    Ok(Some((path.clone(), f)))
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn write(path: &Path, body: String) -> Result<()> {
    fs::write(path, body).with_context(|| path.display().to_string())
}

fn points(ps: &[LatticePoint]) -> String {
    ps.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn print_profile(rows: &[ProfileRow]) {
    println!("{:>3} {:>3} {:>8} {:>6} {:>8}  exhaustive  P <= nk", "n", "k", "P", "nk", "D");
    for r in rows {
        println!(
            "{:>3} {:>3} {:>8} {:>6} {:>8}  {:<10}  {}",
            r.n,
            r.k,
            r.p,
            r.bound,
            r.d,
            r.exhaustive,
            r.within_bound()
        );
    }
}

fn print_certificate(c: &BalancedCertificate) {
    println!("set: {}", points(c.set.points()));
    if let Some(w) = &c.edge {
        println!("edge {} -> {} ({} points)", w.start, w.end, w.lattice_count());
    }
    println!(
        "D(S) = {}, D(S without edge) = {:?}, exhaustive = {}",
        c.d_set, c.d_without_edge, c.exhaustive
    );
    if c.balanced() {
        println!("balanced for {}", c.direction);
    } else {
        println!("not balanced for {}: conditions {:?} fail", c.direction, c.failures());
    }
}

fn print_strips(r: &StripPeriodReport) {
    for row in &r.rows {
        println!(
            "strip shift {:>3}: {:?}, period {} (bound {}){}",
            row.shift,
            row.case,
            row.period,
            row.bound,
            if row.within_bound { "" } else { " exceeds" }
        );
    }
    println!(
        "{} violation(s), {} conditional exceedance(s)",
        r.violations.len(),
        r.exceedances.len()
    );
}
