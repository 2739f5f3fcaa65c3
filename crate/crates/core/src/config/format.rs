//! Text and JSON configuration files.
//!
//! ```text
//! # checkerboard
//! alphabet: 0 1
//! kind: periodic
//! size: 2 2
//! 0 1
//! 1 0
//! ```
//!
//! Grid rows are listed from `y = 0` upward, tokens separated by
//! whitespace. `window` uses the same fields as `periodic`. A `wordlift`
//! file has `rule: x|y|x+y` and `word: <tokens>`. A `substitution` file has
//! `seed:`, `iterations:` and one `block: <symbol>` stanza per symbol,
//! each followed by the `m` rows of its block. The JSON form uses the same
//! field names, with `grid` holding the rows and `block` a list of
//! `{"symbol", "rows"}` objects.

use serde::{Deserialize, Serialize};

use super::{Alphabet, Configuration, Grid, LiftRule, Source, SubstitutionRule, Symbol};
use crate::error::{parse_err, Error, Result};

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    alphabet: Vec<String>,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    size: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grid: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    word: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    iterations: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    block: Option<Vec<BlockStanza>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockStanza {
    symbol: String,
    rows: Vec<Vec<String>>,
}

fn tokens(alphabet: &Alphabet, syms: &[Symbol]) -> Vec<String> {
    syms.iter().map(|&s| alphabet.token(s).to_string()).collect()
}

fn grid_rows(alphabet: &Alphabet, g: &Grid) -> Vec<Vec<String>> {
    g.rows().map(|r| tokens(alphabet, r)).collect()
}

fn to_file(c: &Configuration) -> Result<ConfigFile> {
    let owned;
    let c = if c.view().is_identity() {
        c
    } else if c.is_periodic() {
        owned = c.materialize_periodic()?;
        &owned
    } else {
        return Err(Error::NotRepresentable(format!(
            "{} source under a non-identity view",
            c.source().kind()
        )));
    };
    let a = c.alphabet();
    let mut f = ConfigFile {
        alphabet: a.symbols().to_vec(),
        kind: c.source().kind().to_string(),
        ..Default::default()
    };
    match c.source() {
        Source::Periodic(g) | Source::Window(g) => {
            f.size = Some([g.width(), g.height()]);
            f.grid = Some(grid_rows(a, g));
        }
        Source::WordLift { word, rule } => {
            f.rule = Some(rule.token().to_string());
            f.word = Some(tokens(a, word));
        }
        Source::Substitution {
            rule,
            seed,
            iterations,
            ..
        } => {
            f.seed = Some(a.token(*seed).to_string());
            f.iterations = Some(*iterations);
            f.block = Some(
                (0..a.len())
                    .map(|s| BlockStanza {
                        symbol: a.token(s as Symbol).to_string(),
                        rows: grid_rows(a, rule.block(s as Symbol)),
                    })
                    .collect(),
            );
        }
    }
    Ok(f)
}

fn lookup(a: &Alphabet, tok: &str, line: usize) -> Result<Symbol> {
    a.index_of(tok)
        .ok_or_else(|| parse_err(line, format!("unknown symbol {tok:?}")))
}

fn parse_rows(a: &Alphabet, rows: &[Vec<String>], line: usize) -> Result<Grid> {
    let rows: Vec<Vec<Symbol>> = rows
        .iter()
        .map(|r| r.iter().map(|t| lookup(a, t, line)).collect())
        .collect::<Result<_>>()?;
    Grid::from_rows(&rows).map_err(|e| parse_err(line, e.to_string()))
}

fn from_file(f: ConfigFile, line_of: impl Fn(&str) -> usize) -> Result<Configuration> {
    let a = Alphabet::new(f.alphabet.clone()).map_err(|e| parse_err(line_of("alphabet"), e.to_string()))?;
    let need = |field: &str| parse_err(line_of("kind"), format!("missing field {field:?}"));
    match f.kind.as_str() {
        "periodic" | "window" => {
            let [w, h] = f.size.ok_or_else(|| need("size"))?;
            let rows = f.grid.ok_or_else(|| need("grid"))?;
            let g = parse_rows(&a, &rows, line_of("grid"))?;
            if g.width() != w || g.height() != h {
                return Err(parse_err(
                    line_of("size"),
                    format!(
                        "size {w}x{h} does not match the {}x{} grid",
                        g.width(),
                        g.height()
                    ),
                ));
            }
            if f.kind == "periodic" {
                Configuration::periodic(a, g)
            } else {
                Configuration::window(a, g)
            }
        }
        "wordlift" => {
            let rule_tok = f.rule.ok_or_else(|| need("rule"))?;
            let rule = LiftRule::parse(&rule_tok)
                .ok_or_else(|| parse_err(line_of("rule"), format!("bad rule {rule_tok:?}")))?;
            let word = f
                .word
                .ok_or_else(|| need("word"))?
                .iter()
                .map(|t| lookup(&a, t, line_of("word")))
                .collect::<Result<Vec<_>>>()?;
            Configuration::word_lift(a, word, rule)
        }
        "substitution" => {
            let seed = lookup(&a, &f.seed.ok_or_else(|| need("seed"))?, line_of("seed"))?;
            let iterations = f.iterations.ok_or_else(|| need("iterations"))?;
            let mut blocks: Vec<Option<Grid>> = vec![None; a.len()];
            for b in f.block.unwrap_or_default() {
                let line = line_of(&format!("block:{}", b.symbol));
                let s = lookup(&a, &b.symbol, line)?;
                if blocks[s as usize].is_some() {
                    return Err(parse_err(line, format!("duplicate block for {:?}", b.symbol)));
                }
                blocks[s as usize] = Some(parse_rows(&a, &b.rows, line)?);
            }
            let rule = SubstitutionRule::new(&a, blocks)?;
            Configuration::substitution(a, rule, seed, iterations)
        }
        other => Err(parse_err(line_of("kind"), format!("unknown kind {other:?}"))),
    }
}

/// Emit the canonical text form.
pub fn to_text(c: &Configuration) -> Result<String> {
    let f = to_file(c)?;
    let mut out = String::new();
    out.push_str(&format!("alphabet: {}\n", f.alphabet.join(" ")));
    out.push_str(&format!("kind: {}\n", f.kind));
    if let Some([w, h]) = f.size {
        out.push_str(&format!("size: {w} {h}\n"));
    }
    for row in f.grid.iter().flatten() {
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    if let Some(rule) = &f.rule {
        out.push_str(&format!("rule: {rule}\n"));
    }
    if let Some(word) = &f.word {
        out.push_str(&format!("word: {}\n", word.join(" ")));
    }
    if let Some(seed) = &f.seed {
        out.push_str(&format!("seed: {seed}\n"));
    }
    if let Some(k) = f.iterations {
        out.push_str(&format!("iterations: {k}\n"));
    }
    for b in f.block.iter().flatten() {
        out.push_str(&format!("block: {}\n", b.symbol));
        for row in &b.rows {
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    Ok(out)
}

/// Emit the canonical JSON form (pretty-printed, trailing newline).
pub fn to_json(c: &Configuration) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&to_file(c)?)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<Configuration> {
    let f: ConfigFile = serde_json::from_str(text)?;
    from_file(f, |_| 0)
}

/// Parse the text form. Errors carry 1-based line numbers.
pub fn from_text(text: &str) -> Result<Configuration> {
    let mut f = ConfigFile::default();
    let mut lines: Vec<(String, usize)> = Vec::new();
    let mut seen_kind = false;
    let mut seen_alphabet = false;
    // rows go to the main grid until the first block stanza
    let mut current_block: Option<usize> = None;
    let mut grid: Vec<Vec<String>> = Vec::new();
    let mut blocks: Vec<BlockStanza> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            let row: Vec<String> = line.split_whitespace().map(str::to_string).collect();
            match current_block {
                Some(b) => blocks[b].rows.push(row),
                None => {
                    if grid.is_empty() {
                        lines.push(("grid".into(), ln));
                    }
                    grid.push(row)
                }
            }
            continue;
        };
        let key = key.trim();
        let value = value.trim();
        let toks = || value.split_whitespace().map(str::to_string).collect::<Vec<_>>();
        let single = || -> Result<String> {
            let t = toks();
            if t.len() != 1 {
                return Err(parse_err(ln, format!("{key} expects one value")));
            }
            Ok(t[0].clone())
        };
        let dup = |present: bool| -> Result<()> {
            if present {
                return Err(parse_err(ln, format!("duplicate field {key:?}")));
            }
            Ok(())
        };
        match key {
            "alphabet" => {
                dup(seen_alphabet)?;
                seen_alphabet = true;
                f.alphabet = toks();
            }
            "kind" => {
                dup(seen_kind)?;
                seen_kind = true;
                f.kind = single()?;
            }
            "size" => {
                dup(f.size.is_some())?;
                let t = toks();
                let nums: Vec<usize> = t
                    .iter()
                    .map(|s| s.parse().map_err(|_| parse_err(ln, format!("bad size {s:?}"))))
                    .collect::<Result<_>>()?;
                if nums.len() != 2 {
                    return Err(parse_err(ln, "size expects W H"));
                }
                f.size = Some([nums[0], nums[1]]);
            }
            "rule" => {
                dup(f.rule.is_some())?;
                f.rule = Some(single()?);
            }
            "word" => {
                dup(f.word.is_some())?;
                f.word = Some(toks());
            }
            "seed" => {
                dup(f.seed.is_some())?;
                f.seed = Some(single()?);
            }
            "iterations" => {
                dup(f.iterations.is_some())?;
                let v = single()?;
                f.iterations = Some(
                    v.parse()
                        .map_err(|_| parse_err(ln, format!("bad iteration count {v:?}")))?,
                );
            }
            "block" => {
                let symbol = single()?;
                lines.push((format!("block:{symbol}"), ln));
                blocks.push(BlockStanza {
                    symbol,
                    rows: Vec::new(),
                });
                current_block = Some(blocks.len() - 1);
                continue;
            }
            other => return Err(parse_err(ln, format!("unknown field {other:?}"))),
        }
        lines.push((key.to_string(), ln));
    }
    if !seen_alphabet {
        return Err(parse_err(1, "missing field \"alphabet\""));
    }
    if !seen_kind {
        return Err(parse_err(1, "missing field \"kind\""));
    }
    if !grid.is_empty() {
        f.grid = Some(grid);
    }
    if !blocks.is_empty() {
        f.block = Some(blocks);
    }
    let line_of = |key: &str| {
        lines
            .iter()
            .find(|(k, _)| k == key)
            .or_else(|| lines.iter().find(|(k, _)| k == "kind"))
            .map_or(1, |&(_, l)| l)
    };
    from_file(f, line_of)
}
