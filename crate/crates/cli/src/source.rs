//! Layout sources: `--coin <file|name[:params]> --n N` or
//! `--pattern "C:l,I:m" --coin-c <name[:params]> --n N`.

use std::path::Path;

use anyhow::Context;
use clap::Args;
use cycleqw_core::coin::{build_periodic_layout, make_named_coin};
use cycleqw_core::io::read_layout;
use cycleqw_core::{Coin2x2, CoinLayout};
use serde::{Deserialize, Serialize};

use crate::Usage;

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct LayoutArgs {
    /// Layout JSON file, or a named coin `name[:p1,p2,..]` repeated on every vertex.
    /// Angles accept `pi` forms such as `2pi/3`.
    #[arg(long)]
    pub coin: Option<String>,
    /// Number of vertices (taken from the file when `--coin` is a file).
    #[arg(long)]
    pub n: Option<usize>,
    /// Periodic pattern `C:l,X:m` where `X` is `I` (identity), `C2` (`--coin-c2`)
    /// or a coin name; `m` may be `*` for "the remaining n - l vertices".
    #[arg(long)]
    pub pattern: Option<String>,
    #[arg(long = "coin-c")]
    pub coin_c: Option<String>,
    #[arg(long = "coin-c2")]
    pub coin_c2: Option<String>,
}

/// `2pi/3`, `-pi/4`, `pi`, `0.5*pi`, or a plain number.
pub fn parse_angle(s: &str) -> Result<f64, Usage> {
    let t = s.trim().to_ascii_lowercase();
    let bad = || Usage(format!("cannot read number '{s}'"));
    let Some((coef, rest)) = t.split_once("pi") else {
        return t.parse::<f64>().map_err(|_| bad());
    };
    let coef = coef.trim_end_matches('*');
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let denom = match rest.strip_prefix('/') {
        Some(d) => d.parse::<f64>().map_err(|_| bad())?,
        None if rest.is_empty() => 1.0,
        None => return Err(bad()),
    };
    Ok(coef * std::f64::consts::PI / denom)
}

fn looks_like_file(coin: &str) -> bool {
    coin.contains(['/', '\\']) || coin.ends_with(".json") || Path::new(coin).is_file()
}

/// `name[:p1,p2,..]`
pub fn parse_coin_spec(spec: &str) -> anyhow::Result<Coin2x2> {
    let (name, params) = match spec.split_once(':') {
        Some((name, p)) => (name, p.split(',').map(parse_angle).collect::<Result<Vec<_>, _>>()?),
        None => (spec, Vec::new()),
    };
    Ok(make_named_coin(name, &params)?)
}

impl LayoutArgs {
    /// Layout on `n` vertices (`n` overrides `--n`, as in sweeps).
    pub fn resolve_with(&self, n: Option<usize>) -> anyhow::Result<CoinLayout> {
        let n = n.or(self.n);
        match (&self.coin, &self.pattern) {
            (Some(_), Some(_)) => Err(Usage("give either --coin or --pattern, not both".into()).into()),
            (None, None) => Err(Usage("a layout is required: --coin or --pattern".into()).into()),
            (Some(coin), None) => {
                if looks_like_file(coin) {
                    let layout = read_layout(Path::new(coin)).with_context(|| format!("reading layout {coin}"))?;
                    if let Some(n) = n.filter(|&n| n != layout.n()) {
                        return Err(Usage(format!("--n {n} disagrees with the file's n = {}", layout.n())).into());
                    }
                    return Ok(layout);
                }
                let n = n.ok_or_else(|| Usage("--n is required with a named coin".into()))?;
                Ok(CoinLayout::homogeneous(parse_coin_spec(coin)?, n)?)
            }
            (None, Some(pattern)) => {
                let n = n.ok_or_else(|| Usage("--n is required with --pattern".into()))?;
                self.pattern_layout(pattern, n)
            }
        }
    }

    pub fn resolve(&self) -> anyhow::Result<CoinLayout> {
        self.resolve_with(None)
    }

    pub fn is_file(&self) -> bool {
        self.coin.as_deref().is_some_and(looks_like_file)
    }

    fn pattern_layout(&self, pattern: &str, n: usize) -> anyhow::Result<CoinLayout> {
        let parts: Vec<&str> = pattern.split(',').map(str::trim).collect();
        let [first, second] = parts[..] else {
            return Err(Usage(format!("pattern '{pattern}' must have two entries 'C:l,X:m'")).into());
        };
        let split = |entry: &str| -> Result<(String, String), Usage> {
            entry
                .rsplit_once(':')
                .map(|(t, c)| (t.trim().to_string(), c.trim().to_string()))
                .ok_or_else(|| Usage(format!("pattern entry '{entry}' needs a ':count'")))
        };
        let (tag1, l) = split(first)?;
        let (tag2, m) = split(second)?;
        let l: usize = l.parse().map_err(|_| Usage(format!("bad count '{l}'")))?;
        let m: usize = if m == "*" {
            n.checked_sub(l).ok_or_else(|| Usage(format!("pattern needs n >= {l}")))?
        } else {
            m.parse().map_err(|_| Usage(format!("bad count '{m}'")))?
        };
        let c = self.tag_coin(&tag1)?;
        let c2 = self.tag_coin(&tag2)?;
        Ok(build_periodic_layout(c, l, c2, m, n)?)
    }

    fn tag_coin(&self, tag: &str) -> anyhow::Result<Coin2x2> {
        let need = |flag: &Option<String>, name: &str| {
            flag.clone()
                .ok_or_else(|| Usage(format!("pattern tag '{tag}' needs --{name}")))
        };
        match tag {
            "C" => parse_coin_spec(&need(&self.coin_c, "coin-c")?),
            "C2" => parse_coin_spec(&need(&self.coin_c2, "coin-c2")?),
            "I" => Ok(Coin2x2::identity()),
            other => parse_coin_spec(other),
        }
    }
}
