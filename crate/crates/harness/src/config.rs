//! Flat experiment configuration: one `key = value` per line, `#` comments,
//! dotted keys for grouping, comma-separated lists. Field-level errors name
//! the offending key.

use anyhow::{bail, Context, Result};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
    /// Original text, kept for byte-stable provenance in reports.
    pub source: String,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected `key = value`, got `{raw}`", lineno + 1);
            };
            let key = key.trim();
            if key.is_empty() {
                bail!("line {}: empty key", lineno + 1);
            }
            if entries
                .insert(key.to_string(), value.trim().to_string())
                .is_some()
            {
                bail!("line {}: duplicate key `{key}`", lineno + 1);
            }
        }
        Ok(Config {
            entries,
            source: text.to_string(),
        })
    }

    pub fn from_pairs(pairs: &[(&str, &str)]) -> Self {
        let mut text = String::new();
        for (k, v) in pairs {
            text.push_str(k);
            text.push_str(" = ");
            text.push_str(v);
            text.push('\n');
        }
        Config::parse(&text).expect("programmatic config is well-formed")
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .with_context(|| format!("missing required key `{key}`"))
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<f64>()
                .with_context(|| format!("key `{key}`: cannot parse `{v}` as a number")),
        }
    }

    pub fn u32(&self, key: &str, default: u32) -> Result<u32> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<u32>()
                .with_context(|| format!("key `{key}`: cannot parse `{v}` as an integer")),
        }
    }

    pub fn u64(&self, key: &str, default: u64) -> Result<u64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<u64>()
                .with_context(|| format!("key `{key}`: cannot parse `{v}` as an integer")),
        }
    }

    pub fn i32(&self, key: &str, default: i32) -> Result<i32> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<i32>()
                .with_context(|| format!("key `{key}`: cannot parse `{v}` as an integer")),
        }
    }

    pub fn list_u32(&self, key: &str, default: &[u32]) -> Result<Vec<u32>> {
        let out = match self.get(key) {
            None => default.to_vec(),
            Some(v) => v
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<u32>()
                        .with_context(|| format!("key `{key}`: bad list element `{p}`"))
                })
                .collect::<Result<Vec<u32>>>()?,
        };
        if out.is_empty() {
            bail!("key `{key}`: grid must be nonempty");
        }
        Ok(out)
    }

    pub fn list_f64(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        let out = match self.get(key) {
            None => default.to_vec(),
            Some(v) => v
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .with_context(|| format!("key `{key}`: bad list element `{p}`"))
                })
                .collect::<Result<Vec<f64>>>()?,
        };
        if out.is_empty() {
            bail!("key `{key}`: grid must be nonempty");
        }
        Ok(out)
    }

    /// Positive tolerance lookup.
    pub fn tolerance(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.f64(key, default)?;
        if v <= 0.0 {
            bail!("key `{key}`: tolerance must be positive, got {v}");
        }
        Ok(v)
    }

    pub fn dim(&self) -> Result<u32> {
        let d = self.u32("dim", 2)?;
        if d != 2 && d != 3 {
            bail!("key `dim`: sphere dimension must be 2 or 3, got {d}");
        }
        Ok(d)
    }

    /// Optional point list `x,y,z; x,y,z; ...` (normalized onto the
    /// sphere); `None` when the key is absent.
    pub fn points(&self, key: &str, dim: u32) -> Result<Option<Vec<scatterlab_core::Point>>> {
        let Some(raw) = self.get(key) else {
            return Ok(None);
        };
        let mut out = Vec::new();
        for (i, chunk) in raw.split(';').enumerate() {
            let coords: Vec<f64> = chunk
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .with_context(|| format!("key `{key}`: bad coordinate `{p}`"))
                })
                .collect::<Result<_>>()?;
            if coords.len() != dim as usize + 1 {
                bail!(
                    "key `{key}`: point {i} has {} coordinates, expected {}",
                    coords.len(),
                    dim + 1
                );
            }
            out.push(
                scatterlab_core::Point::normalized(coords)
                    .map_err(|e| anyhow::anyhow!("key `{key}`: point {i}: {e}"))?,
            );
        }
        if out.is_empty() {
            bail!("key `{key}`: point list must be nonempty");
        }
        Ok(Some(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_dotted_keys_lists_and_comments() {
        let cfg = Config::parse(
            "# tail sweep\nexperiment = tail-bound\ndim = 3\nh_inv = 50, 100,200\ntol.slope = 0.15\n",
        )
        .unwrap();
        assert_eq!(cfg.require("experiment").unwrap(), "tail-bound");
        assert_eq!(cfg.dim().unwrap(), 3);
        assert_eq!(cfg.list_u32("h_inv", &[]).unwrap(), vec![50, 100, 200]);
        assert_eq!(cfg.tolerance("tol.slope", 0.1).unwrap(), 0.15);
        assert_eq!(cfg.f64("absent", 7.5).unwrap(), 7.5);
    }

    #[test]
    fn rejects_malformed_lines_duplicates_and_empty_grids() {
        assert!(Config::parse("just words\n").is_err());
        assert!(Config::parse("a = 1\na = 2\n").is_err());
        let cfg = Config::parse("h_inv = \n").unwrap();
        assert!(cfg.list_u32("h_inv", &[1]).is_err());
        let cfg = Config::parse("tol.rel = -1\n").unwrap();
        assert!(cfg.tolerance("tol.rel", 0.1).is_err());
    }
}
