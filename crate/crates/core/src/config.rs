//! Plain-text configuration: a quadric as `diag = [...]` or
//! `matrix = [[...], ...]`, optional `base_points`, and points written as
//! comma-separated integers.
//!
//! ```toml
//! diag = [1, 47, -103, -82297]
//! base_points = [[35, 3, 4, 0], [20, 13, 9, 0]]
//! ```

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::quadric::{ConePoint, QuadricForm};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    diag: Option<[i64; 4]>,
    matrix: Option<[[i64; 4]; 4]>,
    #[serde(default)]
    base_points: Vec<[i64; 4]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadricConfig {
    pub form: QuadricForm,
    pub base_points: Vec<ConePoint>,
}

pub fn parse_config(text: &str) -> Result<QuadricConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
    let form = match (raw.diag, raw.matrix) {
        (Some(d), None) => QuadricForm::diagonal(d.map(i128::from))?,
        (None, Some(m)) => QuadricForm::new(m.map(|row| row.map(i128::from)))?,
        (Some(_), Some(_)) => return Err(Error::Config("give either `diag` or `matrix`, not both".into())),
        (None, None) => return Err(Error::Config("missing `diag` or `matrix`".into())),
    };
    let base_points = raw
        .base_points
        .into_iter()
        .map(|p| ConePoint::new(p.map(i128::from), &form))
        .collect::<Result<_>>()?;
    Ok(QuadricConfig { form, base_points })
}

/// Parses `a,b,c,d`, optionally wrapped in parentheses or brackets.
pub fn parse_point(text: &str) -> Result<[i128; 4]> {
    let t = text.trim();
    let t = t
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .or_else(|| t.strip_prefix('[').and_then(|s| s.strip_suffix(']')))
        .unwrap_or(t);
    let parts = t
        .split(',')
        .map(|x| x.trim().parse::<i128>().map_err(|e| Error::Config(format!("{x:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    parts
        .try_into()
        .map_err(|v: Vec<i128>| Error::Config(format!("expected 4 coordinates, got {}", v.len())))
}
