//! Experiment configuration and its flat `key = value` file format.
//!
//! ```text
//! # comments start with '#'
//! conditions = sin, abs-sin-1/2
//! operators = G, S
//! t = 0.5
//! n_max = 11
//! grid_count = 1000
//! output_dir = results
//! default_exclusions = true
//! exclude.abs-sin-3/2.G = 1
//! exclude.exp-abs.S =
//! ```
//!
//! An `exclude.<condition>.<operator>` line replaces the exclusion set of that
//! pair; an empty value means "exclude nothing".

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use crate::chernoff::ShiftChernoffOperator;
use crate::error::{Error, Result};
use crate::functions::{catalog, catalog_entry};
use crate::grid::DEFAULT_GRID_COUNT;

pub type ExclusionMap = BTreeMap<(String, String), BTreeSet<usize>>;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub conditions: Vec<String>,
    pub operators: Vec<String>,
    pub t: f64,
    pub n_max: usize,
    pub grid_count: usize,
    pub exclusions: ExclusionMap,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            conditions: catalog().iter().map(|f| f.name().to_string()).collect(),
            operators: vec!["G".into(), "S".into()],
            t: 0.5,
            n_max: 11,
            grid_count: DEFAULT_GRID_COUNT,
            exclusions: default_exclusions(),
            output_dir: PathBuf::from("results"),
        }
    }
}

/// Leading n values dropped from the log-log fits of the rougher
/// high-power conditions, where the first steps are pre-asymptotic.
pub fn default_exclusions() -> ExclusionMap {
    let entries: [(&str, &str, &[usize]); 6] = [
        ("abs-sin-3/2", "G", &[1]),
        ("abs-sin-5/2", "G", &[1, 2]),
        ("abs-sin-5/2", "S", &[1, 2]),
        ("abs-sin-7/2", "G", &[1, 2]),
        ("abs-sin-7/2", "S", &[1, 2]),
        ("abs-sin-9/2", "G", &[1, 2]),
    ];
    entries
        .iter()
        .map(|(c, o, ns)| ((c.to_string(), o.to_string()), ns.iter().copied().collect()))
        .collect()
}

impl ExperimentConfig {
    pub fn exclusions_for(&self, condition: &str, operator: &str) -> BTreeSet<usize> {
        self.exclusions
            .get(&(condition.to_string(), operator.to_string()))
            .cloned()
            .unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "t must be positive, got {}",
                self.t
            )));
        }
        if self.n_max < 3 {
            return Err(Error::InvalidConfig(format!(
                "n_max must be at least 3, got {}",
                self.n_max
            )));
        }
        if self.grid_count < 2 {
            return Err(Error::InvalidConfig(format!(
                "grid_count must be at least 2, got {}",
                self.grid_count
            )));
        }
        if self.conditions.is_empty() || self.operators.is_empty() {
            return Err(Error::InvalidConfig(
                "need at least one condition and one operator".into(),
            ));
        }
        for c in &self.conditions {
            catalog_entry(c)?;
        }
        for o in &self.operators {
            ShiftChernoffOperator::by_name(o)?;
        }
        Ok(())
    }

    /// Parses a config file body on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        let mut exclude_lines = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if let Some(pair) = key.strip_prefix("exclude.") {
                exclude_lines.push((lineno + 1, pair.to_string(), value.to_string()));
                continue;
            }
            config.set(key, value).map_err(|e| match e {
                Error::InvalidConfig(msg) => {
                    Error::InvalidConfig(format!("line {}: {msg}", lineno + 1))
                }
                other => other,
            })?;
        }
        // after default_exclusions, whatever its position in the file
        for (lineno, pair, value) in exclude_lines {
            let (cond, op) = pair.rsplit_once('.').ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "line {lineno}: expected exclude.<condition>.<operator>"
                ))
            })?;
            config.set_exclusion(cond, op, parse_n_list(&value)?);
        }
        Ok(config)
    }

    /// Applies one configuration key. Used for both file lines and flags.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "conditions" => self.conditions = parse_list(value),
            "operators" => self.operators = parse_list(value),
            "t" => self.t = parse_num(key, value)?,
            "n_max" => self.n_max = parse_num(key, value)?,
            "grid_count" => self.grid_count = parse_num(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "default_exclusions" => match value {
                "true" => {
                    for (k, v) in default_exclusions() {
                        self.exclusions.entry(k).or_insert(v);
                    }
                }
                "false" => {
                    let defaults = default_exclusions();
                    self.exclusions.retain(|k, v| defaults.get(k) != Some(v));
                }
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "default_exclusions must be true or false, got '{other}'"
                    )))
                }
            },
            other => return Err(Error::InvalidConfig(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn set_exclusion(&mut self, condition: &str, operator: &str, ns: BTreeSet<usize>) {
        self.exclusions
            .insert((condition.to_string(), operator.to_string()), ns);
    }

    /// Applies a `COND:OP:n1,n2` exclusion spec.
    pub fn apply_exclusion_spec(&mut self, spec: &str) -> Result<()> {
        let mut parts = spec.splitn(3, ':');
        let (cond, op, ns) = match (parts.next(), parts.next(), parts.next()) {
            (Some(c), Some(o), Some(n)) if !c.is_empty() && !o.is_empty() => (c, o, n),
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "exclusion '{spec}' is not of the form COND:OP:n1,n2"
                )))
            }
        };
        self.set_exclusion(cond, op, parse_n_list(ns)?);
        Ok(())
    }

    /// Renders the configuration in the file format accepted by [`parse`](Self::parse).
    pub fn to_config_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("conditions = {}\n", self.conditions.join(", ")));
        out.push_str(&format!("operators = {}\n", self.operators.join(", ")));
        out.push_str(&format!("t = {}\n", self.t));
        out.push_str(&format!("n_max = {}\n", self.n_max));
        out.push_str(&format!("grid_count = {}\n", self.grid_count));
        out.push_str(&format!("output_dir = {}\n", self.output_dir.display()));
        out.push_str("default_exclusions = false\n");
        for ((c, o), ns) in &self.exclusions {
            let list: Vec<String> = ns.iter().map(|n| n.to_string()).collect();
            out.push_str(&format!("exclude.{c}.{o} = {}\n", list.join(",")));
        }
        out
    }
}

fn parse_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("{key}: cannot parse '{value}'")))
}

pub fn parse_n_list(value: &str) -> Result<BTreeSet<usize>> {
    parse_list(value)
        .iter()
        .map(|s| parse_num::<usize>("exclusion", s))
        .collect()
}
