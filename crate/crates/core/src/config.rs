// Copyright 2026 The memorymodes Authors
// SPDX-License-Identifier: Apache-2.0

//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{ConfigIssue, Error, Result};
use crate::model::{BandGapModel, LorentzianModel, ReservoirModel, TimeGrid, Validation};

const LORENTZIAN_KEYS: &[&str] = &["omega0", "omega_c", "gamma", "omega_coupling"];
const BANDGAP_KEYS: &[&str] = &["omega0", "omega_c", "w1", "w2", "gamma1", "gamma2", "omega_coupling"];
const GRID_KEYS: &[&str] = &["t_end", "n_steps"];
const OPTIONAL_KEYS: &[&str] = &["t_start", "seed", "n"];

/// A fully parsed and validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub model: ReservoirModel,
    pub grid: TimeGrid,
    pub seed: Option<u64>,
    pub n: Option<u64>,
    /// Non-fatal consistency warnings.
    pub warnings: Vec<String>,
    /// Keys and raw values in file order.
    pub entries: Vec<(String, String)>,
}

struct Entry {
    line: usize,
    value: String,
}

fn parse_lines(text: &str, issues: &mut Vec<ConfigIssue>) -> BTreeMap<String, Entry> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            issues.push(ConfigIssue { line: Some(line), message: format!("expected `key = value`, found `{content}`") });
            continue;
        };
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if k.is_empty() || v.is_empty() {
            issues.push(ConfigIssue { line: Some(line), message: "empty key or value".into() });
            continue;
        }
        if let Some(prev) = map.get::<str>(&k) {
            let prev: &Entry = prev;
            issues.push(ConfigIssue { line: Some(line), message: format!("duplicate key `{k}` (first set on line {})", prev.line) });
            continue;
        }
        map.insert(k, Entry { line, value: v });
    }
    map
}

fn number<T: std::str::FromStr>(map: &BTreeMap<String, Entry>, key: &str, issues: &mut Vec<ConfigIssue>) -> Option<T> {
    let e = map.get(key)?;
    match e.value.parse::<T>() {
        Ok(v) => Some(v),
        Err(_) => {
            issues.push(ConfigIssue { line: Some(e.line), message: format!("`{key}`: cannot parse `{}`", e.value) });
            None
        }
    }
}

fn issue_from(e: Error) -> ConfigIssue {
    ConfigIssue { line: None, message: e.to_string() }
}

/// Parses and validates config text, collecting every problem.
pub fn parse_config(text: &str, validation: Validation) -> Result<ModelConfig> {
    let mut issues = Vec::new();
    let map = parse_lines(text, &mut issues);
    let kind = map.get("model").map(|e| (e.value.as_str(), e.line));
    let model_keys = match kind {
        Some(("lorentzian", _)) => Some(LORENTZIAN_KEYS),
        Some(("bandgap", _)) => Some(BANDGAP_KEYS),
        Some((other, line)) => {
            issues.push(ConfigIssue {
                line: Some(line),
                message: format!("`model` must be `lorentzian` or `bandgap`, found `{other}`"),
            });
            None
        }
        None => {
            issues.push(ConfigIssue { line: None, message: "missing required key `model`".into() });
            None
        }
    };
    let required: Vec<&str> = model_keys.unwrap_or(&[]).iter().chain(GRID_KEYS).copied().collect();
    for key in &required {
        if !map.contains_key(*key) {
            issues.push(ConfigIssue { line: None, message: format!("missing required key `{key}`") });
        }
    }
    for (key, e) in &map {
        let known = key == "model" || required.contains(&key.as_str()) || OPTIONAL_KEYS.contains(&key.as_str());
        let other_model = LORENTZIAN_KEYS.contains(&key.as_str()) || BANDGAP_KEYS.contains(&key.as_str());
        if !known && !(model_keys.is_none() && other_model) {
            let message = if other_model {
                format!("key `{key}` does not apply to model `{}`", kind.map(|k| k.0).unwrap_or(""))
            } else {
                format!("unknown key `{key}`")
            };
            issues.push(ConfigIssue { line: Some(e.line), message });
        }
    }

    let mut f = |key: &str| number::<f64>(&map, key, &mut issues);
    let values: BTreeMap<&str, Option<f64>> = LORENTZIAN_KEYS
        .iter()
        .chain(BANDGAP_KEYS)
        .chain(&["t_end", "t_start"])
        .map(|k| (*k, f(k)))
        .collect();
    let n_steps = number::<usize>(&map, "n_steps", &mut issues);
    let seed = number::<u64>(&map, "seed", &mut issues);
    let n = number::<u64>(&map, "n", &mut issues);
    if n == Some(0) {
        issues.push(ConfigIssue { line: map.get("n").map(|e| e.line), message: "`n` must be at least 1".into() });
    }
    let v = |k: &str| values.get(k).copied().flatten();

    let grid = match (v("t_end"), n_steps) {
        (Some(t_end), Some(steps)) => TimeGrid::new(v("t_start").unwrap_or(0.0), t_end, steps)
            .map_err(|e| issues.push(issue_from(e)))
            .ok(),
        _ => None,
    };

    let mut warnings = Vec::new();
    let mut physical = Vec::new();
    let model = match kind.map(|k| k.0) {
        Some("lorentzian") => match (v("omega0"), v("omega_c"), v("gamma"), v("omega_coupling")) {
            (Some(w0), Some(wc), Some(g), Some(c)) => match LorentzianModel::new(w0, wc, g, c) {
                Ok(m) => Some(ReservoirModel::Lorentzian(m)),
                Err(e) => {
                    physical.push(e);
                    None
                }
            },
            _ => None,
        },
        Some("bandgap") => {
            let p: Option<Vec<f64>> = BANDGAP_KEYS.iter().map(|k| v(k)).collect();
            p.and_then(|p| {
                let m = BandGapModel { omega0: p[0], omega_c: p[1], w1: p[2], w2: p[3], gamma1: p[4], gamma2: p[5], coupling: p[6] };
                let errs = m.violations(validation);
                if errs.is_empty() {
                    warnings.extend(m.normalization_warning());
                    Some(ReservoirModel::BandGap(m))
                } else {
                    physical.extend(errs);
                    None
                }
            })
        }
        _ => None,
    };

    if issues.is_empty() && !physical.is_empty() && physical.iter().all(|e| matches!(e, Error::NonPhysical(_))) {
        let msgs: Vec<String> = physical
            .into_iter()
            .map(|e| match e {
                Error::NonPhysical(m) => m,
                other => other.to_string(),
            })
            .collect();
        return Err(Error::NonPhysical(msgs.join("; ")));
    }
    issues.extend(physical.into_iter().map(issue_from));
    if !issues.is_empty() {
        issues.sort_by_key(|i| i.line.unwrap_or(usize::MAX));
        return Err(Error::Config { issues });
    }
    let mut entries: Vec<(usize, String, String)> = map.into_iter().map(|(k, e)| (e.line, k, e.value)).collect();
    entries.sort();
    Ok(ModelConfig {
        model: model.expect("validated"),
        grid: grid.expect("validated"),
        seed,
        n,
        warnings,
        entries: entries.into_iter().map(|(_, k, v)| (k, v)).collect(),
    })
}

/// Reads and validates a config file.
pub fn validate_config(path: &Path, validation: Validation) -> Result<ModelConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_config(&text, validation)
}
