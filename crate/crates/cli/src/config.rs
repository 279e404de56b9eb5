//! `key = value` config files, merged under the command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use brjuno::exec::ExecMode;
use brjuno::upsilon::Budget;

use crate::args::Common;
use crate::failure::Failure;

const KEYS: &[&str] = &[
    "precision-bits",
    "series-n",
    "tol",
    "qcap",
    "out",
    "svg",
    "sequential",
    "lo",
    "hi",
    "grid",
    "flavor",
    "count",
    "n-max",
];

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Failure::usage(format!(
                    "config line {}: expected key=value",
                    lineno + 1
                )));
            };
            let key = k.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(Failure::usage(format!(
                    "config line {}: unknown key `{key}`",
                    lineno + 1
                )));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// The flag if given, else the file entry, else `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, Failure> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.raw(key) {
            Some(text) => text
                .parse()
                .map_err(|_| Failure::usage(format!("config `{key}`: cannot parse `{text}`"))),
            None => Ok(default),
        }
    }
}

#[derive(Debug)]
pub struct Settings {
    pub budget: Budget,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub exec: ExecMode,
    pub file: ConfigFile,
}

impl Settings {
    pub fn resolve(common: &Common) -> Result<Self, Failure> {
        let file = match &common.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let defaults = Budget::default();
        let budget = Budget {
            series_n: file.pick(common.series_n, "series-n", defaults.series_n)?,
            tol: file.pick(common.tol, "tol", defaults.tol)?,
            n_max: file.pick(None, "n-max", defaults.n_max)?,
            q_cap: file.pick(common.qcap, "qcap", defaults.q_cap)?,
            precision_bits: file.pick(
                common.precision_bits,
                "precision-bits",
                defaults.precision_bits,
            )?,
        };
        if budget.series_n == 0 || budget.q_cap == 0 || budget.precision_bits < 64 {
            return Err(Failure::usage(
                "series-n and qcap must be positive, precision-bits at least 64",
            ));
        }
        if !(budget.tol > 0.0 && budget.tol.is_finite()) {
            return Err(Failure::usage("tol must be positive"));
        }
        let sequential = common.sequential || file.pick(None, "sequential", false)?;
        Ok(Self {
            budget,
            out: common
                .out
                .clone()
                .or_else(|| file.raw("out").map(PathBuf::from)),
            svg: common
                .svg
                .clone()
                .or_else(|| file.raw("svg").map(PathBuf::from)),
            exec: if sequential {
                ExecMode::Sequential
            } else {
                ExecMode::default()
            },
            file,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = ConfigFile::parse("tol = 1e-6\n# comment\nseries_n=512\n").unwrap();
        assert_eq!(file.pick(None, "tol", 1e-8).unwrap(), 1e-6);
        assert_eq!(file.pick(Some(1e-9), "tol", 1e-8).unwrap(), 1e-9);
        assert_eq!(file.pick(None, "series-n", 4096usize).unwrap(), 512);
        assert_eq!(file.pick(None, "qcap", 12u32).unwrap(), 12);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lines() {
        assert!(ConfigFile::parse("colour = red").is_err());
        assert!(ConfigFile::parse("tol").is_err());
        let file = ConfigFile::parse("tol = abc").unwrap();
        assert!(file.pick(None, "tol", 1e-8).is_err());
    }
}
