//! Run configuration: `key = value` files, command-line overrides and
//! named profiles, resolved into typed settings.
//!
//! Precedence, lowest first: profile defaults, config file, flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use kdv_core::harness::{rough_data, DataDescriptor, RoughDataSpec};
use kdv_core::schemes::smooth_profile;
use kdv_core::{Dealias, Field, Scheme, SobolevIndex, SpectralGrid};

use crate::error::{CliError, CliResult};
use crate::field_io::read_field;

/// Every recognized key. Flags use the same names with a `--` prefix.
pub const KEYS: &[&str] = &[
    "scheme", "tau", "T", "N", "theta", "seed", "gamma", "tau-list", "tau-ref", "dealias", "jobs", "out",
    "profile", "data", "input", "cache-dir",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Profile {
    /// N = 1024, T = 1.
    #[default]
    Desk,
    /// N = 4096, T = 2.
    Paper,
}

impl Profile {
    fn defaults(self) -> [(&'static str, &'static str); 4] {
        let taus = "2^-4,2^-5,2^-6,2^-7,2^-8,2^-9";
        match self {
            Profile::Desk => [("N", "1024"), ("T", "1"), ("tau-list", taus), ("tau-ref", "2^-13")],
            Profile::Paper => [("N", "4096"), ("T", "2"), ("tau-list", taus), ("tau-ref", "2^-13")],
        }
    }
}

impl FromStr for Profile {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            other => Err(CliError::config(format!("unknown profile '{other}' (expected desk or paper)"))),
        }
    }
}

/// Resolved key-value settings.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
    /// Keys set by a config file or flag rather than a profile default.
    explicit: Vec<String>,
}

fn check_key(key: &str) -> CliResult<()> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(CliError::config(format!("unknown key '{key}'")))
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("line {}: expected key = value", i + 1)))?;
        let key = key.trim();
        check_key(key).map_err(|e| CliError::config(format!("line {}: {e}", i + 1)))?;
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

/// Parses a positive step size, accepting `2^-k` as well as decimals.
pub fn parse_step(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.strip_prefix("2^") {
        Some(exp) => exp
            .parse::<i32>()
            .map(|k| 2f64.powi(k))
            .map_err(|e| format!("bad exponent in '{s}': {e}"))?,
        None => s.parse::<f64>().map_err(|e| format!("bad number '{s}': {e}"))?,
    };
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(format!("step must be positive and finite, got '{s}'"))
    }
}

impl Settings {
    /// Layers `file` (if any) and then `overrides` over the defaults of the
    /// selected profile.
    pub fn resolve(file: Option<&Path>, overrides: &[(&str, Option<String>)]) -> CliResult<Self> {
        let from_file = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::file(path, e))?;
                parse_config(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?
            }
            None => BTreeMap::new(),
        };
        let mut flags = BTreeMap::new();
        for (key, value) in overrides {
            check_key(key)?;
            if let Some(v) = value {
                flags.insert(key.to_string(), v.clone());
            }
        }
        let profile: Profile = flags
            .get("profile")
            .or_else(|| from_file.get("profile"))
            .map(|s| s.parse())
            .transpose()?
            .unwrap_or_default();
        let mut values: BTreeMap<String, String> = profile
            .defaults()
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let explicit = from_file.keys().chain(flags.keys()).cloned().collect();
        values.extend(from_file);
        values.extend(flags);
        Ok(Self { values, explicit })
    }

    pub fn from_pairs(pairs: &[(&str, &str)]) -> CliResult<Self> {
        let overrides: Vec<(&str, Option<String>)> = pairs.iter().map(|(k, v)| (*k, Some(v.to_string()))).collect();
        Self::resolve(None, &overrides)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.raw(key)
            .map(|s| {
                s.parse::<T>()
                    .map_err(|e| CliError::config(format!("{key}: cannot parse '{s}': {e}")))
            })
            .transpose()
    }

    fn required<T: FromStr>(&self, key: &str) -> CliResult<T>
    where
        T::Err: fmt::Display,
    {
        self.parsed(key)?
            .ok_or_else(|| CliError::config(format!("missing required setting '{key}'")))
    }

    pub fn scheme(&self) -> CliResult<Scheme> {
        Ok(self.parsed("scheme")?.unwrap_or(Scheme::Lri2))
    }

    /// Comma-separated scheme list; all schemes when unset.
    pub fn schemes(&self) -> CliResult<Vec<Scheme>> {
        match self.raw("scheme") {
            None => Ok(Scheme::ALL.to_vec()),
            Some(s) => s
                .split(',')
                .map(|x| x.parse::<Scheme>().map_err(|e| CliError::config(e.to_string())))
                .collect(),
        }
    }

    pub fn tau(&self) -> CliResult<f64> {
        let s = self.raw("tau").ok_or_else(|| CliError::config("missing required setting 'tau'"))?;
        parse_step(s).map_err(|e| CliError::config(format!("tau: {e}")))
    }

    pub fn tau_ref(&self) -> CliResult<f64> {
        let s = self
            .raw("tau-ref")
            .ok_or_else(|| CliError::config("missing required setting 'tau-ref'"))?;
        parse_step(s).map_err(|e| CliError::config(format!("tau-ref: {e}")))
    }

    pub fn tau_list(&self) -> CliResult<Vec<f64>> {
        let s = self.raw("tau-list").unwrap_or("");
        let taus = s
            .split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(|x| parse_step(x).map_err(|e| CliError::config(format!("tau-list: {e}"))))
            .collect::<CliResult<Vec<f64>>>()?;
        if taus.is_empty() {
            return Err(CliError::config("tau-list is empty"));
        }
        Ok(taus)
    }

    pub fn t_final(&self) -> CliResult<f64> {
        let t: f64 = self.required("T")?;
        if t.is_finite() && t > 0.0 {
            Ok(t)
        } else {
            Err(CliError::config(format!("T must be positive, got {t}")))
        }
    }

    pub fn n(&self) -> CliResult<usize> {
        self.required("N")
    }

    pub fn theta(&self) -> CliResult<Option<f64>> {
        self.parsed("theta")
    }

    pub fn seed(&self) -> CliResult<u64> {
        Ok(self.parsed("seed")?.unwrap_or(1))
    }

    pub fn gamma(&self) -> CliResult<SobolevIndex> {
        let g: f64 = self.parsed("gamma")?.unwrap_or(0.0);
        Ok(SobolevIndex::new(g)?)
    }

    pub fn dealias(&self) -> CliResult<Dealias> {
        match self.raw("dealias") {
            None | Some("off") => Ok(Dealias::Off),
            Some("on") => Ok(Dealias::ThreeHalves),
            Some(other) => Err(CliError::config(format!("dealias must be on or off, got '{other}'"))),
        }
    }

    /// Worker threads; 0 or unset lets the pool decide.
    pub fn jobs(&self) -> CliResult<usize> {
        Ok(self.parsed("jobs")?.unwrap_or(0))
    }

    pub fn out(&self) -> Option<PathBuf> {
        self.raw("out").map(PathBuf::from)
    }

    pub fn cache_dir(&self) -> Option<PathBuf> {
        self.raw("cache-dir").map(PathBuf::from)
    }

    pub fn rough_spec(&self) -> CliResult<RoughDataSpec> {
        let theta = self
            .theta()?
            .ok_or_else(|| CliError::config("missing required setting 'theta'"))?;
        Ok(RoughDataSpec::new(self.n()?, theta, self.seed()?)?)
    }

    /// The initial datum: a field file (`input`), a named profile (`data`)
    /// on an `N`-point grid, or rough random data when `theta` is set.
    pub fn initial_datum(&self) -> CliResult<(Field, DataDescriptor)> {
        if let Some(path) = self.raw("input") {
            // only an explicitly requested N constrains the file
            let expected = self.explicit.iter().any(|k| k == "N").then(|| self.n()).transpose()?;
            let field = read_field(Path::new(path), expected)?;
            return Ok((field, DataDescriptor::Named(format!("file:{path}"))));
        }
        let rough = || -> CliResult<(Field, DataDescriptor)> {
            let spec = self.rough_spec()?;
            Ok((rough_data(&spec)?, DataDescriptor::Rough(spec)))
        };
        match self.raw("data") {
            Some("rough") => rough(),
            None if self.raw("theta").is_some() => rough(),
            Some(name) => {
                let grid = SpectralGrid::new(self.n()?)?;
                let field = match name {
                    "smooth" => smooth_profile(&grid),
                    "cosine" => Field::from_fn(&grid, f64::cos),
                    "zero" => Field::zeros(&grid),
                    other => {
                        return Err(CliError::config(format!(
                            "unknown data '{other}' (expected smooth, cosine, zero or rough)"
                        )))
                    }
                };
                Ok((field, DataDescriptor::Named(name.to_string())))
            }
            None => Err(CliError::config(
                "no initial datum: set input, data, or theta for rough data",
            )),
        }
    }
}
