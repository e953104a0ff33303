//! Flag/file/default resolution and the resolved-config snapshot.
//!
//! The config file is flat `key = value` text whose keys mirror the long
//! flag names. Precedence is flag, then file, then built-in default; the
//! fully resolved settings of every run are written next to its outputs
//! as `run-config.txt`.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::errors::CliError;

pub fn load_config_file(path: Option<&Path>) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    let Some(path) = path else {
        return Ok(map);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::usage(format!(
                "{}:{}: expected `key = value`, got `{line}`",
                path.display(),
                idx + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Applies flag > file > default precedence and records every resolved
/// value for the snapshot.
pub struct Resolver<'a> {
    file: &'a BTreeMap<String, String>,
    command: &'static str,
    snapshot: BTreeMap<String, String>,
}

impl<'a> Resolver<'a> {
    pub fn new(command: &'static str, file: &'a BTreeMap<String, String>) -> Self {
        Self {
            file,
            command,
            snapshot: BTreeMap::new(),
        }
    }

    fn from_file<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        match self.file.get(key) {
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                CliError::usage(format!("config key `{key}`: bad value `{raw}`: {e}"))
            }),
            None => Ok(None),
        }
    }

    /// Resolve an optional setting with a built-in default.
    pub fn get<T: FromStr + Display>(
        &mut self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => v,
            None => self.from_file(key)?.unwrap_or(default),
        };
        self.snapshot.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    /// Resolve a setting that has no default and must come from the flag
    /// or the file.
    pub fn require<T: FromStr + Display>(
        &mut self,
        key: &str,
        flag: Option<T>,
    ) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => v,
            None => self
                .from_file(key)?
                .ok_or_else(|| CliError::usage(format!("missing required setting `--{key}`")))?,
        };
        self.snapshot.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    /// Boolean flags: true on the command line wins; otherwise the file
    /// value; otherwise false.
    pub fn flag(&mut self, key: &str, flag: bool) -> Result<bool, CliError> {
        let value = if flag { true } else { self.from_file(key)?.unwrap_or(false) };
        self.snapshot.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    pub fn note(&mut self, key: &str, value: impl Display) {
        self.snapshot.insert(key.to_string(), value.to_string());
    }

    /// Worker count: flag, then `CTRLROB_WORKERS`, then the file, then
    /// available parallelism.
    pub fn workers(&mut self, flag: Option<usize>) -> Result<usize, CliError> {
        let value = match flag {
            Some(v) => v,
            None => match std::env::var("CTRLROB_WORKERS") {
                Ok(raw) => raw.parse().map_err(|e| {
                    CliError::usage(format!("CTRLROB_WORKERS: bad value `{raw}`: {e}"))
                })?,
                Err(_) => match self.from_file("workers")? {
                    Some(v) => v,
                    None => std::thread::available_parallelism().map_or(1, |n| n.get()),
                },
            },
        };
        if value == 0 {
            return Err(CliError::usage("workers must be at least 1"));
        }
        self.snapshot.insert("workers".into(), value.to_string());
        Ok(value)
    }

    /// Write the resolved snapshot into the output directory.
    pub fn write_snapshot(&self, out_dir: &Path) -> Result<(), CliError> {
        use std::fmt::Write as _;
        let mut text = format!("command = {}\n", self.command);
        for (key, value) in &self.snapshot {
            let _ = writeln!(text, "{key} = {value}");
        }
        std::fs::create_dir_all(out_dir)?;
        std::fs::write(out_dir.join("run-config.txt"), text)?;
        Ok(())
    }
}

/// Directory resolution shared by all commands.
pub fn resolve_out_dir(
    resolver: &mut Resolver<'_>,
    flag: Option<PathBuf>,
) -> Result<PathBuf, CliError> {
    let out = match flag {
        Some(p) => p,
        None => PathBuf::from(
            resolver
                .from_file::<String>("out-dir")?
                .unwrap_or_else(|| ".".to_string()),
        ),
    };
    resolver.note("out-dir", out.display());
    Ok(out)
}

/// Fingerprint of every built-in default, printed by `--version`.
pub fn defaults_fingerprint() -> u64 {
    let text = format!(
        "strategy=ra kind=structural tol={} seed=0 count=1 instances=10 \
         topologies=er,sf,qsn,sw sigma={} theta={} rq={} sw_k={} \
         epochs=10 lr=0.005 beta1=0.9 beta2=0.999 eps=1e-8 loss=l1 \
         fc2=256/1024/4096 groups=clamp(log2-3,3,7)",
        ctrlrob_core::control::DEFAULT_RANK_TOL,
        ctrlrob_core::netgen::DEFAULT_SF_SIGMA,
        ctrlrob_core::netgen::DEFAULT_SF_THETA,
        ctrlrob_core::netgen::DEFAULT_QSN_RQ,
        ctrlrob_core::netgen::DEFAULT_SW_K,
    );
    fnv64(text.as_bytes())
}

fn fnv64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
