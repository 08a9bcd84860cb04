//! Persistent result cache: one CSV file per command family, rows
//! `tool_version,key...,value`. Writers hold an advisory lock on the directory.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

pub const ENV_VAR: &str = "QUIDDITY_CACHE_DIR";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct Cache {
    dir: PathBuf,
}

/// `--cache-dir`, else the environment variable, else the user cache directory.
pub fn resolve_dir(flag: Option<&Path>) -> Option<PathBuf> {
    if let Some(p) = flag {
        return Some(p.to_path_buf());
    }
    if let Some(p) = std::env::var_os(ENV_VAR).filter(|p| !p.is_empty()) {
        return Some(PathBuf::from(p));
    }
    let base = std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))?;
    Some(base.join("quiddity"))
}

impl Cache {
    pub fn open(dir: PathBuf) -> io::Result<Self> {
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    fn family_path(&self, family: &str) -> PathBuf {
        self.dir.join(format!("{family}.csv"))
    }

    fn lock(&self) -> io::Result<File> {
        let f = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(self.dir.join(".lock"))?;
        f.lock()?;
        Ok(f)
    }

    pub fn get(&self, family: &str, key: &[String]) -> Option<String> {
        let _guard = self.lock().ok()?;
        let file = File::open(self.family_path(family)).ok()?;
        BufReader::new(file)
            .lines()
            .map_while(|l| l.ok())
            .find_map(|line| {
                let fields: Vec<&str> = line.split(',').collect();
                let (value, head) = fields.split_last()?;
                let matches = head.len() == key.len() + 1
                    && head[0] == TOOL_VERSION
                    && head[1..].iter().zip(key).all(|(a, b)| *a == b.as_str());
                matches.then(|| value.to_string())
            })
    }

    pub fn put(&self, family: &str, key: &[String], value: &str) -> io::Result<()> {
        let _guard = self.lock()?;
        let path = self.family_path(family);
        let fresh = !path.exists();
        let mut f = OpenOptions::new().create(true).append(true).open(&path)?;
        if fresh {
            let cols: Vec<String> = (0..key.len()).map(|i| format!("key{i}")).collect();
            writeln!(f, "tool_version,{},value", cols.join(","))?;
        }
        writeln!(f, "{TOOL_VERSION},{},{value}", key.join(","))
    }
}

/// Key fields must not contain the separator.
pub fn key_field(s: impl ToString) -> String {
    s.to_string().replace(',', ";")
}
