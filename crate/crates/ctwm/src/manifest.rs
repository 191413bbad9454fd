//! Flat `key=value` run manifests written next to command outputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};
use crate::fsutil::write_atomic;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    entries: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        let mut m = Self::default();
        m.set("command", command);
        m.set("version", env!("CARGO_PKG_VERSION"));
        m
    }

    /// Line breaks in values are replaced by spaces.
    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        let value = value.to_string().replace(['\n', '\r'], " ");
        self.entries.insert(key.to_string(), value);
        self
    }

    pub fn set_path(&mut self, key: &str, path: &Path) -> &mut Self {
        self.set(key, path.display())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Sorted `key=value` lines.
    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut m = Self::default();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Format(format!("manifest line without '=': {line:?}")))?;
            m.entries.insert(k.to_string(), v.to_string());
        }
        Ok(m)
    }

    /// `<output>.manifest`.
    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest");
        PathBuf::from(name)
    }

    pub fn write_next_to(&self, output: &Path) -> CliResult<PathBuf> {
        let path = Self::path_for(output);
        write_atomic(&path, self.to_text().as_bytes())?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_roundtrip_is_sorted() {
        let mut m = Manifest::new("compress");
        m.set("seed", 7).set("config", "2,1,2").set("note", "a\nb");
        let text = m.to_text();
        let keys: Vec<&str> = text.lines().map(|l| l.split('=').next().unwrap()).collect();
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        assert_eq!(keys, sorted);
        assert_eq!(Manifest::parse(&text).unwrap(), m);
        assert_eq!(m.get("note"), Some("a b"));
        assert!(Manifest::parse("novalue").is_err());
    }

    #[test]
    fn sits_next_to_output() {
        assert_eq!(
            Manifest::path_for(Path::new("out/x.ctc")),
            PathBuf::from("out/x.ctc.manifest")
        );
    }
}
