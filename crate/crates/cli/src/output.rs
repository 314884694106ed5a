//! Buffered CSV/JSON artifacts, written only once a command has finished.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// Shortest representation that parses back to the same value, switching to
/// exponent notation for very small or very large magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn add_csv(&mut self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
        self.files.push((name.to_string(), bytes));
        Ok(())
    }

    pub fn add_json<S: Serialize>(&mut self, name: &str, value: &S) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.files.push((name.to_string(), bytes));
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }

    /// Writes every file into `dir`, each through a temporary file and a
    /// rename so readers never see a partial file.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("cannot create {}: {e}", dir.display())))?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            let tmp = dir.join(format!(".{name}.tmp"));
            std::fs::write(&tmp, bytes)?;
            std::fs::rename(&tmp, &path)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Column names `{prefix}_0 … {prefix}_{n-1}`.
pub fn coord_columns(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}_{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_are_buffered() {
        let mut a = Artifacts::default();
        a.add_csv("x.csv", &["a".into(), "b".into()], &[vec![num(0.1), num(2.0)]]).unwrap();
        assert_eq!(num(6.5e-14), "6.5e-14");
        #[derive(Serialize)]
        struct S {
            z: u8,
            a: u8,
        }
        a.add_json("s.json", &S { z: 1, a: 2 }).unwrap();
        assert_eq!(a.get("x.csv").unwrap(), b"a,b\n0.1,2.0\n");
        let json = String::from_utf8(a.get("s.json").unwrap().to_vec()).unwrap();
        assert!(json.find("\"z\"").unwrap() < json.find("\"a\"").unwrap(), "field order is kept");
        let dir = tempfile::tempdir().unwrap();
        let paths = a.write_to(&dir.path().join("nested")).unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(std::fs::read(&paths[0]).unwrap(), b"a,b\n0.1,2.0\n");
    }
}
