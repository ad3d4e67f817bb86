//! Dataset directories: one CSV per table plus a load-order manifest.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::Path;

use super::StorageError;
use crate::catalog::Database;

/// Lists table names, one per line, parents before children. Blank lines and
/// lines starting with `#` are ignored.
pub const MANIFEST_FILE: &str = "manifest.txt";

/// File name holding `table`'s rows: `/` and spaces become `_`.
pub fn csv_file_name(table: &str) -> String {
    format!("{}.csv", table.replace(['/', ' '], "_"))
}

fn read_manifest(dir: &Path) -> Result<Vec<String>, StorageError> {
    let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
    Ok(text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(str::to_owned).collect())
}

impl Database {
    /// Loads the tables listed in `dir/manifest.txt`, in manifest order.
    /// Either every file loads or the database is left untouched.
    pub fn load_dataset(&mut self, dir: &Path) -> Result<Vec<(String, usize)>, StorageError> {
        let manifest = read_manifest(dir)?;
        for name in &manifest {
            if self.table(name).is_none() {
                return Err(StorageError::Manifest(format!("unknown table `{name}`")));
            }
        }
        let snapshot = self.clone();
        let mut counts = Vec::with_capacity(manifest.len());
        for name in manifest {
            let file_name = csv_file_name(&name);
            let loaded = File::open(dir.join(&file_name))
                .map_err(StorageError::from)
                .and_then(|f| self.load_csv(&name, BufReader::new(f)));
            match loaded {
                Ok(n) => counts.push((name, n)),
                Err(e) => {
                    *self = snapshot;
                    return Err(StorageError::InFile { file: file_name, source: Box::new(e) });
                }
            }
        }
        Ok(counts)
    }

    /// Writes every table and a manifest in dependency order into `dir`.
    pub fn save_dataset(&self, dir: &Path) -> Result<(), StorageError> {
        fs::create_dir_all(dir)?;
        let order = self.load_order();
        for name in &order {
            let file = File::create(dir.join(csv_file_name(name)))?;
            self.dump_csv(name, BufWriter::new(file))?;
        }
        let mut manifest = order.join("\n");
        manifest.push('\n');
        fs::write(dir.join(MANIFEST_FILE), manifest)?;
        Ok(())
    }
}
