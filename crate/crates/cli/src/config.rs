//! Optional TOML configuration.
//!
//! Top-level keys `jobs` and `format` apply to every command. Each command
//! reads its own table (`[check-class]`, `[build-limit]`, `[verify.galois]`
//! and so on). Flags given on the command line win.

use std::path::Path;

use galoiswb::{Error, Result};
use toml::{Table, Value};

#[derive(Debug, Clone, Default)]
pub struct Config {
    table: Table,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::ClassFile(format!("{}: {e}", path.display())))?;
        let table = text.parse::<Table>().map_err(|e| Error::ClassFile(format!("{}: {e}", path.display())))?;
        Ok(Config { table })
    }

    fn lookup(&self, section: &[&str], key: &str) -> Option<&Value> {
        let mut t = &self.table;
        for s in section {
            t = t.get(*s)?.as_table()?;
        }
        t.get(key)
    }

    pub fn usize(&self, section: &[&str], key: &str) -> Result<Option<usize>> {
        match self.lookup(section, key) {
            None => Ok(None),
            Some(v) => v
                .as_integer()
                .filter(|&n| n > 0)
                .map(|n| Some(n as usize))
                .ok_or_else(|| Error::ClassFile(format!("`{key}` must be a positive integer"))),
        }
    }

    pub fn string(&self, section: &[&str], key: &str) -> Result<Option<String>> {
        match self.lookup(section, key) {
            None => Ok(None),
            Some(v) => v
                .as_str()
                .map(|s| Some(s.to_string()))
                .ok_or_else(|| Error::ClassFile(format!("`{key}` must be a string"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_sections() {
        let table = "jobs = 2\n[verify.galois]\nsize = 3\nclass = \"sets\"\n".parse::<Table>().unwrap();
        let c = Config { table };
        assert_eq!(c.usize(&[], "jobs").unwrap(), Some(2));
        assert_eq!(c.usize(&["verify", "galois"], "size").unwrap(), Some(3));
        assert_eq!(c.string(&["verify", "galois"], "class").unwrap().as_deref(), Some("sets"));
        assert_eq!(c.usize(&["verify", "atoms"], "size").unwrap(), None);
        assert!(c.string(&[], "jobs").is_err());
    }
}
