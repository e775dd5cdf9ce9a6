use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{is_harmonized_tag, HARMONIZED_TAGS};
use crate::error::{Error, Result};

/// Mapping from source tags (or IOB classes) to the harmonized flat tags.
///
/// Lookup order: an explicit entry, then the tag itself if it is already one
/// of NEP/NEO/NEL/O, then the default. Harmonized tags are therefore fixed
/// points unless an entry says otherwise, which keeps re-application a no-op.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagMap {
    entries: BTreeMap<String, String>,
    default: Option<String>,
}

impl TagMap {
    pub fn new<I, K, V>(entries: I, default: Option<&str>) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        let entries: BTreeMap<String, String> = entries
            .into_iter()
            .map(|(k, v)| (k.into(), v.into()))
            .collect();
        for (source, target) in &entries {
            if source.is_empty() {
                return Err(Error::InvalidTagMap("empty source tag".into()));
            }
            check_target(target)?;
        }
        if let Some(d) = default {
            check_target(d)?;
        }
        Ok(TagMap {
            entries,
            default: default.map(str::to_string),
        })
    }

    pub fn get(&self, source: &str) -> Option<&str> {
        if let Some(target) = self.entries.get(source) {
            return Some(target);
        }
        if is_harmonized_tag(source) {
            return HARMONIZED_TAGS.iter().copied().find(|t| *t == source);
        }
        self.default.as_deref()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn default_target(&self) -> Option<&str> {
        self.default.as_deref()
    }

    /// Reads `source<TAB>target` lines. `#` starts a comment line and
    /// `*<TAB>target` sets the default.
    pub fn parse<R: BufRead>(source: R) -> Result<Self> {
        let mut entries = Vec::new();
        let mut default = None;
        for (idx, line) in source.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(from), Some(to), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::InvalidTagMap(format!(
                    "line {}: expected `<source><TAB><target>`",
                    idx + 1
                )));
            };
            if from == "*" {
                if default.replace(to.to_string()).is_some() {
                    return Err(Error::InvalidTagMap(format!("line {}: second default line", idx + 1)));
                }
            } else {
                entries.push((from.to_string(), to.to_string()));
            }
        }
        TagMap::new(entries, default.as_deref())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::Io(e).in_file(path))?;
        TagMap::parse(std::io::BufReader::new(file)).map_err(|e| e.in_file(path))
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}\t{v}");
        }
        if let Some(d) = &self.default {
            let _ = writeln!(out, "*\t{d}");
        }
        out
    }
}

fn check_target(target: &str) -> Result<()> {
    if is_harmonized_tag(target) {
        Ok(())
    } else {
        Err(Error::InvalidTagMap(format!(
            "target `{target}` is not one of NEP, NEO, NEL, O"
        )))
    }
}

/// IJCNLP tags: NEP/NEO/NEL kept, every other named-entity class dropped to `O`.
pub const IJCNLP_FLAT: &str = "ijcnlp_flat";
/// IIT Bombay Marathi IOB classes.
pub const IITB_IOB: &str = "iitb_iob";
/// WikiAnn IOB classes.
pub const WIKIANN_IOB: &str = "wikiann_iob";

/// The built-in maps, by name.
pub fn builtin_maps() -> BTreeMap<&'static str, TagMap> {
    let ijcnlp = TagMap::new(
        [
            ("NEP", "NEP"),
            ("NEO", "NEO"),
            ("NEL", "NEL"),
            ("NETI", "O"),
            ("NETE", "O"),
            ("NEA", "O"),
            ("NED", "O"),
            ("NEM", "O"),
            ("NEN", "O"),
            ("NETO", "O"),
            ("O", "O"),
        ],
        Some("O"),
    );
    let iitb = TagMap::new(
        [("PERSON", "NEP"), ("ORGANISATION", "NEO"), ("LOCATION", "NEL")],
        None,
    );
    let wikiann = TagMap::new([("PER", "NEP"), ("ORG", "NEO"), ("LOC", "NEL")], None);
    [(IJCNLP_FLAT, ijcnlp), (IITB_IOB, iitb), (WIKIANN_IOB, wikiann)]
        .into_iter()
        .map(|(name, map)| (name, map.expect("built-in maps are valid")))
        .collect()
}

pub fn builtin_map(name: &str) -> Option<TagMap> {
    builtin_maps().remove(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_entries() {
        let maps = builtin_maps();
        assert_eq!(maps[IJCNLP_FLAT].get("NETO"), Some("O"));
        assert_eq!(maps[IJCNLP_FLAT].get("NETI"), Some("O"));
        assert_eq!(maps[IJCNLP_FLAT].get("NEP"), Some("NEP"));
        assert_eq!(maps[IJCNLP_FLAT].get("whatever"), Some("O"));
        assert_eq!(maps[IITB_IOB].get("ORGANISATION"), Some("NEO"));
        assert_eq!(maps[IITB_IOB].get("MISC"), None);
        assert_eq!(maps[WIKIANN_IOB].get("PER"), Some("NEP"));
        assert_eq!(maps[WIKIANN_IOB].get("LOC"), Some("NEL"));
    }

    #[test]
    fn harmonized_tags_are_fixed_points() {
        let m = builtin_map(WIKIANN_IOB).unwrap();
        for t in HARMONIZED_TAGS {
            assert_eq!(m.get(t), Some(t));
        }
    }

    #[test]
    fn file_format() {
        let text = "# IJCNLP subset\nNEP\tNEP\nNETI  O\n*\tO\n";
        let m = TagMap::parse(text.as_bytes()).unwrap();
        assert_eq!(m.get("NETI"), Some("O"));
        assert_eq!(m.default_target(), Some("O"));
        assert_eq!(TagMap::parse(m.to_file_string().as_bytes()).unwrap(), m);
    }

    #[test]
    fn rejects_bad_targets_and_lines() {
        assert!(matches!(TagMap::parse("A\tPER\n".as_bytes()), Err(Error::InvalidTagMap(_))));
        assert!(matches!(TagMap::parse("A\n".as_bytes()), Err(Error::InvalidTagMap(_))));
        assert!(matches!(
            TagMap::parse("*\tO\n*\tO\n".as_bytes()),
            Err(Error::InvalidTagMap(_))
        ));
    }
}
