use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::core::{ClassVocabulary, RosterVector};
use crate::error::{Error, Result};

/// Game rosters, `{"home": [...], "away": [...]}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rosters {
    pub home: BTreeSet<u8>,
    pub away: BTreeSet<u8>,
}

impl Rosters {
    /// Home and away roster vectors, validated against `vocab`.
    pub fn vectors(&self, vocab: &ClassVocabulary) -> Result<(RosterVector, RosterVector)> {
        Ok((
            RosterVector::build(&self.home, vocab)?,
            RosterVector::build(&self.away, vocab)?,
        ))
    }
}

pub fn load_rosters(path: impl AsRef<Path>) -> Result<Rosters> {
    read_json(path.as_ref())
}

pub fn save_rosters(path: impl AsRef<Path>, rosters: &Rosters) -> Result<()> {
    write_json(path.as_ref(), rosters)
}

/// Reads a JSON list of jersey numbers.
pub fn load_vocabulary(path: impl AsRef<Path>) -> Result<ClassVocabulary> {
    let labels: Vec<u8> = read_json(path.as_ref())?;
    ClassVocabulary::new(labels)
}

pub fn save_vocabulary(path: impl AsRef<Path>, vocab: &ClassVocabulary) -> Result<()> {
    write_json(path.as_ref(), &vocab.labels())
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::json(path, e))
}

pub(crate) fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::json(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roster_and_vocab_files() {
        let dir = tempfile::tempdir().unwrap();
        let rp = dir.path().join("rosters.json");
        std::fs::write(&rp, r#"{"home": [12, 88], "away": []}"#).unwrap();
        let rosters = load_rosters(&rp).unwrap();
        let vp = dir.path().join("vocab.json");
        std::fs::write(&vp, "[12, 34, 88]").unwrap();
        let vocab = load_vocabulary(&vp).unwrap();
        let (h, a) = rosters.vectors(&vocab).unwrap();
        assert_eq!(h.as_bits(), vec![1, 0, 1, 1]);
        assert_eq!(a.as_bits(), vec![0, 0, 0, 1]);

        std::fs::write(&vp, "[12, 12]").unwrap();
        assert!(load_vocabulary(&vp).is_err());
    }
}
