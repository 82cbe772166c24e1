use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::term::check_token;
use super::DrsError;

/// WordNet part of speech carried by a synset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pos {
    #[serde(rename = "n")]
    Noun,
    #[serde(rename = "v")]
    Verb,
    #[serde(rename = "a")]
    Adjective,
    #[serde(rename = "r")]
    Adverb,
}

impl Pos {
    pub const ALL: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adjective, Pos::Adverb];

    pub fn from_letter(c: &str) -> Option<Pos> {
        match c {
            "n" => Some(Pos::Noun),
            "v" => Some(Pos::Verb),
            "a" => Some(Pos::Adjective),
            "r" => Some(Pos::Adverb),
            _ => None,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pos::Noun => 'n',
            Pos::Verb => 'v',
            Pos::Adjective => 'a',
            Pos::Adverb => 'r',
        }
    }
}

/// A sense-disambiguated concept, rendered `lemma.pos.sense` (`climb_up.v.01`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SynsetId {
    lemma: String,
    pos: Pos,
    sense: u8,
}

fn malformed(text: &str, reason: &'static str) -> DrsError {
    DrsError::MalformedSynset { text: text.to_string(), reason }
}

fn parse_sense(text: &str, sense: &str) -> Result<u8, DrsError> {
    if sense.len() != 2 || !sense.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed(text, "sense must be two digits"));
    }
    Ok(sense.parse().expect("two ascii digits"))
}

impl SynsetId {
    pub fn new(lemma: &str, pos: Pos, sense: u8) -> Result<Self, DrsError> {
        check_token(lemma, "lemma")?;
        if lemma.contains('"') {
            return Err(malformed(lemma, "lemma contains a quote"));
        }
        if sense > 99 {
            return Err(malformed(lemma, "sense must be two digits"));
        }
        Ok(SynsetId { lemma: lemma.to_string(), pos, sense })
    }

    /// Parses `lemma.pos.sense`. The lemma may itself contain dots.
    pub fn parse(text: &str) -> Result<Self, DrsError> {
        let mut parts = text.rsplitn(3, '.');
        let sense = parts.next().unwrap_or_default();
        let (Some(pos), Some(lemma)) = (parts.next(), parts.next()) else {
            return Err(malformed(text, "expected lemma.pos.sense"));
        };
        if lemma.is_empty() {
            return Err(malformed(text, "empty lemma"));
        }
        let pos = Pos::from_letter(pos).ok_or_else(|| malformed(text, "part of speech must be n, v, a or r"))?;
        let sense = parse_sense(text, sense)?;
        Self::new(lemma, pos, sense).map_err(|_| malformed(text, "invalid lemma"))
    }

    /// Builds a synset from a concept clause's lemma and its quoted sense
    /// constant, e.g. `male` and `"n.02"`.
    pub fn from_concept(lemma: &str, sense_constant: &str) -> Result<Self, DrsError> {
        let inner = sense_constant
            .strip_prefix('"')
            .and_then(|s| s.strip_suffix('"'))
            .ok_or_else(|| malformed(sense_constant, "sense constant must be quoted"))?;
        let (pos, sense) = inner
            .split_once('.')
            .ok_or_else(|| malformed(sense_constant, "expected \"pos.sense\""))?;
        let pos = Pos::from_letter(pos).ok_or_else(|| malformed(sense_constant, "part of speech must be n, v, a or r"))?;
        let sense = parse_sense(sense_constant, sense)?;
        Self::new(lemma, pos, sense)
    }

    pub fn lemma(&self) -> &str {
        &self.lemma
    }

    pub fn pos(&self) -> Pos {
        self.pos
    }

    pub fn sense(&self) -> u8 {
        self.sense
    }

    /// The quoted `"pos.sense"` constant used in clause form.
    pub fn sense_constant(&self) -> String {
        format!("\"{}.{:02}\"", self.pos.letter(), self.sense)
    }
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{:02}", self.lemma, self.pos.letter(), self.sense)
    }
}

impl FromStr for SynsetId {
    type Err = DrsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}
