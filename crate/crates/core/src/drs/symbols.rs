use serde::{Deserialize, Serialize};

use super::term::is_reserved_token;
use super::DrsError;

/// Reserved token placed between clauses or items in a linearization.
/// Separators are always of the form `<...>`, a shape no payload token may take.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Separator(String);

impl Separator {
    pub fn new(token: &str) -> Result<Self, DrsError> {
        if !is_reserved_token(token) || token.chars().any(char::is_whitespace) {
            return Err(DrsError::BadSeparator(token.to_string()));
        }
        Ok(Separator(token.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Default for Separator {
    fn default() -> Self {
        Separator("<sep>".to_string())
    }
}

/// How a symbol sequence is written out as text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Joiner {
    #[default]
    Space,
    Newline,
}

/// Flat model-facing token sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolSequence {
    pub tokens: Vec<String>,
}

impl SymbolSequence {
    pub fn new(tokens: Vec<String>) -> Self {
        SymbolSequence { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn to_text(&self, joiner: Joiner) -> String {
        match joiner {
            Joiner::Space => self.tokens.join(" "),
            Joiner::Newline => self.tokens.join("\n"),
        }
    }

    /// Splits on any whitespace, so both joiners read back.
    pub fn from_text(text: &str) -> Self {
        SymbolSequence { tokens: text.split_whitespace().map(str::to_string).collect() }
    }

    /// Groups tokens into the runs between separators, skipping empty runs.
    pub fn chunks<'a>(&'a self, sep: &'a Separator) -> impl Iterator<Item = &'a [String]> + 'a {
        self.tokens.split(move |t| t == sep.as_str()).filter(|c| !c.is_empty())
    }
}
