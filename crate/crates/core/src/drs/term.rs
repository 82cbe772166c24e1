use std::fmt;

use serde::{Deserialize, Serialize};

use super::DrsError;

/// Namespace a term belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermKind {
    BoxVariable,
    EntityVariable,
    Constant,
}

/// A box variable, an entity/event variable, or a constant.
///
/// Variables are a lowercase letter followed by digits. A leading `b`
/// marks a box variable (`b1`); any other letter is an entity, event,
/// state or time variable (`x1`, `e2`, `s1`, `t1`). Everything else is a
/// constant and is kept verbatim, quotes included (`"n.02"`, `"tom"`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Term {
    kind: TermKind,
    label: String,
}

/// Tokens of the form `<...>` are reserved for separators and markers.
pub fn is_reserved_token(token: &str) -> bool {
    token.len() >= 2 && token.starts_with('<') && token.ends_with('>')
}

/// Checks that `token` can appear as a single field in any of the text formats.
pub(crate) fn check_token(token: &str, what: &'static str) -> Result<(), DrsError> {
    if token.is_empty() {
        return Err(DrsError::EmptyToken(what));
    }
    if token.chars().any(char::is_whitespace) {
        return Err(DrsError::Whitespace { what, token: token.to_string() });
    }
    if is_reserved_token(token) {
        return Err(DrsError::ReservedToken(token.to_string()));
    }
    Ok(())
}

/// Classifies a token by its surface form.
pub fn classify(token: &str) -> TermKind {
    let mut chars = token.chars();
    match chars.next() {
        Some(first) if first.is_ascii_lowercase() => {
            let rest = chars.as_str();
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                if first == 'b' {
                    TermKind::BoxVariable
                } else {
                    TermKind::EntityVariable
                }
            } else {
                TermKind::Constant
            }
        }
        _ => TermKind::Constant,
    }
}

impl Term {
    /// Parses a token, inferring its kind from the variable naming convention.
    pub fn parse(token: &str) -> Result<Self, DrsError> {
        check_token(token, "term")?;
        Ok(Term { kind: classify(token), label: token.to_string() })
    }

    pub fn box_variable(label: &str) -> Result<Self, DrsError> {
        Self::of_kind(label, TermKind::BoxVariable)
    }

    pub fn entity_variable(label: &str) -> Result<Self, DrsError> {
        Self::of_kind(label, TermKind::EntityVariable)
    }

    pub fn constant(label: &str) -> Result<Self, DrsError> {
        Self::of_kind(label, TermKind::Constant)
    }

    fn of_kind(label: &str, kind: TermKind) -> Result<Self, DrsError> {
        let term = Self::parse(label)?;
        if term.kind != kind {
            return Err(DrsError::BadVariableName { token: label.to_string(), expected: kind });
        }
        Ok(term)
    }

    pub fn kind(&self) -> TermKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_variable(&self) -> bool {
        self.kind != TermKind::Constant
    }

    /// The constant's text with one pair of surrounding double quotes removed.
    pub fn unquoted(&self) -> &str {
        unquote(&self.label)
    }
}

pub(crate) fn unquote(s: &str) -> &str {
    if s.len() >= 2 && s.starts_with('"') && s.ends_with('"') {
        &s[1..s.len() - 1]
    } else {
        s
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert_eq!(classify("b1"), TermKind::BoxVariable);
        assert_eq!(classify("b12"), TermKind::BoxVariable);
        assert_eq!(classify("x1"), TermKind::EntityVariable);
        assert_eq!(classify("e3"), TermKind::EntityVariable);
        assert_eq!(classify("t1"), TermKind::EntityVariable);
        assert_eq!(classify("tom"), TermKind::Constant);
        assert_eq!(classify("\"n.02\""), TermKind::Constant);
        assert_eq!(classify("b"), TermKind::Constant);
        assert_eq!(classify("X1"), TermKind::Constant);
        assert_eq!(classify("x1a"), TermKind::Constant);
    }

    #[test]
    fn constructors_check_kind() {
        assert!(Term::box_variable("b1").is_ok());
        assert!(matches!(Term::box_variable("x1"), Err(DrsError::BadVariableName { .. })));
        assert!(Term::constant("\"now\"").is_ok());
        assert!(Term::parse("").is_err());
        assert!(Term::parse("a b").is_err());
        assert!(Term::parse("<sep>").is_err());
        assert_eq!(Term::parse("\"tom\"").unwrap().unquoted(), "tom");
    }
}
