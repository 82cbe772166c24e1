use std::fmt;

use serde::Serialize;

use super::term::{check_token, unquote};
use super::{DrsError, SynsetId};

/// Head of a sequential-graph item: a synset or a constant such as `tom`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum ItemHead {
    Synset(SynsetId),
    Constant(String),
}

impl ItemHead {
    pub fn constant(label: &str) -> Result<Self, DrsError> {
        check_token(label, "constant")?;
        if label.contains('"') {
            return Err(DrsError::Whitespace { what: "constant (quote)", token: label.to_string() });
        }
        Ok(ItemHead::Constant(label.to_string()))
    }

    /// Quoted tokens are constants; anything that parses as `lemma.pos.sense`
    /// is a synset; any other token is taken as a bare constant.
    pub fn parse(token: &str) -> Result<Self, DrsError> {
        check_token(token, "head")?;
        if token.len() >= 2 && token.starts_with('"') && token.ends_with('"') {
            return ItemHead::constant(unquote(token));
        }
        match SynsetId::parse(token) {
            Ok(s) => Ok(ItemHead::Synset(s)),
            Err(_) => ItemHead::constant(token),
        }
    }
}

impl fmt::Display for ItemHead {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ItemHead::Synset(s) => write!(f, "{s}"),
            ItemHead::Constant(c) => write!(f, "\"{c}\""),
        }
    }
}

/// A `(role, offset)` pair: the role edge points `offset` items away.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Satellite {
    role: String,
    offset: i64,
}

impl Satellite {
    pub fn new(role: &str, offset: i64) -> Result<Self, DrsError> {
        check_token(role, "role")?;
        if offset == 0 {
            return Err(DrsError::ZeroOffset);
        }
        Ok(Satellite { role: role.to_string(), offset })
    }

    pub fn role(&self) -> &str {
        &self.role
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Offset with a mandatory sign: `+2`, `-1`.
    pub fn offset_token(&self) -> String {
        format!("{:+}", self.offset)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Item {
    pub head: ItemHead,
    pub satellites: Vec<Satellite>,
}

impl Item {
    pub fn new(head: ItemHead) -> Self {
        Item { head, satellites: Vec::new() }
    }

    pub fn with(mut self, role: &str, offset: i64) -> Result<Self, DrsError> {
        self.satellites.push(Satellite::new(role, offset)?);
        Ok(self)
    }

    /// Head followed by alternating role and signed offset tokens.
    pub fn tokens(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(1 + 2 * self.satellites.len());
        out.push(self.head.to_string());
        for s in &self.satellites {
            out.push(s.role.clone());
            out.push(s.offset_token());
        }
        out
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tokens().join(" "))
    }
}

/// Ordered items in surface-word order. Offsets may point outside the
/// sequence; the validator reports such graphs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct SequentialGraph {
    pub items: Vec<Item>,
}

impl SequentialGraph {
    pub fn new(items: Vec<Item>) -> Self {
        SequentialGraph { items }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn satellite_count(&self) -> usize {
        self.items.iter().map(|i| i.satellites.len()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn item_rendering_uses_signed_offsets() {
        let item = Item::new(ItemHead::parse("climb_up.v.01").unwrap())
            .with("Agent", -1)
            .unwrap()
            .with("Time", 1)
            .unwrap()
            .with("Theme", 2)
            .unwrap();
        assert_eq!(item.to_string(), "climb_up.v.01 Agent -1 Time +1 Theme +2");
    }

    #[test]
    fn heads() {
        assert!(matches!(ItemHead::parse("male.n.02").unwrap(), ItemHead::Synset(_)));
        assert_eq!(ItemHead::parse("\"tom\"").unwrap(), ItemHead::Constant("tom".into()));
        assert_eq!(ItemHead::parse("now").unwrap(), ItemHead::Constant("now".into()));
        assert_eq!(ItemHead::Constant("tom".into()).to_string(), "\"tom\"");
        assert!(Satellite::new("Agent", 0).is_err());
    }
}
