use crate::drs::{Item, ItemHead, Satellite, SequentialGraph};

use super::{strip_comment, FormatError};

fn parse_offset(token: &str) -> Option<i64> {
    let digits = token.strip_prefix('+').unwrap_or(token);
    if digits.is_empty() || digits.starts_with('+') {
        return None;
    }
    digits.parse().ok()
}

/// Reads one item from its tokens: a head followed by alternating role and
/// signed offset tokens.
pub(crate) fn parse_item_tokens<S: AsRef<str>>(tokens: &[S]) -> Result<Item, String> {
    let (head, rest) = tokens.split_first().ok_or("empty item")?;
    let head = ItemHead::parse(head.as_ref()).map_err(|e| e.to_string())?;
    if rest.len() % 2 != 0 {
        return Err(format!("role {:?} has no offset", rest[rest.len() - 1].as_ref()));
    }
    let mut item = Item::new(head);
    for pair in rest.chunks(2) {
        let (role, offset) = (pair[0].as_ref(), pair[1].as_ref());
        let value = parse_offset(offset).ok_or_else(|| format!("offset {offset:?} is not a signed integer"))?;
        item.satellites.push(Satellite::new(role, value).map_err(|e| format!("{role} {offset}: {e}"))?);
    }
    Ok(item)
}

/// Parses a single SBN line; `Ok(None)` for blank and comment-only lines.
pub fn parse_sbn_line(line_no: usize, raw: &str) -> Result<Option<Item>, FormatError> {
    let tokens: Vec<&str> = strip_comment(raw).split_whitespace().collect();
    if tokens.is_empty() {
        return Ok(None);
    }
    parse_item_tokens(&tokens).map(Some).map_err(|detail| FormatError::MalformedItem { line: line_no, detail })
}

/// One item per line; `%` comments and blank lines are skipped.
pub fn parse_sbn_file(text: &str) -> Result<SequentialGraph, FormatError> {
    let mut items = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(item) = parse_sbn_line(i + 1, line)? {
            items.push(item);
        }
    }
    Ok(SequentialGraph::new(items))
}

pub fn serialize_sbn_file(graph: &SequentialGraph) -> String {
    let mut out = String::new();
    for item in &graph.items {
        out.push_str(&item.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_item() {
        let g = parse_sbn_file("climb_up.v.01 Agent -1 Time +1 Theme +2").unwrap();
        assert_eq!(g.len(), 1);
        let item = &g.items[0];
        assert_eq!(item.head.to_string(), "climb_up.v.01");
        let sats: Vec<(&str, i64)> = item.satellites.iter().map(|s| (s.role(), s.offset())).collect();
        assert_eq!(sats, vec![("Agent", -1), ("Time", 1), ("Theme", 2)]);
    }

    #[test]
    fn bare_head_and_errors() {
        let g = parse_sbn_file("male.n.02").unwrap();
        assert!(g.items[0].satellites.is_empty());
        assert_eq!(serialize_sbn_file(&g), "male.n.02\n");
        for bad in ["male.n.02 Agent", "male.n.02 Agent 0", "male.n.02 Agent x", "male.n.02 Agent ++1"] {
            assert!(matches!(parse_sbn_file(bad), Err(FormatError::MalformedItem { line: 1, .. })), "{bad}");
        }
        assert_eq!(serialize_sbn_file(&SequentialGraph::default()), "");
    }

    #[test]
    fn unsigned_offsets_read_and_render_signed() {
        let g = parse_sbn_file("a.n.01 Theme 1\nb.n.01 % comment\n").unwrap();
        assert_eq!(serialize_sbn_file(&g), "a.n.01 Theme +1\nb.n.01\n");
    }
}
