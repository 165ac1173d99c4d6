//! Canonical composite labels.
//!
//! Tuples render as `(a,b)` and point sets as `{a,b}`. Component labels are
//! escaped so that distinct component lists never collide.

const SPECIAL: [char; 6] = ['\\', ',', '(', ')', '{', '}'];

pub fn escape(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    for c in label.chars() {
        if SPECIAL.contains(&c) {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

fn join<I, S>(open: char, close: char, parts: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut out = String::new();
    out.push(open);
    for (i, p) in parts.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&escape(p.as_ref()));
    }
    out.push(close);
    out
}

pub fn tuple_label<I, S>(parts: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    join('(', ')', parts)
}

pub fn set_label<I, S>(parts: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    join('{', '}', parts)
}

/// Splits a `{a,b}` key back into its unescaped components.
pub fn parse_set_label(key: &str) -> Option<Vec<String>> {
    let inner = key.strip_prefix('{')?.strip_suffix('}')?;
    let mut parts = Vec::new();
    if inner.is_empty() {
        return Some(parts);
    }
    let mut cur = String::new();
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => cur.push(chars.next()?),
            ',' => parts.push(std::mem::take(&mut cur)),
            '{' | '}' | '(' | ')' => return None,
            _ => cur.push(c),
        }
    }
    parts.push(cur);
    Some(parts)
}
