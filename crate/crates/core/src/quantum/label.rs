use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Name of one outcome of a configuration. Joint configurations produce
/// tuple labels such as `(up, down)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutcomeLabel {
    Atom(String),
    Tuple(Vec<OutcomeLabel>),
}

impl OutcomeLabel {
    pub fn atom(name: &str) -> Self {
        OutcomeLabel::Atom(name.to_string())
    }

    pub fn pair(a: OutcomeLabel, b: OutcomeLabel) -> Self {
        OutcomeLabel::Tuple(alloc::vec![a, b])
    }

    /// Reads the display form back: `up` or `(up, (a, b))`.
    pub fn parse(s: &str) -> Option<Self> {
        let (label, rest) = parse_label(s.trim_start())?;
        rest.trim().is_empty().then_some(label)
    }
}

fn parse_label(s: &str) -> Option<(OutcomeLabel, &str)> {
    if let Some(mut rest) = s.strip_prefix('(') {
        let mut items = Vec::new();
        loop {
            let (item, r) = parse_label(rest.trim_start())?;
            items.push(item);
            let r = r.trim_start();
            if let Some(r) = r.strip_prefix(',') {
                rest = r;
            } else {
                return Some((OutcomeLabel::Tuple(items), r.strip_prefix(')')?));
            }
        }
    }
    let end = s.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(s.len());
    (end > 0).then(|| (OutcomeLabel::atom(&s[..end]), &s[end..]))
}

impl From<&str> for OutcomeLabel {
    fn from(s: &str) -> Self {
        OutcomeLabel::atom(s)
    }
}

impl fmt::Display for OutcomeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutcomeLabel::Atom(s) => f.write_str(s),
            OutcomeLabel::Tuple(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}
