/// A region of scenario source text.
///
/// `start`/`end` are byte offsets; `line`/`col` are 1-based and `col` and
/// `len` count characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
    pub len: u32,
}

impl Span {
    /// Span from the start of `self` to the end of `other`.
    pub fn to(self, other: Span, src: &str) -> Span {
        let end = other.end.max(self.end);
        Span {
            start: self.start,
            end,
            line: self.line,
            col: self.col,
            len: src.get(self.start..end).map_or(0, |s| s.chars().count() as u32),
        }
    }
}
