use serde::Serialize;

/// A line/column position. Both are 1-based; columns count characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Default)]
pub struct LineCol {
    pub line: u32,
    pub column: u32,
}

/// A byte range into the source text, with the matching line/column pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub start_pos: LineCol,
    pub end_pos: LineCol,
}

impl Span {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// Smallest span covering both `self` and `other`.
    pub fn cover(self, other: Span) -> Span {
        let (start, start_pos) = if self.start <= other.start {
            (self.start, self.start_pos)
        } else {
            (other.start, other.start_pos)
        };
        let (end, end_pos) = if self.end >= other.end {
            (self.end, self.end_pos)
        } else {
            (other.end, other.end_pos)
        };
        Span {
            start,
            end,
            start_pos,
            end_pos,
        }
    }

    pub fn text<'s>(&self, source: &'s str) -> &'s str {
        &source[self.start..self.end]
    }
}

/// Maps byte offsets to line/column positions.
#[derive(Debug, Clone)]
pub struct LineIndex {
    line_starts: Vec<usize>,
}

impl LineIndex {
    pub fn new(source: &str) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(source.match_indices('\n').map(|(i, _)| i + 1));
        LineIndex { line_starts }
    }

    pub fn position(&self, source: &str, offset: usize) -> LineCol {
        let line = match self.line_starts.binary_search(&offset) {
            Ok(l) => l,
            Err(l) => l - 1,
        };
        let column = source[self.line_starts[line]..offset].chars().count();
        LineCol {
            line: line as u32 + 1,
            column: column as u32 + 1,
        }
    }

    pub fn span(&self, source: &str, start: usize, end: usize) -> Span {
        Span {
            start,
            end,
            start_pos: self.position(source, start),
            end_pos: self.position(source, end),
        }
    }
}
