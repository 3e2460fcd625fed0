//! Streaming N-Triples reader.
//!
//! One statement per line, `<subject> <predicate> <object> .`, with comments
//! and blank lines allowed. Reading reuses a single line buffer, so memory is
//! bounded by the longest line rather than by the input size.

use std::fmt;
use std::io::{self, BufRead};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub lexical: String,
    pub language: Option<String>,
    pub datatype: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    /// Blank node label without the `_:` prefix; stable within one document.
    Blank(String),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(s) => write!(f, "<{s}>"),
            Term::Blank(s) => write!(f, "_:{s}"),
            Term::Literal(l) => {
                write!(f, "\"{}\"", escape_literal(&l.lexical))?;
                if let Some(lang) = &l.language {
                    write!(f, "@{lang}")
                } else if let Some(dt) = &l.datatype {
                    write!(f, "^^<{dt}>")
                } else {
                    Ok(())
                }
            }
        }
    }
}

fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    /// An IRI or a blank node.
    pub subject: Term,
    pub predicate: String,
    pub object: Term,
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <{}> {} .", self.subject, self.predicate, self.object)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum NTriplesError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("read error after line {line}: {source}")]
    Io {
        line: usize,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// The first malformed line ends the stream with an error.
    #[default]
    Strict,
    /// Malformed lines are skipped and recorded.
    Lenient,
}

/// Parses a single N-Triples line. `Ok(None)` for blank and comment lines.
pub fn parse_line(line: &str, line_no: usize) -> Result<Option<Triple>, SyntaxError> {
    let mut cur = Cursor {
        s: line,
        pos: 0,
        line: line_no,
    };
    cur.skip_ws();
    if cur.at_end() || cur.peek() == Some('#') {
        return Ok(None);
    }
    let subject = match cur.peek() {
        Some('<') => Term::Iri(cur.iri()?),
        Some('_') => Term::Blank(cur.blank()?),
        _ => return Err(cur.err("expected IRI or blank node as subject")),
    };
    cur.skip_ws();
    if cur.peek() != Some('<') {
        return Err(cur.err("expected IRI as predicate"));
    }
    let predicate = cur.iri()?;
    cur.skip_ws();
    let object = match cur.peek() {
        Some('<') => Term::Iri(cur.iri()?),
        Some('_') => Term::Blank(cur.blank()?),
        Some('"') => Term::Literal(cur.literal()?),
        _ => return Err(cur.err("expected IRI, blank node or literal as object")),
    };
    cur.skip_ws();
    if cur.peek() != Some('.') {
        return Err(cur.err("expected '.' after object"));
    }
    cur.bump();
    cur.skip_ws();
    if !cur.at_end() && cur.peek() != Some('#') {
        return Err(cur.err("unexpected content after '.'"));
    }
    Ok(Some(Triple {
        subject,
        predicate,
        object,
    }))
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
    line: usize,
}

impl Cursor<'_> {
    fn err(&self, msg: &str) -> SyntaxError {
        SyntaxError {
            line: self.line,
            message: format!("{msg} (column {})", self.pos + 1),
        }
    }

    fn peek(&self) -> Option<char> {
        self.s[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.s.len()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\r' | '\n')) {
            self.pos += 1;
        }
    }

    fn iri(&mut self) -> Result<String, SyntaxError> {
        self.bump(); // '<'
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err("unterminated IRI")),
                Some('>') => break,
                Some('\\') => match self.bump() {
                    Some('u') => out.push(self.hex_escape(4)?),
                    Some('U') => out.push(self.hex_escape(8)?),
                    _ => return Err(self.err("invalid escape in IRI")),
                },
                Some(c) if c == ' ' || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' || c == '`' || c.is_control() => {
                    return Err(self.err("invalid character in IRI"))
                }
                Some(c) => out.push(c),
            }
        }
        if out.is_empty() {
            return Err(self.err("empty IRI"));
        }
        Ok(out)
    }

    fn blank(&mut self) -> Result<String, SyntaxError> {
        if !self.s[self.pos..].starts_with("_:") {
            return Err(self.err("expected '_:'"));
        }
        self.pos += 2;
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || c == '<' || c == '"' {
                break;
            }
            self.pos += c.len_utf8();
        }
        // a label may not end with '.', which then belongs to the statement
        while self.pos > start && self.s[..self.pos].ends_with('.') {
            self.pos -= 1;
        }
        if self.pos == start {
            return Err(self.err("empty blank node label"));
        }
        Ok(self.s[start..self.pos].to_string())
    }

    fn literal(&mut self) -> Result<Literal, SyntaxError> {
        self.bump(); // '"'
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err("unterminated literal")),
                Some('"') => break,
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_escape(4)?,
                        Some('U') => self.hex_escape(8)?,
                        _ => return Err(self.err("invalid escape in literal")),
                    };
                    lexical.push(c);
                }
                Some(c) => lexical.push(c),
            }
        }
        let mut language = None;
        let mut datatype = None;
        match self.peek() {
            Some('@') => {
                self.bump();
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '-') {
                    self.pos += 1;
                }
                let tag = &self.s[start..self.pos];
                if tag.is_empty() || !tag.starts_with(|c: char| c.is_ascii_alphabetic()) {
                    return Err(self.err("invalid language tag"));
                }
                language = Some(tag.to_string());
            }
            Some('^') => {
                if !self.s[self.pos..].starts_with("^^<") {
                    return Err(self.err("expected '^^<' before datatype"));
                }
                self.pos += 2;
                datatype = Some(self.iri()?);
            }
            _ => {}
        }
        Ok(Literal {
            lexical,
            language,
            datatype,
        })
    }

    fn hex_escape(&mut self, digits: usize) -> Result<char, SyntaxError> {
        let end = self.pos + digits;
        let hex = self
            .s
            .get(self.pos..end)
            .ok_or_else(|| self.err("truncated unicode escape"))?;
        let code = u32::from_str_radix(hex, 16).map_err(|_| self.err("invalid unicode escape"))?;
        self.pos = end;
        char::from_u32(code).ok_or_else(|| self.err("escape is not a unicode scalar value"))
    }
}

/// Iterator over the triples of a reader.
///
/// In strict mode the first malformed line is yielded as an error and ends
/// the stream. In lenient mode malformed lines are skipped; they are counted
/// and the first [`TripleStream::MAX_KEPT_ERRORS`] are kept for reporting.
pub struct TripleStream<R> {
    reader: R,
    buf: String,
    line: usize,
    mode: ParseMode,
    done: bool,
    skipped: usize,
    errors: Vec<SyntaxError>,
}

impl<R: BufRead> TripleStream<R> {
    pub const MAX_KEPT_ERRORS: usize = 100;

    pub fn new(reader: R, mode: ParseMode) -> Self {
        TripleStream {
            reader,
            buf: String::new(),
            line: 0,
            mode,
            done: false,
            skipped: 0,
            errors: Vec::new(),
        }
    }

    /// Number of malformed lines skipped so far (lenient mode).
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    pub fn errors(&self) -> &[SyntaxError] {
        &self.errors
    }

    pub fn lines_read(&self) -> usize {
        self.line
    }
}

impl<R: BufRead> Iterator for TripleStream<R> {
    type Item = Result<Triple, NTriplesError>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            self.buf.clear();
            match self.reader.read_line(&mut self.buf) {
                Ok(0) => {
                    self.done = true;
                    return None;
                }
                Ok(_) => {}
                Err(source) => {
                    self.done = true;
                    return Some(Err(NTriplesError::Io {
                        line: self.line,
                        source,
                    }));
                }
            }
            self.line += 1;
            match parse_line(&self.buf, self.line) {
                Ok(Some(t)) => return Some(Ok(t)),
                Ok(None) => continue,
                Err(e) => match self.mode {
                    ParseMode::Strict => {
                        self.done = true;
                        return Some(Err(e.into()));
                    }
                    ParseMode::Lenient => {
                        self.skipped += 1;
                        if self.errors.len() < Self::MAX_KEPT_ERRORS {
                            self.errors.push(e);
                        }
                    }
                },
            }
        }
        None
    }
}

/// Convenience for streams whose errors should abort: collects everything or
/// fails on the first error.
pub fn read_all<R: BufRead>(reader: R, mode: ParseMode) -> Result<(Vec<Triple>, Vec<SyntaxError>, usize), NTriplesError> {
    let mut stream = TripleStream::new(reader, mode);
    let mut out = Vec::new();
    for t in stream.by_ref() {
        out.push(t?);
    }
    Ok((out, stream.errors.clone(), stream.skipped))
}
