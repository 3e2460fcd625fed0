//! Just enough XML to read alignment files: elements, attributes, text and
//! the predefined/numeric entities. No DTD processing or namespace resolution;
//! names are compared by their local part.

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Event {
    Start {
        name: String,
        attrs: Vec<(String, String)>,
        empty: bool,
    },
    End {
        name: String,
    },
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct XmlError {
    pub offset: usize,
    pub message: String,
}

pub(crate) fn local(name: &str) -> &str {
    name.rsplit(':').next().unwrap_or(name)
}

/// 1-based line of a byte offset, for error messages.
pub(crate) fn line_of(src: &str, offset: usize) -> usize {
    src.as_bytes()[..offset.min(src.len())]
        .iter()
        .filter(|b| **b == b'\n')
        .count()
        + 1
}

pub(crate) struct Tokenizer<'a> {
    src: &'a str,
    pos: usize,
    event_start: usize,
}

impl<'a> Tokenizer<'a> {
    pub fn new(src: &'a str) -> Self {
        Tokenizer { src, pos: 0, event_start: 0 }
    }

    /// Byte offset where the most recently returned event began.
    pub fn event_start(&self) -> usize {
        self.event_start
    }

    fn err(&self, message: impl Into<String>) -> XmlError {
        XmlError {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_past(&mut self, end: &str, what: &str) -> Result<&'a str, XmlError> {
        match self.rest().find(end) {
            Some(i) => {
                let body = &self.rest()[..i];
                self.pos += i + end.len();
                Ok(body)
            }
            None => Err(self.err(format!("unterminated {what}"))),
        }
    }

    pub fn next_event(&mut self) -> Result<Option<Event>, XmlError> {
        loop {
            if self.pos >= self.src.len() {
                return Ok(None);
            }
            let rest = self.rest();
            self.event_start = self.pos;
            if !rest.starts_with('<') {
                let end = rest.find('<').unwrap_or(rest.len());
                let raw = &rest[..end];
                let start = self.pos;
                self.pos += end;
                if raw.trim().is_empty() {
                    continue;
                }
                return decode(raw)
                    .map(|t| Some(Event::Text(t)))
                    .map_err(|m| XmlError { offset: start, message: m });
            }
            if rest.starts_with("<?") {
                self.skip_past("?>", "processing instruction")?;
            } else if rest.starts_with("<!--") {
                self.skip_past("-->", "comment")?;
            } else if rest.starts_with("<![CDATA[") {
                self.pos += "<![CDATA[".len();
                let body = self.skip_past("]]>", "CDATA section")?;
                return Ok(Some(Event::Text(body.to_string())));
            } else if rest.starts_with("<!") {
                self.skip_doctype()?;
            } else if rest.starts_with("</") {
                self.pos += 2;
                let body = self.skip_past(">", "end tag")?;
                return Ok(Some(Event::End {
                    name: body.trim().to_string(),
                }));
            } else {
                return self.start_tag().map(Some);
            }
        }
    }

    fn skip_doctype(&mut self) -> Result<(), XmlError> {
        // internal subsets may nest brackets: <!DOCTYPE x [ <!ENTITY ...> ]>
        let mut depth = 0usize;
        for (i, c) in self.rest().char_indices() {
            match c {
                '[' => depth += 1,
                ']' => depth = depth.saturating_sub(1),
                '>' if depth == 0 => {
                    self.pos += i + 1;
                    return Ok(());
                }
                _ => {}
            }
        }
        Err(self.err("unterminated declaration"))
    }

    fn start_tag(&mut self) -> Result<Event, XmlError> {
        let tag_start = self.pos;
        self.pos += 1;
        let bytes = self.src.as_bytes();
        let name_start = self.pos;
        while self.pos < bytes.len() && !matches!(bytes[self.pos], b' ' | b'\t' | b'\r' | b'\n' | b'/' | b'>') {
            self.pos += 1;
        }
        let name = self.src[name_start..self.pos].to_string();
        if name.is_empty() {
            return Err(XmlError {
                offset: tag_start,
                message: "empty element name".into(),
            });
        }
        let mut attrs = Vec::new();
        loop {
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos >= bytes.len() {
                return Err(self.err("unterminated start tag"));
            }
            match bytes[self.pos] {
                b'>' => {
                    self.pos += 1;
                    return Ok(Event::Start { name, attrs, empty: false });
                }
                b'/' => {
                    if bytes.get(self.pos + 1) != Some(&b'>') {
                        return Err(self.err("expected '/>'"));
                    }
                    self.pos += 2;
                    return Ok(Event::Start { name, attrs, empty: true });
                }
                _ => {}
            }
            let key_start = self.pos;
            while self.pos < bytes.len() && !matches!(bytes[self.pos], b'=' | b' ' | b'\t' | b'\r' | b'\n' | b'>' | b'/') {
                self.pos += 1;
            }
            let key = self.src[key_start..self.pos].to_string();
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if bytes.get(self.pos) != Some(&b'=') {
                return Err(self.err(format!("attribute `{key}` without value")));
            }
            self.pos += 1;
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            let quote = match bytes.get(self.pos) {
                Some(&q @ (b'"' | b'\'')) => q as char,
                _ => return Err(self.err("expected quoted attribute value")),
            };
            self.pos += 1;
            let raw = self.skip_past(&quote.to_string(), "attribute value")?;
            let value = decode(raw).map_err(|m| self.err(m))?;
            attrs.push((key, value));
        }
    }
}

pub(crate) fn decode(raw: &str) -> Result<String, String> {
    if !raw.contains('&') {
        return Ok(raw.to_string());
    }
    let mut out = String::with_capacity(raw.len());
    let mut rest = raw;
    while let Some(i) = rest.find('&') {
        out.push_str(&rest[..i]);
        rest = &rest[i + 1..];
        let end = rest.find(';').ok_or("unterminated entity reference")?;
        let ent = &rest[..end];
        let c = match ent {
            "amp" => '&',
            "lt" => '<',
            "gt" => '>',
            "quot" => '"',
            "apos" => '\'',
            _ => {
                let code = if let Some(hex) = ent.strip_prefix("#x").or_else(|| ent.strip_prefix("#X")) {
                    u32::from_str_radix(hex, 16).ok()
                } else if let Some(dec) = ent.strip_prefix('#') {
                    dec.parse().ok()
                } else {
                    None
                };
                code.and_then(char::from_u32)
                    .ok_or_else(|| format!("unknown entity `&{ent};`"))?
            }
        };
        out.push(c);
        rest = &rest[end + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn events(src: &str) -> Vec<Event> {
        let mut t = Tokenizer::new(src);
        let mut out = Vec::new();
        while let Some(e) = t.next_event().unwrap() {
            out.push(e);
        }
        out
    }

    #[test]
    fn elements_attributes_text() {
        let ev = events("<?xml version='1.0'?><!-- c --><a x=\"1 &amp; 2\"><b/>t&#65;<![CDATA[<raw>]]></a>");
        assert_eq!(
            ev,
            vec![
                Event::Start {
                    name: "a".into(),
                    attrs: vec![("x".into(), "1 & 2".into())],
                    empty: false
                },
                Event::Start {
                    name: "b".into(),
                    attrs: vec![],
                    empty: true
                },
                Event::Text("tA".into()),
                Event::Text("<raw>".into()),
                Event::End { name: "a".into() },
            ]
        );
    }

    #[test]
    fn doctype_with_internal_subset() {
        let ev = events("<!DOCTYPE rdf:RDF [ <!ENTITY xsd \"http://x#\"> ]><r/>");
        assert_eq!(ev.len(), 1);
    }

    #[test]
    fn unterminated_tag_reports_offset() {
        let mut t = Tokenizer::new("<a>\n<b x='1'");
        t.next_event().unwrap();
        let e = t.next_event().unwrap_err();
        assert_eq!(line_of("<a>\n<b x='1'", e.offset), 2);
    }

    #[test]
    fn escape_decode_round_trip() {
        let s = "a<b>&\"c'";
        assert_eq!(decode(&escape(s)).unwrap(), s);
    }
}
