//! Alignment files: tab-separated cells and the INRIA Alignment XML format.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use super::ntriples::ParseMode;
use super::xml::{self, Event, Tokenizer};
use super::IngestError;
use crate::model::{Alignment, Correspondence, ModelError, Provenance, Relation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignmentFormat {
    /// `source<TAB>target<TAB>relation<TAB>confidence`, no header.
    Tsv,
    AlignXml,
}

impl AlignmentFormat {
    /// `.tsv`/`.txt` are TSV, `.rdf`/`.xml` are Alignment XML.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "tsv" | "txt" => Some(AlignmentFormat::Tsv),
            "rdf" | "xml" => Some(AlignmentFormat::AlignXml),
            _ => None,
        }
    }
}

impl fmt::Display for AlignmentFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlignmentFormat::Tsv => "tsv",
            AlignmentFormat::AlignXml => "align-xml",
        })
    }
}

impl FromStr for AlignmentFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tsv" => Ok(AlignmentFormat::Tsv),
            "align-xml" | "align_xml" | "xml" | "rdf" => Ok(AlignmentFormat::AlignXml),
            _ => Err(format!("unknown alignment format `{s}` (expected tsv or align-xml)")),
        }
    }
}

/// Cells dropped while reading in lenient mode.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReadReport {
    pub skipped: usize,
    pub messages: Vec<String>,
}

pub fn read_alignment(
    path: &Path,
    format: AlignmentFormat,
    mode: ParseMode,
) -> Result<(Alignment, ReadReport), IngestError> {
    let src = fs::read_to_string(path).map_err(|source| IngestError::Io {
        context: path.display().to_string(),
        source,
    })?;
    parse_alignment(&src, format, mode).map_err(|e| e.in_file(path))
}

pub fn parse_alignment(
    src: &str,
    format: AlignmentFormat,
    mode: ParseMode,
) -> Result<(Alignment, ReadReport), IngestError> {
    match format {
        AlignmentFormat::Tsv => parse_tsv(src, mode),
        AlignmentFormat::AlignXml => parse_xml(src, mode),
    }
}

fn unknown_relation(
    report: &mut ReadReport,
    mode: ParseMode,
    location: String,
    relation: &str,
) -> Result<(), IngestError> {
    match mode {
        ParseMode::Strict => Err(IngestError::UnknownRelation {
            location,
            relation: relation.to_string(),
        }),
        ParseMode::Lenient => {
            report.skipped += 1;
            report.messages.push(format!("{location}: skipped cell with relation `{relation}`"));
            Ok(())
        }
    }
}

fn parse_confidence(raw: &str, location: &str) -> Result<f64, IngestError> {
    let c: f64 = raw.trim().parse().map_err(|_| IngestError::Format {
        location: location.to_string(),
        message: format!("confidence `{raw}` is not a number"),
    })?;
    if !(0.0..=1.0).contains(&c) {
        return Err(IngestError::Format {
            location: location.to_string(),
            message: format!("confidence {c} outside [0, 1]"),
        });
    }
    Ok(c)
}

fn parse_tsv(src: &str, mode: ParseMode) -> Result<(Alignment, ReadReport), IngestError> {
    let mut out = Alignment::new();
    let mut report = ReadReport::default();
    for (i, line) in src.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let location = format!("line {}", i + 1);
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 || cols[0].is_empty() || cols[1].is_empty() {
            return Err(IngestError::Format {
                location,
                message: format!("expected 4 tab-separated columns, found {}", cols.len()),
            });
        }
        let relation = match cols[2].parse::<Relation>() {
            Ok(r) => r,
            Err(_) => {
                unknown_relation(&mut report, mode, location, cols[2])?;
                continue;
            }
        };
        let confidence = parse_confidence(cols[3], &location)?;
        out.insert(Correspondence::new(cols[0], cols[1], relation, confidence, Provenance::External)?);
    }
    Ok((out, report))
}

#[derive(Default)]
struct CellState {
    entity1: Option<String>,
    entity2: Option<String>,
    relation: Option<String>,
    measure: Option<String>,
    start: usize,
}

fn resource_attr(attrs: &[(String, String)]) -> Option<String> {
    attrs
        .iter()
        .find(|(k, _)| xml::local(k) == "resource" || xml::local(k) == "about")
        .map(|(_, v)| v.clone())
}

fn parse_xml(src: &str, mode: ParseMode) -> Result<(Alignment, ReadReport), IngestError> {
    let mut tok = Tokenizer::new(src);
    let mut stack: Vec<String> = Vec::new();
    let mut cell: Option<CellState> = None;
    let mut out = Alignment::new();
    let mut report = ReadReport::default();
    let loc = |offset: usize| format!("line {}", xml::line_of(src, offset));

    loop {
        let ev = tok.next_event().map_err(|e| IngestError::Format {
            location: loc(e.offset),
            message: e.message,
        })?;
        let Some(ev) = ev else { break };
        let offset = tok.event_start();
        match ev {
            Event::Start { name, attrs, empty } => {
                let lname = xml::local(&name).to_string();
                if lname == "Cell" {
                    cell = Some(CellState {
                        start: offset,
                        ..Default::default()
                    });
                } else if let Some(c) = cell.as_mut() {
                    match lname.as_str() {
                        "entity1" => c.entity1 = resource_attr(&attrs).or(c.entity1.take()),
                        "entity2" => c.entity2 = resource_attr(&attrs).or(c.entity2.take()),
                        _ => {}
                    }
                }
                if empty {
                    if lname == "Cell" {
                        finish_cell(cell.take(), &mut out, &mut report, mode, &loc)?;
                    }
                } else {
                    stack.push(name);
                }
            }
            Event::End { name } => {
                match stack.pop() {
                    Some(open) if open == name => {}
                    Some(open) => {
                        return Err(IngestError::Format {
                            location: loc(offset),
                            message: format!("closing tag `{name}` does not match `{open}`"),
                        })
                    }
                    None => {
                        return Err(IngestError::Format {
                            location: loc(offset),
                            message: format!("unexpected closing tag `{name}`"),
                        })
                    }
                }
                if xml::local(&name) == "Cell" {
                    finish_cell(cell.take(), &mut out, &mut report, mode, &loc)?;
                }
            }
            Event::Text(text) => {
                if let (Some(c), Some(top)) = (cell.as_mut(), stack.last()) {
                    let text = text.trim().to_string();
                    match xml::local(top) {
                        "relation" => c.relation = Some(text),
                        "measure" => c.measure = Some(text),
                        "entity1" if c.entity1.is_none() => c.entity1 = Some(text),
                        "entity2" if c.entity2.is_none() => c.entity2 = Some(text),
                        _ => {}
                    }
                }
            }
        }
    }
    if let Some(open) = stack.last() {
        return Err(IngestError::Format {
            location: loc(src.len()),
            message: format!("element `{open}` is never closed"),
        });
    }
    Ok((out, report))
}

fn finish_cell(
    cell: Option<CellState>,
    out: &mut Alignment,
    report: &mut ReadReport,
    mode: ParseMode,
    loc: &dyn Fn(usize) -> String,
) -> Result<(), IngestError> {
    let Some(c) = cell else { return Ok(()) };
    let location = loc(c.start);
    let (Some(e1), Some(e2)) = (c.entity1, c.entity2) else {
        return Err(IngestError::Format {
            location,
            message: "Cell without entity1 and entity2".into(),
        });
    };
    let rel_raw = c.relation.unwrap_or_else(|| "=".to_string());
    let relation = match rel_raw.parse::<Relation>() {
        Ok(r) => r,
        Err(_) => return unknown_relation(report, mode, location, &rel_raw),
    };
    let confidence = match c.measure {
        Some(m) => parse_confidence(&m, &location)?,
        None => 1.0,
    };
    out.insert(Correspondence::new(e1, e2, relation, confidence, Provenance::External)?);
    Ok(())
}

pub fn write_alignment(a: &Alignment, path: &Path, format: AlignmentFormat) -> Result<(), IngestError> {
    let io_err = |source| IngestError::Io {
        context: path.display().to_string(),
        source,
    };
    let mut w = io::BufWriter::new(fs::File::create(path).map_err(io_err)?);
    write_alignment_to(a, &mut w, format).map_err(io_err)?;
    w.flush().map_err(io_err)
}

/// Cells are written in key order, so output is byte-stable.
pub fn write_alignment_to<W: Write>(a: &Alignment, w: &mut W, format: AlignmentFormat) -> io::Result<()> {
    match format {
        AlignmentFormat::Tsv => {
            for c in a {
                writeln!(w, "{}\t{}\t{}\t{}", c.source(), c.target(), c.relation(), c.confidence())?;
            }
        }
        AlignmentFormat::AlignXml => {
            writeln!(w, "<?xml version=\"1.0\" encoding=\"utf-8\"?>")?;
            writeln!(
                w,
                "<rdf:RDF xmlns=\"http://knowledgeweb.semanticweb.org/heterogeneity/alignment#\"\n         xmlns:rdf=\"http://www.w3.org/1999/02/22-rdf-syntax-ns#\"\n         xmlns:xsd=\"http://www.w3.org/2001/XMLSchema#\">"
            )?;
            writeln!(w, "<Alignment>")?;
            writeln!(w, "  <xml>yes</xml>")?;
            writeln!(w, "  <level>0</level>")?;
            writeln!(w, "  <type>{}</type>", if a.is_one_to_one() { "11" } else { "**" })?;
            for c in a {
                writeln!(w, "  <map>")?;
                writeln!(w, "    <Cell>")?;
                writeln!(w, "      <entity1 rdf:resource=\"{}\"/>", xml::escape(c.source()))?;
                writeln!(w, "      <entity2 rdf:resource=\"{}\"/>", xml::escape(c.target()))?;
                writeln!(w, "      <relation>{}</relation>", xml::escape(c.relation().symbol()))?;
                writeln!(w, "      <measure rdf:datatype=\"xsd:float\">{}</measure>", c.confidence())?;
                writeln!(w, "    </Cell>")?;
                writeln!(w, "  </map>")?;
            }
            writeln!(w, "</Alignment>")?;
            writeln!(w, "</rdf:RDF>")?;
        }
    }
    Ok(())
}

impl From<ModelError> for IngestError {
    fn from(e: ModelError) -> Self {
        IngestError::Model(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(s: &str, t: &str, c: f64) -> Correspondence {
        Correspondence::new(s, t, Relation::Equivalence, c, Provenance::External).unwrap()
    }

    fn same_cells(a: &Alignment, b: &Alignment) -> bool {
        a.len() == b.len()
            && a.iter()
                .zip(b.iter())
                .all(|(x, y)| x.key() == y.key() && x.confidence() == y.confidence())
    }

    #[test]
    fn tsv_line() {
        let (a, _) = parse_alignment("http://a\thttp://b\t=\t1.0\n", AlignmentFormat::Tsv, ParseMode::Strict).unwrap();
        assert_eq!(a.len(), 1);
        let c = a.iter().next().unwrap();
        assert_eq!((c.source(), c.target(), c.confidence()), ("http://a", "http://b", 1.0));
    }

    #[test]
    fn tsv_errors_carry_line() {
        let err = parse_alignment("a\tb\t=\t1\nbroken\n", AlignmentFormat::Tsv, ParseMode::Strict).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = parse_alignment("a\tb\t=\t1.5\n", AlignmentFormat::Tsv, ParseMode::Lenient).unwrap_err();
        assert!(err.to_string().contains("outside"), "{err}");
    }

    #[test]
    fn xml_round_trip() {
        let a: Alignment = [
            cell("http://o1#a", "http://o2#x", 1.0),
            cell("http://o1#b", "http://o2#y", 0.85),
            cell("http://o1#c&d", "http://o2#z", 0.1 + 0.2),
        ]
        .into_iter()
        .collect();
        let mut buf = Vec::new();
        write_alignment_to(&a, &mut buf, AlignmentFormat::AlignXml).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.matches("<Cell>").count(), 3);
        let (b, report) = parse_alignment(&text, AlignmentFormat::AlignXml, ParseMode::Strict).unwrap();
        assert!(same_cells(&a, &b));
        assert_eq!(report.skipped, 0);
    }

    const WITH_SUBSUMPTION: &str = r#"<?xml version="1.0"?>
<rdf:RDF xmlns="http://knowledgeweb.semanticweb.org/heterogeneity/alignment"
  xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#">
<Alignment>
  <map><Cell>
    <entity1 rdf:resource="http://a"/><entity2 rdf:resource="http://b"/>
    <relation>=</relation><measure rdf:datatype="xsd:float">0.5</measure>
  </Cell></map>
  <map><Cell>
    <entity1 rdf:resource="http://c"/><entity2 rdf:resource="http://d"/>
    <relation>&lt;</relation><measure rdf:datatype="xsd:float">1.0</measure>
  </Cell></map>
</Alignment>
</rdf:RDF>
"#;

    #[test]
    fn xml_unknown_relation_lenient() {
        let (a, report) = parse_alignment(WITH_SUBSUMPTION, AlignmentFormat::AlignXml, ParseMode::Lenient).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(report.skipped, 1);
        assert!(a.contains_pair("http://a", "http://b"));
    }

    #[test]
    fn xml_unknown_relation_strict() {
        let err = parse_alignment(WITH_SUBSUMPTION, AlignmentFormat::AlignXml, ParseMode::Strict).unwrap_err();
        match err {
            IngestError::UnknownRelation { relation, location } => {
                assert_eq!(relation, "<");
                assert_eq!(location, "line 9");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn xml_malformed_is_fatal_with_location() {
        let err = parse_alignment("<Alignment>\n<map><Cell>\n</map>", AlignmentFormat::AlignXml, ParseMode::Lenient)
            .unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn xml_missing_measure_defaults_to_one() {
        let src = "<Alignment><map><Cell><entity1 rdf:resource='a'/><entity2 rdf:resource='b'/><relation>=</relation></Cell></map></Alignment>";
        let (a, _) = parse_alignment(src, AlignmentFormat::AlignXml, ParseMode::Strict).unwrap();
        assert_eq!(a.iter().next().unwrap().confidence(), 1.0);
    }

    #[test]
    fn format_from_path() {
        assert_eq!(AlignmentFormat::from_path(Path::new("x.rdf")), Some(AlignmentFormat::AlignXml));
        assert_eq!(AlignmentFormat::from_path(Path::new("x.tsv")), Some(AlignmentFormat::Tsv));
        assert_eq!(AlignmentFormat::from_path(Path::new("x")), None);
    }
}
