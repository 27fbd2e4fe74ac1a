//! Line-oriented text format for systems.
//!
//! ```text
//! # comment
//! system "specker"
//! contents q1 q2 q3
//! context c1 measures q1 q2 { ++: 1/2, --: 1/2 }
//! context c2 measures q2 q3 { ++: 1/2, --: 1/2 }
//! context c3 measures q1 q3 { +-: 1/2, -+: 1/2 }
//! ```
//!
//! `system` is optional and must come first; `contents` appears once, before
//! any context. Outcomes are `+`/`-` strings in the context's content order.
//! Probabilities are `p/q`, integers, or decimals with at most nine fraction
//! digits, all converted exactly. Serialization is canonical: declared order
//! for contents and contexts, outcomes in lexicographic order with `+` before
//! `-`, probabilities in lowest terms.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;
use thiserror::Error;

use crate::rational::{format_rational, parse_rational, Rational};
use crate::system::{is_valid_label, validate, Context, ContextPmf, Outcome, System, SystemFormat, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: duplicate label `{label}`")]
    DuplicateLabel { line: usize, column: usize, label: String },
    #[error("line {line}, column {column}: context `{context}` measures unknown content `{content}`")]
    UnknownContent { line: usize, column: usize, context: String, content: String },
    #[error("line {line}, column {column}: outcome `{outcome}` in context `{context}` has {found} signs, expected {expected}")]
    ArityMismatch { line: usize, column: usize, context: String, outcome: String, expected: usize, found: usize },
    #[error("line {line}, column {column}: duplicate outcome `{outcome}` in context `{context}`")]
    DuplicateOutcome { line: usize, column: usize, context: String, outcome: String },
    #[error("line {line}, column {column}: probabilities of context `{context}` sum to {}, not 1", format_rational(.sum))]
    Unnormalized { line: usize, column: usize, context: String, sum: Rational },
    #[error("invalid system: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

impl ParseError {
    /// 1-based `(line, column)` of the error, when it has one.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            ParseError::Syntax { line, column, .. }
            | ParseError::DuplicateLabel { line, column, .. }
            | ParseError::UnknownContent { line, column, .. }
            | ParseError::ArityMismatch { line, column, .. }
            | ParseError::DuplicateOutcome { line, column, .. }
            | ParseError::Unnormalized { line, column, .. } => Some((*line, *column)),
            ParseError::Invalid(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Span {
    line: usize,
    column: usize,
}

struct ContextSpans {
    label: Span,
    measured: Vec<Span>,
    brace: Option<Span>,
    outcomes: Vec<(Outcome, Span)>,
}

struct Document {
    name: Option<String>,
    contents: Vec<(String, Span)>,
    contexts: Vec<(Context, Option<ContextPmf>, ContextSpans)>,
}

fn is_label_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '\'' | '-')
}

struct Cursor<'a> {
    line: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn span_at(&self, pos: usize) -> Span {
        Span { line: self.line, column: self.text[..pos].chars().count() + 1 }
    }

    fn span(&self) -> Span {
        self.span_at(self.pos)
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let s = self.span_at(pos);
        ParseError::Syntax { line: s.line, column: s.column, message: message.into() }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += c.len_utf8();
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.text.len()
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> (usize, &'a str) {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if pred(c)) {
            self.bump();
        }
        (start, &self.text[start..self.pos])
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn label(&mut self, what: &str) -> Result<(String, Span), ParseError> {
        self.skip_ws();
        let (start, word) = self.take_while(is_label_char);
        if word.is_empty() {
            return Err(self.error(format!("expected {what}")));
        }
        if !is_valid_label(word) {
            return Err(self.error_at(start, format!("invalid {what} `{word}`")));
        }
        Ok((word.to_string(), self.span_at(start)))
    }

    fn quoted(&mut self) -> Result<String, ParseError> {
        self.expect('"')?;
        let mut out = String::new();
        loop {
            let pos = self.pos;
            match self.peek() {
                None => return Err(self.error("unterminated string")),
                Some('"') => {
                    self.bump();
                    return Ok(out);
                }
                Some('\\') => {
                    self.bump();
                    match self.peek() {
                        Some('"') => out.push('"'),
                        Some('\\') => out.push('\\'),
                        Some('n') => out.push('\n'),
                        _ => return Err(self.error_at(pos, "unknown escape")),
                    }
                    self.bump();
                }
                Some(c) => {
                    out.push(c);
                    self.bump();
                }
            }
        }
    }

    /// A keyword must be followed by whitespace or the end of the line.
    fn after_keyword(&self, keyword: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(c) if !c.is_whitespace() => Err(self.error(format!("expected whitespace after `{keyword}`"))),
            _ => Ok(()),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }
}

/// Drops a `#` comment, ignoring `#` inside a quoted string.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        match c {
            _ if escaped => escaped = false,
            '\\' if quoted => escaped = true,
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_pmf(cur: &mut Cursor, context: &str, spans: &mut Vec<(Outcome, Span)>) -> Result<ContextPmf, ParseError> {
    let mut entries: BTreeMap<Outcome, Rational> = BTreeMap::new();
    loop {
        cur.skip_ws();
        if cur.peek() == Some('}') {
            cur.bump();
            break;
        }
        let (start, signs) = cur.take_while(|c| c == '+' || c == '-');
        if signs.is_empty() {
            return Err(cur.error("expected outcome such as `+-` or `}`"));
        }
        let outcome = Outcome::parse(signs).expect("only signs taken");
        let span = cur.span_at(start);
        if entries.contains_key(&outcome) {
            return Err(ParseError::DuplicateOutcome {
                line: span.line,
                column: span.column,
                context: context.to_string(),
                outcome: signs.to_string(),
            });
        }
        cur.expect(':')?;
        cur.skip_ws();
        let (num_start, literal) = cur.take_while(|c| c.is_ascii_digit() || c == '/' || c == '.');
        if literal.is_empty() {
            return Err(cur.error("expected probability"));
        }
        let p = parse_rational(literal).map_err(|e| cur.error_at(num_start, e.to_string()))?;
        spans.push((outcome.clone(), span));
        entries.insert(outcome, p);
        cur.skip_ws();
        match cur.peek() {
            Some(',') => cur.bump(),
            Some('}') => {}
            _ => return Err(cur.error("expected `,` or `}`")),
        }
    }
    let mut pmf = ContextPmf::new();
    for (o, p) in entries {
        pmf.insert(o, p);
    }
    Ok(pmf)
}

fn parse_document(text: &str, require_pmfs: bool) -> Result<Document, ParseError> {
    let mut doc = Document { name: None, contents: Vec::new(), contexts: Vec::new() };
    let mut seen_any = false;
    let mut seen_contents = false;
    let mut last_line = 1;
    for (i, raw) in text.split('\n').enumerate() {
        let line = i + 1;
        last_line = line;
        let body = strip_comment(raw.strip_suffix('\r').unwrap_or(raw));
        let mut cur = Cursor { line, text: body, pos: 0 };
        if cur.at_end() {
            continue;
        }
        let (start, keyword) = cur.take_while(|c| c.is_ascii_alphabetic());
        if matches!(keyword, "system" | "contents" | "context") {
            cur.after_keyword(keyword)?;
        }
        match keyword {
            "system" => {
                if seen_any {
                    return Err(cur.error_at(start, "`system` must be the first declaration"));
                }
                cur.skip_ws();
                doc.name = Some(cur.quoted()?);
                cur.finish()?;
            }
            "contents" => {
                if seen_contents {
                    return Err(cur.error_at(start, "duplicate `contents` declaration"));
                }
                seen_contents = true;
                while !cur.at_end() {
                    doc.contents.push(cur.label("content label")?);
                }
                if doc.contents.is_empty() {
                    return Err(cur.error("expected at least one content label"));
                }
            }
            "context" => {
                if !seen_contents {
                    return Err(cur.error_at(start, "`contents` must be declared before any context"));
                }
                let (label, label_span) = cur.label("context label")?;
                cur.skip_ws();
                let (kw_start, kw) = cur.take_while(|c| c.is_ascii_alphabetic());
                if kw != "measures" {
                    return Err(cur.error_at(kw_start, "expected `measures`"));
                }
                cur.after_keyword(kw)?;
                let mut measured = Vec::new();
                let mut measured_spans = Vec::new();
                while !cur.at_end() && cur.peek() != Some('{') {
                    let (q, span) = cur.label("content label")?;
                    measured.push(q);
                    measured_spans.push(span);
                }
                if measured.is_empty() {
                    return Err(cur.error("expected at least one content label"));
                }
                let mut spans =
                    ContextSpans { label: label_span, measured: measured_spans, brace: None, outcomes: Vec::new() };
                let pmf = if cur.peek() == Some('{') {
                    spans.brace = Some(cur.span());
                    cur.bump();
                    Some(parse_pmf(&mut cur, &label, &mut spans.outcomes)?)
                } else if require_pmfs {
                    return Err(cur.error("expected `{` with the context's distribution"));
                } else {
                    None
                };
                cur.finish()?;
                doc.contexts.push((Context { label, measured }, pmf, spans));
            }
            _ => {
                return Err(cur.error_at(start, "expected `system`, `contents` or `context`"));
            }
        }
        seen_any = true;
    }
    if !seen_contents {
        return Err(ParseError::Syntax { line: last_line, column: 1, message: "missing `contents` declaration".into() });
    }
    Ok(doc)
}

fn check_format(doc: &Document) -> Result<(), ParseError> {
    let mut contents = BTreeSet::new();
    for (q, span) in &doc.contents {
        if !contents.insert(q.as_str()) {
            return Err(ParseError::DuplicateLabel { line: span.line, column: span.column, label: q.clone() });
        }
    }
    let mut contexts = BTreeSet::new();
    for (ctx, _, spans) in &doc.contexts {
        if !contexts.insert(ctx.label.as_str()) {
            return Err(ParseError::DuplicateLabel {
                line: spans.label.line,
                column: spans.label.column,
                label: ctx.label.clone(),
            });
        }
        let mut listed = BTreeSet::new();
        for (q, span) in ctx.measured.iter().zip(&spans.measured) {
            if !contents.contains(q.as_str()) {
                return Err(ParseError::UnknownContent {
                    line: span.line,
                    column: span.column,
                    context: ctx.label.clone(),
                    content: q.clone(),
                });
            }
            if !listed.insert(q.as_str()) {
                return Err(ParseError::DuplicateLabel { line: span.line, column: span.column, label: q.clone() });
            }
        }
    }
    Ok(())
}

fn check_distributions(doc: &Document) -> Result<(), ParseError> {
    for (ctx, pmf, spans) in &doc.contexts {
        let Some(pmf) = pmf else { continue };
        for (outcome, span) in &spans.outcomes {
            if outcome.len() != ctx.arity() {
                return Err(ParseError::ArityMismatch {
                    line: span.line,
                    column: span.column,
                    context: ctx.label.clone(),
                    outcome: outcome.to_string(),
                    expected: ctx.arity(),
                    found: outcome.len(),
                });
            }
        }
        let sum = pmf.total();
        if !sum.is_one() {
            let span = spans.brace.unwrap_or(spans.label);
            return Err(ParseError::Unnormalized { line: span.line, column: span.column, context: ctx.label.clone(), sum });
        }
    }
    Ok(())
}

fn into_system(doc: Document) -> System {
    let mut pmfs = BTreeMap::new();
    let mut contexts = Vec::new();
    for (ctx, pmf, _) in doc.contexts {
        if let Some(pmf) = pmf {
            pmfs.insert(ctx.label.clone(), pmf);
        }
        contexts.push(ctx);
    }
    System { name: doc.name, contents: doc.contents.into_iter().map(|(q, _)| q).collect(), contexts, pmfs }
}

/// Parses and fully validates a system document.
pub fn parse(text: &str) -> Result<System, ParseError> {
    let doc = parse_document(text, true)?;
    check_format(&doc)?;
    check_distributions(&doc)?;
    let system = into_system(doc);
    let report = validate(&system);
    if !report.is_valid() {
        return Err(ParseError::Invalid(report.violations));
    }
    Ok(system)
}

/// [`parse`] for raw bytes; invalid UTF-8 is reported at its position.
pub fn parse_bytes(bytes: &[u8]) -> Result<System, ParseError> {
    parse(utf8(bytes)?)
}

fn utf8(bytes: &[u8]) -> Result<&str, ParseError> {
    std::str::from_utf8(bytes).map_err(|e| {
        let valid = &bytes[..e.valid_up_to()];
        let line = valid.iter().filter(|&&b| b == b'\n').count() + 1;
        let line_start = valid.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
        let column = String::from_utf8_lossy(&valid[line_start..]).chars().count() + 1;
        ParseError::Syntax { line, column, message: "invalid UTF-8".into() }
    })
}

/// Parses syntax only. The result may break system invariants; run
/// [`validate`] to list them.
pub fn parse_unchecked(text: &str) -> Result<System, ParseError> {
    parse_document(text, true).map(into_system)
}

pub fn parse_unchecked_bytes(bytes: &[u8]) -> Result<System, ParseError> {
    parse_unchecked(utf8(bytes)?)
}

/// Reads just the measurement plan. Distribution blocks are optional and ignored.
pub fn parse_format(text: &str) -> Result<SystemFormat, ParseError> {
    let doc = parse_document(text, false)?;
    check_format(&doc)?;
    Ok(SystemFormat {
        name: doc.name,
        contents: doc.contents.into_iter().map(|(q, _)| q).collect(),
        contexts: doc.contexts.into_iter().map(|(c, _, _)| c).collect(),
    })
}

fn quote(name: &str) -> String {
    let mut out = String::with_capacity(name.len() + 2);
    out.push('"');
    for c in name.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Canonical text of a system.
pub fn serialize(system: &System) -> String {
    let mut out = String::new();
    if let Some(name) = &system.name {
        out.push_str(&format!("system {}\n", quote(name)));
    }
    out.push_str("contents");
    for q in &system.contents {
        out.push(' ');
        out.push_str(q);
    }
    out.push('\n');
    for ctx in &system.contexts {
        out.push_str(&format!("context {} measures {}", ctx.label, ctx.measured.join(" ")));
        let entries: Vec<String> = system
            .pmf(&ctx.label)
            .map(|pmf| pmf.iter().map(|(o, p)| format!("{o}: {}", format_rational(p))).collect())
            .unwrap_or_default();
        if entries.is_empty() {
            out.push_str(" { }\n");
        } else {
            out.push_str(&format!(" {{ {} }}\n", entries.join(", ")));
        }
    }
    out
}

/// Canonical text of a measurement plan (no distribution blocks).
pub fn serialize_format(format: &SystemFormat) -> String {
    let mut out = String::new();
    if let Some(name) = &format.name {
        out.push_str(&format!("system {}\n", quote(name)));
    }
    out.push_str(&format!("contents {}\n", format.contents.join(" ")));
    for ctx in &format.contexts {
        out.push_str(&format!("context {} measures {}\n", ctx.label, ctx.measured.join(" ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    const SPECKER: &str = "\
contents q1 q2 q3
context c1 measures q1 q2 {++: 1/2, --: 1/2}
context c2 measures q2 q3 {++: 1/2, --: 1/2}
context c3 measures q1 q3 {+-: 1/2, -+: 1/2}
";

    fn pos(e: &ParseError) -> (usize, usize) {
        e.position().expect("positioned error")
    }

    #[test]
    fn parses_the_specker_document() {
        let s = parse(SPECKER).unwrap();
        let mut bundled = System::specker();
        assert_eq!(bundled.name.take().as_deref(), Some("specker"));
        assert_eq!(s, bundled);
    }

    #[test]
    fn keywords_need_whitespace() {
        let err = parse("contents q1\ncontext1 measures q1 {+: 1}").unwrap_err();
        assert_eq!(pos(&err), (2, 8));
        let err = parse("contents q1\ncontext c1 measuresq1 {+: 1}").unwrap_err();
        assert_eq!(pos(&err), (2, 12));
        let err = parse("system\"x\"\ncontents q1\ncontext c1 measures q1 {+: 1}").unwrap_err();
        assert_eq!(pos(&err), (1, 7));
        assert!(parse("system \"x\"\ncontents\tq1\ncontext\tc1\tmeasures\tq1\t{+: 1}").is_ok());
    }

    #[test]
    fn smallest_document() {
        let s = parse("contents q1\ncontext c1 measures q1 {+: 1}").unwrap();
        assert_eq!(s.contents, ["q1"]);
        assert_eq!(s.pmf("c1").unwrap().get(&Outcome::parse("+").unwrap()), int(1));
    }

    #[test]
    fn unnormalized_reports_the_sum() {
        let err = parse("contents q1\ncontext c1 measures q1 { +: 1/2, -: 1/4 }").unwrap_err();
        assert_eq!(err, ParseError::Unnormalized { line: 2, column: 24, context: "c1".into(), sum: ratio(3, 4) });
        assert!(err.to_string().contains("3/4"));
    }

    #[test]
    fn decimal_is_exact_and_serializes_as_fraction() {
        let s = parse("contents q1\ncontext c1 measures q1 { +: 0.5, -: 0.5 }").unwrap();
        assert_eq!(serialize(&s), "contents q1\ncontext c1 measures q1 { +: 1/2, -: 1/2 }\n");
        let s = parse("contents q1\ncontext c1 measures q1 { +: 1 }").unwrap();
        assert_eq!(serialize(&s), "contents q1\ncontext c1 measures q1 { +: 1 }\n");
    }

    #[test]
    fn semantic_errors_carry_positions() {
        let e = parse("contents q1\ncontext c1 measures q1 q9 { ++: 1 }").unwrap_err();
        assert!(matches!(e, ParseError::UnknownContent { ref content, .. } if content == "q9"));
        assert_eq!(pos(&e), (2, 24));

        let e = parse("contents q1 q2\ncontext c1 measures q1 q2 { +: 1 }").unwrap_err();
        assert!(matches!(e, ParseError::ArityMismatch { expected: 2, found: 1, .. }));
        assert_eq!(pos(&e), (2, 29));

        let e = parse("contents q1\ncontext c1 measures q1 { +: 1/2, +: 1/2 }").unwrap_err();
        assert!(matches!(e, ParseError::DuplicateOutcome { .. }));
        assert_eq!(pos(&e), (2, 34));

        let e = parse("contents q1 q1\ncontext c1 measures q1 { +: 1 }").unwrap_err();
        assert!(matches!(e, ParseError::DuplicateLabel { .. }));
        assert_eq!(pos(&e), (1, 13));

        let e = parse("contents q1\ncontext c1 measures q1 { +: 1 }\ncontext c1 measures q1 { +: 1 }").unwrap_err();
        assert_eq!(pos(&e), (3, 9));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let cases: &[(&str, (usize, usize))] = &[
            ("garbage", (1, 1)),
            ("contents q1\ncontext c1 measures q1 { +: 1", (2, 30)),
            ("contents q1\ncontext c1 measures q1 { +: -1 }", (2, 29)),
            ("contents q1\ncontext c1 measures q1 { +: 1/0 }", (2, 29)),
            ("contents q1\ncontext c1 q1 { +: 1 }", (2, 12)),
            ("contents q1\ncontext c1 measures q1", (2, 23)),
            ("contents q1\nsystem \"late\"", (2, 1)),
            ("context c1 measures q1 { +: 1 }", (1, 1)),
            ("\n\n# only comments\n", (4, 1)),
            ("contents q1\ncontext c1 measures q1 { +: 0.1234567891 }", (2, 29)),
            ("system \"unterminated\ncontents q1", (1, 21)),
            ("contents q1 {", (1, 13)),
            ("contents q1\ncontext c1 measures q1 { x: 1 }", (2, 26)),
            ("contents q1\ncontext c1 measures q1 { +: 1 } extra", (2, 33)),
        ];
        for (text, expected) in cases {
            let e = parse(text).unwrap_err();
            assert!(matches!(e, ParseError::Syntax { .. }), "{text:?} -> {e:?}");
            assert_eq!(pos(&e), *expected, "{text:?} -> {e}");
        }
    }

    #[test]
    fn comments_blank_lines_and_crlf() {
        let text = "# header\r\nsystem \"a # not a comment\" # but this is\r\n\r\ncontents q1 # tail\r\ncontext c1 measures q1 { +: 1/3, -: 2/3, }\r\n";
        let s = parse(text).unwrap();
        assert_eq!(s.name.as_deref(), Some("a # not a comment"));
        assert_eq!(s.pmf("c1").unwrap().total(), int(1));
    }

    #[test]
    fn names_with_escapes_round_trip() {
        let mut s = System::specker();
        s.name = Some("say \"hi\" \\ twice\nplease".into());
        assert_eq!(parse(&serialize(&s)).unwrap(), s);
    }

    #[test]
    fn zero_probabilities_are_dropped() {
        let s = parse("contents q1\ncontext c1 measures q1 { +: 1, -: 0 }").unwrap();
        assert_eq!(s.pmf("c1").unwrap().support_size(), 1);
    }

    #[test]
    fn unchecked_parse_keeps_violations() {
        let s = parse_unchecked("contents q1\ncontext c1 measures q9 { ++: 1/2 }").unwrap();
        let report = validate(&s);
        assert_eq!(report.violations.len(), 3);
    }

    #[test]
    fn format_documents() {
        let f = parse_format("contents q1 q2\ncontext c1 measures q1 q2\ncontext c2 measures q2 { +: 1 }").unwrap();
        assert_eq!(f.contexts.len(), 2);
        assert_eq!(parse_format(&serialize_format(&f)).unwrap(), f);
        assert!(parse_format("contents q1\ncontext c1 measures q2").is_err());
    }

    #[test]
    fn invalid_utf8_is_positioned() {
        let e = parse_bytes(b"contents q1\ncontext \xff").unwrap_err();
        assert_eq!(pos(&e), (2, 9));
    }

    #[test]
    fn serialization_is_canonical() {
        let text = "contents q1 q2\ncontext c1 measures q2 q1 { --: 0.25, ++: 2/8, -+: 1/4, +-: 1/4 }\n";
        let s = parse(text).unwrap();
        let canon = serialize(&s);
        assert_eq!(canon, "contents q1 q2\ncontext c1 measures q2 q1 { ++: 1/4, +-: 1/4, -+: 1/4, --: 1/4 }\n");
        assert_eq!(serialize(&parse(&canon).unwrap()), canon);
    }
}
