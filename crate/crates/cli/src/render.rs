//! Diagnostic reports in text and JSON.

use std::fmt::Write as _;

use icsq_core::check::{Diagnostic, Severity};
use icsq_core::lang::{ParseError, Span};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Where the diagnostics came from, for text rendering.
#[derive(Debug, Clone, Copy)]
pub struct Source<'a> {
    pub path: &'a str,
    pub text: &'a str,
}

/// One report line, from either the checker or the parser.
#[derive(Debug, Clone, PartialEq)]
pub struct Item {
    pub code: String,
    pub severity: Severity,
    pub message: String,
    pub span: Span,
    pub statement: Option<String>,
}

/// Code used for syntax errors, which have no checker code of their own.
pub const PARSE_ERROR_CODE: &str = "P001";

impl From<&Diagnostic> for Item {
    fn from(d: &Diagnostic) -> Self {
        Item {
            code: d.code.as_str().to_string(),
            severity: d.severity(),
            message: d.message.clone(),
            span: d.span,
            statement: d.statement.clone(),
        }
    }
}

impl From<&ParseError> for Item {
    fn from(e: &ParseError) -> Self {
        let mut message = e.message.clone();
        if !e.expected.is_empty() && !message.contains("expected") {
            let _ = write!(message, " (expected {})", e.expected.join(", "));
        }
        Item { code: PARSE_ERROR_CODE.to_string(), severity: Severity::Error, message, span: e.span, statement: None }
    }
}

#[derive(Serialize)]
struct JsonSpan {
    line: u32,
    col: u32,
    len: u32,
}

#[derive(Serialize)]
struct JsonItem<'a> {
    code: &'a str,
    severity: &'static str,
    message: &'a str,
    span: JsonSpan,
    statement: &'a str,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    diagnostics: Vec<JsonItem<'a>>,
}

pub fn render_diagnostics(diags: &[Diagnostic], format: Format, source: Option<Source>, color: bool) -> String {
    let items: Vec<Item> = diags.iter().map(Item::from).collect();
    render_items(&items, format, source, color)
}

pub fn render_parse_errors(errors: &[ParseError], format: Format, source: Option<Source>, color: bool) -> String {
    let items: Vec<Item> = errors.iter().map(Item::from).collect();
    render_items(&items, format, source, color)
}

pub fn render_items(items: &[Item], format: Format, source: Option<Source>, color: bool) -> String {
    match format {
        Format::Json => {
            let report = JsonReport {
                diagnostics: items
                    .iter()
                    .map(|i| JsonItem {
                        code: &i.code,
                        severity: i.severity.as_str(),
                        message: &i.message,
                        span: JsonSpan { line: i.span.line, col: i.span.col, len: i.span.len },
                        statement: i.statement.as_deref().unwrap_or(""),
                    })
                    .collect(),
            };
            let mut s = serde_json::to_string(&report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            for item in items {
                text_item(&mut out, item, source, color);
            }
            out
        }
    }
}

struct Paint(bool);

impl Paint {
    fn wrap(&self, code: &str, s: &str) -> String {
        if self.0 {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }
}

fn text_item(out: &mut String, item: &Item, source: Option<Source>, color: bool) {
    let paint = Paint(color);
    let (sev, sev_color) = match item.severity {
        Severity::Error => ("error", "1;31"),
        Severity::Warning => ("warning", "1;33"),
    };
    let _ = writeln!(out, "{}: {}", paint.wrap(sev_color, &format!("{sev}[{}]", item.code)), item.message);
    let Some(src) = source else {
        let _ = writeln!(out, "  at {}:{}", item.span.line, item.span.col);
        return;
    };
    let _ = writeln!(out, "  {} {}:{}:{}", paint.wrap("1;34", "-->"), src.path, item.span.line, item.span.col);
    if let Some(line) = src.text.lines().nth(item.span.line.saturating_sub(1) as usize) {
        let gutter = item.span.line.to_string();
        let pad = " ".repeat(gutter.len());
        let bar = paint.wrap("1;34", "|");
        // Keep tabs so the carets line up under them.
        let lead: String = line
            .chars()
            .take(item.span.col.saturating_sub(1) as usize)
            .map(|c| if c == '\t' { '\t' } else { ' ' })
            .collect();
        let room = line.chars().count().saturating_sub(item.span.col.saturating_sub(1) as usize).max(1);
        let carets = "^".repeat((item.span.len as usize).clamp(1, room));
        let _ = writeln!(out, "{pad} {bar}");
        let _ = writeln!(out, "{} {bar} {line}", paint.wrap("1;34", &gutter));
        let _ = writeln!(out, "{pad} {bar} {lead}{}", paint.wrap(sev_color, &carets));
    }
    if let Some(stmt) = &item.statement {
        let _ = writeln!(out, "  = in statement `{stmt}`");
    }
}
