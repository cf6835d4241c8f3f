//! Buffered report output in the `records` or `text` format.

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Records,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub kind: &'static str,
    pub fields: Vec<(&'static str, String)>,
}

impl Record {
    pub fn new(kind: &'static str) -> Self {
        Record { kind, fields: Vec::new() }
    }

    pub fn field(mut self, key: &'static str, value: impl ToString) -> Self {
        self.fields.push((key, value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v.as_str())
    }

    /// `KIND key=value …`, quoting values that contain spaces or quotes.
    pub fn to_line(&self) -> String {
        let mut line = self.kind.to_string();
        for (k, v) in &self.fields {
            let _ = write!(line, " {k}={}", quote(v));
        }
        line
    }

    fn to_text(&self) -> String {
        let f = |k| self.get(k).unwrap_or("-");
        match self.kind {
            "CONFIG" => {
                let rest: Vec<String> = self.fields.iter().map(|(k, v)| format!("{k} {v}")).collect();
                format!("configuration: {}", rest.join(", "))
            }
            "RANK" => match self.get("m") {
                Some(m) => format!("point {}: rank {} (table stable at {}, orbit pinned {} levels later)", f("point"), f("delta"), f("stab"), m),
                None => format!("point {}: Scott rank {} (stable at level {})", f("point"), f("delta"), f("stab")),
            },
            "PARTITION" => format!("rank {}: {} point(s): {}", f("delta"), f("count"), f("points")),
            "TABLE" => format!(
                "table: stabilized at {} after {} level(s), {} non-monotone step(s)",
                f("stab"),
                f("levels"),
                f("breaks")
            ),
            "CHECK" => {
                let mut s = format!(
                    "[{}] {}/{}: {} cases, {} failures",
                    f("verdict"),
                    f("suite"),
                    f("name"),
                    f("cases"),
                    f("failures")
                );
                if let Some(w) = self.get("witness") {
                    let _ = write!(s, "\n    witness: {w}");
                }
                if let Some(n) = self.get("note") {
                    let _ = write!(s, "\n    note: {n}");
                }
                s
            }
            "SUITE" => format!("suite {}: {} ({} checks, {} failed)", f("name"), f("verdict"), f("checks"), f("failed")),
            "COMPARE" => format!(
                "comparison: {} cases, {} with Scott hypothesis, {} counterexamples",
                f("cases"),
                f("hypothesis"),
                f("counterexamples")
            ),
            "REACH" => format!("  scott {:>5}  hjorth {:>5}  x{}", f("scott"), f("hjorth"), f("count")),
            _ => self.to_line(),
        }
    }
}

fn quote(v: &str) -> String {
    if !v.is_empty() && !v.contains(|c: char| c.is_whitespace() || c == '"' || c == '\\') {
        return v.to_string();
    }
    let mut out = String::from('"');
    for c in v.chars() {
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

#[derive(Debug, Default)]
pub struct Report {
    pub records: Vec<Record>,
}

impl Report {
    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        for r in &self.records {
            let line = match format {
                Format::Records => r.to_line(),
                Format::Text => r.to_text(),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}
