use std::fmt::Display;

use clap::ValueEnum;

pub const HEADER: &str = "# cantorspeed-report v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Structured,
}

/// An ordered list of key/value lines for one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub command: String,
    pub lines: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.into(), lines: Vec::new() }
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Display) {
        self.lines.push((key.into(), value.to_string()));
    }

    /// Takes `key=value` lines from a core report, under `prefix`.
    pub fn absorb(&mut self, prefix: &str, text: impl Display) {
        for line in text.to_string().lines().filter(|l| !l.is_empty()) {
            let (k, v) = line.split_once('=').unwrap_or((line, ""));
            let key = if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
            self.lines.push((key, v.to_string()));
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Structured => {
                out.push_str(HEADER);
                out.push('\n');
                out.push_str(&format!("command={}\n", self.command));
                for (k, v) in &self.lines {
                    out.push_str(&format!("{k}={v}\n"));
                }
            }
            Format::Human => {
                out.push_str(&format!("cantorspeed {}\n", self.command));
                let width = self.lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in &self.lines {
                    out.push_str(&format!("  {k:width$}  {v}\n"));
                }
            }
        }
        out
    }
}

/// Parses a structured report back into its command and lines.
pub fn parse_structured(text: &str) -> Option<Report> {
    let mut lines = text.lines();
    if lines.next()? != HEADER {
        return None;
    }
    let command = lines.next()?.strip_prefix("command=")?.to_string();
    let lines = lines
        .map(|l| l.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect::<Option<Vec<_>>>()?;
    Some(Report { command, lines })
}
