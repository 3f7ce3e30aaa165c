//! Table, JSON and TeX emission.

use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Tex,
}

/// A command result: a titled table for humans and TeX, a JSON document for
/// machines, and an optional verdict.
pub struct Report {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
    pub json: Value,
    /// `Some(false)` maps to the verification-failure exit code.
    pub pass: Option<bool>,
}

impl Report {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Self {
        Report {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
            json: Value::Null,
            pass: None,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.table(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Tex => self.tex(),
        }
    }

    fn table(&self) -> String {
        let width = |s: &str| s.chars().count();
        let mut widths: Vec<usize> = self.columns.iter().map(|c| width(c)).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(width(cell));
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c}{}", " ".repeat(w - width(c))))
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = format!("{}\n", self.title);
        out += &line(&self.columns);
        out.push('\n');
        out += &widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().join("  ");
        out.push('\n');
        for row in &self.rows {
            out += &line(row);
            out.push('\n');
        }
        for n in &self.notes {
            out += &format!("{n}\n");
        }
        out
    }

    fn tex(&self) -> String {
        let mut out = format!("% {}\n", self.title);
        out += &format!("% {}\n", self.columns.join(" & "));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| tex_cell(c)).collect();
            out += &format!("{} \\\\\n", cells.join(" & "));
        }
        for n in &self.notes {
            out += &format!("% {n}\n");
        }
        out
    }
}

fn tex_cell(c: &str) -> String {
    if c.chars().all(|ch| ch.is_ascii()) && !c.contains('^') {
        return c.to_string();
    }
    let mut s = String::new();
    let mut it = c.chars().peekable();
    let mut open_bar = false;
    while let Some(ch) = it.next() {
        match ch {
            'π' => s += "\\pi ",
            '·' => s += "\\cdot ",
            'χ' => s += "\\chi",
            'ℓ' => s += "\\ell ",
            '|' => {
                s += if open_bar { "\\rvert " } else { "\\lvert " };
                open_bar = !open_bar;
            }
            '⟨' => s += "\\langle ",
            '⟩' => s += "\\rangle ",
            '−' => s.push('-'),
            '^' => {
                // ^12 and ^(1/2) both become ^{…}
                s += "^{";
                if it.peek() == Some(&'(') {
                    it.next();
                    for d in it.by_ref() {
                        if d == ')' {
                            break;
                        }
                        s.push(if d == '−' { '-' } else { d });
                    }
                } else {
                    while let Some(&d) = it.peek() {
                        if d.is_ascii_digit() || d == '-' {
                            s.push(d);
                            it.next();
                        } else {
                            break;
                        }
                    }
                }
                s.push('}');
            }
            _ => s.push(ch),
        }
    }
    format!("${s}$")
}

/// Scientific notation with 15 significant digits, stable across runs.
pub fn num(x: f64) -> String {
    format!("{x:.15e}")
}

pub fn short(x: f64) -> String {
    format!("{x:.3e}")
}
