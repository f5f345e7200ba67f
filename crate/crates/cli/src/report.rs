//! CSV reports with a `#` comment header and trailing summary comments.

use std::io::Write;

use qbmax_core::lemmas::Verdict;

pub const SCHEMA_VERSION: u32 = 1;

/// Cell formatting shared by every report: 17 significant digits.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

pub fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

impl Tally {
    pub fn add(&mut self, verdict: Verdict) {
        match verdict {
            Verdict::Pass => self.pass += 1,
            Verdict::Fail => self.fail += 1,
            Verdict::Skip => self.skip += 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub command: &'static str,
    /// Every effective setting, defaults included, in a fixed order.
    pub config: Vec<(&'static str, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Row verdict tally.
    pub tally: Tally,
    /// Largest `lhs - rhs` over failed checks; 0 without failures.
    pub max_violation: f64,
    /// Extra `key=value` lines appended after the rows.
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn new(
        command: &'static str,
        config: Vec<(&'static str, String)>,
        columns: &[&str],
    ) -> Self {
        ExperimentReport {
            command,
            config,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            tally: Tally::default(),
            max_violation: 0.0,
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// 0 when every check passed or was skipped, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.tally.fail > 0 {
            1
        } else {
            0
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> anyhow::Result<()> {
        writeln!(out, "# qbmax {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(out, "# schema_version={SCHEMA_VERSION}")?;
        writeln!(out, "# command={}", self.command)?;
        for (key, value) in &self.config {
            writeln!(out, "# config.{key}={value}")?;
        }
        {
            let mut csv = csv::Writer::from_writer(&mut out);
            csv.write_record(&self.columns)?;
            for row in &self.rows {
                csv.write_record(row)?;
            }
            csv.flush()?;
        }
        writeln!(out, "# summary.rows={}", self.rows.len())?;
        writeln!(out, "# summary.pass={}", self.tally.pass)?;
        writeln!(out, "# summary.fail={}", self.tally.fail)?;
        writeln!(out, "# summary.skip={}", self.tally.skip)?;
        writeln!(out, "# summary.max_violation={}", float(self.max_violation))?;
        for note in &self.notes {
            writeln!(out, "# {note}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }
}
