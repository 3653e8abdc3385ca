use std::fmt::Display;

use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Lines,
}

/// Records are `key value` lines in `lines` format and `key: value` in
/// `human` format.
pub struct Out {
    format: Format,
}

impl Out {
    pub fn new(format: Format) -> Self {
        Out { format }
    }

    pub fn record(&self, key: &str, value: impl Display) {
        match self.format {
            Format::Lines => println!("{key} {value}"),
            Format::Human => println!("{key}: {value}"),
        }
    }

    /// Free text shown only in human format.
    pub fn note(&self, text: impl Display) {
        if self.format == Format::Human {
            println!("{text}");
        }
    }

    /// A pass/fail line for one check.
    pub fn check(&self, ok: bool, what: impl Display) {
        let tag = if ok { "ok" } else { "FAIL" };
        match self.format {
            Format::Lines => println!("{tag} {what}"),
            Format::Human => println!("[{tag}] {what}"),
        }
    }
}
