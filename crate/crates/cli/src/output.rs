use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Shortest representation that parses back to the same `f64`, with an
/// exponent for very small or large magnitudes. Negative zero prints as 0.
pub fn num(v: f64) -> String {
    if v == 0.0 {
        return "0.0".into();
    }
    format!("{v:?}")
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn csv_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// A command's result, renderable in either format.
pub trait Report: Serialize {
    fn csv(&self) -> String;

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => json(self),
            Format::Csv => self.csv(),
        }
    }
}
