//! Reading observations from user files.
//!
//! Two layouts are accepted: plain text with one number per line (`#` starts
//! a comment), or CSV with a header containing a `value` column.

use std::path::Path;

use egfkit::Sample;

use crate::CliError;

pub fn read_sample(path: &Path) -> Result<Sample, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    parse_sample(&text).map_err(|msg| CliError::io(format!("{}: {msg}", path.display())))
}

pub fn parse_sample(text: &str) -> Result<Sample, String> {
    let values = if looks_like_csv(text) {
        parse_csv(text)?
    } else {
        parse_lines(text)?
    };
    if values.len() < 2 {
        return Err(format!("need at least 2 observations, found {}", values.len()));
    }
    if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(format!("observations must be finite and positive, found {bad}"));
    }
    Sample::new(values).map_err(|e| e.to_string())
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn looks_like_csv(text: &str) -> bool {
    text.lines()
        .map(strip_comment)
        .find(|l| !l.is_empty())
        .is_some_and(|first| {
            first
                .split(',')
                .any(|field| field.trim().trim_matches('"').eq_ignore_ascii_case("value"))
        })
}

fn parse_lines(text: &str) -> Result<Vec<f64>, String> {
    text.lines()
        .enumerate()
        .filter_map(|(k, raw)| {
            let line = strip_comment(raw);
            (!line.is_empty()).then(|| {
                line.parse::<f64>()
                    .map_err(|_| format!("line {}: '{line}' is not a number", k + 1))
            })
        })
        .collect()
}

fn parse_csv(text: &str) -> Result<Vec<f64>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| e.to_string())?.clone();
    let col = headers
        .iter()
        .position(|h| h.eq_ignore_ascii_case("value"))
        .ok_or("csv header has no 'value' column")?;
    let mut out = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let field = rec.get(col).unwrap_or("");
        let v = field
            .parse::<f64>()
            .map_err(|_| format!("row {}: '{field}' is not a number", k + 2))?;
        out.push(v);
    }
    Ok(out)
}
