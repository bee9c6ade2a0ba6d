use crate::error::{Error, Result};

/// Parses one row per line of whitespace-separated integers. Blank lines and
/// text after `#` are ignored. Every row must have the same length; when `d`
/// is given it must equal that length.
pub fn parse_row_stream(text: &str, d: Option<usize>) -> Result<Vec<Vec<i64>>> {
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut width = d;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<i64>().map_err(|_| Error::Parse {
                    line: i + 1,
                    message: format!("`{tok}` is not an integer"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        match width {
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected {w} entries, found {}", row.len()),
                })
            }
            _ => width = Some(row.len()),
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn format_row_stream(rows: &[Vec<i64>]) -> String {
    let mut out = String::new();
    for r in rows {
        let vs: Vec<String> = r.iter().map(|v| v.to_string()).collect();
        out.push_str(&vs.join(" "));
        out.push('\n');
    }
    out
}
