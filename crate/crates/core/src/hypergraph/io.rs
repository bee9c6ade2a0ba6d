use super::Hyperedge;
use crate::error::{Error, Result};

/// Parses one hyperedge per line, as whitespace-separated vertex indices
/// below `n`. Blank lines and text after `#` are ignored.
pub fn parse_edge_stream(text: &str, n: usize) -> Result<Vec<Hyperedge>> {
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: i + 1, message };
        let vertices = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| parse_err(format!("`{tok}` is not a vertex index")))
            })
            .collect::<Result<Vec<_>>>()?;
        let edge = Hyperedge::new(&vertices, n).map_err(|e| parse_err(e.to_string()))?;
        edges.push(edge);
    }
    Ok(edges)
}

pub fn format_edge_stream(edges: &[Hyperedge]) -> String {
    let mut out = String::new();
    for e in edges {
        let vs: Vec<String> = e.vertices().iter().map(|v| v.to_string()).collect();
        out.push_str(&vs.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let text = "# triangle\n0 1\n\n1 2  # second\n2\t0\n";
        let edges = parse_edge_stream(text, 3).unwrap();
        assert_eq!(edges.len(), 3);
        assert_eq!(edges[2].vertices(), vec![0, 2]);
        assert_eq!(format_edge_stream(&edges), "0 1\n1 2\n0 2\n");
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_edge_stream("0 1\n0 x\n", 3).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_edge_stream("0 1\n\n0 5\n", 3).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(parse_edge_stream("4\n", 6).is_err());
    }
}
