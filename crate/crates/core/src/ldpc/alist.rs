//! alist reader and writer.
//!
//! Layout (all indices 1-based):
//!
//! ```text
//! n m
//! max_col_degree max_row_degree
//! n column degrees
//! m row degrees
//! n lines of row indices per column (zero padded to max_col_degree)
//! m lines of column indices per row (zero padded to max_row_degree)
//! ```

use std::fmt::Write as _;

use super::{LdpcError, ParityCheckMatrix};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-blank line as a list of integers.
    fn next_numbers(&mut self, what: &str) -> Result<(usize, Vec<usize>), LdpcError> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let numbers = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| LdpcError::Parse {
                        line: i + 1,
                        msg: format!("expected a non-negative integer in {what}, found {tok:?}"),
                    })
                })
                .collect::<Result<_, _>>()?;
            return Ok((i + 1, numbers));
        }
        Err(LdpcError::Parse {
            line: self.last + 1,
            msg: format!("unexpected end of file while reading {what}"),
        })
    }

    fn next_exact(&mut self, count: usize, what: &str) -> Result<(usize, Vec<usize>), LdpcError> {
        let (line, numbers) = self.next_numbers(what)?;
        if numbers.len() != count {
            return Err(LdpcError::Parse {
                line,
                msg: format!("{what}: expected {count} values, found {}", numbers.len()),
            });
        }
        Ok((line, numbers))
    }
}

/// Reads one adjacency line: `degree` 1-based indices below `bound`, followed by
/// optional zero padding up to `max_degree`.
fn adjacency(
    lines: &mut Lines<'_>,
    degree: usize,
    max_degree: usize,
    bound: usize,
    what: &str,
) -> Result<Vec<usize>, LdpcError> {
    let (line, numbers) = lines.next_numbers(what)?;
    if numbers.len() < degree || numbers.len() > max_degree.max(degree) {
        return Err(LdpcError::Parse {
            line,
            msg: format!(
                "{what}: expected {degree} indices (padded to at most {max_degree}), found {}",
                numbers.len()
            ),
        });
    }
    let (entries, padding) = numbers.split_at(degree);
    if padding.iter().any(|&p| p != 0) {
        return Err(LdpcError::Parse {
            line,
            msg: format!("{what}: degree mismatch, more than {degree} nonzero indices"),
        });
    }
    entries
        .iter()
        .map(|&idx| {
            if idx == 0 || idx > bound {
                Err(LdpcError::Parse {
                    line,
                    msg: format!("{what}: index {idx} out of range 1..={bound}"),
                })
            } else {
                Ok(idx - 1)
            }
        })
        .collect()
}

pub(super) fn parse(text: &str) -> Result<ParityCheckMatrix, LdpcError> {
    let mut lines = Lines::new(text);
    let (_, header) = lines.next_exact(2, "header (n m)")?;
    let (n, m) = (header[0], header[1]);
    let (_, maxima) = lines.next_exact(2, "maximum degrees")?;
    let (max_col, max_row) = (maxima[0], maxima[1]);
    let (col_line, col_deg) = lines.next_exact(n, "column degrees")?;
    let (row_line, row_deg) = lines.next_exact(m, "row degrees")?;
    if let Some(&d) = col_deg.iter().find(|&&d| d > max_col) {
        return Err(LdpcError::Parse {
            line: col_line,
            msg: format!("column degree {d} exceeds declared maximum {max_col}"),
        });
    }
    if let Some(&d) = row_deg.iter().find(|&&d| d > max_row) {
        return Err(LdpcError::Parse {
            line: row_line,
            msg: format!("row degree {d} exceeds declared maximum {max_row}"),
        });
    }

    let mut cols = Vec::with_capacity(n);
    for (j, &d) in col_deg.iter().enumerate() {
        cols.push(adjacency(&mut lines, d, max_col, m, &format!("column {}", j + 1))?);
    }
    let mut rows = Vec::with_capacity(m);
    let mut row_lines = Vec::with_capacity(m);
    for (i, &d) in row_deg.iter().enumerate() {
        rows.push(adjacency(&mut lines, d, max_row, n, &format!("row {}", i + 1))?);
        row_lines.push(lines.last);
    }

    // Column lists must describe the same edge set as the row lists.
    let mut from_cols = vec![Vec::new(); m];
    for (j, col) in cols.iter().enumerate() {
        for &i in col {
            from_cols[i].push(j);
        }
    }
    for (i, row) in rows.iter().enumerate() {
        let mut sorted = row.clone();
        sorted.sort_unstable();
        if sorted != from_cols[i] {
            return Err(LdpcError::Parse {
                line: row_lines[i],
                msg: format!("row {} disagrees with the column adjacency lists", i + 1),
            });
        }
    }

    ParityCheckMatrix::from_checks(n, &rows)
}

pub(super) fn write(h: &ParityCheckMatrix) -> String {
    let n = h.n_vars();
    let m = h.n_checks();
    let mut cols = vec![Vec::new(); n];
    for c in 0..m {
        for v in h.check_vars(c) {
            cols[v].push(c);
        }
    }
    let max_col = cols.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = (0..m).map(|c| h.check_degree(c)).max().unwrap_or(0);

    let mut out = String::new();
    let _ = writeln!(out, "{n} {m}");
    let _ = writeln!(out, "{max_col} {max_row}");
    push_list(&mut out, cols.iter().map(Vec::len));
    push_list(&mut out, (0..m).map(|c| h.check_degree(c)));
    for col in &cols {
        push_padded(&mut out, col.iter().copied(), max_col);
    }
    for c in 0..m {
        push_padded(&mut out, h.check_vars(c), max_row);
    }
    out
}

fn push_list(out: &mut String, items: impl Iterator<Item = usize>) {
    let mut first = true;
    for x in items {
        if !first {
            out.push(' ');
        }
        first = false;
        let _ = write!(out, "{x}");
    }
    out.push('\n');
}

fn push_padded(out: &mut String, idx: impl Iterator<Item = usize>, width: usize) {
    let mut items: Vec<usize> = idx.map(|i| i + 1).collect();
    items.resize(width, 0);
    push_list(out, items.into_iter());
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::{hamming7, TOY_ALIST};
    use super::*;

    fn parse_err_line(text: &str) -> usize {
        match parse(text) {
            Err(LdpcError::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn toy_fixture_loads() {
        let h = parse(TOY_ALIST).unwrap();
        assert_eq!(h.to_checks(), vec![vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn writer_reproduces_padded_fixture() {
        assert_eq!(write(&parse(TOY_ALIST).unwrap()), TOY_ALIST);
    }

    #[test]
    fn unpadded_lists_accepted() {
        let text = "3 2\n2 2\n1 2 1\n2 2\n1\n1 2\n2\n1 2\n2 3\n";
        assert_eq!(parse(text).unwrap(), parse(TOY_ALIST).unwrap());
    }

    #[test]
    fn round_trip() {
        let h = hamming7();
        let again = parse(&write(&h)).unwrap();
        assert_eq!(again, h);
        assert_eq!(write(&again), write(&h));
    }

    #[test]
    fn truncated_file() {
        let truncated: String = TOY_ALIST.lines().take(6).map(|l| format!("{l}\n")).collect();
        assert_eq!(parse_err_line(&truncated), 7);
        assert_eq!(parse_err_line(""), 1);
    }

    #[test]
    fn malformed_header() {
        assert_eq!(parse_err_line("3\n"), 1);
        assert_eq!(parse_err_line("3 x\n"), 1);
    }

    #[test]
    fn index_out_of_range() {
        let text = TOY_ALIST.replace("2 3\n", "2 4\n");
        assert_eq!(parse_err_line(&text), 9);
    }

    #[test]
    fn degree_mismatch() {
        // column 1 declares degree 1 but lists two rows
        let text = TOY_ALIST.replacen("1 0\n", "1 2\n", 1);
        assert_eq!(parse_err_line(&text), 5);
        // row adjacency disagrees with columns
        let text = TOY_ALIST.replace("1 2\n2 3\n", "1 3\n2 3\n");
        assert!(parse(&text).is_err());
    }
}
