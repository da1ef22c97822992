//! Plain-text matrix format.
//!
//! ```text
//! # optional comment lines
//! p q k
//! c c c ...        (p lines of q tokens; `*` marks an unassigned cell)
//! ```
//!
//! [`write_matrix`] emits single-space separated tokens and a trailing
//! newline on every line, so `write_matrix(&parse_matrix(s)?)` is a fixed
//! point for anything this module wrote.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::matrix::{ColorMatrix, Colour, UNASSIGNED};

pub fn write_matrix(m: &ColorMatrix) -> String {
    m.to_string()
}

pub fn parse_matrix(text: &str) -> Result<ColorMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l))
        .filter(|(_, l)| !l.trim_start().starts_with('#') && !l.trim().is_empty());

    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "missing header `p q k`"))?;
    let fields = tokens(header);
    if fields.len() != 3 {
        let col = fields.get(3).map_or(1, |t| t.0);
        return Err(parse_err(hline, col, "header must be `p q k`"));
    }
    let mut dims = [0usize; 3];
    for (slot, (col, tok)) in dims.iter_mut().zip(&fields) {
        *slot = tok
            .parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| {
                parse_err(
                    hline,
                    *col,
                    format!("expected a positive integer, found `{tok}`"),
                )
            })?;
    }
    let [p, q, k] = dims;
    let mut m = ColorMatrix::new(p, q, k).map_err(|e| parse_err(hline, 1, e.to_string()))?;

    for i in 0..p {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| parse_err(hline + i + 1, 1, format!("expected {p} rows, found {i}")))?;
        let toks = tokens(line);
        if toks.len() != q {
            let col = toks.get(q).map_or(line.len() + 1, |t| t.0);
            return Err(parse_err(
                lno,
                col,
                format!("expected {q} entries, found {}", toks.len()),
            ));
        }
        for (j, (col, tok)) in toks.iter().enumerate() {
            let colour = if *tok == "*" {
                UNASSIGNED
            } else {
                match tok.parse::<usize>() {
                    Ok(c) if (1..=k).contains(&c) => c as Colour,
                    _ => {
                        return Err(parse_err(
                            lno,
                            *col,
                            format!("expected a colour in [1, {k}] or `*`, found `{tok}`"),
                        ))
                    }
                }
            };
            m.set(i, j, colour).expect("validated above");
        }
    }
    if let Some((lno, line)) = lines.next() {
        let col = line.len() - line.trim_start().len() + 1;
        return Err(parse_err(lno, col, "unexpected content after the last row"));
    }
    Ok(m)
}

/// Whitespace-separated tokens with their 1-based byte column.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (idx, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(idx),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..idx]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

impl fmt::Display for ColorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.rows(), self.cols(), self.palette_size())?;
        for i in 0..self.rows() {
            for (j, &c) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                if c == UNASSIGNED {
                    write!(f, "*")?;
                } else {
                    write!(f, "{c}")?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for ColorMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_matrix(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_with_comments_and_stars() {
        let text = "# a witness\n2 3 3\n1 2 *\n# mid\n2   3 1\n";
        let m = parse_matrix(text).unwrap();
        assert_eq!(m.shape(), (2, 3, 3));
        assert_eq!(m.get(0, 2), None);
        assert_eq!(m.get(1, 2), Some(1));
        assert_eq!(write_matrix(&m), "2 3 3\n1 2 *\n2 3 1\n");
    }

    #[test]
    fn diagnostics_point_at_token() {
        let err = parse_matrix("2 2 2\n1 3\n2 1\n").unwrap_err();
        assert!(
            matches!(
                err,
                Error::Parse {
                    line: 2,
                    column: 3,
                    ..
                }
            ),
            "{err:?}"
        );
        let err = parse_matrix("2 2 2\n1 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let err = parse_matrix("2 x 2\n").unwrap_err();
        assert!(
            matches!(
                err,
                Error::Parse {
                    line: 1,
                    column: 3,
                    ..
                }
            ),
            "{err:?}"
        );
        let err = parse_matrix("1 2 2\n1 2 1\n").unwrap_err();
        assert!(
            matches!(
                err,
                Error::Parse {
                    line: 2,
                    column: 5,
                    ..
                }
            ),
            "{err:?}"
        );
        let err = parse_matrix("1 1 1\n1\n1\n").unwrap_err();
        assert!(
            matches!(
                err,
                Error::Parse {
                    line: 3,
                    column: 1,
                    ..
                }
            ),
            "{err:?}"
        );
        assert!(parse_matrix("").is_err());
    }

    fn arb_matrix() -> impl Strategy<Value = ColorMatrix> {
        (1usize..6, 1usize..6, 1usize..40).prop_flat_map(|(p, q, k)| {
            proptest::collection::vec(0..=k as Colour, p * q).prop_map(move |cells| {
                let rows: Vec<Vec<Colour>> = cells.chunks(q).map(|c| c.to_vec()).collect();
                ColorMatrix::from_rows(k, &rows).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(m in arb_matrix()) {
            let text = write_matrix(&m);
            let back = parse_matrix(&text).unwrap();
            prop_assert_eq!(&back, &m);
            prop_assert_eq!(write_matrix(&back), text);
        }
    }
}
