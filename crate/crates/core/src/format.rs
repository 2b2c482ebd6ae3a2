//! The plain-text matrix-space file.
//!
//! ```text
//! mspace 1
//! field 2
//! shape 2 3
//! dim 2
//! 1 0 0
//! 0 0 0
//!
//! 0 1 0
//! 0 0 1
//! ```
//!
//! Lines starting with `#` are ignored anywhere. Blocks are separated by a
//! single blank line; a basis that does not have the declared dimension is
//! rejected.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::FieldOrder;
use crate::matrix::Mat;
use crate::space::MatSpace;

pub const FORMAT_VERSION: u32 = 1;

/// A parsed file: the basis exactly as written.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MSpaceFile {
    pub order: FieldOrder,
    pub rows: usize,
    pub cols: usize,
    pub basis: Vec<Mat>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Parses `"<key> <values...>"`, returning the values.
fn header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, key: &str, count: usize, last: usize) -> Result<(usize, Vec<usize>)> {
    let (no, line) = lines
        .next()
        .ok_or_else(|| parse_err(last + 1, format!("missing `{key}` header")))?;
    let mut words = line.split(' ');
    if words.next() != Some(key) {
        return Err(parse_err(no, format!("expected `{key}` header, found {line:?}")));
    }
    let values = words
        .map(|w| w.parse::<usize>().map_err(|_| parse_err(no, format!("bad number {w:?} in `{key}` header"))))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != count {
        return Err(parse_err(no, format!("`{key}` takes {count} value(s)")));
    }
    Ok((no, values))
}

impl MSpaceFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut total = 0;
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| {
                total = i + 1;
                (i + 1, l.trim_end_matches('\r'))
            })
            .filter(|(_, l)| !l.starts_with('#'));

        let (no, version) = header(&mut lines, "mspace", 1, 0)?;
        if version[0] != FORMAT_VERSION as usize {
            return Err(parse_err(no, format!("unsupported format version {}", version[0])));
        }
        let (no, field) = header(&mut lines, "field", 1, no)?;
        let order = FieldOrder::new(field[0] as u32).map_err(|e| parse_err(no, e.to_string()))?;
        let (no, shape) = header(&mut lines, "shape", 2, no)?;
        let (rows, cols) = (shape[0], shape[1]);
        if rows == 0 || cols == 0 {
            return Err(parse_err(no, "shape must be positive"));
        }
        let (mut last, dim) = header(&mut lines, "dim", 1, no)?;
        let dim = dim[0];
        if dim > rows * cols {
            return Err(parse_err(last, format!("dim {dim} exceeds {rows}*{cols}")));
        }

        let mut basis = Vec::with_capacity(dim);
        let mut block_starts = Vec::with_capacity(dim);
        for b in 0..dim {
            if b > 0 {
                match lines.next() {
                    Some((_, "")) => {}
                    Some((n, l)) => return Err(parse_err(n, format!("expected a blank line between blocks, found {l:?}"))),
                    None => return Err(parse_err(last + 1, format!("expected {dim} blocks, found {b}"))),
                }
            }
            let mut digits = Vec::with_capacity(rows * cols);
            for i in 0..rows {
                let (n, line) = lines
                    .next()
                    .ok_or_else(|| parse_err(last + 1, format!("block {} ends after {i} of {rows} rows", b + 1)))?;
                if i == 0 {
                    block_starts.push(n);
                }
                last = n;
                let row: Vec<&str> = line.split(' ').collect();
                if row.len() != cols {
                    return Err(parse_err(n, format!("expected {cols} entries, found {}", row.len())));
                }
                for w in row {
                    let d: u8 = w
                        .parse()
                        .ok()
                        .filter(|d| *d < order.get())
                        .ok_or_else(|| parse_err(n, format!("{w:?} is not a digit of {order}")))?;
                    digits.push(d);
                }
            }
            basis.push(Mat::from_digits(rows, cols, order, digits).expect("rows*cols digits"));
        }
        if let Some((n, l)) = lines.find(|(_, l)| !l.is_empty()) {
            return Err(parse_err(n, format!("unexpected content after {dim} blocks: {l:?}")));
        }

        // the first block that does not raise the dimension is redundant
        for k in 1..=basis.len() {
            let span = MatSpace::span(rows, cols, order, &basis[..k]).expect("matching shapes");
            if span.dim() < k {
                return Err(parse_err(
                    block_starts[k - 1],
                    format!("block {k} is linearly dependent on the previous blocks (declared dim {dim})"),
                ));
            }
        }
        Ok(MSpaceFile { order, rows, cols, basis })
    }

    /// The file holding the canonical basis of `space`.
    pub fn from_space(space: &MatSpace) -> Self {
        MSpaceFile {
            order: space.order(),
            rows: space.rows(),
            cols: space.cols(),
            basis: space.basis(),
        }
    }

    pub fn to_space(&self) -> MatSpace {
        MatSpace::span(self.rows, self.cols, self.order, &self.basis).expect("validated at parse time")
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

impl FromStr for MSpaceFile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        MSpaceFile::parse(s)
    }
}

impl fmt::Display for MSpaceFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mspace {FORMAT_VERSION}")?;
        writeln!(f, "field {}", self.order.get())?;
        writeln!(f, "shape {} {}", self.rows, self.cols)?;
        writeln!(f, "dim {}", self.basis.len())?;
        for (b, m) in self.basis.iter().enumerate() {
            if b > 0 {
                writeln!(f)?;
            }
            for i in 0..m.rows() {
                writeln!(f, "{}", digits_line(m.row(i)))?;
            }
        }
        Ok(())
    }
}

/// `[0, 0, 1]` as `"0 0 1"`.
pub fn digits_line(v: &[u8]) -> String {
    v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
}

/// A matrix as its rows, `"1 0 0; 0 1 0"`.
pub fn matrix_line(m: &Mat) -> String {
    (0..m.rows()).map(|i| digits_line(m.row(i))).collect::<Vec<_>>().join("; ")
}

/// Parses [`matrix_line`] output back.
pub fn parse_matrix_line(s: &str, order: FieldOrder) -> Result<Mat> {
    let rows: Vec<Vec<i64>> = s
        .split(';')
        .map(|r| {
            r.split_whitespace()
                .map(|w| w.parse::<i64>().map_err(|_| parse_err(1, format!("bad digit {w:?}"))))
                .collect()
        })
        .collect::<Result<_>>()?;
    Mat::from_rows(order, &rows)
}

pub fn parse_mspace(text: &str) -> Result<MatSpace> {
    Ok(MSpaceFile::parse(text)?.to_space())
}

pub fn write_mspace(space: &MatSpace) -> String {
    MSpaceFile::from_space(space).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    /// The exceptional space with its basis written in reverse order.
    fn j3_reversed() -> String {
        let mut f = MSpaceFile::from_space(&models::model_j3());
        f.basis.reverse();
        f.to_string()
    }

    fn line_of(e: Error) -> usize {
        match e {
            Error::Parse { line, .. } => line,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn parses_with_comments() {
        let text = format!("# exceptional space\n{}", j3_reversed().replacen("dim 5\n", "dim 5\n# basis follows\n", 1));
        let f = MSpaceFile::parse(&text).unwrap();
        assert_eq!((f.rows, f.cols, f.dim()), (3, 3, 5));
        assert_eq!(f.to_space(), models::model_j3());
    }

    #[test]
    fn canonical_files_round_trip() {
        let canon = write_mspace(&models::model_j3());
        assert_eq!(MSpaceFile::parse(&canon).unwrap().to_string(), canon);
        // serializing a parsed file canonicalizes it
        assert_eq!(write_mspace(&parse_mspace(&j3_reversed()).unwrap()), canon);
    }

    #[test]
    fn zero_space() {
        let text = "mspace 1\nfield 3\nshape 2 2\ndim 0\n";
        let v = parse_mspace(text).unwrap();
        assert_eq!(v.dim(), 0);
        assert_eq!(write_mspace(&v), text);
    }

    #[test]
    fn errors_name_the_line() {
        assert_eq!(line_of(MSpaceFile::parse("mspace 2\n").unwrap_err()), 1);
        assert_eq!(line_of(MSpaceFile::parse("# c\nmspace 1\nfeld 2\n").unwrap_err()), 3);
        let e = MSpaceFile::parse("mspace 1\nfield 4\nshape 1 1\ndim 1\n1\n").unwrap_err();
        assert!(e.to_string().contains("prime fields only"));
        assert_eq!(line_of(e), 2);
        let bad_digit = "mspace 1\nfield 2\nshape 1 2\ndim 1\n1 2\n";
        assert_eq!(line_of(MSpaceFile::parse(bad_digit).unwrap_err()), 5);
        let short = "mspace 1\nfield 2\nshape 2 2\ndim 1\n1 0\n";
        assert_eq!(line_of(MSpaceFile::parse(short).unwrap_err()), 6);
    }

    #[test]
    fn redundant_basis_is_rejected() {
        let text = "mspace 1\nfield 2\nshape 1 3\ndim 3\n1 0 0\n\n0 1 0\n\n1 1 0\n";
        let e = MSpaceFile::parse(text).unwrap_err();
        assert_eq!(line_of(e.clone()), 9);
        assert!(e.to_string().contains("dependent"));
    }

    #[test]
    fn blocks_need_blank_separators() {
        let text = "mspace 1\nfield 2\nshape 1 2\ndim 2\n1 0\n0 1\n";
        assert_eq!(line_of(MSpaceFile::parse(text).unwrap_err()), 6);
    }

    #[test]
    fn matrix_lines_round_trip() {
        let m = Mat::from_rows(FieldOrder::F3, &[[1, 2, 0], [0, 1, 1]]).unwrap();
        assert_eq!(matrix_line(&m), "1 2 0; 0 1 1");
        assert_eq!(parse_matrix_line(&matrix_line(&m), FieldOrder::F3).unwrap(), m);
    }
}
