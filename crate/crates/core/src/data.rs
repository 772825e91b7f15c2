//! LIBSVM text format ingestion.
//!
//! ```text
//! +1 1:0.5 3:-2.0   # trailing comments are ignored
//! -1
//! ```
//!
//! Each non-blank line is a label followed by `index:value` pairs with
//! 1-based indices. Indices are converted to 0-based columns in
//! [`to_dataset`] and never leave this module 1-based.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::problems::{Dataset, FeatureMatrix};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: invalid label {token:?}")]
    Label { line: usize, token: String },
    #[error("line {line}: expected index:value, got {token:?}")]
    MissingColon { line: usize, token: String },
    #[error("line {line}: invalid feature index in {token:?}")]
    Index { line: usize, token: String },
    #[error("line {line}: invalid feature value in {token:?}")]
    Value { line: usize, token: String },
    #[error("line {line}: feature index {index} appears more than once")]
    Duplicate { line: usize, index: usize },
    #[error("line {line}: {source}")]
    Io { line: usize, source: io::Error },
}

/// One parsed line: raw label and `(1-based index, value)` pairs in
/// increasing index order.
#[derive(Debug, Clone, PartialEq)]
pub struct LibsvmRecord {
    pub label: f64,
    pub entries: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedLibsvm {
    pub records: Vec<LibsvmRecord>,
    /// Largest index seen (0 when every record is empty).
    pub n: usize,
    /// Number of lines whose indices had to be sorted.
    pub reordered_lines: usize,
}

fn parse_line(line_no: usize, body: &str) -> Result<LibsvmRecord, ParseError> {
    let mut tokens = body.split_ascii_whitespace();
    // caller guarantees at least one token
    let label_tok = tokens.next().unwrap_or_default();
    let label: f64 = label_tok
        .parse()
        .ok()
        .filter(|v: &f64| v.is_finite())
        .ok_or_else(|| ParseError::Label { line: line_no, token: label_tok.to_string() })?;
    let mut entries = Vec::new();
    for tok in tokens {
        let (idx, val) = tok
            .split_once(':')
            .ok_or_else(|| ParseError::MissingColon { line: line_no, token: tok.to_string() })?;
        let index: usize = idx
            .parse()
            .ok()
            .filter(|i| *i >= 1)
            .ok_or_else(|| ParseError::Index { line: line_no, token: tok.to_string() })?;
        let value: f64 = val
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| ParseError::Value { line: line_no, token: tok.to_string() })?;
        entries.push((index, value));
    }
    Ok(LibsvmRecord { label, entries })
}

/// Parses LIBSVM text. Blank lines and `#` comments are skipped; duplicate
/// indices within a line are an error; out-of-order indices are sorted and
/// counted in [`ParsedLibsvm::reordered_lines`].
pub fn parse_libsvm<R: BufRead>(reader: R) -> Result<ParsedLibsvm, ParseError> {
    let mut records = Vec::new();
    let mut n = 0;
    let mut reordered_lines = 0;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|source| ParseError::Io { line: line_no, source })?;
        let body = line.split('#').next().unwrap_or_default();
        if body.trim().is_empty() {
            continue;
        }
        let mut rec = parse_line(line_no, body)?;
        if rec.entries.windows(2).any(|w| w[0].0 >= w[1].0) {
            let sorted_already = rec.entries.windows(2).all(|w| w[0].0 <= w[1].0);
            rec.entries.sort_by_key(|e| e.0);
            if let Some(w) = rec.entries.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(ParseError::Duplicate { line: line_no, index: w[0].0 });
            }
            if !sorted_already {
                reordered_lines += 1;
            }
        }
        if let Some(&(last, _)) = rec.entries.last() {
            n = n.max(last);
        }
        records.push(rec);
    }
    Ok(ParsedLibsvm { records, n, reordered_lines })
}

pub fn parse_libsvm_str(text: &str) -> Result<ParsedLibsvm, ParseError> {
    parse_libsvm(text.as_bytes())
}

/// Reads a LIBSVM file, transparently decompressing names ending in `.gz`.
pub fn read_libsvm_file(path: &Path) -> Result<ParsedLibsvm> {
    let file = File::open(path)?;
    let reader: Box<dyn Read> = if path.extension().is_some_and(|e| e == "gz") {
        Box::new(MultiGzDecoder::new(file))
    } else {
        Box::new(file)
    };
    Ok(parse_libsvm(BufReader::new(reader))?)
}

/// Canonical text form: one record per line, indices ascending, values in
/// shortest round-trip notation.
pub fn write_libsvm(records: &[LibsvmRecord]) -> String {
    let mut out = String::new();
    for rec in records {
        let _ = write!(out, "{}", rec.label);
        for (i, v) in &rec.entries {
            let _ = write!(out, " {i}:{v}");
        }
        out.push('\n');
    }
    out
}

/// How raw labels become `{-1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum LabelPolicy {
    /// `{-1, +1}` kept, `{0, 1}` mapped with `0 -> -1`; anything else is an
    /// error.
    #[default]
    Auto,
    /// Explicit two-value mapping.
    Map { negative: f64, positive: f64 },
}

fn map_labels(records: &[LibsvmRecord], policy: LabelPolicy) -> Result<Vec<f64>> {
    let (negative, positive) = match policy {
        LabelPolicy::Map { negative, positive } => (negative, positive),
        LabelPolicy::Auto => {
            let mut distinct: Vec<f64> = records.iter().map(|r| r.label).collect();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            if distinct.iter().all(|l| *l == -1.0 || *l == 1.0) {
                (-1.0, 1.0)
            } else if distinct.iter().all(|l| *l == 0.0 || *l == 1.0) {
                (0.0, 1.0)
            } else {
                let listed: Vec<String> = distinct.iter().map(|l| l.to_string()).collect();
                return Err(Error::Dataset(format!(
                    "cannot map labels {{{}}} to -1/+1 without an explicit mapping",
                    listed.join(", ")
                )));
            }
        }
    };
    records
        .iter()
        .map(|r| {
            if r.label == positive {
                Ok(1.0)
            } else if r.label == negative {
                Ok(-1.0)
            } else {
                Err(Error::Dataset(format!(
                    "label {} is neither {negative} nor {positive}",
                    r.label
                )))
            }
        })
        .collect()
}

/// Assembles a [`Dataset`]. `n_override` fixes the feature count when files
/// omit trailing all-zero columns; it must cover every index present.
pub fn to_dataset(parsed: &ParsedLibsvm, policy: LabelPolicy, n_override: Option<usize>) -> Result<Dataset> {
    if parsed.records.is_empty() {
        return Err(Error::Dataset("no records".into()));
    }
    let n = match n_override {
        Some(n) if n < parsed.n => {
            return Err(Error::Dataset(format!("feature count {n} is below the largest index {}", parsed.n)))
        }
        Some(n) => n,
        None => parsed.n,
    };
    let labels = map_labels(&parsed.records, policy)?;
    let rows: Vec<Vec<(usize, f64)>> = parsed
        .records
        .iter()
        .map(|r| r.entries.iter().map(|&(i, v)| (i - 1, v)).collect())
        .collect();
    Dataset::new(FeatureMatrix::from_rows(n, &rows)?, labels)
}

pub fn load_dataset(path: &Path, policy: LabelPolicy, n_override: Option<usize>) -> Result<Dataset> {
    to_dataset(&read_libsvm_file(path)?, policy, n_override)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_record() {
        let p = parse_libsvm_str("+1 1:0.5 3:-2.0").unwrap();
        assert_eq!(p.records, vec![LibsvmRecord { label: 1.0, entries: vec![(1, 0.5), (3, -2.0)] }]);
        assert_eq!(p.n, 3);
    }

    #[test]
    fn empty_features() {
        let p = parse_libsvm_str("-1\n").unwrap();
        assert_eq!(p.records[0], LibsvmRecord { label: -1.0, entries: vec![] });
        assert_eq!(p.n, 0);
    }

    #[test]
    fn malformed_value() {
        match parse_libsvm_str("1 2:abc").unwrap_err() {
            ParseError::Value { line, token } => {
                assert_eq!(line, 1);
                assert_eq!(token, "2:abc");
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn other_errors() {
        assert!(matches!(parse_libsvm_str("x 1:1"), Err(ParseError::Label { line: 1, .. })));
        assert!(matches!(parse_libsvm_str("1 1:1\n1 2"), Err(ParseError::MissingColon { line: 2, .. })));
        assert!(matches!(parse_libsvm_str("1 0:1"), Err(ParseError::Index { .. })));
        assert!(matches!(parse_libsvm_str("1 -3:1"), Err(ParseError::Index { .. })));
        assert!(matches!(parse_libsvm_str("1 1:inf"), Err(ParseError::Value { .. })));
        assert!(matches!(parse_libsvm_str("1 1:NaN"), Err(ParseError::Value { .. })));
        assert!(matches!(parse_libsvm_str("nan 1:1"), Err(ParseError::Label { .. })));
        assert!(matches!(parse_libsvm_str("1 2:1 1:3 2:4"), Err(ParseError::Duplicate { index: 2, .. })));
        assert!(matches!(parse_libsvm(&[b'1', b' ', 0xff, 0xfe][..]), Err(ParseError::Io { line: 1, .. })));
    }

    #[test]
    fn comments_blanks_and_reordering() {
        let text = "# header\n\n+1 3:1\t1:2   # note\n-1 2:0.25\n";
        let p = parse_libsvm_str(text).unwrap();
        assert_eq!(p.records.len(), 2);
        assert_eq!(p.records[0].entries, vec![(1, 2.0), (3, 1.0)]);
        assert_eq!(p.reordered_lines, 1);
        assert_eq!(p.n, 3);
    }

    #[test]
    fn label_policies() {
        let p = parse_libsvm_str("0 1:1\n1 2:1\n").unwrap();
        assert_eq!(to_dataset(&p, LabelPolicy::Auto, None).unwrap().labels(), &[-1.0, 1.0]);

        let p = parse_libsvm_str("-1 1:1\n+1 2:1\n").unwrap();
        let d = to_dataset(&p, LabelPolicy::Auto, None).unwrap();
        assert_eq!(d.labels(), &[-1.0, 1.0]);
        assert_eq!(d.dim(), 2);

        let p = parse_libsvm_str("1 1:1\n2 1:1\n3 1:1\n").unwrap();
        let err = to_dataset(&p, LabelPolicy::Auto, None).unwrap_err().to_string();
        assert!(err.contains("1, 2, 3"), "{err}");
        let d = to_dataset(&parse_libsvm_str("2 1:1\n4 1:1\n").unwrap(), LabelPolicy::Map { negative: 2.0, positive: 4.0 }, None)
            .unwrap();
        assert_eq!(d.labels(), &[-1.0, 1.0]);

        assert!(to_dataset(&parse_libsvm_str("").unwrap(), LabelPolicy::Auto, None).is_err());
    }

    #[test]
    fn feature_count_override() {
        let p = parse_libsvm_str("1 2:1\n-1 1:1\n").unwrap();
        assert_eq!(to_dataset(&p, LabelPolicy::Auto, Some(5)).unwrap().dim(), 5);
        assert!(to_dataset(&p, LabelPolicy::Auto, Some(1)).is_err());
    }

    #[test]
    fn gzip_input() {
        use flate2::write::GzEncoder;
        use std::io::Write;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tiny.svm.gz");
        let mut enc = GzEncoder::new(File::create(&path).unwrap(), flate2::Compression::default());
        enc.write_all(b"+1 1:0.5\n-1 2:1\n").unwrap();
        enc.finish().unwrap();
        let d = load_dataset(&path, LabelPolicy::Auto, None).unwrap();
        assert_eq!((d.samples(), d.dim()), (2, 2));
    }

    fn record() -> impl Strategy<Value = LibsvmRecord> {
        let label = prop_oneof![Just(-1.0), Just(1.0), -1e6f64..1e6];
        let entries = prop::collection::btree_map(1usize..500, -1e12f64..1e12, 0..20)
            .prop_map(|m| m.into_iter().collect::<Vec<_>>());
        (label, entries).prop_map(|(label, entries)| LibsvmRecord { label, entries })
    }

    proptest! {
        #[test]
        fn round_trip(records in prop::collection::vec(record(), 1..50)) {
            let text = write_libsvm(&records);
            let parsed = parse_libsvm_str(&text).unwrap();
            prop_assert_eq!(&parsed.records, &records);
            prop_assert_eq!(write_libsvm(&parsed.records), text);
        }

        #[test]
        fn never_panics_on_bytes(bytes in prop::collection::vec(any::<u8>(), 0..512)) {
            let _ = parse_libsvm(&bytes[..]);
        }

        #[test]
        fn never_panics_on_token_soup(s in "[ 0-9:+\\-.eE#a-z\t\n]{0,200}") {
            if let Ok(p) = parse_libsvm_str(&s) {
                let _ = to_dataset(&p, LabelPolicy::Auto, None);
            }
        }
    }
}
