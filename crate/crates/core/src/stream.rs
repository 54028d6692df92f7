//! Flat-file formats: interval streams, gadget secrets.
//!
//! A stream file is a version header followed by one interval per line:
//!
//! ```text
//! # intsel stream v1
//! [0/1 10/1]
//! [1/2 3/2)
//! ```
//!
//! Brackets encode openness (`[`/`]` closed, `(`/`)` open), coordinates are
//! always `numerator/denominator` in lowest terms, and `#` starts a comment.
//! Emission is canonical, so emitted files parse back bit-exactly.

use num::BigInt;
use thiserror::Error;

use crate::adversary::{GadgetKind, GadgetSecret, Phase};
use crate::interval::Interval;
use crate::key::Openness;
use crate::rational::Rational;

pub const STREAM_HEADER: &str = "# intsel stream v1";
pub const SECRET_HEADER: &str = "# intsel secret v1";

/// Errors for both file formats.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FileError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: interval is empty or has bounds out of order")]
    Range { line: usize },
}

fn parse_error(line: usize, message: impl Into<String>) -> FileError {
    FileError::Parse {
        line,
        message: message.into(),
    }
}

fn check_version(line_no: usize, line: &str, format: &str) -> Result<(), FileError> {
    let prefix = format!("# intsel {format} v");
    if let Some(rest) = line.strip_prefix(&prefix) {
        if rest.trim() != "1" {
            return Err(parse_error(
                line_no,
                format!("unsupported {format} format version {}", rest.trim()),
            ));
        }
    }
    Ok(())
}

fn parse_rational(token: &str, line: usize) -> Result<Rational, FileError> {
    let (num, den) = token
        .split_once('/')
        .ok_or_else(|| parse_error(line, format!("expected numerator/denominator, got `{token}`")))?;
    let num: BigInt = num
        .parse()
        .map_err(|_| parse_error(line, format!("bad numerator `{num}`")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| parse_error(line, format!("bad denominator `{den}`")))?;
    if den <= BigInt::from(0) {
        return Err(parse_error(line, "denominator must be positive"));
    }
    Ok(Rational::new(num, den))
}

/// Parses a stream file; intervals get arrival ids in file order.
pub fn parse_stream(text: &str) -> Result<Vec<Interval>, FileError> {
    let mut intervals = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            check_version(line_no, line, "stream")?;
            continue;
        }
        let lo_openness = match line.chars().next() {
            Some('[') => Openness::Closed,
            Some('(') => Openness::Open,
            _ => return Err(parse_error(line_no, "interval must start with `[` or `(`")),
        };
        let hi_openness = match line.chars().last() {
            Some(']') => Openness::Closed,
            Some(')') => Openness::Open,
            _ => return Err(parse_error(line_no, "interval must end with `]` or `)`")),
        };
        let body = &line[1..line.len() - 1];
        let mut tokens = body.split_whitespace();
        let (Some(left), Some(right), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(parse_error(line_no, "expected exactly two endpoints"));
        };
        let left = parse_rational(left, line_no)?;
        let right = parse_rational(right, line_no)?;
        let degenerate_ok =
            lo_openness == Openness::Closed && hi_openness == Openness::Closed && left == right;
        if left > right || (left == right && !degenerate_ok) {
            return Err(FileError::Range { line: line_no });
        }
        intervals.push(Interval::with_openness(
            intervals.len() as u64,
            left,
            lo_openness,
            right,
            hi_openness,
        ));
    }
    Ok(intervals)
}

/// Canonical text form of a stream.
pub fn emit_stream(stream: &[Interval]) -> String {
    let mut out = String::from(STREAM_HEADER);
    out.push('\n');
    for interval in stream {
        out.push_str(&interval.to_string());
        out.push('\n');
    }
    out
}

/// Canonical text form of a gadget secret.
pub fn emit_secret(secret: &GadgetSecret) -> String {
    let mut out = String::from(SECRET_HEADER);
    out.push('\n');
    let (kind, size_key) = match secret.kind {
        GadgetKind::UnitGadget => ("unit-gadget", "blocks"),
        GadgetKind::TreeGadget => ("tree-gadget", "depth"),
    };
    out.push_str(&format!("kind={kind}\n"));
    out.push_str(&format!("n={}\n", secret.n));
    out.push_str(&format!("{size_key}={}\n", secret.size));
    for phase in &secret.phases {
        let values: Vec<String> = phase.pi.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("pi={}\n", values.join(" ")));
        out.push_str(&format!("i={}\n", phase.index));
    }
    out
}

/// Parses a secret file emitted by [`emit_secret`].
pub fn parse_secret(text: &str) -> Result<GadgetSecret, FileError> {
    let mut kind: Option<GadgetKind> = None;
    let mut n: Option<usize> = None;
    let mut size: Option<(String, usize)> = None;
    let mut phases: Vec<Phase> = Vec::new();
    let mut pending_pi: Option<Vec<usize>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            check_version(line_no, line, "secret")?;
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_error(line_no, "expected key=value"))?;
        match key.trim() {
            "kind" => {
                kind = Some(match value.trim() {
                    "unit-gadget" => GadgetKind::UnitGadget,
                    "tree-gadget" => GadgetKind::TreeGadget,
                    other => return Err(parse_error(line_no, format!("unknown kind `{other}`"))),
                });
            }
            "n" => {
                n = Some(parse_usize(value, line_no)?);
            }
            "blocks" | "depth" => {
                size = Some((key.trim().to_string(), parse_usize(value, line_no)?));
            }
            "pi" => {
                if pending_pi.is_some() {
                    return Err(parse_error(line_no, "pi record without a following i record"));
                }
                let values = value
                    .split_whitespace()
                    .map(|tok| parse_usize(tok, line_no))
                    .collect::<Result<Vec<_>, _>>()?;
                pending_pi = Some(values);
            }
            "i" => {
                let pi = pending_pi
                    .take()
                    .ok_or_else(|| parse_error(line_no, "i record without a preceding pi record"))?;
                phases.push(Phase {
                    pi,
                    index: parse_usize(value, line_no)?,
                });
            }
            other => return Err(parse_error(line_no, format!("unknown key `{other}`"))),
        }
    }

    let kind = kind.ok_or_else(|| parse_error(0, "missing kind record"))?;
    let n = n.ok_or_else(|| parse_error(0, "missing n record"))?;
    let (size_key, size) = size.ok_or_else(|| parse_error(0, "missing blocks/depth record"))?;
    let expected_key = match kind {
        GadgetKind::UnitGadget => "blocks",
        GadgetKind::TreeGadget => "depth",
    };
    if size_key != expected_key {
        return Err(parse_error(0, format!("expected `{expected_key}` for this kind")));
    }
    if pending_pi.is_some() {
        return Err(parse_error(0, "trailing pi record without an i record"));
    }
    let expected_phases = match kind {
        GadgetKind::UnitGadget => size,
        GadgetKind::TreeGadget => (1usize << size) - 1,
    };
    if phases.len() != expected_phases {
        return Err(parse_error(
            0,
            format!("expected {expected_phases} phases, found {}", phases.len()),
        ));
    }
    for phase in &phases {
        let mut sorted = phase.pi.clone();
        sorted.sort_unstable();
        if !sorted.iter().copied().eq(1..=n) {
            return Err(parse_error(0, "pi record is not a permutation of 1..=n"));
        }
        if !(1..=n).contains(&phase.index) {
            return Err(parse_error(0, "index record out of range"));
        }
    }
    Ok(GadgetSecret {
        kind,
        n,
        size,
        phases,
    })
}

fn parse_usize(token: &str, line: usize) -> Result<usize, FileError> {
    token
        .trim()
        .parse()
        .map_err(|_| parse_error(line, format!("bad integer `{}`", token.trim())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{gen_tree_gadget, gen_unit_gadget};
    use crate::rational::rat_int;

    #[test]
    fn parses_basic_forms() {
        let stream = parse_stream("# intsel stream v1\n[0/1 10/1]\n[1/2 3/2)\n(2/1 3/1]\n").unwrap();
        assert_eq!(stream.len(), 3);
        assert_eq!(stream[0].lo.openness, Openness::Closed);
        assert_eq!(stream[1].hi.openness, Openness::Open);
        assert_eq!(stream[2].lo.openness, Openness::Open);
        assert_eq!(stream[1].lo.coord, crate::rational::rat(1, 2));
        assert_eq!(stream[2].id, 2);
    }

    #[test]
    fn rejects_inverted_bounds() {
        let err = parse_stream("[3/1 2/1]\n").unwrap_err();
        assert_eq!(err, FileError::Range { line: 1 });
        // A closed point interval is fine; a half-open one is empty.
        assert!(parse_stream("[3/1 3/1]\n").is_ok());
        assert!(matches!(
            parse_stream("[3/1 3/1)\n"),
            Err(FileError::Range { line: 1 })
        ));
    }

    #[test]
    fn reports_malformed_lines_with_numbers() {
        let err = parse_stream("# ok\n[1/2 oops)\n").unwrap_err();
        assert!(matches!(err, FileError::Parse { line: 2, .. }));
        let err = parse_stream("[1/0 2/1]\n").unwrap_err();
        assert!(matches!(err, FileError::Parse { line: 1, .. }));
        let err = parse_stream("# intsel stream v9\n").unwrap_err();
        assert!(matches!(err, FileError::Parse { line: 1, .. }));
    }

    #[test]
    fn emit_is_canonical_and_roundtrips() {
        let stream = vec![
            Interval::closed(0, rat_int(0), rat_int(10)),
            Interval::half_open(1, crate::rational::rat(2, 4), crate::rational::rat(6, 4)),
        ];
        let text = emit_stream(&stream);
        // Lowest terms and explicit /1 denominators.
        assert!(text.contains("[0/1 10/1]"));
        assert!(text.contains("[1/2 3/2)"));
        let parsed = parse_stream(&text).unwrap();
        assert_eq!(parsed, stream);
        assert_eq!(emit_stream(&parsed), text);
        assert_eq!(emit_stream(&[]), format!("{STREAM_HEADER}\n"));
    }

    #[test]
    fn secret_roundtrip_both_kinds() {
        let (_, unit) = gen_unit_gadget(3, 4, 17);
        assert_eq!(parse_secret(&emit_secret(&unit)).unwrap(), unit);
        let (_, tree) = gen_tree_gadget(2, 3, 17);
        assert_eq!(parse_secret(&emit_secret(&tree)).unwrap(), tree);
    }

    #[test]
    fn secret_parse_rejects_broken_records() {
        let (_, unit) = gen_unit_gadget(2, 3, 1);
        let text = emit_secret(&unit);
        let missing_i = text.replacen("i=", "j=", 1);
        assert!(parse_secret(&missing_i).is_err());
        let bad_perm = text.replacen("pi=", "pi=9 ", 1);
        assert!(parse_secret(&bad_perm).is_err());
    }
}
