//! The `.plm` text format.
//!
//! ```text
//! plmap v1
//! # comments run to the end of a line
//! piece 1 1            # slope 1 on [0, 1]
//! tail geometric 2     # self-similar under x -> 2x from T = 1
//!   piece 3/2 1/2      # absolute right endpoints covering (T, 2T]
//!   piece 2 3/2
//! end
//! ```
//!
//! Pieces are contiguous from 0. The tail is either `tail slope <s>`, with
//! the intercept implied by continuity, or a `tail geometric <base>` block
//! closed by `end`. Numbers are integers or `p/q`; decimals are rejected.
//! The serializer writes the canonical form, so equal maps serialize to
//! identical bytes.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::error::Error;
use crate::plcore::{Piece, PlMap, RawMap, RawTail, Tail};
use crate::rational::{parse_rational, show, ExactRational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    Invalid(Error),
}

/// A rejection with its 1-based source location.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Syntax(msg) => {
                write!(f, "{}:{}: syntax error: {}", self.line, self.column, msg)
            }
            ParseErrorKind::Invalid(err) => {
                write!(f, "{}:{}: invalid map: {}", self.line, self.column, err)
            }
        }
    }
}

impl ParseError {
    fn syntax(line: usize, column: usize, msg: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            kind: ParseErrorKind::Syntax(msg.into()),
        }
    }

    /// The validation error, when the text was well-formed but the map was not.
    pub fn validation(&self) -> Option<&Error> {
        match &self.kind {
            ParseErrorKind::Invalid(e) => Some(e),
            ParseErrorKind::Syntax(_) => None,
        }
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let code = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in code
        .char_indices()
        .chain(std::iter::once((code.len(), ' ')))
    {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &code[s..i],
                    column: code[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

#[derive(Clone, Copy)]
struct Location {
    line: usize,
    column: usize,
}

enum State {
    Header,
    Pieces,
    Pattern,
    Done,
}

/// Parses a `.plm` document and validates the described map.
pub fn parse(text: &str) -> Result<PlMap, ParseError> {
    let mut state = State::Header;
    let mut raw = RawMap::default();
    let mut piece_locations: Vec<Location> = Vec::new();
    let mut slope_locations: Vec<Location> = Vec::new();
    let mut tail_location = Location { line: 1, column: 1 };
    let mut end_location = None;
    let mut base = None;
    let mut pattern = Vec::new();
    let mut last_line = 0;

    for (index, line) in text.lines().enumerate() {
        let n = index + 1;
        last_line = n;
        let toks = tokens(line);
        let Some(head) = toks.first() else { continue };
        let number = |tok: &Token| {
            parse_rational(tok.text).map_err(|e| ParseError::syntax(n, tok.column, e.to_string()))
        };
        let arity = |count: usize, usage: &str| {
            if toks.len() != count {
                let column = toks.get(count).map_or(line.len() + 1, |t| t.column);
                Err(ParseError::syntax(n, column, format!("expected `{usage}`")))
            } else {
                Ok(())
            }
        };
        match (&state, head.text) {
            (State::Header, "plmap") => {
                arity(2, "plmap v1")?;
                if toks[1].text != "v1" {
                    return Err(ParseError::syntax(
                        n,
                        toks[1].column,
                        format!("unsupported version `{}`", toks[1].text),
                    ));
                }
                state = State::Pieces;
            }
            (State::Header, _) => {
                return Err(ParseError::syntax(
                    n,
                    head.column,
                    "expected header `plmap v1`",
                ));
            }
            (State::Pieces | State::Pattern, "piece") => {
                arity(3, "piece <right-endpoint> <slope>")?;
                let piece = Piece::new(number(&toks[1])?, number(&toks[2])?);
                piece_locations.push(Location {
                    line: n,
                    column: toks[1].column,
                });
                slope_locations.push(Location {
                    line: n,
                    column: toks[2].column,
                });
                if matches!(state, State::Pattern) {
                    pattern.push(piece);
                } else {
                    raw.pieces.push(piece);
                }
            }
            (State::Pieces, "tail") => {
                tail_location = Location {
                    line: n,
                    column: head.column,
                };
                match toks.get(1).map(|t| t.text) {
                    Some("slope") => {
                        arity(3, "tail slope <s>")?;
                        slope_locations.push(Location {
                            line: n,
                            column: toks[2].column,
                        });
                        raw.tail = Some(RawTail::Affine {
                            slope: number(&toks[2])?,
                        });
                        state = State::Done;
                    }
                    Some("geometric") => {
                        arity(3, "tail geometric <base>")?;
                        base = Some(number(&toks[2])?);
                        state = State::Pattern;
                    }
                    _ => {
                        let column = toks.get(1).map_or(line.len() + 1, |t| t.column);
                        return Err(ParseError::syntax(
                            n,
                            column,
                            "expected `slope` or `geometric` after `tail`",
                        ));
                    }
                }
            }
            (State::Pattern, "end") => {
                arity(1, "end")?;
                end_location = Some(Location {
                    line: n,
                    column: head.column,
                });
                raw.tail = Some(RawTail::Geometric {
                    base: base.take().unwrap(),
                    pattern: std::mem::take(&mut pattern),
                });
                state = State::Done;
            }
            (State::Done, _) => {
                return Err(ParseError::syntax(
                    n,
                    head.column,
                    "unexpected content after the tail",
                ));
            }
            (_, other) => {
                return Err(ParseError::syntax(
                    n,
                    head.column,
                    format!("unexpected keyword `{other}`"),
                ));
            }
        }
    }

    let eof = Location {
        line: last_line + 1,
        column: 1,
    };
    match state {
        State::Header => return Err(ParseError::syntax(eof.line, 1, "missing header `plmap v1`")),
        State::Pattern => {
            return Err(ParseError::syntax(
                eof.line,
                1,
                "geometric tail is missing `end`",
            ))
        }
        _ => {}
    }

    PlMap::validate(&raw).map_err(|err| {
        let at = match &err {
            Error::NonMonotoneBreakpoints { index, .. } => piece_locations[*index],
            Error::NonPositiveSlope { index, .. } => slope_locations[*index],
            Error::PatternSpan { .. } => piece_locations.last().copied().unwrap_or(tail_location),
            Error::GeometricConsistencyViolation { .. } => end_location.unwrap_or(tail_location),
            Error::EmptyMap(_) if raw.tail.is_none() => eof,
            _ => tail_location,
        };
        ParseError {
            line: at.line,
            column: at.column,
            kind: ParseErrorKind::Invalid(err),
        }
    })
}

/// Canonical text of a map (LF line endings, trailing newline).
pub fn serialize(f: &PlMap) -> String {
    let mut out = String::from("plmap v1\n");
    let piece = |out: &mut String, indent: &str, end: &ExactRational, slope: &ExactRational| {
        let _ = writeln!(out, "{indent}piece {} {}", show(end), show(slope));
    };
    let finite = f.finite();
    for (end, slope) in finite.xs()[1..].iter().zip(finite.slopes()) {
        piece(&mut out, "", end, slope);
    }
    match f.tail() {
        Tail::Affine { slope } => {
            let _ = writeln!(out, "tail slope {}", show(slope));
        }
        Tail::Geometric { base, pattern } => {
            let _ = writeln!(out, "tail geometric {}", show(base));
            for (end, slope) in pattern.xs()[1..].iter().zip(pattern.slopes()) {
                piece(&mut out, "  ", end, slope);
            }
            out.push_str("end\n");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    const GEOMETRIC: &str =
        "plmap v1\npiece 1 1\ntail geometric 2\n piece 3/2 1/2\n piece 2 3/2\nend";

    #[test]
    fn identity_round_trip() {
        let f = parse("plmap v1\ntail slope 1").unwrap();
        assert_eq!(f, PlMap::identity());
        assert_eq!(serialize(&f), "plmap v1\ntail slope 1\n");
    }

    #[test]
    fn geometric_example_parses() {
        let f = parse(GEOMETRIC).unwrap();
        assert_eq!(f.eval(&int(6)).unwrap(), int(5));
        assert_eq!(
            serialize(&f),
            "plmap v1\npiece 1 1\ntail geometric 2\n  piece 3/2 1/2\n  piece 2 3/2\nend\n"
        );
    }

    #[test]
    fn decreasing_endpoint_points_at_line_three() {
        let err = parse("plmap v1\npiece 1 2\npiece 1/2 3\ntail slope 1").unwrap_err();
        assert_eq!((err.line, err.column), (3, 7));
        assert!(matches!(
            err.validation(),
            Some(Error::NonMonotoneBreakpoints { .. })
        ));
    }

    #[test]
    fn removable_breakpoint_is_not_serialized() {
        let a = parse("plmap v1\npiece 1 2\ntail slope 2\n").unwrap();
        let b = parse("plmap v1\ntail slope 2\n").unwrap();
        assert_eq!(serialize(&a), serialize(&b));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# leading comment\n\nplmap v1   # header\n\npiece 1 1/2 # first\ntail slope 2\n# trailing\n";
        let f = parse(text).unwrap();
        assert_eq!(f.eval(&int(3)).unwrap(), rat(9, 2));
    }

    #[test]
    fn syntax_errors_carry_locations() {
        let cases: &[(&str, usize, usize)] = &[
            ("", 1, 1),
            ("plmap v2\ntail slope 1", 1, 7),
            ("plmap v1\npiece 1.5 1\ntail slope 1", 2, 7),
            ("plmap v1\npiece 1\ntail slope 1", 2, 8),
            ("plmap v1\nslope 1", 2, 1),
            ("plmap v1\ntail linear 1", 2, 6),
            ("plmap v1\ntail slope 1\npiece 2 1", 3, 1),
            ("plmap v1\npiece 1 1\ntail geometric 2\n piece 2 1\n", 5, 1),
            ("plmap v1\ntail slope 1 extra", 2, 14),
        ];
        for (text, line, column) in cases {
            let err = parse(text).unwrap_err();
            assert!(
                matches!(err.kind, ParseErrorKind::Syntax(_)),
                "{text:?}: {err}"
            );
            assert_eq!((err.line, err.column), (*line, *column), "{text:?}: {err}");
        }
    }

    #[test]
    fn validation_errors_carry_locations() {
        let err = parse("plmap v1\npiece 1 1\ntail geometric 2\n piece 3/2 1/2\n piece 2 1\nend")
            .unwrap_err();
        assert!(matches!(
            err.validation(),
            Some(Error::GeometricConsistencyViolation { .. })
        ));
        assert_eq!(err.line, 6);
        let err = parse("plmap v1\npiece 1 -1\ntail slope 1").unwrap_err();
        assert_eq!((err.line, err.column), (2, 9));
        let err = parse("plmap v1\ntail slope 0").unwrap_err();
        assert!(matches!(
            err.validation(),
            Some(Error::NonPositiveSlope { .. })
        ));
        assert_eq!(err.line, 2);
        let err = parse("plmap v1\npiece 1 1\n").unwrap_err();
        assert!(matches!(err.validation(), Some(Error::EmptyMap(_))));
        assert_eq!(err.line, 3);
    }
}
