//! Line-oriented text format.
//!
//! ```text
//! # alphabet m=1 components l=1 trunc L=3
//! 3/2 x0x1
//! -1 e
//! ```
//!
//! Multi-component series prefix the coefficient with `[j]`, `j` in `1..=l`.

use std::collections::HashSet;
use std::fmt::Write as _;

use super::Series;
use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarText};
use crate::words::{Alphabet, Letter, Word, MAX_LETTER};

/// Fallbacks for files without a header line.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Truncation for headerless input; the longest word length otherwise.
    pub trunc: Option<usize>,
    /// Alphabet for headerless input; the largest letter (at least `x1`) otherwise.
    pub m: Option<Letter>,
}

struct Header {
    m: Letter,
    l: usize,
    trunc: usize,
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::SyntaxError {
        line,
        message: message.into(),
    }
}

fn parse_header(line_no: usize, line: &str) -> Result<Option<Header>> {
    let body = line.trim_start_matches('#').trim();
    let mut fields = body.split_whitespace();
    if fields.next() != Some("alphabet") {
        return Ok(None);
    }
    let mut m = None;
    let mut l = None;
    let mut trunc = None;
    for f in fields {
        if let Some(v) = f.strip_prefix("m=") {
            m = v.parse::<Letter>().ok();
        } else if let Some(v) = f.strip_prefix("l=") {
            l = v.parse::<usize>().ok();
        } else if let Some(v) = f.strip_prefix("L=") {
            trunc = v.parse::<usize>().ok();
        } else if f != "components" && f != "trunc" {
            return Err(syntax(line_no, format!("unexpected header field `{f}`")));
        }
    }
    match (m, l, trunc) {
        (Some(m), Some(l), Some(trunc)) if m <= MAX_LETTER && l >= 1 => {
            Ok(Some(Header { m, l, trunc }))
        }
        _ => Err(syntax(line_no, "malformed header")),
    }
}

/// Parses the text format. A header, when present, fixes the alphabet,
/// component count and truncation; body lines must respect all three.
pub fn parse_series<T: Scalar + ScalarText>(text: &str, opts: &ParseOptions) -> Result<Series<T>> {
    let mut header = None;
    let mut body = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if let Some(h) = parse_header(line_no, line)? {
                if header.is_some() || !body.is_empty() {
                    return Err(syntax(line_no, "header must come first and only once"));
                }
                header = Some(h);
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let mut first = parts.next().unwrap_or_default().to_string();
        let mut comp = 1usize;
        if let Some(rest) = first.strip_prefix('[') {
            let (idx_text, tail) = rest
                .split_once(']')
                .ok_or_else(|| syntax(line_no, "unterminated component index"))?;
            comp = idx_text
                .parse()
                .map_err(|_| syntax(line_no, "bad component index"))?;
            first = if tail.is_empty() {
                parts
                    .next()
                    .ok_or_else(|| syntax(line_no, "missing coefficient"))?
                    .to_string()
            } else {
                tail.to_string()
            };
        }
        let coeff = T::parse_scalar(&first)
            .ok_or_else(|| syntax(line_no, format!("bad coefficient `{first}`")))?;
        let word_text = parts
            .next()
            .ok_or_else(|| syntax(line_no, "missing word"))?;
        if parts.next().is_some() {
            return Err(syntax(line_no, "trailing tokens"));
        }
        let word = Word::parse(word_text).map_err(|e| syntax(line_no, e.to_string()))?;
        if comp == 0 {
            return Err(syntax(line_no, "components are numbered from 1"));
        }
        body.push((line_no, comp - 1, coeff, word));
    }

    let (m, l, trunc) = match header {
        Some(h) => (h.m, h.l, h.trunc),
        None => {
            let m = opts.m.unwrap_or_else(|| {
                body.iter()
                    .filter_map(|(_, _, _, w)| w.max_letter())
                    .max()
                    .unwrap_or(1)
                    .max(1)
            });
            let l = body.iter().map(|(_, j, _, _)| j + 1).max().unwrap_or(1);
            let longest = body.iter().map(|(_, _, _, w)| w.len()).max().unwrap_or(0);
            (m, l, opts.trunc.unwrap_or(longest).max(longest))
        }
    };
    if m > MAX_LETTER {
        return Err(syntax(0, "alphabet larger than x0..x9"));
    }
    let alphabet = Alphabet::new(m);
    let mut out = Series::zero(alphabet, l, trunc);
    let mut seen = HashSet::new();
    for (line_no, j, coeff, word) in body {
        if let Some(letter) = word.max_letter().filter(|&x| x > m) {
            return Err(syntax(
                line_no,
                format!("letter x{letter} outside x0..x{m}"),
            ));
        }
        if j >= l {
            return Err(syntax(line_no, format!("component {} beyond l={l}", j + 1)));
        }
        if word.len() > trunc {
            return Err(syntax(
                line_no,
                format!("word {word} longer than L={trunc}"),
            ));
        }
        if !seen.insert((j, word.clone())) {
            return Err(Error::DuplicateWordError {
                line: line_no,
                word: word.to_string(),
            });
        }
        out.add_term(j, word, coeff);
    }
    Ok(out)
}

impl<T: Scalar + ScalarText> Series<T> {
    /// Canonical text: header, then terms by component and word order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "# alphabet m={} components l={} trunc L={}",
            self.alphabet.m(),
            self.components(),
            self.trunc
        )
        .unwrap();
        let multi = self.components() > 1;
        for (j, w, v) in self.terms() {
            if multi {
                writeln!(s, "[{}] {} {}", j + 1, v.format_scalar(), w).unwrap();
            } else {
                writeln!(s, "{} {}", v.format_scalar(), w).unwrap();
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        parse_series(text, &ParseOptions::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn parse_examples() {
        let c: Series<Rational> = Series::from_text("3/2 x0x1").unwrap();
        assert_eq!(c.coeff(0, &Word::parse("x0x1").unwrap()).unwrap(), q(3, 2));
        let one: Series<Rational> = Series::from_text("1 e").unwrap();
        assert_eq!(one, Series::one(Alphabet::siso(), 0));
        let bad = Series::<Rational>::from_text("# alphabet m=1 components l=1 trunc L=2\n1 x9");
        assert!(matches!(bad, Err(Error::SyntaxError { line: 2, .. })));
    }

    #[test]
    fn errors_carry_lines() {
        let dup = Series::<Rational>::from_text("1 x0\n# c\n2 x0");
        assert_eq!(
            dup,
            Err(Error::DuplicateWordError {
                line: 3,
                word: "x0".into()
            })
        );
        assert!(matches!(
            Series::<Rational>::from_text("1 x0\nfoo x1"),
            Err(Error::SyntaxError { line: 2, .. })
        ));
        assert!(matches!(
            Series::<Rational>::from_text("1 x0 x1"),
            Err(Error::SyntaxError { line: 1, .. })
        ));
        assert!(
            Series::<Rational>::from_text("# alphabet m=1 components l=1 trunc L=1\n1 x0x0")
                .is_err()
        );
    }

    #[test]
    fn round_trip_multi_component() {
        let text = "# alphabet m=2 components l=2 trunc L=3\n[1] -1/3 e\n[1] 2 x2x0\n[2] 5 x1\n";
        let c: Series<Rational> = Series::from_text(text).unwrap();
        assert_eq!(c.components(), 2);
        assert_eq!(c.to_text(), text);
        let again: Series<Rational> = Series::from_text(&c.to_text()).unwrap();
        assert_eq!(again, c);
        let compact: Series<Rational> = Series::from_text("[2]5 x1").unwrap();
        assert_eq!(compact.components(), 2);
    }

    #[test]
    fn float_round_trip() {
        let c: Series<f64> = Series::from_text("0.1 x1\n-2.5e-3 x0x1").unwrap();
        let again: Series<f64> = Series::from_text(&c.to_text()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn headerless_defaults() {
        let c: Series<Rational> = parse_series(
            "1 x0",
            &ParseOptions {
                trunc: Some(5),
                m: None,
            },
        )
        .unwrap();
        assert_eq!(c.trunc(), 5);
        assert_eq!(c.alphabet().m(), 1);
    }
}
