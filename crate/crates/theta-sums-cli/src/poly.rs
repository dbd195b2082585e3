//! Text form of sparse polynomials over `F_p`.
//!
//! Grammar (whitespace ignored everywhere):
//!
//! ```text
//! poly := term ("+" term)*
//! term := [coeff "*"] "x" "^" exp | coeff
//! ```
//!
//! Coefficients are reduced modulo `p` and must not vanish; exponents must
//! lie in `[1, p-2]` and be pairwise distinct. The grammar is deliberately
//! minimal: no minus sign (write negative coefficients mod `p`), no implied
//! exponent-1 shorthand, one canonical way to say everything.

use std::fmt;

use theta_sums::{ExpSumError, Prime, SparsePoly};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyParseError {
    /// Input does not match the grammar; `pos` is a byte offset.
    Syntax { pos: usize, message: String },
    /// Grammatically fine, but a value is out of range for this `p`.
    Range { pos: usize, message: String },
    /// The same exponent appears in two terms.
    DuplicateExponent { pos: usize, exponent: u64 },
}

impl fmt::Display for PolyParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyParseError::Syntax { pos, message } => {
                write!(f, "syntax error at position {pos}: {message}")
            }
            PolyParseError::Range { pos, message } => {
                write!(f, "range error at position {pos}: {message}")
            }
            PolyParseError::DuplicateExponent { pos, exponent } => {
                write!(f, "duplicate exponent {exponent} at position {pos}")
            }
        }
    }
}

impl std::error::Error for PolyParseError {}

struct Scanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Scanner { bytes: text.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) {
        self.pos += 1;
    }

    fn number(&mut self) -> Result<(u64, usize), PolyParseError> {
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(c) = self.peek() {
            if !c.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(c - b'0')))
                .ok_or_else(|| PolyParseError::Range {
                    pos: start,
                    message: "number does not fit in 64 bits".into(),
                })?;
            self.bump();
        }
        debug_assert!(self.pos > start, "number() called off a digit");
        Ok((value, start))
    }
}

/// Parses `text` against the modulus `p`, producing a canonical
/// [`SparsePoly`] (coefficients reduced, terms sorted by exponent).
pub fn parse_poly(text: &str, p: Prime) -> Result<SparsePoly, PolyParseError> {
    let pv = p.value();
    let mut scanner = Scanner::new(text);
    let mut terms: Vec<(u64, u64)> = Vec::new();

    loop {
        scanner.skip_ws();
        let term_pos = scanner.pos;
        let (coeff, coeff_pos) = match scanner.peek() {
            Some(c) if c.is_ascii_digit() => {
                let (raw, num_pos) = scanner.number()?;
                scanner.skip_ws();
                if scanner.peek() == Some(b'*') {
                    scanner.bump();
                    scanner.skip_ws();
                    (raw, num_pos)
                } else {
                    // a bare constant: its implicit exponent 0 is never in
                    // [1, p-2], and a constant only rotates the sum anyway
                    return Err(PolyParseError::Range {
                        pos: num_pos,
                        message: format!(
                            "constant term: exponent 0 is outside [1, {}]",
                            pv - 2
                        ),
                    });
                }
            }
            Some(b'x') => (1, scanner.pos),
            Some(c) => {
                return Err(PolyParseError::Syntax {
                    pos: scanner.pos,
                    message: format!(
                        "expected a coefficient or 'x', found {:?}",
                        char::from(c)
                    ),
                });
            }
            None => {
                return Err(PolyParseError::Syntax {
                    pos: scanner.pos,
                    message: "expected a term".into(),
                });
            }
        };

        if scanner.peek() != Some(b'x') {
            return Err(PolyParseError::Syntax {
                pos: scanner.pos,
                message: "expected 'x' after the coefficient".into(),
            });
        }
        scanner.bump();
        scanner.skip_ws();
        if scanner.peek() != Some(b'^') {
            return Err(PolyParseError::Syntax {
                pos: scanner.pos,
                message: "expected '^' after 'x'".into(),
            });
        }
        scanner.bump();
        scanner.skip_ws();
        let (exponent, exp_pos) = match scanner.peek() {
            Some(c) if c.is_ascii_digit() => scanner.number()?,
            _ => {
                return Err(PolyParseError::Syntax {
                    pos: scanner.pos,
                    message: "expected an exponent".into(),
                });
            }
        };

        let reduced = coeff % pv;
        if reduced == 0 {
            return Err(PolyParseError::Range {
                pos: coeff_pos,
                message: format!("coefficient {coeff} is 0 modulo {pv}"),
            });
        }
        if exponent == 0 || exponent > pv - 2 {
            return Err(PolyParseError::Range {
                pos: exp_pos,
                message: format!("exponent {exponent} is outside [1, {}]", pv - 2),
            });
        }
        if terms.iter().any(|&(_, e)| e == exponent) {
            return Err(PolyParseError::DuplicateExponent { pos: term_pos, exponent });
        }
        terms.push((reduced, exponent));

        scanner.skip_ws();
        match scanner.peek() {
            None => break,
            Some(b'+') => scanner.bump(),
            Some(c) => {
                return Err(PolyParseError::Syntax {
                    pos: scanner.pos,
                    message: format!("expected '+', found {:?}", char::from(c)),
                });
            }
        }
    }

    SparsePoly::new(p, terms).map_err(|e| match e {
        // every variant is pre-checked above; this is belt and braces
        ExpSumError::DuplicateExponent { exponent } => {
            PolyParseError::DuplicateExponent { pos: 0, exponent }
        }
        other => PolyParseError::Range { pos: 0, message: other.to_string() },
    })
}

/// Canonical text form; parsing it back yields an equal polynomial.
pub fn poly_to_text(f: &SparsePoly) -> String {
    f.terms()
        .iter()
        .map(|t| {
            if t.coeff == 1 {
                format!("x^{}", t.exponent)
            } else {
                format!("{}*x^{}", t.coeff, t.exponent)
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    #[test]
    fn parses_canonical_forms() {
        let f = parse_poly("2*x^3 + 3*x^7", p(11)).unwrap();
        let terms: Vec<(u64, u64)> =
            f.terms().iter().map(|t| (t.coeff, t.exponent)).collect();
        assert_eq!(terms, vec![(2, 3), (3, 7)]);

        let f = parse_poly("x^2", p(5)).unwrap();
        let terms: Vec<(u64, u64)> =
            f.terms().iter().map(|t| (t.coeff, t.exponent)).collect();
        assert_eq!(terms, vec![(1, 2)]);
    }

    #[test]
    fn whitespace_is_free() {
        let tight = parse_poly("2*x^3+3*x^7", p(11)).unwrap();
        let airy = parse_poly("  2 * x ^ 3   +   3 * x ^ 7 ", p(11)).unwrap();
        assert_eq!(tight, airy);
    }

    #[test]
    fn coefficients_reduce_mod_p() {
        let f = parse_poly("13*x^2", p(11)).unwrap();
        assert_eq!(f.terms()[0].coeff, 2);
        // reduction to zero is rejected, with the position of the coefficient
        assert_eq!(
            parse_poly("x^1 + 22*x^2", p(11)),
            Err(PolyParseError::Range {
                pos: 6,
                message: "coefficient 22 is 0 modulo 11".into()
            })
        );
    }

    #[test]
    fn exponent_range_is_enforced() {
        assert!(matches!(
            parse_poly("x^0", p(5)),
            Err(PolyParseError::Range { pos: 2, .. })
        ));
        assert!(matches!(
            parse_poly("x^4", p(5)),
            Err(PolyParseError::Range { pos: 2, .. })
        ));
        assert!(parse_poly("x^3", p(5)).is_ok());
    }

    #[test]
    fn duplicate_exponents_rejected() {
        assert_eq!(
            parse_poly("2*x^3 + 9*x^3", p(11)),
            Err(PolyParseError::DuplicateExponent { pos: 8, exponent: 3 })
        );
    }

    #[test]
    fn constants_are_rejected() {
        assert!(matches!(
            parse_poly("5", p(7)),
            Err(PolyParseError::Range { pos: 0, .. })
        ));
        assert!(matches!(
            parse_poly("x^2 + 5", p(7)),
            Err(PolyParseError::Range { pos: 6, .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert_eq!(
            parse_poly("", p(7)),
            Err(PolyParseError::Syntax { pos: 0, message: "expected a term".into() })
        );
        assert!(matches!(
            parse_poly("x^2 + + x^3", p(7)),
            Err(PolyParseError::Syntax { pos: 6, .. })
        ));
        assert!(matches!(
            parse_poly("x^", p(7)),
            Err(PolyParseError::Syntax { pos: 2, .. })
        ));
        assert!(matches!(
            parse_poly("2*y^3", p(7)),
            Err(PolyParseError::Syntax { pos: 2, .. })
        ));
        assert!(matches!(
            parse_poly("x^2 - x^3", p(7)),
            Err(PolyParseError::Syntax { pos: 4, .. })
        ));
        // trailing garbage after a full term
        assert!(matches!(
            parse_poly("x^2 x^3", p(7)),
            Err(PolyParseError::Syntax { pos: 4, .. })
        ));
    }

    #[test]
    fn print_parse_round_trip() {
        for text in ["x^2", "2*x^3 + 3*x^7", "6*x^1 + x^5 + 10*x^9", "4*x^8"] {
            let f = parse_poly(text, p(11)).unwrap();
            let printed = poly_to_text(&f);
            let reparsed = parse_poly(&printed, p(11)).unwrap();
            assert_eq!(f, reparsed, "{text} -> {printed}");
        }
        // printing sorts terms, and reparsing the sorted form is stable
        let f = parse_poly("3*x^7 + 2*x^3", p(11)).unwrap();
        assert_eq!(poly_to_text(&f), "2*x^3 + 3*x^7");
    }

    #[test]
    fn number_overflow_is_a_range_error() {
        let huge = "184467440737095516160";
        assert!(matches!(
            parse_poly(&format!("{huge}*x^2"), p(7)),
            Err(PolyParseError::Range { pos: 0, .. })
        ));
    }
}
