//! The `.lss` text format for matrix function systems.
//!
//! ```text
//! # comment
//! dim <d>
//! factor <q>
//! colors <name>+
//! map <rowcolor> <- <colcolor> : <t1> ... <td>
//! ```
//!
//! The three header lines come first, in any order, each exactly once.
//! `map` lines follow in any order; `map i <- j : t` puts `x -> qx + t`
//! into entry `(i, j)`, i.e. a point of color `j` produces a point of
//! color `i` at offset `t`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::lattice::Point;
use crate::mfs::{BlockReport, MatrixFunctionSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapDecl {
    pub row: usize,
    pub col: usize,
    pub translation: Point,
}

/// A parsed `.lss` file. Printing with `Display` yields the canonical form:
/// header triple, then maps ordered by column, row and translation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemFile {
    pub dim: usize,
    pub factor: BigInt,
    pub colors: Vec<String>,
    pub maps: Vec<MapDecl>,
}

/// A system together with its (not yet enforced) block validation report.
#[derive(Debug, Clone)]
pub struct ParsedSystem {
    pub system: MatrixFunctionSystem,
    pub report: BlockReport,
}

pub fn parse_system(text: &str) -> Result<ParsedSystem, ParseError> {
    let system = SystemFile::parse(text)?.to_system();
    let report = system.validate_block_structure();
    Ok(ParsedSystem { system, report })
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<SystemFile, ParseError> {
        let mut dim: Option<usize> = None;
        let mut factor: Option<BigInt> = None;
        let mut colors: Option<Vec<String>> = None;
        let mut maps = Vec::new();
        let mut seen = BTreeSet::new();
        let mut last_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let Some((&keyword, args)) = tokens.split_first() else {
                continue;
            };
            match keyword {
                "dim" | "factor" | "colors" if !maps.is_empty() => {
                    return Err(ParseError::new(
                        line,
                        format!("`{keyword}` after the first map declaration"),
                    ));
                }
                "dim" => {
                    if dim.is_some() {
                        return Err(ParseError::new(line, "`dim` declared twice"));
                    }
                    let [d] = args else {
                        return Err(ParseError::new(line, "expected `dim <d>`"));
                    };
                    let d: usize = d
                        .parse()
                        .map_err(|_| ParseError::new(line, format!("invalid dimension `{d}`")))?;
                    if d == 0 {
                        return Err(ParseError::new(line, "dimension must be at least 1"));
                    }
                    dim = Some(d);
                }
                "factor" => {
                    if factor.is_some() {
                        return Err(ParseError::new(line, "`factor` declared twice"));
                    }
                    let [q] = args else {
                        return Err(ParseError::new(line, "expected `factor <q>`"));
                    };
                    let q: BigInt = q.parse().map_err(|_| {
                        ParseError::new(line, format!("factor `{q}` is not an integer"))
                    })?;
                    if q < BigInt::from(2) {
                        return Err(ParseError::new(line, "factor must be at least 2"));
                    }
                    factor = Some(q);
                }
                "colors" => {
                    if colors.is_some() {
                        return Err(ParseError::new(line, "`colors` declared twice"));
                    }
                    if args.is_empty() {
                        return Err(ParseError::new(line, "expected at least one color name"));
                    }
                    let mut names = BTreeSet::new();
                    for name in args {
                        if *name == "<-" || *name == ":" {
                            return Err(ParseError::new(
                                line,
                                format!("`{name}` is not a valid color name"),
                            ));
                        }
                        if !names.insert(*name) {
                            return Err(ParseError::new(line, format!("duplicate color `{name}`")));
                        }
                    }
                    colors = Some(args.iter().map(|s| s.to_string()).collect());
                }
                "map" => {
                    let (Some(d), Some(_), Some(names)) = (dim, &factor, &colors) else {
                        return Err(ParseError::new(
                            line,
                            "map declared before `dim`, `factor` and `colors`",
                        ));
                    };
                    let [row, "<-", col, ":", coords @ ..] = args else {
                        return Err(ParseError::new(
                            line,
                            "expected `map <row> <- <col> : <t1> ... <td>`",
                        ));
                    };
                    let lookup = |name: &str| {
                        names
                            .iter()
                            .position(|c| c == name)
                            .ok_or_else(|| ParseError::new(line, format!("unknown color `{name}`")))
                    };
                    let (row, col) = (lookup(row)?, lookup(col)?);
                    if coords.len() != d {
                        return Err(ParseError::new(
                            line,
                            format!("translation has {} coordinates, expected {d}", coords.len()),
                        ));
                    }
                    let coords = coords
                        .iter()
                        .map(|c| {
                            c.parse::<BigInt>().map_err(|_| {
                                ParseError::new(line, format!("`{c}` is not an integer"))
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    let translation = Point::new(coords);
                    if !seen.insert((row, col, translation.clone())) {
                        return Err(ParseError::new(
                            line,
                            format!(
                                "duplicate declaration of map {} <- {} : {}",
                                names[row], names[col], translation
                            ),
                        ));
                    }
                    maps.push(MapDecl {
                        row,
                        col,
                        translation,
                    });
                }
                other => return Err(ParseError::new(line, format!("unknown keyword `{other}`"))),
            }
        }

        let eof = last_line.max(1);
        let dim = dim.ok_or_else(|| ParseError::new(eof, "missing `dim` declaration"))?;
        let factor = factor.ok_or_else(|| ParseError::new(eof, "missing `factor` declaration"))?;
        let colors = colors.ok_or_else(|| ParseError::new(eof, "missing `colors` declaration"))?;
        Ok(SystemFile {
            dim,
            factor,
            colors,
            maps,
        })
    }

    pub fn to_system(&self) -> MatrixFunctionSystem {
        let mut sys = MatrixFunctionSystem::new(self.dim, self.factor.clone(), self.colors.clone())
            .expect("header checked during parsing");
        for m in &self.maps {
            sys.add_map(m.row, m.col, m.translation.clone())
                .expect("map checked during parsing");
        }
        sys
    }

    /// The file form of a level-1 system; `None` for computed powers,
    /// which the format cannot express.
    pub fn from_system(sys: &MatrixFunctionSystem) -> Option<SystemFile> {
        if sys.level() != 1 {
            return None;
        }
        let maps = (0..sys.color_count())
            .flat_map(|col| {
                sys.column(col).map(move |(row, f)| MapDecl {
                    row,
                    col,
                    translation: f.translation().clone(),
                })
            })
            .collect();
        Some(SystemFile {
            dim: sys.dim(),
            factor: sys.factor().clone(),
            colors: sys.colors().to_vec(),
            maps,
        })
    }
}

impl fmt::Display for SystemFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim {}", self.dim)?;
        writeln!(f, "factor {}", self.factor)?;
        writeln!(f, "colors {}", self.colors.join(" "))?;
        let mut maps: Vec<&MapDecl> = self.maps.iter().collect();
        maps.sort_by(|a, b| (a.col, a.row, &a.translation).cmp(&(b.col, b.row, &b.translation)));
        for m in maps {
            write!(f, "map {} <- {} :", self.colors[m.row], self.colors[m.col])?;
            for c in m.translation.coords() {
                write!(f, " {c}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn parses_thue_morse() {
        let parsed = parse_system(corpus::THUE_MORSE).unwrap();
        assert!(parsed.report.is_valid());
        let sys = parsed.system;
        assert_eq!(
            (sys.dim(), sys.factor().clone(), sys.color_count()),
            (1, BigInt::from(2), 2)
        );
        let t = |r, c| -> Vec<Point> {
            sys.entry(r, c)
                .iter()
                .map(|f| f.translation().clone())
                .collect()
        };
        assert_eq!(t(0, 0), vec![Point::from_i64s(&[0])]);
        assert_eq!(t(0, 1), vec![Point::from_i64s(&[1])]);
        assert_eq!(t(1, 0), vec![Point::from_i64s(&[1])]);
        assert_eq!(t(1, 1), vec![Point::from_i64s(&[0])]);
    }

    #[test]
    fn arity_error_is_line_numbered() {
        let text = "dim 1\nfactor 2\ncolors a\n\nmap a <- a : 0 0\n";
        let err = SystemFile::parse(text).unwrap_err();
        assert_eq!(err.line, 5);
        assert!(err.message.contains("2 coordinates"), "{err}");
    }

    #[test]
    fn duplicate_declaration() {
        let text = "dim 1\nfactor 2\ncolors a\nmap a <- a : 0\nmap a <- a : 0 # again\n";
        let err = SystemFile::parse(text).unwrap_err();
        assert_eq!(err.line, 5);
        assert!(err.message.contains("duplicate"));
    }

    #[test]
    fn other_errors() {
        let cases = [
            (
                "dim 1\nfactor 2\ncolors a\nmap b <- a : 0\n",
                4,
                "unknown color",
            ),
            ("dim 1\nfactor 2\nmap a <- a : 0\n", 3, "before"),
            ("dim 1\nfactor 1\n", 2, "at least 2"),
            ("dim 1\nfactor 2.5\n", 2, "not an integer"),
            ("dim 1\ndim 2\n", 2, "twice"),
            ("dim 1\nfactor 2\ncolors a a\n", 3, "duplicate color"),
            ("dim 1\nfactor 2\ncolors a\nmap a a : 0\n", 4, "expected"),
            (
                "dim 1\nfactor 2\ncolors a\nmap a <- a : x\n",
                4,
                "not an integer",
            ),
            (
                "dim 1\nfactor 2\ncolors a\nmap a <- a : 0\ndim 2\n",
                5,
                "after",
            ),
            ("dim 1\nfactor 2\n", 2, "missing `colors`"),
            ("frobnicate\n", 1, "unknown keyword"),
        ];
        for (text, line, needle) in cases {
            let err = SystemFile::parse(text).unwrap_err();
            assert_eq!(err.line, line, "{text:?}: {err}");
            assert!(err.message.contains(needle), "{text:?}: {err}");
        }
    }

    #[test]
    fn corpus_round_trips() {
        for (name, text) in corpus::FILES {
            let first = SystemFile::parse(text).unwrap();
            let printed = first.to_string();
            let second = SystemFile::parse(&printed).unwrap();
            assert_eq!(second.to_system(), first.to_system(), "{name}");
            assert_eq!(second.to_string(), printed, "{name}");
            assert_eq!(
                SystemFile::from_system(&first.to_system())
                    .unwrap()
                    .to_string(),
                printed
            );
        }
    }

    #[test]
    fn powers_have_no_file_form() {
        assert!(SystemFile::from_system(&corpus::thue_morse().power(2).unwrap()).is_none());
    }
}
