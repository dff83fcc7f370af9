//! Text format:
//!
//! ```text
//! dim 2
//! domain 0 0 1 1        # lower corner, then upper corner
//! cube 0 0 1            # optional: lower corner and side
//! form atomic           # or: cellwise
//! level 1               # cellwise only
//! 1/10 1/10 1           # atomic: coordinates then weight
//! 4 9                   # cellwise: cell index then density
//! ```

use std::collections::BTreeMap;
use std::fmt::Display;
use std::io::{BufRead, Write};

use super::{Atom, BoxDomain, Cube, DiscreteMeasure};
use crate::rational::parse_rational;
use crate::{Error, Field, Rational, Result};

#[derive(PartialEq)]
enum Form {
    Atomic,
    Cellwise,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn numbers(tokens: &[&str], line: usize) -> Result<Vec<Rational>> {
    tokens
        .iter()
        .map(|t| parse_rational(t).ok_or_else(|| parse_err(line, format!("`{t}` is not a rational number"))))
        .collect()
}

impl DiscreteMeasure<Rational> {
    pub fn read_from(input: impl BufRead) -> Result<Self> {
        let mut dim: Option<usize> = None;
        let mut domain: Option<BoxDomain<Rational>> = None;
        let mut cube: Option<Cube<Rational>> = None;
        let mut form: Option<Form> = None;
        let mut level: Option<usize> = None;
        let mut atoms = Vec::new();
        let mut cells = BTreeMap::new();
        for (i, line) in input.lines().enumerate() {
            let no = i + 1;
            let line = line?;
            let text = line.split('#').next().unwrap_or("").trim();
            let tokens: Vec<&str> = text.split_whitespace().collect();
            let Some((&key, rest)) = tokens.split_first() else {
                continue;
            };
            match key {
                "dim" => {
                    let d = rest
                        .first()
                        .and_then(|t| t.parse::<usize>().ok())
                        .filter(|&d| d > 0)
                        .ok_or_else(|| parse_err(no, "dim needs a positive integer"))?;
                    dim = Some(d);
                }
                "domain" | "cube" => {
                    let d = dim.ok_or_else(|| parse_err(no, "dim must come first"))?;
                    let v = numbers(rest, no)?;
                    if key == "domain" {
                        if v.len() != 2 * d {
                            return Err(parse_err(no, format!("domain needs {} numbers", 2 * d)));
                        }
                        domain = Some(BoxDomain::new(v[..d].to_vec(), v[d..].to_vec())?);
                    } else {
                        if v.len() != d + 1 {
                            return Err(parse_err(no, format!("cube needs {} numbers", d + 1)));
                        }
                        cube = Some(Cube::new(v[..d].to_vec(), v[d].clone())?);
                    }
                }
                "form" => {
                    form = Some(match rest.first() {
                        Some(&"atomic") => Form::Atomic,
                        Some(&"cellwise") => Form::Cellwise,
                        _ => return Err(parse_err(no, "form must be atomic or cellwise")),
                    });
                }
                "level" => {
                    level = Some(
                        rest.first()
                            .and_then(|t| t.parse::<usize>().ok())
                            .ok_or_else(|| parse_err(no, "level needs a nonnegative integer"))?,
                    );
                }
                _ => {
                    let d = dim.ok_or_else(|| parse_err(no, "dim must come first"))?;
                    match form {
                        Some(Form::Atomic) => {
                            let v = numbers(&tokens, no)?;
                            if v.len() != d + 1 {
                                return Err(parse_err(no, format!("atom lines need {} numbers", d + 1)));
                            }
                            atoms.push(Atom {
                                location: v[..d].to_vec(),
                                weight: v[d].clone(),
                            });
                        }
                        Some(Form::Cellwise) => {
                            if tokens.len() != 2 {
                                return Err(parse_err(no, "cell lines need an index and a density"));
                            }
                            let idx = tokens[0]
                                .parse::<u64>()
                                .map_err(|_| parse_err(no, "cell index must be a nonnegative integer"))?;
                            let rho = numbers(&tokens[1..], no)?.remove(0);
                            if cells.insert(idx, rho).is_some() {
                                return Err(parse_err(no, format!("cell {idx} listed twice")));
                            }
                        }
                        None => return Err(parse_err(no, "data before `form`")),
                    }
                }
            }
        }
        let domain = domain.ok_or_else(|| parse_err(0, "missing domain"))?;
        let cube = cube.unwrap_or_else(|| Cube::enclosing(&domain));
        match form {
            Some(Form::Atomic) => DiscreteMeasure::atomic(domain, cube, atoms),
            Some(Form::Cellwise) => {
                let level = level.ok_or_else(|| parse_err(0, "cellwise measure needs a level"))?;
                DiscreteMeasure::cellwise(domain, cube, level, cells)
            }
            None => Err(parse_err(0, "missing form")),
        }
    }
}

impl<T: Field + Display> DiscreteMeasure<T> {
    /// Writes the atomic part, or the cellwise part if there are no atoms.
    pub fn write_to(&self, mut out: impl Write) -> Result<()> {
        let join = |v: &[T]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(out, "dim {}", self.dim())?;
        writeln!(out, "domain {} {}", join(&self.domain.lo), join(&self.domain.hi))?;
        writeln!(out, "cube {} {}", join(&self.cube.lo), self.cube.side)?;
        match (&self.cells, self.atoms.is_empty()) {
            (Some(c), true) => {
                writeln!(out, "form cellwise")?;
                writeln!(out, "level {}", c.level)?;
                for (i, rho) in &c.densities {
                    writeln!(out, "{i} {rho}")?;
                }
            }
            (Some(_), false) => return Err(Error::Shape("mixed measures have no file form".into())),
            (None, _) => {
                writeln!(out, "form atomic")?;
                for a in &self.atoms {
                    writeln!(out, "{} {}", join(&a.location), a.weight)?;
                }
            }
        }
        Ok(())
    }
}
