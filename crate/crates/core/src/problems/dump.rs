//! Plain-text instance dumps for diffing generated problems across
//! implementations.
//!
//! ```text
//! # l1subgrad instance v1
//! label quadratic
//! seed 7
//! dim 3
//! gamma 2.5e-1
//! lipschitz 1e1
//! mu 1e0            (or `none`)
//! f_ref none        (or a value)
//! smooth quadratic
//! block x0 1 3
//! 1e0 -2e0 3.5e-1
//! block M 3 3
//! ... one line per row ...
//! block b 1 3
//! ...
//! end
//! ```
//!
//! Header lines are `key value`. A `block <name> <rows> <cols>` line is
//! followed by `rows` lines of `cols` space-separated numbers in row-major
//! order. `scalar <name> <value>` carries extra smooth-term parameters.
//! Numbers use Rust's shortest round-trip `{:e}` formatting.

use std::collections::BTreeMap;
use std::io::{self, Write};

use super::{ProblemError, ProblemInstance};
use crate::numerics::Matrix;

pub const DUMP_MAGIC: &str = "# l1subgrad instance v1";

fn write_row(out: &mut dyn Write, row: &[f64]) -> io::Result<()> {
    let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
    writeln!(out, "{}", line.join(" "))
}

pub fn write_matrix_block(out: &mut dyn Write, name: &str, m: &Matrix) -> io::Result<()> {
    writeln!(out, "block {name} {} {}", m.rows(), m.cols())?;
    for i in 0..m.rows() {
        write_row(out, m.row(i))?;
    }
    Ok(())
}

pub fn write_vector_block(out: &mut dyn Write, name: &str, v: &[f64]) -> io::Result<()> {
    writeln!(out, "block {name} 1 {}", v.len())?;
    write_row(out, v)
}

pub fn write_scalar(out: &mut dyn Write, name: &str, v: f64) -> io::Result<()> {
    writeln!(out, "scalar {name} {v:e}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| format!("{x:e}"))
}

/// Writes `inst` in the dump format.
pub fn write_instance(out: &mut dyn Write, inst: &ProblemInstance) -> io::Result<()> {
    let obj = &inst.objective;
    writeln!(out, "{DUMP_MAGIC}")?;
    writeln!(out, "label {}", inst.label)?;
    writeln!(
        out,
        "seed {}",
        inst.seed
            .map_or_else(|| "none".to_string(), |s| s.to_string())
    )?;
    writeln!(out, "dim {}", obj.dim())?;
    writeln!(out, "gamma {:e}", obj.gamma())?;
    writeln!(out, "lipschitz {:e}", obj.lipschitz())?;
    writeln!(out, "mu {}", opt(obj.mu()))?;
    writeln!(out, "f_ref {}", opt(inst.f_ref))?;
    writeln!(out, "smooth {}", obj.smooth().kind())?;
    write_vector_block(out, "x0", &inst.x0)?;
    obj.smooth().write_blocks(out)?;
    writeln!(out, "end")
}

/// Parsed dump: header fields, scalars and matrix blocks by name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dump {
    pub header: BTreeMap<String, String>,
    pub scalars: BTreeMap<String, f64>,
    pub blocks: BTreeMap<String, Matrix>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> ProblemError {
    ProblemError::Dump(format!("line {line}: {}", msg.into()))
}

fn parse_num(tok: &str, line: usize) -> Result<f64, ProblemError> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("bad number '{tok}'")))
}

pub fn parse_dump(text: &str) -> Result<Dump, ProblemError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, l)) if l.trim() == DUMP_MAGIC => {}
        _ => return Err(parse_err(1, "missing dump header")),
    }
    let mut dump = Dump::default();
    while let Some((ln, line)) = lines.next() {
        let mut toks = line.split_whitespace();
        match toks.next() {
            None => continue,
            Some("end") => return Ok(dump),
            Some("block") => {
                let (name, rows, cols) = match (toks.next(), toks.next(), toks.next()) {
                    (Some(n), Some(r), Some(c)) => (
                        n.to_string(),
                        r.parse::<usize>()
                            .map_err(|_| parse_err(ln, "bad row count"))?,
                        c.parse::<usize>()
                            .map_err(|_| parse_err(ln, "bad column count"))?,
                    ),
                    _ => return Err(parse_err(ln, "malformed block line")),
                };
                let mut data = Vec::with_capacity(rows * cols);
                for _ in 0..rows {
                    let (rl, row) = lines
                        .next()
                        .ok_or_else(|| parse_err(ln, format!("block {name} truncated")))?;
                    let before = data.len();
                    for tok in row.split_whitespace() {
                        data.push(parse_num(tok, rl)?);
                    }
                    if data.len() - before != cols {
                        return Err(parse_err(rl, format!("expected {cols} values")));
                    }
                }
                dump.blocks
                    .insert(name, Matrix::from_row_major(rows, cols, data));
            }
            Some("scalar") => match (toks.next(), toks.next()) {
                (Some(n), Some(v)) => {
                    dump.scalars.insert(n.to_string(), parse_num(v, ln)?);
                }
                _ => return Err(parse_err(ln, "malformed scalar line")),
            },
            Some(key) => {
                let value = toks.collect::<Vec<_>>().join(" ");
                dump.header.insert(key.to_string(), value);
            }
        }
    }
    Err(parse_err(0, "missing 'end'"))
}
