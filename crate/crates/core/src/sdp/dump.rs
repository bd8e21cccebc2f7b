//! Plain-text SDP dumps for offline cross-checking against other solvers.
//!
//! ```text
//! dim <n>
//! objective
//! <n rows of n "re im" pairs, row-major>
//! constraints <m>
//! constraint <sense: <= | == | >=> <rhs>
//! <n rows>
//! ...
//! ```

use std::io::{BufRead, Write};

use super::{ConstraintMatrix, SdpProblem, Sense};
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

fn write_matrix<W: Write>(w: &mut W, m: &CMat) -> std::io::Result<()> {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{:e} {:e}", m[(i, j)].re, m[(i, j)].im))
            .collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn write_problem<W: Write>(w: &mut W, p: &SdpProblem) -> Result<()> {
    writeln!(w, "dim {}", p.dim)?;
    writeln!(w, "objective")?;
    write_matrix(w, &p.objective)?;
    writeln!(w, "constraints {}", p.constraints.len())?;
    for c in &p.constraints {
        writeln!(w, "constraint {} {:e}", c.sense.symbol(), c.rhs)?;
        write_matrix(w, &c.matrix.to_dense(p.dim))?;
    }
    Ok(())
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(format!("SDP dump: {}", msg.into()))
}

fn read_matrix(lines: &mut impl Iterator<Item = String>, n: usize) -> Result<CMat> {
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        let line = lines.next().ok_or_else(|| bad("truncated matrix"))?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| bad(format!("bad number `{t}`"))))
            .collect::<Result<_>>()?;
        if vals.len() != 2 * n {
            return Err(bad(format!("row {i} has {} values, expected {}", vals.len(), 2 * n)));
        }
        for j in 0..n {
            m[(i, j)] = C64::new(vals[2 * j], vals[2 * j + 1]);
        }
    }
    Ok(m)
}

pub fn read_problem<R: BufRead>(r: R) -> Result<SdpProblem> {
    let mut lines = r
        .lines()
        .map_while(|l| l.ok())
        .filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| bad("empty input"))?;
    let n: usize = header
        .strip_prefix("dim ")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| bad("missing `dim` header"))?;
    if lines.next().as_deref() != Some("objective") {
        return Err(bad("missing `objective` section"));
    }
    let objective = read_matrix(&mut lines, n)?;
    let m: usize = lines
        .next()
        .and_then(|l| l.strip_prefix("constraints ").and_then(|v| v.trim().parse().ok()))
        .ok_or_else(|| bad("missing `constraints` count"))?;
    let mut p = SdpProblem::new(objective);
    for _ in 0..m {
        let head = lines.next().ok_or_else(|| bad("truncated constraint list"))?;
        let parts: Vec<&str> = head.split_whitespace().collect();
        if parts.len() != 3 || parts[0] != "constraint" {
            return Err(bad(format!("bad constraint header `{head}`")));
        }
        let sense = match parts[1] {
            "<=" => Sense::Le,
            "==" => Sense::Eq,
            ">=" => Sense::Ge,
            s => return Err(bad(format!("unknown sense `{s}`"))),
        };
        let rhs: f64 = parts[2].parse().map_err(|_| bad("bad rhs"))?;
        let a = read_matrix(&mut lines, n)?;
        p.constrain(ConstraintMatrix::Dense(a), sense, rhs);
    }
    Ok(p)
}
