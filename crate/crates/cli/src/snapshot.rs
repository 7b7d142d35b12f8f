//! `HALLBRAID-SNAP v1` text snapshots.
//!
//! ```text
//! HALLBRAID-SNAP v1
//! config_hash <hex>
//! grid <nx> <ny> <padded_nx> <padded_ny>
//! time <t>
//! params <alpha> <beta> <gamma>
//! mean <C0>
//! records <count>
//! <m> <n> <re> <im>
//! ...
//! ```
//!
//! Records are the solver coefficients `c_{m,n}(t)` with
//! `u = C0 + e^{beta t} sum c_{m,n} e^{imx+iny}` (before the gauge shift for
//! `C0 != 0`). Only `m >= 0` is written since `c_{-m,n} = conj(c_{m,n})`,
//! zero entries are skipped, and the order is by `(n, m)`. Reals carry 17
//! significant digits, so reading back reproduces every bit.

use std::fmt::Write as _;
use std::path::Path;

use hallbraid_core::{GridSpec, ModelParams, SpectralField};
use num_complex::Complex64;

use crate::error::{CliError, CliResult};

pub const FORMAT_TAG: &str = "HALLBRAID-SNAP v1";

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub config_hash: String,
    pub params: ModelParams,
    pub mean: f64,
    pub field: SpectralField,
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn format_snapshot(snap: &Snapshot) -> String {
    let f = &snap.field;
    let g = f.grid;
    let mut records = Vec::new();
    for n in 1..=g.ny as i64 {
        for m in 0..=g.max_m() {
            let c = f.get(m, n);
            if c.re != 0.0 || c.im != 0.0 {
                records.push((m, n, c));
            }
        }
    }
    let p = &snap.params;
    let mut out = String::new();
    let _ = writeln!(out, "{FORMAT_TAG}");
    let _ = writeln!(out, "config_hash {}", snap.config_hash);
    let _ = writeln!(
        out,
        "grid {} {} {} {}",
        g.nx, g.ny, g.padded_nx, g.padded_ny
    );
    let _ = writeln!(out, "time {}", real(f.time));
    let _ = writeln!(
        out,
        "params {} {} {}",
        real(p.alpha()),
        real(p.beta()),
        real(p.gamma())
    );
    let _ = writeln!(out, "mean {}", real(snap.mean));
    let _ = writeln!(out, "records {}", records.len());
    for (m, n, c) in records {
        let _ = writeln!(out, "{m} {n} {} {}", real(c.re), real(c.im));
    }
    out
}

pub fn write_snapshot(path: &Path, snap: &Snapshot) -> CliResult<()> {
    std::fs::write(path, format_snapshot(snap)).map_err(|e| CliError::io(path, e))
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    path: &'a Path,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> CliResult<&'a str> {
        match self.inner.next() {
            Some((i, l)) => {
                self.last = i + 1;
                Ok(l)
            }
            None => Err(CliError::parse(
                self.path,
                self.last + 1,
                "unexpected end of file",
            )),
        }
    }

    fn err(&self, msg: impl Into<String>) -> CliError {
        CliError::parse(self.path, self.last, msg)
    }

    /// `<key> <fields...>`, returning the fields.
    fn keyed(&mut self, key: &str, count: usize) -> CliResult<Vec<&'a str>> {
        let line = self.next()?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(self.err(format!("expected {key:?} line")));
        }
        let fields: Vec<&str> = parts.collect();
        if fields.len() != count {
            return Err(self.err(format!(
                "{key}: expected {count} fields, got {}",
                fields.len()
            )));
        }
        Ok(fields)
    }

    fn num<T: std::str::FromStr>(&self, s: &str) -> CliResult<T> {
        s.parse()
            .map_err(|_| self.err(format!("cannot parse {s:?}")))
    }
}

pub fn parse_snapshot(text: &str, path: &Path) -> CliResult<Snapshot> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        path,
        last: 0,
    };
    if lines.next()?.trim() != FORMAT_TAG {
        return Err(lines.err(format!("missing {FORMAT_TAG:?} header")));
    }
    let config_hash = lines.keyed("config_hash", 1)?[0].to_string();
    let g = lines.keyed("grid", 4)?;
    let dims: Vec<usize> = g.iter().map(|s| lines.num(s)).collect::<CliResult<_>>()?;
    let grid = GridSpec::with_padding(dims[0], dims[1], dims[2], dims[3])?;
    let raw = lines.keyed("time", 1)?[0];
    let time: f64 = lines.num(raw)?;
    let p = lines.keyed("params", 3)?;
    let pv: Vec<f64> = p.iter().map(|s| lines.num(s)).collect::<CliResult<_>>()?;
    let params = ModelParams::new(pv[0], pv[1], pv[2])?;
    let raw = lines.keyed("mean", 1)?[0];
    let mean: f64 = lines.num(raw)?;
    let raw = lines.keyed("records", 1)?[0];
    let count: usize = lines.num(raw)?;
    let mut field = SpectralField::zeros(grid, time);
    let mut last_key = None;
    for _ in 0..count {
        let line = lines.next()?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(lines.err("record needs m n re im"));
        }
        let (m, n): (i64, i64) = (lines.num(parts[0])?, lines.num(parts[1])?);
        let c = Complex64::new(lines.num(parts[2])?, lines.num(parts[3])?);
        if m < 0 || m > grid.max_m() || n < 1 || n > grid.ny as i64 {
            return Err(lines.err(format!("mode ({m}, {n}) outside the stored range")));
        }
        if last_key.is_some_and(|k| k >= (n, m)) {
            return Err(lines.err("records must be strictly sorted by (n, m)"));
        }
        last_key = Some((n, m));
        if m == 0 && c.im != 0.0 {
            return Err(lines.err("m = 0 records must be real"));
        }
        field.coeffs[grid.index(m, n).unwrap()] = c;
        if m != 0 {
            field.coeffs[grid.index(-m, n).unwrap()] = c.conj();
        }
    }
    for (_, rest) in lines.inner.by_ref() {
        if !rest.trim().is_empty() {
            return Err(CliError::parse(
                path,
                lines.last + 1,
                "trailing content after records",
            ));
        }
    }
    Ok(Snapshot {
        config_hash,
        params,
        mean,
        field,
    })
}

pub fn read_snapshot(path: &Path) -> CliResult<Snapshot> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_snapshot(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let g = GridSpec::new(8, 8).unwrap();
        let field =
            SpectralField::from_modes(g, &[(0, 1, Complex64::new(0.5, 0.0))], 0.25).unwrap();
        let snap = Snapshot {
            config_hash: "abc".into(),
            params: ModelParams::new(1.0, 0.5, 1.0).unwrap(),
            mean: 0.0,
            field,
        };
        let text = format_snapshot(&snap);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], FORMAT_TAG);
        assert_eq!(lines[2], "grid 8 8 12 13");
        assert_eq!(lines[6], "records 1");
        assert_eq!(lines[7], "0 1 5.0000000000000000e-1 0.0000000000000000e0");
        assert_eq!(parse_snapshot(&text, Path::new("s")).unwrap(), snap);
    }

    #[test]
    fn rejects_unsorted_records() {
        let text = "HALLBRAID-SNAP v1\nconfig_hash x\ngrid 8 8 12 13\ntime 0\nparams 1 0 1\nmean 0\nrecords 2\n1 2 1 0\n1 1 1 0\n";
        assert!(matches!(
            parse_snapshot(text, Path::new("s")),
            Err(CliError::Parse { line: 9, .. })
        ));
    }
}
