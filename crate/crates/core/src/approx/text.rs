//! Plain-text checkpoint format: a header `family alpha beta xL N` (with an
//! optional trailing `radau`), then one coefficient per line. Two-dimensional
//! expansions carry two headers, x first, and coefficients in row-major order.

use ndarray::Array2;

use super::{Expansion, Expansion2D};
use crate::basis::{BasisFamily, RuleKind, ScaledBasis};
use crate::error::{Result, SpectralError};

fn header(b: &ScaledBasis) -> String {
    let mut h = format!(
        "{} {:.16e} {:.16e} {:.16e} {}",
        b.family.name(),
        b.alpha(),
        b.beta,
        b.x_l,
        b.n
    );
    if b.nodes_kind == RuleKind::GaussRadau {
        h.push_str(" radau");
    }
    h
}

fn parse_header(line: &str) -> Result<ScaledBasis> {
    let t: Vec<&str> = line.split_whitespace().collect();
    if t.len() != 5 && t.len() != 6 {
        return Err(SpectralError::Parse(format!("bad header '{line}'")));
    }
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| SpectralError::Parse(format!("'{s}': {e}")))
    };
    let family = BasisFamily::from_name(t[0], num(t[1])?)?;
    let n = t[4]
        .parse::<usize>()
        .map_err(|e| SpectralError::Parse(format!("'{}': {e}", t[4])))?;
    let b = ScaledBasis::new(family, num(t[2])?, num(t[3])?, n)?;
    match t.get(5) {
        None => Ok(b),
        Some(&"radau") => b.radau(),
        Some(other) => Err(SpectralError::Parse(format!("unknown rule tag '{other}'"))),
    }
}

fn parse_coeffs<'a, I: Iterator<Item = &'a str>>(lines: I, count: usize) -> Result<Vec<f64>> {
    let c: Vec<f64> = lines
        .map(|l| {
            l.trim()
                .parse::<f64>()
                .map_err(|e| SpectralError::Parse(format!("'{l}': {e}")))
        })
        .collect::<Result<_>>()?;
    if c.len() != count {
        return Err(SpectralError::LengthMismatch {
            expected: count,
            got: c.len(),
        });
    }
    Ok(c)
}

pub(super) fn write_1d(e: &Expansion) -> String {
    let mut s = header(&e.basis);
    s.push('\n');
    for c in &e.coeffs {
        s.push_str(&format!("{c:.16e}\n"));
    }
    s
}

pub(super) fn read_1d(s: &str) -> Result<Expansion> {
    let mut lines = s.lines().filter(|l| !l.trim().is_empty());
    let b = parse_header(
        lines
            .next()
            .ok_or_else(|| SpectralError::Parse("empty input".into()))?,
    )?;
    Expansion::new(b, parse_coeffs(lines, b.size())?)
}

pub(super) fn write_2d(e: &Expansion2D) -> String {
    let mut s = format!("{}\n{}\n", header(&e.basis_x), header(&e.basis_y));
    for c in e.coeffs.iter() {
        s.push_str(&format!("{c:.16e}\n"));
    }
    s
}

pub(super) fn read_2d(s: &str) -> Result<Expansion2D> {
    let mut lines = s.lines().filter(|l| !l.trim().is_empty());
    let mut next = || {
        lines
            .next()
            .ok_or_else(|| SpectralError::Parse("missing header".into()))
    };
    let bx = parse_header(next()?)?;
    let by = parse_header(next()?)?;
    let c = parse_coeffs(lines, bx.size() * by.size())?;
    let m = Array2::from_shape_vec((bx.size(), by.size()), c).expect("length checked");
    Expansion2D::new(bx, by, m)
}
