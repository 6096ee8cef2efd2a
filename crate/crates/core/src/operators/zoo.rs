//! String-addressable operator zoo.
//!
//! Identifiers:
//! `rotation2`, `identity`, `identity:<n>`, `scalar:<a>`, `abs`, `abs:<n>`,
//! `box:[a,b]x[c,d]...`, `zero:<n>`, `deadzone`, `cubic`, `power:<p>`,
//! `skew:<m>:<theta>`, `linear:<path>`.

use std::path::Path;

use nalgebra::DMatrix;

use super::{ConvexPiece, Operator, ScalarMap};
use crate::error::{Error, Result};
use crate::vector::Vector;

/// Zoo members with verified regularity metadata, used by batch checks.
pub const CERTIFIED: &[&str] = &[
    "rotation2",
    "identity",
    "scalar:2",
    "abs",
    "abs:3",
    "box:[0,1]x[0,1]",
    "zero:2",
    "deadzone",
    "power:0.5",
    "skew:2:0.7",
];

/// Every built-in identifier that needs no external file.
pub const BUILTIN: &[&str] = &[
    "rotation2",
    "identity",
    "scalar:2",
    "abs",
    "abs:3",
    "box:[0,1]x[0,1]",
    "zero:2",
    "deadzone",
    "cubic",
    "power:0.5",
    "skew:2:0.7",
];

fn bad(id: &str, why: &str) -> Error {
    Error::InvalidSpec(format!("operator id `{id}`: {why}"))
}

fn parse_num<T: std::str::FromStr>(id: &str, s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| bad(id, &format!("cannot parse `{s}`")))
}

/// Builds the operator named by `id`.
pub fn lookup(id: &str) -> Result<Operator> {
    let (head, arg) = match id.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (id, None),
    };
    let op = match (head, arg) {
        ("rotation2", None) => Operator::make_linear_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]])?
            .with_subregularity(1.0, 10.0, Vector::zeros(2))?
            .with_inverse_lipschitz(1.0, 10.0)?,
        ("identity", arg) => {
            let n: usize = match arg {
                Some(a) => parse_num(id, a)?,
                None => 1,
            };
            if n == 0 {
                return Err(bad(id, "dimension must be >= 1"));
            }
            Operator::make_linear(DMatrix::identity(n, n))?
                .with_subregularity(1.0, 10.0, Vector::zeros(n))?
                .with_inverse_lipschitz(1.0, 10.0)?
        }
        ("scalar", Some(a)) => {
            let a: f64 = parse_num(id, a)?;
            if !(a > 0.0) || !a.is_finite() {
                return Err(bad(id, "slope must be finite and > 0"));
            }
            Operator::make_linear(DMatrix::from_element(1, 1, a))?
                .with_subregularity(1.0 / a, 10.0, Vector::zeros(1))?
                .with_inverse_lipschitz(1.0 / a, 10.0)?
        }
        ("abs", arg) => {
            let n: usize = match arg {
                Some(a) => parse_num(id, a)?,
                None => 1,
            };
            if n == 0 {
                return Err(bad(id, "dimension must be >= 1"));
            }
            // d(x, 0) <= ||x|| <= sqrt(n) ||sign(x)|| = sqrt(n) d(0, Ax) for x != 0;
            // the inverse is {0} on the open unit cube, so any alpha works there.
            Operator::make_separable_subdifferential(vec![ConvexPiece::Abs { weight: 1.0 }; n])?
                .with_subregularity(1.0, 1.0, Vector::zeros(n))?
                .with_inverse_lipschitz(0.01, 0.5)?
        }
        ("box", Some(spec)) => {
            let pieces = parse_box(id, spec)?;
            let center: Vec<f64> = pieces
                .iter()
                .map(|p| match p {
                    ConvexPiece::Interval { lo, hi } => 0.5 * (lo + hi),
                    _ => unreachable!(),
                })
                .collect();
            Operator::make_separable_subdifferential(pieces)?.with_subregularity(1.0, 1.0, Vector::new(center)?)?
        }
        ("zero", arg) => {
            let n: usize = match arg {
                Some(a) => parse_num(id, a)?,
                None => 1,
            };
            if n == 0 {
                return Err(bad(id, "dimension must be >= 1"));
            }
            Operator::make_separable_subdifferential(vec![ConvexPiece::Zero; n])?.with_subregularity(
                1.0,
                1.0,
                Vector::zeros(n),
            )?
        }
        ("deadzone", None) => Operator::make_scalar(ScalarMap::PiecewiseLinear {
            knots: vec![(-1.0, 0.0), (1.0, 0.0)],
            left_slope: 1.0,
            right_slope: 1.0,
        })?
        .with_subregularity(1.0, 1.0, Vector::zeros(1))?,
        ("cubic", None) => Operator::make_scalar(ScalarMap::Power {
            scale: 1.0,
            exponent: 3.0,
        })?,
        ("power", Some(p)) => {
            let p: f64 = parse_num(id, p)?;
            let op = Operator::make_scalar(ScalarMap::Power {
                scale: 1.0,
                exponent: p,
            })?;
            if p <= 1.0 {
                // |x| <= |x|^p on [-1, 1] for p <= 1
                op.with_subregularity(1.0, 1.0, Vector::zeros(1))?
                    .with_inverse_lipschitz(1.0, 1.0)?
            } else {
                op
            }
        }
        ("skew", Some(rest)) => {
            let (m, theta) = rest
                .split_once(':')
                .ok_or_else(|| bad(id, "expected skew:<blocks>:<theta>"))?;
            let m: usize = parse_num(id, m)?;
            let theta: f64 = parse_num(id, theta)?;
            // ||R x|| = ||x|| for every rotation block
            Operator::make_skew_rotation(m, theta)?
                .with_subregularity(1.0, 10.0, Vector::zeros(2 * m.max(1)))?
                .with_inverse_lipschitz(1.0, 10.0)?
        }
        ("linear", Some(path)) => load_matrix(Path::new(path))?,
        _ => return Err(bad(id, "unknown operator")),
    };
    Ok(op.with_name(id))
}

/// Parses `[a,b]x[c,d]...` into interval pieces.
fn parse_box(id: &str, spec: &str) -> Result<Vec<ConvexPiece>> {
    let mut pieces = Vec::new();
    for part in spec.split('x') {
        let inner = part
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| bad(id, "box factors look like [lo,hi]"))?;
        let (lo, hi) = inner
            .split_once(',')
            .ok_or_else(|| bad(id, "box factors look like [lo,hi]"))?;
        let lo: f64 = parse_num(id, lo)?;
        let hi: f64 = parse_num(id, hi)?;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(bad(id, "box factors need finite lo <= hi"));
        }
        pieces.push(ConvexPiece::Interval { lo, hi });
    }
    Ok(pieces)
}

/// Reads a whitespace-separated row-major square matrix. Lines starting with
/// `#` and blank lines are ignored. Monotonicity is not enforced here.
pub fn load_matrix(path: &Path) -> Result<Operator> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidSpec(format!("{}:{}: bad number `{s}`", path.display(), lineno + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let m = super::matrix_from_rows(&rows)?;
    Operator::linear_unchecked(m)
}
