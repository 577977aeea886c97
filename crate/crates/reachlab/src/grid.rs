//! Grid syntax: `a:b:m` (m evenly spaced points), `geom:a:b:m`,
//! `dyadic:top:m` (`top·2^{-j}`, j < m), or a comma list.

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Text(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Increasing,
    Decreasing,
}

fn num(s: &str) -> Result<f64, CliError> {
    s.trim().parse::<f64>().map_err(|_| CliError::Validation(format!("bad grid number {s:?}")))
}

fn count(s: &str) -> Result<usize, CliError> {
    match s.trim().parse::<usize>() {
        Ok(m) if m >= 1 => Ok(m),
        _ => Err(CliError::Validation(format!("bad grid count {s:?}"))),
    }
}

/// Parses grid text. Only `dyadic` follows `order`; every other form keeps
/// the written order.
pub fn parse(text: &str, order: Order) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        ["dyadic", top, m] => {
            let (top, m) = (num(top)?, count(m)?);
            let mut v: Vec<f64> = (0..m).map(|j| top / 2f64.powi(j as i32)).collect();
            if order == Order::Increasing {
                v.reverse();
            }
            Ok(v)
        }
        ["geom", a, b, m] => {
            let (a, b, m) = (num(a)?, num(b)?, count(m)?);
            if !(a > 0.0 && b > 0.0) {
                return Err(CliError::Validation("geometric grid ends must be > 0".into()));
            }
            if m == 1 {
                return Ok(vec![a]);
            }
            let q = (b / a).ln() / (m - 1) as f64;
            Ok((0..m).map(|i| if i + 1 == m { b } else { a * (q * i as f64).exp() }).collect())
        }
        [a, b, m] => {
            let (a, b, m) = (num(a)?, num(b)?, count(m)?);
            if m == 1 {
                return Ok(vec![a]);
            }
            let h = (b - a) / (m - 1) as f64;
            Ok((0..m).map(|i| if i + 1 == m { b } else { a + h * i as f64 }).collect())
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(CliError::Validation(format!("unrecognised grid {text:?}"))),
    }
}

impl GridSpec {
    /// Values, checked to be positive and strictly monotone in `order`.
    pub fn values(&self, name: &str, order: Order) -> Result<Vec<f64>, CliError> {
        let v = match self {
            GridSpec::List(v) => v.clone(),
            GridSpec::Text(s) => parse(s, order)?,
        };
        check(&v, name, order)?;
        Ok(v)
    }
}

pub fn check(v: &[f64], name: &str, order: Order) -> Result<(), CliError> {
    if v.is_empty() {
        return Err(CliError::Validation(format!("{name} grid is empty")));
    }
    if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(CliError::Validation(format!("{name} grid must be strictly positive")));
    }
    let sorted = match order {
        Order::Increasing => v.windows(2).all(|w| w[0] < w[1]),
        Order::Decreasing => v.windows(2).all(|w| w[0] > w[1]),
    };
    if !sorted {
        let dir = if order == Order::Increasing { "increasing" } else { "decreasing" };
        return Err(CliError::Validation(format!("{name} grid must be strictly {dir}")));
    }
    Ok(())
}
