//! Parameter ranges on the command line: `x`, `x,y,z`, `a..b` or `a..b:n`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Default point count for a span with non-integer ends.
const DEFAULT_POINTS: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum RangeSpec {
    List(Vec<f64>),
    Span { start: f64, end: f64, points: Option<usize> },
}

fn is_integer(x: f64) -> bool {
    x.fract() == 0.0 && x.abs() < 1e15
}

impl RangeSpec {
    /// Points of the range. Spans with integer ends and no explicit count
    /// step by one; other spans use `points` values, spaced geometrically
    /// when `logarithmic` is set.
    pub fn values(&self, logarithmic: bool) -> Result<Vec<f64>, CliError> {
        match self {
            Self::List(v) => Ok(v.clone()),
            Self::Span { start, end, points } => {
                let (a, b) = (*start, *end);
                if b < a {
                    return Err(CliError::Usage(format!("range {self} is empty")));
                }
                let n = match points {
                    Some(n) => *n,
                    None if is_integer(a) && is_integer(b) && !logarithmic => (b - a) as usize + 1,
                    None => DEFAULT_POINTS,
                };
                if n == 0 {
                    return Err(CliError::Usage(format!("range {self} has no points")));
                }
                if n == 1 {
                    return Ok(vec![a]);
                }
                if logarithmic {
                    if !(a > 0.0) {
                        return Err(CliError::Usage(format!("logarithmic range {self} must be positive")));
                    }
                    let (la, lb) = (a.log10(), b.log10());
                    // Ends are returned exactly as given.
                    Ok((0..n)
                        .map(|i| {
                            if i == 0 {
                                a
                            } else if i == n - 1 {
                                b
                            } else {
                                10f64.powf(la + (lb - la) * i as f64 / (n - 1) as f64)
                            }
                        })
                        .collect())
                } else {
                    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
                }
            }
        }
    }

    pub fn integers(&self) -> Result<Vec<usize>, CliError> {
        self.values(false)?
            .into_iter()
            .map(|v| {
                if is_integer(v) && v >= 0.0 {
                    Ok(v as usize)
                } else {
                    Err(CliError::Usage(format!("{v} is not a non-negative integer")))
                }
            })
            .collect()
    }

    pub fn single(&self) -> Result<f64, CliError> {
        match self.values(false)?.as_slice() {
            [x] => Ok(*x),
            _ => Err(CliError::Usage(format!("expected a single value, got range {self}"))),
        }
    }
}

fn parse_number(s: &str) -> Result<f64, CliError> {
    s.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("{s:?} is not a number")))
}

impl FromStr for RangeSpec {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        if let Some((a, rest)) = s.split_once("..") {
            let (b, points) = match rest.split_once(':') {
                Some((b, n)) => (b, Some(n.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad point count in {s:?}")))?)),
                None => (rest, None),
            };
            return Ok(Self::Span { start: parse_number(a)?, end: parse_number(b)?, points });
        }
        Ok(Self::List(s.split(',').map(parse_number).collect::<Result<_, _>>()?))
    }
}

impl fmt::Display for RangeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::List(v) => {
                let parts: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
                write!(f, "{}", parts.join(","))
            }
            Self::Span { start, end, points: Some(n) } => write!(f, "{start:?}..{end:?}:{n}"),
            Self::Span { start, end, points: None } => write!(f, "{start:?}..{end:?}"),
        }
    }
}

impl From<RangeSpec> for String {
    fn from(r: RangeSpec) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for RangeSpec {
    type Error = CliError;
    fn try_from(s: String) -> Result<Self, CliError> {
        s.parse()
    }
}

/// Half-open site range `i..j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct SiteRange {
    pub start: usize,
    pub end: usize,
}

impl FromStr for SiteRange {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        let (a, b) = s.split_once("..").ok_or_else(|| CliError::Usage(format!("site range {s:?} must look like i..j")))?;
        let p = |t: &str| t.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad site index {t:?}")));
        let (start, end) = (p(a)?, p(b)?);
        if end <= start {
            return Err(CliError::Usage(format!("site range {s:?} is empty")));
        }
        Ok(Self { start, end })
    }
}

impl fmt::Display for SiteRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

impl From<SiteRange> for String {
    fn from(r: SiteRange) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for SiteRange {
    type Error = CliError;
    fn try_from(s: String) -> Result<Self, CliError> {
        s.parse()
    }
}
