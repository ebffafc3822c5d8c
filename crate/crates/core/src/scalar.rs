//! Scalar literals: parsing and formatting for both backends.
//!
//! Grammar: an optional real part and an optional imaginary part, each an
//! optionally signed rational `p/q` or decimal; the imaginary part carries a
//! trailing `i`, and a bare `i` means `1i`. Examples: `3`, `-1/2`, `0.25`,
//! `1/2+1/2i`, `-i`, `2-5/3i`, `1.5e-3+2i`.

use crate::error::Error;
use crate::field::{ratio_to_f64, Gaussian};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Exact,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        })
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            _ => Err(Error::State(format!("unknown backend {s:?}"))),
        }
    }
}

/// A complex number in one of the two backends.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Gaussian),
    Float(Complex64),
}

impl Scalar {
    pub fn backend(&self) -> Backend {
        match self {
            Scalar::Exact(_) => Backend::Exact,
            Scalar::Float(_) => Backend::Float,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(g) => g.to_complex(),
            Scalar::Float(c) => *c,
        }
    }

    /// Parses a literal. With `Backend::Exact`, decimals become exact
    /// rationals (`0.1` is `1/10`).
    pub fn parse(text: &str, backend: Backend) -> Result<Scalar, Error> {
        let (re, im) = split_parts(text)?;
        Ok(match backend {
            Backend::Exact => Scalar::Exact(Gaussian::new(parse_rational(&re, text)?, parse_rational(&im, text)?)),
            Backend::Float => Scalar::Float(Complex64::new(parse_f64(&re, text)?, parse_f64(&im, text)?)),
        })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(g) => write!(f, "{g}"),
            Scalar::Float(c) => f.write_str(&format_complex(*c)),
        }
    }
}

/// Fixed 17-significant-digit rendering, stable across runs.
pub fn format_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    format!("{v:.16e}")
}

pub fn format_complex(c: Complex64) -> String {
    match (c.re == 0.0, c.im == 0.0) {
        (_, true) => format_f64(c.re),
        (true, false) => format!("{}i", format_f64(c.im)),
        (false, false) => {
            let im = format_f64(c.im);
            if im.starts_with('-') {
                format!("{}{}i", format_f64(c.re), im)
            } else {
                format!("{}+{}i", format_f64(c.re), im)
            }
        }
    }
}

/// Splits a literal into signed real and imaginary token strings
/// (each possibly empty, meaning zero).
fn split_parts(text: &str) -> Result<(String, String), Error> {
    let bad = || Error::Scalar(text.to_string());
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad());
    }
    // Term boundaries: a sign not at the start and not following an exponent marker.
    let bytes = s.as_bytes();
    let mut cuts = vec![0];
    for k in 1..bytes.len() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            cuts.push(k);
        }
    }
    cuts.push(bytes.len());
    let mut re: Option<String> = None;
    let mut im: Option<String> = None;
    for w in cuts.windows(2) {
        let term = &s[w[0]..w[1]];
        if let Some(body) = term.strip_suffix('i') {
            if im.is_some() {
                return Err(bad());
            }
            let body = match body {
                "" | "+" => "1".to_string(),
                "-" => "-1".to_string(),
                b => b.to_string(),
            };
            im = Some(body);
        } else {
            if re.is_some() || im.is_some() {
                return Err(bad());
            }
            re = Some(term.to_string());
        }
    }
    Ok((re.unwrap_or_default(), im.unwrap_or_default()))
}

fn parse_rational(tok: &str, whole: &str) -> Result<BigRational, Error> {
    let bad = || Error::Scalar(whole.to_string());
    if tok.is_empty() {
        return Ok(BigRational::zero());
    }
    let (neg, body) = match tok.as_bytes()[0] {
        b'-' => (true, &tok[1..]),
        b'+' => (false, &tok[1..]),
        _ => (false, tok),
    };
    let digits = |d: &str| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit());
    let value = if let Some((p, q)) = body.split_once('/') {
        if !digits(p) || !digits(q) {
            return Err(bad());
        }
        let q: BigInt = q.parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        BigRational::new(p.parse().map_err(|_| bad())?, q)
    } else {
        let (mantissa, exp) = match body.find(['e', 'E']) {
            Some(k) => (&body[..k], body[k + 1..].parse::<i32>().map_err(|_| bad())?),
            None => (body, 0),
        };
        let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if (int.is_empty() && frac.is_empty()) || !(int.is_empty() || digits(int)) || !(frac.is_empty() || digits(frac))
        {
            return Err(bad());
        }
        let n: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let scale = exp - frac.len() as i32;
        let ten = BigInt::from(10);
        if scale >= 0 {
            BigRational::from_integer(n * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(n, num_traits::pow(ten, (-scale) as usize))
        }
    };
    Ok(if neg { -value } else { value })
}

fn parse_f64(tok: &str, whole: &str) -> Result<f64, Error> {
    if tok.is_empty() {
        return Ok(0.0);
    }
    if tok.contains('/') {
        return Ok(ratio_to_f64(&parse_rational(tok, whole)?));
    }
    tok.parse::<f64>().map_err(|_| Error::Scalar(whole.to_string()))
}

/// `p/q` with `q = 1` omitted — used by reports.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(s: &str) -> Gaussian {
        match Scalar::parse(s, Backend::Exact).unwrap() {
            Scalar::Exact(g) => g,
            _ => unreachable!(),
        }
    }

    #[test]
    fn literals() {
        assert_eq!(exact("1/2+1/2i"), Gaussian::from_parts(1, 2, 1, 2));
        assert_eq!(exact("i"), Gaussian::from_parts(0, 1, 1, 1));
        assert_eq!(exact("-i"), Gaussian::from_parts(0, 1, -1, 1));
        assert_eq!(exact("0.25"), Gaussian::from_parts(1, 4, 0, 1));
        assert_eq!(exact("-3/4i"), Gaussian::from_parts(0, 1, -3, 4));
        assert_eq!(exact("2 - 5/3 i"), Gaussian::from_parts(2, 1, -5, 3));
        assert_eq!(exact("1.5e-3"), Gaussian::from_parts(3, 2000, 0, 1));
        assert_eq!(exact("+7"), Gaussian::from_parts(7, 1, 0, 1));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "1/0", "abc", "1+2", "i+i", "2i+3", "1//2", ".", "1/2.5"] {
            assert!(Scalar::parse(s, Backend::Exact).is_err(), "{s}");
        }
    }

    #[test]
    fn float_round_trip() {
        let c = Complex64::new(0.1, -1.0 / 3.0);
        let s = format_complex(c);
        assert_eq!(Scalar::parse(&s, Backend::Float).unwrap(), Scalar::Float(c));
    }
}
