//! Rotation angles that keep exact rational multiples of π exact.
//!
//! Angles such as `pi/2` or `-2*pi/3` round-trip through text without loss,
//! which keeps serialized circuits byte-stable. Anything else is carried as
//! plain radians.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use num_rational::Rational64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse angle `{0}`: expected forms like `pi/2`, `-2*pi/3`, `3pi/4` or a decimal")]
pub struct AngleParseError(pub String);

/// An angle in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Angle {
    /// `r·π` for a rational `r`.
    PiMultiple(Rational64),
    /// Arbitrary angle in radians.
    Radians(f64),
}

impl Angle {
    pub const ZERO: Angle = Angle::PiMultiple(Rational64::new_raw(0, 1));

    /// `num·π/den`.
    pub fn pi_frac(num: i64, den: i64) -> Self {
        Angle::PiMultiple(Rational64::new(num, den))
    }

    pub fn radians(self) -> f64 {
        match self {
            Angle::PiMultiple(r) => PI * (*r.numer() as f64) / (*r.denom() as f64),
            Angle::Radians(x) => x,
        }
    }

    /// Integer multiple of the angle, exact for π-multiples.
    pub fn scale(self, k: i64) -> Self {
        match self {
            Angle::PiMultiple(r) => Angle::PiMultiple(r * k),
            Angle::Radians(x) => Angle::Radians(x * k as f64),
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Angle::PiMultiple(r) => *r.numer() == 0,
            Angle::Radians(x) => x == 0.0,
        }
    }
}

impl Neg for Angle {
    type Output = Angle;

    fn neg(self) -> Angle {
        self.scale(-1)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::PiMultiple(r) => {
                let (p, q) = (*r.numer(), *r.denom());
                let head = match p {
                    0 => return write!(f, "0"),
                    1 => "pi".to_string(),
                    -1 => "-pi".to_string(),
                    p => format!("{p}*pi"),
                };
                if q == 1 {
                    write!(f, "{head}")
                } else {
                    write!(f, "{head}/{q}")
                }
            }
            Angle::Radians(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Angle {
    type Err = AngleParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || AngleParseError(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let lower = t.to_ascii_lowercase();
        let Some(pi_at) = lower.find("pi") else {
            let x: f64 = lower.parse().map_err(|_| err())?;
            if !x.is_finite() {
                return Err(err());
            }
            return Ok(if x == 0.0 { Angle::ZERO } else { Angle::Radians(x) });
        };

        let coeff = lower[..pi_at].trim_end_matches('*');
        let num: i64 = match coeff {
            "" | "+" => 1,
            "-" => -1,
            c => c.parse().map_err(|_| err())?,
        };
        let rest = &lower[pi_at + 2..];
        let den: i64 = if rest.is_empty() {
            1
        } else {
            let d = rest.strip_prefix('/').ok_or_else(err)?;
            d.parse().map_err(|_| err())?
        };
        if den == 0 {
            return Err(err());
        }
        Ok(Angle::pi_frac(num, den))
    }
}
