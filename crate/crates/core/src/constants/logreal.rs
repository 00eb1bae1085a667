use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A real number stored as a sign and `log10 |x|`.
///
/// Products, quotients and powers never overflow; sums fall back to
/// log-sum-exp. Zero is `sign == 0` with `log10_abs == -inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "LogRealRepr", try_from = "LogRealRepr")]
pub struct LogReal {
    sign: i8,
    log10_abs: f64,
}

#[derive(Serialize, Deserialize)]
struct LogRealRepr {
    sign: i8,
    log10: Option<f64>,
    #[serde(default)]
    decimal: Option<String>,
}

impl From<LogReal> for LogRealRepr {
    fn from(x: LogReal) -> Self {
        Self {
            sign: x.sign,
            log10: (x.sign != 0).then_some(x.log10_abs),
            decimal: Some(x.to_decimal_string(12)),
        }
    }
}

impl TryFrom<LogRealRepr> for LogReal {
    type Error = String;

    fn try_from(r: LogRealRepr) -> Result<Self, Self::Error> {
        match (r.sign, r.log10) {
            (0, _) => Ok(LogReal::ZERO),
            (s @ (1 | -1), Some(l)) if l.is_finite() => Ok(LogReal {
                sign: s,
                log10_abs: l,
            }),
            _ => Err(format!(
                "invalid log-scale number: sign {}, log10 {:?}",
                r.sign, r.log10
            )),
        }
    }
}

impl LogReal {
    pub const ZERO: LogReal = LogReal {
        sign: 0,
        log10_abs: f64::NEG_INFINITY,
    };
    pub const ONE: LogReal = LogReal {
        sign: 1,
        log10_abs: 0.0,
    };

    pub fn from_f64(x: f64) -> Self {
        assert!(!x.is_nan(), "LogReal from NaN");
        if x == 0.0 {
            Self::ZERO
        } else {
            Self {
                sign: if x > 0.0 { 1 } else { -1 },
                log10_abs: x.abs().log10(),
            }
        }
    }

    /// `10^l`, positive.
    pub fn from_log10(l: f64) -> Self {
        assert!(l.is_finite(), "non-finite log10 {l}");
        Self {
            sign: 1,
            log10_abs: l,
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn log10_abs(&self) -> f64 {
        self.log10_abs
    }

    pub fn is_positive(&self) -> bool {
        self.sign > 0
    }

    /// Converts back; overflows to `±inf` / underflows to `0` outside the double range.
    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            self.sign as f64 * 10f64.powf(self.log10_abs)
        }
    }

    /// `x^e`; requires `x > 0` unless `e` is an integer.
    pub fn powf(self, e: f64) -> Self {
        match self.sign {
            0 => {
                assert!(e > 0.0, "0 raised to non-positive power");
                Self::ZERO
            }
            1 => Self::from_log10(self.log10_abs * e),
            _ => {
                assert!(e.fract() == 0.0, "negative base with fractional exponent");
                let odd = (e as i64).rem_euclid(2) == 1;
                Self {
                    sign: if odd { -1 } else { 1 },
                    log10_abs: self.log10_abs * e,
                }
            }
        }
    }

    pub fn recip(self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero");
        Self {
            sign: self.sign,
            log10_abs: -self.log10_abs,
        }
    }

    pub fn abs(self) -> Self {
        Self {
            sign: self.sign.abs(),
            log10_abs: self.log10_abs,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// `d.ddd…e±NN` with `digits` decimals, computed without leaving log space.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        if self.sign == 0 {
            return format!("{:.*}e0", digits, 0.0);
        }
        let mut exp = self.log10_abs.floor();
        let mut mant = 10f64.powf(self.log10_abs - exp);
        let rounded = format!("{:.*}", digits, mant);
        if rounded.starts_with("10") {
            exp += 1.0;
            mant /= 10.0;
        }
        let s = if self.sign < 0 { "-" } else { "" };
        format!("{s}{:.*}e{}", digits, mant, exp as i64)
    }
}

impl Add for LogReal {
    type Output = LogReal;

    /// Log-sum-exp; exact cancellation gives zero.
    fn add(self, other: LogReal) -> LogReal {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (big, small) = if self.log10_abs >= other.log10_abs {
            (self, other)
        } else {
            (other, self)
        };
        let ratio = 10f64.powf(small.log10_abs - big.log10_abs);
        let factor = if big.sign == small.sign {
            1.0 + ratio
        } else {
            1.0 - ratio
        };
        if factor == 0.0 {
            return LogReal::ZERO;
        }
        LogReal {
            sign: big.sign,
            log10_abs: big.log10_abs + factor.log10(),
        }
    }
}

impl Sub for LogReal {
    type Output = LogReal;

    fn sub(self, other: LogReal) -> LogReal {
        self + (-other)
    }
}

impl Mul for LogReal {
    type Output = LogReal;

    fn mul(self, rhs: LogReal) -> LogReal {
        if self.sign == 0 || rhs.sign == 0 {
            return LogReal::ZERO;
        }
        LogReal {
            sign: self.sign * rhs.sign,
            log10_abs: self.log10_abs + rhs.log10_abs,
        }
    }
}

impl Div for LogReal {
    type Output = LogReal;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: LogReal) -> LogReal {
        self * rhs.recip()
    }
}

impl Neg for LogReal {
    type Output = LogReal;

    fn neg(self) -> LogReal {
        LogReal {
            sign: -self.sign,
            log10_abs: self.log10_abs,
        }
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => self.log10_abs.partial_cmp(&other.log10_abs),
                _ => other.log10_abs.partial_cmp(&self.log10_abs),
            },
            o => Some(o),
        }
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(6);
        f.write_str(&self.to_decimal_string(digits))
    }
}
