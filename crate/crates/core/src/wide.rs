//! Extended-exponent floating point for products of many degree terms.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul};

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// `mantissa * 2^exponent` with the mantissa kept in `[1, 2)` (or zero).
///
/// Multiplying and dividing small integers stays exact as long as the
/// mantissa product fits in 53 bits; the exponent never overflows in
/// practice, so products over thousands of nodes remain representable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WideFloat {
    mantissa: f64,
    exponent: i64,
}

fn split(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let (x, bias) = if x.abs() < f64::MIN_POSITIVE {
        (x * 2f64.powi(64), -64)
    } else {
        (x, 0)
    };
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64 - 1023;
    let mantissa = f64::from_bits((bits & !(0x7ff << 52)) | (1023 << 52));
    (mantissa, exp + bias)
}

impl WideFloat {
    pub const ONE: WideFloat = WideFloat { mantissa: 1.0, exponent: 0 };
    pub const ZERO: WideFloat = WideFloat { mantissa: 0.0, exponent: 0 };

    pub fn new(x: f64) -> Self {
        let (mantissa, exponent) = split(x);
        WideFloat { mantissa, exponent }
    }

    pub fn is_zero(self) -> bool {
        self.mantissa == 0.0
    }

    pub fn ln(self) -> f64 {
        self.mantissa.ln() + self.exponent as f64 * std::f64::consts::LN_2
    }

    pub fn log10(self) -> f64 {
        self.ln() / std::f64::consts::LN_10
    }

    /// Nearest `f64`; saturates to infinity or zero when out of range.
    pub fn to_f64(self) -> f64 {
        if self.mantissa == 0.0 {
            return 0.0;
        }
        if self.exponent > 1100 {
            return self.mantissa.signum() * f64::INFINITY;
        }
        if self.exponent < -1200 {
            return 0.0;
        }
        // two steps keep each power of two representable
        let half = self.exponent / 2;
        self.mantissa * 2f64.powi(half as i32) * 2f64.powi((self.exponent - half) as i32)
    }

    /// `e^x` for any finite `x`.
    pub fn from_ln(x: f64) -> Self {
        let log2 = x / std::f64::consts::LN_2;
        let whole = log2.floor();
        WideFloat::new((log2 - whole).exp2()).ldexp(whole as i64)
    }

    pub fn mantissa(self) -> f64 {
        self.mantissa
    }

    pub fn exponent(self) -> i64 {
        self.exponent
    }

    /// `self * 2^k`, exact.
    pub fn ldexp(self, k: i64) -> Self {
        if self.is_zero() {
            return self;
        }
        WideFloat { mantissa: self.mantissa, exponent: self.exponent + k }
    }

    /// True when [`to_f64`](Self::to_f64) is a normal number or zero.
    pub fn fits_f64(self) -> bool {
        self.is_zero() || (-1022..=1023).contains(&self.exponent)
    }

    pub fn recip(self) -> Self {
        WideFloat::ONE / self
    }

    pub fn powi(self, k: u32) -> Self {
        let mut acc = WideFloat::ONE;
        for _ in 0..k {
            acc = acc * self;
        }
        acc
    }
}

impl From<f64> for WideFloat {
    fn from(x: f64) -> Self {
        WideFloat::new(x)
    }
}

impl Mul for WideFloat {
    type Output = WideFloat;
    fn mul(self, rhs: WideFloat) -> WideFloat {
        let (m, e) = split(self.mantissa * rhs.mantissa);
        if m == 0.0 {
            return WideFloat::ZERO;
        }
        WideFloat { mantissa: m, exponent: self.exponent + rhs.exponent + e }
    }
}

impl Div for WideFloat {
    type Output = WideFloat;
    fn div(self, rhs: WideFloat) -> WideFloat {
        let (m, e) = split(self.mantissa / rhs.mantissa);
        if m == 0.0 {
            return WideFloat::ZERO;
        }
        WideFloat { mantissa: m, exponent: self.exponent - rhs.exponent + e }
    }
}

impl PartialOrd for WideFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let sign = |w: &WideFloat| w.mantissa.partial_cmp(&0.0);
        let (a, b) = (sign(self)?, sign(other)?);
        if a != b || a == Ordering::Equal {
            return a.partial_cmp(&b);
        }
        let magnitude = self
            .exponent
            .cmp(&other.exponent)
            .then(self.mantissa.abs().partial_cmp(&other.mantissa.abs())?);
        Some(if a == Ordering::Less { magnitude.reverse() } else { magnitude })
    }
}

/// Decimal scientific notation once the value leaves the `f64` range.
impl fmt::Display for WideFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.fits_f64() {
            return write!(f, "{}", self.to_f64());
        }
        let l10 = (self.mantissa.abs().ln() + self.exponent as f64 * std::f64::consts::LN_2)
            / std::f64::consts::LN_10;
        // the logarithm carries about 13 significant digits here
        let mut e10 = l10.floor();
        let mut digits = format!("{:.10}", 10f64.powf(l10 - e10));
        if digits.starts_with("10") {
            digits = format!("{:.10}", 1.0);
            e10 += 1.0;
        }
        let sign = if self.mantissa < 0.0 { "-" } else { "" };
        write!(f, "{sign}{digits}e{e10}")
    }
}

/// A JSON number when representable, otherwise `"<mantissa>p<exponent>"`.
impl Serialize for WideFloat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.fits_f64() {
            s.serialize_f64(self.to_f64())
        } else {
            s.serialize_str(&format!("{}p{}", self.mantissa, self.exponent))
        }
    }
}

impl<'de> Deserialize<'de> for WideFloat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Number(x) => Ok(WideFloat::new(x)),
            Repr::Text(t) => {
                let (m, e) = t.split_once('p').ok_or_else(|| de::Error::custom(format!("bad wide float {t:?}")))?;
                let m: f64 = m.parse().map_err(de::Error::custom)?;
                let e: i64 = e.parse().map_err(de::Error::custom)?;
                Ok(WideFloat::new(m).ldexp(e))
            }
        }
    }
}

/// Compensated sum of wide terms, held as `sum * 2^exponent`.
#[derive(Clone, Copy, Debug)]
pub struct WideSum {
    exponent: i64,
    sum: f64,
    compensation: f64,
}

impl Default for WideSum {
    fn default() -> Self {
        WideSum { exponent: i64::MIN, sum: 0.0, compensation: 0.0 }
    }
}

fn scale(x: f64, k: i64) -> f64 {
    // both factors stay normal; anything shifted below 2^-1100 is dropped
    if k < -1100 {
        return 0.0;
    }
    let half = k / 2;
    x * 2f64.powi(half as i32) * 2f64.powi((k - half) as i32)
}

impl WideSum {
    pub fn add(&mut self, w: WideFloat) {
        if w.is_zero() {
            return;
        }
        // keep the running scale at the largest exponent seen, plus headroom
        let target = w.exponent + 64;
        if self.exponent == i64::MIN {
            self.exponent = target;
        } else if target > self.exponent {
            let shift = self.exponent - target;
            self.sum = scale(self.sum, shift);
            self.compensation = scale(self.compensation, shift);
            self.exponent = target;
        }
        let x = scale(w.mantissa, w.exponent - self.exponent);
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> WideFloat {
        if self.exponent == i64::MIN {
            return WideFloat::ZERO;
        }
        WideFloat::new(self.sum + self.compensation).ldexp(self.exponent)
    }
}
