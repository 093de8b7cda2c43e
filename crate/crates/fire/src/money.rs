//! Fixed-point USD amounts for exact cost accounting.
//!
//! Stored as an integer count of 1e-12 dollars, twelve fractional digits.
//! Per-token prices are per-million-token rates divided by 1e6, so six
//! fractional digits of rate precision stay exact after the division.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Fractional digits carried by [`Money`].
pub const MONEY_SCALE: u32 = 12;
const UNITS_PER_DOLLAR: i128 = 1_000_000_000_000;
const UNITS_PER_CENT: i128 = 10_000_000_000;

/// A non-negative USD amount with twelve fractional digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Money(i128);

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MoneyError {
    #[error("invalid money literal {0:?}")]
    Invalid(String),
    #[error("money amounts cannot be negative: {0:?}")]
    Negative(String),
    #[error("more than {MONEY_SCALE} fractional digits: {0:?}")]
    TooPrecise(String),
}

impl Money {
    pub const ZERO: Money = Money(0);

    /// Whole dollars.
    pub fn from_dollars(dollars: u64) -> Money {
        Money(dollars as i128 * UNITS_PER_DOLLAR)
    }

    /// Raw 1e-12-dollar units.
    pub fn from_units(units: u128) -> Money {
        Money(units as i128)
    }

    pub fn units(self) -> i128 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// `n` times this amount.
    pub fn times(self, n: u64) -> Money {
        Money(self.0.checked_mul(n as i128).expect("money overflow"))
    }

    /// `count * self / 1_000_000`, rounding half-up on the last unit.
    ///
    /// This is the per-token cost step for rates quoted per million tokens;
    /// rates with up to six fractional digits divide exactly.
    pub fn per_million(self, count: u64) -> Money {
        let product = self.0.checked_mul(count as i128).expect("money overflow");
        let quotient = product / 1_000_000;
        let remainder = product % 1_000_000;
        Money(if remainder * 2 >= 1_000_000 { quotient + 1 } else { quotient })
    }

    /// Canonical decimal string: trailing fractional zeros stripped, "0" for zero.
    pub fn to_decimal_string(self) -> String {
        let whole = self.0 / UNITS_PER_DOLLAR;
        let frac = self.0 % UNITS_PER_DOLLAR;
        if frac == 0 {
            return whole.to_string();
        }
        let mut digits = format!("{frac:012}");
        while digits.ends_with('0') {
            digits.pop();
        }
        format!("{whole}.{digits}")
    }

    /// Two-decimal rendering with half-up rounding, e.g. "1.05", "0.00".
    pub fn to_cents_string(self) -> String {
        let cents = (self.0 + UNITS_PER_CENT / 2) / UNITS_PER_CENT;
        format!("{}.{:02}", cents / 100, cents % 100)
    }
}

impl FromStr for Money {
    type Err = MoneyError;

    fn from_str(s: &str) -> Result<Money, MoneyError> {
        let trimmed = s.trim();
        if trimmed.starts_with('-') {
            return Err(MoneyError::Negative(s.to_string()));
        }
        let (whole, frac) = match trimmed.split_once('.') {
            Some((w, f)) => (w, f),
            None => (trimmed, ""),
        };
        if whole.is_empty() && frac.is_empty() {
            return Err(MoneyError::Invalid(s.to_string()));
        }
        if frac.len() > MONEY_SCALE as usize {
            return Err(MoneyError::TooPrecise(s.to_string()));
        }
        let whole_part: i128 = if whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| MoneyError::Invalid(s.to_string()))?
        };
        let mut frac_units: i128 = 0;
        if !frac.is_empty() {
            if !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(MoneyError::Invalid(s.to_string()));
            }
            let padded = format!("{frac:0<12}");
            frac_units = padded.parse().map_err(|_| MoneyError::Invalid(s.to_string()))?;
        }
        whole_part
            .checked_mul(UNITS_PER_DOLLAR)
            .and_then(|w| w.checked_add(frac_units))
            .map(Money)
            .ok_or_else(|| MoneyError::Invalid(s.to_string()))
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0.checked_add(rhs.0).expect("money overflow"))
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        *self = *self + rhs;
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, Add::add)
    }
}

impl Serialize for Money {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_decimal_string())
    }
}

impl<'de> Deserialize<'de> for Money {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Money, D::Error> {
        struct MoneyVisitor;

        impl serde::de::Visitor<'_> for MoneyVisitor {
            type Value = Money;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a decimal string or number of USD")
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Money, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<Money, E> {
                // Shortest round-trip display recovers the literal the user wrote.
                format!("{v}").parse().map_err(E::custom)
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<Money, E> {
                Ok(Money::from_dollars(v))
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<Money, E> {
                if v < 0 {
                    return Err(E::custom(MoneyError::Negative(v.to_string())));
                }
                Ok(Money::from_dollars(v as u64))
            }
        }

        deserializer.deserialize_any(MoneyVisitor)
    }
}
