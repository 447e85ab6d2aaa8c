use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_integer::Roots;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, Zero};

/// Exact rational coefficient.
///
/// Arithmetic panics on `i128` overflow; coefficients arising from the
/// models handled here stay far from that limit.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Rational(Ratio<i128>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));
    pub const MINUS_ONE: Rational = Rational(Ratio::new_raw(-1, 1));
    pub const HALF: Rational = Rational(Ratio::new_raw(1, 2));

    pub fn new(numer: i128, denom: i128) -> Self {
        assert!(denom != 0, "rational with zero denominator");
        Rational(Ratio::new(numer, denom))
    }

    pub fn integer(n: i128) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// Integer power, `None` on overflow or `0^negative`.
    pub fn checked_powi(&self, k: i64) -> Option<Rational> {
        if k < 0 {
            if self.is_zero() {
                return None;
            }
            return Rational(self.0.recip()).checked_powi(-k);
        }
        let mut acc = Ratio::one();
        for _ in 0..k {
            acc = acc.checked_mul(&self.0)?;
        }
        Some(Rational(acc))
    }

    /// Exact square root when numerator and denominator are perfect squares.
    pub fn exact_sqrt(&self) -> Option<Rational> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        (n * n == self.numer() && d * d == self.denom()).then(|| Rational::new(n, d))
    }

    /// Parses `12`, `-3/4` or a finite decimal such as `0.25`.
    pub fn parse(text: &str) -> Option<Rational> {
        if let Some((n, d)) = text.split_once('/') {
            let n: i128 = n.trim().parse().ok()?;
            let d: i128 = d.trim().parse().ok()?;
            return (d != 0).then(|| Rational::new(n, d));
        }
        if let Some((whole, frac)) = text.split_once('.') {
            if frac.len() > 30 || !frac.chars().all(|c| c.is_ascii_digit()) {
                return None;
            }
            let negative = whole.starts_with('-');
            let whole: i128 = if whole.is_empty() || whole == "-" { 0 } else { whole.parse().ok()? };
            let scale = 10i128.checked_pow(frac.len() as u32)?;
            let f: i128 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
            let magnitude = whole.abs().checked_mul(scale)?.checked_add(f)?;
            let numer = if negative { -magnitude } else { magnitude };
            return Some(Rational::new(numer, scale));
        }
        text.parse().ok().map(Rational::integer)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n as i128)
    }
}

macro_rules! checked_op {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$checked(&rhs.0).expect("rational coefficient overflow"))
            }
        }
    };
}

checked_op!(Add, add, checked_add);
checked_op!(Sub, sub, checked_sub);
checked_op!(Mul, mul, checked_mul);
checked_op!(Div, div, checked_div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}
