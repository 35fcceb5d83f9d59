//! Exact complex-rational scalars used as group-algebra coefficients.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// `re + i·im` with both parts exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coeff {
    pub re: BigRational,
    pub im: BigRational,
}

impl Coeff {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Coeff { re, im }
    }

    pub fn zero() -> Self {
        Coeff::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Coeff::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Coeff::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    /// The real rational `num/den`. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Coeff::new(rat(num, den), BigRational::zero())
    }

    /// `(re_num/re_den) + i·(im_num/im_den)`.
    pub fn complex(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Coeff::new(rat(re_num, re_den), rat(im_num, im_den))
    }

    pub fn real(re: BigRational) -> Self {
        Coeff::new(re, BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Coeff::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|²`, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Coeff::new(&self.re * r, &self.im * r)
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Upper bound on `|z|` as a float (the complex modulus, rounded up by one ulp-ish margin).
    pub fn abs_f64(&self) -> f64 {
        self.to_c64().norm()
    }
}

pub(crate) fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty rational".into());
    }
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| format!("invalid numerator in `{s}`"))?;
    let d: BigInt = d.parse().map_err(|_| format!("invalid denominator in `{s}`"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(BigRational::new(n, d))
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rational(&self.re));
        }
        if self.re.is_zero() {
            return write!(f, "{}i", fmt_rational(&self.im));
        }
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{}i", fmt_rational(&self.re), sign, fmt_rational(&self.im.abs()))
    }
}

impl FromStr for Coeff {
    type Err = String;

    /// Accepts `p/q`, `p/qi`, or `p/q+r/si` / `p/q-r/si`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(body) = s.strip_suffix('i') {
            // split at the last sign that is not the leading one
            let split = body
                .char_indices()
                .skip(1)
                .filter(|(_, c)| *c == '+' || *c == '-')
                .map(|(i, _)| i)
                .last();
            match split {
                Some(i) => {
                    let re = parse_rational(&body[..i])?;
                    let im_str = &body[i..];
                    let im = match im_str {
                        "+" => BigRational::one(),
                        "-" => -BigRational::one(),
                        _ => parse_rational(im_str.trim_start_matches('+'))?,
                    };
                    Ok(Coeff::new(re, im))
                }
                None => {
                    let im = match body {
                        "" | "+" => BigRational::one(),
                        "-" => -BigRational::one(),
                        _ => parse_rational(body)?,
                    };
                    Ok(Coeff::new(BigRational::zero(), im))
                }
            }
        } else {
            Ok(Coeff::real(parse_rational(&s)?))
        }
    }
}

impl Serialize for Coeff {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Coeff {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(n) => Ok(Coeff::from_int(n)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl Add for &Coeff {
    type Output = Coeff;
    fn add(self, rhs: &Coeff) -> Coeff {
        Coeff::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Add for Coeff {
    type Output = Coeff;
    fn add(self, rhs: Coeff) -> Coeff {
        &self + &rhs
    }
}

impl AddAssign<&Coeff> for Coeff {
    fn add_assign(&mut self, rhs: &Coeff) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for &Coeff {
    type Output = Coeff;
    fn sub(self, rhs: &Coeff) -> Coeff {
        Coeff::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Sub for Coeff {
    type Output = Coeff;
    fn sub(self, rhs: Coeff) -> Coeff {
        &self - &rhs
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &Coeff) -> Coeff {
        Coeff::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Mul for Coeff {
    type Output = Coeff;
    fn mul(self, rhs: Coeff) -> Coeff {
        &self * &rhs
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        for s in ["0", "-1/2", "3i", "1/2+3/4i", "-1-2i", "5/3-1/7i"] {
            let c: Coeff = s.parse().unwrap();
            let back: Coeff = c.to_string().parse().unwrap();
            assert_eq!(c, back, "{s}");
        }
        assert_eq!("1/2-i".parse::<Coeff>().unwrap(), Coeff::complex(1, 2, -1, 1));
        assert_eq!("-i".parse::<Coeff>().unwrap(), Coeff::complex(0, 1, -1, 1));
        assert!("1/0".parse::<Coeff>().is_err());
        assert!("x".parse::<Coeff>().is_err());
    }

    #[test]
    fn field_ops() {
        let a = Coeff::complex(1, 2, 1, 3);
        let b = Coeff::complex(-2, 1, 1, 1);
        // (1/2 + i/3)(-2 + i) = -1 - 1/3 + i(1/2 - 2/3)
        assert_eq!(&a * &b, Coeff::complex(-4, 3, -1, 6));
        assert_eq!(&(&a + &b) - &b, a);
        assert_eq!(a.conj().conj(), a);
        assert_eq!((&a * &a.conj()).im, BigRational::zero());
        assert_eq!(a.norm_sqr(), rat(13, 36));
    }
}
