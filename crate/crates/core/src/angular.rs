//! Half-integer quantum numbers and Clebsch-Gordan coefficients.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A half-integer quantum number stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const HALF: HalfInt = HalfInt(1);
    pub const THREE_HALVES: HalfInt = HalfInt(3);

    pub const fn from_doubled(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn doubled(self) -> i32 {
        self.0
    }

    /// Parses a real value, accepting only exact multiples of 1/2.
    pub fn from_f64(value: f64) -> Option<Self> {
        let twice = value * 2.0;
        if twice.is_finite() && twice.fract() == 0.0 && twice.abs() < i32::MAX as f64 {
            Some(HalfInt(twice as i32))
        } else {
            None
        }
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn is_half_odd(self) -> bool {
        self.0 % 2 != 0
    }

    /// Projections `-j, -j+1, ..., j` in ascending order.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> {
        let j = self.0;
        (-j..=j).step_by(2).map(HalfInt)
    }

    /// Multiplicity `2j + 1`.
    pub fn multiplicity(self) -> usize {
        (self.0 + 1) as usize
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl From<i32> for HalfInt {
    fn from(integer: i32) -> Self {
        HalfInt(2 * integer)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = f64::deserialize(deserializer)?;
        HalfInt::from_f64(value)
            .ok_or_else(|| serde::de::Error::custom(format!("{value} is not a multiple of 1/2")))
    }
}

fn factorial(n: i32) -> f64 {
    debug_assert!(n >= 0);
    (1..=n).fold(1.0, |acc, k| acc * f64::from(k))
}

fn triangle(j1: i32, j2: i32, j3: i32) -> bool {
    j3 >= (j1 - j2).abs() && j3 <= j1 + j2 && (j1 + j2 + j3) % 2 == 0
}

/// Clebsch-Gordan coefficient `<j1 m1; j2 m2 | j m>` (Condon-Shortley phase),
/// evaluated with the Racah closed form. Returns 0 for forbidden combinations.
pub fn clebsch_gordan(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> f64 {
    let (tj1, tm1, tj2, tm2, tj, tm) = (j1.0, m1.0, j2.0, m2.0, j.0, m.0);
    if tm1 + tm2 != tm || !triangle(tj1, tj2, tj) {
        return 0.0;
    }
    if tm1.abs() > tj1 || tm2.abs() > tj2 || tm.abs() > tj {
        return 0.0;
    }
    if (tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tj + tm) % 2 != 0 {
        return 0.0;
    }

    // All factorial arguments below are integers because of the parity checks.
    let a = (tj1 + tj2 - tj) / 2;
    let b = (tj1 - tm1) / 2;
    let c = (tj2 + tm2) / 2;
    let d = (tj - tj2 + tm1) / 2;
    let e = (tj - tj1 - tm2) / 2;

    let prefactor = (f64::from(tj + 1)
        * factorial((tj + tj1 - tj2) / 2)
        * factorial((tj - tj1 + tj2) / 2)
        * factorial(a)
        / factorial((tj1 + tj2 + tj) / 2 + 1))
        .sqrt();
    let projections = (factorial((tj + tm) / 2)
        * factorial((tj - tm) / 2)
        * factorial((tj1 - tm1) / 2)
        * factorial((tj1 + tm1) / 2)
        * factorial((tj2 - tm2) / 2)
        * factorial((tj2 + tm2) / 2))
        .sqrt();

    let k_min = 0.max(-d).max(-e);
    let k_max = a.min(b).min(c);
    let series: f64 = (k_min..=k_max)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign / (factorial(k)
                * factorial(a - k)
                * factorial(b - k)
                * factorial(c - k)
                * factorial(d + k)
                * factorial(e + k))
        })
        .sum();

    prefactor * projections * series
}
