//! Exact rational coweights and the small amount of rational linear algebra
//! the root datum needs.

use std::fmt;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A point of `X_*(T) (x) Q`, in the coordinates of the cocharacter lattice
/// basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalCoweight {
    coords: Vec<BigRational>,
}

impl RationalCoweight {
    pub fn new(coords: Vec<BigRational>) -> Self {
        RationalCoweight { coords }
    }

    pub fn zero(dim: usize) -> Self {
        RationalCoweight {
            coords: vec![BigRational::zero(); dim],
        }
    }

    pub fn from_integral(v: &[i64]) -> Self {
        RationalCoweight {
            coords: v.iter().map(|&x| rat(x)).collect(),
        }
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RationalCoweight {
            coords: self.coords.iter().map(|x| x * c).collect(),
        }
    }

    /// Pairing with an integral character given in the dual basis.
    pub fn pair(&self, character: &[i64]) -> BigRational {
        self.coords
            .iter()
            .zip(character)
            .fold(BigRational::zero(), |acc, (x, &c)| acc + x * rat(c))
    }

    /// `self - c * v` for an integral vector `v`.
    pub fn sub_multiple(&self, c: &BigRational, v: &[i64]) -> Self {
        RationalCoweight {
            coords: self
                .coords
                .iter()
                .zip(v)
                .map(|(x, &vi)| x - c * rat(vi))
                .collect(),
        }
    }

    /// The coordinates as integers, if they all are.
    pub fn to_integral(&self) -> Option<Vec<i64>> {
        self.coords
            .iter()
            .map(|x| {
                x.is_integer()
                    .then(|| i64::try_from(x.to_integer()).ok())
                    .flatten()
            })
            .collect()
    }

    /// Strings such as `"1/2"`, used by every serialised form.
    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(|x| x.to_string()).collect()
    }
}

impl Add for &RationalCoweight {
    type Output = RationalCoweight;
    fn add(self, rhs: &RationalCoweight) -> RationalCoweight {
        RationalCoweight {
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &RationalCoweight {
    type Output = RationalCoweight;
    fn sub(self, rhs: &RationalCoweight) -> RationalCoweight {
        RationalCoweight {
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Display for RationalCoweight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, x) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("]")
    }
}

impl Serialize for RationalCoweight {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

/// Inverse of a square integer matrix over `Q`, or `None` when singular.
pub fn invert(m: &[Vec<i64>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<BigRational> = row.iter().map(|&x| rat(x)).collect();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// `m * v` for a rational matrix and a rational vector.
pub fn apply(m: &[Vec<BigRational>], v: &[BigRational]) -> Vec<BigRational> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(BigRational::zero(), |acc, (a, b)| acc + a * b))
        .collect()
}

pub fn is_nonnegative(v: &[BigRational]) -> bool {
    v.iter().all(|x| !x.is_negative())
}
