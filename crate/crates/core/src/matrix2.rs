//! 2x2 integer matrices, the elements of `GL_2(Z)` and `M_2(Z)` used by the
//! cell complex, the modular symbols and the unital candidates.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

/// `[[a, b], [c, d]]`, acting on column vectors.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Mat2 {
    #[serde(serialize_with = "ser_big")]
    pub a: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub b: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub c: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub d: BigInt,
}

fn ser_big<S: serde::Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

impl Mat2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        Mat2 {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        }
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    /// Matrix whose columns are `(p, q)` and `(r, s)`.
    pub fn from_columns(p: impl Into<BigInt>, q: impl Into<BigInt>, r: impl Into<BigInt>, s: impl Into<BigInt>) -> Self {
        Self::new(p, r, q, s)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().magnitude().is_one()
    }

    pub fn is_scalar(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    /// Inverse of a determinant `±1` matrix.
    pub fn inverse_unimodular(&self) -> Option<Mat2> {
        let det = self.det();
        if !det.magnitude().is_one() {
            return None;
        }
        Some(Mat2 {
            a: &self.d * &det,
            b: -&self.b * &det,
            c: -&self.c * &det,
            d: &self.a * &det,
        })
    }

    pub fn neg(&self) -> Mat2 {
        Mat2 {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
            d: -&self.d,
        }
    }

    /// First column, the image of `e = (1:0)`.
    pub fn first_column(&self) -> (BigInt, BigInt) {
        (self.a.clone(), self.c.clone())
    }

    pub fn second_column(&self) -> (BigInt, BigInt) {
        (self.b.clone(), self.d.clone())
    }

    /// Entries reduced into `[0, n)`, as `[a, b, c, d]`.
    pub fn reduce_mod(&self, n: u64) -> [u64; 4] {
        let n = BigInt::from(n);
        let r = |x: &BigInt| x.mod_floor(&n).to_u64().expect("residue fits in u64");
        [r(&self.a), r(&self.b), r(&self.c), r(&self.d)]
    }

    /// Lower-left entry is divisible by `n`.
    pub fn in_gamma0_pm(&self, n: u64) -> bool {
        self.is_unimodular() && self.c.is_multiple_of(&BigInt::from(n))
    }

    pub fn in_gamma0(&self, n: u64) -> bool {
        self.in_gamma0_pm(n) && self.det().is_positive()
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;
    fn mul(self, r: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &r.a + &self.b * &r.c,
            b: &self.a * &r.b + &self.b * &r.d,
            c: &self.c * &r.a + &self.d * &r.c,
            d: &self.c * &r.b + &self.d * &r.d,
        }
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Small fixed matrix for the finite stabilizer tables.
pub type SmallMat = [i64; 4];

pub fn small(m: &SmallMat) -> Mat2 {
    Mat2::new(m[0], m[1], m[2], m[3])
}

pub fn small_det(m: &SmallMat) -> i64 {
    m[0] * m[3] - m[1] * m[2]
}

pub fn small_mul(x: &SmallMat, y: &SmallMat) -> SmallMat {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_unimodular() {
        let g = Mat2::new(9, -5, 11, -6);
        let gi = g.inverse_unimodular().unwrap();
        assert_eq!(&g * &gi, Mat2::identity());
        let h = Mat2::new(0, 1, 1, 0);
        assert_eq!(&h * &h.inverse_unimodular().unwrap(), Mat2::identity());
        assert!(Mat2::new(2, 0, 0, 1).inverse_unimodular().is_none());
    }

    #[test]
    fn membership() {
        assert!(Mat2::new(9, -5, 11, -6).in_gamma0(11));
        assert!(Mat2::new(1, 0, 0, -1).in_gamma0_pm(11));
        assert!(!Mat2::new(1, 0, 0, -1).in_gamma0(11));
        assert!(!Mat2::new(1, 0, 1, 1).in_gamma0_pm(11));
    }
}
