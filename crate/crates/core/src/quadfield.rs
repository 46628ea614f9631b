//! Real quadratic fields `E = Q(sqrt(D))` and their rings of integers.
//!
//! Elements of `O_E` are stored as `a + b*w` in the integral basis `{1, w}`,
//! with `w = sqrt(D)` when `D = 2, 3 (mod 4)` and `w = (1 + sqrt(D))/2` when
//! `D = 1 (mod 4)`. In both cases `w^2 = p*w + q` for small integers `p, q`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum OmegaKind {
    /// `w = sqrt(D)`.
    Sqrt,
    /// `w = (1 + sqrt(D)) / 2`.
    HalfInteger,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct QuadraticField {
    pub delta: u64,
    pub omega_kind: OmegaKind,
}

pub fn is_squarefree(n: u64) -> bool {
    let mut p = 2u64;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

pub fn make_field(delta: i64) -> Result<QuadraticField> {
    if delta < 2 {
        return Err(Error::InvalidArgument(format!(
            "discriminant parameter must be at least 2, got {delta}"
        )));
    }
    let d = delta as u64;
    if d.sqrt() * d.sqrt() == d {
        return Err(Error::InvalidArgument(format!("{delta} is a perfect square")));
    }
    if !is_squarefree(d) {
        return Err(Error::InvalidArgument(format!("{delta} is not squarefree")));
    }
    let omega_kind = if d % 4 == 1 {
        OmegaKind::HalfInteger
    } else {
        OmegaKind::Sqrt
    };
    Ok(QuadraticField {
        delta: d,
        omega_kind,
    })
}

impl QuadraticField {
    /// `(p, q)` with `w^2 = p*w + q`.
    pub fn omega_relation(&self) -> (i64, i64) {
        match self.omega_kind {
            OmegaKind::Sqrt => (0, self.delta as i64),
            OmegaKind::HalfInteger => (1, (self.delta as i64 - 1) / 4),
        }
    }

    pub fn element(&self, a: impl Into<BigInt>, b: impl Into<BigInt>) -> QuadElement {
        QuadElement {
            a: a.into(),
            b: b.into(),
            field: *self,
        }
    }

    pub fn one(&self) -> QuadElement {
        self.element(1, 0)
    }

    pub fn omega(&self) -> QuadElement {
        self.element(0, 1)
    }

    /// Squarefree `D` values in `lo..=hi`, the fields of a batch run.
    pub fn squarefree_range(lo: u64, hi: u64) -> Vec<u64> {
        (lo.max(2)..=hi).filter(|&d| is_squarefree(d)).collect()
    }
}

/// `a + b*w` in `O_E`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElement {
    pub a: BigInt,
    pub b: BigInt,
    pub field: QuadraticField,
}

impl QuadElement {
    pub fn mul(&self, o: &QuadElement) -> QuadElement {
        debug_assert_eq!(self.field, o.field);
        let (p, q) = self.field.omega_relation();
        let bd = &self.b * &o.b;
        QuadElement {
            a: &self.a * &o.a + &bd * q,
            b: &self.a * &o.b + &self.b * &o.a + &bd * p,
            field: self.field,
        }
    }

    pub fn add(&self, o: &QuadElement) -> QuadElement {
        QuadElement {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
            field: self.field,
        }
    }

    pub fn neg(&self) -> QuadElement {
        QuadElement {
            a: -&self.a,
            b: -&self.b,
            field: self.field,
        }
    }

    /// Galois conjugate; `w' = p - w`.
    pub fn conj(&self) -> QuadElement {
        let (p, _) = self.field.omega_relation();
        QuadElement {
            a: &self.a + &self.b * p,
            b: -&self.b,
            field: self.field,
        }
    }

    pub fn trace(&self) -> BigInt {
        let (p, _) = self.field.omega_relation();
        &self.a * 2 + &self.b * p
    }

    pub fn norm(&self) -> BigInt {
        let (p, q) = self.field.omega_relation();
        &self.a * &self.a + &self.a * &self.b * p - &self.b * &self.b * q
    }

    pub fn pow(&self, mut k: u64) -> QuadElement {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Coordinates `(e, f)` with `self = e + f*sqrt(D)`, each given as a
    /// numerator over 2 so that half-integers are representable.
    pub fn sqrt_coordinates_halves(&self) -> (BigInt, BigInt) {
        match self.field.omega_kind {
            OmegaKind::Sqrt => (&self.a * 2, &self.b * 2),
            OmegaKind::HalfInteger => (&self.a * 2 + &self.b, self.b.clone()),
        }
    }

    /// Approximate real value under the embedding with `sqrt(D) > 0`.
    pub fn to_f64(&self) -> f64 {
        let (e2, f2) = self.sqrt_coordinates_halves();
        let s = (self.field.delta as f64).sqrt();
        (e2.to_f64().unwrap_or(f64::NAN) + f2.to_f64().unwrap_or(f64::NAN) * s) / 2.0
    }
}

impl fmt::Display for QuadElement {
    /// Renders as `e + f*sqrt(D)`, with `(e + f*sqrt(D))/2` when the
    /// coordinates are half-integers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (e2, f2) = self.sqrt_coordinates_halves();
        let d = self.field.delta;
        if e2.is_even() && f2.is_even() {
            let (e, g): (BigInt, BigInt) = (e2 / 2, f2 / 2);
            write!(f, "{e} {} {}*sqrt({d})", if g.is_negative() { '-' } else { '+' }, g.abs())
        } else {
            write!(
                f,
                "({e2} {} {}*sqrt({d}))/2",
                if f2.is_negative() { '-' } else { '+' },
                f2.abs()
            )
        }
    }
}

/// A unit of `O_E` with its norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadUnit {
    pub value: QuadElement,
    pub norm: i8,
}

/// `(U + V*sqrt(D)) / W` with integer `U, V, W`, `W > 0`.
#[derive(Clone, Debug)]
struct Surd {
    u: BigInt,
    v: BigInt,
    w: BigInt,
}

impl Surd {
    fn mul(&self, o: &Surd, d: u64) -> Surd {
        let u = &self.u * &o.u + &self.v * &o.v * d;
        let v = &self.u * &o.v + &self.v * &o.u;
        let w = &self.w * &o.w;
        let g = u.gcd(&v).gcd(&w);
        Surd {
            u: u / &g,
            v: v / &g,
            w: w / &g,
        }
    }
}

/// Fundamental unit `eps > 1` of `O_E`.
///
/// Runs the continued fraction of `w` on complete quotients
/// `(P + sqrt(D))/Q` until a state repeats; the product of the complete
/// quotients over one period is the fundamental unit.
pub fn fundamental_unit(field: &QuadraticField) -> QuadUnit {
    let d = field.delta as i128;
    let s = (field.delta as u128).sqrt() as i128;
    let (mut pp, mut qq): (i128, i128) = match field.omega_kind {
        OmegaKind::Sqrt => (0, 1),
        OmegaKind::HalfInteger => (1, 2),
    };
    let mut seen: Vec<(i128, i128)> = Vec::new();
    let start = loop {
        if let Some(j) = seen.iter().position(|&st| st == (pp, qq)) {
            break j;
        }
        seen.push((pp, qq));
        let a = (pp + s).div_euclid(qq);
        let np = a * qq - pp;
        let nq = (d - np * np) / qq;
        pp = np;
        qq = nq;
    };
    let mut prod = Surd {
        u: BigInt::one(),
        v: BigInt::zero(),
        w: BigInt::one(),
    };
    for &(p, q) in &seen[start..] {
        let x = Surd {
            u: BigInt::from(p),
            v: BigInt::one(),
            w: BigInt::from(q),
        };
        prod = prod.mul(&x, field.delta);
    }
    let value = surd_to_element(&prod, field).expect("period product is an algebraic integer");
    let norm = if value.norm().is_positive() { 1 } else { -1 };
    debug_assert!(value.norm().magnitude().is_one());
    QuadUnit { value, norm }
}

fn surd_to_element(x: &Surd, field: &QuadraticField) -> Option<QuadElement> {
    // (U + V sqrt D)/W = a + b w.
    let two = BigInt::from(2);
    match field.omega_kind {
        OmegaKind::Sqrt => {
            if x.u.is_multiple_of(&x.w) && x.v.is_multiple_of(&x.w) {
                Some(field.element(&x.u / &x.w, &x.v / &x.w))
            } else {
                None
            }
        }
        OmegaKind::HalfInteger => {
            // a + b(1 + sqrt D)/2 = (2a + b)/2 + (b/2) sqrt D.
            let u2 = &x.u * &two;
            let v2 = &x.v * &two;
            if !u2.is_multiple_of(&x.w) || !v2.is_multiple_of(&x.w) {
                return None;
            }
            let b = &v2 / &x.w;
            let two_a_plus_b = &u2 / &x.w;
            let two_a = two_a_plus_b - &b;
            two_a
                .is_even()
                .then(|| field.element(two_a / 2, b))
        }
    }
}

/// `(t, n)` with `t = eps^k + eps'^k` and `n = N(eps)^k`.
pub fn unit_power_trace_norm(eps: &QuadUnit, k: u64) -> (BigInt, i8) {
    let t = eps.value.pow(k).trace();
    let n = if eps.norm < 0 && k % 2 == 1 { -1 } else { 1 };
    (t, n)
}

/// Residue of an element of `O_E` in `O_E / N O_E`, coordinates in
/// `[0, N)` with respect to `{1, w}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Residue {
    pub a: u64,
    pub b: u64,
    pub modulus: u64,
    pub field: QuadraticField,
}

pub fn reduce_unit_mod(x: &QuadElement, modulus: u64) -> Residue {
    let m = BigInt::from(modulus);
    let r = |v: &BigInt| v.mod_floor(&m).to_u64().expect("residue fits");
    Residue {
        a: r(&x.a),
        b: r(&x.b),
        modulus,
        field: x.field,
    }
}

impl Residue {
    pub fn one(field: QuadraticField, modulus: u64) -> Self {
        Residue {
            a: 1 % modulus,
            b: 0,
            modulus,
            field,
        }
    }

    pub fn mul(&self, o: &Residue) -> Residue {
        let m = self.modulus as u128;
        let (p, q) = self.field.omega_relation();
        let p = (p as u128) % m;
        let q = (q as u128) % m;
        let (a, b, c, d) = (self.a as u128, self.b as u128, o.a as u128, o.b as u128);
        let bd = b * d % m;
        Residue {
            a: ((a * c + bd * q) % m) as u64,
            b: ((a * d + b * c + bd * p) % m) as u64,
            modulus: self.modulus,
            field: self.field,
        }
    }

    /// Trace `2a + p*b` reduced mod `N`.
    pub fn trace(&self) -> u64 {
        let m = self.modulus as u128;
        let (p, _) = self.field.omega_relation();
        ((2 * self.a as u128 + (p as u128) * self.b as u128) % m) as u64
    }
}
