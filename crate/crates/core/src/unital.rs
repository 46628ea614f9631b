//! Unital matrices of `Gamma_0(N)` built from powers of the fundamental
//! unit: `gamma = [[A, B], [cN, t - A]]` with characteristic polynomial
//! `x^2 - t x + n`.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix2::Mat2;
use crate::quadfield::{fundamental_unit, reduce_unit_mod, unit_power_trace_norm, QuadUnit, QuadraticField, Residue};
use crate::voronoi::GammaFlavor;

/// Whether `a` is a root of `x^2 - t x + n` modulo `m`, that is
/// `a + n a^-1 = t (mod m)`.
pub fn root_test(a: u64, t: &BigInt, n: i8, m: u64) -> Result<bool> {
    if a.gcd(&m) != 1 && m != 1 {
        return Err(Error::InvalidArgument(format!("{a} is not a unit modulo {m}")));
    }
    let mb = BigInt::from(m);
    let a = BigInt::from(a);
    Ok((&a * (t - &a) - n).mod_floor(&mb).is_zero())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitalCandidate {
    pub gamma: Mat2,
    /// `gamma` has the characteristic polynomial of `+-eps^k`.
    pub k: u32,
    #[serde(serialize_with = "ser_big")]
    pub t: BigInt,
    pub n: i8,
    /// Lower-left entry is `c * N`.
    pub c: u64,
    /// Upper-left entry, in `[0, cN)`.
    pub a: u64,
}

fn ser_big<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(x)
}

/// Stream of unital candidates.
///
/// Pairs `(i, c)` of a productive power index and a multiplier run in square
/// shells: shell `s` first pairs the earlier powers with `c = s`, then the
/// `s`-th power with `c <= s`. Within a pair come `eps^k` then `-eps^k`, and
/// residues `A` ascending.
pub struct UnitalStream {
    level: u64,
    flavor: GammaFlavor,
    eps: QuadUnit,
    k_max: u32,
    c_max: u64,
    /// Last exponent examined.
    k: u32,
    /// `(k, trace, norm)` of the powers so far whose trace has a root
    /// modulo `N`.
    powers: Vec<(u32, BigInt, i8)>,
    /// `eps` and `eps^k` modulo `N`, to skip unproductive powers cheaply.
    eps_mod: Residue,
    power_mod: Residue,
    shell: u64,
    /// Queue of `(power index, c)` pairs left in the current shell.
    pairs: VecDeque<(usize, u64)>,
    buffer: VecDeque<UnitalCandidate>,
}

impl UnitalStream {
    /// Advance to the next productive power, if any remain in the budget.
    fn next_power(&mut self) -> bool {
        if self.powers.len() >= self.k_max as usize {
            return false;
        }
        loop {
            self.k += 1;
            self.power_mod = self.power_mod.mul(&self.eps_mod);
            let n: i8 = if self.eps.norm < 0 && self.k % 2 == 1 { -1 } else { 1 };
            if self.flavor == GammaFlavor::Gamma0 && n != 1 {
                continue;
            }
            let tm = self.power_mod.trace();
            let neg = (self.level - tm) % self.level;
            if has_root(tm, n, self.level) || has_root(neg, n, self.level) {
                let (t, n) = unit_power_trace_norm(&self.eps, self.k as u64);
                self.powers.push((self.k, t, n));
                return true;
            }
        }
    }

    fn next_shell(&mut self) -> bool {
        let last = self.c_max.max(self.k_max as u64);
        while self.pairs.is_empty() {
            if self.shell >= last {
                return false;
            }
            self.shell += 1;
            let s = self.shell;
            if s <= self.c_max {
                self.pairs.extend((0..self.powers.len()).map(|i| (i, s)));
            }
            if s <= self.k_max as u64 && self.next_power() {
                let i = self.powers.len() - 1;
                self.pairs.extend((1..=s.min(self.c_max)).map(|c| (i, c)));
            }
        }
        true
    }

    fn fill(&mut self) {
        while self.buffer.is_empty() {
            let Some((i, c)) = self.pairs.pop_front() else {
                if !self.next_shell() {
                    return;
                }
                continue;
            };
            let (k, t, n) = self.powers[i].clone();
            self.emit(k, &t, n, c);
            self.emit(k, &-t, n, c);
        }
    }

    fn emit(&mut self, k: u32, t: &BigInt, n: i8, c: u64) {
        let level = self.level;
        let m = c * level;
        let mb = BigInt::from(m);
        let m128 = m as u128;
        let tr = t.mod_floor(&mb).to_u64().expect("residue fits") as u128;
        let nr = (n as i64).rem_euclid(m as i64) as u128;
        let is_root = |a: u128, modulus: u128| {
            a * ((tr % modulus + modulus - a % modulus) % modulus) % modulus == nr % modulus
        };
        // Roots mod cN reduce to roots mod N.
        let base: Vec<u64> = (0..level).filter(|&r| is_root(r as u128, level as u128)).collect();
        let mut roots: Vec<u64> = base
            .iter()
            .flat_map(|&r| (0..c).map(move |j| r + j * level))
            .filter(|&a| is_root(a as u128, m128))
            .collect();
        roots.sort_unstable();
        for a in roots {
            let ab = BigInt::from(a);
            let d = t - &ab;
            let b = (&ab * &d - n) / &mb;
            let gamma = Mat2::new(ab, b, mb.clone(), d);
            debug_assert!(gamma.det() == BigInt::from(n));
            self.buffer.push_back(UnitalCandidate {
                gamma,
                k,
                t: t.clone(),
                n,
                c,
                a,
            });
        }
    }
}

/// Whether `x^2 - t x + n` has a root modulo `m`, for `t` in `[0, m)`.
fn has_root(t: u64, n: i8, m: u64) -> bool {
    let (t, m) = (t as u128, m as u128);
    let n = (n as i64).rem_euclid(m as i64) as u128;
    (0..m).any(|a| a * ((t + m - a) % m) % m == n)
}

impl Iterator for UnitalStream {
    type Item = UnitalCandidate;
    fn next(&mut self) -> Option<UnitalCandidate> {
        self.fill();
        self.buffer.pop_front()
    }
}

/// All unital candidates for `c <= c_max` from the first `k_max` powers of
/// `eps` whose trace has a root modulo `N`, in the order of
/// [`UnitalStream`].
///
/// Both `eps^k` and `-eps^k` are used; `Gamma_0(N)` keeps only norm one.
/// Powers without a root modulo `N` yield no matrix for any `c`, and such
/// powers can make up all of the first few dozen exponents at levels with
/// several inert primes. Some power is always productive since `eps` has
/// finite order modulo `N`.
pub fn unital_candidates(
    n: u64,
    field: &QuadraticField,
    flavor: GammaFlavor,
    k_max: u32,
    c_max: u64,
) -> UnitalStream {
    let eps = fundamental_unit(field);
    let eps_mod = reduce_unit_mod(&eps.value, n);
    UnitalStream {
        level: n,
        flavor,
        power_mod: Residue::one(*field, n),
        eps_mod,
        eps,
        k_max,
        c_max,
        k: 0,
        powers: Vec::new(),
        shell: 0,
        pairs: VecDeque::new(),
        buffer: VecDeque::new(),
    }
}

/// `(p + f sqrt(r)) / q` with `q > 0` and `r` not a perfect square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadSurd {
    pub p: BigInt,
    pub f: BigInt,
    pub r: BigInt,
    pub q: BigInt,
}

impl QuadSurd {
    /// Whether `C x^2 + (D - A) x - B = 0`, the fixed-point equation of `g`.
    pub fn is_fixed_by(&self, g: &Mat2) -> bool {
        // Multiply through by q^2 and split rational and irrational parts.
        let f2r = &self.f * &self.f * &self.r;
        let dma = &g.d - &g.a;
        let rational = &g.c * (&self.p * &self.p + &f2r) + &dma * &self.p * &self.q - &g.b * &self.q * &self.q;
        let irrational: BigInt = &g.c * &self.p * 2u32 + &dma * &self.q;
        rational.is_zero() && irrational.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let x = |v: &BigInt| v.to_f64().unwrap_or(f64::NAN);
        (x(&self.p) + x(&self.f) * x(&self.r).sqrt()) / x(&self.q)
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.f.is_negative() { '-' } else { '+' };
        let coef = self.f.abs();
        let rad = if coef.is_one() {
            format!("sqrt({})", self.r)
        } else {
            format!("{coef}*sqrt({})", self.r)
        };
        if self.q.is_one() {
            write!(f, "{} {sign} {rad}", self.p)
        } else {
            write!(f, "({} {sign} {rad})/{}", self.p, self.q)
        }
    }
}

/// Largest `s` with `s^2 | x` among `x = s^2 d`, `d <= 1000`; otherwise 1.
fn split_square(x: &BigInt) -> (BigInt, BigInt) {
    for d in 1u32..=1000 {
        let db = BigInt::from(d);
        if !x.is_multiple_of(&db) {
            continue;
        }
        let m = x / &db;
        let s = m.sqrt();
        if &s * &s == m {
            return (s, db);
        }
    }
    (BigInt::one(), x.clone())
}

/// The fixed point `beta = ((A - D) + sqrt(t^2 - 4n)) / 2C` of `gamma`
/// acting on `P^1`, the one attached to the eigenvalue `(t + sqrt)/2`.
pub fn fixed_point_beta(gamma: &Mat2) -> Result<QuadSurd> {
    if gamma.is_scalar() {
        return Err(Error::InvalidArgument(format!("{gamma} is scalar")));
    }
    let t = gamma.trace();
    let disc: BigInt = &t * &t - gamma.det() * 4u32;
    if disc.is_negative() {
        return Err(Error::InvalidArgument(format!("{gamma} has complex fixed points")));
    }
    let (s, r) = split_square(&disc);
    if r.is_one() {
        return Err(Error::InvalidArgument(format!("{gamma} has rational fixed points")));
    }
    let (mut p, mut f, mut q) = (&gamma.a - &gamma.d, s, &gamma.c * 2u32);
    if q.is_negative() {
        // Keep the same root: (p + f sqrt r)/q with q < 0 equals
        // (-p - f sqrt r)/(-q).
        p = -p;
        f = -f;
        q = -q;
    }
    let g = p.gcd(&f).gcd(&q);
    Ok(QuadSurd {
        p: p / &g,
        f: f / &g,
        r,
        q: q / &g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::make_field;

    #[test]
    fn root_test_examples() {
        assert!(root_test(1, &2.into(), 1, 17).unwrap());
        assert!(root_test(9, &3.into(), 1, 11).unwrap());
        assert!(!root_test(2, &2.into(), 1, 5).unwrap());
        assert!(root_test(3, &2.into(), 1, 6).is_err());
    }

    #[test]
    fn level_11_disc_5_square() {
        let f = make_field(5).unwrap();
        let got: Vec<Mat2> = unital_candidates(11, &f, GammaFlavor::Gamma0, 2, 1)
            .filter(|c| c.k == 2 && c.t == BigInt::from(3))
            .map(|c| c.gamma)
            .collect();
        assert_eq!(got, vec![Mat2::new(5, -1, 11, -2), Mat2::new(9, -5, 11, -6)]);
        for g in &got {
            assert_eq!(g.det(), BigInt::one());
            assert_eq!(g.trace(), BigInt::from(3));
        }
    }

    #[test]
    fn candidates_have_the_right_char_poly() {
        for delta in [2, 3, 5, 7, 10, 13] {
            let f = make_field(delta).unwrap();
            let eps = fundamental_unit(&f);
            for flavor in [GammaFlavor::Gamma0Pm, GammaFlavor::Gamma0] {
                for c in unital_candidates(15, &f, flavor, 6, 3) {
                    let (t, n) = unit_power_trace_norm(&eps, c.k as u64);
                    assert!(c.t == t || c.t == -t);
                    assert_eq!(c.n, n);
                    assert_eq!(c.gamma.trace(), c.t);
                    assert_eq!(c.gamma.det(), BigInt::from(c.n));
                    assert!(flavor.contains(&c.gamma, 15));
                    assert_eq!(c.gamma.c, BigInt::from(15 * c.c));
                    let beta = fixed_point_beta(&c.gamma).unwrap();
                    assert!(beta.is_fixed_by(&c.gamma));
                }
            }
        }
    }

    #[test]
    fn trivial_trace_gives_unipotent() {
        // eps^k = 1 mod 7 for a suitable k; t = 2 forces A = 1 at prime level.
        let f = make_field(2).unwrap();
        let eps = fundamental_unit(&f);
        for k in 1..=20u32 {
            let (t, n) = unit_power_trace_norm(&eps, k as u64);
            if n == 1 && t.mod_floor(&BigInt::from(7)) == BigInt::from(2) {
                let roots: Vec<u64> = (1..7).filter(|&a| root_test(a, &t, 1, 7).unwrap()).collect();
                assert_eq!(roots, vec![1]);
                return;
            }
        }
        panic!("no power of eps is trivial mod 7");
    }

    #[test]
    fn level_7_disc_3_residues() {
        let f = make_field(3).unwrap();
        for c in unital_candidates(7, &f, GammaFlavor::Gamma0Pm, 24, 1) {
            assert!(c.a % 7 == 1 || c.a % 7 == 6, "A = {}", c.a);
        }
    }

    #[test]
    fn beta_examples() {
        let b = fixed_point_beta(&Mat2::new(9, -5, 11, -6)).unwrap();
        assert_eq!(
            b,
            QuadSurd {
                p: 15.into(),
                f: 1.into(),
                r: 5.into(),
                q: 22.into()
            }
        );
        assert_eq!(b.to_string(), "(15 + sqrt(5))/22");
        assert!(b.is_fixed_by(&Mat2::new(9, -5, 11, -6)));
        assert!(fixed_point_beta(&Mat2::new(0, -1, 1, 0)).is_err());
        assert!(fixed_point_beta(&Mat2::new(1, 1, 0, 1)).is_err());
        assert!(fixed_point_beta(&Mat2::identity()).is_err());
        let b = fixed_point_beta(&Mat2::new(1, 1, 1, 2)).unwrap();
        let x = b.to_f64();
        assert!(((x + 1.0) / (x + 2.0) - x).abs() < 1e-12);
    }
}
