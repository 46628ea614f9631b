//! The projective line `P^1(Z/N)`, identified with the coset space
//! `Gamma_0(N)^+- \ GL_2(Z)` through the bottom row of a matrix.
//!
//! Each class `(c:d)` is represented by the lexicographically least pair
//! `(c, d)` with `0 <= c, d < N` among its unit multiples. Points are listed
//! in lexicographic order of their representatives.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::matrix2::Mat2;

/// Canonical point of `P^1(Z/N)` with its position in [`P1List`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct P1Point {
    pub c: u64,
    pub d: u64,
    pub index: usize,
}

/// Above this level the dense residue table is replaced by a hash map.
const DENSE_LOOKUP_MAX: u64 = 4096;

#[derive(Clone, Debug)]
pub struct P1List {
    n: u64,
    points: Vec<(u64, u64)>,
    /// `dense[c * n + d]` is the index of the class of `(c, d)`, or
    /// `u32::MAX` when `gcd(c, d, n) != 1`.
    dense: Vec<u32>,
    by_pair: HashMap<(u64, u64), usize>,
}

fn gcd3(c: u64, d: u64, n: u64) -> u64 {
    c.gcd(&d).gcd(&n)
}

fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i64).extended_gcd(&(m as i64));
    (e.gcd == 1).then(|| e.x.rem_euclid(m as i64) as u64)
}

/// Canonical representative of the class of `(c, d)`, inputs already
/// reduced into `[0, n)` and primitive mod `n`.
fn canonical_pair(c: u64, d: u64, n: u64) -> (u64, u64) {
    if n == 1 {
        return (0, 0);
    }
    let g = c.gcd(&n);
    if g == n {
        // c = 0, so d is a unit and scales to 1.
        return (0, 1);
    }
    // Units u with u*c = g (mod n) are exactly u = u0 (mod n/g).
    let m = n / g;
    let c1 = (c / g) % m;
    let u0 = inverse_mod(c1, m).expect("c/g is a unit mod n/g");
    let mut best = u64::MAX;
    let mut u = u0 % m;
    while u < n {
        if u.gcd(&n) == 1 {
            best = best.min((u as u128 * d as u128 % n as u128) as u64);
        }
        u += m;
    }
    (g, best)
}

impl P1List {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1, "level must be positive");
        let mut points = Vec::new();
        if n == 1 {
            points.push((0, 0));
        } else {
            points.push((0, 1));
            for g in (1..n).filter(|g| n % g == 0) {
                for d in 0..n {
                    if gcd3(g, d, n) == 1 && canonical_pair(g, d, n) == (g, d) {
                        points.push((g, d));
                    }
                }
            }
        }
        points.sort_unstable();
        let by_pair: HashMap<(u64, u64), usize> =
            points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut dense = Vec::new();
        if n <= DENSE_LOOKUP_MAX {
            dense = vec![u32::MAX; (n * n) as usize];
            let units: Vec<u64> = (0..n).filter(|u| u.gcd(&n) == 1).collect();
            let units = if n == 1 { vec![0] } else { units };
            for (i, &(c, d)) in points.iter().enumerate() {
                for &u in &units {
                    let key = ((u * c) % n) * n + (u * d) % n;
                    dense[key as usize] = i as u32;
                }
            }
        }
        P1List {
            n,
            points,
            dense,
            by_pair,
        }
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, index: usize) -> P1Point {
        let (c, d) = self.points[index];
        P1Point { c, d, index }
    }

    pub fn points(&self) -> impl Iterator<Item = P1Point> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Index of the class of `(c, d)` for residues already in `[0, n)`.
    pub fn index_of_reduced(&self, c: u64, d: u64) -> Option<usize> {
        if !self.dense.is_empty() {
            let i = self.dense[(c * self.n + d) as usize];
            return (i != u32::MAX).then_some(i as usize);
        }
        if gcd3(c, d, self.n) != 1 {
            return None;
        }
        self.by_pair.get(&canonical_pair(c, d, self.n)).copied()
    }

    /// Canonical point of the class of `(c : d)` for arbitrary integers.
    pub fn normalize(&self, c: &BigInt, d: &BigInt) -> Result<P1Point> {
        let nb = BigInt::from(self.n);
        let red = |x: &BigInt| x.mod_floor(&nb).to_u64().expect("residue fits");
        let (rc, rd) = (red(c), red(d));
        self.index_of_reduced(rc, rd)
            .map(|i| self.point(i))
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "({c}, {d}) is not primitive modulo {}",
                    self.n
                ))
            })
    }

    /// Right action of a matrix on a point: `(c, d) * g`, normalised.
    pub fn act(&self, p: P1Point, g: &Mat2) -> P1Point {
        self.point(self.act_reduced(p.index, &g.reduce_mod(self.n)))
    }

    /// Right action with the matrix already reduced mod `n`.
    pub fn act_reduced(&self, index: usize, g: &[u64; 4]) -> usize {
        let n = self.n as u128;
        let (c, d) = self.points[index];
        let (c, d) = (c as u128, d as u128);
        let nc = (c * g[0] as u128 + d * g[2] as u128) % n;
        let nd = (c * g[1] as u128 + d * g[3] as u128) % n;
        self.index_of_reduced(nc as u64, nd as u64)
            .expect("unimodular action preserves primitivity")
    }
}

/// `N * prod_{p | N} (1 + 1/p)`, the number of points of `P^1(Z/N)`.
pub fn p1_size(n: u64) -> u64 {
    let mut size = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            size = size / p * (p + 1);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        size = size / m * (m + 1);
    }
    size
}

pub fn p1_list(n: u64) -> Vec<P1Point> {
    P1List::new(n).points().collect()
}

pub fn p1_normalize(c: i64, d: i64, n: u64) -> Result<P1Point> {
    P1List::new(n).normalize(&BigInt::from(c), &BigInt::from(d))
}

pub fn p1_act(list: &P1List, p: P1Point, g: &Mat2) -> P1Point {
    list.act(p, g)
}
