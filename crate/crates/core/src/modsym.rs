//! Modular symbols `[v, w]` on `P^1(Q)`: continued-fraction reduction to
//! unimodular symbols and their classes in the cuspidal homology.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix2::Mat2;
use crate::voronoi::{CellComplex, CuspidalHomology};

/// A cusp `p/q`; `q = 0` is `inf = (1:0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cusp {
    pub p: BigInt,
    pub q: BigInt,
}

impl Cusp {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Cusp> {
        let (p, q) = (p.into(), q.into());
        if p.is_zero() && q.is_zero() {
            return Err(Error::InvalidArgument("cusp (0, 0)".into()));
        }
        if q.is_zero() {
            return Ok(Cusp::infinity());
        }
        let g = p.gcd(&q);
        let s = if q.is_negative() { -g } else { g };
        Ok(Cusp { p: p / &s, q: q / &s })
    }

    pub fn infinity() -> Cusp {
        Cusp {
            p: BigInt::one(),
            q: BigInt::zero(),
        }
    }

    pub fn is_infinity(&self) -> bool {
        self.q.is_zero()
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            f.write_str("inf")
        } else if self.q.is_one() {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

/// `[g e, g f]` for `g` with determinant `+-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnimodularSymbol {
    pub g: Mat2,
}

impl UnimodularSymbol {
    pub fn new(g: Mat2) -> Result<Self> {
        if !g.is_unimodular() {
            return Err(Error::InvalidArgument(format!("{g} has determinant other than +-1")));
        }
        Ok(UnimodularSymbol { g })
    }

    pub fn endpoints(&self) -> (Cusp, Cusp) {
        let (a, c) = self.g.first_column();
        let (b, d) = self.g.second_column();
        (
            Cusp::new(a, c).expect("unimodular column"),
            Cusp::new(b, d).expect("unimodular column"),
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolChain {
    pub terms: Vec<(i64, UnimodularSymbol)>,
}

impl SymbolChain {
    /// Appends `other` negated and traversed backwards.
    fn extend_reversed(&mut self, other: SymbolChain) {
        self.terms
            .extend(other.terms.into_iter().rev().map(|(c, s)| (-c, s)));
    }
}

/// `[inf, x]` as the chain through the convergents of `x`.
fn path_from_infinity(x: &Cusp) -> SymbolChain {
    let mut chain = SymbolChain::default();
    if x.is_infinity() {
        return chain;
    }
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let (mut num, mut den) = (x.p.clone(), x.q.clone());
    while !den.is_zero() {
        let (a, r) = num.div_mod_floor(&den);
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        let g = Mat2::from_columns(p1.clone(), q1.clone(), p2.clone(), q2.clone());
        chain.terms.push((1, UnimodularSymbol { g }));
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        num = std::mem::replace(&mut den, r);
    }
    chain
}

/// `[v, w]` as a signed sum of unimodular symbols.
pub fn cusp_path_to_unimodular(v: &Cusp, w: &Cusp) -> SymbolChain {
    let mut chain = SymbolChain::default();
    if v == w {
        return chain;
    }
    if !v.is_infinity() {
        chain.extend_reversed(path_from_infinity(v));
    }
    chain.terms.extend(path_from_infinity(w).terms);
    chain
}

/// Signed orientable-edge coordinate of a unimodular symbol, `None` when
/// its edge orbit is unorientable.
pub fn edge_class(s: &UnimodularSymbol, complex: &CellComplex) -> Result<Option<(usize, i8)>> {
    complex.edge_coordinate(&s.g)
}

/// Chain in edge coordinates.
pub fn chain_edge_vector(chain: &SymbolChain, complex: &CellComplex) -> Result<Vec<BigInt>> {
    let mut v = vec![BigInt::zero(); complex.edge_dimension()];
    for (coef, s) in &chain.terms {
        if let Some((col, sign)) = edge_class(s, complex)? {
            v[col] += coef * sign as i64;
        }
    }
    Ok(v)
}

/// Class of the chain in the cycle basis of `H`; fails when the chain is
/// not a cycle.
pub fn symbol_class(chain: &SymbolChain, h: &CuspidalHomology) -> Result<Vec<BigInt>> {
    h.project(&chain_edge_vector(chain, &h.complex)?)
}

/// Edge vector of `[e, gamma e]`, which equals `[inf, A/C]`.
pub fn psi_edge_vector(gamma: &Mat2, complex: &CellComplex) -> Result<Vec<BigInt>> {
    let target = Cusp::new(gamma.a.clone(), gamma.c.clone())?;
    chain_edge_vector(&cusp_path_to_unimodular(&Cusp::infinity(), &target), complex)
}

/// `[e, gamma e]` in Smith coordinates of `H`.
pub fn psi_class(gamma: &Mat2, h: &CuspidalHomology) -> Result<Vec<BigInt>> {
    let n = h.level();
    if !h.flavor().contains(gamma, n) {
        return Err(Error::InvalidArgument(format!(
            "{gamma} is not in the group of level {n} ({})",
            h.flavor()
        )));
    }
    h.reduce(&psi_edge_vector(gamma, &h.complex)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voronoi::{cuspidal_homology, GammaFlavor};

    fn endpoints_telescope(chain: &SymbolChain, v: &Cusp, w: &Cusp) {
        let mut at = v.clone();
        for (coef, s) in &chain.terms {
            assert!(s.g.is_unimodular());
            let (a, b) = s.endpoints();
            let (from, to) = if *coef > 0 { (a, b) } else { (b, a) };
            assert_eq!(from, at);
            at = to;
        }
        assert_eq!(&at, w);
    }

    #[test]
    fn cusp_normalization() {
        let c = Cusp::new(-4, -6).unwrap();
        assert_eq!((c.p, c.q), (2.into(), 3.into()));
        assert!(Cusp::new(-5, 0).unwrap().is_infinity());
        assert!(Cusp::new(0, 0).is_err());
        assert_eq!(Cusp::new(3, -1).unwrap().to_string(), "-3");
    }

    #[test]
    fn infinity_to_zero_is_identity() {
        let c = cusp_path_to_unimodular(&Cusp::infinity(), &Cusp::new(0, 1).unwrap());
        assert_eq!(c.terms, vec![(1, UnimodularSymbol { g: Mat2::identity() })]);
        let v = Cusp::new(3, 7).unwrap();
        assert!(cusp_path_to_unimodular(&v, &v).terms.is_empty());
    }

    #[test]
    fn five_thirds() {
        let w = Cusp::new(5, 3).unwrap();
        let c = cusp_path_to_unimodular(&Cusp::infinity(), &w);
        let mats: Vec<Mat2> = c.terms.iter().map(|(_, s)| s.g.clone()).collect();
        assert_eq!(
            mats,
            vec![
                Mat2::from_columns(1, 0, 1, 1),
                Mat2::from_columns(1, 1, 2, 1),
                Mat2::from_columns(2, 1, 5, 3),
            ]
        );
        endpoints_telescope(&c, &Cusp::infinity(), &w);
    }

    #[test]
    fn paths_telescope() {
        let cusps = [(-7, 3), (0, 1), (1, 0), (13, -5), (22, 7), (-1, 1), (100, 37)];
        for &(a, b) in &cusps {
            for &(c, d) in &cusps {
                let v = Cusp::new(a, b).unwrap();
                let w = Cusp::new(c, d).unwrap();
                endpoints_telescope(&cusp_path_to_unimodular(&v, &w), &v, &w);
            }
        }
    }

    #[test]
    fn edge_class_examples() {
        let cx = CellComplex::new(11, GammaFlavor::Gamma0Pm);
        let s = |a, b, c, d| UnimodularSymbol::new(Mat2::new(a, b, c, d)).unwrap();
        assert_eq!(edge_class(&s(1, 0, 0, 1), &cx).unwrap(), Some((0, 1)));
        assert_eq!(edge_class(&s(1, 0, 1, 1), &cx).unwrap(), None);
        assert_eq!(edge_class(&s(0, 1, 1, 0), &cx).unwrap(), Some((0, -1)));
        assert!(UnimodularSymbol::new(Mat2::new(2, 0, 0, 1)).is_err());
    }

    #[test]
    fn triangular_elements_vanish() {
        let h = cuspidal_homology(11, GammaFlavor::Gamma0Pm).unwrap();
        for g in [
            Mat2::identity(),
            Mat2::new(1, 5, 0, 1),
            Mat2::new(-1, 3, 0, 1),
            Mat2::new(1, 0, 11, 1),
            Mat2::new(1, 0, -22, -1),
        ] {
            assert!(psi_class(&g, &h).unwrap().iter().all(Zero::is_zero), "{g}");
        }
        assert!(psi_class(&Mat2::new(1, 0, 1, 1), &h).is_err());
    }
}
