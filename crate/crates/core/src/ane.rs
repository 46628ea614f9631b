//! Unit residues: `U = (Z/N)^x` (or its quotient by `+-1`), the subgroup
//! `A` generated by roots of `f_eta` modulo `N` for units `eta` of `O_E`,
//! and the quotient `Q = U / A`.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::exactalg::{hnf, integer_kernel, quotient_structure, FgAbGroup, IntMatrix};
use crate::quadfield::{fundamental_unit, reduce_unit_mod, QuadraticField, Residue};
use crate::voronoi::GammaFlavor;

/// `(Z/N)^x` as a product of cyclic groups with explicit generators and
/// discrete logarithms.
#[derive(Clone, Debug)]
pub struct UnitGroup {
    pub modulus: u64,
    pub generators: Vec<u64>,
    pub orders: Vec<u64>,
    /// Exponent vector of each unit residue.
    dlog: HashMap<u64, Vec<u64>>,
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc = 1u128 % m128;
    let mut base = b as u128 % m128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    b = acc as u64;
    b
}

fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn primitive_root_prime_power(p: u64, e: u32) -> u64 {
    let pe = p.pow(e);
    let phi_p = p - 1;
    let primes: Vec<u64> = factor(phi_p).into_iter().map(|(q, _)| q).collect();
    let g = (2..p)
        .find(|&g| primes.iter().all(|&q| pow_mod(g, phi_p / q, p) != 1))
        .unwrap_or(1);
    if e >= 2 && pow_mod(g, p - 1, p * p) == 1 {
        (g + p) % pe
    } else {
        g % pe
    }
}

/// `x` with `x = r (mod m)` and `x = 1 (mod n / m)`.
fn crt_lift(r: u64, m: u64, n: u64) -> u64 {
    let other = n / m;
    if other == 1 {
        return r % n;
    }
    // x = 1 + other * k, need 1 + other*k = r (mod m).
    let inv = (other as i64).extended_gcd(&(m as i64)).x.rem_euclid(m as i64) as u64;
    let k = ((r + m - 1 % m) % m) as u128 * inv as u128 % m as u128;
    ((1 + other as u128 * k) % n as u128) as u64
}

impl UnitGroup {
    pub fn new(n: u64) -> Self {
        let mut generators = Vec::new();
        let mut orders = Vec::new();
        for (p, e) in factor(n) {
            let pe = p.pow(e);
            let local: Vec<(u64, u64)> = if p == 2 {
                match e {
                    1 => vec![],
                    2 => vec![(3, 2)],
                    _ => vec![(pe - 1, 2), (5, pe / 4)],
                }
            } else {
                vec![(primitive_root_prime_power(p, e), pe / p * (p - 1))]
            };
            for (g, ord) in local {
                generators.push(crt_lift(g, pe, n));
                orders.push(ord);
            }
        }
        let mut dlog = HashMap::new();
        let mut exps = vec![0u64; generators.len()];
        loop {
            let mut x = 1 % n.max(1);
            for (g, &k) in generators.iter().zip(&exps) {
                x = (x as u128 * pow_mod(*g, k, n) as u128 % n as u128) as u64;
            }
            dlog.insert(x, exps.clone());
            let mut i = 0;
            while i < exps.len() {
                exps[i] += 1;
                if exps[i] < orders[i] {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
            if i == exps.len() {
                break;
            }
        }
        UnitGroup {
            modulus: n,
            generators,
            orders,
            dlog,
        }
    }

    pub fn dlog(&self, a: u64) -> Option<&[u64]> {
        self.dlog.get(&(a % self.modulus.max(1))).map(Vec::as_slice)
    }

    fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Relation rows `diag(orders)`, plus `log(-1)` when working mod `+-1`.
    fn relations(&self, mod_pm: bool) -> Vec<Vec<BigInt>> {
        let m = self.rank();
        let mut rows: Vec<Vec<BigInt>> = (0..m)
            .map(|i| {
                let mut r = vec![BigInt::from(0); m];
                r[i] = self.orders[i].into();
                r
            })
            .collect();
        if mod_pm && self.modulus > 1 {
            rows.push(self.log_row(self.modulus - 1));
        }
        rows
    }

    fn log_row(&self, a: u64) -> Vec<BigInt> {
        self.dlog(a)
            .expect("unit residue")
            .iter()
            .map(|&x| BigInt::from(x))
            .collect()
    }

    pub fn structure(&self, mod_pm: bool) -> FgAbGroup {
        let m = self.rank();
        quotient_structure(m, &IntMatrix::from_rows(m, &self.relations(mod_pm)))
    }

    /// Structure of the subgroup generated by `elems` in `U` (mod `+-1`
    /// when `mod_pm`) and of the quotient by it.
    pub fn subgroup_and_quotient(&self, elems: &[u64], mod_pm: bool) -> (FgAbGroup, FgAbGroup) {
        let m = self.rank();
        let rels = self.relations(mod_pm);
        let gens: Vec<Vec<BigInt>> = elems.iter().map(|&a| self.log_row(a)).collect();
        let mut all = rels.clone();
        all.extend(gens.iter().cloned());
        let q = quotient_structure(m, &IntMatrix::from_rows(m, &all));
        if m == 0 || gens.is_empty() {
            return (FgAbGroup::trivial(), q);
        }
        // Replace the generators by a row basis of their span, then A is
        // Z^r modulo the vectors x with x * G in the relation lattice.
        let (h, _) = hnf(&IntMatrix::from_rows(m, &gens));
        let basis: Vec<Vec<BigInt>> = h
            .to_rows()
            .into_iter()
            .filter(|r| r.iter().any(|x| *x != BigInt::from(0)))
            .collect();
        let r = basis.len();
        let mut stacked = basis.clone();
        stacked.extend(rels);
        let ker = integer_kernel(&IntMatrix::from_rows(m, &stacked).transpose());
        let rows: Vec<Vec<BigInt>> = ker
            .basis
            .to_rows()
            .into_iter()
            .map(|v| v[..r].to_vec())
            .collect();
        let a = quotient_structure(r, &IntMatrix::from_rows(r, &rows));
        (a, q)
    }
}

pub fn unit_group_structure(n: u64, mod_pm: bool) -> (FgAbGroup, Vec<u64>) {
    let u = UnitGroup::new(n);
    (u.structure(mod_pm), u.generators)
}

/// `(trace mod N, norm)` of `eps^k` for `k = 0, 1, ...` until the residue
/// of `eps^k` in `O_E / N` repeats.
pub fn unit_residue_orbit(field: &QuadraticField, n: u64) -> Vec<(u64, i8)> {
    let eps = fundamental_unit(field);
    let step = reduce_unit_mod(&eps.value, n);
    let start = Residue::one(*field, n);
    let mut x = start;
    let mut out = Vec::new();
    let mut norm = 1i8;
    loop {
        out.push((x.trace(), norm));
        x = x.mul(&step);
        norm *= eps.norm;
        // eps is invertible mod N, so the orbit is purely periodic.
        if x == start && norm == 1 {
            break;
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct AneReport {
    #[serde(rename = "N")]
    pub level: u64,
    pub delta: u64,
    pub flavor: GammaFlavor,
    #[serde(rename = "U")]
    pub u: FgAbGroup,
    #[serde(rename = "A")]
    pub a: FgAbGroup,
    #[serde(rename = "Q")]
    pub q: FgAbGroup,
    #[serde(rename = "roots")]
    pub root_residues: Vec<u64>,
}

/// Roots of `x^2 - t x + n` modulo `N` over the `(t, n)` pairs, with `t`
/// taken up to sign.
fn root_residues(n: u64, pairs: &BTreeSet<(u64, i8)>) -> Vec<u64> {
    if n == 1 {
        return vec![0];
    }
    let units: Vec<u64> = (1..n).filter(|a| a.gcd(&n) == 1).collect();
    let mut roots = BTreeSet::new();
    for &a in &units {
        let a2 = (a as u128 * a as u128 % n as u128) as u64;
        for &(t, norm) in pairs {
            let nr = (norm as i64).rem_euclid(n as i64) as u64;
            // a^2 - t a + n = 0.
            let ta = (t as u128 * a as u128 % n as u128) as u64;
            if (a2 + n - ta + nr) % n == 0 {
                roots.insert(a);
                break;
            }
        }
    }
    roots.into_iter().collect()
}

pub fn compute_ane(field: &QuadraticField, n: u64, flavor: GammaFlavor) -> AneReport {
    let mod_pm = flavor == GammaFlavor::Gamma0Pm;
    let mut pairs = BTreeSet::new();
    for (t, norm) in unit_residue_orbit(field, n) {
        if flavor == GammaFlavor::Gamma0 && norm != 1 {
            continue;
        }
        pairs.insert((t, norm));
        pairs.insert(((n - t) % n, norm));
    }
    let roots = root_residues(n, &pairs);
    let group = UnitGroup::new(n);
    let u = group.structure(mod_pm);
    let (a, q) = group.subgroup_and_quotient(&roots, mod_pm);
    AneReport {
        level: n,
        delta: field.delta,
        flavor,
        u,
        a,
        q,
        root_residues: roots,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::make_field;
    use crate::unital::root_test;
    use std::collections::HashSet;

    fn order_profile(elems: &[u64], n: u64, mod_pm: bool) -> Vec<u64> {
        // Order of each element of a subgroup (as a set of residues).
        let one_class = |x: u64| x == 1 % n || (mod_pm && x == n - 1);
        let mut out: Vec<u64> = elems
            .iter()
            .map(|&x| {
                let mut y = x;
                let mut k = 1;
                while !one_class(y) {
                    y = (y as u128 * x as u128 % n as u128) as u64;
                    k += 1;
                }
                k
            })
            .collect();
        out.sort_unstable();
        out
    }

    fn group_profile(g: &FgAbGroup) -> Vec<u64> {
        // Element orders of a finite abelian group from its invariants.
        let inv: Vec<u64> = g.invariant_factors.iter().map(|x| x.try_into().unwrap()).collect();
        let mut orders = vec![1u64];
        for d in inv {
            let mut next = Vec::new();
            for &o in &orders {
                for k in 0..d {
                    let ok = d / k.gcd(&d);
                    next.push(o.lcm(&ok));
                }
            }
            orders = next;
        }
        orders.sort_unstable();
        orders
    }

    /// Subgroup generated by `gens` by closure, as residues (canonical
    /// representative `min(x, n-x)` when `mod_pm`).
    fn brute_subgroup(gens: &[u64], n: u64, mod_pm: bool) -> Vec<u64> {
        let canon = |x: u64| if mod_pm { x.min(n - x) } else { x };
        let mut seen: HashSet<u64> = HashSet::from([canon(1 % n)]);
        let mut frontier = vec![1 % n];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = canon((x as u128 * g as u128 % n as u128) as u64);
                if seen.insert(y) {
                    frontier.push(y);
                }
            }
        }
        let mut v: Vec<u64> = seen.into_iter().collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn unit_group_examples() {
        assert_eq!(unit_group_structure(7, false).0.to_string(), "C6");
        assert_eq!(unit_group_structure(15, false).0.to_string(), "C2 x C4");
        assert_eq!(unit_group_structure(65, true).0.to_string(), "C2 x C12");
        assert!(unit_group_structure(1, false).0.is_trivial());
        assert!(unit_group_structure(2, true).0.is_trivial());
    }

    #[test]
    fn unit_groups_match_brute_force() {
        for n in 2..=100u64 {
            for mod_pm in [false, true] {
                let units: Vec<u64> = (1..n).filter(|a| a.gcd(&n) == 1).collect();
                let elems = brute_subgroup(&units, n, mod_pm);
                let g = UnitGroup::new(n).structure(mod_pm);
                assert_eq!(group_profile(&g), order_profile(&elems, n, mod_pm), "N = {n}");
            }
        }
    }

    #[test]
    fn subgroups_match_brute_force() {
        let mut state = 12345u64;
        let mut rand = |m: u64| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) % m
        };
        for n in 3..=100u64 {
            let units: Vec<u64> = (1..n).filter(|a| a.gcd(&n) == 1).collect();
            for _ in 0..3 {
                let k = 1 + rand(3) as usize;
                let gens: Vec<u64> = (0..k).map(|_| units[rand(units.len() as u64) as usize]).collect();
                for mod_pm in [false, true] {
                    let ug = UnitGroup::new(n);
                    let (a, q) = ug.subgroup_and_quotient(&gens, mod_pm);
                    let elems = brute_subgroup(&gens, n, mod_pm);
                    assert_eq!(group_profile(&a), order_profile(&elems, n, mod_pm), "N = {n} {gens:?}");
                    let u = ug.structure(mod_pm);
                    assert_eq!(u.order(), Some(a.order().unwrap() * q.order().unwrap()));
                }
            }
        }
    }

    #[test]
    fn orbit_examples() {
        let f = make_field(2).unwrap();
        let orbit = unit_residue_orbit(&f, 7);
        assert_eq!(orbit[0], (2, 1));
        // eps = 1 + sqrt 2 has trace 2 and norm -1.
        assert_eq!(orbit[1], (2, -1));
        // The period divides |(O_E/7)^x| = 36 when 7 splits.
        assert_eq!(36 % orbit.len(), 0);
    }

    #[test]
    fn ane_examples() {
        let r = compute_ane(&make_field(2).unwrap(), 7, GammaFlavor::Gamma0Pm);
        assert_eq!((r.a.to_string(), r.q.to_string()), ("C3".into(), "C1".into()));
        let r = compute_ane(&make_field(10).unwrap(), 13, GammaFlavor::Gamma0Pm);
        assert_eq!((r.u.to_string(), r.a.to_string(), r.q.to_string()), ("C6".into(), "C3".into(), "C2".into()));
        let r = compute_ane(&make_field(10).unwrap(), 13, GammaFlavor::Gamma0);
        assert_eq!((r.u.to_string(), r.a.to_string(), r.q.to_string()), ("C12".into(), "C6".into(), "C2".into()));
        let r = compute_ane(&make_field(2).unwrap(), 17, GammaFlavor::Gamma0Pm);
        assert_eq!((r.a.to_string(), r.q.to_string()), ("C8".into(), "C1".into()));
        let r = compute_ane(&make_field(11).unwrap(), 19, GammaFlavor::Gamma0Pm);
        assert_eq!((r.a.to_string(), r.q.to_string()), ("C3".into(), "C3".into()));
        let r = compute_ane(&make_field(5).unwrap(), 1, GammaFlavor::Gamma0Pm);
        assert!(r.u.is_trivial() && r.a.is_trivial() && r.q.is_trivial());
    }

    #[test]
    fn roots_pair_up_and_pass_root_test() {
        for delta in [2u64, 3, 5, 6, 7, 10] {
            let f = make_field(delta as i64).unwrap();
            for n in [7u64, 11, 13, 15, 20] {
                for flavor in [GammaFlavor::Gamma0Pm, GammaFlavor::Gamma0] {
                    let r = compute_ane(&f, n, flavor);
                    let orbit = unit_residue_orbit(&f, n);
                    let set: BTreeSet<u64> = r.root_residues.iter().copied().collect();
                    for &a in &r.root_residues {
                        let inv = (a as i64).extended_gcd(&(n as i64)).x.rem_euclid(n as i64) as u64;
                        let found = orbit.iter().any(|&(t, norm)| {
                            if flavor == GammaFlavor::Gamma0 && norm != 1 {
                                return false;
                            }
                            let pair = if norm == 1 { inv } else { (n - inv) % n };
                            set.contains(&pair)
                                && (root_test(a, &t.into(), norm, n).unwrap()
                                    || root_test(a, &BigInt::from(n - t), norm, n).unwrap())
                        });
                        assert!(found, "Δ={delta} N={n} a={a}");
                    }
                }
            }
        }
    }

    #[test]
    fn starred_group_has_index_at_most_two() {
        for delta in [2u64, 3, 5, 7, 10, 13] {
            let f = make_field(delta as i64).unwrap();
            for n in 3..=40u64 {
                let pm = compute_ane(&f, n, GammaFlavor::Gamma0Pm);
                let sl = compute_ane(&f, n, GammaFlavor::Gamma0);
                let ug = UnitGroup::new(n);
                let (image, _) = ug.subgroup_and_quotient(&sl.root_residues, true);
                let idx = pm.a.order().unwrap() / image.order().unwrap();
                assert!(idx == 1.into() || idx == 2.into(), "Δ={delta} N={n}");
            }
        }
    }
}
