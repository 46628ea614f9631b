//! The Voronoi cell complex of `GL_2(Z)` modulo `Gamma_0(N)^+-` or
//! `Gamma_0(N)`, and the cuspidal homology computed from it.
//!
//! `GL_2(Z)` tessellates the upper half plane with the ideal triangle
//! `{inf, 0, 1}`. Its edges and vertices form single orbits, so `Gamma`-orbits
//! of `i`-cells are the orbits of the finite (or, for vertices, triangular)
//! stabilizer of the basic cell acting on the right of `Gamma \ GL_2(Z)`.
//!
//! The coset space is `P^1(Z/N)` for `Gamma_0(N)^+-` (the class of the bottom
//! row) and `P^1(Z/N) x {+1, -1}` for `Gamma_0(N)` (bottom row and
//! determinant). Cells fixed by an orientation-reversing stabilizer element
//! are dropped; over `Z` their classes are 2-torsion and the homology is
//! checked to carry none.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{integer_kernel, quotient_structure, snf_right, FgAbGroup, IntMatrix, KernelLattice};
use crate::matrix2::{small_det, Mat2, SmallMat};
use crate::projline::{p1_size, P1List, P1Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GammaFlavor {
    /// `Gamma_0(N)^+-`: integer matrices of determinant `+-1` with lower-left
    /// entry divisible by `N`.
    #[serde(rename = "pm")]
    Gamma0Pm,
    /// `Gamma_0(N)`: the determinant-one part.
    #[serde(rename = "sl")]
    Gamma0,
}

impl GammaFlavor {
    pub fn flag(self) -> &'static str {
        match self {
            GammaFlavor::Gamma0Pm => "pm",
            GammaFlavor::Gamma0 => "sl",
        }
    }

    pub fn contains(self, g: &Mat2, n: u64) -> bool {
        match self {
            GammaFlavor::Gamma0Pm => g.in_gamma0_pm(n),
            GammaFlavor::Gamma0 => g.in_gamma0(n),
        }
    }
}

impl fmt::Display for GammaFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.flag())
    }
}

impl FromStr for GammaFlavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pm" => Ok(GammaFlavor::Gamma0Pm),
            "sl" => Ok(GammaFlavor::Gamma0),
            _ => Err(Error::InvalidArgument(format!(
                "unknown group flavor {s:?} (expected pm or sl)"
            ))),
        }
    }
}

/// The fixed matrices of the rank-two Voronoi complex.
#[derive(Clone, Debug)]
pub struct StabilizerTables {
    /// Stabilizer of the triangle `{e1, e2, e1+e2}`.
    pub gamma2: Vec<SmallMat>,
    pub gamma2_plus: Vec<SmallMat>,
    /// Stabilizer of the edge `{e1, e2}`.
    pub gamma1: Vec<SmallMat>,
    pub gamma1_plus: Vec<SmallMat>,
    /// Generators of the stabilizer of the vertex `e1`, the upper triangular
    /// matrices with diagonal `+-1`.
    pub gamma0_generators: Vec<SmallMat>,
    pub u: SmallMat,
    pub v: SmallMat,
    pub s: SmallMat,
}

pub fn stabilizer_tables() -> StabilizerTables {
    StabilizerTables {
        gamma2: vec![
            [-1, 1, -1, 0],
            [1, 0, 0, 1],
            [0, 1, 1, 0],
            [1, -1, 0, -1],
            [-1, 1, 0, 1],
            [0, 1, -1, 1],
            [1, -1, 1, 0],
            [-1, 0, 0, -1],
            [0, -1, -1, 0],
            [0, -1, 1, -1],
            [-1, 0, -1, 1],
            [1, 0, 1, -1],
        ],
        gamma2_plus: vec![
            [-1, 1, -1, 0],
            [1, 0, 0, 1],
            [0, 1, -1, 1],
            [1, -1, 1, 0],
            [-1, 0, 0, -1],
            [0, -1, 1, -1],
        ],
        gamma1: vec![
            [-1, 0, 0, -1],
            [0, -1, 1, 0],
            [1, 0, 0, -1],
            [0, -1, -1, 0],
            [0, 1, 1, 0],
            [1, 0, 0, 1],
            [-1, 0, 0, 1],
            [0, 1, -1, 0],
        ],
        gamma1_plus: vec![[-1, 0, 0, -1], [1, 0, 0, -1], [1, 0, 0, 1], [-1, 0, 0, 1]],
        gamma0_generators: vec![[1, 1, 0, 1], [-1, 0, 0, 1], [1, 0, 0, -1]],
        u: [0, 1, -1, 1],
        v: [1, -1, 1, 0],
        s: [0, 1, -1, 0],
    }
}

/// A right coset `Gamma g`: the class of the bottom row of `g`, and for
/// `Gamma_0(N)` also `det g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Coset {
    pub point: P1Point,
    pub det: i8,
}

/// `Gamma \ GL_2(Z)` with its right `GL_2(Z)`-action.
#[derive(Clone, Debug)]
pub struct CosetSpace {
    pub flavor: GammaFlavor,
    pub p1: P1List,
}

impl CosetSpace {
    pub fn new(n: u64, flavor: GammaFlavor) -> Self {
        CosetSpace {
            flavor,
            p1: P1List::new(n),
        }
    }

    fn sheets(&self) -> usize {
        match self.flavor {
            GammaFlavor::Gamma0Pm => 1,
            GammaFlavor::Gamma0 => 2,
        }
    }

    pub fn len(&self) -> usize {
        self.p1.len() * self.sheets()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coset(&self, i: usize) -> Coset {
        let sheets = self.sheets();
        Coset {
            point: self.p1.point(i / sheets),
            det: if i % sheets == 0 { 1 } else { -1 },
        }
    }

    fn index(&self, point: usize, det: i64) -> usize {
        match self.flavor {
            GammaFlavor::Gamma0Pm => point,
            GammaFlavor::Gamma0 => 2 * point + usize::from(det < 0),
        }
    }

    /// The coset `Gamma g`.
    pub fn coset_of(&self, g: &Mat2) -> Result<usize> {
        let det = g.det();
        if !det.magnitude().is_one() {
            return Err(Error::InvalidArgument(format!("{g} is not in GL_2(Z)")));
        }
        let p = self.p1.normalize(&g.c, &g.d)?;
        Ok(self.index(p.index, if det.is_positive() { 1 } else { -1 }))
    }

    /// `x * g` for a matrix already reduced mod `N`, with its determinant.
    fn act_reduced(&self, x: usize, g: &[u64; 4], det: i64) -> usize {
        let sheets = self.sheets();
        let p = self.p1.act_reduced(x / sheets, g);
        let d = if x % sheets == 0 { 1 } else { -1 };
        self.index(p, d * det)
    }

    /// A matrix of `GL_2(Z)` in the coset `x`.
    pub fn lift(&self, x: usize) -> Mat2 {
        let cs = self.coset(x);
        let n = self.p1.level();
        let (c, d) = lift_primitive(cs.point.c, cs.point.d, n);
        let e = c.extended_gcd(&d);
        debug_assert!(e.gcd.is_one());
        // a d - b c = 1 with a = y, b = -x.
        let (a, b) = (e.y, -e.x);
        let g = Mat2::new(a, b, c, d);
        if cs.det < 0 {
            Mat2::new(-g.a, -g.b, g.c, g.d)
        } else {
            g
        }
    }
}

/// Coprime integers congruent to `(c, d)` mod `n`, up to scaling the class.
fn lift_primitive(c: u64, d: u64, n: u64) -> (BigInt, BigInt) {
    if n == 1 || c == 0 {
        return (BigInt::zero(), BigInt::one());
    }
    let mut dd = d;
    while c.gcd(&dd) != 1 {
        dd += n;
    }
    (BigInt::from(c), BigInt::from(dd))
}

/// A `Gamma`-orbit of `dim`-cells, as an orbit on the coset space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellOrbit {
    pub dim: u8,
    /// Coset indices, ascending.
    pub members: Vec<usize>,
    /// The smallest member.
    pub representative: usize,
    pub orientable: bool,
}

/// Orbits of one cell dimension plus, for every coset `x`, the orbit it
/// lies in and the orientation sign `chi(delta)` of some stabilizer element
/// `delta` with `x * delta` equal to the representative.
#[derive(Clone, Debug)]
struct OrbitTable {
    orbits: Vec<CellOrbit>,
    orbit_of: Vec<usize>,
    sign_of: Vec<i8>,
}

/// Orbits of a finite stabilizer group with orientation character given by
/// membership in `plus`.
fn finite_orbits(space: &CosetSpace, dim: u8, group: &[SmallMat], plus: &[SmallMat]) -> OrbitTable {
    let n = space.p1.level();
    let reduced: Vec<([u64; 4], i64, i8)> = group
        .iter()
        .map(|g| {
            let r = crate::matrix2::small(g).reduce_mod(n);
            let chi = if plus.contains(g) { 1 } else { -1 };
            (r, small_det(g), chi)
        })
        .collect();
    let len = space.len();
    let mut orbit_of = vec![usize::MAX; len];
    let mut sign_of = vec![0i8; len];
    let mut orbits = Vec::new();
    for x in 0..len {
        if orbit_of[x] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = Vec::new();
        let mut orientable = true;
        for (r, det, chi) in &reduced {
            let y = space.act_reduced(x, r, *det);
            if y == x && *chi < 0 {
                orientable = false;
            }
            if orbit_of[y] == usize::MAX {
                orbit_of[y] = id;
                // y * delta^-1 = x and chi(delta^-1) = chi(delta).
                sign_of[y] = *chi;
                members.push(y);
            }
        }
        members.sort_unstable();
        if !orientable {
            for &m in &members {
                sign_of[m] = 0;
            }
        }
        orbits.push(CellOrbit {
            dim,
            members,
            representative: x,
            orientable,
        });
    }
    OrbitTable {
        orbits,
        orbit_of,
        sign_of,
    }
}

/// Orbits of the vertex stabilizer, generated by its listed generators.
fn vertex_orbits(space: &CosetSpace, generators: &[SmallMat]) -> OrbitTable {
    let n = space.p1.level();
    let gens: Vec<([u64; 4], i64)> = generators
        .iter()
        .map(|g| (crate::matrix2::small(g).reduce_mod(n), small_det(g)))
        .collect();
    let len = space.len();
    let mut orbit_of = vec![usize::MAX; len];
    let mut orbits = Vec::new();
    for x in 0..len {
        if orbit_of[x] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        orbit_of[x] = id;
        let mut members = vec![x];
        let mut stack = vec![x];
        while let Some(y) = stack.pop() {
            for (r, det) in &gens {
                let z = space.act_reduced(y, r, *det);
                if orbit_of[z] == usize::MAX {
                    orbit_of[z] = id;
                    members.push(z);
                    stack.push(z);
                }
            }
        }
        members.sort_unstable();
        orbits.push(CellOrbit {
            dim: 0,
            members,
            representative: x,
            orientable: true,
        });
    }
    OrbitTable {
        orbits,
        orbit_of,
        sign_of: vec![1; len],
    }
}

/// The quotient cell complex for one `(N, flavor)`.
#[derive(Clone, Debug)]
pub struct CellComplex {
    pub level: u64,
    pub flavor: GammaFlavor,
    pub space: CosetSpace,
    tables: StabilizerTables,
    vertices: OrbitTable,
    edges: OrbitTable,
    triangles: OrbitTable,
    /// Column of each orientable edge orbit in the edge coordinate space.
    edge_column: Vec<Option<usize>>,
    /// Orbit indices of orientable edges, in column order.
    pub edge_basis: Vec<usize>,
    /// Orbit indices of orientable triangles, in column order.
    pub triangle_basis: Vec<usize>,
}

impl CellComplex {
    pub fn new(level: u64, flavor: GammaFlavor) -> Self {
        assert!(level >= 1, "level must be positive");
        let space = CosetSpace::new(level, flavor);
        let tables = stabilizer_tables();
        let vertices = vertex_orbits(&space, &tables.gamma0_generators);
        let edges = finite_orbits(&space, 1, &tables.gamma1, &tables.gamma1_plus);
        let triangles = finite_orbits(&space, 2, &tables.gamma2, &tables.gamma2_plus);
        let mut edge_column = vec![None; edges.orbits.len()];
        let mut edge_basis = Vec::new();
        for (i, o) in edges.orbits.iter().enumerate() {
            if o.orientable {
                edge_column[i] = Some(edge_basis.len());
                edge_basis.push(i);
            }
        }
        let triangle_basis = triangles
            .orbits
            .iter()
            .enumerate()
            .filter(|(_, o)| o.orientable)
            .map(|(i, _)| i)
            .collect();
        CellComplex {
            level,
            flavor,
            space,
            tables,
            vertices,
            edges,
            triangles,
            edge_column,
            edge_basis,
            triangle_basis,
        }
    }

    pub fn orbits(&self, dim: u8) -> &[CellOrbit] {
        match dim {
            0 => &self.vertices.orbits,
            1 => &self.edges.orbits,
            2 => &self.triangles.orbits,
            _ => panic!("cell dimension must be 0, 1 or 2"),
        }
    }

    pub fn edge_dimension(&self) -> usize {
        self.edge_basis.len()
    }

    /// Edge orbit of the coset `x` and the sign carrying `x` to the orbit
    /// representative (0 when unorientable).
    pub fn edge_orbit_of(&self, x: usize) -> (usize, i8) {
        (self.edges.orbit_of[x], self.edges.sign_of[x])
    }

    /// Signed edge coordinate of the unimodular symbol `[g e1, g e2]`:
    /// `Some((column, +-1))`, or `None` for an unorientable edge.
    pub fn edge_coordinate(&self, g: &Mat2) -> Result<Option<(usize, i8)>> {
        let x = self.space.coset_of(g)?;
        let (orbit, sign) = self.edge_orbit_of(x);
        Ok(self.edge_column[orbit].map(|col| (col, sign)))
    }

    fn vertex_of(&self, g: &Mat2) -> usize {
        let x = self.space.coset_of(g).expect("unimodular");
        self.vertices.orbit_of[x]
    }

    fn mat(&self, m: &SmallMat) -> Mat2 {
        crate::matrix2::small(m)
    }

    /// `[g] + [gU] + [gV]` in edge coordinates.
    fn triangle_boundary(&self, g: &Mat2) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.edge_dimension()];
        for h in [
            g.clone(),
            g * &self.mat(&self.tables.u),
            g * &self.mat(&self.tables.v),
        ] {
            if let Some((col, sign)) = self.edge_coordinate(&h).expect("unimodular") {
                out[col] += sign as i64;
            }
        }
        out
    }

    /// `(d2, d1)`: `d2` maps orientable triangle coordinates to edge
    /// coordinates, `d1` edge coordinates to vertex-orbit coordinates.
    ///
    /// Fails if an unorientable triangle has nonzero boundary.
    pub fn boundary_matrices(&self) -> Result<(IntMatrix, IntMatrix)> {
        let e = self.edge_dimension();
        let mut d2 = IntMatrix::zeros(e, self.triangle_basis.len());
        for (i, o) in self.triangles.orbits.iter().enumerate() {
            let g = self.space.lift(o.representative);
            let col = self.triangle_boundary(&g);
            if o.orientable {
                let j = self.triangle_basis.iter().position(|&t| t == i).expect("listed");
                for (r, x) in col.into_iter().enumerate() {
                    d2[(r, j)] = x;
                }
            } else if col.iter().any(|x| !x.is_zero()) {
                return Err(Error::Consistency(format!(
                    "unorientable triangle orbit {i} at level {} has nonzero boundary",
                    self.level
                )));
            }
        }
        let s = self.mat(&self.tables.s);
        let mut d1 = IntMatrix::zeros(self.vertices.orbits.len(), e);
        for (j, &orbit) in self.edge_basis.iter().enumerate() {
            let g = self.space.lift(self.edges.orbits[orbit].representative);
            d1[(self.vertex_of(&(&g * &s)), j)] += 1;
            d1[(self.vertex_of(&g), j)] -= 1;
        }
        Ok((d2, d1))
    }
}

pub fn cell_orbits(n: u64, flavor: GammaFlavor, dim: u8) -> Vec<CellOrbit> {
    CellComplex::new(n, flavor).orbits(dim).to_vec()
}

pub fn boundary_matrices(n: u64, flavor: GammaFlavor) -> Result<(IntMatrix, IntMatrix)> {
    CellComplex::new(n, flavor).boundary_matrices()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitCounts {
    pub vertices: usize,
    pub edges: usize,
    pub orientable_edges: usize,
    pub triangles: usize,
    pub orientable_triangles: usize,
}

/// `H_0^cusp = ker d1 / im d2`, with the maps needed to place modular
/// symbols in it.
#[derive(Clone, Debug)]
pub struct CuspidalHomology {
    pub complex: CellComplex,
    pub d1: IntMatrix,
    pub d2: IntMatrix,
    /// Cycle basis of `ker d1` and coordinates onto it.
    pub kernel: KernelLattice,
    /// Rows span `im d2` written in the cycle basis.
    pub presentation: IntMatrix,
    pub group: FgAbGroup,
    /// Edge coordinates to Smith coordinates of `group` (`E x d`).
    reduction: IntMatrix,
    /// Modulus of each Smith coordinate; zero for free ones.
    moduli: Vec<BigInt>,
}

impl CuspidalHomology {
    pub fn level(&self) -> u64 {
        self.complex.level
    }

    pub fn flavor(&self) -> GammaFlavor {
        self.complex.flavor
    }

    pub fn edge_dimension(&self) -> usize {
        self.complex.edge_dimension()
    }

    pub fn cycle_dimension(&self) -> usize {
        self.kernel.basis.rows()
    }

    pub fn is_cycle(&self, edge_vector: &[BigInt]) -> bool {
        self.d1.apply(edge_vector).iter().all(Zero::is_zero)
    }

    /// Coordinates of a cycle in the cycle basis.
    pub fn project(&self, edge_vector: &[BigInt]) -> Result<Vec<BigInt>> {
        if !self.is_cycle(edge_vector) {
            return Err(Error::Consistency(
                "edge vector is not a cycle (non-cuspidal symbol)".into(),
            ));
        }
        Ok(self.kernel.coords.left_apply(edge_vector))
    }

    /// Moduli of the Smith coordinates: the invariant factors followed by
    /// zeros for the free part.
    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }

    /// Smith coordinates of the class of a cycle, torsion entries reduced.
    pub fn reduce(&self, edge_vector: &[BigInt]) -> Result<Vec<BigInt>> {
        if !self.is_cycle(edge_vector) {
            return Err(Error::Consistency(
                "edge vector is not a cycle (non-cuspidal symbol)".into(),
            ));
        }
        let mut y = self.reduction.left_apply(edge_vector);
        for (v, m) in y.iter_mut().zip(&self.moduli) {
            if !m.is_zero() {
                *v = v.mod_floor(m);
            }
        }
        Ok(y)
    }

    /// Relation rows of the group in Smith coordinates: `diag(moduli)` over
    /// the torsion coordinates.
    pub fn reduced_relations(&self) -> IntMatrix {
        let d = self.moduli.len();
        let rows: Vec<Vec<BigInt>> = self
            .moduli
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(i, m)| {
                let mut r = vec![BigInt::zero(); d];
                r[i] = m.clone();
                r
            })
            .collect();
        IntMatrix::from_rows(d, &rows)
    }

    pub fn orbit_counts(&self) -> OrbitCounts {
        let c = &self.complex;
        OrbitCounts {
            vertices: c.orbits(0).len(),
            edges: c.orbits(1).len(),
            orientable_edges: c.edge_basis.len(),
            triangles: c.orbits(2).len(),
            orientable_triangles: c.triangle_basis.len(),
        }
    }

    pub fn summary(&self) -> HomologySummary {
        HomologySummary {
            level: self.level(),
            flavor: self.flavor(),
            rank: self.group.free_rank,
            torsion: self.group.torsion(),
            orbit_counts: self.orbit_counts(),
        }
    }
}

/// JSON shape of the `homology` command.
#[derive(Clone, Debug, Serialize)]
pub struct HomologySummary {
    #[serde(rename = "N")]
    pub level: u64,
    pub flavor: GammaFlavor,
    pub rank: usize,
    pub torsion: FgAbGroup,
    pub orbit_counts: OrbitCounts,
}

pub fn cuspidal_homology(n: u64, flavor: GammaFlavor) -> Result<CuspidalHomology> {
    let complex = CellComplex::new(n, flavor);
    let (d2, d1) = complex.boundary_matrices()?;
    let kernel = integer_kernel(&d1);
    let k = kernel.basis.rows();
    // Columns of d2 lie in ker d1; rewrite them in the cycle basis.
    let presentation = &d2.transpose() * &kernel.coords;
    let group = quotient_structure(k, &presentation);
    if group.invariant_factors.iter().any(|d| d.is_even()) {
        return Err(Error::Consistency(format!(
            "2-torsion in cuspidal homology at level {n} ({flavor}): {group}"
        )));
    }
    let (diag, v) = snf_right(&presentation);
    let mut kept = Vec::new();
    let mut moduli = Vec::new();
    for i in 0..k {
        let s = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if !s.is_one() {
            kept.push(i);
            moduli.push(s);
        }
    }
    // Torsion coordinates first, then free ones.
    let mut order: Vec<usize> = (0..kept.len()).collect();
    order.sort_by_key(|&i| moduli[i].is_zero());
    let kept: Vec<usize> = order.iter().map(|&i| kept[i]).collect();
    let moduli: Vec<BigInt> = order.iter().map(|&i| moduli[i].clone()).collect();
    let reduction = &kernel.coords * &v.select_cols(&kept);
    Ok(CuspidalHomology {
        complex,
        d1,
        d2,
        kernel,
        presentation,
        group,
        reduction,
        moduli,
    })
}

type CacheSlot = Arc<OnceLock<Result<Arc<CuspidalHomology>>>>;

fn cache() -> &'static Mutex<HashMap<(u64, GammaFlavor), CacheSlot>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, GammaFlavor), CacheSlot>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Process-wide cache of homology results keyed by `(N, flavor)`.
///
/// Concurrent callers for the same key wait on a single computation.
pub fn cached_homology(n: u64, flavor: GammaFlavor) -> Result<Arc<CuspidalHomology>> {
    let slot = cache()
        .lock()
        .expect("homology cache poisoned")
        .entry((n, flavor))
        .or_default()
        .clone();
    slot.get_or_init(|| cuspidal_homology(n, flavor).map(Arc::new))
        .clone()
}

fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
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

fn kronecker_minus(p: u64, d: i64) -> i64 {
    // Legendre symbol (d/p) for odd prime p and d = -1 or -3.
    let r = (d.rem_euclid(p as i64)) as u64;
    if r == 0 {
        return 0;
    }
    let mut acc = 1u64;
    let mut base = r;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

/// Genus of `X_0(N)` from the index, elliptic points and cusps.
pub fn genus_g0(n: u64) -> u64 {
    assert!(n >= 1);
    let fac = prime_factors(n);
    let mu = p1_size(n) as i64;
    let nu2: i64 = if n % 4 == 0 {
        0
    } else {
        fac.iter()
            .map(|&(p, _)| if p == 2 { 1 } else { 1 + kronecker_minus(p, -1) })
            .product()
    };
    let nu3: i64 = if n % 9 == 0 {
        0
    } else {
        fac.iter()
            .map(|&(p, _)| if p == 3 { 1 } else if p == 2 { 1 + -1 } else { 1 + kronecker_minus(p, -3) })
            .product()
    };
    let cusps: i64 = (1..=n)
        .filter(|d| n % d == 0)
        .map(|d| euler_phi(d.gcd(&(n / d))) as i64)
        .sum();
    let twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps;
    debug_assert_eq!(twelve_g % 12, 0);
    (twelve_g / 12).to_u64().expect("genus is non-negative")
}

pub fn euler_phi(n: u64) -> u64 {
    prime_factors(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix2::small_mul;

    fn pair(c: &CellComplex, x: usize) -> (u64, u64) {
        let p = c.space.coset(x).point;
        (p.c, p.d)
    }

    fn orbit_pairs(c: &CellComplex, dim: u8) -> Vec<Vec<(u64, u64)>> {
        c.orbits(dim)
            .iter()
            .map(|o| o.members.iter().map(|&x| pair(c, x)).collect())
            .collect()
    }

    #[test]
    fn table_sizes() {
        let t = stabilizer_tables();
        assert_eq!(t.gamma2.len(), 12);
        assert_eq!(t.gamma2_plus.len(), 6);
        assert_eq!(t.gamma1.len(), 8);
        assert_eq!(t.gamma1_plus.len(), 4);
    }

    #[test]
    fn triangle_stabilizer_permutes_vertices() {
        let t = stabilizer_tables();
        let verts = [(1i64, 0i64), (0, 1), (1, 1)];
        let canon = |(x, y): (i64, i64)| if x < 0 || (x == 0 && y < 0) { (-x, -y) } else { (x, y) };
        for g in &t.gamma2 {
            let mut image: Vec<_> = verts
                .iter()
                .map(|&(x, y)| canon((g[0] * x + g[1] * y, g[2] * x + g[3] * y)))
                .collect();
            image.sort();
            let mut want = verts.to_vec();
            want.sort();
            assert_eq!(image, want, "{g:?}");
        }
    }

    #[test]
    fn stabilizers_are_groups() {
        let t = stabilizer_tables();
        for (group, plus) in [(&t.gamma2, &t.gamma2_plus), (&t.gamma1, &t.gamma1_plus)] {
            for a in group.iter() {
                for b in group.iter() {
                    let ab = small_mul(a, b);
                    assert!(group.contains(&ab));
                    let pa = plus.contains(a);
                    let pb = plus.contains(b);
                    assert_eq!(plus.contains(&ab), pa == pb, "character is multiplicative");
                }
            }
        }
    }

    #[test]
    fn level_11_orbits() {
        let c = CellComplex::new(11, GammaFlavor::Gamma0Pm);
        assert_eq!(c.space.len(), 12);
        let tri = orbit_pairs(&c, 2);
        assert_eq!(
            tri,
            vec![
                vec![(0, 1), (1, 0), (1, 10)],
                vec![(1, 1), (1, 5), (1, 9)],
                vec![(1, 2), (1, 3), (1, 4), (1, 6), (1, 7), (1, 8)],
            ]
        );
        let orient: Vec<bool> = c.orbits(2).iter().map(|o| o.orientable).collect();
        assert_eq!(orient, vec![false, false, true]);
        let edges = orbit_pairs(&c, 1);
        assert_eq!(
            edges,
            vec![
                vec![(0, 1), (1, 0)],
                vec![(1, 1), (1, 10)],
                vec![(1, 2), (1, 5), (1, 6), (1, 9)],
                vec![(1, 3), (1, 4), (1, 7), (1, 8)],
            ]
        );
        let orient: Vec<bool> = c.orbits(1).iter().map(|o| o.orientable).collect();
        assert_eq!(orient, vec![true, false, true, true]);
        let verts = orbit_pairs(&c, 0);
        assert_eq!(verts.len(), 2);
        assert_eq!(verts[0], vec![(0, 1)]);
        assert_eq!(verts[1].len(), 11);
    }

    #[test]
    fn level_11_boundaries() {
        let (d2, d1) = boundary_matrices(11, GammaFlavor::Gamma0Pm).unwrap();
        assert_eq!(d2, IntMatrix::from_rows(1, &[vec![0], vec![1], vec![-2]]));
        assert_eq!(d1, IntMatrix::from_rows(3, &[vec![-1, 0, 0], vec![1, 0, 0]]));
    }

    #[test]
    fn level_11_homology() {
        let h = cuspidal_homology(11, GammaFlavor::Gamma0Pm).unwrap();
        assert_eq!(h.group, FgAbGroup::free(1));
        // tau2 - 2 tau3 is a relation, so [tau2] = 2 [tau3].
        let tau2 = h.reduce(&[0.into(), 1.into(), 0.into()]).unwrap();
        let tau3 = h.reduce(&[0.into(), 0.into(), 1.into()]).unwrap();
        assert_eq!(tau2, tau3.iter().map(|x| x * 2).collect::<Vec<_>>());
    }

    #[test]
    fn small_level_groups() {
        let h = cuspidal_homology(7, GammaFlavor::Gamma0Pm).unwrap();
        assert_eq!(h.group.to_string(), "C3");
        let h = cuspidal_homology(19, GammaFlavor::Gamma0Pm).unwrap();
        assert_eq!(h.group.to_string(), "Z^1 x C3");
        assert!(cuspidal_homology(1, GammaFlavor::Gamma0Pm).unwrap().group.is_trivial());
        assert!(cuspidal_homology(1, GammaFlavor::Gamma0).unwrap().group.is_trivial());
    }

    #[test]
    fn genus_values() {
        assert_eq!(genus_g0(1), 0);
        assert_eq!(genus_g0(7), 0);
        assert_eq!(genus_g0(11), 1);
        assert_eq!(genus_g0(22), 2);
        assert_eq!(genus_g0(37), 2);
        assert_eq!(genus_g0(65), 5);
        assert_eq!(genus_g0(983), 82);
    }

    #[test]
    fn chain_complex_and_partition() {
        for n in 1..=60 {
            for flavor in [GammaFlavor::Gamma0Pm, GammaFlavor::Gamma0] {
                let c = CellComplex::new(n, flavor);
                let (d2, d1) = c.boundary_matrices().unwrap();
                assert!((&d1 * &d2).is_zero(), "N = {n} {flavor}");
                for dim in 0..3 {
                    let total: usize = c.orbits(dim).iter().map(|o| o.members.len()).sum();
                    assert_eq!(total, c.space.len());
                }
            }
        }
    }

    #[test]
    fn lift_lands_in_coset() {
        for n in [1, 2, 6, 11, 12, 30] {
            for flavor in [GammaFlavor::Gamma0Pm, GammaFlavor::Gamma0] {
                let s = CosetSpace::new(n, flavor);
                for x in 0..s.len() {
                    let g = s.lift(x);
                    assert!(g.is_unimodular());
                    assert_eq!(s.coset_of(&g).unwrap(), x);
                }
            }
        }
    }

    #[test]
    fn flavor_parsing() {
        assert_eq!("pm".parse::<GammaFlavor>().unwrap(), GammaFlavor::Gamma0Pm);
        assert_eq!("sl".parse::<GammaFlavor>().unwrap(), GammaFlavor::Gamma0);
        assert!("gl".parse::<GammaFlavor>().is_err());
    }
}
