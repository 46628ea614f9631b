//! Exact linear algebra over the integers.
//!
//! Dense matrices of arbitrary-precision integers, Hermite and Smith normal
//! forms with their unimodular transforms, and finitely generated abelian
//! groups given by relation matrices.
//!
//! Elimination always pivots on the nonzero entry of least absolute value.
//! The boundary matrices fed through here are sparse with tiny entries, so
//! unit pivots are found almost always and fill-in stays small; row and
//! column operations skip zero entries of the source line.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::Error;

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of anything convertible to `BigInt`.
    ///
    /// `cols` is needed to give an empty row list a width.
    pub fn from_rows<T: Clone + Into<BigInt>>(cols: usize, rows: &[Vec<T>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged row in IntMatrix::from_rows");
            data.extend(r.iter().cloned().map(Into::into));
        }
        IntMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Diagonal `rows x cols` matrix with the given leading diagonal entries.
    pub fn diagonal(rows: usize, cols: usize, diag: &[BigInt]) -> Self {
        assert!(diag.len() <= rows.min(cols));
        let mut m = Self::zeros(rows, cols);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<BigInt> {
        self.row(i).to_vec()
    }

    pub fn col_vec(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row_vec(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Appends the rows of `other` below `self`.
    pub fn stack(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.cols, other.cols, "column mismatch in IntMatrix::stack");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn push_row(&mut self, row: &[BigInt]) {
        assert_eq!(row.len(), self.cols);
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    /// Sub-matrix made of the listed columns, in order.
    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                m[(i, k)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                if !a.is_zero() {
                    *o += vi * a;
                }
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for x in &mut self.data[i * self.cols..(i + 1) * self.cols] {
            if !x.is_zero() {
                *x = -&*x;
            }
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let x = &mut self.data[i * self.cols + j];
            if !x.is_zero() {
                *x = -&*x;
            }
        }
    }

    /// `row[dst] += q * row[src]`, touching columns `from..` only.
    fn add_row_multiple_from(&mut self, dst: usize, src: usize, q: &BigInt, from: usize) {
        debug_assert_ne!(dst, src);
        if q.is_zero() {
            return;
        }
        let c = self.cols;
        for j in from..c {
            let s = &self.data[src * c + j];
            if s.is_zero() {
                continue;
            }
            let add = q * s;
            self.data[dst * c + j] += add;
        }
    }

    pub fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        self.add_row_multiple_from(dst, src, q, 0);
    }

    /// `col[dst] += q * col[src]`, touching rows `from..` only.
    fn add_col_multiple_from(&mut self, dst: usize, src: usize, q: &BigInt, from: usize) {
        debug_assert_ne!(dst, src);
        if q.is_zero() {
            return;
        }
        let c = self.cols;
        for i in from..self.rows {
            let s = &self.data[i * c + src];
            if s.is_zero() {
                continue;
            }
            let add = q * s;
            self.data[i * c + dst] += add;
        }
    }

    pub fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        self.add_col_multiple_from(dst, src, q, 0);
    }

    /// Replaces rows `i, j` by `(a*ri + b*rj, c*ri + d*rj)`.
    fn combine_rows(&mut self, i: usize, j: usize, m: [&BigInt; 4]) {
        let cols = self.cols;
        for k in 0..cols {
            let x = self.data[i * cols + k].clone();
            let y = self.data[j * cols + k].clone();
            if x.is_zero() && y.is_zero() {
                continue;
            }
            self.data[i * cols + k] = m[0] * &x + m[1] * &y;
            self.data[j * cols + k] = m[2] * &x + m[3] * &y;
        }
    }

    /// Replaces columns `i, j` by `(a*ci + c*cj, b*ci + d*cj)`, i.e. right
    /// multiplication by `[[a, b], [c, d]]` on that column pair.
    fn combine_cols(&mut self, i: usize, j: usize, m: [&BigInt; 4]) {
        let cols = self.cols;
        for r in 0..self.rows {
            let x = self.data[r * cols + i].clone();
            let y = self.data[r * cols + j].clone();
            if x.is_zero() && y.is_zero() {
                continue;
            }
            self.data[r * cols + i] = m[0] * &x + m[2] * &y;
            self.data[r * cols + j] = m[1] * &x + m[3] * &y;
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Quotient of `a` by `b` rounded to the nearest integer, so that the
/// remainder `a - q*b` has absolute value at most `|b|/2`.
fn nearest_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut q, r) = a.div_mod_floor(b);
    let r2: BigInt = &r * 2;
    // r has the sign of b, so r - b is the smaller remainder.
    if r2.abs() > b.abs() {
        q += 1;
    }
    q
}

/// Row-style Hermite normal form: returns `(H, U)` with `U` unimodular and
/// `U * A = H`.
///
/// `H` is in row echelon form with positive pivots, entries above each pivot
/// reduced into `[0, pivot)`, and zero rows at the bottom.
pub fn hnf(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let out = hnf_impl(a, true, false);
    (out.h, out.u.expect("transform requested"))
}

struct HnfOutput {
    h: IntMatrix,
    u: Option<IntMatrix>,
    u_inv: Option<IntMatrix>,
    pivots: Vec<usize>,
}

/// Elementary row operations mirrored onto the tracked transforms: `U` gets
/// the same row operation, `U^-1` the inverse column operation.
struct RowTracker {
    u: Option<IntMatrix>,
    u_inv: Option<IntMatrix>,
}

impl RowTracker {
    fn add(&mut self, dst: usize, src: usize, q: &BigInt) {
        if let Some(u) = &mut self.u {
            u.add_row_multiple(dst, src, q);
        }
        if let Some(ui) = &mut self.u_inv {
            ui.add_col_multiple(src, dst, &-q);
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        if let Some(u) = &mut self.u {
            u.swap_rows(a, b);
        }
        if let Some(ui) = &mut self.u_inv {
            ui.swap_cols(a, b);
        }
    }

    fn negate(&mut self, i: usize) {
        if let Some(u) = &mut self.u {
            u.negate_row(i);
        }
        if let Some(ui) = &mut self.u_inv {
            ui.negate_col(i);
        }
    }
}

fn hnf_impl(a: &IntMatrix, track_u: bool, track_u_inv: bool) -> HnfOutput {
    let mut h = a.clone();
    let n = h.rows;
    let mut tr = RowTracker {
        u: track_u.then(|| IntMatrix::identity(n)),
        u_inv: track_u_inv.then(|| IntMatrix::identity(n)),
    };
    let mut pivots = Vec::new();
    let mut r = 0;
    for j in 0..h.cols {
        if r == n {
            break;
        }
        loop {
            let best = (r..n)
                .filter(|&i| !h[(i, j)].is_zero())
                .min_by(|&x, &y| h[(x, j)].magnitude().cmp(h[(y, j)].magnitude()));
            let Some(p) = best else { break };
            h.swap_rows(p, r);
            tr.swap(p, r);
            let mut clean = true;
            for i in r + 1..n {
                if h[(i, j)].is_zero() {
                    continue;
                }
                let q = -nearest_quotient(&h[(i, j)], &h[(r, j)]);
                h.add_row_multiple_from(i, r, &q, j);
                tr.add(i, r, &q);
                if !h[(i, j)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h[(r, j)].is_zero() {
            continue;
        }
        if h[(r, j)].is_negative() {
            h.negate_row(r);
            tr.negate(r);
        }
        let pivot = h[(r, j)].clone();
        for i in 0..r {
            if h[(i, j)].is_zero() {
                continue;
            }
            let q = -h[(i, j)].div_floor(&pivot);
            h.add_row_multiple_from(i, r, &q, j);
            tr.add(i, r, &q);
        }
        pivots.push(j);
        r += 1;
    }
    HnfOutput {
        h,
        u: tr.u,
        u_inv: tr.u_inv,
        pivots,
    }
}

/// A basis of `{x in Z^n : A x = 0}` together with the coordinate map onto it.
#[derive(Clone, Debug)]
pub struct KernelLattice {
    /// Basis vectors as rows (`k x n`).
    pub basis: IntMatrix,
    /// `n x k` matrix sending a kernel vector `x` (as a row) to its
    /// coordinates `x * coords` in `basis`.
    pub coords: IntMatrix,
    /// `n x (n-k)` matrix whose product with any kernel vector is zero; a
    /// nonzero product certifies that a vector lies outside the kernel.
    pub complement: IntMatrix,
}

/// Integer kernel of `x -> A x`, computed from the Hermite form of `A^T`.
///
/// The basis is the saturated lattice basis read off the transform, so it is
/// deterministic for a given `A`.
pub fn integer_kernel(a: &IntMatrix) -> KernelLattice {
    let at = a.transpose();
    let out = hnf_impl(&at, true, true);
    let rank = out.pivots.len();
    let n = at.rows;
    let u = out.u.expect("tracked");
    let ui = out.u_inv.expect("tracked");
    let mut basis = IntMatrix::zeros(n - rank, n);
    for (k, i) in (rank..n).enumerate() {
        for j in 0..n {
            basis[(k, j)] = u[(i, j)].clone();
        }
    }
    let coords = ui.select_cols(&(rank..n).collect::<Vec<_>>());
    let complement = ui.select_cols(&(0..rank).collect::<Vec<_>>());
    KernelLattice {
        basis,
        coords,
        complement,
    }
}

/// `U * A * V = S` with `U`, `V` unimodular and `S` diagonal in Smith form.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// Diagonal entries `s_1, s_2, ...` up to `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s[(i, i)].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

struct SnfOutput {
    diag: Vec<BigInt>,
    u: Option<IntMatrix>,
    v: Option<IntMatrix>,
}

/// Smith normal form with both transforms.
pub fn snf(a: &IntMatrix) -> SmithDecomposition {
    let out = snf_impl(a, true, true);
    SmithDecomposition {
        u: out.u.expect("tracked"),
        s: IntMatrix::diagonal(a.rows, a.cols, &out.diag),
        v: out.v.expect("tracked"),
    }
}

/// Smith diagonal and right transform `V`, skipping `U`.
///
/// Enough to change coordinates on `Z^cols / rowspace(A)`: `x -> x V` carries
/// the row space onto `sum s_i Z e_i`.
pub fn snf_right(a: &IntMatrix) -> (Vec<BigInt>, IntMatrix) {
    let out = snf_impl(a, false, true);
    (out.diag, out.v.expect("tracked"))
}

/// Nonzero Smith invariants of `A` (with multiplicity, in divisibility order).
pub fn smith_invariants(a: &IntMatrix) -> Vec<BigInt> {
    snf_impl(a, false, false)
        .diag
        .into_iter()
        .filter(|d| !d.is_zero())
        .collect()
}

fn min_abs_entry(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            if x.magnitude().is_one() {
                return Some((i, j));
            }
            match best {
                Some((bi, bj)) if a[(bi, bj)].magnitude() <= x.magnitude() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

fn snf_impl(a: &IntMatrix, track_u: bool, track_v: bool) -> SnfOutput {
    let mut m = a.clone();
    let (rows, cols) = (m.rows, m.cols);
    let mut u = track_u.then(|| IntMatrix::identity(rows));
    let mut v = track_v.then(|| IntMatrix::identity(cols));
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = min_abs_entry(&m, t) else { break };
        m.swap_rows(pi, t);
        m.swap_cols(pj, t);
        if let Some(u) = &mut u {
            u.swap_rows(pi, t);
        }
        if let Some(v) = &mut v {
            v.swap_cols(pj, t);
        }
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if m[(i, t)].is_zero() {
                    continue;
                }
                let q = -nearest_quotient(&m[(i, t)], &m[(t, t)]);
                m.add_row_multiple_from(i, t, &q, t);
                if let Some(u) = &mut u {
                    u.add_row_multiple(i, t, &q);
                }
                clean &= m[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if m[(t, j)].is_zero() {
                    continue;
                }
                let q = -nearest_quotient(&m[(t, j)], &m[(t, t)]);
                m.add_col_multiple_from(j, t, &q, t);
                if let Some(v) = &mut v {
                    v.add_col_multiple(j, t, &q);
                }
                clean &= m[(t, j)].is_zero();
            }
            if clean {
                break;
            }
            // A remainder smaller than the pivot is left in row or column t.
            let mut best = (t, t);
            for i in t + 1..rows {
                if !m[(i, t)].is_zero() && m[(i, t)].magnitude() < m[best].magnitude() {
                    best = (i, t);
                }
            }
            for j in t + 1..cols {
                if !m[(t, j)].is_zero() && m[(t, j)].magnitude() < m[best].magnitude() {
                    best = (t, j);
                }
            }
            let (bi, bj) = best;
            if bi != t {
                m.swap_rows(bi, t);
                if let Some(u) = &mut u {
                    u.swap_rows(bi, t);
                }
            }
            if bj != t {
                m.swap_cols(bj, t);
                if let Some(v) = &mut v {
                    v.swap_cols(bj, t);
                }
            }
        }
        t += 1;
    }
    let rank = t;
    let mut diag: Vec<BigInt> = (0..rank).map(|i| m[(i, i)].clone()).collect();

    // Enforce the divisibility chain with 2x2 gcd/lcm moves on the diagonal.
    for i in 0..rank {
        for j in i + 1..rank {
            if diag[j].is_multiple_of(&diag[i]) {
                continue;
            }
            let (a, b) = (diag[i].clone(), diag[j].clone());
            let eg = a.extended_gcd(&b);
            let (g, s, tt) = (eg.gcd, eg.x, eg.y);
            let a_g = &a / &g;
            let b_g = &b / &g;
            if let Some(u) = &mut u {
                let nb = -&b_g;
                u.combine_rows(i, j, [&s, &tt, &nb, &a_g]);
            }
            if let Some(v) = &mut v {
                let one = BigInt::one();
                let r01 = -(&tt * &b_g);
                let r11 = &s * &a_g;
                v.combine_cols(i, j, [&one, &r01, &one, &r11]);
            }
            diag[j] = &a * &b_g;
            diag[i] = g;
        }
    }
    for (i, d) in diag.iter_mut().enumerate() {
        if d.is_negative() {
            *d = -&*d;
            if let Some(u) = &mut u {
                u.negate_row(i);
            }
        }
    }
    diag.resize(rows.min(cols), BigInt::zero());
    SnfOutput { diag, u, v }
}

/// Finitely generated abelian group `Z^r x C_{d_1} x ... x C_{d_k}` with
/// `1 < d_1 | d_2 | ... | d_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FgAbGroup {
    pub free_rank: usize,
    pub invariant_factors: Vec<BigInt>,
}

impl FgAbGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup {
            free_rank: rank,
            invariant_factors: Vec::new(),
        }
    }

    /// Group `Z^free_rank x prod C_{c}` for arbitrary positive cyclic orders,
    /// normalised to the invariant-factor chain.
    pub fn from_cyclic_orders<T: Clone + Into<BigInt>>(free_rank: usize, orders: &[T]) -> Self {
        let diag: Vec<BigInt> = orders.iter().cloned().map(Into::into).collect();
        assert!(
            diag.iter().all(|d| d.is_positive()),
            "cyclic orders must be positive"
        );
        let n = diag.len();
        let mut invariant_factors = smith_invariants(&IntMatrix::diagonal(n, n, &diag));
        invariant_factors.retain(|d| !d.is_one());
        FgAbGroup {
            free_rank,
            invariant_factors,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite()
            .then(|| self.invariant_factors.iter().product())
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    pub fn torsion(&self) -> FgAbGroup {
        FgAbGroup {
            free_rank: 0,
            invariant_factors: self.invariant_factors.clone(),
        }
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "C1");
        }
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        parts.extend(self.invariant_factors.iter().map(|d| format!("C{d}")));
        write!(f, "{}", parts.join(" x "))
    }
}

impl FromStr for FgAbGroup {
    type Err = Error;

    /// Parses the rendered form, e.g. `"C1"`, `"C2 x C12"`, `"Z^3 x C3"`.
    /// Factors need not be in canonical order.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("malformed group string {s:?}"));
        let mut free_rank = 0usize;
        let mut orders: Vec<BigInt> = Vec::new();
        for part in s.split('x').map(str::trim) {
            if let Some(r) = part.strip_prefix("Z^") {
                free_rank += r.parse::<usize>().map_err(|_| bad())?;
            } else if part == "Z" {
                free_rank += 1;
            } else if let Some(c) = part.strip_prefix('C') {
                let d: BigInt = c.parse().map_err(|_| bad())?;
                if !d.is_positive() {
                    return Err(bad());
                }
                orders.push(d);
            } else {
                return Err(bad());
            }
        }
        Ok(FgAbGroup::from_cyclic_orders(free_rank, &orders))
    }
}

impl Serialize for FgAbGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Isomorphism type of `Z^ambient_rank / rowspace(relations)`.
pub fn quotient_structure(ambient_rank: usize, relations: &IntMatrix) -> FgAbGroup {
    assert_eq!(
        relations.cols, ambient_rank,
        "relation matrix width must equal the ambient rank"
    );
    let inv = smith_invariants(relations);
    FgAbGroup {
        free_rank: ambient_rank - inv.len(),
        invariant_factors: inv.into_iter().filter(|d| !d.is_one()).collect(),
    }
}

/// Isomorphism type of `(Z^n / rowspace(relations)) / <span>`.
pub fn cokernel_of_span(relations: &IntMatrix, span: &[Vec<BigInt>]) -> FgAbGroup {
    let n = relations.cols;
    let extra = IntMatrix::from_rows(n, span);
    quotient_structure(n, &relations.stack(&extra))
}
