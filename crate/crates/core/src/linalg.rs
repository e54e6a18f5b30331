//! Dense exact linear algebra over `Q`.
//!
//! Everything downstream (cohomology, pairings, Poisson matrices) reduces to
//! Gaussian elimination on these matrices, so the routines skip zero entries
//! aggressively; the matrices built from Laurent tails are very sparse.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::exact::Q;

fn lcm_all<'a>(it: impl Iterator<Item = &'a BigInt>) -> BigInt {
    it.fold(BigInt::one(), |acc, d| if d.is_one() { acc } else { acc.lcm(d) })
}

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    /// Builds a `len x cols.len()` matrix whose columns are the given vectors.
    pub fn from_columns(len: usize, cols: &[Vec<Q>]) -> Self {
        let mut m = Matrix::zeros(len, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), len);
            for (i, v) in c.iter().enumerate() {
                if !v.is_zero() {
                    m[(i, j)] = v.clone();
                }
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| crate::exact::q(v)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vec<Q> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Q>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = &self[(i, j)];
                if !v.is_zero() {
                    t[(j, i)] = v.clone();
                }
            }
        }
        t
    }

    /// Product computed over the integers after clearing row denominators of
    /// `self` and column denominators of `other`; avoids a gcd per term.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let row_den: Vec<BigInt> =
            (0..self.rows).map(|i| lcm_all((0..self.cols).map(|k| self[(i, k)].denom()))).collect();
        let col_den: Vec<BigInt> =
            (0..other.cols).map(|j| lcm_all((0..other.rows).map(|k| other[(k, j)].denom()))).collect();
        let a: Vec<Vec<(usize, BigInt)>> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .filter(|&k| !self[(i, k)].is_zero())
                    .map(|k| {
                        let x = &self[(i, k)];
                        (k, x.numer() * (&row_den[i] / x.denom()))
                    })
                    .collect()
            })
            .collect();
        let b: Vec<Vec<(usize, BigInt)>> = (0..other.rows)
            .map(|k| {
                (0..other.cols)
                    .filter(|&j| !other[(k, j)].is_zero())
                    .map(|j| {
                        let x = &other[(k, j)];
                        (j, x.numer() * (&col_den[j] / x.denom()))
                    })
                    .collect()
            })
            .collect();
        let mut out = Matrix::zeros(self.rows, other.cols);
        let mut acc = vec![BigInt::zero(); other.cols];
        for i in 0..self.rows {
            for (k, x) in &a[i] {
                for (j, y) in &b[*k] {
                    acc[*j] += x * y;
                }
            }
            for (j, v) in acc.iter_mut().enumerate() {
                if !v.is_zero() {
                    let d = &row_den[i] * &col_den[j];
                    out.data[i * other.cols + j] = Q::new(std::mem::take(v), d);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len(), "shape mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| {
                let mut acc = Q::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn neg(&self) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }

    /// Stacks `[self | other]`.
    pub fn hcat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut m = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    /// Stacks `[self; other]`.
    pub fn vcat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn max_abs(&self) -> Q {
        self.data.iter().map(crate::exact::q_abs).max().unwrap_or_else(Q::zero)
    }

    pub fn is_skew(&self) -> bool {
        self.is_square() && self.add(&self.transpose()).is_zero()
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place(self.cols);
        (m, pivots)
    }

    /// Row-reduces in place, choosing pivots only among the first `pivot_cols`
    /// columns. Returns the pivot columns.
    fn rref_in_place(&mut self, pivot_cols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..pivot_cols {
            if r == self.rows {
                break;
            }
            // sparsest candidate row keeps fill-in (and coefficient growth) down
            let Some(p) = (r..self.rows).filter(|&i| !self[(i, c)].is_zero()).min_by_key(|&i| {
                self.data[i * self.cols + c..(i + 1) * self.cols].iter().filter(|x| !x.is_zero()).count()
            }) else {
                continue;
            };
            self.swap_rows(p, r);
            let inv = Q::one() / &self[(r, c)];
            if !inv.is_one() {
                for j in 0..self.cols {
                    if !self[(r, j)].is_zero() {
                        let v = &self[(r, j)] * &inv;
                        self[(r, j)] = v;
                    }
                }
            }
            let pivot_row: Vec<(usize, Q)> =
                (0..self.cols).filter(|&j| !self[(r, j)].is_zero()).map(|j| (j, self[(r, j)].clone())).collect();
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for (j, v) in &pivot_row {
                    let idx = i * self.cols + j;
                    self.data[idx] -= &f * v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space `{v : self * v = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        self.kernel_chart().rows.to_rows()
    }

    /// Kernel basis with the free columns as coordinates: basis vector `f`
    /// is `1` at free column `f` and `0` at the other free columns.
    pub fn kernel_chart(&self) -> EchelonBasis {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Q::zero(); self.cols];
            v[free] = Q::one();
            for (row, &p) in pivots.iter().enumerate() {
                let x = &r[(row, free)];
                if !x.is_zero() {
                    v[p] = -x;
                }
            }
            basis.push(v);
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let rows = if basis.is_empty() { Matrix::zeros(0, self.cols) } else { Matrix::from_rows(basis) };
        EchelonBasis { pivots: free, rows }
    }

    /// Some solution of `self * x = b`, if one exists.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(b.len(), self.rows);
        let aug = self.hcat(&Matrix::from_columns(self.rows, &[b.to_vec()]));
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Q::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = self.hcat(&Matrix::identity(n));
        let pivots = aug.rref_in_place(n);
        if pivots.len() < n {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    pub fn determinant(&self) -> Q {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = self.rows;
        let mut det = Q::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Q::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det *= &piv;
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] / &piv;
                for j in c..n {
                    let v = &f * &m[(c, j)];
                    m[(i, j)] -= v;
                }
            }
        }
        det
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        rows.serialize(s)
    }
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    let mut acc = Q::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn vec_add(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(a: &[Q], c: &Q) -> Vec<Q> {
    a.iter().map(|x| x * c).collect()
}

/// Rank of a family of vectors of common length `len`.
pub fn rank_of(len: usize, vectors: &[Vec<Q>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_columns(len, vectors).rank()
}

/// Canonical (row-reduced) basis of the span of `vectors`.
pub fn span_basis(len: usize, vectors: &[Vec<Q>]) -> Vec<Vec<Q>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = Matrix::from_rows(vectors.to_vec());
    let (r, pivots) = m.rref();
    debug_assert_eq!(m.cols(), len);
    (0..pivots.len()).map(|i| r.row(i)).collect()
}

/// Basis of `span(a) ∩ span(b)` inside `Q^len`.
pub fn intersect(len: usize, a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    // x = Σ s_i a_i = Σ t_j b_j  <=>  [A | -B] (s, t) = 0
    let ma = Matrix::from_columns(len, a);
    let mb = Matrix::from_columns(len, b).neg();
    let ker = ma.hcat(&mb).kernel();
    let vecs: Vec<Vec<Q>> = ker.iter().map(|k| ma.mul_vec(&k[..a.len()])).collect();
    span_basis(len, &vecs)
}

/// Coordinates with respect to a fixed family of independent columns.
/// Coordinates with respect to independent columns `A`.
/// Solves on a set of `k` independent rows, then checks the remaining rows.
#[derive(Clone, Debug)]
pub struct ColumnSolver {
    len: usize,
    k: usize,
    a: Matrix,
    rows: Vec<usize>,
    // inverse of `A` restricted to `rows`
    inv: Matrix,
}

impl ColumnSolver {
    /// Fails (returns `None`) if the columns are linearly dependent.
    pub fn new(len: usize, columns: &[Vec<Q>]) -> Option<Self> {
        let a = Matrix::from_columns(len, columns);
        let k = columns.len();
        let mut at = a.transpose();
        let rows = at.rref_in_place(len);
        if rows.len() < k {
            return None;
        }
        let sub = Matrix::from_rows(rows.iter().map(|&i| a.row(i).to_vec()).collect());
        let inv = sub.inverse()?;
        Some(ColumnSolver { len, k, a, rows, inv })
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn ambient(&self) -> usize {
        self.len
    }

    /// Coordinates of `v`, or `None` when `v` is not in the span.
    pub fn coords(&self, v: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(v.len(), self.len);
        let vp: Vec<Q> = self.rows.iter().map(|&i| v[i].clone()).collect();
        let c = self.inv.mul_vec(&vp);
        (self.a.mul_vec(&c) == v).then_some(c)
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.coords(v).is_some()
    }
}

/// A subspace `V ⊂ Q^len` with a chosen complement, used to realise the
/// quotient `Q^len / V` in coordinates.
#[derive(Clone, Debug)]
pub struct Subspace {
    len: usize,
    basis: Vec<Vec<Q>>,
    complement: Vec<Vec<Q>>,
    solver: ColumnSolver,
}

impl Subspace {
    pub fn new(len: usize, vectors: &[Vec<Q>]) -> Self {
        let basis = span_basis(len, vectors);
        // complement: unit vectors at the non-pivot positions of the rref basis
        let mut is_pivot = vec![false; len];
        for b in &basis {
            if let Some(p) = b.iter().position(|x| !x.is_zero()) {
                is_pivot[p] = true;
            }
        }
        let complement: Vec<Vec<Q>> = (0..len)
            .filter(|&i| !is_pivot[i])
            .map(|i| {
                let mut e = vec![Q::zero(); len];
                e[i] = Q::one();
                e
            })
            .collect();
        let mut all = basis.clone();
        all.extend(complement.iter().cloned());
        let solver = ColumnSolver::new(len, &all).expect("basis plus complement spans");
        Subspace { len, basis, complement, solver }
    }

    pub fn full(len: usize) -> Self {
        let e: Vec<Vec<Q>> = (0..len)
            .map(|i| {
                let mut v = vec![Q::zero(); len];
                v[i] = Q::one();
                v
            })
            .collect();
        Subspace::new(len, &e)
    }

    pub fn zero(len: usize) -> Self {
        Subspace::new(len, &[])
    }

    pub fn ambient(&self) -> usize {
        self.len
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.len - self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.len
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    pub fn complement(&self) -> &[Vec<Q>] {
        &self.complement
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        let c = self.solver.coords(v).expect("full solver");
        c[self.basis.len()..].iter().all(|x| x.is_zero())
    }

    /// Coordinates of the image of `v` in `Q^len / V` (w.r.t. the complement).
    pub fn quotient_coords(&self, v: &[Q]) -> Vec<Q> {
        let c = self.solver.coords(v).expect("full solver");
        c[self.basis.len()..].to_vec()
    }

    pub fn same_as(&self, other: &Subspace) -> bool {
        self.len == other.len && self.basis == other.basis
    }
}

/// A basis that is the identity on a set of pivot positions, used as a
/// coordinate chart: the coordinates of a member are its entries there.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    pivots: Vec<usize>,
    rows: Matrix,
}

impl EchelonBasis {
    pub fn new(len: usize, vecs: &[Vec<Q>]) -> Self {
        let mut m = if vecs.is_empty() { Matrix::zeros(0, len) } else { Matrix::from_rows(vecs.to_vec()) };
        let pivots = m.rref_in_place(len);
        let rows = if pivots.is_empty() {
            Matrix::zeros(0, len)
        } else {
            Matrix::from_rows((0..pivots.len()).map(|i| m.row(i)).collect())
        };
        EchelonBasis { pivots, rows }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn basis(&self) -> Vec<Vec<Q>> {
        self.rows.to_rows()
    }

    /// Coordinates without a membership check; exact for members.
    pub fn project(&self, v: &[Q]) -> Vec<Q> {
        self.pivots.iter().map(|&p| v[p].clone()).collect()
    }

    pub fn coords(&self, v: &[Q]) -> Option<Vec<Q>> {
        let c = self.project(v);
        (self.lift(&c) == v).then_some(c)
    }

    pub fn lift(&self, c: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.rows.cols()];
        for (i, x) in c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, out_j) in out.iter_mut().enumerate() {
                let a = &self.rows[(i, j)];
                if !a.is_zero() {
                    *out_j += x * a;
                }
            }
        }
        out
    }
}

/// `Z / B` for subspaces `B ⊆ Z ⊆ Q^len`, with representatives chosen greedily:
/// first from a preferred list, then from the basis of `Z`, in order.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    reps: Vec<Vec<Q>>,
    boundary: Vec<Vec<Q>>,
    chart: EchelonBasis,
    // columns: reps then boundary basis, in chart coordinates
    solver: ColumnSolver,
}

impl QuotientSpace {
    /// Panics if `boundary` or `preferred` is not contained in `span(cycles)`.
    pub fn new(len: usize, cycles: &[Vec<Q>], boundary: &[Vec<Q>], preferred: &[Vec<Q>]) -> Self {
        Self::with_chart(EchelonBasis::new(len, cycles), boundary, preferred)
    }

    /// As `new`, with `Z` given by a chart (e.g. from `Matrix::kernel_chart`).
    pub fn with_chart(chart: EchelonBasis, boundary: &[Vec<Q>], preferred: &[Vec<Q>]) -> Self {
        let zdim = chart.dim();
        let mut all: Vec<Vec<Q>> = boundary.to_vec();
        all.extend(preferred.iter().cloned());
        let mut local: Vec<Vec<Q>> = all
            .iter()
            .map(|v| chart.coords(v).expect("boundaries or preferred vectors outside the cycle space"))
            .collect();
        // the chart rows themselves span Z and have unit coordinates
        for i in 0..zdim {
            all.push(chart.rows.row(i));
            let mut e = vec![Q::zero(); zdim];
            e[i] = Q::one();
            local.push(e);
        }
        // pivot columns of [B | preferred | Z] are the greedy independent choice
        let mut m = Matrix::from_columns(zdim, &local);
        let pivots = m.rref_in_place(all.len());
        assert_eq!(pivots.len(), zdim);
        let nb = boundary.len();
        let pick =
            |keep: &dyn Fn(usize) -> bool| -> Vec<usize> { pivots.iter().copied().filter(|&j| keep(j)).collect() };
        let bidx = pick(&|j| j < nb);
        let ridx = pick(&|j| j >= nb);
        let mut cols: Vec<Vec<Q>> = ridx.iter().map(|&j| local[j].clone()).collect();
        cols.extend(bidx.iter().map(|&j| local[j].clone()));
        let solver = ColumnSolver::new(zdim, &cols).expect("independent by construction");
        QuotientSpace {
            reps: ridx.iter().map(|&j| all[j].clone()).collect(),
            boundary: bidx.iter().map(|&j| all[j].clone()).collect(),
            chart,
            solver,
        }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[Vec<Q>] {
        &self.reps
    }

    pub fn boundary(&self) -> &[Vec<Q>] {
        &self.boundary
    }

    /// Class coordinates of a cycle; `None` if `v` is not a cycle.
    pub fn coords(&self, v: &[Q]) -> Option<Vec<Q>> {
        let local = self.chart.coords(v)?;
        self.solver.coords(&local).map(|c| c[..self.reps.len()].to_vec())
    }

    pub fn is_boundary(&self, v: &[Q]) -> bool {
        self.coords(v).is_some_and(|c| is_zero_vec(&c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qr};

    #[test]
    fn kernel_and_rank() {
        let m = Matrix::from_i64(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(is_zero_vec(&m.mul_vec(&v)));
        }
    }

    #[test]
    fn inverse_and_determinant() {
        let m = Matrix::from_i64(&[&[2, 1], &[7, 4]]);
        assert_eq!(m.determinant(), q(1));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        assert!(Matrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = Matrix::from_i64(&[&[1, 1], &[1, -1]]);
        assert_eq!(m.solve(&[q(3), q(1)]), Some(vec![q(2), q(1)]));
        let s = Matrix::from_i64(&[&[1, 1], &[2, 2]]);
        assert_eq!(s.solve(&[q(1), q(3)]), None);
    }

    #[test]
    fn column_solver_roundtrip() {
        let cols = vec![vec![q(1), q(0), q(1)], vec![q(0), q(2), q(1)]];
        let s = ColumnSolver::new(3, &cols).unwrap();
        let v = vec_add(&vec_scale(&cols[0], &qr(1, 3)), &vec_scale(&cols[1], &q(-2)));
        assert_eq!(s.coords(&v), Some(vec![qr(1, 3), q(-2)]));
        assert_eq!(s.coords(&[q(0), q(0), q(1)]), None);
        assert!(ColumnSolver::new(3, &[cols[0].clone(), cols[0].clone()]).is_none());
    }

    #[test]
    fn subspace_quotient() {
        let v = Subspace::new(3, &[vec![q(1), q(1), q(0)]]);
        assert_eq!(v.codim(), 2);
        assert!(v.contains(&[q(2), q(2), q(0)]));
        assert!(!v.contains(&[q(1), q(0), q(0)]));
        assert!(is_zero_vec(&v.quotient_coords(&[q(5), q(5), q(0)])));
    }

    #[test]
    fn quotient_prefers_given_representatives() {
        let e = |i: usize| {
            let mut v = vec![q(0); 3];
            v[i] = q(1);
            v
        };
        let z = vec![e(0), e(1), e(2)];
        let qs = QuotientSpace::new(3, &z, &[e(0)], &[vec![q(1), q(0), q(1)]]);
        assert_eq!(qs.dim(), 2);
        assert_eq!(qs.reps()[0], vec![q(1), q(0), q(1)]);
        assert!(qs.is_boundary(&e(0)));
        assert_eq!(qs.coords(&[q(5), q(0), q(1)]), Some(vec![q(1), q(0)]));
    }

    #[test]
    fn intersection_of_planes() {
        let a = vec![vec![q(1), q(0), q(0)], vec![q(0), q(1), q(0)]];
        let b = vec![vec![q(0), q(1), q(0)], vec![q(0), q(0), q(1)]];
        let i = intersect(3, &a, &b);
        assert_eq!(i, vec![vec![q(0), q(1), q(0)]]);
    }
}
