//! Reductive Lie algebras in their defining representation.
//!
//! Classical algebras get an explicit matrix model with a fixed ordered basis;
//! exceptional types carry only tabulated dimension data.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::exact::{elementary_invariants, pfaffian, q, Ring, Q};
use crate::linalg::{intersect, rank_of, ColumnSolver, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupId {
    /// `gl(r)`, r >= 1.
    Gl(usize),
    /// `sl(r)`, r >= 2.
    Sl(usize),
    /// `so(r)`, r >= 3, matrix size r.
    So(usize),
    /// `sp(2k)`, stored by matrix size 2k.
    Sp(usize),
    G2,
    F4,
    E6,
    E7,
    E8,
}

impl GroupId {
    pub fn is_classical(self) -> bool {
        matches!(self, GroupId::Gl(_) | GroupId::Sl(_) | GroupId::So(_) | GroupId::Sp(_))
    }

    /// Size of the defining matrices (classical types only).
    pub fn matrix_size(self) -> Option<usize> {
        match self {
            GroupId::Gl(r) | GroupId::Sl(r) | GroupId::So(r) | GroupId::Sp(r) => Some(r),
            _ => None,
        }
    }

    fn validate(self) -> Result<Self> {
        let ok = match self {
            GroupId::Gl(r) => r >= 1,
            GroupId::Sl(r) => r >= 2,
            GroupId::So(r) => r >= 3,
            GroupId::Sp(r) => r >= 2 && r % 2 == 0,
            _ => true,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::UnsupportedGroup(self.to_string()))
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupId::Gl(r) => write!(f, "gl({r})"),
            GroupId::Sl(r) => write!(f, "sl({r})"),
            GroupId::So(r) => write!(f, "so({r})"),
            GroupId::Sp(r) => write!(f, "sp({r})"),
            GroupId::G2 => write!(f, "G2"),
            GroupId::F4 => write!(f, "F4"),
            GroupId::E6 => write!(f, "E6"),
            GroupId::E7 => write!(f, "E7"),
            GroupId::E8 => write!(f, "E8"),
        }
    }
}

impl FromStr for GroupId {
    type Err = Error;

    /// Accepts `sl(2)`, `sl2`, `SL(2)`, `sp(4)`, `G2`, `e8`, ...
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
        let unsupported = || Error::UnsupportedGroup(s.to_string());
        let exceptional = match t.as_str() {
            "g2" => Some(GroupId::G2),
            "f4" => Some(GroupId::F4),
            "e6" => Some(GroupId::E6),
            "e7" => Some(GroupId::E7),
            "e8" => Some(GroupId::E8),
            _ => None,
        };
        if let Some(g) = exceptional {
            return Ok(g);
        }
        let split = t.find(|c: char| c.is_ascii_digit() || c == '(').ok_or_else(unsupported)?;
        let (head, rest) = t.split_at(split);
        let num = rest.trim_start_matches('(').trim_end_matches(')');
        let r: usize = num.parse().map_err(|_| unsupported())?;
        let g = match head {
            "gl" => GroupId::Gl(r),
            "sl" => GroupId::Sl(r),
            "so" => GroupId::So(r),
            "sp" => GroupId::Sp(r),
            _ => return Err(unsupported()),
        };
        g.validate().map_err(|_| unsupported())
    }
}

impl Serialize for GroupId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupData {
    pub group_id: GroupId,
    pub dim_g: usize,
    pub rank: usize,
    pub dim_borel: usize,
    pub dim_torus: usize,
    /// `dim Z(g)`.
    pub dim_center_alg: usize,
    /// `dim Z(G)`; equal to `dim_center_alg` for connected reductive `G`.
    pub dim_center_grp: usize,
    pub degrees: Vec<usize>,
}

pub fn group_data(id: GroupId) -> Result<GroupData> {
    let id = id.validate()?;
    let (dim_g, degrees, center): (usize, Vec<usize>, usize) = match id {
        GroupId::Gl(r) => (r * r, (1..=r).collect(), 1),
        GroupId::Sl(r) => (r * r - 1, (2..=r).collect(), 0),
        GroupId::So(r) => {
            let k = r / 2;
            let mut d: Vec<usize> =
                if r % 2 == 1 { (1..=k).map(|i| 2 * i).collect() } else { (1..k).map(|i| 2 * i).collect() };
            if r % 2 == 0 {
                d.push(k);
            }
            (r * (r - 1) / 2, d, 0)
        }
        GroupId::Sp(n) => {
            let k = n / 2;
            (k * (2 * k + 1), (1..=k).map(|i| 2 * i).collect(), 0)
        }
        GroupId::G2 => (14, vec![2, 6], 0),
        GroupId::F4 => (52, vec![2, 6, 8, 12], 0),
        GroupId::E6 => (78, vec![2, 5, 6, 8, 9, 12], 0),
        GroupId::E7 => (133, vec![2, 6, 8, 10, 12, 14, 18], 0),
        GroupId::E8 => (248, vec![2, 8, 12, 14, 18, 20, 24, 30], 0),
    };
    let rank = degrees.len();
    let data = GroupData {
        group_id: id,
        dim_g,
        rank,
        dim_borel: (dim_g + rank) / 2,
        dim_torus: rank,
        dim_center_alg: center,
        dim_center_grp: center,
        degrees,
    };
    let sum: usize = data.degrees.iter().map(|d| 2 * d - 1).sum();
    if sum != data.dim_g || !(data.dim_g + data.rank).is_multiple_of(2) {
        return Err(Error::Internal(format!("degree table inconsistent for {id}")));
    }
    Ok(data)
}

fn unit(n: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    m[(i, j)] = Q::one();
    m
}

fn flatten(m: &Matrix) -> Vec<Q> {
    m.to_rows().concat()
}

fn unflatten(n: usize, v: &[Q]) -> Matrix {
    Matrix::from_rows(v.chunks(n).map(|c| c.to_vec()).collect())
}

pub fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    a.mul(b).sub(&b.mul(a))
}

pub fn trace(a: &Matrix) -> Q {
    (0..a.rows()).map(|i| a[(i, i)].clone()).sum()
}

/// `antidiag(1, ..., 1)`.
fn antidiag(n: usize) -> Matrix {
    let mut j = Matrix::zeros(n, n);
    for i in 0..n {
        j[(i, n - 1 - i)] = Q::one();
    }
    j
}

/// Gram matrix of the bilinear form preserved by `so`/`sp`.
pub fn preserved_form(id: GroupId) -> Option<Matrix> {
    match id {
        GroupId::So(n) => Some(antidiag(n)),
        GroupId::Sp(n) => {
            let k = n / 2;
            let mut w = Matrix::zeros(n, n);
            for i in 0..k {
                w[(i, n - 1 - i)] = Q::one();
                w[(k + i, k - 1 - i)] = -Q::one();
            }
            Some(w)
        }
        _ => None,
    }
}

/// A classical Lie algebra with a fixed ordered basis of its matrix model.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    id: GroupId,
    n: usize,
    basis: Vec<Matrix>,
    solver: ColumnSolver,
}

impl LieAlgebra {
    pub fn new(id: GroupId) -> Result<Self> {
        let id = id.validate()?;
        let n = id.matrix_size().ok_or_else(|| Error::NotEvaluable(id.to_string()))?;
        let basis = match id {
            GroupId::Gl(_) => (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| unit(n, i, j)).collect(),
            GroupId::Sl(_) => {
                let mut b = Vec::new();
                for i in 0..n {
                    for j in i + 1..n {
                        b.push(unit(n, i, j));
                    }
                }
                for i in 0..n {
                    for j in 0..i {
                        b.push(unit(n, i, j));
                    }
                }
                for i in 0..n - 1 {
                    b.push(unit(n, i, i).sub(&unit(n, i + 1, i + 1)));
                }
                b
            }
            GroupId::So(_) | GroupId::Sp(_) => {
                // kernel of M -> M^T J + J M
                let j = preserved_form(id).unwrap();
                let mut cols = Vec::with_capacity(n * n);
                for a in 0..n {
                    for b in 0..n {
                        let e = unit(n, a, b);
                        cols.push(flatten(&e.transpose().mul(&j).add(&j.mul(&e))));
                    }
                }
                let map = Matrix::from_columns(n * n, &cols);
                map.kernel().iter().map(|v| unflatten(n, v)).collect()
            }
            _ => unreachable!(),
        };
        let flat: Vec<Vec<Q>> = basis.iter().map(flatten).collect();
        let solver = ColumnSolver::new(n * n, &flat).ok_or_else(|| Error::Internal("dependent basis".into()))?;
        let alg = LieAlgebra { id, n, basis, solver };
        if alg.dim() != group_data(id)?.dim_g {
            return Err(Error::Internal(format!("matrix model of {id} has wrong dimension")));
        }
        Ok(alg)
    }

    pub fn id(&self) -> GroupId {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Matrix size of the defining representation.
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        m.rows() == self.n && m.cols() == self.n && self.solver.contains(&flatten(m))
    }

    /// Coordinates in the fixed basis; `None` if `m` is not in the algebra.
    pub fn coords(&self, m: &Matrix) -> Option<Vec<Q>> {
        if m.rows() != self.n || m.cols() != self.n {
            return None;
        }
        self.solver.coords(&flatten(m))
    }

    pub fn element(&self, coords: &[Q]) -> Matrix {
        assert_eq!(coords.len(), self.dim());
        let mut m = Matrix::zeros(self.n, self.n);
        for (c, b) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                m = m.add(&b.scale(c));
            }
        }
        m
    }

    pub fn bracket(&self, a: &Matrix, b: &Matrix) -> Result<Matrix> {
        for m in [a, b] {
            if m.rows() != self.n || m.cols() != self.n {
                return Err(Error::Shape(format!("expected {0}x{0} matrices for {1}", self.n, self.id)));
            }
        }
        Ok(commutator(a, b))
    }

    /// Matrix of `ad x` on basis coordinates.
    pub fn ad(&self, x: &Matrix) -> Matrix {
        let cols: Vec<Vec<Q>> =
            self.basis.iter().map(|b| self.coords(&commutator(x, b)).expect("algebra closed under bracket")).collect();
        Matrix::from_columns(self.dim(), &cols)
    }

    /// Structure constants: `[b_a, b_b] = Σ_c s[a][b][c] b_c`.
    pub fn structure_constants(&self) -> Vec<Vec<Vec<Q>>> {
        self.basis
            .iter()
            .map(|a| self.basis.iter().map(|b| self.coords(&commutator(a, b)).unwrap()).collect())
            .collect()
    }

    fn subspace_with(&self, pred: impl Fn(usize, usize) -> bool) -> Vec<Matrix> {
        let n = self.n;
        let mut sub = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if pred(i, j) {
                    sub.push(flatten(&unit(n, i, j)));
                }
            }
        }
        let alg: Vec<Vec<Q>> = self.basis.iter().map(flatten).collect();
        intersect(n * n, &alg, &sub).iter().map(|v| unflatten(n, v)).collect()
    }

    /// Diagonal matrices in the algebra (a Cartan subalgebra).
    pub fn torus_basis(&self) -> Vec<Matrix> {
        self.subspace_with(|i, j| i == j)
    }

    /// Upper-triangular matrices in the algebra (a Borel subalgebra).
    pub fn borel_basis(&self) -> Vec<Matrix> {
        self.subspace_with(|i, j| i <= j)
    }

    pub fn center_basis(&self) -> Vec<Matrix> {
        let d = self.dim();
        let mut rows = Vec::new();
        for b in &self.basis {
            rows.extend(self.ad(b).to_rows());
        }
        let stacked = Matrix::from_rows(rows);
        if d == 0 {
            return Vec::new();
        }
        stacked.kernel().iter().map(|v| self.element(v)).collect()
    }

    /// Rank of a family of matrices (as vectors).
    pub fn span_dim(&self, ms: &[Matrix]) -> usize {
        rank_of(self.n * self.n, &ms.iter().map(flatten).collect::<Vec<_>>())
    }

    /// Basis of `span(a) ∩ span(b)`.
    pub fn intersect(&self, a: &[Matrix], b: &[Matrix]) -> Vec<Matrix> {
        let fa: Vec<Vec<Q>> = a.iter().map(flatten).collect();
        let fb: Vec<Vec<Q>> = b.iter().map(flatten).collect();
        intersect(self.n * self.n, &fa, &fb).iter().map(|v| unflatten(self.n, v)).collect()
    }
}

/// An element of a classical algebra, tagged with its group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    pub group: GroupId,
    pub mat: Matrix,
}

impl AlgebraElement {
    pub fn new(alg: &LieAlgebra, mat: Matrix) -> Result<Self> {
        if !alg.contains(&mat) {
            return invalid(format!("matrix is not an element of {}", alg.id()));
        }
        Ok(AlgebraElement { group: alg.id(), mat })
    }

    pub fn bracket(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        if self.group != other.group {
            return Err(Error::Shape(format!("bracket of {} with {}", self.group, other.group)));
        }
        if self.mat.rows() != other.mat.rows() {
            return Err(Error::Shape("matrix sizes differ".into()));
        }
        Ok(AlgebraElement { group: self.group, mat: commutator(&self.mat, &other.mat) })
    }
}

/// Nondegenerate symmetric ad-invariant form on a classical algebra.
#[derive(Clone, Debug)]
pub struct InvariantForm {
    group: GroupId,
    kind: FormKind,
}

#[derive(Clone, Debug)]
enum FormKind {
    /// `tr(ab)`, with the center of `gl(r)` rescaled: `tr(ab) + (s-1) tr(a) tr(b) / r`.
    Trace { center_scale: Q },
    /// Arbitrary bilinear form given by a Gram matrix on basis coordinates.
    Gram { alg: Box<LieAlgebra>, gram: Matrix },
}

impl InvariantForm {
    pub fn trace(group: GroupId) -> Self {
        InvariantForm { group, kind: FormKind::Trace { center_scale: Q::one() } }
    }

    /// Trace form with the `gl(r)` center summand scaled by `s != 0`.
    pub fn trace_with_center_scale(group: GroupId, s: Q) -> Result<Self> {
        if s.is_zero() {
            return invalid("center scale must be nonzero");
        }
        Ok(InvariantForm { group, kind: FormKind::Trace { center_scale: s } })
    }

    /// A bilinear form given by its Gram matrix in the algebra basis. Not
    /// necessarily invariant; used for negative controls.
    pub fn from_gram(alg: &LieAlgebra, gram: Matrix) -> Result<Self> {
        if gram.rows() != alg.dim() || gram.cols() != alg.dim() {
            return Err(Error::Shape("Gram matrix does not match algebra dimension".into()));
        }
        Ok(InvariantForm { group: alg.id(), kind: FormKind::Gram { alg: Box::new(alg.clone()), gram } })
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    /// Whether the form is defined on all of `gl` (trace type), so that it can
    /// pair an arbitrary matrix against an algebra element.
    pub fn is_trace_type(&self) -> bool {
        matches!(self.kind, FormKind::Trace { .. })
    }

    pub fn eval(&self, a: &Matrix, b: &Matrix) -> Q {
        match &self.kind {
            FormKind::Trace { center_scale } => {
                let mut v = trace(&a.mul(b));
                if let GroupId::Gl(r) = self.group {
                    if !center_scale.is_one() {
                        v += (center_scale - Q::one()) * trace(a) * trace(b) / q(r as i64);
                    }
                }
                v
            }
            FormKind::Gram { alg, gram } => {
                let ca = alg.coords(a).expect("element of the algebra");
                let cb = alg.coords(b).expect("element of the algebra");
                crate::linalg::dot(&ca, &gram.mul_vec(&cb))
            }
        }
    }

    pub fn gram(&self, alg: &LieAlgebra) -> Matrix {
        let b = alg.basis();
        Matrix::from_rows(b.iter().map(|x| b.iter().map(|y| self.eval(x, y)).collect()).collect())
    }

    pub fn is_nondegenerate(&self, alg: &LieAlgebra) -> bool {
        self.gram(alg).rank() == alg.dim()
    }
}

/// `σ([a, c], b) + σ(c, [a, b])`; zero for an invariant form.
pub fn check_invariance(form: &InvariantForm, a: &Matrix, b: &Matrix, c: &Matrix) -> Q {
    form.eval(&commutator(a, c), b) + form.eval(c, &commutator(a, b))
}

/// Basis of `{v : σ(v, h) = 0 for all h in span(basis)}`.
pub fn perp_subspace(alg: &LieAlgebra, form: &InvariantForm, basis: &[Matrix]) -> Result<Vec<Matrix>> {
    if alg.span_dim(basis) != basis.len() {
        return invalid("subalgebra basis is linearly dependent");
    }
    if basis.is_empty() {
        return Ok(alg.basis().to_vec());
    }
    let rows: Vec<Vec<Q>> = basis.iter().map(|h| alg.basis().iter().map(|b| form.eval(h, b)).collect()).collect();
    let k = Matrix::from_rows(rows).kernel();
    Ok(k.iter().map(|v| alg.element(v)).collect())
}

/// Invariant polynomials `p_1..p_r` evaluated on a matrix with entries in any ring.
///
/// `gl`: `e_1..e_r`; `sl`: `e_2..e_r`; `sp`, odd `so`: `e_2, e_4, ...`;
/// `so(2k)`: `e_2, ..., e_{2k-2}` and `Pf(J M)`. Here `e_k` are the
/// characteristic-polynomial coefficients, `det(λ - M) = Σ (-1)^k e_k λ^{r-k}`.
pub fn invariant_polynomials_generic<R: Ring>(id: GroupId, m: &[Vec<R>]) -> Result<Vec<R>> {
    if !id.is_classical() {
        return Err(Error::NotEvaluable(id.to_string()));
    }
    let n = id.matrix_size().unwrap();
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("expected a {n}x{n} matrix for {id}")));
    }
    let e = elementary_invariants(m);
    Ok(match id {
        GroupId::Gl(_) => e,
        GroupId::Sl(_) => e[1..].to_vec(),
        GroupId::Sp(_) => e.iter().skip(1).step_by(2).cloned().collect(),
        GroupId::So(_) if n % 2 == 1 => e.iter().skip(1).step_by(2).cloned().collect(),
        GroupId::So(_) => {
            let k = n / 2;
            let mut out: Vec<R> = e.iter().skip(1).step_by(2).take(k - 1).cloned().collect();
            // J M with J = antidiag(1..1): row i of J M is row n-1-i of M
            let jm: Vec<Vec<R>> = (0..n).map(|i| m[n - 1 - i].clone()).collect();
            out.push(pfaffian(&jm));
            out
        }
        _ => unreachable!(),
    })
}

pub fn invariant_polynomials(id: GroupId, m: &Matrix) -> Result<Vec<Q>> {
    invariant_polynomials_generic(id, &m.to_rows())
}

/// Which subalgebra frames a marked point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FramingKind {
    /// `h = 0`, i.e. framing by the trivial subgroup.
    Trivial,
    /// `h` = the diagonal Cartan subalgebra.
    Torus,
    Custom(Vec<Matrix>),
}

/// Framing data at one marked point.
#[derive(Clone, Debug)]
pub struct Framing {
    pub kind: FramingKind,
    pub h_basis: Vec<Matrix>,
    pub perp_basis: Vec<Matrix>,
    /// `dim(h ∩ t)` for the diagonal torus `t`.
    pub dim_t: usize,
    /// `dim Z_{H_x}(G)`, dimension-only input.
    pub dim_z_hx: Option<usize>,
}

impl Framing {
    pub fn new(alg: &LieAlgebra, form: &InvariantForm, kind: FramingKind) -> Result<Self> {
        let h_basis = match &kind {
            FramingKind::Trivial => Vec::new(),
            FramingKind::Torus => alg.torus_basis(),
            FramingKind::Custom(b) => b.clone(),
        };
        for h in &h_basis {
            if !alg.contains(h) {
                return invalid(format!("framing basis element is not in {}", alg.id()));
            }
        }
        if alg.span_dim(&h_basis) != h_basis.len() {
            return invalid("framing basis is linearly dependent");
        }
        if h_basis.len() >= alg.dim() {
            return invalid("framing subalgebra must be proper (h_x = g is not allowed)");
        }
        let hv = alg.span_dim(&h_basis);
        for a in &h_basis {
            for b in &h_basis {
                let mut ext = h_basis.clone();
                ext.push(commutator(a, b));
                if alg.span_dim(&ext) != hv {
                    return invalid("framing subspace is not closed under the bracket");
                }
            }
        }
        let perp_basis = perp_subspace(alg, form, &h_basis)?;
        if perp_basis.len() + h_basis.len() != alg.dim() {
            return Err(Error::Internal("dim h + dim h^perp != dim g".into()));
        }
        let dim_t = alg.intersect(&h_basis, &alg.torus_basis()).len();
        let f = Framing { kind, h_basis, perp_basis, dim_t, dim_z_hx: None };
        if !f.bracket_containment_holds(alg) {
            return Err(Error::Internal("[h, h^perp] is not contained in h^perp".into()));
        }
        Ok(f)
    }

    pub fn dim_h(&self) -> usize {
        self.h_basis.len()
    }

    /// `[h, h⊥] ⊆ h⊥`, checked on basis pairs by exact membership.
    pub fn bracket_containment_holds(&self, alg: &LieAlgebra) -> bool {
        let pv = alg.span_dim(&self.perp_basis);
        self.h_basis.iter().all(|h| {
            self.perp_basis.iter().all(|p| {
                let mut ext = self.perp_basis.clone();
                ext.push(commutator(h, p));
                alg.span_dim(&ext) == pv
            })
        })
    }

    /// Whether `m` lies in `h⊥`.
    pub fn perp_contains(&self, alg: &LieAlgebra, m: &Matrix) -> bool {
        let mut ext = self.perp_basis.clone();
        ext.push(m.clone());
        alg.span_dim(&ext) == self.perp_basis.len()
    }
}

/// Framings at all marked points, plus the global `dim Z_h` input.
#[derive(Clone, Debug)]
pub struct FramingSpec {
    pub points: Vec<Framing>,
    pub dim_z_h: Option<usize>,
}

impl FramingSpec {
    pub fn uniform(alg: &LieAlgebra, form: &InvariantForm, kind: FramingKind, n: usize) -> Result<Self> {
        let f = Framing::new(alg, form, kind)?;
        Ok(FramingSpec { points: vec![f; n], dim_z_h: None })
    }

    pub fn dims_h(&self) -> Vec<usize> {
        self.points.iter().map(|f| f.dim_h()).collect()
    }
}
