//! The rational curve with marked points, vector-valued rational sections,
//! and sheaf cohomology by Laurent-tail linear algebra.
//!
//! Sections are stored through their `dz`-coefficient: a 1-form `f(z) dz` is
//! the function `f`. Local orders at a finite point `x` use `t = z - x`; at
//! infinity they use `w = 1/z` applied to `f` itself, so `dz` contributes no
//! order shift in the stored data and the residue at infinity is `-[w^1] f`.
//!
//! A sheaf `F` is cut out of the trivial bundle `Q^d` by a lattice at each chart
//! point `p`: `{ord_p >= -m_p, coefficient of order -m_p in V_p}`. Its
//! cohomology is read off from an ambient `B = Q^d(Σ b_p p)` with all `b_p >= 0`,
//! where `H¹(B) = 0`, so `RΓ(F) = [H⁰(B) -> ⊕_p B_p / F_p]`.

use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::exact::{binom, Q};
use crate::linalg::{dot, Matrix, QuotientSpace, Subspace};
use crate::poly::inverse_power_series;

/// Default number of extra pole orders in the ambient bundle.
pub const DEFAULT_PAD: i64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChartPoint {
    /// Index into the marked points.
    Finite(usize),
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedCurve {
    genus: u32,
    points: Vec<Q>,
}

impl MarkedCurve {
    /// Marked points must be distinct, finite and nonzero; `n >= 1`.
    pub fn new(genus: u32, points: Vec<Q>) -> Result<Self> {
        if points.is_empty() {
            return invalid("the divisor D must be nonempty (n >= 1)");
        }
        if points.iter().any(|p| p.is_zero()) {
            return invalid("marked points must be nonzero (0 is reserved)");
        }
        for i in 0..points.len() {
            for j in 0..i {
                if points[i] == points[j] {
                    return invalid(format!("marked point {} is repeated", points[i]));
                }
            }
        }
        Ok(MarkedCurve { genus, points })
    }

    pub fn rational(points: Vec<Q>) -> Result<Self> {
        MarkedCurve::new(0, points)
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Q] {
        &self.points
    }

    /// Marked points in order, then infinity.
    pub fn chart_points(&self) -> Vec<ChartPoint> {
        let mut v: Vec<ChartPoint> = (0..self.n()).map(ChartPoint::Finite).collect();
        v.push(ChartPoint::Infinity);
        v
    }

    /// Position of a chart point in `chart_points()`.
    pub fn slot(&self, p: ChartPoint) -> usize {
        match p {
            ChartPoint::Finite(i) => i,
            ChartPoint::Infinity => self.n(),
        }
    }

    fn require_rational(&self) -> Result<()> {
        if self.genus != 0 {
            return Err(Error::Precondition(format!(
                "explicit cohomology is implemented on the rational curve only (genus {} given)",
                self.genus
            )));
        }
        Ok(())
    }
}

/// Truncated scalar Laurent series `Σ coeffs[j] t^(low + j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Laurent {
    pub low: i64,
    pub coeffs: Vec<Q>,
}

impl Laurent {
    pub fn coeff(&self, order: i64) -> Q {
        let j = order - self.low;
        if j < 0 {
            return Q::zero();
        }
        self.coeffs.get(j as usize).cloned().unwrap_or_else(Q::zero)
    }

    /// Highest order stored.
    pub fn high(&self) -> i64 {
        self.low + self.coeffs.len() as i64 - 1
    }
}

/// Rational function with poles only at marked points and infinity:
/// `Σ_k poly[k] z^k + Σ_i Σ_k parts[i][k-1] / (z - x_i)^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFraction {
    pub poly: Vec<Q>,
    pub parts: Vec<Vec<Q>>,
}

fn trim(v: &mut Vec<Q>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

impl PartialFraction {
    pub fn zero(n: usize) -> Self {
        PartialFraction { poly: Vec::new(), parts: vec![Vec::new(); n] }
    }

    pub fn monomial(n: usize, k: usize) -> Self {
        let mut f = PartialFraction::zero(n);
        f.poly = vec![Q::zero(); k + 1];
        f.poly[k] = Q::one();
        f
    }

    /// `1 / (z - x_i)^k`, `k >= 1`.
    pub fn pole(n: usize, i: usize, k: usize) -> Self {
        assert!(k >= 1);
        let mut f = PartialFraction::zero(n);
        f.parts[i] = vec![Q::zero(); k];
        f.parts[i][k - 1] = Q::one();
        f
    }

    pub fn is_zero(&self) -> bool {
        self.poly.iter().all(|c| c.is_zero()) && self.parts.iter().all(|p| p.iter().all(|c| c.is_zero()))
    }

    fn normalized(mut self) -> Self {
        trim(&mut self.poly);
        for p in &mut self.parts {
            trim(p);
        }
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        let add = |a: &[Q], b: &[Q]| -> Vec<Q> {
            (0..a.len().max(b.len()))
                .map(|k| a.get(k).cloned().unwrap_or_else(Q::zero) + b.get(k).cloned().unwrap_or_else(Q::zero))
                .collect()
        };
        PartialFraction {
            poly: add(&self.poly, &other.poly),
            parts: self.parts.iter().zip(&other.parts).map(|(a, b)| add(a, b)).collect(),
        }
        .normalized()
    }

    pub fn scale(&self, c: &Q) -> Self {
        PartialFraction {
            poly: self.poly.iter().map(|x| x * c).collect(),
            parts: self.parts.iter().map(|p| p.iter().map(|x| x * c).collect()).collect(),
        }
        .normalized()
    }

    /// Pole order at a chart point (0 if regular there; at infinity the degree
    /// of the polynomial part).
    pub fn pole_order(&self, p: ChartPoint) -> i64 {
        match p {
            ChartPoint::Finite(i) => self.parts[i].iter().rposition(|c| !c.is_zero()).map_or(0, |k| k as i64 + 1),
            ChartPoint::Infinity => self.poly.iter().rposition(|c| !c.is_zero()).map_or(0, |k| k as i64),
        }
    }

    /// Laurent expansion at `p` through order `max_order` inclusive.
    pub fn expand(&self, curve: &MarkedCurve, p: ChartPoint, max_order: i64) -> Laurent {
        let low = -self.pole_order(p);
        let len = (max_order - low + 1).max(0) as usize;
        let mut coeffs = vec![Q::zero(); len];
        let mut put = |order: i64, v: Q| {
            if order <= max_order && order >= low && !v.is_zero() {
                coeffs[(order - low) as usize] += v;
            }
        };
        match p {
            ChartPoint::Finite(j) => {
                let x = &curve.points[j];
                // z^k = (t + x)^k
                for (k, c) in self.poly.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    for m in 0..=k {
                        let v = c * binom(k as i64, m as i64) * num_traits::pow(x.clone(), k - m);
                        put(m as i64, v);
                    }
                }
                for (i, part) in self.parts.iter().enumerate() {
                    for (km1, c) in part.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        let k = km1 as i64 + 1;
                        if i == j {
                            put(-k, c.clone());
                        } else if max_order >= 0 {
                            let shift = x - &curve.points[i];
                            let s = inverse_power_series(&shift, k, max_order as usize + 1);
                            for (m, v) in s.into_iter().enumerate() {
                                put(m as i64, c * v);
                            }
                        }
                    }
                }
            }
            ChartPoint::Infinity => {
                for (k, c) in self.poly.iter().enumerate() {
                    put(-(k as i64), c.clone());
                }
                // 1/(z - x)^k = Σ_m C(k+m-1, m) x^m w^(k+m)
                for (i, part) in self.parts.iter().enumerate() {
                    let x = &curve.points[i];
                    for (km1, c) in part.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        let k = km1 as i64 + 1;
                        let mut m = 0;
                        while k + m <= max_order {
                            let v = c * binom(k + m - 1, m) * num_traits::pow(x.clone(), m as usize);
                            put(k + m, v);
                            m += 1;
                        }
                    }
                }
            }
        }
        Laurent { low, coeffs }
    }

    pub fn mul(&self, other: &Self, curve: &MarkedCurve) -> Self {
        let n = curve.n();
        let mut out = PartialFraction::zero(n);
        for j in 0..n {
            let p = ChartPoint::Finite(j);
            let (pa, pb) = (self.pole_order(p), other.pole_order(p));
            if pa + pb == 0 {
                continue;
            }
            let a = self.expand(curve, p, pb - 1);
            let b = other.expand(curve, p, pa - 1);
            let mut part = vec![Q::zero(); (pa + pb) as usize];
            for k in 1..=pa + pb {
                part[(k - 1) as usize] = series_product_coeff(&a, &b, -k);
            }
            out.parts[j] = part;
        }
        let p = ChartPoint::Infinity;
        let (da, db) = (self.pole_order(p), other.pole_order(p));
        let a = self.expand(curve, p, db);
        let b = other.expand(curve, p, da);
        out.poly = (0..=da + db).map(|k| series_product_coeff(&a, &b, -k)).collect();
        out.normalized()
    }

    /// Residue of the 1-form `f dz` at `p`.
    pub fn residue(&self, p: ChartPoint) -> Q {
        match p {
            ChartPoint::Finite(i) => self.parts[i].first().cloned().unwrap_or_else(Q::zero),
            // -[w^1] f; only the simple-pole terms reach order 1
            ChartPoint::Infinity => -self.parts.iter().filter_map(|p| p.first()).sum::<Q>(),
        }
    }

    /// Exact value at a finite non-marked point.
    pub fn eval(&self, curve: &MarkedCurve, z: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.poly.iter().rev() {
            acc = acc * z + c;
        }
        for (i, part) in self.parts.iter().enumerate() {
            let inv = Q::one() / (z - &curve.points[i]);
            for (km1, c) in part.iter().enumerate() {
                acc += c * num_traits::pow(inv.clone(), km1 + 1);
            }
        }
        acc
    }
}

/// Coefficient of `t^order` in `a * b`, assuming both are known far enough.
fn series_product_coeff(a: &Laurent, b: &Laurent, order: i64) -> Q {
    let mut acc = Q::zero();
    for (j, x) in a.coeffs.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let oa = a.low + j as i64;
        let y = b.coeff(order - oa);
        if !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// Vector-valued truncated Laurent series, `coeffs[j] ∈ Q^d` at order `low + j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VLaurent {
    pub dim: usize,
    pub low: i64,
    pub coeffs: Vec<Vec<Q>>,
}

impl VLaurent {
    pub fn zero(dim: usize, low: i64, high: i64) -> Self {
        let len = (high - low + 1).max(0) as usize;
        VLaurent { dim, low, coeffs: vec![vec![Q::zero(); dim]; len] }
    }

    pub fn coeff(&self, order: i64) -> Vec<Q> {
        let j = order - self.low;
        if j < 0 || j as usize >= self.coeffs.len() {
            return vec![Q::zero(); self.dim];
        }
        self.coeffs[j as usize].clone()
    }

    pub fn high(&self) -> i64 {
        self.low + self.coeffs.len() as i64 - 1
    }
}

/// Vector-valued section: one partial fraction per fiber coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub comps: Vec<PartialFraction>,
}

impl Section {
    pub fn zero(n: usize, d: usize) -> Self {
        Section { comps: vec![PartialFraction::zero(n); d] }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn expand(&self, curve: &MarkedCurve, p: ChartPoint, max_order: i64) -> VLaurent {
        let d = self.comps.len();
        let ex: Vec<Laurent> = self.comps.iter().map(|c| c.expand(curve, p, max_order)).collect();
        let low = ex.iter().map(|l| l.low).min().unwrap_or(0);
        let mut v = VLaurent::zero(d, low, max_order);
        for (a, l) in ex.iter().enumerate() {
            for o in low..=max_order {
                v.coeffs[(o - low) as usize][a] = l.coeff(o);
            }
        }
        v
    }

    pub fn pole_order(&self, p: ChartPoint) -> i64 {
        self.comps.iter().map(|c| c.pole_order(p)).max().unwrap_or(0)
    }
}

/// Residue at `p` of the pairing `σ(a, b)` of two vector-valued series, where
/// `σ` has Gram matrix `gram` and the product is read as a 1-form.
pub fn pair_residue(p: ChartPoint, a: &VLaurent, b: &VLaurent, gram: &Matrix) -> Q {
    let mut acc = Q::zero();
    for (j, x) in a.coeffs.iter().enumerate() {
        if x.iter().all(|c| c.is_zero()) {
            continue;
        }
        let o = a.low + j as i64;
        let partner = match p {
            ChartPoint::Finite(_) => -1 - o,
            ChartPoint::Infinity => 1 - o,
        };
        let y = b.coeff(partner);
        acc += dot(x, &gram.mul_vec(&y));
    }
    match p {
        ChartPoint::Finite(_) => acc,
        ChartPoint::Infinity => -acc,
    }
}

/// Lattice condition at one chart point: order `>= -bound`, and the coefficient
/// of order `-bound` lies in `leading`.
#[derive(Clone, Debug)]
pub struct LocalCondition {
    pub bound: i64,
    pub leading: Subspace,
}

impl LocalCondition {
    pub fn full(d: usize, bound: i64) -> Self {
        LocalCondition { bound, leading: Subspace::full(d) }
    }

    /// `V = 0` is the same lattice as `(bound - 1, full)`.
    fn normalized(self) -> Self {
        if self.leading.dim() == 0 && self.leading.ambient() > 0 {
            LocalCondition::full(self.leading.ambient(), self.bound - 1)
        } else {
            self
        }
    }

    /// `Σ (d - dim V)` correction included: contribution to the degree.
    pub fn degree(&self) -> i64 {
        let d = self.leading.ambient() as i64;
        self.bound * d - (d - self.leading.dim() as i64)
    }
}

/// A subsheaf of the trivial bundle `Q^d` on the marked rational curve.
#[derive(Clone, Debug)]
pub struct SheafSpec {
    fiber_dim: usize,
    /// One condition per chart point, infinity last.
    local: Vec<LocalCondition>,
}

impl SheafSpec {
    pub fn new(fiber_dim: usize, local: Vec<LocalCondition>) -> Result<Self> {
        for c in &local {
            if c.leading.ambient() != fiber_dim {
                return Err(Error::Shape("constraint subspace does not live in the fiber".into()));
            }
        }
        if local.len() < 2 {
            return invalid("need conditions at the marked points and at infinity");
        }
        Ok(SheafSpec { fiber_dim, local: local.into_iter().map(LocalCondition::normalized).collect() })
    }

    /// `Q^d ⊗ O(Σ m x_i + m_inf ∞)`.
    pub fn uniform(curve: &MarkedCurve, d: usize, m: i64, m_inf: i64) -> Self {
        let mut local: Vec<LocalCondition> = (0..curve.n()).map(|_| LocalCondition::full(d, m)).collect();
        local.push(LocalCondition::full(d, m_inf));
        SheafSpec::new(d, local).expect("well-formed")
    }

    /// Replaces the condition at `p`.
    pub fn with_condition(mut self, curve: &MarkedCurve, p: ChartPoint, cond: LocalCondition) -> Result<Self> {
        if cond.leading.ambient() != self.fiber_dim {
            return Err(Error::Shape("constraint subspace does not live in the fiber".into()));
        }
        self.local[curve.slot(p)] = cond.normalized();
        Ok(self)
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn local(&self) -> &[LocalCondition] {
        &self.local
    }

    pub fn condition(&self, curve: &MarkedCurve, p: ChartPoint) -> &LocalCondition {
        &self.local[curve.slot(p)]
    }

    pub fn degree(&self) -> i64 {
        self.local.iter().map(|c| c.degree()).sum()
    }

    /// Riemann–Roch on the rational curve: `deg + d`.
    pub fn euler_characteristic(&self) -> i64 {
        self.degree() + self.fiber_dim as i64
    }

    /// The dual `F^∨ ⊗ K` through the fiber pairing `gram`: at finite points
    /// `(m, V) -> (1 - m, V⊥)`, at infinity `(m, V) -> (-1 - m, V⊥)`.
    pub fn serre_dual(&self, gram: &Matrix) -> SheafSpec {
        let n = self.local.len() - 1;
        let local = self
            .local
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let perp = perp_in_fiber(&c.leading, gram);
                let bound = if k < n { 1 - c.bound } else { -1 - c.bound };
                LocalCondition { bound, leading: perp }
            })
            .collect();
        SheafSpec::new(self.fiber_dim, local).expect("dual is well-formed")
    }

    /// Lattice inclusion `self ⊆ other`, pointwise.
    pub fn is_subsheaf_of(&self, other: &SheafSpec) -> bool {
        self.local.iter().zip(&other.local).all(|(a, b)| {
            if a.bound < b.bound {
                true
            } else if a.bound > b.bound {
                false
            } else {
                a.leading.basis().iter().all(|v| b.leading.contains(v))
            }
        })
    }
}

/// `V⊥ = {w : σ(v, w) = 0 for v in V}` inside `Q^d`.
pub fn perp_in_fiber(v: &Subspace, gram: &Matrix) -> Subspace {
    let d = v.ambient();
    if v.dim() == 0 {
        return Subspace::full(d);
    }
    let rows: Vec<Vec<Q>> = v.basis().iter().map(|b| gram.transpose().mul_vec(b)).collect();
    Subspace::new(d, &Matrix::from_rows(rows).kernel())
}

/// The ambient bundle `Q^d(Σ b_p p)`, `b_p >= 0`, with its ordered basis of
/// global sections: `1/(z - x_i)^k` (point by point, `k = 1..b_i`), then
/// `z^k` (`k = 0..b_∞`), each tensored with the unit vectors of `Q^d`.
#[derive(Clone, Debug)]
pub struct Ambient {
    curve: MarkedCurve,
    d: usize,
    bounds: Vec<i64>,
    scalar: Vec<PartialFraction>,
}

impl Ambient {
    pub fn new(curve: &MarkedCurve, d: usize, bounds: Vec<i64>) -> Result<Self> {
        curve.require_rational()?;
        if bounds.len() != curve.n() + 1 || bounds.iter().any(|&b| b < 0) {
            return invalid("ambient bounds must be nonnegative, one per chart point");
        }
        let n = curve.n();
        let mut scalar = Vec::new();
        for (i, &b) in bounds[..n].iter().enumerate() {
            for k in 1..=b as usize {
                scalar.push(PartialFraction::pole(n, i, k));
            }
        }
        for k in 0..=bounds[n] as usize {
            scalar.push(PartialFraction::monomial(n, k));
        }
        Ok(Ambient { curve: curve.clone(), d, bounds, scalar })
    }

    /// Smallest ambient containing every spec, widened by `pad`.
    pub fn for_specs(curve: &MarkedCurve, specs: &[&SheafSpec], pad: i64) -> Result<Self> {
        let d = specs.first().map_or(0, |s| s.fiber_dim);
        let bounds =
            (0..=curve.n()).map(|k| specs.iter().map(|s| s.local[k].bound.max(0)).max().unwrap_or(0) + pad).collect();
        Ambient::new(curve, d, bounds)
    }

    pub fn curve(&self) -> &MarkedCurve {
        &self.curve
    }

    pub fn fiber_dim(&self) -> usize {
        self.d
    }

    pub fn bounds(&self) -> &[i64] {
        &self.bounds
    }

    pub fn bound(&self, p: ChartPoint) -> i64 {
        self.bounds[self.curve.slot(p)]
    }

    pub fn dim(&self) -> usize {
        self.scalar.len() * self.d
    }

    pub fn scalar_basis(&self) -> &[PartialFraction] {
        &self.scalar
    }

    /// Section with the given coordinates (index `s * d + a`).
    pub fn section(&self, coords: &[Q]) -> Section {
        let n = self.curve.n();
        let mut comps = vec![PartialFraction::zero(n); self.d];
        for (idx, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (s, a) = (idx / self.d, idx % self.d);
            comps[a] = comps[a].add(&self.scalar[s].scale(c));
        }
        Section { comps }
    }

    /// Coordinates of a section; fails if it has poles beyond the bounds.
    pub fn coords(&self, sec: &Section) -> Result<Vec<Q>> {
        let n = self.curve.n();
        let mut out = vec![Q::zero(); self.dim()];
        for (a, f) in sec.comps.iter().enumerate() {
            let mut s = 0;
            for i in 0..n {
                let b = self.bounds[i] as usize;
                if f.parts[i].len() > b {
                    return Err(Error::Internal(format!("pole at marked point {i} exceeds ambient bound")));
                }
                for (k, c) in f.parts[i].iter().enumerate() {
                    out[(s + k) * self.d + a] = c.clone();
                }
                s += b;
            }
            if f.poly.len() > self.bounds[n] as usize + 1 {
                return Err(Error::Internal("pole at infinity exceeds ambient bound".into()));
            }
            for (k, c) in f.poly.iter().enumerate() {
                out[(s + k) * self.d + a] = c.clone();
            }
        }
        Ok(out)
    }

    /// Expansions of every scalar basis function at `p` through `max_order`.
    pub fn scalar_expansions(&self, p: ChartPoint, max_order: i64) -> Vec<Laurent> {
        self.scalar.iter().map(|f| f.expand(&self.curve, p, max_order)).collect()
    }
}

/// Tail coordinates of `B_p / F_p` at one chart point: orders `low..lead-1` in
/// full, then the order `lead` coefficient modulo the leading subspace.
#[derive(Clone, Debug)]
pub struct PointTail {
    pub point: ChartPoint,
    pub low: i64,
    pub lead: i64,
    pub leading: Subspace,
    pub offset: usize,
}

impl PointTail {
    pub fn dim(&self) -> usize {
        let d = self.leading.ambient();
        (self.lead - self.low) as usize * d + self.leading.codim()
    }
}

/// `T = ⊕_p B_p / F_p` for a spec inside an ambient.
#[derive(Clone, Debug)]
pub struct TailSpace {
    d: usize,
    points: Vec<PointTail>,
    dim: usize,
}

impl TailSpace {
    pub fn new(ambient: &Ambient, spec: &SheafSpec) -> Result<Self> {
        if spec.fiber_dim != ambient.d {
            return Err(Error::Shape("spec and ambient fiber dimensions differ".into()));
        }
        let mut points = Vec::new();
        let mut offset = 0;
        for (k, p) in ambient.curve.chart_points().into_iter().enumerate() {
            let c = &spec.local[k];
            let b = ambient.bounds[k];
            if c.bound > b {
                return Err(Error::Internal("ambient does not contain the sheaf".into()));
            }
            let t = PointTail { point: p, low: -b, lead: -c.bound, leading: c.leading.clone(), offset };
            offset += t.dim();
            points.push(t);
        }
        Ok(TailSpace { d: ambient.d, points, dim: offset })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[PointTail] {
        &self.points
    }

    pub fn at(&self, curve: &MarkedCurve, p: ChartPoint) -> &PointTail {
        &self.points[curve.slot(p)]
    }

    /// Tail coordinates of a local series at one point (written into `out`).
    pub fn write_coords(&self, pt: &PointTail, series: &VLaurent, out: &mut [Q]) {
        let mut k = pt.offset;
        for o in pt.low..pt.lead {
            for x in series.coeff(o) {
                out[k] = x;
                k += 1;
            }
        }
        for x in pt.leading.quotient_coords(&series.coeff(pt.lead)) {
            out[k] = x;
            k += 1;
        }
    }

    /// A local series (orders `low..=lead`) representing the given tail
    /// coordinates at one point.
    pub fn lift(&self, pt: &PointTail, coords: &[Q]) -> VLaurent {
        let mut v = VLaurent::zero(self.d, pt.low, pt.lead);
        let mut k = pt.offset;
        for o in pt.low..pt.lead {
            for a in 0..self.d {
                v.coeffs[(o - pt.low) as usize][a] = coords[k].clone();
                k += 1;
            }
        }
        let top = (pt.lead - pt.low) as usize;
        for c in pt.leading.complement() {
            let x = &coords[k];
            if !x.is_zero() {
                for (y, ca) in v.coeffs[top].iter_mut().zip(c) {
                    *y += x * ca;
                }
            }
            k += 1;
        }
        v
    }

    /// Tail coordinates of a global section.
    pub fn section_tail(&self, curve: &MarkedCurve, sec: &Section) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim];
        for pt in &self.points {
            let ex = sec.expand(curve, pt.point, pt.lead);
            self.write_coords(pt, &ex, &mut out);
        }
        out
    }

    /// Matrix of `H⁰(B) -> T`.
    pub fn tail_matrix(&self, ambient: &Ambient) -> Matrix {
        let mut m = Matrix::zeros(self.dim, ambient.dim());
        for pt in &self.points {
            let ex = ambient.scalar_expansions(pt.point, pt.lead);
            for (s, l) in ex.iter().enumerate() {
                for a in 0..self.d {
                    let mut series = VLaurent::zero(self.d, l.low, l.high());
                    for (j, c) in l.coeffs.iter().enumerate() {
                        series.coeffs[j][a] = c.clone();
                    }
                    let mut col = vec![Q::zero(); self.dim];
                    self.write_coords(pt, &series, &mut col);
                    for (r, v) in col.into_iter().enumerate() {
                        if !v.is_zero() {
                            m[(r, s * self.d + a)] = v;
                        }
                    }
                }
            }
        }
        m
    }
}

/// Explicit `H⁰` and `H¹` of a sheaf.
#[derive(Clone, Debug)]
pub struct SheafCohomology {
    pub ambient: Ambient,
    pub tail: TailSpace,
    pub tail_matrix: Matrix,
    /// Ambient coordinates of an `H⁰` basis.
    pub h0: Vec<Vec<Q>>,
    /// `T` modulo tails of global sections of `B`.
    pub h1: QuotientSpace,
}

impl SheafCohomology {
    pub fn compute(curve: &MarkedCurve, spec: &SheafSpec, pad: i64) -> Result<Self> {
        let ambient = Ambient::for_specs(curve, &[spec], pad)?;
        SheafCohomology::in_ambient(ambient, spec)
    }

    pub fn in_ambient(ambient: Ambient, spec: &SheafSpec) -> Result<Self> {
        let tail = TailSpace::new(&ambient, spec)?;
        let tail_matrix = tail.tail_matrix(&ambient);
        let h0 = tail_matrix.kernel();
        let unit: Vec<Vec<Q>> = (0..tail.dim())
            .map(|i| {
                let mut e = vec![Q::zero(); tail.dim()];
                e[i] = Q::one();
                e
            })
            .collect();
        let h1 = QuotientSpace::new(tail.dim(), &unit, &tail_matrix.columns(), &[]);
        Ok(SheafCohomology { ambient, tail, tail_matrix, h0, h1 })
    }

    pub fn h0_dim(&self) -> usize {
        self.h0.len()
    }

    pub fn h1_dim(&self) -> usize {
        self.h1.dim()
    }

    pub fn h0_sections(&self) -> Vec<Section> {
        self.h0.iter().map(|c| self.ambient.section(c)).collect()
    }

    /// Whether a tail vector is the tail of a global section of `B`.
    pub fn is_coboundary(&self, t: &[Q]) -> bool {
        self.h1.is_boundary(t)
    }
}

pub fn global_sections(curve: &MarkedCurve, spec: &SheafSpec) -> Result<Vec<Section>> {
    Ok(SheafCohomology::compute(curve, spec, DEFAULT_PAD)?.h0_sections())
}

/// Residue pairing of a tail class of `F` with a global section of the dual:
/// `Σ_p res_p σ(t_p, ω)`.
pub fn serre_pairing(coh: &SheafCohomology, t: &[Q], omega: &Section, gram: &Matrix) -> Result<Q> {
    if t.len() != coh.tail.dim() || omega.comps.len() != coh.tail.d {
        return Err(Error::Shape("incompatible tail class and dual section".into()));
    }
    let curve = coh.ambient.curve();
    let mut acc = Q::zero();
    for pt in coh.tail.points() {
        let lifted = coh.tail.lift(pt, t);
        let max = match pt.point {
            ChartPoint::Finite(_) => -1 - pt.low,
            ChartPoint::Infinity => 1 - pt.low,
        };
        let ex = omega.expand(curve, pt.point, max);
        acc += pair_residue(pt.point, &lifted, &ex, gram);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qr};

    fn curve(pts: &[i64]) -> MarkedCurve {
        MarkedCurve::rational(pts.iter().map(|&x| q(x)).collect()).unwrap()
    }

    #[test]
    fn residues_of_rational_function() {
        let c = curve(&[1, 2]);
        let f = PartialFraction::monomial(2, 1)
            .mul(&PartialFraction::pole(2, 0, 1), &c)
            .mul(&PartialFraction::pole(2, 1, 1), &c);
        let r: Vec<Q> = c.chart_points().into_iter().map(|p| f.residue(p)).collect();
        assert_eq!(r, vec![q(-1), q(2), q(-1)]);
        assert_eq!(f.eval(&c, &q(3)), qr(3, 2));
    }

    #[test]
    fn simple_pole_residues() {
        let f = PartialFraction::pole(1, 0, 1);
        assert_eq!(f.residue(ChartPoint::Finite(0)), q(1));
        assert_eq!(f.residue(ChartPoint::Infinity), q(-1));
    }

    #[test]
    fn product_matches_pointwise_evaluation() {
        let c = curve(&[1, -2, 3]);
        let a = PartialFraction::pole(3, 0, 2).add(&PartialFraction::monomial(3, 2).scale(&q(3)));
        let b = PartialFraction::pole(3, 1, 1).add(&PartialFraction::pole(3, 0, 1).scale(&qr(1, 2)));
        let p = a.mul(&b, &c);
        for z in [q(7), qr(1, 3), q(-5)] {
            assert_eq!(p.eval(&c, &z), a.eval(&c, &z) * b.eval(&c, &z));
        }
    }

    #[test]
    fn k_of_d_has_residue_sum_zero_basis() {
        let c = curve(&[1, 2, 3]);
        let spec = SheafSpec::uniform(&c, 1, 1, -2);
        let h0 = global_sections(&c, &spec).unwrap();
        assert_eq!(h0.len(), 2);
        for s in &h0 {
            let total: Q = c.chart_points().into_iter().map(|p| s.comps[0].residue(p)).sum();
            assert_eq!(total, q(0));
            assert_eq!(s.comps[0].residue(ChartPoint::Infinity), q(0));
        }
    }

    #[test]
    fn negative_line_bundles() {
        let c = curve(&[1, 2, 3]);
        let spec = SheafSpec::uniform(&c, 1, -1, 0);
        let coh = SheafCohomology::compute(&c, &spec, DEFAULT_PAD).unwrap();
        assert_eq!((coh.h0_dim(), coh.h1_dim()), (0, 2));
        assert_eq!(spec.euler_characteristic(), -2);
    }

    #[test]
    fn value_constraint_kills_constants() {
        let c = curve(&[2]);
        let spec = SheafSpec::uniform(&c, 1, 0, 0)
            .with_condition(&c, ChartPoint::Finite(0), LocalCondition { bound: 0, leading: Subspace::zero(1) })
            .unwrap();
        assert!(global_sections(&c, &spec).unwrap().is_empty());
    }
}
