//! Hitchin map on residue data, the Lie–Poisson bracket on tuples of
//! residues, and Hamiltonian flows.
//!
//! A Higgs field on the rational curve with simple poles is
//! `θ = Σ A_i dz/(z - x_i)`. For an invariant polynomial `p` of degree `d`,
//! `p(θ) = N(z) dz^d / Π_l (z - x_l)^d` with `N = p(Σ_i A_i Π_{l≠i}(z - x_l))`.
//! When `Σ A_i = 0` the form is holomorphic at infinity, which for the
//! function part means `O(z^{-2d})`, so `p(θ)` is determined by its principal
//! parts `Σ_i Σ_{j=1..d} c_ij (z - x_i)^{-j}` subject to `2d - 1` linear
//! constraints. The canonical basis uses the unconstrained `c_ij` as
//! coordinates.
//!
//! Residue entries are variables `y_{(i m + a) m + b} = (A_i)_{ab}` where `m`
//! is the matrix size.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::defo::FramedHiggsModel;
use crate::error::{invalid, Error, Result};
use crate::exact::{binom, to_f64, Ring, Q};
use crate::lie::{
    commutator, group_data, invariant_polynomials_generic, FramingSpec, GroupId, InvariantForm, LieAlgebra,
};
use crate::linalg::Matrix;
use crate::poly::{inverse_power_series, CompiledPoly, MPoly, UPoly};
use crate::random::RationalSampler;

/// A polynomial function of the residue entries of `n` sites.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyObservable {
    pub group: GroupId,
    pub n: usize,
    pub poly: MPoly,
}

impl PolyObservable {
    pub fn eval(&self, point: &[Q]) -> Q {
        self.poly.eval(point)
    }
}

/// Product of `n` copies of `g*` (identified with `g` by `σ`), with its
/// Lie–Poisson bracket `{F, G}(A) = Σ_i σ(A_i, [∇_i F, ∇_i G])`.
#[derive(Clone, Debug)]
pub struct PoissonChart {
    alg: LieAlgebra,
    form: InvariantForm,
    n: usize,
    gram_inv: Matrix,
}

/// `σ`-gradients of an observable, one row per site and basis direction:
/// `∇_i F = Σ_k grad[i][k] e_k`.
#[derive(Clone, Debug)]
pub struct GradientPolys {
    pub grad: Vec<Vec<MPoly>>,
}

impl PoissonChart {
    pub fn new(alg: LieAlgebra, form: InvariantForm, n: usize) -> Result<Self> {
        if form.group() != alg.id() {
            return invalid("form and algebra belong to different groups");
        }
        let gram_inv =
            form.gram(&alg).inverse().ok_or_else(|| Error::Precondition("invariant form is degenerate".into()))?;
        Ok(PoissonChart { alg, form, n, gram_inv })
    }

    pub fn for_model(model: &FramedHiggsModel) -> Result<Self> {
        PoissonChart::new(model.alg.clone(), model.form.clone(), model.curve.n())
    }

    pub fn alg(&self) -> &LieAlgebra {
        &self.alg
    }

    pub fn form(&self) -> &InvariantForm {
        &self.form
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn m(&self) -> usize {
        self.alg.size()
    }

    pub fn var(&self, site: usize, a: usize, b: usize) -> usize {
        let m = self.m();
        (site * m + a) * m + b
    }

    pub fn num_vars(&self) -> usize {
        self.n * self.m() * self.m()
    }

    /// Flattens residues into the variable order.
    pub fn point(&self, residues: &[Matrix]) -> Result<Vec<Q>> {
        if residues.len() != self.n {
            return Err(Error::Shape(format!("expected {} residues, got {}", self.n, residues.len())));
        }
        let m = self.m();
        let mut out = Vec::with_capacity(self.num_vars());
        for a in residues {
            if a.rows() != m || a.cols() != m {
                return Err(Error::Shape(format!("residues must be {m}x{m}")));
            }
            for r in 0..m {
                for c in 0..m {
                    out.push(a[(r, c)].clone());
                }
            }
        }
        Ok(out)
    }

    pub fn residues(&self, point: &[Q]) -> Vec<Matrix> {
        let m = self.m();
        (0..self.n)
            .map(|i| {
                Matrix::from_rows((0..m).map(|a| (0..m).map(|b| point[self.var(i, a, b)].clone()).collect()).collect())
            })
            .collect()
    }

    /// `A_site` with variable entries.
    pub fn site_matrix(&self, site: usize) -> Vec<Vec<MPoly>> {
        let m = self.m();
        (0..m).map(|a| (0..m).map(|b| MPoly::var(self.var(site, a, b))).collect()).collect()
    }

    pub fn observable(&self, poly: MPoly) -> PolyObservable {
        PolyObservable { group: self.alg.id(), n: self.n, poly }
    }

    /// The linear observable `σ(x, A_site)`.
    pub fn coordinate(&self, site: usize, x: &Matrix) -> Result<PolyObservable> {
        if !self.form.is_trace_type() {
            return Err(Error::Precondition("coordinate observables need a trace-type form".into()));
        }
        let m = self.m();
        let mut coeffs = vec![Q::zero(); self.num_vars()];
        for a in 0..m {
            for b in 0..m {
                let mut e = Matrix::zeros(m, m);
                e[(a, b)] = Q::one();
                coeffs[self.var(site, a, b)] = self.form.eval(x, &e);
            }
        }
        Ok(self.observable(MPoly::linear(&coeffs)))
    }

    /// Invariant polynomial number `k` of the residue at one site.
    pub fn casimir(&self, site: usize, k: usize) -> Result<PolyObservable> {
        let p = invariant_polynomials_generic(self.alg.id(), &self.site_matrix(site))?;
        let poly =
            p.get(k).cloned().ok_or_else(|| Error::Invalid(format!("no invariant polynomial with index {k}")))?;
        Ok(self.observable(poly))
    }

    fn check(&self, f: &PolyObservable) -> Result<()> {
        if f.group != self.alg.id() || f.n != self.n {
            return Err(Error::Shape(format!(
                "observable over {}^{} used on a chart over {}^{}",
                f.group,
                f.n,
                self.alg.id(),
                self.n
            )));
        }
        Ok(())
    }

    pub fn gradient_polys(&self, f: &PolyObservable) -> Result<GradientPolys> {
        self.check(f)?;
        let m = self.m();
        let basis = self.alg.basis();
        let dim = basis.len();
        let mut grad = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let partials: Vec<Vec<MPoly>> =
                (0..m).map(|a| (0..m).map(|b| f.poly.derivative(self.var(i, a, b))).collect()).collect();
            // directional derivatives along basis elements
            let dirs: Vec<MPoly> = basis
                .iter()
                .map(|e| {
                    let mut acc = MPoly::zero_el();
                    for a in 0..m {
                        for b in 0..m {
                            if !e[(a, b)].is_zero() && !partials[a][b].is_zero_el() {
                                acc = acc.add(&partials[a][b].scale(&e[(a, b)]));
                            }
                        }
                    }
                    acc
                })
                .collect();
            let row: Vec<MPoly> = (0..dim)
                .map(|k| {
                    let mut acc = MPoly::zero_el();
                    for (l, d) in dirs.iter().enumerate() {
                        let g = &self.gram_inv[(k, l)];
                        if !g.is_zero() && !d.is_zero_el() {
                            acc = acc.add(&d.scale(g));
                        }
                    }
                    acc
                })
                .collect();
            grad.push(row);
        }
        Ok(GradientPolys { grad })
    }

    /// `∇_i F` at a point, as matrices.
    pub fn gradient_at(&self, g: &GradientPolys, point: &[Q]) -> Vec<Matrix> {
        g.grad.iter().map(|row| self.alg.element(&row.iter().map(|p| p.eval(point)).collect::<Vec<_>>())).collect()
    }

    fn bracket_from_gradients(&self, residues: &[Matrix], gf: &[Matrix], gg: &[Matrix]) -> Q {
        let mut acc = Q::zero();
        for i in 0..self.n {
            acc += self.form.eval(&residues[i], &commutator(&gf[i], &gg[i]));
        }
        acc
    }

    /// Exact value of `{F, G}` at the given residues.
    pub fn bracket_at(&self, f: &PolyObservable, g: &PolyObservable, residues: &[Matrix]) -> Result<Q> {
        let point = self.point(residues)?;
        let gf = self.gradient_at(&self.gradient_polys(f)?, &point);
        let gg = self.gradient_at(&self.gradient_polys(g)?, &point);
        Ok(self.bracket_from_gradients(residues, &gf, &gg))
    }

    /// `{F, G}` as a polynomial.
    pub fn bracket(&self, f: &PolyObservable, g: &PolyObservable) -> Result<PolyObservable> {
        if !self.form.is_trace_type() {
            return Err(Error::Precondition("symbolic brackets need a trace-type form".into()));
        }
        let gf = self.gradient_polys(f)?;
        let gg = self.gradient_polys(g)?;
        let basis = self.alg.basis();
        let dim = basis.len();
        // σ(A_i, [e_k, e_l]) as linear polynomials
        let mut out = MPoly::zero_el();
        for i in 0..self.n {
            for k in 0..dim {
                if gf.grad[i][k].is_zero_el() {
                    continue;
                }
                for l in 0..dim {
                    if gg.grad[i][l].is_zero_el() || k == l {
                        continue;
                    }
                    let c = self.coordinate(i, &commutator(&basis[k], &basis[l]))?;
                    if c.poly.is_zero_el() {
                        continue;
                    }
                    out = out.add(&gf.grad[i][k].mul(&gg.grad[i][l]).mul(&c.poly));
                }
            }
        }
        Ok(self.observable(out))
    }
}

/// Linear constraints expressing holomorphy at infinity of a degree-`d` form
/// given by principal parts, and the resulting choice of free coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct CanonicalBasis {
    pub degree: usize,
    /// `(site, order)` of each coordinate, `order` in `1..=d`.
    pub free: Vec<(usize, usize)>,
    #[serde(skip)]
    pub constraints: Matrix,
}

impl CanonicalBasis {
    /// Columns are `c_ij` in order `(i, j)`, `j = 1..=d`; row `m - 1` is the
    /// coefficient of `z^{-m}`, `m = 1..2d-1`, using
    /// `(z - x)^{-j} = Σ_m C(m-1, j-1) x^{m-j} z^{-m}`.
    pub fn new(points: &[Q], d: usize) -> Self {
        let n = points.len();
        let rows: Vec<Vec<Q>> = (1..2 * d)
            .map(|m| {
                let mut row = Vec::with_capacity(n * d);
                for x in points {
                    for j in 1..=d {
                        row.push(if m >= j {
                            binom(m as i64 - 1, j as i64 - 1) * num_traits::pow(x.clone(), m - j)
                        } else {
                            Q::zero()
                        });
                    }
                }
                row
            })
            .collect();
        let constraints = Matrix::from_rows(rows);
        let (_, pivots) = constraints.rref();
        let free = (0..n * d).filter(|c| !pivots.contains(c)).map(|c| (c / d, c % d + 1)).collect();
        CanonicalBasis { degree: d, free, constraints }
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn holds(&self, parts: &[Vec<Q>]) -> bool {
        let flat: Vec<Q> = parts.iter().flatten().cloned().collect();
        self.constraints.mul_vec(&flat).iter().all(Zero::is_zero)
    }
}

/// A point of the Hitchin base: for each invariant polynomial, its
/// coordinates in the canonical basis, plus all principal-part coefficients.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HitchinPoint {
    pub group: GroupId,
    pub degrees: Vec<usize>,
    #[serde(serialize_with = "ser_qvv")]
    pub coords: Vec<Vec<Q>>,
    /// `[k][i][j-1]`: coefficient of `(z - x_i)^{-j}` in `p_k(θ)`.
    #[serde(skip)]
    pub principal_parts: Vec<Vec<Vec<Q>>>,
}

fn ser_qvv<S: serde::Serializer>(v: &[Vec<Q>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let strs: Vec<Vec<String>> = v.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
    strs.serialize(s)
}

impl HitchinPoint {
    pub fn is_zero(&self) -> bool {
        self.principal_parts.iter().flatten().flatten().all(Zero::is_zero)
    }
}

/// The Hitchin coefficient functions of one marked rational curve.
#[derive(Clone, Debug)]
pub struct HitchinSystem {
    chart: PoissonChart,
    points: Vec<Q>,
    degrees: Vec<usize>,
    /// `[k][i][j-1]`.
    parts: Vec<Vec<Vec<MPoly>>>,
    bases: Vec<CanonicalBasis>,
}

impl HitchinSystem {
    pub fn new(alg: LieAlgebra, form: InvariantForm, points: Vec<Q>) -> Result<Self> {
        let id = alg.id();
        if !id.is_classical() {
            return Err(Error::NotEvaluable(id.to_string()));
        }
        let n = points.len();
        if n == 0 {
            return invalid("at least one marked point is required");
        }
        let chart = PoissonChart::new(alg, form, n)?;
        let m = chart.m();
        // Q(z) = Σ_i A_i Π_{l≠i} (z - x_l)
        let others: Vec<UPoly<MPoly>> = (0..n)
            .map(|i| {
                let mut p = UPoly::<Q>::one_el();
                for (l, x) in points.iter().enumerate() {
                    if l != i {
                        p = p.mul(&UPoly::linear_root(x));
                    }
                }
                p.map(|c| MPoly::constant(c.clone()))
            })
            .collect();
        let qz: Vec<Vec<UPoly<MPoly>>> = (0..m)
            .map(|a| {
                (0..m)
                    .map(|b| {
                        let mut acc = UPoly::<MPoly>::zero_el();
                        for (i, o) in others.iter().enumerate() {
                            let v = MPoly::var(chart.var(i, a, b));
                            acc = acc.add(&o.map(|c| c.mul(&v)));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let numerators = invariant_polynomials_generic(id, &qz)?;
        let degrees = group_data(id)?.degrees;
        debug_assert_eq!(numerators.len(), degrees.len());
        let mut parts = Vec::with_capacity(degrees.len());
        for (num, &d) in numerators.iter().zip(&degrees) {
            let mut per_site = Vec::with_capacity(n);
            for (i, xi) in points.iter().enumerate() {
                // Π_{l≠i} (x_i - x_l + t)^{-d}, to order t^{d-1}
                let mut series = vec![Q::zero(); d];
                series[0] = Q::one();
                for (l, xl) in points.iter().enumerate() {
                    if l == i {
                        continue;
                    }
                    let s = inverse_power_series(&(xi - xl), d as i64, d);
                    let mut next = vec![Q::zero(); d];
                    for (u, a) in series.iter().enumerate() {
                        for (v, b) in s.iter().enumerate().take(d - u) {
                            next[u + v] += a * b;
                        }
                    }
                    series = next;
                }
                let shifted = num.shift(xi);
                // c_ij = [t^{d-j}] N(x_i + t) · series
                let cs: Vec<MPoly> = (1..=d)
                    .map(|j| {
                        let e = d - j;
                        let mut acc = MPoly::zero_el();
                        for (u, s) in series.iter().enumerate().take(e + 1) {
                            if !s.is_zero() {
                                acc = acc.add(&shifted.coeff(e - u).scale(s));
                            }
                        }
                        acc
                    })
                    .collect();
                per_site.push(cs);
            }
            parts.push(per_site);
        }
        let bases = degrees.iter().map(|&d| CanonicalBasis::new(&points, d)).collect();
        Ok(HitchinSystem { chart, points, degrees, parts, bases })
    }

    pub fn for_model(model: &FramedHiggsModel) -> Result<Self> {
        HitchinSystem::new(model.alg.clone(), model.form.clone(), model.curve.points().to_vec())
    }

    pub fn chart(&self) -> &PoissonChart {
        &self.chart
    }

    pub fn points(&self) -> &[Q] {
        &self.points
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn bases(&self) -> &[CanonicalBasis] {
        &self.bases
    }

    /// Principal-part coefficient `c_ij` of `p_k(θ)` as a polynomial.
    pub fn part(&self, k: usize, site: usize, order: usize) -> &MPoly {
        &self.parts[k][site][order - 1]
    }

    /// The coordinate functions of the Hitchin map, labelled `p<k>[x<i>, <j>]`.
    pub fn hamiltonians(&self) -> Vec<(String, PolyObservable)> {
        let mut out = Vec::new();
        for (k, b) in self.bases.iter().enumerate() {
            for &(i, j) in &b.free {
                out.push((
                    format!("p{}[x{},{}]", k + 1, i + 1, j),
                    self.chart.observable(self.parts[k][i][j - 1].clone()),
                ));
            }
        }
        out
    }

    /// Every principal-part coefficient, labelled like `hamiltonians`.
    pub fn all_parts(&self) -> Vec<(String, PolyObservable)> {
        let mut out = Vec::new();
        for (k, per_site) in self.parts.iter().enumerate() {
            for (i, cs) in per_site.iter().enumerate() {
                for (j, p) in cs.iter().enumerate() {
                    out.push((format!("p{}[x{},{}]", k + 1, i + 1, j + 1), self.chart.observable(p.clone())));
                }
            }
        }
        out
    }

    /// Evaluates all principal parts; checks holomorphy at infinity.
    pub fn evaluate(&self, residues: &[Matrix]) -> Result<HitchinPoint> {
        let point = self.chart.point(residues)?;
        let principal_parts: Vec<Vec<Vec<Q>>> =
            self.parts.iter().map(|k| k.iter().map(|i| i.iter().map(|p| p.eval(&point)).collect()).collect()).collect();
        for (b, pp) in self.bases.iter().zip(&principal_parts) {
            if !b.holds(pp) {
                return Err(Error::Invalid(format!(
                    "degree-{} component is not holomorphic at infinity; residues must sum to zero",
                    b.degree
                )));
            }
        }
        let coords = self
            .bases
            .iter()
            .zip(&principal_parts)
            .map(|(b, pp)| b.free.iter().map(|&(i, j)| pp[i][j - 1].clone()).collect())
            .collect();
        Ok(HitchinPoint { group: self.chart.alg.id(), degrees: self.degrees.clone(), coords, principal_parts })
    }
}

pub fn hitchin_map(model: &FramedHiggsModel) -> Result<HitchinPoint> {
    let sys = HitchinSystem::for_model(model)?;
    let h = sys.evaluate(&model.residues)?;
    // the framed map is the unframed one composed with forgetting the framing
    let unframed = FramedHiggsModel::new(
        model.alg.clone(),
        model.form.clone(),
        model.curve.clone(),
        FramingSpec::uniform(&model.alg, &model.form, crate::lie::FramingKind::Trivial, model.curve.n())?,
        model.residues.clone(),
    )?;
    if sys.evaluate(&unframed.residues)? != h {
        return Err(Error::Internal("framed and unframed Hitchin maps disagree".into()));
    }
    Ok(h)
}

/// Simultaneous conjugation `g A_i g^{-1}`.
pub fn conjugate_residues(residues: &[Matrix], g: &Matrix) -> Result<Vec<Matrix>> {
    let gi = g.inverse().ok_or_else(|| Error::Invalid("conjugating matrix is singular".into()))?;
    Ok(residues.iter().map(|a| g.mul(a).mul(&gi)).collect())
}

/// Pairwise brackets of Hitchin coefficient functions at a set of points.
#[derive(Clone, Debug, Serialize)]
pub struct CommutativityReport {
    pub labels: Vec<String>,
    pub points_checked: usize,
    pub pairs_checked: usize,
    #[serde(serialize_with = "ser_q")]
    pub max_abs: Q,
    /// Bracket table at the model point.
    #[serde(serialize_with = "ser_qvv")]
    pub table: Vec<Vec<Q>>,
}

fn ser_q<S: serde::Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl CommutativityReport {
    pub fn all_zero(&self) -> bool {
        self.max_abs.is_zero()
    }
}

/// Brackets `{H_a, H_b}` at the model point and at `extra` further residue
/// tuples sampled from the same constraint set.
pub fn commutativity_check(
    model: &FramedHiggsModel,
    extra: usize,
    sampler: &mut RationalSampler,
) -> Result<CommutativityReport> {
    if model.curve.n() < 2 {
        return Err(Error::Precondition("commutativity check needs at least two marked points".into()));
    }
    let sys = HitchinSystem::for_model(model)?;
    let chart = sys.chart();
    let hams = sys.hamiltonians();
    let grads: Vec<GradientPolys> = hams.iter().map(|(_, h)| chart.gradient_polys(h)).collect::<Result<_>>()?;
    let mut samples = vec![model.residues.clone()];
    for _ in 0..extra {
        let m = FramedHiggsModel::random(
            model.alg.clone(),
            model.form.clone(),
            model.curve.clone(),
            model.framing.clone(),
            sampler,
        )?;
        samples.push(m.residues);
    }
    let k = hams.len();
    let mut max_abs = Q::zero();
    let mut table = vec![vec![Q::zero(); k]; k];
    for (s, residues) in samples.iter().enumerate() {
        let point = chart.point(residues)?;
        let gs: Vec<Vec<Matrix>> = grads.iter().map(|g| chart.gradient_at(g, &point)).collect();
        for a in 0..k {
            for b in a + 1..k {
                let v = chart.bracket_from_gradients(residues, &gs[a], &gs[b]);
                if v.abs() > max_abs {
                    max_abs = v.abs();
                }
                if s == 0 {
                    table[b][a] = -v.clone();
                    table[a][b] = v;
                }
            }
        }
    }
    Ok(CommutativityReport {
        labels: hams.into_iter().map(|(l, _)| l).collect(),
        points_checked: samples.len(),
        pairs_checked: k * k.saturating_sub(1) / 2,
        max_abs,
        table,
    })
}

/// Largest `|{H_a, σ(B, A_1)}|` over the Hitchin coefficients, for a random
/// `B`: a non-invariant observable, so generically nonzero.
pub fn negative_control(model: &FramedHiggsModel, sampler: &mut RationalSampler) -> Result<Q> {
    let sys = HitchinSystem::for_model(model)?;
    let chart = sys.chart();
    let b = sampler.element(&model.alg);
    let probe = chart.coordinate(0, &b)?;
    let mut max_abs = Q::zero();
    for (_, h) in sys.hamiltonians() {
        let v = chart.bracket_at(&h, &probe, &model.residues)?.abs();
        if v > max_abs {
            max_abs = v;
        }
    }
    Ok(max_abs)
}

/// Parameters of a fixed-step integration.
#[derive(Clone, Debug, Serialize)]
pub struct FlowOptions {
    pub t_end: f64,
    pub steps: usize,
    /// Largest accepted relative drift of a conserved quantity.
    pub tolerance: f64,
    /// Floating point must be enabled explicitly; everything else is exact.
    pub float_mode: bool,
    /// Keep every `record_every`-th state (and the last).
    pub record_every: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions { t_end: 1.0, steps: 10_000, tolerance: 1e-8, float_mode: true, record_every: 1000 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowReport {
    pub times: Vec<f64>,
    /// Recorded residue tuples, flattened in variable order.
    pub states: Vec<Vec<f64>>,
    pub conserved: Vec<String>,
    /// Per conserved quantity: `max_t |H(t) - H(0)| / |H(0)|` (absolute when `H(0) = 0`).
    pub drift: Vec<f64>,
    pub max_drift: f64,
}

/// Integrates `dA_i/dt = [A_i, ∇_i H]` with classical RK4 and tracks the
/// given conserved quantities. Rejects the step size if any relative drift
/// exceeds the tolerance.
pub fn hamiltonian_flow(
    chart: &PoissonChart,
    residues: &[Matrix],
    h: &PolyObservable,
    conserved: &[(String, PolyObservable)],
    opts: &FlowOptions,
) -> Result<FlowReport> {
    if !opts.float_mode {
        return Err(Error::Precondition("hamiltonian_flow requires floating-point mode".into()));
    }
    if opts.steps == 0 {
        return invalid("steps must be positive");
    }
    if !opts.t_end.is_finite() {
        return invalid("t_end must be finite");
    }
    let grad = chart.gradient_polys(h)?;
    let compiled: Vec<Vec<CompiledPoly>> =
        grad.grad.iter().map(|r| r.iter().map(CompiledPoly::new).collect()).collect();
    let basis: Vec<Vec<f64>> =
        chart.alg.basis().iter().map(|e| e.to_rows().iter().flatten().map(to_f64).collect()).collect();
    let m = chart.m();
    let n = chart.n;
    let rhs = |y: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; y.len()];
        for i in 0..n {
            let mut g = vec![0.0; m * m];
            for (k, p) in compiled[i].iter().enumerate() {
                let c = p.eval(y);
                if c != 0.0 {
                    for (gx, bx) in g.iter_mut().zip(&basis[k]) {
                        *gx += c * bx;
                    }
                }
            }
            let a = &y[i * m * m..(i + 1) * m * m];
            let o = &mut out[i * m * m..(i + 1) * m * m];
            for r in 0..m {
                for c in 0..m {
                    let mut s = 0.0;
                    for t in 0..m {
                        s += a[r * m + t] * g[t * m + c] - g[r * m + t] * a[t * m + c];
                    }
                    o[r * m + c] = s;
                }
            }
        }
        out
    };
    let cons: Vec<CompiledPoly> = conserved.iter().map(|(_, p)| CompiledPoly::new(&p.poly)).collect();
    let mut y: Vec<f64> = chart.point(residues)?.iter().map(to_f64).collect();
    let h0: Vec<f64> = cons.iter().map(|c| c.eval(&y)).collect();
    let mut drift = vec![0.0f64; cons.len()];
    let dt = opts.t_end / opts.steps as f64;
    let every = opts.record_every.max(1);
    let mut times = vec![0.0];
    let mut states = vec![y.clone()];
    let axpy = |y: &[f64], k: &[f64], s: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    for step in 1..=opts.steps {
        let k1 = rhs(&y);
        let k2 = rhs(&axpy(&y, &k1, dt / 2.0));
        let k3 = rhs(&axpy(&y, &k2, dt / 2.0));
        let k4 = rhs(&axpy(&y, &k3, dt));
        for (j, yj) in y.iter_mut().enumerate() {
            *yj += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        for (c, (poly, start)) in cons.iter().zip(&h0).enumerate() {
            let dv = (poly.eval(&y) - start).abs();
            let rel = if *start == 0.0 { dv } else { dv / start.abs() };
            drift[c] = drift[c].max(rel);
        }
        if step % every == 0 || step == opts.steps {
            times.push(dt * step as f64);
            states.push(y.clone());
        }
    }
    // f64::max drops NaN, which would hide a diverged run
    let max_drift = if drift.iter().any(|d| d.is_nan()) { f64::NAN } else { drift.iter().cloned().fold(0.0, f64::max) };
    // a NaN drift must be rejected too
    if max_drift.is_nan() || max_drift > opts.tolerance {
        return Err(Error::Precondition(format!(
            "step size rejected: relative drift {max_drift:e} exceeds tolerance {:e}",
            opts.tolerance
        )));
    }
    Ok(FlowReport { times, states, conserved: conserved.iter().map(|(l, _)| l.clone()).collect(), drift, max_drift })
}

/// Flow generated by the principal-part coefficient `c_ij` of `p_k(θ)`
/// (`k` zero-based, `site` zero-based, `order` in `1..=d_k`), tracking every
/// principal-part coefficient.
pub fn gaudin_flow(
    model: &FramedHiggsModel,
    k: usize,
    site: usize,
    order: usize,
    opts: &FlowOptions,
) -> Result<FlowReport> {
    let sys = HitchinSystem::for_model(model)?;
    let d = *sys.degrees().get(k).ok_or_else(|| Error::Invalid(format!("no invariant polynomial with index {k}")))?;
    if site >= model.curve.n() || order == 0 || order > d {
        return invalid(format!("no coefficient at site {site}, order {order} for degree {d}"));
    }
    let h = sys.chart().observable(sys.part(k, site, order).clone());
    hamiltonian_flow(sys.chart(), &model.residues, &h, &sys.all_parts(), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qr};
    use crate::lie::FramingKind;

    fn sl2() -> LieAlgebra {
        LieAlgebra::new(GroupId::Sl(2)).unwrap()
    }

    fn model(id: GroupId, n: usize, seed: u64) -> FramedHiggsModel {
        let alg = LieAlgebra::new(id).unwrap();
        let pts = (1..=n as i64).map(|x| q(x * x - 2 * x + 3)).collect();
        crate::defo::uniform_model(alg, pts, FramingKind::Trivial, &mut RationalSampler::new(seed, 10)).unwrap()
    }

    #[test]
    fn canonical_basis_dimension() {
        let pts = vec![q(0), q(1), q(3), q(-2)];
        for d in 1..=4 {
            assert_eq!(CanonicalBasis::new(&pts, d).dim(), d * (pts.len() - 2) + 1);
        }
    }

    #[test]
    fn zero_residues_give_zero_point() {
        let alg = sl2();
        let form = InvariantForm::trace(alg.id());
        let sys = HitchinSystem::new(alg, form, vec![q(0), q(1), q(2)]).unwrap();
        let z = vec![Matrix::zeros(2, 2); 3];
        assert!(sys.evaluate(&z).unwrap().is_zero());
    }

    #[test]
    fn sl2_quadratic_residue_is_gaudin_hamiltonian() {
        let m = model(GroupId::Sl(2), 3, 3);
        let h = hitchin_map(&m).unwrap();
        let x = m.curve.points();
        for i in 0..3 {
            let mut expect = Q::zero();
            for j in 0..3 {
                if j != i {
                    expect -= m.form.eval(&m.residues[i], &m.residues[j]) / (&x[i] - &x[j]);
                }
            }
            // det θ = -tr(θ²)/2
            assert_eq!(h.principal_parts[0][i][0], expect);
        }
    }

    #[test]
    fn gl2_trace_component() {
        let alg = LieAlgebra::new(GroupId::Gl(2)).unwrap();
        let form = InvariantForm::trace(alg.id());
        let a = Matrix::from_rows(vec![vec![q(3), q(1)], vec![qr(1, 2), q(-1)]]);
        let pts = vec![q(1), q(4)];
        let sys = HitchinSystem::new(alg, form, pts).unwrap();
        let h = sys.evaluate(&[a.clone(), a.neg()]).unwrap();
        assert_eq!(h.principal_parts[0], vec![vec![q(2)], vec![q(-2)]]);
    }

    #[test]
    fn unbalanced_residues_are_rejected() {
        let alg = sl2();
        let form = InvariantForm::trace(alg.id());
        let sys = HitchinSystem::new(alg, form, vec![q(0), q(1)]).unwrap();
        let a = Matrix::from_rows(vec![vec![q(1), q(0)], vec![q(0), q(-1)]]);
        assert!(sys.evaluate(&[a.clone(), a]).is_err());
    }

    #[test]
    fn sl2_single_site_bracket() {
        let alg = sl2();
        let form = InvariantForm::trace(alg.id());
        let chart = PoissonChart::new(alg, form, 1).unwrap();
        let e = Matrix::from_rows(vec![vec![q(0), q(1)], vec![q(0), q(0)]]);
        let f = e.transpose();
        let hm = commutator(&e, &f);
        let a = chart.coordinate(0, &e).unwrap();
        let b = chart.coordinate(0, &f).unwrap();
        // {σ(e, A), σ(f, A)} = σ(A, [e, f])
        assert_eq!(chart.bracket(&a, &b).unwrap(), chart.coordinate(0, &hm).unwrap());
        assert!(chart.bracket(&a, &a).unwrap().poly.is_zero_el());
    }

    #[test]
    fn sl2_hamiltonians_commute() {
        let m = model(GroupId::Sl(2), 3, 7);
        let r = commutativity_check(&m, 3, &mut RationalSampler::new(1, 10)).unwrap();
        assert!(r.all_zero());
        assert!(!negative_control(&m, &mut RationalSampler::new(2, 10)).unwrap().is_zero());
    }

    #[test]
    fn conjugation_invariance() {
        let m = model(GroupId::Sl(3), 3, 4);
        let sys = HitchinSystem::for_model(&m).unwrap();
        let g = RationalSampler::new(9, 5).invertible(3);
        let moved = conjugate_residues(&m.residues, &g).unwrap();
        assert_eq!(sys.evaluate(&m.residues).unwrap(), sys.evaluate(&moved).unwrap());
    }

    #[test]
    fn zero_time_flow_is_identity() {
        let m = model(GroupId::Sl(2), 3, 5);
        let opts = FlowOptions { t_end: 0.0, steps: 10, record_every: 1, ..Default::default() };
        let r = gaudin_flow(&m, 0, 0, 1, &opts).unwrap();
        assert!(r.states.iter().all(|s| s == &r.states[0]));
    }
}
