//! Deformation complexes of a framed Higgs pair on the marked rational curve,
//! their hypercohomology, the symplectic form, the Poisson map, and the
//! identity `dφ ∘ Φ⁻¹ ∘ dφ* = P` as exact matrices.
//!
//! A two-term complex `F₀ --[θ,·]--> F₁` is resolved inside fixed ambient
//! bundles `B₀ ⊇ F₀`, `B₁ ⊇ F₁` (all complexes share them), giving the total
//! complex
//!
//! ```text
//! H⁰(B₀) --d0--> T₀ ⊕ H⁰(B₁) --d1--> T₁
//! d0(s)    = (tail₀ s, [θ, s])
//! d1(t, u) = tail₁ u - [θ, t]
//! ```
//!
//! with `T_k = ⊕_p B_k / F_k` the local tail spaces.

use num_traits::Zero;

use crate::curve::{
    Ambient, ChartPoint, LocalCondition, MarkedCurve, PartialFraction, Section, SheafSpec, TailSpace, VLaurent,
    DEFAULT_PAD,
};
use crate::error::{invalid, Error, Result};
use crate::exact::Q;
use crate::lie::{FramingKind, FramingSpec, InvariantForm, LieAlgebra};
use crate::linalg::{Matrix, QuotientSpace, Subspace};
use crate::random::RationalSampler;

/// Explicit framed Higgs pair: trivial bundle on the rational curve with
/// `θ = Σ A_i dz / (z - x_i)`.
#[derive(Clone, Debug)]
pub struct FramedHiggsModel {
    pub alg: LieAlgebra,
    pub form: InvariantForm,
    pub curve: MarkedCurve,
    pub framing: FramingSpec,
    pub residues: Vec<Matrix>,
}

impl FramedHiggsModel {
    pub fn new(
        alg: LieAlgebra,
        form: InvariantForm,
        curve: MarkedCurve,
        framing: FramingSpec,
        residues: Vec<Matrix>,
    ) -> Result<Self> {
        let n = curve.n();
        if framing.points.len() != n || residues.len() != n {
            return invalid(format!("expected framing data and residues for all {n} marked points"));
        }
        for (i, a) in residues.iter().enumerate() {
            if !alg.contains(a) {
                return invalid(format!("residue A_{} is not an element of {}", i + 1, alg.id()));
            }
            if !framing.points[i].perp_contains(&alg, a) {
                return invalid(format!("residue A_{} is not in the annihilator of the framing subalgebra", i + 1));
            }
        }
        let mut sum = Matrix::zeros(alg.size(), alg.size());
        for a in &residues {
            sum = sum.add(a);
        }
        if !sum.is_zero() {
            return invalid("residues must sum to zero (holomorphy of θ at infinity)");
        }
        Ok(FramedHiggsModel { alg, form, curve, framing, residues })
    }

    /// Residues sampled from `{(A_i) ∈ Π h⊥_i : Σ A_i = 0}` with a seeded source.
    pub fn random(
        alg: LieAlgebra,
        form: InvariantForm,
        curve: MarkedCurve,
        framing: FramingSpec,
        sampler: &mut RationalSampler,
    ) -> Result<Self> {
        let n = curve.n();
        if framing.points.len() != n {
            return invalid("framing count does not match marked points");
        }
        let d = alg.dim();
        // unknowns: coordinates in each h⊥_i basis; constraint Σ A_i = 0 in g-coordinates
        let perp_coords: Vec<Vec<Vec<Q>>> =
            framing.points.iter().map(|f| f.perp_basis.iter().map(|m| alg.coords(m).unwrap()).collect()).collect();
        let mut cols = Vec::new();
        for pc in &perp_coords {
            cols.extend(pc.iter().cloned());
        }
        let constraint = Matrix::from_columns(d, &cols);
        let kernel = constraint.kernel();
        let c = sampler.combination(&kernel);
        let mut residues = Vec::with_capacity(n);
        let mut k = 0;
        for pc in &perp_coords {
            let mut g = vec![Q::zero(); d];
            for v in pc {
                let x = c.get(k).cloned().unwrap_or_else(Q::zero);
                for (a, y) in v.iter().enumerate() {
                    g[a] += &x * y;
                }
                k += 1;
            }
            residues.push(alg.element(&g));
        }
        FramedHiggsModel::new(alg, form, curve, framing, residues)
    }

    pub fn fiber_dim(&self) -> usize {
        self.alg.dim()
    }

    fn subspace(&self, ms: &[Matrix]) -> Subspace {
        let v: Vec<Vec<Q>> = ms.iter().map(|m| self.alg.coords(m).unwrap()).collect();
        Subspace::new(self.alg.dim(), &v)
    }

    /// `[A_i, h] ∈ h⊥` for every basis element `h` of every framing.
    pub fn residue_bracket_containment_holds(&self) -> bool {
        self.residues
            .iter()
            .zip(&self.framing.points)
            .all(|(a, f)| f.h_basis.iter().all(|h| f.perp_contains(&self.alg, &crate::lie::commutator(a, h))))
    }
}

/// The three complexes realised on a model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ComplexKind {
    /// `g --> g ⊗ K(D)`: deformations of the unframed twisted Higgs pair.
    CPrime,
    /// `ad_φ --> adⁿ_φ ⊗ K(D)`: deformations of the framed pair.
    D,
    /// `g(-D) --> g ⊗ K`: the Serre dual of `CPrime`.
    CPrimeDual,
}

impl ComplexKind {
    pub fn label(self) -> &'static str {
        match self {
            ComplexKind::CPrime => "C'",
            ComplexKind::D => "D",
            ComplexKind::CPrimeDual => "C'^dual",
        }
    }
}

/// Sheaf specs `(F₀, F₁)` of a complex.
pub fn complex_specs(model: &FramedHiggsModel, kind: ComplexKind) -> (SheafSpec, SheafSpec) {
    let c = &model.curve;
    let d = model.fiber_dim();
    match kind {
        ComplexKind::CPrime => (SheafSpec::uniform(c, d, 0, 0), SheafSpec::uniform(c, d, 1, -2)),
        ComplexKind::CPrimeDual => (SheafSpec::uniform(c, d, -1, 0), SheafSpec::uniform(c, d, 0, -2)),
        ComplexKind::D => {
            let mut f0 = SheafSpec::uniform(c, d, 0, 0);
            let mut f1 = SheafSpec::uniform(c, d, 1, -2);
            for (i, fr) in model.framing.points.iter().enumerate() {
                let p = ChartPoint::Finite(i);
                let h = model.subspace(&fr.h_basis);
                let hp = model.subspace(&fr.perp_basis);
                f0 = f0.with_condition(c, p, LocalCondition { bound: 0, leading: h }).unwrap();
                f1 = f1.with_condition(c, p, LocalCondition { bound: 1, leading: hp }).unwrap();
            }
            (f0, f1)
        }
    }
}

/// `ad`-valued Laurent series of `θ` at a chart point: `(order, ad(coefficient))`.
fn theta_series(model: &FramedHiggsModel, ads: &[Matrix], p: ChartPoint, max_order: i64) -> Vec<(i64, Matrix)> {
    let n = model.curve.n();
    let mut out: Vec<(i64, Matrix)> = Vec::new();
    for (i, ad) in ads.iter().enumerate() {
        let l = PartialFraction::pole(n, i, 1).expand(&model.curve, p, max_order);
        for (j, c) in l.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let o = l.low + j as i64;
            let term = ad.scale(c);
            match out.iter_mut().find(|(oo, _)| *oo == o) {
                Some((_, m)) => *m = m.add(&term),
                None => out.push((o, term)),
            }
        }
    }
    out.retain(|(_, m)| !m.is_zero());
    out.sort_by_key(|(o, _)| *o);
    out
}

/// One basis vector of a tail space, lifted: `v` at `order` at chart slot `slot`.
#[derive(Clone, Debug)]
struct UnitLift {
    slot: usize,
    order: i64,
    v: Vec<Q>,
}

fn unit_lifts(tail: &TailSpace) -> Vec<UnitLift> {
    let mut out = Vec::with_capacity(tail.dim());
    for (slot, pt) in tail.points().iter().enumerate() {
        let d = pt.leading.ambient();
        for o in pt.low..pt.lead {
            for a in 0..d {
                let mut v = vec![Q::zero(); d];
                v[a] = num_traits::One::one();
                out.push(UnitLift { slot, order: o, v });
            }
        }
        for c in pt.leading.complement() {
            out.push(UnitLift { slot, order: pt.lead, v: c.clone() });
        }
    }
    out
}

/// Everything shared by the complexes of one model.
pub struct DefoContext {
    pub model: FramedHiggsModel,
    pub amb0: Ambient,
    pub amb1: Ambient,
    gram: Matrix,
    ads: Vec<Matrix>,
    /// `[θ, ·] : H⁰(B₀) -> H⁰(B₁)`.
    pub f_global: Matrix,
}

/// A two-term complex with its hypercohomology.
#[derive(Clone, Debug)]
pub struct ComplexModel {
    pub kind: ComplexKind,
    pub f0: SheafSpec,
    pub f1: SheafSpec,
    pub tail0: TailSpace,
    pub tail1: TailSpace,
    pub d0: Matrix,
    pub d1: Matrix,
    pub h0: usize,
    pub h1: usize,
    pub h2: usize,
    /// `ℍ¹` as cocycles modulo coboundaries in `T₀ ⊕ H⁰(B₁)`.
    pub hyper1: QuotientSpace,
    /// Basis of the cocycle space `ker d1`.
    pub cocycles: Vec<Vec<Q>>,
    lifts0: Vec<UnitLift>,
}

impl ComplexModel {
    pub fn euler_characteristic(&self) -> i64 {
        self.h0 as i64 - self.h1 as i64 + self.h2 as i64
    }

    /// `χ(F₀) - χ(F₁)` from Riemann–Roch on the specs.
    pub fn expected_euler_characteristic(&self) -> i64 {
        self.f0.euler_characteristic() - self.f1.euler_characteristic()
    }

    /// Cocycle representatives of the `ℍ¹` basis.
    pub fn h1_reps(&self) -> &[Vec<Q>] {
        self.hyper1.reps()
    }
}

impl DefoContext {
    pub fn new(model: FramedHiggsModel, pad: i64) -> Result<Self> {
        let curve = model.curve.clone();
        let n = curve.n();
        let d = model.fiber_dim();
        let specs: Vec<(SheafSpec, SheafSpec)> = [ComplexKind::CPrime, ComplexKind::D, ComplexKind::CPrimeDual]
            .iter()
            .map(|&k| complex_specs(&model, k))
            .collect();
        let f0s: Vec<&SheafSpec> = specs.iter().map(|s| &s.0).collect();
        let amb0 = Ambient::for_specs(&curve, &f0s, pad)?;
        let mut b1 = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let shifted = if k < n { amb0.bounds()[k] + 1 } else { amb0.bounds()[k] - 2 };
            let own = specs.iter().map(|s| s.1.local()[k].bound.max(0)).max().unwrap() + pad;
            b1.push(shifted.max(own).max(0));
        }
        let amb1 = Ambient::new(&curve, d, b1)?;
        let gram = model.form.gram(&model.alg);
        let ads: Vec<Matrix> = model.residues.iter().map(|a| model.alg.ad(a)).collect();

        // [θ, φ_s e_a] = Σ_i (φ_s / (z - x_i)) ad(A_i) e_a
        let mut f_global = Matrix::zeros(amb1.dim(), amb0.dim());
        let poles: Vec<PartialFraction> = (0..n).map(|i| PartialFraction::pole(n, i, 1)).collect();
        for (s, phi) in amb0.scalar_basis().iter().enumerate() {
            let psi: Vec<PartialFraction> = poles.iter().map(|p| phi.mul(p, &curve)).collect();
            for a in 0..d {
                let mut comps = vec![PartialFraction::zero(n); d];
                for (i, ad) in ads.iter().enumerate() {
                    for (c, comp) in comps.iter_mut().enumerate() {
                        let x = &ad[(c, a)];
                        if !x.is_zero() {
                            *comp = comp.add(&psi[i].scale(x));
                        }
                    }
                }
                let col = amb1.coords(&Section { comps })?;
                for (r, v) in col.into_iter().enumerate() {
                    if !v.is_zero() {
                        f_global[(r, s * d + a)] = v;
                    }
                }
            }
        }
        Ok(DefoContext { model, amb0, amb1, gram, ads, f_global })
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    fn theta_at(&self, p: ChartPoint, max_order: i64) -> Vec<(i64, Matrix)> {
        theta_series(&self.model, &self.ads, p, max_order)
    }

    /// `[θ, ·]` on tails: `T₀ -> T₁`, through lifts.
    fn f_bar(&self, tail0: &TailSpace, tail1: &TailSpace, lifts0: &[UnitLift]) -> Matrix {
        let d = self.model.fiber_dim();
        let points = self.model.curve.chart_points();
        let mut m = Matrix::zeros(tail1.dim(), tail0.dim());
        for (k, u) in lifts0.iter().enumerate() {
            let p = points[u.slot];
            let pt1 = &tail1.points()[u.slot];
            let theta = self.theta_at(p, pt1.lead - u.order);
            let mut series = VLaurent::zero(d, pt1.low, pt1.lead);
            for (o, ad) in &theta {
                let order = u.order + o;
                if order < pt1.low || order > pt1.lead {
                    continue;
                }
                let w = ad.mul_vec(&u.v);
                for (a, x) in w.into_iter().enumerate() {
                    series.coeffs[(order - pt1.low) as usize][a] += x;
                }
            }
            let mut col = vec![Q::zero(); tail1.dim()];
            tail1.write_coords(pt1, &series, &mut col);
            for (r, v) in col.into_iter().enumerate() {
                if !v.is_zero() {
                    m[(r, k)] = v;
                }
            }
        }
        m
    }

    pub fn complex(&self, kind: ComplexKind) -> Result<ComplexModel> {
        let (f0, f1) = complex_specs(&self.model, kind);
        let tail0 = TailSpace::new(&self.amb0, &f0)?;
        let tail1 = TailSpace::new(&self.amb1, &f1)?;
        let t0 = tail0.tail_matrix(&self.amb0);
        let t1 = tail1.tail_matrix(&self.amb1);
        let lifts0 = unit_lifts(&tail0);
        let fbar = self.f_bar(&tail0, &tail1, &lifts0);
        let d0 = t0.vcat(&self.f_global);
        let d1 = fbar.neg().hcat(&t1);
        if !d1.mul(&d0).is_zero() {
            return Err(Error::Internal(format!("d1 ∘ d0 != 0 for complex {}", kind.label())));
        }
        let cocycles = d1.kernel();
        let rank1 = d1.cols() - cocycles.len();
        // preferred representatives: (0, u) for u ∈ H⁰(F₁)
        let len = d1.cols();
        let preferred: Vec<Vec<Q>> = t1
            .kernel()
            .into_iter()
            .map(|u| {
                let mut v = vec![Q::zero(); tail0.dim()];
                v.extend(u);
                v
            })
            .collect();
        let hyper1 = QuotientSpace::new(len, &cocycles, &d0.columns(), &preferred);
        let rank0 = hyper1.boundary().len();
        let h0 = d0.cols() - rank0;
        let h1 = cocycles.len() - rank0;
        let h2 = d1.rows() - rank1;
        if hyper1.dim() != h1 {
            return Err(Error::Internal("hypercohomology dimension mismatch".into()));
        }
        Ok(ComplexModel { kind, f0, f1, tail0, tail1, d0, d1, h0, h1, h2, hyper1, cocycles, lifts0 })
    }

    /// Cochain-level pairing on `(T₀ ⊕ H⁰(B₁))` of `x` against `y`:
    /// `Σ_p res_p [σ(t_p, u') - σ(u - [θ, t_p], t'_p)]`.
    pub fn pairing_matrix(&self, x: &ComplexModel, y: &ComplexModel) -> Matrix {
        let m1x = self.m1(&x.lifts0);
        let m1y = self.m1(&y.lifts0);
        let m3 = self.m3(&x.lifts0, &y.lifts0);
        let top = m3.hcat(&m1x);
        let zero = Matrix::zeros(self.amb1.dim(), self.amb1.dim());
        let bottom = m1y.transpose().neg().hcat(&zero);
        top.vcat(&bottom)
    }

    /// `Σ_p res_p σ(lift t, u)` for tail basis vectors against `H⁰(B₁)` basis vectors.
    fn m1(&self, lifts: &[UnitLift]) -> Matrix {
        let d = self.model.fiber_dim();
        let points = self.model.curve.chart_points();
        let mut m = Matrix::zeros(lifts.len(), self.amb1.dim());
        let mut cache: Vec<Option<(i64, Vec<crate::curve::Laurent>)>> = vec![None; points.len()];
        for (k, u) in lifts.iter().enumerate() {
            let p = points[u.slot];
            let (partner, sign) = match p {
                ChartPoint::Finite(_) => (-1 - u.order, Q::from_integer(1.into())),
                ChartPoint::Infinity => (1 - u.order, Q::from_integer((-1).into())),
            };
            let need = cache[u.slot].as_ref().is_none_or(|(mx, _)| *mx < partner);
            if need {
                let mx = match p {
                    ChartPoint::Finite(_) => -1 + self.amb0.bound(p),
                    ChartPoint::Infinity => 1 + self.amb0.bound(p),
                }
                .max(partner);
                cache[u.slot] = Some((mx, self.amb1.scalar_expansions(p, mx)));
            }
            let ex = &cache[u.slot].as_ref().unwrap().1;
            let gv = self.gram.mul_vec(&u.v);
            for (s, l) in ex.iter().enumerate() {
                let c = l.coeff(partner);
                if c.is_zero() {
                    continue;
                }
                for a in 0..d {
                    if !gv[a].is_zero() {
                        m[(k, s * d + a)] = &sign * &c * &gv[a];
                    }
                }
            }
        }
        m
    }

    /// `Σ_p res_p σ([θ, lift t], lift t')`.
    fn m3(&self, lx: &[UnitLift], ly: &[UnitLift]) -> Matrix {
        let points = self.model.curve.chart_points();
        let mut m = Matrix::zeros(lx.len(), ly.len());
        let thetas: Vec<Vec<(i64, Matrix)>> = points
            .iter()
            .map(|&p| {
                let b = self.amb0.bound(p);
                let mx = match p {
                    ChartPoint::Finite(_) => 2 * b - 1,
                    ChartPoint::Infinity => 2 * b + 1,
                };
                self.theta_at(p, mx)
            })
            .collect();
        for (i, a) in lx.iter().enumerate() {
            let p = points[a.slot];
            for (j, b) in ly.iter().enumerate() {
                if a.slot != b.slot {
                    continue;
                }
                let (target, sign) = match p {
                    ChartPoint::Finite(_) => (-1 - a.order - b.order, 1),
                    ChartPoint::Infinity => (1 - a.order - b.order, -1),
                };
                let Some((_, ad)) = thetas[a.slot].iter().find(|(o, _)| *o == target) else {
                    continue;
                };
                let w = ad.mul_vec(&a.v);
                let v = crate::linalg::dot(&w, &self.gram.mul_vec(&b.v));
                if !v.is_zero() {
                    m[(i, j)] = if sign > 0 { v } else { -v };
                }
            }
        }
        m
    }

    /// Matrix of the map on `T₀ ⊕ H⁰(B₁)` induced by `F_x ⊆ F_y` (lift, then
    /// project on tails; identity on global sections).
    pub fn cochain_inclusion(&self, x: &ComplexModel, y: &ComplexModel) -> Matrix {
        let mut m = Matrix::zeros(y.tail0.dim() + self.amb1.dim(), x.tail0.dim() + self.amb1.dim());
        let d = self.model.fiber_dim();
        for (k, u) in x.lifts0.iter().enumerate() {
            let pt = &y.tail0.points()[u.slot];
            let mut s = VLaurent::zero(d, pt.low, pt.lead);
            if u.order <= pt.lead {
                s.coeffs[(u.order - pt.low) as usize] = u.v.clone();
            }
            let mut col = vec![Q::zero(); y.tail0.dim()];
            y.tail0.write_coords(pt, &s, &mut col);
            for (r, v) in col.into_iter().enumerate() {
                if !v.is_zero() {
                    m[(r, k)] = v;
                }
            }
        }
        for j in 0..self.amb1.dim() {
            m[(y.tail0.dim() + j, x.tail0.dim() + j)] = num_traits::One::one();
        }
        m
    }

    /// Matrix of `ℍ¹(x) -> ℍ¹(y)` in the chosen bases.
    pub fn induced_map(&self, x: &ComplexModel, y: &ComplexModel) -> Result<Matrix> {
        let inc = self.cochain_inclusion(x, y);
        let mut cols = Vec::with_capacity(x.h1);
        for r in x.h1_reps() {
            let img = inc.mul_vec(r);
            let c = y.hyper1.coords(&img).ok_or_else(|| {
                Error::Internal(format!(
                    "inclusion {} -> {} does not map cocycles to cocycles",
                    x.kind.label(),
                    y.kind.label()
                ))
            })?;
            cols.push(c);
        }
        Ok(Matrix::from_columns(y.h1, &cols))
    }

    /// Gram matrix `Φ(α_i, β_j)` on the `ℍ¹` bases, after checking that every
    /// coboundary pairs to zero with every cocycle on both sides.
    pub fn class_pairing(&self, x: &ComplexModel, y: &ComplexModel) -> Result<Matrix> {
        let m = self.pairing_matrix(x, y);
        let zx = Matrix::from_columns(m.rows(), &x.cocycles);
        let zy = Matrix::from_columns(m.cols(), &y.cocycles);
        let bx = Matrix::from_columns(m.rows(), x.hyper1.boundary());
        let by = Matrix::from_columns(m.cols(), y.hyper1.boundary());
        if !bx.transpose().mul(&m.mul(&zy)).is_zero() || !zx.transpose().mul(&m).mul(&by).is_zero() {
            return Err(Error::Internal(format!(
                "pairing {} x {} depends on the cocycle representative",
                x.kind.label(),
                y.kind.label()
            )));
        }
        let rx = Matrix::from_columns(m.rows(), x.h1_reps());
        let ry = Matrix::from_columns(m.cols(), y.h1_reps());
        Ok(rx.transpose().mul(&m).mul(&ry))
    }
}

/// Hypercohomology dimensions of a complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct HyperDims {
    pub h0: usize,
    pub h1: usize,
    pub h2: usize,
    pub euler: i64,
    pub expected_euler: i64,
}

impl From<&ComplexModel> for HyperDims {
    fn from(c: &ComplexModel) -> Self {
        HyperDims {
            h0: c.h0,
            h1: c.h1,
            h2: c.h2,
            euler: c.euler_characteristic(),
            expected_euler: c.expected_euler_characteristic(),
        }
    }
}

/// All matrices attached to one model.
#[derive(Clone, Debug)]
pub struct HypercohResult {
    pub d: HyperDims,
    pub c_prime: HyperDims,
    pub c_dual: HyperDims,
    /// `Φ` on `ℍ¹(D)`.
    pub phi: Matrix,
    /// Serre pairing `ℍ¹(C'^∨) x ℍ¹(C')`.
    pub serre: Matrix,
    /// `dφ : ℍ¹(D) -> ℍ¹(C')`.
    pub forget: Matrix,
    /// `ℍ¹(C'^∨) -> ℍ¹(D)`, the transpose side of the identity.
    pub dual_forget: Matrix,
    /// `ℍ¹(C'^∨) -> ℍ¹(C')`.
    pub inclusion: Matrix,
    /// `P` in dual-basis coordinates, `ℍ¹(C')^* -> ℍ¹(C')`.
    pub poisson: Option<Matrix>,
}

pub fn analyze(model: &FramedHiggsModel) -> Result<HypercohResult> {
    analyze_with_pad(model, DEFAULT_PAD)
}

pub fn analyze_with_pad(model: &FramedHiggsModel, pad: i64) -> Result<HypercohResult> {
    let ctx = DefoContext::new(model.clone(), pad)?;
    let cp = ctx.complex(ComplexKind::CPrime)?;
    let dd = ctx.complex(ComplexKind::D)?;
    let cd = ctx.complex(ComplexKind::CPrimeDual)?;
    let phi = ctx.class_pairing(&dd, &dd)?;
    let serre = ctx.class_pairing(&cd, &cp)?;
    let forget = ctx.induced_map(&dd, &cp)?;
    let dual_forget = ctx.induced_map(&cd, &dd)?;
    let inclusion = ctx.induced_map(&cd, &cp)?;
    let poisson = serre.transpose().inverse().map(|sinv_t| inclusion.mul(&sinv_t));
    Ok(HypercohResult {
        d: HyperDims::from(&dd),
        c_prime: HyperDims::from(&cp),
        c_dual: HyperDims::from(&cd),
        phi,
        serre,
        forget,
        dual_forget,
        inclusion,
        poisson,
    })
}

/// Both complexes `(C', D)` of a model.
pub fn build_complexes(model: &FramedHiggsModel) -> Result<(ComplexModel, ComplexModel)> {
    let ctx = DefoContext::new(model.clone(), DEFAULT_PAD)?;
    Ok((ctx.complex(ComplexKind::CPrime)?, ctx.complex(ComplexKind::D)?))
}

pub fn hypercoh(model: &FramedHiggsModel) -> Result<HyperDims> {
    let (_, d) = build_complexes(model)?;
    Ok(HyperDims::from(&d))
}

pub fn symplectic_matrix(model: &FramedHiggsModel) -> Result<Matrix> {
    Ok(analyze(model)?.phi)
}

pub fn poisson_matrix(model: &FramedHiggsModel) -> Result<Matrix> {
    analyze(model)?.poisson.ok_or_else(|| Error::Internal("Serre pairing is degenerate".into()))
}

/// Outcome of the matrix identity check.
#[derive(Clone, Debug)]
pub struct PoissonIdentityCheck {
    pub holds: bool,
    pub residual: Matrix,
    /// Residual with `dφ*` replaced by `-dφ*`.
    pub corrupted_residual: Matrix,
    /// `Φ(Jα, β) = S(α, Iβ)`: the dual forgetful map is the transpose of `dφ`.
    pub adjunction_holds: bool,
}

impl HypercohResult {
    /// `dφ Φ⁻ᵀ dφᵀ - R S⁻ᵀ`, with functionals identified through `Φ` and `S`.
    pub fn poisson_identity(&self) -> Result<PoissonIdentityCheck> {
        let phi_inv_t = self.phi.transpose().inverse().ok_or_else(|| {
            let k = self.phi.kernel();
            Error::Precondition(format!("Φ is singular; {} degenerate direction(s): {:?}", k.len(), k))
        })?;
        let p = self.poisson.clone().ok_or_else(|| Error::Precondition("Serre pairing is degenerate".into()))?;
        let lhs = self.forget.mul(&phi_inv_t).mul(&self.forget.transpose());
        let residual = lhs.sub(&p);
        let corrupted_residual = lhs.neg().sub(&p);
        let adjunction = self.dual_forget.transpose().mul(&self.phi).sub(&self.serre.mul(&self.forget));
        Ok(PoissonIdentityCheck {
            holds: residual.is_zero(),
            residual,
            corrupted_residual,
            adjunction_holds: adjunction.is_zero(),
        })
    }

    /// `S R` must be skew: `⟨Pα, β⟩ + ⟨Pβ, α⟩ = 0`.
    pub fn poisson_is_skew(&self) -> bool {
        self.serre.mul(&self.inclusion).is_skew()
    }
}

pub fn verify_poisson_identity(model: &FramedHiggsModel) -> Result<PoissonIdentityCheck> {
    analyze(model)?.poisson_identity()
}

/// Convenience: a model with the same framing kind at every point.
pub fn uniform_model(
    alg: LieAlgebra,
    points: Vec<Q>,
    kind: FramingKind,
    sampler: &mut RationalSampler,
) -> Result<FramedHiggsModel> {
    let form = InvariantForm::trace(alg.id());
    let curve = MarkedCurve::rational(points)?;
    let framing = FramingSpec::uniform(&alg, &form, kind, curve.n())?;
    FramedHiggsModel::random(alg, form, curve, framing, sampler)
}
