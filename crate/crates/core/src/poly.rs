//! Sparse multivariate polynomials over `Q` and dense univariate polynomials
//! over any [`Ring`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::exact::{binom, to_f64, Ring, Q};

/// Exponent vector as sorted `(variable, exponent)` pairs, exponents > 0.
pub type Monomial = Vec<(u32, u32)>;

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Polynomial in variables `y_0, y_1, ...` with exact coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MPoly {
    terms: BTreeMap<Monomial, Q>,
}

impl MPoly {
    pub fn constant(c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        MPoly { terms }
    }

    pub fn var(i: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![(i as u32, 1)], Q::one());
        MPoly { terms }
    }

    /// `Σ coeffs[i] y_i`.
    pub fn linear(coeffs: &[Q]) -> Self {
        let mut terms = BTreeMap::new();
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                terms.insert(vec![(i as u32, 1)], c.clone());
            }
        }
        MPoly { terms }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().map(|e| e.1).sum()).max().unwrap_or(0)
    }

    /// True when every term has total degree exactly `d`.
    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.iter().map(|e| e.1).sum::<u32>() == d)
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn derivative(&self, var: usize) -> MPoly {
        let v = var as u32;
        let mut out = MPoly::default();
        for (m, c) in &self.terms {
            if let Some(pos) = m.iter().position(|e| e.0 == v) {
                let e = m[pos].1;
                let mut nm = m.clone();
                if e == 1 {
                    nm.remove(pos);
                } else {
                    nm[pos].1 = e - 1;
                }
                out.add_term(nm, c * Q::from_integer(e.into()));
            }
        }
        out
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m {
                let x = &point[v as usize];
                if x.is_zero() {
                    t = Q::zero();
                    break;
                }
                t *= num_traits::pow(x.clone(), e as usize);
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = to_f64(c);
            for &(v, e) in m {
                t *= point[v as usize].powi(e as i32);
            }
            acc += t;
        }
        acc
    }

    /// Largest variable index appearing, plus one.
    pub fn num_vars(&self) -> usize {
        self.terms.keys().flat_map(|m| m.iter().map(|e| e.0 as usize + 1)).max().unwrap_or(0)
    }
}

/// Precompiled form of an [`MPoly`] for repeated floating-point evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    pub fn new(p: &MPoly) -> Self {
        CompiledPoly {
            terms: p
                .terms()
                .map(|(m, c)| (to_f64(c), m.iter().map(|&(v, e)| (v as usize, e as i32)).collect()))
                .collect(),
        }
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (c, m) in &self.terms {
            let mut t = *c;
            for &(v, e) in m {
                t *= if e == 1 { point[v] } else { point[v].powi(e) };
            }
            acc += t;
        }
        acc
    }
}

impl Ring for MPoly {
    fn zero_el() -> Self {
        MPoly::default()
    }
    fn one_el() -> Self {
        MPoly::constant(Q::one())
    }
    fn is_zero_el(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
    fn mul(&self, other: &Self) -> Self {
        let mut out = MPoly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }
    fn neg(&self) -> Self {
        MPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
    fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return MPoly::default();
        }
        MPoly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for &(v, e) in m {
                if e == 1 {
                    write!(f, "*y{v}")?;
                } else {
                    write!(f, "*y{v}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Dense univariate polynomial, coefficients low degree first, no trailing zeros.
#[derive(Clone, PartialEq, Debug)]
pub struct UPoly<R: Ring> {
    coeffs: Vec<R>,
}

impl<R: Ring> UPoly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero_el()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn constant(c: R) -> Self {
        UPoly::new(vec![c])
    }

    /// `t - a`.
    pub fn linear_root(a: &Q) -> Self {
        UPoly::new(vec![R::one_el().scale(&-a), R::one_el()])
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    /// Coefficient of `t^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> R {
        self.coeffs.get(k).cloned().unwrap_or_else(R::zero_el)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> R {
        self.coeffs.last().cloned().unwrap_or_else(R::zero_el)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one_el();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `p(t + a)`, by Horner in `t + a`.
    pub fn shift(&self, a: &Q) -> Self {
        let lin = UPoly::new(vec![R::one_el().scale(a), R::one_el()]);
        let mut acc = Self::zero_el();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&UPoly::constant(c.clone()));
        }
        acc
    }

    /// Truncates to terms of degree `< k`.
    pub fn truncate(&self, k: usize) -> Self {
        UPoly::new(self.coeffs.iter().take(k).cloned().collect())
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> UPoly<S> {
        UPoly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<R: Ring> Ring for UPoly<R> {
    fn zero_el() -> Self {
        UPoly { coeffs: Vec::new() }
    }
    fn one_el() -> Self {
        UPoly::constant(R::one_el())
    }
    fn is_zero_el(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::new((0..n).map(|k| self.coeff(k).add(&other.coeff(k))).collect())
    }
    fn mul(&self, other: &Self) -> Self {
        if self.is_zero_el() || other.is_zero_el() {
            return Self::zero_el();
        }
        let mut out = vec![R::zero_el(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero_el() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero_el() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        UPoly::new(out)
    }
    fn neg(&self) -> Self {
        UPoly { coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }
    fn scale(&self, c: &Q) -> Self {
        UPoly::new(self.coeffs.iter().map(|x| x.scale(c)).collect())
    }
}

/// Rational polynomials: evaluation, division, gcd, root counting.
pub type QPoly = UPoly<Q>;

impl UPoly<Q> {
    pub fn from_i64(c: &[i64]) -> Self {
        UPoly::new(c.iter().map(|&x| crate::exact::q(x)).collect())
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = <Q as Zero>::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + to_f64(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        UPoly::new(
            self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * Q::from_integer((k as i64).into())).collect(),
        )
    }

    pub fn monic(&self) -> Self {
        if self.is_zero_el() {
            return self.clone();
        }
        self.scale(&(Q::one() / self.leading()))
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero_el(), "division by the zero polynomial");
        let dd = d.degree().unwrap();
        let lc = d.leading();
        let mut r = self.coeffs.clone();
        let mut qv = vec![<Q as Zero>::zero(); self.coeffs.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = r.last().unwrap() / &lc;
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] -= &c * dc;
            }
            qv[k] = c;
            r.pop();
            while r.last().is_some_and(|x| x.is_zero_el()) {
                r.pop();
            }
        }
        (UPoly::new(qv), UPoly::new(r))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero_el() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn is_square_free(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(&self.derivative()).degree() == Some(0),
        }
    }

    /// Square-free part `p / gcd(p, p')`, monic.
    pub fn square_free_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Multiplicity of the root `a`.
    pub fn root_multiplicity(&self, a: &Q) -> usize {
        if self.is_zero_el() {
            return usize::MAX;
        }
        let lin = UPoly::linear_root(a);
        let mut p = self.clone();
        let mut m = 0;
        loop {
            let (qq, r) = p.div_rem(&lin);
            if !r.is_zero_el() {
                return m;
            }
            p = qq;
            m += 1;
        }
    }

    /// All rational roots (each once). Each real root of the square-free part
    /// is isolated to width below `1/(2L²)`, `L` the leading coefficient of its
    /// primitive integer form; a rational root has denominator dividing `L`, so
    /// it must be the simplest fraction in its interval, which is then tested.
    pub fn rational_roots(&self) -> Vec<Q> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let sf = self.square_free_part();
        let lc = Q::from_integer(integer_coeffs(&sf).last().unwrap().abs());
        let target = Q::one() / (Q::from_integer(2.into()) * &lc * &lc);
        let f = IntPoly::new(&sf);
        let mut roots = Vec::new();
        for (lo, hi) in isolate_real_roots(&sf, &target) {
            // exactly one root in (lo, hi]
            let c = if f.sign_at(&hi).is_eq() { hi } else { simplest_rational(&lo, &hi) };
            if f.sign_at(&c).is_eq() {
                roots.push(c);
            }
        }
        roots.sort();
        roots.dedup();
        roots
    }

    /// Yun's square-free factorization: `p = c Π f_k^k` with `f_k` monic,
    /// square-free and pairwise coprime. Returns the nonconstant `(f_k, k)`.
    pub fn square_free_factorization(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).0;
        let c = df.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut k = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), k));
            }
            let nb = b.div_rem(&a).0;
            let c = d.div_rem(&a).0;
            d = c.sub(&nb.derivative());
            b = nb;
            k += 1;
        }
        out
    }

    /// Sturm sequence `p, p', -rem(p, p'), ...`, each term rescaled by a
    /// positive constant to a primitive integer polynomial (sign changes are
    /// unaffected, coefficient growth is).
    pub fn sturm_sequence(&self) -> Vec<Self> {
        let prim = |p: &Self| Self::new(integer_coeffs(p).into_iter().map(Q::from_integer).collect());
        let mut seq = vec![prim(self), prim(&self.derivative())];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero_el() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero_el() {
                break;
            }
            seq.push(prim(&r.neg()));
        }
        seq
    }

    /// Bound on the absolute value of every complex root (Cauchy).
    pub fn root_bound(&self) -> Q {
        let lc = self.leading();
        let mut m = <Q as Zero>::zero();
        for c in &self.coeffs[..self.coeffs.len() - 1] {
            let v = (c / &lc).abs();
            if v > m {
                m = v;
            }
        }
        m + Q::one()
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(to_f64).collect()
    }
}

/// Integer coefficients, evaluated by sign only.
struct IntPoly(Vec<BigInt>);

impl IntPoly {
    fn new(p: &QPoly) -> Self {
        IntPoly(integer_coeffs(p))
    }

    /// Sign of `p(a/b)` from `Σ c_k a^k b^(d-k)`, `b > 0`.
    fn sign_at(&self, x: &Q) -> std::cmp::Ordering {
        let (a, b) = (x.numer(), x.denom());
        let d = self.0.len();
        // b^(d-1-k) multiplies c_k
        let mut pows = Vec::with_capacity(d);
        let mut bp = BigInt::one();
        for _ in 0..d {
            pows.push(bp.clone());
            bp *= b;
        }
        let mut v = BigInt::zero();
        for (k, c) in self.0.iter().enumerate().rev() {
            v = v * a + c * &pows[d - 1 - k];
        }
        v.sign().into_ordering()
    }
}

trait SignOrdering {
    fn into_ordering(self) -> std::cmp::Ordering;
}

impl SignOrdering for num_bigint::Sign {
    fn into_ordering(self) -> std::cmp::Ordering {
        match self {
            num_bigint::Sign::Minus => std::cmp::Ordering::Less,
            num_bigint::Sign::NoSign => std::cmp::Ordering::Equal,
            num_bigint::Sign::Plus => std::cmp::Ordering::Greater,
        }
    }
}

fn sign_changes(seq: &[IntPoly], x: &Q) -> usize {
    let mut last = None;
    let mut n = 0;
    for p in seq {
        let s = p.sign_at(x);
        if s == std::cmp::Ordering::Equal {
            continue;
        }
        if last.is_some_and(|l| l != s) {
            n += 1;
        }
        last = Some(s);
    }
    n
}

/// Number of distinct real roots of `seq[0]` in `(a, b]`, for a Sturm sequence.
pub fn count_real_roots(seq: &[QPoly], a: &Q, b: &Q) -> usize {
    let seq: Vec<IntPoly> = seq.iter().map(IntPoly::new).collect();
    sign_changes(&seq, a).saturating_sub(sign_changes(&seq, b))
}

/// Isolating intervals `[lo, hi]` of width at most `width` for the distinct real
/// roots of `p`. Endpoints are exact; a root lies in the half-open `(lo, hi]`.
pub fn isolate_real_roots(p: &QPoly, width: &Q) -> Vec<(Q, Q)> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let sf = p.square_free_part();
    let seq: Vec<IntPoly> = sf.sturm_sequence().iter().map(IntPoly::new).collect();
    let f = IntPoly::new(&sf);
    let b = sf.root_bound();
    let two = Q::from_integer(2.into());
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        let k = sign_changes(&seq, &lo).saturating_sub(sign_changes(&seq, &hi));
        if k == 0 {
            continue;
        }
        if k == 1 {
            out.push(refine_simple_root(&f, lo, hi, width));
            continue;
        }
        let mid = (&lo + &hi) / &two;
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    out.sort();
    out
}

/// Shrinks `(lo, hi]`, which holds exactly one root of the square-free `f`,
/// to width at most `width` by sign bisection.
fn refine_simple_root(f: &IntPoly, mut lo: Q, mut hi: Q, width: &Q) -> (Q, Q) {
    use std::cmp::Ordering::Equal;
    let two = Q::from_integer(2.into());
    let at_root = |lo: &Q, r: Q| {
        let l = (&r - width).max(lo.clone());
        (l, r)
    };
    let mut s_hi = f.sign_at(&hi);
    if s_hi == Equal {
        return at_root(&lo, hi);
    }
    while &hi - &lo > *width {
        let mid = (&lo + &hi) / &two;
        let s = f.sign_at(&mid);
        if s == Equal {
            return at_root(&lo, mid);
        }
        // the root is where the sign differs from the sign at hi
        if s == s_hi {
            hi = mid;
            s_hi = s;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

fn integer_coeffs(p: &QPoly) -> Vec<BigInt> {
    use num_integer::Integer;
    let mut l = BigInt::one();
    for c in p.coeffs() {
        l = l.lcm(c.denom());
    }
    p.coeffs().iter().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect()
}

/// The fraction with the smallest denominator in `[lo, hi]`.
pub fn simplest_rational(lo: &Q, hi: &Q) -> Q {
    assert!(lo <= hi);
    if lo.is_positive() {
        let fl = lo.floor();
        if fl == *lo {
            return fl;
        }
        if fl.clone() + Q::one() <= *hi {
            return fl + Q::one();
        }
        let inner = simplest_rational(&(Q::one() / (hi - &fl)), &(Q::one() / (lo - &fl)));
        fl + Q::one() / inner
    } else if hi.is_negative() {
        -simplest_rational(&-hi, &-lo)
    } else {
        Q::zero()
    }
}

/// Power-series coefficients of `(c + t)^{-k}` in `t`, truncated to `len` terms.
pub fn inverse_power_series(c: &Q, k: i64, len: usize) -> Vec<Q> {
    // (c + t)^{-k} = c^{-k} Σ_m (-1)^m C(k+m-1, m) (t/c)^m
    let ck = num_traits::pow(Q::one() / c, k as usize);
    (0..len)
        .map(|m| {
            let s = if m % 2 == 0 { Q::one() } else { -Q::one() };
            s * binom(k + m as i64 - 1, m as i64) * &ck * num_traits::pow(Q::one() / c, m)
        })
        .collect()
}
