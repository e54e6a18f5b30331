//! Exact rationals and the small ring abstraction shared by the symbolic code.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-7/2"` or a plain decimal such as `"0.25"`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        let n: BigInt = digits.parse().ok()?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let v = Q::new(n, d);
        return Some(if neg { -v } else { v });
    }
    s.parse::<BigInt>().ok().map(Q::from_integer)
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = x.numer().to_f64().unwrap_or(f64::MAX);
        let d = x.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

pub fn q_abs(x: &Q) -> Q {
    x.abs()
}

/// Binomial coefficient `C(n, k)` as a rational (zero outside `0 <= k <= n`).
pub fn binom(n: i64, k: i64) -> Q {
    if k < 0 || n < 0 || k > n {
        return Q::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Q::from_integer(acc)
}

/// Commutative ring with a `Q`-algebra structure.
pub trait Ring: Clone + PartialEq + fmt::Debug {
    fn zero_el() -> Self;
    fn one_el() -> Self;
    fn is_zero_el(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &Q) -> Self;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

impl Ring for Q {
    fn zero_el() -> Self {
        Zero::zero()
    }
    fn one_el() -> Self {
        One::one()
    }
    fn is_zero_el(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &Q) -> Self {
        self * c
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

/// Coefficients `e_1..e_r` of `det(λ - M) = λ^r - e_1 λ^{r-1} + e_2 λ^{r-2} - ...`,
/// i.e. the elementary symmetric functions of the eigenvalues. Faddeev–LeVerrier,
/// so only ring operations and division by small integers are used.
pub fn elementary_invariants<R: Ring>(m: &[Vec<R>]) -> Vec<R> {
    let r = m.len();
    let mut out = Vec::with_capacity(r);
    // M_k = A M_{k-1} + c_{r-k+1} I, c_{r-k} = -tr(A M_k)/k, with c_r = 1.
    let mut mk: Vec<Vec<R>> = vec![vec![R::zero_el(); r]; r];
    let mut c_prev = R::one_el();
    for k in 1..=r {
        let mut next = mat_mul(m, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] = row[i].add(&c_prev);
        }
        let am = mat_mul(m, &next);
        let mut tr = R::zero_el();
        for (i, row) in am.iter().enumerate() {
            tr = tr.add(&row[i]);
        }
        let c = tr.scale(&qr(-1, k as i64));
        // c_{r-k} = (-1)^k e_k
        out.push(if k % 2 == 0 { c.clone() } else { c.neg() });
        c_prev = c;
        mk = next;
    }
    out
}

/// Pfaffian of an antisymmetric matrix of even size, by expansion along the first row.
pub fn pfaffian<R: Ring>(a: &[Vec<R>]) -> R {
    let n = a.len();
    if n == 0 {
        return R::one_el();
    }
    if n % 2 == 1 {
        return R::zero_el();
    }
    let mut acc = R::zero_el();
    for j in 1..n {
        if a[0][j].is_zero_el() {
            continue;
        }
        let keep: Vec<usize> = (1..n).filter(|&k| k != j).collect();
        let minor: Vec<Vec<R>> = keep.iter().map(|&r| keep.iter().map(|&c| a[r][c].clone()).collect()).collect();
        let term = a[0][j].mul(&pfaffian(&minor));
        acc = if j % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

pub fn mat_mul<R: Ring>(a: &[Vec<R>], b: &[Vec<R>]) -> Vec<Vec<R>> {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let inner = b.len();
    let mut out = vec![vec![R::zero_el(); m]; n];
    for i in 0..n {
        for k in 0..inner {
            if a[i][k].is_zero_el() {
                continue;
            }
            for j in 0..m {
                if b[k][j].is_zero_el() {
                    continue;
                }
                out[i][j] = out[i][j].add(&a[i][k].mul(&b[k][j]));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_q("-7/2"), Some(qr(-7, 2)));
        assert_eq!(parse_q(" 3 "), Some(q(3)));
        assert_eq!(parse_q("0.25"), Some(qr(1, 4)));
        assert_eq!(parse_q("-1.5"), Some(qr(-3, 2)));
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(parse_q("x"), None);
    }

    #[test]
    fn elementary_invariants_of_2x2() {
        let m = vec![vec![q(1), q(2)], vec![q(3), q(4)]];
        assert_eq!(elementary_invariants(&m), vec![q(5), q(-2)]);
    }

    #[test]
    fn pfaffian_4x4() {
        // Pf = a12 a34 - a13 a24 + a14 a23
        let mut a = vec![vec![q(0); 4]; 4];
        let vals = [(0, 1, 2), (0, 2, 3), (0, 3, 5), (1, 2, 7), (1, 3, 11), (2, 3, 13)];
        for &(i, j, v) in &vals {
            a[i][j] = q(v);
            a[j][i] = q(-v);
        }
        assert_eq!(pfaffian(&a), q(2 * 13 - 3 * 11 + 5 * 7));
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(5, 2), q(10));
        assert_eq!(binom(3, 4), q(0));
        assert_eq!(binom(0, 0), q(1));
    }
}
