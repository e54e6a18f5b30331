use hfb::exact::{q, qr, Ring, Q};
use hfb::linalg::{EchelonBasis, Matrix, QuotientSpace};
use hfb::poly::{isolate_real_roots, simplest_rational, QPoly, UPoly};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Q> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| qr(n, d))
}

/// Rank-deficient matrices are common when entries are drawn from a small set.
fn matrix(max: usize) -> impl Strategy<Value = Matrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop_oneof![3 => Just(q(0)), 2 => rational()], r * c)
            .prop_map(move |v| Matrix::from_rows(v.chunks(c).map(<[Q]>::to_vec).collect()))
    })
}

fn poly_from_roots(roots: &[(Q, usize)], lead: &Q) -> QPoly {
    let mut p = QPoly::constant(lead.clone());
    for (r, k) in roots {
        p = p.mul(&UPoly::linear_root(r).pow(*k));
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_is_annihilated_and_rank_nullity_holds(a in matrix(6)) {
        let k = a.kernel();
        for v in &k {
            prop_assert!(a.mul_vec(v).iter().all(|x| *x == q(0)));
        }
        prop_assert_eq!(a.rank() + k.len(), a.cols());
        prop_assert_eq!(a.rank(), a.transpose().rank());
    }

    #[test]
    fn inverse_and_determinant_agree(a in matrix(5)) {
        if a.is_square() {
            match a.inverse() {
                Some(inv) => {
                    prop_assert_eq!(a.mul(&inv), Matrix::identity(a.rows()));
                    prop_assert!(a.determinant() != q(0));
                }
                None => prop_assert_eq!(a.determinant(), q(0)),
            }
        }
    }

    #[test]
    fn echelon_coordinates_round_trip(a in matrix(6), c in prop::collection::vec(rational(), 6)) {
        let rows = a.to_rows();
        let basis = EchelonBasis::new(a.cols(), &rows);
        prop_assert_eq!(basis.dim(), a.rank());
        // a combination of the rows lies in the span and lifts back exactly
        let mut v = vec![q(0); a.cols()];
        for (r, x) in rows.iter().zip(&c) {
            for (vi, ri) in v.iter_mut().zip(r) {
                *vi += x * ri;
            }
        }
        let coords = basis.coords(&v).expect("combination of rows lies in the span");
        prop_assert_eq!(basis.lift(&coords), v);
    }

    #[test]
    fn quotient_kills_boundaries(a in matrix(5), c in prop::collection::vec(rational(), 5)) {
        // cycles = everything, boundaries = column space of a
        let len = a.rows();
        let all: Vec<Vec<Q>> = (0..len).map(|i| (0..len).map(|j| if i == j { q(1) } else { q(0) }).collect()).collect();
        let qs = QuotientSpace::new(len, &all, &a.columns(), &[]);
        prop_assert_eq!(qs.dim(), len - a.rank());
        let b = a.mul_vec(&c[..a.cols()]);
        prop_assert!(qs.coords(&b).unwrap().iter().all(|x| *x == q(0)));
    }

    #[test]
    fn rational_roots_are_recovered(
        roots in prop::collection::vec((rational(), 1usize..=3), 1..=4),
        lead in rational().prop_filter("nonzero", |x| *x != q(0)),
        irreducible in any::<bool>(),
    ) {
        let mut p = poly_from_roots(&roots, &lead);
        if irreducible {
            // x^2 - 2 contributes no rational roots
            p = p.mul(&QPoly::from_i64(&[-2, 0, 1]));
        }
        let mut expected: Vec<Q> = roots.iter().map(|(r, _)| r.clone()).collect();
        expected.sort();
        expected.dedup();
        prop_assert_eq!(p.rational_roots(), expected.clone());
        for r in &expected {
            let k: usize = roots.iter().filter(|(x, _)| x == r).map(|(_, k)| k).sum();
            prop_assert_eq!(p.root_multiplicity(r), k);
        }
        // isolating intervals: one per distinct real root
        let w = qr(1, 1000);
        let iv = isolate_real_roots(&p, &w);
        prop_assert_eq!(iv.len(), expected.len() + if irreducible { 2 } else { 0 });
        for (lo, hi) in &iv {
            prop_assert!(hi - lo <= w);
        }
    }

    #[test]
    fn square_free_factorization_reconstructs(
        roots in prop::collection::vec((rational(), 1usize..=4), 1..=4),
        lead in rational().prop_filter("nonzero", |x| *x != q(0)),
    ) {
        let p = poly_from_roots(&roots, &lead);
        let parts = p.square_free_factorization();
        let mut prod = QPoly::constant(p.leading());
        for (f, k) in &parts {
            prop_assert!(f.is_square_free());
            prod = prod.mul(&f.pow(*k));
        }
        prop_assert_eq!(prod, p);
    }

    #[test]
    fn simplest_rational_lies_in_interval(a in rational(), b in rational()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let s = simplest_rational(&lo, &hi);
        prop_assert!(lo <= s && s <= hi);
        // no integer-denominator fraction with a smaller denominator fits
        for d in 1..s.denom().to_string().parse::<i64>().unwrap() {
            let n = (lo.clone() * q(d)).ceil();
            prop_assert!(n / q(d) > hi);
        }
    }
}
