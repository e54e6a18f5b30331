use hfb::curve::{MarkedCurve, SheafCohomology, SheafSpec};
use hfb::defo::{analyze, analyze_with_pad, uniform_model, FramedHiggsModel};
use hfb::exact::{q, qr, Q};
use hfb::lie::{FramingKind, FramingSpec, GroupId, InvariantForm, LieAlgebra};
use hfb::linalg::Matrix;
use hfb::random::RationalSampler;
use proptest::prelude::*;

fn points(n: usize) -> Vec<Q> {
    [q(1), q(-2), qr(1, 3), q(4)][..n].to_vec()
}

fn kind(torus: bool) -> FramingKind {
    if torus {
        FramingKind::Torus
    } else {
        FramingKind::Trivial
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn results_do_not_depend_on_the_ambient_pad(seed in any::<u64>(), torus in any::<bool>(), n in 2usize..=4) {
        let m = uniform_model(LieAlgebra::new(GroupId::Sl(2)).unwrap(), points(n), kind(torus), &mut RationalSampler::new(seed, 10)).unwrap();
        let base = analyze_with_pad(&m, 1).unwrap();
        for pad in [2, 3] {
            let r = analyze_with_pad(&m, pad).unwrap();
            prop_assert_eq!(r.d, base.d);
            prop_assert_eq!(r.c_prime, base.c_prime);
            prop_assert_eq!(r.phi.rank(), base.phi.rank());
            prop_assert_eq!(r.poisson.as_ref().map(Matrix::rank), base.poisson.as_ref().map(Matrix::rank));
        }
    }

    #[test]
    fn center_scale_of_the_form_is_invisible(seed in any::<u64>(), torus in any::<bool>(), s in prop_oneof![Just(qr(-3, 2)), Just(q(5)), Just(qr(1, 7))]) {
        // any nondegenerate form on Z(gl) is allowed; dimensions and the identity must not notice
        let id = GroupId::Gl(2);
        let model = |form: InvariantForm| {
            let alg = LieAlgebra::new(id).unwrap();
            let curve = MarkedCurve::rational(points(4)).unwrap();
            let framing = FramingSpec::uniform(&alg, &form, kind(torus), 4).unwrap();
            FramedHiggsModel::random(alg, form, curve, framing, &mut RationalSampler::new(seed, 10)).unwrap()
        };
        let a = analyze(&model(InvariantForm::trace(id))).unwrap();
        let b = analyze(&model(InvariantForm::trace_with_center_scale(id, s).unwrap())).unwrap();
        prop_assert_eq!(a.d, b.d);
        prop_assert_eq!(a.c_prime, b.c_prime);
        prop_assert_eq!(a.c_dual, b.c_dual);
        prop_assert_eq!(a.phi.rank(), b.phi.rank());
        prop_assert_eq!(a.poisson.as_ref().map(Matrix::rank), b.poisson.as_ref().map(Matrix::rank));
        prop_assert!(b.poisson_identity().unwrap().holds);
    }

    #[test]
    fn serre_duality_on_the_marked_line(bounds in proptest::collection::vec(-3i64..=3, 4), d in 1usize..=3) {
        let curve = MarkedCurve::rational(points(3)).unwrap();
        let mut f = SheafSpec::uniform(&curve, d, 0, bounds[3]);
        for (i, &b) in bounds[..3].iter().enumerate() {
            f = f.with_condition(&curve, hfb::curve::ChartPoint::Finite(i), hfb::curve::LocalCondition::full(d, b)).unwrap();
        }
        let dual = f.serre_dual(&Matrix::identity(d));
        let a = SheafCohomology::compute(&curve, &f, 2).unwrap();
        let b = SheafCohomology::compute(&curve, &dual, 2).unwrap();
        prop_assert_eq!(a.h0_dim() as i64 - a.h1_dim() as i64, f.euler_characteristic());
        prop_assert_eq!(a.h0_dim(), b.h1_dim());
        prop_assert_eq!(a.h1_dim(), b.h0_dim());
    }
}

#[test]
fn residues_outside_the_annihilator_are_rejected() {
    let id = GroupId::Sl(2);
    let alg = LieAlgebra::new(id).unwrap();
    let form = InvariantForm::trace(id);
    let curve = MarkedCurve::rational(points(2)).unwrap();
    let framing = FramingSpec::uniform(&alg, &form, FramingKind::Torus, 2).unwrap();
    // diagonal residues pair nontrivially with the torus
    let h = Matrix::from_i64(&[&[1, 0], &[0, -1]]);
    let e = FramedHiggsModel::new(alg, form, curve, framing, vec![h.clone(), h.neg()]).unwrap_err();
    assert!(e.to_string().contains("annihilator"), "{e}");
}

#[test]
fn framed_classes_count_the_framed_moduli_at_genus_zero() {
    // dim G (n - 2) + n dim G - dim Z(G) + dim Z(g) for trivial framings
    for (id, dim_g) in [(GroupId::Sl(2), 3), (GroupId::Gl(2), 4)] {
        for n in 2..=4 {
            let m = uniform_model(
                LieAlgebra::new(id).unwrap(),
                points(n),
                FramingKind::Trivial,
                &mut RationalSampler::new(3, 10),
            )
            .unwrap();
            let r = analyze(&m).unwrap();
            assert_eq!(r.d.h1 as i64, dim_g * (n as i64 - 2) + n as i64 * dim_g, "{id} n={n}");
        }
    }
}
