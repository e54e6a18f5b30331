use hfb::defo::uniform_model;
use hfb::dims::{
    consistency_audit, dim_moduli_framed, dim_moduli_higgs, fiber_dim, hitchin_base_dim, torsor_dims, FramingDims,
};
use hfb::exact::{q, qr, Q};
use hfb::lie::{group_data, FramingKind, FramingSpec, GroupId, InvariantForm, LieAlgebra};
use hfb::random::RationalSampler;
use hfb::spectral::{spectral_data, spectral_genus, torsor_fiber_formula, torsor_fiber_report};
use proptest::prelude::*;

fn group() -> impl Strategy<Value = GroupId> {
    prop_oneof![
        (1usize..=5).prop_map(GroupId::Gl),
        (2usize..=5).prop_map(GroupId::Sl),
        (3usize..=8).prop_map(GroupId::So),
        (1usize..=3).prop_map(|k| GroupId::Sp(2 * k)),
        Just(GroupId::G2),
        Just(GroupId::F4),
        Just(GroupId::E6),
        Just(GroupId::E7),
        Just(GroupId::E8),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn moduli_splits_into_base_and_fiber(id in group(), g in 1i64..=8, n in 1i64..=8) {
        let r = consistency_audit(id, g, n, &FramingDims::trivial(n as usize)).unwrap();
        prop_assert!(r.passed());
        prop_assert_eq!(dim_moduli_higgs(id, g, n).unwrap(), hitchin_base_dim(id, g, n).unwrap() + fiber_dim(id, g, n).unwrap());
        let d = group_data(id).unwrap();
        // the framed space is a torsor over the unframed one when h_x = 0
        let mfh = dim_moduli_framed(id, g, n, &FramingDims::trivial(n as usize)).unwrap();
        prop_assert_eq!(mfh, dim_moduli_higgs(id, g, n).unwrap() + n * d.dim_g as i64 - d.dim_center_grp as i64);
        let t = torsor_dims(id, n, None).unwrap();
        prop_assert_eq!(fiber_dim(id, g, n).unwrap() + t.t_n_mod_z, hitchin_base_dim(id, g, n).unwrap());
    }

    #[test]
    fn torus_framing_matches_substitution(r in 2usize..=4, gl in any::<bool>(), g in 1i64..=4, n in 1i64..=4) {
        let id = if gl { GroupId::Gl(r) } else { GroupId::Sl(r) };
        let alg = LieAlgebra::new(id).unwrap();
        let form = InvariantForm::trace(id);
        let spec = FramingSpec::uniform(&alg, &form, FramingKind::Torus, n as usize).unwrap();
        let f = FramingDims::from_spec(&alg, &spec);
        let rep = consistency_audit(id, g, n, &f).unwrap();
        let sub = rep.check("framed_discrepancy_vs_substitution").unwrap();
        prop_assert!(sub.passed);
        prop_assert_eq!(f.dim_z_h, group_data(id).unwrap().dim_center_alg);
        // the summed reading of the general-framing torsor drops n dim T - Σ dim Z_{H_x}
        prop_assert_eq!(rep.torsors.general_framing_summed, Some(hitchin_base_dim(id, g, n).unwrap() - n * (f.dim_t[0] as i64 - f.dim_z_hx[0] as i64)));
    }

    #[test]
    fn spectral_genus_equals_gl_fiber(r in 2i64..=7, g in 0i64..=6, n in 1i64..=7) {
        let gs = spectral_genus(r, g, n).unwrap();
        let d = group_data(GroupId::Gl(r as usize)).unwrap();
        prop_assert_eq!(gs, (g - 1) * d.dim_g as i64 + n * (d.dim_borel - d.dim_torus) as i64 + d.dim_center_grp as i64);
        prop_assert_eq!(2 * gs - 2, r * (2 * g - 2) + r * (r - 1) * (2 * g - 2 + n));
    }

}

proptest! {
    // rank-3 discriminants with four points reach degree 12
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn branch_points_fill_the_branch_divisor(seed in any::<u64>(), n in 2usize..=4, which in 0usize..4) {
        let id = [GroupId::Sl(2), GroupId::Gl(2), GroupId::Sl(3), GroupId::Gl(3)][which];
        let pts: Vec<Q> = [q(1), q(-2), qr(1, 3), q(5)][..n].to_vec();
        let m = uniform_model(LieAlgebra::new(id).unwrap(), pts, FramingKind::Trivial, &mut RationalSampler::new(seed, 10)).unwrap();
        let s = spectral_data(&m).unwrap();
        if !s.degenerate {
            prop_assert_eq!(s.branch_point_count, Some(s.branch_divisor_degree));
            let finite: usize = s.rational_roots.iter().map(|r| r.multiplicity).sum::<usize>()
                + s.real_roots.iter().map(|r| r.multiplicity).sum::<usize>()
                + s.complex_roots.iter().map(|r| r.multiplicity).sum::<usize>();
            prop_assert_eq!(finite as i64 + s.order_at_infinity.unwrap(), s.branch_divisor_degree);
        }
        // ramification over D is read off the residues
        for (i, x) in m.curve.points().iter().enumerate() {
            let d_zero = s.discriminant_numerator.eval(x) == q(0);
            prop_assert_eq!(d_zero, !s.residues_regular_semisimple[i]);
        }
        let t = torsor_fiber_report(&m).unwrap();
        if t.in_smooth_unramified_locus {
            prop_assert_eq!(t.relatively_framed_equals_base, Some(true));
            if matches!(id, GroupId::Gl(_)) {
                prop_assert_eq!(s.genus, t.fiber_dim);
            }
        } else {
            prop_assert!(t.fiber_dim.is_none());
        }
    }
}

#[test]
fn genus_zero_and_empty_divisor_are_rejected() {
    let f = FramingDims::trivial(1);
    assert!(dim_moduli_higgs(GroupId::Sl(2), 0, 1).unwrap_err().to_string().contains("genus >= 1"));
    assert!(dim_moduli_framed(GroupId::Sl(2), 0, 1, &f).is_err());
    assert!(fiber_dim(GroupId::Sl(2), 2, 0).is_err());
    assert!(spectral_genus(1, 2, 1).is_err());
    assert!(torsor_fiber_formula(GroupId::Gl(2), 2, 0).is_err());
}

#[test]
fn framed_gl2_torsors() {
    let t = torsor_fiber_formula(GroupId::Gl(2), 2, 1).unwrap();
    assert_eq!(t.fiber_dim, Some(6));
    assert_eq!(t.framed_fiber_dim, Some(9));
    assert_eq!(t.relatively_framed_fiber_dim, Some(7));
    assert_eq!(t.hitchin_base_dim, Some(7));
}

#[test]
fn improper_framing_is_rejected() {
    let full = FramingDims { dim_h: vec![3], dim_z_h: 0, dim_t: vec![1], dim_z_hx: vec![0] };
    let e = dim_moduli_framed(GroupId::Sl(2), 2, 1, &full).unwrap_err();
    assert!(e.to_string().contains("proper"), "{e}");
}
