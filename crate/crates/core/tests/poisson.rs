use hfb::defo::uniform_model;
use hfb::exact::{q, qr, Ring, Q};
use hfb::gaudin::{
    commutativity_check, conjugate_residues, hamiltonian_flow, hitchin_map, FlowOptions, HitchinSystem, PoissonChart,
    PolyObservable,
};
use hfb::lie::{FramingKind, GroupId, InvariantForm, LieAlgebra};
use hfb::random::RationalSampler;
use proptest::prelude::*;

fn chart(id: GroupId, n: usize) -> PoissonChart {
    PoissonChart::new(LieAlgebra::new(id).unwrap(), InvariantForm::trace(id), n).unwrap()
}

/// A random observable of degree at most 2: `σ(B, A_i) + σ(C, A_j) σ(D, A_k)`.
fn observable(c: &PoissonChart, s: &mut RationalSampler) -> PolyObservable {
    let n = c.n();
    let mut lin = || {
        let site = s.int(0, n as i64 - 1) as usize;
        let b = s.element(c.alg());
        c.coordinate(site, &b).unwrap().poly
    };
    let (a, b, d) = (lin(), lin(), lin());
    c.observable(a.add(&b.mul(&d)))
}

fn is_zero(p: &PolyObservable) -> bool {
    p.poly.is_zero_el()
}

fn points(n: usize) -> Vec<Q> {
    [q(1), q(3), qr(-1, 2), q(5)][..n].to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bracket_is_antisymmetric_and_leibniz(seed in any::<u64>(), three in any::<bool>()) {
        let c = chart(GroupId::Sl(2), if three { 3 } else { 2 });
        let mut s = RationalSampler::new(seed, 5);
        let (f, g, h) = (observable(&c, &mut s), observable(&c, &mut s), observable(&c, &mut s));
        let fg = c.bracket(&f, &g).unwrap();
        let gf = c.bracket(&g, &f).unwrap();
        prop_assert!(fg.poly.add(&gf.poly).is_zero_el());
        let gh = c.observable(g.poly.mul(&h.poly));
        let lhs = c.bracket(&f, &gh).unwrap().poly;
        let rhs = fg.poly.mul(&h.poly).add(&g.poly.mul(&c.bracket(&f, &h).unwrap().poly));
        prop_assert!(lhs.sub(&rhs).is_zero_el());
    }

    #[test]
    fn bracket_satisfies_jacobi(seed in any::<u64>(), gl in any::<bool>()) {
        let id = if gl { GroupId::Gl(2) } else { GroupId::Sl(2) };
        let c = chart(id, 2);
        let mut s = RationalSampler::new(seed, 5);
        let (f, g, h) = (observable(&c, &mut s), observable(&c, &mut s), observable(&c, &mut s));
        let j = |a: &PolyObservable, b: &PolyObservable, d: &PolyObservable| {
            c.bracket(a, &c.bracket(b, d).unwrap()).unwrap().poly
        };
        let total = j(&f, &g, &h).add(&j(&g, &h, &f)).add(&j(&h, &f, &g));
        prop_assert!(total.is_zero_el());
    }

    #[test]
    fn casimirs_are_central(seed in any::<u64>(), k in 0usize..2) {
        let c = chart(GroupId::Sl(3), 2);
        let mut s = RationalSampler::new(seed, 5);
        let f = observable(&c, &mut s);
        let cas = c.casimir(s.int(0, 1) as usize, k).unwrap();
        prop_assert!(is_zero(&c.bracket(&cas, &f).unwrap()));
    }

    #[test]
    fn hitchin_coefficients_commute(seed in any::<u64>(), n in 2usize..=4, which in 0usize..3) {
        let id = [GroupId::Sl(2), GroupId::Gl(2), GroupId::Sl(3)][which];
        let n = if id == GroupId::Sl(3) { n.min(3) } else { n };
        let kind = if seed % 2 == 0 { FramingKind::Trivial } else { FramingKind::Torus };
        let m = uniform_model(LieAlgebra::new(id).unwrap(), points(n), kind, &mut RationalSampler::new(seed, 10)).unwrap();
        let rep = commutativity_check(&m, 1, &mut RationalSampler::new(seed.wrapping_add(1), 10)).unwrap();
        prop_assert!(rep.all_zero(), "max |bracket| = {}", rep.max_abs);
    }

    #[test]
    fn hitchin_map_is_conjugation_invariant(seed in any::<u64>(), which in 0usize..3) {
        let id = [GroupId::Sl(2), GroupId::Gl(2), GroupId::Sl(3)][which];
        let m = uniform_model(LieAlgebra::new(id).unwrap(), points(3), FramingKind::Trivial, &mut RationalSampler::new(seed, 10)).unwrap();
        let mut s = RationalSampler::new(seed ^ 7, 10);
        let g = s.invertible(m.alg.size());
        let moved = HitchinSystem::for_model(&m).unwrap().evaluate(&conjugate_residues(&m.residues, &g).unwrap()).unwrap();
        prop_assert_eq!(moved, hitchin_map(&m).unwrap());
    }

    #[test]
    fn casimir_flow_is_stationary(seed in any::<u64>()) {
        // one site, no balancing constraint: the chart accepts any residue
        let c = chart(GroupId::Sl(2), 1);
        let a = RationalSampler::new(seed, 10).element(c.alg());
        let h = c.casimir(0, 0).unwrap();
        let opts = FlowOptions { steps: 200, record_every: 200, ..FlowOptions::default() };
        let f = hamiltonian_flow(&c, std::slice::from_ref(&a), &h, &[("p".into(), h.clone())], &opts).unwrap();
        let first = &f.states[0];
        let last = f.states.last().unwrap();
        for (x, y) in first.iter().zip(last) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn float_mode_is_required() {
    let c = chart(GroupId::Sl(2), 1);
    let a = RationalSampler::new(1, 10).element(c.alg());
    let h = c.casimir(0, 0).unwrap();
    let opts = FlowOptions { float_mode: false, ..FlowOptions::default() };
    assert!(hamiltonian_flow(&c, &[a], &h, &[], &opts).is_err());
}

#[test]
fn single_site_coordinate_bracket_is_the_lie_bracket() {
    // {σ(x, A), σ(y, A)} = σ(A, [x, y])
    let c = chart(GroupId::Sl(2), 1);
    let mut s = RationalSampler::new(3, 10);
    let (x, y) = (s.element(c.alg()), s.element(c.alg()));
    let lhs = c.bracket(&c.coordinate(0, &x).unwrap(), &c.coordinate(0, &y).unwrap()).unwrap();
    let xy = hfb::lie::commutator(&x, &y);
    assert_eq!(lhs, c.coordinate(0, &xy).unwrap());
}
