use critical_besov::lp_besov::CutoffProfile;
use critical_besov::spectral_atoms::{
    apply_symbol, dyadic_block, eval_probe, heat_flow, make_atom, AtomField, Carrier, EnvelopeGrid,
    EnvelopeSymbol, Multiplier, Probe,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn field(carriers: &[(f64, f64)], shift: (f64, f64)) -> AtomField {
    let c = CutoffProfile::default();
    let sym = EnvelopeSymbol::rho(&c);
    let atoms = carriers
        .iter()
        .map(|&(a, b)| {
            make_atom(
                Carrier::from_vec(vec![a, b]),
                vec![shift.0, shift.1],
                &sym,
                EnvelopeGrid::default_for(2),
            )
            .unwrap()
        })
        .collect();
    AtomField::from_atoms(2, atoms, false)
}

fn at(f: &AtomField, x: (f64, f64)) -> Complex64 {
    eval_probe(f, &Probe::at(vec![x.0, x.1]))
}

fn close(a: Complex64, b: Complex64, scale: f64) -> bool {
    (a - b).norm() <= 1e-10 * scale.max(1.0)
}

fn carrier() -> impl Strategy<Value = (f64, f64)> {
    (2.0..40.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, th)| (r * th.cos(), r * th.sin()))
}

fn point() -> impl Strategy<Value = (f64, f64)> {
    (-3.0..3.0f64, -3.0..3.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn composed_multiplier_equals_sequential(c in carrier(), x in point(), t in 1e-4..1e-2f64) {
        let f = field(&[c], (0.0, 0.0));
        let a = Multiplier::derivative(0);
        let b = Multiplier::heat(t);
        let seq = apply_symbol(&apply_symbol(&f, &a).unwrap(), &b).unwrap();
        let once = apply_symbol(&f, &a.then(&b)).unwrap();
        let s = at(&seq, x);
        prop_assert!(close(s, at(&once, x), s.norm()));
    }

    #[test]
    fn heat_flow_is_a_semigroup(c in carrier(), x in point(), s in 0.0..5e-3f64, t in 0.0..5e-3f64) {
        let f = field(&[c], (0.5, -0.25));
        let two = heat_flow(&heat_flow(&f, s).unwrap(), t).unwrap();
        let one = heat_flow(&f, s + t).unwrap();
        let v = at(&one, x);
        prop_assert!(close(at(&two, x), v, v.norm()));
    }

    #[test]
    fn heat_flow_is_linear(c1 in carrier(), c2 in carrier(), x in point(), t in 0.0..5e-3f64) {
        let (f, g) = (field(&[c1], (0.0, 0.0)), field(&[c2], (1.0, 0.0)));
        let sum = at(&heat_flow(&f.add(&g), t).unwrap(), x);
        let parts = at(&heat_flow(&f, t).unwrap(), x) + at(&heat_flow(&g, t).unwrap(), x);
        prop_assert!(close(sum, parts, parts.norm()));
    }

    #[test]
    fn dyadic_block_is_linear(c1 in carrier(), c2 in carrier(), x in point(), j in 0i32..7, s in -3.0..3.0f64) {
        let cut = CutoffProfile::default();
        let (f, g) = (field(&[c1], (0.0, 0.0)), field(&[c2], (0.0, 1.0)));
        let lhs = at(&dyadic_block(&f.add(&g.scaled(s)), j, &cut).field, x);
        let rhs = at(&dyadic_block(&f, j, &cut).field, x) + s * at(&dyadic_block(&g, j, &cut).field, x);
        prop_assert!(close(lhs, rhs, rhs.norm()));
    }

    #[test]
    fn dyadic_blocks_sum_to_the_field(c in carrier(), x in point()) {
        let cut = CutoffProfile::default();
        let f = field(&[c], (0.0, 0.0));
        let total: Complex64 = (-2..9).map(|j| at(&dyadic_block(&f, j, &cut).field, x)).sum();
        let v = at(&f, x);
        prop_assert!((total - v).norm() <= 1e-9 * f.atoms[0].envelope.l1());
    }

    #[test]
    fn carrier_addition_is_exact_on_parts(a in prop::collection::vec(-1e6..1e6f64, 3), b in prop::collection::vec(-1e6..1e6f64, 3)) {
        let (ca, cb) = (Carrier::from_vec(a.clone()), Carrier::from_vec(b.clone()));
        let ab = ca.add(&cb);
        prop_assert!(ab.same_as(&cb.add(&ca)));
        prop_assert!(ab.add(&cb.neg()).same_as(&ca));
        let w = [0.3, -1.0, 2.5];
        let lhs = ab.dot(&w);
        let rhs = ca.dot(&w) + cb.dot(&w);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (lhs.abs() + 1.0));
    }
}
