use curvint::dynamics::{integrate, reverse_momenta, IntegratorConfig, Method};
use curvint::generators::{generator_ambient, generator_polar};
use curvint::geometry::{constraint_residual, polar_to_ambient};
use curvint::harness::{
    check_commutes, random_betas, run_proposition, sample_points, SampleConfig, BRACKET_TOL,
};
use curvint::observable::{normalized_difference, poisson_bracket};
use curvint::observables::{
    casimir_polar, hamiltonian, integral_l, integral_q, kinetic, Betas, Chain, SystemKind,
};
use curvint::SpaceSpec;
use proptest::prelude::*;

fn arb_spec(dims: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = SpaceSpec> {
    (dims, 0usize..6).prop_map(|(n, c)| SpaceSpec::six_classes(n)[c])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn samples_lie_on_the_quadric(spec in arb_spec(2..=6), seed in any::<u64>()) {
        let cfg = SampleConfig::for_spec(&spec, 8, seed);
        let pts = sample_points(&spec, &cfg).unwrap();
        prop_assert_eq!(pts.len(), 8);
        for z in &pts {
            let x = polar_to_ambient(&spec, &z.coords());
            prop_assert!(constraint_residual(&spec, &x).abs() < 1e-12);
            for (k, v) in z.to_vec().iter().enumerate() {
                let (lo, hi) = cfg.bounds[k];
                prop_assert!(*v >= lo && *v <= hi);
            }
        }
    }

    #[test]
    fn sampling_is_seed_deterministic(spec in arb_spec(2..=5), seed in any::<u64>()) {
        let cfg = SampleConfig::for_spec(&spec, 4, seed);
        let a = sample_points(&spec, &cfg).unwrap();
        let b = sample_points(&spec, &cfg).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn casimir_is_twice_k2_kinetic(spec in arb_spec(2..=6), seed in any::<u64>()) {
        let t = kinetic(&spec);
        let c = casimir_polar(&spec);
        for z in sample_points(&spec, &SampleConfig::for_spec(&spec, 4, seed)).unwrap() {
            let lhs = 2.0 * spec.k2() * t.value(&z).unwrap();
            prop_assert!(normalized_difference(lhs, c.value(&z).unwrap()) < 1e-9);
        }
    }

    #[test]
    fn polar_generators_match_ambient(spec in arb_spec(2..=5), seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let n = spec.dim;
        let pairs: Vec<(usize, usize)> = (0..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect();
        let (mu, nu) = pairs[pick.index(pairs.len())];
        let polar = generator_polar(&spec, mu, nu).unwrap();
        let ambient = generator_ambient(&spec, mu, nu).unwrap().on_polar();
        for z in sample_points(&spec, &SampleConfig::for_spec(&spec, 4, seed)).unwrap() {
            let (a, b) = (polar.value(&z).unwrap(), ambient.value(&z).unwrap());
            prop_assert!(normalized_difference(a, b) < 1e-12, "{} vs {}", a, b);
        }
    }

    #[test]
    fn bracket_is_antisymmetric(spec in arb_spec(2..=4), seed in any::<u64>()) {
        let b = random_betas(spec.dim, seed, 0.3, 0.7);
        let f = integral_q(&spec, &b, Chain::Upper(2)).unwrap();
        let g = generator_polar(&spec, 0, 1).unwrap();
        for z in sample_points(&spec, &SampleConfig::for_spec(&spec, 4, seed)).unwrap() {
            let fg = poisson_bracket(&f, &g, &z).unwrap();
            let gf = poisson_bracket(&g, &f, &z).unwrap();
            prop_assert_eq!(fg, -gf);
        }
    }

    #[test]
    fn chain_integrals_commute_with_central_hamiltonians(spec in arb_spec(2..=5), seed in any::<u64>()) {
        let b = random_betas(spec.dim, seed, 0.4, 1.0);
        let cfg = SampleConfig::for_spec(&spec, 6, seed);
        for r in run_proposition(&spec, 3, &b, &cfg).unwrap() {
            prop_assert!(r.pass, "{:?}", r);
        }
    }

    #[test]
    fn runge_lenz_components_are_conserved(spec in arb_spec(2..=5), seed in any::<u64>(), k in 0.1f64..3.0) {
        let b = Betas::new(0.0, vec![0.0; spec.dim], k);
        let h = hamiltonian(&spec, SystemKind::KC, &b).unwrap();
        let pts = sample_points(&spec, &SampleConfig::for_spec(&spec, 6, seed)).unwrap();
        for i in 1..=spec.dim {
            let l = integral_l(&spec, i, &b).unwrap();
            prop_assert!(check_commutes(&h, &l, &pts, BRACKET_TOL).pass);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn midpoint_flow_is_reversible(
        k1 in prop::sample::select(vec![1.0, 0.0, -1.0]),
        q in (0.5f64..1.0, 0.4f64..1.0),
        p in (-0.2f64..0.2, -0.2f64..0.2),
    ) {
        let spec = SpaceSpec::new(2, k1, 1.0).unwrap();
        let h = hamiltonian(&spec, SystemKind::SW, &Betas::new(0.5, vec![0.05, 0.05], 0.0)).unwrap();
        let z0 = curvint::PhasePoint::new(vec![q.0, q.1], vec![p.0, p.1]).unwrap();
        let cfg = IntegratorConfig::new(Method::ImplicitMidpoint, 1e-3, 400);
        let fwd = integrate(&h, &z0, &cfg, &[], Some(&spec)).unwrap();
        let back = integrate(&h, &reverse_momenta(fwd.last()), &cfg, &[], Some(&spec)).unwrap();
        let end = reverse_momenta(back.last());
        for (a, b) in end.to_vec().iter().zip(z0.to_vec()) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}
