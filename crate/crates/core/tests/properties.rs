use bsplit::cutting::{CuttingFunction, Region};
use bsplit::geometry::{hyperbolic_distance, GraphFunction, GraphSpec};
use bsplit::io::{ScenarioConfig, Tolerances};
use bsplit::numerics::c64;
use bsplit::scenarios::{
    chain_test_function, theorem9_split, ChainFunctionSpec, ChainSpec, ChainTail, DiscChain, ScenarioSpec, Theorem9Config,
};
use bsplit::witness::{direct_kernel, kernel_split, rotundity, Cell};
use bsplit::C64;
use proptest::prelude::*;
use std::sync::OnceLock;

fn upper() -> impl Strategy<Value = C64> {
    (-10.0..10.0f64, 1e-3..10.0f64).prop_map(|(x, y)| c64(x, y))
}

fn square_chain() -> &'static DiscChain {
    static CHAIN: OnceLock<DiscChain> = OnceLock::new();
    CHAIN.get_or_init(|| {
        DiscChain::from_spec(GraphFunction::new(GraphSpec::power(1.0, 2.0), 0.5).unwrap(), &ChainSpec::standard_geometric(20))
            .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hyperbolic_distance_is_a_metric(z in upper(), w in upper(), v in upper()) {
        let d = |a, b| hyperbolic_distance(a, b).unwrap();
        prop_assert!(d(z, z).abs() < 1e-12);
        prop_assert!((d(z, w) - d(w, z)).abs() <= 1e-12 * (1.0 + d(z, w)));
        prop_assert!(d(z, v) <= d(z, w) + d(w, v) + 1e-9);
    }

    #[test]
    fn hyperbolic_distance_is_invariant(z in upper(), w in upper(), a in 0.1..10.0f64, b in -5.0..5.0f64) {
        let d0 = hyperbolic_distance(z, w).unwrap();
        let d1 = hyperbolic_distance(a * z + b, a * w + b).unwrap();
        prop_assert!((d0 - d1).abs() <= 1e-9 * (1.0 + d0));
        // inversion z ↦ −1/z is an isometry of the upper half-plane
        let d2 = hyperbolic_distance(-1.0 / z, -1.0 / w).unwrap();
        prop_assert!((d0 - d2).abs() <= 1e-8 * (1.0 + d0));
    }

    #[test]
    fn kernel_split_sums_to_the_direct_kernel(t in 0.0..1.0f64, t0 in 0.0..1.0f64, c in 1.1..4.0f64) {
        prop_assume!((t - t0).abs() > 1e-6);
        let p1 = GraphFunction::new(GraphSpec::power(1.0, 2.0), 1.0).unwrap();
        let p2 = GraphFunction::new(GraphSpec::power(c, 2.0), 1.0).unwrap();
        let k = direct_kernel(t, t0, &p1, &p2).unwrap();
        let (k1, k2) = kernel_split(t, t0, &p1, &p2).unwrap();
        prop_assert!((k1 + k2 - k).norm() <= 1e-10 * (1.0 + k.norm()));
    }

    #[test]
    fn cutting_function_is_a_partition(x in 0.01..0.9f64, s in -0.5..1.5f64, mu in 0.2..3.0f64, k in 0.2..3.0f64) {
        let cf = CuttingFunction::new(GraphFunction::new(GraphSpec::linear(k), 2.0).unwrap(), mu, 1.0).unwrap();
        let z = c64(x, k * x * (1.0 + mu * s));
        let chi = cf.chi(z);
        prop_assert!((0.0..=1.0).contains(&chi));
        if z.norm() < 1.0 {
            match cf.region(z) {
                Region::Below => prop_assert_eq!(chi, 0.0),
                Region::Above => prop_assert_eq!(chi, 1.0),
                Region::Corridor => {}
            }
        }
    }

    #[test]
    fn rotundity_is_in_the_unit_interval(pts in proptest::collection::vec((0.0..std::f64::consts::TAU, 0.5..2.0f64), 3..8)) {
        let mut pts = pts;
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| (a.0 - b.0).abs() < 0.3);
        prop_assume!(pts.len() >= 3);
        // star-shaped about 0 with angular gaps below π, so 0 is interior
        let gaps = pts.windows(2).map(|w| w[1].0 - w[0].0).chain([std::f64::consts::TAU - pts.last().unwrap().0 + pts[0].0]);
        prop_assume!(gaps.fold(0.0f64, f64::max) < 3.0);
        let vertices = pts.iter().map(|(t, r)| C64::from_polar(*r, *t)).collect();
        let cell = Cell::polygon(vertices, c64(0.0, 0.0)).unwrap();
        let rho = rotundity(&cell).unwrap();
        prop_assert!(rho > 0.0 && rho <= 1.0 + 1e-12, "{}", rho);
    }

    #[test]
    fn config_round_trip(k in 0.1..5.0f64, mu in 0.1..5.0f64, seed in any::<u64>(), tol in 1e-12..1.0f64) {
        let mut cfg = ScenarioConfig::new(ScenarioSpec::Ex1 { k, mu });
        cfg.seed = Some(seed);
        cfg.tolerances = Tolerances { split_identity: tol, ..Tolerances::default() };
        let back = ScenarioConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.digest().unwrap(), cfg.digest().unwrap());
        prop_assert_eq!(back.to_json().unwrap(), cfg.to_json().unwrap());
    }

    #[test]
    fn geometric_chains_validate(q in 0.3..0.7f64, p in 0.05..0.4f64, count in 2usize..10) {
        let g = GraphFunction::new(GraphSpec::power(1.0, 2.0), 2.0).unwrap();
        let spec = ChainSpec::Geometric { xi0: 1.0, xi_ratio: q, r_coef: 1.0, r_ratio: p, count };
        let chain = DiscChain::from_spec(g.clone(), &spec).unwrap();
        prop_assert_eq!(chain.len(), count);
        // count < 10 keeps r_n above the rounding unit of Im ζ_n
        for (c, r) in chain.centers().iter().zip(chain.radii()) {
            prop_assert!(*r < g.value(c.re));
            prop_assert!(!chain.in_s(*c + c64(0.0, 2.0 * r)));
            prop_assert!(chain.in_s(*c + c64(0.0, 0.5 * r)));
        }
        // discs as large as g(ξ_n) violate the hypothesis
        let radii: Vec<f64> = chain.xi().iter().map(|x| g.value(*x)).collect();
        prop_assert!(DiscChain::new(g, chain.xi().to_vec(), radii, ChainTail::Finite).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn disc_chain_pieces_sum_to_f(x in 0.02..1.5f64, y in -1.5..1.5f64) {
        let ch = square_chain();
        let z = c64(x, y);
        prop_assume!(!ch.in_s(z));
        prop_assume!((0..ch.len()).all(|n| ch.disc_distance(n, z, false) > 1e-3 && ch.disc_distance(n, z, true) > 1e-3));
        let spec = ChainFunctionSpec::Sum {
            terms: vec![
                ChainFunctionSpec::Constant { re: 0.5, im: 0.0 },
                ChainFunctionSpec::DiscCharges { plus: 1.0, minus: -0.5, terms: 6 },
            ],
        };
        let f = chain_test_function(&spec, ch).unwrap();
        let s = theorem9_split(&f, ch, Theorem9Config { truncation: 8, ..Theorem9Config::default() }).unwrap();
        let p = s.decompose(z).unwrap();
        prop_assert!(p.residual <= 1e-5 + p.axis_tail_bound + p.disc_tail_bound, "{} at {}", p.residual, z);
    }
}
