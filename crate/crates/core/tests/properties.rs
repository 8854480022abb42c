use proptest::prelude::*;
use realtile::complex::{exact_sequence_holds, relative_cohomology_action, tiling_space_h1};
use realtile::realization::{sampler, Kernel, TilingPoint};
use realtile::report::Pipeline;
use realtile::{example, Substitution};

fn substitution_strategy() -> impl Strategy<Value = Substitution> {
    (2usize..=3)
        .prop_flat_map(|n| prop::collection::vec(prop::collection::vec(0..n, 1..=4), n))
        .prop_filter_map("primitive", |rules| {
            let letters = (0..rules.len()).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
            Substitution::from_rules(letters, rules).ok().filter(Substitution::is_primitive)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn incidence_is_multiplicative(s in substitution_strategy()) {
        let m = s.incidence_matrix();
        prop_assert_eq!(s.power(2).incidence_matrix(), &m * &m);
    }

    #[test]
    fn perron_lengths_are_eigenvectors(s in substitution_strategy()) {
        let p = s.perron_data().unwrap();
        for (x, rule) in s.rules().iter().enumerate() {
            let total = rule.iter().fold(realtile::AlgebraicNumber::zero(p.field()), |acc, &y| acc.add(&p.lengths[y]));
            prop_assert!(total.sub(&p.lengths[x].mul(&p.lambda)).is_zero());
        }
    }

    #[test]
    fn complex_invariants(s in substitution_strategy(), collared in any::<bool>()) {
        let pipe = Pipeline::new(&s, collared, 1e-9).unwrap();
        let x = &pipe.complex;
        prop_assert_eq!(pipe.homology.rank() + x.vertices, x.edges.len() + 1);
        prop_assert!(exact_sequence_holds(x, &pipe.homology));
        let rel = relative_cohomology_action(x, &pipe.edge_map).unwrap();
        prop_assert_eq!(rel.rank, x.edges.len());

        // l(f_* h) = λ l(h) on every basis cycle
        let hom = &pipe.lattice.hom;
        for j in 0..pipe.homology.rank() {
            let lhs = hom.eval(&pipe.homology.fstar.column(j));
            prop_assert!(lhs.sub(&hom.values[j].mul(&pipe.perron.lambda)).is_zero());
        }
        let d_lambda = pipe.expansion().unwrap().d_lambda;
        prop_assert!(pipe.lattice.d_gr() >= d_lambda);
        if let Some(d) = pipe.lattice.d_prime() {
            prop_assert!(d >= pipe.lattice.d_gr());
        }
    }

    #[test]
    fn tiling_space_rank_is_cofinal(s in substitution_strategy()) {
        let a = Pipeline::new(&s, true, 1e-9).unwrap();
        let b = Pipeline::new(&s.power(2), true, 1e-9).unwrap();
        let ra = tiling_space_h1(&a.complex, &a.homology).unwrap().rank;
        let rb = tiling_space_h1(&b.complex, &b.homology).unwrap().rank;
        prop_assert_eq!(ra, rb);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn semiconjugacy_and_truncation(seed in any::<u64>(), which in 0usize..3) {
        let (name, kernel) = [("fibonacci", Kernel::Lambda), ("example-2-8", Kernel::Lambda), ("example-2-9", Kernel::Hyp)][which];
        let r = Pipeline::new(&example(name).unwrap().substitution(), true, 1e-9).unwrap().realizer(kernel).unwrap();
        let p = TilingPoint::sample(&r, 70, &mut sampler(seed));
        prop_assert!(r.semiconjugacy_residual(&p, 50).unwrap() <= 2.0 * r.error_bound(50));
        let a = r.realize(&p, 40).unwrap();
        let b = r.realize(&p, 50).unwrap();
        prop_assert!(a.point.distance(&b.point) <= a.error_bound);
        prop_assert!(a.max_b <= r.b_digits);
    }
}
