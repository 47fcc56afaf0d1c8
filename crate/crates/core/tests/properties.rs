use proptest::prelude::*;
use superposition::measures::{self, NormSpec};
use superposition::operator::pinch;
use superposition::{random, Decomposition};

fn case() -> impl Strategy<Value = (usize, usize, u64)> {
    (1usize..=3, 1usize..=3, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pinching_removes_all_superposition((n1, n2, seed) in case()) {
        let l = Decomposition::bipartite(n1, n2).unwrap();
        let rho = random::random_state(&mut random::rng(seed, 0), l.total());
        let p = pinch(&rho, &l).unwrap();
        prop_assert!(measures::a_s(&p, &l).unwrap().value.abs() < 1e-10);
        prop_assert!(measures::trace_measure(&p, &l).unwrap() < 1e-12);
        prop_assert!(measures::a_s(&rho, &l).unwrap().value >= -1e-12);
    }

    #[test]
    fn kyfan_profile_is_concave_and_bounded((n1, n2, seed) in case()) {
        let l = Decomposition::bipartite(n1, n2).unwrap();
        let rho = random::random_state(&mut random::rng(seed, 0), l.total());
        let prof = measures::kyfan_profile(&rho, &l).unwrap();
        let p = measures::predictability(&rho, &l).unwrap();
        let mut prev = 0.0;
        let mut step = f64::INFINITY;
        for &a in &prof {
            prop_assert!(a >= prev - 1e-12);
            prop_assert!(a - prev <= step + 1e-12);
            prop_assert!(a * a + p * p <= 1.0 + 1e-9);
            step = a - prev;
            prev = a;
        }
        let tr = measures::norm_measure(&rho, &l, NormSpec::Trace).unwrap();
        prop_assert!((tr - prof[prof.len() - 1]).abs() < 1e-12);
        let inf = measures::norm_measure(&rho, &l, NormSpec::SchattenP(f64::INFINITY)).unwrap();
        prop_assert!((inf - prof[0]).abs() < 1e-12);
    }

    #[test]
    fn measures_are_invariant_under_block_unitaries((n1, n2, seed) in case()) {
        let l = Decomposition::bipartite(n1, n2).unwrap();
        let mut g = random::rng(seed, 0);
        let rho = random::random_state(&mut g, l.total());
        let u = random::block_unitary(&mut g, &l);
        let moved = rho.conjugate(&u).unwrap();
        let a = measures::a_s(&rho, &l).unwrap().value;
        prop_assert!((a - measures::a_s(&moved, &l).unwrap().value).abs() < 1e-9);
        for k in 1..=n1.min(n2) {
            let d = measures::kyfan_measure(&rho, &l, k).unwrap() - measures::kyfan_measure(&moved, &l, k).unwrap();
            prop_assert!(d.abs() < 1e-10);
        }
    }

    #[test]
    fn a_s_is_bounded_by_block_count_entropy((n1, n2, seed) in case()) {
        let l = Decomposition::bipartite(n1, n2).unwrap();
        let rho = random::random_state(&mut random::rng(seed, 0), l.total());
        let (p1, p2) = measures::path_probabilities(&rho, &l).unwrap();
        let h: f64 = [p1, p2].iter().filter(|&&x| x > 0.0).map(|x| -x * x.ln()).sum();
        prop_assert!(measures::a_s(&rho, &l).unwrap().value <= h + 1e-10);
    }
}
