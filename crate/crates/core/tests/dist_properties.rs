use proptest::prelude::*;

use uis_bench::dist::{sample_cond_indep, sample_uniform, CondIndepParams, Seed};

proptest! {
    #[test]
    fn expand_then_extract(p in prop::array::uniform5(0.01f64..0.99)) {
        let params = CondIndepParams::new(p[0], p[1], p[2], p[3], p[4]).unwrap();
        let back = CondIndepParams::extract(&params.expand()).unwrap();
        prop_assert!((back.p_c - params.p_c).abs() < 1e-12);
        prop_assert!((back.p_e1_given_c - params.p_e1_given_c).abs() < 1e-12);
        prop_assert!((back.p_e1_given_not_c - params.p_e1_given_not_c).abs() < 1e-12);
        prop_assert!((back.p_e2_given_c - params.p_e2_given_c).abs() < 1e-12);
        prop_assert!((back.p_e2_given_not_c - params.p_e2_given_not_c).abs() < 1e-12);
    }

    #[test]
    fn generation_is_a_function_of_seed(seed in any::<u64>(), n in 0usize..20) {
        prop_assert_eq!(sample_uniform(Seed(seed), n), sample_uniform(Seed(seed), n));
        prop_assert_eq!(sample_cond_indep(Seed(seed), n), sample_cond_indep(Seed(seed), n));
    }
}

#[test]
fn condition_c_matches_raw_atoms() {
    let mut max_diff: f64 = 0.0;
    for d in sample_uniform(Seed(100), 1000) {
        let a = d.atoms();
        for (e1, e2) in [(false, false), (false, true), (true, false), (true, true)] {
            let base = 4 * e1 as usize + 2 * e2 as usize;
            let brute = a[base + 1] / (a[base] + a[base + 1]);
            max_diff = max_diff.max((brute - d.condition_c(e1, e2).unwrap()).abs());
        }
    }
    assert!(max_diff < 1e-12);
}

#[test]
fn generated_distributions_are_normalized() {
    for d in sample_uniform(Seed(1), 500).into_iter().chain(sample_cond_indep(Seed(1), 500)) {
        assert!(d.atoms().iter().all(|&a| a >= 0.0));
        assert!((d.atoms().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn cond_indep_parameters_stay_in_range() {
    for d in sample_cond_indep(Seed(2), 500) {
        let p = CondIndepParams::extract(&d).unwrap();
        for v in [p.p_c, p.p_e1_given_c, p.p_e1_given_not_c, p.p_e2_given_c, p.p_e2_given_not_c] {
            assert!((0.01 - 1e-12..=0.99 + 1e-12).contains(&v), "{v}");
        }
    }
}
