use proptest::prelude::*;

use uis_bench::dist::{sample_cond_indep, JointDist, Seed};
use uis_bench::models::{
    predict_indp, predict_prsp, predict_pwr, true_params_indp, true_params_prsp, ModelKind, ModelParams,
};
use uis_bench::oracle::{standard_answer, EvidenceGrid, EvidencePair};

fn marginally_independent(p_e1: f64, p_e2: f64, cond: [f64; 4]) -> JointDist {
    let mut atoms = [0.0; 8];
    for (k, (a, b)) in [(false, false), (false, true), (true, false), (true, true)].into_iter().enumerate() {
        let cell = (if a { p_e1 } else { 1.0 - p_e1 }) * (if b { p_e2 } else { 1.0 - p_e2 });
        let base = (a as usize) << 2 | (b as usize) << 1;
        atoms[base | 1] = cell * cond[k];
        atoms[base] = cell * (1.0 - cond[k]);
    }
    JointDist::new(atoms).unwrap()
}

#[test]
fn prsp_is_exact_at_corners_under_conditional_independence() {
    for d in sample_cond_indep(Seed(40), 100) {
        let p = true_params_prsp(&d).unwrap();
        for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
            let ev = EvidencePair::new(a as u8 as f64, b as u8 as f64).unwrap();
            let got = predict_prsp(&p, ev).unwrap();
            assert!((got - d.condition_c(a, b).unwrap()).abs() < 1e-9);
        }
    }
}

#[test]
fn prsp_is_exact_at_the_prior() {
    for d in sample_cond_indep(Seed(41), 50) {
        let p = true_params_prsp(&d).unwrap();
        let v = p.values();
        let got = predict_prsp(&p, EvidencePair::new(v[1], v[4]).unwrap()).unwrap();
        assert!((got - v[0]).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn indp_true_params_reproduce_the_oracle(
        p_e1 in 0.02f64..0.98,
        p_e2 in 0.02f64..0.98,
        cond in prop::array::uniform4(0.0f64..=1.0),
    ) {
        let d = marginally_independent(p_e1, p_e2, cond);
        let params = true_params_indp(&d).unwrap();
        for ev in EvidenceGrid::default().pairs() {
            let want = standard_answer(&d, ev).unwrap();
            prop_assert!((predict_indp(&params, ev) - want).abs() < 1e-9);
        }
    }

    #[test]
    fn monotone_in_evidence_with_nonnegative_slopes(
        a1 in 0.0f64..3.0,
        a2 in 0.0f64..3.0,
        b in -2.0f64..2.0,
        base in 0.0f64..0.5,
        rises in prop::array::uniform3(0.0f64..0.16),
    ) {
        let pwr = ModelParams::pwr(a1, a2, b).unwrap();
        // b00 <= b01, b10 <= b11 and b00 <= b10, b01 <= b11
        let b00 = base;
        let b01 = b00 + rises[0];
        let b10 = b00 + rises[1];
        let b11 = b01.max(b10) + rises[2];
        let indp = ModelParams::indp(b00, b01, b10, b11).unwrap();
        let levels = EvidenceGrid::default().levels().to_vec();
        for w in levels.windows(2) {
            for &other in &levels {
                let (lo, hi) = (w[0], w[1]);
                let step1 = |p: &ModelParams| (p.predict(EvidencePair { e1: lo, e2: other }).unwrap(), p.predict(EvidencePair { e1: hi, e2: other }).unwrap());
                let step2 = |p: &ModelParams| (p.predict(EvidencePair { e1: other, e2: lo }).unwrap(), p.predict(EvidencePair { e1: other, e2: hi }).unwrap());
                for p in [&pwr, &indp] {
                    let (x, y) = step1(p);
                    prop_assert!(x <= y + 1e-15);
                    let (x, y) = step2(p);
                    prop_assert!(x <= y + 1e-15);
                }
            }
        }
    }

    #[test]
    fn predictors_are_pure(v in prop::array::uniform7(0.01f64..0.99), e1 in 0.001f64..0.999, e2 in 0.001f64..0.999) {
        let ev = EvidencePair::new(e1, e2).unwrap();
        let prsp = ModelParams::new(ModelKind::Prsp, v.to_vec()).unwrap();
        prop_assert_eq!(predict_prsp(&prsp, ev).unwrap().to_bits(), predict_prsp(&prsp, ev).unwrap().to_bits());
        let pwr = ModelParams::pwr(v[0], v[1], v[2]).unwrap();
        prop_assert_eq!(predict_pwr(&pwr, ev).unwrap().to_bits(), predict_pwr(&pwr, ev).unwrap().to_bits());
        let out = predict_prsp(&prsp, ev).unwrap();
        prop_assert!(out > 0.0 && out < 1.0);
    }

    #[test]
    fn every_model_nests_a_constant(c in 0.001f64..0.999) {
        for kind in [ModelKind::Linr, ModelKind::Pwr, ModelKind::Indp, ModelKind::Prsp, ModelKind::Wrst] {
            let p = ModelParams::constant(kind, c).unwrap();
            for ev in EvidenceGrid::default().pairs() {
                prop_assert!((p.predict(ev).unwrap() - c).abs() < 1e-12);
            }
        }
    }
}
