use proptest::prelude::*;

use uis_bench::dist::{sample_uniform, CondIndepParams, Event, JointDist, Seed};
use uis_bench::oracle::{
    mce_update, mce_update_with, standard_answer, standard_vector, EvidenceGrid, EvidencePair, IpfSettings,
    SweepOrder,
};

/// Independent route to the posterior P(C): the update preserves the
/// cross-product ratio of the (E1, E2) table and P(C | E1, E2), so the
/// posterior table is the unique table with that ratio and the target
/// margins. The E1=E2=true cell is found by bisection.
fn odds_ratio_oracle(d: &JointDist, e1: f64, e2: f64) -> f64 {
    let p = |a, b| d.cell(a, b);
    let theta = p(false, false) * p(true, true) / (p(false, true) * p(true, false));
    let f = |x: f64| (1.0 - e1 - e2 + x) * x - theta * (e1 - x) * (e2 - x);
    let (mut lo, mut hi) = ((e1 + e2 - 1.0).max(0.0), e1.min(e2));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q11 = 0.5 * (lo + hi);
    let cells = [
        (false, false, 1.0 - e1 - e2 + q11),
        (false, true, e2 - q11),
        (true, false, e1 - q11),
        (true, true, q11),
    ];
    cells.iter().map(|&(a, b, mass)| mass * d.condition_c(a, b).unwrap()).sum()
}

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
fn ipf_matches_odds_ratio_oracle() {
    let grid = EvidenceGrid::default();
    for d in sample_uniform(Seed(31), 200) {
        for ev in grid.pairs() {
            let ipf = standard_answer(&d, ev).unwrap();
            let oracle = odds_ratio_oracle(&d, ev.e1, ev.e2);
            assert!((ipf - oracle).abs() < 1e-10, "{ipf} vs {oracle}");
        }
    }
}

#[test]
fn frozen_standard_answers() {
    // Values from the bisection oracle above.
    let d = CondIndepParams::new(0.5, 0.8, 0.2, 0.8, 0.2).unwrap().expand();
    for (e1, e2) in [(0.25, 0.75), (0.999, 0.001), (0.5, 0.5)] {
        let got = standard_answer(&d, EvidencePair::new(e1, e2).unwrap()).unwrap();
        assert!((got - odds_ratio_oracle(&d, e1, e2)).abs() < 1e-12);
    }
    let got = standard_answer(&d, EvidencePair::new(0.5, 0.5).unwrap()).unwrap();
    assert!((got - 0.5).abs() < 1e-12, "symmetric design gives {got}");
}

#[test]
fn hard_evidence_equals_conditioning() {
    for d in sample_uniform(Seed(32), 1000) {
        for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
            let ev = EvidencePair::new(a as u8 as f64, b as u8 as f64).unwrap();
            let got = standard_answer(&d, ev).unwrap();
            let want = d.condition_c(a, b).unwrap();
            assert!((got - want).abs() < 1e-9);
        }
    }
}

#[test]
fn marginally_independent_prior_gives_bilinear_answer() {
    let d = marginally_independent(0.3, 0.65, [0.1, 0.7, 0.45, 0.95]);
    let b = [0.1, 0.7, 0.45, 0.95];
    for ev in EvidenceGrid::default().pairs() {
        let (e1, e2) = (ev.e1, ev.e2);
        let want =
            (1.0 - e1) * (1.0 - e2) * b[0] + (1.0 - e1) * e2 * b[1] + e1 * (1.0 - e2) * b[2] + e1 * e2 * b[3];
        assert!((standard_answer(&d, ev).unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn grid_extremes_bracket_hard_conditionals() {
    let grid = EvidenceGrid::default();
    for d in sample_uniform(Seed(33), 100) {
        let v = standard_vector(&d, &grid).unwrap();
        assert_eq!(v.len(), 25);
        assert!((v[0].value - d.condition_c(false, false).unwrap()).abs() < 0.01);
        assert!((v[24].value - d.condition_c(true, true).unwrap()).abs() < 0.01);
    }
}

fn dist_strategy() -> impl Strategy<Value = JointDist> {
    prop::array::uniform8(0.001f64..1.0).prop_map(|raw| {
        let sum: f64 = raw.iter().sum();
        JointDist::new(raw.map(|a| a / sum)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn constraints_hold_and_order_is_irrelevant(d in dist_strategy(), e1 in 0.0f64..=1.0, e2 in 0.0f64..=1.0) {
        let ev = EvidencePair::new(e1, e2).unwrap();
        let a = mce_update_with(&d, ev, &IpfSettings::default()).unwrap();
        let b = mce_update_with(&d, ev, &IpfSettings { order: SweepOrder::E2First, ..IpfSettings::default() }).unwrap();
        prop_assert!((a.dist.marginal(Event::E1) - e1).abs() <= 1e-12);
        prop_assert!((a.dist.marginal(Event::E2) - e2).abs() <= 1e-12);
        prop_assert!((a.dist.marginal(Event::C) - b.dist.marginal(Event::C)).abs() < 1e-9);
        prop_assert!((a.dist.atoms().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn posterior_is_an_exponential_tilt(d in dist_strategy(), e1 in 0.01f64..0.99, e2 in 0.01f64..0.99) {
        let post = mce_update(&d, EvidencePair::new(e1, e2).unwrap(), 1e-13, 10_000).unwrap();
        // ratio constant within each (E1, E2) block
        for block in 0..4 {
            let lo = 2 * block;
            let r0 = post.atoms()[lo] / d.atoms()[lo];
            let r1 = post.atoms()[lo + 1] / d.atoms()[lo + 1];
            prop_assert!((r0 - r1).abs() <= 1e-9 * r0.max(r1));
        }
        // and multiplicative across blocks: r00 * r11 = r01 * r10
        let r = |i: usize| post.atoms()[i] / d.atoms()[i];
        prop_assert!((r(0) * r(6) - r(2) * r(4)).abs() <= 1e-8 * (r(0) * r(6)).max(r(2) * r(4)));
    }

    #[test]
    fn zero_atoms_stay_zero(d in dist_strategy(), zero in 0usize..8, e1 in 0.05f64..0.95, e2 in 0.05f64..0.95) {
        let mut atoms = *d.atoms();
        atoms[zero] = 0.0;
        let sum: f64 = atoms.iter().sum();
        let d = JointDist::new(atoms.map(|a| a / sum)).unwrap();
        let post = mce_update(&d, EvidencePair::new(e1, e2).unwrap(), 1e-12, 10_000).unwrap();
        prop_assert_eq!(post.atoms()[zero], 0.0);
    }
}
