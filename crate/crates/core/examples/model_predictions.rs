//! Compares each model at its "true" parameters against the standard answer
//! on a conditionally independent prior, where PRSP is exact at the corners.
//!
//! cargo run --example model_predictions

use uis_bench::dist::CondIndepParams;
use uis_bench::models::{true_params_indp, true_params_prsp, ModelParams};
use uis_bench::optim::{objective, ols_linr};
use uis_bench::oracle::{standard_answer, standard_vector, EvidenceGrid, EvidencePair};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let prior = CondIndepParams::new(0.3, 0.8, 0.25, 0.7, 0.4)?.expand();
    let grid = EvidenceGrid::default();
    let targets = standard_vector(&prior, &grid)?;

    let models = [
        ("INDP", true_params_indp(&prior)?),
        ("PRSP", true_params_prsp(&prior)?),
        ("LINR", ols_linr(&targets)?),
        ("WRST", ModelParams::wrst(0.3)?),
    ];
    let probes = [(1.0, 1.0), (0.0, 1.0), (0.8, 0.7), (0.5, 0.5), (0.999, 0.001)];

    print!("{:>14} {:>9}", "(e1, e2)", "standard");
    for (name, _) in &models {
        print!(" {name:>9}");
    }
    println!();
    for (e1, e2) in probes {
        let ev = EvidencePair::new(e1, e2)?;
        print!("{:>14} {:>9.5}", format!("({e1}, {e2})"), standard_answer(&prior, ev)?);
        for (_, p) in &models {
            print!(" {:>9.5}", p.predict(ev)?);
        }
        println!();
    }

    println!();
    for (name, p) in &models {
        println!("{name}: params {:.4?}, grid RMS error {:.5}", p.values(), objective(p, &targets)?);
    }
    Ok(())
}
