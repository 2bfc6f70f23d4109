//! Fits every model to one prior's standard vector and scores it.
//!
//! cargo run --example fit_models [seed]

use uis_bench::bench::eta;
use uis_bench::dist::{sample_uniform, Seed};
use uis_bench::models::{true_params_indp, true_params_prsp, ModelKind};
use uis_bench::optim::{fit, fit_with_warm_start, OptimSettings};
use uis_bench::oracle::{standard_vector, EvidenceGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = Seed(std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(3));
    let prior = sample_uniform(seed, 1)[0];
    let targets = standard_vector(&prior, &EvidenceGrid::default())?;
    let settings = OptimSettings::default();

    let eps_linr = fit(ModelKind::Linr, &targets, &settings, seed)?.epsilon;
    let eps_wrst = fit(ModelKind::Wrst, &targets, &settings, seed)?.epsilon;
    println!("{:<5} {:>10} {:>8} {:>6} {:>5}  params", "model", "epsilon", "eta", "iters", "start");
    for kind in ModelKind::FITTED {
        let warm = match kind {
            ModelKind::Indp => Some(true_params_indp(&prior)?),
            ModelKind::Prsp => Some(true_params_prsp(&prior)?),
            _ => None,
        };
        let r = fit_with_warm_start(kind, &targets, &settings, seed, warm.as_ref())?;
        let score = eta(r.epsilon, eps_linr, eps_wrst);
        println!(
            "{:<5} {:>10.6} {:>8.4} {:>6} {:>5}  {:.4?}",
            kind.name(),
            r.epsilon,
            score.value,
            r.iterations,
            r.start_index,
            r.params.values()
        );
    }
    Ok(())
}
