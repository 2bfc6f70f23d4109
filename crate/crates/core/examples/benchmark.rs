//! Full benchmark: sample priors, fit every model, summarize the scores.
//!
//! cargo run --release --example benchmark [uniform|cond_indep] [n] [seed]

use std::time::Instant;

use uis_bench::bench::{run_bench, summarize};
use uis_bench::dist::{Family, Seed};
use uis_bench::models::ModelKind;
use uis_bench::optim::OptimSettings;
use uis_bench::oracle::EvidenceGrid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let family: Family = args.next().as_deref().unwrap_or("uniform").parse()?;
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(109);
    let seed = Seed(args.next().map(|s| s.parse()).transpose()?.unwrap_or(7));

    let start = Instant::now();
    let dists = family.sample(seed, n);
    let mut kinds = ModelKind::FITTED.to_vec();
    kinds.push(ModelKind::Bst);
    let reports = run_bench(&dists, &kinds, &EvidenceGrid::default(), &OptimSettings::default(), seed)?;
    let table = summarize(&reports)?;

    println!("{} priors, family {}, seed {}", n, family.name(), seed.0);
    println!("{}", table.render());
    let unconverged = reports
        .iter()
        .flat_map(|r| &r.models)
        .filter(|m| m.result.as_ref().is_ok_and(|f| !f.converged))
        .count();
    println!("{unconverged} fits stopped at the iteration limit; {:.2?}", start.elapsed());
    Ok(())
}
