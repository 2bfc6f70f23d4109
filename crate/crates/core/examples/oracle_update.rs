//! Minimum cross-entropy update of one prior under soft evidence, and the
//! standard answers over the default 5x5 evidence grid.
//!
//! cargo run --example oracle_update

use uis_bench::dist::{Event, JointDist, Seed};
use uis_bench::oracle::{mce_update_with, standard_answer, EvidenceGrid, EvidencePair, IpfSettings};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let prior: JointDist = uis_bench::dist::sample_uniform(Seed(11), 1)[0];
    println!("prior atoms   {:.4?}", prior.atoms());

    let ev = EvidencePair::new(0.9, 0.3)?;
    let post = mce_update_with(&prior, ev, &IpfSettings::default())?;
    println!("posterior     {:.4?}", post.dist.atoms());
    println!(
        "P(E1)={:.12} P(E2)={:.12} P(C)={:.6} after {} sweeps",
        post.dist.marginal(Event::E1),
        post.dist.marginal(Event::E2),
        post.dist.marginal(Event::C),
        post.sweeps
    );

    // hard evidence reduces to ordinary conditioning
    let hard = standard_answer(&prior, EvidencePair::new(1.0, 0.0)?)?;
    println!("P(C | E1, ~E2): update {hard:.12}, conditioning {:.12}", prior.condition_c(true, false)?);

    let grid = EvidenceGrid::default();
    print!("\n e1\\e2 ");
    for e2 in grid.levels() {
        print!("{e2:>8}");
    }
    println!();
    for &e1 in grid.levels() {
        print!("{e1:>6} ");
        for &e2 in grid.levels() {
            print!("{:>8.4}", standard_answer(&prior, EvidencePair::new(e1, e2)?)?);
        }
        println!();
    }
    Ok(())
}
