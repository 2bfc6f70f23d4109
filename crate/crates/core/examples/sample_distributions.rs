//! Draws a few seeded priors from each family and writes them as CSV.
//!
//! cargo run --example sample_distributions

use uis_bench::dist::{CondIndepParams, Event, Family, Seed};
use uis_bench::io::write_dists;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = Seed(2024);
    for family in [Family::Uniform, Family::CondIndep] {
        println!("# {}", family.name());
        let dists = family.sample(seed, 4);
        for (k, d) in dists.iter().enumerate() {
            let p_c = d.marginal(Event::C);
            let p_e1 = d.marginal(Event::E1);
            let p_e2 = d.marginal(Event::E2);
            print!("{k}: P(C)={p_c:.3} P(E1)={p_e1:.3} P(E2)={p_e2:.3}");
            match CondIndepParams::extract(d) {
                Ok(ci) if family == Family::CondIndep => println!(
                    "  P(E1|C)={:.3} P(E1|~C)={:.3} P(E2|C)={:.3} P(E2|~C)={:.3}",
                    ci.p_e1_given_c, ci.p_e1_given_not_c, ci.p_e2_given_c, ci.p_e2_given_not_c
                ),
                _ => println!(),
            }
        }
        let rows: Vec<(u64, _)> = dists.into_iter().enumerate().map(|(k, d)| (k as u64, d)).collect();
        write_dists(std::io::stdout().lock(), &rows)?;
        println!();
    }
    Ok(())
}
