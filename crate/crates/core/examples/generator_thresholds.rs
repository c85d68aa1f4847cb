//! Recovers the three nu thresholds of the generator family from the numerical oracles alone.
use qudit_maps::generators::oracle_threshold;
use qudit_maps::PositivityClass;

fn main() -> qudit_maps::Result<()> {
    let budget = 2000;
    println!(" d  class     closed form   bisection");
    for d in 2..=5 {
        for class in [PositivityClass::Positive, PositivityClass::Schwarz, PositivityClass::KPositive] {
            let found = oracle_threshold(d, class, budget, 42, 1e-4)?;
            println!("{d:>2}  {:<8}  {:>11.6}  {:>10.6}", class.to_string(), class.nu_threshold(d), found);
        }
    }
    Ok(())
}
