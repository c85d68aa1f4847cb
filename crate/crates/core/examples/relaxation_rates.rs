//! Relaxation rates and the Gamma_max <= c_d Gamma bound at each class threshold.
use qudit_maps::generators::spectrum_rates;
use qudit_maps::{GenParams, PositivityClass};

fn main() -> qudit_maps::Result<()> {
    println!(" d  class     nu        Gamma_l  Gamma_ij  Gamma    c_d      saturated");
    for d in [2, 3, 4] {
        for class in [PositivityClass::Positive, PositivityClass::Schwarz, PositivityClass::KPositive] {
            let nu = class.nu_threshold(d);
            let r = spectrum_rates(&GenParams::new(d, 1.0, nu)?, class)?;
            assert!(r.bound_satisfied);
            println!(
                "{d:>2}  {:<8}  {nu:>7.4}  {:>7.3}  {:>8.3}  {:>7.3}  {:.5}  {}",
                class.to_string(),
                r.gamma_diag,
                r.gamma_offdiag,
                r.gamma_total,
                r.c_d,
                r.bound_saturated
            );
        }
    }
    Ok(())
}
