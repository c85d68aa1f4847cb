//! Searches for X with Phi(X*X) - Phi(X)*Phi(X) not positive semidefinite.
use qudit_maps::channels::{build_phi_family, hs_adjoint, transposition};
use qudit_maps::generators::{dissipativity_threshold, semigroup_numeric};
use qudit_maps::regions::schwarz_falsify;
use qudit_maps::{GenParams, MapParams};

fn main() -> qudit_maps::Result<()> {
    let found = schwarz_falsify(&transposition(2)?, 1000, 1)?;
    println!("transposition, d = 2: witness found = {}", found.is_some());

    let reduction = build_phi_family(&MapParams::new(3, 1.5, 0.0)?)?;
    println!("reduction, d = 3: witness found = {}", schwarz_falsify(&reduction, 1000, 1)?.is_some());

    let d = 3;
    for shift in [0.1, -0.1] {
        let nu = dissipativity_threshold(d) + shift;
        let step = hs_adjoint(&semigroup_numeric(&GenParams::new(d, 1.0, nu)?, 1e-3)?);
        let found = schwarz_falsify(&step, 1000, 1)?;
        println!("adjoint semigroup at t = 1e-3, nu = {nu:+.4}: witness found = {}", found.is_some());
    }
    Ok(())
}
