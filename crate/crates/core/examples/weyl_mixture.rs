//! Random Weyl-operator mixture: CP-boundary riding and, at d = 2, nu(t) = -tanh t.
use qudit_maps::dynamics::{extract_time_local_generator, weyl_mixture_map, Stencil};

fn main() -> qudit_maps::Result<()> {
    for t in [0.25, 0.5, 1.0, 2.0] {
        let fit = extract_time_local_generator(&|s| weyl_mixture_map(2, s), t, 1e-3, Stencil::FivePoint)?;
        println!("d = 2, t = {t}: nu = {:+.8}  -tanh t = {:+.8}", fit.nu_fit, -t.tanh());
    }
    for d in [2, 3, 4] {
        let m = weyl_mixture_map(d, 1.0)?;
        println!(
            "d = {d}, t = 1: trace defect {:.1e}, min Choi eig {:+.1e}",
            m.trace_preservation_defect(),
            m.min_choi_eig()?
        );
    }
    Ok(())
}
