//! Constant-nu semigroups (d >= 3) below the positivity threshold enter P, then CP, then EB.
use qudit_maps::dynamics::crossing_times;

fn main() -> qudit_maps::Result<()> {
    for d in [3, 4, 5] {
        for nu in [-1.2, -1.5, -(d as f64 - 1.0) + 0.2] {
            let r = crossing_times(d, 1.0, nu)?;
            let show = |t: Option<f64>| t.map_or("never".to_string(), |t| format!("{t:.6}"));
            println!(
                "d = {d}, nu = {nu:+.2}: t_P = {}, t_CP = {}, t_EB = {}, ordered = {}",
                show(r.t_p),
                show(r.t_cp),
                show(r.t_eb),
                r.is_ordered()
            );
        }
    }
    Ok(())
}
