//! The eternally non-Markovian schedule rides the CP boundary; its P- and Schwarz-divisible
//! variants peel off after their switch times.
use qudit_maps::dynamics::{map_at, switch_times, trajectory, Schedule};

fn main() -> qudit_maps::Result<()> {
    let d = 3;
    let ts = switch_times(d);
    println!("d = {d}: t_* = {:.6}, t_S = {:.6}", ts.t_star, ts.t_s);

    let pts = trajectory(&Schedule::OptimalEnm { d }, 5.0, 10)?;
    for p in &pts {
        println!("t = {:.1}  alpha = {:.6}  beta = {:+.6}  min Choi eig = {:+.2e}", p.t, p.alpha, p.beta, p.min_choi_eig);
    }

    for s in [Schedule::PDivisible { d }, Schedule::SchwarzDivisible { d }] {
        let m = map_at(&s, 3.0)?;
        println!("{s} at t = 3: min Choi eig = {:.6}", m.min_choi_eig()?);
    }
    Ok(())
}
