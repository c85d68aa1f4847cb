//! Classifies the named maps of the family at d = 3 with both routes.
use qudit_maps::channels::{named_map, NamedMap};
use qudit_maps::regions::{classify_numeric, classify_point};

fn main() -> qudit_maps::Result<()> {
    let d = 3;
    println!("{:<10} {:>8} {:>8}  closed(P,CP,EB)  oracle(P,CP,EB)", "map", "alpha", "beta");
    for name in [NamedMap::Reduction, NamedMap::Pinch2, NamedMap::PhiCp, NamedMap::E1, NamedMap::E2, NamedMap::E3, NamedMap::E4] {
        let (_, p) = named_map(name, d)?;
        let cf = classify_point(&p);
        let or = classify_numeric(&p, 2000, 7)?;
        let flags = |v: &qudit_maps::RegionVerdict| {
            format!("{} {} {}", v.positive as u8, v.completely_positive as u8, v.entanglement_breaking as u8)
        };
        println!("{:<10} {:>8.4} {:>8.4}  {:<15}  {}", name.name(), p.alpha, p.beta, flags(&cf), flags(&or));
    }
    Ok(())
}
