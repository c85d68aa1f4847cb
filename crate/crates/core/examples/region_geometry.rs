//! Region polygons and areas, with the large-d ratios.
use qudit_maps::regions::{region_area, region_polygon, Region};

fn main() -> qudit_maps::Result<()> {
    let poly = region_polygon(Region::EB, 3)?;
    print!("EB polygon at d = 3\n{}", poly.to_csv());

    println!("\n d   area P    area CP   EB formula  EB polygon  CP/P    EB/P");
    for d in [2, 3, 4, 6, 8, 12, 16] {
        let p = region_area(Region::P, d)?;
        let cp = region_area(Region::CP, d)?;
        let eb = region_area(Region::EB, d)?;
        println!(
            "{d:>2}  {:.6}  {:.6}  {:.6}    {:.6}    {:.4}  {:.4}",
            p.closed_form,
            cp.closed_form,
            eb.closed_form,
            eb.shoelace,
            cp.shoelace / p.shoelace,
            eb.shoelace / p.shoelace
        );
    }
    Ok(())
}
