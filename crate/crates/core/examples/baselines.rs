//! Sequential baselines on one small window, checked against the exhaustive
//! optimum.

use sliding_kcenter::solver::{brute_force_optimum, charikar, gonzalez, samp_charikar};
use sliding_kcenter::synthetic::gaussian_blobs;
use sliding_kcenter::{radius_excluding, Point};

fn main() -> sliding_kcenter::Result<()> {
    let (k, z) = (3, 2);
    let mut window = gaussian_blobs(30, 2, 3, 20.0, 5);
    window.push(Point::new(31, vec![300.0, 300.0])?);
    window.push(Point::new(32, vec![-300.0, 280.0])?);

    let (_, opt) = brute_force_optimum(&window, k, z)?;
    let full = charikar(&window, k, z, 1.5)?;
    let sampled = samp_charikar(&window, k, z, 1.5, 10, 1)?;
    let far_first = gonzalez(&window, k);

    println!("optimum r*          {opt:.3}");
    println!("charikar            {:.3}", full.achieved_radius.unwrap());
    println!("samp-charikar (10)  {:.3}", sampled.achieved_radius.unwrap());
    println!("gonzalez            {:.3}", radius_excluding(&far_first, &window, z)?);
    Ok(())
}
