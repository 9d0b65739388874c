//! Lift tangent vectors onto the hyperboloid and compare geodesic distances.

use hyperlens::manifold::{cosine_distance, distance_to_origin, exp_map_origin, lorentz_distance, ManifoldSpec};

fn main() -> hyperlens::Result<()> {
    let u = [0.3, -0.4, 1.2];
    let v = [0.5, 0.1, 0.9];

    for c in [0.2, 0.5, 1.0] {
        let x = exp_map_origin(&u, c)?;
        let y = exp_map_origin(&v, c)?;
        println!(
            "c = {c}: x0 = {:.6}, residual = {:.2e}, d(x, y) = {:.6}",
            x.time(),
            x.constraint_residual(),
            lorentz_distance(&x, &y, c)?
        );
    }

    // the exponential map at the origin preserves radial distance
    let m = ManifoldSpec::lorentz(0.5)?;
    println!("|u| = {:.6}, depth under {m} = {:.6}", distance_to_origin(&u, ManifoldSpec::Euclidean)?, distance_to_origin(&u, m)?);
    println!("cosine distance = {:.6}", cosine_distance(&u, &v)?);
    Ok(())
}
