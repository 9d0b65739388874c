//! Gromov four-point hyperbolicity of a tree metric, a grid and real slot sets.

use hyperlens::data::{generate_synthetic, SyntheticConfig};
use hyperlens::metrics::{gromov_delta_detailed, hyperbolicity_analysis, DistanceMatrix, HyperbolicityScope};
use hyperlens::ManifoldSpec;

fn main() -> hyperlens::Result<()> {
    // star with four unit leaves: a tree, so delta is zero
    let star = DistanceMatrix::from_rows(&[
        vec![0.0, 1.0, 1.0, 1.0, 1.0],
        vec![1.0, 0.0, 2.0, 2.0, 2.0],
        vec![1.0, 2.0, 0.0, 2.0, 2.0],
        vec![1.0, 2.0, 2.0, 0.0, 2.0],
        vec![1.0, 2.0, 2.0, 2.0, 0.0],
    ])?;
    println!("star: {:?}", gromov_delta_detailed(&star)?);

    let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let dm = DistanceMatrix::from_points(&square, |a, b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt())?;
    println!("unit square: {:?}", gromov_delta_detailed(&dm)?);

    let bundle = generate_synthetic(&SyntheticConfig {
        n_scenes: 10,
        seed: 2,
        ..SyntheticConfig::default()
    })?;
    for m in ManifoldSpec::default_grid() {
        let h = hyperbolicity_analysis(&bundle, m, HyperbolicityScope::Union)?;
        if let Some(s) = h.summary {
            println!("{m}: delta_norm median {:.4} (q1 {:.4}, q3 {:.4})", s.median, s.q1, s.q3);
        }
    }
    Ok(())
}
